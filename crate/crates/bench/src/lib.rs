//! Shared setup for the criterion benchmarks.

use verso::algebra::{translate, Algebra};
use verso::harness::{synthetic_dataset, CORPUS};
use verso::model::{CondensedDataset, FlatDataset};

pub const SHARED: usize = 4;
pub const VOLATILE: usize = 8;

/// A corpus query compiled for both engines.
pub struct Plan {
    pub name: &'static str,
    pub flat: Algebra,
    pub condensed: Algebra,
}

pub fn plans() -> Vec<Plan> {
    CORPUS
        .iter()
        .map(|q| {
            let flat = verso::query::prepare(q.text).expect("corpus queries compile");
            let condensed = translate(&flat).expect("corpus queries translate");
            Plan {
                name: q.name,
                flat,
                condensed,
            }
        })
        .collect()
}

/// Both models of the synthetic archive with `versions` versions and `steps` retained units per version.
pub fn stores(versions: usize, steps: usize) -> (FlatDataset, CondensedDataset) {
    let spec = synthetic_dataset(versions, steps, SHARED, VOLATILE);
    (spec.flat(), spec.condensed())
}
