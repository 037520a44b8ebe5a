use std::fmt;

use super::ModelError;

/// Label of the reserved version carrying the metadata graph.
pub const METADATA_VERSION_LABEL: &str = "v:0";

/// Ordinal of a version; doubles as its bit position in a [`VersionSet`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VersionId(pub u32);

impl VersionId {
    pub const METADATA: VersionId = VersionId(0);

    pub fn ordinal(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for VersionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Bitstring over version ordinals. Storage grows in 64-bit blocks and is kept free of
/// trailing zero blocks, so structural equality is set equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VersionSet {
    blocks: Vec<u64>,
}

impl VersionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(version: VersionId) -> Self {
        let mut set = Self::new();
        set.insert(version);
        set
    }

    pub fn from_blocks(mut blocks: Vec<u64>) -> Self {
        while blocks.last() == Some(&0) {
            blocks.pop();
        }
        VersionSet { blocks }
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn insert(&mut self, version: VersionId) -> bool {
        let (block, bit) = Self::position(version);
        if block >= self.blocks.len() {
            self.blocks.resize(block + 1, 0);
        }
        let was_set = self.blocks[block] & bit != 0;
        self.blocks[block] |= bit;
        !was_set
    }

    pub fn remove(&mut self, version: VersionId) -> bool {
        let (block, bit) = Self::position(version);
        let Some(slot) = self.blocks.get_mut(block) else {
            return false;
        };
        let was_set = *slot & bit != 0;
        *slot &= !bit;
        self.normalize();
        was_set
    }

    pub fn contains(&self, version: VersionId) -> bool {
        let (block, bit) = Self::position(version);
        self.blocks.get(block).is_some_and(|b| b & bit != 0)
    }

    /// Popcount.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_blocks(
            self.blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a & b)
                .collect(),
        )
    }

    pub fn union(&self, other: &Self) -> Self {
        let (long, short) = if self.blocks.len() >= other.blocks.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut blocks = long.blocks.clone();
        for (slot, b) in blocks.iter_mut().zip(&short.blocks) {
            *slot |= b;
        }
        VersionSet { blocks }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, a)| a & !other.blocks.get(i).copied().unwrap_or(0))
            .collect();
        Self::from_blocks(blocks)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.blocks.iter().zip(&other.blocks).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.blocks.get(i).copied().unwrap_or(0) == 0)
    }

    /// Members in ascending ordinal order.
    pub fn iter(&self) -> impl Iterator<Item = VersionId> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &block)| {
            let mut rest = block;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                Some(VersionId(i as u32 * 64 + bit))
            })
        })
    }

    /// Highest member ordinal plus one; zero for the empty set.
    pub fn width(&self) -> u32 {
        match self.blocks.last() {
            None => 0,
            Some(last) => (self.blocks.len() as u32 - 1) * 64 + (64 - last.leading_zeros()),
        }
    }

    fn position(version: VersionId) -> (usize, u64) {
        ((version.0 / 64) as usize, 1u64 << (version.0 % 64))
    }

    fn normalize(&mut self) {
        while self.blocks.last() == Some(&0) {
            self.blocks.pop();
        }
    }
}

impl FromIterator<VersionId> for VersionSet {
    fn from_iter<I: IntoIterator<Item = VersionId>>(iter: I) -> Self {
        let mut set = VersionSet::new();
        for v in iter {
            set.insert(v);
        }
        set
    }
}

impl fmt::Debug for VersionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Version labels indexed by ordinal. Ordinal 0 is always the metadata version `v:0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VersionRegistry {
    labels: Vec<String>,
}

impl Default for VersionRegistry {
    fn default() -> Self {
        VersionRegistry {
            labels: vec![METADATA_VERSION_LABEL.to_owned()],
        }
    }
}

impl VersionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, label: impl Into<String>) -> Result<VersionId, ModelError> {
        let label = label.into();
        if self.labels.contains(&label) {
            return Err(ModelError::DuplicateVersion(label));
        }
        self.labels.push(label);
        Ok(VersionId(self.labels.len() as u32 - 1))
    }

    pub fn lookup(&self, label: &str) -> Option<VersionId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| VersionId(i as u32))
    }

    pub fn label(&self, version: VersionId) -> Option<&str> {
        self.labels.get(version.0 as usize).map(String::as_str)
    }

    /// Number of user versions (the metadata version is not counted).
    pub fn len(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// User versions in ordinal order.
    pub fn versions(&self) -> impl Iterator<Item = VersionId> {
        (1..self.labels.len() as u32).map(VersionId)
    }

    pub fn all(&self) -> VersionSet {
        self.versions().collect()
    }

    /// Checks that `set` only mentions user versions of this registry.
    pub fn check(&self, set: &VersionSet) -> Result<(), ModelError> {
        if set.width() > self.labels.len() as u32 || set.contains(VersionId::METADATA) {
            return Err(ModelError::RegistryMismatch {
                width: set.width(),
                registered: self.len(),
            });
        }
        Ok(())
    }

    pub fn intersect(&self, a: &VersionSet, b: &VersionSet) -> Result<VersionSet, ModelError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.intersection(b))
    }

    pub fn union(&self, a: &VersionSet, b: &VersionSet) -> Result<VersionSet, ModelError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.union(b))
    }

    pub fn difference(&self, a: &VersionSet, b: &VersionSet) -> Result<VersionSet, ModelError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.difference(b))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ordinals: &[u32]) -> VersionSet {
        ordinals.iter().map(|&o| VersionId(o)).collect()
    }

    #[test]
    fn bitwise_and_of_two_version_sets() {
        let a = set(&[1, 5]);
        let b = set(&[1, 10]);
        assert_eq!(a.intersection(&b), set(&[1]));
        assert!(a.intersection(&VersionSet::new()).is_empty());
    }

    #[test]
    fn trailing_blocks_are_normalized() {
        let mut s = set(&[3, 130]);
        assert_eq!(s.blocks().len(), 3);
        s.remove(VersionId(130));
        assert_eq!(s, set(&[3]));
        assert_eq!(s.blocks().len(), 1);
        assert_eq!(set(&[70]).difference(&set(&[70])), VersionSet::new());
    }

    #[test]
    fn width_and_iteration() {
        let s = set(&[0, 63, 64, 200]);
        assert_eq!(s.width(), 201);
        assert_eq!(s.len(), 4);
        let members: Vec<u32> = s.iter().map(VersionId::ordinal).collect();
        assert_eq!(members, vec![0, 63, 64, 200]);
    }

    #[test]
    fn registry_rejects_foreign_sets() {
        let mut reg = VersionRegistry::new();
        reg.register("v:1").unwrap();
        reg.register("v:2").unwrap();
        assert!(reg.intersect(&set(&[1]), &set(&[2])).is_ok());
        assert!(matches!(
            reg.intersect(&set(&[1]), &set(&[9])),
            Err(ModelError::RegistryMismatch { .. })
        ));
        assert!(matches!(
            reg.register("v:2"),
            Err(ModelError::DuplicateVersion(_))
        ));
        assert!(matches!(
            reg.register("v:0"),
            Err(ModelError::DuplicateVersion(_))
        ));
    }
}
