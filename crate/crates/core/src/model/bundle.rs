use std::fmt;

/// Largest supported item count; bundles are 16-bit masks.
pub const MAX_ITEMS: usize = 16;

/// A subset of the items `{0, .., n-1}`, stored as a bitmask.
///
/// Items are 0-based in code and 1-based in every text form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bundle(u16);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn from_mask(mask: u16) -> Self {
        Bundle(mask)
    }

    pub fn singleton(item: usize) -> Self {
        Bundle(1 << item)
    }

    pub fn from_items(items: &[usize]) -> Self {
        Bundle(items.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn full(n: usize) -> Self {
        Bundle(((1u32 << n) - 1) as u16)
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, item: usize) -> bool {
        self.0 & (1 << item) != 0
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    pub fn without(self, item: usize) -> Bundle {
        Bundle(self.0 & !(1 << item))
    }

    pub fn items(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..MAX_ITEMS).filter(move |&i| mask & (1 << i) != 0)
    }

    /// Image under an item relabeling: item `i` moves to `perm[i]`.
    pub fn permuted(self, perm: &[usize]) -> Bundle {
        Bundle::from_items(&self.items().map(|i| perm[i]).collect::<Vec<_>>())
    }

    /// Text key used by the menu JSON format, e.g. `"1,3"`.
    pub fn key(self) -> String {
        self.items()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// Orders bundles by cardinality, then lexicographically by sorted item list.
pub fn canonical_cmp(a: Bundle, b: Bundle) -> std::cmp::Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.items().cmp(b.items()))
}

/// All nonempty bundles of `n` items: singletons ascending, then pairs, then
/// larger bundles. This is the order of menu price vectors everywhere.
pub fn canonical_bundles(n: usize) -> Vec<Bundle> {
    let mut all: Vec<Bundle> = (1..(1u32 << n)).map(|m| Bundle(m as u16)).collect();
    all.sort_by(|a, b| canonical_cmp(*a, *b));
    all
}
