use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::Expr;

/// An object address. Rendered `@n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location(pub u32);

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

/// A field access on a location, `ℓ.f`; the key of the handler store.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldKey {
    pub loc: Location,
    pub field: String,
}

impl FieldKey {
    pub fn new(loc: Location, field: impl Into<String>) -> Self {
        FieldKey {
            loc,
            field: field.into(),
        }
    }
}

impl fmt::Display for FieldKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.loc, self.field)
    }
}

/// `new C(ℓ̄)`: a class and its source-field values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Object {
    pub class: String,
    pub args: Vec<Location>,
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "new {}(", self.class)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// μ
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ObjectStore {
    cells: BTreeMap<Location, Object>,
}

impl ObjectStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, loc: Location) -> Option<&Object> {
        self.cells.get(&loc)
    }

    pub fn contains(&self, loc: Location) -> bool {
        self.cells.contains_key(&loc)
    }

    pub fn insert(&mut self, loc: Location, obj: Object) {
        self.cells.insert(loc, obj);
    }

    /// Overwrite slot `index` of `loc`, returning the previous value.
    pub fn set_arg(&mut self, loc: Location, index: usize, value: Location) -> Option<Location> {
        let slot = self.cells.get_mut(&loc)?.args.get_mut(index)?;
        Some(std::mem::replace(slot, value))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in ascending location order.
    pub fn iter(&self) -> impl Iterator<Item = (Location, &Object)> {
        self.cells.iter().map(|(l, o)| (*l, o))
    }

    pub fn locations(&self) -> impl Iterator<Item = Location> + '_ {
        self.cells.keys().copied()
    }
}

impl FromIterator<(Location, Object)> for ObjectStore {
    fn from_iter<I: IntoIterator<Item = (Location, Object)>>(iter: I) -> Self {
        ObjectStore {
            cells: iter.into_iter().collect(),
        }
    }
}

/// σ. Each key holds the handlers registered on it, in registration order;
/// [`HandlerStore::get`] materializes them as one right-nested sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct HandlerStore {
    entries: BTreeMap<FieldKey, Vec<Expr>>,
}

impl HandlerStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// `σ(ℓ.f)`: the concatenated handlers, or `Empty` for an absent key.
    pub fn get(&self, key: &FieldKey) -> Expr {
        self.entries
            .get(key)
            .map(|hs| Expr::seq_all(hs.iter().cloned()))
            .unwrap_or(Expr::Empty)
    }

    pub fn handlers(&self, key: &FieldKey) -> &[Expr] {
        self.entries.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `σ ⊎ {ℓ.f ↦ σ(ℓ.f); e}`
    pub fn subscribe(&mut self, key: FieldKey, handler: Expr) {
        self.entries.entry(key).or_default().push(handler);
    }

    pub fn keys(&self) -> impl Iterator<Item = &FieldKey> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FieldKey, &[Expr])> {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }
}
