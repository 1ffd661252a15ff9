//! Dependency discovery for push propagation.

use std::collections::{BTreeSet, VecDeque};

use super::store::{FieldKey, HandlerStore, Location, ObjectStore};
use crate::classtable::ClassTable;
use crate::syntax::Expr;

/// True iff the field access `ℓ.f` occurs in `e` through field receivers,
/// invocation receivers and arguments, or constructor arguments.
pub fn contains(e: &Expr, key: &FieldKey) -> bool {
    contains_with_this(e, None, key)
}

/// `contains([this_loc/this]e, key)` without building the substituted term.
fn contains_with_this(e: &Expr, this_loc: Option<Location>, key: &FieldKey) -> bool {
    let is_key_loc = |r: &Expr| match r {
        Expr::Loc(l) => *l == key.loc,
        Expr::Var(x) => x == "this" && this_loc == Some(key.loc),
        _ => false,
    };
    match e {
        Expr::Field(r, f) => {
            (*f == key.field && is_key_loc(r)) || contains_with_this(r, this_loc, key)
        }
        Expr::Invoke(r, _, args) => {
            contains_with_this(r, this_loc, key)
                || args.iter().any(|a| contains_with_this(a, this_loc, key))
        }
        Expr::New(_, args) => args.iter().any(|a| contains_with_this(a, this_loc, key)),
        _ => false,
    }
}

/// Composite fields whose initializer, instantiated at its object, reads `key`.
fn direct_sinks(ct: &ClassTable, mu: &ObjectStore, key: &FieldKey) -> Vec<(FieldKey, usize)> {
    let mut out = Vec::new();
    for (loc, obj) in mu.iter() {
        let Ok(composites) = ct.composite(&obj.class) else {
            continue;
        };
        for (i, c) in composites.iter().enumerate() {
            if contains_with_this(&c.init, Some(loc), key) {
                out.push((FieldKey::new(loc, c.name.clone()), i));
            }
        }
    }
    out
}

/// All transitive sinks of `key`, each once, ordered by location and then
/// by the field's position in `composite(C)`. `key` itself appears only if
/// a dependency cycle leads back to it.
pub fn effect(ct: &ClassTable, mu: &ObjectStore, key: &FieldKey) -> Vec<FieldKey> {
    let mut found: BTreeSet<(Location, usize, FieldKey)> = BTreeSet::new();
    let mut seen: BTreeSet<FieldKey> = BTreeSet::new();
    let mut queue = VecDeque::from([key.clone()]);
    while let Some(k) = queue.pop_front() {
        for (sink, idx) in direct_sinks(ct, mu, &k) {
            if seen.insert(sink.clone()) {
                found.insert((sink.loc, idx, sink.clone()));
                queue.push_back(sink);
            }
        }
    }
    found.into_iter().map(|(_, _, k)| k).collect()
}

/// The handlers registered on every sink of `key`, as one right-nested
/// sequence in [`effect`] order. Handlers on `key` itself are not included.
pub fn handlers_of(
    ct: &ClassTable,
    sigma: &HandlerStore,
    mu: &ObjectStore,
    key: &FieldKey,
) -> Expr {
    collect_handlers(sigma, &effect(ct, mu, key))
}

pub(crate) fn collect_handlers(sigma: &HandlerStore, sinks: &[FieldKey]) -> Expr {
    Expr::seq_all(sinks.iter().flat_map(|s| sigma.handlers(s).iter().cloned()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classtable::build_class_table;
    use crate::eval::Object;
    use crate::syntax::parse_program;

    fn key(l: u32, f: &str) -> FieldKey {
        FieldKey::new(Location(l), f)
    }

    #[test]
    fn contains_cases() {
        let k = key(0, "f");
        let lf = Expr::field(Expr::Loc(Location(0)), "f");
        assert!(contains(&lf, &k));
        assert!(!contains(&Expr::field(Expr::Loc(Location(0)), "g"), &k));
        assert!(!contains(&Expr::field(Expr::Loc(Location(1)), "f"), &k));
        assert!(contains(&Expr::new_obj("C", vec![lf.clone()]), &k));
        assert!(contains(&Expr::field(lf.clone(), "g"), &k));
        assert!(contains(
            &Expr::invoke(Expr::Loc(Location(2)), "m", vec![Expr::Empty, lf.clone()]),
            &k
        ));
        // assignments and sequences are not traversed
        assert!(!contains(&Expr::seq(Expr::Empty, lf.clone()), &k));
        assert!(!contains(&Expr::field(Expr::this(), "f"), &k));
    }

    fn table(src: &str) -> ClassTable {
        build_class_table(&parse_program(src).unwrap()).unwrap()
    }

    fn obj(class: &str, args: &[u32]) -> Object {
        Object {
            class: class.into(),
            args: args.iter().map(|&a| Location(a)).collect(),
        }
    }

    #[test]
    fn empty_store_has_no_sinks() {
        let ct = table("unit");
        assert!(effect(&ct, &ObjectStore::new(), &key(0, "f")).is_empty());
    }

    #[test]
    fn chain_and_order() {
        let ct = table(
            "class C extends Object {
                signal C h = this.g;
                signal C g = this.f;
                signal C f;
                C(C f) { super(); this.f = f; }
            } unit",
        );
        let mu: ObjectStore = [(Location(0), obj("C", &[0]))].into_iter().collect();
        assert_eq!(effect(&ct, &mu, &key(0, "f")), [key(0, "h"), key(0, "g")]);
        assert_eq!(effect(&ct, &mu, &key(0, "g")), [key(0, "h")]);
        assert!(effect(&ct, &mu, &key(0, "h")).is_empty());
    }

    #[test]
    fn sinks_on_other_objects_need_a_literal_location() {
        let ct = table(
            "class C extends Object {
                signal C g = this.f.f;
                signal C f;
                C(C f) { super(); this.f = f; }
            } unit",
        );
        let mu: ObjectStore = [(Location(0), obj("C", &[1])), (Location(1), obj("C", &[1]))]
            .into_iter()
            .collect();
        // `this.f.f` at @0 mentions only @0.f lexically
        assert_eq!(effect(&ct, &mu, &key(0, "f")), [key(0, "g")]);
        assert_eq!(effect(&ct, &mu, &key(1, "f")), [key(1, "g")]);
    }

    #[test]
    fn handlers_follow_effect_order() {
        let ct = table(
            "class C extends Object {
                signal C g = this.f;
                signal C h = this.f;
                signal C f;
                C(C f) { super(); this.f = f; }
            } unit",
        );
        let mu: ObjectStore = [(Location(0), obj("C", &[0]))].into_iter().collect();
        let mut sigma = HandlerStore::new();
        assert_eq!(handlers_of(&ct, &sigma, &mu, &key(0, "f")), Expr::Empty);
        sigma.subscribe(key(0, "h"), Expr::var("h1"));
        assert_eq!(handlers_of(&ct, &sigma, &mu, &key(0, "f")), Expr::var("h1"));
        sigma.subscribe(key(0, "g"), Expr::var("g1"));
        sigma.subscribe(key(0, "f"), Expr::var("own"));
        assert_eq!(
            handlers_of(&ct, &sigma, &mu, &key(0, "f")),
            Expr::seq(Expr::var("g1"), Expr::var("h1"))
        );
    }
}
