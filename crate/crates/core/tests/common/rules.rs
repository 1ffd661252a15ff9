//! Accepting and rejecting instances for each expression, method and
//! class typing rule. Each function panics when the checker disagrees.

use super::*;
use fsj_core::eval::Location;
use fsj_core::syntax::{Expr, TypeName};
use fsj_core::typecheck::{StoreTyping, TypeEnv, TypeErrorKind};
use fsj_core::{load, LoadError};

pub struct RuleCase {
    pub rule: &'static str,
    pub accept: fn(),
    pub reject: fn(),
}

pub const RULES: &[RuleCase] = &[
    RuleCase {
        rule: "T-VAR",
        accept: t_var_accepts_bound_variable,
        reject: t_var_rejects_unbound_variable,
    },
    RuleCase {
        rule: "T-FIELD",
        accept: t_field_accepts_source_inherited_and_composite_fields,
        reject: t_field_rejects_missing_field,
    },
    RuleCase {
        rule: "T-INVK",
        accept: t_invk_accepts_inherited_method_with_subtype_argument,
        reject: t_invk_rejects_wrong_arity_and_unknown_method,
    },
    RuleCase {
        rule: "T-NEW",
        accept: t_new_accepts_all_source_fields_in_order,
        reject: t_new_rejects_composite_as_argument_slot,
    },
    RuleCase {
        rule: "T-ASSIGN",
        accept: t_assign_accepts_plain_and_source_signal,
        reject: t_assign_rejects_composite_target_and_supertype_value,
    },
    RuleCase {
        rule: "T-ASSIGNCONT",
        accept: t_assigncont_accepts_unit_body,
        reject: t_assigncont_rejects_non_unit_body,
    },
    RuleCase {
        rule: "T-CAT",
        accept: t_cat_types_as_right_operand,
        reject: t_cat_rejects_non_unit_left_operand,
    },
    RuleCase {
        rule: "T-SUBSCRIBE",
        accept: t_subscribe_accepts_signal_field_and_unit_handler,
        reject: t_subscribe_rejects_plain_field_and_object_handler,
    },
    RuleCase {
        rule: "T-LET",
        accept: t_let_binds_the_bound_expression_class,
        reject: t_let_rejects_use_beyond_the_bound_class,
    },
    RuleCase {
        rule: "T-LOC",
        accept: t_loc_reads_store_typing,
        reject: t_loc_rejects_untyped_location,
    },
    RuleCase {
        rule: "T-EMPTY",
        accept: t_empty_is_unit_in_empty_contexts,
        reject: t_empty_is_not_an_object,
    },
    RuleCase {
        rule: "T-METHOD",
        accept: t_method_accepts_subtype_body,
        reject: t_method_rejects_supertype_body,
    },
    RuleCase {
        rule: "T-CLASS",
        accept: t_class_accepts_fixture_hierarchy,
        reject: t_class_rejects_bad_members,
    },
];

fn env() -> TypeEnv {
    TypeEnv::new()
        .with("a", "A")
        .with("b", "B")
        .with("o", "Object")
}

fn program_errors(src: &str) -> Vec<TypeErrorKind> {
    match load(src) {
        Ok(_) => Vec::new(),
        Err(LoadError::Type(errs)) => errs.into_iter().map(|e| e.kind).collect(),
        Err(e) => panic!("unexpected load failure: {e}"),
    }
}

pub fn t_var_accepts_bound_variable() {
    assert_eq!(type_src(&fixture(), &env(), "b"), Ok(class("B")));
}

pub fn t_var_rejects_unbound_variable() {
    expect_kind(type_src(&fixture(), &env(), "y"), TypeErrorKind::UnboundVar);
}

pub fn t_field_accepts_source_inherited_and_composite_fields() {
    let ct = fixture();
    assert_eq!(type_src(&ct, &env(), "a.s"), Ok(class("Object")));
    assert_eq!(type_src(&ct, &env(), "b.p"), Ok(class("Object")));
    assert_eq!(type_src(&ct, &env(), "a.c"), Ok(class("Object")));
}

pub fn t_field_rejects_missing_field() {
    expect_kind(
        type_src(&fixture(), &env(), "a.q"),
        TypeErrorKind::UnknownField,
    );
}

pub fn t_invk_accepts_inherited_method_with_subtype_argument() {
    let ct = fixture();
    assert_eq!(type_src(&ct, &env(), "b.get()"), Ok(class("Object")));
    assert_eq!(type_src(&ct, &env(), "a.put(b)"), Ok(TypeName::Unit));
}

pub fn t_invk_rejects_wrong_arity_and_unknown_method() {
    let ct = fixture();
    expect_kind(type_src(&ct, &env(), "a.put()"), TypeErrorKind::ArgArity);
    expect_kind(
        type_src(&ct, &env(), "o.get()"),
        TypeErrorKind::UnknownMethod,
    );
}

pub fn t_new_accepts_all_source_fields_in_order() {
    assert_eq!(
        type_src(&fixture(), &env(), "new B(o, a, new Object())"),
        Ok(class("B"))
    );
}

pub fn t_new_rejects_composite_as_argument_slot() {
    // three arguments would be needed if the composite `c` counted
    expect_kind(
        type_src(&fixture(), &env(), "new A(o, o, o)"),
        TypeErrorKind::ArgArity,
    );
    expect_kind(
        type_src(&fixture(), &env(), "new B(o, o, unit)"),
        TypeErrorKind::UnitMisuse,
    );
}

pub fn t_assign_accepts_plain_and_source_signal() {
    let ct = fixture();
    assert_eq!(type_src(&ct, &env(), "a.p = b"), Ok(TypeName::Unit));
    assert_eq!(type_src(&ct, &env(), "b.s = a"), Ok(TypeName::Unit));
}

pub fn t_assign_rejects_composite_target_and_supertype_value() {
    let ct = fixture();
    expect_kind(
        type_src(&ct, &env(), "a.c = o"),
        TypeErrorKind::AssignToComposite,
    );
    let narrow = load(
        "class A extends Object { A() { super(); } }
         class N extends Object { A f; N(A f) { super(); this.f = f; } }
         unit",
    )
    .unwrap()
    .table;
    let narrow_env = TypeEnv::new().with("n", "N").with("o", "Object");
    expect_kind(
        type_src(&narrow, &narrow_env, "n.f = o"),
        TypeErrorKind::AssignTypeMismatch,
    );
}

pub fn t_assigncont_accepts_unit_body() {
    let e = Expr::effect(Expr::Empty, Location(0), "s");
    assert_eq!(
        type_rt(&fixture(), &env(), &StoreTyping::new(), &e),
        Ok(TypeName::Unit)
    );
}

pub fn t_assigncont_rejects_non_unit_body() {
    let e = Expr::effect(Expr::var("o"), Location(0), "s");
    expect_kind(
        type_rt(&fixture(), &env(), &StoreTyping::new(), &e),
        TypeErrorKind::EffectBodyNotUnit,
    );
}

pub fn t_cat_types_as_right_operand() {
    assert_eq!(type_src(&fixture(), &env(), "a.p = o; b"), Ok(class("B")));
}

pub fn t_cat_rejects_non_unit_left_operand() {
    expect_kind(
        type_src(&fixture(), &env(), "a; b"),
        TypeErrorKind::SeqLeftNotUnit,
    );
}

pub fn t_subscribe_accepts_signal_field_and_unit_handler() {
    assert_eq!(
        type_src(&fixture(), &env(), "a.s.subscribe(b.put(a.c))"),
        Ok(TypeName::Unit)
    );
}

pub fn t_subscribe_rejects_plain_field_and_object_handler() {
    let ct = fixture();
    expect_kind(
        type_src(&ct, &env(), "a.p.subscribe(unit)"),
        TypeErrorKind::SubscribeOnNonSignal,
    );
    expect_kind(
        type_src(&ct, &env(), "a.s.subscribe(a.get())"),
        TypeErrorKind::SubscribeHandlerNotUnit,
    );
}

pub fn t_let_binds_the_bound_expression_class() {
    assert_eq!(
        type_src(&fixture(), &env(), "let x = new B(o, o, o) in x.q"),
        Ok(class("Object"))
    );
}

pub fn t_let_rejects_use_beyond_the_bound_class() {
    expect_kind(
        type_src(&fixture(), &env(), "let x = new A(o, o) in x.q"),
        TypeErrorKind::UnknownField,
    );
}

pub fn t_loc_reads_store_typing() {
    let sigma: StoreTyping = [(Location(3), "B".to_string())].into_iter().collect();
    assert_eq!(
        type_rt(
            &fixture(),
            &TypeEnv::new(),
            &sigma,
            &Expr::field(Expr::Loc(Location(3)), "q")
        ),
        Ok(class("Object"))
    );
}

pub fn t_loc_rejects_untyped_location() {
    let sigma: StoreTyping = [(Location(3), "B".to_string())].into_iter().collect();
    expect_kind(
        type_rt(&fixture(), &TypeEnv::new(), &sigma, &Expr::Loc(Location(4))),
        TypeErrorKind::UnboundLocation,
    );
}

pub fn t_empty_is_unit_in_empty_contexts() {
    assert_eq!(
        type_rt(
            &fixture(),
            &TypeEnv::new(),
            &StoreTyping::new(),
            &Expr::Empty
        ),
        Ok(TypeName::Unit)
    );
}

pub fn t_empty_is_not_an_object() {
    expect_kind(
        type_src(&fixture(), &env(), "unit.p"),
        TypeErrorKind::UnitMisuse,
    );
}

pub fn t_method_accepts_subtype_body() {
    let src = "
        class A extends Object { A() { super(); } }
        class B extends A { B() { super(); } }
        class F extends Object { F() { super(); } A make() { new B() } }
        new F().make()";
    assert_eq!(load(src).unwrap().main_type, class("A"));
}

pub fn t_method_rejects_supertype_body() {
    let src = "
        class A extends Object { A() { super(); } }
        class F extends Object { F() { super(); } A make() { new Object() } }
        unit";
    assert_eq!(program_errors(src), vec![TypeErrorKind::MethodBodyType]);
}

pub fn t_class_accepts_fixture_hierarchy() {
    assert!(program_errors(FIXTURE).is_empty());
}

pub fn t_class_rejects_bad_members() {
    let plain_composite = "
        class A extends Object { Object c = this.s; signal Object s;
            A(Object s) { super(); this.s = s; } }
        unit";
    assert_eq!(
        program_errors(plain_composite),
        vec![TypeErrorKind::BadCompositeModifier]
    );

    let bad_ctor = "
        class A extends Object { Object p; A(Object p) { super(); this.p = p; } }
        class B extends A { Object q; B(Object q) { super(); this.q = q; } }
        unit";
    assert_eq!(program_errors(bad_ctor), vec![TypeErrorKind::CtorShape]);

    let bad_init = "
        class A extends Object { signal A c = this.s; signal Object s;
            A(Object s) { super(); this.s = s; } }
        unit";
    assert_eq!(
        program_errors(bad_init),
        vec![TypeErrorKind::BadInitializer]
    );
}
