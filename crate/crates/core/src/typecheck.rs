//! Subtyping, expression typing, and method/class well-formedness.
//!
//! Expression typing is syntax-directed: every [`Expr`] variant has exactly
//! one rule, so [`type_expr`] is a plain structural recursion. The only
//! inference is in `let`, where the bound variable gets exactly the class of
//! the bound expression.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::classtable::{ClassTable, ClassTableError, OBJECT};
use crate::eval::Location;
use crate::syntax::{ClassDecl, Expr, Modifier, Program, Span, TypeName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeErrorKind {
    UnboundVar,
    UnboundLocation,
    UnknownField,
    UnknownMethod,
    ArgArity,
    ArgSubtype,
    AssignToComposite,
    AssignTypeMismatch,
    SubscribeOnNonSignal,
    SubscribeHandlerNotUnit,
    SeqLeftNotUnit,
    EffectBodyNotUnit,
    UnitMisuse,
    BadInitializer,
    BadCompositeModifier,
    CtorShape,
    MethodBodyType,
    UnknownClassType,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}: {message}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub message: String,
    pub span: Span,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, message: impl Into<String>) -> Self {
        TypeError {
            kind,
            message: message.into(),
            span: Span::default(),
        }
    }

    pub fn at(mut self, span: Span) -> Self {
        self.span = span;
        self
    }
}

impl From<ClassTableError> for TypeError {
    fn from(e: ClassTableError) -> Self {
        match e {
            ClassTableError::UnknownClass(c) => TypeError::new(
                TypeErrorKind::UnknownClassType,
                format!("unknown class `{c}`"),
            ),
            other => TypeError::new(TypeErrorKind::UnknownClassType, other.to_string()),
        }
    }
}

pub type TypeResult<T> = Result<T, TypeError>;

/// Variables to class names. Variables never have type `Unit`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeEnv {
    bindings: BTreeMap<String, String>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, class: impl Into<String>) -> Self {
        self.bindings.insert(var.into(), class.into());
        self
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.bindings.get(var).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for TypeEnv {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        TypeEnv {
            bindings: iter
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        }
    }
}

/// Locations to class names. Grows monotonically during evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct StoreTyping {
    bindings: BTreeMap<Location, String>,
}

impl StoreTyping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, loc: Location) -> Option<&str> {
        self.bindings.get(&loc).map(String::as_str)
    }

    pub fn insert(&mut self, loc: Location, class: impl Into<String>) {
        self.bindings.insert(loc, class.into());
    }

    pub fn contains(&self, loc: Location) -> bool {
        self.bindings.contains_key(&loc)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Location, &str)> {
        self.bindings.iter().map(|(l, c)| (*l, c.as_str()))
    }

    /// Every binding of `self` is present, unchanged, in `other`.
    pub fn is_extended_by(&self, other: &StoreTyping) -> bool {
        self.bindings
            .iter()
            .all(|(l, c)| other.bindings.get(l) == Some(c))
    }
}

impl FromIterator<(Location, String)> for StoreTyping {
    fn from_iter<I: IntoIterator<Item = (Location, String)>>(iter: I) -> Self {
        StoreTyping {
            bindings: iter.into_iter().collect(),
        }
    }
}

fn known_class(ct: &ClassTable, class: &str) -> TypeResult<()> {
    if ct.contains(class) {
        Ok(())
    } else {
        Err(TypeError::new(
            TypeErrorKind::UnknownClassType,
            format!("unknown class `{class}`"),
        ))
    }
}

/// `S <: T`. `Unit` is related only to itself.
pub fn is_subtype(ct: &ClassTable, sub: &TypeName, sup: &TypeName) -> TypeResult<bool> {
    match (sub, sup) {
        (TypeName::Unit, TypeName::Unit) => Ok(true),
        (TypeName::Unit, TypeName::Class(c)) | (TypeName::Class(c), TypeName::Unit) => {
            known_class(ct, c)?;
            Ok(false)
        }
        (TypeName::Class(s), TypeName::Class(t)) => {
            known_class(ct, s)?;
            known_class(ct, t)?;
            Ok(ct.is_subclass(s, t)?)
        }
    }
}

fn is_subclass(ct: &ClassTable, sub: &str, sup: &str) -> TypeResult<bool> {
    known_class(ct, sub)?;
    known_class(ct, sup)?;
    Ok(ct.is_subclass(sub, sup)?)
}

/// Type `e` and require a class type; `what` names the position for errors.
fn class_of(
    ct: &ClassTable,
    env: &TypeEnv,
    sigma: &StoreTyping,
    e: &Expr,
    what: &str,
) -> TypeResult<String> {
    match type_expr(ct, env, sigma, e)? {
        TypeName::Class(c) => Ok(c),
        TypeName::Unit => Err(TypeError::new(
            TypeErrorKind::UnitMisuse,
            format!("{what} `{e}` has type Unit, which has no values"),
        )),
    }
}

fn check_args(
    ct: &ClassTable,
    env: &TypeEnv,
    sigma: &StoreTyping,
    args: &[Expr],
    expected: &[&str],
    callee: &str,
) -> TypeResult<()> {
    if args.len() != expected.len() {
        return Err(TypeError::new(
            TypeErrorKind::ArgArity,
            format!(
                "{callee} expects {} argument(s), found {}",
                expected.len(),
                args.len()
            ),
        ));
    }
    for (i, (arg, want)) in args.iter().zip(expected).enumerate() {
        let got = class_of(ct, env, sigma, arg, "argument")?;
        if !is_subclass(ct, &got, want)? {
            return Err(TypeError::new(
                TypeErrorKind::ArgSubtype,
                format!(
                    "argument {} of {callee} has type `{got}`, which is not a subtype of `{want}`",
                    i + 1
                ),
            ));
        }
    }
    Ok(())
}

/// `Γ | Σ ⊢ e : T`
pub fn type_expr(
    ct: &ClassTable,
    env: &TypeEnv,
    sigma: &StoreTyping,
    e: &Expr,
) -> TypeResult<TypeName> {
    match e {
        Expr::Var(x) => env.get(x).map(TypeName::class).ok_or_else(|| {
            TypeError::new(TypeErrorKind::UnboundVar, format!("unbound variable `{x}`"))
        }),

        Expr::Field(recv, f) => {
            let c0 = class_of(ct, env, sigma, recv, "receiver")?;
            match ct.ftype(&c0, f)? {
                Some((_, ty)) => Ok(TypeName::class(ty)),
                None => Err(TypeError::new(
                    TypeErrorKind::UnknownField,
                    format!("class `{c0}` has no field `{f}`"),
                )),
            }
        }

        Expr::Invoke(recv, m, args) => {
            let c0 = class_of(ct, env, sigma, recv, "receiver")?;
            let Some(mt) = ct.mtype(m, &c0)? else {
                return Err(TypeError::new(
                    TypeErrorKind::UnknownMethod,
                    format!("class `{c0}` has no method `{m}`"),
                ));
            };
            let params: Vec<&str> = mt.params.iter().filter_map(TypeName::as_class).collect();
            check_args(ct, env, sigma, args, &params, &format!("method `{c0}.{m}`"))?;
            Ok(mt.ret)
        }

        Expr::New(c0, args) => {
            known_class(ct, c0)?;
            let fields: Vec<&str> = ct.source(c0)?.iter().map(|s| s.ty.as_str()).collect();
            check_args(
                ct,
                env,
                sigma,
                args,
                &fields,
                &format!("constructor `{c0}`"),
            )?;
            Ok(TypeName::class(c0))
        }

        Expr::Assign(recv, f, value) => {
            let c0 = class_of(ct, env, sigma, recv, "receiver")?;
            let Some(field) = ct.source(&c0)?.iter().find(|s| s.name == *f) else {
                if ct.composite(&c0)?.iter().any(|c| c.name == *f) {
                    return Err(TypeError::new(
                        TypeErrorKind::AssignToComposite,
                        format!("`{c0}.{f}` is a composite signal and cannot be assigned"),
                    ));
                }
                return Err(TypeError::new(
                    TypeErrorKind::UnknownField,
                    format!("class `{c0}` has no field `{f}`"),
                ));
            };
            let field_ty = field.ty.clone();
            let d = class_of(ct, env, sigma, value, "assigned value")?;
            if !is_subclass(ct, &d, &field_ty)? {
                return Err(TypeError::new(
                    TypeErrorKind::AssignTypeMismatch,
                    format!("cannot assign `{d}` to field `{c0}.{f}` of type `{field_ty}`"),
                ));
            }
            Ok(TypeName::Unit)
        }

        Expr::Effect(body, _, _) => match type_expr(ct, env, sigma, body)? {
            TypeName::Unit => Ok(TypeName::Unit),
            TypeName::Class(c) => Err(TypeError::new(
                TypeErrorKind::EffectBodyNotUnit,
                format!("pending side effect has type `{c}`, expected Unit"),
            )),
        },

        Expr::Seq(first, second) => match type_expr(ct, env, sigma, first)? {
            TypeName::Unit => type_expr(ct, env, sigma, second),
            TypeName::Class(c) => Err(TypeError::new(
                TypeErrorKind::SeqLeftNotUnit,
                format!("left side of `;` has type `{c}`, expected Unit"),
            )),
        },

        Expr::Subscribe(recv, f, handler) => {
            let c0 = class_of(ct, env, sigma, recv, "receiver")?;
            match ct.ftype(&c0, f)? {
                None => {
                    return Err(TypeError::new(
                        TypeErrorKind::UnknownField,
                        format!("class `{c0}` has no field `{f}`"),
                    ))
                }
                Some((Modifier::Plain, _)) => {
                    return Err(TypeError::new(
                        TypeErrorKind::SubscribeOnNonSignal,
                        format!("`{c0}.{f}` is not a signal"),
                    ))
                }
                Some((Modifier::Signal, _)) => {}
            }
            match type_expr(ct, env, sigma, handler)? {
                TypeName::Unit => Ok(TypeName::Unit),
                TypeName::Class(c) => Err(TypeError::new(
                    TypeErrorKind::SubscribeHandlerNotUnit,
                    format!("handler has type `{c}`, expected Unit"),
                )),
            }
        }

        Expr::Let(x, bound, body) => {
            let c = class_of(ct, env, sigma, bound, "let-bound expression")?;
            let inner = env.clone().with(x.clone(), c);
            type_expr(ct, &inner, sigma, body)
        }

        Expr::Loc(l) => sigma.get(*l).map(TypeName::class).ok_or_else(|| {
            TypeError::new(
                TypeErrorKind::UnboundLocation,
                format!("location {l} is not typed"),
            )
        }),

        Expr::Empty => Ok(TypeName::Unit),
    }
}

/// Field initializers may only use variables, field accesses, method
/// invocations and instance creations.
pub fn check_init(e: &Expr) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Field(r, _) => check_init(r),
        Expr::Invoke(r, _, args) => check_init(r) && args.iter().all(check_init),
        Expr::New(_, args) => args.iter().all(check_init),
        _ => false,
    }
}

/// Check a class and, transitively, its superclasses.
pub fn check_class(ct: &ClassTable, class: &str) -> Result<(), Vec<TypeError>> {
    let chain = ct.ancestors(class).map_err(|e| vec![TypeError::from(e)])?;
    let errors: Vec<TypeError> = chain
        .iter()
        .rev()
        .filter_map(|c| ct.decl(c))
        .flat_map(|decl| check_class_members(ct, decl))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn check_class_members(ct: &ClassTable, decl: &ClassDecl) -> Vec<TypeError> {
    let mut errors = Vec::new();
    let c = decl.name.as_str();

    let field_types = decl
        .composite_fields
        .iter()
        .map(|f| (&f.ty, &f.name, f.span))
        .chain(decl.source_fields.iter().map(|f| (&f.ty, &f.name, f.span)));
    for (ty, name, span) in field_types {
        if let Err(e) = known_class(ct, ty) {
            errors.push(
                TypeError::new(e.kind, format!("field `{c}.{name}`: {}", e.message)).at(span),
            );
        }
    }

    for f in &decl.composite_fields {
        if f.modifier != Modifier::Signal {
            errors.push(
                TypeError::new(
                    TypeErrorKind::BadCompositeModifier,
                    format!(
                        "initialized field `{c}.{}` must be declared `signal`",
                        f.name
                    ),
                )
                .at(f.span),
            );
        }
    }

    if let Err(e) = check_ctor_shape(ct, decl) {
        errors.push(e.at(decl.ctor.span));
    }

    let this_env = TypeEnv::new().with("this", c);
    let empty = StoreTyping::new();
    for f in decl.composite_fields.iter().filter(|f| ct.contains(&f.ty)) {
        if !check_init(&f.init) {
            errors.push(
                TypeError::new(
                    TypeErrorKind::BadInitializer,
                    format!(
                        "initializer of `{c}.{}` may only contain variables, field accesses, \
                         method invocations and instance creations",
                        f.name
                    ),
                )
                .at(f.span),
            );
            continue;
        }
        match type_expr(ct, &this_env, &empty, &f.init) {
            Err(e) => errors.push(e.at(f.span)),
            Ok(ty) => match is_subtype(ct, &ty, &TypeName::class(&f.ty)) {
                Ok(true) => {}
                Ok(false) => errors.push(
                    TypeError::new(
                        TypeErrorKind::BadInitializer,
                        format!(
                            "initializer of `{c}.{}` has type `{ty}`, not a subtype of `{}`",
                            f.name, f.ty
                        ),
                    )
                    .at(f.span),
                ),
                Err(e) => errors.push(e.at(f.span)),
            },
        }
    }

    for m in &decl.methods {
        let mut env = this_env.clone();
        let mut params_ok = true;
        for p in &m.params {
            if let Err(e) = known_class(ct, &p.ty) {
                errors.push(e.at(m.span));
                params_ok = false;
            }
            env = env.with(p.name.clone(), p.ty.clone());
        }
        if let TypeName::Class(r) = &m.ret {
            if let Err(e) = known_class(ct, r) {
                errors.push(e.at(m.span));
                params_ok = false;
            }
        }
        if !params_ok {
            continue;
        }
        match type_expr(ct, &env, &empty, &m.body) {
            Err(e) => errors.push(
                TypeError::new(e.kind, format!("in method `{c}.{}`: {}", m.name, e.message))
                    .at(m.span),
            ),
            Ok(s) => match is_subtype(ct, &s, &m.ret) {
                Ok(true) => {}
                Ok(false) => errors.push(
                    TypeError::new(
                        TypeErrorKind::MethodBodyType,
                        format!(
                            "body of `{c}.{}` has type `{s}`, not a subtype of the declared `{}`",
                            m.name, m.ret
                        ),
                    )
                    .at(m.span),
                ),
                Err(e) => errors.push(e.at(m.span)),
            },
        }
    }
    errors
}

/// `C(E g, C f) { super(g); this.f = f; }` with `source(D) = E g`.
fn check_ctor_shape(ct: &ClassTable, decl: &ClassDecl) -> TypeResult<()> {
    let k = &decl.ctor;
    for p in &k.params {
        known_class(ct, &p.ty)?;
    }
    let parent = if decl.parent == OBJECT || ct.contains(&decl.parent) {
        decl.parent.as_str()
    } else {
        return Err(TypeError::new(
            TypeErrorKind::UnknownClassType,
            format!("unknown superclass `{}`", decl.parent),
        ));
    };
    let inherited = ct.source(parent)?;
    let expected_super: Vec<&str> = inherited.iter().map(|s| s.name.as_str()).collect();
    let actual_super: Vec<&str> = k.super_args.iter().map(String::as_str).collect();
    if expected_super != actual_super {
        return Err(TypeError::new(
            TypeErrorKind::CtorShape,
            format!(
                "constructor of `{}` must call super({}), found super({})",
                decl.name,
                expected_super.join(", "),
                actual_super.join(", ")
            ),
        ));
    }
    let expected: Vec<(&str, &str)> = inherited
        .iter()
        .map(|s| (s.ty.as_str(), s.name.as_str()))
        .chain(
            decl.source_fields
                .iter()
                .map(|s| (s.ty.as_str(), s.name.as_str())),
        )
        .collect();
    let actual: Vec<(&str, &str)> = k
        .params
        .iter()
        .map(|p| (p.ty.as_str(), p.name.as_str()))
        .collect();
    if expected != actual {
        let show = |v: &[(&str, &str)]| {
            v.iter()
                .map(|(t, n)| format!("{t} {n}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        return Err(TypeError::new(
            TypeErrorKind::CtorShape,
            format!(
                "constructor of `{}` must take ({}), found ({})",
                decl.name,
                show(&expected),
                show(&actual)
            ),
        ));
    }
    Ok(())
}

/// Check every class, then type the main expression under empty environments.
pub fn check_program(ct: &ClassTable, p: &Program) -> Result<TypeName, Vec<TypeError>> {
    let mut errors: Vec<TypeError> = ct
        .classes()
        .flat_map(|decl| check_class_members(ct, decl))
        .collect();
    let main =
        type_expr(ct, &TypeEnv::new(), &StoreTyping::new(), &p.main).map_err(|e| e.at(p.main_span));
    match main {
        Ok(ty) if errors.is_empty() => Ok(ty),
        Ok(_) => Err(errors),
        Err(e) => {
            errors.push(e);
            Err(errors)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classtable::build_class_table;
    use crate::syntax::{parse_expr, parse_program};

    const SRC: &str = "
        class A extends Object {
            signal A f = this.g;
            signal A g;
            A h;
            A(A g, A h) { super(); this.g = g; this.h = h; }
            A id(A x) { x }
            Unit touch() { this.h = this.g }
        }
        class B extends A {
            B(A g, A h) { super(g, h); }
        }
        unit";

    fn table() -> ClassTable {
        build_class_table(&parse_program(SRC).unwrap()).unwrap()
    }

    fn ty(env: &TypeEnv, src: &str) -> TypeResult<TypeName> {
        type_expr(
            &table(),
            env,
            &StoreTyping::new(),
            &parse_expr(src).unwrap(),
        )
    }

    fn kind(env: &TypeEnv, src: &str) -> TypeErrorKind {
        ty(env, src).unwrap_err().kind
    }

    #[test]
    fn subtyping() {
        let ct = table();
        let c = |s: &str| TypeName::class(s);
        assert!(is_subtype(&ct, &c("A"), &c("A")).unwrap());
        assert!(!is_subtype(&ct, &TypeName::Unit, &c(OBJECT)).unwrap());
        assert!(is_subtype(&ct, &TypeName::Unit, &TypeName::Unit).unwrap());
        assert!(is_subtype(&ct, &c("B"), &c(OBJECT)).unwrap());
        assert!(!is_subtype(&ct, &c("A"), &c("B")).unwrap());
        let err = is_subtype(&ct, &c("Nope"), &c("A")).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::UnknownClassType);
    }

    #[test]
    fn empty_is_unit() {
        assert_eq!(ty(&TypeEnv::new(), "unit").unwrap(), TypeName::Unit);
    }

    #[test]
    fn assigning_unit_is_rejected() {
        let env = TypeEnv::new().with("this", "A");
        assert_eq!(kind(&env, "this.h = unit"), TypeErrorKind::UnitMisuse);
    }

    #[test]
    fn assigning_composite_is_rejected() {
        let env = TypeEnv::new().with("this", "A");
        assert_eq!(
            kind(&env, "this.f = this.g"),
            TypeErrorKind::AssignToComposite
        );
    }

    #[test]
    fn subscribe_requires_signal() {
        let sigma: StoreTyping = [(Location(0), "A".to_string())].into_iter().collect();
        let e = Expr::subscribe(Expr::Loc(Location(0)), "h", Expr::Empty);
        let err = type_expr(&table(), &TypeEnv::new(), &sigma, &e).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::SubscribeOnNonSignal);
        let ok = Expr::subscribe(Expr::Loc(Location(0)), "f", Expr::Empty);
        assert_eq!(
            type_expr(&table(), &TypeEnv::new(), &sigma, &ok).unwrap(),
            TypeName::Unit
        );
    }

    #[test]
    fn let_uses_tightest_class() {
        let env = TypeEnv::new().with("a", "A");
        assert_eq!(
            ty(&env, "let x = new B(a, a) in x").unwrap(),
            TypeName::class("B")
        );
        assert_eq!(kind(&env, "let x = unit in x"), TypeErrorKind::UnitMisuse);
    }

    #[test]
    fn misc_rejections() {
        let env = TypeEnv::new().with("a", "A");
        assert_eq!(kind(&env, "y"), TypeErrorKind::UnboundVar);
        assert_eq!(kind(&env, "a.zzz"), TypeErrorKind::UnknownField);
        assert_eq!(kind(&env, "a.zzz()"), TypeErrorKind::UnknownMethod);
        assert_eq!(kind(&env, "a.id()"), TypeErrorKind::ArgArity);
        assert_eq!(kind(&env, "a.id(new Object())"), TypeErrorKind::ArgSubtype);
        assert_eq!(kind(&env, "a.id(a.touch())"), TypeErrorKind::UnitMisuse);
        assert_eq!(kind(&env, "a; unit"), TypeErrorKind::SeqLeftNotUnit);
        assert_eq!(
            kind(&env, "a.f.subscribe(a)"),
            TypeErrorKind::SubscribeHandlerNotUnit
        );
        assert_eq!(kind(&env, "new Nope()"), TypeErrorKind::UnknownClassType);
        assert_eq!(
            kind(&env, "a.h = new Object()"),
            TypeErrorKind::AssignTypeMismatch
        );
        assert_eq!(kind(&env, "a.touch().f"), TypeErrorKind::UnitMisuse);
    }

    #[test]
    fn init_judgment() {
        let ok = [
            "this.g",
            "this.g.m(new A())",
            "x",
            "new A()",
            "new A(this.g, y.h)",
        ];
        for src in ok {
            assert!(check_init(&parse_expr(src).unwrap()), "{src}");
        }
        let bad = [
            "this.g = this.h",
            "unit",
            "this.g.subscribe(unit)",
            "let x = this in x",
            "this.m(this.g; this.h)",
            "new A(unit)",
        ];
        for src in bad {
            assert!(!check_init(&parse_expr(src).unwrap()), "{src}");
        }
        assert!(!check_init(&Expr::field(Expr::Loc(Location(0)), "f")));
    }

    fn class_errors(src: &str) -> Vec<TypeErrorKind> {
        let p = parse_program(src).unwrap();
        let ct = build_class_table(&p).unwrap();
        match check_program(&ct, &p) {
            Ok(_) => vec![],
            Err(es) => es.into_iter().map(|e| e.kind).collect(),
        }
    }

    #[test]
    fn class_checks() {
        assert_eq!(
            class_errors("class A extends Object { A f = this; A() { super(); } } unit"),
            [TypeErrorKind::BadCompositeModifier]
        );
        assert_eq!(
            class_errors(
                "class A extends Object { A() { super(); } A m() { this } }
                 class B extends A { B() { super(); } } unit"
            ),
            [] as [TypeErrorKind; 0]
        );
        assert_eq!(
            class_errors(
                "class A extends Object { A() { super(); } B m() { this } }
                 class B extends A { B() { super(); } A n() { new B() } } unit"
            ),
            [TypeErrorKind::MethodBodyType]
        );
        assert_eq!(
            class_errors(
                "class A extends Object { signal A f = this.g.subscribe(unit); signal A g; A(A g) { super(); this.g = g; } } unit"
            ),
            [TypeErrorKind::BadInitializer]
        );
        assert_eq!(
            class_errors(
                "class A extends Object { A g; A(A g) { super(); this.g = g; } }
                 class B extends A { B() { super(); } } unit"
            ),
            [TypeErrorKind::CtorShape]
        );
    }

    #[test]
    fn class_errors_are_collected() {
        let errs = class_errors(
            "class A extends Object {
                A f = this;
                signal Nope g = this;
                A() { super(); }
                A m() { unit }
             }
             y",
        );
        assert_eq!(
            errs,
            [
                TypeErrorKind::UnknownClassType,
                TypeErrorKind::BadCompositeModifier,
                TypeErrorKind::MethodBodyType,
                TypeErrorKind::UnboundVar,
            ]
        );
    }

    #[test]
    fn check_class_includes_superclasses() {
        let p = parse_program(
            "class A extends Object { A() { super(); } A m() { unit } }
             class B extends A { B() { super(); } }
             unit",
        )
        .unwrap();
        let ct = build_class_table(&p).unwrap();
        let errs = check_class(&ct, "B").unwrap_err();
        assert_eq!(errs[0].kind, TypeErrorKind::MethodBodyType);
        assert!(check_class(&ct, OBJECT).is_ok());
    }

    #[test]
    fn main_program_checks() {
        let p = parse_program("unit").unwrap();
        let ct = build_class_table(&p).unwrap();
        assert_eq!(check_program(&ct, &p).unwrap(), TypeName::Unit);
        let p = parse_program("x").unwrap();
        let errs = check_program(&ct, &p).unwrap_err();
        assert_eq!(errs[0].kind, TypeErrorKind::UnboundVar);
    }
}
