use std::fmt;

use crate::eval::Location;

/// Field modifier. `Plain` is the empty modifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modifier {
    Signal,
    Plain,
}

impl Modifier {
    pub fn is_signal(self) -> bool {
        matches!(self, Modifier::Signal)
    }
}

impl fmt::Display for Modifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modifier::Signal => f.write_str("signal"),
            Modifier::Plain => Ok(()),
        }
    }
}

/// A type: either a class or `Unit`, the type of the empty expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeName {
    Class(String),
    Unit,
}

impl TypeName {
    pub fn class(name: impl Into<String>) -> Self {
        TypeName::Class(name.into())
    }

    pub fn as_class(&self) -> Option<&str> {
        match self {
            TypeName::Class(c) => Some(c),
            TypeName::Unit => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, TypeName::Unit)
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeName::Class(c) => f.write_str(c),
            TypeName::Unit => f.write_str("Unit"),
        }
    }
}

/// Source position of a declaration (1-based).
///
/// Spans never participate in equality, so a parsed program compares equal
/// to the same program built by hand or by the generator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Field(Box<Expr>, String),
    Invoke(Box<Expr>, String, Vec<Expr>),
    New(String, Vec<Expr>),
    Assign(Box<Expr>, String, Box<Expr>),
    Seq(Box<Expr>, Box<Expr>),
    Subscribe(Box<Expr>, String, Box<Expr>),
    /// Runtime only.
    Loc(Location),
    /// Runtime only: pending side effect of an assignment to `loc.field`.
    Effect(Box<Expr>, Location, String),
    Empty,
    Let(String, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn this() -> Self {
        Expr::Var("this".into())
    }

    pub fn field(recv: Expr, field: impl Into<String>) -> Self {
        Expr::Field(Box::new(recv), field.into())
    }

    pub fn invoke(recv: Expr, method: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::Invoke(Box::new(recv), method.into(), args)
    }

    pub fn new_obj(class: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::New(class.into(), args)
    }

    pub fn assign(recv: Expr, field: impl Into<String>, value: Expr) -> Self {
        Expr::Assign(Box::new(recv), field.into(), Box::new(value))
    }

    pub fn seq(first: Expr, second: Expr) -> Self {
        Expr::Seq(Box::new(first), Box::new(second))
    }

    pub fn subscribe(recv: Expr, field: impl Into<String>, handler: Expr) -> Self {
        Expr::Subscribe(Box::new(recv), field.into(), Box::new(handler))
    }

    pub fn effect(body: Expr, loc: Location, field: impl Into<String>) -> Self {
        Expr::Effect(Box::new(body), loc, field.into())
    }

    pub fn let_in(var: impl Into<String>, bound: Expr, body: Expr) -> Self {
        Expr::Let(var.into(), Box::new(bound), Box::new(body))
    }

    /// Right-nested sequence `e1; (e2; (...; en))`. Empty input gives `Empty`.
    pub fn seq_all(items: impl IntoIterator<Item = Expr>) -> Self {
        let mut items: Vec<Expr> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Expr::Empty;
        };
        while let Some(prev) = items.pop() {
            acc = Expr::seq(prev, acc);
        }
        acc
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Expr::Loc(_))
    }

    pub fn as_loc(&self) -> Option<Location> {
        match self {
            Expr::Loc(l) => Some(*l),
            _ => None,
        }
    }

    /// True if any runtime-only form (location or effect brace) occurs.
    pub fn has_runtime_forms(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if matches!(e, Expr::Loc(_) | Expr::Effect(..)) {
                found = true;
            }
        });
        found
    }

    /// Pre-order traversal over every subexpression, including `self`.
    pub fn walk(&self, visit: &mut impl FnMut(&Expr)) {
        visit(self);
        match self {
            Expr::Var(_) | Expr::Loc(_) | Expr::Empty => {}
            Expr::Field(r, _) => r.walk(visit),
            Expr::Invoke(r, _, args) => {
                r.walk(visit);
                args.iter().for_each(|a| a.walk(visit));
            }
            Expr::New(_, args) => args.iter().for_each(|a| a.walk(visit)),
            Expr::Assign(r, _, v) => {
                r.walk(visit);
                v.walk(visit);
            }
            Expr::Seq(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Expr::Subscribe(r, _, h) => {
                r.walk(visit);
                h.walk(visit);
            }
            Expr::Effect(b, _, _) => b.walk(visit),
            Expr::Let(_, bound, body) => {
                bound.walk(visit);
                body.walk(visit);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// True if `needle` occurs as a subtree.
    pub fn contains_subexpr(&self, needle: &Expr) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if !found && e == needle {
                found = true;
            }
        });
        found
    }

    /// True if `x` occurs free.
    pub fn mentions_var(&self, x: &str) -> bool {
        match self {
            Expr::Var(y) => x == y,
            Expr::Loc(_) | Expr::Empty => false,
            Expr::Field(r, _) => r.mentions_var(x),
            Expr::Invoke(r, _, args) => r.mentions_var(x) || args.iter().any(|a| a.mentions_var(x)),
            Expr::New(_, args) => args.iter().any(|a| a.mentions_var(x)),
            Expr::Assign(r, _, v) => r.mentions_var(x) || v.mentions_var(x),
            Expr::Seq(a, b) => a.mentions_var(x) || b.mentions_var(x),
            Expr::Subscribe(r, _, h) => r.mentions_var(x) || h.mentions_var(x),
            Expr::Effect(b, _, _) => b.mentions_var(x),
            Expr::Let(y, bound, body) => bound.mentions_var(x) || (y != x && body.mentions_var(x)),
        }
    }

    /// Simultaneous substitution of expressions for free variables.
    ///
    /// Only closed expressions (locations) are ever substituted during
    /// reduction, so capture cannot happen; `let` shadowing is respected.
    pub fn subst(&self, map: &[(&str, Expr)]) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Expr::Var(x) => map
                .iter()
                .find(|(y, _)| y == x)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            Expr::Loc(_) | Expr::Empty => self.clone(),
            Expr::Field(r, f) => Expr::Field(Box::new(r.subst(map)), f.clone()),
            Expr::Invoke(r, m, args) => Expr::Invoke(
                Box::new(r.subst(map)),
                m.clone(),
                args.iter().map(|a| a.subst(map)).collect(),
            ),
            Expr::New(c, args) => Expr::New(c.clone(), args.iter().map(|a| a.subst(map)).collect()),
            Expr::Assign(r, f, v) => {
                Expr::Assign(Box::new(r.subst(map)), f.clone(), Box::new(v.subst(map)))
            }
            Expr::Seq(a, b) => Expr::Seq(Box::new(a.subst(map)), Box::new(b.subst(map))),
            Expr::Subscribe(r, f, h) => {
                Expr::Subscribe(Box::new(r.subst(map)), f.clone(), Box::new(h.subst(map)))
            }
            Expr::Effect(b, l, f) => Expr::Effect(Box::new(b.subst(map)), *l, f.clone()),
            Expr::Let(x, bound, body) => {
                let inner: Vec<(&str, Expr)> = map
                    .iter()
                    .filter(|(y, _)| y != x)
                    .map(|(y, e)| (*y, e.clone()))
                    .collect();
                Expr::Let(
                    x.clone(),
                    Box::new(bound.subst(map)),
                    Box::new(body.subst(&inner)),
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: String,
    pub name: String,
}

impl Param {
    pub fn new(ty: impl Into<String>, name: impl Into<String>) -> Self {
        Param {
            ty: ty.into(),
            name: name.into(),
        }
    }
}

/// Initialized field declaration (a composite signal once well-formed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeField {
    pub modifier: Modifier,
    pub ty: String,
    pub name: String,
    pub init: Expr,
    pub span: Span,
}

/// Uninitialized field declaration: a source signal or a plain field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceField {
    pub modifier: Modifier,
    pub ty: String,
    pub name: String,
    pub span: Span,
}

/// `C(D g, E f) { super(g); this.f = f; }`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub params: Vec<Param>,
    pub super_args: Vec<String>,
    /// `(field, param)` pairs of `this.field = param;`
    pub field_inits: Vec<(String, String)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub ret: TypeName,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub parent: String,
    pub composite_fields: Vec<CompositeField>,
    pub source_fields: Vec<SourceField>,
    pub ctor: ConstructorDecl,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub classes: Vec<ClassDecl>,
    pub main: Expr,
    pub main_span: Span,
}
