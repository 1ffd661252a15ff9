//! The class table and its lookup functions.
//!
//! Building a [`ClassTable`] checks the global well-formedness assumptions
//! of the calculus: unique class names, known parents, an acyclic `extends`
//! relation, no field hiding, no overloading, distinct parameter names, and a
//! constructor whose shape agrees with the class's own source fields.
//!
//! Inherited members are always listed superclass-first, so the position of a
//! source field in [`ClassTable::source`] is the position of its value in
//! `new C(...)` and in the object store.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::syntax::{ClassDecl, Expr, MethodDecl, Modifier, Program, Span, TypeName};

pub const OBJECT: &str = "Object";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassTableError {
    #[error("{span}: class `{class}` is declared more than once")]
    DuplicateClass { class: String, span: Span },
    #[error("{span}: class `{class}` extends unknown class `{parent}`")]
    UnknownParent {
        class: String,
        parent: String,
        span: Span,
    },
    #[error("{span}: inheritance cycle through class `{class}`")]
    Cycle { class: String, span: Span },
    #[error("{span}: field `{field}` of class `{class}` {}", hidden_note(.hides))]
    DuplicateField {
        class: String,
        field: String,
        /// The superclass whose field would be hidden, if any.
        hides: Option<String>,
        span: Span,
    },
    #[error("{span}: method `{method}` of class `{class}` {reason}")]
    Overload {
        class: String,
        method: String,
        reason: String,
        span: Span,
    },
    #[error("{span}: parameter `{param}` of `{class}.{method}` is declared more than once")]
    DuplicateParam {
        class: String,
        method: String,
        param: String,
        span: Span,
    },
    #[error("{span}: constructor of class `{class}` {reason}")]
    CtorMismatch {
        class: String,
        reason: String,
        span: Span,
    },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
}

fn hidden_note(hides: &Option<String>) -> String {
    match hides {
        Some(parent) => format!("hides the field inherited from `{parent}`"),
        None => "is declared more than once".to_string(),
    }
}

impl ClassTableError {
    pub fn span(&self) -> Option<Span> {
        match self {
            ClassTableError::DuplicateClass { span, .. }
            | ClassTableError::UnknownParent { span, .. }
            | ClassTableError::Cycle { span, .. }
            | ClassTableError::DuplicateField { span, .. }
            | ClassTableError::Overload { span, .. }
            | ClassTableError::DuplicateParam { span, .. }
            | ClassTableError::CtorMismatch { span, .. } => Some(*span),
            ClassTableError::UnknownClass(_) => None,
        }
    }
}

pub type LookupResult<T> = Result<T, ClassTableError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeEntry {
    pub modifier: Modifier,
    pub ty: String,
    pub name: String,
    pub init: Expr,
    /// Class that declares the field.
    pub owner: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceEntry {
    pub modifier: Modifier,
    pub ty: String,
    pub name: String,
    pub owner: String,
}

#[derive(Debug, Clone, Copy)]
pub struct MethodBody<'a> {
    pub params: &'a [crate::syntax::Param],
    pub body: &'a Expr,
    pub owner: &'a str,
}

impl MethodBody<'_> {
    pub fn param_names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodType {
    pub params: Vec<TypeName>,
    pub ret: TypeName,
}

impl MethodType {
    fn of(m: &MethodDecl) -> Self {
        MethodType {
            params: m
                .params
                .iter()
                .map(|p| TypeName::Class(p.ty.clone()))
                .collect(),
            ret: m.ret.clone(),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct ClassInfo {
    parent: Option<String>,
    composite: Vec<CompositeEntry>,
    source: Vec<SourceEntry>,
}

#[derive(Debug, Clone)]
pub struct ClassTable {
    decls: BTreeMap<String, ClassDecl>,
    order: Vec<String>,
    info: HashMap<String, ClassInfo>,
}

/// Build the class table of a program, verifying the global assumptions.
pub fn build_class_table(p: &Program) -> Result<ClassTable, ClassTableError> {
    ClassTable::build(&p.classes)
}

impl ClassTable {
    pub fn build(classes: &[ClassDecl]) -> Result<Self, ClassTableError> {
        let mut decls = BTreeMap::new();
        let mut order = Vec::new();
        for c in classes {
            if c.name == OBJECT || decls.contains_key(&c.name) {
                return Err(ClassTableError::DuplicateClass {
                    class: c.name.clone(),
                    span: c.span,
                });
            }
            decls.insert(c.name.clone(), c.clone());
            order.push(c.name.clone());
        }

        for c in classes {
            if c.parent != OBJECT && !decls.contains_key(&c.parent) {
                return Err(ClassTableError::UnknownParent {
                    class: c.name.clone(),
                    parent: c.parent.clone(),
                    span: c.span,
                });
            }
        }

        for c in classes {
            let mut seen = HashSet::new();
            let mut cur = c.name.as_str();
            while cur != OBJECT {
                if !seen.insert(cur) {
                    return Err(ClassTableError::Cycle {
                        class: c.name.clone(),
                        span: c.span,
                    });
                }
                cur = &decls[cur].parent;
            }
        }

        for c in classes {
            check_own_members(c)?;
        }

        let mut info = HashMap::new();
        info.insert(OBJECT.to_string(), ClassInfo::default());
        let mut table = ClassTable {
            decls,
            order,
            info: HashMap::new(),
        };
        for name in table.topological_order() {
            let decl = &table.decls[&name];
            let parent_info = &info[&decl.parent];
            let ci = inherit(decl, parent_info, &table)?;
            info.insert(name, ci);
        }
        table.info = info;
        Ok(table)
    }

    fn topological_order(&self) -> Vec<String> {
        let mut done: HashSet<&str> = HashSet::new();
        let mut out = Vec::new();
        for name in &self.order {
            let mut chain = Vec::new();
            let mut cur = name.as_str();
            while cur != OBJECT && !done.contains(cur) {
                chain.push(cur);
                cur = &self.decls[cur].parent;
            }
            for c in chain.into_iter().rev() {
                done.insert(c);
                out.push(c.to_string());
            }
        }
        out
    }

    pub fn contains(&self, class: &str) -> bool {
        class == OBJECT || self.decls.contains_key(class)
    }

    fn info(&self, class: &str) -> LookupResult<&ClassInfo> {
        self.info
            .get(class)
            .ok_or_else(|| ClassTableError::UnknownClass(class.to_string()))
    }

    /// The declaration of a user class; `None` for `Object` and unknown names.
    pub fn decl(&self, class: &str) -> Option<&ClassDecl> {
        self.decls.get(class)
    }

    /// User classes in declaration order.
    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.order.iter().map(|n| &self.decls[n])
    }

    /// All class names including `Object`.
    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        std::iter::once(OBJECT).chain(self.order.iter().map(String::as_str))
    }

    pub fn parent(&self, class: &str) -> LookupResult<Option<&str>> {
        Ok(self.info(class)?.parent.as_deref())
    }

    /// `class` and its superclasses, nearest first, ending with `Object`.
    pub fn ancestors(&self, class: &str) -> LookupResult<Vec<&str>> {
        let mut out = Vec::new();
        let mut cur = Some(class);
        while let Some(c) = cur {
            let (name, info) = self
                .info
                .get_key_value(c)
                .ok_or_else(|| ClassTableError::UnknownClass(c.to_string()))?;
            out.push(name.as_str());
            cur = info.parent.as_deref();
        }
        Ok(out)
    }

    /// Reflexive, transitive closure of `extends`.
    pub fn is_subclass(&self, sub: &str, sup: &str) -> LookupResult<bool> {
        self.info(sup)?;
        let mut cur = Some(sub);
        while let Some(c) = cur {
            if c == sup {
                return Ok(true);
            }
            cur = self.info(c)?.parent.as_deref();
        }
        Ok(false)
    }

    /// Initialized fields of `class` and its superclasses, superclass-first.
    pub fn composite(&self, class: &str) -> LookupResult<&[CompositeEntry]> {
        Ok(&self.info(class)?.composite)
    }

    /// Uninitialized fields of `class` and its superclasses, superclass-first.
    pub fn source(&self, class: &str) -> LookupResult<&[SourceEntry]> {
        Ok(&self.info(class)?.source)
    }

    pub fn source_index(&self, class: &str, field: &str) -> LookupResult<Option<usize>> {
        Ok(self.source(class)?.iter().position(|s| s.name == field))
    }

    pub fn composite_index(&self, class: &str, field: &str) -> LookupResult<Option<usize>> {
        Ok(self.composite(class)?.iter().position(|s| s.name == field))
    }

    /// Modifier and declared class of a field, from either lookup.
    pub fn ftype(&self, class: &str, field: &str) -> LookupResult<Option<(Modifier, &str)>> {
        let info = self.info(class)?;
        let found = info
            .composite
            .iter()
            .find(|c| c.name == field)
            .map(|c| (c.modifier, c.ty.as_str()))
            .or_else(|| {
                info.source
                    .iter()
                    .find(|s| s.name == field)
                    .map(|s| (s.modifier, s.ty.as_str()))
            });
        Ok(found)
    }

    fn find_method(&self, method: &str, class: &str) -> LookupResult<Option<(&str, &MethodDecl)>> {
        if !self.contains(class) {
            return Err(ClassTableError::UnknownClass(class.to_string()));
        }
        let mut cur = class;
        while let Some(decl) = self.decls.get(cur) {
            if let Some(m) = decl.methods.iter().find(|m| m.name == method) {
                return Ok(Some((decl.name.as_str(), m)));
            }
            cur = &decl.parent;
        }
        Ok(None)
    }

    /// Parameters and body of `method`, from `class` or its nearest ancestor.
    pub fn mbody(&self, method: &str, class: &str) -> LookupResult<Option<MethodBody<'_>>> {
        Ok(self
            .find_method(method, class)?
            .map(|(owner, m)| MethodBody {
                params: &m.params,
                body: &m.body,
                owner,
            }))
    }

    pub fn mtype(&self, method: &str, class: &str) -> LookupResult<Option<MethodType>> {
        Ok(self
            .find_method(method, class)?
            .map(|(_, m)| MethodType::of(m)))
    }
}

fn check_own_members(c: &ClassDecl) -> Result<(), ClassTableError> {
    let mut fields = HashSet::new();
    let names = c
        .composite_fields
        .iter()
        .map(|f| (&f.name, f.span))
        .chain(c.source_fields.iter().map(|f| (&f.name, f.span)));
    for (name, span) in names {
        if !fields.insert(name.as_str()) {
            return Err(ClassTableError::DuplicateField {
                class: c.name.clone(),
                field: name.clone(),
                hides: None,
                span,
            });
        }
    }

    let mut methods = HashSet::new();
    for m in &c.methods {
        if !methods.insert(m.name.as_str()) {
            return Err(ClassTableError::Overload {
                class: c.name.clone(),
                method: m.name.clone(),
                reason: "is declared more than once".into(),
                span: m.span,
            });
        }
        let mut params = HashSet::new();
        for p in &m.params {
            if p.name == "this" || !params.insert(p.name.as_str()) {
                return Err(ClassTableError::DuplicateParam {
                    class: c.name.clone(),
                    method: m.name.clone(),
                    param: p.name.clone(),
                    span: m.span,
                });
            }
        }
    }

    check_ctor_against_own_fields(c)
}

/// `C(D g, E f) { super(g); this.f = f; }`: parameters are the superclass
/// arguments followed by the class's own source fields, each assigned once,
/// in declaration order, from the parameter of the same name and type.
fn check_ctor_against_own_fields(c: &ClassDecl) -> Result<(), ClassTableError> {
    let k = &c.ctor;
    let fail = |reason: String| ClassTableError::CtorMismatch {
        class: c.name.clone(),
        reason,
        span: k.span,
    };

    let mut seen = HashSet::new();
    for p in &k.params {
        if !seen.insert(p.name.as_str()) {
            return Err(fail(format!(
                "declares parameter `{}` more than once",
                p.name
            )));
        }
    }
    for (field, param) in &k.field_inits {
        if field != param {
            return Err(fail(format!(
                "must initialize `this.{field}` from parameter `{field}`, not `{param}`"
            )));
        }
    }

    let n_super = k.super_args.len();
    if n_super > k.params.len() {
        return Err(fail(
            "passes more arguments to super than it has parameters".into(),
        ));
    }
    let (super_params, own_params) = k.params.split_at(n_super);
    for (arg, p) in k.super_args.iter().zip(super_params) {
        if *arg != p.name {
            return Err(fail(format!(
                "must pass its leading parameters to super in order (expected `{}`, found `{arg}`)",
                p.name
            )));
        }
    }

    let inits: Vec<&str> = k.field_inits.iter().map(|(f, _)| f.as_str()).collect();
    let own_param_names: Vec<&str> = own_params.iter().map(|p| p.name.as_str()).collect();
    if inits != own_param_names {
        return Err(fail(format!(
            "must assign each non-super parameter exactly once in order: parameters ({}) vs assignments ({})",
            own_param_names.join(", "),
            inits.join(", ")
        )));
    }

    let own_fields: Vec<&str> = c.source_fields.iter().map(|f| f.name.as_str()).collect();
    if inits != own_fields {
        return Err(fail(format!(
            "must initialize the declared source fields ({}) in order, found ({})",
            own_fields.join(", "),
            inits.join(", ")
        )));
    }
    for (p, f) in own_params.iter().zip(&c.source_fields) {
        if p.ty != f.ty {
            return Err(fail(format!(
                "parameter `{}` has type `{}` but field `{}` is declared `{}`",
                p.name, p.ty, f.name, f.ty
            )));
        }
    }
    Ok(())
}

fn inherit(
    decl: &ClassDecl,
    parent: &ClassInfo,
    table: &ClassTable,
) -> Result<ClassInfo, ClassTableError> {
    let inherited = parent
        .composite
        .iter()
        .map(|c| (&c.name, &c.owner))
        .chain(parent.source.iter().map(|s| (&s.name, &s.owner)));
    let inherited: HashMap<&String, &String> = inherited.collect();

    let own = decl
        .composite_fields
        .iter()
        .map(|f| (&f.name, f.span))
        .chain(decl.source_fields.iter().map(|f| (&f.name, f.span)));
    for (name, span) in own {
        if let Some(owner) = inherited.get(name) {
            return Err(ClassTableError::DuplicateField {
                class: decl.name.clone(),
                field: name.clone(),
                hides: Some((*owner).clone()),
                span,
            });
        }
    }

    for m in &decl.methods {
        if let Some((owner, sup)) = table.find_method(&m.name, &decl.parent)? {
            if MethodType::of(sup) != MethodType::of(m) {
                return Err(ClassTableError::Overload {
                    class: decl.name.clone(),
                    method: m.name.clone(),
                    reason: format!("overrides `{owner}.{}` with a different signature", m.name),
                    span: m.span,
                });
            }
        }
    }

    let mut composite = parent.composite.clone();
    composite.extend(decl.composite_fields.iter().map(|f| CompositeEntry {
        modifier: f.modifier,
        ty: f.ty.clone(),
        name: f.name.clone(),
        init: f.init.clone(),
        owner: decl.name.clone(),
    }));
    let mut source = parent.source.clone();
    source.extend(decl.source_fields.iter().map(|f| SourceEntry {
        modifier: f.modifier,
        ty: f.ty.clone(),
        name: f.name.clone(),
        owner: decl.name.clone(),
    }));
    Ok(ClassInfo {
        parent: Some(decl.parent.clone()),
        composite,
        source,
    })
}
