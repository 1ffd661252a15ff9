//! Random well-typed programs.
//!
//! Programs are typed by construction. Field and constructor parameter types
//! only mention `Object` and earlier classes, so every class can be
//! instantiated from nothing. Composite initializers and method bodies get a
//! global rank and may only read composites or call methods of lower rank,
//! and methods are never overridden, so pulling a signal always terminates.
//! Only handlers can loop, and only when they write a signal they depend on.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classtable::OBJECT;
use crate::syntax::{
    ClassDecl, CompositeField, ConstructorDecl, Expr, MethodDecl, Modifier, Param, Program,
    SourceField, Span, TypeName,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub max_classes: usize,
    pub max_fields_per_class: usize,
    pub max_method_depth: usize,
    pub max_main_depth: usize,
    pub signal_probability: f64,
    pub subscribe_probability: f64,
    /// Allow `subscribe` inside generated handlers.
    pub subscribe_in_handlers: bool,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_classes: 4,
            max_fields_per_class: 3,
            max_method_depth: 2,
            max_main_depth: 8,
            signal_probability: 0.6,
            subscribe_probability: 0.35,
            subscribe_in_handlers: false,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        GenConfig { seed, ..self }
    }
}

const TOP_RANK: usize = usize::MAX;

#[derive(Debug, Clone)]
struct GField {
    name: String,
    ty: String,
    signal: bool,
    /// Rank and initializer of a composite field.
    composite: Option<(usize, Expr)>,
}

#[derive(Debug, Clone)]
struct GMethod {
    name: String,
    rank: usize,
    ret: Option<String>,
    params: Vec<(String, String)>,
    body: Expr,
}

#[derive(Debug, Clone)]
struct GClass {
    name: String,
    parent: Option<usize>,
    fields: Vec<GField>,
    methods: Vec<GMethod>,
}

type Env = Vec<(String, String)>;

struct Gen {
    cfg: GenConfig,
    rng: ChaCha8Rng,
    classes: Vec<GClass>,
    next_rank: usize,
    next_var: usize,
}

/// Generate a program that passes `check_program`. Deterministic per seed.
pub fn generate_program(cfg: &GenConfig) -> Program {
    let mut g = Gen {
        cfg: *cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        classes: Vec::new(),
        next_rank: 0,
        next_var: 0,
    };
    let n = g.rng.gen_range(0..=cfg.max_classes);
    for i in 0..n {
        g.add_class(i);
    }
    let main = g.main();
    Program {
        classes: g.classes.iter().map(|c| g.decl(c)).collect(),
        main,
        main_span: Span::default(),
    }
}

impl Gen {
    fn index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    fn is_sub(&self, sub: &str, sup: &str) -> bool {
        if sup == OBJECT {
            return true;
        }
        let mut cur = self.index(sub);
        while let Some(i) = cur {
            if self.classes[i].name == sup {
                return true;
            }
            cur = self.classes[i].parent;
        }
        false
    }

    /// Own and inherited fields, superclass first.
    fn fields(&self, class: &str) -> Vec<&GField> {
        let mut chain = Vec::new();
        let mut cur = self.index(class);
        while let Some(i) = cur {
            chain.push(i);
            cur = self.classes[i].parent;
        }
        chain
            .into_iter()
            .rev()
            .flat_map(|i| self.classes[i].fields.iter())
            .collect()
    }

    fn sources(&self, class: &str) -> Vec<&GField> {
        self.fields(class)
            .into_iter()
            .filter(|f| f.composite.is_none())
            .collect()
    }

    fn methods(&self, class: &str) -> Vec<&GMethod> {
        let mut out = Vec::new();
        let mut cur = self.index(class);
        while let Some(i) = cur {
            out.extend(self.classes[i].methods.iter());
            cur = self.classes[i].parent;
        }
        out
    }

    fn type_names(&self, upto: usize) -> Vec<String> {
        std::iter::once(OBJECT.to_string())
            .chain(self.classes.iter().take(upto).map(|c| c.name.clone()))
            .collect()
    }

    fn pick_type(&mut self, upto: usize) -> String {
        let names = self.type_names(upto);
        names
            .choose(&mut self.rng)
            .cloned()
            .expect("Object is always present")
    }

    fn rank(&mut self) -> usize {
        self.next_rank += 1;
        self.next_rank
    }

    fn add_class(&mut self, i: usize) {
        let parent = if i > 0 && self.rng.gen_bool(0.5) {
            Some(self.rng.gen_range(0..i))
        } else {
            None
        };
        let name = format!("C{i}");
        let mut fields = Vec::new();
        for j in 0..self.rng.gen_range(0..=self.cfg.max_fields_per_class) {
            let ty = self.pick_type(i);
            let signal = self.rng.gen_bool(self.cfg.signal_probability);
            fields.push(GField {
                name: format!("f{i}_{j}"),
                ty,
                signal,
                composite: None,
            });
        }
        self.classes.push(GClass {
            name: name.clone(),
            parent,
            fields,
            methods: Vec::new(),
        });
        let this_env: Env = vec![("this".into(), name.clone())];

        let composites = self.rng.gen_range(0..=self.cfg.max_fields_per_class.min(2));
        for j in 0..composites {
            let rank = self.rank();
            let ty = self.pick_type(i);
            let depth = self.cfg.max_method_depth.max(1);
            let init = self.value(&ty, &this_env, depth, rank, false);
            self.classes[i].fields.push(GField {
                name: format!("g{i}_{j}"),
                ty,
                signal: true,
                composite: Some((rank, init)),
            });
        }

        for _ in 0..self.rng.gen_range(0..=2) {
            let rank = self.rank();
            let ret = if self.rng.gen_bool(0.35) {
                None
            } else {
                Some(self.pick_type(i + 1))
            };
            let mut env = this_env.clone();
            let mut params = Vec::new();
            for k in 0..self.rng.gen_range(0..=2) {
                let ty = self.pick_type(i + 1);
                let p = format!("p{k}");
                env.push((p.clone(), ty.clone()));
                params.push((ty, p));
            }
            let depth = self.cfg.max_method_depth;
            let body = match &ret {
                Some(t) => {
                    let t = t.clone();
                    self.value(&t, &env, depth, rank, true)
                }
                None => self.unit(&env, depth, rank, false),
            };
            self.classes[i].methods.push(GMethod {
                name: format!("m{rank}"),
                rank,
                ret,
                params,
                body,
            });
        }
    }

    /// An expression whose type is a subtype of `ty`. Uses only variables,
    /// field reads, calls and `new`, so it is also a valid initializer.
    fn value(&mut self, ty: &str, env: &Env, depth: usize, rank: usize, allow_let: bool) -> Expr {
        #[derive(Clone)]
        enum Choice {
            Var(String),
            Read(String, String),
            Call(String, String, Vec<String>),
            New,
            Let,
        }
        let mut choices: Vec<(u32, Choice)> = env
            .iter()
            .filter(|(_, c)| self.is_sub(c, ty))
            .map(|(x, _)| (3, Choice::Var(x.clone())))
            .collect();
        if depth > 0 {
            for c in &self.classes {
                for f in self.fields(&c.name) {
                    let visible = f.composite.as_ref().is_none_or(|(r, _)| *r < rank);
                    if visible && self.is_sub(&f.ty, ty) {
                        choices.push((2, Choice::Read(c.name.clone(), f.name.clone())));
                    }
                }
                for m in self.methods(&c.name) {
                    if m.rank < rank && m.ret.as_deref().is_some_and(|r| self.is_sub(r, ty)) {
                        let params = m.params.iter().map(|(t, _)| t.clone()).collect();
                        choices.push((2, Choice::Call(c.name.clone(), m.name.clone(), params)));
                    }
                }
            }
            if allow_let {
                choices.push((1, Choice::Let));
            }
        }
        choices.push((if depth == 0 { 1 } else { 2 }, Choice::New));

        let total: u32 = choices.iter().map(|(w, _)| w).sum();
        let mut roll = self.rng.gen_range(0..total);
        let choice = choices
            .iter()
            .find(|(w, _)| {
                if roll < *w {
                    true
                } else {
                    roll -= w;
                    false
                }
            })
            .map(|(_, c)| c.clone())
            .expect("roll is within total weight");

        let d = depth.saturating_sub(1);
        match choice {
            Choice::Var(x) => Expr::var(x),
            Choice::Read(class, f) => {
                let recv = self.value(&class, env, d, rank, allow_let);
                Expr::field(recv, f)
            }
            Choice::Call(class, m, params) => {
                let recv = self.value(&class, env, d, rank, allow_let);
                let args = params
                    .iter()
                    .map(|p| self.value(p, env, d, rank, allow_let))
                    .collect();
                Expr::invoke(recv, m, args)
            }
            Choice::Let => {
                let bound_ty = self.pick_type(self.classes.len());
                let bound = self.value(&bound_ty, env, d, rank, allow_let);
                let x = self.fresh_var();
                let mut inner = env.clone();
                inner.push((x.clone(), bound_ty));
                let body = self.value(ty, &inner, d, rank, allow_let);
                Expr::let_in(x, bound, body)
            }
            Choice::New => {
                let class = if depth == 0 {
                    ty.to_string()
                } else {
                    let subs: Vec<String> = self
                        .type_names(self.classes.len())
                        .into_iter()
                        .filter(|c| self.is_sub(c, ty))
                        .collect();
                    subs.choose(&mut self.rng)
                        .cloned()
                        .unwrap_or_else(|| ty.to_string())
                };
                let arg_types: Vec<String> =
                    self.sources(&class).iter().map(|f| f.ty.clone()).collect();
                let args = arg_types
                    .iter()
                    .map(|t| self.value(t, env, d, rank, allow_let))
                    .collect();
                Expr::new_obj(class, args)
            }
        }
    }

    /// An expression of type `Unit`.
    fn unit(&mut self, env: &Env, depth: usize, rank: usize, in_handler: bool) -> Expr {
        let mut assignable = Vec::new();
        let mut signals = Vec::new();
        let mut calls = Vec::new();
        for c in &self.classes {
            for f in self.fields(&c.name) {
                if f.composite.is_none() {
                    assignable.push((c.name.clone(), f.name.clone(), f.ty.clone()));
                }
                if f.signal {
                    signals.push((c.name.clone(), f.name.clone()));
                }
            }
            for m in self.methods(&c.name) {
                if m.rank < rank && m.ret.is_none() {
                    let params: Vec<String> = m.params.iter().map(|(t, _)| t.clone()).collect();
                    calls.push((c.name.clone(), m.name.clone(), params));
                }
            }
        }
        let may_subscribe = !signals.is_empty()
            && depth > 0
            && (!in_handler || self.cfg.subscribe_in_handlers)
            && self.rng.gen_bool(self.cfg.subscribe_probability);
        let d = depth.saturating_sub(1);
        if may_subscribe {
            let (class, f) = signals.choose(&mut self.rng).cloned().unwrap();
            let recv = self.value(&class, env, d, rank, false);
            let handler = self.unit(env, d, rank, true);
            return Expr::subscribe(recv, f, handler);
        }
        let roll = self.rng.gen_range(0..10);
        if roll < 2 && depth > 0 {
            let a = self.unit(env, d, rank, in_handler);
            let b = self.unit(env, d, rank, in_handler);
            return Expr::seq(a, b);
        }
        if roll < 4 && !calls.is_empty() {
            let (class, m, params) = calls.choose(&mut self.rng).cloned().unwrap();
            let recv = self.value(&class, env, d, rank, false);
            let args = params
                .iter()
                .map(|p| self.value(p, env, d, rank, false))
                .collect();
            return Expr::invoke(recv, m, args);
        }
        if roll < 9 && !assignable.is_empty() {
            let (class, f, ty) = assignable.choose(&mut self.rng).cloned().unwrap();
            let recv = self.value(&class, env, d, rank, false);
            let v = self.value(&ty, env, d, rank, false);
            return Expr::assign(recv, f, v);
        }
        Expr::Empty
    }

    fn fresh_var(&mut self) -> String {
        self.next_var += 1;
        format!("x{}", self.next_var)
    }

    fn main(&mut self) -> Expr {
        enum Item {
            Let(String, Expr),
            Stmt(Expr),
        }
        let mut env: Env = Vec::new();
        let mut items = Vec::new();
        let count = self.rng.gen_range(1..=self.cfg.max_main_depth.max(1));
        for _ in 0..count {
            if env.is_empty() || self.rng.gen_bool(0.4) {
                let ty = self.pick_type(self.classes.len());
                let v = self.value(&ty, &env, 2, TOP_RANK, false);
                let x = self.fresh_var();
                env.push((x.clone(), ty));
                items.push(Item::Let(x, v));
            } else {
                let s = self.unit(&env, 2, TOP_RANK, false);
                items.push(Item::Stmt(s));
            }
        }
        let mut acc = if self.rng.gen_bool(0.7) {
            let ty = self.pick_type(self.classes.len());
            self.value(&ty, &env, 2, TOP_RANK, false)
        } else {
            Expr::Empty
        };
        for item in items.into_iter().rev() {
            acc = match item {
                Item::Let(x, v) => Expr::let_in(x, v, acc),
                Item::Stmt(s) => Expr::seq(s, acc),
            };
        }
        acc
    }

    fn decl(&self, c: &GClass) -> ClassDecl {
        let parent = c
            .parent
            .map(|p| self.classes[p].name.clone())
            .unwrap_or_else(|| OBJECT.to_string());
        let inherited: Vec<&GField> = if parent == OBJECT {
            Vec::new()
        } else {
            self.sources(&parent)
        };
        let own_sources: Vec<&GField> = c.fields.iter().filter(|f| f.composite.is_none()).collect();
        let modifier = |f: &GField| {
            if f.signal {
                Modifier::Signal
            } else {
                Modifier::Plain
            }
        };
        ClassDecl {
            name: c.name.clone(),
            parent,
            composite_fields: c
                .fields
                .iter()
                .filter_map(|f| {
                    f.composite.as_ref().map(|(_, init)| CompositeField {
                        modifier: Modifier::Signal,
                        ty: f.ty.clone(),
                        name: f.name.clone(),
                        init: init.clone(),
                        span: Span::default(),
                    })
                })
                .collect(),
            source_fields: own_sources
                .iter()
                .map(|f| SourceField {
                    modifier: modifier(f),
                    ty: f.ty.clone(),
                    name: f.name.clone(),
                    span: Span::default(),
                })
                .collect(),
            ctor: ConstructorDecl {
                params: inherited
                    .iter()
                    .chain(own_sources.iter())
                    .map(|f| Param::new(f.ty.clone(), f.name.clone()))
                    .collect(),
                super_args: inherited.iter().map(|f| f.name.clone()).collect(),
                field_inits: own_sources
                    .iter()
                    .map(|f| (f.name.clone(), f.name.clone()))
                    .collect(),
                span: Span::default(),
            },
            methods: c
                .methods
                .iter()
                .map(|m| MethodDecl {
                    ret: m
                        .ret
                        .as_ref()
                        .map(TypeName::class)
                        .unwrap_or(TypeName::Unit),
                    name: m.name.clone(),
                    params: m
                        .params
                        .iter()
                        .map(|(t, n)| Param::new(t.clone(), n.clone()))
                        .collect(),
                    body: m.body.clone(),
                    span: Span::default(),
                })
                .collect(),
            span: Span::default(),
        }
    }
}
