//! Greedy reduction of failing programs to a locally minimal witness.

use crate::syntax::{Expr, Program};

fn child_count(e: &Expr) -> usize {
    match e {
        Expr::Var(_) | Expr::Loc(_) | Expr::Empty => 0,
        Expr::Field(..) | Expr::Effect(..) => 1,
        Expr::Invoke(_, _, args) => 1 + args.len(),
        Expr::New(_, args) => args.len(),
        Expr::Assign(..) | Expr::Seq(..) | Expr::Subscribe(..) | Expr::Let(..) => 2,
    }
}

fn child_mut(e: &mut Expr, i: usize) -> &mut Expr {
    match (e, i) {
        (Expr::Field(r, _), 0)
        | (Expr::Invoke(r, _, _), 0)
        | (Expr::Assign(r, _, _), 0)
        | (Expr::Seq(r, _), 0)
        | (Expr::Subscribe(r, _, _), 0)
        | (Expr::Effect(r, _, _), 0)
        | (Expr::Let(_, r, _), 0) => r,
        (Expr::Assign(_, _, r), 1)
        | (Expr::Seq(_, r), 1)
        | (Expr::Subscribe(_, _, r), 1)
        | (Expr::Let(_, _, r), 1) => r,
        (Expr::Invoke(_, _, args), i) => &mut args[i - 1],
        (Expr::New(_, args), i) => &mut args[i],
        _ => unreachable!("child index out of range"),
    }
}

fn child(e: &Expr, i: usize) -> Expr {
    let mut e = e.clone();
    std::mem::replace(child_mut(&mut e, i), Expr::Empty)
}

/// Every expression obtained from `e` by replacing one node with one of
/// its children or with `unit`. Larger cuts come first.
pub fn expr_variants(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    if *e != Expr::Empty {
        out.push(Expr::Empty);
    }
    for i in 0..child_count(e) {
        out.push(child(e, i));
    }
    for i in 0..child_count(e) {
        let sub = child(e, i);
        for v in expr_variants(&sub) {
            let mut copy = e.clone();
            *child_mut(&mut copy, i) = v;
            out.push(copy);
        }
    }
    out
}

/// One-step-smaller programs: drop a class, a method or a composite field,
/// or shrink the main expression, a method body or an initializer.
pub fn program_variants(p: &Program) -> Vec<Program> {
    let mut out = Vec::new();
    for i in 0..p.classes.len() {
        let mut q = p.clone();
        q.classes.remove(i);
        out.push(q);
    }
    for (i, c) in p.classes.iter().enumerate() {
        for j in 0..c.methods.len() {
            let mut q = p.clone();
            q.classes[i].methods.remove(j);
            out.push(q);
        }
        for j in 0..c.composite_fields.len() {
            let mut q = p.clone();
            q.classes[i].composite_fields.remove(j);
            out.push(q);
        }
    }
    for v in expr_variants(&p.main) {
        let mut q = p.clone();
        q.main = v;
        out.push(q);
    }
    for (i, c) in p.classes.iter().enumerate() {
        for (j, m) in c.methods.iter().enumerate() {
            for v in expr_variants(&m.body) {
                let mut q = p.clone();
                q.classes[i].methods[j].body = v;
                out.push(q);
            }
        }
        for (j, f) in c.composite_fields.iter().enumerate() {
            for v in expr_variants(&f.init) {
                let mut q = p.clone();
                q.classes[i].composite_fields[j].init = v;
                out.push(q);
            }
        }
    }
    out
}

/// Repeatedly replace `p` with its first variant that still satisfies
/// `keep`, until none does or `budget` predicate calls are spent.
pub fn shrink(p: &Program, budget: usize, keep: impl Fn(&Program) -> bool) -> Program {
    let mut best = p.clone();
    let mut calls = 0;
    'outer: loop {
        for candidate in program_variants(&best) {
            if calls >= budget {
                break 'outer;
            }
            calls += 1;
            if keep(&candidate) {
                best = candidate;
                continue 'outer;
            }
        }
        break;
    }
    best
}
