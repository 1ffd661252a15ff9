//! Pretty-printer producing text that `parse_program` reads back.

use std::fmt::{self, Write};

use super::ast::*;

/// Binding strength of an expression position.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    /// `let` and `;`
    Seq = 0,
    /// `e.f = e`
    Assign = 1,
    /// Everything that binds at least as tightly as `e.f`.
    Postfix = 2,
}

fn level_of(e: &Expr) -> Level {
    match e {
        Expr::Seq(..) | Expr::Let(..) => Level::Seq,
        Expr::Assign(..) => Level::Assign,
        _ => Level::Postfix,
    }
}

fn write_expr(out: &mut impl Write, e: &Expr, min: Level) -> fmt::Result {
    let paren = level_of(e) < min;
    if paren {
        out.write_char('(')?;
    }
    match e {
        Expr::Var(x) => out.write_str(x)?,
        Expr::Loc(l) => write!(out, "{l}")?,
        Expr::Empty => out.write_str("unit")?,
        Expr::Field(r, f) => {
            write_expr(out, r, Level::Postfix)?;
            write!(out, ".{f}")?;
        }
        Expr::Invoke(r, m, args) => {
            write_expr(out, r, Level::Postfix)?;
            write!(out, ".{m}")?;
            write_args(out, args)?;
        }
        Expr::New(c, args) => {
            write!(out, "new {c}")?;
            write_args(out, args)?;
        }
        Expr::Assign(r, f, v) => {
            write_expr(out, r, Level::Postfix)?;
            write!(out, ".{f} = ")?;
            write_expr(out, v, Level::Assign)?;
        }
        Expr::Seq(a, b) => {
            write_expr(out, a, Level::Assign)?;
            out.write_str("; ")?;
            write_expr(out, b, Level::Seq)?;
        }
        Expr::Subscribe(r, f, h) => {
            write_expr(out, r, Level::Postfix)?;
            write!(out, ".{f}.subscribe(")?;
            write_expr(out, h, Level::Seq)?;
            out.write_char(')')?;
        }
        Expr::Effect(b, l, f) => {
            out.write_str("{ ")?;
            write_expr(out, b, Level::Seq)?;
            write!(out, " }}{l}.{f}")?;
        }
        Expr::Let(x, bound, body) => {
            write!(out, "let {x} = ")?;
            write_expr(out, bound, Level::Seq)?;
            out.write_str(" in ")?;
            write_expr(out, body, Level::Seq)?;
        }
    }
    if paren {
        out.write_char(')')?;
    }
    Ok(())
}

fn write_args(out: &mut impl Write, args: &[Expr]) -> fmt::Result {
    out.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        write_expr(out, a, Level::Seq)?;
    }
    out.write_char(')')
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, Level::Seq)
    }
}

fn write_params(out: &mut impl Write, params: &[Param]) -> fmt::Result {
    out.write_char('(')?;
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        write!(out, "{} {}", p.ty, p.name)?;
    }
    out.write_char(')')
}

fn write_modifier(out: &mut impl Write, m: Modifier) -> fmt::Result {
    match m {
        Modifier::Signal => out.write_str("signal "),
        Modifier::Plain => Ok(()),
    }
}

impl fmt::Display for ClassDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "class {} extends {} {{", self.name, self.parent)?;
        for c in &self.composite_fields {
            f.write_str("    ")?;
            write_modifier(f, c.modifier)?;
            write!(f, "{} {} = ", c.ty, c.name)?;
            // initializers end at `;`, so they sit at assignment level
            write_expr(f, &c.init, Level::Assign)?;
            f.write_str(";\n")?;
        }
        for s in &self.source_fields {
            f.write_str("    ")?;
            write_modifier(f, s.modifier)?;
            writeln!(f, "{} {};", s.ty, s.name)?;
        }
        write!(f, "    {}", self.name)?;
        write_params(f, &self.ctor.params)?;
        write!(f, " {{ super({});", self.ctor.super_args.join(", "))?;
        for (field, param) in &self.ctor.field_inits {
            write!(f, " this.{field} = {param};")?;
        }
        f.write_str(" }\n")?;
        for m in &self.methods {
            write!(f, "    {} {}", m.ret, m.name)?;
            write_params(f, &m.params)?;
            writeln!(f, " {{ {} }}", m.body)?;
        }
        f.write_str("}\n")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.classes {
            writeln!(f, "{c}")?;
        }
        writeln!(f, "{}", self.main)
    }
}

/// Render a program as `.fsj` source text.
pub fn render_program(p: &Program) -> String {
    p.to_string()
}

/// Render an expression, including runtime forms (`@n`, `{ e }@n.f`).
pub fn render_expr(e: &Expr) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Location;
    use crate::syntax::{parse_expr, parse_program};

    #[test]
    fn basic_forms() {
        assert_eq!(render_expr(&Expr::Empty), "unit");
        assert_eq!(render_expr(&Expr::new_obj("A", vec![])), "new A()");
        assert_eq!(
            render_expr(&Expr::effect(Expr::Empty, Location(3), "f")),
            "{ unit }@3.f"
        );
    }

    #[test]
    fn parenthesizes_where_needed() {
        let cases = [
            Expr::seq(Expr::seq(Expr::var("a"), Expr::var("b")), Expr::var("c")),
            Expr::seq(
                Expr::let_in("x", Expr::var("a"), Expr::var("x")),
                Expr::var("c"),
            ),
            Expr::field(Expr::let_in("x", Expr::var("a"), Expr::var("x")), "f"),
            Expr::assign(Expr::var("a"), "f", Expr::seq(Expr::Empty, Expr::var("b"))),
            Expr::invoke(
                Expr::var("a"),
                "m",
                vec![Expr::seq(Expr::Empty, Expr::var("b")), Expr::var("c")],
            ),
            Expr::field(Expr::subscribe(Expr::var("a"), "f", Expr::Empty), "g"),
            Expr::field(Expr::assign(Expr::var("a"), "f", Expr::var("b")), "g"),
        ];
        for e in cases {
            let text = render_expr(&e);
            assert_eq!(parse_expr(&text).unwrap(), e, "{text}");
        }
    }

    #[test]
    fn class_round_trip() {
        let src = "class A extends Object {
            signal A f = this.g.m(this.h);
            A k = this.g;
            signal A g;
            A h;
            A(A g, A h) { super(); this.g = g; this.h = h; }
            A m(A x) { let y = x in y }
            Unit n() { this.h = this.g; this.g.subscribe(unit) }
        }
        class B extends A { B(A g, A h) { super(g, h); } }
        new B(new A(unit, unit), unit)";
        let p = parse_program(src).unwrap();
        let again = parse_program(&render_program(&p)).unwrap();
        assert_eq!(p, again);
    }
}
