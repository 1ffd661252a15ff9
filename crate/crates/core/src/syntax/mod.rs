//! Abstract syntax, concrete syntax and pretty-printing.

mod ast;
mod lexer;
mod parser;
mod render;

pub use ast::*;
pub use parser::{parse_expr, parse_program, ParseError, ParseResult};
pub use render::{render_expr, render_program};
