//! Recursive descent parser for `.fsj` source files.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: expected {}, found {found}", join_expected(expected))]
    Unexpected {
        line: u32,
        col: u32,
        expected: BTreeSet<String>,
        found: String,
    },
    #[error("{line}:{col}: {message}")]
    Invalid {
        line: u32,
        col: u32,
        message: String,
    },
}

fn join_expected(set: &BTreeSet<String>) -> String {
    let items: Vec<&str> = set.iter().map(String::as_str).collect();
    match items.as_slice() {
        [] => "nothing".to_string(),
        [one] => (*one).to_string(),
        _ => format!("one of {}", items.join(", ")),
    }
}

impl ParseError {
    pub(crate) fn invalid(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError::Invalid {
            line,
            col,
            message: message.into(),
        }
    }

    pub fn position(&self) -> (u32, u32) {
        match self {
            ParseError::Unexpected { line, col, .. } | ParseError::Invalid { line, col, .. } => {
                (*line, *col)
            }
        }
    }

    pub fn expected(&self) -> Option<&BTreeSet<String>> {
        match self {
            ParseError::Unexpected { expected, .. } => Some(expected),
            ParseError::Invalid { .. } => None,
        }
    }
}

pub type ParseResult<T> = Result<T, ParseError>;

/// Parse a whole program: class declarations followed by the main expression.
pub fn parse_program(src: &str) -> ParseResult<Program> {
    let mut p = Parser::new(src)?;
    let mut classes = Vec::new();
    while p.at(&TokenKind::Class) {
        classes.push(p.class_decl()?);
    }
    let main_span = p.span();
    let main = p.seq_expr()?;
    p.expect_eof()?;
    Ok(Program {
        classes,
        main,
        main_span,
    })
}

/// Parse a standalone expression.
pub fn parse_expr(src: &str) -> ParseResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.seq_expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
enum MemberPhase {
    Fields,
    Methods,
}

impl Parser {
    fn new(src: &str) -> ParseResult<Self> {
        Ok(Parser {
            tokens: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == kind
    }

    fn span(&self) -> Span {
        let t = &self.tokens[self.pos];
        Span::new(t.line, t.col)
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &[&str]) -> ParseResult<T> {
        let t = &self.tokens[self.pos];
        Err(ParseError::Unexpected {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.kind.to_string(),
        })
    }

    fn invalid<T>(&self, message: impl Into<String>) -> ParseResult<T> {
        let t = &self.tokens[self.pos];
        Err(ParseError::invalid(t.line, t.col, message))
    }

    fn expect(&mut self, kind: TokenKind) -> ParseResult<Token> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            self.unexpected(&[&kind.to_string()])
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_eof(&mut self) -> ParseResult<()> {
        if self.at(&TokenKind::Eof) {
            Ok(())
        } else {
            self.unexpected(&["end of input", "`;`"])
        }
    }

    fn ident(&mut self) -> ParseResult<String> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(name)
            }
            k if k.is_keyword() => {
                self.invalid(format!("reserved word {k} cannot be used as an identifier"))
            }
            _ => self.unexpected(&["identifier"]),
        }
    }

    /// A class name in reference position: an identifier or `Object`.
    fn class_ref(&mut self) -> ParseResult<String> {
        match self.peek() {
            TokenKind::Object => {
                self.advance();
                Ok("Object".to_string())
            }
            TokenKind::UnitTy => self.invalid("`Unit` is only allowed as a method return type"),
            TokenKind::Ident(_) => self.ident(),
            k if k.is_keyword() => {
                let k = k.clone();
                self.invalid(format!("reserved word {k} cannot be used as a class name"))
            }
            _ => self.unexpected(&["class name"]),
        }
    }

    fn class_decl(&mut self) -> ParseResult<ClassDecl> {
        let span = self.span();
        self.expect(TokenKind::Class)?;
        let name = self.ident()?;
        self.expect(TokenKind::Extends)?;
        let parent = self.class_ref()?;
        self.expect(TokenKind::LBrace)?;

        let mut composite_fields = Vec::new();
        let mut source_fields = Vec::new();
        let mut ctor = None;
        let mut methods = Vec::new();
        let mut phase = MemberPhase::Fields;

        loop {
            match self.peek().clone() {
                TokenKind::RBrace => {
                    self.advance();
                    break;
                }
                TokenKind::Signal => {
                    if phase != MemberPhase::Fields || ctor.is_some() {
                        return self.invalid("field declarations must precede the constructor");
                    }
                    let span = self.span();
                    self.advance();
                    self.field_decl(
                        Modifier::Signal,
                        span,
                        &mut composite_fields,
                        &mut source_fields,
                    )?;
                }
                TokenKind::Ident(ref word)
                    if *word == name && self.peek_at(1) == &TokenKind::LParen =>
                {
                    if ctor.is_some() {
                        return self
                            .invalid(format!("class `{name}` declares more than one constructor"));
                    }
                    if phase == MemberPhase::Methods {
                        return self.invalid("the constructor must precede method declarations");
                    }
                    ctor = Some(self.ctor_decl()?);
                }
                TokenKind::Ident(_) | TokenKind::Object | TokenKind::UnitTy => {
                    let span = self.span();
                    let is_method = self.peek_at(2) == &TokenKind::LParen;
                    if is_method {
                        if ctor.is_none() {
                            return self.invalid(format!(
                                "the constructor of `{name}` must precede method declarations"
                            ));
                        }
                        phase = MemberPhase::Methods;
                        methods.push(self.method_decl(span)?);
                    } else {
                        if ctor.is_some() {
                            return self.invalid("field declarations must precede the constructor");
                        }
                        self.field_decl(
                            Modifier::Plain,
                            span,
                            &mut composite_fields,
                            &mut source_fields,
                        )?;
                    }
                }
                _ => {
                    return self.unexpected(&["`signal`", "class name", "`Unit`", "`}`"]);
                }
            }
        }

        let Some(ctor) = ctor else {
            return Err(ParseError::invalid(
                span.line,
                span.col,
                format!("class `{name}` has no constructor"),
            ));
        };
        Ok(ClassDecl {
            name,
            parent,
            composite_fields,
            source_fields,
            ctor,
            methods,
            span,
        })
    }

    fn field_decl(
        &mut self,
        modifier: Modifier,
        span: Span,
        composite: &mut Vec<CompositeField>,
        source: &mut Vec<SourceField>,
    ) -> ParseResult<()> {
        let ty = self.class_ref()?;
        let name = self.ident()?;
        if self.eat(&TokenKind::Eq) {
            let init = self.assign_expr()?;
            self.expect(TokenKind::Semi)?;
            composite.push(CompositeField {
                modifier,
                ty,
                name,
                init,
                span,
            });
        } else if self.eat(&TokenKind::Semi) {
            source.push(SourceField {
                modifier,
                ty,
                name,
                span,
            });
        } else {
            return self.unexpected(&["`=`", "`;`"]);
        }
        Ok(())
    }

    fn params(&mut self) -> ParseResult<Vec<Param>> {
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                let ty = self.class_ref()?;
                let name = self.ident()?;
                params.push(Param { ty, name });
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                if !self.eat(&TokenKind::Comma) {
                    return self.unexpected(&["`,`", "`)`"]);
                }
            }
        }
        Ok(params)
    }

    fn ctor_decl(&mut self) -> ParseResult<ConstructorDecl> {
        let span = self.span();
        self.ident()?;
        let params = self.params()?;
        self.expect(TokenKind::LBrace)?;
        self.expect(TokenKind::Super)?;
        self.expect(TokenKind::LParen)?;
        let mut super_args = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                super_args.push(self.ident()?);
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                if !self.eat(&TokenKind::Comma) {
                    return self.unexpected(&["`,`", "`)`"]);
                }
            }
        }
        self.expect(TokenKind::Semi)?;
        let mut field_inits = Vec::new();
        while self.eat(&TokenKind::This) {
            self.expect(TokenKind::Dot)?;
            let field = self.ident()?;
            self.expect(TokenKind::Eq)?;
            let param = self.ident()?;
            self.expect(TokenKind::Semi)?;
            field_inits.push((field, param));
        }
        if !self.eat(&TokenKind::RBrace) {
            return self.unexpected(&["`this`", "`}`"]);
        }
        Ok(ConstructorDecl {
            params,
            super_args,
            field_inits,
            span,
        })
    }

    fn method_decl(&mut self, span: Span) -> ParseResult<MethodDecl> {
        let ret = if self.eat(&TokenKind::UnitTy) {
            TypeName::Unit
        } else {
            TypeName::Class(self.class_ref()?)
        };
        let name = self.ident()?;
        let params = self.params()?;
        self.expect(TokenKind::LBrace)?;
        let body = self.seq_expr()?;
        self.expect(TokenKind::RBrace)?;
        Ok(MethodDecl {
            ret,
            name,
            params,
            body,
            span,
        })
    }

    /// `stmt (';' seq)?`, right-associated.
    fn seq_expr(&mut self) -> ParseResult<Expr> {
        let first = self.stmt()?;
        if self.eat(&TokenKind::Semi) {
            let rest = self.seq_expr()?;
            Ok(Expr::seq(first, rest))
        } else {
            Ok(first)
        }
    }

    fn stmt(&mut self) -> ParseResult<Expr> {
        if self.eat(&TokenKind::Let) {
            let var = self.ident()?;
            self.expect(TokenKind::Eq)?;
            let bound = self.seq_expr()?;
            self.expect(TokenKind::In)?;
            let body = self.seq_expr()?;
            return Ok(Expr::let_in(var, bound, body));
        }
        self.assign_expr()
    }

    fn assign_expr(&mut self) -> ParseResult<Expr> {
        let target = self.postfix_expr()?;
        if !self.at(&TokenKind::Eq) {
            return Ok(target);
        }
        let Expr::Field(recv, field) = target else {
            return self.invalid("assignment target must be a field access `e.f`");
        };
        self.advance();
        let value = self.assign_expr()?;
        Ok(Expr::Assign(recv, field, Box::new(value)))
    }

    fn postfix_expr(&mut self) -> ParseResult<Expr> {
        let mut e = self.primary_expr()?;
        while self.eat(&TokenKind::Dot) {
            if self.at(&TokenKind::Subscribe) {
                let Expr::Field(recv, field) = e else {
                    return self.invalid("`subscribe` must be called on a field access `e.f`");
                };
                self.advance();
                self.expect(TokenKind::LParen)?;
                let handler = self.seq_expr()?;
                self.expect(TokenKind::RParen)?;
                e = Expr::Subscribe(recv, field, Box::new(handler));
                continue;
            }
            let name = self.ident()?;
            if self.at(&TokenKind::LParen) {
                let args = self.args()?;
                e = Expr::Invoke(Box::new(e), name, args);
            } else {
                e = Expr::Field(Box::new(e), name);
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> ParseResult<Vec<Expr>> {
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.seq_expr()?);
            if self.eat(&TokenKind::RParen) {
                return Ok(args);
            }
            if !self.eat(&TokenKind::Comma) {
                return self.unexpected(&["`,`", "`)`"]);
            }
        }
    }

    fn primary_expr(&mut self) -> ParseResult<Expr> {
        match self.peek() {
            TokenKind::Ident(_) => Ok(Expr::Var(self.ident()?)),
            TokenKind::This => {
                self.advance();
                Ok(Expr::this())
            }
            TokenKind::UnitLit => {
                self.advance();
                Ok(Expr::Empty)
            }
            TokenKind::New => {
                self.advance();
                let class = self.class_ref()?;
                let args = self.args()?;
                Ok(Expr::New(class, args))
            }
            TokenKind::LParen => {
                self.advance();
                let e = self.seq_expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Let => self.invalid("`let` in this position must be parenthesized"),
            k if k.is_keyword() => {
                let k = k.clone();
                self.invalid(format!("reserved word {k} cannot be used as an identifier"))
            }
            _ => self.unexpected(&["identifier", "`this`", "`new`", "`unit`", "`(`"]),
        }
    }
}
