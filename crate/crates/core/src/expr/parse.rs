//! Recursive-descent parser for the expression grammar.
//!
//! Grammar (tightest-binding last):
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          // right-associative
//! atom   := NUMBER | IDENT '(' expr ')' | IDENT | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, which binds tighter than `*`/`/`:
//! `-x1^2` is `-(x1^2)` and `x1^2^3` is `x1^(2^3)`.

use super::lex::{tokenize, Spanned, Tok};
use super::{BinOp, Expr, Func, Var};

/// Error produced while parsing an expression string.
///
/// Every variant carries the byte offset into the source string where the
/// problem was detected, and the set of token kinds that would have been
/// accepted at that position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    /// Byte offset into the source string.
    pub offset: usize,
    /// Human-readable descriptions of the acceptable tokens at `offset`.
    pub expected: Vec<String>,
    /// Description of what was actually found.
    pub found: String,
}

impl ParseError {
    pub(super) fn syntax(offset: usize, expected: &[&str], found: String) -> ParseError {
        ParseError {
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }
}

/// Parse an expression string into an [`Expr`] tree.
///
/// Any `x<digits>`, `y<digits>` or `z` identifier parses as a variable;
/// whether the variable is permitted in a given context (and whether its
/// index is within the declared dimension) is checked where the expression is
/// installed, not here.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    match p.peek().tok {
        Tok::Eof => Ok(e),
        _ => Err(p.unexpected(&["an operator", "end of input"])),
    }
}

const EXPR_START: &[&str] = &["a number", "a variable", "a function", "`(`", "`-`"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError::syntax(t.offset, expected, t.tok.describe())
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&["`)`", "an operator"])),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            Ok(Expr::Neg(Box::new(inner)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            // The right operand re-enters `unary`, which makes `^`
            // right-associative and allows `x^-2`.
            let exponent = self.unary()?;
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(ref name) => {
                self.bump();
                if self.peek().tok == Tok::LParen {
                    let func = function_named(name).ok_or_else(|| {
                        ParseError::syntax(
                            t.offset,
                            &["one of the functions sin, cos, exp, ln, sqrt"],
                            format!("unknown function `{name}`"),
                        )
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    let var = variable_named(name).ok_or_else(|| {
                        ParseError::syntax(
                            t.offset,
                            &["a variable of the form `x<i>`, `y<i>` or `z`"],
                            format!("unknown identifier `{name}`"),
                        )
                    })?;
                    Ok(Expr::Var(var))
                }
            }
            _ => Err(self.unexpected(EXPR_START)),
        }
    }
}

fn function_named(name: &str) -> Option<Func> {
    match name {
        "sin" => Some(Func::Sin),
        "cos" => Some(Func::Cos),
        "exp" => Some(Func::Exp),
        "ln" => Some(Func::Ln),
        "sqrt" => Some(Func::Sqrt),
        _ => None,
    }
}

fn variable_named(name: &str) -> Option<Var> {
    if name == "z" {
        return Some(Var::Z);
    }
    let (head, digits) = name.split_at(1);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    // One-based in the surface syntax; `x0` is not a variable.
    let idx: usize = digits.parse().ok()?;
    if idx == 0 {
        return None;
    }
    match head {
        "x" => Some(Var::X(idx - 1)),
        "y" => Some(Var::Y(idx - 1)),
        _ => None,
    }
}
