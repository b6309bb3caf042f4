//! A small arithmetic expression language for user-supplied problem data.
//!
//! Grammar (usual precedence, `^` right-associative, unary minus binds
//! looser than `^` so `-x^2 = -(x^2)`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := 'exp' | 'sin' | 'cos'
//! ```

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at column {column}")]
pub struct ExprError {
    pub message: String,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(source: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(source)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some((tok, col)) => Err(ExprError {
                message: format!("unexpected '{tok}'"),
                column: *col,
            }),
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::T) => t,
            Expr::Neg(a) => -a.eval(x, t),
            Expr::Add(a, b) => a.eval(x, t) + b.eval(x, t),
            Expr::Sub(a, b) => a.eval(x, t) - b.eval(x, t),
            Expr::Mul(a, b) => a.eval(x, t) * b.eval(x, t),
            Expr::Div(a, b) => a.eval(x, t) / b.eval(x, t),
            Expr::Pow(a, b) => {
                let base = a.eval(x, t);
                match **b {
                    Expr::Num(p) if p.fract() == 0.0 && p.abs() < 64.0 => base.powi(p as i32),
                    _ => base.powf(b.eval(x, t)),
                }
            }
            Expr::Call(Func::Exp, a) => a.eval(x, t).exp(),
            Expr::Call(Func::Sin, a) => a.eval(x, t).sin(),
            Expr::Call(Func::Cos, a) => a.eval(x, t).cos(),
        }
    }

    /// Whether the expression mentions `var`.
    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.uses(var),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.uses(var) || b.uses(var),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(v) => write!(f, "{v}"),
            Token::Ident(s) => f.write_str(s),
            Token::Op(c) => write!(f, "{c}"),
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| ExprError {
                message: format!("malformed number '{text}'"),
                column: col,
            })?;
            out.push((Token::Num(v), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Token::Ident(chars[start..i].iter().collect()), col));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '×' => Token::Op('*'),
                '÷' => Token::Op('/'),
                '−' => Token::Op('-'),
                '(' => Token::LParen,
                ')' => Token::RParen,
                _ => {
                    return Err(ExprError {
                        message: format!("unexpected character '{c}'"),
                        column: col,
                    })
                }
            };
            out.push((tok, col));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.tokens.get(self.pos)
    }

    fn end_column(&self) -> usize {
        self.tokens.last().map_or(1, |(_, c)| c + 1)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        if let Some((Token::Op(c), _)) = self.peek() {
            if ops.contains(c) {
                let c = *c;
                self.pos += 1;
                return Some(c);
            }
        }
        None
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op(&['+']).is_some() {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let Some((tok, col)) = self.tokens.get(self.pos).cloned() else {
            return Err(ExprError {
                message: "unexpected end of expression".into(),
                column: self.end_column(),
            });
        };
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let e = self.expr()?;
                self.close(col)?;
                Ok(e)
            }
            Token::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var(Var::X)),
                "t" => Ok(Expr::Var(Var::T)),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "exp" | "sin" | "cos" => {
                    let func = match name.as_str() {
                        "exp" => Func::Exp,
                        "sin" => Func::Sin,
                        _ => Func::Cos,
                    };
                    match self.tokens.get(self.pos) {
                        Some((Token::LParen, open)) => {
                            let open = *open;
                            self.pos += 1;
                            let arg = self.expr()?;
                            self.close(open)?;
                            Ok(Expr::Call(func, Box::new(arg)))
                        }
                        _ => Err(ExprError {
                            message: format!("expected '(' after {name}"),
                            column: col + name.len(),
                        }),
                    }
                }
                _ => Err(ExprError {
                    message: format!("unknown identifier '{name}'"),
                    column: col,
                }),
            },
            other => Err(ExprError {
                message: format!("unexpected '{other}'"),
                column: col,
            }),
        }
    }

    fn close(&mut self, open: usize) -> Result<(), ExprError> {
        match self.tokens.get(self.pos) {
            Some((Token::RParen, _)) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ExprError {
                message: format!("unclosed '(' opened at column {open}"),
                column: self.peek().map_or(self.end_column(), |(_, c)| *c),
            }),
        }
    }
}
