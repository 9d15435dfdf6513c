//! Arithmetic expressions over grid coordinates.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'pi' | variable | func '(' expr ')' | 'abs2' '(' ')' | '(' expr ')'
//! ```
//!
//! Variables are `x1..xn`, `y1..yn` with `z_j = x_j + i y_j`. Functions: `sin`, `cos`,
//! `exp`, `log`, `sqrt`, `sqr` (square), `abs`. `abs2()` is `|z|²`. `^` is
//! right-associative and binds tighter than unary minus, so `-x1^2 = -(x1^2)`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Sqr,
    Abs,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Abs2,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression for a fixed complex dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Expression { pos, msg: msg.into() })
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.pos, format!("expected '{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.peek() == Some(b'+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let start = match self.peek() {
            None => return err(self.pos, "unexpected end of expression"),
            Some(_) => self.pos,
        };
        let c = self.s[start];
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
            return self.identifier(name, start);
        }
        err(start, format!("unexpected character '{}'", c as char))
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let s = self.s;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < s.len() && (s[p] == b'+' || s[p] == b'-') {
                p += 1;
            }
            if p < s.len() && s[p].is_ascii_digit() {
                self.pos = p;
                digits(&mut self.pos);
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(v) => Ok(Node::Num(v)),
            Err(_) => err(start, format!("malformed number '{text}'")),
        }
    }

    fn identifier(&mut self, name: &str, start: usize) -> Result<Node> {
        if name == "pi" {
            return Ok(Node::Num(std::f64::consts::PI));
        }
        let func = match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            "sqr" => Some(Func::Sqr),
            "abs" => Some(Func::Abs),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Node::Call(f, Box::new(arg)));
        }
        if name == "abs2" {
            self.expect(b'(')?;
            self.expect(b')')?;
            return Ok(Node::Abs2);
        }
        let (axis, rest) = match name.as_bytes()[0] {
            b'x' => (0, &name[1..]),
            b'y' => (1, &name[1..]),
            _ => return err(start, format!("unknown identifier '{name}'")),
        };
        match rest.parse::<usize>() {
            Ok(j) if (1..=self.n).contains(&j) => Ok(Node::Var(2 * (j - 1) + axis)),
            Ok(_) => err(start, format!("variable '{name}' out of range for n = {}", self.n)),
            Err(_) => err(start, format!("unknown identifier '{name}'")),
        }
    }
}

impl Expr {
    /// Parses `source` for complex dimension `n`.
    pub fn parse(source: &str, n: usize) -> Result<Self> {
        let mut p = Parser {
            s: source.as_bytes(),
            pos: 0,
            n,
        };
        let root = p.expr()?;
        if p.peek().is_some() {
            return err(p.pos, "trailing input");
        }
        Ok(Expr {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Value at real coordinates `(x1, y1, x2, y2, …)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        eval(&self.root, x)
    }
}

fn eval(n: &Node, x: &[f64]) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::Var(i) => x[*i],
        Node::Abs2 => x.iter().map(|v| v * v).sum(),
        Node::Neg(a) => -eval(a, x),
        Node::Add(a, b) => eval(a, x) + eval(b, x),
        Node::Sub(a, b) => eval(a, x) - eval(b, x),
        Node::Mul(a, b) => eval(a, x) * eval(b, x),
        Node::Div(a, b) => eval(a, x) / eval(b, x),
        Node::Pow(a, b) => {
            let (a, b) = (eval(a, x), eval(b, x));
            if b == b.round() && b.abs() <= 64.0 {
                a.powi(b as i32)
            } else {
                a.powf(b)
            }
        }
        Node::Call(f, a) => {
            let a = eval(a, x);
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Log => a.ln(),
                Func::Sqrt => a.sqrt(),
                Func::Sqr => a * a,
                Func::Abs => a.abs(),
            }
        }
    }
}
