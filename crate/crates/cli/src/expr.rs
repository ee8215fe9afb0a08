//! A small arithmetic language for coefficient callbacks.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := ("-" | "+") unary | power
//! power := atom ("^" unary)?
//! atom  := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. Names: `x y z eta p1 p2 p3 pi`. Functions: `sin cos exp
//! abs min max`.

use std::fmt;
use std::str::FromStr;

use dmpfem::mesh::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Z,
    Eta,
    P1,
    P2,
    P3,
}

impl Var {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "x" => Var::X,
            "y" => Var::Y,
            "z" => Var::Z,
            "eta" => Var::Eta,
            "p1" => Var::P1,
            "p2" => Var::P2,
            "p3" => Var::P3,
            _ => return None,
        })
    }

    /// Depends on the position `x`.
    pub fn is_spatial(self) -> bool {
        matches!(self, Var::X | Var::Y | Var::Z)
    }

    /// Depends on the frozen state `(η, p)`.
    pub fn is_state(self) -> bool {
        !self.is_spatial()
    }

    /// Only meaningful in three dimensions.
    pub fn is_3d_only(self) -> bool {
        matches!(self, Var::Z | Var::P3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Min,
    Max,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    /// `(min, max)` argument counts.
    fn arity(self) -> (usize, usize) {
        match self {
            Func::Min | Func::Max => (2, usize::MAX),
            _ => (1, 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(source)?;
        let mut parser = Parser { tokens, pos: 0, len: source.len() };
        let root = parser.expr()?;
        if let Some(t) = parser.peek() {
            return Err(ParseError { position: t.offset, message: format!("unexpected `{}`", t.kind) });
        }
        Ok(Expr { source: source.to_string(), root })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: &Point, eta: f64, p: &Point) -> f64 {
        eval(&self.root, x, eta, p)
    }

    pub fn eval_x(&self, x: &Point) -> f64 {
        self.eval(x, 0.0, &[0.0; 3])
    }

    pub fn uses(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        uses(&self.root, pred)
    }

    /// The value of an expression without variables.
    pub fn constant_value(&self) -> Option<f64> {
        (!self.uses(|_| true)).then(|| self.eval(&[0.0; 3], 0.0, &[0.0; 3]))
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        Expr::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn eval(node: &Node, x: &Point, eta: f64, p: &Point) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Var(v) => match v {
            Var::X => x[0],
            Var::Y => x[1],
            Var::Z => x[2],
            Var::Eta => eta,
            Var::P1 => p[0],
            Var::P2 => p[1],
            Var::P3 => p[2],
        },
        Node::Neg(a) => -eval(a, x, eta, p),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, x, eta, p), eval(b, x, eta, p));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => pow(a, b),
            }
        }
        Node::Call(func, args) => {
            let mut vals = args.iter().map(|a| eval(a, x, eta, p));
            match func {
                Func::Sin => vals.next().unwrap_or(f64::NAN).sin(),
                Func::Cos => vals.next().unwrap_or(f64::NAN).cos(),
                Func::Exp => vals.next().unwrap_or(f64::NAN).exp(),
                Func::Abs => vals.next().unwrap_or(f64::NAN).abs(),
                Func::Min => vals.fold(f64::INFINITY, f64::min),
                Func::Max => vals.fold(f64::NEG_INFINITY, f64::max),
            }
        }
    }
}

/// Integer exponents use repeated multiplication so `x^2` is exactly `x*x`.
fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= 64.0 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

fn uses(node: &Node, pred: impl Fn(Var) -> bool + Copy) -> bool {
    match node {
        Node::Num(_) => false,
        Node::Var(v) => pred(*v),
        Node::Neg(a) => uses(a, pred),
        Node::Bin(_, a, b) => uses(a, pred) || uses(b, pred),
        Node::Call(_, args) => args.iter().any(|a| uses(a, pred)),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Num(f64),
    Name(String),
    Sym(char),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Num(v) => write!(f, "{v}"),
            TokenKind::Name(n) => f.write_str(n),
            TokenKind::Sym(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(offset, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
        } else if ch.is_ascii_digit() || ch == '.' {
            let mut end = offset;
            let mut prev = ' ';
            while let Some(&(i, c)) = chars.peek() {
                let exponent_sign = (c == '+' || c == '-') && (prev == 'e' || prev == 'E');
                if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exponent_sign {
                    end = i + c.len_utf8();
                    prev = c;
                    chars.next();
                } else {
                    break;
                }
            }
            let text = &src[offset..end];
            let value = text
                .parse::<f64>()
                .map_err(|_| ParseError { position: offset, message: format!("malformed number `{text}`") })?;
            out.push(Token { kind: TokenKind::Num(value), offset });
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let mut end = offset;
            while let Some(&(i, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = i + 1;
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token { kind: TokenKind::Name(src[offset..end].to_string()), offset });
        } else {
            let sym = match ch {
                '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => ch,
                '−' => '-',
                '×' => '*',
                '÷' => '/',
                _ => return Err(ParseError { position: offset, message: format!("unexpected character `{ch}`") }),
            };
            chars.next();
            out.push(Token { kind: TokenKind::Sym(sym), offset });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_sym(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokenKind::Sym(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.len, |t| t.offset)
    }

    fn expect(&mut self, sym: char) -> Result<(), ParseError> {
        if self.peek_sym() == Some(sym) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError { position: self.offset(), message: format!("expected `{sym}`") })
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek_sym() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek_sym() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let Some(token) = self.peek().cloned() else {
            return Err(ParseError { position: self.len, message: "unexpected end of input".into() });
        };
        self.pos += 1;
        match token.kind {
            TokenKind::Num(v) => Ok(Node::Num(v)),
            TokenKind::Sym('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            TokenKind::Name(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect('(')?;
                    let mut args = vec![self.expr()?];
                    while self.peek_sym() == Some(',') {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    let (lo, hi) = func.arity();
                    if args.len() < lo || args.len() > hi {
                        return Err(ParseError {
                            position: token.offset,
                            message: format!(
                                "`{name}` takes {} argument(s), got {}",
                                if lo == hi { lo.to_string() } else { format!("at least {lo}") },
                                args.len()
                            ),
                        });
                    }
                    Ok(Node::Call(func, args))
                } else if let Some(var) = Var::from_name(&name) {
                    Ok(Node::Var(var))
                } else if name == "pi" {
                    Ok(Node::Num(std::f64::consts::PI))
                } else {
                    Err(ParseError { position: token.offset, message: format!("unknown name `{name}`") })
                }
            }
            TokenKind::Sym(c) => Err(ParseError { position: token.offset, message: format!("unexpected `{c}`") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at(src: &str, x: [f64; 3], eta: f64, p: [f64; 3]) -> f64 {
        Expr::parse(src).unwrap().eval(&x, eta, &p)
    }

    fn num(src: &str) -> f64 {
        Expr::parse(src).unwrap().constant_value().unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(num("1 + 2 * 3"), 7.0);
        assert_eq!(num("(1 + 2) * 3"), 9.0);
        assert_eq!(num("2 ^ 3 ^ 2"), 512.0);
        assert_eq!(num("-2 ^ 2"), -4.0);
        assert_eq!(num("2 ^ -1"), 0.5);
        assert_eq!(num("8 / 4 / 2"), 1.0);
        assert_eq!(num("1 - 2 - 3"), -4.0);
        assert_eq!(num("3 × 2 − 1 ÷ 2"), 5.5);
        assert_eq!(num("1.5e2 + 2E-1"), 150.2);
    }

    #[test]
    fn functions_and_names() {
        assert_eq!(num("min(3, 1, 2) + max(-1, -4)"), 0.0);
        assert_eq!(num("abs(-2.5)"), 2.5);
        assert_eq!(num("exp(0) + cos(0) + sin(0)"), 2.0);
        assert!((num("sin(pi / 2)") - 1.0).abs() < 1e-15);
        let v = at("x + 10*y + 100*z + eta*p1 - p2*p3", [1.0, 2.0, 3.0], 4.0, [5.0, 6.0, 7.0]);
        assert_eq!(v, 1.0 + 20.0 + 300.0 + 20.0 - 42.0);
    }

    #[test]
    fn dependency_queries() {
        let e = Expr::parse("1 + eta^2 / (1 + eta^2)").unwrap();
        assert!(e.uses(Var::is_state));
        assert!(!e.uses(Var::is_spatial));
        assert_eq!(e.constant_value(), None);
        assert!(Expr::parse("x + p3").unwrap().uses(Var::is_3d_only));
        assert_eq!(Expr::parse("-1").unwrap().constant_value(), Some(-1.0));
    }

    #[test]
    fn errors_carry_positions() {
        let cases = [
            ("", 0),
            ("1 +", 3),
            ("(1 + 2", 6),
            ("foo(1)", 0),
            ("sin(1, 2)", 0),
            ("min(1)", 0),
            ("1 $ 2", 2),
            ("1 2", 2),
            ("1..2", 0),
        ];
        for (src, pos) in cases {
            let err = Expr::parse(src).unwrap_err();
            assert_eq!(err.position, pos, "{src}: {err}");
        }
    }

    proptest! {
        #[test]
        fn affine_forms_match_native(a in -1e3..1e3f64, b in -1e3..1e3f64, x in -10.0..10.0f64, y in -10.0..10.0f64) {
            let src = format!("{a} * x + {b} * y - ({a})");
            let v = at(&src, [x, y, 0.0], 0.0, [0.0; 3]);
            prop_assert_eq!(v, a * x + b * y - a);
        }

        #[test]
        fn integer_powers_are_products(x in -100.0..100.0f64) {
            prop_assert_eq!(at("x^2", [x, 0.0, 0.0], 0.0, [0.0; 3]), x * x);
            prop_assert_eq!(at("x^3", [x, 0.0, 0.0], 0.0, [0.0; 3]), x * x * x);
        }
    }
}
