//! Source-amplitude expressions `F(x, y, k)`.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;          (* right-associative *)
//! primary = number | name | func "(" expr ")" | "(" expr ")" ;
//! name    = "x" | "y" | "k" | "pi" | "i" ;
//! func    = "sin" | "cos" | "exp" | "expi" | "sqrt" | "abs" ;
//! number  = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`. `expi(t)` is
//! `e^{i t}`.

use std::fmt;

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("division by zero at byte {offset}")]
    DivisionByZero { offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    I,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Expi,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "expi" => Func::Expi,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Expi => "expi",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Exp => z.exp(),
            Func::Expi => (Complex64::i() * z).exp(),
            Func::Sqrt => z.sqrt(),
            Func::Abs => Complex64::new(z.norm(), 0.0),
        }
    }
}

/// Parsed expression tree. `offset` fields point at the operator in the source text.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        offset: usize,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
    },
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => match op {
                BinOp::Add | BinOp::Sub => PREC_ADD,
                BinOp::Mul | BinOp::Div => PREC_MUL,
                BinOp::Pow => PREC_POW,
            },
            Expr::Neg(_) => PREC_NEG,
            _ => PREC_ATOM,
        }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            offset: 0,
        }
    }

    /// Evaluate at `(x, y)` and wavenumber `k`.
    pub fn evaluate(&self, x: f64, y: f64, k: f64) -> Result<Complex64, ExprError> {
        Ok(match self {
            Expr::Num(v) => Complex64::new(*v, 0.0),
            Expr::Var(Var::X) => Complex64::new(x, 0.0),
            Expr::Var(Var::Y) => Complex64::new(y, 0.0),
            Expr::Var(Var::K) => Complex64::new(k, 0.0),
            Expr::Const(Constant::Pi) => Complex64::new(std::f64::consts::PI, 0.0),
            Expr::Const(Constant::I) => Complex64::i(),
            // 0 - z keeps a zero imaginary part positive, so sqrt(-4) = 2i
            Expr::Neg(e) => Complex64::new(0.0, 0.0) - e.evaluate(x, y, k)?,
            Expr::Call { func, arg } => func.apply(arg.evaluate(x, y, k)?),
            Expr::Binary {
                op,
                lhs,
                rhs,
                offset,
            } => {
                let a = lhs.evaluate(x, y, k)?;
                let b = rhs.evaluate(x, y, k)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == Complex64::new(0.0, 0.0) {
                            return Err(ExprError::DivisionByZero { offset: *offset });
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b, *offset)?,
                }
            }
        })
    }

    /// Whether the expression mentions the wavenumber `k`.
    pub fn depends_on_k(&self) -> bool {
        match self {
            Expr::Var(v) => *v == Var::K,
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Neg(e) | Expr::Call { arg: e, .. } => e.depends_on_k(),
            Expr::Binary { lhs, rhs, .. } => lhs.depends_on_k() || rhs.depends_on_k(),
        }
    }

    /// Fully parenthesized prefix form, e.g. `(+ x 1)`; for structural checks.
    pub fn to_sexpr(&self) -> String {
        match self {
            Expr::Num(v) => format!("{v}"),
            Expr::Var(v) => match v {
                Var::X => "x",
                Var::Y => "y",
                Var::K => "k",
            }
            .to_string(),
            Expr::Const(Constant::Pi) => "pi".into(),
            Expr::Const(Constant::I) => "i".into(),
            Expr::Neg(e) => format!("(neg {})", e.to_sexpr()),
            Expr::Call { func, arg } => format!("({} {})", func.name(), arg.to_sexpr()),
            Expr::Binary { op, lhs, rhs, .. } => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                format!("({sym} {} {})", lhs.to_sexpr(), rhs.to_sexpr())
            }
        }
    }
}

fn power(base: Complex64, exponent: Complex64, offset: usize) -> Result<Complex64, ExprError> {
    let is_zero = base == Complex64::new(0.0, 0.0);
    if exponent.im == 0.0 && exponent.re.fract() == 0.0 && exponent.re.abs() <= 64.0 {
        let n = exponent.re as i32;
        if n < 0 && is_zero {
            return Err(ExprError::DivisionByZero { offset });
        }
        return Ok(base.powi(n));
    }
    if is_zero {
        if exponent.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(ExprError::DivisionByZero { offset });
    }
    Ok(base.powc(exponent))
}

impl fmt::Display for Expr {
    /// Minimal-parenthesis infix form that parses back to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool| {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(_) | Expr::Const(_) => f.write_str(&self.to_sexpr()),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, e.precedence() < PREC_NEG)
            }
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
            Expr::Binary { op, lhs, rhs, .. } => {
                let p = self.precedence();
                let (lp, rp, sym) = match op {
                    BinOp::Add => (lhs.precedence() < p, rhs.precedence() <= p, " + "),
                    BinOp::Sub => (lhs.precedence() < p, rhs.precedence() <= p, " - "),
                    BinOp::Mul => (lhs.precedence() < p, rhs.precedence() <= p, " * "),
                    BinOp::Div => (lhs.precedence() < p, rhs.precedence() <= p, " / "),
                    // the base must be atomic; the exponent may be a negation or power
                    BinOp::Pow => (lhs.precedence() <= p, rhs.precedence() < PREC_NEG, "^"),
                };
                wrap(f, lhs, lp)?;
                f.write_str(sym)?;
                wrap(f, rhs, rp)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn describe(tok: Option<&(usize, Token)>) -> String {
    match tok {
        None => "end of input".into(),
        Some((_, t)) => match t {
            Token::Num(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        },
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((start, tok));
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme = &text[start..i];
            let value = lexeme.parse::<f64>().map_err(|_| ExprError::Syntax {
                offset: start,
                expected: format!("a number, found `{lexeme}`"),
            })?;
            out.push((start, Token::Num(value)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(text[start..i].to_string())));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ExprError::Syntax {
                offset: start,
                expected: format!("an operator, number or name, found `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self, expected: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.offset(),
            expected: format!("{expected}, found {}", describe(self.tokens.get(self.pos))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let offset = self.offset();
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                offset,
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            let offset = self.offset();
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                offset,
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek() == Some(&Token::Caret) {
            let offset = self.offset();
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
                offset,
            });
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.peek() == Some(&Token::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("`)`"))
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let simple = match name.as_str() {
                    "x" => Some(Expr::Var(Var::X)),
                    "y" => Some(Expr::Var(Var::Y)),
                    "k" => Some(Expr::Var(Var::K)),
                    "pi" => Some(Expr::Const(Constant::Pi)),
                    "i" => Some(Expr::Const(Constant::I)),
                    _ => None,
                };
                if let Some(e) = simple {
                    return Ok(e);
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ExprError::UnknownIdentifier { offset, name });
                };
                if self.peek() != Some(&Token::LParen) {
                    return Err(self.error(&format!("`(` after function `{name}`")));
                }
                self.pos += 1;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::Call {
                    func,
                    arg: Box::new(arg),
                })
            }
            _ => Err(self.error("a number, name or `(`")),
        }
    }
}

/// Parse an expression; see the module docs for the grammar.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ExprError::Syntax {
            offset: 0,
            expected: "an expression, found end of input".into(),
        });
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

/// Parse then evaluate; convenience for one-off values.
pub fn evaluate(expr: &Expr, x: f64, y: f64, k: f64) -> Result<Complex64, ExprError> {
    expr.evaluate(x, y, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn eval(text: &str, x: f64, y: f64, k: f64) -> Complex64 {
        parse(text).unwrap().evaluate(x, y, k).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("x^2-y^2+5").unwrap().to_sexpr(),
            "(+ (- (^ x 2) (^ y 2)) 5)"
        );
        assert_eq!(parse("2^3^2").unwrap().to_sexpr(), "(^ 2 (^ 3 2))");
        assert_eq!(parse("-x^2").unwrap().to_sexpr(), "(neg (^ x 2))");
        assert_eq!(parse("1-2-3").unwrap().to_sexpr(), "(- (- 1 2) 3)");
        assert_eq!(parse("2*-x").unwrap().to_sexpr(), "(* 2 (neg x))");
        assert_eq!(parse("2^-1").unwrap().to_sexpr(), "(^ 2 (neg 1))");
        assert_eq!(parse(" ( x ) *\ty ").unwrap().to_sexpr(), "(* x y)");
        assert_eq!(eval("2^3^2", 0.0, 0.0, 0.0).re, 512.0);
        assert_eq!(eval("-2^2", 0.0, 0.0, 0.0).re, -4.0);
    }

    #[test]
    fn numbers() {
        assert_eq!(eval("1.5e2", 0.0, 0.0, 0.0).re, 150.0);
        assert_eq!(eval("2.5E-1", 0.0, 0.0, 0.0).re, 0.25);
        assert_eq!(eval(".5", 0.0, 0.0, 0.0).re, 0.5);
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(eval("x^2-y^2+5", 1.0, 2.0, 7.0), Complex64::new(2.0, 0.0));
        assert_eq!(
            eval("k^2*(x^2-y^2+5)", 1.0, 0.0, 2.0),
            Complex64::new(24.0, 0.0)
        );
        let z = eval("expi(k*(x*cos(3*pi/2)+y*sin(3*pi/2)))", 0.0, 1.0, PI);
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((eval("sqrt(-4)", 0.0, 0.0, 0.0) - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(eval("abs(3*i-4)", 0.0, 0.0, 0.0), Complex64::new(5.0, 0.0));
        assert!((eval("exp(i*pi)", 0.0, 0.0, 0.0) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("x + * 2") {
            Err(ExprError::Syntax { offset, expected }) => {
                assert_eq!(offset, 4);
                assert!(expected.contains("`*`"), "{expected}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("(x + 1"),
            Err(ExprError::Syntax { offset: 6, .. })
        ));
        assert!(matches!(
            parse("x y"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse(""),
            Err(ExprError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse("2 $ 3"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse("sin x"),
            Err(ExprError::Syntax { offset: 4, .. })
        ));
        assert_eq!(
            parse("3*foo"),
            Err(ExprError::UnknownIdentifier {
                offset: 2,
                name: "foo".into()
            })
        );
    }

    #[test]
    fn division_by_zero_reports_location() {
        let e = parse("1 + x/(y-1)").unwrap();
        assert_eq!(
            e.evaluate(1.0, 1.0, 0.0),
            Err(ExprError::DivisionByZero { offset: 5 })
        );
        assert!(e.evaluate(1.0, 2.0, 0.0).is_ok());
        let e = parse("x^-1").unwrap();
        assert_eq!(
            e.evaluate(0.0, 0.0, 0.0),
            Err(ExprError::DivisionByZero { offset: 1 })
        );
    }

    #[test]
    fn depends_on_k() {
        assert!(!parse("x^2-y^2+5").unwrap().depends_on_k());
        assert!(parse("k^2*(x^2-y^2+5)").unwrap().depends_on_k());
    }

    #[test]
    fn print_parse_fixed_point() {
        for text in [
            "x^2-y^2+5",
            "-x^2",
            "(-x)^2",
            "2^3^2",
            "(2^3)^2",
            "1-(2-3)",
            "1/(2*3)",
            "x^-y^2",
            "--x",
            "expi(k*(x*cos(3*pi/2)+y*sin(3*pi/2)))*(x^2-y^2+5)",
            "1e-7^2",
        ] {
            let e = parse(text).unwrap();
            let printed = e.to_string();
            let again = parse(&printed).unwrap();
            assert_eq!(again.to_sexpr(), e.to_sexpr(), "{text} -> {printed}");
            assert_eq!(again.to_string(), printed);
        }
    }

    fn ast_strategy() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..50).prop_map(|n| Expr::Num(f64::from(n) / 4.0)),
            Just(Expr::Var(Var::X)),
            Just(Expr::Var(Var::Y)),
            Just(Expr::Var(Var::K)),
            Just(Expr::Const(Constant::Pi)),
            Just(Expr::Const(Constant::I)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    prop_oneof![
                        Just(Func::Sin),
                        Just(Func::Cos),
                        Just(Func::Exp),
                        Just(Func::Expi),
                        Just(Func::Sqrt),
                        Just(Func::Abs)
                    ],
                    inner.clone()
                )
                    .prop_map(|(func, arg)| Expr::Call {
                        func,
                        arg: Box::new(arg)
                    }),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            ]
        })
    }

    fn same(a: Result<Complex64, ExprError>, b: Result<Complex64, ExprError>) -> bool {
        match (a, b) {
            (Ok(a), Ok(b)) => {
                (a.re.to_bits() == b.re.to_bits() || (a.re.is_nan() && b.re.is_nan()))
                    && (a.im.to_bits() == b.im.to_bits() || (a.im.is_nan() && b.im.is_nan()))
            }
            (Err(ExprError::DivisionByZero { .. }), Err(ExprError::DivisionByZero { .. })) => true,
            _ => false,
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn printed_ast_reparses_to_same_tree(ast in ast_strategy()) {
            let printed = ast.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(reparsed.to_sexpr(), ast.to_sexpr());
            prop_assert_eq!(reparsed.to_string(), printed);
        }

        #[test]
        fn binary_evaluation_is_homomorphic(
            a in ast_strategy(),
            b in ast_strategy(),
            op in prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)],
            x in -2.0f64..2.0, y in -2.0f64..2.0, k in 0.0f64..20.0,
        ) {
            let combined = Expr::binary(op, a.clone(), b.clone());
            let reparsed = parse(&combined.to_string()).unwrap();
            let lhs = reparsed.evaluate(x, y, k);
            let (va, vb) = (
                parse(&a.to_string()).unwrap().evaluate(x, y, k),
                parse(&b.to_string()).unwrap().evaluate(x, y, k),
            );
            let rhs = match (va, vb) {
                (Ok(va), Ok(vb)) => match op {
                    BinOp::Add => Ok(va + vb),
                    BinOp::Sub => Ok(va - vb),
                    BinOp::Mul => Ok(va * vb),
                    BinOp::Div if vb == Complex64::new(0.0, 0.0) => Err(ExprError::DivisionByZero { offset: 0 }),
                    BinOp::Div => Ok(va / vb),
                    BinOp::Pow => power(va, vb, 0),
                },
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            prop_assert!(same(lhs.clone(), rhs.clone()), "{} : {:?} vs {:?}", combined, lhs, rhs);
            // determinism
            prop_assert!(same(lhs, reparsed.evaluate(x, y, k)));
        }

        #[test]
        fn expi_has_unit_modulus(t in -1e3f64..1e3) {
            let v = parse("expi(x)").unwrap().evaluate(t, 0.0, 0.0).unwrap();
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}
