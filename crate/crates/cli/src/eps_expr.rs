//! Threshold mini-language: polynomial expressions in the map parameter.
//!
//! Grammar: `expr := ['-'] term (('+'|'-') term)*`,
//! `term := factor ('*' factor)*`, `factor := atom ('^' uint)?`,
//! `atom := number | 'a' | '(' expr ')'`.
//! Numbers are integers, exact decimals, or fractions `p/q`. Everything is
//! evaluated exactly; the result is a rational-coefficient polynomial in
//! `a` = alpha.

use detcorr::{Alpha, Rat};
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use std::fmt;

/// Rational-coefficient polynomial in alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsExpr {
    coeffs: Vec<Rat>,
}

impl EpsExpr {
    pub fn parse(input: &str) -> Result<EpsExpr, String> {
        let mut p = Parser {
            tokens: tokenize(input)?,
            pos: 0,
        };
        let coeffs = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(format!("trailing input at token {}", p.pos));
        }
        Ok(EpsExpr {
            coeffs: trim(coeffs),
        })
    }

    /// Exact value at the given alpha.
    pub fn eval(&self, alpha: &Alpha) -> Rat {
        let a = alpha.to_rat();
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &a + c;
        }
        acc
    }

    /// Canonical printed form, lowest power first.
    pub fn canonical(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rat::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let is_one = mag.is_one();
            if j == 0 || !is_one {
                out.push_str(&fmt_rat(&mag));
                if j > 0 {
                    out.push('*');
                }
            }
            if j == 1 {
                out.push('a');
            } else if j > 1 {
                out.push_str(&format!("a^{j}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for EpsExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Alpha,
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            'a' => {
                out.push(Tok::Alpha);
                i += 1;
            }
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                let mut seen_dot = false;
                let mut seen_slash = false;
                while i < bytes.len() {
                    match bytes[i] as char {
                        '0'..='9' => i += 1,
                        '.' if !seen_dot && !seen_slash => {
                            seen_dot = true;
                            i += 1;
                        }
                        '/' if !seen_slash && !seen_dot => {
                            seen_slash = true;
                            i += 1;
                        }
                        _ => break,
                    }
                }
                out.push(Tok::Num(parse_number(&s[start..i])?));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

fn parse_number(text: &str) -> Result<Rat, String> {
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p
            .parse()
            .map_err(|_| format!("bad numerator in `{text}`"))?;
        let q: BigInt = q
            .parse()
            .map_err(|_| format!("bad denominator in `{text}`"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{text}`"));
        }
        return Ok(Ratio::new(p, q));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() {
            return Err(format!("bad number `{text}`"));
        }
        let int: BigInt = if int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| format!("bad number `{text}`"))?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| format!("bad number `{text}`"))?;
        return Ok(Ratio::new(int * &scale + frac, scale));
    }
    let n: BigInt = text.parse().map_err(|_| format!("bad number `{text}`"))?;
    Ok(Ratio::from_integer(n))
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

type Poly = Vec<Rat>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_add(a: &Poly, b: &Poly, sub: bool) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (j, c) in out.iter_mut().enumerate() {
        let x = a.get(j).cloned().unwrap_or_else(Rat::zero);
        let y = b.get(j).cloned().unwrap_or_else(Rat::zero);
        *c = if sub { x - y } else { x + y };
    }
    trim(out)
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Poly, String> {
        let mut neg = false;
        if self.peek() == Some(&Tok::Minus) {
            self.eat();
            neg = true;
        }
        let mut acc = self.term()?;
        if neg {
            acc = poly_add(&Vec::new(), &acc, true);
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.eat();
                    let t = self.term()?;
                    acc = poly_add(&acc, &t, false);
                }
                Some(Tok::Minus) => {
                    self.eat();
                    let t = self.term()?;
                    acc = poly_add(&acc, &t, true);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, String> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.eat();
            let f = self.factor()?;
            acc = poly_mul(&acc, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, String> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.eat();
            match self.eat() {
                Some(Tok::Num(n)) if n.denom().is_one() && n >= Rat::zero() => {
                    let e: u32 = n
                        .numer()
                        .try_into()
                        .map_err(|_| "exponent too large".to_string())?;
                    let mut acc = vec![Rat::one()];
                    for _ in 0..e {
                        acc = poly_mul(&acc, &base);
                    }
                    return Ok(acc);
                }
                _ => return Err("exponent must be a nonnegative integer".to_string()),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, String> {
        match self.eat() {
            Some(Tok::Num(n)) => Ok(trim(vec![n])),
            Some(Tok::Alpha) => Ok(vec![Rat::zero(), Rat::one()]),
            Some(Tok::Open) => {
                let inner = self.expr()?;
                if self.eat() != Some(Tok::Close) {
                    return Err("missing closing parenthesis".to_string());
                }
                Ok(inner)
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }
}
