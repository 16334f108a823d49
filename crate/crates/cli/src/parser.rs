//! Polynomial text grammar:
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' positive-integer]
//! atom   := integer ['/' integer] | variable | '(' expr ')'
//! ```
//!
//! Membership elements are `expr [ '/' 'f' ['^' k] ]`, where `f` stands for the
//! analyzed polynomial and may also appear inside `expr`.

use std::collections::HashSet;
use std::sync::Arc;

use dlength_core::polyalg::{Monomial, Polynomial, TermOrder};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { position: usize, name: String },
    #[error("exponent at position {position} must be a positive integer")]
    BadExponent { position: usize },
    #[error("division by zero at position {position}")]
    ZeroDenominator { position: usize },
    #[error("invalid variable list: {0}")]
    Variables(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Number(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Token::Number(digits.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let name: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Token::Ident(name)));
        } else {
            return Err(ParseError::Syntax {
                position: pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

/// Checks that names are nonempty, distinct identifiers.
pub fn validate_variables<S: AsRef<str>>(variables: &[S]) -> Result<(), ParseError> {
    if variables.is_empty() {
        return Err(ParseError::Variables("no variables declared".into()));
    }
    let mut seen = HashSet::new();
    for v in variables {
        let v = v.as_ref();
        let mut chars = v.chars();
        let valid = chars
            .next()
            .is_some_and(|c| c.is_alphabetic() || c == '_')
            && chars.all(|c| c.is_alphanumeric() || c == '_');
        if !valid {
            return Err(ParseError::Variables(format!("`{v}` is not an identifier")));
        }
        if !seen.insert(v) {
            return Err(ParseError::Variables(format!("`{v}` declared twice")));
        }
    }
    Ok(())
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
    variables: &'a [String],
    order: Arc<TermOrder>,
    // substitution for the token `f` in membership elements
    f: Option<&'a Polynomial>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens[..self.end].get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end_position(), |(p, _)| *p)
    }

    fn end_position(&self) -> usize {
        self.tokens.get(self.end).map_or_else(
            || self.tokens.last().map_or(0, |(p, _)| p + 1),
            |(p, _)| *p,
        )
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            position: if self.pos < self.end {
                self.position()
            } else {
                self.end_position()
            },
            message: message.into(),
        }
    }

    fn zero(&self) -> Polynomial {
        Polynomial::zero_with_order(self.order.clone())
    }

    fn constant(&self, c: BigRational) -> Polynomial {
        Polynomial::monomial(self.variables.len(), Monomial::one(self.variables.len()), c)
            .with_order(&self.order)
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.zero();
        let mut negate = false;
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            negate = true;
        }
        loop {
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(Token::Plus) => negate = false,
                Some(Token::Minus) => negate = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let position = self.position();
        match self.peek() {
            Some(Token::Number(e)) if !e.is_zero() => {
                let e: u32 = e
                    .try_into()
                    .map_err(|_| ParseError::BadExponent { position })?;
                self.pos += 1;
                Ok(base.pow(e))
            }
            _ => Err(ParseError::BadExponent { position }),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let position = self.position();
        match self.peek() {
            Some(Token::Number(a)) => {
                self.pos += 1;
                let mut value = BigRational::from_integer(a.clone());
                if self.peek() == Some(&Token::Slash) {
                    if let Some(Token::Number(b)) = self.tokens[..self.end].get(self.pos + 1).map(|(_, t)| t) {
                        if b.is_zero() {
                            return Err(ParseError::ZeroDenominator {
                                position: self.tokens[self.pos + 1].0,
                            });
                        }
                        value /= BigRational::from_integer(b.clone());
                        self.pos += 2;
                    }
                }
                Ok(self.constant(value))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.variables.iter().position(|v| v == name) {
                    let n = self.variables.len();
                    return Ok(Polynomial::monomial(n, Monomial::var(n, i), BigRational::one())
                        .with_order(&self.order));
                }
                match (name.as_str(), self.f) {
                    ("f", Some(f)) => Ok(f.with_order(&self.order)),
                    _ => Err(ParseError::UnknownVariable {
                        position,
                        name: name.clone(),
                    }),
                }
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => Err(self.syntax("expected a number, variable or `(`")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.end {
            return Err(self.syntax("expected an operator"));
        }
        Ok(())
    }
}

fn parse_range(
    tokens: &[(usize, Token)],
    end: usize,
    variables: &[String],
    f: Option<&Polynomial>,
) -> Result<Polynomial, ParseError> {
    let mut p = Parser {
        tokens,
        pos: 0,
        end,
        variables,
        order: Arc::new(TermOrder::graded_revlex(variables.len())),
        f,
    };
    let result = p.expr()?;
    p.finish()?;
    Ok(result)
}

pub fn parse_polynomial<S: AsRef<str>>(text: &str, variables: &[S]) -> Result<Polynomial, ParseError> {
    validate_variables(variables)?;
    let variables: Vec<String> = variables.iter().map(|s| s.as_ref().to_string()).collect();
    let tokens = tokenize(text)?;
    parse_range(&tokens, tokens.len(), &variables, None)
}

/// Parses `h/f^k` into `(h, k)`; an element without a trailing `/f` has `k = 0`.
pub fn parse_element<S: AsRef<str>>(
    text: &str,
    variables: &[S],
    f: &Polynomial,
) -> Result<(Polynomial, u32), ParseError> {
    validate_variables(variables)?;
    let variables: Vec<String> = variables.iter().map(|s| s.as_ref().to_string()).collect();
    if variables.iter().any(|v| v == "f") {
        return Err(ParseError::Variables(
            "`f` is reserved for the analyzed polynomial in elements".into(),
        ));
    }
    let tokens = tokenize(text)?;
    let is_f = |i: usize| matches!(tokens.get(i), Some((_, Token::Ident(name))) if name == "f");
    let len = tokens.len();
    let (end, pole) = if len >= 4
        && tokens[len - 4].1 == Token::Slash
        && is_f(len - 3)
        && tokens[len - 2].1 == Token::Caret
    {
        let position = tokens[len - 1].0;
        match &tokens[len - 1].1 {
            Token::Number(k) => (
                len - 4,
                k.try_into().map_err(|_| ParseError::BadExponent { position })?,
            ),
            _ => return Err(ParseError::BadExponent { position }),
        }
    } else if len >= 2 && tokens[len - 2].1 == Token::Slash && is_f(len - 1) {
        (len - 2, 1)
    } else {
        (len, 0)
    };
    let h = parse_range(&tokens, end, &variables, Some(f))?;
    Ok((h, pole))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dlength_core::polyalg::{integer, rational};
    use proptest::prelude::*;

    fn vars() -> Vec<&'static str> {
        vec!["x", "y", "z"]
    }

    fn mono(e: [u32; 3], c: BigRational) -> Polynomial {
        Polynomial::monomial(3, Monomial::new(e.to_vec()), c)
    }

    #[test]
    fn parse_examples() {
        let p = parse_polynomial("x^3 + y^3 + z^3", &vars()).unwrap();
        let expected = &(&mono([3, 0, 0], integer(1)) + &mono([0, 3, 0], integer(1)))
            + &mono([0, 0, 3], integer(1));
        assert_eq!(p, expected);
        let p = parse_polynomial("1/2*x^2 - y", &vars()).unwrap();
        assert_eq!(p, &mono([2, 0, 0], rational(1, 2)) - &mono([0, 1, 0], integer(1)));
        assert!(matches!(
            parse_polynomial("x^(-1)", &vars()),
            Err(ParseError::BadExponent { position: 2 })
        ));
    }

    #[test]
    fn grammar_details() {
        let p = parse_polynomial("-(x + 1)^2 * y", &vars()).unwrap();
        let expected = parse_polynomial("-x^2*y - 2*x*y - y", &vars()).unwrap();
        assert_eq!(p, expected);
        assert_eq!(parse_polynomial("0", &vars()).unwrap(), Polynomial::zero(3));
        assert_eq!(parse_polynomial("6/4", &vars()).unwrap(), Polynomial::constant(3, rational(3, 2)));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_polynomial("x + w", &vars()),
            Err(ParseError::UnknownVariable {
                position: 4,
                name: "w".into()
            })
        );
        assert!(matches!(parse_polynomial("2x", &vars()), Err(ParseError::Syntax { position: 1, .. })));
        assert!(matches!(parse_polynomial("x y", &vars()), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse_polynomial("x +", &vars()), Err(ParseError::Syntax { position: 3, .. })));
        assert!(matches!(parse_polynomial("(x", &vars()), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("x^0", &vars()), Err(ParseError::BadExponent { .. })));
        assert!(matches!(parse_polynomial("x^y", &vars()), Err(ParseError::BadExponent { .. })));
        assert!(matches!(parse_polynomial("x/y", &vars()), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("1/0", &vars()), Err(ParseError::ZeroDenominator { position: 2 })));
        assert!(matches!(parse_polynomial("x $ y", &vars()), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse_polynomial("x", &["x", "x"]), Err(ParseError::Variables(_))));
        assert!(matches!(parse_polynomial("x", &[] as &[&str]), Err(ParseError::Variables(_))));
    }

    #[test]
    fn element_examples() {
        let f = parse_polynomial("x^3 + y^3 + z^3", &vars()).unwrap();
        let (h, k) = parse_element("x*y*z/f^2", &vars(), &f).unwrap();
        assert_eq!((h, k), (mono([1, 1, 1], integer(1)), 2));
        let (h, k) = parse_element("1/f", &vars(), &f).unwrap();
        assert_eq!((h, k), (Polynomial::one(3), 1));
        let (h, k) = parse_element("x^2", &vars(), &f).unwrap();
        assert_eq!((h, k), (mono([2, 0, 0], integer(1)), 0));
        let (h, k) = parse_element("(x + f)/f^3", &vars(), &f).unwrap();
        assert_eq!((h, k), (&mono([1, 0, 0], integer(1)) + &f, 3));
        assert!(parse_element("x/f^0", &vars(), &f).is_ok());
        assert!(matches!(parse_element("x/f^y", &vars(), &f), Err(ParseError::BadExponent { .. })));
        assert!(parse_element("x/f", &["x", "f"], &f).is_err());
    }

    fn arb_polynomial() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(
            (prop::collection::vec(0u32..4, 3), -20i64..20, 1i64..6),
            0..6,
        )
        .prop_map(|terms| {
            let mut p = Polynomial::zero(3);
            for (e, n, d) in terms {
                p = &p + &Polynomial::monomial(3, Monomial::new(e), rational(n, d));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn render_round_trips(p in arb_polynomial()) {
            let text = p.render(&vars());
            prop_assert_eq!(parse_polynomial(&text, &vars()).unwrap(), p);
        }
    }
}
