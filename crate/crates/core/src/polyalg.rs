//! Exact multivariate polynomials over the rationals, weighted gradings and
//! the weighted graded reverse-lexicographic term order.
//!
//! A [`Polynomial`] carries the [`TermOrder`] its terms are sorted by. Terms are
//! kept in ascending order so the leading term is the last element and can be
//! popped in constant time by division loops.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Coeff = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable count mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("weights must be positive rationals, got {0}")]
    NonPositiveWeight(String),
    #[error("weight denominators too large to scale")]
    WeightOverflow,
    #[error("polynomial is not weighted-homogeneous")]
    NotHomogeneous,
}

/// Exponent vector of a monomial `x^β`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// True when `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self / other`, if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Renders the monomial with the given variable names, `1` for the unit.
    pub fn render<S: AsRef<str>>(&self, names: &[S]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = names[i].as_ref();
                if e == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Positive rational weights `w` defining the grading `deg_w(x^β) = Σ w_i β_i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightVector {
    weights: Vec<BigRational>,
    // weights scaled by `scale` to integers, for fast comparisons
    scaled: Vec<u128>,
    scale: u128,
}

impl WeightVector {
    pub fn new(weights: Vec<BigRational>) -> Result<Self, PolyError> {
        if let Some(bad) = weights.iter().find(|w| !w.is_positive()) {
            return Err(PolyError::NonPositiveWeight(bad.to_string()));
        }
        let scale = weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let scaled = weights
            .iter()
            .map(|w| (w.numer() * (&scale / w.denom())).to_u128())
            .collect::<Option<Vec<_>>>()
            .ok_or(PolyError::WeightOverflow)?;
        let scale = scale.to_u128().ok_or(PolyError::WeightOverflow)?;
        Ok(WeightVector {
            weights,
            scaled,
            scale,
        })
    }

    pub fn uniform(nvars: usize) -> Self {
        WeightVector::new(vec![BigRational::one(); nvars]).expect("unit weights are positive")
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> BigRational {
        self.weights.iter().fold(BigRational::zero(), |acc, w| acc + w)
    }

    /// `Σ w_i m_i`.
    pub fn degree(&self, m: &Monomial) -> Result<BigRational, PolyError> {
        if m.nvars() != self.len() {
            return Err(PolyError::ArityMismatch {
                left: m.nvars(),
                right: self.len(),
            });
        }
        Ok(self.degree_unchecked(m))
    }

    pub(crate) fn degree_unchecked(&self, m: &Monomial) -> BigRational {
        BigRational::new(
            BigInt::from(self.scaled_degree(m)),
            BigInt::from(self.scale),
        )
    }

    pub(crate) fn scaled_degree(&self, m: &Monomial) -> u128 {
        self.scaled
            .iter()
            .zip(m.exponents())
            .map(|(w, &e)| w * e as u128)
            .sum()
    }

    /// All monomials of weighted degree exactly `degree`, in ascending lexicographic order
    /// of exponent vectors. Empty when no monomial has that degree.
    pub fn monomials_of_degree(&self, degree: &BigRational) -> Vec<Monomial> {
        if degree.is_negative() {
            return Vec::new();
        }
        let target = degree * BigRational::from_integer(BigInt::from(self.scale));
        if !target.is_integer() {
            return Vec::new();
        }
        let Some(target) = target.to_integer().to_u128() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut current = vec![0u32; self.len()];
        enumerate_weighted(&self.scaled, 0, target, &mut current, &mut out);
        out.sort();
        out
    }

    pub fn render(&self) -> Vec<String> {
        self.weights.iter().map(|w| w.to_string()).collect()
    }
}

fn enumerate_weighted(
    scaled: &[u128],
    index: usize,
    remaining: u128,
    current: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if index + 1 == scaled.len() {
        if remaining.is_multiple_of(scaled[index]) {
            current[index] = (remaining / scaled[index]) as u32;
            out.push(Monomial(current.clone()));
            current[index] = 0;
        }
        return;
    }
    let max = remaining / scaled[index];
    for e in 0..=max {
        current[index] = e as u32;
        enumerate_weighted(scaled, index + 1, remaining - e * scaled[index], current, out);
    }
    current[index] = 0;
}

/// Weighted graded reverse-lexicographic order: compare weighted degree first, then
/// break ties reverse-lexicographically with precedence `x_1 > x_2 > … > x_n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TermOrder {
    weights: WeightVector,
}

impl TermOrder {
    /// Standard graded reverse-lexicographic order (all weights 1).
    pub fn graded_revlex(nvars: usize) -> Self {
        TermOrder {
            weights: WeightVector::uniform(nvars),
        }
    }

    pub fn weighted(weights: WeightVector) -> Self {
        TermOrder { weights }
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.weights
            .scaled_degree(a)
            .cmp(&self.weights.scaled_degree(b))
            .then_with(|| {
                for i in (0..a.nvars()).rev() {
                    let (ea, eb) = (a.exponents()[i], b.exponents()[i]);
                    if ea != eb {
                        return eb.cmp(&ea);
                    }
                }
                Ordering::Equal
            })
    }

    /// Human-readable declaration of the order and its tie-break, used in reports.
    pub fn describe<S: AsRef<str>>(&self, names: &[S]) -> String {
        let precedence: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        format!(
            "weighted-grevlex w=({}) tie-break revlex {}",
            self.weights.render().join(","),
            precedence.join(">")
        )
    }
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Clone, Debug)]
pub struct Polynomial {
    nvars: usize,
    order: Arc<TermOrder>,
    // strictly ascending in `order`, no zero coefficients
    terms: Vec<(Monomial, Coeff)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self::zero_with_order(Arc::new(TermOrder::graded_revlex(nvars)))
    }

    pub fn zero_with_order(order: Arc<TermOrder>) -> Self {
        Polynomial {
            nvars: order.nvars(),
            order,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: Coeff) -> Self {
        Self::monomial(nvars, Monomial::one(nvars), c)
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Coeff) -> Self {
        let mut p = Self::zero(nvars);
        assert_eq!(m.nvars(), nvars, "monomial arity");
        if !c.is_zero() {
            p.terms.push((m, c));
        }
        p
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        Self::monomial(nvars, Monomial::var(nvars, index), BigRational::one())
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(order: Arc<TermOrder>, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let nvars = order.nvars();
        let mut acc: HashMap<Monomial, Coeff> = HashMap::new();
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(PolyError::ArityMismatch {
                    left: m.nvars(),
                    right: nvars,
                });
            }
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
        Ok(Self::from_map(order, acc))
    }

    fn from_map(order: Arc<TermOrder>, map: HashMap<Monomial, Coeff>) -> Self {
        let mut terms: Vec<(Monomial, Coeff)> =
            map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| order.cmp(&a.0, &b.0));
        Polynomial {
            nvars: order.nvars(),
            order,
            terms,
        }
    }

    /// Same polynomial, terms re-sorted by another order.
    pub fn with_order(&self, order: &Arc<TermOrder>) -> Polynomial {
        assert_eq!(order.nvars(), self.nvars, "order arity");
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| order.cmp(&a.0, &b.0));
        Polynomial {
            nvars: self.nvars,
            order: order.clone(),
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> &Arc<TermOrder> {
        &self.order
    }

    /// Terms in ascending term order.
    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.last().map(|(m, c)| (m, c))
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.last().map(|(m, _)| m)
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        match self
            .terms
            .binary_search_by(|(t, _)| self.order.cmp(t, m))
        {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn constant_term(&self) -> Coeff {
        self.coefficient(&Monomial::one(self.nvars))
    }

    fn check_arity(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::ArityMismatch {
                left: self.nvars,
                right: other.nvars,
            })
        } else {
            Ok(())
        }
    }

    fn aligned<'a>(&self, other: &'a Polynomial) -> std::borrow::Cow<'a, Polynomial> {
        if Arc::ptr_eq(&self.order, &other.order) || self.order == other.order {
            std::borrow::Cow::Borrowed(other)
        } else {
            std::borrow::Cow::Owned(other.with_order(&self.order))
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_arity(other)?;
        let other = self.aligned(other);
        Ok(self.merge(&other.terms, false))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_arity(other)?;
        let other = self.aligned(other);
        Ok(self.merge(&other.terms, true))
    }

    fn merge(&self, rhs: &[(Monomial, Coeff)], negate: bool) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.len());
        let (mut i, mut j) = (0, 0);
        let lhs = &self.terms;
        while i < lhs.len() && j < rhs.len() {
            match self.order.cmp(&lhs[i].0, &rhs[j].0) {
                Ordering::Less => {
                    out.push(lhs[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate { -&rhs[j].1 } else { rhs[j].1.clone() };
                    out.push((rhs[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &lhs[i].1 - &rhs[j].1
                    } else {
                        &lhs[i].1 + &rhs[j].1
                    };
                    if !c.is_zero() {
                        out.push((lhs[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&lhs[i..]);
        for (m, c) in &rhs[j..] {
            out.push((m.clone(), if negate { -c } else { c.clone() }));
        }
        Polynomial {
            nvars: self.nvars,
            order: self.order.clone(),
            terms: out,
        }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_arity(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero_with_order(self.order.clone()));
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return Ok(self.mul_term(m, c));
        }
        let mut acc: HashMap<Monomial, Coeff> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        Ok(Self::from_map(self.order.clone(), acc))
    }

    /// Multiplies by `c·m`. The term order is multiplicative so no re-sort is needed.
    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Polynomial {
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            self.terms.iter().map(|(t, d)| (t.mul(m), d * c)).collect()
        };
        Polynomial {
            nvars: self.nvars,
            order: self.order.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        self.mul_term(&Monomial::one(self.nvars), c)
    }

    pub fn pow(&self, exponent: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars).with_order(&self.order);
        for _ in 0..exponent {
            result = &result * self;
        }
        result
    }

    pub(crate) fn pop_leading(&mut self) -> Option<(Monomial, Coeff)> {
        self.terms.pop()
    }

    /// Builds from terms already strictly ascending in `order`.
    pub(crate) fn from_sorted(order: Arc<TermOrder>, terms: Vec<(Monomial, Coeff)>) -> Self {
        debug_assert!(terms
            .windows(2)
            .all(|w| order.cmp(&w[0].0, &w[1].0) == Ordering::Less));
        Polynomial {
            nvars: order.nvars(),
            order,
            terms,
        }
    }

    /// `self - c·m·other`, the elementary reduction step.
    pub(crate) fn sub_scaled(&self, c: &Coeff, m: &Monomial, other: &Polynomial) -> Polynomial {
        let shifted: Vec<(Monomial, Coeff)> = other
            .terms
            .iter()
            .map(|(t, d)| (t.mul(m), d * c))
            .collect();
        self.merge(&shifted, true)
    }

    pub fn partial_derivative(&self, index: usize) -> Result<Polynomial, PolyError> {
        if index >= self.nvars {
            return Err(PolyError::VariableOutOfRange {
                index,
                nvars: self.nvars,
            });
        }
        // dividing out x_i keeps the relative order of the surviving terms
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponents()[index] > 0)
            .map(|(m, c)| {
                let e = m.exponents()[index];
                let mut exps = m.exponents().to_vec();
                exps[index] -= 1;
                (Monomial(exps), c * BigRational::from_integer(BigInt::from(e)))
            })
            .collect();
        Ok(Polynomial {
            nvars: self.nvars,
            order: self.order.clone(),
            terms,
        })
    }

    /// Splits into weighted-homogeneous components keyed by weighted degree.
    pub fn graded_components(
        &self,
        weights: &WeightVector,
    ) -> Result<BTreeMap<BigRational, Polynomial>, PolyError> {
        if weights.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                left: self.nvars,
                right: weights.len(),
            });
        }
        let mut parts: BTreeMap<BigRational, Vec<(Monomial, Coeff)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(weights.degree_unchecked(m))
                .or_default()
                .push((m.clone(), c.clone()));
        }
        Ok(parts
            .into_iter()
            .map(|(d, terms)| {
                (
                    d,
                    Polynomial {
                        nvars: self.nvars,
                        order: self.order.clone(),
                        terms,
                    },
                )
            })
            .collect())
    }

    /// Weighted degree if the polynomial is nonzero and homogeneous.
    pub fn homogeneous_degree(&self, weights: &WeightVector) -> Option<BigRational> {
        if weights.len() != self.nvars {
            return None;
        }
        let mut degrees = self.terms.iter().map(|(m, _)| weights.scaled_degree(m));
        let first = degrees.next()?;
        if degrees.all(|d| d == first) {
            Some(BigRational::new(
                BigInt::from(first),
                BigInt::from(weights.scale),
            ))
        } else {
            None
        }
    }

    /// Quotient `self / divisor` when the division is exact.
    pub fn divide_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        assert_eq!(self.nvars, divisor.nvars, "arity");
        let divisor = self.aligned(divisor);
        let (dm, dc) = divisor.leading_term()?;
        let mut rest = self.clone();
        let mut quotient: Vec<(Monomial, Coeff)> = Vec::new();
        while let Some((m, c)) = rest.leading_term() {
            let q = m.checked_div(dm)?;
            let qc = c / dc;
            rest = rest.sub_scaled(&qc, &q, &divisor);
            quotient.push((q, qc));
        }
        quotient.reverse();
        Some(Polynomial {
            nvars: self.nvars,
            order: self.order.clone(),
            terms: quotient,
        })
    }

    /// Text in the `+ - * ^` grammar with explicit `*`, leading term first.
    pub fn render<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            if m.is_one() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&m.render(names));
            } else {
                out.push_str(&format!("{}*{}", abs, m.render(names)));
            }
        }
        out
    }

    pub(crate) fn default_names(nvars: usize) -> Vec<String> {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        if self.nvars != other.nvars || self.terms.len() != other.terms.len() {
            return false;
        }
        let other = self.aligned(other);
        self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&Self::default_names(self.nvars)))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial arity mismatch")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}
