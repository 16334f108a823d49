//! Buchberger's algorithm with cofactor tracking against the original generators.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::polyalg::{Coeff, Monomial, PolyError, Polynomial, TermOrder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("ideal needs at least one generator")]
    NoGenerators,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Reduced Gröbner basis together with the expression of every basis element in
/// terms of the original generators.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    generators: Vec<Polynomial>,
    basis: Vec<Polynomial>,
    order: Arc<TermOrder>,
    // transform[j][i]: coefficient of generators[i] in basis[j]
    transform: Vec<Vec<Polynomial>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionResult {
    pub remainder: Polynomial,
    /// One cofactor per original generator.
    pub cofactors: Vec<Polynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientBasis {
    Finite(Vec<Monomial>),
    Infinite,
}

impl QuotientBasis {
    pub fn dimension(&self) -> Option<usize> {
        match self {
            QuotientBasis::Finite(b) => Some(b.len()),
            QuotientBasis::Infinite => None,
        }
    }
}

/// A polynomial with its representation `poly = Σ combo[i]·generators[i]`.
#[derive(Clone)]
struct Tracked {
    poly: Polynomial,
    combo: Vec<Polynomial>,
}

impl Tracked {
    fn sub_scaled(&mut self, c: &Coeff, m: &Monomial, other: &Tracked) {
        self.poly = self.poly.sub_scaled(c, m, &other.poly);
        for (mine, theirs) in self.combo.iter_mut().zip(&other.combo) {
            if !theirs.is_zero() {
                *mine = mine.sub_scaled(c, m, theirs);
            }
        }
    }

    fn scale(&mut self, c: &Coeff) {
        self.poly = self.poly.scale(c);
        for p in &mut self.combo {
            *p = p.scale(c);
        }
    }

    fn make_monic(&mut self) {
        if let Some((_, lc)) = self.poly.leading_term() {
            let inv = BigRational::one() / lc;
            self.scale(&inv);
        }
    }
}

/// Fully reduces `t` by `basis`, tracking combinations.
fn reduce_tracked(mut t: Tracked, basis: &[Tracked]) -> Tracked {
    let order = t.poly.order().clone();
    let mut remainder: Vec<(Monomial, Coeff)> = Vec::new();
    while let Some((m, c)) = t.poly.leading_term() {
        let divisor = basis.iter().find(|g| {
            g.poly
                .leading_monomial()
                .is_some_and(|lm| lm.divides(m))
        });
        match divisor {
            Some(g) => {
                let (gm, gc) = g.poly.leading_term().expect("nonzero");
                let q = m.checked_div(gm).expect("divides");
                let qc = c / gc;
                t.sub_scaled(&qc, &q, g);
            }
            None => {
                let lead = t.poly.pop_leading().expect("nonzero");
                remainder.push(lead);
            }
        }
    }
    remainder.reverse();
    t.poly = Polynomial::from_sorted(order, remainder);
    t
}

fn s_polynomial(a: &Tracked, b: &Tracked) -> Tracked {
    let (am, ac) = a.poly.leading_term().expect("nonzero");
    let (bm, bc) = b.poly.leading_term().expect("nonzero");
    let lcm = am.lcm(bm);
    let fa = lcm.checked_div(am).expect("lcm");
    let fb = lcm.checked_div(bm).expect("lcm");
    let nvars = a.poly.nvars();
    let zero = Polynomial::zero_with_order(a.poly.order().clone());
    let mut s = Tracked {
        poly: zero.clone(),
        combo: vec![zero; a.combo.len()],
    };
    s.sub_scaled(&(-(BigRational::one() / ac)), &fa, a);
    s.sub_scaled(&(BigRational::one() / bc), &fb, b);
    debug_assert_eq!(s.poly.nvars(), nvars);
    s
}

/// Computes the reduced Gröbner basis of the ideal generated by `gens` under `order`.
///
/// Pairs are selected by smallest lcm; pairs with coprime leading monomials and pairs
/// covered by the chain criterion are skipped. The basis is monic and sorted ascending
/// by leading monomial, so it depends only on the ideal and the order.
pub fn buchberger(
    gens: &[Polynomial],
    order: &Arc<TermOrder>,
) -> Result<GroebnerBasis, GroebnerError> {
    if gens.is_empty() {
        return Err(GroebnerError::NoGenerators);
    }
    let nvars = order.nvars();
    for g in gens {
        if g.nvars() != nvars {
            return Err(PolyError::ArityMismatch {
                left: g.nvars(),
                right: nvars,
            }
            .into());
        }
    }
    let generators: Vec<Polynomial> = gens.iter().map(|g| g.with_order(order)).collect();
    let zero = Polynomial::zero_with_order(order.clone());
    let one = Polynomial::one(nvars).with_order(order);

    let mut work: Vec<Tracked> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let mut combo = vec![zero.clone(); generators.len()];
        combo[i] = one.clone();
        let mut t = Tracked {
            poly: g.clone(),
            combo,
        };
        t.make_monic();
        work.push(t);
    }

    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..work.len() {
        for i in 0..j {
            pairs.insert((i, j));
        }
    }

    while let Some(&(i, j)) = pairs.iter().min_by(|a, b| {
        let la = pair_lcm(&work, a.0, a.1);
        let lb = pair_lcm(&work, b.0, b.1);
        order.cmp(&la, &lb).then_with(|| a.cmp(b))
    }) {
        pairs.remove(&(i, j));
        let lmi = work[i].poly.leading_monomial().expect("nonzero");
        let lmj = work[j].poly.leading_monomial().expect("nonzero");
        if lmi.is_coprime(lmj) {
            continue;
        }
        let lcm = lmi.lcm(lmj);
        let chain = (0..work.len()).any(|k| {
            k != i
                && k != j
                && work[k]
                    .poly
                    .leading_monomial()
                    .is_some_and(|lk| lk.divides(&lcm))
                && !pairs.contains(&(i.min(k), i.max(k)))
                && !pairs.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&work[i], &work[j]);
        let mut r = reduce_tracked(s, &work);
        if r.poly.is_zero() {
            continue;
        }
        r.make_monic();
        let new = work.len();
        work.push(r);
        for k in 0..new {
            pairs.insert((k, new));
        }
    }

    // minimalize: drop elements whose leading monomial is a multiple of another's
    let mut keep: Vec<Tracked> = Vec::new();
    for (idx, t) in work.iter().enumerate() {
        let lm = t.poly.leading_monomial().expect("nonzero");
        let redundant = work.iter().enumerate().any(|(other, u)| {
            let lu = u.poly.leading_monomial().expect("nonzero");
            other != idx && lu.divides(lm) && (lu != lm || other < idx)
        });
        if !redundant {
            keep.push(t.clone());
        }
    }

    // inter-reduce the tails
    for idx in 0..keep.len() {
        let others: Vec<Tracked> = keep
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != idx)
            .map(|(_, t)| t.clone())
            .collect();
        let mut t = keep[idx].clone();
        let lead = t.poly.pop_leading().expect("nonzero");
        let head_combo = t.combo.clone();
        // reduce tail only: tail = poly - lead
        let tail = Tracked {
            poly: t.poly.clone(),
            combo: head_combo,
        };
        // the combo of the full element is carried in `tail.combo` since tail + lead = element
        let reduced = reduce_tracked(tail, &others);
        let lead_poly = Polynomial::from_sorted(order.clone(), vec![lead]);
        t.poly = &reduced.poly + &lead_poly;
        t.combo = reduced.combo;
        t.make_monic();
        keep[idx] = t;
    }

    keep.sort_by(|a, b| {
        order.cmp(
            a.poly.leading_monomial().expect("nonzero"),
            b.poly.leading_monomial().expect("nonzero"),
        )
    });
    let (basis, transform) = keep.into_iter().map(|t| (t.poly, t.combo)).unzip();
    Ok(GroebnerBasis {
        generators,
        basis,
        order: order.clone(),
        transform,
    })
}

fn pair_lcm(work: &[Tracked], i: usize, j: usize) -> Monomial {
    let a = work[i].poly.leading_monomial().expect("nonzero");
    let b = work[j].poly.leading_monomial().expect("nonzero");
    a.lcm(b)
}

impl GroebnerBasis {
    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn order(&self) -> &Arc<TermOrder> {
        &self.order
    }

    /// `transform()[j][i]` is the coefficient of generator `i` in basis element `j`.
    pub fn transform(&self) -> &[Vec<Polynomial>] {
        &self.transform
    }

    pub fn leading_monomials(&self) -> Vec<&Monomial> {
        self.basis
            .iter()
            .filter_map(|b| b.leading_monomial())
            .collect()
    }

    fn find_divisor(&self, m: &Monomial) -> Option<usize> {
        self.basis.iter().position(|b| {
            b.leading_monomial()
                .is_some_and(|lm| lm.divides(m))
        })
    }

    /// Unique normal form of `p` modulo the ideal.
    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        let mut rest = p.with_order(&self.order);
        let mut remainder: Vec<(Monomial, Coeff)> = Vec::new();
        while let Some((m, c)) = rest.leading_term() {
            match self.find_divisor(m) {
                Some(j) => {
                    let (bm, bc) = self.basis[j].leading_term().expect("nonzero");
                    let q = m.checked_div(bm).expect("divides");
                    let qc = c / bc;
                    rest = rest.sub_scaled(&qc, &q, &self.basis[j]);
                }
                None => remainder.push(rest.pop_leading().expect("nonzero")),
            }
        }
        remainder.reverse();
        Polynomial::from_sorted(self.order.clone(), remainder)
    }

    /// Division `p = Σ cofactors[i]·generators[i] + remainder` against the original
    /// generators.
    pub fn normal_form_with_cofactors(&self, p: &Polynomial) -> Result<DivisionResult, PolyError> {
        if p.nvars() != self.order.nvars() {
            return Err(PolyError::ArityMismatch {
                left: p.nvars(),
                right: self.order.nvars(),
            });
        }
        let mut rest = p.with_order(&self.order);
        let mut remainder: Vec<(Monomial, Coeff)> = Vec::new();
        let mut quotients: Vec<Vec<(Monomial, Coeff)>> = vec![Vec::new(); self.basis.len()];
        while let Some((m, c)) = rest.leading_term() {
            match self.find_divisor(m) {
                Some(j) => {
                    let (bm, bc) = self.basis[j].leading_term().expect("nonzero");
                    let q = m.checked_div(bm).expect("divides");
                    let qc = c / bc;
                    rest = rest.sub_scaled(&qc, &q, &self.basis[j]);
                    quotients[j].push((q, qc));
                }
                None => remainder.push(rest.pop_leading().expect("nonzero")),
            }
        }
        remainder.reverse();
        let zero = Polynomial::zero_with_order(self.order.clone());
        let mut cofactors = vec![zero; self.generators.len()];
        for (j, q) in quotients.into_iter().enumerate() {
            if q.is_empty() {
                continue;
            }
            let q = Polynomial::from_terms(self.order.clone(), q)?;
            for (i, t) in self.transform[j].iter().enumerate() {
                if !t.is_zero() {
                    cofactors[i] = &cofactors[i] + &(&q * t);
                }
            }
        }
        Ok(DivisionResult {
            remainder: Polynomial::from_sorted(self.order.clone(), remainder),
            cofactors,
        })
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Monomials outside the leading-term ideal, ascending in the term order, or
    /// [`QuotientBasis::Infinite`] when some variable has no pure power among the
    /// leading monomials.
    pub fn quotient_basis(&self) -> QuotientBasis {
        let nvars = self.order.nvars();
        let lms = self.leading_monomials();
        let mut bounds = Vec::with_capacity(nvars);
        for i in 0..nvars {
            let pure = lms
                .iter()
                .filter(|m| {
                    m.exponents()
                        .iter()
                        .enumerate()
                        .all(|(k, &e)| k == i || e == 0)
                })
                .map(|m| m.exponents()[i])
                .min();
            match pure {
                Some(b) => bounds.push(b),
                None => return QuotientBasis::Infinite,
            }
        }
        let mut out = Vec::new();
        let mut current = vec![0u32; nvars];
        staircase(&bounds, 0, &mut current, &lms, &mut out);
        out.sort_by(|a, b| self.order.cmp(a, b));
        QuotientBasis::Finite(out)
    }
}

fn staircase(
    bounds: &[u32],
    index: usize,
    current: &mut Vec<u32>,
    lms: &[&Monomial],
    out: &mut Vec<Monomial>,
) {
    if index == bounds.len() {
        let m = Monomial::new(current.clone());
        if !lms.iter().any(|lm| lm.divides(&m)) {
            out.push(m);
        }
        return;
    }
    for e in 0..bounds[index] {
        current[index] = e;
        // prune: once the partial monomial is divisible, larger exponents stay divisible
        let partial = Monomial::new(current.clone());
        if lms.iter().any(|lm| lm.divides(&partial)) {
            break;
        }
        staircase(bounds, index + 1, current, lms, out);
    }
    current[index] = 0;
}

/// True iff the ideal has a finite, nonzero-dimensional quotient in which every
/// variable is nilpotent, i.e. its zero set is exactly the origin.
pub fn supported_only_at_origin(gens: &[Polynomial]) -> bool {
    let Some(first) = gens.first() else {
        return false;
    };
    let order = first.order().clone();
    let Ok(gb) = buchberger(gens, &order) else {
        return false;
    };
    let dim = match gb.quotient_basis() {
        QuotientBasis::Finite(b) if !b.is_empty() => b.len() as u32,
        _ => return false,
    };
    let nvars = order.nvars();
    (0..nvars).all(|i| {
        let mut e = vec![0; nvars];
        e[i] = dim;
        let power = Polynomial::from_sorted(
            order.clone(),
            vec![(Monomial::new(e), BigRational::one())],
        );
        gb.normal_form(&power).is_zero()
    })
}
