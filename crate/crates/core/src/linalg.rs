//! Fraction-free elimination over the integers for exact rank and span membership.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Clears denominators of a rational vector, returning a primitive integer vector.
pub fn to_primitive_integers(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut out: Vec<BigInt> = v
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(v: &mut [BigInt]) {
    let g = v
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// Incrementally maintained echelon basis of a subspace of `Q^dim`.
///
/// Each stored vector has a pivot coordinate that is zero in every vector stored after
/// it. New vectors are cross-multiplied against stored ones (no division) and divided by
/// their content after each step to bound coefficient growth.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    dim: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl SpanBuilder {
    pub fn new(dim: usize) -> Self {
        SpanBuilder {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let a = &row[*pivot];
            let b = v[*pivot].clone();
            let g = a.gcd(&b);
            let (a, b) = (a / &g, b / &g);
            for (x, r) in v.iter_mut().zip(row) {
                if r.is_zero() {
                    *x *= &a;
                } else {
                    *x = &*x * &a - r * &b;
                }
            }
            make_primitive(&mut v);
        }
        v
    }

    /// Adds `v` to the span; returns true when the rank grew.
    pub fn insert(&mut self, v: &[BigRational]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        let reduced = self.reduce(to_primitive_integers(v));
        match reduced.iter().position(|c| !c.is_zero()) {
            Some(pivot) => {
                let mut reduced = reduced;
                if reduced[pivot].is_negative() {
                    for c in reduced.iter_mut() {
                        *c = -&*c;
                    }
                }
                self.rows.push((pivot, reduced));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        self.reduce(to_primitive_integers(v))
            .iter()
            .all(|c| c.is_zero())
    }
}

/// Rank of the matrix whose rows are given.
pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let mut span = SpanBuilder::new(first.len());
    for r in rows {
        span.insert(r);
    }
    span.rank()
}
