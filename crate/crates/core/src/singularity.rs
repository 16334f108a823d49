//! Jacobian ideal, Milnor number, weight detection and spectral values of a
//! quasi-homogeneous isolated singularity.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::groebner::{buchberger, GroebnerBasis, QuotientBasis};
use crate::polyalg::{Monomial, Polynomial, TermOrder, WeightVector};

/// Smallest number of variables accepted by [`build_profile`].
pub const MIN_VARIABLES: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SingularityError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity is not isolated at the origin: {0}")]
    NonIsolated(String),
    #[error("polynomial is not quasi-homogeneous: {0}")]
    NotQuasiHomogeneous(String),
}

pub fn jacobian_generators(f: &Polynomial) -> Vec<Polynomial> {
    (0..f.nvars())
        .map(|i| f.partial_derivative(i).expect("index in range"))
        .collect()
}

fn check_domain(f: &Polynomial) -> Result<(), SingularityError> {
    if f.nvars() < MIN_VARIABLES {
        return Err(SingularityError::Domain(format!(
            "need at least {MIN_VARIABLES} variables, got {}",
            f.nvars()
        )));
    }
    if f.is_zero() {
        return Err(SingularityError::Domain("f is the zero polynomial".into()));
    }
    if !f.constant_term().is_zero() {
        return Err(SingularityError::Domain(format!(
            "f(0) = {} is not zero",
            f.constant_term()
        )));
    }
    Ok(())
}

/// Positive weights making every monomial of `f` weighted-degree 1, when the linear
/// system they satisfy has exactly one solution and that solution is positive.
pub fn detect_weights(f: &Polynomial) -> Option<WeightVector> {
    solve_weight_system(f).ok()
}

fn solve_weight_system(f: &Polynomial) -> Result<WeightVector, String> {
    let n = f.nvars();
    if f.is_zero() {
        return Err("zero polynomial has no weights".into());
    }
    // augmented rows [m_1 … m_n | 1]
    let mut rows: Vec<Vec<BigRational>> = f
        .terms()
        .iter()
        .map(|(m, _)| {
            let mut r: Vec<BigRational> = m
                .exponents()
                .iter()
                .map(|&e| BigRational::from_integer(e.into()))
                .collect();
            r.push(BigRational::one());
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = BigRational::one() / &rows[rank][col];
        for c in rows[rank].iter_mut() {
            *c *= &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[n].is_zero()) {
        return Err("monomial degree equations are inconsistent".into());
    }
    if rank < n {
        return Err(format!(
            "weight system is underdetermined (rank {rank} < {n} variables)"
        ));
    }
    let weights: Vec<BigRational> = (0..n).map(|i| rows[i][n].clone()).collect();
    if let Some(bad) = weights.iter().position(|w| !w.is_positive()) {
        return Err(format!("weight of variable {} is {}, not positive", bad + 1, weights[bad]));
    }
    WeightVector::new(weights).map_err(|e| e.to_string())
}

fn isolated_origin_check(
    gb: &GroebnerBasis,
) -> Result<Vec<Monomial>, SingularityError> {
    let basis = match gb.quotient_basis() {
        QuotientBasis::Finite(b) => b,
        QuotientBasis::Infinite => {
            return Err(SingularityError::NonIsolated(
                "Milnor algebra is infinite-dimensional".into(),
            ))
        }
    };
    let dim = basis.len() as u32;
    let nvars = gb.order().nvars();
    for i in 0..nvars {
        let mut e = vec![0; nvars];
        e[i] = dim;
        let power = Polynomial::monomial(nvars, Monomial::new(e), BigRational::one());
        if !gb.contains(&power) {
            return Err(SingularityError::NonIsolated(format!(
                "critical locus is not supported at the origin (variable {} is not nilpotent)",
                i + 1
            )));
        }
    }
    Ok(basis)
}

/// Milnor number of `f` at the origin, computed as the dimension of the global Milnor
/// algebra after checking that the critical locus is the origin alone.
pub fn milnor_number(f: &Polynomial) -> Result<usize, SingularityError> {
    check_domain(f)?;
    let order = Arc::new(match detect_weights(f) {
        Some(w) => TermOrder::weighted(w),
        None => TermOrder::graded_revlex(f.nvars()),
    });
    let gb = buchberger(&jacobian_generators(f), &order)
        .map_err(|e| SingularityError::Domain(e.to_string()))?;
    isolated_origin_check(&gb).map(|b| b.len())
}

/// Everything downstream needs about `f`: weights, Milnor algebra basis and spectrum.
#[derive(Clone, Debug)]
pub struct SingularityProfile {
    f: Polynomial,
    weights: WeightVector,
    order: Arc<TermOrder>,
    basis: Vec<Monomial>,
    spectral: Vec<BigRational>,
    jacobian_gb: GroebnerBasis,
}

/// Validates `f` and assembles its [`SingularityProfile`].
///
/// Checks run in this order: domain (n ≥ 3, f(0) = 0), finiteness of the Milnor algebra,
/// quasi-homogeneity, and finally that the critical locus is the origin.
pub fn build_profile(f: &Polynomial) -> Result<SingularityProfile, SingularityError> {
    check_domain(f)?;
    let weights = solve_weight_system(f);
    let order = Arc::new(match &weights {
        Ok(w) => TermOrder::weighted(w.clone()),
        Err(_) => TermOrder::graded_revlex(f.nvars()),
    });
    let f = f.with_order(&order);
    let gb = buchberger(&jacobian_generators(&f), &order)
        .map_err(|e| SingularityError::Domain(e.to_string()))?;
    if gb.quotient_basis() == QuotientBasis::Infinite {
        return Err(SingularityError::NonIsolated(
            "Milnor algebra is infinite-dimensional".into(),
        ));
    }
    let weights = weights.map_err(SingularityError::NotQuasiHomogeneous)?;
    let basis = isolated_origin_check(&gb)?;
    let sum = weights.sum();
    let spectral = basis
        .iter()
        .map(|b| weights.degree(b).expect("arity") + &sum)
        .collect();
    Ok(SingularityProfile {
        f,
        weights,
        order,
        basis,
        spectral,
        jacobian_gb: gb,
    })
}

impl SingularityProfile {
    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn weight_sum(&self) -> BigRational {
        self.weights.sum()
    }

    pub fn order(&self) -> &Arc<TermOrder> {
        &self.order
    }

    pub fn mu(&self) -> usize {
        self.basis.len()
    }

    /// Milnor-algebra monomial basis, ascending in the term order.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// `ℓ(β) = Σ (β_i + 1) w_i`, parallel to [`Self::basis`].
    pub fn spectral(&self) -> &[BigRational] {
        &self.spectral
    }

    pub fn spectral_value(&self, beta: &Monomial) -> BigRational {
        self.weights.degree(beta).expect("arity") + self.weight_sum()
    }

    /// Spectral values sorted ascending, with multiplicity.
    pub fn sorted_spectrum(&self) -> Vec<BigRational> {
        let mut s = self.spectral.clone();
        s.sort();
        s
    }

    pub fn jacobian_gb(&self) -> &GroebnerBasis {
        &self.jacobian_gb
    }

    /// Basis monomials with integral spectral value, paired with that value. These
    /// index a basis of the cohomology of the complement.
    pub fn integral_classes(&self) -> Vec<(Monomial, u32)> {
        self.basis
            .iter()
            .zip(&self.spectral)
            .filter(|(_, l)| l.is_integer())
            .map(|(b, l)| {
                let level: u32 = l
                    .to_integer()
                    .try_into()
                    .expect("spectral values are small positive integers");
                (b.clone(), level)
            })
            .collect()
    }

    /// Distinct integral spectral values.
    pub fn integral_levels(&self) -> BTreeSet<u32> {
        self.integral_classes().into_iter().map(|(_, l)| l).collect()
    }
}
