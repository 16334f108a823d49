//! Canonical representatives of top-degree cohomology classes of the complement and
//! the pole-order filtration.
//!
//! In the weighted-homogeneous model a form `A dx / f^k` with `A` homogeneous has
//! Euler degree `deg_w(A) + Σw − k`; forms of nonzero Euler degree are exact. A form of
//! Euler degree zero is reduced by writing `A = r + Σ g_i ∂_i f` and using
//!
//! ```text
//! d(g ω_i / f^(k−1)) = ∂_i g dx / f^(k−1) − (k−1) g ∂_i f dx / f^k,   dx_i ∧ ω_i = dx,
//! ```
//!
//! so `Σ g_i ∂_i f dx / f^k ≡ (1/(k−1)) Σ ∂_i g_i dx / f^(k−1)`. The remainder `r` is a
//! combination of Milnor basis monomials `x^β` with `ℓ(β) = k` and is kept as the
//! coefficient of the basis class `x^β dx / f^ℓ(β)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::polyalg::{Monomial, PolyError, Polynomial};
use crate::singularity::SingularityProfile;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerhamError {
    #[error("pole order must be at least 1, got {0}")]
    PoleOrderTooSmall(u32),
    #[error("numerator is not weighted-homogeneous")]
    NotHomogeneous,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A class in the cohomology of the complement, written in the basis
/// `{x^β dx / f^ℓ(β) : β in the Milnor basis, ℓ(β) integral}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CohomologyClass {
    // β ↦ (pole level ℓ(β), coefficient ≠ 0)
    terms: BTreeMap<Monomial, (u32, BigRational)>,
}

impl CohomologyClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, beta: &Monomial) -> BigRational {
        self.terms
            .get(beta)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// `(β, pole level, coefficient)` in ascending order of β.
    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, u32, &BigRational)> {
        self.terms.iter().map(|(m, (l, c))| (m, *l, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, beta: Monomial, level: u32, c: BigRational) {
        let entry = self
            .terms
            .entry(beta.clone())
            .or_insert((level, BigRational::zero()));
        debug_assert_eq!(entry.0, level);
        entry.1 += c;
        if entry.1.is_zero() {
            self.terms.remove(&beta);
        }
    }

    pub fn add(&self, other: &CohomologyClass) -> CohomologyClass {
        let mut out = self.clone();
        for (m, (l, c)) in &other.terms {
            out.add_term(m.clone(), *l, c.clone());
        }
        out
    }

    pub fn max_pole_level(&self) -> Option<u32> {
        self.terms.values().map(|(l, _)| *l).max()
    }

    /// Coordinates against an ordered list of basis monomials.
    pub fn coordinates(&self, basis: &[Monomial]) -> Vec<BigRational> {
        basis.iter().map(|b| self.coefficient(b)).collect()
    }
}

pub fn class_is_zero(class: &CohomologyClass) -> bool {
    class.is_zero()
}

pub fn max_pole_level(class: &CohomologyClass) -> Option<u32> {
    class.max_pole_level()
}

/// `deg_w(A) + Σw − k` for a weighted-homogeneous numerator `A`.
pub fn euler_degree(
    numerator: &Polynomial,
    pole: u32,
    profile: &SingularityProfile,
) -> Result<BigRational, DerhamError> {
    check_arity(numerator, profile)?;
    let degree = numerator
        .homogeneous_degree(profile.weights())
        .ok_or(DerhamError::NotHomogeneous)?;
    Ok(degree + profile.weight_sum() - BigRational::from_integer(pole.into()))
}

fn check_arity(p: &Polynomial, profile: &SingularityProfile) -> Result<(), DerhamError> {
    if p.nvars() != profile.nvars() {
        return Err(PolyError::ArityMismatch {
            left: p.nvars(),
            right: profile.nvars(),
        }
        .into());
    }
    Ok(())
}

/// The Euler-degree-zero part of `numerator` at pole order `pole`.
fn degree_zero_part(
    numerator: &Polynomial,
    pole: u32,
    profile: &SingularityProfile,
) -> Option<Polynomial> {
    let target = BigRational::from_integer(pole.into()) - profile.weight_sum();
    numerator
        .graded_components(profile.weights())
        .expect("arity checked")
        .remove(&target)
}

/// Canonical form of the class of `numerator · dx / f^pole`.
pub fn reduce_class(
    numerator: &Polynomial,
    pole: u32,
    profile: &SingularityProfile,
) -> Result<CohomologyClass, DerhamError> {
    if pole < 1 {
        return Err(DerhamError::PoleOrderTooSmall(pole));
    }
    check_arity(numerator, profile)?;
    let gb = profile.jacobian_gb();
    let numerator = numerator.with_order(profile.order());
    let mut class = CohomologyClass::zero();
    let mut k = pole;
    let mut current = degree_zero_part(&numerator, k, profile);
    while let Some(a) = current.take() {
        if a.is_zero() {
            break;
        }
        let division = gb.normal_form_with_cofactors(&a)?;
        for (beta, c) in division.remainder.terms() {
            debug_assert_eq!(profile.spectral_value(beta), BigRational::from_integer(k.into()));
            class.add_term(beta.clone(), k, c.clone());
        }
        if k == 1 {
            // at pole 1 and Euler degree 0 every cofactor has negative degree
            debug_assert!(division.cofactors.iter().all(|g| g.is_zero()));
            break;
        }
        let mut divergence = Polynomial::zero_with_order(profile.order().clone());
        for (i, g) in division.cofactors.iter().enumerate() {
            divergence = &divergence + &g.partial_derivative(i)?;
        }
        let factor = BigRational::one() / BigRational::from_integer((k - 1).into());
        k -= 1;
        current = degree_zero_part(&divergence.scale(&factor), k, profile);
    }
    Ok(class)
}

/// `dims[l] = dim P_l H'` for `l = 0..=l_max`, where `P_l H'` is spanned by classes with
/// a pole of order at most `l + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationTable {
    pub dims: Vec<usize>,
    pub hprime_dim: usize,
}

impl FiltrationTable {
    pub fn dim(&self, l: usize) -> usize {
        self.dims
            .get(l)
            .copied()
            .unwrap_or(self.hprime_dim)
    }
}

pub fn pole_filtration_dims(profile: &SingularityProfile, l_max: usize) -> FiltrationTable {
    let levels: Vec<u32> = profile
        .integral_classes()
        .into_iter()
        .map(|(_, l)| l)
        .collect();
    let dims = (0..=l_max)
        .map(|l| levels.iter().filter(|&&lv| lv as usize <= l + 1).count())
        .collect();
    FiltrationTable {
        dims,
        hprime_dim: levels.len(),
    }
}
