//! Brute-force cohomology of the complement by exact linear algebra on a truncated,
//! graded de Rham complex. Used as the referee for [`crate::derham`] and
//! [`crate::dmodlen`]; nothing here goes through Gröbner bases or cofactors.
//!
//! All forms with pole order at most `K` are written over the common denominator
//! `f^K`. An n-form is `A dx / f^K`; its coordinates are the coefficients of `A`.
//! The (n−1)-forms are `m ω_i / f^(K−1)` with `dx_i ∧ ω_i = dx`, whose differential is
//!
//! ```text
//! d(m ω_i / f^(K−1)) = (f ∂_i m − (K−1) m ∂_i f) dx / f^K.
//! ```
//!
//! Only one Euler-degree stratum is materialized at a time; the Euler vector field
//! preserves the differential, so strata do not interact.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::derham::FiltrationTable;
use crate::linalg::SpanBuilder;
use crate::polyalg::{Monomial, Polynomial};
use crate::singularity::SingularityProfile;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("cohomology not stable between pole caps {lower} and {upper}")]
    NotStabilized { lower: u32, upper: u32 },
    #[error("pole cap {cap} is below the required {required}")]
    PoleCapTooSmall { cap: u32, required: u32 },
}

/// One Euler-degree stratum of the de Rham complex, truncated at pole order `K`.
#[derive(Clone, Debug)]
pub struct TruncatedComplex {
    pole_cap: u32,
    euler_degree: BigRational,
    basis_nminus1: Vec<(usize, Monomial)>,
    basis_n: Vec<Monomial>,
    index_n: HashMap<Monomial, usize>,
    // column j: d(basis_nminus1[j]) as sparse coordinates in basis_n
    d_columns: Vec<Vec<(usize, BigRational)>>,
    image: SpanBuilder,
    f_power_cache: Vec<Polynomial>,
}

/// Degree-zero stratum with pole cap `K`.
pub fn build_truncated_complex(profile: &SingularityProfile, pole_cap: u32) -> TruncatedComplex {
    build_stratum(profile, pole_cap, &BigRational::zero())
}

/// Stratum of Euler degree `euler_degree` with pole cap `K`.
pub fn build_stratum(
    profile: &SingularityProfile,
    pole_cap: u32,
    euler_degree: &BigRational,
) -> TruncatedComplex {
    let weights = profile.weights();
    let sum = profile.weight_sum();
    let k = BigRational::from_integer(pole_cap.into());
    let basis_n = weights.monomials_of_degree(&(&k - &sum + euler_degree));
    let index_n: HashMap<Monomial, usize> = basis_n
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();

    let f = profile.f();
    let nvars = profile.nvars();
    let mut basis_nminus1 = Vec::new();
    let mut d_columns = Vec::new();
    if pole_cap >= 1 {
        let lower = BigRational::from_integer((pole_cap - 1).into());
        let df: Vec<Polynomial> = (0..nvars)
            .map(|i| f.partial_derivative(i).expect("index"))
            .collect();
        for (i, dfi) in df.iter().enumerate() {
            let degree = &lower - &sum + &weights.weights()[i] + euler_degree;
            for m in weights.monomials_of_degree(&degree) {
                let mono = Polynomial::monomial(nvars, m.clone(), BigRational::from_integer(1.into()))
                    .with_order(profile.order());
                let image = &(f * &mono.partial_derivative(i).expect("index"))
                    - &(&mono * dfi).scale(&lower);
                let column: Vec<(usize, BigRational)> = image
                    .terms()
                    .iter()
                    .map(|(t, c)| (index_n[t], c.clone()))
                    .collect();
                basis_nminus1.push((i, m));
                d_columns.push(column);
            }
        }
    }

    let mut image = SpanBuilder::new(basis_n.len());
    for col in &d_columns {
        image.insert(&densify(col, basis_n.len()));
    }
    let mut f_power_cache = vec![Polynomial::one(nvars).with_order(profile.order())];
    for p in 1..=pole_cap as usize {
        let next = &f_power_cache[p - 1] * f;
        f_power_cache.push(next);
    }
    TruncatedComplex {
        pole_cap,
        euler_degree: euler_degree.clone(),
        basis_nminus1,
        basis_n,
        index_n,
        d_columns,
        image,
        f_power_cache,
    }
}

fn densify(column: &[(usize, BigRational)], len: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); len];
    for (i, c) in column {
        v[*i] = c.clone();
    }
    v
}

impl TruncatedComplex {
    pub fn pole_cap(&self) -> u32 {
        self.pole_cap
    }

    pub fn euler_degree(&self) -> &BigRational {
        &self.euler_degree
    }

    /// Generators `m ω_i / f^(K−1)`, as `(i, m)`.
    pub fn basis_nminus1(&self) -> &[(usize, Monomial)] {
        &self.basis_nminus1
    }

    /// Generators `m dx / f^K`.
    pub fn basis_n(&self) -> &[Monomial] {
        &self.basis_n
    }

    /// Dense exact matrix of the differential, one column per (n−1)-form generator.
    pub fn d_matrix(&self) -> Vec<Vec<BigRational>> {
        self.d_columns
            .iter()
            .map(|c| densify(c, self.basis_n.len()))
            .collect()
    }

    pub fn image_rank(&self) -> usize {
        self.image.rank()
    }

    pub fn cokernel_dim(&self) -> usize {
        self.basis_n.len() - self.image.rank()
    }

    /// Coordinates of `numerator · dx / f^pole` over the denominator `f^K`. `None` when
    /// the numerator has terms outside this stratum.
    pub fn coordinates(&self, numerator: &Polynomial, pole: u32) -> Option<Vec<BigRational>> {
        assert!(pole <= self.pole_cap, "pole above cap");
        let lifted = numerator * &self.f_power_cache[(self.pole_cap - pole) as usize];
        let mut v = vec![BigRational::zero(); self.basis_n.len()];
        for (m, c) in lifted.terms() {
            v[*self.index_n.get(m)?] = c.clone();
        }
        Some(v)
    }

    /// Whether `numerator · dx / f^pole` is exact within the truncation.
    pub fn is_exact(&self, numerator: &Polynomial, pole: u32) -> Option<bool> {
        self.coordinates(numerator, pole)
            .map(|v| self.image.contains(&v))
    }

    /// `dims[l]`: dimension of the image in the cokernel of forms with pole ≤ l+1.
    pub fn pole_dims(&self, profile: &SingularityProfile, l_max: usize) -> Vec<usize> {
        let mut span = self.image.clone();
        let base = span.rank();
        let sum = profile.weight_sum();
        let nvars = profile.nvars();
        let mut dims = Vec::with_capacity(l_max + 1);
        let mut added_up_to = 0u32;
        for l in 0..=l_max {
            let level = (l as u32 + 1).min(self.pole_cap);
            // sub-strata are nested, so only the new pole level needs inserting
            while added_up_to < level {
                added_up_to += 1;
                let degree = BigRational::from_integer(added_up_to.into()) - &sum + &self.euler_degree;
                for m in profile.weights().monomials_of_degree(&degree) {
                    let numerator = Polynomial::monomial(nvars, m, BigRational::from_integer(1.into()));
                    let v = self.coordinates(&numerator, added_up_to).expect("in stratum");
                    span.insert(&v);
                }
            }
            dims.push(span.rank() - base);
        }
        dims
    }
}

/// Dimension of the cohomology of the complement, checked stable between caps K−1 and K.
pub fn oracle_hprime_dim(profile: &SingularityProfile, pole_cap: u32) -> Result<usize, OracleError> {
    require_cap(profile, pole_cap)?;
    let lower = build_truncated_complex(profile, pole_cap - 1).cokernel_dim();
    let upper = build_truncated_complex(profile, pole_cap).cokernel_dim();
    if lower != upper {
        return Err(OracleError::NotStabilized {
            lower: pole_cap - 1,
            upper: pole_cap,
        });
    }
    Ok(upper)
}

fn require_cap(profile: &SingularityProfile, pole_cap: u32) -> Result<(), OracleError> {
    let required = profile.nvars() as u32;
    if pole_cap < required {
        return Err(OracleError::PoleCapTooSmall {
            cap: pole_cap,
            required,
        });
    }
    Ok(())
}

/// Pole-order filtration dimensions by rank computations, checked stable between caps.
pub fn oracle_pole_dims(
    profile: &SingularityProfile,
    pole_cap: u32,
    l_max: usize,
) -> Result<FiltrationTable, OracleError> {
    require_cap(profile, pole_cap)?;
    let lower = build_truncated_complex(profile, pole_cap - 1);
    let upper = build_truncated_complex(profile, pole_cap);
    let dims_lower = lower.pole_dims(profile, l_max);
    let dims_upper = upper.pole_dims(profile, l_max);
    if dims_lower != dims_upper || lower.cokernel_dim() != upper.cokernel_dim() {
        return Err(OracleError::NotStabilized {
            lower: pole_cap - 1,
            upper: pole_cap,
        });
    }
    Ok(FiltrationTable {
        dims: dims_upper,
        hprime_dim: upper.cokernel_dim(),
    })
}

/// Whether `numerator · dx / f^pole` is exact, decided stratum by stratum by linear
/// solvability against the differential.
pub fn oracle_class_vanishes(
    numerator: &Polynomial,
    pole: u32,
    profile: &SingularityProfile,
    pole_cap: u32,
) -> Result<bool, OracleError> {
    let mut oracle = Oracle::with_pole_cap(profile, pole_cap);
    oracle.class_vanishes(numerator, pole)
}

/// Caching front end over strata, raising the pole cap on instability.
pub struct Oracle<'p> {
    profile: &'p SingularityProfile,
    pole_cap: u32,
    strata: HashMap<(BigRational, u32), TruncatedComplex>,
}

/// How far the pole cap is raised past its starting value before giving up.
const MAX_CAP_RAISE: u32 = 3;

impl<'p> Oracle<'p> {
    pub fn new(profile: &'p SingularityProfile) -> Self {
        Self::with_pole_cap(profile, profile.nvars() as u32)
    }

    pub fn with_pole_cap(profile: &'p SingularityProfile, pole_cap: u32) -> Self {
        Oracle {
            profile,
            pole_cap,
            strata: HashMap::new(),
        }
    }

    pub fn pole_cap(&self) -> u32 {
        self.pole_cap
    }

    fn stratum(&mut self, degree: &BigRational, cap: u32) -> &TruncatedComplex {
        let profile = self.profile;
        self.strata
            .entry((degree.clone(), cap))
            .or_insert_with(|| build_stratum(profile, cap, degree))
    }

    pub fn hprime_dim(&mut self) -> Result<usize, OracleError> {
        Ok(self.pole_dims(0)?.hprime_dim)
    }

    pub fn pole_dims(&mut self, l_max: usize) -> Result<FiltrationTable, OracleError> {
        let start = self.pole_cap.max(self.profile.nvars() as u32);
        let mut last = None;
        for cap in start..=start + MAX_CAP_RAISE {
            match oracle_pole_dims(self.profile, cap, l_max) {
                Ok(t) => {
                    self.pole_cap = cap;
                    return Ok(t);
                }
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// Exactness of `numerator · dx / f^pole`. Each graded piece is tested in its own
    /// stratum at two pole caps, which must agree.
    pub fn class_vanishes(&mut self, numerator: &Polynomial, pole: u32) -> Result<bool, OracleError> {
        let profile = self.profile;
        let components = numerator
            .with_order(profile.order())
            .graded_components(profile.weights())
            .expect("arity");
        let pole_q = BigRational::from_integer(pole.into());
        let floor = profile.nvars() as u32;
        for (degree, piece) in components {
            let euler = &degree + profile.weight_sum() - &pole_q;
            // a nonzero-degree form at pole k needs (n−1)-forms of pole k to be killed
            let min_cap = if euler.is_zero() {
                pole.max(floor - 1)
            } else {
                pole + 1
            };
            let cap = self.pole_cap.max(pole).max(min_cap);
            let check = if cap > min_cap { cap - 1 } else { cap + 1 };
            let here = self
                .stratum(&euler, cap)
                .is_exact(&piece, pole)
                .expect("piece lies in its stratum");
            let there = self
                .stratum(&euler, check)
                .is_exact(&piece, pole)
                .expect("piece lies in its stratum");
            if here != there {
                return Err(OracleError::NotStabilized {
                    lower: cap.min(check),
                    upper: cap.max(check),
                });
            }
            if !here {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{brieskorn, from_exponents as poly};
    use crate::polyalg::integer;
    use crate::singularity::build_profile;

    fn fermat3() -> SingularityProfile {
        build_profile(&brieskorn(&[3, 3, 3])).unwrap()
    }

    #[test]
    fn truncated_complex_examples() {
        let quadric = build_profile(&brieskorn(&[2, 2, 2])).unwrap();
        assert_eq!(build_truncated_complex(&quadric, 2).cokernel_dim(), 0);
        let c = build_truncated_complex(&fermat3(), 1);
        assert_eq!(c.basis_n(), &[Monomial::one(3)]);
        assert_eq!(c.cokernel_dim(), 1);
        assert_eq!(c.d_matrix().len(), c.basis_nminus1().len());
    }

    #[test]
    fn holomorphic_forms_are_exact() {
        // in a stratum that contains holomorphic forms, they all lie in the image
        let p = fermat3();
        for e in [2i64, 3] {
            let c = build_stratum(&p, 1, &integer(e));
            for m in p.weights().monomials_of_degree(&(integer(e) - p.weight_sum())) {
                let h = Polynomial::monomial(3, m, integer(1));
                assert_eq!(c.is_exact(&(&h * p.f()), 1), Some(true));
            }
        }
    }

    #[test]
    fn nonzero_degree_strata_carry_no_cohomology_below_the_cap() {
        let p = build_profile(&brieskorn(&[2, 3, 4])).unwrap();
        for e in [crate::polyalg::rational(1, 12), crate::polyalg::rational(-1, 4), integer(1)] {
            let c = build_stratum(&p, 4, &e);
            let dims = c.pole_dims(&p, 2);
            assert_eq!(dims, vec![0, 0, 0], "degree {e}");
        }
    }

    #[test]
    fn hprime_examples() {
        assert_eq!(oracle_hprime_dim(&fermat3(), 4), Ok(2));
        assert_eq!(oracle_hprime_dim(&build_profile(&brieskorn(&[2, 3, 5])).unwrap(), 4), Ok(0));
        assert_eq!(oracle_hprime_dim(&build_profile(&brieskorn(&[2, 2, 2, 2])).unwrap(), 4), Ok(1));
        assert_eq!(
            oracle_hprime_dim(&fermat3(), 2),
            Err(OracleError::PoleCapTooSmall { cap: 2, required: 3 })
        );
    }

    #[test]
    fn pole_dims_examples() {
        assert_eq!(oracle_pole_dims(&fermat3(), 3, 2).unwrap().dims, vec![1, 2, 2]);
        let q = build_profile(&brieskorn(&[2, 2, 2, 2])).unwrap();
        assert_eq!(oracle_pole_dims(&q, 4, 2).unwrap().dims, vec![0, 1, 1]);
        let f5 = build_profile(&brieskorn(&[5, 5, 5])).unwrap();
        assert_eq!(oracle_pole_dims(&f5, 3, 2).unwrap().dims, vec![6, 12, 12]);
    }

    #[test]
    fn class_vanishing_examples() {
        let p = fermat3();
        assert_eq!(oracle_class_vanishes(&poly(&[(&[0, 0, 0], 1)]), 2, &p, 3), Ok(true));
        assert_eq!(oracle_class_vanishes(&poly(&[(&[0, 0, 0], 1)]), 1, &p, 3), Ok(false));
        assert_eq!(oracle_class_vanishes(&poly(&[(&[2, 0, 0], 1)]), 1, &p, 3), Ok(true));
        assert_eq!(oracle_class_vanishes(&poly(&[(&[1, 1, 1], 1)]), 2, &p, 3), Ok(false));
    }

    #[test]
    fn stabilizes_across_caps() {
        for exps in [[3, 3, 3], [2, 3, 5], [2, 4, 4], [3, 3, 4]] {
            let p = build_profile(&brieskorn(&exps)).unwrap();
            let a = oracle_pole_dims(&p, 3, 3).unwrap();
            let b = oracle_pole_dims(&p, 4, 3).unwrap();
            assert_eq!(a, b);
        }
    }

    /// d∘d = 0: differentiate every (n−2)-form `b ι_j ι_i dx / f^(K−2)` into the
    /// (n−1)-form coordinates and push through the top differential.
    #[test]
    fn differential_squares_to_zero() {
        let p = build_profile(&crate::corpus::from_exponents(&[
            (&[2, 1, 0], 1),
            (&[0, 3, 0], 1),
            (&[0, 0, 3], 1),
        ]))
        .unwrap();
        let cap = 3u32;
        let top = build_truncated_complex(&p, cap);
        let f = p.f();
        let n = p.nvars();
        let df: Vec<Polynomial> = (0..n).map(|i| f.partial_derivative(i).unwrap()).collect();
        let sum = p.weight_sum();
        let k2 = integer(cap as i64 - 2);
        let k1 = integer(cap as i64 - 1);
        let d_of = |b: &Polynomial, j: usize| {
            &(f * &b.partial_derivative(j).unwrap()) - &(b * &df[j]).scale(&k2)
        };
        let mut checked = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let degree = &k2 - &sum + &p.weights().weights()[i] + &p.weights().weights()[j];
                for m in p.weights().monomials_of_degree(&degree) {
                    let b = Polynomial::monomial(n, m, integer(1)).with_order(p.order());
                    // (n−1)-form numerators over f^(K−1): a_i = ∂_j-part, a_j = −∂_i-part
                    let mut a = vec![Polynomial::zero(n); n];
                    a[i] = d_of(&b, j);
                    a[j] = -&d_of(&b, i);
                    let mut total = Polynomial::zero(n);
                    for (idx, ai) in a.iter().enumerate() {
                        let term = &(f * &ai.partial_derivative(idx).unwrap()) - &(ai * &df[idx]).scale(&k1);
                        total = &total + &term;
                    }
                    assert!(total.is_zero());
                    // and the same through the matrix: a_i expands in basis_nminus1
                    let mut column = vec![BigRational::zero(); top.basis_n().len()];
                    for (col, (idx, mono)) in top.basis_nminus1().iter().enumerate() {
                        let c = a[*idx].coefficient(mono);
                        if !c.is_zero() {
                            for (row, v) in top.d_matrix()[col].iter().enumerate() {
                                column[row] += &c * v;
                            }
                        }
                    }
                    assert!(column.iter().all(|v| v.is_zero()));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }
}
