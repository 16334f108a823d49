//! Lengths of D-modules generated by meromorphic functions along `f = 0`, and the
//! membership tests that decide them.
//!
//! Everything here reduces to the residue pairing `s ↦ ([s·x^β dx])_β` with values
//! in `H'`: `s` lies in the intersection module `L` iff all these classes vanish, and
//! `s` lies in `D·f^−(l+1)` iff they all lie in the pole-order piece `P_l H'`.

use std::collections::BTreeSet;

use num_rational::BigRational;
use thiserror::Error;

use crate::derham::{pole_filtration_dims, reduce_class, CohomologyClass, DerhamError, FiltrationTable};
use crate::groebner::supported_only_at_origin;
use crate::linalg::SpanBuilder;
use crate::polyalg::{Monomial, PolyError, Polynomial};
use crate::singularity::{build_profile, jacobian_generators, SingularityError, SingularityProfile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DmodError {
    #[error("generators do not agree generically with the meromorphic functions: {0}")]
    GenericAgreementViolated(String),
    #[error("singular locus is not the single point at the origin: {0}")]
    MultipleOrNonIsolatedSingularities(String),
    #[error("numerator is divisible by f; reduce h/f^k before testing")]
    NotReduced,
    #[error(transparent)]
    Singularity(#[from] SingularityError),
    #[error(transparent)]
    Derham(#[from] DerhamError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `s = h / f^k` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeromorphicGerm {
    numerator: Polynomial,
    pole: u32,
}

impl MeromorphicGerm {
    /// Strict constructor: rejects a numerator divisible by `f` when `pole > 0`.
    pub fn new(
        numerator: Polynomial,
        pole: u32,
        profile: &SingularityProfile,
    ) -> Result<Self, DmodError> {
        let (germ, cancelled) = Self::normalize(numerator, pole, profile)?;
        if cancelled > 0 {
            return Err(DmodError::NotReduced);
        }
        Ok(germ)
    }

    /// Cancels common factors of `f` from numerator and denominator; returns the reduced
    /// germ and the number of factors cancelled.
    pub fn normalize(
        numerator: Polynomial,
        pole: u32,
        profile: &SingularityProfile,
    ) -> Result<(Self, u32), DmodError> {
        if numerator.nvars() != profile.nvars() {
            return Err(PolyError::ArityMismatch {
                left: numerator.nvars(),
                right: profile.nvars(),
            }
            .into());
        }
        let mut h = numerator.with_order(profile.order());
        let mut k = pole;
        if h.is_zero() {
            return Ok((MeromorphicGerm { numerator: h, pole: 0 }, pole));
        }
        let mut cancelled = 0;
        while k > 0 {
            match h.divide_exact(profile.f()) {
                Some(q) => {
                    h = q;
                    k -= 1;
                    cancelled += 1;
                }
                None => break,
            }
        }
        Ok((MeromorphicGerm { numerator: h, pole: k }, cancelled))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn pole(&self) -> u32 {
        self.pole
    }

    /// `∂_i (h / f^k) = (f ∂_i h − k h ∂_i f) / f^(k+1)`, normalized.
    pub fn partial_derivative(
        &self,
        index: usize,
        profile: &SingularityProfile,
    ) -> Result<MeromorphicGerm, DmodError> {
        let f = profile.f();
        let dh = self.numerator.partial_derivative(index)?;
        let df = f.partial_derivative(index)?;
        let k = BigRational::from_integer(self.pole.into());
        let numerator = &(f * &dh) - &(&self.numerator * &df).scale(&k);
        Ok(Self::normalize(numerator, self.pole + 1, profile)?.0)
    }
}

/// Monomials `x^β` for which `[h·x^β dx / f^k]` can be nonzero: for each graded
/// component `h_d` of `h`, exactly those with `deg_w(β) = k − Σw − d`.
pub fn test_monomials(germ: &MeromorphicGerm, profile: &SingularityProfile) -> Vec<Monomial> {
    if germ.pole == 0 {
        return Vec::new();
    }
    let shift = BigRational::from_integer(germ.pole.into()) - profile.weight_sum();
    let components = germ
        .numerator
        .graded_components(profile.weights())
        .expect("arity checked at construction");
    let mut out = BTreeSet::new();
    for degree in components.keys() {
        out.extend(profile.weights().monomials_of_degree(&(&shift - degree)));
    }
    out.into_iter().collect()
}

/// The classes `[h·x^β dx / f^k]` over all test monomials.
pub fn residue_classes(
    germ: &MeromorphicGerm,
    profile: &SingularityProfile,
) -> Result<Vec<(Monomial, CohomologyClass)>, DmodError> {
    let nvars = profile.nvars();
    test_monomials(germ, profile)
        .into_iter()
        .map(|beta| {
            let shifted = germ
                .numerator
                .mul_term(&beta, &BigRational::from_integer(1.into()));
            debug_assert_eq!(shifted.nvars(), nvars);
            let class = reduce_class(&shifted, germ.pole, profile)?;
            Ok((beta, class))
        })
        .collect()
}

/// True iff `s·ω` is exact for every holomorphic top form `ω`, i.e. `s ∈ L`.
pub fn vilonen_membership(
    germ: &MeromorphicGerm,
    profile: &SingularityProfile,
) -> Result<bool, DmodError> {
    Ok(residue_classes(germ, profile)?
        .iter()
        .all(|(_, c)| c.is_zero()))
}

/// True iff `s ∈ D·f^−(l+1)`: every class `[s·x^β dx]` lies in `P_l H'`.
pub fn power_membership(
    germ: &MeromorphicGerm,
    l: u32,
    profile: &SingularityProfile,
) -> Result<bool, DmodError> {
    Ok(residue_classes(germ, profile)?
        .iter()
        .all(|(_, c)| c.max_pole_level().is_none_or(|p| p <= l + 1)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PowerIndex {
    /// `s` lies in the intersection module `L`.
    InL,
    /// Least `l` with `s ∈ D·f^−(l+1)`.
    Power(u32),
}

#[derive(Clone, Debug)]
pub struct MembershipVerdict {
    pub index: PowerIndex,
    /// A test monomial whose class attains the highest pole level, with that class.
    pub witness: Option<(Monomial, CohomologyClass)>,
}

pub fn membership_verdict(
    germ: &MeromorphicGerm,
    profile: &SingularityProfile,
) -> Result<MembershipVerdict, DmodError> {
    let classes = residue_classes(germ, profile)?;
    let witness = classes
        .into_iter()
        .filter_map(|(b, c)| c.max_pole_level().map(|l| (l, b, c)))
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    Ok(match witness {
        None => MembershipVerdict {
            index: PowerIndex::InL,
            witness: None,
        },
        Some((level, beta, class)) => MembershipVerdict {
            index: PowerIndex::Power(level - 1),
            witness: Some((beta, class)),
        },
    })
}

pub fn min_power_index(
    germ: &MeromorphicGerm,
    profile: &SingularityProfile,
) -> Result<PowerIndex, DmodError> {
    Ok(membership_verdict(germ, profile)?.index)
}

/// Length of `D·M / L` for the O-module `M` generated by `gens`: the dimension of the
/// span in `H'` of all residue classes of the generators.
pub fn submodule_length(
    gens: &[MeromorphicGerm],
    profile: &SingularityProfile,
) -> Result<usize, DmodError> {
    let normalized: Vec<MeromorphicGerm> = gens
        .iter()
        .map(|g| MeromorphicGerm::normalize(g.numerator.clone(), g.pole, profile).map(|r| r.0))
        .collect::<Result<_, _>>()?;
    if !normalized.iter().any(|g| g.pole >= 1) {
        return Err(DmodError::GenericAgreementViolated(
            "no generator has a pole along f".into(),
        ));
    }
    let basis: Vec<Monomial> = profile
        .integral_classes()
        .into_iter()
        .map(|(b, _)| b)
        .collect();
    let mut span = SpanBuilder::new(basis.len());
    for g in &normalized {
        for (_, class) in residue_classes(g, profile)? {
            if !class.is_zero() {
                span.insert(&class.coordinates(&basis));
            }
        }
    }
    Ok(span.rank())
}

/// Length of `D·f^−(l+1) / L`, which is `dim P_l H'`.
pub fn length_power_quotient(profile: &SingularityProfile, l: usize) -> usize {
    pole_filtration_dims(profile, l).dims[l]
}

/// Length of the quotient by `L` of the D-module generated by the `l`-th Hodge piece;
/// in the quasi-homogeneous case the Hodge and pole-order filtrations coincide.
pub fn length_hodge_quotient(profile: &SingularityProfile, l: usize) -> usize {
    length_power_quotient(profile, l)
}

/// `dim F_0 H'`, the number of basis monomials with `ℓ(β) = 1`.
pub fn reduced_genus(profile: &SingularityProfile) -> usize {
    length_hodge_quotient(profile, 0)
}

/// Composition factors of the meromorphic functions: the structure sheaf, the
/// intersection module `L_Z`, and one copy of the point module per dimension of `H'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionSeries {
    pub structure_sheaf: usize,
    pub intersection_module: usize,
    pub point_modules: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthReport {
    pub hprime_dim: usize,
    pub pole_dims: FiltrationTable,
    pub reduced_genus: usize,
    /// Entry `l` is the length of `D·f^−(l+1) / L`.
    pub quotient_lengths: Vec<usize>,
    /// Length of the meromorphic functions themselves, `2 + dim H'`.
    pub total_length_including_o: usize,
    /// Length modulo the holomorphic functions, `1 + dim H'`.
    pub length_quotient_by_o: usize,
    pub composition: CompositionSeries,
}

pub fn meromorphic_length_report(profile: &SingularityProfile, l_max: usize) -> LengthReport {
    let pole_dims = pole_filtration_dims(profile, l_max);
    let hprime_dim = pole_dims.hprime_dim;
    LengthReport {
        hprime_dim,
        reduced_genus: pole_dims.dims[0],
        quotient_lengths: pole_dims.dims.clone(),
        pole_dims,
        total_length_including_o: 2 + hprime_dim,
        length_quotient_by_o: 1 + hprime_dim,
        composition: CompositionSeries {
            structure_sheaf: 1,
            intersection_module: 1,
            point_modules: hprime_dim,
        },
    }
}

/// Report for a global polynomial after checking that its hypersurface is singular at
/// the origin only; the lengths of the algebraic D-modules agree with the local ones.
pub fn algebraic_report(
    g: &Polynomial,
    l_max: usize,
) -> Result<(SingularityProfile, LengthReport), DmodError> {
    let mut ideal = vec![g.clone()];
    ideal.extend(jacobian_generators(g));
    if g.nvars() >= crate::singularity::MIN_VARIABLES
        && g.constant_term() == BigRational::from_integer(0.into())
        && !supported_only_at_origin(&ideal)
    {
        return Err(DmodError::MultipleOrNonIsolatedSingularities(
            "the ideal (g, ∂g) is not supported at the origin alone".into(),
        ));
    }
    let profile = build_profile(g).map_err(|e| match e {
        SingularityError::NonIsolated(msg) => DmodError::MultipleOrNonIsolatedSingularities(msg),
        other => other.into(),
    })?;
    let report = meromorphic_length_report(&profile, l_max);
    Ok((profile, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{brieskorn, from_exponents as poly};

    fn fermat3() -> SingularityProfile {
        build_profile(&brieskorn(&[3, 3, 3])).unwrap()
    }

    fn germ(terms: &[(&[u32], i64)], k: u32, p: &SingularityProfile) -> MeromorphicGerm {
        MeromorphicGerm::new(poly(terms), k, p).unwrap()
    }

    #[test]
    fn power_quotient_examples() {
        assert_eq!(length_power_quotient(&fermat3(), 0), 1);
        let quadric = build_profile(&brieskorn(&[2, 2, 2, 2])).unwrap();
        assert_eq!(length_power_quotient(&quadric, 0), 0);
        let e8 = build_profile(&brieskorn(&[2, 3, 5])).unwrap();
        for l in 0..4 {
            assert_eq!(length_power_quotient(&e8, l), 0);
        }
    }

    #[test]
    fn hodge_and_genus_examples() {
        let f5 = build_profile(&brieskorn(&[5, 5, 5])).unwrap();
        assert_eq!(length_hodge_quotient(&fermat3(), 0), 1);
        assert_eq!(length_hodge_quotient(&f5, 0), 6);
        assert_eq!(length_hodge_quotient(&f5, 1), 12);
        assert_eq!(length_hodge_quotient(&f5, 7), 12);
        assert_eq!(reduced_genus(&fermat3()), 1);
        assert_eq!(reduced_genus(&f5), 6);
        assert_eq!(reduced_genus(&build_profile(&brieskorn(&[2, 2, 2, 2])).unwrap()), 0);
    }

    #[test]
    fn report_examples() {
        let r = meromorphic_length_report(&fermat3(), 2);
        assert_eq!(r.total_length_including_o, 4);
        assert_eq!(r.length_quotient_by_o, 3);
        assert_eq!(r.quotient_lengths, vec![1, 2, 2]);
        assert_eq!(*r.quotient_lengths.last().unwrap(), 2);
        let r = meromorphic_length_report(&build_profile(&brieskorn(&[2, 3, 5])).unwrap(), 1);
        assert_eq!(r.total_length_including_o, 2);
        assert_eq!(r.quotient_lengths, vec![0, 0]);
        let r = meromorphic_length_report(&build_profile(&brieskorn(&[2, 2, 2])).unwrap(), 1);
        assert_eq!(r.total_length_including_o, 2);
        assert_eq!(r.hprime_dim, 0);
    }

    #[test]
    fn vilonen_examples() {
        let p = fermat3();
        assert!(vilonen_membership(&germ(&[(&[0, 0, 0], 1)], 0, &p), &p).unwrap());
        assert!(!vilonen_membership(&germ(&[(&[0, 0, 0], 1)], 1, &p), &p).unwrap());
        let x2_over_f = germ(&[(&[2, 0, 0], 1)], 1, &p);
        assert!(test_monomials(&x2_over_f, &p).is_empty());
        assert!(vilonen_membership(&x2_over_f, &p).unwrap());
    }

    #[test]
    fn power_membership_examples() {
        let p = fermat3();
        for l in 0..3u32 {
            let g = germ(&[(&[0, 0, 0], 1)], l + 1, &p);
            assert!(power_membership(&g, l, &p).unwrap());
        }
        let xyz = germ(&[(&[1, 1, 1], 1)], 2, &p);
        assert!(!power_membership(&xyz, 0, &p).unwrap());
        assert!(power_membership(&xyz, 1, &p).unwrap());
    }

    #[test]
    fn min_power_examples() {
        let p = fermat3();
        assert_eq!(min_power_index(&germ(&[(&[0, 0, 0], 1)], 1, &p), &p), Ok(PowerIndex::Power(0)));
        assert_eq!(min_power_index(&germ(&[(&[1, 1, 1], 1)], 2, &p), &p), Ok(PowerIndex::Power(1)));
        assert_eq!(min_power_index(&germ(&[(&[2, 0, 0], 1)], 1, &p), &p), Ok(PowerIndex::InL));
    }

    #[test]
    fn submodule_examples() {
        let p = fermat3();
        assert_eq!(submodule_length(&[germ(&[(&[0, 0, 0], 1)], 1, &p)], &p), Ok(1));
        assert_eq!(submodule_length(&[germ(&[(&[0, 0, 0], 1)], 2, &p)], &p), Ok(2));
        assert_eq!(submodule_length(&[germ(&[(&[2, 0, 0], 1)], 1, &p)], &p), Ok(0));
        assert!(matches!(
            submodule_length(&[germ(&[(&[1, 0, 0], 1)], 0, &p)], &p),
            Err(DmodError::GenericAgreementViolated(_))
        ));
    }

    #[test]
    fn normalization() {
        let p = fermat3();
        let f2 = p.f() * p.f();
        assert_eq!(MeromorphicGerm::new(f2.clone(), 3, &p), Err(DmodError::NotReduced));
        let (g, cancelled) = MeromorphicGerm::normalize(f2, 3, &p).unwrap();
        assert_eq!(cancelled, 2);
        assert_eq!(g.pole(), 1);
        assert_eq!(g.numerator(), &poly(&[(&[0, 0, 0], 1)]));
    }

    #[test]
    fn algebraic_examples() {
        let (_, r) = algebraic_report(&brieskorn(&[3, 3, 3]), 2).unwrap();
        assert_eq!(r, meromorphic_length_report(&fermat3(), 2));
        assert!(matches!(
            algebraic_report(&poly(&[(&[2, 2, 0], 1)]), 2),
            Err(DmodError::MultipleOrNonIsolatedSingularities(_))
        ));
        let (_, r) = algebraic_report(&brieskorn(&[2, 2, 2, 2]), 2).unwrap();
        assert_eq!(r.total_length_including_o, 3);
        assert_eq!(r.quotient_lengths[0], 0);
        let cubic_plus = poly(&[(&[4, 0, 0], 1), (&[0, 4, 0], 1), (&[0, 0, 4], 1), (&[1, 1, 1], 1)]);
        assert!(matches!(
            algebraic_report(&cubic_plus, 2),
            Err(DmodError::Singularity(SingularityError::NotQuasiHomogeneous(_)))
        ));
    }
}
