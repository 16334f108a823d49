use dlength_core::corpus::{self, CorpusEntry};
use dlength_core::derham::{class_is_zero, pole_filtration_dims, reduce_class};
use dlength_core::oracle::{oracle_hprime_dim, Oracle};
use dlength_core::polyalg::{integer, Monomial, Polynomial};
use dlength_core::singularity::{build_profile, SingularityProfile};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_coefficient(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let c = integer(rng.gen_range(-4..=4));
        if !c.is_zero() {
            return c;
        }
    }
}

fn pick(rng: &mut ChaCha8Rng, monomials: &[Monomial], count: usize, n: usize) -> Polynomial {
    let mut p = Polynomial::zero(n);
    if monomials.is_empty() {
        return p;
    }
    for _ in 0..count {
        let m = monomials[rng.gen_range(0..monomials.len())].clone();
        p = &p + &Polynomial::monomial(n, m, random_coefficient(rng));
    }
    p
}

/// Numerator/pole pairs mixing three shapes: arbitrary low-degree monomials (mostly
/// nonzero Euler degree), pure Euler-degree-zero combinations, and exact forms
/// `d(g ω_i / f^(k−1))` perturbed by a degree-zero monomial.
fn random_pairs(profile: &SingularityProfile, count: usize, seed: u64) -> Vec<(Polynomial, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = profile.nvars();
    let f = profile.f();
    let w = profile.weights();
    let sum = profile.weight_sum();
    let low: Vec<Monomial> = (0..=3)
        .flat_map(|d| all_monomials(n, d))
        .collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(1..=n as u32);
        let zero_degree = w.monomials_of_degree(&(integer(k as i64) - &sum));
        let terms = rng.gen_range(1..=3);
        let a = match out.len() % 3 {
            0 => pick(&mut rng, &low, terms, n),
            1 => pick(&mut rng, &zero_degree, terms, n),
            _ => {
                if k < 2 {
                    continue;
                }
                let i = rng.gen_range(0..n);
                let g_deg = integer(k as i64 - 1) - &sum + &w.weights()[i];
                let g = pick(&mut rng, &w.monomials_of_degree(&g_deg), 2, n);
                let exact = &(f * &g.partial_derivative(i).unwrap())
                    - &(&g * &f.partial_derivative(i).unwrap()).scale(&integer(k as i64 - 1));
                if rng.gen_bool(0.5) {
                    &exact + &pick(&mut rng, &zero_degree, 1, n)
                } else {
                    exact
                }
            }
        };
        out.push((a, k));
    }
    out
}

fn all_monomials(n: usize, degree: u32) -> Vec<Monomial> {
    if n == 1 {
        return vec![Monomial::new(vec![degree])];
    }
    let mut out = Vec::new();
    for first in 0..=degree {
        for rest in all_monomials(n - 1, degree - first) {
            let mut e = vec![first];
            e.extend_from_slice(rest.exponents());
            out.push(Monomial::new(e));
        }
    }
    out
}

fn corpus_profiles() -> Vec<(CorpusEntry, SingularityProfile)> {
    corpus::builtin()
        .into_iter()
        .map(|e| {
            let p = build_profile(&e.polynomial).unwrap();
            (e, p)
        })
        .collect()
}

#[test]
fn spectral_filtration_matches_oracle_on_corpus() {
    for (entry, profile) in corpus_profiles() {
        let n = profile.nvars();
        let spectral = pole_filtration_dims(&profile, n);
        let mut oracle = Oracle::new(&profile);
        let brute = oracle.pole_dims(n).unwrap();
        assert_eq!(spectral, brute, "{}", entry.name);
        let integral = profile
            .spectral()
            .iter()
            .filter(|l| l.is_integer())
            .count();
        assert_eq!(oracle_hprime_dim(&profile, n as u32).unwrap(), integral, "{}", entry.name);
    }
}

#[test]
fn reduction_matches_oracle_on_random_forms() {
    for (idx, (entry, profile)) in corpus_profiles().into_iter().enumerate() {
        let mut oracle = Oracle::new(&profile);
        let mut vanished = 0;
        let pairs = random_pairs(&profile, 100, 1000 + idx as u64);
        for (a, k) in &pairs {
            let reduced = class_is_zero(&reduce_class(a, *k, &profile).unwrap());
            let brute = oracle.class_vanishes(a, *k).unwrap();
            assert_eq!(reduced, brute, "{}: {} at pole {k}", entry.name, a);
            vanished += reduced as usize;
        }
        // both outcomes must be exercised unless the cohomology is trivial
        assert!(vanished > 0, "{}", entry.name);
        if profile.integral_classes().is_empty() {
            assert_eq!(vanished, pairs.len());
        } else {
            assert!(vanished < pairs.len(), "{}", entry.name);
        }
    }
}

#[test]
fn reduction_is_linear_and_compatible_with_pole_shift() {
    let profile = build_profile(&corpus::brieskorn(&[3, 3, 4])).unwrap();
    let f = profile.f();
    let pairs = random_pairs(&profile, 60, 7);
    for pair in pairs.chunks(2) {
        let [(a, k), (b, _)] = pair else { continue };
        let sum = reduce_class(&(a + b), *k, &profile).unwrap();
        let separate = reduce_class(a, *k, &profile)
            .unwrap()
            .add(&reduce_class(b, *k, &profile).unwrap());
        assert_eq!(sum, separate);
        // A/f^k = A·f/f^(k+1)
        assert_eq!(
            reduce_class(&(a * f), k + 1, &profile).unwrap(),
            reduce_class(a, *k, &profile).unwrap()
        );
    }
}

#[test]
fn jacobian_multiples_reduce_to_divergence() {
    // g ∂_i f dx / f^k ≡ (1/(k−1)) ∂_i g dx / f^(k−1)
    let profile = build_profile(&corpus::from_exponents(&[
        (&[2, 1, 0], 1),
        (&[0, 3, 0], 1),
        (&[0, 0, 3], 1),
    ]))
    .unwrap();
    let f = profile.f();
    let w = profile.weights();
    let sum = profile.weight_sum();
    for k in 2..=4u32 {
        for i in 0..3 {
            let g_deg = integer(k as i64 - 1) - &sum + &w.weights()[i];
            for m in w.monomials_of_degree(&g_deg) {
                let g = Polynomial::monomial(3, m, integer(1));
                let lhs = reduce_class(&(&g * &f.partial_derivative(i).unwrap()), k, &profile).unwrap();
                let rhs = reduce_class(
                    &g.partial_derivative(i).unwrap().scale(&(integer(1) / integer(k as i64 - 1))),
                    k - 1,
                    &profile,
                )
                .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
