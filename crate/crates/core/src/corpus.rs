//! Test polynomials: the Brieskorn–Pham family and a few mixed-weight singularities.

use crate::polyalg::{integer, Monomial, Polynomial};

/// `x1^a1 + … + xn^an`.
pub fn brieskorn(exponents: &[u32]) -> Polynomial {
    let n = exponents.len();
    let mut p = Polynomial::zero(n);
    for (i, &a) in exponents.iter().enumerate() {
        let mut e = vec![0; n];
        e[i] = a;
        p = &p + &Polynomial::monomial(n, Monomial::new(e), integer(1));
    }
    p
}

/// Polynomial from `(exponents, integer coefficient)` pairs; all exponent vectors must
/// have the same length.
pub fn from_exponents(terms: &[(&[u32], i64)]) -> Polynomial {
    let n = terms.first().map_or(0, |(e, _)| e.len());
    let mut p = Polynomial::zero(n);
    for (e, c) in terms {
        p = &p + &Polynomial::monomial(n, Monomial::new(e.to_vec()), integer(*c));
    }
    p
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub polynomial: Polynomial,
    pub variables: Vec<String>,
}

impl CorpusEntry {
    pub fn text(&self) -> String {
        self.polynomial.render(&self.variables)
    }
}

/// Largest Milnor number admitted to the built-in corpus.
pub const BUILTIN_MAX_MU: usize = 64;

fn names(n: usize) -> Vec<String> {
    ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
}

/// Brieskorn–Pham `x^a+y^b+z^c` with `2 ≤ a ≤ b ≤ c ≤ 6` and Milnor number at most
/// [`BUILTIN_MAX_MU`], followed by four-variable and mixed-weight examples.
pub fn builtin() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for a in 2..=6u32 {
        for b in a..=6 {
            for c in b..=6 {
                if ((a - 1) * (b - 1) * (c - 1)) as usize > BUILTIN_MAX_MU {
                    continue;
                }
                out.push(CorpusEntry {
                    name: format!("brieskorn-{a}-{b}-{c}"),
                    polynomial: brieskorn(&[a, b, c]),
                    variables: names(3),
                });
            }
        }
    }
    let extra: [(&str, Polynomial); 6] = [
        ("quadric-4", brieskorn(&[2, 2, 2, 2])),
        ("fermat-cubic-4", brieskorn(&[3, 3, 3, 3])),
        (
            "d4-a2",
            from_exponents(&[(&[2, 1, 0], 1), (&[0, 3, 0], 1), (&[0, 0, 3], 1)]),
        ),
        (
            "cubic-xyz",
            from_exponents(&[(&[3, 0, 0], 1), (&[0, 3, 0], 1), (&[0, 0, 3], 1), (&[1, 1, 1], 1)]),
        ),
        (
            "e7-like",
            from_exponents(&[(&[3, 0, 0], 1), (&[1, 3, 0], 1), (&[0, 0, 2], 1)]),
        ),
        (
            "d5-a2",
            from_exponents(&[(&[2, 1, 0], 1), (&[0, 4, 0], 1), (&[0, 0, 3], 1)]),
        ),
    ];
    for (name, polynomial) in extra {
        let n = polynomial.nvars();
        out.push(CorpusEntry {
            name: name.to_string(),
            polynomial,
            variables: names(n),
        });
    }
    out
}
