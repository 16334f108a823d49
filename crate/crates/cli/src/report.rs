use serde::{Deserialize, Serialize};

/// Result of `analyze`. Field order is the serialization order; rationals are strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    pub variables: Vec<String>,
    pub weights: Vec<String>,
    pub mu: usize,
    /// Spectral values `ℓ(β)`, ascending, with multiplicity.
    pub spectral: Vec<String>,
    pub hprime_dim: usize,
    pub pole_dims: Vec<usize>,
    pub reduced_genus: usize,
    pub quotient_lengths: Vec<usize>,
    /// Composition length of the meromorphic functions, counting the structure sheaf.
    #[serde(rename = "total_length_including_O")]
    pub total_length_including_o: usize,
    /// Composition length modulo the holomorphic functions.
    #[serde(rename = "length_quotient_by_O")]
    pub length_quotient_by_o: usize,
    pub oracle: Option<OracleReport>,
    pub version: String,
    pub order: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub pole_cap: u32,
    pub hprime_dim: usize,
    pub pole_dims: Vec<usize>,
    /// Basis forms `x^β dx / f^k` whose vanishing was decided both ways.
    pub classes_checked: usize,
    pub disagreements: Vec<String>,
    pub agrees: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<26}{v}\n"));
        line("input", self.input.clone());
        line("variables", self.variables.join(", "));
        line("weights", self.weights.join(", "));
        line("order", self.order.clone());
        line("mu", self.mu.to_string());
        line("spectral", self.spectral.join(" "));
        line("hprime_dim", self.hprime_dim.to_string());
        line("pole_dims", format!("{:?}", self.pole_dims));
        line("reduced_genus", self.reduced_genus.to_string());
        line("quotient_lengths", format!("{:?}", self.quotient_lengths));
        line("total_length_including_O", self.total_length_including_o.to_string());
        line("length_quotient_by_O", self.length_quotient_by_o.to_string());
        if let Some(o) = &self.oracle {
            line(
                "oracle",
                format!(
                    "{} (K={}, hprime_dim {}, pole_dims {:?}, {} classes checked)",
                    if o.agrees { "agrees" } else { "DISAGREES" },
                    o.pole_cap,
                    o.hprime_dim,
                    o.pole_dims,
                    o.classes_checked
                ),
            );
            for d in &o.disagreements {
                line("", d.clone());
            }
        }
        line("version", self.version.clone());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTerm {
    pub monomial: String,
    pub pole: u32,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Test monomial `x^β` such that `[s·x^β dx]` attains the highest pole level.
    pub test_monomial: String,
    pub class: Vec<ClassTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub input: String,
    pub variables: Vec<String>,
    pub element: String,
    /// `h/f^k` after cancelling factors of `f`.
    pub normalized_numerator: String,
    pub normalized_pole: u32,
    pub cancelled_factors: u32,
    /// `in_L` or `min_power_index`.
    pub verdict: String,
    pub min_power_index: Option<u32>,
    pub witness: Option<Witness>,
    pub version: String,
}

impl MembershipReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
