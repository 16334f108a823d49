use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use dlength_core::derham::{class_is_zero, reduce_class};
use dlength_core::dmodlen::{
    membership_verdict, meromorphic_length_report, submodule_length, DmodError, MeromorphicGerm,
    PowerIndex,
};
use dlength_core::oracle::Oracle;
use dlength_core::polyalg::Polynomial;
use dlength_core::singularity::{build_profile, SingularityError, SingularityProfile};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::{parse_element, parse_polynomial, ParseError};
use crate::report::{ClassTerm, MembershipReport, OracleReport, Report, Witness};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NON_ISOLATED: i32 = 2;
pub const EXIT_NOT_QUASI_HOMOGENEOUS: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_ORACLE_DISAGREEMENT: i32 = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Singularity(#[from] SingularityError),
    #[error(transparent)]
    Dmod(#[from] DmodError),
    #[error("invalid request: {0}")]
    Request(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Request(_) => EXIT_PARSE,
            CliError::Singularity(e) | CliError::Dmod(DmodError::Singularity(e)) => match e {
                SingularityError::NonIsolated(_) => EXIT_NON_ISOLATED,
                SingularityError::NotQuasiHomogeneous(_) => EXIT_NOT_QUASI_HOMOGENEOUS,
                SingularityError::Domain(_) => EXIT_FAILURE,
            },
            CliError::Dmod(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Request(_) => "InvalidRequest",
            CliError::Singularity(e) | CliError::Dmod(DmodError::Singularity(e)) => match e {
                SingularityError::NonIsolated(_) => "NonIsolated",
                SingularityError::NotQuasiHomogeneous(_) => "NotQuasiHomogeneous",
                SingularityError::Domain(_) => "Domain",
            },
            CliError::Dmod(_) => "Membership",
            CliError::Io(_) => "Io",
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            error: self.kind().to_string(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }
}

/// Structured error, emitted as JSON on stderr.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisRequest {
    pub polynomial: String,
    pub variables: Vec<String>,
    /// Defaults to `n − 1`.
    pub l_max: Option<usize>,
    pub format: Format,
    pub oracle: bool,
    pub pole_cap: Option<u32>,
}

impl AnalysisRequest {
    pub fn new(polynomial: &str, variables: &[&str]) -> Self {
        AnalysisRequest {
            polynomial: polynomial.to_string(),
            variables: variables.iter().map(|s| s.to_string()).collect(),
            l_max: None,
            format: Format::Json,
            oracle: false,
            pole_cap: None,
        }
    }
}

fn rationals(values: &[BigRational]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

/// Parses and profiles, mapping failures to the exit-code contract.
pub fn profile_for(text: &str, variables: &[String]) -> Result<SingularityProfile, CliError> {
    let f = parse_polynomial(text, variables)?;
    Ok(build_profile(&f)?)
}

pub fn run_analyze(req: &AnalysisRequest) -> Result<Report, CliError> {
    let profile = profile_for(&req.polynomial, &req.variables)?;
    let l_max = req.l_max.unwrap_or(profile.nvars() - 1);
    let lengths = meromorphic_length_report(&profile, l_max);
    let oracle = req
        .oracle
        .then(|| oracle_report(&profile, l_max, req.pole_cap, &lengths.pole_dims.dims, &req.variables));
    Ok(Report {
        input: req.polynomial.clone(),
        variables: req.variables.clone(),
        weights: profile.weights().render(),
        mu: profile.mu(),
        spectral: rationals(&profile.sorted_spectrum()),
        hprime_dim: lengths.hprime_dim,
        pole_dims: lengths.pole_dims.dims.clone(),
        reduced_genus: lengths.reduced_genus,
        quotient_lengths: lengths.quotient_lengths.clone(),
        total_length_including_o: lengths.total_length_including_o,
        length_quotient_by_o: lengths.length_quotient_by_o,
        oracle,
        version: VERSION.to_string(),
        order: profile.order().describe(&req.variables),
    })
}

/// Recomputes the filtration by brute force and decides every basis form
/// `x^β dx / f^⌈ℓ(β)⌉` both ways.
fn oracle_report(
    profile: &SingularityProfile,
    l_max: usize,
    pole_cap: Option<u32>,
    spectral_dims: &[usize],
    variables: &[String],
) -> OracleReport {
    let mut oracle = match pole_cap {
        Some(k) => Oracle::with_pole_cap(profile, k),
        None => Oracle::new(profile),
    };
    let mut disagreements = Vec::new();
    let (hprime_dim, pole_dims) = match oracle.pole_dims(l_max) {
        Ok(t) => (t.hprime_dim, t.dims),
        Err(e) => {
            disagreements.push(e.to_string());
            (0, Vec::new())
        }
    };
    let integral = profile.integral_classes().len();
    if hprime_dim != integral {
        disagreements.push(format!("hprime_dim: spectral {integral}, oracle {hprime_dim}"));
    }
    if pole_dims != spectral_dims {
        disagreements.push(format!("pole_dims: spectral {spectral_dims:?}, oracle {pole_dims:?}"));
    }
    let n = profile.nvars();
    let mut classes_checked = 0;
    for beta in profile.basis() {
        let level = profile.spectral_value(beta).ceil().to_integer();
        let pole: u32 = level.try_into().expect("spectral value is small");
        let numerator = Polynomial::monomial(n, beta.clone(), BigRational::from_integer(1.into()));
        let reduced = reduce_class(&numerator, pole, profile).map(|c| class_is_zero(&c));
        let brute = oracle.class_vanishes(&numerator, pole);
        match (reduced, brute) {
            (Ok(a), Ok(b)) if a == b => {}
            (a, b) => disagreements.push(format!(
                "{}/f^{pole}: reduction {a:?}, oracle {b:?}",
                beta.render(variables)
            )),
        }
        classes_checked += 1;
    }
    OracleReport {
        pole_cap: oracle.pole_cap(),
        hprime_dim,
        pole_dims,
        classes_checked,
        agrees: disagreements.is_empty(),
        disagreements,
    }
}

/// Exit code for a successful analysis: nonzero only when the oracle disagreed.
pub fn report_exit_code(report: &Report) -> i32 {
    match &report.oracle {
        Some(o) if !o.agrees => EXIT_ORACLE_DISAGREEMENT,
        _ => EXIT_OK,
    }
}

pub fn run_membership(
    polynomial: &str,
    variables: &[String],
    element: &str,
) -> Result<MembershipReport, CliError> {
    let f = parse_polynomial(polynomial, variables)?;
    let (h, k) = parse_element(element, variables, &f)?;
    let profile = build_profile(&f)?;
    let (germ, cancelled) = MeromorphicGerm::normalize(h, k, &profile)?;
    let verdict = membership_verdict(&germ, &profile)?;
    let (name, index) = match verdict.index {
        PowerIndex::InL => ("in_L", None),
        PowerIndex::Power(l) => ("min_power_index", Some(l)),
    };
    let witness = verdict.witness.map(|(beta, class)| Witness {
        test_monomial: beta.render(variables),
        class: class
            .iter()
            .map(|(b, pole, c)| ClassTerm {
                monomial: b.render(variables),
                pole,
                coefficient: c.to_string(),
            })
            .collect(),
    });
    Ok(MembershipReport {
        input: polynomial.to_string(),
        variables: variables.to_vec(),
        element: element.to_string(),
        normalized_numerator: germ.numerator().render(variables),
        normalized_pole: germ.pole(),
        cancelled_factors: cancelled,
        verdict: name.to_string(),
        min_power_index: index,
        witness,
        version: VERSION.to_string(),
    })
}

/// One request in a corpus file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRequest {
    #[serde(default)]
    pub name: Option<String>,
    pub poly: String,
    pub vars: Vec<String>,
    #[serde(default)]
    pub lmax: Option<usize>,
    #[serde(default)]
    pub pole_cap: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub oracle_agrees: bool,
    /// Length of the module generated by `1/f^(l+1)`, computed from residues, matches
    /// the filtration dimension for every `l ≤ n − 2`.
    pub generator_lengths_agree: bool,
    pub pole_dims_monotone: bool,
    pub spectrum_symmetric: bool,
}

impl Checks {
    pub fn passed(&self) -> bool {
        self.oracle_agrees
            && self.generator_lengths_agree
            && self.pole_dims_monotone
            && self.spectrum_symmetric
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntryResult {
    pub source: String,
    /// `ok`, `failed` (a consistency check failed) or the error kind.
    pub status: String,
    pub report: Option<Report>,
    pub checks: Option<Checks>,
    pub error: Option<ErrorBody>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub entries: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRun {
    pub results: Vec<CorpusEntryResult>,
    pub summary: CorpusSummary,
}

impl CorpusRun {
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 {
            EXIT_ORACLE_DISAGREEMENT
        } else {
            EXIT_OK
        }
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&serde_json::to_string(r).expect("serializes"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary).expect("serializes"));
        out.push('\n');
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<40} {:<20} {:>4} {:>6} {:<14}\n",
            "source", "status", "mu", "H'", "pole_dims"
        );
        for r in &self.results {
            let (mu, h, dims) = r.report.as_ref().map_or((String::new(), String::new(), String::new()), |rep| {
                (rep.mu.to_string(), rep.hprime_dim.to_string(), format!("{:?}", rep.pole_dims))
            });
            out.push_str(&format!("{:<40} {:<20} {:>4} {:>6} {:<14}\n", r.source, r.status, mu, h, dims));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{} entries: {} passed, {} failed, {} errors\n",
            s.entries, s.passed, s.failed, s.errors
        ));
        out
    }
}

/// Requests in a corpus, each paired with where it came from. Unreadable files become
/// per-entry errors.
pub type CorpusInput = Vec<(String, Result<CorpusRequest, CliError>)>;

pub fn builtin_requests() -> CorpusInput {
    dlength_core::corpus::builtin()
        .into_iter()
        .map(|e| {
            let req = CorpusRequest {
                name: Some(e.name.clone()),
                poly: e.text(),
                vars: e.variables.clone(),
                lmax: None,
                pole_cap: None,
            };
            (e.name, Ok(req))
        })
        .collect()
}

/// Reads `*.json` and `*.jsonl` files in name order. A file holds either one request
/// object or one request per line.
pub fn read_corpus_dir(dir: &Path) -> Result<CorpusInput, CliError> {
    let listing = fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = listing
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(p.extension().and_then(|s| s.to_str()), Some("json" | "jsonl"))
        })
        .collect();
    files.sort();
    let mut out = Vec::new();
    for path in files {
        let source = path.file_name().unwrap_or_default().to_string_lossy().to_string();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                out.push((source, Err(CliError::Io(format!("{}: {e}", path.display())))));
                continue;
            }
        };
        if let Ok(req) = serde_json::from_str::<CorpusRequest>(&text) {
            out.push((source, Ok(req)));
            continue;
        }
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let req = serde_json::from_str::<CorpusRequest>(line)
                .map_err(|e| CliError::Request(e.to_string()));
            out.push((format!("{source}:{}", i + 1), req));
        }
    }
    Ok(out)
}

fn run_entry(source: String, request: Result<CorpusRequest, CliError>) -> CorpusEntryResult {
    let failure = |source: String, e: CliError| CorpusEntryResult {
        source,
        status: e.kind().to_string(),
        report: None,
        checks: None,
        error: Some(e.body()),
    };
    let request = match request {
        Ok(r) => r,
        Err(e) => return failure(source, e),
    };
    let source = request.name.clone().unwrap_or(source);
    let analysis = AnalysisRequest {
        polynomial: request.poly.clone(),
        variables: request.vars.clone(),
        l_max: request.lmax,
        format: Format::Json,
        oracle: true,
        pole_cap: request.pole_cap,
    };
    let report = match run_analyze(&analysis) {
        Ok(r) => r,
        Err(e) => return failure(source, e),
    };
    let profile = profile_for(&request.poly, &request.vars).expect("analyzed above");
    let checks = consistency_checks(&profile, &report);
    CorpusEntryResult {
        source,
        status: if checks.passed() { "ok" } else { "failed" }.to_string(),
        report: Some(report),
        checks: Some(checks),
        error: None,
    }
}

fn consistency_checks(profile: &SingularityProfile, report: &Report) -> Checks {
    let n = profile.nvars();
    let one = Polynomial::one(n);
    let full = meromorphic_length_report(profile, n);
    let generator_lengths_agree = (0..=n - 2).all(|l| {
        let germ = MeromorphicGerm::new(one.clone(), l as u32 + 1, profile).expect("1 is reduced");
        submodule_length(&[germ], profile).ok() == Some(full.pole_dims.dims[l])
    });
    let spectrum = profile.sorted_spectrum();
    let nq = BigRational::from_integer(n.into());
    let mut mirrored: Vec<BigRational> = spectrum.iter().map(|l| &nq - l).collect();
    mirrored.sort();
    Checks {
        oracle_agrees: report.oracle.as_ref().is_some_and(|o| o.agrees),
        generator_lengths_agree,
        pole_dims_monotone: full.pole_dims.dims.windows(2).all(|w| w[0] <= w[1])
            && full.pole_dims.dims[n - 2] == full.hprime_dim,
        spectrum_symmetric: spectrum == mirrored,
    }
}

/// Processes entries on a small worker pool; results keep input order.
pub fn run_corpus(input: CorpusInput) -> CorpusRun {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(input.len().max(1));
    let slots: Vec<Mutex<Option<CorpusEntryResult>>> = input.iter().map(|_| Mutex::new(None)).collect();
    type Job = (String, Result<CorpusRequest, CliError>);
    let jobs: Vec<Mutex<Option<Job>>> = input.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let (source, request) = job.lock().expect("job lock").take().expect("taken once");
                *slots[i].lock().expect("slot lock") = Some(run_entry(source, request));
            });
        }
    });
    let results: Vec<CorpusEntryResult> = slots
        .into_iter()
        .map(|s| s.into_inner().expect("slot lock").expect("filled"))
        .collect();
    let mut summary = CorpusSummary {
        entries: results.len(),
        ..Default::default()
    };
    for r in &results {
        match (&r.checks, &r.error) {
            (Some(c), _) if c.passed() => summary.passed += 1,
            (Some(_), _) => summary.failed += 1,
            _ => summary.errors += 1,
        }
    }
    CorpusRun { results, summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars3() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn analyze_examples() {
        let mut req = AnalysisRequest::new("x^3 + y^3 + z^3", &["x", "y", "z"]);
        req.l_max = Some(2);
        let r = run_analyze(&req).unwrap();
        assert_eq!(r.mu, 8);
        assert_eq!(r.hprime_dim, 2);
        assert_eq!(r.pole_dims, vec![1, 2, 2]);
        assert_eq!(r.reduced_genus, 1);
        assert_eq!(r.quotient_lengths, vec![1, 2, 2]);
        assert_eq!(r.total_length_including_o, 4);
        assert_eq!(r.length_quotient_by_o, 3);
        assert_eq!(r.weights, vec!["1/3"; 3]);
        assert!(r.oracle.is_none());

        let e = run_analyze(&AnalysisRequest::new("x^4 + y^4 + z^4 + x*y*z", &["x", "y", "z"])).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_NOT_QUASI_HOMOGENEOUS);
        let e = run_analyze(&AnalysisRequest::new("x^2*y", &["x", "y", "z"])).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_NON_ISOLATED);
        let e = run_analyze(&AnalysisRequest::new("x^2 +* y", &["x", "y", "z"])).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_PARSE);
        let e = run_analyze(&AnalysisRequest::new("x^2 + y^2", &["x", "y"])).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_FAILURE);
    }

    #[test]
    fn analyze_with_oracle() {
        let mut req = AnalysisRequest::new("x^2*y + y^3 + z^3", &["x", "y", "z"]);
        req.oracle = true;
        let r = run_analyze(&req).unwrap();
        let o = r.oracle.as_ref().unwrap();
        assert!(o.agrees, "{:?}", o.disagreements);
        assert_eq!(o.classes_checked, r.mu);
        assert_eq!(report_exit_code(&r), EXIT_OK);
    }

    #[test]
    fn membership_examples() {
        let f = "x^3 + y^3 + z^3";
        let r = run_membership(f, &vars3(), "x*y*z/f^2").unwrap();
        assert_eq!((r.verdict.as_str(), r.min_power_index), ("min_power_index", Some(1)));
        let w = r.witness.unwrap();
        assert_eq!(w.test_monomial, "1");
        assert_eq!(w.class[0].monomial, "x*y*z");
        assert_eq!(w.class[0].pole, 2);
        let r = run_membership(f, &vars3(), "1/f").unwrap();
        assert_eq!(r.min_power_index, Some(0));
        let r = run_membership(f, &vars3(), "x^2/f").unwrap();
        assert_eq!((r.verdict.as_str(), r.min_power_index), ("in_L", None));
        let r = run_membership(f, &vars3(), "x*f/f^2").unwrap();
        assert_eq!((r.normalized_pole, r.cancelled_factors), (1, 1));
        assert_eq!(r.verdict, "in_L");
        let e = run_membership(f, &vars3(), "1/g").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_PARSE);
    }

    #[test]
    fn report_round_trips_and_has_exact_keys() {
        let mut req = AnalysisRequest::new("x^2 + y^3 + z^5", &["x", "y", "z"]);
        req.oracle = true;
        let r = run_analyze(&req).unwrap();
        let json = r.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        let mut expected = vec![
            "input", "variables", "weights", "mu", "spectral", "hprime_dim", "pole_dims",
            "reduced_genus", "quotient_lengths", "total_length_including_O",
            "length_quotient_by_O", "oracle", "version", "order",
        ];
        let mut keys_sorted = keys.clone();
        keys_sorted.sort();
        expected.sort();
        assert_eq!(keys_sorted, expected);
        assert_eq!(r.spectral.first().map(String::as_str), Some("31/30"));
    }

    #[test]
    fn corpus_marks_bad_entries_and_continues() {
        let mut input = builtin_requests();
        input.truncate(2);
        input.push((
            "bad".into(),
            Ok(CorpusRequest {
                name: None,
                poly: "x^2*y".into(),
                vars: vars3(),
                lmax: None,
                pole_cap: None,
            }),
        ));
        input.push(("broken".into(), Err(CliError::Request("not json".into()))));
        let run = run_corpus(input);
        assert_eq!(run.summary, CorpusSummary { entries: 4, passed: 2, failed: 0, errors: 2 });
        assert_eq!(run.results[2].status, "NonIsolated");
        assert_eq!(run.results[3].status, "InvalidRequest");
        assert_eq!(run.exit_code(), EXIT_OK);
        assert_eq!(run_corpus(Vec::new()).summary, CorpusSummary::default());
    }
}
