//! Named check suites producing machine-readable reports.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::linalg::{self, c, CMat};
use crate::rng::{seeded, trial_seed};
use crate::statevec::{self, LayeredCircuit, StateVector};
use crate::symplectic::{self, CliffordMap, PauliString, StabilizerState};
use crate::zxcat::{self, Variant};
use crate::{agsp, glue, modular, prep};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Symplectic,
    Zxcat,
    Agsp,
    Prep,
    Modular,
    Glue,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 6] = [Suite::Symplectic, Suite::Zxcat, Suite::Agsp, Suite::Prep, Suite::Modular, Suite::Glue];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symplectic => "symplectic",
            Suite::Zxcat => "zxcat",
            Suite::Agsp => "agsp",
            Suite::Prep => "prep",
            Suite::Modular => "modular",
            Suite::Glue => "glue",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, SuiteError> {
        Suite::MODULES
            .into_iter()
            .chain([Suite::All])
            .find(|m| m.name() == s)
            .ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observed {
    Number(f64),
    Vector(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Gt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub observed: Observed,
    pub bound: Option<f64>,
    /// How `observed` must compare with `bound`; absent when `pass` combines several conditions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    pub pass: bool,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    fn base(check: &str, observed: Observed, bound: Option<f64>, relation: Option<Relation>, pass: bool) -> Self {
        Self {
            check: check.to_string(),
            params: BTreeMap::new(),
            observed,
            bound,
            relation,
            pass,
            runtime_ms: 0,
            details: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn compare(check: &str, observed: f64, relation: Relation, bound: f64) -> Self {
        let pass = match relation {
            Relation::Le => observed <= bound,
            Relation::Lt => observed < bound,
            Relation::Ge => observed >= bound,
            Relation::Gt => observed > bound,
        };
        Self::base(check, Observed::Number(observed), Some(bound), Some(relation), pass)
    }

    pub fn flag(check: &str, observed: Observed, pass: bool) -> Self {
        Self::base(check, observed, None, None, pass)
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    pub fn detail(mut self, key: &str, v: f64) -> Self {
        self.details.insert(key.to_string(), v);
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// `pass` recomputed from `observed`, `relation` and `bound` when all are present.
    pub fn derived_pass(&self) -> Option<bool> {
        match (&self.observed, self.bound, self.relation) {
            (Observed::Number(o), Some(b), Some(r)) => Some(Self::compare("", *o, r, b).pass),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteParams {
    pub n: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub trials: Option<usize>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self { n: None, seed: 7, tol: None, trials: None }
    }
}

impl SuiteParams {
    pub fn validate(&self) -> Result<(), SuiteError> {
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(SuiteError::InvalidParam(format!("tol must be positive, got {t}")));
            }
        }
        if self.trials == Some(0) {
            return Err(SuiteError::InvalidParam("trials must be positive".into()));
        }
        if let Some(n) = self.n {
            if n < 2 || n > crate::config::max_n() {
                return Err(SuiteError::InvalidParam(format!("n must lie in 2..={}, got {n}", crate::config::max_n())));
            }
        }
        Ok(())
    }

    fn n_or(&self, default: usize, max: usize) -> usize {
        self.n.unwrap_or(default).min(max)
    }

    fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

type Check = fn(&SuiteParams) -> Result<CheckReport, String>;

fn timed(name: &str, f: Check, p: &SuiteParams) -> CheckReport {
    let start = Instant::now();
    let mut r = f(p).unwrap_or_else(|e| CheckReport::flag(name, Observed::Number(f64::NAN), false).note(format!("error: {e}")));
    r.runtime_ms = start.elapsed().as_millis() as u64;
    r
}

fn checks(suite: Suite) -> Vec<(&'static str, Check)> {
    match suite {
        Suite::Symplectic => vec![
            ("symplectic.product_dense", sym_product_dense),
            ("symplectic.overlap_oracle", sym_overlap_oracle),
            ("symplectic.overlap_half_integer", sym_overlap_half_integer),
            ("symplectic.sandwich_oracle", sym_sandwich_oracle),
            ("symplectic.sandwich_equals_overlap", sym_sandwich_equals_overlap),
            ("symplectic.ghz_overlap", sym_ghz_overlap),
            ("symplectic.clifford_inverse", sym_clifford_inverse),
        ],
        Suite::Zxcat => vec![
            ("zxcat.normalization", zx_normalization),
            ("zxcat.z_expectation", zx_z_expectation),
            ("zxcat.mi_asymptote", zx_mi_asymptote),
            ("zxcat.mi_positive", zx_mi_positive),
            ("zxcat.crossterm", zx_crossterm),
            ("zxcat.witness_cu_identity", zx_cu_identity),
            ("zxcat.witness_cu_random", zx_cu_random),
            ("zxcat.witness_uc", zx_uc),
            ("zxcat.witness_uc_identity", zx_uc_identity),
            ("zxcat.amgm", zx_amgm),
        ],
        Suite::Agsp => vec![
            ("agsp.sup_error", agsp_sup_error),
            ("agsp.coeff_identity", agsp_coeff_identity),
            ("agsp.sign_alternation", agsp_signs),
            ("agsp.operator_check", agsp_operator),
            ("agsp.complexity_bound", agsp_complexity),
            ("agsp.local_indist", agsp_indist),
        ],
        Suite::Prep => vec![
            ("prep.sandwich", prep_sandwich),
            ("prep.global_clifford", prep_global_clifford),
            ("prep.adaptive_probability", prep_adaptive_probability),
            ("prep.adaptive_runs", prep_adaptive_runs),
            ("prep.mps", prep_mps),
            ("prep.push_relations", prep_push),
            ("prep.bell", prep_bell),
        ],
        Suite::Modular => vec![
            ("modular.relations", mod_relations),
            ("modular.dim_perms", mod_dim_perms),
            ("modular.verlinde", mod_verlinde),
            ("modular.case_identity", mod_case_identity),
            ("modular.case_swap", mod_case_swap),
            ("modular.lpu_search", mod_lpu_search),
            ("modular.offdiag_scan", mod_offdiag),
            ("modular.rigidity_scalar", mod_rigidity_scalar),
            ("modular.rigidity_nonscalar", mod_rigidity_nonscalar),
        ],
        Suite::Glue => vec![
            ("glue.conclusions", glue_conclusions),
            ("glue.petz", glue_petz),
            ("glue.purity", glue_purity),
            ("glue.planted", glue_planted),
            ("glue.premise_violation", glue_violation),
        ],
        Suite::All => Suite::MODULES.into_iter().flat_map(checks).collect(),
    }
}

/// Runs every check of `suite` in a fixed order. Randomized checks derive their
/// streams from `params.seed` only.
pub fn run_suite(suite: Suite, params: &SuiteParams) -> Result<Vec<CheckReport>, SuiteError> {
    params.validate()?;
    Ok(checks(suite).into_iter().map(|(name, f)| timed(name, f, params)).collect())
}

pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        0
    } else {
        1
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn dense_pauli(p: &PauliString) -> CMat {
    let mut m = CMat::identity(1, 1);
    for q in 0..p.num_qubits() {
        m = linalg::kron(&linalg::pauli_matrix(p.letter(q)), &m);
    }
    let ph = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][p.phase() as usize];
    m * ph
}

fn sym_product_dense(p: &SuiteParams) -> Result<CheckReport, String> {
    let trials = p.trials_or(100);
    let mut rng = seeded(p.seed);
    let mut worst = 0f64;
    for _ in 0..trials {
        let n = rng.gen_range(1..=3);
        let (a, b) = (PauliString::random(n, &mut rng), PauliString::random(n, &mut rng));
        let ab = a.mul(&b).map_err(e)?;
        worst = worst.max((dense_pauli(&ab) - dense_pauli(&a) * dense_pauli(&b)).norm());
        let dense_comm = (dense_pauli(&a) * dense_pauli(&b) - dense_pauli(&b) * dense_pauli(&a)).norm() < 1e-12;
        if dense_comm != a.commutes_with(&b).map_err(e)? {
            worst = f64::INFINITY;
        }
    }
    Ok(CheckReport::compare("symplectic.product_dense", worst, Relation::Le, p.tol_or(1e-12)).param("trials", trials))
}

fn random_pairs(p: &SuiteParams, default_trials: usize) -> Vec<(usize, u64)> {
    let trials = p.trials_or(default_trials);
    let nmax = p.n_or(6, 8);
    (0..trials).map(|t| (1 + t % nmax, trial_seed(p.seed, t as u64))).collect()
}

fn sym_overlap_oracle(p: &SuiteParams) -> Result<CheckReport, String> {
    let mut worst = 0f64;
    let pairs = random_pairs(p, 200);
    for &(n, s) in &pairs {
        let (s1, s2) = (StabilizerState::random(n, s), StabilizerState::random(n, s ^ 1));
        let o = symplectic::stabilizer_overlap(&s1, &s2).map_err(e)?;
        let v1 = statevec::to_statevector(&s1).map_err(e)?;
        let v2 = statevec::to_statevector(&s2).map_err(e)?;
        worst = worst.max((o - v1.overlap(&v2).map_err(e)?).abs());
    }
    Ok(CheckReport::compare("symplectic.overlap_oracle", worst, Relation::Le, p.tol_or(1e-10)).param("pairs", pairs.len()))
}

fn sym_overlap_half_integer(p: &SuiteParams) -> Result<CheckReport, String> {
    let mut worst = 0f64;
    let mut nonzero = 0usize;
    for &(n, s) in &random_pairs(p, 200) {
        let (s1, s2) = (StabilizerState::random(n, s), StabilizerState::random(n, s ^ 1));
        let o = symplectic::stabilizer_overlap(&s1, &s2).map_err(e)?;
        if o > 0.0 {
            nonzero += 1;
            let k = -2.0 * o.log2();
            worst = worst.max((k - k.round()).abs());
        }
    }
    Ok(CheckReport::compare("symplectic.overlap_half_integer", worst, Relation::Le, 1e-12).detail("nonzero", nonzero as f64))
}

fn sandwich_cases(p: &SuiteParams) -> Vec<(StabilizerState, StabilizerState, PauliString)> {
    random_pairs(p, 200)
        .into_iter()
        .map(|(n, s)| {
            let mut rng = seeded(s ^ 2);
            (StabilizerState::random(n, s), StabilizerState::random(n, s ^ 1), PauliString::random(n, &mut rng))
        })
        .collect()
}

fn sym_sandwich_oracle(p: &SuiteParams) -> Result<CheckReport, String> {
    let mut worst = 0f64;
    for (s1, s2, pauli) in sandwich_cases(p) {
        let val = symplectic::pauli_sandwich(&s2, &pauli, &s1).map_err(e)?;
        let v1 = statevec::to_statevector(&s1).map_err(e)?;
        let v2 = statevec::to_statevector(&s2).map_err(e)?;
        let pv = v1.apply_pauli(&pauli).map_err(e)?;
        worst = worst.max((val - v2.overlap(&pv).map_err(e)?).abs());
    }
    Ok(CheckReport::compare("symplectic.sandwich_oracle", worst, Relation::Le, p.tol_or(1e-10)))
}

fn sym_sandwich_equals_overlap(p: &SuiteParams) -> Result<CheckReport, String> {
    let mut worst = 0f64;
    let mut nonzero = 0usize;
    for (s1, s2, pauli) in sandwich_cases(p) {
        let val = symplectic::pauli_sandwich(&s2, &pauli, &s1).map_err(e)?;
        let base = symplectic::stabilizer_overlap(&s1, &s2).map_err(e)?;
        if val > 0.0 && base > 0.0 {
            nonzero += 1;
            worst = worst.max((val - base).abs());
        }
    }
    Ok(CheckReport::compare("symplectic.sandwich_equals_overlap", worst, Relation::Le, p.tol_or(1e-10))
        .detail("qualifying_triples", nonzero as f64))
}

fn sym_ghz_overlap(p: &SuiteParams) -> Result<CheckReport, String> {
    let mut worst = 0f64;
    for n in 2..=8 {
        let o = symplectic::stabilizer_overlap(&StabilizerState::zero(n), &StabilizerState::ghz(n)).map_err(e)?;
        worst = worst.max((o * o - 0.5).abs());
    }
    Ok(CheckReport::compare("symplectic.ghz_overlap", worst, Relation::Le, p.tol_or(1e-12)))
}

fn sym_clifford_inverse(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(6, 64);
    let trials = p.trials_or(20);
    let mut failures = 0usize;
    for t in 0..trials {
        let cmap = symplectic::random_clifford(n, trial_seed(p.seed, t as u64));
        let round = cmap.then_map(&cmap.inverse()).map_err(e)?;
        if round != CliffordMap::identity(n) {
            failures += 1;
        }
    }
    Ok(CheckReport::compare("symplectic.clifford_inverse", failures as f64, Relation::Le, 0.0).param("n", n).param("trials", trials))
}

fn zx_normalization(p: &SuiteParams) -> Result<CheckReport, String> {
    let nmax = p.n_or(12, 14);
    let (mut norm_dev, mut orth) = (0f64, 0f64);
    for n in 1..=nmax {
        let plus = zxcat::build(n, Variant::Plus).map_err(e)?;
        let minus = zxcat::build(n, Variant::Minus).map_err(e)?;
        let iph = zxcat::build(n, Variant::IPhase).map_err(e)?;
        for v in [&plus, &minus, &iph] {
            norm_dev = norm_dev.max((v.norm() - 1.0).abs());
        }
        orth = orth.max(plus.overlap(&minus).map_err(e)?);
    }
    Ok(CheckReport::compare("zxcat.normalization", norm_dev.max(orth), Relation::Le, p.tol_or(1e-12))
        .param("max_n", nmax)
        .detail("norm_deviation", norm_dev)
        .detail("plus_minus_overlap", orth))
}

fn zx_z_expectation(p: &SuiteParams) -> Result<CheckReport, String> {
    let nmax = p.n_or(12, 14);
    let mut worst = 0f64;
    for n in 2..=nmax {
        let v = zxcat::build(n, Variant::Plus).map_err(e)?;
        let z = v.pauli_expectation(&PauliString::z_on(n, 0)).map_err(e)?;
        worst = worst.max((z - zxcat::z_expectation_closed(n)).abs());
    }
    Ok(CheckReport::compare("zxcat.z_expectation", worst, Relation::Le, p.tol_or(1e-12)).param("max_n", nmax))
}

fn zx_mi_asymptote(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(12, 14);
    let mi = zxcat::mi_numeric(n).map_err(e)?;
    let target = zxcat::mi_asymptote();
    Ok(CheckReport::compare("zxcat.mi_asymptote", (mi - target).abs(), Relation::Le, 0.02)
        .param("n", n)
        .detail("mi", mi)
        .detail("asymptote", target))
}

fn zx_mi_positive(p: &SuiteParams) -> Result<CheckReport, String> {
    let nmax = p.n_or(12, 14);
    let values: Vec<f64> = (2..=nmax).map(zxcat::mi_numeric).collect::<Result<_, _>>().map_err(e)?;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut r = CheckReport::compare("zxcat.mi_positive", min, Relation::Gt, 0.0).param("max_n", nmax);
    r.observed = Observed::Vector(values);
    r.details.insert("min".into(), min);
    r.relation = None;
    r.bound = None;
    Ok(r)
}

fn zx_crossterm(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(10, 12);
    let trials = p.trials_or(200);
    let w = zxcat::crossterm_bound_check(n, p.seed, trials, 4).map_err(e)?;
    Ok(CheckReport::compare("zxcat.crossterm", w.get("violations"), Relation::Le, 0.0)
        .param("n", n)
        .param("trials", trials)
        .detail("max_ratio", w.get("max_ratio"))
        .detail("identity_overlap_deviation", w.get("identity_overlap_deviation")))
}

fn cu_report(name: &str, n: usize, w: &zxcat::WitnessReport) -> CheckReport {
    let mut r = CheckReport::compare(name, w.get("gap"), Relation::Gt, if name.ends_with("identity") { 0.2 } else { 0.1 }).param("n", n);
    for k in ["g", "g_prime", "g_g_prime"] {
        r.details.insert(k.into(), w.get(k));
    }
    r.notes.extend(w.notes.iter().cloned());
    r
}

fn zx_cu_identity(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(12, 14);
    let w = zxcat::cu_correlation_witness(n, &CliffordMap::identity(n), &LayeredCircuit::new(n)).map_err(e)?;
    let dev = ["g", "g_prime", "g_g_prime"].iter().map(|k| (w.get(k) - 0.5).abs()).fold(0.0, f64::max);
    let tol = 2f64.powf(1.0 - n as f64 / 2.0);
    let mut r = cu_report("zxcat.witness_cu_identity", n, &w).detail("max_half_deviation", dev).detail("half_tolerance", tol);
    r.pass &= dev <= tol;
    r.relation = None;
    Ok(r)
}

fn zx_cu_random(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(10, 14);
    let cmap = symplectic::random_clifford(n, p.seed);
    let mut rng = seeded(p.seed ^ 0xc0);
    let u = LayeredCircuit::random(n, 1, &mut rng);
    let w = zxcat::cu_correlation_witness(n, &cmap, &u).map_err(e)?;
    Ok(cu_report("zxcat.witness_cu_random", n, &w))
}

fn zx_uc(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(10, 14);
    let trials = p.trials_or(200);
    let mut violations = 0usize;
    let mut min_margin = f64::INFINITY;
    for t in 0..trials {
        let mut rng = seeded(trial_seed(p.seed, t as u64));
        let u = LayeredCircuit::random(n, 1, &mut rng);
        let w = zxcat::uc_sign_witness(n, &u).map_err(e)?;
        if !w.pass {
            violations += 1;
        }
        min_margin = min_margin.min(w.get("fidelity") - w.bounds["fidelity"]);
    }
    Ok(CheckReport::compare("zxcat.witness_uc", violations as f64, Relation::Le, 0.0)
        .param("n", n)
        .param("trials", trials)
        .detail("min_margin", min_margin))
}

fn zx_uc_identity(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(10, 14);
    let w = zxcat::uc_sign_witness(n, &LayeredCircuit::new(n)).map_err(e)?;
    let dev = (w.get("fidelity") - std::f64::consts::FRAC_1_SQRT_2).abs();
    Ok(CheckReport::compare("zxcat.witness_uc_identity", dev, Relation::Le, p.tol_or(1e-10)).param("n", n).detail("fidelity", w.get("fidelity")))
}

fn zx_amgm(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(10, 14);
    let mut rng = seeded(p.seed ^ 0xa9);
    let u = LayeredCircuit::random(n, 1, &mut rng);
    let w = zxcat::amgm_report(n, &u).map_err(e)?;
    let mut r = CheckReport::flag("zxcat.amgm", Observed::Number(w.get("sum_a_plus_b")), w.pass).param("n", n);
    for (k, v) in &w.observed {
        r.details.insert(k.clone(), *v);
    }
    Ok(r)
}

fn agsp_grid() -> Vec<(usize, usize)> {
    [16usize, 64, 256]
        .into_iter()
        .flat_map(|n| {
            let mmax = (3.0 * (n as f64).sqrt()).floor() as usize;
            (1..=mmax.min(n - 1)).map(move |m| (n, m))
        })
        .collect()
}

fn agsp_sup_error(_: &SuiteParams) -> Result<CheckReport, String> {
    let grid = agsp_grid();
    let mut worst = f64::NEG_INFINITY;
    for &(n, m) in &grid {
        let s = agsp::step_error_sup(&agsp::build_polynomial(n, m).map_err(e)?);
        worst = worst.max(s.sup / s.bound);
    }
    Ok(CheckReport::compare("agsp.sup_error", worst, Relation::Le, 1.0).param("grid_points", grid.len()).note("observed is max sup/bound"))
}

fn agsp_coeff_identity(_: &SuiteParams) -> Result<CheckReport, String> {
    let grid = agsp_grid();
    let mut mismatches = 0usize;
    let mut gap = 0f64;
    for &(n, m) in &grid {
        let id = agsp::coeff_sum_identity(&agsp::build_polynomial(n, m).map_err(e)?);
        if !id.exact_equal() {
            mismatches += 1;
        }
        gap = gap.max(id.relative_gap());
    }
    Ok(CheckReport::compare("agsp.coeff_identity", mismatches as f64, Relation::Le, 0.0)
        .param("grid_points", grid.len())
        .detail("max_relative_gap_float", gap))
}

fn agsp_signs(_: &SuiteParams) -> Result<CheckReport, String> {
    let grid = agsp_grid();
    let mut bad = 0usize;
    for &(n, m) in &grid {
        if !agsp::build_polynomial(n, m).map_err(e)?.signs_alternate() {
            bad += 1;
        }
    }
    Ok(CheckReport::compare("agsp.sign_alternation", bad as f64, Relation::Le, 0.0).param("grid_points", grid.len()))
}

fn agsp_operator(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(9, 12);
    let mut mismatches = 0usize;
    for m in 1..n {
        let op = agsp::agsp_operator_check(n, m).map_err(e)?;
        let (scalar, _) = agsp::step_error_sup_exact(&agsp::build_polynomial(n, m).map_err(e)?);
        if op.deviation_exact != scalar || !op.pass {
            mismatches += 1;
        }
    }
    Ok(CheckReport::compare("agsp.operator_check", mismatches as f64, Relation::Le, 0.0).param("n", n))
}

fn agsp_complexity(_: &SuiteParams) -> Result<CheckReport, String> {
    let cb = agsp::complexity_bound(1024, 64, 0.01, 0.1).map_err(e)?;
    let monotone = (1..8).all(|k| {
        let lo = agsp::complexity_bound(1024, 8 * k, 0.01, 0.1).map(|b| b.bound);
        let hi = agsp::complexity_bound(1024, 8 * (k + 1), 0.01, 0.1).map(|b| b.bound);
        matches!((lo, hi), (Ok(a), Ok(b)) if b >= a)
    });
    let mut r = CheckReport::flag("agsp.complexity_bound", Observed::Number(cb.bound), monotone && cb.bound.is_finite())
        .param("n", 1024)
        .param("d", 64)
        .param("epsilon", 0.01)
        .param("delta", 0.1)
        .note(cb.convention.clone());
    if let Some(t) = cb.depth_threshold {
        r.details.insert("depth_threshold".into(), t as f64);
    }
    Ok(r)
}

fn agsp_indist(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(10, 14);
    let scan = agsp::local_indist_scan(n, 3, p.trials_or(200), p.seed).map_err(e)?;
    Ok(CheckReport::compare("agsp.local_indist", scan.max_ratio, Relation::Le, 1.0)
        .param("n", n)
        .param("max_support", 3)
        .detail("operators", scan.count as f64)
        .detail("max_diff", scan.max_diff))
}

fn prep_sandwich(p: &SuiteParams) -> Result<CheckReport, String> {
    let nmax = p.n_or(12, 14);
    let worst = (1..=nmax).map(prep::sandwich_fidelity).collect::<Result<Vec<_>, _>>().map_err(e)?.into_iter().fold(1.0, f64::min);
    Ok(CheckReport::compare("prep.sandwich", 1.0 - worst, Relation::Le, p.tol_or(1e-12)).param("max_n", nmax).detail("min_fidelity", worst))
}

fn prep_global_clifford(_: &SuiteParams) -> Result<CheckReport, String> {
    let mut bad = 0usize;
    let mut dense = 0usize;
    for n in 1..=64 {
        let r = prep::verify_global_clifford(n, 4).map_err(e)?;
        dense += r.dense_ok.is_some() as usize;
        bad += (!r.pass()) as usize;
    }
    Ok(CheckReport::compare("prep.global_clifford", bad as f64, Relation::Le, 0.0)
        .param("max_n_symbolic", 64)
        .param("max_n_dense", 4)
        .detail("dense_checked", dense as f64))
}

fn prep_adaptive_probability(p: &SuiteParams) -> Result<CheckReport, String> {
    let nmax = p.n_or(12, 12);
    let (mut worst, mut min_p) = (0f64, 1f64);
    for n in 1..=nmax {
        let pr = prep::adaptive_success_probability(n).map_err(e)?;
        worst = worst.max((pr - prep::adaptive_success_closed(n)).abs());
        min_p = min_p.min(pr);
    }
    let mut r = CheckReport::compare("prep.adaptive_probability", worst, Relation::Le, p.tol_or(1e-12))
        .param("max_n", nmax)
        .detail("min_probability", min_p);
    r.pass &= min_p > 0.5;
    r.relation = None;
    Ok(r)
}

fn prep_adaptive_runs(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(5, crate::config::max_n() / 2);
    let trials = p.trials_or(50);
    let psi = zxcat::build(n, Variant::Plus).map_err(e)?;
    let (mut accepted, mut worst) = (0usize, 0f64);
    for t in 0..trials {
        let rec = prep::adaptive_run(n, trial_seed(p.seed, t as u64)).map_err(e)?;
        if rec.accepted {
            accepted += 1;
            worst = worst.max(1.0 - rec.post_state.overlap(&psi).map_err(e)?);
        }
    }
    Ok(CheckReport::compare("prep.adaptive_runs", worst, Relation::Le, p.tol_or(1e-10))
        .param("n", n)
        .param("trials", trials)
        .detail("acceptance_rate", accepted as f64 / trials as f64))
}

fn prep_mps(p: &SuiteParams) -> Result<CheckReport, String> {
    let nmax = p.n_or(12, 14);
    let mut worst = 0f64;
    for n in 1..=nmax {
        let psi = zxcat::build(n, Variant::Plus).map_err(e)?;
        for b in [prep::Boundary::Open, prep::Boundary::Periodic] {
            worst = worst.max(1.0 - prep::mps_contract(n, b).map_err(e)?.overlap(&psi).map_err(e)?);
        }
    }
    Ok(CheckReport::compare("prep.mps", worst, Relation::Le, p.tol_or(1e-12)).param("max_n", nmax))
}

fn prep_push(_: &SuiteParams) -> Result<CheckReport, String> {
    Ok(CheckReport::compare("prep.push_relations", prep::push_relation_residual(), Relation::Le, 1e-12))
}

fn prep_bell(p: &SuiteParams) -> Result<CheckReport, String> {
    let n = p.n_or(3, 4);
    let trials = p.trials_or(50);
    let (mut accepted, mut worst) = (0usize, 0f64);
    for t in 0..trials {
        let rec = prep::bell_protocol_run(n, trial_seed(p.seed, t as u64)).map_err(e)?;
        if rec.accepted {
            accepted += 1;
            worst = worst.max(1.0 - rec.fidelity);
        }
    }
    let mut r = CheckReport::compare("prep.bell", worst, Relation::Le, p.tol_or(1e-10))
        .param("n", n)
        .param("trials", trials)
        .detail("acceptance_rate", accepted as f64 / trials as f64);
    r.pass &= accepted > 0;
    r.relation = None;
    Ok(r)
}

fn mod_relations(_: &SuiteParams) -> Result<CheckReport, String> {
    let d = modular::double_fibonacci();
    let (s, t) = (d.s_matrix(), d.t_matrix());
    let s2 = &s * &s;
    let st = &s * &t;
    let dev_s2 = (&s2 - CMat::identity(4, 4)).norm();
    let dev_st = (&st * &st * &st - &s2).norm();
    Ok(CheckReport::compare("modular.relations", dev_s2.max(dev_st), Relation::Le, 1e-9)
        .detail("s_squared_minus_identity", dev_s2)
        .detail("st_cubed_minus_s_squared", dev_st))
}

fn mod_dim_perms(_: &SuiteParams) -> Result<CheckReport, String> {
    let perms = modular::dim_preserving_perms(&modular::double_fibonacci().dims);
    let ok = perms == vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]];
    Ok(CheckReport::flag("modular.dim_perms", Observed::Number(perms.len() as f64), ok))
}

fn mod_verlinde(_: &SuiteParams) -> Result<CheckReport, String> {
    let d = modular::double_fibonacci();
    let v = modular::verlinde_dim(&d.dims, 2).map_err(e)?;
    let ok = v == modular::GoldenNumber::from_ints(25, 0);
    Ok(CheckReport::flag("modular.verlinde", Observed::Number(v.to_f64()), ok).param("genus", 2).param("exact", v.to_string()))
}

fn mod_case_identity(_: &SuiteParams) -> Result<CheckReport, String> {
    let d = modular::double_fibonacci();
    let sol = modular::solve_pattern(&d, &[0, 1, 2, 3], &[0, 1, 2, 3]);
    let z = match &sol {
        modular::PatternSolve::Unique(z) => z.clone(),
        other => return Ok(CheckReport::flag("modular.case_identity", Observed::Number(f64::NAN), false).note(format!("{other:?}"))),
    };
    let ok = z.iter().all(|x| *x == modular::GoldenNumber::one());
    Ok(CheckReport::flag("modular.case_identity", Observed::Vector(z.iter().map(|x| x.to_f64()).collect()), ok))
}

fn mod_case_swap(p: &SuiteParams) -> Result<CheckReport, String> {
    let d = modular::double_fibonacci();
    let search = modular::lpu_search(&d, p.tol_or(1e-9)).map_err(e)?;
    let case = search.cases.iter().find(|cs| cs.perm == [0, 2, 1, 3]).ok_or("no surviving z for the swap")?;
    let mut r = CheckReport::compare("modular.case_swap", case.st_distance, Relation::Gt, 0.1);
    r.pass &= case.z.iter().all(|&z| z == 1.0);
    r.relation = None;
    Ok(r.detail("s_distance", case.s_distance))
}

fn mod_lpu_search(p: &SuiteParams) -> Result<CheckReport, String> {
    let search = modular::lpu_search(&modular::double_fibonacci(), p.tol_or(1e-9)).map_err(e)?;
    let ok = search.unresolved == 0 && search.survivors.len() == 1 && search.survivors[0].is_identity(1e-12);
    Ok(CheckReport::flag("modular.lpu_search", Observed::Number(search.survivors.len() as f64), ok)
        .detail("solved_cases", search.cases.len() as f64)
        .detail("unresolved", search.unresolved as f64))
}

fn mod_offdiag(p: &SuiteParams) -> Result<CheckReport, String> {
    let samples = p.trials_or(10_000);
    let m = modular::offdiag_modulus_scan(&modular::double_fibonacci(), &[0, 1, 2, 3], samples, p.seed);
    Ok(CheckReport::compare("modular.offdiag_scan", m, Relation::Lt, 1.0).param("samples", samples).detail("margin", 1.0 - m))
}

fn mod_rigidity_scalar(p: &SuiteParams) -> Result<CheckReport, String> {
    let attempts = p.trials_or(10_000);
    let mut witnesses = 0usize;
    for n in [3usize, 4] {
        let k = CMat::identity(n * n, n * n) * c(2.0, 0.0);
        witnesses += modular::scalar_rigidity_trial(n, &k, attempts, p.seed, 1e-9).map_err(e)?.is_some() as usize;
    }
    Ok(CheckReport::compare("modular.rigidity_scalar", witnesses as f64, Relation::Le, 0.0).param("attempts", attempts))
}

fn mod_rigidity_nonscalar(p: &SuiteParams) -> Result<CheckReport, String> {
    let count = p.trials_or(20).min(100);
    let mut missing = 0usize;
    let mut worst_attempt = 0usize;
    for t in 0..count {
        let n = 3 + t % 2;
        let mut rng = seeded(trial_seed(p.seed, t as u64));
        let k = modular::random_nonscalar_monomial(n * n, &mut rng);
        match modular::scalar_rigidity_trial(n, &k, 1000, trial_seed(p.seed ^ 0x6, t as u64), 1e-9).map_err(e)? {
            Some((a, _)) => worst_attempt = worst_attempt.max(a),
            None => missing += 1,
        }
    }
    Ok(CheckReport::compare("modular.rigidity_nonscalar", missing as f64, Relation::Le, 0.0)
        .param("matrices", count)
        .detail("max_attempt_index", worst_attempt as f64)
        .note("a found witness refutes monomiality for every U; absence would not prove it"))
}

fn glue_instances(p: &SuiteParams, kind: glue::InstanceKind) -> Result<Vec<glue::GluableInstance>, String> {
    let trials = p.trials_or(20);
    (0..trials)
        .map(|t| {
            let s = trial_seed(p.seed, t as u64);
            let mut rng = seeded(s ^ 0xd1);
            let dims: [usize; 6] = std::array::from_fn(|_| rng.gen_range(1..=2));
            glue::generate_gluable_instance(glue::Partition::new(dims).map_err(e)?, kind, s).map_err(e)
        })
        .collect()
}

fn glue_conclusions(p: &SuiteParams) -> Result<CheckReport, String> {
    let mut worst = 0f64;
    let insts = glue_instances(p, glue::InstanceKind::Random)?;
    for inst in &insts {
        worst = worst.max(glue::glue_states(inst).map_err(e)?.conclusions.max_residual());
    }
    Ok(CheckReport::compare("glue.conclusions", worst, Relation::Le, p.tol_or(glue::CONCLUSION_TOL)).param("instances", insts.len()))
}

fn glue_petz(p: &SuiteParams) -> Result<CheckReport, String> {
    let (mut worst, mut trace_dev) = (0f64, 0f64);
    let insts = glue_instances(p, glue::InstanceKind::Random)?;
    for inst in &insts {
        let (_, rep) = glue::petz_glue(inst).map_err(e)?;
        worst = worst.max(rep.on_psi.max(rep.on_psi_prime));
        trace_dev = trace_dev.max((rep.trace - 1.0).abs());
    }
    let mut r = CheckReport::compare("glue.petz", worst, Relation::Le, glue::PETZ_TOL).param("instances", insts.len()).detail("trace_deviation", trace_dev);
    r.pass &= trace_dev <= 1e-9;
    r.relation = None;
    Ok(r)
}

fn glue_purity(p: &SuiteParams) -> Result<CheckReport, String> {
    let mut worst = 0f64;
    for inst in glue_instances(p, glue::InstanceKind::Random)? {
        let (a, b) = inst.middle_entropy().map_err(e)?;
        worst = worst.max(a).max(b);
    }
    Ok(CheckReport::compare("glue.purity", worst, Relation::Lt, 1e-8))
}

fn glue_planted(p: &SuiteParams) -> Result<CheckReport, String> {
    let mut worst = 0f64;
    for inst in glue_instances(p, glue::InstanceKind::PlantedA)? {
        let r = glue::glue_states(&inst).map_err(e)?;
        let w = inst.planted_w.as_ref().ok_or("planted instance without W")?;
        worst = worst.max(glue::planted_mismatch(&inst.partition, &inst.psi, &r.u_a, w).map_err(e)?);
    }
    Ok(CheckReport::compare("glue.planted", worst, Relation::Le, p.tol_or(1e-8)))
}

fn glue_violation(p: &SuiteParams) -> Result<CheckReport, String> {
    let insts = glue_instances(p, glue::InstanceKind::Violating)?;
    let accepted = insts.iter().filter(|i| glue::glue_states(i).is_ok()).count();
    Ok(CheckReport::compare("glue.premise_violation", accepted as f64, Relation::Le, 0.0).param("instances", insts.len()))
}

/// Dense state dump helper for the CLI.
pub fn zx_state(n: usize, variant: Variant) -> Result<StateVector, String> {
    zxcat::build(n, variant).map_err(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::MODULES.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn derived_pass_matches() {
        let r = CheckReport::compare("x", 0.5, Relation::Le, 1.0);
        assert_eq!(r.derived_pass(), Some(true));
        assert!(r.pass);
    }

    #[test]
    fn bad_params_rejected() {
        let p = SuiteParams { tol: Some(-1.0), ..Default::default() };
        assert!(run_suite(Suite::Modular, &p).is_err());
    }

    #[test]
    fn modular_suite_passes() {
        let p = SuiteParams { trials: Some(200), ..Default::default() };
        let reports = run_suite(Suite::Modular, &p).unwrap();
        assert!(reports.iter().all(|r| r.pass), "{reports:#?}");
    }
}
