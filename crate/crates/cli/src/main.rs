use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use magiclab::glue::{self, InstanceKind, Partition};
use magiclab::modular::{self, ModularData};
use magiclab::prep::{self, Boundary};
use magiclab::rng::{seeded, trial_seed};
use magiclab::statevec::{LayeredCircuit, StateVector};
use magiclab::suite::{self, Suite, SuiteParams};
use magiclab::symplectic::{self, CliffordMap};
use magiclab::zxcat::{self, Variant};
use magiclab::{agsp, config};

#[derive(Parser, Debug)]
#[command(name = "magiclab", version, about = "Stabilizer, ZX-cat and gluing checks with JSON reports")]
struct Cli {
    #[command(subcommand)]
    suite: SuiteCmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Problem size; meaning depends on the check.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Base seed; trial seeds are derived from it.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Override the check tolerance; must be positive.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of random trials or instances.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Statevector size guard; overrides MAGICLAB_MAX_N.
    #[arg(long, global = true)]
    max_n: Option<usize>,
    /// Emit one JSON object per line instead of an array.
    #[arg(long, global = true)]
    jsonl: bool,
    /// Write the main state as a JSON snapshot.
    #[arg(long, global = true)]
    dump_state: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SuiteCmd {
    /// Pauli algebra, stabilizer overlaps and Clifford maps.
    Symplectic,
    /// ZX-cat states, mutual information and witnesses.
    Zxcat {
        #[command(subcommand)]
        cmd: Option<ZxCmd>,
    },
    /// Chebyshev projector polynomials and complexity bounds.
    Agsp {
        #[command(subcommand)]
        cmd: Option<AgspCmd>,
    },
    /// Preparation protocols.
    Prep {
        #[command(subcommand)]
        cmd: Option<PrepCmd>,
    },
    /// Double Fibonacci modular data and logical-gate exclusion.
    Modular {
        #[command(subcommand)]
        cmd: Option<ModularCmd>,
    },
    /// Gluing of pure states and the Petz map.
    Glue {
        #[command(subcommand)]
        cmd: Option<GlueCmd>,
    },
    /// Every suite in order.
    All,
}

#[derive(Subcommand, Debug)]
enum ZxCmd {
    /// Two-site mutual information of the plus state.
    Mi,
    /// Factorization gap against a Clifford-times-circuit explanation.
    WitnessCu {
        /// Use C = I instead of a seeded random Clifford.
        #[arg(long)]
        identity: bool,
        /// Depth of the random circuit U; 0 is the identity.
        #[arg(long, default_value_t = 0)]
        depth: usize,
    },
    /// Fidelity bound against a circuit-times-Clifford explanation.
    WitnessUc {
        /// Depth of the random circuit U.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum AgspCmd {
    /// Sup error, bound and coefficient identity over an (n, m) grid.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "16,64,256")]
        n_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        m_list: Vec<usize>,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum PrepCmd {
    /// Product rotation, global Clifford, inverse rotation.
    Sandwich,
    /// Measurement-based protocol with parity post-selection; one record per run.
    Adaptive,
    /// Bond-dimension-2 tensor contraction.
    Mps {
        #[arg(long, default_value = "open")]
        boundary: Boundary,
    },
    /// Site tensors fused by Bell measurements; one record per run.
    Bell,
}

#[derive(Subcommand, Debug)]
enum ModularCmd {
    /// Monomial logical-gate candidates surviving S and ST conjugation.
    LpuSearch {
        /// Modular data JSON; double Fibonacci when absent.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Ground-space dimension on a genus-g surface.
    Verlinde {
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum GlueCmd {
    /// Glue generated instances with the given block sizes.
    Run {
        /// Six block sizes: A, B1, B2, C1, C2, D.
        #[arg(long, value_delimiter = ',', default_value = "1,1,1,1,1,1")]
        dims: Vec<usize>,
    },
}

/// Bad input, as opposed to a failed check.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

struct Outcome {
    records: Vec<Value>,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() || err.downcast_ref::<suite::SuiteError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let g = cli.global;
    if let Some(m) = g.max_n {
        if m == 0 {
            return Err(usage("--max-n must be positive"));
        }
        config::set_max_n(m);
    }
    let params = SuiteParams { n: g.n, seed: g.seed, tol: g.tol, trials: g.trials };
    params.validate()?;

    let outcome = match cli.suite {
        SuiteCmd::Symplectic => suite_outcome(Suite::Symplectic, &params)?,
        SuiteCmd::Zxcat { cmd: None } => suite_outcome(Suite::Zxcat, &params)?,
        SuiteCmd::Agsp { cmd: None } => suite_outcome(Suite::Agsp, &params)?,
        SuiteCmd::Prep { cmd: None } => suite_outcome(Suite::Prep, &params)?,
        SuiteCmd::Modular { cmd: None } => suite_outcome(Suite::Modular, &params)?,
        SuiteCmd::Glue { cmd: None } => suite_outcome(Suite::Glue, &params)?,
        SuiteCmd::All => suite_outcome(Suite::All, &params)?,
        SuiteCmd::Zxcat { cmd: Some(c) } => zxcat_cmd(c, &g)?,
        SuiteCmd::Agsp { cmd: Some(c) } => agsp_cmd(c)?,
        SuiteCmd::Prep { cmd: Some(c) } => prep_cmd(c, &g)?,
        SuiteCmd::Modular { cmd: Some(c) } => modular_cmd(c, &g)?,
        SuiteCmd::Glue { cmd: Some(c) } => glue_cmd(c, &g)?,
    };
    emit(&outcome.records, g.out.as_deref(), g.jsonl)?;
    Ok(outcome.pass)
}

fn suite_outcome(s: Suite, params: &SuiteParams) -> Result<Outcome> {
    let reports = suite::run_suite(s, params)?;
    let pass = suite::exit_code(&reports) == 0;
    let records = reports.iter().map(serde_json::to_value).collect::<Result<_, _>>()?;
    Ok(Outcome { records, pass })
}

fn render(records: &[Value], jsonl: bool) -> Result<String> {
    if jsonl {
        let mut s = String::new();
        for r in records {
            s.push_str(&serde_json::to_string(r)?);
            s.push('\n');
        }
        Ok(s)
    } else {
        Ok(serde_json::to_string_pretty(records)? + "\n")
    }
}

fn emit(records: &[Value], out: Option<&Path>, jsonl: bool) -> Result<()> {
    let text = render(records, jsonl)?;
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Writes to a sibling temporary file, then renames over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| usage(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

fn dump(state: &StateVector, g: &Global) -> Result<()> {
    if let Some(path) = &g.dump_state {
        write_atomic(path, serde_json::to_string(&state.to_snapshot())?.as_bytes())?;
    }
    Ok(())
}

fn check_n(n: usize, lo: usize, hi: usize) -> Result<usize> {
    if n < lo || n > hi {
        return Err(usage(format!("--n must lie in {lo}..={hi}, got {n}")));
    }
    Ok(n)
}

fn zxcat_cmd(cmd: ZxCmd, g: &Global) -> Result<Outcome> {
    let max = config::max_n();
    match cmd {
        ZxCmd::Mi => {
            let n = check_n(g.n.unwrap_or(12), 2, max)?;
            let mi = zxcat::mi_numeric(n)?;
            dump(&zxcat::build(n, Variant::Plus)?, g)?;
            let r = json!({
                "check": "zxcat.mi",
                "params": {"n": n},
                "observed": mi,
                "bound": 0.0,
                "asymptote": zxcat::mi_asymptote(),
                "pass": mi > 0.0,
            });
            Ok(Outcome { records: vec![r], pass: mi > 0.0 })
        }
        ZxCmd::WitnessCu { identity, depth } => {
            let n = check_n(g.n.unwrap_or(12), 2, max)?;
            let trials = if identity { 1 } else { g.trials.unwrap_or(1) };
            let mut records = Vec::new();
            let mut pass = true;
            for t in 0..trials {
                let s = trial_seed(g.seed, t as u64);
                let c = if identity { CliffordMap::identity(n) } else { symplectic::random_clifford(n, s) };
                let u = if depth == 0 { LayeredCircuit::new(n) } else { LayeredCircuit::random(n, depth, &mut seeded(s ^ 0xc0)) };
                let mut w = zxcat::cu_correlation_witness(n, &c, &u)?;
                w.params.insert("seed".into(), s as f64);
                w.pass = w.pass && w.get("gap") > g.tol.unwrap_or(0.1);
                pass &= w.pass;
                records.push(serde_json::to_value(&w)?);
            }
            Ok(Outcome { records, pass })
        }
        ZxCmd::WitnessUc { depth } => {
            let n = check_n(g.n.unwrap_or(10), 2, max)?;
            let mut records = Vec::new();
            let mut pass = true;
            for t in 0..g.trials.unwrap_or(1) {
                let s = trial_seed(g.seed, t as u64);
                let u = LayeredCircuit::random(n, depth, &mut seeded(s));
                let mut w = zxcat::uc_sign_witness(n, &u)?;
                w.params.insert("seed".into(), s as f64);
                pass &= w.pass;
                records.push(serde_json::to_value(&w)?);
            }
            Ok(Outcome { records, pass })
        }
    }
}

fn agsp_cmd(cmd: AgspCmd) -> Result<Outcome> {
    let AgspCmd::Sweep { n_list, m_list, csv } = cmd;
    if n_list.is_empty() || m_list.is_empty() {
        return Err(usage("--n-list and --m-list must be non-empty"));
    }
    let rows = agsp::sweep(&n_list, &m_list)?;
    if rows.is_empty() {
        return Err(usage("no (n, m) pair with 1 <= m < n"));
    }
    if let Some(path) = csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &rows {
            w.serialize(row)?;
        }
        write_atomic(&path, &w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    }
    let pass = rows.iter().all(|r| r.sup_error <= r.bound);
    let records = rows.iter().map(serde_json::to_value).collect::<Result<_, _>>()?;
    Ok(Outcome { records, pass })
}

fn prep_cmd(cmd: PrepCmd, g: &Global) -> Result<Outcome> {
    let max = config::max_n();
    let tol = g.tol.unwrap_or(1e-10);
    match cmd {
        PrepCmd::Sandwich => {
            let n = check_n(g.n.unwrap_or(12), 1, max)?;
            let state = prep::prepare_sandwich(n)?;
            dump(&state, g)?;
            let f = prep::sandwich_fidelity(n)?;
            let pass = 1.0 - f <= tol;
            Ok(Outcome { records: vec![json!({"protocol": "sandwich", "n": n, "fidelity": f, "pass": pass})], pass })
        }
        PrepCmd::Adaptive => {
            let n = check_n(g.n.unwrap_or(4), 1, max / 2)?;
            let target = zxcat::build(n, Variant::Plus)?;
            let mut records = Vec::new();
            let mut pass = true;
            for t in 0..g.trials.unwrap_or(10) {
                let s = trial_seed(g.seed, t as u64);
                let rec = prep::adaptive_run(n, s)?;
                let fidelity = rec.post_state.overlap(&target)?.powi(2);
                let ok = !rec.accepted || 1.0 - fidelity <= tol;
                pass &= ok;
                if t == 0 {
                    dump(&rec.post_state, g)?;
                }
                records.push(json!({
                    "protocol": "adaptive",
                    "n": n,
                    "seed": s,
                    "outcomes": rec.outcomes.iter().map(|&b| b as u8).collect::<Vec<_>>(),
                    "parity": rec.parity,
                    "accepted": rec.accepted,
                    "fidelity": if rec.accepted { Some(fidelity) } else { None },
                }));
            }
            let closed = prep::adaptive_success_closed(n);
            records.push(json!({"protocol": "adaptive", "n": n, "success_probability_closed": closed}));
            Ok(Outcome { records, pass })
        }
        PrepCmd::Mps { boundary } => {
            let n = check_n(g.n.unwrap_or(12), 1, max)?;
            let state = prep::mps_contract(n, boundary)?;
            dump(&state, g)?;
            let f = state.overlap(&zxcat::build(n, Variant::Plus)?)?.powi(2);
            let pass = 1.0 - f <= tol;
            Ok(Outcome { records: vec![json!({"protocol": "mps", "n": n, "boundary": boundary, "fidelity": f, "pass": pass})], pass })
        }
        PrepCmd::Bell => {
            let n = check_n(g.n.unwrap_or(3), 1, max / 3)?;
            let mut records = Vec::new();
            let mut pass = true;
            for t in 0..g.trials.unwrap_or(10) {
                let s = trial_seed(g.seed, t as u64);
                let rec = prep::bell_protocol_run(n, s)?;
                pass &= !rec.accepted || 1.0 - rec.fidelity <= tol;
                records.push(json!({
                    "protocol": "bell",
                    "n": n,
                    "seed": s,
                    "outcomes": rec.outcomes.iter().map(|&(z, x)| [z as u8, x as u8]).collect::<Vec<_>>(),
                    "flags": rec.flags.iter().map(|&b| b as u8).collect::<Vec<_>>(),
                    "accepted": rec.accepted,
                    "fidelity": rec.fidelity,
                }));
            }
            Ok(Outcome { records, pass })
        }
    }
}

fn load_data(path: Option<&Path>) -> Result<ModularData> {
    match path {
        None => Ok(modular::double_fibonacci()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ModularData::from_json(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

fn modular_cmd(cmd: ModularCmd, g: &Global) -> Result<Outcome> {
    match cmd {
        ModularCmd::LpuSearch { data } => {
            let d = load_data(data.as_deref())?;
            let search = modular::lpu_search(&d, g.tol.unwrap_or(1e-9))?;
            let pass = search.unresolved == 0;
            Ok(Outcome { records: vec![serde_json::to_value(&search)?], pass })
        }
        ModularCmd::Verlinde { genus, data } => {
            if genus == 0 {
                return Err(usage("--genus must be at least 1"));
            }
            let d = load_data(data.as_deref())?;
            let v = modular::verlinde_dim(&d.dims, genus)?;
            Ok(Outcome { records: vec![json!({"genus": genus, "dimension": v.to_string(), "value": v.to_f64()})], pass: true })
        }
    }
}

fn glue_cmd(cmd: GlueCmd, g: &Global) -> Result<Outcome> {
    let GlueCmd::Run { dims } = cmd;
    let dims: [usize; 6] = dims.try_into().map_err(|_| usage("--dims takes six block sizes"))?;
    let p = Partition::new(dims).map_err(|e| usage(e.to_string()))?;
    if p.num_qubits() > config::max_n() {
        bail!(usage(format!("{} qubits exceed the limit {}", p.num_qubits(), config::max_n())));
    }
    let mut records = Vec::new();
    let mut pass = true;
    for t in 0..g.trials.unwrap_or(1) {
        let s = trial_seed(g.seed, t as u64);
        let inst = glue::generate_gluable_instance(p, InstanceKind::Random, s)?;
        let res = glue::glue_states(&inst)?;
        let (_, petz) = glue::petz_glue(&inst)?;
        let ok = res.conclusions.pass(g.tol.unwrap_or(glue::CONCLUSION_TOL)) && petz.pass(glue::PETZ_TOL);
        pass &= ok;
        if t == 0 {
            dump(&res.glued, g)?;
        }
        records.push(json!({
            "seed": s,
            "partition": p,
            "premises": inst.premises,
            "conclusions": res.conclusions,
            "petz": petz,
            "pass": ok,
        }));
    }
    Ok(Outcome { records, pass })
}
