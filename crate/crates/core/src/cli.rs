//! Command-line front end. Every command prints one JSON report on stdout.
//!
//! Exit codes: 0 pass, 1 checked and failed, 2 usage or input error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::channels::{is_channel, verify_covariance, WeylMapFile, WeylMapSpectrum};
use crate::error::Error;
use crate::gpc::{beta_range, gpc_channel, gpc_verdict, is_s_covariant, phi_beta_equal, GpcParams};
use crate::group::{is_prime, require_prime};
use crate::linalg::{CMatrix, Tolerance};
use crate::posmaps::{
    build_positive_map, extremal_spec, mub_set, phi_gamma, positivity_probe, qubit_reduction_spec,
    reduction_spec, witness_apply, MapFile, PosMapSpec, PositiveMap,
};
use crate::repr::{character_table, IrrepLabel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "weylcov",
    version,
    about = "Weyl-covariant channels and positive maps"
)]
pub struct Cli {
    /// Indent the JSON report
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Equality slack
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_eq: f64,
    /// Positive-semidefiniteness slack
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_psd: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Character table of the Weyl group
    Table {
        #[arg(long)]
        d: usize,
        /// Print the table as CSV instead of the JSON report
        #[arg(long)]
        csv: bool,
    },
    /// Check a Weyl map (weights or spectrum) for being a channel
    Channel {
        #[arg(long)]
        file: PathBuf,
    },
    /// Generalized Pauli channel tests
    Gpc {
        #[arg(long)]
        file: PathBuf,
        /// Test only this β
        #[arg(long)]
        beta: Option<usize>,
    },
    /// Positive maps
    Posmap {
        #[command(subcommand)]
        action: PosmapAction,
    },
    /// Mutually unbiased bases for prime d
    Mub {
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum PosmapAction {
    /// Build a map and report its certificate
    Build(BuildArgs),
    /// Seeded random rank-1 positivity probe
    Probe {
        /// Map spec, tabulated map, or a `posmap build` report
        #[arg(long, visible_alias = "spec")]
        map: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Apply 1⊗Φ to a bipartite state
    Witness {
        #[arg(long, visible_alias = "spec")]
        map: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    source: BuildSource,
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct BuildSource {
    /// Weight spec file
    #[arg(long)]
    spec: Option<PathBuf>,
    /// (I Tr X − X)/(d−1)
    #[arg(long, requires = "d")]
    reduction: bool,
    /// Qubit weights λ⁻ = −1, λ⁺ = (1,1,1)
    #[arg(long)]
    qubit_reduction: bool,
    /// d−1 negative weights on the frame, trace preserving
    #[arg(long, requires = "d")]
    extremal: bool,
    /// Comma-separated MUB indices for the Φ_Γ family
    #[arg(long, value_delimiter = ',', requires = "d")]
    gamma: Option<Vec<usize>>,
}

/// What a command produced: the text for stdout and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

enum Failure {
    Input(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<(Value, i32), Failure>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn report(
    command: &str,
    tol: &Tolerance,
    inputs: Value,
    verdicts: Value,
    witnesses: Value,
) -> Value {
    json!({
        "command": command,
        "version": VERSION,
        "tolerance": tol,
        "inputs": inputs,
        "verdicts": verdicts,
        "witnesses": witnesses,
    })
}

fn code(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            } else {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            };
        }
    };
    let tol = Tolerance {
        eps_eq: cli.tol_eq,
        eps_psd: cli.tol_psd,
        eps_herm: cli.tol_eq.min(1e-12),
    };
    let result = match tol.validate() {
        Ok(()) => dispatch(&cli.command, &tol),
        Err(e) => Err(Failure::Lib(e)),
    };
    let render = |v: &Value| {
        if cli.pretty {
            serde_json::to_string_pretty(v).expect("serializable")
        } else {
            serde_json::to_string(v).expect("serializable")
        }
    };
    match result {
        Ok((value, code)) => {
            let stdout = match (&cli.command, value.get("csv")) {
                (Command::Table { csv: true, .. }, Some(Value::String(s))) => s.clone(),
                _ => render(&value) + "\n",
            };
            Outcome {
                stdout,
                stderr: String::new(),
                code,
            }
        }
        Err(f) => {
            let message = match f {
                Failure::Input(m) => m,
                Failure::Lib(e) => e.to_string(),
            };
            let value = json!({ "version": VERSION, "error": message });
            Outcome {
                stdout: render(&value) + "\n",
                stderr: format!("error: {message}\n"),
                code: EXIT_INPUT,
            }
        }
    }
}

fn dispatch(command: &Command, tol: &Tolerance) -> CmdResult {
    match command {
        Command::Table { d, .. } => cmd_table(*d, tol),
        Command::Channel { file } => cmd_channel(file, tol),
        Command::Gpc { file, beta } => cmd_gpc(file, *beta, tol),
        Command::Posmap { action } => match action {
            PosmapAction::Build(args) => cmd_posmap_build(args, tol),
            PosmapAction::Probe { map, trials, seed } => cmd_posmap_probe(map, *trials, *seed, tol),
            PosmapAction::Witness { map, state } => cmd_posmap_witness(map, state, tol),
        },
        Command::Mub { d } => cmd_mub(*d, tol),
    }
}

fn cmd_table(d: usize, tol: &Tolerance) -> CmdResult {
    let table = character_table(d)?;
    let orth = table.orthogonality();
    let slack = tol.eps_eq * table.group_order() as f64;
    let rows_ok = orth.row_residual <= slack;
    let cols_ok = orth.column_residual.is_none_or(|r| r <= slack);
    let mut notes = Vec::new();
    if table.partial {
        notes.push("composite d: U_α (α>1) omitted");
    }
    let value = json!({
        "command": "table",
        "version": VERSION,
        "tolerance": tol,
        "inputs": { "d": d },
        "verdicts": {
            "rows": table.labels.len(),
            "columns": table.classes.len(),
            "partial": table.partial,
            "row_orthogonality": { "pass": rows_ok, "residual": orth.row_residual, "tolerance": slack },
            "column_orthogonality": { "pass": cols_ok, "residual": orth.column_residual, "tolerance": slack },
        },
        "notes": notes,
        "csv": table.to_csv(),
    });
    Ok((value, code(rows_ok && cols_ok)))
}

fn cmd_channel(file: &Path, tol: &Tolerance) -> CmdResult {
    let map: WeylMapFile = read_json(file)?;
    let coeffs = map.coeffs();
    let verdict = is_channel(&coeffs, tol)?;
    let covariance = verify_covariance(&coeffs, IrrepLabel::DDim(1))?;
    let pass = verdict.is_channel();
    let witnesses = match verdict.violating_index {
        Some((k, l)) => json!({
            "violating_index": [k, l],
            "coefficient": coeffs.get(k, l),
            "min_choi_eigenvalue": verdict.min_choi_eigenvalue,
        }),
        None => json!({}),
    };
    let verdicts = json!({
        "channel": pass,
        "cp": { "pass": verdict.cp, "min_choi_eigenvalue": verdict.min_choi_eigenvalue, "tolerance": tol.eps_psd },
        "tp": { "pass": verdict.tp, "coefficient_sum": verdict.coefficient_sum, "tolerance": tol.eps_eq },
        "covariance": { "pass": covariance <= tol.eps_eq, "residual": covariance, "tolerance": tol.eps_eq },
    });
    let inputs = json!({ "file": file.display().to_string(), "map": map });
    Ok((
        report("channel", tol, inputs, verdicts, witnesses),
        code(pass),
    ))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GpcInput {
    Params(GpcParams),
    Map(WeylMapFile),
}

fn cmd_gpc(file: &Path, beta: Option<usize>, tol: &Tolerance) -> CmdResult {
    let input: GpcInput = read_json(file)?;
    let (spec, inputs): (WeylMapSpectrum, Value) = match input {
        GpcInput::Params(p) => {
            let params = GpcParams::new(p.d, p.pi)?;
            let coeffs = gpc_channel(&params)?;
            (
                crate::channels::spectrum_from_prob(&coeffs),
                json!({ "params": params }),
            )
        }
        GpcInput::Map(m) => (m.spectrum(), json!({ "map": m })),
    };
    let d = spec.d;
    require_prime(d)?;
    let s_cov = is_s_covariant(&spec, tol)?;
    let gpc = gpc_verdict(&spec, tol)?;
    let real = spec.ell.iter().all(|z| z.im.abs() <= tol.eps_eq);
    let betas: Vec<usize> = match beta {
        Some(b) => vec![b],
        None => beta_range(d, real).collect(),
    };
    let mut per_beta = Vec::new();
    let mut failing_beta = None;
    for b in betas {
        let equal = phi_beta_equal(&spec, b, tol)?;
        if !equal && failing_beta.is_none() {
            failing_beta = Some(b);
        }
        per_beta.push(json!({ "beta": b, "equal": equal }));
    }
    let witnesses = json!({
        "failing_orbit": gpc.failing.map(|(a, k, l)| json!({ "alpha": a, "k": k, "l": l })),
        "failing_beta": failing_beta,
    });
    let verdicts = json!({
        "s_covariant": { "pass": s_cov, "tolerance": tol.eps_eq },
        "gpc": { "pass": gpc.gpc, "tolerance": tol.eps_eq },
        "real_spectrum": real,
        "phi_beta": per_beta,
    });
    let mut inputs = inputs;
    inputs["file"] = json!(file.display().to_string());
    inputs["d"] = json!(d);
    Ok((
        report("gpc", tol, inputs, verdicts, witnesses),
        code(gpc.gpc && failing_beta.is_none()),
    ))
}

fn map_from_value(value: Value, tol: &Tolerance) -> std::result::Result<PositiveMap, Failure> {
    // a `posmap build` report carries the map under "map"
    let inner = match value.get("map") {
        Some(m) if value.get("command").is_some() => m.clone(),
        _ => value,
    };
    let file: MapFile =
        serde_json::from_value(inner).map_err(|e| Failure::Input(format!("map file: {e}")))?;
    Ok(file.build(tol)?)
}

fn cmd_posmap_build(args: &BuildArgs, tol: &Tolerance) -> CmdResult {
    let source = &args.source;
    let spec: Option<PosMapSpec> = if let Some(path) = &source.spec {
        Some(read_json(path)?)
    } else if source.reduction {
        Some(reduction_spec(check_d(args.d)?))
    } else if source.qubit_reduction {
        Some(qubit_reduction_spec())
    } else if source.extremal {
        Some(extremal_spec(check_d(args.d)?))
    } else {
        None
    };
    let (map, kind) = match (&spec, &source.gamma) {
        (Some(s), _) => (build_positive_map(s, tol)?, "weights"),
        (None, Some(gamma)) => {
            let mubs = mub_set(check_d(args.d)?)?;
            let superop = phi_gamma(gamma, &mubs)?;
            (
                PositiveMap {
                    certified: false,
                    superop,
                },
                "gamma",
            )
        }
        (None, None) => return Err(Failure::Input("no map source given".into())),
    };
    let tp = map.superop.trace_preservation_defect();
    let status = if map.certified {
        "certified"
    } else {
        "unknown"
    };
    let value = json!({
        "command": "posmap build",
        "version": VERSION,
        "tolerance": tol,
        "inputs": { "kind": kind, "spec": spec, "gamma": source.gamma, "d": map.superop.d },
        "verdicts": {
            "certified": map.certified,
            "status": status,
            "bound": spec.as_ref().map(PosMapSpec::bound),
            "trace_preserving": { "pass": tp <= tol.eps_eq, "residual": tp, "tolerance": tol.eps_eq },
        },
        "witnesses": {},
        "map": map,
    });
    Ok((value, EXIT_PASS))
}

fn check_d(d: Option<usize>) -> std::result::Result<usize, Failure> {
    match d {
        Some(d) if d >= 2 => Ok(d),
        Some(d) => Err(Failure::Lib(Error::InvalidDimension(d))),
        None => Err(Failure::Input("--d is required".into())),
    }
}

fn cmd_posmap_probe(path: &Path, trials: usize, seed: u64, tol: &Tolerance) -> CmdResult {
    if trials == 0 {
        return Err(Failure::Input("--trials must be at least 1".into()));
    }
    let map = map_from_value(read_json(path)?, tol)?;
    let probe = positivity_probe(&map, trials, seed, tol)?;
    let status = probe.status(map.certified);
    let verdicts = json!({
        "positive": { "pass": probe.witness.is_none(), "min_eigenvalue": probe.min_eigenvalue, "tolerance": tol.eps_psd },
        "certified": map.certified,
        "status": status,
    });
    let witnesses = json!({ "vector": probe.witness });
    let inputs = json!({ "map": path.display().to_string(), "trials": trials, "seed": seed });
    Ok((
        report("posmap probe", tol, inputs, verdicts, witnesses),
        code(probe.witness.is_none()),
    ))
}

fn cmd_posmap_witness(map_path: &Path, state_path: &Path, tol: &Tolerance) -> CmdResult {
    let map = map_from_value(read_json(map_path)?, tol)?;
    let rho: CMatrix = read_json(state_path)?;
    let w = witness_apply(&map.superop, &rho, tol)?;
    let verdicts = json!({
        "entangled_detected": w.entangled_detected,
        "min_eigenvalue": { "value": w.min_eigenvalue, "tolerance": tol.eps_psd },
    });
    let inputs =
        json!({ "map": map_path.display().to_string(), "state": state_path.display().to_string() });
    Ok((
        report("posmap witness", tol, inputs, verdicts, json!({})),
        EXIT_PASS,
    ))
}

fn cmd_mub(d: usize, tol: &Tolerance) -> CmdResult {
    if !is_prime(d) {
        return Err(Failure::Lib(Error::NonPrimeDimension(d)));
    }
    let mubs = mub_set(d)?;
    let defect = mubs.unbiasedness_defect();
    let pass = defect <= tol.eps_eq;
    let value = json!({
        "command": "mub",
        "version": VERSION,
        "tolerance": tol,
        "inputs": { "d": d },
        "verdicts": { "unbiased": { "pass": pass, "residual": defect, "tolerance": tol.eps_eq } },
        "witnesses": {},
        "mubs": mubs,
    });
    Ok((value, code(pass)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Value {
        let out = run(std::iter::once("weylcov").chain(args.iter().copied()));
        serde_json::from_str(&out.stdout).unwrap()
    }

    #[test]
    fn table_report() {
        let v = parse(&["table", "--d", "2"]);
        assert_eq!(v["verdicts"]["rows"], 5);
        assert_eq!(v["verdicts"]["row_orthogonality"]["pass"], true);
        assert_eq!(v["version"], VERSION);
    }

    #[test]
    fn composite_table_is_flagged() {
        let v = parse(&["table", "--d", "4"]);
        assert_eq!(v["notes"][0], "composite d: U_α (α>1) omitted");
        assert_eq!(v["verdicts"]["partial"], true);
    }

    #[test]
    fn csv_mode_prints_csv() {
        let out = run(["weylcov", "table", "--d", "3", "--csv"]);
        assert_eq!(out.code, EXIT_PASS);
        assert!(out.stdout.starts_with("irrep,"));
        assert_eq!(out.stdout.lines().count(), 12);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["weylcov", "table"]).code, EXIT_INPUT);
        assert_eq!(run(["weylcov", "table", "--d", "1"]).code, EXIT_INPUT);
        assert_eq!(run(["weylcov", "mub", "--d", "4"]).code, EXIT_INPUT);
        assert_eq!(
            run(["weylcov", "--tol-eq", "1", "mub", "--d", "3"]).code,
            EXIT_INPUT
        );
        assert_eq!(
            run(["weylcov", "posmap", "probe", "--map", "x.json"]).code,
            EXIT_INPUT
        );
        assert_eq!(run(["weylcov", "--version"]).code, EXIT_PASS);
    }

    #[test]
    fn build_reduction_certified() {
        let v = parse(&["posmap", "build", "--reduction", "--d", "3"]);
        assert_eq!(v["verdicts"]["certified"], true);
        assert_eq!(v["verdicts"]["trace_preserving"]["pass"], true);
        let map: PositiveMap = serde_json::from_value(v["map"].clone()).unwrap();
        assert_eq!(map.superop.d, 3);
    }
}
