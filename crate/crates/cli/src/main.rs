//! `dseq`: JSON-in, JSON-out command line for the double-sequence toolkit.
//!
//! Every subcommand prints one JSON object (with a versioned `"schema"`
//! field) on standard output and exits with 0 for a positive verdict or
//! plain success, 2 for a definitive negative verdict, 3 for inconclusive,
//! and 1 for usage or input errors. Negative beats inconclusive when a
//! command aggregates several verdicts.
//!
//! `--seq`/`--matrix`/`--a`/`--x` accept inline JSON or `@path` to read a
//! file. Configuration comes from flags, then the `DSEQ_CONFIG` env var
//! (a path to a JSON config), then built-in defaults.

use std::path::PathBuf;
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use dseq_core::convergence::{certify_rule, lq_norm_delta, sup_norm_delta};
use dseq_core::difference::{apply_4d, delta, inv_delta};
use dseq_core::duality::{
    alpha_pairing_abs, check_f1, check_f2, check_f3, DualConditionReport, DualVerdict,
};
use dseq_core::grid::Table;
use dseq_core::json::{mat_from_str, seq_from_str};
use dseq_core::matclass::{check_class, ClassId};
use dseq_core::seq::DoubleSequence;
use dseq_core::spaces::{member, run_atlas, Outcome};
use dseq_core::window::Window;
use dseq_core::zmap::{flatten, phi, phi_inv};
use dseq_core::{Error, Result, Rule, RunConfig, Scalar, SpaceId, Verdict};

#[derive(Parser)]
#[command(name = "dseq", version, about = "Double-sequence summability toolkit")]
struct Cli {
    /// Pretty-print the JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    /// Path to a JSON config file (overrides the DSEQ_CONFIG env var).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Residual tolerance override.
    #[arg(long, global = true, value_name = "T")]
    tol: Option<f64>,

    /// Fringe rows/columns override for the regular-convergence certifier.
    #[arg(long, global = true, value_name = "F")]
    fringe: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a sequence at one index pair.
    Eval {
        /// Sequence spec (JSON or @path).
        #[arg(long)]
        seq: String,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
    },
    /// The difference transform Δx over a window.
    Delta {
        #[arg(long)]
        seq: String,
        /// Table size as ROWS,COLS.
        #[arg(long, default_value = "8,8")]
        window: String,
    },
    /// The inverse transform Sx (rectangular prefix sums) over a window.
    Invdelta {
        #[arg(long)]
        seq: String,
        /// Table size as ROWS,COLS.
        #[arg(long, default_value = "8,8")]
        window: String,
    },
    /// Apply a 4-D matrix to a sequence under a convergence rule.
    Matapply {
        /// Matrix spec (JSON or @path).
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        seq: String,
        /// Convergence rule for the row series: p, bp, or r.
        #[arg(long)]
        rule: String,
        /// Output size as ROWS,COLS.
        #[arg(long)]
        window: String,
    },
    /// Certify a rule-v limit of a sequence.
    Limit {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        seq: String,
    },
    /// Certify a norm value: the sup norm or an L_q norm of Δx.
    Norm {
        /// sup_delta or lq_delta.
        #[arg(long)]
        kind: String,
        /// Exponent for lq_delta (q >= 1).
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        seq: String,
    },
    /// Certified membership of a sequence in a space.
    Member {
        /// Space id, e.g. Mu, Cp, Cbp, Cr, Lq(2), Mu_d, BS, CSp.
        #[arg(long)]
        space: String,
        #[arg(long)]
        seq: String,
    },
    /// Run every registered strict-inclusion witness.
    Atlas {
        #[arg(long, required = true)]
        run_all: bool,
    },
    /// Dual-space conditions on a coefficient sequence.
    Dual {
        /// F1, F2, F3, or alpha.
        #[arg(long)]
        check: String,
        /// Coefficient sequence spec (JSON or @path).
        #[arg(long)]
        a: String,
        /// Pairing partner, required for --check alpha.
        #[arg(long)]
        x: Option<String>,
        /// Column (F2) or row (F3) cut index.
        #[arg(long, default_value_t = 0)]
        cut: usize,
    },
    /// Matrix-class characterization batteries.
    Matclass {
        #[arg(long)]
        matrix: String,
        /// Class id such as Cr_to_Cr, Cbp_to_Cbp, Cr_to_CrDelta, or domain.
        #[arg(long)]
        class: String,
    },
    /// The square-shell bijection phi (forward with --m/--n, inverse with --inv).
    Phi {
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        /// Linear index to invert.
        #[arg(long)]
        inv: Option<u64>,
        /// Treat pair indices as 0-based (the enumeration itself stays 1-based).
        #[arg(long)]
        zero_based: bool,
    },
    /// Flatten a double sequence along the shell enumeration.
    Flatten {
        #[arg(long)]
        seq: String,
        /// Number of leading entries to emit.
        #[arg(long)]
        count: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            exit(1);
        }
    };
    match run(&cli) {
        Ok((payload, code)) => {
            let rendered = if cli.pretty {
                serde_json::to_string_pretty(&payload)
            } else {
                serde_json::to_string(&payload)
            }
            .expect("report serialization");
            println!("{rendered}");
            exit(code);
        }
        Err(e) => {
            eprintln!("dseq: {e}");
            exit(1);
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let from_file = |path: &str| -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read config `{path}`: {e}")))?;
        RunConfig::from_json(&text)
    };
    let mut cfg = if let Some(path) = &cli.config {
        from_file(&path.to_string_lossy())?
    } else if let Ok(path) = std::env::var("DSEQ_CONFIG") {
        from_file(&path)?
    } else {
        RunConfig::default()
    };
    if let Some(tol) = cli.tol {
        cfg.tol = tol;
    }
    if let Some(fringe) = cli.fringe {
        cfg.fringe = fringe;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Inline JSON, or the contents of a file when the argument is `@path`.
fn input_text(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidSpec(format!("cannot read `{path}`: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn seq_arg(arg: &str) -> Result<DoubleSequence> {
    seq_from_str(&input_text(arg)?)
}

fn parse_window(s: &str) -> Result<Window> {
    let bad = || Error::InvalidSpec(format!("window must be ROWS,COLS with positive sizes, got `{s}`"));
    let (rows, cols) = s.split_once(',').ok_or_else(bad)?;
    let rows: usize = rows.trim().parse().map_err(|_| bad())?;
    let cols: usize = cols.trim().parse().map_err(|_| bad())?;
    if rows == 0 || cols == 0 {
        return Err(bad());
    }
    Ok(Window { m_max: rows - 1, n_max: cols - 1 })
}

fn schema(mut payload: Value) -> Value {
    payload
        .as_object_mut()
        .expect("payloads are objects")
        .insert("schema".into(), Value::String("dseq/1".into()));
    payload
}

fn wrap<T: serde::Serialize>(report: &T) -> Result<Value> {
    Ok(schema(serde_json::to_value(report).map_err(|e| Error::InvalidSpec(e.to_string()))?))
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Converges => 0,
        Verdict::Unbounded => 2,
        Verdict::Inconclusive => 3,
    }
}

fn outcome_code(o: Outcome) -> i32 {
    match o {
        Outcome::Member => 0,
        Outcome::NonMember => 2,
        Outcome::Inconclusive => 3,
    }
}

fn dual_code(v: DualVerdict) -> i32 {
    match v {
        DualVerdict::Holds => 0,
        DualVerdict::Fails => 2,
        DualVerdict::Inconclusive => 3,
    }
}

/// Negative (2) beats inconclusive (3) beats success (0).
fn join_codes(codes: impl IntoIterator<Item = i32>) -> i32 {
    let mut out = 0;
    for c in codes {
        if c == 2 {
            return 2;
        }
        if c == 3 {
            out = 3;
        }
    }
    out
}

fn scalar_json(s: Scalar) -> Value {
    match s {
        Scalar::Int(v) => json!(v),
        Scalar::Float(v) => json!(v),
    }
}

fn table_json(t: &Table) -> Value {
    match t {
        Table::Int(g) => json!(g.to_nested()),
        Table::Float(g) => json!(g.to_nested()),
    }
}

fn table_payload(op_window: Window, x: &DoubleSequence, cfg: &RunConfig) -> Result<Value> {
    let t = x.table(op_window, cfg.cell_cap)?;
    Ok(schema(json!({
        "window": [op_window.rows(), op_window.cols()],
        "value_kind": x.kind(),
        "values": table_json(&t),
    })))
}

fn run(cli: &Cli) -> Result<(Value, i32)> {
    let cfg = resolve_config(cli)?;
    match &cli.cmd {
        Cmd::Eval { seq, m, n } => {
            let x = seq_arg(seq)?;
            let v = x.eval(*m, *n)?;
            let payload = schema(json!({
                "m": m, "n": n,
                "value": scalar_json(v),
                "value_kind": x.kind(),
            }));
            Ok((payload, 0))
        }
        Cmd::Delta { seq, window } => {
            let w = parse_window(window)?;
            Ok((table_payload(w, &delta(&seq_arg(seq)?), &cfg)?, 0))
        }
        Cmd::Invdelta { seq, window } => {
            let w = parse_window(window)?;
            Ok((table_payload(w, &inv_delta(&seq_arg(seq)?), &cfg)?, 0))
        }
        Cmd::Matapply { matrix, seq, rule, window } => {
            let a = mat_from_str(&input_text(matrix)?)?;
            let x = seq_arg(seq)?;
            let rule: Rule = rule.parse()?;
            let w = parse_window(window)?;
            let report = apply_4d(&a, &x, rule, w, &cfg)?;
            let code = join_codes(
                report.rows.iter().flatten().map(|r| verdict_code(r.verdict)),
            );
            Ok((wrap(&report)?, code))
        }
        Cmd::Limit { rule, seq } => {
            let rule: Rule = rule.parse()?;
            let report = certify_rule(&seq_arg(seq)?, rule, &cfg)?;
            let code = verdict_code(report.verdict);
            Ok((wrap(&report)?, code))
        }
        Cmd::Norm { kind, q, seq } => {
            let x = seq_arg(seq)?;
            let report = match kind.as_str() {
                "sup_delta" => sup_norm_delta(&x, &cfg)?,
                "lq_delta" => {
                    let q = q.ok_or_else(|| {
                        Error::InvalidSpec("norm kind lq_delta needs --q".into())
                    })?;
                    lq_norm_delta(&x, q, &cfg)?
                }
                other => {
                    return Err(Error::InvalidSpec(format!(
                        "unknown norm kind `{other}` (expected sup_delta|lq_delta)"
                    )))
                }
            };
            let code = verdict_code(report.verdict);
            Ok((wrap(&report)?, code))
        }
        Cmd::Member { space, seq } => {
            let space: SpaceId = space.parse()?;
            let verdict = member(&seq_arg(seq)?, space, &cfg)?;
            let code = outcome_code(verdict.outcome);
            Ok((wrap(&verdict)?, code))
        }
        Cmd::Atlas { run_all: _ } => {
            let report = run_atlas(&cfg)?;
            let code = if report.pass {
                0
            } else {
                // A definitive wrong verdict is negative; inconclusive-only
                // mismatches are inconclusive.
                let definitive = report.rows.iter().any(|r| {
                    !r.pass && r.got != Outcome::Inconclusive
                });
                if definitive {
                    2
                } else {
                    3
                }
            };
            Ok((wrap(&report)?, code))
        }
        Cmd::Dual { check, a, x, cut } => {
            let a = seq_arg(a)?;
            let report = match check.as_str() {
                "F1" => check_f1(&a, &cfg)?,
                "F2" => check_f2(&a, *cut, &cfg)?,
                "F3" => check_f3(&a, *cut, &cfg)?,
                "alpha" => {
                    let x = x
                        .as_deref()
                        .ok_or_else(|| Error::InvalidSpec("--check alpha needs --x".into()))?;
                    let x = seq_arg(x)?;
                    let rep = alpha_pairing_abs(&a, &x, &cfg)?;
                    DualConditionReport {
                        condition: "alpha".into(),
                        verdict: rep.verdict.into(),
                        value: rep.limit,
                        report: rep,
                    }
                }
                other => {
                    return Err(Error::InvalidSpec(format!(
                        "unknown dual check `{other}` (expected F1|F2|F3|alpha)"
                    )))
                }
            };
            let code = dual_code(report.verdict);
            Ok((wrap(&report)?, code))
        }
        Cmd::Matclass { matrix, class } => {
            let a = mat_from_str(&input_text(matrix)?)?;
            let class: ClassId = class.parse()?;
            let report = check_class(&a, class, &cfg)?;
            let code = dual_code(report.verdict);
            Ok((wrap(&report)?, code))
        }
        Cmd::Phi { m, n, inv, zero_based } => match (m, n, inv) {
            (None, None, Some(i)) => {
                let (m, n) = phi_inv(*i)?;
                let (m, n) = if *zero_based { (m - 1, n - 1) } else { (m, n) };
                Ok((schema(json!({"m": m, "n": n})), 0))
            }
            (Some(m), Some(n), None) => {
                let (m, n) = if *zero_based { (m + 1, n + 1) } else { (*m, *n) };
                Ok((schema(json!({"phi": phi(m, n)?})), 0))
            }
            _ => Err(Error::InvalidSpec(
                "phi needs either --m and --n, or --inv".into(),
            )),
        },
        Cmd::Flatten { seq, count } => {
            if *count == 0 {
                return Err(Error::InvalidSpec("--count must be at least 1".into()));
            }
            let z = flatten(&seq_arg(seq)?, *count)?;
            let values: Vec<Value> = z.into_iter().map(scalar_json).collect();
            Ok((schema(json!({"count": count, "values": values})), 0))
        }
    }
}
