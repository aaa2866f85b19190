use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use schwarz::casebook::{run_case, CaseReport, CASES, SCHEMA_VERSION};
use schwarz::cy::{
    adjoint_exponent_search, calabi_residual, detect_sym_power, order5_residuals, s_condition_residual,
    symcy3_residual, symmetric_cy_order4, ConditionReport,
};
use schwarz::expr::parse_ratfunc;
use schwarz::mirror::mum_data;
use schwarz::rational::{fmt_q, parse_q};
use schwarz::schwarzian::{premodular_test, pullback_symmetry_check, solve_schwarzian_series, w_function};
use schwarz::{DiffOperator, Error, RatFunc, Q};

const ADJOINT_EXPONENTS: [(i64, i64); 4] = [(1, 1), (2, 3), (1, 2), (2, 5)];
const MIN_ORDER: i64 = 8;

#[derive(Parser)]
#[command(name = "schwarz", version)]
#[command(about = "Exact Schwarzian-condition checks for linear differential operators")]
struct Cli {
    /// Emit machine-readable JSON
    #[arg(long, global = true)]
    json: bool,

    /// Truncation order K for series work
    #[arg(long, global = true, env = "SCHWARZ_ORDER", default_value_t = 30)]
    order: i64,

    /// Worker threads for batch commands (default: available parallelism)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print W(x) of an operator and its Laurent head at 0
    W {
        #[arg(long)]
        op: PathBuf,
    },
    /// Schwarzian residual and coefficientwise pullback comparison
    Residual {
        #[arg(long)]
        op: PathBuf,
        /// Rational expression in x, e.g. "-4*x/(1-x)^2"
        #[arg(long, allow_hyphen_values = true)]
        pullback: String,
    },
    /// Series solution y_n = a_n·x^n + … of the Schwarzian equation
    Solve {
        /// File holding W as an expression or {"num", "den"}
        #[arg(long, conflicts_with = "op", required_unless_present = "op")]
        w: Option<PathBuf>,
        #[arg(long)]
        op: Option<PathBuf>,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        an: String,
    },
    /// Pre-modular test of W
    Premodular {
        #[arg(long, conflicts_with = "w", required_unless_present = "w")]
        op: Option<PathBuf>,
        #[arg(long)]
        w: Option<PathBuf>,
    },
    /// Calabi-Yau condition battery
    Cy {
        #[arg(long)]
        op: PathBuf,
    },
    /// Nome and Yukawa coupling of an order-four MUM operator
    Mirror {
        #[arg(long)]
        op: PathBuf,
    },
    /// Run casebook scenarios
    Case {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        name: Option<String>,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A finished command: verdict, JSON payload and text rendering.
struct Outcome {
    pass: bool,
    payload: Value,
    text: String,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_op(path: &Path) -> CliResult<DiffOperator> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// `W` from a JSON value or a bare expression.
fn load_w(path: &Path) -> CliResult<RatFunc> {
    let text = read(path)?;
    match serde_json::from_str::<RatFunc>(&text) {
        Ok(w) => Ok(w),
        Err(_) if !text.trim_start().starts_with(['{', '"']) => {
            parse_ratfunc(text.trim()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        Err(e) => Err(CliError::Input(format!("{}: {e}", path.display()))),
    }
}

fn w_of(op: Option<&PathBuf>, w: Option<&PathBuf>) -> CliResult<RatFunc> {
    match (op, w) {
        (Some(p), _) => Ok(w_function(&load_op(p)?)?),
        (_, Some(p)) => load_w(p),
        _ => Err(CliError::Input("either --op or --w is required".into())),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn cmd_w(op: &Path) -> CliResult<Outcome> {
    let w = w_function(&load_op(op)?)?;
    let pm = premodular_test(&w);
    let head: Vec<String> = pm
        .valuation
        .map(|v| (v.min(0)..=0).map(|k| fmt_q(&pm.laurent.coeff(k))).collect())
        .unwrap_or_default();
    let text = format!(
        "W = {w}\nLaurent head from x^{}: {}",
        pm.valuation.map_or("-∞".into(), |v| v.min(0).to_string()),
        head.join(", ")
    );
    Ok(Outcome {
        pass: true,
        payload: json!({ "w": w, "w_text": w.to_string(), "valuation": pm.valuation, "laurent_head": head }),
        text,
    })
}

fn cmd_residual(op: &Path, pullback: &str) -> CliResult<Outcome> {
    let l = load_op(op)?;
    let y = parse_ratfunc(pullback)?;
    let r = pullback_symmetry_check(&l, &y)?;
    let zero = r.schwarzian_residual.is_zero();
    let mut text = format!("Schwarzian residual: {}\n", r.schwarzian_residual);
    for (k, (ok, d)) in r.coefficient_match.iter().zip(&r.differences).enumerate().rev() {
        text += &format!(
            "D^{k}: {}\n",
            if *ok {
                "match".to_string()
            } else {
                format!("differs by {d}")
            }
        );
    }
    Ok(Outcome {
        pass: zero && r.full_match(),
        payload: json!({
            "schwarzian_residual_zero": zero,
            "mismatches": r.mismatches(),
            "report": to_json(&r),
        }),
        text: text.trim_end().to_string(),
    })
}

fn cmd_solve(w: RatFunc, n: u32, an: &str, order: i64) -> CliResult<Outcome> {
    let a = parse_q(an).map_err(|e| CliError::Input(format!("--an: {e}")))?;
    let s = solve_schwarzian_series(&w, n, &a, order)?;
    let text = match s.inconsistent_at {
        Some(k) => format!("inconsistent at order {k}; determined part: {}", s.tail),
        None => format!("y_{n} = {}", s.tail),
    };
    Ok(Outcome {
        pass: s.is_consistent(),
        payload: to_json(&s),
        text,
    })
}

fn cmd_premodular(w: RatFunc) -> CliResult<Outcome> {
    let pm = premodular_test(&w);
    let text = format!(
        "{}: head {}, residue {}",
        if pm.pass { "pre-modular" } else { "not pre-modular" },
        fmt_q(&pm.head),
        fmt_q(&pm.residue)
    );
    Ok(Outcome {
        pass: pm.pass,
        payload: json!({
            "pass": pm.pass,
            "valuation": pm.valuation,
            "head": fmt_q(&pm.head),
            "residue": fmt_q(&pm.residue),
        }),
        text,
    })
}

fn cmd_cy(op: &Path) -> CliResult<Outcome> {
    let l = load_op(op)?.monic();
    let n = l.order();
    let mut conditions: Vec<ConditionReport> = vec![];
    match n {
        3 => conditions.push(symcy3_residual(&l)?),
        4 => {
            conditions.push(calabi_residual(&l)?);
            conditions.push(s_condition_residual(&l)?);
        }
        5 => conditions.extend(order5_residuals(&l)?),
        _ => {}
    }
    let sym = if n >= 2 { Some(detect_sym_power(&l)?) } else { None };
    let sym_cy = if n == 4 { Some(symmetric_cy_order4(&l)?) } else { None };
    let candidates: Vec<Q> = ADJOINT_EXPONENTS
        .iter()
        .map(|&(a, b)| Q::new(a.into(), b.into()))
        .collect();
    let alpha = adjoint_exponent_search(&l, &candidates);

    let mut lines = vec![format!("order {n}")];
    for c in &conditions {
        lines.push(format!(
            "{}: {}",
            c.name,
            if c.holds {
                "holds".into()
            } else {
                format!("residual {}", c.residual)
            }
        ));
    }
    if let Some((o, below)) = sym_cy {
        lines.push(format!(
            "symmetric square order {o}{}",
            if below { " (drops)" } else { "" }
        ));
    }
    if let Some(s) = &sym {
        lines.push(if s.is_sym_power {
            format!("symmetric power of {}", s.l2)
        } else {
            format!("not a symmetric power (mismatched coefficients {:?})", s.mismatches)
        });
    }
    lines.push(format!(
        "adjoint exponent: {}",
        alpha.as_ref().map_or("none".into(), fmt_q)
    ));
    let pass = conditions.iter().all(|c| c.holds) && sym.as_ref().is_none_or(|s| s.is_sym_power) && alpha.is_some();
    Ok(Outcome {
        pass,
        payload: json!({
            "order": n,
            "conditions": to_json(&conditions),
            "symmetric_square_order": sym_cy.map(|(o, _)| o),
            "sym_power": sym.as_ref().map(to_json),
            "adjoint_exponent": alpha.as_ref().map(fmt_q),
        }),
        text: lines.join("\n"),
    })
}

fn cmd_mirror(op: &Path, order: i64) -> CliResult<Outcome> {
    let d = mum_data(&load_op(op)?, order)?;
    let text = format!("q_x = {}\nK_x = {}\nK_q = {}", d.q_x, d.k_x, d.k_q);
    Ok(Outcome {
        pass: true,
        payload: json!({ "q_x": d.q_x, "k_x": d.k_x, "k_q": d.k_q }),
        text,
    })
}

/// Run cases on `jobs` workers, keeping registry order.
fn run_cases(names: &[&str], jobs: usize) -> Vec<(String, Result<CaseReport, Error>)> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<CaseReport, Error>>>> = Mutex::new(names.iter().map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, names.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= names.len() {
                    break;
                }
                let r = run_case(names[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    let slots = slots.into_inner().unwrap();
    names
        .iter()
        .zip(slots)
        .map(|(n, r)| (n.to_string(), r.expect("every case ran")))
        .collect()
}

fn cmd_case(name: Option<&str>, jobs: usize) -> CliResult<Outcome> {
    let names: Vec<&str> = match name {
        Some(n) => vec![n],
        None => CASES.to_vec(),
    };
    let results = run_cases(&names, jobs);
    let mut reports = vec![];
    let mut lines = vec![];
    let mut pass = true;
    for (n, r) in results {
        let r = match r {
            Ok(r) => r,
            Err(Error::UnknownCase(c)) => {
                return Err(CliError::Input(format!(
                    "unknown case {c:?}; known cases: {}",
                    CASES.join(", ")
                )))
            }
            Err(e) => return Err(e.into()),
        };
        pass &= r.pass;
        let failed = r.failures().count();
        lines.push(format!(
            "{} {n}: {} checks, {failed} failed",
            if r.pass { "PASS" } else { "FAIL" },
            r.checks.len()
        ));
        for c in r.failures() {
            lines.push(format!(
                "  {}: expected {}, computed {}",
                c.description, c.expected, c.computed
            ));
        }
        reports.push(r);
    }
    let payload = if name.is_some() {
        to_json(&reports[0])
    } else {
        json!({ "cases": to_json(&reports) })
    };
    Ok(Outcome {
        pass,
        payload,
        text: lines.join("\n"),
    })
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    if cli.order < MIN_ORDER {
        return Err(CliError::Input(format!(
            "truncation order must be at least {MIN_ORDER}, got {}",
            cli.order
        )));
    }
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match &cli.command {
        Command::W { op } => cmd_w(op),
        Command::Residual { op, pullback } => cmd_residual(op, pullback),
        Command::Solve { w, op, n, an } => cmd_solve(w_of(op.as_ref(), w.as_ref())?, *n, an, cli.order),
        Command::Premodular { op, w } => cmd_premodular(w_of(op.as_ref(), w.as_ref())?),
        Command::Cy { op } => cmd_cy(op),
        Command::Mirror { op } => cmd_mirror(op, cli.order),
        Command::Case { name, .. } => cmd_case(name.as_deref(), jobs),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::W { .. } => "w",
        Command::Residual { .. } => "residual",
        Command::Solve { .. } => "solve",
        Command::Premodular { .. } => "premodular",
        Command::Cy { .. } => "cy",
        Command::Mirror { .. } => "mirror",
        Command::Case { .. } => "case",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = command_name(&cli.command);
    match run(&cli) {
        Ok(o) => {
            if cli.json {
                let v = json!({ "schema_version": SCHEMA_VERSION, "command": command, "pass": o.pass, "result": o.payload });
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                println!("{}", o.text);
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                let mut err = json!({ "message": e.to_string() });
                if let CliError::Lib(Error::NotMum { indicial }) = &e {
                    err["indicial_polynomial"] = json!(indicial);
                }
                if let CliError::Lib(Error::Parse { pos, .. }) = &e {
                    err["position"] = json!(pos);
                }
                let v = json!({ "schema_version": SCHEMA_VERSION, "command": command, "pass": false, "error": err });
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
    }
}
