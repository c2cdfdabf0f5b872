mod render;

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use freestates::algebra::{chi_limit_average, verify_obs_identities, AlgebraElement};
use freestates::boundary::{boundary_state, measure_experiment, Cocycle, CylinderMeasure, DepthMeasure};
use freestates::gram::{self, psd_check, verify_ak_structure, verify_integer_pd, GramMatrix};
use freestates::states::{
    classify, eigen_relation_residual, growth_series_brute, growth_series_closed_form, poly_kernel_decomposition,
    rel_err, State, StateSpec,
};
use freestates::suite::{self, OutputFormat, RunConfig, SCHEMA_VERSION};
use freestates::word::{enumerate_ball, enumerate_sphere, SphereConstraint};
use freestates::{Complex64, ReducedWord};

use render::{fmt_f64, render, Cell, Table};

const BOUNDARY_TOL: f64 = 1e-10;
const SPECTRUM_HEAD: usize = 10;

/// Positive-definite states on free groups: word arithmetic, group-algebra identities,
/// Gram-matrix certificates and boundary integrals.
///
/// Words are whitespace-separated nonzero integers: `i` is the generator u_i and `-i`
/// its inverse; `e` is the identity. Exit status: 0 when every asserted check passes,
/// 1 when a check fails (witnesses go to stderr), 2 on usage or input errors.
#[derive(Parser, Debug)]
#[command(name = "freestates", version)]
struct Cli {
    /// key=value configuration file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<String>,
    /// Worker threads (0 = serial).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format: json, csv or human.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include wall times in reports (reports are then no longer byte-reproducible).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduced-word arithmetic and enumeration.
    #[command(subcommand)]
    Word(WordCmd),
    /// Group-algebra products and the projection identities of the regular representation.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Evaluate, classify and analyse the state families.
    #[command(subcommand)]
    State(StateCmd),
    /// Gram-matrix positivity certificates.
    #[command(subcommand)]
    Gram(GramCmd),
    /// Cylinder measures, cocycles and boundary integrals.
    #[command(subcommand)]
    Boundary(BoundaryCmd),
    /// Run the full verification suite and emit a consolidated report.
    ///
    /// Checks: (1) the eigenvalue relation sum_j phi(s u_j) = n a phi(s); (2) positivity and
    /// block structure of the positive-sphere Gram matrices A_k; (3) the positive-definite region
    /// of psi_{a,b}; (4) closed-form growth series against enumeration and the reducedness flag;
    /// (5) boundary integrals of the cocycle against phi_{lambda/n}; (6) the projection
    /// identities QTT*Q = Q and P u_i^-1 u_j T*Q = 0; (7) cyclic characters, polynomial kernels
    /// and the averaging limit; (8) word identities for gamma, beta and the sqrt(n) eigenstate;
    /// (9) the Radon-Nikodym experiment on perturbed measures (reported only).
    Reproduce {
        /// Rank for the single-rank checks (3, 5 and 8).
        #[arg(long)]
        n: Option<u16>,
    },
}

#[derive(Args, Debug)]
struct RankArg {
    /// Rank of the free group.
    #[arg(long)]
    n: Option<u16>,
}

#[derive(Subcommand, Debug)]
enum WordCmd {
    /// Length, gamma (negative-to-positive switches), u_1-length and exponent sum.
    Stats {
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Free reduction of an arbitrary letter sequence.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Group inverse.
    Inverse {
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Substitution u_1 -> u_1, u_j -> u_1 u_j.
    Beta {
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Sign flip of every letter.
    Sigma {
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Words of a sphere in lexicographic order (u_1 < u_1^-1 < u_2 < ...).
    Sphere {
        #[command(flatten)]
        rank: RankArg,
        /// Radius.
        #[arg(long)]
        k: usize,
        /// all, positive, or ending-neg:i
        #[arg(long, default_value = "all")]
        constraint: String,
    },
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    /// Check QTT*Q = Q and P u_i^-1 u_j T*Q = 0 on all basis vectors up to a length, T = X/sqrt(n).
    VerifyObs {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Product of two elements given as `re im : word` lines (`;` also separates lines, `@file` reads a file).
    Convolve {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Adjoint x*(s) = conj(x(s^-1)).
    Adjoint {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// (1/k) <s xi_k, xi_k> for the indicator xi_k of {u_1, ..., u_1^k}; tends to chi_1(s).
    ChiAverage {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 1000)]
        k: usize,
    },
}

#[derive(Subcommand, Debug)]
enum StateCmd {
    /// Value of a state at a word; the state is given as JSON such as {"kind":"PhiA","n":2,"a":0.5}.
    Eval {
        #[arg(long)]
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Positive definite / reduced / square-summable / pure-family flags of psi_{a,b}.
    Classify {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
    },
    /// Sphere sums of |psi|^2 by enumeration and in closed form (CSV table with --format csv).
    Series {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
    },
    /// Max residual of sum_j phi(s u_j) = n a e^{i theta} phi(s) over |s| <= depth.
    EigenResidual {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Convex combination of characters at unimodular zeros of p lies on the kernel of p(u_1).
    Poly {
        #[command(flatten)]
        rank: RankArg,
        /// Coefficients of p, constant term first; complex entries as re:im.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// Zeros on the unit circle, re:im, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        zeros: String,
        /// Convex weights; uniform when omitted.
        #[arg(long)]
        weights: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum GramCmd {
    /// Smallest eigenvalue of the Gram matrix [psi(s^-1 t)] on a word set.
    Check {
        #[arg(long)]
        spec: String,
        /// sphere:k, positive:k, ball:r or @file (one word per line).
        #[arg(long)]
        set: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Row sums, block structure and eigenvalue transfer of the positive-sphere matrices A_k.
    Structure {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        k: usize,
    },
    /// k -> a^|k| on the integers and s -> a^|s|_1 on the rank-2 ball are positive definite.
    Integer {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BoundaryCmd {
    /// Exact cylinder integration of the cocycle against phi_{lambda/n} for all |s| <= max-len.
    Verify {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
    /// Rank 2: compare ess sup |sqrt(q_1) - sqrt(q_2)| with ess inf sqrt(q_1) + sqrt(q_2) for the
    /// Radon-Nikodym quotients q_j of a depth-d measure.
    Experiment {
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Alpha measure parameter, used when no weights are given.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// `mass : word` lines for every cylinder of the given depth (@file or inline with `;`).
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
    },
}

/// Input-level failure: reported with exit code 2.
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

struct Outcome {
    value: Value,
    table: Option<Table>,
    /// `None` for commands without assertions.
    passed: Option<bool>,
    witnesses: Vec<String>,
}

impl Outcome {
    fn info(value: Value) -> Self {
        Self { value, table: None, passed: None, witnesses: Vec::new() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(cli, argv) {
        Ok(code) => code,
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli, argv: Vec<String>) -> std::result::Result<ExitCode, Usage> {
    let cfg = build_config(&cli)?;
    if let Command::Reproduce { n } = cli.command {
        let mut cfg = cfg;
        if let Some(n) = n {
            cfg.set("n", &n.to_string())?;
        }
        let report = suite::run_all(&cfg, argv)?;
        let value = serde_json::to_value(&report)?;
        let table = Table {
            header: vec!["id", "check", "status", "metric", "value", "comparison", "tolerance", "metric_passed"],
            rows: report
                .checks
                .iter()
                .flat_map(|c| {
                    c.metrics.iter().map(move |m| {
                        vec![
                            Cell::Int(c.id as i64),
                            Cell::Text(c.name.clone()),
                            Cell::Text(status_name(c.status).into()),
                            Cell::Text(m.name.clone()),
                            Cell::Num(m.value),
                            Cell::Text(json!(m.comparison).as_str().unwrap_or_default().into()),
                            Cell::Num(m.tolerance),
                            Cell::Text(m.passed.to_string()),
                        ]
                    })
                })
                .collect(),
        };
        print!("{}", render(cfg.format, &value, Some(&table)));
        for c in report.checks.iter().filter(|c| c.failed()) {
            eprintln!("check {} ({}) failed", c.id, c.name);
            for w in &c.witnesses {
                eprintln!("  witness: {w}");
            }
        }
        return Ok(ExitCode::from(report.exit_code() as u8));
    }
    let outcome = dispatch(cli.command, &cfg)?;
    let mut envelope = serde_json::Map::new();
    envelope.insert("schema_version".into(), json!(SCHEMA_VERSION));
    envelope.insert("command".into(), json!(argv));
    if let Some(p) = outcome.passed {
        envelope.insert("status".into(), json!(if p { "pass" } else { "fail" }));
    }
    envelope.insert("result".into(), outcome.value.clone());
    let value = match cfg.format {
        OutputFormat::Json => Value::Object(envelope),
        _ => outcome.value,
    };
    print!("{}", render(cfg.format, &value, outcome.table.as_ref()));
    match outcome.passed {
        Some(false) => {
            for w in &outcome.witnesses {
                eprintln!("witness: {w}");
            }
            Ok(ExitCode::from(1))
        }
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn status_name(s: suite::Status) -> &'static str {
    match s {
        suite::Status::Pass => "pass",
        suite::Status::Fail => "fail",
        suite::Status::Reported => "reported",
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {path}"))?;
        cfg.apply_text(&text)?;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse()?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.timings {
        cfg.timings = true;
    }
    Ok(cfg)
}

fn rank(r: &RankArg, cfg: &RunConfig) -> u16 {
    r.n.unwrap_or(cfg.n)
}

/// Inline text, or the contents of a file when prefixed with `@`.
fn text_arg(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => Ok(s.replace(';', "\n")),
    }
}

fn parse_spec(s: &str) -> Result<StateSpec> {
    let spec: StateSpec = serde_json::from_str(&text_arg(s)?).context("state spec JSON")?;
    spec.validate()?;
    Ok(spec)
}

fn parse_complex(tok: &str) -> Result<Complex64> {
    let tok = tok.trim();
    let (re, im) = tok.split_once(':').unwrap_or((tok, "0"));
    Ok(Complex64::new(
        re.trim().parse().with_context(|| format!("complex number {tok:?}"))?,
        im.trim().parse().with_context(|| format!("complex number {tok:?}"))?,
    ))
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn word_json(w: &ReducedWord) -> Value {
    json!({"word": w.to_string(), "length": w.len()})
}

fn parse_word_set(s: &str, n: u16) -> Result<Vec<ReducedWord>> {
    if s.starts_with('@') {
        let text = text_arg(s)?;
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| ReducedWord::parse(n, l))
            .collect::<freestates::Result<Vec<_>>>()?;
        return Ok(words);
    }
    let (kind, k) = s.split_once(':').ok_or_else(|| anyhow!("word set must be kind:k or @file"))?;
    let k: usize = k.parse().context("word set radius")?;
    Ok(match kind {
        "sphere" => enumerate_sphere(n, k, SphereConstraint::All)?,
        "positive" => enumerate_sphere(n, k, SphereConstraint::PositiveOnly)?,
        "ball" => enumerate_ball(n, k)?,
        _ => bail!("unknown word set kind {kind:?}"),
    })
}

fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Word(c) => word_cmd(c, cfg),
        Command::Algebra(c) => algebra_cmd(c, cfg),
        Command::State(c) => state_cmd(c, cfg),
        Command::Gram(c) => gram_cmd(c, cfg),
        Command::Boundary(c) => boundary_cmd(c, cfg),
        Command::Reproduce { .. } => unreachable!("handled by run"),
    }
}

fn word_cmd(c: WordCmd, cfg: &RunConfig) -> Result<Outcome> {
    let unary = |word: &str, r: &RankArg, f: fn(&ReducedWord) -> ReducedWord| -> Result<Outcome> {
        let w = ReducedWord::parse(rank(r, cfg), word)?;
        Ok(Outcome::info(word_json(&f(&w))))
    };
    match c {
        WordCmd::Stats { word, rank: r } => {
            let w = ReducedWord::parse(rank(&r, cfg), &word)?;
            Ok(Outcome::info(serde_json::to_value(w.stats())?))
        }
        WordCmd::Reduce { word, rank: r } => unary(&word, &r, ReducedWord::clone),
        WordCmd::Inverse { word, rank: r } => unary(&word, &r, ReducedWord::inverse),
        WordCmd::Beta { word, rank: r } => unary(&word, &r, ReducedWord::beta),
        WordCmd::Sigma { word, rank: r } => unary(&word, &r, ReducedWord::sigma),
        WordCmd::Sphere { rank: r, k, constraint } => {
            let n = rank(&r, cfg);
            let constraint = match constraint.as_str() {
                "all" => SphereConstraint::All,
                "positive" => SphereConstraint::PositiveOnly,
                other => match other.strip_prefix("ending-neg:") {
                    Some(i) => SphereConstraint::EndingNegativeIn(i.parse().context("generator index")?),
                    None => bail!("unknown constraint {other:?}"),
                },
            };
            let words = enumerate_sphere(n, k, constraint)?;
            let table =
                Table { header: vec!["word"], rows: words.iter().map(|w| vec![Cell::Text(w.to_string())]).collect() };
            let value = json!({
                "n": n,
                "k": k,
                "count": words.len(),
                "words": words.iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            Ok(Outcome { table: Some(table), ..Outcome::info(value) })
        }
    }
}

fn element_json(x: &AlgebraElement) -> Result<Value> {
    Ok(serde_json::to_value(x.to_record())?)
}

fn algebra_cmd(c: AlgebraCmd, cfg: &RunConfig) -> Result<Outcome> {
    match c {
        AlgebraCmd::VerifyObs { rank: r, depth } => {
            let rep = verify_obs_identities(rank(&r, cfg), depth)?;
            let witnesses = rep
                .violations
                .iter()
                .map(|v| format!("{} at {} residual {:e}", v.identity, v.word, v.residual))
                .collect();
            Ok(Outcome {
                passed: Some(rep.violations.is_empty()),
                witnesses,
                ..Outcome::info(serde_json::to_value(&rep)?)
            })
        }
        AlgebraCmd::Convolve { rank: r, x, y } => {
            let n = rank(&r, cfg);
            let x = AlgebraElement::parse_text(n, &text_arg(&x)?)?;
            let y = AlgebraElement::parse_text(n, &text_arg(&y)?)?;
            Ok(Outcome::info(element_json(&x.convolve(&y)?)?))
        }
        AlgebraCmd::Adjoint { rank: r, x } => {
            let x = AlgebraElement::parse_text(rank(&r, cfg), &text_arg(&x)?)?;
            Ok(Outcome::info(element_json(&x.adjoint())?))
        }
        AlgebraCmd::ChiAverage { rank: r, word, k } => {
            if k == 0 {
                bail!("k must be positive");
            }
            let n = rank(&r, cfg);
            let s = ReducedWord::parse(n, &word)?;
            let v = chi_limit_average(n, &s, k)?;
            let limit = if s.in_first_cyclic() { 1.0 } else { 0.0 };
            Ok(Outcome::info(json!({
                "word": s.to_string(),
                "k": k,
                "average": complex_json(v),
                "limit": limit,
                "abs_err": (v - Complex64::new(limit, 0.0)).norm(),
            })))
        }
    }
}

fn state_cmd(c: StateCmd, cfg: &RunConfig) -> Result<Outcome> {
    match c {
        StateCmd::Eval { spec, word } => {
            let spec = parse_spec(&spec)?;
            let s = ReducedWord::parse(spec.n(), &word)?;
            Ok(Outcome::info(json!({"word": s.to_string(), "value": complex_json(spec.evaluate(&s)?)})))
        }
        StateCmd::Classify { rank: r, a, b } => {
            let n = rank(&r, cfg);
            freestates::word::check_rank(n)?;
            Ok(Outcome::info(serde_json::to_value(classify(n, a, b))?))
        }
        StateCmd::Series { spec, k_max } => {
            let spec = parse_spec(&spec)?;
            let brute = growth_series_brute(&spec, k_max)?;
            let closed = growth_series_closed_form(&spec, k_max)?;
            let tol = cfg.tolerances.series;
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for k in 0..=k_max {
                let e = rel_err(brute.total[k], closed.total[k]);
                worst = worst.max(e);
                rows.push(vec![
                    Cell::Int(k as i64),
                    Cell::Num(brute.pos[k]),
                    Cell::Num(brute.neg[k]),
                    Cell::Num(brute.total[k]),
                    Cell::Num(closed.pos[k]),
                    Cell::Num(closed.neg[k]),
                    Cell::Num(closed.total[k]),
                    Cell::Num((brute.total[k] - closed.total[k]).abs()),
                ]);
            }
            let value = json!({
                "brute": brute,
                "closed": closed,
                "max_rel_err": worst,
                "tolerance": tol,
            });
            let table = Table {
                header: vec!["k", "A_brute", "B_brute", "C_brute", "A_closed", "B_closed", "C_closed", "abs_err"],
                rows,
            };
            Ok(Outcome {
                table: Some(table),
                passed: Some(worst < tol),
                witnesses: vec![format!("max relative error {worst:e}")],
                value,
            })
        }
        StateCmd::EigenResidual { spec, depth } => {
            let spec = parse_spec(&spec)?;
            let r = eigen_relation_residual(&spec, depth)?;
            let tol = cfg.tolerances.identity;
            Ok(Outcome {
                passed: Some(r <= tol),
                witnesses: vec![format!("residual {r:e}")],
                ..Outcome::info(json!({"depth": depth, "residual": r, "tolerance": tol}))
            })
        }
        StateCmd::Poly { rank: r, coeffs, zeros, weights } => {
            let n = rank(&r, cfg);
            let p = coeffs.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
            let z = zeros.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
            let w: Vec<f64> = match weights {
                Some(w) => w.split(',').map(|t| t.trim().parse().context("weight")).collect::<Result<_>>()?,
                None => vec![1.0 / z.len() as f64; z.len()],
            };
            if w.len() != z.len() {
                bail!("{} zeros but {} weights", z.len(), w.len());
            }
            let parts: Vec<_> = z.into_iter().zip(w).collect();
            let rep = poly_kernel_decomposition(n, &p, &parts)?;
            Ok(Outcome {
                passed: Some(rep.passed),
                witnesses: vec![format!("residual {:e}, table error {:e}", rep.residual, rep.max_table_err)],
                ..Outcome::info(serde_json::to_value(&rep)?)
            })
        }
    }
}

fn gram_summary(g: &GramMatrix, tol: f64) -> Result<(Value, bool, String)> {
    let cert = psd_check(g, tol)?;
    let head: Vec<f64> = cert.spectrum.iter().take(SPECTRUM_HEAD).copied().collect();
    let witness = format!("min eigenvalue {:e} below -{tol:e}", cert.min_eigenvalue);
    Ok((
        json!({
            "dim": g.dim(),
            "min_eig": cert.min_eigenvalue,
            "is_psd": cert.is_psd,
            "tolerance": tol,
            "spectrum_head": head,
        }),
        cert.is_psd,
        witness,
    ))
}

fn gram_cmd(c: GramCmd, cfg: &RunConfig) -> Result<Outcome> {
    match c {
        GramCmd::Check { spec, set, tol } => {
            let spec = parse_spec(&spec)?;
            let words = parse_word_set(&set, spec.n())?;
            let tol = tol.unwrap_or(cfg.tolerances.psd);
            let (value, ok, witness) = gram_summary(&gram::build(&spec, &words)?, tol)?;
            Ok(Outcome { passed: Some(ok), witnesses: vec![witness], ..Outcome::info(value) })
        }
        GramCmd::Structure { rank: r, a, k } => {
            if k == 0 {
                bail!("k must be at least 1");
            }
            let spec = StateSpec::phi(rank(&r, cfg), a)?;
            let rep = verify_ak_structure(&spec, k)?;
            let psd = rep.min_eig_k >= -cfg.tolerances.psd && rep.min_eig_k1 >= -cfg.tolerances.psd;
            Ok(Outcome {
                passed: Some(rep.passed && psd),
                witnesses: vec![format!("{rep:?}")],
                ..Outcome::info(serde_json::to_value(&rep)?)
            })
        }
        GramCmd::Integer { a, k_max } => {
            let rep = verify_integer_pd(a, k_max)?;
            Ok(Outcome {
                passed: Some(rep.passed),
                witnesses: vec![format!("{rep:?}")],
                ..Outcome::info(serde_json::to_value(&rep)?)
            })
        }
    }
}

fn boundary_cmd(c: BoundaryCmd, cfg: &RunConfig) -> Result<Outcome> {
    match c {
        BoundaryCmd::Verify { rank: r, lambda, max_len } => {
            let n = rank(&r, cfg);
            let c = Cocycle::new(n, lambda)?;
            let phi = StateSpec::phi(n, lambda / n as f64)?;
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            let mut witnesses = Vec::new();
            for s in enumerate_ball(n, max_len)? {
                let integral = boundary_state(&c, &s)?;
                let expected = phi.value(&s).re;
                let err = (integral - expected).abs();
                worst = worst.max(err);
                if err >= BOUNDARY_TOL {
                    witnesses.push(format!("{s}: integral {} vs {}", fmt_f64(integral), fmt_f64(expected)));
                }
                rows.push(vec![Cell::Text(s.to_string()), Cell::Num(integral), Cell::Num(expected), Cell::Num(err)]);
            }
            let params = CylinderMeasure::from_lambda(n, lambda)?.params;
            let value = json!({
                "n": n,
                "lambda": lambda,
                "max_len": max_len,
                "words": rows.len(),
                "alphas": params,
                "max_abs_err": worst,
                "tolerance": BOUNDARY_TOL,
            });
            Ok(Outcome {
                value,
                table: Some(Table { header: vec!["word", "integral", "phi", "abs_err"], rows }),
                passed: Some(worst < BOUNDARY_TOL),
                witnesses,
            })
        }
        BoundaryCmd::Experiment { depth, lambda, weights } => {
            let m = match weights {
                Some(w) => DepthMeasure::parse_weights(2, depth, &text_arg(&w)?)?,
                None => DepthMeasure::from_alpha(&CylinderMeasure::from_lambda(2, lambda)?, depth)?,
            };
            let rep = measure_experiment(&m)?;
            Ok(Outcome::info(serde_json::to_value(&rep)?))
        }
    }
}
