//! The batch verification suite: run configuration, per-check results and the
//! consolidated report.

use std::f64::consts::{FRAC_PI_3, PI};
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{chi_limit_average, verify_obs_identities};
use crate::boundary::{alphas_from_lambda, boundary_state, measure_experiment, Cocycle, CylinderMeasure, DepthMeasure};
use crate::error::{Error, Result};
use crate::gram::{ball_gram, psd_check, verify_ak_structure};
use crate::numeric::par_map;
use crate::states::{
    classify, eigen_relation_residual, growth_eigenvalues, growth_series_brute, growth_series_closed_form, phi_b,
    poly_kernel_decomposition, rel_err, State, StateSpec,
};
use crate::word::{check_rank, enumerate_ball, enumerate_sphere, ReducedWord, SphereConstraint};

pub const SCHEMA_VERSION: u32 = 1;

// Pinned tolerances that are not exposed through `Tolerances`.
pub const ROW_SUM_TOL: f64 = 1e-10;
pub const BLOCK_TOL: f64 = 1e-12;
pub const TRANSFER_TOL: f64 = 1e-8;
pub const BOUNDARY_TOL: f64 = 1e-10;
pub const ALPHA_NORM_TOL: f64 = 1e-14;
pub const BRANCH_TOL: f64 = 1e-14;
pub const POLY_TOL: f64 = 1e-10;
pub const EXPERIMENT_EQ_TOL: f64 = 1e-9;
pub const EXPERIMENT_FRACTION: f64 = 0.95;
pub const EXTERIOR_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Human,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "human" => Ok(Self::Human),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub psd: f64,
    pub identity: f64,
    pub series: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { psd: 1e-9, identity: 1e-12, series: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthLimits {
    pub eigen: usize,
    pub ak_rank2: usize,
    pub ak_rank3: usize,
    pub psi_ball: usize,
    pub series: usize,
    pub boundary: usize,
    pub obs: usize,
    pub words: usize,
    pub experiment: usize,
}

impl Default for DepthLimits {
    fn default() -> Self {
        Self {
            eigen: 6,
            ak_rank2: 4,
            ak_rank3: 3,
            psi_ball: 3,
            series: 8,
            boundary: 5,
            obs: 4,
            words: 8,
            experiment: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Rank used by the checks that run at a single rank.
    pub n: u16,
    pub tolerances: Tolerances,
    pub limits: DepthLimits,
    pub format: OutputFormat,
    pub seed: u64,
    /// Worker cap; 0 and 1 both mean serial.
    pub threads: usize,
    /// Record per-check wall time in the report.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            tolerances: Tolerances::default(),
            limits: DepthLimits::default(),
            format: OutputFormat::Json,
            seed: 42,
            threads: 0,
            timings: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let x: f64 = parse(key, value)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Config(format!("{key} must be positive")))
    }
}

impl RunConfig {
    /// Sets one `key=value` entry. Keys: `n`, `seed`, `threads`, `format`, `timings`,
    /// `tol.psd`, `tol.identity`, `tol.series`, `depth.<field>`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "n" => {
                let n = parse(key, value)?;
                check_rank(n)?;
                self.n = n;
            }
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "format" => self.format = value.trim().parse()?,
            "timings" => self.timings = parse(key, value)?,
            "tol.psd" => self.tolerances.psd = positive(key, value)?,
            "tol.identity" => self.tolerances.identity = positive(key, value)?,
            "tol.series" => self.tolerances.series = positive(key, value)?,
            _ => {
                let l = &mut self.limits;
                let slot = match key {
                    "depth.eigen" => &mut l.eigen,
                    "depth.ak_rank2" => &mut l.ak_rank2,
                    "depth.ak_rank3" => &mut l.ak_rank3,
                    "depth.psi_ball" => &mut l.psi_ball,
                    "depth.series" => &mut l.series,
                    "depth.boundary" => &mut l.boundary,
                    "depth.obs" => &mut l.obs,
                    "depth.words" => &mut l.words,
                    "depth.experiment" => &mut l.experiment,
                    _ => return Err(Error::Config(format!("unknown key {key:?}"))),
                };
                *slot = parse(key, value)?;
            }
        }
        Ok(())
    }

    /// Applies a `key = value` file; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Reported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
}

/// One number compared against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub passed: bool,
}

impl Metric {
    pub fn new(name: &str, value: f64, comparison: Comparison, tolerance: f64) -> Self {
        let passed = match comparison {
            Comparison::AtMost => value <= tolerance,
            Comparison::AtLeast => value >= tolerance,
            Comparison::Below => value < tolerance,
        };
        Self { name: name.to_string(), value, comparison, tolerance, passed }
    }

    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Comparison::AtMost, tolerance)
    }

    /// Zero-count metric for integer mismatch tallies.
    pub fn count(name: &str, count: usize) -> Self {
        Self::new(name, count as f64, Comparison::AtMost, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: String,
    pub status: Status,
    pub metrics: Vec<Metric>,
    /// Inputs on which a metric failed (capped).
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
}

const MAX_WITNESSES: usize = 20;

impl CheckResult {
    fn asserted(id: u8, name: &str, metrics: Vec<Metric>, mut witnesses: Vec<String>) -> Self {
        let status = if metrics.iter().all(|m| m.passed) { Status::Pass } else { Status::Fail };
        witnesses.truncate(MAX_WITNESSES);
        Self { id, name: name.into(), status, metrics, witnesses, elapsed_s: None }
    }

    fn reported(id: u8, name: &str, metrics: Vec<Metric>, mut witnesses: Vec<String>) -> Self {
        witnesses.truncate(MAX_WITNESSES);
        Self { id, name: name.into(), status: Status::Reported, metrics, witnesses, elapsed_s: None }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.failed())
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

pub const CHECK_NAMES: [&str; 9] = [
    "eigenstate identity",
    "positive-sphere Gram structure",
    "psi region",
    "growth series",
    "boundary integral",
    "projection identities",
    "cyclic characters and polynomial kernels",
    "word identities",
    "measure experiment",
];

/// Runs check `id` (1..=9).
pub fn run_check(id: u8, cfg: &RunConfig) -> Result<CheckResult> {
    let start = Instant::now();
    let mut r = match id {
        1 => eigenstate_identity(cfg),
        2 => sphere_gram_structure(cfg),
        3 => psi_region(cfg),
        4 => growth_series(cfg),
        5 => boundary_integral(cfg),
        6 => projection_identities(cfg),
        7 => cyclic_characters(cfg),
        8 => word_identities(cfg),
        9 => measure_experiment_check(cfg),
        _ => Err(Error::Config(format!("no check with id {id}"))),
    }?;
    if cfg.timings {
        r.elapsed_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(r)
}

pub fn run_all(cfg: &RunConfig, command: Vec<String>) -> Result<Report> {
    let start = Instant::now();
    let checks = (1..=9).map(|id| run_check(id, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command,
        config: cfg.clone(),
        checks,
        wall_time_s: cfg.timings.then(|| start.elapsed().as_secs_f64()),
    })
}

/// `{0, 0.25, 1/sqrt(n), 0.75, 1}`.
pub fn a_grid(n: u16) -> [f64; 5] {
    [0.0, 0.25, 1.0 / (n as f64).sqrt(), 0.75, 1.0]
}

fn eigenstate_identity(cfg: &RunConfig) -> Result<CheckResult> {
    let mut cases = Vec::new();
    for n in [2u16, 3] {
        for a in a_grid(n) {
            for theta in [0.0, FRAC_PI_3, PI] {
                cases.push(StateSpec::phi_twisted(n, a, theta)?);
            }
        }
    }
    let depth = cfg.limits.eigen;
    let res = par_map(cfg.threads, &cases, |s| eigen_relation_residual(s, depth));
    let tol = cfg.tolerances.identity;
    let mut worst: f64 = 0.0;
    let mut witnesses = Vec::new();
    for (spec, r) in cases.iter().zip(res) {
        let r = r?;
        worst = worst.max(r);
        if r > tol {
            witnesses.push(format!("{} residual {r:e}", serde_json::to_string(spec).unwrap_or_default()));
        }
    }
    Ok(CheckResult::asserted(1, CHECK_NAMES[0], vec![Metric::at_most("max_residual", worst, tol)], witnesses))
}

fn sphere_gram_structure(cfg: &RunConfig) -> Result<CheckResult> {
    let mut cases = Vec::new();
    for (n, k_max) in [(2u16, cfg.limits.ak_rank2), (3, cfg.limits.ak_rank3)] {
        for a in a_grid(n) {
            for k in 1..=k_max {
                cases.push((StateSpec::phi(n, a)?, k));
            }
        }
    }
    let reports = par_map(cfg.threads, &cases, |(s, k)| verify_ak_structure(s, *k));
    let mut min_eig = f64::INFINITY;
    let mut row = 0.0f64;
    let mut block = 0.0f64;
    let mut transfer = 0.0f64;
    let mut inexact = 0;
    let mut witnesses = Vec::new();
    for r in reports {
        let r = r?;
        min_eig = min_eig.min(r.min_eig_k).min(r.min_eig_k1);
        row = row.max(r.row_sum_max_err);
        block = block.max(r.off_block_max_err);
        transfer = transfer.max(r.transfer_max_err);
        if !r.diagonal_blocks_exact {
            inexact += 1;
        }
        if !r.passed || r.min_eig_k < -cfg.tolerances.psd {
            witnesses.push(format!("n={} a={} k={}", r.n, r.a, r.k));
        }
    }
    let metrics = vec![
        Metric::new("min_eigenvalue", min_eig, Comparison::AtLeast, -cfg.tolerances.psd),
        Metric::at_most("row_sum_max_err", row, ROW_SUM_TOL),
        Metric::count("inexact_diagonal_blocks", inexact),
        Metric::at_most("off_block_max_err", block, BLOCK_TOL),
        Metric::at_most("eigenvalue_transfer_max_err", transfer, TRANSFER_TOL),
    ];
    Ok(CheckResult::asserted(2, CHECK_NAMES[1], metrics, witnesses))
}

/// Distance from `(a, b)` to the boundary of `{|a| <= 1, (n a^2 - 1)/(n-1) <= b <= 1}`,
/// from a dense sampling of the lower curve plus the top edge.
pub fn psi_region_distance(n: u16, a: f64, b: f64) -> f64 {
    const SAMPLES: usize = 20_000;
    let mut d = f64::INFINITY;
    for i in 0..=SAMPLES {
        let x = -1.0 + 2.0 * i as f64 / SAMPLES as f64;
        d = d.min((a - x).hypot(b - phi_b(n, x)));
    }
    let top = if a.abs() <= 1.0 { (b - 1.0).abs() } else { (a.abs() - 1.0).hypot(b - 1.0) };
    d.min(top)
}

fn psi_region(cfg: &RunConfig) -> Result<CheckResult> {
    let n = cfg.n;
    let grid: Vec<f64> = (0..=20).map(|i| (i as f64 - 10.0) / 10.0).collect();
    let mut points = Vec::new();
    for &a in &grid {
        for &b in &grid {
            points.push((a, b));
        }
    }
    let radius = cfg.limits.psi_ball;
    let tol = cfg.tolerances.psd;
    let results = par_map(cfg.threads, &points, |&(a, b)| -> Result<f64> {
        let spec = StateSpec::PsiAB { n, a, b };
        Ok(psd_check(&ball_gram(&spec, radius)?, tol)?.min_eigenvalue)
    });
    let mut interior_min = f64::INFINITY;
    let mut exterior_max = f64::NEG_INFINITY;
    let mut near_boundary = 0;
    let mut witnesses = Vec::new();
    for (&(a, b), r) in points.iter().zip(results) {
        let min_eig = r?;
        if classify(n, a, b).positive_definite {
            interior_min = interior_min.min(min_eig);
            if min_eig < -tol {
                witnesses.push(format!("interior (a={a}, b={b}) min_eig {min_eig:e}"));
            }
        } else if psi_region_distance(n, a, b) >= EXTERIOR_MARGIN {
            exterior_max = exterior_max.max(min_eig);
            if min_eig >= -tol {
                witnesses.push(format!("exterior (a={a}, b={b}) min_eig {min_eig:e}"));
            }
        } else {
            near_boundary += 1;
        }
    }
    let metrics = vec![
        Metric::new("interior_min_eigenvalue", interior_min, Comparison::AtLeast, -tol),
        Metric::new("exterior_max_min_eigenvalue", exterior_max, Comparison::Below, -tol),
        Metric::new("near_boundary_exterior_points", near_boundary as f64, Comparison::AtLeast, 0.0),
    ];
    Ok(CheckResult::asserted(3, CHECK_NAMES[2], metrics, witnesses))
}

fn growth_series(cfg: &RunConfig) -> Result<CheckResult> {
    let mut cases = Vec::new();
    for n in [2u16, 3] {
        let nf = n as f64;
        for a in a_grid(n) {
            let lower = phi_b(n, a);
            let upper = (1.0 - nf * a * a) / (nf - 1.0);
            let mut bs = vec![lower, 0.0, 0.5 * (lower + 1.0), 1.0];
            if upper >= lower {
                bs.push(upper);
            }
            bs.retain(|&b| b >= lower && b <= 1.0);
            bs.sort_by(f64::total_cmp);
            bs.dedup();
            for b in bs {
                cases.push(StateSpec::PsiAB { n, a, b });
            }
        }
    }
    let k_max = cfg.limits.series;
    let tol = cfg.tolerances.series;
    let results = par_map(cfg.threads, &cases, |s| -> Result<f64> {
        let brute = growth_series_brute(s, k_max)?;
        let closed = growth_series_closed_form(s, k_max)?;
        Ok((0..=k_max).map(|k| rel_err(brute.total[k], closed.total[k])).fold(0.0, f64::max))
    });
    let mut worst = 0.0f64;
    let mut flag_mismatch = 0;
    let mut witnesses = Vec::new();
    for (spec, r) in cases.iter().zip(results) {
        let e = r?;
        worst = worst.max(e);
        let StateSpec::PsiAB { n, a, b } = *spec else { unreachable!() };
        if e >= tol {
            witnesses.push(format!("n={n} a={a} b={b} rel_err {e:e}"));
        }
        let (lp, _) = growth_eigenvalues(n, a, b);
        if classify(n, a, b).reduced != (lp <= 1.0 + crate::states::REGION_TOL) {
            flag_mismatch += 1;
            witnesses.push(format!("n={n} a={a} b={b} reduced flag vs lambda_+ = {lp}"));
        }
    }
    let metrics = vec![
        Metric::new("max_rel_err", worst, Comparison::Below, tol),
        Metric::count("classification_mismatches", flag_mismatch),
    ];
    Ok(CheckResult::asserted(4, CHECK_NAMES[3], metrics, witnesses))
}

fn boundary_integral(cfg: &RunConfig) -> Result<CheckResult> {
    let n = cfg.n;
    let nf = n as f64;
    let words = enumerate_ball(n, cfg.limits.boundary)?;
    let mut worst = 0.0f64;
    let mut norm_err = 0.0f64;
    let mut branch_err = 0.0f64;
    let mut witnesses = Vec::new();
    for lambda in [0.5, 1.0, 1.3] {
        let c = Cocycle::new(n, lambda)?;
        let phi = StateSpec::phi(n, lambda / nf)?;
        let vals = par_map(cfg.threads, &words, |s| boundary_state(&c, s));
        for (s, v) in words.iter().zip(vals) {
            let e = (v? - phi.value(s).re).abs();
            worst = worst.max(e);
            if e >= BOUNDARY_TOL {
                witnesses.push(format!("lambda={lambda} s={s} err {e:e}"));
            }
        }
        let (e1, e2) = alphas_from_lambda(n, lambda)?.normalization_errors(n);
        norm_err = norm_err.max(e1.abs()).max(e2.abs());
        let m = CylinderMeasure::from_lambda(n, lambda)?;
        for pre in enumerate_sphere(n, 2, SphereConstraint::All)? {
            for j in 1..=n {
                let p = c.p_value(j, &pre)?;
                let rn = m.rn_derivative(j, &pre)?;
                branch_err = branch_err.max((p * p - rn).abs() / rn.max(1.0));
            }
        }
    }
    let metrics = vec![
        Metric::new("max_abs_err", worst, Comparison::Below, BOUNDARY_TOL),
        Metric::at_most("alpha_normalization_err", norm_err, ALPHA_NORM_TOL),
        Metric::at_most("p_squared_vs_rn_rel_err", branch_err, BRANCH_TOL),
    ];
    Ok(CheckResult::asserted(5, CHECK_NAMES[4], metrics, witnesses))
}

fn projection_identities(cfg: &RunConfig) -> Result<CheckResult> {
    let tol = cfg.tolerances.identity;
    let mut violations = 0;
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut witnesses = Vec::new();
    for n in [2u16, 3] {
        let r = verify_obs_identities(n, cfg.limits.obs)?;
        checked += r.checked;
        worst = worst.max(r.max_residual);
        for v in r.violations.iter().filter(|v| v.residual > tol) {
            violations += 1;
            witnesses.push(format!("n={n} {} at {} residual {:e}", v.identity, v.word, v.residual));
        }
    }
    let metrics = vec![
        Metric::new("basis_vectors_checked", checked as f64, Comparison::AtLeast, 1.0),
        Metric::count("violations", violations),
        Metric::at_most("max_residual", worst, tol),
    ];
    Ok(CheckResult::asserted(6, CHECK_NAMES[5], metrics, witnesses))
}

fn cyclic_characters(cfg: &RunConfig) -> Result<CheckResult> {
    let n = 2;
    let tol = cfg.tolerances.identity;
    let mut witnesses = Vec::new();
    let mut chi_err = 0.0f64;
    for z in [Complex64::from_polar(1.0, 0.7), Complex64::new(-1.0, 0.0), Complex64::from_polar(1.0, FRAC_PI_3)] {
        let chi = StateSpec::chi(n, z)?;
        for j in -10i64..=10 {
            let e = (chi.value(&ReducedWord::power(n, 1, j)?) - z.powi(j as i32)).norm();
            chi_err = chi_err.max(e);
        }
        let off = ReducedWord::parse(n, "1 2")?;
        chi_err = chi_err.max(chi.value(&off).norm());
    }
    let c = |re| Complex64::new(re, 0.0);
    let w2 = [(c(1.0), 0.5), (c(-1.0), 0.5)];
    let cube: Vec<_> = (0..3).map(|k| (Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0), 1.0 / 3.0)).collect();
    let mut poly_res = 0.0f64;
    for (p, w) in [(vec![c(-1.0), c(0.0), c(1.0)], w2.to_vec()), (vec![c(-1.0), c(0.0), c(0.0), c(1.0)], cube)] {
        let r = poly_kernel_decomposition(n, &p, &w)?;
        poly_res = poly_res.max(r.residual.abs()).max(r.max_table_err);
    }
    let k = 1000;
    let mut avg_excess = f64::NEG_INFINITY;
    for s in enumerate_ball(n, 3)?.into_iter().chain((-5..=5).map(|j| ReducedWord::power(n, 1, j).expect("rank 2"))) {
        let v = chi_limit_average(n, &s, k)?;
        let excess = if s.in_first_cyclic() {
            (v - Complex64::new(1.0, 0.0)).norm() - s.tau().unsigned_abs() as f64 / k as f64
        } else {
            v.norm()
        };
        if excess > tol {
            witnesses.push(format!("average at s={s}: {v}"));
        }
        avg_excess = avg_excess.max(excess);
    }
    let metrics = vec![
        Metric::at_most("chi_value_err", chi_err, tol),
        Metric::at_most("poly_kernel_residual", poly_res, POLY_TOL),
        Metric::at_most("average_excess_over_bound", avg_excess, tol),
    ];
    Ok(CheckResult::asserted(7, CHECK_NAMES[6], metrics, witnesses))
}

fn word_identities(cfg: &RunConfig) -> Result<CheckResult> {
    let n = cfg.n;
    let words = enumerate_ball(n, cfg.limits.words)?;
    let sqrt_eigen = StateSpec::sqrt_n_eigen(n)?;
    let phi = StateSpec::phi(n, 1.0 / (n as f64).sqrt())?;
    let mut gamma_bad = 0;
    let mut beta_bad = 0;
    let mut state_err = 0.0f64;
    let mut witnesses = Vec::new();
    for s in &words {
        if s.inverse().gamma() != s.gamma() {
            gamma_bad += 1;
            witnesses.push(format!("gamma of inverse differs at {s}"));
        }
        if s.beta().u1_length() != s.len() - 2 * s.gamma() {
            beta_bad += 1;
            witnesses.push(format!("beta u1-length differs at {s}"));
        }
        state_err = state_err.max((sqrt_eigen.value(s) - phi.value(s)).norm());
    }
    let metrics = vec![
        Metric::new("words_checked", words.len() as f64, Comparison::AtLeast, 1.0),
        Metric::count("gamma_inverse_mismatches", gamma_bad),
        Metric::count("beta_length_mismatches", beta_bad),
        Metric::at_most("sqrt_n_eigen_vs_phi_err", state_err, cfg.tolerances.identity),
    ];
    Ok(CheckResult::asserted(8, CHECK_NAMES[7], metrics, witnesses))
}

pub const PERTURBATION_COUNT: usize = 200;
pub const PERTURBATION_DEPTH: usize = 3;
pub const PERTURBATION_SPREAD: f64 = 0.5;

fn measure_experiment_check(cfg: &RunConfig) -> Result<CheckResult> {
    let mut eq_gap = 0.0f64;
    let mut witnesses = Vec::new();
    for lambda in [0.5, 1.0, 1.3] {
        let m = DepthMeasure::from_alpha(&CylinderMeasure::from_lambda(2, lambda)?, cfg.limits.experiment)?;
        let r = measure_experiment(&m)?;
        let gap = (r.ess_sup_diff - r.ess_inf_sum).abs();
        eq_gap = eq_gap.max(gap);
        if gap > EXPERIMENT_EQ_TOL {
            witnesses.push(format!("lambda={lambda}: sup diff {} vs inf sum {}", r.ess_sup_diff, r.ess_inf_sum));
        }
    }
    let base = DepthMeasure::from_alpha(&CylinderMeasure::from_lambda(2, 1.0)?, PERTURBATION_DEPTH)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut dominated = 0;
    for i in 0..PERTURBATION_COUNT {
        let m = base.perturbed(&mut rng, PERTURBATION_SPREAD)?;
        let r = measure_experiment(&m)?;
        if r.ess_sup_diff >= r.ess_inf_sum {
            dominated += 1;
        } else {
            witnesses.push(format!("perturbation {i}: sup diff {} < inf sum {}", r.ess_sup_diff, r.ess_inf_sum));
        }
    }
    let metrics = vec![
        Metric::at_most("alpha_measure_equality_gap", eq_gap, EXPERIMENT_EQ_TOL),
        Metric::new(
            "fraction_sup_diff_at_least_inf_sum",
            dominated as f64 / PERTURBATION_COUNT as f64,
            Comparison::AtLeast,
            EXPERIMENT_FRACTION,
        ),
    ];
    Ok(CheckResult::reported(9, CHECK_NAMES[8], metrics, witnesses))
}
