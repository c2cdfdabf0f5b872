//! The state families on the free group, their evaluation, and the
//! growth-series tests for positivity and reducedness.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::word::{
    check_rank, enumerate_ball, for_each_in_sphere, sphere_size, Letter, ReducedWord, SphereConstraint, SPHERE_GUARD,
};

/// Slack used for every closed region inequality.
pub const REGION_TOL: f64 = 1e-12;

/// A function on the free group evaluated word by word.
pub trait State {
    fn rank(&self) -> u16;
    /// Value at `s`; the caller guarantees `s.rank() == self.rank()`.
    fn value(&self, s: &ReducedWord) -> Complex64;
}

/// Parameterized state families.
///
/// JSON form is internally tagged, e.g. `{"kind":"PhiA","n":2,"a":0.5,"theta":0.0}`
/// or `{"kind":"ChiZ","n":2,"z":[0.0,1.0]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StateSpec {
    /// `e^{i tau(s) theta} a^{|s|-2 gamma(s)} b^{gamma(s)}` with `b = (n a^2 - 1)/(n - 1)`.
    PhiA {
        n: u16,
        a: f64,
        #[serde(default)]
        theta: f64,
    },
    /// `a^{|s|-2 gamma(s)} b^{gamma(s)}` with free `a`, `b`.
    PsiAB { n: u16, a: f64, b: f64 },
    /// `a^{|s|_1}`.
    U1Length { n: u16, a: f64 },
    /// `z^j` on `u_1^j`, zero off the cyclic subgroup of `u_1`.
    ChiZ { n: u16, z: Complex64 },
    /// `n^{-|s|/2}` on `G+ (G+)^{-1}`, zero elsewhere.
    SqrtNEigen { n: u16 },
}

/// `(n a^2 - 1) / (n - 1)`.
pub fn phi_b(n: u16, a: f64) -> f64 {
    let n = n as f64;
    (n * a * a - 1.0) / (n - 1.0)
}

/// `base^exp` with `0^0 = 1`.
fn ipow(base: f64, exp: usize) -> f64 {
    if exp == 0 {
        1.0
    } else {
        base.powi(exp as i32)
    }
}

fn length_switch_value(s: &ReducedWord, a: f64, b: f64) -> f64 {
    let len = s.len();
    let gamma = s.gamma();
    ipow(a, len - 2 * gamma) * ipow(b, gamma)
}

impl StateSpec {
    pub fn phi(n: u16, a: f64) -> Result<Self> {
        Self::phi_twisted(n, a, 0.0)
    }

    pub fn phi_twisted(n: u16, a: f64, theta: f64) -> Result<Self> {
        let s = StateSpec::PhiA { n, a, theta };
        s.validate()?;
        Ok(s)
    }

    pub fn psi(n: u16, a: f64, b: f64) -> Result<Self> {
        let s = StateSpec::PsiAB { n, a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn u1_length(n: u16, a: f64) -> Result<Self> {
        let s = StateSpec::U1Length { n, a };
        s.validate()?;
        Ok(s)
    }

    pub fn chi(n: u16, z: Complex64) -> Result<Self> {
        let s = StateSpec::ChiZ { n, z };
        s.validate()?;
        Ok(s)
    }

    pub fn sqrt_n_eigen(n: u16) -> Result<Self> {
        let s = StateSpec::SqrtNEigen { n };
        s.validate()?;
        Ok(s)
    }

    pub fn n(&self) -> u16 {
        match *self {
            StateSpec::PhiA { n, .. }
            | StateSpec::PsiAB { n, .. }
            | StateSpec::U1Length { n, .. }
            | StateSpec::ChiZ { n, .. }
            | StateSpec::SqrtNEigen { n } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_rank(self.n())?;
        let bad = |m: String| Err(Error::InvalidState(m));
        match *self {
            StateSpec::PhiA { a, theta, .. } => {
                if !a.is_finite() || a.abs() > 1.0 + REGION_TOL {
                    return bad(format!("PhiA needs -1 <= a <= 1, got {a}"));
                }
                if !theta.is_finite() {
                    return bad("theta must be finite".into());
                }
            }
            StateSpec::PsiAB { a, b, .. } => {
                if !a.is_finite() || !b.is_finite() {
                    return bad("a and b must be finite".into());
                }
            }
            StateSpec::U1Length { a, .. } => {
                if !a.is_finite() || a.abs() > 1.0 + REGION_TOL {
                    return bad(format!("U1Length needs -1 <= a <= 1, got {a}"));
                }
            }
            StateSpec::ChiZ { z, .. } => {
                if (z.norm() - 1.0).abs() > REGION_TOL {
                    return bad(format!("ChiZ needs |z| = 1, got |z| = {}", z.norm()));
                }
            }
            StateSpec::SqrtNEigen { .. } => {}
        }
        Ok(())
    }

    /// Checked evaluation.
    pub fn evaluate(&self, s: &ReducedWord) -> Result<Complex64> {
        if s.rank() != self.n() {
            return Err(Error::RankMismatch { left: self.n(), right: s.rank() });
        }
        Ok(self.value(s))
    }
}

impl State for StateSpec {
    fn rank(&self) -> u16 {
        self.n()
    }

    fn value(&self, s: &ReducedWord) -> Complex64 {
        match *self {
            StateSpec::PhiA { n, a, theta } => {
                let v = length_switch_value(s, a, phi_b(n, a));
                if theta == 0.0 {
                    Complex64::new(v, 0.0)
                } else {
                    Complex64::from_polar(v, s.tau() as f64 * theta)
                }
            }
            StateSpec::PsiAB { a, b, .. } => Complex64::new(length_switch_value(s, a, b), 0.0),
            StateSpec::U1Length { a, .. } => Complex64::new(ipow(a, s.u1_length()), 0.0),
            StateSpec::ChiZ { z, .. } => {
                if s.in_first_cyclic() {
                    z.powi(s.tau() as i32)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            StateSpec::SqrtNEigen { n } => {
                if s.in_plus_minus() {
                    Complex64::new((n as f64).powf(-(s.len() as f64) / 2.0), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}

/// Linear extension of a state to the group algebra.
pub fn apply<S: State + ?Sized>(state: &S, x: &AlgebraElement) -> Result<Complex64> {
    if x.rank() != state.rank() {
        return Err(Error::RankMismatch { left: state.rank(), right: x.rank() });
    }
    Ok(x.terms().map(|(s, c)| c * state.value(s)).sum())
}

/// `state(y* y)`: zero exactly when `y` lies in the left kernel.
pub fn left_kernel_residual<S: State + ?Sized>(state: &S, y: &AlgebraElement) -> Result<f64> {
    let yy = y.adjoint().convolve(y)?;
    Ok(apply(state, &yy)?.re)
}

/// Max over `|s| <= depth` of `|sum_j phi(s u_j) - n a e^{i theta} phi(s)|`.
pub fn eigen_relation_residual(spec: &StateSpec, depth: usize) -> Result<f64> {
    let StateSpec::PhiA { n, a, theta } = *spec else {
        return Err(Error::InvalidState("eigen relation is defined for PhiA only".into()));
    };
    spec.validate()?;
    let eig = Complex64::from_polar(n as f64 * a, theta);
    let mut worst: f64 = 0.0;
    for s in enumerate_ball(n, depth)? {
        let sum: Complex64 = (1..=n).map(|j| spec.value(&s.mul_letter(Letter::pos(j)))).sum();
        worst = worst.max((sum - eig * spec.value(&s)).norm());
    }
    Ok(worst)
}

/// Region membership of `psi_{a,b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub positive_definite: bool,
    pub reduced: bool,
    pub ell2: bool,
    pub pure_family_member: bool,
}

/// Classifies `psi_{a,b}` on the rank-`n` free group.
///
/// Positive definite iff `|a| <= 1` and `(n a^2 - 1)/(n-1) <= b <= 1`; reduced iff additionally
/// `b <= (1 - n a^2)/(n-1)`; square summable iff `|b| < (1 - n a^2)/(n-1)`. Closed inequalities get
/// `REGION_TOL` slack, the strict one loses it.
pub fn classify(n: u16, a: f64, b: f64) -> Classification {
    let nf = n as f64;
    let lower = phi_b(n, a);
    let upper_reduced = (1.0 - nf * a * a) / (nf - 1.0);
    let positive_definite = a.abs() <= 1.0 + REGION_TOL && b >= lower - REGION_TOL && b <= 1.0 + REGION_TOL;
    let reduced = positive_definite && b <= upper_reduced + REGION_TOL;
    let ell2 = reduced && b.abs() < upper_reduced - REGION_TOL;
    let pure_family_member = positive_definite && (b - lower).abs() <= REGION_TOL;
    Classification { positive_definite, reduced, ell2, pure_family_member }
}

pub fn classify_spec(spec: &StateSpec) -> Result<Classification> {
    match *spec {
        StateSpec::PsiAB { n, a, b } => Ok(classify(n, a, b)),
        StateSpec::PhiA { n, a, .. } => Ok(classify(n, a, phi_b(n, a))),
        _ => Err(Error::InvalidState("classification covers PsiAB and PhiA".into())),
    }
}

/// `lambda_+ = n a^2 + (n-1) b`, `lambda_- = n a^2 - (n-1) b`.
pub fn growth_eigenvalues(n: u16, a: f64, b: f64) -> (f64, f64) {
    let nf = n as f64;
    (nf * a * a + (nf - 1.0) * b, nf * a * a - (nf - 1.0) * b)
}

/// Sphere sums `C_k = sum_{|s|=k} |psi(s)|^2`, split as `C_k = A_k + B_k` by the sign of the last letter.
///
/// Index `k` runs over `0..=K`; `pos[0] = neg[0] = 0` and `total[0] = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthSeries {
    /// `A_k`: words ending in a positive letter.
    pub pos: Vec<f64>,
    /// `B_k`: words ending in a negative letter.
    pub neg: Vec<f64>,
    /// `C_k`.
    pub total: Vec<f64>,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl GrowthSeries {
    fn with_capacity(k_max: usize, n: u16, a: f64, b: f64) -> Self {
        let (lambda_plus, lambda_minus) = growth_eigenvalues(n, a, b);
        let mut s = GrowthSeries {
            pos: Vec::with_capacity(k_max + 1),
            neg: Vec::with_capacity(k_max + 1),
            total: Vec::with_capacity(k_max + 1),
            lambda_plus,
            lambda_minus,
        };
        s.push(0.0, 0.0);
        s.total[0] = 1.0;
        s
    }

    fn push(&mut self, pos: f64, neg: f64) {
        self.pos.push(pos);
        self.neg.push(neg);
        self.total.push(pos + neg);
    }
}

fn psi_params(spec: &StateSpec) -> Result<(u16, f64, f64)> {
    match *spec {
        StateSpec::PsiAB { n, a, b } => Ok((n, a, b)),
        StateSpec::PhiA { n, a, .. } => Ok((n, a, phi_b(n, a))),
        _ => Err(Error::InvalidState("growth series are defined for PsiAB and PhiA".into())),
    }
}

/// Closed-form sphere sums from the two-term linear recurrence.
///
/// For `b != 0`:
/// `A_k = n/2 (a^2 + b) l+^{k-1} + n/2 (a^2 - b) l-^{k-1}` and
/// `B_k = n/2 (a^2 + a^4/b) l+^{k-1} + n/2 (a^2 - a^4/b) l-^{k-1}`.
/// The `B_k` difference term is evaluated as `n (n-1) a^4 sum_i l+^i l-^{k-2-i}`, which stays
/// accurate as `b -> 0`.
/// For `b == 0` the recurrence is triangular: `A_k = l^k`, `B_k = (k n - k + 1)/n l^k`, `l = n a^2`.
pub fn growth_series_closed_form(spec: &StateSpec, k_max: usize) -> Result<GrowthSeries> {
    let (n, a, b) = psi_params(spec)?;
    let nf = n as f64;
    let a2 = a * a;
    let mut out = GrowthSeries::with_capacity(k_max, n, a, b);
    let (lp, lm) = (out.lambda_plus, out.lambda_minus);
    for k in 1..=k_max {
        if b == 0.0 {
            let l = ipow(nf * a2, k);
            let kf = k as f64;
            out.push(l, (kf * nf - kf + 1.0) / nf * l);
        } else {
            let p = ipow(lp, k - 1);
            let m = ipow(lm, k - 1);
            let pos = nf / 2.0 * (a2 + b) * p + nf / 2.0 * (a2 - b) * m;
            // (a^4/b)(l+^{k-1} - l-^{k-1}) without the division: l+ - l- = 2(n-1)b.
            let h: f64 = (0..k.saturating_sub(1)).map(|i| ipow(lp, i) * ipow(lm, k - 2 - i)).sum();
            let neg = nf / 2.0 * a2 * (p + m) + nf * (nf - 1.0) * a2 * a2 * h;
            out.push(pos, neg);
        }
    }
    Ok(out)
}

/// Sphere sums by direct enumeration and evaluation of every word.
pub fn growth_series_brute(spec: &StateSpec, k_max: usize) -> Result<GrowthSeries> {
    let (n, a, b) = psi_params(spec)?;
    check_rank(n)?;
    let psi = StateSpec::PsiAB { n, a, b };
    for k in 0..=k_max {
        let count = sphere_size(n, k, SphereConstraint::All);
        if count > SPHERE_GUARD {
            return Err(Error::SphereTooLarge { rank: n, radius: k, count, limit: SPHERE_GUARD });
        }
    }
    let mut out = GrowthSeries::with_capacity(k_max, n, a, b);
    for k in 1..=k_max {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for_each_in_sphere(n, k, SphereConstraint::All, |ls| {
            let s = ReducedWord::from_reduced_unchecked(n, ls.to_vec());
            let v = psi.value(&s).norm_sqr();
            if ls[k - 1].is_positive() {
                pos.push(v);
            } else {
                neg.push(v);
            }
        });
        out.push(pairwise_sum(&pos), pairwise_sum(&neg));
    }
    Ok(out)
}

/// Relative error with a zero-safe denominator.
pub fn rel_err(x: f64, y: f64) -> f64 {
    let d = x.abs().max(y.abs());
    if d == 0.0 {
        0.0
    } else {
        (x - y).abs() / d
    }
}

/// Convex combination `sum_j alpha_j chi_{z_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiMixture {
    n: u16,
    parts: Vec<(Complex64, f64)>,
}

impl ChiMixture {
    pub fn new(n: u16, parts: Vec<(Complex64, f64)>) -> Result<Self> {
        check_rank(n)?;
        for (z, _) in &parts {
            if (z.norm() - 1.0).abs() > REGION_TOL {
                return Err(Error::ZeroNotOnCircle(format!("{z}")));
            }
        }
        let total: f64 = parts.iter().map(|p| p.1).sum();
        if parts.is_empty() || parts.iter().any(|p| p.1.is_nan() || p.1 <= 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightsNotConvex(total));
        }
        Ok(Self { n, parts })
    }
}

impl State for ChiMixture {
    fn rank(&self) -> u16 {
        self.n
    }

    fn value(&self, s: &ReducedWord) -> Complex64 {
        if !s.in_first_cyclic() {
            return Complex64::new(0.0, 0.0);
        }
        let j = s.tau() as i32;
        self.parts.iter().map(|(z, w)| z.powi(j) * w).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyRow {
    pub k: i64,
    pub value: Complex64,
    pub expected: Complex64,
    pub abs_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyReport {
    pub residual: f64,
    pub residual_tolerance: f64,
    pub table: Vec<PolyRow>,
    pub max_table_err: f64,
    pub passed: bool,
}

pub const POLY_ROOT_TOL: f64 = 1e-9;
pub const POLY_RESIDUAL_TOL: f64 = 1e-10;

fn eval_poly(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Builds `psi = sum alpha_j chi_{z_j}` for unimodular zeros `z_j` of `p` and checks that `p(u_1)`
/// lies in its left kernel, tabulating `psi(u_1^k)` against `sum alpha_j z_j^k` for `|k| <= 10`.
///
/// `p[k]` is the coefficient of `t^k`.
pub fn poly_kernel_decomposition(n: u16, p: &[Complex64], weights: &[(Complex64, f64)]) -> Result<PolyReport> {
    for (z, _) in weights {
        if (z.norm() - 1.0).abs() > REGION_TOL {
            return Err(Error::ZeroNotOnCircle(format!("{z}")));
        }
        let pz = eval_poly(p, *z).norm();
        if pz > POLY_ROOT_TOL {
            return Err(Error::NotARoot(format!("{z}"), pz));
        }
    }
    let psi = ChiMixture::new(n, weights.to_vec())?;
    let y = AlgebraElement::polynomial_in_first(n, p)?;
    let residual = left_kernel_residual(&psi, &y)?;
    let mut table = Vec::new();
    for k in -10i64..=10 {
        let value = psi.value(&ReducedWord::power(n, 1, k)?);
        let expected: Complex64 = weights.iter().map(|(z, w)| z.powi(k as i32) * w).sum();
        table.push(PolyRow { k, value, expected, abs_err: (value - expected).norm() });
    }
    let max_table_err = table.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    Ok(PolyReport {
        residual,
        residual_tolerance: POLY_RESIDUAL_TOL,
        passed: residual.abs() <= POLY_RESIDUAL_TOL && max_table_err <= POLY_RESIDUAL_TOL,
        table,
        max_table_err,
    })
}
