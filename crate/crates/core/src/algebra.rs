//! Exact arithmetic in the complex group algebra and its left action on
//! finitely supported vectors of `l2(G)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{check_rank, enumerate_ball, Letter, ReducedWord};

/// Coefficients below this modulus are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

fn same_rank(left: u16, right: u16) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::RankMismatch { left, right })
    }
}

/// Finitely supported map from words to complex numbers with no stored zeros.
#[derive(Clone, Debug, PartialEq)]
struct Finsupp {
    rank: u16,
    terms: BTreeMap<ReducedWord, Complex64>,
}

impl Finsupp {
    fn new(rank: u16) -> Self {
        Self { rank, terms: BTreeMap::new() }
    }

    fn accumulate(&mut self, word: ReducedWord, c: Complex64) {
        *self.terms.entry(word).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
        self
    }

    fn from_terms(rank: u16, terms: impl IntoIterator<Item = (ReducedWord, Complex64)>) -> Result<Self> {
        let mut out = Self::new(rank);
        for (w, c) in terms {
            same_rank(rank, w.rank())?;
            out.accumulate(w, c);
        }
        Ok(out.pruned())
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        same_rank(self.rank, other.rank)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.accumulate(w.clone(), c * sign);
        }
        Ok(out.pruned())
    }

    fn scale(&self, k: Complex64) -> Self {
        Self { rank: self.rank, terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect() }.pruned()
    }

    /// `(x * y)(s) = sum_t x(t) y(t^{-1} s)`, computed as a sum over pairs of supports.
    fn convolve(&self, other: &Self) -> Result<Self> {
        same_rank(self.rank, other.rank)?;
        let mut out = Self::new(self.rank);
        for (t, a) in &self.terms {
            for (u, b) in &other.terms {
                out.accumulate(t.multiply(u)?, a * b);
            }
        }
        Ok(out.pruned())
    }

    fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, c) in &self.terms {
            let _ = writeln!(out, "{:e} {:e} : {}", c.re, c.im, w);
        }
        out
    }

    fn parse_text(rank: u16, text: &str) -> Result<Self> {
        check_rank(rank)?;
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| Error::ParseElement { line: i + 1, reason: reason.to_string() };
            let (coef, word) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
            let mut parts = coef.split_whitespace();
            let re: f64 =
                parts.next().ok_or_else(|| bad("missing real part"))?.parse().map_err(|_| bad("real part"))?;
            let im: f64 = parts
                .next()
                .ok_or_else(|| bad("missing imaginary part"))?
                .parse()
                .map_err(|_| bad("imaginary part"))?;
            if parts.next().is_some() {
                return Err(bad("too many coefficient fields"));
            }
            terms.push((ReducedWord::parse(rank, word)?, Complex64::new(re, im)));
        }
        Self::from_terms(rank, terms)
    }
}

/// JSON mirror of the text form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermsRecord {
    pub rank: u16,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermRecord {
    pub re: f64,
    pub im: f64,
    pub word: String,
}

impl TermsRecord {
    fn from_finsupp(f: &Finsupp) -> Self {
        TermsRecord {
            rank: f.rank,
            terms: f.terms.iter().map(|(w, c)| TermRecord { re: c.re, im: c.im, word: w.to_string() }).collect(),
        }
    }

    fn into_finsupp(self) -> Result<Finsupp> {
        check_rank(self.rank)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            terms.push((ReducedWord::parse(self.rank, &t.word)?, Complex64::new(t.re, t.im)));
        }
        Finsupp::from_terms(self.rank, terms)
    }
}

/// Element of the complex group algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement(Finsupp);

impl AlgebraElement {
    pub fn zero(rank: u16) -> Self {
        Self(Finsupp::new(rank))
    }

    pub fn scalar(rank: u16, c: Complex64) -> Self {
        Self(Finsupp::from_terms(rank, [(ReducedWord::identity(rank), c)]).expect("same rank"))
    }

    pub fn delta(word: ReducedWord) -> Self {
        let rank = word.rank();
        Self(Finsupp::from_terms(rank, [(word, Complex64::new(1.0, 0.0))]).expect("same rank"))
    }

    pub fn from_terms(rank: u16, terms: impl IntoIterator<Item = (ReducedWord, Complex64)>) -> Result<Self> {
        Finsupp::from_terms(rank, terms).map(Self)
    }

    /// `X = u_1 + ... + u_n`.
    pub fn generator_sum(rank: u16) -> Self {
        Self::from_terms(rank, ReducedWord::generators(rank).into_iter().map(|w| (w, Complex64::new(1.0, 0.0))))
            .expect("same rank")
    }

    /// `p(u_1)` for `p(t) = sum_k coeffs[k] t^k`.
    pub fn polynomial_in_first(rank: u16, coeffs: &[Complex64]) -> Result<Self> {
        let mut terms = Vec::with_capacity(coeffs.len());
        for (k, &c) in coeffs.iter().enumerate() {
            terms.push((ReducedWord::power(rank, 1, k as i64)?, c));
        }
        Self::from_terms(rank, terms)
    }

    pub fn rank(&self) -> u16 {
        self.0.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ReducedWord, &Complex64)> {
        self.0.terms.iter()
    }

    pub fn support_len(&self) -> usize {
        self.0.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    pub fn coefficient(&self, w: &ReducedWord) -> Complex64 {
        self.0.terms.get(w).copied().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.0.combine(&other.0, 1.0).map(Self)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.0.combine(&other.0, -1.0).map(Self)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self(self.0.scale(k))
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.0.convolve(&other.0).map(Self)
    }

    /// `x*(s) = conj(x(s^{-1}))`.
    pub fn adjoint(&self) -> Self {
        let rank = self.rank();
        Self(Finsupp { rank, terms: self.0.terms.iter().map(|(w, c)| (w.inverse(), c.conj())).collect() })
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    /// One `"<re> <im> : <word>"` line per term.
    pub fn to_text(&self) -> String {
        self.0.to_text()
    }

    pub fn parse_text(rank: u16, text: &str) -> Result<Self> {
        Finsupp::parse_text(rank, text).map(Self)
    }

    pub fn to_record(&self) -> TermsRecord {
        TermsRecord::from_finsupp(&self.0)
    }

    pub fn from_record(rec: TermsRecord) -> Result<Self> {
        rec.into_finsupp().map(Self)
    }

    /// Left regular action on a finitely supported vector.
    pub fn act(&self, v: &L2Vector) -> Result<L2Vector> {
        self.0.convolve(&v.0).map(L2Vector)
    }
}

/// Finitely supported vector in `l2(G)`.
#[derive(Clone, Debug, PartialEq)]
pub struct L2Vector(Finsupp);

impl L2Vector {
    pub fn zero(rank: u16) -> Self {
        Self(Finsupp::new(rank))
    }

    pub fn delta(word: ReducedWord) -> Self {
        let rank = word.rank();
        Self(Finsupp::from_terms(rank, [(word, Complex64::new(1.0, 0.0))]).expect("same rank"))
    }

    pub fn from_entries(rank: u16, entries: impl IntoIterator<Item = (ReducedWord, Complex64)>) -> Result<Self> {
        Finsupp::from_terms(rank, entries).map(Self)
    }

    pub fn rank(&self) -> u16 {
        self.0.rank
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ReducedWord, &Complex64)> {
        self.0.terms.iter()
    }

    pub fn support_len(&self) -> usize {
        self.0.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    pub fn get(&self, w: &ReducedWord) -> Complex64 {
        self.0.terms.get(w).copied().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.0.combine(&other.0, 1.0).map(Self)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.0.combine(&other.0, -1.0).map(Self)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self(self.0.scale(k))
    }

    /// `<v, w> = sum_s v(s) conj(w(s))`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_rank(self.rank(), other.rank())?;
        Ok(self.0.terms.iter().map(|(s, c)| c * other.get(s).conj()).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.terms.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn project(&self, side: HalfSpace) -> Self {
        let mut out = self.clone();
        out.0.terms.retain(|w, _| side.contains(w));
        out
    }
}

/// `S+`: words beginning with a positive letter. `S-`: the identity and words beginning with a negative letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalfSpace {
    Splus,
    Sminus,
}

impl HalfSpace {
    pub fn contains(self, w: &ReducedWord) -> bool {
        let plus = w.first().is_some_and(|l| l.is_positive());
        match self {
            HalfSpace::Splus => plus,
            HalfSpace::Sminus => !plus,
        }
    }
}

pub fn project(side: HalfSpace, v: &L2Vector) -> L2Vector {
    v.project(side)
}

/// An algebra element with a pending real scale factor, so identities involving
/// `T = X / sqrt(n)` can be checked on integer coefficients and scaled once.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledElement {
    pub element: AlgebraElement,
    pub scale: f64,
}

impl ScaledElement {
    /// `T = (u_1 + ... + u_n) / sqrt(n)`.
    pub fn t_operator(rank: u16) -> Self {
        Self { element: AlgebraElement::generator_sum(rank), scale: 1.0 / (rank as f64).sqrt() }
    }

    pub fn adjoint(&self) -> Self {
        Self { element: self.element.adjoint(), scale: self.scale }
    }

    pub fn resolve(&self) -> AlgebraElement {
        self.element.scale(Complex64::new(self.scale, 0.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObsViolation {
    pub identity: String,
    pub word: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObsReport {
    pub n: u16,
    pub depth: usize,
    pub tolerance: f64,
    pub checked: usize,
    pub max_residual: f64,
    pub violations: Vec<ObsViolation>,
}

pub const OBS_TOLERANCE: f64 = 1e-12;

/// Checks `Q T T* Q = Q` and `P u_i^{-1} u_j T* Q = 0` (`i != j`) on every basis vector `delta_s`, `|s| <= depth`.
///
/// `P`, `Q` project onto `l2(S+)`, `l2(S-)`. Products are formed with the integer
/// element `X`; the `1/n` and `1/sqrt(n)` factors are applied to the final residuals.
pub fn verify_obs_identities(n: u16, depth: usize) -> Result<ObsReport> {
    check_rank(n)?;
    let x = AlgebraElement::generator_sum(n);
    let x_star = x.adjoint();
    let mut cross = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                let w = ReducedWord::letter(n, Letter::neg(i))?.multiply(&ReducedWord::generator(n, j)?)?;
                cross.push((i, j, AlgebraElement::delta(w)));
            }
        }
    }
    let nf = n as f64;
    let mut report =
        ObsReport { n, depth, tolerance: OBS_TOLERANCE, checked: 0, max_residual: 0.0, violations: Vec::new() };
    for s in enumerate_ball(n, depth)? {
        let qv = L2Vector::delta(s.clone()).project(HalfSpace::Sminus);
        let xs_qv = x_star.act(&qv)?;
        // (a): Q X X* Q v = n Q v
        let lhs = x.act(&xs_qv)?.project(HalfSpace::Sminus).scale(Complex64::new(1.0 / nf, 0.0));
        let res = lhs.sub(&qv)?.max_abs();
        report.max_residual = report.max_residual.max(res);
        if res > OBS_TOLERANCE {
            report.violations.push(ObsViolation { identity: "QTT*Q = Q".into(), word: s.to_string(), residual: res });
        }
        // (b): P u_i^{-1} u_j X* Q v = 0
        for (i, j, e) in &cross {
            let res = e.act(&xs_qv)?.project(HalfSpace::Splus).max_abs() / nf.sqrt();
            report.max_residual = report.max_residual.max(res);
            if res > OBS_TOLERANCE {
                report.violations.push(ObsViolation {
                    identity: format!("P u{i}^-1 u{j} T* Q = 0"),
                    word: s.to_string(),
                    residual: res,
                });
            }
        }
        report.checked += 1;
    }
    Ok(report)
}

/// `(1/k) <s xi_k, xi_k>` where `xi_k` is the indicator of `{u_1, ..., u_1^k}`.
pub fn chi_limit_average(n: u16, s: &ReducedWord, k: usize) -> Result<Complex64> {
    check_rank(n)?;
    same_rank(n, s.rank())?;
    assert!(k >= 1, "k must be positive");
    let mut entries = Vec::with_capacity(k);
    for m in 1..=k {
        entries.push((ReducedWord::power(n, 1, m as i64)?, Complex64::new(1.0, 0.0)));
    }
    let xi = L2Vector::from_entries(n, entries)?;
    let moved = AlgebraElement::delta(s.clone()).act(&xi)?;
    Ok(moved.inner(&xi)? / k as f64)
}
