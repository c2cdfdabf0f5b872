//! Cylinder measures on the space of infinite reduced words, their
//! Radon-Nikodym derivatives under left translation, and the multiplier cocycle
//! whose integral against the measure reproduces the eigenstates.
//!
//! A point of the boundary is only ever known through a finite prefix. Shifting a
//! prefix by a group element is *determined* when at least one letter of the prefix
//! survives reduction: the rest of the infinite word then follows without further
//! cancellation.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::word::{
    check_rank, enumerate_sphere, for_each_in_sphere, sphere_size, Letter, ReducedWord, SphereConstraint,
};

pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const CYLINDER_GUARD: u128 = 10_000_000;

/// Known prefix of `g omega` given a known prefix of `omega`, or `None` when the
/// whole prefix cancels against `g`.
pub fn shift(g: &ReducedWord, prefix: &ReducedWord) -> Option<ReducedWord> {
    let gl = g.letters();
    let pl = prefix.letters();
    let mut k = 0;
    while k < gl.len() && k < pl.len() && gl[gl.len() - 1 - k] == pl[k].inv() {
        k += 1;
    }
    if k == pl.len() {
        return None;
    }
    let mut out = Vec::with_capacity(gl.len() - k + pl.len() - k);
    out.extend_from_slice(&gl[..gl.len() - k]);
    out.extend_from_slice(&pl[k..]);
    Some(ReducedWord::from_reduced_unchecked(prefix.rank(), out))
}

fn shift_letter(l: Letter, prefix: &ReducedWord) -> Option<ReducedWord> {
    match prefix.first() {
        None => None,
        Some(f) if f == l.inv() => {
            if prefix.len() == 1 {
                None
            } else {
                Some(ReducedWord::from_reduced_unchecked(prefix.rank(), prefix.letters()[1..].to_vec()))
            }
        }
        Some(_) => Some(prefix.letter_mul(l)),
    }
}

/// `alpha_+`, `alpha_-`: masses of the one-letter cylinders; `alpha_0`, `alpha_1`: factors for
/// extending without / with a sign change.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaParams {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub alpha_0: f64,
    pub alpha_1: f64,
}

impl AlphaParams {
    /// `n (alpha_+ + alpha_-) - 1` and `n alpha_0 + (n-1) alpha_1 - 1`.
    pub fn normalization_errors(&self, n: u16) -> (f64, f64) {
        let nf = n as f64;
        (nf * (self.alpha_plus + self.alpha_minus) - 1.0, nf * self.alpha_0 + (nf - 1.0) * self.alpha_1 - 1.0)
    }

    pub fn validate(&self, n: u16) -> Result<()> {
        check_rank(n)?;
        let all = [self.alpha_plus, self.alpha_minus, self.alpha_0, self.alpha_1];
        if all.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::InvalidMeasure(format!("alphas must be positive: {all:?}")));
        }
        let (e1, e2) = self.normalization_errors(n);
        if e1.abs() > NORMALIZATION_TOL || e2.abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidMeasure(format!("normalization errors {e1:e}, {e2:e}")));
        }
        Ok(())
    }
}

/// The measure parameters attached to `lambda in (0, sqrt(n))`:
///
/// ```text
/// alpha_+ = (n-1) l^2 / (n (n^2 - l^2))    alpha_- = (n - l^2) / (n^2 - l^2)
/// alpha_0 = l^2 / n^2                      alpha_1 = (n - l^2) / (n (n-1))
/// ```
pub fn alphas_from_lambda(n: u16, lambda: f64) -> Result<AlphaParams> {
    check_rank(n)?;
    let nf = n as f64;
    if !(lambda > 0.0 && lambda < nf.sqrt()) {
        return Err(Error::LambdaOutOfRange { lambda, rank: n });
    }
    let l2 = lambda * lambda;
    Ok(AlphaParams {
        alpha_plus: (nf - 1.0) * l2 / (nf * (nf * nf - l2)),
        alpha_minus: (nf - l2) / (nf * nf - l2),
        alpha_0: l2 / (nf * nf),
        alpha_1: (nf - l2) / (nf * (nf - 1.0)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CylinderMeasure {
    pub n: u16,
    pub params: AlphaParams,
}

impl CylinderMeasure {
    pub fn new(n: u16, params: AlphaParams) -> Result<Self> {
        params.validate(n)?;
        Ok(Self { n, params })
    }

    pub fn from_lambda(n: u16, lambda: f64) -> Result<Self> {
        Self::new(n, alphas_from_lambda(n, lambda)?)
    }

    /// `mu(Omega(s))`: `alpha_+` or `alpha_-` for the first letter, then `alpha_1` for every
    /// sign change and `alpha_0` otherwise.
    pub fn measure_of_cylinder(&self, s: &ReducedWord) -> f64 {
        let ls = s.letters();
        let Some(first) = ls.first() else {
            return 1.0;
        };
        let p = &self.params;
        let mut m = if first.is_positive() { p.alpha_plus } else { p.alpha_minus };
        for w in ls.windows(2) {
            m *= if w[0].is_positive() != w[1].is_positive() { p.alpha_1 } else { p.alpha_0 };
        }
        m
    }

    /// `d mu(u_j^{-1} omega) / d mu(omega)` on the cylinder of `omega_prefix`.
    pub fn rn_derivative(&self, j: u16, omega_prefix: &ReducedWord) -> Result<f64> {
        check_gen(self.n, j)?;
        let p = &self.params;
        let ls = omega_prefix.letters();
        match ls {
            [] => Err(Error::PrefixTooShort(omega_prefix.to_string())),
            [f, ..] if !f.is_positive() => Ok(p.alpha_0),
            [f, ..] if f.gen() != j => Ok(p.alpha_minus * p.alpha_1 / p.alpha_plus),
            [_] => Err(Error::PrefixTooShort(omega_prefix.to_string())),
            [_, second, ..] if second.is_positive() => Ok(1.0 / p.alpha_0),
            [_, _, ..] => Ok(p.alpha_minus / (p.alpha_plus * p.alpha_1)),
        }
    }
}

fn check_gen(n: u16, j: u16) -> Result<()> {
    if j == 0 || j > n {
        Err(Error::InvalidGenerator { index: j as i64, rank: n })
    } else {
        Ok(())
    }
}

/// Multiplier cocycle with `P(u_j, .) = p_j` for a spectral value `lambda in (0, sqrt(n))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cocycle {
    pub n: u16,
    pub lambda: f64,
}

impl Cocycle {
    pub fn new(n: u16, lambda: f64) -> Result<Self> {
        alphas_from_lambda(n, lambda)?;
        Ok(Self { n, lambda })
    }

    pub fn measure(&self) -> CylinderMeasure {
        CylinderMeasure::from_lambda(self.n, self.lambda).expect("lambda checked at construction")
    }

    /// `p_j`: `n/lambda` on `Omega(u_j)`, `(lambda - n/lambda)/(n-1)` on `Omega(u_i)` for `i != j`,
    /// `lambda/n` on every `Omega(u_i^{-1})`.
    pub fn p_value(&self, j: u16, omega_prefix: &ReducedWord) -> Result<f64> {
        check_gen(self.n, j)?;
        let nf = self.n as f64;
        let l = self.lambda;
        match omega_prefix.first() {
            None => Err(Error::PrefixTooShort(omega_prefix.to_string())),
            Some(f) if !f.is_positive() => Ok(l / nf),
            Some(f) if f.gen() == j => Ok(nf / l),
            Some(_) => Ok((l - nf / l) / (nf - 1.0)),
        }
    }

    /// `P(s, omega)` from `P(st, w) = P(s, w) P(t, s^{-1} w)` and `P(u_j^{-1}, w) = 1 / p_j(u_j w)`.
    pub fn cocycle_value(&self, s: &ReducedWord, omega_prefix: &ReducedWord) -> Result<f64> {
        let too_short = || Error::PrefixTooShort(omega_prefix.to_string());
        let mut w = omega_prefix.clone();
        let mut value = 1.0;
        for &l in s.letters() {
            if l.is_positive() {
                value *= self.p_value(l.gen(), &w)?;
                w = shift_letter(l.inv(), &w).ok_or_else(too_short)?;
            } else {
                let moved = shift_letter(l.inv(), &w).ok_or_else(too_short)?;
                value /= self.p_value(l.gen(), &moved)?;
                w = moved;
            }
        }
        Ok(value)
    }
}

/// `integral P(s, omega) d mu(omega)`, summed exactly over the cylinders of depth `|s| + 1`
/// on which the integrand is constant.
pub fn boundary_state(c: &Cocycle, s: &ReducedWord) -> Result<f64> {
    boundary_state_at_depth(c, s, s.len() + 1)
}

/// Same integral over cylinders of an explicit depth (at least `|s| + 1`).
pub fn boundary_state_at_depth(c: &Cocycle, s: &ReducedWord, depth: usize) -> Result<f64> {
    if s.rank() != c.n {
        return Err(Error::RankMismatch { left: c.n, right: s.rank() });
    }
    let cylinders = sphere_size(c.n, depth, SphereConstraint::All);
    if cylinders > CYLINDER_GUARD {
        return Err(Error::TooDeep { depth, cylinders });
    }
    let mu = c.measure();
    let mut terms = Vec::with_capacity(cylinders as usize);
    let mut err = None;
    for_each_in_sphere(c.n, depth, SphereConstraint::All, |ls| {
        if err.is_some() {
            return;
        }
        let w = ReducedWord::from_reduced_unchecked(c.n, ls.to_vec());
        match c.cocycle_value(s, &w) {
            Ok(p) => terms.push(p * mu.measure_of_cylinder(&w)),
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(pairwise_sum(&terms)),
    }
}

/// A probability measure on the boundary given by its masses on all cylinders of a fixed depth.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMeasure {
    n: u16,
    depth: usize,
    /// `levels[k]` maps each length-`k` word to its cylinder mass.
    levels: Vec<BTreeMap<ReducedWord, f64>>,
}

impl DepthMeasure {
    /// Takes the masses of all `depth`-cylinders; coarser masses follow by additivity.
    pub fn from_weights(n: u16, depth: usize, weights: impl IntoIterator<Item = (ReducedWord, f64)>) -> Result<Self> {
        check_rank(n)?;
        if depth < 2 {
            return Err(Error::InvalidMeasure("depth must be at least 2".into()));
        }
        let mut leaf = BTreeMap::new();
        for (w, x) in weights {
            if w.rank() != n || w.len() != depth {
                return Err(Error::InvalidMeasure(format!("cylinder {w} is not at depth {depth}")));
            }
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::InvalidMeasure(format!("non-positive mass {x} on {w}")));
            }
            if leaf.insert(w.clone(), x).is_some() {
                return Err(Error::InvalidMeasure(format!("cylinder {w} given twice")));
            }
        }
        let expected = sphere_size(n, depth, SphereConstraint::All);
        if leaf.len() as u128 != expected {
            return Err(Error::InvalidMeasure(format!("expected {expected} cylinders, got {}", leaf.len())));
        }
        let total: f64 = pairwise_sum(&leaf.values().copied().collect::<Vec<_>>());
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {total} != 1")));
        }
        let mut levels = vec![BTreeMap::new(); depth + 1];
        levels[depth] = leaf;
        for k in (0..depth).rev() {
            let mut up: BTreeMap<ReducedWord, f64> = BTreeMap::new();
            for (w, x) in &levels[k + 1] {
                let parent = ReducedWord::from_reduced_unchecked(n, w.letters()[..k].to_vec());
                *up.entry(parent).or_insert(0.0) += x;
            }
            levels[k] = up;
        }
        Ok(Self { n, depth, levels })
    }

    /// Restriction of an alpha measure to its `depth`-cylinders.
    pub fn from_alpha(m: &CylinderMeasure, depth: usize) -> Result<Self> {
        let words = enumerate_sphere(m.n, depth, SphereConstraint::All)?;
        let weights: Vec<_> = words
            .into_iter()
            .map(|w| {
                let x = m.measure_of_cylinder(&w);
                (w, x)
            })
            .collect();
        let total: f64 = pairwise_sum(&weights.iter().map(|p| p.1).collect::<Vec<_>>());
        Self::from_weights(m.n, depth, weights.into_iter().map(|(w, x)| (w, x / total)))
    }

    /// Parses `"<mass> : <word>"` lines.
    pub fn parse_weights(n: u16, depth: usize, text: &str) -> Result<Self> {
        let mut weights = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |r: &str| Error::ParseElement { line: i + 1, reason: r.to_string() };
            let (x, w) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
            let x: f64 = x.trim().parse().map_err(|_| bad("mass"))?;
            weights.push((ReducedWord::parse(n, w)?, x));
        }
        Self::from_weights(n, depth, weights)
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn mass(&self, s: &ReducedWord) -> Option<f64> {
        self.levels.get(s.len()).and_then(|l| l.get(s).copied())
    }

    pub fn leaves(&self) -> impl Iterator<Item = (&ReducedWord, &f64)> {
        self.levels[self.depth].iter()
    }

    /// Finite-cylinder quotient `mu(u_j^{-1} Omega(w)) / mu(Omega(w))`, when `u_j^{-1} Omega(w)`
    /// is itself a cylinder of depth at most `self.depth`.
    pub fn rn_quotient(&self, j: u16, w: &ReducedWord) -> Option<f64> {
        let moved = shift_letter(Letter::neg(j), w)?;
        Some(self.mass(&moved)? / self.mass(w)?)
    }

    /// Multiplicative random perturbation of every leaf mass by `exp(u)`, `u` uniform in
    /// `[-spread, spread]`, renormalized.
    pub fn perturbed<R: Rng>(&self, rng: &mut R, spread: f64) -> Result<Self> {
        let raw: Vec<(ReducedWord, f64)> =
            self.leaves().map(|(w, x)| (w.clone(), x * rng.gen_range(-spread..=spread).exp())).collect();
        let total = pairwise_sum(&raw.iter().map(|p| p.1).collect::<Vec<_>>());
        Self::from_weights(self.n, self.depth, raw.into_iter().map(|(w, x)| (w, x / total)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub depth: usize,
    pub cylinders_used: usize,
    /// max over cylinders of `|sqrt(q_1) - sqrt(q_2)|`.
    pub ess_sup_diff: f64,
    /// min over cylinders of `sqrt(q_1) + sqrt(q_2)`.
    pub ess_inf_sum: f64,
    pub witness_cylinders: Vec<String>,
}

/// Rank-2 comparison of `|sqrt(q_1) - sqrt(q_2)|` against `sqrt(q_1) + sqrt(q_2)`, where
/// `q_j` is the Radon-Nikodym quotient for `u_j^{-1}`, evaluated on every cylinder of
/// depth `depth - 1` on which both quotients are determined.
pub fn measure_experiment(m: &DepthMeasure) -> Result<ExperimentReport> {
    if m.n() != 2 {
        return Err(Error::InvalidMeasure("the experiment is defined at rank 2".into()));
    }
    let mut sup_diff = f64::NEG_INFINITY;
    let mut inf_sum = f64::INFINITY;
    let mut sup_w = String::new();
    let mut inf_w = String::new();
    let mut used = 0;
    for w in enumerate_sphere(2, m.depth() - 1, SphereConstraint::All)? {
        let (Some(q1), Some(q2)) = (m.rn_quotient(1, &w), m.rn_quotient(2, &w)) else {
            continue;
        };
        used += 1;
        let (r1, r2) = (q1.sqrt(), q2.sqrt());
        if (r1 - r2).abs() > sup_diff {
            sup_diff = (r1 - r2).abs();
            sup_w = w.to_string();
        }
        if r1 + r2 < inf_sum {
            inf_sum = r1 + r2;
            inf_w = w.to_string();
        }
    }
    Ok(ExperimentReport {
        depth: m.depth(),
        cylinders_used: used,
        ess_sup_diff: sup_diff,
        ess_inf_sum: inf_sum,
        witness_cylinders: vec![sup_w, inf_w],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{State, StateSpec};
    use crate::word::enumerate_ball;
    use rand::SeedableRng;

    fn w(n: u16, s: &str) -> ReducedWord {
        ReducedWord::parse(n, s).unwrap()
    }

    #[test]
    fn alphas_at_lambda_one() {
        let p = alphas_from_lambda(2, 1.0).unwrap();
        assert!((p.alpha_plus - 1.0 / 6.0).abs() < 1e-15);
        assert!((p.alpha_minus - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.alpha_0 - 0.25).abs() < 1e-15);
        assert!((p.alpha_1 - 0.5).abs() < 1e-15);
        let p = alphas_from_lambda(3, 1.0).unwrap();
        let (e1, e2) = p.normalization_errors(3);
        assert!(e1.abs() < 1e-14 && e2.abs() < 1e-14);
    }

    #[test]
    fn alphas_near_sqrt_n() {
        let p = alphas_from_lambda(2, 2f64.sqrt() - 1e-9).unwrap();
        assert!(p.alpha_minus < 1e-8 && p.alpha_1 < 1e-8);
        assert!(matches!(alphas_from_lambda(2, 2f64.sqrt()), Err(Error::LambdaOutOfRange { .. })));
        assert!(matches!(alphas_from_lambda(2, 0.0), Err(Error::LambdaOutOfRange { .. })));
    }

    #[test]
    fn cylinder_examples() {
        let m = CylinderMeasure::from_lambda(2, 0.8).unwrap();
        let p = m.params;
        assert_eq!(m.measure_of_cylinder(&w(2, "2 1 2")), p.alpha_plus * p.alpha_0 * p.alpha_0);
        assert_eq!(m.measure_of_cylinder(&w(2, "2 -1 2")), p.alpha_plus * p.alpha_1 * p.alpha_1);
        assert_eq!(m.measure_of_cylinder(&w(2, "2 1 -2")), p.alpha_plus * p.alpha_0 * p.alpha_1);
        assert_eq!(m.measure_of_cylinder(&ReducedWord::identity(2)), 1.0);
    }

    #[test]
    fn additivity_and_total_mass() {
        for n in [2u16, 3] {
            let m = CylinderMeasure::from_lambda(n, 1.1).unwrap();
            let max_len = if n == 2 { 5 } else { 4 };
            for s in enumerate_ball(n, max_len).unwrap() {
                let kids: f64 = Letter::all(n)
                    .map(|l| s.mul_letter(l))
                    .filter(|t| t.len() == s.len() + 1)
                    .map(|t| m.measure_of_cylinder(&t))
                    .sum();
                assert!((kids - m.measure_of_cylinder(&s)).abs() < 1e-15, "{s}");
            }
            for d in 0..=5 {
                let total: f64 = enumerate_sphere(n, d, SphereConstraint::All)
                    .unwrap()
                    .iter()
                    .map(|s| m.measure_of_cylinder(s))
                    .sum();
                assert!((total - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rn_examples() {
        let m = CylinderMeasure::from_lambda(2, 1.0).unwrap();
        let p = m.params;
        assert_eq!(m.rn_derivative(1, &w(2, "2")).unwrap(), p.alpha_minus * p.alpha_1 / p.alpha_plus);
        assert_eq!(m.rn_derivative(1, &w(2, "1 2")).unwrap(), 1.0 / p.alpha_0);
        assert_eq!(m.rn_derivative(1, &w(2, "1 -2")).unwrap(), p.alpha_minus / (p.alpha_plus * p.alpha_1));
        assert_eq!(m.rn_derivative(2, &w(2, "-2")).unwrap(), p.alpha_0);
        assert!(matches!(m.rn_derivative(1, &w(2, "1")), Err(Error::PrefixTooShort(_))));
    }

    #[test]
    fn rn_matches_cylinder_quotients() {
        for lambda in [0.5, 1.0, 1.3] {
            let m = CylinderMeasure::from_lambda(2, lambda).unwrap();
            for d in 1..=4 {
                for pre in enumerate_sphere(2, d, SphereConstraint::All).unwrap() {
                    for j in 1..=2 {
                        let moved = ReducedWord::letter(2, Letter::neg(j)).unwrap().multiply(&pre).unwrap();
                        if moved.is_identity() {
                            continue;
                        }
                        let q = m.measure_of_cylinder(&moved) / m.measure_of_cylinder(&pre);
                        let rn = m.rn_derivative(j, &pre).unwrap();
                        assert!((q - rn).abs() <= 1e-12 * rn.max(1.0), "{pre} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn p_examples() {
        let c = Cocycle::new(2, 1.0).unwrap();
        assert_eq!(c.p_value(1, &w(2, "2")).unwrap(), -1.0);
        assert_eq!(c.p_value(1, &w(2, "1")).unwrap(), 2.0);
        assert_eq!(c.p_value(1, &w(2, "-2")).unwrap(), 0.5);
    }

    #[test]
    fn p_squared_is_rn_and_sum_is_lambda() {
        for n in [2u16, 3] {
            for lambda in [0.5, 1.0, 1.3] {
                let c = Cocycle::new(n, lambda).unwrap();
                let m = c.measure();
                for pre in enumerate_sphere(n, 2, SphereConstraint::All).unwrap() {
                    let mut sum = 0.0;
                    for j in 1..=n {
                        let p = c.p_value(j, &pre).unwrap();
                        sum += p;
                        let rn = m.rn_derivative(j, &pre).unwrap();
                        assert!((p * p - rn).abs() <= 1e-12 * rn.max(1.0));
                    }
                    assert!((sum - lambda).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shift_rules() {
        let pre = w(2, "1 2 -1");
        assert_eq!(shift(&w(2, "-1"), &pre), Some(w(2, "2 -1")));
        assert_eq!(shift(&w(2, "1"), &pre), Some(w(2, "1 1 2 -1")));
        assert_eq!(shift(&w(2, "2 -1"), &pre), Some(w(2, "2 2 -1")));
        assert_eq!(shift(&w(2, "1 -2 -1"), &pre), None);
        assert_eq!(shift(&w(2, "-1"), &w(2, "1")), None);
        assert_eq!(shift(&w(2, "2"), &ReducedWord::identity(2)), None);
    }

    #[test]
    fn cocycle_basics() {
        let c = Cocycle::new(2, 1.3).unwrap();
        let pre = w(2, "2 1 -2");
        assert_eq!(c.cocycle_value(&ReducedWord::identity(2), &pre).unwrap(), 1.0);
        for j in 1..=2 {
            assert_eq!(
                c.cocycle_value(&ReducedWord::generator(2, j).unwrap(), &pre).unwrap(),
                c.p_value(j, &pre).unwrap()
            );
        }
        assert!(matches!(c.cocycle_value(&w(2, "1 1"), &w(2, "1")), Err(Error::PrefixTooShort(_))));
    }

    #[test]
    fn cocycle_inverse_identity() {
        // P(s, w) P(s^{-1}, s^{-1} w) = P(1, w) = 1
        let c = Cocycle::new(2, 0.9).unwrap();
        for s in enumerate_ball(2, 4).unwrap() {
            for pre in enumerate_sphere(2, 9, SphereConstraint::All).unwrap().iter().step_by(97) {
                let moved = shift(&s.inverse(), pre).unwrap();
                let prod = c.cocycle_value(&s, pre).unwrap() * c.cocycle_value(&s.inverse(), &moved).unwrap();
                assert!((prod - 1.0).abs() < 1e-12, "{s} {pre}");
            }
        }
    }

    #[test]
    fn cocycle_chain_rule() {
        let c = Cocycle::new(2, 1.2).unwrap();
        let pre = w(2, "-2 -1 -1 2 1 1 -2 -1");
        for s in enumerate_ball(2, 2).unwrap() {
            for t in enumerate_ball(2, 2).unwrap() {
                let st = s.multiply(&t).unwrap();
                let lhs = c.cocycle_value(&st, &pre).unwrap();
                let moved = shift(&s.inverse(), &pre).unwrap();
                let rhs = c.cocycle_value(&s, &pre).unwrap() * c.cocycle_value(&t, &moved).unwrap();
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_state_examples() {
        let c = Cocycle::new(2, 1.0).unwrap();
        assert!((boundary_state(&c, &ReducedWord::identity(2)).unwrap() - 1.0).abs() < 1e-15);
        assert!((boundary_state(&c, &w(2, "1")).unwrap() - 0.5).abs() < 1e-14);
        assert!((boundary_state(&c, &w(2, "-1 2")).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn boundary_state_is_phi() {
        for lambda in [0.5, 1.0, 1.3] {
            let c = Cocycle::new(2, lambda).unwrap();
            let phi = StateSpec::phi(2, lambda / 2.0).unwrap();
            for s in enumerate_ball(2, 4).unwrap() {
                let got = boundary_state(&c, &s).unwrap();
                assert!((got - phi.value(&s).re).abs() < 1e-10, "lambda {lambda} s {s}");
            }
        }
        let c = Cocycle::new(3, 1.2).unwrap();
        let phi = StateSpec::phi(3, 0.4).unwrap();
        for s in enumerate_ball(3, 3).unwrap() {
            assert!((boundary_state(&c, &s).unwrap() - phi.value(&s).re).abs() < 1e-10);
        }
    }

    #[test]
    fn integration_depth_is_robust() {
        let c = Cocycle::new(2, 1.3).unwrap();
        for s in enumerate_ball(2, 3).unwrap() {
            let a = boundary_state(&c, &s).unwrap();
            let b = boundary_state_at_depth(&c, &s, s.len() + 2).unwrap();
            assert!((a - b).abs() < 1e-14, "{s}");
        }
    }

    #[test]
    fn experiment_on_alpha_measures_hits_equality() {
        for lambda in [1.0, 0.7] {
            let m = DepthMeasure::from_alpha(&CylinderMeasure::from_lambda(2, lambda).unwrap(), 5).unwrap();
            let r = measure_experiment(&m).unwrap();
            assert!((r.ess_sup_diff - r.ess_inf_sum).abs() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn uniform_measure_is_reported() {
        let p = AlphaParams { alpha_plus: 0.25, alpha_minus: 0.25, alpha_0: 1.0 / 3.0, alpha_1: 1.0 / 3.0 };
        let m = DepthMeasure::from_alpha(&CylinderMeasure::new(2, p).unwrap(), 4).unwrap();
        let r = measure_experiment(&m).unwrap();
        assert!(r.ess_sup_diff.is_finite() && r.ess_inf_sum.is_finite());
        assert!(r.cylinders_used > 0);
    }

    #[test]
    fn depth_measure_validation() {
        let m = DepthMeasure::from_alpha(&CylinderMeasure::from_lambda(2, 1.0).unwrap(), 3).unwrap();
        let mut leaves: Vec<_> = m.leaves().map(|(w, x)| (w.clone(), *x)).collect();
        leaves.pop();
        assert!(DepthMeasure::from_weights(2, 3, leaves.clone()).is_err());
        let text: String = m.leaves().map(|(w, x)| format!("{x:.17e} : {w}\n")).collect();
        let parsed = DepthMeasure::parse_weights(2, 3, &text).unwrap();
        for (w, x) in m.leaves() {
            assert!((parsed.mass(w).unwrap() - x).abs() < 1e-15);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let p = m.perturbed(&mut rng, 0.5).unwrap();
        assert!((p.mass(&ReducedWord::identity(2)).unwrap() - 1.0).abs() < 1e-12);
    }
}
