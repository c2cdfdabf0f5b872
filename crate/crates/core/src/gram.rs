//! Gram matrices `[psi(s^{-1} t)]` over finite word sets and their positivity certificates.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{reconstruction_error, symmetric_eigen};
use crate::error::{Error, Result};
use crate::states::{phi_b, State, StateSpec};
use crate::word::{enumerate_ball, enumerate_sphere, ReducedWord, SphereConstraint};

pub const DEFAULT_PSD_TOL: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense Hermitian matrix indexed by a list of distinct words.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    words: Vec<ReducedWord>,
    entries: Vec<Complex64>,
}

/// Entry `(i, j)` is `state(words[i]^{-1} words[j])`.
pub fn build<S: State + ?Sized>(state: &S, words: &[ReducedWord]) -> Result<GramMatrix> {
    let mut seen = std::collections::HashSet::with_capacity(words.len());
    for w in words {
        if w.rank() != state.rank() {
            return Err(Error::RankMismatch { left: state.rank(), right: w.rank() });
        }
        if !seen.insert(w) {
            return Err(Error::DuplicateWord(w.to_string()));
        }
    }
    let dim = words.len();
    let inverses: Vec<ReducedWord> = words.iter().map(|w| w.inverse()).collect();
    let mut entries = Vec::with_capacity(dim * dim);
    for si in &inverses {
        for t in words {
            entries.push(state.value(&si.multiply(t)?));
        }
    }
    Ok(GramMatrix { words: words.to_vec(), entries })
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[ReducedWord] {
        &self.words
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim() + j]
    }

    /// Builds directly from entries; used for matrices not coming from a state.
    pub fn from_entries(words: Vec<ReducedWord>, entries: Vec<Complex64>) -> Self {
        assert_eq!(words.len() * words.len(), entries.len());
        Self { words, entries }
    }

    pub fn hermitian_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(j, i) - self.get(i, j).conj()).norm());
            }
        }
        worst
    }

    pub fn row_sum(&self, i: usize) -> Complex64 {
        self.entries[i * self.dim()..(i + 1) * self.dim()].iter().sum()
    }

    fn is_real(&self) -> bool {
        self.entries.iter().all(|c| c.im == 0.0)
    }

    /// Real symmetric matrix with the same spectrum: the real part when every entry is real,
    /// else the `2m x 2m` embedding `[[A, -B], [B, A]]` of `A + iB` (each eigenvalue doubled).
    fn real_form(&self) -> (Vec<f64>, usize, bool) {
        let d = self.dim();
        if self.is_real() {
            return (self.entries.iter().map(|c| c.re).collect(), d, false);
        }
        let m = 2 * d;
        let mut out = vec![0.0; m * m];
        for i in 0..d {
            for j in 0..d {
                let c = self.get(i, j);
                out[i * m + j] = c.re;
                out[(i + d) * m + (j + d)] = c.re;
                out[i * m + (j + d)] = -c.im;
                out[(i + d) * m + j] = c.im;
            }
        }
        (out, m, true)
    }

    /// Ascending spectrum.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let (m, dim, doubled) = self.real_form();
        let eig = symmetric_eigen(&m, dim)?;
        let sorted = eig.sorted_values();
        Ok(if doubled { sorted.into_iter().step_by(2).collect() } else { sorted })
    }

    /// Frobenius-relative error of rebuilding the (real form of the) matrix from its eigen-decomposition.
    pub fn eigen_self_check(&self) -> Result<f64> {
        let (m, dim, _) = self.real_form();
        let eig = symmetric_eigen(&m, dim)?;
        Ok(reconstruction_error(&m, &eig))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsdCertificate {
    pub min_eigenvalue: f64,
    pub spectrum: Vec<f64>,
    pub is_psd: bool,
    pub tolerance: f64,
}

/// Full spectrum via Jacobi; PSD iff the smallest eigenvalue is at least `-tolerance`.
pub fn psd_check(m: &GramMatrix, tolerance: f64) -> Result<PsdCertificate> {
    let h = m.hermitian_residual();
    if h > HERMITIAN_TOL {
        return Err(Error::NotHermitian(h));
    }
    if m.dim() == 0 {
        return Ok(PsdCertificate { min_eigenvalue: 0.0, spectrum: vec![], is_psd: true, tolerance });
    }
    let spectrum = m.spectrum()?;
    let min_eigenvalue = spectrum[0];
    Ok(PsdCertificate { min_eigenvalue, is_psd: min_eigenvalue >= -tolerance, spectrum, tolerance })
}

/// The `n^k x n^k` matrix over `G+_k` in enumeration order.
pub fn positive_sphere_gram(spec: &StateSpec, k: usize) -> Result<GramMatrix> {
    let words = enumerate_sphere(spec.n(), k, SphereConstraint::PositiveOnly)?;
    build(spec, &words)
}

pub fn ball_gram<S: State + ?Sized>(state: &S, radius: usize) -> Result<GramMatrix> {
    build(state, &enumerate_ball(state.rank(), radius)?)
}

pub const AK_LIMIT: usize = 10_000;
pub const ROW_SUM_TOL: f64 = 1e-10;
pub const BLOCK_TOL: f64 = 1e-12;
pub const TRANSFER_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AkReport {
    pub n: u16,
    pub a: f64,
    pub k: usize,
    /// `(n a^2)^k`.
    pub row_sum_expected: f64,
    pub row_sum_max_err: f64,
    pub diagonal_blocks_exact: bool,
    /// `a^{2k} b`.
    pub off_block_expected: f64,
    pub off_block_max_err: f64,
    pub transfer_max_err: f64,
    pub min_eig_k: f64,
    pub min_eig_k1: f64,
    pub passed: bool,
}

/// Structural checks tying `A_{k+1}` to `A_k`: constant row sums `(n a^2)^k`, diagonal blocks equal
/// to `A_k`, off-diagonal blocks constant `a^{2k} b`, and every eigenvalue of `A_{k+1}` found among
/// those of `A_k` or `(n a^2)^k A_1`.
pub fn verify_ak_structure(spec: &StateSpec, k: usize) -> Result<AkReport> {
    let StateSpec::PhiA { n, a, .. } = *spec else {
        return Err(Error::InvalidState("A_k structure is defined for PhiA".into()));
    };
    spec.validate()?;
    assert!(k >= 1, "k must be at least 1");
    let dim_next = (n as usize).checked_pow(k as u32 + 1).unwrap_or(usize::MAX);
    if dim_next > AK_LIMIT {
        return Err(Error::TooLarge { dim: dim_next, limit: AK_LIMIT });
    }
    let nf = n as f64;
    let b = phi_b(n, a);
    let ak = positive_sphere_gram(spec, k)?;
    let ak1 = positive_sphere_gram(spec, k + 1)?;
    let a1 = positive_sphere_gram(spec, 1)?;

    let row_sum_expected = (nf * a * a).powi(k as i32);
    let row_sum_max_err =
        (0..ak.dim()).map(|i| (ak.row_sum(i) - Complex64::new(row_sum_expected, 0.0)).norm()).fold(0.0, f64::max);

    let d = ak.dim();
    let off_block_expected = if k == 0 { b } else { a.powi(2 * k as i32) * b };
    let mut diagonal_blocks_exact = true;
    let mut off_block_max_err: f64 = 0.0;
    for bi in 0..n as usize {
        for bj in 0..n as usize {
            for i in 0..d {
                for j in 0..d {
                    let v = ak1.get(bi * d + i, bj * d + j);
                    if bi == bj {
                        diagonal_blocks_exact &= v == ak.get(i, j);
                    } else {
                        off_block_max_err = off_block_max_err.max((v - Complex64::new(off_block_expected, 0.0)).norm());
                    }
                }
            }
        }
    }

    let spec_k = ak.spectrum()?;
    let spec_k1 = ak1.spectrum()?;
    let scaled_a1: Vec<f64> = a1.spectrum()?.into_iter().map(|x| x * row_sum_expected).collect();
    let transfer_max_err = spec_k1
        .iter()
        .map(|l| spec_k.iter().chain(&scaled_a1).map(|m| (l - m).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);

    let passed = row_sum_max_err <= ROW_SUM_TOL
        && diagonal_blocks_exact
        && off_block_max_err <= BLOCK_TOL
        && transfer_max_err <= TRANSFER_TOL;
    Ok(AkReport {
        n,
        a,
        k,
        row_sum_expected,
        row_sum_max_err,
        diagonal_blocks_exact,
        off_block_expected,
        off_block_max_err,
        transfer_max_err,
        min_eig_k: spec_k[0],
        min_eig_k1: spec_k1[0],
        passed,
    })
}

/// Gram matrix of `k -> a^{|k|}` on the integers over `{-K, ..., K}`.
pub fn integer_toeplitz_gram(a: f64, k_max: usize) -> GramMatrix {
    let m = 2 * k_max + 1;
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let e = i.abs_diff(j);
            entries.push(Complex64::new(if e == 0 { 1.0 } else { a.powi(e as i32) }, 0.0));
        }
    }
    // index words are placeholders: u_1^{i-K}
    let words = (0..m).map(|i| ReducedWord::power(2, 1, i as i64 - k_max as i64).expect("rank 2")).collect();
    GramMatrix::from_entries(words, entries)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegerPdReport {
    pub a: f64,
    pub k_max: usize,
    pub toeplitz_min_eig: f64,
    pub u1_length_ball_radius: usize,
    pub u1_length_min_eig: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// `k -> a^{|k|}` on the integers and `s -> a^{|s|_1}` on the rank-2 ball of radius 3 are both PSD.
pub fn verify_integer_pd(a: f64, k_max: usize) -> Result<IntegerPdReport> {
    if !(a > -1.0 && a < 1.0) {
        return Err(Error::InvalidState(format!("integer check needs -1 < a < 1, got {a}")));
    }
    let tolerance = DEFAULT_PSD_TOL;
    let t = psd_check(&integer_toeplitz_gram(a, k_max), tolerance)?;
    let u = psd_check(&ball_gram(&StateSpec::u1_length(2, a)?, 3)?, tolerance)?;
    Ok(IntegerPdReport {
        a,
        k_max,
        toeplitz_min_eig: t.min_eigenvalue,
        u1_length_ball_radius: 3,
        u1_length_min_eig: u.min_eigenvalue,
        tolerance,
        passed: t.is_psd && u.is_psd,
    })
}
