//! Reduced words in the free group on `n` generators `u_1, ..., u_n`.
//!
//! Every word carries its rank. Words of different rank never combine; the
//! binary operations return [`Error::RankMismatch`] instead.
//!
//! Text syntax: whitespace-separated signed integers, `i` for `u_i` and `-i`
//! for `u_i^{-1}`; the identity is written `e`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_RANK: u16 = 64;
pub const MAX_WORD_LENGTH: usize = 1_000_000;

/// Largest sphere [`enumerate_sphere`] is willing to materialize.
pub const SPHERE_GUARD: u128 = 10_000_000;

/// A single factor `u_gen^{±1}`.
///
/// The derived order is `(gen, inverse)` with `false < true`, i.e. `u_1 < u_1^{-1} < u_2 < ...`.
/// Sphere enumeration and therefore every Gram index set uses this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    gen: u16,
    inverse: bool,
}

impl Letter {
    pub fn new(gen: u16, positive: bool) -> Self {
        assert!(gen >= 1, "generator indices start at 1");
        Self { gen, inverse: !positive }
    }

    pub fn pos(gen: u16) -> Self {
        Self::new(gen, true)
    }

    pub fn neg(gen: u16) -> Self {
        Self::new(gen, false)
    }

    pub fn gen(self) -> u16 {
        self.gen
    }

    pub fn is_positive(self) -> bool {
        !self.inverse
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Self { gen: self.gen, inverse: !self.inverse }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }

    /// All `2n` letters in enumeration order.
    pub fn all(rank: u16) -> impl Iterator<Item = Letter> {
        (1..=rank).flat_map(|g| [Letter::pos(g), Letter::neg(g)])
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "-{}", self.gen)
        } else {
            write!(f, "{}", self.gen)
        }
    }
}

/// Length, switch count, `u_1`-length and exponent sum of a reduced word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordStats {
    pub length: usize,
    /// Number of adjacent pairs `(negative, positive)`.
    pub gamma: usize,
    pub u1_length: usize,
    pub tau: i64,
}

/// A freely reduced word; the empty word is the identity.
///
/// Ordered shortlex: by rank, then length, then lexicographically by letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    rank: u16,
    letters: Vec<Letter>,
}

impl Ord for ReducedWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rank, self.letters.len())
            .cmp(&(other.rank, other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub fn check_rank(rank: u16) -> Result<()> {
    if (2..=MAX_RANK).contains(&rank) {
        Ok(())
    } else {
        Err(Error::InvalidRank(rank))
    }
}

fn same_rank(left: u16, right: u16) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::RankMismatch { left, right })
    }
}

/// Free reduction of a raw letter sequence.
pub fn reduce(rank: u16, letters: impl IntoIterator<Item = Letter>) -> Result<ReducedWord> {
    check_rank(rank)?;
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if l.gen > rank {
            return Err(Error::InvalidGenerator { index: l.gen as i64, rank });
        }
        push_reduced(&mut out, l);
    }
    Ok(ReducedWord { rank, letters: out })
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    match out.last() {
        Some(&last) if last.cancels(l) => {
            out.pop();
        }
        _ => out.push(l),
    }
}

impl ReducedWord {
    pub fn identity(rank: u16) -> Self {
        Self { rank, letters: Vec::new() }
    }

    /// `u_gen` (or its inverse).
    pub fn letter(rank: u16, l: Letter) -> Result<Self> {
        reduce(rank, [l])
    }

    pub fn generator(rank: u16, gen: u16) -> Result<Self> {
        Self::letter(rank, Letter::pos(gen))
    }

    /// `u_gen^exp`.
    pub fn power(rank: u16, gen: u16, exp: i64) -> Result<Self> {
        let l = Letter::new(gen, exp >= 0);
        reduce(rank, std::iter::repeat_n(l, exp.unsigned_abs() as usize))
    }

    /// `u_1 + ... + u_n` support helper: the words `u_1, ..., u_n`.
    pub fn generators(rank: u16) -> Vec<Self> {
        (1..=rank).map(|g| Self { rank, letters: vec![Letter::pos(g)] }).collect()
    }

    /// Builds a word from letters already known to be reduced.
    ///
    /// Panics in debug builds if the sequence is not reduced.
    pub(crate) fn from_reduced_unchecked(rank: u16, letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| !w[0].cancels(w[1])));
        Self { rank, letters }
    }

    pub fn parse(rank: u16, text: &str) -> Result<Self> {
        check_rank(rank)?;
        let text = text.trim();
        if text == "e" || text.is_empty() {
            return Ok(Self::identity(rank));
        }
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| Error::ParseWord(tok.to_string()))?;
            if v == 0 || v.unsigned_abs() > rank as u64 {
                return Err(Error::InvalidGenerator { index: v, rank });
            }
            letters.push(Letter::new(v.unsigned_abs() as u16, v > 0));
        }
        reduce(rank, letters)
    }

    pub fn rank(&self) -> u16 {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn multiply(&self, other: &ReducedWord) -> Result<ReducedWord> {
        same_rank(self.rank, other.rank)?;
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.letters);
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        Ok(ReducedWord { rank: self.rank, letters: out })
    }

    /// Right multiplication by a single letter.
    pub fn mul_letter(&self, l: Letter) -> ReducedWord {
        let mut out = self.letters.clone();
        push_reduced(&mut out, l);
        ReducedWord { rank: self.rank, letters: out }
    }

    /// Left multiplication by a single letter.
    pub fn letter_mul(&self, l: Letter) -> ReducedWord {
        match self.first() {
            Some(f) if f.cancels(l) => ReducedWord { rank: self.rank, letters: self.letters[1..].to_vec() },
            _ => {
                let mut out = Vec::with_capacity(self.len() + 1);
                out.push(l);
                out.extend_from_slice(&self.letters);
                ReducedWord { rank: self.rank, letters: out }
            }
        }
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord { rank: self.rank, letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn gamma(&self) -> usize {
        self.letters.windows(2).filter(|w| !w[0].is_positive() && w[1].is_positive()).count()
    }

    pub fn u1_length(&self) -> usize {
        self.letters.iter().filter(|l| l.gen == 1).count()
    }

    pub fn tau(&self) -> i64 {
        self.letters.iter().map(|l| l.sign()).sum()
    }

    pub fn stats(&self) -> WordStats {
        WordStats { length: self.len(), gamma: self.gamma(), u1_length: self.u1_length(), tau: self.tau() }
    }

    /// Image under the endomorphism fixing `u_1` and sending `u_j` to `u_1 u_j` for `j >= 2`.
    ///
    /// `beta(s).u1_length() == s.len() - 2 * s.gamma()`.
    pub fn beta(&self) -> ReducedWord {
        let mut out = Vec::with_capacity(2 * self.len());
        for &l in &self.letters {
            if l.gen == 1 {
                push_reduced(&mut out, l);
            } else if l.is_positive() {
                push_reduced(&mut out, Letter::pos(1));
                push_reduced(&mut out, l);
            } else {
                push_reduced(&mut out, l);
                push_reduced(&mut out, Letter::neg(1));
            }
        }
        ReducedWord { rank: self.rank, letters: out }
    }

    /// Image under the automorphism sending every generator to its inverse.
    pub fn sigma(&self) -> ReducedWord {
        ReducedWord { rank: self.rank, letters: self.letters.iter().map(|l| l.inv()).collect() }
    }

    /// True iff the word lies in `G+ (G+)^{-1}`, i.e. has no negative-to-positive switch.
    pub fn in_plus_minus(&self) -> bool {
        self.gamma() == 0
    }

    /// True iff every letter is a power of `u_1`.
    pub fn in_first_cyclic(&self) -> bool {
        self.letters.iter().all(|l| l.gen == 1)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Which words of a sphere to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereConstraint {
    All,
    PositiveOnly,
    /// Words ending in `u_i^{-1}`.
    EndingNegativeIn(u16),
}

/// Exact cardinality of a constrained sphere.
pub fn sphere_size(rank: u16, radius: usize, constraint: SphereConstraint) -> u128 {
    let n = rank as u128;
    match (constraint, radius) {
        (SphereConstraint::EndingNegativeIn(_), 0) => 0,
        (_, 0) => 1,
        (SphereConstraint::All, k) => 2 * n * (2 * n - 1).saturating_pow(k as u32 - 1),
        (SphereConstraint::PositiveOnly, k) => n.saturating_pow(k as u32),
        // the last letter is fixed; the first k-1 letters are any word not ending in u_i
        (SphereConstraint::EndingNegativeIn(_), 1) => 1,
        (SphereConstraint::EndingNegativeIn(_), k) => {
            let prev = 2 * n * (2 * n - 1).saturating_pow(k as u32 - 2);
            prev - prev / (2 * n)
        }
    }
}

/// Calls `f` on every reduced word of length `radius` allowed by `constraint`,
/// in lexicographic letter order, without allocating a word per visit.
pub fn for_each_in_sphere(rank: u16, radius: usize, constraint: SphereConstraint, mut f: impl FnMut(&[Letter])) {
    let alphabet: Vec<Letter> = match constraint {
        SphereConstraint::PositiveOnly => (1..=rank).map(Letter::pos).collect(),
        _ => Letter::all(rank).collect(),
    };
    if radius == 0 {
        if !matches!(constraint, SphereConstraint::EndingNegativeIn(_)) {
            f(&[]);
        }
        return;
    }
    let mut buf: Vec<Letter> = Vec::with_capacity(radius);
    let mut cursor: Vec<usize> = vec![0; radius];
    let mut depth = 0;
    loop {
        if cursor[depth] == alphabet.len() {
            if depth == 0 {
                return;
            }
            cursor[depth] = 0;
            depth -= 1;
            buf.pop();
            cursor[depth] += 1;
            continue;
        }
        let l = alphabet[cursor[depth]];
        let ok = buf.last().is_none_or(|&p: &Letter| !p.cancels(l))
            && match constraint {
                SphereConstraint::EndingNegativeIn(i) if depth + 1 == radius => l == Letter::neg(i),
                _ => true,
            };
        if !ok {
            cursor[depth] += 1;
            continue;
        }
        if depth + 1 == radius {
            buf.push(l);
            f(&buf);
            buf.pop();
            cursor[depth] += 1;
        } else {
            buf.push(l);
            depth += 1;
        }
    }
}

/// All reduced words of length `radius` satisfying `constraint`, in lexicographic order.
pub fn enumerate_sphere(rank: u16, radius: usize, constraint: SphereConstraint) -> Result<Vec<ReducedWord>> {
    check_rank(rank)?;
    if let SphereConstraint::EndingNegativeIn(i) = constraint {
        if i == 0 || i > rank {
            return Err(Error::InvalidGenerator { index: i as i64, rank });
        }
    }
    let count = sphere_size(rank, radius, constraint);
    if count > SPHERE_GUARD {
        return Err(Error::SphereTooLarge { rank, radius, count, limit: SPHERE_GUARD });
    }
    let mut out = Vec::with_capacity(count as usize);
    for_each_in_sphere(rank, radius, constraint, |ls| out.push(ReducedWord::from_reduced_unchecked(rank, ls.to_vec())));
    Ok(out)
}

/// All reduced words of length at most `radius`, sphere by sphere.
pub fn enumerate_ball(rank: u16, radius: usize) -> Result<Vec<ReducedWord>> {
    let mut out = Vec::new();
    for k in 0..=radius {
        out.extend(enumerate_sphere(rank, k, SphereConstraint::All)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: u16, s: &str) -> ReducedWord {
        ReducedWord::parse(rank, s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(reduce(2, []).unwrap().is_identity());
        assert!(reduce(2, [Letter::pos(1), Letter::neg(1)]).unwrap().is_identity());
        let raw = [Letter::neg(1), Letter::neg(1), Letter::pos(2), Letter::pos(2), Letter::pos(2), Letter::neg(1)];
        let r = reduce(2, raw).unwrap();
        assert_eq!(r.letters(), &raw);
        assert_eq!(r.to_string(), "-1 -1 2 2 2 -1");
        assert!(matches!(reduce(2, [Letter::pos(3)]), Err(Error::InvalidGenerator { .. })));
    }

    #[test]
    fn nested_cancellation() {
        let r = reduce(3, [Letter::pos(1), Letter::pos(2), Letter::neg(2), Letter::neg(1), Letter::pos(3)]).unwrap();
        assert_eq!(r, w(3, "3"));
    }

    #[test]
    fn multiply_examples() {
        assert!(w(2, "1").multiply(&w(2, "-1")).unwrap().is_identity());
        assert_eq!(w(2, "1 2").multiply(&w(2, "-2 1")).unwrap(), w(2, "1 1"));
        assert_eq!(w(2, "1").multiply(&w(2, "2")).unwrap(), w(2, "1 2"));
        assert!(matches!(w(2, "1").multiply(&w(3, "1")), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn inverse_examples() {
        assert!(ReducedWord::identity(2).inverse().is_identity());
        assert_eq!(w(2, "1 -2").inverse(), w(2, "2 -1"));
        assert_eq!(w(2, "-1 -1 2 2 2 -1").inverse(), w(2, "1 -2 -2 -2 1 1"));
    }

    #[test]
    fn stats_examples() {
        let s = w(2, "-1 -1 2 2 2 -1");
        assert_eq!(s.stats(), WordStats { length: 6, gamma: 1, u1_length: 3, tau: 0 });
        assert_eq!(ReducedWord::identity(2).stats(), WordStats { length: 0, gamma: 0, u1_length: 0, tau: 0 });
        assert_eq!(w(2, "-1 2").stats(), WordStats { length: 2, gamma: 1, u1_length: 1, tau: 0 });
    }

    #[test]
    fn beta_examples() {
        assert_eq!(w(2, "2").beta(), w(2, "1 2"));
        assert_eq!(w(2, "1").beta(), w(2, "1"));
        let s = w(2, "-1 -1 2 2 2 -1");
        assert_eq!(s.beta().u1_length(), 4);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(w(2, "1").sigma(), w(2, "-1"));
        assert!(ReducedWord::identity(2).sigma().is_identity());
        assert_eq!(w(2, "-1 2").sigma(), w(2, "1 -2"));
    }

    #[test]
    fn plus_minus_membership() {
        assert!(w(2, "1 -2").in_plus_minus());
        assert!(!w(2, "-1 2").in_plus_minus());
        assert!(ReducedWord::identity(2).in_plus_minus());
    }

    #[test]
    fn parse_rejects_bad_tokens() {
        assert!(matches!(ReducedWord::parse(2, "0"), Err(Error::InvalidGenerator { .. })));
        assert!(matches!(ReducedWord::parse(2, "3"), Err(Error::InvalidGenerator { .. })));
        assert!(matches!(ReducedWord::parse(2, "x"), Err(Error::ParseWord(_))));
        assert!(matches!(ReducedWord::parse(1, "1"), Err(Error::InvalidRank(1))));
        assert!(ReducedWord::parse(2, "e").unwrap().is_identity());
        assert_eq!(ReducedWord::parse(2, "1 -1 2").unwrap(), w(2, "2"));
    }

    /// Brute-force oracle: all letter strings of length k, kept when reduction does not shorten them.
    fn brute_sphere(rank: u16, k: usize) -> Vec<ReducedWord> {
        let alphabet: Vec<Letter> = Letter::all(rank).collect();
        let mut out = Vec::new();
        let total = alphabet.len().pow(k as u32);
        for mut code in 0..total {
            let mut ls = Vec::with_capacity(k);
            for _ in 0..k {
                ls.push(alphabet[code % alphabet.len()]);
                code /= alphabet.len();
            }
            let r = reduce(rank, ls).unwrap();
            if r.len() == k {
                out.push(r);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn shortlex_order() {
        assert!(w(2, "-2") < w(2, "1 1"));
        assert!(w(2, "1") < w(2, "-1"));
        assert!(w(2, "-1") < w(2, "2"));
        let ball = enumerate_ball(2, 4).unwrap();
        assert!(ball.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn sphere_examples() {
        assert_eq!(enumerate_sphere(2, 0, SphereConstraint::All).unwrap(), vec![ReducedWord::identity(2)]);
        let s2 = enumerate_sphere(2, 2, SphereConstraint::All).unwrap();
        assert_eq!(s2.len(), 12);
        assert_eq!(s2, brute_sphere(2, 2));
        assert_eq!(enumerate_sphere(3, 2, SphereConstraint::PositiveOnly).unwrap().len(), 9);
    }

    #[test]
    fn sphere_matches_brute_force() {
        for (rank, k) in [(2, 3), (2, 4), (3, 3)] {
            let got = enumerate_sphere(rank, k, SphereConstraint::All).unwrap();
            assert_eq!(got, brute_sphere(rank, k));
        }
    }

    #[test]
    fn sphere_order_is_lexicographic_on_letters() {
        let s = enumerate_sphere(2, 1, SphereConstraint::All).unwrap();
        let text: Vec<String> = s.iter().map(|w| w.to_string()).collect();
        assert_eq!(text, ["1", "-1", "2", "-2"]);
        let s = enumerate_sphere(2, 3, SphereConstraint::All).unwrap();
        assert!(s.windows(2).all(|p| p[0].letters() < p[1].letters()));
    }

    #[test]
    fn sphere_cardinalities() {
        for rank in 2..=4u16 {
            for k in 0..=5 {
                for c in [SphereConstraint::All, SphereConstraint::PositiveOnly, SphereConstraint::EndingNegativeIn(2)]
                {
                    let got = enumerate_sphere(rank, k, c).unwrap();
                    assert_eq!(got.len() as u128, sphere_size(rank, k, c), "rank {rank} k {k} {c:?}");
                }
                let expected_all =
                    if k == 0 { 1 } else { 2 * rank as usize * (2 * rank as usize - 1).pow(k as u32 - 1) };
                assert_eq!(enumerate_sphere(rank, k, SphereConstraint::All).unwrap().len(), expected_all);
                assert_eq!(
                    enumerate_sphere(rank, k, SphereConstraint::PositiveOnly).unwrap().len(),
                    (rank as usize).pow(k as u32)
                );
            }
        }
    }

    #[test]
    fn ending_negative_filter() {
        for s in enumerate_sphere(3, 3, SphereConstraint::EndingNegativeIn(2)).unwrap() {
            assert_eq!(s.last(), Some(Letter::neg(2)));
        }
        assert!(enumerate_sphere(3, 0, SphereConstraint::EndingNegativeIn(2)).unwrap().is_empty());
    }

    #[test]
    fn sphere_guard() {
        assert!(matches!(enumerate_sphere(8, 12, SphereConstraint::All), Err(Error::SphereTooLarge { .. })));
    }

    #[test]
    fn inverse_and_beta_identities_exhaustive() {
        for s in enumerate_ball(2, 8).unwrap() {
            let inv = s.inverse();
            assert_eq!(inv.len(), s.len());
            assert_eq!(inv.gamma(), s.gamma());
            assert_eq!(s.beta().u1_length(), s.len() - 2 * s.gamma(), "{s}");
        }
    }

    #[test]
    fn non_cancelling_extension_rule() {
        for s in enumerate_ball(3, 4).unwrap() {
            for l in Letter::all(3) {
                let su = s.mul_letter(l);
                if su.len() == s.len() + 1 {
                    let d = su.gamma() - s.gamma();
                    let expect = s.last().is_some_and(|x| !x.is_positive()) && l.is_positive();
                    assert_eq!(d == 1, expect);
                    assert!(d <= 1);
                }
            }
        }
    }

    #[test]
    fn letter_mul_matches_multiply() {
        for s in enumerate_ball(2, 3).unwrap() {
            for l in Letter::all(2) {
                let lw = ReducedWord::letter(2, l).unwrap();
                assert_eq!(s.letter_mul(l), lw.multiply(&s).unwrap());
                assert_eq!(s.mul_letter(l), s.multiply(&lw).unwrap());
            }
        }
    }
}
