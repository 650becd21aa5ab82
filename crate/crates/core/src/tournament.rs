//! Tournaments on `[n]`, Copeland out-degrees, tripartite tournaments and
//! exhaustive enumeration.
//!
//! Candidates are numbered from 1 at the public interface, as in the JSON
//! format; storage is a bit-matrix indexed from 0.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default largest `n` accepted by [`enumerate_all`].
pub const DEFAULT_ENUM_CAP: usize = 7;

/// A complete antisymmetric beat relation on `n` candidates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

/// Number of unordered pairs on `n` candidates.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl Tournament {
    /// Validate an edge list of `(winner, loser)` pairs, 1-based.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut t = Tournament::empty(n);
        let mut seen = vec![false; n * n];
        for &(w, l) in edges {
            for v in [w, l] {
                if v == 0 || v > n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
            }
            if w == l {
                return Err(Error::SelfLoop(w));
            }
            let (a, b) = (w.min(l) - 1, w.max(l) - 1);
            if seen[a * n + b] {
                return Err(Error::DuplicatePair(a + 1, b + 1));
            }
            seen[a * n + b] = true;
            t.set(w - 1, l - 1);
        }
        for a in 0..n {
            for b in a + 1..n {
                if !seen[a * n + b] {
                    return Err(Error::MissingPair(a + 1, b + 1));
                }
            }
        }
        Ok(t)
    }

    /// Build from a rule deciding, for 0-based `i < j`, whether `i` beats `j`.
    pub fn from_fn(n: usize, mut lower_wins: impl FnMut(usize, usize) -> bool) -> Self {
        let mut t = Tournament::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if lower_wins(i, j) {
                    t.set(i, j);
                } else {
                    t.set(j, i);
                }
            }
        }
        t
    }

    /// The tournament with enumeration index `index`: bit `k` of the index
    /// orients the `k`-th pair `(i, j)`, `i < j`, in lexicographic order, with a
    /// set bit meaning that `i` beats `j`.
    pub fn from_index(n: usize, index: u64) -> Self {
        let mut k = 0;
        Tournament::from_fn(n, |_, _| {
            let bit = (index >> k) & 1 == 1;
            k += 1;
            bit
        })
    }

    /// Transitive tournament: `i` beats `j` whenever `i < j`.
    pub fn transitive(n: usize) -> Self {
        Tournament::from_fn(n, |_, _| true)
    }

    /// The 3-cycle `2 -> 1`, `3 -> 2`, `1 -> 3`.
    pub fn cycle3() -> Self {
        Tournament::build(3, &[(2, 1), (3, 2), (1, 3)]).expect("valid cycle")
    }

    /// The 3-cycle `1 -> 2`, `2 -> 3`, `3 -> 1`, whose operator is the spiral map.
    pub fn spiral_cycle3() -> Self {
        Tournament::build(3, &[(1, 2), (2, 3), (3, 1)]).expect("valid cycle")
    }

    fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Tournament { n, words, rows: vec![0; n * words] }
    }

    fn set(&mut self, w: usize, l: usize) {
        self.rows[w * self.words + l / 64] |= 1 << (l % 64);
        self.rows[l * self.words + w / 64] &= !(1 << (w % 64));
    }

    /// Number of candidates.
    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based beat query.
    #[inline]
    pub(crate) fn beats0(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    fn check(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Whether candidate `i` beats candidate `j` (1-based).
    pub fn beats(&self, i: usize, j: usize) -> Result<bool> {
        self.check(i)?;
        self.check(j)?;
        Ok(i != j && self.beats0(i - 1, j - 1))
    }

    /// The winner of the match between `i` and `j`; `i` itself when equal.
    pub fn winner(&self, i: usize, j: usize) -> Result<usize> {
        Ok(if self.beats(j, i)? { j } else { i })
    }

    /// Copeland score of candidate `i` (1-based).
    pub fn outdeg(&self, i: usize) -> Result<usize> {
        self.check(i)?;
        Ok(self.outdeg0(i - 1))
    }

    pub(crate) fn outdeg0(&self, i: usize) -> usize {
        self.rows[i * self.words..(i + 1) * self.words].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// All Copeland scores, in candidate order.
    pub fn scores(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.outdeg0(i)).collect()
    }

    /// Candidates beaten by `i` (1-based, ascending).
    pub fn beaten_by(&self, i: usize) -> Result<Vec<usize>> {
        self.check(i)?;
        Ok((0..self.n).filter(|&j| self.beats0(i - 1, j)).map(|j| j + 1).collect())
    }

    /// Candidates beating `i` (1-based, ascending).
    pub fn beaters_of(&self, i: usize) -> Result<Vec<usize>> {
        self.check(i)?;
        Ok((0..self.n).filter(|&j| self.beats0(j, i - 1)).map(|j| j + 1).collect())
    }

    /// Every pair as `(winner, loser)`, 1-based, in lexicographic pair order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(pair_count(self.n));
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.push(if self.beats0(i, j) { (i + 1, j + 1) } else { (j + 1, i + 1) });
            }
        }
        out
    }

    /// The enumeration index of this tournament (requires `n <= 11`).
    pub fn index(&self) -> Result<u64> {
        if pair_count(self.n) > 64 {
            return Err(Error::TooLarge { what: "tournament index", value: self.n as u64, cap: 11 });
        }
        let mut idx = 0u64;
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.beats0(i, j) {
                    idx |= 1 << k;
                }
                k += 1;
            }
        }
        Ok(idx)
    }

    /// Relabel candidate `i` as `perm[i-1]` (a permutation of `1..=n`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let edges: Vec<_> = self.edges().into_iter().map(|(w, l)| (perm[w - 1], perm[l - 1])).collect();
        Tournament::build(self.n, &edges)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
    }
    let set: BTreeSet<_> = perm.iter().copied().collect();
    if set.len() != n || set.iter().any(|&v| v == 0 || v > n) {
        return Err(Error::Precondition("not a permutation of 1..=n".into()));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct TournamentRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Tournament {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let edges = self.edges().into_iter().map(|(w, l)| [w, l]).collect();
        TournamentRepr { n: self.n, edges }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tournament {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TournamentRepr::deserialize(d)?;
        let edges: Vec<_> = r.edges.iter().map(|e| (e[0], e[1])).collect();
        Tournament::build(r.n, &edges).map_err(D::Error::custom)
    }
}

/// Every tournament on `n` candidates in enumeration-index order.
pub fn enumerate_all(n: usize) -> Result<impl Iterator<Item = Tournament>> {
    enumerate_all_capped(n, DEFAULT_ENUM_CAP)
}

/// [`enumerate_all`] with an explicit cap on `n` (at most 11).
pub fn enumerate_all_capped(n: usize, cap: usize) -> Result<impl Iterator<Item = Tournament>> {
    let count = tournament_count(n, cap)?;
    Ok((0..count).map(move |idx| Tournament::from_index(n, idx)))
}

/// `2^(n(n-1)/2)`, checked against the cap.
pub fn tournament_count(n: usize, cap: usize) -> Result<u64> {
    let cap = cap.min(11);
    if n > cap {
        return Err(Error::TooLarge { what: "tournament enumeration", value: n as u64, cap: cap as u64 });
    }
    Ok(1u64 << pair_count(n))
}

/// Ordered parts `A`, `B`, `C` of the candidate set, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartitePartition {
    parts: [Vec<usize>; 3],
}

impl TripartitePartition {
    /// Validate three parts against the candidate count `n`.
    pub fn new(parts: [Vec<usize>; 3], n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for (k, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::EmptyPart(k + 1));
            }
            for &v in part {
                if v == 0 || v > n {
                    return Err(Error::BadPartition(format!("candidate {v} outside 1..={n}")));
                }
                if seen[v - 1] {
                    return Err(Error::BadPartition(format!("candidate {v} appears twice")));
                }
                seen[v - 1] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::BadPartition(format!("candidate {} is in no part", v + 1)));
        }
        Ok(TripartitePartition { parts })
    }

    /// Consecutive parts `1..=a`, then `b`, then `c` candidates.
    pub fn consecutive(sizes: [usize; 3]) -> Result<Self> {
        let mut next = 1;
        let parts = sizes.map(|s| {
            let p: Vec<usize> = (next..next + s).collect();
            next += s;
            p
        });
        TripartitePartition::new(parts, next - 1)
    }

    /// Part `k` (0 for `A`, 1 for `B`, 2 for `C`).
    pub fn part(&self, k: usize) -> &[usize] {
        &self.parts[k]
    }

    /// Part sizes.
    pub fn sizes(&self) -> [usize; 3] {
        [self.parts[0].len(), self.parts[1].len(), self.parts[2].len()]
    }

    /// Total number of candidates.
    pub fn n(&self) -> usize {
        self.sizes().iter().sum()
    }

    /// For every candidate, the index of its part.
    pub fn part_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for (k, part) in self.parts.iter().enumerate() {
            for &v in part {
                out[v - 1] = k;
            }
        }
        out
    }
}

/// A tripartite tournament on consecutive parts with the given intra-part edges
/// (`(winner, loser)`, 1-based global labels).
pub fn build_tripartite(
    sizes: [usize; 3],
    intra: &[(usize, usize)],
) -> Result<(Tournament, TripartitePartition)> {
    if let Some(k) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyPart(k + 1));
    }
    let p = TripartitePartition::consecutive(sizes)?;
    let part_of = p.part_of();
    let n = p.n();
    let mut edges = Vec::with_capacity(pair_count(n));
    for &(w, l) in intra {
        for v in [w, l] {
            if v == 0 || v > n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
        }
        if part_of[w - 1] != part_of[l - 1] {
            return Err(Error::BadPartition(format!("edge {w} -> {l} crosses parts")));
        }
        edges.push((w, l));
    }
    let mut per_part = [0usize; 3];
    for &(w, _) in intra {
        per_part[part_of[w - 1]] += 1;
    }
    for k in 0..3 {
        if per_part[k] != pair_count(sizes[k]) {
            return Err(Error::IncompleteIntra(k + 1));
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let (pi, pj) = (part_of[i - 1], part_of[j - 1]);
            if pi != pj {
                edges.push(if (pi + 1) % 3 == pj { (i, j) } else { (j, i) });
            }
        }
    }
    let t = Tournament::build(n, &edges).map_err(|e| match e {
        Error::MissingPair(a, _) => Error::IncompleteIntra(part_of[a - 1] + 1),
        other => other,
    })?;
    Ok((t, p))
}

/// A tripartite tournament whose parts are internally transitive by index.
pub fn build_tripartite_transitive(sizes: [usize; 3]) -> Result<(Tournament, TripartitePartition)> {
    if let Some(k) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyPart(k + 1));
    }
    let p = TripartitePartition::consecutive(sizes)?;
    let part_of = p.part_of();
    let t = Tournament::from_fn(p.n(), |i, j| {
        let (pi, pj) = (part_of[i], part_of[j]);
        pi == pj || (pi + 1) % 3 == pj
    });
    Ok((t, p))
}

/// Whether every cross-part edge follows `A -> B -> C -> A`.
pub fn verify_tripartite(t: &Tournament, p: &TripartitePartition) -> Result<bool> {
    if p.n() != t.n() {
        return Err(Error::BadPartition(format!("partition covers {} of {} candidates", p.n(), t.n())));
    }
    TripartitePartition::new(p.parts.clone(), t.n())?;
    for k in 0..3 {
        let next = (k + 1) % 3;
        for &i in p.part(k) {
            for &j in p.part(next) {
                if !t.beats0(i - 1, j - 1) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn build_validates_pairs() {
        assert!(Tournament::build(2, &[(1, 2)]).is_ok());
        assert!(matches!(Tournament::build(2, &[]), Err(Error::MissingPair(1, 2))));
        assert!(matches!(Tournament::build(2, &[(1, 2), (2, 1)]), Err(Error::DuplicatePair(1, 2))));
        assert!(matches!(Tournament::build(2, &[(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(Tournament::build(2, &[(1, 3)]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn out_degrees() {
        let c = Tournament::cycle3();
        assert_eq!(c.scores(), vec![1, 1, 1]);
        assert!(c.beats(2, 1).unwrap());
        let t = Tournament::transitive(3);
        assert_eq!(t.outdeg(1).unwrap(), 2);
        assert_eq!(t.outdeg(3).unwrap(), 0);
        assert!(t.outdeg(4).is_err());
    }

    #[test]
    fn tripartite_construction() {
        let (t, p) = build_tripartite([1, 1, 1], &[]).unwrap();
        assert_eq!(t, Tournament::spiral_cycle3());
        assert!(verify_tripartite(&t, &p).unwrap());
        let (t, p) = build_tripartite([1, 1, 2], &[(3, 4)]).unwrap();
        assert_eq!(t.outdeg(1).unwrap(), 1);
        assert!(verify_tripartite(&t, &p).unwrap());
        assert!(matches!(build_tripartite([0, 1, 1], &[]), Err(Error::EmptyPart(1))));
        assert!(matches!(build_tripartite([1, 1, 2], &[]), Err(Error::IncompleteIntra(3))));
        let (u, _) = build_tripartite_transitive([1, 1, 2]).unwrap();
        assert_eq!(u, t);
    }

    #[test]
    fn tripartite_verification_rejects_non_cyclic_patterns() {
        let c = Tournament::cycle3();
        let p = TripartitePartition::new([vec![1], vec![2], vec![3]], 3).unwrap();
        assert!(!verify_tripartite(&c, &p).unwrap());
        let q = TripartitePartition::new([vec![2], vec![1], vec![3]], 3).unwrap();
        assert!(verify_tripartite(&c, &q).unwrap());
        let t = Tournament::transitive(3);
        for parts in [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]] {
            let p = TripartitePartition::new(parts.map(|v| vec![v]), 3).unwrap();
            assert!(!verify_tripartite(&t, &p).unwrap());
        }
        let bad = TripartitePartition { parts: [vec![1], vec![1], vec![3]] };
        assert!(matches!(verify_tripartite(&t, &bad), Err(Error::BadPartition(_))));
    }

    #[test]
    fn enumeration_counts_and_uniqueness() {
        assert_eq!(enumerate_all(2).unwrap().count(), 2);
        assert_eq!(enumerate_all(3).unwrap().count(), 8);
        assert_eq!(enumerate_all(4).unwrap().count(), 64);
        let all: HashSet<_> = enumerate_all(5).unwrap().collect();
        assert_eq!(all.len(), 1024);
        assert!(matches!(enumerate_all(8), Err(Error::TooLarge { .. })));
        for (k, t) in enumerate_all(4).unwrap().enumerate() {
            assert_eq!(t.index().unwrap(), k as u64);
        }
    }

    #[test]
    fn json_uses_one_based_edges() {
        let t = Tournament::build(2, &[(2, 1)]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"n":2,"edges":[[2,1]]}"#);
        assert_eq!(serde_json::from_str::<Tournament>(&s).unwrap(), t);
    }
}
