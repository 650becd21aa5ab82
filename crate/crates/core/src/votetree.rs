//! Complete binary voting trees: evaluation, random labelling, exact
//! guarantees and Monte Carlo winner distributions.
//!
//! A sampled tree stores only its seed. Leaf `i` of the tree with key
//! `(seed, stream)` takes its label from the 64-bit word at position `i` of the
//! ChaCha8 stream `stream` keyed by `seed`, so any leaf can be regenerated
//! without storing the others.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{make_simplex, ExactRational, SimplexPoint};
use crate::error::{Error, Result};
use crate::tournament::{tournament_count, Tournament, DEFAULT_ENUM_CAP};

/// Default work budget for Monte Carlo runs, in leaf evaluations.
pub const DEFAULT_LEAF_BUDGET: u128 = 1 << 36;

/// Largest depth whose labels may be materialised.
pub const MAX_MATERIALISED_DEPTH: u32 = 26;

/// How leaf labels are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leaves {
    /// Explicit 1-based labels, `2^d` of them.
    Explicit(Vec<u32>),
    /// Labels drawn on demand from a counter-based generator.
    Lazy {
        /// Generator key.
        seed: u64,
        /// Independent stream within the key.
        stream: u64,
    },
}

/// A complete binary tree of height `d` with leaves labelled from `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VotingTree {
    d: u32,
    n: usize,
    leaves: Leaves,
}

/// Map a uniform 64-bit word to a label in `1..=n`.
#[inline]
fn label_from_word(w: u64, n: usize) -> u32 {
    (((w as u128) * (n as u128)) >> 64) as u32 + 1
}

fn leaf_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl VotingTree {
    /// A tree with explicit 1-based labels; the label count must be a power of two.
    pub fn new(n: usize, labels: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("candidate universe is empty".into()));
        }
        if !labels.len().is_power_of_two() {
            return Err(Error::Precondition(format!("{} leaves is not a power of two", labels.len())));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        let d = labels.len().trailing_zeros();
        Ok(VotingTree { d, n, leaves: Leaves::Explicit(labels.into_iter().map(|l| l as u32).collect()) })
    }

    /// A d-RPT: `2^d` labels i.i.d. uniform on `[n]`, determined by `seed`.
    pub fn sample_rpt(d: u32, n: usize, seed: u64) -> Self {
        Self::sample_rpt_stream(d, n, seed, 0)
    }

    /// The d-RPT on an explicit generator stream.
    pub fn sample_rpt_stream(d: u32, n: usize, seed: u64, stream: u64) -> Self {
        assert!(n >= 1, "candidate universe is empty");
        assert!(d < 64, "depth must be below 64");
        VotingTree { d, n, leaves: Leaves::Lazy { seed, stream } }
    }

    /// Height.
    pub fn depth(&self) -> u32 {
        self.d
    }

    /// Candidate universe size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Leaf storage.
    pub fn leaves(&self) -> &Leaves {
        &self.leaves
    }

    /// Number of leaves.
    pub fn leaf_count(&self) -> u64 {
        1u64 << self.d
    }

    /// Label of leaf `i` (0-based, left to right).
    pub fn label(&self, i: u64) -> usize {
        assert!(i < self.leaf_count(), "leaf index out of range");
        match &self.leaves {
            Leaves::Explicit(v) => v[i as usize] as usize,
            Leaves::Lazy { seed, stream } => {
                let mut rng = leaf_rng(*seed, *stream);
                rng.set_word_pos(2 * u128::from(i));
                label_from_word(rng.next_u64(), self.n) as usize
            }
        }
    }

    /// All labels, materialised.
    pub fn labels(&self) -> Result<Vec<usize>> {
        if self.d > MAX_MATERIALISED_DEPTH {
            return Err(Error::TooLarge {
                what: "materialised tree depth",
                value: u64::from(self.d),
                cap: u64::from(MAX_MATERIALISED_DEPTH),
            });
        }
        Ok(match &self.leaves {
            Leaves::Explicit(v) => v.iter().map(|&l| l as usize).collect(),
            Leaves::Lazy { seed, stream } => {
                let mut rng = leaf_rng(*seed, *stream);
                (0..self.leaf_count()).map(|_| label_from_word(rng.next_u64(), self.n) as usize).collect()
            }
        })
    }

    /// The same tree with explicit labels.
    pub fn materialise(&self) -> Result<Self> {
        Ok(VotingTree { d: self.d, n: self.n, leaves: Leaves::Explicit(self.labels()?.iter().map(|&l| l as u32).collect()) })
    }

    /// The root label under `t`.
    pub fn evaluate(&self, t: &Tournament) -> Result<usize> {
        if t.n() != self.n {
            return Err(Error::UniverseMismatch(self.n, t.n()));
        }
        Ok(match &self.leaves {
            Leaves::Explicit(v) => play(self.d, v.iter().map(|&l| l - 1), t) as usize + 1,
            Leaves::Lazy { seed, stream } => {
                let mut rng = leaf_rng(*seed, *stream);
                let n = self.n;
                let labels = (0..self.leaf_count()).map(move |_| label_from_word(rng.next_u64(), n) - 1);
                play(self.d, labels, t) as usize + 1
            }
        })
    }

    /// Relabel candidates: label `l` becomes `perm[l-1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        crate::tournament::check_permutation(perm, self.n)?;
        let labels = self.labels()?.into_iter().map(|l| perm[l - 1]).collect();
        VotingTree::new(self.n, labels)
    }
}

/// Stream 0-based leaf labels through the tree with a stack of at most `d`
/// pending winners.
fn play(d: u32, labels: impl Iterator<Item = u32>, t: &Tournament) -> u32 {
    let mut stack: Vec<(u32, u32)> = Vec::with_capacity(d as usize + 1);
    for leaf in labels {
        let mut cur = leaf;
        let mut level = 0;
        while let Some(&(w, l)) = stack.last() {
            if l != level {
                break;
            }
            stack.pop();
            if w != cur && t.beats0(w as usize, cur as usize) {
                cur = w;
            }
            level += 1;
        }
        stack.push((cur, level));
    }
    debug_assert_eq!(stack.len(), 1);
    stack[0].0
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    d: u32,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    labels: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    seed: Option<String>,
}

impl Serialize for VotingTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match &self.leaves {
            Leaves::Explicit(v) => TreeRepr {
                d: self.d,
                n: self.n,
                labels: Some(v.iter().map(|&l| l as usize).collect()),
                seed: None,
            },
            Leaves::Lazy { seed, stream } => TreeRepr {
                d: self.d,
                n: self.n,
                labels: None,
                seed: Some(if *stream == 0 { seed.to_string() } else { format!("{seed}:{stream}") }),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VotingTree {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TreeRepr::deserialize(de)?;
        match (r.labels, r.seed) {
            (Some(labels), _) => {
                let t = VotingTree::new(r.n, labels).map_err(D::Error::custom)?;
                if t.d != r.d {
                    return Err(D::Error::custom("label count does not match depth"));
                }
                Ok(t)
            }
            (None, Some(seed)) => {
                let (s, st) = seed.split_once(':').unwrap_or((&seed, "0"));
                let seed = s.parse().map_err(D::Error::custom)?;
                let stream = st.parse().map_err(D::Error::custom)?;
                if r.n == 0 || r.d >= 64 {
                    return Err(D::Error::custom("invalid lazy tree shape"));
                }
                Ok(VotingTree::sample_rpt_stream(r.d, r.n, seed, stream))
            }
            (None, None) => Err(D::Error::custom("tree needs labels or a seed")),
        }
    }
}

/// Minimum winner out-degree over all tournaments, with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    /// The guarantee.
    pub value: usize,
    /// A tournament achieving the minimum (the first in enumeration order).
    pub witness: Tournament,
    /// Enumeration index of the witness.
    pub witness_index: u64,
    /// Winner on the witness.
    pub winner: usize,
}

/// Exact guarantee of `tree` by scanning every tournament on `n` candidates.
pub fn guarantee(tree: &VotingTree) -> Result<GuaranteeReport> {
    guarantee_capped(tree, DEFAULT_ENUM_CAP)
}

/// [`guarantee`] with an explicit enumeration cap.
pub fn guarantee_capped(tree: &VotingTree, cap: usize) -> Result<GuaranteeReport> {
    let n = tree.n;
    let count = tournament_count(n, cap)?;
    let tree = tree.materialise()?;
    let labels: Vec<u32> = match &tree.leaves {
        Leaves::Explicit(v) => v.iter().map(|&l| l - 1).collect(),
        Leaves::Lazy { .. } => unreachable!("materialised"),
    };
    let (value, witness_index) = (0..count)
        .into_par_iter()
        .map(|idx| {
            let t = Tournament::from_index(n, idx);
            let w = play(tree.d, labels.iter().copied(), &t);
            (t.outdeg0(w as usize), idx)
        })
        .min()
        .expect("at least one tournament");
    let witness = Tournament::from_index(n, witness_index);
    let winner = tree.evaluate(&witness)?;
    Ok(GuaranteeReport { value, witness, witness_index, winner })
}

/// Guarantees of `tree_count` independent d-RPTs (streams `0..tree_count` of `seed`).
pub fn guarantee_samples(d: u32, n: usize, tree_count: u64, seed: u64) -> Result<Vec<GuaranteeReport>> {
    tournament_count(n, DEFAULT_ENUM_CAP)?;
    (0..tree_count).map(|k| guarantee(&VotingTree::sample_rpt_stream(d, n, seed, k))).collect()
}

/// Winner counts of `samples` d-RPTs (streams `0..samples`) on `t`.
pub fn mc_winner_counts(d: u32, t: &Tournament, samples: u64, seed: u64, budget: u128) -> Result<Vec<u64>> {
    let needed = u128::from(samples) << d;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let n = t.n();
    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, k| {
                let w = VotingTree::sample_rpt_stream(d, n, seed, k).evaluate(t).expect("matching universe");
                acc[w - 1] += 1;
                acc
            },
        )
        .reduce(|| vec![0u64; n], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    Ok(counts)
}

/// Empirical winner distribution of `samples` d-RPTs on `t`, as exact frequencies.
pub fn mc_winner_distribution(d: u32, t: &Tournament, samples: u64, seed: u64) -> Result<SimplexPoint<ExactRational>> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    let counts = mc_winner_counts(d, t, samples, seed, DEFAULT_LEAF_BUDGET)?;
    let coords = counts
        .iter()
        .map(|&c| ExactRational::new(Integer::from(c), Integer::from(samples)))
        .collect::<Result<Vec<_>>>()?;
    make_simplex(coords)
}
