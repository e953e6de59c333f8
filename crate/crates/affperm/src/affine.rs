//! Window representation of affine permutations.
//!
//! An affine permutation is stored as its window `σ(1), ..., σ(N)`; every
//! other value follows from `σ(i + tN) = σ(i) + tN`. Construction goes
//! through [`AffinePermutation::validate`], which checks the two defining
//! invariants (one representative per residue class mod `N`, window sum
//! equal to `N(N+1)/2`), so a held value is always a genuine affine
//! permutation. Boundedness is a predicate, not a type: the tuple encoding
//! in [`crate::decomposition`] legitimately produces unbounded results.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An affine permutation of size `N`, identified with its window.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "PermJson")]
pub struct AffinePermutation {
    window: Vec<i64>,
}

/// Serialized form: `{"size": N, "window": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PermJson {
    size: usize,
    window: Vec<i64>,
}

impl From<AffinePermutation> for PermJson {
    fn from(p: AffinePermutation) -> Self {
        PermJson {
            size: p.size(),
            window: p.window,
        }
    }
}

impl<'de> Deserialize<'de> for AffinePermutation {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = PermJson::deserialize(de)?;
        if raw.size != raw.window.len() {
            return Err(serde::de::Error::custom(format!(
                "SizeMismatch: size field {} but window has {} entries",
                raw.size,
                raw.window.len()
            )));
        }
        AffinePermutation::validate(raw.window).map_err(serde::de::Error::custom)
    }
}

impl AffinePermutation {
    /// Checks the residue and centering invariants and constructs the
    /// permutation. This is the only way to obtain the type.
    pub fn validate(window: Vec<i64>) -> Result<Self> {
        if window.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let n = window.len();
        // residues: exactly one representative of each class mod N
        let mut seen: Vec<Option<usize>> = vec![None; n];
        for (i, &v) in window.iter().enumerate() {
            let r = v.rem_euclid(n as i64) as usize;
            if let Some(first) = seen[r] {
                return Err(Error::DuplicateResidue {
                    first: first + 1,
                    second: i + 1,
                    size: n,
                });
            }
            seen[r] = Some(i);
        }
        let expected = (n as i64) * (n as i64 + 1) / 2;
        let actual: i64 = window.iter().sum();
        if actual != expected {
            return Err(Error::BadSum { expected, actual });
        }
        Ok(AffinePermutation { window })
    }

    pub fn size(&self) -> usize {
        self.window.len()
    }

    pub fn window(&self) -> &[i64] {
        &self.window
    }

    /// `σ(i)` for any integer `i`, via periodicity.
    pub fn evaluate(&self, i: i64) -> i64 {
        let n = self.window.len() as i64;
        let r = (i - 1).rem_euclid(n); // i = (r+1) + tN
        self.window[r as usize] + (i - 1 - r)
    }

    /// `|σ(i) - i| < N` for all `i`; by periodicity the window suffices.
    pub fn is_bounded(&self) -> bool {
        let n = self.window.len() as i64;
        self.window
            .iter()
            .enumerate()
            .all(|(i, &v)| (v - (i as i64 + 1)).abs() < n)
    }

    /// First window index violating boundedness, as an error.
    pub fn require_bounded(&self) -> Result<()> {
        let n = self.window.len() as i64;
        for (i, &v) in self.window.iter().enumerate() {
            if (v - (i as i64 + 1)).abs() >= n {
                return Err(Error::UnboundedInput {
                    index: i as i64 + 1,
                    size: self.window.len(),
                });
            }
        }
        Ok(())
    }

    /// The infinite sum `⊕π`: periodic extension of an ordinary permutation.
    /// Always bounded, since `|π(i) - i| <= N - 1`.
    pub fn infinite_sum(pi: &OrdinaryPermutation) -> Self {
        let window = pi.values().iter().map(|&v| v as i64).collect();
        AffinePermutation { window }
    }
}

/// An ordinary permutation of `[m]` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrdinaryPermutation {
    values: Vec<usize>,
}

impl OrdinaryPermutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let m = values.len();
        if m == 0 {
            return Err(Error::NotAPermutation { size: 0 });
        }
        let mut seen = vec![false; m];
        for &v in &values {
            if v == 0 || v > m || seen[v - 1] {
                return Err(Error::NotAPermutation { size: m });
            }
            seen[v - 1] = true;
        }
        Ok(OrdinaryPermutation { values })
    }

    /// The decreasing pattern `m (m-1) ... 1`.
    pub fn decreasing(m: usize) -> Self {
        OrdinaryPermutation {
            values: (1..=m).rev().collect(),
        }
    }

    pub fn identity(m: usize) -> Self {
        OrdinaryPermutation {
            values: (1..=m).collect(),
        }
    }

    /// Parses `"4321"` (digits) or `"10,2,1,..."` (comma-separated).
    pub fn parse(s: &str) -> Result<Self> {
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::BadInput(format!("cannot parse pattern {s:?}")))?
        } else {
            s.trim()
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::BadInput(format!("cannot parse pattern {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        OrdinaryPermutation::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

impl std::fmt::Display for OrdinaryPermutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.values.len() <= 9 {
            for v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let strs: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", strs.join(","))
        }
    }
}
