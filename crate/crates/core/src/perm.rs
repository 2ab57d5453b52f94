//! Finite-support permutations of the naturals.
//!
//! A [`FiniteSupportPerm`] is a bijection of ℕ that is the identity at and
//! beyond its bound `m`. Every such permutation has a canonical form (the
//! last table entry is not a fixed point) and the canonical forms are
//! enumerated bijectively by [`FiniteSupportPerm::unrank`]:
//!
//! * index 0 is the identity;
//! * then come blocks by increasing bound `m = 2, 3, 4, …`, each listing the
//!   `m! − (m−1)!` canonical permutations of `{0..m−1}` in lexicographic
//!   order of the table.
//!
//! Since the permutations of bound at most `m` occupy exactly the indices
//! `[0, m!)`, the block with bound `m` starts at `(m−1)!`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("transposition needs two distinct points, got {0} twice")]
    EqualPoints(u64),
    #[error("permutation is not in canonical form (table ends in a fixed point)")]
    NonCanonical,
    #[error("table is not a permutation of 0..{0}")]
    InvalidTable(usize),
    #[error("rank does not fit in 64 bits")]
    RankOverflow,
    #[error("cannot parse permutation {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// A permutation of ℕ that fixes every point at or above `bound()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteSupportPerm {
    table: Vec<u64>,
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Number of canonical completions once `placed` positions of a bound-`m`
/// table are fixed and `top_free` says whether `m − 1` is still unplaced.
fn completions(m: usize, placed: usize, top_free: bool) -> u128 {
    let r = m - placed;
    if r == 0 {
        // the last placed entry decided canonicity, the caller handles it
        return 1;
    }
    if top_free {
        factorial(r) - factorial(r - 1)
    } else {
        factorial(r)
    }
}

impl FiniteSupportPerm {
    pub fn identity() -> Self {
        Self { table: Vec::new() }
    }

    /// Builds a permutation from a table over `{0..len−1}`, canonicalizing it.
    pub fn from_table(table: Vec<u64>) -> Result<Self, PermError> {
        let n = table.len();
        let mut seen = vec![false; n];
        for &v in &table {
            let v = usize::try_from(v).map_err(|_| PermError::InvalidTable(n))?;
            if v >= n || seen[v] {
                return Err(PermError::InvalidTable(n));
            }
            seen[v] = true;
        }
        let mut p = Self { table };
        p.canonicalize();
        Ok(p)
    }

    /// Like [`from_table`](Self::from_table) but refuses non-canonical input.
    pub fn from_canonical_table(table: Vec<u64>) -> Result<Self, PermError> {
        let len = table.len();
        let p = Self::from_table(table)?;
        if p.bound() != len {
            return Err(PermError::NonCanonical);
        }
        Ok(p)
    }

    pub fn transposition(a: u64, b: u64) -> Result<Self, PermError> {
        if a == b {
            return Err(PermError::EqualPoints(a));
        }
        let m = a.max(b) as usize + 1;
        let mut table: Vec<u64> = (0..m as u64).collect();
        table.swap(a as usize, b as usize);
        Ok(Self { table })
    }

    fn canonicalize(&mut self) {
        while let Some(&last) = self.table.last() {
            if last as usize != self.table.len() - 1 {
                break;
            }
            self.table.pop();
        }
    }

    /// Support bound `m`; the permutation fixes every `i ≥ m`.
    pub fn bound(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn is_identity(&self) -> bool {
        self.table.is_empty()
    }

    pub fn apply(&self, i: u64) -> u64 {
        match usize::try_from(i) {
            Ok(idx) if idx < self.table.len() => self.table[idx],
            _ => i,
        }
    }

    /// `self⁻¹(j)` without materializing the inverse.
    pub fn apply_inverse(&self, j: u64) -> u64 {
        if (j as u128) < self.table.len() as u128 {
            self.table.iter().position(|&v| v == j).unwrap() as u64
        } else {
            j
        }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = self.bound().max(other.bound());
        let table = (0..m as u64).map(|i| self.apply(other.apply(i))).collect();
        let mut p = Self { table };
        p.canonicalize();
        p
    }

    pub fn inverse(&self) -> Self {
        let mut table = vec![0; self.table.len()];
        for (i, &v) in self.table.iter().enumerate() {
            table[v as usize] = i as u64;
        }
        Self { table }
    }

    /// The `n`-th canonical finite-support permutation.
    pub fn unrank(n: u64) -> Self {
        if n == 0 {
            return Self::identity();
        }
        let n = n as u128;
        let mut m = 2;
        while factorial(m) <= n {
            m += 1;
        }
        let mut offset = n - factorial(m - 1);
        let mut free: Vec<u64> = (0..m as u64).collect();
        let top = (m - 1) as u64;
        let mut table = Vec::with_capacity(m);
        for pos in 0..m {
            let mut chosen = None;
            for (slot, &c) in free.iter().enumerate() {
                let top_free = c != top && free.contains(&top);
                let count = if pos == m - 1 {
                    u128::from(c != top)
                } else {
                    completions(m, pos + 1, top_free)
                };
                if offset < count {
                    chosen = Some(slot);
                    break;
                }
                offset -= count;
            }
            let slot = chosen.expect("unrank offset lies inside its block");
            table.push(free.remove(slot));
        }
        Self { table }
    }

    /// Inverse of [`unrank`](Self::unrank).
    pub fn rank(&self) -> Result<u64, PermError> {
        let m = self.bound();
        if m == 0 {
            return Ok(0);
        }
        if self.table[m - 1] as usize == m - 1 {
            return Err(PermError::NonCanonical);
        }
        let top = (m - 1) as u64;
        let mut free: Vec<u64> = (0..m as u64).collect();
        let mut offset: u128 = 0;
        for (pos, &v) in self.table.iter().enumerate() {
            for &c in free.iter().take_while(|&&c| c < v) {
                let top_free = c != top && free.contains(&top);
                offset += if pos == m - 1 {
                    u128::from(c != top)
                } else {
                    completions(m, pos + 1, top_free)
                };
            }
            free.retain(|&c| c != v);
        }
        u64::try_from(factorial(m - 1) + offset).map_err(|_| PermError::RankOverflow)
    }
}

impl fmt::Display for FiniteSupportPerm {
    /// `id` for the identity, otherwise the table in brackets.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("id");
        }
        f.write_str("[")?;
        for (n, v) in self.table.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for FiniteSupportPerm {
    type Err = PermError;

    /// Accepts `id`, `t(a,b)`, `#n`, a table `[..]`, and `*`-products of
    /// those. `p*q` denotes `p ∘ q`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| PermError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(fail("empty"));
        }
        let mut acc = Self::identity();
        for factor in compact.split('*') {
            let p = if factor == "id" {
                Self::identity()
            } else if let Some(n) = factor.strip_prefix('#') {
                Self::unrank(n.parse().map_err(|_| fail("bad rank"))?)
            } else if let Some(body) = factor.strip_prefix("t(").and_then(|s| s.strip_suffix(')')) {
                let (a, b) = body
                    .split_once(',')
                    .ok_or_else(|| fail("t(a,b) needs two points"))?;
                let a = a.parse().map_err(|_| fail("bad point"))?;
                let b = b.parse().map_err(|_| fail("bad point"))?;
                Self::transposition(a, b)?
            } else if let Some(body) = factor.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let table = if body.is_empty() {
                    Vec::new()
                } else {
                    body.split(',')
                        .map(|v| v.parse().map_err(|_| fail("bad table entry")))
                        .collect::<Result<Vec<u64>, _>>()?
                };
                Self::from_table(table)?
            } else {
                return Err(fail("unknown factor"));
            };
            acc = acc.compose(&p);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: u64, b: u64) -> FiniteSupportPerm {
        FiniteSupportPerm::transposition(a, b).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(FiniteSupportPerm::identity().apply(5), 5);
        assert_eq!(t(0, 1).apply(0), 1);
        assert_eq!(t(0, 1).apply(7), 7);
    }

    #[test]
    fn transposition_tables() {
        assert_eq!(t(0, 1).table(), &[1, 0]);
        assert_eq!(t(0, 2).table(), &[2, 1, 0]);
        assert_eq!(
            FiniteSupportPerm::transposition(3, 3),
            Err(PermError::EqualPoints(3))
        );
    }

    #[test]
    fn compose_examples() {
        let p = t(0, 2);
        assert_eq!(FiniteSupportPerm::identity().compose(&p), p);
        assert!(t(0, 1).compose(&t(0, 1)).is_identity());
        // t(1,2) acts first: 0 → 0 → 1, 1 → 2 → 2, 2 → 1 → 0
        let c = t(0, 1).compose(&t(1, 2));
        assert_eq!((c.apply(0), c.apply(1), c.apply(2)), (1, 2, 0));
        assert_eq!(
            (c.apply_inverse(1), c.apply_inverse(2), c.apply_inverse(0)),
            (0, 1, 2)
        );
    }

    #[test]
    fn compose_canonicalizes() {
        // t(1,2)∘t(1,2) on bound 3 collapses entirely
        let c = t(1, 2).compose(&t(1, 2));
        assert_eq!(c.bound(), 0);
        let c = t(0, 3).compose(&t(0, 3)).compose(&t(0, 1));
        assert_eq!(c, t(0, 1));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(t(0, 1).inverse(), t(0, 1));
        assert!(FiniteSupportPerm::identity().inverse().is_identity());
        let p = FiniteSupportPerm::from_table(vec![2, 0, 1]).unwrap();
        assert_eq!(p.apply_inverse(0), 1);
        assert_eq!(p.inverse().apply(0), 1);
        assert_eq!(p.apply_inverse(10), 10);
    }

    #[test]
    fn unrank_first_entries() {
        assert!(FiniteSupportPerm::unrank(0).is_identity());
        assert_eq!(FiniteSupportPerm::unrank(1), t(0, 1));
        // S3 minus the two perms fixing 2, lexicographic
        let expect = [[0, 2, 1], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for (n, tab) in expect.iter().enumerate() {
            assert_eq!(FiniteSupportPerm::unrank(n as u64 + 2).table(), tab);
        }
        // first bound-4 entry sits at 3! = 6
        assert_eq!(FiniteSupportPerm::unrank(6).table(), &[0, 1, 3, 2]);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FiniteSupportPerm::identity().rank(), Ok(0));
        assert_eq!(t(0, 1).rank(), Ok(1));
        let raw = FiniteSupportPerm {
            table: vec![1, 0, 2],
        };
        assert_eq!(raw.rank(), Err(PermError::NonCanonical));
    }

    #[test]
    fn extreme_ranks() {
        let p = FiniteSupportPerm::unrank(u64::MAX);
        assert_eq!(p.bound(), 21);
        assert_eq!(p.rank(), Ok(u64::MAX));
        let big = t(0, 21);
        assert_eq!(big.rank(), Err(PermError::RankOverflow));
    }

    #[test]
    fn table_validation() {
        assert_eq!(
            FiniteSupportPerm::from_table(vec![0, 0]),
            Err(PermError::InvalidTable(2))
        );
        assert_eq!(
            FiniteSupportPerm::from_canonical_table(vec![1, 0, 2]),
            Err(PermError::NonCanonical)
        );
        assert_eq!(
            FiniteSupportPerm::from_table(vec![1, 0, 2]).unwrap(),
            t(0, 1)
        );
    }

    #[test]
    fn text_forms() {
        let parse = |s: &str| s.parse::<FiniteSupportPerm>().unwrap();
        assert!(parse("id").is_identity());
        assert_eq!(parse("t(0, 1)"), t(0, 1));
        assert_eq!(parse("#1"), t(0, 1));
        assert_eq!(parse("t(0,1)*t(1,2)"), t(0, 1).compose(&t(1, 2)));
        assert_eq!(parse("[2,1,0]"), t(0, 2));
        assert_eq!(parse(&t(0, 2).to_string()), t(0, 2));
        assert!("t(1)".parse::<FiniteSupportPerm>().is_err());
        assert!("q".parse::<FiniteSupportPerm>().is_err());
        assert!(matches!(
            "t(2,2)".parse::<FiniteSupportPerm>(),
            Err(PermError::EqualPoints(2))
        ));
    }
}
