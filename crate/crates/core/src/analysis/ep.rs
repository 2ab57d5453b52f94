//! Eventually periodic sequences in normal form.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpError {
    #[error("the periodic part must not be empty")]
    EmptyPeriod,
    #[error("sequence is not certified eventually periodic: {0}")]
    NotEventuallyPeriodic(String),
}

/// `pre · per^ω` with `per` primitive and `pre` as short as possible.
/// Two normal forms denote the same sequence iff they are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodic {
    pre: Vec<u8>,
    per: Vec<u8>,
}

/// Knuth–Morris–Pratt failure function: `fail[j]` is the length of the
/// longest proper border of `s[..=j]`.
fn failure_function(s: &[u8]) -> Vec<usize> {
    let mut fail = vec![0; s.len()];
    let mut k = 0;
    for j in 1..s.len() {
        while k > 0 && s[j] != s[k] {
            k = fail[k - 1];
        }
        if s[j] == s[k] {
            k += 1;
        }
        fail[j] = k;
    }
    fail
}

/// Length of the shortest block whose repetition yields `s` exactly.
pub fn minimal_period(s: &[u8]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let p = n - failure_function(s)[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

impl EventuallyPeriodic {
    pub fn new(pre: &[u8], per: &[u8]) -> Result<Self, EpError> {
        if per.is_empty() {
            return Err(EpError::EmptyPeriod);
        }
        let p = minimal_period(per);
        let mut per = per[..p].to_vec();
        let mut pre = pre.to_vec();
        // absorb the tail of the preperiod into a rotated period
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Ok(Self { pre, per })
    }

    pub fn pre(&self) -> &[u8] {
        &self.pre
    }

    pub fn per(&self) -> &[u8] {
        &self.per
    }

    pub fn bit(&self, i: u64) -> u8 {
        let i = i as u128;
        let lp = self.pre.len() as u128;
        if i < lp {
            self.pre[i as usize]
        } else {
            self.per[((i - lp) % self.per.len() as u128) as usize]
        }
    }

    pub fn prefix(&self, len: u64) -> Vec<u8> {
        (0..len).map(|i| self.bit(i)).collect()
    }
}

impl fmt::Display for EventuallyPeriodic {
    /// `pre(per)`, e.g. `101(0)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.pre {
            write!(f, "{b}")?;
        }
        f.write_str("(")?;
        for b in &self.per {
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

pub fn ep_normalize(pre: &[u8], per: &[u8]) -> Result<EventuallyPeriodic, EpError> {
    EventuallyPeriodic::new(pre, per)
}

/// Equality of the denoted sequences (normal forms are unique).
pub fn ep_equal(a: &EventuallyPeriodic, b: &EventuallyPeriodic) -> bool {
    a == b
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Index past which two EP sequences cannot first differ:
/// `max(|pre|) + lcm(|per_a|, |per_b|)`.
pub fn agreement_bound(a: &EventuallyPeriodic, b: &EventuallyPeriodic) -> u128 {
    let (pa, pb) = (a.per.len() as u128, b.per.len() as u128);
    let lcm = pa / gcd(pa, pb) * pb;
    a.pre.len().max(b.pre.len()) as u128 + lcm
}

/// Least index where the two sequences differ, if any.
pub fn first_difference(a: &EventuallyPeriodic, b: &EventuallyPeriodic) -> Option<u64> {
    if a == b {
        return None;
    }
    let bound = agreement_bound(a, b).min(u64::MAX as u128) as u64;
    (0..bound).find(|&i| a.bit(i) != b.bit(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(pre: &[u8], per: &[u8]) -> EventuallyPeriodic {
        EventuallyPeriodic::new(pre, per).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(ep(&[], &[0, 1, 0, 1]).per(), &[0, 1]);
        let x = ep(&[1], &[1]);
        assert_eq!((x.pre(), x.per()), (&[][..], &[1][..]));
        let x = ep(&[1, 0], &[0]);
        assert_eq!((x.pre(), x.per()), (&[1][..], &[0][..]));
        assert_eq!(
            EventuallyPeriodic::new(&[1], &[]),
            Err(EpError::EmptyPeriod)
        );
    }

    #[test]
    fn rotation_when_trimming() {
        // 010(10)^ω is (01)^ω
        let x = ep(&[0, 1, 0], &[1, 0]);
        assert_eq!((x.pre(), x.per()), (&[][..], &[0, 1][..]));
        // 01(10)^ω cannot lose its preperiod
        let x = ep(&[0, 1], &[1, 0]);
        assert_eq!((x.pre(), x.per()), (&[0, 1][..], &[1, 0][..]));
    }

    #[test]
    fn equality_examples() {
        assert!(ep_equal(&ep(&[0, 1], &[0]), &ep(&[0, 1], &[0])));
        assert!(ep_equal(&ep(&[0, 1], &[0]), &ep(&[0, 1, 0], &[0, 0])));
        assert!(!ep_equal(&ep(&[], &[0]), &ep(&[], &[1])));
        assert_eq!(
            first_difference(&ep(&[], &[0]), &ep(&[0, 0, 0], &[1])),
            Some(3)
        );
        assert_eq!(
            first_difference(&ep(&[], &[0, 1]), &ep(&[0], &[1, 0])),
            None
        );
    }

    #[test]
    fn minimal_period_cases() {
        assert_eq!(minimal_period(&[0, 1, 0, 1, 0, 1]), 2);
        assert_eq!(minimal_period(&[0, 1, 0]), 3);
        assert_eq!(minimal_period(&[1, 1, 1]), 1);
        assert_eq!(minimal_period(&[0, 0, 1, 0, 0, 1]), 3);
    }

    #[test]
    fn display_form() {
        assert_eq!(ep(&[1, 0, 1], &[0]).to_string(), "101(0)");
    }
}
