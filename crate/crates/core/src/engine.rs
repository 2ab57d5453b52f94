//! Diagonal constructions.
//!
//! Every construction returns a term, so its result can be evaluated,
//! printed, encoded and fed to further constructions.

use thiserror::Error;

use crate::enumerations::{interleave, prepend};
use crate::perm::FiniteSupportPerm;
use crate::sdl::{EnumTerm, Expr, SeqTerm, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("tower levels start at 1")]
    InvalidLevel,
}

/// `result(i) = 1 − e(i, i)`.
pub fn diag_classical(e: &EnumTerm) -> SeqTerm {
    SeqTerm::combinator(Expr::Diag(e.clone()))
}

/// `result(i) = 1 − e(i, p(i))`. Row-indexed: escape from `e` is not
/// guaranteed (see [`BuilderSpec::Counterexample`](crate::BuilderSpec::Counterexample)).
pub fn diag_perm_row(e: &EnumTerm, p: &FiniteSupportPerm) -> SeqTerm {
    SeqTerm::combinator(Expr::DiagRow(e.clone(), p.clone()))
}

/// `result(p(i)) = 1 − e(i, p(i))`, i.e. `result(j) = 1 − e(p⁻¹(j), j)`.
/// Differs from row `i` at position `p(i)` for every `i`.
pub fn diag_perm_transversal(e: &EnumTerm, p: &FiniteSupportPerm) -> SeqTerm {
    SeqTerm::combinator(Expr::DiagTransversal(e.clone(), p.clone()))
}

pub fn diag_perm(e: &EnumTerm, p: &FiniteSupportPerm, variant: Variant) -> SeqTerm {
    match variant {
        Variant::Row => diag_perm_row(e, p),
        Variant::Transversal => diag_perm_transversal(e, p),
    }
}

/// The family `Y`: row `k` is the permuted diagonal of `e` under the
/// `k`-th permutation [`FiniteSupportPerm::unrank`]`(k)`.
pub fn build_y(e: &EnumTerm, variant: Variant) -> EnumTerm {
    EnumTerm::combinator(Expr::Ys(e.clone(), variant))
}

/// `z(i) = e(i, π_i(i))` with `π_i = unrank(i)`; pointwise the classical
/// diagonal of `build_y(e, Row)`.
pub fn z_direct(e: &EnumTerm) -> SeqTerm {
    SeqTerm::combinator(Expr::ReverseDiag(e.clone()))
}

/// One level of the diagonal tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerLevel {
    pub n: u64,
    pub x_n: EnumTerm,
    /// `diag_classical(x_n)`
    pub w_n: SeqTerm,
    base_x: EnumTerm,
    base_y: EnumTerm,
}

impl TowerLevel {
    /// The definition of `x_n` one step down: `interleave(x, y)` at level 1,
    /// `prepend(w_{n−1}, x_{n−1})` above.
    pub fn unfold(&self) -> EnumTerm {
        if self.n == 1 {
            interleave(&self.base_x, &self.base_y)
        } else {
            let below = tower(&self.base_x, &self.base_y, self.n - 1).unwrap();
            prepend(&below.w_n, &below.x_n)
        }
    }

    pub fn next(&self) -> TowerLevel {
        tower(&self.base_x, &self.base_y, self.n + 1).unwrap()
    }
}

/// Level `n` of the tower: `x_1 = interleave(x, y)`,
/// `x_{n+1} = prepend(w_n, x_n)` and `w_n = diag_classical(x_n)`.
pub fn tower(x: &EnumTerm, y: &EnumTerm, n: u64) -> Result<TowerLevel, EngineError> {
    if n == 0 {
        return Err(EngineError::InvalidLevel);
    }
    let x_n = EnumTerm::combinator(Expr::Tower(x.clone(), y.clone(), n));
    Ok(TowerLevel {
        n,
        w_n: diag_classical(&x_n),
        x_n,
        base_x: x.clone(),
        base_y: y.clone(),
    })
}

/// The limit enumeration: row `2t` is `w_{t+1}`, row `2t+1` is row `t` of
/// `x_1`. Row `r` of `x_n` therefore sits at `2(n−r−2)` when `r ≤ n−2` and
/// at `2(r−n+1)+1` otherwise.
pub fn x_infinity(x: &EnumTerm, y: &EnumTerm) -> EnumTerm {
    EnumTerm::combinator(Expr::XInfinity(x.clone(), y.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerations::{build_enumeration, BuilderSpec};
    use crate::sdl::{parse_enum, row};

    fn t01() -> FiniteSupportPerm {
        FiniteSupportPerm::transposition(0, 1).unwrap()
    }

    fn builder(b: BuilderSpec) -> EnumTerm {
        build_enumeration(&b)
    }

    #[test]
    fn classical_examples() {
        assert_eq!(
            diag_classical(&builder(BuilderSpec::Zeros)).prefix(16),
            vec![1; 16]
        );
        assert_eq!(
            diag_classical(&builder(BuilderSpec::Identity)).prefix(16),
            vec![0; 16]
        );
        // 1 − mixer LSB at (i, i), values from an independent run of the mixer
        let h = diag_classical(&builder(BuilderSpec::Hashrows { salt: 0 }));
        assert_eq!(h.prefix(8), vec![0, 0, 0, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn permuted_examples() {
        let id = builder(BuilderSpec::Identity);
        let ident = FiniteSupportPerm::identity();
        assert_eq!(
            diag_perm_row(&id, &ident).prefix(64),
            diag_classical(&id).prefix(64)
        );
        assert_eq!(diag_perm_row(&id, &t01()).prefix(5), vec![1, 1, 0, 0, 0]);
        assert_eq!(
            diag_perm_transversal(&id, &t01()).prefix(5),
            vec![1, 1, 0, 0, 0]
        );

        let ce = builder(BuilderSpec::Counterexample);
        let y = diag_perm_row(&ce, &t01());
        assert_eq!(y.prefix(6), vec![0, 1, 0, 0, 0, 0]);
        assert_eq!(y.prefix(256), row(&ce, 0).prefix(256));
        let yt = diag_perm_transversal(&ce, &t01());
        assert_ne!(yt.bit(1), ce.bit(0, 1));
    }

    #[test]
    fn y_family_rows() {
        let e = builder(BuilderSpec::BinaryNaturals);
        let y = build_y(&e, Variant::Row);
        assert_eq!(y.row_prefix(0, 64), diag_classical(&e).prefix(64));
        assert_eq!(y.row_prefix(1, 64), diag_perm_row(&e, &t01()).prefix(64));
        let yt = build_y(&e, Variant::Transversal);
        assert_eq!(
            yt.row_prefix(1, 64),
            diag_perm_transversal(&e, &t01()).prefix(64)
        );
        for k in 0..100 {
            assert!(y.row_prefix(k, 16).iter().all(|&b| b <= 1));
        }
    }

    #[test]
    fn z_examples() {
        let id = builder(BuilderSpec::Identity);
        assert_eq!(z_direct(&id).bit(0), 1);
        let e = parse_enum("(k * 7 + i * i) div 3").unwrap();
        let z = z_direct(&e);
        let dy = diag_classical(&build_y(&e, Variant::Row));
        assert_eq!(z.prefix(256), dy.prefix(256));
        let y = build_y(&e, Variant::Row);
        for k in 0..128 {
            assert_ne!(z.bit(k), y.bit(k, k));
        }
    }

    /// Explicit prefix matrices of every level, built by list surgery.
    fn naive_tower(
        x: &EnumTerm,
        y: &EnumTerm,
        levels: usize,
        size: usize,
    ) -> Vec<(Vec<Vec<u8>>, Vec<u8>)> {
        let mut x_n: Vec<Vec<u8>> = (0..size as u64)
            .map(|t| {
                let (src, r) = if t % 2 == 0 { (x, t / 2) } else { (y, t / 2) };
                (0..size as u64).map(|i| src.bit(r, i)).collect()
            })
            .collect();
        let mut out = Vec::new();
        for _ in 0..levels {
            let w: Vec<u8> = (0..size).map(|i| 1 - x_n[i][i]).collect();
            out.push((x_n.clone(), w.clone()));
            x_n.insert(0, w);
            x_n.truncate(size);
        }
        out
    }

    #[test]
    fn tower_matches_naive_construction() {
        let x = builder(BuilderSpec::Hashrows { salt: 5 });
        let y = build_y(&x, Variant::Row);
        let naive = naive_tower(&x, &y, 16, 48);
        for (n, (matrix, w)) in naive.iter().enumerate() {
            let level = tower(&x, &y, n as u64 + 1).unwrap();
            assert_eq!(&level.w_n.prefix(48), w, "w_{}", n + 1);
            for (k, r) in matrix.iter().enumerate() {
                assert_eq!(
                    &level.x_n.row_prefix(k as u64, 48),
                    r,
                    "x_{} row {k}",
                    n + 1
                );
            }
        }
    }

    #[test]
    fn tower_examples() {
        let zeros = builder(BuilderSpec::Zeros);
        let ones = builder(BuilderSpec::Ones);
        let t1 = tower(&zeros, &ones, 1).unwrap();
        assert_eq!(t1.x_n.row_prefix(0, 32), vec![0; 32]);
        assert_eq!(t1.x_n.row_prefix(1, 32), vec![1; 32]);
        let t2 = t1.next();
        assert_eq!(t2.x_n.row_prefix(0, 128), t1.w_n.prefix(128));
        assert_eq!(tower(&zeros, &ones, 0), Err(EngineError::InvalidLevel));
    }

    #[test]
    fn tower_unfolds_structurally() {
        let x = builder(BuilderSpec::Identity);
        let y = build_y(&x, Variant::Transversal);
        assert_eq!(tower(&x, &y, 1).unwrap().unfold(), interleave(&x, &y));
        for n in 1..16 {
            let lower = tower(&x, &y, n).unwrap();
            let upper = lower.next();
            assert_eq!(upper.unfold(), prepend(&lower.w_n, &lower.x_n));
        }
    }

    #[test]
    fn limit_layout() {
        let x = builder(BuilderSpec::BinaryNaturals);
        let y = build_y(&x, Variant::Row);
        let xi = x_infinity(&x, &y);
        let t1 = tower(&x, &y, 1).unwrap();
        assert_eq!(xi.row_prefix(0, 128), t1.w_n.prefix(128));
        assert_eq!(xi.row_prefix(1, 128), t1.x_n.row_prefix(0, 128));
        for n in 1..=16u64 {
            let level = tower(&x, &y, n).unwrap();
            assert_eq!(xi.row_prefix(2 * (n - 1), 64), level.w_n.prefix(64));
            // rows of x_n sit at their documented indices
            for r in 0..20 {
                let at = if r + 2 <= n {
                    2 * (n - r - 2)
                } else {
                    2 * (r + 1 - n) + 1
                };
                assert_eq!(xi.row_prefix(at, 32), level.x_n.row_prefix(r, 32));
            }
        }
        let d = diag_classical(&xi);
        for k in 0..128 {
            assert_ne!(d.bit(k), xi.bit(k, k));
        }
    }
}
