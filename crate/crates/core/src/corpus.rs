//! Deterministic test corpora.
//!
//! Generated enumerations are random arithmetic bodies over `k` and `i`,
//! drawn from a seeded ChaCha stream so every run sees the same terms.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    build_y, diag_classical, diag_perm_row, diag_perm_transversal, tower, x_infinity, z_direct,
};
use crate::enumerations::{build_enumeration, dovetail, interleave, prepend, BuilderSpec};
use crate::perm::FiniteSupportPerm;
use crate::sdl::build::*;
use crate::sdl::{EnumTerm, Expr, FamilyTerm, SeqTerm, Term, Var, Variant};

pub const DEFAULT_SEED: u64 = 0x5eed_d1a6;

fn random_expr(rng: &mut ChaCha8Rng, vars: &[Var], depth: u32) -> Expr {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_bool(0.6) {
            var(vars[rng.gen_range(0..vars.len())])
        } else {
            num(rng.gen_range(0..8))
        };
    }
    let child = |rng: &mut ChaCha8Rng| random_expr(rng, vars, depth - 1);
    match rng.gen_range(0..11) {
        0 => add(child(rng), child(rng)),
        1 => sub(child(rng), child(rng)),
        2 => mul(child(rng), child(rng)),
        3 => div(child(rng), rng.gen_range(1..6)),
        4 => modulo(child(rng), rng.gen_range(1..6)),
        5 => eq(child(rng), child(rng)),
        6 => lt(child(rng), child(rng)),
        7 => ite(child(rng), child(rng), child(rng)),
        8 => {
            let j = num(rng.gen_range(0..4));
            bit(child(rng), j)
        }
        9 => bit(child(rng), child(rng)),
        _ => parity(child(rng)),
    }
}

/// `count` pairwise distinct enumerations in which both `k` and `i` occur.
pub fn generated_enumerations(count: usize, seed: u64) -> Vec<EnumTerm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let expr = random_expr(&mut rng, &[Var::K, Var::I], 4);
        let text = format!("{expr:?}");
        if !(text.contains("Var(K)") && text.contains("Var(I)")) || !seen.insert(text) {
            continue;
        }
        out.push(EnumTerm::new(expr).expect("generated body uses only k and i"));
    }
    out
}

/// Random finite-support permutation with bound at most 12.
pub fn random_perm(rng: &mut impl Rng) -> FiniteSupportPerm {
    let n = rng.gen_range(0..12usize);
    let mut table: Vec<u64> = (0..n as u64).collect();
    for j in (1..n).rev() {
        table.swap(j, rng.gen_range(0..=j));
    }
    FiniteSupportPerm::from_table(table).expect("shuffle is a permutation")
}

/// The six named builders followed by 100 generated enumerations.
pub fn full_corpus() -> Vec<EnumTerm> {
    let mut out: Vec<EnumTerm> = BuilderSpec::standard_corpus()
        .iter()
        .map(build_enumeration)
        .collect();
    out.extend(generated_enumerations(100, DEFAULT_SEED));
    out
}

/// Terms of both sorts exercising every syntactic form, including the
/// limit enumeration and the sixteenth tower diagonal. All distinct.
pub fn codec_corpus() -> Vec<Term> {
    let builders: Vec<EnumTerm> = BuilderSpec::standard_corpus()
        .iter()
        .chain([
            &BuilderSpec::Counterexample,
            &BuilderSpec::Hashrows { salt: 77 },
        ])
        .map(build_enumeration)
        .collect();
    let generated = generated_enumerations(40, DEFAULT_SEED ^ 1);
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 2);

    let mut out: Vec<Term> = Vec::new();
    out.extend(builders.iter().cloned().map(Term::from));
    out.extend(generated.iter().cloned().map(Term::from));
    for _ in 0..20 {
        let s = SeqTerm::new(random_expr(&mut rng, &[Var::I], 4)).unwrap();
        out.push(s.into());
    }
    for (j, e) in builders.iter().enumerate() {
        let p = FiniteSupportPerm::unrank(j as u64 * 7 + 1);
        out.push(diag_classical(e).into());
        out.push(diag_perm_row(e, &p).into());
        out.push(diag_perm_transversal(e, &p).into());
        out.push(z_direct(e).into());
        out.push(build_y(e, Variant::Row).into());
        out.push(build_y(e, Variant::Transversal).into());
    }
    let (x, y) = (&builders[4], build_y(&builders[4], Variant::Row));
    out.push(x_infinity(x, &y).into());
    out.push(diag_classical(&x_infinity(x, &y)).into());
    let w16 = tower(x, &y, 16).unwrap().w_n;
    out.push(w16.clone().into());
    out.push(tower(x, &y, 3).unwrap().x_n.into());
    out.push(interleave(&builders[0], &generated[0]).into());
    out.push(prepend(&w16, &generated[1]).into());
    let fam =
        FamilyTerm::new(add(mul(var(Var::A), num(3)), bit(var(Var::I), var(Var::B)))).unwrap();
    out.push(dovetail(&fam).into());
    let big = SeqTerm::new(add(num(u64::MAX), mul(num(u64::MAX), var(Var::I)))).unwrap();
    out.push(big.into());
    out
}
