//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p diag-core --test acceptance`.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use diag_core::analysis::ep::{agreement_bound, ep_equal, EventuallyPeriodic};
use diag_core::analysis::{membership_scan, WitnessKind};
use diag_core::corpus::{codec_corpus, full_corpus};
use diag_core::engine::{
    build_y, diag_classical, diag_perm_row, diag_perm_transversal, tower, x_infinity, z_direct,
};
use diag_core::enumerations::{build_enumeration, BuilderSpec};
use diag_core::sdl::{decode_term, encode_term, Variant};
use diag_core::{pair, unpair, EnumTerm, FiniteSupportPerm, Term};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn t01() -> FiniteSupportPerm {
    FiniteSupportPerm::transposition(0, 1).unwrap()
}

fn flip_law(corpus: &[EnumTerm]) -> Outcome {
    for (j, e) in corpus.iter().enumerate() {
        let d = diag_classical(e);
        for i in 0..512 {
            ensure(d.bit(i) == 1 - e.bit(i, i), || {
                format!("enumeration {j}, position {i}")
            })?;
        }
    }
    Ok(())
}

fn reduction_law(corpus: &[EnumTerm]) -> Outcome {
    let id = FiniteSupportPerm::identity();
    for (j, e) in corpus.iter().enumerate() {
        let d = diag_classical(e).prefix(512);
        ensure(diag_perm_row(e, &id).prefix(512) == d, || {
            format!("row variant, enumeration {j}")
        })?;
        ensure(diag_perm_transversal(e, &id).prefix(512) == d, || {
            format!("transversal variant, enumeration {j}")
        })?;
    }
    Ok(())
}

fn transversal_escape(corpus: &[EnumTerm]) -> Outcome {
    for n in 0..64 {
        let p = FiniteSupportPerm::unrank(n);
        for (j, e) in corpus.iter().enumerate() {
            let y = diag_perm_transversal(e, &p);
            for k in 0..64 {
                let at = p.apply(k);
                ensure(y.bit(at) != e.bit(k, at), || {
                    format!("perm #{n}, enumeration {j}, row {k}")
                })?;
            }
        }
    }
    Ok(())
}

/// Hand-written matrix of the counterexample enumeration.
fn counterexample_entry(k: u64, i: u64) -> u8 {
    u8::from((k == i && k >= 1) || (k == 0 && i == 1))
}

fn row_variant_failure() -> Outcome {
    let ce = build_enumeration(&BuilderSpec::Counterexample);
    for k in 0..16 {
        for i in 0..16 {
            ensure(ce.bit(k, i) == counterexample_entry(k, i), || {
                format!("entry ({k}, {i})")
            })?;
        }
    }
    let rows = 64;
    let y = diag_perm_row(&ce, &t01());
    let ws = membership_scan(&y, &ce, rows, 512);
    ensure(ws[0].kind == WitnessKind::ProvenEqual, || {
        format!("row 0 verdict {}", ws[0].kind)
    })?;

    // independent oracle: y(0) = 1 − a(0,1), y(1) = 1 − a(1,0), y(i) = 1 − a(i,i)
    let y_oracle = |i: u64| match i {
        0 => 1 - counterexample_entry(0, 1),
        1 => 1 - counterexample_entry(1, 0),
        _ => 1 - counterexample_entry(i, i),
    };
    // every row k ≥ 2 has its only 1 at position k, so a horizon above
    // `rows` separates exactly the rows that are different sequences
    let equal_rows: HashSet<u64> = (0..rows)
        .filter(|&k| (0..rows + 2).all(|i| y_oracle(i) == counterexample_entry(k, i)))
        .collect();
    let proven: HashSet<u64> = ws
        .iter()
        .filter(|w| w.kind == WitnessKind::ProvenEqual)
        .map(|w| w.row)
        .collect();
    ensure(proven == equal_rows, || {
        format!("proven_equal rows {proven:?}, expected {equal_rows:?}")
    })?;
    ensure(ws.iter().all(|w| w.kind != WitnessKind::Unknown), || {
        "unresolved rows".into()
    })?;
    for w in &ws {
        if let Some(pos) = w.position {
            ensure(y.bit(pos) != ce.bit(w.row, pos), || {
                format!("unsound witness for row {}", w.row)
            })?;
        }
    }
    let yt = diag_perm_transversal(&ce, &t01());
    let wt = membership_scan(&yt, &ce, rows, 512);
    ensure(
        wt.iter().all(|w| w.kind == WitnessKind::Disagreement),
        || "transversal variant must escape".into(),
    )
}

fn z_coherence(corpus: &[EnumTerm]) -> Outcome {
    for (j, e) in corpus.iter().enumerate() {
        let z = z_direct(e);
        let y = build_y(e, Variant::Row);
        ensure(z.prefix(256) == diag_classical(&y).prefix(256), || {
            format!("enumeration {j}")
        })?;
        for k in 0..128 {
            ensure(z.bit(k) != y.bit(k, k), || {
                format!("enumeration {j}, Y row {k}")
            })?;
        }
    }
    Ok(())
}

fn tower_pairs() -> Vec<(EnumTerm, EnumTerm)> {
    let h = build_enumeration(&BuilderSpec::Hashrows { salt: 0 });
    let b = build_enumeration(&BuilderSpec::BinaryNaturals);
    vec![
        (h.clone(), build_y(&h, Variant::Row)),
        (b.clone(), build_y(&h, Variant::Transversal)),
        (full_corpus()[17].clone(), h),
    ]
}

fn tower_criterion() -> Outcome {
    for (x, y) in tower_pairs() {
        for n in 1..=16 {
            let level = tower(&x, &y, n).map_err(|e| e.to_string())?;
            for k in 0..128 {
                ensure(level.w_n.bit(k) != level.x_n.bit(k, k), || {
                    format!("w_{n} vs x_{n} row {k}")
                })?;
            }
            let next = level.next();
            ensure(next.x_n.row_prefix(0, 128) == level.w_n.prefix(128), || {
                format!("x_{} row 0 vs w_{n}", n + 1)
            })?;
        }
    }
    Ok(())
}

fn limit_criterion() -> Outcome {
    for (x, y) in tower_pairs() {
        let xi = x_infinity(&x, &y);
        for n in 1..=16u64 {
            let w = tower(&x, &y, n).map_err(|e| e.to_string())?.w_n;
            ensure(xi.row_prefix(2 * (n - 1), 128) == w.prefix(128), || {
                format!("w_{n} at row {}", 2 * (n - 1))
            })?;
        }
        let d = diag_classical(&xi);
        for k in 0..128 {
            ensure(d.bit(k) != xi.bit(k, k), || format!("limit row {k}"))?;
        }
    }
    Ok(())
}

/// Canonical perms listed block by block: bound m, tables in lexicographic
/// order, last entry not fixed.
fn perm_oracle(count: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    let mut m = 2u64;
    while out.len() < count {
        let block = (0..m)
            .permutations(m as usize)
            .filter(|t| t[m as usize - 1] != m - 1);
        out.extend(block.sorted());
        m += 1;
    }
    out.truncate(count);
    out
}

fn countability() -> Outcome {
    for n in 0..100_000 {
        let (a, b) = unpair(n);
        ensure(pair(a, b) == n, || format!("pair(unpair({n}))"))?;
    }
    for a in 0..300 {
        for b in 0..300 {
            // Cantor's formula, written out
            let expected = (a + b) * (a + b + 1) / 2 + b;
            ensure(pair(a, b) == expected && unpair(expected) == (a, b), || {
                format!("pair({a}, {b})")
            })?;
        }
    }
    let oracle = perm_oracle(500);
    let mut seen = HashSet::new();
    for (n, table) in oracle.iter().enumerate() {
        let p = FiniteSupportPerm::unrank(n as u64);
        ensure(p.table() == table.as_slice(), || {
            format!("unrank({n}) = {p}, expected {table:?}")
        })?;
        ensure(p.rank() == Ok(n as u64), || format!("rank(unrank({n}))"))?;
        ensure(seen.insert(p.clone()), || format!("unrank({n}) repeats"))?;
    }
    Ok(())
}

fn codec_criterion() -> Outcome {
    let corpus = codec_corpus();
    ensure(corpus.len() >= 100, || {
        format!("corpus has {} terms", corpus.len())
    })?;
    let h = build_enumeration(&BuilderSpec::Hashrows { salt: 0 });
    let y = build_y(&h, Variant::Row);
    let xi = Term::from(x_infinity(&h, &y));
    let w16 = Term::from(tower(&h, &y, 16).unwrap().w_n);
    ensure(corpus.contains(&xi) && corpus.contains(&w16), || {
        "corpus lacks x_infinity or w_16".into()
    })?;
    let mut codes = HashSet::new();
    for t in &corpus {
        let code = encode_term(t);
        let back = decode_term(&code).map_err(|e| format!("{t}: {e}"))?;
        ensure(&back == t, || format!("roundtrip changed {t}"))?;
        ensure(codes.insert(code.0), || format!("duplicate code for {t}"))?;
    }
    Ok(())
}

fn random_ep_input(rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<u8>) {
    let pre = (0..rng.gen_range(0..10))
        .map(|_| rng.gen_range(0..=1))
        .collect();
    let per = (0..rng.gen_range(1..10))
        .map(|_| rng.gen_range(0..=1))
        .collect();
    (pre, per)
}

fn denote(pre: &[u8], per: &[u8], len: usize) -> Vec<u8> {
    (0..len)
        .map(|i| {
            if i < pre.len() {
                pre[i]
            } else {
                per[(i - pre.len()) % per.len()]
            }
        })
        .collect()
}

/// Smallest (|pre| + |per|, |per|) description found by exhaustive search.
fn brute_normal_form(pre: &[u8], per: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let horizon = 4 * (pre.len() + per.len()) + 16;
    let target = denote(pre, per, horizon);
    for total in 1..=pre.len() + per.len() {
        for p in 1..=total {
            let l = total - p;
            let cand = (target[..l].to_vec(), target[l..l + p].to_vec());
            if denote(&cand.0, &cand.1, horizon) == target {
                return cand;
            }
        }
    }
    unreachable!("the input itself is a description")
}

fn ep_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe9);
    for case in 0..200 {
        let (pre, per) = random_ep_input(&mut rng);
        let x = EventuallyPeriodic::new(&pre, &per).map_err(|e| e.to_string())?;
        let again = EventuallyPeriodic::new(x.pre(), x.per()).map_err(|e| e.to_string())?;
        ensure(again == x, || format!("case {case}: not idempotent"))?;
        let (bp, bq) = brute_normal_form(&pre, &per);
        ensure(x.pre() == bp.as_slice() && x.per() == bq.as_slice(), || {
            format!("case {case}: {x} vs brute force {bp:?}({bq:?})")
        })?;
    }
    for case in 0..200 {
        let (pa, qa) = random_ep_input(&mut rng);
        let (pb, qb) = if case % 2 == 0 {
            // same sequence, different description
            let unroll = rng.gen_range(0..4);
            let pb = denote(&pa, &qa, pa.len() + unroll);
            let qb = denote(&pa, &qa, pb.len() + 2 * qa.len())[pb.len()..].to_vec();
            (pb, qb)
        } else {
            random_ep_input(&mut rng)
        };
        let a = EventuallyPeriodic::new(&pa, &qa).map_err(|e| e.to_string())?;
        let b = EventuallyPeriodic::new(&pb, &qb).map_err(|e| e.to_string())?;
        let bound = agreement_bound(&a, &b) as usize;
        let pointwise = denote(&pa, &qa, bound) == denote(&pb, &qb, bound);
        ensure(ep_equal(&a, &b) == pointwise, || {
            format!("pair {case}: {a} vs {b}")
        })?;
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: Box<dyn Fn() -> Outcome>,
}

fn main() -> ExitCode {
    let corpus = full_corpus();
    let c1 = corpus.clone();
    let c2 = corpus.clone();
    let c3 = corpus.clone();
    let c5 = corpus;
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = vec![
        Criterion {
            id: 1,
            name: "flip law",
            limit: secs(2),
            run: Box::new(move || flip_law(&c1)),
        },
        Criterion {
            id: 2,
            name: "reduction law",
            limit: None,
            run: Box::new(move || reduction_law(&c2)),
        },
        Criterion {
            id: 3,
            name: "transversal escape",
            limit: secs(5),
            run: Box::new(move || transversal_escape(&c3)),
        },
        Criterion {
            id: 4,
            name: "row-variant failure",
            limit: None,
            run: Box::new(row_variant_failure),
        },
        Criterion {
            id: 5,
            name: "z coherence",
            limit: None,
            run: Box::new(move || z_coherence(&c5)),
        },
        Criterion {
            id: 6,
            name: "tower",
            limit: secs(10),
            run: Box::new(tower_criterion),
        },
        Criterion {
            id: 7,
            name: "limit",
            limit: None,
            run: Box::new(limit_criterion),
        },
        Criterion {
            id: 8,
            name: "countability witnesses",
            limit: None,
            run: Box::new(countability),
        },
        Criterion {
            id: 9,
            name: "codec",
            limit: None,
            run: Box::new(codec_criterion),
        },
        Criterion {
            id: 10,
            name: "eventually periodic machinery",
            limit: None,
            run: Box::new(ep_machinery),
        },
    ];

    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&outcome, c.limit) {
            if elapsed >= limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(()) => println!("criterion {:>2} {:<30} PASS  {elapsed:.2?}", c.id, c.name),
            Err(why) => {
                failures += 1;
                println!(
                    "criterion {:>2} {:<30} FAIL  {elapsed:.2?}  {why}",
                    c.id, c.name
                );
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
