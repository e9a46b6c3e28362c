//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use ellchain::construct::{odd_split_prefix, requires_external_stability};
use ellchain::search::{enumerate, SearchSpace};
use ellchain::stability::{check_stable_generic, KillReason};
use ellchain::sweep::{sweep, to_csv};
use ellchain::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid() -> Vec<(u32, u32)> {
    (2..=8u32)
        .flat_map(|k| (theorem_threshold(k)..=30).map(move |g| (g, k)))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dimension_identity() -> Outcome {
    let cells = grid();
    for &(g, k) in &cells {
        let s = construct(g, k, false).map_err(|e| format!("({g},{k}): {e}"))?;
        let l = count_dimension(&s).map_err(|e| format!("({g},{k}): {e}"))?;
        let rho = rho_canonical(g.into(), k.into());
        ensure(l.total == rho, || {
            format!("({g},{k}): ledger {} != rho {rho}", l.total)
        })?;
    }
    Ok(format!("{} cells, ledger total = rho_K", cells.len()))
}

fn validators_and_mutations() -> Outcome {
    let cells = grid();
    let mut mutations = 0;
    for &(g, k) in &cells {
        let s = construct(g, k, false).map_err(|e| e.to_string())?;
        let report = validate_all(&s);
        ensure(report.passed() && report.tight, || {
            format!("({g},{k}):\n{report}")
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64((u64::from(g) << 8) | u64::from(k));
        for _ in 0..100 {
            let mut m = s.clone();
            let i = rng.gen_range(0..m.components.len());
            let j = rng.gen_range(0..m.k);
            let delta = if rng.gen_bool(0.5) { 1 } else { -1 };
            let row = &mut m.components[i].table.rows[j];
            if rng.gen_bool(0.5) {
                row.u += delta;
            } else {
                row.v += delta;
            }
            ensure(!validate_all(&m).passed(), || {
                format!(
                    "({g},{k}): mutation C{} row {} {delta:+} not caught",
                    i + 1,
                    j + 1
                )
            })?;
            mutations += 1;
        }
    }
    Ok(format!(
        "{} cells pass with node equality; {mutations} seeded mutations all caught",
        cells.len()
    ))
}

fn closed_forms() -> Outcome {
    let mut n = 0;
    for (g, k) in grid().into_iter().filter(|(_, k)| k % 2 == 0) {
        let s = construct_even(g, k).map_err(|e| e.to_string())?;
        let (gi, k1) = (i64::from(g), i64::from(k / 2));
        // Independent summation straight from the series data.
        let gluing: i64 = s
            .nodes
            .iter()
            .map(|n| 4 - n.forced_pairs.len() as i64)
            .sum();
        let moduli: i64 = s
            .components
            .iter()
            .map(|c| i64::from(c.moduli_freedom))
            .sum();
        let endo: i64 = s
            .components
            .iter()
            .map(|c| match &c.bundle {
                Bundle::RankTwo(RankTwoBundle::Split { first, second })
                    if first == second && !c.is_free() =>
                {
                    4
                }
                _ => 2,
            })
            .sum();
        let total = gluing + moduli - endo + 1;
        ensure(gluing == 4 * gi - k1 * k1 + k1 - 4, || {
            format!("({g},{k}): gluing subtotal {gluing}")
        })?;
        ensure(total == 3 * gi - 2 * k1 * k1 - k1 - 3, || {
            format!("({g},{k}): total {total}")
        })?;
        let ledger = count_dimension(&s).map_err(|e| e.to_string())?;
        ensure(
            ledger.gluing_subtotal() == gluing && ledger.total == total,
            || format!("({g},{k}): ledger disagrees with direct summation"),
        )?;
        n += 1;
    }
    Ok(format!(
        "{n} even cells match 4g-k1^2+k1-4 and 3g-2k1^2-k1-3"
    ))
}

fn numerology() -> Outcome {
    ensure(rho_canonical(11, 7) == 2, || "rho_K(11,7) != 2".into())?;
    for k1 in 1..=10u32 {
        let even = match k1 {
            1 => 3,
            2 => 5,
            _ => k1 * k1,
        };
        ensure(theorem_threshold(2 * k1) == even, || {
            format!("even threshold k1 = {k1}")
        })?;
        ensure(theorem_threshold(2 * k1 + 1) == k1 * k1 + k1 + 1, || {
            format!("odd threshold k1 = {k1}")
        })?;
        let (lo, hi) = corollary_range(2 * k1).map_err(|e| e.to_string())?;
        ensure((lo, hi) == (k1 * k1, 2 * k1 * k1 - k1), || {
            format!("even interval k1 = {k1}")
        })?;
        let (lo2, hi2) = corollary_range(2 * k1 + 1).map_err(|e| e.to_string())?;
        ensure((lo2, hi2) == (k1 * k1 + k1 + 1, 2 * k1 * k1 + k1), || {
            format!("odd interval k1 = {k1}")
        })?;
        for (k, lo, hi) in [(2 * k1, lo, hi), (2 * k1 + 1, lo2, hi2)] {
            for g in lo.max(theorem_threshold(k))..hi {
                let (gi, ki) = (i64::from(g), i64::from(k));
                ensure(
                    rho_canonical(gi, ki) > rho_general(2, 2 * gi - 2, gi, ki),
                    || format!("excess fails at ({g},{k})"),
                )?;
            }
        }
    }
    Ok("rho_K(11,7) = 2; thresholds and excess intervals for k1 = 1..10".into())
}

fn oracle_membership() -> Outcome {
    let mut found = Vec::new();
    for (g, k) in [(3u32, 2u32), (4, 2), (5, 4), (6, 4)] {
        let rep =
            enumerate(&SearchSpace::new(g, 2, k as usize), Some(0)).map_err(|e| e.to_string())?;
        let s = construct_even(g, k).map_err(|e| e.to_string())?;
        ensure(rep.contains(&s), || {
            format!("construction ({g},{k}) missing")
        })?;
        found.push(format!("({g},{k}):{}", rep.count));
    }
    let prefix = odd_split_prefix(&construct_odd(7, 3).map_err(|e| e.to_string())?)
        .ok_or("no odd prefix")?;
    let rep = enumerate(
        &SearchSpace::new(7, 2, 3).with_length(prefix.chain.length()),
        Some(0),
    )
    .map_err(|e| e.to_string())?;
    ensure(rep.contains(&prefix), || "odd prefix (7,3) missing".into())?;
    found.push(format!("(7,3) prefix:{}", rep.count));
    for g in 2..=10u32 {
        let rep =
            enumerate(&SearchSpace::new(g, 1, g as usize), None).map_err(|e| e.to_string())?;
        ensure(rep.count == 1, || {
            format!("rank one g = {g}: {} solutions", rep.count)
        })?;
        let canon = canonical_limit_series(g).map_err(|e| e.to_string())?;
        ensure(rep.contains(&canon), || {
            format!("rank one g = {g}: canonical series missing")
        })?;
    }
    Ok(format!(
        "found in {} (solution counts); rank one unique for g = 2..10",
        found.join(" ")
    ))
}

fn stability() -> Outcome {
    let mut n = 0;
    for (g, k) in grid() {
        if requires_external_stability(g, k) {
            continue;
        }
        let s = construct(g, k, false).map_err(|e| e.to_string())?;
        let r = check_stable_generic(&s);
        ensure(r.verdict == Verdict::Stable, || {
            format!("({g},{k}): {}", r.verdict)
        })?;
        n += 1;
    }
    let r = check_stable_generic(&construct_even(5, 4).map_err(|e| e.to_string())?);
    let last = r.breaking_nodes().last().ok_or("g=5,k=4: nothing breaks")?;
    ensure(
        last.node == 4 && last.alive_after == 0 && last.alive_before > 0,
        || format!("g=5,k=4: last break at node {}", last.node),
    )?;
    ensure(
        last.killed.keys().all(|r| *r == KillReason::GenericFree),
        || "g=5,k=4: node 4 kills are not from the generic gluing".into(),
    )?;
    Ok(format!(
        "{n} cells stable; g=5,k=4: {} surviving chains killed at node 4 (C4-C5)",
        last.alive_before
    ))
}

fn determinism() -> Outcome {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(|| to_csv(&sweep(3..=12, 2..=6)))
    };
    let base = run(1);
    for threads in [1, 2, 4, 8] {
        ensure(run(threads) == base, || {
            format!("sweep CSV differs with {threads} threads")
        })?;
    }
    let lines = base.lines().count() - 1;
    let count = |threads| {
        enumerate(&SearchSpace::new(6, 2, 4).with_threads(threads), Some(0)).map(|r| {
            (
                r.count,
                r.nodes_expanded,
                r.keys().map(str::to_owned).collect::<Vec<_>>(),
            )
        })
    };
    let first = count(1).map_err(|e| e.to_string())?;
    for threads in [2, 4, 8] {
        ensure(count(threads).map_err(|e| e.to_string())? == first, || {
            format!("search (6,4) differs with {threads} threads")
        })?;
    }
    Ok(format!(
        "sweep CSV ({lines} rows) and search (6,4) count {} identical for 1/2/4/8 workers",
        first.0
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("dimension identity", dimension_identity),
        ("validator suite and mutations", validators_and_mutations),
        ("closed-form cross-checks", closed_forms),
        ("numerology", numerology),
        ("oracle membership", oracle_membership),
        ("stability", stability),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.2}s) - {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.2}s) - {detail}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
