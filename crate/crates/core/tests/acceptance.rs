//! Acceptance suite. Runs every criterion, prints one line per criterion
//! and exits nonzero if any of them fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ambigraph_core::cf::cf_expand;
use ambigraph_core::classify::invariance_audit;
use ambigraph_core::diagram::{closed_path, partition_graph, successor};
use ambigraph_core::harness::{
    check_paper_examples, checked_partition, verify_case, FindingStatus, RepStatus, Scope,
    TheoremCase, TheoremId, VerdictReport,
};
use ambigraph_core::words::{
    check_word_fixes, circuit_from_path, minimal_quadratic, parse_word, proportional,
    stabilizer_word, word_to_matrix, Mat2,
};
use ambigraph_core::{partition_cf, Classifier, Element, Error, Limits};
use common::{ambiguous, corpus, el};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(label: &str, elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_secs, || {
        format!(
            "{label} took {:.2}s, limit {limit_secs}s",
            elapsed.as_secs_f64()
        )
    })
}

fn timed_verify(
    theorem: TheoremId,
    p: i64,
    k: u32,
    l: u32,
) -> Result<(VerdictReport, Duration), String> {
    let case = TheoremCase::new(theorem, p, k, l).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = verify_case(&case, &Limits::default()).map_err(|e| e.to_string())?;
    Ok((report, start.elapsed()))
}

fn expect_count(report: &VerdictReport, count: usize) -> Result<(), String> {
    check(report.computed_count == count, || {
        format!(
            "n = {}: computed {} orbits, expected {count}",
            report.n, report.computed_count
        )
    })
}

/// Both stated representatives are used verbatim and land in different orbits.
fn expect_literal_reps(report: &VerdictReport, reps: &[(i64, i64)]) -> Result<(), String> {
    let n = report.n.to_i64().unwrap();
    for (r, &(a, c)) in report.reps.iter().zip(reps) {
        check(
            r.status == RepStatus::Valid && r.element == el(a, c, n),
            || {
                format!(
                    "n = {n}: representative ({a}+√n)/{c} resolved to {:?} {}",
                    r.status, r.element
                )
            },
        )?;
    }
    check(report.reps.len() == reps.len(), || {
        format!("n = {n}: missing representatives")
    })?;
    check(report.reps_distinct == Some(true), || {
        format!("n = {n}: representatives share an orbit")
    })
}

fn criterion_1() -> Outcome {
    let mut parts = Vec::new();
    for k in [3, 5] {
        let (report, elapsed) = timed_verify(TheoremId::T2_1, 5, k, 0)?;
        expect_count(&report, 2)?;
        expect_literal_reps(&report, &[(0, 1), (1, 2)])?;
        within(&format!("n = {}", report.n), elapsed, 2.0)?;
        parts.push(format!(
            "n={} 2 orbits {:.2}s",
            report.n,
            elapsed.as_secs_f64()
        ));
    }
    Ok(parts.join(", "))
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    for (p, k) in [(3, 3), (3, 5), (7, 3), (11, 3)] {
        let (report, elapsed) = timed_verify(TheoremId::T2_3, p, k, 0)?;
        expect_count(&report, 2)?;
        expect_literal_reps(&report, &[(0, 1), (0, -1)])?;
        within(&format!("n = {}", report.n), elapsed, 2.0)?;
        parts.push(format!("n={} {:.2}s", report.n, elapsed.as_secs_f64()));
    }
    Ok(format!("2 orbits, ±√n separated: {}", parts.join(", ")))
}

fn counts_only(cases: &[(TheoremId, i64, u32, u32)], count: usize, limit: f64) -> Outcome {
    let mut parts = Vec::new();
    for &(theorem, p, k, l) in cases {
        let (report, elapsed) = timed_verify(theorem, p, k, l)?;
        expect_count(&report, count)?;
        within(&format!("n = {}", report.n), elapsed, limit)?;
        parts.push(format!("n={} {:.2}s", report.n, elapsed.as_secs_f64()));
    }
    Ok(format!("{count} orbits: {}", parts.join(", ")))
}

fn criterion_3() -> Outcome {
    counts_only(
        &[
            (TheoremId::T2_5, 5, 3, 1),
            (TheoremId::T2_6, 3, 3, 1),
            (TheoremId::T2_6, 7, 3, 1),
        ],
        2,
        2.0,
    )
}

fn criterion_4() -> Outcome {
    counts_only(
        &[(TheoremId::T2_7, 5, 3, 2), (TheoremId::T2_8, 3, 3, 2)],
        2,
        2.0,
    )
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    for (p, l) in [(3, 3), (3, 4), (5, 3), (5, 4)] {
        let (report, elapsed) = timed_verify(TheoremId::T2_9, p, 3, l)?;
        expect_count(&report, 4)?;
        let classes = report.classes.as_ref().ok_or("no class summary")?;
        check(classes.classifier == Classifier::Mod8, || {
            "wrong classifier".into()
        })?;
        let mut seen: Vec<i8> = classes.orbit_classes.iter().flatten().copied().collect();
        seen.sort();
        check(classes.homogeneous && seen == vec![1, 3, 5, 7], || {
            format!(
                "n = {}: orbit classes {:?}",
                report.n, classes.orbit_classes
            )
        })?;
        within(&format!("n = {}", report.n), elapsed, 5.0)?;
        parts.push(format!("n={} {:.2}s", report.n, elapsed.as_secs_f64()));
    }
    Ok(format!(
        "4 orbits with mod-8 classes 1,3,5,7: {}",
        parts.join(", ")
    ))
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for n in [69984i64, 139968] {
        let start = Instant::now();
        let partition = checked_partition(&ambiguous(n)).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        within(&format!("n = {n}"), elapsed, 60.0)?;
        let line = format!(
            "n={n} {} orbits {:.2}s",
            partition.count(),
            elapsed.as_secs_f64()
        );
        if partition.count() != 4 {
            failures.push(format!(
                "n = {n}: computed {} orbits, expected 4",
                partition.count()
            ));
        }
        parts.push(line);
    }
    if failures.is_empty() {
        Ok(parts.join(", "))
    } else {
        Err(format!("{} ({})", failures.join("; "), parts.join(", ")))
    }
}

fn criterion_7() -> Outcome {
    let word = parse_word("(yx)^5(y^2x)^11(yx)^6")
        .map_err(|e| e.to_string())?
        .word;
    let matrix = word_to_matrix(&word);
    check(matrix.projectively_eq(&Mat2::new(67, 341, 11, 56)), || {
        format!("matrix {matrix}")
    })?;
    let on_125 = check_word_fixes(&word, &el(1, 2, 125)).map_err(|e| e.to_string())?;
    check(on_125.fixes, || "does not fix (1,-62,2) for n = 125".into())?;
    let on_3125 = check_word_fixes(&word, &el(1, 2, 3125)).map_err(|e| e.to_string())?;
    check(!on_3125.fixes, || {
        "unexpectedly fixes (1,-1562,2) for n = 3125".into()
    })?;
    let examples = check_paper_examples().map_err(|e| e.to_string())?;
    let finding = examples
        .findings
        .iter()
        .find(|f| f.id == "2.2-word-2")
        .ok_or("example audit lacks the word finding")?;
    check(
        finding.status == FindingStatus::Errata && examples.has_errata(),
        || "example audit did not flag the word".into(),
    )?;
    Ok(format!(
        "matrix {matrix}, fixes (1,-62,2|125), not (1,-1562,2|3125); erratum emitted"
    ))
}

fn criterion_8() -> Outcome {
    let plus = el(0, 1, 243);
    let minus = el(0, -1, 243);
    let expected = [30u64, 1, 1, 2, 3, 15, 3, 2, 1, 1];
    let word = stabilizer_word(&plus).map_err(|e| e.to_string())?;
    check(
        check_word_fixes(&word, &plus)
            .map_err(|e| e.to_string())?
            .fixes,
        || format!("stabilizer word {word} does not fix {plus}"),
    )?;
    let circuit_plus = circuit_from_path(&closed_path(&plus).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let circuit_minus = circuit_from_path(&closed_path(&minus).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    check(circuit_plus.matches_cyclic(&expected), || {
        format!("circuit of {plus} is {circuit_plus}")
    })?;
    check(circuit_plus == circuit_minus, || {
        format!("circuits differ: {circuit_plus} vs {circuit_minus}")
    })?;
    let partition = checked_partition(&ambiguous(243)).map_err(|e| e.to_string())?;
    check(
        partition.orbit_of(&plus) != partition.orbit_of(&minus),
        || "±9√3 share an orbit".into(),
    )?;
    Ok(format!("circuit {circuit_plus} for both, orbits distinct"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let ns = corpus(1500);
    for n in &ns {
        let set = ambiguous(n.clone());
        let graph = partition_graph(&set).map_err(|e| e.to_string())?;
        let cf = partition_cf(&set).map_err(|e| e.to_string())?;
        check(graph.same_components(&cf), || {
            format!(
                "n = {n}: graph {} orbits, cf {} orbits, first disagreement {:?}",
                graph.count(),
                cf.count(),
                graph.first_disagreement(&cf).map(|e| e.to_string())
            )
        })?;
    }
    let elapsed = start.elapsed();
    within("corpus", elapsed, 120.0)?;
    Ok(format!(
        "{} values of n agree, {:.1}s total",
        ns.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_10() -> Outcome {
    let mut audits = 0;
    let mut moves = 0;
    for n in [125i64, 243, 250, 54, 216, 1000] {
        let set = ambiguous(n);
        let classifiers = Classifier::applicable_to(&BigInt::from(n));
        check(!classifiers.is_empty(), || {
            format!("no classifier for n = {n}")
        })?;
        for classifier in classifiers {
            let report = invariance_audit(&set, &classifier, 20, 0).map_err(|e| e.to_string())?;
            check(report.passed(), || {
                format!(
                    "n = {n}, {}: {} violations, first {:?}",
                    classifier.key(),
                    report.violations.len(),
                    report.violations.first()
                )
            })?;
            audits += 1;
            moves += report.moves_checked;
        }
    }
    Ok(format!("{audits} audits, {moves} moves, 0 violations"))
}

fn criterion_11() -> Outcome {
    let mut orbits = 0;
    for n in corpus(1500) {
        let partition = partition_graph(&ambiguous(n.clone())).map_err(|e| e.to_string())?;
        for orbit in partition.orbits() {
            let rep = orbit.representative();
            let word = stabilizer_word(rep).map_err(|e| e.to_string())?;
            let verdict = check_word_fixes(&word, rep).map_err(|e| e.to_string())?;
            check(
                verdict.fixes
                    && !word.is_identity()
                    && proportional(&verdict.fixed_quadratic, &minimal_quadratic(rep)),
                || format!("{word} does not stabilize {rep}"),
            )?;
            orbits += 1;
        }
    }
    Ok(format!("{orbits} orbit representatives stabilized"))
}

/// The continued fraction cycle of `e`, reversed when `c > 0`, doubled when
/// its length is odd.
fn oriented_cycle(e: &Element) -> Result<Vec<u64>, String> {
    let expansion = cf_expand(e).map_err(|e| e.to_string())?;
    let mut cycle: Vec<u64> = expansion
        .cycle()
        .iter()
        .map(|q| q.to_u64().ok_or_else(|| format!("partial quotient {q}")))
        .collect::<Result<_, _>>()?;
    if e.c().is_positive() {
        cycle.reverse();
    }
    if cycle.len() % 2 == 1 {
        cycle.extend(cycle.clone());
    }
    Ok(cycle)
}

fn criterion_12() -> Outcome {
    let ns = corpus(1500);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..500 {
        let n = &ns[rng.gen_range(0..ns.len())];
        let set = ambiguous(n.clone());
        let e = &set.elements()[rng.gen_range(0..set.len())];
        let circuit = circuit_from_path(&closed_path(e).map_err(|x| x.to_string())?)
            .map_err(|x| x.to_string())?;
        let cycle = oriented_cycle(e)?;
        check(circuit.matches_cyclic(&cycle), || {
            format!("{e}: circuit {circuit}, continued fraction cycle {cycle:?}")
        })?;
    }
    Ok("500 seeded elements (seed 0) match".to_string())
}

fn criterion_13() -> Outcome {
    let mut checked = 0usize;
    for n in corpus(1500) {
        for e in &ambiguous(n) {
            match successor(e) {
                Ok(_) => checked += 1,
                Err(err @ Error::DichotomyViolation(_)) => {
                    return Err(format!("reproducer: {err}"));
                }
                Err(err) => return Err(err.to_string()),
            }
        }
    }
    Ok(format!("{checked} ambiguous elements, 0 violations"))
}

fn criterion_14() -> Outcome {
    let (report, elapsed) = timed_verify(TheoremId::T2_1, 17, 3, 0)?;
    check(report.scope == Scope::Exploratory, || {
        format!("scope {:?}", report.scope)
    })?;
    check(
        report.notes.iter().any(|n| n.contains("degeneracy")),
        || "no degeneracy note".into(),
    )?;
    check(report.expected_count == Some(2), || {
        "expectation missing".into()
    })?;
    Ok(format!(
        "n={} computed {} orbits (sizes {:?}), degeneracy noted, {:.2}s",
        report.n,
        report.computed_count,
        report.orbit_sizes,
        elapsed.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("orbit counts for p^k, p = 1 mod 4", criterion_1),
        ("orbit counts for p^k, p = 3 mod 4", criterion_2),
        ("orbit counts for 2p^k", criterion_3),
        ("orbit counts for 4p^k", criterion_4),
        ("four orbits and mod-8 classes for 2^l p^k", criterion_5),
        ("four orbits for 2^5 3^7 and 2^6 3^7", criterion_6),
        ("word matrix and fixed point for n = 125", criterion_7),
        ("circuit of 9√3 and its conjugate", criterion_8),
        ("graph and continued fraction partitions agree", criterion_9),
        ("classifier invariance audits", criterion_10),
        ("stabilizer words fix their representatives", criterion_11),
        ("circuits match continued fraction cycles", criterion_12),
        ("successor dichotomy", criterion_13),
        ("exploratory p = 17 verdict", criterion_14),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (index, (title, run)) in criteria.iter().enumerate() {
        let number = index + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &number.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|payload| {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            Err(format!("panicked: {message}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {number:>2} PASS ({secs:.2}s) {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {number:>2} FAIL ({secs:.2}s) {title}: {detail}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
