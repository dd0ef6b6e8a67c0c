//! End-to-end acceptance checks, one line per criterion. Exits nonzero if
//! any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;

use qcpn::dirac::{build_dirac, commutator_norm, polynomial_degree, spectrum, summability_trace};
use qcpn::khomology::{
    alternating_sum_identity, doubling_ratio, evaluate, overlap_count, pairing, pairing_matrix, shell_sums,
};
use qcpn::ktheory::{projection, qtrace, verify_projection};
use qcpn::ncalgebra::p;
use qcpn::ncalgebra::relations::{check_overlaps, sphere_relations, verify_cp_relations};
use qcpn::repspace::{in_constraint, rep_raw, ConstraintSet, Scalar, SparseOperator, Surd, TruncatedSpace};

const PAIRING_QS: [f64; 3] = [0.3, 0.5, 0.8];
const PAIRING_DISTANCE: f64 = 1e-6;
const PAIRING_BUDGET: Duration = Duration::from_secs(600);
const FLOAT_RELATION_TOLERANCE: f64 = 1e-12;
const DECAY_RELATIVE: f64 = 0.10;
const NORM_DRIFT: f64 = 0.01;
const ZETA_TOLERANCE: f64 = 1e-2;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn pairing_integers() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for q0 in PAIRING_QS {
        for n in 0..=3 {
            for k in 0..=n {
                for big_n in 0..=3u32 {
                    count += 1;
                    match pairing(n, k, big_n, q0, None) {
                        Ok(r) => {
                            worst = worst.max(r.distance());
                            let expect = binomial(big_n as u64, k as u64) as i64;
                            if !r.certified || r.rounded != expect || r.distance() >= PAIRING_DISTANCE {
                                bad.push(format!("(n={n},k={k},N={big_n},q={q0}) -> {}", r.value));
                            }
                        }
                        Err(e) => bad.push(format!("(n={n},k={k},N={big_n},q={q0}): {e}")),
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = bad.is_empty() && elapsed < PAIRING_BUDGET;
    outcome(
        passed,
        format!(
            "{count} pairings, worst |value - binom| {worst:.1e}, {:.1}s of {}s budget{}",
            elapsed.as_secs_f64(),
            PAIRING_BUDGET.as_secs(),
            if bad.is_empty() { String::new() } else { format!("; failures {bad:?}") }
        ),
    )
}

fn unimodularity() -> Outcome {
    let mut notes = Vec::new();
    let mut passed = true;
    for n in 0..=3 {
        match pairing_matrix(n, 0.5, None) {
            Ok(m) => {
                if !(m.is_binomial() && m.inverse_checks()) {
                    passed = false;
                    notes.push(format!("n={n} matrix or inverse wrong"));
                }
            }
            Err(e) => {
                passed = false;
                notes.push(format!("n={n}: {e}"));
            }
        }
    }
    let mut sums = 0;
    for i in 0..=10usize {
        for j in 0..=i {
            sums += 1;
            if alternating_sum_identity(i, j) != BigInt::from(u8::from(i == j)) {
                passed = false;
                notes.push(format!("alternating sum ({i},{j})"));
            }
        }
    }
    let mut detail = format!("M M^-1 = I for n <= 3, {sums} alternating sums checked");
    if !notes.is_empty() {
        detail += &format!("; {notes:?}");
    }
    outcome(passed, detail)
}

fn projector_suite() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = Vec::new();
    for n in 1..=19usize {
        for abs_n in 1i64.. {
            if binomial(abs_n as u64 + n as u64, n as u64) > 20 {
                break;
            }
            for big_n in [abs_n, -abs_n] {
                cases += 1;
                let clean = projection(big_n, n)
                    .and_then(|p| verify_projection(&p))
                    .map(|r| r.is_clean());
                if clean != Ok(true) {
                    bad.push(format!("(N={big_n},n={n}): {clean:?}"));
                }
            }
        }
    }
    for n in 1..=3 {
        let one = projection(1, n).map(|p| qtrace(&p).is_one());
        if one != Ok(true) {
            bad.push(format!("q-trace of P_1 on CP^{n}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{cases} projections with zero residuals, q-trace of P_1 = 1 for n <= 3, {:.1}s {}",
            start.elapsed().as_secs_f64(),
            if bad.is_empty() { String::new() } else { format!("{bad:?}") }
        ),
    )
}

fn represented_residuals<S: Scalar>(n: usize, cutoff: u32, q: &S::Param, tolerance: Option<f64>) -> Vec<String> {
    let space = TruncatedSpace::new(n, cutoff).expect("small box");
    let mut bad = Vec::new();
    for rel in sphere_relations(n) {
        for k in 0..=n {
            let op: SparseOperator<S> = rep_raw(&rel.difference(), k, &space, q).expect("represents");
            let inner = op.restrict_cols(|c| space.is_interior(space.index(c), 1));
            let fails = match tolerance {
                None => !inner.is_zero(),
                Some(t) => inner.max_abs() > t,
            };
            if fails {
                bad.push(format!("n={n} level {k}: {}", rel.label));
            }
        }
    }
    bad
}

fn relation_suites() -> Outcome {
    let mut bad = Vec::new();
    let mut sphere = 0;
    let mut projective = 0;
    for n in 0..=3 {
        for rel in sphere_relations(n) {
            sphere += 1;
            if !rel.residual().map(|r| r.is_zero()).unwrap_or(false) {
                bad.push(format!("sphere n={n} {}", rel.label));
            }
        }
        if n >= 1 {
            let report = verify_cp_relations(n, usize::MAX).expect("n >= 1");
            projective += report.families.iter().map(|f| f.checked).sum::<usize>();
            if !report.is_clean() {
                bad.push(format!("projective n={n}"));
            }
        }
        if !check_overlaps(n).map(|o| o.unresolved.is_empty()).unwrap_or(false) {
            bad.push(format!("overlaps n={n}"));
        }
        let cutoff = [7, 6, 5, 4][n];
        let half = BigRational::new(1.into(), 2.into());
        bad.extend(represented_residuals::<Surd>(n, cutoff, &half, None));
        bad.extend(represented_residuals::<f64>(n, cutoff, &0.5, Some(FLOAT_RELATION_TOLERANCE)));
    }
    outcome(
        bad.is_empty(),
        format!(
            "{sphere} sphere and {projective} projective relations normalize to zero; represented residuals exact at q = 1/2 and below {FLOAT_RELATION_TOLERANCE:e} in floats {}",
            if bad.is_empty() { String::new() } else { format!("{bad:?}") }
        ),
    )
}

fn support_lemma() -> Outcome {
    let mut bad = Vec::new();
    let mut vectors = 0;
    for n in 1..=4 {
        let space = TruncatedSpace::new(n, 12).expect("box");
        for m in space.basis() {
            vectors += 1;
            let level: Vec<bool> = (0..=n).map(|k| in_constraint(m, ConstraintSet::Level(k))).collect();
            for j in 0..=n {
                for k in j + 2..=n {
                    if level[j] && level[k] {
                        bad.push(format!("{m} in V_{j} and V_{k}"));
                    }
                }
            }
            for k in 1..=n {
                if (level[k - 1] && level[k]) != in_constraint(m, ConstraintSet::Overlap(k)) {
                    bad.push(format!("{m}: overlap at {k}"));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{vectors} basis vectors at cutoff 12, n <= 4 {}", if bad.is_empty() { String::new() } else { format!("{:?}", &bad[..bad.len().min(5)]) }),
    )
}

fn trace_class_decay() -> Outcome {
    let mut counts_ok = true;
    for n in 1..=4 {
        let space = TruncatedSpace::new(n, 12).expect("box");
        for k in 1..=n {
            let mut counts = [0u64; 13];
            for (_, m) in space.members(ConstraintSet::Overlap(k)) {
                counts[m.get(k) as usize] += 1;
            }
            counts_ok &= counts.iter().enumerate().all(|(t, &c)| c == overlap_count(n, k, t as u64));
        }
    }
    let mut ratios_ok = true;
    let mut notes = Vec::new();
    for q0 in [0.5f64, 0.8] {
        // largest doubling base whose increments stay well above rounding
        let base = [8u32, 4, 2].into_iter().find(|&c| q0.powi(8 * c as i32) > 1e-9).unwrap_or(2);
        for n in 1..=2 {
            for i in 0..=n {
                for j in 0..=n {
                    let x = evaluate(&p(n, i, j).expect("generator"), n, q0).expect("pullback");
                    if i != j {
                        let zero = shell_sums(&x, q0, 4 * base).expect("trace").iter().all(|&s| s == 0.0);
                        ratios_ok &= zero;
                        continue;
                    }
                    let rho = doubling_ratio(&x, q0, base).expect("trace");
                    ratios_ok &= (rho - q0).abs() <= DECAY_RELATIVE * q0;
                    notes.push(format!("q={q0} n={n} p_{i}{i}: ratio {rho:.4} (q^2 = {:.4})", q0 * q0));
                }
            }
        }
    }
    outcome(
        counts_ok && ratios_ok,
        format!(
            "shell counts {} for t <= 12, n <= 4; tail ratio within {:.0}% of q: {}; measured {notes:?}",
            if counts_ok { "match" } else { "MISMATCH" },
            DECAY_RELATIVE * 100.0,
            if ratios_ok { "yes" } else { "no, partial traces decay like q^2 per step" }
        ),
    )
}

fn dirac_diagnostics() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=4 {
        for cutoff in [1u32, 3, 6] {
            for d in [1.0, n as f64, 2.5] {
                let dirac = build_dirac(n, d, TruncatedSpace::new(n, cutoff).expect("box")).expect("d > 0");
                if !dirac.check().is_clean() {
                    bad.push(format!("D checks n={n} cutoff={cutoff} d={d}"));
                }
            }
        }
        let counts = spectrum(n, 20, 20).expect("complete");
        let values: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
        if polynomial_degree(&values) != Some(n - 1) {
            bad.push(format!("multiplicity degree n={n}"));
        }
    }
    let mut worst_drift: f64 = 0.0;
    let mut generators = 0;
    for n in 1..=3 {
        for i in 0..=n {
            for j in 0..=n {
                generators += 1;
                match commutator_norm(i, j, n, 0.5, &[40, 80], 0) {
                    Ok(r) => {
                        let drift = (r[0].norm - r[1].norm).abs() / r[0].norm.max(r[1].norm);
                        worst_drift = worst_drift.max(drift);
                        if drift > NORM_DRIFT || !r.iter().all(|e| e.converged) {
                            bad.push(format!("commutator n={n} p_{i}{j}: {r:?}"));
                        }
                    }
                    Err(e) => bad.push(format!("commutator n={n} p_{i}{j}: {e}")),
                }
            }
        }
    }
    let zeta = summability_trace(1, 1.0, 2.0, 1000).expect("s > 0");
    let zeta_gap = (zeta - std::f64::consts::PI.powi(2) / 6.0).abs();
    if zeta_gap > ZETA_TOLERANCE {
        bad.push(format!("zeta partial sum {zeta}"));
    }
    outcome(
        bad.is_empty(),
        format!(
            "D = D*, F^2 = 1, gamma D = -D gamma exact; multiplicity degree n-1 for n <= 4; {generators} commutator norms, worst drift {worst_drift:.1e} between cutoffs 40 and 80; zeta(2) gap {zeta_gap:.1e} {}",
            if bad.is_empty() { String::new() } else { format!("{bad:?}") }
        ),
    )
}

fn determinism() -> Outcome {
    let configs: [&[&str]; 6] = [
        &["pair", "--n", "2", "--k", "1", "--N", "2", "--q", "0.5", "--cutoff", "64"],
        &["pair", "--n", "3", "--k", "2", "--N", "3", "--q", "0.8", "--format", "text"],
        &["verify-relations", "--n", "2", "--q", "1/2"],
        &["verify-projection", "--N", "-2", "--n", "2"],
        &["spectrum", "--n", "3", "--format", "csv"],
        &["commutators", "--n", "2", "--cutoffs", "20,40", "--seed", "11"],
    ];
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_qcpn"))
            .args(args)
            .output()
            .map(|o| (o.status.code(), o.stdout))
    };
    let mut bad = Vec::new();
    for args in configs {
        match (run(args), run(args)) {
            (Ok(a), Ok(b)) if a == b && a.0 == Some(0) => {}
            _ => bad.push(args.join(" ")),
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} configurations run twice, byte-identical reports {}", configs.len(), if bad.is_empty() { String::new() } else { format!("{bad:?}") }),
    )
}

fn main() -> ExitCode {
    type Check = (&'static str, fn() -> Outcome);
    let criteria: [Check; 8] = [
        ("pairing integers", pairing_integers),
        ("generator matrix unimodular", unimodularity),
        ("symbolic projector suite", projector_suite),
        ("relation suites", relation_suites),
        ("support lemma", support_lemma),
        ("trace-class decay", trace_class_decay),
        ("dirac diagnostics", dirac_diagnostics),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!("criterion {} [{}] {name}: {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail.trim_end());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
