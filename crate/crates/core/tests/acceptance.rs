//! Acceptance campaign. Prints one PASS/FAIL line per criterion and fails
//! if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::time::{Duration, Instant};

use couplings::campaign::{stratified_pairs, uniform_scenarios};
use couplings::conditionalization::Stratum;
use couplings::connections::DEFAULT_MAX_DENOMINATOR;
use couplings::coupling::pair_coupling_range_lp;
use couplings::inequalities::DEFAULT_TOLERANCE;
use couplings::rational::{int, rat, Rational};
use couplings::{
    bell_ch_fine, classify, identity_coupling_exists, pair_coupling_range, quantum_arcsin,
    realizability_check, satisfies_s1_prime, singlet_correlations, test_equivalent, test_forcing,
    tsirelson, uninformativeness_report_pairs, ConnectionVector, CorrelationVector, Family,
    SettingVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: u64 = 100;

struct Outcome {
    passed: bool,
    detail: String,
}

/// Name, check and runtime budget.
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn fine_biconditional() -> Outcome {
    let scenarios = uniform_scenarios(1, 1000);
    let mut agree = 0;
    let mut bell = 0;
    for s in &scenarios {
        let satisfied = bell_ch_fine(&s.correlations()).satisfied;
        bell += usize::from(satisfied);
        let v = identity_coupling_exists(s);
        let witness_ok = v.witness.as_ref().is_none_or(|w| w.reproduces(s));
        agree += usize::from(v.feasible == satisfied && witness_ok);
    }
    outcome(
        agree == 1000 && bell > 0 && bell < 1000,
        format!("agreement {agree}/1000 ({bell} Bell-satisfying)"),
    )
}

fn in_plane(angle: f64) -> SettingVector {
    SettingVector::new(angle.cos(), angle.sin(), 0.0).unwrap()
}

fn tsirelson_saturation() -> Outcome {
    let c = singlet_correlations(
        &in_plane(0.0),
        &in_plane(FRAC_PI_2),
        &in_plane(FRAC_PI_4),
        &in_plane(-FRAC_PI_4),
    );
    let chsh = tsirelson(&c).max_lhs;
    let arcsin = quantum_arcsin(&c).max_lhs;
    let bell = bell_ch_fine(&c).satisfied;
    outcome(
        (chsh - 2.0 * SQRT_2).abs() <= 1e-12 && (arcsin - PI).abs() <= 1e-12 && !bell,
        format!("CHSH {chsh:.15}, arcsin {arcsin:.15}, Bell satisfied {bell}"),
    )
}

fn sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    for k in 0..10_000 {
        let c = if k % 2 == 0 {
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
            CorrelationVector::from_f64(v, 0.0).unwrap()
        } else {
            let e: [Rational; 4] = std::array::from_fn(|_| rat(rng.gen_range(-1000..=1000), 1000));
            CorrelationVector::from_rationals(e).unwrap()
        };
        let k = classify(&c);
        if (k.bell && !k.quantum) || (k.quantum && !k.tsirelson) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations in 10000"))
}

fn frechet_range() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut agree = 0;
    for _ in 0..1000 {
        let p = rat(rng.gen_range(0..=97), 97);
        let q = rat(rng.gen_range(0..=1000), 1000);
        let closed = pair_coupling_range(&p, &q).unwrap();
        let lp = pair_coupling_range_lp(&p, &q).unwrap();
        agree += usize::from(closed == lp);
    }
    outcome(agree == 1000, format!("agreement {agree}/1000"))
}

fn uninformativeness() -> Outcome {
    let pairs = stratified_pairs(5, 100);
    let report = uninformativeness_report_pairs(&pairs).unwrap();
    let strata = report.by_stratum();
    let all_present = Stratum::ALL.iter().all(|s| strata.contains_key(s));
    let per: Vec<String> = strata
        .iter()
        .map(|(s, (ok, total))| format!("{} {ok}/{total}", s.name()))
        .collect();
    outcome(
        all_present && report.attempted() == 1500 && report.succeeded() == 1500,
        per.join(", "),
    )
}

fn s1_on_sign_vectors() -> Outcome {
    let mut agree = 0;
    let mut equivalent = 0;
    for mask in 0..16u32 {
        let conn = ConnectionVector::new(std::array::from_fn(|k| {
            if mask >> k & 1 == 1 {
                int(-1)
            } else {
                int(1)
            }
        }))
        .unwrap();
        let verdict = test_equivalent(Some(&conn), Family::Bell, 6, N)
            .unwrap()
            .verdict;
        let even = (4 - mask.count_ones()) % 2 == 0;
        equivalent += usize::from(verdict);
        agree += usize::from(verdict == satisfies_s1_prime(&conn) && verdict == even);
    }
    outcome(
        agree == 16 && equivalent == 8,
        format!("agreement {agree}/16, equivalent {equivalent}"),
    )
}

fn random_connection_vector<R: Rng>(rng: &mut R) -> ConnectionVector {
    if rng.gen_bool(0.25) {
        ConnectionVector::new(std::array::from_fn(|_| {
            if rng.gen_bool(0.5) {
                int(1)
            } else {
                int(-1)
            }
        }))
        .unwrap()
    } else {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        ConnectionVector::from_f64(v, DEFAULT_MAX_DENOMINATOR).unwrap()
    }
}

fn s3_never_equivalent() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut not_equivalent = 0;
    for k in 0..100 {
        let conn = random_connection_vector(&mut rng);
        let r = test_equivalent(Some(&conn), Family::Quantum, 7_000 + k, N).unwrap();
        not_equivalent += usize::from(!r.verdict && r.counterexample.is_some());
    }
    outcome(
        not_equivalent == 100,
        format!("not equivalent {not_equivalent}/100"),
    )
}

fn s4_forcing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut agree = 0;
    let mut forced = 0;
    for k in 0..50 {
        let conn = random_connection_vector(&mut rng);
        let q = test_forcing(Some(&conn), Family::Quantum, 8_000 + k, N).unwrap();
        let b = test_forcing(Some(&conn), Family::Bell, 8_000 + k, N).unwrap();
        agree += usize::from(q.verdict == b.verdict);
        forced += usize::from(b.verdict);
    }
    outcome(
        agree == 50,
        format!("agreement {agree}/50 ({forced} forcing)"),
    )
}

fn realizability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ok = 0;
    for _ in 0..1000 {
        let [a1, a2, b1, b2]: [SettingVector; 4] =
            std::array::from_fn(|_| SettingVector::random(&mut rng));
        let c = singlet_correlations(&a1, &a2, &b1, &b2);
        ok += usize::from(
            realizability_check(&c) && quantum_arcsin(&c).max_lhs <= PI + DEFAULT_TOLERANCE,
        );
    }
    outcome(ok == 1000, format!("realizable {ok}/1000"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "1 identity coupling iff Bell",
            fine_biconditional,
            Duration::from_secs(30),
        ),
        (
            "2 Tsirelson saturation",
            tsirelson_saturation,
            Duration::from_secs(1),
        ),
        ("3 sandwich", sandwich, Duration::from_secs(5)),
        (
            "4 pair coupling range",
            frechet_range,
            Duration::from_secs(10),
        ),
        (
            "5 conditionalization",
            uninformativeness,
            Duration::from_secs(10),
        ),
        (
            "6 S1 on sign vectors",
            s1_on_sign_vectors,
            Duration::from_secs(60),
        ),
        (
            "7 S3 arcsin never equivalent",
            s3_never_equivalent,
            Duration::from_secs(300),
        ),
        (
            "8 S4 forcing arcsin iff Bell",
            s4_forcing,
            Duration::from_secs(300),
        ),
        (
            "9 singlet realizability",
            realizability,
            Duration::from_secs(2),
        ),
    ];
    let mut failed = Vec::new();
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let status = if o.passed { "PASS" } else { "FAIL" };
        let over = if elapsed > budget {
            " (over budget)"
        } else {
            ""
        };
        println!(
            "{status} criterion {name}: {} [{:.2}s{over}]",
            o.detail,
            elapsed.as_secs_f64()
        );
        if !o.passed {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
