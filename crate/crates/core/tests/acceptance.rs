//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use davlab_core::construction::bad_set::{build_bad_set, TupleVec};
use davlab_core::construction::cover::binding_counts;
use davlab_core::construction::params::{make_params_relaxed, params_with_radius, radius_for};
use davlab_core::construction::{
    construct_weight_set, construct_with, is_good, verify_document, ConstructOptions,
    CoverCertificate, Tier, Verdict,
};
use davlab_core::extremal::{default_size_cap, lower_bound};
use davlab_core::zmod::{extract_symmetric_core, is_prime, primes_in, IntervalSpec};
use davlab_core::{
    davenport_constant, fd_exact, fd_quotient_oracle, DavenportValue, Modulus, ResidueSet,
    WeightSet,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const FD2_TABLE: [(u64, u64); 10] = [
    (3, 2),
    (5, 3),
    (7, 3),
    (11, 4),
    (13, 4),
    (17, 5),
    (19, 5),
    (23, 6),
    (29, 6),
    (31, 7),
];

const FD3_TABLE: [(u64, u64); 4] = [(5, 2), (7, 2), (11, 3), (13, 3)];

fn golden_table() -> Outcome {
    for (p, expected) in FD2_TABLE {
        let search = fd_exact(p, 2, default_size_cap(p, 2)).map_err(|e| e.to_string())?;
        let via_search = search.value.exact().ok_or(format!("p={p}: no value within cap"))?;
        let via_quotients = fd_quotient_oracle(p).map_err(|e| e.to_string())?;
        ensure!(
            via_search == via_quotients,
            "p={p}: search {via_search} vs quotient oracle {via_quotients}"
        );
        ensure!(via_search == expected, "p={p}: got {via_search}, frozen {expected}");
    }
    Ok(format!("{} primes, both paths agree with the frozen table", FD2_TABLE.len()))
}

fn lower_bounds() -> Outcome {
    let mut checked = 0;
    for (p, v) in FD2_TABLE {
        ensure!(v >= lower_bound(p, 2), "fd({p},2) = {v} below the lower bound");
        checked += 1;
    }
    for (p, expected) in FD3_TABLE {
        let r = fd_exact(p, 3, default_size_cap(p, 3)).map_err(|e| e.to_string())?;
        let v = r.value.exact().ok_or(format!("fd({p},3) not found within cap"))?;
        ensure!(v == expected, "fd({p},3) = {v}, frozen {expected}");
        ensure!(v >= lower_bound(p, 3), "fd({p},3) = {v} below {}", lower_bound(p, 3));
        checked += 1;
    }
    Ok(format!("{checked} values, zero exceptions"))
}

/// Does some nonempty subset containing the last element, with weights from
/// `a`, sum to 0? Brute force over masks and weight assignments.
fn last_closes_zero_sum(seq: &[u64], a: &[u64], n: u64) -> bool {
    let (last, rest) = seq.split_last().expect("nonempty");
    for mask in 0u32..(1 << rest.len()) {
        let mut members: Vec<u64> = (0..rest.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| rest[i])
            .collect();
        members.push(*last);
        let mut choice = vec![0usize; members.len()];
        loop {
            let sum = members
                .iter()
                .zip(&choice)
                .map(|(&x, &c)| x * a[c])
                .sum::<u64>();
            if sum % n == 0 {
                return true;
            }
            let mut i = 0;
            while i < choice.len() && choice[i] + 1 == a.len() {
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
            choice[i] += 1;
        }
    }
    false
}

/// Longest zero-sum-free ordered sequence, extending only zero-sum-free prefixes.
fn naive_longest(seq: &mut Vec<u64>, a: &[u64], n: u64) -> usize {
    let mut best = seq.len();
    if seq.len() as u64 >= n {
        return best;
    }
    for x in 0..n {
        seq.push(x);
        if !last_closes_zero_sum(seq, a, n) {
            best = best.max(naive_longest(seq, a, n));
        }
        seq.pop();
    }
    best
}

fn subsets_up_to(items: &[u64], max: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << items.len()) {
        if mask.count_ones() as usize <= max {
            out.push(
                (0..items.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| items[i])
                    .collect(),
            );
        }
    }
    out
}

fn davenport_oracle() -> Outcome {
    let mut cases = 0;
    for n in 2..=7u64 {
        let m = Modulus::new(n).map_err(|e| e.to_string())?;
        let units: Vec<u64> = (1..n).collect();
        for a in subsets_up_to(&units, 3) {
            let naive = naive_longest(&mut Vec::new(), &a, n) as u64 + 1;
            let w = WeightSet::new(m, a.iter().copied()).map_err(|e| e.to_string())?;
            let got = davenport_constant(&w, n).value;
            ensure!(
                got == DavenportValue::Exact(naive),
                "n={n} A={a:?}: solver {got:?}, naive {naive}"
            );
            cases += 1;
        }
    }
    Ok(format!("{cases} (n, A) pairs agree"))
}

struct ContraStats {
    not_good: u64,
    outside: u64,
}

/// Checks `not good(α, t) ⇒ α·t ∈ S` on uniform pairs, on pairs with `α·t`
/// drawn from small multiples (which are the likely failures of goodness),
/// and exhaustively over `α` at `t = 1` when `exhaustive` is set.
fn contrapositive(
    p: u64,
    d: usize,
    radius: u64,
    draws: usize,
    exhaustive: bool,
) -> Result<ContraStats, String> {
    let k_total = 2 * (d as u32 + 1);
    let params = params_with_radius(p, k_total, radius, 0).map_err(|e| e.to_string())?;
    let bad = build_bad_set(&params, d);
    if let Some(size) = bad.size() {
        ensure!(
            (size as u128) < bad.size_bound(),
            "p={p} d={d} L={radius}: |S| = {size} ≥ {}",
            bad.size_bound()
        );
    }
    let m = params.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(p * 10 + d as u64);
    let mut stats = ContraStats {
        not_good: 0,
        outside: 0,
    };
    let mut check = |alpha: &TupleVec, t: &TupleVec| -> Result<(), String> {
        let product = alpha.mul(t, m);
        let member = bad.contains(&product);
        if !member {
            stats.outside += 1;
        }
        if !is_good(alpha, t, &params).map_err(|e| e.to_string())? {
            stats.not_good += 1;
            ensure!(member, "p={p} d={d} L={radius}: α={alpha:?} t={t:?} not good but α·t ∉ S");
        }
        Ok(())
    };
    for _ in 0..draws {
        let alpha = TupleVec::random(&mut rng, d, p);
        let t = TupleVec::random(&mut rng, d, p);
        check(&alpha, &t)?;
        // Goodness at d = 2 only fails when both ratios are tiny.
        let small = if d == 1 { 4 * radius } else { 3 }.min(p - 1);
        let u = TupleVec((0..d).map(|_| rng.gen_range(1..=small)).collect());
        let t = TupleVec::random(&mut rng, d, p);
        check(&u.mul(&t.inverse(m), m), &t)?;
    }
    if exhaustive {
        for s in 1..p {
            check(&TupleVec(vec![s]), &TupleVec::ones(1))?;
        }
    }
    Ok(stats)
}

fn lemma_small_contrapositive() -> Outcome {
    let mut report = Vec::new();
    // The stated instances, with L either shrunk to meet 8·k·L < p or taken
    // from C = 9 with the guard relaxed. Both are degenerate: L ≤ 64 makes
    // every α good at d = 1, and the C = 9 radii saturate S.
    for p in [499u64, 1009] {
        for d in [1usize, 2] {
            let k_total = 2 * (d as u32 + 1);
            for radius in [(p - 1) / (8 * k_total as u64), radius_for(p, k_total, 9.0)] {
                let s = contrapositive(p, d, radius, 1000, d == 1)?;
                report.push(format!("p={p} d={d} L={radius}: {} not good, {} outside S", s.not_good, s.outside));
            }
        }
    }
    // Instances where both sides of the implication occur.
    let s1 = contrapositive(10007, 1, 91, 1000, true)?;
    ensure!(s1.not_good > 0 && s1.outside > 0, "p=10007 instance is degenerate");
    let s2 = contrapositive(1_000_003, 2, 24, 1000, false)?;
    ensure!(s2.not_good > 0 && s2.outside > 0, "p=1000003 instance is degenerate");
    report.push(format!("p=10007 d=1 L=91: {} not good, {} outside S", s1.not_good, s1.outside));
    report.push(format!("p=1000003 d=2 L=24: {} not good, {} outside S", s2.not_good, s2.outside));
    Ok(format!("zero violations; {}", report.join("; ")))
}

fn random_subset(rng: &mut ChaCha8Rng, p: u64, size: usize) -> Vec<u64> {
    let mut all: Vec<u64> = (0..p).collect();
    all.shuffle(rng);
    all.truncate(size);
    all
}

fn difference_set(s: &ResidueSet) -> ResidueSet {
    s.sumset(&s.dilate(s.modulus().n() - 1)).expect("same modulus")
}

fn obs_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let small_primes: Vec<u64> = primes_in(3, 101);
    for i in 0..200 {
        let p = *small_primes.choose(&mut rng).expect("nonempty");
        let m = Modulus::new(p).map_err(|e| e.to_string())?;
        let a_size = rng.gen_range(2..p as usize);
        let b_min = (p as usize / a_size) + 1;
        ensure!(b_min <= p as usize, "unreachable size");
        let b_size = rng.gen_range(b_min..=p as usize);
        let a = ResidueSet::from_values(m, random_subset(&mut rng, p, a_size));
        let b = ResidueSet::from_values(m, random_subset(&mut rng, p, b_size));
        ensure!(a.len() * b.len() > p as usize, "instance {i} too small");
        let q = ResidueSet::quotient_set(&difference_set(&a), &difference_set(&b))
            .map_err(|e| e.to_string())?;
        ensure!(q.len() as u64 == p, "obs0 instance {i} (p={p}) misses {} residues", p - q.len() as u64);
    }
    let primes: Vec<u64> = primes_in(11, 499);
    let mut checks = 0;
    for r in 1..=4usize {
        for i in 0..200 {
            let p = *primes.choose(&mut rng).expect("nonempty");
            let m = Modulus::new(p).map_err(|e| e.to_string())?;
            let include_unit = i % 2 == 1;
            let summands = r - usize::from(include_unit);
            if summands == 0 {
                continue;
            }
            let radius = rng.gen_range(1..=(p / 4).max(1));
            let mut steps: Vec<u64> = Vec::new();
            while steps.len() < summands {
                let t = rng.gen_range(1..p);
                if !steps.contains(&t) {
                    steps.push(t);
                }
            }
            let specs: Vec<IntervalSpec> = steps.iter().map(|&t| IntervalSpec::full(t, radius)).collect();
            let core = extract_symmetric_core(&specs, include_unit, m).map_err(|e| e.to_string())?;
            let diff = difference_set(&core.core);
            ensure!(
                diff.is_subset(&core.target).map_err(|e| e.to_string())?,
                "obs1 r={r} p={p} steps={steps:?} L={radius}: Y−Y ⊄ target"
            );
            ensure!(
                core.core.len() << r >= core.target.len(),
                "obs1 r={r} p={p}: |Y|·2^r = {} < {}",
                core.core.len() << r,
                core.target.len()
            );
            checks += 1;
        }
    }
    Ok(format!("obs0: 200 instances; obs1: {checks} instances over r ≤ 4; zero violations"))
}

const EVEN_WEIGHT_COUNT: u64 = 6878;
const EVEN_COVER_SIZE: u64 = 60;

fn even_cert() -> Result<CoverCertificate, String> {
    construct_weight_set(10007, 4, 9.0, 42).map_err(|e| e.to_string())
}

fn small_cert() -> Result<CoverCertificate, String> {
    let params = make_params_relaxed(43, 4, 1.0, 42).map_err(|e| e.to_string())?;
    construct_with(&params, &ConstructOptions::default()).map_err(|e| e.to_string())
}

fn even_construction() -> Outcome {
    let cert = even_cert()?;
    let v = &cert.verification;
    ensure!(v.tier == Tier::GoodnessFull, "tier {}", v.tier);
    ensure!(v.verdict == Verdict::Pass, "verdict fail: {:?}", v.failure_witness);
    ensure!(
        v.checked_count == 10006 && v.total_count == 10006,
        "checked {}/{}",
        v.checked_count,
        v.total_count
    );
    let size = cert.sizes.weight_count;
    let bound = 27f64.powi(4) * 10007f64.powf(0.25);
    ensure!((size as f64) <= bound, "|A| = {size} exceeds {bound}");
    ensure!(size as u64 <= cert.sizes.intersect_bound, "|A| above 2mNL + 2L");
    ensure!(size == EVEN_WEIGHT_COUNT, "|A| = {size}, frozen {EVEN_WEIGHT_COUNT}");
    ensure!(cert.n_total == EVEN_COVER_SIZE, "N = {}, frozen {EVEN_COVER_SIZE}", cert.n_total);
    let recheck = verify_document(&cert, None).map_err(|e| e.to_string())?;
    ensure!(recheck == *v, "re-verification differs");
    Ok(format!(
        "|A|={size} N={} min|Y|={:?} bound {bound:.0}",
        cert.n_total, v.min_core_sizes
    ))
}

fn small_exact() -> Outcome {
    let cert = small_cert()?;
    let v = &cert.verification;
    ensure!(v.tier == Tier::Exact, "tier {}", v.tier);
    ensure!(v.verdict == Verdict::Pass, "exact tier fails: {:?}", v.failure_witness);
    let m = Modulus::new(43).map_err(|e| e.to_string())?;
    let a = WeightSet::new(m, cert.weights.iter().copied()).map_err(|e| e.to_string())?;
    let d = davenport_constant(&a, 43).value.exact().ok_or("no exact value")?;
    ensure!(d <= 4, "D_A(F_43) = {d}");
    Ok(format!("L={} |A|={} D_A={d}", cert.params.radius, a.len()))
}

fn expectation_identity() -> Outcome {
    let mut instances = 0;
    for p in primes_in(2, 499) {
        let guard_radius = ((p - 1) / 32).max(1);
        let loose = make_params_relaxed(p, 4, 9.0, 0).map_err(|e| e.to_string())?;
        for params in [
            params_with_radius(p, 4, guard_radius, 0).map_err(|e| e.to_string())?,
            loose,
        ] {
            let bad = build_bad_set(&params, 1);
            let members: Vec<u64> = bad.iter().ok_or("not explicit")?.map(|t| t.0[0]).collect();
            let s = members.len() as u64;
            let counts = binding_counts(&bad).map_err(|e| e.to_string())?;
            ensure!(
                counts.iter().sum::<u64>() == s * s,
                "p={p} L={}: Σ N(y) = {} ≠ |S|² = {}",
                params.radius,
                counts.iter().sum::<u64>(),
                s * s
            );
            // Direct double loop: |S ∩ yS| = #{s ∈ S : y⁻¹s ∈ S}.
            let m = params.modulus();
            let mut total = 0u64;
            for y in 1..p {
                let y_inv = m.inv(y).expect("unit");
                total += members.iter().filter(|&&x| bad.contains(&TupleVec(vec![m.mul(x, y_inv)]))).count() as u64;
            }
            ensure!(total == s * s, "p={p}: double loop {total} ≠ {}", s * s);
            instances += 1;
        }
    }
    Ok(format!("{instances} (p, L) instances, exact equality"))
}

fn determinism() -> Outcome {
    let first = (even_cert()?.to_json(), small_cert()?.to_json());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .map_err(|e| e.to_string())?;
    let second = pool.install(|| -> Result<_, String> { Ok((even_cert()?.to_json(), small_cert()?.to_json())) })?;
    ensure!(first.0 == second.0, "p=10007 certificates differ");
    ensure!(first.1 == second.1, "p=43 certificates differ");
    Ok(format!(
        "byte-identical ({} and {} bytes), second run on 3 threads",
        first.0.len(),
        first.1.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden fd(p,2) table", golden_table),
        ("lower bound ceil(p^(1/k) - 1)", lower_bounds),
        ("Davenport solver vs naive enumeration", davenport_oracle),
        ("not good implies bad-set membership", lemma_small_contrapositive),
        ("quotient and symmetric-core properties", obs_suites),
        ("even construction p=10007 k=4 seed=42", even_construction),
        ("exact tier at p=43 k=4 (test mode)", small_exact),
        ("expectation identity for p <= 499", expectation_identity),
        ("determinism of certificates", determinism),
    ];
    assert!(is_prime(10007));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({secs:.1}s) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.1}s) {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
