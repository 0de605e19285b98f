//! End-to-end acceptance checks. Runs as a plain binary so every check prints
//! exactly one PASS/FAIL line; the process fails if any check fails.

use std::cmp::Ordering;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catnoise_core::cat_algebra::{
    binomial, cat_populations, delta, population_trace, two_lambda_log, CutSpec,
};
use catnoise_core::criteria::{
    asymptotic_condition, asymptotic_report, cut_verdict, finite_n_condition, max_distillable_m,
    max_m_for_k, MARGIN_BAND,
};
use catnoise_core::oracle::{decohere_all, oracle_cut_verdict, DenseState, EIGEN_EPS};
use catnoise_core::sweep::config::random_channels;
use catnoise_core::{DerivedParams, PauliChannel, Verdict};

const SEED: u64 = 20_240_601;
const ELEMENT_TOL: f64 = 1e-12;
const CAT_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Closed-form density-matrix entry in the computational basis.
fn closed_form_entry(p: &DerivedParams, n: usize, i: usize, j: usize) -> f64 {
    let full = (1usize << n) - 1;
    let ones = i.count_ones() as i32;
    let zeros = n as i32 - ones;
    if i == j {
        (p.a.powi(zeros) * p.b.powi(ones) + p.b.powi(zeros) * p.a.powi(ones)) / 2.0
    } else if i ^ j == full {
        (p.c.powi(zeros) * p.d.powi(ones) + p.d.powi(zeros) * p.c.powi(ones)) / 2.0
    } else {
        0.0
    }
}

/// Largest |<u|rho|v>| over distinct cat-basis vectors u, v.
fn max_cat_off_diagonal(state: &DenseState) -> f64 {
    let n = state.n_qubits();
    let full = (1usize << n) - 1;
    let reps: Vec<usize> = (0..=full).filter(|x| x >> (n - 1) == 0).collect();
    let basis: Vec<(usize, f64)> = reps
        .iter()
        .flat_map(|&x| [(x, 1.0), (x, -1.0)])
        .collect();
    let re = |i: usize, j: usize| {
        let z = state.get(i, j);
        assert!(z.im.abs() < 1e-15, "non-real entry");
        z.re
    };
    let mut worst: f64 = 0.0;
    for (u, &(x, s)) in basis.iter().enumerate() {
        for (v, &(y, t)) in basis.iter().enumerate() {
            if u == v {
                continue;
            }
            let (xb, yb) = (x ^ full, y ^ full);
            let e = 0.5 * (re(x, y) + t * re(x, yb) + s * re(xb, y) + s * t * re(xb, yb));
            worst = worst.max(e.abs());
        }
    }
    worst
}

struct Campaign {
    max_element_err: f64,
    max_cat_offdiag: f64,
    points: usize,
    forbidden: Vec<String>,
    necessity_gap: usize,
    boundary: usize,
    max_pair_err_2lambda: f64,
    max_pair_err_lambda: f64,
    elapsed: Duration,
}

fn oracle_campaign() -> Campaign {
    let start = Instant::now();
    let channels = random_channels(200, SEED);
    let mut c = Campaign {
        max_element_err: 0.0,
        max_cat_offdiag: 0.0,
        points: 0,
        forbidden: Vec::new(),
        necessity_gap: 0,
        boundary: 0,
        max_pair_err_2lambda: 0.0,
        max_pair_err_lambda: 0.0,
        elapsed: Duration::ZERO,
    };
    for ch in &channels {
        let p = ch.params();
        for n in 2..=8usize {
            let state = decohere_all(n, ch).expect("oracle state");
            let dim = 1usize << n;
            for i in 0..dim {
                for j in 0..dim {
                    let z = state.get(i, j);
                    let err = (z.re - closed_form_entry(&p, n, i, j)).abs().max(z.im.abs());
                    c.max_element_err = c.max_element_err.max(err);
                }
            }
            c.max_cat_offdiag = c.max_cat_offdiag.max(max_cat_off_diagonal(&state));

            // which normalization of a cat pair's total population is right
            let full = dim - 1;
            for x in 0..dim / 2 {
                let ones = x.count_ones() as u64;
                let group = ones.min(n as u64 - ones);
                let pair_total = (state.get(x, x) + state.get(x ^ full, x ^ full)).re;
                let coeffs = cat_populations(&p, n as u64, group).unwrap();
                let predicted = if group == 0 {
                    coeffs.alpha0_plus + coeffs.alpha0_minus
                } else {
                    coeffs.two_lambda
                };
                c.max_pair_err_2lambda = c.max_pair_err_2lambda.max((pair_total - predicted).abs());
                c.max_pair_err_lambda =
                    c.max_pair_err_lambda.max((pair_total - predicted / 2.0).abs());
            }

            for k in 1..=n / 2 {
                c.points += 1;
                let v = cut_verdict(&p, CutSpec::new(n as u64, k as u64).unwrap());
                let pt = oracle_cut_verdict(&state, k).expect("oracle eigenvalue");
                let nppt = pt.min_eigenvalue < -EIGEN_EPS;
                match v.entangled {
                    Verdict::Yes if !nppt => c.forbidden.push(format!(
                        "pi={:?} N={n} k={k} margin={} min_eig={}",
                        ch.probabilities(),
                        v.margin,
                        pt.min_eigenvalue
                    )),
                    Verdict::No if nppt => c.necessity_gap += 1,
                    Verdict::Boundary => c.boundary += 1,
                    _ => {}
                }
            }
        }
    }
    c.elapsed = start.elapsed();
    c
}

fn check_lambda_order() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut violations = 0usize;
    let mut tuples = 0usize;
    while tuples < 100_000 {
        let a: f64 = rng.gen_range(1e-9..1.0);
        let b = 1.0 - a;
        if a == b {
            continue;
        }
        let n: u64 = rng.gen_range(4..=64);
        let m: u64 = rng.gen_range(2..=n / 2);
        let k: u64 = rng.gen_range(1..m);
        let p = DerivedParams { a, b, c: 0.0, d: 0.0 };
        let lk = two_lambda_log(&p, CutSpec::new(n, k).unwrap());
        let lm = two_lambda_log(&p, CutSpec::new(n, m).unwrap());
        if lk.cmp_value(&lm) != Ordering::Greater {
            violations += 1;
        }
        tuples += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < Duration::from_secs(5),
        format!("{tuples} tuples, {violations} violations, {:.2?}", elapsed),
    )
}

/// Every multiset of positive group sizes summing to `n`, as non-increasing lists.
fn partitions(n: u64) -> Vec<Vec<u64>> {
    fn rec(rest: u64, cap: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(cap)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Sizes of one side of every bipartition that keeps each group whole.
fn group_respecting_cuts(groups: &[u64], n: u64) -> Vec<u64> {
    let mut reach = vec![false; n as usize + 1];
    reach[0] = true;
    for &g in groups {
        for s in (g as usize..=n as usize).rev() {
            if reach[s - g as usize] {
                reach[s] = true;
            }
        }
    }
    (1..n).filter(|&s| reach[s as usize]).collect()
}

fn check_max_m_enumeration() -> Outcome {
    let mut mismatches = Vec::new();
    let mut checked = 0usize;
    let table: Vec<Vec<Vec<u64>>> = (0..=30).map(partitions).collect();

    // arithmetic: largest number of groups, all of size >= k
    for n in 2..=30u64 {
        for k in 1..=n / 2 {
            let best = table[n as usize]
                .iter()
                .filter(|g| g.iter().all(|&s| s >= k))
                .map(|g| g.len() as u64)
                .max()
                .unwrap();
            checked += 1;
            if best != max_m_for_k(n, k) {
                mismatches.push(format!("N={n} k={k}: enumeration {best}, formula {}", max_m_for_k(n, k)));
            }
        }
    }

    // channels: a partition is distillable when every group-respecting cut is entangled
    let mut channels = random_channels(50, SEED + 6);
    channels.extend((0..50).map(|i| {
        PauliChannel::preset_by_name("depolarizing", 0.55 + 0.45 * i as f64 / 49.0).unwrap()
    }));
    for ch in &channels {
        let p = ch.params();
        for n in 2..=30u64 {
            let yes: Vec<bool> = (0..n)
                .map(|s| {
                    s > 0 && cut_verdict(&p, CutSpec::new(n, s.min(n - s)).unwrap()).entangled == Verdict::Yes
                })
                .collect();
            let best = table[n as usize]
                .iter()
                .filter(|g| g.len() >= 2)
                .filter(|g| group_respecting_cuts(g, n).iter().all(|&s| yes[s as usize]))
                .map(|g| g.len() as u64)
                .max();
            let report = max_distillable_m(&p, n).unwrap();
            checked += 1;
            if best != report.max_m {
                mismatches.push(format!(
                    "pi={:?} N={n}: enumeration {best:?}, report {:?}",
                    ch.probabilities(),
                    report.max_m
                ));
            }
        }
    }
    let mut detail = format!("{checked} cases, {} mismatches", mismatches.len());
    if let Some(first) = mismatches.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    outcome(mismatches.is_empty(), detail)
}

fn check_factor_two(c: &Campaign) -> Outcome {
    let mut worst: f64 = 0.0;
    for ch in random_channels(200, SEED + 7) {
        let p = ch.params();
        for n in 2..=20u64 {
            // sum over j of C(N, j) a^j b^(N-j), straight from the binomial
            let direct: f64 = (0..=n)
                .map(|j| binomial(n, j).unwrap() as f64 * p.a.powi(j as i32) * p.b.powi((n - j) as i32))
                .sum();
            let implemented = population_trace(&p, n).unwrap();
            worst = worst.max((direct - 1.0).abs()).max((implemented - 1.0).abs());
        }
    }
    let pass = worst < 1e-10 && c.max_pair_err_2lambda < ELEMENT_TOL && c.max_pair_err_lambda > 1e-3;
    outcome(
        pass,
        format!(
            "pair total = 2*lambda (oracle err {:.1e}; half-normalization err {:.1e}); trace err {:.1e} for N <= 20",
            c.max_pair_err_2lambda, c.max_pair_err_lambda, worst
        ),
    )
}

fn check_log_scaling() -> Outcome {
    let p = DerivedParams {
        a: 0.93333,
        b: 0.06667,
        c: 0.86667,
        d: 0.0,
    };
    let (hi_ab, lo_ab) = p.ab_ordered();
    let alpha = 0.25;
    let asym = asymptotic_condition(&p, alpha);
    let rate = p.c.abs().ln() - alpha * lo_ab.ln() - (1.0 - alpha) * hi_ab.ln();
    let mut ok = asym;
    let mut gaps = Vec::new();
    let mut worst_time = Duration::ZERO;
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let cut = CutSpec::new(n, n / 4).unwrap();
        let reps = 200u32;
        let start = Instant::now();
        let mut last = None;
        for _ in 0..reps {
            let fin = finite_n_condition(std::hint::black_box(&p), cut).unwrap();
            let v = cut_verdict(std::hint::black_box(&p), cut);
            last = Some((fin, v));
        }
        let per_point = start.elapsed() / reps;
        worst_time = worst_time.max(per_point);
        let (fin, v) = last.unwrap();
        let finite = [fin.margin, fin.mu, fin.lhs, fin.rhs, v.margin, v.ln_delta, v.ln_two_lambda]
            .iter()
            .all(|x| x.is_finite());
        ok &= finite
            && fin.status == Verdict::Yes
            && v.entangled == Verdict::Yes
            && ((fin.margin - v.margin) / v.margin).abs() < 1e-9;
        gaps.push((v.margin / n as f64 - rate).abs());
    }
    let converging = gaps.iter().all(|&g| g < 1e-9);
    ok &= converging && worst_time < Duration::from_millis(1);
    outcome(
        ok,
        format!(
            "N = 1e3..1e6 all yes, asymptotic {asym}, per-N rate gap {:.1e} .. {:.1e}, worst {:.1?}/point",
            gaps[0],
            gaps.last().unwrap(),
            worst_time
        ),
    )
}

fn check_robust_pair() -> Outcome {
    let mut mismatches = 0;
    let channels = random_channels(10_000, SEED + 9);
    for ch in &channels {
        let p = ch.params();
        let (c_abs, _) = p.cd_abs_ordered();
        let direct = c_abs * c_abs > p.a * p.b;
        let asym = asymptotic_condition(&p, 0.5);
        if asym != direct || asymptotic_report(&p).robust_pair_ok != direct {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{} channels, {mismatches} mismatches", channels.len()))
}

/// `|C^N - D^N|` as `(C - D) * sum C^i D^(N-1-i)`: no cancellation beyond the
/// single exact-ish subtraction.
fn difference_of_powers(hi: f64, lo: f64, n: u64) -> f64 {
    let series: f64 = (0..n)
        .map(|i| hi.powi(i as i32) * lo.powi((n - 1 - i) as i32))
        .sum();
    (hi - lo) * series
}

fn check_parity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut cases: Vec<DerivedParams> = random_channels(40_000, SEED + 11)
        .into_iter()
        .map(|ch| ch.params())
        .filter(|p| p.c * p.d < 0.0)
        .take(9_000)
        .collect();
    // near |c| = |d|, where the odd-N difference cancels
    while cases.len() < 10_000 {
        let mag: f64 = rng.gen_range(0.05..0.5);
        let rel: f64 = 10f64.powf(rng.gen_range(-12.0..-3.0));
        let (c, d) = if rng.gen_bool(0.5) {
            (mag, -mag * (1.0 - rel))
        } else {
            (-mag * (1.0 - rel), mag)
        };
        cases.push(DerivedParams { a: 0.5 + mag / 2.0, b: 0.5 - mag / 2.0, c, d });
    }
    let mut worst: f64 = 0.0;
    let mut non_finite = 0;
    for p in &cases {
        let n: u64 = rng.gen_range(2..=200);
        let (hi, lo) = p.cd_abs_ordered();
        let expect = if n % 2 == 1 {
            difference_of_powers(hi, lo, n)
        } else {
            hi.powi(n as i32) + lo.powi(n as i32)
        };
        let got = delta(p, n);
        if expect == 0.0 {
            if got != 0.0 {
                non_finite += 1;
            }
            continue;
        }
        let rel = ((got - expect) / expect).abs();
        if !rel.is_finite() {
            non_finite += 1;
        }
        worst = worst.max(rel);
    }
    outcome(
        worst < 1e-12 && non_finite == 0,
        format!("{} channels with cd < 0, worst relative error {worst:.1e}", cases.len()),
    )
}

fn check_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{"random_channels": 40,
            "grid": {"family": "depolarizing", "from": 0.0, "to": 1.0, "step": 0.05},
            "n_values": {"from": 2, "to": 12}, "cuts": "all", "seed": 7}"#,
    )
    .unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_catnoise"))
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--workers", workers])
            .status()
            .expect("spawn catnoise");
        assert!(status.success(), "sweep failed");
        std::fs::read(out).unwrap()
    };
    let first = run("a.csv", "2");
    let second = run("b.csv", "2");
    let single = run("c.csv", "1");
    let rows = first.iter().filter(|&&b| b == b'\n').count() - 1;
    outcome(
        first == second && first == single && rows > 0,
        format!("{rows} rows, {} bytes, identical across runs and worker counts", first.len()),
    )
}

fn main() -> ExitCode {
    let campaign = oracle_campaign();
    let mut results: Vec<(&str, Outcome)> = Vec::new();

    results.push((
        "oracle coefficient agreement",
        outcome(
            campaign.max_element_err < ELEMENT_TOL && campaign.elapsed < Duration::from_secs(120),
            format!(
                "max element error {:.1e} over 200 channels x N=2..8, campaign {:.1?}",
                campaign.max_element_err, campaign.elapsed
            ),
        ),
    ));
    results.push((
        "cat-basis diagonality",
        outcome(
            campaign.max_cat_offdiag < CAT_TOL,
            format!("max off-diagonal {:.1e}", campaign.max_cat_offdiag),
        ),
    ));
    let mut detail = format!(
        "{} points, {} analytic-yes/oracle-PSD, {} boundary (band {MARGIN_BAND:e})",
        campaign.points,
        campaign.forbidden.len(),
        campaign.boundary
    );
    if let Some(first) = campaign.forbidden.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    results.push(("sufficiency", outcome(campaign.forbidden.is_empty(), detail)));
    results.push((
        "necessity report",
        outcome(
            true,
            format!(
                "{} of {} points analytic-no but oracle NPPT",
                campaign.necessity_gap, campaign.points
            ),
        ),
    ));
    results.push(("lambda strictly decreasing in k", check_lambda_order()));
    results.push(("max M vs partition enumeration", check_max_m_enumeration()));
    results.push(("pair normalization and trace", check_factor_two(&campaign)));
    results.push(("log-domain scaling to N = 1e6", check_log_scaling()));
    results.push(("balanced-cut asymptotics vs c^2 > ab", check_robust_pair()));
    results.push(("opposite-sign parity", check_parity()));
    results.push(("sweep determinism", check_determinism()));

    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("acceptance {:>2} {tag}  {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance checks failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
