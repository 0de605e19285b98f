//! Entanglement verdicts for bipartite cuts of the decohered GHZ state and the
//! distillability thresholds derived from them.
//!
//! The basic test for a cut `k : (N - k)` is `Δ > 2λ`. It is evaluated as the
//! log-domain margin `ln Δ - ln 2λ` so that it stays meaningful when both sides
//! underflow. Strict inequalities get a symmetric band of width
//! [`MARGIN_BAND`]; margins inside it are reported as [`Verdict::Boundary`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cat_algebra::{delta, delta_log, two_lambda, two_lambda_log, CutSpec};
use crate::channel::{DerivedParams, PROBABILITY_TOLERANCE};
use crate::error::{Error, Result};

/// Half-width of the boundary band on log-domain margins.
pub const MARGIN_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Boundary,
}

impl Verdict {
    pub fn from_margin(margin: f64) -> Self {
        if margin.is_nan() {
            Verdict::No
        } else if margin > MARGIN_BAND {
            Verdict::Yes
        } else if margin >= -MARGIN_BAND {
            Verdict::Boundary
        } else {
            Verdict::No
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityClass {
    /// `c d >= 0`: `Δ = |c|^N + |d|^N` for every `N`.
    SameSign,
    /// `c d < 0`: the two coherence terms cancel for odd `N`.
    OppositeSign,
}

impl ParityClass {
    pub fn of(p: &DerivedParams) -> Self {
        if p.opposite_signs() {
            ParityClass::OppositeSign
        } else {
            ParityClass::SameSign
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ParityClass::SameSign => "same-sign",
            ParityClass::OppositeSign => "opposite-sign",
        }
    }
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutVerdict {
    pub cut: CutSpec,
    /// Linear `Δ`; may underflow to zero for large `N`.
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub delta: f64,
    /// Linear `2λ`; may underflow to zero for large `N`.
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub two_lambda: f64,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub ln_delta: f64,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub ln_two_lambda: f64,
    /// `ln Δ - ln 2λ`; `+inf` when `2λ = 0 < Δ`, NaN when both vanish.
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub margin: f64,
    pub entangled: Verdict,
}

/// `ln x - ln y` with the zero cases spelled out.
fn log_margin(ln_x: f64, ln_y: f64) -> f64 {
    match (ln_x == f64::NEG_INFINITY, ln_y == f64::NEG_INFINITY) {
        (true, true) => f64::NAN,
        (false, true) => f64::INFINITY,
        (true, false) => f64::NEG_INFINITY,
        (false, false) => ln_x - ln_y,
    }
}

/// NPPT test `Δ > 2λ` for one cut.
pub fn cut_verdict(p: &DerivedParams, cut: CutSpec) -> CutVerdict {
    let n = cut.n_qubits();
    let ln_delta = delta_log(p, n).ln_abs();
    let ln_two_lambda = two_lambda_log(p, cut).ln_abs();
    let margin = log_margin(ln_delta, ln_two_lambda);
    let entangled = if p.is_balanced() {
        Verdict::No
    } else {
        Verdict::from_margin(margin)
    };
    CutVerdict {
        cut,
        delta: delta(p, n),
        two_lambda: two_lambda(p, cut),
        ln_delta,
        ln_two_lambda,
        margin,
        entangled,
    }
}

/// Smallest `k` whose cut is entangled.
///
/// The margin is strictly increasing in `k` for `a != b`, so the predicate
/// "verdict is yes" is monotone and a binary search is exact. A linear scan
/// takes over if rounding ever makes the neighbour below disagree.
pub fn min_entangled_k(p: &DerivedParams, n: u64) -> Result<Option<u64>> {
    if n < 2 {
        return Err(Error::InvalidCut { n, k: 1 });
    }
    if p.is_balanced() {
        return Ok(None);
    }
    let yes = |k: u64| cut_verdict(p, CutSpec::new(n, k).unwrap()).entangled == Verdict::Yes;
    let top = n / 2;
    if !yes(top) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1u64, top);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if yes(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if lo > 1 && yes(lo - 1) {
        log::debug!("non-monotone verdicts near k = {lo}, N = {n}; scanning");
        return Ok((1..=top).find(|&k| yes(k)));
    }
    Ok(Some(lo))
}

/// Largest `M` such that an `M`-party cat state is distillable when the
/// smallest entangled cut has `k` qubits on one side.
pub fn max_m_for_k(n: u64, k: u64) -> u64 {
    debug_assert!(k >= 1 && k <= n);
    if n.is_multiple_of(k) {
        n / k
    } else {
        1 + (n - k) / k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionReport {
    pub n_qubits: u64,
    pub min_entangled_k: Option<u64>,
    /// Maximal size of a distillable cat state under democratic partitioning.
    pub max_m: Option<u64>,
    pub parity_class: ParityClass,
    /// No bipartite cut passes the NPPT test.
    pub fully_separable_flag: bool,
}

pub fn max_distillable_m(p: &DerivedParams, n: u64) -> Result<PartitionReport> {
    let min_k = min_entangled_k(p, n)?;
    Ok(PartitionReport {
        n_qubits: n,
        min_entangled_k: min_k,
        max_m: min_k.map(|k| max_m_for_k(n, k)),
        parity_class: ParityClass::of(p),
        fully_separable_flag: min_k.is_none(),
    })
}

/// Distillability of a partition given as explicit group sizes. Only the
/// smallest group matters: every cut obtained by merging groups is at least
/// as large on both sides.
pub fn partition_distillable(p: &DerivedParams, group_sizes: &[u64]) -> Result<Verdict> {
    let n: u64 = group_sizes.iter().sum();
    if group_sizes.len() < 2 || group_sizes.contains(&0) {
        return Err(Error::InvalidCut { n, k: 0 });
    }
    let smallest = *group_sizes.iter().min().unwrap();
    Ok(cut_verdict(p, CutSpec::new(n, smallest)?).entangled)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AsymptoticRegime {
    /// Macroscopic cuts with `α > f` stay entangled as `N → ∞`.
    EntangledForAlphaAboveF,
    /// `a = b`: no cut is ever entangled.
    NeverEntangled,
    /// `c = d = 0`: the GHZ coherence is gone, `f = ∞`.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticReport {
    /// `ln(a/|c|) / ln(a/b)` with `a >= b`, `|c| >= |d|` by relabelling.
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub f_threshold: f64,
    /// `c² > ab`: the balanced cut survives the large-`N` limit.
    pub robust_pair_ok: bool,
    /// Cut fraction at which the finite-`N` correction vanishes.
    #[serde(serialize_with = "crate::real_fmt::serialize_opt_real")]
    pub finite_equals_asymptotic_alpha: Option<f64>,
    pub regime: AsymptoticRegime,
}

impl AsymptoticReport {
    /// Largest `M` with `1/M > f`; `None` when unbounded (`f = 0`), zero when
    /// no `M >= 1` qualifies.
    pub fn asymptotic_max_m(&self) -> Option<u64> {
        let f = self.f_threshold;
        if f == 0.0 {
            return None;
        }
        if !f.is_finite() || f >= 1.0 || self.regime == AsymptoticRegime::NeverEntangled {
            return Some(0);
        }
        let mut m = (1.0 / f).floor() as u64;
        while m > 0 && 1.0 / (m as f64) <= f {
            m -= 1;
        }
        Some(m)
    }
}

/// Large-`N` threshold on the cut fraction. Only `a` and the larger of
/// `|c|, |d|` survive the limit.
pub fn asymptotic_report(p: &DerivedParams) -> AsymptoticReport {
    let (hi_ab, lo_ab) = p.ab_ordered();
    let (hi_cd, lo_cd) = p.cd_abs_ordered();
    let robust_pair_ok = hi_cd * hi_cd > p.a * p.b;
    if p.is_balanced() {
        return AsymptoticReport {
            f_threshold: f64::INFINITY,
            robust_pair_ok,
            finite_equals_asymptotic_alpha: None,
            regime: AsymptoticRegime::NeverEntangled,
        };
    }
    if hi_cd == 0.0 {
        return AsymptoticReport {
            f_threshold: f64::INFINITY,
            robust_pair_ok,
            finite_equals_asymptotic_alpha: None,
            regime: AsymptoticRegime::Degenerate,
        };
    }
    let f_threshold = if lo_ab == 0.0 {
        0.0
    } else {
        (hi_ab / hi_cd).ln() / (hi_ab / lo_ab).ln()
    };
    let finite_equals_asymptotic_alpha = (lo_cd > 0.0 && lo_ab > 0.0)
        .then(|| 0.5 * (1.0 - (hi_cd / lo_cd).ln() / (hi_ab / lo_ab).ln()));
    AsymptoticReport {
        f_threshold,
        robust_pair_ok,
        finite_equals_asymptotic_alpha,
        regime: AsymptoticRegime::EntangledForAlphaAboveF,
    }
}

/// `|c| > b^α a^(1-α)` (relabelled so `a >= b`, `|c| >= |d|`).
pub fn asymptotic_condition(p: &DerivedParams, alpha: f64) -> bool {
    if p.is_balanced() {
        return false;
    }
    let (hi_ab, lo_ab) = p.ab_ordered();
    let (hi_cd, _) = p.cd_abs_ordered();
    hi_cd > lo_ab.powf(alpha) * hi_ab.powf(1.0 - alpha)
}

/// Result of the rearranged per-`N` inequality
/// `ln|c| > α ln b + (1-α) ln a + μ/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteNCondition {
    pub cut: CutSpec,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub alpha: f64,
    /// `ln(1 + (b/a)^((1-2α)N)) - ln(1 ± |d/c|^N)`; the minus sign applies
    /// to odd `N` with `c d < 0`.
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub mu: f64,
    /// Left side, `ln|c|`.
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub lhs: f64,
    /// Right side, `α ln b + (1-α) ln a + μ/N`.
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub rhs: f64,
    /// `N (lhs - rhs)`, identical in exact arithmetic to the direct margin.
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub margin: f64,
    pub status: Verdict,
    /// `α* = (1 - ln|c/d| / ln(a/b)) / 2`; defined when `d != 0`.
    #[serde(serialize_with = "crate::real_fmt::serialize_opt_real")]
    pub alpha_star: Option<f64>,
}

pub fn finite_n_condition(p: &DerivedParams, cut: CutSpec) -> Result<FiniteNCondition> {
    if p.is_balanced() {
        return Err(Error::DegenerateLogForm("a = b"));
    }
    let (hi_ab, lo_ab) = p.ab_ordered();
    let (hi_cd, lo_cd) = p.cd_abs_ordered();
    if hi_cd == 0.0 {
        return Err(Error::DegenerateLogForm("c = d = 0"));
    }
    if lo_ab == 0.0 {
        return Err(Error::DegenerateLogForm("min(a, b) = 0"));
    }
    let (n, k) = (cut.n_qubits(), cut.k());
    let nf = n as f64;
    let alpha = cut.alpha();
    let ln_ab_ratio = (lo_ab / hi_ab).ln();
    let pop_term = ((n - 2 * k) as f64 * ln_ab_ratio).exp().ln_1p();
    let coh_term = if lo_cd == 0.0 {
        0.0
    } else {
        let ln_r_n = nf * ((lo_cd - hi_cd) / hi_cd).ln_1p();
        if p.opposite_signs() && n % 2 == 1 {
            // -inf when |c| = |d|: the coherence cancels exactly
            (-ln_r_n.exp_m1()).ln()
        } else {
            ln_r_n.exp().ln_1p()
        }
    };
    let mu = pop_term - coh_term;
    let lhs = hi_cd.ln();
    let base = alpha * lo_ab.ln() + (1.0 - alpha) * hi_ab.ln();
    let rhs = base + mu / nf;
    let margin = nf * hi_cd.ln() - k as f64 * lo_ab.ln() - (n - k) as f64 * hi_ab.ln() - mu;
    let alpha_star =
        (lo_cd > 0.0).then(|| 0.5 * (1.0 - (hi_cd / lo_cd).ln() / (hi_ab / lo_ab).ln()));
    Ok(FiniteNCondition {
        cut,
        alpha,
        mu,
        lhs,
        rhs,
        margin,
        status: Verdict::from_margin(margin),
        alpha_star,
    })
}

/// Behaviour of the `k : (N - k)` condition with `k` fixed as `N` grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FixedGroupLimit {
    /// Not entangled for any `N >= 2k`.
    FailsImmediately,
    /// Entangled at `n_star - 1`, and not entangled for every `N >= n_star`.
    FailsFrom { n_star: u64 },
    /// The proof of eventual failure does not apply because
    /// `max(|c|, |d|) = max(a, b)`: the limiting inequality is marginal.
    Boundary,
    /// `min(a, b) = 0` makes `2λ` vanish identically while `Δ > 0`.
    NeverFails,
    /// The crossover exists but lies beyond the scan limit; `N >= upper_bound`
    /// is guaranteed to fail.
    BeyondScan { upper_bound: u64 },
}

/// Upper limit on the number of `N` values inspected by [`fixed_group_size_limit`].
pub const FIXED_GROUP_SCAN_LIMIT: u64 = 50_000_000;

/// Locates the last `N` at which a fixed-size group still separates.
///
/// With `A = max(a, b)`, `B = min(a, b)`, `m = max(|c|, |d|) < A`, the bounds
/// `Δ <= 2 m^N` and `2λ >= B^k A^(N-k)` show the cut fails for all
/// `N >= (ln 2 + k ln(A/B)) / ln(A/m)`. Below that bound the verdicts are
/// scanned downward.
pub fn fixed_group_size_limit(p: &DerivedParams, k: u64) -> Result<FixedGroupLimit> {
    let n_min = (2 * k).max(2);
    CutSpec::new(n_min, k)?;
    let (hi_ab, lo_ab) = p.ab_ordered();
    let (hi_cd, _) = p.cd_abs_ordered();
    let yes = |n: u64| cut_verdict(p, CutSpec::new(n, k).unwrap()).entangled == Verdict::Yes;
    if p.is_balanced() || hi_cd == 0.0 {
        return Ok(FixedGroupLimit::FailsImmediately);
    }
    if lo_ab == 0.0 {
        return Ok(FixedGroupLimit::NeverFails);
    }
    if hi_cd >= hi_ab - PROBABILITY_TOLERANCE {
        return Ok(FixedGroupLimit::Boundary);
    }
    let bound = (std::f64::consts::LN_2 + k as f64 * (hi_ab / lo_ab).ln()) / (hi_ab / hi_cd).ln();
    let bound = (bound.ceil().max(n_min as f64)) as u64;
    if bound - n_min > FIXED_GROUP_SCAN_LIMIT {
        return Ok(FixedGroupLimit::BeyondScan { upper_bound: bound });
    }
    let last_yes = (n_min..=bound).rev().find(|&n| yes(n));
    Ok(match last_yes {
        None => FixedGroupLimit::FailsImmediately,
        Some(n) => FixedGroupLimit::FailsFrom { n_star: n + 1 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParityProbe {
    pub class: ParityClass,
    pub n_even: u64,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub delta_even: f64,
    pub n_odd: u64,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub delta_odd: f64,
}

/// Sign class of `(c, d)` and `Δ` at `N` and `N + 1`.
pub fn parity_probe(p: &DerivedParams, n: u64) -> ParityProbe {
    let (n_even, n_odd) = if n.is_multiple_of(2) { (n, n + 1) } else { (n + 1, n) };
    ParityProbe {
        class: ParityClass::of(p),
        n_even,
        delta_even: delta(p, n_even),
        n_odd,
        delta_odd: delta(p, n_odd),
    }
}
