//! Closed-form populations of the decohered GHZ state in the cat basis.
//!
//! After independent Pauli noise the state stays diagonal in the basis
//! `(|x> ± |x̄>)/√2`. For a bit string `x` with `k` zeros, the pair population
//! is `a^k b^(N-k) + b^k a^(N-k)` and the signed population difference is
//! `c^k d^(N-k) + d^k c^(N-k)`. The `k = 0` pair carries the GHZ coherence
//! `Δ = |c^N + d^N|`.

use serde::{Deserialize, Serialize};

use crate::channel::DerivedParams;
use crate::error::{Error, Result};
use crate::log_value::LogValue;

/// A bipartite cut `k : (N - k)` with `1 <= k <= N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CutSpec {
    n_qubits: u64,
    k: u64,
}

impl CutSpec {
    pub fn new(n_qubits: u64, k: u64) -> Result<Self> {
        if n_qubits < 2 || k < 1 || k > n_qubits / 2 {
            return Err(Error::InvalidCut { n: n_qubits, k });
        }
        Ok(Self { n_qubits, k })
    }

    pub fn n_qubits(&self) -> u64 {
        self.n_qubits
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Cut fraction `k / N`.
    pub fn alpha(&self) -> f64 {
        self.k as f64 / self.n_qubits as f64
    }

    /// All admissible cuts for `n` qubits, smallest side first.
    pub fn all(n_qubits: u64) -> impl Iterator<Item = CutSpec> {
        (1..=n_qubits / 2).map(move |k| CutSpec { n_qubits, k })
    }
}

/// Cat-basis populations for the `k = 0` pair and one representative pair of group `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatCoefficients {
    pub n_qubits: u64,
    pub k: u64,
    /// `|alpha0_plus - alpha0_minus|`
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub delta: f64,
    /// `alpha_k_plus + alpha_k_minus`
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub two_lambda: f64,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub alpha0_plus: f64,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub alpha0_minus: f64,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub alpha_k_plus: f64,
    #[serde(serialize_with = "crate::real_fmt::serialize_real")]
    pub alpha_k_minus: f64,
}

pub(crate) fn powu(x: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(e) => x.powi(e),
        Err(_) => x.powf(n as f64),
    }
}

/// `x^k y^(n-k) + y^k x^(n-k)` in linear arithmetic.
pub fn symmetric_term(x: f64, y: f64, k: u64, n: u64) -> f64 {
    debug_assert!(k <= n);
    powu(x, k) * powu(y, n - k) + powu(y, k) * powu(x, n - k)
}

/// `ln(min/max)` for `0 < min <= max`, exact enough when the two are close.
fn ln_ratio(lo: f64, hi: f64) -> f64 {
    ((lo - hi) / hi).ln_1p()
}

/// True when `c^N` and `d^N` have strictly opposite signs.
fn terms_cancel(p: &DerivedParams, n: u64) -> bool {
    p.opposite_signs() && n % 2 == 1
}

/// Signed `c^N + d^N` in log domain.
///
/// Near-cancelling terms are evaluated as `|c|^N (1 - (|d|/|c|)^N)` with
/// `expm1`, which keeps full relative accuracy when `|c| ≈ |d|`.
pub fn coherence_log(p: &DerivedParams, n: u64) -> LogValue {
    let (hi, lo) = p.cd_abs_ordered();
    if hi == 0.0 {
        return LogValue::ZERO;
    }
    let nf = n as f64;
    let hi_sign: i8 = if p.c.abs() >= p.d.abs() {
        if p.c < 0.0 && n % 2 == 1 { -1 } else { 1 }
    } else if p.d < 0.0 && n % 2 == 1 {
        -1
    } else {
        1
    };
    let ln_hi_n = nf * hi.ln();
    if lo == 0.0 {
        return LogValue::new(hi_sign, ln_hi_n);
    }
    let ln_ratio_n = nf * ln_ratio(lo, hi);
    if terms_cancel(p, n) {
        if lo == hi {
            return LogValue::ZERO;
        }
        LogValue::new(hi_sign, ln_hi_n + (-ln_ratio_n.exp_m1()).ln())
    } else {
        LogValue::new(hi_sign, ln_hi_n + ln_ratio_n.exp().ln_1p())
    }
}

/// `Δ = |c^N + d^N|` as a log-domain value.
pub fn delta_log(p: &DerivedParams, n: u64) -> LogValue {
    coherence_log(p, n).abs()
}

/// `Δ = |c^N + d^N|` in linear arithmetic (cancellation-safe for odd `N`
/// with opposite-sign `c, d`).
pub fn delta(p: &DerivedParams, n: u64) -> f64 {
    let (hi, lo) = p.cd_abs_ordered();
    if hi == 0.0 {
        return 0.0;
    }
    let hi_n = powu(hi, n);
    if lo == 0.0 {
        return hi_n;
    }
    if terms_cancel(p, n) {
        hi_n * -(n as f64 * ln_ratio(lo, hi)).exp_m1()
    } else {
        hi_n + powu(lo, n)
    }
}

/// `2λ = a^k b^(N-k) + b^k a^(N-k)` in log domain.
pub fn two_lambda_log(p: &DerivedParams, cut: CutSpec) -> LogValue {
    let (n, k) = (cut.n_qubits(), cut.k());
    // both terms contain a and b to a positive power
    if p.a == 0.0 || p.b == 0.0 {
        return LogValue::ZERO;
    }
    let (la, lb) = (p.a.ln(), p.b.ln());
    let t1 = LogValue::positive(k as f64 * la + (n - k) as f64 * lb);
    let t2 = LogValue::positive(k as f64 * lb + (n - k) as f64 * la);
    t1 + t2
}

/// `2λ = a^k b^(N-k) + b^k a^(N-k)` in linear arithmetic.
pub fn two_lambda(p: &DerivedParams, cut: CutSpec) -> f64 {
    symmetric_term(p.a, p.b, cut.k(), cut.n_qubits())
}

/// Populations of `|Ψ0±>` and of one `k`-group pair `|Ψk±>`; `k = 0` is allowed
/// here and returns the `|Ψ0±>` pair in both slots.
pub fn cat_populations(p: &DerivedParams, n: u64, k: u64) -> Result<CatCoefficients> {
    if n < 2 || k > n / 2 {
        return Err(Error::InvalidCut { n, k });
    }
    let pop0 = symmetric_term(p.a, p.b, 0, n) / 2.0;
    let coh0 = coherence_log(p, n).to_f64() / 2.0;
    let popk = symmetric_term(p.a, p.b, k, n);
    let cohk = if k == 0 {
        2.0 * coh0
    } else {
        symmetric_term(p.c, p.d, k, n)
    };
    let (alpha0_plus, alpha0_minus) = (pop0 + coh0, pop0 - coh0);
    Ok(CatCoefficients {
        n_qubits: n,
        k,
        delta: delta(p, n),
        two_lambda: popk,
        alpha0_plus,
        alpha0_minus,
        alpha_k_plus: (popk + cohk) / 2.0,
        alpha_k_minus: (popk - cohk) / 2.0,
    })
}

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Number of cat-basis states in group `k`: `2 C(N, k)`, or `C(N, N/2)` for the
/// middle group of even `N`.
pub fn count_k_group(n: u64, k: u64) -> Result<Option<u128>> {
    if n < 2 || k < 1 || k > n / 2 {
        return Err(Error::InvalidCut { n, k });
    }
    let c = binomial(n, k);
    Ok(if 2 * k == n { c } else { c.and_then(|c| c.checked_mul(2)) })
}

/// Sum of all `2^N` cat-basis populations, built from per-group representatives.
pub fn population_trace(p: &DerivedParams, n: u64) -> Result<f64> {
    let mut total = {
        let c0 = cat_populations(p, n, 0)?;
        c0.alpha0_plus + c0.alpha0_minus
    };
    for k in 1..=n / 2 {
        let members = count_k_group(n, k)?.ok_or(Error::InvalidCut { n, k })? as f64;
        let c = cat_populations(p, n, k)?;
        // two members (±) per pair
        total += members / 2.0 * (c.alpha_k_plus + c.alpha_k_minus);
    }
    Ok(total)
}
