use rayon::prelude::*;
use serde::Serialize;

use super::config::{CutSelection, ResolvedSweep};
use super::rows::{CsvRecord, SweepRow};
use crate::cat_algebra::{cat_populations, CutSpec};
use crate::channel::{DerivedParams, PauliChannel};
use crate::criteria::{
    asymptotic_report, cut_verdict, max_distillable_m, parity_probe, AsymptoticRegime,
    AsymptoticReport, CutVerdict, ParityProbe, PartitionReport, Verdict,
};
use crate::error::{Error, Result};
use crate::oracle::{decohere_all, oracle_cut_verdict, verify_cat_diagonality, PtResult, N_MAX};
use crate::real_fmt::{opt, real, serialize_real};

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Everything `analyze` reports for one channel and one `N`.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub channel: [f64; 4],
    pub params: DerivedParams,
    pub n_qubits: u64,
    pub cuts: Vec<CutVerdict>,
    pub partition: PartitionReport,
    pub asymptotic: AsymptoticReport,
    /// `None` means unbounded.
    pub asymptotic_max_m: Option<u64>,
    pub parity: ParityProbe,
}

pub fn run_analyze(ch: &PauliChannel, n: u64) -> Result<AnalyzeReport> {
    let p = ch.params();
    let partition = max_distillable_m(&p, n)?;
    let cuts = CutSpec::all(n).map(|cut| cut_verdict(&p, cut)).collect();
    let asymptotic = asymptotic_report(&p);
    Ok(AnalyzeReport {
        channel: ch.probabilities(),
        params: p,
        n_qubits: n,
        cuts,
        partition,
        asymptotic,
        asymptotic_max_m: asymptotic.asymptotic_max_m(),
        parity: parity_probe(&p, n),
    })
}

impl AnalyzeReport {
    /// Sweep rows for every cut, without oracle columns.
    pub fn rows(&self) -> Vec<SweepRow> {
        let ch = PauliChannel::new(self.channel).expect("validated channel");
        self.cuts
            .iter()
            .map(|v| analytic_row(&ch, v, &self.partition, &self.asymptotic))
            .collect()
    }

    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let p = &self.params;
        let [p0, p1, p2, p3] = self.channel;
        let mut s = String::new();
        let _ = writeln!(s, "channel  pi = ({p0}, {p1}, {p2}, {p3})");
        let _ = writeln!(s, "params   a = {}, b = {}, c = {}, d = {}", p.a, p.b, p.c, p.d);
        let _ = writeln!(s, "N = {}   parity class: {}", self.n_qubits, self.partition.parity_class);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>6} {:>14} {:>14} {:>14}  verdict", "k", "delta", "two_lambda", "log_margin");
        for v in &self.cuts {
            let _ = writeln!(
                s,
                "{:>6} {:>14} {:>14} {:>14}  {}",
                v.cut.k(),
                real(v.delta),
                real(v.two_lambda),
                real(v.margin),
                v.entangled
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "min entangled k: {}",
            self.partition.min_entangled_k.map(|k| k.to_string()).unwrap_or_else(|| "none".into())
        );
        let _ = writeln!(
            s,
            "max distillable M: {}",
            self.partition.max_m.map(|m| m.to_string()).unwrap_or_else(|| "none".into())
        );
        let a = &self.asymptotic;
        let _ = writeln!(s, "asymptotic f(a,|c|): {}  ({})", real(a.f_threshold), regime_str(a.regime));
        let _ = writeln!(
            s,
            "asymptotic max M: {}",
            match self.asymptotic_max_m {
                None => "unbounded".to_string(),
                Some(m) => m.to_string(),
            }
        );
        let _ = writeln!(s, "balanced cut survives large N (c^2 > ab): {}", a.robust_pair_ok);
        let pp = &self.parity;
        let _ = writeln!(
            s,
            "delta(N={}) = {}, delta(N={}) = {}",
            pp.n_even,
            real(pp.delta_even),
            pp.n_odd,
            real(pp.delta_odd)
        );
        s
    }
}

fn analytic_row(
    ch: &PauliChannel,
    v: &CutVerdict,
    partition: &PartitionReport,
    asym: &AsymptoticReport,
) -> SweepRow {
    let [pi0, pi1, pi2, pi3] = ch.probabilities();
    let p = ch.params();
    SweepRow {
        pi0,
        pi1,
        pi2,
        pi3,
        a: p.a,
        b: p.b,
        c: p.c,
        d: p.d,
        n: v.cut.n_qubits(),
        k: v.cut.k(),
        delta: v.delta,
        two_lambda: v.two_lambda,
        log_margin: v.margin,
        verdict: v.entangled,
        max_m: partition.max_m,
        f_threshold: asym.f_threshold,
        parity_class: partition.parity_class,
        oracle_min_eig: None,
        oracle_nppt: None,
        agreement: None,
    }
}

/// Boundary verdicts count as agreeing with either oracle outcome.
pub fn agrees(verdict: Verdict, nppt: bool) -> bool {
    match verdict {
        Verdict::Boundary => true,
        Verdict::Yes => nppt,
        Verdict::No => !nppt,
    }
}

fn unit_rows(ch: &PauliChannel, n: u64, cuts: &CutSelection, oracle: bool) -> Result<Vec<SweepRow>> {
    let p = ch.params();
    let partition = max_distillable_m(&p, n)?;
    let asym = asymptotic_report(&p);
    let state = if oracle {
        Some(decohere_all(n as usize, ch)?)
    } else {
        None
    };
    cuts.ks(n, partition.min_entangled_k)
        .into_iter()
        .map(|k| {
            let v = cut_verdict(&p, CutSpec::new(n, k)?);
            let mut row = analytic_row(ch, &v, &partition, &asym);
            if let Some(state) = &state {
                let pt = oracle_cut_verdict(state, k as usize)?;
                row.oracle_min_eig = Some(pt.min_eigenvalue);
                row.oracle_nppt = Some(pt.nppt);
                row.agreement = Some(agrees(v.entangled, pt.nppt));
            }
            Ok(row)
        })
        .collect()
}

/// One row per `(channel, N, k)`, ordered by channel index, then `N`, then `k`.
pub fn run_sweep(cfg: &ResolvedSweep) -> Result<Vec<SweepRow>> {
    let units: Vec<(usize, u64)> = (0..cfg.channels.len())
        .flat_map(|ci| cfg.n_values.iter().map(move |&n| (ci, n)))
        .collect();
    log::info!(
        "sweep: {} channels x {} N values{}",
        cfg.channels.len(),
        cfg.n_values.len(),
        if cfg.oracle { " with oracle" } else { "" }
    );
    let chunks = with_pool(cfg.workers, || {
        units
            .par_iter()
            .map(|&(ci, n)| unit_rows(&cfg.channels[ci], n, &cfg.cuts, cfg.oracle))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Agree,
    /// Analytic yes with a PSD partial transpose; never allowed.
    AnalyticYesOracleNo,
    /// Analytic no with an NPPT oracle result; recorded, not an error.
    AnalyticNoOracleYes,
    Boundary,
}

pub fn classify(verdict: Verdict, nppt: bool) -> Classification {
    match (verdict, nppt) {
        (Verdict::Boundary, _) => Classification::Boundary,
        (Verdict::Yes, true) | (Verdict::No, false) => Classification::Agree,
        (Verdict::Yes, false) => Classification::AnalyticYesOracleNo,
        (Verdict::No, true) => Classification::AnalyticNoOracleYes,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyPoint {
    pub channel_index: usize,
    pub channel: [f64; 4],
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    pub analytic: Verdict,
    #[serde(serialize_with = "serialize_real")]
    pub log_margin: f64,
    #[serde(serialize_with = "serialize_real")]
    pub oracle_min_eig: f64,
    pub oracle_nppt: bool,
    pub classification: Classification,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifySummary {
    pub points: usize,
    pub agree: usize,
    pub forbidden: usize,
    pub necessity_gap: usize,
    pub boundary: usize,
    /// Largest off-diagonal cat-basis element over all simulated states.
    #[serde(serialize_with = "serialize_real")]
    pub max_cat_offdiag: f64,
    /// Largest deviation between simulated and closed-form cat populations.
    #[serde(serialize_with = "serialize_real")]
    pub max_population_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub summary: VerifySummary,
    pub points: Vec<VerifyPoint>,
}

impl VerifyReport {
    pub fn has_forbidden(&self) -> bool {
        self.summary.forbidden > 0
    }
}

struct UnitCheck {
    points: Vec<VerifyPoint>,
    max_offdiag: f64,
    max_pop_err: f64,
}

fn verify_unit(ci: usize, ch: &PauliChannel, n: u64, cuts: &CutSelection) -> Result<UnitCheck> {
    let p = ch.params();
    let state = decohere_all(n as usize, ch)?;
    let diag = verify_cat_diagonality(&state);
    let mut max_pop_err: f64 = 0.0;
    for pair in &diag.pairs {
        let j = u64::from(pair.zeros);
        let group = j.min(n - j);
        let c = cat_populations(&p, n, group)?;
        let (plus, minus) = if group == 0 {
            (c.alpha0_plus, c.alpha0_minus)
        } else {
            (c.alpha_k_plus, c.alpha_k_minus)
        };
        max_pop_err = max_pop_err.max((plus - pair.plus).abs()).max((minus - pair.minus).abs());
    }
    let min_k = crate::criteria::min_entangled_k(&p, n)?;
    let points = cuts
        .ks(n, min_k)
        .into_iter()
        .map(|k| {
            let v = cut_verdict(&p, CutSpec::new(n, k)?);
            let PtResult {
                min_eigenvalue,
                nppt,
                ..
            } = oracle_cut_verdict(&state, k as usize)?;
            Ok(VerifyPoint {
                channel_index: ci,
                channel: ch.probabilities(),
                n,
                k,
                analytic: v.entangled,
                log_margin: v.margin,
                oracle_min_eig: min_eigenvalue,
                oracle_nppt: nppt,
                classification: classify(v.entangled, nppt),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnitCheck {
        points,
        max_offdiag: diag.max_off_diagonal,
        max_pop_err,
    })
}

/// Oracle campaign: every grid point is checked against a dense simulation.
pub fn run_verify(cfg: &ResolvedSweep) -> Result<VerifyReport> {
    if let Some(&n) = cfg.n_values.iter().find(|&&n| n as usize > N_MAX) {
        return Err(Error::SizeTooLarge {
            n: n as usize,
            max: N_MAX,
        });
    }
    let units: Vec<(usize, u64)> = (0..cfg.channels.len())
        .flat_map(|ci| cfg.n_values.iter().map(move |&n| (ci, n)))
        .collect();
    let checks = with_pool(cfg.workers, || {
        units
            .par_iter()
            .map(|&(ci, n)| verify_unit(ci, &cfg.channels[ci], n, &cfg.cuts))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut summary = VerifySummary::default();
    let mut points = Vec::new();
    for check in checks {
        summary.max_cat_offdiag = summary.max_cat_offdiag.max(check.max_offdiag);
        summary.max_population_error = summary.max_population_error.max(check.max_pop_err);
        for pt in check.points {
            summary.points += 1;
            match pt.classification {
                Classification::Agree => summary.agree += 1,
                Classification::AnalyticYesOracleNo => summary.forbidden += 1,
                Classification::AnalyticNoOracleYes => summary.necessity_gap += 1,
                Classification::Boundary => summary.boundary += 1,
            }
            points.push(pt);
        }
    }
    if summary.forbidden > 0 {
        log::error!("{} points with analytic yes but PSD partial transpose", summary.forbidden);
    }
    if summary.necessity_gap > 0 {
        log::warn!("{} points NPPT in the oracle but not by the analytic test", summary.necessity_gap);
    }
    Ok(VerifyReport { summary, points })
}

/// Threshold table row: one channel at one `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub channel: [f64; 4],
    pub params: DerivedParams,
    #[serde(serialize_with = "serialize_real")]
    pub f_threshold: f64,
    /// `"unbounded"` when `f = 0`.
    #[serde(rename = "asymptotic_max_M", serialize_with = "serialize_max_m")]
    pub asymptotic_max_m: Option<u64>,
    pub regime: AsymptoticRegime,
    #[serde(rename = "N")]
    pub n: u64,
    pub min_entangled_k: Option<u64>,
    #[serde(rename = "max_M")]
    pub max_m: Option<u64>,
}

fn serialize_max_m<S: serde::Serializer>(x: &Option<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(m) => s.serialize_u64(*m),
        None => s.serialize_str("unbounded"),
    }
}

fn regime_str(r: AsymptoticRegime) -> &'static str {
    match r {
        AsymptoticRegime::EntangledForAlphaAboveF => "entangled-for-alpha-above-f",
        AsymptoticRegime::NeverEntangled => "never-entangled",
        AsymptoticRegime::Degenerate => "degenerate",
    }
}

impl CsvRecord for ThresholdRow {
    fn header() -> Vec<&'static str> {
        vec![
            "pi0", "pi1", "pi2", "pi3", "a", "b", "c", "d", "f_threshold", "asymptotic_max_M",
            "regime", "N", "min_entangled_k", "max_M",
        ]
    }

    fn record(&self) -> Vec<String> {
        let p = &self.params;
        let mut out: Vec<String> = self.channel.iter().map(|&x| real(x)).collect();
        out.extend([p.a, p.b, p.c, p.d].map(real));
        out.push(real(self.f_threshold));
        out.push(self.asymptotic_max_m.map(|m| m.to_string()).unwrap_or_else(|| "unbounded".into()));
        out.push(regime_str(self.regime).to_string());
        out.push(self.n.to_string());
        out.push(opt(self.min_entangled_k));
        out.push(opt(self.max_m));
        out
    }
}

/// Asymptotic threshold and finite-`N` maximal `M` for each channel.
pub fn run_threshold(
    channels: &[PauliChannel],
    n_values: &[u64],
    workers: Option<usize>,
) -> Result<Vec<ThresholdRow>> {
    if let Some(&n) = n_values.iter().find(|&&n| n < 2) {
        return Err(Error::Config(format!("N = {n} is below 2")));
    }
    let units: Vec<(usize, u64)> = (0..channels.len())
        .flat_map(|ci| n_values.iter().map(move |&n| (ci, n)))
        .collect();
    with_pool(workers, || {
        units
            .par_iter()
            .map(|&(ci, n)| {
                let ch = &channels[ci];
                let p = ch.params();
                let asym = asymptotic_report(&p);
                let part = max_distillable_m(&p, n)?;
                Ok(ThresholdRow {
                    channel: ch.probabilities(),
                    params: p,
                    f_threshold: asym.f_threshold,
                    asymptotic_max_m: asym.asymptotic_max_m(),
                    regime: asym.regime,
                    n,
                    min_entangled_k: part.min_entangled_k,
                    max_m: part.max_m,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?
}
