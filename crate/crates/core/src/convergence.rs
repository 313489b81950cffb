//! Finite-window certifiers for the three convergence rules, boundedness,
//! norms, and sums of double series.
//!
//! A certifier never proves a limit: it scans a window schedule and returns
//! `converges` when tail residuals fall below tolerance on the last two
//! entries, `unbounded` when window sups grow by at least `growth_factor`
//! across consecutive entries, and `inconclusive` otherwise. `inconclusive`
//! is a first-class outcome, not an error.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::seq::DoubleSequence;
use crate::window::{Window, WindowSchedule};

/// The limit notion applied to arrays and series: Pringsheim (`p`), bounded
/// Pringsheim (`bp`), or regular (`r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    P,
    Bp,
    R,
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        match s {
            "p" => Ok(Rule::P),
            "bp" => Ok(Rule::Bp),
            "r" => Ok(Rule::R),
            other => Err(Error::InvalidSpec(format!("unknown rule `{other}` (expected p|bp|r)"))),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::P => "p",
            Rule::Bp => "bp",
            Rule::R => "r",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Unbounded,
    Inconclusive,
}

/// Stats for one schedule window. `tail_residual` is `None` for certifiers
/// that have no limit estimate (pure boundedness checks).
#[derive(Debug, Clone, Serialize)]
pub struct WindowEvidence {
    pub window: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_residual: Option<f64>,
    pub sup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    /// What was certified: "p", "bp", "r", "bounded", or a sum label such as
    /// "abs_sum" / "lq(2)".
    pub rule: String,
    pub verdict: Verdict,
    /// The limit estimate for `converges`; for boundedness checks, the sup.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    /// Sup of |values| over the largest window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup: Option<f64>,
    pub evidence: Vec<WindowEvidence>,
    /// Named side values (row/column limits for the r rule, raw sums for
    /// norm certifiers).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, f64>,
}

impl ConvergenceReport {
    pub fn converges(&self) -> bool {
        self.verdict == Verdict::Converges
    }
}

// ---------------------------------------------------------------------------
// Verdict primitives shared by every certifier in the crate.
// ---------------------------------------------------------------------------

/// Sup growth of factor >= `g` across the last two consecutive pairs.
pub(crate) fn unbounded_by_growth(sups: &[f64], g: f64) -> bool {
    let k = sups.len();
    k >= 3 && sups[k - 3] > 0.0 && sups[k - 2] >= g * sups[k - 3] && sups[k - 1] >= g * sups[k - 2]
}

/// Tail residuals within `tol` on the last two schedule entries.
pub(crate) fn residuals_settled(resids: &[f64], tol: f64) -> bool {
    let k = resids.len();
    k >= 2 && resids[k - 1] <= tol && resids[k - 2] <= tol
}

pub(crate) fn p_verdict(resids: &[f64], sups: &[f64], tol: f64, growth: f64) -> Verdict {
    if residuals_settled(resids, tol) {
        Verdict::Converges
    } else if unbounded_by_growth(sups, growth) {
        Verdict::Unbounded
    } else {
        Verdict::Inconclusive
    }
}

/// Boundedness: window sups stable (within tol, scale-aware) on the last two
/// steps. Sups over nested windows are nondecreasing, so stability means the
/// array has stopped revealing new magnitude.
pub(crate) fn bounded_verdict(sups: &[f64], tol: f64, growth: f64) -> Verdict {
    let k = sups.len();
    let step = |i: usize| sups[i] - sups[i - 1] <= tol * sups[i].abs().max(1.0);
    if k >= 3 && step(k - 1) && step(k - 2) {
        Verdict::Converges
    } else if unbounded_by_growth(sups, growth) {
        Verdict::Unbounded
    } else {
        Verdict::Inconclusive
    }
}

// ---------------------------------------------------------------------------
// The window-scan engine over an arbitrary cell evaluator.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub(crate) struct WindowStats {
    pub sup: f64,
    pub resid: f64,
}

pub(crate) fn scan_window(eval: &impl Fn(usize, usize) -> f64, w: Window, lhat: f64) -> WindowStats {
    // Pringsheim tail: BOTH indices beyond half the window.
    let (tm, tn) = (w.m_max / 2, w.n_max / 2);
    let mut sup = 0.0f64;
    let mut resid = 0.0f64;
    for m in 0..=w.m_max {
        for n in 0..=w.n_max {
            let v = eval(m, n);
            sup = sup.max(v.abs());
            if m > tm && n > tn {
                resid = resid.max((v - lhat).abs());
            }
        }
    }
    WindowStats { sup, resid }
}

/// 1-D certifier used for the fringe rows/columns of the r rule: same
/// tail-residual and growth logic in a single index.
pub(crate) fn certify_line(
    eval: &impl Fn(usize) -> f64,
    lengths: &[usize],
    tol: f64,
    growth: f64,
) -> (Verdict, f64) {
    let lhat = eval(*lengths.last().expect("schedule nonempty"));
    let mut resids = Vec::with_capacity(lengths.len());
    let mut sups = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let mut sup = 0.0f64;
        let mut resid = 0.0f64;
        for j in 0..=len {
            let v = eval(j);
            sup = sup.max(v.abs());
            if j > len / 2 {
                resid = resid.max((v - lhat).abs());
            }
        }
        resids.push(resid);
        sups.push(sup);
    }
    (p_verdict(&resids, &sups, tol, growth), lhat)
}

/// Core rule certifier over an arbitrary evaluator. Used for sequence tables
/// and for derived arrays (row sums of matrices, deviation sums, ...).
pub(crate) fn certify_eval(
    eval: &impl Fn(usize, usize) -> f64,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    label: &str,
) -> ConvergenceReport {
    let largest = sched.largest();
    let lhat = eval(largest.m_max, largest.n_max);
    let stats: Vec<WindowStats> =
        sched.windows().iter().map(|w| scan_window(eval, *w, lhat)).collect();
    let resids: Vec<f64> = stats.iter().map(|s| s.resid).collect();
    let sups: Vec<f64> = stats.iter().map(|s| s.sup).collect();

    let mut aux = BTreeMap::new();
    let verdict = match rule {
        Rule::P => p_verdict(&resids, &sups, cfg.tol, cfg.growth_factor),
        Rule::Bp => compose_bp(&resids, &sups, cfg),
        Rule::R => {
            let bp = compose_bp(&resids, &sups, cfg);
            let lines = fringe_lines(eval, cfg, sched, &mut aux);
            match (bp, lines) {
                (Verdict::Converges, Verdict::Converges) => Verdict::Converges,
                _ if unbounded_by_growth(&sups, cfg.growth_factor) => Verdict::Unbounded,
                _ if lines == Verdict::Unbounded => Verdict::Unbounded,
                _ => Verdict::Inconclusive,
            }
        }
    };

    ConvergenceReport {
        rule: label.to_string(),
        verdict,
        limit: (verdict == Verdict::Converges).then_some(lhat),
        sup: Some(sups[sups.len() - 1]),
        evidence: evidence_from(sched, &resids, &sups),
        aux,
    }
}

pub(crate) fn compose_bp(resids: &[f64], sups: &[f64], cfg: &RunConfig) -> Verdict {
    let p = p_verdict(resids, sups, cfg.tol, cfg.growth_factor);
    let b = bounded_verdict(sups, cfg.tol, cfg.growth_factor);
    match (p, b) {
        (Verdict::Converges, Verdict::Converges) => Verdict::Converges,
        _ if unbounded_by_growth(sups, cfg.growth_factor) => Verdict::Unbounded,
        _ => Verdict::Inconclusive,
    }
}

/// Certifies the first `fringe` rows and columns as 1-D sequences, recording
/// converged line limits in `aux`. Returns the join of the line verdicts.
fn fringe_lines(
    eval: &impl Fn(usize, usize) -> f64,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    aux: &mut BTreeMap<String, f64>,
) -> Verdict {
    let largest = sched.largest();
    let col_lengths: Vec<usize> = sched.windows().iter().map(|w| w.n_max).collect();
    let row_lengths: Vec<usize> = sched.windows().iter().map(|w| w.m_max).collect();
    let fringe_m = cfg.fringe.min(largest.m_max + 1);
    let fringe_n = cfg.fringe.min(largest.n_max + 1);
    let mut saw_unbounded = false;
    let mut all_converge = true;
    for m0 in 0..fringe_m {
        let (v, l) = certify_line(&|n| eval(m0, n), &col_lengths, cfg.tol, cfg.growth_factor);
        match v {
            Verdict::Converges => {
                aux.insert(format!("row_limit_{m0}"), l);
            }
            Verdict::Unbounded => saw_unbounded = true,
            Verdict::Inconclusive => {}
        }
        all_converge &= v == Verdict::Converges;
    }
    for n0 in 0..fringe_n {
        let (v, l) = certify_line(&|m| eval(m, n0), &row_lengths, cfg.tol, cfg.growth_factor);
        match v {
            Verdict::Converges => {
                aux.insert(format!("col_limit_{n0}"), l);
            }
            Verdict::Unbounded => saw_unbounded = true,
            Verdict::Inconclusive => {}
        }
        all_converge &= v == Verdict::Converges;
    }
    if all_converge {
        Verdict::Converges
    } else if saw_unbounded {
        Verdict::Unbounded
    } else {
        Verdict::Inconclusive
    }
}

pub(crate) fn evidence_from(
    sched: &WindowSchedule,
    resids: &[f64],
    sups: &[f64],
) -> Vec<WindowEvidence> {
    sched
        .windows()
        .iter()
        .zip(resids.iter().zip(sups.iter()))
        .map(|(w, (&r, &s))| WindowEvidence {
            window: [w.m_max, w.n_max],
            tail_residual: Some(r),
            sup: s,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Public certifiers on sequences and grids.
// ---------------------------------------------------------------------------

/// Rule certifier on a pre-materialized grid (must cover the schedule's
/// largest window).
pub fn certify_grid(
    g: &Grid<f64>,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConvergenceReport {
    let largest = sched.largest();
    debug_assert!(g.rows() > largest.m_max && g.cols() > largest.n_max);
    certify_eval(&|m, n| g.get(m, n), rule, cfg, sched, &rule.to_string())
}

fn sequence_grid(x: &DoubleSequence, cfg: &RunConfig) -> Result<(Grid<f64>, WindowSchedule)> {
    let sched = cfg.window_schedule()?;
    let g = x.table_f64(sched.largest(), cfg.cell_cap)?;
    Ok((g, sched))
}

/// Pringsheim limit certifier: `|x_{mn} - l| < eps` once BOTH indices are
/// large; early rows and columns are excluded (so `boos` p-converges to 0
/// even though its row 0 is unbounded).
pub fn p_limit(x: &DoubleSequence, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let (g, sched) = sequence_grid(x, cfg)?;
    Ok(certify_grid(&g, Rule::P, cfg, &sched))
}

/// Boundedness certifier. `converges(s)` means "bounded, with sup estimate
/// `s` stable across the schedule".
pub fn bounded(x: &DoubleSequence, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let (g, sched) = sequence_grid(x, cfg)?;
    Ok(bounded_grid(&g, cfg, &sched))
}

pub(crate) fn bounded_grid(
    g: &Grid<f64>,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConvergenceReport {
    let sups: Vec<f64> = sched
        .windows()
        .iter()
        .map(|w| {
            let mut sup = 0.0f64;
            for m in 0..=w.m_max {
                for n in 0..=w.n_max {
                    sup = sup.max(g.get(m, n).abs());
                }
            }
            sup
        })
        .collect();
    let verdict = bounded_verdict(&sups, cfg.tol, cfg.growth_factor);
    let sup = sups[sups.len() - 1];
    ConvergenceReport {
        rule: "bounded".into(),
        verdict,
        limit: (verdict == Verdict::Converges).then_some(sup),
        sup: Some(sup),
        evidence: sched
            .windows()
            .iter()
            .zip(&sups)
            .map(|(w, &s)| WindowEvidence { window: [w.m_max, w.n_max], tail_residual: None, sup: s })
            .collect(),
        aux: BTreeMap::new(),
    }
}

/// Regular-convergence certifier: the bp check plus 1-D certification of the
/// first `fringe` rows and columns; converged line limits are recorded in
/// `aux` and are NOT required to equal the Pringsheim limit.
pub fn r_limit(x: &DoubleSequence, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let (g, sched) = sequence_grid(x, cfg)?;
    Ok(certify_grid(&g, Rule::R, cfg, &sched))
}

/// Dispatch on a rule tag.
pub fn certify_rule(x: &DoubleSequence, rule: Rule, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let (g, sched) = sequence_grid(x, cfg)?;
    Ok(certify_grid(&g, rule, cfg, &sched))
}

/// `sup_norm_delta(x)` is exactly `bounded(delta(x))` — the content of the
/// norm identity ‖x‖ = ‖Δx‖_∞ behind Theorem 2.2.
pub fn sup_norm_delta(x: &DoubleSequence, cfg: &RunConfig) -> Result<ConvergenceReport> {
    bounded(&x.delta(), cfg)
}

// ---------------------------------------------------------------------------
// Monotone-sum certifier (series of nonnegative terms).
// ---------------------------------------------------------------------------

/// Window sums of a nonnegative term grid, computed incrementally over the
/// ring of cells each schedule step adds.
pub(crate) fn window_sums(g: &Grid<f64>, sched: &WindowSchedule) -> Vec<f64> {
    let mut sums = Vec::with_capacity(sched.len());
    let mut acc = 0.0f64;
    let mut prev: Option<Window> = None;
    for &w in sched.windows() {
        match prev {
            None => {
                for m in 0..=w.m_max {
                    for n in 0..=w.n_max {
                        acc += g.get(m, n);
                    }
                }
            }
            Some(p) => {
                // New columns over all rows, then new rows over old columns.
                for m in 0..=w.m_max {
                    for n in p.n_max + 1..=w.n_max {
                        acc += g.get(m, n);
                    }
                }
                for m in p.m_max + 1..=w.m_max {
                    for n in 0..=p.n_max {
                        acc += g.get(m, n);
                    }
                }
            }
        }
        sums.push(acc);
        prev = Some(w);
    }
    sums
}

/// Certifies a nondecreasing partial-sum trajectory.
///
/// Beyond the plain stabilize-or-grow rules, two trend rules classify the
/// common slow regimes: increments that keep growing certify divergence
/// (logarithmic-product sums), and increments decaying geometrically (ratio
/// <= 0.9 across the last three) certify convergence with the last partial
/// sum as the estimate.
pub(crate) fn certify_monotone_sums(
    sums: &[f64],
    sched: &WindowSchedule,
    cfg: &RunConfig,
    label: &str,
) -> ConvergenceReport {
    let k = sums.len();
    assert!(k >= 3, "schedule guarantees at least 3 windows");
    let mut d = Vec::with_capacity(k);
    d.push(sums[0].max(0.0));
    for i in 1..k {
        d.push((sums[i] - sums[i - 1]).max(0.0));
    }
    let scaled_tol = |s: f64| cfg.tol * s.abs().max(1.0);

    let stabilized = d[k - 1] <= scaled_tol(sums[k - 1]) && d[k - 2] <= scaled_tol(sums[k - 2]);
    let growing_increments = d[k - 1] >= d[k - 2] * (1.0 - 1e-9)
        && d[k - 2] >= d[k - 3] * (1.0 - 1e-9)
        && d[k - 1] > scaled_tol(sums[k - 1]);
    let decaying_increments = d[k - 1] <= 0.9 * d[k - 2] && d[k - 2] <= 0.9 * d[k - 3];

    let verdict = if stabilized {
        Verdict::Converges
    } else if unbounded_by_growth(sums, cfg.growth_factor) || growing_increments {
        Verdict::Unbounded
    } else if decaying_increments {
        Verdict::Converges
    } else {
        Verdict::Inconclusive
    };

    ConvergenceReport {
        rule: label.to_string(),
        verdict,
        limit: (verdict == Verdict::Converges).then_some(sums[k - 1]),
        sup: Some(sums[k - 1]),
        evidence: sched
            .windows()
            .iter()
            .zip(d.iter().zip(sums.iter()))
            .map(|(w, (&inc, &s))| WindowEvidence {
                window: [w.m_max, w.n_max],
                tail_residual: Some(inc),
                sup: s,
            })
            .collect(),
        aux: BTreeMap::new(),
    }
}

pub(crate) fn certify_monotone_grid(
    terms: &Grid<f64>,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    label: &str,
) -> ConvergenceReport {
    certify_monotone_sums(&window_sums(terms, sched), sched, cfg, label)
}

/// Certifies `sum |x_{mn}|^q` over the schedule (the L_q membership sum).
pub fn lq_sum(x: &DoubleSequence, q: f64, cfg: &RunConfig) -> Result<ConvergenceReport> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidExponent(q));
    }
    let sched = cfg.window_schedule()?;
    let terms = x.abs().pow_abs(q)?.table_f64(sched.largest(), cfg.cell_cap)?;
    Ok(certify_monotone_grid(&terms, cfg, &sched, &format!("lq({q})")))
}

/// `lq_norm_delta(x, q)`: certifies `sum |Δx|^q` and reports the q-th root
/// of the limit estimate. The raw sum is kept in `aux["sum"]`.
pub fn lq_norm_delta(x: &DoubleSequence, q: f64, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let mut report = lq_sum(&x.delta(), q, cfg)?;
    report.rule = format!("lq_delta({q})");
    if let Some(s) = report.limit {
        report.aux.insert("sum".into(), s);
        report.limit = Some(s.powf(1.0 / q));
    }
    Ok(report)
}

/// Rule-v sum of the double series with terms `x`: builds the rectangular
/// partial-sum array (Eq. 1.2) and certifies it under `rule`.
pub fn v_sum(x: &DoubleSequence, rule: Rule, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let sched = cfg.window_schedule()?;
    let partial = x.prefix_sum().table_f64(sched.largest(), cfg.cell_cap)?;
    let mut report = certify_grid(&partial, rule, cfg, &sched);
    report.rule = format!("sum({rule})");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::catalog;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    fn named(name: &str) -> DoubleSequence {
        catalog(name, &serde_json::Value::Null).unwrap()
    }

    fn with(name: &str, params: serde_json::Value) -> DoubleSequence {
        catalog(name, &params).unwrap()
    }

    #[test]
    fn boos_p_converges_to_zero_but_is_unbounded() {
        let x = named("boos");
        let p = p_limit(&x, &cfg()).unwrap();
        assert_eq!(p.verdict, Verdict::Converges);
        assert!(p.limit.unwrap().abs() <= 1e-9);
        let b = bounded(&x, &cfg()).unwrap();
        assert_eq!(b.verdict, Verdict::Unbounded);
        let r = r_limit(&x, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Unbounded);
    }

    #[test]
    fn constants_converge_under_every_rule() {
        let x = with("constant", serde_json::json!({"c": 3}));
        for rule in [Rule::P, Rule::Bp, Rule::R] {
            let rep = certify_rule(&x, rule, &cfg()).unwrap();
            assert_eq!(rep.verdict, Verdict::Converges, "{rule}");
            assert_eq!(rep.limit, Some(3.0));
        }
        let b = bounded(&x, &cfg()).unwrap();
        assert_eq!(b.verdict, Verdict::Converges);
        assert_eq!(b.limit, Some(3.0));
    }

    #[test]
    fn delta_of_product_shift_p_converges_to_one() {
        let rep = p_limit(&named("product_shift").delta(), &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converges);
        assert!((rep.limit.unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn product_is_unbounded() {
        assert_eq!(bounded(&named("product"), &cfg()).unwrap().verdict, Verdict::Unbounded);
        assert_eq!(p_limit(&named("product"), &cfg()).unwrap().verdict, Verdict::Unbounded);
    }

    #[test]
    fn r_limit_of_finitely_supported_transform() {
        let rep = r_limit(&named("column0_indicator").delta(), &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converges);
        assert_eq!(rep.limit, Some(0.0));
        // All fringe lines converge to 0.
        for (_, &v) in &rep.aux {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn sup_norm_delta_of_product_is_one() {
        let rep = sup_norm_delta(&named("product"), &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converges);
        assert_eq!(rep.limit, Some(1.0));
    }

    #[test]
    fn lq_norm_of_column0_delta_is_the_qth_root_of_two() {
        for q in [1.0, 2.0, 4.0] {
            let rep = lq_norm_delta(&named("column0_indicator"), q, &cfg()).unwrap();
            assert_eq!(rep.verdict, Verdict::Converges, "q={q}");
            assert!((rep.limit.unwrap() - 2f64.powf(1.0 / q)).abs() <= 1e-9);
        }
        let zero = lq_norm_delta(&with("constant", serde_json::json!({"c": 0})), 2.0, &cfg()).unwrap();
        assert_eq!(zero.limit, Some(0.0));
        assert!(matches!(
            lq_norm_delta(&named("boos"), 0.5, &cfg()),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn column0_is_certified_outside_lq_by_the_increment_trend() {
        let rep = lq_sum(&named("column0_indicator"), 2.0, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Unbounded);
    }

    #[test]
    fn v_sums_match_the_catalog_examples() {
        let unit = with("unit", serde_json::json!({"i0": 2, "j0": 3}));
        let rep = v_sum(&unit, Rule::P, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converges);
        assert_eq!(rep.limit, Some(1.0));

        let geo = with("geometric", serde_json::json!({"rho": 0.5}));
        let rep = v_sum(&geo, Rule::P, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converges);
        assert!((rep.limit.unwrap() - 4.0).abs() <= 1e-9);

        let ones = with("constant", serde_json::json!({"c": 1}));
        assert_eq!(v_sum(&ones, Rule::P, &cfg()).unwrap().verdict, Verdict::Unbounded);
    }

    #[test]
    fn monotone_trend_rules_classify_slow_series() {
        // Harmonic-product partial sums (ln M)(ln N): increments keep growing.
        let harmonic = with("inv_power", serde_json::json!({"p": 1, "q": 1}));
        let rep = lq_sum(&harmonic, 1.0, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Unbounded);

        // zeta(2)^2-type sums: increments decay geometrically.
        let zeta = with("inv_power", serde_json::json!({"p": 2, "q": 2}));
        let rep = lq_sum(&zeta, 1.0, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converges);
        let expect = std::f64::consts::PI.powi(2) / 6.0;
        assert!((rep.limit.unwrap() - expect * expect).abs() < 5e-3, "got {:?}", rep.limit);
    }

    #[test]
    fn scale_equivariance_of_p_verdicts() {
        for name in ["boos", "product_shift", "geometric"] {
            let x = if name == "geometric" {
                with("geometric", serde_json::json!({"rho": 0.5}))
            } else {
                named(name)
            };
            let base = p_limit(&x, &cfg()).unwrap();
            for c in [-1.0f64, 2.0] {
                let scaled = p_limit(&x.scale(crate::scalar::Scalar::Float(c)), &cfg()).unwrap();
                assert_eq!(scaled.verdict, base.verdict, "{name} scale {c}");
                if let (Some(l), Some(ls)) = (base.limit, scaled.limit) {
                    assert!((ls - c * l).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn rule_hierarchy_on_a_few_members() {
        for x in [
            named("boos").delta(),
            with("constant", serde_json::json!({"c": 2})),
            named("column0_indicator").delta(),
        ] {
            let r = certify_rule(&x, Rule::R, &cfg()).unwrap();
            let bp = certify_rule(&x, Rule::Bp, &cfg()).unwrap();
            let p = certify_rule(&x, Rule::P, &cfg()).unwrap();
            if r.converges() {
                assert!(bp.converges());
                assert!((r.limit.unwrap() - bp.limit.unwrap()).abs() <= 1e-9);
            }
            if bp.converges() {
                assert!(p.converges());
                assert!((bp.limit.unwrap() - p.limit.unwrap()).abs() <= 1e-9);
            }
        }
    }
}
