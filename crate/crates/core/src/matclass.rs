//! Condition batteries for classes of four-dimensional matrix maps.
//!
//! A class `(X : Y)` collects the matrices that map every sequence of the
//! space `X` into `Y`. Each supported class is characterized by a finite
//! battery of conditions on the matrix: boundedness of absolute row sums,
//! entrywise limits, limits of row/column partial-sum families, deviation
//! sums against the entrywise limits, column-support bounds, and — for the
//! difference-domain classes — the same measurements applied to the tail
//! transform `t_{(m,n),(k,l)} = sum_{p>=k, q>=l} a_{(m,n),(p,q)}`.
//!
//! Batteries certify over the window schedule of the run configuration.
//! `holds` and `fails` verdicts are backed by concrete witnesses (attained
//! sups, diverging family members, nonzero probe entries); anything the
//! schedule cannot settle comes back `inconclusive`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::RunConfig;
use crate::convergence::{
    bounded_verdict, certify_eval, certify_line, compose_bp, evidence_from, p_verdict,
    unbounded_by_growth, Rule, Verdict, WindowEvidence,
};
use crate::difference::e_to_f;
use crate::duality::DualVerdict;
use crate::error::{Error, Result};
use crate::matrix::{BodyTag, FourDimMatrix};
use crate::window::{Window, WindowSchedule};

// ---------------------------------------------------------------------------
// Class identifiers.

/// Identifier of a matrix class `(X : Y)`.
///
/// The embedded [`Rule`] is the convergence notion of the codomain; it picks
/// the limit rule the battery certifies under. String ids follow the
/// `From_to_To` scheme, e.g. `"Cr_to_Cbp"` or `"CrDelta_to_Cr"`; `"domain"`
/// is an alias for `"CrDelta_to_Cr"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassId {
    /// `(C_r : C_v)`: battery (r1)-(r5) for `v` in `{p, bp}`, the sharper
    /// (4.7)-(4.10) battery for `v = r`.
    CrToCv(Rule),
    /// `(C_bp : C_v)`: battery (4.11)-(4.14) for `v = bp`, otherwise
    /// (r1)-(r3) plus the deviation conditions (bp1)-(bp2).
    CbpToCv(Rule),
    /// `(C_p : C_v)`: battery (r1)-(r3) plus the support conditions
    /// (p1)-(p2).
    CpToCv(Rule),
    /// `(C_r(Delta) : C_v)`: tail battery (s1)-(s7).
    CrDeltaToCv(Rule),
    /// `(C_r : C_r(Delta))`: (4.7)-(4.10) applied to `F = e_to_f(A)`.
    CrToCrDelta,
    /// `(C_bp : C_bp(Delta))`: (4.11)-(4.14) applied to `F = e_to_f(A)`.
    CbpToCbpDelta,
}

fn space_rule(name: &str) -> Option<Rule> {
    match name {
        "Cp" => Some(Rule::P),
        "Cbp" => Some(Rule::Bp),
        "Cr" => Some(Rule::R),
        _ => None,
    }
}

impl FromStr for ClassId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ClassId> {
        if s == "domain" {
            return Ok(ClassId::CrDeltaToCv(Rule::R));
        }
        let parsed = s.split_once("_to_").and_then(|(from, to)| match (from, to) {
            ("Cr", "CrDelta") => Some(ClassId::CrToCrDelta),
            ("Cbp", "CbpDelta") => Some(ClassId::CbpToCbpDelta),
            ("Cr", t) => space_rule(t).map(ClassId::CrToCv),
            ("Cbp", t) => space_rule(t).map(ClassId::CbpToCv),
            ("Cp", t) => space_rule(t).map(ClassId::CpToCv),
            ("CrDelta", t) => space_rule(t).map(ClassId::CrDeltaToCv),
            _ => None,
        });
        parsed.ok_or_else(|| Error::InvalidSpec(format!("unknown matrix class `{s}`")))
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cv = |r: Rule| match r {
            Rule::P => "Cp",
            Rule::Bp => "Cbp",
            Rule::R => "Cr",
        };
        match self {
            ClassId::CrToCv(v) => write!(f, "Cr_to_{}", cv(*v)),
            ClassId::CbpToCv(v) => write!(f, "Cbp_to_{}", cv(*v)),
            ClassId::CpToCv(v) => write!(f, "Cp_to_{}", cv(*v)),
            ClassId::CrDeltaToCv(v) => write!(f, "CrDelta_to_{}", cv(*v)),
            ClassId::CrToCrDelta => write!(f, "Cr_to_CrDelta"),
            ClassId::CbpToCbpDelta => write!(f, "Cbp_to_CbpDelta"),
        }
    }
}

impl Serialize for ClassId {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

// ---------------------------------------------------------------------------
// Reports.

/// A concrete piece of evidence attached to a condition verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionWitness {
    /// What the indices point at: `"sup_attained"`, `"growth"`,
    /// `"limit_attained"`, `"member_diverges"`, `"member_inconclusive"`,
    /// `"support_bound"`, `"support_probe"`, `"rows_finitely_supported"`, or
    /// `"unbounded_row"`.
    pub kind: String,
    /// Index tuple; the shape depends on `kind`: a cell `(m, n)`, a family
    /// member (`(i, j)` for entrywise conditions, `(axis, cut)` with axis 0
    /// for column cuts and 1 for row cuts), or a full entry `(m, n, k, l)`.
    pub indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Largest window indices `[m_max, n_max]` in force when recorded.
    pub window: [usize; 2],
}

/// Verdict for one condition of a battery.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// Condition id from the characterization: `"r1"`..`"r5"`, `"bp1"`,
    /// `"bp2"`, `"p1"`, `"p2"`, `"4.7"`..`"4.14"`, or `"s1"`..`"s7"`.
    pub condition_id: String,
    pub verdict: DualVerdict,
    /// Certified sup (for the sup conditions) or the limit of the
    /// largest-magnitude member, when the condition holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub witnesses: Vec<ConditionWitness>,
    /// Per-window trace backing the verdict; empty for structural checks.
    pub evidence: Vec<WindowEvidence>,
}

/// Outcome of a full class battery.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    /// Canonical class id, e.g. `"Cr_to_Cr"`.
    pub class: String,
    /// The matrix the battery actually measured (after the `e_to_f` or tail
    /// transform when the class calls for one).
    pub matrix: String,
    pub conditions: Vec<ConditionReport>,
    /// `holds` iff every condition holds; `fails` as soon as one fails.
    pub verdict: DualVerdict,
}

fn join_verdict(a: Verdict, b: Verdict) -> Verdict {
    use Verdict::*;
    match (a, b) {
        (Unbounded, _) | (_, Unbounded) => Unbounded,
        (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
        _ => Converges,
    }
}

fn join_dual(a: DualVerdict, b: DualVerdict) -> DualVerdict {
    use DualVerdict::*;
    match (a, b) {
        (Fails, _) | (_, Fails) => Fails,
        (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
        _ => Holds,
    }
}

// ---------------------------------------------------------------------------
// Streaming family certifier.
//
// The entrywise, partial-sum, and deviation conditions each quantify over a
// finite family of derived arrays (one per prefix index or cut). Scanning
// the matrix once per member would square the cost, so the scan below fills
// every member at a cell in a single pass over the row's support, tracking
// which members the support actually touched; untouched members take the
// family's default value at that cell.

trait Family {
    fn count(&self) -> usize;
    /// Value of a member at cells the row support does not touch.
    fn default(&self, member: usize) -> f64;
    /// Emit additive increments at cell `(m, n)`; the member's value there is
    /// `default(member)` plus everything emitted. Members may be hit several
    /// times per cell.
    fn scatter(&self, m: usize, n: usize, emit: &mut dyn FnMut(usize, f64));
    /// Index tuple identifying a member in witnesses.
    fn member_indices(&self, member: usize) -> Vec<usize>;
}

/// Values of all members at one cell.
fn cell_values(fam: &dyn Family, m: usize, n: usize) -> Vec<f64> {
    let mut vals: Vec<f64> = (0..fam.count()).map(|i| fam.default(i)).collect();
    fam.scatter(m, n, &mut |i, dv| vals[i] += dv);
    vals
}

struct FamilyScan {
    /// Corner-cell estimates of the member limits.
    lhats: Vec<f64>,
    /// `[window][member]` quadrant residuals against `lhats`.
    resids: Vec<Vec<f64>>,
    /// `[window][member]` sups of `|value|`.
    sups: Vec<Vec<f64>>,
}

fn scan_family(fam: &dyn Family, sched: &WindowSchedule) -> FamilyScan {
    let count = fam.count();
    let largest = sched.largest();
    let lhats = cell_values(fam, largest.m_max, largest.n_max);
    let defaults: Vec<f64> = (0..count).map(|i| fam.default(i)).collect();

    let mut scratch = vec![0.0f64; count];
    let mut seen = vec![false; count];
    let mut touched: Vec<usize> = Vec::new();

    let mut resids = Vec::with_capacity(sched.windows().len());
    let mut sups = Vec::with_capacity(sched.windows().len());
    for w in sched.windows() {
        let tm = w.m_max / 2;
        let tn = w.n_max / 2;
        let quad_cells = ((w.m_max - tm) * (w.n_max - tn)) as u64;
        let mut w_resid = vec![0.0f64; count];
        let mut w_sup = vec![0.0f64; count];
        let mut w_visits = vec![0u64; count];
        let mut q_visits = vec![0u64; count];
        for m in 0..=w.m_max {
            for n in 0..=w.n_max {
                fam.scatter(m, n, &mut |i, dv| {
                    if !seen[i] {
                        seen[i] = true;
                        touched.push(i);
                    }
                    scratch[i] += dv;
                });
                let in_quad = m > tm && n > tn;
                for &i in &touched {
                    let v = defaults[i] + scratch[i];
                    scratch[i] = 0.0;
                    seen[i] = false;
                    w_sup[i] = w_sup[i].max(v.abs());
                    w_visits[i] += 1;
                    if in_quad {
                        w_resid[i] = w_resid[i].max((v - lhats[i]).abs());
                        q_visits[i] += 1;
                    }
                }
                touched.clear();
            }
        }
        // Cells the support skipped hold the default value.
        for i in 0..count {
            if w_visits[i] < w.cells() {
                w_sup[i] = w_sup[i].max(defaults[i].abs());
            }
            if q_visits[i] < quad_cells {
                w_resid[i] = w_resid[i].max((defaults[i] - lhats[i]).abs());
            }
        }
        resids.push(w_resid);
        sups.push(w_sup);
    }
    FamilyScan { lhats, resids, sups }
}

enum LineAxis {
    Row(usize),
    Col(usize),
}

/// Certify the fringe rows and columns of every member, one fill per cell
/// shared across the family. Used by the rule-`r` batteries.
fn family_lines(fam: &dyn Family, cfg: &RunConfig, sched: &WindowSchedule) -> Vec<Verdict> {
    let largest = sched.largest();
    let col_lengths: Vec<usize> = sched.windows().iter().map(|w| w.n_max).collect();
    let row_lengths: Vec<usize> = sched.windows().iter().map(|w| w.m_max).collect();
    let mut verdicts = vec![Verdict::Converges; fam.count()];
    for m0 in 0..cfg.fringe.min(largest.m_max + 1) {
        line_scan(fam, LineAxis::Row(m0), largest.n_max, &col_lengths, cfg, &mut verdicts);
    }
    for n0 in 0..cfg.fringe.min(largest.n_max + 1) {
        line_scan(fam, LineAxis::Col(n0), largest.m_max, &row_lengths, cfg, &mut verdicts);
    }
    verdicts
}

fn line_scan(
    fam: &dyn Family,
    fixed: LineAxis,
    max_len: usize,
    lengths: &[usize],
    cfg: &RunConfig,
    verdicts: &mut [Verdict],
) {
    let count = fam.count();
    let stride = max_len + 1;
    let mut values = vec![0.0f64; count * stride];
    let mut scratch = vec![0.0f64; count];
    let mut seen = vec![false; count];
    let mut touched: Vec<usize> = Vec::new();
    for j in 0..=max_len {
        let (m, n) = match fixed {
            LineAxis::Row(m0) => (m0, j),
            LineAxis::Col(n0) => (j, n0),
        };
        fam.scatter(m, n, &mut |i, dv| {
            if !seen[i] {
                seen[i] = true;
                touched.push(i);
            }
            scratch[i] += dv;
        });
        for i in 0..count {
            values[i * stride + j] = fam.default(i) + scratch[i];
        }
        for &i in &touched {
            scratch[i] = 0.0;
            seen[i] = false;
        }
        touched.clear();
    }
    for i in 0..count {
        let line = &values[i * stride..(i + 1) * stride];
        let (v, _) = certify_line(&|j| line[j], lengths, cfg.tol, cfg.growth_factor);
        verdicts[i] = join_verdict(verdicts[i], v);
    }
}

struct FamilyOutcome {
    scan: FamilyScan,
    verdicts: Vec<Verdict>,
    indices: Vec<Vec<usize>>,
}

fn certify_family(
    fam: &dyn Family,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> FamilyOutcome {
    let scan = scan_family(fam, sched);
    let line_verdicts = (rule == Rule::R).then(|| family_lines(fam, cfg, sched));
    let count = fam.count();
    let mut verdicts = Vec::with_capacity(count);
    for i in 0..count {
        let resids: Vec<f64> = scan.resids.iter().map(|w| w[i]).collect();
        let sups: Vec<f64> = scan.sups.iter().map(|w| w[i]).collect();
        let v = match rule {
            Rule::P => p_verdict(&resids, &sups, cfg.tol, cfg.growth_factor),
            Rule::Bp => compose_bp(&resids, &sups, cfg),
            Rule::R => {
                let base = compose_bp(&resids, &sups, cfg);
                let line = line_verdicts.as_ref().expect("computed for rule r")[i];
                match (base, line) {
                    (Verdict::Converges, Verdict::Converges) => Verdict::Converges,
                    _ if unbounded_by_growth(&sups, cfg.growth_factor) => Verdict::Unbounded,
                    _ if line == Verdict::Unbounded => Verdict::Unbounded,
                    _ => Verdict::Inconclusive,
                }
            }
        };
        verdicts.push(v);
    }
    let indices = (0..count).map(|i| fam.member_indices(i)).collect();
    FamilyOutcome { scan, verdicts, indices }
}

const MAX_MEMBER_WITNESSES: usize = 3;

/// Assemble one condition report from the outcomes of one or two families
/// (two for the conditions that bundle both cut directions).
fn condition_from(
    id: &str,
    outcomes: &[FamilyOutcome],
    sched: &WindowSchedule,
) -> ConditionReport {
    let largest = sched.largest();
    let window = [largest.m_max, largest.n_max];
    let nw = sched.windows().len();
    let mut agg_resid = vec![0.0f64; nw];
    let mut agg_sup = vec![0.0f64; nw];
    let mut overall = Verdict::Converges;
    for o in outcomes {
        for (t, (wr, ws)) in o.scan.resids.iter().zip(o.scan.sups.iter()).enumerate() {
            for i in 0..o.verdicts.len() {
                agg_resid[t] = agg_resid[t].max(wr[i]);
                agg_sup[t] = agg_sup[t].max(ws[i]);
            }
        }
        overall = o.verdicts.iter().fold(overall, |a, &b| join_verdict(a, b));
    }

    let mut witnesses = Vec::new();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for o in outcomes {
        for (i, &l) in o.scan.lhats.iter().enumerate() {
            if best.as_ref().is_none_or(|(b, _)| l.abs() > b.abs()) {
                best = Some((l, o.indices[i].clone()));
            }
        }
    }
    match overall {
        Verdict::Converges => {
            if let Some((l, indices)) = best.clone() {
                witnesses.push(ConditionWitness {
                    kind: "limit_attained".into(),
                    indices,
                    value: Some(l),
                    window,
                });
            }
        }
        Verdict::Unbounded | Verdict::Inconclusive => {
            let kind = if overall == Verdict::Unbounded {
                "member_diverges"
            } else {
                "member_inconclusive"
            };
            'collect: for o in outcomes {
                for (i, &v) in o.verdicts.iter().enumerate() {
                    if v != overall {
                        continue;
                    }
                    let value = if overall == Verdict::Unbounded {
                        o.scan.sups[nw - 1][i]
                    } else {
                        o.scan.resids[nw - 1][i]
                    };
                    witnesses.push(ConditionWitness {
                        kind: kind.into(),
                        indices: o.indices[i].clone(),
                        value: Some(value),
                        window,
                    });
                    if witnesses.len() >= MAX_MEMBER_WITNESSES {
                        break 'collect;
                    }
                }
            }
        }
    }

    // Signed limit of the largest-magnitude member; for a single-member
    // family this is simply its certified limit.
    let value = match (overall, best) {
        (Verdict::Converges, Some((l, _))) => Some(l),
        _ => None,
    };
    ConditionReport {
        condition_id: id.to_string(),
        verdict: overall.into(),
        value,
        witnesses,
        evidence: evidence_from(sched, &agg_resid, &agg_sup),
    }
}

// ---------------------------------------------------------------------------
// Concrete families.

/// Entrywise arrays `(m, n) -> a_{(m,n),(i,j)}` for `(i, j)` in the prefix box.
struct EntryFamily<'a> {
    mat: &'a FourDimMatrix,
    prefix: Window,
}

impl Family for EntryFamily<'_> {
    fn count(&self) -> usize {
        self.prefix.rows() * self.prefix.cols()
    }

    fn default(&self, _: usize) -> f64 {
        0.0
    }

    fn scatter(&self, m: usize, n: usize, emit: &mut dyn FnMut(usize, f64)) {
        let cols = self.prefix.cols();
        self.mat.for_each_entry(m, n, self.prefix, &mut |k, l, v| emit(k * cols + l, v));
    }

    fn member_indices(&self, i: usize) -> Vec<usize> {
        vec![i / self.prefix.cols(), i % self.prefix.cols()]
    }
}

/// Axis tags used in the `(axis, cut)` witness indices.
const COL_CUT: usize = 0;
const ROW_CUT: usize = 1;

/// Column partial sums `sum_{k <= trunc} a_{(m,n),(k,l0)}` for cuts
/// `l0 <= prefix`.
struct ColPartialFamily<'a> {
    mat: &'a FourDimMatrix,
    cuts: usize,
    trunc: Window,
}

impl Family for ColPartialFamily<'_> {
    fn count(&self) -> usize {
        self.cuts
    }

    fn default(&self, _: usize) -> f64 {
        0.0
    }

    fn scatter(&self, m: usize, n: usize, emit: &mut dyn FnMut(usize, f64)) {
        let w = Window { m_max: self.trunc.m_max, n_max: self.cuts - 1 };
        self.mat.for_each_entry(m, n, w, &mut |_, l, v| emit(l, v));
    }

    fn member_indices(&self, i: usize) -> Vec<usize> {
        vec![COL_CUT, i]
    }
}

/// Row partial sums `sum_{l <= trunc} a_{(m,n),(k0,l)}` for cuts
/// `k0 <= prefix`.
struct RowPartialFamily<'a> {
    mat: &'a FourDimMatrix,
    cuts: usize,
    trunc: Window,
}

impl Family for RowPartialFamily<'_> {
    fn count(&self) -> usize {
        self.cuts
    }

    fn default(&self, _: usize) -> f64 {
        0.0
    }

    fn scatter(&self, m: usize, n: usize, emit: &mut dyn FnMut(usize, f64)) {
        let w = Window { m_max: self.cuts - 1, n_max: self.trunc.n_max };
        self.mat.for_each_entry(m, n, w, &mut |k, _, v| emit(k, v));
    }

    fn member_indices(&self, i: usize) -> Vec<usize> {
        vec![ROW_CUT, i]
    }
}

/// Deviation sums `sum_k |a_{(m,n),(k,l0)} - ahat_{k,l0}|` against the
/// entrywise limit estimates `ahat` taken from the largest-window corner row.
///
/// Rows that miss `(k, l0)` entirely contribute `|ahat_{k,l0}|`, so the
/// member default is `base[l0] = sum_k |ahat_{k,l0}|` and the scatter emits
/// the per-entry correction `|v - ahat| - |ahat|`, which is additive.
struct DeviationFamily<'a> {
    mat: &'a FourDimMatrix,
    cuts: usize,
    trunc: Window,
    axis: usize,
    ahat: HashMap<(usize, usize), f64>,
    base: Vec<f64>,
}

impl<'a> DeviationFamily<'a> {
    fn new(mat: &'a FourDimMatrix, cuts: usize, trunc: Window, axis: usize) -> DeviationFamily<'a> {
        let w = DeviationFamily::support_window(cuts, trunc, axis);
        let mut ahat = HashMap::new();
        let mut base = vec![0.0f64; cuts];
        for (k, l, v) in mat.row_support(trunc.m_max, trunc.n_max, w) {
            let cut = if axis == COL_CUT { l } else { k };
            ahat.insert((k, l), v);
            base[cut] += v.abs();
        }
        DeviationFamily { mat, cuts, trunc, axis, ahat, base }
    }

    fn support_window(cuts: usize, trunc: Window, axis: usize) -> Window {
        if axis == COL_CUT {
            Window { m_max: trunc.m_max, n_max: cuts - 1 }
        } else {
            Window { m_max: cuts - 1, n_max: trunc.n_max }
        }
    }
}

impl Family for DeviationFamily<'_> {
    fn count(&self) -> usize {
        self.cuts
    }

    fn default(&self, member: usize) -> f64 {
        self.base[member]
    }

    fn scatter(&self, m: usize, n: usize, emit: &mut dyn FnMut(usize, f64)) {
        let w = DeviationFamily::support_window(self.cuts, self.trunc, self.axis);
        let mut visit = |k: usize, l: usize, v: f64| {
            let a = self.ahat.get(&(k, l)).copied().unwrap_or(0.0);
            let cut = if self.axis == COL_CUT { l } else { k };
            emit(cut, (v - a).abs() - a.abs());
        };
        if self.mat.may_duplicate_entries() {
            // Values must be merged before taking absolute deviations.
            for (k, l, v) in self.mat.row_support(m, n, w) {
                visit(k, l, v);
            }
        } else {
            self.mat.for_each_entry(m, n, w, &mut visit);
        }
    }

    fn member_indices(&self, i: usize) -> Vec<usize> {
        vec![self.axis, i]
    }
}

/// One combined family for everything in the tail battery that streams the
/// tail transform, so each tail row is materialized once per cell instead of
/// once per condition: member 0 is the absolute tail row sum (s1), member 1
/// the total tail row sum (s7), followed by the column cuts (s5), the row
/// cuts (s6), and the prefix entries (s4).
struct TailFamily<'a> {
    tails: &'a FourDimMatrix,
    trunc: Window,
    prefix: Window,
    cuts: usize,
}

impl TailFamily<'_> {
    const ABS: usize = 0;
    const TOTAL: usize = 1;

    fn col_base(&self) -> usize {
        2
    }

    fn row_base(&self) -> usize {
        2 + self.cuts
    }

    fn entry_base(&self) -> usize {
        2 + 2 * self.cuts
    }
}

impl Family for TailFamily<'_> {
    fn count(&self) -> usize {
        self.entry_base() + self.prefix.rows() * self.prefix.cols()
    }

    fn default(&self, _: usize) -> f64 {
        0.0
    }

    fn scatter(&self, m: usize, n: usize, emit: &mut dyn FnMut(usize, f64)) {
        let cols = self.prefix.cols();
        let col_base = self.col_base();
        let row_base = self.row_base();
        let entry_base = self.entry_base();
        // Tail rows are emitted merged, so |v| sums are safe to accumulate.
        self.tails.for_each_entry(m, n, self.trunc, &mut |k, l, v| {
            emit(TailFamily::ABS, v.abs());
            emit(TailFamily::TOTAL, v);
            if l < self.cuts {
                emit(col_base + l, v);
            }
            if k < self.cuts {
                emit(row_base + k, v);
            }
            if self.prefix.contains(k, l) {
                emit(entry_base + k * cols + l, v);
            }
        });
    }

    fn member_indices(&self, i: usize) -> Vec<usize> {
        if i == TailFamily::ABS || i == TailFamily::TOTAL {
            vec![]
        } else if i < self.row_base() {
            vec![COL_CUT, i - self.col_base()]
        } else if i < self.entry_base() {
            vec![ROW_CUT, i - self.row_base()]
        } else {
            let j = i - self.entry_base();
            vec![j / self.prefix.cols(), j % self.prefix.cols()]
        }
    }
}

fn slice_outcome(o: &FamilyOutcome, range: std::ops::Range<usize>) -> FamilyOutcome {
    FamilyOutcome {
        scan: FamilyScan {
            lhats: o.scan.lhats[range.clone()].to_vec(),
            resids: o.scan.resids.iter().map(|w| w[range.clone()].to_vec()).collect(),
            sups: o.scan.sups.iter().map(|w| w[range.clone()].to_vec()).collect(),
        },
        verdicts: o.verdicts[range.clone()].to_vec(),
        indices: o.indices[range].to_vec(),
    }
}

// ---------------------------------------------------------------------------
// Scalar conditions.

/// Sup conditions (r1), (4.7), (4.11), (s1): running max of absolute row
/// sums over the schedule, with the attaining cell as witness.
fn sup_condition(
    id: &str,
    mat: &FourDimMatrix,
    trunc: Window,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let mut sups = Vec::with_capacity(sched.windows().len());
    let mut best: Option<(f64, (usize, usize))> = None;
    let mut prev: Option<Window> = None;
    for w in sched.windows() {
        for m in 0..=w.m_max {
            let n_start = match prev {
                Some(p) if m <= p.m_max => p.n_max + 1,
                _ => 0,
            };
            for n in n_start..=w.n_max {
                let v = mat.abs_row_sum(m, n, trunc).0;
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, (m, n)));
                }
            }
        }
        sups.push(best.expect("windows are nonempty").0);
        prev = Some(*w);
    }

    let verdict = bounded_verdict(&sups, cfg.tol, cfg.growth_factor);
    let (sup, (bm, bn)) = best.expect("windows are nonempty");
    let largest = sched.largest();
    let kind = match verdict {
        Verdict::Converges => "sup_attained",
        Verdict::Unbounded => "growth",
        Verdict::Inconclusive => "sup_unsettled",
    };
    let witnesses = vec![ConditionWitness {
        kind: kind.into(),
        indices: vec![bm, bn],
        value: Some(sup),
        window: [largest.m_max, largest.n_max],
    }];
    let evidence = sched
        .windows()
        .iter()
        .zip(sups.iter())
        .map(|(w, &s)| WindowEvidence {
            window: [w.m_max, w.n_max],
            tail_residual: None,
            sup: s,
        })
        .collect();
    ConditionReport {
        condition_id: id.to_string(),
        verdict: verdict.into(),
        value: (verdict == Verdict::Converges).then_some(sup),
        witnesses,
        evidence,
    }
}

/// Total-sum conditions (r2), (4.9), (4.13), (s7): the limit of
/// `sum_{k,l} a_{(m,n),(k,l)}` under the battery's rule.
fn total_condition(
    id: &str,
    mat: &FourDimMatrix,
    trunc: Window,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let rep = certify_eval(&|m, n| mat.row_sum(m, n, trunc).0, rule, cfg, sched, id);
    let largest = sched.largest();
    let window = [largest.m_max, largest.n_max];
    let witnesses = match rep.verdict {
        Verdict::Converges => vec![ConditionWitness {
            kind: "limit_attained".into(),
            indices: vec![],
            value: rep.limit,
            window,
        }],
        Verdict::Unbounded => vec![ConditionWitness {
            kind: "growth".into(),
            indices: vec![],
            value: rep.sup,
            window,
        }],
        Verdict::Inconclusive => vec![],
    };
    ConditionReport {
        condition_id: id.to_string(),
        verdict: rep.verdict.into(),
        value: rep.limit,
        witnesses,
        evidence: rep.evidence,
    }
}

/// Support conditions (p1)/(p2): every prefix row (p1: column index `j`,
/// p2: row index `i`) must have uniformly bounded support.
///
/// Decided exactly for bodies with a structural bound (explicit entries,
/// `e_to_f` and tails of those, B-matrix windows). Otherwise two probe rows
/// at growing scale look for a nonzero entry past the bound; finding one is
/// a definitive `fails`, finding nothing is honest `inconclusive`.
fn support_condition(
    id: &str,
    mat: &FourDimMatrix,
    axis: usize,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let largest = sched.largest();
    let window = [largest.m_max, largest.n_max];
    let (verdict, witnesses) = match support_decision(mat, axis, cfg) {
        SupportDecision::Bounded(bound) => (
            DualVerdict::Holds,
            vec![ConditionWitness {
                kind: "support_bound".into(),
                indices: vec![bound],
                value: None,
                window,
            }],
        ),
        SupportDecision::Probe { cell: (m, n, k, l), value } => (
            DualVerdict::Fails,
            vec![ConditionWitness {
                kind: "support_probe".into(),
                indices: vec![m, n, k, l],
                value: Some(value),
                window,
            }],
        ),
        SupportDecision::Unknown => (DualVerdict::Inconclusive, vec![]),
    };
    ConditionReport {
        condition_id: id.to_string(),
        verdict,
        value: None,
        witnesses,
        evidence: vec![],
    }
}

enum SupportDecision {
    Bounded(usize),
    Probe { cell: (usize, usize, usize, usize), value: f64 },
    Unknown,
}

fn support_decision(mat: &FourDimMatrix, axis: usize, cfg: &RunConfig) -> SupportDecision {
    if let Some((kb, lb)) = mat.global_col_bound() {
        return SupportDecision::Bounded(if axis == COL_CUT { lb } else { kb });
    }
    if mat.body_tag() == BodyTag::Family {
        // Closed-form row families admit no finite support inspection.
        return SupportDecision::Unknown;
    }
    let p = cfg.prefix_p;
    let mut maxima: Vec<(usize, (usize, usize, usize, usize), f64)> = Vec::new();
    for s in [p + 1, 2 * (p + 1)] {
        let w = Window::square(2 * s + 2);
        let mut best: Option<(usize, (usize, usize, usize, usize), f64)> = None;
        for (m, n) in [(0, s), (s, 0), (s, s)] {
            for (k, l, v) in mat.row_support(m, n, w) {
                let idx = if axis == COL_CUT { l } else { k };
                if best.as_ref().is_none_or(|b| idx > b.0) {
                    best = Some((idx, (m, n, k, l), v));
                }
            }
        }
        match best {
            Some(b) => maxima.push(b),
            None => return SupportDecision::Unknown,
        }
    }
    if maxima[1].0 > maxima[0].0 && maxima[1].0 > p {
        let (_, cell, value) = maxima[1];
        SupportDecision::Probe { cell, value }
    } else {
        SupportDecision::Unknown
    }
}

/// Structural conditions (s2)/(s3): the iterated row limits exist trivially
/// when every row in the certification domain has finite support.
fn iterated_rows_condition(
    id: &str,
    mat: &FourDimMatrix,
    sched: &WindowSchedule,
) -> ConditionReport {
    let largest = sched.largest();
    let window = [largest.m_max, largest.n_max];
    let mut bad: Option<(usize, usize)> = None;
    'rows: for m in 0..=largest.m_max {
        for n in 0..=largest.n_max {
            if mat.row_bound(m, n).is_none() {
                bad = Some((m, n));
                break 'rows;
            }
        }
    }
    let (verdict, witnesses) = match bad {
        None => (
            DualVerdict::Holds,
            vec![ConditionWitness {
                kind: "rows_finitely_supported".into(),
                indices: vec![],
                value: None,
                window,
            }],
        ),
        Some((m, n)) => (
            DualVerdict::Inconclusive,
            vec![ConditionWitness {
                kind: "unbounded_row".into(),
                indices: vec![m, n],
                value: None,
                window,
            }],
        ),
    };
    ConditionReport {
        condition_id: id.to_string(),
        verdict,
        value: None,
        witnesses,
        evidence: vec![],
    }
}

// ---------------------------------------------------------------------------
// Batteries.

fn prefix_window(cfg: &RunConfig) -> Window {
    Window { m_max: cfg.prefix_p, n_max: cfg.prefix_p }
}

fn entry_condition(
    id: &str,
    mat: &FourDimMatrix,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let fam = EntryFamily { mat, prefix: prefix_window(cfg) };
    condition_from(id, &[certify_family(&fam, rule, cfg, sched)], sched)
}

fn partial_condition(
    id: &str,
    mat: &FourDimMatrix,
    axis: usize,
    trunc: Window,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let cuts = cfg.prefix_p + 1;
    let out = if axis == COL_CUT {
        certify_family(&ColPartialFamily { mat, cuts, trunc }, rule, cfg, sched)
    } else {
        certify_family(&RowPartialFamily { mat, cuts, trunc }, rule, cfg, sched)
    };
    condition_from(id, &[out], sched)
}

fn both_partials_condition(
    id: &str,
    mat: &FourDimMatrix,
    trunc: Window,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let cuts = cfg.prefix_p + 1;
    let col = certify_family(&ColPartialFamily { mat, cuts, trunc }, rule, cfg, sched);
    let row = certify_family(&RowPartialFamily { mat, cuts, trunc }, rule, cfg, sched);
    condition_from(id, &[col, row], sched)
}

fn deviation_condition(
    id: &str,
    mat: &FourDimMatrix,
    axis: usize,
    trunc: Window,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let fam = DeviationFamily::new(mat, cfg.prefix_p + 1, trunc, axis);
    condition_from(id, &[certify_family(&fam, rule, cfg, sched)], sched)
}

fn both_deviations_condition(
    id: &str,
    mat: &FourDimMatrix,
    trunc: Window,
    rule: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let cuts = cfg.prefix_p + 1;
    let col = certify_family(&DeviationFamily::new(mat, cuts, trunc, COL_CUT), rule, cfg, sched);
    let row = certify_family(&DeviationFamily::new(mat, cuts, trunc, ROW_CUT), rule, cfg, sched);
    condition_from(id, &[col, row], sched)
}

/// Lemma 3.2 battery (r1)-(r5) under the codomain rule `v`.
fn battery_r(
    mat: &FourDimMatrix,
    v: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    trunc: Window,
) -> Vec<ConditionReport> {
    vec![
        sup_condition("r1", mat, trunc, cfg, sched),
        total_condition("r2", mat, trunc, v, cfg, sched),
        entry_condition("r3", mat, v, cfg, sched),
        partial_condition("r4", mat, COL_CUT, trunc, v, cfg, sched),
        partial_condition("r5", mat, ROW_CUT, trunc, v, cfg, sched),
    ]
}

/// Lemma 4.3 battery (4.7)-(4.10), rule `r`, with both partial-sum
/// directions bundled under (4.10).
fn battery_47_410(
    mat: &FourDimMatrix,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    trunc: Window,
) -> Vec<ConditionReport> {
    vec![
        sup_condition("4.7", mat, trunc, cfg, sched),
        entry_condition("4.8", mat, Rule::R, cfg, sched),
        total_condition("4.9", mat, trunc, Rule::R, cfg, sched),
        both_partials_condition("4.10", mat, trunc, Rule::R, cfg, sched),
    ]
}

/// Lemma 4.4 battery (4.11)-(4.14), rule `bp`, with both deviation
/// directions bundled under (4.14).
fn battery_411_414(
    mat: &FourDimMatrix,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    trunc: Window,
) -> Vec<ConditionReport> {
    vec![
        sup_condition("4.11", mat, trunc, cfg, sched),
        entry_condition("4.12", mat, Rule::Bp, cfg, sched),
        total_condition("4.13", mat, trunc, Rule::Bp, cfg, sched),
        both_deviations_condition("4.14", mat, trunc, Rule::Bp, cfg, sched),
    ]
}

/// Lemma 3.3 battery (r1)-(r3) + (bp1)-(bp2) under the codomain rule `v`.
fn battery_bp_mixed(
    mat: &FourDimMatrix,
    v: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    trunc: Window,
) -> Vec<ConditionReport> {
    vec![
        sup_condition("r1", mat, trunc, cfg, sched),
        total_condition("r2", mat, trunc, v, cfg, sched),
        entry_condition("r3", mat, v, cfg, sched),
        deviation_condition("bp1", mat, COL_CUT, trunc, v, cfg, sched),
        deviation_condition("bp2", mat, ROW_CUT, trunc, v, cfg, sched),
    ]
}

/// Lemma 3.4 battery (r1)-(r3) + (p1)-(p2) under the codomain rule `v`.
fn battery_p(
    mat: &FourDimMatrix,
    v: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    trunc: Window,
) -> Vec<ConditionReport> {
    vec![
        sup_condition("r1", mat, trunc, cfg, sched),
        total_condition("r2", mat, trunc, v, cfg, sched),
        entry_condition("r3", mat, v, cfg, sched),
        support_condition("p1", mat, COL_CUT, cfg, sched),
        support_condition("p2", mat, ROW_CUT, cfg, sched),
    ]
}

/// (s1) from the absolute-sum member of the combined tail family: fold the
/// per-window maxima into running sups (the windows are nested) and locate
/// the attaining cell for the witness.
fn s1_condition(
    outcome: &FamilyOutcome,
    tails: &FourDimMatrix,
    trunc: Window,
    cfg: &RunConfig,
    sched: &WindowSchedule,
) -> ConditionReport {
    let mut running = 0.0f64;
    let sups: Vec<f64> = outcome
        .scan
        .sups
        .iter()
        .map(|w| {
            running = running.max(w[TailFamily::ABS]);
            running
        })
        .collect();
    let verdict = bounded_verdict(&sups, cfg.tol, cfg.growth_factor);
    let largest = sched.largest();
    let sup = sups[sups.len() - 1];
    // First attaining cell in row-major order; the rescan reproduces the
    // scanned values exactly, so `>=` hits the max itself.
    let mut at = (0usize, 0usize);
    'find: for m in 0..=largest.m_max {
        for n in 0..=largest.n_max {
            if tails.abs_row_sum(m, n, trunc).0 >= sup {
                at = (m, n);
                break 'find;
            }
        }
    }
    let kind = match verdict {
        Verdict::Converges => "sup_attained",
        Verdict::Unbounded => "growth",
        Verdict::Inconclusive => "sup_unsettled",
    };
    let evidence = sched
        .windows()
        .iter()
        .zip(sups.iter())
        .map(|(w, &s)| WindowEvidence {
            window: [w.m_max, w.n_max],
            tail_residual: None,
            sup: s,
        })
        .collect();
    ConditionReport {
        condition_id: "s1".into(),
        verdict: verdict.into(),
        value: (verdict == Verdict::Converges).then_some(sup),
        witnesses: vec![ConditionWitness {
            kind: kind.into(),
            indices: vec![at.0, at.1],
            value: Some(sup),
            window: [largest.m_max, largest.n_max],
        }],
        evidence,
    }
}

/// Theorem 4.1 battery (s1)-(s7): (s2)/(s3) inspect the original matrix, the
/// rest measure its tail transform through one shared streaming pass.
fn battery_s(
    mat: &FourDimMatrix,
    tails: &FourDimMatrix,
    v: Rule,
    cfg: &RunConfig,
    sched: &WindowSchedule,
    trunc: Window,
) -> Vec<ConditionReport> {
    let fam = TailFamily { tails, trunc, prefix: prefix_window(cfg), cuts: cfg.prefix_p + 1 };
    let outcome = certify_family(&fam, v, cfg, sched);
    let total = slice_outcome(&outcome, TailFamily::TOTAL..fam.col_base());
    let cols = slice_outcome(&outcome, fam.col_base()..fam.row_base());
    let rows = slice_outcome(&outcome, fam.row_base()..fam.entry_base());
    let entries = slice_outcome(&outcome, fam.entry_base()..outcome.verdicts.len());
    vec![
        s1_condition(&outcome, tails, trunc, cfg, sched),
        iterated_rows_condition("s2", mat, sched),
        iterated_rows_condition("s3", mat, sched),
        condition_from("s4", &[entries], sched),
        condition_from("s5", &[cols], sched),
        condition_from("s6", &[rows], sched),
        condition_from("s7", &[total], sched),
    ]
}

// ---------------------------------------------------------------------------
// Entry points.

/// Runs the characterization battery of `class` against `a`.
pub fn check_class(a: &FourDimMatrix, class: ClassId, cfg: &RunConfig) -> Result<ClassReport> {
    cfg.validate()?;
    let sched = cfg.window_schedule()?;
    let trunc = sched.largest();
    let (matrix, conditions) = match class {
        ClassId::CrToCv(Rule::R) => (a.describe(), battery_47_410(a, cfg, &sched, trunc)),
        ClassId::CrToCv(v) => (a.describe(), battery_r(a, v, cfg, &sched, trunc)),
        ClassId::CbpToCv(Rule::Bp) => (a.describe(), battery_411_414(a, cfg, &sched, trunc)),
        ClassId::CbpToCv(v) => (a.describe(), battery_bp_mixed(a, v, cfg, &sched, trunc)),
        ClassId::CpToCv(v) => (a.describe(), battery_p(a, v, cfg, &sched, trunc)),
        ClassId::CrDeltaToCv(v) => {
            let tails = FourDimMatrix::tail_transform_of(a, trunc);
            (tails.describe(), battery_s(a, &tails, v, cfg, &sched, trunc))
        }
        ClassId::CrToCrDelta => {
            let f = e_to_f(a);
            (f.describe(), battery_47_410(&f, cfg, &sched, trunc))
        }
        ClassId::CbpToCbpDelta => {
            let f = e_to_f(a);
            (f.describe(), battery_411_414(&f, cfg, &sched, trunc))
        }
    };
    let verdict = conditions.iter().fold(DualVerdict::Holds, |acc, c| join_dual(acc, c.verdict));
    Ok(ClassReport { class: class.to_string(), matrix, conditions, verdict })
}

/// The difference-domain membership battery `(C_r(Delta) : C_r)` of
/// Theorem 4.1; `"domain"` on the command line.
pub fn check_domain_class(a: &FourDimMatrix, cfg: &RunConfig) -> Result<ClassReport> {
    check_class(a, ClassId::CrDeltaToCv(Rule::R), cfg)
}

/// Corollary 4.5: `E` maps `C_r` into `C_r(Delta)` (variant `r`) resp.
/// `C_bp` into `C_bp(Delta)` (variant `bp`) iff `F = e_to_f(E)` passes the
/// matching window battery.
pub fn corollary_check(e: &FourDimMatrix, variant: Rule, cfg: &RunConfig) -> Result<ClassReport> {
    match variant {
        Rule::R => check_class(e, ClassId::CrToCrDelta, cfg),
        Rule::Bp => check_class(e, ClassId::CbpToCbpDelta, cfg),
        Rule::P => Err(Error::InvalidSpec(
            "corollary 4.5 covers the r and bp variants; there is no p form".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{Builtin, FourDimMatrix};
    use crate::scalar::Scalar;

    fn quick_cfg() -> RunConfig {
        RunConfig { schedule: vec![8, 16, 32, 64, 128], prefix_p: 4, ..RunConfig::default() }
    }

    fn ids(report: &ClassReport) -> Vec<&str> {
        report.conditions.iter().map(|c| c.condition_id.as_str()).collect()
    }

    fn by_id<'a>(report: &'a ClassReport, id: &str) -> &'a ConditionReport {
        report
            .conditions
            .iter()
            .find(|c| c.condition_id == id)
            .unwrap_or_else(|| panic!("no condition {id}"))
    }

    #[test]
    fn class_ids_round_trip() {
        let all = [
            "Cr_to_Cp",
            "Cr_to_Cbp",
            "Cr_to_Cr",
            "Cbp_to_Cp",
            "Cbp_to_Cbp",
            "Cbp_to_Cr",
            "Cp_to_Cp",
            "Cp_to_Cbp",
            "Cp_to_Cr",
            "CrDelta_to_Cp",
            "CrDelta_to_Cbp",
            "CrDelta_to_Cr",
            "Cr_to_CrDelta",
            "Cbp_to_CbpDelta",
        ];
        for id in all {
            assert_eq!(id.parse::<ClassId>().unwrap().to_string(), id);
        }
        assert_eq!("domain".parse::<ClassId>().unwrap(), ClassId::CrDeltaToCv(Rule::R));
        assert!("Cr_to_Mu".parse::<ClassId>().is_err());
        assert!("nonsense".parse::<ClassId>().is_err());
    }

    #[test]
    fn batteries_follow_the_lemmas() {
        let delta = FourDimMatrix::builtin(Builtin::Delta);
        let cfg = quick_cfg();
        let cases = [
            ("Cr_to_Cp", vec!["r1", "r2", "r3", "r4", "r5"]),
            ("Cr_to_Cr", vec!["4.7", "4.8", "4.9", "4.10"]),
            ("Cbp_to_Cbp", vec!["4.11", "4.12", "4.13", "4.14"]),
            ("Cbp_to_Cr", vec!["r1", "r2", "r3", "bp1", "bp2"]),
            ("Cp_to_Cp", vec!["r1", "r2", "r3", "p1", "p2"]),
            ("CrDelta_to_Cr", vec!["s1", "s2", "s3", "s4", "s5", "s6", "s7"]),
            ("Cr_to_CrDelta", vec!["4.7", "4.8", "4.9", "4.10"]),
            ("Cbp_to_CbpDelta", vec!["4.11", "4.12", "4.13", "4.14"]),
        ];
        for (id, want) in cases {
            let rep = check_class(&delta, id.parse().unwrap(), &cfg).unwrap();
            assert_eq!(ids(&rep), want, "battery for {id}");
            assert_eq!(rep.class, id);
        }
    }

    #[test]
    fn delta_lies_in_cr_cr_with_row_sums_exactly_four() {
        let delta = FourDimMatrix::builtin(Builtin::Delta);
        let rep = check_class(&delta, ClassId::CrToCv(Rule::R), &RunConfig::default()).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Holds);
        let sup = by_id(&rep, "4.7");
        assert_eq!(sup.value, Some(4.0));
        assert_eq!(sup.witnesses[0].kind, "sup_attained");
        assert_eq!(by_id(&rep, "4.8").value, Some(0.0));
        assert_eq!(by_id(&rep, "4.9").value, Some(0.0));
        assert_eq!(by_id(&rep, "4.10").value, Some(0.0));
    }

    #[test]
    fn identity_preserves_regular_limits() {
        let id = FourDimMatrix::builtin(Builtin::Identity);
        let rep = check_class(&id, ClassId::CrToCv(Rule::R), &RunConfig::default()).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Holds);
        assert_eq!(by_id(&rep, "4.7").value, Some(1.0));
        // Row sums are identically 1, so the certified limit is v = 1.
        assert_eq!(by_id(&rep, "4.9").value, Some(1.0));
        assert_eq!(by_id(&rep, "4.8").value, Some(0.0));
    }

    #[test]
    fn sigma_fails_the_row_sum_bound() {
        let sigma = FourDimMatrix::builtin(Builtin::Sigma);
        let rep = check_class(&sigma, ClassId::CrToCv(Rule::R), &quick_cfg()).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Fails);
        let sup = by_id(&rep, "4.7");
        assert_eq!(sup.verdict, DualVerdict::Fails);
        assert_eq!(sup.witnesses[0].kind, "growth");
        // The sup is attained at the corner and equals (m+1)(n+1) there.
        assert_eq!(sup.witnesses[0].indices, vec![127, 127]);
        assert_eq!(sup.witnesses[0].value, Some(128.0 * 128.0));
    }

    #[test]
    fn delta_passes_the_tail_battery_with_sup_one() {
        let delta = FourDimMatrix::builtin(Builtin::Delta);
        let rep = check_domain_class(&delta, &RunConfig::default()).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Holds, "conditions: {:?}", rep.conditions);
        assert_eq!(rep.class, "CrDelta_to_Cr");
        assert!(rep.matrix.contains("tail"));
        assert_eq!(by_id(&rep, "s1").value, Some(1.0));
        assert_eq!(by_id(&rep, "s4").value, Some(0.0));
        // Tail totals are identically 1: the corner tail survives every cut.
        assert_eq!(by_id(&rep, "s7").value, Some(1.0));
        assert_eq!(by_id(&rep, "s2").witnesses[0].kind, "rows_finitely_supported");
    }

    #[test]
    fn identity_tails_blow_up_the_row_sums() {
        // Tails of the identity saturate: t_{(m,n),(k,l)} = 1 for all
        // (k,l) <= (m,n), so absolute tail row sums grow like (m+1)(n+1).
        let id = FourDimMatrix::builtin(Builtin::Identity);
        let cfg = RunConfig { schedule: vec![4, 8, 16, 32], prefix_p: 3, ..RunConfig::default() };
        let rep = check_domain_class(&id, &cfg).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Fails);
        let s1 = by_id(&rep, "s1");
        assert_eq!(s1.verdict, DualVerdict::Fails);
        assert_eq!(s1.witnesses[0].value, Some(32.0 * 32.0));
        // The entrywise tails still converge (to 1) once (m,n) passes (i,j).
        assert_eq!(by_id(&rep, "s4").verdict, DualVerdict::Holds);
        assert_eq!(by_id(&rep, "s4").value, Some(1.0));
    }

    #[test]
    fn tail_battery_matches_materialized_tails() {
        // Materialize the tail transform of delta as an explicit entry matrix
        // on a small domain and check the measured conditions agree.
        let delta = FourDimMatrix::builtin(Builtin::Delta);
        let cfg = RunConfig { schedule: vec![4, 8, 16], prefix_p: 3, ..RunConfig::default() };
        let sched = cfg.window_schedule().unwrap();
        let trunc = sched.largest();

        let mut entries = Vec::new();
        for m in 0..=trunc.m_max {
            for n in 0..=trunc.n_max {
                for k in 0..=trunc.m_max {
                    for l in 0..=trunc.n_max {
                        let (v, exact) = delta.tail_sum(m, n, k, l, trunc);
                        assert!(exact);
                        if v != 0.0 {
                            entries.push((m, n, k, l, Scalar::Int(v as i64)));
                        }
                    }
                }
            }
        }
        let materialized = FourDimMatrix::from_entries(entries).unwrap();

        // The combined streaming battery against independent per-condition
        // scans of the explicitly materialized tails.
        let rep = check_domain_class(&delta, &cfg).unwrap();
        let direct = vec![
            sup_condition("s1", &materialized, trunc, &cfg, &sched),
            entry_condition("s4", &materialized, Rule::R, &cfg, &sched),
            partial_condition("s5", &materialized, COL_CUT, trunc, Rule::R, &cfg, &sched),
            partial_condition("s6", &materialized, ROW_CUT, trunc, Rule::R, &cfg, &sched),
            total_condition("s7", &materialized, trunc, Rule::R, &cfg, &sched),
        ];
        for d in &direct {
            let b = by_id(&rep, &d.condition_id);
            assert_eq!(b.verdict, d.verdict, "{}", d.condition_id);
            match (b.value, d.value) {
                (Some(x), Some(y)) => {
                    assert!((x - y).abs() < 1e-12, "{}: {x} vs {y}", d.condition_id)
                }
                (x, y) => assert_eq!(x, y, "{}", d.condition_id),
            }
        }
    }

    #[test]
    fn support_probes_decide_p1_and_p2() {
        let cfg = quick_cfg();
        let sched = cfg.window_schedule().unwrap();

        // Delta has entries at column n in row (0, n): support grows, p1 fails.
        let delta = FourDimMatrix::builtin(Builtin::Delta);
        let rep = check_class(&delta, ClassId::CpToCv(Rule::P), &cfg).unwrap();
        let p1 = by_id(&rep, "p1");
        assert_eq!(p1.verdict, DualVerdict::Fails);
        assert_eq!(p1.witnesses[0].kind, "support_probe");
        let w = &p1.witnesses[0].indices;
        assert_eq!(w.len(), 4);
        assert!(delta.entry_f64(w[0], w[1], w[2], w[3]) != 0.0, "probe entry must be nonzero");
        assert_eq!(by_id(&rep, "p2").verdict, DualVerdict::Fails);

        // A finitely supported matrix is decided exactly.
        let fin = FourDimMatrix::from_entries(vec![
            (0, 0, 0, 2, Scalar::Int(1)),
            (5, 7, 1, 0, Scalar::Int(-3)),
        ])
        .unwrap();
        let hold = support_condition("p1", &fin, COL_CUT, &cfg, &sched);
        assert_eq!(hold.verdict, DualVerdict::Holds);
        assert_eq!(hold.witnesses[0].indices, vec![2]);

        // Closed-form row families stay inconclusive.
        let ces = FourDimMatrix::row_family("cesaro", &serde_json::Value::Null).unwrap();
        let unk = support_condition("p1", &ces, COL_CUT, &cfg, &sched);
        assert_eq!(unk.verdict, DualVerdict::Inconclusive);
    }

    #[test]
    fn deviation_battery_certifies_delta_and_identity() {
        for which in [Builtin::Delta, Builtin::Identity] {
            let mat = FourDimMatrix::builtin(which);
            let rep = check_class(&mat, ClassId::CbpToCv(Rule::Bp), &RunConfig::default()).unwrap();
            assert_eq!(rep.verdict, DualVerdict::Holds, "{which:?}: {:?}", rep.conditions);
            let dev = by_id(&rep, "4.14");
            assert_eq!(dev.verdict, DualVerdict::Holds);
            assert_eq!(dev.value, Some(0.0), "{which:?} deviations vanish in the limit");
        }
    }

    #[test]
    fn mixed_bp_battery_reports_deviation_cuts() {
        let delta = FourDimMatrix::builtin(Builtin::Delta);
        let rep = check_class(&delta, ClassId::CbpToCv(Rule::R), &quick_cfg()).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Holds, "{:?}", rep.conditions);
        let bp1 = by_id(&rep, "bp1");
        assert_eq!(bp1.witnesses[0].indices[0], COL_CUT);
        let bp2 = by_id(&rep, "bp2");
        assert_eq!(bp2.witnesses[0].indices[0], ROW_CUT);
    }

    #[test]
    fn cesaro_entry_decay_is_too_slow_to_certify() {
        // Cesaro entries 1/((m+1)(n+1)) do tend to 0, but like 1/(mn): the
        // quadrant residual at any feasible window stays far above the
        // tolerance, so (r3)-(r5) come back honest inconclusives while the
        // exact conditions (r1)-(r2) certify.
        let ces = FourDimMatrix::row_family("cesaro", &serde_json::Value::Null).unwrap();
        let rep = check_class(&ces, ClassId::CrToCv(Rule::P), &quick_cfg()).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Inconclusive);
        assert_eq!(by_id(&rep, "r1").value, Some(1.0));
        assert_eq!(by_id(&rep, "r2").value, Some(1.0), "means preserve the limit");
        for id in ["r3", "r4", "r5"] {
            let c = by_id(&rep, id);
            assert_eq!(c.verdict, DualVerdict::Inconclusive, "{id}");
            assert_eq!(c.witnesses[0].kind, "member_inconclusive");
            let resid = c.witnesses[0].value.unwrap();
            assert!(resid > 0.0 && resid < 1e-2, "{id} residual small but unsettled: {resid}");
        }
    }

    #[test]
    fn geometric_rows_pass_the_regular_battery() {
        let geo = FourDimMatrix::row_family("geometric_rows", &serde_json::json!({"rho": 0.5}))
            .unwrap();
        let rep = check_class(&geo, ClassId::CrToCv(Rule::R), &quick_cfg()).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Holds, "{:?}", rep.conditions);
        let sup = by_id(&rep, "4.7").value.unwrap();
        assert!((sup - 4.0).abs() < 1e-2, "absolute row sums approach 4, got {sup}");
        // Row (m,n) has the constant entry (1/2)^(i+j) at (i,j), so the
        // entrywise limit family attains 1 at the origin.
        assert_eq!(by_id(&rep, "4.8").value, Some(1.0));
    }

    #[test]
    fn corollary_routes_through_e_to_f() {
        // e_to_f(identity) = delta, so the r-variant corollary on the
        // identity reproduces the delta battery.
        let id = FourDimMatrix::builtin(Builtin::Identity);
        let rep = corollary_check(&id, Rule::R, &RunConfig::default()).unwrap();
        assert_eq!(rep.class, "Cr_to_CrDelta");
        assert_eq!(rep.matrix, "e_to_f(identity)");
        assert_eq!(rep.verdict, DualVerdict::Holds);
        assert_eq!(by_id(&rep, "4.7").value, Some(4.0));

        // e_to_f(sigma) = identity: bounded with total limit 1. The lazy
        // e_to_f rows scan the dense sigma parent, so keep the schedule small.
        let sigma = FourDimMatrix::builtin(Builtin::Sigma);
        let small = RunConfig { schedule: vec![4, 8, 16, 32], prefix_p: 3, ..RunConfig::default() };
        let rep = corollary_check(&sigma, Rule::Bp, &small).unwrap();
        assert_eq!(rep.class, "Cbp_to_CbpDelta");
        assert_eq!(rep.verdict, DualVerdict::Holds, "{:?}", rep.conditions);
        assert_eq!(by_id(&rep, "4.11").value, Some(1.0));
        assert_eq!(by_id(&rep, "4.13").value, Some(1.0));

        assert!(corollary_check(&sigma, Rule::P, &small).is_err());
    }

    #[test]
    fn sparse_entry_matrix_converges_to_zero_battery() {
        let one = FourDimMatrix::from_entries(vec![(0, 0, 0, 0, Scalar::Int(1))]).unwrap();
        let rep = check_class(&one, ClassId::CrToCv(Rule::R), &quick_cfg()).unwrap();
        assert_eq!(rep.verdict, DualVerdict::Holds, "{:?}", rep.conditions);
        assert_eq!(by_id(&rep, "4.7").value, Some(1.0));
        assert_eq!(by_id(&rep, "4.8").value, Some(0.0));
        assert_eq!(by_id(&rep, "4.9").value, Some(0.0));
    }
}
