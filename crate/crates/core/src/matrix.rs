//! Four-dimensional matrices `A = (a_{mnkl})` acting on double sequences.
//!
//! A matrix maps rows indexed by `(m, n)` to coefficient double sequences in
//! `(k, l)`. Bodies are either closed forms (builtins and named row families),
//! explicit entry lists, or derived transforms (the `e -> f` combination and
//! the tail-sum transform used by the domain characterizations).
//!
//! Aggregate accessors (`row_sum`, `abs_row_sum`, ...) return the value
//! together with an `exact` flag: `true` means the row's support was fully
//! covered (no truncation), so the number is the true infinite sum.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::{Scalar, ValueKind};
use crate::window::Window;

/// A 4-D matrix with immutable, cheaply clonable body.
#[derive(Debug, Clone)]
pub struct FourDimMatrix {
    body: Arc<MatBody>,
    kind: ValueKind,
}

#[derive(Debug)]
enum MatBody {
    Builtin(Builtin),
    Entries(EntriesBody),
    Family(RowFamily),
    /// Row combination `f_{mnkl} = sum (-1)^(m+n-i-j) e_{ijkl}` over
    /// `i in {m-1, m}`, `j in {n-1, n}` (Eq. 4.4 shape).
    EToF(FourDimMatrix),
    /// `t_{mnkl} = sum_{p >= k, q >= l} a_{mnpq}` truncated at `trunc`.
    TailTransform { parent: FourDimMatrix, trunc: Window },
    /// The B-matrix of a coefficient sequence over a fixed window:
    /// `b_{mnij} = sum_{p=i..m, q=j..n} a_{pq}`, stored as prefix sums.
    BWindow { prefix: crate::grid::Table, window: Window },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// The difference matrix: `(-1)^(m+n-k-l)` on `m-1 <= k <= m`,
    /// `n-1 <= l <= n`.
    Delta,
    /// The summation matrix: `1` on `k <= m`, `l <= n`.
    Sigma,
    Identity,
}

#[derive(Debug, Clone)]
enum RowFamily {
    /// `a_{mnkl} = 1 / ((m+1)(n+1))` for `k <= m`, `l <= n` (Cesaro means).
    Cesaro,
    /// `a_{mnkl} = rho^(k+l)` for all `(k, l)`; rows have unbounded support
    /// and no declared tail bound.
    GeometricRows { rho: f64 },
}

#[derive(Debug)]
struct EntriesBody {
    rows: BTreeMap<(usize, usize), RowEntries>,
    /// Componentwise maxima over all entries, `(m, n, k, l)`.
    global_max: (usize, usize, usize, usize),
}

#[derive(Debug)]
struct RowEntries {
    /// Sorted by `(k, l)`, no duplicates, no explicit zeros.
    entries: Vec<(usize, usize, Scalar)>,
    kmin: usize,
    kmax: usize,
    lmin: usize,
    lmax: usize,
}

/// Support box of one row: the smallest rectangle containing all nonzero
/// columns, or `None` when the row is identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowBox {
    pub kmin: usize,
    pub kmax: usize,
    pub lmin: usize,
    pub lmax: usize,
}

impl FourDimMatrix {
    pub fn builtin(which: Builtin) -> FourDimMatrix {
        FourDimMatrix { body: Arc::new(MatBody::Builtin(which)), kind: ValueKind::ExactInt }
    }

    pub fn delta_matrix() -> FourDimMatrix {
        Self::builtin(Builtin::Delta)
    }

    pub fn sigma_matrix() -> FourDimMatrix {
        Self::builtin(Builtin::Sigma)
    }

    pub fn identity_matrix() -> FourDimMatrix {
        Self::builtin(Builtin::Identity)
    }

    /// Explicit entry list `(m, n, k, l, value)`. Duplicate positions are
    /// rejected; zero values are dropped.
    pub fn from_entries(list: Vec<(usize, usize, usize, usize, Scalar)>) -> Result<FourDimMatrix> {
        let mut kind = ValueKind::ExactInt;
        let mut rows: BTreeMap<(usize, usize), RowEntries> = BTreeMap::new();
        let mut global_max = (0, 0, 0, 0);
        let mut sorted = list;
        sorted.sort_by_key(|&(m, n, k, l, _)| (m, n, k, l));
        for win in sorted.windows(2) {
            let a = (win[0].0, win[0].1, win[0].2, win[0].3);
            let b = (win[1].0, win[1].1, win[1].2, win[1].3);
            if a == b {
                return Err(Error::InvalidSpec(format!("duplicate matrix entry at {a:?}")));
            }
        }
        for (m, n, k, l, v) in sorted {
            kind = kind.join(v.kind());
            if v.to_f64() == 0.0 {
                continue;
            }
            global_max = (global_max.0.max(m), global_max.1.max(n), global_max.2.max(k), global_max.3.max(l));
            let row = rows.entry((m, n)).or_insert(RowEntries {
                entries: Vec::new(),
                kmin: k,
                kmax: k,
                lmin: l,
                lmax: l,
            });
            row.kmin = row.kmin.min(k);
            row.kmax = row.kmax.max(k);
            row.lmin = row.lmin.min(l);
            row.lmax = row.lmax.max(l);
            row.entries.push((k, l, v));
        }
        Ok(FourDimMatrix {
            body: Arc::new(MatBody::Entries(EntriesBody { rows, global_max })),
            kind,
        })
    }

    /// Named closed-form row families.
    pub fn row_family(name: &str, params: &serde_json::Value) -> Result<FourDimMatrix> {
        match name {
            "cesaro" => Ok(FourDimMatrix {
                body: Arc::new(MatBody::Family(RowFamily::Cesaro)),
                kind: ValueKind::Float,
            }),
            "geometric_rows" => {
                let rho = params.get("rho").and_then(|v| v.as_f64()).ok_or_else(|| {
                    Error::InvalidSpec("row family `geometric_rows` needs numeric `rho`".into())
                })?;
                if !(rho.is_finite() && rho.abs() < 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "geometric_rows ratio must satisfy |rho| < 1, got {rho}"
                    )));
                }
                Ok(FourDimMatrix {
                    body: Arc::new(MatBody::Family(RowFamily::GeometricRows { rho })),
                    kind: ValueKind::Float,
                })
            }
            other => Err(Error::UnknownCatalogEntry(format!("row family `{other}`"))),
        }
    }

    pub(crate) fn e_to_f_of(parent: &FourDimMatrix) -> FourDimMatrix {
        FourDimMatrix { body: Arc::new(MatBody::EToF(parent.clone())), kind: parent.kind }
    }

    pub(crate) fn tail_transform_of(parent: &FourDimMatrix, trunc: Window) -> FourDimMatrix {
        FourDimMatrix {
            body: Arc::new(MatBody::TailTransform { parent: parent.clone(), trunc }),
            kind: parent.kind,
        }
    }

    pub(crate) fn b_window_of(prefix: crate::grid::Table, window: Window) -> FourDimMatrix {
        let kind = match prefix {
            crate::grid::Table::Int(_) => ValueKind::ExactInt,
            crate::grid::Table::Float(_) => ValueKind::Float,
        };
        FourDimMatrix { body: Arc::new(MatBody::BWindow { prefix, window }), kind }
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn describe(&self) -> String {
        match &*self.body {
            MatBody::Builtin(Builtin::Delta) => "delta".into(),
            MatBody::Builtin(Builtin::Sigma) => "sigma".into(),
            MatBody::Builtin(Builtin::Identity) => "identity".into(),
            MatBody::Entries(e) => format!("entries({})", e.rows.values().map(|r| r.entries.len()).sum::<usize>()),
            MatBody::Family(RowFamily::Cesaro) => "cesaro".into(),
            MatBody::Family(RowFamily::GeometricRows { rho }) => format!("geometric_rows({rho})"),
            MatBody::EToF(p) => format!("e_to_f({})", p.describe()),
            MatBody::TailTransform { parent, .. } => format!("tail({})", parent.describe()),
            MatBody::BWindow { window, .. } => {
                format!("b_matrix({}x{})", window.rows(), window.cols())
            }
        }
    }

    /// The entry `a_{mnkl}`.
    pub fn entry(&self, m: usize, n: usize, k: usize, l: usize) -> Scalar {
        match &*self.body {
            MatBody::Builtin(Builtin::Delta) => {
                let in_band = k <= m && m <= k + 1 && l <= n && n <= l + 1;
                if in_band {
                    Scalar::Int(delta_sign(m + n, k + l))
                } else {
                    Scalar::Int(0)
                }
            }
            MatBody::Builtin(Builtin::Sigma) => {
                Scalar::Int(if k <= m && l <= n { 1 } else { 0 })
            }
            MatBody::Builtin(Builtin::Identity) => {
                Scalar::Int(if k == m && l == n { 1 } else { 0 })
            }
            MatBody::Entries(e) => e
                .rows
                .get(&(m, n))
                .and_then(|r| {
                    r.entries
                        .binary_search_by_key(&(k, l), |&(ek, el, _)| (ek, el))
                        .ok()
                        .map(|i| r.entries[i].2)
                })
                .unwrap_or(Scalar::zero(self.kind)),
            MatBody::Family(RowFamily::Cesaro) => {
                if k <= m && l <= n {
                    Scalar::Float(1.0 / ((m as f64 + 1.0) * (n as f64 + 1.0)))
                } else {
                    Scalar::Float(0.0)
                }
            }
            MatBody::Family(RowFamily::GeometricRows { rho }) => {
                Scalar::Float(rho.powi((k + l).min(i32::MAX as usize) as i32))
            }
            MatBody::EToF(parent) => {
                let mut acc = 0.0f64;
                let mut int_acc: Option<i64> = match self.kind {
                    ValueKind::ExactInt => Some(0),
                    ValueKind::Float => None,
                };
                for (i, si) in neighbor_signs(m) {
                    for (j, sj) in neighbor_signs(n) {
                        let v = parent.entry(i, j, k, l);
                        let sign = (si * sj) as i64;
                        acc += sign as f64 * v.to_f64();
                        if let (Some(t), Some(vi)) = (int_acc, v.as_int()) {
                            int_acc = t.checked_add(sign * vi);
                        }
                    }
                }
                match int_acc {
                    Some(v) => Scalar::Int(v),
                    None if self.kind == ValueKind::ExactInt => {
                        // Overflow combining exact entries is outside the
                        // entry() contract; report via the float value.
                        Scalar::Float(acc)
                    }
                    None => Scalar::Float(acc),
                }
            }
            MatBody::TailTransform { parent, trunc } => {
                let mut acc = 0.0f64;
                parent.for_each_entry(m, n, *trunc, &mut |p, q, v| {
                    if p >= k && q >= l {
                        acc += v;
                    }
                });
                match self.kind {
                    ValueKind::ExactInt => Scalar::Int(acc as i64),
                    ValueKind::Float => Scalar::Float(acc),
                }
            }
            MatBody::BWindow { prefix, window } => {
                if !window.contains(m, n) || k > m || l > n {
                    return Scalar::zero(self.kind);
                }
                suffix_rect(prefix, k, m, l, n)
            }
        }
    }

    pub fn entry_f64(&self, m: usize, n: usize, k: usize, l: usize) -> f64 {
        self.entry(m, n, k, l).to_f64()
    }

    /// Visits the nonzero entries of row `(m, n)` whose column index lies in
    /// `w`, as `(k, l, value)`.
    ///
    /// Derived bodies may visit the same `(k, l)` several times with additive
    /// contributions; use [`FourDimMatrix::row_support`] when merged values
    /// are needed.
    pub fn for_each_entry(&self, m: usize, n: usize, w: Window, f: &mut dyn FnMut(usize, usize, f64)) {
        match &*self.body {
            MatBody::Builtin(Builtin::Delta) => {
                let k_lo = m.saturating_sub(1);
                let l_lo = n.saturating_sub(1);
                for k in k_lo..=m {
                    for l in l_lo..=n {
                        if w.contains(k, l) {
                            f(k, l, delta_sign(m + n, k + l) as f64);
                        }
                    }
                }
            }
            MatBody::Builtin(Builtin::Sigma) => {
                for k in 0..=m.min(w.m_max) {
                    for l in 0..=n.min(w.n_max) {
                        f(k, l, 1.0);
                    }
                }
            }
            MatBody::Builtin(Builtin::Identity) => {
                if w.contains(m, n) {
                    f(m, n, 1.0);
                }
            }
            MatBody::Entries(e) => {
                if let Some(row) = e.rows.get(&(m, n)) {
                    for &(k, l, v) in &row.entries {
                        if w.contains(k, l) {
                            f(k, l, v.to_f64());
                        }
                    }
                }
            }
            MatBody::Family(RowFamily::Cesaro) => {
                let v = 1.0 / ((m as f64 + 1.0) * (n as f64 + 1.0));
                for k in 0..=m.min(w.m_max) {
                    for l in 0..=n.min(w.n_max) {
                        f(k, l, v);
                    }
                }
            }
            MatBody::Family(RowFamily::GeometricRows { rho }) => {
                for k in 0..=w.m_max {
                    let row_factor = rho.powi(k.min(i32::MAX as usize) as i32);
                    for l in 0..=w.n_max {
                        f(k, l, row_factor * rho.powi(l.min(i32::MAX as usize) as i32));
                    }
                }
            }
            MatBody::EToF(parent) => {
                for (i, si) in neighbor_signs(m) {
                    for (j, sj) in neighbor_signs(n) {
                        let sign = (si * sj) as f64;
                        parent.for_each_entry(i, j, w, &mut |k, l, v| f(k, l, sign * v));
                    }
                }
            }
            MatBody::TailTransform { parent, trunc } => {
                // Dense within the saturated box; materialize it.
                if let Some(grid) = tail_box_grid(parent, m, n, *trunc) {
                    let (bx, g) = grid;
                    for k in 0..g.rows() {
                        for l in 0..g.cols() {
                            let v = g.get(k, l);
                            if v != 0.0 {
                                // Index (bx.kmin + k, bx.lmin + l); saturated
                                // values below the box are emitted explicitly.
                                let kk = bx.kmin + k;
                                let ll = bx.lmin + l;
                                if w.contains(kk, ll) {
                                    f(kk, ll, v);
                                }
                            }
                        }
                    }
                    // Saturation: below the box the tail repeats the box-edge
                    // value, because no support lies at smaller indices.
                    for k in 0..bx.kmin.min(w.m_max + 1) {
                        for l in 0..g.cols() {
                            let v = g.get(0, l);
                            if v != 0.0 && w.contains(k, bx.lmin + l) {
                                f(k, bx.lmin + l, v);
                            }
                        }
                    }
                    for l in 0..bx.lmin.min(w.n_max + 1) {
                        for k in 0..g.rows() {
                            let v = g.get(k, 0);
                            if v != 0.0 && w.contains(bx.kmin + k, l) {
                                f(bx.kmin + k, l, v);
                            }
                        }
                    }
                    let corner = g.get(0, 0);
                    if corner != 0.0 {
                        for k in 0..bx.kmin.min(w.m_max + 1) {
                            for l in 0..bx.lmin.min(w.n_max + 1) {
                                f(k, l, corner);
                            }
                        }
                    }
                }
            }
            MatBody::BWindow { prefix, window } => {
                if !window.contains(m, n) {
                    return;
                }
                for i in 0..=m.min(w.m_max) {
                    for j in 0..=n.min(w.n_max) {
                        let v = suffix_rect(prefix, i, m, j, n).to_f64();
                        if v != 0.0 {
                            f(i, j, v);
                        }
                    }
                }
            }
        }
    }

    /// Merged nonzero entries of a row within `w`, sorted by `(k, l)`.
    pub fn row_support(&self, m: usize, n: usize, w: Window) -> Vec<(usize, usize, f64)> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        self.for_each_entry(m, n, w, &mut |k, l, v| entries.push((k, l, v)));
        entries.sort_unstable_by_key(|&(k, l, _)| (k, l));
        entries.dedup_by(|cur, prev| {
            if prev.0 == cur.0 && prev.1 == cur.1 {
                prev.2 += cur.2;
                true
            } else {
                false
            }
        });
        entries.retain(|&(_, _, v)| v != 0.0);
        entries
    }

    /// Componentwise maximum `(k, l)` that can carry a nonzero entry in row
    /// `(m, n)`, or `None` when the row's support is unbounded.
    pub fn row_bound(&self, m: usize, n: usize) -> Option<(usize, usize)> {
        match &*self.body {
            MatBody::Builtin(_) | MatBody::Family(RowFamily::Cesaro) => Some((m, n)),
            MatBody::Entries(e) => {
                let row = e.rows.get(&(m, n));
                Some(row.map_or((0, 0), |r| (r.kmax, r.lmax)))
            }
            MatBody::Family(RowFamily::GeometricRows { .. }) => None,
            MatBody::EToF(parent) => {
                let mut kmax = 0usize;
                let mut lmax = 0usize;
                for (i, _) in neighbor_signs(m) {
                    for (j, _) in neighbor_signs(n) {
                        let (k, l) = parent.row_bound(i, j)?;
                        kmax = kmax.max(k);
                        lmax = lmax.max(l);
                    }
                }
                Some((kmax, lmax))
            }
            MatBody::TailTransform { parent, .. } => parent.row_bound(m, n),
            MatBody::BWindow { window, .. } => {
                if window.contains(m, n) {
                    Some((m, n))
                } else {
                    Some((0, 0))
                }
            }
        }
    }

    /// Componentwise maximum `(m, n)` of rows that can carry a nonzero entry
    /// at column `(k, l)`; `None` when unbounded or not structurally known.
    pub fn inverse_bound(&self, k: usize, l: usize) -> Option<(usize, usize)> {
        match &*self.body {
            MatBody::Builtin(Builtin::Delta) => Some((k + 1, l + 1)),
            MatBody::Builtin(Builtin::Identity) => Some((k, l)),
            MatBody::Builtin(Builtin::Sigma) | MatBody::Family(_) => None,
            MatBody::Entries(e) => Some((e.global_max.0, e.global_max.1)),
            MatBody::EToF(parent) => {
                parent.inverse_bound(k, l).map(|(m, n)| (m + 1, n + 1))
            }
            MatBody::TailTransform { .. } => None,
            MatBody::BWindow { window, .. } => Some((window.m_max, window.n_max)),
        }
    }

    /// `sum_{(k,l) in w} a_{mnkl}` with truncation flag.
    pub fn row_sum(&self, m: usize, n: usize, w: Window) -> (f64, bool) {
        match &*self.body {
            MatBody::Builtin(Builtin::Delta) => {
                // Signs cancel except at the origin, provided the window does
                // not cut through the 2x2 band; windows always contain (0, 0)
                // so a cut can only drop cancelling pairs symmetrically when
                // the row itself lies inside.
                if w.contains(m, n) {
                    ((m == 0 && n == 0) as u32 as f64, true)
                } else {
                    self.fold_row(m, n, w, |v| v)
                }
            }
            MatBody::Builtin(Builtin::Sigma) => {
                let rows = (m.min(w.m_max) + 1) as f64;
                let cols = (n.min(w.n_max) + 1) as f64;
                (rows * cols, w.contains(m, n))
            }
            MatBody::Builtin(Builtin::Identity) => {
                if w.contains(m, n) {
                    (1.0, true)
                } else {
                    (0.0, false)
                }
            }
            MatBody::Family(RowFamily::Cesaro) => {
                let rows = (m.min(w.m_max) + 1) as f64;
                let cols = (n.min(w.n_max) + 1) as f64;
                (rows * cols / ((m as f64 + 1.0) * (n as f64 + 1.0)), w.contains(m, n))
            }
            MatBody::EToF(parent) => combine_neighbors(m, n, |i, j| parent.row_sum(i, j, w)),
            MatBody::TailTransform { parent, trunc } => {
                // sum over (k,l) <= (K,L) of tails = weighted sum of parent
                // entries: entry (p,q,v) is counted (min(p,K)+1)(min(q,L)+1)
                // times.
                let mut acc = 0.0;
                parent.for_each_entry(m, n, *trunc, &mut |p, q, v| {
                    acc += v * (p.min(w.m_max) + 1) as f64 * (q.min(w.n_max) + 1) as f64;
                });
                (acc, self.tail_exact(m, n))
            }
            _ => self.fold_row(m, n, w, |v| v),
        }
    }

    /// `sum_{(k,l) in w} |a_{mnkl}|` with truncation flag.
    pub fn abs_row_sum(&self, m: usize, n: usize, w: Window) -> (f64, bool) {
        match &*self.body {
            MatBody::Builtin(Builtin::Delta) => {
                let inside = |k: usize, l: usize| w.contains(k, l) as u32;
                let mut count = 0u32;
                for k in m.saturating_sub(1)..=m {
                    for l in n.saturating_sub(1)..=n {
                        count += inside(k, l);
                    }
                }
                (count as f64, true)
            }
            MatBody::Builtin(Builtin::Sigma)
            | MatBody::Builtin(Builtin::Identity)
            | MatBody::Family(RowFamily::Cesaro) => self.row_sum(m, n, w),
            MatBody::EToF(_) => {
                // e_to_f may hit a column from several parent rows; merge
                // before taking absolute values.
                let support = self.row_support(m, n, w);
                let exact = self.truncation_exact(m, n, w) && self.tail_exact(m, n);
                (support.iter().map(|&(_, _, v)| v.abs()).sum(), exact)
            }
            MatBody::TailTransform { .. } => {
                // Tail rows are emitted merged, one visit per column.
                let mut acc = 0.0;
                self.for_each_entry(m, n, w, &mut |_, _, v| acc += v.abs());
                (acc, self.truncation_exact(m, n, w) && self.tail_exact(m, n))
            }
            _ => self.fold_row(m, n, w, f64::abs),
        }
    }

    /// `sum_{k <= w.m_max} a_{mnk l0}` with truncation flag.
    pub fn col_partial_sum(&self, m: usize, n: usize, l0: usize, w: Window) -> (f64, bool) {
        match &*self.body {
            MatBody::Builtin(Builtin::Delta) => {
                let in_cols = l0 <= n && n <= l0 + 1;
                let v = if in_cols && m == 0 && w.contains(0, l0) {
                    delta_sign(n, l0) as f64
                } else {
                    0.0
                };
                (v, true)
            }
            MatBody::Builtin(Builtin::Sigma) => {
                let v = if l0 <= n { (m.min(w.m_max) + 1) as f64 } else { 0.0 };
                (v, w.contains(m, n))
            }
            MatBody::Builtin(Builtin::Identity) => {
                ((l0 == n && w.contains(m, l0)) as u32 as f64, true)
            }
            MatBody::Family(RowFamily::Cesaro) => {
                let v = if l0 <= n {
                    (m.min(w.m_max) + 1) as f64 / ((m as f64 + 1.0) * (n as f64 + 1.0))
                } else {
                    0.0
                };
                (v, w.contains(m, n))
            }
            MatBody::EToF(parent) => {
                combine_neighbors(m, n, |i, j| parent.col_partial_sum(i, j, l0, w))
            }
            MatBody::TailTransform { parent, trunc } => {
                let mut acc = 0.0;
                parent.for_each_entry(m, n, *trunc, &mut |p, q, v| {
                    if q >= l0 {
                        acc += v * (p.min(w.m_max) + 1) as f64;
                    }
                });
                (acc, self.tail_exact(m, n))
            }
            _ => {
                let mut acc = 0.0;
                self.for_each_entry(m, n, w, &mut |_, l, v| {
                    if l == l0 {
                        acc += v;
                    }
                });
                (acc, self.truncation_exact(m, n, w))
            }
        }
    }

    /// `sum_{l <= w.n_max} a_{mn k0 l}` with truncation flag.
    pub fn row_partial_sum(&self, m: usize, n: usize, k0: usize, w: Window) -> (f64, bool) {
        match &*self.body {
            MatBody::Builtin(Builtin::Delta) => {
                let in_rows = k0 <= m && m <= k0 + 1;
                let v = if in_rows && n == 0 && w.contains(k0, 0) {
                    delta_sign(m, k0) as f64
                } else {
                    0.0
                };
                (v, true)
            }
            MatBody::Builtin(Builtin::Sigma) => {
                let v = if k0 <= m { (n.min(w.n_max) + 1) as f64 } else { 0.0 };
                (v, w.contains(m, n))
            }
            MatBody::Builtin(Builtin::Identity) => {
                ((k0 == m && w.contains(k0, n)) as u32 as f64, true)
            }
            MatBody::Family(RowFamily::Cesaro) => {
                let v = if k0 <= m {
                    (n.min(w.n_max) + 1) as f64 / ((m as f64 + 1.0) * (n as f64 + 1.0))
                } else {
                    0.0
                };
                (v, w.contains(m, n))
            }
            MatBody::EToF(parent) => {
                combine_neighbors(m, n, |i, j| parent.row_partial_sum(i, j, k0, w))
            }
            MatBody::TailTransform { parent, trunc } => {
                let mut acc = 0.0;
                parent.for_each_entry(m, n, *trunc, &mut |p, q, v| {
                    if p >= k0 {
                        acc += v * (q.min(w.n_max) + 1) as f64;
                    }
                });
                (acc, self.tail_exact(m, n))
            }
            _ => {
                let mut acc = 0.0;
                self.for_each_entry(m, n, w, &mut |k, _, v| {
                    if k == k0 {
                        acc += v;
                    }
                });
                (acc, self.truncation_exact(m, n, w))
            }
        }
    }

    /// The tail sum `sum_{p >= k, q >= l} a_{mnpq}` truncated at `trunc`.
    /// The flag reports whether the row's support fit inside `trunc`.
    pub fn tail_sum(&self, m: usize, n: usize, k: usize, l: usize, trunc: Window) -> (f64, bool) {
        let mut acc = 0.0;
        self.for_each_entry(m, n, trunc, &mut |p, q, v| {
            if p >= k && q >= l {
                acc += v;
            }
        });
        (acc, self.truncation_exact(m, n, trunc))
    }

    fn fold_row(&self, m: usize, n: usize, w: Window, f: impl Fn(f64) -> f64) -> (f64, bool) {
        let mut acc = 0.0;
        self.for_each_entry(m, n, w, &mut |_, _, v| acc += f(v));
        (acc, self.truncation_exact(m, n, w))
    }

    /// Whether aggregates over window `w` cover the whole row.
    pub fn truncation_exact(&self, m: usize, n: usize, w: Window) -> bool {
        match self.row_bound(m, n) {
            Some((k, l)) => w.contains(k, l),
            None => false,
        }
    }

    fn tail_exact(&self, m: usize, n: usize) -> bool {
        match &*self.body {
            MatBody::TailTransform { parent, trunc } => parent.truncation_exact(m, n, *trunc),
            _ => true,
        }
    }

    /// Whether [`FourDimMatrix::for_each_entry`] may visit the same column
    /// twice in one row. Only `e_to_f` combines overlapping parent rows; all
    /// other bodies emit merged values.
    pub(crate) fn may_duplicate_entries(&self) -> bool {
        matches!(&*self.body, MatBody::EToF(_))
    }

    /// Componentwise bound on the support columns `(k, l)` that is uniform
    /// over all rows, when one is structurally known.
    pub(crate) fn global_col_bound(&self) -> Option<(usize, usize)> {
        match &*self.body {
            MatBody::Entries(e) => Some((e.global_max.2, e.global_max.3)),
            MatBody::BWindow { window, .. } => Some((window.m_max, window.n_max)),
            // e_to_f combines parent rows without moving columns; tails vanish
            // once (k, l) leaves the parent's support.
            MatBody::EToF(parent) => parent.global_col_bound(),
            MatBody::TailTransform { parent, .. } => parent.global_col_bound(),
            MatBody::Builtin(_) | MatBody::Family(_) => None,
        }
    }

    pub(crate) fn body_tag(&self) -> BodyTag {
        match &*self.body {
            MatBody::Builtin(b) => BodyTag::Builtin(*b),
            MatBody::Entries(_) => BodyTag::Entries,
            MatBody::Family(_) => BodyTag::Family,
            MatBody::EToF(_) => BodyTag::EToF,
            MatBody::TailTransform { .. } => BodyTag::TailTransform,
            MatBody::BWindow { .. } => BodyTag::BWindow,
        }
    }

}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BodyTag {
    Builtin(Builtin),
    Entries,
    Family,
    EToF,
    TailTransform,
    BWindow,
}

/// The spec-level accessor: `a_{(m,n),(k,l)}`.
pub fn mat_entry(a: &FourDimMatrix, m: usize, n: usize, k: usize, l: usize) -> Scalar {
    a.entry(m, n, k, l)
}

fn delta_sign(mn: usize, kl: usize) -> i64 {
    if (mn - kl) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(index, sign)` pairs for `i in {m-1, m}` with sign `(-1)^(m-i)`;
/// the `m-1` term is dropped at the boundary (zero row convention).
fn neighbor_signs(m: usize) -> Vec<(usize, i32)> {
    if m == 0 {
        vec![(0, 1)]
    } else {
        vec![(m, 1), (m - 1, -1)]
    }
}

fn combine_neighbors(m: usize, n: usize, f: impl Fn(usize, usize) -> (f64, bool)) -> (f64, bool) {
    let mut acc = 0.0;
    let mut exact = true;
    for (i, si) in neighbor_signs(m) {
        for (j, sj) in neighbor_signs(n) {
            let (v, e) = f(i, j);
            acc += (si * sj) as f64 * v;
            exact &= e;
        }
    }
    (acc, exact)
}

fn suffix_rect(prefix: &crate::grid::Table, k: usize, m: usize, l: usize, n: usize) -> Scalar {
    let at = |mm: isize, nn: isize| -> Scalar {
        if mm < 0 || nn < 0 {
            match prefix {
                crate::grid::Table::Int(_) => Scalar::Int(0),
                crate::grid::Table::Float(_) => Scalar::Float(0.0),
            }
        } else {
            prefix.get(mm as usize, nn as usize)
        }
    };
    let (ki, li) = (k as isize, l as isize);
    let total = at(m as isize, n as isize);
    let top = at(ki - 1, n as isize);
    let left = at(m as isize, li - 1);
    let diag = at(ki - 1, li - 1);
    // Exact path: all four corner reads are prefix sums that already fit in
    // i64; the inclusion-exclusion differences cannot overflow past the total.
    match (total, top, left, diag) {
        (Scalar::Int(t), Scalar::Int(a), Scalar::Int(b), Scalar::Int(d)) => {
            Scalar::Int(t - a - b + d)
        }
        (t, a, b, d) => Scalar::Float(((t.to_f64() - a.to_f64()) - b.to_f64()) + d.to_f64()),
    }
}

/// Materializes the tail values over the support box of a row. Returns the
/// box and a grid of `t(k, l)` for `(k, l)` in the box, or `None` for a zero
/// row.
fn tail_box_grid(
    parent: &FourDimMatrix,
    m: usize,
    n: usize,
    trunc: Window,
) -> Option<(RowBox, Grid<f64>)> {
    let support = parent.row_support(m, n, trunc);
    if support.is_empty() {
        return None;
    }
    let kmin = support.iter().map(|&(k, _, _)| k).min().unwrap();
    let kmax = support.iter().map(|&(k, _, _)| k).max().unwrap();
    let lmin = support.iter().map(|&(_, l, _)| l).min().unwrap();
    let lmax = support.iter().map(|&(_, l, _)| l).max().unwrap();
    let bx = RowBox { kmin, kmax, lmin, lmax };
    let rows = kmax - kmin + 1;
    let cols = lmax - lmin + 1;
    let mut g = Grid::filled(rows, cols, 0.0f64);
    for &(k, l, v) in &support {
        g.set(k - kmin, l - lmin, v);
    }
    // Suffix sums: t(k, l) = sum over p >= k, q >= l.
    for k in (0..rows).rev() {
        for l in (0..cols).rev() {
            let down = if k + 1 < rows { g.get(k + 1, l) } else { 0.0 };
            let right = if l + 1 < cols { g.get(k, l + 1) } else { 0.0 };
            let diag = if k + 1 < rows && l + 1 < cols { g.get(k + 1, l + 1) } else { 0.0 };
            g.set(k, l, ((g.get(k, l) + down) + right) - diag);
        }
    }
    Some((bx, g))
}
