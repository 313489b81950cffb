//! The difference operator Δ, its inverse S, matrix application, and the
//! E → F row combination of Theorem 4.2.

use crate::config::RunConfig;
use crate::convergence::{certify_grid, ConvergenceReport, Rule, Verdict};
use crate::error::{Error, Result};
use crate::grid::{Grid, Table};
use crate::matrix::FourDimMatrix;
use crate::scalar::ValueKind;
use crate::seq::DoubleSequence;
use crate::window::Window;

/// `y_{mn} = x_{mn} - x_{m,n-1} - x_{m-1,n} + x_{m-1,n-1}` with
/// zero-extension at negative indices.
pub fn delta(x: &DoubleSequence) -> DoubleSequence {
    x.delta()
}

/// The inverse of [`delta`]: rectangular prefix sums
/// `x_{jk} = sum_{m<=j, n<=k} y_{mn}`.
pub fn inv_delta(y: &DoubleSequence) -> DoubleSequence {
    y.prefix_sum()
}

/// The E → F combination of Eq. (4.4):
/// `f_{mnkl} = sum_{i=m-1}^{m} sum_{j=n-1}^{n} (-1)^(m+n-i-j) e_{ijkl}`.
pub fn e_to_f(e: &FourDimMatrix) -> FourDimMatrix {
    FourDimMatrix::e_to_f_of(e)
}

/// Raw truncated matrix application: `y_{mn} = sum_{(k,l) in trunc} a_{mnkl}
/// x_{kl}` for every `(m,n)` in `out`.
///
/// Computes on the exact integer path when both inputs are exact (errors with
/// [`Error::ValueOverflow`] on overflow), otherwise in f64. The boolean grid
/// flags rows whose support fit inside `trunc` (no truncation).
pub fn apply_4d_window(
    a: &FourDimMatrix,
    x: &DoubleSequence,
    out: Window,
    trunc: Window,
    cell_cap: u64,
) -> Result<(Table, Grid<bool>)> {
    let mut exact_rows = Grid::filled(out.rows(), out.cols(), false);
    let kind = a.kind().join(x.kind());
    match kind {
        ValueKind::ExactInt => {
            let xt = match x.table(trunc, cell_cap)? {
                Table::Int(g) => g,
                Table::Float(_) => unreachable!("exact kind produced float table"),
            };
            let mut y = Grid::filled(out.rows(), out.cols(), 0i64);
            for m in 0..=out.m_max {
                for n in 0..=out.n_max {
                    let mut acc = 0i64;
                    for (k, l, _) in a.row_support(m, n, trunc) {
                        let v = a
                            .entry(m, n, k, l)
                            .as_int()
                            .ok_or(Error::ValueOverflow)?;
                        let term = v.checked_mul(xt.get(k, l)).ok_or(Error::ValueOverflow)?;
                        acc = acc.checked_add(term).ok_or(Error::ValueOverflow)?;
                    }
                    y.set(m, n, acc);
                    exact_rows.set(m, n, a.truncation_exact(m, n, trunc));
                }
            }
            Ok((Table::Int(y), exact_rows))
        }
        ValueKind::Float => {
            let xt = x.table_f64(trunc, cell_cap)?;
            let mut y = Grid::filled(out.rows(), out.cols(), 0.0f64);
            for m in 0..=out.m_max {
                for n in 0..=out.n_max {
                    let mut acc = 0.0f64;
                    a.for_each_entry(m, n, trunc, &mut |k, l, v| {
                        acc += v * xt.get(k, l);
                    });
                    y.set(m, n, acc);
                    exact_rows.set(m, n, a.truncation_exact(m, n, trunc));
                }
            }
            Ok((Table::Float(y), exact_rows))
        }
    }
}

/// One row of an [`apply_4d`] result.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RowOutcome {
    pub value: f64,
    pub verdict: Verdict,
    /// True when the row sum was evaluated exactly (finite support inside
    /// the schedule's largest window).
    pub exact: bool,
}

/// Result of applying a 4-D matrix under a convergence rule.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ApplyReport {
    pub window: [usize; 2],
    pub rule: Rule,
    pub rows: Vec<Vec<RowOutcome>>,
}

impl ApplyReport {
    pub fn all_converge(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.iter().all(|c| c.verdict == Verdict::Converges))
    }

    pub fn values(&self) -> Grid<f64> {
        Grid::from_fn(self.rows.len(), self.rows[0].len(), |m, n| self.rows[m][n].value)
    }
}

/// Applies `A` to `x` over `out`, certifying each row's series under `rule`.
///
/// Rows with finite support inside the schedule's largest window evaluate
/// exactly in one step; rows with unbounded support get their rectangular
/// partial-sum array certified by the rule-v engine, so the verdict can be
/// `inconclusive` but never a silent number.
pub fn apply_4d(
    a: &FourDimMatrix,
    x: &DoubleSequence,
    rule: Rule,
    out: Window,
    cfg: &RunConfig,
) -> Result<ApplyReport> {
    let sched = cfg.window_schedule()?;
    let largest = sched.largest();
    let xt = x.table_f64(largest, cfg.cell_cap)?;
    let mut rows = Vec::with_capacity(out.rows());
    for m in 0..=out.m_max {
        let mut row = Vec::with_capacity(out.cols());
        for n in 0..=out.n_max {
            if a.truncation_exact(m, n, largest) {
                let mut acc = 0.0f64;
                a.for_each_entry(m, n, largest, &mut |k, l, v| {
                    acc += v * xt.get(k, l);
                });
                row.push(RowOutcome { value: acc, verdict: Verdict::Converges, exact: true });
            } else {
                // Materialize the term grid for this row and prefix-sum it;
                // the resulting array of rectangular partial sums is what the
                // rule-v limit applies to (Eq. 1.2 order).
                let mut partial = Grid::filled(largest.rows(), largest.cols(), 0.0f64);
                a.for_each_entry(m, n, largest, &mut |k, l, v| {
                    let prev = partial.get(k, l);
                    partial.set(k, l, prev + v * xt.get(k, l));
                });
                prefix_sum_in_place(&mut partial);
                let report = certify_grid(&partial, rule, cfg, &sched);
                row.push(RowOutcome {
                    value: report.limit.unwrap_or(f64::NAN),
                    verdict: report.verdict,
                    exact: false,
                });
            }
        }
        rows.push(row);
    }
    Ok(ApplyReport { window: [out.m_max, out.n_max], rule, rows })
}

fn prefix_sum_in_place(g: &mut Grid<f64>) {
    for m in 0..g.rows() {
        for n in 0..g.cols() {
            let up = if m > 0 { g.get(m - 1, n) } else { 0.0 };
            let left = if n > 0 { g.get(m, n - 1) } else { 0.0 };
            let diag = if m > 0 && n > 0 { g.get(m - 1, n - 1) } else { 0.0 };
            g.set(m, n, ((g.get(m, n) + up) + left) - diag);
        }
    }
}

/// Per-row convergence reports for callers that need full evidence (the CLI
/// emits the compact [`ApplyReport`] instead).
pub fn apply_row_report(
    a: &FourDimMatrix,
    x: &DoubleSequence,
    rule: Rule,
    m: usize,
    n: usize,
    cfg: &RunConfig,
) -> Result<ConvergenceReport> {
    let sched = cfg.window_schedule()?;
    let largest = sched.largest();
    let xt = x.table_f64(largest, cfg.cell_cap)?;
    let mut partial = Grid::filled(largest.rows(), largest.cols(), 0.0f64);
    a.for_each_entry(m, n, largest, &mut |k, l, v| {
        let prev = partial.get(k, l);
        partial.set(k, l, prev + v * xt.get(k, l));
    });
    prefix_sum_in_place(&mut partial);
    Ok(certify_grid(&partial, rule, cfg, &sched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::seq::catalog;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_int_table(rng: &mut StdRng, rows: usize, cols: usize) -> DoubleSequence {
        let values: Vec<Vec<serde_json::Value>> = (0..rows)
            .map(|_| (0..cols).map(|_| serde_json::json!(rng.random_range(-50..=50))).collect())
            .collect();
        catalog("table", &serde_json::json!({ "values": values, "default": 0 })).unwrap()
    }

    #[test]
    fn round_trips_are_exact_on_integer_tables() {
        let mut rng = StdRng::seed_from_u64(7);
        let w = Window::from_sides(12, 9).unwrap();
        for _ in 0..20 {
            let y = random_int_table(&mut rng, 6, 5);
            let back = delta(&inv_delta(&y));
            let forth = inv_delta(&delta(&y));
            let want = y.table(w, 1 << 20).unwrap().to_nested_f64();
            assert_eq!(back.table(w, 1 << 20).unwrap().to_nested_f64(), want);
            assert_eq!(forth.table(w, 1 << 20).unwrap().to_nested_f64(), want);
        }
    }

    #[test]
    fn apply_matches_builtin_operators() {
        let cap = 1 << 20;
        let out = Window::square(10);
        let trunc = Window::square(24);
        for x in [catalog("product_shift", &serde_json::Value::Null).unwrap(),
                  catalog("boos", &serde_json::Value::Null).unwrap()] {
            let (ad, _) = apply_4d_window(&FourDimMatrix::delta_matrix(), &x, out, trunc, cap).unwrap();
            let dt = delta(&x).table(out, cap).unwrap();
            assert_eq!(ad.to_nested_f64(), dt.to_nested_f64());

            let (asg, _) = apply_4d_window(&FourDimMatrix::sigma_matrix(), &x, out, trunc, cap).unwrap();
            let st = inv_delta(&x).table(out, cap).unwrap();
            assert_eq!(asg.to_nested_f64(), st.to_nested_f64());

            let (ai, _) = apply_4d_window(&FourDimMatrix::identity_matrix(), &x, out, trunc, cap).unwrap();
            assert_eq!(ai.to_nested_f64(), x.table(out, cap).unwrap().to_nested_f64());
        }
    }

    #[test]
    fn sigma_of_unit_impulse_is_constant_one() {
        let x = catalog("unit", &serde_json::json!({"i0": 0, "j0": 0})).unwrap();
        let (t, exact) = apply_4d_window(
            &FourDimMatrix::sigma_matrix(),
            &x,
            Window::square(6),
            Window::square(6),
            1 << 20,
        )
        .unwrap();
        for m in 0..6 {
            for n in 0..6 {
                assert_eq!(t.get(m, n), Scalar::Int(1));
                assert!(exact.get(m, n));
            }
        }
    }

    #[test]
    fn e_to_f_of_identity_is_delta() {
        let f = e_to_f(&FourDimMatrix::identity_matrix());
        let d = FourDimMatrix::delta_matrix();
        for m in 0..8 {
            for n in 0..8 {
                for k in 0..8 {
                    for l in 0..8 {
                        assert_eq!(
                            f.entry(m, n, k, l),
                            d.entry(m, n, k, l),
                            "mismatch at ({m},{n},{k},{l})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn theorem_4_2_identity_on_random_matrices() {
        // (Fx)_{mn} equals the outer Δ-combination of (Ex)_{mn} (Eq. 4.6).
        let mut rng = StdRng::seed_from_u64(42);
        let out = Window::square(12);
        let trunc = Window::square(16);
        let cap = 1 << 20;
        let x = catalog("product_shift", &serde_json::Value::Null).unwrap();
        for _ in 0..10 {
            let mut entries = Vec::new();
            for _ in 0..12 {
                let (m, n, k, l) = (
                    rng.random_range(0..6usize),
                    rng.random_range(0..6usize),
                    rng.random_range(0..6usize),
                    rng.random_range(0..6usize),
                );
                entries.push((m, n, k, l, Scalar::Int(rng.random_range(-9..=9i64))));
            }
            entries.sort_by_key(|&(m, n, k, l, _)| (m, n, k, l));
            entries.dedup_by_key(|&mut (m, n, k, l, _)| (m, n, k, l));
            let e = FourDimMatrix::from_entries(entries).unwrap();
            let f = e_to_f(&e);
            let (fx, _) = apply_4d_window(&f, &x, out, trunc, cap).unwrap();
            let (ex, _) = apply_4d_window(&e, &x, out, trunc, cap).unwrap();
            let ex = match ex {
                Table::Int(g) => g,
                _ => unreachable!(),
            };
            for m in 0..=out.m_max {
                for n in 0..=out.n_max {
                    let at = |mm: isize, nn: isize| -> i64 {
                        if mm < 0 || nn < 0 {
                            0
                        } else {
                            ex.get(mm as usize, nn as usize)
                        }
                    };
                    let (mi, ni) = (m as isize, n as isize);
                    let want = at(mi, ni) - at(mi - 1, ni) - at(mi, ni - 1) + at(mi - 1, ni - 1);
                    assert_eq!(fx.get(m, n), Scalar::Int(want), "Eq. 4.6 at ({m},{n})");
                }
            }
        }
    }

    #[test]
    fn apply_4d_overflow_is_an_error() {
        let x = catalog("constant", &serde_json::json!({"c": i64::MAX / 2})).unwrap();
        let err = apply_4d_window(
            &FourDimMatrix::sigma_matrix(),
            &x,
            Window::square(4),
            Window::square(4),
            1 << 16,
        );
        assert!(matches!(err, Err(Error::ValueOverflow)));
    }
}
