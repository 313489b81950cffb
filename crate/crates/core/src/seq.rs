//! Double sequences: catalog closed forms, finite tables, and lazy
//! combinators, evaluated pointwise or over whole windows.
//!
//! Indexing is 0-based throughout. Evaluation at a negative index is 0 (the
//! zero-extension convention), which is what makes the difference operator a
//! bijection on the space of all double sequences.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{check_cells, Grid, Table};
use crate::scalar::{Scalar, ValueKind};
use crate::window::Window;

/// Cap on cells materialized internally when a prefix-sum body is evaluated
/// pointwise; window-level calls take an explicit cap instead.
const EVAL_CELL_CAP: u64 = 1 << 26;

/// A double sequence `x_{mn}` with a declared numeric path.
///
/// Cloning is cheap (the body is shared). All bodies are immutable, so values
/// are safe to evaluate from multiple threads and identical calls return
/// bit-identical results.
#[derive(Debug, Clone)]
pub struct DoubleSequence {
    body: Arc<Body>,
    kind: ValueKind,
}

#[derive(Debug)]
enum Body {
    Closed(ClosedForm),
    Table { data: Table, default: Scalar },
    Add(DoubleSequence, DoubleSequence),
    Sub(DoubleSequence, DoubleSequence),
    Mul(DoubleSequence, DoubleSequence),
    Scale(Scalar, DoubleSequence),
    Abs(DoubleSequence),
    /// `|x|^q`; always on the float path.
    PowAbs(DoubleSequence, f64),
    /// The order-one difference `(delta x)_{mn}`.
    Delta(DoubleSequence),
    /// Rectangular prefix sums `sum_{i<=m, j<=n} x_{ij}`.
    PrefixSum(DoubleSequence),
}

#[derive(Debug, Clone)]
enum ClosedForm {
    /// `n` on row 0, `0` elsewhere (Boos's unbounded p-convergent sequence).
    Boos,
    /// `m * n`.
    Product,
    /// `(m + 1) * (n + 1)`.
    ProductShift,
    /// `m`.
    RowIndex,
    /// `n`.
    ColIndex,
    /// `1` on column 0, `0` elsewhere.
    Column0Indicator,
    Constant(Scalar),
    /// `rho^(m + n)`.
    Geometric { rho: f64 },
    /// `1` at `(i0, j0)`, `0` elsewhere.
    Unit { i0: usize, j0: usize },
    /// `1 / ((m + 1)^p * (n + 1)^q)`.
    InvPower { p: f64, q: f64 },
    /// `(-1)^(m + n)`.
    Alternating,
}

impl DoubleSequence {
    fn closed(form: ClosedForm, kind: ValueKind) -> DoubleSequence {
        DoubleSequence { body: Arc::new(Body::Closed(form)), kind }
    }

    pub fn boos() -> DoubleSequence {
        Self::closed(ClosedForm::Boos, ValueKind::ExactInt)
    }

    pub fn product() -> DoubleSequence {
        Self::closed(ClosedForm::Product, ValueKind::ExactInt)
    }

    pub fn product_shift() -> DoubleSequence {
        Self::closed(ClosedForm::ProductShift, ValueKind::ExactInt)
    }

    pub fn row_index() -> DoubleSequence {
        Self::closed(ClosedForm::RowIndex, ValueKind::ExactInt)
    }

    pub fn col_index() -> DoubleSequence {
        Self::closed(ClosedForm::ColIndex, ValueKind::ExactInt)
    }

    pub fn column0_indicator() -> DoubleSequence {
        Self::closed(ClosedForm::Column0Indicator, ValueKind::ExactInt)
    }

    pub fn constant(c: Scalar) -> DoubleSequence {
        let kind = c.kind();
        Self::closed(ClosedForm::Constant(c), kind)
    }

    pub fn geometric(rho: f64) -> Result<DoubleSequence> {
        if !rho.is_finite() {
            return Err(Error::InvalidSpec(format!("geometric ratio must be finite, got {rho}")));
        }
        Ok(Self::closed(ClosedForm::Geometric { rho }, ValueKind::Float))
    }

    pub fn unit(i0: usize, j0: usize) -> DoubleSequence {
        Self::closed(ClosedForm::Unit { i0, j0 }, ValueKind::ExactInt)
    }

    pub fn inv_power(p: f64, q: f64) -> Result<DoubleSequence> {
        if !(p.is_finite() && q.is_finite() && p >= 0.0 && q >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "inv_power exponents must be finite and nonnegative, got ({p}, {q})"
            )));
        }
        Ok(Self::closed(ClosedForm::InvPower { p, q }, ValueKind::Float))
    }

    pub fn alternating() -> DoubleSequence {
        Self::closed(ClosedForm::Alternating, ValueKind::ExactInt)
    }

    /// Finite table with a constant value outside the stored rectangle.
    pub fn from_table(data: Table, default: Scalar) -> DoubleSequence {
        let kind = match (&data, default) {
            (Table::Int(_), Scalar::Int(_)) => ValueKind::ExactInt,
            _ => ValueKind::Float,
        };
        DoubleSequence { body: Arc::new(Body::Table { data, default }), kind }
    }

    pub fn from_int_rows(rows: Vec<Vec<i64>>, default: i64) -> Result<DoubleSequence> {
        let grid = rect_grid(rows)?;
        Ok(Self::from_table(Table::Int(grid), Scalar::Int(default)))
    }

    pub fn from_f64_rows(rows: Vec<Vec<f64>>, default: f64) -> Result<DoubleSequence> {
        let grid = rect_grid(rows)?;
        Ok(Self::from_table(Table::Float(grid), Scalar::Float(default)))
    }

    pub fn add(&self, rhs: &DoubleSequence) -> DoubleSequence {
        let kind = self.kind.join(rhs.kind);
        DoubleSequence { body: Arc::new(Body::Add(self.clone(), rhs.clone())), kind }
    }

    pub fn sub(&self, rhs: &DoubleSequence) -> DoubleSequence {
        let kind = self.kind.join(rhs.kind);
        DoubleSequence { body: Arc::new(Body::Sub(self.clone(), rhs.clone())), kind }
    }

    pub fn mul(&self, rhs: &DoubleSequence) -> DoubleSequence {
        let kind = self.kind.join(rhs.kind);
        DoubleSequence { body: Arc::new(Body::Mul(self.clone(), rhs.clone())), kind }
    }

    pub fn scale(&self, c: Scalar) -> DoubleSequence {
        let kind = self.kind.join(c.kind());
        DoubleSequence { body: Arc::new(Body::Scale(c, self.clone())), kind }
    }

    pub fn abs(&self) -> DoubleSequence {
        DoubleSequence { body: Arc::new(Body::Abs(self.clone())), kind: self.kind }
    }

    /// `|x|^q` on the float path; `q` must be at least 1.
    pub fn pow_abs(&self, q: f64) -> Result<DoubleSequence> {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::InvalidExponent(q));
        }
        Ok(DoubleSequence { body: Arc::new(Body::PowAbs(self.clone(), q)), kind: ValueKind::Float })
    }

    /// The order-one difference transform of this sequence.
    pub fn delta(&self) -> DoubleSequence {
        DoubleSequence { body: Arc::new(Body::Delta(self.clone())), kind: self.kind }
    }

    /// Rectangular prefix sums (the inverse of [`DoubleSequence::delta`]).
    pub fn prefix_sum(&self) -> DoubleSequence {
        DoubleSequence { body: Arc::new(Body::PrefixSum(self.clone())), kind: self.kind }
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    /// Short human-readable description used in reports.
    pub fn describe(&self) -> String {
        match &*self.body {
            Body::Closed(c) => match c {
                ClosedForm::Boos => "boos".into(),
                ClosedForm::Product => "product".into(),
                ClosedForm::ProductShift => "product_shift".into(),
                ClosedForm::RowIndex => "row_index".into(),
                ClosedForm::ColIndex => "col_index".into(),
                ClosedForm::Column0Indicator => "column0_indicator".into(),
                ClosedForm::Constant(c) => format!("constant({})", c.to_f64()),
                ClosedForm::Geometric { rho } => format!("geometric({rho})"),
                ClosedForm::Unit { i0, j0 } => format!("unit({i0},{j0})"),
                ClosedForm::InvPower { p, q } => format!("inv_power({p},{q})"),
                ClosedForm::Alternating => "alternating".into(),
            },
            Body::Table { data, .. } => format!("table({}x{})", data.rows(), data.cols()),
            Body::Add(a, b) => format!("({} + {})", a.describe(), b.describe()),
            Body::Sub(a, b) => format!("({} - {})", a.describe(), b.describe()),
            Body::Mul(a, b) => format!("({} * {})", a.describe(), b.describe()),
            Body::Scale(c, x) => format!("{}*{}", c.to_f64(), x.describe()),
            Body::Abs(x) => format!("abs({})", x.describe()),
            Body::PowAbs(x, q) => format!("abs({})^{}", x.describe(), q),
            Body::Delta(x) => format!("delta({})", x.describe()),
            Body::PrefixSum(x) => format!("sum({})", x.describe()),
        }
    }

    /// Value at `(m, n)`; negative indices read as zero.
    ///
    /// Prefix-sum bodies materialize the rectangle below the requested index
    /// (capped at 2^26 cells) so that pointwise and window evaluation produce
    /// bit-identical values.
    pub fn eval(&self, m: i64, n: i64) -> Result<Scalar> {
        if m < 0 || n < 0 {
            return Ok(Scalar::zero(self.kind));
        }
        let (m, n) = (m as usize, n as usize);
        match &*self.body {
            Body::Closed(c) => eval_closed(c, m, n),
            Body::Table { data, default } => {
                if m < data.rows() && n < data.cols() {
                    Ok(data.get(m, n))
                } else {
                    Ok(*default)
                }
            }
            Body::Add(a, b) => a.eval(m as i64, n as i64)?.checked_add(b.eval(m as i64, n as i64)?),
            Body::Sub(a, b) => a.eval(m as i64, n as i64)?.checked_sub(b.eval(m as i64, n as i64)?),
            Body::Mul(a, b) => a.eval(m as i64, n as i64)?.checked_mul(b.eval(m as i64, n as i64)?),
            Body::Scale(c, x) => c.checked_mul(x.eval(m as i64, n as i64)?),
            Body::Abs(x) => checked_abs(x.eval(m as i64, n as i64)?),
            Body::PowAbs(x, q) => {
                Ok(Scalar::Float(x.eval(m as i64, n as i64)?.to_f64().abs().powf(*q)))
            }
            Body::Delta(x) => {
                let (m, n) = (m as i64, n as i64);
                let v = x.eval(m, n)?;
                let v = v.checked_sub(x.eval(m, n - 1)?)?;
                let v = v.checked_sub(x.eval(m - 1, n)?)?;
                v.checked_add(x.eval(m - 1, n - 1)?)
            }
            Body::PrefixSum(_) => {
                let w = Window::new(m, n);
                check_cells(w.rows(), w.cols(), EVAL_CELL_CAP)?;
                Ok(self.table(w, EVAL_CELL_CAP)?.get(m, n))
            }
        }
    }

    /// Convenience float view of [`DoubleSequence::eval`].
    pub fn eval_f64(&self, m: i64, n: i64) -> Result<f64> {
        Ok(self.eval(m, n)?.to_f64())
    }

    /// Materializes the window `[0..=m_max] x [0..=n_max]` on the sequence's
    /// declared numeric path.
    pub fn table(&self, w: Window, cell_cap: u64) -> Result<Table> {
        check_cells(w.rows(), w.cols(), cell_cap)?;
        match self.kind {
            ValueKind::ExactInt => Ok(Table::Int(self.fill_exact(w)?)),
            ValueKind::Float => Ok(Table::Float(self.fill_f64(w))),
        }
    }

    /// Materializes the window in `f64` regardless of the declared path.
    /// Never overflows; this is what the certifiers consume.
    pub fn table_f64(&self, w: Window, cell_cap: u64) -> Result<Grid<f64>> {
        check_cells(w.rows(), w.cols(), cell_cap)?;
        Ok(self.fill_f64(w))
    }

    fn fill_exact(&self, w: Window) -> Result<Grid<i64>> {
        debug_assert_eq!(self.kind, ValueKind::ExactInt);
        let (rows, cols) = (w.rows(), w.cols());
        match &*self.body {
            Body::Closed(c) => {
                let mut g = Grid::filled(rows, cols, 0i64);
                for m in 0..rows {
                    for n in 0..cols {
                        match eval_closed(c, m, n)? {
                            Scalar::Int(v) => g.set(m, n, v),
                            Scalar::Float(_) => unreachable!("closed form kind mismatch"),
                        }
                    }
                }
                Ok(g)
            }
            Body::Table { data, default } => {
                let (Table::Int(src), Scalar::Int(d)) = (data, default) else {
                    unreachable!("table kind mismatch")
                };
                Ok(Grid::from_fn(rows, cols, |m, n| {
                    if m < src.rows() && n < src.cols() {
                        src.get(m, n)
                    } else {
                        *d
                    }
                }))
            }
            Body::Add(a, b) => zip_exact(a.fill_exact(w)?, b.fill_exact(w)?, i64::checked_add),
            Body::Sub(a, b) => zip_exact(a.fill_exact(w)?, b.fill_exact(w)?, i64::checked_sub),
            Body::Mul(a, b) => zip_exact(a.fill_exact(w)?, b.fill_exact(w)?, i64::checked_mul),
            Body::Scale(c, x) => {
                let Scalar::Int(c) = c else { unreachable!("scale kind mismatch") };
                let inner = x.fill_exact(w)?;
                map_exact(inner, |v| c.checked_mul(v))
            }
            Body::Abs(x) => map_exact(x.fill_exact(w)?, i64::checked_abs),
            Body::PowAbs(..) => unreachable!("pow_abs is always float-kind"),
            Body::Delta(x) => {
                let src = x.fill_exact(w)?;
                let mut g = Grid::filled(rows, cols, 0i64);
                for m in 0..rows {
                    for n in 0..cols {
                        let at = |mm: isize, nn: isize| -> i64 {
                            if mm < 0 || nn < 0 {
                                0
                            } else {
                                src.get(mm as usize, nn as usize)
                            }
                        };
                        let (mi, ni) = (m as isize, n as isize);
                        let v = at(mi, ni)
                            .checked_sub(at(mi, ni - 1))
                            .and_then(|v| v.checked_sub(at(mi - 1, ni)))
                            .and_then(|v| v.checked_add(at(mi - 1, ni - 1)))
                            .ok_or(Error::ValueOverflow)?;
                        g.set(m, n, v);
                    }
                }
                Ok(g)
            }
            Body::PrefixSum(x) => {
                let src = x.fill_exact(w)?;
                let mut g = Grid::filled(rows, cols, 0i64);
                for m in 0..rows {
                    for n in 0..cols {
                        let up = if m > 0 { g.get(m - 1, n) } else { 0 };
                        let left = if n > 0 { g.get(m, n - 1) } else { 0 };
                        let diag = if m > 0 && n > 0 { g.get(m - 1, n - 1) } else { 0 };
                        let v = src
                            .get(m, n)
                            .checked_add(up)
                            .and_then(|v| v.checked_add(left))
                            .and_then(|v| v.checked_sub(diag))
                            .ok_or(Error::ValueOverflow)?;
                        g.set(m, n, v);
                    }
                }
                Ok(g)
            }
        }
    }

    fn fill_f64(&self, w: Window) -> Grid<f64> {
        let (rows, cols) = (w.rows(), w.cols());
        match &*self.body {
            Body::Closed(c) => Grid::from_fn(rows, cols, |m, n| closed_f64(c, m, n)),
            Body::Table { data, default } => {
                let d = default.to_f64();
                match data {
                    Table::Int(src) => Grid::from_fn(rows, cols, |m, n| {
                        if m < src.rows() && n < src.cols() {
                            src.get(m, n) as f64
                        } else {
                            d
                        }
                    }),
                    Table::Float(src) => Grid::from_fn(rows, cols, |m, n| {
                        if m < src.rows() && n < src.cols() {
                            src.get(m, n)
                        } else {
                            d
                        }
                    }),
                }
            }
            Body::Add(a, b) => zip_f64(a.fill_f64(w), b.fill_f64(w), |x, y| x + y),
            Body::Sub(a, b) => zip_f64(a.fill_f64(w), b.fill_f64(w), |x, y| x - y),
            Body::Mul(a, b) => zip_f64(a.fill_f64(w), b.fill_f64(w), |x, y| x * y),
            Body::Scale(c, x) => {
                let c = c.to_f64();
                let inner = x.fill_f64(w);
                Grid::from_fn(rows, cols, |m, n| c * inner.get(m, n))
            }
            Body::Abs(x) => {
                let inner = x.fill_f64(w);
                Grid::from_fn(rows, cols, |m, n| inner.get(m, n).abs())
            }
            Body::PowAbs(x, q) => {
                let inner = x.fill_f64(w);
                Grid::from_fn(rows, cols, |m, n| inner.get(m, n).abs().powf(*q))
            }
            Body::Delta(x) => {
                let src = x.fill_f64(w);
                Grid::from_fn(rows, cols, |m, n| {
                    let at = |mm: isize, nn: isize| -> f64 {
                        if mm < 0 || nn < 0 {
                            0.0
                        } else {
                            src.get(mm as usize, nn as usize)
                        }
                    };
                    let (mi, ni) = (m as isize, n as isize);
                    ((at(mi, ni) - at(mi, ni - 1)) - at(mi - 1, ni)) + at(mi - 1, ni - 1)
                })
            }
            Body::PrefixSum(x) => {
                let src = x.fill_f64(w);
                let mut g = Grid::filled(rows, cols, 0.0f64);
                for m in 0..rows {
                    for n in 0..cols {
                        let up = if m > 0 { g.get(m - 1, n) } else { 0.0 };
                        let left = if n > 0 { g.get(m, n - 1) } else { 0.0 };
                        let diag = if m > 0 && n > 0 { g.get(m - 1, n - 1) } else { 0.0 };
                        g.set(m, n, ((src.get(m, n) + up) + left) - diag);
                    }
                }
                g
            }
        }
    }
}

fn checked_abs(v: Scalar) -> Result<Scalar> {
    match v {
        Scalar::Int(v) => v.checked_abs().map(Scalar::Int).ok_or(Error::ValueOverflow),
        Scalar::Float(v) => Ok(Scalar::Float(v.abs())),
    }
}

fn zip_exact(
    a: Grid<i64>,
    b: Grid<i64>,
    op: impl Fn(i64, i64) -> Option<i64>,
) -> Result<Grid<i64>> {
    let mut out = Grid::filled(a.rows(), a.cols(), 0i64);
    for m in 0..a.rows() {
        for n in 0..a.cols() {
            out.set(m, n, op(a.get(m, n), b.get(m, n)).ok_or(Error::ValueOverflow)?);
        }
    }
    Ok(out)
}

fn map_exact(a: Grid<i64>, op: impl Fn(i64) -> Option<i64>) -> Result<Grid<i64>> {
    let mut out = Grid::filled(a.rows(), a.cols(), 0i64);
    for m in 0..a.rows() {
        for n in 0..a.cols() {
            out.set(m, n, op(a.get(m, n)).ok_or(Error::ValueOverflow)?);
        }
    }
    Ok(out)
}

fn zip_f64(a: Grid<f64>, b: Grid<f64>, op: impl Fn(f64, f64) -> f64) -> Grid<f64> {
    Grid::from_fn(a.rows(), a.cols(), |m, n| op(a.get(m, n), b.get(m, n)))
}

fn eval_closed(c: &ClosedForm, m: usize, n: usize) -> Result<Scalar> {
    let int = |v: i64| Ok(Scalar::Int(v));
    match c {
        ClosedForm::Boos => int(if m == 0 { n as i64 } else { 0 }),
        ClosedForm::Product => {
            (m as i64).checked_mul(n as i64).map(Scalar::Int).ok_or(Error::ValueOverflow)
        }
        ClosedForm::ProductShift => (m as i64 + 1)
            .checked_mul(n as i64 + 1)
            .map(Scalar::Int)
            .ok_or(Error::ValueOverflow),
        ClosedForm::RowIndex => int(m as i64),
        ClosedForm::ColIndex => int(n as i64),
        ClosedForm::Column0Indicator => int(if n == 0 { 1 } else { 0 }),
        ClosedForm::Constant(c) => Ok(*c),
        ClosedForm::Geometric { .. } | ClosedForm::InvPower { .. } => {
            Ok(Scalar::Float(closed_f64(c, m, n)))
        }
        ClosedForm::Unit { i0, j0 } => int(if m == *i0 && n == *j0 { 1 } else { 0 }),
        ClosedForm::Alternating => int(if (m + n) % 2 == 0 { 1 } else { -1 }),
    }
}

fn closed_f64(c: &ClosedForm, m: usize, n: usize) -> f64 {
    match c {
        ClosedForm::Boos => {
            if m == 0 {
                n as f64
            } else {
                0.0
            }
        }
        ClosedForm::Product => m as f64 * n as f64,
        ClosedForm::ProductShift => (m as f64 + 1.0) * (n as f64 + 1.0),
        ClosedForm::RowIndex => m as f64,
        ClosedForm::ColIndex => n as f64,
        ClosedForm::Column0Indicator => {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        }
        ClosedForm::Constant(c) => c.to_f64(),
        ClosedForm::Geometric { rho } => rho.powi((m + n).min(i32::MAX as usize) as i32),
        ClosedForm::Unit { i0, j0 } => {
            if m == *i0 && n == *j0 {
                1.0
            } else {
                0.0
            }
        }
        ClosedForm::InvPower { p, q } => {
            1.0 / ((m as f64 + 1.0).powf(*p) * (n as f64 + 1.0).powf(*q))
        }
        ClosedForm::Alternating => {
            if (m + n) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// Builds a catalog sequence by name.
///
/// `params` carries the closed-form parameters (e.g. `{"c": 2}` for
/// `constant`); pass `Value::Null` or an empty object when none are needed.
/// `table` is accepted as a catalog name and reads `values` / `default`.
pub fn catalog(name: &str, params: &serde_json::Value) -> Result<DoubleSequence> {
    let get = |key: &str| params.get(key).cloned().unwrap_or(serde_json::Value::Null);
    let num = |key: &str| -> Result<f64> {
        get(key)
            .as_f64()
            .ok_or_else(|| Error::InvalidSpec(format!("catalog `{name}` needs numeric `{key}`")))
    };
    let index = |key: &str| -> Result<usize> {
        get(key)
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| Error::InvalidSpec(format!("catalog `{name}` needs nonnegative `{key}`")))
    };
    match name {
        "boos" => Ok(DoubleSequence::boos()),
        "product" => Ok(DoubleSequence::product()),
        "product_shift" => Ok(DoubleSequence::product_shift()),
        "row_index" => Ok(DoubleSequence::row_index()),
        "col_index" => Ok(DoubleSequence::col_index()),
        "column0_indicator" => Ok(DoubleSequence::column0_indicator()),
        "alternating" => Ok(DoubleSequence::alternating()),
        "constant" => {
            let c = get("c");
            let scalar = if let Some(v) = c.as_i64() {
                Scalar::Int(v)
            } else if let Some(v) = c.as_f64() {
                Scalar::Float(v)
            } else {
                return Err(Error::InvalidSpec("catalog `constant` needs numeric `c`".into()));
            };
            Ok(DoubleSequence::constant(scalar))
        }
        "geometric" => DoubleSequence::geometric(num("rho")?),
        "unit" => Ok(DoubleSequence::unit(index("i0")?, index("j0")?)),
        "inv_power" => DoubleSequence::inv_power(num("p")?, num("q")?),
        "table" => {
            let values = get("values");
            let default = get("default").as_f64().unwrap_or(0.0);
            table_from_json(&values, default)
        }
        other => Err(Error::UnknownCatalogEntry(other.to_string())),
    }
}

/// Parses `[[...], ...]` into a table body, choosing the exact-integer path
/// when every value (and the default) is integral and exactly representable.
pub fn table_from_json(values: &serde_json::Value, default: f64) -> Result<DoubleSequence> {
    let rows = values
        .as_array()
        .ok_or_else(|| Error::InvalidSpec("table `values` must be an array of rows".into()))?;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::InvalidSpec("table rows must be arrays of numbers".into()))?;
        let mut vals = Vec::with_capacity(row.len());
        for v in row {
            vals.push(
                v.as_f64()
                    .ok_or_else(|| Error::InvalidSpec("table values must be numbers".into()))?,
            );
        }
        out.push(vals);
    }
    if out.is_empty() || out[0].is_empty() {
        return Err(Error::InvalidSpec("table `values` must be a nonempty rectangle".into()));
    }
    let as_exact_int = |v: f64| -> Option<i64> {
        const MAX_EXACT: f64 = 9.007_199_254_740_992e15; // 2^53
        if v.fract() == 0.0 && v.abs() <= MAX_EXACT {
            Some(v as i64)
        } else {
            None
        }
    };
    let all_int = out.iter().flatten().all(|&v| as_exact_int(v).is_some())
        && as_exact_int(default).is_some();
    if all_int {
        let rows = out
            .into_iter()
            .map(|r| r.into_iter().map(|v| as_exact_int(v).unwrap()).collect())
            .collect();
        DoubleSequence::from_int_rows(rows, as_exact_int(default).unwrap())
    } else {
        DoubleSequence::from_f64_rows(out, default)
    }
}

fn rect_grid<T: Copy>(rows: Vec<Vec<T>>) -> Result<Grid<T>> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::InvalidSpec("table must be a nonempty rectangle".into()));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidSpec("table rows must all have the same length".into()));
    }
    Ok(Grid::from_fn(rows.len(), cols, |m, n| rows[m][n]))
}
