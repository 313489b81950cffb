//! Dense rectangular storage for window materializations.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A dense `rows x cols` array in row-major order. Index `(m, n)` is row `m`,
/// column `n`, matching the `(m, n)` orientation of double sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Grid<T> {
        Grid { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Grid<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for m in 0..rows {
            for n in 0..cols {
                data.push(f(m, n));
            }
        }
        Grid { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> T {
        debug_assert!(m < self.rows && n < self.cols);
        self.data[m * self.cols + n]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, value: T) {
        debug_assert!(m < self.rows && n < self.cols);
        self.data[m * self.cols + n] = value;
    }

    pub fn row(&self, m: usize) -> &[T] {
        &self.data[m * self.cols..(m + 1) * self.cols]
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.data.iter().copied()
    }

    /// Bottom-right entry; the limit estimate of the certifiers.
    pub fn corner(&self) -> T {
        self.data[self.data.len() - 1]
    }

    pub fn to_nested(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|m| self.row(m).to_vec()).collect()
    }
}

/// A materialized window on one of the two numeric paths.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Int(Grid<i64>),
    Float(Grid<f64>),
}

impl Table {
    pub fn rows(&self) -> usize {
        match self {
            Table::Int(g) => g.rows(),
            Table::Float(g) => g.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Table::Int(g) => g.cols(),
            Table::Float(g) => g.cols(),
        }
    }

    pub fn get(&self, m: usize, n: usize) -> Scalar {
        match self {
            Table::Int(g) => Scalar::Int(g.get(m, n)),
            Table::Float(g) => Scalar::Float(g.get(m, n)),
        }
    }

    /// Converts to the float path (exact for every `i64` this crate produces
    /// from bounded windows; documented lossy beyond 2^53).
    pub fn to_f64(&self) -> Grid<f64> {
        match self {
            Table::Int(g) => Grid::from_fn(g.rows(), g.cols(), |m, n| g.get(m, n) as f64),
            Table::Float(g) => g.clone(),
        }
    }

    pub fn to_nested_f64(&self) -> Vec<Vec<f64>> {
        self.to_f64().to_nested()
    }
}

/// Guard for materialization requests.
pub fn check_cells(rows: usize, cols: usize, cap: u64) -> Result<()> {
    let cells = rows as u64 * cols as u64;
    if cells > cap {
        return Err(Error::WindowTooLarge { cells, cap });
    }
    Ok(())
}
