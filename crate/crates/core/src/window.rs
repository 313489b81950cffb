//! Finite index windows and the growing schedules the certifiers walk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The inclusive index rectangle `[0..m_max] x [0..n_max]`. Always nonempty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub m_max: usize,
    pub n_max: usize,
}

impl Window {
    pub fn new(m_max: usize, n_max: usize) -> Window {
        Window { m_max, n_max }
    }

    /// Square window of the given side (side 8 covers indices 0..=7).
    pub fn square(side: usize) -> Window {
        assert!(side >= 1, "a window must contain at least one cell");
        Window { m_max: side - 1, n_max: side - 1 }
    }

    /// Window spanning `rows x cols` cells.
    pub fn from_sides(rows: usize, cols: usize) -> Result<Window> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidSpec("window sides must be at least 1".into()));
        }
        Ok(Window { m_max: rows - 1, n_max: cols - 1 })
    }

    pub fn rows(&self) -> usize {
        self.m_max + 1
    }

    pub fn cols(&self) -> usize {
        self.n_max + 1
    }

    pub fn cells(&self) -> u64 {
        self.rows() as u64 * self.cols() as u64
    }

    pub fn contains(&self, m: usize, n: usize) -> bool {
        m <= self.m_max && n <= self.n_max
    }

    /// Strict containment in both coordinates.
    pub fn strictly_contains(&self, other: Window) -> bool {
        self.m_max > other.m_max && self.n_max > other.n_max
    }
}

/// A strictly increasing list of at least three windows. Certifier verdicts
/// read the last entries, so growth must be strict in both coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSchedule(Vec<Window>);

impl WindowSchedule {
    pub fn new(windows: Vec<Window>) -> Result<WindowSchedule> {
        if windows.len() < 3 {
            return Err(Error::InvalidSchedule(format!(
                "need at least 3 windows, got {}",
                windows.len()
            )));
        }
        for pair in windows.windows(2) {
            if !pair[1].strictly_contains(pair[0]) {
                return Err(Error::InvalidSchedule(format!(
                    "window {:?} does not strictly contain its predecessor {:?}",
                    pair[1], pair[0]
                )));
            }
        }
        Ok(WindowSchedule(windows))
    }

    /// Square windows from a list of sides, e.g. `[8, 16, 32]`.
    pub fn squares(sides: &[usize]) -> Result<WindowSchedule> {
        if sides.iter().any(|&s| s == 0) {
            return Err(Error::InvalidSchedule("window sides must be positive".into()));
        }
        WindowSchedule::new(sides.iter().map(|&s| Window::square(s)).collect())
    }

    /// The default schedule: squares of side `2^t` for `t = 3..=10`.
    pub fn default_squares() -> WindowSchedule {
        WindowSchedule::squares(&[8, 16, 32, 64, 128, 256, 512, 1024])
            .expect("default schedule is valid")
    }

    pub fn windows(&self) -> &[Window] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn largest(&self) -> Window {
        *self.0.last().expect("schedules are nonempty")
    }
}
