//! The square-shell bijection `phi` between 1-based index pairs and the
//! positive integers, and the flattening isomorphism it induces on double
//! sequences.
//!
//! The enumeration walks square shells: shell `s` holds the pairs with
//! `max(m, n) = s`, entered at `(1, s)`, down the column to the diagonal
//! `(s, s)`, then along the row back to `(s, 1)`. That pattern yields closed
//! forms (`phi(n, 1) = n^2` sits at each shell's end), which the tests check
//! against direct shell enumeration before anything trusts them.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seq::DoubleSequence;

/// Position of the 1-based pair `(m, n)` in the shell enumeration.
///
/// `phi(m, n) = (n-1)^2 + m` on and above the diagonal (`n >= m`), and
/// `m^2 - n + 1` below it.
pub fn phi(m: u64, n: u64) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(Error::IndexOutOfDomain(format!(
            "phi needs 1-based indices, got ({m}, {n})"
        )));
    }
    let wide = if n >= m {
        (n as u128 - 1) * (n as u128 - 1) + m as u128
    } else {
        (m as u128) * (m as u128) - n as u128 + 1
    };
    u64::try_from(wide).map_err(|_| Error::ValueOverflow)
}

/// The unique pair with `phi(m, n) = i`, via the shell index `s = ceil(sqrt i)`.
pub fn phi_inv(i: u64) -> Result<(u64, u64)> {
    if i == 0 {
        return Err(Error::IndexOutOfDomain("phi_inv needs a positive index, got 0".into()));
    }
    // Smallest s with s^2 >= i.
    let s = ((i - 1).isqrt()) + 1;
    let offset = i - (s - 1) * (s - 1);
    if offset <= s {
        Ok((offset, s))
    } else {
        Ok((s, 2 * s - offset))
    }
}

/// The first `count` entries of the flattened sequence `z_i = x_{phi_inv(i)}`,
/// with the 1-based pair shifted onto the sequence's 0-based grid.
pub fn flatten(x: &DoubleSequence, count: usize) -> Result<Vec<Scalar>> {
    let mut out = Vec::with_capacity(count);
    for i in 1..=count as u64 {
        let (m, n) = phi_inv(i)?;
        out.push(x.eval(m as i64 - 1, n as i64 - 1)?);
    }
    Ok(out)
}
