//! 4-connected register-machine digitizer used as a comparison baseline.
//!
//! The machine keeps three integer registers: the residue of the conic at
//! the midpoint of the two candidate moves (`q`), the amount that residue
//! drops on an x-move (`r`), and the amount it grows on a y-move (`s`).
//! Each step inspects the sign of `q` and updates the registers by constant
//! second differences. It is exactly the plain 4-connected midpoint
//! criterion with no validity gating and no fallback, which is what makes
//! it a useful head-to-head baseline: its unguarded sign decisions go out
//! of accuracy where the gated stepper does not.
//!
//! Registers are maintained in quarter-residue units internally and emitted
//! in the conventional trace units (residue at half-integer midpoints).
//! Conics whose midpoint residues are not integral in those units are
//! scaled by 2 or 4 first; the `scale` field reports the factor.

use crate::conic::{Conic, HalfPoint};
use crate::error::{Error, Result};
use crate::segmentation::MonotonicSegment;

/// Direction and orientation of one monotonic quadrant walk.
#[derive(Debug, Clone, Copy)]
pub struct TQuadrant {
    pub s_x: i64,
    pub s_y: i64,
    pub b_lxy: bool,
}

impl TQuadrant {
    pub fn from_segment(seg: &MonotonicSegment) -> Self {
        Self {
            s_x: seg.s_x,
            s_y: seg.s_y,
            b_lxy: seg.b_lxy,
        }
    }
}

/// One row of the register trace: position and the `q`, `r`, `s` registers
/// after the move that produced the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TRow {
    pub x: i64,
    pub y: i64,
    pub q: i128,
    pub r: i128,
    pub s: i128,
}

#[derive(Debug, Clone)]
pub struct TRun {
    pub points: Vec<(i64, i64)>,
    pub rows: Vec<TRow>,
    /// Factor the conic was multiplied by to keep the registers integral.
    pub scale: i64,
}

/// Register state in quarter-residue units.
#[derive(Debug, Clone, Copy)]
pub struct TState {
    pub x: i64,
    pub y: i64,
    pub q4: i128,
    pub r4: i128,
    pub s4: i128,
}

/// Runs the register machine for `steps` moves from `start`.
///
/// The decision is the plain midpoint sign: move in y when the midpoint
/// residue is negative (for `b_lxy = 0`; the orientation bit flips the
/// association). Register updates are pure integer second differences.
pub fn run_t(conic: &Conic, start: (i64, i64), quad: TQuadrant, steps: usize) -> Result<TRun> {
    debug_assert!(quad.s_x.abs() == 1 && quad.s_y.abs() == 1);

    // Midpoint residues 4F at odd-odd half-points are ≡ A+B+2D (mod 4);
    // scale the conic so the emitted registers (4F)/4 are exact integers.
    let (a0, b0, d0, i0, j0, m0) = conic.coeffs();
    let rem = (a0 + b0 + 2 * d0).rem_euclid(4);
    let scale: i64 = match rem {
        0 => 1,
        2 => 2,
        _ => 4,
    };
    let c = Conic::new(
        a0 * scale,
        b0 * scale,
        d0 * scale,
        i0 * scale,
        j0 * scale,
        m0 * scale,
    )?;

    let (sx, sy) = (quad.s_x, quad.s_y);
    let (a, b, d) = (c.a() as i128, c.b() as i128, c.d() as i128);
    let (mut x, mut y) = start;

    let mid = |x: i64, y: i64| HalfPoint::new(2 * x + sx, 2 * y + sy);
    let r4_at = |x: i64, y: i64| c.residue4(mid(x, y));

    let q4 = r4_at(x, y)?;
    let r4 = q4
        .checked_sub(c.residue4(mid(x, y).offset(2 * sx, 0))?)
        .ok_or(Error::Overflow)?;
    let s4 = c
        .residue4(mid(x, y).offset(0, 2 * sy))?
        .checked_sub(q4)
        .ok_or(Error::Overflow)?;
    let mut st = TState { x, y, q4, r4, s4 };

    let cross = 8 * d * sx as i128 * sy as i128;
    let row_of = |st: &TState| TRow {
        x: st.x,
        y: st.y,
        q: st.q4 / 4,
        r: st.r4 / 4,
        s: st.s4 / 4,
    };
    debug_assert!(st.q4 % 4 == 0 && st.r4 % 4 == 0 && st.s4 % 4 == 0);

    let mut rows = vec![row_of(&st)];
    let mut points = vec![(x, y)];

    for _ in 0..steps {
        let y_move = (st.q4 < 0) ^ quad.b_lxy;
        if y_move {
            y += sy;
            st.q4 = st.q4.checked_add(st.s4).ok_or(Error::Overflow)?;
            st.s4 = st.s4.checked_add(8 * b).ok_or(Error::Overflow)?;
            st.r4 = st.r4.checked_sub(cross).ok_or(Error::Overflow)?;
        } else {
            x += sx;
            st.q4 = st.q4.checked_sub(st.r4).ok_or(Error::Overflow)?;
            st.r4 = st.r4.checked_sub(8 * a).ok_or(Error::Overflow)?;
            st.s4 = st.s4.checked_add(cross).ok_or(Error::Overflow)?;
        }
        st.x = x;
        st.y = y;
        debug_assert_eq!(st.q4, r4_at(x, y)?, "register update diverged");
        rows.push(row_of(&st));
        points.push((x, y));
    }

    Ok(TRun {
        points,
        rows,
        scale,
    })
}
