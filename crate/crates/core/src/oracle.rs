//! Independent numerical ground truth for verification.
//!
//! Nothing in here feeds the stepper; the flow is strictly one-way. The
//! footpoint search samples the monotonic arc along its dominant axis and
//! solves the conic for the other coordinate, so its route to a distance is
//! disjoint from both the integer measurement path and the parametrization
//! used during segmentation. On top of it sit the pole construction that
//! relates measurement signs to true squared-distance differences, the
//! inaccuracy classifier, an exhaustive dynamic program over all monotone
//! lattice paths, and a midpoint-versus-two-point comparison run.

use crate::conic::{Conic, HalfPoint};
use crate::engine::{self, Criterion, Mode};
use crate::error::{Error, Result};
use crate::segmentation::MonotonicSegment;

/// Nearest point of the segment's real arc, with its distance and gradient.
#[derive(Debug, Clone, Copy)]
pub struct Footpoint {
    pub q: (f64, f64),
    pub rho: f64,
    pub grad_q: (f64, f64),
    /// True when the minimum sits on a segment endpoint rather than in the
    /// arc interior.
    pub clamped: bool,
}

const FOOTPOINT_SAMPLES: usize = 10_000;

/// Distance from `p` to the real arc of `seg`, by dense sampling along the
/// dominant axis with branch-continuous solving for the other coordinate,
/// then golden-section refinement.
pub fn footpoint(conic: &Conic, p: (f64, f64), seg: &MonotonicSegment) -> Result<Footpoint> {
    let (x0, y0) = seg.start_real;
    let (x1, y1) = seg.end_real;
    let x_dominant = (x1 - x0).abs() >= (y1 - y0).abs();

    // Work in (w, other) coordinates, w being the dominant axis.
    let (w0, w1, o0, o1) = if x_dominant {
        (x0, x1, y0, y1)
    } else {
        (y0, y1, x0, x1)
    };
    if !(w0.is_finite() && w1.is_finite()) || w0 == w1 {
        return Err(Error::NoRealArc);
    }
    let odir = (o1 - o0).signum();

    let pw = if x_dominant { p.0 } else { p.1 };
    let po = if x_dominant { p.1 } else { p.0 };

    let n = FOOTPOINT_SAMPLES;
    let mut prev_o = o0;
    let mut best = (f64::INFINITY, w0, o0, 0usize);
    for k in 0..=n {
        let w = w0 + (w1 - w0) * k as f64 / n as f64;
        let Some(o) = other_coordinate(conic, x_dominant, w, prev_o, odir) else {
            continue;
        };
        prev_o = o;
        let d2 = (w - pw).powi(2) + (o - po).powi(2);
        if d2 < best.0 {
            best = (d2, w, o, k);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::NoRealArc);
    }

    // Refine inside the bracketing interval, keeping branch continuity from
    // the best sample's other-coordinate.
    let step = (w1 - w0) / n as f64;
    let (_, bw, bo, bk) = best;
    let lo = if bk == 0 { bw } else { bw - step };
    let hi = if bk == n { bw } else { bw + step };
    let dist2_at = |w: f64| -> f64 {
        match other_coordinate(conic, x_dominant, w, bo, odir) {
            Some(o) => (w - pw).powi(2) + (o - po).powi(2),
            None => f64::INFINITY,
        }
    };
    let (mut w_star, _) = if lo < hi {
        crate::segmentation::golden_min(dist2_at, lo.min(hi), lo.max(hi), 1e-10)
    } else {
        (bw, best.0)
    };

    // Clamp to the arc range, then decide between the interior minimum and
    // the endpoints by comparing actual distances: near a flat basin the
    // refined parameter alone cannot tell an endpoint minimum apart.
    let (wmin, wmax) = if w0 < w1 { (w0, w1) } else { (w1, w0) };
    w_star = w_star.clamp(wmin, wmax);
    let o_star = other_coordinate(conic, x_dominant, w_star, bo, odir).ok_or(Error::NoRealArc)?;
    let q_star = if x_dominant {
        (w_star, o_star)
    } else {
        (o_star, w_star)
    };
    let d_star = (q_star.0 - p.0).powi(2) + (q_star.1 - p.1).powi(2);
    let d_s = (seg.start_real.0 - p.0).powi(2) + (seg.start_real.1 - p.1).powi(2);
    let d_e = (seg.end_real.0 - p.0).powi(2) + (seg.end_real.1 - p.1).powi(2);
    let tol = 1e-12 * (1.0 + d_star);
    let (qx, qy, clamped) = if d_s <= d_star + tol && d_s <= d_e {
        (seg.start_real.0, seg.start_real.1, true)
    } else if d_e <= d_star + tol {
        (seg.end_real.0, seg.end_real.1, true)
    } else {
        (q_star.0, q_star.1, false)
    };

    let rho = (qx - p.0).hypot(qy - p.1);
    Ok(Footpoint {
        q: (qx, qy),
        rho,
        grad_q: conic.grad_f(qx, qy),
        clamped,
    })
}

/// Solves the conic for the non-dominant coordinate at `w`, choosing the
/// root nearest `near` (branch continuity). Exact ties, which occur when
/// the arc starts on a symmetry axis, resolve in the arc's monotone travel
/// direction `dir`. Slightly negative discriminants from on-curve roundoff
/// are clamped to zero.
fn other_coordinate(conic: &Conic, x_dominant: bool, w: f64, near: f64, dir: f64) -> Option<f64> {
    let (a, b, d, i, j, m) = conic.coeffs_f();
    // For dominant x: B·y² + 2(Dx + J)·y + (Ax² + 2Ix + M) = 0, and the
    // symmetric form for dominant y.
    let (q2, q1, q0) = if x_dominant {
        (b, 2.0 * (d * w + j), a * w * w + 2.0 * i * w + m)
    } else {
        (a, 2.0 * (d * w + i), b * w * w + 2.0 * j * w + m)
    };
    if q2 == 0.0 {
        if q1 == 0.0 {
            return None;
        }
        return Some(-q0 / q1);
    }
    let mut disc = q1 * q1 - 4.0 * q2 * q0;
    let scale = q1 * q1 + (4.0 * q2 * q0).abs() + 1e-30;
    if disc < 0.0 {
        if disc > -1e-9 * scale {
            disc = 0.0;
        } else {
            return None;
        }
    }
    let sq = disc.sqrt();
    let q = -(q1 + q1.signum() * sq) / 2.0;
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / q2, q0 / q)
    };
    let (d1, d2) = ((r1 - near).abs(), (r2 - near).abs());
    let tol = 1e-12 * (1.0 + near.abs() + r1.abs() + r2.abs());
    if (d1 - d2).abs() <= tol {
        // The monotone arc only ever advances toward its end.
        if (r1 - near) * dir >= (r2 - near) * dir {
            Some(r1)
        } else {
            Some(r2)
        }
    } else if d1 < d2 {
        Some(r1)
    } else {
        Some(r2)
    }
}

/// Pole of the line `l1·x + l2·y + l3 = 0` with respect to the conic:
/// the point whose polar is that line.
pub fn pole_of_line(conic: &Conic, l: (f64, f64, f64)) -> Result<(f64, f64)> {
    let (a, b, d, i, j, m) = conic.coeffs_f();
    // Solve [A D −l1; D B −l2; I J −l3]·(x, y, s)ᵀ = (−I, −J, −M)ᵀ.
    let mat = [[a, d, -l.0], [d, b, -l.1], [i, j, -l.2]];
    let rhs = [-i, -j, -m];
    let det3 = det3x3(&mat);
    let scale = row_norm(&mat[0]) * row_norm(&mat[1]) * row_norm(&mat[2]);
    if det3.abs() <= 1e-12 * (scale + 1e-300) {
        return Err(Error::PoleAtInfinity);
    }
    let x = det3x3(&[
        [rhs[0], mat[0][1], mat[0][2]],
        [rhs[1], mat[1][1], mat[1][2]],
        [rhs[2], mat[2][1], mat[2][2]],
    ]) / det3;
    let y = det3x3(&[
        [mat[0][0], rhs[0], mat[0][2]],
        [mat[1][0], rhs[1], mat[1][2]],
        [mat[2][0], rhs[2], mat[2][2]],
    ]) / det3;
    Ok((x, y))
}

fn det3x3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn row_norm(r: &[f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

/// The relative-curve-measurement identity evaluated on one candidate pair:
/// `ρ_C² − ρ_B² = (2/G_E²)·(1 − ε_E)·τ_E·F_M·(P_C − P_B)·G_E`.
#[derive(Debug, Clone, Copy)]
pub struct TheoremReport {
    /// Pole of the line through the pair midpoint parallel to the footpoint
    /// chord.
    pub p_e: (f64, f64),
    pub eps_e: f64,
    pub tau_e: f64,
    /// True squared-distance difference `ρ_C² − ρ_B²`.
    pub lhs: f64,
    /// Identity right-hand side.
    pub rhs: f64,
    /// Validity of the pair's midpoint measurement.
    pub valid: bool,
    /// `τ_E > 0`: the measurement sign is trustworthy.
    pub accurate: bool,
}

/// Builds the pole for the candidate pair `(p_b, p_c)` and evaluates both
/// sides of the relative curve measurement.
///
/// Requires both footpoints to fall in the arc interior.
pub fn construct_pole_e(
    conic: &Conic,
    p_b: HalfPoint,
    p_c: HalfPoint,
    seg: &MonotonicSegment,
) -> Result<TheoremReport> {
    let fb = footpoint(conic, p_b.to_real(), seg)?;
    let fc = footpoint(conic, p_c.to_real(), seg)?;
    if fb.clamped || fc.clamped {
        return Err(Error::ClampedFootpoint);
    }
    let mid = p_b.midpoint(&p_c);
    let (mx, my) = mid.to_real();

    // The pole is pinned by two conditions. It lies on the polar of the
    // footpoint midpoint, so that the projected sum (ρ_C + ρ_B)·G_E
    // telescopes to twice the pair-midpoint polar value. And its gradient
    // is parallel to ρ_C + ρ_B = 2(P_M − P_FM), which makes the two
    // distance vectors project equally onto the pole's polar direction and
    // kills the cross term of the squared-distance expansion. Both are
    // linear in the pole, a single 3×3 solve.
    let (fmx, fmy) = ((fb.q.0 + fc.q.0) / 2.0, (fb.q.1 + fc.q.1) / 2.0);
    let mut w_dir = (mx - fmx, my - fmy);
    if w_dir.0.hypot(w_dir.1) < 1e-12 * (1.0 + mx.abs() + my.abs()) {
        // Pair midpoint coincides with the footpoint midpoint: both sides
        // of the identity vanish and any gradient direction along the
        // curve normal serves; use the normal at the common footpoint.
        w_dir = fb.grad_q;
    }
    let (a, b, d, i, j, _) = conic.coeffs_f();
    let g_fm = conic.grad_f(fmx, fmy);
    let w_fm = conic.w_f(fmx, fmy);
    // Rows: G(E) − µ·w_dir = −(I, J); E·G_FM + W_FM = 0.
    let mat = [[a, d, -w_dir.0], [d, b, -w_dir.1], [g_fm.0, g_fm.1, 0.0]];
    let rhs3 = [-i, -j, -w_fm];
    let det3 = det3x3(&mat);
    let scale = row_norm(&mat[0]) * row_norm(&mat[1]) * row_norm(&mat[2]);
    if det3.abs() <= 1e-12 * (scale + 1e-300) {
        return Err(Error::PoleAtInfinity);
    }
    let p_e = (
        det3x3(&[
            [rhs3[0], mat[0][1], mat[0][2]],
            [rhs3[1], mat[1][1], mat[1][2]],
            [rhs3[2], mat[2][1], mat[2][2]],
        ]) / det3,
        det3x3(&[
            [mat[0][0], rhs3[0], mat[0][2]],
            [mat[1][0], rhs3[1], mat[1][2]],
            [mat[2][0], rhs3[2], mat[2][2]],
        ]) / det3,
    );

    let g_e = conic.grad_f(p_e.0, p_e.1);
    let g_e2 = g_e.0 * g_e.0 + g_e.1 * g_e.1;
    let (bx, by) = p_b.to_real();
    let (cx, cy) = p_c.to_real();
    let cb_dot_ge = (cx - bx) * g_e.0 + (cy - by) * g_e.1;
    let chord_dot_ge = (fc.q.0 - fb.q.0) * g_e.0 + (fc.q.1 - fb.q.1) * g_e.1;
    let eps_e = chord_dot_ge / cb_dot_ge;

    // τ_E·F_M = P_E·G_M + W_M; keep the product form for the identity and
    // report the quotient separately.
    let g_m = conic.grad_f(mx, my);
    let w_m = conic.w_f(mx, my);
    let f_m = conic.eval_f(mx, my);
    let tau_f = p_e.0 * g_m.0 + p_e.1 * g_m.1 + w_m;
    let tau_e = tau_f / f_m;

    let lhs = fc.rho * fc.rho - fb.rho * fb.rho;
    let rhs = 2.0 / g_e2 * (1.0 - eps_e) * tau_f * cb_dot_ge;

    let g_mid4 = conic.gradient4(mid)?;
    let valid = engine::primary_valid(g_mid4.gx, g_mid4.gy, seg);

    Ok(TheoremReport {
        p_e,
        eps_e,
        tau_e,
        lhs,
        rhs,
        valid,
        accurate: tau_e > 0.0,
    })
}

/// Accuracy class of a measurement midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OoaClass {
    /// Measurement sign matches the true relative curve distance.
    Accurate,
    /// Midpoint lies inside the conic on the pole side of the contact
    /// chord: the measurement sign is inverted.
    Ooa,
    /// Midpoint lies on the contact chord.
    Boundary,
}

/// Classifies the midpoint `m` of the pair `(p_b, p_c)` against the contact
/// chord of the constructed pole: inaccurate iff `m` is inside the conic on
/// the pole's side of the chord.
pub fn classify_ooa(
    conic: &Conic,
    m: HalfPoint,
    p_b: HalfPoint,
    p_c: HalfPoint,
    seg: &MonotonicSegment,
) -> Result<OoaClass> {
    let report = construct_pole_e(conic, p_b, p_c, seg)?;
    let p_e = report.p_e;
    let g_e = conic.grad_f(p_e.0, p_e.1);
    let w_e = conic.w_f(p_e.0, p_e.1);
    let f_e = conic.eval_f(p_e.0, p_e.1);

    let (mx, my) = m.to_real();
    let side_m = mx * g_e.0 + my * g_e.1 + w_e;
    let scale = g_e.0.hypot(g_e.1) * (1.0 + mx.abs() + my.abs()) + 1e-300;
    if side_m.abs() <= 1e-9 * scale {
        return Ok(OoaClass::Boundary);
    }
    let same_side_as_pole = (side_m > 0.0) == (f_e > 0.0);
    let inside = conic.inside(m)?;
    Ok(if inside && same_side_as_pole {
        OoaClass::Ooa
    } else {
        OoaClass::Accurate
    })
}

/// Two tangency points and the chord control factor `λ = −F(chord
/// midpoint)` of a pole's contact chord.
pub type ContactChord = ((f64, f64), (f64, f64), f64);

/// Contact chord data for a pole: the two tangency points, their midpoint,
/// and the chord control factor `λ = −F(chord midpoint)`.
pub fn contact_chord(conic: &Conic, p_e: (f64, f64)) -> Result<ContactChord> {
    let g_e = conic.grad_f(p_e.0, p_e.1);
    let w_e = conic.w_f(p_e.0, p_e.1);
    // Intersect the polar of the pole with the conic.
    let (pa, pb) = intersect_line(conic, (g_e.0, g_e.1, w_e))?;
    let mid = ((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0);
    let lambda = -conic.eval_f(mid.0, mid.1);
    Ok((pa, pb, lambda))
}

/// Both intersection points of the line `l1·x + l2·y + l3 = 0` with the
/// conic.
fn intersect_line(conic: &Conic, l: (f64, f64, f64)) -> Result<((f64, f64), (f64, f64))> {
    let (a, b, d, i, j, m) = conic.coeffs_f();
    let (l1, l2, l3) = l;
    if l1.abs() >= l2.abs() {
        // x = −(l3 + l2·y)/l1.
        let q2 = a * l2 * l2 - 2.0 * d * l2 * l1 + b * l1 * l1;
        let q1 = 2.0 * (a * l3 * l2 - d * l1 * l3 - i * l1 * l2 + j * l1 * l1);
        let q0 = a * l3 * l3 - 2.0 * i * l1 * l3 + m * l1 * l1;
        let ys = real_roots(q2, q1, q0).ok_or(Error::NoRealArc)?;
        let x_of = |y: f64| -(l3 + l2 * y) / l1;
        Ok(((x_of(ys.0), ys.0), (x_of(ys.1), ys.1)))
    } else {
        let q2 = b * l1 * l1 - 2.0 * d * l1 * l2 + a * l2 * l2;
        let q1 = 2.0 * (b * l3 * l1 - d * l2 * l3 - j * l2 * l1 + i * l2 * l2);
        let q0 = b * l3 * l3 - 2.0 * j * l2 * l3 + m * l2 * l2;
        let xs = real_roots(q2, q1, q0).ok_or(Error::NoRealArc)?;
        let y_of = |x: f64| -(l3 + l1 * x) / l2;
        Ok(((xs.0, y_of(xs.0)), (xs.1, y_of(xs.1))))
    }
}

fn real_roots(q2: f64, q1: f64, q0: f64) -> Option<(f64, f64)> {
    if q2 == 0.0 {
        if q1 == 0.0 {
            return None;
        }
        let r = -q0 / q1;
        return Some((r, r));
    }
    let disc = q1 * q1 - 4.0 * q2 * q0;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -(q1 + q1.signum() * sq) / 2.0;
    if q == 0.0 {
        return Some((0.0, 0.0));
    }
    Some((q / q2, q0 / q))
}

/// Exhaustive dynamic program over all monotone 4-/8-connected lattice
/// paths of the segment, minimizing the sum of squared footpoint distances.
#[derive(Debug, Clone)]
pub struct DpResult {
    pub min_cost: f64,
    pub path: Vec<HalfPoint>,
}

pub const DP_SPAN_LIMIT: i64 = 32;

pub fn dp_digitize(conic: &Conic, seg: &MonotonicSegment, mode: Mode) -> Result<DpResult> {
    let (m, n) = seg.grid_span();
    if m > DP_SPAN_LIMIT || n > DP_SPAN_LIMIT {
        return Err(Error::SpanTooLarge(DP_SPAN_LIMIT));
    }
    let (m, n) = (m as usize, n as usize);

    let point_at = |i: usize, j: usize| -> HalfPoint {
        seg.start
            .offset(2 * seg.s_x * i as i64, 2 * seg.s_y * j as i64)
    };
    let mut cost = vec![vec![0.0f64; n + 1]; m + 1];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let p = point_at(i, j).to_real();
            *c = footpoint(conic, p, seg)?.rho.powi(2);
        }
    }

    // Predecessor encoding: 0 none, 1 diagonal, 2 x-move, 3 y-move. Ties
    // prefer the diagonal, then the x-move.
    let mut dp = vec![vec![f64::INFINITY; n + 1]; m + 1];
    let mut pred = vec![vec![0u8; n + 1]; m + 1];
    dp[0][0] = cost[0][0];
    for i in 0..=m {
        for j in 0..=n {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut from = 0u8;
            if mode == Mode::Eight && i > 0 && j > 0 && dp[i - 1][j - 1] < best {
                best = dp[i - 1][j - 1];
                from = 1;
            }
            if i > 0 && dp[i - 1][j] < best {
                best = dp[i - 1][j];
                from = 2;
            }
            if j > 0 && dp[i][j - 1] < best {
                best = dp[i][j - 1];
                from = 3;
            }
            dp[i][j] = best + cost[i][j];
            pred[i][j] = from;
        }
    }

    let mut path = Vec::new();
    let (mut i, mut j) = (m, n);
    loop {
        path.push(point_at(i, j));
        match pred[i][j] {
            0 => break,
            1 => {
                i -= 1;
                j -= 1;
            }
            2 => i -= 1,
            3 => j -= 1,
            _ => unreachable!(),
        }
    }
    path.reverse();
    Ok(DpResult {
        min_cost: dp[m][n],
        path,
    })
}

/// Sum of squared footpoint distances over a path, accumulated in path
/// order (matches the dynamic program's own accumulation order).
pub fn path_cost(conic: &Conic, seg: &MonotonicSegment, path: &[HalfPoint]) -> Result<f64> {
    let mut sum = 0.0;
    for p in path {
        sum += footpoint(conic, p.to_real(), seg)?.rho.powi(2);
    }
    Ok(sum)
}

/// Head-to-head run of the midpoint criterion against the two-point
/// (arithmetic-mean) criterion on the 4-connected stepper.
#[derive(Debug, Clone)]
pub struct TwoPointReport {
    pub midpoint_cost: f64,
    pub two_point_cost: f64,
    /// Steps of the midpoint run where the two decision signs disagree.
    pub criterion_disagreements: u64,
    pub midpoint_points: Vec<HalfPoint>,
    pub two_point_points: Vec<HalfPoint>,
}

pub fn two_point_compare(conic: &Conic, seg: &MonotonicSegment) -> Result<TwoPointReport> {
    let mid = engine::run_segment_with(conic, seg, Mode::Four, Criterion::Midpoint)?;
    let two = engine::run_segment_with(conic, seg, Mode::Four, Criterion::ArithmeticMean)?;
    Ok(TwoPointReport {
        midpoint_cost: path_cost(conic, seg, &mid.points)?,
        two_point_cost: path_cost(conic, seg, &two.points)?,
        criterion_disagreements: mid.stats.potential_ooa,
        midpoint_points: mid.points,
        two_point_points: two.points,
    })
}
