//! Splitting a frame-clipped conic into monotonic segments.
//!
//! Breakpoints are the real extreme tangent points (where one gradient
//! component vanishes) and the intersections with the bounding frame. The
//! arcs between consecutive breakpoints are strictly monotone in both
//! coordinates; their endpoints are rounded to grid points and each arc is
//! annotated with its monotonic direction `(S_x, S_y)` and the orientation
//! booleans that drive the stepper.
//!
//! All work here is real-valued: endpoints are snapped to the grid
//! immediately, so closed-form quadratic solving with a Newton polish is
//! accurate enough.

use crate::conic::{Conic, HalfPoint};
use crate::error::{Error, Result};

/// Rectangular clipping frame in grid units.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Frame {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        if !(xmin < xmax && ymin < ymax) {
            return Err(Error::ArcNotFound(format!(
                "empty frame [{xmin},{ymin}]-[{xmax},{ymax}]"
            )));
        }
        Ok(Self {
            xmin,
            ymin,
            xmax,
            ymax,
        })
    }

    fn eps(&self) -> f64 {
        1e-7 * (1.0 + (self.xmax - self.xmin).max(self.ymax - self.ymin))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let e = self.eps();
        x >= self.xmin - e && x <= self.xmax + e && y >= self.ymin - e && y <= self.ymax + e
    }
}

/// A clipped, direction-annotated monotonic arc between rounded breakpoints.
#[derive(Debug, Clone)]
pub struct MonotonicSegment {
    /// Rounded grid start point (doubled coordinates, both even).
    pub start: HalfPoint,
    /// Rounded grid end point.
    pub end: HalfPoint,
    /// Real curve point the start was rounded from.
    pub start_real: (f64, f64),
    /// Real curve point the end was rounded from.
    pub end_real: (f64, f64),
    /// Monotonic x direction, ±1.
    pub s_x: i64,
    /// Monotonic y direction, ±1.
    pub s_y: i64,
    pub b_ccw: bool,
    pub b_left: bool,
    /// Segment constant `b_x ⊕ b_y ⊕ b_left`; orients every sign test.
    pub b_lxy: bool,
    /// Identifies the curve branch (hyperbolas have two).
    pub branch_id: i32,
    /// Parameter interval on the branch (for resampling the real arc).
    pub t_start: f64,
    pub t_end: f64,
}

impl MonotonicSegment {
    pub fn b_x(&self) -> bool {
        self.s_x > 0
    }

    pub fn b_y(&self) -> bool {
        self.s_y > 0
    }

    /// Grid steps along each axis: `(|Δu|/2, |Δv|/2)`.
    pub fn grid_span(&self) -> (i64, i64) {
        (
            ((self.end.u - self.start.u) / 2).abs(),
            ((self.end.v - self.start.v) / 2).abs(),
        )
    }

    /// Builds a segment directly from two real curve points, rounding them
    /// to the grid. The parameter interval is left unset.
    pub fn from_real_endpoints(
        conic: &Conic,
        start_real: (f64, f64),
        end_real: (f64, f64),
        ccw: bool,
    ) -> Result<Self> {
        let start = round_to_grid(start_real);
        let end = round_to_grid(end_real);
        let s_x = (end.u - start.u).signum();
        let s_y = (end.v - start.v).signum();
        if start == end || s_x == 0 || s_y == 0 {
            return Err(Error::ArcNotFound(
                "endpoints round to a degenerate segment".into(),
            ));
        }
        let b_left = conic.b_left(ccw);
        let b_lxy = (s_x > 0) ^ (s_y > 0) ^ b_left;
        Ok(Self {
            start,
            end,
            start_real,
            end_real,
            s_x,
            s_y,
            b_ccw: ccw,
            b_left,
            b_lxy,
            branch_id: 0,
            t_start: f64::NAN,
            t_end: f64::NAN,
        })
    }
}

/// Round-half-away-from-zero per coordinate onto the integer grid.
pub fn round_to_grid(p: (f64, f64)) -> HalfPoint {
    HalfPoint::from_grid(p.0.round() as i64, p.1.round() as i64)
}

// ---------------------------------------------------------------------------
// Parametrization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicShape {
    Ellipse,
    Hyperbola,
    Parabola,
}

/// Real parametrization of the conic, used to order breakpoints along each
/// branch and to resample arcs.
///
/// - Ellipse: angle about the center in the normalized eigenbasis.
/// - Hyperbola: hyperbolic parameter per branch (`branch_id` is ±1).
/// - Parabola: the eigen-coordinate along the non-degenerate axis.
#[derive(Debug, Clone)]
pub struct Parametrization {
    pub shape: ConicShape,
    center: (f64, f64),
    e1: (f64, f64),
    e2: (f64, f64),
    /// Scale along `e1` / `e2` (semi-axes for ellipses).
    sa: f64,
    sb: f64,
    /// Hyperbola: 0 when branches open along `e1`, 1 along `e2`.
    major: u8,
    /// Parabola: curve is `λ·ξ² + 2·i2·ξ + 2·j2·η + m = 0` in eigen coords.
    par: (f64, f64, f64, f64),
}

impl Parametrization {
    pub fn build(conic: &Conic) -> Result<Self> {
        let (a, b, d, i, j, m) = conic.coeffs_f();
        let dis = conic.dis();
        let det = conic.det();

        // Eigen decomposition of [[A, D], [D, B]] with a right-handed basis.
        let mean = (a + b) / 2.0;
        let rad = ((a - b) / 2.0).hypot(d);
        let (l1, l2) = (mean + rad, mean - rad);
        let e1 = if d.abs() > 1e-12 * (a.abs() + b.abs() + 1.0) {
            normalize((d, l1 - a))
        } else if a >= b {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let e2 = (-e1.1, e1.0);

        if dis == 0 {
            // Parabola: λ1 or λ2 is zero; the other equals A + B.
            let ln = a + b;
            let en = if d.abs() > 1e-12 * (a.abs() + b.abs() + 1.0) {
                normalize((d, ln - a))
            } else if a.abs() >= b.abs() {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            };
            let ep = (-en.1, en.0);
            let i2 = i * en.0 + j * en.1;
            let j2 = i * ep.0 + j * ep.1;
            debug_assert!(j2.abs() > 0.0, "degenerate parabola passed DET check");
            return Ok(Self {
                shape: ConicShape::Parabola,
                center: (0.0, 0.0),
                e1: en,
                e2: ep,
                sa: 0.0,
                sb: 0.0,
                major: 0,
                par: (ln, i2, j2, m),
            });
        }

        // Central conic: solve for the center and the centered constant.
        let disf = dis as f64;
        let center = ((d * j - b * i) / disf, (d * i - a * j) / disf);
        let k = -(det as f64) / disf;

        if dis > 0 {
            // Real ellipse iff A·DET < 0, exactly.
            if (conic.a() as i128) * det >= 0 {
                return Err(Error::NoRealLocus);
            }
            let sa = (k / l1).sqrt();
            let sb = (k / l2).sqrt();
            Ok(Self {
                shape: ConicShape::Ellipse,
                center,
                e1,
                e2,
                sa,
                sb,
                major: 0,
                par: (0.0, 0.0, 0.0, 0.0),
            })
        } else {
            // Hyperbola: λ1 > 0 > λ2. Branches open along the eigenvector
            // whose squared coordinate carries the sign of k.
            let (major, sa, sb) = if k > 0.0 {
                (0u8, (k / l1).sqrt(), (-k / l2).sqrt())
            } else {
                (1u8, (-k / l1).sqrt(), (k / l2).sqrt())
            };
            Ok(Self {
                shape: ConicShape::Hyperbola,
                center,
                e1,
                e2,
                sa,
                sb,
                major,
                par: (0.0, 0.0, 0.0, 0.0),
            })
        }
    }

    /// Curve point for a branch and parameter value.
    pub fn point(&self, branch: i32, t: f64) -> (f64, f64) {
        match self.shape {
            ConicShape::Ellipse => {
                let (xi, eta) = (self.sa * t.cos(), self.sb * t.sin());
                self.embed(xi, eta)
            }
            ConicShape::Hyperbola => {
                let s = branch as f64;
                let (xi, eta) = if self.major == 0 {
                    (s * self.sa * t.cosh(), self.sb * t.sinh())
                } else {
                    (self.sa * t.sinh(), s * self.sb * t.cosh())
                };
                self.embed(xi, eta)
            }
            ConicShape::Parabola => {
                let (ln, i2, j2, m) = self.par;
                let eta = -(ln * t * t + 2.0 * i2 * t + m) / (2.0 * j2);
                (
                    t * self.e1.0 + eta * self.e2.0,
                    t * self.e1.1 + eta * self.e2.1,
                )
            }
        }
    }

    /// Branch and parameter of a point on (or near) the curve.
    pub fn param(&self, p: (f64, f64)) -> (i32, f64) {
        match self.shape {
            ConicShape::Ellipse => {
                let (xi, eta) = self.local(p);
                (0, (eta / self.sb).atan2(xi / self.sa))
            }
            ConicShape::Hyperbola => {
                let (xi, eta) = self.local(p);
                if self.major == 0 {
                    (sign_of(xi), (eta / self.sb).asinh())
                } else {
                    (sign_of(eta), (xi / self.sa).asinh())
                }
            }
            ConicShape::Parabola => (0, p.0 * self.e1.0 + p.1 * self.e1.1),
        }
    }

    /// Velocity `dP/dt` along the branch.
    pub fn tangent(&self, branch: i32, t: f64) -> (f64, f64) {
        match self.shape {
            ConicShape::Ellipse => {
                let (dxi, deta) = (-self.sa * t.sin(), self.sb * t.cos());
                self.embed_vec(dxi, deta)
            }
            ConicShape::Hyperbola => {
                let s = branch as f64;
                let (dxi, deta) = if self.major == 0 {
                    (s * self.sa * t.sinh(), self.sb * t.cosh())
                } else {
                    (self.sa * t.cosh(), s * self.sb * t.sinh())
                };
                self.embed_vec(dxi, deta)
            }
            ConicShape::Parabola => {
                let (ln, i2, j2, _) = self.par;
                let deta = -(ln * t + i2) / j2;
                self.embed_vec(1.0, deta)
            }
        }
    }

    fn embed(&self, xi: f64, eta: f64) -> (f64, f64) {
        (
            self.center.0 + xi * self.e1.0 + eta * self.e2.0,
            self.center.1 + xi * self.e1.1 + eta * self.e2.1,
        )
    }

    fn embed_vec(&self, xi: f64, eta: f64) -> (f64, f64) {
        (
            xi * self.e1.0 + eta * self.e2.0,
            xi * self.e1.1 + eta * self.e2.1,
        )
    }

    fn local(&self, p: (f64, f64)) -> (f64, f64) {
        let (dx, dy) = (p.0 - self.center.0, p.1 - self.center.1);
        (
            dx * self.e1.0 + dy * self.e1.1,
            dx * self.e2.0 + dy * self.e2.1,
        )
    }

    /// Nearest curve point to `p` by dense parameter sampling plus
    /// golden-section refinement. Returns `(branch, t, distance)`.
    pub fn nearest(&self, p: (f64, f64)) -> (i32, f64, f64) {
        let mut best = (0, 0.0, f64::INFINITY);
        for &branch in self.branches() {
            let (lo, hi) = self.search_range(branch, p);
            let n = 4096;
            let mut best_t = lo;
            let mut best_d = f64::INFINITY;
            for k in 0..=n {
                let t = lo + (hi - lo) * k as f64 / n as f64;
                let q = self.point(branch, t);
                let d = dist2(q, p);
                if d < best_d {
                    best_d = d;
                    best_t = t;
                }
            }
            let span = (hi - lo) / n as f64;
            let (t, d) = golden_min(
                |t| dist2(self.point(branch, t), p),
                best_t - span,
                best_t + span,
                1e-12,
            );
            if d < best.2 {
                best = (branch, t, d);
            }
        }
        (best.0, best.1, best.2.sqrt())
    }

    fn branches(&self) -> &'static [i32] {
        match self.shape {
            ConicShape::Hyperbola => &[-1, 1],
            _ => &[0],
        }
    }

    fn search_range(&self, _branch: i32, p: (f64, f64)) -> (f64, f64) {
        match self.shape {
            ConicShape::Ellipse => (-std::f64::consts::PI, std::f64::consts::PI),
            ConicShape::Hyperbola => {
                let r = (p.0 - self.center.0).hypot(p.1 - self.center.1);
                let minor = if self.major == 0 { self.sb } else { self.sa };
                let t = ((r + 10.0) / minor.max(1e-9)).asinh() + 1.0;
                (-t, t)
            }
            ConicShape::Parabola => {
                let (_, t0) = self.param(p);
                let r = p.0.hypot(p.1) + 10.0;
                let (ln, _, j2, _) = self.par;
                let reach = (2.0 * r * (j2 / ln).abs()).sqrt() + r + 10.0;
                (t0 - reach, t0 + reach)
            }
        }
        .clamp_range()
    }
}

trait ClampRange {
    fn clamp_range(self) -> (f64, f64);
}

impl ClampRange for (f64, f64) {
    fn clamp_range(self) -> (f64, f64) {
        debug_assert!(self.0 < self.1);
        self
    }
}

fn sign_of(x: f64) -> i32 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

fn normalize(v: (f64, f64)) -> (f64, f64) {
    let n = v.0.hypot(v.1);
    (v.0 / n, v.1 / n)
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    dx * dx + dy * dy
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - PHI * (b - a);
    let mut d = a + PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + a.abs() + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + PHI * (b - a);
            fd = f(d);
        }
    }
    let t = (a + b) / 2.0;
    (t, f(t))
}

// ---------------------------------------------------------------------------
// Breakpoints
// ---------------------------------------------------------------------------

/// Real roots of `q2·x² + q1·x + q0 = 0`, ascending, with a Newton polish.
fn solve_quadratic(q2: f64, q1: f64, q0: f64) -> Vec<f64> {
    let polish = |x: f64| {
        let mut x = x;
        for _ in 0..2 {
            let f = (q2 * x + q1) * x + q0;
            let df = 2.0 * q2 * x + q1;
            if df.abs() > 0.0 {
                x -= f / df;
            }
        }
        x
    };
    if q2 == 0.0 {
        if q1 == 0.0 {
            return vec![];
        }
        return vec![-q0 / q1];
    }
    let disc = q1 * q1 - 4.0 * q2 * q0;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    let q = -(q1 + q1.signum() * sq) / 2.0;
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / q2, q0 / q)
    };
    let mut roots = vec![polish(r1), polish(r2)];
    roots.sort_by(f64::total_cmp);
    if (roots[1] - roots[0]).abs() < 1e-12 * (1.0 + roots[0].abs()) {
        roots.pop();
    }
    roots
}

/// All real extreme tangent points: solutions of `{X = 0, F = 0}` and
/// `{Y = 0, F = 0}`. At most four points.
pub fn extreme_points(conic: &Conic) -> Result<Vec<(f64, f64)>> {
    if conic.dis() > 0 && (conic.a() as i128) * conic.det() >= 0 {
        return Err(Error::NoRealLocus);
    }
    let (a, b, d, i, j, m) = conic.coeffs_f();
    let dis = conic.dis() as f64;
    let mut pts: Vec<(f64, f64)> = Vec::new();

    // {X = 0, F = 0}: eliminate x when A ≠ 0; otherwise the system has no
    // isolated solutions on a non-degenerate conic.
    if a != 0.0 {
        for y in solve_quadratic(dis, 2.0 * (a * j - d * i), a * m - i * i) {
            let x = -(d * y + i) / a;
            pts.push((x, y));
        }
    }
    // {Y = 0, F = 0}.
    if b != 0.0 {
        for x in solve_quadratic(dis, 2.0 * (b * i - d * j), b * m - j * j) {
            let y = -(d * x + j) / b;
            pts.push((x, y));
        }
    }
    dedupe_points(&mut pts, 1e-9);
    Ok(pts)
}

/// Intersections of the conic with the four frame edges, deduplicated.
pub fn frame_intersections(conic: &Conic, frame: &Frame) -> Vec<(f64, f64)> {
    let (a, b, d, i, j, m) = conic.coeffs_f();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let eps = frame.eps();

    for x in [frame.xmin, frame.xmax] {
        for y in solve_quadratic(b, 2.0 * (d * x + j), a * x * x + 2.0 * i * x + m) {
            if y >= frame.ymin - eps && y <= frame.ymax + eps {
                pts.push((x, y));
            }
        }
    }
    for y in [frame.ymin, frame.ymax] {
        for x in solve_quadratic(a, 2.0 * (d * y + i), b * y * y + 2.0 * j * y + m) {
            if x >= frame.xmin - eps && x <= frame.xmax + eps {
                pts.push((x, y));
            }
        }
    }
    dedupe_points(&mut pts, 1e-9);
    pts
}

fn dedupe_points(pts: &mut Vec<(f64, f64)>, tol: f64) {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter() {
        if !out
            .iter()
            .any(|&q| dist2(p, q).sqrt() < tol * (1.0 + p.0.abs() + p.1.abs()))
        {
            out.push(p);
        }
    }
    *pts = out;
}

// ---------------------------------------------------------------------------
// Arc assembly
// ---------------------------------------------------------------------------

/// A real (unrounded) monotonic arc in traversal order; `t0 → t1` follows
/// the traversal direction, so `t0 > t1` on descending runs.
#[derive(Debug, Clone, Copy)]
struct RealArc {
    branch: i32,
    t0: f64,
    t1: f64,
}

const BREAKPOINT_MERGE_TOL: f64 = 1e-7;

/// Ordered real arcs of the clipped curve in traversal order.
fn real_arcs(
    conic: &Conic,
    frame: &Frame,
    ccw: bool,
    param: &Parametrization,
) -> Result<Vec<RealArc>> {
    let mut breaks: Vec<(i32, f64)> = Vec::new();
    let mut push = |p: (f64, f64)| {
        let (br, t) = param.param(p);
        breaks.push((br, t));
    };
    for p in extreme_points(conic)? {
        push(p);
    }
    for p in frame_intersections(conic, frame) {
        push(p);
    }

    let s_left = if conic.b_left(ccw) { 1.0 } else { -1.0 };
    let mut arcs: Vec<RealArc> = Vec::new();

    for &branch in param.branches() {
        let mut ts: Vec<f64> = breaks
            .iter()
            .filter(|(br, _)| *br == branch)
            .map(|&(_, t)| t)
            .collect();
        ts.sort_by(f64::total_cmp);
        // Merge parameter values that map to (numerically) the same point.
        let mut merged: Vec<f64> = Vec::new();
        for t in ts {
            if let Some(&last) = merged.last() {
                let d = dist2(param.point(branch, last), param.point(branch, t)).sqrt();
                if d < BREAKPOINT_MERGE_TOL {
                    continue;
                }
            }
            merged.push(t);
        }
        if param.shape == ConicShape::Ellipse {
            // Cyclic: the seam pair (last, first + 2π) may also coincide.
            if merged.len() >= 2 {
                let first = merged[0];
                let last = *merged.last().unwrap();
                let d = dist2(param.point(branch, first), param.point(branch, last)).sqrt();
                if d < BREAKPOINT_MERGE_TOL {
                    merged.pop();
                }
            }
        }
        if merged.len() < 2 {
            continue;
        }

        // Candidate arcs between consecutive breakpoints (cyclic wrap for
        // the ellipse), filtered by whether the arc midpoint is in frame.
        let n = merged.len();
        let pair_count = if param.shape == ConicShape::Ellipse {
            n
        } else {
            n - 1
        };
        let mut kept: Vec<(f64, f64)> = Vec::new();
        for idx in 0..pair_count {
            let t0 = merged[idx];
            let t1 = if idx + 1 < n {
                merged[idx + 1]
            } else {
                merged[0] + std::f64::consts::TAU
            };
            let tm = (t0 + t1) / 2.0;
            let pm = param.point(branch, tm);
            if frame.contains(pm.0, pm.1) {
                kept.push((t0, t1));
            }
        }
        if kept.is_empty() {
            continue;
        }

        // Traversal direction: the directed tangent is s_left·(−Y, X); the
        // parameter ascends when the velocity agrees with it.
        let (t0, t1) = kept[0];
        let tm = (t0 + t1) / 2.0;
        let pm = param.point(branch, tm);
        let (gx, gy) = conic.grad_f(pm.0, pm.1);
        let dir = (s_left * -gy, s_left * gx);
        let vel = param.tangent(branch, tm);
        let ascending = dir.0 * vel.0 + dir.1 * vel.1 > 0.0;

        if ascending {
            arcs.extend(kept.iter().map(|&(t0, t1)| RealArc { branch, t0, t1 }));
        } else {
            arcs.extend(kept.iter().rev().map(|&(t0, t1)| RealArc {
                branch,
                t0: t1,
                t1: t0,
            }));
        }
    }

    if arcs.is_empty() {
        return Err(Error::EmptyAfterClipping);
    }
    Ok(arcs)
}

fn emit_segments(
    conic: &Conic,
    ccw: bool,
    param: &Parametrization,
    arcs: &[RealArc],
) -> Vec<MonotonicSegment> {
    let b_left = conic.b_left(ccw);
    let mut out = Vec::new();
    for arc in arcs {
        let p0 = param.point(arc.branch, arc.t0);
        let p1 = param.point(arc.branch, arc.t1);
        let start = round_to_grid(p0);
        let end = round_to_grid(p1);
        let s_x = (end.u - start.u).signum();
        let s_y = (end.v - start.v).signum();
        if start == end || s_x == 0 || s_y == 0 {
            continue;
        }
        // Rounding must not contradict the real arc direction.
        let rdx = p1.0 - p0.0;
        let rdy = p1.1 - p0.1;
        if rdx * s_x as f64 <= 0.0 || rdy * s_y as f64 <= 0.0 {
            continue;
        }
        let b_lxy = (s_x > 0) ^ (s_y > 0) ^ b_left;
        out.push(MonotonicSegment {
            start,
            end,
            start_real: p0,
            end_real: p1,
            s_x,
            s_y,
            b_ccw: ccw,
            b_left,
            b_lxy,
            branch_id: arc.branch,
            t_start: arc.t0,
            t_end: arc.t1,
        });
    }
    out
}

/// Splits the frame-clipped conic into monotonic segments in traversal
/// order (counterclockwise or clockwise).
pub fn build_segments(conic: &Conic, frame: &Frame, ccw: bool) -> Result<Vec<MonotonicSegment>> {
    let param = Parametrization::build(conic)?;
    let arcs = real_arcs(conic, frame, ccw, &param)?;
    let segs = emit_segments(conic, ccw, &param, &arcs);
    if segs.is_empty() {
        return Err(Error::EmptyAfterClipping);
    }
    Ok(segs)
}

/// Like [`build_segments`], restricted to the arc that runs from the curve
/// point nearest `arc_start` to the one nearest `arc_end`, following the
/// requested orientation.
pub fn build_segments_arc(
    conic: &Conic,
    frame: &Frame,
    ccw: bool,
    arc_start: (f64, f64),
    arc_end: (f64, f64),
) -> Result<Vec<MonotonicSegment>> {
    let param = Parametrization::build(conic)?;
    let arcs = real_arcs(conic, frame, ccw, &param)?;

    let (br_s, t_s, _) = param.nearest(arc_start);
    let (br_e, t_e, _) = param.nearest(arc_end);
    if br_s != br_e {
        return Err(Error::ArcNotFound(
            "arc endpoints lie on different branches".into(),
        ));
    }

    let cyclic = param.shape == ConicShape::Ellipse;
    let idx_s = locate_arc(&arcs, br_s, t_s, cyclic)
        .ok_or_else(|| Error::ArcNotFound("arc start is outside the clipped curve".into()))?;
    let idx_e = locate_arc(&arcs, br_e, t_e, cyclic)
        .ok_or_else(|| Error::ArcNotFound("arc end is outside the clipped curve".into()))?;

    let (t_s, t_e) = (
        normalize_into(&arcs[idx_s], t_s, cyclic),
        normalize_into(&arcs[idx_e], t_e, cyclic),
    );

    let mut picked: Vec<RealArc> = Vec::new();
    if idx_s == idx_e && in_order(&arcs[idx_s], t_s, t_e) {
        let mut a = arcs[idx_s];
        a.t0 = t_s;
        a.t1 = t_e;
        picked.push(a);
    } else {
        let n = arcs.len();
        let mut idx = idx_s;
        let mut first = arcs[idx];
        first.t0 = t_s;
        picked.push(first);
        loop {
            let next = if cyclic { (idx + 1) % n } else { idx + 1 };
            if !cyclic && next >= n {
                return Err(Error::ArcNotFound(
                    "arc end precedes arc start under this orientation".into(),
                ));
            }
            if cyclic && next == idx_s && idx_e != idx_s {
                return Err(Error::ArcNotFound(
                    "arc crosses a clipped-out region of the curve".into(),
                ));
            }
            // Contiguity: the next kept arc must start where this one ended.
            let prev = picked.last().unwrap();
            let a = arcs[next];
            if a.branch != prev.branch
                || dist2(
                    param.point(prev.branch, prev.t1),
                    param.point(a.branch, a.t0),
                )
                .sqrt()
                    > BREAKPOINT_MERGE_TOL * 10.0
            {
                return Err(Error::ArcNotFound(
                    "arc crosses a clipped-out region of the curve".into(),
                ));
            }
            if next == idx_e {
                let mut last = a;
                last.t1 = normalize_into(&a, t_e, cyclic);
                picked.push(last);
                break;
            }
            picked.push(a);
            idx = next;
        }
    }

    let segs = emit_segments(conic, ccw, &param, &picked);
    if segs.is_empty() {
        return Err(Error::EmptyAfterClipping);
    }
    Ok(segs)
}

fn arc_lo_hi(a: &RealArc) -> (f64, f64) {
    if a.t0 <= a.t1 {
        (a.t0, a.t1)
    } else {
        (a.t1, a.t0)
    }
}

fn in_order(a: &RealArc, ta: f64, tb: f64) -> bool {
    if a.t0 <= a.t1 {
        ta <= tb
    } else {
        ta >= tb
    }
}

fn normalize_into(a: &RealArc, t: f64, cyclic: bool) -> f64 {
    if !cyclic {
        return t;
    }
    let (lo, hi) = arc_lo_hi(a);
    let mut t = t;
    while t < lo - 1e-12 {
        t += std::f64::consts::TAU;
    }
    while t > hi + 1e-12 {
        t -= std::f64::consts::TAU;
    }
    t
}

fn locate_arc(arcs: &[RealArc], branch: i32, t: f64, cyclic: bool) -> Option<usize> {
    let tol = 1e-9;
    for (i, a) in arcs.iter().enumerate() {
        if a.branch != branch {
            continue;
        }
        let (lo, hi) = arc_lo_hi(a);
        let tt = normalize_into(a, t, cyclic);
        if tt >= lo - tol && tt <= hi + tol {
            return Some(i);
        }
    }
    None
}

/// Distance from a point to the full curve, via the parametrization.
pub fn curve_distance(conic: &Conic, p: (f64, f64)) -> Result<f64> {
    let param = Parametrization::build(conic)?;
    Ok(param.nearest(p).2)
}

/// Optimal grid start: among the grid points surrounding `real_start`,
/// the one with minimal true distance to the curve. Ties break to the
/// lexicographically smallest `(u, v)`.
pub fn snap_start(conic: &Conic, real_start: (f64, f64)) -> Result<HalfPoint> {
    let param = Parametrization::build(conic)?;
    let on_axis = |c: f64| (c - c.round()).abs() < 1e-9;
    let xs: Vec<i64> = if on_axis(real_start.0) {
        vec![real_start.0.round() as i64]
    } else {
        vec![real_start.0.floor() as i64, real_start.0.floor() as i64 + 1]
    };
    let ys: Vec<i64> = if on_axis(real_start.1) {
        vec![real_start.1.round() as i64]
    } else {
        vec![real_start.1.floor() as i64, real_start.1.floor() as i64 + 1]
    };
    let mut best: Option<(f64, HalfPoint)> = None;
    for &x in &xs {
        for &y in &ys {
            let p = HalfPoint::from_grid(x, y);
            let d = param.nearest((x as f64, y as f64)).2;
            best = Some(match best {
                None => (d, p),
                Some((bd, bp)) => {
                    if d < bd - 1e-12 * (1.0 + bd) {
                        (d, p)
                    } else if (d - bd).abs() <= 1e-12 * (1.0 + bd) && (p.u, p.v) < (bp.u, bp.v) {
                        (bd, p)
                    } else {
                        (bd, bp)
                    }
                }
            });
        }
    }
    Ok(best.expect("at least one candidate").1)
}
