//! Exact conic algebra on the half-integer grid.
//!
//! A conic is the integer coefficient matrix `[[A, D, I], [D, B, J], [I, J, M]]`
//! of the quadratic form
//!
//! ```text
//! F(x, y) = A·x² + B·y² + 2D·x·y + 2I·x + 2J·y + M
//! ```
//!
//! Points are stored in doubled coordinates ([`HalfPoint`]), so grid points
//! and cell midpoints are both exact integers and every midpoint residue is
//! the exact integer `4·F`. The gradient convention is the matrix one:
//! `(X, Y) = (A·x + D·y + I, D·x + B·y + J)`, i.e. half the analytic
//! partial derivatives of `F`.

use num::{BigInt, BigRational};

use crate::error::{Error, Result};

/// Boolean of a signed quantity: `true` iff strictly positive.
///
/// Zero maps to `false` everywhere; sign tests that need a different zero
/// rule say so explicitly.
#[inline]
pub fn bpos(x: i128) -> bool {
    x > 0
}

/// A lattice point in doubled coordinates: `(u, v) = (2x, 2y)` in grid units.
///
/// Grid points have both `u` and `v` even; cell midpoints have at least one
/// odd coordinate. The round trip to real coordinates `(u/2, v/2)` is lossless.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfPoint {
    pub u: i64,
    pub v: i64,
}

impl HalfPoint {
    pub const fn new(u: i64, v: i64) -> Self {
        Self { u, v }
    }

    /// Point at integer grid coordinates `(x, y)`.
    pub const fn from_grid(x: i64, y: i64) -> Self {
        Self { u: 2 * x, v: 2 * y }
    }

    /// True when both coordinates land on the integer grid.
    pub const fn is_grid(&self) -> bool {
        self.u % 2 == 0 && self.v % 2 == 0
    }

    /// Grid coordinates; panics when the point is not a grid point.
    pub fn grid(&self) -> (i64, i64) {
        debug_assert!(self.is_grid());
        (self.u / 2, self.v / 2)
    }

    /// Real coordinates `(u/2, v/2)` in grid units.
    pub fn to_real(&self) -> (f64, f64) {
        (self.u as f64 / 2.0, self.v as f64 / 2.0)
    }

    pub const fn offset(&self, du: i64, dv: i64) -> Self {
        Self {
            u: self.u + du,
            v: self.v + dv,
        }
    }

    /// Midpoint of two half-points whose coordinate sums are even.
    pub fn midpoint(&self, other: &Self) -> Self {
        debug_assert!((self.u + other.u) % 2 == 0 && (self.v + other.v) % 2 == 0);
        Self {
            u: (self.u + other.u) / 2,
            v: (self.v + other.v) / 2,
        }
    }
}

impl std::fmt::Display for HalfPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_grid() {
            write!(f, "({}, {})", self.u / 2, self.v / 2)
        } else {
            write!(f, "({}/2, {}/2)", self.u, self.v)
        }
    }
}

/// Gradient and affine term of `F` at a point, in doubled units:
/// `(gx, gy, gw) = (2X, 2Y, 2W)` with `W = I·x + J·y + M`.
///
/// The defining identity, exact in integers, is
/// `4·F(P) = u·gx + v·gy + 2·gw`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gradient4 {
    pub gx: i128,
    pub gy: i128,
    pub gw: i128,
}

impl Gradient4 {
    /// Evaluates `4·(P·G + W)` at half-point `p`, exactly.
    pub fn eval4(&self, p: HalfPoint) -> Result<i128> {
        let u = p.u as i128;
        let v = p.v as i128;
        (|| {
            let a = u.checked_mul(self.gx)?;
            let b = v.checked_mul(self.gy)?;
            let c = self.gw.checked_mul(2)?;
            a.checked_add(b)?.checked_add(c)
        })()
        .ok_or(Error::Overflow)
    }

    /// Squared gradient magnitude in doubled units: `gx² + gy² = 4·G²`.
    pub fn norm4(&self) -> Result<i128> {
        (|| {
            let a = self.gx.checked_mul(self.gx)?;
            let b = self.gy.checked_mul(self.gy)?;
            a.checked_add(b)
        })()
        .ok_or(Error::Overflow)
    }
}

/// The polar line of a pole with respect to a conic: `{P : P·G + W = 0}`,
/// stored in the same doubled units as [`Gradient4`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarLine {
    pub gx: i128,
    pub gy: i128,
    pub gw: i128,
}

impl PolarLine {
    /// Evaluates `4·(P·G + W)` at half-point `p`; zero iff `p` lies on the line.
    pub fn eval4(&self, p: HalfPoint) -> Result<i128> {
        Gradient4 {
            gx: self.gx,
            gy: self.gy,
            gw: self.gw,
        }
        .eval4(p)
    }
}

/// Exact signed distance data from a point to a polar line.
///
/// `factor` is the scalar `(P·G + W)/G²`; the directed distance vector is
/// `factor·G` and `dist_sq` is its exact squared length.
#[derive(Debug, Clone)]
pub struct PolarDistance {
    pub factor: BigRational,
    pub dist_sq: BigRational,
}

fn big(x: i128) -> BigInt {
    BigInt::from(x)
}

fn ratio(n: i128, d: i128) -> BigRational {
    BigRational::new(big(n), big(d))
}

/// A non-degenerate conic with exact integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conic {
    a: i64,
    b: i64,
    d: i64,
    i: i64,
    j: i64,
    m: i64,
}

impl Conic {
    /// Builds a conic from matrix-convention coefficients `(A, B, D, I, J, M)`.
    ///
    /// Rejects degenerate conics (`DET == 0`).
    pub fn new(a: i64, b: i64, d: i64, i: i64, j: i64, m: i64) -> Result<Self> {
        let c = Self { a, b, d, i, j, m };
        if c.det() == 0 {
            return Err(Error::DegenerateConic);
        }
        Ok(c)
    }

    pub fn coeffs(&self) -> (i64, i64, i64, i64, i64, i64) {
        (self.a, self.b, self.d, self.i, self.j, self.m)
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn d(&self) -> i64 {
        self.d
    }
    pub fn i(&self) -> i64 {
        self.i
    }
    pub fn j(&self) -> i64 {
        self.j
    }
    pub fn m(&self) -> i64 {
        self.m
    }

    /// Determinant of the 3×3 coefficient matrix, exact.
    pub fn det(&self) -> i128 {
        let (a, b, d, i, j, m) = self.coeffs128();
        a * (b * m - j * j) - d * (d * m - i * j) + i * (d * j - i * b)
    }

    /// Discriminant `DIS = A·B − D²`, exact. Positive for ellipses,
    /// negative for hyperbolas, zero for parabolas.
    pub fn dis(&self) -> i128 {
        let (a, b, d, ..) = self.coeffs128();
        a * b - d * d
    }

    /// `(DET, DIS)` in one call.
    pub fn det_dis(&self) -> (i128, i128) {
        (self.det(), self.dis())
    }

    /// Boolean of the determinant sign.
    pub fn b_det(&self) -> bool {
        bpos(self.det())
    }

    fn coeffs128(&self) -> (i128, i128, i128, i128, i128, i128) {
        (
            self.a as i128,
            self.b as i128,
            self.d as i128,
            self.i as i128,
            self.j as i128,
            self.m as i128,
        )
    }

    /// Exact residue `4·F` at a half-point.
    ///
    /// The factor 4 comes from the doubled coordinates: with `u = 2x`,
    /// `4F = A·u² + B·v² + 2D·u·v + 4I·u + 4J·v + 4M`. Overflow is detected,
    /// never wrapped.
    pub fn residue4(&self, p: HalfPoint) -> Result<i128> {
        let (a, b, d, i, j, m) = self.coeffs128();
        let u = p.u as i128;
        let v = p.v as i128;
        (|| {
            let mut acc = a.checked_mul(u.checked_mul(u)?)?;
            acc = acc.checked_add(b.checked_mul(v.checked_mul(v)?)?)?;
            acc = acc.checked_add((2 * d).checked_mul(u.checked_mul(v)?)?)?;
            acc = acc.checked_add((4 * i).checked_mul(u)?)?;
            acc = acc.checked_add((4 * j).checked_mul(v)?)?;
            acc.checked_add(4 * m)
        })()
        .ok_or(Error::Overflow)
    }

    /// Exact gradient at a half-point, in doubled units.
    pub fn gradient4(&self, p: HalfPoint) -> Result<Gradient4> {
        let (a, b, d, i, j, m) = self.coeffs128();
        let u = p.u as i128;
        let v = p.v as i128;
        (|| {
            let gx = a
                .checked_mul(u)?
                .checked_add(d.checked_mul(v)?)?
                .checked_add(2 * i)?;
            let gy = d
                .checked_mul(u)?
                .checked_add(b.checked_mul(v)?)?
                .checked_add(2 * j)?;
            let gw = i
                .checked_mul(u)?
                .checked_add(j.checked_mul(v)?)?
                .checked_add(2 * m)?;
            Some(Gradient4 { gx, gy, gw })
        })()
        .ok_or(Error::Overflow)
    }

    /// The polar line of `pole`: `{P : P·G_pole + W_pole = 0}`.
    ///
    /// Errors with [`Error::CenterHasNoPolar`] when the pole is the conic's
    /// center (zero gradient).
    pub fn polar_line(&self, pole: HalfPoint) -> Result<PolarLine> {
        let g = self.gradient4(pole)?;
        if g.gx == 0 && g.gy == 0 {
            return Err(Error::CenterHasNoPolar);
        }
        Ok(PolarLine {
            gx: g.gx,
            gy: g.gy,
            gw: g.gw,
        })
    }

    /// Exact signed distance data from `p` to the polar of `pole`.
    ///
    /// Returns the scalar `(P·G + W)/G²` and the exact squared distance,
    /// both as rationals, so squared distances compare with zero tolerance.
    pub fn signed_distance_to_polar(&self, p: HalfPoint, pole: HalfPoint) -> Result<PolarDistance> {
        let line = self.polar_line(pole)?;
        let e4 = line.eval4(p)?;
        let g4 = Gradient4 {
            gx: line.gx,
            gy: line.gy,
            gw: line.gw,
        }
        .norm4()?;
        // (P·G + W)/G² = (e4/4) / (g4/4) = e4/g4; squared distance = e4²/(4·g4).
        let factor = ratio(e4, g4);
        let dist_sq = BigRational::new(big(e4) * big(e4), big(4) * big(g4));
        Ok(PolarDistance { factor, dist_sq })
    }

    /// Control factor of the arithmetic-mean relation for a monotonic
    /// direction: `λ = (A + B − 2·S_x·S_y·D)/4` in grid units (Δ = 1).
    ///
    /// Returns `(λ, Λ)` with `Λ = A + B − 2·S_x·S_y·D` the integer whose sign
    /// drives the out-of-control fallback rule.
    pub fn lambda_m(&self, s_x: i64, s_y: i64) -> (BigRational, i128) {
        debug_assert!(s_x == 1 || s_x == -1);
        debug_assert!(s_y == 1 || s_y == -1);
        let (a, b, d, ..) = self.coeffs128();
        let cap = a + b - 2 * (s_x as i128) * (s_y as i128) * d;
        (ratio(cap, 4), cap)
    }

    /// Algebraic inside test: `inside = !(b_F ⊕ b_DET)`, with points exactly
    /// on the curve (`F = 0`) counting as not inside.
    pub fn inside(&self, p: HalfPoint) -> Result<bool> {
        let r4 = self.residue4(p)?;
        if r4 == 0 {
            return Ok(false);
        }
        Ok(!(bpos(r4) ^ self.b_det()))
    }

    /// Orientation constant: `b_LEFT = b_CCW ⊕ b_DET`; true when `F < 0`
    /// lies to the left of the traversal direction.
    pub fn b_left(&self, ccw: bool) -> bool {
        ccw ^ self.b_det()
    }

    /// Signed radius of curvature `|G|³/DET` at a real point, using the
    /// half-gradient convention. Meaningful only on the curve; used for the
    /// grid-sampling advisory check.
    pub fn radius_of_curvature(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = self.grad_f(x, y);
        let g = gx.hypot(gy);
        g * g * g / self.det() as f64
    }

    /// Floating-point residue `F(x, y)` in grid units.
    pub fn eval_f(&self, x: f64, y: f64) -> f64 {
        let (a, b, d, i, j, m) = self.coeffs_f();
        a * x * x + b * y * y + 2.0 * d * x * y + 2.0 * i * x + 2.0 * j * y + m
    }

    /// Floating-point half-gradient `(X, Y)` at a real point.
    pub fn grad_f(&self, x: f64, y: f64) -> (f64, f64) {
        let (a, b, d, i, j, _) = self.coeffs_f();
        (a * x + d * y + i, d * x + b * y + j)
    }

    /// Floating-point affine term `W = I·x + J·y + M`.
    pub fn w_f(&self, x: f64, y: f64) -> f64 {
        let (_, _, _, i, j, m) = self.coeffs_f();
        i * x + j * y + m
    }

    pub fn coeffs_f(&self) -> (f64, f64, f64, f64, f64, f64) {
        (
            self.a as f64,
            self.b as f64,
            self.d as f64,
            self.i as f64,
            self.j as f64,
            self.m as f64,
        )
    }
}
