//! Python bindings: exposes the exact conic algebra, the digitizer and the
//! register-machine baseline to Python.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use conic_raster::engine::{self, Mode};
use conic_raster::error::Error;
use conic_raster::job;
use conic_raster::knuth_t::{self, TQuadrant};
use conic_raster::segmentation::{self, Frame};
use conic_raster::HalfPoint;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } | Error::DegenerateConic | Error::NoRealLocus => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn mode_from(eight: bool) -> Mode {
    if eight {
        Mode::Eight
    } else {
        Mode::Four
    }
}

/// A non-degenerate conic `A·x² + B·y² + 2D·x·y + 2I·x + 2J·y + M = 0`
/// with exact integer coefficients.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Conic {
    inner: conic_raster::Conic,
}

#[pymethods]
impl Conic {
    #[new]
    fn new(a: i64, b: i64, d: i64, i: i64, j: i64, m: i64) -> PyResult<Self> {
        Ok(Self {
            inner: conic_raster::Conic::new(a, b, d, i, j, m).map_err(to_py_err)?,
        })
    }

    /// Exact residue `4·F` at doubled coordinates `(u, v) = (2x, 2y)`.
    fn residue4(&self, u: i64, v: i64) -> PyResult<i128> {
        self.inner.residue4(HalfPoint::new(u, v)).map_err(to_py_err)
    }

    /// Exact doubled gradient `(2X, 2Y, 2W)` at doubled coordinates.
    fn gradient4(&self, u: i64, v: i64) -> PyResult<(i128, i128, i128)> {
        let g = self
            .inner
            .gradient4(HalfPoint::new(u, v))
            .map_err(to_py_err)?;
        Ok((g.gx, g.gy, g.gw))
    }

    fn det(&self) -> i128 {
        self.inner.det()
    }

    fn dis(&self) -> i128 {
        self.inner.dis()
    }

    /// Inside test at doubled coordinates; points on the curve are outside.
    fn inside(&self, u: i64, v: i64) -> PyResult<bool> {
        self.inner.inside(HalfPoint::new(u, v)).map_err(to_py_err)
    }

    /// Floating-point residue at real coordinates.
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.inner.eval_f(x, y)
    }

    /// Floating-point half-gradient `(X, Y)` at real coordinates.
    fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        self.inner.grad_f(x, y)
    }

    /// Signed radius of curvature at an on-curve point.
    fn radius_of_curvature(&self, x: f64, y: f64) -> f64 {
        self.inner.radius_of_curvature(x, y)
    }

    fn __repr__(&self) -> String {
        let (a, b, d, i, j, m) = self.inner.coeffs();
        format!("Conic(a={a}, b={b}, d={d}, i={i}, j={j}, m={m})")
    }
}

/// Digitizes the conic clipped to `frame = (xmin, ymin, xmax, ymax)` in
/// grid units. Returns one list of `(x, y)` grid points per monotonic
/// segment, in traversal order.
#[pyfunction]
#[pyo3(signature = (conic, frame, ccw=true, eight=true))]
fn digitize(
    conic: &Conic,
    frame: (f64, f64, f64, f64),
    ccw: bool,
    eight: bool,
) -> PyResult<Vec<Vec<(i64, i64)>>> {
    let frame = Frame::new(frame.0, frame.1, frame.2, frame.3).map_err(to_py_err)?;
    let segs = segmentation::build_segments(&conic.inner, &frame, ccw).map_err(to_py_err)?;
    run_all(&conic.inner, &segs, mode_from(eight))
}

/// Digitizes only the arc between the curve points nearest `start` and
/// `end`, following the requested orientation.
#[pyfunction]
#[pyo3(signature = (conic, frame, start, end, ccw=true, eight=true))]
fn digitize_arc(
    conic: &Conic,
    frame: (f64, f64, f64, f64),
    start: (f64, f64),
    end: (f64, f64),
    ccw: bool,
    eight: bool,
) -> PyResult<Vec<Vec<(i64, i64)>>> {
    let frame = Frame::new(frame.0, frame.1, frame.2, frame.3).map_err(to_py_err)?;
    let segs = segmentation::build_segments_arc(&conic.inner, &frame, ccw, start, end)
        .map_err(to_py_err)?;
    run_all(&conic.inner, &segs, mode_from(eight))
}

fn run_all(
    conic: &conic_raster::Conic,
    segs: &[segmentation::MonotonicSegment],
    mode: Mode,
) -> PyResult<Vec<Vec<(i64, i64)>>> {
    segs.iter()
        .map(|seg| {
            let run = engine::run_segment(conic, seg, mode).map_err(to_py_err)?;
            Ok(run.points.iter().map(|p| p.grid()).collect())
        })
        .collect()
}

/// One register-trace row: `(x, y, q, r, s)`.
type TraceRow = (i64, i64, i128, i128, i128);

/// Runs the 4-connected register machine for `steps` moves and returns the
/// trace rows `(x, y, q, r, s)`.
#[pyfunction]
fn knuth_table(
    conic: &Conic,
    start: (i64, i64),
    s_x: i64,
    s_y: i64,
    b_lxy: bool,
    steps: usize,
) -> PyResult<Vec<TraceRow>> {
    let quad = TQuadrant { s_x, s_y, b_lxy };
    let run = knuth_t::run_t(&conic.inner, start, quad, steps).map_err(to_py_err)?;
    Ok(run.rows.iter().map(|r| (r.x, r.y, r.q, r.r, r.s)).collect())
}

/// Parses and runs a job description text; returns the report block as a
/// string (the same text the command-line tool prints).
#[pyfunction]
fn run_job(text: &str) -> PyResult<String> {
    let jb = job::parse_job(text).map_err(to_py_err)?;
    let report = job::run_job(&jb, &job::RunOptions::default()).map_err(to_py_err)?;
    Ok(report.to_string())
}

#[pymodule]
fn conic_raster_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Conic>()?;
    m.add_function(wrap_pyfunction!(digitize, m)?)?;
    m.add_function(wrap_pyfunction!(digitize_arc, m)?)?;
    m.add_function(wrap_pyfunction!(knuth_table, m)?)?;
    m.add_function(wrap_pyfunction!(run_job, m)?)?;
    Ok(())
}
