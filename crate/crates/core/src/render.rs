//! SVG and PGM output for digitization results.

use crate::conic::Conic;
use crate::segmentation::{Frame, MonotonicSegment, Parametrization};

/// Binary P5 image with one pixel per grid cell, origin at the frame's
/// minimum corner (bottom-left), set cells at 255.
pub fn pgm_bytes(points: &[(i64, i64)], x_range: (i64, i64), y_range: (i64, i64)) -> Vec<u8> {
    let width = (x_range.1 - x_range.0 + 1).max(1) as usize;
    let height = (y_range.1 - y_range.0 + 1).max(1) as usize;
    let mut img = vec![0u8; width * height];
    for &(x, y) in points {
        if x < x_range.0 || x > x_range.1 || y < y_range.0 || y > y_range.1 {
            continue;
        }
        let col = (x - x_range.0) as usize;
        let row = (y_range.1 - y) as usize; // top row = ymax
        img[row * width + col] = 255;
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(&img);
    out
}

/// SVG with the real curve resampled as a polyline per segment and the
/// emitted grid points as squares of side 0.8 grid units.
pub fn svg_string(
    conic: &Conic,
    segs: &[MonotonicSegment],
    points: &[(i64, i64)],
    frame: &Frame,
    delta: f64,
) -> String {
    const CURVE_SAMPLES: usize = 2048;
    let (xmin, ymin) = (frame.xmin * delta, frame.ymin * delta);
    let (xmax, ymax) = (frame.xmax * delta, frame.ymax * delta);
    let w = xmax - xmin;
    let h = ymax - ymin;
    // Flip y for screen coordinates.
    let fy = |y: f64| ymax + ymin - y;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{xmin} {ymin} {w} {h}\">\n"
    ));
    s.push_str(&format!(
        "  <rect x=\"{xmin}\" y=\"{ymin}\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));

    let param = Parametrization::build(conic).ok();
    if let Some(param) = &param {
        for seg in segs {
            if !seg.t_start.is_finite() || !seg.t_end.is_finite() {
                continue;
            }
            let mut pts = String::new();
            for k in 0..=CURVE_SAMPLES {
                let t = seg.t_start + (seg.t_end - seg.t_start) * k as f64 / CURVE_SAMPLES as f64;
                let (x, y) = param.point(seg.branch_id, t);
                pts.push_str(&format!("{:.6},{:.6} ", x * delta, fy(y * delta)));
            }
            s.push_str(&format!(
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"#c00\" stroke-width=\"{}\"/>\n",
                pts.trim_end(),
                0.05 * delta
            ));
        }
    }

    let side = 0.8 * delta;
    for &(x, y) in points {
        let cx = x as f64 * delta;
        let cy = fy(y as f64 * delta);
        s.push_str(&format!(
            "  <rect x=\"{:.6}\" y=\"{:.6}\" width=\"{side}\" height=\"{side}\" \
             fill=\"#247\" fill-opacity=\"0.55\"/>\n",
            cx - side / 2.0,
            cy - side / 2.0
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_and_payload() {
        let bytes = pgm_bytes(&[(0, 0), (2, 1)], (0, 2), (0, 1));
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let img = &bytes[header.len()..];
        assert_eq!(img.len(), 6);
        // (0,0) is bottom-left: row 1, col 0; (2,1) is top-right: row 0, col 2.
        assert_eq!(img[3], 255);
        assert_eq!(img[2], 255);
        assert_eq!(img.iter().filter(|&&b| b == 255).count(), 2);
    }

    #[test]
    fn pgm_set_count_matches_unique_points() {
        let pts = [(0, 0), (1, 0), (1, 0), (2, 2)];
        let bytes = pgm_bytes(&pts, (0, 2), (0, 2));
        let img = &bytes[b"P5\n3 3\n255\n".len()..];
        assert_eq!(img.iter().filter(|&&b| b == 255).count(), 3);
    }

    #[test]
    fn svg_contains_one_rect_per_point() {
        let c = Conic::new(1, 1, 0, 0, 0, -25).unwrap();
        let frame = Frame::new(-6.0, -6.0, 6.0, 6.0).unwrap();
        let segs = crate::segmentation::build_segments(&c, &frame, true).unwrap();
        let pts = [(5, 0), (4, 3), (3, 4)];
        let svg = svg_string(&c, &segs, &pts, &frame, 1.0);
        let rects = svg.matches("<rect").count();
        // One background rect plus one per point.
        assert_eq!(rects, 1 + pts.len());
        assert_eq!(svg.matches("<polyline").count(), segs.len());
    }
}
