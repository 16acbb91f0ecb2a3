use conic_raster::conic::Conic;
use conic_raster::engine::{run_segment, Mode};
use conic_raster::oracle::footpoint;
use conic_raster::segmentation::*;

fn main() {
    // Axis-aligned parabola y² = 4x.
    let p1 = Conic::new(0, 1, 0, -2, 0, 0).unwrap();
    // Rotated parabola (x+y)² = 2y.
    let p2 = Conic::new(1, 1, 1, 0, -1, 0).unwrap();
    // Hyperbola with branches along y: y² − x² = 1.
    let h = Conic::new(-1, 1, 0, 0, 0, -1).unwrap();
    let frame = Frame::new(-8.0, -8.0, 8.0, 8.0).unwrap();
    for (name, c) in [("parab-axis", p1), ("parab-rot", p2), ("hyp-vertical", h)] {
        match build_segments(&c, &frame, true) {
            Ok(segs) => {
                println!("{name}: {} segments", segs.len());
                for seg in &segs {
                    let run = run_segment(&c, seg, Mode::Eight).unwrap();
                    let mut worst = 0.0f64;
                    for p in &run.points {
                        worst = worst.max(footpoint(&c, p.to_real(), seg).unwrap().rho);
                    }
                    println!("  {:?}->{:?} br={} pts={} ooc={} max_rho={:.4}",
                        seg.start.grid(), seg.end.grid(), seg.branch_id,
                        run.points.len(), run.stats.ooc_steps, worst);
                }
            }
            Err(e) => println!("{name}: ERR {e}"),
        }
    }
}
