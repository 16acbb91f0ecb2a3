#!/usr/bin/env python3
"""Smoke test for the conic_raster_py extension module.

Builds nothing itself: expects `cargo build -p conic-raster-py` (or
`--release`) to have produced the cdylib, stages it under an importable
name, and exercises the main surface.
"""

import math
import os
import shutil
import sys
import tempfile


def stage_module() -> str:
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    candidates = [
        os.path.join(root, "target", profile, f"libconic_raster_py{ext}")
        for profile in ("release", "debug")
        for ext in (".so", ".dylib")
    ]
    built = next((c for c in candidates if os.path.exists(c)), None)
    if built is None:
        sys.exit(
            "extension not found; run `cargo build -p conic-raster-py` first"
        )
    stage = tempfile.mkdtemp(prefix="conic-raster-py-")
    shutil.copy(built, os.path.join(stage, "conic_raster_py.so"))
    sys.path.insert(0, stage)
    return built


def main() -> None:
    built = stage_module()
    import conic_raster_py as cr

    # Exact algebra.
    circle = cr.Conic(20, 20, 0, 0, 0, -291)
    assert circle.residue4(8, 2) == 4 * 49, "residue at (4, 1)"
    assert circle.det() < 0 and circle.dis() == 400
    gx, gy, _ = circle.gradient4(8, 0)
    assert (gx, gy) == (2 * 80, 0), "gradient at (4, 0)"

    ellipse = cr.Conic(1, 225, 0, 0, 0, -225)
    assert ellipse.inside(0, 0)
    assert not ellipse.inside(2 * 15, 0)
    assert abs(abs(ellipse.radius_of_curvature(15.0, 0.0)) - 1.0 / 15.0) < 1e-9

    # Digitization: four monotonic quadrants, joined endpoints, monotone runs.
    segs = cr.digitize(ellipse, (-16.0, -2.0, 16.0, 2.0), ccw=True, eight=True)
    assert len(segs) == 4, f"expected 4 segments, got {len(segs)}"
    for a, b in zip(segs, segs[1:]):
        assert a[-1] == b[0], "segments must join at shared grid points"
    for seg in segs:
        dxs = {x1 - x0 for (x0, _), (x1, _) in zip(seg, seg[1:])}
        dys = {y1 - y0 for (_, y0), (_, y1) in zip(seg, seg[1:])}
        assert dxs <= {-1, 0, 1} and dys <= {-1, 0, 1}, "non-unit move"
    points = {p for seg in segs for p in seg}
    for x, y in points:
        # Every emitted point is within the tolerance band of the curve.
        d = min(
            math.dist((x, y), (15 * math.cos(t), math.sin(t)))
            for t in [k * math.tau / 4096 for k in range(4096)]
        )
        assert d <= math.sqrt(2) + 1e-9, f"point {(x, y)} too far: {d}"

    # Arc restriction.
    arcs = cr.digitize_arc(
        ellipse, (-16.0, -2.0, 16.0, 2.0), (0.0, -1.0), (15.0, 0.0)
    )
    assert arcs[0][0] == (0, -1) and arcs[-1][-1] == (15, 0)

    # Register-machine trace fixture.
    rows = cr.knuth_table(circle, (4, 0), -1, 1, False, 4)
    assert rows == [
        (4, 0, -41, 120, 40),
        (4, 1, -1, 120, 80),
        (4, 2, 79, 120, 120),
        (3, 2, -41, 80, 120),
        (3, 3, 79, 80, 160),
    ], rows

    # Job front end.
    report = cr.run_job(
        "conic = 1, 225, 0, 0, 0, -225\nframe = -16, -2, 16, 2\n"
    )
    assert "segments: 4" in report and "ooc_steps: 0" in report, report

    # Validation errors surface as ValueError.
    try:
        cr.Conic(1, 1, 1, 0, 0, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("degenerate conic must be rejected")

    print(f"smoke test OK ({os.path.basename(built)})")


if __name__ == "__main__":
    main()
