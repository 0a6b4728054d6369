#!/usr/bin/env python3
"""Smoke test for the hamsplit_py extension module.

Builds nothing itself: run `cargo build -p hamsplit-py` (or --release)
first. The script locates the cdylib under target/, copies it next to a
temp directory as an importable module, and exercises the main surface.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_cdylib() -> Path:
    candidates = [
        ROOT / "target" / "release" / "libhamsplit_py.so",
        ROOT / "target" / "debug" / "libhamsplit_py.so",
        ROOT / "target" / "release" / "libhamsplit_py.dylib",
        ROOT / "target" / "debug" / "libhamsplit_py.dylib",
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("build the module first: cargo build -p hamsplit-py")


def main() -> None:
    lib = locate_cdylib()
    tmp = Path(tempfile.mkdtemp(prefix="hamsplit_py_"))
    shutil.copy(lib, tmp / "hamsplit_py.so")
    sys.path.insert(0, str(tmp))
    import hamsplit_py as hs

    # half-space masses of the unit disc
    disc = hs.Measure.uniform_ball([0.0, 0.0], 1.0)
    value, error = disc.mass_halfspace([1.0, 0.0], 0.0)
    assert abs(value - 0.5) < 1e-12 and error == 0.0
    mc, bound = disc.mass_halfspace_mc([1.0, 0.0], 0.0, 200_000, 42)
    assert abs(mc - 0.5) <= bound

    # offset solving on the square
    square = hs.Measure.uniform_polytope([[0, 0], [1, 0], [1, 1], [0, 1]])
    lo, hi, chosen = hs.solve_offset(square, [1.0, 0.0], 0.25)
    assert abs(chosen - 0.75) < 1e-6

    # splitting two separated discs at uneven ratios
    a = hs.Measure.uniform_ball([-3.0, 0.0], 1.0)
    b = hs.Measure.uniform_ball([3.0, 0.0], 1.0)
    report = hs.find_split([a, b], [0.3, 0.7], scan_resolution=128)
    assert report["status"] == "found" and report["verified"]
    assert report["residual_norm"] <= 1e-6

    # the concentric counterexample refuses to split
    big = hs.Measure.uniform_ball([0.0, 0.0], 2.0)
    small = hs.Measure.uniform_ball([0.0, 0.0], 1.0)
    report = hs.find_split([big, small], [0.25, 0.25], scan_resolution=128)
    assert report["status"] == "not_found"
    assert report["scan"]["best_norm"] > 0.35

    # separability of supports and the planar hull equivalence
    sep = hs.check_separable_supports([a, b])
    assert sep["separable"] and len(sep["witnesses"]) == 2
    assert hs.hulls_disjoint([[0, 0], [1, 0], [0, 1]], [[3, 3], [4, 3], [3, 4]])

    # pentagon central sphere: five-petal curve, turning number 4
    pentagon = hs.Measure.uniform_polytope(
        [
            [math.cos(2 * math.pi * j / 5 + math.pi / 2),
             math.sin(2 * math.pi * j / 5 + math.pi / 2)]
            for j in range(5)
        ]
    )
    curve = hs.central_sphere(pentagon, 0.5, grid=720)
    points = [[x, y] for (_, x, y, _) in curve]
    assert hs.curve_turning_number(points) == 4

    # three-caps anchor discontinuity
    left, right, gap = hs.three_caps_probe(1e-3)
    assert gap > 1.0 and abs(gap - 2.5) < 1e-3

    # two-line partition of the square
    part = hs.two_line_partition(square, [0.1, 0.4, 0.1, 0.4])
    assert part["max_error"] < 1e-6

    # box certification of an affine root
    cert = hs.miranda_localize(
        lambda x: [x[0] - 0.25, x[1] + 0.5], [-1, -1], [1, 1], tol=1e-5, grid=3
    )
    assert cert is not None and cert["verdict"] == "certified"
    assert cert["region"]["lower"][0] <= 0.25 <= cert["region"]["upper"][0]

    print("smoke test passed")


if __name__ == "__main__":
    main()
