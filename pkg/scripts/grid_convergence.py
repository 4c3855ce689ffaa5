#!/usr/bin/env python3
"""Measure how the truncated energy series tracks a refined grid solver.

Two small studies at a fixed overall coupling:

  1. residual between the series energy and a Richardson-extrapolated grid
     energy across a coupling sweep, with the fitted scaling order of the
     residual (should be one past the truncation order);
  2. raw grid error at zero coupling across a ladder of spacing halvings,
     which should shrink about fourfold per step.
"""

from __future__ import annotations

import argparse
import math
import sys

from quadosc import (
    GridSpec,
    coupling_grade_shift,
    extrapolated_ground_energy,
    fd_ground_state,
)
from quadosc.cli import build_solution, parse_rational


def fitted_slope(xs: list[float], ys: list[float]) -> float:
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    n = len(lx)
    mx, my = sum(lx) / n, sum(ly) / n
    num = sum((x - mx) * (y - my) for x, y in zip(lx, ly))
    den = sum((x - mx) ** 2 for x in lx)
    return num / den


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--method", default="hierarchy", help="series to evaluate")
    parser.add_argument("--b", type=parse_rational, default="1", help="frequency ratio")
    parser.add_argument("--g", type=float, default=10.0, help="overall coupling")
    parser.add_argument("--order", type=int, default=2, help="coupling order")
    parser.add_argument(
        "--mus", default="0.02,0.04,0.08", help="comma-separated couplings to sweep"
    )
    parser.add_argument(
        "--levels", type=int, default=2, help="Richardson refinement passes"
    )
    parser.add_argument(
        "--grids",
        default="41,83,167",
        help="grid sizes for the zero-coupling refinement ladder",
    )
    args = parser.parse_args(argv)

    sol = build_solution(args.method, args.b, args.order)
    g = args.g
    b = float(args.b)
    shift = coupling_grade_shift(sol.flavor)

    print(f"# series vs grid: method={args.method} b={args.b} g={g:g}")
    print("mu,series_energy,grid_energy,residual")
    mus = [float(m) for m in args.mus.split(",") if m.strip()]
    residuals = []
    for mu in mus:
        series = sol.energy_value(g, mu * g**shift)
        grid = extrapolated_ground_energy(g, b, mu, levels=args.levels)
        residuals.append(abs(series - grid))
        print(f"{mu:g},{series!r},{grid!r},{residuals[-1]:.6e}")
    if len(mus) >= 2:
        print(f"# fitted residual order: {fitted_slope(mus, residuals):.3f}")

    exact = g * (1 + b) / 2
    print(f"# zero-coupling refinement ladder (exact energy {exact:g})")
    print("points_per_axis,energy,error,shrink_factor")
    previous = None
    for n in [int(s) for s in args.grids.split(",") if s.strip()]:
        energy = fd_ground_state(g, b, 0.0, GridSpec(n, n)).energy
        error = abs(energy - exact)
        factor = "" if previous is None else f"{previous / error:.2f}"
        print(f"{n},{energy!r},{error:.6e},{factor}")
        previous = error
    return 0


if __name__ == "__main__":
    sys.exit(main())
