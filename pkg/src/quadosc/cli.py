"""Command-line front end: run pipelines, compare them, verify against grids.

Output is deterministic.  Terms are emitted in canonical sorted order and
exact rationals as "p/q" strings, so identical configurations produce
byte-identical output.  Floats appear only in numeric verification blocks.

Exit codes: 0 success or agreement, 1 disagreement, 2 usage error,
3 grid solver failed to converge.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

from .algebra import _G_SHIFT, GradedPoly
from .errors import ConvergenceFailure
from .greens import solve_green
from .hierarchy import SeriesSolution, solve_hierarchy
from .oracle import (
    GridSpec,
    compare_methods,
    extrapolated_ground_energy,
    rs_series,
)
from .perturbation import (
    DEFAULT_WINDOW,
    default_depth,
    solve_exponential,
    solve_polynomial,
)
from .trajectory import standard_spec

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

METHODS = (
    "hierarchy",
    "exp-eps",
    "exp-lambda",
    "poly-eps",
    "poly-lambda",
    "green",
    "rs",
)
PIPELINES = METHODS[:5]
FORMATS = ("json", "csv", "text")


@dataclass
class RunConfig:
    """One resolved invocation; mirrors the JSON accepted by --config."""

    method: str = "hierarchy"
    b: Fraction = Fraction(1)
    order: int = 2
    depth: int | None = None
    g: float = 10.0
    mu: float = 0.05
    grid_n: int | None = None
    fmt: str = "json"
    out: str | None = None


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def build_solution(
    method: str, b: Fraction, order: int = 2, depth: int | None = None
) -> SeriesSolution:
    """Run one method by name and return its graded series."""
    if method == "hierarchy":
        d = default_depth("mu", order) if depth is None else depth
        return solve_hierarchy(standard_spec(b, "mu"), order=order, depth=d)
    if method in ("exp-eps", "exp-lambda"):
        flavor = method.split("-", 1)[1]
        return solve_exponential(standard_spec(b, flavor), order=order, depth=depth)
    if method in ("poly-eps", "poly-lambda"):
        flavor = method.split("-", 1)[1]
        return solve_polynomial(standard_spec(b, flavor), order=order, depth=depth)
    if method == "green":
        return solve_green(standard_spec(b, "eps"), order=order)[1]
    if method == "rs":
        return rs_series(b, order=order)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


# ------------------------------------------------------------- serialization


def _poly_doc(p: GradedPoly) -> list[dict]:
    return [
        {"ep": ep, "gp": gp, "i": i, "j": j, "c": str(c)}
        for (ep, gp, i, j), c in p.sorted_terms()
    ]


def _poly_from_doc(rows: list[dict], param: str | None) -> GradedPoly:
    terms = {}
    for row in rows:
        key = (int(row["ep"]), int(row["gp"]), int(row["i"]), int(row["j"]))
        terms[key] = Fraction(row["c"])
    return GradedPoly(terms, param)


def solution_to_doc(sol: SeriesSolution, method: str) -> dict:
    return {
        "method": method,
        "kind": sol.kind,
        "flavor": sol.flavor,
        "b": str(sol.b),
        "order": sol.order,
        "depth": sol.depth,
        "levels": [_poly_doc(t) for t in sol.terms],
        "base": [_poly_doc(t) for t in sol.base],
        "energies": [
            {"gp": gp, "ep": ep, "c": str(c)}
            for (gp, ep), c in sorted(sol.energies.items())
        ],
    }


def solution_from_doc(doc: dict) -> SeriesSolution:
    flavor = doc["flavor"]
    return SeriesSolution(
        kind=doc["kind"],
        flavor=flavor,
        b=Fraction(doc["b"]),
        order=int(doc["order"]),
        depth=int(doc["depth"]),
        terms=tuple(_poly_from_doc(rows, flavor) for rows in doc["levels"]),
        energies={
            (int(e["gp"]), int(e["ep"])): Fraction(e["c"]) for e in doc["energies"]
        },
        base=tuple(_poly_from_doc(rows, flavor) for rows in doc["base"]),
    )


def doc_to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def solution_to_csv(sol: SeriesSolution, method: str) -> str:
    """One row per series term, with the level's g power folded in.

    Energy coefficients are not series terms and stay in the JSON and text
    forms only.
    """
    top = 1 if sol.kind == "exp" else 0
    folded: dict[tuple[int, int, int, int], Fraction] = {}
    for n, level in enumerate(sol.terms):
        for (ep, gp, i, j), c in level.terms.items():
            key = (ep, gp + top - n, i, j)
            acc = folded.get(key, Fraction(0)) + c
            if acc:
                folded[key] = acc
            else:
                folded.pop(key, None)
    lines = ["method,ep,gp,i,j,coefficient"]
    for (ep, gp, i, j), c in sorted(folded.items()):
        lines.append(f"{method},{ep},{gp},{i},{j},{c}")
    return "\n".join(lines) + "\n"


def solution_to_text(sol: SeriesSolution, method: str) -> str:
    lines = [
        f"method {method}  kind {sol.kind}  parameter {sol.flavor}"
        f"  b {sol.b}  order {sol.order}  depth {sol.depth}"
    ]
    lines.append("energy series:")
    for (gp, ep), c in sorted(sol.energies.items()):
        lines.append(f"  g^{gp} {sol.flavor}^{ep}: {c}")
    for n, level in enumerate(sol.terms):
        lines.append(f"level {n}:")
        lines.append(f"  {level}")
    if sol.base:
        lines.append("base exponent levels:")
        for n, level in enumerate(sol.base):
            lines.append(f"  {level}")
    return "\n".join(lines) + "\n"


def render_solution(sol: SeriesSolution, method: str, fmt: str) -> str:
    if fmt == "json":
        return doc_to_json(solution_to_doc(sol, method))
    if fmt == "csv":
        return solution_to_csv(sol, method)
    if fmt == "text":
        return solution_to_text(sol, method)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


# -------------------------------------------------------------- config merge


def _load_config(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    return doc


_CONFIG_KEYS = {
    "method": str,
    "b": parse_rational,
    "order": int,
    "depth": int,
    "g": float,
    "mu": float,
    "grid_n": int,
    "format": str,
    "out": str,
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Fold an optional --config file under explicit flags."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        doc = _load_config(args.config)
        for key, value in doc.items():
            if key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            conv = _CONFIG_KEYS[key]
            attr = "fmt" if key == "format" else key
            setattr(cfg, attr, None if value is None else conv(value))
    for key in _CONFIG_KEYS:
        attr = "fmt" if key == "format" else key
        flag = getattr(args, attr, None)
        if flag is not None:
            setattr(cfg, attr, flag)
    if cfg.b <= 0:
        raise ValueError("the frequency ratio b must be positive")
    if cfg.order < 1:
        raise ValueError("order must be at least 1")
    if cfg.fmt not in FORMATS:
        raise ValueError(f"unknown format {cfg.fmt!r}; choose from {', '.join(FORMATS)}")
    return cfg


# ----------------------------------------------------------------- commands


def cmd_run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    if cfg.method not in METHODS:
        raise ValueError(
            f"unknown method {cfg.method!r}; choose from {', '.join(METHODS)}"
        )
    sol = build_solution(cfg.method, cfg.b, cfg.order, cfg.depth)
    _emit(render_solution(sol, cfg.method, cfg.fmt), cfg.out)
    return EXIT_OK


def _split_methods(text: str) -> list[str]:
    if text == "all":
        return list(PIPELINES)
    names = [m.strip() for m in text.split(",") if m.strip()]
    for name in names:
        if name not in METHODS:
            raise ValueError(
                f"unknown method {name!r}; choose from {', '.join(METHODS)}"
            )
    return names


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    names = _split_methods(args.methods)
    window = DEFAULT_WINDOW
    if args.window:
        parts = args.window.split(",")
        if len(parts) != 2:
            raise ValueError("window must be two integers 'ep,gdepth'")
        window = (int(parts[0]), int(parts[1]))
    sols = []
    labels = []
    if args.golden:
        with open(args.golden) as fh:
            doc = json.load(fh)
        sols.append(solution_from_doc(doc))
        labels.append(f"golden:{doc.get('method', '?')}")
    for name in names:
        sols.append(build_solution(name, cfg.b, cfg.order, cfg.depth))
        labels.append(name)
    if len(sols) < 2:
        raise ValueError("compare needs at least two runs (or one plus --golden)")
    report = compare_methods(sols, names=labels, window=window)
    doc = {
        "b": str(cfg.b),
        "order": cfg.order,
        "window": {"ep": window[0], "g_depth": window[1]},
        "reference": labels[0],
        "methods": labels,
        "agree": report.agree,
        "diffs": {name: list(d) for name, d in sorted(report.diffs.items())},
    }
    if cfg.fmt == "json":
        _emit(doc_to_json(doc), cfg.out)
    else:
        lines = [
            f"compare b={cfg.b} order={cfg.order}"
            f" window=({window[0]},{window[1]}) reference={labels[0]}"
        ]
        for name in labels[1:]:
            if name in report.diffs:
                lines.append(f"{name}: DIFFERS")
                lines.extend(f"  {d}" for d in report.diffs[name])
            else:
                lines.append(f"{name}: agrees")
        lines.append("AGREE" if report.agree else "DISAGREE")
        _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if report.agree else EXIT_DISAGREE


def _fit_order(mus: list[float], residuals: list[float]) -> float:
    """Least-squares slope of log residual against log coupling."""
    xs = [math.log(m) for m in mus]
    ys = [math.log(r) for r in residuals]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    method = cfg.method
    sol = build_solution(method, cfg.b, cfg.order, cfg.depth)
    b = float(cfg.b)
    shift = _G_SHIFT[sol.flavor]
    grid = GridSpec(cfg.grid_n, cfg.grid_n) if cfg.grid_n else None

    def series_energy(mu: float) -> float:
        return sol.energy_value(cfg.g, mu * cfg.g**shift)

    doc: dict = {
        "method": method,
        "b": str(cfg.b),
        "g": cfg.g,
        "mu": cfg.mu,
        "tol": args.tol,
    }
    ok = True
    series = series_energy(cfg.mu)
    reference = extrapolated_ground_energy(
        cfg.g, b, cfg.mu, grid=grid, levels=args.levels
    )
    gap = abs(series - reference)
    rel = gap / abs(reference)
    doc.update(
        {
            "series_energy": series,
            "grid_energy": reference,
            "abs_gap": gap,
            "rel_gap": rel,
            "pass": rel <= args.tol,
        }
    )
    ok = ok and rel <= args.tol

    if args.mu_sweep:
        mus = [float(m) for m in args.mu_sweep.split(",") if m.strip()]
        if len(mus) < 2:
            raise ValueError("a sweep needs at least two couplings")
        residuals = []
        for mu in mus:
            ref = extrapolated_ground_energy(
                cfg.g, b, mu, grid=grid, levels=max(args.levels, 2)
            )
            residuals.append(abs(series_energy(mu) - ref))
        order_fit = _fit_order(mus, residuals)
        sweep_ok = order_fit >= args.min_order
        doc["sweep"] = {
            "mu": mus,
            "residuals": residuals,
            "fitted_order": order_fit,
            "min_order": args.min_order,
            "pass": sweep_ok,
        }
        ok = ok and sweep_ok

    if cfg.fmt == "json":
        _emit(doc_to_json(doc), cfg.out)
    else:
        lines = [
            f"verify method={method} b={cfg.b} g={cfg.g} mu={cfg.mu}",
            f"series energy = {series!r}",
            f"grid energy   = {reference!r}",
            f"abs gap = {gap:.3e}  rel gap = {rel:.3e}  tol = {args.tol:.1e}",
        ]
        if "sweep" in doc:
            sw = doc["sweep"]
            pairs = "  ".join(
                f"mu={m:g}:{r:.3e}" for m, r in zip(sw["mu"], sw["residuals"])
            )
            lines.append(f"sweep residuals: {pairs}")
            lines.append(
                f"fitted truncation order = {sw['fitted_order']:.3f}"
                f" (need >= {sw['min_order']:g})"
            )
        lines.append("PASS" if ok else "FAIL")
        _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if ok else EXIT_DISAGREE


def cmd_report(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    names = _split_methods(args.methods)
    if len(names) < 2:
        raise ValueError("a report needs at least two methods")
    sols = [build_solution(name, cfg.b, cfg.order, cfg.depth) for name in names]
    report = compare_methods(sols, names=names)
    ref = sols[0]
    doc: dict = {
        "b": str(cfg.b),
        "order": cfg.order,
        "methods": list(names),
        "reference": names[0],
        "agree": report.agree,
        "diffs": {name: list(d) for name, d in sorted(report.diffs.items())},
        "energy_series": [
            {"gp": gp, "ep": ep, "c": str(c)}
            for (gp, ep), c in sorted(ref.energies.items())
        ],
    }
    ok = report.agree
    if args.numeric:
        series = ref.energy_value(cfg.g, cfg.mu * cfg.g ** _G_SHIFT[ref.flavor])
        grid = GridSpec(cfg.grid_n, cfg.grid_n) if cfg.grid_n else None
        reference = extrapolated_ground_energy(
            cfg.g, float(cfg.b), cfg.mu, grid=grid, levels=args.levels
        )
        gap = abs(series - reference)
        rel = gap / abs(reference)
        doc["numeric"] = {
            "g": cfg.g,
            "mu": cfg.mu,
            "series_energy": series,
            "grid_energy": reference,
            "abs_gap": gap,
            "rel_gap": rel,
            "tol": args.tol,
            "pass": rel <= args.tol,
        }
        ok = ok and rel <= args.tol
    if cfg.fmt == "json":
        _emit(doc_to_json(doc), cfg.out)
    else:
        lines = [f"report b={cfg.b} order={cfg.order} reference={names[0]}"]
        lines.append("agreement: " + ("yes" if report.agree else "NO"))
        for name, d in sorted(report.diffs.items()):
            lines.append(f"{name}: DIFFERS")
            lines.extend(f"  {s}" for s in d)
        lines.append("energy series (reference):")
        for (gp, ep), c in sorted(ref.energies.items()):
            lines.append(f"  g^{gp} {ref.flavor}^{ep}: {c}")
        if "numeric" in doc:
            num = doc["numeric"]
            lines.append(
                f"numeric: series={num['series_energy']!r}"
                f" grid={num['grid_energy']!r} rel_gap={num['rel_gap']:.3e}"
            )
        lines.append("PASS" if ok else "FAIL")
        _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if ok else EXIT_DISAGREE


# ------------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with defaults for these flags")
    p.add_argument("--b", type=parse_rational, help="frequency ratio, 'p/q'")
    p.add_argument("--order", type=int, help="perturbation order")
    p.add_argument("--depth", type=int, help="series depth in inverse g")
    p.add_argument("--format", dest="fmt", choices=FORMATS, help="output format")
    p.add_argument("--out", help="write output to this file")


def _add_numeric(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g", type=float, help="overall coupling for evaluation")
    p.add_argument("--mu", type=float, help="quartic coupling for evaluation")
    p.add_argument("--grid-n", dest="grid_n", type=int, help="grid points per axis")
    p.add_argument("--levels", type=int, default=1, help="grid refinement passes")
    p.add_argument("--tol", type=float, default=1e-4, help="relative energy tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadosc",
        description="Ground-state series for the coupled quartic oscillator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one method and print its series")
    _add_common(p_run)
    p_run.add_argument("--method", choices=METHODS, help="which solver to run")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run several methods and compare")
    _add_common(p_cmp)
    p_cmp.add_argument(
        "--methods",
        default="all",
        help="comma-separated method names, or 'all' for the five pipelines",
    )
    p_cmp.add_argument("--golden", help="JSON run to compare against")
    p_cmp.add_argument("--window", help="comparison window 'ep,gdepth'")
    p_cmp.set_defaults(func=cmd_compare)

    p_ver = sub.add_parser("verify", help="check the series against a grid solver")
    _add_common(p_ver)
    p_ver.add_argument("--method", choices=METHODS, help="series to evaluate")
    _add_numeric(p_ver)
    p_ver.add_argument("--mu-sweep", help="comma-separated couplings to sweep")
    p_ver.add_argument(
        "--min-order", type=float, default=2.5, help="least acceptable fitted order"
    )
    p_ver.set_defaults(func=cmd_verify)

    p_rep = sub.add_parser("report", help="full agreement and numeric summary")
    _add_common(p_rep)
    p_rep.add_argument(
        "--methods", default="all", help="comma-separated method names or 'all'"
    )
    p_rep.add_argument(
        "--numeric", action="store_true", help="include a grid comparison"
    )
    _add_numeric(p_rep)
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConvergenceFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
