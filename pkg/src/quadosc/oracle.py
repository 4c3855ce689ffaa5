"""Independent checks: textbook perturbation series and a grid eigensolver.

The perturbative oracle works in the unnormalized oscillator product basis,
where the squared coordinate acts by a three-point rule on each quantum
number; no inner products are ever taken and everything stays rational,
with the frequency g carried as an explicit grade.  The numeric oracle
builds the 5-point finite-difference Hamiltonian on a Dirichlet box and
inverse-iterates to the ground state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import diags, identity, kron
from scipy.sparse.linalg import splu

from .algebra import GradedPoly, _G_SHIFT
from .errors import ConvergenceFailure
from .hierarchy import SeriesSolution
from .perturbation import (
    DEFAULT_WINDOW,
    canonical_window,
    normal_form_diff,
    _series_inverse,
)


@dataclass(frozen=True)
class OscBasisIndex:
    """Product-basis index pair.

    The squared-coordinate coupling preserves parity in each direction, so
    only even quantum numbers ever appear in the ground-state corrections.
    """

    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0 or self.m % 2 or self.n % 2:
            raise ValueError("basis indices must be even and nonnegative")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.m, self.n)


def oscillator_matrix_element(m: int, n: int, omega) -> float:
    """<m| s^2 |n> in the normalized oscillator basis of frequency omega.

    Nonzero only on the diagonal and two off the diagonal.
    """
    if m < 0 or n < 0:
        raise ValueError("quantum numbers must be nonnegative")
    omega = float(omega)
    if omega <= 0:
        raise ValueError("frequency must be positive")
    if m == n:
        return (2 * n + 1) / (2 * omega)
    if abs(m - n) == 2:
        lo = min(m, n)
        return math.sqrt((lo + 1) * (lo + 2)) / (2 * omega)
    return 0.0


def _square_action(table: dict[tuple[int, int], Fraction], b: Fraction):
    """Act with x^2 y^2 on a raw-basis coefficient table.

    In the unnormalized basis s^2 maps entry m to (1/omega) times 1/4 of
    entry m+2, (m + 1/2) of entry m, and m(m-1) of entry m-2.  The two
    1/omega factors contribute 1/b here and g^-2 to the implicit grading.
    """
    out: dict[tuple[int, int], Fraction] = {}
    for (m, n), v in table.items():
        for dm, ax in ((2, Fraction(1, 4)), (0, Fraction(2 * m + 1, 2)), (-2, Fraction(m * (m - 1)))):
            if not ax:
                continue
            for dn, ay in ((2, Fraction(1, 4)), (0, Fraction(2 * n + 1, 2)), (-2, Fraction(n * (n - 1)))):
                if not ay:
                    continue
                key = (m + dm, n + dn)
                out[key] = out.get(key, Fraction(0)) + v * ax * ay / b
    return {k: v for k, v in out.items() if v}


def _hermite_table(max_m: int, axis: str, b: Fraction) -> dict[int, GradedPoly]:
    """Even Hermite polynomials at the oscillator-scaled argument.

    Entry m is H_m(sqrt(omega) s) written in the bare coordinate, so each
    s^(2j) carries an explicit grade g^j (times b^j on the y axis).
    """
    i, j = (2, 0) if axis == "x" else (0, 2)
    scale = Fraction(1) if axis == "x" else Fraction(b)
    u4 = GradedPoly({(0, 1, i, j): 4 * scale}, None)
    tab = {0: GradedPoly.const(1)}
    if max_m >= 2:
        tab[2] = u4 - GradedPoly.const(2)
    for m in range(2, max_m, 2):
        tab[m + 2] = (u4 - GradedPoly.const(4 * m + 2)).mul(tab[m]) - tab[m - 2] * Fraction(4 * m * (m - 1))
    return tab


def _chi_from_tables(tables, b: Fraction, order: int) -> GradedPoly:
    """Divide the corrected state by the bare gaussian and normalize at 0."""
    max_m = max((m for t in tables for (m, _) in t), default=0)
    max_n = max((n for t in tables for (_, n) in t), default=0)
    hx = _hermite_table(max_m, "x", b)
    hy = _hermite_table(max_n, "y", b)
    chi = GradedPoly.zero("eps")
    for k, table in enumerate(tables):
        for (m, n), c in table.items():
            chi = chi + (hx[m].mul(hy[n]) * c).shift(ep=k, gp=-3 * k)
    head = chi.constant_part()
    return chi.mul(_series_inverse(head, order), order)


@dataclass(frozen=True)
class RSCorrections:
    """Order-by-order corrections in the raw product basis.

    ``tables[k]`` maps even (m, n) to the exact raw-basis coefficient at
    coupling order k; the whole table carries an implicit grade g^(-3k)
    (two inverse frequencies per coupling action, one per energy
    denominator).  ``energies`` uses the same slot convention as
    `SeriesSolution`.  ``chi`` is the origin-normalized prefactor of the
    state divided by the bare gaussian, all grading explicit.
    """

    b: Fraction
    order: int
    tables: tuple[dict[tuple[int, int], Fraction], ...]
    energies: dict[tuple[int, int], Fraction]
    chi: GradedPoly

    def coefficient(self, k: int, m: int, n: int) -> Fraction:
        return self.tables[k].get((m, n), Fraction(0))

    def amplitude(self, k: int, m: int, n: int) -> float:
        """Normalized-basis amplitude at order k (grade g^(-3k) implied)."""
        c = self.coefficient(k, m, n)
        return float(c) * math.sqrt(2 ** (m + n) * math.factorial(m) * math.factorial(n))


def rs_corrections(b, order: int = 2) -> RSCorrections:
    """Textbook perturbation series for the ground state, exact in g.

    Solved in the raw product basis with the usual intermediate
    normalization (the corrections keep no raw ground-state component).
    Selection rules keep every table finite, so the sums are exact.
    """
    b = Fraction(b)
    if b <= 0:
        raise ValueError("frequency ratio must be positive")
    if order < 1:
        raise ValueError("order must be at least 1")
    tables: list[dict[tuple[int, int], Fraction]] = [{(0, 0): Fraction(1)}]
    shifts: list[Fraction] = []
    for k in range(1, order + 1):
        acted = _square_action(tables[k - 1], b)
        shifts.append(acted.pop((0, 0), Fraction(0)))
        for r in range(1, k):
            for s, v in tables[k - r].items():
                acted[s] = acted.get(s, Fraction(0)) - shifts[r - 1] * v
        nxt = {}
        for (m, n), v in acted.items():
            if v and (m, n) != (0, 0):
                nxt[(m, n)] = -v / (m + n * b)
        tables.append(nxt)
    energies = {(1 - 3 * k, k): e for k, e in enumerate(shifts, start=1) if e}
    chi = _chi_from_tables(tables, b, order)
    return RSCorrections(b=b, order=order, tables=tuple(tables), energies=energies, chi=chi)


def rs_series(b, order: int = 2) -> SeriesSolution:
    """Package the perturbative oracle like a method run for comparison."""
    rs = rs_corrections(b, order)
    half = Fraction(1, 2)
    s0 = GradedPoly({(0, 0, 2, 0): half, (0, 0, 0, 2): half * rs.b}, "eps")
    energies = dict(rs.energies)
    energies[(1, 0)] = energies.get((1, 0), Fraction(0)) + (1 + rs.b) / 2
    return SeriesSolution(
        kind="poly",
        flavor="eps",
        b=rs.b,
        order=order,
        depth=0,
        terms=(rs.chi,),
        energies=energies,
        base=(s0, GradedPoly.zero("eps")),
    )


@dataclass(frozen=True)
class GridSpec:
    """Dirichlet box for the finite-difference solve.

    Half-widths default to six standard deviations of the widest harmonic
    ground-state gaussian, so the boundary error is negligible next to the
    stencil error.
    """

    n_x: int = 161
    n_y: int = 161
    l_x: float | None = None
    l_y: float | None = None

    def resolved(self, g: float, b: float) -> tuple[int, int, float, float]:
        fallback = 6.0 / math.sqrt(g * min(1.0, b))
        lx = fallback if self.l_x is None else float(self.l_x)
        ly = fallback if self.l_y is None else float(self.l_y)
        return self.n_x, self.n_y, lx, ly


@dataclass(frozen=True)
class SpectralEstimate:
    """Converged grid eigenpair, together with the inputs it certifies."""

    energy: float
    grid: tuple[int, int, float, float]
    residual: float
    psi: np.ndarray
    g: float
    b: float
    mu: float


def _second_difference(n: int, h: float):
    main = np.full(n, -2.0 / (h * h))
    off = np.full(n - 1, 1.0 / (h * h))
    return diags([off, main, off], [-1, 0, 1])


def fd_ground_state(
    g: float,
    b: float,
    mu: float,
    grid: GridSpec | None = None,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> SpectralEstimate:
    """Smallest eigenpair of the boxed Hamiltonian by inverse iteration.

    5-point stencil, zero shift (the operator is positive definite), energy
    from the Rayleigh quotient.  The residual bound is loosened with grid
    size so it stays above the roundoff floor of the stencil.
    """
    g = float(g)
    b = float(b)
    mu = float(mu)
    if g <= 0 or b <= 0:
        raise ValueError("g and b must be positive")
    if mu < 0:
        raise ValueError("coupling must be nonnegative")
    if grid is None:
        grid = GridSpec()
    nx, ny, lx, ly = grid.resolved(g, b)
    hx = 2 * lx / (nx + 1)
    hy = 2 * ly / (ny + 1)
    x = -lx + hx * np.arange(1, nx + 1)
    y = -ly + hy * np.arange(1, ny + 1)
    xx = x[:, None]
    yy = y[None, :]
    pot = g * g * (0.5 * (xx**2 + b * b * yy**2) + mu * xx**2 * yy**2)
    ham = (
        -0.5 * kron(_second_difference(nx, hx), identity(ny))
        - 0.5 * kron(identity(nx), _second_difference(ny, hy))
        + diags(pot.ravel())
    ).tocsc()
    solver = splu(ham)
    vec = np.exp(-0.5 * g * (xx**2 + b * yy**2)).ravel()
    vec /= np.linalg.norm(vec)
    tol_eff = tol * max(1.0, (max(nx, ny) / 161.0) ** 2)
    energy = float("nan")
    residual = float("inf")
    for _ in range(max_iter):
        vec = solver.solve(vec)
        vec /= np.linalg.norm(vec)
        hv = ham @ vec
        energy = float(vec @ hv)
        residual = float(np.linalg.norm(hv - energy * vec))
        if residual <= tol_eff:
            break
    else:
        raise ConvergenceFailure(
            f"residual {residual:.3e} above {tol_eff:.3e} after {max_iter} iterations"
        )
    if vec.sum() < 0:
        vec = -vec
    psi = vec.reshape(nx, ny) / math.sqrt(hx * hy)
    return SpectralEstimate(
        energy=energy,
        grid=(nx, ny, lx, ly),
        residual=residual,
        psi=psi,
        g=g,
        b=b,
        mu=mu,
    )


def extrapolated_ground_energy(
    g: float,
    b: float,
    mu: float,
    grid: GridSpec | None = None,
    levels: int = 2,
    tol: float = 1e-10,
) -> float:
    """Richardson-extrapolate the grid energy over nested spacings.

    The box is held fixed and the spacing halved exactly (n -> 2n+1
    interior points); each level removes the next even power of h from the
    stencil error.
    """
    if levels < 1:
        raise ValueError("need at least one refinement level")
    if grid is None:
        grid = GridSpec()
    nx, ny, lx, ly = grid.resolved(float(g), float(b))
    energies = []
    for lv in range(levels + 1):
        f = 2**lv
        step = GridSpec(n_x=f * (nx + 1) - 1, n_y=f * (ny + 1) - 1, l_x=lx, l_y=ly)
        energies.append(fd_ground_state(g, b, mu, step, tol).energy)
    weight = 4
    while len(energies) > 1:
        energies = [
            (weight * fine - coarse) / (weight - 1)
            for coarse, fine in zip(energies, energies[1:])
        ]
        weight *= 4
    return energies[0]


@dataclass(frozen=True)
class ComparisonReport:
    """Slot-by-slot agreement of method runs on the comparison window."""

    agree: bool
    names: tuple[str, ...]
    window: tuple[int, int]
    diffs: dict[str, list[str]]
    numeric: dict[str, float] | None


def compare_methods(
    solutions,
    estimate: SpectralEstimate | None = None,
    names=None,
    window: tuple[int, int] = DEFAULT_WINDOW,
) -> ComparisonReport:
    """Compare runs after flattening them onto the canonical window.

    The first run is the reference; the report lists every differing slot
    keyed by run name.  With a grid estimate, the reference energy series
    is evaluated at the estimate's parameters and the gap recorded.
    """
    sols = list(solutions)
    if not sols:
        raise ValueError("nothing to compare")
    if names is None:
        names = [f"run{i}" for i in range(len(sols))]
    names = [str(n) for n in names]
    if len(names) != len(sols):
        raise ValueError("one name per solution")
    forms = [canonical_window(s, window) for s in sols]
    diffs: dict[str, list[str]] = {}
    for name, form in zip(names[1:], forms[1:]):
        d = normal_form_diff(forms[0], form)
        if d:
            diffs[name] = d
    numeric = None
    if estimate is not None:
        ref = sols[0]
        param_value = estimate.mu * estimate.g ** _G_SHIFT[ref.flavor]
        series = ref.energy_value(estimate.g, param_value)
        gap = abs(series - estimate.energy)
        numeric = {
            "series_energy": series,
            "grid_energy": estimate.energy,
            "abs_gap": gap,
            "rel_gap": gap / abs(estimate.energy),
        }
    return ComparisonReport(
        agree=not diffs,
        names=tuple(names),
        window=window,
        diffs=diffs,
        numeric=numeric,
    )
