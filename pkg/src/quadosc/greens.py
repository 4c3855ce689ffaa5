"""Operator inversion of the ground-state condition, no trajectory needed.

Dividing the state by the bare gaussian turns the stationary equation into

    (A - (1/2) lap + coupling) chi = shift * chi,

where A scales each even monomial x^(2l) y^(2m) by 2g(l + m b).  Inverting
A maps the equation onto a geometric series: every application of
(1/2) lap o A^(-1) lowers the total degree by two, so the series terminates,
and the requirement that no flat term is ever handed to A^(-1) fixes the
energy shift order by order in the coupling.

Everything is exact: coefficients are rationals graded by explicit g powers
(one inverse scaling costs one g).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .algebra import GradedPoly, laplacian
from .errors import OddParity, SingularInverse, TruncationOverflow
from .hierarchy import SeriesSolution
from .trajectory import PotentialSpec


def apply_flow_inverse(p: GradedPoly, b: Fraction) -> GradedPoly:
    """Divide each even monomial by its flow eigenvalue 2g(l + m b)."""
    b = Fraction(b)
    out = {}
    for (ep, gp, i, j), c in p.terms.items():
        if i % 2 or j % 2:
            raise OddParity(f"x^{i} y^{j} is not an even monomial")
        if i == 0 and j == 0:
            raise SingularInverse("flat term has flow eigenvalue zero")
        out[(ep, gp - 1, i, j)] = c / (i + j * b)
    return GradedPoly(out, p.param)


def diffusion_step(p: GradedPoly, b: Fraction) -> GradedPoly:
    """Half laplacian after inverse scaling; drops total degree by two."""
    return laplacian(apply_flow_inverse(p, b)) * Fraction(1, 2)


def resolvent_sum(p: GradedPoly, b: Fraction) -> GradedPoly:
    """Sum of all diffusion-step iterates of ``p``.

    Flat terms terminate their chain (they stay in the sum but are not
    stepped again), and each step lowers degree, so the sum is finite.
    """
    acc = GradedPoly.zero(p.param)
    cur = p
    while cur:
        acc = acc + cur
        cur = diffusion_step(cur.drop_constant(), b)
    return acc


def collapse_constant(l: int, m: int, b: Fraction) -> GradedPoly:
    """Flat remnant of the full chain applied to x^(2l) y^(2m)."""
    if l < 0 or m < 0:
        raise ValueError("negative half-degrees")
    mono = GradedPoly.mono(1, i=2 * l, j=2 * m)
    return resolvent_sum(mono, b).constant_part()


def _odd_double_factorial(n: int) -> int:
    return prod(range(1, 2 * n, 2))


def collapse_constant_pure_x(l: int) -> GradedPoly:
    """Closed form (2l-1)!! / (2g)^l for a pure x^(2l) chain."""
    return GradedPoly.mono(Fraction(_odd_double_factorial(l), 2**l), gp=-l)


def collapse_constant_pure_y(m: int, b: Fraction) -> GradedPoly:
    """Closed form (2m-1)!! / (2gb)^m for a pure y^(2m) chain."""
    return GradedPoly.mono(Fraction(_odd_double_factorial(m)) / (2 * Fraction(b)) ** m, gp=-m)


def gamma_coefficient(kind: str, indices, b: Fraction = Fraction(1)) -> GradedPoly:
    """Named coefficients of iterated diffusion-step chains on one monomial.

    Computed by composing the operator steps and reading off the requested
    slot; the result is a pure g-graded rational.

    kinds (``indices`` is an int or a tuple as noted):
      - "x_full", l >= 1: flat remnant after l steps on x^(2l)
      - "y_full", m >= 1: flat remnant after m steps on y^(2m)
      - "x_partial", (l, n) with 0 <= n < l: coefficient of x^(2(l-n)) in
        the inverse scaling of n steps on x^(2l)
      - "y_partial", (m, n) likewise in y
      - "xy_full", (l, m) with l, m >= 1: flat remnant after l+m steps on
        x^(2l) y^(2m)
    """
    b = Fraction(b)
    idx = (indices,) if isinstance(indices, int) else tuple(indices)

    def chain(i: int, j: int, steps: int) -> GradedPoly:
        p = GradedPoly.mono(1, i=i, j=j)
        for _ in range(steps):
            p = diffusion_step(p, b)
        return p

    if kind == "x_full" or kind == "y_full":
        (l,) = idx
        if l < 1:
            raise IndexError("chain needs a positive half-degree")
        i, j = (2 * l, 0) if kind == "x_full" else (0, 2 * l)
        return chain(i, j, l).constant_part()
    if kind == "x_partial" or kind == "y_partial":
        l, n = idx
        if not 0 <= n < l:
            raise IndexError("partial chain needs 0 <= steps < half-degree")
        i, j = (2 * l, 0) if kind == "x_partial" else (0, 2 * l)
        p = apply_flow_inverse(chain(i, j, n), b)
        keep = 2 * (l - n)
        i, j = (keep, 0) if kind == "x_partial" else (0, keep)
        return GradedPoly(
            {(ep, gp, 0, 0): c for (ep, gp, ii, jj), c in p.terms.items() if (ii, jj) == (i, j)},
            p.param,
        )
    if kind == "xy_full":
        l, m = idx
        if l < 1 or m < 1:
            raise IndexError("mixed chain needs both half-degrees positive")
        return chain(2 * l, 2 * m, l + m).constant_part()
    raise ValueError(f"unknown coefficient kind {kind!r}")


@dataclass(frozen=True)
class OperatorSolution:
    """Per-coupling-order prefactors and energy shifts from the inversion.

    ``chi[k]`` is the full prefactor correction of coupling order k (with
    its explicit g grading); ``delta[k]`` the matching flat energy shift.
    """

    spec: PotentialSpec
    order: int
    max_degree: int
    chi: tuple[GradedPoly, ...]
    delta: tuple[GradedPoly, ...]

    def coefficient(self, k: int, i: int, j: int) -> GradedPoly:
        """Coupling-order-k coefficient of x^i y^j, grading included."""
        return self.chi[k].coefficient(i, j)

    def to_series(self) -> SeriesSolution:
        """Rebook by g depth so the solution can be window-compared."""
        total = GradedPoly.zero("eps")
        for part in self.chi:
            total = total + part
        depth = -min((gp for (_, gp, _, _) in total.terms), default=0)
        terms = []
        for n in range(depth + 1):
            terms.append(
                GradedPoly(
                    {(ep, 0, i, j): c for (ep, gp, i, j), c in total.terms.items() if gp == -n},
                    "eps",
                )
            )
        energies: dict[tuple[int, int], Fraction] = {
            (1, 0): (1 + Fraction(self.spec.b)) / 2
        }
        for shift in self.delta:
            for (ep, gp, _, _), c in shift.terms.items():
                energies[(gp, ep)] = energies.get((gp, ep), Fraction(0)) + c
        half = Fraction(1, 2)
        s0 = GradedPoly(
            {(0, 0, 2, 0): half, (0, 0, 0, 2): half * Fraction(self.spec.b)}, "eps"
        )
        return SeriesSolution(
            kind="poly",
            flavor="eps",
            b=self.spec.b,
            order=self.order,
            depth=depth,
            terms=tuple(terms),
            energies=energies,
            base=(s0, GradedPoly.zero("eps")),
        )


def solve_green(
    spec: PotentialSpec, order: int = 2, max_degree: int | None = None
) -> tuple[OperatorSolution, SeriesSolution]:
    """Iterate the inversion to the requested coupling order.

    At order k the source is the coupling times the previous prefactor plus
    the known shifts times the earlier prefactors; the new shift cancels the
    flat remnant of the resolved source and the inverse scaling of what is
    left is the new prefactor.

    Returns the raw per-order solution and its level-sliced rebooking.
    """
    if spec.flavor != "eps":
        raise ValueError("operator inversion uses the eps flavor")
    if order < 1:
        raise ValueError("order must be at least 1")
    if max_degree is None:
        max_degree = 2 * order
    b = spec.b
    coupling = spec.coupling_term()
    chi = [GradedPoly.const(1, "eps")]
    delta: list[GradedPoly] = [GradedPoly.zero("eps")]
    for k in range(1, order + 1):
        source = -coupling.mul(chi[k - 1])
        for j in range(1, k):
            source = source + delta[j].mul(chi[k - j])
        worst = max((key[2] + key[3] for key in source.terms), default=0)
        if worst > 2 * max_degree:
            raise TruncationOverflow(
                f"source degree {worst} exceeds cap {2 * max_degree}"
            )
        resolved = resolvent_sum(source, b)
        shift = -resolved.constant_part()
        delta.append(shift)
        chi.append(apply_flow_inverse(resolved.drop_constant(), b))
    ansatz = OperatorSolution(
        spec=spec,
        order=order,
        max_degree=max_degree,
        chi=tuple(chi),
        delta=tuple(delta),
    )
    return ansatz, ansatz.to_series()
