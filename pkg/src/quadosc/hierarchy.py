"""Level-by-level quadrature for the exponent of the ground state.

Writing the state as exp of a graded sum of polynomials S_0, S_1, ... the
stationary equation splits into one linear transport equation per level,

    grad(S_0) . grad(S_{n+1}) = (1/2) lap(S_n)
                                - (1/2) sum_{i+j=n+1, i,j>=1} grad(S_i).grad(S_j)
                                - E_n  (+ coupling insertion at one level),

and the left side is the time derivative of S_{n+1} along the classical
flow.  So each level is solved by restricting the right side to the
trajectory, removing the constant (which *is* the energy coefficient E_n),
integrating in flow time and reading the result at the endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    ExpSum,
    GradedPoly,
    evaluate_at_endpoint,
    grad_dot,
    integrate_to_T,
    laplacian,
    restrict_to_trajectory,
)
from .trajectory import (
    PotentialSpec,
    Trajectory,
    action_integral,
    invert_endpoint_constants,
    solve_classical_trajectory,
)


@dataclass(frozen=True)
class SeriesSolution:
    """Graded solution of one method run.

    ``kind`` is "exp" when ``terms`` are the exponent levels (S_0, S_1, ...)
    and "poly" when they are prefactor levels (chi_0, chi_1, ...).  Level n
    carries an implicit overall factor g^(1-n) for "exp" and g^(-n) for
    "poly"; any further g dependence is explicit in the term grading.
    ``energies`` maps (total g power, parameter power) to the exact
    coefficient of the energy series.  Prefactor solutions keep the exponent
    levels they ride on (S_0, S_1) in ``base``.
    """

    kind: str
    flavor: str
    b: Fraction
    order: int
    depth: int
    terms: tuple[GradedPoly, ...]
    energies: dict[tuple[int, int], Fraction]
    base: tuple[GradedPoly, ...] = ()

    def term(self, n: int) -> GradedPoly:
        return self.terms[n]

    def energy_value(self, g: float, param_value: float) -> float:
        total = 0.0
        for (gp, ep), c in self.energies.items():
            total += float(c) * g**gp * param_value**ep
        return total


def extract_energy(e: ExpSum) -> tuple[GradedPoly, ExpSum]:
    """Split a restricted right side into its flat part and the rest.

    Terms constant in flow time have no amplitude factors either (the flow
    substitution is exponent-homogeneous), so the flat part is a pure graded
    number: the energy coefficient produced by this level.
    """
    const = e.constant_part()
    coeffs = {}
    for (ep, gp, p, q, k, l), c in const.terms.items():
        if p or q:
            raise ValueError("non-constant amplitude factor in flat term")
        coeffs[(ep, gp, 0, 0)] = c
    return GradedPoly(coeffs, e.param), e.drop_constant()


def quadrature_level(rhs: GradedPoly, traj: Trajectory, order: int) -> tuple[GradedPoly, GradedPoly]:
    """Solve grad(S_0) . grad(S_next) = rhs - E along the flow.

    Returns (E, S_next) with E the flat part of the restricted right side
    and S_next the endpoint value of the time integral of the remainder.
    """
    restricted = restrict_to_trajectory(rhs, traj, order)
    energy, remainder = extract_energy(restricted)
    s_next = evaluate_at_endpoint(integrate_to_T(remainder), traj, order)
    return energy, s_next


def solve_levels(
    s0: GradedPoly,
    traj: Trajectory,
    depth: int,
    order: int,
    flavor: str,
    insertion: GradedPoly | None = None,
    insertion_level: int | None = None,
    kind: str = "exp",
) -> SeriesSolution:
    """Run the level hierarchy down to ``depth``.

    Levels S_1 .. S_{depth+1} are produced; the energy of one extra level is
    extracted (it needs no new unknown).  ``insertion`` is added to the right
    side of the single level ``insertion_level``.
    """
    terms = [s0]
    energies: dict[tuple[int, int], Fraction] = {}
    for n in range(depth + 2):
        rhs = laplacian(terms[n]) * Fraction(1, 2) if n < len(terms) else GradedPoly.zero(flavor)
        for i in range(1, n + 1):
            j = n + 1 - i
            if 1 <= j < len(terms) and i < len(terms):
                rhs = rhs - grad_dot(terms[i], terms[j]) * Fraction(1, 2)
        if insertion is not None and n == insertion_level:
            rhs = rhs + insertion
        rhs = rhs.truncate_ep(order)
        energy, s_next = quadrature_level(rhs, traj, order)
        for (ep, gp, _, _), c in energy.terms.items():
            key = (1 - n + gp, ep)
            energies[key] = energies.get(key, Fraction(0)) + c
        if n <= depth:
            terms.append(s_next)
    return SeriesSolution(
        kind=kind,
        flavor=flavor,
        b=traj.b,
        order=order,
        depth=depth,
        terms=tuple(terms),
        energies={k: v for k, v in energies.items() if v},
    )


def solve_hierarchy(spec: PotentialSpec, order: int = 2, depth: int = 1) -> SeriesSolution:
    """Direct method: coupling rides in the classical flow.

    Truncation bookkeeping: level n starts at parameter order n, so the
    parameter order must cover every produced level or the deepest results
    would be identically zero.
    """
    if spec.flavor != "mu":
        raise ValueError("direct hierarchy requires the mu flavor")
    if order < depth + 1:
        raise ValueError("order must be at least depth + 1")
    traj = invert_endpoint_constants(solve_classical_trajectory(spec, order))
    s0 = action_integral(traj)
    return solve_levels(s0, traj, depth, order, spec.flavor)


def assemble_wavefunction(sol: SeriesSolution) -> tuple[GradedPoly, GradedPoly]:
    """Exponent of the state and the energy series, ready for evaluation.

    The state is exp(-(g S_0 + S_1 + S_2/g + ...)); the returned exponent
    carries every level with its implicit g power made explicit and the
    overall sign folded in, so the state is exp(exponent).  The energy
    series comes back as a pure graded number.
    """
    if sol.kind != "exp":
        raise ValueError("prefactor solutions have no single-exponent form")
    exponent = GradedPoly.zero(sol.flavor)
    for n, lev in enumerate(sol.terms):
        exponent = exponent - lev.shift(gp=1 - n)
    energy = GradedPoly(
        {(ep, gp, 0, 0): c for (gp, ep), c in sol.energies.items()}, sol.flavor
    )
    return exponent, energy


def pde_residual(sol: SeriesSolution, spec: PotentialSpec, n: int) -> GradedPoly:
    """Polynomial residual of the level-n transport equation.

    Rebuilt directly from the stored levels, independent of the quadrature
    that produced them; zero (within the truncation order) certifies the
    level.  Only valid for "exp" solutions.
    """
    if sol.kind != "exp":
        raise ValueError("pde_residual applies to exponent solutions")
    if not 0 <= n < len(sol.terms) - 1:
        raise ValueError("level outside the solved range")
    rhs = laplacian(sol.terms[n]) * Fraction(1, 2)
    for i in range(1, n + 1):
        j = n + 1 - i
        if j >= 1 and i < len(sol.terms) and j < len(sol.terms):
            rhs = rhs - grad_dot(sol.terms[i], sol.terms[j]) * Fraction(1, 2)
    rhs = rhs + _insertion_for(sol, spec, n)
    energy = GradedPoly(
        {(ep, gp - (1 - n), 0, 0): c for (gp, ep), c in sol.energies.items() if gp == 1 - n},
        sol.flavor,
    )
    lhs = grad_dot(sol.terms[0], sol.terms[n + 1])
    return (lhs - rhs + energy).truncate_ep(sol.order)


def _insertion_for(sol: SeriesSolution, spec: PotentialSpec, n: int) -> GradedPoly:
    level = insertion_level_for(sol.flavor)
    if level is not None and n == level:
        return spec.coupling_term()
    return GradedPoly.zero(sol.flavor)


def insertion_level_for(flavor: str) -> int | None:
    """Level whose transport equation receives the coupling insertion.

    One parameter unit costs two g powers in the eps convention and one in
    the lambda convention, which is how many levels down the coupling lands.
    """
    return {"mu": None, "eps": 1, "lambda": 0}[flavor]
