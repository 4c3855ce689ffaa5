"""Classical escape trajectory of the inverted potential.

The ground-state exponent is built from the trajectory that leaves the
origin at t = -infinity with zero energy and reaches a given endpoint at
time T.  In scaled coordinates the flow is

    x'' = x + mu * dU/dx,    y'' = b^2 y + mu * dU/dy

when the coupling is carried classically (mu flavor).  For the eps and
lambda flavors the coupling is booked as a quantum insertion instead and the
classical flow stays harmonic.

Every solution component is a finite exponential sum with k = p and l = q
(term cx^p cy^q exp((k + l b)t)), which is what lets endpoint evaluation
eliminate T exactly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    ExpSum,
    GradedPoly,
    PARAM_FLAVORS,
    evaluate_at_endpoint,
    integrate_to_T,
    restrict_to_trajectory,
)
from .errors import ResonantDenominator


@dataclass(frozen=True)
class PotentialSpec:
    """Anharmonic well ``(1/2)(x^2 + b^2 y^2) + <param> * coupling``.

    ``flavor`` names the bookkeeping parameter multiplying the coupling
    polynomial: "mu" couples it into the classical flow, "eps" and "lambda"
    defer it to a fixed level of the quantum recursion.
    """

    b: Fraction
    coupling: GradedPoly
    flavor: str = "mu"

    def __post_init__(self):
        object.__setattr__(self, "b", Fraction(self.b))
        if self.b <= 0:
            raise ValueError("frequency ratio b must be positive")
        if self.flavor not in PARAM_FLAVORS:
            raise ValueError(f"unknown coupling flavor {self.flavor!r}")
        if self.coupling.param is not None:
            raise ValueError("coupling polynomial must be parameter-free")
        if self.coupling.constant_part():
            raise ValueError("coupling polynomial must vanish at the origin")

    def coupling_term(self) -> GradedPoly:
        """The coupling with one power of the flavor parameter attached."""
        return self.coupling.shift(ep=1).with_param(self.flavor)

    def harmonic_part(self) -> GradedPoly:
        half = Fraction(1, 2)
        return GradedPoly(
            {(0, 0, 2, 0): half, (0, 0, 0, 2): half * self.b**2},
            self.flavor,
        )

    def potential(self) -> GradedPoly:
        """Full scaled well, coupling included only for the mu flavor."""
        v = self.harmonic_part()
        if self.flavor == "mu":
            v = v + self.coupling_term()
        return v


def standard_spec(b, flavor: str = "mu") -> PotentialSpec:
    """The x^2 y^2 cross coupling studied throughout."""
    return PotentialSpec(b=Fraction(b), coupling=GradedPoly.mono(1, i=2, j=2), flavor=flavor)


@dataclass(frozen=True)
class Trajectory:
    """Escape trajectory, optionally with endpoint constants solved.

    ``x`` and ``y`` are exponential sums in the flow time.  ``cx`` and
    ``cy``, when present, express the zeroth-order amplitudes (times their
    endpoint exponential) as polynomial series in the endpoint coordinates;
    they are what `evaluate_at_endpoint` substitutes.
    """

    spec: PotentialSpec
    order: int
    x: ExpSum
    y: ExpSum
    cx: GradedPoly | None = None
    cy: GradedPoly | None = None

    @property
    def b(self) -> Fraction:
        return self.spec.b


def solve_classical_trajectory(spec: PotentialSpec, order: int) -> Trajectory:
    """Solve the flow order by order in the coupling parameter.

    Each correction solves a driven oscillator z'' - w^2 z = source with the
    source a sum of pure exponentials; the decaying particular solution
    divides each term by (k + l b)^2 - w^2, which must not vanish.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    b = spec.b
    param = spec.flavor
    x = ExpSum({(0, 0, 1, 0, 1, 0): Fraction(1)}, b, param)
    y = ExpSum({(0, 0, 0, 1, 0, 1): Fraction(1)}, b, param)
    if spec.flavor != "mu":
        return Trajectory(spec, order, x, y)

    fx = spec.coupling_term().diff("x")
    fy = spec.coupling_term().diff("y")
    for n in range(1, order + 1):
        partial = Trajectory(spec, n, x, y)
        src_x = restrict_to_trajectory(fx, partial, n).at_ep(n)
        src_y = restrict_to_trajectory(fy, partial, n).at_ep(n)
        x = x + _particular(src_x, Fraction(1))
        y = y + _particular(src_y, b)
    return Trajectory(spec, order, x, y)


def _particular(source: ExpSum, freq: Fraction) -> ExpSum:
    out = {}
    for (ep, gp, p, q, k, l), c in source.terms.items():
        denom = (k + l * source.b) ** 2 - freq**2
        if denom == 0:
            raise ResonantDenominator(
                f"exponent {k}+{l}b resonates with frequency {freq}"
            )
        out[(ep, gp, p, q, k, l)] = c / denom
    return ExpSum(out, source.b, source.param)


def invert_endpoint_constants(traj: Trajectory) -> Trajectory:
    """Express the trajectory amplitudes through the endpoint coordinates.

    Writing X = cx e^T and Y = cy e^(bT), the endpoint conditions read
    x_T = X + Gx(X, Y) and y_T = Y + Gy(X, Y) with G collecting the
    correction terms; the fixed point X = x_T - Gx(X, Y) converges in one
    pass per coupling order because G starts at first order.
    """
    gx = _correction_poly(traj.x)
    gy = _correction_poly(traj.y)
    var_x = GradedPoly.variable("x").with_param(traj.x.param)
    var_y = GradedPoly.variable("y").with_param(traj.x.param)
    cx, cy = var_x, var_y
    for _ in range(traj.order):
        cx, cy = (
            var_x - gx.subs(cx, cy, max_ep=traj.order),
            var_y - gy.subs(cx, cy, max_ep=traj.order),
        )
    return dataclasses.replace(traj, cx=cx, cy=cy)


def _correction_poly(z: ExpSum) -> GradedPoly:
    out = {}
    for (ep, gp, p, q, k, l), c in z.terms.items():
        if ep == 0:
            continue
        if k != p or l != q:
            raise ResonantDenominator("trajectory term lost its homogeneity")
        out[(ep, gp, p, q)] = c
    return GradedPoly(out, z.param)


def action_integral(traj: Trajectory) -> GradedPoly:
    """Endpoint action of the zero-energy trajectory.

    Integrand is kinetic plus potential energy; on the zero-energy flow this
    equals twice the potential, every term decays toward t = -infinity, and
    the endpoint value is a polynomial in the endpoint coordinates.
    """
    order = traj.order
    kinetic = traj.x.ddt().mul(traj.x.ddt(), order) + traj.y.ddt().mul(traj.y.ddt(), order)
    v = restrict_to_trajectory(traj.spec.potential(), traj, order)
    integrand = kinetic.scale(Fraction(1, 2)) + v
    return evaluate_at_endpoint(integrate_to_T(integrand), traj, order)


def energy_conservation_residual(traj: Trajectory, max_ep: int | None = None) -> ExpSum:
    """Kinetic minus potential energy along the flow.

    Exactly zero through the solved order; the first truncated order shows
    up when ``max_ep`` exceeds ``traj.order``.
    """
    if max_ep is None:
        max_ep = traj.order
    kinetic = traj.x.ddt().mul(traj.x.ddt(), max_ep) + traj.y.ddt().mul(traj.y.ddt(), max_ep)
    v = restrict_to_trajectory(traj.spec.potential(), traj, max_ep)
    return kinetic.scale(Fraction(1, 2)) - v


def flow_equation_residual(traj: Trajectory, max_ep: int | None = None) -> tuple[ExpSum, ExpSum]:
    """Second-derivative residuals of both flow equations, truncated."""
    if max_ep is None:
        max_ep = traj.order
    fx = traj.spec.potential().diff("x")
    fy = traj.spec.potential().diff("y")
    res_x = traj.x.ddt().ddt() - restrict_to_trajectory(fx, traj, max_ep)
    res_y = traj.y.ddt().ddt() - restrict_to_trajectory(fy, traj, max_ep)
    return res_x.truncate_ep(max_ep), res_y.truncate_ep(max_ep)
