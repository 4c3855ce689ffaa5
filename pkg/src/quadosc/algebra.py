"""Exact-arithmetic substrate for the symbolic pipelines.

Two value types carry the whole calculation.  A ``GradedPoly`` is a
polynomial in the plane coordinates (x, y) whose rational coefficients carry
integer powers of the scale factor g and of a single perturbation parameter
(mu, eps or lambda, depending on how the coupling term is booked).  An
``ExpSum`` is what a ``GradedPoly`` becomes along the classical trajectory: a
finite sum of terms r * cx^p * cy^q * exp((k + l*b) t) in the trajectory time
t, with the same grading.

Both types are immutable by convention; every operation returns a new value.
Zero coefficients are never stored, so dict equality is mathematical
equality.
"""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

from .errors import ResidualTimeDependence, SingularIntegral

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, annotations only
    from .trajectory import Trajectory

# g-power carried by one unit of each parameter flavor relative to the
# potential-folded one: eps = g^2 mu, lambda = g mu.
_G_SHIFT = {"mu": 0, "eps": 2, "lambda": 1}

PARAM_FLAVORS = tuple(_G_SHIFT)


def coupling_grade_shift(flavor: str) -> int:
    """Powers of g carried by one unit of this flavor's coupling."""
    if flavor not in _G_SHIFT:
        raise KeyError(f"unknown flavor {flavor!r}")
    return _G_SHIFT[flavor]


def merge_params(a: str | None, b: str | None) -> str | None:
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise ValueError(f"cannot mix perturbation parameters {a!r} and {b!r}")


def _compatible(a: str | None, b: str | None) -> bool:
    return a is None or b is None or a == b


class GradedPoly:
    """Polynomial in (x, y) over Q, graded by g and one perturbation parameter.

    ``terms`` maps ``(ep, gp, i, j)`` to a nonzero Fraction: ``ep`` is the
    parameter power, ``gp`` the explicit g power, ``i`` and ``j`` the x and y
    exponents.  The key layout makes plain ``sorted()`` the canonical term
    order used for printing and serialization.
    """

    __slots__ = ("terms", "param")

    def __init__(self, terms=None, param: str | None = None):
        if param is not None and param not in _G_SHIFT:
            raise ValueError(f"unknown parameter flavor {param!r}")
        clean: dict[tuple[int, int, int, int], Fraction] = {}
        if terms:
            for (ep, gp, i, j), coef in terms.items():
                if i < 0 or j < 0:
                    raise ValueError("negative monomial exponent")
                coef = Fraction(coef)
                if coef:
                    clean[(ep, gp, i, j)] = coef
        self.terms = clean
        self.param = param

    # ---------------------------------------------------------------- build

    @classmethod
    def zero(cls, param: str | None = None) -> "GradedPoly":
        return cls({}, param)

    @classmethod
    def const(cls, value, param: str | None = None) -> "GradedPoly":
        return cls({(0, 0, 0, 0): Fraction(value)}, param)

    @classmethod
    def mono(cls, coef, i=0, j=0, gp=0, ep=0, param=None) -> "GradedPoly":
        return cls({(ep, gp, i, j): Fraction(coef)}, param)

    @classmethod
    def variable(cls, name: str) -> "GradedPoly":
        if name == "x":
            return cls.mono(1, i=1)
        if name == "y":
            return cls.mono(1, j=1)
        raise ValueError(f"unknown variable {name!r}")

    # ----------------------------------------------------------- arithmetic

    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            return other
        return GradedPoly.const(other)

    def __add__(self, other) -> "GradedPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for key, coef in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + coef
        return GradedPoly(out, merge_params(self.param, other.param))

    __radd__ = __add__

    def __neg__(self) -> "GradedPoly":
        return GradedPoly({k: -c for k, c in self.terms.items()}, self.param)

    def __sub__(self, other) -> "GradedPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "GradedPoly":
        return self._coerce(other) - self

    def mul(self, other: "GradedPoly", max_ep: int | None = None) -> "GradedPoly":
        """Product, optionally truncated above ``max_ep`` in the parameter."""
        out: dict[tuple[int, int, int, int], Fraction] = {}
        for (ea, ga, ia, ja), ca in self.terms.items():
            for (eb, gb, ib, jb), cb in other.terms.items():
                ep = ea + eb
                if max_ep is not None and ep > max_ep:
                    continue
                key = (ep, ga + gb, ia + ib, ja + jb)
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return GradedPoly(out, merge_params(self.param, other.param))

    def __mul__(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            return self.mul(other)
        coef = Fraction(other)
        return GradedPoly({k: c * coef for k, c in self.terms.items()}, self.param)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GradedPoly":
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, n: int) -> "GradedPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = GradedPoly.const(1, self.param)
        for _ in range(n):
            out = out.mul(self)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.terms == other.terms and _compatible(self.param, other.param)

    def __bool__(self) -> bool:
        return bool(self.terms)

    # ------------------------------------------------------------- calculus

    def diff(self, var: str) -> "GradedPoly":
        out = {}
        for (ep, gp, i, j), c in self.terms.items():
            if var == "x" and i > 0:
                out[(ep, gp, i - 1, j)] = c * i
            elif var == "y" and j > 0:
                out[(ep, gp, i, j - 1)] = c * j
        return GradedPoly(out, self.param)

    # ----------------------------------------------------------- structure

    def shift(self, ep: int = 0, gp: int = 0) -> "GradedPoly":
        """Multiply by param^ep * g^gp (pure grading shift)."""
        if ep == 0 and gp == 0:
            return self
        return GradedPoly(
            {(e + ep, g + gp, i, j): c for (e, g, i, j), c in self.terms.items()},
            self.param,
        )

    def with_param(self, param: str | None) -> "GradedPoly":
        return GradedPoly(self.terms, param)

    def regrade(self, dst: str) -> "GradedPoly":
        """Re-express the parameter grading in flavor ``dst``.

        Uses eps = g^2 mu and lambda = g mu, so only the g power moves.
        """
        src = self.param
        if src is None or src == dst:
            return GradedPoly(self.terms, dst)
        shift = _G_SHIFT[src] - _G_SHIFT[dst]
        return GradedPoly(
            {(ep, gp + shift * ep, i, j): c for (ep, gp, i, j), c in self.terms.items()},
            dst,
        )

    def truncate_ep(self, max_ep: int) -> "GradedPoly":
        return GradedPoly(
            {k: c for k, c in self.terms.items() if k[0] <= max_ep}, self.param
        )

    def constant_part(self) -> "GradedPoly":
        return GradedPoly(
            {k: c for k, c in self.terms.items() if k[2] == 0 and k[3] == 0},
            self.param,
        )

    def drop_constant(self) -> "GradedPoly":
        return GradedPoly(
            {k: c for k, c in self.terms.items() if k[2] != 0 or k[3] != 0},
            self.param,
        )

    def coefficient(self, i: int, j: int, gp: int | None = None, ep: int | None = None):
        """Collect terms at monomial (i, j), optionally pinned to one grade."""
        out = {}
        for (e, g, ii, jj), c in self.terms.items():
            if ii == i and jj == j and (gp is None or g == gp) and (ep is None or e == ep):
                out[(e, g, 0, 0)] = c
        return GradedPoly(out, self.param)

    def max_ep(self) -> int:
        return max((k[0] for k in self.terms), default=0)

    def degree(self) -> int:
        return max((k[2] + k[3] for k in self.terms), default=0)

    def subs(self, px: "GradedPoly", py: "GradedPoly", max_ep: int | None = None) -> "GradedPoly":
        """Substitute polynomials for x and y, keeping the grading factors."""
        max_i = max((k[2] for k in self.terms), default=0)
        max_j = max((k[3] for k in self.terms), default=0)
        xs = _poly_powers(px, max_i, max_ep)
        ys = _poly_powers(py, max_j, max_ep)
        out = GradedPoly.zero(merge_params(self.param, merge_params(px.param, py.param)))
        for (ep, gp, i, j), c in self.terms.items():
            if max_ep is not None and ep > max_ep:
                continue
            cut = None if max_ep is None else max_ep - ep
            prod = xs[i].mul(ys[j], max_ep=cut)
            out = out + prod.shift(ep=ep, gp=gp) * c
        return out

    def evaluate(self, g: float, param_value: float, x: float = 0.0, y: float = 0.0) -> float:
        total = 0.0
        for (ep, gp, i, j), c in self.terms.items():
            total += float(c) * g**gp * param_value**ep * x**i * y**j
        return total

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        sym = self.param or "p"
        parts = []
        for (ep, gp, i, j), c in self.sorted_terms():
            factors = [str(c)]
            if ep:
                factors.append(f"{sym}^{ep}")
            if gp:
                factors.append(f"g^{gp}")
            if i:
                factors.append(f"x^{i}")
            if j:
                factors.append(f"y^{j}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"GradedPoly({self})"


def laplacian(p: GradedPoly) -> GradedPoly:
    """Sum of the second x and y derivatives."""
    return p.diff("x").diff("x") + p.diff("y").diff("y")


def grad_dot(p: GradedPoly, q: GradedPoly) -> GradedPoly:
    """Dot product of the two gradients."""
    return p.diff("x").mul(q.diff("x")) + p.diff("y").mul(q.diff("y"))


def _poly_powers(p: GradedPoly, n: int, max_ep: int | None):
    out = [GradedPoly.const(1, p.param)]
    for _ in range(n):
        out.append(out[-1].mul(p, max_ep=max_ep))
    return out


class ExpSum:
    """Sum of terms r * cx^p * cy^q * exp((k + l*b) t) along the trajectory.

    ``terms`` maps ``(ep, gp, p, q, k, l)`` to a nonzero Fraction with the
    same (ep, gp) grading as `GradedPoly`.  ``b`` is the fixed frequency
    ratio, so the time dependence of a term is exp((k + l*b) t) with k, l
    non-negative integers.
    """

    __slots__ = ("terms", "b", "param")

    def __init__(self, terms=None, b=Fraction(1), param: str | None = None):
        self.b = Fraction(b)
        if self.b <= 0:
            raise ValueError("frequency ratio b must be positive")
        clean: dict[tuple[int, int, int, int, int, int], Fraction] = {}
        if terms:
            for (ep, gp, p, q, k, l), coef in terms.items():
                if min(p, q, k, l) < 0:
                    raise ValueError("negative exponent in trajectory term")
                coef = Fraction(coef)
                if coef:
                    clean[(ep, gp, p, q, k, l)] = coef
        self.terms = clean
        self.param = param

    @classmethod
    def zero(cls, b, param: str | None = None) -> "ExpSum":
        return cls({}, b, param)

    @classmethod
    def unit(cls, b, param: str | None = None) -> "ExpSum":
        return cls({(0, 0, 0, 0, 0, 0): Fraction(1)}, b, param)

    def _check(self, other: "ExpSum"):
        if self.b != other.b:
            raise ValueError("mixing trajectories with different b")

    def __add__(self, other: "ExpSum") -> "ExpSum":
        self._check(other)
        out = dict(self.terms)
        for key, coef in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + coef
        return ExpSum(out, self.b, merge_params(self.param, other.param))

    def __neg__(self) -> "ExpSum":
        return ExpSum({k: -c for k, c in self.terms.items()}, self.b, self.param)

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + (-other)

    def mul(self, other: "ExpSum", max_ep: int | None = None) -> "ExpSum":
        self._check(other)
        out: dict[tuple[int, int, int, int, int, int], Fraction] = {}
        for (ea, ga, pa, qa, ka, la), ca in self.terms.items():
            for (eb, gb, pb, qb, kb, lb), cb in other.terms.items():
                ep = ea + eb
                if max_ep is not None and ep > max_ep:
                    continue
                key = (ep, ga + gb, pa + pb, qa + qb, ka + kb, la + lb)
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return ExpSum(out, self.b, merge_params(self.param, other.param))

    def __mul__(self, other) -> "ExpSum":
        if isinstance(other, ExpSum):
            return self.mul(other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, coef) -> "ExpSum":
        coef = Fraction(coef)
        return ExpSum({k: c * coef for k, c in self.terms.items()}, self.b, self.param)

    def shift(self, ep: int = 0, gp: int = 0) -> "ExpSum":
        if ep == 0 and gp == 0:
            return self
        return ExpSum(
            {(e + ep, g + gp, p, q, k, l): c
             for (e, g, p, q, k, l), c in self.terms.items()},
            self.b,
            self.param,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpSum):
            return NotImplemented
        return (
            self.terms == other.terms
            and self.b == other.b
            and _compatible(self.param, other.param)
        )

    def __bool__(self) -> bool:
        return bool(self.terms)

    def ddt(self) -> "ExpSum":
        """Time derivative: each term picks up its exponent k + l*b."""
        out = {}
        for (ep, gp, p, q, k, l), c in self.terms.items():
            coef = c * (k + l * self.b)
            if coef:
                out[(ep, gp, p, q, k, l)] = coef
        return ExpSum(out, self.b, self.param)

    def constant_part(self) -> "ExpSum":
        return ExpSum(
            {k: c for k, c in self.terms.items() if k[4] == 0 and k[5] == 0},
            self.b,
            self.param,
        )

    def drop_constant(self) -> "ExpSum":
        return ExpSum(
            {k: c for k, c in self.terms.items() if k[4] != 0 or k[5] != 0},
            self.b,
            self.param,
        )

    def truncate_ep(self, max_ep: int) -> "ExpSum":
        return ExpSum(
            {k: c for k, c in self.terms.items() if k[0] <= max_ep}, self.b, self.param
        )

    def at_ep(self, ep: int) -> "ExpSum":
        return ExpSum(
            {k: c for k, c in self.terms.items() if k[0] == ep}, self.b, self.param
        )

    def is_homogeneous(self) -> bool:
        """True when every term has matching constants and time exponents.

        Substituting cx e^t and cy e^(bt) (and their corrections, which keep
        the property) can only produce terms with k == p and l == q.
        """
        return all(k == p and l == q for (_, _, p, q, k, l) in self.terms)

    def max_ep(self) -> int:
        return max((k[0] for k in self.terms), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        sym = self.param or "p"
        parts = []
        for (ep, gp, p, q, k, l), c in self.sorted_terms():
            factors = [str(c)]
            if ep:
                factors.append(f"{sym}^{ep}")
            if gp:
                factors.append(f"g^{gp}")
            if p:
                factors.append(f"cx^{p}")
            if q:
                factors.append(f"cy^{q}")
            if k or l:
                factors.append(f"exp(({k}+{l}b)t)")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"ExpSum({self})"


def integrate_to_T(e: ExpSum) -> ExpSum:
    """Integrate term by term from t = -inf up to a symbolic endpoint time T.

    Every exponent k + l*b is positive for k, l >= 0 not both zero, so the
    primitive vanishing at -inf is the term divided by its exponent.  A
    constant term signals a missing energy subtraction upstream and raises
    SingularIntegral.
    """
    out = {}
    for (ep, gp, p, q, k, l), c in e.terms.items():
        if k == 0 and l == 0:
            raise SingularIntegral("constant integrand has no decaying primitive")
        out[(ep, gp, p, q, k, l)] = c / (k + l * e.b)
    return ExpSum(out, e.b, e.param)


def _exp_powers(e: ExpSum, n: int, max_ep: int | None):
    out = [ExpSum.unit(e.b, e.param)]
    for _ in range(n):
        out.append(out[-1].mul(e, max_ep=max_ep))
    return out


def restrict_to_trajectory(p: GradedPoly, traj: "Trajectory", order: int) -> ExpSum:
    """Substitute the trajectory for (x, y), truncating above ``order`` in
    the perturbation parameter."""
    param = merge_params(p.param, traj.x.param)
    max_i = max((k[2] for k in p.terms), default=0)
    max_j = max((k[3] for k in p.terms), default=0)
    xs = _exp_powers(traj.x, max_i, order)
    ys = _exp_powers(traj.y, max_j, order)
    out = ExpSum.zero(traj.b, param)
    for (ep, gp, i, j), c in p.terms.items():
        if ep > order:
            continue
        prod = xs[i].mul(ys[j], max_ep=order - ep)
        out = out + prod.shift(ep=ep, gp=gp).scale(c)
    return out


def evaluate_at_endpoint(e: ExpSum, traj: "Trajectory", order: int | None = None) -> GradedPoly:
    """Set t = T and replace the trajectory constants by the endpoint series.

    cx carries one factor exp(-T) and cy one factor exp(-b T), so a term
    cx^p cy^q exp((k + l*b)T) is T-free exactly when k == p and l == q; any
    other term raises ResidualTimeDependence.  The result is a polynomial in
    the endpoint coordinates, returned in the (x, y) variables.
    """
    if traj.cx is None or traj.cy is None:
        raise ValueError("trajectory endpoint constants not solved")
    if order is None:
        order = traj.order
    param = merge_params(e.param, traj.cx.param)
    max_p = max((k[2] for k in e.terms), default=0)
    max_q = max((k[3] for k in e.terms), default=0)
    xs = _poly_powers(traj.cx, max_p, order)
    ys = _poly_powers(traj.cy, max_q, order)
    out = GradedPoly.zero(param)
    for (ep, gp, p, q, k, l), c in e.terms.items():
        if k != p or l != q:
            raise ResidualTimeDependence(
                f"factor exp(({k - p} + {l - q}*b)T) does not cancel"
            )
        if ep > order:
            continue
        prod = xs[p].mul(ys[q], max_ep=order - ep)
        out = out + prod.shift(ep=ep, gp=gp) * c
    return out.truncate_ep(order)
