"""Deferred-coupling solvers and the canonical cross-method form.

Three bookkeepings of the same coupling are supported.  The "mu" flavor
feeds it into the classical flow (see `hierarchy.solve_hierarchy`).  The
"eps" and "lambda" flavors keep the flow harmonic and insert the coupling
into one fixed level of the quantum recursion; one eps unit is worth g^2 mu
units and one lambda unit g^1, so the insertion lands two levels or one
level down.

Solutions come in two shapes: exponent levels ("exp") and prefactor levels
("poly", the state being exp of the harmonic exponent times a graded
polynomial).  `exp_to_poly` maps the first shape onto the second by
expanding the exponential of the deep levels.  `normalize_grading`
re-expresses a solution of either shape in another flavor's grading, moving
terms between levels so different flavors compare level by level.
`canonical_window` flattens a solution to a single window-truncated
polynomial where all methods can be compared slot by slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import GradedPoly, _G_SHIFT, grad_dot, laplacian
from .hierarchy import (
    SeriesSolution,
    insertion_level_for,
    quadrature_level,
    solve_hierarchy,
    solve_levels,
)
from .trajectory import (
    PotentialSpec,
    action_integral,
    invert_endpoint_constants,
    solve_classical_trajectory,
)

# parameter half-window, g-depth half-window for cross-method comparison
DEFAULT_WINDOW = (2, 5)


def default_depth(flavor: str, order: int) -> int:
    """Smallest depth whose energy ladder covers the requested order.

    The deepest energy coefficient of parameter order k sits at level 3k
    (eps), 2k (lambda) or k (mu), and the run extracts energies one level
    past ``depth``.
    """
    return {"mu": order - 1, "eps": 3 * order - 1, "lambda": 2 * order - 1}[flavor]


def _check_depth(flavor: str, order: int, depth: int):
    floor = default_depth(flavor, order)
    if flavor == "mu":
        if order < depth + 1:
            raise ValueError("order must be at least depth + 1")
    elif depth < floor:
        raise ValueError(
            f"flavor {flavor!r} at order {order} needs depth >= {floor}"
        )


def _harmonic_run(spec: PotentialSpec, order: int):
    traj = invert_endpoint_constants(solve_classical_trajectory(spec, order))
    return traj, action_integral(traj)


def solve_exponential(spec: PotentialSpec, order: int = 2, depth: int | None = None) -> SeriesSolution:
    """Exponent levels for any flavor; deferred flavors use an insertion."""
    if depth is None:
        depth = default_depth(spec.flavor, order)
    if spec.flavor == "mu":
        return solve_hierarchy(spec, order, depth)
    _check_depth(spec.flavor, order, depth)
    traj, s0 = _harmonic_run(spec, order)
    return solve_levels(
        s0,
        traj,
        depth,
        order,
        spec.flavor,
        insertion=spec.coupling_term(),
        insertion_level=insertion_level_for(spec.flavor),
    )


def solve_polynomial(spec: PotentialSpec, order: int = 2, depth: int | None = None) -> SeriesSolution:
    """Prefactor levels chi_0, chi_1, ... solved by their own recursion.

    Level n obeys

        grad(S0).grad(chi_n) = (1/2) lap(chi_{n-1}) - grad(S1).grad(chi_{n-1})
                               - P chi_{n-1} + sum_j E_j chi_{n-j} + E_n,

    with P = (1/2)[lap(S1) - grad(S1)^2] plus the coupling for the eps
    flavor (for lambda the coupling is already inside S1).  Solved by the
    same flow quadrature as the exponent levels; E_n is fixed by decay of
    the integrand.
    """
    if spec.flavor == "mu":
        raise ValueError("prefactor recursion needs a deferred-coupling flavor")
    if depth is None:
        depth = default_depth(spec.flavor, order)
    _check_depth(spec.flavor, order, depth)
    order_cap = order
    traj, s0 = _harmonic_run(spec, order_cap)

    rhs0 = laplacian(s0) * Fraction(1, 2)
    if spec.flavor == "lambda":
        rhs0 = rhs0 + spec.coupling_term()
    e0, s1 = quadrature_level(rhs0, traj, order_cap)

    energies: dict[tuple[int, int], Fraction] = {}
    for (ep, gp, _, _), c in e0.terms.items():
        energies[(1 + gp, ep)] = energies.get((1 + gp, ep), Fraction(0)) + c

    p_op = (laplacian(s1) - grad_dot(s1, s1)) * Fraction(1, 2)
    if spec.flavor == "eps":
        p_op = p_op + spec.coupling_term()
    p_op = p_op.truncate_ep(order_cap)

    chis = [GradedPoly.const(1, spec.flavor)]
    level_energies: list[GradedPoly] = []
    for n in range(1, depth + 2):
        prev = chis[n - 1]
        rhs = laplacian(prev) * Fraction(1, 2)
        rhs = rhs - grad_dot(s1, prev)
        rhs = rhs - p_op.mul(prev, order_cap)
        for j in range(1, n):
            rhs = rhs + level_energies[j - 1].mul(chis[n - j], order_cap)
        rhs = rhs.truncate_ep(order_cap)
        flat, chi_n = quadrature_level(rhs, traj, order_cap)
        e_n = -flat
        level_energies.append(e_n)
        for (ep, gp, _, _), c in e_n.terms.items():
            key = (1 - n + gp, ep)
            energies[key] = energies.get(key, Fraction(0)) + c
        if n <= depth:
            chis.append(chi_n)

    return SeriesSolution(
        kind="poly",
        flavor=spec.flavor,
        b=spec.b,
        order=order_cap,
        depth=depth,
        terms=tuple(chis),
        energies={k: v for k, v in energies.items() if v},
        base=(s0, s1),
    )


def _truncate_g_depth(p: GradedPoly, g_depth: int) -> GradedPoly:
    return GradedPoly(
        {k: c for k, c in p.terms.items() if k[1] >= -g_depth}, p.param
    )


def _exp_series(gen: GradedPoly, order: int, g_depth: int) -> GradedPoly:
    """exp(gen), valid when every term of gen lowers the g grade.

    Truncation to the (order, g_depth) window makes the series finite.
    """
    if any(gp >= 0 for (_, gp, _, _) in gen.terms):
        raise ValueError("exponential generator must carry negative g grades")
    acc = GradedPoly.const(1, gen.param)
    term = acc
    k = 0
    while term:
        k += 1
        term = _truncate_g_depth(term.mul(gen, order), g_depth) * Fraction(1, k)
        acc = acc + term
    return acc


def exp_to_poly(sol: SeriesSolution) -> SeriesSolution:
    """Fold exponent levels below the first into prefactor levels.

    exp(-(S2/g + S3/g^2 + ...)) is expanded and collected by total g depth.
    Only meaningful when the flow is harmonic, i.e. for deferred flavors;
    the mu flavor keeps coupling terms in S0 and must go through
    `normalize_grading` instead.
    """
    if sol.kind != "exp":
        raise ValueError("expected an exponent-level solution")
    if sol.flavor == "mu":
        raise ValueError("mu-flavor exponents do not fold level by level")
    depth = sol.depth
    gen = GradedPoly.zero(sol.flavor)
    for n in range(2, len(sol.terms)):
        gen = gen - sol.terms[n].shift(gp=-(n - 1))
    gen = _truncate_g_depth(gen.truncate_ep(sol.order), depth)
    folded = _exp_series(gen, sol.order, depth)
    chis = []
    for n in range(depth + 1):
        chis.append(
            GradedPoly(
                {(ep, 0, i, j): c for (ep, gp, i, j), c in folded.terms.items() if gp == -n},
                sol.flavor,
            )
        )
    return SeriesSolution(
        kind="poly",
        flavor=sol.flavor,
        b=sol.b,
        order=sol.order,
        depth=depth,
        terms=tuple(chis),
        energies=dict(sol.energies),
        base=(sol.terms[0], sol.terms[1]),
    )


@dataclass(frozen=True)
class NormalForm:
    """Window-truncated canonical prefactor plus energy slots.

    ``chi`` is the full state divided by the bare harmonic gaussian,
    expanded to parameter order ``ep_max`` and g depth ``g_depth`` in the
    ``flavor`` grading.  Two methods agree on the window exactly when their
    normal forms compare equal.
    """

    flavor: str
    b: Fraction
    ep_max: int
    g_depth: int
    chi: GradedPoly
    energies: dict[tuple[int, int], Fraction]


def _fold_levels(levels, top_gp: int, param: str | None) -> GradedPoly:
    """Attach each level's implicit g power: level n sits at g^(top_gp - n)."""
    acc = GradedPoly.zero(param)
    for n, lev in enumerate(levels):
        acc = acc + lev.shift(gp=top_gp - n)
    return acc


def _slice_level(p: GradedPoly, gp: int) -> GradedPoly:
    """Pull out one g slice, dropping the grade it implicitly carries."""
    return GradedPoly(
        {(ep, 0, i, j): c for (ep, g, i, j), c in p.terms.items() if g == gp},
        p.param,
    )


def _unit_head(p: GradedPoly) -> GradedPoly:
    q = p - GradedPoly.const(1, p.param)
    if any(ep == 0 for (ep, _, _, _) in q.terms):
        raise ValueError("series must start from 1 at parameter order zero")
    return q


def _exp_of(gen: GradedPoly, order: int) -> GradedPoly:
    """exp(gen) when every term of gen carries the coupling parameter."""
    if any(ep == 0 for (ep, _, _, _) in gen.terms):
        raise ValueError("exponential generator must carry the parameter")
    acc = GradedPoly.const(1, gen.param)
    term = acc
    k = 0
    while term:
        k += 1
        term = term.mul(gen, order) * Fraction(1, k)
        acc = acc + term
    return acc


def _series_inverse(p: GradedPoly, order: int) -> GradedPoly:
    """1/p for p = 1 + (parameter order >= 1 remainder)."""
    q = _unit_head(p)
    one = GradedPoly.const(1, p.param)
    acc = one
    pw = one
    while pw:
        pw = -pw.mul(q, order)
        acc = acc + pw
    return acc


def _series_log(p: GradedPoly, order: int) -> GradedPoly:
    """log p for p = 1 + (parameter order >= 1 remainder)."""
    q = _unit_head(p)
    acc = GradedPoly.zero(p.param)
    pw = GradedPoly.const(1, p.param)
    k = 0
    while pw:
        k += 1
        pw = pw.mul(q, order)
        acc = acc + pw * Fraction((-1) ** (k + 1), k)
    return acc


def normalize_grading(sol: SeriesSolution, target: str = "eps") -> SeriesSolution:
    """Re-express a solution in the grading of another coupling flavor.

    One eps unit of the coupling is worth g^2 mu units and one lambda unit
    is worth g mu units, so a flavor change moves every coefficient's g
    power by a multiple of its parameter order.  Levels carry implicit g
    powers (g^(1-n) for exponent levels, g^(-n) for prefactor levels), so
    moved terms migrate between levels: the levels are folded into a single
    total-grade object, regraded and sliced back into levels of the target
    convention.  Prefactor solutions additionally renormalize the
    exponent/prefactor split (exponent terms pushed below the harmonic
    levels are expanded into the prefactor and the prefactor is rescaled so
    its depth-zero slice stays 1), which makes the result agree level by
    level with a native run of the target flavor.

    The mu flavor keeps the coupling inside the classical flow and has no
    prefactor form, so prefactor solutions cannot be regraded to it.
    """
    if target not in _G_SHIFT:
        raise ValueError(f"unknown flavor {target!r}")
    if target == sol.flavor:
        return sol

    shift = _G_SHIFT[sol.flavor] - _G_SHIFT[target]
    energies: dict[tuple[int, int], Fraction] = {}
    for (gp, ep), c in sol.energies.items():
        key = (gp + shift * ep, ep)
        energies[key] = energies.get(key, Fraction(0)) + c
    energies = {k: v for k, v in energies.items() if v}

    if sol.kind == "exp":
        folded = _fold_levels(sol.terms, 1, sol.flavor).regrade(target)
        if any(gp > 1 for (_, gp, _, _) in folded.terms):
            raise ValueError("terms would land above the leading level")
        last = max((1 - gp for (_, gp, _, _) in folded.terms), default=1)
        last = max(last, 1)
        # exponent solutions store levels 0 .. depth+1
        depth = last - 1
        terms = tuple(_slice_level(folded, 1 - n) for n in range(last + 1))
        base: tuple[GradedPoly, ...] = ()
    else:
        if target == "mu":
            raise ValueError("the mu flavor has no prefactor form")
        exponent = _fold_levels(sol.base, 1, sol.flavor).regrade(target)
        if any(gp > 1 for (_, gp, _, _) in exponent.terms):
            raise ValueError("terms would land above the leading level")
        deep = GradedPoly(
            {k: c for k, c in exponent.terms.items() if k[1] < 0}, target
        )
        pf = _fold_levels(sol.terms, 0, sol.flavor).regrade(target)
        if any(gp > 0 for (_, gp, _, _) in pf.terms):
            raise ValueError("prefactor terms would land above depth zero")
        pf = pf.mul(_exp_of(-deep, sol.order), sol.order)
        head = _slice_level(pf, 0)
        s1 = _slice_level(exponent, 0) - _series_log(head, sol.order)
        pf = pf.mul(_series_inverse(head, sol.order), sol.order)
        depth = max((-gp for (_, gp, _, _) in pf.terms), default=0)
        terms = tuple(_slice_level(pf, -n) for n in range(depth + 1))
        base = (_slice_level(exponent, 1), s1)

    return SeriesSolution(
        kind=sol.kind,
        flavor=target,
        b=sol.b,
        order=sol.order,
        depth=depth,
        terms=terms,
        energies=energies,
        base=base,
    )


def canonical_window(
    sol: SeriesSolution,
    window: tuple[int, int] = DEFAULT_WINDOW,
) -> NormalForm:
    """Map a solution of either kind and any flavor onto the common window.

    The comparison frame is the two-shift (eps) grading: it is the only one
    that sinks every correction below the gaussian, which is what keeps the
    g-depth window finite.
    """
    target = "eps"
    ep_max, g_depth = window
    if sol.kind == "exp":
        s_levels = list(sol.terms)
        prefactor = GradedPoly.const(1, sol.flavor)
    else:
        s_levels = list(sol.base)
        prefactor = GradedPoly.zero(sol.flavor)
        for n, chi_n in enumerate(sol.terms):
            prefactor = prefactor + chi_n.shift(gp=-n)

    half = Fraction(1, 2)
    harmonic = GradedPoly({(0, 0, 2, 0): half, (0, 0, 0, 2): half * sol.b}, sol.flavor)
    gen = (s_levels[0] - harmonic).shift(gp=1)
    for n in range(1, len(s_levels)):
        gen = gen + s_levels[n].shift(gp=1 - n)

    gen = -gen.regrade(target).truncate_ep(ep_max)
    gen = _truncate_g_depth(gen, g_depth)
    chi = _exp_series(gen, ep_max, g_depth)
    chi = chi.mul(prefactor.regrade(target), ep_max)
    chi = _truncate_g_depth(chi, g_depth).truncate_ep(ep_max)

    shift = _G_SHIFT[sol.flavor] - _G_SHIFT[target]
    energies = {}
    for (gp, ep), c in sol.energies.items():
        key = (gp + shift * ep, ep)
        if ep <= ep_max and key[0] >= -g_depth:
            energies[key] = energies.get(key, Fraction(0)) + c
    return NormalForm(
        flavor=target,
        b=sol.b,
        ep_max=ep_max,
        g_depth=g_depth,
        chi=chi,
        energies={k: v for k, v in energies.items() if v},
    )


def normal_form_diff(left: NormalForm, right: NormalForm) -> list[str]:
    """Human-readable slot differences, empty when the forms agree."""
    diffs = []
    if left.b != right.b or left.flavor != right.flavor:
        diffs.append("incompatible comparison frames")
        return diffs
    slots = sorted(set(left.energies) | set(right.energies))
    for slot in slots:
        lv = left.energies.get(slot, Fraction(0))
        rv = right.energies.get(slot, Fraction(0))
        if lv != rv:
            diffs.append(f"energy slot g^{slot[0]} order {slot[1]}: {lv} != {rv}")
    keys = sorted(set(left.chi.terms) | set(right.chi.terms))
    for key in keys:
        lv = left.chi.terms.get(key, Fraction(0))
        rv = right.chi.terms.get(key, Fraction(0))
        if lv != rv:
            ep, gp, i, j = key
            diffs.append(
                f"prefactor term x^{i} y^{j} g^{gp} order {ep}: {lv} != {rv}"
            )
    return diffs
