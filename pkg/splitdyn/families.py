"""
One-parameter families of maps and map pairs over Q(t): specialization, bad
parameters, isotriviality, small points on fiber curves, the unicritical
common-preperiodic scan and the fitting of height lower bounds along sections.
"""
import logging
import math
from fractions import Fraction
from functools import reduce
from typing import Callable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import ZZ, Integer, Matrix, Poly, cancel, diff, expand, symbols
from sympy import resultant as sympy_resultant

from .arith import (
    INFINITY,
    chordal_distance,
    form_roots,
    form_roots_batch,
    make_map,
    normalize_c,
    normalize_point,
    point_from_fraction,
    rational_roots,
    poly_roots_complex,
    sylvester_matrix,
)
from .config import DEFAULT_TOL
from .dynamics import (
    curve_preperiodic_test,
    diagonal,
    form_point,
    irreducible_factors,
    multipliers,
    preperiodic_form,
    special_reason,
)
from .heights import arch_constants, canonical_height, canonical_height_split, green_arch_array, iterations_for, naive_height
from .measures import arakelov_zhang_estimate, fiber_coefficients
from .scan_executor import ScanExecutor
from .types import (
    BadParameters,
    BinaryForm,
    CurveP1xP1,
    DkyCell,
    DkyTable,
    HeightFit,
    ParamFamily,
    ProjPointC,
    ProjPointQ,
    RationalMap,
    SmallPoint,
    SmallPointsReport,
)
from .utils import BudgetExceeded, DegenerateFiber, DegenerateMap, InvalidInput, SpecialCurve, SplitDynError

logger = logging.getLogger(__name__)

_t, _z, _L = symbols("t z L")

Isotriviality = Literal["Isotrivial", "NonIsotrivial", "Unknown"]

# error share of the archimedean surrogate in small-point searches
SURROGATE_ERROR = 1e-9
# chordal radius under which two candidate points are the same point
POINT_MATCH_RADIUS = 1e-6
# slack in counting violations of a fitted lower bound
FIT_SLACK = 1e-12


# --- Construction ---

def _t_expr(coeffs: Sequence[int]):
    return sum((int(c) * _t ** k for k, c in enumerate(coeffs)), Integer(0))


def _t_poly(coeffs: Sequence[int]) -> Poly:
    return Poly(_t_expr(coeffs), _t, domain=ZZ)


def _poly_coeffs(poly: Poly) -> List[int]:
    return [int(c) for c in reversed(poly.all_coeffs())]


def _resultant_poly(num: List[List[int]], den: List[List[int]]) -> List[int]:
    rows = sylvester_matrix([_t_expr(c) for c in num], [_t_expr(c) for c in den])
    det = Matrix(rows).det(method="bareiss")
    return _poly_coeffs(Poly(expand(det), _t, domain=ZZ))


def make_family(
    num: Sequence[Sequence[int]],
    den: Sequence[Sequence[int]],
    second: Optional[ParamFamily] = None,
) -> ParamFamily:
    """
    Family z -> sum_i num[i](t) z^i / sum_i den[i](t) z^i with integer polynomials in t.

    The coefficient polynomials are divided by their joint gcd in Z[t].

    Raises:
        InvalidInput: if the generic degree is below 2 or Res(t) vanishes identically
    """
    if not num or not den:
        raise InvalidInput("Family needs non-empty num and den")
    d = max(len(num), len(den)) - 1
    if d < 2:
        raise InvalidInput(f"Family of degree {d} is not a family of endomorphisms")
    rows = [list(c) for c in num] + [[0]] * (d + 1 - len(num))
    rows += [list(c) for c in den] + [[0]] * (d + 1 - len(den))
    polys = [_t_poly(c) for c in rows]
    nonzero = [p for p in polys if not p.is_zero]
    if not nonzero:
        raise InvalidInput("Zero family")
    g = reduce(lambda a, b: a.gcd(b), nonzero)
    if g.degree() > 0 or abs(g.LC()) > 1:
        polys = [p.exquo(g) for p in polys]
    coeffs = [_poly_coeffs(p) for p in polys]
    num_c, den_c = coeffs[:d + 1], coeffs[d + 1:]
    res = _resultant_poly(num_c, den_c)
    if not any(res):
        raise InvalidInput("Generic fiber is not a morphism: Res(t) vanishes identically")
    return ParamFamily(d, num_c, den_c, res, second)


def family_from_literal(literal: dict) -> ParamFamily:
    """
    Parse {"num": [[...], ...], "den": [[...], ...], "second": {...}}: num[i] holds the
    ascending t-coefficients multiplying z^i; "second" makes a pair family.
    """
    try:
        num = [[Fraction(str(c)) for c in row] for row in literal["num"]]
        den = [[Fraction(str(c)) for c in row] for row in literal["den"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidInput(f"Error parsing family literal: {e}")
    values = [c for row in num + den for c in row]
    lcm = math.lcm(*(c.denominator for c in values)) if values else 1
    num_i = [[int(c * lcm) for c in row] for row in num]
    den_i = [[int(c * lcm) for c in row] for row in den]
    second = literal.get("second")
    return make_family(num_i, den_i, family_from_literal(second) if second else None)


def family_to_literal(F: ParamFamily) -> dict:
    literal = {"num": [list(c) for c in F.num_coeffs], "den": [list(c) for c in F.den_coeffs]}
    if F.second is not None:
        literal["second"] = family_to_literal(F.second)
    return literal


def unicritical_family() -> ParamFamily:
    """z^2 + t"""
    return make_family([[0, 1], [0], [1]], [[1]])


def _members(F: ParamFamily) -> List[ParamFamily]:
    return [F] if F.second is None else [F, F.second]


def _is_constant(F: ParamFamily) -> bool:
    return all(not any(row[1:]) for row in F.num_coeffs + F.den_coeffs)


# --- Specialization ---

def _eval_t(coeffs: Sequence[int], t: Fraction) -> Fraction:
    value = Fraction(0)
    for c in reversed(coeffs):
        value = value * t + c
    return value


def _specialize_one(F: ParamFamily, t: Fraction) -> RationalMap:
    if _eval_t(F.resultant_poly, t) == 0:
        raise DegenerateFiber(t, f"Res({t}) = 0: fiber is not a degree {F.degree} morphism")
    num = [_eval_t(c, t) for c in F.num_coeffs]
    den = [_eval_t(c, t) for c in F.den_coeffs]
    try:
        return make_map(num, den)
    except DegenerateMap as e:
        raise DegenerateFiber(t, f"Degenerate fiber at t={t}: {e}")


def specialize(
    F: ParamFamily,
    t: Union[Fraction, int, str],
) -> Union[RationalMap, Tuple[RationalMap, RationalMap]]:
    """
    The fiber at a rational parameter, exactly; a pair for pair families.

    Raises:
        DegenerateFiber: if t is a bad parameter
    """
    t = Fraction(t)
    f = _specialize_one(F, t)
    if F.second is None:
        return f
    return f, _specialize_one(F.second, t)


def bad_parameters(F: ParamFamily, tol: float = DEFAULT_TOL) -> BadParameters:
    """Roots of Res(t) (of both members for a pair): exact rational ones and all complex ones."""
    rational = set()
    roots: List[complex] = []
    for member in _members(F):
        res = list(member.resultant_poly)
        while len(res) > 1 and res[-1] == 0:
            res.pop()
        if len(res) < 2:
            continue
        rational.update(rational_roots(res))
        for r in poly_roots_complex(res, tol=tol):
            if all(abs(r - s) > 1e-9 * max(1.0, abs(s)) for s in roots):
                roots.append(r)
    roots.sort(key=lambda z: (z.real, z.imag))
    return BadParameters(sorted(rational), roots)


# --- Isotriviality ---

def _affine_exprs(F: ParamFamily):
    P = sum((_t_expr(c) * _z ** i for i, c in enumerate(F.num_coeffs)), Integer(0))
    Q = sum((_t_expr(c) * _z ** i for i, c in enumerate(F.den_coeffs)), Integer(0))
    return expand(P), expand(Q)


def quadratic_moduli(F: ParamFamily):
    """
    Symmetric functions (sigma_1(t), sigma_2(t)) of the fixed-point multipliers of a
    quadratic family, as rational functions of t; None when they cannot be formed.

    When infinity is fixed generically the family is first conjugated by z -> 1/(z - k)
    for an integer k that is not a generic fixed point, so all three fixed points are finite.
    """
    if F.degree != 2:
        raise InvalidInput(f"Quadratic moduli need degree 2, got {F.degree}")
    P, Q = _affine_exprs(F)
    fixed = expand(_z * Q - P)
    if Poly(fixed, _z).degree() < 3:
        k = next((k for k in range(16) if expand(fixed.subs(_z, k)) != 0), None)
        if k is None:
            return None
        Pk, Qk = P.subs(_z, k + 1 / _z), Q.subs(_z, k + 1 / _z)
        P, Q = expand(cancel(_z ** 2 * Qk)), expand(cancel(_z ** 2 * (Pk - k * Qk)))
        fixed = expand(_z * Q - P)
        if Poly(fixed, _z).degree() < 3:
            return None
    wronsk = expand(diff(P, _z) * Q - P * diff(Q, _z))
    res = sympy_resultant(fixed, Q ** 2 * _L - wronsk, _z)
    coeffs = Poly(expand(res), _L).all_coeffs()
    if len(coeffs) != 4:
        return None
    a3, a2, a1 = coeffs[0], coeffs[1], coeffs[2]
    return cancel(-a2 / a3), cancel(a1 / a3)


def _spectrum_signature(f: RationalMap, n: int, tol: float) -> np.ndarray:
    # elementary symmetric functions, insensitive to the root order
    return np.poly(np.array(multipliers(f, n, tol=tol)))


def _sampled_isotriviality(
    F: ParamFamily,
    samples: Sequence[Fraction],
    periods: Sequence[int],
    tol: float,
) -> Isotriviality:
    fibers = []
    for t in samples:
        try:
            fibers.append(_specialize_one(F, Fraction(t)))
        except DegenerateFiber:
            logger.debug("isotriviality sample t=%s is a bad parameter", t)
    if len(fibers) < 2:
        return "Unknown"
    for n in periods:
        reference = _spectrum_signature(fibers[0], n, tol)
        for f in fibers[1:]:
            if not np.allclose(_spectrum_signature(f, n, tol), reference, rtol=1e-6, atol=1e-6):
                return "NonIsotrivial"
    return "Unknown"


def _member_isotriviality(
    F: ParamFamily,
    samples: Sequence[Fraction],
    periods: Sequence[int],
    tol: float,
) -> Isotriviality:
    if _is_constant(F):
        return "Isotrivial"
    if F.degree == 2:
        moduli = quadratic_moduli(F)
        if moduli is not None:
            if any(_t in expr.free_symbols for expr in moduli):
                return "NonIsotrivial"
            return "Isotrivial"
        logger.debug("quadratic moduli unavailable, falling back to sampled spectra")
    return _sampled_isotriviality(F, samples, periods, tol)


def isotrivial_check(
    F: ParamFamily,
    samples: Sequence[Union[Fraction, int]] = (1, 2, 3, 5, 7),
    periods: Sequence[int] = (1, 2, 3),
    tol: float = DEFAULT_TOL,
) -> Isotriviality:
    """
    Decide whether the fibers are all conjugate over Qbar(t).

    Quadratic families are decided exactly from the fixed-point multiplier invariants,
    which determine the conjugacy class. Higher degrees compare multiplier spectra of
    the listed periods at the sample parameters: a difference proves NonIsotrivial,
    agreement only gives Unknown. A pair is Isotrivial when both members are.
    """
    verdicts = [_member_isotriviality(member, samples, periods, tol) for member in _members(F)]
    if "NonIsotrivial" in verdicts:
        return "NonIsotrivial"
    if all(v == "Isotrivial" for v in verdicts):
        return "Isotrivial"
    return "Unknown"


# --- Small points on curves ---

def _affine_lifts(points: Sequence[ProjPointC]) -> np.ndarray:
    return np.array(
        [[1.0, 0.0] if abs(p.y) <= 1e-15 * abs(p.x) else [p.x / p.y, 1.0] for p in points],
        dtype=complex,
    )


def _preperiodic_groups(f: RationalMap, budget: Tuple[int, int]) -> List[BinaryForm]:
    """Irreducible factors over Q of the preperiodicity forms with (m, n) within budget."""
    max_m, max_n = budget
    groups: List[BinaryForm] = []
    seen = set()
    for m in range(max_m + 1):
        for n in range(1, max_n + 1):
            for psi, _ in irreducible_factors(preperiodic_form(f, m, n)):
                if psi.coefficients not in seen:
                    seen.add(psi.coefficients)
                    groups.append(psi)
    return groups


def _exact_fiber(C: CurveP1xP1, q: ProjPointQ, which: int) -> List[int]:
    d1, d2 = C.bidegree
    if which == 1:
        return [sum(C.coefficients[i][j] * q.x ** i * q.y ** (d1 - i) for i in range(d1 + 1)) for j in range(d2 + 1)]
    return [sum(C.coefficients[i][j] * q.x ** j * q.y ** (d2 - j) for j in range(d2 + 1)) for i in range(d1 + 1)]


def _rational_fiber_points(coeffs: List[int]) -> List[ProjPointQ]:
    if not any(coeffs):
        return []
    top = max(i for i, c in enumerate(coeffs) if c)
    points = []
    if top:
        points = [normalize_point(r.numerator, r.denominator) for r in sorted(set(rational_roots(coeffs[:top + 1])))]
    if top < len(coeffs) - 1:
        points.append(INFINITY)
    return points


def _side_points(
    maps: Tuple[RationalMap, RationalMap],
    C: CurveP1xP1,
    which: int,
    budget: Tuple[int, int],
    tol: float,
) -> List[SmallPoint]:
    """
    Points of C over the preperiodic points of maps[which - 1] on factor `which`.

    The base coordinate has canonical height 0; the other coordinate gets the Galois
    average of the archimedean surrogate over all points above the same irreducible
    factor, or a certified canonical height when both coordinates are rational.
    """
    base_map, other_map = maps[which - 1], maps[2 - which]
    c_minus, c_plus = arch_constants(other_map)
    iters = iterations_for(max(abs(c_minus), abs(c_plus)), other_map.degree, SURROGATE_ERROR, 10 ** 4)
    found: List[SmallPoint] = []
    for psi in _preperiodic_groups(base_map, budget):
        bases = form_roots(psi, tol=tol)
        u = np.array([[p.x, p.y] for p in bases], dtype=complex)
        u /= np.max(np.abs(u), axis=1, keepdims=True)
        fibers = fiber_coefficients(C, u, which)
        keep = np.max(np.abs(fibers), axis=1) > 1e-12
        if not keep.any():
            continue
        roots = form_roots_batch(fibers[keep], tol)
        pairs = [
            (bases[i], normalize_c(r[0], r[1]))
            for i, row in zip(np.nonzero(keep)[0], roots)
            for r in row
        ]
        values = green_arch_array(other_map, _affine_lifts([o for _, o in pairs]), iters)
        group_height = float(np.mean(values))
        certified = {}
        if psi.degree == 1:
            q = form_point(psi)
            for r in _rational_fiber_points(_exact_fiber(C, q, which)):
                coords = (q, r) if which == 1 else (r, q)
                est = canonical_height_split(list(maps), list(coords))
                certified[r] = (normalize_c(complex(r.x), complex(r.y)), est.value)
        for base, other in pairs:
            height, numeric = group_height, True
            for rc, value in certified.values():
                if chordal_distance(other, rc) < POINT_MATCH_RADIUS:
                    height, numeric = value, False
                    break
            x, y = (base, other) if which == 1 else (other, base)
            found.append(SmallPoint(x, y, height, numeric))
    return found


def _prefer(a: SmallPoint, b: SmallPoint) -> SmallPoint:
    if a.numeric != b.numeric:
        return b if a.numeric else a
    return a if a.height >= b.height else b


def _merge_points(points: Sequence[SmallPoint]) -> List[SmallPoint]:
    merged: List[SmallPoint] = []
    for p in points:
        for i, q in enumerate(merged):
            if chordal_distance(p.x, q.x) < POINT_MATCH_RADIUS and chordal_distance(p.y, q.y) < POINT_MATCH_RADIUS:
                merged[i] = _prefer(q, p)
                break
        else:
            merged.append(p)
    return merged


def small_points(
    f: RationalMap,
    g: RationalMap,
    C: CurveP1xP1,
    eps: float,
    budget: Tuple[int, int] = (2, 3),
    tol: float = DEFAULT_TOL,
    special_budget: int = 2,
) -> SmallPointsReport:
    """
    Count candidate points of C with h_f(x) + h_g(y) < eps.

    Candidates lie over the preperiodic points of f (with (m, n) within budget) and,
    symmetrically, of g. A point found from both sides keeps the certified height if
    it has one, else the larger surrogate.

    Raises:
        SpecialCurve: if an exact check proves C weakly special for (f, g)
    """
    if eps <= 0:
        raise InvalidInput(f"eps must be positive, got {eps}")
    reason = special_reason(C, f, g, special_budget)
    if reason is not None:
        raise SpecialCurve(f"Small points are Zariski dense: {reason}")
    found = _side_points((f, g), C, 1, budget, tol) + _side_points((f, g), C, 2, budget, tol)
    merged = _merge_points(found)
    small = sorted((p for p in merged if p.height < eps), key=lambda p: p.height)
    empirical_min = min((p.height for p in merged), default=math.inf)
    logger.debug("small_points: %d candidates, %d below %g", len(merged), len(small), eps)
    return SmallPointsReport(len(small), small, empirical_min, len(merged))


def fiber_small_points(
    F: ParamFamily,
    C: CurveP1xP1,
    t: Union[Fraction, int, str],
    eps: float,
    budget: Tuple[int, int] = (2, 3),
    tol: float = DEFAULT_TOL,
) -> SmallPointsReport:
    """
    small_points for the fiber pair of a pair family at t.

    Raises:
        InvalidInput: if F is not a pair family
        DegenerateFiber: if t is a bad parameter
        SpecialCurve: if C is weakly special for the fiber pair
    """
    if not F.is_pair:
        raise InvalidInput("Small points on curves need a pair family")
    f, g = specialize(F, t)
    return small_points(f, g, C, eps, budget, tol)


# --- Unicritical common preperiodic points ---

def unicritical_pair(t1: Union[Fraction, int, str], t2: Union[Fraction, int, str]) -> Tuple[RationalMap, RationalMap]:
    return make_map([Fraction(t1), 0, 1], [1]), make_map([Fraction(t2), 0, 1], [1])


def dky_cell(
    t1: Union[Fraction, int, str],
    t2: Union[Fraction, int, str],
    eps: float = 0.01,
    budget: Tuple[int, int] = (2, 3),
    C: Optional[CurveP1xP1] = None,
) -> DkyCell:
    """Small-point count of (z^2 + t1, z^2 + t2) on C (the diagonal by default)."""
    f, g = unicritical_pair(t1, t2)
    report = small_points(f, g, C if C is not None else diagonal(), eps, budget)
    return DkyCell(Fraction(t1), Fraction(t2), report.count, report.empirical_min)


def dky_scan(
    t1_values: Sequence[Union[Fraction, int, str]],
    t2_values: Sequence[Union[Fraction, int, str]],
    eps: float = 0.01,
    budget: Tuple[int, int] = (2, 3),
    C: Optional[CurveP1xP1] = None,
    threads: int = 1,
    logger: Union[logging.Logger, bool] = True,
) -> DkyTable:
    """
    Scan a grid of unicritical pairs for common small points.

    Cells come back in row-major grid order whatever the thread count. Pairs with
    t1 == t2, and pairs for which C is proven weakly special, are listed as rejected.
    """
    grid = [(Fraction(a), Fraction(b)) for a in t1_values for b in t2_values]
    rejected = [p for p in grid if p[0] == p[1]]
    todo = [p for p in grid if p[0] != p[1]]

    def run(pair: Tuple[Fraction, Fraction]) -> Optional[DkyCell]:
        try:
            return dky_cell(pair[0], pair[1], eps, budget, C)
        except SpecialCurve:
            return None

    try:
        results = ScanExecutor(threads, logger=logger).map(run, todo)
    except SplitDynError:
        raise
    except Exception as e:
        raise SplitDynError(f"Error scanning DKY grid: {e}") from e
    cells = []
    for pair, cell in zip(todo, results):
        if cell is None:
            rejected.append(pair)
        else:
            cells.append(cell)
    return DkyTable(cells, rejected)


# --- Heights along sections ---

Section = Union[Sequence[int], Callable[[Fraction], Union[Fraction, int]]]


def _section_value(section: Section, t: Fraction) -> Fraction:
    if callable(section):
        return Fraction(section(t))
    return _eval_t(section, t)


def _lower_hull(points: Sequence[Tuple[float, float]]) -> List[Tuple[float, float]]:
    lowest = {}
    for x, y in points:
        if x not in lowest or y < lowest[x]:
            lowest[x] = y
    hull: List[Tuple[float, float]] = []
    for p in sorted(lowest.items()):
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) > 0:
                break
            hull.pop()
        hull.append(p)
    return hull


def _tail_slope(points: Sequence[Tuple[float, float]]) -> float:
    ordered = sorted(points)
    tail = ordered[len(ordered) // 2:]
    xs = np.array([p[0] for p in tail])
    if len(tail) < 2 or np.ptp(xs) == 0:
        return 0.0
    return float(np.polyfit(xs, np.array([p[1] for p in tail]), 1)[0])


def fit_height_inequality(
    F: ParamFamily,
    section: Section,
    t_grid: Sequence[Union[Fraction, int, str]],
    target_error: float = 1e-6,
) -> HeightFit:
    """
    Fit h_hat_(f_t)(P(t)) >= c1 h(t) - c2 along a section P over a parameter grid.

    c1 is the slope of the last edge of the lower convex hull of the samples (h(t), h_hat)
    and c2 the intercept that makes that edge's line touch the hull, so no sample lies
    below the fitted line. Bad parameters are skipped and reported.
    """
    support: List[Tuple[float, float]] = []
    skipped: List[Fraction] = []
    for t in t_grid:
        t = Fraction(t)
        try:
            fiber = specialize(F, t)
        except DegenerateFiber:
            skipped.append(t)
            continue
        point = point_from_fraction(_section_value(section, t))
        if isinstance(fiber, tuple):
            estimate = canonical_height_split(list(fiber), [point, point], target_error)
        else:
            estimate = canonical_height(fiber, point, target_error)
        support.append((naive_height(point_from_fraction(t)), estimate.value))
    if not support:
        raise InvalidInput("No good parameter in the grid")
    hull = _lower_hull(support)
    if len(hull) >= 2:
        (x0, y0), (x1, y1) = hull[-2], hull[-1]
        c1 = (y1 - y0) / (x1 - x0)
    else:
        c1 = 0.0
    c2 = c1 * hull[-1][0] - hull[-1][1]
    violations = sum(1 for x, y in support if y < c1 * x - c2 - FIT_SLACK)
    flags = []
    if isotrivial_check(F) == "Isotrivial":
        flags.append("Isotrivial")
    fit = HeightFit(c1, c2, support, violations, _tail_slope(support), skipped, flags)
    logger.debug("fit_height_inequality: c1=%.6g c2=%.6g slope=%.6g", fit.c1, fit.c2, fit.slope)
    return fit


def empty_small_set_threshold(fit: HeightFit, c4: float) -> Optional[float]:
    """
    c3 >= 1 such that h(t) > c3 forces h_hat_(f_t)(P(t)) > c4 max(h(t), 1) under the fit;
    None when c1 <= c4.
    """
    if fit.c1 <= c4:
        return None
    return max(1.0, fit.c2 / (fit.c1 - c4))


# --- Parameter scans ---

def preperiodic_curve_parameters(
    F: ParamFamily,
    C: CurveP1xP1,
    t_values: Sequence[Union[Fraction, int, str]],
    max_iters: int = 4,
) -> List[Fraction]:
    """Parameters whose fiber pair maps C to a curve it has already visited."""
    if not F.is_pair:
        raise InvalidInput("Curve preperiodicity needs a pair family")
    found = []
    for t in t_values:
        t = Fraction(t)
        try:
            f, g = specialize(F, t)
            verdict = curve_preperiodic_test(C, f, g, max_iters)
        except (DegenerateFiber, BudgetExceeded) as e:
            logger.debug("t=%s skipped: %s", t, e)
            continue
        if verdict.tag == "Preperiodic":
            found.append(t)
    return found


def small_curve_scan(
    F: ParamFamily,
    t_values: Sequence[Union[Fraction, int, str]],
    n: int = 4,
    eps: float = 0.01,
    target_error: float = 1e-6,
) -> List[Tuple[Fraction, float]]:
    """Parameters whose fiber pair has Arakelov-Zhang surrogate below eps, with the value."""
    if not F.is_pair:
        raise InvalidInput("Arakelov-Zhang scans need a pair family")
    small = []
    for t in t_values:
        t = Fraction(t)
        try:
            f, g = specialize(F, t)
        except DegenerateFiber:
            continue
        value = arakelov_zhang_estimate(f, g, n, target_error).value
        if value < eps:
            small.append((t, value))
    return small


__all__ = [
    'make_family',
    'family_from_literal',
    'family_to_literal',
    'unicritical_family',
    'specialize',
    'bad_parameters',
    'quadratic_moduli',
    'isotrivial_check',
    'small_points',
    'fiber_small_points',
    'unicritical_pair',
    'dky_cell',
    'dky_scan',
    'fit_height_inequality',
    'empty_small_set_threshold',
    'preperiodic_curve_parameters',
    'small_curve_scan',
]
