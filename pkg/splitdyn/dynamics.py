"""
Orbits, preperiodic points and critical portraits of rational maps over Q,
and images of curves in P^1 x P^1 under split maps (f, g).

Exact questions (is a rational point preperiodic, is a critical orbit finite)
are answered with integer arithmetic and height certificates; the complex
enumerations are screened at a tolerance and never "decided".
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Poly, Rational, expand, factor_list, simplify, sqf_part, symbols
from sympy import roots as sympy_roots
from sympy import resultant as sympy_resultant

from .arith import (
    aberth,
    cauchy_radius,
    chordal_distance,
    eval_map,
    form_add,
    form_dx,
    form_dy,
    form_eval,
    form_mul,
    form_pow,
    form_roots,
    form_scale,
    iterate_forms,
    merge_close_roots,
    normalize_c,
    normalize_point,
    primitive_form,
    rational_roots,
    substitute,
    wronskian,
)
from .config import CLUSTER_RADIUS, DEFAULT_TOL, DEGREE_CAP, ITERATE_BIT_CAP, PCF_BUDGET, ROOT_MAX_ITER
from .heights import height_difference_bound, naive_height
from .types import (
    BinaryForm,
    CurveP1xP1,
    CurveVerdict,
    ExceptionalClass,
    OrbitRecord,
    ProjPointC,
    ProjPointQ,
    RationalMap,
    SpecialVerdict,
)
from .utils import BudgetExceeded, InvalidInput, NoConvergence

logger = logging.getLogger(__name__)

_X, _Y, _z = symbols("X Y z")
_x, _y = symbols("x y")
_u1, _u2, _v1, _v2 = symbols("u1 u2 v1 v2")

# Bidegree above which curve images are refused
CURVE_BIDEGREE_CAP = 64


# --- Rational orbits ---

def _count_bound(cutoff: float) -> int:
    # points of P^1(Q) with naive height <= cutoff
    H = math.ceil(math.exp(min(cutoff, 700.0)))
    return 2 * (H + 1) ** 2 + 2


def orbit(
    f: RationalMap,
    z: ProjPointQ,
    max_steps: int = 1000,
    height_cutoff: Optional[float] = None,
) -> OrbitRecord:
    """
    Exact forward orbit of a rational point.

    Args:
        f: map
        z: starting point
        max_steps: number of applications of f before giving up
        height_cutoff: naive height above which the orbit is declared escaping;
            defaults to height_difference_bound(f) + 1, which is sound

    Returns:
        OrbitRecord: with points[m + n] == points[m] when preperiodic
    """
    if max_steps < 1:
        raise InvalidInput("max_steps must be >= 1")
    if height_cutoff is None:
        height_cutoff = height_difference_bound(f) + 1
    points = [z]
    seen: Dict[ProjPointQ, int] = {z: 0}
    current = z
    for _ in range(max_steps):
        if naive_height(current) > height_cutoff:
            return OrbitRecord(points, len(points) - 1, None, "Escaping")
        current = eval_map(f, current)
        if current in seen:
            m = seen[current]
            points.append(current)
            return OrbitRecord(points, m, len(points) - 1 - m, "Preperiodic")
        seen[current] = len(points)
        points.append(current)
    if naive_height(current) > height_cutoff:
        return OrbitRecord(points, len(points) - 1, None, "Escaping")
    return OrbitRecord(points, len(points) - 1, None, "Budget")


def is_preperiodic_exact(f: RationalMap, z: ProjPointQ) -> bool:
    """Exact preperiodicity of a rational point; always terminates."""
    cutoff = height_difference_bound(f) + 1
    record = orbit(f, z, max_steps=_count_bound(cutoff), height_cutoff=cutoff)
    return record.verdict == "Preperiodic"


def is_preperiodic_split(maps: Sequence[RationalMap], points: Sequence[ProjPointQ]) -> bool:
    """A point of (P^1)^l is preperiodic for (f_1, ..., f_l) iff every coordinate is."""
    if len(maps) != len(points) or not maps:
        raise InvalidInput(f"Need equal nonempty lengths, got {len(maps)} maps and {len(points)} points")
    return all(is_preperiodic_exact(f, z) for f, z in zip(maps, points))


# --- Periodic and preperiodic points over C ---

def preperiodic_form(f: RationalMap, m: int, n: int, bit_cap: int = ITERATE_BIT_CAP) -> BinaryForm:
    """
    Primitive form Y_m X_(m+n) - X_m Y_(m+n) whose roots are the z with f^(m+n)(z) = f^m(z).
    Degree d^(m+n) + d^m; m = 0 gives the fixed-point form of f^n.
    """
    if m < 0 or n < 1:
        raise InvalidInput(f"Need m >= 0 and n >= 1, got m={m}, n={n}")
    Xm, Ym = iterate_forms(f, m, bit_cap=bit_cap)
    Xk, Yk = iterate_forms(f, m + n, bit_cap=bit_cap)
    phi = form_add(form_mul(Ym, Xk), form_scale(form_mul(Xm, Yk), -1))
    if phi.is_zero:
        raise InvalidInput(f"f^{m + n} = f^{m} identically")
    return primitive_form(phi)


def _partials(f: RationalMap) -> Tuple[BinaryForm, ...]:
    return form_dx(f.P), form_dy(f.P), form_dx(f.Q), form_dy(f.Q)


def _advance(f: RationalMap, partials, x, y, dx, dy):
    """One step of the lift with tangent vectors; all rescaled by the same max-norm."""
    Px, Py, Qx, Qy = partials
    X = form_eval(f.P, x, y)
    Y = form_eval(f.Q, x, y)
    a, b = form_eval(Px, x, y), form_eval(Py, x, y)
    c, e = form_eval(Qx, x, y), form_eval(Qy, x, y)
    s = np.maximum(np.abs(X), np.abs(Y))
    t = s
    if np.ndim(dx) > np.ndim(x):
        a, b, c, e, t = (np.asarray(v)[..., None] for v in (a, b, c, e, s))
    return X / s, Y / s, (a * dx + b * dy) / t, (c * dx + e * dy) / t


def _jets(f: RationalMap, z: np.ndarray, m: int, n: int):
    """States of (z, 1) with d/dz tangent after m and after m + n steps."""
    partials = _partials(f)
    x = np.asarray(z, dtype=complex)
    y = np.ones_like(x)
    dx = np.ones_like(x)
    dy = np.zeros_like(x)
    for _ in range(m):
        x, y, dx, dy = _advance(f, partials, x, y, dx, dy)
    first = (x, y, dx, dy)
    for _ in range(n):
        x, y, dx, dy = _advance(f, partials, x, y, dx, dy)
    return first, (x, y, dx, dy)


def _preperiodic_terms(f: RationalMap, m: int, n: int, zero_order: int):
    def terms(z):
        (xm, ym, dxm, dym), (xk, yk, dxk, dyk) = _jets(f, z, m, n)
        phi = ym * xk - xm * yk
        dphi = dym * xk + ym * dxk - dxm * yk - xm * dyk
        if zero_order:
            with np.errstate(divide="ignore", invalid="ignore"):
                dphi = dphi - zero_order * phi / z
        return phi, dphi

    return terms


def _check_degree(f: RationalMap, m: int, n: int, degree_cap: int):
    degree = f.degree ** (m + n) + f.degree ** m
    if degree > degree_cap:
        raise BudgetExceeded(f"Preperiodic form of degree {degree} exceeds cap {degree_cap}")


def _solve_preperiodic(
    f: RationalMap,
    m: int,
    n: int,
    tol: float,
    seed: int,
    degree_cap: int,
    bit_cap: int = ITERATE_BIT_CAP,
    max_iter: int = ROOT_MAX_ITER,
) -> List[ProjPointC]:
    _check_degree(f, m, n, degree_cap)
    phi = preperiodic_form(f, m, n, bit_cap)
    coeffs = phi.coefficients
    nz = [i for i, c in enumerate(coeffs) if c]
    k0, top = nz[0], nz[-1]
    count = top - k0
    finite = np.zeros(0, dtype=complex)
    if count:
        terms = _preperiodic_terms(f, m, n, k0)
        radius = cauchy_radius(list(coeffs[k0:top + 1]))
        for attempt in range(2):
            z = merge_close_roots(aberth(terms, count, radius, seed=seed + attempt, max_iter=max_iter))
            (xm, ym, _, _), (xk, yk, _, _) = _jets(f, z, m, n)
            resid = chordal_distance(np.stack([xm, ym], axis=-1), np.stack([xk, yk], axis=-1))
            if np.all(resid <= 10 * tol):
                finite = z
                break
            logger.debug("preperiodic roots (m=%d, n=%d) attempt %d: residual %.3e", m, n, attempt, resid.max())
        else:
            raise NoConvergence(f"Residual {resid.max():.3e} above {10 * tol:.1e} for f^{m + n} = f^{m}")
    points = [ProjPointC(0j, 1 + 0j)] * k0
    points.extend(normalize_c(r, 1.0) for r in finite)
    points.extend([ProjPointC(1 + 0j, 0j)] * (phi.degree - top))
    return points


def periodic_points(
    f: RationalMap,
    n: int,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    degree_cap: int = DEGREE_CAP,
    bit_cap: int = ITERATE_BIT_CAP,
    max_iter: int = ROOT_MAX_ITER,
) -> List[ProjPointC]:
    """
    All d^n + 1 solutions of f^n(z) = z in P^1(C), with multiplicity.

    The polynomial is never expanded in floating point: Newton corrections come
    from iterating f with a tangent vector, so high iterates stay well conditioned.
    """
    return _solve_preperiodic(f, 0, n, tol, seed, degree_cap, bit_cap, max_iter)


def _dedup(points: List[ProjPointC], radius: float) -> List[ProjPointC]:
    kept: List[ProjPointC] = []
    for p in points:
        if all(chordal_distance(p, q) > radius for q in kept):
            kept.append(p)
    return kept


def preperiodic_points(
    f: RationalMap,
    m: int,
    n: int,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    degree_cap: int = DEGREE_CAP,
    bit_cap: int = ITERATE_BIT_CAP,
    max_iter: int = ROOT_MAX_ITER,
) -> List[ProjPointC]:
    """Distinct z with f^(m+n)(z) = f^m(z), deduplicated in the chordal metric."""
    points = _solve_preperiodic(f, m, n, tol, seed, degree_cap, bit_cap, max_iter)
    return _dedup(points, max(tol, CLUSTER_RADIUS))


def rational_preperiodic_points(f: RationalMap, m: int, n: int, bit_cap: int = ITERATE_BIT_CAP) -> List[ProjPointQ]:
    """
    Exact rational solutions of f^(m+n)(z) = f^m(z), ascending, infinity last.
    Preperiodic points have naive height at most height_difference_bound(f), which
    bounds numerators and denominators in the search.
    """
    phi = preperiodic_form(f, m, n, bit_cap)
    limit = math.floor(math.exp(min(height_difference_bound(f), 700.0))) + 1
    coeffs = list(phi.coefficients)
    top = max(i for i, c in enumerate(coeffs) if c)
    points = []
    if top:
        roots = sorted(set(rational_roots(coeffs[:top + 1], height_bound=limit)))
        points = [normalize_point(r.numerator, r.denominator) for r in roots]
    if top < phi.degree:
        points.append(ProjPointQ(1, 0))
    return points


def multipliers(
    f: RationalMap,
    n: int,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    degree_cap: int = DEGREE_CAP,
) -> List[complex]:
    """
    Multipliers of f^n at its d^n + 1 fixed points (same order as periodic_points).

    With F^n(u) = c u, the multiplier is det D(F^n)(u) / (d^n c^2).
    """
    points = periodic_points(f, n, tol=tol, seed=seed, degree_cap=degree_cap)
    u = np.array([[p.x, p.y] for p in points], dtype=complex)
    u /= np.max(np.abs(u), axis=1, keepdims=True)
    partials = _partials(f)
    x, y = u[:, 0], u[:, 1]
    dx = np.tile(np.array([1, 0], dtype=complex), (len(u), 1))
    dy = np.tile(np.array([0, 1], dtype=complex), (len(u), 1))
    for _ in range(n):
        x, y, dx, dy = _advance(f, partials, x, y, dx, dy)
    det = dx[:, 0] * dy[:, 1] - dx[:, 1] * dy[:, 0]
    # c relative to the starting lift, in least squares
    c = (x * np.conj(u[:, 0]) + y * np.conj(u[:, 1])) / np.sum(np.abs(u) ** 2, axis=1)
    return [complex(v) for v in det / (f.degree ** n * c ** 2)]


def critical_points(f: RationalMap, tol: float = DEFAULT_TOL) -> List[ProjPointC]:
    """The 2d - 2 roots of the Wronskian with multiplicity."""
    return form_roots(wronskian(f), tol=tol)


# --- Exact forms ---

def _form_expr(F: BinaryForm, x, y):
    return sum(c * x ** i * y ** (F.degree - i) for i, c in enumerate(F.coefficients) if c)


def _expr_form(expr) -> BinaryForm:
    poly = Poly(expr, _X, _Y)
    degree = poly.total_degree()
    values = [Rational(poly.coeff_monomial(_X ** i * _Y ** (degree - i))) for i in range(degree + 1)]
    lcm = math.lcm(*(int(v.q) for v in values))
    return primitive_form(BinaryForm(degree, tuple(int(v * lcm) for v in values)))


def irreducible_factors(F: BinaryForm) -> List[Tuple[BinaryForm, int]]:
    """Factorization of a binary form over Q into primitive irreducible forms."""
    _, factors = factor_list(_form_expr(F, _X, _Y), _X, _Y)
    out = []
    for g, e in factors:
        form = _expr_form(g)
        if form.degree >= 1:
            out.append((form, int(e)))
    return out


def form_point(F: BinaryForm) -> ProjPointQ:
    """The rational root of a linear form c0 y + c1 x."""
    if F.degree != 1:
        raise InvalidInput(f"Form of degree {F.degree} has no single root")
    c0, c1 = F.coefficients
    return normalize_point(-c0, c1)


def image_form(f: RationalMap, psi: BinaryForm) -> BinaryForm:
    """
    Reduced form whose roots are the images under f of the roots of psi.

    Res_z(psi(z, 1), Y P(z, 1) - X Q(z, 1)) accounts for the finite roots; each root
    at infinity contributes the linear form vanishing at f(inf) = (p_d : q_d).
    """
    coeffs = psi.coefficients
    top = max(i for i, c in enumerate(coeffs) if c)
    p_d, q_d = f.P.coefficients[-1], f.Q.coefficients[-1]
    expr = (_Y * p_d - _X * q_d) ** (psi.degree - top)
    if top:
        graph = _Y * _form_expr(f.P, _z, 1) - _X * _form_expr(f.Q, _z, 1)
        expr = expr * sympy_resultant(_form_expr(psi, _z, 1), graph, _z)
    return _expr_form(sqf_part(expr.expand()))


def form_height_lower(F: BinaryForm) -> float:
    """
    Certified lower bound for the average Weil height of the roots of a primitive form:
    log M(F) / k with M(F) >= |c_i| / binom(k, i) for every coefficient.
    """
    k = F.degree
    return max(
        (math.log(abs(c)) - math.log(math.comb(k, i))) / k
        for i, c in enumerate(F.coefficients) if c
    )


def _bits(F: BinaryForm) -> int:
    return max(abs(c).bit_length() for c in F.coefficients)


@dataclass
class CriticalOrbit:
    factor: BinaryForm
    multiplicity: int
    status: Optional[bool]  # True: finite orbit, False: certified escape, None: budget
    forms: List[BinaryForm]
    tail: Optional[int] = None

    @property
    def postcritical(self) -> List[BinaryForm]:
        """Forms met by f^j of the critical factor for j >= 1."""
        out = list(self.forms[1:])
        if self.tail is not None and self.forms[self.tail] not in out:
            out.append(self.forms[self.tail])
        return out


def _follow(
    f: RationalMap,
    psi: BinaryForm,
    multiplicity: int,
    budget: int,
    cutoff: float,
    bit_cap: int,
) -> CriticalOrbit:
    forms = [psi]
    seen = {psi: 0}
    current = psi
    for _ in range(budget + 1):
        if form_height_lower(current) > cutoff:
            return CriticalOrbit(psi, multiplicity, False, forms)
        if _bits(current) > bit_cap:
            break
        current = image_form(f, current)
        if current in seen:
            return CriticalOrbit(psi, multiplicity, True, forms, seen[current])
        seen[current] = len(forms)
        forms.append(current)
    return CriticalOrbit(psi, multiplicity, None, forms)


def critical_orbits(
    f: RationalMap,
    budget: int = PCF_BUDGET,
    bit_cap: int = ITERATE_BIT_CAP,
) -> List[CriticalOrbit]:
    """Orbits of the Galois orbits of critical points, followed as minimal forms over Q."""
    cutoff = height_difference_bound(f) + 1
    return [_follow(f, psi, e, budget, cutoff, bit_cap) for psi, e in irreducible_factors(wronskian(f))]


PcfStatus = Union[bool, Literal["Unknown"]]


def is_pcf(f: RationalMap, budget: int = PCF_BUDGET, bit_cap: int = ITERATE_BIT_CAP) -> PcfStatus:
    """True if every critical orbit is finite, False if one certifiably escapes, "Unknown" otherwise."""
    statuses = [o.status for o in critical_orbits(f, budget, bit_cap)]
    if any(s is False for s in statuses):
        return False
    if all(s is True for s in statuses):
        return True
    return "Unknown"


# --- Exceptional points and classification ---

def _totally_invariant(f: RationalMap, q: BinaryForm) -> bool:
    """q(P, Q) is a constant multiple of q^d, i.e. the roots of q are their own full preimage."""
    image = substitute(q, f.P, f.Q)
    target = form_pow(q, f.degree)
    pivot = next(i for i, c in enumerate(target.coefficients) if c)
    a, b = image.coefficients[pivot], target.coefficients[pivot]
    if a == 0:
        return False
    return all(u * b == v * a for u, v in zip(image.coefficients, target.coefficients))


def exceptional_form(f: RationalMap) -> Optional[BinaryForm]:
    """
    Form of degree 1 or 2 cutting out the exceptional set, or None when it is empty.

    Exceptional points are critical of multiplicity d - 1, so candidates come from
    the Wronskian factors of that multiplicity.
    """
    candidates = [psi for psi, e in irreducible_factors(wronskian(f)) if e >= f.degree - 1 and psi.degree <= 2]
    linear = [psi for psi in candidates if psi.degree == 1]
    pairs = [psi for psi in candidates if psi.degree == 2]
    pairs += [form_mul(a, b) for a, b in combinations(linear, 2)]
    for q in pairs:
        if _totally_invariant(f, q):
            return primitive_form(q)
    for q in linear:
        if _totally_invariant(f, q):
            return q
    return None


def exceptional_points(f: RationalMap, tol: float = DEFAULT_TOL) -> List[ProjPointC]:
    E = exceptional_form(f)
    return [] if E is None else form_roots(E, tol=tol)


def describe_form(F: BinaryForm) -> str:
    if F.degree == 1:
        return str(form_point(F))
    return f"roots of {list(F.coefficients)}"


def classify_exceptional(f: RationalMap, budget: int = PCF_BUDGET, bit_cap: int = ITERATE_BIT_CAP) -> ExceptionalClass:
    """
    Classify f as conjugate to a power map, to +-Chebyshev, Lattes-like, or ordinary.

    Args:
        f: map
        budget: number of forward images allowed per critical orbit
        bit_cap: coefficient size at which a critical orbit is left unresolved

    Returns:
        ExceptionalClass: tag with an audit trail of evidence strings
    """
    evidence: List[str] = []
    E = exceptional_form(f)
    size = 0 if E is None else E.degree
    if size == 2:
        evidence.append(f"exceptional pair {describe_form(E)} is totally invariant")
        return ExceptionalClass("PowerConjugate", evidence)
    if E is not None:
        evidence.append(f"exceptional point {describe_form(E)}")

    orbits = critical_orbits(f, budget, bit_cap)
    for o in orbits:
        if o.status is False:
            evidence.append(
                f"critical orbit of {describe_form(o.factor)} escapes: height bound "
                f"{form_height_lower(o.forms[-1]):.6g} > {height_difference_bound(f) + 1:.6g}"
            )
            return ExceptionalClass("Ordinary", evidence)
    unknown = [o for o in orbits if o.status is None]
    if unknown:
        evidence.append(f"{len(unknown)} critical orbit(s) unresolved after {budget} steps")
        return ExceptionalClass("Unknown", evidence)

    evidence.append("postcritically finite")
    postcritical = {F for o in orbits for F in o.postcritical}
    post_size = sum(F.degree for F in postcritical)
    strict = all(o.tail >= 1 for o in orbits if o.factor != E)
    evidence.append(f"postcritical set has {post_size} point(s)")
    if size == 1:
        rest = post_size - (1 if E in postcritical else 0)
        if strict and rest == 2:
            evidence.append("finite critical points strictly preperiodic onto two points")
            return ExceptionalClass("ChebyshevConjugate", evidence)
    elif strict and post_size in (3, 4):
        evidence.append("every critical point strictly preperiodic")
        return ExceptionalClass("LattesLike", evidence)
    evidence.append("critical portrait matches no exceptional shape")
    return ExceptionalClass("Ordinary", evidence)


# --- Curves in P^1 x P^1 ---

def normalize_curve(C: CurveP1xP1) -> CurveP1xP1:
    """Content 1 and first nonzero coefficient (row-major) positive."""
    flat = [c for row in C.coefficients for c in row]
    g = math.gcd(*flat)
    if next(c for c in flat if c) < 0:
        g = -g
    rows = tuple(tuple(c // g for c in row) for row in C.coefficients)
    return CurveP1xP1(C.bidegree, rows, C.irreducible)


def curve_from_literal(literal: dict) -> CurveP1xP1:
    """Parse {"bidegree": [d1, d2], "coeffs": [[...], ...]}; coeffs[i][j] multiplies x^i y^j."""
    try:
        d1, d2 = (int(v) for v in literal["bidegree"])
        rows = [[Fraction(str(c)) for c in row] for row in literal["coeffs"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidInput(f"Error parsing curve literal: {e}")
    lcm = math.lcm(*(c.denominator for row in rows for c in row))
    try:
        C = CurveP1xP1((d1, d2), tuple(tuple(int(c * lcm) for c in row) for row in rows))
    except ValueError as e:
        raise InvalidInput(f"Error parsing curve literal: {e}")
    return normalize_curve(C)


def curve_to_literal(C: CurveP1xP1) -> dict:
    return {"bidegree": list(C.bidegree), "coeffs": [list(row) for row in C.coefficients]}


def diagonal() -> CurveP1xP1:
    return normalize_curve(CurveP1xP1((1, 1), ((0, -1), (1, 0))))


def curve_eval(C: CurveP1xP1, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Bihomogeneous value at lifts u = (x1, x2), v = (y1, y2), arrays of shape (..., 2)."""
    d1, d2 = C.bidegree
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    total = np.zeros(np.broadcast(u[..., 0], v[..., 0]).shape, dtype=complex)
    for i, row in enumerate(C.coefficients):
        a = u[..., 0] ** i * u[..., 1] ** (d1 - i)
        for j, c in enumerate(row):
            if c:
                total = total + c * a * v[..., 0] ** j * v[..., 1] ** (d2 - j)
    return total


def _curve_expr(C: CurveP1xP1):
    return sum(c * _x ** i * _y ** j for i, row in enumerate(C.coefficients) for j, c in enumerate(row) if c)


def _curve_from_expr(expr) -> CurveP1xP1:
    poly = Poly(expr, _X, _Y)
    d1, d2 = poly.degree(_X), poly.degree(_Y)
    values = [[Rational(poly.coeff_monomial(_X ** i * _Y ** j)) for j in range(d2 + 1)] for i in range(d1 + 1)]
    lcm = math.lcm(*(int(v.q) for row in values for v in row))
    rows = tuple(tuple(int(v * lcm) for v in row) for row in values)
    return normalize_curve(CurveP1xP1((d1, d2), rows))


def curve_image(
    C: CurveP1xP1,
    f: RationalMap,
    g: RationalMap,
    bidegree_cap: int = CURVE_BIDEGREE_CAP,
) -> CurveP1xP1:
    """
    Reduced equation of (f, g)(C), by eliminating x and y from the graph equations.

    Raises:
        BudgetExceeded: if the image bidegree could pass bidegree_cap
    """
    d1, d2 = C.bidegree
    if max(f.degree * d1, g.degree * d2) > bidegree_cap:
        raise BudgetExceeded(f"Image of bidegree {C.bidegree} curve may exceed cap {bidegree_cap}")
    if d2 == 0:
        psi = image_form(f, BinaryForm(d1, tuple(row[0] for row in C.coefficients)))
        return normalize_curve(CurveP1xP1((psi.degree, 0), tuple((c,) for c in psi.coefficients)))
    if d1 == 0:
        psi = image_form(g, BinaryForm(d2, tuple(C.coefficients[0])))
        return normalize_curve(CurveP1xP1((0, psi.degree), (tuple(psi.coefficients),)))
    first = sympy_resultant(_curve_expr(C), _form_expr(f.P, _x, 1) - _X * _form_expr(f.Q, _x, 1), _x)
    second = sympy_resultant(first, _form_expr(g.P, _y, 1) - _Y * _form_expr(g.Q, _y, 1), _y)
    _, factors = factor_list(second.expand(), _X, _Y)
    # factors in one variable only come from the affine chart, not from the image
    kept = [h for h, _ in factors if Poly(h, _X, _Y).degree(_X) > 0 and Poly(h, _X, _Y).degree(_Y) > 0]
    if not kept:
        raise InvalidInput("Curve image has no component dominating both factors")
    expr = 1
    for h in kept:
        expr = expr * h
    return _curve_from_expr(expr.expand())


def curve_preperiodic_test(
    C: CurveP1xP1,
    f: RationalMap,
    g: RationalMap,
    max_iters: int = 4,
    bidegree_cap: int = CURVE_BIDEGREE_CAP,
) -> CurveVerdict:
    """Iterate curve_image and report the first exact repetition C_(m+n) = C_m."""
    curves = [normalize_curve(C)]
    seen = {curves[0].coefficients: 0}
    current = curves[0]
    for k in range(1, max_iters + 1):
        current = curve_image(current, f, g, bidegree_cap)
        m = seen.get(current.coefficients)
        if m is not None and curves[m].bidegree == current.bidegree:
            return CurveVerdict("Preperiodic", m, k - m)
        seen[current.coefficients] = k
        curves.append(current)
        logger.debug("curve iterate %d has bidegree %s", k, current.bidegree)
    return CurveVerdict("NoRepetition")


def _exceptional_pair_roots(E: BinaryForm) -> List[Tuple]:
    """The two roots of a degree-2 exceptional form as exact (x, y) pairs, possibly irrational."""
    c0, c1, c2 = E.coefficients
    if c2 == 0:
        return [(1, 0), (-Rational(c0), Rational(c1))]
    return [(r, 1) for r in sympy_roots(_form_expr(E, _z, 1), _z, multiple=True)]


def _to_zero_infinity(E: BinaryForm, u1, u2) -> Tuple:
    """(x, y) in coordinates (u1 : u2) that send the first root of E to u = 0 and the second to u = inf."""
    (a1, b1), (a2, b2) = _exceptional_pair_roots(E)
    return -a2 * u1 + a1 * u2, -b2 * u1 + b1 * u2


def _torus_coset(C: CurveP1xP1, f: RationalMap, g: RationalMap) -> bool:
    """
    True when both maps have an exceptional pair and C is a monomial curve
    x^a = c y^b or x^a y^b = c (c != 0) once both pairs are moved to {0, inf}.
    """
    E, F = exceptional_form(f), exceptional_form(g)
    if E is None or F is None or E.degree != 2 or F.degree != 2:
        return False
    d1, d2 = C.bidegree
    x1, x2 = _to_zero_infinity(E, _u1, _u2)
    y1, y2 = _to_zero_infinity(F, _v1, _v2)
    expr = sum(
        c * x1 ** i * x2 ** (d1 - i) * y1 ** j * y2 ** (d2 - j)
        for i, row in enumerate(C.coefficients)
        for j, c in enumerate(row)
        if c
    )
    poly = Poly(expand(expr), _u1, _u2, _v1, _v2)
    terms = [monom for monom, c in poly.terms() if simplify(c) != 0]
    if len(terms) != 2:
        return False
    (i1, _, j1, _), (i2, _, j2, _) = terms
    return i1 != i2 and j1 != j2


def special_reason(
    C: CurveP1xP1,
    f: RationalMap,
    g: RationalMap,
    budget: int = 4,
) -> Optional[str]:
    """Reason C is weakly special for (f, g) when one of the exact checks proves it, else None."""
    if 0 in C.bidegree:
        return f"projection not dominant (bidegree {C.bidegree})"
    try:
        verdict = curve_preperiodic_test(C, f, g, max_iters=budget)
    except BudgetExceeded as e:
        logger.debug("curve preperiodicity test skipped: %s", e)
        verdict = CurveVerdict("NoRepetition")
    if verdict.tag == "Preperiodic":
        return f"curve preperiodic with m={verdict.m}, n={verdict.n}"
    if _torus_coset(C, f, g):
        return "both maps have an exceptional pair and C is a torus coset after moving the pairs to {0, inf}"
    return None


def weakly_special_screen(
    C: CurveP1xP1,
    f: RationalMap,
    g: RationalMap,
    budget: int = 4,
    depth: int = 20,
    width: int = 2000,
    seed: int = 0,
) -> SpecialVerdict:
    """
    Screen a curve for being weakly special under (f, g).

    Special when an exact check proves it; NotSpecialEvidence when the pulled-back
    maximal-entropy measures are separated by the energy test; Unknown otherwise
    (always for pairs of Lattes-like maps).
    """
    from .measures import measure_equality_test

    reason = special_reason(C, f, g, budget)
    if reason is not None:
        return SpecialVerdict("Special", [reason])
    tags = (classify_exceptional(f, budget).tag, classify_exceptional(g, budget).tag)
    evidence = [f"classes {tags[0]}, {tags[1]}"]
    if tags == ("LattesLike", "LattesLike"):
        evidence.append("no finite coset test for Lattes pairs")
        return SpecialVerdict("Unknown", evidence)
    decision = measure_equality_test(f, g, C, depth=depth, width=width, seed=seed)
    evidence.append(f"energy {decision.statistic:.6g} (se {decision.se:.3g}): {decision.decision}")
    if decision.decision == "NotEqual":
        return SpecialVerdict("NotSpecialEvidence", evidence)
    return SpecialVerdict("Unknown", evidence)


__all__ = [
    'orbit',
    'is_preperiodic_exact',
    'is_preperiodic_split',
    'preperiodic_form',
    'periodic_points',
    'preperiodic_points',
    'rational_preperiodic_points',
    'multipliers',
    'critical_points',
    'irreducible_factors',
    'image_form',
    'form_height_lower',
    'CriticalOrbit',
    'critical_orbits',
    'PcfStatus',
    'is_pcf',
    'exceptional_form',
    'exceptional_points',
    'classify_exceptional',
    'normalize_curve',
    'curve_from_literal',
    'curve_to_literal',
    'diagonal',
    'curve_eval',
    'curve_image',
    'curve_preperiodic_test',
    'special_reason',
    'weakly_special_screen',
]
