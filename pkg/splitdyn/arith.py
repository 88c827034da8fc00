"""
Exact arithmetic on P^1(Q), binary forms and their resultants, and the
simultaneous-iteration root finders every other module builds on.

Forms store coefficients[i] for x^i y^(d-i), so the list doubles as the
ascending coefficient list of the dehomogenized polynomial in z = x/y.
"""
import logging
import math
from fractions import Fraction
from functools import reduce
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Matrix, Poly, divisors, symbols

from .config import CLUSTER_RADIUS, DEFAULT_TOL, ITERATE_BIT_CAP, ROOT_MAX_ITER
from .types import BinaryForm, ProjPointC, ProjPointQ, RationalMap
from .utils import BudgetExceeded, DegenerateMap, InvalidInput, NoConvergence

logger = logging.getLogger(__name__)

INFINITY = ProjPointQ(1, 0)
ZERO = ProjPointQ(0, 1)

# Above this Sylvester size the determinant is taken through a subresultant PRS
_BAREISS_MAX_SIZE = 24


# --- Points ---

def normalize_point(x: int, y: int) -> ProjPointQ:
    """Reduce (x:y) to gcd 1 with y > 0; infinity is (1:0)."""
    x, y = int(x), int(y)
    if x == 0 and y == 0:
        raise InvalidInput("(0:0) is not a point of P^1")
    if y == 0:
        return INFINITY
    if y < 0:
        x, y = -x, -y
    g = math.gcd(x, y)
    return ProjPointQ(x // g, y // g)


def point_from_fraction(value: Union[Fraction, int, str]) -> ProjPointQ:
    value = Fraction(value)
    return normalize_point(value.numerator, value.denominator)


def parse_point(text: str) -> ProjPointQ:
    """Parse "3/2", "-7", "inf" or "[x:y]" into a normalized rational point."""
    s = text.strip()
    if s.lower() in ("inf", "infinity", "oo"):
        return INFINITY
    if s.startswith("[") and s.endswith("]") and ":" in s:
        x, y = s[1:-1].split(":")
        return normalize_point(int(x), int(y))
    try:
        return point_from_fraction(Fraction(s))
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidInput(f"Error parsing point {text!r}: {e}")


def normalize_c(x: complex, y: complex) -> ProjPointC:
    """Rescale a complex lift so that max(|x|, |y|) lies in [1/2, 2]."""
    x, y = complex(x), complex(y)
    s = max(abs(x), abs(y))
    if s == 0:
        raise InvalidInput("(0:0) is not a point of P^1")
    if s < 0.5 or s > 2.0:
        x, y = x / s, y / s
    return ProjPointC(x, y)


def point_c(z: Union[complex, ProjPointQ, ProjPointC]) -> ProjPointC:
    if isinstance(z, ProjPointC):
        return normalize_c(z.x, z.y)
    if isinstance(z, ProjPointQ):
        if z.y == 0:
            return ProjPointC(1.0, 0.0)
        return normalize_c(z.x / z.y, 1.0)
    z = complex(z)
    if math.isinf(abs(z)):
        return ProjPointC(1.0, 0.0)
    return normalize_c(z, 1.0)


def chordal_distance(z, w):
    """Chordal distance on P^1(C); accepts ProjPointC or homogeneous (..., 2) arrays."""
    if isinstance(z, ProjPointC):
        z = np.array([z.x, z.y])
    if isinstance(w, ProjPointC):
        w = np.array([w.x, w.y])
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = np.abs(z[..., 0] * w[..., 1] - z[..., 1] * w[..., 0])
    den = np.linalg.norm(z, axis=-1) * np.linalg.norm(w, axis=-1)
    return num / den


def affine_chordal(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Chordal distance between finite affine coordinates."""
    return np.abs(z - w) / np.sqrt((1 + np.abs(z) ** 2) * (1 + np.abs(w) ** 2))


# --- Binary forms ---

def make_form(coefficients: Sequence[int], degree: Optional[int] = None) -> BinaryForm:
    coeffs = [int(c) for c in coefficients]
    if degree is None:
        degree = len(coeffs) - 1
    if len(coeffs) < degree + 1:
        coeffs = coeffs + [0] * (degree + 1 - len(coeffs))
    elif len(coeffs) > degree + 1:
        if any(coeffs[degree + 1:]):
            raise InvalidInput(f"Form has terms above stated degree {degree}")
        coeffs = coeffs[:degree + 1]
    return BinaryForm(degree, tuple(coeffs))


def content(*forms: BinaryForm) -> int:
    return reduce(math.gcd, (abs(c) for F in forms for c in F.coefficients), 0)


def primitive_form(F: BinaryForm) -> BinaryForm:
    """Divide by the content and make the first nonzero coefficient positive."""
    g = content(F)
    if g == 0:
        return F
    lead = next(c for c in F.coefficients if c != 0)
    if lead < 0:
        g = -g
    return BinaryForm(F.degree, tuple(c // g for c in F.coefficients))


def form_add(A: BinaryForm, B: BinaryForm) -> BinaryForm:
    if A.degree != B.degree:
        raise ValueError(f"Cannot add forms of degree {A.degree} and {B.degree}")
    return BinaryForm(A.degree, tuple(a + b for a, b in zip(A.coefficients, B.coefficients)))


def form_scale(A: BinaryForm, c: int) -> BinaryForm:
    return BinaryForm(A.degree, tuple(c * a for a in A.coefficients))


def form_mul(A: BinaryForm, B: BinaryForm) -> BinaryForm:
    out = [0] * (A.degree + B.degree + 1)
    for i, a in enumerate(A.coefficients):
        if a == 0:
            continue
        for j, b in enumerate(B.coefficients):
            if b:
                out[i + j] += a * b
    return BinaryForm(A.degree + B.degree, tuple(out))


def form_pow(A: BinaryForm, k: int) -> BinaryForm:
    result = BinaryForm(0, (1,))
    base = A
    while k:
        if k & 1:
            result = form_mul(result, base)
        k >>= 1
        if k:
            base = form_mul(base, base)
    return result


def substitute(F: BinaryForm, A: BinaryForm, B: BinaryForm) -> BinaryForm:
    """F(A, B) for forms A, B of equal degree."""
    if A.degree != B.degree:
        raise ValueError("Substituted forms must share a degree")
    e = A.degree
    apow = [BinaryForm(0, (1,))]
    bpow = [BinaryForm(0, (1,))]
    for _ in range(F.degree):
        apow.append(form_mul(apow[-1], A))
        bpow.append(form_mul(bpow[-1], B))
    total = BinaryForm(F.degree * e, (0,) * (F.degree * e + 1))
    for i, c in enumerate(F.coefficients):
        if c:
            total = form_add(total, form_scale(form_mul(apow[i], bpow[F.degree - i]), c))
    return total


def form_dx(F: BinaryForm) -> BinaryForm:
    if F.degree == 0:
        return BinaryForm(0, (0,))
    return BinaryForm(F.degree - 1, tuple(i * F.coefficients[i] for i in range(1, F.degree + 1)))


def form_dy(F: BinaryForm) -> BinaryForm:
    if F.degree == 0:
        return BinaryForm(0, (0,))
    d = F.degree
    return BinaryForm(d - 1, tuple((d - i) * F.coefficients[i] for i in range(d)))


def wronskian(f: RationalMap) -> BinaryForm:
    """P_x Q_y - P_y Q_x, a form of degree 2d - 2 vanishing at the critical points."""
    a = form_mul(form_dx(f.P), form_dy(f.Q))
    b = form_mul(form_dy(f.P), form_dx(f.Q))
    return form_add(a, form_scale(b, -1))


def form_eval(F: BinaryForm, x, y):
    """Homogeneous Horner evaluation; works for ints, Fractions, complex and numpy arrays."""
    coeffs = F.coefficients
    r = coeffs[-1] + 0 * x
    ypow = 1
    for c in reversed(coeffs[:-1]):
        ypow = ypow * y
        r = r * x + c * ypow
    return r


def form_to_floats(F: BinaryForm) -> np.ndarray:
    """Coefficients scaled by the largest magnitude so that huge integers fit in doubles."""
    big = max((abs(c) for c in F.coefficients), default=0)
    if big == 0:
        return np.zeros(F.degree + 1)
    return np.array([float(Fraction(c, big)) for c in F.coefficients])


# --- Resultants ---

def sylvester_matrix(p: Sequence, q: Sequence) -> list:
    """
    Sylvester matrix of two forms given as ascending coefficient lists, P-rows first,
    rows written in descending powers of x. Entries may be any ring elements.
    """
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    pd = list(reversed(p))
    qd = list(reversed(q))
    rows = []
    for k in range(n):
        rows.append([0] * k + pd + [0] * (size - m - 1 - k))
    for k in range(m):
        rows.append([0] * k + qd + [0] * (size - n - 1 - k))
    return rows


def _resultant_bareiss(P: BinaryForm, Q: BinaryForm) -> int:
    return int(Matrix(sylvester_matrix(P.coefficients, Q.coefficients)).det(method="bareiss"))


def _resultant_prs(P: BinaryForm, Q: BinaryForm) -> int:
    # y -> y + k x preserves the homogeneous resultant and makes both x^d coefficients nonzero
    z = symbols("z")
    d = P.degree
    for k in range(0, 4 * d + 4):
        shear_x = BinaryForm(1, (0, 1))
        shear_y = BinaryForm(1, (1, k))
        Ps = substitute(P, shear_x, shear_y)
        Qs = substitute(Q, shear_x, shear_y)
        if Ps.coefficients[-1] and Qs.coefficients[-1]:
            a = Poly(list(reversed(Ps.coefficients)), z)
            b = Poly(list(reversed(Qs.coefficients)), z)
            return int(a.resultant(b))
    return _resultant_bareiss(P, Q)


def resultant(P: BinaryForm, Q: BinaryForm) -> int:
    """
    Homogeneous resultant Res(P, Q) of two forms of equal degree.

    Defined as the Sylvester determinant with P-rows first; the sign is part of the
    contract so cached values stay bit-stable across modules.
    """
    if P.degree != Q.degree:
        raise ValueError(f"Forms must share a degree, got {P.degree} and {Q.degree}")
    if 2 * P.degree <= _BAREISS_MAX_SIZE:
        return _resultant_bareiss(P, Q)
    return _resultant_prs(P, Q)


# --- Maps ---

def normalize_lift(P: BinaryForm, Q: BinaryForm) -> RationalMap:
    """
    Build the joint-content-1 integral lift of z -> P/Q.

    Raises:
        DegenerateMap: if the degrees differ, d < 2 or Res(P, Q) = 0
    """
    if P.degree != Q.degree:
        raise DegenerateMap(f"Numerator degree {P.degree} differs from denominator degree {Q.degree}")
    d = P.degree
    if d < 2:
        raise DegenerateMap(f"Degree {d} map is not a dynamical endomorphism")
    g = content(P, Q)
    if g == 0:
        raise DegenerateMap("Zero lift")
    if g > 1:
        P = BinaryForm(d, tuple(c // g for c in P.coefficients))
        Q = BinaryForm(d, tuple(c // g for c in Q.coefficients))
    res = resultant(P, Q)
    if res == 0:
        raise DegenerateMap(f"Res(P, Q) = 0 for P={list(P.coefficients)}, Q={list(Q.coefficients)}")
    return RationalMap(d, P, Q, res)


def make_map(num: Sequence, den: Sequence) -> RationalMap:
    """Map from ascending z-coefficients of numerator and denominator (rationals allowed)."""
    values = [Fraction(c) for c in num] + [Fraction(c) for c in den]
    d = max(len(num), len(den)) - 1
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in values), 1)
    p = [int(Fraction(c) * lcm) for c in num] + [0] * (d + 1 - len(num))
    q = [int(Fraction(c) * lcm) for c in den] + [0] * (d + 1 - len(den))
    return normalize_lift(BinaryForm(d, tuple(p)), BinaryForm(d, tuple(q)))


def map_from_literal(literal: dict) -> RationalMap:
    """Parse {"num": [...], "den": [...]} (ascending powers of z, ints or decimal strings)."""
    try:
        num = [Fraction(str(c)) for c in literal["num"]]
        den = [Fraction(str(c)) for c in literal["den"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidInput(f"Error parsing map literal: {e}")
    if not num or not den:
        raise InvalidInput("Map literal needs non-empty num and den")
    return make_map(num, den)


def map_to_literal(f: RationalMap) -> dict:
    return {"num": list(f.P.coefficients), "den": list(f.Q.coefficients)}


def eval_map(f: RationalMap, z: ProjPointQ) -> ProjPointQ:
    return normalize_point(form_eval(f.P, z.x, z.y), form_eval(f.Q, z.x, z.y))


def eval_map_c(f: RationalMap, z: ProjPointC) -> ProjPointC:
    x = form_eval(f.P, z.x, z.y)
    y = form_eval(f.Q, z.x, z.y)
    return normalize_c(x, y)


def eval_map_array(f: RationalMap, u: np.ndarray) -> np.ndarray:
    """Apply f to homogeneous points of shape (..., 2); output rescaled to max-norm 1."""
    x = form_eval(f.P, u[..., 0], u[..., 1])
    y = form_eval(f.Q, u[..., 0], u[..., 1])
    out = np.stack([x, y], axis=-1)
    s = np.max(np.abs(out), axis=-1, keepdims=True)
    return out / s


def _check_bits(*forms: BinaryForm, cap: int):
    bits = max((abs(c).bit_length() for F in forms for c in F.coefficients), default=0)
    if bits > cap:
        raise BudgetExceeded(f"Coefficient size {bits} bits exceeds cap {cap}")


def compose_forms(f: RationalMap, g: RationalMap) -> Tuple[BinaryForm, BinaryForm]:
    """Raw lift (P_f(P_g, Q_g), Q_f(P_g, Q_g)) of f o g, content not removed."""
    return substitute(f.P, g.P, g.Q), substitute(f.Q, g.P, g.Q)


def compose(f: RationalMap, g: RationalMap, bit_cap: int = ITERATE_BIT_CAP) -> RationalMap:
    """Normalized lift of f o g (degree d_f * d_g)."""
    P, Q = compose_forms(f, g)
    _check_bits(P, Q, cap=bit_cap)
    return normalize_lift(P, Q)


def iterate_forms(f: RationalMap, n: int, bit_cap: int = ITERATE_BIT_CAP) -> Tuple[BinaryForm, BinaryForm]:
    """Content-free lift of f^n without computing its resultant; n = 0 gives (x, y)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    P, Q = BinaryForm(1, (0, 1)), BinaryForm(1, (1, 0))
    for _ in range(n):
        P, Q = substitute(f.P, P, Q), substitute(f.Q, P, Q)
        g = content(P, Q)
        if g > 1:
            P = BinaryForm(P.degree, tuple(c // g for c in P.coefficients))
            Q = BinaryForm(Q.degree, tuple(c // g for c in Q.coefficients))
        _check_bits(P, Q, cap=bit_cap)
    return P, Q


def iterate(f: RationalMap, n: int, bit_cap: int = ITERATE_BIT_CAP) -> RationalMap:
    if n < 1:
        raise ValueError("iterate needs n >= 1")
    if n == 1:
        return f
    P, Q = iterate_forms(f, n, bit_cap=bit_cap)
    return normalize_lift(P, Q)


# --- Complex root finding ---

def _log_abs(c) -> float:
    if isinstance(c, int):
        return math.log(abs(c)) if c else -math.inf
    a = abs(complex(c))
    return math.log(a) if a > 0 else -math.inf


def cauchy_radius(coeffs: Sequence) -> float:
    """
    Cauchy bound: the positive root of |a_n| r^n = sum_{i<n} |a_i| r^i.
    Computed in log space so coefficients far outside double range are fine.
    """
    n = len(coeffs) - 1
    logs = np.array([_log_abs(c) for c in coeffs])
    lead = logs[n]
    rel = logs[:n] - lead
    if np.all(np.isneginf(rel)):
        return 1.0
    powers = np.arange(n)

    def excess(s: float) -> float:
        return float(np.logaddexp.reduce(rel + powers * s) - n * s)

    hi = float(np.logaddexp(0.0, np.max(rel)))
    lo = hi - 200.0
    if excess(lo) <= 0:
        return math.exp(lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return math.exp(hi)


def aberth(
    newton_terms: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    n: int,
    radius: float,
    seed: int = 0,
    max_iter: int = ROOT_MAX_ITER,
) -> np.ndarray:
    """
    Simultaneous Aberth iteration for n roots.

    newton_terms(z) returns (p, dp), any common rescaling of p(z) and p'(z).
    Initial guesses sit on a seeded perturbed circle of the given radius.
    """
    if n == 0:
        return np.zeros(0, dtype=complex)
    rng = np.random.default_rng(seed)
    k = np.arange(n)
    angles = 2 * np.pi * k / n + rng.uniform(0, 2 * np.pi) + rng.uniform(-0.25, 0.25, n) * 2 * np.pi / n
    radii = radius * (1.0 - 0.1 * rng.uniform(0, 1, n))
    z = radii * np.exp(1j * angles)
    active = np.ones(n, dtype=bool)
    eps = 4 * np.finfo(float).eps
    for _ in range(max_iter):
        p, dp = newton_terms(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = p / (dp - p * s)
        w = np.where(p == 0, 0.0, w)
        bad = ~np.isfinite(w)
        if bad.any():
            w[bad] = 1e-3 * (1 + np.abs(z[bad])) * np.exp(1j * rng.uniform(0, 2 * np.pi, bad.sum()))
        w[~active] = 0.0
        z = z - w
        active &= np.abs(w) > eps * np.maximum(1.0, np.abs(z))
        if not active.any():
            break
    return z


def merge_close_roots(z: np.ndarray, radius: float = CLUSTER_RADIUS) -> np.ndarray:
    """Replace each cluster of nearby approximations (a multiple root) by its centroid."""
    z = np.array(z, dtype=complex)
    n = len(z)
    assigned = np.zeros(n, dtype=bool)
    for i in range(n):
        if assigned[i]:
            continue
        members = (~assigned) & (affine_chordal(z, z[i]) <= radius)
        members[i] = True
        z[members] = z[members].mean()
        assigned |= members
    return z


def _horner_terms(a: np.ndarray):
    desc = a[::-1]
    ddesc = (a[1:] * np.arange(1, len(a)))[::-1]

    def terms(z):
        return np.polyval(desc, z), np.polyval(ddesc, z)

    return terms


def poly_roots_complex(
    coeffs: Sequence[complex],
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    max_iter: int = ROOT_MAX_ITER,
) -> List[complex]:
    """
    All roots (with multiplicity) of sum coeffs[i] z^i.

    Raises:
        InvalidInput: for the zero polynomial or a constant
        NoConvergence: if some residual stays above tol * scale
    """
    a = np.array([complex(c) for c in coeffs])
    nz = np.nonzero(a)[0]
    if len(nz) == 0:
        raise InvalidInput("Zero polynomial has no root set")
    a = a[:nz[-1] + 1]
    if len(a) < 2:
        raise InvalidInput("Polynomial must have degree >= 1")
    k0 = int(nz[0])
    core = a[k0:] / a[-1]
    n = len(core) - 1
    z = aberth(_horner_terms(core), n, cauchy_radius(list(core)), seed=seed, max_iter=max_iter)
    z = merge_close_roots(z)
    scale = np.polyval(np.abs(core)[::-1], np.abs(z))
    resid = np.abs(np.polyval(core[::-1], z))
    if n and np.any(resid > tol * scale):
        raise NoConvergence(f"Root finder residual {resid.max():.3e} above tolerance after {max_iter} iterations")
    roots = [0j] * k0 + [complex(r) for r in z]
    logger.debug("poly_roots_complex: degree %d, max residual %.3e", len(a) - 1, resid.max() if n else 0.0)
    return roots


def form_roots(
    F: BinaryForm, tol: float = DEFAULT_TOL, seed: int = 0, max_iter: int = ROOT_MAX_ITER
) -> List[ProjPointC]:
    """Projective roots of a binary form with multiplicity; infinity counted by the degree drop."""
    if F.is_zero:
        raise InvalidInput("Zero form has no root set")
    coeffs = F.coefficients
    nz = [i for i, c in enumerate(coeffs) if c]
    top, k0 = nz[-1], nz[0]
    points = [ProjPointC(0j, 1 + 0j)] * k0
    if top > k0:
        scaled = form_to_floats(BinaryForm(top - k0, tuple(coeffs[k0:top + 1])))
        for r in poly_roots_complex(list(scaled), tol=tol, seed=seed, max_iter=max_iter):
            points.append(normalize_c(r, 1.0))
    points.extend([ProjPointC(1 + 0j, 0j)] * (F.degree - top))
    return points


def poly_roots_batch(a: np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = ROOT_MAX_ITER) -> np.ndarray:
    """
    Vectorized Aberth iteration for many polynomials of the same degree.
    a has shape (N, n + 1), ascending, with nonzero leading column.

    Rows whose relative residual stays above tol are solved again one by one with
    poly_roots_complex.

    Raises:
        NoConvergence: if such a row still fails
    """
    a = np.asarray(a, dtype=complex)
    N, n = a.shape[0], a.shape[1] - 1
    a = a / a[:, -1:]
    if n == 1:
        return -a[:, :1]
    radius = 1.0 + np.max(np.abs(a[:, :-1]), axis=1)
    rng = np.random.default_rng(0)
    angles = 2 * np.pi * np.arange(n) / n + 0.4 + rng.uniform(-0.2, 0.2, n) * 2 * np.pi / n
    z = radius[:, None] * np.exp(1j * angles)[None, :]
    eye = np.eye(n, dtype=bool)
    da = a[:, 1:] * np.arange(1, n + 1)
    eps = 4 * np.finfo(float).eps
    for _ in range(max_iter):
        p = a[:, n:n + 1] * np.ones_like(z)
        for i in range(n - 1, -1, -1):
            p = p * z + a[:, i:i + 1]
        dp = da[:, n - 1:n] * np.ones_like(z)
        for i in range(n - 2, -1, -1):
            dp = dp * z + da[:, i:i + 1]
        diff = z[:, :, None] - z[:, None, :]
        diff[:, eye] = 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            inv[:, eye] = 0.0
            w = p / (dp - p * inv.sum(axis=2))
        w = np.where(p == 0, 0.0, w)
        w = np.where(np.isfinite(w), w, 1e-6)
        z = z - w
        if np.all(np.abs(w) <= eps * np.maximum(1.0, np.abs(z))):
            break
    scale = np.abs(a[:, n:n + 1]) * np.ones_like(z, dtype=float)
    value = a[:, n:n + 1] * np.ones_like(z)
    for i in range(n - 1, -1, -1):
        value = value * z + a[:, i:i + 1]
    for i in range(n, 0, -1):
        scale = scale * np.abs(z) + np.abs(a[:, i - 1:i])
    failed = np.nonzero(np.any(np.abs(value) > tol * scale, axis=1))[0]
    for row in failed:
        logger.debug("poly_roots_batch: row %d unconverged after %d iterations, solving alone", row, max_iter)
        z[row] = np.array(poly_roots_complex(a[row], tol=tol, max_iter=max_iter))
    return z


def _row_roots(row: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    # single form with roots at both 0 and infinity
    n = len(row) - 1
    nz = np.nonzero(row)[0]
    if len(nz) == 0:
        raise NoConvergence("Fiber form vanishes identically")
    k0, top = int(nz[0]), int(nz[-1])
    out = np.zeros((n, 2), dtype=complex)
    out[:k0] = (0, 1)
    if top > k0:
        z = poly_roots_batch(row[None, k0:top + 1], tol, max_iter)[0]
        out[k0:top, 0] = z
        out[k0:top, 1] = 1.0
    out[top:] = (1, 0)
    return out


def form_roots_batch(c: np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = ROOT_MAX_ITER) -> np.ndarray:
    """
    Roots of many binary forms c[:, i] x^i y^(n-i) as homogeneous points, shape (N, n, 2).
    Each row is solved in the affine chart where its outer coefficient dominates.
    """
    c = np.asarray(c, dtype=complex)
    N, n = c.shape[0], c.shape[1] - 1
    out = np.empty((N, n, 2), dtype=complex)
    degenerate = (c[:, -1] == 0) & (c[:, 0] == 0)
    for i in np.nonzero(degenerate)[0]:
        out[i] = _row_roots(c[i], tol, max_iter)
    use_y = (np.abs(c[:, -1]) >= np.abs(c[:, 0])) & ~degenerate
    not_y = ~use_y & ~degenerate
    if use_y.any():
        z = poly_roots_batch(c[use_y], tol, max_iter)
        out[use_y, :, 0] = z
        out[use_y, :, 1] = 1.0
    if not_y.any():
        w = poly_roots_batch(c[not_y][:, ::-1], tol, max_iter)
        out[not_y, :, 0] = 1.0
        out[not_y, :, 1] = w
    out /= np.max(np.abs(out), axis=2, keepdims=True)
    return out


# --- Exact rational roots ---

def _primitive_integer_model(coeffs: Sequence[Fraction]) -> List[int]:
    values = [Fraction(c) for c in coeffs]
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in values), 1)
    ints = [int(v * lcm) for v in values]
    g = reduce(math.gcd, (abs(v) for v in ints), 0)
    return [v // g for v in ints] if g else ints


def _is_root(a: List[int], p: int, q: int) -> bool:
    n = len(a) - 1
    return sum(c * p ** i * q ** (n - i) for i, c in enumerate(a)) == 0


def _deflate(a: List[Fraction], r: Fraction) -> List[Fraction]:
    # synthetic division by (z - r), ascending coefficients
    n = len(a) - 1
    out = [Fraction(0)] * n
    carry = Fraction(0)
    for i in range(n, 0, -1):
        carry = a[i] + carry * r
        out[i - 1] = carry
    return out


def _divisors_up_to(n: int, limit: Optional[int]) -> List[int]:
    if limit is None or limit > 10 ** 6:
        return list(divisors(n))
    return [k for k in range(1, min(n, limit) + 1) if n % k == 0]


def rational_roots(coeffs: Sequence[Union[Fraction, int]], height_bound: Optional[int] = None) -> List[Fraction]:
    """
    All rational roots with multiplicity (ascending), by the rational root theorem.

    With height_bound only roots p/q with |p|, q <= height_bound are searched, by trial
    division, so huge constant terms never need factoring.
    """
    a = [Fraction(c) for c in coeffs]
    while a and a[-1] == 0:
        a.pop()
    if not a:
        raise InvalidInput("Zero polynomial has no root set")
    roots: List[Fraction] = []
    while len(a) > 1 and a[0] == 0:
        roots.append(Fraction(0))
        a = a[1:]
    while len(a) > 1:
        model = _primitive_integer_model(a)
        a0, an = model[0], model[-1]
        radius = 1 + max(Fraction(abs(c), abs(an)) for c in model[:-1])
        found = None
        for q in _divisors_up_to(abs(an), height_bound):
            for p in _divisors_up_to(abs(a0), height_bound):
                if Fraction(p, q) > radius:
                    break
                for sp in (p, -p):
                    if math.gcd(p, q) == 1 and _is_root(model, sp, q):
                        found = Fraction(sp, q)
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        a = _deflate(a, found)
    return sorted(roots)


__all__ = [
    'INFINITY',
    'ZERO',
    'normalize_point',
    'point_from_fraction',
    'parse_point',
    'normalize_c',
    'point_c',
    'chordal_distance',
    'make_form',
    'primitive_form',
    'substitute',
    'wronskian',
    'form_eval',
    'resultant',
    'sylvester_matrix',
    'normalize_lift',
    'make_map',
    'map_from_literal',
    'map_to_literal',
    'eval_map',
    'eval_map_c',
    'compose',
    'iterate',
    'iterate_forms',
    'cauchy_radius',
    'aberth',
    'poly_roots_complex',
    'form_roots',
    'form_roots_batch',
    'rational_roots',
]
