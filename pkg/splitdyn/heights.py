"""
Certified local Green functions and Call-Silverman canonical heights over Q.

Every estimate carries a radius: for a place v with constants c-/c+ bounding
log||F(u)|| - d log||u||, truncating the escape rate after n steps is off by
at most max(|c-|, |c+|) / (d^n (d - 1)).
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple, Union

import mpmath
import numpy as np
from sympy import Matrix, factorint

from .arith import form_eval
from .config import HEIGHT_MAX_ITERS
from .types import ARCHIMEDEAN, HeightEstimate, Place, ProjPointC, ProjPointQ, RationalMap
from .utils import BudgetExceeded, InvalidInput

logger = logging.getLogger(__name__)

# mpmath digits for the archimedean escape rate (well above 80-bit extended precision)
_GREEN_DPS = 32


def naive_height(z: ProjPointQ) -> float:
    """log max(|x|, |y|) of the normalized lift"""
    return math.log(max(abs(z.x), abs(z.y)))


def _bezout_norm(f: RationalMap, target_power_of_x: bool) -> Fraction:
    """
    Sum of |coefficients| of A, B with A P + B Q = Res * x^(2d-1) (or y^(2d-1)).
    """
    d = f.degree
    size = 2 * d
    rows = [[0] * size for _ in range(size)]
    # column j < d: coefficient of A at x^j y^(d-1-j); column d + j: same for B
    for j in range(d):
        for i, c in enumerate(f.P.coefficients):
            rows[i + j][j] += c
        for i, c in enumerate(f.Q.coefficients):
            rows[i + j][d + j] += c
    target = [0] * size
    target[size - 1 if target_power_of_x else 0] = f.res
    solution = Matrix(rows).LUsolve(Matrix(target))
    return sum(abs(Fraction(int(v.p), int(v.q))) for v in solution)


@lru_cache(maxsize=256)
def arch_constants(f: RationalMap) -> Tuple[float, float]:
    """
    (c-, c+) with c- <= log||F(u)|| - d log||u|| <= c+ for the max-norm on C^2.

    c+ comes from the coefficient sums, c- from the Bezout identities that
    express Res * x^(2d-1) and Res * y^(2d-1) in the ideal (P, Q).
    """
    c_plus = math.log(max(sum(abs(c) for c in f.P.coefficients), sum(abs(c) for c in f.Q.coefficients)))
    norm = max(_bezout_norm(f, True), _bezout_norm(f, False))
    c_minus = math.log(abs(f.res)) - math.log(norm.numerator) + math.log(norm.denominator)
    return c_minus, c_plus


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=256)
def bad_primes(f: RationalMap) -> Tuple[int, ...]:
    """Primes dividing Res(P, Q), ascending."""
    return tuple(sorted(factorint(abs(f.res)).keys()))


def nonarch_constants(f: RationalMap, p: int) -> Tuple[float, float]:
    """(c-_p, c+_p): integral coefficients give c+ = 0, the resultant gives c- = -v_p(Res) log p."""
    if f.res % p:
        return 0.0, 0.0
    return -valuation(f.res, p) * math.log(p), 0.0


def _place_constant(f: RationalMap, place: Place) -> float:
    if place.is_archimedean:
        c_minus, c_plus = arch_constants(f)
    else:
        c_minus, c_plus = nonarch_constants(f, place.p)
    return max(abs(c_minus), abs(c_plus))


def height_difference_bound(f: RationalMap) -> float:
    """Explicit C with |h_hat_f - h| <= C on P^1(Qbar)."""
    total = _place_constant(f, ARCHIMEDEAN)
    for p in bad_primes(f):
        total += _place_constant(f, Place(p))
    return total / (f.degree - 1)


def _lift(z: Union[ProjPointC, ProjPointQ, Sequence]) -> Tuple:
    if isinstance(z, ProjPointQ):
        return mpmath.mpf(z.x), mpmath.mpf(z.y)
    if isinstance(z, ProjPointC):
        return mpmath.mpc(z.x), mpmath.mpc(z.y)
    x, y = z
    return mpmath.mpc(complex(x)), mpmath.mpc(complex(y))


def green_arch(f: RationalMap, z: Union[ProjPointC, ProjPointQ, Sequence], n_iters: int) -> HeightEstimate:
    """
    Archimedean escape rate d^-n log||F^n(x, y)|| on the given lift.

    Args:
        f: map
        z: point; a ProjPointQ uses its integral gcd-1 lift
        n_iters: number of iterations (>= 1)

    Returns:
        HeightEstimate: value with certified error C_f / (d^n (d - 1))
    """
    if n_iters < 1:
        raise InvalidInput("n_iters must be >= 1")
    d = f.degree
    with mpmath.workdps(_GREEN_DPS):
        x, y = _lift(z)
        norm = max(abs(x), abs(y))
        if norm == 0:
            raise InvalidInput("(0:0) is not a point of P^1")
        total = mpmath.log(norm)
        x, y = x / norm, y / norm
        weight = mpmath.mpf(1)
        for _ in range(n_iters):
            X = form_eval(f.P, x, y)
            Y = form_eval(f.Q, x, y)
            s = max(abs(X), abs(Y))
            weight /= d
            total += weight * mpmath.log(s)
            x, y = X / s, Y / s
        value = float(total)
    error = _place_constant(f, ARCHIMEDEAN) / (d ** n_iters * (d - 1))
    return HeightEstimate(value, error, [(ARCHIMEDEAN, value)])


def green_arch_array(f: RationalMap, u: np.ndarray, n_iters: int) -> np.ndarray:
    """
    Escape rate for many homogeneous lifts of shape (N, 2), accumulated in long double.
    Used for the numeric surrogates; green_arch is the certified single-point path.
    """
    d = f.degree
    x = np.asarray(u[:, 0], dtype=np.clongdouble)
    y = np.asarray(u[:, 1], dtype=np.clongdouble)
    norm = np.maximum(np.abs(x), np.abs(y))
    total = np.log(norm).astype(np.longdouble)
    x, y = x / norm, y / norm
    weight = np.longdouble(1)
    for _ in range(n_iters):
        X = form_eval(f.P, x, y)
        Y = form_eval(f.Q, x, y)
        s = np.maximum(np.abs(X), np.abs(Y))
        weight /= d
        total += weight * np.log(s)
        x, y = X / s, Y / s
    return total.astype(float)


def green_nonarch(f: RationalMap, z: ProjPointQ, p: int, n_iters: int) -> HeightEstimate:
    """
    p-adic escape rate of the gcd-1 integral lift.

    Good reduction (p does not divide Res) returns exactly 0 with error 0. Otherwise
    the orbit is tracked modulo a power of p large enough that the valuations lost to
    normalization never exhaust the precision.
    """
    place = Place(p)
    if f.res % p:
        return HeightEstimate(0.0, 0.0, [(place, 0.0)])
    if n_iters < 1:
        raise InvalidInput("n_iters must be >= 1")
    d = f.degree
    r = valuation(f.res, p)
    precision = r * (n_iters + 1) + 1
    modulus = p ** precision
    x, y = z.x % modulus, z.y % modulus
    scaled = Fraction(0)
    weight = Fraction(1)
    for _ in range(n_iters):
        X = form_eval(f.P, x, y) % modulus
        Y = form_eval(f.Q, x, y) % modulus
        e = min(valuation(X, p) if X else precision, valuation(Y, p) if Y else precision)
        weight /= d
        scaled += weight * e
        precision -= e
        modulus = p ** precision
        x, y = (X // p ** e) % modulus, (Y // p ** e) % modulus
    value = -float(scaled) * math.log(p)
    error = r * math.log(p) / (d ** n_iters * (d - 1))
    return HeightEstimate(value, error, [(place, value)])


def iterations_for(constant: float, d: int, share: float, cap: int) -> int:
    if constant == 0:
        return 1
    n = max(1, math.ceil(math.log(constant / (share * (d - 1))) / math.log(d)))
    if n > cap:
        raise BudgetExceeded(f"Certifying error {share:.3e} needs {n} iterations, cap is {cap}")
    return n


def canonical_height(
    f: RationalMap,
    z: ProjPointQ,
    target_error: float = 1e-6,
    max_iters: int = HEIGHT_MAX_ITERS,
) -> HeightEstimate:
    """
    Call-Silverman canonical height of a rational point.

    Sums local Green functions of the gcd-1 lift over the archimedean place and the
    primes dividing Res; the error budget is split equally between those places.

    Raises:
        BudgetExceeded: if some place needs more than max_iters iterations
    """
    if target_error <= 0:
        raise InvalidInput("target_error must be positive")
    places = [ARCHIMEDEAN] + [Place(p) for p in bad_primes(f)]
    share = target_error / len(places)
    breakdown: List[Tuple[Place, float]] = []
    error = 0.0
    for place in places:
        n = iterations_for(_place_constant(f, place), f.degree, share, max_iters)
        if place.is_archimedean:
            local = green_arch(f, z, n)
        else:
            local = green_nonarch(f, z, place.p, n)
        breakdown.append((place, local.value))
        error += local.error
    value = sum(v for _, v in breakdown)
    logger.debug("canonical_height(%s, %s) = %.12g +- %.3g", f, z, value, error)
    return HeightEstimate(value, error, breakdown)


def canonical_height_split(
    maps: Sequence[RationalMap],
    points: Sequence[ProjPointQ],
    target_error: float = 1e-6,
    max_iters: int = HEIGHT_MAX_ITERS,
) -> HeightEstimate:
    """Height of a point of (P^1)^l under a split map: sum of coordinate heights, errors added."""
    if len(maps) != len(points) or not maps:
        raise InvalidInput(f"Split height needs equal nonempty lengths, got {len(maps)} maps and {len(points)} points")
    share = target_error / len(maps)
    merged: Dict[Place, float] = {}
    error = 0.0
    for f, z in zip(maps, points):
        est = canonical_height(f, z, share, max_iters)
        error += est.error
        for place, v in est.place_breakdown:
            merged[place] = merged.get(place, 0.0) + v
    breakdown = sorted(merged.items(), key=lambda item: -1 if item[0].p is None else item[0].p)
    value = sum(v for _, v in breakdown)
    return HeightEstimate(value, error, breakdown)


def sample_sphere_excess(f: RationalMap, samples: int = 2000, seed: int = 0) -> Tuple[float, float]:
    """
    Observed (min, max) of log||F(u)|| - d log||u|| on random points of the
    max-norm unit sphere; a sanity check against arch_constants.
    """
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0, 2 * np.pi, (samples, 2))
    radii = rng.uniform(0, 1, samples)
    x = np.exp(1j * angles[:, 0])
    y = radii * np.exp(1j * angles[:, 1])
    flip = rng.uniform(0, 1, samples) < 0.5
    x[flip], y[flip] = y[flip], x[flip].copy()
    X = form_eval(f.P, x, y)
    Y = form_eval(f.Q, x, y)
    excess = np.log(np.maximum(np.abs(X), np.abs(Y)))
    return float(excess.min()), float(excess.max())


def height_csv_row(point: ProjPointQ, estimate: HeightEstimate, primes: Sequence[int]) -> List[str]:
    """Row `point,value,error,arch,badprime_p...` with 17 significant digits."""
    local = {place: v for place, v in (estimate.place_breakdown or [])}
    row = [str(point), f"{estimate.value:.17g}", f"{estimate.error:.17g}", f"{local.get(ARCHIMEDEAN, 0.0):.17g}"]
    row.extend(f"{local.get(Place(p), 0.0):.17g}" for p in primes)
    return row


__all__ = [
    'naive_height',
    'arch_constants',
    'nonarch_constants',
    'bad_primes',
    'height_difference_bound',
    'green_arch',
    'green_arch_array',
    'green_nonarch',
    'iterations_for',
    'canonical_height',
    'canonical_height_split',
    'sample_sphere_excess',
    'height_csv_row',
]
