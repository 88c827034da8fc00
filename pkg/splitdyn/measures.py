"""
Sample clouds for measures of maximal entropy, their pullbacks to curves in
P^1 x P^1, and energy statistics comparing them.

The pairing kernel is -log of the chordal distance, averaged over the factors
of (P^1)^k, so infinity needs no special treatment.
"""
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

import mpmath
import numpy as np
from scipy import stats

from .arith import chordal_distance, eval_map_array, form_roots_batch, map_to_literal, point_c
from .config import (
    BOOTSTRAP_RESAMPLES,
    BOOTSTRAP_SUBSAMPLE,
    BURN_IN,
    DEFAULT_TOL,
    DEGREE_CAP,
    ITERATE_BIT_CAP,
    MIN_ENERGY_SAMPLES,
    ROOT_MAX_ITER,
)
from .heights import arch_constants, green_arch, green_arch_array, iterations_for
from .types import (
    ARCHIMEDEAN,
    CurveP1xP1,
    DivisorP1,
    EmpiricalMeasure,
    EnergyDecision,
    HeightEstimate,
    ProjPointC,
    ProjPointQ,
    RationalMap,
)
from .utils import DegreeNonZero, ExceptionalStart, InsufficientSamples, InvalidInput, NonDominant

logger = logging.getLogger(__name__)

# pair-kernel entries evaluated per block
_BLOCK_ENTRIES = 1 << 20


def _map_floats(f: RationalMap) -> Tuple[np.ndarray, np.ndarray]:
    big = max(abs(c) for c in f.P.coefficients + f.Q.coefficients)
    P = np.array([float(Fraction(c, big)) for c in f.P.coefficients])
    Q = np.array([float(Fraction(c, big)) for c in f.Q.coefficients])
    return P, Q


def preimages(f: RationalMap, u: np.ndarray, max_iter: int = ROOT_MAX_ITER) -> np.ndarray:
    """All d preimages of homogeneous points u (shape (N, 2)) as an (N, d, 2) array."""
    P, Q = _map_floats(f)
    coeffs = u[:, 1:2] * P[None, :] - u[:, 0:1] * Q[None, :]
    return form_roots_batch(coeffs, max_iter=max_iter)


def backward_sample(
    f: RationalMap,
    z0: Union[complex, ProjPointC, ProjPointQ],
    depth: int = 20,
    width: int = 10000,
    seed: int = 0,
    trajectory: bool = False,
    burn_in: int = BURN_IN,
    max_iter: int = ROOT_MAX_ITER,
) -> EmpiricalMeasure:
    """
    Approximate mu_f by independent uniform backward walks.

    Args:
        f: map
        z0: starting point, not exceptional for f
        depth: number of backward steps per walk
        width: number of walks
        seed: master seed; walk i draws its choices from the i-th spawned stream
        trajectory: record every level after burn_in instead of the final points
        burn_in: levels discarded in trajectory mode
        max_iter: root finder iteration cap per backward step

    Returns:
        EmpiricalMeasure: points of shape (N, 1, 2), uniform weights
    """
    if depth < 1 or width < 1:
        raise InvalidInput(f"depth and width must be >= 1, got depth={depth}, width={width}")
    from .dynamics import exceptional_points

    start = point_c(z0)
    for e in exceptional_points(f):
        if chordal_distance(start, e) < 1e-12:
            raise ExceptionalStart(f"{start} is exceptional for {f}")
    children = np.random.SeedSequence(seed).spawn(width)
    choices = np.stack([np.random.default_rng(s).integers(0, f.degree, size=depth) for s in children])
    u = np.tile(np.array([start.x, start.y], dtype=complex), (width, 1))
    u /= np.max(np.abs(u), axis=1, keepdims=True)
    rows = np.arange(width)
    levels: List[np.ndarray] = []
    for level in range(depth):
        u = preimages(f, u, max_iter)[rows, choices[:, level]]
        if trajectory and level >= burn_in:
            levels.append(u.copy())
    if trajectory and levels:
        points = np.concatenate(levels)
    else:
        points = u
    n = len(points)
    provenance = {
        "map": map_to_literal(f),
        "z0": str(start),
        "depth": depth,
        "width": width,
        "seed": seed,
        "mode": "trajectory" if trajectory else "final",
    }
    logger.debug("backward_sample: %d points, provenance %s", n, provenance)
    return EmpiricalMeasure(points[:, None, :], np.full(n, 1.0 / n), provenance)


def pushforward(mu: EmpiricalMeasure, f: RationalMap, factor: int = 0) -> EmpiricalMeasure:
    """Image of the sample cloud under f acting on one factor."""
    points = mu.points.copy()
    points[:, factor, :] = eval_map_array(f, points[:, factor, :])
    provenance = dict(mu.provenance, pushforward=map_to_literal(f))
    return EmpiricalMeasure(points, mu.weights.copy(), provenance)


def potential_green(f: RationalMap, z: Union[ProjPointC, ProjPointQ], n: int) -> float:
    """Invariant potential of mu_f on the given lift, via the archimedean escape rate."""
    return green_arch(f, z, n).value


# --- Energies ---

def _kernel_block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    num = np.abs(a[:, None, :, 0] * b[None, :, :, 1] - a[:, None, :, 1] * b[None, :, :, 0])
    den = np.linalg.norm(a, axis=-1)[:, None, :] * np.linalg.norm(b, axis=-1)[None, :, :]
    with np.errstate(divide="ignore"):
        return (-np.log(num / den)).mean(axis=2)


def _pair_mean(a: np.ndarray, wa: np.ndarray, b: np.ndarray, wb: np.ndarray) -> float:
    """Weighted mean of the kernel over pairs at positive distance, in fixed block order."""
    block = max(1, _BLOCK_ENTRIES // (len(b) * a.shape[1]))
    total = 0.0
    mass = 0.0
    for start in range(0, len(a), block):
        K = _kernel_block(a[start:start + block], b)
        W = wa[start:start + block, None] * wb[None, :]
        ok = np.isfinite(K)
        total += float(np.sum(np.where(ok, K * W, 0.0)))
        mass += float(np.sum(np.where(ok, W, 0.0)))
    if mass == 0:
        raise InsufficientSamples("No pair of samples at positive distance")
    return total / mass


def mutual_energy(mu1: EmpiricalMeasure, mu2: EmpiricalMeasure) -> float:
    """
    Energy of mu1 - mu2 for the -log chordal kernel, as a U-statistic.

    Coincident pairs (the diagonal included) are left out of every double sum,
    so identical inputs give exactly 0.

    Raises:
        InsufficientSamples: if either measure has fewer than 100 points
    """
    for mu in (mu1, mu2):
        if mu.size < MIN_ENERGY_SAMPLES:
            raise InsufficientSamples(f"Energy needs {MIN_ENERGY_SAMPLES} samples, got {mu.size}")
    if mu1.factors != mu2.factors:
        raise InvalidInput(f"Measures live on (P^1)^{mu1.factors} and (P^1)^{mu2.factors}")
    if np.array_equal(mu1.points, mu2.points) and np.array_equal(mu1.weights, mu2.weights):
        return 0.0
    e11 = _pair_mean(mu1.points, mu1.weights, mu1.points, mu1.weights)
    e22 = _pair_mean(mu2.points, mu2.weights, mu2.points, mu2.weights)
    e12 = _pair_mean(mu1.points, mu1.weights, mu2.points, mu2.weights)
    return e11 + e22 - 2 * e12


def _resample(mu: EmpiricalMeasure, size: int, rng: np.random.Generator) -> EmpiricalMeasure:
    idx = rng.choice(mu.size, size=size, replace=True, p=mu.weights / mu.weights.sum())
    return EmpiricalMeasure(mu.points[idx], np.full(size, 1.0 / size), mu.provenance)


def bootstrap_energy_se(
    mu1: EmpiricalMeasure,
    mu2: EmpiricalMeasure,
    resamples: int = BOOTSTRAP_RESAMPLES,
    seed: int = 0,
    subsample: int = BOOTSTRAP_SUBSAMPLE,
) -> float:
    """
    Bootstrap standard error of mutual_energy.

    Resamples of size m = min(subsample, n) are drawn from a stream separate from
    the sampling one; the spread is rescaled by sqrt(m / n) to the full size n.
    """
    n = min(mu1.size, mu2.size)
    m = min(subsample, n)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
    values = [mutual_energy(_resample(mu1, m, rng), _resample(mu2, m, rng)) for _ in range(resamples)]
    return float(np.std(values, ddof=1) * math.sqrt(m / n))


def energy_decision(statistic: float, se: float) -> EnergyDecision:
    if statistic < se:
        return EnergyDecision("Equal", statistic, se)
    if statistic > 3 * se:
        return EnergyDecision("NotEqual", statistic, se)
    return EnergyDecision("Inconclusive", statistic, se)


def chebyshev_energy_oracle() -> float:
    """Energy between the circle and arcsine measures: (2 / pi) Cl_2(pi / 3)."""
    return float(2 / mpmath.pi * mpmath.clsin(2, mpmath.pi / 3))


# --- Divisors ---

def _affine(point) -> Optional[complex]:
    # None at infinity
    if isinstance(point, ProjPointQ):
        return None if point.is_infinity else complex(point.x / point.y)
    if isinstance(point, ProjPointC):
        return None if point.is_infinity else complex(point.to_affine())
    return complex(point)


def flat_potential(D: DivisorP1) -> Callable:
    """
    log|r(z)| for r = prod (z - a)^m over the finite points of a degree-0 divisor.
    At infinity r behaves like z^k with k the finite degree, so the value there is
    +inf, -inf or 0 by the sign of k.

    Raises:
        DegreeNonZero: if deg D != 0
    """
    if D.degree != 0:
        raise DegreeNonZero(f"Divisor has degree {D.degree}")
    finite = [(_affine(point), mult) for point, mult in D.points]
    finite = [(a, mult) for a, mult in finite if a is not None]
    k = sum(mult for _, mult in finite)
    at_infinity = math.copysign(math.inf, k) if k else 0.0

    def potential(z):
        if isinstance(z, (ProjPointC, ProjPointQ)):
            z = _affine(z)
            if z is None:
                return at_infinity
        z = np.asarray(z, dtype=complex)
        total = np.zeros(z.shape)
        for a, mult in finite:
            total = total + mult * np.log(np.abs(z - a))
        return float(total) if total.ndim == 0 else total

    return potential


# --- Curves ---

def fiber_coefficients(C: CurveP1xP1, u: np.ndarray, which: int) -> np.ndarray:
    """
    Coefficients of C restricted to the fibers over u (shape (N, 2)) of projection `which`:
    a form in the other factor's coordinates, shape (N, deg + 1).
    """
    d1, d2 = C.bidegree
    c = np.array(C.coefficients, dtype=float)
    if which == 1:
        powers = np.stack([u[:, 0] ** i * u[:, 1] ** (d1 - i) for i in range(d1 + 1)], axis=1)
        return powers @ c
    powers = np.stack([u[:, 0] ** j * u[:, 1] ** (d2 - j) for j in range(d2 + 1)], axis=1)
    return powers @ c.T


def curve_pullback_sample(
    C: CurveP1xP1,
    mu: EmpiricalMeasure,
    which: int = 1,
    tol: float = DEFAULT_TOL,
    max_iter: int = ROOT_MAX_ITER,
) -> EmpiricalMeasure:
    """
    pi_which^* mu normalized to mass 1: each sample spreads its weight over the fiber.

    Raises:
        NonDominant: if projection `which` is constant on C
        NoConvergence: if a fiber cannot be solved to relative residual tol
    """
    if which not in (1, 2):
        raise InvalidInput(f"which must be 1 or 2, got {which}")
    fiber_degree = C.bidegree[2 - which]
    if fiber_degree == 0:
        raise NonDominant(f"Projection {which} of a bidegree {C.bidegree} curve is not dominant")
    u = mu.points[:, 0, :]
    roots = form_roots_batch(fiber_coefficients(C, u, which), tol, max_iter)
    n = len(u)
    base = np.repeat(u, fiber_degree, axis=0)
    other = roots.reshape(n * fiber_degree, 2)
    if which == 1:
        points = np.stack([base, other], axis=1)
    else:
        points = np.stack([other, base], axis=1)
    weights = np.repeat(mu.weights / fiber_degree, fiber_degree)
    provenance = dict(mu.provenance, pullback=which)
    return EmpiricalMeasure(points, weights, provenance)


def measure_equality_test(
    f: RationalMap,
    g: RationalMap,
    C: CurveP1xP1,
    depth: int = 20,
    width: int = 2000,
    seed: int = 0,
    resamples: int = BOOTSTRAP_RESAMPLES,
    z0: complex = complex(0.3, 0.7),
    tol: float = DEFAULT_TOL,
    max_iter: int = ROOT_MAX_ITER,
) -> EnergyDecision:
    """
    Compare pi_1^* mu_f and pi_2^* mu_g on C by their mutual energy.

    NotEqual when the statistic exceeds three bootstrap standard errors, Equal
    when it is below one, Inconclusive in between.
    """
    if 0 in C.bidegree:
        raise NonDominant(f"Both projections must be dominant, bidegree is {C.bidegree}")
    seed_f, seed_g = (int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(2))
    mu_f = backward_sample(f, z0, depth, width, seed_f, max_iter=max_iter)
    mu_g = backward_sample(g, z0, depth, width, seed_g, max_iter=max_iter)
    nu1 = curve_pullback_sample(C, mu_f, 1, tol, max_iter)
    nu2 = curve_pullback_sample(C, mu_g, 2, tol, max_iter)
    statistic = mutual_energy(nu1, nu2)
    se = bootstrap_energy_se(nu1, nu2, resamples=resamples, seed=seed)
    decision = energy_decision(statistic, se)
    logger.debug("measure_equality_test: %s", decision)
    return decision


# --- Arakelov-Zhang ---

def arakelov_zhang_estimate(
    f: RationalMap,
    g: RationalMap,
    n: int,
    target_error: float = 1e-6,
    tol: float = DEFAULT_TOL,
    degree_cap: int = DEGREE_CAP,
    bit_cap: int = ITERATE_BIT_CAP,
    max_iter: int = ROOT_MAX_ITER,
) -> HeightEstimate:
    """
    Mean of h_g over Fix(f^n).

    Rational fixed points get a certified canonical height; the others use the
    archimedean escape rate of g on the lift (z, 1) (or (1, 0) at infinity),
    which ignores the finite places. The error covers truncation only: no
    equidistribution rate is claimed.
    """
    from .dynamics import periodic_points, rational_preperiodic_points
    from .heights import canonical_height

    points = periodic_points(f, n, tol=tol, degree_cap=degree_cap, bit_cap=bit_cap, max_iter=max_iter)
    rational = [(q, point_c(q)) for q in rational_preperiodic_points(f, 0, n, bit_cap)]
    c_minus, c_plus = arch_constants(g)
    iters = iterations_for(max(abs(c_minus), abs(c_plus)), g.degree, target_error, 10 ** 4)
    lifts = np.array([[1.0, 0.0] if p.is_infinity else [p.x / p.y, 1.0] for p in points], dtype=complex)
    values = green_arch_array(g, lifts, iters)
    errors = np.full(len(points), target_error)
    certified = 0
    for idx, p in enumerate(points):
        for q, qc in rational:
            if chordal_distance(p, qc) < 1e-6:
                est = canonical_height(g, q, target_error)
                values[idx], errors[idx] = est.value, est.error
                certified += 1
                break
    value = float(np.mean(values))
    error = float(np.mean(errors))
    logger.debug(
        "arakelov_zhang_estimate: %d points (%d certified), value %.12g +- %.3g",
        len(points), certified, value, error,
    )
    return HeightEstimate(value, error, [(ARCHIMEDEAN, value)])


# --- Diagnostics ---

def angle_ks_distance(mu: EmpiricalMeasure, factor: int = 0) -> Tuple[float, float]:
    """KS statistic and p-value of arg(z) / 2 pi against the uniform law."""
    z = mu.affine(factor)
    angles = np.mod(np.angle(z) / (2 * np.pi), 1.0)
    result = stats.kstest(angles, "uniform")
    return float(result.statistic), float(result.pvalue)


def arcsine_ks_distance(mu: EmpiricalMeasure, factor: int = 0) -> Tuple[float, float]:
    """KS statistic and p-value of Re z against the arcsine law on [-2, 2]."""
    x = np.real(mu.affine(factor))

    def cdf(t):
        return np.arccos(-np.clip(t, -2.0, 2.0) / 2) / np.pi

    result = stats.kstest(x, cdf)
    return float(result.statistic), float(result.pvalue)


def measure_csv_rows(mu: EmpiricalMeasure, factor: int = 0) -> List[List[str]]:
    """Rows `re,im,weight` in the affine chart; infinity is written as inf."""
    rows = []
    for z, w in zip(mu.affine(factor), mu.weights):
        if np.isinf(z.real):
            rows.append(["inf", "0", f"{w:.17g}"])
        else:
            rows.append([f"{z.real:.17g}", f"{z.imag:.17g}", f"{w:.17g}"])
    return rows


def measure_provenance(mu: EmpiricalMeasure) -> Dict:
    return dict(mu.provenance, size=mu.size, factors=mu.factors, total_weight=mu.total_weight)


__all__ = [
    'preimages',
    'backward_sample',
    'pushforward',
    'potential_green',
    'mutual_energy',
    'bootstrap_energy_se',
    'energy_decision',
    'chebyshev_energy_oracle',
    'flat_potential',
    'fiber_coefficients',
    'curve_pullback_sample',
    'measure_equality_test',
    'arakelov_zhang_estimate',
    'angle_ks_distance',
    'arcsine_ks_distance',
    'measure_csv_rows',
    'measure_provenance',
]
