import cmath
import math
from fractions import Fraction
from unittest.mock import patch

import numpy as np
import pytest

from splitdyn.arith import (
    INFINITY,
    chordal_distance,
    compose,
    compose_forms,
    eval_map,
    eval_map_array,
    eval_map_c,
    form_roots,
    form_roots_batch,
    iterate,
    make_form,
    make_map,
    map_from_literal,
    map_to_literal,
    normalize_lift,
    normalize_point,
    parse_point,
    point_c,
    poly_roots_batch,
    poly_roots_complex,
    primitive_form,
    rational_roots,
    resultant,
    substitute,
    wronskian,
)
from splitdyn.types import BinaryForm, ProjPointC, ProjPointQ
from splitdyn.utils import BudgetExceeded, DegenerateMap, InvalidInput, NoConvergence

# --- Constants ---
X2 = BinaryForm(2, (0, 0, 1))
Y2 = BinaryForm(2, (1, 0, 0))

# --- Test Cases ---

def test_normalize_point_sign_and_gcd():
    """Test that lifts are reduced with positive y."""
    assert normalize_point(6, -4) == ProjPointQ(-3, 2)
    assert normalize_point(-5, 0) == INFINITY
    with pytest.raises(InvalidInput):
        normalize_point(0, 0)

@pytest.mark.parametrize("text, expected", [
    ("3/2", ProjPointQ(3, 2)),
    ("-7", ProjPointQ(-7, 1)),
    ("inf", INFINITY),
    ("[4:6]", ProjPointQ(2, 3)),
    ("3/1", ProjPointQ(3, 1)),
])
def test_parse_point(text, expected):
    """Test the accepted point notations."""
    assert parse_point(text) == expected

def test_parse_point_rejects_garbage():
    """Test that malformed points raise InvalidInput."""
    with pytest.raises(InvalidInput, match="Error parsing point"):
        parse_point("three")

def test_make_form_pads_and_trims():
    """Test degree padding and zero trimming."""
    assert make_form([1, 2], degree=3).coefficients == (1, 2, 0, 0)
    assert make_form([1, 2, 0], degree=1).coefficients == (1, 2)
    with pytest.raises(InvalidInput):
        make_form([1, 2, 3], degree=1)

def test_primitive_form_sign():
    """Test content removal with a positive leading coefficient."""
    assert primitive_form(BinaryForm(2, (0, -4, 6))).coefficients == (0, 2, -3)

def test_resultant_examples():
    """Test the Sylvester resultant with P-rows first."""
    assert resultant(X2, Y2) == 1
    assert resultant(BinaryForm(2, (1, 0, 1)), BinaryForm(2, (0, 1, 0))) == 1
    # z^2 - 2 over 1: the Sylvester matrix is unit upper triangular
    assert resultant(BinaryForm(2, (-2, 0, 1)), Y2) == 1

def test_resultant_antisymmetry_odd_degree():
    """Test Res(Q, P) = (-1)^(d^2) Res(P, Q)."""
    P = BinaryForm(3, (1, 2, 0, 5))
    Q = BinaryForm(3, (3, 0, 1, 1))
    assert resultant(Q, P) == -resultant(P, Q)

def test_resultant_large_degree_path():
    """Test that the PRS path agrees with the closed form Res(x^d, y^d) = 1."""
    d = 16
    P = BinaryForm(d, (0,) * d + (1,))
    Q = BinaryForm(d, (1,) + (0,) * d)
    assert resultant(P, Q) == 1

def test_normalize_lift_examples():
    """Test valid lifts and degenerate ones."""
    f = normalize_lift(BinaryForm(2, (1, 0, 1)), Y2)
    assert f.degree == 2 and f.res == 1
    with pytest.raises(DegenerateMap):
        normalize_lift(BinaryForm(2, (-1, 0, 1)), BinaryForm(2, (-1, 0, 1)))
    with pytest.raises(DegenerateMap):
        normalize_lift(BinaryForm(1, (0, 1)), BinaryForm(1, (1, 0)))

def test_normalize_lift_removes_content():
    """Test that a common integer factor is divided out."""
    f = normalize_lift(BinaryForm(2, (6, 0, 2)), BinaryForm(2, (4, 0, 0)))
    assert f.P.coefficients == (3, 0, 1)
    assert f.Q.coefficients == (2, 0, 0)

def test_make_map_clears_denominators(square):
    """Test rational coefficients in make_map."""
    f = make_map([Fraction(1, 3), 0, 1], [1])
    assert f.P.coefficients == (1, 0, 3)
    assert f.Q.coefficients == (3, 0, 0)
    assert square.res == 1

def test_map_literal_round_trip(chebyshev):
    """Test the JSON literal format."""
    literal = {"num": [-2, 0, 1], "den": ["1"]}
    assert map_from_literal(literal) == chebyshev
    assert map_to_literal(chebyshev) == {"num": [-2, 0, 1], "den": [1, 0, 0]}

@pytest.mark.parametrize("literal", [{"num": [1]}, {"num": ["x"], "den": [1]}, {"num": [], "den": [1]}])
def test_map_literal_errors(literal):
    """Test malformed literals."""
    with pytest.raises(InvalidInput):
        map_from_literal(literal)

def test_eval_map_examples(square, chebyshev, square_plus_one):
    """Test exact evaluation on P^1(Q)."""
    assert eval_map(square, ProjPointQ(2, 1)) == ProjPointQ(4, 1)
    assert eval_map(chebyshev, ProjPointQ(0, 1)) == ProjPointQ(-2, 1)
    assert eval_map(square_plus_one, INFINITY) == INFINITY

def test_eval_map_c_matches_affine(chebyshev):
    """Test complex evaluation against the affine formula."""
    z = 0.3 + 0.7j
    w = eval_map_c(chebyshev, point_c(z))
    assert abs(w.to_affine() - (z * z - 2)) < 1e-12

def test_eval_map_array_normalized(square):
    """Test that array evaluation returns max-norm 1 lifts."""
    u = np.array([[2.0, 1.0], [1.0, 0.0], [0.5j, 1.0]], dtype=complex)
    out = eval_map_array(square, u)
    assert np.allclose(np.max(np.abs(out), axis=1), 1.0)
    assert abs(out[2, 0] / out[2, 1] - (0.5j) ** 2) < 1e-12

def test_iterate_and_compose(square, chebyshev):
    """Test iterates and compositions."""
    f3 = iterate(square, 3)
    assert f3.P.coefficients == (0,) * 8 + (1,)
    assert f3.Q.coefficients == (1,) + (0,) * 8
    assert iterate(chebyshev, 1) is chebyshev
    g = compose(chebyshev, chebyshev)
    assert g.P.coefficients == (2, 0, -4, 0, 1)
    assert g.Q.coefficients == (1, 0, 0, 0, 0)

def test_iterate_bit_cap(chebyshev):
    """Test that coefficient growth past the cap is refused."""
    with pytest.raises(BudgetExceeded):
        iterate(chebyshev, 6, bit_cap=8)

def test_substitute_matches_compose(chebyshev):
    """Test substitute against the composed numerator."""
    P = substitute(chebyshev.P, chebyshev.P, chebyshev.Q)
    assert P.coefficients == (2, 0, -4, 0, 1)

@pytest.mark.parametrize("outer, inner", [
    (([-2, 0, 1], [1]), ([1, 0, 1], [1])),
    (([1, 0, 1], [0, 2]), ([-1, 0, 1], [1])),
    (([3, 1, 2], [1, 0, 1]), ([0, 0, 1], [1, 1])),
    (([1, 0, -2, 0, 1], [0, 4, 0, 4]), ([1, 0, 1], [0, 2])),
])
def test_resultant_of_composition(outer, inner):
    """Test Res(f o g) = Res(f)^deg(g) * Res(g)^(deg(f)^2) on raw lifts."""
    f, g = make_map(*outer), make_map(*inner)
    P, Q = compose_forms(f, g)
    assert resultant(P, Q) == f.res ** g.degree * g.res ** (f.degree ** 2)

def test_wronskian_of_square(square):
    """Test that the critical points of z^2 are 0 and infinity."""
    W = wronskian(square)
    assert W.degree == 2
    assert W.coefficients[0] == 0 and W.coefficients[2] == 0 and W.coefficients[1] != 0

def test_poly_roots_complex_examples():
    """Test the root finder on small polynomials."""
    roots = sorted(poly_roots_complex([-1, 0, 1]), key=lambda z: z.real)
    assert np.allclose(roots, [-1, 1])
    cube = poly_roots_complex([-1, 0, 0, 1])
    for k in range(3):
        assert min(abs(r - cmath.exp(2j * math.pi * k / 3)) for r in cube) < 1e-8
    golden = sorted(r.real for r in poly_roots_complex([-1, -1, 1]))
    assert golden == pytest.approx([(1 - math.sqrt(5)) / 2, (1 + math.sqrt(5)) / 2], abs=1e-10)

def test_poly_roots_complex_zero_roots():
    """Test that roots at 0 are counted exactly."""
    roots = poly_roots_complex([0, 0, -4, 0, 1])
    assert sum(1 for r in roots if r == 0) == 2
    assert sorted(round(r.real, 8) for r in roots if r != 0) == [-2.0, 2.0]

def test_poly_roots_complex_rejects_constants():
    """Test the zero polynomial and constants."""
    with pytest.raises(InvalidInput):
        poly_roots_complex([0, 0])
    with pytest.raises(InvalidInput):
        poly_roots_complex([5])

def test_poly_roots_complex_reconstructs_polynomial():
    """Test that the product of (z - r) over the roots gives back the monic polynomial."""
    rng = np.random.default_rng(3)
    for degree in (3, 6, 11):
        coeffs = rng.integers(-9, 10, size=degree + 1).astype(float)
        coeffs[-1] = rng.choice([-3, -1, 1, 2])
        roots = poly_roots_complex(list(coeffs))
        assert len(roots) == degree
        rebuilt = np.poly(roots)[::-1]
        assert np.allclose(rebuilt, coeffs / coeffs[-1], atol=1e-7)

def test_rational_roots_are_complex_roots():
    """Test that exact rational roots of random cubics appear among the numeric roots."""
    rng = np.random.default_rng(5)
    for _ in range(20):
        p, q = int(rng.integers(-6, 7)), int(rng.integers(1, 5))
        a, b, c = (int(v) for v in rng.integers(-7, 8, size=3))
        a = a or 1
        # (q z - p)(a z^2 + b z + c)
        coeffs = [-p * c, q * c - p * b, q * b - p * a, q * a]
        exact = rational_roots(coeffs)
        assert Fraction(p, q) in exact
        numeric = poly_roots_complex(coeffs)
        for r in exact:
            assert min(abs(complex(float(r)) - z) for z in numeric) < 1e-6

def test_poly_roots_batch_resolves_stalled_rows():
    """Test that rows left unconverged by the batch iteration are solved one by one."""
    a = np.array([[-5, 1, -3, 0, 0, 0, 1], [2, 0, 7, -1, 0, 4, 1]], dtype=complex)

    def solve_alone(row, tol, max_iter):
        return list(np.roots(np.asarray(row)[::-1]))

    with patch("splitdyn.arith.poly_roots_complex", side_effect=solve_alone) as alone:
        z = poly_roots_batch(a, max_iter=1)
    assert alone.called
    for row, roots in zip(a, z):
        assert np.max(np.abs(np.polyval(row[::-1], roots))) < 1e-6

def test_poly_roots_batch_raises_when_resolve_fails():
    """Test that a row that also fails on its own raises NoConvergence."""
    a = np.array([[-5, 1, -3, 0, 0, 0, 1]], dtype=complex)
    with pytest.raises(NoConvergence):
        poly_roots_batch(a, max_iter=1)

def test_poly_roots_batch_converged_rows_untouched():
    """Test that converged rows never reach the single-row solver."""
    a = np.array([[-1, 0, 1], [-4, 0, 1]], dtype=complex)
    with patch("splitdyn.arith.poly_roots_complex") as alone:
        z = poly_roots_batch(a)
    alone.assert_not_called()
    assert sorted(z[1].real) == pytest.approx([-2, 2])

def test_form_roots_with_infinity():
    """Test that a degree drop puts roots at infinity."""
    roots = form_roots(BinaryForm(2, (0, 1, 0)))
    assert roots[0] == ProjPointC(0j, 1 + 0j)
    assert roots[1].is_infinity

def test_form_roots_batch_mixed_rows():
    """Test batch roots, including a row with roots at both 0 and infinity."""
    c = np.array([[-1, 0, 1], [0, 1, 0], [4, 0, 1]], dtype=complex)
    out = form_roots_batch(c)
    assert out.shape == (3, 2, 2)
    first = sorted((u[0] / u[1]).real for u in out[0])
    assert first == pytest.approx([-1, 1])
    assert sum(1 for u in out[1] if abs(u[1]) < 1e-14) == 1
    assert sum(1 for u in out[1] if abs(u[0]) < 1e-14) == 1
    third = sorted((u[0] / u[1]).imag for u in out[2])
    assert third == pytest.approx([-2, 2])

def test_chordal_distance_properties():
    """Test symmetry, the zero diagonal and distance to infinity."""
    z, w = point_c(1.0), point_c(-1.0)
    assert chordal_distance(z, w) == pytest.approx(1.0)
    assert chordal_distance(z, z) == pytest.approx(0.0)
    assert chordal_distance(point_c(0.0), ProjPointC(1, 0)) == pytest.approx(1.0)

@pytest.mark.parametrize("coeffs, expected", [
    ([-4, 0, 1], [Fraction(-2), Fraction(2)]),
    ([-2, 0, 1], []),
    ([2, -3, -3, 2], [Fraction(-1), Fraction(1, 2), Fraction(2)]),
    ([0, 0, 1], [Fraction(0), Fraction(0)]),
])
def test_rational_roots(coeffs, expected):
    """Test the rational root theorem enumeration."""
    assert rational_roots(coeffs) == expected

def test_rational_roots_height_bound():
    """Test that a height bound skips factoring a huge constant term."""
    coeffs = [-(2 ** 127 - 1) * 3, 2 ** 127 - 1 - 3, 1]  # (z - 3)(z + 2^127 - 1)
    assert rational_roots(coeffs, height_bound=10) == [Fraction(3)]

def test_rational_roots_zero_polynomial():
    """Test that the zero polynomial is rejected."""
    with pytest.raises(InvalidInput):
        rational_roots([0, 0])
