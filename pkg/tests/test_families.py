import math
from fractions import Fraction
from unittest.mock import patch

import pytest
from sympy import simplify, symbols

from splitdyn.arith import make_map, parse_point
from splitdyn.dynamics import diagonal
from splitdyn.families import (
    bad_parameters,
    dky_cell,
    dky_scan,
    empty_small_set_threshold,
    family_from_literal,
    family_to_literal,
    fiber_small_points,
    fit_height_inequality,
    isotrivial_check,
    make_family,
    preperiodic_curve_parameters,
    quadratic_moduli,
    small_curve_scan,
    small_points,
    specialize,
    unicritical_family,
)
from splitdyn.heights import canonical_height
from splitdyn.types import HeightFit
from splitdyn.utils import DegenerateFiber, InvalidInput, SpecialCurve, SplitDynError

# --- Constants ---
t = symbols("t")
BUDGETS = [(0, 1), (1, 2), (2, 3)]

# --- Fixtures ---

@pytest.fixture
def unicritical():
    """z^2 + t"""
    return unicritical_family()

@pytest.fixture
def constant_square():
    """z^2 for every t"""
    return make_family([[0], [0], [1]], [[1]])

@pytest.fixture
def power_vs_unicritical(constant_square, unicritical):
    """(z^2, z^2 + t)"""
    return make_family([[0], [0], [1]], [[1]], second=unicritical)

@pytest.fixture
def rational_family():
    """(z^2 + t) / (t z + 1), degenerate where t^3 = -1"""
    return make_family([[0, 1], [0], [1]], [[1], [0, 1]])

# --- Construction ---

def test_make_family_resultant(unicritical, rational_family):
    """Test Res(t) of two standard families."""
    assert unicritical.degree == 2
    assert unicritical.resultant_poly == [1]
    assert rational_family.resultant_poly == [1, 0, 0, 1]

def test_make_family_removes_joint_content(unicritical):
    """Test that a common integer factor in Z[t] is divided out."""
    assert make_family([[0, 2], [0], [2]], [[2]]) == unicritical

@pytest.mark.parametrize("num, den", [
    ([[0], [1]], [[1]]),
    ([[0], [0], [1]], [[0], [0], [1]]),
    ([], [[1]]),
])
def test_make_family_rejects_degenerate(num, den):
    """Test low degree and identically vanishing resultants."""
    with pytest.raises(InvalidInput):
        make_family(num, den)

def test_family_literal_round_trip(power_vs_unicritical):
    """Test the nested literal of a pair family."""
    literal = family_to_literal(power_vs_unicritical)
    assert literal["second"] == {"num": [[0, 1], [0], [1]], "den": [[1], [0], [0]]}
    assert family_from_literal(literal) == power_vs_unicritical

def test_family_literal_errors():
    """Test that malformed literals raise InvalidInput."""
    with pytest.raises(InvalidInput):
        family_from_literal({"num": [[1]]})
    with pytest.raises(InvalidInput):
        family_from_literal({"num": [["a"]], "den": [[1]]})

# --- Specialization ---

def test_specialize_examples(unicritical, chebyshev):
    """Test exact fibers of z^2 + t."""
    assert specialize(unicritical, -2) == chebyshev
    third = specialize(unicritical, Fraction(1, 3))
    assert third.P.coefficients == (1, 0, 3)
    assert third.Q.coefficients == (3, 0, 0)

def test_specialize_pair(power_vs_unicritical, square, chebyshev):
    """Test that a pair family specializes to a pair."""
    assert specialize(power_vs_unicritical, "-2") == (square, chebyshev)

def test_specialize_degenerate_fiber():
    """Test that t z^2 + z degenerates at t = 0."""
    F = make_family([[0], [1], [0, 1]], [[1]])
    assert F.resultant_poly == [0, 0, 1]
    with pytest.raises(DegenerateFiber) as info:
        specialize(F, 0)
    assert info.value.t == 0

def test_bad_parameters(unicritical, constant_square, rational_family):
    """Test rational and complex roots of Res(t)."""
    assert bad_parameters(unicritical).rational == []
    assert bad_parameters(unicritical).complex == []
    assert bad_parameters(constant_square).complex == []
    bad = bad_parameters(rational_family)
    assert bad.rational == [Fraction(-1)]
    assert len(bad.complex) == 3
    assert all(abs(z ** 3 + 1) < 1e-9 for z in bad.complex)

def test_height_continuity_in_parameter(unicritical):
    """Test that canonical heights move little with the parameter near 0."""
    a = canonical_height(specialize(unicritical, 0), parse_point("3")).value
    b = canonical_height(specialize(unicritical, Fraction(1, 1000)), parse_point("3")).value
    assert abs(a - b) <= 0.2

# --- Isotriviality ---

def test_quadratic_moduli_of_unicritical(unicritical):
    """Test sigma_1 = 2 and sigma_2 = 4t for z^2 + t."""
    sigma1, sigma2 = quadratic_moduli(unicritical)
    assert simplify(sigma1 - 2) == 0
    assert simplify(sigma2 - 4 * t) == 0

def test_quadratic_moduli_needs_degree_two():
    """Test the degree guard."""
    with pytest.raises(InvalidInput):
        quadratic_moduli(make_family([[0, 1], [0], [0], [1]], [[1]]))

def test_isotrivial_check(unicritical, constant_square, power_vs_unicritical):
    """Test exact verdicts in degree 2."""
    assert isotrivial_check(unicritical) == "NonIsotrivial"
    assert isotrivial_check(constant_square) == "Isotrivial"
    assert isotrivial_check(make_family([[-2], [0], [1]], [[1]])) == "Isotrivial"
    assert isotrivial_check(power_vs_unicritical) == "NonIsotrivial"

@pytest.mark.parametrize("num, den", [
    ([[0], [0], [0, 1]], [[1]]),  # t z^2
    ([[0], [0], [1]], [[0, 1]]),  # z^2 / t
])
def test_isotrivial_check_conjugate_families(num, den):
    """Test families conjugate to z^2 by z -> t z."""
    assert isotrivial_check(make_family(num, den)) == "Isotrivial"

def test_isotrivial_check_sampled_cubics():
    """Test the multiplier-spectrum comparison in degree 3."""
    assert isotrivial_check(make_family([[0, 1], [0], [0], [1]], [[1]]), periods=(1, 2)) == "NonIsotrivial"
    assert isotrivial_check(make_family([[0], [0], [0], [0, 1]], [[1]]), periods=(1, 2)) == "Unknown"

# --- Small points ---

def test_small_points_square_vs_chebyshev(square, chebyshev):
    """Test that the common small points on the diagonal are 0, infinity and +-1."""
    report = small_points(square, chebyshev, diagonal(), 0.01)
    assert report.count == 4
    assert report.candidates >= report.count
    assert report.empirical_min == pytest.approx(0.0, abs=1e-9)
    labels = set()
    for p in report.points:
        labels.add("inf" if p.x.is_infinity else round(p.x.to_affine().real, 6))
        assert p.height < 0.01
    assert labels == {0.0, 1.0, -1.0, "inf"}
    assert all(not p.numeric for p in report.points)

def test_small_points_monotone_in_eps(square, chebyshev):
    """Test that counts grow with eps."""
    counts = [small_points(square, chebyshev, diagonal(), eps).count for eps in (1e-6, 0.01, 0.5)]
    assert counts == sorted(counts)
    assert counts[0] == 4

def test_small_points_refuses_special_curve(square):
    """Test that a weakly special curve is refused."""
    with pytest.raises(SpecialCurve):
        small_points(square, square, diagonal(), 0.1)

def test_small_points_rejects_bad_eps(square, chebyshev):
    """Test that eps must be positive."""
    with pytest.raises(InvalidInput):
        small_points(square, chebyshev, diagonal(), 0.0)

def test_fiber_small_points(power_vs_unicritical, unicritical):
    """Test small points on the diagonal in the fiber t = -2."""
    assert fiber_small_points(power_vs_unicritical, diagonal(), -2, 0.01).count == 4
    with pytest.raises(SpecialCurve):
        fiber_small_points(power_vs_unicritical, diagonal(), 0, 0.01)
    with pytest.raises(InvalidInput):
        fiber_small_points(unicritical, diagonal(), -2, 0.01)

def test_fiber_small_points_monotone_in_budget(power_vs_unicritical):
    """Test that a larger preperiodicity budget never loses candidates or small points."""
    reports = [fiber_small_points(power_vs_unicritical, diagonal(), -1, 0.01, budget=b) for b in BUDGETS]
    counts = [r.count for r in reports]
    candidates = [r.candidates for r in reports]
    assert counts == sorted(counts)
    assert candidates == sorted(candidates)
    assert counts[-1] >= 4

@pytest.mark.parametrize("t1, t2", [(0, -2), (-2, 0), (0, -1)])
def test_dky_cell(t1, t2):
    """Test common small points of unicritical pairs."""
    cell = dky_cell(t1, t2)
    assert cell.count == 4
    assert (cell.t1, cell.t2) == (Fraction(t1), Fraction(t2))

@pytest.mark.slow
@pytest.mark.parametrize("threads", [1, 2])
def test_dky_scan(threads):
    """Test the grid scan, its rejected diagonal and its symmetry."""
    table = dky_scan([0, -2], [0, -2], threads=threads, logger=False)
    assert table.rejected == [(Fraction(0), Fraction(0)), (Fraction(-2), Fraction(-2))]
    assert [(c.t1, c.t2) for c in table.cells] == [(Fraction(0), Fraction(-2)), (Fraction(-2), Fraction(0))]
    assert [c.count for c in table.cells] == [4, 4]
    assert table.max_count == 4

@pytest.mark.slow
def test_dky_scan_full_grid():
    """Test symmetric finite counts over every pair t1 != t2 in {-2, -1, 0, 1}."""
    grid = [-2, -1, 0, 1]
    table = dky_scan(grid, grid, threads=2, logger=False)
    assert table.rejected == [(Fraction(v), Fraction(v)) for v in grid]
    counts = {(c.t1, c.t2): c.count for c in table.cells}
    assert len(counts) == 12
    for (t1, t2), count in counts.items():
        assert count == counts[(t2, t1)]
        assert 0 < count <= 10
    assert counts[(Fraction(0), Fraction(-2))] == 4
    # inf, +-1, 0, +-golden ratio, +-1/golden ratio, +-sqrt(2)
    assert counts[(Fraction(-2), Fraction(-1))] == 10

# --- Height inequality ---

def test_fit_critical_section(unicritical):
    """Test that h_hat(0) grows like h(t) / 2 along z^2 + t."""
    fit = fit_height_inequality(unicritical, [0], range(2, 101))
    assert fit.violations == 0
    assert fit.c1 >= 0.4
    assert fit.slope == pytest.approx(0.5, abs=0.05)
    assert fit.flags == []
    assert len(fit.support) == 99

@pytest.mark.slow
def test_fit_critical_section_to_200(unicritical):
    """Test the critical-section fit over t = 2..200."""
    fit = fit_height_inequality(unicritical, [0], range(2, 201))
    assert fit.violations == 0
    assert fit.c1 >= 0.4
    assert 0.45 <= fit.slope <= 0.55
    assert len(fit.support) == 199

def test_fit_identity_section(unicritical):
    """Test that h_hat(t) grows like h(t) along z^2 + t."""
    fit = fit_height_inequality(unicritical, [0, 1], range(2, 101))
    assert fit.violations == 0
    assert fit.slope == pytest.approx(1.0, abs=0.1)

def test_fit_constant_family(constant_square):
    """Test the degenerate fit of a constant family."""
    fit = fit_height_inequality(constant_square, [2], range(1, 21))
    assert fit.c1 == pytest.approx(0.0, abs=1e-12)
    assert fit.c2 == pytest.approx(-math.log(2))
    assert fit.slope == pytest.approx(0.0, abs=1e-9)
    assert fit.flags == ["Isotrivial"]

def test_fit_callable_section_and_skips(rational_family):
    """Test a callable section and skipped bad parameters."""
    fit = fit_height_inequality(rational_family, lambda s: 2 * s, [-1, 1, 2, 3])
    assert fit.skipped == [Fraction(-1)]
    assert len(fit.support) == 3
    assert fit.violations == 0
    with pytest.raises(InvalidInput):
        fit_height_inequality(rational_family, [0], [-1])

def test_empty_small_set_threshold():
    """Test c3 from a fit and the c1 <= c4 case."""
    fit = HeightFit(0.5, 0.3, [], 0, 0.5)
    assert empty_small_set_threshold(fit, 0.25) == pytest.approx(1.2)
    assert empty_small_set_threshold(fit, 0.45) == pytest.approx(6.0)
    assert empty_small_set_threshold(HeightFit(0.5, -1.0, [], 0, 0.5), 0.1) == 1.0
    assert empty_small_set_threshold(fit, 0.6) is None

# --- Parameter scans ---

def test_preperiodic_curve_parameters(power_vs_unicritical, unicritical):
    """Test that only t = 0 makes the diagonal preperiodic."""
    assert preperiodic_curve_parameters(power_vs_unicritical, diagonal(), [0, 1, -2], max_iters=2) == [Fraction(0)]
    with pytest.raises(InvalidInput):
        preperiodic_curve_parameters(unicritical, diagonal(), [0])

def test_small_curve_scan(power_vs_unicritical):
    """Test that the Arakelov-Zhang surrogate vanishes only for equal fibers."""
    small = small_curve_scan(power_vs_unicritical, [0, -2], n=4)
    assert [s for s, _ in small] == [Fraction(0)]
    assert small[0][1] == pytest.approx(0.0, abs=1e-5)

def test_dky_scan_wraps_unexpected_failures():
    """Test that a non-toolkit failure in a cell surfaces as SplitDynError."""
    with patch("splitdyn.families.dky_cell", side_effect=ZeroDivisionError("boom")):
        with pytest.raises(SplitDynError, match="Error scanning DKY grid: boom"):
            dky_scan([0], [-1], logger=False)
