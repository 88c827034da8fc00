import pytest

from splitdyn.utils import (
    BudgetExceeded,
    DegenerateFiber,
    DegenerateMap,
    InsufficientSamples,
    InvalidInput,
    NoConvergence,
    SpecialCurve,
    SplitDynError,
    error_codes,
    get_error_message,
    get_exit_code,
)

def test_get_error_message_known_name():
    """Test with a known error class name."""
    assert get_error_message("BudgetExceeded") == "Budget Exceeded"

def test_get_error_message_strips_whitespace():
    """Test that surrounding whitespace in a name is ignored."""
    assert get_error_message("  NoConvergence ") == "Numeric Failure: No Convergence"

def test_get_error_message_instance_appends_detail():
    """Test that an exception instance carries its own text after the table message."""
    error = DegenerateMap("Res(P, Q) = 0")
    assert get_error_message(error) == "Degenerate Map: resultant vanishes or degree below 2: Res(P, Q) = 0"

def test_get_error_message_unknown_name():
    """Test with an unmapped name."""
    assert get_error_message("KeyError") == "Unknown error: KeyError"

def test_get_error_message_unknown_instance():
    """Test with an exception outside the hierarchy."""
    assert get_error_message(ValueError("boom")) == "Unknown error: ValueError"

def test_get_error_message_all_known_names():
    """Test all names from the table."""
    for name, (_, message) in error_codes.items():
        assert get_error_message(name) == message

def test_exit_codes_match_class_codes():
    """Test that every mapped class agrees with its table exit code."""
    classes = [DegenerateMap, InvalidInput, SpecialCurve, BudgetExceeded, InsufficientSamples, NoConvergence]
    for cls in classes:
        assert get_exit_code(cls.__name__) == cls.code
        assert issubclass(cls, SplitDynError)

def test_exit_code_contract():
    """Test the documented exit code classes."""
    assert get_exit_code(DegenerateMap("x")) == 2
    assert get_exit_code(BudgetExceeded("x")) == 3
    assert get_exit_code(NoConvergence("x")) == 4
    assert get_exit_code(RuntimeError("x")) == 1

def test_degenerate_fiber_keeps_parameter():
    """Test that the bad parameter travels with the exception."""
    error = DegenerateFiber(-1)
    assert error.t == -1
    assert "t=-1" in str(error)
    with pytest.raises(SplitDynError, match="t=-1"):
        raise error
