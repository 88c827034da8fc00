import json
import math
from unittest.mock import patch

import pytest

from splitdyn.cli import build_parser, main, make_run_config
from splitdyn.config import Settings, load_settings
from splitdyn.measures import backward_sample
from splitdyn.types import HeightEstimate
from splitdyn.utils import InvalidInput

# --- Fixtures ---

@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    """Run every command away from stray .env files and SD_* variables."""
    monkeypatch.chdir(tmp_path)
    for name in ("SD_THREADS", "SD_TOL", "SD_ROOT_MAX_ITER", "SD_BIT_CAP", "SD_DEGREE_CAP", "SD_BOOTSTRAP"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("splitdyn.config.load_dotenv", lambda *args, **kwargs: None)

def run_json(capsys, *argv):
    """Run a command with JSON output and return its exit code and report."""
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)

# --- Parser ---

def test_parser_defaults():
    """Test the shared flag defaults."""
    args = build_parser().parse_args(["height", "--map", "z2", "--point", "3"])
    assert args.emit == "json"
    assert args.seed == 0
    assert args.tol is None
    assert args.out is None

def test_run_config_uses_settings():
    """Test that unset budgets and tolerance come from settings."""
    args = build_parser().parse_args(["prep", "--map", "z2", "--budget-n", "2"])
    config = make_run_config(args, Settings(tol=1e-9, budget_m=1, threads=2))
    assert (config.budget_m, config.budget_n) == (1, 2)
    assert config.tol == 1e-9
    assert config.threads == 2

def test_run_config_rejects_bad_budget():
    """Test the positivity checks."""
    args = build_parser().parse_args(["prep", "--map", "z2", "--budget-n", "0"])
    with pytest.raises(InvalidInput):
        make_run_config(args, Settings())

# --- Commands ---

def test_height_json(capsys):
    """Test that h_hat(3/2) for z^2 is log 3."""
    code, report = run_json(capsys, "height", "--map", "z2", "--point", "3/2")
    assert code == 0
    assert report["command"] == "height"
    assert report["result"]["point"] == "3/2"
    assert report["result"]["value"] == pytest.approx(math.log(3), abs=1e-6)
    assert len(report["input_hash"]) == 64

def test_height_csv_columns(capsys):
    """Test one column per bad prime."""
    assert main(["height", "--map", "lattes-i", "--point", "0", "--emit", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "point,value,error,arch,badprime_2"
    assert lines[1].split(",")[0] == "0"

def test_height_csv_without_bad_primes(capsys):
    """Test the header of a map with good reduction everywhere."""
    assert main(["height", "--map", "z2", "--point", "inf", "--emit", "csv"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "point,value,error,arch"

def test_classify(capsys):
    """Test classification of z^3 - 3z."""
    code, report = run_json(capsys, "classify", "--map", "cheb3")
    assert code == 0
    assert report["result"]["class"]["tag"] == "ChebyshevConjugate"
    assert report["result"]["pcf"] is True

def test_prep(capsys):
    """Test the preperiodic points of z^2 with budget (1, 1)."""
    code, report = run_json(capsys, "prep", "--map", "z2", "--budget-m", "1", "--budget-n", "1")
    assert code == 0
    assert report["result"]["count"] == 4
    assert sorted(report["result"]["rational"]) == ["-1", "0", "1", "inf"]

def test_az_self_pairing(capsys):
    """Test that a map pairs to zero with itself."""
    code, report = run_json(capsys, "az", "--map1", "z2", "--map2", "z2", "--n", "3")
    assert code == 0
    assert report["result"]["value"] == pytest.approx(0.0, abs=1e-5)

def test_measure_csv_and_sidecar(tmp_path):
    """Test the sample rows and the provenance sidecar."""
    out = tmp_path / "circle.csv"
    argv = ["measure", "--map", "z2", "--depth", "8", "--width", "50", "--seed", "4", "--emit", "csv", "--out", str(out)]
    assert main(argv) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "re,im,weight"
    assert len(lines) == 51
    assert all(abs(abs(complex(float(r), float(i))) - 1) < 0.01 for r, i, _ in (l.split(",") for l in lines[1:]))
    sidecar = json.loads((tmp_path / "circle.csv.json").read_text())
    assert sidecar["command"] == "measure"
    assert sidecar["config"]["seed"] == 4

def test_measure_is_deterministic(tmp_path):
    """Test that a fixed seed reproduces the output byte for byte."""
    texts = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        assert main(["measure", "--map", "z2m2", "--width", "30", "--seed", "9", "--emit", "csv", "--out", str(out)]) == 0
        texts.append(out.read_text())
    assert texts[0] == texts[1]

def test_family_scan_info(capsys):
    """Test bad parameters and isotriviality of z^2 + t."""
    code, report = run_json(capsys, "family-scan", "--family", "unicritical", "--grid", "0", "--mode", "info")
    assert code == 0
    assert report["result"]["bad_parameters"] == {"rational": [], "complex": []}
    assert report["result"]["isotriviality"] == "NonIsotrivial"

def test_family_scan_fit(capsys):
    """Test the height inequality fit along the critical section."""
    code, report = run_json(capsys, "family-scan", "--family", "unicritical", "--grid", "2..30", "--section", "0")
    assert code == 0
    assert len(report["result"]["support"]) == 29
    assert report["result"]["violations"] == 0
    assert report["result"]["c1"] > 0

def test_family_scan_needs_curve(capsys):
    """Test that small-point mode without a curve is an input error."""
    assert main(["family-scan", "--family", "power-vs-unicritical", "--grid", "0", "--mode", "small"]) == 2

@pytest.mark.slow
def test_family_scan_small(capsys):
    """Test small points on the diagonal for (z^2, z^2 + t)."""
    code, report = run_json(
        capsys, "family-scan", "--family", "power-vs-unicritical", "--grid", "-2,0", "--curve", "diagonal",
        "--mode", "small", "--budget-m", "2", "--budget-n", "3",
    )
    assert code == 0
    # t = 0 makes the diagonal special for (z^2, z^2)
    assert report["result"]["skipped"] == ["0"]
    assert [cell["count"] for cell in report["result"]["cells"]] == [4]

@pytest.mark.slow
def test_dky(capsys):
    """Test a small DKY table."""
    code, report = run_json(capsys, "dky", "--t1", "0,-2", "--t2", "-1", "--budget-m", "2", "--budget-n", "3")
    assert code == 0
    assert len(report["result"]["cells"]) == 2
    assert report["result"]["rejected"] == []

# --- Exit codes ---

def test_unknown_map_exit_code():
    """Test that an unknown alias exits with the degeneracy code."""
    assert main(["height", "--map", "nope", "--point", "1"]) == 2

def test_degenerate_map_exit_code(tmp_path):
    """Test that a map with vanishing resultant is rejected."""
    path = tmp_path / "degenerate.json"
    path.write_text(json.dumps({"num": [0, 1, 1], "den": [0, 1]}))
    assert main(["classify", "--map", str(path)]) == 2

def test_budget_exit_code():
    """Test that an unreachable error target exhausts the iteration budget."""
    assert main(["height", "--map", "z2m1", "--point", "3/2", "--target-error", "1e-300"]) == 3

def test_negative_tolerance_exit_code():
    """Test the tolerance check on flags."""
    assert main(["prep", "--map", "z2", "--tol=-1"]) == 2

def test_environment_tolerance_exit_code(monkeypatch):
    """Test the tolerance check on SD_TOL."""
    monkeypatch.setenv("SD_TOL", "-1")
    assert main(["prep", "--map", "z2"]) == 2

def test_environment_bit_cap_exit_code(monkeypatch):
    """Test that SD_BIT_CAP bounds the iterates behind prep."""
    monkeypatch.setenv("SD_BIT_CAP", "4")
    assert main(["prep", "--map", "z2m2"]) == 3

def test_environment_bit_cap_leaves_orbit_unresolved(monkeypatch, capsys):
    """Test that a tiny SD_BIT_CAP stops the critical orbit of z^2 + 1 before it escapes."""
    monkeypatch.setenv("SD_BIT_CAP", "1")
    code, report = run_json(capsys, "classify", "--map", "z2p1")
    assert code == 0
    assert report["result"]["pcf"] == "Unknown"
    assert report["result"]["class"]["tag"] == "Unknown"

def test_load_settings_root_max_iter(monkeypatch):
    """Test the SD_ROOT_MAX_ITER override."""
    monkeypatch.setenv("SD_ROOT_MAX_ITER", "50")
    assert load_settings().root_max_iter == 50
    assert load_settings(base=Settings(root_max_iter=9)).root_max_iter == 50

def test_environment_root_max_iter_exit_code(monkeypatch):
    """Test that SD_ROOT_MAX_ITER reaches the root finder."""
    monkeypatch.setenv("SD_ROOT_MAX_ITER", "1")
    assert main(["prep", "--map", "z2m2", "--budget-m", "1", "--budget-n", "2"]) == 4

def test_environment_degree_cap_limits_az(monkeypatch):
    """Test that SD_DEGREE_CAP bounds the periodic points behind az."""
    monkeypatch.setenv("SD_DEGREE_CAP", "4")
    assert main(["az", "--map1", "z2", "--map2", "z2m2", "--n", "3"]) == 3

def test_settings_reach_library_calls(monkeypatch):
    """Test that bit and iteration caps are passed on by measure and az."""
    monkeypatch.setenv("SD_BIT_CAP", "123")
    monkeypatch.setenv("SD_ROOT_MAX_ITER", "77")
    monkeypatch.setenv("SD_DEGREE_CAP", "999")
    with patch("splitdyn.cli.arakelov_zhang_estimate", return_value=HeightEstimate(0.0, 0.0, [])) as az:
        assert main(["az", "--map1", "z2", "--map2", "z2", "--n", "2"]) == 0
    assert az.call_args.kwargs == {"degree_cap": 999, "bit_cap": 123, "max_iter": 77}
    with patch("splitdyn.cli.backward_sample", wraps=backward_sample) as sampler:
        assert main(["measure", "--map", "z2", "--depth", "2", "--width", "200"]) == 0
    assert sampler.call_args.kwargs["max_iter"] == 77

def test_bad_point_exit_code():
    """Test a malformed point."""
    assert main(["height", "--map", "z2", "--point", "x/y"]) == 2
