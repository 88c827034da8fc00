"""
Input resolution (aliases and JSON files) and report rendering for the CLI.
"""
import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arith import map_from_literal, map_to_literal
from .dynamics import curve_from_literal, curve_to_literal
from .families import family_from_literal, family_to_literal
from .types import CurveP1xP1, ParamFamily, ProjPointC, ProjPointQ, RationalMap, RunConfig
from .utils import InvalidInput

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / 'data'


def _load_data(name: str) -> Dict[str, Any]:
    with open(DATA_DIR / name, 'r') as f:
        return json.load(f)


def map_aliases() -> Dict[str, dict]:
    return _load_data('maps.json')


def curve_aliases() -> Dict[str, dict]:
    return _load_data('curves.json')


def family_aliases() -> Dict[str, dict]:
    return _load_data('families.json')


def _resolve(source: str, aliases: Dict[str, dict], kind: str) -> dict:
    if source in aliases:
        return aliases[source]
    path = Path(source)
    if not path.is_file():
        raise InvalidInput(f"{source!r} is neither a {kind} alias ({', '.join(sorted(aliases))}) nor a file")
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInput(f"Error reading {kind} file {source}: {e}")


def load_map(source: str) -> RationalMap:
    """Map from a built-in alias or a JSON map literal file."""
    return map_from_literal(_resolve(source, map_aliases(), "map"))


def load_curve(source: str) -> CurveP1xP1:
    return curve_from_literal(_resolve(source, curve_aliases(), "curve"))


def load_family(source: str) -> ParamFamily:
    return family_from_literal(_resolve(source, family_aliases(), "family"))


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidInput(f"Error parsing rational {text!r}: {e}")


def parse_grid(text: str) -> List[Fraction]:
    """
    Parameter grid: "a..b" is the integer range a, a+1, ..., b; anything else is a
    comma-separated list of rationals.
    """
    text = text.strip()
    if ".." in text:
        lo, hi = (parse_rational(part) for part in text.split("..", 1))
        if lo.denominator != 1 or hi.denominator != 1 or hi < lo:
            raise InvalidInput(f"Grid range {text!r} needs integer ends with a <= b")
        return [Fraction(k) for k in range(int(lo), int(hi) + 1)]
    values = [parse_rational(part) for part in text.split(",") if part.strip()]
    if not values:
        raise InvalidInput("Empty parameter grid")
    return values


def parse_section(text: str) -> List[int]:
    """Section polynomial as comma-separated ascending integer coefficients in t."""
    try:
        coeffs = [int(part) for part in text.split(",")]
    except ValueError as e:
        raise InvalidInput(f"Error parsing section {text!r}: {e}")
    return coeffs


# --- Canonical inputs and hashing ---

def canonical_inputs(inputs: Dict[str, Any]) -> Dict[str, Any]:
    """Inputs with maps, curves and families replaced by their normalized literals."""
    out = {}
    for key, value in inputs.items():
        if isinstance(value, RationalMap):
            out[key] = map_to_literal(value)
        elif isinstance(value, CurveP1xP1):
            out[key] = curve_to_literal(value)
        elif isinstance(value, ParamFamily):
            out[key] = family_to_literal(value)
        else:
            out[key] = to_jsonable(value)
    return out


def input_hash(inputs: Dict[str, Any]) -> str:
    """Git-style blob hash (sha256 over "blob <len>\\0" + payload) of the canonical inputs."""
    payload = json.dumps(canonical_inputs(inputs), sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(b"blob %d\x00" % len(payload) + payload).hexdigest()


def to_jsonable(value: Any) -> Any:
    """Recursively convert results to JSON-safe values; floats keep full precision."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        if hasattr(value, 'to_dict'):
            return to_jsonable(value.to_dict())
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, (ProjPointQ, ProjPointC)):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    return str(value)


# --- Reports ---

@dataclasses.dataclass
class CommandOutput:
    result: Any
    header: List[str]
    rows: List[List[str]]
    sidecar: Optional[Dict[str, Any]] = None


def fmt(x: float) -> str:
    return f"{x:.17g}"


def build_report(config: RunConfig, result: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "command": config.command,
        "config": config.echo(),
        "input_hash": input_hash(config.inputs),
        "result": to_jsonable(result),
    }


def render_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def render_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def render(config: RunConfig, output: CommandOutput) -> Tuple[str, Optional[str]]:
    """
    Text of the main output and, for CSV runs with provenance, of the JSON sidecar.
    """
    report = build_report(config, output.result)
    if config.emit == "json":
        return render_json(report), None
    sidecar = None
    if output.sidecar is not None:
        sidecar = render_json(dict(report, result=to_jsonable(output.sidecar)))
    return render_csv(output.header, output.rows), sidecar


def write_output(text: str, out: Optional[str], sidecar: Optional[str] = None) -> None:
    """Single writer: stdout when out is None, else the file plus `<out>.json` for a sidecar."""
    if out is None:
        print(text, end="")
        return
    Path(out).write_text(text)
    if sidecar is not None:
        Path(f"{out}.json").write_text(sidecar)
    logger.debug("wrote %s", out)


__all__ = [
    'map_aliases',
    'curve_aliases',
    'family_aliases',
    'load_map',
    'load_curve',
    'load_family',
    'parse_rational',
    'parse_grid',
    'parse_section',
    'canonical_inputs',
    'input_hash',
    'to_jsonable',
    'CommandOutput',
    'fmt',
    'build_report',
    'render_json',
    'render_csv',
    'render',
    'write_output',
]
