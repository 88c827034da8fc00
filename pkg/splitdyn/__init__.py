from .types import (
    ProjPointQ,
    ProjPointC,
    BinaryForm,
    RationalMap,
    HeightEstimate,
    CurveP1xP1,
    EmpiricalMeasure,
    ParamFamily,
    RunConfig,
)
from .arith import make_map, map_from_literal, normalize_lift, iterate, compose
from .heights import canonical_height, canonical_height_split
from .dynamics import classify_exceptional, preperiodic_points, weakly_special_screen
from .measures import backward_sample, mutual_energy, measure_equality_test
from .families import make_family, specialize, dky_scan, fit_height_inequality
from .scan_executor import ScanExecutor
from .utils import SplitDynError


__version__ = "0.1.0"

__all__ = [
    'ProjPointQ',
    'ProjPointC',
    'BinaryForm',
    'RationalMap',
    'HeightEstimate',
    'CurveP1xP1',
    'EmpiricalMeasure',
    'ParamFamily',
    'RunConfig',
    'make_map',
    'map_from_literal',
    'normalize_lift',
    'iterate',
    'compose',
    'canonical_height',
    'canonical_height_split',
    'classify_exceptional',
    'preperiodic_points',
    'weakly_special_screen',
    'backward_sample',
    'mutual_energy',
    'measure_equality_test',
    'make_family',
    'specialize',
    'dky_scan',
    'fit_height_inequality',
    'ScanExecutor',
    'SplitDynError',
]
