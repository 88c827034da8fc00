from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class ProjPointQ:
    x: int
    y: int  # y > 0, or (1, 0) at infinity

    @property
    def is_infinity(self) -> bool:
        return self.y == 0

    def to_fraction(self) -> Fraction:
        if self.y == 0:
            raise ValueError("Point at infinity has no affine coordinate")
        return Fraction(self.x, self.y)

    def __str__(self) -> str:
        if self.y == 0:
            return "inf"
        if self.y == 1:
            return str(self.x)
        return f"{self.x}/{self.y}"


@dataclass(frozen=True)
class ProjPointC:
    x: complex
    y: complex

    @property
    def is_infinity(self) -> bool:
        return self.y == 0

    def to_affine(self) -> complex:
        """Affine coordinate x/y; complex infinity when y == 0"""
        if self.y == 0:
            return complex(float("inf"), 0.0)
        return self.x / self.y

    def __str__(self) -> str:
        if self.y == 0:
            return "inf"
        z = self.x / self.y
        return f"{z.real:.17g}{z.imag:+.17g}j"


@dataclass(frozen=True)
class BinaryForm:
    degree: int
    coefficients: Tuple[int, ...]  # coefficients[i] multiplies x^i y^(degree - i)

    def __post_init__(self):
        if len(self.coefficients) != self.degree + 1:
            raise ValueError(
                f"Form of degree {self.degree} needs {self.degree + 1} coefficients, "
                f"got {len(self.coefficients)}"
            )

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)


@dataclass(frozen=True)
class RationalMap:
    degree: int
    P: BinaryForm
    Q: BinaryForm
    res: int  # Sylvester resultant, P-rows first

    def __str__(self) -> str:
        return f"RationalMap(d={self.degree}, P={list(self.P.coefficients)}, Q={list(self.Q.coefficients)})"


@dataclass(frozen=True)
class Place:
    p: Optional[int] = None  # None is the archimedean place

    @property
    def is_archimedean(self) -> bool:
        return self.p is None

    def __str__(self) -> str:
        return "arch" if self.p is None else str(self.p)


ARCHIMEDEAN = Place()


@dataclass
class HeightEstimate:
    value: float
    error: float
    place_breakdown: Optional[List[Tuple[Place, float]]] = None

    def contains(self, x: float) -> bool:
        return self.value - self.error <= x <= self.value + self.error


@dataclass
class OrbitRecord:
    points: List[ProjPointQ]
    tail_length: int
    cycle_length: Optional[int]
    verdict: Literal["Preperiodic", "Escaping", "Budget"]


@dataclass(frozen=True)
class CurveP1xP1:
    bidegree: Tuple[int, int]
    coefficients: Tuple[Tuple[int, ...], ...]  # [i][j] multiplies x1^i x2^(d1-i) y1^j y2^(d2-j)
    irreducible: bool = True

    def __post_init__(self):
        d1, d2 = self.bidegree
        if len(self.coefficients) != d1 + 1 or any(len(row) != d2 + 1 for row in self.coefficients):
            raise ValueError(f"Coefficient matrix does not match bidegree {self.bidegree}")
        if not any(c for row in self.coefficients for c in row):
            raise ValueError("Curve form must be nonzero")


@dataclass
class ExceptionalClass:
    tag: Literal["PowerConjugate", "ChebyshevConjugate", "LattesLike", "Ordinary", "Unknown"]
    evidence: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag, "evidence": list(self.evidence)}


@dataclass
class CurveVerdict:
    tag: Literal["Preperiodic", "NoRepetition"]
    m: Optional[int] = None
    n: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag, "m": self.m, "n": self.n}


@dataclass
class SpecialVerdict:
    tag: Literal["Special", "NotSpecialEvidence", "Unknown"]
    evidence: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag, "evidence": list(self.evidence)}


@dataclass
class EmpiricalMeasure:
    points: np.ndarray  # shape (N, k, 2): homogeneous coordinates on k factors of P^1
    weights: np.ndarray  # shape (N,), sums to 1
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def factors(self) -> int:
        return int(self.points.shape[1])

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def samples(self) -> List[Tuple[Tuple[ProjPointC, ...], float]]:
        return [
            (tuple(ProjPointC(complex(u[0]), complex(u[1])) for u in row), float(w))
            for row, w in zip(self.points, self.weights)
        ]

    def affine(self, factor: int = 0) -> np.ndarray:
        """Affine coordinates of one factor; inf where the point is at infinity"""
        x = self.points[:, factor, 0]
        y = self.points[:, factor, 1]
        out = np.full(x.shape, complex(np.inf, 0.0))
        finite = y != 0
        out[finite] = x[finite] / y[finite]
        return out


@dataclass
class DivisorP1:
    points: List[Tuple[Any, int]]  # (ProjPointC | ProjPointQ, multiplicity)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.points)


@dataclass
class EnergyDecision:
    decision: Literal["Equal", "NotEqual", "Inconclusive"]
    statistic: float
    se: float

    def to_dict(self) -> Dict[str, Any]:
        return {"decision": self.decision, "statistic": self.statistic, "se": self.se}


@dataclass
class ParamFamily:
    degree: int
    num_coeffs: List[List[int]]  # num_coeffs[i]: polynomial in t (ascending) multiplying z^i
    den_coeffs: List[List[int]]
    resultant_poly: List[int]
    second: Optional["ParamFamily"] = None

    @property
    def is_pair(self) -> bool:
        return self.second is not None


@dataclass
class BadParameters:
    rational: List[Fraction]
    complex: List[complex]


@dataclass
class SmallPoint:
    x: ProjPointC
    y: ProjPointC
    height: float
    numeric: bool  # True when the height is an archimedean surrogate


@dataclass
class SmallPointsReport:
    count: int
    points: List[SmallPoint]
    empirical_min: float
    candidates: int


@dataclass
class DkyCell:
    t1: Fraction
    t2: Fraction
    count: int
    min_height: float


@dataclass
class DkyTable:
    cells: List[DkyCell]
    rejected: List[Tuple[Fraction, Fraction]]

    @property
    def max_count(self) -> int:
        return max((c.count for c in self.cells), default=0)


@dataclass
class HeightFit:
    c1: float
    c2: float
    support: List[Tuple[float, float]]  # (h(t), canonical height)
    violations: int
    slope: float  # asymptotic slope estimate
    skipped: List[Fraction] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)


@dataclass
class RunConfig:
    command: str
    inputs: Dict[str, Any]
    seed: int = 0
    tol: float = 1e-8
    target_error: float = 1e-6
    budget_m: int = 3
    budget_n: int = 4
    depth: int = 20
    width: int = 10000
    emit: Literal["csv", "json"] = "json"
    out: Optional[str] = None
    threads: int = 1

    def echo(self) -> Dict[str, Any]:
        """Config values embedded in every report"""
        return {
            "seed": self.seed,
            "tol": self.tol,
            "target_error": self.target_error,
            "budget_m": self.budget_m,
            "budget_n": self.budget_n,
            "depth": self.depth,
            "width": self.width,
            "emit": self.emit,
        }
