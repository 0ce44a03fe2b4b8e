"""The knot invariant Y = k p Z, comparisons, and the Markov-move checks."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .braid import BraidWord, closure_components, concat, stabilize
from .circle import (
    CircleDiagram,
    CircleElement,
    GradedBasis,
    IdealBasis,
    build_graded_basis,
    default_ideal,
    project_k,
    projection_matrix,
)
from .horizontal import BraidElement, NotAKnotError, _close_word, close, closure_order, strand_pairs
from .kz import closed_form_power, transport


@dataclass(frozen=True)
class InvariantValue:
    N: int
    coords: tuple[tuple, ...]
    errors: tuple[float, ...]
    basis: tuple[tuple[CircleDiagram, ...], ...]
    exact: bool = False
    amplification: float = 1.0

    def coordinate(self, m: int, index: int = 0):
        return self.coords[m][index]

    def flat(self) -> list:
        return [c for cs in self.coords for c in cs]

    def flat_errors(self) -> list[float]:
        return [self.errors[m] for m, cs in enumerate(self.coords) for _ in cs]

    def max_imag(self) -> float:
        return max((abs(complex(c).imag) for c in self.flat()), default=0.0)


class Verdict(enum.Enum):
    EQUAL_WITHIN_TOL = "EQUAL_WITHIN_TOL"
    DISTINCT = "DISTINCT"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class ComparisonVerdict:
    verdict: Verdict
    distances: tuple[tuple[float, ...], ...]
    bounds: tuple[tuple[float, ...], ...]
    margin_factor: float

    @property
    def max_distance(self) -> float:
        return max((d for ds in self.distances for d in ds), default=0.0)

    @property
    def combined_bound(self) -> float:
        return max((b for bs in self.bounds for b in bs), default=0.0)


@dataclass
class CheckReport:
    name: str
    status: str  # PASS, FAIL, INDETERMINATE, SKIPPED
    max_distance: float = 0.0
    bound: float = 0.0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status in ("PASS", "SKIPPED")


@lru_cache(maxsize=None)
def _abs_projection(N: int) -> tuple[np.ndarray, dict]:
    gb, ib = build_graded_basis(N), default_ideal(N)
    M, labels = projection_matrix(gb, ib)
    A = np.abs(np.array([[float(x) for x in row] for row in M], dtype=float)).reshape(len(M), len(labels))
    return A, {lab: j for j, lab in enumerate(labels)}


@lru_cache(maxsize=None)
def _abs_four_t(N: int) -> tuple[np.ndarray, dict]:
    gb = build_graded_basis(N)
    labels = [(s.m, d) for s in gb.slices for d in s.diagrams]
    cols = []
    for m, d in labels:
        cols.append([float(abs(x)) for x in gb.reduce(CircleElement({d: Fraction(1)}, N))])
    A = np.array(cols, dtype=float).T.reshape(gb.total_dim, len(labels))
    return A, {lab: j for j, lab in enumerate(labels)}


def closure_errors(e: BraidElement, b: BraidWord, word_errors: Sequence[float]) -> dict[CircleDiagram, float]:
    """Error bound on each circle coefficient of ``close(e, b)``: words that
    close to the same diagram add their per-word bounds."""
    order = tuple(closure_order(b))
    out: dict[CircleDiagram, float] = {}
    pairs = strand_pairs(b.strand_count)
    for m in range(e.degree + 1):
        if not word_errors[m]:
            continue
        for w in itertools.product(pairs, repeat=m):
            d = _close_word(order, w)
            out[d] = out.get(d, 0.0) + word_errors[m]
    return out


def _propagate(abs_matrix: np.ndarray, index: dict, diag_err: dict[CircleDiagram, float]) -> np.ndarray:
    v = np.zeros(abs_matrix.shape[1])
    for d, err in diag_err.items():
        v[index[(d.chord_count, d)]] += err
    return abs_matrix @ v


def _require_knot(b: BraidWord) -> None:
    k = closure_components(b)
    if k != 1:
        raise NotAKnotError(k)


def _bases(N, gb, ib):
    gb = gb or build_graded_basis(N)
    ib = ib or default_ideal(N)
    if gb.N != N or ib.N != N:
        raise ValueError("bases were built for a different truncation degree")
    return gb, ib


def compute_Y(b: BraidWord, endpoints=None, N: int = 3, tol: float = 1e-10,
              gb: GradedBasis | None = None, ib: IdealBasis | None = None) -> InvariantValue:
    _require_knot(b)
    gb, ib = _bases(N, gb, ib)
    tr = transport(b, endpoints, N, tol)
    circ = close(tr.value, b)
    proj = project_k(circ, gb, ib)
    A, index = _abs_projection(N)
    flat_err = _propagate(A, index, closure_errors(tr.value, b, tr.errors))
    errors = [0.0] * (N + 1)
    for j, col in enumerate(ib.quotient_columns):
        m = ib.column_degree[col]
        errors[m] = max(errors[m], float(flat_err[j]))
    coords = tuple(tuple(complex(c) for c in cs) for cs in proj.coords)
    return InvariantValue(N, coords, tuple(errors), proj.basis, False, proj.amplification)


def compute_Y_exact_two_strand(k: int, N: int = 3, gb: GradedBasis | None = None,
                               ib: IdealBasis | None = None) -> InvariantValue:
    if k % 2 == 0:
        raise NotAKnotError(2)
    gb, ib = _bases(N, gb, ib)
    b = BraidWord.from_tokens([1 if k > 0 else -1] * abs(k), 2)
    proj = project_k(close(closed_form_power(k, N), b), gb, ib)
    return InvariantValue(N, proj.coords, (0.0,) * (N + 1), proj.basis, True, 1.0)


def compare_values(y1: InvariantValue, y2: InvariantValue, margin_factor: float = 10.0) -> ComparisonVerdict:
    if y1.N != y2.N:
        raise ValueError("invariants were computed at different truncation degrees")
    distances, bounds = [], []
    for m in range(y1.N + 1):
        distances.append(tuple(abs(complex(a) - complex(b)) for a, b in zip(y1.coords[m], y2.coords[m])))
        bounds.append(tuple(y1.errors[m] + y2.errors[m] for _ in y1.coords[m]))
    pairs = [(d, bd) for ds, bs in zip(distances, bounds) for d, bd in zip(ds, bs)]
    if any(d > bd * (1 + margin_factor) for d, bd in pairs):
        verdict = Verdict.DISTINCT
    elif all(d <= bd for d, bd in pairs):
        verdict = Verdict.EQUAL_WITHIN_TOL
    else:
        verdict = Verdict.INDETERMINATE
    return ComparisonVerdict(verdict, tuple(distances), tuple(bounds), margin_factor)


def compare(b1: BraidWord, b2: BraidWord, endpoints=None, N: int = 3, tol: float = 1e-10,
            gb=None, ib=None, endpoints2=None, margin_factor: float = 10.0) -> ComparisonVerdict:
    y1 = compute_Y(b1, endpoints, N, tol, gb, ib)
    y2 = compute_Y(b2, endpoints2, N, tol, gb, ib)
    return compare_values(y1, y2, margin_factor)


def pZ_coordinates(b: BraidWord, endpoints=None, N: int = 3, tol: float = 1e-10):
    """4T-reduced coordinates of p Z(b) in A_0 + ... + A_N with error bounds."""
    _require_knot(b)
    gb = build_graded_basis(N)
    tr = transport(b, endpoints, N, tol)
    v = gb.reduce(close(tr.value, b), exact=False)
    A, index = _abs_four_t(N)
    err = _propagate(A, index, closure_errors(tr.value, b, tr.errors))
    return v, err


def verify_markov1(b1: BraidWord, b2: BraidWord, endpoints=None, N: int = 3, tol: float = 1e-10) -> CheckReport:
    """Conjugation invariance of p Z, checked in A before the ideal quotient.

    A product whose closure is not a knot gives a SKIPPED report.
    """
    name = f"markov1[{b1} | {b2}; n={b1.strand_count}]"
    k = closure_components(concat(b1, b2))
    if k != 1:
        return CheckReport(name, "SKIPPED", detail=f"closure has {k} components")
    v1, e1 = pZ_coordinates(concat(b1, b2), endpoints, N, tol)
    v2, e2 = pZ_coordinates(concat(b2, b1), endpoints, N, tol)
    dist = np.abs(v1 - v2)
    bound = e1 + e2
    ok = bool(np.all(dist <= bound))
    return CheckReport(name, "PASS" if ok else "FAIL", float(dist.max(initial=0.0)), float(bound.max(initial=0.0)))


def verify_markov2(b: BraidWord, sign: int, endpoints=None, N: int = 3, tol: float = 1e-10) -> CheckReport:
    """Stabilization invariance of Y, at finite separation of the new strand."""
    y1 = compute_Y(b, endpoints, N, tol)
    ep2 = None if endpoints is None else tuple(endpoints) + (max(endpoints) + 1,)
    y2 = compute_Y(stabilize(b, sign), ep2, N, tol)
    cv = compare_values(y1, y2)
    status = {Verdict.EQUAL_WITHIN_TOL: "PASS", Verdict.DISTINCT: "FAIL",
              Verdict.INDETERMINATE: "INDETERMINATE"}[cv.verdict]
    name = f"markov2[{b}; n={b.strand_count}; sign={sign:+d}]"
    return CheckReport(name, status, cv.max_distance, cv.combined_bound, cv.verdict.value)
