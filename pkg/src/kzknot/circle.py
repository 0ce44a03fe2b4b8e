"""Chord diagrams on an oriented circle modulo 4T, and the quotient by the
ideal generated by the closed single-crossing elements.

A diagram with ``m`` chords is stored as its partner array on the points
``0 .. 2m-1`` in cyclic order, canonicalized over rotations only (reflections
reverse the orientation and are not identified).  Serialization uses 1-based
points, e.g. ``[(1,4),(2,5),(3,6)]``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactlin import SubspaceBasis, reduce_mod, row_reduce


@dataclass(frozen=True, order=True)
class CircleDiagram:
    partners: tuple[int, ...]

    @property
    def chord_count(self) -> int:
        return len(self.partners) // 2

    @property
    def chords(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.partners) if i < j]

    def __str__(self):
        return "[" + ",".join(f"({i + 1},{j + 1})" for i, j in self.chords) + "]"

    def __repr__(self):
        return f"CircleDiagram({self})"


def _check_matching(partners: Sequence[int]) -> None:
    n = len(partners)
    if n % 2:
        raise ValueError("a chord diagram has an even number of endpoints")
    for i, j in enumerate(partners):
        if not 0 <= j < n or j == i or partners[j] != i:
            raise ValueError(f"malformed pairing at point {i + 1}")


def rotate(partners: Sequence[int], shift: int) -> tuple[int, ...]:
    """Relabel point ``i`` as ``i + shift`` (mod 2m)."""
    n = len(partners)
    out = [0] * n
    for i, j in enumerate(partners):
        out[(i + shift) % n] = (j + shift) % n
    return tuple(out)


def canonical_form(partners: Sequence[int]) -> CircleDiagram:
    partners = tuple(partners)
    _check_matching(partners)
    if not partners:
        return CircleDiagram(())
    return CircleDiagram(min(rotate(partners, k) for k in range(len(partners))))


def from_chords(chords: Iterable[tuple[int, int]], one_based: bool = True) -> CircleDiagram:
    chords = list(chords)
    off = 1 if one_based else 0
    partners = [-1] * (2 * len(chords))
    for a, b in chords:
        a, b = a - off, b - off
        if not (0 <= a < len(partners) and 0 <= b < len(partners)) or partners[a] != -1 or partners[b] != -1:
            raise ValueError(f"malformed chord list {chords}")
        partners[a], partners[b] = b, a
    return canonical_form(partners)


def parse_diagram(text: str) -> CircleDiagram:
    pairs = re.findall(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", text)
    if not pairs and text.strip() not in ("[]", ""):
        raise ValueError(f"cannot parse chord list {text!r}")
    return from_chords((int(a), int(b)) for a, b in pairs)


EMPTY = CircleDiagram(())


def opposite_diagram(m: int) -> CircleDiagram:
    """The m-chord diagram whose chords join diametrically opposite points."""
    return canonical_form([(i + m) % (2 * m) for i in range(2 * m)])


def _matchings(points: list[int]):
    if not points:
        yield []
        return
    a = points[0]
    for k in range(1, len(points)):
        b = points[k]
        rest = points[1:k] + points[k + 1:]
        for m in _matchings(rest):
            yield [(a, b)] + m


def all_matchings(m: int) -> list[tuple[int, ...]]:
    out = []
    for pairs in _matchings(list(range(2 * m))):
        partners = [0] * (2 * m)
        for a, b in pairs:
            partners[a], partners[b] = b, a
        out.append(tuple(partners))
    return out


@lru_cache(maxsize=None)
def enumerate_diagrams(m: int) -> tuple[CircleDiagram, ...]:
    if m < 0:
        raise ValueError("m must be >= 0")
    return tuple(sorted({canonical_form(p) for p in all_matchings(m)}))


def connected_sum(d1: CircleDiagram, d2: CircleDiagram) -> CircleDiagram:
    """Splice the circles in the arc just before point 1 of each."""
    k = len(d1.partners)
    return canonical_form(d1.partners + tuple(j + k for j in d2.partners))


# -- 4T ----------------------------------------------------------------------


def _seq_to_diagram(seq: Sequence) -> CircleDiagram:
    where: dict = {}
    partners = [0] * len(seq)
    for i, label in enumerate(seq):
        if label in where:
            j = where.pop(label)
            partners[i], partners[j] = j, i
        else:
            where[label] = i
    return canonical_form(partners)


def four_term_terms(core: CircleDiagram, chord: int, gap: int) -> list[tuple[int, CircleDiagram]]:
    """The four signed diagrams of one 4T relation.

    ``chord`` indexes the fixed chord ``(u1, u2)`` of ``core``; the free end of
    the moving chord goes into ``gap`` (just before point ``gap``) and its other
    end is placed immediately before/after ``u1`` and before/after ``u2``.
    """
    labels = [None] * len(core.partners)
    for c, (i, j) in enumerate(core.chords):
        labels[i] = labels[j] = c
    u1, u2 = core.chords[chord]
    seq = [("pt", p, labels[p]) for p in range(len(labels))]
    seq.insert(gap, ("w", None, "X"))

    def with_end(p: int, after: bool):
        s = list(seq)
        idx = next(k for k, e in enumerate(s) if e[0] == "pt" and e[1] == p)
        s.insert(idx + 1 if after else idx, ("s", None, "X"))
        return _seq_to_diagram([e[2] for e in s])

    return [
        (1, with_end(u1, after=False)),
        (-1, with_end(u1, after=True)),
        (1, with_end(u2, after=False)),
        (-1, with_end(u2, after=True)),
    ]


def generate_4t(m: int) -> list[list[Fraction]]:
    """Relation vectors over ``enumerate_diagrams(m)``, duplicates removed."""
    diagrams = enumerate_diagrams(m)
    index = {d: i for i, d in enumerate(diagrams)}
    if m < 2:
        return []
    seen = set()
    out = []
    for core in enumerate_diagrams(m - 1):
        for chord in range(m - 1):
            for gap in range(2 * (m - 1)):
                v = [0] * len(diagrams)
                for sgn, d in four_term_terms(core, chord, gap):
                    v[index[d]] += sgn
                if not any(v):
                    continue
                lead = next(x for x in v if x)
                key = tuple(x if lead > 0 else -x for x in v)
                if key not in seen:
                    seen.add(key)
                    out.append([Fraction(x) for x in key])
    return out


# -- elements ----------------------------------------------------------------


class CircleElement:
    """Finite linear combination of circle diagrams of degree at most ``degree``."""

    def __init__(self, terms: Mapping[CircleDiagram, object] | None = None, degree: int = 0):
        self.degree = degree
        self.terms: dict[CircleDiagram, object] = {}
        for d, c in (terms or {}).items():
            if d.chord_count > degree:
                raise ValueError(f"diagram {d} exceeds tracked degree {degree}")
            if c != 0:
                self.terms[d] = self.terms.get(d, 0) + c

    @classmethod
    def unit(cls, degree: int = 0) -> "CircleElement":
        return cls({EMPTY: Fraction(1)}, degree)

    def __getitem__(self, d: CircleDiagram):
        return self.terms.get(d, 0)

    def __add__(self, other: "CircleElement") -> "CircleElement":
        terms = dict(self.terms)
        for d, c in other.terms.items():
            terms[d] = terms.get(d, 0) + c
        return CircleElement(terms, max(self.degree, other.degree))

    def __sub__(self, other: "CircleElement") -> "CircleElement":
        return self + other.scale(-1)

    def scale(self, c) -> "CircleElement":
        return CircleElement({d: c * x for d, x in self.terms.items()}, self.degree)

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other: "CircleElement") -> "CircleElement":
        """Connected-sum product, truncated at the smaller tracked degree."""
        N = min(self.degree, other.degree)
        terms: dict = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                if d1.chord_count + d2.chord_count <= N:
                    d = connected_sum(d1, d2)
                    terms[d] = terms.get(d, 0) + c1 * c2
        return CircleElement(terms, N)

    def truncate(self, N: int) -> "CircleElement":
        return CircleElement({d: c for d, c in self.terms.items() if d.chord_count <= N}, N)

    def by_degree(self, m: int) -> dict[CircleDiagram, object]:
        return {d: c for d, c in self.terms.items() if d.chord_count == m}

    def __eq__(self, other):
        return isinstance(other, CircleElement) and self.terms == other.terms

    def __repr__(self):
        body = " + ".join(f"{c}*{d}" for d, c in sorted(self.terms.items()))
        return f"CircleElement({body or '0'}; N={self.degree})"


def r_plus_minus(sign: int, N: int) -> CircleElement:
    """Closed single crossing minus the unit: sum of (sign/2)^m/m! times the
    m-chord diagram with diametrically opposite endpoints."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if N < 1:
        raise ValueError("N must be >= 1")
    half = Fraction(sign, 2)
    return CircleElement({opposite_diagram(m): half**m / math.factorial(m) for m in range(1, N + 1)}, N)


# -- graded bases ------------------------------------------------------------


@dataclass(frozen=True)
class DegreeSlice:
    m: int
    diagrams: tuple[CircleDiagram, ...]
    relations: SubspaceBasis

    @cached_property
    def index(self) -> dict[CircleDiagram, int]:
        return {d: i for i, d in enumerate(self.diagrams)}

    @property
    def dim(self) -> int:
        return len(self.relations.free_columns)

    @property
    def quotient_diagrams(self) -> tuple[CircleDiagram, ...]:
        return tuple(self.diagrams[j] for j in self.relations.free_columns)


@dataclass(frozen=True)
class GradedBasis:
    """Per-degree 4T quotients ``A_0 .. A_N``; coordinates of ``A_m`` are the
    non-pivot diagrams of the reduced 4T span."""

    N: int
    slices: tuple[DegreeSlice, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.slices)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, k = [], 0
        for s in self.slices:
            out.append(k)
            k += s.dim
        return tuple(out)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def ambient_vector(self, e: CircleElement, m: int, kind=Fraction):
        sl = self.slices[m]
        if kind is Fraction:
            v = [Fraction(0)] * len(sl.diagrams)
        else:
            v = np.zeros(len(sl.diagrams), dtype=complex)
        for d, c in e.by_degree(m).items():
            v[sl.index[d]] += c
        return v

    def reduce(self, e: CircleElement, exact: bool = True):
        """Concatenated 4T-quotient coordinates of ``e`` over all degrees."""
        if e.terms and max(d.chord_count for d in e.terms) > self.N:
            raise ValueError(f"element has degree above the basis degree {self.N}")
        parts = []
        for sl in self.slices:
            v = self.ambient_vector(e, sl.m, Fraction if exact else complex)
            r = reduce_mod(v, sl.relations)
            free = sl.relations.free_columns
            parts.append([r[j] for j in free] if exact else r[list(free)])
        if exact:
            return [x for p in parts for x in p]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)

    @property
    def amplification(self) -> float:
        return max(s.relations.amplification for s in self.slices)

    def to_json(self) -> dict:
        return {
            "degree": self.N,
            "degrees": [
                {
                    "m": s.m,
                    "diagrams": [str(d) for d in s.diagrams],
                    "relation_rank": s.relations.rank,
                    "dim": s.dim,
                    "quotient_basis": [str(d) for d in s.quotient_diagrams],
                }
                for s in self.slices
            ],
        }


@lru_cache(maxsize=None)
def build_graded_basis(N: int) -> GradedBasis:
    if N < 0:
        raise ValueError("N must be >= 0")
    slices = []
    for m in range(N + 1):
        diagrams = enumerate_diagrams(m)
        rels = row_reduce(generate_4t(m), ncols=len(diagrams))
        slices.append(DegreeSlice(m, diagrams, rels))
    return GradedBasis(N, tuple(slices))


# -- the ideal and the projection ---------------------------------------------


@dataclass(frozen=True)
class IdealBasis:
    """The truncated ideal inside the concatenated 4T-quotient coordinates.

    The ideal is not graded (its generators mix degrees), so it is kept as one
    subspace of ``A_0 + ... + A_N``.  Columns are ordered by ascending degree,
    so pivots sit on the lowest degree of each reduced generator and the
    surviving coordinates lean towards high degree.
    """

    N: int
    gb: GradedBasis
    subspace: SubspaceBasis

    @cached_property
    def column_degree(self) -> tuple[int, ...]:
        return tuple(s.m for s in self.gb.slices for _ in range(s.dim))

    @cached_property
    def column_diagram(self) -> tuple[CircleDiagram, ...]:
        return tuple(d for s in self.gb.slices for d in s.quotient_diagrams)

    @property
    def quotient_columns(self) -> tuple[int, ...]:
        return self.subspace.free_columns

    def quotient_basis(self, m: int) -> list[CircleDiagram]:
        return [self.column_diagram[j] for j in self.quotient_columns if self.column_degree[j] == m]

    @property
    def quotient_dims(self) -> tuple[int, ...]:
        dims = [0] * (self.N + 1)
        for j in self.quotient_columns:
            dims[self.column_degree[j]] += 1
        return tuple(dims)

    def degree_slice(self, m: int) -> list[list[Fraction]]:
        """Rows of a basis of (ideal) intersected with degree-m coordinates."""
        lo = self.gb.offsets[m]
        hi = lo + self.gb.slices[m].dim
        outside = [j for j in range(self.subspace.dim) if not lo <= j < hi]
        # kill the outside coordinates by elimination with those columns first
        order = outside + list(range(lo, hi))
        rows = [[row[j] for j in order] for row in self.subspace.rows]
        if not rows:
            return []
        rr = row_reduce(rows, ncols=len(order))
        k = len(outside)
        return [list(row[k:]) for row, p in zip(rr.rows, rr.pivots) if p >= k]


def build_ideal(N: int, gb: GradedBasis | None = None,
                generators: Sequence[CircleElement] | None = None) -> IdealBasis:
    if N < 0:
        raise ValueError("N must be >= 0")
    gb = gb or build_graded_basis(N)
    if gb.N < N:
        raise ValueError(f"graded basis only reaches degree {gb.N}")
    gb = gb if gb.N == N else build_graded_basis(N)
    if generators is None:
        generators = [r_plus_minus(1, N), r_plus_minus(-1, N)] if N >= 1 else []
    rows = []
    for m in range(N):
        for D in enumerate_diagrams(m):
            De = CircleElement({D: Fraction(1)}, N)
            for r in generators:
                prod = r.truncate(N) * De
                v = gb.reduce(prod)
                if any(v):
                    rows.append(v)
    return IdealBasis(N, gb, row_reduce(rows, ncols=gb.total_dim))


@lru_cache(maxsize=None)
def default_ideal(N: int) -> IdealBasis:
    return build_ideal(N, build_graded_basis(N))


@dataclass(frozen=True)
class Projection:
    """Coordinates of an element of the quotient, grouped by degree."""

    coords: tuple[tuple, ...]
    basis: tuple[tuple[CircleDiagram, ...], ...]
    amplification: float

    def flat(self) -> list:
        return [c for cs in self.coords for c in cs]


def project_k(e: CircleElement, gb: GradedBasis, ib: IdealBasis) -> Projection:
    exact = all(not isinstance(c, (float, complex, np.number)) for c in e.terms.values())
    v = gb.reduce(e, exact=exact)
    r = reduce_mod(v if exact else np.asarray(v, dtype=complex), ib.subspace)
    coords = [[] for _ in range(ib.N + 1)]
    for j in ib.quotient_columns:
        coords[ib.column_degree[j]].append(r[j])
    amp = 1.0 if exact else gb.amplification * ib.subspace.amplification
    return Projection(
        tuple(tuple(c) for c in coords),
        tuple(tuple(ib.quotient_basis(m)) for m in range(ib.N + 1)),
        amp,
    )


def projection_matrix(gb: GradedBasis, ib: IdealBasis) -> tuple[list[list[Fraction]], list[tuple[int, CircleDiagram]]]:
    """Exact matrix from raw diagram coordinates (all degrees, in enumeration
    order) to quotient coordinates; also returns the column labels."""
    labels = [(s.m, d) for s in gb.slices for d in s.diagrams]
    cols = []
    for m, d in labels:
        e = CircleElement({d: Fraction(1)}, gb.N)
        v = gb.reduce(e)
        r = reduce_mod(v, ib.subspace)
        cols.append([r[j] for j in ib.quotient_columns])
    rows = [list(col) for col in zip(*cols)] if cols else []
    return rows, labels


def dims_table(N: int) -> list[dict]:
    gb = build_graded_basis(N)
    qdims = default_ideal(N).quotient_dims
    return [
        {
            "m": s.m,
            "diagrams": len(s.diagrams),
            "relation_rank": s.relations.rank,
            "dim_A": s.dim,
            "dim_quotient": qdims[s.m],
        }
        for s in gb.slices
    ]


def basis_json(N: int) -> str:
    return json.dumps(build_graded_basis(N).to_json(), indent=2)
