"""Horizontal chord diagrams on braids and the closure map to the circle.

A horizontal diagram is a bottom-to-top word of strand pairs; the strands are
named by their bottom position.  The truncated word algebra is free (the
infinitesimal braid relations are not imposed); the closure map respects them,
and everything downstream is reduced modulo 4T on the circle anyway.  The
relations are available separately for checking identities such as the braid
relation, which only hold modulo them.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .braid import BraidWord, closure_components, permutation, permutation_cycles
from .circle import CircleDiagram, CircleElement, _seq_to_diagram

Pair = tuple[int, int]


class NotAKnotError(ValueError):
    def __init__(self, components: int):
        self.components = components
        super().__init__(f"closure has {components} components, not a knot")


def strand_pairs(n: int) -> tuple[Pair, ...]:
    return tuple(itertools.combinations(range(1, n + 1), 2))


def _norm_pair(p: Sequence[int], n: int) -> Pair:
    i, j = p
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"bad chord {{{i},{j}}} on {n} strands")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class HorizontalDiagram:
    strand_count: int
    word: tuple[Pair, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(_norm_pair(p, self.strand_count) for p in self.word))

    @property
    def degree(self) -> int:
        return len(self.word)

    def __str__(self):
        return ";".join(f"{{{i},{j}}}" for i, j in self.word)


def parse_word(text: str, strand_count: int) -> HorizontalDiagram:
    pairs = re.findall(r"\{\s*(\d+)\s*,\s*(\d+)\s*\}", text)
    return HorizontalDiagram(strand_count, tuple((int(a), int(b)) for a, b in pairs))


class BraidElement:
    """Truncated linear combination of horizontal diagrams on ``strand_count`` strands."""

    def __init__(self, strand_count: int, degree: int, terms: Mapping[tuple[Pair, ...], object] | None = None):
        self.strand_count = strand_count
        self.degree = degree
        self.terms: dict[tuple[Pair, ...], object] = {}
        for w, c in (terms or {}).items():
            w = tuple(_norm_pair(p, strand_count) for p in w)
            if len(w) > degree:
                raise ValueError(f"word of degree {len(w)} exceeds truncation {degree}")
            if c != 0:
                self.terms[w] = self.terms.get(w, 0) + c

    @classmethod
    def unit(cls, strand_count: int, degree: int) -> "BraidElement":
        return cls(strand_count, degree, {(): 1})

    @classmethod
    def chord(cls, strand_count: int, degree: int, i: int, j: int, coeff=1) -> "BraidElement":
        return cls(strand_count, degree, {((i, j),): coeff})

    def __getitem__(self, word) -> object:
        return self.terms.get(tuple(word), 0)

    def __add__(self, other: "BraidElement") -> "BraidElement":
        self._check(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, 0) + c
        return BraidElement(self.strand_count, min(self.degree, other.degree),
                            {w: c for w, c in terms.items() if len(w) <= min(self.degree, other.degree)})

    def __sub__(self, other: "BraidElement") -> "BraidElement":
        return self + other.scale(-1)

    def scale(self, c) -> "BraidElement":
        return BraidElement(self.strand_count, self.degree, {w: c * x for w, x in self.terms.items()})

    def __mul__(self, other: "BraidElement") -> "BraidElement":
        return stack(self, other)

    def _check(self, other: "BraidElement") -> None:
        if self.strand_count != other.strand_count:
            raise ValueError(f"strand counts differ: {self.strand_count} vs {other.strand_count}")

    def truncate(self, N: int) -> "BraidElement":
        return BraidElement(self.strand_count, N, {w: c for w, c in self.terms.items() if len(w) <= N})

    def max_abs_by_degree(self) -> list[float]:
        out = [0.0] * (self.degree + 1)
        for w, c in self.terms.items():
            out[len(w)] = max(out[len(w)], abs(c))
        return out

    def __eq__(self, other):
        return (isinstance(other, BraidElement) and self.strand_count == other.strand_count
                and self.terms == other.terms)

    def __repr__(self):
        body = " + ".join(f"{c}*<{HorizontalDiagram(self.strand_count, w)}>" for w, c in sorted(self.terms.items()))
        return f"BraidElement({body or '0'}; n={self.strand_count}, N={self.degree})"


def relabel(e: BraidElement, mapping: Sequence[int]) -> BraidElement:
    """Rename strand ``s`` to ``mapping[s - 1]`` in every chord."""
    return BraidElement(e.strand_count, e.degree,
                        {tuple((mapping[i - 1], mapping[j - 1]) for i, j in w): c for w, c in e.terms.items()})


def stack(e1: BraidElement, e2: BraidElement, below: BraidWord | None = None) -> BraidElement:
    """Product: diagrams of ``e2`` placed on top of those of ``e1``.

    Chords are labelled by the bottom position of their strand.  When ``e2``
    lives over a braid stacked on ``below`` (the braid carrying ``e1``), its
    labels are renamed to the strands of the composite; pass ``below`` for
    that.  Without it the words are concatenated as they stand.
    """
    e1._check(e2)
    if below is not None:
        images = permutation(below)
        start_at = {top: s for s, top in enumerate(images, start=1)}
        e2 = relabel(e2, [start_at[q] for q in range(1, e2.strand_count + 1)])
    N = min(e1.degree, e2.degree)
    terms: dict = {}
    for w1, c1 in e1.terms.items():
        for w2, c2 in e2.terms.items():
            if len(w1) + len(w2) <= N:
                w = w1 + w2
                terms[w] = terms.get(w, 0) + c1 * c2
    return BraidElement(e1.strand_count, N, terms)


def closure_order(b: BraidWord) -> list[int]:
    """Strands in the order the closed-up circle visits them, starting at strand 1."""
    images = permutation(b)
    cycles = permutation_cycles(images)
    if len(cycles) != 1:
        raise NotAKnotError(len(cycles))
    return cycles[0]


@lru_cache(maxsize=4096)
def _close_word(order: tuple[int, ...], word: tuple[Pair, ...]) -> CircleDiagram:
    ends: dict[int, list[int]] = {s: [] for s in order}
    for height, (i, j) in enumerate(word):
        ends[i].append(height)
        ends[j].append(height)
    return _seq_to_diagram([h for s in order for h in ends[s]])


def close_word(word: Sequence[Pair], b: BraidWord) -> CircleDiagram:
    return _close_word(tuple(closure_order(b)), tuple(_norm_pair(p, b.strand_count) for p in word))


def close(e: BraidElement, b: BraidWord) -> CircleElement:
    if e.strand_count != b.strand_count:
        raise ValueError(f"element has {e.strand_count} strands, braid has {b.strand_count}")
    order = tuple(closure_order(b))
    terms: dict = {}
    for w, c in e.terms.items():
        d = _close_word(order, w)
        terms[d] = terms.get(d, 0) + c
    return CircleElement(terms, e.degree)


def trace_swap_check(e1: BraidElement, e2: BraidElement, b1: BraidWord, b2: BraidWord) -> bool:
    """Exact check of p(c1 c2) = p(c2 c1) for ``c1`` over ``b1``, ``c2`` over ``b2``."""
    left = close(stack(e1, e2, below=b1), b1 * b2)
    right = close(stack(e2, e1, below=b2), b2 * b1)
    return left == right


# -- infinitesimal braid relations ---------------------------------------------


def _degree2_relations(n: int) -> list[dict[tuple[Pair, Pair], int]]:
    pairs = strand_pairs(n)
    rels = []
    for a, b in itertools.combinations(pairs, 2):
        if not set(a) & set(b):
            rels.append({(a, b): 1, (b, a): -1})
    for i, j, k in itertools.permutations(range(1, n + 1), 3):
        if i > j:
            continue
        hij = _norm_pair((i, j), n)
        rel: dict = {}
        for q in (_norm_pair((i, k), n), _norm_pair((j, k), n)):
            rel[(hij, q)] = rel.get((hij, q), 0) + 1
            rel[(q, hij)] = rel.get((q, hij), 0) - 1
        rels.append(rel)
    return rels


@lru_cache(maxsize=None)
def braid_relation_basis(n: int, m: int):
    """Reduced basis of the degree-m part of the two-sided ideal spanned by
    the infinitesimal braid relations, over words in ``itertools.product`` order."""
    from .exactlin import row_reduce

    pairs = strand_pairs(n)
    words = list(itertools.product(pairs, repeat=m))
    index = {w: i for i, w in enumerate(words)}
    rows = []
    if m >= 2:
        for rel in _degree2_relations(n):
            for a in range(m - 1):
                for u in itertools.product(pairs, repeat=a):
                    for v in itertools.product(pairs, repeat=m - 2 - a):
                        row = [0] * len(words)
                        for (x, y), c in rel.items():
                            row[index[u + (x, y) + v]] += c
                        rows.append(row)
    return words, row_reduce(rows, ncols=len(words))


def relation_residual(e: BraidElement) -> list[float]:
    """Per-degree max coefficient of ``e`` after reduction modulo the
    infinitesimal braid relations, and the reduction's error amplification."""
    import numpy as np

    from .exactlin import reduce_mod

    out = []
    amps = []
    for m in range(e.degree + 1):
        words, basis = braid_relation_basis(e.strand_count, m)
        v = np.zeros(len(words), dtype=complex)
        for i, w in enumerate(words):
            v[i] = e[w]
        r = reduce_mod(v, basis)
        out.append(float(np.max(np.abs(r))) if r.size else 0.0)
        amps.append(basis.amplification)
    return out, amps


def is_knot(b: BraidWord) -> bool:
    return closure_components(b) == 1
