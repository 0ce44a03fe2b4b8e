"""Exact rational row reduction and quotient normal forms.

Everything is dense and uses :class:`fractions.Fraction`; the matrices that
show up here have at most a few hundred columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


def as_fraction_rows(m: Iterable[Iterable]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in m]


@dataclass(frozen=True)
class SubspaceBasis:
    """Reduced row-echelon basis of a subspace of ``Q^dim``."""

    dim: int
    rows: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]
    _pivot_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_pivot_set", frozenset(self.pivots))

    @property
    def rank(self) -> int:
        return len(self.rows)

    @cached_property
    def free_columns(self) -> tuple[int, ...]:
        """Non-pivot columns; these index the quotient ``Q^dim / span``."""
        return tuple(j for j in range(self.dim) if j not in self._pivot_set)

    @cached_property
    def float_rows(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.rows], dtype=float).reshape(self.rank, self.dim)

    @cached_property
    def amplification(self) -> float:
        """Bound on how much ``reduce_mod`` can grow an entrywise input error.

        Each reduced entry is ``v[j] - sum_r v[pivot_r] * row_r[j]``, so an
        input perturbation of size ``e`` moves it by at most
        ``e * (1 + sum_r |row_r[j]|)``.
        """
        if not self.rows:
            return 1.0
        return 1.0 + float(max(sum(abs(row[j]) for row in self.rows) for j in range(self.dim)))

    def quotient_matrix(self) -> list[list[Fraction]]:
        """Exact matrix ``Q`` with ``Q @ v = reduce_mod(v)[free_columns]``."""
        out = []
        for j in self.free_columns:
            out.append([Fraction(int(c == j)) - self._coef(c, j) for c in range(self.dim)])
        return out

    def _coef(self, c: int, j: int) -> Fraction:
        # coefficient of v[c] in sum_r v[pivot_r] row_r[j]
        for r, p in enumerate(self.pivots):
            if p == c:
                return self.rows[r][j]
        return Fraction(0)


def row_reduce(m: Sequence[Sequence], ncols: int | None = None) -> SubspaceBasis:
    """Reduced row-echelon basis of the row space of ``m``."""
    rows = as_fraction_rows(m)
    if ncols is None:
        if not rows:
            raise ValueError("ncols is required for an empty matrix")
        ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")

    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        k = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        piv = rows[r][c]
        if piv != 1:
            rows[r] = [x / piv for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return SubspaceBasis(ncols, tuple(tuple(row) for row in rows[:r]), tuple(pivots))


def reduce_mod(v, s: SubspaceBasis):
    """Normal form of ``v`` modulo ``span(s)``: zero in every pivot column.

    Rational input (any sequence of Fraction/int) gives an exact list of
    Fractions.  Float or complex numpy input gives a numpy array; its entrywise
    error grows by at most ``s.amplification``.
    """
    if len(v) != s.dim:
        raise ValueError(f"vector has length {len(v)}, subspace ambient dimension is {s.dim}")
    if isinstance(v, np.ndarray) and v.dtype.kind in "fc":
        if s.rank == 0:
            return v.copy()
        coeffs = v[list(s.pivots)]
        return v - coeffs @ s.float_rows
    out = [Fraction(x) for x in v]
    for row, p in zip(s.rows, s.pivots):
        c = out[p]
        if c:
            out = [a - c * b for a, b in zip(out, row)]
    return out


def in_span(v: Sequence, s: SubspaceBasis) -> bool:
    if isinstance(v, np.ndarray) and v.dtype.kind in "fc":
        raise TypeError("in_span needs an exact rational vector")
    return not any(reduce_mod(v, s))


def rank(m: Sequence[Sequence], ncols: int | None = None) -> int:
    return row_reduce(m, ncols).rank
