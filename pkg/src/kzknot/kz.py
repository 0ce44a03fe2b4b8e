"""Parallel transport of the Knizhnik-Zamolodchikov connection along a braid.

The transport ``W(t)`` lives in the truncated free algebra on the chord
symbols ``H_ij`` (one per strand pair).  In degree blocks the ODE
``W' = W * A(t)`` is lower triangular::

    W_0' = 0,    W_k' = W_{k-1} (x) a(t)

where ``a(t)[p] = (1/2 pi i) d/dt log(z_i - z_j)`` for the p-th pair and the
Kronecker product appends the new chord on top of every word.  Word indices
are base-P numerals (P = number of pairs), first letter most significant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .braid import BraidGeometry, BraidWord, CrossingSlice, realize_geometry
from .horizontal import BraidElement, strand_pairs

TWO_PI_I = 2j * math.pi

# Dormand-Prince 5(4)
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class TransportError(RuntimeError):
    def __init__(self, message: str, slice_index: int | None = None):
        self.slice_index = slice_index
        super().__init__(message)


def kz_coefficient(g: BraidGeometry, t: float, i: int, j: int) -> complex:
    """(1/2 pi i) (z_i' - z_j') / (z_i - z_j) for strands ``i``, ``j`` at time ``t``."""
    if i == j:
        raise ValueError("need two distinct strands")
    z = g.positions(t)
    v = g.velocities(t)
    dz = z[i - 1] - z[j - 1]
    if dz == 0:
        raise ValueError(f"strands {i} and {j} collide at t={t}")
    return (v[i - 1] - v[j - 1]) / dz / TWO_PI_I


class _SliceField:
    """Vectorized ``a(t)`` over all strand pairs for one crossing slice."""

    def __init__(self, sl: CrossingSlice, n: int, pairs: Sequence[tuple[int, int]]):
        self.sl = sl
        self.base = np.zeros(n, dtype=complex)
        for s, x in sl.rest:
            self.base[s - 1] = x
        self.I = np.array([p[0] - 1 for p in pairs])
        self.J = np.array([p[1] - 1 for p in pairs])
        self.rate = sl.sign * math.pi / (sl.t1 - sl.t0)

    def __call__(self, t: float) -> np.ndarray:
        sl = self.sl
        u = sl.radius * np.exp(1j * self.rate * (t - sl.t0))
        du = 1j * self.rate * u
        z = self.base.copy()
        v = np.zeros_like(z)
        z[sl.left - 1], z[sl.right - 1] = sl.center - u, sl.center + u
        v[sl.left - 1], v[sl.right - 1] = -du, du
        return (v[self.I] - v[self.J]) / (z[self.I] - z[self.J]) / TWO_PI_I


@dataclass
class TruncatedState:
    """Dense graded layout of the truncated word algebra."""

    P: int
    N: int
    offsets: list[int] = field(init=False)

    def __post_init__(self):
        self.offsets = [0]
        for k in range(self.N + 1):
            self.offsets.append(self.offsets[-1] + self.P**k)

    @property
    def size(self) -> int:
        return self.offsets[-1]

    def block(self, W: np.ndarray, k: int) -> np.ndarray:
        return W[self.offsets[k]:self.offsets[k + 1]]

    def unit(self) -> np.ndarray:
        W = np.zeros(self.size, dtype=complex)
        W[0] = 1
        return W

    def rhs(self, W: np.ndarray, a: np.ndarray) -> np.ndarray:
        out = np.zeros_like(W)
        for k in range(1, self.N + 1):
            prev = W[self.offsets[k - 1]:self.offsets[k]]
            out[self.offsets[k]:self.offsets[k + 1]] = np.outer(prev, a).ravel()
        return out

    def per_degree_max(self, W: np.ndarray) -> np.ndarray:
        return np.array([np.max(np.abs(self.block(W, k))) for k in range(self.N + 1)])


def _dp_step(state: TruncatedState, f, t: float, h: float, W: np.ndarray):
    ks = []
    for s in range(7):
        y = W
        for c, k in zip(_A[s], ks):
            if c:
                y = y + h * c * k
        ks.append(state.rhs(y, f(t + _C[s] * h)))
    y5 = W + h * sum(b * k for b, k in zip(_B5, ks) if b)
    y4 = W + h * sum(b * k for b, k in zip(_B4, ks) if b)
    return y5, y5 - y4


def _adaptive_slice(state, f, t0, t1, W, tol, slice_index):
    steps = []
    rejected = 0
    t = t0
    h = (t1 - t0) / 8
    hmin = 1e-12 * (t1 - t0)
    while t < t1:
        h = min(h, t1 - t)
        y, err_vec = _dp_step(state, f, t, h, W)
        scale = tol * (1 + np.maximum(np.abs(W), np.abs(y)))
        err = float(np.max(np.abs(err_vec) / scale)) if err_vec.size else 0.0
        if err <= 1.0:
            steps.append((t, h))
            t = t1 if t + h >= t1 - 1e-15 * (t1 - t0) else t + h
            W = y
            h *= min(5.0, 0.9 * err ** -0.2) if err > 0 else 5.0
        else:
            rejected += 1
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < hmin:
                raise TransportError(f"step size underflow in slice {slice_index + 1} at t={t}", slice_index)
    return W, steps, rejected


@dataclass
class TransportResult:
    value: BraidElement
    errors: list[float]
    steps: int
    rejected: int
    dense: np.ndarray = field(repr=False)
    pairs: tuple[tuple[int, int], ...] = field(repr=False)


def dense_to_element(W: np.ndarray, n: int, N: int, pairs=None) -> BraidElement:
    pairs = pairs or strand_pairs(n)
    P = len(pairs)
    terms = {}
    state = TruncatedState(P, N)
    for k in range(N + 1):
        blk = state.block(W, k)
        for idx in np.nonzero(blk)[0]:
            digits = np.unravel_index(int(idx), (P,) * k) if k else ()
            terms[tuple(pairs[d] for d in digits)] = complex(blk[idx])
    return BraidElement(n, N, terms)


def transport(b: BraidWord, endpoints=None, N: int = 3, tol: float = 1e-10) -> TransportResult:
    """Z(b) truncated at ``N`` chords, with per-degree error bounds.

    Each slice is integrated adaptively; the accepted grid is then rerun with
    every step halved.  The halved run is returned and the per-degree max
    difference between the two runs (plus a rounding floor) is reported as
    the error bound.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = b.strand_count
    g = realize_geometry(b, endpoints)
    pairs = strand_pairs(n)
    state = TruncatedState(len(pairs), N)
    W = state.unit()
    if not g.slices or N == 0:
        return TransportResult(dense_to_element(W, n, N, pairs), [0.0] * (N + 1), 0, 0, W, pairs)

    coarse, fine = W, W
    total_steps = total_rejected = 0
    for si, sl in enumerate(g.slices):
        f = _SliceField(sl, n, pairs)
        coarse, steps, rej = _adaptive_slice(state, f, sl.t0, sl.t1, coarse, tol, si)
        total_steps += len(steps)
        total_rejected += rej
        for t, h in steps:
            fine, _ = _dp_step(state, f, t, h / 2, fine)
            fine, _ = _dp_step(state, f, t + h / 2, h / 2, fine)

    diff = state.per_degree_max(fine - coarse)
    size = state.per_degree_max(fine)
    floor = 64 * np.finfo(float).eps * (2 * total_steps + 1) * np.maximum(size, 1.0)
    errors = [float(x) for x in diff + floor]
    errors[0] = 0.0
    return TransportResult(dense_to_element(fine, n, N, pairs), errors, total_steps, total_rejected, fine, pairs)


def closed_form_power(k: int, N: int) -> BraidElement:
    """Exact Z of the k-th power of the 2-strand generator: sum (k/2)^m/m! H_12^m."""
    half = Fraction(k, 2)
    return BraidElement(2, N, {((1, 2),) * m: half**m / math.factorial(m) for m in range(N + 1)})


def stack_errors(e1: BraidElement, err1: Sequence[float], e2: BraidElement, err2: Sequence[float]) -> list[float]:
    """Per-degree coefficient error bound for ``stack(e1, e2)``.

    Each word splits uniquely at each cut point, so a product coefficient is a
    sum of one product per split.
    """
    N = min(e1.degree, e2.degree)
    m1, m2 = e1.max_abs_by_degree(), e2.max_abs_by_degree()
    out = []
    for m in range(N + 1):
        s = 0.0
        for k in range(m + 1):
            a, da = m1[k], err1[k]
            c, dc = m2[m - k], err2[m - k]
            s += da * c + a * dc + da * dc
        out.append(s)
    return out
