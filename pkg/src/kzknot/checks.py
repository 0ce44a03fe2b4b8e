"""Desk-scale verification suite behind ``kzknot selftest``."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .braid import BraidWord, closure_components, concat, inverse, parse_braid
from .circle import (
    CircleElement,
    build_graded_basis,
    connected_sum,
    default_ideal,
    enumerate_diagrams,
    project_k,
    r_plus_minus,
    rotate,
    canonical_form,
)
from .horizontal import BraidElement, relation_residual, stack, strand_pairs, trace_swap_check
from .invariant import CheckReport, compute_Y, compute_Y_exact_two_strand, verify_markov1, verify_markov2
from .kz import closed_form_power, stack_errors, transport

KNOWN_DIMS = (1, 1, 2, 3, 6)


def random_knot_pairs(count: int, seed: int = 0, max_len: int = 3):
    """Pairs (b1, b2) on 2 or 3 strands, each of length <= max_len, with both
    b1 b2 and b2 b1 closing to a knot."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.choice((2, 3))
        words = []
        for _ in range(2):
            L = rng.randint(1, max_len)
            words.append(BraidWord.from_tokens([rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(L)], n))
        b1, b2 = words
        if closure_components(concat(b1, b2)) == 1:
            out.append((b1, b2))
    return out


def check_dims(N: int) -> CheckReport:
    dims = build_graded_basis(N).dims
    want = KNOWN_DIMS[: N + 1]
    ok = dims[: len(want)] == want
    return CheckReport("algebra.dims", "PASS" if ok else "FAIL", detail=f"dims={dims}")


def check_cut_independence(N: int) -> CheckReport:
    """The connected sum does not depend on where the circles are cut, mod 4T."""
    top = min(N, 4)
    gb = build_graded_basis(top)
    bad = 0
    for a in range(top + 1):
        for b in range(top + 1 - a):
            for d1 in enumerate_diagrams(a):
                for d2 in enumerate_diagrams(b):
                    ref = gb.reduce(CircleElement({connected_sum(d1, d2): Fraction(1)}, top))
                    for j1 in range(max(1, 2 * a)):
                        for j2 in range(max(1, 2 * b)):
                            k = len(d1.partners)
                            p1 = rotate(d1.partners, j1)
                            p2 = rotate(d2.partners, j2)
                            d = canonical_form(p1 + tuple(x + k for x in p2))
                            if gb.reduce(CircleElement({d: Fraction(1)}, top)) != ref:
                                bad += 1
    return CheckReport("algebra.cut_independence", "PASS" if not bad else "FAIL", detail=f"{bad} mismatches")


def check_ideal(N: int) -> CheckReport:
    if N < 1:
        return CheckReport("algebra.ideal", "SKIPPED", detail="N = 0")
    gb, ib = build_graded_basis(N), default_ideal(N)
    zero = all(c == 0 for s in (1, -1) for c in project_k(r_plus_minus(s, N), gb, ib).flat())
    return CheckReport("algebra.ideal_generators_vanish", "PASS" if zero else "FAIL")


def check_trace_property(N: int) -> CheckReport:
    """p(c1 c2) = p(c2 c1) for all words of degree <= min(N, 3) over short braids."""
    top = min(N, 3)
    bad = total = 0
    for n in (2, 3):
        gens = [k for k in range(-(n - 1), n) if k]
        words = [BraidWord.from_tokens(t, n) for L in range(0, 3) for t in itertools.product(gens, repeat=L)]
        pairs = strand_pairs(n)
        hwords = [w for m in range(top + 1) for w in itertools.product(pairs, repeat=m)]
        for b1, b2 in itertools.product(words, repeat=2):
            if len(b1) + len(b2) > 3 or closure_components(concat(b1, b2)) != 1:
                continue
            for w1 in hwords:
                for w2 in hwords:
                    if len(w1) + len(w2) > top:
                        continue
                    total += 1
                    e1 = BraidElement(n, top, {w1: 1})
                    e2 = BraidElement(n, top, {w2: 1})
                    if not trace_swap_check(e1, e2, b1, b2):
                        bad += 1
    return CheckReport("horizontal.trace_property", "PASS" if not bad else "FAIL", detail=f"{total} cases, {bad} bad")


def check_closed_form(N: int, tol: float) -> list[CheckReport]:
    out = []
    for k in range(-3, 4):
        b = BraidWord.from_tokens([1 if k > 0 else -1] * abs(k), 2)
        tr = transport(b, None, N, tol)
        exact = closed_form_power(k, N)
        dist = max(abs(tr.value[((1, 2),) * m] - float(exact[((1, 2),) * m])) for m in range(N + 1))
        bound = max(tr.errors)
        out.append(CheckReport(f"kz.closed_form[k={k}]", "PASS" if dist <= max(bound, 1e-8) else "FAIL", dist, bound))
    return out


def check_multiplicativity(pairs, N: int, tol: float) -> list[CheckReport]:
    out = []
    for b1, b2 in pairs:
        z = transport(b1 * b2, None, N, tol)
        z1, z2 = transport(b1, None, N, tol), transport(b2, None, N, tol)
        diff = (z.value - stack(z1.value, z2.value, below=b1)).max_abs_by_degree()
        prod_err = stack_errors(z1.value, z1.errors, z2.value, z2.errors)
        bound = [a + b for a, b in zip(z.errors, prod_err)]
        ok = all(d <= e for d, e in zip(diff, bound))
        out.append(CheckReport(f"kz.multiplicative[{b1} | {b2}; n={b1.strand_count}]",
                               "PASS" if ok else "FAIL", max(diff), max(bound)))
    return out


def check_inverse(pairs, N: int, tol: float) -> list[CheckReport]:
    out = []
    seen = set()
    for b1, b2 in pairs:
        for b in (b1, b2):
            if b in seen:
                continue
            seen.add(b)
            z = transport(b * inverse(b), None, N, tol)
            diff = (z.value - BraidElement.unit(b.strand_count, N)).max_abs_by_degree()
            ok = all(d <= e for d, e in zip(diff, z.errors))
            out.append(CheckReport(f"kz.inverse[{b}; n={b.strand_count}]", "PASS" if ok else "FAIL",
                                   max(diff), max(z.errors)))
    return out


def check_braid_relation(N: int, tol: float) -> CheckReport:
    """Z(s1 s2 s1) = Z(s2 s1 s2) modulo the infinitesimal braid relations."""
    a = transport(parse_braid("1 2 1", 3), None, N, tol)
    b = transport(parse_braid("2 1 2", 3), None, N, tol)
    res, amps = relation_residual(a.value - b.value)
    bound = [(ea + eb) * amp for ea, eb, amp in zip(a.errors, b.errors, amps)]
    ok = all(r <= e for r, e in zip(res, bound))
    return CheckReport("kz.braid_relation", "PASS" if ok else "FAIL", max(res), max(bound))


def check_chirality(N: int, tol: float) -> list[CheckReport]:
    if N < 3:
        return [CheckReport("invariant.chirality", "SKIPPED", detail="needs N >= 3")]
    ex = compute_Y_exact_two_strand(3, N).coordinate(3) - compute_Y_exact_two_strand(-3, N).coordinate(3)
    y1 = compute_Y(parse_braid("1 1 1", 2), None, N, tol)
    y2 = compute_Y(parse_braid("-1 -1 -1", 2), None, N, tol)
    num = y1.coordinate(3) - y2.coordinate(3)
    bound = y1.errors[3] + y2.errors[3]
    return [
        CheckReport("invariant.chirality_exact", "PASS" if ex == 1 else "FAIL", float(ex)),
        CheckReport("invariant.chirality_numeric", "PASS" if abs(num - 1) <= max(bound, 1e-6) else "FAIL",
                    abs(num - 1), bound),
    ]


def run_selftest(N: int = 3, tol: float = 1e-10, seed: int = 0) -> list[CheckReport]:
    reports = [check_dims(N), check_cut_independence(N), check_ideal(N), check_trace_property(N)]
    if N == 0:
        reports.append(CheckReport("numeric", "SKIPPED", detail="N = 0: numeric suites skipped"))
        return reports
    pairs = random_knot_pairs(10, seed)
    reports += check_closed_form(N, tol)
    reports += check_multiplicativity(pairs, N, tol)
    reports += check_inverse(pairs, N, tol)
    reports.append(check_braid_relation(N, tol))
    reports += [verify_markov1(b1, b2, None, N, tol) for b1, b2 in pairs]
    reports += [verify_markov2(parse_braid("1 1 1", 2), s, None, N, tol) for s in (1, -1)]
    reports += check_chirality(N, tol)
    return reports
