import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kzknot.braid import BraidWord, inverse, parse_braid, realize_geometry
from kzknot.horizontal import BraidElement, relation_residual, stack
from kzknot.kz import TransportError, closed_form_power, kz_coefficient, stack_errors, transport


def winding_oracle(g, i, j, samples=4001):
    """(1/2 pi i) times the change of log(z_i - z_j), with the branch unwrapped."""
    ts = np.linspace(0, 1, samples)
    d = np.array([g.positions(float(t))[i - 1] - g.positions(float(t))[j - 1] for t in ts])
    arg = np.unwrap(np.angle(d))
    return (math.log(abs(d[-1]) / abs(d[0])) + 1j * (arg[-1] - arg[0])) / (2j * math.pi)


def midpoint_rule(g, i, j, samples=4000):
    """Slice by slice on interior points only: the velocities jump at slice
    boundaries, where the coefficient is taken from the lower slice."""
    total = 0
    for sl in g.slices:
        h = (sl.t1 - sl.t0) / samples
        total += h * sum(kz_coefficient(g, sl.t0 + (k + 0.5) * h, i, j) for k in range(samples))
    return total


class TestCoefficient:
    def test_constant_strands(self):
        g = realize_geometry(BraidWord(3))
        assert kz_coefficient(g, 0.4, 1, 3) == 0

    def test_spectator_pair(self):
        g = realize_geometry(parse_braid("1", 3))
        # strand 3 is constant; strands 1 and 2 rotate about their midpoint
        assert kz_coefficient(g, 0.5, 1, 2) != 0
        z = g.positions(0.5)
        v = g.velocities(0.5)
        assert v[2] == 0 and z[2] == 3

    def test_same_strand(self):
        g = realize_geometry(parse_braid("1", 2))
        with pytest.raises(ValueError):
            kz_coefficient(g, 0.5, 1, 1)

    def test_single_crossing_value(self):
        g = realize_geometry(parse_braid("1", 2), (1, 2))
        # z2 - z1 = exp(i pi t), so a(t) = (i pi)/(2 pi i) = 1/2
        for t in (0.0, 0.3, 1.0):
            assert cmath.isclose(kz_coefficient(g, t, 1, 2), 0.5, abs_tol=1e-14)
        assert cmath.isclose(kz_coefficient(g, 0.3, 2, 1), 0.5, abs_tol=1e-14)

    @pytest.mark.parametrize("word, n", [("1 2 -1", 3), ("2 2 1", 3), ("1 -3 2", 4)])
    def test_integral_matches_winding(self, word, n):
        g = realize_geometry(parse_braid(word, n))
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                assert abs(midpoint_rule(g, i, j) - winding_oracle(g, i, j)) < 1e-6


class TestTransport:
    def test_trivial(self):
        tr = transport(BraidWord(3), None, 3)
        assert tr.value == BraidElement.unit(3, 3)
        assert tr.errors == [0.0] * 4

    def test_degree_zero(self):
        tr = transport(parse_braid("1 2", 3), None, 0)
        assert tr.value.terms == {(): 1}

    @pytest.mark.parametrize("k", [-3, -2, -1, 1, 2, 3])
    def test_closed_form(self, k):
        b = BraidWord.from_tokens([1 if k > 0 else -1] * abs(k), 2)
        tr = transport(b, None, 4)
        ex = closed_form_power(k, 4)
        for m in range(5):
            w = ((1, 2),) * m
            assert abs(tr.value[w] - float(ex[w])) < 1e-8
            assert abs(tr.value[w] - float(ex[w])) <= tr.errors[m] + 1e-15

    def test_closed_form_examples(self):
        assert closed_form_power(0, 3) == BraidElement.unit(2, 3)
        assert closed_form_power(1, 2).terms == {(): 1, ((1, 2),): Fraction(1, 2), ((1, 2), (1, 2)): Fraction(1, 8)}

    def test_bad_args(self):
        with pytest.raises(ValueError):
            transport(parse_braid("1", 2), None, -1)
        with pytest.raises(ValueError):
            transport(parse_braid("1", 2), None, 2, tol=0)

    def test_tiny_tolerance_underflows(self):
        with pytest.raises(TransportError):
            transport(parse_braid("1", 2), None, 2, tol=1e-300)

    def test_degree_one_is_winding(self):
        b = parse_braid("1 -2 1", 3)
        tr = transport(b, None, 1)
        g = realize_geometry(b)
        for i, j in tr.pairs:
            assert abs(tr.value[((i, j),)] - winding_oracle(g, i, j)) < 1e-6

    def test_truncation_coherent(self):
        b = parse_braid("1 2 -1", 3)
        lo, hi = transport(b, None, 2), transport(b, None, 3)
        diff = (hi.value.truncate(2) - lo.value).max_abs_by_degree()
        assert all(d <= a + c for d, a, c in zip(diff, lo.errors, hi.errors))

    def test_error_bounds_hold_against_tighter_run(self):
        b = parse_braid("1 2 2 -1", 3)
        loose, tight = transport(b, None, 3, 1e-6), transport(b, None, 3, 1e-12)
        diff = (loose.value - tight.value).max_abs_by_degree()
        assert all(d <= e1 + e2 for d, e1, e2 in zip(diff, loose.errors, tight.errors))


def _check_mult(b1, b2, N=3):
    z = transport(b1 * b2, None, N)
    z1, z2 = transport(b1, None, N), transport(b2, None, N)
    diff = (z.value - stack(z1.value, z2.value, below=b1)).max_abs_by_degree()
    bound = [a + b for a, b in zip(z.errors, stack_errors(z1.value, z1.errors, z2.value, z2.errors))]
    return diff, bound


words3 = st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=3).map(lambda t: BraidWord.from_tokens(t, 3))


class TestAlgebraicProperties:
    def test_multiplicative_example(self):
        diff, bound = _check_mult(parse_braid("1 2", 3), parse_braid("-1", 3))
        assert all(d <= e for d, e in zip(diff, bound))

    def test_naive_product_is_wrong(self):
        b1, b2 = parse_braid("1", 3), parse_braid("2", 3)
        z = transport(b1 * b2, None, 2)
        naive = stack(transport(b1, None, 2).value, transport(b2, None, 2).value)
        assert max((z.value - naive).max_abs_by_degree()) > 0.1

    @settings(max_examples=8, deadline=None)
    @given(words3, words3)
    def test_multiplicative(self, b1, b2):
        diff, bound = _check_mult(b1, b2)
        assert all(d <= e for d, e in zip(diff, bound))

    @settings(max_examples=8, deadline=None)
    @given(words3)
    def test_inverse(self, b):
        z = transport(b * inverse(b), None, 3)
        diff = (z.value - BraidElement.unit(3, 3)).max_abs_by_degree()
        assert all(d <= e for d, e in zip(diff, z.errors))

    def test_braid_relation_modulo_relations(self):
        a = transport(parse_braid("1 2 1", 3), None, 3)
        b = transport(parse_braid("2 1 2", 3), None, 3)
        res, amps = relation_residual(a.value - b.value)
        assert all(r <= (ea + eb) * amp for r, ea, eb, amp in zip(res, a.errors, b.errors, amps))
        # in the free word algebra the two transports really do differ
        assert max((a.value - b.value).max_abs_by_degree()) > 0.1

    def test_far_commutation(self):
        a = transport(parse_braid("1 3", 4), None, 2)
        b = transport(parse_braid("3 1", 4), None, 2)
        res, amps = relation_residual(a.value - b.value)
        assert all(r <= (ea + eb) * amp for r, ea, eb, amp in zip(res, a.errors, b.errors, amps))

    def test_geometry_changes_coefficients_not_classes(self):
        b = parse_braid("1 2 -1", 3)
        a = transport(b, (1, 2, 3), 2)
        c = transport(b, (1, 2, 7), 2)
        # raw coefficients depend on the path: strands 2 and 3 end at
        # different distances, so the log-modulus part of the winding moves
        assert abs(a.value[((2, 3),)] - c.value[((2, 3),)]) > 0.1
        # strands 1 and 3 trade places, so their winding is purely angular
        assert abs(a.value[((1, 3),)] - c.value[((1, 3),)]) < 1e-9


def iterated_oracle(g, p, q, samples=3000):
    """Degree-2 coefficient of the word (p, q): the double integral of
    a_p(s) a_q(t) over s < t, by the midpoint rule per slice."""
    ts, ws = [], []
    for sl in g.slices:
        h = (sl.t1 - sl.t0) / samples
        ts += [sl.t0 + (k + 0.5) * h for k in range(samples)]
        ws += [h] * samples
    ts, ws = np.array(ts), np.array(ws)
    ap = np.array([kz_coefficient(g, t, *p) for t in ts]) * ws
    aq = np.array([kz_coefficient(g, t, *q) for t in ts]) * ws
    # inner integral up to (but excluding) t, plus half of the diagonal cell
    inner = np.cumsum(ap) - ap / 2
    return np.sum(inner * aq)


@pytest.mark.parametrize("word", ["1 2", "1 -2 1"])
def test_degree_two_against_quadrature(word):
    b = parse_braid(word, 3)
    g = realize_geometry(b)
    tr = transport(b, None, 2)
    for p in tr.pairs:
        for q in tr.pairs:
            assert abs(tr.value[(p, q)] - iterated_oracle(g, p, q)) < 1e-5
