from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_recover.errors import InvalidParams, LengthMismatch
from sparse_recover.trig_interp import (
    alias_coeffs,
    alias_frequency,
    dirichlet,
    dirichlet_sum,
    eta,
    evaluate_1d,
    interpolate_samples,
    level_of,
    nodes,
    samples_at_nodes,
)


def rand_coeffs(rng, band):
    ks = np.arange(-band, band + 1)
    vals = rng.normal(size=ks.size) + 1j * rng.normal(size=ks.size)
    return {int(k): complex(v) for k, v in zip(ks, vals)}


def naive_alias(m, f):
    """Aliasing sum written out term by term."""
    n = 2 * m + 1
    out = {}
    for ell in range(-m, m + 1):
        total = sum(c for k, c in f.items() if (k - ell) % n == 0)
        if total != 0:
            out[ell] = total
    return out


def dirichlet_interpolant(m, samples, t):
    """``(1/(2m+1)) sum_l f(t_l) D_m(t - t_l)`` evaluated directly."""
    ts = nodes(m)
    return sum(s * dirichlet(m, t - tl) for s, tl in zip(samples, ts)) / (2 * m + 1)


class TestNodes:
    def test_small(self):
        assert nodes(0).tolist() == [0.0]
        np.testing.assert_allclose(nodes(1), [0, 2 * np.pi / 3, 4 * np.pi / 3])

    def test_length(self):
        for m in range(10):
            assert len(nodes(m)) == 2 * m + 1

    def test_negative(self):
        with pytest.raises(InvalidParams):
            nodes(-1)

    def test_dyadic_grids_share_only_zero(self):
        for k in range(1, 11):
            a = {Fraction(l, 2 ** (k + 1) + 1) for l in range(2 ** (k + 1) + 1)}
            b = {Fraction(l, 2**k + 1) for l in range(2**k + 1)}
            assert a & b == {Fraction(0)}


class TestDirichlet:
    def test_at_zero(self):
        for m in range(8):
            assert dirichlet(m, 0.0) == pytest.approx(2 * m + 1)
            assert dirichlet(m, 2 * np.pi) == pytest.approx(2 * m + 1)

    def test_zero_at_node(self):
        assert dirichlet(1, 2 * np.pi / 3) == pytest.approx(0.0, abs=1e-12)

    def test_closed_equals_sum(self):
        rng = np.random.default_rng(3)
        t = rng.uniform(-10, 10, size=1000)
        for m in (0, 1, 5, 17, 64):
            np.testing.assert_allclose(dirichlet(m, t), dirichlet_sum(m, t), atol=1e-12 * (2 * m + 1))

    def test_dirichlet_form_matches_dft_route(self):
        rng = np.random.default_rng(4)
        f = rand_coeffs(rng, 11)
        m = 5
        samples = samples_at_nodes(m, f)
        coeffs = interpolate_samples(m, samples)
        t = rng.uniform(0, 2 * np.pi, size=50)
        np.testing.assert_allclose(evaluate_1d(coeffs, t), dirichlet_interpolant(m, samples, t), atol=1e-11)


class TestInterpolateSamples:
    def test_constant(self):
        out = interpolate_samples(3, [2.5] * 7)
        assert out[0] == pytest.approx(2.5)
        # the transform route leaves only rounding noise elsewhere
        assert all(abs(v) < 1e-14 for k, v in out.items() if k != 0)

    def test_aliasing_of_three(self):
        out = interpolate_samples(1, samples_at_nodes(1, {3: 1}))
        assert abs(out[0] - 1) < 1e-12
        assert all(abs(v) < 1e-12 for k, v in out.items() if k != 0)

    def test_reproduction(self):
        for m in range(6):
            for k in range(-m, m + 1):
                out = interpolate_samples(m, samples_at_nodes(m, {k: 1}))
                assert abs(out[k] - 1) < 1e-12
                assert all(abs(v) < 1e-12 for j, v in out.items() if j != k)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            interpolate_samples(2, [1.0] * 4)


class TestAlias:
    def test_examples(self):
        assert alias_coeffs(1, {3: 1}) == {0: 1}
        assert alias_coeffs(4, {-3: 2j}) == {-3: 2j}

    def test_alias_frequency_range(self):
        ell = np.arange(-100, 101)
        for m in (0, 1, 4, 7):
            a = alias_frequency(m, ell)
            assert a.min() >= -m and a.max() <= m
            assert np.all((ell - a) % (2 * m + 1) == 0)

    def test_matches_naive(self):
        rng = np.random.default_rng(1)
        for m in (0, 1, 3, 8):
            f = rand_coeffs(rng, 30)
            got, want = alias_coeffs(m, f), naive_alias(m, f)
            assert got.keys() == want.keys()
            for k in want:
                assert abs(got[k] - want[k]) <= 1e-12 * (1 + abs(want[k]))

    def test_cross_oracle_band30_m8(self):
        rng = np.random.default_rng(2)
        f = rand_coeffs(rng, 30)
        a = alias_coeffs(8, f)
        b = interpolate_samples(8, samples_at_nodes(8, f))
        assert max(abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)) < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(m=st.integers(0, 32), band=st.integers(0, 64), seed=st.integers(0, 2**32 - 1))
    def test_oracle_property(self, m, band, seed):
        f = rand_coeffs(np.random.default_rng(seed), band)
        a = alias_coeffs(m, f)
        b = interpolate_samples(m, samples_at_nodes(m, f))
        assert max(abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)) < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(m=st.integers(0, 40), seed=st.integers(0, 2**32 - 1))
    def test_reproduction_exact(self, m, seed):
        f = rand_coeffs(np.random.default_rng(seed), m)
        assert alias_coeffs(m, f) == {k: v for k, v in f.items() if v != 0}


class TestEta:
    def test_kills_low_degree(self):
        rng = np.random.default_rng(5)
        for m in range(1, 8):
            assert eta(m, rand_coeffs(rng, 2 ** (m - 1))) == {}

    def test_level_zero_constant(self):
        assert eta(0, {0: 3 + 1j}) == {0: 3 + 1j}

    def test_definition(self):
        rng = np.random.default_rng(6)
        f = rand_coeffs(rng, 50)
        for m in range(1, 6):
            hi, lo = alias_coeffs(2**m, f), alias_coeffs(2 ** (m - 1), f)
            want = {k: hi.get(k, 0) - lo.get(k, 0) for k in set(hi) | set(lo)}
            got = eta(m, f)
            for k in set(want) | set(got):
                assert abs(got.get(k, 0) - want.get(k, 0)) <= 1e-12

    def test_telescoping(self):
        rng = np.random.default_rng(7)
        f = rand_coeffs(rng, 300)
        for K in range(9):
            acc = {}
            for k in range(K + 1):
                for key, v in eta(k, f).items():
                    acc[key] = acc.get(key, 0) + v
            want = alias_coeffs(2**K, f)
            for key in set(acc) | set(want):
                assert abs(acc.get(key, 0) - want.get(key, 0)) <= 1e-11


class TestLevelOf:
    def test_values(self):
        assert [level_of(n) for n in (0, 1, 2, 3, 4, 5, 8, 9, 1024, 1025)] == [0, 0, 1, 2, 2, 3, 3, 4, 10, 11]
