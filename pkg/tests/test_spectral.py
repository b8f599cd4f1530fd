import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_recover.errors import DimensionMismatch, InvalidParams, TooLarge
from sparse_recover.spectral import (
    TWO_PI,
    NormKind,
    SpectralFunction,
    block_indices,
    block_of,
    evaluate,
    grid_values,
    lp_block,
    lp_blocks,
    norm,
    norm_hab_dyadic,
    norm_hgamma_dyadic,
    sampling_norm_plus,
)
from sparse_recover.trig_interp import interpolate_samples, nodes


def rand_fn(rng, d, band):
    axis = np.arange(-band, band + 1)
    freqs = np.array(list(itertools.product(axis, repeat=d)))
    vals = rng.normal(size=len(freqs)) + 1j * rng.normal(size=len(freqs))
    return SpectralFunction(d, freqs, vals)


class TestSpectralFunction:
    def test_sorted_and_zero_free(self):
        f = SpectralFunction(2, [[1, 0], [0, 0], [1, 0], [2, 2]], [1, 2, -1, 0])
        assert f.freqs.tolist() == [[0, 0]]
        assert f.coeffs.tolist() == [2]

    def test_immutable(self):
        f = SpectralFunction.monomial((1, 2))
        with pytest.raises(AttributeError):
            f.d = 3
        with pytest.raises(ValueError):
            f.coeffs[0] = 5

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            SpectralFunction.monomial((1,)) + SpectralFunction.monomial((1, 0))
        with pytest.raises(DimensionMismatch):
            SpectralFunction.from_dict(2, {(1,): 1})

    def test_arithmetic(self):
        f = SpectralFunction.from_dict(1, {(1,): 1, (2,): 2})
        g = SpectralFunction.from_dict(1, {(1,): 1})
        assert (f - g).to_dict() == {(2,): 2}
        assert len(f - f) == 0

    def test_json_roundtrip(self):
        f = rand_fn(np.random.default_rng(0), 2, 3)
        doc = json.loads(json.dumps(f.to_json()))
        assert SpectralFunction.from_json(doc) == f
        freqs = [e["freq"] for e in doc["coeffs"]]
        assert freqs == sorted(freqs)

    def test_band(self):
        assert SpectralFunction.from_dict(2, {(3, -7): 1}).band == 7
        assert SpectralFunction(3).band == 0


class TestBlocks:
    def test_block_of(self):
        assert block_of((0, 0)) == (0, 0)
        assert block_of((3, -1)) == (2, 1)
        assert block_of((4, 0)) == (3, 0)

    def test_vectorized_matches_scalar(self):
        ell = np.array([[v] for v in range(-5000, 5001)])
        want = [block_of(tuple(r)) for r in ell.tolist()]
        assert [tuple(r) for r in block_indices(ell).tolist()] == want

    def test_block_boundaries(self):
        for j in range(1, 40):
            assert block_indices(np.array([[2 ** (j - 1)], [2**j - 1]]))[:, 0].tolist() == [j, j]

    def test_lp_block_examples(self):
        f = SpectralFunction.from_dict(2, {(0, 0): 1})
        assert lp_block(f, (0, 0)) == f
        g = SpectralFunction.from_dict(2, {(3, 0): 1})
        assert lp_block(g, (2, 0)) == g
        assert len(lp_block(g, (1, 0))) == 0

    def test_partition_and_parseval(self):
        f = rand_fn(np.random.default_rng(1), 2, 20)
        blocks = lp_blocks(f)
        total = SpectralFunction(2)
        for b in blocks.values():
            total = total + b
        assert total == f
        e = sum(norm(b, NormKind.l2()) ** 2 for b in blocks.values())
        assert e == pytest.approx(norm(f, NormKind.l2()) ** 2, rel=1e-12)


class TestNorms:
    def test_constant(self):
        f = SpectralFunction.from_dict(2, {(0, 0): 3 - 4j})
        for kind in (NormKind.hab(1.0, 0.0), NormKind.hab(2.0, -0.5), NormKind.hgamma(1.0), NormKind.hmix(2.0)):
            assert norm(f, kind) == pytest.approx(5.0)

    def test_examples(self):
        f = SpectralFunction.from_dict(2, {(1, 0): 1})
        assert norm(f, NormKind.hab(1.0, 0.0)) == pytest.approx(np.sqrt(2))
        assert norm(f, NormKind.hgamma(1.0)) == pytest.approx(np.sqrt(2))

    def test_hab_weights(self):
        f = SpectralFunction.from_dict(2, {(2, 1): 1})
        # (1+4)(1+1) product, (1+5) radial
        assert norm(f, NormKind.hab(1.5, 0.5)) == pytest.approx(np.sqrt(10**1.5 * 6**0.5))
        assert norm(f, NormKind.hgamma_mix(1.0)) == pytest.approx(np.sqrt(10))

    def test_parseval(self):
        f = rand_fn(np.random.default_rng(2), 3, 3)
        assert norm(f, NormKind.l2()) ** 2 == pytest.approx(TWO_PI**3 * np.sum(np.abs(f.coeffs) ** 2), rel=1e-14)

    def test_linf_estimate(self):
        f = SpectralFunction.from_dict(1, {(0,): 1, (1,): 1})
        assert norm(f, NormKind.linf()) == pytest.approx(2.0)
        g = SpectralFunction.from_dict(2, {(1, 0): 1, (0, 3): 1j})
        assert norm(g, NormKind.linf()) == pytest.approx(2.0, rel=1e-3)

    def test_lq_estimate(self):
        f = SpectralFunction.from_dict(1, {(3,): 2})
        for q in (1.0, 2.0, 4.0):
            assert norm(f, NormKind.lq(q)) == pytest.approx(2 * TWO_PI ** (1 / q))
        g = rand_fn(np.random.default_rng(9), 2, 4)
        assert norm(g, NormKind.lq(2.0)) == pytest.approx(norm(g, NormKind.l2()), rel=1e-12)

    def test_grid_values_match_direct(self):
        f = rand_fn(np.random.default_rng(3), 2, 3)
        n = 9
        vals = grid_values(f, n)
        pts = np.array(list(itertools.product(TWO_PI * np.arange(n) / n, repeat=2)))
        np.testing.assert_allclose(vals.ravel(), evaluate(f, pts), atol=1e-10)

    def test_grid_too_large(self):
        f = SpectralFunction.from_dict(3, {(500, 500, 500): 1})
        with pytest.raises(TooLarge):
            norm(f, NormKind.linf())

    def test_monotone_weight(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            f = rand_fn(rng, 2, 4)
            for a, b in ((0.0, 0.0), (1.0, 0.0), (0.5, 1.0)):
                assert norm(f, NormKind.hab(a, b)) >= norm(f, NormKind.l2()) / TWO_PI - 1e-12

    def test_invalid_kinds(self):
        with pytest.raises(InvalidParams):
            NormKind.hab(-1.0, 0.0)
        with pytest.raises(InvalidParams):
            NormKind.hab(1.0, -2.0)
        with pytest.raises(InvalidParams):
            NormKind.lq(0.5)
        with pytest.raises(InvalidParams):
            NormKind("sobolev")

    def test_parse(self):
        assert NormKind.parse("hab:alpha=2,beta=-0.4") == NormKind.hab(2.0, -0.4)
        assert NormKind.parse("hgamma:gamma=1") == NormKind.hgamma(1.0)
        assert NormKind.parse("l2") == NormKind.l2()
        assert NormKind.parse("lq:q=4") == NormKind.lq(4.0)
        assert NormKind.parse(NormKind.hgamma_mix(0.5).label()) == NormKind.hgamma_mix(0.5)
        with pytest.raises(InvalidParams):
            NormKind.parse("hab:alpha")
        with pytest.raises(InvalidParams):
            NormKind.parse("hab:delta=1")


class TestDyadicNorms:
    def test_constant(self):
        f = SpectralFunction.from_dict(2, {(0, 0): 2})
        assert norm_hab_dyadic(f, 1.0, 0.5) == pytest.approx(2 * TWO_PI)

    def test_single_block(self):
        f = SpectralFunction.from_dict(2, {(3, 1): 1, (-2, -1): 2j})
        l2 = norm(f, NormKind.l2())
        assert norm_hab_dyadic(f, 1.5, 0.5) == pytest.approx(2 ** (1.5 * 3 + 0.5 * 2) * l2)

    def test_hgamma_is_hab_zero_alpha(self):
        f = rand_fn(np.random.default_rng(5), 2, 9)
        assert norm_hgamma_dyadic(f, 1.3) == norm_hab_dyadic(f, 0.0, 1.3)

    def test_invalid(self):
        f = SpectralFunction.from_dict(1, {(1,): 1})
        with pytest.raises(InvalidParams):
            norm_hab_dyadic(f, 1.0, -2.0)
        with pytest.raises(InvalidParams):
            norm_hgamma_dyadic(f, -1.0)

    def test_equivalence_interval(self):
        rng = np.random.default_rng(6)
        ratios = []
        for _ in range(100):
            f = rand_fn(rng, 2, int(rng.integers(1, 33)))
            ratios.append(norm_hab_dyadic(f, 1.0, 0.5) / norm(f, NormKind.hab(1.0, 0.5)))
        lo, hi = min(ratios), max(ratios)
        # per axis 2^{2k} / (1 + l^2) lies in [1, 4]; the radial factor in [1/3, 4] for d = 2
        assert TWO_PI * 3**-0.25 <= lo <= hi <= TWO_PI * 2 ** (2 * 1.0) * 2**0.5


class TestNikolskij:
    def test_constant_bounded(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(200):
            d = int(rng.integers(1, 4))
            ell = tuple(int(v) for v in rng.integers(0, 6 - d, size=d))
            axes = [np.arange(-(2**e), 2**e + 1) for e in ell]
            freqs = np.array(list(itertools.product(*axes)))
            g = SpectralFunction(d, freqs, rng.normal(size=len(freqs)) + 1j * rng.normal(size=len(freqs)))
            c = norm(g, NormKind.linf()) / (2 ** (sum(ell) / 2) * norm(g, NormKind.l2()) / TWO_PI ** (d / 2))
            assert c <= 3 ** (d / 2)
            worst = max(worst, c)
        assert np.isfinite(worst)


class TestBernstein:
    @pytest.mark.parametrize(
        "alpha,beta,gamma",
        [(2.0, 0.0, 1.0), (1.5, 0.5, 1.0), (1.0, -0.2, 0.5), (1.0, 0.0, 0.0), (3.0, -1.0, 0.5)],
    )
    def test_dyadic_form(self, alpha, beta, gamma):
        assert min(alpha, alpha + beta - gamma) > 0
        rng = np.random.default_rng(8)
        for ell in [(0, 0), (1, 3), (3, 2), (4, 4)]:
            axes = [np.arange(-(2**e) + 1, 2**e) for e in ell]
            freqs = np.array(list(itertools.product(*axes)))
            f = SpectralFunction(2, freqs, rng.normal(size=len(freqs)) + 1j * rng.normal(size=len(freqs)))
            lhs = norm_hab_dyadic(f, alpha, beta)
            rhs = 2 ** (alpha * sum(ell) + (beta - gamma) * max(ell)) * norm_hgamma_dyadic(f, gamma)
            assert lhs <= rhs * (1 + 1e-12)


class TestEvaluate:
    def test_examples(self):
        assert evaluate(SpectralFunction.from_dict(3, {(0, 0, 0): 1}), [0.3, 1.2, 5.0]) == 1
        assert evaluate(SpectralFunction.from_dict(2, {(1, 0): 1}), [np.pi, 0.0]) == pytest.approx(-1)

    @settings(max_examples=20, deadline=None)
    @given(m=st.integers(0, 12), seed=st.integers(0, 1000))
    def test_roundtrip_through_interpolation(self, m, seed):
        rng = np.random.default_rng(seed)
        f = rand_fn(rng, 1, m)
        vals = evaluate(f, nodes(m)[:, None])
        back = interpolate_samples(m, vals)
        for (k,), c in f.to_dict().items():
            assert abs(back[k] - c) < 1e-10


class TestSamplingNormPlus:
    def test_constant(self):
        f = SpectralFunction.from_dict(2, {(0, 0): 3})
        assert sampling_norm_plus(f, 1.0, 0.0) == pytest.approx(3 * TWO_PI)

    def test_invalid(self):
        with pytest.raises(InvalidParams):
            sampling_norm_plus(SpectralFunction.from_dict(1, {(1,): 1}), 0.5, 0.0)
