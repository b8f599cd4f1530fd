"""Tensorized dyadic differences ``q_k``, sparse-grid operators ``Q_Delta`` and their grids.

All operators act exactly in frequency space: every monomial is mapped to a signed
sum of aliased monomials, and those terms are reduced with integer
multiplicities before any complex arithmetic (see :mod:`._reduce`). The sample-space
route in :func:`q_k_from_samples` exists only as an independent cross-check.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from sympy import divisors, totient

from ._reduce import reduce_terms
from .errors import DimensionMismatch, InvalidParams, NotSolid, TooLarge
from .index_sets import IndexSet, MultiIndex, hyperbolic_cross, is_solid, norm1
from .spectral import TWO_PI, SpectralFunction
from .trig_interp import eta_terms, level_of

# upper bound on generated monomial terms in one apply_Q call (memory guard)
MAX_TERMS = 40_000_000


def _check_k(f: SpectralFunction, k: Sequence[int]) -> MultiIndex:
    k = tuple(int(v) for v in k)
    if len(k) != f.d:
        raise DimensionMismatch(f"index {k} does not match function dimension {f.d}")
    if min(k) < 0:
        raise InvalidParams(f"index {k} has a negative entry")
    return k


def _terms(f: SpectralFunction, k: MultiIndex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(src, target, mult)`` term list of ``q_k`` applied to every monomial of ``f``."""
    per_axis = [eta_terms(kj, f.freqs[:, j]) for j, kj in enumerate(k)]
    src_parts, out_parts, mult_parts = [], [], []
    for combo in itertools.product(*per_axis):
        mask = np.logical_and.reduce([c[0] for c in combo])
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            continue
        sign = int(np.prod([c[2] for c in combo]))
        src_parts.append(idx)
        out_parts.append(np.stack([c[1][idx] for c in combo], axis=1))
        mult_parts.append(np.full(idx.size, sign, dtype=np.int64))
    if not src_parts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, np.zeros((0, f.d), dtype=np.int64), empty
    return np.concatenate(src_parts), np.concatenate(out_parts), np.concatenate(mult_parts)


def q_k(f: SpectralFunction, k: Sequence[int]) -> SpectralFunction:
    """Exact ``q_k f = (eta_{k_1} x ... x eta_{k_d}) f``."""
    k = _check_k(f, k)
    if not len(f):
        return f
    src, out, mult = _terms(f, k)
    freqs, vals = reduce_terms(f.coeffs, src, out, mult)
    return SpectralFunction(f.d, freqs, vals)


def apply_Q(f: SpectralFunction, s: IndexSet | Iterable[Sequence[int]]) -> SpectralFunction:
    """Exact ``Q_Delta f = sum_{k in Delta} q_k f``.

    ``s`` may also be a plain sequence of indices in any order; the result is
    bit-identical for every ordering.
    """
    members = list(s.members) if isinstance(s, IndexSet) else [tuple(k) for k in s]
    if isinstance(s, IndexSet) and s.d != f.d:
        raise DimensionMismatch(f"index set dimension {s.d} vs function dimension {f.d}")
    ks = [_check_k(f, k) for k in members]
    if not len(f) or not ks:
        return SpectralFunction(f.d)
    n_terms = len(f) * sum(2 ** sum(1 for v in k if v > 0) for k in ks)
    if n_terms > MAX_TERMS:
        raise TooLarge(f"Q_Delta would generate {n_terms} terms (limit {MAX_TERMS})")
    parts = [_terms(f, k) for k in ks]
    src = np.concatenate([p[0] for p in parts])
    out = np.concatenate([p[1] for p in parts])
    mult = np.concatenate([p[2] for p in parts])
    freqs, vals = reduce_terms(f.coeffs, src, out, mult)
    return SpectralFunction(f.d, freqs, vals)


def tensor_alias(f: SpectralFunction, ms: Sequence[int]) -> SpectralFunction:
    """Exact ``(I_{m_1} x ... x I_{m_d}) f`` by per-axis aliasing."""
    if len(ms) != f.d:
        raise DimensionMismatch(f"{len(ms)} levels for dimension {f.d}")
    if not len(f):
        return f
    ms_arr = np.asarray(ms, dtype=np.int64)
    out = (f.freqs + ms_arr) % (2 * ms_arr + 1) - ms_arr
    src = np.arange(len(f))
    freqs, vals = reduce_terms(f.coeffs, src, out, np.ones(len(f), dtype=np.int64))
    return SpectralFunction(f.d, freqs, vals)


# sample-space oracle


def _grid_samples(f: SpectralFunction, ns: Sequence[int]) -> np.ndarray:
    """``f`` on the tensor grid with ``ns[j]`` equidistant nodes on axis j."""
    vals = np.zeros(tuple(ns), dtype=np.complex128)
    if not len(f):
        return vals
    factors = [
        np.exp(1j * np.outer(TWO_PI * np.arange(n) / n, f.freqs[:, j].astype(float)))
        for j, n in enumerate(ns)
    ]
    letters = "abcdefgh"[: f.d]
    expr = ",".join(f"{c}z" for c in letters) + ",z->" + letters
    return np.einsum(expr, *factors, f.coeffs)


def tensor_interpolate_samples(f: SpectralFunction, ms: Sequence[int]) -> SpectralFunction:
    """``(I_{m_1} x ... x I_{m_d}) f`` from point samples and a tensor DFT."""
    ns = [2 * int(m) + 1 for m in ms]
    spec = np.fft.fftn(_grid_samples(f, ns)) / np.prod(ns)
    axes = [np.where(np.arange(n) <= m, np.arange(n), np.arange(n) - n) for n, m in zip(ns, ms)]
    grids = np.meshgrid(*axes, indexing="ij")
    freqs = np.stack([g.ravel() for g in grids], axis=1)
    return SpectralFunction(f.d, freqs, spec.ravel())


def q_k_from_samples(f: SpectralFunction, k: Sequence[int]) -> SpectralFunction:
    """``q_k f`` computed from function values on the tensor node grids (oracle)."""
    k = _check_k(f, k)
    choices = [[(1, 1)] if kj == 0 else [(2**kj, 1), (2 ** (kj - 1), -1)] for kj in k]
    total = SpectralFunction(f.d)
    for combo in itertools.product(*choices):
        ms = [c[0] for c in combo]
        sign = int(np.prod([c[1] for c in combo]))
        total = total + tensor_interpolate_samples(f, ms).scale(sign)
    return total


# grids and counting


def axis_node_count(kj: int) -> int:
    """Nodes used by ``eta_kj``: 3 for level 0, else ``(2^{k+1}+1) + (2^k+1)``."""
    return 3 if kj == 0 else (2 ** (kj + 1) + 1) + (2**kj + 1)


def _axis_moduli(kj: int) -> tuple[int, ...]:
    """Node counts ``2m+1`` of the interpolants entering ``eta_kj``."""
    return (3,) if kj == 0 else (2 ** (kj + 1) + 1, 2**kj + 1)


@lru_cache(maxsize=None)
def _phi(r: int) -> int:
    return int(totient(r))


def _union_count(d: int, axis_sets: Sequence[Sequence[tuple[int, ...]]]) -> int:
    """``|union_i prod_j A(moduli_ij)|`` where ``A(n)`` are the fractions ``l/n`` mod 1.

    A node ``p/r`` in lowest terms lies in ``A(n)`` iff ``r | n``, so a point only
    matters through its tuple of reduced denominators. Denominators are grouped
    by the set of tensor factors they belong to and the union is counted per
    group, weighting each denominator by Euler's totient (the number of
    numerators in lowest terms).
    """
    if not axis_sets:
        return 0
    factors = sorted({mods for row in axis_sets for mods in row})
    fid = {mods: i for i, mods in enumerate(factors)}
    # per-axis factor ids for each product
    rows = [tuple(fid[mods] for mods in row) for row in axis_sets]
    denoms = sorted({r for mods in factors for n in mods for r in divisors(n)})
    # signature of r: bitmask of factor ids whose node set contains denominator r
    weight: dict[int, int] = {}
    for r in denoms:
        sig = 0
        for i, mods in enumerate(factors):
            if any(n % r == 0 for n in mods):
                sig |= 1 << i
        weight[sig] = weight.get(sig, 0) + _phi(int(r))
    sigs = np.array(sorted(weight), dtype=object)
    rows_arr = np.array(sorted(set(rows)), dtype=np.int64)
    # bit table: covers[s, f] is True when signature s contains factor f
    covers = np.array([[bool(int(sg) >> i & 1) for i in range(len(factors))] for sg in sigs])
    total = 0
    for combo in itertools.product(range(len(sigs)), repeat=d - 1):
        # fix the first d-1 axes, vectorize over the last
        ok_rows = np.ones(rows_arr.shape[0], dtype=bool)
        for j, c in enumerate(combo):
            ok_rows &= covers[c, rows_arr[:, j]]
        if not ok_rows.any():
            continue
        last = covers[:, rows_arr[ok_rows, d - 1]].any(axis=1)
        prefix = 1
        for c in combo:
            prefix *= weight[sigs[c]]
        total += prefix * sum(weight[sigs[i]] for i in np.nonzero(last)[0])
    return int(total)


def _distinct_points(d: int, axis_sets: Sequence[Sequence[tuple[int, ...]]]) -> set:
    """Explicit union as tuples of reduced ``(p, r)`` pairs (fractions of 2*pi)."""
    from math import gcd

    pts = set()
    for row in axis_sets:
        axes = []
        for mods in row:
            axis = set()
            for n in mods:
                for p in range(n):
                    g = gcd(p, n)
                    axis.add((p // g, n // g))
            axes.append(sorted(axis))
        pts.update(itertools.product(*axes))
    return pts


@dataclass(frozen=True)
class GridReport:
    """Point counts of a sampling operator ``Q_Delta``."""

    multiset_count: int
    distinct_count: int
    points: tuple | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        out = {"multiset_count": self.multiset_count, "distinct_count": self.distinct_count}
        if self.points is not None:
            out["points"] = [[f"{p}/{r}" for p, r in pt] for pt in self.points]
        return out


def multiset_count(s: IndexSet) -> int:
    return sum(int(np.prod([axis_node_count(kj) for kj in k])) for k in s.members)


def distinct_count(s: IndexSet) -> int:
    return _union_count(s.d, [[_axis_moduli(kj) for kj in k] for k in s.members])


def sampling_grid(s: IndexSet, with_points: bool = False) -> GridReport:
    """Multiset and distinct node counts of ``Q_s``; points optional (as ``(p, r)`` pairs)."""
    if not is_solid(s):
        raise NotSolid("sampling_grid needs a solid index set")
    points = None
    if with_points:
        rows = [[_axis_moduli(kj) for kj in k] for k in s.members]
        points = tuple(sorted(_distinct_points(s.d, rows), key=lambda pt: [p / r for p, r in pt]))
    return GridReport(multiset_count(s), distinct_count(s), points)


def _smolyak_rows(d: int, m: int) -> list[list[tuple[int, ...]]]:
    lo = max(m - d + 1, 0)
    rows = []
    for j in itertools.product(range(m + 1), repeat=d):
        if lo <= sum(j) <= m:
            rows.append([(2 ** (ji + 1) + 1,) for ji in j])
    return rows


def smolyak_grid_count(d: int, m: int) -> int:
    """``|G(m)|`` for the classical sparse grid built from ``I_{2^{j}}`` node sets
    with ``m-d+1 <= |j|_1 <= m``."""
    if m < 0:
        raise InvalidParams(f"m must be >= 0, got {m}")
    return _union_count(d, _smolyak_rows(d, m))


def reproduction_check(s: IndexSet, trials: int = 20, seed: int = 0) -> bool:
    """Whether ``Q_s`` reproduces random polynomials supported on the hyperbolic cross of ``s``."""
    if not is_solid(s):
        raise NotSolid("reproduction needs a solid index set")
    rng = np.random.default_rng(seed)
    freqs = hyperbolic_cross(s)
    for _ in range(trials):
        r = np.sqrt(rng.uniform(size=freqs.shape[0]))
        theta = TWO_PI * rng.uniform(size=freqs.shape[0])
        f = SpectralFunction(s.d, freqs, r * np.exp(1j * theta))
        err = np.sqrt(np.sum(np.abs((apply_Q(f, s) - f).coeffs) ** 2))
        if err > 1e-10 * np.sqrt(np.sum(np.abs(f.coeffs) ** 2)):
            return False
    return True


def sampling_norm_plus(f: SpectralFunction, alpha: float, beta: float) -> float:
    """``(sum_k 2^{2(alpha|k|_1 + beta|k|_inf)} ||q_k f||_2^2)^{1/2}``.

    Only ``k`` with ``2^{k_j - 1} < band_j`` can contribute, so the sum runs over that box.
    """
    if not min(alpha, alpha + beta) > 0.5:
        raise InvalidParams(f"need min(alpha, alpha+beta) > 1/2, got {alpha}, {beta}")
    if not len(f):
        return 0.0
    upper = [level_of(int(b)) for b in f.axis_band()]
    total = 0.0
    for k in itertools.product(*(range(u + 1) for u in upper)):
        qk = q_k(f, k)
        if len(qk):
            e = TWO_PI**f.d * np.sum(np.abs(qk.coeffs) ** 2)
            total += 4.0 ** (alpha * sum(k) + beta * max(k)) * e
    return float(np.sqrt(total))


def grid_csv(s: IndexSet) -> str:
    """Per-index grid dump with columns ``k, nodes_per_axis, block_count``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "nodes_per_axis", "block_count"])
    for k in s.members:
        w.writerow([";".join(map(str, k)), ";".join(str(axis_node_count(kj)) for kj in k), 2 ** norm1(k)])
    return buf.getvalue()
