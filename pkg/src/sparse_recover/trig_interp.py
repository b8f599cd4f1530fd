"""Univariate trigonometric interpolation on 2m+1 equidistant nodes.

``I_m f`` is the unique trigonometric polynomial of degree <= m that matches ``f``
at ``t_l = 2*pi*l/(2m+1)``. In frequency space it folds every frequency onto its
representative modulo 2m+1 in ``[-m, m]``; that aliasing rule is the canonical
route here, while the sample/DFT route is kept as an independent cross-check.

One-dimensional coefficient maps are plain ``dict[int, complex]`` without zero
entries.
"""

from __future__ import annotations

import numpy as np

from ._reduce import reduce_terms
from .errors import InvalidParams, LengthMismatch

Coeffs1D = dict


def _check_m(m: int) -> int:
    if int(m) != m or m < 0:
        raise InvalidParams(f"m must be a non-negative integer, got {m}")
    return int(m)


def nodes(m: int) -> np.ndarray:
    m = _check_m(m)
    n = 2 * m + 1
    return 2 * np.pi * np.arange(n) / n


def dirichlet(m: int, t):
    """Dirichlet kernel ``D_m(t) = sin((m+1/2)t) / sin(t/2)``.

    Near multiples of 2*pi the cosine-sum form is used instead.
    """
    m = _check_m(m)
    t = np.asarray(t, dtype=float)
    s = np.sin(t / 2)
    near = np.abs(s) < 1e-9
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = np.sin((m + 0.5) * t) / s
    if np.any(near):
        ks = np.arange(1, m + 1)
        summed = 1 + 2 * np.cos(np.multiply.outer(t, ks)).sum(axis=-1)
        closed = np.where(near, summed, closed)
    return closed[()] if closed.ndim == 0 else closed


def dirichlet_sum(m: int, t):
    """Direct ``sum_{|k|<=m} e^{ikt}`` (real by symmetry)."""
    m = _check_m(m)
    t = np.asarray(t, dtype=float)
    ks = np.arange(-m, m + 1)
    return np.exp(1j * np.multiply.outer(t, ks)).sum(axis=-1).real


def alias_frequency(m: int, ell):
    """Representative of ``ell`` modulo ``2m+1`` in ``[-m, m]`` (vectorized)."""
    n = 2 * m + 1
    return (np.asarray(ell, dtype=np.int64) + m) % n - m


def _to_arrays(f: Coeffs1D) -> tuple[np.ndarray, np.ndarray]:
    keys = sorted(f)
    freqs = np.array(keys, dtype=np.int64)
    vals = np.array([f[k] for k in keys], dtype=np.complex128)
    return freqs, vals


def _to_dict(freqs: np.ndarray, vals: np.ndarray) -> Coeffs1D:
    return {int(k): complex(v) for k, v in zip(freqs.ravel(), vals)}


def interpolate_samples(m: int, samples) -> Coeffs1D:
    """Coefficients of ``I_m f`` from the values ``f(t_l)``, l = 0..2m."""
    m = _check_m(m)
    samples = np.asarray(samples, dtype=np.complex128)
    n = 2 * m + 1
    if samples.shape != (n,):
        raise LengthMismatch(f"expected {n} samples for m={m}, got shape {samples.shape}")
    spectrum = np.fft.fft(samples) / n
    out = {}
    for r in range(n):
        ell = r if r <= m else r - n
        if spectrum[r] != 0:
            out[ell] = complex(spectrum[r])
    return dict(sorted(out.items()))


def alias_coeffs(m: int, f: Coeffs1D) -> Coeffs1D:
    """Exact coefficients of ``I_m f``: ``c_l(I_m f) = sum_j c_{l + j(2m+1)}(f)``."""
    m = _check_m(m)
    if not f:
        return {}
    freqs, vals = _to_arrays(f)
    out = alias_frequency(m, freqs)[:, None]
    src = np.arange(freqs.size)
    ofreqs, ovals = reduce_terms(vals, src, out, np.ones(freqs.size, dtype=np.int64))
    return _to_dict(ofreqs, ovals)


def eta_terms(level: int, ell: np.ndarray) -> list[tuple[np.ndarray, np.ndarray, int]]:
    """Monomial images of the dyadic difference ``eta_level`` applied to ``e^{i ell t}``.

    Returns a list of ``(mask, target, sign)``; entries outside ``mask`` vanish.
    For level 0 this is ``I_1``. For level >= 1 it is ``I_{2^level} - I_{2^{level-1}}``,
    which cancels exactly whenever both aliases coincide.
    """
    if level == 0:
        return [(np.ones(ell.shape, dtype=bool), alias_frequency(1, ell), 1)]
    hi = alias_frequency(2**level, ell)
    lo = alias_frequency(2 ** (level - 1), ell)
    live = hi != lo
    return [(live, hi, 1), (live, lo, -1)]


def eta(m: int, f: Coeffs1D) -> Coeffs1D:
    """``eta_m f``: ``I_{2^m} f - I_{2^{m-1}} f`` for m > 0 and ``I_1 f`` for m = 0."""
    m = _check_m(m)
    if not f:
        return {}
    freqs, vals = _to_arrays(f)
    src_parts, out_parts, mult_parts = [], [], []
    for mask, target, sign in eta_terms(m, freqs):
        idx = np.nonzero(mask)[0]
        src_parts.append(idx)
        out_parts.append(target[idx])
        mult_parts.append(np.full(idx.size, sign, dtype=np.int64))
    src = np.concatenate(src_parts)
    out = np.concatenate(out_parts)[:, None]
    mult = np.concatenate(mult_parts)
    ofreqs, ovals = reduce_terms(vals, src, out, mult)
    return _to_dict(ofreqs, ovals)


def evaluate_1d(f: Coeffs1D, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not f:
        return np.zeros(t.shape, dtype=np.complex128)
    freqs, vals = _to_arrays(f)
    return np.exp(1j * np.multiply.outer(t, freqs)) @ vals


def band(f: Coeffs1D) -> int:
    return max((abs(k) for k in f), default=0)


def samples_at_nodes(m: int, f: Coeffs1D) -> np.ndarray:
    return evaluate_1d(f, nodes(m))


def level_of(n: int) -> int:
    """Smallest k >= 0 with ``2^k >= n`` (so ``e^{int}`` lies in the degree-2^k space)."""
    n = abs(int(n))
    return 0 if n <= 1 else (n - 1).bit_length()
