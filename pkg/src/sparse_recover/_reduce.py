"""Deterministic reduction of (source, target, multiplicity) term lists.

Every operator here maps a monomial e^{i l x} to a signed sum of monomials with
integer multiplicities. Reducing in two stages (integers first, then complex sums
in a canonical (target, source) order) makes results independent of how the
terms were generated, so e.g. the order of summation over k never shows up in
the bits of the answer.
"""

from __future__ import annotations

import numpy as np


def _group_starts(keys: np.ndarray) -> np.ndarray:
    """Start offsets of runs of equal rows in a sorted 2-D key array."""
    if keys.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    change = np.any(keys[1:] != keys[:-1], axis=1)
    return np.concatenate([[0], np.nonzero(change)[0] + 1]).astype(np.int64)


def reduce_terms(
    coeffs: np.ndarray,
    src: np.ndarray,
    out: np.ndarray,
    mult: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Sum ``coeffs[src] * mult`` into the target frequencies ``out``.

    Parameters
    ----------
    coeffs : complex array, shape (n,)
        Source coefficients.
    src : int array, shape (t,)
        Index of the source coefficient for each term.
    out : int array, shape (t, d)
        Target frequency for each term.
    mult : int array, shape (t,)
        Integer multiplicity for each term.

    Returns
    -------
    freqs, values
        Lexicographically sorted unique target frequencies with non-zero values.
    """
    d = out.shape[1]
    if src.size == 0:
        return np.zeros((0, d), dtype=np.int64), np.zeros(0, dtype=np.complex128)

    # stage 1: integer multiplicity per (source, target)
    keys = np.column_stack([src, out]).astype(np.int64)
    order = np.lexsort(keys.T[::-1])
    keys = keys[order]
    starts = _group_starts(keys)
    m = np.add.reduceat(mult.astype(np.int64)[order], starts)
    keys = keys[starts]
    live = m != 0
    keys, m = keys[live], m[live]
    if keys.shape[0] == 0:
        return np.zeros((0, d), dtype=np.int64), np.zeros(0, dtype=np.complex128)

    # stage 2: complex sums in canonical (target, source) order
    tkeys = np.column_stack([keys[:, 1:], keys[:, 0]])
    order = np.lexsort(tkeys.T[::-1])
    tkeys = tkeys[order]
    vals = coeffs[tkeys[:, -1]] * m[order]
    starts = _group_starts(tkeys[:, :-1])
    sums = np.add.reduceat(vals, starts)
    freqs = tkeys[starts, :-1]
    keep = sums != 0
    return freqs[keep], sums[keep]


def combine(freqs: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge duplicate frequencies (summed in input order) and drop exact zeros."""
    d = freqs.shape[1]
    if freqs.shape[0] == 0:
        return np.zeros((0, d), dtype=np.int64), np.zeros(0, dtype=np.complex128)
    # lexsort is stable, so duplicates keep the caller's order
    order = np.lexsort(freqs.T[::-1])
    f = freqs[order]
    v = values[order]
    starts = _group_starts(f)
    sums = np.add.reduceat(v, starts)
    f = f[starts]
    keep = sums != 0
    return f[keep].astype(np.int64), sums[keep].astype(np.complex128)
