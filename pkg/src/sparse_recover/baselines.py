"""Exact approximation numbers of diagonal Sobolev embeddings, and rate fitting.

Between weighted sequence spaces the embedding is diagonal with entries
``sigma_l = w_target(l) / w_source(l)``, so ``a_n`` is the ``(n+1)``-st largest ratio.
Ratios are computed on the cube ``|l_j| <= Kc`` and only trusted up to a validity
horizon beyond which the omitted tail could contain larger ratios.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import Degenerate, InvalidParams
from .index_sets import SmoothnessParams

TARGETS = ("isotropic", "mixed")


def _sigma(freqs: np.ndarray, p: SmoothnessParams, target: str) -> np.ndarray:
    sq = freqs.astype(float) ** 2
    prod = np.prod(1 + sq, axis=-1)
    radial = 1 + sq.sum(axis=-1)
    src = prod**p.alpha * radial**p.beta
    tgt = radial**p.gamma if target == "isotropic" else prod**p.gamma
    return np.sqrt(tgt / src)


def _check_compact(p: SmoothnessParams, target: str) -> None:
    if target not in TARGETS:
        raise InvalidParams(f"target must be one of {TARGETS}, got {target!r}")
    if target == "isotropic":
        if not p.alpha > p.gamma - p.beta:
            raise InvalidParams("isotropic target needs alpha > gamma - beta")
        if not p.gamma <= p.alpha + p.beta:
            raise InvalidParams("isotropic target needs gamma <= alpha + beta")
    else:
        if p.beta != 0:
            raise InvalidParams("mixed target is defined for beta = 0")
        if not p.alpha > p.gamma:
            raise InvalidParams("mixed target needs alpha > gamma")


@dataclass(frozen=True)
class SingularSpectrum:
    """Descending singular values of the cube-truncated embedding."""

    sigma: np.ndarray
    Kc: int
    params: SmoothnessParams
    target: str
    boundary_max: float

    def __len__(self) -> int:
        return self.sigma.shape[0]

    def a(self, n: int) -> float:
        """``a_n = sigma_{n+1}`` (zero-based ``n``)."""
        return float(self.sigma[n])

    @property
    def n_max(self) -> int:
        """Largest ``n`` with ``a_n`` strictly above every ratio outside the cube."""
        above = np.nonzero(self.sigma > self.boundary_max)[0]
        return int(above[-1]) if above.size else -1

    def valid(self, n: int) -> bool:
        return 0 <= n <= self.n_max

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_n", "sigma_boundary_max", "valid"])
        bmax = f"{self.boundary_max:.17g}"
        nmax = self.n_max
        for n, s in enumerate(self.sigma):
            w.writerow([n, f"{s:.17g}", bmax, "true" if n <= nmax else "false"])
        return buf.getvalue()


def _shell_max(p: SmoothnessParams, target: str, r: int) -> float:
    """Largest ratio on ``{|l|_inf = r}``.

    The ratio does not increase in any ``|l_j|`` (compactness conditions), so the
    maximum over ``|l|_inf >= r`` sits on the faces ``|l_j| = r`` with other
    coordinates in ``[0, r]``.
    """
    d = p.d
    axis = np.arange(r + 1)
    grids = np.meshgrid(*([axis] * (d - 1)), indexing="ij") if d > 1 else []
    rest = np.stack([g.ravel() for g in grids], axis=1) if d > 1 else np.zeros((1, 0), dtype=int)
    face = np.column_stack([np.full(rest.shape[0], r), rest])
    return float(_sigma(face, p, target).max())


def approx_numbers(p: SmoothnessParams, target: str = "isotropic", Kc: int = 64) -> SingularSpectrum:
    """Singular values ``sigma_l`` over ``|l_j| <= Kc``, sorted descending.

    ``target`` is ``"isotropic"`` (``H^gamma``) or ``"mixed"`` (``H^gamma_mix``).
    """
    _check_compact(p, target)
    if Kc < 0:
        raise InvalidParams(f"Kc must be >= 0, got {Kc}")
    axis = np.arange(-Kc, Kc + 1)
    if (2 * Kc + 1) ** p.d > 5 * 10**7:
        raise InvalidParams(f"cube of radius {Kc} in d={p.d} is too large")
    grids = np.meshgrid(*([axis] * p.d), indexing="ij")
    freqs = np.stack([g.ravel() for g in grids], axis=1)
    sig = _sigma(freqs, p, target)
    sig = -np.sort(-sig, kind="stable")
    return SingularSpectrum(sig, Kc, p, target, _shell_max(p, target, Kc + 1))


def brute_force_widths(sigma: np.ndarray, n: int) -> float:
    """Best rank-``n`` diagonal error: min over kept ``n``-subsets of the largest dropped ratio."""
    sigma = np.asarray(sigma, dtype=float)
    idx = range(sigma.size)
    best = np.inf
    for keep in itertools.combinations(idx, n):
        mask = np.ones(sigma.size, dtype=bool)
        mask[list(keep)] = False
        best = min(best, float(sigma[mask].max()) if mask.any() else 0.0)
    return best


def fit_rate(pairs, correction: float = 0.0) -> tuple[float, float]:
    """Least-squares slope of ``log(e / (log m)^s)`` against ``log m``, plus ``r^2``.

    Parameters
    ----------
    pairs : sequence of (m, e)
        At least four points with positive entries.
    correction : float
        The exponent ``s`` of the divided-out logarithmic factor.

    Returns
    -------
    slope, r2
    """
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 4 or arr.shape[1] != 2:
        raise InvalidParams("fit_rate needs at least four (m, e) pairs")
    m, e = arr[:, 0], arr[:, 1]
    if np.any(m <= 0) or np.any(e <= 0):
        raise InvalidParams("fit_rate needs positive m and e")
    if np.all(m == m[0]):
        raise Degenerate("all abscissae are equal")
    if correction and np.any(m <= 1):
        raise InvalidParams("log correction needs m > 1")
    x = np.log(m)
    y = np.log(e) - (correction * np.log(np.log(m)) if correction else 0.0)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(r2)
