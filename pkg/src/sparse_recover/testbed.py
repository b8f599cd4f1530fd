"""Deterministic families of band-limited test functions.

Family strings look like ``"cubepoly:L=16,seed=7"``,
``"blockextremal:alpha=2,beta=0,K=10,delta=0.5,seed=1"`` or ``"productdecay:p=2,L=32"``.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from math import comb

import numpy as np

from .errors import InvalidParams, TooLarge
from .index_sets import _simplex
from .spectral import SpectralFunction, norm_hab_dyadic

MAX_SUPPORT = 10**7


@dataclass(frozen=True)
class CubePoly:
    """I.i.d. coefficients, uniform on the complex unit disc, on ``|l_j| <= L``."""

    L: int
    seed: int = 0

    kind = "cubepoly"

    def band(self, d: int) -> int:
        return self.L

    def materialize(self, d: int) -> SpectralFunction:
        n = (2 * self.L + 1) ** d
        if n > MAX_SUPPORT:
            raise TooLarge(f"cubepoly support {n} exceeds {MAX_SUPPORT}")
        axis = np.arange(-self.L, self.L + 1, dtype=np.int64)
        grids = np.meshgrid(*([axis] * d), indexing="ij")
        freqs = np.stack([g.ravel() for g in grids], axis=1)
        rng = np.random.default_rng(self.seed)
        r = np.sqrt(rng.uniform(size=n))
        theta = 2 * np.pi * rng.uniform(size=n)
        return SpectralFunction(d, freqs, r * np.exp(1j * theta))


@dataclass(frozen=True)
class BlockExtremal:
    """One frequency per block ``P_k``, ``|k|_1 <= K``, at the corner ``2^{k_j - 1}``.

    The coefficient ``2^{-(alpha|k|_1 + beta|k|_inf)} (1+|k|_1)^{-(1/2+delta)}`` gives
    each block a dyadic HAB contribution of ``(2pi)^d (1+|k|_1)^{-(1+2 delta)}``.
    ``seed`` is accepted for a uniform interface; the family is deterministic.
    """

    alpha: float
    beta: float
    K: int
    delta: float = 0.5
    seed: int = 0

    kind = "blockextremal"

    def band(self, d: int) -> int:
        return 2 ** (self.K - 1) if self.K > 0 else 0

    def materialize(self, d: int) -> SpectralFunction:
        n = comb(self.K + d, d)
        if n > MAX_SUPPORT:
            raise TooLarge(f"blockextremal support {n} exceeds {MAX_SUPPORT}")
        ks = np.array(list(_simplex(d, self.K)), dtype=np.int64).reshape(-1, d)
        freqs = np.where(ks > 0, np.left_shift(1, np.maximum(ks - 1, 0)), 0)
        n1 = ks.sum(axis=1)
        psi = self.alpha * n1 + self.beta * ks.max(axis=1)
        vals = 2.0 ** (-psi) * (1.0 + n1) ** (-(0.5 + self.delta))
        return SpectralFunction(d, freqs, vals.astype(np.complex128))


@dataclass(frozen=True)
class ProductDecay:
    """``c_l = prod_j (1+|l_j|)^{-p}`` on ``|l_j| <= L``."""

    p: float
    L: int

    kind = "productdecay"

    def band(self, d: int) -> int:
        return self.L

    def materialize(self, d: int) -> SpectralFunction:
        n = (2 * self.L + 1) ** d
        if n > MAX_SUPPORT:
            raise TooLarge(f"productdecay support {n} exceeds {MAX_SUPPORT}")
        axis = np.arange(-self.L, self.L + 1, dtype=np.int64)
        w = (1.0 + np.abs(axis)) ** (-self.p)
        freqs = np.array(list(itertools.product(axis, repeat=d)), dtype=np.int64).reshape(-1, d)
        vals = np.array(list(itertools.product(w, repeat=d))).reshape(-1, d).prod(axis=1)
        return SpectralFunction(d, freqs, vals.astype(np.complex128))


TestFamily = CubePoly | BlockExtremal | ProductDecay

_FAMILIES = {
    "cubepoly": (CubePoly, {"L": int, "seed": int}),
    "blockextremal": (
        BlockExtremal,
        {"alpha": float, "beta": float, "K": int, "delta": float, "seed": int},
    ),
    "productdecay": (ProductDecay, {"p": float, "L": int}),
}


def parse_family(text: str) -> TestFamily:
    """Parse a family string such as ``"cubepoly:L=16,seed=7"``."""
    name, _, rest = text.strip().partition(":")
    name = name.strip().lower()
    if name not in _FAMILIES:
        raise InvalidParams(f"unknown test family {name!r}")
    cls, fields = _FAMILIES[name]
    kwargs = {}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = part.partition("=")
        key = key.strip()
        if not eq or key not in fields:
            raise InvalidParams(f"bad parameter {part!r} for family {name}")
        try:
            conv = fields[key]
            kwargs[key] = conv(val) if conv is float else int(val)
        except ValueError as exc:
            raise InvalidParams(f"bad value in {part!r}") from exc
    try:
        fam = cls(**kwargs)
    except TypeError as exc:
        raise InvalidParams(f"missing parameters for {name}: {exc}") from exc
    _validate(fam)
    return fam


def _validate(fam: TestFamily) -> None:
    if isinstance(fam, (CubePoly, ProductDecay)) and fam.L < 0:
        raise InvalidParams("L must be >= 0")
    if isinstance(fam, BlockExtremal):
        if fam.K < 0:
            raise InvalidParams("K must be >= 0")
        if not (fam.alpha >= 0 and fam.alpha + fam.beta >= 0):
            raise InvalidParams("blockextremal needs alpha >= 0 and alpha+beta >= 0")
        if fam.delta < 0:
            raise InvalidParams("delta must be >= 0")


def family_to_string(fam: TestFamily) -> str:
    params = ",".join(f"{k}={v}" for k, v in asdict(fam).items())
    return f"{fam.kind}:{params}"


def materialize(fam: TestFamily | str, d: int) -> SpectralFunction:
    """Build the family member in dimension ``d``; identical inputs give identical bits."""
    if isinstance(fam, str):
        fam = parse_family(fam)
    if d < 1:
        raise InvalidParams(f"d must be >= 1, got {d}")
    _validate(fam)
    return fam.materialize(d)


def hab_membership_margin(f: SpectralFunction, alpha: float, beta: float) -> float:
    """The dyadic ``H^{alpha,beta}`` norm, used to normalize study errors."""
    return norm_hab_dyadic(f, alpha, beta)
