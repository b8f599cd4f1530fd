"""Sparse Fourier representation of band-limited functions on the d-torus, and norms.

Conventions
-----------
``L2`` carries the ``(2*pi)^d`` Parseval factor, ``||f||_2^2 = (2pi)^d sum |c_l|^2``.
The polynomial-weight Sobolev norms (``HAB``, ``HGamma``, ``HMix``, ``HGammaMix``)
are plain weighted coefficient sums without that factor. The dyadic
Littlewood-Paley norms measure each block in ``L2`` and therefore do carry it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ._reduce import combine
from .errors import DimensionMismatch, InvalidParams, TooLarge
from .index_sets import MultiIndex

TWO_PI = 2 * np.pi
# cap for L_inf / L_q estimation grids (about 560 MB of complex values)
MAX_GRID_POINTS = 35_000_000


class SpectralFunction:
    """Immutable finite Fourier series ``sum_l c_l e^{i l.x}``.

    Frequencies are stored lexicographically sorted in an ``(n, d)`` int64 array,
    coefficients in a matching complex array. Exact zeros are never stored.
    """

    __slots__ = ("d", "freqs", "coeffs")

    def __init__(self, d: int, freqs=None, coeffs=None):
        if d < 1:
            raise InvalidParams(f"dimension must be >= 1, got {d}")
        freqs = np.zeros((0, d), dtype=np.int64) if freqs is None else np.asarray(freqs, dtype=np.int64)
        coeffs = np.zeros(0, dtype=np.complex128) if coeffs is None else np.asarray(coeffs, dtype=np.complex128)
        freqs = freqs.reshape(-1, d) if freqs.size else np.zeros((0, d), dtype=np.int64)
        if freqs.shape[0] != coeffs.shape[0]:
            raise InvalidParams(f"{freqs.shape[0]} frequencies but {coeffs.shape[0]} coefficients")
        freqs, coeffs = combine(freqs, coeffs.ravel())
        freqs.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralFunction is immutable")

    @classmethod
    def from_dict(cls, d: int, coeffs: Mapping[Sequence[int], complex]) -> "SpectralFunction":
        if not coeffs:
            return cls(d)
        keys = list(coeffs)
        for k in keys:
            if len(k) != d:
                raise DimensionMismatch(f"frequency {k} does not have length {d}")
        return cls(d, np.array(keys, dtype=np.int64), np.array([coeffs[k] for k in keys]))

    @classmethod
    def monomial(cls, ell: Sequence[int], c: complex = 1.0) -> "SpectralFunction":
        return cls(len(ell), np.array([ell]), np.array([c]))

    def to_dict(self) -> dict[MultiIndex, complex]:
        return {tuple(int(v) for v in f): complex(c) for f, c in zip(self.freqs, self.coeffs)}

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def __repr__(self) -> str:
        return f"SpectralFunction(d={self.d}, terms={len(self)}, band={self.band})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpectralFunction):
            return NotImplemented
        return (
            self.d == other.d
            and self.freqs.shape == other.freqs.shape
            and bool(np.array_equal(self.freqs, other.freqs))
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    __hash__ = None

    @property
    def band(self) -> int:
        """Largest ``|l_j|`` over the support."""
        return int(np.abs(self.freqs).max()) if len(self) else 0

    def axis_band(self) -> np.ndarray:
        if not len(self):
            return np.zeros(self.d, dtype=np.int64)
        return np.abs(self.freqs).max(axis=0)

    def _check(self, other: "SpectralFunction"):
        if self.d != other.d:
            raise DimensionMismatch(f"dimensions {self.d} and {other.d} differ")

    def __add__(self, other: "SpectralFunction") -> "SpectralFunction":
        self._check(other)
        return SpectralFunction(
            self.d,
            np.concatenate([self.freqs, other.freqs]),
            np.concatenate([self.coeffs, other.coeffs]),
        )

    def __neg__(self) -> "SpectralFunction":
        return SpectralFunction(self.d, self.freqs, -self.coeffs)

    def __sub__(self, other: "SpectralFunction") -> "SpectralFunction":
        self._check(other)
        return SpectralFunction(
            self.d,
            np.concatenate([self.freqs, other.freqs]),
            np.concatenate([self.coeffs, -other.coeffs]),
        )

    def scale(self, a: complex) -> "SpectralFunction":
        return SpectralFunction(self.d, self.freqs, self.coeffs * a)

    def restrict(self, mask: np.ndarray) -> "SpectralFunction":
        return SpectralFunction(self.d, self.freqs[mask], self.coeffs[mask])

    def max_abs_diff(self, other: "SpectralFunction") -> float:
        diff = self - other
        return float(np.abs(diff.coeffs).max()) if len(diff) else 0.0

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "coeffs": [
                {"freq": [int(v) for v in f], "re": float(c.real), "im": float(c.imag)}
                for f, c in zip(self.freqs, self.coeffs)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralFunction":
        d = int(obj["d"])
        entries = obj.get("coeffs", [])
        if not entries:
            return cls(d)
        freqs = np.array([e["freq"] for e in entries], dtype=np.int64)
        vals = np.array([complex(e["re"], e["im"]) for e in entries])
        return cls(d, freqs, vals)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def block_of(ell: Sequence[int]) -> MultiIndex:
    """Dyadic block index: 0 for a zero entry, else ``floor(log2|l_j|) + 1``."""
    return tuple(int(abs(int(v))).bit_length() for v in ell)


def block_indices(freqs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`block_of` for an ``(n, d)`` frequency array."""
    a = np.abs(np.asarray(freqs, dtype=np.int64))
    # frexp's exponent is the bit length, exact while |l| < 2^53
    _, e = np.frexp(a.astype(float))
    return np.where(a > 0, e, 0).astype(np.int64)


def lp_block(f: SpectralFunction, k: Sequence[int]) -> SpectralFunction:
    """Restriction of ``f`` to the dyadic block ``P_k``."""
    if len(k) != f.d:
        raise DimensionMismatch(f"block index {tuple(k)} does not match d={f.d}")
    if not len(f):
        return f
    mask = np.all(block_indices(f.freqs) == np.asarray(k, dtype=np.int64), axis=1)
    return f.restrict(mask)


def lp_blocks(f: SpectralFunction) -> dict[MultiIndex, SpectralFunction]:
    """All non-empty Littlewood-Paley pieces keyed by block index, lexicographic."""
    if not len(f):
        return {}
    blocks = block_indices(f.freqs)
    keys = sorted({tuple(int(v) for v in b) for b in blocks})
    return {k: f.restrict(np.all(blocks == np.array(k), axis=1)) for k in keys}


def block_energies(f: SpectralFunction) -> tuple[np.ndarray, np.ndarray]:
    """Per-block ``||delta_k f||_2^2`` as ``(block_indices (n_blocks, d), energies)``."""
    if not len(f):
        return np.zeros((0, f.d), dtype=np.int64), np.zeros(0)
    blocks = block_indices(f.freqs)
    order = np.lexsort(blocks.T[::-1])
    blocks = blocks[order]
    e = np.abs(f.coeffs[order]) ** 2
    change = np.any(blocks[1:] != blocks[:-1], axis=1)
    starts = np.concatenate([[0], np.nonzero(change)[0] + 1])
    return blocks[starts], np.add.reduceat(e, starts) * TWO_PI**f.d


@dataclass(frozen=True)
class NormKind:
    """Which norm to measure. ``name`` is one of
    ``hab, hgamma, hmix, hgammamix, l2, linf, lq``."""

    name: str
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    q: float = 2.0
    _names = ("hab", "hgamma", "hmix", "hgammamix", "l2", "linf", "lq")

    def __post_init__(self):
        if self.name not in self._names:
            raise InvalidParams(f"unknown norm kind {self.name!r}")
        if self.name == "hab" and not (self.alpha >= 0 and self.alpha + self.beta >= 0):
            raise InvalidParams(f"HAB needs alpha >= 0 and alpha+beta >= 0, got {self.alpha}, {self.beta}")
        if self.name in ("hgamma", "hgammamix") and self.gamma < 0:
            raise InvalidParams(f"gamma must be >= 0, got {self.gamma}")
        if self.name == "hmix" and self.alpha < 0:
            raise InvalidParams(f"alpha must be >= 0, got {self.alpha}")
        if self.name == "lq" and not self.q >= 1:
            raise InvalidParams(f"q must be >= 1, got {self.q}")

    @classmethod
    def hab(cls, alpha, beta):
        return cls("hab", alpha=alpha, beta=beta)

    @classmethod
    def hgamma(cls, gamma):
        return cls("hgamma", gamma=gamma)

    @classmethod
    def hmix(cls, alpha):
        return cls("hmix", alpha=alpha)

    @classmethod
    def hgamma_mix(cls, gamma):
        return cls("hgammamix", gamma=gamma)

    @classmethod
    def l2(cls):
        return cls("l2")

    @classmethod
    def linf(cls):
        return cls("linf")

    @classmethod
    def lq(cls, q):
        return cls("lq", q=q)

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        """Parse ``"hab:alpha=1,beta=0"``, ``"hgamma:gamma=1"``, ``"l2"``, ``"lq:q=4"`` ..."""
        name, _, rest = text.strip().partition(":")
        name = name.strip().lower()
        kwargs = {}
        for part in filter(None, (p.strip() for p in rest.split(","))):
            key, eq, val = part.partition("=")
            if not eq:
                raise InvalidParams(f"malformed norm parameter {part!r} in {text!r}")
            key = key.strip().lower()
            if key not in ("alpha", "beta", "gamma", "q"):
                raise InvalidParams(f"unknown norm parameter {key!r} in {text!r}")
            try:
                kwargs[key] = float(val)
            except ValueError as exc:
                raise InvalidParams(f"bad value in {text!r}") from exc
        return cls(name, **kwargs)

    def label(self) -> str:
        if self.name == "hab":
            return f"hab:alpha={self.alpha!r},beta={self.beta!r}"
        if self.name == "hmix":
            return f"hmix:alpha={self.alpha!r}"
        if self.name in ("hgamma", "hgammamix"):
            return f"{self.name}:gamma={self.gamma!r}"
        if self.name == "lq":
            return f"lq:q={self.q!r}"
        return self.name


def _weights_sq(freqs: np.ndarray, kind: NormKind) -> np.ndarray:
    sq = freqs.astype(float) ** 2
    if kind.name == "hab":
        return np.prod(1 + sq, axis=1) ** kind.alpha * (1 + sq.sum(axis=1)) ** kind.beta
    if kind.name == "hgamma":
        return (1 + sq.sum(axis=1)) ** kind.gamma
    if kind.name == "hmix":
        return np.prod(1 + sq, axis=1) ** kind.alpha
    if kind.name == "hgammamix":
        return np.prod(1 + sq, axis=1) ** kind.gamma
    raise InvalidParams(f"{kind.name} is not a weighted coefficient norm")


def grid_values(f: SpectralFunction, n: int) -> np.ndarray:
    """Values of ``f`` on the uniform tensor grid ``2*pi*j/n`` (needs ``n > 2*band``)."""
    if n <= 2 * f.band:
        raise InvalidParams(f"grid size {n} too small for band {f.band}")
    if n**f.d > MAX_GRID_POINTS:
        raise TooLarge(f"evaluation grid {n}^{f.d} exceeds {MAX_GRID_POINTS} points")
    spec = np.zeros((n,) * f.d, dtype=np.complex128)
    if len(f):
        idx = tuple((f.freqs % n).T)
        spec[idx] = f.coeffs
    return np.fft.ifftn(spec) * n**f.d


def estimate_grid_size(f: SpectralFunction) -> int:
    return 4 * (f.band + 1)


def norm(f: SpectralFunction, kind: NormKind) -> float:
    """Norm of ``f`` of the requested kind (see module docstring for conventions)."""
    if kind.name == "l2":
        return float(np.sqrt(TWO_PI**f.d * np.sum(np.abs(f.coeffs) ** 2)))
    if kind.name in ("linf", "lq"):
        if not len(f):
            return 0.0
        vals = np.abs(grid_values(f, estimate_grid_size(f)))
        if kind.name == "linf":
            return float(vals.max())
        return float((TWO_PI**f.d * np.mean(vals**kind.q)) ** (1 / kind.q))
    if not len(f):
        return 0.0
    w = _weights_sq(f.freqs, kind)
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2 * w)))


def norm_hab_dyadic(f: SpectralFunction, alpha: float, beta: float) -> float:
    """Littlewood-Paley form ``(sum_k 2^{2(alpha|k|_1 + beta|k|_inf)} ||delta_k f||_2^2)^{1/2}``."""
    if not (alpha >= 0 and alpha + beta >= 0):
        raise InvalidParams(f"need alpha >= 0 and alpha+beta >= 0, got {alpha}, {beta}")
    blocks, energy = block_energies(f)
    if not energy.size:
        return 0.0
    psi = alpha * blocks.sum(axis=1) + beta * blocks.max(axis=1)
    return float(np.sqrt(np.sum(4.0**psi * energy)))


def norm_hgamma_dyadic(f: SpectralFunction, gamma: float) -> float:
    """Isotropic dyadic form ``(sum_k 2^{2 gamma |k|_inf} ||delta_k f||_2^2)^{1/2}``."""
    if gamma < 0:
        raise InvalidParams(f"gamma must be >= 0, got {gamma}")
    return norm_hab_dyadic(f, 0.0, gamma)


def sampling_norm_plus(f: SpectralFunction, alpha: float, beta: float) -> float:
    """``(sum_k 2^{2(alpha|k|_1 + beta|k|_inf)} ||q_k f||_2^2)^{1/2}``; see :mod:`.sampling_operator`."""
    from .sampling_operator import sampling_norm_plus as _impl

    return _impl(f, alpha, beta)


def evaluate(f: SpectralFunction, x) -> np.ndarray | complex:
    """``sum_l c_l e^{i l.x}`` at one point ``(d,)`` or many points ``(n, d)``."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x.reshape(-1, f.d)
    if not len(f):
        out = np.zeros(pts.shape[0], dtype=np.complex128)
    else:
        out = np.exp(1j * (pts @ f.freqs.T.astype(float))) @ f.coeffs
    return complex(out[0]) if single else out
