"""Sparse multi-index sets that select the dyadic differences of a sampling operator.

A multi-index ``k`` is a tuple of non-negative ints. Three families are built:

* energy sets      ``{k : alpha*|k|_1 - (gamma-beta)*|k|_inf <= xi}``
* epsilon variants ``{k : (alpha-eps)*|k|_1 - (gamma-beta-eps)*|k|_inf <= xi}``
* Smolyak sets     ``{k : |k|_1 <= m}``

Members are always kept in lexicographic order.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InfiniteSet, InvalidParams

MultiIndex = tuple[int, ...]

INT64_MAX = 2**63 - 1


class Provenance(str, enum.Enum):
    ENERGY = "Energy"
    ENERGY_EPS = "EnergyEps"
    SMOLYAK = "Smolyak"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class SmoothnessParams:
    """Smoothness bundle ``(alpha, beta, gamma, eps)`` on the ``d``-torus."""

    d: int
    alpha: float
    beta: float = 0.0
    gamma: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InvalidParams(f"d must be a positive integer, got {self.d}")
        if not self.alpha > 0:
            raise InvalidParams(f"alpha must be > 0, got {self.alpha}")
        if self.gamma < 0:
            raise InvalidParams(f"gamma must be >= 0, got {self.gamma}")
        if self.eps < 0:
            raise InvalidParams(f"eps must be >= 0, got {self.eps}")

    @property
    def gap(self) -> float:
        """``alpha - (gamma - beta)``, the exponent governing energy-set growth."""
        return self.alpha - (self.gamma - self.beta)

    def check_sampling(self) -> None:
        # point evaluation needs an embedding into C(T^d)
        if not min(self.alpha, self.alpha + self.beta) > 0.5:
            raise InvalidParams(
                f"min(alpha, alpha+beta) must exceed 1/2, got alpha={self.alpha}, beta={self.beta}"
            )

    def check_energy(self) -> None:
        if not self.alpha > self.gamma - self.beta:
            raise InfiniteSet(
                f"alpha={self.alpha} <= gamma-beta={self.gamma - self.beta}: energy set is infinite"
            )
        if not self.gamma - self.beta > 0:
            raise InvalidParams(f"gamma-beta must be > 0, got {self.gamma - self.beta}")

    def check_energy_eps(self) -> None:
        self.check_energy()
        if not 0 < self.eps < self.gamma - self.beta:
            raise InvalidParams(
                f"need 0 < eps < gamma-beta, got eps={self.eps}, gamma-beta={self.gamma - self.beta}"
            )

    def to_dict(self) -> dict:
        return {"d": self.d, "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "eps": self.eps}


def norm1(k: Sequence[int]) -> int:
    return int(sum(k))


def norm_inf(k: Sequence[int]) -> int:
    return int(max(k)) if len(k) else 0


@dataclass(frozen=True)
class IndexSet:
    """Finite set of multi-indices with a record of how it was built."""

    d: int
    members: tuple[MultiIndex, ...]
    provenance: Provenance = Provenance.CUSTOM
    params: dict = field(default_factory=dict, compare=False)
    _lookup: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        members = tuple(sorted({tuple(int(v) for v in k) for k in self.members}))
        for k in members:
            if len(k) != self.d:
                raise InvalidParams(f"member {k} has length {len(k)}, expected {self.d}")
            if min(k) < 0:
                raise InvalidParams(f"member {k} has a negative entry")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        object.__setattr__(self, "_lookup", frozenset(members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.members)

    def __contains__(self, k) -> bool:
        return tuple(k) in self._lookup

    def as_array(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64).reshape(len(self.members), self.d)

    @property
    def max_level(self) -> int:
        """Largest single coordinate over all members."""
        return max((norm_inf(k) for k in self.members), default=0)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "provenance": self.provenance.value,
            "params": dict(self.params),
            "members": [list(k) for k in self.members],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IndexSet":
        return cls(
            d=int(obj["d"]),
            members=tuple(tuple(k) for k in obj["members"]),
            provenance=Provenance(obj.get("provenance", "Custom")),
            params=dict(obj.get("params", {})),
        )


def custom_set(d: int, members: Iterable[Sequence[int]]) -> IndexSet:
    return IndexSet(d=d, members=tuple(tuple(k) for k in members), provenance=Provenance.CUSTOM)


def _simplex(d: int, n: int) -> Iterator[MultiIndex]:
    """All k in N_0^d with |k|_1 <= n, lexicographic."""
    if d == 1:
        for i in range(n + 1):
            yield (i,)
        return
    for i in range(n + 1):
        for rest in _simplex(d - 1, n - i):
            yield (i,) + rest


def _filtered_set(d: int, a: float, b: float, xi: float) -> list[MultiIndex]:
    # a|k|_1 - b|k|_inf <= xi implies (a-b)|k|_1 <= xi
    bound = int(np.floor(xi / (a - b) + d * b / (a - b)))
    return [k for k in _simplex(d, bound) if a * norm1(k) - b * norm_inf(k) <= xi]


def energy_set(p: SmoothnessParams, xi: float) -> IndexSet:
    """Index set ``{k : alpha|k|_1 - (gamma-beta)|k|_inf <= xi}``."""
    p.check_energy()
    if not xi > 0:
        raise InvalidParams(f"xi must be > 0, got {xi}")
    gb = p.gamma - p.beta
    members = _filtered_set(p.d, p.alpha, gb, xi)
    return IndexSet(
        d=p.d,
        members=tuple(members),
        provenance=Provenance.ENERGY,
        params={"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "xi": xi},
    )


def energy_set_eps(p: SmoothnessParams, xi: float) -> IndexSet:
    """Index set ``{k : (alpha-eps)|k|_1 - (gamma-beta-eps)|k|_inf <= xi}``."""
    p.check_energy_eps()
    if not xi > 0:
        raise InvalidParams(f"xi must be > 0, got {xi}")
    a = p.alpha - p.eps
    b = p.gamma - p.beta - p.eps
    members = _filtered_set(p.d, a, b, xi)
    return IndexSet(
        d=p.d,
        members=tuple(members),
        provenance=Provenance.ENERGY_EPS,
        params={"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "eps": p.eps, "xi": xi},
    )


def smolyak_set(d: int, m: int) -> IndexSet:
    """Classical Smolyak index set ``{k : |k|_1 <= m}``."""
    if int(m) != m or m < 0:
        raise InvalidParams(f"m must be a non-negative integer, got {m}")
    if d < 1:
        raise InvalidParams(f"d must be >= 1, got {d}")
    return IndexSet(
        d=d,
        members=tuple(_simplex(d, int(m))),
        provenance=Provenance.SMOLYAK,
        params={"m": int(m)},
    )


def box_set(upper: Sequence[int]) -> IndexSet:
    """Full box ``{k : k <= upper}`` componentwise (solid)."""
    ranges = [range(int(u) + 1) for u in upper]
    return custom_set(len(upper), itertools.product(*ranges))


def is_solid(s: IndexSet) -> bool:
    """True iff every member's unit-step predecessors are members.

    Checking the d immediate predecessors suffices; induction covers the rest.
    """
    for k in s.members:
        for j, kj in enumerate(k):
            if kj > 0 and (k[:j] + (kj - 1,) + k[j + 1 :]) not in s:
                return False
    return True


def block_axis(kj: int) -> np.ndarray:
    """Integers of the one-dimensional dyadic block P_kj."""
    if kj == 0:
        return np.zeros(1, dtype=np.int64)
    pos = np.arange(2 ** (kj - 1), 2**kj, dtype=np.int64)
    return np.concatenate([-pos[::-1], pos])


def block_frequencies(k: Sequence[int]) -> np.ndarray:
    """All frequency vectors of the tensor block P_k, shape ``(n, d)``."""
    axes = [block_axis(int(kj)) for kj in k]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def hyperbolic_cross(s: IndexSet) -> np.ndarray:
    """Union of the dyadic blocks of ``s``, lexicographically sorted ``(n, d)`` int array."""
    if len(s) == 0:
        return np.zeros((0, s.d), dtype=np.int64)
    freqs = np.concatenate([block_frequencies(k) for k in s.members], axis=0)
    order = np.lexsort(freqs.T[::-1])
    return freqs[order]


def dyadic_count_sum(s: IndexSet) -> int:
    """Exact ``sum_{k in s} 2^{|k|_1}``; raises OverflowError beyond int64."""
    total = sum(1 << norm1(k) for k in s.members)
    if total > INT64_MAX:
        raise OverflowError(f"dyadic count {total} exceeds the int64 range")
    return total


def weight_psi(k: Sequence[int], a: float, b: float) -> float:
    """``a|k|_1 + b|k|_inf``."""
    if not min(a, a + b) > 0:
        raise InvalidParams(f"need min(a, a+b) > 0, got a={a}, b={b}")
    return a * norm1(k) + b * norm_inf(k)
