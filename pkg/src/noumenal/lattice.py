"""Boolean lattice of systems over a finite set of sites.

A system is a subset of the sites, stored as a bitmask.  Site ``i`` of the
universe corresponds to bit ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Sequence

from .errors import UniverseMismatchError

MAX_SITES = 16


@dataclass(frozen=True)
class SiteUniverse:
    labels: tuple[str, ...]

    def __init__(self, labels: Sequence[str], max_sites: int = MAX_SITES):
        labels = tuple(str(x) for x in labels)
        if not labels:
            raise ValueError("a universe needs at least one site")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate site labels in {labels}")
        if len(labels) > max_sites:
            raise ValueError(f"{len(labels)} sites exceeds the cap of {max_sites}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of_size(cls, n: int, prefix: str = "s") -> "SiteUniverse":
        return cls([f"{prefix}{i}" for i in range(n)])

    @property
    def site_count(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    @property
    def empty(self) -> "System":
        return System(self, 0)

    @property
    def full(self) -> "System":
        return System(self, self.full_mask)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown site {label!r}") from None

    def system(self, *sites: int | str) -> "System":
        """Build a system from site indices or labels."""
        mask = 0
        for s in sites:
            i = self.index(s) if isinstance(s, str) else int(s)
            if not 0 <= i < self.site_count:
                raise KeyError(f"site index {i} out of range")
            mask |= 1 << i
        return System(self, mask)

    def systems(self) -> list["System"]:
        """All ``2**n`` systems, ordered by bitmask."""
        return [System(self, m) for m in range(1 << self.site_count)]

    def singletons(self) -> list["System"]:
        return [System(self, 1 << i) for i in range(self.site_count)]


@dataclass(frozen=True)
class System:
    universe: SiteUniverse
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask & ~self.universe.full_mask:
            raise ValueError(f"mask {self.mask:#x} outside the universe")

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.universe.site_count) if self.mask >> i & 1)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.universe.labels[i] for i in self.sites)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def is_global(self) -> bool:
        return self.mask == self.universe.full_mask

    def _check(self, other: "System") -> None:
        if self.universe != other.universe:
            raise UniverseMismatchError(f"{self} and {other} live over different universes")

    def __or__(self, other: "System") -> "System":
        return union(self, other)

    def __and__(self, other: "System") -> "System":
        return intersection(self, other)

    def __invert__(self) -> "System":
        return complement(self)

    def __le__(self, other: "System") -> bool:
        return is_subsystem(self, other)

    def __lt__(self, other: "System") -> bool:
        return is_subsystem(self, other) and self != other

    def __iter__(self) -> Iterator[int]:
        return iter(self.sites)

    def __repr__(self) -> str:
        if self.is_empty:
            return "System(∅)"
        return "System({" + ",".join(self.labels) + "})"

    def name(self) -> str:
        if self.is_empty:
            return "∅"
        if self.is_global:
            return "S"
        return ",".join(self.labels)

    def subsystems(self) -> list["System"]:
        """Every system contained in this one, ordered by bitmask."""
        out = []
        sub = self.mask
        while True:
            out.append(System(self.universe, sub))
            if sub == 0:
                break
            sub = (sub - 1) & self.mask
        return sorted(out, key=lambda s: s.mask)


def union(a: System, b: System) -> System:
    a._check(b)
    return System(a.universe, a.mask | b.mask)


def intersection(a: System, b: System) -> System:
    a._check(b)
    return System(a.universe, a.mask & b.mask)


def complement(a: System) -> System:
    return System(a.universe, a.universe.full_mask & ~a.mask)


def is_subsystem(a: System, b: System) -> bool:
    return intersection(a, b) == a


def is_disjoint(a: System, b: System) -> bool:
    return intersection(a, b).is_empty


def generalized_union(parts: Iterable[System], universe: SiteUniverse | None = None) -> System:
    """Least upper bound of a finite collection; the empty collection gives the empty system.

    ``universe`` is only consulted when ``parts`` is empty.
    """
    parts = list(parts)
    if not parts:
        if universe is None:
            raise ValueError("the empty union needs an explicit universe")
        return universe.empty
    return reduce(union, parts)


def mutually_disjoint(parts: Iterable[System]) -> bool:
    seen = 0
    for p in parts:
        if seen & p.mask:
            return False
        seen |= p.mask
    return True
