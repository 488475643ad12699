"""Finite groups with Haar weights, metric balls, and compact-set algebra.

Two kinds of group are supported:

* products of cyclic groups ``Z_N1 x ... x Z_Nk``, where composition wraps
  modulo each ``N_i``, and
* bounded box truncations ``[-m_i, m_i]^k`` of ``Z^k``, where compositions
  that leave the carrier raise :class:`OutOfCarrier` instead of wrapping
  (silent wrapping would corrupt any boundary analysis built on top).

Elements are plain ints for rank-1 groups and tuples of ints otherwise.  The
Haar weight is counting measure (1.0 per element) but is stored per element,
so every "integral" below is an explicit weighted sum and weighted carriers
remain possible.  Balls use the max metric with per-coordinate cyclic
distance ``min(d, N - d)`` on cyclic groups and ``|d|`` on boxes; both choices
make every ball symmetric and put the identity inside.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Element = int | tuple[int, ...]

# Composition index tables are only materialized for small carriers.
_TABLE_LIMIT = 2048


class OutOfCarrier(Exception):
    """A composition or translate left the carrier of a truncated group."""


class NonSymmetricNeighborhood(Exception):
    """The operation needs a symmetric neighborhood U = U^{-1} containing e."""


class GroupModel:
    """Finite group carrier with composition, Haar weights, and metric balls."""

    def __init__(self, kind: str, sizes: Sequence[int]):
        sizes = tuple(int(s) for s in sizes)
        if not sizes:
            raise ValueError("at least one coordinate is required")
        if kind == "cyclic":
            if any(n < 1 for n in sizes):
                raise ValueError(f"cyclic moduli must be positive, got {sizes}")
            ranges = [range(n) for n in sizes]
            self.moduli: tuple[int, ...] | None = sizes
            self.halfwidths: tuple[int, ...] | None = None
        elif kind == "box":
            if any(m < 0 for m in sizes):
                raise ValueError(f"box halfwidths must be nonnegative, got {sizes}")
            ranges = [range(-m, m + 1) for m in sizes]
            self.moduli = None
            self.halfwidths = sizes
        else:
            raise ValueError(f"unknown group kind {kind!r}")
        self.kind = kind
        self.rank = len(sizes)
        if self.rank == 1:
            self.carrier: tuple[Element, ...] = tuple(ranges[0])
        else:
            self.carrier = tuple(itertools.product(*ranges))
        self._pos = {x: i for i, x in enumerate(self.carrier)}
        self.haar = np.ones(len(self.carrier))
        self.identity: Element = 0 if self.rank == 1 else (0,) * self.rank
        self._balls: dict[int, CompactSet] = {}
        self._compose_table: np.ndarray | None = None

    @classmethod
    def cyclic(cls, moduli: Sequence[int]) -> "GroupModel":
        return cls("cyclic", moduli)

    @classmethod
    def box(cls, halfwidths: Sequence[int]) -> "GroupModel":
        return cls("box", halfwidths)

    def __repr__(self) -> str:
        sizes = self.moduli if self.kind == "cyclic" else self.halfwidths
        return f"GroupModel({self.kind}, {sizes})"

    def __len__(self) -> int:
        return len(self.carrier)

    @property
    def order(self) -> int:
        return len(self.carrier)

    def _coords(self, x: Element) -> tuple[int, ...]:
        return (x,) if self.rank == 1 else x  # type: ignore[return-value]

    def _from_coords(self, coords: Sequence[int]) -> Element:
        return coords[0] if self.rank == 1 else tuple(coords)

    def canon(self, x) -> Element:
        """Canonical carrier form of ``x``; wraps cyclic coordinates modulo N.

        Box coordinates outside the carrier raise :class:`OutOfCarrier`.
        """
        if self.rank == 1:
            coords = (x,) if isinstance(x, (int, np.integer)) else tuple(x)
        else:
            coords = tuple(x)
        if len(coords) != self.rank:
            raise ValueError(f"element {x!r} has rank {len(coords)}, expected {self.rank}")
        coords = tuple(int(c) for c in coords)
        if self.kind == "cyclic":
            assert self.moduli is not None
            return self._from_coords([c % n for c, n in zip(coords, self.moduli)])
        assert self.halfwidths is not None
        for c, m in zip(coords, self.halfwidths):
            if not -m <= c <= m:
                raise OutOfCarrier(f"element {x!r} lies outside the carrier")
        return self._from_coords(coords)

    def contains(self, x) -> bool:
        try:
            return self.canon(x) in self._pos
        except (OutOfCarrier, ValueError, TypeError):
            return False

    def index(self, x) -> int:
        """Position of ``x`` in carrier order."""
        return self._pos[self.canon(x)]

    def compose(self, a, b) -> Element:
        """Group product a.b; raises OutOfCarrier when a box product escapes."""
        ca, cb = self._coords(self.canon(a)), self._coords(self.canon(b))
        if self.kind == "cyclic":
            assert self.moduli is not None
            return self._from_coords([(x + y) % n for x, y, n in zip(ca, cb, self.moduli)])
        assert self.halfwidths is not None
        coords = [x + y for x, y in zip(ca, cb)]
        for c, m in zip(coords, self.halfwidths):
            if not -m <= c <= m:
                raise OutOfCarrier(f"product of {a!r} and {b!r} escapes the carrier")
        return self._from_coords(coords)

    def inverse(self, a) -> Element:
        ca = self._coords(self.canon(a))
        if self.kind == "cyclic":
            assert self.moduli is not None
            return self._from_coords([(-x) % n for x, n in zip(ca, self.moduli)])
        return self._from_coords([-x for x in ca])

    def metric(self, x) -> int:
        """Max-metric distance from ``x`` to the identity."""
        coords = self._coords(self.canon(x))
        if self.kind == "cyclic":
            assert self.moduli is not None
            return max(min(c, n - c) for c, n in zip(coords, self.moduli))
        return max(abs(c) for c in coords)

    @property
    def diameter(self) -> int:
        return max(self.metric(x) for x in self.carrier)

    def ball(self, radius: int) -> "CompactSet":
        """Symmetric metric ball {x : metric(x, e) <= radius} around the identity."""
        radius = int(radius)
        if radius < 0:
            raise ValueError(f"ball radius must be nonnegative, got {radius}")
        if radius not in self._balls:
            members = frozenset(x for x in self.carrier if self.metric(x) <= radius)
            self._balls[radius] = CompactSet(self, members)
        return self._balls[radius]

    def haar_weight(self, x) -> float:
        return float(self.haar[self.index(x)])

    def _compose_table_or_none(self) -> np.ndarray | None:
        """|G| x |G| table of product positions; -1 marks escapes (box kind)."""
        if self._compose_table is None and self.order <= _TABLE_LIMIT:
            n = self.order
            table = np.empty((n, n), dtype=np.int32)
            for i, a in enumerate(self.carrier):
                for j, b in enumerate(self.carrier):
                    try:
                        table[i, j] = self._pos[self.compose(a, b)]
                    except OutOfCarrier:
                        table[i, j] = -1
            self._compose_table = table
        return self._compose_table

    def _translate_positions(self, y, positions: np.ndarray) -> np.ndarray:
        """Carrier positions of y.S given the positions of S; raises on escape."""
        table = self._compose_table_or_none()
        if table is not None:
            out = table[self.index(y), positions]
            if out.size and int(out.min()) < 0:
                raise OutOfCarrier(f"translate by {y!r} escapes the carrier")
            return out
        out = np.empty(len(positions), dtype=np.int64)
        for k, p in enumerate(positions):
            out[k] = self._pos[self.compose(y, self.carrier[int(p)])]
        return out


@dataclass(frozen=True)
class CompactSet:
    """Finite subset of a group carrier, deduplicated by construction."""

    group: GroupModel
    members: frozenset

    def __contains__(self, x) -> bool:
        try:
            return self.group.canon(x) in self.members
        except (OutOfCarrier, ValueError, TypeError):
            return False

    def __len__(self) -> int:
        return len(self.members)

    def sorted_members(self) -> list[Element]:
        return sorted(self.members, key=self.group.index)

    def positions(self) -> np.ndarray:
        return np.array(sorted(self.group.index(x) for x in self.members), dtype=np.int64)


@dataclass(frozen=True)
class PointSet:
    """Indexed list of group elements; duplicates allowed, indices distinct."""

    group: GroupModel
    points: tuple

    def __len__(self) -> int:
        return len(self.points)

    def positions(self) -> np.ndarray:
        return np.array([self.group.index(p) for p in self.points], dtype=np.int64)


def compact_set(group: GroupModel, members: Iterable) -> CompactSet:
    return CompactSet(group, frozenset(group.canon(x) for x in members))


def point_set(group: GroupModel, points: Iterable) -> PointSet:
    return PointSet(group, tuple(group.canon(x) for x in points))


def full_point_set(group: GroupModel) -> PointSet:
    return PointSet(group, tuple(group.carrier))


def measure(K: CompactSet) -> float:
    """Haar measure of K (a weighted cardinality)."""
    return float(sum(K.group.haar_weight(x) for x in K.members))


def product_set(K: CompactSet, L: CompactSet) -> CompactSet:
    """Pointwise product set KL = {k.l}; OutOfCarrier propagates on boxes."""
    if K.group is not L.group:
        raise ValueError("product of sets from different groups")
    group = K.group
    out = {group.compose(k, l) for k in K.members for l in L.members}
    return CompactSet(group, frozenset(out))


def translate_set(y, K: CompactSet) -> CompactSet:
    """Left translate yK; preserves Haar measure on cyclic groups."""
    group = K.group
    return CompactSet(group, frozenset(group.compose(y, k) for k in K.members))


def complement(K: CompactSet) -> CompactSet:
    return CompactSet(K.group, frozenset(K.group.carrier) - K.members)


def is_symmetric(U: CompactSet) -> bool:
    return all(U.group.inverse(x) in U.members for x in U.members)


def require_symmetric_ball(U: CompactSet) -> None:
    """Check U = U^{-1} and e in U, else raise NonSymmetricNeighborhood."""
    if U.group.identity not in U.members or not is_symmetric(U):
        raise NonSymmetricNeighborhood(
            "a symmetric neighborhood U = U^{-1} containing the identity is required"
        )


def separation_constant(X: PointSet, U: CompactSet) -> int:
    """Largest number of points of X, counted with multiplicity, in any translate xU.

    For symmetric U this equals the sup norm of sum_j chi_{x_j U}; symmetry is
    enforced so both readings agree.
    """
    group = X.group
    require_symmetric_ball(U)
    counts = Counter(X.points)
    best = 0
    for x in group.carrier:
        total = 0
        for u in U.members:
            try:
                total += counts.get(group.compose(x, u), 0)
            except OutOfCarrier:
                continue
        if total > best:
            best = total
    return best
