"""Exact integer arithmetic for wavevectors and resonant-triple predicates.

A wavevector is a point of the integer lattice Z^2 indexing a Fourier mode
of the doubly periodic box.  A resonant triad (k1, k2; k3) satisfies

    k1 + k2 = k3,    |k1|^2 + |k2|^2 = |k3|^2,

which over the integers is equivalent to k1 + k2 = k3 together with
k1 . k2 = 0 (the two low-frequency legs are orthogonal).  Both conditions
are homogeneous, so enumeration over the integer lattice covers every
rational lattice spacing; the physical box side enters only as a scale
factor and, for a p x q box with gcd(p, q) = 1, as a divisibility filter
on the coordinates.

All predicates here use exact integer arithmetic only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "WaveVector",
    "Square",
    "Rectangular",
    "Domain",
    "Triad",
    "is_resonant_triad",
    "satisfies_rectangular",
]


@dataclass(frozen=True, order=True)
class WaveVector:
    """Integer lattice point (x, y).  Ordering is lexicographic on (x, y)."""

    x: int
    y: int

    def __add__(self, other: "WaveVector") -> "WaveVector":
        return WaveVector(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "WaveVector") -> "WaveVector":
        return WaveVector(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "WaveVector":
        return WaveVector(-self.x, -self.y)

    def scaled(self, c: int) -> "WaveVector":
        return WaveVector(c * self.x, c * self.y)

    def dot(self, other: "WaveVector") -> int:
        return self.x * other.x + self.y * other.y

    @property
    def norm2(self) -> int:
        """Squared euclidean norm |k|^2, exact."""
        return self.x * self.x + self.y * self.y

    @property
    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def as_tuple(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Square:
    """Square periodic box; the side enters only as a physical scale."""

    side: int = 1

    def __post_init__(self):
        if self.side < 1:
            raise ValueError(f"box side must be >= 1, got {self.side}")

    def admits(self, k: WaveVector) -> bool:
        return True


@dataclass(frozen=True)
class Rectangular:
    """p x q periodic box with coprime integer sides.

    Solutions in the p x q box are the square-box solutions whose
    x-coordinates are all divisible by p and y-coordinates by q.
    """

    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError(f"box sides must be >= 1, got ({self.p}, {self.q})")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"box sides must be coprime, got ({self.p}, {self.q})")

    def admits(self, k: WaveVector) -> bool:
        return k.x % self.p == 0 and k.y % self.q == 0


@dataclass(frozen=True)
class Domain:
    """Bounded lattice domain: |x|, |y| <= bound, plus the box filter.

    The zero vector is excluded from triads by default; ``include_zero``
    re-admits it for exploratory predicate checks but it never enters
    enumerated resonance sets.
    """

    bound: int
    box: Square | Rectangular = field(default_factory=Square)
    include_zero: bool = False

    def __post_init__(self):
        # bound 0 is admitted: it yields the empty enumeration.
        if self.bound < 0:
            raise ValueError(f"bound must be >= 0, got {self.bound}")

    def contains(self, k: WaveVector) -> bool:
        return abs(k.x) <= self.bound and abs(k.y) <= self.bound

    def admits(self, k: WaveVector) -> bool:
        return self.contains(k) and self.box.admits(k)

    def physical(self, k: WaveVector) -> tuple[float, float]:
        """Physical wavevector: lattice point scaled by the reciprocal sides."""
        if isinstance(self.box, Rectangular):
            return (k.x / self.box.p, k.y / self.box.q)
        return (k.x / self.box.side, k.y / self.box.side)

    def lattice_points(self):
        """All admissible nonzero lattice points, in lexicographic order."""
        for x in range(-self.bound, self.bound + 1):
            for y in range(-self.bound, self.bound + 1):
                if x == 0 and y == 0:
                    continue
                k = WaveVector(x, y)
                if self.box.admits(k):
                    yield k


@dataclass(frozen=True, order=True)
class Triad:
    """Ordered resonant triple (k1, k2; k3), k3 the high-frequency slot.

    Construction validates the resonance identities exactly and rejects
    the zero vector in any slot.
    """

    k1: WaveVector
    k2: WaveVector
    k3: WaveVector

    def __post_init__(self):
        if self.k1 + self.k2 != self.k3:
            raise ValueError(f"not a triad: {self.k1} + {self.k2} != {self.k3}")
        if self.k1.dot(self.k2) != 0:
            raise ValueError(f"not resonant: {self.k1} . {self.k2} != 0")
        if self.k1.is_zero or self.k2.is_zero or self.k3.is_zero:
            raise ValueError("zero wavevector not admitted in a triad")

    @property
    def members(self) -> tuple[WaveVector, WaveVector, WaveVector]:
        return (self.k1, self.k2, self.k3)

    def swapped(self) -> "Triad":
        """The same triangle with the two low-frequency legs exchanged."""
        return Triad(self.k2, self.k1, self.k3)

    def sort_key(self):
        """Canonical ordering key: lexicographic on (k3, k1)."""
        return (self.k3.x, self.k3.y, self.k1.x, self.k1.y)


def is_resonant_triad(
    k1: WaveVector, k2: WaveVector, k3: WaveVector, domain: Domain
) -> bool:
    """Total predicate: (k1, k2; k3) is a resonant triad inside ``domain``.

    Checks the sum rule, orthogonality (equivalent to the squared-norm sum
    rule given the sum rule), the zero-vector exclusion unless the domain
    re-admits it, the coordinate bound, and the rectangular divisibility
    filter when the box is rectangular.
    """
    if k1 + k2 != k3:
        return False
    if k1.dot(k2) != 0:
        return False
    if not domain.include_zero and (k1.is_zero or k2.is_zero or k3.is_zero):
        return False
    for k in (k1, k2, k3):
        if not domain.contains(k) or not domain.box.admits(k):
            return False
    return True


def satisfies_rectangular(t: Triad, p: int, q: int) -> bool:
    """Divisibility filter for a p x q box: x-coords by p, y-coords by q."""
    if math.gcd(p, q) != 1:
        raise ValueError(f"box sides must be coprime, got ({p}, {q})")
    return all(k.x % p == 0 and k.y % q == 0 for k in t.members)
