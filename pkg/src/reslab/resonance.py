"""Enumeration of the 3-wave resonance sets over a bounded lattice domain.

Two equivalent routes are kept side by side:

* ``enumerate_bruteforce`` scans every ordered pair (k1, k2) in the domain
  and keeps the resonant ones.  O(K^4), obviously correct, and retained
  permanently as the oracle for the generators.
* ``generate_axis_family`` / ``generate_general_family`` produce the two
  parametric solution families: right triangles with catheti along the
  coordinate axes, {(0, b), (a, 0), (a, b)}, and the fully off-axis
  solutions obtained from k2y = -k1x*k2x / k1y whenever the division is
  exact.  Together they cover the solution set; tests prove the union
  equal to the brute force.

Resonance sets come in two flavours: S1(k3) collects ordered pairs with
k1 + k2 = k3 and |k1|^2 + |k2|^2 = |k3|^2 (the u^2 nonlinearity), S2(k3)
collects pairs with k2 + k3 = k1 and |k2|^2 + |k3|^2 = |k1|^2 (the
conjugate-linear nonlinearity).  Pairs are ordered: (k1, k2) and (k2, k1)
are distinct entries, matching the unrestricted double sum of the
effective equations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import Domain, Triad, WaveVector, is_resonant_triad

__all__ = [
    "BoundExceededError",
    "MAX_BRUTEFORCE_BOUND",
    "enumerate_bruteforce",
    "generate_axis_family",
    "generate_general_family",
    "resonance_set",
    "ResonanceSet",
    "full_resonance_set",
    "sort_triads",
]

#: Largest bound the O(K^4) scan accepts before refusing to run.
MAX_BRUTEFORCE_BOUND = 64

Pair = tuple[WaveVector, WaveVector]


class BoundExceededError(Exception):
    """Raised when an enumeration bound exceeds the configured maximum."""


def sort_triads(triads: list[Triad]) -> list[Triad]:
    """Canonical order: lexicographic on ((k3.x, k3.y), (k1.x, k1.y))."""
    return sorted(triads, key=Triad.sort_key)


def enumerate_bruteforce(domain: Domain, max_bound: int = MAX_BRUTEFORCE_BOUND) -> list[Triad]:
    """All resonant triads with every coordinate in [-K, K], by full scan.

    Returns ordered triads (the k1 <-> k2 swap appears as a separate
    entry) in canonical order.  Raises :class:`BoundExceededError` if the
    domain bound exceeds ``max_bound``.
    """
    if domain.bound > max_bound:
        raise BoundExceededError(
            f"bound {domain.bound} exceeds brute-force maximum {max_bound}"
        )
    K = domain.bound
    box = domain.box
    coords = range(-K, K + 1)
    out = []
    for x1 in coords:
        for y1 in coords:
            if x1 == 0 and y1 == 0:
                continue
            for x2 in coords:
                for y2 in coords:
                    if x2 == 0 and y2 == 0:
                        continue
                    if x1 * x2 + y1 * y2 != 0:
                        continue
                    x3 = x1 + x2
                    y3 = y1 + y2
                    if abs(x3) > K or abs(y3) > K:
                        continue
                    k1 = WaveVector(x1, y1)
                    k2 = WaveVector(x2, y2)
                    k3 = WaveVector(x3, y3)
                    if box.admits(k1) and box.admits(k2) and box.admits(k3):
                        out.append(Triad(k1, k2, k3))
    return sort_triads(out)


def generate_axis_family(domain: Domain) -> list[Triad]:
    """The 2-parameter family {(0, b), (a, 0), (a, b)}, both pair orders.

    These are exactly the solutions in which k1 or k2 has a zero
    coordinate: the triangle's catheti lie along the coordinate axes.
    """
    K = domain.bound
    box = domain.box
    out = []
    nonzero = [c for c in range(-K, K + 1) if c != 0]
    for a in nonzero:
        for b in nonzero:
            k1 = WaveVector(0, b)
            k2 = WaveVector(a, 0)
            k3 = WaveVector(a, b)
            if box.admits(k1) and box.admits(k2) and box.admits(k3):
                out.append(Triad(k1, k2, k3))
                out.append(Triad(k2, k1, k3))
    return sort_triads(out)


def generate_general_family(domain: Domain) -> list[Triad]:
    """The 3-parameter family: all solutions with no zero coordinate.

    Scans (k1x, k2x, k1y), all nonzero; emits the triad whenever k1y
    divides k1x*k2x exactly and the completed vectors stay inside the
    domain.  The scan hits each ordered triad exactly once, and covers
    both pair orders.
    """
    K = domain.bound
    box = domain.box
    out = []
    nonzero = [c for c in range(-K, K + 1) if c != 0]
    for k1x in nonzero:
        for k1y in nonzero:
            for k2x in nonzero:
                prod = k1x * k2x
                if prod % k1y != 0:
                    continue
                k2y = -(prod // k1y)
                if k2y == 0 or abs(k2y) > K:
                    continue
                k1 = WaveVector(k1x, k1y)
                k2 = WaveVector(k2x, k2y)
                k3 = k1 + k2
                if abs(k3.x) > K or abs(k3.y) > K:
                    continue
                if box.admits(k1) and box.admits(k2) and box.admits(k3):
                    out.append(Triad(k1, k2, k3))
    return sort_triads(out)


def resonance_set(kind: str, k3: WaveVector, domain: Domain) -> list[Pair]:
    """Ordered pairs of S1(k3) or S2(k3) inside the domain.

    ``kind`` is ``"s1"`` or ``"s2"``.  Returns the empty list when no
    resonances exist (in particular for k3 outside the domain).
    """
    kind = kind.lower()
    if kind not in ("s1", "s2"):
        raise ValueError(f"kind must be 's1' or 's2', got {kind!r}")
    if k3.is_zero or not domain.admits(k3):
        return []
    pairs: list[Pair] = []
    if kind == "s1":
        # k1 + k2 = k3, orthogonal legs
        for k1 in domain.lattice_points():
            k2 = k3 - k1
            if k2.is_zero or not domain.admits(k2):
                continue
            if k1.dot(k2) == 0:
                pairs.append((k1, k2))
    else:
        # k2 + k3 = k1; the norm rule is k2 . k3 = 0 given the sum rule
        for k2 in domain.lattice_points():
            k1 = k2 + k3
            if k1.is_zero or not domain.admits(k1):
                continue
            if k2.dot(k3) == 0:
                pairs.append((k1, k2))
    pairs.sort(key=lambda p: (p[0].x, p[0].y, p[1].x, p[1].y))
    return pairs


@dataclass(frozen=True)
class ResonanceSet:
    """The full S1 or S2 carrier over a domain: k3 -> ordered pair list.

    Only nonempty entries are stored; keys are in lexicographic order.
    """

    kind: str
    domain: Domain
    carrier: dict[WaveVector, tuple[Pair, ...]]

    def pairs(self, k3: WaveVector) -> tuple[Pair, ...]:
        return self.carrier.get(k3, ())

    @property
    def total_pairs(self) -> int:
        return sum(len(v) for v in self.carrier.values())

    def rows(self) -> list[tuple[WaveVector, WaveVector, WaveVector]]:
        """Flat (k1, k2, k3) rows in canonical order."""
        out = []
        for k3, prs in self.carrier.items():
            for k1, k2 in prs:
                out.append((k1, k2, k3))
        return out


def full_resonance_set(kind: str, domain: Domain) -> ResonanceSet:
    """Build the whole carrier map of S1 or S2 over the domain."""
    carrier: dict[WaveVector, tuple[Pair, ...]] = {}
    for k3 in domain.lattice_points():
        prs = resonance_set(kind, k3, domain)
        if prs:
            carrier[k3] = tuple(prs)
    return ResonanceSet(kind=kind.lower(), domain=domain, carrier=carrier)
