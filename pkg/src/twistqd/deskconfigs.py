"""Ready-made desk-scale region configurations for the LTO checks.

All configurations live on the digon-ring annulus ring_annulus(4, 2): rings
R0..R4 of two vertices joined by parallel edges, quad faces between
consecutive rings.  Edge classes: ring i holds {2i, 2i+1}; the spokes of gap
i hold {10+2i, 10+2i+1}.

The smooth configurations put the interval on the interior ring R1, so the
vertex operators of the outer projector never touch it (their stars poke
into gap 0, which stays outside the regions).  The rough configurations put
the interval on the hole ring R0, the lattice's actual boundary, where the
closed-star rule excludes every vertex operator near it.  All Lambda regions
are contractible staircases or collars; none supports a logical operator
that the relevant boundary algebra could not see.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import Region, SurfaceLattice, builtin_lattice

RINGS = 5


def ring(i: int) -> tuple[int, int]:
    return (2 * i, 2 * i + 1)


def spokes(gap: int) -> tuple[int, int]:
    return (2 * RINGS + 2 * gap, 2 * RINGS + 2 * gap + 1)


def _smooth(cs):
    return tuple((c, "smooth") for c in cs)


def _rough(cs):
    return tuple((c, "rough") for c in cs)


@dataclass
class SmoothConfig:
    lattice: SurfaceLattice
    lam_far: Region        # completely surrounded by delta2, for LTO1
    lam: Region            # surrounded, smooth interval I = R1
    lam_small: Region      # nested inside lam with the same interval
    delta1: Region
    delta2: Region


@dataclass
class RoughConfig:
    """Rough-interval configurations; I = R0 is the hole boundary.

    The collar lam must include the full first layer of faces: its interval-
    adjacent ring-1 vertices then lie in its interior and carry the interior
    partial vertex operators the rough boundary algebra needs (this is what
    the sufficiently-large condition is about).  LTO1/2/3 run on the 3-gap
    lattice; LTO4 needs growth room and lives on the 4-gap one.
    """
    lattice: SurfaceLattice
    lam_far: Region
    lam: Region            # fat collar, surrounded, sufficiently large
    lam2: Region           # lam plus the next spoke layer (for LTO3)
    lam_not_large: Region  # fails the sufficiently-large condition
    delta: Region          # everything except R0
    lattice4: SurfaceLattice
    lam4: Region
    delta4_small: Region
    delta4_big: Region     # 16 edges; handled by the sparse projector


def smooth_config() -> SmoothConfig:
    lat = builtin_lattice("ring_annulus", [4, 2])
    delta1 = Region(lat, frozenset(ring(1) + spokes(1) + ring(2) + spokes(2) + ring(3)),
                    boundary=_smooth(ring(1)) + _smooth(ring(3)), name="delta1")
    delta2 = Region(lat, frozenset(delta1.edges | set(spokes(3) + ring(4))),
                    boundary=_smooth(ring(1)) + _smooth(ring(4)), name="delta2")
    # contractible staircase: no gap cut and no ring cycle inside it
    lam_far = Region(lat, frozenset({ring(2)[0], spokes(2)[0],
                                     ring(3)[0], spokes(3)[0]}), name="lam_far")
    lam = Region(lat, frozenset(ring(1) + spokes(1) + ring(2)),
                 boundary=_smooth(ring(1)) + _smooth(ring(2)), name="lam")
    lam_small = Region(lat, frozenset(ring(1) + spokes(1)),
                       boundary=_smooth(ring(1)) + _rough(ring(2)),
                       name="lam_small")
    return SmoothConfig(lattice=lat, lam_far=lam_far, lam=lam,
                        lam_small=lam_small, delta1=delta1, delta2=delta2)


@dataclass
class ProperIntervalConfig:
    """Smooth configuration on triangle rings, ring_annulus(4, 3): the
    interval is two of ring 1's three edges, giving a single internal
    vertex; this is the geometry the nesting (LTO3) and injectivity (LTO4)
    statements assume (the digon rings make distinct boundary operators
    collide there).  Ring i holds classes {3i..3i+2}; gap-i spokes hold
    {15+3i..15+3i+2}."""
    lattice: SurfaceLattice
    lam1: Region           # 2x1 block of gap-1 quads behind the interval
    lam2: Region           # lam1 plus the remaining ring-2 edge
    delta1: Region         # rings 1..3 (15 edges)
    delta2: Region         # rings 1..4 (21 edges; sparse projector)


def proper_interval_config() -> ProperIntervalConfig:
    lat = builtin_lattice("ring_annulus", [4, 3])
    r = lambda i: tuple(range(3 * i, 3 * i + 3))
    s = lambda g: tuple(range(15 + 3 * g, 15 + 3 * g + 3))
    sm = _smooth
    delta1 = Region(lat, frozenset(r(1) + s(1) + r(2) + s(2) + r(3)),
                    boundary=sm(r(1)) + sm(r(3)), name="delta1_pi")
    delta2 = Region(lat, frozenset(delta1.edges | set(s(3) + r(4))),
                    boundary=sm(r(1)) + sm(r(4)), name="delta2_pi")
    # quads j=0 and j=1 of gap 1: interval {r1p0, r1p1} with internal vertex
    lam1_edges = {3, 4, 6, 7, 15 + 3, 15 + 4, 15 + 5}
    lam1 = Region(lat, frozenset(lam1_edges),
                  boundary=sm((3, 4, 18, 20, 6, 7)), name="lam1_pi")
    lam2 = Region(lat, frozenset(lam1_edges | {8}),
                  boundary=sm((3, 4, 18, 20, 6, 7, 8)), name="lam2_pi")
    return ProperIntervalConfig(lattice=lat, lam1=lam1, lam2=lam2,
                                delta1=delta1, delta2=delta2)


def rough_config() -> RoughConfig:
    # three gaps: ring 3 is the outer lattice rim, so its vertices have
    # complete closed stars inside everything-but-R0
    lat = builtin_lattice("ring_annulus", [3, 2])
    r = lambda i: (2 * i, 2 * i + 1)
    s = lambda g: (8 + 2 * g, 8 + 2 * g + 1)
    delta = Region(lat, frozenset(s(0) + r(1) + s(1) + r(2) + s(2) + r(3)),
                   boundary=_rough(r(0)) + _smooth(r(3)), name="deltar")
    lam = Region(lat, frozenset(s(0) + r(1) + s(1) + r(2)),
                 boundary=_rough(r(0)) + _smooth(r(2)), name="lamr")
    lam2 = Region(lat, frozenset(lam.edges | set(s(2))),
                  boundary=_rough(r(0)) + _smooth(r(2)), name="lamr2")
    lam_far = Region(lat, frozenset({r(2)[0], s(2)[0], r(3)[0]}),
                     name="lamr_far")
    lam_not_large = Region(lat, frozenset(s(0) + r(1) + s(1)),
                           boundary=_rough(r(0)) + _rough(r(2)),
                           name="lam_not_large")

    lat4 = builtin_lattice("ring_annulus", [4, 2])
    r4 = lambda i: (2 * i, 2 * i + 1)
    s4 = lambda g: (10 + 2 * g, 10 + 2 * g + 1)
    lam4 = Region(lat4, frozenset(s4(0) + r4(1) + s4(1) + r4(2)),
                  boundary=_rough(r4(0)) + _smooth(r4(2)), name="lamr4")
    delta4_small = Region(lat4, frozenset(s4(0) + r4(1) + s4(1) + r4(2)
                                          + s4(2) + r4(3)),
                          boundary=_rough(r4(0)) + _smooth(r4(3)),
                          name="delta4_small")
    delta4_big = Region(lat4, frozenset(delta4_small.edges | set(s4(3) + r4(4))),
                        boundary=_rough(r4(0)) + _smooth(r4(4)),
                        name="delta4_big")
    return RoughConfig(lattice=lat, lam_far=lam_far, lam=lam, lam2=lam2,
                       lam_not_large=lam_not_large, delta=delta,
                       lattice4=lat4, lam4=lam4, delta4_small=delta4_small,
                       delta4_big=delta4_big)
