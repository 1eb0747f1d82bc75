"""Combinatorial surface lattices as ordered fundamental-domain complexes.

A lattice is drawn in the plane: vertices carry distinct integer labels whose
total order orients every edge from the smaller to the larger label.  Vertex
and edge identification classes describe how the drawn complex glues to a
closed surface; open patches simply give every cell its own class.  Faces are
stored as counterclockwise cycles of directed drawn-edge references.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class LatticeError(ValueError):
    pass


class OrientationError(LatticeError):
    pass


class InconsistentIdentification(LatticeError):
    pass


class OpenSurfaceEdge(LatticeError):
    pass


class NonCycleFace(LatticeError):
    pass


class UnknownLatticeFamily(LatticeError):
    pass


class RegionError(ValueError):
    pass


class MixedInterval(RegionError):
    pass


class IEqualsWholeBoundary(RegionError):
    pass


Step = tuple[int, int]  # (drawn edge index, +1 with orientation / -1 against)


@dataclass(frozen=True)
class SurfaceLattice:
    """Validated drawn complex with identification classes.

    vertices: per drawn vertex, (label, vertex_class); edges: per drawn edge,
    (tail_vertex, head_vertex, edge_class) with label(tail) < label(head);
    faces: CCW cycles of steps.  Vertex references in edges/faces are indices
    into ``vertices``.
    """

    vertices: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int, int], ...]
    faces: tuple[tuple[Step, ...], ...]
    num_vertex_classes: int
    num_edge_classes: int
    mode: str = "closed"

    # derived, filled by validate_lattice
    _face_vertices: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    def label(self, v: int) -> int:
        return self.vertices[v][0]

    def vclass(self, v: int) -> int:
        return self.vertices[v][1]

    def eclass(self, e: int) -> int:
        return self.edges[e][2]

    def face_vertices(self, f: int) -> tuple[int, ...]:
        """Drawn vertices along the CCW cycle (source of each step)."""
        return self._face_vertices[f]

    def face_classes(self, f: int) -> frozenset[int]:
        return frozenset(self.eclass(e) for e, _ in self.faces[f])

    def step_source(self, step: Step) -> int:
        e, d = step
        u, v, _ = self.edges[e]
        return u if d > 0 else v

    def step_target(self, step: Step) -> int:
        e, d = step
        u, v, _ = self.edges[e]
        return v if d > 0 else u

    def sng(self, f: int, e: int) -> int:
        """Orientation of drawn edge e along the CCW boundary of face f."""
        for ei, d in self.faces[f]:
            if ei == e:
                return d
        raise LatticeError(f"edge {e} not on face {f}")

    def class_copies(self, c: int) -> tuple[int, ...]:
        return self._class_copies[c]

    def class_vertices(self, vc: int) -> tuple[int, ...]:
        """Drawn vertices of a vertex class, in ascending label order."""
        return self._class_vertices[vc]

    def star(self, vc: int) -> tuple[tuple[int, int], ...]:
        """Star slots of a vertex class: (drawn edge, +1 away / -1 toward)."""
        return self._star[vc]

    def star_classes(self, vc: int) -> frozenset[int]:
        return frozenset(self.eclass(e) for e, _ in self._star[vc])

    def closed_star_classes(self, vc: int) -> frozenset[int]:
        out = set(self.eclass(e) for e, _ in self._star[vc])
        for f in self._corner_faces[vc]:
            out |= self.face_classes(f)
        return frozenset(out)

    def corner_faces(self, vc: int) -> tuple[int, ...]:
        """Faces having at least one drawn corner in the vertex class."""
        return self._corner_faces[vc]

    def vertex_classes_of_edge_set(self, classes: Iterable[int]) -> frozenset[int]:
        cs = set(classes)
        out = set()
        for u, v, c in self.edges:
            if c in cs:
                out.add(self.vclass(u))
                out.add(self.vclass(v))
        return frozenset(out)

    def faces_inside(self, classes: Iterable[int]) -> tuple[int, ...]:
        cs = set(classes)
        return tuple(f for f in range(len(self.faces))
                     if self.face_classes(f) <= cs)


def validate_lattice(vertices: Sequence[tuple[int, int]],
                     edges: Sequence[tuple[int, int, int]],
                     faces: Sequence[Sequence[Step]],
                     mode: str = "closed") -> SurfaceLattice:
    """Check all structural invariants and return the lattice with caches."""
    if mode not in ("closed", "patch"):
        raise LatticeError(f"mode must be closed or patch, got {mode!r}")
    labels = [lab for lab, _ in vertices]
    if len(set(labels)) != len(labels):
        raise LatticeError("vertex labels must be distinct")
    nv = len(vertices)
    vclasses = sorted({vc for _, vc in vertices})
    if vclasses != list(range(len(vclasses))):
        raise LatticeError("vertex classes must be 0..n-1 without gaps")

    for u, v, c in edges:
        if not (0 <= u < nv and 0 <= v < nv):
            raise LatticeError(f"edge ({u},{v}) references unknown vertex")
        if vertices[u][0] >= vertices[v][0]:
            raise OrientationError(
                f"edge ({u},{v}) must point from the smaller label "
                f"({vertices[u][0]} !< {vertices[v][0]})")
    eclasses = sorted({c for _, _, c in edges})
    if eclasses != list(range(len(eclasses))):
        raise LatticeError("edge classes must be 0..n-1 without gaps")

    # identification consistency: copies of a class join the same ordered
    # pair of vertex classes
    pair_of: dict[int, tuple[int, int]] = {}
    for u, v, c in edges:
        pair = (vertices[u][1], vertices[v][1])
        if c in pair_of and pair_of[c] != pair:
            raise InconsistentIdentification(
                f"edge class {c} connects {pair_of[c]} and {pair}")
        pair_of[c] = pair

    lat = SurfaceLattice(vertices=tuple(vertices),
                         edges=tuple(edges),
                         faces=tuple(tuple(f) for f in faces),
                         num_vertex_classes=len(vclasses),
                         num_edge_classes=len(eclasses),
                         mode=mode)

    quotient = len(eclasses) < len(edges) or len(vclasses) < nv
    min_distinct = 2 if quotient else 3
    face_vertices = []
    for fi, cycle in enumerate(lat.faces):
        if len(cycle) < 2:
            raise NonCycleFace(f"face {fi} has fewer than 2 steps")
        verts = []
        for k, step in enumerate(cycle):
            nxt = cycle[(k + 1) % len(cycle)]
            if lat.step_target(step) != lat.step_source(nxt):
                raise NonCycleFace(f"face {fi} is not a closed cycle at step {k}")
            verts.append(lat.step_source(step))
        if len({e for e, _ in cycle}) < min_distinct:
            raise NonCycleFace(
                f"face {fi} traverses fewer than {min_distinct} distinct edges")
        face_vertices.append(tuple(verts))

    # per-class step census
    census: dict[int, list[int]] = {c: [] for c in eclasses}
    for cycle in lat.faces:
        for e, d in cycle:
            census[lat.eclass(e)].append(d)
    for c, dirs in census.items():
        if mode == "closed":
            if sorted(dirs) != [-1, 1]:
                raise OpenSurfaceEdge(
                    f"edge class {c} appears in face steps {dirs}, expected one "
                    "of each direction on a closed surface")
        else:
            if len(dirs) > 2 or (len(dirs) == 2 and dirs[0] == dirs[1]):
                raise LatticeError(
                    f"edge class {c} appears in face steps {dirs}")

    object.__setattr__(lat, "_face_vertices", tuple(face_vertices))

    class_copies: dict[int, list[int]] = {c: [] for c in eclasses}
    for ei, (_, _, c) in enumerate(lat.edges):
        class_copies[c].append(ei)
    object.__setattr__(lat, "_class_copies",
                       {c: tuple(v) for c, v in class_copies.items()})

    class_vertices: dict[int, list[int]] = {vc: [] for vc in vclasses}
    for vi, (_, vc) in enumerate(lat.vertices):
        class_vertices[vc].append(vi)
    for vc in class_vertices:
        class_vertices[vc].sort(key=lambda vi: lat.label(vi))
    object.__setattr__(lat, "_class_vertices",
                       {vc: tuple(v) for vc, v in class_vertices.items()})

    star: dict[int, list[tuple[int, int]]] = {vc: [] for vc in vclasses}
    for ei, (u, v, _) in enumerate(lat.edges):
        star[lat.vclass(u)].append((ei, +1))
        star[lat.vclass(v)].append((ei, -1))
    object.__setattr__(lat, "_star", {vc: tuple(v) for vc, v in star.items()})

    corner_faces: dict[int, list[int]] = {vc: [] for vc in vclasses}
    for fi, verts in enumerate(face_vertices):
        for vc in {lat.vclass(v) for v in verts}:
            corner_faces[vc].append(fi)
    object.__setattr__(lat, "_corner_faces",
                       {vc: tuple(v) for vc, v in corner_faces.items()})
    return lat


def euler_characteristic(lat: SurfaceLattice) -> int:
    return lat.num_vertex_classes - lat.num_edge_classes + len(lat.faces)


# ---------------------------------------------------------------------------
# canonical triangulation with ghost edges

@dataclass(frozen=True)
class TriangulatedLattice:
    """Canonical triangulation of a lattice: each face is fanned out from its
    smallest drawn vertex along the CCW boundary; the added chords are ghost
    edges whose colors are determined by the boundary path they replace.

    Extended edges are indexed base edges first, ghosts after; each ghost is
    its own (singleton) extended edge class.
    """

    base: SurfaceLattice
    ghosts: tuple[tuple[int, int, int], ...]          # (tail, head, base face)
    ghost_expansion: tuple[tuple[Step, ...], ...]     # base-edge path per ghost
    triangles: tuple[tuple[Step, ...], ...]           # steps over extended edges
    triangle_face: tuple[int, ...]                    # owning base face

    @property
    def num_ext_edges(self) -> int:
        return len(self.base.edges) + len(self.ghosts)

    @property
    def num_ext_classes(self) -> int:
        return self.base.num_edge_classes + len(self.ghosts)

    def ext_endpoints(self, e: int) -> tuple[int, int]:
        nb = len(self.base.edges)
        if e < nb:
            u, v, _ = self.base.edges[e]
            return u, v
        u, v, _ = self.ghosts[e - nb]
        return u, v

    def ext_class(self, e: int) -> int:
        nb = len(self.base.edges)
        if e < nb:
            return self.base.edges[e][2]
        return self.base.num_edge_classes + (e - nb)

    def triangles_of_face(self, f: int) -> tuple[int, ...]:
        return self._face_triangles[f]

    def triangles_at_vertex(self, v: int) -> tuple[int, ...]:
        return self._vertex_triangles.get(v, ())

    def ext_star(self, vc: int) -> tuple[tuple[int, int], ...]:
        """Star slots of a vertex class over extended edges."""
        return self._ext_star[vc]


def triangulate(lat: SurfaceLattice) -> TriangulatedLattice:
    """Fan every k-gon face from its smallest vertex; triangles keep the CCW
    orientation inherited from the face."""
    nb = len(lat.edges)
    ghosts: list[tuple[int, int, int]] = []
    expansions: list[tuple[Step, ...]] = []
    triangles: list[tuple[Step, ...]] = []
    tri_face: list[int] = []

    for fi, cycle in enumerate(lat.faces):
        verts = lat.face_vertices(fi)
        k = len(cycle)
        if k == 3:
            triangles.append(tuple(cycle))
            tri_face.append(fi)
            continue
        if len(set(verts)) != k:
            raise LatticeError(
                f"face {fi} repeats a drawn vertex; canonical triangulation "
                "from the smallest vertex is ambiguous")
        start = min(range(k), key=lambda i: lat.label(verts[i]))
        cyc = [cycle[(start + i) % k] for i in range(k)]
        vts = [verts[(start + i) % k] for i in range(k)]
        # ghost chords [v, vts[i]] for i = 2..k-2, colored by the CCW path
        chord: dict[int, int] = {}
        for i in range(2, k - 1):
            chord[i] = nb + len(ghosts)
            ghosts.append((vts[0], vts[i], fi))
            expansions.append(tuple(cyc[:i]))
        for i in range(1, k - 1):
            into = cyc[0] if i == 1 else (chord[i], +1)
            outof = cyc[k - 1] if i + 1 == k - 1 else (chord[i + 1], -1)
            triangles.append((into, cyc[i], outof))
            tri_face.append(fi)

    T = TriangulatedLattice(base=lat,
                            ghosts=tuple(ghosts),
                            ghost_expansion=tuple(expansions),
                            triangles=tuple(triangles),
                            triangle_face=tuple(tri_face))

    face_tris: dict[int, list[int]] = {f: [] for f in range(len(lat.faces))}
    for ti, f in enumerate(tri_face):
        face_tris[f].append(ti)
    object.__setattr__(T, "_face_triangles",
                       {f: tuple(v) for f, v in face_tris.items()})

    vertex_tris: dict[int, list[int]] = {}
    for ti, tri in enumerate(triangles):
        for step in tri:
            src = _ext_step_source(T, step)
            vertex_tris.setdefault(src, []).append(ti)
    object.__setattr__(T, "_vertex_triangles",
                       {v: tuple(t) for v, t in vertex_tris.items()})

    ext_star: dict[int, list[tuple[int, int]]] = {
        vc: [] for vc in range(lat.num_vertex_classes)}
    for e in range(T.num_ext_edges):
        u, v = T.ext_endpoints(e)
        ext_star[lat.vclass(u)].append((e, +1))
        ext_star[lat.vclass(v)].append((e, -1))
    object.__setattr__(T, "_ext_star",
                       {vc: tuple(v) for vc, v in ext_star.items()})
    return T


def _ext_step_source(T: TriangulatedLattice, step: Step) -> int:
    e, d = step
    u, v = T.ext_endpoints(e)
    return u if d > 0 else v


def triangle_vertices(T: TriangulatedLattice, ti: int) -> tuple[int, int, int]:
    tri = T.triangles[ti]
    return tuple(_ext_step_source(T, s) for s in tri)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# regions

@dataclass(frozen=True)
class Region:
    """A set of edge classes with declared boundary markers.

    Boundary entries are (edge class, kind); smooth boundary edges belong to
    the region, rough ones do not.  A region may have several boundary
    cycles (e.g. on an annulus); the checker only needs the marked edge set.
    """

    lattice: SurfaceLattice
    edges: frozenset[int]
    boundary: tuple[tuple[int, str], ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        seen = set()
        for c, kind in self.boundary:
            if kind not in ("smooth", "rough"):
                raise RegionError(f"boundary kind must be smooth|rough, got {kind!r}")
            if not (0 <= c < self.lattice.num_edge_classes):
                raise RegionError(f"boundary edge class {c} not in lattice")
            if c in seen:
                raise RegionError(f"boundary edge class {c} listed twice")
            seen.add(c)
            if kind == "smooth" and c not in self.edges:
                raise RegionError(f"smooth boundary edge {c} must lie in the region")
            if kind == "rough" and c in self.edges:
                raise RegionError(f"rough boundary edge {c} must lie outside the region")
        for c in self.edges:
            if not (0 <= c < self.lattice.num_edge_classes):
                raise RegionError(f"region edge class {c} not in lattice")

    @property
    def boundary_classes(self) -> frozenset[int]:
        return frozenset(c for c, _ in self.boundary)

    def kind_of(self, c: int) -> str:
        for cc, kind in self.boundary:
            if cc == c:
                return kind
        raise RegionError(f"edge class {c} is not on the declared boundary")

    @property
    def has_rough_boundary(self) -> bool:
        return any(kind == "rough" for _, kind in self.boundary)

    def vertex_classes(self) -> frozenset[int]:
        """Vertex classes incident to the region's edges."""
        return self.lattice.vertex_classes_of_edge_set(self.edges)


@dataclass(frozen=True)
class SurroundResult:
    relation: str                 # completely_surrounded | surrounded | neither
    interval: frozenset[int]      # I = boundary(Lambda) ∩ boundary(Delta)
    kind: str | None              # smooth | rough | None when I is empty


def surrounded(lam: Region, delta: Region) -> SurroundResult:
    """Classify the pair per the smooth and rough surrounding clauses."""
    if lam.lattice is not delta.lattice:
        raise RegionError("regions must live on the same lattice")
    L = lam.lattice
    I = lam.boundary_classes & delta.boundary_classes
    kinds = {lam.kind_of(c) for c in I} | {delta.kind_of(c) for c in I}
    if len(kinds) > 1:
        raise MixedInterval(f"interval {sorted(I)} mixes smooth and rough edges")
    kind = kinds.pop() if kinds else None
    if I and I == delta.boundary_classes:
        raise IEqualsWholeBoundary("interval equals the whole outer boundary")

    if not lam.edges <= delta.edges:
        return SurroundResult("neither", I, kind)

    lam_vcs = lam.vertex_classes()
    if not I:
        ok = all(L.closed_star_classes(vc) <= delta.edges for vc in lam_vcs)
        return SurroundResult("completely_surrounded" if ok else "neither", I, None)

    if kind == "smooth":
        i_vcs = L.vertex_classes_of_edge_set(I)
        ok = all(L.closed_star_classes(vc) <= delta.edges
                 for vc in lam_vcs - i_vcs)
    else:
        ok = all(L.closed_star_classes(vc) <= delta.edges
                 for vc in lam_vcs
                 if not (L.closed_star_classes(vc) & I))
    return SurroundResult("surrounded" if ok else "neither", I, kind)


def interval_internal_vertices(L: SurfaceLattice, interval: Iterable[int]) -> tuple[int, ...]:
    """Vertex classes incident to two (or more) edges of the interval."""
    cs = set(interval)
    out = []
    for vc in range(L.num_vertex_classes):
        slots = sum(1 for e, _ in L.star(vc) if L.eclass(e) in cs)
        if slots >= 2:
            out.append(vc)
    return tuple(out)


def eligible_partial_vertices(L: SurfaceLattice, region: Region,
                              interval: frozenset[int], kind: str) -> tuple[int, ...]:
    """Vertex classes carrying a partial vertex operator for the interval.

    Smooth: incident to two interval edges.  Rough: the closed star meets the
    interval and the vertex is either incident to two interval edges or lies
    in the interior of the region (its whole star inside).
    """
    two_incident = set(interval_internal_vertices(L, interval))
    if kind == "smooth":
        return tuple(sorted(two_incident))
    out = []
    for vc in range(L.num_vertex_classes):
        if not (L.closed_star_classes(vc) & interval):
            continue
        interior = L.star_classes(vc) <= region.edges
        if vc in two_incident or interior:
            out.append(vc)
    return tuple(sorted(out))


def sufficiently_large(region: Region, interval: frozenset[int]) -> bool:
    """True iff every face at a partial-vertex-eligible vertex that misses the
    interval lies inside the region."""
    L = region.lattice
    for vc in eligible_partial_vertices(L, region, interval, "rough"):
        for f in L.corner_faces(vc):
            fcl = L.face_classes(f)
            if not (fcl & interval) and not (fcl <= region.edges):
                return False
    return True


# ---------------------------------------------------------------------------
# builtin families

def builtin_lattice(name: str, params: Sequence[int] = ()) -> SurfaceLattice:
    if name == "torus_minimal":
        return genus_polygon(1)
    if name == "genus_polygon":
        return genus_polygon(params[0] if params else 2)
    if name == "square_patch":
        w = params[0] if params else 3
        h = params[1] if len(params) > 1 else w
        return square_patch(w, h)
    if name == "refined_torus":
        return refined_torus(params[0] if params else 2)
    if name == "ring_annulus":
        gaps = params[0] if params else 3
        size = params[1] if len(params) > 1 else 2
        return ring_annulus(gaps, size)
    raise UnknownLatticeFamily(
        f"unknown lattice family {name!r} (known: torus_minimal, genus_polygon, "
        "square_patch, refined_torus, ring_annulus)")


def genus_polygon(n: int) -> SurfaceLattice:
    """The one-vertex 4n-gon complex for a closed genus-n surface.

    Boundary edge classes 0..2n-1 each appear twice; fan chords from the
    largest-labeled corner get classes 2n..6n-4.  For n = 1 this is the
    minimal torus complex with edge classes (a, b, diagonal).
    """
    if n < 1:
        raise LatticeError("genus must be >= 1")
    m = 4 * n
    seq_labels = [m, m - 1] + list(range(m - 3, 0, -2)) + list(range(2, m - 1, 2))
    vertices = [(lab, 0) for lab in sorted(seq_labels)]
    idx = {lab: i for i, (lab, _) in enumerate(vertices)}
    seq = [idx[lab] for lab in seq_labels]

    edges: list[tuple[int, int, int]] = []
    ekey: dict[tuple[int, int, int], int] = {}

    def add_edge(a: int, b: int, c: int) -> None:
        u, v = (a, b) if vertices[a][0] < vertices[b][0] else (b, a)
        ekey[(u, v, c)] = len(edges)
        edges.append((u, v, c))

    for i in range(m):
        add_edge(seq[i], seq[(i + 1) % m], i % (2 * n))
    for i in range(2, m - 1):
        add_edge(seq[0], seq[i], 2 * n + (i - 2))

    def step(a: int, b: int, c: int) -> Step:
        if vertices[a][0] < vertices[b][0]:
            return (ekey[(a, b, c)], +1)
        return (ekey[(b, a, c)], -1)

    faces = []
    for i in range(1, m - 1):
        a, b, c = seq[0], seq[i], seq[i + 1]
        cls_ab = 0 if i == 1 else 2 * n + (i - 2)
        cls_bc = i % (2 * n)
        cls_ca = (m - 1) % (2 * n) if i + 1 == m - 1 else 2 * n + (i - 1)
        faces.append((step(a, b, cls_ab), step(b, c, cls_bc), step(c, a, cls_ca)))
    return validate_lattice(vertices, edges, faces, mode="closed")


def _mk_steps(vertices, edges, ekey, cycle_pairs) -> tuple[Step, ...]:
    steps = []
    for a, b in cycle_pairs:
        if (a, b) in ekey:
            steps.append((ekey[(a, b)], +1))
        elif (b, a) in ekey:
            steps.append((ekey[(b, a)], -1))
        else:
            raise LatticeError(f"no edge between drawn vertices {a} and {b}")
    return tuple(steps)


def square_patch(w: int, h: int) -> SurfaceLattice:
    """Open w x h grid of square faces; all classes are singletons."""
    if w < 1 or h < 1:
        raise LatticeError("patch dimensions must be >= 1")
    cols = w + 1
    vid = lambda i, j: i * cols + j
    vertices = [(vid(i, j) + 1, vid(i, j)) for i in range(h + 1) for j in range(cols)]
    edges = []
    ekey = {}
    for i in range(h + 1):
        for j in range(w):
            ekey[(vid(i, j), vid(i, j + 1))] = len(edges)
            edges.append((vid(i, j), vid(i, j + 1), len(edges)))
    for i in range(h):
        for j in range(cols):
            ekey[(vid(i, j), vid(i + 1, j))] = len(edges)
            edges.append((vid(i, j), vid(i + 1, j), len(edges)))
    faces = []
    for i in range(h):
        for j in range(w):
            bl, br = vid(i, j), vid(i, j + 1)
            tr, tl = vid(i + 1, j + 1), vid(i + 1, j)
            faces.append(_mk_steps(vertices, edges, ekey,
                                   [(bl, br), (br, tr), (tr, tl), (tl, bl)]))
    return validate_lattice(vertices, edges, faces, mode="patch")


def refined_torus(k: int) -> SurfaceLattice:
    """k x k right-triangulated torus grid drawn as a (k+1) x (k+1) array.

    Labels are vertex-class-major so every identified edge copy is oriented
    consistently; k = 1 falls back to the minimal torus complex.
    """
    if k < 1:
        raise LatticeError("refinement must be >= 1")
    if k == 1:
        return genus_polygon(1)
    n = k + 1

    def vc(i, j):
        return (i % k) * k + (j % k)

    def vid(i, j):
        return i * n + j

    vertices = [(vc(i, j) * (n * n) + vid(i, j) + 1, vc(i, j))
                for i in range(n) for j in range(n)]

    def hcls(i, j):
        return (i % k) * k + (j % k)

    def vcls(i, j):
        return k * k + (i % k) * k + (j % k)

    def dcls(i, j):
        return 2 * k * k + (i % k) * k + (j % k)

    edges = []
    ekey = {}

    def add(a, b, c):
        u, v = (a, b) if vertices[a][0] < vertices[b][0] else (b, a)
        if (u, v, c) not in ekey:
            ekey[(u, v, c)] = len(edges)
            edges.append((u, v, c))

    for i in range(n):
        for j in range(k):
            add(vid(i, j), vid(i, j + 1), hcls(i, j))
    for i in range(k):
        for j in range(n):
            add(vid(i, j), vid(i + 1, j), vcls(i, j))
    for i in range(k):
        for j in range(k):
            add(vid(i, j), vid(i + 1, j + 1), dcls(i, j))

    def step(a, b, c):
        u, v = (a, b) if vertices[a][0] < vertices[b][0] else (b, a)
        return (ekey[(u, v, c)], +1 if (u, v) == (a, b) else -1)

    faces = []
    for i in range(k):
        for j in range(k):
            bl, br = vid(i, j), vid(i, j + 1)
            tr, tl = vid(i + 1, j + 1), vid(i + 1, j)
            faces.append((step(bl, br, hcls(i, j)),
                          step(br, tr, vcls(i, j + 1)),
                          step(tr, bl, dcls(i, j))))
            faces.append((step(bl, tr, dcls(i, j)),
                          step(tr, tl, hcls(i + 1, j)),
                          step(tl, bl, vcls(i, j))))
    return validate_lattice(vertices, edges, faces, mode="closed")


def ring_annulus(gaps: int, size: int = 2) -> SurfaceLattice:
    """Concentric rings R_0..R_gaps of `size` vertices joined by spokes; the
    faces are the quads between consecutive rings.  size = 2 uses parallel
    digon rings, which keeps every desk-scale region tiny.
    """
    if gaps < 1 or size < 2:
        raise LatticeError("need gaps >= 1 and ring size >= 2")
    rings = gaps + 1
    vid = lambda i, j: i * size + j
    vertices = [(vid(i, j) + 1, vid(i, j)) for i in range(rings) for j in range(size)]
    edges: list[tuple[int, int, int]] = []
    ring_edge: dict[tuple[int, int], int] = {}
    spoke: dict[tuple[int, int], int] = {}
    for i in range(rings):
        for j in range(size):
            a, b = vid(i, j), vid(i, (j + 1) % size)
            u, v = (a, b) if a < b else (b, a)
            ring_edge[(i, j)] = len(edges)
            edges.append((u, v, len(edges)))
    for i in range(gaps):
        for j in range(size):
            spoke[(i, j)] = len(edges)
            edges.append((vid(i, j), vid(i + 1, j), len(edges)))

    def rstep(i, j, forward):
        e = ring_edge[(i, j)]
        a, b = vid(i, j), vid(i, (j + 1) % size)
        natural = +1 if a < b else -1
        return (e, natural if forward else -natural)

    def sstep(i, j, forward):
        return (spoke[(i, j)], +1 if forward else -1)

    faces = []
    for i in range(gaps):
        for j in range(size):
            faces.append((rstep(i, j, True),
                          sstep(i, (j + 1) % size, True),
                          rstep(i + 1, j, False),
                          sstep(i, j, False)))
    return validate_lattice(vertices, edges, faces, mode="patch")


def ring_edge_class(lat_size: int, ring: int, pos: int) -> int:
    """Edge class of the pos-th edge on a ring of a ring_annulus lattice."""
    return ring * lat_size + pos


def spoke_edge_class(lat_size: int, rings: int, gap: int, pos: int) -> int:
    return rings * lat_size + gap * lat_size + pos


# ---------------------------------------------------------------------------
# JSON interchange

def lattice_to_json(lat: SurfaceLattice) -> dict:
    return {
        "vertices": [{"label": lab, "class": vc} for lab, vc in lat.vertices],
        "edges": [{"u": lat.label(u), "v": lat.label(v), "class": c}
                  for u, v, c in lat.edges],
        "faces": [[(e + 1) * d for e, d in cycle] for cycle in lat.faces],
        "mode": lat.mode,
    }


def lattice_from_json(data: dict) -> SurfaceLattice:
    vertices = [(v["label"], v["class"]) for v in data["vertices"]]
    label_to_idx = {lab: i for i, (lab, _) in enumerate(vertices)}
    edges = []
    for e in data["edges"]:
        u, v = label_to_idx[e["u"]], label_to_idx[e["v"]]
        edges.append((u, v, e["class"]))
    faces = []
    for cyc in data["faces"]:
        steps = []
        for ref in cyc:
            if ref == 0:
                raise LatticeError("face edge refs are 1-based and signed")
            steps.append((abs(ref) - 1, 1 if ref > 0 else -1))
        faces.append(tuple(steps))
    return validate_lattice(vertices, edges, faces, mode=data.get("mode", "closed"))


def load_lattice(path: str | Path) -> SurfaceLattice:
    return lattice_from_json(json.loads(Path(path).read_text()))


def region_to_json(region: Region) -> dict:
    return {"edges": sorted(region.edges),
            "boundary": [{"edge": c, "kind": k} for c, k in region.boundary],
            "name": region.name}


def region_from_json(lat: SurfaceLattice, data: dict) -> Region:
    return Region(lattice=lat,
                  edges=frozenset(data["edges"]),
                  boundary=tuple((b["edge"], b["kind"]) for b in data.get("boundary", [])),
                  name=data.get("name", ""))


def load_region(lat: SurfaceLattice, path: str | Path) -> Region:
    return region_from_json(lat, json.loads(Path(path).read_text()))
