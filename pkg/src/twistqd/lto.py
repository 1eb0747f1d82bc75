"""Numerical certification of the local topological order axioms.

Region projectors are represented through an orthonormal basis Q of their
range (regular orbit sums of region-flat colorings), so every sandwich
p x p compresses to the small matrix Q* x Q.  Boundary-algebra generators
commute with the projector, hence compress multiplicatively, and all span
comparisons happen in r x r matrices with an SVD rank threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Iterable, Sequence

import numpy as np

from .groundstate import GroundStateError
from .lattice import (Region, SurfaceLattice, eligible_partial_vertices,
                      interval_internal_vertices, sufficiently_large, surrounded)
from .operators import Coloring, OperatorError, TwistedModel
from .phases import Phase

SPAN_RTOL = 1e-8          # relative singular-value threshold for rank tests
DEFAULT_TOL = 1e-9
DEFAULT_CAP = 1 << 14
SAMPLE_LIMIT = 10 ** 5


class LTOError(ValueError):
    pass


class PreconditionNotSurrounded(LTOError):
    pass


class NotSufficientlyLarge(LTOError):
    pass


class RegionTooLargeToMaterialize(LTOError):
    pass


class FaceFullyInside(LTOError):
    pass


class FaceDisjoint(LTOError):
    pass


class SplitBoundaryRun(LTOError):
    pass


class IneligibleVertex(LTOError):
    pass


# ---------------------------------------------------------------------------
# single-edge operators on C[G]

def left_translation(G, g: int) -> np.ndarray:
    M = np.zeros((G.order, G.order))
    for k in G.elements():
        M[G.mul(g, k), k] = 1.0
    return M


def right_translation(G, g: int) -> np.ndarray:
    M = np.zeros((G.order, G.order))
    for k in G.elements():
        M[G.mul(k, g), k] = 1.0
    return M


def state_projection(G, h: int) -> np.ndarray:
    M = np.zeros((G.order, G.order))
    M[h, h] = 1.0
    return M


def edge_ops(G, g: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(L_g, R_g, P_g) on one edge factor."""
    return left_translation(G, g), right_translation(G, g), state_projection(G, g)


# ---------------------------------------------------------------------------
# region Hilbert spaces and monomial operators on them

@dataclass(frozen=True)
class RegionSpace:
    """Tensor factor ordering and dense indexing for a set of edge classes."""

    model: TwistedModel
    edges: tuple[int, ...]              # sorted edge classes

    @property
    def dim(self) -> int:
        return self.model.group.order ** len(self.edges)

    def digits(self) -> np.ndarray:
        """(dim, len(edges)) matrix of colorings in index order."""
        n = self.model.group.order
        E = len(self.edges)
        idx = np.arange(self.dim, dtype=np.int64)
        out = np.empty((self.dim, E), dtype=np.int64)
        for k in range(E - 1, -1, -1):
            out[:, k] = idx % n
            idx //= n
        return out

    def index(self, col: Sequence[int]) -> int:
        n = self.model.group.order
        out = 0
        for c in col:
            out = out * n + c
        return out

    def coloring(self, i: int) -> tuple[int, ...]:
        n = self.model.group.order
        out = []
        for _ in self.edges:
            out.append(i % n)
            i //= n
        return tuple(reversed(out))


def region_space(model: TwistedModel, edges: Iterable[int],
                 cap: int = DEFAULT_CAP) -> RegionSpace:
    edges = tuple(sorted(edges))
    space = RegionSpace(model=model, edges=edges)
    if space.dim > cap:
        raise RegionTooLargeToMaterialize(
            f"|G|^{len(edges)} = {space.dim} exceeds the cap {cap}")
    return space


@dataclass
class MonomialMatrix:
    """perm/coeff form of a monomial (or partial-monomial) operator: the
    action |j> -> coeff[j] |perm[j]>."""

    space: RegionSpace
    perm: np.ndarray
    coeff: np.ndarray

    def apply(self, M: np.ndarray) -> np.ndarray:
        out = np.zeros_like(M)
        out[self.perm] = self.coeff[:, None] * M
        return out

    def compose(self, other: "MonomialMatrix") -> "MonomialMatrix":
        """self after other."""
        return MonomialMatrix(space=self.space,
                              perm=self.perm[other.perm],
                              coeff=other.coeff * self.coeff[other.perm])

    def adjoint(self) -> "MonomialMatrix":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(len(self.perm))
        return MonomialMatrix(space=self.space, perm=inv,
                              coeff=self.coeff[inv].conj())

    def dense(self) -> np.ndarray:
        M = np.zeros((len(self.perm), len(self.perm)), dtype=complex)
        M[self.perm, np.arange(len(self.perm))] = self.coeff
        return M


def identity_op(space: RegionSpace) -> MonomialMatrix:
    return MonomialMatrix(space=space, perm=np.arange(space.dim),
                          coeff=np.ones(space.dim, dtype=complex))


def left_mult_op(space: RegionSpace, c1: dict[int, int]) -> MonomialMatrix:
    """L_{c1}: left multiplication on the listed edge classes."""
    G = space.model.group
    n = G.order
    digits = space.digits()
    new = digits.copy()
    for k, cls in enumerate(space.edges):
        if cls in c1:
            new[:, k] = G.table[c1[cls], digits[:, k]]
    perm = np.zeros(space.dim, dtype=np.int64)
    for k in range(len(space.edges)):
        perm *= n
        perm += new[:, k]
    return MonomialMatrix(space=space, perm=perm,
                          coeff=np.ones(space.dim, dtype=complex))


def projector_op(space: RegionSpace, c2: dict[int, int]) -> MonomialMatrix:
    """P_{c2}: projection onto the given colors on the listed classes."""
    digits = space.digits()
    keep = np.ones(space.dim, dtype=bool)
    for k, cls in enumerate(space.edges):
        if cls in c2:
            keep &= digits[:, k] == c2[cls]
    return MonomialMatrix(space=space, perm=np.arange(space.dim),
                          coeff=keep.astype(complex))


def coloring_monomial(space: RegionSpace, c1: dict[int, int],
                      c2: dict[int, int]) -> MonomialMatrix:
    return left_mult_op(space, c1).compose(projector_op(space, c2))


def vertex_monomial_op(space: RegionSpace, vclass: int, g: int) -> MonomialMatrix:
    """A_v^g on the region space; every touched class must lie in the region."""
    model = space.model
    L = model.lattice
    need = L.closed_star_classes(vclass)
    if not need <= set(space.edges):
        raise LTOError(f"closed star of vertex class {vclass} not inside the region")
    return _monomial_from_scalar(space, lambda col: model.vertex_op(vclass, g, col))


def _monomial_from_scalar(space: RegionSpace, act) -> MonomialMatrix:
    """Build perm/coeff by applying a full-lattice coloring map to every basis
    coloring, padding classes outside the region with the identity element."""
    model = space.model
    L, G = model.lattice, model.group
    pos = {cls: k for k, cls in enumerate(space.edges)}
    perm = np.empty(space.dim, dtype=np.int64)
    coeff = np.empty(space.dim, dtype=complex)
    full = [G.identity] * L.num_edge_classes
    for i in range(space.dim):
        rcol = space.coloring(i)
        for cls, k in pos.items():
            full[cls] = rcol[k]
        res = act(tuple(full))
        if res is None:
            raise OperatorError("operator left the coloring space")
        out, ph = res
        perm[i] = space.index([out[cls] for cls in space.edges])
        coeff[i] = ph.to_complex()
        for cls in pos:
            full[cls] = G.identity
    return MonomialMatrix(space=space, perm=perm, coeff=coeff)


def face_projector_op(space: RegionSpace, f: int) -> MonomialMatrix:
    model = space.model
    if not model.lattice.face_classes(f) <= set(space.edges):
        raise LTOError(f"face {f} not inside the region")
    pos = {cls: k for k, cls in enumerate(space.edges)}
    G = model.group
    digits = space.digits()
    acc = np.full(space.dim, G.identity, dtype=np.int64)
    for e, d in model.lattice.faces[f]:
        col = digits[:, pos[model.lattice.eclass(e)]]
        acc = G.table[acc, col if d > 0 else G.inverses[col]]
    return MonomialMatrix(space=space, perm=np.arange(space.dim),
                          coeff=(acc == G.identity).astype(complex))


# ---------------------------------------------------------------------------
# partial vertex / face operators

def partial_vertex_op(model: TwistedModel, region: Region, vclass: int, g: int,
                      col: Coloring) -> tuple[Coloring, Phase]:
    """C_v^g on a full-lattice coloring: multiplies only the star slots whose
    class lies in the region; the phase runs over triangles of faces fully
    inside the region."""
    L, G = model.lattice, model.group
    T = model.tri
    inside_faces = {f for f in range(len(L.faces))
                    if L.face_classes(f) <= region.edges}
    drawn = model.drawn_colors(col)
    num = 0
    D = model.alpha.den
    for corner in model.plan(vclass).corners:
        ginv = G.inv(g)
        for tp, ti in zip(corner.zetas, T.triangles_at_vertex(corner.vertex)):
            if T.triangle_face[ti] not in inside_faces:
                continue
            vals = []
            for arg in tp.args:
                if arg[0] == "edge":
                    vals.append(drawn[arg[1]])
                elif arg[0] == "g":
                    vals.append(g)
                else:
                    vals.append(G.mul(drawn[arg[1]], ginv))
            num += tp.eps * model.alpha.raw(vals[0], vals[1], vals[2])
        for e, at_tail in corner.slots:
            cls = T.ext_class(e)
            nb = len(L.edges)
            if e < nb:
                if cls not in region.edges:
                    continue
            else:
                if T.ghosts[e - nb][2] not in inside_faces:
                    continue
            drawn[e] = G.mul(g, drawn[e]) if at_tail else G.mul(drawn[e], ginv)
    new = list(col)
    nb = len(L.edges)
    seen: dict[int, int] = {}
    for e in range(nb):
        cls = L.eclass(e)
        if cls in region.edges:
            if cls in seen and seen[cls] != drawn[e]:
                raise OperatorError("identified copies disagree under C_v^g")
            seen[cls] = drawn[e]
            new[cls] = drawn[e]
    return tuple(new), Phase(num % D, D)


def partial_vertex_monomial(space: RegionSpace, region: Region, vclass: int,
                            g: int, interval: frozenset[int], kind: str) -> MonomialMatrix:
    model = space.model
    eligible = eligible_partial_vertices(model.lattice, region, interval, kind)
    if vclass not in eligible:
        raise IneligibleVertex(
            f"vertex class {vclass} carries no partial vertex operator here")
    return _monomial_from_scalar(
        space, lambda col: partial_vertex_op(model, region, vclass, g, col))


def face_boundary_run(L: SurfaceLattice, region: Region, f: int) -> list[tuple[int, int]]:
    """The face's CCW steps with classes inside the region, rotated so the
    run starts right after the (single) missing stretch."""
    steps = [(L.eclass(e), d) for e, d in L.faces[f]]
    inside = [cls in region.edges for cls, _ in steps]
    if all(inside):
        raise FaceFullyInside(f"face {f} lies inside the region; use B_f")
    if not any(inside):
        raise FaceDisjoint(f"face {f} does not meet the region")
    k = len(steps)
    # single contiguous run check, cyclically
    transitions = sum(1 for i in range(k) if inside[i] != inside[(i + 1) % k])
    if transitions != 2:
        raise SplitBoundaryRun(f"face {f} meets the region in several runs")
    start = next(i for i in range(k)
                 if inside[i] and not inside[(i - 1) % k])
    return [steps[(start + i) % k] for i in range(k) if inside[(start + i) % k]]


def partial_face_op(space: RegionSpace, region: Region, f: int, g: int) -> MonomialMatrix:
    """D_f^g: diagonal projector onto colorings whose partial boundary product
    completes g to the identity (g g'_1 ... g'_n = e along the CCW run)."""
    model = space.model
    G = model.group
    run = face_boundary_run(model.lattice, region, f)
    pos = {cls: k for k, cls in enumerate(space.edges)}
    digits = space.digits()
    acc = np.full(space.dim, g, dtype=np.int64)
    for cls, d in run:
        col = digits[:, pos[cls]]
        acc = G.table[acc, col if d > 0 else G.inverses[col]]
    return MonomialMatrix(space=space, perm=np.arange(space.dim),
                          coeff=(acc == G.identity).astype(complex))


# ---------------------------------------------------------------------------
# region projectors via regular orbits

@dataclass
class RegionProjector:
    model: TwistedModel
    region: Region
    space: RegionSpace
    faces_in: tuple[int, ...]
    verts_in: tuple[int, ...]
    Q: np.ndarray | None                       # (dim, rank) when dense
    sparse_columns: list[dict[int, complex]] | None = None

    @property
    def rank(self) -> int:
        if self.Q is not None:
            return self.Q.shape[1]
        return len(self.sparse_columns or [])

    def compress(self, op: MonomialMatrix) -> np.ndarray:
        if self.Q is None:
            raise RegionTooLargeToMaterialize("projector is in sparse mode")
        return self.Q.conj().T @ op.apply(self.Q)

    def commutes_with(self, op: MonomialMatrix, tol: float = DEFAULT_TOL) -> bool:
        """[op, p] = 0, tested as op Q = Q (Q* op Q) and the adjoint."""
        for O in (op, op.adjoint()):
            OQ = O.apply(self.Q)
            if np.abs(OQ - self.Q @ (self.Q.conj().T @ OQ)).max() > tol:
                return False
        return True

    def dense(self) -> np.ndarray:
        return self.Q @ self.Q.conj().T


def _region_flats(model: TwistedModel, edges: tuple[int, ...],
                  faces: Sequence[int]) -> list[tuple[int, ...]]:
    """Backtracking over the region's classes, pruning on contained faces."""
    G, L = model.group, model.lattice
    pos = {cls: k for k, cls in enumerate(edges)}
    face_steps = [[(pos[L.eclass(e)], d) for e, d in L.faces[f]] for f in faces]
    col = [-1] * len(edges)
    out: list[tuple[int, ...]] = []

    def holo(fi):
        acc = G.identity
        for k, d in face_steps[fi]:
            acc = G.mul(acc, col[k] if d > 0 else G.inv(col[k]))
        return acc

    def dfs(k: int) -> None:
        if k == len(edges):
            out.append(tuple(col))
            return
        for v in G.elements():
            col[k] = v
            ok = True
            for fi, steps in enumerate(face_steps):
                if any(p == k for p, _ in steps) and all(col[p] >= 0 for p, _ in steps):
                    if holo(fi) != G.identity:
                        ok = False
                        break
            if ok:
                dfs(k + 1)
            col[k] = -1

    dfs(0)
    return out


def region_projector(model: TwistedModel, region: Region,
                     cap: int = DEFAULT_CAP, sparse: bool = False) -> RegionProjector:
    """p_Lambda as an orthonormal range basis.

    Vertex projectors enter for stars inside the region (smooth boundaries)
    or closed stars inside (any rough boundary edge present, per the rough
    redefinition); face projectors for faces fully inside.  The range is
    spanned by the regular orbits of region-flat colorings under the included
    vertex moves, summed with their exact BFS phases.  In sparse mode the
    columns stay as index->amplitude maps and no dense cap applies.
    """
    L, G = model.lattice, model.group
    if sparse:
        space = RegionSpace(model=model, edges=tuple(sorted(region.edges)))
    else:
        space = region_space(model, region.edges, cap)
    faces_in = L.faces_inside(region.edges)
    verts_in = []
    for vc in range(L.num_vertex_classes):
        star = L.star_classes(vc)
        closed = L.closed_star_classes(vc)
        if region.has_rough_boundary:
            if closed <= region.edges:
                verts_in.append(vc)
        else:
            if star <= region.edges:
                if not closed <= region.edges:
                    raise LTOError(
                        f"smooth region is not convex at vertex class {vc}: "
                        "star inside but closed star outside")
                verts_in.append(vc)

    pos = {cls: k for k, cls in enumerate(space.edges)}
    flats = _region_flats(model, space.edges, faces_in)
    gens = G.generating_set()
    full = [G.identity] * L.num_edge_classes

    def pad(rcol):
        for cls, k in pos.items():
            full[cls] = rcol[k]
        return tuple(full)

    def unpad(col):
        return tuple(col[cls] for cls in space.edges)

    columns = []
    seen: set[tuple[int, ...]] = set()
    for rcol in flats:
        if rcol in seen:
            continue
        phases: dict[tuple[int, ...], Phase] = {rcol: Phase.one()}
        regular = True
        queue = [rcol]
        while queue:
            cur = queue.pop()
            ph_cur = phases[cur]
            for vc in verts_in:
                for g in gens:
                    res = model.vertex_op(vc, g, pad(cur))
                    if res is None:
                        raise OperatorError("vertex operator left the space")
                    nxt, ph = res
                    nxt = unpad(nxt)
                    ph_next = ph_cur * ph
                    if nxt not in phases:
                        phases[nxt] = ph_next
                        queue.append(nxt)
                    elif phases[nxt] != ph_next:
                        regular = False
        seen.update(phases)
        if regular:
            norm = 1.0 / np.sqrt(len(phases))
            columns.append({space.index(c): p.to_complex() * norm
                            for c, p in phases.items()})
    if sparse:
        return RegionProjector(model=model, region=region, space=space,
                               faces_in=faces_in, verts_in=tuple(verts_in),
                               Q=None, sparse_columns=columns)
    Q = np.zeros((space.dim, len(columns)), dtype=complex)
    for k, coldict in enumerate(columns):
        for i, a in coldict.items():
            Q[i, k] = a
    return RegionProjector(model=model, region=region, space=space,
                           faces_in=faces_in, verts_in=tuple(verts_in), Q=Q)


# ---------------------------------------------------------------------------
# span bookkeeping: incremental orthonormal bases of operator spans

class SpanBasis:
    """Orthonormal basis of a span of matrices (as raveled vectors)."""

    def __init__(self, rtol: float = SPAN_RTOL):
        self.rtol = rtol
        self.vecs: list[np.ndarray] = []

    @property
    def rank(self) -> int:
        return len(self.vecs)

    def residual(self, M: np.ndarray) -> float:
        """Relative distance of M to the current span."""
        v = M.ravel().astype(complex)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            return 0.0
        for b in self.vecs:
            v = v - b * (b.conj() @ v)
        return float(np.linalg.norm(v) / nrm)

    def add(self, M: np.ndarray) -> bool:
        v = M.ravel().astype(complex)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            return False
        for b in self.vecs:
            v = v - b * (b.conj() @ v)
        # second orthogonalization pass stabilizes near-dependent vectors
        for b in self.vecs:
            v = v - b * (b.conj() @ v)
        res = np.linalg.norm(v)
        if res > self.rtol * nrm:
            self.vecs.append(v / res)
            return True
        return False

    def union_rank(self, other: "SpanBasis") -> int:
        merged = SpanBasis(self.rtol)
        for b in self.vecs + other.vecs:
            merged.add(b.reshape(1, -1))
        return merged.rank

    def max_residual(self, mats: Iterable[np.ndarray]) -> float:
        return max((self.residual(M) for M in mats), default=0.0)


def algebra_closure(seed: list[tuple[MonomialMatrix, np.ndarray]],
                    rtol: float = SPAN_RTOL,
                    max_rounds: int = 8) -> list[tuple[MonomialMatrix, np.ndarray]]:
    """Close a set of (operator form, compressed matrix) pairs under products,
    keeping only elements that enlarge the compressed span."""
    basis: list[tuple[MonomialMatrix, np.ndarray]] = []
    span = SpanBasis(rtol)
    for form, mat in seed:
        if span.add(mat):
            basis.append((form, mat))
    for _ in range(max_rounds):
        grew = False
        snapshot = list(basis)
        for f1, m1 in snapshot:
            for f2, m2 in snapshot:
                prod = m1 @ m2
                if span.add(prod):
                    basis.append((f1.compose(f2), prod))
                    grew = True
        if not grew:
            break
    return basis


# ---------------------------------------------------------------------------
# spanning sets

def _flat_compatible_left_parts(space: RegionSpace, lam: list[int]) -> list[dict] | None:
    """For abelian groups: the left multiplications that preserve every
    in-region face constraint (all other L_{c1} sandwich to exactly zero,
    since they shift some face holonomy by a fixed nonzero amount)."""
    model = space.model
    G = model.group
    if not G.is_abelian:
        return None
    L = model.lattice
    faces = L.faces_inside(space.edges)
    out = []
    for c1 in iproduct(G.elements(), repeat=len(lam)):
        cdict = dict(zip(lam, c1))
        ok = True
        for f in faces:
            shift = G.identity
            for e, d in L.faces[f]:
                cls = L.eclass(e)
                if cls in cdict:
                    g = cdict[cls] if d > 0 else G.inv(cdict[cls])
                    shift = G.mul(shift, g)
            if shift != G.identity:
                ok = False
                break
        if ok:
            out.append(cdict)
    return out


def region_operator_basis(space: RegionSpace, lam_edges: Sequence[int],
                          limit: int = SAMPLE_LIMIT,
                          seed: int = 0) -> tuple[Iterable[tuple[dict, dict]], bool, int]:
    """(c1, c2) pairs spanning A(Lambda) up to exactly-zero sandwiches.

    For abelian groups the left parts are restricted to the face-compatible
    subgroup (the rest compress to zero exactly); exhaustive when the pruned
    count fits the limit, else a seeded sample.  Returns (pairs, exhaustive,
    count)."""
    G = space.model.group
    lam = sorted(lam_edges)
    lefts = _flat_compatible_left_parts(space, lam)
    n_right = G.order ** len(lam)
    if lefts is not None and len(lefts) * n_right <= limit:
        def gen():
            for c1 in lefts:
                for c2 in iproduct(G.elements(), repeat=len(lam)):
                    yield c1, dict(zip(lam, c2))
        return gen(), True, len(lefts) * n_right
    if lefts is None and n_right ** 2 <= limit:
        def gen_full():
            for c1 in iproduct(G.elements(), repeat=len(lam)):
                for c2 in iproduct(G.elements(), repeat=len(lam)):
                    yield dict(zip(lam, c1)), dict(zip(lam, c2))
        return gen_full(), True, n_right ** 2
    rng = np.random.default_rng(seed)

    def gen_sample():
        for _ in range(limit):
            if lefts is not None:
                c1 = dict(lefts[int(rng.integers(len(lefts)))])
            else:
                c1 = {l: int(rng.integers(G.order)) for l in lam}
            c2 = {l: int(rng.integers(G.order)) for l in lam}
            yield c1, c2
    return gen_sample(), False, limit


def boundary_generators(model: TwistedModel, region: Region,
                        interval: frozenset[int], kind: str,
                        space: RegionSpace) -> list[tuple[str, MonomialMatrix]]:
    """Generators of the boundary algebra on the given space: smooth interval
    -> {P_l^g, C_v^g}; rough interval -> {D_f^g, C_v^g}."""
    L, G = model.lattice, model.group
    out: list[tuple[str, MonomialMatrix]] = []
    if kind == "smooth":
        for l in sorted(interval):
            for g in G.elements():
                out.append((f"P_{l}^{g}", projector_op(space, {l: g})))
        for vc in interval_internal_vertices(L, interval):
            for g in G.elements():
                if g == G.identity:
                    continue
                out.append((f"C_{vc}^{g}",
                            partial_vertex_monomial(space, region, vc, g,
                                                    interval, "smooth")))
    else:
        faces = [f for f in range(len(L.faces))
                 if L.face_classes(f) & interval]
        for f in faces:
            for g in G.elements():
                out.append((f"D_{f}^{g}", partial_face_op(space, region, f, g)))
        for vc in eligible_partial_vertices(L, region, interval, "rough"):
            for g in G.elements():
                if g == G.identity:
                    continue
                out.append((f"C_{vc}^{g}",
                            partial_vertex_monomial(space, region, vc, g,
                                                    interval, "rough")))
    return out


# ---------------------------------------------------------------------------
# the four axiom checks

@dataclass
class LTOReport:
    axiom: str
    regions: dict[str, str]
    verdict: bool
    deviation: float
    tolerance: float
    seed: int
    exhaustive: bool
    details: dict = field(default_factory=dict)
    witnesses: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "regions": self.regions,
                "verdict": "pass" if self.verdict else "fail",
                "deviation": self.deviation, "tolerance": self.tolerance,
                "seed": self.seed, "exhaustive": self.exhaustive,
                "details": self.details, "witnesses": self.witnesses}


def _sandwich_span(proj: RegionProjector, lam_edges: Sequence[int],
                   seed: int, stall_limit: int = 600) -> tuple[SpanBasis, int, bool]:
    """Span of {p x p} over the operator basis of A(Lambda), collected into an
    orthonormal basis.  Stops early once the span saturates the full r x r
    matrix space (lossless) or after a long stall (reported as inexhaustive).
    """
    pairs, exhaustive, total = region_operator_basis(proj.space, lam_edges,
                                                     seed=seed)
    span = SpanBasis()
    full = proj.rank ** 2
    processed = 0
    stall = 0
    for c1, c2 in pairs:
        op = coloring_monomial(proj.space, c1, c2)
        grew = span.add(proj.compress(op))
        processed += 1
        stall = 0 if grew else stall + 1
        if span.rank >= full:
            break
        if stall >= stall_limit:
            exhaustive = exhaustive and processed >= total
            break
    return span, processed, exhaustive


def check_LTO1(model: TwistedModel, lam: Region, delta: Region,
               tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP,
               seed: int = 0) -> LTOReport:
    """p_Delta A(Lambda) p_Delta = C p_Delta for completely surrounded pairs."""
    rel = surrounded(lam, delta)
    if rel.relation != "completely_surrounded":
        raise PreconditionNotSurrounded(
            f"Lambda is {rel.relation}, needs completely_surrounded")
    proj = region_projector(model, delta, cap)
    r = proj.rank
    pairs, exhaustive, n_ops = region_operator_basis(proj.space,
                                                     sorted(lam.edges), seed=seed)
    dev = 0.0
    witnesses = []
    eye = np.eye(r)
    for k, (c1, c2) in enumerate(pairs):
        M = proj.compress(coloring_monomial(proj.space, c1, c2))
        c = M.trace() / r if r else 0.0
        d = np.abs(M - c * eye).max() if r else 0.0
        if d > dev:
            dev = d
            if d > tol:
                witnesses.append(f"operator #{k} deviates by {d:.2e}")
    # face-incompatible left parts were pruned as exactly zero; spot-check a few
    rng = np.random.default_rng(seed + 1)
    lam_sorted = sorted(lam.edges)
    G = model.group
    for _ in range(8):
        c1 = {l: int(rng.integers(G.order)) for l in lam_sorted}
        c2 = {l: int(rng.integers(G.order)) for l in lam_sorted}
        M = proj.compress(coloring_monomial(proj.space, c1, c2))
        c = M.trace() / r if r else 0.0
        dev = max(dev, float(np.abs(M - c * eye).max()) if r else 0.0)
    # scalar anchor: a flat pure projector compresses to 1/#flat(Lambda)
    flat_scalar = None
    flats = _region_flats(model, tuple(sorted(lam.edges)),
                          model.lattice.faces_inside(lam.edges))
    if r and flats:
        op = projector_op(proj.space, dict(zip(sorted(lam.edges), flats[0])))
        M = proj.compress(op)
        flat_scalar = abs(M.trace() / r - 1.0 / len(flats))
        dev = max(dev, flat_scalar)
    return LTOReport(axiom="LTO1",
                     regions={"lambda": lam.name, "delta": delta.name},
                     verdict=dev < tol, deviation=float(dev), tolerance=tol,
                     seed=seed, exhaustive=exhaustive,
                     details={"rank": r, "operators": n_ops,
                              "flat_scalar_dev": flat_scalar},
                     witnesses=witnesses)


def _boundary_algebra_span(model: TwistedModel, lam: Region, proj: RegionProjector,
                           interval: frozenset[int], kind: str,
                           tol: float) -> tuple[list, SpanBasis, list[str]]:
    """Closure of the boundary generators, compressed on proj; also verifies
    each generator commutes with the projector."""
    gens = boundary_generators(model, lam, interval, kind, proj.space)
    notes = []
    seed = [(identity_op(proj.space), np.eye(proj.rank, dtype=complex))]
    for name, op in gens:
        if not proj.commutes_with(op, tol):
            notes.append(f"generator {name} fails to commute with p_Delta")
        seed.append((op, proj.compress(op)))
    basis = algebra_closure(seed)
    span = SpanBasis()
    for _, m in basis:
        span.add(m)
    return basis, span, notes


def check_LTO2(model: TwistedModel, lam: Region, delta: Region,
               tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP,
               seed: int = 0) -> LTOReport:
    """p_Delta A(Lambda) p_Delta = D(I) p_Delta (or C(I) for rough I)."""
    rel = surrounded(lam, delta)
    if rel.relation != "surrounded":
        raise PreconditionNotSurrounded(
            f"Lambda is {rel.relation}, needs surrounded with interval")
    if rel.kind == "rough" and not sufficiently_large(lam, rel.interval):
        raise NotSufficientlyLarge(
            "Lambda is not sufficiently large for the rough interval")
    proj = region_projector(model, delta, cap)
    sand, processed, exhaustive = _sandwich_span(proj, sorted(lam.edges), seed)
    basis, alg, notes = _boundary_algebra_span(model, lam, proj,
                                               rel.interval, rel.kind, tol)
    r_sand, r_alg = sand.rank, alg.rank
    r_union = sand.union_rank(alg)
    dev = max(alg.max_residual(b.reshape(1, -1) for b in sand.vecs),
              sand.max_residual(b.reshape(1, -1) for b in alg.vecs))
    verdict = (r_sand == r_alg == r_union) and not notes and dev < tol
    return LTOReport(axiom="LTO2",
                     regions={"lambda": lam.name, "delta": delta.name},
                     verdict=verdict, deviation=float(dev), tolerance=tol,
                     seed=seed, exhaustive=exhaustive,
                     details={"interval": sorted(rel.interval),
                              "interval_kind": rel.kind,
                              "rank_sandwich": r_sand, "rank_algebra": r_alg,
                              "rank_union": r_union,
                              "projector_rank": proj.rank,
                              "operators_processed": processed},
                     witnesses=notes)


def check_LTO3(model: TwistedModel, lam1: Region, lam2: Region, delta: Region,
               tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP,
               seed: int = 0) -> LTOReport:
    """B(Lambda1 in Delta) = B(Lambda2 in Delta) for nested regions sharing
    the boundary interval."""
    if not lam1.edges <= lam2.edges:
        raise PreconditionNotSurrounded("Lambda1 must be contained in Lambda2")
    rel1 = surrounded(lam1, delta)
    rel2 = surrounded(lam2, delta)
    for name, rel, reg in (("Lambda1", rel1, lam1), ("Lambda2", rel2, lam2)):
        if rel.relation != "surrounded":
            raise PreconditionNotSurrounded(f"{name} is {rel.relation}")
        if rel.kind == "rough" and not sufficiently_large(reg, rel.interval):
            raise NotSufficientlyLarge(f"{name} is not sufficiently large")
    if rel1.interval != rel2.interval:
        raise PreconditionNotSurrounded(
            "regions meet the outer boundary along different intervals")
    proj = region_projector(model, delta, cap)
    span1, _, ex1 = _sandwich_span(proj, sorted(lam1.edges), seed)
    span2, _, ex2 = _sandwich_span(proj, sorted(lam2.edges), seed)
    _, alg, notes = _boundary_algebra_span(model, lam1, proj,
                                           rel1.interval, rel1.kind, tol)
    r1, r2 = span1.rank, span2.rank
    r12 = span1.union_rank(span2)
    dev = max(span2.max_residual(b.reshape(1, -1) for b in span1.vecs),
              span1.max_residual(b.reshape(1, -1) for b in span2.vecs),
              span1.max_residual(b.reshape(1, -1) for b in alg.vecs))
    verdict = (r1 == r2 == r12) and dev < tol and not notes
    return LTOReport(axiom="LTO3",
                     regions={"lambda1": lam1.name, "lambda2": lam2.name,
                              "delta": delta.name},
                     verdict=verdict, deviation=float(dev), tolerance=tol,
                     seed=seed, exhaustive=ex1 and ex2,
                     details={"rank_lambda1": r1, "rank_lambda2": r2,
                              "rank_union": r12,
                              "interval": sorted(rel1.interval)},
                     witnesses=notes)


def _split_index(space_big: RegionSpace, small_edges: tuple[int, ...],
                 idx: int) -> tuple[int, int]:
    """Split a big-space basis index into (small-factor index, rest index)."""
    n = space_big.model.group.order
    col = space_big.coloring(idx)
    small = set(small_edges)
    i_small = 0
    i_rest = 0
    by_class = dict(zip(space_big.edges, col))
    for cls in small_edges:
        i_small = i_small * n + by_class[cls]
    for cls in space_big.edges:
        if cls not in small:
            i_rest = i_rest * n + by_class[cls]
    return i_small, i_rest


def check_LTO4(model: TwistedModel, lam: Region, delta1: Region, delta2: Region,
               tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP,
               seed: int = 0) -> LTOReport:
    """Injectivity of x -> x p_{Delta2} on B(Lambda in Delta1).

    Every basis element is x_k = d_k p_{Delta1} with d_k commuting with the
    projectors, so x_k p_{Delta2} = (Q1 (x) I)(N_k (x) I) C with
    C = (Q1* (x) I) Q2; the map is injective iff the small matrices
    (N_k (x) I) C stay linearly independent.
    """
    if not delta1.edges <= delta2.edges:
        raise PreconditionNotSurrounded("Delta1 must be contained in Delta2")
    rel1 = surrounded(lam, delta1)
    rel2 = surrounded(lam, delta2)
    if rel1.relation != "surrounded" or rel2.relation != "surrounded":
        raise PreconditionNotSurrounded("Lambda must be surrounded by both Deltas")
    if rel1.interval != rel2.interval:
        raise PreconditionNotSurrounded("the shared interval must agree")
    if rel1.kind == "rough" and not sufficiently_large(lam, rel1.interval):
        raise NotSufficientlyLarge("Lambda is not sufficiently large")
    proj1 = region_projector(model, delta1, cap)
    sparse2 = model.group.order ** len(delta2.edges) > cap
    proj2 = region_projector(model, delta2, cap, sparse=sparse2)
    basis, _, notes = _boundary_algebra_span(model, lam, proj1,
                                             rel1.interval, rel1.kind, tol)
    r1, r2 = proj1.rank, proj2.rank
    dim_rest = model.group.order ** (len(delta2.edges) - len(delta1.edges))
    C = np.zeros((r1, dim_rest, r2), dtype=complex)
    Q1H = proj1.Q.conj().T
    columns = (proj2.sparse_columns if proj2.sparse_columns is not None
               else [{i: proj2.Q[i, k] for i in np.nonzero(proj2.Q[:, k])[0]}
                     for k in range(r2)])
    for k, coldict in enumerate(columns):
        for j, amp in coldict.items():
            i_small, i_rest = _split_index(proj2.space, proj1.space.edges, j)
            C[:, i_rest, k] += Q1H[:, i_small] * amp
    span = SpanBasis()
    rank = 0
    for form, N in basis:
        if span.add(np.einsum("ab,brc->arc", N, C)):
            rank += 1
    verdict = rank == len(basis) and not notes
    dev = 0.0 if verdict else 1.0
    return LTOReport(axiom="LTO4",
                     regions={"lambda": lam.name, "delta1": delta1.name,
                              "delta2": delta2.name},
                     verdict=verdict, deviation=dev, tolerance=tol,
                     seed=seed, exhaustive=True,
                     details={"basis_size": len(basis), "image_rank": rank,
                              "rank_delta1": r1, "rank_delta2": r2},
                     witnesses=notes)


# ---------------------------------------------------------------------------
# Knill-Laflamme

@dataclass
class KLReport:
    group_order: int
    weight: int
    pairs: int
    deviation: float
    tolerance: float
    verdict: bool
    witness: str | None = None


def check_knill_laflamme(model: TwistedModel, error_weight: int = 1,
                         tol: float = DEFAULT_TOL, cap: int = 10 ** 4,
                         stop_on_failure: bool = False) -> KLReport:
    """P E1* E2 P = c P for all products of up to `error_weight` single-edge
    L_g P_h factors, with P the materialized ground projector."""
    from .groundstate import materialize_ground_projector
    L, G = model.lattice, model.group
    E = L.num_edge_classes
    if G.order ** E > cap:
        raise LTOError(f"Hilbert dimension {G.order ** E} exceeds the cap {cap}")
    P = materialize_ground_projector(model, cap)
    rank = P.trace().real
    space = region_space(model, range(E), cap=G.order ** E)

    subsets = [list(c) for c in _subsets_upto(range(E), error_weight)]
    ops: list[MonomialMatrix] = []
    names: list[str] = []
    for sub in subsets:
        for c1 in iproduct(G.elements(), repeat=len(sub)):
            for c2 in iproduct(G.elements(), repeat=len(sub)):
                ops.append(coloring_monomial(space, dict(zip(sub, c1)),
                                             dict(zip(sub, c2))))
                names.append(f"L{c1}P{c2}@{sub}")
    eps = [op.apply(P) for op in ops]
    dev = 0.0
    witness = None
    pairs = 0
    for a in range(len(ops)):
        for b in range(len(ops)):
            pairs += 1
            M = eps[a].conj().T @ eps[b]
            c = M.trace() / rank
            d = np.abs(M - c * P).max()
            if d > dev:
                dev = d
                witness = f"{names[a]} , {names[b]}"
                if stop_on_failure and dev > tol:
                    return KLReport(group_order=G.order, weight=error_weight,
                                    pairs=pairs, deviation=float(dev),
                                    tolerance=tol, verdict=False,
                                    witness=witness)
    return KLReport(group_order=G.order, weight=error_weight, pairs=pairs,
                    deviation=float(dev), tolerance=tol,
                    verdict=dev < tol,
                    witness=None if dev < tol else witness)


def _subsets_upto(items, k):
    from itertools import combinations
    out = []
    for size in range(1, k + 1):
        out.extend(combinations(items, size))
    return out
