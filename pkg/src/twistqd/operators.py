"""Colorings, holonomy, face projectors, and the monomial vertex operators.

The vertex operator at a vertex class acts on the canonical triangulation:
the permutation part multiplies every star slot (left by g on away-pointing
edges, right by g^-1 on toward-pointing ones) and the phase part inserts a
virtual vertex v' ranked just below the acted corner, contributing
alpha([u1 u2], [u2 u3], [u3 u4])^eps per surrounding triangle, where
u1 < u2 < u3 < u4 sorts the triangle corners together with v' and eps is the
sign of the permutation that sorts (v', CCW cycle from the smallest corner).

On quotient complexes the corners of an identified vertex class are processed
in ascending label order, each seeing the colors left by the previous ones;
this reproduces the simultaneous action at all lifts in the universal cover,
and in particular the torus eigenphase beta_x(a,b)/beta_x(b,a).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .cohomology import Cocycle3
from .groups import FiniteGroup
from .lattice import Step, SurfaceLattice, TriangulatedLattice, triangulate, triangle_vertices
from .phases import Phase

Coloring = tuple[int, ...]


class OperatorError(ValueError):
    pass


class NotAClosedCycle(OperatorError):
    pass


# ---------------------------------------------------------------------------
# corner plans: everything about a vertex class that does not depend on the
# coloring or on g

# zeta argument specs: ("edge", ext_edge) for a real-real pair (always stored
# small-to-large, matching the sorted order), ("g",) for the [v' u] slot, and
# ("wu_ginv", ext_edge) for [w v'] = [w u] g^-1.
ZetaArg = tuple


@dataclass(frozen=True)
class TrianglePlan:
    eps: int
    args: tuple[ZetaArg, ZetaArg, ZetaArg]


@dataclass(frozen=True)
class CornerPlan:
    vertex: int
    zetas: tuple[TrianglePlan, ...]
    slots: tuple[tuple[int, bool], ...]   # (ext edge, acts at tail)


@dataclass(frozen=True)
class VertexPlan:
    vclass: int
    corners: tuple[CornerPlan, ...]


def _perm_sign(keys: Sequence) -> int:
    inv = 0
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            if keys[i] > keys[j]:
                inv += 1
    return -1 if inv % 2 else 1


def build_vertex_plan(T: TriangulatedLattice, vclass: int) -> VertexPlan:
    L = T.base
    corners = []
    for u in L.class_vertices(vclass):
        zetas = []
        for ti in T.triangles_at_vertex(u):
            verts = triangle_vertices(T, ti)
            if len(set(verts)) != 3:
                raise OperatorError(f"triangle {ti} repeats a drawn vertex")
            if verts.count(u) != 1:
                raise OperatorError(f"triangle {ti} has an ambiguous corner at {u}")
            # key: (label, 1) for real corners, (label(u), 0) for v'
            items: list[tuple[tuple[int, int], int | None]] = [
                ((L.label(w), 1), w) for w in verts]
            items.append(((L.label(u), 0), None))
            # eps from (v', cycle rotated to the smallest corner)
            rot = min(range(3), key=lambda i: L.label(verts[i]))
            cyc = [verts[(rot + k) % 3] for k in range(3)]
            eps = _perm_sign([(L.label(u), 0)] + [(L.label(w), 1) for w in cyc])
            items.sort(key=lambda it: it[0])
            edge_of = {}
            for e, _ in T.triangles[ti]:
                a, b = T.ext_endpoints(e)
                edge_of[frozenset((a, b))] = e
            args: list[ZetaArg] = []
            for k in range(3):
                x, y = items[k][1], items[k + 1][1]
                if x is None:            # (v', u): the new edge colored g
                    args.append(("g",))
                elif y is None:          # (w, v'): [w u] g^-1
                    args.append(("wu_ginv", edge_of[frozenset((x, u))]))
                else:
                    args.append(("edge", edge_of[frozenset((x, y))]))
            zetas.append(TrianglePlan(eps=eps, args=tuple(args)))
        slots = []
        for e in range(T.num_ext_edges):
            a, b = T.ext_endpoints(e)
            if a == u:
                slots.append((e, True))
            if b == u:
                slots.append((e, False))
        corners.append(CornerPlan(vertex=u, zetas=tuple(zetas), slots=tuple(slots)))
    return VertexPlan(vclass=vclass, corners=tuple(corners))


# ---------------------------------------------------------------------------
# the model bundle

class TwistedModel:
    """A lattice, group and validated 3-cocycle, with cached triangulation
    and per-vertex-class operator plans."""

    def __init__(self, lattice: SurfaceLattice, group: FiniteGroup, alpha: Cocycle3):
        if alpha.group is not group:
            raise OperatorError("cocycle must be defined over the model's group")
        self.lattice = lattice
        self.group = group
        self.alpha = alpha
        self.tri = triangulate(lattice)
        self._plans: dict[int, VertexPlan] = {}

    def plan(self, vclass: int) -> VertexPlan:
        if vclass not in self._plans:
            self._plans[vclass] = build_vertex_plan(self.tri, vclass)
        return self._plans[vclass]

    # -- colorings ---------------------------------------------------------

    def all_colorings(self) -> Iterable[Coloring]:
        n, E = self.group.order, self.lattice.num_edge_classes
        col = [0] * E
        while True:
            yield tuple(col)
            i = E - 1
            while i >= 0 and col[i] == n - 1:
                col[i] = 0
                i -= 1
            if i < 0:
                return
            col[i] += 1

    def coloring_index(self, col: Coloring) -> int:
        n = self.group.order
        out = 0
        for c in col:
            out = out * n + c
        return out

    def holonomy(self, col: Coloring, steps: Sequence[Step], require_closed: bool = True) -> int:
        L, G = self.lattice, self.group
        if require_closed:
            for k, step in enumerate(steps):
                nxt = steps[(k + 1) % len(steps)]
                if L.step_target(step) != L.step_source(nxt):
                    raise NotAClosedCycle(f"steps break at position {k}")
        out = G.identity
        for e, d in steps:
            c = col[L.eclass(e)]
            out = G.mul(out, c if d > 0 else G.inv(c))
        return out

    def face_flat(self, f: int, col: Coloring) -> bool:
        return self.holonomy(col, self.lattice.faces[f]) == self.group.identity

    def is_flat(self, col: Coloring, faces: Iterable[int] | None = None) -> bool:
        faces = range(len(self.lattice.faces)) if faces is None else faces
        return all(self.face_flat(f, col) for f in faces)

    # -- extended colorings --------------------------------------------------

    def drawn_colors(self, col: Coloring) -> list[int]:
        """Per drawn extended edge; ghosts get their boundary-path product."""
        T, L, G = self.tri, self.lattice, self.group
        out = [col[L.eclass(e)] for e in range(len(L.edges))]
        for gi, path in enumerate(T.ghost_expansion):
            acc = G.identity
            for e, d in path:
                c = col[L.eclass(e)]
                acc = G.mul(acc, c if d > 0 else G.inv(c))
            out.append(acc)
        return out

    def extend_coloring(self, col: Coloring) -> Coloring:
        """iota: coloring of the base lattice -> coloring of the triangulation
        (class level: ghost classes follow the base classes)."""
        drawn = self.drawn_colors(col)
        nb = len(self.lattice.edges)
        return tuple(col) + tuple(drawn[nb:])

    def restrict_coloring(self, ext: Coloring) -> Coloring:
        return tuple(ext[: self.lattice.num_edge_classes])

    # -- vertex operators ----------------------------------------------------

    def _corner_phase_and_update(self, plan: CornerPlan, g: int,
                                 drawn: list[int]) -> int:
        """Accumulate the corner's zeta product (numerator mod alpha.den) and
        then apply the slot multiplications at this corner."""
        G, alpha = self.group, self.alpha
        ginv = G.inv(g)
        num = 0
        for tp in plan.zetas:
            vals = []
            for arg in tp.args:
                if arg[0] == "edge":
                    vals.append(drawn[arg[1]])
                elif arg[0] == "g":
                    vals.append(g)
                else:  # ("wu_ginv", e): [w u] g^-1, with [w u] as stored
                    vals.append(G.mul(drawn[arg[1]], ginv))
            num += tp.eps * alpha.raw(vals[0], vals[1], vals[2])
        for e, at_tail in plan.slots:
            drawn[e] = G.mul(g, drawn[e]) if at_tail else G.mul(drawn[e], ginv)
        return num % alpha.den

    def vertex_op(self, vclass: int, g: int, col: Coloring) -> tuple[Coloring, Phase] | None:
        """A_v^g on a basis coloring: (new coloring, exact phase), or None if
        the permuted extended coloring leaves the image of iota (the theory
        says this never happens; callers treat None as a checked assertion).
        """
        L, G = self.lattice, self.group
        drawn = self.drawn_colors(col)
        num = 0
        for corner in self.plan(vclass).corners:
            num += self._corner_phase_and_update(corner, g, drawn)
        # fold drawn copies back to classes
        new = [0] * L.num_edge_classes
        seen = [False] * L.num_edge_classes
        for e in range(len(L.edges)):
            c = L.eclass(e)
            if seen[c] and new[c] != drawn[e]:
                return None
            new[c] = drawn[e]
            seen[c] = True
        out = tuple(new)
        # ghost colors must still be the boundary-path products
        nb = len(L.edges)
        expected = self.drawn_colors(out)
        for gi in range(len(self.tri.ghosts)):
            if expected[nb + gi] != drawn[nb + gi]:
                return None
        return out, Phase(num % self.alpha.den, self.alpha.den)

    def vertex_op_on_state(self, vclass: int, g: int,
                           state: dict[Coloring, complex]) -> dict[Coloring, complex]:
        out: dict[Coloring, complex] = {}
        for col, amp in state.items():
            res = self.vertex_op(vclass, g, col)
            if res is None:
                raise OperatorError("vertex operator left the coloring space")
            col2, ph = res
            out[col2] = out.get(col2, 0.0) + amp * ph.to_complex()
        return out

    def vertex_projector_on_state(self, vclass: int,
                                  state: dict[Coloring, complex]) -> dict[Coloring, complex]:
        """A_v = |G|^-1 sum_g A_v^g, in floating point."""
        G = self.group
        acc: dict[Coloring, complex] = {}
        for g in G.elements():
            part = self.vertex_op_on_state(vclass, g, state)
            for col, amp in part.items():
                acc[col] = acc.get(col, 0.0) + amp / G.order
        return {c: a for c, a in acc.items() if abs(a) > 1e-15}

    def face_projector_on_state(self, f: int,
                                state: dict[Coloring, complex]) -> dict[Coloring, complex]:
        return {c: a for c, a in state.items() if self.face_flat(f, c)}


@dataclass(frozen=True)
class MonomialOp:
    """A coloring-to-coloring map with an exact phase, plus its edge support."""

    action: Callable[[Coloring], tuple[Coloring, Phase] | None]
    support: frozenset[int]

    def apply(self, col: Coloring) -> tuple[Coloring, Phase] | None:
        return self.action(col)


def face_projector(model: TwistedModel, f: int) -> MonomialOp:
    def act(col: Coloring):
        if model.face_flat(f, col):
            return col, Phase.one()
        return None
    return MonomialOp(action=act, support=model.lattice.face_classes(f))


def vertex_monomial(model: TwistedModel, vclass: int, g: int) -> MonomialOp:
    def act(col: Coloring):
        return model.vertex_op(vclass, g, col)
    return MonomialOp(action=act,
                      support=model.lattice.closed_star_classes(vclass))


# ---------------------------------------------------------------------------
# bulk (vectorized) tables over the full coloring space; used by the
# exhaustive operator-relation checks

def bulk_vertex_tables(model: TwistedModel, vclass: int, g: int,
                       chunk: int = 1 << 22) -> tuple[np.ndarray, np.ndarray]:
    """(perm, phase_num) over all |G|^E colorings in mixed-radix order.

    perm[i] is the index of the image coloring; phase numerators are over
    alpha.den.  Work is chunked to bound memory.
    """
    L, G, alpha = model.lattice, model.group, model.alpha
    n, E = G.order, L.num_edge_classes
    N = n ** E
    perm = np.empty(N, dtype=np.int64)
    phase = np.empty(N, dtype=np.int32)
    mul = G.table.astype(np.int32)
    inv = G.inverses.astype(np.int32)
    anums = alpha.nums.astype(np.int32)
    ginv = int(inv[g])
    plan = model.plan(vclass)
    nb = len(L.edges)

    for start in range(0, N, chunk):
        stop = min(start + chunk, N)
        idx = np.arange(start, stop, dtype=np.int64)
        digits = []
        rem = idx.copy()
        for c in range(E - 1, -1, -1):
            digits.append((rem % n).astype(np.int32))
            rem //= n
        digits.reverse()  # digits[c] = color of class c

        drawn = [digits[L.eclass(e)].copy() for e in range(nb)]
        for path in model.tri.ghost_expansion:
            acc = np.full(stop - start, G.identity, dtype=np.int32)
            for e, d in path:
                col = digits[L.eclass(e)]
                acc = mul[acc, col if d > 0 else inv[col]]
            drawn.append(acc)

        num = np.zeros(stop - start, dtype=np.int32)
        gcol = np.full(stop - start, g, dtype=np.int32)
        for corner in plan.corners:
            for tp in corner.zetas:
                vals = []
                for arg in tp.args:
                    if arg[0] == "edge":
                        vals.append(drawn[arg[1]])
                    elif arg[0] == "g":
                        vals.append(gcol)
                    else:
                        vals.append(mul[drawn[arg[1]], ginv])
                num += tp.eps * anums[vals[0], vals[1], vals[2]]
            for e, at_tail in corner.slots:
                drawn[e] = mul[g, drawn[e]] if at_tail else mul[drawn[e], ginv]
        phase[start:stop] = num % alpha.den

        out_digits = [None] * E
        for e in range(nb):
            c = L.eclass(e)
            if out_digits[c] is None:
                out_digits[c] = drawn[e]
            elif not np.array_equal(out_digits[c], drawn[e]):
                raise OperatorError(
                    f"identified copies of edge class {c} disagree under A^{g}")
        # ghost image check: recompute from folded base colors
        for gi, path in enumerate(model.tri.ghost_expansion):
            acc = np.full(stop - start, G.identity, dtype=np.int32)
            for e, d in path:
                col = out_digits[L.eclass(e)]
                acc = mul[acc, col if d > 0 else inv[col]]
            if not np.array_equal(acc, drawn[nb + gi]):
                raise OperatorError("ghost colors left the image of iota")
        new_idx = np.zeros(stop - start, dtype=np.int64)
        for c in range(E):
            new_idx *= n
            new_idx += out_digits[c]
        perm[start:stop] = new_idx
    return perm, phase


def flat_indicator(model: TwistedModel, f: int, chunk: int = 1 << 22) -> np.ndarray:
    """Boolean array over all colorings: is face f flat."""
    L, G = model.lattice, model.group
    n, E = G.order, L.num_edge_classes
    N = n ** E
    out = np.empty(N, dtype=bool)
    mul, inv = G.table, G.inverses
    for start in range(0, N, chunk):
        stop = min(start + chunk, N)
        idx = np.arange(start, stop, dtype=np.int64)
        digits = []
        rem = idx.copy()
        for c in range(E - 1, -1, -1):
            digits.append(rem % n)
            rem //= n
        digits.reverse()
        acc = np.full(stop - start, G.identity, dtype=np.int64)
        for e, d in L.faces[f]:
            col = digits[L.eclass(e)]
            acc = mul[acc, col if d > 0 else inv[col]]
        out[start:stop] = acc == G.identity
    return out


@dataclass
class RelationReport:
    group_order: int
    colorings: int
    composition_scope: str        # all-colorings | flat-subspace
    checked_pairs: int
    group_law_ok: bool
    vertex_commute_ok: bool
    face_vertex_ok: bool
    monomial_ok: bool
    idempotence_ok: bool
    failures: list[str]

    @property
    def ok(self) -> bool:
        return (self.group_law_ok and self.vertex_commute_ok
                and self.face_vertex_ok and self.monomial_ok
                and self.idempotence_ok)


def _flat_colorings(model: TwistedModel) -> list[Coloring]:
    return [c for c in model.all_colorings() if model.is_flat(c)]


def verify_relations(model: TwistedModel, max_exhaustive: int = 1 << 24) -> RelationReport:
    """Exhaustively verify the operator algebra in the coloring basis.

    Always over all colorings: monomiality of every A_v^g (no coloring ever
    leaves the image of iota) and commutativity with every face projector.

    The composition laws (group law A_v^{g1} A_v^{g2} = A_v^{g1 g2},
    commutativity of vertex operators at distinct classes, idempotence of the
    averages) are checked over all colorings on one-vertex complexes, where
    they hold unrestricted, and over the flat subspace otherwise: twisted
    gauge transformations compose projectively off flat colorings, and the
    model only ever composes them under the face constraints.
    """
    L, G = model.lattice, model.group
    n, E = G.order, L.num_edge_classes
    N = n ** E
    if N > max_exhaustive:
        raise OperatorError(
            f"coloring space of size {N} exceeds the exhaustive cap; "
            "raise max_exhaustive or use a smaller instance")
    failures: list[str] = []
    D = model.alpha.den
    vclasses = range(L.num_vertex_classes)
    single = L.num_vertex_classes == 1

    # monomial totality + A-B commutativity over every coloring; the bulk
    # tables raise if any coloring leaves the image of iota
    monomial_ok = True
    face_vertex_ok = True
    pairs = 0
    try:
        tables = {(vc, g): bulk_vertex_tables(model, vc, g)
                  for vc in vclasses for g in G.elements()}
    except OperatorError as exc:
        monomial_ok = False
        failures.append(str(exc))
        tables = {}
    if tables:
        for f in range(len(L.faces)):
            ind = flat_indicator(model, f)
            for (vc, g), (p, _) in tables.items():
                pairs += 1
                if not np.array_equal(ind, ind[p]):
                    face_vertex_ok = False
                    failures.append(f"B_f{f} and A_v{vc}^{g} do not commute")
        for vc in vclasses:
            p, f = tables[(vc, G.identity)]
            if not (np.array_equal(p, np.arange(N)) and not f.any()):
                failures.append(f"A_v{vc}^e is not the identity")
                monomial_ok = False

    group_law_ok = True
    vertex_commute_ok = True
    if single and tables:
        scope = "all-colorings"
        for g1 in G.elements():
            p1, f1 = tables[(0, g1)]
            for g2 in G.elements():
                pairs += 1
                p2, f2 = tables[(0, g2)]
                p12, f12 = tables[(0, G.mul(g1, g2))]
                if not (np.array_equal(p1[p2], p12)
                        and np.array_equal((f2 + f1[p2]) % D, f12)):
                    group_law_ok = False
                    failures.append(f"group law fails at ({g1},{g2})")
        flats = _flat_colorings(model)
    else:
        scope = "flat-subspace"
        flats = _flat_colorings(model)
        for col in flats:
            for vc in vclasses:
                for g1 in G.elements():
                    for g2 in G.elements():
                        pairs += 1
                        cB, pB = model.vertex_op(vc, g2, col)
                        cA, pA = model.vertex_op(vc, g1, cB)
                        cT, pT = model.vertex_op(vc, G.mul(g1, g2), col)
                        if cA != cT or (pA * pB) != pT:
                            group_law_ok = False
                            failures.append(
                                f"group law fails at v{vc}, ({g1},{g2}), {col}")
            for vc1 in vclasses:
                for vc2 in vclasses:
                    if vc2 <= vc1:
                        continue
                    for g1 in G.elements():
                        for g2 in G.elements():
                            pairs += 1
                            cB, pB = model.vertex_op(vc2, g2, col)
                            cB, q = model.vertex_op(vc1, g1, cB)
                            lhs = (cB, pB * q)
                            cB2, pB2 = model.vertex_op(vc1, g1, col)
                            cB2, q2 = model.vertex_op(vc2, g2, cB2)
                            if lhs != (cB2, pB2 * q2):
                                vertex_commute_ok = False
                                failures.append(
                                    f"A_v{vc1}^{g1}, A_v{vc2}^{g2} fail to commute at {col}")

    # idempotence of the averaged projectors on a random flat state
    idempotence_ok = True
    rng = np.random.default_rng(7)
    if flats:
        pick = rng.choice(len(flats), size=min(4, len(flats)), replace=False)
        state = {flats[i]: complex(rng.standard_normal(), rng.standard_normal())
                 for i in pick}
        for vc in vclasses:
            once = model.vertex_projector_on_state(vc, state)
            twice = model.vertex_projector_on_state(vc, once)
            keys = set(once) | set(twice)
            dev = max((abs(once.get(k, 0) - twice.get(k, 0)) for k in keys),
                      default=0.0)
            if dev > 1e-9:
                idempotence_ok = False
                failures.append(f"A_v{vc}^2 deviates from A_v{vc} by {dev}")

    return RelationReport(group_order=n, colorings=N,
                          composition_scope=scope, checked_pairs=pairs,
                          group_law_ok=group_law_ok,
                          vertex_commute_ok=vertex_commute_ok,
                          face_vertex_ok=face_vertex_ok,
                          monomial_ok=monomial_ok,
                          idempotence_ok=idempotence_ok,
                          failures=failures)
