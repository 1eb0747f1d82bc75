"""Ground-state space of the twisted model via its monomial representation.

Flat colorings span the face-constraint subspace; the vertex operators act on
it as a monomial representation of the product of one copy of G per vertex
class.  Orbits of flat colorings under single-vertex moves, together with
exact phase bookkeeping, decide regularity; the ground-state dimension is the
number of regular orbits and each regular orbit sums to one basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import FiniteGroup, Subgroup
from .lattice import SurfaceLattice
from .operators import Coloring, OperatorError, TwistedModel
from .phases import Phase


class GroundStateError(ValueError):
    pass


@dataclass
class FlatColoringSet:
    colorings: list[Coloring]
    index: dict[Coloring, int]

    def __len__(self) -> int:
        return len(self.colorings)


def enumerate_flat(model: TwistedModel) -> FlatColoringSet:
    """Backtracking over edge classes, pruning on every face that closes and
    solving outright for classes that occur exactly once in a closing face."""
    L, G = model.lattice, model.group
    E = L.num_edge_classes
    face_steps = [tuple((L.eclass(e), d) for e, d in cyc) for cyc in L.faces]
    faces_of_class: dict[int, list[int]] = {c: [] for c in range(E)}
    for fi, steps in enumerate(face_steps):
        for c, _ in steps:
            faces_of_class[c].append(fi)

    col = [-1] * E
    out: list[Coloring] = []

    def face_complete(fi: int) -> bool:
        return all(col[c] >= 0 for c, _ in face_steps[fi])

    def face_holonomy(fi: int) -> int:
        acc = G.identity
        for c, d in face_steps[fi]:
            acc = G.mul(acc, col[c] if d > 0 else G.inv(col[c]))
        return acc

    def pick() -> tuple[int, int | None] | None:
        """(class to assign, forced value or None); None when all assigned."""
        best: tuple[int, int] | None = None
        for fi, steps in enumerate(face_steps):
            un = [c for c, _ in steps if col[c] < 0]
            if not un:
                continue
            distinct = set(un)
            if len(un) == 1:
                c = un[0]
                # solve pre * X^d * post = e for the single unknown slot
                pre = G.identity
                post = G.identity
                seen = False
                d_unknown = 0
                for c2, d in steps:
                    if c2 == c and not seen:
                        seen = True
                        d_unknown = d
                        continue
                    val = col[c2] if col[c2] >= 0 else None
                    assert val is not None
                    val = val if d > 0 else G.inv(val)
                    if not seen:
                        pre = G.mul(pre, val)
                    else:
                        post = G.mul(post, val)
                rhs = G.mul(G.inv(pre), G.inv(post))
                forced = rhs if d_unknown > 0 else G.inv(rhs)
                return (c, forced)
            if best is None or len(distinct) < best[1]:
                best = (min(distinct), len(distinct))
        if best is not None:
            return (best[0], None)
        free = [c for c in range(E) if col[c] < 0]
        if free:
            return (free[0], None)
        return None

    def consistent_after(c: int) -> bool:
        return all(face_holonomy(fi) == G.identity
                   for fi in faces_of_class[c] if face_complete(fi))

    def dfs() -> None:
        nxt = pick()
        if nxt is None:
            out.append(tuple(col))
            return
        c, forced = nxt
        values = [forced] if forced is not None else list(G.elements())
        for v in values:
            col[c] = v
            if consistent_after(c):
                dfs()
            col[c] = -1

    dfs()
    out.sort()
    return FlatColoringSet(colorings=out, index={c: i for i, c in enumerate(out)})


# ---------------------------------------------------------------------------
# stabilizers by transporting a base choice over the vertex-class graph

@dataclass
class StabilizerComponent:
    vertex_classes: tuple[int, ...]
    base: int
    transport: dict[int, int]     # vclass -> path product p; g_v = p^-1 x p
    members: Subgroup             # admissible x at the base vertex class


@dataclass
class StabilizerInfo:
    components: list[StabilizerComponent]

    @property
    def order(self) -> int:
        out = 1
        for comp in self.components:
            out *= comp.members.order
        return out

    def assignments(self) -> Iterable[dict[int, int]]:
        """All (g_v)_v in the stabilizer, as vclass -> group element maps."""
        G = None
        for comp in self.components:
            G = comp.members.parent
        assert G is not None

        def rec(i: int, acc: dict[int, int]):
            if i == len(self.components):
                yield dict(acc)
                return
            comp = self.components[i]
            for x in comp.members:
                for vc in comp.vertex_classes:
                    p = comp.transport[vc]
                    acc[vc] = G.mul(G.mul(G.inv(p), x), p)
                yield from rec(i + 1, acc)

        yield from rec(0, {})


def stabilizer(model: TwistedModel, col: Coloring) -> StabilizerInfo:
    """Solve g_u [uv] g_v^-1 = [uv] over all edges by transport along a
    spanning forest of the vertex-class graph."""
    L, G = model.lattice, model.group
    nvc = L.num_vertex_classes
    adj: dict[int, list[tuple[int, int, int]]] = {vc: [] for vc in range(nvc)}
    constraints = []
    for c in range(L.num_edge_classes):
        e = L.class_copies(c)[0]
        u, v, _ = L.edges[e]
        t, h = L.vclass(u), L.vclass(v)
        color = col[c]
        adj[t].append((h, color, +1))
        adj[h].append((t, color, -1))
        constraints.append((t, h, color))

    seen: dict[int, int] = {}
    components = []
    for start in range(nvc):
        if start in seen:
            continue
        transport = {start: G.identity}
        order = [start]
        seen[start] = len(components)
        queue = [start]
        while queue:
            t = queue.pop()
            for (h, color, d) in adj[t]:
                if h in transport:
                    continue
                # g_h = c^-1 g_t c along the edge direction; p accumulates
                transport[h] = (G.mul(transport[t], color) if d > 0
                                else G.mul(transport[t], G.inv(color)))
                seen[h] = len(components)
                order.append(h)
                queue.append(h)
        members = []
        for x in G.elements():
            ok = True
            gv = {vc: G.mul(G.mul(G.inv(p), x), p) for vc, p in transport.items()}
            for (t, h, color) in constraints:
                if t not in transport or h not in transport:
                    continue
                if G.mul(gv[t], color) != G.mul(color, gv[h]):
                    ok = False
                    break
            if ok:
                members.append(x)
        components.append(StabilizerComponent(
            vertex_classes=tuple(order), base=start, transport=transport,
            members=Subgroup(G, tuple(members))))
    return StabilizerInfo(components=components)


def apply_move_product(model: TwistedModel, assignment: dict[int, int],
                       col: Coloring) -> tuple[Coloring, Phase]:
    """prod_v A_v^{g_v} applied to a basis coloring, phases composed exactly."""
    out = col
    ph = Phase.one()
    for vc in sorted(assignment):
        res = model.vertex_op(vc, assignment[vc], out)
        if res is None:
            raise OperatorError("vertex operator left the coloring space")
        out, p = res
        ph = ph * p
    return out, ph


def is_regular(model: TwistedModel, col: Coloring) -> tuple[bool, Phase | None]:
    """Iterate the stabilizer; regular iff every element fixes the coloring
    with phase exactly 1.  Returns (verdict, witness phase on failure)."""
    if not model.is_flat(col):
        raise GroundStateError("regularity is defined for flat colorings")
    stab = stabilizer(model, col)
    for assignment in stab.assignments():
        out, ph = apply_move_product(model, assignment, col)
        if out != col:
            raise GroundStateError("stabilizer element moved the coloring")
        if not ph.is_one:
            return False, ph
    return True, None


def genus_regularity_product(model: TwistedModel, col: Coloring, x: int) -> Phase:
    """Closed form for one-vertex genus-n complexes: the product over the 2n
    boundary classes of beta_x(g_i, g_{i+1}..g_{2n}) / beta_x(g_i, g_{i-1}..g_1).
    """
    from .cohomology import beta
    alpha = model.alpha
    G = model.group
    E = model.lattice.num_edge_classes
    two_n = (E + 3) // 3  # 6n-3 classes total on the genus-n complex
    gs = list(col[:two_n])
    out = Phase.one()
    for i in range(two_n):
        suffix = G.prod(gs[i + 1:])
        prefix = G.prod(reversed(gs[:i]))
        out = out * beta(alpha, x, gs[i], suffix) / beta(alpha, x, gs[i], prefix)
    return out


# ---------------------------------------------------------------------------
# orbits

@dataclass
class OrbitRecord:
    representative: Coloring
    elements: dict[Coloring, Phase]   # phase relative to the representative
    stabilizer: StabilizerInfo
    regular: bool

    def __len__(self) -> int:
        return len(self.elements)


def orbit_bfs(model: TwistedModel, col: Coloring,
              gens: Sequence[int] | None = None) -> OrbitRecord:
    """BFS over single-vertex generator moves with exact phase labels.

    Any revisit with a mismatched phase certifies a nontrivial stabilizer
    phase (path-independence fails), marking the orbit non-regular; the group
    law on the flat subspace makes generator moves sufficient.
    """
    if not model.is_flat(col):
        raise GroundStateError("orbits are taken inside the flat subspace")
    G = model.group
    if gens is None:
        gens = G.generating_set()
    phases: dict[Coloring, Phase] = {col: Phase.one()}
    regular = True
    queue = [col]
    vclasses = range(model.lattice.num_vertex_classes)
    while queue:
        cur = queue.pop()
        ph_cur = phases[cur]
        for vc in vclasses:
            for g in gens:
                res = model.vertex_op(vc, g, cur)
                if res is None:
                    raise OperatorError("vertex operator left the coloring space")
                nxt, ph = res
                ph_next = ph_cur * ph
                if nxt not in phases:
                    phases[nxt] = ph_next
                    queue.append(nxt)
                elif phases[nxt] != ph_next:
                    regular = False
    rep = min(phases)
    anchor = phases[rep]
    elements = {c: p / anchor for c, p in phases.items()}
    return OrbitRecord(representative=rep, elements=elements,
                       stabilizer=stabilizer(model, rep), regular=regular)


@dataclass
class GroundStateBasis:
    vectors: list[dict[Coloring, Phase]]
    orbits: list[OrbitRecord]

    @property
    def dimension(self) -> int:
        return len(self.vectors)


@dataclass
class GroundStateSummary:
    dimension: int
    orbit_count: int
    regular_count: int
    flat_count: int
    orbits: list[OrbitRecord]


def ground_state_orbits(model: TwistedModel) -> GroundStateSummary:
    flats = enumerate_flat(model)
    gens = model.group.generating_set()
    seen: set[Coloring] = set()
    orbits: list[OrbitRecord] = []
    for col in flats.colorings:
        if col in seen:
            continue
        rec = orbit_bfs(model, col, gens)
        seen.update(rec.elements)
        orbits.append(rec)
    regular = sum(1 for r in orbits if r.regular)
    return GroundStateSummary(dimension=regular, orbit_count=len(orbits),
                              regular_count=regular, flat_count=len(flats),
                              orbits=orbits)


def ground_state_dimension(model: TwistedModel) -> int:
    return ground_state_orbits(model).dimension


def ground_state_basis(model: TwistedModel) -> GroundStateBasis:
    """One vector per regular orbit: the orbit sum with BFS phases."""
    summary = ground_state_orbits(model)
    vectors = [dict(rec.elements) for rec in summary.orbits if rec.regular]
    return GroundStateBasis(vectors=vectors,
                            orbits=[r for r in summary.orbits if r.regular])


@dataclass
class GroundStateReport:
    checked_vectors: int
    ok: bool
    failures: list[str]


def verify_ground_state(model: TwistedModel, basis: GroundStateBasis) -> GroundStateReport:
    """Every basis vector must be fixed by every B_f and every A_v^g exactly
    (fixing by each A_v^g is equivalent to fixing by the averages here, and
    keeps the arithmetic in exact phases)."""
    L, G = model.lattice, model.group
    failures: list[str] = []
    for k, vec in enumerate(basis.vectors):
        for col in vec:
            if not model.is_flat(col):
                failures.append(f"vector {k} has non-flat support {col}")
        for vc in range(L.num_vertex_classes):
            for g in G.elements():
                moved: dict[Coloring, Phase] = {}
                for col, ph in vec.items():
                    res = model.vertex_op(vc, g, col)
                    if res is None:
                        failures.append(f"vector {k}: A_v{vc}^{g} left the space")
                        continue
                    col2, p = res
                    moved[col2] = ph * p
                if moved != vec:
                    failures.append(f"vector {k} is not fixed by A_v{vc}^{g}")
    return GroundStateReport(checked_vectors=len(basis.vectors),
                             ok=not failures, failures=failures)


def topological_invariance_check(model1: TwistedModel, model2: TwistedModel) -> tuple[bool, int, int]:
    d1 = ground_state_dimension(model1)
    d2 = ground_state_dimension(model2)
    return d1 == d2, d1, d2


# ---------------------------------------------------------------------------
# independent oracles

def materialize_ground_projector(model: TwistedModel, cap: int = 10 ** 4) -> np.ndarray:
    """Dense prod_v A_v prod_f B_f, built column by column with the face
    projectors applied first.  Independent of the orbit machinery: the rank
    of this matrix is the oracle for the orbit-counted dimension."""
    L, G = model.lattice, model.group
    n, E = G.order, L.num_edge_classes
    N = n ** E
    if N > cap:
        raise GroundStateError(f"Hilbert dimension {N} exceeds the cap {cap}")
    cols = list(model.all_colorings())
    index = {c: i for i, c in enumerate(cols)}
    P = np.zeros((N, N), dtype=complex)
    for j, col in enumerate(cols):
        if not model.is_flat(col):
            continue
        state = {col: 1.0 + 0.0j}
        for vc in range(L.num_vertex_classes):
            state = model.vertex_projector_on_state(vc, state)
        for c, amp in state.items():
            P[index[c], j] = amp
    return P


def projector_rank(P: np.ndarray, tol: float = 1e-9) -> int:
    """Rank of a claimed orthogonal projector.

    Hermiticity and idempotency are verified first; the rank of a verified
    projector is its trace.  Small matrices get a full eigendecomposition.
    """
    herm = np.abs(P - P.conj().T).max()
    if herm > tol:
        raise GroundStateError(f"matrix is not hermitian (dev {herm:.2e})")
    if P.shape[0] <= 1024:
        evals = np.linalg.eigvalsh(P)
        if np.abs(evals - np.round(evals)).max() > tol:
            raise GroundStateError("matrix is not a projector")
        return int(np.sum(evals > 0.5))
    idem = np.abs(P @ P - P).max()
    if idem > tol:
        raise GroundStateError(f"matrix is not idempotent (dev {idem:.2e})")
    tr = P.trace()
    rank = int(round(tr.real))
    if abs(tr - rank) > tol * P.shape[0]:
        raise GroundStateError(f"projector trace {tr} is not near an integer")
    return rank


def hom_orbit_count(G: FiniteGroup, genus: int) -> int:
    """Brute-force count of conjugation orbits of surface-group homomorphisms
    (tuples with g_1..g_{2n} = g_{2n}..g_1), independent of all operator
    machinery; equals the untwisted ground-state dimension."""
    n2 = 2 * genus
    tuples = []
    for flat_idx in range(G.order ** n2):
        t = []
        rem = flat_idx
        for _ in range(n2):
            t.append(rem % G.order)
            rem //= G.order
        if G.prod(t) == G.prod(reversed(t)):
            tuples.append(tuple(t))
    tup_set = set(tuples)
    seen = set()
    orbits = 0
    for t in tuples:
        if t in seen:
            continue
        orbits += 1
        for x in G.elements():
            xt = tuple(G.mul(G.mul(x, g), G.inv(x)) for g in t)
            assert xt in tup_set
            seen.add(xt)
    return orbits


# ---------------------------------------------------------------------------
# exports

def basis_to_json(basis: GroundStateBasis) -> list[dict]:
    out = []
    for rec, vec in zip(basis.orbits, basis.vectors):
        out.append({
            "orbit_representative": list(rec.representative),
            "terms": [{"coloring": list(c), "phase": [p.num, p.den]}
                      for c, p in sorted(vec.items())],
        })
    return out


def dimension_report(model: TwistedModel, summary: GroundStateSummary,
                     group_ref: str, cocycle_ref: str, lattice_ref: str) -> dict:
    return {
        "group": group_ref,
        "cocycle": cocycle_ref,
        "lattice": lattice_ref,
        "dimension": summary.dimension,
        "orbit_count": summary.orbit_count,
        "regular_count": summary.regular_count,
        "flat_count": summary.flat_count,
    }
