"""Finite groups as validated Cayley tables with 0-based element indices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GroupError(ValueError):
    pass


class NotLatinSquare(GroupError):
    pass


class NoIdentity(GroupError):
    pass


class NoInverse(GroupError):
    pass


class NotAssociative(GroupError):
    pass


class UnknownFamily(GroupError):
    pass


class BadParams(GroupError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its Cayley table.

    Elements are the indices 0..order-1; ``table[g, h]`` is the product g*h.
    Instances are built through :func:`validate_group` and are immutable.
    """

    order: int
    table: np.ndarray
    identity: int
    inverses: np.ndarray
    names: tuple[str, ...] | None = None
    _abelian: bool = field(default=False, repr=False)

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverses[g])

    def conj(self, x: int, g: int) -> int:
        """g^-1 * x * g."""
        return int(self.table[self.table[self.inverses[g], x], g])

    def elements(self) -> range:
        return range(self.order)

    def prod(self, elems: Iterable[int]) -> int:
        out = self.identity
        for g in elems:
            out = int(self.table[out, g])
        return out

    def power(self, g: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv(g), -k)
        out = self.identity
        for _ in range(k):
            out = int(self.table[out, g])
        return out

    @property
    def is_abelian(self) -> bool:
        return self._abelian

    def name_of(self, g: int) -> str:
        if self.names is not None:
            return self.names[g]
        return str(g)

    def generating_set(self) -> list[int]:
        """A small generating set, found greedily by subgroup closure."""
        gens: list[int] = []
        reached = {self.identity}
        for g in self.elements():
            if g not in reached:
                gens.append(g)
                reached = _closure(self, reached | {g})
                if len(reached) == self.order:
                    break
        return gens

    def __repr__(self) -> str:  # keep dataclass repr short: tables are noisy
        return f"FiniteGroup(order={self.order})"


def _closure(G: FiniteGroup, seed: set[int]) -> set[int]:
    out = set(seed)
    frontier = list(seed)
    while frontier:
        x = frontier.pop()
        for y in tuple(out):
            for z in (G.mul(x, y), G.mul(y, x)):
                if z not in out:
                    out.add(z)
                    frontier.append(z)
    return out


@dataclass(frozen=True)
class Subgroup:
    """Explicit member set of a subgroup, kept sorted."""

    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        G = self.parent
        mem = set(self.members)
        if G.identity not in mem:
            raise GroupError("subgroup must contain the identity")
        for a in self.members:
            if G.inv(a) not in mem:
                raise GroupError(f"subgroup not closed under inverse at {a}")
            for b in self.members:
                if G.mul(a, b) not in mem:
                    raise GroupError(f"subgroup not closed under product at ({a},{b})")
        object.__setattr__(self, "members", tuple(sorted(mem)))

    @property
    def order(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def validate_group(table: Sequence[Sequence[int]] | np.ndarray,
                   names: Sequence[str] | None = None) -> FiniteGroup:
    """Check the Cayley-table axioms and return the validated group.

    Raises NotLatinSquare / NoIdentity / NoInverse / NotAssociative, each
    naming the first offending element or triple.
    """
    t = np.asarray(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise NotLatinSquare(f"table must be square, got shape {t.shape}")
    n = t.shape[0]
    if n == 0:
        raise NotLatinSquare("empty table")
    if t.min() < 0 or t.max() >= n:
        bad = np.argwhere((t < 0) | (t >= n))[0]
        raise NotLatinSquare(f"entry out of range at row {bad[0]}, col {bad[1]}")
    full = np.arange(n)
    for g in range(n):
        if not np.array_equal(np.sort(t[g]), full):
            raise NotLatinSquare(f"row {g} is not a permutation")
        if not np.array_equal(np.sort(t[:, g]), full):
            raise NotLatinSquare(f"column {g} is not a permutation")

    # t[t[a,b], c] == t[a, t[b,c]] for all triples, via fancy indexing.
    left = t[t, :]
    right = t[:, t]
    if not np.array_equal(left, right):
        a, b, c = np.argwhere(left != right)[0]
        raise NotAssociative(f"({a}*{b})*{c} != {a}*({b}*{c})")

    identity = -1
    for e in range(n):
        if np.array_equal(t[e], full) and np.array_equal(t[:, e], full):
            identity = e
            break
    if identity < 0:
        raise NoIdentity("no two-sided identity element")

    inverses = np.empty(n, dtype=np.int64)
    for g in range(n):
        hits = np.nonzero(t[g] == identity)[0]
        if len(hits) != 1 or t[hits[0], g] != identity:
            raise NoInverse(f"element {g} has no two-sided inverse")
        inverses[g] = hits[0]

    abelian = np.array_equal(t, t.T)
    t.setflags(write=False)
    inverses.setflags(write=False)
    return FiniteGroup(order=n, table=t, identity=identity, inverses=inverses,
                       names=tuple(names) if names is not None else None,
                       _abelian=bool(abelian))


def centralizer(G: FiniteGroup, gens: Sequence[int]) -> Subgroup:
    """Elements commuting with every generator; the whole group if gens is empty."""
    members = [x for x in G.elements()
               if all(G.mul(x, g) == G.mul(g, x) for g in gens)]
    return Subgroup(G, tuple(members))


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise BadParams(f"cyclic order must be >= 1, got {n}")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    return validate_group(table, names=[str(i) for i in range(n)])


def dihedral_group(n: int) -> FiniteGroup:
    """D_n of order 2n; element (i, j) = r^i s^j with s r = r^-1 s."""
    if n < 1:
        raise BadParams(f"dihedral parameter must be >= 1, got {n}")
    elems = [(i, j) for j in range(2) for i in range(n)]
    pos = {e: k for k, e in enumerate(elems)}
    table = np.empty((2 * n, 2 * n), dtype=np.int64)
    for (i, j), a in pos.items():
        for (k, l), b in pos.items():
            # r^i s^j r^k s^l = r^(i + (-1)^j k) s^(j+l)
            table[a, b] = pos[((i + (k if j == 0 else -k)) % n, (j + l) % 2)]

    def nm(i, j):
        r = "" if i == 0 else ("r" if i == 1 else f"r{i}")
        s = "s" if j else ""
        return (r + s) or "e"

    return validate_group(table, names=[nm(i, j) for (i, j) in elems])


def quaternion_group(n: int = 2) -> FiniteGroup:
    """Generalized quaternion Q_{4n}: a^{2n}=e, b^2=a^n, b a b^-1 = a^-1."""
    if n < 2:
        raise BadParams(f"quaternion parameter must be >= 2, got {n}")
    m = 2 * n
    elems = [(i, j) for j in range(2) for i in range(m)]
    pos = {e: k for k, e in enumerate(elems)}
    table = np.empty((2 * m, 2 * m), dtype=np.int64)
    for (i, j), a in pos.items():
        for (k, l), b in pos.items():
            i2 = (i + (k if j == 0 else -k) + (n if j == 1 and l == 1 else 0)) % m
            table[a, b] = pos[(i2, (j + l) % 2)]
    return validate_group(table, names=[f"a{i}b{j}" for (i, j) in elems])


def direct_product(*groups: FiniteGroup) -> FiniteGroup:
    if not groups:
        raise BadParams("direct product needs at least one factor")
    orders = [G.order for G in groups]
    n = int(np.prod(orders))
    strides = np.ones(len(groups), dtype=np.int64)
    for i in range(len(groups) - 2, -1, -1):
        strides[i] = strides[i + 1] * orders[i + 1]

    def split(x: int) -> tuple[int, ...]:
        return tuple(int((x // strides[i]) % orders[i]) for i in range(len(groups)))

    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        pa = split(a)
        for b in range(n):
            pb = split(b)
            table[a, b] = sum(groups[i].mul(pa[i], pb[i]) * strides[i]
                              for i in range(len(groups)))
    names = ["(" + ",".join(groups[i].name_of(split(x)[i])
                            for i in range(len(groups))) + ")" for x in range(n)]
    return validate_group(table, names=names)


def tuple_of(G_factors: Sequence[FiniteGroup], x: int) -> tuple[int, ...]:
    """Coordinates of a direct-product element, row-major as built above."""
    coords = []
    rem = x
    for G in reversed(G_factors):
        coords.append(rem % G.order)
        rem //= G.order
    return tuple(reversed(coords))


_FAMILIES = {"cyclic", "dihedral", "quaternion", "direct_product"}


def builtin_group(name: str, params: Sequence[int] = ()) -> FiniteGroup:
    """Named families: cyclic(n), dihedral(n), quaternion(n), direct_product is
    exposed through :func:`direct_product` (it takes group factors, not ints)."""
    if name == "cyclic":
        if len(params) != 1:
            raise BadParams("cyclic takes one parameter")
        return cyclic_group(params[0])
    if name == "dihedral":
        if len(params) != 1:
            raise BadParams("dihedral takes one parameter")
        return dihedral_group(params[0])
    if name == "quaternion":
        if len(params) > 1:
            raise BadParams("quaternion takes at most one parameter")
        return quaternion_group(params[0] if params else 2)
    if name == "direct_product":
        raise BadParams("direct_product factors must be groups; use direct_product()")
    raise UnknownFamily(f"unknown group family {name!r} (known: {sorted(_FAMILIES)})")


def group_to_json(G: FiniteGroup) -> dict:
    out = {"order": G.order, "table": G.table.tolist()}
    if G.names is not None:
        out["names"] = list(G.names)
    return out


def group_from_json(data: dict) -> FiniteGroup:
    return validate_group(data["table"], names=data.get("names"))


def load_group(path: str | Path) -> FiniteGroup:
    return group_from_json(json.loads(Path(path).read_text()))
