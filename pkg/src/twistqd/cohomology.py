"""3-cocycles over finite groups with exact root-of-unity values, the slant
products beta_x, and a coboundary solver for 2-cocycles on subgroups.

A cocycle table keeps all values over a single common denominator D, so that
every operation is integer arithmetic mod D and equality tests are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .groups import FiniteGroup, Subgroup, cyclic_group, direct_product, tuple_of
from .phases import Phase
from .snf import solve_mod1


class CocycleError(ValueError):
    pass


class NotNormalized(CocycleError):
    pass


class CocycleIdentityViolated(CocycleError):
    pass


class RelationViolated(CocycleError):
    pass


class NotACocycle(CocycleError):
    pass


class ValidationFailed(CocycleError):
    pass


class UnknownCocycleFamily(CocycleError):
    pass


@dataclass(frozen=True)
class Cocycle3:
    """Validated normalized 3-cocycle alpha: G^3 -> U(1).

    ``nums[a,b,c]`` over the common denominator ``den`` gives
    alpha(a,b,c) = exp(2*pi*i * nums[a,b,c]/den).
    """

    group: FiniteGroup
    nums: np.ndarray
    den: int

    def phase(self, a: int, b: int, c: int) -> Phase:
        return Phase(int(self.nums[a, b, c]), self.den)

    def raw(self, a: int, b: int, c: int) -> int:
        """Numerator over the common denominator; exponents add mod den."""
        return int(self.nums[a, b, c])

    @property
    def is_trivial(self) -> bool:
        return not self.nums.any()

    def __repr__(self) -> str:
        return f"Cocycle3(|G|={self.group.order}, den={self.den})"


def _common_denominator_table(G: FiniteGroup,
                              value: Callable[[int, int, int], Phase]) -> tuple[np.ndarray, int]:
    n = G.order
    dens = set()
    vals: list[Phase] = []
    for a in range(n):
        for b in range(n):
            for c in range(n):
                p = value(a, b, c)
                vals.append(p)
                dens.add(p.den)
    D = lcm(*dens) if dens else 1
    nums = np.fromiter((p.num * (D // p.den) for p in vals), dtype=np.int64,
                       count=n * n * n).reshape(n, n, n) % D
    return nums, D


def validate_cocycle3(G: FiniteGroup, values, chunk: int = 8) -> Cocycle3:
    """Exhaustively check normalization and the cocycle identity over G^4.

    ``values`` is either a callable (a,b,c)->Phase or a dense nested table of
    (num, den) pairs / Phase objects.  The identity check runs vectorized in
    chunks of g1 to bound memory on |G| = 64.
    """
    n = G.order
    if callable(values):
        nums, D = _common_denominator_table(G, values)
    else:
        arr = np.asarray(values, dtype=object)
        if arr.shape[:3] != (n, n, n):
            raise CocycleError(f"value table must be shaped ({n},{n},{n})")

        def from_table(a, b, c):
            v = arr[a, b, c]
            return v if isinstance(v, Phase) else Phase(int(v[0]), int(v[1]))

        nums, D = _common_denominator_table(G, from_table)

    e = G.identity
    if nums[e, :, :].any() or nums[:, e, :].any() or nums[:, :, e].any():
        where = np.argwhere(nums[e, :, :])
        if len(where):
            g1, g2 = where[0]
        else:
            where = np.argwhere(nums[:, e, :])
            if len(where):
                g1, g2 = where[0]
            else:
                g1, g2 = np.argwhere(nums[:, :, e])[0]
        raise NotNormalized(f"alpha not normalized at ({g1},{g2})")

    t = G.table
    for start in range(0, n, chunk):
        g1 = np.arange(start, min(start + chunk, n))[:, None, None, None]
        g2 = np.arange(n)[None, :, None, None]
        g3 = np.arange(n)[None, None, :, None]
        g4 = np.arange(n)[None, None, None, :]
        lhs = (nums[g2, g3, g4]
               + nums[g1, t[g2, g3], g4]
               + nums[g1, g2, g3]) % D
        rhs = (nums[t[g1, g2], g3, g4] + nums[g1, g2, t[g3, g4]]) % D
        if not np.array_equal(lhs, rhs):
            i, j, k, l = np.argwhere(lhs != rhs)[0]
            raise CocycleIdentityViolated(
                f"cocycle identity fails at ({start + i},{j},{k},{l})")
    return Cocycle3(group=G, nums=nums, den=D)


def trivial_cocycle(G: FiniteGroup) -> Cocycle3:
    return Cocycle3(group=G, nums=np.zeros((G.order,) * 3, dtype=np.int64), den=1)


def builtin_cocycle(family: str, G: FiniteGroup, params: Sequence[int] = ()) -> Cocycle3:
    """Shipped families, each validated before use.

    - trivial: all phases 1, on any group.
    - cyclic(p): on Z_n, alpha(a,b,c) = exp(2*pi*i * p*a*floor((b+c)/n) / n).
    - product_tricharacter: on Z_n^3, alpha(a,b,c) = exp(2*pi*i * a1*b2*c3 / n).
    - dihedral_parity: on D_n, pullback of the order-two cyclic cocycle along
      the reflection-parity map, alpha = (-1)^(par(a)par(b)par(c)).
    """
    if family == "trivial":
        return trivial_cocycle(G)
    if family == "cyclic":
        n = G.order
        if not np.array_equal(G.table, (np.arange(n)[:, None] + np.arange(n)[None, :]) % n):
            raise ValidationFailed("cyclic cocycle needs the additive Z_n table")
        p = params[0] if params else 1

        def val(a, b, c):
            return Phase(p * a * ((b + c) // n), n)

        return validate_cocycle3(G, val)
    if family == "product_tricharacter":
        n3 = G.order
        n = round(n3 ** (1 / 3))
        if n ** 3 != n3:
            raise ValidationFailed("product_tricharacter needs |G| = n^3")
        Zn = cyclic_group(n)
        ref = direct_product(Zn, Zn, Zn)
        if not np.array_equal(G.table, ref.table):
            raise ValidationFailed("product_tricharacter needs the Z_n^3 product table")
        factors = [Zn, Zn, Zn]

        def val(a, b, c):
            a1 = tuple_of(factors, a)[0]
            b2 = tuple_of(factors, b)[1]
            c3 = tuple_of(factors, c)[2]
            return Phase(a1 * b2 * c3, n)

        return validate_cocycle3(G, val)
    if family == "dihedral_parity":
        n = G.order // 2
        # parity of the reflection part in the builtin dihedral element order
        if G.names is None or "s" not in G.names:
            raise ValidationFailed("dihedral_parity needs the builtin dihedral group")

        def par(g):
            return 1 if "s" in G.name_of(g) else 0

        def val(a, b, c):
            return Phase(par(a) * par(b) * par(c), 2)

        return validate_cocycle3(G, val)
    raise UnknownCocycleFamily(
        f"unknown cocycle family {family!r} "
        "(known: trivial, cyclic, product_tricharacter, dihedral_parity)")


def beta(alpha: Cocycle3, x: int, y: int, z: int) -> Phase:
    """The slant product: beta_x(y,z) = alpha(x,y,z) alpha(y,z,w) / alpha(y,u,z)
    with u = y^-1 x y and w = z^-1 u z."""
    return Phase(beta_raw(alpha, x, y, z), alpha.den)


def beta_raw(alpha: Cocycle3, x: int, y: int, z: int) -> int:
    G = alpha.group
    u = G.conj(x, y)
    w = G.conj(u, z)
    return (alpha.raw(x, y, z) + alpha.raw(y, z, w) - alpha.raw(y, u, z)) % alpha.den


def beta_table(alpha: Cocycle3, x: int) -> np.ndarray:
    """Numerators of beta_x over alpha.den for all (y,z), vectorized."""
    G = alpha.group
    n = G.order
    t, inv = G.table, G.inverses
    y = np.arange(n)[:, None]
    z = np.arange(n)[None, :]
    u = t[t[inv[y], x], y]                      # y^-1 x y, shape (n,1)
    Y = np.broadcast_to(y, (n, n))
    Z = np.broadcast_to(z, (n, n))
    U = np.broadcast_to(u, (n, n))
    w = t[t[inv[Z], U], Z]                      # z^-1 u z
    nums = (alpha.nums[x, Y, Z] + alpha.nums[Y, Z, w] - alpha.nums[Y, U, Z]) % alpha.den
    return nums


def validate_beta_relation(alpha: Cocycle3, x: int) -> None:
    """Exhaustive check of beta_x(y,z) beta_x(yz,w) = beta_x(y,zw) beta_{y^-1 x y}(z,w)."""
    G = alpha.group
    n, t, inv, D = G.order, G.table, G.inverses, alpha.den
    bx = beta_table(alpha, x)
    # beta_{y^-1 x y} varies with y; build per y to keep memory flat.
    for y in range(n):
        u = G.conj(x, y)
        bu = beta_table(alpha, u)
        z = np.arange(n)[:, None]
        w = np.arange(n)[None, :]
        lhs = (bx[y, z] + bx[t[y, z], w]) % D
        rhs = (bx[y, t[z, w]] + bu[z, w]) % D
        if not np.array_equal(lhs, rhs):
            i, j = np.argwhere(lhs != rhs)[0]
            raise RelationViolated(f"beta relation fails at x={x}, y={y}, z={i}, w={j}")


@dataclass(frozen=True)
class Cocycle2:
    """2-cocycle on a subgroup, as numerators over a common denominator."""

    subgroup: Subgroup
    nums: np.ndarray          # indexed by positions within subgroup.members
    den: int

    def phase(self, i: int, j: int) -> Phase:
        """Value at the i-th and j-th subgroup members (position indices)."""
        return Phase(int(self.nums[i, j]), self.den)

    def check_identity(self) -> None:
        H = self.subgroup
        G = H.parent
        pos = {g: i for i, g in enumerate(H.members)}
        m, D = len(H.members), self.den
        # b(y,z) b(yz,w) = b(y,zw) b(z,w) for all member triples
        for i, a in enumerate(H.members):
            for j, b in enumerate(H.members):
                for k, c in enumerate(H.members):
                    lhs = (self.nums[i, j] + self.nums[pos[G.mul(a, b)], k]) % D
                    rhs = (self.nums[i, pos[G.mul(b, c)]] + self.nums[j, k]) % D
                    if lhs != rhs:
                        raise NotACocycle(f"2-cocycle identity fails at ({a},{b},{c})")


def beta_restricted(alpha: Cocycle3, x: int, H: Subgroup) -> Cocycle2:
    """beta_x restricted to a subgroup of the centralizer of x."""
    m = len(H.members)
    nums = np.empty((m, m), dtype=np.int64)
    for i, y in enumerate(H.members):
        for j, z in enumerate(H.members):
            nums[i, j] = beta_raw(alpha, x, y, z)
    return Cocycle2(subgroup=H, nums=nums, den=alpha.den)


def cocycle2_from_phases(H: Subgroup, values: dict[tuple[int, int], Phase]) -> Cocycle2:
    """Build a Cocycle2 from member-indexed phases (missing entries are 1)."""
    m = len(H.members)
    pos = {g: i for i, g in enumerate(H.members)}
    dens = {p.den for p in values.values()} | {1}
    D = lcm(*dens)
    nums = np.zeros((m, m), dtype=np.int64)
    for (y, z), p in values.items():
        nums[pos[y], pos[z]] = p.num * (D // p.den)
    return Cocycle2(subgroup=H, nums=nums, den=D)


def coboundary_of(H: Subgroup, gamma: dict[int, Phase]) -> Cocycle2:
    """The 2-coboundary b(y,z) = gamma(y) gamma(z) gamma(yz)^-1."""
    G = H.parent
    vals = {}
    for y in H.members:
        for z in H.members:
            vals[(y, z)] = gamma[y] * gamma[z] / gamma[G.mul(y, z)]
    return cocycle2_from_phases(H, vals)


def is_coboundary(b: Cocycle2) -> dict[int, Phase] | None:
    """Decide whether b = d(gamma) for some gamma: H -> U(1); return a witness.

    The additive system gamma(y) + gamma(z) - gamma(yz) = b(y,z)  (mod 1) is
    solved over Q/Z with an integer Smith normal form; the witness is verified
    by substitution before returning.
    """
    b.check_identity()
    H = b.subgroup
    G = H.parent
    members = H.members
    m = len(members)
    pos = {g: i for i, g in enumerate(members)}
    rows = []
    rhs = []
    for i, y in enumerate(members):
        for j, z in enumerate(members):
            row = [0] * m
            row[i] += 1
            row[j] += 1
            row[pos[G.mul(y, z)]] -= 1
            rows.append(row)
            rhs.append(Fraction(int(b.nums[i, j]), b.den))
    sol = solve_mod1(rows, rhs)
    if sol is None:
        return None
    gamma = {g: Phase.from_fraction(sol[i]) for i, g in enumerate(members)}
    for i, y in enumerate(members):
        for j, z in enumerate(members):
            got = gamma[y] * gamma[z] / gamma[G.mul(y, z)]
            if got != b.phase(i, j):
                raise AssertionError("coboundary witness failed substitution check")
    return gamma


def cocycle_to_json(alpha: Cocycle3, group_ref: str | None = None) -> dict:
    entries = []
    n = alpha.group.order
    for a in range(n):
        for b in range(n):
            for c in range(n):
                p = alpha.phase(a, b, c)
                if not p.is_one:
                    entries.append([a, b, c, [p.num, p.den]])
    out: dict = {"entries": entries}
    if group_ref is not None:
        out["group_ref"] = group_ref
    return out


def cocycle_from_json(G: FiniteGroup, data: dict) -> Cocycle3:
    """Entries are [g1, g2, g3, [num, den]]; omitted entries default to 1."""
    n = G.order
    table = np.empty((n, n, n), dtype=object)
    table[...] = Phase.one()
    for g1, g2, g3, (num, den) in data.get("entries", []):
        table[g1, g2, g3] = Phase(num, den)
    return validate_cocycle3(G, lambda a, b, c: table[a, b, c])


def load_cocycle(G: FiniteGroup, path: str | Path) -> Cocycle3:
    return cocycle_from_json(G, json.loads(Path(path).read_text()))
