"""Finite monoids and the Heyting algebra of their left ideals.

Elements of a monoid are the indices ``0..size-1``; the multiplication
table is stored densely.  Left ideals are bitmasks over element indices,
so all lattice operations are integer operations and every law can be
checked exhaustively at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import CapacityError, StructureError, UsageError

# Beyond this size, enumerate_left_ideals switches from subset filtering
# to closure generation from principal ideals.
SUBSET_ENUM_LIMIT = 12
IDEAL_COUNT_CAP = 1 << 16
MONOID_SIZE_CAP = 4096


class FiniteMonoid:
    """A multiplication table together with a designated identity.

    ``table[a][b]`` is the product ``a*b``.  Associativity is *not*
    enforced at construction (so that :func:`verify_associativity` can
    report violations); the identity row and column are.
    """

    __slots__ = ("size", "table", "identity", "names", "_reach", "_ideals")

    def __init__(self, table: Sequence[Sequence[int]], identity: int = 0,
                 names: Optional[Sequence[str]] = None):
        rows = tuple(tuple(int(x) for x in row) for row in table)
        size = len(rows)
        if size == 0:
            raise StructureError("multiplication table is empty")
        if size > MONOID_SIZE_CAP:
            raise CapacityError(f"monoid size {size} exceeds cap {MONOID_SIZE_CAP}")
        for row in rows:
            if len(row) != size:
                raise StructureError("multiplication table is not square")
            for x in row:
                if not 0 <= x < size:
                    raise StructureError(f"table entry {x} out of range 0..{size - 1}")
        if not 0 <= identity < size:
            raise StructureError(f"identity index {identity} out of range")
        for a in range(size):
            if rows[identity][a] != a or rows[a][identity] != a:
                raise StructureError("identity row/column is not the identity permutation")
        if names is not None:
            names = tuple(str(n) for n in names)
            if len(names) != size:
                raise StructureError("need exactly one name per element")
        self.size = size
        self.table = rows
        self.identity = identity
        self.names = names
        self._reach: Optional[tuple[int, ...]] = None
        self._ideals: Optional[tuple["LeftIdeal", ...]] = None

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def name_of(self, a: int) -> str:
        return self.names[a] if self.names is not None else str(a)

    def element_of(self, name: str) -> int:
        if self.names is not None and name in self.names:
            return self.names.index(name)
        try:
            a = int(name)
        except ValueError:
            raise UsageError(f"unknown element {name!r}") from None
        if not 0 <= a < self.size:
            raise UsageError(f"element index {a} out of range")
        return a

    def table_key(self) -> tuple:
        """Structural key (identity normalised to index 0); used for dedup."""
        perm = [self.identity] + [a for a in range(self.size) if a != self.identity]
        inv = {p: i for i, p in enumerate(perm)}
        return tuple(tuple(inv[self.table[perm[i]][perm[j]]] for j in range(self.size))
                     for i in range(self.size))

    def reach_masks(self) -> tuple[int, ...]:
        """For each element x, the bitmask of {m*x | m in M} (its principal left ideal)."""
        if self._reach is None:
            masks = []
            for x in range(self.size):
                mask = 0
                for m in range(self.size):
                    mask |= 1 << self.table[m][x]
                masks.append(mask)
            self._reach = tuple(masks)
        return self._reach

    def empty_ideal(self) -> "LeftIdeal":
        return LeftIdeal(self, 0)

    def full_ideal(self) -> "LeftIdeal":
        return LeftIdeal(self, (1 << self.size) - 1)

    def ideal(self, members: Iterable[int]) -> "LeftIdeal":
        mask = 0
        for i in members:
            if not 0 <= i < self.size:
                raise StructureError(f"element index {i} out of range")
            mask |= 1 << i
        return LeftIdeal(self, mask)

    def principal_ideal(self, x: int) -> "LeftIdeal":
        return LeftIdeal(self, self.reach_masks()[x])

    def __repr__(self):
        return f"FiniteMonoid(size={self.size})"


def verify_associativity(m: FiniteMonoid) -> bool:
    """Exhaustive check of ``(ab)c == a(bc)`` over all triples."""
    t = np.asarray(m.table, dtype=np.intp)
    # left[a,b,c] = (ab)c ; right[a,b,c] = a(bc)
    return bool(np.array_equal(t[t, :], t[:, t]))


def _is_ideal_mask(m: FiniteMonoid, mask: int) -> bool:
    acc = 0
    reach = m.reach_masks()
    rest = mask
    while rest:
        low = rest & -rest
        acc |= reach[low.bit_length() - 1]
        rest ^= low
    return acc | mask == mask


@dataclass(frozen=True)
class LeftIdeal:
    """A left ideal of a finite monoid, stored as a bitmask of members.

    Construction validates the ideal condition ``m*i in I`` for every
    element m and member i.
    """

    monoid: FiniteMonoid
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.monoid.size):
            raise StructureError("ideal mask out of range for this monoid")
        if not _is_ideal_mask(self.monoid, self.mask):
            raise StructureError("set is not a left ideal")

    @property
    def members(self) -> frozenset[int]:
        return frozenset(i for i in range(self.monoid.size) if self.mask >> i & 1)

    def member_names(self) -> tuple[str, ...]:
        return tuple(self.monoid.name_of(i) for i in sorted(self.members))

    def __contains__(self, elem: int) -> bool:
        return bool(self.mask >> elem & 1)

    def __len__(self):
        return self.mask.bit_count()

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def is_full(self) -> bool:
        return self.mask == (1 << self.monoid.size) - 1

    def _check_same(self, other: "LeftIdeal"):
        if self.monoid is not other.monoid:
            raise UsageError("ideals belong to different monoids")

    def __and__(self, other: "LeftIdeal") -> "LeftIdeal":
        self._check_same(other)
        return LeftIdeal(self.monoid, self.mask & other.mask)

    def __or__(self, other: "LeftIdeal") -> "LeftIdeal":
        self._check_same(other)
        return LeftIdeal(self.monoid, self.mask | other.mask)

    def __le__(self, other: "LeftIdeal") -> bool:
        self._check_same(other)
        return self.mask & ~other.mask == 0

    def __hash__(self):
        return hash((id(self.monoid), self.mask))

    def __repr__(self):
        names = ",".join(self.member_names())
        return f"LeftIdeal({{{names}}})"


def ideal_action(m: int, ideal: LeftIdeal) -> LeftIdeal:
    """The monoid action on ideals: the set of m' with ``m'*m`` in the ideal."""
    mon = ideal.monoid
    if not 0 <= m < mon.size:
        raise UsageError(f"element index {m} out of range")
    mask = 0
    for mp in range(mon.size):
        if ideal.mask >> mon.table[mp][m] & 1:
            mask |= 1 << mp
    return LeftIdeal(mon, mask)


def heyting_implies(lhs: LeftIdeal, rhs: LeftIdeal) -> LeftIdeal:
    """Relative pseudo-complement: the m with action(m, lhs) <= action(m, rhs)."""
    lhs._check_same(rhs)
    mon = lhs.monoid
    mask = 0
    for m in range(mon.size):
        amask = bmask = 0
        for mp in range(mon.size):
            prod = mon.table[mp][m]
            if lhs.mask >> prod & 1:
                amask |= 1 << mp
            if rhs.mask >> prod & 1:
                bmask |= 1 << mp
        if amask & ~bmask == 0:
            mask |= 1 << m
    return LeftIdeal(mon, mask)


def heyting_not(ideal: LeftIdeal) -> LeftIdeal:
    return heyting_implies(ideal, ideal.monoid.empty_ideal())


def enumerate_left_ideals(m: FiniteMonoid) -> list[LeftIdeal]:
    """All left ideals, sorted by (size, mask); always contains 0 and M."""
    if m._ideals is None:
        if m.size <= SUBSET_ENUM_LIMIT:
            masks = [mask for mask in range(1 << m.size) if _is_ideal_mask(m, mask)]
        else:
            masks = _ideals_by_closure(m)
        masks.sort(key=lambda k: (k.bit_count(), k))
        m._ideals = tuple(LeftIdeal(m, mask) for mask in masks)
    return list(m._ideals)


def _ideals_by_closure(m: FiniteMonoid) -> list[int]:
    # Every left ideal is a union of principal ideals, so close the set of
    # principal ideals under binary union.
    principal = sorted(set(m.reach_masks()))
    found = {0}
    frontier = list(principal)
    while frontier:
        mask = frontier.pop()
        if mask in found:
            continue
        found.add(mask)
        if len(found) > IDEAL_COUNT_CAP:
            raise CapacityError("ideal lattice exceeds configured cap")
        for p in principal:
            union = mask | p
            if union not in found:
                frontier.append(union)
    return list(found)


def map_monoid(k: int) -> FiniteMonoid:
    """The monoid of all self-maps of {0..k-1} under composition.

    Element i is the map whose value tuple is the i-th in lexicographic
    order; names are 'f' followed by the value digits (so on two points
    'f01' is the identity, 'f10' the swap, 'f00'/'f11' the constants).
    """
    if k < 1:
        raise StructureError("need at least one point")
    if k ** k > MONOID_SIZE_CAP:
        raise CapacityError(f"map monoid on {k} points exceeds size cap")
    maps = list(itertools.product(range(k), repeat=k))
    index = {f: i for i, f in enumerate(maps)}
    table = [[index[tuple(f[g[x]] for x in range(k))] for g in maps] for f in maps]
    identity = index[tuple(range(k))]
    names = ["f" + "".join(str(v) for v in f) for f in maps]
    return FiniteMonoid(table, identity=identity, names=names)


def map_monoid_values(k: int) -> list[tuple[int, ...]]:
    """Value tuples of map_monoid(k) elements, in element order."""
    return list(itertools.product(range(k), repeat=k))


def submonoid_closure(generator_maps: Iterable[tuple[int, ...]], k: int,
                      max_size: int = MONOID_SIZE_CAP) -> FiniteMonoid:
    """Smallest composition-closed monoid of self-maps of {0..k-1}
    containing the generators (the identity is always adjoined)."""
    ident = tuple(range(k))
    elems = {ident}
    frontier = [tuple(g) for g in generator_maps]
    for g in frontier:
        if len(g) != k or any(not 0 <= v < k for v in g):
            raise StructureError("generator is not a self-map of the point set")
        elems.add(g)
    changed = True
    while changed:
        changed = False
        current = sorted(elems)
        for f in current:
            for g in current:
                h = tuple(f[g[x]] for x in range(k))
                if h not in elems:
                    elems.add(h)
                    changed = True
                    if len(elems) > max_size:
                        raise CapacityError("closure exceeded size cap")
    ordered = sorted(elems)
    index = {f: i for i, f in enumerate(ordered)}
    table = [[index[tuple(f[g[x]] for x in range(k))] for g in ordered] for f in ordered]
    names = ["f" + "".join(str(v) for v in f) for f in ordered]
    return FiniteMonoid(table, identity=index[ident], names=names)


# ---------------------------------------------------------------------------
# Heyting law verification


HEYTING_LAW_NAMES = (
    "closure_meet", "closure_join", "closure_implies", "closure_not",
    "commutative", "associative", "idempotent", "absorption",
    "bounds", "distributive", "residuation",
)


def heyting_report(m: FiniteMonoid) -> dict:
    """Exhaustively verify the Heyting-algebra laws on the ideal lattice.

    Returns a dict with the ideal count, a pass/fail flag per law, and the
    list of ideals witnessing failure of excluded middle (join with their
    negation below the full ideal).
    """
    ideals = enumerate_left_ideals(m)
    masks = [i.mask for i in ideals]
    mask_set = set(masks)
    full = (1 << m.size) - 1
    laws = {name: True for name in HEYTING_LAW_NAMES}

    imp = {}
    neg = {}
    for a in ideals:
        for b in ideals:
            imp[a.mask, b.mask] = heyting_implies(a, b).mask
        neg[a.mask] = imp[a.mask, 0]

    for x in masks:
        if neg[x] not in mask_set:
            laws["closure_not"] = False
        if x & x != x or x | x != x:
            laws["idempotent"] = False
        if not (x & full == x and x | 0 == x and x | full == full and x & 0 == 0):
            laws["bounds"] = False
    for x in masks:
        for y in masks:
            if (x & y) not in mask_set:
                laws["closure_meet"] = False
            if (x | y) not in mask_set:
                laws["closure_join"] = False
            if imp[x, y] not in mask_set:
                laws["closure_implies"] = False
            if x & y != y & x or x | y != y | x:
                laws["commutative"] = False
            if x & (x | y) != x or x | (x & y) != x:
                laws["absorption"] = False
    for x in masks:
        for y in masks:
            for z in masks:
                if (x & y) & z != x & (y & z) or (x | y) | z != x | (y | z):
                    laws["associative"] = False
                if x & (y | z) != (x & y) | (x & z) or x | (y & z) != (x | y) & (x | z):
                    laws["distributive"] = False
                if ((z & x) & ~y == 0) != (z & ~imp[x, y] == 0):
                    laws["residuation"] = False

    witnesses = [LeftIdeal(m, x) for x in masks if x | neg[x] != full]
    return {
        "size": m.size,
        "ideal_count": len(ideals),
        "ideals": [i.member_names() for i in ideals],
        "laws": laws,
        "all_laws_hold": all(laws.values()),
        "excluded_middle_failures": [w.member_names() for w in witnesses],
    }
