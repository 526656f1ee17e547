"""Deterministic corpora: small monoids up to isomorphism, random valid
monoid tables found as closures inside map monoids, and random quantum
fixtures.  Everything is seeded, so repeated runs agree byte for byte.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CapacityError
from .linalg import (DEFAULT_TOL, HermitianOperator, TolerancePolicy,
                     hermitian_eig, orthonormalize)
from .monoid import FiniteMonoid, submonoid_closure, verify_associativity


def all_monoids_upto_iso(size: int) -> list[FiniteMonoid]:
    """All monoids of the exact size, one per isomorphism class, by brute
    force over tables with the identity fixed at index 0.  Practical for
    size <= 4."""
    if size < 1:
        raise CapacityError("size must be positive")
    if size > 4:
        raise CapacityError("exhaustive enumeration is capped at size 4")
    if size == 1:
        return [FiniteMonoid([[0]])]
    rest = range(1, size)
    perms = [dict(zip(rest, p)) for p in itertools.permutations(rest)]
    seen = set()
    out = []
    cells = [(i, j) for i in rest for j in rest]
    for choice in itertools.product(range(size), repeat=len(cells)):
        table = [[0] * size for _ in range(size)]
        for j in range(size):
            table[0][j] = j
            table[j][0] = j
        for (i, j), v in zip(cells, choice):
            table[i][j] = v
        m = FiniteMonoid(table)
        if not verify_associativity(m):
            continue
        canon = min(_relabelled(table, perm) for perm in perms)
        if canon in seen:
            continue
        seen.add(canon)
        out.append(FiniteMonoid([list(row) for row in canon]))
    return out


def _relabelled(table: Sequence[Sequence[int]], perm: dict[int, int]) -> tuple:
    full = {0: 0, **perm}
    inv = {v: k for k, v in full.items()}
    n = len(table)
    return tuple(tuple(full[table[inv[i]][inv[j]]] for j in range(n)) for i in range(n))


def small_monoids(max_size: int = 3) -> list[FiniteMonoid]:
    """All monoids of size <= max_size up to isomorphism."""
    out = []
    for n in range(1, max_size + 1):
        out.extend(all_monoids_upto_iso(n))
    return out


def _canonical_key(m: FiniteMonoid) -> tuple:
    n = m.size
    rest = [a for a in range(n) if a != m.identity]
    best = None
    for p in itertools.permutations(rest):
        full = {m.identity: 0, **{a: i + 1 for i, a in enumerate(p)}}
        inv = {v: k for k, v in full.items()}
        key = tuple(tuple(full[m.table[inv[i]][inv[j]]] for j in range(n))
                    for i in range(n))
        if best is None or key < best:
            best = key
    return (n, best)


def random_monoids(seed: int, count: int, sizes: Iterable[int] = (4, 5),
                   max_attempts: int = 20000) -> list[FiniteMonoid]:
    """Random valid monoid tables of the requested sizes, found by closing
    random generators inside map monoids and keeping closures whose size
    fits.  Results are deduplicated up to isomorphism."""
    rng = np.random.default_rng(seed)
    wanted = set(int(s) for s in sizes)
    found: list[FiniteMonoid] = []
    seen: set[tuple] = set()
    for _ in range(max_attempts):
        if len(found) >= count:
            break
        k = int(rng.integers(2, 5))
        n_gens = int(rng.integers(1, 3))
        gens = [tuple(int(x) for x in rng.integers(0, k, size=k))
                for _ in range(n_gens)]
        try:
            m = submonoid_closure(gens, k, max_size=64)
        except CapacityError:
            continue
        if m.size not in wanted:
            continue
        key = _canonical_key(m)
        if key in seen:
            continue
        seen.add(key)
        found.append(m)
    if len(found) < count:
        raise CapacityError(
            f"found only {len(found)} of {count} random monoids within budget")
    return found


def standard_monoid_corpus(seed: int = 2027, random_count: int = 45) -> list[FiniteMonoid]:
    """The verification corpus: every monoid of size <= 3 up to isomorphism
    followed by seeded random tables of sizes 4 and 5."""
    return small_monoids(3) + random_monoids(seed, random_count)


# ---------------------------------------------------------------------------
# Random quantum fixtures


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    for _ in range(20):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        q = orthonormalize(g, 1e-9)
        if q.shape[1] == dim:
            return q
    raise CapacityError("failed to draw a unitary")


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2.0


def random_projector(rng: np.random.Generator, dim: int,
                     rank: Optional[int] = None) -> np.ndarray:
    if rank is None:
        rank = int(rng.integers(1, dim))
    u = random_unitary(rng, dim)[:, :rank]
    return u @ u.conj().T


def random_labeled_hermitian(rng: np.random.Generator, dim: int,
                             values: Sequence[float],
                             tol: TolerancePolicy = DEFAULT_TOL) -> HermitianOperator:
    """A Hermitian operator whose spectrum is drawn from the value set."""
    u = random_unitary(rng, dim)
    labels = rng.choice(np.asarray(values, dtype=float), size=dim)
    matrix = u @ np.diag(labels.astype(complex)) @ u.conj().T
    return hermitian_eig(matrix, tol, snap_to=values)


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.real(np.trace(rho))
