"""Polar operations between rays and strings, the reducibility presheaf,
and sieve-valued contextual truth.

Polars are computed relative to explicit finite universes: a StringUniverse
(all strings up to a length bound whose reduction is non-null) and a RaySet
of candidate rays.  All Galois identities hold exactly for the restricted
relation "the string does not annihilate the ray".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContextError, PreconditionError, UsageError, ValidationError
from .linalg import (DEFAULT_TOL, HermitianOperator, Ray, Subspace, TolerancePolicy,
                     as_vector, image_subspace, in_subspace, operator_norm, ray_equal)
from .reduction import ProjectorAlphabet
from .strings import DEFAULT_STRING_BUDGET, Letters


class RaySet:
    """An ordered finite set of rays (duplicates up to phase rejected)."""

    def __init__(self, vectors: Sequence, tol: TolerancePolicy = DEFAULT_TOL):
        rays: list[Ray] = []
        for v in vectors:
            ray = v if isinstance(v, Ray) else Ray(v, tol)
            if any(ray.same_ray(r, tol) for r in rays):
                raise ValidationError("ray set contains a duplicate ray")
            rays.append(ray)
        self.rays = tuple(rays)
        self.tol = tol

    @property
    def dim(self) -> int:
        return self.rays[0].dim if self.rays else 0

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def index_of(self, vector_or_ray) -> int:
        ray = vector_or_ray if isinstance(vector_or_ray, Ray) else Ray(vector_or_ray, self.tol)
        for i, r in enumerate(self.rays):
            if r.same_ray(ray, self.tol):
                return i
        raise UsageError("ray is not in the set")

    def contains(self, vector_or_ray) -> bool:
        try:
            self.index_of(vector_or_ray)
            return True
        except UsageError:
            return False

    def subset(self, indices: Iterable[int]) -> "RaySet":
        picked = sorted(set(indices))
        out = RaySet([], self.tol)
        out.rays = tuple(self.rays[i] for i in picked)
        return out

    def is_subset_of(self, other: "RaySet") -> bool:
        return all(other.contains(r) for r in self.rays)


def in_sp0(alphabet: ProjectorAlphabet, letters: Sequence[str]) -> bool:
    """True iff the string's reduction is non-null (largest singular value
    above the null threshold)."""
    q = alphabet.monoid.check_string(letters)
    return operator_norm(alphabet.reduce(q), alphabet.tol) > alphabet.tol.null_threshold


class StringUniverse:
    """All strings up to a length bound with non-null reduction."""

    def __init__(self, alphabet: ProjectorAlphabet, max_len: int,
                 budget: int = DEFAULT_STRING_BUDGET):
        self.alphabet = alphabet
        self.max_len = int(max_len)
        members = []
        for q in alphabet.monoid.enumerate_strings(self.max_len, budget=budget):
            if in_sp0(alphabet, q):
                members.append(q)
        self.members = tuple(members)
        self._member_set = frozenset(members)

    @property
    def tol(self) -> TolerancePolicy:
        return self.alphabet.tol

    def __len__(self):
        return len(self.members)

    def __contains__(self, q) -> bool:
        return tuple(q) in self._member_set

    def check_subset(self, strings: Iterable[Letters]) -> tuple[Letters, ...]:
        out = []
        for q in strings:
            q = tuple(q)
            if q not in self._member_set:
                raise UsageError(f"string {q!r} is outside the universe")
            out.append(q)
        return tuple(out)


def _annihilates(alphabet: ProjectorAlphabet, q: Letters, ray: Ray) -> bool:
    image = alphabet.reduce(q) @ ray.representative
    return float(np.linalg.norm(image)) <= alphabet.tol.null_threshold


def polar_of_rays(xi: RaySet, universe: StringUniverse) -> tuple[Letters, ...]:
    """Strings of the universe annihilating no ray of the set (the arrows
    out of the set, relative to the universe)."""
    alphabet = universe.alphabet
    return tuple(q for q in universe.members
                 if all(not _annihilates(alphabet, q, ray) for ray in xi))


def polar_of_strings(universe: StringUniverse, strings: Iterable[Letters],
                     candidates: RaySet) -> RaySet:
    """Rays of the candidate set annihilated by no string of the given
    subset of the universe."""
    subset = universe.check_subset(strings)
    alphabet = universe.alphabet
    kept = [i for i, ray in enumerate(candidates.rays)
            if all(not _annihilates(alphabet, q, ray) for q in subset)]
    return candidates.subset(kept)


def closure_rays(xi: RaySet, universe: StringUniverse, candidates: RaySet) -> RaySet:
    """Double polar of a ray set relative to the two universes."""
    if not xi.is_subset_of(candidates):
        raise UsageError("ray set must lie inside the candidate universe")
    return polar_of_strings(universe, polar_of_rays(xi, universe), candidates)


def is_full(xi: RaySet, universe: StringUniverse, candidates: RaySet) -> bool:
    """A ray set is full when it equals its double polar."""
    closed = closure_rays(xi, universe, candidates)
    return len(closed) == len(xi) and xi.is_subset_of(closed)


def context_truth_equal(psi, phi, xi: RaySet, universe: StringUniverse) -> tuple[Letters, ...]:
    """Strings of the polar of the context merging the two rays; every
    image is non-null by construction of the polar."""
    alphabet = universe.alphabet
    v = as_vector(psi, alphabet.dim)
    w = as_vector(phi, alphabet.dim)
    if not (xi.contains(Ray(v, xi.tol)) and xi.contains(Ray(w, xi.tol))):
        raise ContextError("both states must lie in the context ray set")
    out = []
    for q in polar_of_rays(xi, universe):
        mat = alphabet.reduce(q)
        if ray_equal(mat @ v, mat @ w, alphabet.tol):
            out.append(q)
    return tuple(out)


def context_valuation(psi, op: HermitianOperator, delta, xi: RaySet,
                      universe: StringUniverse) -> tuple[Letters, ...]:
    """Strings of the polar of the context sending the state into the
    reduced eigenspace of the proposition."""
    alphabet = universe.alphabet
    v = as_vector(psi, alphabet.dim)
    if not xi.contains(Ray(v, xi.tol)):
        raise ContextError("the state must lie in the context ray set")
    target = op.eigenspace(delta, alphabet.tol)
    out = []
    for q in polar_of_rays(xi, universe):
        mat = alphabet.reduce(q)
        if in_subspace(mat @ v, image_subspace(mat, target, alphabet.tol), alphabet.tol):
            out.append(q)
    return tuple(out)


# ---------------------------------------------------------------------------
# The category of strings and the reducibility presheaf


@dataclass(frozen=True)
class Arrow:
    """A decomposition source = head * tail; the tail acts first."""

    source: Letters
    head: Letters
    tail: Letters

    def __post_init__(self):
        if self.head + self.tail != self.source:
            raise UsageError("arrow pieces do not recompose the source")


def arrows_out(alphabet: ProjectorAlphabet, letters: Sequence[str]) -> list[Arrow]:
    """The |Q|+1 decompositions of a non-null string, identity split first
    and the full split (empty head) last."""
    q = alphabet.monoid.check_string(letters)
    if not in_sp0(alphabet, q):
        raise PreconditionError("string reduces to the null operator")
    p = len(q)
    return [Arrow(q, q[:p - k], q[p - k:]) for k in range(p + 1)]


def compose_arrows(second: Arrow, first: Arrow) -> Arrow:
    """Composite of head-compatible arrows; tails concatenate."""
    if first.head != second.source:
        raise UsageError("arrows are not composable")
    return Arrow(first.source, second.head, second.tail + first.tail)


def reducible(alphabet: ProjectorAlphabet, letters: Sequence[str], psi) -> bool:
    """Membership in the reducibility presheaf at the string."""
    v = as_vector(psi, alphabet.dim)
    image = alphabet.reduce(alphabet.monoid.check_string(letters)) @ v
    return float(np.linalg.norm(image)) > alphabet.tol.null_threshold


def presheaf_at(alphabet: ProjectorAlphabet, letters: Sequence[str]):
    """The membership predicate of the presheaf at a string."""
    q = alphabet.monoid.check_string(letters)
    return lambda psi: reducible(alphabet, q, psi)


def presheaf_restrict(alphabet: ProjectorAlphabet, arrow: Arrow, psi) -> np.ndarray:
    """Apply the tail of an arrow to a vector reducible at the source; the
    result is reducible at the head."""
    if not reducible(alphabet, arrow.source, psi):
        raise PreconditionError("vector is not reducible at the arrow source")
    v = as_vector(psi, alphabet.dim)
    return alphabet.reduce(arrow.tail) @ v


# ---------------------------------------------------------------------------
# Sieves on string contexts


@dataclass(frozen=True)
class Sieve:
    """An upward-closed set of arrows out of a string context.

    The arrows out of a string form a chain, so a sieve is determined by
    the set of included tail lengths, which must be a final segment of
    {0..len(context)} (possibly empty).
    """

    context: Letters
    included_tail_lengths: frozenset[int]

    def __post_init__(self):
        p = len(self.context)
        ks = frozenset(int(k) for k in self.included_tail_lengths)
        if any(not 0 <= k <= p for k in ks):
            raise ValidationError("tail length out of range")
        if ks and set(range(min(ks), p + 1)) != set(ks):
            raise ValidationError("sieve is not upward closed")
        object.__setattr__(self, "included_tail_lengths", ks)

    @property
    def is_total(self) -> bool:
        return len(self.included_tail_lengths) == len(self.context) + 1

    @property
    def is_empty(self) -> bool:
        return not self.included_tail_lengths

    def tails(self) -> list[Letters]:
        p = len(self.context)
        return [self.context[p - k:] for k in sorted(self.included_tail_lengths)]

    def to_payload(self) -> dict:
        return {
            "context": list(self.context),
            "includedTailLengths": sorted(self.included_tail_lengths),
            "tails": [list(t) for t in self.tails()],
        }


def _sieve_from_flags(context: Letters, flags: Sequence[bool]) -> Sieve:
    included = {k for k, ok in enumerate(flags) if ok}
    # Upward closure is a theorem for the predicates used here; surface any
    # numeric violation instead of silently repairing it.
    sieve = Sieve(context, frozenset(included))
    return sieve


def sieve_truth_equal(alphabet: ProjectorAlphabet, psi, phi,
                      context: Sequence[str]) -> Sieve:
    """The sieve of tails of the context after which the two rays agree;
    defined only when both states are reducible at the context."""
    q = alphabet.monoid.check_string(context)
    v = as_vector(psi, alphabet.dim)
    w = as_vector(phi, alphabet.dim)
    if not (reducible(alphabet, q, v) and reducible(alphabet, q, w)):
        raise ContextError("both states must be reducible at the context")
    p = len(q)
    flags = []
    for k in range(p + 1):
        mat = alphabet.reduce(q[p - k:])
        flags.append(ray_equal(mat @ v, mat @ w, alphabet.tol))
    return _sieve_from_flags(q, flags)


def sieve_valuation(alphabet: ProjectorAlphabet, psi, op: HermitianOperator,
                    delta, context: Sequence[str]) -> Sieve:
    """The sieve of tails sending the state into the reduced eigenspace of
    the proposition."""
    q = alphabet.monoid.check_string(context)
    v = as_vector(psi, alphabet.dim)
    if not reducible(alphabet, q, v):
        raise ContextError("the state must be reducible at the context")
    target = op.eigenspace(delta, alphabet.tol)
    p = len(q)
    flags = []
    for k in range(p + 1):
        mat = alphabet.reduce(q[p - k:])
        flags.append(in_subspace(mat @ v, image_subspace(mat, target, alphabet.tol),
                                 alphabet.tol))
    return _sieve_from_flags(q, flags)
