"""The lattice of automorphism-invariant equivalence relations of a finite
structure.

At finite scale, invariance under all automorphisms is the exact analog of
first-order definability without parameters, and is what every function here
computes; reports and CLI output say "invariant" throughout.  Relations are
assembled as unions of pair orbits: the enumeration over orbital subsets is
exponential with a hard guard, and its exhaustiveness is itself the test
oracle for the lattice operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .homogeneity import DEFAULT_POINT_CAP, automorphisms
from .lattice import FiniteLattice, lattice_isomorphic
from .spaces import (
    EqStructure,
    UltrametricSpace,
    normalize_partition,
    partition_join,
    partition_meet,
    refines,
)

DEFAULT_ORBITAL_GUARD = 20

Structure = Union[EqStructure, UltrametricSpace]


@dataclass(frozen=True)
class OrbitalPartition:
    """Orbits of the automorphism group acting coordinatewise on ordered
    point pairs."""

    points: tuple[str, ...]
    blocks: tuple[frozenset[tuple[int, int]], ...]

    @property
    def count(self) -> int:
        return len(self.blocks)

    def orbit_of(self, i: int, j: int) -> int:
        for b, block in enumerate(self.blocks):
            if (i, j) in block:
                return b
        raise ValueError(f"pair ({i}, {j}) is not covered")

    def diagonal_ids(self) -> list[int]:
        return [b for b, block in enumerate(self.blocks) if any(i == j for i, j in block)]

    def transpose_partner(self, b: int) -> int:
        i, j = min(self.blocks[b])
        return self.orbit_of(j, i)


def orbitals(x: Structure, *, cap: int = DEFAULT_POINT_CAP) -> OrbitalPartition:
    """Pair orbits under the full automorphism group, in a deterministic
    order (by least pair)."""
    autos = automorphisms(x, cap=cap)
    n = x.n
    perms = []
    for g in autos:
        d = g.as_dict()
        perms.append([x.points.index(d[p]) for p in x.points])
    unassigned = {(i, j) for i in range(n) for j in range(n)}
    blocks = []
    while unassigned:
        seed = min(unassigned)
        orbit = {(g[seed[0]], g[seed[1]]) for g in perms}
        blocks.append(frozenset(orbit))
        unassigned -= orbit
    return OrbitalPartition(x.points, tuple(blocks))


def invariant_eq_lattice(x: Structure, *, cap: int = DEFAULT_POINT_CAP,
                         orbital_guard: int = DEFAULT_ORBITAL_GUARD
                         ) -> tuple[FiniteLattice, tuple[tuple[int, ...], ...]]:
    """All equivalence relations invariant under the automorphism group,
    as a lattice ordered by refinement.

    Returns the lattice plus the partition realizing each element; element 0
    is equality and the last element is the trivial relation.  The lattice
    operations are verified against partition intersection and the transitive
    closure of unions.
    """
    orbs = orbitals(x, cap=cap)
    if orbs.count > orbital_guard:
        raise ValueError(f"{orbs.count} orbitals exceed the enumeration guard of {orbital_guard}")
    n = x.n
    diag = set(orbs.diagonal_ids())
    nondiag = [b for b in range(orbs.count) if b not in diag]
    # group ids into transpose-closed classes so every union is symmetric
    classes = []
    seen = set()
    for b in nondiag:
        if b in seen:
            continue
        partner = orbs.transpose_partner(b)
        cls = {b, partner}
        seen |= cls
        classes.append(sorted(cls))

    partitions = set()
    for mask in range(1 << len(classes)):
        rel = [[False] * n for _ in range(n)]
        for i in range(n):
            rel[i][i] = True
        for c, cls in enumerate(classes):
            if mask >> c & 1:
                for b in cls:
                    for i, j in orbs.blocks[b]:
                        rel[i][j] = True
        if _is_transitive(rel):
            partitions.add(_partition_of_relation(rel))
    parts = sorted(partitions, key=lambda p: (-(max(p) + 1), p))
    index = {p: i for i, p in enumerate(parts)}
    names = [f"R{i}" for i in range(len(parts))]
    leq = [[refines(parts[i], parts[j]) for j in range(len(parts))] for i in range(len(parts))]
    lat = FiniteLattice(names, np.asarray(leq, dtype=bool))
    # the enumerated set must be closed under both lattice operations, and
    # the order-derived tables must agree with them
    for i in range(lat.n):
        for j in range(lat.n):
            m = partition_meet(parts[i], parts[j])
            jn = partition_join(parts[i], parts[j])
            if m not in index or jn not in index:
                raise RuntimeError("invariant relations are not closed under meet/join")
            if lat.meet(i, j) != index[m] or lat.join(i, j) != index[jn]:
                raise RuntimeError("lattice tables disagree with partition meet/join")
    return lat, tuple(parts)


def _is_transitive(rel) -> bool:
    n = len(rel)
    for i in range(n):
        for j in range(n):
            if not rel[i][j]:
                continue
            for k in range(n):
                if rel[j][k] and not rel[i][k]:
                    return False
    return True


def _partition_of_relation(rel) -> tuple[int, ...]:
    n = len(rel)
    assignment = [-1] * n
    blocks = 0
    for i in range(n):
        for j in range(i):
            if rel[i][j]:
                assignment[i] = assignment[j]
                break
        if assignment[i] == -1:
            assignment[i] = blocks
            blocks += 1
    return normalize_partition(assignment)


def invariant_relations_check(x: Structure, parts: Sequence[tuple[int, ...]],
                              *, cap: int = DEFAULT_POINT_CAP) -> bool:
    """Direct re-check, independent of the orbital construction: every listed
    partition is preserved blockwise by every automorphism."""
    autos = automorphisms(x, cap=cap)
    for g in autos:
        d = g.as_dict()
        perm = [x.points.index(d[p]) for p in x.points]
        for part in parts:
            moved = normalize_partition([part[perm.index(i)] for i in range(x.n)])
            base = normalize_partition(part)
            if _pairs_of(moved) != _pairs_of(base):
                return False
    return True


def _pairs_of(part):
    return {(i, j) for i in range(len(part)) for j in range(len(part)) if part[i] == part[j]}


def realizes(x: EqStructure, *, cap: int = DEFAULT_POINT_CAP) -> bool:
    """Whether the invariant-relation lattice of x is isomorphic to its index
    lattice via a map matching each element's relation exactly."""
    inv, parts = invariant_eq_lattice(x, cap=cap)
    if inv.n != x.lattice.n:
        return False
    candidates = []
    for e in range(inv.n):
        pool = [lam for lam in range(x.lattice.n) if x.relations[lam] == parts[e]]
        if not pool:
            return False
        candidates.append(pool)
    return lattice_isomorphic(inv, x.lattice, candidates=candidates) is not None
