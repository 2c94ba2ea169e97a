"""Automorphism groups, finite homogeneity, and amalgamation of
lattice-valued ultrametric spaces.

Homogeneity is checked literally: every isomorphism between induced
substructures must extend to a full automorphism, with no group-theoretic
shortcuts.  The amalgamation search enumerates, up to canonical labeling,
all pairs of extensions of a shared base, glues them with the canonical
amalgam (cross distance = meet over base points of the join of the two legs,
top over the empty base), and hunts for triangle violations.  A cross
distance of bottom identifies the two new points rather than failing: when
every triangle check passes, the rows of the identified points agree and the
quotient is a valid space, while inconsistent identification always surfaces
as a violated triangle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Optional, Union

import numpy as np

from . import kernels
from .lattice import FiniteLattice
from .spaces import (
    EqStructure,
    PartialMap,
    UltrametricSpace,
    Violation,
    induced_substructure,
    validate_umetric,
)

DEFAULT_POINT_CAP = 10
DEFAULT_AMALGAM_SIZE_CAP = 4

Structure = Union[EqStructure, UltrametricSpace]


# ---------------------------------------------------------------------------
# pair colorings: one encoding for both object kinds


def pair_colors(x: Structure) -> list[list[int]]:
    """Encode the full relational information as integer pair colors:
    automorphisms are exactly the colored-graph automorphisms."""
    n = x.n
    palette: dict[object, int] = {}
    colors = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if isinstance(x, EqStructure):
                key = tuple(part[i] == part[j] for part in x.relations)
            else:
                key = x.dist[i][j]
            if key not in palette:
                palette[key] = len(palette)
            colors[i][j] = palette[key]
    return colors


def _extend_to_full(colors, seed: dict[int, int]) -> Optional[list[int]]:
    """Backtracking extension of a partial point map to a color-preserving
    permutation; returns the first found in candidate order, or None."""
    n = len(colors)
    assigned = dict(seed)
    used = set(assigned.values())

    def consistent(i, c):
        for j, cj in assigned.items():
            if colors[i][j] != colors[c][cj] or colors[j][i] != colors[cj][c]:
                return False
        return colors[i][i] == colors[c][c]

    def backtrack():
        free = [i for i in range(n) if i not in assigned]
        if not free:
            return True
        i = free[0]
        for c in range(n):
            if c in used or not consistent(i, c):
                continue
            assigned[i] = c
            used.add(c)
            if backtrack():
                return True
            del assigned[i]
            used.remove(c)
        return False

    for i, c in seed.items():
        if not consistent(i, c):
            return None
    if backtrack():
        return [assigned[i] for i in range(n)]
    return None


def automorphisms(x: Structure, *, cap: int = DEFAULT_POINT_CAP) -> list[PartialMap]:
    """All structure-preserving bijections of x, by pruned backtracking."""
    if x.n > cap:
        raise ValueError(f"structure has {x.n} points, exceeding the cap of {cap}")
    colors = pair_colors(x)
    n = x.n
    found: list[list[int]] = []

    def backtrack(assigned: list[int], used: set[int]):
        i = len(assigned)
        if i == n:
            found.append(list(assigned))
            return
        for c in range(n):
            if c in used:
                continue
            if colors[i][i] != colors[c][c]:
                continue
            ok = True
            for j in range(i):
                if colors[i][j] != colors[c][assigned[j]] or colors[j][i] != colors[assigned[j]][c]:
                    ok = False
                    break
            if ok:
                assigned.append(c)
                used.add(c)
                backtrack(assigned, used)
                assigned.pop()
                used.remove(c)

    backtrack([], set())
    return [PartialMap(tuple((x.points[i], x.points[g[i]]) for i in range(n))) for g in found]


def is_homogeneous(x: Structure, *, cap: int = DEFAULT_POINT_CAP) -> tuple[bool, Optional[PartialMap]]:
    """Whether every isomorphism between induced substructures extends to an
    automorphism; on failure, returns the first non-extending partial
    isomorphism in order of increasing domain size."""
    if x.n > cap:
        raise ValueError(f"structure has {x.n} points, exceeding the cap of {cap}")
    colors = pair_colors(x)
    n = x.n
    for k in range(1, n + 1):
        for dom in combinations(range(n), k):
            for img in combinations(range(n), k):
                for perm in permutations(img):
                    if any(colors[a][a] != colors[b][b] for a, b in zip(dom, perm)):
                        continue
                    if any(colors[dom[s]][dom[t]] != colors[perm[s]][perm[t]]
                           for s in range(k) for t in range(k)):
                        continue
                    if _extend_to_full(colors, dict(zip(dom, perm))) is None:
                        witness = PartialMap(tuple((x.points[a], x.points[b]) for a, b in zip(dom, perm)))
                        return False, witness
    return True, None


# ---------------------------------------------------------------------------
# amalgamation


@dataclass(frozen=True)
class AmalgamInstance:
    """Two spaces extending a common base; the base may be empty, in which
    case it is None and the sides share no points."""

    base: Optional[UltrametricSpace]
    left: UltrametricSpace
    right: UltrametricSpace

    def problems(self) -> list[str]:
        out = []
        if self.left.value_lattice != self.right.value_lattice:
            out.append("left and right use different value lattices")
            return out
        base_points = self.base.points if self.base is not None else ()
        if self.base is not None and self.base.value_lattice != self.left.value_lattice:
            out.append("base uses a different value lattice")
            return out
        for side, name in ((self.left, "left"), (self.right, "right")):
            for p in base_points:
                if p not in side.points:
                    out.append(f"{name} side is missing base point {p!r}")
        if out:
            return out
        left_new = [p for p in self.left.points if p not in base_points]
        right_new = [p for p in self.right.points if p not in base_points]
        overlap = set(left_new) & set(right_new)
        if overlap:
            out.append(f"sides share non-base points {sorted(overlap)}")
        for side, name in ((self.left, "left"), (self.right, "right")):
            for p, q in combinations(base_points, 2):
                if side.d(p, q) != self.base.d(p, q):
                    out.append(f"{name} side disagrees with the base on ({p!r}, {q!r})")
        for space, name in ((self.base, "base"), (self.left, "left"), (self.right, "right")):
            if space is not None and not validate_umetric(space).passed:
                out.append(f"{name} space is not a valid ultrametric space")
        return out


def amalgamate(inst: AmalgamInstance) -> UltrametricSpace:
    """Glue the two sides over the base with the canonical cross distance.

    The result is not guaranteed to satisfy the metric axioms; callers must
    validate it.  A bottom cross distance means the two new points would be
    identified.
    """
    problems = inst.problems()
    if problems:
        raise ValueError(f"malformed amalgam instance: {problems[0]}")
    lat = inst.left.value_lattice
    base_points = list(inst.base.points) if inst.base is not None else []
    left_new = [p for p in inst.left.points if p not in base_points]
    right_new = [p for p in inst.right.points if p not in base_points]
    points = base_points + left_new + right_new
    index = {p: i for i, p in enumerate(points)}
    n = len(points)
    dist = [[lat.bottom] * n for _ in range(n)]

    def put(p, q, v):
        dist[index[p]][index[q]] = v
        dist[index[q]][index[p]] = v

    for p, q in combinations(inst.left.points, 2):
        put(p, q, inst.left.d(p, q))
    for p, q in combinations(inst.right.points, 2):
        put(p, q, inst.right.d(p, q))
    for b in left_new:
        for c in right_new:
            v = lat.top
            for a in base_points:
                v = lat.meet(v, lat.join(inst.left.d(b, a), inst.right.d(a, c)))
            put(b, c, v)
    return UltrametricSpace(lat, points, dist)


@dataclass
class AmalgamFailure:
    """A concrete instance whose canonical amalgam violates a triangle."""

    instance: AmalgamInstance
    amalgam: UltrametricSpace
    triple: tuple[str, str, str]

    def violation(self) -> Violation:
        x, y, z = self.triple
        return Violation("triangle", self.triple,
                         f"d({x},{y}) exceeds the join of d({x},{z}) and d({z},{y})")


@dataclass
class AmalgamationReport:
    lattice_label: str
    max_size: int
    bases_checked: int
    pairs_checked: int
    identifications: int
    failure: Optional[AmalgamFailure]

    @property
    def passed(self) -> bool:
        return self.failure is None

    def lines(self) -> list[str]:
        out = [
            f"amalgamation over {self.lattice_label}, sides up to {self.max_size} points",
            f"bases checked: {self.bases_checked} (bases of size <= 1 are always safe and counted analytically)",
            f"extension pairs checked: {self.pairs_checked}",
            f"point identifications (bottom cross distance): {self.identifications}",
        ]
        if self.failure is None:
            out.append("PASS no invalid amalgam found")
        else:
            x, y, z = self.failure.triple
            out.append(f"FAIL violated triangle ({x}, {y}, {z})")
        return out


def enumerate_valid_spaces(lat: FiniteLattice, size: int) -> np.ndarray:
    """All valid distance matrices on ``size`` points, up to relabeling
    (canonical representatives only), as an (N, size, size) id array."""
    base = np.zeros((0, 0), dtype=np.int64)
    return enumerate_extensions(lat, base, size)


def enumerate_extensions(lat: FiniteLattice, base: np.ndarray, k: int) -> np.ndarray:
    """All valid extensions of a valid base matrix by ``k`` new points, up to
    relabeling of the new points (canonical representatives only)."""
    a = base.shape[0]
    n = a + k
    leq, _, join = lat.tables64()
    values = [x for x in range(lat.n) if x != lat.bottom]
    entries = [(i, j) for i in range(n) for j in range(i + 1, n) if j >= a]
    grid = np.asarray(list(product(values, repeat=len(entries))), dtype=np.int64)
    mats = np.zeros((grid.shape[0], n, n), dtype=np.int64)
    if a:
        mats[:, :a, :a] = base
    for e, (i, j) in enumerate(entries):
        mats[:, i, j] = grid[:, e]
        mats[:, j, i] = grid[:, e]
    checks = kernels.triangle_checks(n, new_from=a)
    mats = mats[kernels.triangle_mask(mats, checks, leq, join)]
    perms = np.asarray(
        [list(range(a)) + list(p) for p in permutations(range(a, n))], dtype=np.int64)
    return mats[kernels.canonical_mask(mats, perms)]


def _scan(lat: FiniteLattice, max_size: int):
    """Shared engine behind the amalgamation property check and the failure
    search; deterministic scan order, first failure wins."""
    leq, meet, join = lat.tables64()
    bases_checked = 0
    pairs = 0
    ident = 0
    # bases of size 0 and 1 never produce a failure: the cross distance is
    # either top or a single join, and the triangle checks then follow from
    # validity of the two sides alone, with no distributivity involved.
    for a in range(2, max_size):
        for base in enumerate_valid_spaces(lat, a):
            bases_checked += 1
            exts = {k: enumerate_extensions(lat, base, k) for k in range(1, max_size - a + 1)}
            for kb in range(1, max_size - a + 1):
                for kc in range(kb, max_size - a + 1):
                    checks = kernels.cross_checks(a, kb, kc)
                    fb, fc, p, idn, t = kernels.scan_amalgam_pairs(
                        exts[kb], exts[kc], a, checks, leq, meet, join,
                        lat.bottom, lat.top, same_side=(kb == kc))
                    pairs += p
                    ident += idn
                    if fb >= 0:
                        failure = _build_failure(lat, base, exts[kb][fb], exts[kc][fc], a, checks[t])
                        return failure, bases_checked, pairs, ident
    return None, bases_checked, pairs, ident


def _point_names(a: int, kb: int, kc: int) -> list[str]:
    return ([f"a{i + 1}" for i in range(a)]
            + [f"b{i + 1}" for i in range(kb)]
            + [f"c{i + 1}" for i in range(kc)])


def _build_failure(lat, base_mat, left_mat, right_mat, a, check) -> AmalgamFailure:
    kb = left_mat.shape[0] - a
    kc = right_mat.shape[0] - a
    names = _point_names(a, kb, kc)
    base_names = names[:a]
    left_names = base_names + names[a:a + kb]
    right_names = base_names + names[a + kb:]
    base = None
    if a:
        base = UltrametricSpace(lat, base_names, [[int(v) for v in row] for row in base_mat])
    left = UltrametricSpace(lat, left_names, [[int(v) for v in row] for row in left_mat])
    right = UltrametricSpace(lat, right_names, [[int(v) for v in row] for row in right_mat])
    inst = AmalgamInstance(base, left, right)
    amalgam = amalgamate(inst)
    triple = tuple(names[int(i)] for i in check)
    return AmalgamFailure(inst, amalgam, triple)  # type: ignore[arg-type]


def check_amalgamation_property(lat: FiniteLattice, max_size: int = DEFAULT_AMALGAM_SIZE_CAP,
                                *, cap: int = DEFAULT_AMALGAM_SIZE_CAP,
                                label: Optional[str] = None) -> AmalgamationReport:
    """Exhaustively amalgamate all instances with sides up to ``max_size``
    points and report the first triangle violation, if any."""
    if max_size > cap:
        raise ValueError(f"max_size {max_size} exceeds the cap of {cap}")
    failure, bases, pairs, ident = _scan(lat, max_size)
    if failure is not None:
        _revalidate_failure(failure)
    return AmalgamationReport(
        lattice_label=label or f"{lat!r}",
        max_size=max_size,
        bases_checked=bases,
        pairs_checked=pairs,
        identifications=ident,
        failure=failure,
    )


def search_amalgam_failure(lat: FiniteLattice, max_size: int = DEFAULT_AMALGAM_SIZE_CAP,
                           *, cap: int = DEFAULT_AMALGAM_SIZE_CAP) -> Optional[AmalgamFailure]:
    """First failing instance in canonical scan order, independently
    re-validated, or None when the search exhausts without a failure."""
    if max_size > cap:
        raise ValueError(f"max_size {max_size} exceeds the cap of {cap}")
    failure, _, _, _ = _scan(lat, max_size)
    if failure is not None:
        _revalidate_failure(failure)
    return failure


def _revalidate_failure(failure: AmalgamFailure):
    """Confirm, through the plain object-level code path, that the reported
    triple genuinely violates the triangle inequality."""
    lat = failure.amalgam.value_lattice
    x, y, z = failure.triple
    d = failure.amalgam.d
    if lat.leq(d(x, y), lat.join(d(x, z), d(z, y))):
        raise CorruptWitness(f"reported triple {failure.triple} does not violate the triangle inequality")
    kinds = {v.kind for v in validate_umetric(failure.amalgam).violations}
    if "triangle" not in kinds:
        raise CorruptWitness("the amalgam of the reported instance validates")


class CorruptWitness(RuntimeError):
    """The kernel scan and the object-level re-validation disagreed."""


# ---------------------------------------------------------------------------
# index profiles


@dataclass(frozen=True)
class IndexProfileEntry:
    lower: str
    upper: str
    counts: tuple[int, ...]

    def line(self) -> str:
        body = " ".join(str(c) for c in self.counts)
        return f"cover {self.lower} < {self.upper} : {body}"


def index_profile(a: EqStructure) -> list[IndexProfileEntry]:
    """For each covering pair of the lattice, how many lower-relation classes
    each upper-relation class splits into.

    This is the finite shadow of an index condition on class splitting; no
    claim about infinite splitting is made or possible at this scale.
    """
    out = []
    for lo, hi in a.lattice.cover_pairs():
        plo, phi = a.relations[lo], a.relations[hi]
        counts = []
        for block in range(max(phi) + 1):
            subs = {plo[i] for i in range(a.n) if phi[i] == block}
            counts.append(len(subs))
        out.append(IndexProfileEntry(a.lattice.label_of(lo), a.lattice.label_of(hi), tuple(counts)))
    return out


# ---------------------------------------------------------------------------
# randomized amalgam instances (used by property tests)


def random_instance(lat: FiniteLattice, rng: random.Random, max_size: int = 4,
                    min_base: int = 0) -> AmalgamInstance:
    """A random valid instance, built by restricting two random extensions of
    a shared random base."""
    from .correspond import random_valid_space

    a = rng.randint(min_base, max_size - 1)
    kb = rng.randint(1, max_size - a)
    kc = rng.randint(1, max_size - a)
    names = _point_names(a, kb, kc)
    whole = random_valid_space(lat, a + kb + kc, rng, points=names)
    left = induced_substructure(whole, names[:a + kb])
    right_pts = names[:a] + names[a + kb:a + kb + kc]
    right = induced_substructure(whole, right_pts)
    base = induced_substructure(whole, names[:a]) if a else None
    return AmalgamInstance(base, left, right)
