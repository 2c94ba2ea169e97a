"""Carriers with lattice-indexed equivalence relations, and lattice-valued
ultrametric spaces.

Equivalence relations are stored as partitions in canonical block-index form
(one integer per point, blocks numbered by first appearance), which makes the
relation axioms structural and the meet of two relations a cheap blockwise
refinement.  Distance matrices hold value-lattice elements directly: integer
ids over a finite lattice, filter descriptors or rationals otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Optional, Sequence

from .lattice import FiniteLattice, LatticeError

# ---------------------------------------------------------------------------
# partitions in canonical block-index form


def normalize_partition(assignment: Sequence[int]) -> tuple[int, ...]:
    """Renumber block ids by first appearance."""
    seen: dict[int, int] = {}
    out = []
    for b in assignment:
        if b not in seen:
            seen[b] = len(seen)
        out.append(seen[b])
    return tuple(out)


def partition_from_blocks(blocks: Iterable[Iterable[str]], points: Sequence[str]) -> tuple[int, ...]:
    """Canonical partition from explicit blocks; blocks must be disjoint and
    cover the points."""
    index = {p: i for i, p in enumerate(points)}
    assignment = [-1] * len(points)
    for b, block in enumerate(blocks):
        block = list(block)
        if not block:
            raise ValueError("empty partition block")
        for p in block:
            p = str(p)
            if p not in index:
                raise ValueError(f"unknown point {p!r} in partition block")
            if assignment[index[p]] != -1:
                raise ValueError(f"point {p!r} appears in two partition blocks")
            assignment[index[p]] = b
    if -1 in assignment:
        missing = points[assignment.index(-1)]
        raise ValueError(f"partition does not cover point {missing!r}")
    return normalize_partition(assignment)


def partition_blocks(part: Sequence[int]) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(max(part) + 1)] if part else []
    for i, b in enumerate(part):
        out[b].append(i)
    return out


def same_block(part: Sequence[int], i: int, j: int) -> bool:
    return part[i] == part[j]


def partition_meet(p1: Sequence[int], p2: Sequence[int]) -> tuple[int, ...]:
    """Common refinement: x ~ y iff related in both."""
    return normalize_partition([p1[i] * (max(p2) + 1) + p2[i] for i in range(len(p1))])


def partition_join(p1: Sequence[int], p2: Sequence[int]) -> tuple[int, ...]:
    """Finest common coarsening: transitive closure of the union."""
    n = len(p1)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for part in (p1, p2):
        first: dict[int, int] = {}
        for i, b in enumerate(part):
            if b in first:
                union(first[b], i)
            else:
                first[b] = i
    return normalize_partition([find(i) for i in range(n)])


def refines(p1: Sequence[int], p2: Sequence[int]) -> bool:
    """Whether every block of p1 lies inside a block of p2."""
    image: dict[int, int] = {}
    for i in range(len(p1)):
        if p1[i] in image:
            if image[p1[i]] != p2[i]:
                return False
        else:
            image[p1[i]] = p2[i]
    return True


def equality_partition(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def trivial_partition(n: int) -> tuple[int, ...]:
    return (0,) * n


# ---------------------------------------------------------------------------
# validation reports


@dataclass
class Violation:
    kind: str
    witness: tuple
    message: str

    def line(self) -> str:
        parts = " ".join(str(w) for w in self.witness)
        return f"VIOLATION {self.kind} {parts} :: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        if self.passed:
            return ["OK"]
        return [v.line() for v in self.violations]


# ---------------------------------------------------------------------------
# structures with lattice-indexed equivalence relations


class EqStructure:
    """A finite carrier with one partition per element of a finite lattice."""

    def __init__(self, lattice: FiniteLattice, points: Sequence[str],
                 relations: Mapping[object, Iterable[Iterable[str]]]):
        """Build from explicit blocks.

        ``relations`` maps a lattice element (label or id) to its blocks; an
        entry is required for every element except bottom and top, which
        default to equality and the trivial relation.
        """
        points = tuple(str(p) for p in points)
        _check_points(points)
        n = len(points)
        parts: list[Optional[tuple[int, ...]]] = [None] * lattice.n
        for key, blocks in relations.items():
            x = key if isinstance(key, int) else lattice.index_of(key)
            parts[x] = partition_from_blocks(blocks, points)
        for x in range(lattice.n):
            if parts[x] is None:
                if x == lattice.bottom:
                    parts[x] = equality_partition(n)
                elif x == lattice.top:
                    parts[x] = trivial_partition(n)
                else:
                    raise ValueError(f"missing relation for element {lattice.label_of(x)!r}")
        self.lattice = lattice
        self.points = points
        self.relations: tuple[tuple[int, ...], ...] = tuple(parts)  # type: ignore[arg-type]

    @classmethod
    def from_partitions(cls, lattice: FiniteLattice, points: Sequence[str],
                        parts: Sequence[Sequence[int]]) -> "EqStructure":
        """Internal fast path from canonical partitions, one per element id."""
        obj = cls.__new__(cls)
        obj.lattice = lattice
        obj.points = tuple(str(p) for p in points)
        _check_points(obj.points)
        if len(parts) != lattice.n:
            raise ValueError("need one partition per lattice element")
        obj.relations = tuple(normalize_partition(p) for p in parts)
        return obj

    @property
    def n(self) -> int:
        return len(self.points)

    def point_index(self, p: str) -> int:
        try:
            return self.points.index(str(p))
        except ValueError:
            raise ValueError(f"unknown point {p!r}") from None

    def related(self, element: int, p: str, q: str) -> bool:
        part = self.relations[element]
        return part[self.point_index(p)] == part[self.point_index(q)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EqStructure)
            and self.lattice == other.lattice
            and self.points == other.points
            and self.relations == other.relations
        )

    def __hash__(self) -> int:
        return hash((self.lattice, self.points, self.relations))

    def __repr__(self) -> str:
        return f"EqStructure({self.n} points over {self.lattice!r})"


def _check_points(points: tuple[str, ...]):
    if not points:
        raise ValueError("the carrier must be nonempty")
    if len(set(points)) != len(points):
        raise ValueError("point labels must be distinct")


def validate_eqstruct(a: EqStructure) -> ValidationReport:
    """Check the defining invariants; an empty report means valid."""
    report = ValidationReport()
    lat, n = a.lattice, a.n
    bot_part = a.relations[lat.bottom]
    if bot_part != equality_partition(n):
        i, j = _first_related_pair(bot_part)
        report.violations.append(Violation(
            "bottom-not-equality", (a.points[i], a.points[j]),
            "the bottom relation relates two distinct points"))
    top_part = a.relations[lat.top]
    if top_part != trivial_partition(n):
        i, j = _first_unrelated_pair(top_part)
        report.violations.append(Violation(
            "top-not-trivial", (a.points[i], a.points[j]),
            "the top relation fails to relate a pair"))
    for x in range(lat.n):
        for y in range(x, lat.n):
            want = partition_meet(a.relations[x], a.relations[y])
            got = a.relations[lat.meet(x, y)]
            if want != got:
                i, j = _first_pair_difference(want, got)
                report.violations.append(Violation(
                    "meet-preservation",
                    (lat.label_of(x), lat.label_of(y), a.points[i], a.points[j]),
                    f"relation at {lat.label_of(lat.meet(x, y))!r} differs from the "
                    f"intersection of the relations at {lat.label_of(x)!r} and {lat.label_of(y)!r}"))
    return report


def _first_related_pair(part):
    for i, j in combinations(range(len(part)), 2):
        if part[i] == part[j]:
            return i, j
    raise AssertionError("no related pair")


def _first_unrelated_pair(part):
    for i, j in combinations(range(len(part)), 2):
        if part[i] != part[j]:
            return i, j
    raise AssertionError("no unrelated pair")


def _first_pair_difference(p1, p2):
    for i, j in combinations(range(len(p1)), 2):
        if (p1[i] == p1[j]) != (p2[i] == p2[j]):
            return i, j
    raise AssertionError("partitions agree on all pairs")


# ---------------------------------------------------------------------------
# lattice-valued ultrametric spaces


class UltrametricSpace:
    """A finite carrier with a symmetric lattice-valued distance matrix.

    The constructor checks shape and element membership only; the metric
    axioms are the business of :func:`validate_umetric`, so invalid spaces
    (e.g. raw amalgams) remain representable.
    """

    def __init__(self, value_lattice, points: Sequence[str], dist: Sequence[Sequence]):
        points = tuple(str(p) for p in points)
        _check_points(points)
        n = len(points)
        if len(dist) != n or any(len(row) != n for row in dist):
            raise ValueError(f"distance matrix must be {n}x{n}")
        for row in dist:
            for v in row:
                if not value_lattice.contains(v):
                    raise LatticeError(f"{v!r} is not an element of the value lattice")
        self.value_lattice = value_lattice
        self.points = points
        self.dist: tuple[tuple, ...] = tuple(tuple(row) for row in dist)

    @classmethod
    def from_upper(cls, value_lattice, points: Sequence[str],
                   entries: Mapping[tuple[str, str], object]) -> "UltrametricSpace":
        """Build from upper-triangle entries keyed by point-label pairs;
        the diagonal is bottom and symmetry is automatic."""
        points = tuple(str(p) for p in points)
        index = {p: i for i, p in enumerate(points)}
        n = len(points)
        bottom = value_lattice.bottom
        mat = [[bottom] * n for _ in range(n)]
        seen = set()
        for (p, q), v in entries.items():
            p, q = str(p), str(q)
            if p not in index or q not in index:
                raise ValueError(f"unknown point in distance entry ({p!r}, {q!r})")
            i, j = index[p], index[q]
            if i == j:
                raise ValueError(f"distance entry on the diagonal at {p!r}")
            mat[i][j] = mat[j][i] = v
            seen.add((min(i, j), max(i, j)))
        for i, j in combinations(range(n), 2):
            if (i, j) not in seen:
                raise ValueError(f"missing distance for pair ({points[i]!r}, {points[j]!r})")
        return cls(value_lattice, points, mat)

    @property
    def n(self) -> int:
        return len(self.points)

    def point_index(self, p: str) -> int:
        try:
            return self.points.index(str(p))
        except ValueError:
            raise ValueError(f"unknown point {p!r}") from None

    def d(self, p: str, q: str):
        return self.dist[self.point_index(p)][self.point_index(q)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UltrametricSpace)
            and self.value_lattice == other.value_lattice
            and self.points == other.points
            and self.dist == other.dist
        )

    def __hash__(self) -> int:
        return hash((self.value_lattice, self.points, self.dist))

    def __repr__(self) -> str:
        return f"UltrametricSpace({self.n} points over {self.value_lattice!r})"


def validate_umetric(m: UltrametricSpace) -> ValidationReport:
    """Check symmetry, the identity axiom, and the join-form triangle
    inequality; an empty report means valid."""
    report = ValidationReport()
    lat = m.value_lattice
    n = m.n
    bottom = lat.bottom
    for i in range(n):
        for j in range(i, n):
            if m.dist[i][j] != m.dist[j][i]:
                report.violations.append(Violation(
                    "asymmetry", (m.points[i], m.points[j]),
                    "distance matrix is not symmetric"))
            if i == j and m.dist[i][i] != bottom:
                report.violations.append(Violation(
                    "diagonal", (m.points[i],),
                    "self-distance differs from bottom"))
            if i != j and m.dist[i][j] == bottom:
                report.violations.append(Violation(
                    "identity", (m.points[i], m.points[j]),
                    "distinct points at distance bottom"))
    for i, j, k in combinations(range(n), 3):
        for (x, y, z) in ((i, j, k), (i, k, j), (j, k, i)):
            dxy, dxz, dzy = m.dist[x][y], m.dist[x][z], m.dist[z][y]
            if not lat.leq(dxy, lat.join(dxz, dzy)):
                report.violations.append(Violation(
                    "triangle", (m.points[x], m.points[y], m.points[z]),
                    f"d({m.points[x]},{m.points[y]}) exceeds the join of the other two sides"))
    return report


def chain_max_form_violations(dist: Sequence[Sequence[int]]) -> list[tuple]:
    """Classical ultrametric check for totally ordered numeric values:
    zero diagonal, symmetry, and d(x,y) <= max(d(x,z), d(y,z)).

    Independent of any lattice tables; used to cross-check chain-valued
    spaces against :func:`validate_umetric`.
    """
    n = len(dist)
    bad = []
    for i in range(n):
        for j in range(i, n):
            if dist[i][j] != dist[j][i]:
                bad.append(("asymmetry", i, j))
            if i == j and dist[i][i] != 0:
                bad.append(("diagonal", i))
            if i != j and dist[i][j] == 0:
                bad.append(("identity", i, j))
    for i, j, k in combinations(range(n), 3):
        for (x, y, z) in ((i, j, k), (i, k, j), (j, k, i)):
            if dist[x][y] > max(dist[x][z], dist[z][y]):
                bad.append(("triangle", x, y, z))
    return bad


# ---------------------------------------------------------------------------
# substructures and morphisms


def induced_substructure(x, subset: Iterable[str]):
    """Restriction of a structure or space to a nonempty subset of points,
    keeping the ambient point order."""
    wanted = [str(p) for p in subset]
    if not wanted:
        raise ValueError("cannot restrict to the empty point set")
    for p in wanted:
        if p not in x.points:
            raise ValueError(f"unknown point {p!r}")
    keep = [i for i, p in enumerate(x.points) if p in set(wanted)]
    points = [x.points[i] for i in keep]
    if isinstance(x, EqStructure):
        parts = [normalize_partition([part[i] for i in keep]) for part in x.relations]
        return EqStructure.from_partitions(x.lattice, points, parts)
    if isinstance(x, UltrametricSpace):
        mat = [[x.dist[i][j] for j in keep] for i in keep]
        return UltrametricSpace(x.value_lattice, points, mat)
    raise TypeError(f"cannot restrict {type(x).__name__}")


@dataclass(frozen=True)
class PartialMap:
    """A finite injective partial map between point sets."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        pairs = tuple((str(a), str(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        sources = [a for a, _ in pairs]
        targets = [b for _, b in pairs]
        if len(set(sources)) != len(sources):
            raise ValueError("partial map sources must be distinct")
        if len(set(targets)) != len(targets):
            raise ValueError("partial map must be injective")

    @classmethod
    def from_dict(cls, mapping: Mapping[str, str]) -> "PartialMap":
        return cls(tuple(sorted(mapping.items())))

    @staticmethod
    def identity(points: Iterable[str]) -> "PartialMap":
        return PartialMap(tuple((str(p), str(p)) for p in points))

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.pairs)

    @property
    def image(self) -> tuple[str, ...]:
        return tuple(b for _, b in self.pairs)

    def apply(self, p: str) -> str:
        d = self.as_dict()
        if str(p) not in d:
            raise ValueError(f"{p!r} is not in the domain")
        return d[str(p)]

    def compose(self, first: "PartialMap") -> "PartialMap":
        """self after first, restricted to where the composite is defined."""
        d = self.as_dict()
        return PartialMap(tuple((a, d[b]) for a, b in first.pairs if b in d))

    def inverse(self) -> "PartialMap":
        return PartialMap(tuple(sorted((b, a) for a, b in self.pairs)))

    def is_total_on(self, points: Iterable[str]) -> bool:
        return set(self.domain) >= {str(p) for p in points}

    def __repr__(self) -> str:
        body = " ".join(f"{a}->{b}" for a, b in self.pairs)
        return f"PartialMap({body})"


def is_embedding(f: PartialMap, a: EqStructure, b: EqStructure) -> tuple[bool, Optional[tuple]]:
    """Whether f is a relation-preserving embedding of a into b.

    Returns (verdict, witness); the witness names the first (element, x, y)
    where the two sides disagree.
    """
    if a.lattice != b.lattice:
        raise LatticeError("the two structures live over different lattices")
    if not f.is_total_on(a.points):
        raise ValueError("the map must be total on the source points")
    fmap = f.as_dict()
    for p in a.points:
        if fmap[p] not in b.points:
            raise ValueError(f"target point {fmap[p]!r} is not in the codomain")
    for lam in range(a.lattice.n):
        for p, q in combinations(a.points, 2):
            if a.related(lam, p, q) != b.related(lam, fmap[p], fmap[q]):
                return False, (a.lattice.label_of(lam), p, q)
    return True, None


def is_isometry(f: PartialMap, m: UltrametricSpace, n: UltrametricSpace) -> tuple[bool, Optional[tuple]]:
    """Whether f preserves all distances; witness is (x, y, d_source, d_target)."""
    if m.value_lattice != n.value_lattice:
        raise LatticeError("the two spaces have different value lattices")
    if not f.is_total_on(m.points):
        raise ValueError("the map must be total on the source points")
    fmap = f.as_dict()
    for p in m.points:
        if fmap[p] not in n.points:
            raise ValueError(f"target point {fmap[p]!r} is not in the codomain")
    for p, q in combinations(m.points, 2):
        dm = m.d(p, q)
        dn = n.d(fmap[p], fmap[q])
        if dm != dn:
            return False, (p, q, dm, dn)
    return True, None


# ---------------------------------------------------------------------------
# worked-example generators


def gen_boolean_example(n: int, *, cap: int = 6) -> EqStructure:
    """Binary strings of length n over the boolean lattice with n atoms.

    The relation at an atom-set element holds between two strings exactly
    when they agree on every coordinate outside that set, so each co-atom
    carries agreement in one coordinate and meets of co-atoms specify
    agreement in several.
    """
    from .lattice import boolean_lattice

    if not 1 <= n <= cap:
        raise ValueError(f"n must be between 1 and {cap}")
    lat = boolean_lattice(n)
    points = ["".join(bits) for bits in product("01", repeat=n)]
    parts = []
    for mask in range(lat.n):
        coords = [i for i in range(n) if not mask >> i & 1]
        parts.append(normalize_partition([_proj_key(p, coords, n) for p in points]))
    return EqStructure.from_partitions(lat, points, parts)


def _proj_key(point: str, coords: list[int], n: int) -> int:
    key = 0
    for c in coords:
        key = key * 2 + (1 if point[c] == "1" else 0)
    return key


def gen_degenerate(lat: FiniteLattice, k: int, points: Optional[Sequence[str]] = None) -> EqStructure:
    """Equality at every element below top, the trivial relation at top."""
    if k < 2:
        raise ValueError("the degenerate structure needs at least two points")
    if points is None:
        points = [f"p{i + 1}" for i in range(k)]
    else:
        points = [str(p) for p in points]
        if len(points) != k:
            raise ValueError("point list length must equal k")
    parts = [equality_partition(k)] * lat.n
    parts = list(parts)
    parts[lat.top] = trivial_partition(k)
    return EqStructure.from_partitions(lat, points, parts)


def gen_affine_m3() -> EqStructure:
    """Four points carrying the three direction partitions of the affine
    plane over the two-element field, indexed by the diamond lattice."""
    from .lattice import catalog

    lat = catalog("m3")
    points = ["00", "01", "10", "11"]
    blocks = {
        "a": [["00", "01"], ["10", "11"]],          # first coordinate
        "b": [["00", "10"], ["01", "11"]],          # second coordinate
        "c": [["00", "11"], ["01", "10"]],          # coordinate sum
    }
    return EqStructure(lat, points, blocks)


def label_map_is_lattice_homomorphism(a: EqStructure) -> bool:
    """Whether element -> relation preserves joins as well as meets, with
    joins taken in the lattice of all equivalence relations."""
    lat = a.lattice
    for x in range(lat.n):
        for y in range(lat.n):
            if partition_meet(a.relations[x], a.relations[y]) != a.relations[lat.meet(x, y)]:
                return False
            if partition_join(a.relations[x], a.relations[y]) != a.relations[lat.join(x, y)]:
                return False
    return True
