"""The canonical bijection between equivalence-relation structures and
filter-valued ultrametric spaces, with morphism and homogeneity transfer.

For a structure over a finite lattice, the distance between two points is the
filter of elements whose relations hold between them: a principal filter at
the meet of those elements.  In the reverse direction a relation holds at an
element exactly when that element belongs to the distance filter.  The two
maps are mutually inverse and preserve embeddings/isometries, which is
re-asserted here on every conversion in checked builds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Union

from .filters import FilterLattice
from .lattice import FiniteLattice, LatticeError
from .spaces import (
    EqStructure,
    PartialMap,
    UltrametricSpace,
    is_embedding,
    is_isometry,
    normalize_partition,
    validate_eqstruct,
    validate_umetric,
)


class CorrespondenceError(RuntimeError):
    """A transfer law that the construction guarantees was observed to fail;
    this always indicates an implementation bug."""


def _require_valid_structure(a: EqStructure):
    report = validate_eqstruct(a)
    if not report.passed:
        raise ValueError(f"invalid structure: {report.lines()[0]}")


def _require_valid_space(m: UltrametricSpace):
    report = validate_umetric(m)
    if not report.passed:
        raise ValueError(f"invalid space: {report.lines()[0]}")


def to_metric(a: EqStructure) -> UltrametricSpace:
    """Distance matrix of a structure, valued in the filter lattice.

    The distance between x and y is the principal filter at the meet of all
    elements whose relation holds between x and y (the relation at top always
    holds, so the set is never empty).
    """
    _require_valid_structure(a)
    lat = a.lattice
    phi = FilterLattice(lat)
    n = a.n
    dist = [[phi.bottom] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            holding = [lam for lam in range(lat.n) if a.relations[lam][i] == a.relations[lam][j]]
            dist[i][j] = dist[j][i] = phi.embed(reduce(lat.meet, holding))
    out = UltrametricSpace(phi, a.points, dist)
    assert validate_umetric(out).passed, "conversion produced an invalid space"
    return out


def to_eq(m: UltrametricSpace) -> EqStructure:
    """Recover the structure whose relation at an element holds exactly when
    that element belongs to the distance filter."""
    phi = m.value_lattice
    if not isinstance(phi, FilterLattice) or not isinstance(phi.base, FiniteLattice):
        raise LatticeError("the value lattice must be the filter lattice of a finite lattice")
    _require_valid_space(m)
    lat = phi.base
    n = m.n
    parts = []
    for lam in range(lat.n):
        related = [[m.dist[i][j].member(lam) for j in range(n)] for i in range(n)]
        parts.append(_partition_from_relation(related))
    out = EqStructure.from_partitions(lat, m.points, parts)
    assert validate_eqstruct(out).passed, "conversion produced an invalid structure"
    return out


def _partition_from_relation(related) -> tuple[int, ...]:
    """Blocks of a reflexive-symmetric-transitive boolean relation."""
    n = len(related)
    assignment = [-1] * n
    blocks = 0
    for i in range(n):
        for j in range(i):
            if related[i][j]:
                assignment[i] = assignment[j]
                break
        if assignment[i] == -1:
            assignment[i] = blocks
            blocks += 1
    return normalize_partition(assignment)


def as_base_valued(m: UltrametricSpace) -> UltrametricSpace:
    """Convenience view of a filter-valued space with distances replaced by
    the minima of the (principal) filters."""
    phi = m.value_lattice
    if not isinstance(phi, FilterLattice) or not isinstance(phi.base, FiniteLattice):
        raise LatticeError("only filter-valued spaces over a finite base have this view")
    dist = [[phi.min_of(v) for v in row] for row in m.dist]
    return UltrametricSpace(phi.base, m.points, dist)


def as_filter_valued(m: UltrametricSpace) -> UltrametricSpace:
    """Inverse view: lift a space over a finite lattice along the principal
    embedding."""
    lat = m.value_lattice
    if not isinstance(lat, FiniteLattice):
        raise LatticeError("only spaces over a finite lattice can be lifted")
    phi = FilterLattice(lat)
    dist = [[phi.embed(v) for v in row] for row in m.dist]
    return UltrametricSpace(phi, m.points, dist)


def roundtrip_check(x: Union[EqStructure, UltrametricSpace]) -> bool:
    """Whether converting there and back returns a component-wise equal object."""
    if isinstance(x, EqStructure):
        return to_eq(to_metric(x)) == x
    if isinstance(x, UltrametricSpace):
        return to_metric(to_eq(x)) == x
    raise TypeError(f"cannot round-trip {type(x).__name__}")


def verify_morphism_transfer(f: PartialMap, a: EqStructure, b: EqStructure) -> bool:
    """Embedding verdict for f, asserted equal to the isometry verdict of f
    between the corresponding spaces."""
    emb, emb_witness = is_embedding(f, a, b)
    iso, iso_witness = is_isometry(f, to_metric(a), to_metric(b))
    if emb != iso:
        raise CorrespondenceError(
            f"embedding verdict {emb} (witness {emb_witness}) disagrees with "
            f"isometry verdict {iso} (witness {iso_witness})")
    return emb


@dataclass
class TransferReport:
    structure_homogeneous: bool
    metric_homogeneous: bool
    structure_witness: Optional[PartialMap]
    metric_witness: Optional[PartialMap]

    @property
    def agree(self) -> bool:
        return self.structure_homogeneous == self.metric_homogeneous


def homogeneity_transfer(a: EqStructure) -> TransferReport:
    """Homogeneity verdicts of a structure and of its distance space; the two
    must agree, and a disagreement is reported as an implementation bug."""
    from .homogeneity import is_homogeneous

    _require_valid_structure(a)
    sv, sw = is_homogeneous(a)
    mv, mw = is_homogeneous(to_metric(a))
    report = TransferReport(sv, mv, sw, mw)
    if not report.agree:
        raise CorrespondenceError(
            f"homogeneity verdicts disagree: structure={sv} (witness {sw}), "
            f"space={mv} (witness {mw})")
    return report


# ---------------------------------------------------------------------------
# randomized valid objects


def random_valid_space(lat: FiniteLattice, n_points: int, rng: random.Random,
                       points=None) -> UltrametricSpace:
    """A random valid space over a finite lattice.

    Samples nonzero distances, then repairs triangle violations by joining
    the two offending legs upward until a fixed point; entries only increase,
    so the loop terminates.
    """
    if n_points < 1:
        raise ValueError("need at least one point")
    if points is None:
        points = [f"x{i + 1}" for i in range(n_points)]
    nonzero = [x for x in lat.elements() if x != lat.bottom]
    if not nonzero and n_points > 1:
        raise LatticeError("a one-element lattice admits only one-point spaces")
    dist = [[lat.bottom] * n_points for _ in range(n_points)]
    for i in range(n_points):
        for j in range(i + 1, n_points):
            dist[i][j] = dist[j][i] = rng.choice(nonzero)
    changed = True
    while changed:
        changed = False
        for i in range(n_points):
            for j in range(i + 1, n_points):
                for k in range(n_points):
                    if k == i or k == j:
                        continue
                    if not lat.leq(dist[i][j], lat.join(dist[i][k], dist[k][j])):
                        dist[i][k] = dist[k][i] = lat.join(dist[i][k], dist[i][j])
                        dist[k][j] = dist[j][k] = lat.join(dist[k][j], dist[i][j])
                        changed = True
    out = UltrametricSpace(lat, points, dist)
    assert validate_umetric(out).passed
    return out


def random_valid_eqstructure(lat: FiniteLattice, n_points: int, rng: random.Random) -> EqStructure:
    """A random valid structure, obtained from a random valid space."""
    return to_eq(as_filter_valued(random_valid_space(lat, n_points, rng)))


def random_injection(rng: random.Random, sources, targets) -> PartialMap:
    """A random total injective map from sources into targets."""
    sources = list(sources)
    targets = list(targets)
    if len(targets) < len(sources):
        raise ValueError("not enough targets for an injection")
    chosen = rng.sample(targets, len(sources))
    return PartialMap(tuple(zip(sources, chosen)))
