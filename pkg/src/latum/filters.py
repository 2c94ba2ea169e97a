"""Filters in a lattice and the lattice of all filters under reverse inclusion.

A filter is a nonempty, upward-closed, meet-closed subset of a lattice.  Every
filter of a finite lattice is principal, so filters are represented
intensionally by descriptors: ``principal(x)`` is {y : y >= x}, and over the
dense rational chain ``strict_above(q)`` is {y : y > q}.  The filter lattice
orders filters by reverse inclusion; join is set intersection and meet is the
filter generated by the union.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .lattice import DenseUnitChain, FiniteLattice, LatticeError

PRINCIPAL = "principal"
STRICT_ABOVE = "strict_above"


@dataclass(frozen=True)
class FilterDescriptor:
    """Intensional description of a filter in its base lattice."""

    base: object
    kind: str
    bound: object

    @staticmethod
    def principal(base, x) -> "FilterDescriptor":
        if not base.contains(x):
            raise LatticeError(f"{x!r} is not an element of the base lattice")
        return FilterDescriptor(base, PRINCIPAL, x)

    @staticmethod
    def strict_above(base: DenseUnitChain, q: Fraction) -> "FilterDescriptor":
        if not isinstance(base, DenseUnitChain):
            raise LatticeError("strict-above filters exist only over the dense unit chain")
        q = Fraction(q)
        if q >= 1:
            # {y : y > 1} would be the empty set, which is not a filter
            raise LatticeError("strict_above(q) requires q < 1; the empty filter is not allowed")
        if q < 0:
            raise LatticeError("strict_above(q) requires q >= 0")
        return FilterDescriptor(base, STRICT_ABOVE, q)

    def member(self, x) -> bool:
        """Whether x belongs to the described filter."""
        if not self.base.contains(x):
            raise LatticeError(f"{x!r} is not an element of the base lattice")
        if self.kind == PRINCIPAL:
            return self.base.leq(self.bound, x)
        return x > self.bound

    @property
    def flag(self) -> int:
        """0 for a principal filter, 1 for a strict upper set."""
        return 0 if self.kind == PRINCIPAL else 1

    def label(self) -> str:
        if isinstance(self.base, FiniteLattice):
            return f"^{self.base.label_of(self.bound)}"
        return f"^{self.bound}" if self.kind == PRINCIPAL else f">{self.bound}"

    def __repr__(self) -> str:
        if self.kind == PRINCIPAL:
            bound = self.base.label_of(self.bound) if isinstance(self.base, FiniteLattice) else self.bound
            return f"Principal({bound})"
        return f"StrictAbove({self.bound})"


def member(f: FilterDescriptor, x) -> bool:
    return f.member(x)


def generated_filter(provider, gens: Iterable) -> FilterDescriptor:
    """The filter generated by a finite nonempty set of elements.

    For finitely many generators the generated filter attains its minimum at
    the meet of all of them, so the result is principal.
    """
    gens = list(gens)
    if not gens:
        raise LatticeError("a filter cannot be generated by the empty set")
    for g in gens:
        if not provider.contains(g):
            raise LatticeError(f"{g!r} is not an element of the base lattice")
    return FilterDescriptor.principal(provider, reduce(provider.meet, gens))


class FilterLattice:
    """The lattice of filters of a base lattice, ordered by reverse inclusion.

    Implements the value-lattice provider interface; elements are
    :class:`FilterDescriptor` instances over the base.
    """

    def __init__(self, base):
        self.base = base
        if base.is_finite():
            self._descriptors = tuple(FilterDescriptor(base, PRINCIPAL, x) for x in base.elements())
        else:
            self._descriptors = None

    # -- provider interface ----------------------------------------------

    def leq(self, f: FilterDescriptor, g: FilterDescriptor) -> bool:
        """Reverse inclusion: f <= g iff f contains g as a set."""
        self._check(f), self._check(g)
        if f.kind == PRINCIPAL and g.kind == PRINCIPAL:
            return self.base.leq(f.bound, g.bound)
        # over the chain, upper sets compare lexicographically on (bound, openness)
        return (f.bound, f.flag) <= (g.bound, g.flag)

    def join(self, f: FilterDescriptor, g: FilterDescriptor) -> FilterDescriptor:
        """Set intersection of the two filters."""
        self._check(f), self._check(g)
        if f.kind == PRINCIPAL and g.kind == PRINCIPAL and isinstance(self.base, FiniteLattice):
            return FilterDescriptor(self.base, PRINCIPAL, self.base.join(f.bound, g.bound))
        # two upper sets of a chain are nested, so the intersection is the smaller
        return f if (g.bound, g.flag) <= (f.bound, f.flag) else g

    def meet(self, f: FilterDescriptor, g: FilterDescriptor) -> FilterDescriptor:
        """The filter generated by the union of the two filters."""
        self._check(f), self._check(g)
        if f.kind == PRINCIPAL and g.kind == PRINCIPAL and isinstance(self.base, FiniteLattice):
            return FilterDescriptor(self.base, PRINCIPAL, self.base.meet(f.bound, g.bound))
        # the union of two nested upper sets is already a filter
        return f if (f.bound, f.flag) <= (g.bound, g.flag) else g

    @property
    def bottom(self) -> FilterDescriptor:
        return FilterDescriptor(self.base, PRINCIPAL, self.base.bottom)

    @property
    def top(self) -> FilterDescriptor:
        return FilterDescriptor(self.base, PRINCIPAL, self.base.top)

    def is_finite(self) -> bool:
        return self.base.is_finite()

    def elements(self) -> Sequence[FilterDescriptor]:
        if self._descriptors is None:
            raise LatticeError("the filter lattice over an infinite base is not enumerable")
        return self._descriptors

    def contains(self, f) -> bool:
        if not isinstance(f, FilterDescriptor) or f.base != self.base:
            return False
        if f.kind == STRICT_ABOVE:
            return isinstance(self.base, DenseUnitChain) and 0 <= f.bound < 1
        return self.base.contains(f.bound)

    # -- finite-base extras -------------------------------------------------

    def embed(self, x) -> FilterDescriptor:
        """The canonical embedding of the base into its filter lattice."""
        if not self.base.contains(x):
            raise LatticeError(f"{x!r} is not an element of the base lattice")
        return FilterDescriptor(self.base, PRINCIPAL, x)

    def min_of(self, f: FilterDescriptor):
        """Minimum element of a principal filter."""
        self._check(f)
        if f.kind != PRINCIPAL:
            raise LatticeError("a strict upper set has no minimum")
        return f.bound

    def as_finite_lattice(self) -> FiniteLattice:
        """The filter lattice of a finite base as a finite lattice.

        Filter ids coincide with base element ids; labels are ``^<label>``.
        """
        if not self.base.is_finite():
            raise LatticeError("only the filter lattice of a finite base is itself finite")
        return FiniteLattice([f"^{name}" for name in self.base.names], self.base.leq_table)

    def element_index(self, f: FilterDescriptor) -> int:
        self._check(f)
        return int(f.bound)

    def element_from_index(self, i: int) -> FilterDescriptor:
        return self._descriptors[i]

    def _check(self, f):
        if not self.contains(f):
            raise LatticeError(f"{f!r} is not a filter over this base lattice")

    def __eq__(self, other) -> bool:
        return isinstance(other, FilterLattice) and self.base == other.base

    def __hash__(self) -> int:
        return hash(("FilterLattice", self.base))

    def __repr__(self) -> str:
        return f"FilterLattice({self.base!r})"


def filter_lattice(base) -> FilterLattice:
    """Construct the lattice of all filters of ``base``."""
    return FilterLattice(base)


# ---------------------------------------------------------------------------
# extensional verification helpers (finite bases, filters as bitmasks)


def all_filters_extensional(lat: FiniteLattice) -> list[int]:
    """Enumerate every filter of a finite lattice as a bitmask, by brute force.

    Scans all nonempty subsets, keeping those that are upward closed and
    meet closed.  Exponential; intended for lattices of desk size.
    """
    n = lat.n
    upsets = [lat.upset_mask(x) for x in range(n)]
    out = []
    for mask in range(1, 1 << n):
        members = [x for x in range(n) if mask >> x & 1]
        if any(upsets[x] & ~mask for x in members):
            continue
        if any(not mask >> lat.meet(x, y) & 1 for x, y in combinations(members, 2)):
            continue
        out.append(mask)
    return out


def filter_mask(lat: FiniteLattice, f: FilterDescriptor) -> int:
    """Extension of a principal filter over a finite base, as a bitmask."""
    return lat.upset_mask(f.bound)


@dataclass
class CompletenessReport:
    """Outcome of checking that arbitrary intersections of filters are
    nonempty filters of the enumeration."""

    subsets_checked: int
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures


def intersection_completeness(lat: FiniteLattice) -> CompletenessReport:
    """Intersect every subset of the filters of ``lat`` and confirm each
    result is again a nonempty filter of the enumeration.

    The empty intersection is the whole lattice, i.e. the filter at bottom;
    nonemptiness of every other intersection comes from the top element.
    """
    masks = [lat.upset_mask(x) for x in range(lat.n)]
    known = set(masks)
    full = (1 << lat.n) - 1
    failures = []
    count = 0
    for subset in range(1 << lat.n):
        count += 1
        inter = full
        s = subset
        while s:
            x = (s & -s).bit_length() - 1
            inter &= masks[x]
            s &= s - 1
        if inter == 0:
            failures.append(f"empty intersection for filter subset {subset:#x}")
        elif inter not in known:
            failures.append(f"intersection {inter:#x} is not a filter of the enumeration")
    return CompletenessReport(count, failures)


def finite_meet_witness(lat: FiniteLattice, lam: int, elems: Iterable[int]) -> Optional[tuple[int, ...]]:
    """Minimal nonempty subset of ``elems`` whose meet is exactly ``lam``.

    Defined when the filter at ``lam`` equals the filter-lattice meet of the
    filters at the elements of ``elems`` (equivalently, the meet of all of
    ``elems`` is ``lam``); returns None otherwise.
    """
    elems = sorted(set(int(x) for x in elems))
    if not elems:
        raise LatticeError("the element set must be nonempty")
    if not lat.contains(lam):
        raise LatticeError(f"{lam!r} is not an element of the lattice")
    if reduce(lat.meet, elems) != lam:
        return None
    for size in range(1, len(elems) + 1):
        for combo in combinations(elems, size):
            if reduce(lat.meet, combo) == lam:
                return combo
    return None  # unreachable: the full set qualifies


# ---------------------------------------------------------------------------
# the dense-chain model of the filter lattice


@dataclass
class DenseChainModelReport:
    """Agreement check between filter descriptors over the dense unit chain
    and the lexicographic pair model ([0,1] x {0,1}) minus the top-right
    corner."""

    max_denominator: int
    descriptors_checked: int
    pairs_checked: int
    mismatches: list[str]
    excluded_corner_ok: bool

    @property
    def passed(self) -> bool:
        return not self.mismatches and self.excluded_corner_ok

    def lines(self) -> list[str]:
        out = [
            f"dense-chain model: {self.descriptors_checked} descriptors, "
            f"{self.pairs_checked} pairs checked (denominators <= {self.max_denominator})",
            f"excluded corner (1,1): {'rejected as required' if self.excluded_corner_ok else 'NOT rejected'}",
        ]
        out.extend(f"MISMATCH {m}" for m in self.mismatches)
        out.append("PASS" if self.passed else "FAIL")
        return out


def _pair_of(f: FilterDescriptor) -> tuple[Fraction, int]:
    return (f.bound, f.flag)


def _descriptor_of(chain, pair) -> FilterDescriptor:
    q, flag = pair
    if flag == 0:
        return FilterDescriptor.principal(chain, q)
    return FilterDescriptor.strict_above(chain, q)


def _membership(f: FilterDescriptor, points: Sequence[Fraction]) -> tuple[bool, ...]:
    return tuple(f.member(q) for q in points)


def dense_chain_model(max_denominator: int = 32) -> DenseChainModelReport:
    """Verify the pair model of the filter lattice over the dense chain.

    For every pair of descriptors with bounds of denominator at most
    ``max_denominator``, the lexicographic order/min/max on (bound, flag)
    pairs must agree with reverse inclusion, generated-filter meet, and
    intersection join, where the set side is decided purely by membership
    tests on a small separating set of rationals.
    """
    chain = DenseUnitChain()
    phi = FilterLattice(chain)
    bounds = DenseUnitChain.sample(max_denominator)
    descriptors = [FilterDescriptor.principal(chain, q) for q in bounds]
    descriptors += [FilterDescriptor.strict_above(chain, q) for q in bounds if q < 1]

    try:
        FilterDescriptor.strict_above(chain, Fraction(1))
        corner_ok = False
    except LatticeError:
        corner_ok = True

    mismatches = []
    pairs = 0
    zero, one = Fraction(0), Fraction(1)
    for i, f in enumerate(descriptors):
        for g in descriptors[i:]:
            pairs += 1
            p, q = f.bound, g.bound
            # a separating set: both bounds, the endpoints, and a rational
            # strictly between distinct bounds
            points = [zero, p, q, one] if p == q else [zero, p, (p + q) / 2, q, one]
            mf, mg = _membership(f, points), _membership(g, points)

            for a, b, ma, mb in ((f, g, mf, mg), (g, f, mg, mf)):
                model = _pair_of(a) <= _pair_of(b)
                via_sets = all(x or not y for x, y in zip(ma, mb))  # reverse inclusion
                via_descriptors = phi.leq(a, b)
                if not (model == via_sets == via_descriptors):
                    mismatches.append(f"order disagrees on {a!r} vs {b!r}")

            join = phi.join(f, g)
            if _pair_of(join) != max(_pair_of(f), _pair_of(g)):
                mismatches.append(f"join of {f!r}, {g!r} differs from the lex maximum")
            if _membership(join, points) != tuple(x and y for x, y in zip(mf, mg)):
                mismatches.append(f"join of {f!r}, {g!r} is not the set intersection")

            meet = phi.meet(f, g)
            if _pair_of(meet) != min(_pair_of(f), _pair_of(g)):
                mismatches.append(f"meet of {f!r}, {g!r} differs from the lex minimum")
            if _membership(meet, points) != tuple(x or y for x, y in zip(mf, mg)):
                mismatches.append(f"meet of {f!r}, {g!r} does not generate the union")

    return DenseChainModelReport(
        max_denominator=max_denominator,
        descriptors_checked=len(descriptors),
        pairs_checked=pairs,
        mismatches=mismatches,
        excluded_corner_ok=corner_ok,
    )
