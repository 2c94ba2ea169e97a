"""Finite bounded lattices and the dense rational unit chain.

Elements of a finite lattice are dense integer ids into a label table; the
partial order and the meet/join operations are stored as full numpy tables,
which keeps every later computation a table lookup.  The dense chain of
rationals in [0, 1] provides the one infinite value lattice supported by the
library; it uses exact ``fractions.Fraction`` arithmetic so that order
comparisons are decidable.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Iterable, Optional, Protocol, Sequence

import numpy as np

DEFAULT_ELEMENT_CAP = 4096
DEFAULT_BOOLEAN_ATOM_CAP = 12

# letters used to label boolean-lattice atoms
_ATOM_LETTERS = "abcdefghijkl"


class LatticeError(ValueError):
    """Raised when the input does not describe a bounded lattice."""


class LatticeProvider(Protocol):
    """Minimal capability record shared by every value lattice.

    ``elements()`` is only available when ``is_finite()`` is true.
    """

    def leq(self, x, y) -> bool: ...

    def meet(self, x, y): ...

    def join(self, x, y): ...

    @property
    def bottom(self): ...

    @property
    def top(self): ...

    def is_finite(self) -> bool: ...

    def elements(self) -> Sequence: ...

    def contains(self, x) -> bool: ...


class FiniteLattice:
    """A finite bounded lattice over element ids ``0..n-1``.

    Attributes:
        names: label per element id.
        leq_table: boolean (n, n) matrix, ``leq_table[x, y]`` iff x <= y.
        meet_table, join_table: id-valued (n, n) tables.
        bottom, top: element ids of the minimum and maximum.
    """

    def __init__(self, names: Sequence[str], leq: np.ndarray, *, element_cap: int = DEFAULT_ELEMENT_CAP):
        names = tuple(str(x) for x in names)
        if len(set(names)) != len(names):
            raise LatticeError("element labels must be distinct")
        n = len(names)
        if n == 0:
            raise LatticeError("a bounded lattice is nonempty")
        if n > element_cap:
            raise LatticeError(f"lattice has {n} elements, exceeding the cap of {element_cap}")
        leq = np.asarray(leq, dtype=bool)
        if leq.shape != (n, n):
            raise LatticeError(f"leq must be a {n}x{n} matrix")

        _check_partial_order(names, leq)
        self.names = names
        self.leq_table = leq.copy()
        self.leq_table.setflags(write=False)
        self._index = {name: i for i, name in enumerate(names)}

        bottoms = np.flatnonzero(leq.all(axis=1))
        tops = np.flatnonzero(leq.all(axis=0))
        if len(bottoms) != 1:
            raise LatticeError("no unique bottom element")
        if len(tops) != 1:
            raise LatticeError("no unique top element")
        self.bottom = int(bottoms[0])
        self.top = int(tops[0])

        meet, join = _meet_join_tables(names, leq)
        self.meet_table = meet
        self.join_table = join
        self.meet_table.setflags(write=False)
        self.join_table.setflags(write=False)
        self._tables64: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None

    # -- provider interface -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.names)

    def leq(self, x: int, y: int) -> bool:
        return bool(self.leq_table[x, y])

    def meet(self, x: int, y: int) -> int:
        return int(self.meet_table[x, y])

    def join(self, x: int, y: int) -> int:
        return int(self.join_table[x, y])

    def is_finite(self) -> bool:
        return True

    def elements(self) -> range:
        return range(self.n)

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= int(x) < self.n

    # -- labels --------------------------------------------------------------

    def index_of(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise LatticeError(f"unknown lattice element {label!r}") from None

    def label_of(self, x: int) -> str:
        return self.names[x]

    # -- derived data ---------------------------------------------------------

    def cover_pairs(self) -> list[tuple[int, int]]:
        """Covering pairs (lower, upper) of the Hasse diagram, id-ordered."""
        lt = self.leq_table & ~np.eye(self.n, dtype=bool)
        inbetween = lt @ lt
        cov = lt & ~inbetween
        return [(int(i), int(j)) for i, j in np.argwhere(cov)]

    def upset_mask(self, x: int) -> int:
        """Bitmask of {y : y >= x}."""
        mask = 0
        for y in np.flatnonzero(self.leq_table[x]):
            mask |= 1 << int(y)
        return mask

    def tables64(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(leq, meet, join) tables as int64/bool arrays for the kernels."""
        if self._tables64 is None:
            self._tables64 = (
                np.ascontiguousarray(self.leq_table),
                np.ascontiguousarray(self.meet_table, dtype=np.int64),
                np.ascontiguousarray(self.join_table, dtype=np.int64),
            )
        return self._tables64

    # -- value semantics --------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteLattice)
            and self.names == other.names
            and np.array_equal(self.leq_table, other.leq_table)
        )

    def __hash__(self) -> int:
        return hash((self.names, self.leq_table.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteLattice({self.n} elements, bottom={self.names[self.bottom]!r}, top={self.names[self.top]!r})"


def _check_partial_order(names, leq):
    n = len(names)
    if not leq.diagonal().all():
        x = int(np.flatnonzero(~leq.diagonal())[0])
        raise LatticeError(f"order not reflexive at {names[x]!r}")
    sym = leq & leq.T & ~np.eye(n, dtype=bool)
    if sym.any():
        x, y = map(int, np.argwhere(sym)[0])
        raise LatticeError(f"cycle through {names[x]!r} and {names[y]!r}")
    closure = leq @ leq
    missing = closure & ~leq
    if missing.any():
        x, y = map(int, np.argwhere(missing)[0])
        raise LatticeError(f"order not transitive: {names[x]!r} vs {names[y]!r}")


def _meet_join_tables(names, leq):
    """Compute glb/lub tables from the order alone, erroring on missing bounds."""
    n = len(names)
    upset_size = leq.sum(axis=1)
    downset_size = leq.sum(axis=0)
    meet = np.zeros((n, n), dtype=np.int16)
    join = np.zeros((n, n), dtype=np.int16)
    for x in range(n):
        for y in range(x, n):
            uppers = np.flatnonzero(leq[x] & leq[y])
            # the minimum of a set, if it exists, has the largest upset
            g = int(uppers[np.argmax(upset_size[uppers])])
            if not leq[g, uppers].all():
                raise LatticeError(f"pair ({names[x]!r}, {names[y]!r}) has no join")
            join[x, y] = join[y, x] = g
            lowers = np.flatnonzero(leq[:, x] & leq[:, y])
            m = int(lowers[np.argmax(downset_size[lowers])])
            if not leq[lowers, m].all():
                raise LatticeError(f"pair ({names[x]!r}, {names[y]!r}) has no meet")
            meet[x, y] = meet[y, x] = m
    return meet, join


def build_from_covers(names: Sequence, covers: Iterable[tuple], *, element_cap: int = DEFAULT_ELEMENT_CAP) -> FiniteLattice:
    """Build a finite lattice from its Hasse diagram.

    ``covers`` lists (lower, upper) label pairs; the order is the
    reflexive-transitive closure.  Raises :class:`LatticeError` naming a
    witness when the input has a cycle, no unique bottom/top, or some pair
    without a meet or join.
    """
    names = [str(x) for x in names]
    index = {name: i for i, name in enumerate(names)}
    if len(index) != len(names):
        raise LatticeError("element labels must be distinct")
    n = len(names)
    adj = np.eye(n, dtype=bool)
    for lo, hi in covers:
        lo, hi = str(lo), str(hi)
        if lo not in index or hi not in index:
            raise LatticeError(f"cover ({lo!r}, {hi!r}) references an undeclared label")
        adj[index[lo], index[hi]] = True
    # reflexive-transitive closure by repeated squaring
    closure = adj
    while True:
        nxt = closure | (closure @ closure)
        if np.array_equal(nxt, closure):
            break
        closure = nxt
    return FiniteLattice(names, closure, element_cap=element_cap)


# ---------------------------------------------------------------------------
# catalog lattices


def parse_kind(kind: str):
    """Parse a catalog kind such as ``chain 3``, ``boolean:2``, ``m3``,
    ``n5`` or ``product(chain 2, chain 3)`` into a nested tuple."""
    s = kind.strip()
    if s.startswith("product"):
        rest = s[len("product"):].strip()
        if rest.startswith("(") and rest.endswith(")"):
            rest = rest[1:-1]
        parts = _split_top_level(rest)
        if len(parts) != 2:
            raise LatticeError(f"product needs exactly two factors: {kind!r}")
        return ("product", parse_kind(parts[0]), parse_kind(parts[1]))
    tokens = s.replace(":", " ").split()
    if not tokens:
        raise LatticeError("empty catalog kind")
    name = tokens[0].lower()
    if name in ("m3", "n5"):
        if len(tokens) != 1:
            raise LatticeError(f"{name} takes no arguments")
        return (name,)
    if name in ("chain", "boolean"):
        if len(tokens) != 2:
            raise LatticeError(f"{name} needs one size argument")
        try:
            n = int(tokens[1])
        except ValueError:
            raise LatticeError(f"bad size in catalog kind {kind!r}") from None
        return (name, n)
    raise LatticeError(f"unknown catalog kind {kind!r}")


def _split_top_level(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def kind_label(parsed) -> str:
    if parsed[0] == "product":
        return f"product({kind_label(parsed[1])},{kind_label(parsed[2])})"
    return " ".join(str(t) for t in parsed)


def catalog(kind: str, *, boolean_atom_cap: int = DEFAULT_BOOLEAN_ATOM_CAP) -> FiniteLattice:
    """Return a named lattice: ``chain n``, ``boolean n``, ``m3``, ``n5``,
    or ``product(K1, K2)`` of two further kinds."""
    return _build_kind(parse_kind(kind), boolean_atom_cap)


def _build_kind(parsed, boolean_atom_cap: int) -> FiniteLattice:
    name = parsed[0]
    if name == "chain":
        n = parsed[1]
        if n < 1:
            raise LatticeError("chain size must be >= 1")
        return chain_lattice(n)
    if name == "boolean":
        n = parsed[1]
        if n < 1:
            raise LatticeError("boolean atom count must be >= 1")
        if n > boolean_atom_cap:
            raise LatticeError(f"boolean {n} exceeds the atom cap of {boolean_atom_cap}")
        return boolean_lattice(n)
    if name == "m3":
        return build_from_covers(
            ["0", "a", "b", "c", "1"],
            [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
        )
    if name == "n5":
        # 0 < a < c < 1 with b incomparable to both a and c
        return build_from_covers(
            ["0", "a", "b", "c", "1"],
            [("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")],
        )
    if name == "product":
        l1 = _build_kind(parsed[1], boolean_atom_cap)
        l2 = _build_kind(parsed[2], boolean_atom_cap)
        return product_lattice(l1, l2)
    raise LatticeError(f"unknown catalog kind {name!r}")


def chain_lattice(n: int) -> FiniteLattice:
    names = [str(i) for i in range(n)]
    leq = np.triu(np.ones((n, n), dtype=bool))
    lat = FiniteLattice.__new__(FiniteLattice)
    _init_direct(lat, names, leq,
                 meet=np.minimum.outer(np.arange(n), np.arange(n)),
                 join=np.maximum.outer(np.arange(n), np.arange(n)),
                 bottom=0, top=n - 1)
    return lat


def boolean_lattice(n: int) -> FiniteLattice:
    """Boolean algebra with n atoms: elements are atom subsets encoded as
    bitmask ids, ordered by inclusion; labels spell the atom letters."""
    size = 1 << n
    ids = np.arange(size)
    names = ["0"] + ["".join(_ATOM_LETTERS[i] for i in range(n) if m >> i & 1) for m in range(1, size)]
    leq = (ids[:, None] & ~ids[None, :]) == 0
    lat = FiniteLattice.__new__(FiniteLattice)
    _init_direct(lat, names, leq,
                 meet=ids[:, None] & ids[None, :],
                 join=ids[:, None] | ids[None, :],
                 bottom=0, top=size - 1)
    return lat


def product_lattice(l1: FiniteLattice, l2: FiniteLattice) -> FiniteLattice:
    """Direct product, ordered componentwise; labels are ``(x,y)``."""
    n1, n2 = l1.n, l2.n
    names = [f"({a},{b})" for a in l1.names for b in l2.names]
    leq = (l1.leq_table[:, None, :, None] & l2.leq_table[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    meet = (l1.meet_table[:, None, :, None].astype(np.int32) * n2
            + l2.meet_table[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    join = (l1.join_table[:, None, :, None].astype(np.int32) * n2
            + l2.join_table[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    lat = FiniteLattice.__new__(FiniteLattice)
    _init_direct(lat, names, leq, meet=meet, join=join,
                 bottom=l1.bottom * n2 + l2.bottom, top=l1.top * n2 + l2.top)
    return lat


def _init_direct(lat, names, leq, *, meet, join, bottom, top):
    """Install directly-computed tables, bypassing the generic glb/lub search."""
    if len(names) > DEFAULT_ELEMENT_CAP:
        raise LatticeError(f"lattice has {len(names)} elements, exceeding the cap of {DEFAULT_ELEMENT_CAP}")
    lat.names = tuple(str(x) for x in names)
    lat._index = {name: i for i, name in enumerate(lat.names)}
    lat.leq_table = np.asarray(leq, dtype=bool).copy()
    lat.meet_table = np.asarray(meet, dtype=np.int16).copy()
    lat.join_table = np.asarray(join, dtype=np.int16).copy()
    for t in (lat.leq_table, lat.meet_table, lat.join_table):
        t.setflags(write=False)
    lat.bottom = int(bottom)
    lat.top = int(top)
    lat._tables64 = None


# ---------------------------------------------------------------------------
# predicates


def is_distributive(lat: FiniteLattice) -> tuple[bool, Optional[tuple[int, int, int]]]:
    """Whether x /\\ (y \\/ z) == (x /\\ y) \\/ (x /\\ z) for all triples.

    Returns (True, None), or (False, witness) with the first violating
    (x, y, z) in lexicographic id order.  Cubic in the element count.
    """
    meet, join = lat.meet_table, lat.join_table
    for x in range(lat.n):
        mx = meet[x]
        lhs = meet[x][join]              # x /\ (y \/ z)
        rhs = join[mx[:, None], mx[None, :]]
        bad = lhs != rhs
        if bad.any():
            y, z = map(int, np.argwhere(bad)[0])
            return False, (x, y, z)
    return True, None


def forbidden_sublattice(lat: FiniteLattice) -> Optional[tuple[str, tuple[int, ...]]]:
    """Search for a 5-element sublattice shaped like the diamond or the
    pentagon; returns (shape, elements) or None.

    Independent route to distributivity: a lattice is distributive exactly
    when no such sublattice exists.
    """
    from itertools import combinations

    meet, join = lat.meet_table, lat.join_table
    for combo in combinations(range(lat.n), 5):
        sub = set(combo)
        if any(int(meet[x, y]) not in sub or int(join[x, y]) not in sub for x, y in combinations(combo, 2)):
            continue
        shape = _classify_five(lat, combo)
        if shape is not None:
            return shape, combo
    return None


def _classify_five(lat, combo):
    leq = lat.leq_table
    for bot in combo:
        if not all(leq[bot, x] for x in combo):
            continue
        for top in combo:
            if not all(leq[x, top] for x in combo):
                continue
            mid = [x for x in combo if x != bot and x != top]
            incomp = [(x, y) for x, y in permutations(mid, 2) if not leq[x, y]]
            if len(incomp) == 6:
                return "m3"
            if len(incomp) == 5:
                # exactly one strictly comparable middle pair: the pentagon
                return "n5"
    return None


def join_irreducibles(lat: FiniteLattice) -> list[int]:
    """Elements x != bottom with x == a \\/ b only when a == x or b == x."""
    out = []
    ids = np.arange(lat.n)
    for x in range(lat.n):
        if x == lat.bottom:
            continue
        proper = (lat.join_table == x) & (ids[:, None] != x) & (ids[None, :] != x)
        if not proper.any():
            out.append(x)
    return out


def lattice_isomorphic(l1: FiniteLattice, l2: FiniteLattice,
                       candidates: Optional[Sequence[Iterable[int]]] = None) -> Optional[dict[int, int]]:
    """Search for an order isomorphism l1 -> l2; None if there is none.

    Backtracking over element ids, pruned by (downset size, upset size,
    cover degree) profiles.  ``candidates`` optionally restricts the
    allowed images per l1 id.
    """
    if l1.n != l2.n:
        return None

    def profiles(lat):
        covers = lat.cover_pairs()
        up_deg = np.zeros(lat.n, dtype=int)
        down_deg = np.zeros(lat.n, dtype=int)
        for lo, hi in covers:
            up_deg[lo] += 1
            down_deg[hi] += 1
        return [
            (int(lat.leq_table[:, x].sum()), int(lat.leq_table[x].sum()), int(up_deg[x]), int(down_deg[x]))
            for x in range(lat.n)
        ]

    p1, p2 = profiles(l1), profiles(l2)
    if sorted(p1) != sorted(p2):
        return None
    allowed = []
    for x in range(l1.n):
        pool = [y for y in range(l2.n) if p2[y] == p1[x]]
        if candidates is not None:
            wanted = set(candidates[x])
            pool = [y for y in pool if y in wanted]
        if not pool:
            return None
        allowed.append(pool)

    order = sorted(range(l1.n), key=lambda x: len(allowed[x]))
    assign: dict[int, int] = {}
    used: set[int] = set()

    def consistent(x, y):
        for a, b in assign.items():
            if bool(l1.leq_table[x, a]) != bool(l2.leq_table[y, b]):
                return False
            if bool(l1.leq_table[a, x]) != bool(l2.leq_table[b, y]):
                return False
        return True

    def backtrack(i):
        if i == len(order):
            return True
        x = order[i]
        for y in allowed[x]:
            if y in used or not consistent(x, y):
                continue
            assign[x] = y
            used.add(y)
            if backtrack(i + 1):
                return True
            del assign[x]
            used.remove(y)
        return False

    if not backtrack(0):
        return None
    # an order isomorphism of lattices preserves meet and join; assert anyway
    for x in range(l1.n):
        for y in range(l1.n):
            assert assign[l1.meet(x, y)] == l2.meet(assign[x], assign[y])
            assert assign[l1.join(x, y)] == l2.join(assign[x], assign[y])
    return dict(assign)


# ---------------------------------------------------------------------------
# the dense rational chain


class DenseUnitChain:
    """The chain of exact rationals in [0, 1]: meet is min, join is max.

    Between any two distinct elements there is a third, so this is the
    computable stand-in for a dense, complete value chain.
    """

    def leq(self, x: Fraction, y: Fraction) -> bool:
        return x <= y

    def meet(self, x: Fraction, y: Fraction) -> Fraction:
        return min(x, y)

    def join(self, x: Fraction, y: Fraction) -> Fraction:
        return max(x, y)

    @property
    def bottom(self) -> Fraction:
        return Fraction(0)

    @property
    def top(self) -> Fraction:
        return Fraction(1)

    def is_finite(self) -> bool:
        return False

    def elements(self):
        raise LatticeError("the dense unit chain is infinite")

    def contains(self, x) -> bool:
        return isinstance(x, Fraction) and 0 <= x <= 1

    def between(self, x: Fraction, y: Fraction) -> Fraction:
        """A rational strictly between two distinct elements."""
        if x == y:
            raise LatticeError("no element strictly between equal endpoints")
        return (x + y) / 2

    @staticmethod
    def sample(max_denominator: int) -> list[Fraction]:
        """All rationals in [0, 1] with denominator <= max_denominator, sorted."""
        out = {Fraction(0), Fraction(1)}
        for den in range(1, max_denominator + 1):
            for num in range(den + 1):
                out.add(Fraction(num, den))
        return sorted(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, DenseUnitChain)

    def __hash__(self) -> int:
        return hash(DenseUnitChain)

    def __repr__(self) -> str:
        return "DenseUnitChain()"


def check_lattice_axioms(provider, elems: Sequence) -> list[str]:
    """Spot-check the lattice axioms on the given elements; returns failures.

    Exhaustive when ``elems`` is the whole carrier of a finite provider;
    a randomized sample otherwise.
    """
    bad = []
    leq, meet, join = provider.leq, provider.meet, provider.join
    for x in elems:
        if not leq(x, x):
            bad.append(f"not reflexive at {x}")
        if meet(x, x) != x or join(x, x) != x:
            bad.append(f"not idempotent at {x}")
        if not (leq(provider.bottom, x) and leq(x, provider.top)):
            bad.append(f"bounds fail at {x}")
    for x in elems:
        for y in elems:
            if leq(x, y) and leq(y, x) and x != y:
                bad.append(f"antisymmetry fails at ({x}, {y})")
            if meet(x, y) != meet(y, x) or join(x, y) != join(y, x):
                bad.append(f"commutativity fails at ({x}, {y})")
            if meet(x, join(x, y)) != x or join(x, meet(x, y)) != x:
                bad.append(f"absorption fails at ({x}, {y})")
            m, j = meet(x, y), join(x, y)
            if not (leq(m, x) and leq(m, y) and leq(x, j) and leq(y, j)):
                bad.append(f"bound laws fail at ({x}, {y})")
    for x in elems:
        for y in elems:
            for z in elems:
                if meet(meet(x, y), z) != meet(x, meet(y, z)):
                    bad.append(f"meet associativity fails at ({x}, {y}, {z})")
                if join(join(x, y), z) != join(x, join(y, z)):
                    bad.append(f"join associativity fails at ({x}, {y}, {z})")
                if leq(x, y) and leq(y, z) and not leq(x, z):
                    bad.append(f"transitivity fails at ({x}, {y}, {z})")
    return bad
