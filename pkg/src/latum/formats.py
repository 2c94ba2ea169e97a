"""Line-oriented text formats: .lat lattices, .ums spaces, .eqs structures.

All three formats are whitespace tolerant, use ``#`` to start a comment, and
end with a single ``end`` line.  A lattice reference inside .ums/.eqs files is
either a path to a .lat file (resolved relative to the referring file), a
``catalog:<kind>`` token, or ``phi:<ref>`` wrapping another reference to name
the filter lattice over it; distances over a filter lattice are written
``^<element>``.  Emitted text is deterministic, so writing a parsed file
reproduces it byte for byte.
"""

from __future__ import annotations

import os
from itertools import combinations
from typing import Optional

from .filters import FilterLattice
from .lattice import FiniteLattice, LatticeError, build_from_covers, catalog
from .spaces import EqStructure, UltrametricSpace, equality_partition, partition_blocks, trivial_partition


class FormatError(ValueError):
    """A malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _logical_lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


# ---------------------------------------------------------------------------
# .lat


def parse_lat(text: str) -> tuple[str, FiniteLattice]:
    name = None
    elements: list[str] = []
    covers: list[tuple[str, str]] = []
    ended = False
    for no, tokens in _logical_lines(text):
        if ended:
            raise FormatError("content after 'end'", no)
        head = tokens[0]
        if head == "lattice":
            if name is not None:
                raise FormatError("duplicate 'lattice' line", no)
            if len(tokens) != 2:
                raise FormatError("expected 'lattice <name>'", no)
            name = tokens[1]
        elif head == "elements":
            if name is None:
                raise FormatError("'elements' before 'lattice'", no)
            if len(tokens) < 2:
                raise FormatError("expected 'elements <label> ...'", no)
            elements.extend(tokens[1:])
        elif head == "cover":
            if len(tokens) != 3:
                raise FormatError("expected 'cover <lower> <upper>'", no)
            pair = (tokens[1], tokens[2])
            if pair not in covers:  # duplicate cover lines are idempotent
                covers.append(pair)
        elif head == "end":
            if len(tokens) != 1:
                raise FormatError("expected bare 'end'", no)
            ended = True
        else:
            raise FormatError(f"expected one of lattice/elements/cover/end, got {head!r}", no)
    if name is None:
        raise FormatError("missing 'lattice <name>' line")
    if not ended:
        raise FormatError("missing 'end' line")
    if not elements:
        raise FormatError("missing 'elements' line")
    # a well-formed file may still fail to describe a lattice; that raises
    # LatticeError, which callers treat as invalidity rather than bad syntax
    return name, build_from_covers(elements, covers)


def write_lat(lat: FiniteLattice, name: str = "L") -> str:
    lines = [f"lattice {name}", "elements " + " ".join(lat.names)]
    for lo, hi in sorted(lat.cover_pairs()):
        lines.append(f"cover {lat.names[lo]} {lat.names[hi]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# lattice references


def parse_lattice_ref(ref: str, base_dir: str = "."):
    """Resolve a lattice reference to a provider."""
    if ref.startswith("phi:"):
        return FilterLattice(parse_lattice_ref(ref[len("phi:"):], base_dir))
    if ref.startswith("catalog:"):
        try:
            return catalog(ref[len("catalog:"):])
        except LatticeError as e:
            raise FormatError(str(e)) from e
    path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise FormatError(f"cannot read lattice file {ref!r}: {e}") from e
    try:
        return parse_lat(text)[1]
    except LatticeError as e:
        raise FormatError(f"{ref!r} does not describe a lattice: {e}") from e


def _element_from_token(provider, token: str, no: int):
    if isinstance(provider, FilterLattice):
        if not token.startswith("^"):
            raise FormatError(f"filter-lattice element must be written ^<label>, got {token!r}", no)
        base = provider.base
        if not isinstance(base, FiniteLattice):
            raise FormatError("only filter lattices over finite bases appear in files", no)
        return provider.embed(base.index_of(token[1:]))
    if isinstance(provider, FiniteLattice):
        try:
            return provider.index_of(token)
        except LatticeError:
            raise FormatError(f"unknown lattice element {token!r}", no) from None
    raise FormatError(f"unsupported value lattice {provider!r}", no)


def _element_token(provider, value) -> str:
    if isinstance(provider, FilterLattice):
        return value.label()
    return provider.label_of(value)


# ---------------------------------------------------------------------------
# .ums


def parse_ums(text: str, base_dir: str = ".") -> tuple[str, UltrametricSpace, str]:
    """Returns (name, space, lattice_ref)."""
    name = None
    latref = None
    provider = None
    points: list[str] = []
    entries: dict[tuple[str, str], object] = {}
    ended = False
    end_line = None
    for no, tokens in _logical_lines(text):
        if ended:
            raise FormatError("content after 'end'", no)
        head = tokens[0]
        if head == "space":
            if len(tokens) != 2:
                raise FormatError("expected 'space <name>'", no)
            name = tokens[1]
        elif head == "lattice":
            if len(tokens) != 2:
                raise FormatError("expected 'lattice <ref>'", no)
            latref = tokens[1]
            provider = parse_lattice_ref(latref, base_dir)
        elif head == "points":
            if len(tokens) < 2:
                raise FormatError("expected 'points <p> ...'", no)
            points.extend(tokens[1:])
        elif head == "d":
            if len(tokens) != 4:
                raise FormatError("expected 'd <p> <q> <element>'", no)
            if provider is None:
                raise FormatError("'d' before 'lattice'", no)
            p, q = tokens[1], tokens[2]
            if p not in points or q not in points:
                raise FormatError(f"distance references unknown point ({p!r}, {q!r})", no)
            key = (p, q) if points.index(p) < points.index(q) else (q, p)
            if key in entries:
                raise FormatError(f"duplicate distance for pair ({p!r}, {q!r})", no)
            entries[key] = _element_from_token(provider, tokens[3], no)
        elif head == "end":
            ended = True
            end_line = no
        else:
            raise FormatError(f"expected one of space/lattice/points/d/end, got {head!r}", no)
    if name is None:
        raise FormatError("missing 'space <name>' line")
    if latref is None:
        raise FormatError("missing 'lattice <ref>' line")
    if not ended:
        raise FormatError("missing 'end' line")
    if not points:
        raise FormatError("missing 'points' line")
    for p, q in combinations(points, 2):
        if (p, q) not in entries:
            raise FormatError(f"missing distance for pair ({p!r}, {q!r})", end_line)
    try:
        space = UltrametricSpace.from_upper(provider, points, entries)
    except (ValueError, LatticeError) as e:
        raise FormatError(str(e)) from e
    return name, space, latref


def write_ums(m: UltrametricSpace, name: str, lattice_ref: str) -> str:
    lines = [f"space {name}", f"lattice {lattice_ref}", "points " + " ".join(m.points)]
    for i, j in combinations(range(m.n), 2):
        token = _element_token(m.value_lattice, m.dist[i][j])
        lines.append(f"d {m.points[i]} {m.points[j]} {token}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# .eqs


def parse_eqs(text: str, base_dir: str = ".") -> tuple[str, EqStructure, str]:
    """Returns (name, structure, lattice_ref)."""
    name = None
    latref = None
    lat: Optional[FiniteLattice] = None
    points: list[str] = []
    rels: dict[int, list[list[str]]] = {}
    ended = False
    end_line = None
    for no, tokens in _logical_lines(text):
        if ended:
            raise FormatError("content after 'end'", no)
        head = tokens[0]
        if head in ("structure", "space"):
            if len(tokens) != 2:
                raise FormatError(f"expected '{head} <name>'", no)
            name = tokens[1]
        elif head == "lattice":
            if len(tokens) != 2:
                raise FormatError("expected 'lattice <ref>'", no)
            latref = tokens[1]
            provider = parse_lattice_ref(latref, base_dir)
            if not isinstance(provider, FiniteLattice):
                raise FormatError("a structure needs a finite lattice", no)
            lat = provider
        elif head == "points":
            if len(tokens) < 2:
                raise FormatError("expected 'points <p> ...'", no)
            points.extend(tokens[1:])
        elif head == "rel":
            if lat is None:
                raise FormatError("'rel' before 'lattice'", no)
            body = " ".join(tokens[1:])
            if ":" not in body:
                raise FormatError("expected 'rel <element> : blocks'", no)
            elem_part, blocks_part = body.split(":", 1)
            elem_tokens = elem_part.split()
            if len(elem_tokens) != 1:
                raise FormatError("expected a single element before ':'", no)
            try:
                elem = lat.index_of(elem_tokens[0])
            except LatticeError:
                raise FormatError(f"unknown lattice element {elem_tokens[0]!r}", no) from None
            if elem in rels:
                raise FormatError(f"duplicate relation for element {elem_tokens[0]!r}", no)
            blocks = [blk.split() for blk in blocks_part.split("|")]
            blocks = [b for b in blocks if b]
            if not blocks:
                raise FormatError("relation has no blocks", no)
            rels[elem] = blocks
        elif head == "end":
            ended = True
            end_line = no
        else:
            raise FormatError(f"expected one of structure/lattice/points/rel/end, got {head!r}", no)
    if name is None:
        raise FormatError("missing 'structure <name>' line")
    if lat is None:
        raise FormatError("missing 'lattice <ref>' line")
    if not ended:
        raise FormatError("missing 'end' line")
    if not points:
        raise FormatError("missing 'points' line")
    for x in range(lat.n):
        if x not in rels and x not in (lat.bottom, lat.top):
            raise FormatError(f"missing relation for element {lat.label_of(x)!r}", end_line)
    try:
        struct = EqStructure(lat, points, rels)
    except ValueError as e:
        raise FormatError(str(e)) from e
    return name, struct, latref


def write_eqs(a: EqStructure, name: str, lattice_ref: str) -> str:
    lines = [f"structure {name}", f"lattice {lattice_ref}", "points " + " ".join(a.points)]
    n = a.n
    for x in range(a.lattice.n):
        part = a.relations[x]
        if x == a.lattice.bottom and part == equality_partition(n):
            continue
        if x == a.lattice.top and part == trivial_partition(n):
            continue
        blocks = partition_blocks(part)
        body = " | ".join(" ".join(a.points[i] for i in block) for block in blocks)
        lines.append(f"rel {a.lattice.label_of(x)} : {body}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# file helpers


def read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise FormatError(f"cannot read {path!r}: {e}") from e
