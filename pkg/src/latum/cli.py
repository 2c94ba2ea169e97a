"""Command-line front end.

Exit codes: 0 = success/valid/pass, 1 = invalid input or witness found
(details on stdout, one finding per line), 2 = usage or parse error (details
on stderr).  ``catalog:<kind>`` is accepted anywhere a .lat path is.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from .correspond import to_eq, to_metric
from .definability import invariant_eq_lattice
from .filters import FilterLattice
from .formats import (
    FormatError,
    parse_eqs,
    parse_lat,
    parse_ums,
    read_text,
    write_eqs,
    write_lat,
    write_ums,
)
from .homogeneity import (
    AmalgamInstance,
    amalgamate,
    automorphisms,
    is_homogeneous,
    search_amalgam_failure,
)
from .lattice import DEFAULT_BOOLEAN_ATOM_CAP, FiniteLattice, LatticeError, catalog, lattice_isomorphic
from .spaces import partition_blocks, validate_eqstruct, validate_umetric


def render_dot(lat: FiniteLattice, name: str = "L") -> str:
    """Hasse diagram in DOT: one node per element, one edge per cover."""
    lines = [f'digraph "{name}" {{', "  rankdir=BT;"]
    for i, label in enumerate(lat.names):
        lines.append(f'  n{i} [label="{label}"];')
    for lo, hi in sorted(lat.cover_pairs()):
        lines.append(f"  n{lo} -> n{hi};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _load_lattice_arg(arg: str, atom_cap: int) -> tuple[str, FiniteLattice]:
    """A .lat path or a catalog:<kind> token."""
    if arg.startswith("catalog:"):
        kind = arg[len("catalog:"):]
        lat = catalog(kind, boolean_atom_cap=atom_cap)
        return kind.replace(" ", ":"), lat
    name, lat = parse_lat(read_text(arg))
    return name, lat


def _load_object(path: str):
    """Parse a .lat/.ums/.eqs file by extension; returns (kind, name, obj, latref)."""
    ext = os.path.splitext(path)[1].lower()
    text = read_text(path)
    base_dir = os.path.dirname(os.path.abspath(path))
    if ext == ".lat":
        name, lat = parse_lat(text)
        return "lat", name, lat, None
    if ext == ".ums":
        name, space, latref = parse_ums(text, base_dir)
        return "ums", name, space, latref
    if ext == ".eqs":
        name, struct, latref = parse_eqs(text, base_dir)
        return "eqs", name, struct, latref
    raise FormatError(f"unrecognized file extension {ext!r} (expected .lat, .ums or .eqs)")


def cmd_validate(args) -> int:
    try:
        if args.file.startswith("catalog:"):
            catalog(args.file[len("catalog:"):])
            print("OK")
            return 0
        kind, name, obj, _ = _load_object(args.file)
    except LatticeError as e:
        print(f"VIOLATION lattice :: {e}")
        return 1
    if kind == "lat":
        print("OK")
        return 0
    report = validate_eqstruct(obj) if kind == "eqs" else validate_umetric(obj)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def cmd_phi(args) -> int:
    name, lat = _load_lattice_arg(args.lattice, args.cap or DEFAULT_BOOLEAN_ATOM_CAP)
    philat = FilterLattice(lat).as_finite_lattice()
    out_name = f"phi({name})"
    if args.dot:
        print(render_dot(philat, out_name), end="")
    else:
        print(write_lat(philat, out_name), end="")
    return 0


def cmd_catalog(args) -> int:
    kind = " ".join(args.kind)
    lat = catalog(kind, boolean_atom_cap=args.cap or DEFAULT_BOOLEAN_ATOM_CAP)
    print(write_lat(lat, kind.replace(" ", ":")), end="")
    return 0


def cmd_dot(args) -> int:
    name, lat = _load_lattice_arg(args.lattice, args.cap or DEFAULT_BOOLEAN_ATOM_CAP)
    print(render_dot(lat, name), end="")
    return 0


def cmd_to_metric(args) -> int:
    kind, name, struct, latref = _load_object(args.file)
    if kind != "eqs":
        raise FormatError("to-metric expects a .eqs file")
    report = validate_eqstruct(struct)
    if not report.passed:
        for line in report.lines():
            print(line)
        return 1
    space = to_metric(struct)
    print(write_ums(space, name, f"phi:{latref}"), end="")
    return 0


def cmd_to_eq(args) -> int:
    kind, name, space, latref = _load_object(args.file)
    if kind != "ums":
        raise FormatError("to-eq expects a .ums file")
    if not (isinstance(space.value_lattice, FilterLattice)
            and isinstance(space.value_lattice.base, FiniteLattice)):
        raise FormatError("to-eq needs a space valued in phi:<lattice>")
    report = validate_umetric(space)
    if not report.passed:
        for line in report.lines():
            print(line)
        return 1
    struct = to_eq(space)
    assert latref.startswith("phi:")
    print(write_eqs(struct, name, latref[len("phi:"):]), end="")
    return 0


def _loaded_structure(args):
    kind, name, obj, _ = _load_object(args.file)
    if kind == "lat":
        raise FormatError("expected a .ums or .eqs file")
    report = validate_eqstruct(obj) if kind == "eqs" else validate_umetric(obj)
    return obj, report


def cmd_check_homogeneous(args) -> int:
    obj, report = _loaded_structure(args)
    if not report.passed:
        for line in report.lines():
            print(line)
        return 1
    verdict, witness = is_homogeneous(obj, cap=args.cap or 10)
    if verdict:
        print("HOMOGENEOUS (every partial isomorphism between invariant substructures extends)")
        return 0
    print("NOT-HOMOGENEOUS")
    print(f"WITNESS partial-isomorphism {witness!r}")
    return 1


def cmd_aut(args) -> int:
    obj, report = _loaded_structure(args)
    if not report.passed:
        for line in report.lines():
            print(line)
        return 1
    autos = automorphisms(obj, cap=args.cap or 10)
    print(f"# {len(autos)} automorphisms")
    for g in autos:
        print(" ".join(f"{a}->{b}" for a, b in g.pairs))
    return 0


def cmd_amalgamate(args) -> int:
    kind_a, _, base, latref = _load_object(args.base)
    kind_b, _, left, _ = _load_object(args.left)
    kind_c, _, right, _ = _load_object(args.right)
    if not kind_a == kind_b == kind_c == "ums":
        raise FormatError("amalgamate expects three .ums files")
    inst = AmalgamInstance(base, left, right)
    problems = inst.problems()
    if problems:
        raise FormatError("malformed instance: " + "; ".join(problems))
    out = amalgamate(inst)
    print(write_ums(out, "amalgam", latref), end="")
    report = validate_umetric(out)
    if report.passed:
        return 0
    for line in report.lines():
        print(line)
    return 1


def cmd_search_failure(args) -> int:
    name, lat = _load_lattice_arg(args.lattice, DEFAULT_BOOLEAN_ATOM_CAP)
    cap = args.cap or max(4, args.max_size)
    witness = search_amalgam_failure(lat, args.max_size, cap=cap)
    if witness is None:
        print(f"NO-FAILURE exhausted all instances over {name} with sides up to {args.max_size} points")
        return 0
    print(write_ums(witness.amalgam, "failing-amalgam", args.lattice), end="")
    print(witness.violation().line())
    return 1


def cmd_inv_lattice(args) -> int:
    obj, report = _loaded_structure(args)
    if not report.passed:
        for line in report.lines():
            print(line)
        return 1
    lat, parts = invariant_eq_lattice(obj, cap=args.cap or 10)
    print(write_lat(lat, "invariant"), end="")
    for i in range(lat.n):
        blocks = partition_blocks(parts[i])
        body = " | ".join(" ".join(obj.points[p] for p in block) for block in blocks)
        print(f"rel {lat.names[i]} : {body}")
    if args.expect:
        expected = parse_lat(read_text(args.expect))[1]
        if lattice_isomorphic(lat, expected) is None:
            print("EXPECT-MISMATCH the invariant lattice is not isomorphic to the expectation")
            return 1
        print("EXPECT-OK")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="latum",
        description="Finite lattices, filter lattices, lattice-valued ultrametric "
                    "spaces, and structures of lattice-indexed equivalence relations.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate", cmd_validate, "validate a .lat/.ums/.eqs file")
    sp.add_argument("file")

    sp = add("phi", cmd_phi, "print the filter lattice of a lattice as .lat (labels ^<element>)")
    sp.add_argument("lattice", help=".lat path or catalog:<kind>")
    sp.add_argument("--dot", action="store_true", help="emit a Hasse diagram in DOT instead")
    sp.add_argument("--cap", type=int, help="override the catalog size cap")

    sp = add("catalog", cmd_catalog, "print a catalog lattice as .lat")
    sp.add_argument("kind", nargs="+", help="chain N | boolean N | m3 | n5 | product(K1,K2)")
    sp.add_argument("--cap", type=int, help="override the catalog size cap")

    sp = add("dot", cmd_dot, "print the Hasse diagram of a lattice in DOT")
    sp.add_argument("lattice", help=".lat path or catalog:<kind>")
    sp.add_argument("--cap", type=int, help="override the catalog size cap")

    sp = add("to-metric", cmd_to_metric, "convert .eqs to the corresponding .ums over phi:<lattice>")
    sp.add_argument("file")

    sp = add("to-eq", cmd_to_eq, "convert a phi-valued .ums back to .eqs")
    sp.add_argument("file")

    sp = add("check-homogeneous", cmd_check_homogeneous, "test finite homogeneity of a .ums/.eqs")
    sp.add_argument("file")
    sp.add_argument("--cap", type=int, help="override the point-count cap")

    sp = add("aut", cmd_aut, "list all automorphisms of a .ums/.eqs")
    sp.add_argument("file")
    sp.add_argument("--cap", type=int, help="override the point-count cap")

    sp = add("amalgamate", cmd_amalgamate, "amalgamate two .ums extensions over a base .ums")
    sp.add_argument("base")
    sp.add_argument("left")
    sp.add_argument("right")

    sp = add("search-failure", cmd_search_failure, "search for an instance whose canonical amalgam fails")
    sp.add_argument("lattice", help=".lat path or catalog:<kind>")
    sp.add_argument("--max-size", type=int, default=4, help="maximum points per side (default 4)")
    sp.add_argument("--cap", type=int, help="override the search size cap")

    sp = add("inv-lattice", cmd_inv_lattice, "lattice of automorphism-invariant equivalence relations")
    sp.add_argument("file")
    sp.add_argument("--expect", help="exit 0 only if isomorphic to this .lat")
    sp.add_argument("--cap", type=int, help="override the point-count cap")

    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse uses exit status 2 for usage errors already
        return int(e.code) if e.code is not None else 2
    try:
        return args.fn(args)
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except LatticeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
