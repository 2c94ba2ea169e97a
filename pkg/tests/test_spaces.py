import random
from itertools import combinations

import pytest

from latum.lattice import DenseUnitChain, LatticeError, catalog
from latum.spaces import (
    EqStructure,
    PartialMap,
    UltrametricSpace,
    chain_max_form_violations,
    gen_affine_m3,
    gen_boolean_example,
    gen_degenerate,
    induced_substructure,
    is_embedding,
    is_isometry,
    label_map_is_lattice_homomorphism,
    partition_from_blocks,
    partition_join,
    partition_meet,
    refines,
    validate_eqstruct,
    validate_umetric,
)


# -- partitions ---------------------------------------------------------------


def test_partition_from_blocks_validation():
    pts = ("x", "y", "z")
    assert partition_from_blocks([["x", "y"], ["z"]], pts) == (0, 0, 1)
    with pytest.raises(ValueError, match="two partition blocks"):
        partition_from_blocks([["x", "y"], ["y", "z"]], pts)
    with pytest.raises(ValueError, match="cover"):
        partition_from_blocks([["x", "y"]], pts)
    with pytest.raises(ValueError, match="unknown point"):
        partition_from_blocks([["x", "w"], ["y", "z"]], pts)


def test_partition_meet_join():
    p1 = (0, 0, 1, 1)
    p2 = (0, 1, 1, 0)
    assert partition_meet(p1, p2) == (0, 1, 2, 3)
    assert partition_join(p1, p2) == (0, 0, 0, 0)
    assert refines(partition_meet(p1, p2), p1)
    assert refines(p1, partition_join(p1, p2))


# -- structure validation -----------------------------------------------------


def test_boolean_example_is_valid():
    for n in (1, 2, 3):
        assert validate_eqstruct(gen_boolean_example(n)).passed


def test_boolean_example_coordinate_relations():
    a = gen_boolean_example(2)
    lat = a.lattice
    # the co-atom 'b' (complement of atom a) carries first-coordinate agreement
    assert a.related(lat.index_of("b"), "00", "01")
    assert not a.related(lat.index_of("a"), "00", "01")
    assert a.relations[lat.bottom] == (0, 1, 2, 3)
    assert a.relations[lat.top] == (0, 0, 0, 0)


def test_top_not_trivial_is_flagged():
    m3 = catalog("m3")
    a = EqStructure(m3, ["x", "y"], {
        "a": [["x"], ["y"]], "b": [["x"], ["y"]], "c": [["x"], ["y"]],
        "1": [["x"], ["y"]],
    })
    report = validate_eqstruct(a)
    assert any(v.kind == "top-not-trivial" and v.witness == ("x", "y") for v in report.violations)


def test_meet_preservation_failure_has_witness():
    b2 = catalog("boolean 2")
    # relation at bottom coarser than the intersection of the two co-atom relations
    a = EqStructure(b2, ["x", "y"], {
        "a": [["x", "y"]], "b": [["x", "y"]],
        "0": [["x", "y"]], "ab": [["x", "y"]],
    })
    report = validate_eqstruct(a)
    kinds = {v.kind for v in report.violations}
    assert "bottom-not-equality" in kinds


def test_missing_relation_is_an_error():
    m3 = catalog("m3")
    with pytest.raises(ValueError, match="missing relation"):
        EqStructure(m3, ["x", "y"], {"a": [["x"], ["y"]]})


def test_degenerate_structure():
    m3 = catalog("m3")
    a = gen_degenerate(m3, 2)
    assert validate_eqstruct(a).passed
    assert not label_map_is_lattice_homomorphism(a)  # top is join-reducible in m3
    c3 = catalog("chain 3")
    assert label_map_is_lattice_homomorphism(gen_degenerate(c3, 2))
    assert validate_eqstruct(gen_degenerate(catalog("boolean 2"), 3)).passed
    with pytest.raises(ValueError, match="two points"):
        gen_degenerate(m3, 1)


def test_homomorphism_caveat_across_catalog():
    from latum.lattice import join_irreducibles

    for kind in ["chain 2", "chain 3", "boolean 2", "boolean 3", "m3", "n5",
                 "product(chain 2, chain 2)"]:
        lat = catalog(kind)
        a = gen_degenerate(lat, 3)
        assert label_map_is_lattice_homomorphism(a) == (lat.top in join_irreducibles(lat)), kind


def test_affine_plane_structure():
    a = gen_affine_m3()
    assert validate_eqstruct(a).passed
    lat = a.lattice
    assert a.related(lat.index_of("a"), "00", "01")
    for x, y in combinations(("a", "b", "c"), 2):
        meets = partition_meet(a.relations[lat.index_of(x)], a.relations[lat.index_of(y)])
        assert meets == a.relations[lat.bottom]


# -- spaces -------------------------------------------------------------------


def test_single_point_space_valid():
    m3 = catalog("m3")
    m = UltrametricSpace(m3, ["x"], [[m3.bottom]])
    assert validate_umetric(m).passed


def test_chain_triangle_violation():
    c3 = catalog("chain 3")
    m = UltrametricSpace.from_upper(c3, ["x", "y", "z"],
                                    {("x", "y"): 2, ("x", "z"): 1, ("y", "z"): 1})
    report = validate_umetric(m)
    assert any(v.kind == "triangle" for v in report.violations)


def test_m3_atom_triangle_is_valid():
    m3 = catalog("m3")
    a, b, c = (m3.index_of(s) for s in "abc")
    m = UltrametricSpace.from_upper(m3, ["x", "y", "z"],
                                    {("x", "y"): a, ("x", "z"): b, ("y", "z"): c})
    assert validate_umetric(m).passed


def test_identity_axiom_violation():
    c2 = catalog("chain 2")
    m = UltrametricSpace(c2, ["x", "y"], [[0, 0], [0, 0]])
    report = validate_umetric(m)
    assert any(v.kind == "identity" for v in report.violations)


def test_foreign_matrix_entry_rejected():
    c2 = catalog("chain 2")
    with pytest.raises(LatticeError):
        UltrametricSpace(c2, ["x", "y"], [[0, 7], [7, 0]])


def test_missing_distance_rejected():
    c2 = catalog("chain 2")
    with pytest.raises(ValueError, match="missing distance"):
        UltrametricSpace.from_upper(c2, ["x", "y", "z"], {("x", "y"): 1, ("x", "z"): 1})


def test_chain_validator_agrees_with_max_form():
    rng = random.Random(99)
    c4 = catalog("chain 4")
    for _ in range(500):
        n = rng.randint(1, 5)
        mat = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                mat[i][j] = mat[j][i] = rng.randint(0, 3)
        m = UltrametricSpace(c4, [f"p{i}" for i in range(n)], mat)
        assert validate_umetric(m).passed == (chain_max_form_violations(mat) == [])


# -- substructures ------------------------------------------------------------


def test_constant_sequences_restriction_equals_degenerate():
    for n in (2, 3):
        a = gen_boolean_example(n)
        consts = ["0" * n, "1" * n]
        sub = induced_substructure(a, consts)
        assert sub == gen_degenerate(a.lattice, 2, points=consts)


def test_restriction_to_all_points_is_identity():
    a = gen_affine_m3()
    assert induced_substructure(a, a.points) == a
    m = UltrametricSpace.from_upper(catalog("chain 3"), ["x", "y"], {("x", "y"): 2})
    assert induced_substructure(m, m.points) == m


def test_one_point_restriction_valid():
    a = gen_affine_m3()
    sub = induced_substructure(a, ["10"])
    assert validate_eqstruct(sub).passed and sub.points == ("10",)


def test_all_substructures_of_fixtures_validate():
    fixtures = [gen_affine_m3(), gen_boolean_example(2), gen_degenerate(catalog("n5"), 4)]
    for a in fixtures:
        for k in range(1, a.n + 1):
            for subset in combinations(a.points, k):
                assert validate_eqstruct(induced_substructure(a, subset)).passed


def test_restriction_rejects_bad_subsets():
    a = gen_affine_m3()
    with pytest.raises(ValueError, match="empty"):
        induced_substructure(a, [])
    with pytest.raises(ValueError, match="unknown"):
        induced_substructure(a, ["00", "77"])


# -- morphisms ----------------------------------------------------------------


def test_partial_map_guards():
    with pytest.raises(ValueError, match="injective"):
        PartialMap((("x", "a"), ("y", "a")))
    with pytest.raises(ValueError, match="distinct"):
        PartialMap((("x", "a"), ("x", "b")))


def test_identity_is_embedding_and_isometry():
    a = gen_affine_m3()
    assert is_embedding(PartialMap.identity(a.points), a, a) == (True, None)
    m = UltrametricSpace.from_upper(catalog("chain 3"), ["x", "y"], {("x", "y"): 1})
    assert is_isometry(PartialMap.identity(m.points), m, m) == (True, None)


def test_inclusion_of_induced_substructure_is_embedding():
    a = gen_boolean_example(2)
    sub = induced_substructure(a, ["00", "11"])
    ok, _ = is_embedding(PartialMap.identity(sub.points), sub, a)
    assert ok


def test_non_embedding_has_witness():
    a = gen_affine_m3()
    # swapping one point of a direction class breaks the direction relations
    f = PartialMap.from_dict({"00": "00", "01": "01", "10": "11", "11": "10"})
    ok, witness = is_embedding(f, a, a)
    assert not ok and witness is not None
    lam, p, q = witness
    assert a.related(a.lattice.index_of(lam), p, q) != a.related(
        a.lattice.index_of(lam), f.apply(p), f.apply(q))


def test_isometry_witness_on_swapped_distances():
    c3 = catalog("chain 3")
    m = UltrametricSpace.from_upper(c3, ["x", "y", "z"],
                                    {("x", "y"): 2, ("x", "z"): 2, ("y", "z"): 1})
    f = PartialMap.from_dict({"x": "y", "y": "x", "z": "z"})
    ok, witness = is_isometry(f, m, m)
    assert not ok and witness[:2] == ("x", "z")


def test_one_point_isometry():
    c2 = catalog("chain 2")
    m = UltrametricSpace(c2, ["x"], [[0]])
    n = UltrametricSpace(c2, ["y"], [[0]])
    assert is_isometry(PartialMap.from_dict({"x": "y"}), m, n) == (True, None)


def test_embedding_requires_same_lattice():
    a = gen_degenerate(catalog("m3"), 2)
    b = gen_degenerate(catalog("n5"), 2)
    with pytest.raises(LatticeError):
        is_embedding(PartialMap.identity(a.points), a, b)


def test_embedding_composition_and_identity():
    a = gen_boolean_example(2)
    sub = induced_substructure(a, ["00", "01"])
    inc = PartialMap.identity(sub.points)
    flip = PartialMap.from_dict({"00": "10", "01": "11", "10": "00", "11": "01"})
    assert is_embedding(flip, a, a)[0]
    composed = flip.compose(inc)
    assert is_embedding(composed, sub, a)[0]


def test_dense_chain_valued_space():
    from fractions import Fraction

    chain = DenseUnitChain()
    m = UltrametricSpace.from_upper(chain, ["x", "y", "z"], {
        ("x", "y"): Fraction(1, 3), ("x", "z"): Fraction(1, 2), ("y", "z"): Fraction(1, 2)})
    assert validate_umetric(m).passed
