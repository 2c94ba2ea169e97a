import random
from itertools import combinations

import pytest

from latum.correspond import to_metric
from latum.homogeneity import (
    AmalgamInstance,
    amalgamate,
    automorphisms,
    check_amalgamation_property,
    enumerate_valid_spaces,
    index_profile,
    is_homogeneous,
    random_instance,
    search_amalgam_failure,
)
from latum.lattice import catalog
from latum.spaces import (
    PartialMap,
    UltrametricSpace,
    gen_affine_m3,
    gen_boolean_example,
    gen_degenerate,
    induced_substructure,
    validate_umetric,
)


# -- automorphisms ------------------------------------------------------------


def test_degenerate_automorphisms_are_all_permutations():
    import math

    for k in (2, 3, 4):
        a = gen_degenerate(catalog("m3"), k)
        assert len(automorphisms(a)) == math.factorial(k)


def test_affine_automorphisms_are_the_four_translations():
    a = gen_affine_m3()
    autos = automorphisms(a)
    assert len(autos) == 4

    def xor(p, v):
        return "".join(str(int(x) ^ int(y)) for x, y in zip(p, v))

    expected = {tuple(sorted((p, xor(p, v)) for p in a.points)) for v in ("00", "01", "10", "11")}
    assert {tuple(sorted(g.pairs)) for g in autos} == expected


def test_one_point_automorphism_is_identity():
    a = induced_substructure(gen_affine_m3(), ["00"])
    autos = automorphisms(a)
    assert autos == [PartialMap.identity(["00"])]


def test_automorphisms_form_a_group():
    for x in [gen_affine_m3(), gen_boolean_example(2), to_metric(gen_affine_m3())]:
        autos = automorphisms(x)
        as_sets = {g.pairs for g in autos}
        assert PartialMap.identity(x.points).pairs in as_sets
        for g in autos:
            assert g.inverse().pairs in as_sets
            for h in autos:
                assert g.compose(h).pairs in as_sets


def test_automorphism_cap():
    with pytest.raises(ValueError, match="cap"):
        automorphisms(gen_degenerate(catalog("m3"), 5), cap=4)


# -- homogeneity --------------------------------------------------------------


def test_degenerate_is_homogeneous():
    verdict, witness = is_homogeneous(gen_degenerate(catalog("m3"), 3))
    assert verdict and witness is None


def test_affine_is_homogeneous():
    assert is_homogeneous(gen_affine_m3())[0]


def test_chain_space_homogeneity_by_exhaustion():
    c3 = catalog("chain 3")
    m = UltrametricSpace.from_upper(c3, ["x", "y", "z"],
                                    {("x", "y"): 1, ("x", "z"): 2, ("y", "z"): 2})
    verdict, witness = is_homogeneous(m)
    # exhaustive cross-check: try to extend every partial isomorphism by hand
    autos = automorphisms(m)
    failures = []
    pts = list(m.points)
    for k in range(1, 4):
        for dom in combinations(pts, k):
            for img_set in combinations(pts, k):
                import itertools
                for img in itertools.permutations(img_set):
                    sub_d = induced_substructure(m, dom)
                    f = {a: b for a, b in zip(dom, img)}
                    iso = all(m.d(p, q) == m.d(f[p], f[q]) for p in dom for q in dom)
                    if not iso:
                        continue
                    if not any(all(g.as_dict()[p] == f[p] for p in dom) for g in autos):
                        failures.append(f)
    assert verdict == (not failures)


def test_non_homogeneous_space_has_minimal_witness():
    # distances 1,2,2 over a chain: z sees {2,2} while x sees {1,2}, so the
    # one-point map x->z cannot extend to an automorphism
    c3 = catalog("chain 3")
    m = UltrametricSpace.from_upper(c3, ["x", "y", "z"],
                                    {("x", "y"): 1, ("x", "z"): 2, ("y", "z"): 2})
    verdict, witness = is_homogeneous(m)
    assert not verdict
    assert len(witness.pairs) == 1  # minimal: a single-point map already fails
    src, dst = witness.pairs[0]
    assert {src, dst} in ({"x", "z"}, {"y", "z"}) or (src, dst) == ("z", "x")


# -- amalgamation -------------------------------------------------------------


def test_amalgam_single_base_point_is_join():
    m3 = catalog("m3")
    a, b = m3.index_of("a"), m3.index_of("b")
    base = UltrametricSpace(m3, ["x"], [[m3.bottom]])
    left = UltrametricSpace.from_upper(m3, ["x", "p"], {("x", "p"): a})
    right = UltrametricSpace.from_upper(m3, ["x", "q"], {("x", "q"): b})
    out = amalgamate(AmalgamInstance(base, left, right))
    assert out.d("p", "q") == m3.join(a, b)
    assert validate_umetric(out).passed


def test_amalgam_empty_base_gives_top():
    m3 = catalog("m3")
    left = UltrametricSpace(m3, ["p"], [[m3.bottom]])
    right = UltrametricSpace(m3, ["q"], [[m3.bottom]])
    out = amalgamate(AmalgamInstance(None, left, right))
    assert out.d("p", "q") == m3.top
    assert validate_umetric(out).passed


def test_amalgam_chain_instance_validates():
    c3 = catalog("chain 3")
    base = UltrametricSpace.from_upper(c3, ["x", "y"], {("x", "y"): 2})
    left = UltrametricSpace.from_upper(c3, ["x", "y", "p"],
                                       {("x", "y"): 2, ("x", "p"): 1, ("y", "p"): 2})
    right = UltrametricSpace.from_upper(c3, ["x", "y", "q"],
                                        {("x", "y"): 2, ("x", "q"): 2, ("y", "q"): 2})
    out = amalgamate(AmalgamInstance(base, left, right))
    assert validate_umetric(out).passed


def test_malformed_instance_rejected():
    c3 = catalog("chain 3")
    base = UltrametricSpace.from_upper(c3, ["x", "y"], {("x", "y"): 2})
    left = UltrametricSpace.from_upper(c3, ["x", "y", "p"],
                                       {("x", "y"): 1, ("x", "p"): 1, ("y", "p"): 1})
    inst = AmalgamInstance(base, left, left)
    assert inst.problems()  # disagrees with base on (x, y)
    with pytest.raises(ValueError, match="malformed"):
        amalgamate(inst)


def test_identical_extensions_identify_over_boolean():
    # over a distributive lattice, amalgamating an extension with itself can
    # force the two copies to distance bottom; that is an identification with
    # equal rows, not a failure
    b2 = catalog("boolean 2")
    a, b = b2.index_of("a"), b2.index_of("b")
    base = UltrametricSpace.from_upper(b2, ["x", "y"], {("x", "y"): b2.top})
    left = UltrametricSpace.from_upper(b2, ["x", "y", "p"],
                                       {("x", "y"): b2.top, ("x", "p"): a, ("y", "p"): b})
    right = UltrametricSpace.from_upper(b2, ["x", "y", "q"],
                                        {("x", "y"): b2.top, ("x", "q"): a, ("y", "q"): b})
    out = amalgamate(AmalgamInstance(base, left, right))
    assert out.d("p", "q") == b2.bottom
    assert all(out.d("p", t) == out.d("q", t) for t in ("x", "y"))
    kinds = {v.kind for v in validate_umetric(out).violations}
    assert kinds == {"identity"}  # no triangle violation


def test_small_base_instances_always_validate_up_to_identification():
    # bases of size 0 and 1 are skipped analytically by the property scan;
    # exercise them here through the plain object path
    rng = random.Random(31)
    for kind in ["chain 3", "boolean 2", "m3", "n5"]:
        lat = catalog(kind)
        for _ in range(60):
            inst = random_instance(lat, rng, max_size=3)
            base_size = 0 if inst.base is None else inst.base.n
            if base_size > 1:
                continue
            out = amalgamate(inst)
            kinds = {v.kind for v in validate_umetric(out).violations}
            assert "triangle" not in kinds, (kind, inst)


def test_enumerate_valid_spaces_counts():
    c3 = catalog("chain 3")
    # 3-point chain-3 spaces up to relabeling: (1,1,1), (1,2,2), (2,2,2)
    assert enumerate_valid_spaces(c3, 3).shape[0] == 3
    m3 = catalog("m3")
    spaces = enumerate_valid_spaces(m3, 2)
    assert spaces.shape[0] == 4  # one per nonzero value


def test_amalgamation_passes_on_small_distributive_lattices():
    for kind in ["chain 2", "chain 3", "boolean 2"]:
        report = check_amalgamation_property(catalog(kind), 4)
        assert report.passed, kind
        assert report.failure is None


def test_amalgamation_passes_on_all_distributive_catalog_lattices_up_to_8():
    from latum.lattice import is_distributive

    kinds = ["chain 5", "chain 6", "chain 7", "chain 8", "boolean 3",
             "product(chain 2, chain 2)", "product(chain 2, chain 4)",
             "product(chain 2, product(chain 2, chain 2))"]
    for kind in kinds:
        lat = catalog(kind)
        assert lat.n <= 8 and is_distributive(lat)[0]
        assert check_amalgamation_property(lat, 4).passed, kind


def test_amalgamation_reports_counts():
    report = check_amalgamation_property(catalog("boolean 2"), 4)
    assert report.pairs_checked == 1513
    assert report.identifications == 69
    assert any("PASS" in line for line in report.lines())


# frozen outcome of the exhaustive search over the diamond at side size 4:
# base {a1,a2} at distance a; one side adds b1 at (b, c); the other adds
# c1 at (b, c) and c2 at (c, b) with d(c1,c2)=a.  The canonical amalgam
# identifies b1 with c1 (distance bottom) but their rows then disagree on c2.
def test_m3_amalgam_failure_is_frozen():
    m3 = catalog("m3")
    witness = search_amalgam_failure(m3, 4)
    assert witness is not None
    assert witness.triple == ("b1", "c2", "c1")
    lat = witness.amalgam.value_lattice
    named = {(p, q): lat.names[witness.amalgam.d(p, q)]
             for p in witness.amalgam.points for q in witness.amalgam.points if p < q}
    assert named == {
        ("a1", "a2"): "a",
        ("a1", "b1"): "b", ("a1", "c1"): "b", ("a1", "c2"): "c",
        ("a2", "b1"): "c", ("a2", "c1"): "c", ("a2", "c2"): "b",
        ("b1", "c1"): "0", ("b1", "c2"): "1",
        ("c1", "c2"): "a",
    }


def test_n5_amalgam_failure_is_frozen():
    n5 = catalog("n5")
    witness = search_amalgam_failure(n5, 4)
    assert witness is not None
    assert witness.triple == ("a1", "c1", "b1")
    am = witness.amalgam
    lat = am.value_lattice
    assert lat.names[am.d("a1", "a2")] == "1"
    assert lat.names[am.d("a1", "b1")] == "a"
    assert lat.names[am.d("a1", "c1")] == "c"
    assert lat.names[am.d("a2", "b1")] == "b"
    assert lat.names[am.d("a2", "c1")] == "b"
    assert lat.names[am.d("b1", "c1")] == "0"


def test_witnesses_fail_the_triangle_for_real():
    for kind in ("m3", "n5"):
        lat = catalog(kind)
        witness = search_amalgam_failure(lat, 4)
        x, y, z = witness.triple
        d = witness.amalgam.d
        assert not lat.leq(d(x, y), lat.join(d(x, z), d(z, y)))
        assert any(v.kind == "triangle" for v in validate_umetric(witness.amalgam).violations)
        # the two sides of the instance are themselves valid spaces
        assert validate_umetric(witness.instance.left).passed
        assert validate_umetric(witness.instance.right).passed


def test_search_respects_caps():
    with pytest.raises(ValueError, match="cap"):
        search_amalgam_failure(catalog("m3"), 5)
    assert search_amalgam_failure(catalog("m3"), 5, cap=5) is not None


def test_random_instances_roundtrip_through_amalgamate():
    rng = random.Random(8)
    for _ in range(40):
        inst = random_instance(catalog("boolean 2"), rng, max_size=4, min_base=2)
        out = amalgamate(inst)
        # sides embed isometrically into the amalgam
        for side in (inst.left, inst.right):
            for p in side.points:
                for q in side.points:
                    assert out.d(p, q) == side.d(p, q)


# -- index profiles -----------------------------------------------------------


def test_index_profile_affine():
    entries = index_profile(gen_affine_m3())
    by_cover = {(e.lower, e.upper): e.counts for e in entries}
    assert by_cover[("0", "a")] == (2, 2)
    assert by_cover[("a", "1")] == (2,)
    assert len(entries) == 6


def test_index_profile_degenerate():
    a = gen_degenerate(catalog("m3"), 4)
    for e in index_profile(a):
        if e.upper == "1":
            assert e.counts == (4,)
        else:
            assert all(c == 1 for c in e.counts)


def test_index_profile_boolean_example():
    a = gen_boolean_example(2)
    entries = index_profile(a)
    by_cover = {(e.lower, e.upper): e.counts for e in entries}
    # each co-atom class (size 2) splits into 2 singletons at bottom
    assert by_cover[("0", "a")] == (2, 2)
    assert by_cover[("0", "b")] == (2, 2)
