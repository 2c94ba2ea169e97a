"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Every tolerance here is exact: the checks are property-based and
exhaustive at desk scale, so the required failure count is zero throughout.
"""

import random
from contextlib import contextmanager
from fractions import Fraction
from functools import reduce
from itertools import combinations

from latum.correspond import (
    as_filter_valued,
    homogeneity_transfer,
    random_injection,
    random_valid_eqstructure,
    roundtrip_check,
    to_eq,
    to_metric,
    verify_morphism_transfer,
)
from latum.definability import invariant_eq_lattice, realizes
from latum.filters import (
    FilterDescriptor,
    FilterLattice,
    dense_chain_model,
    filter_lattice,
    finite_meet_witness,
    intersection_completeness,
)
from latum.homogeneity import (
    automorphisms,
    check_amalgamation_property,
    search_amalgam_failure,
)
from latum.lattice import DenseUnitChain, catalog, join_irreducibles, lattice_isomorphic
from latum.spaces import (
    UltrametricSpace,
    chain_max_form_violations,
    gen_affine_m3,
    gen_boolean_example,
    gen_degenerate,
    induced_substructure,
    label_map_is_lattice_homomorphism,
    validate_eqstruct,
    validate_umetric,
)

CATALOG_16 = [
    "chain 2", "chain 3", "chain 4", "chain 5",
    "boolean 2", "boolean 3", "boolean 4",
    "m3", "n5",
    "product(chain 2, chain 2)", "product(chain 2, chain 3)",
]
CATALOG_8 = [k for k in CATALOG_16 if catalog(k).n <= 8]

EQ_FIXTURES = [
    gen_affine_m3(),
    gen_boolean_example(1),
    gen_boolean_example(2),
    gen_degenerate(catalog("m3"), 2),
    gen_degenerate(catalog("m3"), 3),
    gen_degenerate(catalog("chain 3"), 2),
    gen_degenerate(catalog("boolean 2"), 3),
    gen_degenerate(catalog("n5"), 4),
    gen_degenerate(catalog("product(chain 2, chain 2)"), 5),
]


@contextmanager
def criterion(label):
    try:
        yield
    except BaseException:
        print(f"FAIL {label}")
        raise
    print(f"PASS {label}")


def test_criterion_1_filter_lattice_laws():
    with criterion("1 filter-lattice laws: completeness, embedding, finite meet witnesses"):
        rng = random.Random(11)
        for kind in CATALOG_16:
            lat = catalog(kind)
            assert lat.n <= 16
            # arbitrary intersections of filters are nonempty filters
            report = intersection_completeness(lat)
            assert report.passed and report.subsets_checked == 1 << lat.n, kind
            # the principal embedding preserves meet and join on all pairs
            phi = filter_lattice(lat)
            embedded = [phi.embed(x) for x in lat.elements()]
            assert len(set(embedded)) == lat.n
            for x in lat.elements():
                for y in lat.elements():
                    assert phi.meet(embedded[x], embedded[y]) == embedded[lat.meet(x, y)]
                    assert phi.join(embedded[x], embedded[y]) == embedded[lat.join(x, y)]
            # randomized finite-meet witnesses, exact meet every time
            for _ in range(1000):
                elems = rng.sample(range(lat.n), rng.randint(1, lat.n))
                lam = reduce(lat.meet, elems)
                w = finite_meet_witness(lat, lam, elems)
                assert w is not None and reduce(lat.meet, w) == lam, kind


def test_criterion_2_dense_chain_pair_model():
    with criterion("2 dense-chain pair model at denominator 32, plus the limit distance"):
        report = dense_chain_model(max_denominator=32)
        assert report.passed, report.mismatches[:3]
        assert report.excluded_corner_ok
        # the strictly-above-bottom filter is a producible distance: two
        # points related at every positive level but not at bottom
        chain = DenseUnitChain()
        phi = FilterLattice(chain)
        limit = FilterDescriptor.strict_above(chain, Fraction(0))
        space = UltrametricSpace.from_upper(phi, ["x", "y"], {("x", "y"): limit})
        assert validate_umetric(space).passed
        assert not limit.member(Fraction(0))
        for q in DenseUnitChain.sample(8):
            if q > 0:
                assert limit.member(q)


def test_criterion_3_correspondence_bijection_and_morphisms():
    with criterion("3 correspondence: mutual inversion and embedding<->isometry agreement"):
        for a in EQ_FIXTURES:
            assert roundtrip_check(a)
            assert roundtrip_check(to_metric(a))
        rng = random.Random(33)
        for kind in CATALOG_8:
            lat = catalog(kind)
            for _ in range(200):
                a = random_valid_eqstructure(lat, rng.randint(1, 5), rng)
                assert roundtrip_check(a)
                assert roundtrip_check(to_metric(a))
        # fixture morphisms
        from latum.spaces import PartialMap

        b2 = gen_boolean_example(2)
        consts = induced_substructure(b2, ["00", "11"])
        assert verify_morphism_transfer(PartialMap.identity(consts.points), consts, b2)
        for a in EQ_FIXTURES:
            assert verify_morphism_transfer(PartialMap.identity(a.points), a, a)
        # randomized maps; verify_morphism_transfer raises on any disagreement
        seen = {True: 0, False: 0}
        rng = random.Random(34)
        for _ in range(200):
            lat = catalog(rng.choice(CATALOG_8))
            whole = random_valid_eqstructure(lat, rng.randint(2, 5), rng)
            sub = induced_substructure(whole, rng.sample(whole.points, rng.randint(1, whole.n)))
            f = random_injection(rng, sub.points, whole.points)
            seen[verify_morphism_transfer(f, sub, whole)] += 1
        assert seen[True] and seen[False]


def test_criterion_4_substructure_closure_and_homogeneity_transfer():
    with criterion("4 substructure closure and homogeneity transfer"):
        for a in EQ_FIXTURES:
            if a.n > 5:
                continue
            m = to_metric(a)
            for k in range(1, a.n + 1):
                for subset in combinations(a.points, k):
                    assert validate_eqstruct(induced_substructure(a, subset)).passed
                    assert validate_umetric(induced_substructure(m, subset)).passed
        transfer_fixtures = EQ_FIXTURES + [
            gen_degenerate(catalog("boolean 2"), 6),
            to_eq(as_filter_valued(UltrametricSpace.from_upper(
                catalog("chain 3"), ["x", "y", "z"],
                {("x", "y"): 1, ("x", "z"): 2, ("y", "z"): 2}))),
        ]
        verdicts = set()
        for a in transfer_fixtures:
            assert a.n <= 6
            report = homogeneity_transfer(a)
            assert report.agree
            verdicts.add(report.structure_homogeneous)
        assert verdicts == {True, False}


def test_criterion_5_affine_plane_over_the_diamond():
    with criterion("5 affine example: 4 automorphisms, invariant lattice is the diamond"):
        a = gen_affine_m3()
        assert len(automorphisms(a)) == 4
        inv, _ = invariant_eq_lattice(a)
        assert inv.n == 5
        assert lattice_isomorphic(inv, catalog("m3")) is not None
        assert realizes(a)


def test_criterion_6_distributive_amalgamation():
    with criterion("6 amalgamation: distributive lattices pass; diamond/pentagon outcomes frozen"):
        for kind in ["chain 2", "chain 3", "chain 4", "boolean 2", "boolean 3",
                     "product(chain 2, chain 3)"]:
            report = check_amalgamation_property(catalog(kind), 4, label=kind)
            assert report.passed, (kind, report.lines())
        # frozen outcomes of the exhaustive searches at side size 4
        m3_witness = search_amalgam_failure(catalog("m3"), 4)
        assert m3_witness is not None and m3_witness.triple == ("b1", "c2", "c1")
        n5_witness = search_amalgam_failure(catalog("n5"), 4)
        assert n5_witness is not None and n5_witness.triple == ("a1", "c1", "b1")
        for witness in (m3_witness, n5_witness):
            lat = witness.amalgam.value_lattice
            x, y, z = witness.triple
            d = witness.amalgam.d
            assert not lat.leq(d(x, y), lat.join(d(x, z), d(z, y)))
            assert any(v.kind == "triangle" for v in validate_umetric(witness.amalgam).violations)
            assert not witness.instance.problems()


def test_criterion_7_boolean_representation():
    with criterion("7 boolean representation and the homomorphism caveat"):
        for n in (1, 2, 3, 4):
            a = gen_boolean_example(n)
            assert validate_eqstruct(a).passed
            consts = ["0" * n, "1" * n]
            assert induced_substructure(a, consts) == gen_degenerate(a.lattice, 2, points=consts)
        for kind in CATALOG_16:
            lat = catalog(kind)
            deg = gen_degenerate(lat, 3)
            assert label_map_is_lattice_homomorphism(deg) == (lat.top in join_irreducibles(lat)), kind


def test_criterion_8_chain_compatibility():
    with criterion("8 chain spaces match the classical max-form ultrametric check"):
        rng = random.Random(88)
        disagreements = 0
        for _ in range(1000):
            size = rng.randint(1, 6)
            chain = catalog(f"chain {rng.randint(2, 6)}")
            top_id = chain.n - 1
            mat = [[0] * size for _ in range(size)]
            for i in range(size):
                for j in range(i + 1, size):
                    mat[i][j] = mat[j][i] = rng.randint(0, top_id)
            m = UltrametricSpace(chain, [f"p{i}" for i in range(size)], mat)
            lattice_verdict = validate_umetric(m).passed
            classical_verdict = chain_max_form_violations(mat) == []
            if lattice_verdict != classical_verdict:
                disagreements += 1
        assert disagreements == 0
