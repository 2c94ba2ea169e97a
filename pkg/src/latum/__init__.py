"""Finite lattices, filter lattices, lattice-valued ultrametric spaces, and
structures of lattice-indexed equivalence relations — with homogeneity,
amalgamation, and invariant-relation tooling at desk scale."""

from .correspond import (
    CorrespondenceError,
    as_base_valued,
    as_filter_valued,
    homogeneity_transfer,
    random_valid_eqstructure,
    random_valid_space,
    roundtrip_check,
    to_eq,
    to_metric,
    verify_morphism_transfer,
)
from .definability import invariant_eq_lattice, orbitals, realizes
from .filters import (
    FilterDescriptor,
    FilterLattice,
    dense_chain_model,
    filter_lattice,
    finite_meet_witness,
    generated_filter,
    intersection_completeness,
    member,
)
from .homogeneity import (
    AmalgamInstance,
    amalgamate,
    automorphisms,
    check_amalgamation_property,
    index_profile,
    is_homogeneous,
    search_amalgam_failure,
)
from .lattice import (
    DenseUnitChain,
    FiniteLattice,
    LatticeError,
    build_from_covers,
    catalog,
    is_distributive,
    join_irreducibles,
    lattice_isomorphic,
)
from .spaces import (
    EqStructure,
    PartialMap,
    UltrametricSpace,
    gen_affine_m3,
    gen_boolean_example,
    gen_degenerate,
    induced_substructure,
    is_embedding,
    is_isometry,
    validate_eqstruct,
    validate_umetric,
)

__version__ = "0.1.0"

__all__ = [
    "AmalgamInstance",
    "CorrespondenceError",
    "DenseUnitChain",
    "EqStructure",
    "FilterDescriptor",
    "FilterLattice",
    "FiniteLattice",
    "LatticeError",
    "PartialMap",
    "UltrametricSpace",
    "amalgamate",
    "as_base_valued",
    "as_filter_valued",
    "automorphisms",
    "build_from_covers",
    "catalog",
    "check_amalgamation_property",
    "dense_chain_model",
    "filter_lattice",
    "finite_meet_witness",
    "gen_affine_m3",
    "gen_boolean_example",
    "gen_degenerate",
    "generated_filter",
    "homogeneity_transfer",
    "index_profile",
    "induced_substructure",
    "intersection_completeness",
    "invariant_eq_lattice",
    "is_distributive",
    "is_embedding",
    "is_homogeneous",
    "is_isometry",
    "join_irreducibles",
    "lattice_isomorphic",
    "member",
    "orbitals",
    "random_valid_eqstructure",
    "random_valid_space",
    "realizes",
    "roundtrip_check",
    "search_amalgam_failure",
    "to_eq",
    "to_metric",
    "validate_eqstruct",
    "validate_umetric",
    "verify_morphism_transfer",
]
