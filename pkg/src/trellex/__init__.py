"""Convolutional codes, trellis codes and their expander-based lifts."""

from .block import LinearBlockCode, full_space, repetition, single_parity_check
from .construction import (
    ConstructionSpec,
    ExpanderTrellisCode,
    default_spec,
    ec_build_B,
    ec_build_phi,
    ec_column_bound_check,
    ec_extract_generator,
    ec_rate_degree_report,
    ec_theorem_main_report,
    ec_verify_claims,
    ec_witness_check,
    micro_spec,
)
from .conv import ConvolutionalCode, PolyGeneratorMatrix, cc_bounds, cc_search_profile
from .expander import BipartiteGraph, xg_complete, xg_copies, xg_gamma, xg_mixing_check, xg_random_regular
from .ff import FieldElement, FieldSpec, ext_embed, make_field, nullspace, rank, rref, subspace_intersect
from .trellis import LabeledDigraph, TrellisCode, tc_bounds, tc_example1, tc_validate

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "ConstructionSpec",
    "ConvolutionalCode",
    "ExpanderTrellisCode",
    "FieldElement",
    "FieldSpec",
    "LabeledDigraph",
    "LinearBlockCode",
    "PolyGeneratorMatrix",
    "TrellisCode",
    "cc_bounds",
    "cc_search_profile",
    "default_spec",
    "ec_build_B",
    "ec_build_phi",
    "ec_column_bound_check",
    "ec_extract_generator",
    "ec_rate_degree_report",
    "ec_theorem_main_report",
    "ec_verify_claims",
    "ec_witness_check",
    "ext_embed",
    "full_space",
    "make_field",
    "micro_spec",
    "nullspace",
    "rank",
    "repetition",
    "rref",
    "single_parity_check",
    "subspace_intersect",
    "tc_bounds",
    "tc_example1",
    "tc_validate",
    "xg_complete",
    "xg_copies",
    "xg_gamma",
    "xg_mixing_check",
    "xg_random_regular",
]
