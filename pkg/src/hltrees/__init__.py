"""Finite density Halpern-Lauchli computations on homogeneous trees."""

from __future__ import annotations

from . import kernels
from .density_search import (
    DenseSet,
    LevelSelection,
    WitnessPair,
    check_pst_bound,
    find_ls_witness,
    find_subtree_in_set,
    glue_sections,
    ls_exact,
    section_reduce,
    signature,
    udhl_exact,
    weight,
)
from .errors import BudgetError, ConfigurationError, DomainError, HLTreesError, InvariantViolation
from .strong_subtrees import (
    StrongSubtree,
    VectorStrongSubtree,
    canonical_isomorphism,
    count_strong,
    enumerate_strong,
    enumerate_strong2_at,
    q_formula,
    validate,
)
from .tree_core import HomogeneousTree, VectorTree, density, fw_measure

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ConfigurationError",
    "DenseSet",
    "DomainError",
    "HLTreesError",
    "HomogeneousTree",
    "InvariantViolation",
    "LevelSelection",
    "StrongSubtree",
    "VectorStrongSubtree",
    "VectorTree",
    "WitnessPair",
    "canonical_isomorphism",
    "check_pst_bound",
    "count_strong",
    "density",
    "enumerate_strong",
    "enumerate_strong2_at",
    "find_ls_witness",
    "find_subtree_in_set",
    "fw_measure",
    "glue_sections",
    "kernels",
    "ls_exact",
    "q_formula",
    "section_reduce",
    "signature",
    "udhl_exact",
    "validate",
    "weight",
]
