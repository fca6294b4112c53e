"""Causal discovery on incidence matrices: PC, GES and LiNGAM."""

from .citests import CiResult, DSeparationOracle, GSquareTest, gsq_ci_test
from .ges import ges
from .graphs import Cpdag, WeightedDag, dag_to_cpdag, meek_orient
from .lingam import direct_lingam, ica_lingam, search_causal_order
from .pc import pc
from .scores import DecomposableScore, local_score

__all__ = [
    "CiResult",
    "Cpdag",
    "DSeparationOracle",
    "DecomposableScore",
    "GSquareTest",
    "WeightedDag",
    "dag_to_cpdag",
    "direct_lingam",
    "ges",
    "gsq_ci_test",
    "ica_lingam",
    "local_score",
    "meek_orient",
    "pc",
    "search_causal_order",
]
