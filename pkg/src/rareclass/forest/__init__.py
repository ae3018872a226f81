"""Classification trees and random forests."""

from .ensemble import (
    ForestConfig,
    ForestModel,
    dumps,
    fit_forest,
    forest_from_dict,
    forest_to_dict,
    load_forest,
    oob_error_curve,
    oob_proba,
    predict_class,
    predict_proba,
    save_forest,
    tree_rng,
    tree_votes,
)
from .tree import DecisionTree, Leaf, Split, SplitNode, best_split, gini, grow_tree

__all__ = [
    "DecisionTree", "ForestConfig", "ForestModel", "Leaf", "Split", "SplitNode",
    "best_split", "dumps", "fit_forest", "forest_from_dict", "forest_to_dict", "gini",
    "grow_tree", "load_forest", "oob_error_curve", "oob_proba", "predict_class",
    "predict_proba", "save_forest", "tree_rng", "tree_votes",
]
