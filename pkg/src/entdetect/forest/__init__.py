"""Per-observable random-forest recommenders."""

from .cart import Leaf, Node, Split, binary_entropy
from .data import (
    TrainingSet,
    default_samples_per_class,
    generate_training_data,
    relabel_row,
    squared_expectation_matrix,
)
from .model import (
    CompiledForest,
    DecisionTree,
    Forest,
    ForestConfig,
    ForestModel,
    ForestStrategy,
    fit_forest,
    fit_tree,
    forest_score,
    load_model,
    recommend,
    save_model,
    train_model,
    tree_score,
)

__all__ = [
    "CompiledForest",
    "DecisionTree",
    "Forest",
    "ForestConfig",
    "ForestModel",
    "ForestStrategy",
    "Leaf",
    "Node",
    "Split",
    "TrainingSet",
    "binary_entropy",
    "default_samples_per_class",
    "fit_forest",
    "fit_tree",
    "forest_score",
    "generate_training_data",
    "load_model",
    "recommend",
    "relabel_row",
    "save_model",
    "squared_expectation_matrix",
    "train_model",
    "tree_score",
]
