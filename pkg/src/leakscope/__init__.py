"""Structural train/test leakage in dependency treebanks."""

__version__ = "0.1.0"

from .conllu import (
    ConlluError,
    DepTree,
    InvalidTreeError,
    Sentence,
    Token,
    Treebank,
    parse_conllu,
    read_treebank,
    serialize_conllu,
    to_dep_tree,
    validate_tree,
)
from .graphcore import (
    CanonicalForm,
    LabelMode,
    ReducedTree,
    brute_force_isomorphic,
    canonical_form,
    equivalence_classes,
    reduce,
)
from .leakage import (
    LeakageReport,
    Level,
    SubtreeStyle,
    Weighting,
    decompose_subtrees,
    multi_train_leakage,
    subtree_leakage,
    tree_leakage,
)
from .sampling import (
    InfeasibleSampleError,
    LeakageSplit,
    sample_diverse,
    sample_random,
    size_control,
    split_by_leakage,
    treebank_stats,
)
from .stats import ManifestEntry, RegressionResult, analyze, kfold_cv, ols_fit, read_manifest, spearman
from .surgery import SurgerySpec, count_constructions, remove_modifiers

__all__ = [
    "CanonicalForm", "ConlluError", "DepTree", "InfeasibleSampleError", "InvalidTreeError",
    "LabelMode", "LeakageReport", "LeakageSplit", "Level", "ManifestEntry", "ReducedTree",
    "RegressionResult", "Sentence", "SubtreeStyle", "SurgerySpec", "Token", "Treebank", "Weighting",
    "analyze", "brute_force_isomorphic", "canonical_form", "count_constructions",
    "decompose_subtrees", "equivalence_classes", "kfold_cv", "multi_train_leakage", "ols_fit",
    "parse_conllu", "read_manifest", "read_treebank", "reduce", "remove_modifiers",
    "sample_diverse", "sample_random", "serialize_conllu", "size_control", "spearman",
    "split_by_leakage", "subtree_leakage", "to_dep_tree", "tree_leakage", "treebank_stats",
    "validate_tree",
]
