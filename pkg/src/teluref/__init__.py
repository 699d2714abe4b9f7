"""Mention-pair anaphora resolution for morphologically rich dialogue.

Pipeline stages: parse shallow-parser SSF output, build 113-dim mention and
226-dim pair vectors, rebalance the pair classes, train a small dense network
from scratch, evaluate, and serve a human annotation workflow.
"""

from .corpus import (
    Actor,
    AnnotationRecord,
    Conversation,
    LabeledPair,
    Mention,
    Provenance,
    Utterance,
    adjudicate,
    corpus_stats,
    generate_pairs,
    load_conversation,
    save_conversation,
    split_corpus,
)
from .embeddings import EmbeddingTable, OovPolicy, load_embeddings
from .evaluate import EvalReport, precision_recall_f1, resolve_antecedents
from .features import (
    FEATURE_BLOCKS,
    build_pair_dataset,
    encode_actor,
    encode_gnp,
    mention_vector,
    pair_vector,
)
from .mlp import MentionPairClassifier, MlpConfig, MlpModel, load_model, save_model
from .pipeline import ExperimentConfig, run_ablation, run_experiment
from .sampling import (
    PairDataset,
    RandomUnderSampler,
    SmoteConfig,
    SmoteOversampler,
    false_pair_count,
    imbalance_curve,
    smote_oversample,
    true_pair_count,
    undersample,
)
from .ssf import (
    FeatureStructure,
    Gender,
    MorphFeatures,
    Number,
    Person,
    SsfToken,
    extract_mention_candidates,
    parse_fs_attribute,
    parse_ssf_document,
)
from .synthetic import SyntheticCorpusConfig, generate_synthetic_corpus

__version__ = "0.1.0"

__all__ = [
    "Actor",
    "AnnotationRecord",
    "Conversation",
    "EmbeddingTable",
    "EvalReport",
    "ExperimentConfig",
    "FEATURE_BLOCKS",
    "FeatureStructure",
    "Gender",
    "LabeledPair",
    "Mention",
    "MentionPairClassifier",
    "MlpConfig",
    "MlpModel",
    "MorphFeatures",
    "Number",
    "OovPolicy",
    "PairDataset",
    "Person",
    "Provenance",
    "RandomUnderSampler",
    "SmoteConfig",
    "SmoteOversampler",
    "SsfToken",
    "SyntheticCorpusConfig",
    "Utterance",
    "adjudicate",
    "build_pair_dataset",
    "corpus_stats",
    "encode_actor",
    "encode_gnp",
    "extract_mention_candidates",
    "false_pair_count",
    "generate_pairs",
    "generate_synthetic_corpus",
    "imbalance_curve",
    "load_conversation",
    "load_embeddings",
    "load_model",
    "mention_vector",
    "pair_vector",
    "parse_fs_attribute",
    "parse_ssf_document",
    "precision_recall_f1",
    "resolve_antecedents",
    "run_ablation",
    "run_experiment",
    "save_conversation",
    "save_model",
    "smote_oversample",
    "split_corpus",
    "true_pair_count",
    "undersample",
]
