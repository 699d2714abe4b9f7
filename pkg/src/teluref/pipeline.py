"""End-to-end composition: corpus files to trained models to reports.

One experiment seed drives the conversation split, the sampler, and the
network so a run is reproducible from its flags alone. The feature-comparison
harness retrains the same architecture per row, zero-masking every block
except the one under study, on identical splits and seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import Conversation, load_conversation, split_corpus
from .embeddings import EmbeddingTable
from .errors import ValidationError
from .evaluate import EvalReport, precision_recall_f1
from .features import FEATURE_BLOCKS, build_pair_dataset
from .mlp import MlpConfig, MlpModel, TrainReport, init_model, predict_proba_matrix, train
from .sampling import PairDataset, SmoteConfig, smote_oversample, undersample

SAMPLING_STRATEGIES = ("none", "under", "over")

# Always-masked complement per feature-comparison row: the baseline trains on
# embeddings alone, each other row adds back exactly one block.
NON_EMBEDDING_BLOCKS = ("gender", "number", "person", "pop", "actor")


@dataclass(frozen=True)
class ExperimentConfig:
    sampling: str = "over"
    k_neighbors: int = 5
    test_fraction: float = 0.2
    threshold: float = 0.5
    seed: int = 0
    mlp: MlpConfig = MlpConfig()

    def __post_init__(self):
        if self.sampling not in SAMPLING_STRATEGIES:
            raise ValidationError(
                f"sampling must be one of {SAMPLING_STRATEGIES}, got {self.sampling!r}"
            )

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=seed, mlp=replace(self.mlp, seed=seed))


def load_corpus_dir(path) -> list[Conversation]:
    """Load every conversation under a directory: *.json holds one
    conversation, *.jsonl one per line. Sorted by filename for determinism."""
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    conversations = []
    for file in sorted(root.glob("*.json")):
        conversations.append(load_conversation(file.read_bytes()))
    for file in sorted(root.glob("*.jsonl")):
        for line in file.read_text(encoding="utf-8").splitlines():
            if line.strip():
                conversations.append(load_conversation(line))
    return conversations


def apply_sampling(dataset: PairDataset, strategy: str, seed: int,
                   k_neighbors: int = 5) -> PairDataset:
    if strategy == "none":
        return dataset
    if strategy == "under":
        return undersample(dataset, seed=seed)
    if strategy == "over":
        return smote_oversample(dataset, SmoteConfig(k_neighbors=k_neighbors, seed=seed))
    raise ValidationError(f"unknown sampling strategy {strategy!r}")


def train_on_conversations(
    conversations,
    table: EmbeddingTable,
    cfg: ExperimentConfig,
    ablate=(),
) -> tuple[MlpModel, TrainReport, int]:
    """Featurize, rebalance, and train; returns (model, report, n_train_pairs)."""
    dataset = build_pair_dataset(conversations, table, ablate=ablate)
    dataset = apply_sampling(dataset, cfg.sampling, seed=cfg.seed,
                             k_neighbors=cfg.k_neighbors)
    mlp_cfg = replace(cfg.mlp, input_dim=dataset.vectors.shape[1])
    model = init_model(mlp_cfg)
    model, report = train(model, dataset, mlp_cfg)
    return model, report, len(dataset)


def evaluate_on_conversations(
    model: MlpModel,
    conversations,
    table: EmbeddingTable,
    threshold: float = 0.5,
    ablate=(),
) -> EvalReport:
    dataset = build_pair_dataset(conversations, table, ablate=ablate)
    probs = predict_proba_matrix(model, dataset.vectors)
    return precision_recall_f1(probs, dataset.labels, threshold=threshold)


def run_experiment(
    conversations,
    table: EmbeddingTable,
    cfg: ExperimentConfig,
    ablate=(),
) -> tuple[EvalReport, MlpModel]:
    """Split, train on the training conversations, evaluate on the held-out ones."""
    train_convs, test_convs = split_corpus(conversations, cfg.test_fraction, cfg.seed)
    model, _, _ = train_on_conversations(train_convs, table, cfg, ablate=ablate)
    report = evaluate_on_conversations(
        model, test_convs, table, threshold=cfg.threshold, ablate=ablate
    )
    return report, model


def run_ablation(
    conversations,
    table: EmbeddingTable,
    feature_blocks=("gender", "number", "person", "pop"),
    cfg: ExperimentConfig = ExperimentConfig(),
) -> list[tuple[str, EvalReport]]:
    """Baseline (embeddings only) plus embeddings+one block per row, all on
    identical splits and seeds so rows are comparable."""
    for block in feature_blocks:
        if block not in FEATURE_BLOCKS or block == "embedding":
            raise ValidationError(f"cannot ablate over block {block!r}")
    rows = []
    for label in ("none", *feature_blocks):
        keep = () if label == "none" else (label,)
        ablate = tuple(b for b in NON_EMBEDDING_BLOCKS if b not in keep)
        report, _ = run_experiment(conversations, table, cfg, ablate=ablate)
        rows.append((label, report))
    return rows
