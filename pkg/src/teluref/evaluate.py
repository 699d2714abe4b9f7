"""Pair-classification metrics and antecedent resolution.

Metrics are computed over pairs, not chains: precision, recall and F1 from
the confusion counts at a decision threshold, with zero-denominator ratios
reported as 0 and flagged. Resolution picks, for each anaphor, the highest
scoring earlier mention above the threshold, breaking ties toward the most
recent candidate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import Conversation
from .embeddings import EmbeddingTable
from .errors import ValidationError
from .features import conversation_mention_vectors, pair_vector
from .mlp import bce_loss, predict_pair


class LengthMismatchError(ValidationError):
    pass


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    mean_loss: float
    threshold: float
    tp: int
    fp: int
    tn: int
    fn: int
    precision_defined: bool = True
    recall_defined: bool = True
    f1_defined: bool = True

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mean_loss": self.mean_loss,
            "threshold": self.threshold,
            "confusion": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
            "precision_defined": self.precision_defined,
            "recall_defined": self.recall_defined,
            "f1_defined": self.f1_defined,
        }


def precision_recall_f1(probabilities, labels, threshold: float = 0.5) -> EvalReport:
    """Confusion counts and P/R/F1 at the threshold (predict true iff p > t)."""
    p = np.asarray(probabilities, dtype=np.float64)
    y = np.asarray(labels, dtype=bool)
    if p.shape != y.shape:
        raise LengthMismatchError(
            f"{p.shape[0] if p.ndim else 0} probabilities vs {y.shape[0] if y.ndim else 0} labels"
        )
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must be in (0, 1), got {threshold}")
    pred = p > threshold
    tp = int(np.sum(pred & y))
    fp = int(np.sum(pred & ~y))
    tn = int(np.sum(~pred & ~y))
    fn = int(np.sum(~pred & y))

    precision_defined = (tp + fp) > 0
    recall_defined = (tp + fn) > 0
    precision = tp / (tp + fp) if precision_defined else 0.0
    recall = tp / (tp + fn) if recall_defined else 0.0
    f1_defined = precision_defined and recall_defined and (precision + recall) > 0
    f1 = 2 * precision * recall / (precision + recall) if f1_defined else 0.0
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        mean_loss=bce_loss(p, y) if len(p) else 0.0,
        threshold=threshold,
        tp=tp, fp=fp, tn=tn, fn=fn,
        precision_defined=precision_defined,
        recall_defined=recall_defined,
        f1_defined=f1_defined,
    )


def resolve_antecedents(
    conv: Conversation,
    model,
    table: EmbeddingTable,
    threshold: float = 0.5,
) -> dict[str, str | None]:
    """Antecedent choice per anaphor: argmax pair probability over earlier
    mentions, None when nothing clears the threshold.

    ``model`` is either an MlpModel or any callable mapping a pair vector to
    a probability (handy for stubbing fixed scores).
    """
    scorer = model if callable(model) else (lambda vec: predict_pair(model, vec))
    ordered = conv.mentions_in_order()
    vectors = conversation_mention_vectors(conv, table)
    result: dict[str, str | None] = {}
    for j, anaphor in enumerate(ordered):
        if j == 0:
            continue
        best_id = None
        best_score = -np.inf
        for i in range(j):
            candidate = ordered[i]
            score = float(scorer(pair_vector(vectors[candidate.id], vectors[anaphor.id])))
            if score >= best_score:  # >= so later (more recent) candidates win ties
                best_score = score
                best_id = candidate.id
        result[anaphor.id] = best_id if best_score > threshold else None
    return result


def format_report_table(rows: list[tuple[str, EvalReport]], title_col: str = "Run") -> str:
    """Aligned plain-text table in Loss / Precision / Recall / F1 column order."""
    header = [title_col, "Loss", "Precision", "Recall", "F1"]
    body = [
        [
            label,
            f"{report.mean_loss:.4f}",
            f"{100 * report.precision:.1f}",
            f"{100 * report.recall:.1f}",
            f"{100 * report.f1:.1f}",
        ]
        for label, report in rows
    ]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = [
        "  ".join(value.ljust(widths[i]) for i, value in enumerate(row)).rstrip()
        for row in [header] + body
    ]
    return "\n".join(lines) + "\n"


def report_rows_to_json(rows: list[tuple[str, EvalReport]]) -> str:
    return json.dumps(
        [{"run": label, **report.to_dict()} for label, report in rows],
        indent=2,
        sort_keys=True,
    ) + "\n"
