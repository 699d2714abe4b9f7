"""Class-imbalance analysis and correction for mention-pair datasets.

With n mentions and one coreferent set of k, a conversation yields
k(k-1)/2 true pairs and (n-k)(n+k-1)/2 false pairs, so false pairs dominate
for any realistic chain size. Two remedies: random undersampling of the
majority class, and minority oversampling that interpolates between nearest
minority neighbors. Synthetic rows are flagged so gold data stays traceable,
and the generator logs every (base, neighbor, lambda) choice so an external
check can confirm each synthetic vector sits on its gold segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import ParamsMixin
from .corpus import Provenance
from .errors import TelurefError, ValidationError


class DomainError(ValidationError):
    pass


class SingleClassError(TelurefError):
    pass


class TooFewMinorityError(TelurefError):
    pass


def true_pair_count(n: int, k: int) -> int:
    """Pairs inside a coreferent set of k among n mentions: k(k-1)/2."""
    _check_domain(n, k)
    return k * (k - 1) // 2


def false_pair_count(n: int, k: int) -> int:
    """Pairs with at least one mention outside the set: (n-k)(n+k-1)/2."""
    _check_domain(n, k)
    return (n - k) * (n + k - 1) // 2


def _check_domain(n: int, k: int) -> None:
    if n < 2:
        raise DomainError(f"need n >= 2 mentions, got {n}")
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={n}")


def imbalance_curve(n: int) -> list[tuple[int, int, int]]:
    """Rows (k, true_count, false_count) for 0 <= k <= n."""
    if n < 2:
        raise DomainError(f"need n >= 2 mentions, got {n}")
    return [(k, true_pair_count(n, k), false_pair_count(n, k)) for k in range(n + 1)]


def imbalance_curve_csv(n: int) -> str:
    lines = ["k,true_pairs,false_pairs"]
    lines += [f"{k},{t},{f}" for k, t, f in imbalance_curve(n)]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SmoteTrace:
    """One synthetic draw: new = base + lam * (neighbor - base).

    Indices point into the gold rows of the dataset the sampler consumed.
    """

    base_index: int
    neighbor_index: int
    lam: float


@dataclass
class PairDataset:
    vectors: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) bool
    provenance: list[Provenance] = field(default_factory=list)
    synthesis_log: list[SmoteTrace] = field(default_factory=list)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=bool)
        if not self.provenance:
            self.provenance = [Provenance.GOLD] * len(self.labels)
        if self.vectors.ndim != 2 or len(self.labels) != len(self.vectors):
            raise ValidationError(
                f"vectors {self.vectors.shape} and labels {self.labels.shape} disagree"
            )
        if len(self.provenance) != len(self.labels):
            raise ValidationError("provenance list length mismatch")

    def __len__(self):
        return len(self.labels)

    @property
    def n_true(self) -> int:
        return int(self.labels.sum())

    @property
    def n_false(self) -> int:
        return int((~self.labels).sum())

    def subset(self, indices) -> "PairDataset":
        indices = np.asarray(indices, dtype=int)
        return PairDataset(
            vectors=self.vectors[indices],
            labels=self.labels[indices],
            provenance=[self.provenance[i] for i in indices],
        )


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValidationError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


def undersample(dataset: PairDataset, seed: int) -> PairDataset:
    """Drop random majority rows until the classes balance; minority untouched."""
    n_true, n_false = dataset.n_true, dataset.n_false
    if n_true == 0 or n_false == 0:
        raise SingleClassError("undersampling needs both classes present")
    if n_true == n_false:
        return dataset.subset(np.arange(len(dataset)))
    majority_label = n_true > n_false
    minority_count = min(n_true, n_false)
    majority_idx = np.flatnonzero(dataset.labels == majority_label)
    rng = np.random.default_rng(seed)
    keep_majority = rng.choice(majority_idx, size=minority_count, replace=False)
    keep = np.sort(np.concatenate([np.flatnonzero(dataset.labels != majority_label),
                                   keep_majority]))
    return dataset.subset(keep)


def _nearest_minority_neighbors(minority: np.ndarray, k: int) -> np.ndarray:
    """Index matrix (m, k) of each minority row's k nearest minority rows
    by Euclidean distance, excluding itself. Brute force via the gram-matrix
    expansion of squared distances; m is small."""
    sq = np.einsum("ij,ij->i", minority, minority)
    dists = sq[:, None] + sq[None, :] - 2.0 * (minority @ minority.T)
    np.fill_diagonal(dists, np.inf)
    order = np.argsort(dists, axis=1, kind="stable")
    return order[:, :k]


def smote_oversample(dataset: PairDataset, cfg: SmoteConfig) -> PairDataset:
    """Add interpolated minority rows until the classes balance.

    Each synthetic vector is x + lam * (x' - x) for a random minority row x,
    one of its k nearest minority neighbors x', and lam uniform in [0, 1].
    Gold rows are never altered, removed, or relabeled. Interpolation runs
    over the full vector including one-hot dims; fractional categorical
    values are the expected behavior.
    """
    n_true, n_false = dataset.n_true, dataset.n_false
    minority_label = n_true <= n_false
    minority_idx = np.flatnonzero(dataset.labels == minority_label)
    majority_count = max(n_true, n_false)
    if len(minority_idx) == majority_count:
        return PairDataset(
            vectors=dataset.vectors.copy(),
            labels=dataset.labels.copy(),
            provenance=list(dataset.provenance),
        )
    if len(minority_idx) < 2:
        raise TooFewMinorityError(
            f"SMOTE needs >= 2 minority instances, got {len(minority_idx)}"
        )

    minority = dataset.vectors[minority_idx]
    k = min(cfg.k_neighbors, len(minority_idx) - 1)
    neighbors = _nearest_minority_neighbors(minority, k)

    rng = np.random.default_rng(cfg.seed)
    n_needed = majority_count - len(minority_idx)
    synthetic = np.empty((n_needed, dataset.vectors.shape[1]))
    log = []
    for row in range(n_needed):
        base = int(rng.integers(len(minority_idx)))
        neighbor = int(neighbors[base, int(rng.integers(k))])
        lam = float(rng.random())
        synthetic[row] = minority[base] + lam * (minority[neighbor] - minority[base])
        log.append(
            SmoteTrace(
                base_index=int(minority_idx[base]),
                neighbor_index=int(minority_idx[neighbor]),
                lam=lam,
            )
        )

    return PairDataset(
        vectors=np.vstack([dataset.vectors, synthetic]),
        labels=np.concatenate([dataset.labels, np.full(n_needed, minority_label)]),
        provenance=list(dataset.provenance) + [Provenance.SYNTHETIC] * n_needed,
        synthesis_log=log,
    )


def verify_synthetic_convexity(dataset: PairDataset, atol: float = 1e-9) -> bool:
    """Recompute every logged synthetic row from its gold endpoints.

    Checks both the interpolation identity and componentwise convex bounds;
    returns True only if all synthetic rows pass within atol.
    """
    gold_count = len(dataset) - len(dataset.synthesis_log)
    for offset, trace in enumerate(dataset.synthesis_log):
        if not 0.0 <= trace.lam <= 1.0:
            return False
        x = dataset.vectors[trace.base_index]
        x2 = dataset.vectors[trace.neighbor_index]
        s = dataset.vectors[gold_count + offset]
        if not np.allclose(s, x + trace.lam * (x2 - x), rtol=0.0, atol=atol):
            return False
        lo = np.minimum(x, x2) - atol
        hi = np.maximum(x, x2) + atol
        if not (np.all(s >= lo) and np.all(s <= hi)):
            return False
    return True


class RandomUnderSampler(ParamsMixin):
    """fit_resample-style wrapper over undersample for (X, y) arrays."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def fit_resample(self, X, y):
        ds = undersample(PairDataset(vectors=X, labels=y), seed=self.seed)
        return ds.vectors, ds.labels


class SmoteOversampler(ParamsMixin):
    """fit_resample-style wrapper over smote_oversample for (X, y) arrays."""

    def __init__(self, k_neighbors: int = 5, seed: int = 0):
        self.k_neighbors = k_neighbors
        self.seed = seed

    def fit_resample(self, X, y):
        cfg = SmoteConfig(k_neighbors=self.k_neighbors, seed=self.seed)
        ds = smote_oversample(PairDataset(vectors=X, labels=y), cfg)
        return ds.vectors, ds.labels
