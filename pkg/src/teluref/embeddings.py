"""Pretrained word vectors: word2vec text loading and total, deterministic lookup.

Out-of-vocabulary words never fail a lookup. The default policy derives a
unit-norm vector from a stable 64-bit hash of the word, so unseen inflected
variants keep a lexical identity instead of collapsing to zero.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import TelurefError, ValidationError


class OovPolicy(Enum):
    ZEROS = "zeros"
    HASHED = "hashed"


class BadHeaderError(ValidationError):
    pass


class DimMismatchError(ValidationError):
    def __init__(self, expected: int, found: int):
        self.expected = expected
        self.found = found
        super().__init__(f"expected {expected} dimensions, file declares {found}")


class BadVectorLineError(ValidationError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


class EmptySpanError(TelurefError):
    pass


def _hashed_unit_vector(word: str, dim: int) -> np.ndarray:
    seed = int.from_bytes(
        hashlib.blake2b(word.encode("utf-8"), digest_size=8).digest(), "little"
    )
    vec = np.random.default_rng(seed).standard_normal(dim)
    norm = np.linalg.norm(vec)
    if norm == 0.0:  # unreachable in practice; keep lookup total anyway
        vec[0] = 1.0
        return vec
    return vec / norm


@dataclass
class EmbeddingTable:
    dim: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)
    oov_policy: OovPolicy = OovPolicy.HASHED

    def __len__(self):
        return len(self.entries)

    def __contains__(self, word: str):
        return word in self.entries

    def lookup(self, word: str) -> np.ndarray:
        vec = self.entries.get(word)
        if vec is not None:
            return vec
        if self.oov_policy is OovPolicy.ZEROS:
            return np.zeros(self.dim)
        return _hashed_unit_vector(word, self.dim)

    def compose(self, words) -> np.ndarray:
        """Elementwise mean over the span's word vectors."""
        words = list(words)
        if not words:
            raise EmptySpanError("cannot embed an empty span")
        total = np.zeros(self.dim)
        for word in words:
            total += self.lookup(word)
        return total / len(words)


def load_embeddings(
    data: bytes | str, expected_dim: int | None = None,
    oov_policy: OovPolicy = OovPolicy.HASHED,
) -> EmbeddingTable:
    """Parse word2vec text format: a "<vocab> <dim>" header, then one
    word + dim floats per line."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = data.splitlines()
    if not lines:
        raise BadHeaderError("empty embedding file")
    header = lines[0].split()
    if len(header) != 2:
        raise BadHeaderError(f"header must be '<vocab_count> <dim>', got {lines[0]!r}")
    try:
        vocab_count, dim = int(header[0]), int(header[1])
    except ValueError:
        raise BadHeaderError(f"non-integer header fields: {lines[0]!r}") from None
    if vocab_count < 0 or dim <= 0:
        raise BadHeaderError(f"invalid header values: {lines[0]!r}")
    if expected_dim is not None and dim != expected_dim:
        raise DimMismatchError(expected_dim, dim)

    entries: dict[str, np.ndarray] = {}
    n_read = 0
    line_no = 1
    for line in lines[1:]:
        line_no += 1
        if n_read == vocab_count:
            if line.strip():
                raise BadVectorLineError(line_no, "more vector lines than the header declares")
            continue
        parts = line.split()
        if len(parts) != dim + 1:
            raise BadVectorLineError(
                line_no, f"expected word + {dim} floats, got {len(parts)} fields"
            )
        try:
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError:
            raise BadVectorLineError(line_no, "non-numeric vector component") from None
        entries[parts[0]] = vec
        n_read += 1
    if n_read != vocab_count:
        raise BadVectorLineError(
            line_no + 1, f"header declares {vocab_count} words, found {n_read}"
        )
    return EmbeddingTable(dim=dim, entries=entries, oov_policy=oov_policy)


def save_embeddings(table: EmbeddingTable) -> bytes:
    lines = [f"{len(table.entries)} {table.dim}"]
    for word, vec in table.entries.items():
        lines.append(word + " " + " ".join(repr(float(x)) for x in vec))
    return ("\n".join(lines) + "\n").encode("utf-8")


def lookup(table: EmbeddingTable, word: str) -> np.ndarray:
    return table.lookup(word)


def compose_span(table: EmbeddingTable, words) -> np.ndarray:
    return table.compose(words)
