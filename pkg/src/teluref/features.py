"""Mention and pair feature vectors.

A mention vector is the span embedding followed by three one-hot morphology
blocks, a part-of-plural bit, and a two-slot speaker/hearer indicator:
``[embedding(D) | gender(3) | number(3) | person(4) | pop(1) | actor(2)]``,
113 values at the standard D=100. A pair vector concatenates the antecedent
vector before the anaphor vector, so order encodes the roles.

Every named block can be zeroed out in place, which keeps one network input
width across feature-comparison runs instead of resizing the architecture.
"""

from __future__ import annotations

import numpy as np

from .base import check_vector
from .corpus import Actor, Conversation, Mention, Utterance, generate_pairs
from .embeddings import EmbeddingTable
from .errors import ValidationError
from .sampling import PairDataset
from .ssf import Gender, MorphFeatures, Number, Person

GNP_DIMS = 10
EXTRA_DIMS = GNP_DIMS + 1 + 2  # morphology + pop + actor
MENTION_DIMS = 100 + EXTRA_DIMS
PAIR_DIMS = 2 * MENTION_DIMS

_GENDER_ORDER = (Gender.ANY, Gender.MALE, Gender.FEMALE)
_NUMBER_ORDER = (Number.ZERO, Number.SINGULAR, Number.PLURAL)
_PERSON_ORDER = (Person.NONE, Person.FIRST, Person.SECOND, Person.THIRD)


class DimensionError(ValidationError):
    pass


def encode_gnp(morph: MorphFeatures) -> np.ndarray:
    """One-hot gender(3) ++ number(3) ++ person(4)."""
    vec = np.zeros(GNP_DIMS)
    vec[_GENDER_ORDER.index(morph.gender)] = 1.0
    vec[3 + _NUMBER_ORDER.index(morph.number)] = 1.0
    vec[6 + _PERSON_ORDER.index(morph.person)] = 1.0
    return vec


def encode_actor(actor: Actor) -> np.ndarray:
    """Speaker -> [1,0], hearer -> [0,1], neither -> [0,0]."""
    vec = np.zeros(2)
    if actor is Actor.SPEAKER:
        vec[0] = 1.0
    elif actor is Actor.HEARER:
        vec[1] = 1.0
    return vec


def block_slices(dim: int) -> dict[str, slice]:
    """Named feature blocks within a mention vector of embedding width dim."""
    return {
        "embedding": slice(0, dim),
        "gender": slice(dim, dim + 3),
        "number": slice(dim + 3, dim + 6),
        "person": slice(dim + 6, dim + 10),
        "pop": slice(dim + 10, dim + 11),
        "actor": slice(dim + 11, dim + 13),
    }


FEATURE_BLOCKS = ("embedding", "gender", "number", "person", "pop", "actor")


def ablate_blocks(vector: np.ndarray, blocks, dim: int) -> np.ndarray:
    """Return a copy with the named blocks zeroed; other dims untouched."""
    slices = block_slices(dim)
    out = np.array(vector, dtype=np.float64, copy=True)
    for name in blocks:
        if name not in slices:
            raise ValidationError(
                f"unknown feature block {name!r}; expected one of {FEATURE_BLOCKS}"
            )
        out[slices[name]] = 0.0
    return out


def mention_vector(
    mention: Mention, utterance: Utterance, table: EmbeddingTable
) -> np.ndarray:
    start, end = mention.token_span
    words = [t.form for t in utterance.tokens[start:end]]
    return np.concatenate(
        [
            table.compose(words),
            encode_gnp(mention.morph),
            [1.0 if mention.part_of_plural else 0.0],
            encode_actor(mention.actor),
        ]
    )


def pair_vector(antecedent: np.ndarray, anaphor: np.ndarray) -> np.ndarray:
    """Concatenate antecedent ++ anaphor mention vectors."""
    a = check_vector(antecedent, "antecedent")
    b = check_vector(anaphor, "anaphor")
    if a.size != b.size:
        raise DimensionError(
            f"mention vectors disagree in length: {a.size} vs {b.size}"
        )
    return np.concatenate([a, b])


def conversation_mention_vectors(
    conv: Conversation, table: EmbeddingTable, ablate=()
) -> dict[str, np.ndarray]:
    """Vector for every mention in the conversation, keyed by mention id."""
    vectors = {}
    for mention in conv.mentions:
        vec = mention_vector(mention, conv.utterances[mention.utterance_index], table)
        if ablate:
            vec = ablate_blocks(vec, ablate, table.dim)
        vectors[mention.id] = vec
    return vectors


def build_pair_dataset(conversations, table: EmbeddingTable, ablate=()):
    """Featurize every within-conversation mention pair into a PairDataset."""
    rows = []
    labels = []
    for conv in conversations:
        vectors = conversation_mention_vectors(conv, table, ablate=ablate)
        for pair in generate_pairs(conv):
            rows.append(pair_vector(vectors[pair.antecedent], vectors[pair.anaphor]))
            labels.append(pair.label)
    width = 2 * (table.dim + EXTRA_DIMS)
    vectors_arr = np.array(rows) if rows else np.zeros((0, width))
    return PairDataset(vectors=vectors_arr, labels=np.array(labels, dtype=bool))
