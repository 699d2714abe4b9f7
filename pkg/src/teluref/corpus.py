"""Conversation corpus: data model, JSON format, pair generation, adjudication.

A conversation holds speaker-attributed utterances (with SSF tokens), gold
mention spans carrying corrected morphology, and coreference chains. Labeled
antecedent-anaphor pairs are generated exhaustively within a conversation;
cross-conversation pairs are meaningless.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import ValidationError
from .ssf import (
    EMPTY_FS,
    Gender,
    MorphFeatures,
    Number,
    Person,
    SsfToken,
    TooFewFieldsError,
    parse_fs_attribute,
)


class Actor(Enum):
    SPEAKER = "speaker"
    HEARER = "hearer"
    NEITHER = "neither"


class Provenance(Enum):
    GOLD = "gold"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str
    tokens: tuple[SsfToken, ...] = ()


@dataclass(frozen=True)
class Mention:
    id: str
    utterance_index: int
    token_span: tuple[int, int]
    head: str
    morph: MorphFeatures = MorphFeatures()
    part_of_plural: bool = False
    actor: Actor = Actor.NEITHER


@dataclass(frozen=True)
class LabeledPair:
    antecedent: str
    anaphor: str
    label: bool
    provenance: Provenance = Provenance.GOLD


@dataclass(frozen=True)
class AnnotationRecord:
    conversation: str
    antecedent: str
    anaphor: str
    label: bool
    annotator: str


@dataclass
class Conversation:
    id: str
    speakers: list[str] = field(default_factory=list)
    utterances: list[Utterance] = field(default_factory=list)
    mentions: list[Mention] = field(default_factory=list)
    chains: list[list[str]] = field(default_factory=list)

    def mention_by_id(self, mention_id: str) -> Mention:
        for m in self.mentions:
            if m.id == mention_id:
                return m
        raise KeyError(mention_id)

    def document_order(self, mention: Mention) -> tuple:
        return (mention.utterance_index, *mention.token_span, mention.id)

    def mentions_in_order(self) -> list[Mention]:
        return sorted(self.mentions, key=self.document_order)

    def mention_words(self, mention: Mention) -> list[str]:
        tokens = self.utterances[mention.utterance_index].tokens
        start, end = mention.token_span
        return [t.form for t in tokens[start:end]]


class SchemaError(ValidationError):
    def __init__(self, path: str, reason: str = ""):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}" if reason else path)


class MissingThirdReviewError(ValidationError):
    pass


class EmptySplitError(ValidationError):
    pass


# --- JSON (de)serialization ---------------------------------------------

def _require(cond, path, reason):
    if not cond:
        raise SchemaError(path, reason)


def _decode_token(obj, path) -> SsfToken:
    _require(isinstance(obj, dict), path, "token must be an object")
    for key in ("form", "pos", "af"):
        _require(key in obj, f"{path}/{key}", "missing field")
        _require(isinstance(obj[key], str), f"{path}/{key}", "must be a string")
    fs = EMPTY_FS
    if obj["af"]:
        try:
            fs = parse_fs_attribute(obj["af"])
        except TooFewFieldsError as exc:
            raise SchemaError(f"{path}/af", str(exc)) from exc
    return SsfToken(index=0, form=obj["form"], pos=obj["pos"], fs=fs)


def _decode_enum(value, enum_cls, path):
    try:
        return enum_cls(value)
    except ValueError:
        options = [e.value for e in enum_cls]
        raise SchemaError(path, f"expected one of {options}, got {value!r}") from None


def conversation_from_dict(data: dict) -> Conversation:
    """Build and validate a Conversation from parsed corpus JSON."""
    _require(isinstance(data, dict), "", "conversation must be an object")
    _require(isinstance(data.get("id"), str) and data["id"], "/id", "nonempty string required")
    speakers = data.get("speakers", [])
    _require(isinstance(speakers, list), "/speakers", "must be a list")

    utterances = []
    raw_utts = data.get("utterances", [])
    _require(isinstance(raw_utts, list), "/utterances", "must be a list")
    for i, u in enumerate(raw_utts):
        path = f"/utterances/{i}"
        _require(isinstance(u, dict), path, "must be an object")
        _require(isinstance(u.get("speaker"), str), f"{path}/speaker", "string required")
        _require(u["speaker"] in speakers, f"{path}/speaker",
                 f"unknown speaker {u['speaker']!r}")
        _require(isinstance(u.get("text"), str), f"{path}/text", "string required")
        raw_tokens = u.get("tokens", [])
        _require(isinstance(raw_tokens, list), f"{path}/tokens", "must be a list")
        tokens = tuple(
            replace(_decode_token(t, f"{path}/tokens/{j}"), index=j + 1)
            for j, t in enumerate(raw_tokens)
        )
        utterances.append(Utterance(speaker=u["speaker"], text=u["text"], tokens=tokens))

    mentions = []
    seen_ids = set()
    raw_mentions = data.get("mentions", [])
    _require(isinstance(raw_mentions, list), "/mentions", "must be a list")
    for i, m in enumerate(raw_mentions):
        path = f"/mentions/{i}"
        _require(isinstance(m, dict), path, "must be an object")
        _require(isinstance(m.get("id"), str) and m["id"], f"{path}/id", "nonempty string required")
        _require(m["id"] not in seen_ids, f"{path}/id", f"duplicate mention id {m['id']!r}")
        seen_ids.add(m["id"])
        ui = m.get("utterance")
        _require(isinstance(ui, int) and not isinstance(ui, bool), f"{path}/utterance",
                 "integer required")
        _require(0 <= ui < len(utterances), f"{path}/utterance",
                 f"out of range 0..{len(utterances) - 1}")
        span = m.get("span")
        _require(isinstance(span, list) and len(span) == 2, f"{path}/span", "[start, end] required")
        start, end = span
        n_tokens = len(utterances[ui].tokens)
        _require(
            isinstance(start, int) and isinstance(end, int) and 0 <= start < end <= n_tokens,
            f"{path}/span",
            f"need 0 <= start < end <= {n_tokens}, got {span}",
        )
        _require(isinstance(m.get("head"), str), f"{path}/head", "string required")
        morph = MorphFeatures(
            gender=_decode_enum(m.get("gender", "any"), Gender, f"{path}/gender"),
            number=_decode_enum(m.get("number", "zero"), Number, f"{path}/number"),
            person=_decode_enum(m.get("person", "none"), Person, f"{path}/person"),
        )
        _require(isinstance(m.get("pop", False), bool), f"{path}/pop", "boolean required")
        actor = _decode_enum(m.get("actor", "neither"), Actor, f"{path}/actor")
        mentions.append(
            Mention(
                id=m["id"],
                utterance_index=ui,
                token_span=(start, end),
                head=m["head"],
                morph=morph,
                part_of_plural=m.get("pop", False),
                actor=actor,
            )
        )

    chains = []
    raw_chains = data.get("chains", [])
    _require(isinstance(raw_chains, list), "/chains", "must be a list")
    claimed: dict[str, int] = {}
    for i, chain in enumerate(raw_chains):
        path = f"/chains/{i}"
        _require(isinstance(chain, list), path, "must be a list of mention ids")
        _require(len(chain) >= 2, path, "chain needs at least 2 members")
        for j, mid in enumerate(chain):
            _require(isinstance(mid, str), f"{path}/{j}", "mention id must be a string")
            _require(mid in seen_ids, f"{path}/{j}", f"unknown mention id {mid!r}")
            _require(mid not in claimed, f"{path}/{j}",
                     f"mention {mid!r} already in chain {claimed.get(mid)}")
            claimed[mid] = i
        chains.append(list(chain))

    conv = Conversation(
        id=data["id"],
        speakers=list(speakers),
        utterances=utterances,
        mentions=mentions,
        chains=chains,
    )
    _canonicalize(conv)
    return conv


def _canonicalize(conv: Conversation) -> None:
    """Sort mentions and chains into document order so serialization is stable."""
    conv.mentions.sort(key=conv.document_order)
    order = {m.id: i for i, m in enumerate(conv.mentions)}
    conv.chains = sorted(
        (sorted(chain, key=order.__getitem__) for chain in conv.chains),
        key=lambda chain: order[chain[0]],
    )


def conversation_to_dict(conv: Conversation) -> dict:
    return {
        "id": conv.id,
        "speakers": list(conv.speakers),
        "utterances": [
            {
                "speaker": u.speaker,
                "text": u.text,
                "tokens": [
                    {"form": t.form, "pos": t.pos, "af": t.fs.raw_af} for t in u.tokens
                ],
            }
            for u in conv.utterances
        ],
        "mentions": [
            {
                "id": m.id,
                "utterance": m.utterance_index,
                "span": list(m.token_span),
                "head": m.head,
                "gender": m.morph.gender.value,
                "number": m.morph.number.value,
                "person": m.morph.person.value,
                "pop": m.part_of_plural,
                "actor": m.actor.value,
            }
            for m in conv.mentions
        ],
        "chains": [list(chain) for chain in conv.chains],
    }


def canonical_json_bytes(data) -> bytes:
    """Canonical corpus serialization: sorted keys, 2-space indent, UTF-8."""
    return (json.dumps(data, sort_keys=True, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def load_conversation(data: bytes | str) -> Conversation:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from exc
    return conversation_from_dict(parsed)


def save_conversation(conv: Conversation) -> bytes:
    _canonicalize(conv)
    return canonical_json_bytes(conversation_to_dict(conv))


# --- annotation records ---------------------------------------------------

def annotation_to_dict(rec: AnnotationRecord) -> dict:
    return {
        "conversation": rec.conversation,
        "antecedent": rec.antecedent,
        "anaphor": rec.anaphor,
        "label": rec.label,
        "annotator": rec.annotator,
    }


def annotation_from_dict(obj: dict, path: str = "") -> AnnotationRecord:
    _require(isinstance(obj, dict), path, "annotation record must be an object")
    for key in ("conversation", "antecedent", "anaphor", "annotator"):
        _require(isinstance(obj.get(key), str) and obj[key], f"{path}/{key}",
                 "nonempty string required")
    _require(isinstance(obj.get("label"), bool), f"{path}/label", "boolean required")
    return AnnotationRecord(
        conversation=obj["conversation"],
        antecedent=obj["antecedent"],
        anaphor=obj["anaphor"],
        label=obj["label"],
        annotator=obj["annotator"],
    )


def load_annotations(data: bytes | str) -> list[AnnotationRecord]:
    """Parse a JSON-lines annotation log, preserving record order."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    records = []
    for line_no, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"/line/{line_no}", f"invalid JSON: {exc}") from exc
        records.append(annotation_from_dict(obj, f"/line/{line_no}"))
    return records


def save_annotations(records: list[AnnotationRecord]) -> bytes:
    lines = [json.dumps(annotation_to_dict(r), sort_keys=True, ensure_ascii=False)
             for r in records]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


# --- pair generation and statistics ---------------------------------------

def generate_pairs(conv: Conversation) -> list[LabeledPair]:
    """Every unordered mention pair, ordered (antecedent, anaphor) by document
    order; label true iff both mentions share a chain. n mentions yield
    n(n-1)/2 pairs."""
    ordered = conv.mentions_in_order()
    chain_of = {}
    for idx, chain in enumerate(conv.chains):
        for mid in chain:
            chain_of[mid] = idx
    pairs = []
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            a, b = ordered[i], ordered[j]
            label = a.id in chain_of and chain_of.get(a.id) == chain_of.get(b.id)
            pairs.append(LabeledPair(antecedent=a.id, anaphor=b.id, label=label))
    return pairs


def corpus_stats(conversations) -> dict:
    stats = {"conversations": 0, "mentions": 0, "true_pairs": 0, "false_pairs": 0}
    for conv in conversations:
        stats["conversations"] += 1
        stats["mentions"] += len(conv.mentions)
        for pair in generate_pairs(conv):
            stats["true_pairs" if pair.label else "false_pairs"] += 1
    return stats


def split_corpus(conversations, test_fraction: float, seed: int):
    """Split at conversation granularity, deterministically for a given seed."""
    if not 0 < test_fraction < 1:
        raise ValidationError(f"test_fraction must be in (0, 1), got {test_fraction}")
    ordered = sorted(conversations, key=lambda c: c.id)
    rng = random.Random(seed)
    rng.shuffle(ordered)
    n_test = int(len(ordered) * test_fraction + 0.5)
    train, test = ordered[n_test:], ordered[:n_test]
    if not train or not test:
        raise EmptySplitError(
            f"{len(ordered)} conversations at fraction {test_fraction} "
            f"leave an empty side ({len(train)} train / {len(test)} test)"
        )
    return train, test


# --- adjudication ----------------------------------------------------------

@dataclass(frozen=True)
class Conflict:
    antecedent: str
    anaphor: str
    labels: tuple[bool, bool]  # (first annotator, second annotator)
    resolution: bool | None = None  # third reviewer's explicit label, if any


def _label_map(records) -> dict[tuple[str, str], bool]:
    # Later records overwrite earlier ones: the annotation log is append-only
    # and the newest label per pair wins.
    labels = {}
    for rec in records:
        labels[(rec.antecedent, rec.anaphor)] = rec.label
    return labels


def adjudicate(a1, a2, a3=None, require_final: bool = False):
    """Merge two annotators' pair labels into gold labels plus conflicts.

    A pair one annotator labeled and the other never touched counts as an
    implicit false for the silent annotator: the workflow records positive
    pairings, so absence means "not coreferent". A disagreement takes the
    majority label once the third reviewer has explicitly labeled that pair
    (in a 1-1 tie the majority is the reviewer's label); conflicts the
    reviewer has not seen stay unresolved rather than defaulting to false.
    """
    a1, a2 = list(a1), list(a2)
    a3 = list(a3) if a3 is not None else None
    conv_ids = {r.conversation for recs in (a1, a2, a3 or []) for r in recs}
    if len(conv_ids) > 1:
        raise ValidationError(f"records span multiple conversations: {sorted(conv_ids)}")
    m1, m2 = _label_map(a1), _label_map(a2)
    m3 = _label_map(a3) if a3 is not None else {}

    gold: dict[tuple[str, str], bool] = {}
    conflicts: list[Conflict] = []
    for pair in sorted(set(m1) | set(m2)):
        l1 = m1.get(pair, False)
        l2 = m2.get(pair, False)
        if l1 == l2:
            gold[pair] = l1
        else:
            resolution = m3.get(pair)
            conflicts.append(Conflict(pair[0], pair[1], (l1, l2), resolution))
            if resolution is not None:
                gold[pair] = resolution

    unresolved = [c for c in conflicts if c.resolution is None]
    if unresolved and require_final:
        raise MissingThirdReviewError(
            f"{len(unresolved)} conflicting pair(s) without a third review"
        )
    return gold, conflicts
