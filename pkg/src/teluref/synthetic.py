"""Synthetic dialogue corpus with learnable coreference structure.

Real annotated dialogue corpora for this task are private, so tests and
demos run on generated conversations whose chains follow three recoverable
signals: morphological agreement (entities in one conversation carry
pairwise-distinct gender/number/person signatures), recency (follow-up
references prefer the most recently mentioned entity), and lexical
similarity (an entity's alias words share a base embedding vector, while
pronoun forms are deliberately ambiguous between entities so morphology has
real work to do).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Actor, Conversation, Mention, Utterance
from .embeddings import EmbeddingTable, OovPolicy
from .ssf import Gender, MorphFeatures, Number, Person, SsfToken, parse_fs_attribute

_GENDER_CODE = {Gender.ANY: "", Gender.MALE: "m", Gender.FEMALE: "f"}
_NUMBER_CODE = {Number.ZERO: "", Number.SINGULAR: "sg", Number.PLURAL: "pl"}
_PERSON_CODE = {Person.NONE: "", Person.FIRST: "1", Person.SECOND: "2", Person.THIRD: "3"}

_PRONOUNS = {
    Number.SINGULAR: "pron_sg",
    Number.PLURAL: "pron_pl",
}
_SELF_PRONOUN = "pron_me"
_GROUP_PRONOUN = "pron_we"
_HEARER_PRONOUN = "pron_you"
_MODIFIERS = ("mod_big", "mod_small", "mod_old", "mod_new")
_FILLERS = tuple(f"filler_{i:02d}" for i in range(16))


@dataclass(frozen=True)
class SyntheticCorpusConfig:
    n_conversations: int = 40
    seed: int = 0
    dim: int = 100
    alias_noise: float = 0.25
    pronoun_rate: float = 0.6


@dataclass(frozen=True)
class _EntityConcept:
    name: str
    morph: MorphFeatures
    aliases: tuple[str, ...]


def _entity_pool() -> list[_EntityConcept]:
    pool = []
    specs = [
        ("man", MorphFeatures(Gender.MALE, Number.SINGULAR, Person.THIRD), 10),
        ("woman", MorphFeatures(Gender.FEMALE, Number.SINGULAR, Person.THIRD), 10),
        ("thing", MorphFeatures(Gender.ANY, Number.SINGULAR, Person.THIRD), 10),
        ("crowd", MorphFeatures(Gender.ANY, Number.PLURAL, Person.THIRD), 6),
    ]
    for stem, morph, count in specs:
        for i in range(count):
            name = f"{stem}{i:02d}"
            pool.append(
                _EntityConcept(
                    name=name,
                    morph=morph,
                    aliases=tuple(f"{name}_{suffix}" for suffix in "abc"),
                )
            )
    return pool


def _build_embeddings(cfg: SyntheticCorpusConfig, pool) -> EmbeddingTable:
    rng = np.random.default_rng(cfg.seed + 7)

    def unit(vec):
        return vec / np.linalg.norm(vec)

    entries: dict[str, np.ndarray] = {}
    for concept in pool:
        base = unit(rng.standard_normal(cfg.dim))
        for alias in concept.aliases:
            entries[alias] = unit(base + cfg.alias_noise * rng.standard_normal(cfg.dim))
    flat_words = (
        list(_PRONOUNS.values())
        + [_SELF_PRONOUN, _GROUP_PRONOUN, _HEARER_PRONOUN]
        + list(_MODIFIERS)
        + list(_FILLERS)
    )
    for word in flat_words:
        entries[word] = unit(rng.standard_normal(cfg.dim))
    return EmbeddingTable(dim=cfg.dim, entries=entries, oov_policy=OovPolicy.HASHED)


@dataclass
class _MentionEvent:
    word: str  # head word
    morph: MorphFeatures
    thread: str  # chain grouping key
    actor: Actor = Actor.NEITHER
    pop: bool = False
    modifier: str | None = None
    needs_first_speaker: bool = False
    af_category: str = "n"
    af_person: str = "3"
    pos: str = "NN"


def _plan_events(rng, pool, cfg) -> list[_MentionEvent]:
    """Schedule one conversation's mention events with recency preference."""
    males = [c for c in pool if c.morph.gender is Gender.MALE]
    females = [c for c in pool if c.morph.gender is Gender.FEMALE]
    neuters = [c for c in pool
               if c.morph.gender is Gender.ANY and c.morph.number is Number.SINGULAR]
    plurals = [c for c in pool if c.morph.number is Number.PLURAL]

    concepts = [
        males[rng.integers(len(males))],
        females[rng.integers(len(females))],
        neuters[rng.integers(len(neuters))],
    ]
    if rng.random() < 0.5:
        concepts.append(plurals[rng.integers(len(plurals))])

    def alias_event(concept) -> _MentionEvent:
        alias = concept.aliases[rng.integers(len(concept.aliases))]
        modifier = _MODIFIERS[rng.integers(len(_MODIFIERS))] if rng.random() < 0.2 else None
        return _MentionEvent(word=alias, morph=concept.morph, thread=concept.name,
                             modifier=modifier)

    def pronoun_event(concept) -> _MentionEvent:
        word = _PRONOUNS[concept.morph.number]
        return _MentionEvent(word=word, morph=concept.morph, thread=concept.name,
                             af_category="pn", pos="PRP")

    remaining = {c.name: int(rng.integers(1, 4)) for c in concepts}
    by_name = {c.name: c for c in concepts}
    introduced: list[str] = []
    events: list[_MentionEvent] = []
    while any(remaining.values()):
        fresh = [n for n in remaining if n not in introduced and remaining[n] > 0]
        if fresh and (not introduced or rng.random() < 0.55):
            name = fresh[int(rng.integers(len(fresh)))]
            events.append(alias_event(by_name[name]))
            introduced.append(name)
        else:
            active = [n for n in introduced if remaining[n] > 0]
            if not active:
                continue
            # weight recently mentioned threads higher: recency drives reference
            weights = np.array(
                [3.0 if n == introduced[-1] else 1.0 for n in active]
            )
            name = active[int(rng.choice(len(active), p=weights / weights.sum()))]
            concept = by_name[name]
            if rng.random() < cfg.pronoun_rate:
                events.append(pronoun_event(concept))
            else:
                events.append(alias_event(concept))
            introduced.remove(name)
            introduced.append(name)
        name = events[-1].thread
        remaining[name] -= 1

    if rng.random() < 0.5:
        self_morph = MorphFeatures(Gender.ANY, Number.SINGULAR, Person.FIRST)
        for _ in range(int(rng.integers(2, 4))):
            events.append(
                _MentionEvent(word=_SELF_PRONOUN, morph=self_morph, thread="self",
                              actor=Actor.SPEAKER, needs_first_speaker=True,
                              af_category="pn", af_person="1", pos="PRP")
            )
    if rng.random() < 0.4:
        group_morph = MorphFeatures(Gender.ANY, Number.PLURAL, Person.FIRST)
        for _ in range(2):
            events.append(
                _MentionEvent(word=_GROUP_PRONOUN, morph=group_morph, thread="group",
                              actor=Actor.SPEAKER, pop=True, needs_first_speaker=True,
                              af_category="pn", af_person="1", pos="PRP")
            )
    if rng.random() < 0.3:
        hearer_morph = MorphFeatures(Gender.ANY, Number.SINGULAR, Person.SECOND)
        events.append(
            _MentionEvent(word=_HEARER_PRONOUN, morph=hearer_morph, thread="hearer",
                          actor=Actor.HEARER, af_category="pn", af_person="2",
                          pos="PRP")
        )
    return events


def _event_af(event: _MentionEvent) -> str:
    # The "parser output" af deliberately lacks gender on pronouns; mention
    # records carry the corrected morphology, mirroring the annotation flow.
    if event.af_category == "pn":
        return f"{event.word},pn,,{_NUMBER_CODE[event.morph.number]},{event.af_person},,"
    return (
        f"{event.word},n,{_GENDER_CODE[event.morph.gender]},"
        f"{_NUMBER_CODE[event.morph.number]},3,,"
    )


def _assemble_conversation(conv_id, events, rng) -> Conversation:
    speakers = ["A", "B"]
    utt_events: list[list[_MentionEvent]] = [[]]
    u = 0

    def speaker_of(index):
        return speakers[index % 2]

    for event in events:
        while True:
            if len(utt_events[u]) >= 2 or (
                event.needs_first_speaker and speaker_of(u) != "A"
            ):
                u += 1
                if u == len(utt_events):
                    utt_events.append([])
                continue
            break
        utt_events[u].append(event)
        if rng.random() < 0.45:
            u += 1
            if u == len(utt_events):
                utt_events.append([])

    utterances = []
    mentions = []
    chains: dict[str, list[str]] = {}
    for ui, bucket in enumerate(utt_events):
        tokens: list[SsfToken] = []

        def push(form, pos, af):
            tokens.append(
                SsfToken(index=len(tokens) + 1, form=form, pos=pos,
                         fs=parse_fs_attribute(af))
            )

        if rng.random() < 0.5 or not bucket:
            filler = _FILLERS[rng.integers(len(_FILLERS))]
            push(filler, "RB", f"{filler},adv,,,,")
        for event in bucket:
            start = len(tokens)
            if event.modifier is not None:
                push(event.modifier, "JJ", f"{event.modifier},adj,,,,")
            push(event.word, event.pos, _event_af(event))
            mention_id = f"m{len(mentions) + 1}"
            mentions.append(
                Mention(
                    id=mention_id,
                    utterance_index=ui,
                    token_span=(start, len(tokens)),
                    head=event.word,
                    morph=event.morph,
                    part_of_plural=event.pop,
                    actor=event.actor,
                )
            )
            chains.setdefault(event.thread, []).append(mention_id)
            if rng.random() < 0.4:
                filler = _FILLERS[rng.integers(len(_FILLERS))]
                push(filler, "RB", f"{filler},adv,,,,")

        utterances.append(
            Utterance(
                speaker=speaker_of(ui),
                text=" ".join(t.form for t in tokens),
                tokens=tuple(tokens),
            )
        )

    return Conversation(
        id=conv_id,
        speakers=speakers,
        utterances=utterances,
        mentions=mentions,
        chains=[ids for ids in chains.values() if len(ids) >= 2],
    )


def generate_synthetic_corpus(
    cfg: SyntheticCorpusConfig = SyntheticCorpusConfig(),
) -> tuple[list[Conversation], EmbeddingTable]:
    """Generate conversations plus the embedding table covering their vocabulary."""
    pool = _entity_pool()
    table = _build_embeddings(cfg, pool)
    rng = np.random.default_rng(cfg.seed)
    conversations = []
    for i in range(cfg.n_conversations):
        events = _plan_events(rng, pool, cfg)
        conversations.append(_assemble_conversation(f"conv{i:03d}", events, rng))
    return conversations, table
