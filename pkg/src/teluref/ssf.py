"""Shakti Standard Format (SSF) parsing.

Shallow parsers for Indian languages emit one token record per line:
an optional address column, the surface form, a POS tag, and a feature
structure like ``<fs af='unDu,v,m,sg,3,,A,A' name="unnaaDu">``. The ``af``
value packs root, category, gender, number, person and further morph slots
into comma-separated fields. Chunk brackets ``((`` / ``))`` and
``<Sentence>`` markers carry structure only and never become tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError


class Gender(Enum):
    ANY = "any"
    MALE = "m"
    FEMALE = "f"


class Number(Enum):
    ZERO = "zero"
    SINGULAR = "sg"
    PLURAL = "pl"


class Person(Enum):
    NONE = "none"
    FIRST = "1"
    SECOND = "2"
    THIRD = "3"


# Decode tables for af fields 3-5. Unknown or empty codes degrade to the
# neutral category so the pipeline stays total on noisy parser output.
_GENDER_CODES = {"m": Gender.MALE, "f": Gender.FEMALE}
_NUMBER_CODES = {"sg": Number.SINGULAR, "pl": Number.PLURAL}
_PERSON_CODES = {"1": Person.FIRST, "2": Person.SECOND, "3": Person.THIRD}


@dataclass(frozen=True)
class MorphFeatures:
    gender: Gender = Gender.ANY
    number: Number = Number.ZERO
    person: Person = Person.NONE


NEUTRAL_MORPH = MorphFeatures()


@dataclass(frozen=True)
class FeatureStructure:
    root: str = ""
    category: str = ""
    morph: MorphFeatures = NEUTRAL_MORPH
    name: str | None = None
    raw_af: str = ""


EMPTY_FS = FeatureStructure()


@dataclass(frozen=True)
class SsfToken:
    index: int
    form: str
    pos: str
    fs: FeatureStructure = EMPTY_FS


@dataclass(frozen=True)
class MentionCandidate:
    """A token-level mention span: [start, end) over the sentence tokens."""

    start: int
    end: int
    head_index: int
    head: str
    pos: str
    morph: MorphFeatures


class MalformedLineError(ValidationError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class TooFewFieldsError(ValidationError):
    def __init__(self, af: str, found: int):
        self.af = af
        self.found = found
        super().__init__(f"af value needs >= 5 comma fields, got {found}: {af!r}")


def parse_fs_attribute(af: str) -> FeatureStructure:
    """Decode an af value into root, category and morph features.

    Field layout: root, category, gender, number, person, [case, TAM, ...].
    The verbatim string is kept so serialization can round-trip it.
    """
    fields = af.split(",")
    if len(fields) < 5:
        raise TooFewFieldsError(af, len(fields))
    morph = MorphFeatures(
        gender=_GENDER_CODES.get(fields[2].strip(), Gender.ANY),
        number=_NUMBER_CODES.get(fields[3].strip(), Number.ZERO),
        person=_PERSON_CODES.get(fields[4].strip(), Person.NONE),
    )
    return FeatureStructure(
        root=fields[0].strip(),
        category=fields[1].strip(),
        morph=morph,
        raw_af=af,
    )


# <fs ...> attribute values may be wrapped in single or double quotes; both
# occur in real shallow-parser output.
_FS_ATTR_RE = re.compile(r"""(\w+)=(?:'([^']*)'|"([^"]*)"|(\S+))""")
_SENTENCE_MARK_RE = re.compile(r"^</?Sentence\b|^</?document\b", re.IGNORECASE)
_ADDRESS_RE = re.compile(r"^\d+(\.\d+)*$")


def _parse_fs_tag(tag: str) -> FeatureStructure:
    attrs = {}
    for m in _FS_ATTR_RE.finditer(tag):
        value = next(g for g in m.groups()[1:] if g is not None)
        attrs[m.group(1)] = value
    fs = EMPTY_FS
    if "af" in attrs:
        fs = parse_fs_attribute(attrs["af"])
    if "name" in attrs:
        fs = FeatureStructure(
            root=fs.root,
            category=fs.category,
            morph=fs.morph,
            name=attrs["name"],
            raw_af=fs.raw_af,
        )
    return fs


def parse_ssf_document(
    text: str, strict: bool = False, errors: list | None = None
) -> list[list[SsfToken]]:
    """Parse SSF text into sentences of tokens.

    Sentence boundaries are blank lines or ``<Sentence>`` markers. Token
    lines lacking a form or POS column raise MalformedLineError in strict
    mode; in lenient mode (the default) they are recorded in ``errors``
    (when given) and skipped.
    """
    sentences: list[list[SsfToken]] = []
    current: list[SsfToken] = []

    def flush():
        nonlocal current
        if current:
            sentences.append(current)
            current = []

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            flush()
            continue
        if _SENTENCE_MARK_RE.match(line):
            flush()
            continue

        fs_tag = ""
        head = line
        lt = line.find("<")
        if lt != -1:
            head, fs_tag = line[:lt].rstrip(), line[lt:]

        cols = head.split()
        # Drop a leading numeric address column ("1", "1.2") when enough
        # columns remain for form + POS; a bare numeric form keeps its slot.
        if len(cols) >= 3 and _ADDRESS_RE.match(cols[0]):
            cols = cols[1:]

        if cols and cols[0] in ("((", "))"):
            continue  # chunk boundary: structure only, no token

        if len(cols) < 2:
            err = MalformedLineError(line_no, f"expected form and POS columns: {raw_line!r}")
            if strict:
                raise err
            if errors is not None:
                errors.append(err)
            continue

        form, pos = cols[0], cols[1]
        try:
            fs = _parse_fs_tag(fs_tag) if fs_tag else EMPTY_FS
        except TooFewFieldsError as exc:
            err = MalformedLineError(line_no, str(exc))
            if strict:
                raise err
            if errors is not None:
                errors.append(err)
            fs = EMPTY_FS
        current.append(SsfToken(index=len(current) + 1, form=form, pos=pos, fs=fs))

    flush()
    return sentences


def serialize_ssf_document(sentences: list[list[SsfToken]]) -> str:
    """Emit tokens back as SSF lines, one sentence per blank-separated block.

    Token forms, POS tags and raw af strings are reproduced in order; chunk
    structure from the source is not (mentions attach to words, not chunks).
    """
    blocks = []
    for sentence in sentences:
        lines = []
        for token in sentence:
            parts = [token.form, token.pos]
            if token.fs.raw_af or token.fs.name is not None:
                attrs = []
                if token.fs.raw_af:
                    attrs.append(f"af='{token.fs.raw_af}'")
                if token.fs.name is not None:
                    attrs.append(f'name="{token.fs.name}"')
                parts.append(f"<fs {' '.join(attrs)}>")
            lines.append("\t".join(parts))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# POS prefixes that flag potential entity mentions: nouns, pronouns, and
# finite verbs (VM carries subject agreement in a pro-drop, verb-final
# language). The fs category is the fallback when the tagset differs.
_CANDIDATE_POS_PREFIXES = ("NN", "PRP", "VM")
_CANDIDATE_CATEGORIES = {"n", "pn", "v"}


def is_mention_pos(token: SsfToken) -> bool:
    if any(token.pos.startswith(p) for p in _CANDIDATE_POS_PREFIXES):
        return True
    return token.fs.category in _CANDIDATE_CATEGORIES


def extract_mention_candidates(sentence: list[SsfToken]) -> list[MentionCandidate]:
    """Token-level mention candidates carrying the head token's morphology."""
    candidates = []
    for i, token in enumerate(sentence):
        if is_mention_pos(token):
            candidates.append(
                MentionCandidate(
                    start=i,
                    end=i + 1,
                    head_index=i,
                    head=token.form,
                    pos=token.pos,
                    morph=token.fs.morph,
                )
            )
    return candidates
