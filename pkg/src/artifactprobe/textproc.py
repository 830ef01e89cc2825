"""Lowercasing, tokenization, entity merging, and n-gram extraction."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataFormatError, ValidationError

# Marks peeled off token edges into tokens of their own. Internal
# punctuation (hyphens, slashes) stays attached so clinical units like
# "120/80" survive intact.
EDGE_PUNCT = frozenset('.,;:!?()"\'')


@dataclass
class TokenSeq:
    """Lowercase tokens plus a per-token flag marking merged entities."""

    tokens: list[str]
    merged: list[bool]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "TokenSeq":
        toks = list(tokens)
        return cls(toks, [False] * len(toks))


def tokenize(text: str) -> TokenSeq:
    """Lowercase ``text`` and split it into tokens.

    Whitespace separates tokens; leading and trailing punctuation marks
    become separate tokens in their original order. An empty or
    whitespace-only string yields an empty sequence.
    """
    tokens: list[str] = []
    for chunk in text.lower().split():
        lead: list[str] = []
        trail: list[str] = []
        while chunk and chunk[0] in EDGE_PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in EDGE_PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return TokenSeq(tokens, [False] * len(tokens))


@dataclass
class Gazetteer:
    """Multi-word surface forms used for dictionary entity merging.

    Phrases are stored as lowercase token tuples of length >= 2.
    """

    phrases: frozenset[tuple[str, ...]]
    max_phrase_len: int

    @classmethod
    def from_phrases(cls, phrases: Iterable[str]) -> "Gazetteer":
        normalized: set[tuple[str, ...]] = set()
        for phrase in phrases:
            parts = tuple(phrase.lower().split())
            if len(parts) < 2:
                raise ValidationError(
                    f"gazetteer phrase needs at least two tokens: {phrase!r}"
                )
            normalized.add(parts)
        max_len = max((len(p) for p in normalized), default=0)
        return cls(frozenset(normalized), max_len)

    @classmethod
    def from_file(cls, path: str | Path) -> "Gazetteer":
        """Read one phrase per line; '#' lines and blank lines are ignored."""
        phrases: list[str] = []
        with Path(path).open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if len(line.split()) < 2:
                    raise DataFormatError(
                        f"gazetteer phrase needs at least two tokens at line {lineno}"
                    )
                phrases.append(line)
        return cls.from_phrases(phrases)

    def __len__(self) -> int:
        return len(self.phrases)


def merge_entities(seq: TokenSeq, gazetteer: Gazetteer) -> TokenSeq:
    """Replace gazetteer phrases with single underscore-joined tokens.

    Matching is greedy, left to right, longest match first, and
    non-overlapping; tokens outside any match pass through unchanged.
    """
    tokens = seq.tokens
    n = len(tokens)
    out_tokens: list[str] = []
    out_merged: list[bool] = []
    i = 0
    while i < n:
        match_len = 0
        for length in range(min(gazetteer.max_phrase_len, n - i), 1, -1):
            if tuple(tokens[i : i + length]) in gazetteer.phrases:
                match_len = length
                break
        if match_len:
            out_tokens.append("_".join(tokens[i : i + match_len]))
            out_merged.append(True)
            i += match_len
        else:
            out_tokens.append(tokens[i])
            out_merged.append(seq.merged[i])
            i += 1
    return TokenSeq(out_tokens, out_merged)


def extract_features(seq: TokenSeq | Iterable[str], max_n: int) -> list[str]:
    """All contiguous n-grams for n = 1..max_n, joined by single spaces.

    Output order is all unigrams in position order, then all bigrams, and
    so on up to ``max_n``.
    """
    if max_n < 1:
        raise ValidationError(f"max_n must be >= 1, got {max_n}")
    tokens = list(seq)
    features: list[str] = []
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            features.append(" ".join(tokens[i : i + n]))
    return features
