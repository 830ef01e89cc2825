"""Pretrained word-vector loading and averaged sentence representations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataFormatError

log = logging.getLogger(__name__)


@dataclass
class EmbeddingTable:
    """Token vectors of a fixed width, immutable after loading."""

    dim: int
    vectors: dict[str, np.ndarray]
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors


def load_vectors(path: str | Path) -> EmbeddingTable:
    """Parse a word-vector text file: token followed by ``dim`` decimals.

    An optional first line holding exactly two integers is treated as a
    ``count dim`` header; otherwise the first data row fixes the width.
    On duplicate tokens the first occurrence wins and a warning is
    recorded on the table.
    """
    path = Path(path)
    warnings: list[str] = []
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    declared_count: int | None = None
    with path.open("r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    start = 0
    if lines:
        first = lines[0].split()
        if len(first) == 2:
            try:
                declared_count, dim = int(first[0]), int(first[1])
                start = 1
            except ValueError:
                pass
    if dim is not None and dim < 1:
        raise DataFormatError(f"header declares non-positive dimension {dim}")
    for lineno in range(start, len(lines)):
        line = lines[lineno].strip()
        if not line:
            continue
        parts = line.split()
        if dim is None:
            dim = len(parts) - 1
            if dim < 1:
                raise DataFormatError(f"no vector values at line {lineno + 1}")
        if len(parts) - 1 != dim:
            raise DataFormatError(
                f"dim mismatch line {lineno + 1}: expected {dim} values, "
                f"got {len(parts) - 1}"
            )
        token = parts[0]
        try:
            values = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise DataFormatError(f"non-numeric value at line {lineno + 1}") from exc
        if token in vectors:
            warnings.append(f"duplicate token {token!r} at line {lineno + 1} ignored")
            continue
        vectors[token] = values
    if not vectors:
        raise DataFormatError(f"empty vector file: {path}")
    if declared_count is not None and declared_count != len(vectors):
        warnings.append(
            f"header declares {declared_count} rows but {len(vectors)} were read"
        )
    for msg in warnings:
        log.warning("%s: %s", path.name, msg)
    assert dim is not None
    return EmbeddingTable(dim=dim, vectors=vectors, warnings=warnings)


def embed_tokens(
    tokens: Iterable[str], table: EmbeddingTable
) -> tuple[np.ndarray, float]:
    """Average the vectors of in-vocabulary tokens.

    Returns the mean vector and a coverage ratio (tokens that contributed
    a vector over total tokens). A merged entity token absent from the
    table falls back to the mean of its underscore-separated sub-token
    vectors; tokens still unresolved are skipped. With no resolvable
    tokens (including the empty sequence) the zero vector and coverage 0
    are returned so downstream filtering can still process the example.
    """
    token_list = list(tokens)
    if not token_list:
        log.warning("embedding an empty token sequence; returning the zero vector")
        return np.zeros(table.dim), 0.0
    contributions: list[np.ndarray] = []
    covered = 0
    for token in token_list:
        vec = table.vectors.get(token)
        if vec is None and "_" in token:
            subs = [table.vectors[s] for s in token.split("_") if s in table.vectors]
            if subs:
                vec = np.mean(subs, axis=0)
        if vec is not None:
            contributions.append(vec)
            covered += 1
    if not contributions:
        return np.zeros(table.dim), 0.0
    return np.mean(contributions, axis=0), covered / len(token_list)
