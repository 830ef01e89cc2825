"""Loading, validation, and concatenation of labeled sentence-pair corpora.

Input files are UTF-8, line-delimited JSON, one record per line, using the
SNLI/MedNLI field convention by default (``sentence1`` = premise,
``sentence2`` = hypothesis, ``gold_label``, ``pairID``). Corpora exported
with other field names can be ingested by passing a custom ``FieldMap``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .errors import DataFormatError, ValidationError

LABELS = ("contradiction", "entailment", "neutral")
SPLITS = ("train", "dev", "test")

# A class-balanced corpus has every label share within one percentage point
# of an even three-way split.
BALANCE_TOLERANCE = 0.01


@dataclass(frozen=True)
class PairExample:
    """One premise/hypothesis/label record with a stable id and split tag."""

    id: str
    premise: str
    hypothesis: str
    label: str
    split: str


@dataclass(frozen=True)
class FieldMap:
    """Record field names; defaults follow the SNLI/MedNLI convention."""

    premise: str = "sentence1"
    hypothesis: str = "sentence2"
    label: str = "gold_label"
    example_id: str = "pairID"


@dataclass
class Dataset:
    """An ordered collection of examples; iteration order is file order."""

    examples: list[PairExample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[PairExample]:
        return iter(self.examples)

    def __getitem__(self, i: int) -> PairExample:
        return self.examples[i]

    def ids(self) -> list[str]:
        return [ex.id for ex in self.examples]

    def subset(self, split: str) -> "Dataset":
        """Examples carrying the given split tag, file order preserved."""
        return Dataset([ex for ex in self.examples if ex.split == split])

    def label_counts(self) -> dict[str, int]:
        return dict(Counter(ex.label for ex in self.examples))


@dataclass
class ValidationReport:
    size: int
    label_counts: dict[str, int]
    split_counts: dict[str, int]
    balance_ratio: dict[str, float]
    balanced: bool
    warnings: list[str]


def load_records(
    path: str | Path,
    split: str = "train",
    field_map: FieldMap | None = None,
) -> Dataset:
    """Read one dataset split from a line-delimited JSON file.

    Every example in the returned dataset carries ``split`` as its split
    tag. Labels are trimmed and lowercased before being checked against the
    three-class set. Blank lines are skipped.

    Raises:
        DataFormatError: on unparseable lines, missing fields, labels
            outside the three-class set, or duplicate ids. Messages cite
            the offending 1-based line number.
    """
    fm = field_map or FieldMap()
    if split not in SPLITS:
        raise ValidationError(f"unknown split {split!r}; expected one of {SPLITS}")
    path = Path(path)
    examples: list[PairExample] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"malformed record at line {lineno}: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise DataFormatError(f"malformed record at line {lineno}: not an object")
            missing = [
                name
                for name in (fm.premise, fm.hypothesis, fm.label, fm.example_id)
                if name not in record
            ]
            if missing:
                if fm.label in missing:
                    raise DataFormatError(f"missing label at line {lineno}")
                raise DataFormatError(
                    f"missing field(s) {', '.join(missing)} at line {lineno}"
                )
            label = str(record[fm.label]).strip().lower()
            if label not in LABELS:
                raise DataFormatError(
                    f"unknown label {record[fm.label]!r} at line {lineno}"
                )
            example_id = str(record[fm.example_id]).strip()
            if not example_id:
                raise DataFormatError(f"empty id at line {lineno}")
            if example_id in seen:
                raise DataFormatError(f"duplicate id {example_id!r} at line {lineno}")
            hypothesis = str(record[fm.hypothesis])
            if not hypothesis.strip():
                raise DataFormatError(f"empty hypothesis at line {lineno}")
            seen.add(example_id)
            examples.append(
                PairExample(
                    id=example_id,
                    premise=str(record[fm.premise]),
                    hypothesis=hypothesis,
                    label=label,
                    split=split,
                )
            )
    return Dataset(examples)


def validate(dataset: Dataset) -> ValidationReport:
    """Count labels and splits and check three-way class balance.

    The balance flag is true iff every label share is within
    ``BALANCE_TOLERANCE`` of 1/3.
    """
    if len(dataset) == 0:
        raise ValidationError("empty dataset")
    label_counts = Counter(ex.label for ex in dataset)
    split_counts = Counter(ex.split for ex in dataset)
    n = len(dataset)
    ratio = {label: label_counts.get(label, 0) / n for label in sorted(label_counts)}
    warnings: list[str] = []
    unknown = sorted(set(label_counts) - set(LABELS))
    if unknown:
        warnings.append(f"labels outside the three-class set: {', '.join(unknown)}")
    shares = [label_counts.get(label, 0) / n for label in LABELS]
    balanced = all(abs(s - 1 / 3) <= BALANCE_TOLERANCE for s in shares) and not unknown
    if not balanced:
        warnings.append("dataset is not class-balanced")
    for split in SPLITS:
        if split_counts.get(split, 0) == 0:
            warnings.append(f"no examples tagged {split}")
    return ValidationReport(
        size=n,
        label_counts=dict(sorted(label_counts.items())),
        split_counts=dict(sorted(split_counts.items())),
        balance_ratio=ratio,
        balanced=balanced,
        warnings=warnings,
    )


def combine_splits(train: Dataset, dev: Dataset, test: Dataset) -> Dataset:
    """Concatenate splits into one corpus; split tags are retained.

    Ids must be disjoint across the inputs since they key partition
    manifests downstream.
    """
    counts = Counter()
    for d in (train, dev, test):
        counts.update(d.ids())
    collisions = sorted(i for i, c in counts.items() if c > 1)
    if collisions:
        shown = ", ".join(collisions[:10])
        more = "" if len(collisions) <= 10 else f" (+{len(collisions) - 10} more)"
        raise ValidationError(f"id collision across splits: {shown}{more}")
    return Dataset(list(train.examples) + list(dev.examples) + list(test.examples))
