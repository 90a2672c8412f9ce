"""Persistence for quantified examples, evaluation datasets, and the
embedding cache.

Knowledge files are UTF-8 JSON lines, one example per line:

    {"id": "...", "text": "...", "initial": [[x, y], ...], "preferred": [[x, y], ...]}

so finalized sessions can be appended atomically at line granularity.
Datasets use the same shape with "ground_truth" instead of the two curves.
The embedding cache lives in a sibling ``<name>.cache`` file.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .curves import CurveError, Quantification


class StoreError(RuntimeError):
    """A store or dataset file cannot be read, parsed, or extended."""


@dataclass(frozen=True)
class RequirementExample:
    """A past requirement with its initial and finally preferred curves."""

    id: str
    text: str
    initial: Quantification
    preferred: Quantification
    embedding: tuple[float, ...] | None = None

    def to_record(self) -> dict:
        return {"id": self.id, "text": self.text,
                "initial": self.initial.to_pairs(),
                "preferred": self.preferred.to_pairs()}

    @classmethod
    def from_record(cls, record: dict) -> "RequirementExample":
        try:
            return cls(str(record["id"]), str(record["text"]),
                       Quantification.from_pairs(record["initial"]),
                       Quantification.from_pairs(record["preferred"]))
        except (KeyError, TypeError, ValueError, CurveError) as exc:
            raise StoreError(f"invalid example record: {exc}") from exc


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    text: str
    ground_truth: Quantification

    @classmethod
    def from_record(cls, record: dict) -> "DatasetRecord":
        try:
            return cls(str(record["id"]), str(record["text"]),
                       Quantification.from_pairs(record["ground_truth"]))
        except (KeyError, TypeError, ValueError, CurveError) as exc:
            raise StoreError(f"invalid dataset record: {exc}") from exc


class KnowledgeStore:
    """Ordered collection of examples plus the embedding cache.

    Insertion order is preserved on disk and in memory; retrieval tie-breaks
    depend on it.  Writes are serialized through one lock; reads can run
    concurrently against the immutable example values.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.examples: list[RequirementExample] = []
        self.embedding_cache: dict[tuple[str, str], list[float]] = {}
        self._by_id: dict[str, RequirementExample] = {}
        self._write_lock = threading.Lock()

    @property
    def cache_path(self) -> Path | None:
        if self.path is None:
            return None
        return self.path.with_name(self.path.name + ".cache")

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeStore":
        """Read a store file; a missing file yields an empty store bound to
        that path (cold start)."""
        store = cls(path)
        if store.path.exists():
            for line_no, record in _read_jsonl(store.path):
                try:
                    example = RequirementExample.from_record(record)
                    store._insert(example)
                except StoreError as exc:
                    raise StoreError(f"{store.path}:{line_no}: {exc}") from exc
        cache_path = store.cache_path
        if cache_path is not None and cache_path.exists():
            for line_no, record in _read_jsonl(cache_path):
                try:
                    key = (str(record["provider"]), str(record["text"]))
                    store.embedding_cache[key] = [float(x) for x in record["vector"]]
                except (KeyError, TypeError, ValueError) as exc:
                    raise StoreError(f"{cache_path}:{line_no}: invalid cache entry: {exc}") from exc
        return store

    def _insert(self, example: RequirementExample) -> None:
        if example.id in self._by_id:
            raise StoreError(f"duplicate example id {example.id!r}")
        self.examples.append(example)
        self._by_id[example.id] = example

    def add_example(self, example: RequirementExample) -> None:
        """Append one example and flush it to the backing file."""
        with self._write_lock:
            self._insert(example)
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(example.to_record()) + "\n")
                    fh.flush()

    def get(self, example_id: str) -> RequirementExample | None:
        return self._by_id.get(example_id)

    def save(self, path: str | Path | None = None) -> None:
        """Rewrite the backing file and the embedding-cache sibling."""
        target = Path(path) if path is not None else self.path
        if target is None:
            raise StoreError("store has no backing path")
        with self._write_lock:
            target.parent.mkdir(parents=True, exist_ok=True)
            with target.open("w", encoding="utf-8") as fh:
                for example in self.examples:
                    fh.write(json.dumps(example.to_record()) + "\n")
            cache_target = target.with_name(target.name + ".cache")
            with cache_target.open("w", encoding="utf-8") as fh:
                for (provider, text), vector in self.embedding_cache.items():
                    fh.write(json.dumps({"provider": provider, "text": text,
                                         "vector": vector}) + "\n")
            self.path = target

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[RequirementExample]:
        return iter(self.examples)


def _read_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError(f"{path}:{line_no}: malformed JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise StoreError(f"{path}:{line_no}: expected an object per line")
            yield line_no, record


def import_dataset(path: str | Path) -> list[DatasetRecord]:
    """Load and validate a dataset file of ground-truth quantifications."""
    path = Path(path)
    if not path.exists():
        raise StoreError(f"dataset file not found: {path}")
    records = []
    for line_no, record in _read_jsonl(path):
        try:
            records.append(DatasetRecord.from_record(record))
        except StoreError as exc:
            raise StoreError(f"{path}:{line_no}: {exc}") from exc
    return records


def import_examples(path: str | Path) -> list[RequirementExample]:
    """Load and validate an examples file (initial/preferred pairs)."""
    path = Path(path)
    if not path.exists():
        raise StoreError(f"examples file not found: {path}")
    examples = []
    for line_no, record in _read_jsonl(path):
        try:
            examples.append(RequirementExample.from_record(record))
        except StoreError as exc:
            raise StoreError(f"{path}:{line_no}: {exc}") from exc
    return examples
