"""Pattern classification against a fixed set of anchor phrases.

A requirement is assigned the pattern of its most similar anchor.  Literal
occurrence of an anchor in the text is the strongest evidence and wins
outright (longest anchor first, which is what keeps negated comparatives
like "not ... less than" away from the bare "less than" anchor); otherwise
the embedding provider decides by cosine similarity.

Also provides the contrastive-loss computation used to certify externally
fine-tuned encoders, as a pure function over a similarity matrix.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .curves import PATTERN_ORDER, PatternType
from .embedding import EmbeddingCache, EmbeddingError, ProviderConfig, cosine_similarity, embed, embed_many


class ClassificationError(ValueError):
    """The text or anchor set cannot be classified."""


@dataclass(frozen=True)
class Anchor:
    phrase: str
    pattern: PatternType

    def __post_init__(self) -> None:
        if not self.phrase or not self.phrase.strip():
            raise ClassificationError("anchor phrase must be non-empty")


@dataclass(frozen=True)
class ClassificationResult:
    pattern: PatternType
    best_anchor: Anchor
    similarity: float
    exact_match: bool
    anchor_span: tuple[int, int] | None = None  # char span of the winning occurrence


@lru_cache(maxsize=1)
def default_anchors() -> tuple[Anchor, ...]:
    """The shipped anchor set: 30 phrases, 10 per pattern."""
    raw = resources.files("reqquant.data").joinpath("anchors.json").read_text("utf-8")
    return load_anchors(json.loads(raw))


def load_anchors(records: Sequence[dict]) -> tuple[Anchor, ...]:
    return tuple(Anchor(rec["phrase"], PatternType.from_label(rec["pattern"]))
                 for rec in records)


_WORD_RE = re.compile(r"[a-z0-9]+(?:/[a-z0-9]+)*")


def _tokens(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(), m.start(), m.end()) for m in _WORD_RE.finditer(text.lower())]


def find_anchor_occurrences(text: str, anchors: Sequence[Anchor]) -> list[tuple[Anchor, tuple[int, int]]]:
    """All occurrences of the anchors in the text, as (anchor, char span).

    An anchor occurs when its words appear as a contiguous token run, or
    fused into one word ("with in" inside "within"), or, for anchors led
    by "no"/"not", with the negation token followed by at most two filler
    words before the rest ("no less than" inside "not be less than").
    """
    tokens = _tokens(text)
    words = [w for w, _, _ in tokens]
    found: list[tuple[Anchor, tuple[int, int]]] = []
    for anchor in anchors:
        parts = anchor.phrase.lower().split()
        spans: list[tuple[int, int]] = []
        for start in range(len(tokens) - len(parts) + 1):
            if words[start:start + len(parts)] == parts:
                spans.append((tokens[start][1], tokens[start + len(parts) - 1][2]))
        if len(parts) > 1:
            fused = "".join(parts)
            spans.extend((s, e) for w, s, e in tokens if w == fused)
        if parts[0] in ("no", "not") and len(parts) > 1:
            rest = parts[1:]
            for start, (word, s, _) in enumerate(tokens):
                if word not in ("no", "not"):
                    continue
                for gap in range(1, 3):  # at least one filler, at most two
                    k = start + gap + 1
                    if k + len(rest) - 1 < len(tokens) and words[k:k + len(rest)] == rest:
                        spans.append((s, tokens[k + len(rest) - 1][2]))
                        break
        for span in sorted(set(spans)):
            found.append((anchor, span))
    return found


def classify(text: str, anchors: Sequence[Anchor] | None = None,
             provider: ProviderConfig = ProviderConfig(),
             cache: EmbeddingCache | None = None) -> ClassificationResult:
    """Assign the pattern of the most similar anchor.

    Verbatim occurrences win with similarity 1.0 (longest anchor first);
    otherwise the maximum cosine similarity between the text embedding and
    the anchor embeddings decides.  Ties break by pattern order P1 < P2 < P3,
    then by anchor list order, so results are reproducible.
    """
    if not text or not text.strip():
        raise ClassificationError("cannot classify empty text")
    anchors = tuple(anchors) if anchors is not None else default_anchors()
    if not anchors:
        raise ClassificationError("anchor set must be non-empty")

    rank = {p: i for i, p in enumerate(PATTERN_ORDER)}
    occurrences = find_anchor_occurrences(text, anchors)
    if occurrences:
        def exact_key(item: tuple[Anchor, tuple[int, int]]):
            anchor, span = item
            return (-len(anchor.phrase), rank[anchor.pattern],
                    anchors.index(anchor), span[0])
        anchor, span = min(occurrences, key=exact_key)
        return ClassificationResult(anchor.pattern, anchor, 1.0, True, span)

    try:
        text_vec = embed(text, provider, cache=cache)
        anchor_vecs = embed_many([a.phrase for a in anchors], provider, cache=cache)
    except EmbeddingError as exc:
        raise ClassificationError(f"embedding provider failed: {exc}") from exc
    best_i = 0
    best_sim = -math.inf
    for i, vec in enumerate(anchor_vecs):
        sim = cosine_similarity(text_vec, vec)
        if sim > best_sim or (sim == best_sim and
                              (rank[anchors[i].pattern], i) < (rank[anchors[best_i].pattern], best_i)):
            best_i, best_sim = i, sim
    return ClassificationResult(anchors[best_i].pattern, anchors[best_i],
                                best_sim, False, None)


@dataclass(frozen=True)
class LossItem:
    sample_id: str
    matching: tuple[PatternType, ...]


@dataclass(frozen=True)
class LossBatch:
    """Inputs to the contrastive loss.

    ``similarity[i][j]`` is sim(sample i, column j); each column represents
    one pattern class.  The default shape has one column per pattern; a
    per-anchor matrix works too, with ``column_patterns`` repeating labels.
    """

    items: tuple[LossItem, ...]
    similarity: tuple[tuple[float, ...], ...]
    column_patterns: tuple[PatternType, ...] = PATTERN_ORDER
    temperature: float = 0.07

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ClassificationError("temperature must be positive")
        if len(self.similarity) != len(self.items):
            raise ClassificationError("similarity rows must match item count")
        for item, row in zip(self.items, self.similarity):
            if len(row) != len(self.column_patterns):
                raise ClassificationError("similarity columns must match pattern columns")
            if not item.matching:
                raise ClassificationError(f"sample {item.sample_id!r} has an empty matching set")
            if not set(item.matching) <= set(self.column_patterns):
                raise ClassificationError(
                    f"sample {item.sample_id!r} matches patterns absent from the columns")
            for value in row:
                if not math.isfinite(value):
                    raise ClassificationError("similarities must be finite")


def contrastive_loss(batch: LossBatch) -> float:
    """Sum over samples of the mean negative log-softmax of the matching
    columns, with logits sim/temperature over all columns."""
    total = 0.0
    for item, row in zip(batch.items, batch.similarity):
        logits = [s / batch.temperature for s in row]
        peak = max(logits)
        log_denominator = peak + math.log(sum(math.exp(l - peak) for l in logits))
        matching_cols = [j for j, p in enumerate(batch.column_patterns)
                         if p in item.matching]
        sample_loss = sum(log_denominator - logits[j] for j in matching_cols)
        total += sample_loss / len(matching_cols)
    return total
