"""Threshold extraction and assembly of the initial draft curve.

The rules mode parses every numeric literal in the requirement and picks
the one syntactically closest to the winning anchor phrase; not every
number in a requirement is the threshold ("...for 7 days, 24 hours").
A remote mode delegates the same job to an external language model behind
a one-prompt HTTP contract.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import httpx

from .classify import ClassificationResult, find_anchor_occurrences
from .curves import Quantification, from_pattern

RULES = "rules"
REMOTE_LLM = "remote-llm"

#: Instruction sent to the remote extraction model, completed with the text.
THRESHOLD_PROMPT = ("Please extract the numeric threshold from the following "
                    "performance requirements: ")

#: Unit words accepted when separated from the number by whitespace.
_KNOWN_UNIT_WORDS = {
    "ms", "s", "sec", "secs", "second", "seconds", "minute", "minutes",
    "hz", "khz", "mhz", "ghz", "fps", "req/s", "rps", "tps", "qps",
    "kb", "mb", "gb", "tb", "%",
}

_NUMBER_RE = re.compile(r"(?<![\w.,])(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?")
_ATTACHED_UNIT_RE = re.compile(r"[A-Za-z%µ][A-Za-z%µ/]*")
_NEXT_WORD_RE = re.compile(r"\s+([A-Za-z%µ][A-Za-z%µ/]*)")


class ExtractionError(ValueError):
    """No usable threshold could be extracted."""


@dataclass(frozen=True)
class ExtractionConfig:
    mode: str = RULES
    endpoint: str | None = None
    timeout: float = 10.0
    delta_fraction: float = 0.10

    def __post_init__(self) -> None:
        if self.mode not in (RULES, REMOTE_LLM):
            raise ExtractionError(f"unknown extraction mode {self.mode!r}")
        if self.mode == REMOTE_LLM and not self.endpoint:
            raise ExtractionError("remote-llm mode requires an endpoint")
        if not 0.0 < self.delta_fraction < 1.0:
            raise ExtractionError("delta_fraction must be in (0, 1)")


@dataclass(frozen=True)
class ThresholdCandidate:
    value: float
    unit: str
    char_span: tuple[int, int]
    distance_to_anchor: int = 0


def find_numbers(text: str) -> list[ThresholdCandidate]:
    """All numeric literals with their units; thousands separators are
    normalized away, percent values keep their 0-100 scale."""
    candidates = []
    for m in _NUMBER_RE.finditer(text):
        value = float(m.group().replace(",", ""))
        unit = ""
        attached = _ATTACHED_UNIT_RE.match(text, m.end())
        if attached:
            unit = attached.group()
        else:
            word = _NEXT_WORD_RE.match(text, m.end())
            if word and word.group(1).lower() in _KNOWN_UNIT_WORDS:
                unit = word.group(1)
        candidates.append(ThresholdCandidate(value, unit, (m.start(), m.end())))
    return candidates


def _span_distance(a: tuple[int, int], b: tuple[int, int]) -> int:
    if a[1] <= b[0]:
        return b[0] - a[1]
    if b[1] <= a[0]:
        return a[0] - b[1]
    return 0


def extract_threshold(text: str, classification: ClassificationResult,
                      config: ExtractionConfig = ExtractionConfig(),
                      client: httpx.Client | None = None) -> float:
    """The threshold value of the requirement, in its written unit."""
    if config.mode == REMOTE_LLM:
        return _remote_threshold(text, config, client)
    candidates = find_numbers(text)
    if not candidates:
        raise ExtractionError(f"no numeric threshold found in {text!r}")
    anchor_spans = [span for _, span in
                    find_anchor_occurrences(text, [classification.best_anchor])]
    if not anchor_spans:
        return candidates[0].value
    ranked = [replace(c, distance_to_anchor=min(_span_distance(c.char_span, s)
                                                for s in anchor_spans))
              for c in candidates]
    best = min(ranked, key=lambda c: (c.distance_to_anchor, c.char_span[0]))
    return best.value


def _remote_threshold(text: str, config: ExtractionConfig,
                      client: httpx.Client | None) -> float:
    owned = client is None
    client = client or httpx.Client(timeout=config.timeout)
    try:
        try:
            response = client.post(str(config.endpoint),
                                   json={"prompt": THRESHOLD_PROMPT + f"“{text}”"})
        except httpx.HTTPError as exc:
            raise ExtractionError(f"threshold service failed: {exc}") from exc
        if response.status_code != 200:
            raise ExtractionError(f"threshold service returned {response.status_code}")
        try:
            reply = str(response.json()["text"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ExtractionError(f"malformed threshold response: {exc}") from exc
        m = _NUMBER_RE.search(reply)
        if not m:
            raise ExtractionError(f"no number in threshold reply {reply!r}")
        return float(m.group().replace(",", ""))
    finally:
        if owned:
            client.close()


@dataclass(frozen=True)
class InitialDraft:
    """Result of the first quantification pass over a requirement."""

    quantification: Quantification
    classification: ClassificationResult
    threshold: float


def initial_quantification(text: str, *, anchors=None,
                           provider=None,
                           config: ExtractionConfig = ExtractionConfig(),
                           cache=None,
                           client: httpx.Client | None = None) -> InitialDraft:
    """Classify, extract the threshold T, and instantiate the pattern with
    tolerance delta = delta_fraction * |T| and satisfaction extremes 0/1."""
    from .classify import classify  # local import keeps module load light
    from .embedding import ProviderConfig

    provider = provider or ProviderConfig()
    classification = classify(text, anchors, provider, cache=cache)
    threshold = extract_threshold(text, classification, config, client=client)
    delta = config.delta_fraction * abs(threshold)
    if delta == 0.0 or not math.isfinite(delta):
        raise ExtractionError(
            f"degenerate threshold {threshold!r}: tolerance would not be positive")
    curve = from_pattern(classification.pattern, threshold, delta)
    return InitialDraft(curve, classification, threshold)
