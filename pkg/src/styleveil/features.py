"""Frozen n-gram feature spaces and normalized-frequency vectorization.

The feature space holds the top-L character and POS n-grams per length
l in V, counted over the attacker corpus.  Vector layout is fixed:
(kind: char then pos) x (l ascending) x (rank by count descending,
ties lexicographic ascending), and serialized with the space so model
inputs stay stable across runs.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .postag import TaggedText

KINDS = ("char", "pos")


class EmptyCorpus(Exception):
    pass


@dataclass(frozen=True)
class FeatureKey:
    kind: str  # "char" | "pos"
    gram: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.gram)


def extract_ngrams(sequence: list[str] | str, l: int) -> Counter:
    """All contiguous l-grams of the sequence as a multiset; empty if too short."""
    if l < 1:
        raise ValueError("n-gram length must be >= 1")
    n = len(sequence)
    if n < l:
        return Counter()
    return Counter(tuple(sequence[i:i + l]) for i in range(n - l + 1))


class FeatureSpace:
    def __init__(self, V: list[int], L_vocab: int, entries: list[FeatureKey]):
        self.V = sorted(set(V))
        self.L_vocab = L_vocab
        self.entries = list(entries)
        self.index: dict[FeatureKey, int] = {k: i for i, k in enumerate(self.entries)}
        if len(self.index) != len(self.entries):
            raise ValueError("duplicate feature keys in space")

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def checksum(self) -> str:
        import hashlib
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def to_json(self) -> str:
        return json.dumps({
            "format_version": 1,
            "V": self.V,
            "L_vocab": self.L_vocab,
            "entries": [[k.kind, list(k.gram)] for k in self.entries],
        }, ensure_ascii=False)

    @classmethod
    def from_json(cls, payload: str | dict) -> "FeatureSpace":
        if isinstance(payload, str):
            payload = json.loads(payload)
        entries = [FeatureKey(kind, tuple(gram)) for kind, gram in payload["entries"]]
        return cls(V=payload["V"], L_vocab=payload["L_vocab"], entries=entries)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FeatureSpace":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def build_feature_space(corpus_tagged: list[TaggedText], raw_texts: list[str],
                        V: list[int], L_vocab: int) -> FeatureSpace:
    """Top-L_vocab grams per (kind, length) by corpus-wide count.

    Ties broken lexicographically ascending; group order within the
    vector is char-then-pos, length ascending, count descending.
    """
    if not V:
        raise ValueError("V must be non-empty")
    if L_vocab < 1:
        raise ValueError("L_vocab must be >= 1")
    if not raw_texts and not corpus_tagged:
        raise EmptyCorpus("no documents")

    lengths = sorted(set(V))
    entries: list[FeatureKey] = []
    for kind in KINDS:
        for l in lengths:
            counts: Counter = Counter()
            if kind == "char":
                for text in raw_texts:
                    counts.update(extract_ngrams(text, l))
            else:
                for tt in corpus_tagged:
                    counts.update(extract_ngrams(tt.tags, l))
            top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:L_vocab]
            entries.extend(FeatureKey(kind, gram) for gram, _ in top)
    return FeatureSpace(V=lengths, L_vocab=L_vocab, entries=entries)


def vectorize(space: FeatureSpace, tagged: TaggedText, raw: str) -> np.ndarray:
    """Normalized in-text frequencies over the frozen vocabulary.

    Denominator is the total gram count of that (kind, length) in the
    text, not vocabulary hits; zero when the text has no such grams.
    """
    v = np.zeros(space.dimension, dtype=np.float64)
    for kind in KINDS:
        seq = raw if kind == "char" else tagged.tags
        for l in space.V:
            total = len(seq) - l + 1
            if total <= 0:
                continue
            counts = extract_ngrams(seq, l)
            for gram, c in counts.items():
                idx = space.index.get(FeatureKey(kind, gram))
                if idx is not None:
                    v[idx] = c / total
    return v
