"""Evaluation metrics for obfuscation runs.

Obfuscation success against a pluggable target classifier, an exact-match
unigram METEOR, embedding cosine similarity over a pluggable embedder
(IDF-weighted term frequencies built in), token change rate, and the
normalized label-entropy bias analysis with per-author contributions.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .obfuscate import ObfuscationResult
from .postag import TaggedText, tokenize


class EmptyEvaluationSet(Exception):
    pass


class EmptyInput(Exception):
    pass


@dataclass
class EvalReport:
    accuracy_before: float
    accuracy_after: float
    f1_after: float
    meteor_mean: float
    cosine_mean: float
    change_rate_mean: float
    entropy: float
    per_author_entropy_contribution: dict[str, float] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "accuracy_before": self.accuracy_before,
            "accuracy_after": self.accuracy_after,
            "f1_after": self.f1_after,
            "meteor_mean": self.meteor_mean,
            "cosine_mean": self.cosine_mean,
            "change_rate_mean": self.change_rate_mean,
            "entropy": self.entropy,
            "per_author_entropy_contribution": self.per_author_entropy_contribution,
            "extra": self.extra,
        }

    def to_table(self) -> str:
        rows = [
            ("accuracy (before)", self.accuracy_before),
            ("accuracy (after)", self.accuracy_after),
            ("macro F1 (after)", self.f1_after),
            ("METEOR mean", self.meteor_mean),
            ("cosine mean", self.cosine_mean),
            ("change rate mean", self.change_rate_mean),
            ("label entropy", self.entropy),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {val:.4f}" for name, val in rows)


def macro_f1(true: list[str], pred: list[str]) -> float:
    """Macro-averaged F1 over all labels appearing in truth or prediction."""
    labels = sorted(set(true) | set(pred))
    scores = []
    for lab in labels:
        tp = sum(1 for t, p in zip(true, pred) if t == lab and p == lab)
        fp = sum(1 for t, p in zip(true, pred) if t != lab and p == lab)
        fn = sum(1 for t, p in zip(true, pred) if t == lab and p != lab)
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return sum(scores) / len(scores) if scores else 0.0


def attack_success(target_predict, pairs: list[tuple[str, str, str]]) -> tuple[float, float]:
    """(accuracy_after, macro f1_after) for (original, obfuscated, author) pairs.

    Callers follow the retained-samples protocol: pairs contain only
    samples the target classified correctly pre-obfuscation.
    """
    if not pairs:
        raise EmptyEvaluationSet("no evaluation pairs")
    true = [a for _, _, a in pairs]
    pred = [target_predict(obf) for _, obf, _ in pairs]
    acc = sum(1 for t, p in zip(true, pred) if t == p) / len(pairs)
    return acc, macro_f1(true, pred)


def _meteor_alignment(ref: list[str], cand: list[str]) -> tuple[int, int]:
    """(matches, chunks) aligning i-th occurrences of each exact word."""
    ref_positions: dict[str, list[int]] = {}
    for i, w in enumerate(ref):
        ref_positions.setdefault(w, []).append(i)
    used: dict[str, int] = {}
    aligned: list[tuple[int, int]] = []  # (cand_pos, ref_pos)
    for i, w in enumerate(cand):
        k = used.get(w, 0)
        positions = ref_positions.get(w, [])
        if k < len(positions):
            aligned.append((i, positions[k]))
            used[w] = k + 1
    matches = len(aligned)
    chunks = 0
    prev = None
    for cpos, rpos in aligned:
        if prev is None or cpos != prev[0] + 1 or rpos != prev[1] + 1:
            chunks += 1
        prev = (cpos, rpos)
    return matches, chunks


def meteor(reference: str, candidate: str) -> float:
    """Exact-match unigram METEOR (no stemming or synonymy).

    F_mean = 10PR/(R+9P), penalty = 0.5*(chunks/matches)^3,
    score = F_mean * (1 - penalty); 0 when no unigram matches.
    """
    ref = [t[0] for t in tokenize(reference)]
    cand = [t[0] for t in tokenize(candidate)]
    if not ref or not cand:
        return 0.0
    matches, chunks = _meteor_alignment(ref, cand)
    if matches == 0:
        return 0.0
    p = matches / len(cand)
    r = matches / len(ref)
    f_mean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (chunks / matches) ** 3
    return f_mean * (1 - penalty)


class TfIdfEmbedder:
    """IDF-weighted term-frequency embedder over a fixed corpus vocabulary."""

    def __init__(self, corpus_texts: list[str]):
        docs = [[t[0].lower() for t in tokenize(text)] for text in corpus_texts]
        df: Counter = Counter()
        for d in docs:
            df.update(set(d))
        self.vocab = {w: i for i, w in enumerate(sorted(df))}
        n = max(len(docs), 1)
        self.idf = np.zeros(len(self.vocab))
        for w, i in self.vocab.items():
            self.idf[i] = math.log((1 + n) / (1 + df[w])) + 1.0

    def __call__(self, text: str) -> np.ndarray:
        v = np.zeros(len(self.vocab))
        for t in tokenize(text):
            i = self.vocab.get(t[0].lower())
            if i is not None:
                v[i] += 1.0
        return v * self.idf


def cosine_similarity(embedder, a: str, b: str) -> float:
    """Standard cosine over embedder(text) vectors; zero vectors map to 0."""
    va = np.asarray(embedder(a), dtype=np.float64)
    vb = np.asarray(embedder(b), dtype=np.float64)
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(va @ vb / (na * nb))


def label_entropy(predictions: list[tuple[str, str]],
                  author_pool: list[str] | None = None) -> tuple[float, dict[str, float]]:
    """Normalized base-2 entropy of post-obfuscation labels + contributions.

    Contribution of author a is -p(a)*log2 p(a) / log2(pool size); the
    contributions over the support sum to the normalized entropy.
    """
    if not predictions:
        raise EmptyInput("no predictions")
    post = [b for _, b in predictions]
    pool = sorted(author_pool) if author_pool is not None else \
        sorted({a for p in predictions for a in p})
    n_pool = len(pool)
    if n_pool < 2:
        return 0.0, {a: 0.0 for a in pool}
    counts = Counter(post)
    total = len(post)
    norm = math.log2(n_pool)
    contributions = {}
    for a in pool:
        p = counts.get(a, 0) / total
        contributions[a] = (-p * math.log2(p) / norm) if p > 0 else 0.0
    return sum(contributions.values()), contributions


def change_rate(tagged: TaggedText, result: ObfuscationResult) -> float:
    """Fraction of tokens whose surface differs after obfuscation."""
    n = len(tagged.tokens)
    if n == 0:
        return 0.0
    changed = 0
    for c in result.changes:
        for orig, repl in zip(c.original_tokens, c.replacement_tokens):
            if orig != repl:
                changed += 1
    return changed / n
