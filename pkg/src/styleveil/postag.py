"""Tokenization with exact character offsets and POS tagging.

Two tagging paths: a trainable averaged perceptron, and a deterministic
rule fallback (closed-class lexicon + suffix heuristics) so the pipeline
runs with zero model files.  Tagset is Penn Treebank.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

PTB_TAGSET = [
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD",
    "NN", "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR",
    "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP",
    "VBZ", "WDT", "WP", "WP$", "WRB",
    ".", ",", ":", "``", "''", "(", ")", "$", "#",
]

Token = tuple[str, int, int]  # (surface, start, end)


@dataclass
class TaggedText:
    doc_id: str
    tokens: list[Token]
    tags: list[str]

    def __post_init__(self):
        if len(self.tags) != len(self.tokens):
            raise ValueError("tag count must equal token count")

    @property
    def surfaces(self) -> list[str]:
        return [t[0] for t in self.tokens]


# Suffixes split off as separate tokens; longest match wins, case-insensitive.
_CONTRACTION_SUFFIXES = ["n't", "'ll", "'re", "'ve", "'d", "'m", "'s"]

_PUNCT = set(".,;:!?\"'`()[]{}<>-_/\\|@#$%^&*+=~")


def tokenize(text: str) -> list[Token]:
    """Split text into word and punctuation tokens with exact offsets.

    Whitespace split, then punctuation detachment (runs of one repeated
    punctuation char stay together, e.g. "...") and English contraction
    splitting.  substring(text, start, end) == surface for every token.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        _split_chunk(text, i, j, tokens)
        i = j
    return tokens


def _split_chunk(text: str, start: int, end: int, out: list[Token]) -> None:
    # peel leading punctuation
    while start < end and text[start] in _PUNCT:
        k = start + 1
        while k < end and text[k] == text[start]:
            k += 1
        # an apostrophe that begins a contraction stays with the word
        if text[start] == "'" and k == start + 1 and k < end and not text[k] in _PUNCT:
            low = text[start:end].lower()
            if any(low.startswith(s) and len(low) > len(s) for s in ("'s", "'d", "'m", "'re", "'ve", "'ll")):
                break
        out.append((text[start:k], start, k))
        start = k
    # peel trailing punctuation (collect, then emit in order)
    trailing: list[Token] = []
    while end > start and text[end - 1] in _PUNCT:
        k = end - 1
        while k > start and text[k - 1] == text[end - 1]:
            k -= 1
        if text[end - 1] == "'" and _is_contraction_tail(text, start, end):
            break
        trailing.append((text[k:end], k, end))
        end = k
    if start < end:
        _split_contractions(text, start, end, out)
    out.extend(reversed(trailing))


def _is_contraction_tail(text: str, start: int, end: int) -> bool:
    low = text[start:end].lower()
    return any(low.endswith(s) for s in _CONTRACTION_SUFFIXES)


def _split_contractions(text: str, start: int, end: int, out: list[Token]) -> None:
    low = text[start:end].lower()
    for suf in _CONTRACTION_SUFFIXES:
        if low.endswith(suf) and len(low) > len(suf):
            cut = end - len(suf)
            _split_contractions(text, start, cut, out)
            out.append((text[cut:end], cut, end))
            return
    out.append((text[start:end], start, end))


def reconstruct(original: str, tokens: list[Token], surfaces: list[str] | None = None) -> str:
    """Rebuild text from tokens plus the original inter-token gaps.

    With replacement surfaces of equal count, splices them into the
    original gap structure; with surfaces=None this is the identity.
    """
    if surfaces is None:
        surfaces = [t[0] for t in tokens]
    if len(surfaces) != len(tokens):
        raise ValueError("surface count must equal token count")
    parts: list[str] = []
    pos = 0
    for (_, start, end), surf in zip(tokens, surfaces):
        parts.append(original[pos:start])
        parts.append(surf)
        pos = end
    parts.append(original[pos:])
    return "".join(parts)


# ---------------------------------------------------------------------------
# Rule fallback tagger

_CLOSED_CLASS = {
    "the": "DT", "a": "DT", "an": "DT", "this": "DT", "that": "DT",
    "these": "DT", "those": "DT", "some": "DT", "any": "DT", "no": "DT",
    "every": "DT", "each": "DT", "all": "PDT", "both": "PDT",
    "and": "CC", "or": "CC", "but": "CC", "nor": "CC", "yet": "CC",
    "in": "IN", "on": "IN", "at": "IN", "by": "IN", "for": "IN",
    "with": "IN", "from": "IN", "of": "IN", "about": "IN", "into": "IN",
    "through": "IN", "after": "IN", "before": "IN", "between": "IN",
    "under": "IN", "over": "IN", "during": "IN", "without": "IN",
    "against": "IN", "if": "IN", "because": "IN", "while": "IN",
    "since": "IN", "until": "IN", "although": "IN", "near": "IN",
    "i": "PRP", "you": "PRP", "he": "PRP", "she": "PRP", "it": "PRP",
    "we": "PRP", "they": "PRP", "me": "PRP", "him": "PRP", "her": "PRP",
    "us": "PRP", "them": "PRP", "myself": "PRP", "himself": "PRP",
    "herself": "PRP", "itself": "PRP", "themselves": "PRP",
    "my": "PRP$", "your": "PRP$", "his": "PRP$", "its": "PRP$",
    "our": "PRP$", "their": "PRP$",
    "can": "MD", "could": "MD", "will": "MD", "would": "MD", "shall": "MD",
    "should": "MD", "may": "MD", "might": "MD", "must": "MD", "ca": "MD",
    "'ll": "MD",
    "is": "VBZ", "are": "VBP", "am": "VBP", "was": "VBD", "were": "VBD",
    "be": "VB", "been": "VBN", "being": "VBG",
    "has": "VBZ", "have": "VBP", "had": "VBD", "having": "VBG",
    "does": "VBZ", "do": "VBP", "did": "VBD", "done": "VBN",
    "'s": "POS", "'re": "VBP", "'ve": "VBP", "'m": "VBP", "'d": "MD",
    "n't": "RB", "not": "RB", "never": "RB", "also": "RB", "there": "EX",
    "very": "RB", "too": "RB", "so": "RB", "then": "RB", "now": "RB",
    "here": "RB", "just": "RB", "only": "RB", "again": "RB", "always": "RB",
    "often": "RB", "quite": "RB", "rather": "RB", "still": "RB",
    "to": "TO",
    "who": "WP", "whom": "WP", "whose": "WP$", "which": "WDT",
    "what": "WP", "when": "WRB", "where": "WRB", "why": "WRB", "how": "WRB",
    "oh": "UH", "yes": "UH", "hey": "UH", "wow": "UH",
    "more": "JJR", "most": "JJS", "less": "JJR", "least": "JJS",
    "up": "RP", "out": "RP", "down": "RP", "off": "RP",
    "new": "JJ", "good": "JJ", "old": "JJ", "other": "JJ", "many": "JJ",
    "one": "CD", "two": "CD", "three": "CD", "four": "CD", "five": "CD",
    "six": "CD", "seven": "CD", "eight": "CD", "nine": "CD", "ten": "CD",
}

_PUNCT_TAGS = {".": ".", "!": ".", "?": ".", ",": ",", ";": ":", ":": ":",
               "-": ":", "--": ":", "(": "(", ")": ")", "[": "(", "]": ")",
               "{": "(", "}": ")", '"': "''", "'": "''", "`": "``",
               "``": "``", "''": "''", "$": "$", "#": "#"}

_VERBISH_PREV = {"NN", "NNS", "NNP", "NNPS", "PRP", "EX", "WP"}


def _rule_tag_one(word: str, prev_tag: str | None) -> str:
    if not word:
        return "NN"
    first = word[0]
    if first in _PUNCT and all(c in _PUNCT for c in word):
        return _PUNCT_TAGS.get(word, _PUNCT_TAGS.get(first, "SYM"))
    low = word.lower()
    if low in _CLOSED_CLASS:
        tag = _CLOSED_CLASS[low]
        # possessive 's vs contracted is: after a pronoun treat as VBZ
        if low == "'s" and prev_tag == "PRP":
            return "VBZ"
        return tag
    if any(c.isdigit() for c in word) and not any(c.isalpha() for c in word):
        return "CD"
    if low.endswith("ly"):
        return "RB"
    if low.endswith("ing") and len(low) > 4:
        return "VBG"
    if low.endswith("ed") and len(low) > 3:
        return "VBD" if prev_tag in _VERBISH_PREV else "VBN"
    if low.endswith(("fy", "ize", "ise", "yze", "ate")) and len(low) > 4:
        return "VB"
    if low.endswith(("able", "ible", "ful", "ous", "ive", "ish", "al", "ic")) and len(low) > 4:
        return "JJ"
    if low.endswith("er") and len(low) > 4 and prev_tag in ("RB", "DT"):
        return "JJR"
    if low.endswith("est") and len(low) > 4:
        return "JJS"
    if word[0].isupper() and prev_tag is not None and prev_tag != ".":
        return "NNP"
    if low.endswith("s") and not low.endswith(("ss", "us", "is")):
        if prev_tag in _VERBISH_PREV:
            return "VBZ"
        return "NNS"
    return "NN"


def rule_tag(surfaces: list[str]) -> list[str]:
    """Total deterministic fallback tagger; never fails, any input."""
    tags: list[str] = []
    prev: str | None = None
    for w in surfaces:
        t = _rule_tag_one(w, prev)
        tags.append(t)
        prev = t
    return tags


# ---------------------------------------------------------------------------
# Averaged perceptron tagger

class EmptyTraining(Exception):
    pass


class UnknownTag(Exception):
    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(f"tag not in tagset: {tag!r}")


@dataclass
class TaggerModel:
    tagset: list[str]
    feature_weights: dict[str, dict[str, float]] = field(default_factory=dict)
    version: int = 1

    def save(self, path: str | Path) -> None:
        payload = {"version": self.version, "tagset": self.tagset,
                   "feature_weights": self.feature_weights}
        Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TaggerModel":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(tagset=payload["tagset"], feature_weights=payload["feature_weights"],
                   version=payload["version"])


def _percep_features(i: int, word: str, context: list[str], prev: str, prev2: str) -> list[str]:
    low = word.lower()
    feats = [
        "bias",
        f"w={low}",
        f"suf1={low[-1:]}", f"suf2={low[-2:]}", f"suf3={low[-3:]}",
        f"pre1={low[:1]}", f"pre2={low[:2]}", f"pre3={low[:3]}",
        f"t-1={prev}", f"t-2={prev2}", f"t-1t-2={prev}+{prev2}",
        f"w-1={context[i - 1].lower() if i > 0 else '<s>'}",
        f"w+1={context[i + 1].lower() if i + 1 < len(context) else '</s>'}",
        f"shape={'X' if word[:1].isupper() else 'x'}{'d' if any(c.isdigit() for c in word) else ''}",
    ]
    return feats


def train_tagger(annotated: list[tuple[list[str], list[str]]], epochs: int = 5,
                 seed: int = 0, tagset: list[str] | None = None) -> TaggerModel:
    """Averaged perceptron training; deterministic given seed."""
    if not annotated:
        raise EmptyTraining("no training sentences")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    tagset = list(tagset) if tagset is not None else list(PTB_TAGSET)
    tagset_set = set(tagset)
    for _, gold in annotated:
        for g in gold:
            if g not in tagset_set:
                raise UnknownTag(g)

    weights: dict[str, dict[str, float]] = {}
    totals: dict[tuple[str, str], float] = {}
    tstamps: dict[tuple[str, str], int] = {}
    rng = random.Random(seed)
    instances = list(annotated)
    step = 0

    def predict(feats: list[str]) -> str:
        scores = {t: 0.0 for t in tagset}
        for f in feats:
            wmap = weights.get(f)
            if not wmap:
                continue
            for t, w in wmap.items():
                scores[t] += w
        return max(tagset, key=lambda t: scores[t])

    def upd(f: str, t: str, delta: float) -> None:
        key = (f, t)
        cur = weights.setdefault(f, {}).get(t, 0.0)
        totals[key] = totals.get(key, 0.0) + (step - tstamps.get(key, 0)) * cur
        tstamps[key] = step
        weights[f][t] = cur + delta

    for _ in range(epochs):
        rng.shuffle(instances)
        for words, gold in instances:
            prev, prev2 = "<s>", "<s2>"
            for i, word in enumerate(words):
                step += 1
                feats = _percep_features(i, word, words, prev, prev2)
                guess = predict(feats)
                if guess != gold[i]:
                    for f in feats:
                        upd(f, gold[i], 1.0)
                        upd(f, guess, -1.0)
                prev2, prev = prev, gold[i]

    averaged: dict[str, dict[str, float]] = {}
    for f, wmap in weights.items():
        for t, w in wmap.items():
            key = (f, t)
            total = totals.get(key, 0.0) + (step - tstamps.get(key, 0)) * w
            avg = round(total / max(step, 1), 9)
            if avg:
                averaged.setdefault(f, {})[t] = avg
    return TaggerModel(tagset=tagset, feature_weights=averaged)


def perceptron_tag(model: TaggerModel, surfaces: list[str]) -> list[str]:
    tags: list[str] = []
    prev, prev2 = "<s>", "<s2>"
    for i, word in enumerate(surfaces):
        feats = _percep_features(i, word, surfaces, prev, prev2)
        scores = {t: 0.0 for t in model.tagset}
        for f in feats:
            wmap = model.feature_weights.get(f)
            if not wmap:
                continue
            for t, w in wmap.items():
                scores[t] += w
        best = max(model.tagset, key=lambda t: scores[t])
        if all(s == 0.0 for s in scores.values()):
            best = _rule_tag_one(word, tags[-1] if tags else None)
        tags.append(best)
        prev2, prev = prev, best
    return tags


def tag(surfaces: list[str], model: TaggerModel | None = None) -> list[str]:
    """One tag per token; uses the rule fallback when no model is given."""
    if not surfaces:
        return []
    if model is None:
        return rule_tag(surfaces)
    return perceptron_tag(model, surfaces)


def tag_text(doc_id: str, text: str, model: TaggerModel | None = None) -> TaggedText:
    tokens = tokenize(text)
    return TaggedText(doc_id=doc_id, tokens=tokens, tags=tag([t[0] for t in tokens], model))


def load_conll(path: str | Path) -> list[tuple[list[str], list[str]]]:
    """Two-column token/tag lines, blank-line sentence separation."""
    sentences: list[tuple[list[str], list[str]]] = []
    words: list[str] = []
    tags_: list[str] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            if words:
                sentences.append((words, tags_))
                words, tags_ = [], []
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ValueError(f"bad CoNLL line: {raw!r}")
        words.append(parts[0])
        tags_.append(parts[1])
    if words:
        sentences.append((words, tags_))
    return sentences
