"""Deterministic synthetic authorship corpora.

Each synthetic author mixes a shared vocabulary with an author-specific
signature slice of every open-class pool and a biased distribution over
sentence templates, giving both character-level and POS-habit signal for
the classifiers while staying fully reproducible from one seed.
"""

from __future__ import annotations

import random

from .corpus import Document

# Open-class pools; suffixes chosen so the rule tagger assigns the slot tag.
_NOUNS = [
    "time", "year", "way", "day", "thing", "world", "life", "hand", "part",
    "place", "case", "week", "company", "system", "program", "question",
    "work", "night", "point", "home", "water", "room", "mother", "area",
    "money", "story", "fact", "month", "lot", "right", "study", "book",
    "eye", "job", "word", "business", "issue", "side", "kind", "head",
    "house", "service", "friend", "father", "power", "hour", "game", "line",
    "end", "member", "law", "car", "city", "community", "name", "team",
    "minute", "idea", "body", "information", "back", "parent", "face",
    "level", "office", "door", "health", "person", "art", "war", "history",
    "party", "result", "change", "morning", "reason", "research", "girl",
    "guy", "moment", "air", "teacher", "force", "education", "foot", "boy",
    "age", "policy", "process", "music", "market", "sense", "nation",
    "plan", "college", "interest", "death", "experience", "effect", "use",
    "class", "control", "care", "field", "development", "role", "effort",
    "rate", "heart", "drug", "show", "leader", "light", "voice", "wife",
    "price", "report", "decision", "son", "view", "relationship", "town",
]
_VERBS_BASE = [  # -ize/-ate/-fy so the rule tagger reads them as VB
    "organize", "create", "generate", "analyze", "locate", "estimate",
    "recognize", "indicate", "operate", "relate", "simplify", "clarify",
    "separate", "activate", "educate", "notify", "realize", "celebrate",
    "translate", "identify", "emphasize", "evaluate", "illustrate",
    "justify", "maximize", "minimize", "motivate", "navigate", "qualify",
    "regulate", "stabilize", "summarize", "terminate", "unify", "update",
    "validate", "verify", "calculate", "authorize", "classify",
]
_VERBS_PAST = [  # -ed after a noun subject reads as VBD
    "walked", "talked", "looked", "wanted", "called", "asked", "worked",
    "seemed", "turned", "started", "showed", "moved", "played", "helped",
    "stayed", "reached", "waited", "passed", "opened", "closed", "pointed",
    "watched", "followed", "stopped", "carried", "joined", "learned",
    "offered", "remembered", "covered", "crossed", "counted", "delivered",
    "explained", "gathered", "guarded", "handled", "hunted", "ordered",
    "painted",
]
_ADJECTIVES = [  # suffixes the rule tagger reads as JJ
    "beautiful", "careful", "cheerful", "colorful", "dangerous", "famous",
    "generous", "nervous", "serious", "curious", "active", "creative",
    "effective", "massive", "native", "positive", "central", "critical",
    "cultural", "digital", "final", "formal", "general", "global",
    "historic", "basic", "classic", "public", "logical", "magical",
    "musical", "natural", "normal", "original", "personal", "physical",
    "practical", "capable", "comfortable", "notable",
]
_ADVERBS = [
    "quickly", "slowly", "quietly", "loudly", "easily", "simply", "clearly",
    "really", "finally", "usually", "mostly", "nearly", "exactly",
    "directly", "recently", "suddenly", "carefully", "certainly",
    "probably", "actually",
]

_TEMPLATES: list[list[str]] = [
    ["DT", "NN", "VBD", "DT", "JJ", "NN", "."],
    ["PRP", "VBD", "IN", "DT", "NN", "."],
    ["DT", "JJ", "NN", "VBD", "RB", "."],
    ["PRP", "MD", "VB", "DT", "NN", "."],
    ["IN", "DT", "NN", ",", "PRP", "VBD", "DT", "NN", "."],
    ["DT", "NN", "IN", "DT", "NN", "VBD", "DT", "NN", "."],
    ["RB", ",", "DT", "NN", "VBD", "DT", "NN", "."],
    ["PRP", "VBD", "DT", "NN", "CC", "DT", "NN", "."],
    ["DT", "JJ", "JJ", "NN", "VBD", "DT", "NN", "."],
    ["PRP", "MD", "RB", "VB", "DT", "JJ", "NN", "."],
    ["IN", "DT", "JJ", "NN", ",", "DT", "NN", "VBD", "RB", "."],
    ["DT", "NN", "CC", "DT", "NN", "VBD", "IN", "DT", "NN", "."],
]

_DETS = ["the", "a", "this", "that", "every", "some"]
_PRONOUNS = ["he", "she", "they", "we", "i", "you"]
_PREPS = ["in", "on", "at", "with", "from", "about", "under", "near"]
_MODALS = ["can", "will", "would", "should", "could", "must"]
_CONJS = ["and", "but", "or"]


def _slices(pool: list[str], n_authors: int, width: int) -> list[list[str]]:
    return [[pool[(a * width + i) % len(pool)] for i in range(width)]
            for a in range(n_authors)]


class AuthorProfile:
    def __init__(self, index: int, n_authors: int):
        self.index = index
        self.nouns = _slices(_NOUNS, n_authors, 12)[index]
        self.verbs_base = _slices(_VERBS_BASE, n_authors, 4)[index]
        self.verbs_past = _slices(_VERBS_PAST, n_authors, 4)[index]
        self.adjectives = _slices(_ADJECTIVES, n_authors, 4)[index]
        self.adverbs = _slices(_ADVERBS, n_authors, 2)[index]
        # mild per-author template bias: POS habits are distinct but weaker
        # than vocabulary signatures, mirroring real style signal mix
        self.template_weights = [
            2.0 if (t - index) % len(_TEMPLATES) in (0, 3, 7) else 1.0
            for t in range(len(_TEMPLATES))
        ]
        self.signature_prob = 0.8


def _pick(rng: random.Random, shared: list[str], signature: list[str], p_sig: float) -> str:
    if signature and rng.random() < p_sig:
        return rng.choice(signature)
    return rng.choice(shared)


def _sentence(rng: random.Random, profile: AuthorProfile) -> str:
    template = rng.choices(_TEMPLATES, weights=profile.template_weights, k=1)[0]
    p = profile.signature_prob
    words: list[str] = []
    for tag_symbol in template:
        if tag_symbol == "NN":
            words.append(_pick(rng, _NOUNS[:20], profile.nouns, p))
        elif tag_symbol == "VB":
            words.append(_pick(rng, _VERBS_BASE[:6], profile.verbs_base, p))
        elif tag_symbol == "VBD":
            words.append(_pick(rng, _VERBS_PAST[:6], profile.verbs_past, p))
        elif tag_symbol == "JJ":
            words.append(_pick(rng, _ADJECTIVES[:6], profile.adjectives, p))
        elif tag_symbol == "RB":
            words.append(_pick(rng, _ADVERBS[:5], profile.adverbs, p))
        elif tag_symbol == "DT":
            words.append(rng.choice(_DETS))
        elif tag_symbol == "PRP":
            words.append(rng.choice(_PRONOUNS))
        elif tag_symbol == "IN":
            words.append(rng.choice(_PREPS))
        elif tag_symbol == "MD":
            words.append(rng.choice(_MODALS))
        elif tag_symbol == "CC":
            words.append(rng.choice(_CONJS))
        elif tag_symbol in (".", ","):
            if words:
                words[-1] = words[-1] + tag_symbol
            else:
                words.append(tag_symbol)
        else:
            words.append(tag_symbol.lower())
    text = " ".join(words)
    return text[0].upper() + text[1:] if text else text


def generate_document(rng: random.Random, profile: AuthorProfile,
                      min_sentences: int = 4, max_sentences: int = 7) -> str:
    n = rng.randint(min_sentences, max_sentences)
    return " ".join(_sentence(rng, profile) for _ in range(n))


def generate_corpus(n_authors: int = 10, docs_per_author: int = 500, seed: int = 0,
                    min_sentences: int = 4, max_sentences: int = 7) -> list[Document]:
    """Deterministic corpus of synthetic authors with distinct habits."""
    docs: list[Document] = []
    for a in range(n_authors):
        profile = AuthorProfile(a, n_authors)
        for d in range(docs_per_author):
            rng = random.Random(f"{seed}:{a}:{d}")
            docs.append(Document(
                id=f"a{a:02d}-d{d:04d}",
                author=f"author{a:02d}",
                text=generate_document(rng, profile, min_sentences, max_sentences),
            ))
    return docs


def generate_long_text(words: int = 1000, seed: int = 0, author_index: int = 0,
                       n_authors: int = 10) -> str:
    """One long synthetic text of roughly the requested word count."""
    profile = AuthorProfile(author_index, n_authors)
    rng = random.Random(f"long:{seed}:{author_index}")
    sentences: list[str] = []
    count = 0
    while count < words:
        s = _sentence(rng, profile)
        sentences.append(s)
        count += len(s.split())
    return " ".join(sentences)
