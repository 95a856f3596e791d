"""Corpus ingestion and deterministic author-stratified splitting.

A corpus is a list of Documents loaded from JSONL ({"id","author","text"}
per line).  Splitting produces the three disjoint sets used by the
pipeline: X (target-training surrogate), X* (attacker training) and T
(obfuscation test), stratified so every author appears in every split.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path


class CorpusError(Exception):
    pass


class MalformedRecord(CorpusError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        super().__init__(f"malformed record at line {line_no}" + (f": {detail}" if detail else ""))


class DuplicateId(CorpusError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"duplicate document id: {doc_id!r}")


class EmptyCorpus(CorpusError):
    pass


class AuthorTooSmall(CorpusError):
    def __init__(self, author: str):
        self.author = author
        super().__init__(f"author {author!r} has too few documents to populate all three splits")


@dataclass(frozen=True)
class Document:
    id: str
    author: str
    text: str


@dataclass(frozen=True)
class SplitSpec:
    fractions: tuple[float, float, float] = (0.4, 0.4, 0.2)
    seed: int = 0
    stratify_by_author: bool = True

    def validate(self) -> None:
        if any(f < 0 for f in self.fractions):
            raise ValueError("split fractions must be nonnegative")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1.0, got {sum(self.fractions)}")


Corpus = list  # list[Document]


def load_corpus(path: str | Path, fmt: str = "jsonl") -> list[Document]:
    """Load a JSONL corpus; rejects duplicate ids and malformed lines."""
    if fmt != "jsonl":
        raise ValueError(f"unsupported corpus format: {fmt}")
    path = Path(path)
    docs: list[Document] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecord(line_no, str(e))
            if not isinstance(rec, dict) or not {"id", "author", "text"} <= rec.keys():
                raise MalformedRecord(line_no, "missing id/author/text field")
            doc_id = str(rec["id"])
            text = str(rec["text"])
            if not doc_id:
                raise MalformedRecord(line_no, "empty id")
            if not text.strip():
                raise MalformedRecord(line_no, "empty text")
            if doc_id in seen:
                raise DuplicateId(doc_id)
            seen.add(doc_id)
            docs.append(Document(id=doc_id, author=str(rec["author"]), text=text))
    if not docs:
        raise EmptyCorpus(f"no documents in {path}")
    return docs


def save_corpus(docs: list[Document], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(json.dumps({"id": d.id, "author": d.author, "text": d.text}, ensure_ascii=False) + "\n")


def split(corpus: list[Document], spec: SplitSpec) -> tuple[list[Document], list[Document], list[Document]]:
    """Author-stratified split into (X, X*, T).

    Each author's documents are shuffled with a seeded PRNG and cut by
    cumulative fractions; rounding remainders go to X, but every split is
    guaranteed at least one document per author (requires >=3 docs/author).
    """
    spec.validate()
    by_author: dict[str, list[Document]] = {}
    for d in corpus:
        by_author.setdefault(d.author, []).append(d)

    xs: list[Document] = []
    xstars: list[Document] = []
    ts: list[Document] = []
    for author in sorted(by_author):
        docs = sorted(by_author[author], key=lambda d: d.id)
        if len(docs) < 3:
            raise AuthorTooSmall(author)
        rng = random.Random((spec.seed, author).__repr__())
        rng.shuffle(docs)
        n = len(docs)
        f1, f2, _ = spec.fractions
        c1 = int(f1 * n)
        c2 = int((f1 + f2) * n)
        n2 = c2 - c1
        n3 = n - c2
        n1 = c1
        # guarantee every split gets at least one doc, stealing from the largest
        counts = [n1, n2, n3]
        for i in range(3):
            while counts[i] < 1:
                donor = max(range(3), key=lambda j: counts[j])
                counts[donor] -= 1
                counts[i] += 1
        n1, n2, n3 = counts
        xs.extend(docs[:n1])
        xstars.extend(docs[n1:n1 + n2])
        ts.extend(docs[n1 + n2:])
    return xs, xstars, ts


def write_manifest(path: str | Path, x: list[Document], xstar: list[Document], t: list[Document],
                   spec: SplitSpec) -> None:
    manifest = {
        "fractions": list(spec.fractions),
        "seed": spec.seed,
        "splits": {
            "X": [d.id for d in x],
            "Xstar": [d.id for d in xstar],
            "T": [d.id for d in t],
        },
    }
    Path(path).write_text(json.dumps(manifest, indent=2), encoding="utf-8")
