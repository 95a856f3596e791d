"""Per-text obfuscation: match important POS n-grams, mask, fill, freeze.

Tags and features are computed on the original text once; the top-L
POS-only features are processed in rank order, each accepted match is
filled in a single generator call and its span frozen so later features
cannot touch it.  Obfuscation is unconditional: the internal
classifier's prediction is never used to gate the rewrite.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .attrib_net import AttributionModel
from .corpus import Document
from .features import FeatureKey, FeatureSpace, vectorize
from .igrad import IGConfig, integrated_gradients, rank_features
from .postag import TaggedText, TaggerModel, reconstruct, tag_text
from .replace import FillRequest, GeneratorError, ReplacementGenerator, check_arity


class GeneratorUnavailable(Exception):
    def __init__(self, cause: Exception, partial: "ObfuscationResult"):
        self.cause = cause
        self.partial = partial
        super().__init__(f"replacement generator failed: {cause}")


@dataclass
class ObfuscationConfig:
    L_obf: int = 20
    c: float = 1.4
    ig_steps: int = 64
    max_changed_fraction: float = 0.6
    context_window: int = 64
    use_absolute: bool = False

    def __post_init__(self):
        if self.L_obf < 1:
            raise ValueError("L_obf must be >= 1")
        if not 0 < self.max_changed_fraction <= 1:
            raise ValueError("max_changed_fraction must be in (0, 1]")


@dataclass
class Change:
    start: int  # token index, inclusive
    end: int  # token index, exclusive
    original_tokens: list[str]
    replacement_tokens: list[str]
    feature: FeatureKey
    scaled_attribution: float


@dataclass
class ObfuscationResult:
    doc_id: str
    original_text: str
    obfuscated_text: str
    changes: list[Change]
    timing: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "original_text": self.original_text,
            "obfuscated_text": self.obfuscated_text,
            "changes": [
                {
                    "span": [c.start, c.end],
                    "original_tokens": c.original_tokens,
                    "replacement_tokens": c.replacement_tokens,
                    "feature": {"kind": c.feature.kind, "gram": list(c.feature.gram)},
                    "scaled_attribution": c.scaled_attribution,
                }
                for c in self.changes
            ],
            "timing": self.timing,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObfuscationResult":
        changes = [
            Change(
                start=c["span"][0], end=c["span"][1],
                original_tokens=list(c["original_tokens"]),
                replacement_tokens=list(c["replacement_tokens"]),
                feature=FeatureKey(c["feature"]["kind"], tuple(c["feature"]["gram"])),
                scaled_attribution=c["scaled_attribution"],
            )
            for c in d["changes"]
        ]
        return cls(doc_id=d["doc_id"], original_text=d["original_text"],
                   obfuscated_text=d["obfuscated_text"], changes=changes,
                   timing=d.get("timing", {}))


def match_pos_ngram(tags: list[str], gram: tuple[str, ...],
                    frozen: set[int]) -> list[tuple[int, int]]:
    """Left-to-right occurrences of gram in tags, skipping frozen indices.

    Each accepted match freezes its own span immediately, so later
    occurrences overlapping an earlier acceptance are rejected.
    """
    if not gram:
        raise ValueError("gram must be non-empty")
    l = len(gram)
    taken = set(frozen)
    out: list[tuple[int, int]] = []
    i = 0
    while i + l <= len(tags):
        span = range(i, i + l)
        if tuple(tags[i:i + l]) == tuple(gram) and not any(j in taken for j in span):
            out.append((i, i + l))
            taken.update(span)
            i += l
        else:
            i += 1
    return out


def obfuscate_text(doc: Document, model: AttributionModel, space: FeatureSpace,
                   generator: ReplacementGenerator, cfg: ObfuscationConfig | None = None,
                   tagger: TaggerModel | None = None,
                   tagged: TaggedText | None = None) -> ObfuscationResult:
    """Run the full rewrite loop for one document.

    On generator failure, raises GeneratorUnavailable carrying the
    partial result with all changes completed so far.
    """
    cfg = cfg or ObfuscationConfig()

    t0 = time.perf_counter()
    if tagged is None:
        tagged = tag_text(doc.id, doc.text, tagger)
    surfaces = list(tagged.surfaces)
    v = vectorize(space, tagged, doc.text)
    attributions = integrated_gradients(model, v, IGConfig(steps=cfg.ig_steps, c=cfg.c))
    ranked = rank_features(attributions, space, cfg.c, use_absolute=cfg.use_absolute)
    pos_features = [f for f in ranked if f.key.kind == "pos"][:cfg.L_obf]
    t_attr = time.perf_counter() - t0

    n_tokens = len(surfaces)
    frozen: set[int] = set()
    changes: list[Change] = []
    new_surfaces = list(surfaces)
    t_match = 0.0
    t_gen = 0.0
    budget_hit = False
    error: GeneratorError | None = None

    for feat in pos_features:
        if budget_hit or error:
            break
        m0 = time.perf_counter()
        matches = match_pos_ngram(tagged.tags, feat.key.gram, frozen)
        t_match += time.perf_counter() - m0
        for start, end in matches:
            if n_tokens and len(frozen) / n_tokens >= cfg.max_changed_fraction:
                budget_hit = True
                break
            req = FillRequest(tokens=surfaces, mask_indices=list(range(start, end)),
                              context_window=cfg.context_window)
            g0 = time.perf_counter()
            try:
                resp = generator.fill(req, tagged.tags)
                check_arity(req, resp)
            except GeneratorError as e:
                error = e
                t_gen += time.perf_counter() - g0
                break
            t_gen += time.perf_counter() - g0
            for offset, r in zip(range(start, end), resp.replacements):
                new_surfaces[offset] = r
            frozen.update(range(start, end))
            changes.append(Change(
                start=start, end=end,
                original_tokens=surfaces[start:end],
                replacement_tokens=list(resp.replacements),
                feature=feat.key,
                scaled_attribution=feat.scaled_attribution,
            ))

    obfuscated = reconstruct(doc.text, tagged.tokens, new_surfaces)
    result = ObfuscationResult(
        doc_id=doc.id,
        original_text=doc.text,
        obfuscated_text=obfuscated,
        changes=changes,
        timing={"attribution": t_attr, "matching": t_match, "generation": t_gen},
    )
    if error is not None:
        raise GeneratorUnavailable(error, result)
    return result


def explain(result: ObfuscationResult) -> dict:
    """Human-readable and JSON interpretability report for one result."""
    from .postag import tokenize
    tokens = tokenize(result.original_text)
    entries = []
    for c in result.changes:
        start_off = tokens[c.start][1] if c.start < len(tokens) else 0
        end_off = tokens[c.end - 1][2] if 0 < c.end <= len(tokens) else start_off
        entries.append({
            "pos_ngram": list(c.feature.gram),
            "scaled_attribution": c.scaled_attribution,
            "original": " ".join(c.original_tokens),
            "replacement": " ".join(c.replacement_tokens),
            "char_offsets": [start_off, end_off],
        })
    if entries:
        lines = [
            f"[{e['char_offsets'][0]}:{e['char_offsets'][1]}] "
            f"{'+'.join(e['pos_ngram'])} ({e['scaled_attribution']:+.4f}): "
            f"{e['original']!r} -> {e['replacement']!r}"
            for e in entries
        ]
        text = "\n".join(lines)
    else:
        text = "no matches among top-L features"
    return {"doc_id": result.doc_id, "changes": entries, "text": text}


def explain_json(result: ObfuscationResult) -> str:
    return json.dumps(explain(result), ensure_ascii=False, sort_keys=True)
