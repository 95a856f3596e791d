"""Single-file model bundle: feature space, classifier, POS lexicon, tagger.

Everything obfuscation needs at inference time travels in one versioned
JSON file; the feature-space checksum inside the model section lets the
classifier refuse vectors from a mismatched space.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .attrib_net import AttributionModel
from .features import FeatureSpace
from .postag import TaggerModel

FORMAT_VERSION = 1
_SECTIONS = ("feature_space", "model", "pos_lexicon")


class BundleFormatError(Exception):
    def __init__(self, section: str, detail: str = ""):
        self.section = section
        super().__init__(f"bad bundle section {section!r}" + (f": {detail}" if detail else ""))


@dataclass
class ModelBundle:
    space: FeatureSpace
    model: AttributionModel
    pos_lexicon: dict[str, list[str]]
    tagger: TaggerModel | None = None
    config: dict | None = None

    def to_dict(self) -> dict:
        d = {
            "format_version": FORMAT_VERSION,
            "feature_space": json.loads(self.space.to_json()),
            "model": self.model.to_dict(),
            "pos_lexicon": self.pos_lexicon,
            "config": self.config or {},
        }
        if self.tagger is not None:
            d["tagger"] = {"version": self.tagger.version, "tagset": self.tagger.tagset,
                           "feature_weights": self.tagger.feature_weights}
        return d

    def checksum(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ModelBundle":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise BundleFormatError("file", str(e))
        if not isinstance(payload, dict):
            raise BundleFormatError("file", "not a JSON object")
        if payload.get("format_version") != FORMAT_VERSION:
            raise BundleFormatError("format_version",
                                    f"expected {FORMAT_VERSION}, got {payload.get('format_version')}")
        for section in _SECTIONS:
            if section not in payload:
                raise BundleFormatError(section, "missing")
        try:
            space = FeatureSpace.from_json(payload["feature_space"])
        except (KeyError, TypeError, ValueError) as e:
            raise BundleFormatError("feature_space", str(e))
        try:
            model = AttributionModel.from_dict(payload["model"])
        except (KeyError, TypeError, ValueError) as e:
            raise BundleFormatError("model", str(e))
        if not isinstance(payload["pos_lexicon"], dict):
            raise BundleFormatError("pos_lexicon", "not a mapping")
        tagger = None
        if "tagger" in payload:
            try:
                tagger = TaggerModel(tagset=payload["tagger"]["tagset"],
                                     feature_weights=payload["tagger"]["feature_weights"],
                                     version=payload["tagger"]["version"])
            except (KeyError, TypeError) as e:
                raise BundleFormatError("tagger", str(e))
        return cls(space=space, model=model, pos_lexicon=payload["pos_lexicon"],
                   tagger=tagger, config=payload.get("config") or {})
