"""High-level glue: one-time training and text-level prediction.

Wires corpus -> tagging -> feature space -> classifier -> bundle, and
wraps a bundle as a text-in/author-out classifier (also used as the
stand-in target adversary in evaluation).
"""

from __future__ import annotations

import time

from . import attrib_net
from .bundle import ModelBundle
from .corpus import Document
from .features import build_feature_space, vectorize
from .postag import TaggerModel, tag_text
from .replace import build_pos_lexicon


def train_bundle(docs: list[Document], V: list[int] | None = None, L_vocab: int = 100,
                 config: attrib_net.TrainConfig | None = None,
                 tagger: TaggerModel | None = None) -> tuple[ModelBundle, float]:
    """One-time training over a split; returns (bundle, wall seconds).

    Wall time is reported separately and never stored in the bundle so
    identical seeds produce identical bundle checksums.
    """
    V = V or [1, 2, 3, 4]
    config = config or attrib_net.TrainConfig()
    start = time.perf_counter()
    tagged = [tag_text(d.id, d.text, tagger) for d in docs]
    space = build_feature_space(tagged, [d.text for d in docs], V, L_vocab)
    samples = [(vectorize(space, tt, d.text), d.author) for tt, d in zip(tagged, docs)]
    model = attrib_net.train(samples, config, feature_space_checksum=space.checksum())
    lexicon = build_pos_lexicon(tagged)
    bundle = ModelBundle(
        space=space, model=model, pos_lexicon=lexicon, tagger=tagger,
        config={"V": V, "L_vocab": L_vocab, "seed": config.seed,
                "epochs": config.epochs, "learning_rate": config.learning_rate,
                "batch_size": config.batch_size},
    )
    return bundle, time.perf_counter() - start


class BundleClassifier:
    """Text-level author prediction through a trained bundle."""

    def __init__(self, bundle: ModelBundle):
        self.bundle = bundle

    def predict(self, text: str) -> str:
        tagged = tag_text("", text, self.bundle.tagger)
        v = vectorize(self.bundle.space, tagged, text)
        return self.bundle.model.predict(v)

    def __call__(self, text: str) -> str:
        return self.predict(text)
