import random
from collections import Counter

import numpy as np
import pytest

from styleveil.features import (FeatureKey, FeatureSpace, build_feature_space,
                                extract_ngrams, vectorize)
from styleveil.postag import TaggedText, tag_text, tokenize
from conftest import random_text


def brute_force_vector(space, tagged, raw):
    """Independent O(n*l) counting oracle, no shared code with vectorize."""
    out = np.zeros(space.dimension)
    for pos, key in enumerate(space.entries):
        seq = raw if key.kind == "char" else tagged.tags
        l = key.length
        total = max(len(seq) - l + 1, 0)
        if total == 0:
            continue
        count = 0
        for i in range(total):
            if tuple(seq[i:i + l]) == key.gram:
                count += 1
        out[pos] = count / total
    return out


class TestExtractNgrams:
    def test_pos_trigrams(self):
        got = extract_ngrams(["DT", "NN", "VBZ", "JJ"], 3)
        assert got == Counter({("DT", "NN", "VBZ"): 1, ("NN", "VBZ", "JJ"): 1})

    def test_overlap_counting(self):
        assert extract_ngrams("aaa", 2) == Counter({("a", "a"): 2})

    def test_too_short(self):
        assert extract_ngrams(["NN"], 4) == Counter()

    def test_count_identity(self):
        rng = random.Random(1)
        for _ in range(50):
            seq = [rng.choice("ab") for _ in range(rng.randint(0, 20))]
            l = rng.randint(1, 5)
            assert sum(extract_ngrams(seq, l).values()) == max(len(seq) - l + 1, 0)


class TestBuildFeatureSpace:
    def test_most_frequent_kept(self):
        tagged = [TaggedText("d", [], [])]
        space = build_feature_space(tagged, ["abab"], V=[2], L_vocab=1)
        char_bigrams = [k for k in space.entries if k.kind == "char" and k.length == 2]
        assert char_bigrams == [FeatureKey("char", ("a", "b"))]

    def test_tie_lexicographic(self):
        tagged = [TaggedText("d", [], [])]
        # "ab" and "ba" both occur 2x in "abab" + "ba": choose lexicographically
        space = build_feature_space(tagged, ["ababa"], V=[2], L_vocab=1)
        grams = [k.gram for k in space.entries if k.kind == "char" and k.length == 2]
        assert grams == [("a", "b")]  # counts 2 vs 2, ("a","b") < ("b","a")

    def test_dimension_census(self):
        rng = random.Random(7)
        texts = [random_text(rng, 120) for _ in range(10)]
        tagged = [tag_text(f"d{i}", t) for i, t in enumerate(texts)]
        V = [1, 2, 3, 4]
        space = build_feature_space(tagged, texts, V=V, L_vocab=100)
        expected = 0
        for kind in ("char", "pos"):
            for l in V:
                distinct = set()
                for i, text in enumerate(texts):
                    seq = text if kind == "char" else tagged[i].tags
                    for j in range(max(len(seq) - l + 1, 0)):
                        distinct.add(tuple(seq[j:j + l]))
                expected += min(100, len(distinct))
        assert space.dimension == expected

    def test_group_order(self):
        tagged = [tag_text("d", "The dog runs. The dog runs.")]
        space = build_feature_space(tagged, ["The dog runs. The dog runs."], V=[1, 2], L_vocab=5)
        kinds = [(k.kind, k.length) for k in space.entries]
        assert kinds == sorted(kinds, key=lambda kl: (("char", "pos").index(kl[0]), kl[1]))

    def test_serialization_roundtrip(self, tmp_path):
        tagged = [tag_text("d", "a b c")]
        space = build_feature_space(tagged, ["a b c"], V=[1, 2], L_vocab=10)
        p = tmp_path / "space.json"
        space.save(p)
        loaded = FeatureSpace.load(p)
        assert loaded.entries == space.entries
        assert loaded.V == space.V


class TestVectorize:
    def test_normalization(self):
        space = FeatureSpace(V=[2], L_vocab=1, entries=[FeatureKey("char", ("a", "b"))])
        tagged = TaggedText("d", [], [])
        v = vectorize(space, tagged, "abab")  # bigrams: ab, ba, ab -> 2/3
        assert v[0] == pytest.approx(2 / 3)

    def test_empty_text(self):
        space = FeatureSpace(V=[1, 2], L_vocab=1,
                             entries=[FeatureKey("char", ("a",)), FeatureKey("pos", ("NN",))])
        v = vectorize(space, TaggedText("d", [], []), "")
        assert np.all(v == 0)

    def test_oracle_equivalence(self):
        rng = random.Random(11)
        texts = [random_text(rng, 300) for _ in range(12)]
        tagged = [tag_text(f"d{i}", t) for i, t in enumerate(texts)]
        space = build_feature_space(tagged, texts, V=[1, 2, 3, 4], L_vocab=50)
        for i in range(200):
            text = random_text(rng, 500)
            tt = tag_text(f"q{i}", text)
            np.testing.assert_array_equal(vectorize(space, tt, text),
                                          brute_force_vector(space, tt, text))

    def test_values_in_unit_interval_and_group_sums(self):
        rng = random.Random(13)
        texts = [random_text(rng, 200) for _ in range(8)]
        tagged = [tag_text(f"d{i}", t) for i, t in enumerate(texts)]
        space = build_feature_space(tagged, texts, V=[1, 2], L_vocab=20)
        for i, text in enumerate(texts):
            v = vectorize(space, tagged[i], text)
            assert np.all(v >= 0) and np.all(v <= 1)
            for kind in ("char", "pos"):
                for l in space.V:
                    idx = [j for j, k in enumerate(space.entries)
                           if k.kind == kind and k.length == l]
                    assert v[idx].sum() <= 1 + 1e-12

    def test_permutation_sensitivity(self):
        rng = random.Random(17)
        text = "The quick dog runs fast. A slow cat sleeps here. Every bird sings loudly."
        tt = tag_text("d", text)
        space = build_feature_space([tt], [text], V=[2, 3], L_vocab=50)
        base = vectorize(space, tt, text)
        changed = 0
        for trial in range(10):
            order = list(range(len(tt.tags)))
            rng.shuffle(order)
            shuffled = TaggedText("d", tt.tokens, [tt.tags[i] for i in order])
            v = vectorize(space, shuffled, text)
            pos_idx = [j for j, k in enumerate(space.entries) if k.kind == "pos"]
            if not np.array_equal(v[pos_idx], base[pos_idx]):
                changed += 1
        assert changed >= 8

    def test_dimension_stability(self):
        rng = random.Random(19)
        texts = [random_text(rng, 100) for _ in range(5)]
        tagged = [tag_text(f"d{i}", t) for i, t in enumerate(texts)]
        space = build_feature_space(tagged, texts, V=[1, 3], L_vocab=10)
        for raw in ["", "x", texts[0]]:
            tt = tag_text("q", raw)
            assert vectorize(space, tt, raw).shape == (space.dimension,)
