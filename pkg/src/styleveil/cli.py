"""Command-line surface: split, train, obfuscate, evaluate, bench, synth.

Flag > config-file > default precedence; all randomness flows from a
single --seed; every run echoes its effective configuration into its
output artifact.
"""

from __future__ import annotations

import json
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import synth
from .attrib_net import TrainConfig
from .bundle import ModelBundle
from .corpus import CorpusError, SplitSpec, load_corpus, save_corpus, split, write_manifest
from .evalmetrics import (EvalReport, TfIdfEmbedder, attack_success, change_rate,
                          cosine_similarity, label_entropy, meteor)
from .obfuscate import GeneratorUnavailable, ObfuscationConfig, ObfuscationResult, obfuscate_text
from .pipeline import BundleClassifier, train_bundle
from .postag import tag_text
from .replace import FallbackGenerator, RemoteGenerator

_KNOWN_CONFIG_KEYS = {
    "corpus", "out", "seed", "workers", "fractions", "V", "L_vocab", "L_obf",
    "c", "ig_steps", "generator", "max_changed_fraction", "epochs",
    "learning_rate", "batch_size", "hidden",
}


def _parse_flat_toml(text: str) -> dict:
    """Flat key = value lines; strings, numbers, booleans. No tables."""
    data: dict = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if value.startswith(("'", '"')) and value.endswith(value[0]) and len(value) >= 2:
            data[key] = value[1:-1]
        elif value in ("true", "false"):
            data[key] = value == "true"
        else:
            try:
                data[key] = int(value)
            except ValueError:
                data[key] = float(value)
    return data


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = _parse_flat_toml(Path(path).read_text(encoding="utf-8"))
    except ValueError as e:
        raise click.UsageError(str(e))
    unknown = set(data) - _KNOWN_CONFIG_KEYS
    if unknown:
        raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def _resolve(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _make_generator(spec: str, bundle: ModelBundle):
    if spec == "fallback":
        return FallbackGenerator(bundle.pos_lexicon)
    if spec.startswith("remote:"):
        return RemoteGenerator(endpoint=spec[len("remote:"):])
    raise click.UsageError(f"unknown generator {spec!r}; use 'fallback' or 'remote:<url>'")


@click.group()
def main():
    """Fast, interpretable authorship obfuscation."""


@main.command("split")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--fractions", default=None, help="three comma-separated fractions, e.g. 0.4,0.4,0.2")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", default=None, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def cmd_split(corpus_path, fractions, seed, out_dir, config_path):
    """Split a JSONL corpus into X / Xstar / T, stratified by author."""
    config = _load_config(config_path)
    fractions = _resolve(fractions, config, "fractions", "0.4,0.4,0.2")
    seed = _resolve(seed, config, "seed", 0)
    out_dir = Path(_resolve(out_dir, config, "out", "splits"))
    try:
        parts = [float(x) for x in str(fractions).split(",")]
        if len(parts) != 3:
            raise ValueError("need exactly three fractions")
        spec = SplitSpec(fractions=tuple(parts), seed=seed)
        spec.validate()
        docs = load_corpus(corpus_path)
        x, xstar, t = split(docs, spec)
    except (ValueError, CorpusError) as e:
        raise click.UsageError(f"fractions/corpus invalid: {e}")
    out_dir.mkdir(parents=True, exist_ok=True)
    save_corpus(x, out_dir / "X.jsonl")
    save_corpus(xstar, out_dir / "Xstar.jsonl")
    save_corpus(t, out_dir / "T.jsonl")
    write_manifest(out_dir / "manifest.json", x, xstar, t, spec)
    click.echo(f"split {len(docs)} docs -> X={len(x)} Xstar={len(xstar)} T={len(t)} in {out_dir}")


@main.command("train")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True),
              help="the Xstar split (attacker training data)")
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--V", "v_spec", default=None, help="comma-separated n-gram lengths")
@click.option("--L-vocab", "l_vocab", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def cmd_train(corpus_path, out_path, seed, v_spec, l_vocab, epochs, config_path):
    """One-time training: feature space + classifier + POS lexicon bundle."""
    config = _load_config(config_path)
    seed = _resolve(seed, config, "seed", 0)
    v_spec = _resolve(v_spec, config, "V", "1,2,3,4")
    l_vocab = _resolve(l_vocab, config, "L_vocab", 100)
    epochs = _resolve(epochs, config, "epochs", 50)
    out_path = Path(_resolve(out_path, config, "out", "bundle.json"))
    try:
        V = [int(x) for x in str(v_spec).split(",")]
        docs = load_corpus(corpus_path)
    except (ValueError, CorpusError) as e:
        raise click.UsageError(str(e))
    bundle, elapsed = train_bundle(docs, V=V, L_vocab=l_vocab,
                                   config=TrainConfig(seed=seed, epochs=epochs))
    bundle.save(out_path)
    meta = bundle.model.training_meta
    click.echo(json.dumps({
        "bundle": str(out_path),
        "checksum": bundle.checksum(),
        "validation_accuracy": meta.get("validation_accuracy"),
        "one_time_training_seconds": round(elapsed, 3),
        "config": bundle.config,
    }))


@main.command("obfuscate")
@click.option("--bundle", "bundle_path", required=True, type=click.Path(exists=True))
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--L-obf", "l_obf", type=int, default=None)
@click.option("--c", "c_value", type=float, default=None)
@click.option("--ig-steps", type=int, default=None)
@click.option("--generator", "generator_spec", default=None,
              help="'fallback' or 'remote:<url>'")
@click.option("--max-changed-fraction", type=float, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def cmd_obfuscate(bundle_path, in_path, out_path, l_obf, c_value, ig_steps,
                  generator_spec, max_changed_fraction, workers, seed, config_path):
    """Obfuscate every document in a JSONL corpus; writes results JSONL."""
    config = _load_config(config_path)
    l_obf = _resolve(l_obf, config, "L_obf", 20)
    c_value = _resolve(c_value, config, "c", 1.4)
    ig_steps = _resolve(ig_steps, config, "ig_steps", 64)
    generator_spec = _resolve(generator_spec, config, "generator", "fallback")
    max_changed_fraction = _resolve(max_changed_fraction, config, "max_changed_fraction", 0.6)
    workers = _resolve(workers, config, "workers", 1)
    out_path = Path(_resolve(out_path, config, "out", "results.jsonl"))

    try:
        bundle = ModelBundle.load(bundle_path)
        docs = load_corpus(in_path)
        ocfg = ObfuscationConfig(L_obf=l_obf, c=c_value, ig_steps=ig_steps,
                                 max_changed_fraction=max_changed_fraction)
    except (ValueError, CorpusError) as e:
        raise click.UsageError(str(e))
    generator = _make_generator(generator_spec, bundle)

    def run_one(doc):
        try:
            return obfuscate_text(doc, bundle.model, bundle.space, generator,
                                  ocfg, tagger=bundle.tagger), None
        except GeneratorUnavailable as e:
            return e.partial, str(e)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_one, docs))
    else:
        outcomes = [run_one(d) for d in docs]

    failures = 0
    phase_means = {"attribution": [], "matching": [], "generation": []}
    with out_path.open("w", encoding="utf-8") as fh:
        for result, err in outcomes:
            rec = result.to_dict()
            if err:
                rec["error"] = err
                failures += 1
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            for phase in phase_means:
                phase_means[phase].append(result.timing.get(phase, 0.0))
        summary = {
            "summary": True,
            "documents": len(docs),
            "failures": failures,
            "mean_latency_seconds": {p: (sum(v) / len(v) if v else 0.0)
                                     for p, v in phase_means.items()},
            "config": {"L_obf": l_obf, "c": c_value, "ig_steps": ig_steps,
                       "generator": generator_spec, "seed": seed,
                       "max_changed_fraction": max_changed_fraction,
                       "workers": workers},
        }
        fh.write(json.dumps(summary, ensure_ascii=False) + "\n")
    click.echo(json.dumps(summary))
    if failures:
        sys.exit(1)


@main.command("evaluate")
@click.option("--results", "results_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True),
              help="the T split, for true author labels")
@click.option("--target-bundle", "target_path", required=True, type=click.Path(exists=True),
              help="stand-in target classifier trained on X")
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--csv", "csv_path", default=None, type=click.Path(),
              help="optional per-document CSV")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def cmd_evaluate(results_path, corpus_path, target_path, out_path, csv_path, config_path):
    """Score an obfuscation run: attack success, METEOR, cosine, entropy."""
    config = _load_config(config_path)
    out_path = Path(_resolve(out_path, config, "out", "report.json"))
    try:
        docs = {d.id: d for d in load_corpus(corpus_path)}
        target = BundleClassifier(ModelBundle.load(target_path))
    except (ValueError, CorpusError) as e:
        raise click.UsageError(str(e))
    results = []
    for line in Path(results_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec.get("summary"):
            continue
        results.append(ObfuscationResult.from_dict(rec))
    if not results:
        raise click.UsageError("results file holds no documents")

    report = evaluate_results(results, docs, target)
    out_path.write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
    click.echo(report.to_table())
    if csv_path:
        _write_csv(csv_path, results, docs, target)


def evaluate_results(results, docs, target) -> EvalReport:
    """Paper-protocol scoring: retain originally-correct samples only."""
    retained = []
    correct_before = 0
    for r in results:
        doc = docs.get(r.doc_id)
        if doc is None:
            continue
        pre = target.predict(r.original_text)
        if pre == doc.author:
            correct_before += 1
            retained.append((r, doc.author, pre))
    total = sum(1 for r in results if r.doc_id in docs)
    raw_accuracy = correct_before / total if total else 0.0
    if not retained:
        raise click.UsageError("target classified nothing correctly; nothing to evaluate")

    pairs = [(r.original_text, r.obfuscated_text, author) for r, author, _ in retained]
    acc_after, f1_after = attack_success(target.predict, pairs)
    embedder = TfIdfEmbedder([r.original_text for r, _, _ in retained])
    meteors, cosines, rates = [], [], []
    post_pairs = []
    for r, author, pre in retained:
        meteors.append(meteor(r.original_text, r.obfuscated_text))
        cosines.append(cosine_similarity(embedder, r.original_text, r.obfuscated_text))
        tagged = tag_text(r.doc_id, r.original_text)
        rates.append(change_rate(tagged, r))
        post_pairs.append((pre, target.predict(r.obfuscated_text)))
    pool = sorted({d.author for d in docs.values()})
    entropy, contributions = label_entropy(post_pairs, author_pool=pool)
    return EvalReport(
        accuracy_before=1.0,
        accuracy_after=acc_after,
        f1_after=f1_after,
        meteor_mean=sum(meteors) / len(meteors),
        cosine_mean=sum(cosines) / len(cosines),
        change_rate_mean=sum(rates) / len(rates),
        entropy=entropy,
        per_author_entropy_contribution=contributions,
        extra={"raw_original_accuracy": raw_accuracy, "retained": len(retained),
               "total": total},
    )


def _write_csv(path, results, docs, target):
    import csv as _csv
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _csv.writer(fh)
        w.writerow(["doc_id", "author", "pred_before", "pred_after", "meteor", "change_rate"])
        for r in results:
            doc = docs.get(r.doc_id)
            if doc is None:
                continue
            tagged = tag_text(r.doc_id, r.original_text)
            w.writerow([r.doc_id, doc.author, target.predict(r.original_text),
                        target.predict(r.obfuscated_text),
                        f"{meteor(r.original_text, r.obfuscated_text):.4f}",
                        f"{change_rate(tagged, r):.4f}"])


@main.command("bench")
@click.option("--bundle", "bundle_path", required=True, type=click.Path(exists=True))
@click.option("--n", "n_texts", type=int, default=100)
@click.option("--words", type=int, default=1000)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def cmd_bench(bundle_path, n_texts, words, seed, out_path, config_path):
    """Latency percentiles per phase over N synthetic long texts."""
    config = _load_config(config_path)
    seed = _resolve(seed, config, "seed", 0)
    if n_texts < 1:
        raise click.UsageError("--n must be >= 1")
    bundle = ModelBundle.load(bundle_path)
    generator = FallbackGenerator(bundle.pos_lexicon)
    from .corpus import Document
    timings = {"attribution": [], "matching": [], "generation": []}
    change_counts = []
    for i in range(n_texts):
        text = synth.generate_long_text(words=words, seed=seed + i, author_index=i % 10)
        doc = Document(id=f"bench-{i}", author="bench", text=text)
        result = obfuscate_text(doc, bundle.model, bundle.space, generator,
                                ObfuscationConfig(), tagger=bundle.tagger)
        for p in timings:
            timings[p].append(result.timing[p])
        change_counts.append(len(result.changes))

    def pct(vals, q):
        return float(statistics.quantiles(vals, n=100)[q - 1]) if len(vals) > 1 else vals[0]

    table = {p: {"p50": pct(v, 50), "p95": pct(v, 95), "mean": sum(v) / len(v)}
             for p, v in timings.items()}
    payload = {"n": n_texts, "words": words, "seed": seed, "phases": table,
               "total_changes": sum(change_counts)}
    click.echo(f"{'phase':<12} {'p50 (s)':>10} {'p95 (s)':>10} {'mean (s)':>10}")
    for p, row in table.items():
        click.echo(f"{p:<12} {row['p50']:>10.4f} {row['p95']:>10.4f} {row['mean']:>10.4f}")
    if out_path:
        Path(out_path).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    else:
        click.echo(json.dumps(payload))


@main.command("synth")
@click.option("--authors", type=int, default=10)
@click.option("--docs-per-author", type=int, default=500)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", required=True, type=click.Path())
def cmd_synth(authors, docs_per_author, seed, out_path):
    """Generate a deterministic synthetic authorship corpus (JSONL)."""
    docs = synth.generate_corpus(n_authors=authors, docs_per_author=docs_per_author, seed=seed)
    save_corpus(docs, out_path)
    click.echo(f"wrote {len(docs)} docs for {authors} authors to {out_path}")


if __name__ == "__main__":
    main()
