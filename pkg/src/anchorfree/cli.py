"""Batch command-line front end.

Exit codes: 0 success, 2 I/O failure, 3 numerical failure, 4 bad
configuration."""

from __future__ import annotations

import csv
import functools
import hashlib
import json
import os
import struct
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import corpus as corpus_mod
from .cooccur import (
    CooccurrenceMatrix,
    Estimator,
    estimate_cooccurrence,
    load_cooccurrence,
    save_cooccurrence,
)
from .errors import AnchorfreeError, ConfigError, CorpusFormatError, NumericalError
from .factorization import FactorizeOptions, Method, anchor_free_factorize
from .io_utils import config_hash, load_dense, save_dense, worker_count
from .metrics import (
    DEFAULT_TOP_N,
    EvalReport,
    clustering_accuracy,
    coherence,
    estimate_weights,
    recovery_error,
    sim_count,
    top_words_per_topic,
)
from .spa import spa_factorize
from .synth import generate_synthetic

EXIT_IO = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4

DEFAULT_BENCH_TOPICS = (5, 10, 15, 20, 25, 30)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (CorpusFormatError, OSError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_IO)
        except NumericalError as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_NUMERICAL)
        except (ConfigError, ValueError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_CONFIG)

    return wrapper


@click.group()
def main():
    """Anchor-free topic mining toolkit."""


def _load_input(input_path, vocab, stoplist, estimator, use_tfidf, use_ncw):
    """Build a co-occurrence matrix (plus optional corpus) from either a
    synthetic bundle manifest, a binary co-occurrence cache, or a
    term-doc text file."""
    if input_path.endswith(".json"):
        with open(input_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        bundle_dir = os.path.dirname(os.path.abspath(input_path))
        p = load_cooccurrence(os.path.join(bundle_dir, manifest["p_file"]))
        return p, None, manifest
    if input_path.endswith(".bin"):
        return load_cooccurrence(input_path), None, None
    if vocab is None:
        raise ConfigError("--vocab is required for term-doc input")
    td = corpus_mod.load_term_doc(input_path, vocab)
    if stoplist:
        td = corpus_mod.remove_stopwords(td, corpus_mod.load_stoplist(stoplist))
    weighted = td
    if use_tfidf:
        weighted = corpus_mod.tfidf(weighted)
    if use_ncw:
        weighted = corpus_mod.ncw_weight(weighted)
    p = estimate_cooccurrence(weighted, estimator)
    return p, (td, weighted), None


def _run_method(method, p, f, opts):
    if method == Method.ANCHOR_FREE:
        return anchor_free_factorize(p, f, opts)
    model, _anchors = spa_factorize(p, f)
    return model, None


def _topics_payload(model, report, vocab, top_n, cfg_hash, f):
    v = model.c.shape[0]
    tokens = vocab if vocab is not None else [f"w{i}" for i in range(v)]
    topics = []
    for j in range(model.c.shape[1]):
        order = np.lexsort((np.arange(v), -model.c[:, j]))[: min(top_n, v)]
        topics.append(
            {
                "words": [tokens[i] for i in order],
                "probs": [float(model.c[i, j]) for i in order],
            }
        )
    diagnostics = {}
    if report is not None:
        diagnostics = {
            "sweeps": report.sweeps,
            "det_trajectory": [float(x) for x in report.det_trajectory],
            "converged": report.converged,
            "lp_calls": report.lp_calls,
        }
    return {
        "f": f,
        "method": model.method_tag.value,
        "top_n": top_n,
        "topics": topics,
        "e": [[float(x) for x in row] for row in model.e],
        "diagnostics": diagnostics,
        "provenance": {"config_hash": cfg_hash, "timestamp": time.time()},
    }


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


_method_choice = click.Choice([m.value for m in Method])
_estimator_choice = click.Choice(
    [Estimator.SCALED_GRAM.value, Estimator.COUNT_COOCCUR.value]
)


@main.command()
@click.option("--input", "input_path", required=True,
              help="term-doc file, co-occurrence cache, or synth manifest.json")
@click.option("--vocab", default=None, help="vocabulary file (term-doc input)")
@click.option("--stoplist", default=None, help="stop word list, one token per line")
@click.option("-F", "--topics", "f", type=int, required=True)
@click.option("--method", default=Method.ANCHOR_FREE.value, type=_method_choice)
@click.option("--estimator", default=Estimator.SCALED_GRAM.value,
              type=_estimator_choice)
@click.option("--tol", default=1e-6, show_default=True)
@click.option("--max-sweeps", default=50, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--strict-rank", is_flag=True, default=False)
@click.option("--retries", default=3, show_default=True)
@click.option("--top-n", default=DEFAULT_TOP_N, show_default=True)
@click.option("--tfidf/--no-tfidf", "use_tfidf", default=True, show_default=True)
@click.option("--ncw/--no-ncw", "use_ncw", default=True, show_default=True)
@click.option("--out", required=True, help="output directory")
@_guarded
def factorize(input_path, vocab, stoplist, f, method, estimator, tol, max_sweeps,
              seed, strict_rank, retries, top_n, use_tfidf, use_ncw, out):
    """Mine topics and write topics.json plus model binaries."""
    if f < 1:
        raise ConfigError("-F must be at least 1")
    cfg = {
        "command": "factorize", "input": os.path.basename(input_path),
        "f": f, "method": method, "estimator": estimator, "tol": tol,
        "max_sweeps": max_sweeps, "seed": seed, "strict_rank": strict_rank,
        "retries": retries, "top_n": top_n, "tfidf": use_tfidf, "ncw": use_ncw,
    }
    cfg_hash = config_hash(cfg)
    p, corpora, _ = _load_input(
        input_path, vocab, stoplist, Estimator(estimator), use_tfidf, use_ncw
    )
    opts = FactorizeOptions(tol=tol, max_sweeps=max_sweeps, seed=seed,
                            strict_rank=strict_rank, retries=retries)
    model, report = _run_method(Method(method), p, f, opts)
    os.makedirs(out, exist_ok=True)
    vocab_tokens = list(corpora[0].vocab) if corpora else None
    _write_json(os.path.join(out, "topics.json"),
                _topics_payload(model, report, vocab_tokens, top_n, cfg_hash, f))
    save_dense(model.c, os.path.join(out, "c_star.bin"), provenance=cfg_hash)
    save_dense(model.e, os.path.join(out, "e_star.bin"), provenance=cfg_hash)
    click.echo(f"wrote {out}/topics.json ({method}, F={f}, hash {cfg_hash})")


@main.command()
@click.option("--n-words", "-V", "v", default=1000, show_default=True)
@click.option("-F", "--topics", "f", type=int, required=True)
@click.option("--sparsity", default=0.5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, help="output directory")
@_guarded
def synth(v, f, sparsity, seed, out):
    """Write a seeded synthetic ground-truth bundle."""
    cfg = {"command": "synth", "v": v, "f": f, "sparsity": sparsity, "seed": seed}
    cfg_hash = config_hash(cfg)
    truth = generate_synthetic(v, f, sparsity=sparsity, seed=seed)
    os.makedirs(out, exist_ok=True)
    save_cooccurrence(CooccurrenceMatrix(truth.p, Estimator.EXACT),
                      os.path.join(out, "p.bin"))
    save_cooccurrence(CooccurrenceMatrix(truth.e_nat, Estimator.EXACT),
                      os.path.join(out, "e_nat.bin"))
    save_dense(truth.c_nat, os.path.join(out, "c_nat.bin"), provenance=cfg_hash)
    _write_json(os.path.join(out, "manifest.json"), {
        "v": v, "f": f, "sparsity": sparsity, "seed": seed,
        "p_file": "p.bin", "e_file": "e_nat.bin", "c_file": "c_nat.bin",
        "provenance": {"config_hash": cfg_hash, "timestamp": time.time()},
    })
    click.echo(f"wrote synthetic bundle to {out} (hash {cfg_hash})")


@main.command("eval")
@click.option("--model", "model_dir", required=True, help="factorize output dir")
@click.option("--input", "input_path", required=True, help="raw-count term-doc file")
@click.option("--vocab", required=True)
@click.option("--labels", default=None)
@click.option("--stoplist", default=None)
@click.option("--ground-truth", default=None,
              help="synth manifest.json for recovery error")
@click.option("--top-n", default=DEFAULT_TOP_N, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--tfidf/--no-tfidf", "use_tfidf", default=True, show_default=True)
@click.option("--ncw/--no-ncw", "use_ncw", default=True, show_default=True)
@click.option("--out", required=True, help="output directory")
@_guarded
def eval_cmd(model_dir, input_path, vocab, labels, stoplist, ground_truth,
             top_n, seed, use_tfidf, use_ncw, out):
    """Score a mined model: coherence, SimCount, clustering accuracy."""
    cfg = {
        "command": "eval", "model": os.path.basename(model_dir.rstrip("/")),
        "input": os.path.basename(input_path), "top_n": top_n, "seed": seed,
        "tfidf": use_tfidf, "ncw": use_ncw, "labels": bool(labels),
    }
    cfg_hash = config_hash(cfg)
    c_star, model_hash = load_dense(os.path.join(model_dir, "c_star.bin"))
    e_star, _ = load_dense(os.path.join(model_dir, "e_star.bin"))
    td = corpus_mod.load_term_doc(input_path, vocab)
    if stoplist:
        td = corpus_mod.remove_stopwords(td, corpus_mod.load_stoplist(stoplist))
    if td.n_words != c_star.shape[0]:
        raise ConfigError(
            f"model has {c_star.shape[0]} words but corpus has {td.n_words}"
        )
    weighted = corpus_mod.tfidf(td) if use_tfidf else td
    if use_ncw:
        weighted = corpus_mod.ncw_weight(weighted)

    top_idx = top_words_per_topic(c_star, top_n)
    coh = [coherence(t, td) for t in top_idx]
    sim = sim_count(top_idx)
    clust = float("nan")
    if labels:
        label_set = corpus_mod.load_labels(labels)
        if len(label_set.labels) != td.n_docs:
            raise ConfigError("label count does not match document count")
        weights = estimate_weights(weighted, c_star)
        clust = clustering_accuracy(weights, label_set, seed=seed)
    err_c = err_e = None
    if ground_truth:
        with open(ground_truth, encoding="utf-8") as fh:
            manifest = json.load(fh)
        gt_dir = os.path.dirname(os.path.abspath(ground_truth))
        c_nat, _ = load_dense(os.path.join(gt_dir, manifest["c_file"]))
        e_nat = load_cooccurrence(os.path.join(gt_dir, manifest["e_file"])).toarray()
        err_c, err_e, _ = recovery_error(c_star, e_star, c_nat, e_nat)

    report = EvalReport(
        coherence_per_topic=coh, sim_count=sim, clust_acc=clust,
        top_words=[[td.vocab[i] for i in t] for t in top_idx],
        recovery_err_c=err_c, recovery_err_e=err_e,
    )
    os.makedirs(out, exist_ok=True)
    _write_json(os.path.join(out, "report.json"), {
        "coherence_per_topic": report.coherence_per_topic,
        "sim_count": report.sim_count,
        "clust_acc": report.clust_acc,
        "top_words": report.top_words,
        "recovery_err_c": report.recovery_err_c,
        "recovery_err_e": report.recovery_err_e,
        "model_hash": model_hash,
        "provenance": {"config_hash": cfg_hash, "timestamp": time.time()},
    })
    with open(os.path.join(out, "metrics.csv"), "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "topic", "value", "config_hash"])
        for j, c in enumerate(coh):
            writer.writerow(["coherence", j, f"{c:.10g}", cfg_hash])
        writer.writerow(["sim_count", "", sim, cfg_hash])
        writer.writerow(["clust_acc", "", f"{clust:.10g}", cfg_hash])
    click.echo(
        f"Coh {np.mean(coh):.2f}  SimCount {sim}  ClustAcc {clust:.3f}"
    )


def _trial_seed(seed, f, trial):
    blob = struct.pack("<qqq", seed, f, trial)
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "little") >> 1


def _bench_one(seed, v, sparsity, f, trial):
    truth = generate_synthetic(v, f, sparsity=sparsity,
                               seed=_trial_seed(seed, f, trial))
    p = CooccurrenceMatrix(truth.p, Estimator.EXACT)
    rows = []
    for method in (Method.ANCHOR_FREE, Method.SPA_RECOVER):
        t0 = time.perf_counter()
        model, report = _run_method(method, p, f, FactorizeOptions(seed=0))
        wall = time.perf_counter() - t0
        err_c, err_e, _ = recovery_error(model.c, model.e, truth.c_nat, truth.e_nat)
        rows.append({
            "f": f, "method": method.value, "trial": trial,
            "err_c": err_c, "err_e": err_e, "wall_time": wall,
            "sweeps": report.sweeps if report else "",
        })
    return rows


@main.command()
@click.option("-F", "--topics", "topics", default=",".join(map(str, DEFAULT_BENCH_TOPICS)),
              show_default=True, help="comma-separated topic counts")
@click.option("--trials", default=10, show_default=True)
@click.option("--sparsity", default=0.5, show_default=True)
@click.option("--n-words", "-V", "v", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, help="output directory")
@_guarded
def bench(topics, trials, sparsity, v, seed, out):
    """Synthetic recovery sweep for both methods (Monte-Carlo trials)."""
    try:
        f_values = [int(t) for t in topics.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad -F list: {topics!r}") from None
    if not f_values or min(f_values) < 1:
        raise ConfigError("-F values must be positive integers")
    cfg = {"command": "bench", "topics": f_values, "trials": trials,
           "sparsity": sparsity, "v": v, "seed": seed}
    cfg_hash = config_hash(cfg)
    jobs = [(f, t) for f in f_values for t in range(trials)]
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda job: _bench_one(seed, v, sparsity, *job), jobs
            ))
    else:
        results = [_bench_one(seed, v, sparsity, f, t) for f, t in jobs]
    rows = [r for chunk in results for r in chunk]
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "bench.csv"), "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["f", "method", "trial", "err_c", "err_e",
                         "sweeps", "wall_time", "config_hash"])
        for r in rows:
            writer.writerow([r["f"], r["method"], r["trial"],
                             f"{r['err_c']:.6e}", f"{r['err_e']:.6e}",
                             r["sweeps"], f"{r['wall_time']:.3f}", cfg_hash])
    with open(os.path.join(out, "bench_summary.csv"), "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["f", "method", "mean_err_c", "mean_err_e", "config_hash"])
        click.echo(f"{'F':>4} {'method':>12} {'mean err_c':>14} {'mean err_e':>14}")
        for f in f_values:
            for method in (Method.ANCHOR_FREE, Method.SPA_RECOVER):
                sel = [r for r in rows
                       if r["f"] == f and r["method"] == method.value]
                mc = float(np.mean([r["err_c"] for r in sel]))
                me = float(np.mean([r["err_e"] for r in sel]))
                writer.writerow([f, method.value, f"{mc:.6e}", f"{me:.6e}",
                                 cfg_hash])
                click.echo(f"{f:>4} {method.value:>12} {mc:>14.4e} {me:>14.4e}")


if __name__ == "__main__":
    main()
