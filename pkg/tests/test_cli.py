"""Command-line interface: artifacts, exit codes, reproducibility."""

import csv
import json

import numpy as np
import pytest
from click.testing import CliRunner

from anchorfree.cli import main
from anchorfree.io_utils import load_dense


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def corpus(tmp_path):
    """Three-block corpus: 30 words, 45 docs, one word block per label."""
    rng = np.random.default_rng(0)
    v, docs_per = 30, 15
    block = v // 3
    cols = []
    labels = []
    for g in range(3):
        for _ in range(docs_per):
            col = np.zeros(v, dtype=int)
            words = rng.integers(g * block, (g + 1) * block, size=25)
            np.add.at(col, words, 1)
            col[rng.integers(0, v, size=3)] += 1  # light cross-topic noise
            cols.append(col)
            labels.append(g)
    x = np.column_stack(cols)
    td = tmp_path / "corpus.txt"
    vocab = tmp_path / "vocab.txt"
    lab = tmp_path / "labels.txt"
    coo = [(i + 1, j + 1, int(x[i, j]))
           for i in range(v) for j in range(x.shape[1]) if x[i, j]]
    with open(td, "w") as fh:
        fh.write(f"{v} {x.shape[1]} {len(coo)}\n")
        for w, d, c in coo:
            fh.write(f"{w} {d} {c}\n")
    vocab.write_text("".join(f"word{i}\n" for i in range(v)))
    lab.write_text("".join(f"{g}\n" for g in labels))
    return td, vocab, lab


class TestSynthAndFactorize:
    def test_synth_bundle_round_trips(self, runner, tmp_path):
        out = tmp_path / "bundle"
        res = runner.invoke(main, ["synth", "-V", "60", "-F", "3",
                                   "--seed", "4", "--out", str(out)])
        assert res.exit_code == 0, res.output
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["f"] == 3
        c_nat, _ = load_dense(out / "c_nat.bin")
        assert c_nat.shape == (60, 3)
        assert np.allclose(c_nat.sum(axis=0), 1.0)

    def test_factorize_bundle_recovers_truth(self, runner, tmp_path):
        bundle = tmp_path / "bundle"
        model = tmp_path / "model"
        runner.invoke(main, ["synth", "-V", "80", "-F", "4",
                             "--seed", "1", "--out", str(bundle)])
        res = runner.invoke(main, ["factorize", "--input",
                                   str(bundle / "manifest.json"),
                                   "-F", "4", "--out", str(model)])
        assert res.exit_code == 0, res.output
        payload = json.loads((model / "topics.json").read_text())
        assert payload["f"] == 4
        assert payload["method"] == "anchorfree"
        assert payload["diagnostics"]["converged"] is True
        assert len(payload["topics"]) == 4
        c_star, tag = load_dense(model / "c_star.bin")
        assert tag  # provenance hash recorded
        assert np.allclose(c_star.sum(axis=0), 1.0, atol=1e-9)

    def test_factorize_spa_method(self, runner, tmp_path):
        bundle = tmp_path / "bundle"
        model = tmp_path / "model"
        runner.invoke(main, ["synth", "-V", "60", "-F", "3",
                             "--seed", "2", "--out", str(bundle)])
        res = runner.invoke(main, ["factorize", "--input",
                                   str(bundle / "manifest.json"),
                                   "-F", "3", "--method", "spa",
                                   "--out", str(model)])
        assert res.exit_code == 0, res.output
        payload = json.loads((model / "topics.json").read_text())
        assert payload["method"] == "spa"

    def test_factorize_same_seed_bit_identical(self, runner, tmp_path):
        bundle = tmp_path / "bundle"
        runner.invoke(main, ["synth", "-V", "70", "-F", "3",
                             "--seed", "6", "--out", str(bundle)])
        outs = []
        for name in ("m1", "m2"):
            model = tmp_path / name
            res = runner.invoke(main, ["factorize", "--input",
                                       str(bundle / "manifest.json"),
                                       "-F", "3", "--seed", "9",
                                       "--out", str(model)])
            assert res.exit_code == 0, res.output
            outs.append(load_dense(model / "c_star.bin")[0])
        assert np.array_equal(outs[0], outs[1])


class TestCorpusPipeline:
    def test_factorize_then_eval(self, runner, tmp_path, corpus):
        td, vocab, labels = corpus
        model = tmp_path / "model"
        res = runner.invoke(main, ["factorize", "--input", str(td),
                                   "--vocab", str(vocab), "-F", "3",
                                   "--top-n", "5", "--out", str(model)])
        assert res.exit_code == 0, res.output
        report_dir = tmp_path / "eval"
        res = runner.invoke(main, ["eval", "--model", str(model),
                                   "--input", str(td), "--vocab", str(vocab),
                                   "--labels", str(labels), "--top-n", "5",
                                   "--out", str(report_dir)])
        assert res.exit_code == 0, res.output
        report = json.loads((report_dir / "report.json").read_text())
        assert len(report["coherence_per_topic"]) == 3
        assert report["clust_acc"] >= 0.9  # well-separated blocks
        assert report["sim_count"] == 0
        with open(report_dir / "metrics.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["metric", "topic", "value", "config_hash"]
        assert len({r[3] for r in rows[1:]}) == 1  # one hash per run


class TestBench:
    def test_bench_outputs(self, runner, tmp_path):
        out = tmp_path / "bench"
        res = runner.invoke(main, ["bench", "-F", "3", "--trials", "2",
                                   "-V", "50", "--out", str(out)])
        assert res.exit_code == 0, res.output
        with open(out / "bench.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4  # 2 trials x 2 methods
        assert {r["method"] for r in rows} == {"anchorfree", "spa"}
        af = [float(r["err_c"]) for r in rows if r["method"] == "anchorfree"]
        assert max(af) < 1e-6
        with open(out / "bench_summary.csv", newline="") as fh:
            summary = list(csv.DictReader(fh))
        assert len(summary) == 2


class TestExitCodes:
    def test_missing_input_is_io_error(self, runner, tmp_path):
        res = runner.invoke(main, ["factorize", "--input",
                                   str(tmp_path / "nope.bin"),
                                   "-F", "2", "--out", str(tmp_path / "o")])
        assert res.exit_code == 2

    def test_malformed_corpus_is_io_error(self, runner, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a header\n")
        vocab = tmp_path / "v.txt"
        vocab.write_text("a\n")
        res = runner.invoke(main, ["factorize", "--input", str(bad),
                                   "--vocab", str(vocab), "-F", "2",
                                   "--out", str(tmp_path / "o")])
        assert res.exit_code == 2

    def test_numerical_failure_is_exit_3(self, runner, tmp_path):
        bundle = tmp_path / "bundle"
        runner.invoke(main, ["synth", "-V", "20", "-F", "2",
                             "--seed", "0", "--out", str(bundle)])
        # rank-2 input cannot yield 15 anchors
        res = runner.invoke(main, ["factorize", "--input",
                                   str(bundle / "manifest.json"),
                                   "-F", "15", "--method", "spa",
                                   "--out", str(tmp_path / "o")])
        assert res.exit_code == 3

    def test_bad_config_is_exit_4(self, runner, tmp_path):
        res = runner.invoke(main, ["bench", "-F", "0", "--out",
                                   str(tmp_path / "o")])
        assert res.exit_code == 4

    def test_term_doc_without_vocab_is_exit_4(self, runner, tmp_path, corpus):
        td, _, _ = corpus
        res = runner.invoke(main, ["factorize", "--input", str(td),
                                   "-F", "2", "--out", str(tmp_path / "o")])
        assert res.exit_code == 4
