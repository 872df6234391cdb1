import json
from pathlib import Path

import numpy as np
import pytest

from ocdesc.cli import main
from ocdesc.datasets import load_shipped_separable, shipped_separable_path, write_feature_csv
from ocdesc.evaluation.report import HEADER, read_benchmark

DATA = Path(__file__).resolve().parents[1] / "src" / "ocdesc" / "data"
GOLDEN = Path(__file__).parent / "golden" / "sentiment"
TOY = DATA / "toy_corpus.csv"
LABELED = DATA / "toy_labeled.csv"


def run(*argv):
    return main([str(a) for a in argv])


class TestSentiment:
    def test_three_rows(self, tmp_path):
        src = tmp_path / "c.csv"
        src.write_text("text,country\ngood day,UK\nbad day,USA\nplain day,UK\n")
        assert run("sentiment", "--input", src, "--output-dir", tmp_path / "o") == 0
        lines = (tmp_path / "o" / "scores.csv").read_text().splitlines()
        assert len(lines) == 4
        dist = json.loads((tmp_path / "o" / "distribution.json").read_text())
        assert set(dist["countries"]) == {"UK", "USA"}

    @pytest.mark.parametrize("name", ["scores.csv", "distribution.json", "keywords.csv", "hashtags.csv"])
    def test_golden(self, tmp_path, name):
        assert run("sentiment", "--input", TOY, "--output-dir", tmp_path, "--top-k", 10) == 0
        assert (tmp_path / name).read_bytes() == (GOLDEN / name).read_bytes()

    def test_jsonl_input(self, tmp_path):
        src = tmp_path / "c.jsonl"
        src.write_text('{"text": "good", "country": "UK"}\n{"text": "bad"}\n')
        assert run("sentiment", "--input", src, "--output-dir", tmp_path / "o") == 0

    def test_missing_input_exit3(self, tmp_path):
        assert run("sentiment", "--input", tmp_path / "nope.csv", "--output-dir", tmp_path) == 3

    def test_missing_lexicon_exit2(self, tmp_path):
        assert run("sentiment", "--input", TOY, "--lexicon", tmp_path / "x.tsv", "--output-dir", tmp_path) == 2

    def test_too_many_malformed(self, tmp_path):
        src = tmp_path / "c.csv"
        src.write_text("text\n \n \nok\n")
        assert run("sentiment", "--input", src, "--output-dir", tmp_path / "o") == 3


def test_featurize(tmp_path):
    assert run("featurize", "--input", LABELED, "--output-dir", tmp_path, "--max-vocab", 30) == 0
    header = (tmp_path / "features.csv").read_text().splitlines()[0].split(",")
    assert header[0] == "label" and len(header) == 31
    assert len(json.loads((tmp_path / "vectorizer.json").read_text())["vocabulary"]) == 30


class TestTrain:
    ARGS = ("--method", "S-SVDDpsi3-max", "--target-class", "positive", "--C", 0.3, "--d", 2,
            "--beta", 0.1, "--seed", 4)

    def test_smoke_and_determinism(self, tmp_path):
        assert run("train", "--input", LABELED, "--output-dir", tmp_path / "a", *self.ARGS) == 0
        assert run("train", "--input", LABELED, "--output-dir", tmp_path / "b", *self.ARGS) == 0
        m = json.loads((tmp_path / "a" / "metrics.json").read_text())
        assert set(m["metrics"]) >= {"accu", "gm"}
        assert (tmp_path / "a" / "model.json").read_bytes() == (tmp_path / "b" / "model.json").read_bytes()

    def test_negative_target_with_grid_search(self, tmp_path):
        grid = json.dumps({"C": [0.1, 0.3], "sigma": [1.0, 10.0]})
        assert run("train", "--input", LABELED, "--output-dir", tmp_path, "--method", "SVDD",
                   "--target-class", "negative", "--kernel", "nonlinear", "--grid", grid) == 0
        m = json.loads((tmp_path / "metrics.json").read_text())
        assert m["params"]["sigma"] in (1.0, 10.0)

    @pytest.mark.parametrize("method", ["SVDD", "NS-SVDDpsi2-min"])
    def test_separable_gm(self, tmp_path, method):
        # subspace method: hyperparameters omitted so train runs its CV grid search
        args = ["--C", 0.1, "--sigma", 10.0] if method == "SVDD" else []
        assert run("train", "--input", shipped_separable_path(), "--output-dir", tmp_path, "--method", method,
                   "--kernel", "nonlinear", *args) == 0
        assert json.loads((tmp_path / "metrics.json").read_text())["metrics"]["gm"] >= 0.9

    def test_bad_method_exit2(self, tmp_path):
        assert run("train", "--input", LABELED, "--output-dir", tmp_path, "--method", "FOO", "--C", 0.1) == 2

    def test_d_too_large_exit2(self, tmp_path):
        assert run("train", "--input", shipped_separable_path(), "--output-dir", tmp_path,
                   "--method", "S-SVDDpsi1-min", "--C", 0.1, "--d", 50, "--beta", 1.0) == 2


class TestConfig:
    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"input": str(TOY), "bogus": 1}))
        assert run("sentiment", "--config", cfg, "--output-dir", tmp_path) == 2

    def test_flags_override(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"input": str(TOY), "top_k": 1, "output_dir": str(tmp_path / "cfg")}))
        assert run("sentiment", "--config", cfg, "--top-k", 3) == 0
        assert len((tmp_path / "cfg" / "keywords.csv").read_text().splitlines()) == 4


class TestBenchmark:
    def test_svdd_single_repeat(self, tmp_path, capsys):
        grid = json.dumps({"C": [0.1, 0.5], "sigma": [10.0]})
        assert run("benchmark", "--input", shipped_separable_path(), "--method", "SVDD", "--repeats", 1,
                   "--grid", grid, "--output-dir", tmp_path) == 0
        text = (tmp_path / "benchmark.csv").read_text()
        assert text.splitlines()[0] == "Method,Accu,tpr,tnr,Pre,F1,GM,S-Accu,S-tpr,S-tnr,S-Pre,S-F1,S-GM"
        assert ",".join(HEADER) == text.splitlines()[0]
        rows = read_benchmark(tmp_path / "benchmark.csv")
        assert [(r.method, r.mode) for r in rows] == [("SVDD", "linear"), ("SVDD", "nonlinear")]
        for r in rows:
            assert all(v == 0.0 for v in r.metrics.stds())
        # lossless without the sidecar too
        rows2 = read_benchmark(tmp_path / "benchmark.csv", sidecar_path=tmp_path / "missing.json")
        assert [r.metrics.means() for r in rows2] == [r.metrics.means() for r in rows]
        assert run("report", "--input", tmp_path / "benchmark.csv") == 0
        assert "SVDD" in capsys.readouterr().out

    def test_report_prints_only(self, tmp_path, monkeypatch):
        src = tmp_path / "b.csv"
        src.write_text(",".join(HEADER) + "\nSVDD" + ",0.5" * 12 + "\n")
        work = tmp_path / "work"
        work.mkdir()
        monkeypatch.chdir(work)
        assert run("report", "--input", src) == 0
        assert list(work.iterdir()) == []

    def test_split_command(self, tmp_path):
        assert run("split", "--input", shipped_separable_path(), "--output-dir", tmp_path, "--repeats", 5) == 0
        doc = json.loads((tmp_path / "splits.json").read_text())
        assert len(doc["plans"]) == 5 and all(len(p["train_idx"]) == 140 for p in doc["plans"])

    def test_single_class_input_exit2(self, tmp_path):
        X, y = load_shipped_separable()
        p = tmp_path / "one.csv"
        write_feature_csv(p, X[:, y], np.ones(int(y.sum()), bool))
        assert run("benchmark", "--input", p, "--method", "SVDD", "--repeats", 1, "--output-dir", tmp_path) == 2
