import hashlib
import json
import os

import pytest

from wsskit import cli, corpus
from wsskit.corpus import Dataset, NewsArticle, Publisher, User
from wsskit.ioutil import read_jsonl


def _write_config(path, mapping):
    path.write_text("".join(f"{k}={v}\n" for k, v in mapping.items()))
    return str(path)


def _base_config(tmp_path, **extra):
    mapping = {
        "seed": 5,
        "paths.corpus_dir": tmp_path / "corpus",
        "paths.out_dir": tmp_path / "out",
        "paths.lexicon": tmp_path / "corpus" / "lexicon.jsonl",
        "paths.seed_bias": tmp_path / "corpus" / "seed_bias.jsonl",
        "paths.labels": tmp_path / "corpus" / "ground_truth.jsonl",
        "paths.predictions": tmp_path / "out" / "mwss_predictions.jsonl",
        "paths.graph": tmp_path / "corpus" / "friendships.jsonl",
        "synth.n_news": 40,
        "synth.n_users": 80,
        "synth.vocab_signal": 0.5,
        "synth.credibility_gap": 0.8,
        "trifn.vocab_size": 256,
        "trifn.max_iters": 15,
        "mwss.hash_dim": 2048,
        "mwss.epochs": 10,
        "provenance.recipients": json.dumps(["u00001", "u00002"]),
        "provenance.k": 3,
    }
    mapping.update(extra)
    return _write_config(tmp_path / "run.cfg", mapping)


def _dir_hash(path):
    digest = hashlib.sha256()
    for root, _, files in os.walk(path):
        for name in sorted(files):
            rel = os.path.relpath(os.path.join(root, name), path)
            digest.update(rel.encode())
            with open(os.path.join(root, name), "rb") as fh:
                digest.update(fh.read())
    return digest.hexdigest()


def test_synth_then_validate(tmp_path):
    cfg = _base_config(tmp_path)
    assert cli.main(["synth", "--config", cfg]) == 0
    assert cli.main(["validate", "--config", cfg]) == 0


def test_unknown_command_exits_two(tmp_path):
    cfg = _base_config(tmp_path)
    with pytest.raises(SystemExit) as err:
        cli.main(["frobnicate", "--config", cfg])
    assert err.value.code == 2


def test_missing_corpus_is_module_error(tmp_path, capsys):
    cfg = _base_config(tmp_path)
    assert cli.main(["validate", "--config", cfg]) == 1
    assert "error:" in capsys.readouterr().err


def test_label_weak_without_engagements_all_abstain(tmp_path):
    corpus_dir = tmp_path / "corpus"
    d = Dataset(news=[NewsArticle(id="n1", publisher_id="p0", text="hello world",
                                  published_at=0)],
                users=[User(id="u1")], publishers=[Publisher(id="p0")])
    corpus.save_dataset(d, corpus_dir)
    cfg = _write_config(tmp_path / "cfg", {
        "paths.corpus_dir": corpus_dir,
        "paths.out_dir": tmp_path / "out",
    })
    assert cli.main(["label-weak", "--config", cfg]) == 0
    rows = [row for _, row in read_jsonl(tmp_path / "out" / "weak_labels.jsonl")]
    assert len(rows) == 3
    assert all(row["label"] == "abstain" for row in rows)


def test_full_pipeline_and_determinism(tmp_path):
    h = []
    for run in ("one", "two"):
        base = tmp_path / run
        base.mkdir()
        cfg = _base_config(base)
        for command in ("synth", "validate", "signals", "label-weak", "calibrate",
                        "train-trifn", "train-mwss", "infer", "prop-features",
                        "compare", "attribute", "eval"):
            assert cli.main([command, "--config", cfg]) == 0, command
        h.append((_dir_hash(base / "corpus"), _dir_hash(base / "out")))
    assert h[0] == h[1]


def test_seed_env_override(tmp_path, monkeypatch):
    cfg = _base_config(tmp_path)
    cli.main(["synth", "--config", cfg])
    first = _dir_hash(tmp_path / "corpus")
    monkeypatch.setenv("WSSKIT_SEED", "99")
    cli.main(["synth", "--config", cfg])
    second = _dir_hash(tmp_path / "corpus")
    assert first != second


def test_lock_file_blocks_concurrent_runs(tmp_path, capsys):
    cfg = _base_config(tmp_path)
    out_dir = tmp_path / "corpus"
    out_dir.mkdir()
    lock = out_dir / ".wsskit.lock"
    lock.write_text("")
    assert cli.main(["synth", "--config", cfg]) == 1
    assert "locked" in capsys.readouterr().err
    lock.unlink()
    assert cli.main(["synth", "--config", cfg]) == 0
    assert not lock.exists()


def test_eval_metrics_against_crafted_predictions(tmp_path):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    (corpus_dir / "ground_truth.jsonl").write_text(
        '{"news_id":"a","label":"fake"}\n{"news_id":"b","label":"real"}\n'
        '{"news_id":"c","label":"fake"}\n')
    preds = tmp_path / "preds.jsonl"
    preds.write_text('{"news_id":"a","p_fake":0.9}\n{"news_id":"b","p_fake":0.2}\n'
                     '{"news_id":"c","p_fake":0.4}\n')
    cfg = _write_config(tmp_path / "cfg", {
        "paths.out_dir": tmp_path / "out",
        "paths.labels": corpus_dir / "ground_truth.jsonl",
        "paths.predictions": preds,
    })
    assert cli.main(["eval", "--config", cfg]) == 0
    result = json.loads((tmp_path / "out" / "metrics.json").read_text())
    assert result["n"] == 3
    assert result["accuracy"] == pytest.approx(2 / 3)
    assert result["f1"] == pytest.approx(2 / 3)
    assert result["auc"] == pytest.approx(1.0)


def test_config_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("this line has no equals sign\n")
    assert cli.main(["validate", "--config", str(bad)]) == 1
    assert "key=value" in capsys.readouterr().err


def test_calibrated_thresholds_file_is_config_fragment(tmp_path):
    cfg = _base_config(tmp_path)
    cli.main(["synth", "--config", cfg])
    assert cli.main(["calibrate", "--config", cfg]) == 0
    text = (tmp_path / "out" / "calibrated.cfg").read_text()
    keys = dict(line.split("=") for line in text.strip().splitlines())
    assert set(keys) == {"weak.tau1", "weak.tau2", "weak.tau3", "weak.min_support"}
