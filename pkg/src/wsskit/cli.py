"""Pipeline orchestration: ``wsskit <subcommand> --config <path>``.

The config file is flat ``key=value`` text with dotted section keys
(``weak.tau1=0.5``); ``#`` starts a comment. WSSKIT_SEED in the environment
overrides the configured seed. Every subcommand writes its artifacts
atomically under ``paths.out_dir`` and takes a lock file there so concurrent
runs cannot interleave. Same config + seed reproduces byte-identical output.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from wsskit import corpus, metrics, mwss, propnet, provenance, signals, synth, trifn, weaklabel
from wsskit.errors import ParseError, WsskitError
from wsskit.ioutil import atomic_write_text, read_jsonl, write_jsonl

COMMANDS = (
    "validate", "synth", "signals", "label-weak", "calibrate", "train-trifn",
    "train-mwss", "infer", "prop-features", "compare", "attribute", "eval",
)

ARTIFACTS = {
    "signals": "signals.json",
    "weak_labels": "weak_labels.jsonl",
    "calibrated": "calibrated.cfg",
    "trifn_model": "trifn_model.json",
    "trifn_predictions": "trifn_predictions.jsonl",
    "mwss_model": "mwss_model.json",
    "mwss_predictions": "mwss_predictions.jsonl",
    "prop_features": "prop_features.jsonl",
    "comparison": "comparison.json",
    "attribution": "attribution.jsonl",
    "metrics": "metrics.json",
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed config: raw dotted keys plus the effective global seed."""

    values: dict
    seed: int

    def get_str(self, key, default=None):
        value = self.values.get(key)
        return default if value is None else value

    def require_str(self, key):
        if key not in self.values:
            raise ParseError(f"config key {key!r} is required")
        return self.values[key]

    def get_int(self, key, default):
        value = self.values.get(key)
        return default if value is None else int(value)

    def get_float(self, key, default):
        value = self.values.get(key)
        return default if value is None else float(value)

    def get_bool(self, key, default):
        value = self.values.get(key)
        if value is None:
            return default
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ParseError(f"config key {key!r} must be boolean, got {value!r}")

    def get_floats(self, key):
        value = self.values.get(key)
        if not value:
            return []
        return [float(part) for part in value.split(",") if part.strip()]

    def get_json(self, key, default=None):
        value = self.values.get(key)
        return default if value is None else json.loads(value)


def load_config(path) -> RunConfig:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected key=value", path=str(path), line=lineno)
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    seed = int(os.environ.get("WSSKIT_SEED", values.get("seed", "0")))
    return RunConfig(values=values, seed=seed)


class _OutDirLock:
    """Crude exclusion between subcommand invocations on one output dir."""

    def __init__(self, directory):
        os.makedirs(directory, exist_ok=True)
        self.path = os.path.join(directory, ".wsskit.lock")

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise WsskitError(
                f"output dir is locked by another run (remove {self.path} if stale)")
        os.close(fd)
        return self

    def __exit__(self, *exc):
        if os.path.exists(self.path):
            os.unlink(self.path)
        return False


def _out_path(cfg, name):
    return os.path.join(cfg.get_str("paths.out_dir", "out"), ARTIFACTS[name])


def _load_corpus(cfg):
    return corpus.load_dataset(cfg.require_str("paths.corpus_dir"))


def _load_lexicon(cfg):
    path = cfg.get_str("paths.lexicon")
    if path is None:
        return synth.default_lexicon()
    return signals.load_lexicon(path)


def _load_seed_bias(cfg):
    path = cfg.get_str("paths.seed_bias")
    if path is None:
        return synth.default_seed_bias()
    return signals.load_token_values(path)


def _weak_config(cfg) -> weaklabel.WeakLabelerConfig:
    return weaklabel.WeakLabelerConfig(
        tau1=cfg.get_float("weak.tau1", 0.5),
        tau2=cfg.get_float("weak.tau2", 0.5),
        tau3=cfg.get_float("weak.tau3", 0.5),
        min_support=cfg.get_int("weak.min_support", 3),
    )


def _compute_signals(cfg, d):
    return signals.compute_signals(
        d, _load_lexicon(cfg), _load_seed_bias(cfg),
        replies_only=cfg.get_bool("signals.replies_only", False),
        cluster_threshold=cfg.get_float("signals.cluster_threshold",
                                        signals.DEFAULT_CLUSTER_THRESHOLD),
    )


def _signals_for(cfg, d):
    """Reuse the signals artifact when present; recompute otherwise."""
    path = _out_path(cfg, "signals")
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return signals.SignalTable(
            sentiment_by_engagement=payload["sentiment_by_engagement"],
            bias_by_user=payload["bias_by_user"],
            credibility_by_user=payload["credibility_by_user"],
        )
    return _compute_signals(cfg, d)


def cmd_validate(cfg) -> int:
    d = _load_corpus(cfg)
    print(f"ok: {len(d.news)} news, {len(d.users)} users, {len(d.publishers)} publishers, "
          f"{len(d.engagements)} engagements, {len(d.friendships)} friendships")
    return 0


def cmd_synth(cfg) -> int:
    scfg = synth.SynthConfig(
        n_news=cfg.get_int("synth.n_news", 200),
        n_users=cfg.get_int("synth.n_users", 400),
        n_publishers=cfg.get_int("synth.n_publishers", 12),
        fake_fraction=cfg.get_float("synth.fake_fraction", 0.35),
        homophily_strength=cfg.get_float("synth.homophily_strength", 0.0),
        bias_gap=cfg.get_float("synth.bias_gap", 0.0),
        credibility_gap=cfg.get_float("synth.credibility_gap", 0.0),
        sentiment_gap=cfg.get_float("synth.sentiment_gap", 0.0),
        cascade_boost=cfg.get_float("synth.cascade_boost", 1.0),
        vocab_signal=cfg.get_float("synth.vocab_signal", 0.0),
        seed=cfg.seed,
    )
    out_dir = cfg.require_str("paths.corpus_dir")
    d, truth = synth.generate(scfg)
    corpus.save_dataset(d, out_dir)
    synth.save_ground_truth(truth, os.path.join(out_dir, "ground_truth.jsonl"))
    synth.write_reference_files(out_dir)
    print(f"generated {len(d.news)} news / {len(d.users)} users -> {out_dir}")
    return 0


def cmd_signals(cfg) -> int:
    d = _load_corpus(cfg)
    table = _compute_signals(cfg, d)
    payload = {
        "sentiment_by_engagement": table.sentiment_by_engagement,
        "bias_by_user": table.bias_by_user,
        "credibility_by_user": table.credibility_by_user,
    }
    atomic_write_text(_out_path(cfg, "signals"), json.dumps(payload))
    print(f"signals: {len(table.sentiment_by_engagement)} sentiment scores, "
          f"{len(table.bias_by_user)} users")
    return 0


def cmd_label_weak(cfg) -> int:
    d = _load_corpus(cfg)
    sig = _signals_for(cfg, d)
    sets = weaklabel.label_all(d, sig, _weak_config(cfg))
    weaklabel.save_weak_label_sets([sets[s] for s in weaklabel.SOURCES],
                                   _out_path(cfg, "weak_labels"))
    for source in weaklabel.SOURCES:
        labels = sets[source].labels.values()
        print(f"{source}: fake={sum(1 for x in labels if x == 'fake')} "
              f"real={sum(1 for x in labels if x == 'real')} "
              f"abstain={sum(1 for x in labels if x == 'abstain')}")
    return 0


def cmd_calibrate(cfg) -> int:
    d = _load_corpus(cfg)
    sig = _signals_for(cfg, d)
    frac = cfg.get_float("calibrate.validation_fraction", 0.2)
    labeled = [n.id for n in d.news if n.clean_label is not None]
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(labeled))
    n_val = max(1, int(round(frac * len(labeled))))
    val_ids = {labeled[i] for i in order[:n_val]}
    d_val = replace(d, news=tuple(n for n in d.news if n.id in val_ids),
                    engagements=tuple(e for e in d.engagements if e.news_id in val_ids))
    grid = {
        "tau1": cfg.get_floats("calibrate.tau1_grid") or [round(0.02 * i, 2) for i in range(26)],
        "tau2": cfg.get_floats("calibrate.tau2_grid") or [round(0.05 * i, 2) for i in range(21)],
        "tau3": cfg.get_floats("calibrate.tau3_grid") or [round(0.05 * i, 2) for i in range(21)],
    }
    calibrated = weaklabel.calibrate_thresholds(d_val, sig, grid, _weak_config(cfg))
    text = (f"weak.tau1={calibrated.tau1}\nweak.tau2={calibrated.tau2}\n"
            f"weak.tau3={calibrated.tau3}\nweak.min_support={calibrated.min_support}\n")
    atomic_write_text(_out_path(cfg, "calibrated"), text)
    print(text, end="")
    return 0


def _trifn_config(cfg) -> trifn.TriFNConfig:
    return trifn.TriFNConfig(
        latent_dim=cfg.get_int("trifn.latent_dim", 16),
        lambda_homophily=cfg.get_float("trifn.lambda_homophily", 1.0),
        lambda_engage=cfg.get_float("trifn.lambda_engage", 1.0),
        lambda_publisher=cfg.get_float("trifn.lambda_publisher", 1.0),
        lambda_classify=cfg.get_float("trifn.lambda_classify", 1.0),
        max_iters=cfg.get_int("trifn.max_iters", 300),
        step_init=cfg.get_float("trifn.step_init", 0.1),
        tol=cfg.get_float("trifn.tol", 1e-6),
        seed=cfg.seed,
    )


def cmd_train_trifn(cfg) -> int:
    d = _load_corpus(cfg)
    sig = _signals_for(cfg, d)
    mats = trifn.build_matrices(d, sig, cfg.get_int("trifn.vocab_size", 4096))
    labels = {n.id: n.clean_label for n in d.news if n.clean_label is not None}
    model = trifn.fit_trifn(mats, labels, _trifn_config(cfg))
    trifn.save_model(model, _out_path(cfg, "trifn_model"))
    preds = trifn.predict_trifn(model, {nid: mats.X[i] for i, nid in enumerate(mats.news_ids)})
    write_jsonl(_out_path(cfg, "trifn_predictions"),
                ({"news_id": nid, "p_fake": preds[nid]} for nid in mats.news_ids))
    print(f"trifn: {len(model.objective_history) - 1} accepted steps, "
          f"objective {model.objective_history[-1]:.6g}")
    return 0


def _mwss_hyper(cfg, sources) -> mwss.MWSSHyper:
    lambdas = None
    explicit = {s: cfg.get_float(f"mwss.lambda.{s}", -1.0) for s in sources}
    if any(v >= 0 for v in explicit.values()):
        lambdas = {s: max(v, 0.0) for s, v in explicit.items()}
    return mwss.MWSSHyper(
        d=cfg.get_int("mwss.d", 32),
        lambdas=lambdas,
        epochs=cfg.get_int("mwss.epochs", 40),
        lr=cfg.get_float("mwss.lr", 0.5),
        batch_size=cfg.get_int("mwss.batch_size", 32),
        seed=cfg.seed,
    )


def cmd_train_mwss(cfg) -> int:
    d = _load_corpus(cfg)
    texts = {n.id: n.text for n in d.news}
    clean = [(n.text, n.clean_label) for n in d.news if n.clean_label is not None]
    weak_sets = {}
    weak_path = cfg.get_str("paths.weak_labels") or _out_path(cfg, "weak_labels")
    if os.path.exists(weak_path):
        for source, ws in weaklabel.load_weak_label_sets(weak_path).items():
            examples = [(texts[nid], lab) for nid, lab in ws.labels.items()
                        if lab != weaklabel.ABSTAIN and nid in texts]
            weak_sets[source] = examples
    fm = mwss.FeatureMap(hash_dim=cfg.get_int("mwss.hash_dim", 1 << 16),
                         l2_normalize=cfg.get_bool("mwss.l2_normalize", True))
    model = mwss.train_mwss(clean, weak_sets, fm, _mwss_hyper(cfg, sorted(weak_sets)))
    mwss.save_model(model, _out_path(cfg, "mwss_model"))
    print(f"mwss: trained on {len(clean)} clean + "
          f"{sum(len(v) for v in weak_sets.values())} weak examples")
    return 0


def cmd_infer(cfg) -> int:
    d = _load_corpus(cfg)
    model = mwss.load_model(_out_path(cfg, "mwss_model"))
    rows = [{"news_id": n.id, "p_fake": mwss.infer(model, n.text, model.feature_map)}
            for n in d.news]
    write_jsonl(_out_path(cfg, "mwss_predictions"), rows)
    print(f"inferred {len(rows)} probabilities")
    return 0


def cmd_prop_features(cfg) -> int:
    d = _load_corpus(cfg)
    rows = []
    for n in d.news:
        feats = propnet.extract_features(propnet.build_cascades(d, n.id))
        row = {"news_id": n.id}
        row.update({name: getattr(feats, name) for name in propnet.FEATURE_NAMES})
        row["clean_label"] = n.clean_label
        rows.append(row)
    write_jsonl(_out_path(cfg, "prop_features"), rows)
    print(f"extracted features for {len(rows)} news items")
    return 0


def cmd_compare(cfg) -> int:
    groups = {"fake": [], "real": []}
    for _, row in read_jsonl(_out_path(cfg, "prop_features")):
        label = row.get("clean_label")
        if label in groups:
            groups[label].append(propnet.PropFeatures(
                **{name: row[name] for name in propnet.FEATURE_NAMES}))
    report = propnet.compare_groups(groups["fake"], groups["real"])
    atomic_write_text(_out_path(cfg, "comparison"), json.dumps(report, indent=2) + "\n")
    for name, entry in report.items():
        print(f"{name}: p={entry['p_value']:.4g} direction={entry['direction']}")
    return 0


def cmd_attribute(cfg) -> int:
    edges = provenance.load_edges(cfg.require_str("paths.graph"))
    recipients = cfg.get_json("provenance.recipients")
    if recipients is None:
        raise ParseError("config key 'provenance.recipients' is required")
    candidates = cfg.get_json("provenance.candidates")
    inst = provenance.instance_from_edges(
        edges, recipients,
        candidates if candidates is not None
        else {node for pair in edges for node in pair})
    alpha = cfg.get_float("provenance.alpha", 0.5)
    scores = provenance.score_transmitters(inst, alpha)
    ranked = sorted(scores, key=lambda node: (-scores[node], node))
    k = cfg.get_int("provenance.k", len(ranked))
    write_jsonl(_out_path(cfg, "attribution"),
                ({"node": node, "score": scores[node], "rank": i + 1}
                 for i, node in enumerate(ranked[:k])))
    print(f"ranked {min(k, len(ranked))} of {len(ranked)} candidates")
    return 0


def cmd_eval(cfg) -> int:
    truth = {}
    for _, row in read_jsonl(cfg.require_str("paths.labels")):
        truth[row["news_id"]] = row.get("label", row.get("clean_label"))
    y_true, y_pred, y_score = [], [], []
    for _, row in read_jsonl(cfg.require_str("paths.predictions")):
        nid = row["news_id"]
        if nid not in truth:
            continue
        p = float(row["p_fake"])
        y_true.append(truth[nid])
        y_score.append(p)
        y_pred.append("fake" if p >= 0.5 else "real")
    result = {
        "n": len(y_true),
        "accuracy": metrics.accuracy(y_true, y_pred),
        "f1": metrics.f1_score(y_true, y_pred, positive="fake"),
        "auc": metrics.auc_score([t == "fake" for t in y_true], y_score),
    }
    atomic_write_text(_out_path(cfg, "metrics"), json.dumps(result, indent=2) + "\n")
    print(json.dumps(result))
    return 0


HANDLERS = {
    "validate": cmd_validate,
    "synth": cmd_synth,
    "signals": cmd_signals,
    "label-weak": cmd_label_weak,
    "calibrate": cmd_calibrate,
    "train-trifn": cmd_train_trifn,
    "train-mwss": cmd_train_mwss,
    "infer": cmd_infer,
    "prop-features": cmd_prop_features,
    "compare": cmd_compare,
    "attribute": cmd_attribute,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wsskit",
                                     description="weak-social-supervision toolkit")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to key=value config file")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        lock_dir = (cfg.get_str("paths.corpus_dir", "corpus") if args.command == "synth"
                    else cfg.get_str("paths.out_dir", "out"))
        with _OutDirLock(lock_dir):
            return HANDLERS[args.command](cfg)
    except (WsskitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
