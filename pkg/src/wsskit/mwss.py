"""Multi-source weak supervision trainer.

One shared nonlinear layer feeds a clean-label head plus one linear head per
weak source; training jointly minimizes

    L = mean_logloss(clean; head_clean) + sum_k lambda_k * mean_logloss(weak_k; head_k)

with every head reading z = tanh(W_shared^T x). Inference goes through the
clean head only and takes nothing but text, so predictions need no
engagement data.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from wsskit.errors import ShapeError, TrainingError, ValidationError
from wsskit.ioutil import atomic_write_text
from wsskit.textproc import hashed_counts, tokenize

CLEAN = "clean"


@dataclass(frozen=True)
class FeatureMap:
    hash_dim: int = 1 << 16
    l2_normalize: bool = True

    def __post_init__(self):
        if self.hash_dim < 1 or self.hash_dim & (self.hash_dim - 1):
            raise ValidationError("hash_dim must be a power of two")


@dataclass(frozen=True)
class MWSSHyper:
    d: int = 32
    lambdas: dict | None = None  # source -> weight; default 1/#sources
    epochs: int = 150
    lr: float = 1.0
    batch_size: int = 256
    seed: int = 0


@dataclass
class MWSSModel:
    w_shared: np.ndarray  # hash_dim x d
    head_w: dict  # head name -> weight vector (d,)
    head_b: dict  # head name -> intercept
    lambdas: dict  # source -> weight actually used
    d: int
    seed: int
    feature_map: FeatureMap


def featurize(text: str, fm: FeatureMap) -> dict:
    """Sparse hashed unigram+bigram counts, optionally L2-normalized.

    Returns bucket -> value; empty text gives the zero vector (empty map).
    """
    counts = hashed_counts(tokenize(text), fm.hash_dim, bigrams=True)
    if not counts:
        return {}
    if fm.l2_normalize:
        norm = math.sqrt(sum(c * c for c in counts.values()))
        return {i: c / norm for i, c in sorted(counts.items())}
    return {i: float(c) for i, c in sorted(counts.items())}


def _label_to_y(label) -> float:
    if label in (1, 1.0, "fake"):
        return 1.0
    if label in (0, 0.0, "real"):
        return 0.0
    raise TrainingError(f"labels must be fake/real, got {label!r}")


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _logloss(z: float, y: float) -> float:
    # softplus(z) - y*z, stable in both tails
    if z > 35.0:
        softplus = z
    elif z < -35.0:
        softplus = 0.0
    else:
        softplus = math.log1p(math.exp(-abs(z))) + max(z, 0.0)
    return softplus - y * z


def _example_arrays(x: dict):
    if not x:
        return None
    rows = np.fromiter(x.keys(), dtype=np.int64, count=len(x))
    vals = np.fromiter(x.values(), dtype=np.float64, count=len(x))
    return rows, vals


def _core_loss_grads(w_shared, head_w, head_b, batch):
    """Loss/gradients over (arrays, y, head, weight) tuples."""
    d = w_shared.shape[1]
    loss = 0.0
    dw_rows = {}
    dhw = {name: np.zeros(d) for name in head_w}
    dhb = {name: 0.0 for name in head_w}
    zero_z = np.zeros(d)
    for arrays, y, head, weight in batch:
        if arrays is None:
            z = zero_z
        else:
            rows, vals = arrays
            z = np.tanh(vals @ w_shared[rows])
        logit = float(head_w[head] @ z + head_b[head])
        loss += weight * _logloss(logit, y)
        g_logit = weight * (_sigmoid(logit) - y)
        dhw[head] += g_logit * z
        dhb[head] += g_logit
        if arrays is not None:
            g_pre = (g_logit * head_w[head]) * (1.0 - z * z)
            contrib = vals[:, None] * g_pre[None, :]
            for pos, row in enumerate(rows.tolist()):
                acc = dw_rows.get(row)
                if acc is None:
                    dw_rows[row] = contrib[pos].copy()
                else:
                    acc += contrib[pos]
    return loss, dw_rows, dhw, dhb


def batch_loss_and_grads(w_shared, head_w, head_b, batch):
    """Weighted logloss and gradients for one batch.

    ``batch`` holds (x_sparse, y, head, weight) tuples. Returns
    (loss, dW_rows, d_head_w, d_head_b) where dW_rows maps touched feature
    rows to gradient vectors; head gradients cover every head in the model
    (zero arrays for untouched heads).
    """
    prepared = [(_example_arrays(x), y, head, weight) for x, y, head, weight in batch]
    return _core_loss_grads(w_shared, head_w, head_b, prepared)


def _build_pool(clean, weak_sets, lambdas, fm):
    """Featurize examples and attach per-example loss weights.

    Weights fold in the 1/n means and the lambda_k factors, so summing batch
    gradients over an epoch reproduces the full-objective gradient. Sources
    with zero weight or no examples are dropped entirely.
    """
    pool = []
    for text, label in clean:
        pool.append((_example_arrays(featurize(text, fm)), _label_to_y(label),
                     CLEAN, 1.0 / len(clean)))
    active = {}
    for source in sorted(weak_sets):
        examples = weak_sets[source]
        lam = lambdas.get(source, 0.0)
        if not examples or lam == 0.0:
            continue
        active[source] = lam
        w = lam / len(examples)
        for text, label in examples:
            pool.append((_example_arrays(featurize(text, fm)), _label_to_y(label), source, w))
    return pool, active


def train_mwss(clean, weak_sets, fm: FeatureMap, hyper: MWSSHyper) -> MWSSModel:
    """Mini-batch gradient descent over the joint clean + weak objective.

    Initialization and the per-epoch shuffle derive from ``hyper.seed``;
    identical inputs give a bitwise-identical model. Sources weighted zero
    are dropped before any random draw, so training with all lambdas at zero
    matches clean-only training exactly.
    """
    ys = {_label_to_y(label) for _, label in clean}
    if not clean or ys != {0.0, 1.0}:
        raise TrainingError("clean examples must include both classes")

    sources = sorted(weak_sets)
    if hyper.lambdas is not None:
        lambdas = {s: float(hyper.lambdas.get(s, 0.0)) for s in sources}
    else:
        lambdas = {s: 1.0 / len(sources) for s in sources}
    if any(lam < 0 for lam in lambdas.values()):
        raise TrainingError("lambdas must be >= 0")

    pool, active = _build_pool(clean, weak_sets, lambdas, fm)

    rng = np.random.default_rng(hyper.seed)
    w_shared = rng.normal(0.0, 0.1, size=(fm.hash_dim, hyper.d))
    head_names = [CLEAN] + sorted(active)
    hw = np.empty((len(head_names), hyper.d))
    hb = np.zeros(len(head_names))
    hw[0] = rng.normal(0.0, 0.1, size=hyper.d)
    for hi in range(1, len(head_names)):
        hw[hi] = rng.normal(0.0, 0.1, size=hyper.d)

    # CSR matrix over the pool for vectorized batch steps
    n = len(pool)
    indptr = np.zeros(n + 1, dtype=np.int64)
    col_chunks, val_chunks = [], []
    ys = np.empty(n)
    head_idx = np.empty(n, dtype=np.int64)
    weights = np.empty(n)
    head_pos = {name: i for i, name in enumerate(head_names)}
    for i, (arrays, y, head, weight) in enumerate(pool):
        if arrays is not None:
            col_chunks.append(arrays[0])
            val_chunks.append(arrays[1])
            indptr[i + 1] = indptr[i] + len(arrays[0])
        else:
            indptr[i + 1] = indptr[i]
        ys[i] = y
        head_idx[i] = head_pos[head]
        weights[i] = weight
    xs = sp.csr_matrix(
        (np.concatenate(val_chunks) if val_chunks else np.empty(0),
         np.concatenate(col_chunks) if col_chunks else np.empty(0, dtype=np.int64),
         indptr),
        shape=(n, fm.hash_dim))

    for _ in range(hyper.epochs):
        order = rng.permutation(n)
        for start in range(0, n, hyper.batch_size):
            idx = order[start:start + hyper.batch_size]
            xb = xs[idx]
            z = np.tanh(xb @ w_shared)
            bh = head_idx[idx]
            logits = np.einsum("bd,bd->b", z, hw[bh]) + hb[bh]
            g = weights[idx] * (expit(logits) - ys[idx])
            g_pre = (g[:, None] * hw[bh]) * (1.0 - z * z)
            w_shared -= hyper.lr * (xb.T @ g_pre)
            for hi in range(len(head_names)):
                mask = bh == hi
                if mask.any():
                    hw[hi] -= hyper.lr * (g[mask, None] * z[mask]).sum(axis=0)
                    hb[hi] -= hyper.lr * g[mask].sum()

    head_w = {name: hw[i] for i, name in enumerate(head_names)}
    head_b = {name: float(hb[i]) for i, name in enumerate(head_names)}
    return MWSSModel(w_shared=w_shared, head_w=head_w, head_b=head_b,
                     lambdas=active, d=hyper.d, seed=hyper.seed, feature_map=fm)


def total_loss(m: MWSSModel, clean, weak_sets) -> float:
    """The full training objective at the model's parameters."""
    pool, _ = _build_pool(clean, weak_sets, m.lambdas, m.feature_map)
    loss, _, _, _ = _core_loss_grads(m.w_shared, m.head_w, m.head_b, pool)
    return loss


def infer(m: MWSSModel, text: str, fm: FeatureMap) -> float:
    """Probability the text is fake, from content alone via the clean head."""
    x = featurize(text, fm)
    d = m.w_shared.shape[1]
    if not x:
        z = np.zeros(d)
    else:
        rows = np.fromiter(x.keys(), dtype=np.int64, count=len(x))
        if rows.max() >= m.w_shared.shape[0]:
            raise ShapeError("feature map dimension exceeds the model's")
        vals = np.fromiter(x.values(), dtype=np.float64, count=len(x))
        z = np.tanh(vals @ m.w_shared[rows])
    return _sigmoid(float(m.head_w[CLEAN] @ z + m.head_b[CLEAN]))


def save_model(m: MWSSModel, path) -> None:
    """Persist as JSON: config echo plus dense row-major parameter arrays."""
    payload = {
        "d": m.d,
        "seed": m.seed,
        "hash_dim": m.feature_map.hash_dim,
        "l2_normalize": m.feature_map.l2_normalize,
        "lambdas": m.lambdas,
        "w_shared": m.w_shared.ravel().tolist(),
        "heads": {name: {"w": m.head_w[name].tolist(), "b": m.head_b[name]}
                  for name in sorted(m.head_w)},
    }
    atomic_write_text(path, json.dumps(payload))


def load_model(path) -> MWSSModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    fm = FeatureMap(hash_dim=payload["hash_dim"], l2_normalize=payload["l2_normalize"])
    d = payload["d"]
    w_shared = np.asarray(payload["w_shared"]).reshape(fm.hash_dim, d)
    head_w = {name: np.asarray(h["w"]) for name, h in payload["heads"].items()}
    head_b = {name: float(h["b"]) for name, h in payload["heads"].items()}
    return MWSSModel(w_shared=w_shared, head_w=head_w, head_b=head_b,
                     lambdas={k: float(v) for k, v in payload["lambdas"].items()},
                     d=d, seed=payload["seed"], feature_map=fm)
