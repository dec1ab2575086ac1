"""Tri-relationship embedding of publishers, news, and users.

News content, user engagements, user friendships, and publisher partisanship
are factorized into one nonnegative latent space; a logistic read-out on the
news factors detects disinformation. The training objective is

    J = ||X - D V^T||_F^2
      + lambda_engage    * ||W o (A - U D^T)||_F^2
      + lambda_homophily * sum_{(i,j) friends} ||U_i - U_j||^2
      + lambda_publisher * ||mask o (Bbar D q - o)||^2
      + lambda_classify  * sum_labeled logloss(sigmoid(D_i . p + b), y_i)

where W carries a user's credibility on their engaged cells and 0 elsewhere,
so credible users' engagements are fitted more strictly. Optimization is
joint projected gradient descent: one step over all parameters, nonnegativity
clamp on D, U, V, and step halving until the objective does not increase.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls
from scipy.special import expit

from wsskit.corpus import Dataset
from wsskit.errors import ShapeError, TrainingError, ValidationError
from wsskit.ioutil import atomic_write_text
from wsskit.signals import SignalTable
from wsskit.textproc import hashed_counts, tokenize

_MIN_STEP = 1e-20


@dataclass(frozen=True)
class TriFNConfig:
    latent_dim: int = 16
    lambda_homophily: float = 1.0
    lambda_engage: float = 1.0
    lambda_publisher: float = 1.0
    lambda_classify: float = 1.0
    max_iters: int = 300
    step_init: float = 0.1
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ValidationError("latent_dim must be >= 1")
        if min(self.lambda_homophily, self.lambda_engage,
               self.lambda_publisher, self.lambda_classify) < 0:
            raise ValidationError("lambda weights must be >= 0")
        if self.step_init <= 0 or self.tol <= 0:
            raise ValidationError("step_init and tol must be > 0")


@dataclass(frozen=True)
class TriFNMatrices:
    X: np.ndarray      # news x vocab, hashed-unigram TF-IDF
    A: np.ndarray      # users x news, binary engagement
    S: np.ndarray      # users x users, binary friendship
    Bbar: np.ndarray   # publishers x news, row-normalized publication
    o: np.ndarray      # publisher partisanship (0 where unknown)
    o_mask: np.ndarray  # 1 where partisanship known
    c: np.ndarray      # user credibility
    idf: np.ndarray    # per-bucket IDF used to build X
    news_ids: tuple
    user_ids: tuple
    publisher_ids: tuple
    vocab_size: int


@dataclass
class TriFNModel:
    D: np.ndarray  # news x d
    U: np.ndarray  # users x d
    V: np.ndarray  # vocab x d
    q: np.ndarray  # d
    p: np.ndarray  # d
    b: float
    news_ids: tuple
    config: TriFNConfig
    objective_history: list


def tfidf_rows(texts, vocab_size: int):
    """Hashed-unigram TF-IDF: count * (ln((1+N)/(1+df)) + 1), unnormalized.

    Returns (X, idf); apply the same idf to out-of-corpus texts via
    ``transform_texts``.
    """
    n = len(texts)
    counts = [hashed_counts(tokenize(t), vocab_size, bigrams=False) for t in texts]
    df = np.zeros(vocab_size)
    for row in counts:
        for bucket in row:
            df[bucket] += 1.0
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    X = np.zeros((n, vocab_size))
    for j, row in enumerate(counts):
        for bucket, count in row.items():
            X[j, bucket] = count * idf[bucket]
    return X, idf


def transform_texts(mats: TriFNMatrices, texts) -> list:
    """TF-IDF rows for new texts using the training corpus's idf."""
    rows = []
    for text in texts:
        x = np.zeros(mats.vocab_size)
        for bucket, count in hashed_counts(tokenize(text), mats.vocab_size,
                                           bigrams=False).items():
            x[bucket] = count * mats.idf[bucket]
        rows.append(x)
    return rows


def build_matrices(d: Dataset, sig: SignalTable, vocab_size: int) -> TriFNMatrices:
    """Assemble the relation matrices the factorization consumes."""
    news_ids = tuple(n.id for n in d.news)
    user_ids = tuple(u.id for u in d.users)
    publisher_ids = tuple(p.id for p in d.publishers)
    news_pos = {nid: i for i, nid in enumerate(news_ids)}
    user_pos = {uid: i for i, uid in enumerate(user_ids)}
    pub_pos = {pid: i for i, pid in enumerate(publisher_ids)}

    X, idf = tfidf_rows([n.text for n in d.news], vocab_size)

    A = np.zeros((len(user_ids), len(news_ids)))
    for e in d.engagements:
        A[user_pos[e.user_id], news_pos[e.news_id]] = 1.0

    S = np.zeros((len(user_ids), len(user_ids)))
    for a, b in d.friendships:
        i, j = user_pos[a], user_pos[b]
        S[i, j] = S[j, i] = 1.0

    Bbar = np.zeros((len(publisher_ids), len(news_ids)))
    for n in d.news:
        Bbar[pub_pos[n.publisher_id], news_pos[n.id]] = 1.0
    row_sums = Bbar.sum(axis=1, keepdims=True)
    np.divide(Bbar, row_sums, out=Bbar, where=row_sums > 0)

    o = np.zeros(len(publisher_ids))
    o_mask = np.zeros(len(publisher_ids))
    for p in d.publishers:
        if p.partisanship is not None:
            o[pub_pos[p.id]] = p.partisanship
            o_mask[pub_pos[p.id]] = 1.0

    c = np.array([sig.credibility_by_user.get(uid, 1.0) for uid in user_ids])
    return TriFNMatrices(X=X, A=A, S=S, Bbar=Bbar, o=o, o_mask=o_mask, c=c, idf=idf,
                         news_ids=news_ids, user_ids=user_ids,
                         publisher_ids=publisher_ids, vocab_size=vocab_size)


def _check_shapes(D, U, V, q, p, mats: TriFNMatrices):
    n_news, vocab = mats.X.shape
    n_users = mats.A.shape[0]
    dm = D.shape[1] if D.ndim == 2 else -1
    if D.shape != (n_news, dm) or U.shape != (n_users, dm) or V.shape != (vocab, dm):
        raise ShapeError("factor shapes do not match the matrices")
    if q.shape != (dm,) or p.shape != (dm,):
        raise ShapeError("q and p must be latent-dim vectors")
    if mats.A.shape[1] != n_news or mats.Bbar.shape[1] != n_news:
        raise ShapeError("matrix news dimensions disagree")
    if mats.S.shape != (n_users, n_users) or mats.c.shape != (n_users,):
        raise ShapeError("matrix user dimensions disagree")


def _label_arrays(mats: TriFNMatrices, clean_labels: dict):
    idx = [i for i, nid in enumerate(mats.news_ids) if nid in clean_labels]
    y = np.array([1.0 if clean_labels[mats.news_ids[i]] == "fake" else 0.0 for i in idx])
    return np.asarray(idx, dtype=np.intp), y


def _objective_arrays(D, U, V, q, p, b, mats, W2, edges, lab_idx, y, cfg) -> float:
    r_content = mats.X - D @ V.T
    value = float((r_content * r_content).sum())
    if cfg.lambda_engage > 0:
        r_eng = mats.A - U @ D.T
        value += cfg.lambda_engage * float((W2 * r_eng * r_eng).sum())
    if cfg.lambda_homophily > 0 and edges[0].size:
        diff = U[edges[0]] - U[edges[1]]
        value += cfg.lambda_homophily * float((diff * diff).sum())
    if cfg.lambda_publisher > 0:
        r_pub = mats.o_mask * (mats.Bbar @ D @ q - mats.o)
        value += cfg.lambda_publisher * float(r_pub @ r_pub)
    if cfg.lambda_classify > 0 and lab_idx.size:
        z = D[lab_idx] @ p + b
        value += cfg.lambda_classify * float(np.sum(np.logaddexp(0.0, z) - y * z))
    return value


def _gradients(D, U, V, q, p, b, mats, W2, edges, lab_idx, y, cfg):
    r_content = D @ V.T - mats.X
    dD = 2.0 * r_content @ V
    dV = 2.0 * r_content.T @ D
    dU = np.zeros_like(U)
    if cfg.lambda_engage > 0:
        e_eng = W2 * (mats.A - U @ D.T)
        dU -= 2.0 * cfg.lambda_engage * (e_eng @ D)
        dD -= 2.0 * cfg.lambda_engage * (e_eng.T @ U)
    if cfg.lambda_homophily > 0 and edges[0].size:
        diff = U[edges[0]] - U[edges[1]]
        g = 2.0 * cfg.lambda_homophily * diff
        np.add.at(dU, edges[0], g)
        np.subtract.at(dU, edges[1], g)
    dq = np.zeros_like(q)
    if cfg.lambda_publisher > 0:
        bd = mats.Bbar @ D
        r_pub = mats.o_mask * (bd @ q - mats.o)
        dD += 2.0 * cfg.lambda_publisher * np.outer(mats.Bbar.T @ r_pub, q)
        dq = 2.0 * cfg.lambda_publisher * (bd.T @ r_pub)
    dp = np.zeros_like(p)
    db = 0.0
    if cfg.lambda_classify > 0 and lab_idx.size:
        z = D[lab_idx] @ p + b
        g = expit(z) - y
        dD[lab_idx] += cfg.lambda_classify * g[:, None] * p[None, :]
        dp = cfg.lambda_classify * (D[lab_idx].T @ g)
        db = cfg.lambda_classify * float(g.sum())
    return dD, dU, dV, dq, dp, db


def _fit_internals(mats: TriFNMatrices, clean_labels: dict, cfg: TriFNConfig):
    W2 = (mats.c ** 2)[:, None] * mats.A
    edges = np.nonzero(np.triu(mats.S, 1))
    lab_idx, y = _label_arrays(mats, clean_labels)
    return W2, edges, lab_idx, y


def fit_trifn(mats: TriFNMatrices, clean_labels: dict, cfg: TriFNConfig,
              init=None, iterate_hook=None) -> TriFNModel:
    """Train by monotone projected gradient descent.

    ``init`` overrides the seeded Uniform(0,1) initialization with explicit
    (D, U, V, q, p, b) arrays. ``iterate_hook(iteration, factors)`` fires
    after every accepted step. The returned model records the objective
    value at the initial point and after each accepted step in
    ``objective_history``.
    """
    W2, edges, lab_idx, y = _fit_internals(mats, clean_labels, cfg)
    if not (lab_idx.size and 0.0 in y and 1.0 in y):
        raise TrainingError("training needs at least one fake and one real label")

    n_news, vocab = mats.X.shape
    n_users = mats.A.shape[0]
    dm = cfg.latent_dim
    if init is not None:
        D, U, V, q, p, b = (np.array(part, dtype=float) for part in init)
        b = float(b)
    else:
        rng = np.random.default_rng(cfg.seed)
        D = rng.uniform(0.0, 1.0, (n_news, dm))
        U = rng.uniform(0.0, 1.0, (n_users, dm))
        V = rng.uniform(0.0, 1.0, (vocab, dm))
        q = rng.uniform(0.0, 1.0, dm)
        p = rng.uniform(0.0, 1.0, dm)
        b = float(rng.uniform(0.0, 1.0))
    _check_shapes(D, U, V, q, p, mats)

    value = _objective_arrays(D, U, V, q, p, b, mats, W2, edges, lab_idx, y, cfg)
    history = [value]
    step = cfg.step_init
    for iteration in range(cfg.max_iters):
        dD, dU, dV, dq, dp, db = _gradients(D, U, V, q, p, b, mats, W2, edges,
                                            lab_idx, y, cfg)
        accepted = False
        while step >= _MIN_STEP:
            cand = (
                np.maximum(D - step * dD, 0.0),
                np.maximum(U - step * dU, 0.0),
                np.maximum(V - step * dV, 0.0),
                q - step * dq,
                p - step * dp,
                b - step * db,
            )
            cand_value = _objective_arrays(*cand[:5], cand[5], mats, W2, edges,
                                           lab_idx, y, cfg)
            if cand_value <= value:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        D, U, V, q, p, b = cand
        delta = value - cand_value
        value = cand_value
        history.append(value)
        if iterate_hook is not None:
            iterate_hook(iteration, {"D": D, "U": U, "V": V, "q": q, "p": p, "b": b})
        step *= 2.0
        if delta < cfg.tol:
            break

    return TriFNModel(D=D, U=U, V=V, q=q, p=p, b=float(b),
                      news_ids=mats.news_ids, config=cfg,
                      objective_history=history)


def objective(m: TriFNModel, mats: TriFNMatrices, clean_labels: dict,
              cfg: TriFNConfig) -> float:
    """The training objective at the model's parameters (always >= 0)."""
    _check_shapes(m.D, m.U, m.V, m.q, m.p, mats)
    W2, edges, lab_idx, y = _fit_internals(mats, clean_labels, cfg)
    return _objective_arrays(m.D, m.U, m.V, m.q, m.p, m.b, mats, W2, edges,
                             lab_idx, y, cfg)


def fold_in_news(m: TriFNModel, x_row) -> np.ndarray:
    """Nonnegative least-squares latent row for an unseen news item."""
    x = np.asarray(x_row, dtype=float)
    if x.shape != (m.V.shape[0],):
        raise ShapeError(f"expected a vocab-size ({m.V.shape[0]}) row, got {x.shape}")
    row, _ = nnls(m.V, x)
    return row


def predict_trifn(m: TriFNModel, x_rows: dict) -> dict:
    """Probability of fake per news id.

    News seen in training reuse their trained latent rows; unseen news are
    folded in by nonnegative least squares against V, so inference needs
    content only.
    """
    news_index = {nid: i for i, nid in enumerate(m.news_ids)}
    out = {}
    for nid, x_row in x_rows.items():
        if nid in news_index:
            row = m.D[news_index[nid]]
        else:
            row = fold_in_news(m, x_row)
        out[nid] = float(expit(row @ m.p + m.b))
    return out


def save_model(m: TriFNModel, path) -> None:
    """Persist as JSON: config echo plus row-major factor arrays."""
    cfg = m.config
    payload = {
        "config": {
            "latent_dim": cfg.latent_dim,
            "lambda_homophily": cfg.lambda_homophily,
            "lambda_engage": cfg.lambda_engage,
            "lambda_publisher": cfg.lambda_publisher,
            "lambda_classify": cfg.lambda_classify,
            "max_iters": cfg.max_iters,
            "step_init": cfg.step_init,
            "tol": cfg.tol,
            "seed": cfg.seed,
        },
        "news_ids": list(m.news_ids),
        "shapes": {"D": list(m.D.shape), "U": list(m.U.shape), "V": list(m.V.shape)},
        "D": m.D.ravel().tolist(),
        "U": m.U.ravel().tolist(),
        "V": m.V.ravel().tolist(),
        "q": m.q.tolist(),
        "p": m.p.tolist(),
        "b": m.b,
        "objective_history": m.objective_history,
    }
    atomic_write_text(path, json.dumps(payload))


def load_model(path) -> TriFNModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    cfg = TriFNConfig(**payload["config"])
    shapes = payload["shapes"]
    return TriFNModel(
        D=np.asarray(payload["D"]).reshape(shapes["D"]),
        U=np.asarray(payload["U"]).reshape(shapes["U"]),
        V=np.asarray(payload["V"]).reshape(shapes["V"]),
        q=np.asarray(payload["q"]),
        p=np.asarray(payload["p"]),
        b=float(payload["b"]),
        news_ids=tuple(payload["news_ids"]),
        config=cfg,
        objective_history=list(payload["objective_history"]),
    )
