"""Evaluation protocols: unsupervised pair similarity, learned similarity with
MSE, and sentence classification with logistic regression or an MLP.

Training is deterministic: zero or seeded initialization, full-batch Adam,
and a gradient-norm stopping rule.  Non-convergence within the epoch budget
flags the result instead of failing the sweep.  Normalization statistics for
supervised protocols are always fitted on training data; the application
path asserts the fitted_on tag so test data provably never leaks in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .compose import Encoder
from .corpus import (
    FixedSplit,
    LabeledDataset,
    Pair,
    PairDataset,
    cv_folds,
)
from .errors import DegenerateSeriesError, EvaluationError, ZeroVectorError
from .metrics import cosine, mse, pearson, spearman
from .normalize import NormStats, apply_znorm, fit_znorm, normalize_ucp

DEFAULT_L2_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
DEFAULT_HIDDEN_SIZES = (50, 100, 200)

STS_SCALE = 5.0  # gold scores live in [0, 5]; regression targets in [0, 1]


# ---------------------------------------------------------------------------
# unsupervised protocol


@dataclass
class UcpResult:
    """Cosine+correlation scores for one encoder on one pair split."""

    pearson: float
    spearman: float
    n_pairs: int
    skipped_pairs: int
    normalized: bool


def eval_ucp(
    pairs: Sequence[Pair],
    encoder: Encoder,
    normalized: bool,
    ids: Optional[tuple[Sequence[int], Sequence[int]]] = None,
) -> UcpResult:
    """Embed both sides, optionally z-normalize the stacked matrix, then
    correlate per-pair cosines with the gold scores.

    Pairs where either side embeds to the zero vector are skipped and
    counted; if every pair is skipped the evaluation fails.
    """
    if not pairs:
        raise ValueError("empty pair split")
    n = len(pairs)
    ids_a, ids_b = ids if ids is not None else (None, None)
    A, _ = encoder.encode_batch([p.a for p in pairs], ids=ids_a)
    B, _ = encoder.encode_batch([p.b for p in pairs], ids=ids_b)
    if normalized:
        stacked, _, _ = normalize_ucp(np.vstack([A, B]))
        A, B = stacked[:n], stacked[n:]
    gold = np.array([p.gold for p in pairs])
    sims = []
    kept = []
    for i in range(n):
        try:
            sims.append(cosine(A[i], B[i]))
        except ZeroVectorError:
            continue
        kept.append(i)
    if not kept:
        raise EvaluationError("every pair was skipped (zero embeddings on one side)")
    sims_arr = np.array(sims)
    gold_kept = gold[kept]
    return UcpResult(
        pearson=pearson(sims_arr, gold_kept),
        spearman=spearman(sims_arr, gold_kept),
        n_pairs=n,
        skipped_pairs=n - len(kept),
        normalized=normalized,
    )


# ---------------------------------------------------------------------------
# learned similarity


def build_pair_features(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Symmetric pair features [u*v ; |u-v|]; rows for matrices, flat for vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError("pair sides must have equal shape")
    if u.ndim == 1:
        return np.concatenate([u * v, np.abs(u - v)])
    return np.hstack([u * v, np.abs(u - v)])


def _require_train_stats(stats: Optional[NormStats]) -> None:
    if stats is not None and stats.fitted_on != "train":
        raise EvaluationError(
            f"supervised evaluation got normalization stats fitted on "
            f"{stats.fitted_on!r}; only train-fitted stats are allowed"
        )


def _ridge_solve(F: np.ndarray, y: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
    """Minimize mean squared error + lam * |w|^2 with an unpenalized intercept."""
    n, p = F.shape
    col_mean = F.mean(axis=0)
    A = np.empty((p + 1, p + 1))
    A[:p, :p] = F.T @ F / n + lam * np.eye(p)
    A[:p, p] = col_mean
    A[p, :p] = col_mean
    A[p, p] = 1.0
    rhs = np.concatenate([F.T @ y / n, [y.mean()]])
    theta = np.linalg.solve(A, rhs)
    return theta[:p], float(theta[p])


@dataclass
class SimilarityModel:
    """Ridge regression from pair features to gold similarity scaled to [0, 1]."""

    encoder: Encoder
    normalized: bool
    stats: Optional[NormStats]
    weights: np.ndarray
    intercept: float
    l2: float
    dev_pearson: Optional[float]

    def _features(self, pairs, ids=None):
        ids_a, ids_b = ids if ids is not None else (None, None)
        A, _ = self.encoder.encode_batch([p.a for p in pairs], ids=ids_a)
        B, _ = self.encoder.encode_batch([p.b for p in pairs], ids=ids_b)
        if self.normalized:
            _require_train_stats(self.stats)
            A, _ = apply_znorm(self.stats, A)
            B, _ = apply_znorm(self.stats, B)
        return build_pair_features(A, B)

    def predict(self, pairs, ids=None) -> np.ndarray:
        """Predicted similarities in [0, 1] (clipped)."""
        F = self._features(pairs, ids=ids)
        return np.clip(F @ self.weights + self.intercept, 0.0, 1.0)


def train_similarity_regressor(
    train_pairs: Sequence[Pair],
    dev_pairs: Sequence[Pair],
    encoder: Encoder,
    normalized: bool,
    l2_grid: Sequence[float] = DEFAULT_L2_GRID,
    ids_train=None,
    ids_dev=None,
) -> SimilarityModel:
    """Fit ridge models over the grid and keep the one with the best dev Pearson.

    Normalization statistics come from the stacked training embeddings only
    and are reused for dev and test.  A singular system falls through to the
    next grid point; all-singular is an error.
    """
    if not train_pairs:
        raise ValueError("empty training split")
    if not l2_grid:
        raise ValueError("empty regularization grid")
    n = len(train_pairs)
    ids_a, ids_b = ids_train if ids_train is not None else (None, None)
    A, _ = encoder.encode_batch([p.a for p in train_pairs], ids=ids_a)
    B, _ = encoder.encode_batch([p.b for p in train_pairs], ids=ids_b)
    stats = None
    if normalized:
        stats = fit_znorm(np.vstack([A, B]), fitted_on="train")
        A, _ = apply_znorm(stats, A)
        B, _ = apply_znorm(stats, B)
    F = build_pair_features(A, B)
    y = np.array([p.gold for p in train_pairs]) / STS_SCALE

    dev_gold = np.array([p.gold for p in dev_pairs]) / STS_SCALE
    best: Optional[SimilarityModel] = None
    best_score = -np.inf
    for lam in l2_grid:
        try:
            w, b = _ridge_solve(F, y, float(lam))
        except np.linalg.LinAlgError:
            continue
        candidate = SimilarityModel(
            encoder=encoder,
            normalized=normalized,
            stats=stats,
            weights=w,
            intercept=b,
            l2=float(lam),
            dev_pearson=None,
        )
        try:
            score = pearson(candidate.predict(dev_pairs, ids=ids_dev), dev_gold)
        except DegenerateSeriesError:
            score = -np.inf
        if score > best_score:
            candidate.dev_pearson = None if score == -np.inf else score
            best, best_score = candidate, score
    if best is None:
        raise EvaluationError("ridge system singular for every grid point")
    return best


@dataclass
class SimilarityScores:
    """Test metrics of a learned similarity model; correlations may be
    undefined (degenerate constant predictions) while MSE is always reported."""

    pearson: Optional[float]
    spearman: Optional[float]
    mse: float
    degenerate: bool


def eval_learned_similarity(
    model: SimilarityModel, test_pairs: Sequence[Pair], ids=None
) -> SimilarityScores:
    """Clip predictions to [0, 1], rescale to [0, 5], and report all metrics."""
    preds = model.predict(test_pairs, ids=ids) * STS_SCALE
    gold = np.array([p.gold for p in test_pairs])
    mse_value = mse(preds, gold)
    try:
        return SimilarityScores(
            pearson=pearson(preds, gold),
            spearman=spearman(preds, gold),
            mse=mse_value,
            degenerate=False,
        )
    except DegenerateSeriesError:
        return SimilarityScores(pearson=None, spearman=None, mse=mse_value, degenerate=True)


# ---------------------------------------------------------------------------
# classifiers


@dataclass(frozen=True)
class ClassifierSpec:
    """Training configuration for the classification protocol."""

    kind: str = "logreg"  # "logreg" | "mlp"
    l2_grid: tuple[float, ...] = DEFAULT_L2_GRID
    hidden_sizes: tuple[int, ...] = DEFAULT_HIDDEN_SIZES
    seed: int = 0
    max_epochs: int = 2000
    tolerance: float = 1e-5
    learning_rate: float = 0.1
    inner_folds: int = 10

    def __post_init__(self):
        if self.kind not in ("logreg", "mlp"):
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if not self.l2_grid or (self.kind == "mlp" and not self.hidden_sizes):
            raise ValueError("hyperparameter grids must be non-empty")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


def softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    expZ = np.exp(Z)
    return expZ / expZ.sum(axis=1, keepdims=True)


def _cross_entropy(P: np.ndarray, Y: np.ndarray) -> float:
    # P comes from a stabilized softmax; clip only against exact zeros
    return float(-np.sum(Y * np.log(np.maximum(P, 1e-300))) / P.shape[0])


def logreg_loss_grad(
    params: np.ndarray, X: np.ndarray, Y: np.ndarray, lam: float
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy of multinomial logistic regression plus 0.5*lam*|W|^2.

    params packs W (d x K) then b (K).  The bias is unpenalized.
    """
    n, d = X.shape
    K = Y.shape[1]
    W = params[: d * K].reshape(d, K)
    b = params[d * K :]
    P = softmax(X @ W + b)
    loss = _cross_entropy(P, Y) + 0.5 * lam * float(np.sum(W * W))
    R = (P - Y) / n
    gW = X.T @ R + lam * W
    gb = R.sum(axis=0)
    return loss, np.concatenate([gW.ravel(), gb])


def mlp_loss_grad(
    params: np.ndarray, dims: tuple[int, int, int], X: np.ndarray, Y: np.ndarray, lam: float
) -> tuple[float, np.ndarray]:
    """Cross-entropy of a one-hidden-layer rectifier network plus
    0.5*lam*(|W1|^2 + |W2|^2); biases unpenalized.

    params packs W1 (d x h), b1 (h), W2 (h x K), b2 (K).
    """
    d, h, K = dims
    n = X.shape[0]
    i = 0
    W1 = params[i : i + d * h].reshape(d, h)
    i += d * h
    b1 = params[i : i + h]
    i += h
    W2 = params[i : i + h * K].reshape(h, K)
    i += h * K
    b2 = params[i : i + K]
    pre = X @ W1 + b1
    H = np.maximum(pre, 0.0)
    P = softmax(H @ W2 + b2)
    loss = _cross_entropy(P, Y) + 0.5 * lam * (float(np.sum(W1 * W1)) + float(np.sum(W2 * W2)))
    dZ = (P - Y) / n
    gW2 = H.T @ dZ + lam * W2
    gb2 = dZ.sum(axis=0)
    dH = dZ @ W2.T
    dH[pre <= 0.0] = 0.0
    gW1 = X.T @ dH + lam * W1
    gb1 = dH.sum(axis=0)
    return loss, np.concatenate([gW1.ravel(), gb1, gW2.ravel(), gb2])


def adam_minimize(
    loss_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    lr: float,
    max_epochs: int,
    tol: float,
) -> tuple[np.ndarray, bool, int]:
    """Full-batch Adam until the gradient 2-norm drops to tol or epochs run out.

    Deterministic given x0: no minibatching, no randomness.
    """
    x = x0.astype(np.float64).copy()
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    for t in range(1, max_epochs + 1):
        _, g = loss_grad(x)
        if float(np.linalg.norm(g)) <= tol:
            return x, True, t - 1
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        mhat = m / (1.0 - beta1**t)
        vhat = v / (1.0 - beta2**t)
        x -= lr * mhat / (np.sqrt(vhat) + eps)
    _, g = loss_grad(x)
    return x, float(np.linalg.norm(g)) <= tol, max_epochs


@dataclass
class SoftmaxClassifier:
    """Trained classifier over the label values seen at fit time."""

    kind: str
    params: np.ndarray
    dims: tuple[int, ...]
    classes: np.ndarray
    l2: float
    hidden: Optional[int]
    converged: bool
    n_iter: int

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.kind == "logreg":
            d, K = self.dims
            W = self.params[: d * K].reshape(d, K)
            b = self.params[d * K :]
            return X @ W + b
        d, h, K = self.dims
        i = 0
        W1 = self.params[i : i + d * h].reshape(d, h)
        i += d * h
        b1 = self.params[i : i + h]
        i += h
        W2 = self.params[i : i + h * K].reshape(h, K)
        i += h * K
        b2 = self.params[i : i + K]
        return np.maximum(X @ W1 + b1, 0.0) @ W2 + b2

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.decision_values(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.classes[np.argmax(self.decision_values(X), axis=1)]


def accuracy(pred: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.asarray(pred) == np.asarray(y)))


def _one_hot(y: np.ndarray, classes: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(classes, y)
    Y = np.zeros((y.shape[0], classes.shape[0]))
    Y[np.arange(y.shape[0]), pos] = 1.0
    return Y


def _fit_logreg(X, y, lam: float, spec: ClassifierSpec) -> SoftmaxClassifier:
    classes = np.unique(y)
    Y = _one_hot(y, classes)
    d, K = X.shape[1], classes.shape[0]
    x0 = np.zeros(d * K + K)
    params, converged, n_iter = adam_minimize(
        lambda p: logreg_loss_grad(p, X, Y, lam),
        x0,
        spec.learning_rate,
        spec.max_epochs,
        spec.tolerance,
    )
    return SoftmaxClassifier(
        kind="logreg",
        params=params,
        dims=(d, K),
        classes=classes,
        l2=lam,
        hidden=None,
        converged=converged,
        n_iter=n_iter,
    )


def mlp_init(seed: int, dims: tuple[int, int, int]) -> np.ndarray:
    """Seeded He-scaled initialization for the packed MLP parameters."""
    d, h, K = dims
    rng = np.random.Generator(np.random.PCG64(seed))
    W1 = rng.normal(0.0, np.sqrt(2.0 / d), size=(d, h))
    W2 = rng.normal(0.0, np.sqrt(2.0 / h), size=(h, K))
    return np.concatenate([W1.ravel(), np.zeros(h), W2.ravel(), np.zeros(K)])


def _fit_mlp(
    X, y, lam: float, hidden: int, spec: ClassifierSpec, init_params=None
) -> SoftmaxClassifier:
    classes = np.unique(y)
    Y = _one_hot(y, classes)
    dims = (X.shape[1], hidden, classes.shape[0])
    x0 = mlp_init(spec.seed, dims) if init_params is None else np.asarray(init_params, float)
    params, converged, n_iter = adam_minimize(
        lambda p: mlp_loss_grad(p, dims, X, Y, lam),
        x0,
        spec.learning_rate,
        spec.max_epochs,
        spec.tolerance,
    )
    return SoftmaxClassifier(
        kind="mlp",
        params=params,
        dims=dims,
        classes=classes,
        l2=lam,
        hidden=hidden,
        converged=converged,
        n_iter=n_iter,
    )


def _select_candidate(fit_one, candidates, X, y, X_val, y_val, spec: ClassifierSpec):
    """Pick the candidate with the best validation accuracy.

    Uses the explicit validation set when given, otherwise deterministic
    inner k-fold cross-validation on the training data.  Ties keep the first
    candidate in grid order.
    """
    if len(candidates) == 1:
        return candidates[0]
    if X_val is not None:
        scores = []
        for cand in candidates:
            clf = fit_one(X, y, cand)
            scores.append(accuracy(clf.predict(X_val), y_val))
        return candidates[int(np.argmax(scores))]
    n = X.shape[0]
    k = min(spec.inner_folds, n)
    if k < 2:
        return candidates[0]
    folds = cv_folds(n, k, spec.seed)
    all_idx = np.arange(n)
    usable = []
    for fold in folds:
        rest = np.setdiff1d(all_idx, fold)
        if np.unique(y[rest]).size >= 2:
            usable.append((rest, fold))
    if not usable:
        return candidates[0]
    scores = []
    for cand in candidates:
        fold_scores = [
            accuracy(fit_one(X[tr], y[tr], cand).predict(X[va]), y[va]) for tr, va in usable
        ]
        scores.append(float(np.mean(fold_scores)))
    return candidates[int(np.argmax(scores))]


def train_logreg(
    X: np.ndarray,
    y: np.ndarray,
    spec: ClassifierSpec,
    X_val: Optional[np.ndarray] = None,
    y_val: Optional[np.ndarray] = None,
) -> SoftmaxClassifier:
    """Multinomial L2 logistic regression with grid-selected regularization.

    Decisions are invariant to feature permutations; duplicating a feature
    column leaves the achieved loss unchanged only at lam=0 (the regularized
    optimum genuinely differs, since the penalty sees the duplicate).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if np.unique(y).size < 2:
        raise ValueError("need at least 2 classes present")
    lam = _select_candidate(
        lambda Xt, yt, c: _fit_logreg(Xt, yt, c, spec),
        list(spec.l2_grid),
        X,
        y,
        X_val,
        y_val,
        spec,
    )
    return _fit_logreg(X, y, float(lam), spec)


def train_mlp(
    X: np.ndarray,
    y: np.ndarray,
    spec: ClassifierSpec,
    X_val: Optional[np.ndarray] = None,
    y_val: Optional[np.ndarray] = None,
    init_params: Optional[np.ndarray] = None,
) -> SoftmaxClassifier:
    """One-hidden-layer rectifier network; hidden size and L2 picked on validation.

    init_params overrides the seeded initialization and is only honored when
    the combined grid has a single candidate (it fixes one architecture).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if np.unique(y).size < 2:
        raise ValueError("need at least 2 classes present")
    candidates = [(h, lam) for h in spec.hidden_sizes for lam in spec.l2_grid]
    if init_params is not None and len(candidates) > 1:
        raise ValueError("init_params requires singleton hidden/l2 grids")
    hidden, lam = _select_candidate(
        lambda Xt, yt, c: _fit_mlp(Xt, yt, c[1], c[0], spec),
        candidates,
        X,
        y,
        X_val,
        y_val,
        spec,
    )
    return _fit_mlp(X, y, float(lam), int(hidden), spec, init_params=init_params)


def train_classifier(X, y, spec: ClassifierSpec, X_val=None, y_val=None) -> SoftmaxClassifier:
    if spec.kind == "logreg":
        return train_logreg(X, y, spec, X_val=X_val, y_val=y_val)
    return train_mlp(X, y, spec, X_val=X_val, y_val=y_val)


# ---------------------------------------------------------------------------
# full task runs


@dataclass
class EvalResult:
    """One scored (task, encoder, protocol, classifier, normalization) cell."""

    task: str
    encoder: str
    embedding_size: int
    protocol: str
    classifier: str
    normalized: bool
    metrics: dict[str, float]
    hyperparams: dict
    diagnostics: dict


def run_transfer_task(
    dataset: LabeledDataset,
    encoder: Encoder,
    spec: ClassifierSpec,
    normalized: bool,
) -> EvalResult:
    """Embed every sentence once, then train/score under the dataset's split policy.

    Fixed split: normalization and classifier fitting see only the train
    portion; the test portion contributes the reported accuracy.
    Cross-validation: mean accuracy over the outer folds, with per-fold
    normalization fitting.  The component of a fitted encoder is estimated
    from the train portion (fixed split) or the whole example set (CV, where
    no held-out set exists at the dataset level).
    """
    sentences = dataset.sentences()
    y = dataset.labels()
    n = len(sentences)
    diag: dict = {}
    if isinstance(dataset.policy, FixedSplit):
        fit_sentences = [sentences[i] for i in dataset.policy.train_indices]
    else:
        fit_sentences = sentences
    enc = encoder.prepared(fit_sentences)
    X_all, enc_diag = enc.encode_batch(sentences, ids=list(range(n)))
    diag["oov_tokens"] = enc_diag.n_oov_tokens
    diag["total_tokens"] = enc_diag.n_tokens
    diag["empty_sentences"] = enc_diag.n_empty

    def fit_and_score(train_idx, test_idx):
        Xtr, Xte = X_all[train_idx], X_all[test_idx]
        zero_rows = 0
        if normalized:
            stats = fit_znorm(Xtr, fitted_on="train")
            _require_train_stats(stats)
            Xtr, z1 = apply_znorm(stats, Xtr)
            Xte, z2 = apply_znorm(stats, Xte)
            zero_rows = len(z1) + len(z2)
        clf = train_classifier(Xtr, y[train_idx], spec)
        return clf, accuracy(clf.predict(Xte), y[test_idx]), accuracy(
            clf.predict(Xtr), y[train_idx]
        ), zero_rows

    if isinstance(dataset.policy, FixedSplit):
        tr = np.array(dataset.policy.train_indices, dtype=np.int64)
        te = np.array(dataset.policy.test_indices, dtype=np.int64)
        clf, test_acc, train_acc, zero_rows = fit_and_score(tr, te)
        result_metrics = {"accuracy": test_acc}
        hyper = {"l2": clf.l2}
        if clf.hidden is not None:
            hyper["hidden"] = clf.hidden
        diag.update(
            train_accuracy=train_acc,
            converged=clf.converged,
            zero_rows_after_norm=zero_rows,
        )
    else:
        folds = cv_folds(n, dataset.policy.k, dataset.policy.seed)
        all_idx = np.arange(n)
        fold_accs = []
        fold_l2 = []
        fold_hidden = []
        converged = True
        zero_total = 0
        for fold in folds:
            tr = np.setdiff1d(all_idx, fold)
            clf, test_acc, _, zero_rows = fit_and_score(tr, fold)
            fold_accs.append(test_acc)
            fold_l2.append(clf.l2)
            if clf.hidden is not None:
                fold_hidden.append(clf.hidden)
            converged = converged and clf.converged
            zero_total += zero_rows
        result_metrics = {"accuracy": float(np.mean(fold_accs))}
        hyper = {"l2": fold_l2}
        if fold_hidden:
            hyper["hidden"] = fold_hidden
        diag.update(
            fold_accuracies=[float(a) for a in fold_accs],
            converged=converged,
            zero_rows_after_norm=zero_total,
        )
    return EvalResult(
        task=dataset.name,
        encoder=encoder.name,
        embedding_size=enc.output_dim,
        protocol="classify",
        classifier=spec.kind,
        normalized=normalized,
        metrics=result_metrics,
        hyperparams=hyper,
        diagnostics=diag,
    )


def run_ucp_cell(
    dataset: PairDataset, encoder: Encoder, normalized: bool, split: str = "test"
) -> EvalResult:
    """UCP on one split of a pair dataset, as a reportable result cell.

    There is no training split in this protocol, so a fitted encoder's
    component comes from the evaluated sentences themselves, mirroring the
    whole-matrix normalization.
    """
    pairs = dataset.split(split)
    enc = encoder.prepared([s for p in pairs for s in (p.a, p.b)])
    res = eval_ucp(pairs, enc, normalized, ids=dataset.sentence_ids(split))
    return EvalResult(
        task=dataset.name,
        encoder=encoder.name,
        embedding_size=enc.output_dim,
        protocol="ucp",
        classifier="none",
        normalized=normalized,
        metrics={"pearson": res.pearson, "spearman": res.spearman},
        hyperparams={},
        diagnostics={"n_pairs": res.n_pairs, "skipped_pairs": res.skipped_pairs},
    )


def run_similarity_cell(
    dataset: PairDataset,
    encoder: Encoder,
    normalized: bool,
    l2_grid: Sequence[float] = DEFAULT_L2_GRID,
) -> EvalResult:
    """Learned similarity: train on train, select on dev, report on test."""
    enc = encoder.prepared([s for p in dataset.train for s in (p.a, p.b)])
    model = train_similarity_regressor(
        dataset.train,
        dataset.dev,
        enc,
        normalized,
        l2_grid,
        ids_train=dataset.sentence_ids("train"),
        ids_dev=dataset.sentence_ids("dev"),
    )
    scores = eval_learned_similarity(model, dataset.test, ids=dataset.sentence_ids("test"))
    result_metrics = {"mse": scores.mse}
    if not scores.degenerate:
        result_metrics["pearson"] = scores.pearson
        result_metrics["spearman"] = scores.spearman
    return EvalResult(
        task=dataset.name,
        encoder=encoder.name,
        embedding_size=enc.output_dim,
        protocol="learned_sim",
        classifier="ridge",
        normalized=normalized,
        metrics=result_metrics,
        hyperparams={"l2": model.l2},
        diagnostics={
            "degenerate_predictions": scores.degenerate,
            "dev_pearson": model.dev_pearson,
        },
    )
