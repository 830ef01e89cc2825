"""Linear classifiers and evaluation metrics.

Three predictors live here: a majority-class baseline, a bag-of-n-grams
softmax text classifier (hashed n-gram features averaged into a dense
vector, trained by SGD with a linearly decaying learning rate, in the
style of shallow off-the-shelf text classification tools), and a
from-scratch multinomial logistic regression used by the adversarial
filtering ensemble. Evaluation produces micro-F1, per-class precision and
recall, and a confusion matrix.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Dataset, PairExample
from .errors import DataFormatError, ValidationError
from .textproc import extract_features, tokenize

# Separator inserted between premise and hypothesis token streams when the
# classifier sees both sentences.
SEP_TOKEN = "<sep>"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_FNV_MASK = 0xFFFFFFFFFFFFFFFF


def hash_feature(feature: str) -> int:
    """64-bit FNV-1a over the UTF-8 bytes of ``feature``.

    Pinned so hashed feature spaces are reproducible across platforms and
    releases.
    """
    h = _FNV_OFFSET
    for byte in feature.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _FNV_MASK
    return h


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# Majority baseline
# ---------------------------------------------------------------------------


@dataclass
class MajorityClassifier:
    """Constant predictor of the most frequent training label."""

    label: str
    counts: dict[str, int]

    def predict(self, example: PairExample | None = None) -> str:
        return self.label


def majority_baseline(train: Dataset) -> MajorityClassifier:
    """Most common training label; ties break toward the lexicographically
    smaller label."""
    if len(train) == 0:
        raise ValidationError("empty training set")
    counts = Counter(ex.label for ex in train)
    label = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    return MajorityClassifier(label=label, counts=dict(counts))


# ---------------------------------------------------------------------------
# Bag-of-n-grams softmax text classifier
# ---------------------------------------------------------------------------


@dataclass
class TextClassifierConfig:
    """Hyperparameters; the defaults are the published defaults of the
    reference shallow-text-classifier tooling, with bigrams enabled."""

    dim: int = 100
    epochs: int = 5
    learning_rate: float = 0.1
    max_ngram: int = 2
    buckets: int = 2_000_000
    seed: int = 0
    use_premise: bool = False

    def validate(self) -> None:
        if self.dim < 1:
            raise ValidationError(f"dim must be >= 1, got {self.dim}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if self.buckets < 1:
            raise ValidationError(f"buckets must be >= 1, got {self.buckets}")
        if self.max_ngram < 1:
            raise ValidationError(f"max_ngram must be >= 1, got {self.max_ngram}")


@dataclass
class TextClassifier:
    """Hashed n-gram softmax classifier.

    ``input_weights`` holds one embedding per hash bucket; an example is
    the mean of its feature-bucket embeddings, classified by a softmax
    over ``output_weights``.
    """

    config: TextClassifierConfig
    class_list: tuple[str, ...]
    input_weights: np.ndarray  # (buckets, dim)
    output_weights: np.ndarray  # (n_classes, dim)

    def feature_buckets(self, example: PairExample) -> np.ndarray:
        tokens = tokenize(example.hypothesis).tokens
        if self.config.use_premise:
            tokens = tokenize(example.premise).tokens + [SEP_TOKEN] + tokens
        features = extract_features(tokens, self.config.max_ngram)
        return np.array(
            [hash_feature(f) % self.config.buckets for f in features], dtype=np.int64
        )

    def _hidden(self, buckets: np.ndarray) -> np.ndarray:
        if buckets.size == 0:
            return np.zeros(self.config.dim)
        return self.input_weights[buckets].mean(axis=0)


def train_text_classifier(
    train: Dataset, config: TextClassifierConfig | None = None
) -> TextClassifier:
    """Train the hashed n-gram softmax classifier by SGD.

    Features are word n-grams of the hypothesis (prefixed by the premise
    and a separator token when ``use_premise`` is set). The learning rate
    decays linearly to zero over all updates; example order is reshuffled
    once per epoch by the seeded generator, so training is deterministic
    given the seed. ``epochs=0`` leaves the randomly initialized input
    weights and zero output weights untouched (predictions are then
    uniform).
    """
    cfg = config or TextClassifierConfig()
    cfg.validate()
    if len(train) == 0:
        raise ValidationError("empty training set")
    class_list = tuple(sorted({ex.label for ex in train}))
    class_index = {label: i for i, label in enumerate(class_list)}
    rng = np.random.default_rng(cfg.seed)
    model = TextClassifier(
        config=cfg,
        class_list=class_list,
        input_weights=rng.uniform(-1.0 / cfg.dim, 1.0 / cfg.dim, (cfg.buckets, cfg.dim)),
        output_weights=np.zeros((len(class_list), cfg.dim)),
    )
    bucket_lists = [model.feature_buckets(ex) for ex in train]
    labels = np.array([class_index[ex.label] for ex in train], dtype=np.int64)

    n = len(train)
    total_updates = cfg.epochs * n
    t = 0
    for _ in range(cfg.epochs):
        for idx in rng.permutation(n):
            lr = cfg.learning_rate * (1.0 - t / total_updates)
            t += 1
            buckets = bucket_lists[idx]
            hidden = model._hidden(buckets)
            probs = _softmax(model.output_weights @ hidden)
            err = probs.copy()
            err[labels[idx]] -= 1.0
            # Hidden-layer gradient uses the pre-update output weights.
            grad_hidden = model.output_weights.T @ err
            model.output_weights -= lr * np.outer(err, hidden)
            if buckets.size:
                np.add.at(
                    model.input_weights, buckets, -lr * grad_hidden / buckets.size
                )
    return model


def predict(model: TextClassifier, example: PairExample) -> tuple[str, dict[str, float]]:
    """Class probabilities and the argmax label for one example.

    Probabilities sum to one; ties resolve to the earliest class in
    ``class_list``.
    """
    hidden = model._hidden(model.feature_buckets(example))
    probs = _softmax(model.output_weights @ hidden)
    label = model.class_list[int(np.argmax(probs))]
    return label, {c: float(p) for c, p in zip(model.class_list, probs)}


def predict_labels(model: TextClassifier, dataset: Dataset) -> list[str]:
    return [predict(model, ex)[0] for ex in dataset]


MODEL_FORMAT_VERSION = 1


def save_text_classifier(model: TextClassifier, path: str | Path) -> None:
    """Persist weights plus config as a versioned ``.npz`` archive."""
    header = {
        "format_version": MODEL_FORMAT_VERSION,
        "config": asdict(model.config),
        "class_list": list(model.class_list),
    }
    np.savez_compressed(
        Path(path),
        header=np.frombuffer(json.dumps(header, sort_keys=True).encode("utf-8"), dtype=np.uint8),
        input_weights=model.input_weights,
        output_weights=model.output_weights,
    )


def load_text_classifier(path: str | Path) -> TextClassifier:
    with np.load(Path(path)) as archive:
        header = json.loads(archive["header"].tobytes().decode("utf-8"))
        if header.get("format_version") != MODEL_FORMAT_VERSION:
            raise DataFormatError(
                f"unsupported model format version {header.get('format_version')!r}"
            )
        return TextClassifier(
            config=TextClassifierConfig(**header["config"]),
            class_list=tuple(header["class_list"]),
            input_weights=archive["input_weights"],
            output_weights=archive["output_weights"],
        )


# ---------------------------------------------------------------------------
# Multinomial logistic regression
# ---------------------------------------------------------------------------


@dataclass
class LogRegConfig:
    l2_strength: float = 1.0
    max_iters: int = 500
    tolerance: float = 1e-5
    seed: int = 0  # accepted for interface uniformity; training starts at zero

    def validate(self) -> None:
        if self.l2_strength < 0:
            raise ValidationError("l2_strength must be >= 0")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.tolerance <= 0:
            raise ValidationError("tolerance must be > 0")


@dataclass
class LogRegModel:
    """Multinomial logistic regression; bias folded into the last column."""

    weights: np.ndarray  # (n_classes, dim + 1)
    class_list: tuple[str, ...]
    converged: bool = True
    n_iters: int = 0

    def predict_proba(self, X: np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
        Xa = _augment(np.asarray(X, dtype=np.float64))
        return _softmax(Xa @ self.weights.T)

    def predict(self, X: np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
        probs = self.predict_proba(X)
        idx = np.argmax(probs, axis=1)
        return np.array([self.class_list[i] for i in idx])


def _augment(X: np.ndarray) -> np.ndarray:
    if X.ndim != 2:
        raise ValidationError("feature matrix must be two-dimensional")
    return np.hstack([X, np.ones((X.shape[0], 1))])


def logreg_loss_and_grad(
    weights: np.ndarray,
    X_aug: np.ndarray,
    y_onehot: np.ndarray,
    l2_strength: float,
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy plus an L2 penalty, and its analytic gradient.

    The objective is ``mean CE + l2/(2N) * ||W||^2`` with the bias column
    excluded from the penalty.
    """
    n = X_aug.shape[0]
    scores = X_aug @ weights.T
    shifted = scores - scores.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted - log_z[:, None]
    ce = -(y_onehot * log_probs).sum() / n
    penalized = weights.copy()
    penalized[:, -1] = 0.0
    loss = ce + 0.5 * l2_strength * (penalized**2).sum() / n
    probs = np.exp(log_probs)
    grad = ((probs - y_onehot).T @ X_aug + l2_strength * penalized) / n
    return float(loss), grad


def train_logreg(
    X: np.ndarray | Sequence[Sequence[float]],
    y: Sequence[str],
    config: LogRegConfig | None = None,
) -> LogRegModel:
    """Fit multinomial logistic regression by full-batch gradient descent.

    Descent uses backtracking (Armijo) line search with step growth
    between iterations and stops when the gradient max-norm drops below
    the tolerance or ``max_iters`` is reached. Weights start at zero, so
    the fit is deterministic.
    """
    cfg = config or LogRegConfig()
    cfg.validate()
    rows = list(X) if not isinstance(X, np.ndarray) else X
    if len(rows) == 0:
        raise ValidationError("empty training set")
    if len(rows) != len(y):
        raise ValidationError(f"{len(rows)} vectors but {len(y)} labels")
    if not isinstance(rows, np.ndarray):
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise ValidationError(f"inconsistent vector lengths: {sorted(lengths)}")
    Xm = np.asarray(rows, dtype=np.float64)
    Xa = _augment(Xm)
    class_list = tuple(sorted(set(y)))
    class_index = {label: i for i, label in enumerate(class_list)}
    n, n_classes = Xa.shape[0], len(class_list)
    y_onehot = np.zeros((n, n_classes))
    y_onehot[np.arange(n), [class_index[label] for label in y]] = 1.0

    weights = np.zeros((n_classes, Xa.shape[1]))
    loss, grad = logreg_loss_and_grad(weights, Xa, y_onehot, cfg.l2_strength)
    step = 1.0
    iters = 0
    for _ in range(cfg.max_iters):
        if np.abs(grad).max() < cfg.tolerance:
            break
        grad_sq = float((grad**2).sum())
        step *= 2.0
        improved = False
        while step > 1e-12:
            candidate = weights - step * grad
            cand_loss, cand_grad = logreg_loss_and_grad(
                candidate, Xa, y_onehot, cfg.l2_strength
            )
            if cand_loss <= loss - 1e-4 * step * grad_sq:
                improved = True
                break
            step *= 0.5
        if not improved:
            break  # step at numerical precision; nothing more to gain
        weights, loss, grad = candidate, cand_loss, cand_grad
        iters += 1
    converged = bool(np.abs(grad).max() < cfg.tolerance)
    return LogRegModel(
        weights=weights, class_list=class_list, converged=converged, n_iters=iters
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass
class Metrics:
    """Micro-F1, per-class precision/recall, and a gold-by-predicted
    confusion matrix."""

    micro_f1: float
    per_class_precision: dict[str, float]
    per_class_recall: dict[str, float]
    confusion: np.ndarray  # rows = gold, columns = predicted
    class_list: tuple[str, ...]
    zero_division: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return int(self.confusion.sum())


def evaluate(
    predictions: Sequence[str], gold: Sequence[str], class_list: Sequence[str]
) -> Metrics:
    """Standard single-label multiclass metrics.

    Micro-F1 equals accuracy here (every example gets exactly one
    prediction), i.e. the confusion trace over the total. Precision or
    recall cells with a zero denominator are reported as 0 and flagged in
    ``zero_division``.
    """
    if len(predictions) != len(gold):
        raise ValidationError(
            f"length mismatch: {len(predictions)} predictions, {len(gold)} gold"
        )
    if not predictions:
        raise ValidationError("empty evaluation set")
    classes = tuple(class_list)
    index = {label: i for i, label in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for pred, actual in zip(predictions, gold):
        if pred not in index:
            raise ValidationError(f"prediction label {pred!r} not in class list")
        if actual not in index:
            raise ValidationError(f"gold label {actual!r} not in class list")
        confusion[index[actual], index[pred]] += 1
    total = int(confusion.sum())
    micro_f1 = float(np.trace(confusion)) / total
    precision: dict[str, float] = {}
    recall: dict[str, float] = {}
    zero_division: list[str] = []
    for label, i in index.items():
        tp = int(confusion[i, i])
        pred_total = int(confusion[:, i].sum())
        gold_total = int(confusion[i, :].sum())
        if pred_total == 0:
            precision[label] = 0.0
            zero_division.append(f"precision/{label}")
        else:
            precision[label] = tp / pred_total
        if gold_total == 0:
            recall[label] = 0.0
            zero_division.append(f"recall/{label}")
        else:
            recall[label] = tp / gold_total
    return Metrics(
        micro_f1=micro_f1,
        per_class_precision=precision,
        per_class_recall=recall,
        confusion=confusion,
        class_list=classes,
        zero_division=zero_division,
    )
