"""Multinomial maximum-entropy classifier over binary string features.

Training maximizes the L2-penalized conditional log-likelihood

    J(W) = sum_i log p(y_i | x_i) - sum(W**2) / (2 * l2_sigma2)

with limited-memory BFGS and a backtracking (Armijo) line search, starting
from all-zero weights.  The penalty covers every entry of the weight table,
per-class biases included.

Model file layout (little-endian)::

    b"MXNT" | version:u8 | header_len:u32 | header (UTF-8 JSON) | weights (f8)

The header holds the label list, the feature string table, ``l2_sigma2`` and
trainer metadata; weights are raw IEEE-754 doubles in row-major order,
shape ``(len(labels), len(features) + 1)`` with the bias in the last column.
"""
from __future__ import annotations

import json
import struct
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

MAGIC = b"MXNT"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sBI")


class MaxentError(Exception):
    """Training precondition failure or use of an untrained model."""


class ModelFormatError(MaxentError):
    """A model payload could not be decoded."""


class ModelVersionError(ModelFormatError):
    """A model payload was written by an incompatible format version."""


@dataclass(frozen=True)
class TrainConfig:
    l2_sigma2: float = 1.0
    max_iters: int = 200
    grad_tol: float = 1e-4


@dataclass(frozen=True)
class LabeledInstance:
    features: tuple[str, ...]
    label: str


@dataclass(eq=False)
class MaxentModel:
    labels: tuple[str, ...]
    features: tuple[str, ...]
    weights: np.ndarray | None = None
    l2_sigma2: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.features = tuple(self.features)
        self.feature_index = {f: i for i, f in enumerate(self.features)}
        if self.weights is not None:
            self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
            expected = (len(self.labels), len(self.features) + 1)
            if self.weights.shape != expected:
                raise MaxentError(f"weight table has shape {self.weights.shape}, expected {expected}")

    @property
    def is_trained(self) -> bool:
        return self.weights is not None

    def scores(self, features: Iterable[str]) -> np.ndarray:
        if self.weights is None:
            raise MaxentError("model is not trained")
        ids = sorted({self.feature_index[f] for f in features if f in self.feature_index})
        return self.weights[:, ids].sum(axis=1) + self.weights[:, -1]

    def predict(self, features: Iterable[str]) -> np.ndarray:
        """Probability of each label (in ``self.labels`` order); unknown features are ignored."""
        s = self.scores(features)
        e = np.exp(s - s.max())
        return e / e.sum()

    def prob(self, features: Iterable[str], label: str) -> float:
        if label not in self.labels:
            return 0.0
        return float(self.predict(features)[self.labels.index(label)])

    def classify(self, features: Iterable[str]) -> str:
        # np.argmax returns the first maximum, so ties go to the earliest label
        return self.labels[int(np.argmax(self.predict(features)))]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MaxentModel):
            return NotImplemented
        if self.labels != other.labels or self.features != other.features:
            return False
        if (self.weights is None) != (other.weights is None):
            return False
        if self.weights is not None and not np.array_equal(self.weights, other.weights):
            return False
        return self.l2_sigma2 == other.l2_sigma2 and self.meta == other.meta


def encode(
    data: Sequence[LabeledInstance],
) -> tuple[sp.csr_matrix, np.ndarray, tuple[str, ...], tuple[str, ...]]:
    """Binary design matrix, label ids, sorted label list and interned features."""
    labels = tuple(sorted({inst.label for inst in data}))
    label_id = {lab: i for i, lab in enumerate(labels)}
    feature_id: dict[str, int] = {}
    indptr, indices = [0], []
    for inst in data:
        ids = set()
        for f in inst.features:
            if not f:
                raise MaxentError("empty feature string")
            ids.add(feature_id.setdefault(f, len(feature_id)))
        indices.extend(sorted(ids))
        indptr.append(len(indices))
    X = sp.csr_matrix(
        (np.ones(len(indices)), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(data), len(feature_id)),
    )
    y = np.array([label_id[inst.label] for inst in data], dtype=np.int64)
    return X, y, labels, tuple(feature_id)


def penalized_log_likelihood(
    weights: np.ndarray, X: sp.csr_matrix, y: np.ndarray, l2_sigma2: float
) -> tuple[float, np.ndarray]:
    """Objective J and its gradient for a ``(n_labels, n_features + 1)`` weight table."""
    S = np.asarray(X @ weights[:, :-1].T) + weights[:, -1]
    S_max = S.max(axis=1, keepdims=True)
    E = np.exp(S - S_max)
    Z = E.sum(axis=1, keepdims=True)
    log_Z = np.log(Z)[:, 0] + S_max[:, 0]
    n = X.shape[0]
    ll = float(S[np.arange(n), y].sum() - log_Z.sum())
    resid = -E / Z
    resid[np.arange(n), y] += 1.0
    grad = np.empty_like(weights)
    grad[:, :-1] = np.asarray((X.T @ resid).T)
    grad[:, -1] = resid.sum(axis=0)
    objective = ll - float(np.sum(weights * weights)) / (2.0 * l2_sigma2)
    grad -= weights / l2_sigma2
    return objective, grad


@dataclass
class _Result:
    x: np.ndarray
    iterations: int
    converged: bool
    trace: list[float]
    grad_norm: float


def _lbfgs(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    max_iters: int,
    grad_tol: float,
    memory: int = 10,
) -> _Result:
    """Minimize ``fun``; each accepted step satisfies the Armijo condition."""
    x = x0.copy()
    f, g = fun(x)
    trace = [f]
    s_hist: deque[np.ndarray] = deque(maxlen=memory)
    y_hist: deque[np.ndarray] = deque(maxlen=memory)
    it = 0
    while True:
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm < grad_tol:
            return _Result(x, it, True, trace, gnorm)
        if it >= max_iters:
            return _Result(x, it, False, trace, gnorm)

        # two-loop recursion
        q = -g
        alphas = []
        for s, yv in zip(reversed(s_hist), reversed(y_hist)):
            a = (s @ q) / (yv @ s)
            alphas.append(a)
            q = q - a * yv
        if s_hist:
            q = q * ((s_hist[-1] @ y_hist[-1]) / (y_hist[-1] @ y_hist[-1]))
        for (s, yv), a in zip(zip(s_hist, y_hist), reversed(alphas)):
            b = (yv @ q) / (yv @ s)
            q = q + (a - b) * s
        d = q
        slope = g @ d
        if slope >= 0:
            s_hist.clear()
            y_hist.clear()
            d = -g
            slope = g @ d

        step = 1.0 if s_hist else min(1.0, 1.0 / float(np.linalg.norm(g)))
        while True:
            x_new = x + step * d
            f_new, g_new = fun(x_new)
            if f_new <= f + 1e-4 * step * slope:
                break
            step *= 0.5
            if step < 1e-16:
                # no further decrease representable
                return _Result(x, it, False, trace, gnorm)
        s = x_new - x
        yv = g_new - g
        if s @ yv > 1e-12:
            s_hist.append(s)
            y_hist.append(yv)
        x, f, g = x_new, f_new, g_new
        trace.append(f)
        it += 1


def train(data: Sequence[LabeledInstance], config: TrainConfig = TrainConfig()) -> MaxentModel:
    if not data:
        raise MaxentError("empty training data")
    X, y, labels, features = encode(data)
    if len(labels) < 2:
        raise MaxentError(f"single-label data (only {labels[0]!r})")
    shape = (len(labels), len(features) + 1)

    def neg(flat: np.ndarray) -> tuple[float, np.ndarray]:
        obj, grad = penalized_log_likelihood(flat.reshape(shape), X, y, config.l2_sigma2)
        return -obj, -grad.ravel()

    res = _lbfgs(neg, np.zeros(shape[0] * shape[1]), config.max_iters, config.grad_tol)
    meta = {
        "iterations": res.iterations,
        "converged": res.converged,
        "objective": -res.trace[-1],
        "grad_norm": res.grad_norm,
        "objective_trace": [-v for v in res.trace],
        "n_instances": len(data),
    }
    return MaxentModel(labels, features, res.x.reshape(shape), config.l2_sigma2, meta)


def serialize(model: MaxentModel) -> bytes:
    if model.weights is None:
        raise MaxentError("cannot serialize an untrained model")
    header = json.dumps(
        {
            "labels": list(model.labels),
            "features": list(model.features),
            "l2_sigma2": model.l2_sigma2,
            "meta": model.meta,
        },
        sort_keys=True,
        ensure_ascii=False,
    ).encode("utf-8")
    body = model.weights.astype("<f8").tobytes(order="C")
    return _HEADER.pack(MAGIC, FORMAT_VERSION, len(header)) + header + body


def deserialize(payload: bytes) -> MaxentModel:
    if len(payload) < _HEADER.size:
        raise ModelFormatError("truncated model payload")
    magic, version, header_len = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise ModelFormatError("not a maxent model payload")
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"model format version {version}, expected {FORMAT_VERSION}")
    start = _HEADER.size
    if len(payload) < start + header_len:
        raise ModelFormatError("truncated model payload")
    try:
        header = json.loads(payload[start:start + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"corrupt model header: {exc}") from None
    n_labels, n_features = len(header["labels"]), len(header["features"])
    body = payload[start + header_len:]
    expected = 8 * n_labels * (n_features + 1)
    if len(body) != expected:
        raise ModelFormatError(f"truncated model payload ({len(body)} of {expected} weight bytes)")
    weights = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(n_labels, n_features + 1)
    return MaxentModel(header["labels"], header["features"], weights, header["l2_sigma2"], header["meta"])


def save(model: MaxentModel, path: str | Path) -> None:
    Path(path).write_bytes(serialize(model))


def load(path: str | Path) -> MaxentModel:
    return deserialize(Path(path).read_bytes())
