"""Kernelized binary SVM trained from scratch, composed one-vs-all.

The dual problem  min ½ aᵀQa − eᵀa  s.t.  yᵀa = 0,  0 ≤ a_i ≤ c_i·C  (with
Q_ij = y_i y_j K(x_i, x_j) and per-instance cost factors c_i) is solved by
sequential minimal optimization with maximal-violating-pair selection:

  * r_i = −y_i·(Qa − e)_i; the pair is argmax r over I_up and argmin r over
    I_low, stopping when max − min ≤ kkt_tolerance,
  * the two-variable subproblem is solved exactly and clipped to its box,
  * the bias is the midpoint b = (max + min)/2, which bounds every example's
    KKT residual by kkt_tolerance/2.

Selection is deterministic (first index on ties), so identical inputs give
bitwise-identical models. Kernel rows are cached in a bounded LRU keyed by
example index; correctness does not depend on cache hits.
"""

from __future__ import annotations

import json
import math
from collections import OrderedDict
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConvergenceError, ModelFormatError
from .features import FeatureConfig, FeatureVocabulary, SparseVector
from .kernels import CsrRows, KernelParams, RowKernel, kernel_diag, kernel_eval
from .tags import ALL_TAGS
from .util import atomic_write_text

MODEL_MAGIC = "modtag-svm"
MODEL_VERSION = 1

_BOUND_SNAP = 1e-12


@dataclass(frozen=True)
class TrainParams:
    C: float = 1.0
    kernel: KernelParams = field(default_factory=KernelParams)
    kkt_tolerance: float = 1e-3
    max_passes: int = 0  # hard cap on SMO steps; 0 = max(10000, 100*n)
    instance_costs: tuple[float, ...] | None = None
    cache_rows: int = 1024

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.kkt_tolerance <= 0:
            raise ValueError("kkt_tolerance must be positive")
        if self.instance_costs is not None:
            object.__setattr__(self, "instance_costs", tuple(float(c) for c in self.instance_costs))


@dataclass(frozen=True)
class BinaryModel:
    """Support vectors with positive dual coefficients, plus the bias.

    A degenerate model (for a class absent from training data) has no
    support vectors and scores −inf everywhere.
    """

    vectors: tuple[SparseVector, ...]
    labels: tuple[int, ...]
    alphas: tuple[float, ...]
    bias: float
    kernel: KernelParams
    degenerate: bool = False

    def __post_init__(self):
        if self.degenerate:
            if self.vectors:
                raise ValueError("degenerate model cannot carry support vectors")
            return
        if not (len(self.vectors) == len(self.labels) == len(self.alphas)):
            raise ValueError("support vector fields must have equal length")
        if any(l not in (-1, 1) for l in self.labels):
            raise ValueError("labels must be -1 or +1")
        if any(a <= 0 for a in self.alphas):
            raise ValueError("stored alphas must be positive")
        balance = sum(a * l for a, l in zip(self.alphas, self.labels))
        if abs(balance) > 1e-6:
            raise ValueError(f"dual equality constraint violated: sum(alpha*y) = {balance:g}")


def _cost_bounds(n: int, params: TrainParams) -> np.ndarray:
    if params.instance_costs is None:
        costs = np.ones(n)
    else:
        if len(params.instance_costs) != n:
            raise ValueError(
                f"instance_costs has {len(params.instance_costs)} entries for {n} examples"
            )
        costs = np.asarray(params.instance_costs, dtype=np.float64)
        if not np.all(np.isfinite(costs)) or np.any(costs <= 0):
            raise ValueError("instance costs must be finite and positive")
    return costs * params.C


@dataclass(frozen=True)
class BinaryFit:
    """Full dual solution of one binary problem, aligned with its examples."""

    model: BinaryModel
    alphas: np.ndarray       # one entry per training example (zeros included)
    upper: np.ndarray        # per-example box bound c_i * C
    dual_objective: float
    steps: int


def fit_binary(examples, params: TrainParams) -> BinaryFit:
    """Train one binary SVM; labels must be ±1 with both classes present."""
    if not examples:
        raise ValueError("no training examples")
    vectors = [v for v, _ in examples]
    y_int = [int(l) for _, l in examples]
    if any(l not in (-1, 1) for l in y_int):
        raise ValueError("labels must be -1 or +1")
    if len(set(y_int)) < 2:
        raise ValueError("training data contains a single class")
    n = len(examples)
    y = np.asarray(y_int, dtype=np.float64)
    upper = _cost_bounds(n, params)
    rows = CsrRows.from_vectors(vectors)

    alpha, grad, bias, steps = _smo_solve(rows, y, upper, params)

    keep = np.flatnonzero(alpha > 0)
    model = BinaryModel(
        vectors=tuple(vectors[i] for i in keep),
        labels=tuple(y_int[i] for i in keep),
        alphas=tuple(float(alpha[i]) for i in keep),
        bias=float(bias),
        kernel=params.kernel,
    )
    # D(a) = Σa − ½aᵀQa; with g = Qa − e this is ½(Σa − aᵀg).
    dual = float(0.5 * (alpha.sum() - float(np.dot(alpha, grad))))
    return BinaryFit(model=model, alphas=alpha, upper=upper, dual_objective=dual, steps=steps)


def train_binary(examples, params: TrainParams) -> BinaryModel:
    return fit_binary(examples, params).model


def _smo_solve(rows: CsrRows, y, upper, params: TrainParams):
    n = y.size
    tol = params.kkt_tolerance
    max_steps = params.max_passes if params.max_passes > 0 else max(10_000, 100 * n)
    row_kernel = RowKernel(rows, params.kernel)
    diag = kernel_diag(rows, params.kernel)
    cache: OrderedDict[int, np.ndarray] = OrderedDict()
    cache_cap = max(2, params.cache_rows)

    def krow(i: int) -> np.ndarray:
        hit = cache.get(i)
        if hit is not None:
            cache.move_to_end(i)
            return hit
        row = row_kernel.row(rows.indices[rows.indptr[i]: rows.indptr[i + 1]])
        cache[i] = row
        if len(cache) > cache_cap:
            cache.popitem(last=False)
        return row

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of ½aᵀQa − eᵀa at a = 0
    pos = y > 0
    step_count = 0

    for step_count in range(max_steps):
        r = -(y * grad)
        at_upper = alpha >= upper
        at_zero = alpha <= 0.0
        up_mask = (pos & ~at_upper) | (~pos & ~at_zero)
        low_mask = (~pos & ~at_upper) | (pos & ~at_zero)
        if not up_mask.any() or not low_mask.any():
            break
        r_up = np.where(up_mask, r, -np.inf)
        i = int(np.argmax(r_up))
        r_low = np.where(low_mask, r, np.inf)
        j = int(np.argmin(r_low))
        gap = r_up[i] - r_low[j]
        if gap <= tol:
            break

        k_i = krow(i)
        k_j = krow(j)
        quad = diag[i] + diag[j] - 2.0 * k_i[j]
        if quad <= 0.0:
            quad = 1e-12
        step = gap / quad
        limit_i = (upper[i] - alpha[i]) if pos[i] else alpha[i]
        limit_j = alpha[j] if pos[j] else (upper[j] - alpha[j])
        step = min(step, limit_i, limit_j)

        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        for idx in (i, j):
            snap = _BOUND_SNAP * max(1.0, upper[idx])
            if alpha[idx] < snap:
                alpha[idx] = 0.0
            elif alpha[idx] > upper[idx] - snap:
                alpha[idx] = upper[idx]
        grad += (step * y) * (k_i - k_j)
    else:
        raise ConvergenceError(
            f"SMO stopped after {max_steps} steps above tolerance {tol:g} "
            f"(n={n}); raise max_passes or loosen kkt_tolerance"
        )

    bias = _recover_bias(alpha, grad, y, upper)
    return alpha, grad, bias, step_count


def _recover_bias(alpha, grad, y, upper) -> float:
    r = -(y * grad)
    pos = y > 0
    up_mask = (pos & (alpha < upper)) | (~pos & (alpha > 0))
    low_mask = (~pos & (alpha < upper)) | (pos & (alpha > 0))
    lo = np.max(r[up_mask]) if up_mask.any() else None
    hi = np.min(r[low_mask]) if low_mask.any() else None
    if lo is None and hi is None:
        return 0.0
    if lo is None:
        return float(hi)
    if hi is None:
        return float(lo)
    return float((lo + hi) / 2.0)


def decision_value(model: BinaryModel, x: SparseVector) -> float:
    """Binary decision value Σ α_i y_i K(sv_i, x) + b."""
    if model.degenerate:
        return float("-inf")
    total = model.bias
    for vec, label, a in zip(model.vectors, model.labels, model.alphas):
        total += a * label * kernel_eval(vec, x, model.kernel)
    return float(total)


def dual_objective(model: BinaryModel) -> float:
    """Value of the dual objective Σα − ½ΣΣ α_i α_j y_i y_j K_ij at the model."""
    if model.degenerate:
        return 0.0
    a = np.asarray(model.alphas)
    ylab = np.asarray(model.labels, dtype=np.float64)
    rows = CsrRows.from_vectors(model.vectors)
    row_kernel = RowKernel(rows, model.kernel)
    coef = a * ylab
    quad = 0.0
    for i in range(rows.n_rows):
        k_i = row_kernel.row(rows.indices[rows.indptr[i]: rows.indptr[i + 1]])
        quad += coef[i] * float(np.dot(coef, k_i))
    return float(a.sum() - 0.5 * quad)


def check_kkt(fit: BinaryFit, examples, tolerance: float):
    """Worst KKT violation per condition for a fitted binary problem.

    Conditions checked for every training example, with margin = y_i f(x_i):
      α_i = 0       =>  margin >= 1 − tol        ("lower")
      0 < α_i < u_i =>  |margin − 1| <= tol      ("free")
      α_i = u_i     =>  margin <= 1 + tol        ("upper")
      always        =>  0 <= α_i <= u_i          ("box")
    All returned values are <= 0 when the model is optimal.
    """
    worst = {"lower": -math.inf, "free": -math.inf, "upper": -math.inf, "box": -math.inf}
    for (vec, label), a_i, u_i in zip(examples, fit.alphas, fit.upper):
        margin = label * decision_value(fit.model, vec)
        snap = _BOUND_SNAP * max(1.0, u_i)
        worst["box"] = max(worst["box"], a_i - u_i, -a_i)
        if a_i <= snap:
            worst["lower"] = max(worst["lower"], (1.0 - tolerance) - margin)
        elif a_i >= u_i - snap:
            worst["upper"] = max(worst["upper"], margin - (1.0 + tolerance))
        else:
            worst["free"] = max(worst["free"], abs(margin - 1.0) - tolerance)
    return worst


@dataclass
class SvmModel:
    """One-vs-all multiclass model over the full tag set (O included, last)."""

    classes: tuple[str, ...]
    binaries: dict[str, BinaryModel]
    vocabulary: FeatureVocabulary | None = None
    config: FeatureConfig | None = None
    version: int = MODEL_VERSION
    _packed: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if tuple(self.classes) != ALL_TAGS:
            raise ValueError(f"classes must be the canonical tag order {ALL_TAGS}")
        missing = [c for c in self.classes if c not in self.binaries]
        if missing:
            raise ValueError(f"missing binary models for {missing}")

    def _packed_for(self, cls: str):
        packed = self._packed.get(cls)
        if packed is None:
            model = self.binaries[cls]
            rows = CsrRows.from_vectors(model.vectors)
            coef = np.asarray(model.alphas) * np.asarray(model.labels, dtype=np.float64)
            packed = (RowKernel(rows, model.kernel), coef)
            self._packed[cls] = packed
        return packed


def train_multiclass(examples, params: TrainParams, costs=None,
                     vocabulary: FeatureVocabulary | None = None,
                     config: FeatureConfig | None = None) -> SvmModel:
    """Train one binary model per class (+1 = class, −1 = rest).

    Every example's cost factor applies in each binary subproblem. Classes
    absent from the data get a degenerate always-negative model.
    """
    if not examples:
        raise ValueError("no training examples")
    present = {tag for _, tag in examples}
    unknown = present - set(ALL_TAGS)
    if unknown:
        raise ValueError(f"unknown class labels: {sorted(unknown)}")
    if len(present) < 2:
        raise ValueError("need at least 2 distinct classes")
    if costs is not None:
        params = replace(params, instance_costs=tuple(costs))
    binaries: dict[str, BinaryModel] = {}
    for cls in ALL_TAGS:
        if cls not in present:
            binaries[cls] = BinaryModel((), (), (), float("-inf"), params.kernel, degenerate=True)
            continue
        signed = [(vec, 1 if tag == cls else -1) for vec, tag in examples]
        binaries[cls] = train_binary(signed, params)
    return SvmModel(ALL_TAGS, binaries, vocabulary=vocabulary, config=config)


def decision_scores(model: SvmModel, x: SparseVector) -> dict[str, float]:
    """Per-class one-vs-all decision values (−inf for degenerate classes)."""
    scores: dict[str, float] = {}
    for cls in model.classes:
        binary = model.binaries[cls]
        if binary.degenerate:
            scores[cls] = float("-inf")
            continue
        row_kernel, coef = model._packed_for(cls)
        if coef.size == 0:
            scores[cls] = float(binary.bias)
        else:
            scores[cls] = float(np.dot(coef, row_kernel.row(x.indices)) + binary.bias)
    return scores


def predict_class(model: SvmModel, x: SparseVector) -> str:
    """Argmax of decision_scores; exact ties go to the first canonical class."""
    scores = decision_scores(model, x)
    best_cls = model.classes[0]
    best = scores[best_cls]
    for cls in model.classes[1:]:
        if scores[cls] > best:
            best = scores[cls]
            best_cls = cls
    return best_cls


def _binary_to_dict(model: BinaryModel) -> dict:
    if model.degenerate:
        return {"degenerate": True}
    return {
        "degenerate": False,
        "bias": model.bias,
        "alphas": list(model.alphas),
        "labels": list(model.labels),
        "rows": [list(v.indices) for v in model.vectors],
    }


def _binary_from_dict(data: dict, kernel: KernelParams) -> BinaryModel:
    if data["degenerate"]:
        return BinaryModel((), (), (), float("-inf"), kernel, degenerate=True)
    return BinaryModel(
        vectors=tuple(SparseVector(tuple(row)) for row in data["rows"]),
        labels=tuple(int(l) for l in data["labels"]),
        alphas=tuple(float(a) for a in data["alphas"]),
        bias=float(data["bias"]),
        kernel=kernel,
    )


def save_model(model: SvmModel, path) -> None:
    """Serialize to a versioned JSON container.

    Key order is fixed (magic and version first) and every collection is
    built in canonical order, so identical models give byte-identical files.
    """
    kernel = model.binaries[model.classes[0]].kernel
    config = None
    if model.config is not None:
        config = {
            "active": list(model.config.active),
            "context_width": model.config.context_width,
            "use_dynamic_tags": model.config.use_dynamic_tags,
        }
    payload = {
        "format": MODEL_MAGIC,
        "version": model.version,
        "kernel": {"kind": kernel.kind, "degree": kernel.degree,
                   "scale": kernel.scale, "offset": kernel.offset},
        "classes": list(model.classes),
        "feature_config": config,
        "vocabulary": model.vocabulary.strings() if model.vocabulary is not None else None,
        "binaries": {cls: _binary_to_dict(model.binaries[cls]) for cls in model.classes},
    }
    atomic_write_text(path, json.dumps(payload, separators=(",", ":")) + "\n")


def load_model(path) -> SvmModel:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: truncated or corrupt model file ({exc})") from exc
    if not isinstance(payload, dict) or payload.get("format") != MODEL_MAGIC:
        raise ModelFormatError(f"{path}: bad magic (not a {MODEL_MAGIC} file)")
    version = payload.get("version")
    if version != MODEL_VERSION:
        raise ModelFormatError(f"{path}: unsupported model format version {version!r}")
    try:
        k = payload["kernel"]
        kernel = KernelParams(kind=k["kind"], degree=int(k["degree"]),
                              scale=float(k["scale"]), offset=float(k["offset"]))
        binaries = {
            cls: _binary_from_dict(data, kernel)
            for cls, data in payload["binaries"].items()
        }
        vocabulary = None
        if payload.get("vocabulary") is not None:
            vocabulary = FeatureVocabulary.from_strings(payload["vocabulary"], frozen=True)
        config = None
        if payload.get("feature_config") is not None:
            fc = payload["feature_config"]
            config = FeatureConfig(
                active=tuple(fc["active"]),
                context_width=int(fc["context_width"]),
                use_dynamic_tags=bool(fc["use_dynamic_tags"]),
            )
        return SvmModel(tuple(payload["classes"]), binaries, vocabulary=vocabulary, config=config)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model payload ({exc})") from exc
