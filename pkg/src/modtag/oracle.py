"""Verification oracle: explicit-feature-map SVM solved without kernels.

For the quadratic kernel (s<x,y> + c0)^2 the explicit map

    Φ(x) = [ c0,  sqrt(2*s*c0)*x_k ...,  s*x_k^2 ...,  sqrt(2)*s*x_k*x_l (k<l) ... ]

satisfies <Φ(x), Φ(y)> = K(x, y), turning the kernel problem into a linear
one. This module builds Φ densely and solves

    min ½||w||² + C Σ c_i · hinge(y_i (w·Φ(x_i) + b))

via its box-and-hyperplane dual using accelerated projected gradient with a
fixed deterministic schedule, then recovers the dense primal (w, b). It
shares no code with the SMO/kernel path, so objective agreement between the
two (strong duality at the optimum) certifies both: the oracle's primal
value upper-bounds and the SMO dual value lower-bounds the shared optimum.

Guarded to tiny scale: the map is quadratic in the vocabulary size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import LINEAR, POLYNOMIAL, KernelParams
from .svm import TrainParams, _cost_bounds

MAX_EXAMPLES = 200
MAX_COLUMNS = 200

_MAX_ITERATIONS = 20_000
_CHECK_EVERY = 25
_STALL_CHECKS = 40  # stop after this many checks without improvement


def explicit_map_dim(n_cols: int, kernel: KernelParams) -> int:
    if kernel.kind == LINEAR:
        return n_cols
    return 1 + n_cols + n_cols * (n_cols + 1) // 2


def explicit_feature_map(vectors, n_cols: int, kernel: KernelParams) -> np.ndarray:
    """Dense Φ for binary indicator vectors, one row per input vector.

    Indices at or beyond n_cols cannot occur in the map and raise.
    """
    if kernel.kind == POLYNOMIAL and kernel.degree != 2:
        raise ValueError("explicit map implemented for degree 2 only")
    n = len(vectors)
    for vec in vectors:
        if vec.indices and vec.indices[-1] >= n_cols:
            raise ValueError(f"index {vec.indices[-1]} outside map space of {n_cols} columns")
    if kernel.kind == LINEAR:
        phi = np.zeros((n, n_cols))
        for r, vec in enumerate(vectors):
            for k in vec.indices:
                phi[r, k] = 1.0
        return phi
    s, c0 = kernel.scale, kernel.offset
    phi = np.zeros((n, explicit_map_dim(n_cols, kernel)))
    phi[:, 0] = c0
    lin_scale = math.sqrt(2.0 * s * c0) if s * c0 > 0 else 0.0
    pair_scale = math.sqrt(2.0) * s

    def pair_column(k: int, l: int) -> int:
        # (k, l) with k <= l, row-major over the upper triangle
        return 1 + n_cols + k * n_cols - k * (k - 1) // 2 + (l - k)

    for r, vec in enumerate(vectors):
        idx = vec.indices
        for k in idx:
            phi[r, 1 + k] = lin_scale
            phi[r, pair_column(k, k)] = s
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                phi[r, pair_column(idx[a], idx[b])] = pair_scale
    return phi


def _project_box_hyperplane(v, y, upper):
    """Euclidean projection onto {a : 0 <= a <= u, yᵀa = 0} (y_i in ±1).

    a(θ) = clip(v − θy, 0, u) makes g(θ) = yᵀa(θ) continuous, piecewise
    linear and non-increasing; the root is found exactly by breakpoint scan.
    """
    thetas = np.unique(np.concatenate([v * y, (v - upper) * y]))
    candidates = np.clip(v[None, :] - thetas[:, None] * y[None, :], 0.0, upper[None, :])
    values = candidates @ y
    if values.size == 1:
        theta = thetas[0]
    elif values[-1] > 0.0:
        theta = thetas[-1]
    elif values[0] < 0.0:
        theta = thetas[0]
    else:
        hi = int(np.searchsorted(-values, 0.0, side="left"))
        hi = min(max(hi, 1), values.size - 1)
        lo = hi - 1
        g_lo, g_hi = values[lo], values[hi]
        if g_lo <= 0.0:
            theta = thetas[lo]
        elif g_lo == g_hi:
            theta = thetas[lo]
        else:
            theta = thetas[lo] + g_lo * (thetas[hi] - thetas[lo]) / (g_lo - g_hi)
    return np.clip(v - theta * y, 0.0, upper)


@dataclass(frozen=True)
class OracleSolution:
    """Dense primal solution over the explicit map."""

    weights: np.ndarray
    bias: float
    n_cols: int
    kernel: KernelParams

    def decision_values(self, vectors) -> np.ndarray:
        phi = explicit_feature_map(vectors, self.n_cols, self.kernel)
        return phi @ self.weights + self.bias


def primal_oracle_train(examples, params: TrainParams) -> OracleSolution:
    """Solve the explicit-map primal at tiny scale.

    Deterministic: fixed start, fixed step rule (1/L with L from the exact
    largest eigenvalue), function-restart acceleration, and a fixed cap with
    a stall cutoff once the dual value stops improving.
    """
    n = len(examples)
    if n == 0:
        raise ValueError("no examples")
    if n > MAX_EXAMPLES:
        raise ValueError(f"oracle guard: {n} examples exceeds {MAX_EXAMPLES}")
    vectors = [v for v, _ in examples]
    labels = [int(l) for _, l in examples]
    if any(l not in (-1, 1) for l in labels):
        raise ValueError("labels must be -1 or +1")
    if len(set(labels)) < 2:
        raise ValueError("training data contains a single class")
    y = np.asarray(labels, dtype=np.float64)
    n_cols = max((v.indices[-1] + 1 for v in vectors if v.indices), default=0)
    if n_cols > MAX_COLUMNS:
        raise ValueError(f"oracle guard: {n_cols} columns exceeds {MAX_COLUMNS}")
    upper = _cost_bounds(n, params)

    phi = explicit_feature_map(vectors, n_cols, params.kernel)
    z = phi * y[:, None]
    gram = z @ z.T
    lipschitz = float(np.linalg.eigvalsh(gram)[-1])
    if lipschitz <= 0:
        lipschitz = 1.0

    alpha = np.zeros(n)
    momentum = alpha.copy()
    t_acc = 1.0
    best_alpha = alpha.copy()
    best_value = -math.inf
    stalled = 0
    for it in range(_MAX_ITERATIONS):
        grad = gram @ momentum - 1.0
        new_alpha = _project_box_hyperplane(momentum - grad / lipschitz, y, upper)
        t_next = (1.0 + math.sqrt(1.0 + 4.0 * t_acc * t_acc)) / 2.0
        momentum = new_alpha + ((t_acc - 1.0) / t_next) * (new_alpha - alpha)
        alpha = new_alpha
        t_acc = t_next
        if it % _CHECK_EVERY == 0 or it == _MAX_ITERATIONS - 1:
            value = float(alpha.sum() - 0.5 * (alpha @ (gram @ alpha)))
            if not math.isfinite(best_value) or value > best_value + 1e-14 * (1.0 + abs(best_value)):
                best_value = value
                best_alpha = alpha.copy()
                stalled = 0
            else:
                stalled += 1
                # restart acceleration from the best point seen
                momentum = best_alpha.copy()
                alpha = best_alpha.copy()
                t_acc = 1.0
                if stalled >= _STALL_CHECKS:
                    break

    alpha = best_alpha
    weights = z.T @ alpha
    bias = _recover_bias(phi, y, alpha, upper, weights)
    return OracleSolution(weights=weights, bias=bias, n_cols=n_cols, kernel=params.kernel)


def _recover_bias(phi, y, alpha, upper, weights) -> float:
    margins = phi @ weights
    band = 1e-6 * np.maximum(1.0, upper)
    free = (alpha > band) & (alpha < upper - band)
    if free.any():
        return float(np.mean(y[free] - margins[free]))
    lowers, uppers = [], []
    for y_i, m_i, a_i, u_i, b_i in zip(y, margins, alpha, upper, band):
        at_zero = a_i <= b_i
        if y_i > 0:
            (lowers if at_zero else uppers).append(1.0 - m_i)
        else:
            (uppers if at_zero else lowers).append(-1.0 - m_i)
    if not lowers and not uppers:
        return 0.0
    if not lowers:
        return float(min(uppers))
    if not uppers:
        return float(max(lowers))
    return float((max(lowers) + min(uppers)) / 2.0)


def primal_objective(examples, params: TrainParams, solution: OracleSolution) -> float:
    """½||w||² + C Σ c_i hinge_i at the oracle's solution."""
    y = np.asarray([float(l) for _, l in examples])
    weighted_c = _cost_bounds(len(examples), params)  # = C * c_i
    values = solution.decision_values([v for v, _ in examples])
    hinge = np.maximum(0.0, 1.0 - y * values)
    return float(0.5 * np.dot(solution.weights, solution.weights) + np.dot(weighted_c, hinge))
