"""
File: ./heattrack/hum/_dual.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import math
from typing import List, Tuple, Optional, Annotated

# External
import numpy as np
from pydantic import Field, BaseModel
from numpy.typing import NDArray
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

# Project
from ._operators import TrackingOperators
from ..grids import Signal, TimeGrid, SpaceGrid
from ..logger import get_logger
from .._errors import ConfigError, IncompatibleGridError

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

# σ relative to ‖w‖ when no smoothing is configured, and the largest accepted ratio
_SIGMA_SCALE = 1e-7
_SIGMA_BOUND = 1e-6
_SIGMA_FLOOR = 1e-12
# Doublings allowed while bracketing the line-search minimum
_BRACKET_DOUBLINGS = 200


class DualConfig(BaseModel):
    """
    Settings of the dual minimization J(f) = ½‖B*f‖² - ⟨f, w⟩ + ε‖f‖.
    """

    class Config:
        allow_mutation = False

    xgrid: Annotated[SpaceGrid, Field(description="Space grid of the rod")]
    tgrid: Annotated[TimeGrid, Field(description="Time grid of f, w and the control")]
    eps: Annotated[float, Field(description="Tracking slack ε", ge=0)] = 0.0
    smoothing_sigma: Annotated[
        Optional[float],
        Field(description="σ in ε·sqrt(‖f‖² + σ²), 1e-7·‖w‖ when omitted", gt=0),
    ] = None
    max_iters: Annotated[int, Field(description="Iteration cap", ge=1)] = 500
    grad_tol: Annotated[
        float, Field(description="Stop once ‖∇J‖ <= grad_tol·‖w‖", gt=0)
    ] = 1e-6

    def sigma_for(self, w_norm: float) -> float:
        """σ for a target of norm ``w_norm``

        Raises:
            ConfigError: configured σ above 1e-6·‖w‖ (1e-12 for a zero target)

        """
        if self.smoothing_sigma is not None:
            limit = max(_SIGMA_BOUND * w_norm, _SIGMA_FLOOR)
            if self.smoothing_sigma > limit:
                raise ConfigError(
                    f"smoothing_sigma={self.smoothing_sigma} exceeds {limit} = 1e-6·‖w‖"
                )
            return self.smoothing_sigma
        return _SIGMA_SCALE * w_norm if w_norm > 0 else _SIGMA_FLOOR


class HUMState(BaseModel):
    """
    Outcome of the dual minimization: f, the control B*f and the iteration history.
    """

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True

    f: Annotated[Signal, Field(description="Dual variable on x = 0")]
    Bstar_p: Annotated[Signal, Field(description="Control B*f = ∂_x p_f(·, L)")]
    J_value: Annotated[float, Field(description="Final value of J")]
    grad_norm: Annotated[float, Field(description="Final ‖∇J‖")]
    iterations: Annotated[int, Field(description="Iterations performed")]
    converged: Annotated[bool, Field(description="Whether grad_tol was reached")]
    smoothing_sigma: Annotated[float, Field(description="σ used for the ε term")]
    J_trace: Annotated[List[float], Field(description="J after every accepted iteration")]
    cg_condition_estimate: Annotated[
        Optional[float], Field(description="Ritz value ratio of the Gramian, ε = 0 only")
    ] = None


def _operators_for(cfg: DualConfig, w: Signal) -> TrackingOperators:
    if w.grid != cfg.tgrid:
        raise IncompatibleGridError("Target must live on the configured time grid")
    return TrackingOperators(cfg.xgrid, cfg.tgrid)


def _objective(
    ops: TrackingOperators,
    f: FloatArray,
    gram_f: FloatArray,
    w: FloatArray,
    eps: float,
    sigma: float,
) -> Tuple[float, FloatArray]:
    smooth_norm = math.sqrt(ops.inner(f, f) + sigma**2)
    value = 0.5 * ops.inner(gram_f, f) - ops.inner(f, w) + eps * smooth_norm
    return value, gram_f - w + eps * f / smooth_norm


def eval_J(f: Signal, w: Signal, cfg: DualConfig) -> Tuple[float, Signal]:
    """J(f) = ½⟨Λf, f⟩ - ⟨f, w⟩ + ε·sqrt(⟨f, f⟩ + σ²) and its gradient.

    Inner products are trapezoid-weighted, and the gradient is taken in that inner product:
    Λf - w + ε·f/sqrt(⟨f, f⟩ + σ²).

    Raises:
        IncompatibleGridError: f or w off the configured time grid
        ConfigError: smoothing_sigma too large for w

    """
    ops = _operators_for(cfg, w)
    gram_f = ops.apply_gramian(f).values
    sigma = cfg.sigma_for(math.sqrt(ops.inner(w.values, w.values)))
    value, gradient = _objective(ops, f.values, gram_f, w.values, cfg.eps, sigma)
    return value, Signal(cfg.tgrid, gradient)


def _ritz_condition(alphas: List[float], betas: List[float]) -> Optional[float]:
    """Extreme Ritz values of Λ from the Lanczos matrix that CG builds implicitly"""
    if not alphas:
        return None
    if len(alphas) == 1:
        return 1.0
    a = np.asarray(alphas)
    diagonal = 1.0 / a
    diagonal[1:] += np.asarray(betas[: a.size - 1]) / a[:-1]
    off = np.sqrt(np.asarray(betas[: a.size - 1])) / a[:-1]
    ritz = eigvalsh_tridiagonal(diagonal, off)
    if ritz[0] <= 0:
        return math.inf
    logger.debug("Ritz values of the Gramian in [%s, %s]", ritz[0], ritz[-1])
    return float(ritz[-1] / ritz[0])


def _conjugate_gradient(
    ops: TrackingOperators, w: FloatArray, cfg: DualConfig
) -> Tuple[FloatArray, FloatArray, List[float], int, bool, Optional[float]]:
    """CG on Λf = w, stopped early at grad_tol: the iteration count regularizes"""
    f = np.zeros_like(w)
    gram_f = np.zeros_like(w)
    residual = w.copy()
    direction = residual.copy()
    rr = ops.inner(residual, residual)
    target = (cfg.grad_tol * math.sqrt(ops.inner(w, w))) ** 2

    trace = [0.0]
    alphas: List[float] = []
    betas: List[float] = []
    iterations = 0
    while rr > target and iterations < cfg.max_iters:
        gram_d = ops.apply_gramian(Signal(ops.tgrid, direction)).values
        curvature = ops.inner(direction, gram_d)
        if not curvature > 0:
            logger.warning("CG stopped on non-positive curvature %s", curvature)
            break

        alpha = rr / curvature
        f = f + alpha * direction
        gram_f = gram_f + alpha * gram_d
        residual = residual - alpha * gram_d
        new_rr = ops.inner(residual, residual)
        beta = new_rr / rr
        direction = residual + beta * direction
        rr = new_rr
        alphas.append(alpha)
        betas.append(beta)
        iterations += 1
        trace.append(0.5 * ops.inner(gram_f, f) - ops.inner(f, w))

    return f, gram_f, trace, iterations, rr <= target, _ritz_condition(alphas, betas)


def _line_search(
    ops: TrackingOperators,
    f: FloatArray,
    direction: FloatArray,
    gram_d: FloatArray,
    gradient_smooth: FloatArray,
    eps: float,
    sigma: float,
) -> float:
    """Exact minimizer along the direction; J restricted to the line is convex in the step"""
    dd = ops.inner(direction, direction)
    fd = ops.inner(f, direction)
    ff = ops.inner(f, f)
    curvature = ops.inner(direction, gram_d)
    slope = ops.inner(gradient_smooth, direction)

    def derivative(step: float) -> float:
        norm = math.sqrt(max(ff + 2.0 * step * fd + step**2 * dd, 0.0) + sigma**2)
        return step * curvature + slope + eps * (fd + step * dd) / norm

    if derivative(0.0) >= 0:
        return 0.0
    upper = -derivative(0.0) / max(curvature + eps * dd / math.sqrt(ff + sigma**2), 1e-300)
    for _ in range(_BRACKET_DOUBLINGS):
        if derivative(upper) >= 0:
            break
        upper *= 2.0
    else:
        return upper
    return float(brentq(derivative, 0.0, upper, xtol=1e-14 * upper, rtol=1e-12))


def _nonlinear_cg(
    ops: TrackingOperators, w: FloatArray, cfg: DualConfig, sigma: float
) -> Tuple[FloatArray, FloatArray, List[float], int, bool]:
    """Polak-Ribière conjugate gradient on the smoothed J, restarted when not a descent"""
    f = np.zeros_like(w)
    gram_f = np.zeros_like(w)
    value, gradient = _objective(ops, f, gram_f, w, cfg.eps, sigma)
    direction = -gradient
    target = cfg.grad_tol * math.sqrt(ops.inner(w, w))

    trace = [value]
    iterations = 0
    converged = math.sqrt(ops.inner(gradient, gradient)) <= target
    while not converged and iterations < cfg.max_iters:
        if ops.inner(gradient, direction) >= 0:
            direction = -gradient
        gram_d = ops.apply_gramian(Signal(ops.tgrid, direction)).values
        step = _line_search(ops, f, direction, gram_d, gram_f - w, cfg.eps, sigma)
        if step == 0.0:
            break

        f = f + step * direction
        gram_f = gram_f + step * gram_d
        new_value, new_gradient = _objective(ops, f, gram_f, w, cfg.eps, sigma)
        if new_value > value + 1e-14 * max(1.0, abs(value)):
            logger.warning("Line search increased J by %s, stopping", new_value - value)
            f = f - step * direction
            gram_f = gram_f - step * gram_d
            break

        beta = max(
            0.0,
            ops.inner(new_gradient, new_gradient - gradient) / ops.inner(gradient, gradient),
        )
        direction = -new_gradient + beta * direction
        value, gradient = new_value, new_gradient
        iterations += 1
        trace.append(value)
        converged = math.sqrt(ops.inner(gradient, gradient)) <= target

    return f, gram_f, trace, iterations, converged


def minimize_J(w: Signal, cfg: DualConfig) -> HUMState:
    """Minimize J over f; the control of minimal norm is then B*f.

    ε = 0 runs linear CG on Λf = w, stopped at grad_tol or max_iters, and reports the Ritz
    condition estimate. ε > 0 runs nonlinear CG on the σ-smoothed functional. Reaching
    max_iters is reported through ``converged``, not raised.

    Raises:
        IncompatibleGridError: w off the configured time grid
        ConfigError: smoothing_sigma too large for w

    """
    ops = _operators_for(cfg, w)
    target = w.values
    sigma = cfg.sigma_for(math.sqrt(ops.inner(target, target)))

    condition: Optional[float] = None
    if cfg.eps == 0.0:
        f, gram_f, trace, iterations, converged, condition = _conjugate_gradient(ops, target, cfg)
    else:
        f, gram_f, trace, iterations, converged = _nonlinear_cg(ops, target, cfg, sigma)

    value, gradient = _objective(ops, f, gram_f, target, cfg.eps, sigma)
    grad_norm = math.sqrt(ops.inner(gradient, gradient))
    f_signal = Signal(cfg.tgrid, f)
    logger.info(
        "Dual minimization eps=%s: %d iterations, |grad J|=%s, converged=%s",
        cfg.eps,
        iterations,
        grad_norm,
        converged,
    )
    return HUMState(
        f=f_signal,
        Bstar_p=ops.apply_Bstar(f_signal),
        J_value=value,
        grad_norm=grad_norm,
        iterations=iterations,
        converged=converged,
        smoothing_sigma=sigma,
        J_trace=trace,
        cg_condition_estimate=condition,
    )


__all__ = ("DualConfig", "HUMState", "eval_J", "minimize_J")
