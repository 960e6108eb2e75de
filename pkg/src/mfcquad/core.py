"""Ultra-local model building blocks: disturbance estimator and iP/iPD laws.

A single-input single-output loop is approximated over short horizons by

    y^(m) = F(t) + alpha * u

where F lumps every unmodeled effect and disturbance. The controller
cancels a sliding-window estimate of F and imposes linear error dynamics
on top. Everything here is scalar and per-axis; composition into a
multi-axis controller lives in :mod:`mfcquad.attitude`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field


def _require_finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class UltraLocalConfig:
    """Per-axis configuration: model order, input scaling, gains, estimator window.

    ``kd`` is only meaningful for ``order=2`` (iPD); an order-1 (iP) config
    with a nonzero ``kd`` is rejected outright rather than silently ignored.
    """

    order: int = 2
    alpha: float = 1.0
    sample_period: float = 0.004
    window_len: int = 5
    kp: float = 0.0
    kd: float = 0.0

    def __post_init__(self) -> None:
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if not math.isfinite(self.alpha) or self.alpha == 0.0:
            raise ValueError(f"alpha must be finite and nonzero, got {self.alpha!r}")
        if not (math.isfinite(self.sample_period) and self.sample_period > 0.0):
            raise ValueError(f"sample_period must be > 0, got {self.sample_period!r}")
        if self.window_len < 1:
            raise ValueError(f"window_len must be >= 1, got {self.window_len}")
        if self.kp < 0.0 or self.kd < 0.0:
            raise ValueError("gains must be >= 0")
        if self.order == 1 and self.kd != 0.0:
            raise ValueError("order-1 (iP) config must have kd = 0")


@dataclass
class AxisControllerState:
    """Mutable per-axis estimator state.

    ``f_window`` holds the most recent instantaneous F samples; ``f_hat`` is
    always the arithmetic mean of whatever the window currently contains
    (0.0 while empty). ``prev_rate`` stores the previous rate sample for the
    order-2 backward difference; ``None`` until the first sample arrives.
    """

    window_len: int
    f_window: deque = field(init=False)
    prev_rate: float | None = None
    f_hat: float = 0.0

    def __post_init__(self) -> None:
        if self.window_len < 1:
            raise ValueError(f"window_len must be >= 1, got {self.window_len}")
        self.f_window = deque(maxlen=self.window_len)

    @property
    def filled(self) -> int:
        return len(self.f_window)

    def reset(self) -> None:
        self.f_window.clear()
        self.prev_rate = None
        self.f_hat = 0.0


@dataclass(frozen=True)
class ControlStepInput:
    """One step's worth of signals for an iP/iPD evaluation.

    ``y`` is the measured output (a body rate, for this package), ``y_dot``
    the derivative channel paired with it (order 2 only). The three
    reference fields carry the trajectory value and the references for the
    derivative channels; which physical signal feeds each slot is the
    caller's wiring decision.
    """

    y: float
    y_ref: float
    y_dot: float = 0.0
    y_ref_dot: float = 0.0
    y_ref_ddot: float = 0.0
    u_prev: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(
            y=self.y,
            y_ref=self.y_ref,
            y_dot=self.y_dot,
            y_ref_dot=self.y_ref_dot,
            y_ref_ddot=self.y_ref_ddot,
            u_prev=self.u_prev,
        )


def estimate_f(
    state: AxisControllerState,
    config: UltraLocalConfig,
    y_deriv_m: float,
    u_prev: float,
) -> float:
    """Push one instantaneous F sample and return the refreshed window mean.

    The sample is ``y_deriv_m - alpha * u_prev`` where ``y_deriv_m`` is the
    model-order derivative of the output over the last interval and
    ``u_prev`` the input held during that interval (one-step-delayed,
    zero-order hold). The uniform-weight mean over the window is the FIR
    that knocks down measurement noise.
    """
    _require_finite(y_deriv_m=y_deriv_m, u_prev=u_prev)
    state.f_window.append(y_deriv_m - config.alpha * u_prev)
    state.f_hat = sum(state.f_window) / len(state.f_window)
    return state.f_hat


def backward_difference(rate_now: float, rate_prev: float, period: float) -> float:
    """First-order backward difference (rate_now - rate_prev) / period."""
    if not (math.isfinite(period) and period > 0.0):
        raise ValueError(f"period must be > 0, got {period!r}")
    _require_finite(rate_now=rate_now, rate_prev=rate_prev)
    return (rate_now - rate_prev) / period


def ipd_step(inp: ControlStepInput, f_hat: float, config: UltraLocalConfig) -> float:
    """Order-2 (iPD) control law, unsaturated.

    u = -(f_hat - y_ref_ddot + kp*e + kd*e_dot) / alpha
    with e = y - y_ref and e_dot = y_dot - y_ref_dot.
    """
    if config.order != 2:
        raise ValueError("ipd_step requires an order-2 config")
    _require_finite(f_hat=f_hat)
    e = inp.y - inp.y_ref
    e_dot = inp.y_dot - inp.y_ref_dot
    return -(f_hat - inp.y_ref_ddot + config.kp * e + config.kd * e_dot) / config.alpha


def ip_step(inp: ControlStepInput, f_hat: float, config: UltraLocalConfig) -> float:
    """Order-1 (iP) control law, unsaturated.

    u = -(f_hat - y_ref_dot + kp*e) / alpha  with e = y - y_ref.
    """
    if config.order != 1:
        raise ValueError("ip_step requires an order-1 config")
    _require_finite(f_hat=f_hat)
    e = inp.y - inp.y_ref
    return -(f_hat - inp.y_ref_dot + config.kp * e) / config.alpha


def saturate(u: float, lo: float, hi: float) -> float:
    """Clamp ``u`` to the closed interval [lo, hi]."""
    if not lo < hi:
        raise ValueError(f"saturation bounds must satisfy lo < hi, got [{lo}, {hi}]")
    if u < lo:
        return lo
    if u > hi:
        return hi
    return u
