"""Three-axis body-rate controller and motor mixing.

Per-axis monovariable loops: iPD on roll and pitch (order-2 ultra-local
model), iP on yaw (order 1, appropriate because yaw is drag-dominated).
Gyro readings pass through a one-pole complementary filter; the three axis
commands are saturated, mixed with the pilot throttle into four motor
commands, and clamped to [0, 1].

Channel wiring, spelled out once: the controlled output y is the body
rate, the tracking error is rate minus rate reference, and the model's
top channel on every axis is the once-differenced filtered rate (an
angular acceleration), so the matching feedforward is the rate
reference's first analytic derivative. Roll and pitch run the order-2 law
(proportional plus derivative on the error); yaw runs the order-1 law,
which drops the derivative term, enough because yaw is already heavily
damped by drag.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    AxisControllerState,
    ControlStepInput,
    UltraLocalConfig,
    backward_difference,
    estimate_f,
    ip_step,
    ipd_step,
    saturate,
)

RATE_LIMIT = 400.0  # deg/s, sanity bound on reference magnitudes

AXES = ("roll", "pitch", "yaw")


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class RateReference:
    """Commanded body rates plus their analytic derivatives.

    Rates in deg/s; ``*_accel`` are their first derivatives (deg/s^2) and
    ``*_jerk`` their second (deg/s^3). Derivatives come from the reference
    generator analytically so the feedforward stays noise-free.
    """

    roll_rate: float = 0.0
    pitch_rate: float = 0.0
    yaw_rate: float = 0.0
    roll_accel: float = 0.0
    pitch_accel: float = 0.0
    yaw_accel: float = 0.0
    roll_jerk: float = 0.0
    pitch_jerk: float = 0.0
    yaw_jerk: float = 0.0

    def validate(self, limit: float = RATE_LIMIT) -> None:
        if not self.is_finite():
            raise ValueError("reference contains non-finite values")
        for name in ("roll_rate", "pitch_rate", "yaw_rate"):
            v = getattr(self, name)
            if abs(v) > limit:
                raise ValueError(f"{name}={v} exceeds rate limit {limit} deg/s")

    def is_finite(self) -> bool:
        return _finite(
            self.roll_rate, self.pitch_rate, self.yaw_rate,
            self.roll_accel, self.pitch_accel, self.yaw_accel,
            self.roll_jerk, self.pitch_jerk, self.yaw_jerk,
        )


@dataclass(frozen=True)
class GyroReading:
    """Body-frame angular rates in deg/s at one sample instant."""

    roll_rate: float
    pitch_rate: float
    yaw_rate: float
    timestamp: int = 0

    def is_finite(self) -> bool:
        return _finite(self.roll_rate, self.pitch_rate, self.yaw_rate)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.roll_rate, self.pitch_rate, self.yaw_rate)


@dataclass(frozen=True)
class MotorCommands:
    """Normalized motor commands, each in [0, 1] once mixed and clamped."""

    u1: float
    u2: float
    u3: float
    u4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.u1, self.u2, self.u3, self.u4)


class ComplementaryFilterState:
    """One-pole blend: out = lam*raw + (1-lam)*previous output, per axis.

    Seeds itself with the first raw reading so there is no startup step.
    """

    def __init__(self, lam: float, last_output: tuple[float, float, float] | None = None):
        if not 0.0 < lam <= 1.0:
            raise ValueError(f"lambda must be in (0, 1], got {lam}")
        self.lam = lam
        self.last_output = last_output

    def reset(self) -> None:
        self.last_output = None


def filter_gyro(state: ComplementaryFilterState, raw: GyroReading) -> GyroReading:
    """Blend the raw reading with the previous filter output; update state."""
    if not raw.is_finite():
        raise ValueError("non-finite gyro reading")
    if state.last_output is None:
        out = raw.as_tuple()
    else:
        lam = state.lam
        out = tuple(
            lam * r + (1.0 - lam) * p for r, p in zip(raw.as_tuple(), state.last_output)
        )
    state.last_output = out
    return GyroReading(out[0], out[1], out[2], timestamp=raw.timestamp)


def mix_unclamped(
    u_t: float, u_phi: float, u_theta: float, u_psi: float
) -> tuple[float, float, float, float]:
    """Raw mixer matrix, before the per-motor [0, 1] clamp.

    Motors 2 and 4 sit on the roll arms and spin clockwise; 1 and 3 sit on
    the pitch arms and spin counter-clockwise. Positive u_phi rolls right
    (motor 4 up, motor 2 down), positive u_theta pitches forward (3 up,
    1 down), positive u_psi yaws counter-clockwise (clockwise pair up).
    """
    return (
        u_t - u_theta - u_psi,
        u_t - u_phi + u_psi,
        u_t + u_theta - u_psi,
        u_t + u_phi + u_psi,
    )


def mix(u_t: float, u_phi: float, u_theta: float, u_psi: float) -> MotorCommands:
    """Mix throttle plus axis commands into four motor commands in [0, 1]."""
    if not _finite(u_t, u_phi, u_theta, u_psi):
        raise ValueError("non-finite mixer input")
    raw = mix_unclamped(u_t, u_phi, u_theta, u_psi)
    return MotorCommands(*(min(1.0, max(0.0, u)) for u in raw))


# Default input scalings. The ultra-local model only works when y^(m), F,
# and alpha*u share an order of magnitude; with rates in deg/s and axis
# commands in normalized motor units the differenced-rate channel sits in
# the thousands of deg/s^2 per unit command, so alpha must live there
# too. Precision is pointless (the estimator absorbs the residual
# (g - alpha)*u); the order of magnitude is what keeps the commands off
# the saturation rails.
ALPHA_ROLL_PITCH = 4000.0  # deg/s^2 per unit axis command
ALPHA_YAW = 1000.0  # deg/s^2 per unit axis command


def _default_axis_configs(loop_hz: float, window_seconds: float) -> dict[str, UltraLocalConfig]:
    period = 1.0 / loop_hz
    window_len = max(1, round(window_seconds * loop_hz))
    return {
        "roll": UltraLocalConfig(order=2, alpha=ALPHA_ROLL_PITCH, sample_period=period,
                                 window_len=window_len, kp=3.0, kd=0.096),
        "pitch": UltraLocalConfig(order=2, alpha=ALPHA_ROLL_PITCH, sample_period=period,
                                  window_len=window_len, kp=2.7, kd=0.096),
        "yaw": UltraLocalConfig(order=1, alpha=ALPHA_YAW, sample_period=period,
                                window_len=window_len, kp=2.7, kd=0.0),
    }


@dataclass
class ControllerConfig:
    """Full three-axis controller configuration; defaults are the stock gains."""

    loop_hz: float = 250.0
    sat: float = 0.25
    lam: float = 0.7
    axes: dict[str, UltraLocalConfig] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.loop_hz <= 0.0:
            raise ValueError("loop_hz must be > 0")
        if self.sat <= 0.0:
            raise ValueError("sat must be > 0")
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("lambda must be in (0, 1]")
        if not self.axes:
            self.axes = _default_axis_configs(self.loop_hz, 0.02)
        missing = [a for a in AXES if a not in self.axes]
        if missing:
            raise ValueError(f"missing axis config sections: {missing}")

    @property
    def dt(self) -> float:
        return 1.0 / self.loop_hz

    @classmethod
    def from_text(cls, text: str) -> "ControllerConfig":
        """Parse the plain-text controller schema (see README for the keys)."""
        parser = configparser.ConfigParser()
        parser.read_string(text)
        ctrl = parser["controller"] if parser.has_section("controller") else {}
        kind = str(ctrl.get("type", "mfc")).strip().lower()
        if kind != "mfc":
            raise ValueError(f"expected controller type 'mfc', got {kind!r}")
        loop_hz = float(ctrl.get("loop_hz", 250.0))
        sat = float(ctrl.get("sat", 0.25))
        lam = float(ctrl.get("lambda", 0.7))
        defaults = _default_axis_configs(loop_hz, 0.02)
        axes = {}
        for axis in AXES:
            base = defaults[axis]
            sec = parser[axis] if parser.has_section(axis) else {}
            window_seconds = float(sec.get("window_seconds", base.window_len / loop_hz))
            axes[axis] = UltraLocalConfig(
                order=int(sec.get("order", base.order)),
                alpha=float(sec.get("alpha", base.alpha)),
                sample_period=1.0 / loop_hz,
                window_len=max(1, round(window_seconds * loop_hz)),
                kp=float(sec.get("kp", base.kp)),
                kd=float(sec.get("kd", base.kd)),
            )
        return cls(loop_hz=loop_hz, sat=sat, lam=lam, axes=axes)

    @classmethod
    def from_file(cls, path: str | Path) -> "ControllerConfig":
        return cls.from_text(Path(path).read_text())


class RateController:
    """Stateful three-axis rate controller: filter, estimate, control, mix.

    One instance per vehicle loop; step it serially at the configured
    cadence. All state needed for telemetry (filtered rates, disturbance
    estimates, saturated axis commands) is exposed as ``last_*``.
    """

    def __init__(self, config: ControllerConfig | None = None):
        self.config = config or ControllerConfig()
        self.filter = ComplementaryFilterState(self.config.lam)
        self.states = {
            axis: AxisControllerState(self.config.axes[axis].window_len) for axis in AXES
        }
        self.prev_commands = {axis: 0.0 for axis in AXES}
        self.last_filtered = (0.0, 0.0, 0.0)
        self.last_commands = (0.0, 0.0, 0.0)
        self.fault_count = 0

    def reset(self) -> None:
        self.filter.reset()
        for st in self.states.values():
            st.reset()
        self.prev_commands = {axis: 0.0 for axis in AXES}
        self.last_filtered = (0.0, 0.0, 0.0)
        self.last_commands = (0.0, 0.0, 0.0)
        self.fault_count = 0

    @property
    def f_hats(self) -> tuple[float, float, float]:
        return tuple(self.states[axis].f_hat for axis in AXES)

    def _neutral(self, throttle: float) -> MotorCommands:
        self.fault_count += 1
        level = min(1.0, max(0.0, throttle))
        return MotorCommands(level, level, level, level)

    def control_step(
        self, ref: RateReference, gyro: GyroReading, throttle: float
    ) -> MotorCommands:
        """One 250 Hz tick: returns the four clamped motor commands.

        Any non-finite reference or gyro value trips the fail-neutral path:
        all motors at the throttle level, controller state untouched.
        """
        if not math.isfinite(throttle):
            raise ValueError(f"throttle must be finite, got {throttle!r}")
        if not (ref.is_finite() and gyro.is_finite()):
            return self._neutral(throttle)

        cfg = self.config
        filt = filter_gyro(self.filter, gyro)
        rates = {"roll": filt.roll_rate, "pitch": filt.pitch_rate, "yaw": filt.yaw_rate}
        refs = {
            "roll": (ref.roll_rate, ref.roll_accel),
            "pitch": (ref.pitch_rate, ref.pitch_accel),
            "yaw": (ref.yaw_rate, ref.yaw_accel),
        }

        commands = {}
        for axis in AXES:
            axis_cfg = cfg.axes[axis]
            state = self.states[axis]
            rate = rates[axis]
            ref_rate, ref_accel = refs[axis]
            u_prev = self.prev_commands[axis]

            prev = state.prev_rate if state.prev_rate is not None else rate
            rate_dot = backward_difference(rate, prev, axis_cfg.sample_period)
            f_hat = estimate_f(state, axis_cfg, rate_dot, u_prev)
            if axis_cfg.order == 2:
                inp = ControlStepInput(
                    y=rate, y_ref=ref_rate,
                    y_dot=rate_dot, y_ref_dot=ref_accel,
                    y_ref_ddot=ref_accel, u_prev=u_prev,
                )
                u = ipd_step(inp, f_hat, axis_cfg)
            else:
                inp = ControlStepInput(
                    y=rate, y_ref=ref_rate,
                    y_ref_dot=ref_accel, u_prev=u_prev,
                )
                u = ip_step(inp, f_hat, axis_cfg)

            state.prev_rate = rate
            commands[axis] = saturate(u, -cfg.sat, cfg.sat)

        self.prev_commands = commands
        self.last_filtered = (rates["roll"], rates["pitch"], rates["yaw"])
        self.last_commands = (commands["roll"], commands["pitch"], commands["yaw"])
        return mix(throttle, commands["roll"], commands["pitch"], commands["yaw"])
