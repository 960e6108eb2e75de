"""Classical PID rate controllers: the comparison arm.

PID on roll/pitch, PI on yaw, mirroring common practice on small
multirotors. The derivative acts on the (low-pass filtered) error, the
integral is clamped for anti-windup. The three-axis bank reuses the same
complementary filter, axis saturation, and motor mixer as the model-free
controller so comparisons isolate the control law itself.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .attitude import (
    AXES,
    ComplementaryFilterState,
    GyroReading,
    MotorCommands,
    RateReference,
    filter_gyro,
    mix,
)
from .core import saturate


@dataclass(frozen=True)
class PidConfig:
    """Gains and safeguards for one axis."""

    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    integral_limit: float = 100.0
    deriv_filter_tau: float = 0.01

    def __post_init__(self) -> None:
        if self.kp < 0.0 or self.ki < 0.0 or self.kd < 0.0:
            raise ValueError("gains must be >= 0")
        if self.kp == 0.0 and self.ki == 0.0 and self.kd == 0.0:
            raise ValueError("at least one gain must be > 0")
        if self.integral_limit <= 0.0:
            raise ValueError("integral_limit must be > 0")
        if self.deriv_filter_tau < 0.0:
            raise ValueError("deriv_filter_tau must be >= 0")


@dataclass
class PidState:
    integral: float = 0.0
    prev_error: float = 0.0
    deriv_filtered: float = 0.0
    primed: bool = False

    def reset(self) -> None:
        self.integral = 0.0
        self.prev_error = 0.0
        self.deriv_filtered = 0.0
        self.primed = False


def pid_step(state: PidState, config: PidConfig, error: float, dt: float) -> float:
    """One PID update: u = kp*e + ki*clamped-integral + kd*filtered de/dt."""
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if not math.isfinite(error):
        raise ValueError(f"error must be finite, got {error!r}")
    limit = config.integral_limit
    state.integral = min(limit, max(-limit, state.integral + error * dt))
    raw_deriv = (error - state.prev_error) / dt if state.primed else 0.0
    if config.deriv_filter_tau > 0.0:
        blend = dt / (config.deriv_filter_tau + dt)
        state.deriv_filtered += blend * (raw_deriv - state.deriv_filtered)
    else:
        state.deriv_filtered = raw_deriv
    state.prev_error = error
    state.primed = True
    return config.kp * error + config.ki * state.integral + config.kd * state.deriv_filtered


# Gains produced by tune_pid_gains() on the tarot-analog vehicle (doublet
# reference for roll/pitch, yaw variant for yaw), then frozen. Regenerate
# with demos/04_pid_vs_mfc.py --retune if the presets change.
TUNED_ON_TAROT: dict[str, PidConfig] = {
    "roll": PidConfig(kp=0.004, ki=0.008, kd=0.0002),
    "pitch": PidConfig(kp=0.004, ki=0.008, kd=0.0002),
    "yaw": PidConfig(kp=0.004, ki=0.008, kd=0.0),
}


@dataclass
class PidBankConfig:
    """Three-axis PID configuration (yaw must be PI)."""

    loop_hz: float = 250.0
    sat: float = 0.25
    lam: float = 0.7
    axes: dict[str, PidConfig] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.loop_hz <= 0.0:
            raise ValueError("loop_hz must be > 0")
        if self.sat <= 0.0:
            raise ValueError("sat must be > 0")
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("lambda must be in (0, 1]")
        if not self.axes:
            self.axes = dict(TUNED_ON_TAROT)
        missing = [a for a in AXES if a not in self.axes]
        if missing:
            raise ValueError(f"missing axis config sections: {missing}")
        if self.axes["yaw"].kd != 0.0:
            raise ValueError("yaw axis is PI: kd must be 0")

    @property
    def dt(self) -> float:
        return 1.0 / self.loop_hz

    @classmethod
    def from_text(cls, text: str) -> "PidBankConfig":
        parser = configparser.ConfigParser()
        parser.read_string(text)
        ctrl = parser["controller"] if parser.has_section("controller") else {}
        kind = str(ctrl.get("type", "pid")).strip().lower()
        if kind != "pid":
            raise ValueError(f"expected controller type 'pid', got {kind!r}")
        axes = {}
        for axis in AXES:
            base = TUNED_ON_TAROT[axis]
            sec = parser[axis] if parser.has_section(axis) else {}
            axes[axis] = PidConfig(
                kp=float(sec.get("kp", base.kp)),
                ki=float(sec.get("ki", base.ki)),
                kd=float(sec.get("kd", base.kd)),
                integral_limit=float(sec.get("integral_limit", base.integral_limit)),
                deriv_filter_tau=float(sec.get("deriv_filter_tau", base.deriv_filter_tau)),
            )
        return cls(
            loop_hz=float(ctrl.get("loop_hz", 250.0)),
            sat=float(ctrl.get("sat", 0.25)),
            lam=float(ctrl.get("lambda", 0.7)),
            axes=axes,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "PidBankConfig":
        return cls.from_text(Path(path).read_text())


class PidRateController:
    """Three-axis PID bank with the shared filter/saturation/mixer pipeline."""

    def __init__(self, config: PidBankConfig | None = None):
        self.config = config or PidBankConfig()
        self.filter = ComplementaryFilterState(self.config.lam)
        self.states = {axis: PidState() for axis in AXES}
        self.last_filtered = (0.0, 0.0, 0.0)
        self.last_commands = (0.0, 0.0, 0.0)
        self.fault_count = 0

    def reset(self) -> None:
        self.filter.reset()
        for st in self.states.values():
            st.reset()
        self.last_filtered = (0.0, 0.0, 0.0)
        self.last_commands = (0.0, 0.0, 0.0)
        self.fault_count = 0

    @property
    def f_hats(self) -> tuple[float, float, float]:
        # No disturbance estimator in the baseline; telemetry stays zero.
        return (0.0, 0.0, 0.0)

    def control_step(
        self, ref: RateReference, gyro: GyroReading, throttle: float
    ) -> MotorCommands:
        if not math.isfinite(throttle):
            raise ValueError(f"throttle must be finite, got {throttle!r}")
        if not (ref.is_finite() and gyro.is_finite()):
            self.fault_count += 1
            level = min(1.0, max(0.0, throttle))
            return MotorCommands(level, level, level, level)

        cfg = self.config
        filt = filter_gyro(self.filter, gyro)
        rates = {"roll": filt.roll_rate, "pitch": filt.pitch_rate, "yaw": filt.yaw_rate}
        refs = {"roll": ref.roll_rate, "pitch": ref.pitch_rate, "yaw": ref.yaw_rate}

        commands = {}
        for axis in AXES:
            error = refs[axis] - rates[axis]
            u = pid_step(self.states[axis], cfg.axes[axis], error, cfg.dt)
            commands[axis] = saturate(u, -cfg.sat, cfg.sat)

        self.last_filtered = (rates["roll"], rates["pitch"], rates["yaw"])
        self.last_commands = (commands["roll"], commands["pitch"], commands["yaw"])
        return mix(throttle, commands["roll"], commands["pitch"], commands["yaw"])


def tune_pid_gains(
    kp_grid: tuple[float, ...] = (0.001, 0.002, 0.004, 0.008, 0.016, 0.032),
    ki_grid: tuple[float, ...] = (0.0, 0.004, 0.008, 0.016, 0.032, 0.064),
    kd_grid: tuple[float, ...] = (0.0, 0.0001, 0.0002, 0.0004),
    duration: float = 8.0,
) -> dict[str, PidConfig]:
    """Grid-search PID gains on the tarot-analog vehicle, then freeze them.

    Roll/pitch gains minimize roll MAE on the roll doublet; yaw gains (PI)
    minimize yaw MAE on the yaw acro profile. Runs are noise- and
    wind-free so the search is deterministic and the winner reflects the
    plant, not one noise draw.
    """
    from .harness import Scenario, run_scenario  # deferred: avoids import cycle

    def roll_mae(cfg: PidConfig) -> float:
        bank = PidBankConfig(axes={"roll": cfg, "pitch": cfg,
                                   "yaw": PidConfig(kp=cfg.kp, ki=cfg.ki, kd=0.0)})
        scenario = Scenario(
            name="tune-roll", vehicle="tarot-analog", controller="pid",
            controller_config=bank, reference="doublet", duration=duration,
            seed=0, wind=False, noise_std=0.0,
        )
        result = run_scenario(scenario)
        return result.mae[0] if not result.diverged else math.inf

    def yaw_mae(cfg: PidConfig) -> float:
        bank = PidBankConfig(axes={"roll": TUNED_ON_TAROT["roll"],
                                   "pitch": TUNED_ON_TAROT["pitch"], "yaw": cfg})
        scenario = Scenario(
            name="tune-yaw", vehicle="tarot-analog", controller="pid",
            controller_config=bank, reference="acro-yaw", duration=duration,
            seed=0, wind=False, noise_std=0.0,
        )
        result = run_scenario(scenario)
        return result.mae[2] if not result.diverged else math.inf

    best_rp, best_rp_cost = None, math.inf
    for kp in kp_grid:
        for ki in ki_grid:
            for kd in kd_grid:
                cfg = PidConfig(kp=kp, ki=ki, kd=kd)
                cost = roll_mae(cfg)
                if cost < best_rp_cost:
                    best_rp, best_rp_cost = cfg, cost

    best_yaw, best_yaw_cost = None, math.inf
    for kp in kp_grid:
        for ki in ki_grid:
            cfg = PidConfig(kp=kp, ki=ki, kd=0.0)
            cost = yaw_mae(cfg)
            if cost < best_yaw_cost:
                best_yaw, best_yaw_cost = cfg, cost

    assert best_rp is not None and best_yaw is not None
    return {"roll": best_rp, "pitch": best_rp, "yaw": best_yaw}
