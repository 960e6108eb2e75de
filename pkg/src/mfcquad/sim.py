"""Deterministic fixed-step 3-DOF rotational quadrotor simulator.

Rigid-body Euler rotational dynamics about the three principal axes with
first-order motor lag, linear yaw drag, optional gyroscopic cross
coupling, per-motor effectiveness faults, a periodic imbalance torque, and
a seeded gyroscope noise model. Body rates are kept in deg/s throughout;
torques are N*m and inertias kg*m^2.

Motor layout matches the mixer in :mod:`mfcquad.attitude`: motors 2/4 on
the roll arms spinning clockwise, motors 1/3 on the pitch arms spinning
counter-clockwise, so a positive roll command produces a positive roll
rate, and speeding up the clockwise pair yaws the body counter-clockwise
(positive yaw).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attitude import GyroReading, MotorCommands

DEG = 180.0 / math.pi


class SimulationError(RuntimeError):
    """Raised when the simulation state stops being finite."""


@dataclass(frozen=True)
class VehicleParams:
    """Physical stand-in parameters for one airframe.

    inertia: principal moments (roll, pitch, yaw) in kg*m^2
    arm_length: moment arm of the roll/pitch motor pairs, m
    thrust_coeff: steady-state thrust per unit normalized command, N
    torque_coeff: steady-state yaw reaction torque per unit command, N*m
    motor_tau: first-order motor lag time constant, s
    yaw_drag: linear rotational drag about yaw, N*m per deg/s
    rate_cross_coupling: include the w x Iw Euler coupling term
    """

    inertia: tuple[float, float, float]
    arm_length: float
    thrust_coeff: float
    torque_coeff: float
    motor_tau: float
    yaw_drag: float
    rate_cross_coupling: bool = True

    def __post_init__(self) -> None:
        if any(i <= 0.0 for i in self.inertia):
            raise ValueError("inertia components must be > 0")
        for name in ("arm_length", "thrust_coeff", "torque_coeff", "motor_tau"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.yaw_drag < 0.0:
            raise ValueError("yaw_drag must be >= 0")


@dataclass(frozen=True)
class FaultSpec:
    """Actuator degradation and imbalance injected from ``onset_time`` on.

    prop_effectiveness scales each motor's thrust and reaction torque in
    (0, 1]; the imbalance is a sinusoidal roll torque of the given
    amplitude (N*m) and frequency (Hz), standing in for a vehicle shaking
    itself on mangled props.
    """

    prop_effectiveness: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    imbalance_amp: float = 0.0
    imbalance_freq: float = 0.0
    onset_time: float = 0.0

    def __post_init__(self) -> None:
        if any(not 0.0 < e <= 1.0 for e in self.prop_effectiveness):
            raise ValueError("prop_effectiveness entries must be in (0, 1]")
        if self.imbalance_amp < 0.0 or self.imbalance_freq < 0.0:
            raise ValueError("imbalance amplitude and frequency must be >= 0")
        if self.onset_time < 0.0:
            raise ValueError("onset_time must be >= 0")


NO_FAULTS = FaultSpec()


@dataclass(frozen=True)
class GyroNoiseSpec:
    """Additive white noise and constant bias on the rate measurement."""

    std_dev: float = 0.0
    bias: tuple[float, float, float] = (0.0, 0.0, 0.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.std_dev < 0.0:
            raise ValueError("std_dev must be >= 0")


@dataclass(frozen=True)
class SimState:
    """Body rates (deg/s) and lagged motor outputs (normalized)."""

    rates: tuple[float, float, float] = (0.0, 0.0, 0.0)
    motors: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.rates + self.motors)


def sim_step(
    state: SimState,
    motors: MotorCommands,
    dt: float,
    params: VehicleParams,
    faults: FaultSpec = NO_FAULTS,
    t: float = 0.0,
    external_torque: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> SimState:
    """Advance the vehicle one fixed step.

    Update order (the semi-implicit flavour for this velocity-level
    system): motors first, then torques from the updated motors, then the
    rates. ``external_torque`` lets the harness add exogenous torques such
    as wind without the plant knowing about their statistics.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if not state.is_finite():
        raise SimulationError(f"non-finite simulation state: {state!r}")
    cmd = motors.as_tuple()
    if any(not math.isfinite(c) or c < -1e-9 or c > 1.0 + 1e-9 for c in cmd):
        raise ValueError(f"motor commands must lie in [0, 1], got {cmd}")

    # First-order lag toward the commanded values (exact discretization,
    # stable for any motor_tau).
    decay = 1.0 - math.exp(-dt / params.motor_tau)
    m = tuple(mi + decay * (ci - mi) for mi, ci in zip(state.motors, cmd))

    faulted = t >= faults.onset_time
    eff = faults.prop_effectiveness if faulted else (1.0, 1.0, 1.0, 1.0)
    thrust = [params.thrust_coeff * e * mi for e, mi in zip(eff, m)]
    reaction = [params.torque_coeff * e * mi for e, mi in zip(eff, m)]

    tau_roll = params.arm_length * (thrust[3] - thrust[1])
    tau_pitch = params.arm_length * (thrust[2] - thrust[0])
    tau_yaw = (reaction[1] + reaction[3]) - (reaction[0] + reaction[2])

    if faulted and faults.imbalance_amp > 0.0:
        tau_roll += faults.imbalance_amp * math.sin(
            2.0 * math.pi * faults.imbalance_freq * (t - faults.onset_time)
        )

    tau_yaw -= params.yaw_drag * state.rates[2]

    tau = [
        tau_roll + external_torque[0],
        tau_pitch + external_torque[1],
        tau_yaw + external_torque[2],
    ]

    if params.rate_cross_coupling:
        # Euler coupling -w x (Iw); rates converted to rad/s for the torque.
        ix, iy, iz = params.inertia
        wx, wy, wz = (r / DEG for r in state.rates)
        tau[0] += -(wy * iz * wz - wz * iy * wy)
        tau[1] += -(wz * ix * wx - wx * iz * wz)
        tau[2] += -(wx * iy * wy - wy * ix * wx)

    rates = tuple(
        r + dt * DEG * (ti / ii) for r, ti, ii in zip(state.rates, tau, params.inertia)
    )
    new_state = SimState(rates=rates, motors=m)
    if not new_state.is_finite():
        raise SimulationError(f"simulation diverged to non-finite state at t={t}")
    return new_state


def read_gyro(
    state: SimState,
    noise: GyroNoiseSpec,
    rng: np.random.Generator,
    tick: int = 0,
) -> GyroReading:
    """True body rates plus bias and seeded white noise."""
    if noise.std_dev > 0.0:
        n = rng.standard_normal(3)
        vals = [r + b + noise.std_dev * ni for r, b, ni in zip(state.rates, noise.bias, n)]
    else:
        vals = [r + b for r, b in zip(state.rates, noise.bias)]
    return GyroReading(vals[0], vals[1], vals[2], timestamp=tick)


class WindModel:
    """Slowly varying exogenous torque: one Ornstein-Uhlenbeck process per axis."""

    def __init__(
        self,
        sigma: tuple[float, float, float],
        tau: float,
        rng: np.random.Generator,
    ):
        if tau <= 0.0:
            raise ValueError("wind correlation time must be > 0")
        if any(s < 0.0 for s in sigma):
            raise ValueError("wind torque sigma must be >= 0")
        self.sigma = sigma
        self.tau = tau
        self.rng = rng
        self.torque = (0.0, 0.0, 0.0)

    def step(self, dt: float) -> tuple[float, float, float]:
        a = math.exp(-dt / self.tau)
        kick = math.sqrt(1.0 - a * a)
        n = self.rng.standard_normal(3)
        self.torque = tuple(
            a * w + kick * s * ni for w, s, ni in zip(self.torque, self.sigma, n)
        )
        return self.torque


# Airframe stand-ins. Numbers are plausible for the class of vehicle each
# preset mimics (a light 450 mm hobby quad vs a heavy 650 mm carbon rig
# with slow heavy props) but make no claim of fidelity to any specific
# airframe; what matters for the experiments is the contrast: the heavy
# preset carries ~5x the inertia, ~2.4x the motor lag, and lower
# acceleration authority per unit command.
F450_ANALOG = VehicleParams(
    inertia=(0.010, 0.011, 0.018),
    arm_length=0.18,
    thrust_coeff=4.0,
    torque_coeff=0.12,
    motor_tau=0.035,
    yaw_drag=1.5e-3,
    rate_cross_coupling=True,
)

TAROT_ANALOG = VehicleParams(
    inertia=(0.050, 0.054, 0.086),
    arm_length=0.32,
    thrust_coeff=6.0,
    torque_coeff=0.30,
    motor_tau=0.070,
    yaw_drag=3.0e-3,
    rate_cross_coupling=True,
)

VEHICLE_PRESETS: dict[str, VehicleParams] = {
    "f450-analog": F450_ANALOG,
    "tarot-analog": TAROT_ANALOG,
}

# Half-mangled props: big effectiveness loss on every motor plus a 30 Hz
# shake worth roughly 15% of the damaged vehicle's hover roll authority.
DAMAGED_PROPS = FaultSpec(
    prop_effectiveness=(0.55, 0.50, 0.60, 0.50),
    imbalance_amp=0.10,
    imbalance_freq=30.0,
    onset_time=0.0,
)

# One landing-gear leg stuck out: persistent asymmetric torque, modeled as
# uneven effectiveness on one diagonal.
STUCK_GEAR = FaultSpec(
    prop_effectiveness=(1.0, 0.94, 1.0, 0.88),
    imbalance_amp=0.0,
    imbalance_freq=0.0,
    onset_time=0.0,
)

FAULT_PRESETS: dict[str, FaultSpec] = {
    "none": NO_FAULTS,
    "damaged-props": DAMAGED_PROPS,
    "stuck-gear": STUCK_GEAR,
}


def vehicle_config_text(name: str, p: VehicleParams) -> str:
    """Render a vehicle preset in the plain-text config schema."""
    lines = [
        f"[vehicle {name}]",
        f"inertia_roll = {p.inertia[0]!r}        ; kg*m^2",
        f"inertia_pitch = {p.inertia[1]!r}       ; kg*m^2",
        f"inertia_yaw = {p.inertia[2]!r}         ; kg*m^2",
        f"arm_length = {p.arm_length!r}          ; m",
        f"thrust_coeff = {p.thrust_coeff!r}      ; N per unit command",
        f"torque_coeff = {p.torque_coeff!r}      ; N*m per unit command",
        f"motor_tau = {p.motor_tau!r}            ; s",
        f"yaw_drag = {p.yaw_drag!r}              ; N*m per deg/s",
        f"rate_cross_coupling = {'on' if p.rate_cross_coupling else 'off'}",
    ]
    return "\n".join(lines) + "\n"


def vehicle_from_section(section) -> VehicleParams:
    """Build VehicleParams from a parsed config section."""
    return VehicleParams(
        inertia=(
            float(section["inertia_roll"]),
            float(section["inertia_pitch"]),
            float(section["inertia_yaw"]),
        ),
        arm_length=float(section["arm_length"]),
        thrust_coeff=float(section["thrust_coeff"]),
        torque_coeff=float(section["torque_coeff"]),
        motor_tau=float(section["motor_tau"]),
        yaw_drag=float(section["yaw_drag"]),
        rate_cross_coupling=str(section.get("rate_cross_coupling", "on")).lower()
        in ("1", "true", "on", "yes"),
    )
