"""Scenario runner: closed-loop campaigns, metrics, and CSV telemetry.

A scenario marries a vehicle preset, a controller, a reference program,
faults, and seeded noise/wind into one deterministic closed-loop run.
Campaigns aggregate per-axis mean absolute error across (vehicle,
controller) combinations the way the flight experiments are compared.
"""

from __future__ import annotations

import configparser
import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .attitude import ControllerConfig, RateController
from .pid import PidBankConfig, PidRateController
from .references import REFERENCE_PROGRAMS, get_reference_program
from .sim import (
    FAULT_PRESETS,
    NO_FAULTS,
    VEHICLE_PRESETS,
    FaultSpec,
    GyroNoiseSpec,
    SimState,
    VehicleParams,
    WindModel,
    read_gyro,
    sim_step,
    vehicle_config_text,
)

TELEMETRY_COLUMNS = (
    "t",
    "ref_roll", "ref_pitch", "ref_yaw",
    "rate_roll", "rate_pitch", "rate_yaw",
    "filt_roll", "filt_pitch", "filt_yaw",
    "fhat_roll", "fhat_pitch", "fhat_yaw",
    "u_roll", "u_pitch", "u_yaw",
    "m1", "m2", "m3", "m4",
)

DIVERGENCE_LIMIT = 2000.0  # deg/s, far above any commanded rate
DEFAULT_NOISE_STD = 1.5  # deg/s
WIND_TAU = 1.5  # s, wind torque correlation time
WIND_FRACTION = 0.03  # wind torque sigma as a fraction of axis authority


class ScenarioConfigError(ValueError):
    """Bad scenario or campaign configuration."""


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one closed-loop run."""

    name: str = "scenario"
    vehicle: str | VehicleParams = "f450-analog"
    controller: str = "mfc"  # mfc | pid
    controller_config: ControllerConfig | PidBankConfig | str | None = None
    reference: str = "doublet"
    faults: FaultSpec = NO_FAULTS
    wind: bool = False
    duration: float = 8.0
    seed: int = 0
    throttle: float = 0.5
    noise_std: float = DEFAULT_NOISE_STD
    noise_bias: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass
class ScenarioResult:
    """Telemetry plus the headline metrics for one run."""

    scenario: Scenario
    telemetry: np.ndarray  # shape (rows, 20), columns TELEMETRY_COLUMNS
    mae: tuple[float, float, float]
    saturation_fraction: tuple[float, float, float]
    diverged: bool

    @property
    def total_mae(self) -> float:
        return float(sum(self.mae))


def _resolve_vehicle(scenario: Scenario) -> VehicleParams:
    if isinstance(scenario.vehicle, VehicleParams):
        return scenario.vehicle
    try:
        return VEHICLE_PRESETS[scenario.vehicle]
    except KeyError:
        raise ScenarioConfigError(
            f"unknown vehicle preset {scenario.vehicle!r}; "
            f"known: {sorted(VEHICLE_PRESETS)}"
        ) from None


def _resolve_controller(scenario: Scenario):
    kind = scenario.controller.lower()
    cfg = scenario.controller_config
    if kind == "mfc":
        if cfg is None:
            cfg = ControllerConfig()
        elif isinstance(cfg, str):
            cfg = ControllerConfig.from_file(cfg)
        elif not isinstance(cfg, ControllerConfig):
            raise ScenarioConfigError("mfc scenario needs a ControllerConfig")
        return RateController(cfg)
    if kind == "pid":
        if cfg is None:
            cfg = PidBankConfig()
        elif isinstance(cfg, str):
            cfg = PidBankConfig.from_file(cfg)
        elif not isinstance(cfg, PidBankConfig):
            raise ScenarioConfigError("pid scenario needs a PidBankConfig")
        return PidRateController(cfg)
    raise ScenarioConfigError(f"unknown controller kind {scenario.controller!r}")


def _wind_sigma(vehicle: VehicleParams) -> tuple[float, float, float]:
    # Scale the wind torque with each axis's control authority so the same
    # relative disturbance hits light and heavy vehicles alike.
    lateral = WIND_FRACTION * vehicle.arm_length * vehicle.thrust_coeff
    yaw = 0.1 * WIND_FRACTION * 4.0 * vehicle.torque_coeff
    return (lateral, lateral, yaw)


def validate_scenario(scenario: Scenario) -> None:
    """Raise ScenarioConfigError if the scenario cannot be run."""
    if scenario.duration <= 0.0:
        raise ScenarioConfigError("duration must be > 0")
    if not 0.0 <= scenario.throttle <= 1.0:
        raise ScenarioConfigError("throttle must be in [0, 1]")
    if scenario.noise_std < 0.0:
        raise ScenarioConfigError("noise_std must be >= 0")
    _resolve_vehicle(scenario)
    _resolve_controller(scenario)
    try:
        get_reference_program(scenario.reference, scenario.duration)
    except (ValueError, OSError) as exc:
        raise ScenarioConfigError(str(exc)) from None


def run_scenario(scenario: Scenario) -> ScenarioResult:
    """Run one scenario to completion (or divergence); fully deterministic."""
    validate_scenario(scenario)
    vehicle = _resolve_vehicle(scenario)
    controller = _resolve_controller(scenario)
    dt = controller.config.dt
    sat = controller.config.sat
    steps = max(1, round(scenario.duration / dt))
    ref_fn = get_reference_program(scenario.reference, scenario.duration)

    gyro_seq, wind_seq = np.random.SeedSequence(scenario.seed).spawn(2)
    gyro_rng = np.random.default_rng(gyro_seq)
    noise = GyroNoiseSpec(
        std_dev=scenario.noise_std, bias=scenario.noise_bias, seed=scenario.seed
    )
    wind = (
        WindModel(_wind_sigma(vehicle), WIND_TAU, np.random.default_rng(wind_seq))
        if scenario.wind
        else None
    )

    telemetry = np.empty((steps, len(TELEMETRY_COLUMNS)))
    state = SimState()
    diverged = False
    rows = steps
    for k in range(steps):
        t = k * dt
        ref = ref_fn(t)
        gyro = read_gyro(state, noise, gyro_rng, tick=k)
        motors = controller.control_step(ref, gyro, scenario.throttle)
        external = wind.step(dt) if wind is not None else (0.0, 0.0, 0.0)
        filt = controller.last_filtered
        fhat = controller.f_hats
        cmds = controller.last_commands
        telemetry[k] = (
            t,
            ref.roll_rate, ref.pitch_rate, ref.yaw_rate,
            gyro.roll_rate, gyro.pitch_rate, gyro.yaw_rate,
            filt[0], filt[1], filt[2],
            fhat[0], fhat[1], fhat[2],
            cmds[0], cmds[1], cmds[2],
            motors.u1, motors.u2, motors.u3, motors.u4,
        )
        state = sim_step(
            state, motors, dt, vehicle, scenario.faults, t, external_torque=external
        )
        if any(abs(r) > DIVERGENCE_LIMIT for r in state.rates):
            diverged = True
            rows = k + 1
            break

    telemetry = telemetry[:rows]
    mae = tuple(
        float(np.mean(np.abs(telemetry[:, 4 + i] - telemetry[:, 1 + i])))
        for i in range(3)
    )
    sat_frac = tuple(
        float(np.mean(np.abs(telemetry[:, 13 + i]) >= sat * (1.0 - 1e-9)))
        for i in range(3)
    )
    return ScenarioResult(
        scenario=scenario,
        telemetry=telemetry,
        mae=mae,
        saturation_fraction=sat_frac,
        diverged=diverged,
    )


@dataclass(frozen=True)
class CampaignRow:
    name: str
    vehicle: str
    controller: str
    mae: tuple[float, float, float]
    total_mae: float
    diverged: bool


@dataclass
class CampaignSummary:
    rows: list[CampaignRow] = field(default_factory=list)
    results: list[ScenarioResult] = field(default_factory=list)

    @property
    def any_diverged(self) -> bool:
        return any(r.diverged for r in self.rows)

    def format_table(self) -> str:
        header = (
            f"{'scenario':<26} {'vehicle':<14} {'ctrl':<5} "
            f"{'mae_roll':>9} {'mae_pitch':>9} {'mae_yaw':>9} {'total':>9} {'div':>4}"
        )
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.name:<26} {r.vehicle:<14} {r.controller:<5} "
                f"{r.mae[0]:>9.3f} {r.mae[1]:>9.3f} {r.mae[2]:>9.3f} "
                f"{r.total_mae:>9.3f} {str(r.diverged):>4}"
            )
        return "\n".join(lines)


def run_campaign(scenarios: list[Scenario], parallelism: int = 1) -> CampaignSummary:
    """Validate every scenario up front, then run them all.

    Any configuration error aborts before the first run. Scenario runs are
    isolated (own RNG streams), so optional thread parallelism cannot
    change the results, only the wall time.
    """
    for s in scenarios:
        validate_scenario(s)
    if parallelism > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(run_scenario, scenarios))
    else:
        results = [run_scenario(s) for s in scenarios]
    summary = CampaignSummary()
    for res in results:
        s = res.scenario
        vehicle = s.vehicle if isinstance(s.vehicle, str) else "custom"
        summary.rows.append(
            CampaignRow(
                name=s.name,
                vehicle=vehicle,
                controller=s.controller,
                mae=res.mae,
                total_mae=res.total_mae,
                diverged=res.diverged,
            )
        )
        summary.results.append(res)
    return summary


def emit_telemetry(result: ScenarioResult, path: str | Path) -> Path:
    """Write the run's telemetry as CSV with the fixed documented header.

    Values are written with shortest round-trip formatting, so parsing the
    file back yields bit-identical floats.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TELEMETRY_COLUMNS)
        for row in result.telemetry:
            writer.writerow([repr(float(v)) for v in row])
    return path


def read_telemetry(path: str | Path) -> np.ndarray:
    """Parse an emitted telemetry CSV back into the in-memory array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != TELEMETRY_COLUMNS:
            raise ValueError(f"unexpected telemetry header: {header}")
        rows = [[float(v) for v in row] for row in reader]
    return np.asarray(rows)


def mae_from_csv(path: str | Path) -> tuple[float, float, float]:
    """Independent MAE recomputation straight from an emitted CSV."""
    tel = read_telemetry(path)
    return tuple(
        float(np.mean(np.abs(tel[:, 4 + i] - tel[:, 1 + i]))) for i in range(3)
    )


# Named scenarios mirroring the flight experiments: nominal light vehicle,
# the same vehicle with mangled props, the heavy vehicle with a stuck
# landing-gear leg (controller untouched throughout), and the PID
# comparison arm tuned on the heavy vehicle.
BUILTIN_SCENARIOS: dict[str, Scenario] = {
    "f450-doublet-mfc": Scenario(
        name="f450-doublet-mfc", vehicle="f450-analog", controller="mfc",
        reference="doublet", wind=True, duration=8.0, seed=11,
    ),
    "f450-acro-mfc": Scenario(
        name="f450-acro-mfc", vehicle="f450-analog", controller="mfc",
        reference="acro-script", wind=True, duration=16.0, seed=12,
    ),
    "f450-damaged-doublet-mfc": Scenario(
        name="f450-damaged-doublet-mfc", vehicle="f450-analog", controller="mfc",
        reference="doublet", faults=FAULT_PRESETS["damaged-props"],
        wind=True, duration=8.0, seed=13,
    ),
    "f450-damaged-acro-mfc": Scenario(
        name="f450-damaged-acro-mfc", vehicle="f450-analog", controller="mfc",
        reference="acro-script", faults=FAULT_PRESETS["damaged-props"],
        wind=True, duration=16.0, seed=14,
    ),
    "tarot-doublet-mfc": Scenario(
        name="tarot-doublet-mfc", vehicle="tarot-analog", controller="mfc",
        reference="doublet", faults=FAULT_PRESETS["stuck-gear"],
        wind=True, duration=8.0, seed=15,
    ),
    "tarot-acro-mfc": Scenario(
        name="tarot-acro-mfc", vehicle="tarot-analog", controller="mfc",
        reference="acro-script", faults=FAULT_PRESETS["stuck-gear"],
        wind=True, duration=16.0, seed=16,
    ),
    "tarot-doublet-pid": Scenario(
        name="tarot-doublet-pid", vehicle="tarot-analog", controller="pid",
        reference="doublet", wind=True, duration=8.0, seed=17,
    ),
    "f450-acro-pid": Scenario(
        name="f450-acro-pid", vehicle="f450-analog", controller="pid",
        reference="acro-script", wind=True, duration=16.0, seed=12,
    ),
    "f450-acro-pitch-pid": Scenario(
        name="f450-acro-pitch-pid", vehicle="f450-analog", controller="pid",
        reference="acro-pitch", wind=True, duration=16.0, seed=12,
    ),
    "f450-acro-yaw-pid": Scenario(
        name="f450-acro-yaw-pid", vehicle="f450-analog", controller="pid",
        reference="acro-yaw", wind=True, duration=16.0, seed=12,
    ),
}


def _parse_faults(section) -> FaultSpec:
    preset = str(section.get("faults", "none")).strip()
    try:
        base = FAULT_PRESETS[preset]
    except KeyError:
        raise ScenarioConfigError(
            f"unknown fault preset {preset!r}; known: {sorted(FAULT_PRESETS)}"
        ) from None
    kwargs = {}
    if "prop_effectiveness" in section:
        parts = [float(v) for v in str(section["prop_effectiveness"]).split(",")]
        if len(parts) != 4:
            raise ScenarioConfigError("prop_effectiveness needs 4 comma-separated values")
        kwargs["prop_effectiveness"] = tuple(parts)
    for key in ("imbalance_amp", "imbalance_freq", "onset_time"):
        if key in section:
            kwargs[key] = float(section[key])
    return replace(base, **kwargs) if kwargs else base


def _scenario_from_section(name: str, section) -> Scenario:
    try:
        return Scenario(
            name=name,
            vehicle=str(section.get("vehicle", "f450-analog")),
            controller=str(section.get("controller", "mfc")),
            controller_config=section.get("controller_config") or None,
            reference=str(section.get("reference", "doublet")),
            faults=_parse_faults(section),
            wind=str(section.get("wind", "off")).lower() in ("1", "true", "on", "yes"),
            duration=float(section.get("duration", 8.0)),
            seed=int(section.get("seed", 0)),
            throttle=float(section.get("throttle", 0.5)),
            noise_std=float(section.get("noise_std", DEFAULT_NOISE_STD)),
        )
    except ValueError as exc:
        raise ScenarioConfigError(f"scenario {name!r}: {exc}") from None


def load_scenarios(path: str | Path) -> list[Scenario]:
    """Load one or more scenarios from a plain-text config file.

    Sections named ``[scenario <name>]`` each define a run; a bare
    ``[scenario]`` section defines a single anonymous one.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ScenarioConfigError(f"cannot read scenario file {path}")
    scenarios = []
    for section in parser.sections():
        if section == "scenario":
            scenarios.append(_scenario_from_section(Path(path).stem, parser[section]))
        elif section.startswith("scenario "):
            name = section.split(" ", 1)[1].strip()
            scenarios.append(_scenario_from_section(name, parser[section]))
    if not scenarios:
        raise ScenarioConfigError(f"no [scenario] sections found in {path}")
    return scenarios


def presets_text() -> str:
    """All built-in presets rendered in the config-file syntax."""
    chunks = []
    for name, params in VEHICLE_PRESETS.items():
        chunks.append(vehicle_config_text(name, params))
    for name, fault in FAULT_PRESETS.items():
        chunks.append(
            "\n".join(
                [
                    f"[faults {name}]",
                    "prop_effectiveness = "
                    + ",".join(repr(e) for e in fault.prop_effectiveness),
                    f"imbalance_amp = {fault.imbalance_amp!r}     ; N*m",
                    f"imbalance_freq = {fault.imbalance_freq!r}   ; Hz",
                    f"onset_time = {fault.onset_time!r}           ; s",
                ]
            )
            + "\n"
        )
    chunks.append("; reference programs: " + ", ".join(REFERENCE_PROGRAMS) + "\n")
    for name, s in BUILTIN_SCENARIOS.items():
        fault_name = next(
            (k for k, v in FAULT_PRESETS.items() if v == s.faults), "none"
        )
        chunks.append(
            "\n".join(
                [
                    f"[scenario {name}]",
                    f"vehicle = {s.vehicle}",
                    f"controller = {s.controller}",
                    f"reference = {s.reference}",
                    f"faults = {fault_name}",
                    f"wind = {'on' if s.wind else 'off'}",
                    f"duration = {s.duration!r}",
                    f"seed = {s.seed}",
                ]
            )
            + "\n"
        )
    return "\n".join(chunks)
