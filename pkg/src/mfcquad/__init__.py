"""Model-free quadrotor rate control: controllers, simulator, and harness."""

from .attitude import (
    ComplementaryFilterState,
    ControllerConfig,
    GyroReading,
    MotorCommands,
    RateController,
    RateReference,
    filter_gyro,
    mix,
    mix_unclamped,
)
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
from .harness import (
    BUILTIN_SCENARIOS,
    Scenario,
    ScenarioConfigError,
    ScenarioResult,
    emit_telemetry,
    load_scenarios,
    mae_from_csv,
    read_telemetry,
    run_campaign,
    run_scenario,
)
from .pid import PidBankConfig, PidConfig, PidRateController, PidState, pid_step, tune_pid_gains
from .references import get_reference_program
from .sim import (
    FAULT_PRESETS,
    NO_FAULTS,
    VEHICLE_PRESETS,
    FaultSpec,
    GyroNoiseSpec,
    SimState,
    SimulationError,
    VehicleParams,
    WindModel,
    read_gyro,
    sim_step,
)

__version__ = "0.1.0"

__all__ = [
    "AxisControllerState",
    "BUILTIN_SCENARIOS",
    "ComplementaryFilterState",
    "ControlStepInput",
    "ControllerConfig",
    "FAULT_PRESETS",
    "FaultSpec",
    "GyroNoiseSpec",
    "GyroReading",
    "MotorCommands",
    "NO_FAULTS",
    "PidBankConfig",
    "PidConfig",
    "PidRateController",
    "PidState",
    "RateController",
    "RateReference",
    "Scenario",
    "ScenarioConfigError",
    "ScenarioResult",
    "SimState",
    "SimulationError",
    "UltraLocalConfig",
    "VEHICLE_PRESETS",
    "VehicleParams",
    "WindModel",
    "backward_difference",
    "emit_telemetry",
    "estimate_f",
    "filter_gyro",
    "get_reference_program",
    "ip_step",
    "ipd_step",
    "load_scenarios",
    "mae_from_csv",
    "mix",
    "mix_unclamped",
    "pid_step",
    "read_gyro",
    "read_telemetry",
    "run_campaign",
    "run_scenario",
    "saturate",
    "sim_step",
    "tune_pid_gains",
]
