"""Cosmic-photon random number generation and Bell-test feasibility toolkit."""

__version__ = "0.1.0"

from .catalog import Catalog, CelestialSource, builtin_catalog, load_catalog, select_latest
from .extract import (
    BinHistogram,
    BitstreamRecord,
    ExtractionConfig,
    extract_bits,
    histogram,
    min_entropy,
)
from .photonsim import SimConfig, TimestampSeries, apply_dead_time, simulate_stream
from .planner import FeasibilityReport, TrendFit, feasibility_report, fit_magnitude_trend
from .randtest import BatteryReport, TestResult, run_battery
from .spacetime import (
    CheckResult,
    HorizontalPointing,
    TimeConstraint,
    TimingBudget,
    angular_separation,
    axis_angle,
    check_freedom_of_choice,
    check_locality,
    min_entanglement_lead_time,
    min_lab_separation,
    pair_separation,
    time_constraints,
)

__all__ = [
    "__version__",
    "Catalog",
    "CelestialSource",
    "builtin_catalog",
    "load_catalog",
    "select_latest",
    "BinHistogram",
    "BitstreamRecord",
    "ExtractionConfig",
    "extract_bits",
    "histogram",
    "min_entropy",
    "SimConfig",
    "TimestampSeries",
    "apply_dead_time",
    "simulate_stream",
    "FeasibilityReport",
    "TrendFit",
    "feasibility_report",
    "fit_magnitude_trend",
    "BatteryReport",
    "TestResult",
    "run_battery",
    "CheckResult",
    "HorizontalPointing",
    "TimeConstraint",
    "TimingBudget",
    "angular_separation",
    "axis_angle",
    "check_freedom_of_choice",
    "check_locality",
    "min_entanglement_lead_time",
    "min_lab_separation",
    "pair_separation",
    "time_constraints",
]
