from vsl_dro.core.errors import (
    ConfigError,
    HighwayConfigError,
    RadiusTuningError,
    SampleFormatError,
    ScheduleError,
)
from vsl_dro.core.models import (
    Certificate,
    CertificateStatus,
    DensityTrajectory,
    EdgeEvent,
    EdgeParams,
    HighwayConfig,
    Regime,
    RegimeReport,
    SampleSpec,
    ScenarioSample,
    SolveStatus,
    SpeedSchedule,
    TerminationReason,
    Violation,
)

__all__ = [
    "EdgeParams", "EdgeEvent", "HighwayConfig", "ScenarioSample", "SampleSpec",
    "SpeedSchedule", "DensityTrajectory", "Violation", "Certificate", "RegimeReport",
    "SolveStatus", "CertificateStatus", "TerminationReason", "Regime",
    "HighwayConfigError", "SampleFormatError", "ScheduleError", "ConfigError", "RadiusTuningError",
]
