from vsl_dro.validate.montecarlo import (
    GuaranteeReport,
    ReplicationResult,
    RolloutStats,
    ScheduleComparison,
    binomial_slack,
    compare_schedules,
    evaluate_schedule,
    export_mean_trajectory_csv,
    export_rollouts_csv,
    sample_average_control,
    sample_average_search,
    validate_guarantee,
)

__all__ = [
    "validate_guarantee", "GuaranteeReport", "ReplicationResult", "binomial_slack",
    "sample_average_control", "sample_average_search",
    "compare_schedules", "ScheduleComparison", "evaluate_schedule", "RolloutStats",
    "export_rollouts_csv", "export_mean_trajectory_csv",
]
