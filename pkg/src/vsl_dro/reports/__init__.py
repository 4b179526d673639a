from vsl_dro.reports.formatter import (
    format_comparison,
    format_guarantee_report,
    format_issa_report,
    format_mpc_trace,
    format_schedule_comparison,
)
from vsl_dro.reports.writers import format_float, to_json, write_csv, write_json

__all__ = [
    "format_float", "to_json", "write_json", "write_csv",
    "format_issa_report", "format_guarantee_report", "format_schedule_comparison",
    "format_mpc_trace", "format_comparison",
]
