from vsl_dro.issa.enumeration import all_schedules, brute_force, schedule_count
from vsl_dro.issa.pool import CandidatePool, PoolEntry, update_pool
from vsl_dro.issa.search import CandidateRecord, IssaReport, IssaState, export_iterations_csv, run

__all__ = [
    "run", "IssaReport", "IssaState", "CandidateRecord", "export_iterations_csv",
    "CandidatePool", "PoolEntry", "update_pool",
    "all_schedules", "brute_force", "schedule_count",
]
