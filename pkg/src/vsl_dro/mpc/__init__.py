from vsl_dro.mpc.driver import RADIUS_MODES, MpcConfig, MpcTrace, export_trace_csv, run_mpc

__all__ = ["MpcConfig", "MpcTrace", "run_mpc", "export_trace_csv", "RADIUS_MODES"]
