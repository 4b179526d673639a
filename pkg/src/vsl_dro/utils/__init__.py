from vsl_dro.utils.parallel import parallel_map

__all__ = ["parallel_map"]
