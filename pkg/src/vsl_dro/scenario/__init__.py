from vsl_dro.scenario.generator import (
    generate_samples,
    mean_sample,
    sample_streams,
    validate_sample,
    validate_spec,
    validation_rng,
)
from vsl_dro.scenario.io import export_samples_csv, load_samples, sample_to_dict, save_samples

__all__ = [
    "generate_samples", "validate_sample", "validate_spec", "sample_streams", "validation_rng",
    "mean_sample", "load_samples", "save_samples", "export_samples_csv", "sample_to_dict",
]
