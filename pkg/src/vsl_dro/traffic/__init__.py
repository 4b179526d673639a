from vsl_dro.traffic.ctm import (
    PlantRollout,
    average_flow,
    export_trajectories_csv,
    junction_ratio,
    plant_fluxes,
    plant_step,
    propagate,
    simulate_plant,
)

__all__ = [
    "propagate", "plant_fluxes", "plant_step", "simulate_plant", "average_flow",
    "junction_ratio", "export_trajectories_csv", "PlantRollout",
]
