"""One experiment class per CLI subcommand."""

from typing import Dict, Type

from rough_harmonics.experiment_base import ExperimentBase
from rough_harmonics.experiments.holder_experiments import (
    FourierExperiment,
    HolderExperiment,
    NeuheiselSampleExperiment,
    WeierstrassExperiment,
)
from rough_harmonics.experiments.series_experiments import (
    DimsExperiment,
    EnergyExperiment,
    EvalExperiment,
    SobolevExperiment,
    SpectrumExperiment,
)
from rough_harmonics.experiments.transmission_experiment import TransmissionVerifyExperiment

EXPERIMENTS: Dict[str, Type[ExperimentBase]] = {
    cls.name: cls
    for cls in (
        DimsExperiment,
        EvalExperiment,
        SpectrumExperiment,
        SobolevExperiment,
        EnergyExperiment,
        HolderExperiment,
        FourierExperiment,
        WeierstrassExperiment,
        NeuheiselSampleExperiment,
        TransmissionVerifyExperiment,
    )
}

__all__ = [
    "EXPERIMENTS",
    "DimsExperiment",
    "EnergyExperiment",
    "EvalExperiment",
    "FourierExperiment",
    "HolderExperiment",
    "NeuheiselSampleExperiment",
    "SobolevExperiment",
    "SpectrumExperiment",
    "TransmissionVerifyExperiment",
    "WeierstrassExperiment",
]
