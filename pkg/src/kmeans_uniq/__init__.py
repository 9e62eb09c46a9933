"""Empirical k-means, WCSS asymptotics and a bootstrap test for uniqueness
of the population k-means set."""

__version__ = "0.1.0"

from .backend import BACKEND
from .kmeans import CenterSet, Dataset, FitOptions, KMeansFit, fit, objective, wcss
from .models import ModelSpec, PopulationCatalog, population_catalog, sample
from .rng import RngStream
from .uniqueness import BootstrapDraws, UniquenessReport, bootstrap_draws, decide

__all__ = [
    "BACKEND", "BootstrapDraws", "CenterSet", "Dataset", "FitOptions",
    "KMeansFit", "ModelSpec", "PopulationCatalog", "RngStream",
    "UniquenessReport", "bootstrap_draws", "decide", "fit", "objective",
    "population_catalog", "sample", "wcss", "__version__",
]
