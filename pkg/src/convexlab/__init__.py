"""convexlab: log-convexity and uncertainty-principle verification for discrete
Schrodinger evolutions on the integer lattice."""

__version__ = "0.1.0"

from .lattice import Field, LatticeWindow, inner_product, laplacian
from .weights import (
    BesselKWeight,
    CarlemanWeight,
    GaussianWeight,
    InverseBesselWeight,
    LinearWeight,
    WeightSpec,
    log_weight,
    tail_mass,
    weighted_norm_sq,
)
from .evolve import (
    EvolutionConfig,
    Potential,
    evolve_free_convolution,
    evolve_free_spectral,
    evolve_potential,
)
from .convexity import ConvexityReport, NormSeries, convexity_report, sample_series

__all__ = [
    "Field",
    "LatticeWindow",
    "inner_product",
    "laplacian",
    "BesselKWeight",
    "CarlemanWeight",
    "GaussianWeight",
    "InverseBesselWeight",
    "LinearWeight",
    "WeightSpec",
    "log_weight",
    "tail_mass",
    "weighted_norm_sq",
    "EvolutionConfig",
    "Potential",
    "evolve_free_convolution",
    "evolve_free_spectral",
    "evolve_potential",
    "ConvexityReport",
    "NormSeries",
    "convexity_report",
    "sample_series",
]
