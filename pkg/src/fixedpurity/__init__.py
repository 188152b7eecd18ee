"""fixedpurity: uniform sampling of density matrices at exactly fixed purity.

The package builds the chamber geometry of ordered eigenvalue spectra, the
marginal CDFs of the flat measure at fixed purity (closed forms for dims
2..4, tabulated quadrature above), a top-down inverse-CDF sampler producing
density matrices of exactly chosen purity, entanglement and correlation
measures, and the partial-trace-induced eigenvalue measures.
"""

__version__ = "0.1.0"

from .rng import RngStream, as_generator
from .matrixcore import (
    DensityMatrix,
    ginibre,
    haar_unitary,
    random_density,
    random_density_purities,
    simplex_eigs,
    simplex_eigs_unsorted,
)
from .chamber import (
    ChamberBasis,
    PolarCoords,
    SimplexPoint,
    angle_bounds,
    angle_from_purity,
    chamber_basis,
    eigs_from_polar,
    max_radius,
    polar_from_eigs,
    x_from_purities,
)
from .sampler import (
    SampleBatch,
    SampleConfig,
    SampleRecord,
    haar_purity_histogram,
    sample_density,
    sample_matrices,
    sample_polar,
    sample_wc_eigs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
