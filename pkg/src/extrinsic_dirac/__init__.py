"""Dirac spectra of hypersurfaces bounded by mean curvature data.

Spinor modules, catalog immersions, Dirac and Laplace spectra, Killing
spinors and the bound checks that tie them together.
"""

from . import bounds, clifford, geometry, harness, killing, linalg, spectra
from .bounds import (
    BoundSpec,
    CheckReport,
    SurfaceSummary,
    bound_imag,
    bound_imag_radius,
    bound_real,
    check_spectrum,
    comparison_bounds,
    higher_bound,
    pairing_bound_hypersurface,
    pairing_verify,
    summary_from_geometry,
)
from .clifford import CliffordRep, SumDecomposition, direct_sum_rep, irreducible_rep, verify_clifford
from .errors import (
    CapacityError,
    ConfigError,
    DegeneratePointError,
    ExtrinsicDiracError,
    GeometryError,
    IncompleteWindowError,
    NotHermitianError,
)
from .geometry import CATALOG_NAMES, catalog
from .harness import RunConfig, run_case, sweep
from .killing import KillingField, killing_basis, killing_residual, rayleigh_dtilde
from .linalg import BACKEND, hermitian_eigs, jacobi_eigh
from .spectra import Spectrum, dirac_spectrum, induced_spin_structure, laplace_spectrum

__version__ = "0.1.0"
