"""Polar-form machinery of the nonlinear Dirac equation on a flat spherical
background, with verified closed-form solutions of the chiral
(Nambu--Jona-Lasinio), scalar (Soler) and interpolating models."""

from .clifford import BilinearSet, bilinears, gamma_basis, sigma
from .errors import (
    DivergingState,
    GridTooCoarse,
    NonRealBilinear,
    PoleOrOrigin,
    SingularG,
    SingularPoint,
    StepTooLarge,
    StepUnderflow,
)
from .geometry import AngleState, BackgroundPoint, GridPoint, background_at
from .polar import (
    G_exact,
    ModelSpec,
    PolarState,
    X_exact,
    assemble_spinor,
    module_general_p,
    module_njl,
    module_soler,
    polar_state,
)
from .singular import SingularLocus, asymptotics_report, singular_locus

__version__ = "0.1.0"

__all__ = [
    "AngleState",
    "BackgroundPoint",
    "BilinearSet",
    "DivergingState",
    "G_exact",
    "GridPoint",
    "GridTooCoarse",
    "ModelSpec",
    "NonRealBilinear",
    "PoleOrOrigin",
    "PolarState",
    "SingularG",
    "SingularLocus",
    "SingularPoint",
    "StepTooLarge",
    "StepUnderflow",
    "X_exact",
    "assemble_spinor",
    "asymptotics_report",
    "background_at",
    "bilinears",
    "gamma_basis",
    "module_general_p",
    "module_njl",
    "module_soler",
    "polar_state",
    "sigma",
    "singular_locus",
]
