"""Generalized complex deformation calculus on flat complex tori."""
from ._kernels import BACKEND
from .spectral_fields import TorusGeometry, SpectralField
from .gt_algebra import HolPoissonBase, build_gc, gc_type
from .forms import OneForm, TwoForm
from .deformation import (Deformation, PreconditionError, b_field_action,
                          certify_holomorphic_gauge, make_test_deformation,
                          mc_residual, flow_equals_gauge_check)
from .gauge_solver import SolverConfig, NonConvergenceError, gauge_fix

__version__ = "0.1.0"
