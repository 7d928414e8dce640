"""Generators of the de Sitter algebra for one spinless particle."""

from .angular import RadialCalculus, State, angular_momentum, unit_vector
from .generators import (INDEX_PAIRS, LABELS, REALIZATIONS, CasimirCheck, CommutatorReport,
                         Realization, UnsupportedGeneratorError, algebra_sweep, build_generator,
                         casimir_apply, casimir_eigenvalue, commutation_rhs, commutator_residual,
                         lab_operator, structure_rhs, tensor_components, tensor_generator)
from .maps import (ContractionReport, IntertwinerCheck, PositivityError, VelocitySphereMap,
                   contraction_check, ds_energy_apply, ds_energy_sq_matrix, intertwine_v_to_u,
                   intertwiner_check, scaled_grid)

__all__ = [name for name in dir() if not name.startswith("_")]
