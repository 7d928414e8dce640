"""Free two- and three-particle systems: kinematics, generators and mass operators."""

from .kinematics import (KinematicFrame, UnsupportedSystemError, from_center_of_mass, from_jacobi,
                         momentum_matrix, to_center_of_mass, to_jacobi)
from .mass import (FORMS, MASS_SQUARED_FORMULA, MassOperatorSpec, PoincareComparison, band_symmetry,
                   build_mass_operator, compose_subsystems, equivalence_phase_relativistic,
                   expectation, first_order_momentum_apply, g_function, g_function_quadrature,
                   mass_squared_apply, particle_mass_operator, poincare_comparison, poincare_mass,
                   relativistic_equivalence_residual, relativistic_tilde_apply)
from .polygauss import PolyGaussian, pointwise_distance, relative_distance
from .two_particle import GeneratorSet, additivity_residual, two_particle_generators

__all__ = [name for name in dir() if not name.startswith("_")
           and name not in ("kinematics", "mass", "polygauss", "two_particle")]
