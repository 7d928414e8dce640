"""Continuum eigenfunctions, eigenpackets, intertwiners and grid-level spectra."""

from .discrete import (DiscreteOperator, DiscretizationError, SpectrumComparison, SpectrumResult,
                       WaveOperatorSweep, compare_spectra, discretize_m0, discretize_nr_coordinate,
                       discretize_nr_momentum, galilean_spectrum, nr_equivalence_phase,
                       nr_equivalence_residual, participation_ratio, wave_operator_apply,
                       wave_operator_sweep)
from .eigenfunctions import (AsymptoticForm, eigenfunction_asymptotic, eigenfunction_closed_form,
                             free_eigenfunction_coordinate, free_eigenfunction_momentum,
                             nr_coordinate_apply, nr_momentum_apply)
from .packets import (EigenPacketWeights, IntertwinerU, OverlapResult, build_intertwiner_U,
                      chirp_resolving_grid, expand_in_eigenbasis, family_matrix, lambda_grid,
                      smeared_overlap, synthesize)
from .potentials import PotentialSpec
from .radial import (LargeRFit, RadialSolveError, SpectralSolution, fit_large_r, fit_power_law,
                     solve_radial_batch, solve_radial_interacting)

__all__ = [name for name in dir() if not name.startswith("_")]
