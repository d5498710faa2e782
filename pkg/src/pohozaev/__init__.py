"""Normalized solutions of -Delta u = lambda u + mu |u|^{q-2} u + |u|^{p-2} u
with prescribed mass, via fibering maps on the L2-Pohozaev manifold.

Layers:

* grid         radial discretization, quadrature, norms, dilations
* functionals  energy, fiber map, Pohozaev residual, manifold classification
* fibering     fiber critical points t+/t-, threshold coupling, sensitivities
* constants    sharp Sobolev / Gagliardo-Nirenberg constants, bubble family
* extremal     the extremal coupling mu*_{a,p} and its scaling laws
* solvers      ground / mountain-pass branches, continuation to p = 2*,
               the dual-branch scalar formulation
* verify       the inequality/identity checklist behind `pohozaev verify`
* cli          command-line front end
"""

from .constants import (ConstantBundle, alpha_threshold, gn_constant,
                        sobolev_constant, talenti_bubble)
from .errors import (CompactnessLossWarning, ConvergenceError,
                     DegenerateInputError, InfeasibleBranchError,
                     ParameterError, ResolutionWarning)
from .extremal import (CriticalLimitResult, ExtremalResult, critical_limit,
                       degenerate_el_residual, gn_lower_bound, mass_scaling,
                       mass_scaling_exponent, minimize_mu)
from .fibering import (DEGENERACY_BAND, FiberCase, FiberingReport,
                       fiber_roots, fiber_sensitivity, mu_threshold, s_star,
                       tau_extension, threshold_prefactor)
from .functionals import (ManifoldClass, ManifoldSide, Params, classify,
                          dilate_profile, energy, fibering,
                          pohozaev_residual, second_variation)
from .grid import (NormProfile, RadialFunction, RadialGrid, dilate,
                   make_grid, norms, project_mass)
from .solvers import (DualBranchPoint, DualBranchScan, SolveResult,
                      continue_to_critical, dual_branch_scan, dual_h,
                      reduced_energy_gradient, scalar_field_solve,
                      solve_ground, solve_mp_subcritical)

__version__ = "0.1.0"
