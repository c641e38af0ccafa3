"""hax: a desk-scale laboratory for large-t Hitchin equations on the disc."""

__version__ = "0.1.0"

from .errors import (DegenerateEverywhere, DegeneratePoint, HaxError,
                     InsufficientRadii, NonPositiveError, NotConverged,
                     NotEquivariant, NotPositive, NotSimpleZero, PairingDegenerate,
                     ParityViolation, ParseError, PreconditionViolated,
                     RegionOutsideGrid)
from .poly import ComplexPoly, LaurentPoly
from .higgs import (BranchLocus, CoverMap, HiggsBundleDisc, SpectralSample,
                    branch_locus, char_poly, cyclic_higgs, discriminant_poly,
                    eigen_frame, local_normal_form, pullback_higgs)
from .filtered import (FilteredLocal, PoleOrder, RamifiedCoverSpec,
                       StarExtensionInput, canonical_pairing_filtration,
                       descent_filtration, filtered_degree, pairing_pole_check,
                       parity_check, pullback_filtration, pushforward_degree,
                       pushforward_jumps, star_extension)
from .pairing import (DecoupledMetric, GramBoundsReport, GramMatrix,
                      JacobianPairing, SymmetricPairingField,
                      antidiagonal_pairing, check_higgs_selfadjoint,
                      compatibility_defect, cover_pairing_from_jacobian,
                      decoupled_metric_from_pairing, gram_bounds,
                      identity_pairing, sample_compatible_metric,
                      trace_pushforward_pairing)
from .grid import AnnulusRegion, DiscGrid, DiscRegion
from .solver import (MetricField, RadialProfile, SimpsonReport, SolveConfig,
                     SolveStats, hitchin_residual, load_checkpoint,
                     radial_cyclic_solve, radial_metric_field,
                     relative_endomorphism, save_checkpoint, simpson_sup_check,
                     solve_dirichlet, trace_identity_check)
from .asymptotics import (DEFAULT_SCHEDULE, ConvergenceReport, CutoffProfile,
                          RateFit, TSchedule, boundary_from_pairing,
                          build_approximate_solution, build_cutoff,
                          convergence_experiment, cyclic_benchmark_unit,
                          family_sweep, metric_comparison, off_diagonal_decay,
                          rate_fit, sheet_diagonal_spread, weights_from_metric)
