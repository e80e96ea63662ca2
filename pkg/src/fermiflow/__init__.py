"""Slater determinant states and the determinantal point processes they induce.

Finite weighted ground sets only: everything is exact linear algebra,
enumeration, or seeded Monte-Carlo. Distances follow the half trace norm
convention, (1/2) tr |rho - sigma|, matching half-L1 for classical laws.
"""

from ._rng import stream_generator
from .bounds import (DppBoundsReport, WalshCounterexampleReport,
                     count_covariance_exact,
                     density_transport_rhs, pair_by_descending_eigenvalue,
                     tv_bound_general, tv_bound_projection, verify_instance,
                     walsh_counterexample_report, weight_w,
                     wsharp_bound_general, wsharp_bound_projection,
                     wsharp_exact)
from .dpp import (ConfigurationDistribution, MixedKernelSpec,
                  brute_force_configuration_distribution, correlation_function,
                  count_covariance, coupled_sample_pair, exact_mixed_distribution,
                  expected_count, ordered_measurement_distribution,
                  sample_mixed_dpp, sample_projection_dpp)
from .errors import (ConvergenceError, EnumerationCapError, RankCollapseError,
                     RankDeficiencyError)
from .ground import (GroundSpace, OrthonormalFamily, gram_matrix, inner_product,
                     orthonormalize, random_orthonormal, walsh_family)
from .slater import (DensityOperator, OverlapMatrix, ProjectionKernel,
                     full_state_vector, overlap_determinant, overlap_matrix,
                     projection_kernel, reduced_density_matrix,
                     slater_amplitude, slater_fidelity, slater_state_vector,
                     trace_distance_slater)
from .transport import (CostMatrix, TransportPlan, hamming_cost, ot_cost,
                        symmetric_difference_cost, total_variation)
from .w1_bounds import (GapRow, SlaterBoundsReport, example_gap_table,
                        slater_bounds_report, stabilizer_max_overlap,
                        stabilizer_max_overlap_ascent, w1_upper_slater)
from .w1_exact import (W1Certificate, classical_hamming_w1,
                       diagonal_distribution, dual_witness_from_classical,
                       partial_trace, rdm_monotonicity_check, w1_exact)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationDistribution",
    "ConvergenceError",
    "CostMatrix",
    "DensityOperator",
    "DppBoundsReport",
    "EnumerationCapError",
    "GapRow",
    "GroundSpace",
    "MixedKernelSpec",
    "OrthonormalFamily",
    "OverlapMatrix",
    "ProjectionKernel",
    "RankCollapseError",
    "RankDeficiencyError",
    "SlaterBoundsReport",
    "TransportPlan",
    "W1Certificate",
    "WalshCounterexampleReport",
    "brute_force_configuration_distribution",
    "classical_hamming_w1",
    "correlation_function",
    "count_covariance",
    "count_covariance_exact",
    "coupled_sample_pair",
    "density_transport_rhs",
    "diagonal_distribution",
    "dual_witness_from_classical",
    "exact_mixed_distribution",
    "example_gap_table",
    "expected_count",
    "full_state_vector",
    "gram_matrix",
    "hamming_cost",
    "inner_product",
    "ordered_measurement_distribution",
    "orthonormalize",
    "ot_cost",
    "overlap_determinant",
    "overlap_matrix",
    "pair_by_descending_eigenvalue",
    "partial_trace",
    "projection_kernel",
    "random_orthonormal",
    "rdm_monotonicity_check",
    "reduced_density_matrix",
    "sample_mixed_dpp",
    "sample_projection_dpp",
    "slater_amplitude",
    "slater_bounds_report",
    "slater_fidelity",
    "slater_state_vector",
    "stabilizer_max_overlap",
    "stabilizer_max_overlap_ascent",
    "stream_generator",
    "symmetric_difference_cost",
    "total_variation",
    "trace_distance_slater",
    "tv_bound_general",
    "tv_bound_projection",
    "verify_instance",
    "w1_exact",
    "w1_upper_slater",
    "walsh_counterexample_report",
    "walsh_family",
    "weight_w",
    "wsharp_bound_general",
    "wsharp_bound_projection",
    "wsharp_exact",
]
