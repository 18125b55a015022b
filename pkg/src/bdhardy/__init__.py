"""Numerical laboratory for the Baez-Duarte criterion in the Hardy space H^2.

The Riemann hypothesis is equivalent (Baez-Duarte; Nyman-Beurling) to the
constant 1 lying in the H^2-closure of the span of

    h_k(z) = (1-z)^{-1} log((1 + z + ... + z^{k-1})/k),   k >= 2.

This package builds the h_k and their relatives explicitly, realizes the
isometries between the weighted sequence space, the weighted Bergman space
and H^2, the weighted composition semigroups W_n and T_n, least-squares
distances from 1 to span{h_k} (the quantitative proxy), the unconditional
Mobius-series density certificate for (I-S)h_k, local Dirichlet
decompositions, and the embedding into the Periodic Dilation Completeness
Problem.  Every truncation carries an explicit tail bound, and all long
accumulations are compensated.
"""

__version__ = "0.1.0"

from .seriescore import (DEFAULT_N, CoeffSeq, Space, SpaceMismatchError,
                         add, axpy, evaluate, evaluate_with_bound,
                         inner_product, inner_product_error_bound, norm,
                         pad_to, point_eval_bound, scale, shift_pad,
                         subtract, zeros)
from .numtheory import (EULER_GAMMA, NTTables, cached_sieve,
                        divides_indicator, divisor_sq_tail,
                        harmonic_asymptotic_residual, harmonic_numbers,
                        mertens_limits_check, mobius_divisor_sums, sieve)
from .hardyops import (HK_TAIL_CONSTANT, IDENTITIES, IdentityReport,
                       OperatorTag, TInvResult, apply_operator, hk_coeffs,
                       hk_coeffs_recurrence, hk_tail_norm_bound,
                       hkc_partial_norms, i_minus_shift, ims_hk_coeffs,
                       named_function, phi_map, psi, rk_sequence, shift,
                       t_inv, t_map, t_n, verify_identity, w_n)
from .dirichletlocal import (GOLDEN_RATIO, DirichletDecomposition,
                             GoldenPairReport, OrthogonalityProbe,
                             decompose, dirichlet_energy_bergman_crosscheck,
                             golden_a, golden_b, golden_pair_check,
                             hk_tail_energy, orthogonality_probe,
                             reconstruct, rk_bergman_norm2_exact,
                             rk_bergman_tail_exact)
from .bdcriterion import (DistanceReport, GramSystem, MoebiusResidualReport,
                          NumericalError, PointwiseReport, build_gram,
                          compact_open_check, cyclicity_witness, distance,
                          moebius_combination_coeffs, moebius_residual,
                          ridge_solve_spd)
from .pdcp import (RangeExclusionReport, SineSeq, dilate, map_u, map_v,
                   range_exclusion_witness, sample_odd_periodic,
                   span_distance_l2, wintner_fs)
