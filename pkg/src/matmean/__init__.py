"""Weighted quasi-geometric matrix means, their log-majorization relations,
and the Rényi-type divergences and trace functions they generate."""
from .spectral import (DimensionError, EigenSolverError, HermiticityError, HermitianMatrix,
                       NotPsdError, PsdMatrix, SpectralError, eig_hermitian, loewner_le,
                       mat_exp, mat_log_support, mat_pow, sample_psd, support_projection)
from .means import (DomainError, MeanKind, MeanResult, MeanSpec, ParameterError, compute_mean,
                    epsilon_limit, lie_trotter_probe, mean_value, weighted_geometric)
from .majorization import (MajorizationVerdict, Outcome, Relation, eigen_le, log_majorize,
                           schatten_norm, weak_log_majorize)
from .relations import (Assertion, ClaimRecord, Status, VerificationReport, Witness,
                        builtin_catalog, claim_by_id, counterexample_search, region_scan,
                        second_order_coefficient, verify_claim)
from .equality import norm_equality_probe, taylor_coefficients, z4_gap
from .divergences import (DivergenceValue, Povm, classical_renyi, divergence_from_mean,
                          maximal_divergence, measured_divergence_lb,
                          regularized_measured_estimate, sandwich_check,
                          umegaki_relative_entropy)
from .channels import (ConvexityVerdict, QuantumChannel, midpoint_convexity_test,
                       monotonicity_check, pinching_channel, random_cptp, weyl_heisenberg)
from .suite import SuiteConfig, SuiteReport, render_table34, run_suite

__version__ = "0.1.0"
