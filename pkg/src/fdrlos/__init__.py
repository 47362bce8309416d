"""Fluctuating double-Rayleigh line-of-sight fading statistics.

Exact closed-form pdf/cdf/outage for integer LoS-fluctuation shape, adaptive
quadrature reference oracles, the high-SNR asymptote, the three ancestor
models (Rician, Rician shadowed, deterministic-LoS double-Rayleigh), and
seed-deterministic Monte-Carlo samplers.
"""

from .analytic import (Curve, RsMixtureTerms, UnderflowWarning, asymptotic_op,
                       coding_gain, drlos_cdf_oracle, drlos_pdf_oracle,
                       fdrlos_cdf, fdrlos_cdf_oracle, fdrlos_pdf,
                       fdrlos_pdf_oracle, outage_probability, read_curve_csv,
                       rician_cdf, rician_pdf, rs_cdf, rs_cdf_integer, rs_pdf,
                       rs_pdf_integer_terms)
from .empirics import (CdfContractError, KsReport, default_ks_threshold, ecdf,
                       histogram_density, ks_distance, tabulated_cdf)
from .models import (FadingParams, ModelKind, SnrSampleSet, sample_gamma_rv,
                     sample_snr, sample_snr_conditioned)
from .specfun import (AccuracyError, DomainError, QuadratureConfig,
                      adaptive_quad, adaptive_quad_vec, gamma_tricomi_u,
                      gen_incomplete_gamma, kummer_1f1, log_kummer_1f1,
                      tricomi_u)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CdfContractError", "Curve", "DomainError",
    "FadingParams", "KsReport", "ModelKind", "QuadratureConfig",
    "RsMixtureTerms", "SnrSampleSet", "UnderflowWarning", "adaptive_quad",
    "adaptive_quad_vec", "asymptotic_op", "coding_gain", "default_ks_threshold",
    "drlos_cdf_oracle", "drlos_pdf_oracle", "ecdf", "fdrlos_cdf",
    "fdrlos_cdf_oracle", "fdrlos_pdf", "fdrlos_pdf_oracle", "gamma_tricomi_u",
    "gen_incomplete_gamma", "histogram_density", "ks_distance", "kummer_1f1",
    "log_kummer_1f1", "outage_probability", "read_curve_csv", "rician_cdf",
    "rician_pdf", "rs_cdf", "rs_cdf_integer", "rs_pdf", "rs_pdf_integer_terms",
    "sample_gamma_rv", "sample_snr", "sample_snr_conditioned", "tabulated_cdf",
    "tricomi_u",
]
