"""Mismatched-decoding rates and exponents for Gaussian ISI channels."""

from ._isimm import (
    Infeasible,
    InvalidInput,
    IoError,
    ar_from_autocov,
    autocov_from_ar,
    error_exponent,
    eta_squared,
    freq_response,
    gmi_iid_gaussian,
    matched_capacity,
    rate_ar,
    rate_fc,
    rate_universal,
    simulate,
)

__all__ = [
    "Infeasible",
    "InvalidInput",
    "IoError",
    "ar_from_autocov",
    "autocov_from_ar",
    "error_exponent",
    "eta_squared",
    "freq_response",
    "gmi_iid_gaussian",
    "matched_capacity",
    "rate_ar",
    "rate_fc",
    "rate_universal",
    "simulate",
]
