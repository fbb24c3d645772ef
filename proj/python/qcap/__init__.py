"""Entropic characteristics of finite-dimensional quantum channels."""

from ._core import (
    Channel,
    NumericalError,
    ValidationError,
    capacity_gap,
    chi,
    chi_capacity,
    chi_function,
    classify_gaussian,
    coherent_information,
    coherent_information_via_chi,
    ea_capacity,
    entropic_disturbance,
    entropy,
    gibbs_state,
    mutual_information,
    relative_entropy,
    run_cli,
    selftest,
    verify_identity,
)

__all__ = [
    "Channel",
    "NumericalError",
    "ValidationError",
    "capacity_gap",
    "chi",
    "chi_capacity",
    "chi_function",
    "classify_gaussian",
    "coherent_information",
    "coherent_information_via_chi",
    "ea_capacity",
    "entropic_disturbance",
    "entropy",
    "gibbs_state",
    "mutual_information",
    "relative_entropy",
    "run_cli",
    "selftest",
    "verify_identity",
]
