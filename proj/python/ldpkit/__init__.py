"""Rate functions of kernel-weighted random walk sums, path functionals and metrics."""

from ._core import (
    ConfigError,
    ConvergenceError,
    DomainError,
    Kernel,
    Model,
    Path,
    UnsupportedError,
    e_f,
    estimate_tail,
    exact_tail,
    i_d,
    i_f_conjugate,
    i_f_explicit,
    minimizer,
    pair,
    parse_model,
    rho_2,
    rho_2_prime,
    rho_star,
    selftest,
    var,
    variational_rate,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "Kernel",
    "Model",
    "Path",
    "UnsupportedError",
    "e_f",
    "estimate_tail",
    "exact_tail",
    "i_d",
    "i_f_conjugate",
    "i_f_explicit",
    "minimizer",
    "pair",
    "parse_model",
    "rho_2",
    "rho_2_prime",
    "rho_star",
    "selftest",
    "var",
    "variational_rate",
]
