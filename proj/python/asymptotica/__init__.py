"""Numerical lab for power-bounded operators."""

from ._core import (
    ConfigError,
    Error,
    NotInRangeError,
    Operator,
    __version__,
    adjoint,
    asymptote_gram,
    backward_chain,
    compose,
    diag_unitary,
    direct_sum,
    example1,
    example2,
    example3,
    identity,
    inverse,
    is_in_mt,
    jordan,
    matrix,
    mult_exp,
    orbit,
    parse_operator,
    power_bound_estimate,
    projection_constants,
    run_config,
    scale,
    similarity,
    sum,
    verify,
    verify_cases,
    volterra,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
