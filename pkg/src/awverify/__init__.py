"""Numerical and exact verification of the Askey-Wilson integral and its relatives."""
from .errors import (DivergenceError, DomainError, InvalidArgument, NoConvergence, PoleError,
                     QSeriesError, ResourceError, UnsupportedId)
from .harness import IdentityReport, check_identity, oracle_check, scan, to_json
from .qhyper import PhiSpec, WSpec, eval_phi, eval_w, phi
from .qnum import QContext, qpoch_finite, qpoch_inf
from .quadrature import IntegralValue, integrate_even_periodic

__version__ = "0.1.0"

__all__ = [
    "QContext", "qpoch_finite", "qpoch_inf", "PhiSpec", "WSpec", "eval_phi", "eval_w", "phi",
    "IntegralValue", "integrate_even_periodic", "IdentityReport", "check_identity", "scan",
    "oracle_check", "to_json", "QSeriesError", "InvalidArgument", "DomainError", "PoleError",
    "DivergenceError", "NoConvergence", "ResourceError", "UnsupportedId",
]
