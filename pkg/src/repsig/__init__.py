"""Signatures and reliability of repairable two-component systems."""

from .distributions import (
    ErlangParams,
    ErlangSumParams,
    QuadratureError,
    Rates,
    erlang_sum_survival,
    erlang_survival,
    xi_exponential,
    xi_general,
)
from .failure_epochs import EpochMixture, epoch_mixture, epoch_survival, epoch_weights
from .reliability import ReliabilityCurve, RepairableSpec, reliability_curve, system_reliability
from .signature import (
    Signature,
    Truncation,
    parallel2_signature,
    parallel2_signature_general,
    parallel_n_signature,
    remark5_signature,
    serial2_xi,
    truncate,
)
from .structure import consecutive_kofn_lifetime, kofn_lifetime, serial_spare_lifetime

__version__ = "0.1.0"
