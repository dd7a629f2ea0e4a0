"""Numerical probes of discrete universality for zeta-functions with excised Euler factors."""

from __future__ import annotations

from .errors import (
    ConfigError,
    ConvergenceError,
    DegeneracyError,
    DomainError,
    EvaluationFailure,
    PoleError,
    UnsupportedInstanceError,
    ZetaLabError,
)
from .euler import EulerProductSpec, ZetaInstance, euler_product_eval, expand_dirichlet_coefficients, phi_strip_eval
from .functions import CompactRegion, Exhaustion, SamplingGrid, Strip, TargetFunction, rho_metric, sample_compact, sup_distance
from .hurwitz import PeriodicSequence, hurwitz_zeta, periodic_hurwitz_zeta, residue
from .primes import PrimePartition, prime_partition
from .scan import HurwitzSlot, ScanConfig, ScanResult, continuous_scan, density_interval, discrete_scan
from .torus import IndexVector, haar_sample, phase_theta, rotate, weyl_sum_closed, weyl_sum_direct, weyl_sum_multi
from .twisted import TorusPoint, twisted_series_eval, weighted_truncation

__version__ = "0.1.0"
