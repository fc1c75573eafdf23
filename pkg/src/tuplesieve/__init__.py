"""Prime tuple sieve workbench.

Core library for admissible offset tuples, singular series, truncated
divisor-sum weight tables, correlation sums, progression error probes, and
the weighted positivity detectors built from them; wrapped by a FastAPI
service (tuplesieve.service) and a thin CLI (tuplesieve.cli).
"""

from .arith import (MobiusTable, PrimeTable, chebyshev_psi, generalized_von_mangoldt,
                    sieve_mobius, sieve_primes, von_mangoldt)
from .budget import ResourceBudgetError, VerificationError
from .tuples import (GallagherReport, OffsetTuple, SingularSeriesValue, gallagher_average,
                     is_admissible, narrowest_admissible, residue_count, singular_series)
from .weights import (RootSystem, WeightTable, gpy_weight_interval, lambda_lower_r_interval,
                      lambda_r_interval, moment_weight_interval, root_classes,
                      selberg_weight_interval)

__all__ = [
    "MobiusTable", "PrimeTable", "chebyshev_psi", "generalized_von_mangoldt",
    "sieve_mobius", "sieve_primes", "von_mangoldt",
    "ResourceBudgetError", "VerificationError",
    "GallagherReport", "OffsetTuple", "SingularSeriesValue", "gallagher_average",
    "is_admissible", "narrowest_admissible", "residue_count", "singular_series",
    "RootSystem", "WeightTable", "gpy_weight_interval", "lambda_lower_r_interval",
    "lambda_r_interval", "moment_weight_interval", "root_classes",
    "selberg_weight_interval",
]
