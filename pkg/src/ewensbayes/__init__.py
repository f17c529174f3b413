"""Default Bayesian inference for the Ewens partition distribution.

The package covers the partition model itself (:mod:`ewensbayes.med`), its
default prior and induced summaries (:mod:`ewensbayes.jeffreys`), posterior
samplers with a deterministic quadrature oracle
(:mod:`ewensbayes.posterior`), a Dirichlet-process mixture of Poisson
kernels with the concentration parameter either sampled or fully
marginalized (:mod:`ewensbayes.dpmm`), and a reproducible experiment
harness with a command-line front end (:mod:`ewensbayes.harness`,
:mod:`ewensbayes.cli`).
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    InsufficientDrawsError,
    InvalidPartitionError,
    QuadratureError,
    RootBracketError,
)
from .med import Partition
from .posterior import GammaPriorSpec, JeffreysPriorSpec, MCMCConfig, PriorSpec
from .quadrature import QuadratureConfig

__all__ = [
    "__version__",
    "DomainError",
    "InsufficientDrawsError",
    "InvalidPartitionError",
    "QuadratureError",
    "RootBracketError",
    "Partition",
    "GammaPriorSpec",
    "JeffreysPriorSpec",
    "MCMCConfig",
    "PriorSpec",
    "QuadratureConfig",
]
