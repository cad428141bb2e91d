"""Exact combinatorics and small-scale quantum query simulation for
double-sided zero search and single-round sponge one-wayness."""

from .bounds import BoundKind, bound_check, bound_value
from .errors import (ConfigurationError, ContractViolation, DomainError,
                     QueryBudgetExceeded, ResourceError, SpongeSymError)
from .instances import (MarkedFunction, OracleInstance, build_nonuniform_worst_case,
                        build_uniform_worst_case, reduce_sponge_inversion)
from .pairs import count_x_pairs, pair_count_distribution, sample_dx
from .permgroup import (Permutation, SubsetPairSpec, YoungSubgroupSpec, compose,
                        sponge_spec, zero_pair_spec)
from .qsim import AttackReport, QueryState, distinguishing_experiment, grover_attack
from .sponge import SpongeParams, one_wayness_game, sponge_eval

__version__ = "0.1.0"
