"""Exact laboratory for combinatorial multi-access coded caching.

C caches, one user per r-subset of caches, N files over GF(2^m).  The
package builds the uncoded baseline placement and three coded placements
on real symbol data, runs XOR / subfile delivery, decodes every user both
structurally and through a linear-algebra oracle, and computes exact
rate-memory trade-offs together with the matching converse bound.
"""

from .analysis import (BoundResult, Envelope, TradeoffPoint, achievable_envelope,
                       check_identities, check_optimality_regimes, lower_bound,
                       mkr_point, omega, scheme1_memory, scheme1_memory_roundsum,
                       scheme1_points, scheme2_segment, tradeoff_rows,
                       write_tradeoff_csv)
from .combinatorics import binom, frac, ksubsets, phi, subset_rank, subset_unrank
from .decode import (OracleSession, UndecodableError, decode_corner_all,
                     decode_mkr_user, decode_scheme1_user, decode_scheme2_user,
                     decode_user, oracle_decode_user)
from .delivery import deliver, deliver_scheme2, deliver_xor, measured_rate
from .field import GF2m, field_make
from .linalg import (Eliminator, InconsistentSystemError, LinAlgError,
                     UnderdeterminedSystemError, mat_inv, mat_mul, mat_rank,
                     mat_solve, rref)
from .mds import MdsCode, encode, erasure_decode, rs_generator, systematize, verify_mds
from .model import (BroadcastBatch, CacheContents, InvalidConfigError, LabeledBlock,
                    Library, Message, SchemeConfig, all_distinct_demands,
                    check_demands, demand_of, exhaustive_demands, load_library,
                    make_config, random_demands, random_library, save_library,
                    zero_library)
from .placement import (RoundPlan, codes_for, place, place_corner, place_mkr,
                        place_scheme1, place_scheme2, scheme1_round_plan)
from .simulate import analytic_memory, analytic_rate, run_simulation

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
