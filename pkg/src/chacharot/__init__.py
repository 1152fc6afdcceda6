"""Rotational analysis toolkit for the ChaCha permutation."""

from .arx import (
    CHACHA20,
    DomainError,
    QrTrace,
    QuarterRoundParams,
    column_round,
    diagonal_round,
    inverse_quarter_round,
    permute_rounds,
    quarter_round,
    quarter_round_trace,
    rotate,
    round_,
)
from .bounds import (
    BoundsPair,
    chain_prob,
    daum_prob,
    expected_collisions,
    f_count,
    fixed_string_count,
    multi_add_rot_prob,
    multi_round_bounds,
    qr_bounds,
    triple_prob,
)
from .distinguisher import OracleSpec, TrialConfig, make_oracle, run_distinguisher, run_trials
from .search import (
    CensusResult,
    InfeasibleSize,
    addition_census,
    chain_census,
    condition_census,
    qr_census,
    random_perm_collision_mc,
    sampled_round_census,
)

__version__ = "0.1.0"
