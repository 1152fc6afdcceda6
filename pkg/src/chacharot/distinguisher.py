"""Toy-scale rotational distinguisher game.

Oracle inputs and outputs are packed integers: word ``i`` of a ``k``-word
vector sits at bits ``[i*w, (i+1)*w)``. The ARX oracles evaluate the quarter
round (``k = 4``) or ``rounds`` rounds of the permutation (``k = 16``); the
random oracle is a lazily sampled uniform permutation of the same space.
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import ceil

from scipy.stats import binomtest

from .arx import (
    DomainError,
    QuarterRoundParams,
    check_rot,
    pack_words,
    permute_rounds,
    quarter_round,
    rotate_packed,
    unpack_words,
)
from .rng import SplitMix64, derive_seed

KINDS = ("quarter-round-perm", "chacha-perm", "random-perm")
RANDOM_LIMIT_BITS = 32
DEFAULT_BUDGET_FACTOR = 5


@dataclass(frozen=True)
class OracleSpec:
    kind: str
    params: QuarterRoundParams | None = None
    rounds: int = 0
    pin_zero: bool = True
    seed: int = 0
    space_bits: int | None = None

    @property
    def words(self) -> int:
        return 16 if self.kind == "chacha-perm" else 4

    @property
    def bits(self) -> int:
        if self.space_bits is not None:
            return self.space_bits
        if self.params is None:
            raise DomainError("oracle needs params or an explicit space_bits")
        return self.words * self.params.w


class ArxOracle:
    def __init__(self, spec: OracleSpec):
        if spec.params is None:
            raise DomainError(f"{spec.kind} oracle needs quarter-round params")
        self.spec = spec
        self.calls = 0

    def query(self, x: int) -> int:
        self.calls += 1
        p = self.spec.params
        words = unpack_words(x, p.w, self.spec.words)
        if self.spec.kind == "quarter-round-perm":
            y = quarter_round(p, words)
        else:
            y = permute_rounds(p, words, self.spec.rounds)
        return pack_words(y, p.w)


class LazyRandomPermutation:
    """Uniform random permutation of ``[0, 2^bits)`` sampled on demand.

    Each fresh input gets an output drawn uniformly from the values not yet
    assigned (rejection against the inverse table). With ``pin_zero`` the
    permutation is conditioned on fixing 0.
    """

    def __init__(self, bits: int, seed: int, pin_zero: bool = True):
        if not 1 <= bits <= RANDOM_LIMIT_BITS:
            raise DomainError(f"random permutation space must be 2^1..2^{RANDOM_LIMIT_BITS}, got 2^{bits}")
        self.size = 1 << bits
        self.gen = SplitMix64(seed)
        self.forward: dict[int, int] = {}
        self.backward: dict[int, int] = {}
        self.calls = 0
        if pin_zero:
            self.forward[0] = 0
            self.backward[0] = 0

    def query(self, x: int) -> int:
        self.calls += 1
        if not 0 <= x < self.size:
            raise DomainError(f"query {x:#x} outside the permutation domain")
        y = self.forward.get(x)
        if y is None:
            if len(self.backward) >= self.size:
                raise RuntimeError("permutation table exhausted")
            y = self.gen.randbelow(self.size)
            while y in self.backward:
                y = self.gen.randbelow(self.size)
            self.forward[x] = y
            self.backward[y] = x
        return y


def make_oracle(spec: OracleSpec):
    if spec.kind == "random-perm":
        return LazyRandomPermutation(spec.bits, spec.seed, spec.pin_zero)
    if spec.kind in ("quarter-round-perm", "chacha-perm"):
        return ArxOracle(spec)
    raise DomainError(f"unknown oracle kind {spec.kind!r}; expected one of {KINDS}")


@dataclass(frozen=True)
class DistinguisherVerdict:
    budget: int
    collisions: int
    decision: str
    queries: int
    witness: int | None = None


def run_distinguisher(oracle, w: int, k: int, r: int, budget: int, seed: int) -> DistinguisherVerdict:
    """Query rotational pairs until one collides or the budget runs out.

    Inputs are drawn uniformly from the nonzero k-word vectors: zero is a
    fixed point of every oracle here and would collide trivially.
    """
    check_rot(r, w)
    if budget < 0:
        raise DomainError(f"budget must be non-negative, got {budget}")
    gen = SplitMix64(seed)
    nonzero = (1 << (k * w)) - 1
    start = oracle.calls
    for _ in range(budget):
        x = gen.randbelow(nonzero) + 1
        y = oracle.query(x)
        z = oracle.query(rotate_packed(x, r, w, k))
        if rotate_packed(y, r, w, k) == z:
            return DistinguisherVerdict(budget, 1, "chacha", oracle.calls - start, x)
    return DistinguisherVerdict(budget, 0, "random", oracle.calls - start)


def default_budget(upper: Fraction, factor: int = DEFAULT_BUDGET_FACTOR) -> int:
    """``ceil(factor / upper)`` computed exactly."""
    return ceil(Fraction(factor) / upper)


@dataclass(frozen=True)
class TrialConfig:
    arx: OracleSpec
    w: int
    r: int
    budget: int
    trials: int
    seed: int
    pin_zero: bool = True

    @property
    def k(self) -> int:
        return self.arx.words


@dataclass
class TrialStats:
    trials: int
    true_positives: int
    false_positives: int
    seed: int
    tpr_ci: tuple[float, float] = (0.0, 0.0)
    fpr_ci: tuple[float, float] = (0.0, 0.0)
    log: list[dict] = field(default_factory=list)

    @property
    def tpr(self) -> float:
        return self.true_positives / self.trials

    @property
    def fpr(self) -> float:
        return self.false_positives / self.trials

    @property
    def advantage(self) -> float:
        return self.tpr - self.fpr

    def summary(self) -> dict:
        return {
            "trials": self.trials,
            "true_positives": self.true_positives,
            "false_positives": self.false_positives,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "advantage": self.advantage,
            "tpr_ci": list(self.tpr_ci),
            "fpr_ci": list(self.fpr_ci),
            "seed": self.seed,
        }


def exact_interval(hits: int, n: int, level: float = 0.95) -> tuple[float, float]:
    ci = binomtest(hits, n).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


def run_trials(config: TrialConfig) -> TrialStats:
    """Play the game ``trials`` times against each oracle kind.

    Trial ``t`` uses query seed ``derive_seed(seed, 2t)`` for both oracles
    and permutation seed ``derive_seed(seed, 2t + 1)`` for the random one.
    """
    if config.trials < 1:
        raise DomainError(f"trial count must be positive, got {config.trials}")
    k = config.k
    tp = fp = 0
    log = []
    for t in range(config.trials):
        qseed = derive_seed(config.seed, 2 * t)
        pseed = derive_seed(config.seed, 2 * t + 1)
        arx = make_oracle(config.arx)
        rnd = make_oracle(OracleSpec("random-perm", pin_zero=config.pin_zero, seed=pseed,
                                     space_bits=k * config.w))
        for kind, oracle in ((config.arx.kind, arx), ("random-perm", rnd)):
            v = run_distinguisher(oracle, config.w, k, config.r, config.budget, qseed)
            if v.decision == "chacha":
                if kind == "random-perm":
                    fp += 1
                else:
                    tp += 1
            log.append({"trial": t, "oracle_kind": kind, "seed": qseed, "N": config.budget,
                        "collisions": v.collisions, "decision": v.decision, "queries": v.queries,
                        "witness": v.witness})
    return TrialStats(config.trials, tp, fp, config.seed,
                      exact_interval(tp, config.trials), exact_interval(fp, config.trials), log)


def verdict_dict(v: DistinguisherVerdict) -> dict:
    return asdict(v)
