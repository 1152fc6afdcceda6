"""Exhaustive and sampled rotational-collision experiments.

Exhaustive censuses enumerate an index range ``[0, 2^bits)`` where word ``i``
of an input is ``(index >> i*w) & mask``. The range is cut into contiguous
chunks that are counted independently (numpy releases the GIL, so a thread
pool gives real parallelism) and the integer counts are summed, so results
do not depend on the worker count or on completion order.
"""

import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Callable

import numpy as np
from scipy.stats import binomtest

from .arx import (
    DomainError,
    QuarterRoundParams,
    check_rot,
    check_word_bits,
    permute_rounds_np,
    quarter_round_np,
    quarter_round_trace_np,
    rotate_np,
)
from .rng import SplitMix64, derive_seed, splitmix64_block

CENSUS_LIMIT_BITS = 28
MC_LIMIT_BITS = 20
CHUNK_BITS = 20
SAMPLE_CHUNK = 1 << 16


class InfeasibleSize(Exception):
    """The requested search space exceeds a size guard."""

    def __init__(self, guard: str, bits: int, limit: int):
        super().__init__(
            f"search space of 2^{bits} exceeds guard {guard} <= {limit}; pass force=True (--force) to run anyway"
        )
        self.guard = guard
        self.bits = bits
        self.limit = limit


@dataclass(frozen=True)
class CensusResult:
    count: int
    total: int
    config: dict = field(default_factory=dict)

    @property
    def probability(self) -> Fraction:
        return Fraction(self.count, self.total)


@dataclass(frozen=True)
class SampledEstimate:
    hits: int
    samples: int
    estimate: float
    low: float
    high: float
    seed: int
    config: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MeanEstimate:
    """Sample mean of a per-trial count with a normal 95% interval."""

    mean: float
    stderr: float
    low: float
    high: float
    trials: int
    seed: int
    min_count: int
    max_count: int
    config: dict = field(default_factory=dict)


def to_dict(result) -> dict:
    return asdict(result)


def _guard(name: str, bits: int, limit: int, force: bool) -> None:
    if bits > limit and not force:
        raise InfeasibleSize(name, bits, limit)


def default_workers() -> int:
    return os.cpu_count() or 1


def parallel_count(count_range: Callable[[int, int], int], total: int, workers: int | None = None,
                   chunk: int = 1 << CHUNK_BITS) -> int:
    """Sum ``count_range(start, stop)`` over contiguous chunks of ``[0, total)``."""
    bounds = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
    workers = workers or default_workers()
    if workers == 1 or len(bounds) == 1:
        return sum(count_range(a, b) for a, b in bounds)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda ab: count_range(*ab), bounds))


def _split(start: int, stop: int, w: int, k: int) -> list[np.ndarray]:
    idx = np.arange(start, stop, dtype=np.uint64)
    m = np.uint64((1 << w) - 1)
    return [(idx >> np.uint64(i * w)) & m for i in range(k)]


def qr_census(params: QuarterRoundParams, r: int, workers: int | None = None,
              force: bool = False, limit: int = CENSUS_LIMIT_BITS) -> CensusResult:
    """Count quarter-round inputs x with Q(rot x) == rot Q(x)."""
    w = params.w
    check_rot(r, w)
    _guard("4w", 4 * w, limit, force)

    def count(start, stop):
        x = _split(start, stop, w, 4)
        y = quarter_round_np(params, *x)
        yr = quarter_round_np(params, *(rotate_np(v, r, w) for v in x))
        ok = np.ones(stop - start, dtype=bool)
        for a, b in zip(y, yr):
            ok &= rotate_np(a, r, w) == b
        return int(np.count_nonzero(ok))

    n = parallel_count(count, 1 << (4 * w), workers)
    return CensusResult(n, 1 << (4 * w), {"mode": "qr", "w": w, "rots": list(params.rots), "r": r})


def condition_census(params: QuarterRoundParams, r: int, workers: int | None = None,
                     force: bool = False, limit: int = CENSUS_LIMIT_BITS) -> CensusResult:
    """Count inputs satisfying the four addition/rotation commutation conditions.

    The conditions are evaluated on the intermediates of a single forward
    evaluation (no rotated evaluation is run).
    """
    w = params.w
    check_rot(r, w)
    _guard("4w", 4 * w, limit, force)
    m = np.uint64(params.mask)

    def rot(v):
        return rotate_np(v, r, w)

    def count(start, stop):
        x0, x1, x2, x3 = _split(start, stop, w, 4)
        b0, b1, b2, b3, y0, y1, y2, y3 = quarter_round_trace_np(params, x0, x1, x2, x3)
        ok = ((rot(x0) + rot(x1)) & m) == rot(b0)
        ok &= ((rot(b3) + rot(x2)) & m) == rot(b2)
        ok &= ((rot(b0) + rot(b1)) & m) == rot(y0)
        ok &= ((rot(y3) + rot(b2)) & m) == rot(y2)
        return int(np.count_nonzero(ok))

    n = parallel_count(count, 1 << (4 * w), workers)
    return CensusResult(n, 1 << (4 * w), {"mode": "conditions", "w": w, "rots": list(params.rots), "r": r})


def addition_census(w: int, k: int, r: int, workers: int | None = None,
                    force: bool = False, limit: int = CENSUS_LIMIT_BITS) -> CensusResult:
    """Count k-tuples whose modular sum commutes with a rotation by ``r``."""
    check_word_bits(w)
    check_rot(r, w)
    if k < 1:
        raise DomainError(f"addend count must be positive, got {k}")
    _guard("kw", k * w, limit, force)
    m = np.uint64((1 << w) - 1)

    def count(start, stop):
        a = _split(start, stop, w, k)
        lhs = np.zeros(stop - start, dtype=np.uint64)
        plain = np.zeros(stop - start, dtype=np.uint64)
        for v in a:
            lhs = (lhs + rotate_np(v, r, w)) & m
            plain = (plain + v) & m
        return int(np.count_nonzero(lhs == rotate_np(plain, r, w)))

    n = parallel_count(count, 1 << (k * w), workers)
    return CensusResult(n, 1 << (k * w), {"mode": "addition", "w": w, "k": k, "r": r})


def chain_census(w: int, r: int, workers: int | None = None,
                 force: bool = False, limit: int = CENSUS_LIMIT_BITS) -> CensusResult:
    """Count triples where both the pair sum and the triple sum commute with rotation."""
    check_word_bits(w)
    check_rot(r, w)
    _guard("3w", 3 * w, limit, force)
    m = np.uint64((1 << w) - 1)

    def count(start, stop):
        a, b, c = _split(start, stop, w, 3)
        ra, rb, rc = (rotate_np(v, r, w) for v in (a, b, c))
        ab = (a + b) & m
        pair = ((ra + rb) & m) == rotate_np(ab, r, w)
        triple = ((ra + rb + rc) & m) == rotate_np((ab + c) & m, r, w)
        return int(np.count_nonzero(pair & triple))

    n = parallel_count(count, 1 << (3 * w), workers)
    return CensusResult(n, 1 << (3 * w), {"mode": "chain", "w": w, "r": r})


def wilson_interval(hits: int, samples: int) -> tuple[float, float]:
    ci = binomtest(hits, samples).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def random_states(seed: int, start: int, count: int, w: int) -> np.ndarray:
    """States ``start .. start+count-1`` of the sample stream, shape ``(count, 16)``.

    State ``s`` takes generator outputs ``16s+1 .. 16s+16`` (row-major),
    each truncated to its low ``w`` bits.
    """
    raw = splitmix64_block(seed, 16 * start, 16 * count)
    return (raw & np.uint64((1 << w) - 1)).reshape(count, 16)


def sampled_round_census(params: QuarterRoundParams, r: int, rounds: int, samples: int,
                         seed: int, workers: int | None = None) -> SampledEstimate:
    """Estimate Pr[R^i(rot X) == rot R^i(X)] over uniformly drawn states."""
    w = params.w
    check_rot(r, w)
    if samples < 1:
        raise DomainError(f"sample count must be positive, got {samples}")
    if rounds < 0:
        raise DomainError(f"round count must be non-negative, got {rounds}")

    def count(start, stop):
        X = random_states(seed, start, stop - start, w)
        Y = permute_rounds_np(params, X, rounds)
        Z = permute_rounds_np(params, rotate_np(X, r, w), rounds)
        return int(np.count_nonzero(np.all(rotate_np(Y, r, w) == Z, axis=1)))

    hits = parallel_count(count, samples, workers, chunk=SAMPLE_CHUNK)
    low, high = wilson_interval(hits, samples)
    config = {"mode": "round-sample", "w": w, "rots": list(params.rots), "r": r, "rounds": rounds}
    return SampledEstimate(hits, samples, hits / samples, low, high, seed, config)


def rotation_map(w: int, k: int, r: int) -> np.ndarray:
    """``out[x]`` is the packed parallel rotation of packed k-word vector ``x``."""
    words = _split(0, 1 << (w * k), w, k)
    out = np.zeros(1 << (w * k), dtype=np.uint64)
    for i, v in enumerate(words):
        out |= rotate_np(v, r, w) << np.uint64(i * w)
    return out.astype(np.int64)


def shuffled(n: int, gen: SplitMix64) -> list[int]:
    """Fisher-Yates shuffle of ``range(n)`` driven by ``gen``."""
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = gen.randbelow(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def collision_count(perm, rotmap: np.ndarray) -> int:
    p = np.asarray(perm, dtype=np.int64)
    return int(np.count_nonzero(p[rotmap] == rotmap[p]))


def random_perm_collision_mc(w: int, k: int, r: int, trials: int, seed: int,
                             force: bool = False, limit: int = MC_LIMIT_BITS) -> MeanEstimate:
    """Mean number of rotational collisions of uniformly random permutations.

    Trial ``t`` shuffles with the substream ``derive_seed(seed, t)``.
    """
    check_word_bits(w)
    check_rot(r, w)
    if trials < 1:
        raise DomainError(f"trial count must be positive, got {trials}")
    if k < 1:
        raise DomainError(f"word count must be positive, got {k}")
    _guard("wk", w * k, limit, force)
    n = 1 << (w * k)
    rotmap = rotation_map(w, k, r)
    counts = [collision_count(shuffled(n, SplitMix64(derive_seed(seed, t))), rotmap) for t in range(trials)]
    mean = statistics.fmean(counts)
    se = statistics.stdev(counts) / sqrt(trials) if trials > 1 else 0.0
    config = {"mode": "random-perm", "w": w, "k": k, "r": r}
    return MeanEstimate(mean, se, mean - 1.96 * se, mean + 1.96 * se, trials, seed,
                        min(counts), max(counts), config)
