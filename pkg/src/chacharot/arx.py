"""ChaCha-style ARX permutation, generic over the word size.

Words are plain Python ints reduced mod 2^w. A word vector is a 4-tuple, a
state is a flat 16-tuple in row-major order (``state[4 * row + col]``).
Vectorized twins of the quarter round (suffix ``_np``) operate on numpy
uint64 arrays and are what the exhaustive searches use.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

MAX_WORD_BITS = 32

WordVec4 = tuple[int, int, int, int]
State = tuple[int, ...]


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


def check_word_bits(w: int) -> int:
    if not 2 <= w <= MAX_WORD_BITS:
        raise DomainError(f"word size must satisfy 2 <= w <= {MAX_WORD_BITS}, got {w}")
    return w


def check_rot(r: int, w: int, allow_zero: bool = False) -> int:
    lo = 0 if allow_zero else 1
    if not lo <= r <= w - 1:
        raise DomainError(f"rotation must satisfy {lo} <= r <= {w - 1}, got {r}")
    return r


@dataclass(frozen=True)
class QuarterRoundParams:
    w: int
    r1: int
    r2: int
    r3: int
    r4: int

    def __post_init__(self):
        check_word_bits(self.w)
        for r in self.rots:
            check_rot(r, self.w, allow_zero=True)

    @property
    def rots(self) -> tuple[int, int, int, int]:
        return (self.r1, self.r2, self.r3, self.r4)

    @property
    def mask(self) -> int:
        return (1 << self.w) - 1

    @classmethod
    def from_rots(cls, w: int, rots: Sequence[int]) -> "QuarterRoundParams":
        if len(rots) != 4:
            raise DomainError(f"expected four rotation constants, got {len(rots)}")
        return cls(w, *rots)


CHACHA20 = QuarterRoundParams(32, 16, 12, 8, 7)


class QrTrace(NamedTuple):
    b0: int
    b1: int
    b2: int
    b3: int
    y: WordVec4


def _rotl(x: int, r: int, w: int, mask: int) -> int:
    return ((x << r) | (x >> (w - r))) & mask


def rotate(value, r: int, w: int):
    """Left-rotate a word, or every word of a vector/state, by ``r`` bits."""
    check_word_bits(w)
    check_rot(r, w, allow_zero=True)
    mask = (1 << w) - 1
    if isinstance(value, (int, np.integer)):
        words = (int(value),)
    else:
        words = tuple(int(v) for v in value)
    for v in words:
        if not 0 <= v <= mask:
            raise DomainError(f"word {v:#x} does not fit in {w} bits")
    out = tuple(_rotl(v, r, w, mask) for v in words)
    if isinstance(value, (int, np.integer)):
        return out[0]
    return out


def rotate_right(value: int, r: int, w: int) -> int:
    return rotate(value, (w - r) % w, w)


def quarter_round_trace(params: QuarterRoundParams, x: Sequence[int]) -> QrTrace:
    w, m = params.w, params.mask
    r1, r2, r3, r4 = params.rots
    x0, x1, x2, x3 = x
    b0 = (x0 + x1) & m
    b3 = _rotl(b0 ^ x3, r1, w, m)
    b2 = (b3 + x2) & m
    b1 = _rotl(b2 ^ x1, r2, w, m)
    y0 = (b0 + b1) & m
    y3 = _rotl(y0 ^ b3, r3, w, m)
    y2 = (y3 + b2) & m
    y1 = _rotl(y2 ^ b1, r4, w, m)
    return QrTrace(b0, b1, b2, b3, (y0, y1, y2, y3))


def quarter_round(params: QuarterRoundParams, x: Sequence[int]) -> WordVec4:
    return quarter_round_trace(params, x).y


def inverse_quarter_round(params: QuarterRoundParams, y: Sequence[int]) -> WordVec4:
    w, m = params.w, params.mask
    r1, r2, r3, r4 = params.rots
    y0, y1, y2, y3 = y
    b1 = _rotl(y1, (w - r4) % w, w, m) ^ y2
    b2 = (y2 - y3) & m
    b3 = _rotl(y3, (w - r3) % w, w, m) ^ y0
    b0 = (y0 - b1) & m
    x1 = _rotl(b1, (w - r2) % w, w, m) ^ b2
    x2 = (b2 - b3) & m
    x3 = _rotl(b3, (w - r1) % w, w, m) ^ b0
    x0 = (b0 - x1) & m
    return (x0, x1, x2, x3)


# Index quadruples (row-major positions) touched by each quarter round.
COLUMNS = tuple(tuple(4 * row + col for row in range(4)) for col in range(4))
DIAGONALS = tuple(tuple(4 * row + (col + row) % 4 for row in range(4)) for col in range(4))


def _lanes(kind: str):
    if kind == "column":
        return COLUMNS
    if kind == "diagonal":
        return DIAGONALS
    raise DomainError(f"unknown round kind {kind!r}")


def round_(params: QuarterRoundParams, X: Sequence[int], kind: str) -> State:
    """One column or diagonal round: four parallel quarter rounds."""
    if len(X) != 16:
        raise DomainError(f"state must have 16 words, got {len(X)}")
    out = list(X)
    for lane in _lanes(kind):
        y = quarter_round(params, [X[i] for i in lane])
        for i, v in zip(lane, y):
            out[i] = v
    return tuple(out)


def column_round(params: QuarterRoundParams, X: Sequence[int]) -> State:
    return round_(params, X, "column")


def diagonal_round(params: QuarterRoundParams, X: Sequence[int]) -> State:
    return round_(params, X, "diagonal")


def round_kind(index: int) -> str:
    """Kind of the ``index``-th round (1-based): odd rounds are column rounds."""
    return "column" if index % 2 == 1 else "diagonal"


def permute_rounds(params: QuarterRoundParams, X: Sequence[int], rounds: int) -> State:
    if rounds < 0:
        raise DomainError(f"round count must be non-negative, got {rounds}")
    X = tuple(X)
    for i in range(1, rounds + 1):
        X = round_(params, X, round_kind(i))
    return X


def inverse_permute_rounds(params: QuarterRoundParams, X: Sequence[int], rounds: int) -> State:
    X = list(X)
    for i in range(rounds, 0, -1):
        for lane in _lanes(round_kind(i)):
            x = inverse_quarter_round(params, [X[j] for j in lane])
            for j, v in zip(lane, x):
                X[j] = v
    return tuple(X)


# Packed encoding: word i occupies bits [i*w, (i+1)*w).

def pack_words(words: Sequence[int], w: int) -> int:
    out = 0
    for i, v in enumerate(words):
        out |= v << (i * w)
    return out


def unpack_words(value: int, w: int, count: int) -> tuple[int, ...]:
    m = (1 << w) - 1
    return tuple((value >> (i * w)) & m for i in range(count))


def rotate_packed(value: int, r: int, w: int, count: int) -> int:
    return pack_words(rotate(unpack_words(value, w, count), r, w), w)


def format_state(X: Sequence[int], w: int) -> str:
    """Space-separated fixed-width lowercase hex, row-major."""
    digits = (w + 3) // 4
    return " ".join(f"{v:0{digits}x}" for v in X)


def parse_state(text: str, w: int) -> State:
    words = tuple(int(tok, 16) for tok in text.split())
    if len(words) != 16:
        raise DomainError(f"state must have 16 words, got {len(words)}")
    mask = (1 << w) - 1
    for v in words:
        if v > mask:
            raise DomainError(f"word {v:#x} does not fit in {w} bits")
    return words


# --- numpy twins ---------------------------------------------------------

def rotate_np(x: np.ndarray, r: int, w: int) -> np.ndarray:
    if r == 0:
        return x
    m = np.uint64((1 << w) - 1)
    return ((x << np.uint64(r)) | (x >> np.uint64(w - r))) & m


def quarter_round_trace_np(params: QuarterRoundParams, x0, x1, x2, x3):
    """Returns ``(b0, b1, b2, b3, y0, y1, y2, y3)`` as uint64 arrays."""
    w = params.w
    m = np.uint64(params.mask)
    r1, r2, r3, r4 = params.rots
    b0 = (x0 + x1) & m
    b3 = rotate_np(b0 ^ x3, r1, w)
    b2 = (b3 + x2) & m
    b1 = rotate_np(b2 ^ x1, r2, w)
    y0 = (b0 + b1) & m
    y3 = rotate_np(y0 ^ b3, r3, w)
    y2 = (y3 + b2) & m
    y1 = rotate_np(y2 ^ b1, r4, w)
    return b0, b1, b2, b3, y0, y1, y2, y3


def quarter_round_np(params: QuarterRoundParams, x0, x1, x2, x3):
    return quarter_round_trace_np(params, x0, x1, x2, x3)[4:]


def permute_rounds_np(params: QuarterRoundParams, states: np.ndarray, rounds: int) -> np.ndarray:
    """Apply ``rounds`` rounds to an ``(n, 16)`` uint64 array of states."""
    out = states.copy()
    for i in range(1, rounds + 1):
        for lane in _lanes(round_kind(i)):
            idx = list(lane)
            ys = quarter_round_np(params, *(out[:, j] for j in idx))
            for j, y in zip(idx, ys):
                out[:, j] = y
    return out
