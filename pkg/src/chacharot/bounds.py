"""Exact rotational probabilities of modular addition and ChaCha rounds.

Everything here is exact: probabilities are ``fractions.Fraction`` values
(always reduced) and counts are Python ints. No floats are involved.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from .arx import DomainError, check_rot

VARIANTS = ("chain", "corrected")
QUARTER_ROUNDS_PER_ROUND = 4


def _check_w_r(w: int, r: int) -> None:
    if w < 2:
        raise DomainError(f"word size must be at least 2, got {w}")
    check_rot(r, w)


def _check_k(k: int, least: int) -> None:
    if k < least:
        raise DomainError(f"addend count must be at least {least}, got {k}")


def daum_prob(w: int, r: int) -> Fraction:
    """Probability that two-word addition commutes with a rotation by ``r``."""
    _check_w_r(w, r)
    return Fraction((2**r + 1) * (2 ** (w - r) + 1), 2 ** (w + 2))


def _multiset(a: int, k: int) -> int:
    # C(a + k, a), zero whenever a is negative
    if a < 0:
        return 0
    return comb(a + k, k)


def f_count(q: int, k: int, w: int) -> int:
    """Number of k-tuples of q-bit integers whose sum, reduced mod 2^w, is below 2^q.

    Closed inclusion-exclusion form: for each wrap count h the bounded
    compositions of ``h*2^w + l`` (``0 <= l < 2^q``) are summed through the
    hockey-stick identity, leaving two binomials per term.
    """
    if not 1 <= q <= w - 1:
        raise DomainError(f"q must satisfy 1 <= q <= {w - 1}, got {q}")
    _check_k(k, 2)
    total = 0
    top = k * (2**q - 1) // 2**w
    for h in range(top + 1):
        base = h * 2**w
        for j in range(k + 1):
            term = _multiset(base - (j - 1) * 2**q - 1, k) - _multiset(base - j * 2**q - 1, k)
            total += (-1) ** j * comb(k, j) * term
    return total


def multi_add_rot_prob(w: int, k: int, r: int) -> Fraction:
    """Probability that a k-addend modular sum commutes with a rotation by ``r``."""
    _check_w_r(w, r)
    _check_k(k, 2)
    return Fraction(f_count(r, k, w) * f_count(w - r, k, w), 2 ** (k * w))


def chain_prob(w: int, r: int) -> Fraction:
    """Probability that the 2-addend and 3-addend commutations hold together."""
    d = daum_prob(w, r)
    return d * (2**r + 2) * (2 ** (w - r) + 2) / (9 * 2**w)


def triple_prob(w: int, r: int) -> Fraction:
    """Three-addend commutation probability via the closed form.

    Equals the chain probability plus a correction that only appears when
    ``r`` is 1 or ``w - 1``. Kept separate from ``multi_add_rot_prob(w, 3, r)``
    so the two routes can check each other.
    """
    p = chain_prob(w, r)
    if r == 1 or r == w - 1:
        half = 2 ** (w - 1)
        if half >= 3:
            p += Fraction(4 * comb(half, half - 3), 2 ** (3 * w))
    return p


@dataclass(frozen=True)
class BoundsPair:
    """Lower/upper bound pair.

    ``lower <= upper`` is not enforced: the corrected lower bound overtakes
    the upper bound at ``r`` in ``{1, w - 1}`` once ``w >= 5``. Check
    ``ordered`` instead.
    """

    lower: Fraction
    upper: Fraction
    variant: str
    rounds: int = 0
    heuristic: bool = False

    @property
    def ordered(self) -> bool:
        return self.lower <= self.upper


def qr_bounds(w: int, r: int, variant: str = "chain") -> BoundsPair:
    """Bounds on the quarter-round rotational probability.

    The upper bound is the squared chain probability in both variants. The
    lower bound is ``D^3 * chain`` for ``"chain"`` (the values Table 1 prints)
    and ``D^3 * triple`` for ``"corrected"`` (the form used for Table 2).
    """
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}, got {variant!r}")
    d = daum_prob(w, r)
    k = chain_prob(w, r)
    third = k if variant == "chain" else triple_prob(w, r)
    return BoundsPair(d**3 * third, k * k, variant)


def multi_round_bounds(w: int, r: int, rounds: int, variant: str = "corrected") -> BoundsPair:
    """Quarter-round bounds raised to the power ``4 * rounds``.

    Rests on treating the input of every round as fresh and uniform, hence
    flagged ``heuristic``.
    """
    if rounds < 1:
        raise DomainError(f"round count must be at least 1, got {rounds}")
    qb = qr_bounds(w, r, variant)
    e = QUARTER_ROUNDS_PER_ROUND * rounds
    return BoundsPair(qb.lower**e, qb.upper**e, variant, rounds=rounds, heuristic=True)


def fixed_string_count(w: int, k: int, r: int) -> int:
    """Number of k-word vectors left unchanged by a parallel rotation by ``r``."""
    _check_w_r(w, r)
    _check_k(k, 1)
    return 2 ** (k * gcd(w, r))


def expected_collisions(w: int, k: int, r: int) -> Fraction:
    """Expected number of rotational collisions of a uniform random permutation
    of the k-word space. Not a probability; it exceeds 1."""
    _check_w_r(w, r)
    _check_k(k, 1)
    n = 2 ** (w * k)
    g = k * gcd(w, r)
    return Fraction(n + 2 ** (2 * g) - 2 ** (g + 1), n - 1)


def random_collision_prob(w: int, words: int = 4) -> Fraction:
    """Per-input collision probability printed for a random map, ``2^(-words*w)``."""
    return Fraction(1, 2 ** (words * w))
