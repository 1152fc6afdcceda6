import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chacharot.arx import (
    CHACHA20,
    COLUMNS,
    DomainError,
    QuarterRoundParams,
    column_round,
    diagonal_round,
    format_state,
    inverse_permute_rounds,
    inverse_quarter_round,
    pack_words,
    parse_state,
    permute_rounds,
    permute_rounds_np,
    quarter_round,
    quarter_round_np,
    quarter_round_trace,
    rotate,
    rotate_packed,
    round_,
    unpack_words,
)

from .oracles import qr_straight_line

TOY = QuarterRoundParams(4, 1, 3, 2, 1)


class TestRotate:
    def test_single_bit(self):
        assert rotate(0b0001, 1, 4) == 0b0010

    def test_zero_distance(self):
        assert rotate(0xB, 0, 4) == 0xB

    def test_top_bit_wraps(self):
        assert rotate(0x80000000, 1, 32) == 0x00000001

    def test_vector_and_state(self):
        assert rotate((1, 2, 4, 8), 1, 4) == (2, 4, 8, 1)
        assert rotate(tuple(range(16)), 2, 4) == tuple(rotate(v, 2, 4) for v in range(16))

    @pytest.mark.parametrize("bad", [(1, 4, 4), (16, 1, 4), (-1, 1, 4)])
    def test_domain_errors(self, bad):
        with pytest.raises(DomainError):
            rotate(*bad)

    @pytest.mark.parametrize("w", range(2, 9))
    def test_inverse_exhaustive(self, w):
        for r in range(w):
            for x in range(1 << w):
                assert rotate(rotate(x, r, w), (w - r) % w, w) == x

    @given(st.lists(st.integers(0, 2**8 - 1), min_size=16, max_size=16), st.integers(0, 7), st.integers(0, 3))
    def test_rotation_commutes_with_column_extraction(self, state, r, col):
        rotated = rotate(state, r, 8)
        assert [rotated[i] for i in COLUMNS[col]] == list(rotate([state[i] for i in COLUMNS[col]], r, 8))


class TestQuarterRound:
    def test_rfc_vector(self):
        x = (0x11111111, 0x01020304, 0x9B8D6F43, 0x01234567)
        assert quarter_round(CHACHA20, x) == (0xEA2A92F4, 0xCB1CF8CE, 0x4581472E, 0x5881C4BB)

    def test_zero(self):
        assert quarter_round(TOY, (0, 0, 0, 0)) == (0, 0, 0, 0)
        assert quarter_round(CHACHA20, (0, 0, 0, 0)) == (0, 0, 0, 0)

    def test_toy_hand_example(self):
        assert quarter_round(TOY, (1, 0, 0, 0)) == (2, 6, 2, 0)

    def test_trace_hand_example(self):
        t = quarter_round_trace(TOY, (1, 0, 0, 0))
        assert (t.b0, t.b3, t.b2, t.b1) == (1, 2, 2, 1)
        assert t.y == (2, 6, 2, 0)
        assert quarter_round_trace(TOY, (0, 0, 0, 0)) == (0, 0, 0, 0, (0, 0, 0, 0))

    def test_trace_consistent(self):
        rng = random.Random(1)
        for _ in range(10_000):
            x = [rng.getrandbits(32) for _ in range(4)]
            assert quarter_round_trace(CHACHA20, x).y == quarter_round(CHACHA20, x)

    def test_matches_straight_line_oracle(self):
        rng = random.Random(2)
        for params in (CHACHA20, TOY, QuarterRoundParams(5, 4, 3, 2, 1)):
            for _ in range(2000):
                x = [rng.getrandbits(params.w) for _ in range(4)]
                assert quarter_round(params, x) == qr_straight_line(*x, params.rots, params.w)

    def test_numpy_twin(self):
        rng = np.random.default_rng(3)
        x = [rng.integers(0, 2**32, 1000, dtype=np.uint64) for _ in range(4)]
        ys = quarter_round_np(CHACHA20, *x)
        for i in range(1000):
            assert tuple(int(y[i]) for y in ys) == quarter_round(CHACHA20, [int(v[i]) for v in x])

    def test_inverse_examples(self):
        assert inverse_quarter_round(TOY, (2, 6, 2, 0)) == (1, 0, 0, 0)
        assert inverse_quarter_round(TOY, (0, 0, 0, 0)) == (0, 0, 0, 0)

    @pytest.mark.parametrize("rots", [(1, 3, 2, 1), (0, 0, 0, 0), (3, 1, 2, 3)])
    def test_bijective_at_w4(self, rots):
        params = QuarterRoundParams(4, *rots)
        seen = set()
        for v in range(1 << 16):
            x = unpack_words(v, 4, 4)
            y = quarter_round(params, x)
            assert inverse_quarter_round(params, y) == x
            seen.add(y)
        assert len(seen) == 1 << 16

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            QuarterRoundParams(4, 4, 0, 0, 0)
        with pytest.raises(DomainError):
            QuarterRoundParams(33, 1, 1, 1, 1)


def _random_state(rng, w):
    return tuple(rng.getrandbits(w) for _ in range(16))


def _scalar_diagonal(params, X):
    # independent index arithmetic: x[row][(i + row) mod 4]
    grid = [list(X[4 * row: 4 * row + 4]) for row in range(4)]
    for i in range(4):
        cells = [(row, (i + row) % 4) for row in range(4)]
        y = qr_straight_line(*(grid[a][b] for a, b in cells), params.rots, params.w)
        for (a, b), v in zip(cells, y):
            grid[a][b] = v
    return tuple(v for row in grid for v in row)


class TestRounds:
    def test_zero_state(self):
        zero = (0,) * 16
        assert column_round(TOY, zero) == zero
        assert diagonal_round(TOY, zero) == zero

    def test_column_zero_example(self):
        X = [0] * 16
        X[0] = 1
        Y = column_round(TOY, X)
        assert [Y[0], Y[4], Y[8], Y[12]] == [2, 6, 2, 0]
        assert all(Y[i] == 0 for i in range(16) if i not in (0, 4, 8, 12))

    def test_diagonal_against_scalar(self):
        rng = random.Random(4)
        for _ in range(1000):
            X = _random_state(rng, 32)
            assert diagonal_round(CHACHA20, X) == _scalar_diagonal(CHACHA20, X)

    def test_identity_and_composition(self):
        rng = random.Random(5)
        for _ in range(1000):
            X = _random_state(rng, 32)
            assert permute_rounds(CHACHA20, X, 0) == X
            assert permute_rounds(CHACHA20, X, 2) == diagonal_round(CHACHA20, column_round(CHACHA20, X))

    def test_zero_fixed_point(self):
        for i in range(21):
            assert permute_rounds(CHACHA20, (0,) * 16, i) == (0,) * 16

    def test_inverse_rounds(self):
        rng = random.Random(6)
        X = _random_state(rng, 32)
        assert inverse_permute_rounds(CHACHA20, permute_rounds(CHACHA20, X, 7), 7) == X

    def test_numpy_rounds(self):
        rng = random.Random(7)
        states = [_random_state(rng, 6) for _ in range(50)]
        params = QuarterRoundParams(6, 5, 3, 2, 1)
        out = permute_rounds_np(params, np.array(states, dtype=np.uint64), 5)
        for row, X in zip(out, states):
            assert tuple(int(v) for v in row) == permute_rounds(params, X, 5)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            round_(TOY, (0,) * 16, "row")

    def test_negative_rounds(self):
        with pytest.raises(DomainError):
            permute_rounds(TOY, (0,) * 16, -1)


class TestEncoding:
    def test_hex_round_trip(self):
        X = tuple(range(16))
        text = format_state(X, 32)
        assert text.split()[1] == "00000001"
        assert parse_state(text, 32) == X
        assert format_state(X, 6).split()[15] == "0f"

    def test_parse_rejects(self):
        with pytest.raises(DomainError):
            parse_state("0 1 2", 4)
        with pytest.raises(DomainError):
            parse_state(" ".join(["10"] * 16), 4)

    def test_packing(self):
        assert pack_words((1, 0, 0, 0), 4) == 1
        assert unpack_words(pack_words((2, 6, 2, 0), 4), 4, 4) == (2, 6, 2, 0)
        assert rotate_packed(pack_words((1, 8, 3, 0), 4), 1, 4, 4) == pack_words((2, 1, 6, 0), 4)
