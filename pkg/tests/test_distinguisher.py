from math import ceil

import pytest
from scipy.stats import binom

from chacharot.arx import QuarterRoundParams, pack_words, permute_rounds, rotate_packed, unpack_words
from chacharot.bounds import qr_bounds
from chacharot.distinguisher import (
    LazyRandomPermutation,
    OracleSpec,
    TrialConfig,
    default_budget,
    make_oracle,
    run_distinguisher,
    run_trials,
)

TOY = QuarterRoundParams(4, 1, 3, 2, 1)
QR_SPEC = OracleSpec("quarter-round-perm", TOY)


class Recorder:
    def __init__(self, inner):
        self.inner = inner
        self.calls = 0
        self.inputs = []

    def query(self, x):
        self.calls += 1
        self.inputs.append(x)
        return self.inner.query(x)


class TestOracles:
    def test_pinned_zero(self):
        assert make_oracle(OracleSpec("random-perm", space_bits=16, seed=4)).query(0) == 0

    def test_deterministic(self):
        a = make_oracle(OracleSpec("random-perm", space_bits=16, seed=9))
        b = make_oracle(OracleSpec("random-perm", space_bits=16, seed=9))
        xs = [5, 17, 5, 60000, 1]
        assert [a.query(x) for x in xs] == [b.query(x) for x in xs]

    def test_injective_and_consistent(self):
        p = LazyRandomPermutation(12, seed=1)
        out = {x: p.query(x) for x in range(0, 4096, 3)}
        assert len(set(out.values())) == len(out)
        assert all(p.query(x) == y for x, y in out.items())

    def test_exhausts_to_a_permutation(self):
        p = LazyRandomPermutation(4, seed=2, pin_zero=False)
        assert sorted(p.query(x) for x in range(16)) == list(range(16))

    def test_quarter_round_oracle(self):
        o = make_oracle(QR_SPEC)
        assert o.query(pack_words((1, 0, 0, 0), 4)) == pack_words((2, 6, 2, 0), 4)

    def test_chacha_oracle(self):
        o = make_oracle(OracleSpec("chacha-perm", TOY, rounds=3))
        X = tuple(range(16))
        assert unpack_words(o.query(pack_words(X, 4)), 4, 16) == permute_rounds(TOY, X, 3)
        assert o.query(0) == 0

    def test_space_guard(self):
        with pytest.raises(ValueError):
            make_oracle(OracleSpec("random-perm", space_bits=64))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_oracle(OracleSpec("aes"))


class TestRunDistinguisher:
    def test_zero_budget(self):
        v = run_distinguisher(make_oracle(QR_SPEC), 4, 4, 1, 0, seed=1)
        assert (v.decision, v.collisions, v.queries) == ("random", 0, 0)

    def test_query_count_and_soundness(self):
        for seed in range(40):
            oracle = make_oracle(QR_SPEC)
            v = run_distinguisher(oracle, 4, 4, 1, 50, seed)
            assert v.queries <= 2 * v.budget
            assert (v.decision == "chacha") == (v.collisions >= 1)
            if v.decision == "chacha":
                o = make_oracle(QR_SPEC)
                x = v.witness
                assert rotate_packed(o.query(x), 1, 4, 4) == o.query(rotate_packed(x, 1, 4, 4))

    def test_zero_never_sampled(self):
        rec = Recorder(make_oracle(OracleSpec("random-perm", space_bits=2, seed=0)))
        run_distinguisher(rec, 2, 1, 1, 500, seed=3)
        assert 0 not in rec.inputs

    def test_default_budget(self):
        upper = qr_bounds(4, 1).upper
        assert default_budget(upper) == 365 == ceil(5 / float(upper))
        assert default_budget(upper, 1) == 73


class TestTrials:
    def test_zero_budget(self):
        s = run_trials(TrialConfig(QR_SPEC, 4, 1, 0, 10, seed=0))
        assert s.tpr == s.fpr == s.advantage == 0

    def test_log_entries(self):
        s = run_trials(TrialConfig(QR_SPEC, 4, 1, 20, 3, seed=0))
        assert len(s.log) == 6
        assert {"trial", "oracle_kind", "seed", "N", "collisions", "decision"} <= set(s.log[0])

    def test_doubling_budget_monotone(self):
        small = run_trials(TrialConfig(QR_SPEC, 4, 1, 40, 60, seed=8))
        large = run_trials(TrialConfig(QR_SPEC, 4, 1, 80, 60, seed=8))
        arx = [(a, b) for a, b in zip(small.log, large.log) if a["oracle_kind"] != "random-perm"]
        assert all(b["decision"] == "chacha" for a, b in arx if a["decision"] == "chacha")
        assert large.tpr >= small.tpr

    def test_tpr_matches_census(self):
        # nonzero inputs only: 746 of the 2^16 - 1 candidates collide
        p = 1 - (1 - 746 / 65535) ** 365
        s = run_trials(TrialConfig(QR_SPEC, 4, 1, 365, 500, seed=99))
        lo, hi = binom.ppf(0.005, 500, p), binom.ppf(0.995, 500, p)
        assert lo <= s.true_positives <= hi
        assert abs(p - 0.985) < 0.001
