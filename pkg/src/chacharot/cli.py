"""Command-line front end.

Exit codes: 0 success, 1 usage or domain error, 2 size guard tripped.
"""

import argparse
import csv
import json
import sys
from fractions import Fraction
from importlib import resources

from . import bounds
from .arx import CHACHA20, DomainError, QuarterRoundParams
from .distinguisher import OracleSpec, TrialConfig, default_budget, run_trials
from .render import Report, decimal_text, fraction_text, log2_number, log2_text, prob_dict, prob_text
from .search import (
    InfeasibleSize,
    addition_census,
    chain_census,
    condition_census,
    qr_census,
    random_perm_collision_mc,
    sampled_round_census,
)

# Word size -> rotation constants used by the published toy experiments.
DEFAULT_ROTS = {4: (1, 3, 2, 1), 5: (4, 3, 2, 1), 6: (5, 3, 2, 1), 32: CHACHA20.rots}
TABLE1_CONFIGS = [(4, (1, 3, 2, 1), (1, 2)), (5, (4, 3, 2, 1), (1, 2)), (6, (5, 3, 2, 1), (1, 2, 3))]
TABLE1_COLUMNS = ["w", "rots", "r", "collisions", "lower", "lower_log2", "measured",
                  "upper", "upper_log2", "p_log2"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _rots(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected r1,r2,r3,r4, got {text!r}")
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected four rotation constants, got {text!r}")
    return vals


def _rounds(text: str) -> list[int]:
    try:
        for sep in ("..", "-", ":"):
            if sep in text:
                lo, hi = (int(t) for t in text.split(sep))
                return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A-B, got {text!r}")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {text!r}")
    return v


def _params(args) -> QuarterRoundParams:
    rots = args.rots or DEFAULT_ROTS.get(args.word_bits)
    if rots is None:
        raise UsageError(f"no default rotation constants for w={args.word_bits}; pass --rots")
    return QuarterRoundParams.from_rots(args.word_bits, rots)


def _rot_list(args) -> list[int]:
    return [args.rot] if args.rot is not None else list(range(1, args.word_bits))


def _table1_row(w, rots, r, count):
    qb = bounds.qr_bounds(w, r, "chain")
    measured = Fraction(count, 2 ** (4 * w))
    return [w, ",".join(map(str, rots)), r, count,
            decimal_text(qb.lower), log2_number(qb.lower), decimal_text(measured),
            decimal_text(qb.upper), log2_number(qb.upper),
            log2_number(bounds.random_collision_prob(w))]


def golden_table1() -> str:
    return resources.files("chacharot").joinpath("data/table1.csv").read_text()


def _golden_counts() -> dict:
    lines = golden_table1().splitlines()[1:]
    return {(int(row[0]), int(row[2])): int(row[3]) for row in csv.reader(lines)}


# --- subcommands -----------------------------------------------------------

def cmd_qr_bounds(args) -> Report:
    rows, data = [], []
    for r in _rot_list(args):
        qb = bounds.qr_bounds(args.word_bits, r, args.variant)
        rows.append([r, decimal_text(qb.lower), log2_number(qb.lower),
                     decimal_text(qb.upper), log2_number(qb.upper), qb.ordered])
        data.append({"w": args.word_bits, "r": r, "variant": args.variant,
                     "lower": prob_dict(qb.lower), "upper": prob_dict(qb.upper), "ordered": qb.ordered})
    notes = [f"r={row[0]}: lower bound exceeds upper bound" for row in rows if not row[-1]]
    if len(data) == 1:
        qb = bounds.qr_bounds(args.word_bits, data[0]["r"], args.variant)
        notes = [f"lower: {prob_text(qb.lower)}", f"upper: {prob_text(qb.upper)}"] + notes
    return Report("qr-bounds", {"results": data},
                  ["r", "lower", "lower_log2", "upper", "upper_log2", "ordered"], rows,
                  f"quarter-round bounds, w={args.word_bits}, variant={args.variant}", notes)


def _round_rows(w, r, rounds, variant):
    rows, data = [], []
    for i in rounds:
        b = bounds.multi_round_bounds(w, r, i, variant)
        rows.append([i, log2_text(b.lower), log2_text(b.upper)])
        data.append({"round": i, "lower": prob_dict(b.lower), "upper": prob_dict(b.upper)})
    return rows, data


def cmd_perm_bounds(args) -> Report:
    rounds = args.rounds or list(range(1, 21))
    rows, data = _round_rows(args.word_bits, args.rot, rounds, args.variant)
    return Report("perm-bounds",
                  {"w": args.word_bits, "r": args.rot, "variant": args.variant, "heuristic": True,
                   "rows": data},
                  ["round", "lower", "upper"], rows,
                  f"permutation bounds, w={args.word_bits}, r={args.rot}, variant={args.variant} (heuristic)")


def _census_report(name, fn, args) -> Report:
    params = _params(args)
    rows, data = [], []
    for r in _rot_list(args):
        res = fn(params, r, workers=args.threads, force=args.force)
        rows.append([r, res.count, res.total, decimal_text(res.probability), log2_number(res.probability)])
        data.append({"config": res.config, "count": res.count, "total": res.total,
                     "probability": prob_dict(res.probability)})
    return Report(name, {"results": data}, ["r", "count", "total", "probability", "log2"], rows,
                  f"{name}, w={params.w}, rots={params.rots}")


def cmd_qr_census(args) -> Report:
    return _census_report("qr-census", qr_census, args)


def cmd_cond_census(args) -> Report:
    return _census_report("cond-census", condition_census, args)


def cmd_verify_add(args) -> Report:
    w, k = args.word_bits, args.k
    rows, data = [], []
    for r in _rot_list(args):
        res = addition_census(w, k, r, workers=args.threads, force=args.force)
        formula = bounds.multi_add_rot_prob(w, k, r) * 2 ** (k * w)
        ok = formula == res.count
        rows.append([r, res.count, int(formula), "ok" if ok else "MISMATCH"])
        data.append({"config": res.config, "count": res.count, "total": res.total,
                     "formula_count": int(formula), "match": ok})
    return Report("verify-add", {"results": data}, ["r", "census", "formula", "status"], rows,
                  f"{k}-addend rotational addition, w={w}")


def cmd_chain_census(args) -> Report:
    w = args.word_bits
    rows, data = [], []
    for r in _rot_list(args):
        res = chain_census(w, r, workers=args.threads, force=args.force)
        formula = bounds.chain_prob(w, r) * 2 ** (3 * w)
        ok = formula == res.count
        rows.append([r, res.count, int(formula), "ok" if ok else "MISMATCH"])
        data.append({"config": res.config, "count": res.count, "total": res.total,
                     "formula_count": int(formula), "match": ok})
    return Report("chain-census", {"results": data}, ["r", "census", "formula", "status"], rows,
                  f"chained addition census, w={w}")


def cmd_round_sample(args) -> Report:
    params = _params(args)
    rows, data = [], []
    for i in args.rounds or [1]:
        est = sampled_round_census(params, args.rot, i, args.samples, args.seed, workers=args.threads)
        rows.append([i, est.hits, est.samples, f"{est.estimate:.3e}", f"{est.low:.3e}", f"{est.high:.3e}"])
        data.append({"config": est.config, "hits": est.hits, "samples": est.samples,
                     "estimate": est.estimate, "wilson95": [est.low, est.high], "seed": est.seed})
    return Report("round-sample", {"results": data},
                  ["rounds", "hits", "samples", "estimate", "low", "high"], rows,
                  f"sampled round collisions, w={params.w}, rots={params.rots}, r={args.rot}, seed={args.seed}")


def cmd_fixed_count(args) -> Report:
    rows = [[r, bounds.fixed_string_count(args.word_bits, args.k, r)] for r in _rot_list(args)]
    data = [{"w": args.word_bits, "k": args.k, "r": r, "count": c} for r, c in rows]
    return Report("fixed-count", {"results": data}, ["r", "count"], rows,
                  f"rotation-invariant {args.k}-word vectors, w={args.word_bits}")


def cmd_expected_collisions(args) -> Report:
    w, k = args.word_bits, args.k
    rows, data = [], []
    for r in _rot_list(args):
        e = bounds.expected_collisions(w, k, r)
        entry = {"w": w, "k": k, "r": r, "expected": prob_dict(e)}
        row = [r, fraction_text(e) or "-", decimal_text(e)]
        if args.trials:
            mc = random_perm_collision_mc(w, k, r, args.trials, args.seed, force=args.force)
            entry["monte_carlo"] = {"mean": mc.mean, "stderr": mc.stderr, "trials": mc.trials,
                                    "seed": mc.seed}
            row += [f"{mc.mean:.5f}", f"{mc.stderr:.5f}"]
        rows.append(row)
        data.append(entry)
    cols = ["r", "exact", "decimal"] + (["mc_mean", "mc_stderr"] if args.trials else [])
    return Report("expected-collisions", {"results": data}, cols, rows,
                  f"expected rotational collisions of a random permutation, w={w}, k={k}")


def cmd_distinguish(args) -> Report:
    params = _params(args)
    r = args.rot if args.rot is not None else 1
    if args.oracle == "chacha":
        rounds = (args.rounds or [1])[-1]
        spec = OracleSpec("chacha-perm", params, rounds=rounds)
        upper = bounds.multi_round_bounds(params.w, r, rounds, "chain").upper
    else:
        spec = OracleSpec("quarter-round-perm", params)
        upper = bounds.qr_bounds(params.w, r, "chain").upper
    budget = args.budget if args.budget is not None else default_budget(upper)
    stats = run_trials(TrialConfig(spec, params.w, r, budget, args.trials, args.seed))
    if args.log:
        with open(args.log, "w") as fh:
            for entry in stats.log:
                fh.write(json.dumps(entry) + "\n")
    s = stats.summary()
    rows = [["tpr", f"{stats.tpr:.4f}", f"[{stats.tpr_ci[0]:.4f}, {stats.tpr_ci[1]:.4f}]"],
            ["fpr", f"{stats.fpr:.4f}", f"[{stats.fpr_ci[0]:.4f}, {stats.fpr_ci[1]:.4f}]"],
            ["advantage", f"{stats.advantage:.4f}", ""]]
    return Report("distinguish",
                  {"oracle": spec.kind, "w": params.w, "rots": list(params.rots), "r": r, "N": budget, **s},
                  ["metric", "value", "exact95"], rows,
                  f"{spec.kind} vs pinned random permutation, w={params.w}, r={r}, N={budget}, "
                  f"trials={args.trials}, seed={args.seed}")


def cmd_table1(args) -> Report:
    golden = _golden_counts() if args.fast else None
    rows, data = [], []
    for w, rots, rs in TABLE1_CONFIGS:
        params = QuarterRoundParams.from_rots(w, rots)
        for r in rs:
            if golden is not None:
                count = golden[(w, r)]
            else:
                count = qr_census(params, r, workers=args.threads).count
            rows.append(_table1_row(w, rots, r, count))
            measured = Fraction(count, 2 ** (4 * w))
            chain = bounds.qr_bounds(w, r, "chain")
            corrected = bounds.qr_bounds(w, r, "corrected")
            data.append({"w": w, "rots": list(rots), "r": r, "collisions": count,
                         "measured": prob_dict(measured), "lower": prob_dict(chain.lower),
                         "upper": prob_dict(chain.upper), "corrected_lower": prob_dict(corrected.lower),
                         "sandwiched": chain.lower <= measured <= chain.upper,
                         "corrected_lower_exceeds_measured": corrected.lower > measured})
    notes = [f"note: corrected lower bound exceeds the measured probability at w={d['w']}, r={d['r']}"
             for d in data if d["corrected_lower_exceeds_measured"]]
    return Report("table1", {"rows": data}, TABLE1_COLUMNS, rows,
                  "rotational collisions of the toy quarter round (chain-variant bounds)", notes)


def cmd_table2(args) -> Report:
    rows, data = _round_rows(args.word_bits, args.rot, args.rounds or list(range(1, 21)), args.variant)
    return Report("table2",
                  {"w": args.word_bits, "r": args.rot, "variant": args.variant, "heuristic": True,
                   "rows": data},
                  ["round", "lower", "upper"], rows,
                  f"bounds through ChaCha rounds, w={args.word_bits}, r={args.rot} (heuristic)")


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chacharot", description="Rotational analysis of the ChaCha permutation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, w=None, rot=None, variant=None, rots=False, k=None, threads=False,
            seed=False, rounds=False):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        if w is not False:
            p.add_argument("--word-bits", type=int, default=w, required=w is None)
        if rot is not False:
            p.add_argument("--rot", type=int, default=rot)
        if variant:
            p.add_argument("--variant", choices=bounds.VARIANTS, default=variant)
        if rots:
            p.add_argument("--rots", type=_rots)
        if k is not None:
            p.add_argument("--k", type=int, default=k)
        if threads:
            p.add_argument("--threads", type=int, default=None)
            p.add_argument("--force", action="store_true")
        if seed:
            p.add_argument("--seed", type=_u64, default=0)
        if rounds:
            p.add_argument("--rounds", type=_rounds)
        return p

    add("qr-bounds", cmd_qr_bounds, "quarter-round bounds", variant="chain")
    add("perm-bounds", cmd_perm_bounds, "multi-round bounds", w=32, rot=1, variant="corrected", rounds=True)
    add("qr-census", cmd_qr_census, "exhaustive quarter-round census", rots=True, threads=True)
    add("cond-census", cmd_cond_census, "exhaustive census of the four conditions", rots=True, threads=True)
    add("verify-add", cmd_verify_add, "k-addend formula vs census", k=2, threads=True)
    add("chain-census", cmd_chain_census, "chained addition census vs formula", threads=True)
    p = add("round-sample", cmd_round_sample, "sampled multi-round census", rot=1, rots=True, threads=True,
            seed=True, rounds=True)
    p.add_argument("--samples", type=int, default=1 << 20)
    add("fixed-count", cmd_fixed_count, "count rotation-invariant vectors", k=4)
    p = add("expected-collisions", cmd_expected_collisions, "random-permutation expectation", k=4,
            seed=True)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--force", action="store_true")
    p = add("distinguish", cmd_distinguish, "play the distinguisher game", w=4, rots=True, seed=True,
            rounds=True)
    p.add_argument("--oracle", choices=("quarter-round", "chacha"), default="quarter-round")
    p.add_argument("--budget", type=int)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--log", help="write per-trial JSON lines to this file")
    p = add("table1", cmd_table1, "reproduce the toy quarter-round table", w=False, rot=False, threads=True)
    p.add_argument("--fast", action="store_true", help="use the committed golden counts")
    add("table2", cmd_table2, "reproduce the round-propagation table", w=32, rot=1, variant="corrected",
        rounds=True)
    return parser


def run_command(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        report = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"chacharot: error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleSize as exc:
        print(f"chacharot: {exc}", file=sys.stderr)
        return 2
    out.write(report.render(args.format))
    return 0


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
