"""Command-line front end for fencekit.

Exit status: 0 when the check passes, 1 on a negative verdict (violation or
coalition found), 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import budget, fence, fixtures, formats, mechanism, oracle, sets
from .formats import FormatError
from .model import validate_scheme

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=1))
    else:
        print(text)


def _scheme(args):
    s = formats.load_scheme(args.scheme)
    report = validate_scheme(s)
    if not report.valid:
        problems = ([f"missing xi({i},{sets.fmt(S)})" for i, S in report.missing[:5]] +
                    [f"negative xi({i},{sets.fmt(S)})={v}" for i, S, v in report.negative[:5]] +
                    [f"nonzero xi({i},{sets.fmt(S)})={v} outside its set" for i, S, v in report.outside[:5]])
        raise InputError("invalid scheme: " + "; ".join(problems))
    return s


def _bids(args, s):
    if args.bids_file:
        text = Path(args.bids_file).read_text()
    elif args.bids:
        text = args.bids
    else:
        raise InputError("give --bids or --bids-file")
    b = formats.parse_bids(text)
    if len(b) != s.n:
        raise InputError(f"scheme has {s.n} players but {len(b)} bids were given")
    return b


def _guard(s, args):
    if s.n > args.max_n:
        raise InputError(f"{s.n} players exceeds --max-n {args.max_n}; raise it to proceed")


def _mechanism(s, name):
    if name == "moulin":
        return mechanism.MoulinMechanism(s)
    return mechanism.FencingMechanism(s)


# --------------------------------------------------------------------------


def cmd_check_fm(args):
    s = _scheme(args)
    _guard(s, args)
    report = fence.check_fence_monotonicity(s, workers=args.threads)
    lines = [v.describe() for v in report.violations]
    lines.append("Fence Monotone" if report.holds else f"{len(report.violations)} violation(s)")
    _emit(args, formats.fm_report_to_dict(report), "\n".join(lines))
    return OK if report.holds else NEGATIVE


def _pair_and_outcome_text(pair, out):
    return f"stable pair {pair}\n{out}"


def cmd_run(args):
    s = _scheme(args)
    b = _bids(args, s)
    m = mechanism.FencingMechanism(s, verify=not args.no_verify)
    pair = m.stable_pair(b)
    out = m(b)
    _emit(args, {"stable_pair": formats.pair_to_dict(pair), "outcome": formats.outcome_to_dict(out)},
          _pair_and_outcome_text(pair, out))
    return OK


def cmd_moulin(args):
    s = _scheme(args)
    b = _bids(args, s)
    out = mechanism.MoulinMechanism(s)(b)
    _emit(args, {"outcome": formats.outcome_to_dict(out)}, str(out))
    return OK


def cmd_stable_pair(args):
    s = _scheme(args)
    b = _bids(args, s)
    pairs = mechanism.stable_pairs(s, b)
    payload = {"count": len(pairs), "pairs": [formats.pair_to_dict(p) for p in pairs]}
    if len(pairs) == 1:
        text = f"stable pair {pairs[0]}"
    elif not pairs:
        text = "none: no stable pair at these bids"
    else:
        text = "multiple stable pairs:\n" + "\n".join(f"  {p}" for p in pairs)
    _emit(args, payload, text)
    return OK if len(pairs) == 1 else NEGATIVE


def cmd_recover(args):
    s = _scheme(args)
    b = _bids(args, s)
    if args.served is not None:
        served = sets.from_players(int(x) for x in args.served.split(",") if x.strip())
        out = mechanism.outcome_from_set(s, served)
    else:
        out = mechanism.FencingMechanism(s, verify=not args.no_verify)(b)
    try:
        pair = mechanism.recover_stable_pair(s, b, out)
    except mechanism.InconsistentOutcome as exc:
        _emit(args, {"outcome": formats.outcome_to_dict(out), "error": str(exc)}, str(exc))
        return NEGATIVE
    _emit(args, {"outcome": formats.outcome_to_dict(out), "stable_pair": formats.pair_to_dict(pair)},
          f"{out}\nrecovered stable pair {pair}")
    return OK


def cmd_verify_gsp(args):
    s = _scheme(args)
    _guard(s, args)
    m = _mechanism(s, args.mechanism)
    grid = oracle.build_grid(s)
    verdict = oracle.verify_gsp(m, grid, max_n=args.max_n, samples=args.samples, seed=args.seed)
    payload = {"gsp_on_grid": verdict.gsp_on_grid, "label": verdict.label,
               "truths_checked": verdict.truths_checked, "grid_size": verdict.grid_size,
               "witness": None if verdict.witness is None else formats.witness_to_dict(verdict.witness)}
    text = verdict.label if verdict.witness is None else f"{verdict.label}: {verdict.witness.describe()}"
    _emit(args, payload, text)
    return OK if verdict.gsp_on_grid else NEGATIVE


def cmd_verify_axioms(args):
    s = _scheme(args)
    _guard(s, args)
    m = _mechanism(s, args.mechanism)
    verdict = oracle.verify_vp_npt_cs(m, oracle.build_grid(s), s)
    v = verdict.violation
    payload = {"ok": verdict.ok, "violation": None if v is None else {
        "axiom": v.axiom, "bids": [str(x) for x in v.bids], "player": v.player, "detail": v.detail}}
    text = "VP, NPT and CS hold on the grid" if verdict.ok else \
        f"{v.axiom} violated for player {v.player} at bids ({', '.join(map(str, v.bids))}): {v.detail}"
    _emit(args, payload, text)
    return OK if verdict.ok else NEGATIVE


def cmd_bb(args):
    s = _scheme(args)
    c = formats.load_cost(args.cost)
    outcomes = None
    if args.reachable:
        m = _mechanism(s, args.mechanism)
        outcomes = budget.reachable_outcomes(m, oracle.build_grid(s))
    report = budget.budget_balance_ratio(s, c, outcomes)
    lines = [f"{sets.fmt(r.S):>12}  recovered {r.recovered}  cost {r.cost}  ratio {r.ratio}"
             + ("  OVERCHARGE" if r.overcharged else "") for r in report.rows]
    lines.append(f"alpha = {report.alpha}" + ("; overcharges" if report.overcharge else ""))
    _emit(args, formats.bb_report_to_dict(report), "\n".join(lines))
    if report.overcharge or (args.alpha is not None and not report.is_balanced(args.alpha)):
        return NEGATIVE
    return OK


def cmd_refute_low(args):
    s = _scheme(args)
    r = budget.theorem_low_refute(s, args.x)
    _emit(args, formats.refutation_to_dict(r), f"{r.constraint} violated: {r.detail}")
    return NEGATIVE


def cmd_search_bb(args):
    if args.cost:
        c = formats.load_cost(args.cost)
    elif args.family_x is not None:
        c = budget.theorem_low_cost(args.family_x)
    else:
        raise InputError("give a cost file or --family-x")
    alpha = args.alpha
    r = budget.search_bb_schemes(c, alpha, args.trials, args.seed)
    if r.scheme is None:
        text = f"no Fence Monotone, non-overcharging scheme found in {r.trials} trials"
    else:
        text = f"best alpha {r.alpha} ({'meets' if r.meets else 'below'} {alpha})\n" + \
               json.dumps(formats.scheme_to_dict(r.scheme))
    _emit(args, formats.search_result_to_dict(r), text)
    return OK if r.meets else NEGATIVE


def cmd_fixtures(args):
    out = Path(args.directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, s in fixtures.ALL.items():
        path = out / f"{name}.json"
        formats.save_scheme(s, path)
        written.append(str(path))
    _emit(args, {"written": written}, "\n".join(written))
    return OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fencekit", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    def with_scheme(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scheme", help="scheme JSON file (the .json suffix may be omitted)")
        return sp

    def with_bids(sp):
        sp.add_argument("--bids", help="comma-separated amounts, e.g. 3/2,3/2")
        sp.add_argument("--bids-file", help="JSON array of amounts")
        return sp

    sp = with_scheme("check-fm", "check Fence Monotonicity")
    sp.add_argument("--max-n", type=int, default=10)
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_check_fm)

    sp = with_bids(with_scheme("run", "run the Fencing mechanism"))
    sp.add_argument("--no-verify", action="store_true", help="skip the Fence Monotonicity check")
    sp.set_defaults(func=cmd_run)

    sp = with_bids(with_scheme("moulin", "run the Moulin mechanism"))
    sp.set_defaults(func=cmd_moulin)

    sp = with_bids(with_scheme("stable-pair", "list stable pairs at the bids"))
    sp.set_defaults(func=cmd_stable_pair)

    sp = with_bids(with_scheme("recover", "recover the stable pair from an outcome"))
    sp.add_argument("--served", help="served players, e.g. 1,2 (default: run the Fencing mechanism)")
    sp.add_argument("--no-verify", action="store_true")
    sp.set_defaults(func=cmd_recover)

    for name, func, help_ in (("verify-gsp", cmd_verify_gsp, "search the bid grid for successful coalitions"),
                              ("verify-axioms", cmd_verify_axioms, "check VP, NPT and CS on the bid grid")):
        sp = with_scheme(name, help_)
        sp.add_argument("--mechanism", choices=("fencing", "moulin"), default="fencing")
        sp.add_argument("--max-n", type=int, default=oracle.DEFAULT_MAX_N)
        if name == "verify-gsp":
            sp.add_argument("--samples", type=int, help="check only this many truthful vectors")
            sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(func=func)

    sp = with_scheme("bb", "budget-balance report")
    sp.add_argument("cost", help="cost function JSON file")
    sp.add_argument("--alpha", help="required budget-balance factor")
    sp.add_argument("--reachable", action="store_true", help="only sets the mechanism serves on the grid")
    sp.add_argument("--mechanism", choices=("fencing", "moulin"), default="fencing")
    sp.set_defaults(func=cmd_bb)

    sp = with_scheme("refute-low", "name the constraint a 3-player scheme breaks on the x-family")
    sp.add_argument("--x", required=True)
    sp.set_defaults(func=cmd_refute_low)

    sp = sub.add_parser("search-bb", help="random search for well-balanced Fence Monotone schemes")
    sp.add_argument("cost", nargs="?", help="cost function JSON file")
    sp.add_argument("--family-x", help="use the 3-player lower-bound family with this x")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_search_bb)

    sp = sub.add_parser("fixtures", help="write the reference schemes as JSON files")
    sp.add_argument("directory")
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.func(args)
    except (InputError, FormatError, mechanism.NotFenceMonotone) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
