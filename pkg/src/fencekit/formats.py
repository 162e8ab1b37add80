"""JSON file formats and report (de)serialisation.

Sets travel as sorted player lists, amounts as ``"p/q"`` strings (integers
are accepted on input).
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from . import sets
from .budget import BBReport, Refutation, SearchResult, SetBalance
from .fence import FMReport, Violation
from .mechanism import StablePair
from .model import CostFunction, CostSharingScheme, MechanismOutcome, bid_vector, fmt_money, money
from .oracle import CoalitionWitness


class FormatError(ValueError):
    pass


def _set(mask):
    return None if mask is None else list(sets.members(mask))


def _mask(players):
    return None if players is None else sets.from_players(players)


def _amount(x):
    return None if x is None else fmt_money(Fraction(x))


def _amounts(xs):
    return [fmt_money(Fraction(x)) for x in xs]


def _parse_amounts(xs):
    return tuple(money(x) for x in xs)


# --------------------------------------------------------------------------
# Input files


def scheme_to_dict(s: CostSharingScheme) -> dict:
    table = []
    for S in sorted(range(1, 1 << s.n), key=lambda m: (sets.size(m), sets.lex_key(m))):
        pays = {}
        for i in sets.members(S):
            try:
                pays[str(i)] = fmt_money(s.xi(i, S))
            except KeyError:
                continue
        table.append({"set": _set(S), "payments": pays})
    return {"n": s.n, "table": table}


def scheme_from_dict(d: dict) -> CostSharingScheme:
    try:
        n = int(d["n"])
        cells = {}
        for entry in d["table"]:
            S = sets.from_players(entry["set"])
            for i, v in entry["payments"].items():
                cells[(int(i), S)] = money(v)
        return CostSharingScheme(n, cells)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"malformed scheme: {exc}") from exc


def cost_to_dict(c: CostFunction) -> dict:
    return {"n": c.n, "table": [{"set": _set(S), "cost": fmt_money(v)} for S, v in c.items()]}


def cost_from_dict(d: dict) -> CostFunction:
    try:
        return CostFunction(int(d["n"]), {sets.from_players(e["set"]): money(e["cost"]) for e in d["table"]})
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"malformed cost function: {exc}") from exc


def parse_bids(text: str) -> tuple:
    """Comma-separated amounts, or a JSON array."""
    try:
        text = text.strip()
        if text.startswith("["):
            return bid_vector(json.loads(text))
        return bid_vector(part for part in text.split(",") if part.strip())
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"malformed bids {text!r}: {exc}") from exc


def _resolve(path) -> Path:
    p = Path(path)
    if not p.exists() and p.suffix != ".json" and p.with_name(p.name + ".json").exists():
        p = p.with_name(p.name + ".json")
    return p


def read_json(path) -> dict:
    p = _resolve(path)
    try:
        return json.loads(p.read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc


def load_scheme(path) -> CostSharingScheme:
    return scheme_from_dict(read_json(path))


def load_cost(path) -> CostFunction:
    return cost_from_dict(read_json(path))


def save_scheme(s: CostSharingScheme, path) -> None:
    Path(path).write_text(json.dumps(scheme_to_dict(s), indent=1) + "\n")


# --------------------------------------------------------------------------
# Reports


def _witness_out(cond, w):
    if cond == "a":
        return {"S": _set(w["S"])}
    if cond == "b":
        return {"player": w["player"], "sets": {str(i): _set(S) for i, S in w["sets"].items()}}
    return {"C": _set(w["C"]), "player": w["player"]}


def _witness_in(cond, w):
    if cond == "a":
        return {"S": _mask(w["S"])}
    if cond == "b":
        return {"player": w["player"], "sets": {int(i): _mask(S) for i, S in w["sets"].items()}}
    return {"C": _mask(w["C"]), "player": w["player"]}


def fm_report_to_dict(r: FMReport) -> dict:
    return {
        "n": r.n,
        "holds": r.holds,
        "pairs_checked": r.pairs_checked,
        "violations": [
            {"L": _set(v.L), "U": _set(v.U), "condition": v.condition,
             "witness": _witness_out(v.condition, v.witness)}
            for v in r.violations
        ],
    }


def fm_report_from_dict(d: dict) -> FMReport:
    vs = [Violation(_mask(v["L"]), _mask(v["U"]), v["condition"], _witness_in(v["condition"], v["witness"]))
          for v in d["violations"]]
    return FMReport(d["n"], vs, d["pairs_checked"])


def outcome_to_dict(o: MechanismOutcome) -> dict:
    return {"served": _set(o.served), "payments": _amounts(o.payments)}


def outcome_from_dict(d: dict) -> MechanismOutcome:
    return MechanismOutcome(_mask(d["served"]), _parse_amounts(d["payments"]))


def pair_to_dict(p: StablePair) -> dict:
    return {"L": _set(p.L), "U": _set(p.U)}


def pair_from_dict(d: dict) -> StablePair:
    return StablePair(_mask(d["L"]), _mask(d["U"]))


def witness_to_dict(w: CoalitionWitness) -> dict:
    return {
        "truth": _amounts(w.truth), "misreport": _amounts(w.misreport),
        "liars": _set(w.liars), "gainers": _set(w.gainers), "coalition": _set(w.coalition),
        "before": _amounts(w.before), "after": _amounts(w.after),
    }


def witness_from_dict(d: dict) -> CoalitionWitness:
    return CoalitionWitness(_parse_amounts(d["truth"]), _parse_amounts(d["misreport"]),
                            _mask(d["liars"]), _mask(d["gainers"]),
                            _parse_amounts(d["before"]), _parse_amounts(d["after"]))


def bb_report_to_dict(r: BBReport) -> dict:
    return {
        "alpha": _amount(r.alpha), "overcharge": r.overcharge,
        "rows": [{"set": _set(x.S), "recovered": _amount(x.recovered), "cost": _amount(x.cost),
                  "ratio": _amount(x.ratio), "overcharged": x.overcharged} for x in r.rows],
    }


def bb_report_from_dict(d: dict) -> BBReport:
    rows = [SetBalance(_mask(x["set"]), money(x["recovered"]), money(x["cost"]),
                       None if x["ratio"] is None else money(x["ratio"]), x["overcharged"])
            for x in d["rows"]]
    return BBReport(rows, money(d["alpha"]), d["overcharge"])


def refutation_to_dict(r: Refutation) -> dict:
    cells = {k: (_set(v) if k == "S" else v) for k, v in r.cells.items()}
    return {"constraint": r.constraint, "cells": cells, "detail": r.detail}


def refutation_from_dict(d: dict) -> Refutation:
    cells = {k: (_mask(v) if k == "S" else v) for k, v in d["cells"].items()}
    return Refutation(d["constraint"], cells, d["detail"])


def search_result_to_dict(r: SearchResult) -> dict:
    return {"alpha": _amount(r.alpha), "meets": r.meets, "trials": r.trials,
            "scheme": None if r.scheme is None else scheme_to_dict(r.scheme)}


def search_result_from_dict(d: dict) -> SearchResult:
    scheme = None if d["scheme"] is None else scheme_from_dict(d["scheme"])
    alpha = None if d["alpha"] is None else money(d["alpha"])
    return SearchResult(scheme, alpha, d["meets"], d["trials"])
