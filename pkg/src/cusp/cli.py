"""Command-line front end.

Exit codes: 0 success, 2 malformed spec, 3 oracle infeasible under
``--force-oracle``, 4 rule/oracle disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from typing import Sequence

from .classical import UNITARY, ProductL, TorusShape, su_quotient, sum_zero_subgroup
from .errors import CuspError, OracleInfeasible, SpecError
from .existence import (FINITE_QUESTIONS, DecisionReport, Verdict, decide_finite,
                        verify_decision, zsygmondy)
from .lattice import IntMatrix
from .padic import PADIC_QUESTIONS, PadicFactorSpec, PadicSpec, decide_padic
from .rootdata import Factor, GroupSpec, format_label, parse_label
from .toruschar import build_L, is_conjugate_self_dual, is_general_position
from .rootdata import weyl_order
from .weyl import ENUMERATION_CEILING

SCHEMA = "cusp-report/1"
EXIT_SPEC, EXIT_INFEASIBLE, EXIT_DISAGREE = 2, 3, 4


# ------------------------------------------------------------ spec parsing

def _parse_finite_factor(text: str) -> Factor:
    """``LABEL[:sc|adjoint][:n=DEG]``, e.g. ``2A3:adjoint`` or ``A1:n=3``."""
    label, *opts = text.split(":")
    letter, rank, twist = parse_label(label)
    iso, deg = "sc", 1
    for o in opts:
        if o.startswith("n="):
            deg = int(o[2:])
        elif o in ("sc", "adjoint"):
            iso = o
        else:
            raise SpecError(f"unknown factor option {o!r}")
    return Factor(letter, rank, twist, iso, deg)


def _parse_padic_factor(text: str) -> PadicFactorSpec:
    """``LABEL[:unramified|ramified_tame|wild][:inner][:anisotropic][:f=DEG][:sc|adjoint]``."""
    label, *opts = text.split(":")
    letter, rank, twist = parse_label(label)
    kw: dict = {}
    for o in opts:
        if o in ("unramified", "ramified_tame", "wild"):
            kw["ramification"] = o
        elif o == "inner":
            kw["inner_form"] = True
        elif o == "anisotropic":
            kw["isotropic"] = False
        elif o.startswith("f="):
            kw["residue_degree"] = int(o[2:])
        elif o in ("sc", "adjoint"):
            kw["isogeny"] = o
        else:
            raise SpecError(f"unknown factor option {o!r}")
    return PadicFactorSpec(letter, rank, twist, **kw)


def _spec_from_args(args) -> GroupSpec | PadicSpec:
    if args.spec:
        try:
            with open(args.spec) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read spec: {exc}") from exc
        return PadicSpec.from_json(doc) if "p" in doc else GroupSpec.from_json(doc)
    if args.q is None:
        raise SpecError("--q is required without a spec file")
    if args.padic:
        if args.p is None:
            raise SpecError("--padic needs --p")
        factors = [_parse_padic_factor(f) for f in args.factor]
        if args.type:
            factors.insert(0, PadicFactorSpec(*_type_flag(args), isogeny=args.isogeny))
        return PadicSpec(args.p, args.q, tuple(factors))
    factors = [_parse_finite_factor(f) for f in args.factor]
    if args.type:
        factors.insert(0, Factor(*_type_flag(args), args.isogeny, args.scalars_degree))
    return GroupSpec(args.q, tuple(factors))


def _type_flag(args) -> tuple[str, int, int]:
    """``--type`` accepts a bare letter or a twisted one such as ``2A``."""
    raw = args.type.strip()
    twist = args.twist
    if raw[:1].isdigit():
        twist, raw = int(raw[0]), raw[1:]
    return raw.upper(), _need_rank(args), twist


def _need_rank(args) -> int:
    if args.rank is None:
        raise SpecError("--type needs --rank")
    return args.rank


# ---------------------------------------------------------------- reports

def build_report(spec: GroupSpec | PadicSpec, force_oracle: bool = False) -> dict:
    if isinstance(spec, PadicSpec):
        report = decide_padic(spec)
        kind, questions = "padic", PADIC_QUESTIONS
        oracle_spec = _padic_oracle_spec(spec)
    else:
        report = decide_finite(spec)
        kind, questions = "finite", FINITE_QUESTIONS
        oracle_spec = spec
    doc = {"schema": SCHEMA, "kind": kind, "input": spec.to_json()}
    if force_oracle:
        if oracle_spec is None:
            raise OracleInfeasible("a ramified factor has no explicit finite quotient type")
        rec = verify_decision(oracle_spec, decide_finite(oracle_spec))
        report.oracle = rec
    body = report.to_json()
    body["verdicts"] = {k: body["verdicts"][k] for k in questions}
    doc.update(body)
    if force_oracle:
        doc["oracle"]["spec"] = oracle_spec.to_json()
        if report.oracle.ground_truth_only:
            label = "character-level ground truth, not a paper theorem"
        elif report.oracle.agree:
            label = "rule confirmed by exhaustive search"
        else:
            label = "rule contradicted by exhaustive search"
        doc["oracle"]["label"] = label
    return doc


def _padic_oracle_spec(spec: PadicSpec) -> GroupSpec | None:
    from .padic import reductive_quotient_type
    types = [reductive_quotient_type(f, spec.q) for f in spec.factors]
    if any(t.factor is None for t in types):
        return None
    return GroupSpec(spec.q, tuple(t.factor for t in types))


def verify_certificates(doc: dict) -> list[tuple[str, bool]]:
    """Re-run the general-position and self-duality checks on stored witnesses."""
    oracle = doc.get("oracle")
    if not oracle:
        return []
    spec = GroupSpec.from_json(oracle["spec"])
    out = []
    for f, entry in zip(spec.factors, oracle["factors"]):
        cert = entry["certificate"]
        if cert is None:
            continue
        try:
            ok = _recheck(f, entry["q"], cert)
        except (CuspError, ValueError, KeyError, TypeError):
            ok = False
        out.append((entry["factor"], ok))
    return out


def _recheck(f: Factor, q: int, cert: dict) -> bool:
    v = tuple(cert["element"])
    if cert["method"] == "weyl":
        L = build_L(f.root_datum(), IntMatrix.from_rows(cert["class_representative"]), q)
        return (list(L.invariant_factors) == cert["invariant_factors"]
                and is_general_position(L, v) == cert["is_general_position"]
                and is_conjugate_self_dual(L, v) == cert["is_conjugate_self_dual"])
    P = ProductL(TorusShape(UNITARY, tuple(cert["shape"])), q)
    if cert["level"] == "SU":
        act, member = su_quotient(P).action, True
    else:
        act, member = P.action, sum_zero_subgroup(P).contains(v)
    return (member and len(v) == len(act.moduli)
            and list(act.moduli) == cert["invariant_factors"]
            and act.is_general_position(v) == cert["is_general_position"]
            and act.is_conjugate_self_dual(v) == cert["is_conjugate_self_dual"])


def render_report(doc: dict) -> str:
    lines = []
    inp = doc["input"]
    head = f"q = {inp['q']}" + (f", p = {inp['p']}" if "p" in inp else "")
    lines.append(f"{doc['kind']} spec: {head}; factors: "
                 + ", ".join(f["type"] for f in inp["factors"]))
    width = max(len(k) for k in doc["verdicts"])
    for k, v in doc["verdicts"].items():
        lines.append(f"  {k:<{width}}  {v:<18} {doc['citations'][k]}")
    for note in doc.get("annotations", []):
        lines.append(f"  note: {note}")
    for k, v in doc.get("details", {}).items():
        lines.append(f"  {k}: {json.dumps(v, sort_keys=True)}")
    if "oracle" in doc:
        o = doc["oracle"]
        lines.append(f"  oracle: dl={o['dl']} sd_dl={o['sd_dl']} agree={o['agree']} ({o['label']})")
        for d in o["disagreements"] + o["ground_truth_only"]:
            lines.append(f"    {d}")
        for f in o["factors"]:
            c = f["certificate"]
            if c is None:
                lines.append(f"    {f['factor']}({f['q']}): no witness")
                continue
            where = c.get("char_poly") or f"shape {tuple(c['shape'])} at {c['level']}"
            lines.append(f"    {f['factor']}({f['q']}): {where}, L = "
                         + " + ".join(f"Z/{d}" for d in c["invariant_factors"])
                         + f", witness {tuple(c['element'])}")
    if "timing" in doc:
        lines.append(f"  elapsed: {doc['timing']['seconds']:.3f} s")
    return "\n".join(lines)


# ---------------------------------------------------------------- table

def table_types(rank_max: int, twisted: bool) -> list[str]:
    labels = []
    for r in range(1, rank_max + 1):
        labels.append(format_label("A", r))
        if r >= 2:
            labels.append(format_label("B", r))
        if r >= 3:
            labels.append(format_label("C", r))
        if r >= 4:
            labels.append(format_label("D", r))
        if r == 2:
            labels.append("G2")
        if r == 4:
            labels.append("F4")
        if r in (6, 7, 8):
            labels.append(f"E{r}")
        if twisted:
            if r >= 2:
                labels.append(format_label("A", r, 2))
            if r >= 4:
                labels.append(format_label("D", r, 2))
            if r == 4:
                labels.append(format_label("D", 4, 3))
            if r == 6:
                labels.append(format_label("E", 6, 2))
    return labels


def _mark(v: Verdict, truth: bool | None) -> str:
    if truth is None:
        return "n/a"
    if v == Verdict.OUTSIDE:
        return "gt:" + ("yes" if truth else "no")
    return "ok" if (v == Verdict.YES) == truth else "DISAGREE"


def table_rows(rank_max: int, q_list: Sequence[int], twisted: bool) -> list[list[str]]:
    rows = []
    for label in table_types(rank_max, twisted):
        letter, rank, twist = parse_label(label)
        for q in q_list:
            spec = GroupSpec(q, (Factor(letter, rank, twist),))
            rep = decide_finite(spec)
            dl = sd = None
            if weyl_order(letter, rank) <= ENUMERATION_CEILING:
                try:
                    rec = verify_decision(spec, rep)
                    dl, sd = rec.dl, rec.sd_dl
                except OracleInfeasible:
                    pass
            d, s = rep["dl_cuspidal"], rep["sd_dl_cuspidal"]
            rows.append([label, str(q), _cell(d), _cell(s), _mark(d, dl), _mark(s, sd)])
    return rows


def _cell(v: Verdict) -> str:
    return "Outside*" if v == Verdict.OUTSIDE else str(v)


TABLE_HEADER = ["type", "q", "dl", "sd", "oracle_dl", "oracle_sd"]


def render_table(rows: list[list[str]], as_csv: bool) -> str:
    if as_csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_HEADER)
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    widths = [max(len(r[i]) for r in rows + [TABLE_HEADER]) for i in range(len(TABLE_HEADER))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    out = [fmt.format(*TABLE_HEADER), fmt.format(*("-" * w for w in widths))]
    out += [fmt.format(*r).rstrip() for r in rows]
    out.append("Outside* = outside the hypotheses; gt = exhaustive-search ground truth")
    return "\n".join(out)


# ------------------------------------------------------------- commands

def cmd_analyze(args) -> int:
    try:
        spec = _spec_from_args(args)
    except (CuspError, ValueError) as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    start = time.perf_counter()
    try:
        doc = build_report(spec, args.force_oracle)
    except OracleInfeasible as exc:
        where = f" (factor {exc.factor})" if exc.factor else ""
        print(f"oracle infeasible{where}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.timing:
        doc["timing"] = {"seconds": time.perf_counter() - start}
    print(render_report(doc))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if "oracle" in doc and not doc["oracle"]["agree"]:
        return EXIT_DISAGREE
    return 0


def cmd_table(args) -> int:
    try:
        q_list = [int(x) for x in args.q_list]
        if any(q < 2 for q in q_list) or args.rank_max < 1:
            raise ValueError("need q >= 2 and rank-max >= 1")
    except ValueError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    rows = table_rows(args.rank_max, q_list, args.twisted)
    print(render_table(rows, args.csv))
    return EXIT_DISAGREE if any("DISAGREE" in r for r in rows) else 0


def cmd_zsygmondy(args) -> int:
    ell = zsygmondy(args.q, args.h) if args.q >= 2 and args.h >= 1 else None
    print("NONE" if ell is None else ell)
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cusp", description=
                                 "Cuspidal and supercuspidal existence rules with exhaustive "
                                 "checks on torus characters.")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="decide one group spec")
    a.add_argument("spec", nargs="?", help="JSON spec file")
    a.add_argument("--type", help="Cartan letter of a single factor")
    a.add_argument("--rank", type=int)
    a.add_argument("--twist", type=int, default=1)
    a.add_argument("--isogeny", default="sc", choices=["sc", "adjoint"])
    a.add_argument("--scalars-degree", type=int, default=1)
    a.add_argument("--factor", action="append", default=[],
                   help="extra factor, e.g. 2A3, A1:n=3, or (p-adic) 2A4:unramified:f=2")
    a.add_argument("--q", type=int)
    a.add_argument("--padic", action="store_true")
    a.add_argument("--p", type=int)
    a.add_argument("--force-oracle", action="store_true",
                   help="also run the exhaustive character search")
    a.add_argument("--json", metavar="PATH")
    a.add_argument("--timing", action="store_true")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("table", help="verdict table with oracle agreement marks")
    t.add_argument("--rank-max", type=int, default=2)
    t.add_argument("--q-list", nargs="+", default=["2", "3"])
    t.add_argument("--twisted", action="store_true")
    t.add_argument("--csv", action="store_true")
    t.set_defaults(func=cmd_table)

    z = sub.add_parser("zsygmondy", help="smallest prime l with ord_l(q) = h")
    z.add_argument("q", type=int)
    z.add_argument("h", type=int)
    z.set_defaults(func=cmd_zsygmondy)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
