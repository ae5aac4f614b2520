"""Command-line front end: ``hnrel <subcommand> ...``.

Every subcommand writes one JSON document (or CSV for ``betti --format csv``)
to stdout or ``--out``.  Exit codes: 0 success, 1 selftest failure,
2 invalid input, 3 cap too small (the minimal sufficient cap is reported).
The environment variable HNREL_CAP supplies default caps for flags that
are left out.
"""

import argparse
import csv
import io
import json
import os
import sys

from . import betti, parab, relgen, respair, strata
from .exactalg import fmt_rational, parse_rational, series_to_json, terms_json, ring_header

SCHEMA = "hnrel.cli.{}/1"


class UsageError(Exception):
    pass


class CapError(Exception):
    def __init__(self, message, needed):
        super().__init__(message)
        self.needed = needed


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _env_cap(default=None):
    v = os.environ.get("HNREL_CAP")
    if v is None:
        return default
    try:
        return int(v)
    except ValueError:
        raise UsageError(f"HNREL_CAP must be an integer, got {v!r}")


def _int_list(s):
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma separated integer list, got {s!r}")


def _rat_list(s):
    try:
        return [parse_rational(x.strip()) for x in s.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected a comma separated rational list, got {s!r}")


# -- subcommands -----------------------------------------------------------------


def cmd_betti(a):
    dim = betti.moduli_dimension(a.n, a.g)
    cap = a.cap if a.cap is not None else _env_cap(dim)
    if cap < dim:
        raise CapError(f"cap {cap} is below the dimension", dim)
    series = betti.p_moduli(a.n, a.d, a.g, cap)
    if a.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["power", "coefficient"])
        for k, c in enumerate(series):
            w.writerow([k, c])
        return buf.getvalue()
    out = {"schema": SCHEMA.format("betti"), "n": a.n, "d": a.d, "g": a.g, "cap": cap, "p_moduli": series}
    if a.closed:
        rep = betti.closed_report(a.n, a.d, a.g, cap)
        out["closed"] = {k: rep[k] for k in ("agree", "first_difference", "closed")}
    return out


def cmd_strata(a):
    cap = a.codim_cap if a.codim_cap is not None else _env_cap(8)
    types = strata.enumerate_hn_types(a.n, a.d, a.g, cap)
    return {
        "schema": SCHEMA.format("strata"),
        "n": a.n,
        "d": a.d,
        "g": a.g,
        "codim_cap": cap,
        "types": [strata.type_to_json(mu, a.g) for mu in types],
    }


def cmd_relations(a):
    if a.r:
        rs = sorted(set(a.r))
    else:
        rs = list(relgen.relation_window(a.n, a.d, a.nhat, a.dhat, a.g))
    need = 2 * max(rs)
    cap = a.cap if a.cap is not None else _env_cap(need)
    if cap < need:
        raise CapError(f"degree cap {cap} cannot hold c_{max(rs)}", need)
    main = relgen.BundleData(a.n, a.d, a.g)
    hat = relgen.BundleData(a.nhat, a.dhat, a.g, "h")
    ring = relgen.build_ring([main, hat], cap)
    c = relgen.grr_minus_pi(main, hat, max(rs), ring)
    hat_names = ring.names[len(relgen.gen_names(main)) :]
    records = []
    for r in rs:
        table = relgen.kunneth_components(c, r, main)
        entries = []
        for hexps, val in table.items():
            entries.append(
                {
                    "hat_monomial": [[hat_names[i], e] for i, e in enumerate(hexps) if e],
                    "value": terms_json(val),
                }
            )
        records.append({"nhat": a.nhat, "dhat": a.dhat, "r": r, "entries": entries})
    mring = relgen.build_ring([main], cap)
    return {
        "schema": SCHEMA.format("relations"),
        "n": a.n,
        "d": a.d,
        "g": a.g,
        "main_ring": ring_header(mring),
        "records": records,
    }


def parse_eta(spec, ring):
    """'2*ah_1^2*bh_1_1 + -1/3*ah_2' -> ring element ('1' is the unit)."""
    total = ring.zero()
    for term in spec.replace(" ", "").split("+"):
        if not term:
            raise UsageError(f"empty term in {spec!r}")
        x = ring.one()
        for f in term.split("*"):
            name, _, e = f.partition("^")
            try:
                c = parse_rational(f)
                x = x.scale(c)
                continue
            except (ValueError, ZeroDivisionError):
                pass
            if name not in ring.index:
                raise UsageError(f"unknown generator {name!r}")
            try:
                p = int(e) if e else 1
            except ValueError:
                raise UsageError(f"bad exponent in {f!r}")
            x = x * ring.gen(name) ** p
        total = total + x
    return total


def _pairs(items, sep):
    out = []
    for s in items or []:
        parts = s.split(sep)
        if len(parts) != 2:
            raise UsageError(f"expected a{sep}b, got {s!r}")
        try:
            out.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise UsageError(f"expected integers in {s!r}")
    return out


def cmd_pairing(a):
    tcap = a.tcap if a.tcap is not None else _env_cap(8)
    main = relgen.BundleData(a.n, a.d, a.g)
    out = {"schema": SCHEMA.format("pairing"), "n": a.n, "d": a.d, "g": a.g, "nhat": a.nhat, "dhat": a.dhat}
    if a.eps_order is None:
        hat = relgen.BundleData(a.nhat, a.dhat, a.g, "h")
        # classes above the dimension vanish on the moduli space
        ring = relgen.build_ring([hat], betti.moduli_dimension(a.nhat, a.g))
        eta = parse_eta(a.eta, ring)
        s = respair.pairing_thm_10_2(eta, main, a.nhat, a.dhat, tcap, sign=a.sign)
        out["eta"] = a.eta
        out["series"] = series_to_json(s)
        return out
    if a.eta != "1":
        raise UsageError("the deformed pairing takes --sigma/--odd insertions instead of --eta")
    m = dict(_pairs(a.sigma, "="))
    p = {rk: 1 for rk in _pairs(a.odd, ",")}
    eps = _rat_list(a.eps) if a.eps else None
    res = respair.pairing_thm_10_3(m, p, main, a.nhat, a.dhat, tcap, a.eps_order, eps, sign=a.sign)
    out["eps_order"] = a.eps_order
    if eps is not None:
        out["eps"] = [fmt_rational(x) for x in eps]
        out["series"] = series_to_json(res)
    else:
        out["terms"] = [{"eps_exponents": list(k), "series": series_to_json(v)} for k, v in sorted(res.items())]
    return out


def cmd_parabolic(a):
    pd = parab.ParabolicData.make(a.n, a.d, _rat_list(a.weights), _int_list(a.mults))
    if a.perturb:
        pd = parab.perturb(pd, a.perturb)
    pdeg, slope = parab.par_degree_slope(pd)
    out = {
        "schema": SCHEMA.format("parabolic"),
        "n": pd.n,
        "d": pd.d,
        "weights": [fmt_rational(x) for x in pd.weights],
        "mults": list(pd.mults),
        "pardeg": fmt_rational(pdeg),
        "parslope": fmt_rational(slope),
    }
    if a.check_good:
        rep = parab.good_data_check(pd)
        rep["margin"] = None if rep["margin"] is None else fmt_rational(rep["margin"])
        out["good_data"] = rep
    if a.rank or a.window:
        if not a.sub:
            raise UsageError("--rank/--window need --sub nhat,dhat,j1:j2:..")
        parts = a.sub.split(",")
        if len(parts) != 3:
            raise UsageError("--sub expects nhat,dhat,j1:j2:..")
        try:
            sub = parab.SubParabolicData.make(pd, int(parts[0]), int(parts[1]), [int(x) for x in parts[2].split(":")])
        except ValueError as e:
            raise UsageError(str(e))
        if a.g is None:
            raise UsageError("--rank/--window need --g")
        out["sub"] = {"nhat": sub.nh, "dhat": sub.dh, "jhat": list(sub.jh)}
        if a.rank:
            out["rank"] = parab.par_rank_formula(pd, sub, a.g)
        if a.window:
            out["window"] = list(parab.par_relation_window(pd, sub, a.g))
    return out


def cmd_selftest(a):
    from . import selftest

    rep = selftest.run(a.mutate)
    return {"schema": SCHEMA.format("selftest"), "mutate": a.mutate, "suites": rep, "ok": all(r["ok"] for r in rep)}


# -- wiring ----------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="hnrel", description="Exact computations for moduli of bundles on a curve.")
    p.add_argument("--out", help="write output here instead of stdout")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def nd(q, hat=False):
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--d", type=int, required=True)
        q.add_argument("--g", type=int, required=True)
        if hat:
            q.add_argument("--nhat", type=int, required=True)
            q.add_argument("--dhat", type=int, required=True)

    q = sub.add_parser("betti", help="Poincare polynomial of the moduli space")
    nd(q)
    q.add_argument("--cap", type=int)
    q.add_argument("--closed", action="store_true", help="also compare with the closed formula")
    q.add_argument("--format", choices=["json", "csv"], default="json")
    q.set_defaults(fn=cmd_betti)

    q = sub.add_parser("strata", help="Harder-Narasimhan types up to a codimension")
    nd(q)
    q.add_argument("--codim-cap", type=int)
    q.set_defaults(fn=cmd_strata)

    q = sub.add_parser("relations", help="Kunneth tables of relation classes")
    nd(q, True)
    grp = q.add_mutually_exclusive_group()
    grp.add_argument("--r", type=int, action="append")
    grp.add_argument("--window", action="store_true", help="all r in the relation window (default)")
    q.add_argument("--cap", type=int, help="degree cap, at least 2 max(r)")
    q.set_defaults(fn=cmd_relations)

    q = sub.add_parser("pairing", help="residue pairings over the hat moduli space")
    nd(q, True)
    q.add_argument("--eta", default="1", help="hat polynomial, e.g. '2*ah_2*bh_1_1 + ah_1^2'")
    q.add_argument("--tcap", type=int)
    q.add_argument("--sign", type=int, choices=[1, -1], default=1, help="Berezin orientation")
    q.add_argument("--eps-order", type=int, help="deformed pairing, formal epsilon order")
    q.add_argument("--sigma", action="append", help="r=e: insert sigma_r(X)^e")
    q.add_argument("--odd", action="append", help="r,k: insert the odd class of type (r, k)")
    q.add_argument("--eps", help="evaluate at eps_2,..: comma separated rationals")
    q.set_defaults(fn=cmd_pairing)

    q = sub.add_parser("parabolic", help="parabolic data bookkeeping")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--g", type=int)
    q.add_argument("--weights", required=True, help="comma separated, e.g. 0,1/3")
    q.add_argument("--mults", required=True, help="comma separated multiplicities")
    q.add_argument("--perturb", type=int, help="add k/N to the k-th weight")
    q.add_argument("--check-good", action="store_true")
    q.add_argument("--rank", action="store_true")
    q.add_argument("--window", action="store_true")
    q.add_argument("--sub", help="nhat,dhat,j1:j2:..")
    q.set_defaults(fn=cmd_parabolic)

    q = sub.add_parser("selftest", help="run the invariant battery")
    q.add_argument("--mutate", choices=["koszul"], help="deliberately break a sign to see a suite fail")
    q.set_defaults(fn=cmd_selftest)
    return p


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _diagnostic(kind, message, **extra):
    d = {"schema": SCHEMA.format("error"), "error": kind, "message": message}
    d.update(extra)
    sys.stderr.write(json.dumps(d, sort_keys=True) + "\n")


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        result = args.fn(args)
    except UsageError as e:
        _diagnostic("usage", str(e))
        return 2
    except CapError as e:
        _diagnostic("cap", str(e), minimal_cap=e.needed)
        return 3
    except (ValueError, ArithmeticError) as e:
        _diagnostic("validation", str(e))
        return 2
    text = result if isinstance(result, str) else json.dumps(result, sort_keys=True, indent=1) + "\n"
    _emit(text, args.out)
    if args.cmd == "selftest" and not result["ok"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
