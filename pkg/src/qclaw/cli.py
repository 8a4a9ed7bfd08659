"""Command-line front end: ``qclaw <group> <command> ...``.

Every command prints one JSON report on stdout. Reports are deterministic for
fixed inputs and caps, and the exit status is 0 exactly when every requested
verification passed.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import dt, potential, quiver as qv, seed as sd
from .embedding import IncompatiblePair
from .scalars import Scalar, from_json as scalar_from_json, to_json as scalar_to_json
from .series import AffineSeries, form_of, qdilog, series_to_json
from .torus import as_form, torus_to_json

DEFAULT_CAP = 8
SAFE_INT = 2 ** 53


class CommandError(Exception):
    pass


def default_cap() -> int:
    raw = os.environ.get("QCLAW_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise CommandError(f"QCLAW_CAP must be an integer, got {raw!r}") from None


def _plain(x):
    """JSON-ready copy: tuples to lists, Fractions and big ints to strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) >= SAFE_INT else x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Scalar):
        return scalar_to_json(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _ints(text: str | None) -> tuple:
    if text is None or text.strip() == "":
        return ()
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise CommandError(f"expected a comma-separated list of integers, got {text!r}") from None


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CommandError(f"{path} is not valid JSON: {exc}") from None


class Run:
    def __init__(self, args):
        self.args = args
        self.inputs = []
        self.caps = {}

    def load(self, path):
        obj = _read_json(path)
        with open(path, "rb") as fh:
            self.inputs.append((os.path.basename(path), hashlib.sha256(fh.read()).hexdigest()))
        return obj

    def report(self, results, verified: bool = True, started: float | None = None) -> dict:
        out = {
            "command": " ".join([self.args.group, self.args.cmd]),
            "inputs": [{"file": f, "sha256": h} for f, h in self.inputs],
            "caps": self.caps,
            "results": results,
            "verified": bool(verified),
        }
        if getattr(self.args, "timing", False) and started is not None:
            out["wall_time"] = round(time.perf_counter() - started, 3)
        return out


def _quiver_obj(obj):
    return obj["quiver"] if "quiver" in obj else obj


def _load_quiver(run: Run, path: str) -> qv.IceQuiver:
    obj = run.load(path)
    return qv.quiver_from_json(_quiver_obj(obj))


def _load_seed_data(run: Run, path: str):
    """Quiver and compatible form from a seed file, or from a bare quiver file."""
    obj = run.load(path)
    q = qv.quiver_from_json(_quiver_obj(obj))
    if "lambda" in obj:
        L = as_form(obj["lambda"])
    else:
        L = sd.compatible_form(q)
    return q, L, obj


def seed_to_json(seed: sd.QuantumSeed) -> dict:
    return {"quiver": qv.quiver_to_json(seed.quiver),
            "lambda": [list(r) for r in seed.Ls],
            "initial_lambda": [list(r) for r in seed.L0],
            "history": list(seed.history),
            "variables": [torus_to_json(x) for x in seed.vars]}


def report_to_json(rep: sd.ExpansionReport) -> dict:
    terms = []
    for e in sorted(rep.coefficients):
        w = rep.witnesses[e]
        terms.append({"exponent": list(e),
                      "coefficient": scalar_to_json(rep.coefficients[e]),
                      "lefschetz": {str(k): v for k, v in sorted(w.multiplicities.items())} if w.ok else None,
                      "parity": rep.parities[e]})
    return {**sd.positivity_report(rep), "terms": terms}


# quiver -------------------------------------------------------------------------

def cmd_quiver(run: Run) -> tuple:
    a = run.args
    if a.cmd == "validate":
        obj = run.load(a.input)
        q = qv.quiver_from_json(_quiver_obj(obj), validate=False)
        errors = qv.validate_quiver(q)
        return {"valid": not errors, "errors": errors}, not errors
    q = _load_quiver(run, a.input)
    if a.cmd == "mutate":
        seq = _ints(a.seq)
        return {"sequence": list(seq), "quiver": qv.quiver_to_json(qv.mutate_sequence(q, seq))}, True
    if a.cmd == "bmatrix":
        return {"bmatrix": qv.b_matrix(q)}, True
    raise CommandError(f"unknown quiver command {a.cmd}")


# seed ---------------------------------------------------------------------------

def _verify_cell(job):
    q_obj, L, qp_obj, seq, d, cross, cap = job
    q = qv.quiver_from_json(q_obj)
    init = sd.initial_seed(q, L)
    rep = sd.report_from_element(sd.cluster_monomial(sd.mutate_seed_sequence(init, seq), d))
    row = {"sequence": list(seq), "d": list(d), "ok": rep.ok, "terms": len(rep.coefficients)}
    if cross:
        try:
            qp = potential.qp_from_files(q_obj, qp_obj, 8) if qp_obj is not None else None
            x, used = dt.stabilizing_cluster_via_dt(q, L, seq, d, cap=cap, qp=qp)
            row["cross_oracle"] = x == sd.cluster_monomial(sd.mutate_seed_sequence(init, seq), d)
            row["dt_cap"] = used
        except dt.DegenerateSequence:
            row["cross_oracle"] = "skipped: degenerate"
    return row


def _remap_potential(pot: dict, old: list, new: list) -> dict:
    """Re-index arrow ids after the quiver gained arrows (parallel arrows keep
    their relative order)."""
    slots: dict = {}
    for i, e in enumerate(new):
        slots.setdefault(e, []).append(i)
    seen: dict = {}
    index = []
    for e in old:
        k = seen.get(e, 0)
        index.append(slots[e][k])
        seen[e] = k + 1
    terms = [dict(t, word=[index[int(x)] for x in t["word"]]) for t in pot.get("terms", [])]
    return dict(pot, terms=terms)


def _matrix_jobs(case, cross, cap):
    q_obj = _quiver_obj(case["quiver"]) if "quiver" in case else case
    q = qv.quiver_from_json(q_obj)
    qp_obj = case.get("potential")
    if case.get("quantize"):
        old_arrows = qv.file_arrow_list(q_obj)
        q, L = sd.quantize(q)
        q_obj = qv.quiver_to_json(q)
        if qp_obj is not None:
            qp_obj = _remap_potential(qp_obj, old_arrows, qv.file_arrow_list(q_obj))
    elif "lambda" in case:
        L = as_form(case["lambda"])
    else:
        L = sd.compatible_form(q)
    max_len = int(case.get("max_length", 5))
    max_deg = int(case.get("max_degree", 3))
    jobs = []
    for k in range(max_len + 1):
        for seq in itertools.product(range(1, q.m + 1), repeat=k):
            for d in itertools.product(range(max_deg + 1), repeat=q.n):
                if sum(d) <= max_deg:
                    jobs.append((q_obj, L, qp_obj, seq, d, cross, cap))
    return jobs


def _pmap(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (8 * workers))))


def cmd_seed(run: Run) -> tuple:
    a = run.args
    if a.cmd == "quantize":
        q = _load_quiver(run, a.input)
        ext, L = sd.quantize(q)
        return {"quiver": qv.quiver_to_json(ext), "lambda": [list(r) for r in L]}, True
    if a.cmd == "mutate":
        q, L, obj = _load_seed_data(run, a.input)
        seq = tuple(obj.get("history", ())) + _ints(a.seq)
        s = sd.mutate_seed_sequence(sd.initial_seed(q, L), seq)
        return {"seed": seed_to_json(s), "bar_invariant": sd.seed_vars_bar_invariant(s)}, True
    if a.cmd == "expand":
        q, L, _ = _load_seed_data(run, a.input)
        d = _ints(a.d)
        rep = sd.expand(sd.initial_seed(q, L), _ints(a.target), _ints(a.monomial_seq), d)
        return {"target": list(_ints(a.target)), "monomial_sequence": list(_ints(a.monomial_seq)),
                "d": list(d), "expansion": report_to_json(rep)}, rep.ok
    if a.cmd == "verify":
        grid = run.load(a.matrix)
        cap = a.cap
        run.caps["dt_start_cap"] = cap
        summary, ok = [], True
        for case in grid.get("cases", []):
            rows = _pmap(_verify_cell, _matrix_jobs(case, a.cross_check, cap), a.jobs)
            good = all(r["ok"] for r in rows)
            cross_rows = [r for r in rows if "cross_oracle" in r]
            cross_ok = all(r["cross_oracle"] is not False for r in cross_rows)
            entry = {"name": case.get("name", "?"), "cells": len(rows),
                     "positive_lefschetz": good,
                     "failures": [r for r in rows if not r["ok"]][:10]}
            if a.cross_check:
                entry["cross_oracle"] = cross_ok
                entry["cross_checked"] = sum(r["cross_oracle"] is True for r in cross_rows)
                entry["max_dt_cap"] = max((r.get("dt_cap", 0) for r in cross_rows), default=0)
            ok = ok and good and cross_ok
            summary.append(entry)
        return {"cases": summary}, ok
    raise CommandError(f"unknown seed command {a.cmd}")


# qp -----------------------------------------------------------------------------

def _load_qp(run: Run, a):
    obj = run.load(a.input)
    pot = run.load(a.potential) if a.potential else None
    return potential.qp_from_files(_quiver_obj(obj), pot, a.order), obj


def cmd_qp(run: Run) -> tuple:
    a = run.args
    run.caps["order"] = a.order
    if a.cmd == "random":
        obj = run.load(a.input)
        q = qv.quiver_from_json(_quiver_obj(obj))
        qp = potential.random_potential(q, a.max_len, a.rng_seed, a.order,
                                        arrows=qv.file_arrow_list(_quiver_obj(obj)))
        return {"potential": potential.potential_to_json(qp), "readable": qp.describe()}, True
    qp, _ = _load_qp(run, a)
    if a.cmd == "mutate":
        res = potential.qp_mutate(qp, int(a.s), a.order)
        nondeg = not potential.has_two_cycles(res.quiver())
        out = {"qp": potential.qp_to_json(res), "readable": res.describe(),
               "quiver": qv.quiver_to_json(res.quiver()), "nondegenerate": nondeg}
        if nondeg:
            out["matches_quiver_mutation"] = res.quiver() == qv.mutate_quiver(qp.quiver(), int(a.s))
        return out, True
    if a.cmd == "nondegenerate":
        seq = _ints(a.seq)
        tr = potential.nondegenerate_along(qp, seq, a.order)
        steps = [{"vertex": s, "quiver": qv.quiver_to_json(x.quiver()), "potential": x.describe()}
                 for s, x in tr.steps]
        return {"sequence": list(seq), "nondegenerate": tr.ok, "failed_at_step": tr.failed_at + 1 if tr.failed_at is not None else None,
                "verified_to_order": a.order, "truncated": tr.truncated, "trace": steps}, tr.ok
    raise CommandError(f"unknown qp command {a.cmd}")


# dt -----------------------------------------------------------------------------

def _zeta(run: Run, a, m: int) -> dt.Stability:
    if not a.zeta:
        raise CommandError("--zeta is required")
    z = dt.stability_from_json(run.load(a.zeta))
    if z.m != m:
        raise CommandError(f"stability has {z.m} entries, quiver has {m} principal vertices")
    return z


def _factor_json(f: dt.HNFactor) -> dict:
    return {"phase": {"re": str(f.phase.re), "im": str(f.phase.im)},
            "support": [list(d) for d in f.support],
            "series": series_to_json(f.series)}


def cmd_dt(run: Run) -> tuple:
    a = run.args
    cap = a.cap
    run.caps["series"] = cap
    if a.cmd == "no-exotics":
        om = scalar_from_json(json.loads(a.omega)) if a.omega.strip().startswith("{\"coeffs") else \
            Scalar({int(k): int(v) for k, v in json.loads(a.omega).items()})
        v = dt.no_exotics_check(om)
        return {"omega": scalar_to_json(om), "no_exotics": v.ok, "b": v.b,
                "flags": {"nonnegative": v.nonnegative, "single_parity": v.single_parity,
                          "symmetric": v.symmetric, "unimodal": v.unimodal}}, v.ok
    if a.cmd == "cluster":
        q, L, _ = _load_seed_data(run, a.input)
        seq, f = _ints(a.seq), _ints(a.f)
        qp = None
        if a.potential:
            qp = potential.qp_from_files(qv.quiver_to_json(q), run.load(a.potential), a.order)
        x, used = dt.stabilizing_cluster_via_dt(q, L, seq, f, cap=cap, qp=qp, trusted=a.trusted)
        run.caps["series_used"] = used
        out = {"sequence": list(seq), "f": list(f), "element": torus_to_json(x)}
        ok = True
        if not a.no_cross_check:
            y = sd.cluster_monomial(sd.mutate_seed_sequence(sd.initial_seed(q, L), seq), f)
            out["matches_seed_expansion"] = ok = x == y
        return out, ok
    q = _load_quiver(run, a.input)
    cycles = q.principal().has_cycles()
    if a.cmd == "series":
        return {"series": series_to_json(dt.stack_ic_series(q, cap)), "quiver_has_cycles": cycles}, True
    z = _zeta(run, a, q.m)
    if a.cmd == "hn":
        T = dt.stack_ic_series(q, cap)
        fs = dt.hn_factorize(T, z)
        ok = dt.recompose(fs).agrees(T)
        nontrivial = [f for f in fs if not f.trivial]
        return {"factors": [_factor_json(f) for f in nontrivial], "count": len(nontrivial),
                "recomposition": ok, "quiver_has_cycles": cycles}, ok
    if a.cmd == "invariants":
        gen = dt.is_generic(q, z, bound=cap)
        rec = dt.dt_invariants(q, z, cap)
        out = dt.dt_record_to_json(rec)
        out["generic_to_bound"] = {"ok": gen.ok, "bound": gen.bound,
                                   "witness": [list(x) for x in gen.witness] if gen.witness else None}
        return out, rec.ok
    raise CommandError(f"unknown dt command {a.cmd}")


# identity -----------------------------------------------------------------------

def dilog_identity(cap: int, corrupt: bool = False) -> dict:
    """Both factorisations of the A2 stack series and the two conjugation
    identities. With ``corrupt`` the dilogarithm side is computed with the
    commutation form negated, which must break every identity."""
    q = qv.a2()
    A = form_of(q)
    F = tuple(tuple(-x for x in r) for r in A) if corrupt else A
    T = dt.stack_ic_series(q, cap)
    E = lambda d, s=1: qdilog(F, d, s, cap)
    Y = lambda d: AffineSeries.monomial(A, d, cap)
    Yf = lambda d: AffineSeries.monomial(F, d, cap)
    checks = {}

    def record(name, lhs, rhs):
        # coefficient tables only, so that a corrupted side can be compared
        bad = AffineSeries(A, lhs.terms, lhs.cap).first_disagreement(AffineSeries(A, rhs.terms, rhs.cap))
        checks[name] = {"match": bad is None}
        if bad is not None:
            d, x, y = bad
            checks[name]["first_difference"] = {"d": list(d), "left": scalar_to_json(x),
                                                "right": scalar_to_json(y)}

    record("stack = E(0,1) E(1,0)", T, E((0, 1)) * E((1, 0)))
    record("stack = E(1,0) E(1,1) E(0,1)", T, E((1, 0)) * E((1, 1)) * E((0, 1)))
    record("E(0,1) Y(1,0) E(0,1)^-1 = Y(1,0) + Y(1,1)",
           E((0, 1)) * Yf((1, 0)) * E((0, 1), -1), Y((1, 0)) + Y((1, 1)))
    record("E(1,0)^-1 Y(0,1) E(1,0) = Y(0,1) + Y(1,1)",
           E((1, 0), -1) * Yf((0, 1)) * E((1, 0)), Y((0, 1)) + Y((1, 1)))
    return checks


def cmd_identity(run: Run) -> tuple:
    a = run.args
    if a.quiver != "a2":
        raise CommandError("only --quiver a2 is available")
    run.caps["series"] = a.cap
    checks = dilog_identity(a.cap, corrupt=a.corrupt_lambda)
    ok = all(c["match"] for c in checks.values())
    return {"quiver": "a2", "corrupted_form": a.corrupt_lambda, "checks": checks}, ok


# parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qclaw", description="Quantum cluster and DT computations.")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for batch runs")
    p.add_argument("--timing", action="store_true", help="add wall time to the report")
    groups = p.add_subparsers(dest="group", required=True)

    g = groups.add_parser("quiver").add_subparsers(dest="cmd", required=True)
    for name in ("mutate", "validate", "bmatrix"):
        c = g.add_parser(name)
        c.add_argument("-i", "--input", required=True)
        if name == "mutate":
            c.add_argument("-s", "--seq", required=True)

    cap = default_cap()
    g = groups.add_parser("seed").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("quantize")
    c.add_argument("-i", "--input", required=True)
    c = g.add_parser("mutate")
    c.add_argument("-i", "--input", required=True)
    c.add_argument("-s", "--seq", default="")
    c = g.add_parser("expand")
    c.add_argument("-i", "--input", required=True)
    c.add_argument("--target", default="")
    c.add_argument("--monomial-seq", default="")
    c.add_argument("--d", required=True)
    c = g.add_parser("verify")
    c.add_argument("--matrix", required=True)
    c.add_argument("--cross-check", action="store_true")
    c.add_argument("--cap", type=int, default=cap)

    g = groups.add_parser("qp").add_subparsers(dest="cmd", required=True)
    for name in ("mutate", "nondegenerate", "random"):
        c = g.add_parser(name)
        c.add_argument("-i", "--input", required=True)
        c.add_argument("--order", type=int, default=potential.DEFAULT_ORDER)
        if name != "random":
            c.add_argument("--potential")
        if name == "mutate":
            c.add_argument("-s", required=True)
        if name == "nondegenerate":
            c.add_argument("--seq", required=True)
        if name == "random":
            c.add_argument("--max-len", type=int, default=4)
            c.add_argument("--rng-seed", type=int, default=0)

    g = groups.add_parser("dt").add_subparsers(dest="cmd", required=True)
    for name in ("series", "hn", "invariants", "cluster"):
        c = g.add_parser(name)
        c.add_argument("-i", "--input", required=True)
        c.add_argument("--cap", type=int, default=cap)
        if name in ("hn", "invariants"):
            c.add_argument("--zeta", required=True)
        if name == "cluster":
            c.add_argument("--seq", default="")
            c.add_argument("--f", required=True)
            c.add_argument("--potential")
            c.add_argument("--order", type=int, default=potential.DEFAULT_ORDER)
            c.add_argument("--trusted", action="store_true", help="skip the nondegeneracy gate")
            c.add_argument("--no-cross-check", action="store_true")
    c = g.add_parser("no-exotics")
    c.add_argument("--omega", required=True, help='exponent -> coefficient, e.g. {"-1": 1, "1": 1}')
    c.add_argument("--cap", type=int, default=cap)

    g = groups.add_parser("identity").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("dilog")
    c.add_argument("--quiver", default="a2")
    c.add_argument("--cap", type=int, default=cap)
    c.add_argument("--corrupt-lambda", action="store_true", help="negative control")
    return p


HANDLERS = {"quiver": cmd_quiver, "seed": cmd_seed, "qp": cmd_qp, "dt": cmd_dt, "identity": cmd_identity}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CommandError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    run = Run(args)
    started = time.perf_counter()
    try:
        results, ok = HANDLERS[args.group](run)
    except (CommandError, qv.InvalidQuiver, IncompatiblePair, ValueError, ArithmeticError) as exc:
        print(json.dumps({"command": f"{args.group} {args.cmd}", "error": str(exc),
                          "kind": type(exc).__name__}, sort_keys=True), file=sys.stderr)
        return 2
    print(json.dumps(_plain(run.report(results, ok, started)), sort_keys=True, indent=2))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
