"""Command-line interface: ``qpmaps <command> ...``.

Exit codes: 0 success (for ``classify``: Conservative or necessary
conditions hold), 1 NotConservative, 2 Indeterminate, 64 usage error,
65 input rejected by the library, 66 unreadable or malformed file.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import core, jacobian, reduce, transform
from .classify import (OracleVerdict, Verdict, check_symplectic, classify, find_integrals,
                       sampling_oracle)
from .errors import QPMapError
from .io import (FileFormatError, dumps_map, encode, load_map, load_qmt, write_trajectory_csv)

EX_USAGE, EX_DATAERR, EX_NOINPUT = 64, 65, 66
COMMANDS = ("validate", "classify", "iterate", "jacobian", "transform", "reduce", "solve2d",
            "integrals", "oracle", "generate")


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    summary: str = ""
    exit_code: int = 0

    def to_json(self):
        return json.dumps({"command": self.command, "inputs": self.inputs, "result": self.result,
                           "exit_code": self.exit_code}, indent=2, sort_keys=True)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text, what):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of numbers") from None


def _positive_state(text, n):
    x = _floats(text, "--x0/--at")
    if len(x) != n:
        raise UsageError(f"expected {n} coordinates, got {len(x)}")
    if np.any(x <= 0):
        raise UsageError("coordinates must be positive")
    return np.log(x)


def _parser():
    common = _Parser(add_help=False)
    common.add_argument("--tol-struct", type=float, default=1e-12)
    common.add_argument("--tol-num", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--json", action="store_true", help="print the structured result")

    p = _Parser(prog="qpmaps", description="Quasipolynomial map toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("validate", "integrals"):
        sub.add_parser(name, parents=[common]).add_argument("map")
    c = sub.add_parser("classify", parents=[common])
    c.add_argument("map")
    c.add_argument("--oracle", action="store_true")
    c.add_argument("--npoints", type=int, default=200)
    c.add_argument("--symplectic", action="store_true")
    it = sub.add_parser("iterate", parents=[common])
    it.add_argument("map")
    it.add_argument("--x0", required=True)
    it.add_argument("--steps", type=int, required=True)
    j = sub.add_parser("jacobian", parents=[common])
    j.add_argument("map")
    j.add_argument("--at", required=True)
    t = sub.add_parser("transform", parents=[common])
    t.add_argument("map")
    t.add_argument("--qmt", required=True)
    r = sub.add_parser("reduce", parents=[common])
    r.add_argument("map")
    r.add_argument("--x0", required=True)
    r.add_argument("--qmt")
    r.add_argument("--manifest", help="lift-manifest path (default: <out>.lift.json)")
    s = sub.add_parser("solve2d", parents=[common])
    s.add_argument("map")
    s.add_argument("--x0", required=True)
    o = sub.add_parser("oracle", parents=[common])
    o.add_argument("map")
    o.add_argument("--npoints", type=int, default=200)
    g = sub.add_parser("generate", parents=[common])
    g.add_argument("--profile", required=True,
                   choices=["unconstrained", "thm1", "thm1_conservative", "example1", "example2",
                            "example1_family", "example2_family", "lv", "symplectic",
                            "thm5_necessary", "thm5_damped"])
    g.add_argument("--params")
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--s", type=int)
    return p


def _digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _matrix_json(arr):
    return [[encode(v) for v in row] for row in np.asarray(arr, dtype=object)]


def _report_text(rep):
    lines = [f"verdict: {rep.verdict.value}", f"orientation: {rep.orientation.value}"]
    for h, ok in rep.hypotheses:
        lines.append(f"hypothesis {h}: {'holds' if ok else 'FAILS'}")
    for c in rep.conditions:
        extra = "" if c.holds else f"  witness={c.witness} value={c.value}"
        lines.append(f"condition ({c.id}): {'holds' if c.holds else 'FAILS'}{extra}")
    return "\n".join(lines)


_VERDICT_EXIT = {Verdict.CONSERVATIVE: 0, Verdict.NECESSARY_HOLD: 0,
                 Verdict.NOT_CONSERVATIVE: 1, Verdict.INDETERMINATE: 2}


def _cmd_validate(a, qp):
    res = {"n": qp.n, "m": qp.m, "exact": qp.exact, "lotka_volterra": core.is_lotka_volterra(qp)}
    return res, f"valid QP map: n={qp.n}, m={qp.m}, exact={qp.exact}", 0


def _cmd_classify(a, qp):
    tol = a.tol_struct
    rep = check_symplectic(qp, tol=tol) if a.symplectic else classify(qp, tol=tol)
    res = rep.to_dict()
    text = _report_text(rep)
    if a.oracle:
        orc = sampling_oracle(qp, a.seed, a.npoints)
        res["oracle"] = {"verdict": orc.verdict.value, "max_deviation": orc.max_deviation,
                         "npoints": orc.npoints, "skipped": orc.skipped, "seed": a.seed}
        text += f"\noracle: {orc.verdict.value}, max||det J|-1| = {orc.max_deviation:.3e}"
    return res, text, _VERDICT_EXIT[rep.verdict]


def _cmd_iterate(a, qp):
    traj = core.iterate(qp, _positive_state(a.x0, qp.n), a.steps)
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    if a.out:
        Path(a.out).write_text(buf.getvalue(), encoding="utf-8")
        text = f"wrote {a.steps + 1} rows to {a.out}"
    else:
        text = buf.getvalue().rstrip("\n")
    return {"steps": a.steps, "final_x": [float(v) for v in traj.x[-1]]}, text, 0


def _cmd_jacobian(a, qp):
    ev = jacobian.analytic_jacobian(qp, _positive_state(a.at, qp.n))
    res = {"J": ev.J.tolist(), "det": ev.det, "K": ev.K.tolist()}
    if qp.n == 3:
        try:
            ex = jacobian.delta3_expansion(qp, tol=a.tol_struct)
        except QPMapError:
            pass
        else:
            res["delta3"] = {"lambda_sum": encode(ex.lambda_sum),
                             "linear": [encode(v) for v in ex.linear_coeffs],
                             "quadratic": {f"{k},{l}": encode(v)
                                           for (k, l), v in ex.quadratic_coeffs.items()}}
    return res, json.dumps(res, indent=2), 0


def _cmd_transform(a, qp):
    T = load_qmt(a.qmt)
    a.inputs[a.qmt] = _digest(a.qmt)
    log = []
    image = transform.apply_qmt(qp, T, tol=a.tol_struct, log=log)
    same = transform.class_invariant(image).matches(transform.class_invariant(qp),
                                                    0.0 if image.exact else a.tol_num)
    res = {"map": image.to_dict(), "canonicalize": [list(e) for e in log],
           "class_invariant_preserved": same}
    if a.out:
        Path(a.out).write_text(dumps_map(image) + "\n", encoding="utf-8")
    return res, dumps_map(image), 0


def _cmd_reduce(a, qp):
    u0 = _positive_state(a.x0, qp.n)
    if a.qmt:
        T = load_qmt(a.qmt)
        a.inputs[a.qmt] = _digest(a.qmt)
        an = reduce.reduce_with_qmt(qp, T, u0, tol=a.tol_struct)
        res = {"kinds": [k.value for k in an.kinds],
               "rates": {str(i): float(np.exp(v)) for i, v in an.log_rates.items()},
               "effective_lambda": {str(i): float(v) for i, v in an.effective_lambda.items()},
               "residual_terms": {str(i): [[c, j] for c, j in ts]
                                  for i, ts in an.residual_terms.items()},
               "map": an.transformed.to_dict()}
        lines = []
        for i, k in enumerate(an.kinds):
            line = f"y{i + 1}: {k.value}"
            if i in an.log_rates:
                line += f" rate={np.exp(an.log_rates[i]):.17g}"
            if i in an.effective_lambda:
                line += f" effective_lambda={an.effective_lambda[i]:.17g}"
            lines.append(line)
        return res, "\n".join(lines), 0
    red = reduce.reduce_conservative(qp, u0, tol=a.tol_struct)
    manifest = {"C": _matrix_json(red.qmt.C), "log_constant": red.log_constant,
                "constant_coordinate": red.constant_coordinate,
                "last_column_exponents": [encode(v) for v in red.lift_data["last_column_exponents"]],
                "canonicalize": [list(e) for e in red.lift_data["canonicalize"]]}
    res = {"reduced_map": red.reduced_map.to_dict(), "lift": manifest}
    if a.out:
        Path(a.out).write_text(dumps_map(red.reduced_map) + "\n", encoding="utf-8")
        mpath = a.manifest or str(Path(a.out).with_suffix("")) + ".lift.json"
        Path(mpath).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    elif a.manifest:
        Path(a.manifest).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return res, dumps_map(red.reduced_map), 0


def _cmd_solve2d(a, qp):
    if qp.n != 2:
        raise UsageError("solve2d needs a two-dimensional map")
    sol = reduce.solve_2d(qp, _positive_state(a.x0, 2), tol=a.tol_struct)
    return {"k": sol.k, "log_k": sol.log_k}, sol.describe(), 0


def _cmd_integrals(a, qp):
    basis = find_integrals(qp, tol=a.tol_struct)
    vecs = [[encode(v) for v in c] for c in basis]
    text = "\n".join("I = " + " * ".join(f"x{i + 1}^({v})" for i, v in enumerate(c) if v != 0)
                     for c in vecs) or "no quasimonomial first integrals"
    return {"exponent_vectors": vecs}, text, 0


def _cmd_oracle(a, qp):
    orc = sampling_oracle(qp, a.seed, a.npoints)
    res = {"verdict": orc.verdict.value, "max_deviation": orc.max_deviation,
           "npoints": orc.npoints, "skipped": orc.skipped, "seed": a.seed}
    return res, f"{orc.verdict.value}: max||det J|-1| = {orc.max_deviation:.3e}", \
        0 if orc.verdict is OracleVerdict.CONSISTENT else 1


def _cmd_generate(a):
    profile = {"thm1": "thm1_conservative"}.get(a.profile, a.profile)
    if profile in ("example1", "example2"):
        if not a.params:
            raise UsageError(f"--params is required for {profile}")
        params = [Fraction(v) if "/" in v else float(v) for v in a.params.split(",")]
        want = 3 if profile == "example1" else 5
        if len(params) != want:
            raise UsageError(f"{profile} takes {want} parameters")
        maker = core.make_example1 if profile == "example1" else core.make_example2
        qp = maker(*params)
    else:
        qp = core.random_map(a.seed, n=a.n, m=a.m, profile=profile, s=a.s)
    text = dumps_map(qp)
    if a.out:
        Path(a.out).write_text(text + "\n", encoding="utf-8")
    return {"map": qp.to_dict(), "seed": a.seed, "profile": profile}, text, 0


def run(argv):
    """Execute one command and return its :class:`RunReport` (nothing is printed)."""
    try:
        a = _parser().parse_args(argv)
    except UsageError as exc:
        return RunReport("", summary=f"usage error: {exc}", exit_code=EX_USAGE)
    a.inputs = {}
    rep = RunReport(a.command)
    try:
        if a.command == "generate":
            res, text, code = _cmd_generate(a)
        else:
            a.inputs[a.map] = _digest(a.map)
            qp = load_map(a.map)
            res, text, code = globals()[f"_cmd_{a.command}"](a, qp)
    except UsageError as exc:
        rep.summary, rep.exit_code = f"usage error: {exc}", EX_USAGE
    except (FileFormatError, OSError) as exc:
        rep.summary, rep.exit_code = f"file error: {exc}", EX_NOINPUT
    except QPMapError as exc:
        rep.summary, rep.exit_code = f"error: {type(exc).__name__}: {exc}", EX_DATAERR
    else:
        rep.result, rep.summary, rep.exit_code = res, text, code
    rep.inputs = a.inputs
    rep.json = a.json
    return rep


def main(argv=None):
    rep = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if rep.exit_code in (0, 1, 2) else sys.stderr
    print(rep.to_json() if getattr(rep, "json", False) and rep.exit_code < 64 else rep.summary,
          file=stream)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
