"""Command-line front end: ``gramcert <subcommand> [input] [flags]``.

Exit codes: 0 when a certificate or report was produced (whatever its
verdict), 1 for ``check --expect-positive`` on a non-positive verdict and for
a failing ``selftest``, 2 for I/O, schema and computation errors. Errors are a
single line on stderr: ``gramcert: error code=<code> message=<text>``.
"""

import argparse
import csv
import hashlib
import io
import json
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from . import serialize as ser
from .errors import GramCertError, SchemaError

DEFAULT_EPS = (1e-2, 1e-4, 1e-6, 1e-8)
DEFAULT_TOL = 1e-8
DEFAULT_S_GRID = (-0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5)
DEFAULT_T_GRID = (0.0, 0.1, 1.0, 10.0)
DEFAULT_SAMPLES = {"check": 64, "schwarz": 1000}


class UsageError(GramCertError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text: str) -> List[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise UsageError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gramcert", description="Positivity, factorization and coercivity certificates.")
    p.add_argument("--version", action="version", version=f"gramcert {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, has_input=True):
        if has_input:
            sp.add_argument("input", help="instance JSON file ('-' for stdin)")
        sp.add_argument("--output", "-o", help="write the result here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv", "human"), default="json")
        sp.add_argument("--eps-schedule", default=None, help="comma-separated, e.g. 1e-2,1e-4")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=None)
        sp.add_argument("--alpha", type=float, default=None)
        sp.add_argument("--s-grid", default=None)
        sp.add_argument("--t-grid", default=None)
        return sp

    c = common(sub.add_parser("check", help="positivity certificate"))
    c.add_argument("--expect-positive", action="store_true")
    common(sub.add_parser("factor", help="regularized Gram factor"))
    common(sub.add_parser("schwarz", help="mixed-Schwarz constant and s-scan"))
    common(sub.add_parser("douglas", help="solve AX = C by regularization"))
    common(sub.add_parser("gap", help="coercivity and decay certificate"))
    g = common(sub.add_parser("gen", help="generate a seeded instance"), has_input=False)
    g.add_argument("--kind", required=True)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--sizes", default=None, help="comma-separated integers")
    g.add_argument("--module-rank", type=int, default=1)
    g.add_argument("--param", action="append", default=[], help="key=value (value parsed as JSON)")
    common(sub.add_parser("selftest", help="run the built-in regressions"), has_input=False)
    return p


def resolve_config(args) -> Dict:
    """Validate flags and fill defaults; nothing is computed before this succeeds."""
    cfg = {"subcommand": args.subcommand, "format": args.format, "tol": args.tol, "seed": args.seed}
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    eps = DEFAULT_EPS if args.eps_schedule is None else tuple(_float_list(args.eps_schedule))
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise UsageError("--eps-schedule must be positive and strictly decreasing")
    cfg["eps_schedule"] = list(eps)
    samples = args.samples if args.samples is not None else DEFAULT_SAMPLES.get(args.subcommand, 0)
    if samples < 0:
        raise UsageError("--samples must be nonnegative")
    cfg["samples"] = samples
    if args.alpha is not None and not 0.0 <= args.alpha <= 1.0:
        raise UsageError("--alpha must lie in [0, 1]")
    cfg["alpha"] = args.alpha
    cfg["s_grid"] = list(DEFAULT_S_GRID if args.s_grid is None else _float_list(args.s_grid))
    t_grid = DEFAULT_T_GRID if args.t_grid is None else tuple(_float_list(args.t_grid))
    if any(t < 0 for t in t_grid):
        raise UsageError("--t-grid entries must be nonnegative")
    cfg["t_grid"] = list(t_grid)
    if args.subcommand == "check":
        cfg["expect_positive"] = args.expect_positive
    if args.subcommand == "gen":
        cfg["kind"] = args.kind
        cfg["n"] = args.n
        cfg["sizes"] = None if args.sizes is None else [int(v) for v in _float_list(args.sizes)]
        cfg["module_rank"] = args.module_rank
        params = {}
        for item in args.param:
            key, sep, val = item.partition("=")
            if not sep:
                raise UsageError(f"--param expects key=value, got {item!r}")
            try:
                params[key] = json.loads(val)
            except json.JSONDecodeError:
                params[key] = val
        cfg["params"] = params
    return cfg


def _read_input(path):
    try:
        if path == "-":
            data = sys.stdin.buffer.read()
        else:
            with open(path, "rb") as fh:
                data = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise SchemaError(f"{path} is not UTF-8") from None
    return ser.loads(text), hashlib.sha256(data).hexdigest()


# ------------------------------------------------------------- subcommands


def _cmd_check(obj, cfg):
    from .positivity import Verdict, positivity_verdict
    if isinstance(obj, dict) and obj.get("kind") == "gram-factor":
        T = ser.factor_product_from_json(obj)
    else:
        T = ser.blockmatrix_from_json(obj)
    cert = positivity_verdict(T, cfg["eps_schedule"], cfg["tol"], cfg["samples"], cfg["seed"])
    doc = ser.certificate_to_json(cert)
    rows = [("i", "j", "ratio")] + [(i + 1, j + 1, ser.number(r)) for (i, j), r in sorted(cert.ratios.items())]
    human = _human_check(cert)
    code = 1 if cfg.get("expect_positive") and cert.verdict is not Verdict.POSITIVE else 0
    return doc, rows, human, code


def _human_check(cert):
    lines = [f"verdict: {cert.verdict.value} (method {cert.method})"]
    explain = {
        "cross-entry-2x2": "two blocks with PSD diagonals and |<T12 y, x>|^2 <= <T11 x,x><T22 y,y> for all x, y",
        "cross-entry-slack": "row slack sum_{j != i} sqrt(r_ij) <= 1 for every i, r_ij the sharp pairwise ratio",
        "schur-chain": "successive Schur complements of T + eps I checked down the schedule",
        "gram-factor": "explicit factor with ||T - X X*||_2 below tolerance",
        "eigen-oracle": "dense Hermitian eigensolver",
    }
    lines.append(f"bound: {explain.get(cert.method, cert.method)}")
    if cert.min_eig is not None:
        lines.append(f"lambda_min(T) = {cert.min_eig:.12g}")
    if cert.witness_form is not None:
        lines.append(f"witness quadratic form lambda_min(<Tx,x>) = {cert.witness_form:.12g}")
    for (i, j), r in sorted(cert.ratios.items()):
        lines.append(f"  r[{i + 1},{j + 1}] = {r:.12g}")
    if cert.slack:
        lines.append("  row slack: " + ", ".join(f"{s:.6g}" for s in cert.slack))
    lines.extend(f"note: {n}" for n in cert.notes)
    return "\n".join(lines)


def _cmd_factor(obj, cfg):
    from .gramfactor import RegularizationSchedule, gram_factor
    from .errors import ResidualNotConverged
    T = ser.blockmatrix_from_json(obj)
    sched = RegularizationSchedule()
    try:
        F = gram_factor(T, delta=cfg["tol"], schedule=sched)
        converged = True
    except ResidualNotConverged as exc:
        if exc.factor is None:
            raise
        F, converged = exc.factor, False
    doc = ser.factor_to_json(F, T.module_rank)
    doc["converged"] = converged
    rows = [("pass", "residual")] + [(p + 1, ser.number(r)) for p, r in F.residual_history]
    human = "\n".join([
        f"factor {'accepted' if converged else 'NOT converged'}: ||T - X X*||_2 = {F.residual_norm:.3e}"
        f" (tolerance {cfg['tol']:.1e})",
        "diagonal regularizations: " + ", ".join(f"{e:.1e}" for e in F.diagonal_regularizations),
        f"operations: {F.ops}",
    ] + [f"near-threshold column ({i + 1},{j + 1}): ||Y|| = {v:.3e}" for i, j, v in F.threshold_events])
    return doc, rows, human, 0


def _cmd_schwarz(obj, cfg):
    from .schwarz import SchwarzProblem, optimize_s, schwarz_constant_exact
    T = ser.dense_from_json(obj)
    alpha = cfg["alpha"]
    if alpha is None:
        alpha = ser.parse_number(obj.get("alpha", 0.5)) if isinstance(obj, dict) else 0.5
        if not 0.0 <= alpha <= 1.0:
            raise SchemaError("alpha must lie in [0, 1]")
        cfg["alpha"] = alpha
    prob = SchwarzProblem(T, alpha)
    exact = schwarz_constant_exact(prob)
    opt = optimize_s(prob, cfg["s_grid"], cfg["samples"], cfg["seed"])
    doc = ser.schwarz_to_json(exact, opt)
    rows = [("s", "constant")] + [(s, ser.number(v)) for s, v in opt.values.items()]
    human = "\n".join([
        f"C_T,alpha = sigma_1^(1 - alpha) = {exact.sigma1:.12g}^{1 - alpha:g} = {exact.constant:.12g}",
        "attained at the top singular pair (x = v_1, y = u_1)",
        f"sampled constants over s: spread {opt.spread:.3e}",
    ] + [f"  s = {s:g}: {v:.12g}" for s, v in opt.values.items()])
    return doc, rows, human, 0


def _cmd_douglas(obj, cfg):
    from .douglas import TABLE_HEADER, solve
    inst = ser.douglas_from_json(obj)
    rep = solve(inst, cfg["eps_schedule"], cfg["tol"])
    doc = ser.douglas_to_json(rep)
    rows = [TABLE_HEADER] + [tuple(ser.number(v) for v in row) for row in rep.table]
    lines = [
        f"range(C) in range(A): {rep.range_included} (||(I - P)C|| = {rep.range_residual:.3e})",
        f"lambda* (smallest lambda with CC* <= lambda AA*) = {rep.lambda_star:.12g}",
        "regularized X_eps = A*(AA* + eps I)^{-1} C; ||X_eps|| <= sqrt(lambda*), A X_eps -> P C",
    ] + [f"  eps = {e:.1e}: ||X|| = {nx:.6g}, ||AX - C|| = {r:.3e}, ||AX - PC|| = {pr:.3e}"
         for e, nx, r, pr in rep.table] + [f"note: {n}" for n in rep.notes]
    return doc, rows, "\n".join(lines), 0


def _cmd_gap(obj, cfg):
    from .spectral import DECAY_HEADER, gap_certificate
    try:
        inst = ser.coercivity_from_json(obj)
    except SchemaError:
        raise
    cert = gap_certificate(inst, cfg["t_grid"])
    doc = ser.gap_to_json(cert)
    rows = [DECAY_HEADER] + [tuple(ser.number(v) for v in row) for row in cert.decay_checks]
    human = "\n".join([
        f"gamma* = ||A^(-1/2) B C^(-1/2)||^2 = {cert.gamma:.12g}",
        f"delta = min(a, c) (1 - sqrt(gamma))^2 = min({cert.a:.6g}, {cert.c:.6g}) * "
        f"{(1 - np.sqrt(cert.gamma)) ** 2:.6g} = {cert.delta:.12g}",
        f"lambda_min(H) = {cert.lambda_min_H:.12g} >= delta, so ||exp(-tH)|| <= exp(-delta t)",
    ] + [f"  t = {t:g}: {v:.6e} <= {b:.6e}" for t, v, b in cert.decay_checks])
    return doc, rows, human, 0


def _cmd_gen(cfg):
    from .testkit import InstanceSpec, _truth_to_json, generate, instance_to_json
    spec = InstanceSpec(cfg["seed"], cfg["kind"], cfg["n"],
                        None if cfg["sizes"] is None else tuple(cfg["sizes"]),
                        cfg["module_rank"], cfg["params"])
    inst, truth = generate(spec)
    doc = instance_to_json(inst)
    doc["spec"] = spec.to_json()
    doc["truth"] = _truth_to_json(truth)
    human = f"generated {spec.kind} instance with sizes {truth['sizes']}"
    return doc, None, human, 0


def _cmd_selftest(cfg):
    from .gramfactor import gram_factor
    from .positivity import Verdict, cross_entry_check, positivity_verdict
    from .testkit import InstanceSpec, generate
    from .blockmat import BlockMatrix
    checks = []
    T, _ = generate(InstanceSpec(0, "rank-one-coupled", 3, (2, 2, 2), 1, {"preset": "example41"}))
    coeffs = cross_entry_check(T).rank_one_coefficients
    want = {(0, 1): 0.068, (0, 2): 0.0629, (1, 2): 0.09805}
    checks.append(("example41-coefficients", all(abs(coeffs[k] - v) <= 1e-12 for k, v in want.items()),
                   {f"{i + 1},{j + 1}": coeffs[(i, j)] for i, j in want}))
    cert = positivity_verdict(T, cfg["eps_schedule"], cfg["tol"])
    checks.append(("example41-positive", cert.verdict is Verdict.POSITIVE, cert.method))
    F = gram_factor(T, delta=cfg["tol"])
    checks.append(("example41-factor", F.residual_norm <= cfg["tol"], F.residual_norm))
    M = np.array([[1, 1, -1], [1, 1, 1], [-1, 1, 1]], dtype=complex)
    C = BlockMatrix.from_dense(M, (1, 1, 1))
    rep = cross_entry_check(C)
    ratios_one = all(abs(r - 1.0) <= 1e-12 for r in rep.ratios.values())
    cert = positivity_verdict(C, cfg["eps_schedule"], cfg["tol"])
    checks.append(("counterexample-ratios", ratios_one, [rep.ratios[k] for k in sorted(rep.ratios)]))
    checks.append(("counterexample-not-positive",
                   cert.verdict is Verdict.NOT_POSITIVE and cert.witness_form < 0, cert.witness_form))
    doc = {"kind": "selftest", "passed": all(c[1] for c in checks),
           "checks": [{"name": n, "passed": bool(ok), "detail": d} for n, ok, d in checks]}
    rows = [("name", "passed")] + [(n, str(bool(ok)).lower()) for n, ok, _ in checks]
    human = "\n".join(f"{'PASS' if ok else 'FAIL'} {n}: {d}" for n, ok, d in checks)
    return doc, rows, human, 0 if doc["passed"] else 1


# ------------------------------------------------------------------ output


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(rows)
    return buf.getvalue()


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise SchemaError(f"cannot write {path}: {exc.strerror}") from None


def _diagnostic(exc) -> str:
    msg = " ".join(str(exc).split())
    return f"gramcert: error code={getattr(exc, 'code', 'error')} message={json.dumps(msg)}"


_VALUE_FLAGS = ("--eps-schedule", "--s-grid", "--t-grid", "--alpha", "--param")


def _join_values(argv):
    # argparse reads "-0.5,0" as an option; glue such values onto their flag
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            val = next(it, None)
            if val is not None and val.startswith("-"):
                out.append(f"{tok}={val}")
                continue
            out.append(tok)
            if val is not None:
                out.append(val)
        else:
            out.append(tok)
    return out


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        argv = _join_values(sys.argv[1:] if argv is None else list(argv))
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        digest = None
        if args.subcommand == "gen":
            doc, rows, human, code = _cmd_gen(cfg)
        elif args.subcommand == "selftest":
            doc, rows, human, code = _cmd_selftest(cfg)
        else:
            obj, digest = _read_input(args.input)
            handler = {"check": _cmd_check, "factor": _cmd_factor, "schwarz": _cmd_schwarz,
                       "douglas": _cmd_douglas, "gap": _cmd_gap}[args.subcommand]
            try:
                doc, rows, human, code = handler(obj, cfg)
            except (KeyError, TypeError, AttributeError) as exc:
                raise SchemaError(f"malformed input: {exc}") from None
        provenance = {"tool": "gramcert", "version": __version__, "config": cfg, "input_sha256": digest}
        if args.format == "json":
            doc["provenance"] = provenance
            text = ser.dumps(doc)
        elif args.format == "csv":
            if rows is None:
                raise UsageError(f"{args.subcommand} has no CSV form")
            text = _csv_text(rows)
            if args.output:
                _write(ser.dumps(provenance), args.output + ".provenance.json")
        else:
            text = human + "\n" + f"[gramcert {__version__}, input sha256 {digest}]\n"
        _write(text, args.output)
        return code
    except GramCertError as exc:
        print(_diagnostic(exc), file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
