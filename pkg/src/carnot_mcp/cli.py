"""Command-line front end: ``carnot-mcp <command> ...``.

Human-readable text goes to stdout by default; ``--json`` switches to a
single JSON document with keys ``command``, ``inputs``, ``result`` and
``caveats``; ``--csv`` (numeric commands) prints a header row and one row
per record.  Errors go to stderr.  Exit codes: 0 ok, 1 invalid input,
2 inconclusive classification under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog as cat
from . import elliptic, families, goh, martinet, quotients
from .algebra import AlgebraError, GradedSubspace, StratifiedAlgebra

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _qv(v) -> list[str]:
    return [_q(x) for x in v]


def _f(x: float) -> str:
    return format(x, ".17g")


def _rationals(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(p.strip()) for p in text.replace(" ", ",").split(",") if p.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse rational list {text!r}") from None


def _load(ref: str) -> cat.AlgebraRecord:
    path = Path(ref)
    if path.is_file():
        return cat.load_algebra_file(path)
    return cat.catalog_get(ref)


def _load_subspace(A: StratifiedAlgebra, path: str) -> GradedSubspace:
    vecs = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            v = cat.parse_combination(line, A.dim)
        except ValueError as exc:
            raise UsageError(f"{path}: line {lineno}: {exc}") from None
        if any(v):
            vecs.append(v)
    return GradedSubspace.from_vectors(A, vecs)


class Report:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.result: dict = {}
        self.caveats: list[str] = []
        self.lines: list[str] = []
        self.rows: list[dict] = []
        self.columns: list[str] = []

    def to_json(self) -> str:
        doc = {"command": self.command, "inputs": self.inputs, "result": self.result, "caveats": self.caveats}
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow(row)
        return buf.getvalue()


# -- algebraic commands ---------------------------------------------------------

def cmd_validate(a, rep: Report) -> int:
    try:
        rec = cat.load_algebra_file(a.file)
    except cat.AlgebraFileError as exc:
        report = getattr(exc, "report", None)
        rep.result = {"valid": False, "error": str(exc)}
        if report is not None:
            rep.result.update(kind=report.violation_kind, witness=list(report.first_violation))
        rep.lines.append(f"invalid: {exc}")
        return EXIT_INVALID
    A = rec.algebra
    rep.result = {"valid": True, "name": A.name, "strata": list(A.strata_dims), "step": A.step}
    rep.lines.append(f"{A.name}: valid stratified algebra, strata {A.strata_dims}, step {A.step}")
    return EXIT_OK


def cmd_catalog_list(a, rep: Report) -> int:
    entries = cat.catalog_list()
    rep.result = {"entries": [{"name": n, "expected": e} for n, e in entries]}
    for n, e in entries:
        rec = cat.catalog_get(n)
        flags = "".join([" dagger" if rec.dagger else "", " sard-conditional" if rec.sard_conditional else ""])
        rep.lines.append(f"{n:<14} {e:<9} strata {' '.join(map(str, rec.algebra.strata_dims))}{flags}")
    return EXIT_OK


def cmd_classify(a, rep: Report) -> int:
    rec = _load(a.algebra)
    v = cat.classify(rec, a.bound)
    res = {"name": rec.name, "color": v.color, "evidence": v.evidence, "expected": rec.expected_verdict}
    if v.certificate is not None:
        res["certificate"] = _qv(v.certificate.lam)
    if v.goh_legendre_witness is not None:
        lam0, u = v.goh_legendre_witness
        res["goh_legendre_witness"] = {"lambda0": _qv(lam0), "u": _qv(u)}
    if v.goh_only_witness is not None:
        lam0, u = v.goh_only_witness
        res["goh_only_witness"] = {"lambda0": _qv(lam0), "u": _qv(u)}
    rep.result = res
    rep.caveats = list(v.notes)
    rep.lines.append(f"{rec.name}: {v.color} ({v.evidence})")
    if v.certificate is not None:
        rep.lines.append(f"  certificate: {v.certificate}")
    rep.lines.extend(f"  note: {n}" for n in v.notes)
    if a.strict and v.color == "black_inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cert(text) -> quotients.HyperplaneCertificate:
    return quotients.HyperplaneCertificate.of(_rationals(text))


def cmd_verify_cert(a, rep: Report) -> int:
    rec = _load(a.algebra)
    A = rec.algebra
    cert = _cert(a.lam)
    ok = quotients.verify_martinet_certificate(A, cert)
    h2 = quotients.h2_of_h3(A, cert)
    rep.result = {"name": A.name, "certificate": _qv(cert.lam), "accepted": ok,
                  "pairing_matrix": [_qv(r) for r in quotients.pairing_matrix(A, cert)],
                  "h2": [cat.format_combination(A.embed(2, b)) for b in h2],
                  "h3": [cat.format_combination(A.embed(3, b)) for b in quotients.h3_of_cert(A, cert)]}
    rep.lines.append(f"{A.name}: certificate {cert} {'accepted' if ok else 'rejected'}")
    rep.lines.append(f"  h2 = {', '.join(rep.result['h2']) or '0'}; h3 = {', '.join(rep.result['h3']) or '0'}")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_engel_ideal(a, rep: Report) -> int:
    rec = _load(a.algebra)
    A = rec.algebra
    w = quotients.build_engel_ideal(A, _cert(a.lam))
    fmt = cat.format_combination
    rep.result = {"name": A.name, "ideal": [fmt(v) for v in w.h.global_basis(A)],
                  "X1": fmt(w.x1), "X2": fmt(w.x2), "Y": fmt(w.y), "Z": fmt(w.z),
                  "quotient_strata": list(w.quotient.strata_dims), "kerP": [fmt(v) for v in w.kerP]}
    rep.lines.append(f"{A.name}: ideal h of dimension {w.h.dim}, quotient strata {w.quotient.strata_dims}")
    for k in ("X1", "X2", "Y", "Z"):
        rep.lines.append(f"  {k} = {rep.result[k]}")
    rep.lines.append("  h = span{" + ", ".join(rep.result["ideal"]) + "}")
    return EXIT_OK


def cmd_tower(a, rep: Report) -> int:
    rec = _load(a.algebra)
    A = rec.algebra
    h = _load_subspace(A, a.h)
    ht = _load_subspace(A, a.htilde)
    res = quotients.build_tower(A, h, ht)
    levels = [[cat.format_combination(v) for v in L.global_basis(A)] for L in res.levels]
    rep.result = {"name": A.name, "levels": levels, "subalgebra": list(res.subalgebra_flags),
                  "normal": list(res.normal_flags), "ok": res.ok}
    for i, L in enumerate(levels):
        rep.lines.append(f"  h_{i} = span{{{', '.join(L)}}}" if L else f"  h_{i} = 0")
    rep.lines.append(f"tower {'ok' if res.ok else 'FAILED'}")
    return EXIT_OK if res.ok else EXIT_INVALID


def cmd_goh(a, rep: Report) -> int:
    rec = _load(a.algebra)
    A = rec.algebra
    u = _rationals(a.u)
    if len(u) != A.rank:
        raise UsageError(f"--u needs {A.rank} entries")
    if a.lam is not None:
        lam0 = _rationals(a.lam)
        r = (goh.eval_goh_legendre_step3 if A.step == 3 else goh.eval_goh_general_constant)(A, lam0, u)
        rep.result = {"abnormal": r.abnormal_ok, "goh": r.goh_ok, "legendre": r.legendre_ok,
                      "strong_legendre": r.strong_legendre_ok, "witness": r.witness,
                      "legendre_form": [_qv(row) for row in r.legendre_form]}
        if r.partial:
            rep.caveats.append("step > 3: Legendre flags use only the t = 0 coefficient")
        rep.lines.append(f"abnormal={r.abnormal_ok} goh={r.goh_ok} legendre={r.legendre_ok} "
                         f"strong={r.strong_legendre_ok}")
        return EXIT_OK
    space = goh.goh_solution_space(A, u)
    rep.result = {"goh_covectors": [_qv(v) for v in space]}
    rep.lines.append(f"dimension of Goh covectors for u = ({', '.join(_qv(u))}): {len(space)}")
    rep.lines.extend("  " + " ".join(_qv(v)) for v in space)
    return EXIT_OK


def cmd_bound(a, rep: Report) -> int:
    k = a.rank
    b = quotients.generic_dim_bound(k)
    free = families.free_step3_dimension(k)
    witt = sum(families.witt_dimension(k, d) for d in (1, 2, 3))
    rep.result = {"rank": k, "bound": _q(b), "free_step3_dimension": free, "witt_total": witt}
    rep.lines.append(f"rank {k}: bound {_q(b)}, free step-3 dimension {free} (Witt {witt})")
    return EXIT_OK


# -- Martinet commands ----------------------------------------------------------

def _covector(a) -> martinet.MartinetCovector:
    return martinet.MartinetCovector(a.r, a.theta, a.w0)


def cmd_jr(a, rep: Report) -> int:
    val = martinet.reduced_jacobian(a.xi, a.m)
    exp_ = martinet.expansion_jr(a.xi, a.m)
    rep.columns = ["xi", "m", "jr", "expansion"]
    rep.rows = [{"xi": _f(a.xi), "m": _f(a.m), "jr": _f(val), "expansion": _f(exp_)}]
    rep.result = {"jr": val, "expansion": exp_}
    if a.xi < 0.5:
        rep.caveats.append("xi < 0.5: Maclaurin series path")
    rep.lines.append(f"J_R({a.xi}, {a.m}) = {_f(val)}")
    return EXIT_OK


def cmd_geodesic(a, rep: Report) -> int:
    cov = _covector(a)
    g = martinet.geodesic_closed_form(cov, a.t)
    rep.columns = ["t", "x", "y", "z", "v", "source"]
    rep.rows = [{"t": _f(g.t), "x": _f(g.x), "y": _f(g.y), "z": _f(g.z), "v": _f(g.v), "source": "closed_form"}]
    rep.result = {"closed_form": {"x": g.x, "y": g.y, "z": g.z, "v": g.v}}
    rep.lines.append(f"closed form: x={_f(g.x)} y={_f(g.y)} z={_f(g.z)}")
    if a.oracle_steps:
        o = martinet.geodesic_ode_oracle(cov, a.t, a.oracle_steps)
        rep.rows.append({"t": _f(o.t), "x": _f(o.x), "y": _f(o.y), "z": _f(o.z), "v": _f(o.v), "source": "rk4"})
        err = max(abs(g.x - o.x), abs(g.y - o.y), abs(g.z - o.z))
        rep.result["rk4"] = {"x": o.x, "y": o.y, "z": o.z, "v": o.v, "steps": a.oracle_steps}
        rep.result["max_abs_difference"] = err
        rep.lines.append(f"rk4 ({a.oracle_steps} steps): x={_f(o.x)} y={_f(o.y)} z={_f(o.z)}; diff {err:.3e}")
    return EXIT_OK


def cmd_cut(a, rep: Report) -> int:
    cov = _covector(a)
    p = martinet.params_from_covector(cov)
    tc = martinet.cut_time(cov)
    conj = martinet.conjugate_time(cov)
    y_cut = martinet.geodesic_closed_form(cov, tc).y
    rep.columns = ["m", "omega", "K", "t_cut", "t_conj", "xi_conj", "y_at_cut"]
    row = {"m": p.m, "omega": p.omega, "K": p.phi, "t_cut": tc, "t_conj": conj.t, "xi_conj": conj.xi, "y_at_cut": y_cut}
    rep.rows = [{k: _f(v) for k, v in row.items()}]
    rep.result = row
    rep.lines.append(f"m={_f(p.m)} K={_f(p.phi)} t_cut={_f(tc)} t_conj={_f(conj.t)} (xi/K = {conj.xi / p.phi:.6f})")
    return EXIT_OK


_MCP_COLUMNS = ["j", "m", "omega", "t", "ratio", "t_ratio", "violated_up_to_N", "path"]


def _mcp_row(j, r: martinet.MCPRatioReport) -> dict:
    return {"j": j, "m": _f(r.m), "omega": _f(r.omega), "t": _f(r.t), "ratio": _f(r.ratio),
            "t_ratio": _f(r.t_ratio), "violated_up_to_N": r.violated_up_to_N, "path": r.path}


def cmd_mcp(a, rep: Report) -> int:
    res = martinet.mcp_violation_search(a.N, a.t, a.max_iter)
    r = res.report
    rep.columns = _MCP_COLUMNS
    rep.rows = [_mcp_row(res.j, r)]
    rep.result = {"j": res.j, "m": r.m, "omega": r.omega, "ratio": r.ratio, "target": a.t ** (a.N - 1),
                  "t_ratio": r.t_ratio, "violated_up_to_N": r.violated_up_to_N,
                  "history": [h.ratio for h in res.history]}
    rep.caveats.append(f"schedule m_j = 1 - 16 exp(-2j), omega_j = {martinet.SCHEDULE_OMEGA_FACTOR} K(m_j)")
    rep.lines.append(f"MCP(0, {a.N}) violated at j={res.j}: ratio {_f(r.ratio)} < t^(N-1) = {_f(a.t ** (a.N - 1))}")
    return EXIT_OK


def cmd_sweep(a, rep: Report) -> int:
    cols = ["m", "K", "xi", "jr", "expansion"]
    rows = []
    for m in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999):
        K = elliptic.complete_K(m)
        for k in range(1, a.samples + 1):
            xi = 2.0 * K * k / a.samples
            rows.append({"m": _f(m), "K": _f(K), "xi": _f(xi), "jr": _f(martinet.reduced_jacobian(xi, m)),
                         "expansion": _f(martinet.expansion_jr(xi, m))})
    rep.columns, rep.rows = cols, rows
    out = Path(a.out)
    out.write_text(rep.to_csv(), encoding="utf-8")
    rep.result = {"out": str(out), "rows": len(rows)}
    rep.lines.append(f"wrote {len(rows)} rows to {out}")
    rep.rows = []
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    numeric = _Parser(add_help=False)
    numeric.add_argument("--csv", action="store_true", help="emit CSV with a header row")

    p = _Parser(prog="carnot-mcp", description="Martinet quotients, Goh-Legendre checks and Martinet geodesics.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="validate an algebra file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("catalog", help="shipped algebras")
    csub = s.add_subparsers(dest="catalog_command", required=True)
    cl = csub.add_parser("list", parents=[common])
    cl.set_defaults(func=cmd_catalog_list)

    s = sub.add_parser("classify", parents=[common], help="red / green / black_inconclusive verdict")
    s.add_argument("algebra", help="catalog name or algebra file")
    s.add_argument("--bound", type=int, default=2)
    s.add_argument("--strict", action="store_true", help="exit 2 on black_inconclusive")
    s.set_defaults(func=cmd_classify)

    for name, func in (("verify-cert", cmd_verify_cert), ("engel-ideal", cmd_engel_ideal)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("algebra")
        s.add_argument("--lambda", dest="lam", required=True, help='covector on g_3, e.g. "1,0"')
        s.set_defaults(func=func)

    s = sub.add_parser("tower", parents=[common])
    s.add_argument("algebra")
    s.add_argument("--h", required=True, help="file with one generator expression per line")
    s.add_argument("--htilde", required=True)
    s.set_defaults(func=cmd_tower)

    s = sub.add_parser("goh", parents=[common])
    s.add_argument("algebra")
    s.add_argument("--u", required=True, help="constant control, e.g. \"1,0,0\"")
    s.add_argument("--lambda", dest="lam", help="full-length covector lambda0")
    s.set_defaults(func=cmd_goh)

    s = sub.add_parser("bound", parents=[common])
    s.add_argument("--rank", type=int, required=True)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("martinet", help="Martinet geodesics and the reduced Jacobian")
    msub = s.add_subparsers(dest="martinet_command", required=True)
    m = msub.add_parser("jr", parents=[common, numeric])
    m.add_argument("--xi", type=float, required=True)
    m.add_argument("--m", type=float, required=True)
    m.set_defaults(func=cmd_jr)
    for name, func in (("geodesic", cmd_geodesic), ("cut", cmd_cut)):
        m = msub.add_parser(name, parents=[common, numeric])
        m.add_argument("--r", type=float, required=True)
        m.add_argument("--theta", type=float, required=True)
        m.add_argument("--w0", type=float, required=True)
        if name == "geodesic":
            m.add_argument("--t", type=float, required=True)
            m.add_argument("--oracle-steps", type=int, default=0)
        m.set_defaults(func=func)
    m = msub.add_parser("mcp", parents=[common, numeric])
    m.add_argument("--N", type=int, required=True)
    m.add_argument("--t", type=float, required=True)
    m.add_argument("--max-iter", type=int, default=16)
    m.set_defaults(func=cmd_mcp)
    m = msub.add_parser("sweep", parents=[common])
    m.add_argument("--out", required=True)
    m.add_argument("--samples", type=int, default=32)
    m.set_defaults(func=cmd_sweep)
    return p


def _command_name(a) -> str:
    parts = [a.command]
    for attr in ("catalog_command", "martinet_command"):
        if getattr(a, attr, None):
            parts.append(getattr(a, attr))
    return " ".join(parts)


def _inputs(a) -> dict:
    skip = {"func", "command", "catalog_command", "martinet_command", "json", "csv"}
    return {k: v for k, v in sorted(vars(a).items()) if k not in skip}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        a = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    rep = Report(_command_name(a), _inputs(a))
    try:
        code = a.func(a, rep)
    except (UsageError, cat.AlgebraFileError, cat.CatalogError, AlgebraError, ValueError,
            ArithmeticError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"error: {msg}", file=stderr)
        if getattr(a, "json", False):
            rep.result = {"error": msg}
            print(rep.to_json(), file=stdout)
        return EXIT_INVALID
    if getattr(a, "json", False):
        print(rep.to_json(), file=stdout)
    elif getattr(a, "csv", False) and rep.columns:
        stdout.write(rep.to_csv())
    else:
        for line in rep.lines:
            print(line, file=stdout if code != EXIT_INVALID else stderr)
        for c in rep.caveats:
            if not any(c in line for line in rep.lines):
                print(f"  caveat: {c}", file=stdout)
    return code


def main() -> None:
    sys.exit(run())
