"""Algebra data files, the shipped catalog, and classification verdicts.

File format (UTF-8, one statement per line, ``#`` starts a comment)::

    name: N_4_2
    strata: 2 1 1
    bracket: 1 2 -> 3:1
    bracket: 1 3 -> 4:1
    expected: red
    certificate: 1
    h2: 0
    h3: 0

Brackets use 1-based indices with ``i < j``; coefficients are ``p`` or
``p/q``.  Optional keys: ``expected`` (red|green|black|unmarked),
``certificate`` (integers, one per basis vector of g_3), ``dagger``,
``sard_conditional``, ``goh_control`` (one entry per basis vector of g_1),
and ``h2`` / ``h3``: comma-separated generators such as ``X4-X5`` giving the
tabulated subspaces the certificate should produce.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .algebra import AlgebraError, StratifiedAlgebra, validate
from .goh import search_goh_legendre_witness, search_goh_witness
from .quotients import HyperplaneCertificate, h2_of_h3, h3_of_cert, search_martinet_certificate
from .rational import Matrix, Vector, span_basis

COLORS = ("red", "green", "black", "unmarked")


class AlgebraFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CatalogError(KeyError):
    pass


@dataclass(frozen=True)
class AlgebraRecord:
    algebra: StratifiedAlgebra
    relations: dict = field(compare=False, repr=False)
    expected_verdict: str = "unmarked"
    sard_conditional: bool = False
    dagger: bool = False
    certificate: HyperplaneCertificate | None = None
    goh_witness_control: tuple[Fraction, ...] | None = None
    h2_generators: tuple[Vector, ...] | None = None  # global coordinates
    h3_generators: tuple[Vector, ...] | None = None

    @property
    def name(self) -> str:
        return self.algebra.name

    def expected_h2(self) -> Matrix | None:
        """Tabulated h2 as an RREF basis in g_2 coordinates."""
        if self.h2_generators is None:
            return None
        A = self.algebra
        return span_basis([A.restrict(2, v) for v in self.h2_generators], A.stratum_dim(2))

    def expected_h3(self) -> Matrix | None:
        if self.h3_generators is None:
            return None
        A = self.algebra
        return span_basis([A.restrict(3, v) for v in self.h3_generators], A.stratum_dim(3))


_TERM = re.compile(r"\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*X(\d+)\s*")


def parse_combination(text: str, n: int) -> Vector:
    """Parse ``X4 - X5`` / ``2X3 + 1/2 X4`` / ``0`` into a global coordinate vector."""
    text = text.strip()
    v = [Fraction(0)] * n
    if text == "0":
        return tuple(v)
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse linear combination {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        if pos > 0 and not m.group(1):
            raise ValueError(f"missing sign in {text!r}")
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        idx = int(m.group(3))
        if not 1 <= idx <= n:
            raise ValueError(f"X{idx} out of range")
        v[idx - 1] += sign * coeff
        pos = m.end()
    return tuple(v)


def format_combination(v: Vector) -> str:
    parts = []
    for i, c in enumerate(v):
        if c == 0:
            continue
        mag = abs(c)
        term = f"X{i + 1}" if mag == 1 else f"{mag}X{i + 1}"
        parts.append(("-" if c < 0 else "+") + term)
    if not parts:
        return "0"
    s = " ".join(p[0] + " " + p[1:] for p in parts)
    return s[2:] if s.startswith("+") else "-" + s[2:]


def _parse_bool(value: str, line: int) -> bool:
    if value in ("true", "yes", "1"):
        return True
    if value in ("false", "no", "0"):
        return False
    raise AlgebraFileError(f"expected true/false, got {value!r}", line)


def _parse_generators(value: str, n: int, line: int) -> tuple[Vector, ...]:
    try:
        vecs = [parse_combination(part, n) for part in value.split(",")]
    except ValueError as exc:
        raise AlgebraFileError(str(exc), line) from None
    return tuple(v for v in vecs if any(v))


def parse_algebra_file(text: str) -> AlgebraRecord:
    """Parse and validate an algebra file; raises :class:`AlgebraFileError`."""
    fields: dict[str, tuple[str, int]] = {}
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise AlgebraFileError(f"expected 'key: value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split(":", 1))
        if key == "bracket":
            m = re.fullmatch(r"(\d+)\s+(\d+)\s*->\s*(.*)", value)
            if not m:
                raise AlgebraFileError(f"malformed bracket {value!r}", lineno)
            i, j = int(m.group(1)), int(m.group(2))
            if i == j:
                raise AlgebraFileError(f"bracket of X{i} with itself", lineno)
            if i > j:
                raise AlgebraFileError(f"bracket indices must satisfy i < j, got {i} {j}", lineno)
            if (i, j) in brackets:
                raise AlgebraFileError(f"duplicate bracket entry for [X{i}, X{j}]", lineno)
            rhs: dict[int, Fraction] = {}
            for term in m.group(3).split():
                tm = re.fullmatch(r"(\d+):([+-]?\d+(?:/\d+)?)", term)
                if not tm:
                    raise AlgebraFileError(f"malformed term {term!r}", lineno)
                k = int(tm.group(1))
                if k in rhs:
                    raise AlgebraFileError(f"X{k} repeated in [X{i}, X{j}]", lineno)
                try:
                    rhs[k] = Fraction(tm.group(2))
                except ZeroDivisionError:
                    raise AlgebraFileError(f"zero denominator in {term!r}", lineno) from None
            brackets[(i, j)] = rhs
            continue
        if key not in ("name", "strata", "expected", "certificate", "dagger", "sard_conditional",
                       "goh_control", "h2", "h3"):
            raise AlgebraFileError(f"unknown key {key!r}", lineno)
        if key in fields:
            raise AlgebraFileError(f"duplicate key {key!r}", lineno)
        fields[key] = (value, lineno)

    for required in ("name", "strata"):
        if required not in fields:
            raise AlgebraFileError(f"missing '{required}'")
    name, _ = fields["name"]
    if not re.fullmatch(r"[A-Za-z0-9_]+", name):
        raise AlgebraFileError(f"invalid name {name!r}", fields["name"][1])
    sval, sline = fields["strata"]
    try:
        strata = tuple(int(x) for x in sval.split())
    except ValueError:
        raise AlgebraFileError(f"strata must be integers, got {sval!r}", sline) from None
    if not strata or any(d <= 0 for d in strata):
        raise AlgebraFileError("strata must be positive integers", sline)
    n = sum(strata)
    for (i, j), rhs in brackets.items():
        if j > n or any(k > n for k in rhs):
            raise AlgebraFileError(f"index out of range in [X{i}, X{j}] (dimension {n})")

    try:
        A = StratifiedAlgebra.from_brackets(name, strata, brackets)
    except AlgebraError as exc:
        raise AlgebraFileError(str(exc)) from None
    report = validate(A)
    if not report.ok:
        err = AlgebraFileError(f"{name}: {report.describe()}")
        err.report = report
        raise err

    kw = {}
    if "expected" in fields:
        value, line = fields["expected"]
        if value not in COLORS:
            raise AlgebraFileError(f"expected must be one of {COLORS}", line)
        kw["expected_verdict"] = value
    for flag in ("dagger", "sard_conditional"):
        if flag in fields:
            kw[flag] = _parse_bool(*fields[flag])
    if "certificate" in fields:
        value, line = fields["certificate"]
        try:
            coords = [int(x) for x in value.split()]
        except ValueError:
            raise AlgebraFileError("certificate entries must be integers", line) from None
        if A.step < 3 or len(coords) != A.stratum_dim(3) or not any(coords):
            raise AlgebraFileError(f"certificate needs {A.stratum_dim(3)} entries, not all zero", line)
        kw["certificate"] = HyperplaneCertificate.of(coords)
    if "goh_control" in fields:
        value, line = fields["goh_control"]
        try:
            u = tuple(Fraction(x) for x in value.split())
        except ValueError:
            raise AlgebraFileError("goh_control entries must be rational", line) from None
        if len(u) != A.rank:
            raise AlgebraFileError(f"goh_control needs {A.rank} entries", line)
        kw["goh_witness_control"] = u
    for key, attr, stratum in (("h2", "h2_generators", 2), ("h3", "h3_generators", 3)):
        if key in fields:
            value, line = fields[key]
            gens = _parse_generators(value, n, line)
            for g in gens:
                if A.degree(g) != stratum:
                    raise AlgebraFileError(f"{key} generator {format_combination(g)} is not in g_{stratum}", line)
            kw[attr] = gens

    rec = AlgebraRecord(A, brackets, **kw)
    if rec.expected_verdict == "red" and rec.certificate is None:
        raise AlgebraFileError(f"{name}: red records need a certificate")
    if rec.expected_verdict == "red" and rec.dagger:
        raise AlgebraFileError(f"{name}: daggers only annotate green records")
    return rec


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def serialize_record(rec: AlgebraRecord) -> str:
    """Canonical text form; ``serialize_record(parse_algebra_file(t))`` is stable under re-parsing."""
    A = rec.algebra
    lines = [f"name: {A.name}", "strata: " + " ".join(str(d) for d in A.strata_dims)]
    for (i, j) in sorted(rec.relations):
        terms = " ".join(f"{k}:{_fmt_frac(c)}" for k, c in sorted(rec.relations[(i, j)].items()) if c != 0)
        if terms:
            lines.append(f"bracket: {i} {j} -> {terms}")
    if rec.expected_verdict != "unmarked":
        lines.append(f"expected: {rec.expected_verdict}")
    if rec.certificate is not None:
        lines.append("certificate: " + " ".join(_fmt_frac(x) for x in rec.certificate.lam))
    if rec.dagger:
        lines.append("dagger: true")
    if rec.sard_conditional:
        lines.append("sard_conditional: true")
    if rec.goh_witness_control is not None:
        lines.append("goh_control: " + " ".join(_fmt_frac(x) for x in rec.goh_witness_control))
    if rec.h2_generators is not None:
        lines.append("h2: " + (", ".join(format_combination(v) for v in rec.h2_generators) or "0"))
    if rec.h3_generators is not None:
        lines.append("h3: " + (", ".join(format_combination(v) for v in rec.h3_generators) or "0"))
    return "\n".join(lines) + "\n"


def load_algebra_file(path) -> AlgebraRecord:
    return parse_algebra_file(Path(path).read_text(encoding="utf-8"))


# -- shipped catalog ------------------------------------------------------------

_CACHE: dict[str, AlgebraRecord] | None = None


def _load_catalog() -> dict[str, AlgebraRecord]:
    global _CACHE
    if _CACHE is None:
        records = {}
        for entry in sorted(resources.files("carnot_mcp.data").iterdir(), key=lambda p: p.name):
            if entry.name.endswith(".alg"):
                rec = parse_algebra_file(entry.read_text(encoding="utf-8"))
                if rec.name in records:
                    raise CatalogError(f"duplicate catalog entry {rec.name}")
                records[rec.name] = rec
        _CACHE = records
    return _CACHE


def catalog_list() -> list[tuple[str, str]]:
    return [(name, rec.expected_verdict) for name, rec in _load_catalog().items()]


def catalog_get(name: str) -> AlgebraRecord:
    try:
        return _load_catalog()[name]
    except KeyError:
        raise CatalogError(f"unknown algebra {name!r}") from None


# -- classification -----------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    color: str  # red | green | black_inconclusive
    evidence: str  # certificate | goh-absence-up-to-bound | step<=2 | none
    certificate: HyperplaneCertificate | None = None
    goh_legendre_witness: tuple[Vector, Vector] | None = None
    goh_only_witness: tuple[Vector, Vector] | None = None
    notes: tuple[str, ...] = ()

    def matches(self, expected: str) -> bool:
        return {"red": "red", "green": "green", "black": "black_inconclusive"}.get(expected) == self.color


def classify(rec: AlgebraRecord | StratifiedAlgebra, bound: int = 2) -> Verdict:
    """Red if a Martinet certificate exists on the grid; green if step <= 2 or (step 3 and no
    Goh-Legendre witness on the grid); black_inconclusive otherwise."""
    if isinstance(rec, StratifiedAlgebra):
        rec = AlgebraRecord(rec, {})
    A = rec.algebra
    notes = [f"search bound {bound}"]
    if rec.sard_conditional:
        notes.append("failure of MCP conditional on the minimizing Sard property")
    if A.step <= 2:
        notes.append("step <= 2: every geodesic is normal")
        return Verdict("green", "step<=2", notes=tuple(notes))
    cert = search_martinet_certificate(A, bound)
    if cert is not None:
        h2 = h2_of_h3(A, cert)
        h3 = h3_of_cert(A, cert)
        notes.append("h2 = " + _describe(A, 2, h2) + "; h3 = " + _describe(A, 3, h3))
        return Verdict("red", "certificate", certificate=cert, notes=tuple(notes))
    if A.stratum_dim(3) >= 2:
        notes.append("no certificate on the grid; dim g_3 >= 2 so this is not a proof")
    if A.step > 3:
        notes.append("step >= 4 and no Martinet certificate: no criterion applies")
        return Verdict("black_inconclusive", "none", notes=tuple(notes))
    witness = search_goh_legendre_witness(A, bound)
    if witness is not None:
        notes.append("non-trivial Goh-Legendre witness found")
        return Verdict("black_inconclusive", "none", goh_legendre_witness=witness, notes=tuple(notes))
    goh = search_goh_witness(A, bound)
    if goh is not None:
        notes.append("dagger: Goh witness exists but no Goh-Legendre witness up to the bound")
    notes.append("green is a bounded-search verdict")
    return Verdict("green", "goh-absence-up-to-bound", goh_only_witness=goh, notes=tuple(notes))


def _describe(A: StratifiedAlgebra, stratum: int, basis: Matrix) -> str:
    if not basis:
        return "0"
    return ", ".join(format_combination(A.embed(stratum, v)) for v in basis)
