"""JSON dataset ingestion and serialization.

The wire format (documented in docs/dataset-format.md) keeps everything
exact: rationals travel as "p/q" strings, q-exponents as "n/8" strings,
roots as linear combinations of generator names.  Ingestion errors carry
the JSON path of the offending field.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .algebra import GradedElement, IntegrationTable
from .genera import RootBundle
from .localization import ActionData, FixedComponent

FORMAT_VERSION = 1


class DatasetFormatError(Exception):
    """Ingestion failure addressed by JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__("%s: %s" % (path, message))
        self.path = path


def parse_rational(s, path: str) -> Fraction:
    try:
        if isinstance(s, int):
            return Fraction(s)
        if isinstance(s, str):
            return Fraction(s.replace(" ", ""))
    except (ValueError, ZeroDivisionError):
        pass
    raise DatasetFormatError(path, "expected a rational like '3/2', got %r" % (s,))


def format_rational(v: Fraction) -> str:
    return str(v)


_TERM_RE = re.compile(r"^(?:(?P<coef>-?\d+(?:/\d+)?)\s*\*\s*)?(?P<name>[A-Za-z_][A-Za-z_0-9]*)$")


def parse_root_expr(expr, gens, cap, path: str) -> GradedElement:
    """A linear combination of generator names: '2*y + b', '-x', '0'."""
    if not isinstance(expr, str):
        raise DatasetFormatError(path, "root expression must be a string")
    s = expr.replace("-", "+-").replace(" ", "")
    out = GradedElement.zero(gens, cap)
    names = [n for n, _ in gens]
    for term in filter(None, s.split("+")):
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        if term in ("0", ""):
            continue
        m = _TERM_RE.match(term)
        if not m:
            raise DatasetFormatError(path, "cannot parse root term %r" % term)
        name = m.group("name")
        if name not in names:
            raise DatasetFormatError(path, "unknown generator %r (have %s)" % (name, names))
        coef = Fraction(m.group("coef") or 1)
        if neg:
            coef = -coef
        out = out + GradedElement.generator(gens, cap, name) * coef
    return out


def format_root(root: GradedElement) -> str:
    names = [n for n, _ in root.gens]
    parts = []
    for exps, v in sorted(root.terms.items()):
        idx = [i for i, e in enumerate(exps) if e]
        if len(idx) != 1 or exps[idx[0]] != 1:
            raise ValueError("roots must be linear in the generators")
        name = names[idx[0]]
        parts.append(name if v == 1 else "%s*%s" % (v, name))
    return " + ".join(parts) if parts else "0"


def parse_monomial(key: str, fiber_names, path: str) -> tuple[int, ...]:
    exps = [0] * len(fiber_names)
    if key.strip() in ("1", ""):
        return tuple(exps)
    for factor in key.replace(" ", "").split("*"):
        if "^" in factor:
            name, _, pw = factor.partition("^")
            try:
                e = int(pw)
            except ValueError:
                raise DatasetFormatError(path, "bad exponent in monomial %r" % key)
        else:
            name, e = factor, 1
        if name not in fiber_names:
            raise DatasetFormatError(path, "unknown fiber generator %r in monomial %r"
                                     % (name, key))
        exps[fiber_names.index(name)] += e
    return tuple(exps)


def format_monomial(exps: tuple[int, ...], names) -> str:
    parts = [(n if e == 1 else "%s^%d" % (n, e)) for n, e in zip(names, exps) if e]
    return "*".join(parts) if parts else "1"


def _gen_list(raw, path: str) -> tuple[tuple[str, int], ...]:
    out = []
    for i, g in enumerate(raw):
        p = "%s[%d]" % (path, i)
        if not isinstance(g, dict) or "name" not in g:
            raise DatasetFormatError(p, "generator entries are {name, degree}")
        deg = int(g.get("degree", 2))
        if deg <= 0 or deg % 2:
            raise DatasetFormatError(p, "generator degree must be a positive even integer")
        out.append((str(g["name"]), deg))
    return tuple(out)


def _parse_bundles(raw, gens, cap, path: str) -> tuple[RootBundle, ...]:
    out = []
    for i, b in enumerate(raw or []):
        p = "%s[%d]" % (path, i)
        if not isinstance(b, dict):
            raise DatasetFormatError(p, "bundle entries are objects")
        weight = parse_rational(b.get("weight", "0"), p + ".weight")
        rank = b.get("rank", None)
        roots_raw = b.get("roots", None)
        if roots_raw is None:
            if rank is None:
                raise DatasetFormatError(p, "need rank or roots")
            roots_raw = ["0"] * int(rank)
        if rank is None:
            rank = len(roots_raw)
        if len(roots_raw) != int(rank):
            raise DatasetFormatError(p, "rank %s but %d roots" % (rank, len(roots_raw)))
        roots = tuple(parse_root_expr(r, gens, cap, "%s.roots[%d]" % (p, j))
                      for j, r in enumerate(roots_raw))
        try:
            out.append(RootBundle(weight, int(rank), roots))
        except ValueError as e:
            raise DatasetFormatError(p, str(e))
    return tuple(out)


def parse_dataset(obj: dict) -> ActionData:
    if not isinstance(obj, dict):
        raise DatasetFormatError("$", "top level must be an object")
    fmt = obj.get("format", FORMAT_VERSION)
    if fmt != FORMAT_VERSION:
        raise DatasetFormatError("$.format", "unsupported format %r" % fmt)
    if "fiber_half_dim" not in obj:
        raise DatasetFormatError("$.fiber_half_dim", "missing")
    k = int(obj["fiber_half_dim"])
    base_gens = _gen_list(obj.get("base_generators", []), "$.base_generators")
    base_cap = int(obj.get("base_degree_cap", 0))
    if base_cap % 2:
        raise DatasetFormatError("$.base_degree_cap", "must be even")
    comps = []
    for ci, c in enumerate(obj.get("components", [])):
        path = "$.components[%d]" % ci
        if not isinstance(c, dict):
            raise DatasetFormatError(path, "components are objects")
        name = str(c.get("name", "component-%d" % ci))
        k_alpha = int(c.get("k_alpha", 0))
        sign = int(c.get("sign", 1))
        tangent_raw = c.get("tangent_roots", [])
        # fiber generators: explicit, else inferred from table keys and
        # tangent root expressions (degree 2)
        if "fiber_generators" in c:
            fiber_gens = _gen_list(c["fiber_generators"], path + ".fiber_generators")
        else:
            seen: list[str] = []
            base_names = {n for n, _ in base_gens}
            for key in (c.get("integration_table") or {}):
                for factor in str(key).replace(" ", "").split("*"):
                    nm = factor.partition("^")[0]
                    if nm and nm != "1" and nm not in base_names and nm not in seen:
                        seen.append(nm)
            for expr in tangent_raw:
                for term in str(expr).replace("-", "+").replace(" ", "").split("+"):
                    nm = term.partition("*")[2] or term
                    if nm and not nm.replace("/", "").isdigit() and nm not in base_names \
                            and nm not in seen:
                        seen.append(nm)
            fiber_gens = tuple((nm, 2) for nm in seen)
        gens = fiber_gens + base_gens
        cap = 2 * k_alpha + base_cap
        tangent_roots = tuple(parse_root_expr(r, gens, cap, "%s.tangent_roots[%d]" % (path, j))
                              for j, r in enumerate(tangent_raw))
        tangent = RootBundle(Fraction(0), len(tangent_roots), tangent_roots) \
            if tangent_roots else None
        normals = _parse_bundles(c.get("normals", []), gens, cap, path + ".normals")
        vbundles = _parse_bundles(c.get("v", []), gens, cap, path + ".v")
        fiber_names = [n for n, _ in fiber_gens]
        entries = {}
        for key, val in (c.get("integration_table") or {}).items():
            kpath = "%s.integration_table[%r]" % (path, key)
            entries[parse_monomial(str(key), fiber_names, kpath)] = \
                parse_rational(val, kpath)
        table = IntegrationTable(fiber_names, k_alpha, entries)
        comps.append(FixedComponent(name, k_alpha, tangent, normals, vbundles,
                                    table, sign, gens, cap))
    v_half_rank = obj.get("v_half_rank")
    declared = obj.get("declared_anomaly")
    return ActionData(k, tuple(comps), base_gens, base_cap,
                      None if v_half_rank is None else int(v_half_rank),
                      None if declared is None else int(declared),
                      str(obj.get("name", "")))


def load_dataset(path: str) -> ActionData:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise DatasetFormatError("line %d column %d" % (e.lineno, e.colno), e.msg)
    return parse_dataset(obj)


def dataset_to_json(data: ActionData) -> dict:
    out: dict = {"format": FORMAT_VERSION, "fiber_half_dim": data.fiber_half_dim}
    if data.name:
        out["name"] = data.name
    if data.base_gens:
        out["base_generators"] = [{"name": n, "degree": d} for n, d in data.base_gens]
    if data.base_cap:
        out["base_degree_cap"] = data.base_cap
    if data.v_half_rank is not None:
        out["v_half_rank"] = data.v_half_rank
    if data.declared_anomaly is not None:
        out["declared_anomaly"] = data.declared_anomaly
    comps = []
    for c in data.components:
        fiber_names = list(c.table.fiber_gens)
        item = {
            "name": c.name,
            "k_alpha": c.k_alpha,
            "sign": c.sign,
            "tangent_roots": [format_root(r) for r in (c.tangent.roots if c.tangent else ())],
            "normals": [{"weight": format_rational(b.weight), "rank": b.rank,
                         "roots": [format_root(r) for r in b.roots]} for b in c.normals],
            "integration_table": {format_monomial(kk, fiber_names): format_rational(v)
                                  for kk, v in sorted(c.table.entries.items())},
        }
        if fiber_names:
            fg = {n: d for n, d in c.gens}
            item["fiber_generators"] = [{"name": n, "degree": fg[n]} for n in fiber_names]
        if c.vbundles:
            item["v"] = [{"weight": format_rational(b.weight), "rank": b.rank,
                          "roots": [format_root(r) for r in b.roots]} for b in c.vbundles]
        comps.append(item)
    out["components"] = comps
    return out
