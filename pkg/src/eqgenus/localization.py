"""Fixed-point data model and the localization engine.

An ``ActionData`` describes a fiberwise circle action through its fixed
components: rotation weights and Chern roots of the normal summands, the
tangent data of each component, fiber integration tables, and optional
twist-bundle (V) data.  ``equivariant_character`` sums the pushed-forward
theta-quotient integrands over the components and returns the resulting
equivariant index character as an exact q-series of base classes;
verdict helpers classify rigidity, pole cancellation and vanishing.
"""
from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    DegreeOutOfRange,
    GradedElement,
    IntegrationTable,
    QSeries,
    WLaurentRational,
    fiber_integrate,
)
from .genera import (
    OperatorKind,
    RootBundle,
    bridge_to_index_character,
    numeric_integrand,
    theta_quotient_integrand,
)
from .theta import ConstantsLedger, NonconvergentDomain


class ValidationError(Exception):
    pass


class InconsistentAnomaly(Exception):
    """Components disagree on the anomaly integer."""


class NearPole(Exception):
    """Numeric evaluation requested too close to a character pole."""


@dataclass(frozen=True)
class FixedComponent:
    """One connected component of the fixed submanifold.

    ``gens`` lists the component's fiber generators followed by the shared
    base generators; ``cap`` = 2*k_alpha + base degree cap.  Isolated
    points are the degenerate case k_alpha = 0 with empty tangent data and
    an empty integration table.
    """

    name: str
    k_alpha: int
    tangent: RootBundle | None
    normals: tuple[RootBundle, ...]
    vbundles: tuple[RootBundle, ...]
    table: IntegrationTable
    sign: int
    gens: tuple[tuple[str, int], ...]
    cap: int

    def bridge_rank(self) -> int:
        """k = k_alpha + sum of normal ranks; must equal the global k."""
        return (self.tangent.rank if self.tangent else 0) + sum(b.rank for b in self.normals)

    def v_rank(self) -> int:
        return sum(b.rank for b in self.vbundles)


@dataclass(frozen=True)
class ActionData:
    """Fixed-point description of a fiberwise circle action."""

    fiber_half_dim: int
    components: tuple[FixedComponent, ...]
    base_gens: tuple[tuple[str, int], ...] = ()
    base_cap: int = 0
    v_half_rank: int | None = None
    declared_anomaly: int | None = None
    name: str = ""

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.fiber_half_dim, self.base_gens, self.base_cap,
                       self.v_half_rank, self.declared_anomaly)).encode())
        for c in self.components:
            h.update(repr((c.name, c.k_alpha, c.sign, c.cap, c.gens)).encode())
            for bundles in (([c.tangent] if c.tangent else []), c.normals, c.vbundles):
                for b in bundles:
                    h.update(repr((str(b.weight), b.rank,
                                   [sorted((e, str(v)) for e, v in r.terms.items()) for r in b.roots])).encode())
            h.update(repr(sorted((k, str(v)) for k, v in c.table.entries.items())).encode())
        return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# validation and the anomaly


def _root_sum(bundles, weighted: bool, square: bool, gens, cap) -> GradedElement:
    out = GradedElement.zero(gens, cap)
    for b in bundles:
        for r in b.roots:
            term = r * r if square else r
            if weighted:
                term = term * b.weight
            out = out + term
    return out


@dataclass
class ValidationReport:
    ok: bool
    errors: list[str]
    warnings: list[str]
    anomaly: Fraction | None
    anomaly_tx: Fraction | None
    witten_h_applicable: bool
    notes: list[str]

    def __str__(self) -> str:
        lines = ["valid" if self.ok else "INVALID"]
        lines += ["error: " + e for e in self.errors]
        lines += ["warning: " + w for w in self.warnings]
        if self.anomaly is not None:
            lines.append("anomaly n = %s" % self.anomaly)
        if self.anomaly_tx is not None:
            lines.append("tangent anomaly sum m^2 d = %s (loop-space condition %s)"
                         % (self.anomaly_tx, "holds" if self.witten_h_applicable else "fails"))
        lines += ["note: " + n for n in self.notes]
        return "\n".join(lines)


def validate(data: ActionData) -> ValidationReport:
    """Rank bookkeeping, weight sanity, and the anomaly consistency checks."""
    errors: list[str] = []
    warnings: list[str] = []
    notes: list[str] = []
    k = data.fiber_half_dim

    if not data.components:
        errors.append("no fixed components")

    per_comp_n: list[Fraction] = []
    per_comp_tx: list[Fraction] = []
    h_ok = True
    for c in data.components:
        label = "component %r" % c.name
        if c.bridge_rank() != k:
            errors.append("%s: k_alpha + sum of normal ranks = %d != fiber half-dimension %d"
                          % (label, c.bridge_rank(), k))
        if c.tangent is not None and c.tangent.weight != 0:
            errors.append("%s: tangent part must carry weight 0" % label)
        if c.tangent is not None and c.tangent.rank != c.k_alpha:
            errors.append("%s: tangent rank %d != k_alpha %d" % (label, c.tangent.rank, c.k_alpha))
        if c.sign not in (1, -1):
            errors.append("%s: orientation sign must be +-1" % label)
        for b in c.normals:
            if b.weight == 0:
                errors.append("%s: ZeroWeightNormalBundle (normal summand with weight 0)" % label)
        spin_sum = sum((b.weight * b.rank for b in c.normals), Fraction(0))
        if spin_sum.denominator != 1:
            warnings.append("%s: sum of m*d(m) = %s is not an integer; "
                            "theta-denominator kinds will leave the w-grid"
                            % (label, spin_sum))
        if c.k_alpha > 0:
            fiber_degrees = [d for (n, d) in c.gens if n in c.table.fiber_gens]
            names = list(c.table.fiber_gens)
            tops = _top_monomials(names, fiber_degrees, 2 * c.k_alpha)
            for mono in tops:
                if mono not in c.table.entries:
                    errors.append("%s: integration table misses top monomial %r" % (label, mono))
            # orientation heuristic for projective-type tables: the top
            # product of the tangent roots should pair positively with the
            # declared sign (the root classes fix the orientation, the list
            # order does not)
            if c.tangent is not None and c.tangent.roots and not errors:
                top = GradedElement.scalar(c.gens, c.cap, Fraction(1))
                for r in c.tangent.roots:
                    top = top * r
                try:
                    paired = fiber_integrate(top, c.table).scalar_part()
                except Exception:
                    paired = None
                if paired is not None and paired != 0:
                    val = paired if isinstance(paired, Fraction) else None
                    if val is not None and (val < 0) != (c.sign < 0):
                        warnings.append("%s: orientation sign %+d disagrees with the "
                                        "pairing of the top tangent-root product (%s)"
                                        % (label, c.sign, val))
        # anomaly sums
        tx_sq = sum((b.weight ** 2 * b.rank for b in c.normals), Fraction(0))
        per_comp_tx.append(tx_sq)
        if data.v_half_rank is not None or c.vbundles:
            l = c.v_rank()
            if data.v_half_rank is not None and l != data.v_half_rank:
                errors.append("%s: V rank %d != declared v_half_rank %s"
                              % (label, l, data.v_half_rank))
            v_sq = sum((b.weight ** 2 * b.rank for b in c.vbundles), Fraction(0))
            per_comp_n.append(v_sq - tx_sq)
            lhs = _root_sum(c.vbundles, True, False, c.gens, c.cap)
            rhs = _root_sum(c.normals, True, False, c.gens, c.cap)
            if lhs != rhs:
                errors.append("%s: sum n_v u_v != sum m_gamma x_gamma" % label)
            lhs2 = _root_sum(c.vbundles, False, True, c.gens, c.cap)
            rhs2 = _root_sum(c.normals, False, True, c.gens, c.cap) + \
                _root_sum([c.tangent] if c.tangent else [], False, True, c.gens, c.cap)
            if lhs2 != rhs2:
                errors.append("%s: sum u_v^2 != sum y^2 + sum x^2" % label)
        # loop-space condition p1(TX) restricted to the component
        if _root_sum(c.normals, True, False, c.gens, c.cap):
            h_ok = False
        if _root_sum(c.normals, False, True, c.gens, c.cap) + \
           _root_sum([c.tangent] if c.tangent else [], False, True, c.gens, c.cap):
            h_ok = False

    v_ranks = {c.v_rank() for c in data.components if c.vbundles}
    if len(v_ranks) > 1:
        errors.append("components disagree on the V rank: %s" % sorted(v_ranks))
    if v_ranks and any(not c.vbundles for c in data.components):
        errors.append("V data present on some components but not all")

    anomaly = None
    if per_comp_n:
        if len(set(per_comp_n)) > 1:
            errors.append("anomaly differs across components: %s"
                          % sorted(set(str(x) for x in per_comp_n)))
        else:
            anomaly = per_comp_n[0]
            if anomaly.denominator != 1:
                warnings.append("anomaly %s is not an integer" % anomaly)
            if data.declared_anomaly is not None and anomaly != data.declared_anomaly:
                errors.append("declared anomaly %d != computed %s"
                              % (data.declared_anomaly, anomaly))
    anomaly_tx = None
    if per_comp_tx and len(set(per_comp_tx)) == 1:
        anomaly_tx = per_comp_tx[0]
    elif per_comp_tx:
        h_ok = False
        notes.append("sum m^2 d(m) differs across components; the loop-space "
                     "vanishing hypothesis cannot hold")
    if anomaly_tx is not None:
        notes.append("sign conventions: the computed nonnegative integer fits "
                     "p1(TX)_{S^1} = +n u^2 with n = %s; the mirror convention "
                     "p1(TX)_{S^1} = -n u^2 appears with n negated" % anomaly_tx)

    return ValidationReport(not errors, errors, warnings, anomaly, anomaly_tx,
                            h_ok and anomaly_tx is not None, notes)


def _top_monomials(names, degrees, target):
    """All exponent tuples over (names, degrees) with total degree = target."""
    if not names:
        return [()] if target == 0 else []
    out = []

    def rec(i, left, acc):
        if i == len(names):
            if left == 0:
                out.append(tuple(acc))
            return
        d = degrees[i]
        for e in range(0, left // d + 1):
            rec(i + 1, left - e * d, acc + [e])

    rec(0, target, [])
    return out


def anomaly_index(data: ActionData) -> int:
    """The common anomaly integer n; per component this is
    sum n_v^2 d(n_v) - sum m_gamma^2 d(m_gamma), or just the tangent sum
    when no V data is present."""
    rep = validate(data)
    if rep.errors:
        raise ValidationError("; ".join(rep.errors))
    if rep.anomaly is not None:
        n = rep.anomaly
    elif rep.anomaly_tx is not None:
        n = rep.anomaly_tx
    else:
        raise InconsistentAnomaly("components disagree on sum m^2 d(m)")
    if n.denominator != 1:
        raise InconsistentAnomaly("anomaly %s is not an integer" % n)
    return int(n)


# ---------------------------------------------------------------------------
# the engine


@dataclass(frozen=True)
class GenusResult:
    """Localized equivariant character: q-series of base-graded classes."""

    series: QSeries
    kind: OperatorKind
    normalized: bool
    n8: int
    base_gens: tuple[tuple[str, int], ...]
    base_cap: int
    bridge_k: int
    v_rank: int
    ledger: ConstantsLedger
    provenance: str

    def monomials(self) -> list[tuple[int, ...]]:
        out = set()
        for g in self.series.c.values():
            out.update(g.terms.keys())
        if not out:
            out.add((0,) * len(self.base_gens))
        return sorted(out)

    def monomial_name(self, exps: tuple[int, ...]) -> str:
        parts = [("%s" % n if e == 1 else "%s^%d" % (n, e))
                 for (n, _), e in zip(self.base_gens, exps) if e]
        return "*".join(parts) if parts else "1"

    def coefficient(self, n8key: int, exps: tuple[int, ...] | None = None) -> WLaurentRational:
        g = self.series.c.get(n8key)
        if n8key > self.series.n8:
            raise DegreeOutOfRange("q^{%d/8} beyond truncation" % n8key)
        if g is None:
            return WLaurentRational.zero()
        exps = exps if exps is not None else (0,) * len(self.base_gens)
        v = g.terms.get(tuple(exps), WLaurentRational.zero())
        return v if isinstance(v, WLaurentRational) else WLaurentRational.const(v)

    def index_character(self) -> QSeries:
        """The Chern character of the index bundle (ledger constants and
        correspondence prefactors applied)."""
        return bridge_to_index_character(self.kind, self.normalized,
                                         self.bridge_k, self.v_rank, self.series)

    def degree_component(self, p2: int) -> dict[str, QSeries]:
        return degree_component(self, p2)


def component_contribution(data: ActionData, comp: FixedComponent,
                           kind: OperatorKind, n8: int, normalized: bool = False) -> QSeries:
    """Sign times the fiber-integrated integrand of one component, as a
    series of graded elements over the shared base generators."""
    integ = theta_quotient_integrand(kind, comp, n8, normalized)
    pushed = integ.map_coefficients(lambda g: fiber_integrate(g, comp.table))
    if comp.sign < 0:
        pushed = -pushed
    return pushed


def equivariant_character(data: ActionData, kind: OperatorKind, n8: int,
                          normalized: bool = False) -> GenusResult:
    """Sum of pushed-forward integrands over the fixed components."""
    rep = validate(data)
    if rep.errors:
        raise ValidationError("; ".join(rep.errors))
    if kind.needs_v and any(not c.vbundles for c in data.components):
        raise ValidationError("%s requires V data on every component" % kind.value)
    total: QSeries | None = None
    for comp in data.components:
        pushed = component_contribution(data, comp, kind, n8, normalized)
        total = pushed if total is None else total + pushed
    assert total is not None
    l = data.components[0].v_rank() if kind.needs_v else 0
    if kind is OperatorKind.DeltaVThetaPrime and normalized:
        ledger = ConstantsLedger(two=l)
    elif kind is OperatorKind.DVStarDifference:
        ledger = ConstantsLedger(i=2 * l)
    else:
        ledger = ConstantsLedger()
    return GenusResult(total, kind, normalized, total.n8, data.base_gens,
                       data.base_cap, data.fiber_half_dim, l, ledger, data.digest())


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class RigidityVerdict:
    rigid: bool
    constants: dict[tuple[int, str], Fraction] | None
    witness: tuple | None

    def __str__(self):
        if self.rigid:
            nonzero = {k: v for k, v in self.constants.items() if v}
            return "rigid; %d nonzero constants" % len(nonzero)
        key, mono, coeff = self.witness
        return "NOT rigid: q^{%d/8} coefficient of %s is %s" % (key, mono, coeff)


def rigidity_check(result: GenusResult) -> RigidityVerdict:
    """Rigid iff every (q-exponent, base monomial) coefficient is w-free."""
    constants: dict[tuple[int, str], Fraction] = {}
    for key in sorted(result.series.c):
        g = result.series.c[key]
        for exps, v in sorted(g.terms.items()):
            coeff = v if isinstance(v, WLaurentRational) else WLaurentRational.const(v)
            mono = result.monomial_name(exps)
            if not coeff.is_constant():
                return RigidityVerdict(False, None, (key, mono, coeff))
            constants[(key, mono)] = coeff.constant()
    return RigidityVerdict(True, constants, None)


@dataclass(frozen=True)
class PoleReport:
    per_q: dict[int, tuple[int, int]]  # key -> (max denominator degree before, after)
    cancelled: bool
    summed: QSeries


def _den_degree_of(coeff) -> int:
    if isinstance(coeff, GradedElement):
        return max((_den_degree_of(v) for v in coeff.terms.values()), default=0)
    if isinstance(coeff, WLaurentRational):
        return coeff.den_degree()
    return 0


def pole_cancellation_check(component_series: list[QSeries]) -> PoleReport:
    """Reduced denominators of individual contributions versus their sum.

    Individual fixed components have poles at roots of unity; for rigid
    kinds the summed coefficients must reduce to denominator 1."""
    if not component_series:
        raise ValueError("no component series given")
    total = component_series[0]
    for s in component_series[1:]:
        total = total + s
    per_q: dict[int, tuple[int, int]] = {}
    keys = set()
    for s in component_series:
        keys.update(s.c)
    keys.update(total.c)
    for key in sorted(keys):
        if key > total.n8:
            continue
        before = max((_den_degree_of(s.c.get(key, 0)) for s in component_series), default=0)
        after = _den_degree_of(total.c.get(key, 0))
        per_q[key] = (before, after)
    cancelled = all(after == 0 for _, after in per_q.values())
    return PoleReport(per_q, cancelled, total)


def degree_component(result: GenusResult, p2: int) -> dict[str, QSeries]:
    """The degree-2p part, one scalar q-series per base monomial."""
    if p2 < 0 or p2 % 2 or p2 > result.base_cap:
        raise DegreeOutOfRange("degree %d outside [0, %d] or odd" % (p2, result.base_cap))
    degrees = tuple(d for _, d in result.base_gens)
    out: dict[str, QSeries] = {}
    for key, g in result.series.c.items():
        for exps, v in g.terms.items():
            if sum(e * d for e, d in zip(exps, degrees)) != p2:
                continue
            mono = result.monomial_name(exps)
            coeff = v if isinstance(v, WLaurentRational) else WLaurentRational.const(v)
            ser = out.setdefault(mono, QSeries({}, result.series.n8))
            ser.c[key] = coeff
    return out


# ---------------------------------------------------------------------------
# numeric path


def evaluate_numeric(data: ActionData, kind: OperatorKind, t, tau,
                     eps: float = 1e-10, normalized: bool = False) -> dict[str, complex]:
    """Direct numeric evaluation per base monomial, certified to eps.

    Raises NearPole when t sits within 1e-6 of a character pole of some
    component denominator, and NonconvergentDomain off the upper half
    plane."""
    t = complex(t)
    tau = complex(tau)
    if tau.imag <= 0:
        raise NonconvergentDomain("Im tau must be positive")
    w = cmath.exp(1j * math.pi * t)
    for comp in data.components:
        for b in comp.normals:
            # theta denominators vanish where the character w^{2m} returns to 1;
            # |w^{2m} - 1| ~ pi |2m| |t - pole| near a pole, tolerance 1e-6 in t
            if abs(w ** b.tw - 1) < math.pi * abs(b.tw) * 1e-6:
                raise NearPole("t=%s is within tolerance of a pole of weight %s"
                               % (t, b.weight))
    totals: dict[tuple[int, ...], complex] = {}
    names: dict[tuple[int, ...], str] = {}
    degrees = tuple(d for _, d in data.base_gens)
    for comp in data.components:
        jet = numeric_integrand(kind, comp, t, tau, eps, normalized)
        pushed = fiber_integrate(jet, comp.table)
        for exps, v in pushed.terms.items():
            val = complex(v) * comp.sign
            totals[exps] = totals.get(exps, 0j) + val
    zero = (0,) * len(data.base_gens)
    totals.setdefault(zero, 0j)
    out: dict[str, complex] = {}
    for exps, v in totals.items():
        parts = [("%s" % n if e == 1 else "%s^%d" % (n, e))
                 for (n, _), e in zip(data.base_gens, exps) if e]
        out["*".join(parts) if parts else "1"] = v
    return out


def degree_component_function(data: ActionData, kind: OperatorKind, p2: int,
                              monomial: str | None = None, normalized: bool = False,
                              eps: float = 1e-10):
    """Numeric callable F(t, tau) for one degree-2p base monomial of the
    localized character; the input for the Jacobi-form checkers."""
    degrees = {n: d for n, d in data.base_gens}
    if p2 < 0 or p2 > data.base_cap:
        raise DegreeOutOfRange("degree %d outside the base cap %d" % (p2, data.base_cap))
    if monomial is None:
        if p2 == 0:
            monomial = "1"
        else:
            cands = _top_monomials([n for n, _ in data.base_gens],
                                   [d for _, d in data.base_gens], p2)
            if not cands:
                raise DegreeOutOfRange("no base monomial of degree %d" % p2)
            exps = cands[0]
            parts = [("%s" % n if e == 1 else "%s^%d" % (n, e))
                     for (n, _), e in zip(data.base_gens, exps) if e]
            monomial = "*".join(parts)

    def f(t: complex, tau: complex) -> complex:
        vals = evaluate_numeric(data, kind, t, tau, eps, normalized)
        return vals.get(monomial, 0j)

    f.monomial = monomial
    return f
