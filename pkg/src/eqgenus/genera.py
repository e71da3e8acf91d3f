"""Characteristic-class integrands for the elliptic operator families.

Two independent realizations of each integrand are provided:

* ``theta_quotient_integrand`` -- the closed product form built from the
  factorizations of the four theta functions.  With the Chern roots
  normalized so 2 pi i is absorbed into the degree-2 generators, every
  constant of 2 pi and i cancels identically and the coefficients are
  honest rational functions of w.

* ``witten_element_ch`` plus ``a_hat`` / spinor characters -- the
  exterior/symmetric-power expansion, assembled term by term in q.

``oracle_expand_vs_closed`` checks the two paths against each other
exactly; they are each other's oracle.

Conventions: a complex line of rotation weight m with root x contributes
the equivariant element E = w^{2m} e^x, w = e^{pi i t}.  Tangent bundles
enter through their complexification (pairs E, E^{-1}); "dim" in the
normalized elements means the real rank.  Half-unit factors E^{1/2} are
tracked separately ("strays") and must recombine into integer w-powers,
which is exactly the spin consistency of the data.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import factorial

from .algebra import (
    GradedElement,
    OffGridExponent,
    QSeries,
    WLaurentRational,
    graded_exp,
    graded_invert,
    series_invert,
    series_mul,
)
from .theta import NonconvergentDomain


class ZeroWeightNormalBundle(Exception):
    """A normal summand with rotation weight zero contradicts fixedness."""


class OperatorKind(Enum):
    DsThetaPrime = "ds-theta-prime"
    DThetaQ = "d-theta-q"
    DThetaMinusQ = "d-theta-minus-q"
    DeltaVThetaPrime = "delta-v-theta-prime"
    DVThetaQ = "dv-theta-q"
    DVThetaMinusQ = "dv-theta-minus-q"
    DVStarDifference = "dv-star-difference"
    WittenH = "witten-h"

    @property
    def needs_v(self) -> bool:
        return self in (OperatorKind.DeltaVThetaPrime, OperatorKind.DVThetaQ,
                        OperatorKind.DVThetaMinusQ, OperatorKind.DVStarDifference)

    @property
    def supports_normalized(self) -> bool:
        return self.needs_v or self is OperatorKind.WittenH


NON_V_KINDS = (OperatorKind.DsThetaPrime, OperatorKind.DThetaQ, OperatorKind.DThetaMinusQ)
V_KINDS = (OperatorKind.DeltaVThetaPrime, OperatorKind.DVThetaQ,
           OperatorKind.DVThetaMinusQ, OperatorKind.DVStarDifference)


@dataclass(frozen=True)
class RootBundle:
    """An equivariant complex summand: rotation weight, rank, Chern roots."""

    weight: Fraction
    rank: int
    roots: tuple[GradedElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))
        if len(self.roots) != self.rank:
            raise ValueError("rank %d but %d roots" % (self.rank, len(self.roots)))
        if 2 * self.weight != int(2 * self.weight):
            raise ValueError("weights must be integers or half-integers")

    @property
    def tw(self) -> int:
        """Twice the weight; the w-exponent of the character z^weight."""
        return int(2 * self.weight)


# ---------------------------------------------------------------------------
# small exact builders


def _one(gens, cap) -> GradedElement:
    return GradedElement.scalar(gens, cap, Fraction(1))


def _exp(x: GradedElement, num=1, den=1) -> GradedElement:
    return graded_exp(x * Fraction(num, den))


def _line(tw: int, x: GradedElement) -> GradedElement:
    """E = w^{tw} e^x as a graded element with w-rational coefficients."""
    e = graded_exp(x)
    return e * WLaurentRational.w(tw) if tw else e


def _sigma(y: GradedElement) -> GradedElement:
    """sinh(y/2)/(y/2) truncated: the unit dividing theta's order-1 zero."""
    out = y.one_like()
    p = y.one_like()
    for j in range(1, y.cap // 4 + 1):
        p = p * y * y
        if not p:
            break
        out = out + p * Fraction(1, 4 ** j * factorial(2 * j + 1))
    return out


def _pair_product(E: GradedElement, Einv: GradedElement, n8: int,
                  sign: int, half: bool) -> QSeries:
    """prod_{n>=1} (1 + sign q^{a_n} E)(1 + sign q^{a_n} E^{-1}),
    a_n = n (half=False) or n - 1/2 (half=True), as eighth-grid keys."""
    one = E.one_like()
    acc = QSeries({0: one}, n8)
    n = 1
    while True:
        key = 8 * n - (4 if half else 0)
        if key > n8:
            break
        sE = E * Fraction(sign)
        sEi = Einv * Fraction(sign)
        acc = series_mul(acc, QSeries({0: one, key: sE}, n8))
        acc = series_mul(acc, QSeries({0: one, key: sEi}, n8))
        n += 1
    return acc


def _scalar_series(n8: int, factors: list[tuple[int, Fraction]]) -> QSeries:
    """prod (1 + c q^{key/8}) over (key, c) pairs, rational coefficients."""
    acc = QSeries({0: Fraction(1)}, n8)
    for key, cval in factors:
        if key <= n8:
            acc = series_mul(acc, QSeries({0: Fraction(1), key: cval}, n8))
    return acc


def _cq_series(n8: int, power: int = 1) -> QSeries:
    """c(q)^power = prod (1 - q^n)^power for power >= 1."""
    acc = QSeries({0: Fraction(1)}, n8)
    n = 1
    while 8 * n <= n8:
        f = QSeries({0: Fraction(1), 8 * n: Fraction(-1)}, n8)
        for _ in range(power):
            acc = series_mul(acc, f)
        n += 1
    return acc


def _nullwert_series(token: str, n8: int) -> QSeries:
    """theta nullwert unit parts: prod(1+q^n)^2, prod(1 -+ q^{n-1/2})^2."""
    acc = QSeries({0: Fraction(1)}, n8)
    n = 1
    while True:
        if token == "null-plus-int":
            key, c = 8 * n, Fraction(1)
        elif token == "null-minus-half":
            key, c = 8 * n - 4, Fraction(-1)
        elif token == "null-plus-half":
            key, c = 8 * n - 4, Fraction(1)
        else:
            raise ValueError(token)
        if key > n8:
            break
        f = QSeries({0: Fraction(1), key: c}, n8)
        acc = series_mul(acc, series_mul(f, f))
        n += 1
    return acc


# ---------------------------------------------------------------------------
# the closed theta-quotient path


@dataclass(frozen=True)
class _Recipe:
    """Per-root factor tokens for one operator family.

    Tokens: "pairs+/-" are the integer-grid pair products, "half+/-" the
    half-grid ones, "lin+/-" the factors (1 +- E^{-1}), "cosh" the unit
    e^{y/2} + e^{-y/2}, "sigma" the order-1 unit of theta at v = 0.
    Strays count powers of E^{1/2}; c_* count powers of c(q); q8_* count
    powers of q^{1/8}.
    """

    tangent_num: tuple[str, ...] = ()
    tangent_den: tuple[str, ...] = ()
    normal_num: tuple[str, ...] = ()
    normal_den: tuple[str, ...] = ()
    v_num: tuple[str, ...] = ()
    v_den: tuple[str, ...] = ()
    v_scalar_den: tuple[str, ...] = ()
    stray_normal: int = 0
    stray_v: int = 0
    c_tangent: int = 0
    c_normal: int = 0
    c_v: int = 0
    q8_tangent: int = 0
    q8_normal: int = 0
    q8_v: int = 0
    half_per_v: bool = False


_H_ROWS = dict(tangent_den=("sigma", "pairs-"), c_tangent=2,
               normal_den=("lin-", "pairs-"), stray_normal=-1, c_normal=2)

_RAW: dict[OperatorKind, _Recipe] = {
    OperatorKind.DsThetaPrime: _Recipe(
        tangent_num=("cosh", "pairs+"), tangent_den=("sigma", "pairs-"),
        normal_num=("lin+", "pairs+"), normal_den=("lin-", "pairs-")),
    OperatorKind.DThetaQ: _Recipe(
        tangent_num=("half-",), tangent_den=("sigma", "pairs-"), q8_tangent=-1,
        normal_num=("half-",), normal_den=("lin-", "pairs-"),
        stray_normal=-1, q8_normal=-1),
    OperatorKind.DThetaMinusQ: _Recipe(
        tangent_num=("half+",), tangent_den=("sigma", "pairs-"), q8_tangent=-1,
        normal_num=("half+",), normal_den=("lin-", "pairs-"),
        stray_normal=-1, q8_normal=-1),
    OperatorKind.DeltaVThetaPrime: _Recipe(
        tangent_den=("sigma", "pairs-"), c_tangent=-1, q8_tangent=-1,
        normal_den=("lin-", "pairs-"), stray_normal=-1, c_normal=-1, q8_normal=-1,
        v_num=("lin+", "pairs+"), stray_v=1, c_v=1, q8_v=1),
    OperatorKind.DVThetaQ: _Recipe(
        tangent_den=("sigma", "pairs-"), c_tangent=-1, q8_tangent=-1,
        normal_den=("lin-", "pairs-"), stray_normal=-1, c_normal=-1, q8_normal=-1,
        v_num=("half-",), c_v=1),
    OperatorKind.DVThetaMinusQ: _Recipe(
        tangent_den=("sigma", "pairs-"), c_tangent=-1, q8_tangent=-1,
        normal_den=("lin-", "pairs-"), stray_normal=-1, c_normal=-1, q8_normal=-1,
        v_num=("half+",), c_v=1),
    OperatorKind.DVStarDifference: _Recipe(
        tangent_den=("sigma", "pairs-"), c_tangent=-1, q8_tangent=-1,
        normal_den=("lin-", "pairs-"), stray_normal=-1, c_normal=-1, q8_normal=-1,
        v_num=("lin-", "pairs-"), stray_v=1, c_v=1, q8_v=1),
    OperatorKind.WittenH: _Recipe(**_H_ROWS),
}

_VNORM: dict[OperatorKind, _Recipe] = {
    OperatorKind.DeltaVThetaPrime: _Recipe(
        **_H_ROWS, v_num=("lin+", "pairs+"), stray_v=1,
        v_scalar_den=("null-plus-int",), half_per_v=True),
    OperatorKind.DVThetaQ: _Recipe(
        **_H_ROWS, v_num=("half-",), v_scalar_den=("null-minus-half",)),
    OperatorKind.DVThetaMinusQ: _Recipe(
        **_H_ROWS, v_num=("half+",), v_scalar_den=("null-plus-half",)),
    OperatorKind.DVStarDifference: _Recipe(
        **_H_ROWS, v_num=("lin-", "pairs-"), stray_v=1, c_v=-2),
    OperatorKind.WittenH: _Recipe(**_H_ROWS),
}


def _recipe(kind: OperatorKind, normalized: bool) -> _Recipe:
    if kind is OperatorKind.WittenH:
        return _RAW[kind]
    if normalized:
        if not kind.supports_normalized:
            raise ValueError("%s has no dim-normalized variant" % kind.value)
        return _VNORM[kind]
    return _RAW[kind]


def _token_series(token: str, tw: int, x: GradedElement, n8: int) -> QSeries:
    one = x.one_like()
    if token == "pairs+":
        return _pair_product(_line(tw, x), _line(-tw, -x), n8, 1, False)
    if token == "pairs-":
        return _pair_product(_line(tw, x), _line(-tw, -x), n8, -1, False)
    if token == "half+":
        return _pair_product(_line(tw, x), _line(-tw, -x), n8, 1, True)
    if token == "half-":
        return _pair_product(_line(tw, x), _line(-tw, -x), n8, -1, True)
    if token == "lin+":
        return QSeries({0: one + _line(-tw, -x)}, n8)
    if token == "lin-":
        return QSeries({0: one - _line(-tw, -x)}, n8)
    if token == "cosh":
        return QSeries({0: _exp(x, 1, 2) + _exp(x, -1, 2)}, n8)
    if token == "sigma":
        return QSeries({0: _sigma(x)}, n8)
    raise ValueError(token)


def _iter_lines(bundles) -> list[tuple[int, GradedElement]]:
    out = []
    for b in bundles:
        for r in b.roots:
            out.append((b.tw, r))
    return out


def _fold_strays(series: QSeries, stray_w: Fraction, stray_cls: GradedElement) -> QSeries:
    if stray_w == 0 and not stray_cls:
        return series
    if stray_w.denominator != 1:
        raise OffGridExponent(
            "total half-character w^%s is off the integer grid; "
            "the weight data is not spin-consistent" % stray_w)
    mult = graded_exp(stray_cls * Fraction(1, 2))
    if stray_w:
        mult = mult * WLaurentRational.w(int(stray_w))
    return series.scale(mult)


def theta_quotient_integrand(kind: OperatorKind, component, n8: int,
                             normalized: bool = False) -> QSeries:
    """The bracketed localization integrand for one fixed component.

    Returns a q-series of graded elements with w-rational coefficients,
    exact on the requested grid.  The removable singularity of the tangent
    factor is resolved by dividing out theta's explicit order-1 unit; all
    powers of 2 pi and i cancel by construction.
    """
    rec = _recipe(kind, normalized)
    tangent = component.tangent
    if tangent is not None and tangent.rank and tangent.weight != 0:
        raise ValueError("tangent part must have weight 0")
    for nb in component.normals:
        if nb.weight == 0:
            raise ZeroWeightNormalBundle(
                "normal summand with weight 0 in component %r" % getattr(component, "name", "?"))
    if kind.needs_v and not component.vbundles:
        raise ValueError("%s requires V-bundle data" % kind.value)

    t_lines = _iter_lines([tangent] if tangent is not None else [])
    n_lines = _iter_lines(component.normals)
    v_lines = _iter_lines(component.vbundles) if kind.needs_v else []

    gens, cap = component.gens, component.cap
    q8_shift = (rec.q8_tangent * len(t_lines) + rec.q8_normal * len(n_lines)
                + rec.q8_v * len(v_lines))
    c_power = (rec.c_tangent * len(t_lines) + rec.c_normal * len(n_lines)
               + rec.c_v * len(v_lines))
    n8w = n8 - q8_shift  # work high enough that the shifted result reaches n8

    one = _one(gens, cap)
    num = QSeries({0: one}, n8w)
    den = QSeries({0: one}, n8w)
    stray_w = Fraction(0)
    stray_cls = GradedElement.zero(gens, cap)

    for lines, num_toks, den_toks, stray in (
            (t_lines, rec.tangent_num, rec.tangent_den, 0),
            (n_lines, rec.normal_num, rec.normal_den, rec.stray_normal),
            (v_lines, rec.v_num, rec.v_den, rec.stray_v)):
        for tw, x in lines:
            for tok in num_toks:
                num = series_mul(num, _token_series(tok, tw, x, n8w))
            for tok in den_toks:
                den = series_mul(den, _token_series(tok, tw, x, n8w))
            if stray:
                stray_w += Fraction(stray * tw, 2)
                stray_cls = stray_cls + x * stray
    for tok in rec.v_scalar_den:
        for _ in v_lines:
            den = series_mul(den, _nullwert_series(tok, n8w).scale(one))
    if c_power > 0:
        num = series_mul(num, _cq_series(n8w, c_power).scale(one))
    elif c_power < 0:
        den = series_mul(den, _cq_series(n8w, -c_power).scale(one))

    out = series_mul(num, series_invert(den))
    if rec.half_per_v and v_lines:
        out = out.scale(Fraction(1, 2 ** len(v_lines)))
    out = _fold_strays(out, stray_w, stray_cls)
    return out.shift_q8(q8_shift).truncate(n8)


# ---------------------------------------------------------------------------
# the exterior/symmetric expansion path


def a_hat(tangent: RootBundle, gens=None, cap=None) -> GradedElement:
    """A-hat class of the tangent part: prod (y/2)/sinh(y/2) over roots."""
    if tangent.weight != 0:
        raise ValueError("a_hat applies to the weight-0 tangent part")
    if tangent.roots:
        gens, cap = tangent.roots[0].gens, tangent.roots[0].cap
    if gens is None:
        raise ValueError("empty bundle needs explicit gens/cap")
    out = _one(gens, cap)
    for y in tangent.roots:
        out = out * graded_invert(_sigma(y))
    return out


def chern_character(bundle: RootBundle, gens=None, cap=None,
                    g_weight_as_w_power: bool = True) -> GradedElement:
    """Equivariant Chern character: sum over roots of w^{2m} e^{x_j};
    with g_weight_as_w_power=False the group element is dropped and the
    plain Chern character remains."""
    if bundle.roots:
        gens, cap = bundle.roots[0].gens, bundle.roots[0].cap
    if gens is None:
        raise ValueError("empty bundle needs explicit gens/cap")
    out = GradedElement.zero(gens, cap)
    for x in bundle.roots:
        out = out + (_line(bundle.tw, x) if g_weight_as_w_power else graded_exp(x))
    return out


def _lambda_levels(kind: OperatorKind) -> tuple[int, int] | None:
    """(sign, grid) for the exterior-power factor; grid 0 = integer q,
    4 = half-integer.  None when the family has no Lambda factor."""
    return {
        OperatorKind.DsThetaPrime: (1, 0),
        OperatorKind.DThetaQ: (-1, 4),
        OperatorKind.DThetaMinusQ: (1, 4),
        OperatorKind.DeltaVThetaPrime: (1, 0),
        OperatorKind.DVThetaQ: (-1, 4),
        OperatorKind.DVThetaMinusQ: (1, 4),
        OperatorKind.DVStarDifference: (-1, 0),
        OperatorKind.WittenH: None,
    }[kind]


def witten_element_ch(kind: OperatorKind, tangent: RootBundle | None,
                      normals, vbundles, n8: int, normalized: bool = False,
                      gens=None, cap=None) -> QSeries:
    """Chern character of the exterior/symmetric power element, level by level.

    Uses ch Lambda_t(E) = prod (1 + t E_j) and ch S_t(E) = prod (1 - t E_j)^{-1}
    with one factor per listed root; callers model a real bundle by passing
    the bundle together with its conjugate.  The "- dim" normalization
    divides by one root- and weight-free factor per listed line.
    """
    if normalized and not kind.supports_normalized:
        raise ValueError("%s has no dim-normalized variant" % kind.value)
    tx_bundles = ([tangent] if tangent is not None else []) + list(normals)
    for b in tx_bundles:
        if b.roots:
            gens, cap = b.roots[0].gens, b.roots[0].cap
    if gens is None:
        raise ValueError("need gens/cap for empty bundle data")
    tx_lines = _iter_lines(tx_bundles)
    one = _one(gens, cap)
    acc = QSeries({0: one}, n8)
    scalar_den = QSeries({0: Fraction(1)}, n8)
    normalize_dims = normalized or kind is OperatorKind.WittenH

    lam = _lambda_levels(kind)
    if lam is not None:
        sign, grid = lam
        lam_lines = _iter_lines(vbundles) if kind.needs_v else tx_lines
        n = 1
        while True:
            key = 8 * n - grid
            if key > n8:
                break
            f = QSeries({0: Fraction(1), key: Fraction(sign)}, n8)
            for tw, x in lam_lines:
                acc = series_mul(acc, QSeries({0: one, key: _line(tw, x) * Fraction(sign)}, n8))
                if normalize_dims and kind.needs_v:
                    scalar_den = series_mul(scalar_den, f)
            n += 1

    # symmetric powers of the tangent element
    m = 1
    while 8 * m <= n8:
        key = 8 * m
        drop = QSeries({0: Fraction(1), key: Fraction(-1)}, n8)
        for tw, x in tx_lines:
            E = _line(tw, x)
            geom = QSeries({key * j: E ** j for j in range(n8 // key + 1)}, n8)
            acc = series_mul(acc, geom)
            if normalize_dims:
                acc = series_mul(acc, drop.scale(one))
        m += 1

    if normalize_dims and kind.needs_v and scalar_den.c != {0: Fraction(1)}:
        acc = series_mul(acc, series_invert(scalar_den).scale(one))
    return acc


def complexified(bundles) -> list[RootBundle]:
    """Each complex summand together with its conjugate (weight and roots
    negated): the lines of the underlying real bundle tensored with C."""
    out = []
    for b in bundles:
        out.append(b)
        out.append(RootBundle(-b.weight, b.rank, tuple(-r for r in b.roots)))
    return out


def _spinor_char(bundles, gens, cap, difference: bool = False):
    """Character of Delta(V) (or Delta+ - Delta- with the sign convention
    fixed by the cross-path oracle): stray part and on-grid unit."""
    stray_w = Fraction(0)
    stray_cls = GradedElement.zero(gens, cap)
    unit = _one(gens, cap)
    for tw, x in _iter_lines(bundles):
        stray_w -= Fraction(tw, 2)
        stray_cls = stray_cls - x
        E = _line(tw, x)
        unit = unit * ((unit.one_like() - E) if difference else (unit.one_like() + E))
    return stray_w, stray_cls, unit


def _a_hat_theta_product(normals, gens, cap):
    """prod over normal roots of 1/(E^{1/2} - E^{-1/2}) in stray/unit form."""
    stray_w = Fraction(0)
    stray_cls = GradedElement.zero(gens, cap)
    unit = _one(gens, cap)
    for tw, x in _iter_lines(normals):
        stray_w -= Fraction(tw, 2)
        stray_cls = stray_cls - x
        unit = unit * graded_invert(unit.one_like() - _line(-tw, -x))
    return stray_w, stray_cls, unit


def bridge_to_index_character(kind: OperatorKind, normalized: bool,
                              k: int, l: int, series: QSeries) -> QSeries:
    """Map the localization function to the Chern character of the index
    bundle: undo the q^{a/8} and c(q) prefactors of the correspondence and
    apply the rational ledger constants 2^l and (-1)^l."""
    n8 = series.n8
    if kind is OperatorKind.WittenH:
        return series
    if not normalized:
        if kind in (OperatorKind.DThetaQ, OperatorKind.DThetaMinusQ):
            return series.shift_q8(k)
        if kind is OperatorKind.DsThetaPrime:
            return series
        shift = {OperatorKind.DeltaVThetaPrime: k - l,
                 OperatorKind.DVThetaQ: k,
                 OperatorKind.DVThetaMinusQ: k,
                 OperatorKind.DVStarDifference: k - l}[kind]
        out = series.shift_q8(shift)
        if k != l:
            cpow = _cq_series(out.n8 + abs(k - l) * 8, abs(k - l))
            cpow = cpow.truncate(out.n8) if k > l else series_invert(cpow).truncate(out.n8)
            out = series_mul(out, cpow.scale(_one_like_series(series)))
        if kind is OperatorKind.DVStarDifference and l % 2:
            out = out.scale(Fraction(-1))
        return out
    if kind is OperatorKind.DeltaVThetaPrime:
        return series.scale(Fraction(2 ** l))
    if kind is OperatorKind.DVStarDifference and l % 2:
        return series.scale(Fraction(-1))
    return series


def _one_like_series(series: QSeries):
    for v in series.c.values():
        if isinstance(v, GradedElement):
            return v.one_like()
        return Fraction(1)
    return Fraction(1)


@dataclass(frozen=True)
class OracleReport:
    kind: OperatorKind
    normalized: bool
    equal: bool
    first_mismatch: tuple | None
    closed: QSeries
    expanded: QSeries


def oracle_expand_vs_closed(kind: OperatorKind, component, n8_small: int,
                            normalized: bool = False) -> OracleReport:
    """Exact equality check of the two integrand realizations on one
    component, compared on the index-character side."""
    if n8_small > 32:
        raise ValueError("oracle path is only run at small orders (n8 <= 32)")
    gens, cap = component.gens, component.cap
    k = (component.tangent.rank if component.tangent else 0) + \
        sum(b.rank for b in component.normals)
    l = sum(b.rank for b in component.vbundles)

    closed = theta_quotient_integrand(kind, component, n8_small, normalized)
    closed = bridge_to_index_character(kind, normalized, k, l, closed)

    tangent = component.tangent
    tx_real = complexified(([tangent] if tangent is not None else []) + list(component.normals))
    v_real = complexified(component.vbundles)
    element = witten_element_ch(kind, None, tx_real, v_real, n8_small,
                                normalized=normalized, gens=gens, cap=cap)
    ahat = a_hat(tangent, gens, cap) if tangent is not None else _one(gens, cap)
    sw, scls, unit = _a_hat_theta_product(component.normals, gens, cap)
    prefactor = ahat * unit
    if kind is OperatorKind.DsThetaPrime:
        dsw, dscls, dunit = _spinor_char([tangent] if tangent else [], gens, cap)
        nsw, nscls, nunit = _spinor_char(component.normals, gens, cap)
        prefactor = prefactor * dunit * nunit
        sw, scls = sw + dsw + nsw, scls + dscls + nscls
    elif kind is OperatorKind.DeltaVThetaPrime:
        vsw, vscls, vunit = _spinor_char(component.vbundles, gens, cap)
        prefactor = prefactor * vunit
        sw, scls = sw + vsw, scls + vscls
    elif kind is OperatorKind.DVStarDifference:
        vsw, vscls, vunit = _spinor_char(component.vbundles, gens, cap, difference=True)
        prefactor = prefactor * vunit
        sw, scls = sw + vsw, scls + vscls
    expanded = element.scale(prefactor)
    expanded = _fold_strays(expanded, sw, scls)

    n8 = min(closed.n8, expanded.n8)
    mismatch = None
    for key in sorted(set(closed.c) | set(expanded.c)):
        if key > n8:
            continue
        a = closed.c.get(key)
        b = expanded.c.get(key)
        if (a is None) != (b is None) or (a is not None and a != b):
            mismatch = (key, a, b)
            break
    return OracleReport(kind, normalized, mismatch is None, mismatch, closed, expanded)


# ---------------------------------------------------------------------------
# numeric (jet) realization of the same recipes


def _jet(x: GradedElement) -> GradedElement:
    return x.map_coefficients(complex)


def _jet_exp(x: GradedElement, scale: complex = 1.0) -> GradedElement:
    j = _jet(x) * scale
    out = j.one_like() * (1 + 0j)
    term = out
    for kk in range(1, x.cap // 2 + 1):
        term = term * j * (1.0 / kk)
        if not term:
            break
        out = out + term
    return out


def _jet_line(tw: int, x: GradedElement, w: complex) -> GradedElement:
    return _jet_exp(x) * (w ** tw)


def _jet_sigma(y: GradedElement) -> GradedElement:
    j = _jet(y)
    out = j.one_like() * (1 + 0j)
    p = out
    for jj in range(1, y.cap // 4 + 1):
        p = p * j * j
        if not p:
            break
        out = out + p * (1.0 / (4 ** jj * factorial(2 * jj + 1)))
    return out


def _jet_norm(a: GradedElement) -> float:
    return sum(abs(v) for v in a.terms.values()) or 0.0


def numeric_integrand(kind: OperatorKind, component, t: complex, tau: complex,
                      eps: float, normalized: bool = False) -> GradedElement:
    """Evaluate the theta-quotient integrand at numeric (t, tau) as a jet:
    a graded element with complex coefficients over the component's
    generators.  Same recipes as the formal path."""
    rec = _recipe(kind, normalized)
    if kind.needs_v and not component.vbundles:
        raise ValueError("%s requires V-bundle data" % kind.value)
    gens, cap = component.gens, component.cap
    w = cmath.exp(1j * math.pi * t)
    qh = cmath.exp(1j * math.pi * tau)
    q = qh * qh
    aq = abs(q)
    if aq >= 1:
        raise NonconvergentDomain("Im tau must be positive")
    t_lines = _iter_lines([component.tangent] if component.tangent is not None else [])
    n_lines = _iter_lines(component.normals)
    v_lines = _iter_lines(component.vbundles) if kind.needs_v else []
    budget = eps / (8.0 * (len(t_lines) + len(n_lines) + len(v_lines) + 1))

    one = GradedElement.scalar(gens, cap, 1 + 0j)
    num = one
    den = one
    stray_w = Fraction(0)
    stray_cls = GradedElement.zero(gens, cap)

    def pair_prod(tw, x, sign, half):
        nonlocal num
        E = _jet_line(tw, x, w)
        Ei = _jet_line(-tw, -x, w)
        mag = max(_jet_norm(E), _jet_norm(Ei), 1.0)
        out = one
        n = 1
        while True:
            qa = qh ** (2 * n - 1) if half else q ** n
            out = out * (one + E * (sign * qa)) * (one + Ei * (sign * qa))
            if abs(qa) * aq * mag < min(0.25, budget):
                break
            n += 1
            if n > 100000:
                raise NonconvergentDomain("numeric pair product did not certify")
        return out

    def token_jet(tok, tw, x):
        if tok == "pairs+":
            return pair_prod(tw, x, 1.0, False)
        if tok == "pairs-":
            return pair_prod(tw, x, -1.0, False)
        if tok == "half+":
            return pair_prod(tw, x, 1.0, True)
        if tok == "half-":
            return pair_prod(tw, x, -1.0, True)
        if tok == "lin+":
            return one + _jet_line(-tw, -x, w)
        if tok == "lin-":
            return one - _jet_line(-tw, -x, w)
        if tok == "cosh":
            return _jet_exp(x, 0.5) + _jet_exp(x, -0.5)
        if tok == "sigma":
            return _jet_sigma(x)
        raise ValueError(tok)

    for lines, num_toks, den_toks, stray in (
            (t_lines, rec.tangent_num, rec.tangent_den, 0),
            (n_lines, rec.normal_num, rec.normal_den, rec.stray_normal),
            (v_lines, rec.v_num, rec.v_den, rec.stray_v)):
        for tw, x in lines:
            for tok in num_toks:
                num = num * token_jet(tok, tw, x)
            for tok in den_toks:
                den = den * token_jet(tok, tw, x)
            if stray:
                stray_w += Fraction(stray * tw, 2)
                stray_cls = stray_cls + x * stray

    def scalar_prod(keyf, coeff):
        out = 1 + 0j
        n = 1
        while True:
            qa = keyf(n)
            out *= (1 + coeff * qa) ** 2
            if abs(qa) * aq < min(0.25, budget):
                return out
            n += 1

    for tok in rec.v_scalar_den:
        c = {"null-plus-int": (lambda n: q ** n, 1.0),
             "null-minus-half": (lambda n: qh ** (2 * n - 1), -1.0),
             "null-plus-half": (lambda n: qh ** (2 * n - 1), 1.0)}[tok]
        for _ in v_lines:
            den = den * scalar_prod(*c)

    c_power = (rec.c_tangent * len(t_lines) + rec.c_normal * len(n_lines)
               + rec.c_v * len(v_lines))
    if c_power:
        cval = 1 + 0j
        n = 1
        while True:
            cval *= (1 - q ** n)
            if aq ** (n + 1) < min(0.25, budget):
                break
            n += 1
        num = num * (cval ** c_power)

    q8_shift = (rec.q8_tangent * len(t_lines) + rec.q8_normal * len(n_lines)
                + rec.q8_v * len(v_lines))
    out = num * graded_invert(den)
    if rec.half_per_v and v_lines:
        out = out * (0.5 ** len(v_lines))
    if q8_shift:
        out = out * cmath.exp(2j * math.pi * tau * q8_shift / 8)
    if stray_w:
        out = out * cmath.exp(1j * math.pi * t * float(stray_w))
    if stray_cls:
        out = out * _jet_exp(stray_cls, 0.5)
    return out
