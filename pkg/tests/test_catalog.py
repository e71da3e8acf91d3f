from fractions import Fraction

import pytest

from eqgenus.algebra import WLaurentPoly, WLaurentRational
from eqgenus.catalog import (
    UnknownEntry,
    borel_weil_character,
    builtin,
    names,
    oracle_check_s2,
)
from eqgenus.genera import OperatorKind
from eqgenus.localization import equivariant_character, rigidity_check, validate


def test_names_and_unknown():
    assert names() == ["cp3-weighted", "s2-family-base", "s2-rotation",
                       "s2-v-double-tangent", "s2xs2-birotation", "s4-rotation"]
    with pytest.raises(UnknownEntry):
        builtin("no-such-entry")


def test_all_entries_validate():
    for name in names():
        entry = builtin(name)
        rep = validate(entry.data)
        assert rep.ok, (name, rep.errors)
        for variant in entry.variants.values():
            assert validate(variant).ok


def test_s2_rotation_weights():
    data = builtin("s2-rotation").data
    ws = sorted(b.weight for c in data.components for b in c.normals)
    assert ws == [Fraction(-1), Fraction(1)]
    assert data.fiber_half_dim == 1


def test_cp3_weight_sets():
    data = builtin("cp3-weighted").data
    sets = [sorted(b.weight for b in c.normals) for c in data.components]
    assert sets == [[1, 2, 3], [-1, 1, 2], [-2, -1, 1], [-3, -2, -1]]


# -- the Borel-Weil oracle ---------------------------------------------------------

def test_borel_weil_small_values():
    assert borel_weil_character(0) == WLaurentPoly.one()
    assert borel_weil_character(-1) == WLaurentPoly.zero()
    assert borel_weil_character(1) == WLaurentPoly({1: 1, -1: 1})
    assert borel_weil_character(2) == WLaurentPoly({2: 1, 0: 1, -2: 1})


def test_borel_weil_symmetries():
    for k in range(8):
        ch = borel_weil_character(k)
        assert ch.subs_w_inverse() == ch
        assert borel_weil_character(-k - 2) == -ch


def test_oracle_calibration_point():
    # the antisymmetrized V = TX family at q^0: index character -2,
    # the negated Euler number of the sphere
    rep = oracle_check_s2(OperatorKind.DVStarDifference, 8)
    assert rep.equal
    assert rep.engine.c[0] == WLaurentRational.const(-2)
    assert rep.oracle.c[0] == WLaurentRational.const(-2)


def test_oracle_s2_main_kinds():
    for kind in (OperatorKind.DThetaQ, OperatorKind.DsThetaPrime, OperatorKind.WittenH):
        rep = oracle_check_s2(kind, 16)
        assert rep.equal, (kind, rep.first_mismatch)


def test_oracle_s2_v_kinds():
    for kind in (OperatorKind.DeltaVThetaPrime, OperatorKind.DVThetaQ,
                 OperatorKind.DVThetaMinusQ, OperatorKind.DVStarDifference):
        rep = oracle_check_s2(kind, 12)
        assert rep.equal, (kind, rep.first_mismatch)
        repn = oracle_check_s2(kind, 12, normalized=True)
        assert repn.equal, (kind, repn.first_mismatch)


# -- expected verdicts at depth -------------------------------------------------------

def test_catalog_expected_verdicts_n8_48():
    for name in ("s2-rotation", "s4-rotation", "cp3-weighted", "s2xs2-birotation"):
        data = builtin(name).data
        for kind in (OperatorKind.DsThetaPrime, OperatorKind.DThetaQ,
                     OperatorKind.DThetaMinusQ):
            res = equivariant_character(data, kind, 48)
            assert rigidity_check(res).rigid, (name, kind)
    # vanishing on the sphere
    res = equivariant_character(builtin("s2-rotation").data, OperatorKind.WittenH, 48)
    assert not res.series.c


def test_s4_variants_both_spin_consistent():
    entry = builtin("s4-rotation")
    for label, data in (("integer", entry.data),
                        ("half-integer", entry.variants["half-integer"])):
        for kind in (OperatorKind.DThetaQ, OperatorKind.DsThetaPrime):
            res = equivariant_character(data, kind, 24)
            v = rigidity_check(res)
            assert v.rigid, (label, kind, v)
