import copy
import itertools
import random

import pytest

from conftest import F4, Z4_LAURENT, ZX_4X, ZY_4Y
from quadpairs.cli_examples.examples import curve_cover, load_data, mixed_cover
from quadpairs.descent_cech import (
    CechCochain,
    CoverPresentation,
    DescentError,
    GluingDatum,
    Overlap,
    coboundary,
    cohomologous_search,
    connecting_delta,
    descend_involution_check,
    descend_semitrace_check,
    global_sections,
    load_cover,
    verify_witness,
)
from quadpairs.exact_linalg import Matrix, membership
from quadpairs.exact_rings import RingHom


def _mixed_json(**changes):
    obj = copy.deepcopy(load_data("mixed_cover.json"))
    obj["overlaps"][0].update(changes)
    return obj


def _scalar_mixed_cover():
    cover = CoverPresentation(
        (ZX_4X, ZY_4Y),
        (Overlap(0, 1, Z4_LAURENT, RingHom(ZX_4X, Z4_LAURENT), RingHom(ZY_4Y, Z4_LAURENT, {"x^-1": "x^-1"})),),
    )
    return GluingDatum(cover, 1, [Matrix.identity(Z4_LAURENT, 1)])


def _residual(G, family):
    return [G.glue(k, family[ov.i]) - G.restrict_j(k, family[ov.j]) for k, ov in enumerate(G.overlaps)]


# global sections


@pytest.mark.parametrize("D", [0, 1, 2, 3])
def test_structure_sheaf_is_a_congruent_to_b_mod_4(D):
    G = _scalar_mixed_cover()
    O = global_sections(G, D)
    for a, b in itertools.product(range(-6, 7), repeat=2):
        vec = (Matrix(ZX_4X, [[a]]), Matrix(ZY_4Y, [[b]]))
        assert membership(vec, O).member == ((a - b) % 4 == 0)


def test_structure_sheaf_against_direct_gluing():
    # pairs with a degree-one tail; they glue iff the restrictions agree in Z/4[x, 1/x]
    G = _scalar_mixed_cover()
    O = global_sections(G, 1)
    h_i, h_j = G.overlaps[0].res_i, G.overlaps[0].res_j
    for a, b, t, s in itertools.product(range(-4, 5), range(-4, 5), range(4), range(4)):
        f = ZX_4X.parse(f"{a}+{t}x")
        g = ZY_4Y.parse(f"{b}+{s}x^-1")
        glues = h_i(f) == h_j(g)
        assert membership((Matrix(ZX_4X, [[f]]), Matrix(ZY_4Y, [[g]])), O).member == glues


@pytest.mark.parametrize("n", [1, 2])
def test_curve_sections_are_one_dimensional(n):
    G = curve_cover(n)
    S = global_sections(G)
    assert len(S) == 1
    assert all(all(m.is_zero() for m in _residual(G, B)) for B in S.vectors())


def test_sections_have_zero_residual():
    for G in (mixed_cover(), mixed_cover("mixed_tensor_cover.json")):
        for D in (0, 2):
            for B in global_sections(G, D).vectors():
                assert all(m.is_zero() for m in _residual(G, B))


# descent of involutions and semitraces


def test_involution_descends_on_mixed_cover():
    assert descend_involution_check(mixed_cover())


def test_involution_descends_on_curve_cover():
    assert descend_involution_check(curve_cover(1))


def test_unipotent_gluing_breaks_the_hyperbolic_involution():
    G = load_cover(_mixed_json(v=[["1", "1"], ["0", "1"]]))
    assert not descend_involution_check(G)


def test_curve_semitrace_descends():
    checks = descend_semitrace_check(curve_cover(1))
    assert all(c.glues for c in checks)


def test_tensor_lifts_glue_exactly():
    checks = descend_semitrace_check(mixed_cover("mixed_tensor_cover.json"))
    assert all(c.glues and c.residual.is_zero() for c in checks)


def test_e11_on_both_mixed_charts_does_not_glue():
    (check,) = descend_semitrace_check(mixed_cover(), D=2)
    assert not check.glues
    assert check.residual.to_json() == [["0", "2"], ["0", "0"]]
    assert check.certificate is not None


def test_bad_lift_refused():
    G = mixed_cover()
    zero = [Matrix.zero(R, 2) for R in G.cover.charts]
    with pytest.raises(DescentError, match="chart 0"):
        descend_semitrace_check(G, zero)
    with pytest.raises(DescentError):
        connecting_delta(G, zero)


# cochains


def test_identical_lifts_on_trivial_gluing_give_zero():
    G = load_cover(load_data("mixed_mod2_cover.json"))
    assert connecting_delta(G).is_zero()


def test_mixed_representative():
    c = connecting_delta(mixed_cover())
    assert c.values[0].to_json() == [["0", "2"], ["0", "0"]]
    assert c.in_skew()


def _random_alt(A, rng, D=1):
    X = Matrix.from_data(A.ring, [[A.ring.random(rng, D) for _ in range(A.n)] for _ in range(A.n)])
    return X - A.sigma(X)


@pytest.mark.parametrize("name", ["mixed_cover.json", "mixed_tensor_cover.json"])
def test_lifts_of_the_same_semitrace_give_cohomologous_cochains(name):
    G = mixed_cover(name)
    c = connecting_delta(G)
    rng = random.Random(name)
    for _ in range(5):
        a = [_random_alt(G.chart_algebra(i), rng) for i in range(len(G.cover.charts))]
        ell2 = [L + x for L, x in zip(G.ell, a)]
        c2 = connecting_delta(G, ell2)
        diff = c2 - c
        assert diff == coboundary(G, a)
        res = cohomologous_search(CechCochain(G, diff.values, "Skew"), D=1, modulo_alt=False)
        assert res.found and verify_witness(diff, res)


def test_zero_cochain_has_zero_witness():
    G = mixed_cover()
    zero = CechCochain(G, tuple(Matrix.zero(ov.ring, 2) for ov in G.overlaps), "Skew/Alt")
    res = cohomologous_search(zero)
    assert res.found
    assert all(h.is_zero() for h in res.h)


@pytest.mark.parametrize("D", [0, 1, 2, 3])
def test_mixed_cochain_is_not_a_coboundary_mod_alt(D):
    c = connecting_delta(mixed_cover())
    res = cohomologous_search(CechCochain(c.gluing, c.values, "Skew/Alt"), D)
    assert not res.found and res.status == f"NOT_FOUND_AT_DEGREE({D})"
    assert res.certificate.verify(res.system)


def test_mod_2_cochain_is_a_coboundary_at_degree_zero():
    G = load_cover(load_data("mixed_mod2_cover.json"))
    R0, R1 = G.cover.charts
    G = G.with_data(ell=[Matrix(R0, [[1, 0], [0, 0]]), Matrix(R1, [[0, 1], [0, 1]])])
    c = connecting_delta(G)
    assert not c.is_zero()
    res = cohomologous_search(CechCochain(G, c.values, "Skew/Alt"), 0)
    assert res.found and verify_witness(CechCochain(G, c.values, "Skew/Alt"), res)


def test_cochain_tag_is_checked():
    G = mixed_cover()
    with pytest.raises(DescentError):
        CechCochain(G, (Matrix.zero(Z4_LAURENT, 2),), "Sym")
    c = connecting_delta(G)
    assert c.verify_tag() and not CechCochain(G, c.values, "Alt").verify_tag(2)


# loading


def test_cover_json_round_trip():
    for name in ("mixed_cover.json", "mixed_tensor_cover.json", "trivial_transpose_cover.json"):
        G = mixed_cover(name)
        assert load_cover(G.to_json()).to_json() == G.to_json()


@pytest.mark.parametrize(
    "obj",
    [
        {},
        {"charts": [{"zmod": 2}], "overlaps": [{"i": 0, "j": 3, "ring": {"zmod": 2}, "v": [["1"]]}]},
        _mixed_json(v=[["2", "0"], ["0", "1"]]),
        _mixed_json(v_inv=[["1", "0"], ["0", "1"]]),
        _mixed_json(res_i={"x": "x+*"}),
    ],
    ids=["empty", "missing-chart", "singular-v", "wrong-inverse", "bad-hom"],
)
def test_malformed_covers(obj):
    with pytest.raises(Exception) as info:
        load_cover(obj)
    assert not isinstance(info.value, (AttributeError, NameError))


def test_partial_chart_data_refused():
    obj = copy.deepcopy(load_data("mixed_cover.json"))
    del obj["charts"][1]["ell"]
    with pytest.raises(DescentError, match="every chart"):
        load_cover(obj)


def test_rings_must_share_a_backend():
    with pytest.raises(DescentError):
        CoverPresentation((ZX_4X, F4), ())


def test_cocycle_condition_is_asserted():
    assert mixed_cover().cocycle_status == "ASSERTED"
