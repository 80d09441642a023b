import itertools
import random

import pytest

from conftest import F4, Z, Z2, Z4, all_elements
from random_covers import Oracle, random_cover, random_lift
from quadpairs.algebra_involution import InvolutionAlgebra
from quadpairs.cli_examples.examples import curve_cover, load_data, mixed_cover, serre_data
from quadpairs.descent_cech import (
    CechCochain,
    CoverPresentation,
    GluingDatum,
    Overlap,
    coboundary,
    cohomologous_search,
    connecting_delta,
    load_cover,
)
from quadpairs.exact_linalg import Matrix, ModuleSpace, span
from quadpairs.exact_rings import Laurent, RingHom
from quadpairs.obstructions import (
    NONTRIVIAL,
    TRIVIAL,
    UNKNOWN,
    ObstructionError,
    alternate_obstruction_cocycles,
    coinvariants_dimension,
    cup_formula_check,
    doubled_representative_witness,
    equivariant_form_space,
    group_closure,
    group_cover,
    locally_quadratic_check,
    pgl2_elements,
    scalar_sections_criterion,
    strong_obstruction,
    tensor_gluing,
    weak_obstruction,
    weak_obstruction_from_forms,
)

SWAP = [[0, 1], [1, 0]]
FINITE_RINGS = [Z2, F4, Z4]


def _split_cover_over_z():
    cover = CoverPresentation((Z, Z), (Overlap(0, 1, Z, RingHom(Z, Z), RingHom(Z, Z)),))
    u = [Matrix(Z, SWAP)] * 2
    ell = [Matrix.unit(Z, 2, 0, 0)] * 2
    return GluingDatum(cover, 2, [Matrix.identity(Z, 2)], u=u, ell=ell)


# local lifts


def test_mixed_cover_is_locally_quadratic():
    lq = locally_quadratic_check(mixed_cover())
    assert lq.ok
    for i, L in enumerate(lq.ell):
        A = mixed_cover().chart_algebra(i)
        assert L + A.sigma(L) == A.one()


def test_transpose_cover_is_not_locally_quadratic():
    G = mixed_cover("trivial_transpose_cover.json")
    lq = locally_quadratic_check(G)
    assert not lq.ok and set(lq.failures) == {0, 1}
    with pytest.raises(ObstructionError, match="not locally quadratic"):
        weak_obstruction(G)


def test_curve_chart_has_a_lift():
    assert locally_quadratic_check(curve_cover(1)).ok


def test_involution_must_descend():
    obj = load_data("mixed_cover.json")
    obj["overlaps"][0]["v"] = [["1", "1"], ["0", "1"]]
    G = load_cover(obj)
    with pytest.raises(ObstructionError, match="does not descend"):
        strong_obstruction(G)


# strong obstruction


@pytest.mark.parametrize("n", [1, 2])
def test_curve_strong_obstruction_by_criterion(n):
    rep = strong_obstruction(curve_cover(n))
    assert rep.verdict == NONTRIVIAL and rep.reason == "criterion"
    assert rep.criterion.algebra_sections == rep.criterion.scalar_sections == 1
    assert rep.verify()


def test_tensor_square_strong_obstruction_is_trivial():
    G = mixed_cover("mixed_tensor_cover.json")
    rep = strong_obstruction(G, D=1)
    assert rep.verdict == TRIVIAL and rep.verify()
    assert coboundary(G, rep.witness).is_zero()
    # the given lifts already glue, so the witness is the lifts themselves
    assert rep.witness == G.ell


def test_trivial_gluing_of_split_triple():
    G = _split_cover_over_z()
    rep = strong_obstruction(G)
    assert rep.verdict == TRIVIAL
    assert all(L == Matrix.unit(Z, 2, 0, 0) for L in rep.witness)


def test_criterion_needs_characteristic_two():
    rec = scalar_sections_criterion(_split_cover_over_z())
    assert not rec.holds and not rec.characteristic_two


# weak obstruction


def test_mixed_weak_obstruction_certificate():
    G = mixed_cover()
    rep = weak_obstruction(G, D=3)
    assert rep.verdict == NONTRIVIAL and rep.reason == "certificate"
    cert = rep.certificate
    assert (cert.position, cert.degree, cert.modulus, cert.value) == ((1, 2), 0, 4, 2)
    assert cert.generators and cert.verify()
    assert cert.spot_check(G, 3, modulo_alt=True)
    assert rep.verify()


def test_tampered_certificate_is_rejected():
    cert = weak_obstruction(mixed_cover()).certificate
    cert.value = 1
    assert not cert.verify()


def test_certificate_kills_every_degree_zero_generator():
    cert = weak_obstruction(mixed_cover(), D=2).certificate
    assert all(cert.evaluate(g) == 0 for g in cert.generators)
    assert cert.evaluate(cert.representative) == 2


def test_mod_2_weak_and_strong_are_trivial():
    G = mixed_cover("mixed_mod2_cover.json")
    for run in (weak_obstruction, strong_obstruction):
        rep = run(G, D=0)
        assert rep.verdict == TRIVIAL and rep.verify()
        assert all(L == Matrix.unit(R, 2, 0, 0) for L, R in zip(rep.witness, G.cover.charts))


def test_mod_2_reduction_of_the_representative():
    rep = connecting_delta(mixed_cover()).values[0]
    to_mod_2 = RingHom(rep.ring, Laurent(Z2, "x"))
    assert rep.apply_hom(to_mod_2) == connecting_delta(mixed_cover("mixed_mod2_cover.json")).values[0]


def test_serre_weak_obstruction_from_forms():
    F, gens, A, ell, order = serre_data()
    forms = equivariant_form_space(gens, A)
    G = group_cover(F, pgl2_elements(F), A.u, ell)
    rep = weak_obstruction_from_forms(G, forms)
    assert rep.verdict == NONTRIVIAL and rep.verify()


def test_forms_route_refuses_when_forms_exist():
    F, gens, A, ell, _ = serre_data()
    forms = equivariant_form_space([], A)
    G = group_cover(F, [Matrix.identity(F, 2), Matrix(F, SWAP)], A.u, ell)
    with pytest.raises(ObstructionError):
        weak_obstruction_from_forms(G, forms)


# equivariant forms and coinvariants


def _invariant_forms_by_enumeration(gens, A):
    """Count forms on the Sym basis (values in the field) invariant under every generator."""
    forms = equivariant_form_space([], A)
    basis = forms.sym_basis
    count = 0
    for values in itertools.product(all_elements(A.ring), repeat=len(basis)):
        f = list(values)
        if all(
            forms.evaluate(f, g @ s @ g.inverse()) == forms.evaluate(f, s) for g in gens for s in basis
        ):
            count += 1
    return count


def test_no_invariant_form_for_the_three_generators():
    _, gens, A, _, _ = serre_data()
    assert equivariant_form_space(gens, A).dimension == 0
    assert _invariant_forms_by_enumeration(gens, A) == 1


def test_empty_generator_list_gives_the_full_dual():
    A = InvolutionAlgebra(F4, 2, Matrix(F4, SWAP))
    assert equivariant_form_space([], A).dimension == 3


def test_swap_alone_leaves_two_dimensions():
    A = InvolutionAlgebra(F4, 2, Matrix(F4, SWAP))
    gens = [Matrix(F4, SWAP)]
    forms = equivariant_form_space(gens, A)
    assert forms.dimension == 2
    assert _invariant_forms_by_enumeration(gens, A) == 4**2


def test_whole_group_agrees_with_generators():
    F, gens, A, _, order = serre_data()
    group = pgl2_elements(F)
    assert len(group) == order == 60
    assert set(group_closure(gens)) == set(group)
    assert equivariant_form_space(group, A).dimension == 0


def _coinvariants_by_enumeration(gens, ring):
    """``n^2`` minus the dimension of the span of ``g B g^-1 - B``, the span enumerated as a set."""
    space = ModuleSpace.matrices(ring, 2)
    vecs = [g @ B @ g.inverse() - B for g in gens for B in (Matrix.unit(ring, 2, i, j) for i in range(2) for j in range(2))]
    elems = all_elements(ring)
    spanned = set()
    for coeffs in itertools.product(elems, repeat=len(vecs)):
        acc = Matrix.zero(ring, 2)
        for c, v in zip(coeffs, vecs):
            acc = acc + v.scale(c)
        spanned.add(acc)
    q = len(elems)
    dim = 0
    while q**dim < len(spanned):
        dim += 1
    assert q**dim == len(spanned)
    assert len(span(space, vecs)) == dim
    return 4 - dim


def test_coinvariants_of_the_full_group():
    F, _, _, _, _ = serre_data()
    assert coinvariants_dimension(pgl2_elements(F), 2, F) == 1


def test_coinvariants_of_the_trivial_group():
    assert coinvariants_dimension([], 2, F4) == 4


def test_coinvariants_of_swap_is_two():
    # the differences span E11 + E22 and E12 + E21 in characteristic 2
    gens = [Matrix(F4, SWAP)]
    assert coinvariants_dimension(gens, 2, F4) == 2
    assert _coinvariants_by_enumeration(gens, F4) == 2


# alternate obstruction comparison


def test_alternate_comparison_on_the_curve():
    cmp = alternate_obstruction_cocycles(curve_cover(1))
    assert cmp.pairing_agrees and cmp.skew_image_agrees and cmp.holds
    assert not cmp.c.is_zero()


def test_alternate_comparison_with_equal_lifts_is_zero():
    cmp = alternate_obstruction_cocycles(mixed_cover("mixed_mod2_cover.json"))
    assert cmp.c.is_zero()
    assert all(x.is_zero() for row in cmp.c_prime for x in row)
    assert cmp.holds


def test_alternate_comparison_requires_gluing():
    with pytest.raises(ObstructionError):
        alternate_obstruction_cocycles(mixed_cover())


# cup formulas


def test_cup_curve_square():
    G = curve_cover(1)
    check = cup_formula_check(G, G)
    assert check.holds
    assert check.product.values == tuple(m.kron(Matrix.identity(m.ring, 2)) for m in check.first.values)


def _symplectic_cover(rng):
    while True:
        G = random_cover(F4, rng)
        if G.chart_algebra(0).type.symplectic:
            return G


def test_cup_symplectic_squares_over_gf4():
    rng = random.Random(67)
    for _ in range(4):
        G = _symplectic_cover(rng)
        assert cup_formula_check(G, G).holds
        assert weak_obstruction(tensor_gluing(G, G)).verdict == TRIVIAL


def test_cup_with_global_lift_is_zero():
    G = mixed_cover("mixed_mod2_cover.json")
    check = cup_formula_check(G, G)
    assert check.holds and check.product.is_zero()


# properties over random covers


@pytest.mark.parametrize("ring", FINITE_RINGS, ids=["F2", "F4", "Z/4"])
def test_doubled_representative_is_a_coboundary(ring):
    rng = random.Random(f"double {ring}")
    for _ in range(8):
        G = random_cover(ring, rng)
        c = connecting_delta(G)
        h = doubled_representative_witness(G)
        assert coboundary(G, h).values == c.scale(2).values
        res = cohomologous_search(CechCochain(G, c.scale(2).values, "Skew"), modulo_alt=False)
        assert res.found


def test_doubled_representative_on_the_mixed_cover():
    G = mixed_cover()
    h = doubled_representative_witness(G)
    assert coboundary(G, h).values == connecting_delta(G).scale(2).values


@pytest.mark.parametrize("ring", FINITE_RINGS, ids=["F2", "F4", "Z/4"])
def test_different_lifts_are_cohomologous(ring):
    rng = random.Random(f"lifts {ring}")
    for _ in range(8):
        G = random_cover(ring, rng)
        # fresh lifts on the same gluing
        G2 = G.with_data(ell=[random_lift(G.chart_algebra(i), rng) for i in range(len(G.cover.charts))])
        diff = connecting_delta(G2) - connecting_delta(G)
        assert cohomologous_search(CechCochain(G, diff.values, "Skew"), modulo_alt=False).found


@pytest.mark.parametrize("ring", FINITE_RINGS, ids=["F2", "F4", "Z/4"])
def test_verdicts_match_exhaustive_search(ring):
    rng = random.Random(f"verdicts {ring}")
    for _ in range(12):
        G = random_cover(ring, rng)
        strong, weak = strong_obstruction(G), weak_obstruction(G)
        assert strong.verify() and weak.verify()
        assert UNKNOWN not in (strong.verdict, weak.verdict)
        if strong.verdict == TRIVIAL:
            assert weak.verdict == TRIVIAL
        oracle = Oracle(G)
        c = connecting_delta(G)
        assert (strong.verdict == TRIVIAL) == oracle.strong_trivial(c)
        assert (weak.verdict == TRIVIAL) == oracle.weak_trivial(c)
