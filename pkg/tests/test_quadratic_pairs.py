import itertools
import random

import pytest

from conftest import F4, Z, Z2, Z4, Z5, all_elements
from quadpairs.algebra_involution import (
    BilinearFormData,
    InvolutionAlgebra,
    QuadraticFormData,
    canonical_submodule_basis,
    random_symmetric_unit,
)
from quadpairs.exact_linalg import Matrix, membership
from quadpairs.exact_rings import IntegersMod
from quadpairs.quadratic_pairs import (
    PairError,
    Semitrace,
    classify_semitraces_affine,
    f_of_identity,
    form_from_pair,
    pair_from_quadratic_form,
    semitrace_from_ell,
    split_quadratic_form,
    split_triple,
    verify_triple,
)

SWAP = [[0, 1], [1, 0]]


def _all_matrices(ring, n):
    elems = [e.data for e in all_elements(ring)]
    for entries in itertools.product(elems, repeat=n * n):
        yield Matrix.from_data(ring, [list(entries[i * n:(i + 1) * n]) for i in range(n)])


def _exhaustive_lifts(A):
    return [X for X in _all_matrices(A.ring, A.n) if X + A.sigma(X) == A.one()]


def _coset_members(C):
    """Every ell in the classified family, from the particular lift and the coset generators."""
    gens = C.coset_generators.matrices()
    orders = C.coset_generators.annihilators
    ring = C.algebra.ring
    if ring.backend[0] == "GF":
        scalars = [[e for e in all_elements(ring)] for _ in gens]
    else:
        scalars = [[ring(k) for k in range(a)] for a in orders]
    out = []
    for combo in itertools.product(*scalars):
        X = C.particular
        for c, g in zip(combo, gens):
            X = X + g.scale(c)
        out.append(X)
    return out


# semitrace_from_ell


def test_swap_over_z_with_e11():
    A = InvolutionAlgebra(Z, 2, Matrix(Z, SWAP))
    T = semitrace_from_ell(A, A.unit(0, 0))
    assert T.record.passed
    assert T.f(A.unit(0, 1)) == Z(0)
    assert T.f(A.one()) == Z(1)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_split_block_pattern(m):
    T = split_triple(Z, m)
    A = T.algebra
    for i in range(0, 2 * m, 2):
        assert T.f(A.unit(i, i) + A.unit(i + 1, i + 1)) == Z(1)


def test_half_identity_over_z5():
    A = InvolutionAlgebra(Z5, 3)
    half = Z5(2).inverse()
    T = semitrace_from_ell(A, A.one().scale(half))
    for s in canonical_submodule_basis(A, "Sym").matrices():
        assert T.f(s) == s.trace() * half


def test_bad_lift_reports_residual():
    A = InvolutionAlgebra(Z, 2, Matrix(Z, SWAP))
    with pytest.raises(PairError, match="is not zero"):
        semitrace_from_ell(A, A.zero())


def test_non_orthogonal_involution_refused():
    A = InvolutionAlgebra(Z, 2, Matrix(Z, [[0, 1], [-1, 0]]))
    with pytest.raises(PairError):
        semitrace_from_ell(A, A.unit(0, 0))


# verify_triple


def test_split_n2_passes():
    T = split_triple(Z, 1)
    rec = verify_triple(T)
    assert rec.passed and rec.basis_checked == 4 and rec.random_checked == 100
    assert rec.nonzero_witness is not None and not rec.nonzero_witness.trace().is_zero()


def test_no_linear_form_on_transpose_over_f2():
    A = InvolutionAlgebra(Z2, 2)
    for a, b, c in itertools.product(range(2), repeat=3):
        f = lambda s, a=a, b=b, c=c: Z2(a) * s[0, 0] + Z2(b) * s[1, 1] + Z2(c) * s[0, 1]
        assert not verify_triple((A, f)).passed


def test_doubled_semitrace_fails_on_e11():
    T = split_triple(Z, 1)
    rec = verify_triple((T.algebra, lambda s: T.f(s) * 2))
    assert not rec.passed and rec.failure.startswith("E11")


# classification


def test_swap_over_f2_has_four_semitraces():
    A = InvolutionAlgebra(Z2, 2, Matrix(Z2, SWAP))
    C = classify_semitraces_affine(A)
    assert C.status == "FOUND" and C.count() == 4
    lifts = _exhaustive_lifts(A)
    assert len(lifts) == 8
    assert len({Semitrace(A, L).normalized for L in lifts}) == 4


def test_transpose_over_f2_is_empty():
    A = InvolutionAlgebra(Z2, 2)
    C = classify_semitraces_affine(A)
    assert C.status == "EMPTY"
    assert C.certificate.verify(C.system)
    assert _exhaustive_lifts(A) == []


@pytest.mark.parametrize(
    "ring,u",
    [
        (Z2, SWAP),
        (F4, SWAP),
        (F4, [["w", 1], [1, 0]]),
        (Z4, SWAP),
        (Z4, [[1, 2], [2, 1]]),
        (Z4, [[2, 1], [1, 2]]),
    ],
)
def test_classification_matches_exhaustive_enumeration(ring, u):
    A = InvolutionAlgebra(ring, 2, Matrix(ring, u))
    C = classify_semitraces_affine(A)
    lifts = _exhaustive_lifts(A)
    assert C.empty == (not lifts)
    if C.empty:
        return
    family = _coset_members(C)
    assert all(X + A.sigma(X) == A.one() for X in family)
    # element for element, modulo Alt
    exhaustive = {Semitrace(A, L).normalized for L in lifts}
    assert {Semitrace(A, X).normalized for X in family} == exhaustive
    assert C.count() == len(exhaustive) == len(family)


@pytest.mark.parametrize("ring", [Z5, IntegersMod(9)], ids=["Z/5", "Z/9"])
def test_unique_semitrace_when_two_is_a_unit(ring):
    rng = random.Random(9)
    for _ in range(10):
        A = InvolutionAlgebra(ring, 2, random_symmetric_unit(ring, 2, rng))
        C = classify_semitraces_affine(A)
        assert C.status == "FOUND" and C.count() == 1


def test_one_in_symd_whenever_found():
    rng = random.Random(10)
    for ring in (Z2, F4, Z4, Z):
        for _ in range(6):
            A = InvolutionAlgebra(ring, 2, random_symmetric_unit(ring, 2, rng))
            C = classify_semitraces_affine(A)
            symd = canonical_submodule_basis(A, "Symd")
            assert membership(A.one(), symd).member == (not C.empty)
            if not C.empty:
                T = semitrace_from_ell(A, C.particular)
                # the full-algebra functional Trd(ell .) restricts to f on Sym
                for s in canonical_submodule_basis(A, "Sym").matrices():
                    assert (C.particular @ s).trace() == T.f(s)


def test_degree_one_algebras():
    C5 = classify_semitraces_affine(InvolutionAlgebra(Z5, 1))
    assert C5.status == "FOUND" and C5.particular.to_json() == [["3"]]
    assert classify_semitraces_affine(InvolutionAlgebra(Z, 1)).status == "EMPTY"


# quadratic forms


def test_hyperbolic_form_gives_split_triple():
    q = split_quadratic_form(Z, 1)
    T = pair_from_quadratic_form(q)
    assert T.f(T.algebra.one()) == Z(1)
    assert T.semitrace == split_triple(Z, 1).semitrace


def test_odd_rank_form_over_z5_gives_half_trace():
    q = QuadraticFormData(Z5, Matrix.identity(Z5, 3))
    T = pair_from_quadratic_form(q)
    half = Z5(2).inverse()
    for s in canonical_submodule_basis(T.algebra, "Sym").matrices():
        assert T.f(s) == s.trace() * half


def test_rank_two_form_over_f2():
    q = QuadraticFormData(Z2, Matrix(Z2, [[1, 1], [0, 0]]))
    T = pair_from_quadratic_form(q)
    assert T.record.passed
    assert q.polar().gram == Matrix(Z2, SWAP)


def test_singular_form_refused():
    with pytest.raises(PairError):
        pair_from_quadratic_form(QuadraticFormData(Z2, Matrix(Z2, [[1, 0], [0, 1]])))


def test_split_triple_recovers_x1x2():
    T = split_triple(Z, 1)
    b = BilinearFormData(Z, T.algebra.u)
    assert form_from_pair(T, b).same_form(split_quadratic_form(Z, 1))


def test_form_from_pair_checks_involution():
    T = split_triple(Z, 1)
    with pytest.raises(PairError):
        form_from_pair(T, BilinearFormData(Z, Matrix.identity(Z, 2)))


def random_regular_form(ring, rng, max_rank=4):
    while True:
        n = rng.randint(1, max_rank)
        Q = Matrix.from_data(ring, [[ring.random(rng, 0) if j >= i else ring.zero_data() for j in range(n)] for i in range(n)])
        q = QuadraticFormData(ring, Q)
        if q.is_regular():
            return q


@pytest.mark.parametrize("ring", [Z2, F4, Z4, Z5], ids=["F2", "F4", "Z/4", "Z/5"])
def test_form_round_trip(ring):
    rng = random.Random(str(ring))
    for _ in range(12):
        q = random_regular_form(ring, rng)
        T = pair_from_quadratic_form(q, rng)
        b = q.polar()
        back = form_from_pair(T, b)
        assert back.same_form(q)
        assert back.polar().gram == b.gram


# f(1)


def test_f_of_identity_values():
    assert f_of_identity(split_triple(Z, 2)) == Z(2)
    assert f_of_identity(split_triple(Z2, 1)) == Z2(1)
    A = InvolutionAlgebra(Z5, 3)
    assert f_of_identity(semitrace_from_ell(A, A.one().scale(Z5(3)))) == Z5(4)


def test_f_of_identity_is_half_the_degree_across_a_family():
    A = InvolutionAlgebra(Z4, 2, Matrix(Z4, SWAP))
    for X in _coset_members(classify_semitraces_affine(A)):
        assert f_of_identity(semitrace_from_ell(A, X)) == Z4(1)
