import itertools
import random

import pytest

from conftest import F4, Z, Z2, Z4, Z5, ZX_4X, sample
from quadpairs.algebra_involution import (
    BilinearFormData,
    InvolutionAlgebra,
    InvolutionError,
    QuadraticFormData,
    adjoint_involution,
    canonical_submodule_basis,
    conjugate_involution,
    involution_type,
    phi_b,
    random_symmetric_unit,
    skolem_noether_module,
    trace_pairings,
)
from quadpairs.exact_linalg import Matrix, membership, span
from quadpairs.tensor_involutions import same_submodule

SWAP = [[0, 1], [1, 0]]


def _basis_vectors(ring, n):
    return [Matrix.unit(ring, n, i, 0, 1) for i in range(n)]


# adjoint involutions


def test_hyperbolic_adjoint_over_z():
    A = adjoint_involution(BilinearFormData(Z, Matrix(Z, SWAP)))
    rng = random.Random(1)
    for _ in range(20):
        a, b, c, d = (rng.randint(-9, 9) for _ in range(4))
        assert A.sigma(Matrix(Z, [[a, b], [c, d]])) == Matrix(Z, [[d, b], [c, a]])


@pytest.mark.parametrize("gram", [SWAP, [[1, 0], [0, 1]], [[0, 1], [-1, 0]], [[2, 1], [1, 1]]])
def test_adjoint_identity_holds_on_basis(gram):
    b = BilinearFormData(Z, Matrix(Z, gram))
    A = adjoint_involution(b)
    vs = _basis_vectors(Z, 2)
    for a in A.basis():
        for v in vs:
            for w in vs:
                assert b(A.sigma(a) @ v, w) == b(v, a @ w)
    assert A.check_axioms()


def test_identity_gram_gives_transpose():
    A = adjoint_involution(BilinearFormData(Z, Matrix.identity(Z, 3)))
    X = Matrix(Z, [[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert A.sigma(X) == X.T


def test_antisymmetric_gram_is_weakly_symplectic():
    A = adjoint_involution(BilinearFormData(Z, Matrix(Z, [[0, 1], [-1, 0]])))
    assert A.epsilon == -1
    assert A.type.weakly_symplectic and A.type.symplectic


def test_adjoint_errors():
    with pytest.raises(InvolutionError):
        adjoint_involution(BilinearFormData(Z, Matrix(Z, [[2, 0], [0, 1]])))
    with pytest.raises(InvolutionError):
        adjoint_involution(BilinearFormData(Z, Matrix(Z, [[1, 1], [0, 1]])))


def test_epsilon_matches_bilinear_symmetry():
    rng = random.Random(2)
    for ring in (Z, Z4, F4):
        for _ in range(5):
            A = InvolutionAlgebra(ring, 3, random_symmetric_unit(ring, 3, rng))
            vs = _basis_vectors(ring, 3)
            for v in vs:
                for w in vs:
                    assert A.bilinear(v, w) == A.bilinear(w, v) * A.epsilon


@pytest.mark.parametrize("ring", [Z, Z4, F4], ids=["Z", "Z/4", "F4"])
def test_epsilon_switch(ring):
    rng = random.Random(3)
    for _ in range(20):
        u = random_symmetric_unit(ring, 2, rng)
        if rng.random() < 0.5 and ring is not F4:
            u = Matrix(ring, [[0, 1], [-1, 0]])
        b = BilinearFormData(ring, u)
        A = adjoint_involution(b)
        for m1 in _basis_vectors(ring, 2):
            for m2 in _basis_vectors(ring, 2):
                assert A.sigma(phi_b(b, m1, m2)) == phi_b(b, m2, m1).scale(A.epsilon)


def test_adjoint_of_polar_form_is_stable():
    q = QuadraticFormData(Z2, Matrix(Z2, [[1, 1], [0, 0]]))
    A1 = adjoint_involution(q.polar())
    A2 = adjoint_involution(BilinearFormData(Z2, A1.u))
    assert A1 == A2


# involution types


def test_swap_over_gf4_is_symplectic_and_orthogonal():
    t = involution_type(InvolutionAlgebra(F4, 2, Matrix(F4, SWAP)))
    assert t.orthogonal and t.symplectic


def test_transpose_over_z_is_orthogonal_only():
    t = involution_type(InvolutionAlgebra(Z, 2))
    assert t.orthogonal and not t.weakly_symplectic and not t.symplectic


def test_weakly_symplectic_datum_over_z2():
    t = involution_type(InvolutionAlgebra(Z2, 2, Matrix(Z2, [[1, 1], [1, 0]])))
    assert t.weakly_symplectic and not t.symplectic


def test_datum_neither_symmetric_nor_antisymmetric():
    with pytest.raises(InvolutionError):
        InvolutionAlgebra(Z, 2, Matrix(Z, [[1, 2], [0, 1]]))


def test_symplectic_iff_trace_vanishes_on_skew():
    data = [
        (Z2, [[1, 1], [1, 0]]),
        (Z2, SWAP),
        (F4, SWAP),
        (F4, [[1, "w"], ["w", 0]]),
        (Z4, [[0, 1], [-1, 0]]),
        (Z4, [[2, 1], [-1, 0]]),
        (Z, [[0, 1], [-1, 0]]),
    ]
    for ring, u in data:
        A = InvolutionAlgebra(ring, 2, Matrix(ring, u))
        assert A.type.weakly_symplectic
        skew = canonical_submodule_basis(A, "Skew")
        vanishes = all(g.trace().is_zero() for g in skew.matrices())
        assert vanishes == A.type.symplectic


# canonical submodules


def test_transpose_sym_and_alt_over_z():
    A = InvolutionAlgebra(Z, 2)
    sym = canonical_submodule_basis(A, "Sym")
    alt = canonical_submodule_basis(A, "Alt")
    expected_sym = span(A.space, [A.unit(0, 0), A.unit(1, 1), A.unit(0, 1) + A.unit(1, 0)])
    expected_alt = span(A.space, [A.unit(0, 1) - A.unit(1, 0)])
    assert len(sym) == 3 and same_submodule(sym, expected_sym)
    assert len(alt) == 1 and same_submodule(alt, expected_alt)


def test_skew_over_mixed_ring_off_diagonal_entries():
    A = InvolutionAlgebra(ZX_4X, 2, Matrix(ZX_4X, SWAP))
    skew = canonical_submodule_basis(A, "Skew", 2)
    for g in skew.matrices():
        assert (g + A.sigma(g)).is_zero()
    # brute force: b E12 is skew iff 2b = 0
    for c0, c1, c2 in itertools.product(range(-2, 3), range(4), range(4)):
        b = ZX_4X.element(ZX_4X.from_coords({0: c0, 1: c1, 2: c2}))
        X = Matrix.unit(ZX_4X, 2, 0, 1, coeff=b)
        assert membership(X, skew).member == (b + b).is_zero()
    assert membership(Matrix(ZX_4X, [["1", "0"], ["0", "-1"]]), skew).member


@pytest.mark.parametrize("ring", [Z, Z2, F4, Z4], ids=["Z", "F2", "F4", "Z/4"])
def test_rank_formulas_small(ring):
    rng = random.Random(str(ring))
    for n in (2, 3, 4):
        for _ in range(2):
            A = InvolutionAlgebra(ring, n, random_symmetric_unit(ring, n, rng))
            assert len(canonical_submodule_basis(A, "Sym")) == n * (n + 1) // 2
            assert len(canonical_submodule_basis(A, "Alt")) == n * (n - 1) // 2


@pytest.mark.parametrize("ring", [Z, Z2, F4, Z4, Z5], ids=["Z", "F2", "F4", "Z/4", "Z/5"])
def test_alt_in_skew_and_symd_in_sym(ring):
    rng = random.Random(5)
    A = InvolutionAlgebra(ring, 3, random_symmetric_unit(ring, 3, rng))
    alt, skew = canonical_submodule_basis(A, "Alt"), canonical_submodule_basis(A, "Skew")
    symd, sym = canonical_submodule_basis(A, "Symd"), canonical_submodule_basis(A, "Sym")
    assert all(membership(g, skew).member for g in alt.matrices())
    assert all(membership(g, sym).member for g in symd.matrices())
    if ring is Z5:
        assert same_submodule(alt, skew) and same_submodule(symd, sym)


def test_unknown_submodule_name():
    with pytest.raises(InvolutionError):
        canonical_submodule_basis(InvolutionAlgebra(Z, 2), "Hermitian")


def test_degree_bound_beyond_tracked_maximum():
    A = InvolutionAlgebra(ZX_4X, 2, Matrix(ZX_4X, SWAP))
    with pytest.raises(InvolutionError):
        canonical_submodule_basis(A, "Sym", 9)


# trace pairings


def test_b_minus_for_transpose_over_z():
    P = trace_pairings(InvolutionAlgebra(Z, 2))
    assert P.b_minus.to_json() == [["-1"]]
    assert P.b_minus_regular


def test_pairings_are_symmetric_over_f4():
    rng = random.Random(6)
    for _ in range(20):
        A = InvolutionAlgebra(F4, 2, random_symmetric_unit(F4, 2, rng))
        P = trace_pairings(A)
        for G in (P.b_plus, P.b_minus):
            if G is not None:
                assert G == G.T


def test_trace_form_orthogonality():
    rng = random.Random(7)
    for ring in (Z, Z4, F4):
        A = InvolutionAlgebra(ring, 3, random_symmetric_unit(ring, 3, rng))
        sym = canonical_submodule_basis(A, "Sym").matrices()
        alt = canonical_submodule_basis(A, "Alt").matrices()
        for x in sym:
            for y in alt:
                assert (x @ y).trace().is_zero()


def test_pairings_need_orthogonal_involution():
    with pytest.raises(InvolutionError):
        trace_pairings(InvolutionAlgebra(Z, 2, Matrix(Z, [[0, 1], [-1, 0]])))


# conjugate involutions


def test_conjugate_by_one_is_unchanged():
    A = InvolutionAlgebra(Z, 2)
    assert conjugate_involution(A, A.one()).algebra == A


def test_conjugate_by_symmetric_unit_stays_orthogonal():
    res = conjugate_involution(InvolutionAlgebra(Z, 2), Matrix(Z, SWAP))
    assert res.w_symmetric and res.orthogonal


def test_conjugate_by_antisymmetric_unit_switches_type():
    res = conjugate_involution(InvolutionAlgebra(Z, 2), Matrix(Z, [[0, 1], [-1, 0]]))
    assert not res.w_symmetric and not res.orthogonal
    assert res.algebra.epsilon == -1


def test_conjugate_needs_invertible():
    with pytest.raises(InvolutionError):
        conjugate_involution(InvolutionAlgebra(Z, 2), Matrix(Z, [[2, 0], [0, 1]]))


def test_conjugate_is_inner_twist_of_sigma():
    rng = random.Random(8)
    A = InvolutionAlgebra(Z4, 2, Matrix(Z4, SWAP))
    w = Matrix(Z4, [[1, 2], [2, 1]])
    B = conjugate_involution(A, w).algebra
    for _ in range(10):
        X = Matrix.from_data(Z4, [[sample(Z4, rng).data for _ in range(2)] for _ in range(2)])
        assert B.sigma(X) == w @ A.sigma(X) @ w.inverse()


# Skolem-Noether module


def test_inner_automorphism_module_is_free_on_u():
    u = Matrix(Z, [[1, 2], [0, 1]])
    res = skolem_noether_module(Z, 2, u)
    assert res.free_rank_one
    assert same_submodule(res.module, span(res.module.space, [u]))
    assert (res.generator.inverse() @ u).to_json() in ([["1", "0"], ["0", "1"]], [["-1", "0"], ["0", "-1"]])


def test_identity_automorphism_gives_the_center():
    res = skolem_noether_module(Z, 2, Matrix.identity(Z, 2))
    assert res.free_rank_one
    assert same_submodule(res.module, span(res.module.space, [Matrix.identity(Z, 2)]))


def test_diagonal_inner_automorphism_over_gf4():
    v = Matrix(F4, [[1, 0], [0, "w"]])
    res = skolem_noether_module(F4, 2, v)
    assert res.free_rank_one and len(res.module) == 1
    assert same_submodule(res.module, span(res.module.space, [v]))


def test_non_automorphism_is_rejected():
    with pytest.raises(InvolutionError):
        skolem_noether_module(Z, 2, lambda X: X.T)
