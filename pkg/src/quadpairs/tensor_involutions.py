"""Tensor products of matrix algebras with involution.

Tensor products are Kronecker products: ``A1 (x) A2 = M_{n1 n2}`` with datum
``u1 (x) u2``.  Two quadratic pairs live on such products: ``ell (x) 1`` from a
pair on the first factor when the second is orthogonal, and the same shape of
lift when both factors are symplectic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra_involution import (
    InvolutionAlgebra,
    InvolutionError,
    canonical_submodule_basis,
)
from .exact_linalg import (
    Matrix,
    Solution,
    SubmoduleBasis,
    intersection,
    membership,
    solve_map,
    span,
)
from .quadratic_pairs import (
    PairError,
    QuadraticTriple,
    semitrace_equation,
    semitrace_from_ell,
)

__all__ = [
    "TensorAlgebra",
    "tensor_product",
    "f1_star",
    "f_otimes_symplectic",
    "symplectic_lift",
    "sym_decomposition_check",
    "SymDecompositionReport",
    "tensor_span",
    "submodule_sum",
    "same_submodule",
    "one_in_symd",
    "example_weak_pair_refusal",
]


@dataclass(frozen=True)
class TensorAlgebra:
    factors: tuple[InvolutionAlgebra, ...]
    algebra: InvolutionAlgebra

    @property
    def epsilon(self) -> int:
        e = 1
        for f in self.factors:
            e *= f.epsilon
        return e

    def pure(self, *parts: Matrix) -> Matrix:
        out = parts[0]
        for p in parts[1:]:
            out = out.kron(p)
        return out


def tensor_product(A1: InvolutionAlgebra, A2: InvolutionAlgebra) -> TensorAlgebra:
    if A1.ring != A2.ring:
        raise InvolutionError(f"factors live over different rings: {A1.ring} and {A2.ring}")
    A = InvolutionAlgebra(A1.ring, A1.n * A2.n, A1.u.kron(A2.u))
    T = TensorAlgebra((A1, A2), A)
    # the product datum is eps1 eps2 symmetric; in characteristic 2 both signs agree
    if T.epsilon == 1 and not A.type.orthogonal or T.epsilon == -1 and not A.type.weakly_symplectic:
        raise InvolutionError("tensor datum does not have the product type")
    return T


def _sym_pairs(A1: InvolutionAlgebra, A2: InvolutionAlgebra, which1: str, which2: str, D):
    g1 = canonical_submodule_basis(A1, which1, D).matrices()
    g2 = canonical_submodule_basis(A2, which2, D).matrices()
    return [(s1, s2) for s1 in g1 for s2 in g2]


def f1_star(T1: QuadraticTriple, A2: InvolutionAlgebra, D: int | None = 0) -> QuadraticTriple:
    """The triple with semitrace ``ell (x) 1`` and ``f(s1 (x) s2) = f1(s1) Trd(s2)``."""
    if T1.record is None or not T1.record.passed:
        raise PairError("first factor triple is not verified")
    if not A2.type.orthogonal:
        raise PairError("second factor must be orthogonal")
    TA = tensor_product(T1.algebra, A2)
    ell = T1.ell.kron(A2.one())
    T = semitrace_from_ell(TA.algebra, ell, D)
    for s1, s2 in _sym_pairs(T1.algebra, A2, "Sym", "Sym", D):
        if T.f(s1.kron(s2)) != T1.f(s1) * s2.trace():
            raise PairError(f"product formula fails at {s1.to_json()} (x) {s2.to_json()}")
    return T


def symplectic_lift(A: InvolutionAlgebra, D: int | None = 0) -> Matrix | None:
    """Some ``ell`` with ``ell + sigma(ell) = 1`` (any involution type), or None."""
    sol = solve_map(semitrace_equation(A), (A.one(),), D, want_kernel=False)
    return sol.particular[0] if isinstance(sol, Solution) else None


WEAK_REFUSAL = (
    "factor is weakly symplectic but not symplectic; such tensor products need not "
    "carry a quadratic pair (u = [[1,1],[1,0]] over Z/2 squared has 1 outside Symd)"
)


def f_otimes_symplectic(A1: InvolutionAlgebra, A2: InvolutionAlgebra, D: int | None = 0) -> QuadraticTriple:
    """The triple on ``A1 (x) A2`` vanishing on ``Skew (x) Skew``, for symplectic factors."""
    for A in (A1, A2):
        if not A.type.symplectic:
            if A.type.weakly_symplectic:
                raise PairError(WEAK_REFUSAL)
            raise PairError("both factors must be symplectic")
    ell1 = symplectic_lift(A1, D)
    if ell1 is None:
        raise PairError("no ell with ell + sigma(ell) = 1 on the first factor")
    TA = tensor_product(A1, A2)
    T = semitrace_from_ell(TA.algebra, ell1.kron(A2.one()), D)
    for s1, s2 in _sym_pairs(A1, A2, "Skew", "Skew", D):
        if not T.f(s1.kron(s2)).is_zero():
            raise PairError(f"f does not vanish at {s1.to_json()} (x) {s2.to_json()}")
    return T


def tensor_span(A: InvolutionAlgebra, B1: SubmoduleBasis, B2: SubmoduleBasis, D: int | None = 0) -> SubmoduleBasis:
    """Submodule of ``A`` generated by Kronecker products of generators."""
    return span(A.space, [g1.kron(g2) for g1 in B1.matrices() for g2 in B2.matrices()], D)


def submodule_sum(B1: SubmoduleBasis, B2: SubmoduleBasis) -> SubmoduleBasis:
    return span(B1.space, B1.vectors() + B2.vectors(), B1.degree)


def _contained(B: SubmoduleBasis, C: SubmoduleBasis) -> Matrix | None:
    """First generator of ``B`` outside ``C``, or None."""
    for v in B.vectors():
        if not membership(v, C).member:
            return v[0]
    return None


def same_submodule(B1: SubmoduleBasis, B2: SubmoduleBasis) -> bool:
    return _contained(B1, B2) is None and _contained(B2, B1) is None


def one_in_symd(A: InvolutionAlgebra, D: int | None = 0):
    """``(True, ell)`` or ``(False, certificate)`` for the question 1 in Symd."""
    sol = solve_map(semitrace_equation(A), (A.one(),), D, want_kernel=False)
    if isinstance(sol, Solution):
        return True, sol.particular[0]
    return False, sol.certificate


@dataclass
class SymDecompositionReport:
    sym_equals_symd_plus_sym_sym: bool
    sym_equals_symd_plus_skew_skew: bool | None
    naive_intersection_equal: bool | None
    naive_witness: Matrix | None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "sym_equals_symd_plus_sym_sym": self.sym_equals_symd_plus_sym_sym,
            "sym_equals_symd_plus_skew_skew": self.sym_equals_symd_plus_skew_skew,
            "naive_intersection_equal": self.naive_intersection_equal,
            "naive_witness": self.naive_witness.to_json() if self.naive_witness is not None else None,
        }


def sym_decomposition_check(A1: InvolutionAlgebra, A2: InvolutionAlgebra, D: int | None = 0) -> SymDecompositionReport:
    """Compare Sym of the product with the sums built from the factors.

    Checks ``Sym = Symd + Sym1 (x) Sym2`` always, ``Sym = Symd + Skew1 (x) Skew2``
    for symplectic factors, and for orthogonal factors whether
    ``Symd1 (x) Symd2`` equals ``(Symd1 (x) Sym2) meet (Sym1 (x) Symd2)``,
    returning an element of the difference when they differ.
    """
    TA = tensor_product(A1, A2)
    A = TA.algebra
    sym = canonical_submodule_basis(A, "Sym", D)
    symd = canonical_submodule_basis(A, "Symd", D)
    b1 = {w: canonical_submodule_basis(A1, w, D) for w in ("Sym", "Symd", "Skew")}
    b2 = {w: canonical_submodule_basis(A2, w, D) for w in ("Sym", "Symd", "Skew")}
    sym_sym = tensor_span(A, b1["Sym"], b2["Sym"], D)
    first = same_submodule(sym, submodule_sum(symd, sym_sym))
    second = None
    if A1.type.symplectic and A2.type.symplectic:
        skew_skew = tensor_span(A, b1["Skew"], b2["Skew"], D)
        second = same_submodule(sym, submodule_sum(symd, skew_skew))
    naive = None
    witness = None
    if A1.type.orthogonal and A2.type.orthogonal:
        dd = tensor_span(A, b1["Symd"], b2["Symd"], D)
        ds = tensor_span(A, b1["Symd"], b2["Sym"], D)
        sd = tensor_span(A, b1["Sym"], b2["Symd"], D)
        meet = intersection(ds, sd)
        witness = _contained(meet, dd)
        naive = witness is None and _contained(dd, meet) is None
    return SymDecompositionReport(first, second, naive, witness)


def example_weak_pair_refusal(ring=None):
    """The weakly symplectic datum ``[[1,1],[1,0]]`` over Z/2 and its square."""
    from .exact_rings import IntegersMod

    ring = ring or IntegersMod(2)
    A = InvolutionAlgebra(ring, 2, Matrix(ring, [[1, 1], [1, 0]]))
    return A, tensor_product(A, A)
