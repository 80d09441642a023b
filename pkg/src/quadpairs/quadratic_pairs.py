"""Quadratic pairs on matrix algebras with an orthogonal involution.

A quadratic pair ``(sigma, f)`` is encoded by a matrix ``ell`` with
``ell + sigma(ell) = 1``; the semitrace is ``f(s) = Trd(ell * s)`` on
symmetric ``s``, and two such ``ell`` give the same ``f`` exactly when they
differ by an alternating element ``x - sigma(x)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .algebra_involution import (
    BilinearFormData,
    InvolutionAlgebra,
    QuadraticFormData,
    adjoint_involution,
    canonical_submodule_basis,
    hyperbolic_gram,
    phi_b,
)
from .exact_linalg import (
    Certificate,
    Matrix,
    SubmoduleBasis,
    Unsolvable,
    membership,
    quotient_generators,
    solve_map,
)
from .exact_rings import Ring, RingElement

__all__ = [
    "PairError",
    "Semitrace",
    "QuadraticTriple",
    "VerificationRecord",
    "Classification",
    "semitrace_from_ell",
    "verify_triple",
    "classify_semitraces_affine",
    "pair_from_quadratic_form",
    "form_from_pair",
    "f_of_identity",
    "split_algebra",
    "split_triple",
    "split_quadratic_form",
    "semitrace_equation",
]

RANDOM_CHECKS = 100


class PairError(ValueError):
    """Input violates a quadratic pair precondition."""


def semitrace_equation(A: InvolutionAlgebra):
    """The map ``ell -> ell + sigma(ell)``."""
    return A.linear_map(lambda X: X + A.sigma(X), "id + sigma")


class Semitrace:
    """The coset ``ell + Alt`` with its canonical representative at degree ``D``."""

    def __init__(self, algebra: InvolutionAlgebra, ell: Matrix, D: int | None = 0):
        residual = ell + algebra.sigma(ell) - algebra.one()
        if not residual.is_zero():
            raise PairError(f"ell + sigma(ell) - 1 = {residual.to_json()} is not zero")
        self.algebra = algebra
        self.ell = ell
        self.degree = D
        self._alt: SubmoduleBasis | None = None

    @property
    def alt(self) -> SubmoduleBasis:
        if self._alt is None:
            self._alt = canonical_submodule_basis(self.algebra, "Alt", self.degree)
        return self._alt

    @property
    def normalized(self) -> Matrix:
        return self.alt.reduce(self.ell)[0]

    def __call__(self, s: Matrix) -> RingElement:
        return (self.ell @ s).trace()

    def same_coset(self, other: "Semitrace") -> bool:
        if other.algebra != self.algebra:
            return False
        return membership(self.ell - other.ell, self.alt).member

    def __eq__(self, other):
        return isinstance(other, Semitrace) and self.same_coset(other)

    def __hash__(self):
        return hash((self.algebra, self.normalized))

    def to_json(self) -> dict:
        return {"ell": self.ell.to_json(), "normalized": self.normalized.to_json()}


@dataclass
class VerificationRecord:
    """Outcome of checking ``f(a + sigma(a)) = Trd(a)``."""

    passed: bool
    basis_checked: int = 0
    random_checked: int = 0
    failure: str | None = None
    nonzero_witness: Matrix | None = None

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "basis_checked": self.basis_checked,
            "random_checked": self.random_checked,
            "failure": self.failure,
            "nonzero_witness": self.nonzero_witness.to_json() if self.nonzero_witness is not None else None,
        }


@dataclass
class QuadraticTriple:
    algebra: InvolutionAlgebra
    semitrace: Semitrace
    record: VerificationRecord | None = None

    @property
    def ell(self) -> Matrix:
        return self.semitrace.ell

    def f(self, s: Matrix) -> RingElement:
        return self.semitrace(s)

    def to_json(self) -> dict:
        out = {"algebra": self.algebra.to_json(), **self.semitrace.to_json()}
        if self.record is not None:
            out["verification"] = self.record.to_json()
        return out


def _random_matrix(ring: Ring, n: int, rng: random.Random) -> Matrix:
    return Matrix.from_data(ring, [[ring.random(rng, 1) for _ in range(n)] for _ in range(n)])


def verify_triple(
    T: QuadraticTriple | tuple[InvolutionAlgebra, Callable[[Matrix], RingElement]],
    rng: random.Random | None = None,
    random_checks: int = RANDOM_CHECKS,
) -> VerificationRecord:
    """Check the trace axiom on every matrix unit and on random elements.

    ``T`` is a triple or a pair ``(algebra, f)`` with ``f`` any callable on
    symmetric matrices.  Also exhibits an ``a`` with ``Trd(a)`` nonzero, so
    that ``f`` is nonzero.
    """
    if isinstance(T, QuadraticTriple):
        A, f = T.algebra, T.semitrace
    else:
        A, f = T
    if not A.type.orthogonal:
        return VerificationRecord(False, failure="involution is not orthogonal")
    rng = rng or random.Random(0)
    checked = 0
    for i in range(A.n):
        for j in range(A.n):
            a = A.unit(i, j)
            lhs, rhs = f(a + A.sigma(a)), a.trace()
            checked += 1
            if lhs != rhs:
                return VerificationRecord(
                    False, checked, 0, f"E{i + 1}{j + 1}: f(a + sigma(a)) = {lhs} but Trd(a) = {rhs}"
                )
    for k in range(random_checks):
        a = _random_matrix(A.ring, A.n, rng)
        lhs, rhs = f(a + A.sigma(a)), a.trace()
        if lhs != rhs:
            return VerificationRecord(
                False, checked, k + 1, f"{a.to_json()}: f(a + sigma(a)) = {lhs} but Trd(a) = {rhs}"
            )
    witness = A.unit(0, 0)
    return VerificationRecord(True, checked, random_checks, None, witness)


def semitrace_from_ell(A: InvolutionAlgebra, ell: Matrix, D: int | None = 0) -> QuadraticTriple:
    if not A.type.orthogonal:
        raise PairError("quadratic pairs need an orthogonal involution")
    st = Semitrace(A, ell, D)
    T = QuadraticTriple(A, st)
    T.record = verify_triple(T)
    if not T.record.passed:
        raise PairError(f"triple failed verification: {T.record.failure}")
    return T


@dataclass
class Classification:
    """All semitraces on a single-ring algebra, or a certificate that none exist."""

    algebra: InvolutionAlgebra
    degree: int | None
    empty: bool
    certificate: Certificate | None = None
    particular: Matrix | None = None
    skew: SubmoduleBasis | None = None
    alt: SubmoduleBasis | None = None
    coset_generators: SubmoduleBasis | None = None
    system: object = field(default=None, repr=False)

    @property
    def status(self) -> str:
        return "EMPTY" if self.empty else "FOUND"

    def count(self) -> int | None:
        """Number of semitraces when it is finite and computable."""
        if self.empty:
            return 0
        gens = self.coset_generators
        if gens.backend[0] == "GF":
            return (2 ** gens.backend[1]) ** len(gens)
        if any(a == 0 for a in gens.annihilators):
            return None
        total = 1
        for a in gens.annihilators:
            total *= a
        return total

    def semitrace(self) -> Semitrace:
        if self.empty:
            raise PairError("no semitrace exists")
        return Semitrace(self.algebra, self.particular, self.degree)

    def to_json(self) -> dict:
        out: dict = {"status": self.status, "degree": self.degree}
        if self.empty:
            out["certificate"] = self.certificate.to_json()
            out["particular_ell"] = None
            out["coset_generators"] = []
        else:
            out["particular_ell"] = self.particular.to_json()
            out["coset_generators"] = [m.to_json() for m in self.coset_generators.matrices()]
            out["coset_annihilators"] = list(self.coset_generators.annihilators)
            out["count"] = self.count()
        return out


def classify_semitraces_affine(A: InvolutionAlgebra, D: int | None = 0) -> Classification:
    """Solve ``ell + sigma(ell) = 1`` and describe the solutions modulo Alt.

    The answer is EMPTY with a certificate that 1 is not in Symd, or a
    particular ``ell`` together with generators of ``Skew / Alt``.
    """
    if not A.type.orthogonal:
        raise PairError("quadratic pairs need an orthogonal involution")
    sol = solve_map(semitrace_equation(A), (A.one(),), D)
    if isinstance(sol, Unsolvable):
        return Classification(A, D, True, certificate=sol.certificate, system=sol.system)
    skew = sol.kernel
    alt = canonical_submodule_basis(A, "Alt", D)
    gens = quotient_generators(skew, alt)
    particular = alt.reduce(sol.particular)[0]
    return Classification(
        A, D, False, particular=particular, skew=skew, alt=alt, coset_generators=gens, system=sol.system
    )


def pair_from_quadratic_form(q: QuadraticFormData, rng: random.Random | None = None) -> QuadraticTriple:
    """The triple on ``End(R^n)`` attached to a regular quadratic form.

    The involution is adjoint to the polar form ``b`` and ``ell = b^-1 Q``, so
    that ``Trd(ell * m m^T b) = q(m)``.
    """
    b = q.polar()
    if not b.is_regular():
        raise PairError("quadratic form is not regular")
    A = adjoint_involution(b)
    ell = b.gram.inverse() @ q.coeffs
    T = semitrace_from_ell(A, ell)
    rng = rng or random.Random(0)
    vectors = [Matrix.unit(q.ring, q.rank, i, 0, 1) for i in range(q.rank)]
    vectors += [
        Matrix.from_data(q.ring, [[q.ring.random(rng, 1)] for _ in range(q.rank)]) for _ in range(RANDOM_CHECKS)
    ]
    for m in vectors:
        if T.f(phi_b(b, m, m)) != q(m):
            raise PairError(f"f_q(phi_b(m x m)) != q(m) at m = {m.T.to_json()}")
    return T


def form_from_pair(T: QuadraticTriple, b: BilinearFormData) -> QuadraticFormData:
    """``q(m) = f(phi_b(m x m))``, i.e. the coefficient matrix ``b * ell`` made upper triangular."""
    A = T.algebra
    if b.ring != A.ring or b.rank != A.n:
        raise PairError("bilinear form does not match the algebra")
    eta = adjoint_involution(b)
    if any(eta.sigma(X) != A.sigma(X) for X in A.basis()):
        raise PairError("the triple's involution is not adjoint to b")
    raw = QuadraticFormData(b.ring, b.gram @ T.ell)
    return QuadraticFormData(b.ring, raw.upper())


def f_of_identity(T: QuadraticTriple) -> RingElement:
    """``f(1) = Trd(ell)``, checked against ``n/2``."""
    A = T.algebra
    value = T.f(A.one())
    ring = A.ring
    n = A.n
    if ring.two_is_unit():
        expected = ring(n) * ring(2).inverse()
    elif n % 2 == 0:
        expected = ring(n // 2)
    else:
        raise PairError("odd degree over a ring where 2 is not a unit")
    if value != expected:
        raise PairError(f"f(1) = {value} differs from n/2 = {expected}")
    return value


def split_quadratic_form(ring: Ring, m: int) -> QuadraticFormData:
    """``x1 x2 + x3 x4 + ... + x_{2m-1} x_{2m}``."""
    n = 2 * m
    Q = Matrix.zero(ring, n)
    for k in range(m):
        Q = Q + Matrix.unit(ring, n, 2 * k, 2 * k + 1)
    return QuadraticFormData(ring, Q)


def split_algebra(ring: Ring, m: int) -> InvolutionAlgebra:
    """``M_2m`` with the involution adjoint to the hyperbolic form."""
    return InvolutionAlgebra(ring, 2 * m, hyperbolic_gram(ring, m))


def split_triple(ring: Ring, m: int) -> QuadraticTriple:
    """Split triple with ``ell = E11 + E33 + ... + E_{2m-1,2m-1}``."""
    A = split_algebra(ring, m)
    n = 2 * m
    ell = Matrix.zero(ring, n)
    for k in range(m):
        ell = ell + Matrix.unit(ring, n, 2 * k, 2 * k)
    return semitrace_from_ell(A, ell)
