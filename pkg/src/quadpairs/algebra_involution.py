"""Matrix algebras with an involution of the first kind.

An involution on ``M_n(R)`` is stored through an invertible matrix ``u``:

    sigma(X) = u^-1 X^T u,

which is the adjoint involution of the bilinear form ``b(v, w) = v^T u w``.
If ``u^T = eps * u`` the involution has type ``eps``.  Over rings of
characteristic 2 a single ``u`` can be symmetric and antisymmetric at once,
so the type is reported as a set of flags rather than a single label.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .exact_linalg import (
    LinalgError,
    LinearMap,
    Matrix,
    ModuleSpace,
    Solution,
    SubmoduleBasis,
    image,
    kernel,
    solve_map,
)
from .exact_rings import Ring, RingElement, ring_from_json

__all__ = [
    "InvolutionError",
    "InvolutionAlgebra",
    "InvolutionType",
    "BilinearFormData",
    "QuadraticFormData",
    "PairingData",
    "ConjugationResult",
    "SkolemNoetherResult",
    "adjoint_involution",
    "involution_type",
    "canonical_submodule_basis",
    "trace_pairings",
    "conjugate_involution",
    "skolem_noether_module",
    "phi_b",
    "random_unimodular",
    "random_symmetric_unit",
    "hyperbolic_gram",
    "preimage",
    "SUBMODULES",
]

SUBMODULES = ("Sym", "Alt", "Skew", "Symd")


class InvolutionError(ValueError):
    """The datum does not define an involution of the required kind."""


def _is_antisymmetric(u: Matrix) -> bool:
    return u.T == -u


def _zero_diagonal(u: Matrix) -> bool:
    return all(u.ring.is_zero(u.data[i][i]) for i in range(u.nrows))


@dataclass(frozen=True)
class InvolutionType:
    """Type flags of ``sigma = u^-1 (.)^T u``.

    ``orthogonal``: u symmetric.  ``weakly_symplectic``: u antisymmetric.
    ``symplectic``: u antisymmetric with zero diagonal, i.e. ``b(v, v) = 0``.
    """

    epsilon: int
    orthogonal: bool
    weakly_symplectic: bool
    symplectic: bool

    @property
    def label(self) -> str:
        if self.symplectic:
            return "symplectic"
        if self.weakly_symplectic and not self.orthogonal:
            return "weakly_symplectic"
        if self.orthogonal:
            return "orthogonal"
        return "weakly_symplectic"

    def tags(self) -> list[str]:
        out = []
        if self.orthogonal:
            out.append("orthogonal")
        if self.weakly_symplectic:
            out.append("weakly_symplectic")
        if self.symplectic:
            out.append("symplectic")
        return out

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "label": self.label, "tags": self.tags()}


class InvolutionAlgebra:
    """``(M_n(R), sigma)`` with ``sigma(X) = u^-1 X^T u``."""

    def __init__(self, ring: Ring, n: int, u: Matrix | None = None, u_inv: Matrix | None = None):
        if n < 1:
            raise InvolutionError("degree must be positive")
        u = Matrix.identity(ring, n) if u is None else u
        if u.ring != ring or u.shape != (n, n):
            raise InvolutionError(f"datum must be an {n}x{n} matrix over {ring}")
        if u_inv is not None:
            # a supplied inverse is checked instead of recomputed
            if u_inv.ring != ring or u @ u_inv != Matrix.identity(ring, n):
                raise InvolutionError("supplied inverse of the datum is wrong")
        else:
            try:
                u_inv = u.inverse()
            except LinalgError as exc:
                raise InvolutionError("involution datum is not invertible") from exc
        sym = u.T == u
        anti = _is_antisymmetric(u)
        if not (sym or anti):
            raise InvolutionError("datum is neither symmetric nor antisymmetric")
        self.ring = ring
        self.n = n
        self.u = u
        self.u_inv = u_inv
        self.type = InvolutionType(
            epsilon=1 if sym else -1,
            orthogonal=sym,
            weakly_symplectic=anti,
            symplectic=anti and _zero_diagonal(u),
        )
        self.space = ModuleSpace.matrices(ring, n)

    @property
    def epsilon(self) -> int:
        return self.type.epsilon

    def sigma(self, X: Matrix) -> Matrix:
        return self.u_inv @ X.T @ self.u

    def trd(self, X: Matrix) -> RingElement:
        return X.trace()

    def one(self) -> Matrix:
        return Matrix.identity(self.ring, self.n)

    def zero(self) -> Matrix:
        return Matrix.zero(self.ring, self.n)

    def unit(self, i: int, j: int) -> Matrix:
        return Matrix.unit(self.ring, self.n, i, j)

    def basis(self) -> list[Matrix]:
        return [self.unit(i, j) for i in range(self.n) for j in range(self.n)]

    def bilinear(self, v: Matrix, w: Matrix) -> RingElement:
        return (v.T @ self.u @ w)[0, 0]

    def is_symmetric(self, X: Matrix) -> bool:
        return self.sigma(X) == X

    def is_skew(self, X: Matrix) -> bool:
        return self.sigma(X) == -X

    def check_axioms(self) -> bool:
        """``sigma`` squares to the identity and reverses products on the basis."""
        basis = self.basis()
        for X in basis:
            if self.sigma(self.sigma(X)) != X:
                return False
        for X in basis:
            for Y in basis:
                if self.sigma(X @ Y) != self.sigma(Y) @ self.sigma(X):
                    return False
        return True

    def linear_map(self, fn: Callable[[Matrix], Matrix], name: str = "") -> LinearMap:
        return LinearMap(self.space, self.space, lambda v: (fn(v[0]),), name)

    def __eq__(self, other):
        return (
            isinstance(other, InvolutionAlgebra)
            and self.ring == other.ring
            and self.n == other.n
            and self.u == other.u
        )

    def __hash__(self):
        return hash((self.ring, self.n, self.u))

    def __repr__(self):
        return f"InvolutionAlgebra({self.ring}, n={self.n}, u={self.u.to_json()})"

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "n": self.n, "u": self.u.to_json()}

    @classmethod
    def from_json(cls, obj) -> "InvolutionAlgebra":
        if not isinstance(obj, dict) or not {"ring", "n", "u"} <= set(obj):
            raise InvolutionError("algebra JSON needs 'ring', 'n' and 'u'")
        ring = ring_from_json(obj["ring"])
        n = int(obj["n"])
        u = Matrix.from_json(ring, obj["u"])
        if u.shape != (n, n):
            raise InvolutionError(f"'u' must be {n}x{n}")
        return cls(ring, n, u)


@dataclass(frozen=True)
class BilinearFormData:
    """Gram matrix of ``b(v, w) = v^T G w`` on ``R^n``."""

    ring: Ring
    gram: Matrix

    @property
    def rank(self) -> int:
        return self.gram.nrows

    def is_regular(self) -> bool:
        return self.gram.is_invertible()

    def __call__(self, v: Matrix, w: Matrix) -> RingElement:
        return (v.T @ self.gram @ w)[0, 0]


@dataclass(frozen=True)
class QuadraticFormData:
    """``q(v) = v^T Q v`` with polar Gram matrix ``Q + Q^T``."""

    ring: Ring
    coeffs: Matrix

    @property
    def rank(self) -> int:
        return self.coeffs.nrows

    def polar(self) -> BilinearFormData:
        return BilinearFormData(self.ring, self.coeffs + self.coeffs.T)

    def is_regular(self) -> bool:
        return self.polar().is_regular()

    def __call__(self, v: Matrix) -> RingElement:
        return (v.T @ self.coeffs @ v)[0, 0]

    def upper(self) -> Matrix:
        """Upper triangular coefficient matrix defining the same form."""
        Q = self.coeffs
        add = self.ring.add
        z = self.ring.zero_data()
        rows = [
            [
                Q.data[i][j] if i == j else (add(Q.data[i][j], Q.data[j][i]) if i < j else z)
                for j in range(Q.ncols)
            ]
            for i in range(Q.nrows)
        ]
        return Matrix.from_data(self.ring, rows)

    def same_form(self, other: "QuadraticFormData") -> bool:
        return self.ring == other.ring and self.upper() == other.upper()


def phi_b(b: BilinearFormData, m1: Matrix, m2: Matrix) -> Matrix:
    """The endomorphism ``m -> m1 * b(m2, m)`` as a matrix, i.e. ``m1 m2^T G``."""
    return m1 @ m2.T @ b.gram


def adjoint_involution(b: BilinearFormData) -> InvolutionAlgebra:
    """The involution adjoint to a regular symmetric or antisymmetric form."""
    if not b.is_regular():
        raise InvolutionError("bilinear form is not regular")
    G = b.gram
    if not (G.T == G or _is_antisymmetric(G)):
        raise InvolutionError("bilinear form is neither symmetric nor antisymmetric")
    return InvolutionAlgebra(b.ring, b.rank, G)


def involution_type(A: InvolutionAlgebra) -> InvolutionType:
    return A.type


def canonical_submodule_basis(A: InvolutionAlgebra, which: str, D: int | None = 0) -> SubmoduleBasis:
    """Generators of Sym, Alt, Skew or Symd among elements of degree at most ``D``."""
    if which not in SUBMODULES:
        raise InvolutionError(f"unknown submodule {which!r}; expected one of {SUBMODULES}")
    if D is not None and A.ring.has_filtration():
        max_degree = getattr(A.ring, "max_degree", None) or getattr(getattr(A.ring, "base", None), "max_degree", None)
        if max_degree is not None and D > max_degree:
            raise InvolutionError(f"degree bound {D} exceeds the tracked maximum {max_degree}")
    if which == "Sym":
        return kernel(A.linear_map(lambda X: X - A.sigma(X), "id - sigma"), D)
    if which == "Skew":
        return kernel(A.linear_map(lambda X: X + A.sigma(X), "id + sigma"), D)
    if which == "Alt":
        return image(A.linear_map(lambda X: X - A.sigma(X), "id - sigma"), D)
    return image(A.linear_map(lambda X: X + A.sigma(X), "id + sigma"), D)


def preimage(A: InvolutionAlgebra, target: Matrix, sign: int, D: int | None = 0) -> Matrix | None:
    """Some ``x`` with ``x + sign * sigma(x) = target``, or None."""
    lin = A.linear_map(lambda X: X + A.sigma(X).scale(sign))
    sol = solve_map(lin, (target,), D, want_kernel=False)
    return sol.particular[0] if isinstance(sol, Solution) else None


@dataclass
class PairingData:
    """Gram matrices of the trace pairings on Symd and Alt generators."""

    symd: SubmoduleBasis
    alt: SubmoduleBasis
    b_plus: Matrix | None
    b_minus: Matrix | None
    b_plus_regular: bool | None
    b_minus_regular: bool | None

    def to_json(self) -> dict:
        return {
            "symd_generators": [m.to_json() for m in self.symd.matrices()],
            "alt_generators": [m.to_json() for m in self.alt.matrices()],
            "b_plus": self.b_plus.to_json() if self.b_plus else [],
            "b_minus": self.b_minus.to_json() if self.b_minus else [],
            "b_plus_regular": self.b_plus_regular,
            "b_minus_regular": self.b_minus_regular,
        }


def _pairing_gram(A: InvolutionAlgebra, gens: list[Matrix], sign: int, D) -> Matrix | None:
    if not gens:
        return None
    pre = []
    for g in gens:
        x = preimage(A, g, sign, D)
        if x is None:
            raise LinalgError("generator has no preimage; flattening degree too small")
        pre.append(x)
    rows = [[(s @ y).trace() for y in pre] for s in gens]
    return Matrix(A.ring, rows)


def trace_pairings(A: InvolutionAlgebra, D: int | None = 0) -> PairingData:
    """``b+(x+sx, y+sy) = Trd((x+sx) y)`` on Symd and ``b-(x-sx, y-sy) = Trd((x-sx) y)`` on Alt.

    Regularity of each Gram matrix is decided by a unit determinant.
    """
    if not A.type.orthogonal:
        raise InvolutionError("trace pairings need an orthogonal involution")
    symd = canonical_submodule_basis(A, "Symd", D)
    alt = canonical_submodule_basis(A, "Alt", D)
    bp = _pairing_gram(A, symd.matrices(), +1, D)
    bm = _pairing_gram(A, alt.matrices(), -1, D)
    return PairingData(
        symd,
        alt,
        bp,
        bm,
        None if bp is None else bp.is_invertible(),
        None if bm is None else bm.is_invertible(),
    )


@dataclass(frozen=True)
class ConjugationResult:
    """``Inn(w) o sigma`` and whether ``w`` is sigma-symmetric."""

    algebra: InvolutionAlgebra
    w_symmetric: bool

    @property
    def same_type(self) -> bool:
        return self.w_symmetric

    @property
    def orthogonal(self) -> bool:
        return self.algebra.type.orthogonal


def conjugate_involution(A: InvolutionAlgebra, w: Matrix) -> ConjugationResult:
    """``X -> w sigma(X) w^-1``, the involution with datum ``u w^-1``."""
    if not w.is_invertible():
        raise InvolutionError("conjugating matrix is not invertible")
    new = InvolutionAlgebra(A.ring, A.n, A.u @ w.inverse())
    return ConjugationResult(new, A.sigma(w) == w)


@dataclass
class SkolemNoetherResult:
    """``I_phi = {x : phi(a) x = x a}`` and, if it is free on an invertible generator, that generator."""

    module: SubmoduleBasis
    free_rank_one: bool
    generator: Matrix | None

    def to_json(self) -> dict:
        return {
            "generators": [m.to_json() for m in self.module.matrices()],
            "free_rank_one": self.free_rank_one,
            "generator": self.generator.to_json() if self.generator is not None else None,
        }


def _images_of_basis(A_ring: Ring, n: int, phi) -> Callable[[int, int], Matrix]:
    if isinstance(phi, Matrix):
        v, v_inv = phi, phi.inverse()
        return lambda i, j: v @ Matrix.unit(A_ring, n, i, j) @ v_inv
    if callable(phi):
        return lambda i, j: phi(Matrix.unit(A_ring, n, i, j))
    table = phi
    return lambda i, j: table[i][j]


def skolem_noether_module(ring: Ring, n: int, phi, D: int | None = 0) -> SkolemNoetherResult:
    """Module ``I_phi`` for an automorphism ``phi`` of ``M_n(ring)``.

    ``phi`` is an invertible matrix ``v`` (meaning ``Inn(v)``), a callable on
    matrices, or an ``n x n`` table of the images of the units ``E_ij``.
    """
    img = _images_of_basis(ring, n, phi)
    units = [(i, j) for i in range(n) for j in range(n)]
    images = {(i, j): img(i, j) for i, j in units}
    # multiplicativity on the basis: E_ij E_kl = delta_jk E_il
    for i, j in units:
        for k, l in units:
            lhs = images[(i, j)] @ images[(k, l)]
            rhs = images[(i, l)] if j == k else Matrix.zero(ring, n)
            if lhs != rhs:
                raise InvolutionError("map is not multiplicative on the matrix units")
    if sum((images[(i, i)] for i in range(n)), Matrix.zero(ring, n)) != Matrix.identity(ring, n):
        raise InvolutionError("map does not preserve the identity")
    space = ModuleSpace.matrices(ring, n)
    cod = ModuleSpace([(ring, n, n)] * len(units))

    def constraints(v):
        x = v[0]
        return tuple(images[(i, j)] @ x - x @ Matrix.unit(ring, n, i, j) for i, j in units)

    module = kernel(LinearMap(space, cod, constraints, "Skolem-Noether"), D)
    gens = module.matrices()
    generator = None
    for g in gens:
        if not g.is_invertible():
            continue
        g_inv = g.inverse()
        if all(_is_scalar(g_inv @ h) for h in gens):
            generator = g
            break
    free = generator is not None and (module.is_free() or module.backend[0] == "GF")
    return SkolemNoetherResult(module, free, generator if free else None)


def _is_scalar(M: Matrix) -> bool:
    c = M.data[0][0]
    return all(M.data[i][j] == (c if i == j else M.ring.zero_data()) for i in range(M.nrows) for j in range(M.ncols))


def hyperbolic_gram(ring: Ring, m: int) -> Matrix:
    """Block diagonal sum of ``m`` copies of ``[[0, 1], [1, 0]]``."""
    h = Matrix(ring, [[0, 1], [1, 0]])
    return Matrix.block_diagonal([h] * m)


def random_unimodular(ring: Ring, n: int, rng: random.Random, steps: int | None = None) -> Matrix:
    """Product of random elementary matrices (always invertible)."""
    M = Matrix.identity(ring, n)
    if n == 1:
        return M
    steps = 3 * n if steps is None else steps
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = ring.element(ring.random(rng, 0)) if ring.is_finite() else ring(rng.randint(-2, 2))
        E = Matrix.identity(ring, n) + Matrix.unit(ring, n, i, j, coeff=c)
        M = E @ M
    return M


def random_symmetric_unit(ring: Ring, n: int, rng: random.Random) -> Matrix:
    """``g * D * g^T`` for a random unimodular ``g``.

    ``D`` is a block sum of entries ``+-1`` and hyperbolic blocks ``[[0,1],[1,0]]``;
    the hyperbolic blocks give the alternating forms a diagonal ``D`` misses in
    characteristic 2.
    """
    g = random_unimodular(ring, n, rng)
    d = Matrix.zero(ring, n)
    i = 0
    while i < n:
        if i + 1 < n and rng.random() < 0.5:
            d = d + Matrix.unit(ring, n, i, i + 1) + Matrix.unit(ring, n, i + 1, i)
            i += 2
        else:
            d = d + Matrix.unit(ring, n, i, i, coeff=ring(rng.choice([1, -1])))
            i += 1
    return g @ d @ g.T
