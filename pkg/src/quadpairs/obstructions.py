"""Strong and weak obstructions with verdicts that re-verify.

The strong representative of chart lifts ``ell_i`` is the Skew-valued cochain
``res_j ell_j - phi(res_i ell_i)``; it is trivial exactly when the lifts can be
corrected by chart Skew sections to glue, which yields a global ``ell`` with
``ell + sigma(ell) = 1``.  The weak obstruction allows an extra Alt term on
every overlap.  Verdicts are TRIVIAL (with a glued witness), NONTRIVIAL (with
a functional that vanishes on every coboundary generator but not on the
representative) or UNKNOWN at the degree bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .algebra_involution import InvolutionAlgebra, canonical_submodule_basis, preimage
from .descent_cech import (
    CechCochain,
    CoverPresentation,
    DescentError,
    GluingDatum,
    Overlap,
    SearchResult,
    _alt_basis,
    coboundary,
    cohomologous_search,
    connecting_delta,
    descend_involution_check,
    descend_semitrace_check,
    global_sections,
    is_exact,
    random_homogeneous_samples,
    vector_degree,
)
from .exact_linalg import (
    Certificate,
    LinearMap,
    Matrix,
    ModuleSpace,
    kernel,
    membership,
    solve_combination,
    span,
)
from .exact_rings import GaloisField, Product, Ring, RingHom
from .quadratic_pairs import classify_semitraces_affine

__all__ = [
    "TRIVIAL",
    "NONTRIVIAL",
    "UNKNOWN",
    "ObstructionError",
    "LocallyQuadraticResult",
    "NontrivialityCertificate",
    "CriterionRecord",
    "ObstructionReport",
    "EquivariantFormSpace",
    "AlternateComparison",
    "CupCheck",
    "locally_quadratic_check",
    "strong_obstruction",
    "weak_obstruction",
    "weak_obstruction_from_forms",
    "scalar_sections_criterion",
    "doubled_representative_witness",
    "equivariant_form_space",
    "coinvariants_dimension",
    "pgl2_elements",
    "group_closure",
    "group_cover",
    "alternate_obstruction_cocycles",
    "tensor_gluing",
    "cup_formula_check",
]

TRIVIAL = "TRIVIAL"
NONTRIVIAL = "NONTRIVIAL"
UNKNOWN = "UNKNOWN"


class ObstructionError(ValueError):
    """The involution is not locally quadratic, or a precondition fails."""


# ---------------------------------------------------------------------------
# Local lifts
# ---------------------------------------------------------------------------


@dataclass
class LocallyQuadraticResult:
    ok: bool
    ell: list[Matrix] | None
    failures: dict = field(default_factory=dict)  # chart -> Certificate

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {
            "locally_quadratic": self.ok,
            "ell": [m.to_json() for m in self.ell] if self.ell else None,
            "failures": {str(i + 1): c.to_json() for i, c in self.failures.items()},
        }


def locally_quadratic_check(G: GluingDatum, u: list[Matrix] | None = None, D: int | None = 0) -> LocallyQuadraticResult:
    """Solve ``ell + sigma(ell) = 1`` chart by chart."""
    if u is not None:
        G = G.with_data(u=u)
    if not descend_involution_check(G):
        raise ObstructionError("the involution does not descend along the gluing")
    ells, failures = [], {}
    for i in range(len(G.cover.charts)):
        cl = classify_semitraces_affine(G.chart_algebra(i), D)
        if cl.empty:
            failures[i] = cl.certificate
            ells.append(None)
        else:
            ells.append(cl.particular)
    if failures:
        return LocallyQuadraticResult(False, None, failures)
    return LocallyQuadraticResult(True, ells)


def _lifts(G: GluingDatum, D, ell) -> list[Matrix]:
    ell = ell if ell is not None else G.ell
    if ell is not None:
        if not descend_involution_check(G):
            raise ObstructionError("the involution does not descend along the gluing")
        return list(ell)
    lq = locally_quadratic_check(G, D=D)
    if not lq.ok:
        raise ObstructionError(
            "not locally quadratic: no ell with ell + sigma(ell) = 1 on chart(s) "
            + ", ".join(str(i + 1) for i in lq.failures)
        )
    return lq.ell


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


@dataclass
class NontrivialityCertificate:
    """A functional on the overlap coordinates that kills every coboundary generator.

    ``degree`` is the coordinate degree the functional lives in (None when
    the flattening is exact and no grading is needed).  ``generators`` are
    the images of the admissible generators at that degree; ``relations``
    are the additive orders of the coordinates in the functional.
    """

    space: ModuleSpace
    functional: dict
    modulus: int
    value: int
    degree: int | None
    generators: list[dict]
    representative: dict
    exact: bool

    @property
    def backend(self):
        return self.space.backend

    def _certificate(self) -> Certificate:
        return Certificate(self.backend, self.functional, self.modulus, self.value)

    def evaluate(self, coords: dict) -> int:
        return self._certificate().evaluate(coords)

    def verify(self) -> bool:
        for g in self.generators:
            if self.evaluate(g) != 0:
                return False
        if self.backend[0] == "Z":
            for c, k in self.functional.items():
                mod = self.space.modulus(c)
                if mod and self.modulus and (k * mod) % self.modulus:
                    return False
                if mod and not self.modulus:
                    return False
        if self.degree is not None and any(self.space.key_degree(c) != self.degree for c in self.functional):
            return False
        value = self.evaluate(self.representative)
        return value != 0 and value == self.value

    def spot_check(self, G: GluingDatum, D: int | None, modulo_alt: bool, samples: int = 20) -> bool:
        """Random degree-``d`` coboundaries built without the grading are killed too."""
        if self.degree is None:
            return True
        for img in random_homogeneous_samples(G, self.degree, D, modulo_alt, samples):
            if self.evaluate(img) != 0:
                return False
        return True

    @property
    def position(self) -> tuple[int, int] | None:
        if len(self.functional) != 1:
            return None
        (_, i, j, _), = self.functional
        return (i + 1, j + 1)

    def to_json(self) -> dict:
        out = {
            "position": list(self.position) if self.position else None,
            "degree": self.degree,
            "modulus": self.modulus,
            "value": self.value,
            "functional": self._certificate().to_json()["functional"],
            "generator_count": len(self.generators),
            "exact": self.exact,
        }
        if len(self.functional) == 1:
            (k, _, _, _), = self.functional
            out["overlap"] = k + 1
        return out


def _certificate_from_search(c: CechCochain, res: SearchResult, D: int | None) -> NontrivialityCertificate | None:
    """Promote a solver certificate to a nontriviality certificate when it is complete."""
    if res.certificate is None:
        return None
    cod = c.gluing.overlap_space()
    cert = res.certificate
    rep = cod.coords_of(c.values)
    if res.exact:
        gens = [g.image for g in res.generators]
        return NontrivialityCertificate(cod, cert.functional, cert.modulus, cert.value, None, gens, rep, True)
    if not res.graded:
        return None
    degrees = {cod.key_degree(x) for x in cert.functional}
    if len(degrees) != 1:
        return None
    d = degrees.pop()
    if D is None or abs(d) > D:
        return None
    gens = [g.image for g in res.generators if g.degree == d]
    nc = NontrivialityCertificate(cod, cert.functional, cert.modulus, cert.value, d, gens, rep, False)
    return nc if nc.verify() else None


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class CriterionRecord:
    """Global sections are the scalar ones and 2 = 0 on every chart."""

    holds: bool
    algebra_sections: int
    scalar_sections: int
    characteristic_two: bool
    exact: bool

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "algebra_sections": self.algebra_sections,
            "scalar_sections": self.scalar_sections,
            "characteristic_two": self.characteristic_two,
            "exact": self.exact,
        }


@dataclass
class ObstructionReport:
    kind: str  # "strong" or "weak"
    gluing: GluingDatum
    representative: CechCochain
    verdict: str
    degree: int | None
    reason: str = ""
    witness: list[Matrix] | None = None
    witness_alt: list[Matrix] | None = None
    certificate: NontrivialityCertificate | None = None
    criterion: CriterionRecord | None = None
    forms: "EquivariantFormSpace | None" = None
    lifts: list[Matrix] | None = None
    search: SearchResult | None = None

    @property
    def label(self) -> str:
        return f"UNKNOWN({self.degree})" if self.verdict == UNKNOWN else self.verdict

    def verify(self) -> bool:
        G = self.gluing
        if self.verdict == TRIVIAL:
            if self.witness is None:
                return False
            for i, L in enumerate(self.witness):
                A = G.chart_algebra(i)
                if L + A.sigma(L) != A.one():
                    return False
            d = coboundary(G, self.witness)
            if self.kind == "strong":
                return d.is_zero()
            for k, m in enumerate(d.values):
                if not m.is_zero() and not membership(m, _alt_at(G, k, m)).member:
                    return False
            return True
        if self.verdict == NONTRIVIAL:
            if self.certificate is not None and not self.certificate.verify():
                return False
            if self.criterion is not None and not self.criterion.holds:
                return False
            if self.forms is not None and not (self.forms.verify() and self.forms.dimension == 0):
                return False
            return any(x is not None for x in (self.certificate, self.criterion, self.forms))
        return True

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "verdict": self.label,
            "degree": self.degree,
            "reason": self.reason,
            "representative": self.representative.to_json() if self.representative is not None else None,
        }
        if self.verdict == TRIVIAL:
            out["witness"] = [m.to_json() for m in self.witness]
            if self.witness_alt is not None:
                out["witness_alt"] = [m.to_json() for m in self.witness_alt]
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.criterion is not None:
            out["criterion"] = self.criterion.to_json()
        if self.forms is not None:
            out["forms"] = self.forms.to_json()
        return out


def _alt_at(G: GluingDatum, k: int, m: Matrix):
    A = G.overlap_algebra(k)
    deg = vector_degree(A.space, A.space.coords_of(m)) if A.ring.has_filtration() else None
    return _alt_basis(G, k, deg)


def _two_is_zero(R: Ring) -> bool:
    return R.from_int(2) == R.zero_data()


def scalar_sections_criterion(G: GluingDatum, D: int | None = 0) -> CriterionRecord:
    """Global sections equal the scalar ones and 2 = 0: then no global ``ell`` exists.

    A global ``ell`` would be a scalar ``s`` with ``ell + sigma(ell) = 2s = 0``,
    never 1.  Only decisive when every ring is unfiltered, so the sections
    computed are all the sections.
    """
    exact = is_exact(G)
    AS = global_sections(G, D)
    ones = GluingDatum(G.cover, 1, [Matrix.identity(ov.ring, 1) for ov in G.overlaps])
    OS = global_sections(ones, D)
    scalar = True
    for vec in AS.vectors():
        for M in vec:
            c = M.data[0][0]
            if M != Matrix.scalar(M.ring, M.nrows, c):
                scalar = False
        if scalar:
            family = tuple(Matrix(M.ring, [[M.ring.element(M.data[0][0])]]) for M in vec)
            if not membership(family, OS).member:
                scalar = False
    char2 = all(_two_is_zero(R) for R in G.cover.charts)
    same = scalar and len(AS) == len(OS) and AS.annihilators == OS.annihilators
    return CriterionRecord(exact and same and char2, len(AS), len(OS), char2, exact)


def strong_obstruction(
    G: GluingDatum, u: list[Matrix] | None = None, D: int | None = 0, ell: list[Matrix] | None = None
) -> ObstructionReport:
    """Decide whether the chart lifts can be corrected within Skew to glue."""
    if u is not None:
        G = G.with_data(u=u)
    ells = _lifts(G, D, ell)
    c = connecting_delta(G, ells)
    res = cohomologous_search(c, D, modulo_alt=False)
    criterion = scalar_sections_criterion(G, D) if is_exact(G) else None
    if res.found:
        if criterion is not None and criterion.holds:
            raise ObstructionError("internal error: criterion and witness disagree")
        witness = [L - h for L, h in zip(ells, res.h)]
        rep = ObstructionReport("strong", G, c, TRIVIAL, D, "witness", witness, lifts=ells, search=res)
    else:
        cert = _certificate_from_search(c, res, D)
        if criterion is not None and criterion.holds:
            rep = ObstructionReport(
                "strong", G, c, NONTRIVIAL, D, "criterion", certificate=cert, criterion=criterion, lifts=ells, search=res
            )
        elif cert is not None:
            rep = ObstructionReport("strong", G, c, NONTRIVIAL, D, "certificate", certificate=cert, lifts=ells, search=res)
        else:
            rep = ObstructionReport("strong", G, c, UNKNOWN, D, "no witness at this degree", lifts=ells, search=res)
    if not rep.verify():
        raise ObstructionError("internal error: strong obstruction report failed to verify")
    return rep


def weak_obstruction(
    G: GluingDatum, u: list[Matrix] | None = None, D: int | None = 0, ell: list[Matrix] | None = None
) -> ObstructionReport:
    """Decide whether the chart lifts can be corrected so all differences are alternating."""
    if u is not None:
        G = G.with_data(u=u)
    ells = _lifts(G, D, ell)
    c = connecting_delta(G, ells)
    reduced = c.reduced(D)
    res = cohomologous_search(c, D, modulo_alt=True)
    if res.found:
        witness = [L - h for L, h in zip(ells, res.h)]
        rep = ObstructionReport(
            "weak", G, reduced, TRIVIAL, D, "witness", witness, res.alt_part, lifts=ells, search=res
        )
    else:
        cert = _certificate_from_search(c, res, D)
        if cert is not None:
            rep = ObstructionReport("weak", G, reduced, NONTRIVIAL, D, "certificate", certificate=cert, lifts=ells, search=res)
        else:
            rep = ObstructionReport("weak", G, reduced, UNKNOWN, D, "no witness at this degree", lifts=ells, search=res)
    if not rep.verify():
        raise ObstructionError("internal error: weak obstruction report failed to verify")
    return rep


def doubled_representative_witness(G: GluingDatum, ell: list[Matrix] | None = None) -> list[Matrix]:
    """``h_i = ell_i - sigma(ell_i)``: then ``d(h) = 2c`` because 1 glues."""
    ells = ell if ell is not None else G.ell
    c = connecting_delta(G, ells)
    h = [L - G.chart_algebra(i).sigma(L) for i, L in enumerate(ells)]
    if coboundary(G, h).values != c.scale(2).values:
        raise ObstructionError("doubled representative is not the coboundary of ell - sigma(ell)")
    return h


# ---------------------------------------------------------------------------
# Equivariant forms and coinvariants
# ---------------------------------------------------------------------------


@dataclass
class EquivariantFormSpace:
    """Linear forms on Sym invariant under conjugation by each generator.

    Forms are recorded by their values on ``sym_basis``.
    """

    algebra: InvolutionAlgebra
    generators: list[Matrix]
    sym_basis: list[Matrix]
    forms: list[list]  # each a list of ring elements, one per basis element

    @property
    def dimension(self) -> int:
        return len(self.forms)

    def evaluate(self, form: list, s: Matrix):
        coeffs = _sym_coordinates(self.algebra, self.sym_basis, s)
        R = self.algebra.ring
        acc = R.zero()
        for a, b in zip(form, coeffs):
            acc = acc + a * b
        return acc

    def verify(self) -> bool:
        """Each form is invariant on the basis, and re-solving gives the same dimension."""
        for f in self.forms:
            for g in self.generators:
                gi = g.inverse()
                for s in self.sym_basis:
                    if self.evaluate(f, g @ s @ gi) != self.evaluate(f, s):
                        return False
        again = equivariant_form_space(self.generators, self.algebra, verify=False)
        return again.dimension == self.dimension

    def to_json(self) -> dict:
        return {
            "generators": [g.to_json() for g in self.generators],
            "sym_basis": [s.to_json() for s in self.sym_basis],
            "forms": [[str(x) for x in f] for f in self.forms],
            "dimension": self.dimension,
        }


def _sym_coordinates(A: InvolutionAlgebra, basis: list[Matrix], s: Matrix) -> list:
    if A.sigma(s) != s:
        raise ObstructionError("element is not symmetric")
    return _solve_in_basis(A, basis, s)


def _solve_in_basis(A: InvolutionAlgebra, basis: list[Matrix], s: Matrix) -> list:
    sp = A.space
    res = solve_combination(sp, [sp.coords_of(b) for b in basis], sp.coords_of(s))
    if not res.solvable:
        raise ObstructionError("element is not in the span of the basis")
    R = A.ring
    return [R.element(_scalar(R, t)) for t in res.coefficients]


def _scalar(R: Ring, t: int):
    if isinstance(R, GaloisField):
        return R.canon(t)
    return R.from_int(t)


def equivariant_form_space(generators: list[Matrix], A: InvolutionAlgebra, verify: bool = True) -> EquivariantFormSpace:
    """Forms ``f`` on Sym with ``f(g s g^-1) = f(s)`` for every generator and basis ``s``."""
    R = A.ring
    sym = canonical_submodule_basis(A, "Sym", None).matrices()
    m = len(sym)
    rows = []  # each row: coefficients on f(basis_t) of f(g s g^-1) - f(s)
    for g in generators:
        gi = g.inverse()
        for idx, s in enumerate(sym):
            conj = g @ s @ gi
            if A.sigma(conj) != conj:
                raise ObstructionError("conjugation by a generator does not preserve Sym")
            coeffs = _solve_in_basis(A, sym, conj)
            coeffs[idx] = coeffs[idx] - R.one()
            rows.append(coeffs)
    dom = ModuleSpace.matrices(R, m, 1)
    cod = ModuleSpace.matrices(R, max(len(rows), 1), 1)

    def fn(v):
        f = v[0]
        vals = []
        for row in rows:
            acc = R.zero()
            for a, k in zip(row, range(m)):
                acc = acc + a * R.element(f.data[k][0])
            vals.append([acc])
        if not vals:
            vals = [[R.zero()]]
        return (Matrix(R, vals),)

    K = kernel(LinearMap(dom, cod, fn, "equivariance defect"), None)
    forms = [[R.element(M.data[k][0]) for k in range(m)] for M in K.matrices()]
    out = EquivariantFormSpace(A, list(generators), sym, forms)
    if verify and not out.verify():
        raise ObstructionError("internal error: equivariant forms failed to verify")
    return out


def coinvariants_dimension(generators: list[Matrix], n: int, ring: Ring | None = None) -> int:
    """Dimension of ``M_n / span{g B g^-1 - B}`` over a finite field."""
    ring = ring or (generators[0].ring if generators else GaloisField(2))
    space = ModuleSpace.matrices(ring, n)
    basis = [Matrix.unit(ring, n, i, j) for i in range(n) for j in range(n)]
    vecs = []
    for g in generators:
        gi = g.inverse()
        vecs.extend(g @ B @ gi - B for B in basis)
    return n * n - len(span(space, vecs))


def pgl2_elements(field: GaloisField | None = None) -> list[Matrix]:
    """Representatives of ``PGL_2`` over a finite field, scaled so the first nonzero entry is 1."""
    F = field or GaloisField(2)
    elems = [F.element(x) for x in F.elements()]
    out = []
    for a, b, c, d in itertools.product(elems, repeat=4):
        first = next((x for x in (a, b, c, d) if not x.is_zero()), None)
        if first is None or first != F.one():
            continue
        M = Matrix(F, [[a, b], [c, d]])
        if not M.det().is_zero():
            out.append(M)
    return out


def _projective_key(M: Matrix):
    first = next(x for row in M.data for x in row if x != M.ring.zero_data())
    inv = M.ring.inverse(first)
    return M.scale(M.ring.element(inv))


def group_closure(generators: list[Matrix]) -> list[Matrix]:
    """All products of the generators, up to scalars."""
    ident = _projective_key(Matrix.identity(generators[0].ring, generators[0].nrows))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for M in frontier:
            for g in generators:
                P = _projective_key(M @ g)
                if P not in seen:
                    seen.add(P)
                    nxt.append(P)
        frontier = nxt
    return sorted(seen, key=lambda M: M.to_json())


def group_cover(ring: Ring, elements: list[Matrix], u: Matrix, ell: Matrix | None = None) -> GluingDatum:
    """One chart and one overlap ``ring^|elements|``; component ``g`` glues by ``Inn(g)``."""
    N = len(elements)
    R = Product([ring] * N)
    diag = RingHom(ring, R, {k: "(" + ", ".join([ring.format(v)] * N) + ")" for k, v in _generator_values(ring).items()})
    cover = CoverPresentation((ring,), (Overlap(0, 0, R, diag, diag),))
    n = u.nrows
    inv = [g.inverse() for g in elements]

    def glue(mats):
        return Matrix.from_data(R, [[tuple(M.data[a][b] for M in mats) for b in range(n)] for a in range(n)])

    return GluingDatum(cover, n, [glue(elements)], [glue(inv)], u=[u], ell=[ell] if ell is not None else None)


def _generator_values(ring: Ring) -> dict:
    if isinstance(ring, GaloisField) and ring.m > 1:
        return {"w": ring.canon(2)}
    return {}


def weak_obstruction_from_forms(G: GluingDatum, forms: EquivariantFormSpace) -> ObstructionReport:
    """NONTRIVIAL when the only invariant form on Sym is zero.

    A semitrace satisfies ``f(a + sigma(a)) = Trd(a)``, so ``f(E11 + sigma(E11)) = 1``
    and ``f`` is nonzero; a zero form space leaves no candidate.
    """
    if forms.dimension != 0:
        raise ObstructionError("invariant forms exist; this route decides nothing")
    A = forms.algebra
    E = A.unit(0, 0)
    if E.trace() != A.ring.one():
        raise ObstructionError("Trd(E11) is not 1")
    rep = ObstructionReport("weak", G, None, NONTRIVIAL, None, "no invariant form on Sym", forms=forms)
    if not rep.verify():
        raise ObstructionError("internal error: form space failed to verify")
    return rep


# ---------------------------------------------------------------------------
# Alternate obstructions
# ---------------------------------------------------------------------------


@dataclass
class AlternateComparison:
    c: CechCochain  # Alt-valued
    c_prime: list[list]  # per overlap, values on the Alt basis
    b_minus: list[list]  # per overlap, b_-(c, x) on the Alt basis
    alt_bases: list[list[Matrix]]
    pairing_agrees: bool
    skew_image_agrees: bool

    @property
    def holds(self) -> bool:
        return self.pairing_agrees and self.skew_image_agrees

    def to_json(self) -> dict:
        return {
            "c": self.c.to_json(),
            "c_prime": [[str(x) for x in row] for row in self.c_prime],
            "b_minus": [[str(x) for x in row] for row in self.b_minus],
            "pairing_agrees": self.pairing_agrees,
            "skew_image_agrees": self.skew_image_agrees,
        }


def alternate_obstruction_cocycles(G: GluingDatum, ell: list[Matrix] | None = None, D: int | None = 0) -> AlternateComparison:
    """Compare the Alt-valued cocycle ``c(f)`` with the dual cocycle ``c'(f)``.

    ``c'(f)`` on an overlap is ``x -> Trd(ell_j x') - Trd(phi(ell_i) x')`` where
    ``x' - sigma(x') = x``; the pairing is ``b_-(c, x) = Trd(x z)`` where
    ``z - sigma(z) = c``.  Both preimages are solved for independently.
    """
    ells = ell if ell is not None else G.ell
    checks = descend_semitrace_check(G, ells, D)
    if not all(ch.glues for ch in checks):
        raise ObstructionError("chart lifts do not glue modulo Alt")
    c = CechCochain(G, tuple(-ch.residual for ch in checks), "Alt")
    c_prime, b_minus, bases = [], [], []
    agree = True
    for k, ov in enumerate(G.overlaps):
        A = G.overlap_algebra(k)
        basis = _alt_basis(G, k, D).matrices()
        bases.append(basis)
        lj = G.restrict_j(k, ells[ov.j])
        li = G.glue(k, ells[ov.i])
        z = preimage(A, c.values[k], -1, D)
        if z is None:
            raise ObstructionError(f"overlap {k + 1}: c is not alternating at degree {D}")
        row_c, row_b = [], []
        for x in basis:
            xp = preimage(A, x, -1, D)
            row_c.append((lj @ xp).trace() - (li @ xp).trace())
            row_b.append((x @ z).trace())
        c_prime.append(row_c)
        b_minus.append(row_b)
        agree = agree and row_c == row_b
    strong = connecting_delta(G, ells)
    return AlternateComparison(c, c_prime, b_minus, bases, agree, strong.values == c.values)


# ---------------------------------------------------------------------------
# Tensor products of gluing data
# ---------------------------------------------------------------------------


def tensor_gluing(G1: GluingDatum, G2: GluingDatum) -> GluingDatum:
    """The gluing ``v1 (x) v2`` over a shared cover, with lifts ``ell_i (x) 1``."""
    if G1.cover != G2.cover:
        raise DescentError("tensor products need a common cover")
    v = [a.kron(b) for a, b in zip(G1.v, G2.v)]
    vi = [a.kron(b) for a, b in zip(G1.v_inv, G2.v_inv)]
    u = None
    if G1.u is not None and G2.u is not None:
        u = [a.kron(b) for a, b in zip(G1.u, G2.u)]
    ell = None
    if G1.ell is not None:
        ell = [L.kron(Matrix.identity(R, G2.n)) for L, R in zip(G1.ell, G1.cover.charts)]
    return GluingDatum(G1.cover, G1.n * G2.n, v, vi, u, ell)


@dataclass
class CupCheck:
    holds: bool
    first: CechCochain
    product: CechCochain

    def to_json(self) -> dict:
        return {"holds": self.holds, "first": self.first.to_json(), "product": self.product.to_json()}


def cup_formula_check(G1: GluingDatum, G2: GluingDatum) -> CupCheck:
    """With lifts ``ell_i (x) 1`` the product representative is ``c1 (x) 1`` entrywise."""
    first = connecting_delta(G1)
    T = tensor_gluing(G1, G2)
    product = connecting_delta(T)
    expected = tuple(m.kron(Matrix.identity(m.ring, G2.n)) for m in first.values)
    return CupCheck(product.values == expected, first, product)
