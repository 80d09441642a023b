"""Finite covers, inner gluing data and Cech 1-cochains.

A cover lists chart rings ``R_i`` and overlap rings ``R_ij`` with restriction
homs ``res_i: R_i -> R_ij`` and ``res_j: R_j -> R_ij``.  A gluing datum gives
an invertible ``v_ij`` over each overlap; the twisted algebra has sections
``(B_i)`` with ``v res_i(B_i) v^-1 = res_j(B_j)`` on every overlap.

Cochains are overlap-indexed matrices.  The sign convention for a family of
chart sections ``(h_i)`` is ``d(h)_ij = res_j(h_j) - phi(res_i(h_i))``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .algebra_involution import InvolutionAlgebra
from .exact_linalg import (
    Certificate,
    FlatSystem,
    LinalgError,
    LinearMap,
    Matrix,
    ModuleSpace,
    Slot,
    SubmoduleBasis,
    _gf_tables,
    image,
    kernel,
    membership,
    solve_combination,
)
from .exact_rings import (
    GaloisField,
    Integers,
    IntegersMod,
    Product,
    Quotient,
    Ring,
    RingHom,
    _Monomials,
    ring_from_json,
)

__all__ = [
    "DescentError",
    "Overlap",
    "CoverPresentation",
    "GluingDatum",
    "CechCochain",
    "OverlapCheck",
    "SearchResult",
    "load_cover",
    "global_sections",
    "descend_involution_check",
    "descend_semitrace_check",
    "connecting_delta",
    "coboundary",
    "cohomologous_search",
    "is_graded",
    "is_exact",
    "ring_is_graded",
    "homogeneous_part",
    "vector_degree",
]

VALUE_TAGS = ("Skew", "Alt", "Skew/Alt", "full")


class DescentError(ValueError):
    """Cover or gluing data that does not type-check, or a failed precondition."""


# ---------------------------------------------------------------------------
# Covers and gluing data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Overlap:
    i: int
    j: int
    ring: Ring
    res_i: RingHom
    res_j: RingHom


@dataclass(frozen=True)
class CoverPresentation:
    charts: tuple[Ring, ...]
    overlaps: tuple[Overlap, ...]

    def __post_init__(self):
        for k, ov in enumerate(self.overlaps):
            if not (0 <= ov.i < len(self.charts) and 0 <= ov.j < len(self.charts)):
                raise DescentError(f"overlap {k} refers to a missing chart")
            if ov.res_i.source != self.charts[ov.i] or ov.res_i.target != ov.ring:
                raise DescentError(f"overlap {k}: res_i must map chart {ov.i} to the overlap ring")
            if ov.res_j.source != self.charts[ov.j] or ov.res_j.target != ov.ring:
                raise DescentError(f"overlap {k}: res_j must map chart {ov.j} to the overlap ring")
        backends = {r.backend for r in self.charts} | {ov.ring.backend for ov in self.overlaps}
        if len(backends) != 1:
            raise DescentError("all chart and overlap rings must share a coordinate backend")

    @property
    def backend(self):
        return self.charts[0].backend


class GluingDatum:
    """Overlap matrices ``v_ij`` (so ``phi_ij = Inn(v_ij)``) and optional chart data.

    ``u`` holds one involution datum per chart and ``ell`` one lift per chart;
    both are optional.  Only two-chart-style data is supported: the cocycle
    condition needs triple overlaps, so ``cocycle_status`` is ``ASSERTED``.
    """

    cocycle_status = "ASSERTED"

    def __init__(
        self,
        cover: CoverPresentation,
        n: int,
        v: list[Matrix],
        v_inv: list[Matrix] | None = None,
        u: list[Matrix] | None = None,
        ell: list[Matrix] | None = None,
    ):
        if len(v) != len(cover.overlaps):
            raise DescentError("one gluing matrix per overlap is required")
        for k, (ov, m) in enumerate(zip(cover.overlaps, v)):
            if m.ring != ov.ring or m.shape != (n, n):
                raise DescentError(f"v[{k}] must be {n}x{n} over the overlap ring")
        if v_inv is None:
            try:
                v_inv = [m.inverse() for m in v]
            except LinalgError as exc:
                raise DescentError(f"gluing matrix is not invertible: {exc}") from exc
        else:
            for k, (m, mi) in enumerate(zip(v, v_inv)):
                if m @ mi != Matrix.identity(m.ring, n):
                    raise DescentError(f"v_inv[{k}] is not the inverse of v[{k}]")
        for name, data in (("u", u), ("ell", ell)):
            if data is None:
                continue
            if len(data) != len(cover.charts):
                raise DescentError(f"one {name} per chart is required")
            for i, (R, m) in enumerate(zip(cover.charts, data)):
                if m.ring != R or m.shape != (n, n):
                    raise DescentError(f"{name}[{i}] must be {n}x{n} over chart {i}")
        self.cover = cover
        self.n = n
        self.v = list(v)
        self.v_inv = list(v_inv)
        self.u = list(u) if u is not None else None
        self.ell = list(ell) if ell is not None else None
        self._charts: dict[int, InvolutionAlgebra] = {}
        self._overlaps: dict[int, InvolutionAlgebra] = {}

    def with_data(self, u=None, ell=None) -> "GluingDatum":
        return GluingDatum(
            self.cover,
            self.n,
            self.v,
            self.v_inv,
            self.u if u is None else u,
            self.ell if ell is None else ell,
        )

    @property
    def overlaps(self) -> tuple[Overlap, ...]:
        return self.cover.overlaps

    def phi(self, k: int, X: Matrix) -> Matrix:
        return self.v[k] @ X @ self.v_inv[k]

    def glue(self, k: int, X: Matrix) -> Matrix:
        """``phi(res_i(X))`` for a matrix ``X`` over chart ``i``."""
        return self.phi(k, X.apply_hom(self.overlaps[k].res_i))

    def restrict_j(self, k: int, X: Matrix) -> Matrix:
        return X.apply_hom(self.overlaps[k].res_j)

    def chart_algebra(self, i: int) -> InvolutionAlgebra:
        if self.u is None:
            raise DescentError("no involution datum on the charts")
        if i not in self._charts:
            self._charts[i] = InvolutionAlgebra(self.cover.charts[i], self.n, self.u[i])
        return self._charts[i]

    def overlap_algebra(self, k: int) -> InvolutionAlgebra:
        """The overlap algebra with the involution restricted from chart ``j``."""
        if k not in self._overlaps:
            A = self.chart_algebra(self.overlaps[k].j)
            u = self.restrict_j(k, A.u)
            u_inv = self.restrict_j(k, A.u_inv)
            self._overlaps[k] = InvolutionAlgebra(self.overlaps[k].ring, self.n, u, u_inv)
        return self._overlaps[k]

    def chart_space(self) -> ModuleSpace:
        return ModuleSpace([Slot(R, self.n, self.n) for R in self.cover.charts])

    def overlap_space(self) -> ModuleSpace:
        return ModuleSpace([Slot(ov.ring, self.n, self.n) for ov in self.overlaps])

    def to_json(self) -> dict:
        charts = []
        for i, R in enumerate(self.cover.charts):
            entry = {"ring": R.to_json()}
            if self.u is not None:
                entry["u"] = self.u[i].to_json()
            if self.ell is not None:
                entry["ell"] = self.ell[i].to_json()
            charts.append(entry)
        return {
            "n": self.n,
            "charts": charts,
            "overlaps": [
                {
                    "i": ov.i,
                    "j": ov.j,
                    "ring": ov.ring.to_json(),
                    "res_i": ov.res_i.to_json(),
                    "res_j": ov.res_j.to_json(),
                    "v": m.to_json(),
                }
                for ov, m in zip(self.overlaps, self.v)
            ],
        }


def load_cover(obj: dict) -> GluingDatum:
    """Build a gluing datum from its JSON form.

    ``charts`` entries are ring descriptors or objects ``{"ring", "u", "ell"}``;
    overlaps carry ``i``, ``j``, ``ring``, ``res_i``, ``res_j`` (generator
    images), ``v`` and optionally ``v_inv``.  ``n`` defaults to the size of
    the first ``v``.
    """
    try:
        charts_obj = obj["charts"]
        overlaps_obj = obj["overlaps"]
    except (KeyError, TypeError) as exc:
        raise DescentError("cover JSON needs 'charts' and 'overlaps'") from exc
    rings, u_json, ell_json = [], [], []
    for c in charts_obj:
        if isinstance(c, dict) and "ring" in c:
            rings.append(ring_from_json(c["ring"]))
            u_json.append(c.get("u"))
            ell_json.append(c.get("ell"))
        else:
            rings.append(ring_from_json(c))
            u_json.append(None)
            ell_json.append(None)
    overlaps, v_json, vinv_json = [], [], []
    for k, o in enumerate(overlaps_obj):
        try:
            i, j = int(o["i"]), int(o["j"])
            R = ring_from_json(o["ring"])
            res_i = RingHom(rings[i], R, o.get("res_i") or {})
            res_j = RingHom(rings[j], R, o.get("res_j") or {})
            v_json.append(o["v"])
        except (KeyError, IndexError, TypeError) as exc:
            raise DescentError(f"overlap {k} is malformed: {exc}") from exc
        overlaps.append(Overlap(i, j, R, res_i, res_j))
        vinv_json.append(o.get("v_inv"))
    cover = CoverPresentation(tuple(rings), tuple(overlaps))
    n = int(obj.get("n", len(v_json[0]) if v_json else 1))
    v = [Matrix.from_json(ov.ring, m) for ov, m in zip(overlaps, v_json)]
    v_inv = None
    if all(m is not None for m in vinv_json) and vinv_json:
        v_inv = [Matrix.from_json(ov.ring, m) for ov, m in zip(overlaps, vinv_json)]

    def chart_mats(items):
        if all(x is None for x in items):
            return None
        if any(x is None for x in items):
            raise DescentError("chart data must be given on every chart or on none")
        return [Matrix.from_json(R, m) for R, m in zip(rings, items)]

    return GluingDatum(cover, n, v, v_inv, chart_mats(u_json), chart_mats(ell_json))


# ---------------------------------------------------------------------------
# Gradings
# ---------------------------------------------------------------------------


def ring_is_graded(R: Ring) -> bool:
    """Coordinate keys carry a grading compatible with multiplication."""
    if isinstance(R, (Integers, IntegersMod, GaloisField)):
        return True
    if isinstance(R, _Monomials):
        return ring_is_graded(R.base)
    if isinstance(R, Quotient):
        return ring_is_graded(R.base) and len(R.generator) == 1
    if isinstance(R, Product):
        return all(ring_is_graded(f) for f in R.factors)
    return False


def _constant_matrix(space_ring: Ring, M: Matrix) -> bool:
    return all(space_ring.key_degree(k) == 0 for row in M.data for a in row for k in space_ring.coords(a))


def is_exact(G: GluingDatum) -> bool:
    """No ring carries a filtration, so every flattening is complete."""
    return not any(R.has_filtration() for R in G.cover.charts) and not any(
        ov.ring.has_filtration() for ov in G.overlaps
    )


def is_graded(G: GluingDatum) -> bool:
    """Restrictions, ``phi`` and the involutions all preserve coordinate degree."""
    rings = list(G.cover.charts) + [ov.ring for ov in G.overlaps]
    if not all(ring_is_graded(R) for R in rings):
        return False
    for ov in G.overlaps:
        if not (ov.res_i.is_graded() and ov.res_j.is_graded()):
            return False
    for ov, m, mi in zip(G.overlaps, G.v, G.v_inv):
        if not (_constant_matrix(ov.ring, m) and _constant_matrix(ov.ring, mi)):
            return False
    if G.u is not None:
        for i, R in enumerate(G.cover.charts):
            A = G.chart_algebra(i)
            if not (_constant_matrix(R, A.u) and _constant_matrix(R, A.u_inv)):
                return False
    return True


def vector_degree(space: ModuleSpace, coords: dict) -> int:
    """Largest absolute coordinate degree (0 for the zero vector)."""
    return max((abs(space.key_degree(c)) for c in coords), default=0)


def homogeneous_part(space: ModuleSpace, coords: dict, d: int) -> dict:
    return {c: x for c, x in coords.items() if space.key_degree(c) == d}


# ---------------------------------------------------------------------------
# Global sections and descent checks
# ---------------------------------------------------------------------------


def _gluing_map(G: GluingDatum) -> LinearMap:
    dom, cod = G.chart_space(), G.overlap_space()

    def fn(B):
        return tuple(G.glue(k, B[ov.i]) - G.restrict_j(k, B[ov.j]) for k, ov in enumerate(G.overlaps))

    return LinearMap(dom, cod, fn, "gluing defect")


def global_sections(G: GluingDatum, D: int | None = 0) -> SubmoduleBasis:
    """Families ``(B_i)`` of degree at most ``D`` that glue: ``phi(res_i B_i) = res_j B_j``."""
    return kernel(_gluing_map(G), D)


def descend_involution_check(G: GluingDatum, u: list[Matrix] | None = None) -> bool:
    """``phi o sigma_i = sigma_j o phi`` on the matrix units of every overlap."""
    if u is not None:
        G = G.with_data(u=u)
    for k, ov in enumerate(G.overlaps):
        Ai = G.chart_algebra(ov.i)
        ui = Ai.u.apply_hom(ov.res_i)
        ui_inv = Ai.u_inv.apply_hom(ov.res_i)
        Aj = G.overlap_algebra(k)
        for a in range(G.n):
            for b in range(G.n):
                E = Matrix.unit(ov.ring, G.n, a, b)
                lhs = G.phi(k, ui_inv @ E.T @ ui)
                rhs = Aj.sigma(G.phi(k, E))
                if lhs != rhs:
                    return False
    return True


def _check_lifts(G: GluingDatum, ell: list[Matrix]):
    for i, L in enumerate(ell):
        A = G.chart_algebra(i)
        if L + A.sigma(L) != A.one():
            raise DescentError(f"chart {i}: ell + sigma(ell) is not 1")


@dataclass
class OverlapCheck:
    overlap: int
    glues: bool
    residual: Matrix
    certificate: Certificate | None = None
    coefficients: list | None = None

    def to_json(self) -> dict:
        out = {"overlap": self.overlap, "glues": self.glues, "residual": self.residual.to_json()}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def _alt_basis(G: GluingDatum, k: int, D: int | None) -> SubmoduleBasis:
    A = G.overlap_algebra(k)
    return image(A.linear_map(lambda X: X - A.sigma(X), "id - sigma"), D)


def descend_semitrace_check(G: GluingDatum, ell: list[Matrix] | None = None, D: int | None = 0) -> list[OverlapCheck]:
    """Whether ``phi(res_i ell_i) - res_j ell_j`` is alternating on each overlap.

    Alt is generated at degree ``max(D, degree of the residual)``.
    """
    ell = G.ell if ell is None else ell
    if ell is None:
        raise DescentError("no chart lifts given")
    _check_lifts(G, ell)
    out = []
    for k, ov in enumerate(G.overlaps):
        r = G.glue(k, ell[ov.i]) - G.restrict_j(k, ell[ov.j])
        if r.is_zero():
            out.append(OverlapCheck(k, True, r, coefficients=[]))
            continue
        A = G.overlap_algebra(k)
        deg = vector_degree(A.space, A.space.coords_of(r)) if ov.ring.has_filtration() else D
        deg = max(D or 0, deg) if ov.ring.has_filtration() else D
        res = membership(r, _alt_basis(G, k, deg))
        out.append(OverlapCheck(k, res.member, r, res.certificate, res.coefficients))
    return out


# ---------------------------------------------------------------------------
# Cochains
# ---------------------------------------------------------------------------


@dataclass
class CechCochain:
    gluing: GluingDatum
    values: tuple[Matrix, ...]
    tag: str = "Skew"

    def __post_init__(self):
        if self.tag not in VALUE_TAGS:
            raise DescentError(f"unknown value tag {self.tag!r}")
        if len(self.values) != len(self.gluing.overlaps):
            raise DescentError("one value per overlap is required")

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.values)

    def __sub__(self, other: "CechCochain") -> "CechCochain":
        return CechCochain(self.gluing, tuple(a - b for a, b in zip(self.values, other.values)), self.tag)

    def __add__(self, other: "CechCochain") -> "CechCochain":
        return CechCochain(self.gluing, tuple(a + b for a, b in zip(self.values, other.values)), self.tag)

    def scale(self, c: int) -> "CechCochain":
        return CechCochain(self.gluing, tuple(m.scale(c) for m in self.values), self.tag)

    def __eq__(self, other):
        return isinstance(other, CechCochain) and self.values == other.values

    def coords(self) -> dict:
        return self.gluing.overlap_space().coords_of(self.values)

    def in_skew(self) -> bool:
        return all(
            (m + self.gluing.overlap_algebra(k).sigma(m)).is_zero() for k, m in enumerate(self.values)
        )

    def verify_tag(self, D: int | None = 0) -> bool:
        """Entries lie in the tagged module (Skew/Alt values are checked in Skew)."""
        if self.tag == "full":
            return True
        if self.tag in ("Skew", "Skew/Alt"):
            return self.in_skew()
        for k, m in enumerate(self.values):
            if not m.is_zero() and not membership(m, _alt_basis(self.gluing, k, D)).member:
                return False
        return True

    def reduced(self, D: int | None = 0) -> "CechCochain":
        """Canonical representatives modulo Alt at degree ``D``."""
        vals = []
        for k, m in enumerate(self.values):
            vals.append(_alt_basis(self.gluing, k, D).reduce(m)[0])
        return CechCochain(self.gluing, tuple(vals), "Skew/Alt")

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "values": [
                {"i": ov.i + 1, "j": ov.j + 1, "value": m.to_json()}
                for ov, m in zip(self.gluing.overlaps, self.values)
            ],
        }


def coboundary(G: GluingDatum, h: list[Matrix], tag: str = "Skew") -> CechCochain:
    """``(res_j h_j - phi(res_i h_i))`` over the overlaps."""
    return CechCochain(
        G, tuple(G.restrict_j(k, h[ov.j]) - G.glue(k, h[ov.i]) for k, ov in enumerate(G.overlaps)), tag
    )


def connecting_delta(G: GluingDatum, ell: list[Matrix] | None = None) -> CechCochain:
    """The Skew-valued cochain ``res_j ell_j - phi(res_i ell_i)``."""
    ell = G.ell if ell is None else ell
    if ell is None:
        raise DescentError("no chart lifts given")
    _check_lifts(G, ell)
    c = coboundary(G, ell, "Skew")
    if not c.in_skew():
        raise DescentError("cochain is not skew; the involution does not descend")
    return c


# ---------------------------------------------------------------------------
# Cohomologous search
# ---------------------------------------------------------------------------


@dataclass
class Generator:
    """A coboundary generator: a chart Skew element or an overlap Alt element."""

    kind: str  # "skew" or "alt"
    index: int  # chart index or overlap index
    coords: dict  # in the chart or overlap-algebra space
    image: dict  # in the overlap space
    degree: int | None

    def to_json(self, space: ModuleSpace) -> dict:
        return {"kind": self.kind, "index": self.index, "degree": self.degree}


@dataclass
class SearchResult:
    found: bool
    degree: int | None
    modulo_alt: bool
    h: list[Matrix] | None = None
    alt_part: list[Matrix] | None = None
    certificate: Certificate | None = None
    generators: list[Generator] = field(default_factory=list)
    system: FlatSystem | None = None
    graded: bool = False
    exact: bool = False

    def __bool__(self):
        return self.found

    @property
    def status(self) -> str:
        return "FOUND" if self.found else f"NOT_FOUND_AT_DEGREE({self.degree})"

    def to_json(self) -> dict:
        out = {"status": self.status, "degree": self.degree, "modulo_alt": self.modulo_alt}
        if self.found:
            out["h"] = [m.to_json() for m in self.h]
            if self.alt_part is not None:
                out["alt_part"] = [m.to_json() for m in self.alt_part]
        elif self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def _pieces(A: InvolutionAlgebra, which: str, D: int | None, graded: bool) -> list[tuple[int | None, dict]]:
    """Generators of Skew or Alt, split by coordinate degree when ``graded``."""
    if which == "Skew":
        lin = A.linear_map(lambda X: X + A.sigma(X), "id + sigma")
        build = kernel
    else:
        lin = A.linear_map(lambda X: X - A.sigma(X), "id - sigma")
        build = image
    space = A.space
    if not graded or not A.ring.has_filtration():
        return [(None if A.ring.has_filtration() else 0, g) for g in build(lin, D).generators]
    out = []
    degrees = sorted({space.key_degree(c) for c in space.coordinates(D)}, key=lambda d: (abs(d), d))
    for d in degrees:
        B = build(lin, D, coord_filter=lambda c, d=d: space.key_degree(c) == d)
        out.extend((d, g) for g in B.generators)
    return out


def _combine(backend, vectors: list[dict], coeffs: list[int]) -> dict:
    acc: dict = {}
    if backend[0] == "GF":
        mul, _ = _gf_tables(backend[1])
        for v, t in zip(vectors, coeffs):
            if t:
                for c, x in v.items():
                    acc[c] = acc.get(c, 0) ^ mul[t][x]
    else:
        for v, t in zip(vectors, coeffs):
            if t:
                for c, x in v.items():
                    acc[c] = acc.get(c, 0) + t * x
    return {c: x for c, x in acc.items() if x}


def _negate(backend, v: dict) -> dict:
    return dict(v) if backend[0] == "GF" else {c: -x for c, x in v.items()}


def _embed(slot_to: int, coords: dict) -> dict:
    return {(slot_to, i, j, key): x for (_, i, j, key), x in coords.items()}


def coboundary_generators(G: GluingDatum, D: int | None, modulo_alt: bool, graded: bool | None = None) -> list[Generator]:
    """Images of chart Skew generators (and overlap Alt generators when ``modulo_alt``)."""
    graded = is_graded(G) if graded is None else graded
    backend = G.cover.backend
    gens: list[Generator] = []
    for i in range(len(G.cover.charts)):
        A = G.chart_algebra(i)
        for d, g in _pieces(A, "Skew", D, graded):
            X = A.space.from_coords(g)[0]
            img: dict = {}
            for k, ov in enumerate(G.overlaps):
                local = ModuleSpace.matrices(ov.ring, G.n)
                if ov.j == i:
                    part = _embed(k, local.coords_of(G.restrict_j(k, X)))
                    img = _combine(backend, [img, part], [1, 1])
                if ov.i == i:
                    part = _embed(k, local.coords_of(G.glue(k, X)))
                    img = _combine(backend, [img, _negate(backend, part)], [1, 1])
            gens.append(Generator("skew", i, g, img, d))
    if modulo_alt:
        for k, ov in enumerate(G.overlaps):
            A = G.overlap_algebra(k)
            for d, g in _pieces(A, "Alt", D, graded):
                gens.append(Generator("alt", k, g, _embed(k, g), d))
    return gens


def cohomologous_search(
    c: CechCochain, D: int | None = 0, modulo_alt: bool | None = None, graded: bool | None = None
) -> SearchResult:
    """Solve ``c = res_j h_j - phi(res_i h_i) (+ a)`` with ``h_i`` in Skew (and ``a`` in Alt).

    ``modulo_alt`` defaults to whether the cochain is tagged ``Skew/Alt``.
    The witness is re-verified exactly before it is returned.
    """
    G = c.gluing
    modulo_alt = (c.tag == "Skew/Alt") if modulo_alt is None else modulo_alt
    graded = is_graded(G) if graded is None else graded
    exact = is_exact(G)
    backend = G.cover.backend
    cod = G.overlap_space()
    gens = coboundary_generators(G, D, modulo_alt, graded)
    target = cod.coords_of(c.values)
    res = solve_combination(cod, [g.image for g in gens], target)
    if not res.solvable:
        return SearchResult(
            False, D, modulo_alt, certificate=res.certificate, generators=gens, system=res.system,
            graded=graded, exact=exact,
        )
    h_coords = [dict() for _ in G.cover.charts]
    a_coords = [dict() for _ in G.overlaps]
    for g, t in zip(gens, res.coefficients):
        if not t:
            continue
        if g.kind == "skew":
            h_coords[g.index] = _combine(backend, [h_coords[g.index], g.coords], [1, t])
        else:
            a_coords[g.index] = _combine(backend, [a_coords[g.index], g.coords], [1, t])
    h = [G.chart_algebra(i).space.from_coords(_reduce(G.chart_algebra(i).space, hc))[0] for i, hc in enumerate(h_coords)]
    alt = None
    if modulo_alt:
        alt = [
            G.overlap_algebra(k).space.from_coords(_reduce(G.overlap_algebra(k).space, ac))[0]
            for k, ac in enumerate(a_coords)
        ]
    out = SearchResult(True, D, modulo_alt, h, alt, generators=gens, system=res.system, graded=graded, exact=exact)
    if not verify_witness(c, out):
        raise DescentError("internal error: coboundary witness failed to verify")
    return out


def _reduce(space: ModuleSpace, coords: dict) -> dict:
    if space.backend[0] == "GF":
        return coords
    out = {}
    for c, x in coords.items():
        m = space.modulus(c)
        x = x % m if m else x
        if x:
            out[c] = x
    return out


def verify_witness(c: CechCochain, res: SearchResult) -> bool:
    """``h_i`` skew, alt parts alternating, and ``c = d(h) + a`` exactly."""
    G = c.gluing
    for i, h in enumerate(res.h):
        if not (h + G.chart_algebra(i).sigma(h)).is_zero():
            return False
    d = coboundary(G, res.h)
    if res.alt_part is not None:
        for k, a in enumerate(res.alt_part):
            if a.is_zero():
                continue
            A = G.overlap_algebra(k)
            deg = vector_degree(A.space, A.space.coords_of(a)) if A.ring.has_filtration() else None
            if not membership(a, _alt_basis(G, k, deg)).member:
                return False
        d = d + CechCochain(G, tuple(res.alt_part), d.tag)
    return d.values == c.values


def random_homogeneous_samples(
    G: GluingDatum, d: int, D: int | None, modulo_alt: bool, samples: int = 20, seed: int = 0
) -> list[dict]:
    """Degree-``d`` parts of coboundaries of random skew families, built without the grading.

    Skew generators are recomputed over all coordinates up to degree ``D``
    (no splitting by degree); random combinations of them are cut to their
    degree-``d`` part, which is again skew when the data is graded.
    """
    rng = random.Random(seed)
    backend = G.cover.backend
    gens = coboundary_generators(G, D, modulo_alt, graded=False)
    cod = G.overlap_space()
    out = []
    for _ in range(samples):
        if backend[0] == "GF":
            coeffs = [rng.randrange(2 ** backend[1]) for _ in gens]
        else:
            coeffs = [rng.randrange(-3, 4) for _ in gens]
        # build the chart family and the alt part, then take the degree-d pieces
        h = [dict() for _ in G.cover.charts]
        a = [dict() for _ in G.overlaps]
        for g, t in zip(gens, coeffs):
            if g.kind == "skew":
                h[g.index] = _combine(backend, [h[g.index], g.coords], [1, t])
            else:
                a[g.index] = _combine(backend, [a[g.index], g.coords], [1, t])
        hs = []
        for i, hc in enumerate(h):
            sp = G.chart_algebra(i).space
            hs.append(sp.from_coords(_reduce(sp, homogeneous_part(sp, hc, d)))[0])
        img = cod.coords_of(coboundary(G, hs).values)
        for k, ac in enumerate(a):
            sp = G.overlap_algebra(k).space
            img = _combine(backend, [img, _embed(k, _reduce(sp, homogeneous_part(sp, ac, d)))], [1, 1])
        out.append(img)
    return out
