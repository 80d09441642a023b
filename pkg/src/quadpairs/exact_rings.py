"""Exact arithmetic in a small family of finitely presented commutative rings.

Supported constructors:

* ``Integers()``                      ZZ
* ``IntegersMod(n)``                  ZZ/nZZ
* ``GaloisField(m)``                  GF(2^m), m <= 4, generator ``w``
* ``Poly(base, "x")``                 base[x]
* ``Poly(base, "1/x")``               base[x^-1]
* ``Laurent(base, "x")``              base[x, x^-1]
* ``Quotient(base, "4x")``            base / <generator>
* ``Product([R1, R2, ...])``          R1 x R2 x ...

Ring objects are immutable descriptors and do the arithmetic on plain hashable
data.  ``RingElement`` wraps ``(ring, data)`` with operator overloading so the
rest of the package can write ``a * b + c``.

Every ring also exposes a coordinate description (``coords``, ``from_coords``,
``basis_keys``, ``modulus``) used by :mod:`quadpairs.exact_linalg` to flatten
matrices over these rings into modules over ZZ, ZZ/n or GF(2^m).
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Sequence

__all__ = [
    "RingError",
    "DegreeOverflowError",
    "ParseError",
    "Ring",
    "RingElement",
    "Integers",
    "IntegersMod",
    "GaloisField",
    "Poly",
    "Laurent",
    "Quotient",
    "Product",
    "RingHom",
    "default_max_degree",
    "ring_from_json",
    "ring_to_json",
    "element_from_json",
    "element_to_json",
    "canonicalize",
    "hom_apply",
    "degree_truncate",
]


class RingError(ValueError):
    """Malformed ring data or an unsupported ring operation."""


class DegreeOverflowError(RingError):
    """A product would exceed the tracked degree bound of a filtered ring."""


class ParseError(RingError):
    """An element or descriptor string could not be parsed."""


def default_max_degree() -> int:
    """Tracked degree bound for filtered rings, overridable via ``QP_MAX_DEGREE``."""
    raw = os.environ.get("QP_MAX_DEGREE")
    if raw is None:
        return 8
    try:
        value = int(raw)
    except ValueError as exc:
        raise RingError(f"QP_MAX_DEGREE must be an integer, got {raw!r}") from exc
    if value < 0:
        raise RingError("QP_MAX_DEGREE must be non-negative")
    return value


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


class RingElement:
    """An element of a ring, always stored in canonical form."""

    __slots__ = ("ring", "data", "_hash")

    def __init__(self, ring: "Ring", data: Any, *, canonical: bool = False):
        self.ring = ring
        self.data = data if canonical else ring.canon(data)
        self._hash = None

    # coercion -------------------------------------------------------------
    def _coerce(self, other: Any) -> "RingElement":
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise RingError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return self.ring.element(self.ring.from_int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement(self.ring, self.ring.add(self.data, other.data), canonical=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement(
            self.ring, self.ring.add(self.data, self.ring.neg(other.data)), canonical=True
        )

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.data), canonical=True)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement(self.ring, self.ring.mul(self.data, other.data), canonical=True)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.element(self.ring.from_int(other))
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ring == other.ring and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.data))
        return self._hash

    def __bool__(self):
        return not self.ring.is_zero(self.data)

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.data)

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.data)

    def inverse(self) -> "RingElement":
        return RingElement(self.ring, self.ring.inverse(self.data), canonical=True)

    def degree(self) -> int:
        return self.ring.degree(self.data)

    def truncate(self, D: int) -> "RingElement":
        return RingElement(self.ring, self.ring.truncate(self.data, D))

    def coords(self) -> dict:
        return self.ring.coords(self.data)

    def __str__(self):
        return self.ring.format(self.data)

    def __repr__(self):
        return f"RingElement({self.ring!r}, {self.ring.format(self.data)!r})"


# ---------------------------------------------------------------------------
# Ring base class
# ---------------------------------------------------------------------------


class Ring:
    """Abstract descriptor.  Subclasses define arithmetic on canonical data."""

    #: ("Z",) for ZZ-module coordinates, ("GF", m) for GF(2^m)-vector coordinates
    backend: tuple = ("Z",)

    # arithmetic on data ---------------------------------------------------
    def canon(self, data):
        raise NotImplementedError

    def zero_data(self):
        raise NotImplementedError

    def one_data(self):
        raise NotImplementedError

    def from_int(self, k: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero_data()

    def is_unit(self, a) -> bool:
        try:
            self.inverse(a)
        except RingError:
            return False
        return True

    def inverse(self, a):
        raise RingError(f"{a!r} is not invertible in {self}")

    # convenience ------------------------------------------------------------
    def element(self, data, *, canonical: bool = True) -> RingElement:
        return RingElement(self, data, canonical=canonical)

    def zero(self) -> RingElement:
        return self.element(self.zero_data())

    def one(self) -> RingElement:
        return self.element(self.one_data())

    def __call__(self, value) -> RingElement:
        if isinstance(value, RingElement):
            if value.ring != self:
                raise RingError(f"element of {value.ring} given to {self}")
            return value
        if isinstance(value, int):
            return self.element(self.from_int(value))
        if isinstance(value, str):
            return self.parse(value)
        raise RingError(f"cannot build an element of {self} from {value!r}")

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def two_is_unit(self) -> bool:
        return self.is_unit(self.from_int(2))

    # structure --------------------------------------------------------------
    def generator_names(self) -> list[str]:
        """Names usable in element strings (e.g. ``["x", "w"]``)."""
        return []

    def generator_power(self, name: str, exponent: int):
        """Data for ``name^exponent`` or ``None`` if ``name`` is not a generator here."""
        return None

    def has_filtration(self) -> bool:
        return False

    def degree(self, a) -> int:
        raise RingError(f"{self} carries no degree filtration")

    def truncate(self, a, D: int):
        raise RingError(f"{self} carries no degree filtration")

    # coordinates ------------------------------------------------------------
    def coords(self, a) -> dict:
        """Nonzero coordinates ``{key: scalar}`` of ``a``."""
        raise NotImplementedError

    def from_coords(self, coords: dict):
        raise NotImplementedError

    def basis_keys(self, D: int | None = None) -> list:
        """Coordinate keys of the degree-``D`` part (all keys if unfiltered)."""
        raise NotImplementedError

    def modulus(self, key) -> int:
        """Additive order of the coordinate ``key`` (0 = free); ZZ backend only."""
        return 0

    def key_degree(self, key) -> int:
        return 0

    def monomial(self, key):
        return self.from_coords({key: 1})

    # finite rings -------------------------------------------------------------
    def is_finite(self) -> bool:
        return False

    def elements(self) -> Iterator:
        raise RingError(f"{self} is not finite")

    def random(self, rng: random.Random, D: int = 2):
        raise NotImplementedError

    # homomorphisms --------------------------------------------------------------
    def evaluate(self, a, target: "Ring", images: dict):
        """Image of ``a`` under the hom determined by generator ``images``."""
        raise NotImplementedError

    def relations_hold(self, target: "Ring", images: dict) -> bool:
        return True

    # io -----------------------------------------------------------------
    def format(self, a) -> str:
        raise NotImplementedError

    def parse(self, text: str) -> RingElement:
        return self.element(_evaluate_ast(_Parser(text).parse(), self))

    def to_json(self):
        raise NotImplementedError

    def __repr__(self):
        return str(self)


# ---------------------------------------------------------------------------
# Scalar rings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Integers(Ring):
    backend = ("Z",)

    def canon(self, data):
        if not isinstance(data, int) or isinstance(data, bool):
            raise RingError(f"integer expected, got {data!r}")
        return data

    def zero_data(self):
        return 0

    def one_data(self):
        return 1

    def from_int(self, k):
        return k

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_unit(self, a):
        return a in (1, -1)

    def inverse(self, a):
        if a in (1, -1):
            return a
        raise RingError(f"{a} is not a unit in ZZ")

    def coords(self, a):
        return {0: a} if a else {}

    def from_coords(self, coords):
        return coords.get(0, 0)

    def basis_keys(self, D=None):
        return [0]

    def random(self, rng, D=2):
        return rng.randint(-4, 4)

    def evaluate(self, a, target, images):
        return target.from_int(a)

    def format(self, a):
        return str(a)

    def to_json(self):
        return "Z"

    def __str__(self):
        return "ZZ"

    # helpers used by quotient rings
    def reduce_mod(self, a, m: int):
        return a % m if m else a

    def ideal_modulus(self, c) -> int:
        return abs(c)

    def nilpotent(self, a) -> bool:
        return a == 0


@dataclass(frozen=True)
class IntegersMod(Ring):
    n: int

    backend = ("Z",)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise RingError(f"modulus must be a positive integer, got {self.n!r}")

    def canon(self, data):
        if not isinstance(data, int) or isinstance(data, bool):
            raise RingError(f"integer expected, got {data!r}")
        return data % self.n

    def zero_data(self):
        return 0

    def one_data(self):
        return 1 % self.n

    def from_int(self, k):
        return k % self.n

    def add(self, a, b):
        return (a + b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def mul(self, a, b):
        return (a * b) % self.n

    def is_unit(self, a):
        return math.gcd(a, self.n) == 1

    def inverse(self, a):
        if math.gcd(a, self.n) != 1:
            raise RingError(f"{a} is not a unit mod {self.n}")
        return pow(a, -1, self.n) if self.n > 1 else 0

    def coords(self, a):
        return {0: a} if a else {}

    def from_coords(self, coords):
        return coords.get(0, 0) % self.n

    def basis_keys(self, D=None):
        return [0]

    def modulus(self, key):
        return self.n

    def is_finite(self):
        return True

    def elements(self):
        return iter(range(self.n))

    def random(self, rng, D=2):
        return rng.randrange(self.n)

    def evaluate(self, a, target, images):
        return target.from_int(a)

    def relations_hold(self, target, images):
        return target.is_zero(target.from_int(self.n))

    def format(self, a):
        return str(a)

    def to_json(self):
        return {"zmod": self.n}

    def __str__(self):
        return f"ZZ/{self.n}"

    def reduce_mod(self, a, m: int):
        g = math.gcd(m, self.n)
        return a % g

    def ideal_modulus(self, c) -> int:
        return math.gcd(c, self.n)

    def nilpotent(self, a) -> bool:
        # a is nilpotent mod n iff every prime factor of n divides a
        return pow(a, self.n.bit_length() + 1, self.n) == 0


_GF_MODULI = {1: 0b11, 2: 0b111, 3: 0b1011, 4: 0b10011}


def _gf_mul_raw(a: int, b: int, m: int) -> int:
    poly = _GF_MODULI[m]
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return result


@dataclass(frozen=True)
class GaloisField(Ring):
    """GF(2^m) with elements stored as bit-vectors in the generator ``w``.

    The defining polynomials are fixed: m=1: w+1, m=2: w^2+w+1, m=3: w^3+w+1,
    m=4: w^4+w+1.
    """

    m: int

    def __post_init__(self):
        if self.m not in _GF_MODULI:
            raise RingError(f"GF(2^m) supported for 1 <= m <= 4, got m={self.m!r}")

    @property
    def backend(self):
        return ("GF", self.m)

    @property
    def order(self) -> int:
        return 1 << self.m

    def canon(self, data):
        if not isinstance(data, int) or isinstance(data, bool) or not 0 <= data < self.order:
            raise RingError(f"GF({self.order}) element must be an int in [0,{self.order}), got {data!r}")
        return data

    def zero_data(self):
        return 0

    def one_data(self):
        return 1

    def from_int(self, k):
        return k & 1

    def add(self, a, b):
        return a ^ b

    def neg(self, a):
        return a

    def mul(self, a, b):
        return _gf_mul_raw(a, b, self.m)

    def is_unit(self, a):
        return a != 0

    def inverse(self, a):
        if a == 0:
            raise RingError("0 is not invertible")
        # a^(2^m - 2)
        result, base, e = 1, a, self.order - 2
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def generator_names(self):
        return ["w"]

    def generator_power(self, name, exponent):
        if name != "w":
            return None
        if exponent < 0:
            return self.inverse(self.generator_power(name, -exponent))
        result = 1
        for _ in range(exponent):
            result = self.mul(result, 2 if self.m > 1 else 1)
        return result

    def coords(self, a):
        return {0: a} if a else {}

    def from_coords(self, coords):
        return self.canon(coords.get(0, 0))

    def basis_keys(self, D=None):
        return [0]

    def is_finite(self):
        return True

    def elements(self):
        return iter(range(self.order))

    def random(self, rng, D=2):
        return rng.randrange(self.order)

    def evaluate(self, a, target, images):
        w = images.get("w")
        if w is None:
            w = target.generator_power("w", 1)
            if w is None:
                raise RingError(f"no image given for w in {target}")
        result = target.zero_data()
        power = target.one_data()
        for bit in range(self.m):
            if (a >> bit) & 1:
                result = target.add(result, power)
            power = target.mul(power, w)
        return result

    def relations_hold(self, target, images):
        if not target.is_zero(target.from_int(2)):
            return False
        w = images.get("w", target.generator_power("w", 1))
        if w is None:
            return False
        # minimal polynomial of the generator evaluated at the image
        value = target.zero_data()
        power = target.one_data()
        poly = _GF_MODULI[self.m]
        for bit in range(self.m + 1):
            if (poly >> bit) & 1:
                value = target.add(value, power)
            power = target.mul(power, w)
        return target.is_zero(value)

    def format(self, a):
        if a == 0:
            return "0"
        terms = []
        for bit in range(self.m - 1, -1, -1):
            if (a >> bit) & 1:
                terms.append("1" if bit == 0 else ("w" if bit == 1 else f"w^{bit}"))
        return "+".join(terms)

    def to_json(self):
        return {"gf": self.order}

    def __str__(self):
        return f"GF({self.order})"

    def nilpotent(self, a) -> bool:
        return a == 0


_SCALAR_TYPES = (Integers, IntegersMod, GaloisField)


# ---------------------------------------------------------------------------
# Polynomial and Laurent rings
# ---------------------------------------------------------------------------


class _Monomials(Ring):
    """Sparse polynomials ``sum c_e x^e`` over a scalar ring.

    ``sign`` is +1 for base[x] (e >= 0), -1 for base[x^-1] (e <= 0) and 0 for
    Laurent polynomials.  Data is a sorted tuple of ``(e, c)`` with c != 0.
    """

    base: Ring
    var: str
    sign: int
    max_degree: int

    def _init(self, base, var, sign, max_degree):
        scalar = isinstance(base, _SCALAR_TYPES)
        if not scalar and not (isinstance(base, Quotient) and base.mode == "monic"):
            raise RingError(
                "polynomial coefficients must come from ZZ, ZZ/n, GF(2^m) or a quotient of finite rank"
            )
        if not re.fullmatch(r"[a-vx-z]", var):
            raise RingError(f"variable must be a single letter other than w, got {var!r}")
        if var in base.generator_names():
            raise RingError(f"variable {var!r} is already used by {base}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "_scalar", scalar)
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "sign", sign)
        object.__setattr__(
            self, "max_degree", default_max_degree() if max_degree is None else int(max_degree)
        )

    @property
    def backend(self):
        return self.base.backend

    def _check_exp(self, e: int):
        if self.sign > 0 and e < 0 or self.sign < 0 and e > 0:
            raise RingError(f"exponent {e} not allowed in {self}")
        if abs(e) > self.max_degree:
            raise DegreeOverflowError(
                f"degree {abs(e)} exceeds tracked bound {self.max_degree} in {self}"
            )

    def canon(self, data):
        if isinstance(data, dict):
            items = data.items()
        else:
            try:
                items = list(data)
            except TypeError as exc:
                raise RingError(f"malformed polynomial data {data!r}") from exc
        acc: dict[int, Any] = {}
        for item in items:
            try:
                e, c = item
            except (TypeError, ValueError) as exc:
                raise RingError(f"malformed polynomial term {item!r}") from exc
            if not isinstance(e, int):
                raise RingError(f"exponent must be an int, got {e!r}")
            c = self.base.canon(c)
            acc[e] = self.base.add(acc.get(e, self.base.zero_data()), c) if e in acc else c
        out = []
        for e in sorted(acc):
            if not self.base.is_zero(acc[e]):
                self._check_exp(e)
                out.append((e, acc[e]))
        return tuple(out)

    def zero_data(self):
        return ()

    def one_data(self):
        return self.const(self.base.one_data())

    def const(self, c):
        return () if self.base.is_zero(c) else ((0, c),)

    def from_int(self, k):
        return self.const(self.base.from_int(k))

    def add(self, a, b):
        if not a:
            return b
        if not b:
            return a
        acc = dict(a)
        for e, c in b:
            if e in acc:
                s = self.base.add(acc[e], c)
                if self.base.is_zero(s):
                    del acc[e]
                else:
                    acc[e] = s
            else:
                acc[e] = c
        return tuple(sorted(acc.items()))

    def neg(self, a):
        return tuple((e, self.base.neg(c)) for e, c in a)

    def mul(self, a, b):
        if not a or not b:
            return ()
        acc: dict[int, Any] = {}
        base = self.base
        for e1, c1 in a:
            for e2, c2 in b:
                p = base.mul(c1, c2)
                if base.is_zero(p):
                    continue
                e = e1 + e2
                acc[e] = base.add(acc[e], p) if e in acc else p
        out = []
        for e in sorted(acc):
            if not base.is_zero(acc[e]):
                self._check_exp(e)
                out.append((e, acc[e]))
        return tuple(out)

    def scale(self, a, c):
        return self.canon([(e, self.base.mul(x, c)) for e, x in a])

    # units ----------------------------------------------------------------
    def _unit_monomial_candidates(self, a):
        for e, c in a:
            if self.base.is_unit(c) and (e == 0 or self.sign == 0):
                yield ((e, c),)

    def _nilpotent(self, t) -> bool:
        return all(self.base.nilpotent(c) for _, c in t)

    def nilpotent(self, a) -> bool:
        return self._nilpotent(a)

    def _monomial_inverse(self, m):
        ((e, c),) = m
        return ((-e, self.base.inverse(c)),)

    def inverse(self, a):
        return _inverse_by_neumann(self, a)

    def is_unit(self, a):
        try:
            self.inverse(a)
        except RingError:
            return False
        return True

    # generators -----------------------------------------------------------
    def generator_names(self):
        return [self.var] + self.base.generator_names()

    def generator_power(self, name, exponent):
        if name == self.var:
            if self.sign > 0 and exponent < 0 or self.sign < 0 and exponent > 0:
                return None
            self._check_exp(exponent)
            return ((exponent, self.base.one_data()),)
        inner = self.base.generator_power(name, exponent)
        if inner is None:
            return None
        return self.const(inner)

    # filtration -------------------------------------------------------------
    def has_filtration(self):
        return True

    def degree(self, a):
        return max((abs(e) for e, _ in a), default=0)

    def truncate(self, a, D):
        return tuple((e, c) for e, c in a if abs(e) <= D)

    # coordinates ----------------------------------------------------------
    # keys are exponents over a scalar base, (exponent, base key) otherwise
    def coords(self, a):
        if self._scalar:
            return {e: c for e, c in a}
        return {(e, k): v for e, c in a for k, v in self.base.coords(c).items()}

    def from_coords(self, coords):
        if self._scalar:
            return self.canon([(e, self.base.canon(c)) for e, c in coords.items()])
        parts: dict[int, dict] = {}
        for (e, k), v in coords.items():
            parts.setdefault(e, {})[k] = v
        return self.canon([(e, self.base.from_coords(sub)) for e, sub in parts.items()])

    def exponents(self, D=None) -> list[int]:
        if D is None:
            D = self.max_degree
        D = min(D, self.max_degree)
        if self.sign > 0:
            return list(range(0, D + 1))
        if self.sign < 0:
            return list(range(-D, 1))
        return list(range(-D, D + 1))

    def basis_keys(self, D=None):
        if self._scalar:
            return self.exponents(D)
        inner = self.base.basis_keys()
        return [(e, k) for e in self.exponents(D) for k in inner]

    def modulus(self, key):
        return self.base.modulus(0 if self._scalar else key[1])

    def key_degree(self, key):
        return key if self._scalar else key[0]

    def random(self, rng, D=2):
        D = min(D, self.max_degree)
        terms = []
        for e in self.basis_keys(D):
            if rng.random() < 0.6:
                terms.append((e, self.base.random(rng)))
        return self.canon(terms)

    # homs -------------------------------------------------------------------
    def _image_key(self) -> str:
        return f"{self.var}^-1" if self.sign < 0 else self.var

    def evaluate(self, a, target, images):
        key = self._image_key()
        img = images.get(key)
        if img is None:
            img = _default_image(key, target)
        inv = None
        result = target.zero_data()
        for e, c in a:
            coeff = self.base.evaluate(c, target, images)
            if self.sign < 0:
                term = _data_pow(target, img, -e)
            elif e >= 0:
                term = _data_pow(target, img, e)
            else:
                if inv is None:
                    inv = target.inverse(img)
                term = _data_pow(target, inv, -e)
            result = target.add(result, target.mul(coeff, term))
        return result

    def relations_hold(self, target, images):
        if not self.base.relations_hold(target, images):
            return False
        if self.sign == 0:
            img = images.get(self.var)
            if img is None:
                img = _default_image(self.var, target)
            return target.is_unit(img)
        return True

    # formatting -------------------------------------------------------------
    def format(self, a):
        if not a:
            return "0"
        parts = []
        for e, c in a:
            parts.append(_format_term(self.base, c, self.var, e))
        return _join_terms(parts)


def _data_pow(ring: Ring, a, e: int):
    result = ring.one_data()
    base = a
    while e:
        if e & 1:
            result = ring.mul(result, base)
        e >>= 1
        if e:
            base = ring.mul(base, base)
    return result


def _default_image(key: str, target: Ring):
    try:
        return target.parse(key).data
    except RingError as exc:
        raise RingError(f"no image given for {key} and {target} has no such generator") from exc


def _format_scalar(base: Ring, c) -> tuple[str, bool]:
    """Return (text, is_simple_integer)."""
    text = base.format(c)
    return text, re.fullmatch(r"-?\d+", text) is not None


def _format_term(base: Ring, c, var: str, e: int) -> str:
    text, simple = _format_scalar(base, c)
    compound = "+" in text or "-" in text[1:]
    if e == 0:
        return text
    mono = var if e == 1 else f"{var}^{e}"
    if simple:
        if text == "1":
            return mono
        if text == "-1":
            return f"-{mono}"
        return f"{text}{mono}"
    if compound:
        return f"({text}){mono}"
    return f"{text}{mono}"


def _join_terms(parts: Sequence[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


class Poly(_Monomials):
    """``base[x]`` (or ``base[x^-1]`` when ``var`` is written ``"1/x"``)."""

    def __init__(self, base: Ring, var: str = "x", max_degree: int | None = None):
        if var.startswith("1/"):
            self._init(base, var[2:], -1, max_degree)
        else:
            self._init(base, var, 1, max_degree)

    def __setattr__(self, key, value):
        raise AttributeError("rings are immutable")

    def _key(self):
        return ("poly", self.base, self.var, self.sign, self.max_degree)

    def __eq__(self, other):
        return isinstance(other, Poly) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def to_json(self):
        var = self.var if self.sign > 0 else f"1/{self.var}"
        out: list = [self.base.to_json(), var]
        if self.max_degree != default_max_degree():
            out.append(self.max_degree)
        return {"poly": out}

    def __str__(self):
        v = self.var if self.sign > 0 else f"1/{self.var}"
        return f"{self.base}[{v}]"


class Laurent(_Monomials):
    """``base[x, x^-1]``."""

    def __init__(self, base: Ring, var: str = "x", max_degree: int | None = None):
        self._init(base, var, 0, max_degree)

    def __setattr__(self, key, value):
        raise AttributeError("rings are immutable")

    def _key(self):
        return ("laurent", self.base, self.var, self.max_degree)

    def __eq__(self, other):
        return isinstance(other, Laurent) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def to_json(self):
        out: list = [self.base.to_json(), self.var]
        if self.max_degree != default_max_degree():
            out.append(self.max_degree)
        return {"laurent": out}

    def __str__(self):
        return f"{self.base}[{self.var},1/{self.var}]"


def _inverse_by_neumann(ring: Ring, a):
    """Invert ``a = m + t`` with ``m`` a unit monomial and ``t`` nilpotent."""
    for m in ring._unit_monomial_candidates(a):
        t = ring.sub(a, m)
        if not ring._nilpotent(t):
            continue
        m_inv = ring._monomial_inverse(m)
        # a^-1 = m^-1 * sum_k (-m^-1 t)^k
        step = ring.neg(ring.mul(m_inv, t))
        total = ring.one_data()
        power = ring.one_data()
        for _ in range(64):
            power = ring.mul(power, step)
            if ring.is_zero(power):
                return ring.mul(m_inv, total)
            total = ring.add(total, power)
        raise RingError(f"Neumann series did not terminate for {ring.format(a)}")
    raise RingError(f"{ring.format(a)} is not invertible in {ring}")


# ---------------------------------------------------------------------------
# Quotients by a principal ideal
# ---------------------------------------------------------------------------


class Quotient(Ring):
    """``base / <g>`` for ``base`` a polynomial ring.

    Two generator shapes are supported:

    * ``g`` with unit leading coefficient (e.g. ``x^2-1``): canonical form is
      the remainder of division; the ring is then free of finite rank.
    * ``g = c * x^k`` a single term (e.g. ``4x``): coefficients in degrees
      ``|e| >= k`` are reduced modulo ``c`` and everything else is untouched.
    """

    def __init__(self, base: Ring, generator):
        if not isinstance(base, Poly):
            raise RingError("quotients are supported for polynomial rings only")
        if isinstance(generator, str):
            gen = base.parse(generator).data
        elif isinstance(generator, RingElement):
            gen = generator.data
        else:
            gen = base.canon(generator)
        if not gen:
            raise RingError("quotient generator must be nonzero")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "generator", gen)
        lead_e, lead_c = max(gen, key=lambda t: abs(t[0]))
        if len(gen) == 1 and not base.base.is_unit(lead_c):
            object.__setattr__(self, "mode", "monomial")
            object.__setattr__(self, "cut", abs(lead_e))
            object.__setattr__(self, "cmod", base.base.ideal_modulus(lead_c))
        elif base.base.is_unit(lead_c):
            object.__setattr__(self, "mode", "monic")
            object.__setattr__(self, "cut", abs(lead_e))
            inv = base.base.inverse(lead_c)
            object.__setattr__(self, "monic", tuple((e, base.base.mul(c, inv)) for e, c in gen))
            if self.cut == 0:
                raise RingError("quotient by a unit is the zero ring")
        else:
            raise RingError(
                "quotient generator must be monic up to a unit or a single term c*x^k"
            )

    def __setattr__(self, key, value):
        raise AttributeError("rings are immutable")

    def _key(self):
        return ("quot", self.base, self.generator)

    def __eq__(self, other):
        return isinstance(other, Quotient) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def backend(self):
        return self.base.backend

    def canon(self, data):
        data = self.base.canon(data)
        return self._reduce(data)

    def _reduce(self, data):
        base = self.base
        coeff = base.base
        if self.mode == "monomial":
            out = []
            for e, c in data:
                if abs(e) >= self.cut:
                    c = coeff.reduce_mod(c, self.cmod)
                    if coeff.is_zero(c):
                        continue
                out.append((e, c))
            return tuple(out)
        # division by a monic polynomial in x (sign +1) or x^-1 (sign -1)
        acc = dict(data)
        d = self.cut
        sgn = 1 if base.sign > 0 else -1
        while True:
            top = [e for e in acc if abs(e) >= d]
            if not top:
                break
            e = max(top, key=abs)
            c = acc[e]
            shift = e - sgn * d
            for ge, gc in self.monic:
                ne = ge + shift
                val = coeff.sub(acc.get(ne, coeff.zero_data()), coeff.mul(c, gc))
                if coeff.is_zero(val):
                    acc.pop(ne, None)
                else:
                    acc[ne] = val
        return tuple(sorted(acc.items()))

    def zero_data(self):
        return ()

    def one_data(self):
        return self._reduce(self.base.one_data())

    def from_int(self, k):
        return self._reduce(self.base.from_int(k))

    def add(self, a, b):
        return self._reduce(self.base.add(a, b))

    def neg(self, a):
        return self._reduce(self.base.neg(a))

    def mul(self, a, b):
        return self._reduce(self.base.mul(a, b))

    # units -----------------------------------------------------------------
    def _unit_monomial_candidates(self, a):
        for e, c in a:
            if e == 0 and self.base.base.is_unit(c):
                yield ((e, c),)

    def _nilpotent(self, t):
        power = t
        for _ in range(8):
            try:
                power = self.mul(power, power)
            except DegreeOverflowError:
                return False
            if not power:
                return True
        return False

    def _monomial_inverse(self, m):
        ((e, c),) = m
        return ((0, self.base.base.inverse(c)),)

    def inverse(self, a):
        try:
            return _inverse_by_neumann(self, a)
        except RingError:
            if not self.is_finite():
                raise
        one = self.one_data()
        for b in self.elements():
            if self.mul(a, b) == one:
                return b
        raise RingError(f"{self.format(a)} is not invertible in {self}")

    def generator_names(self):
        return self.base.generator_names()

    def generator_power(self, name, exponent):
        inner = self.base.generator_power(name, exponent)
        return None if inner is None else self._reduce(inner)

    # filtration & coordinates ---------------------------------------------
    def has_filtration(self):
        return self.mode == "monomial"

    def degree(self, a):
        if self.mode != "monomial":
            raise RingError(f"{self} carries no degree filtration")
        return self.base.degree(a)

    def truncate(self, a, D):
        if self.mode != "monomial":
            raise RingError(f"{self} carries no degree filtration")
        return self.base.truncate(a, D)

    def coords(self, a):
        return self.base.coords(a)

    def from_coords(self, coords):
        return self._reduce(self.base.from_coords(coords))

    def basis_keys(self, D=None):
        if self.mode == "monic":
            return self.base.basis_keys(self.cut - 1)
        return self.base.basis_keys(D)

    def modulus(self, key):
        inner = self.base.modulus(key)
        if self.mode == "monomial" and abs(self.base.key_degree(key)) >= self.cut:
            return math.gcd(inner, self.cmod) if inner else self.cmod
        return inner

    def key_degree(self, key):
        return self.base.key_degree(key)

    def nilpotent(self, a) -> bool:
        return self._nilpotent(a)

    def is_finite(self):
        return self.mode == "monic" and self.base.base.is_finite()

    def elements(self):
        if not self.is_finite():
            raise RingError(f"{self} is not finite")
        exps = self.base.exponents(self.cut - 1)
        coeffs = list(self.base.base.elements())

        def rec(i, acc):
            if i == len(exps):
                yield self.canon(list(acc))
                return
            for c in coeffs:
                acc.append((exps[i], c))
                yield from rec(i + 1, acc)
                acc.pop()

        return rec(0, [])

    def random(self, rng, D=2):
        if self.mode == "monic":
            return self.canon([(e, self.base.base.random(rng)) for e in self.basis_keys()])
        return self._reduce(self.base.random(rng, D))

    def evaluate(self, a, target, images):
        return self.base.evaluate(a, target, images)

    def relations_hold(self, target, images):
        if not self.base.relations_hold(target, images):
            return False
        return target.is_zero(self.base.evaluate(self.generator, target, images))

    def format(self, a):
        return self.base.format(a)

    def parse(self, text):
        return self.element(self._reduce(self.base.parse(text).data))

    def to_json(self):
        return {"quot": {**self.base.to_json(), "by": self.base.format(self.generator)}}

    def __str__(self):
        return f"{self.base}/<{self.base.format(self.generator)}>"


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------


class Product(Ring):
    """Finite product of rings sharing a coordinate backend."""

    def __init__(self, factors: Sequence[Ring]):
        factors = tuple(factors)
        if len(factors) < 2:
            raise RingError("a product needs at least two factors")
        backends = {f.backend for f in factors}
        if len(backends) != 1:
            raise RingError("product factors must share a coordinate backend")
        object.__setattr__(self, "factors", factors)

    def __setattr__(self, key, value):
        raise AttributeError("rings are immutable")

    def __eq__(self, other):
        return isinstance(other, Product) and self.factors == other.factors

    def __hash__(self):
        return hash(("prod", self.factors))

    @property
    def backend(self):
        return self.factors[0].backend

    def canon(self, data):
        if not isinstance(data, (tuple, list)) or len(data) != len(self.factors):
            raise RingError(f"product element needs {len(self.factors)} components")
        return tuple(f.canon(x) for f, x in zip(self.factors, data))

    def zero_data(self):
        return tuple(f.zero_data() for f in self.factors)

    def one_data(self):
        return tuple(f.one_data() for f in self.factors)

    def from_int(self, k):
        return tuple(f.from_int(k) for f in self.factors)

    def add(self, a, b):
        return tuple(f.add(x, y) for f, x, y in zip(self.factors, a, b))

    def neg(self, a):
        return tuple(f.neg(x) for f, x in zip(self.factors, a))

    def mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def is_zero(self, a):
        return all(f.is_zero(x) for f, x in zip(self.factors, a))

    def is_unit(self, a):
        return all(f.is_unit(x) for f, x in zip(self.factors, a))

    def inverse(self, a):
        return tuple(f.inverse(x) for f, x in zip(self.factors, a))

    def has_filtration(self):
        return any(f.has_filtration() for f in self.factors)

    def degree(self, a):
        # unfiltered factors sit in degree 0
        return max((f.degree(x) if f.has_filtration() else 0) for f, x in zip(self.factors, a))

    def truncate(self, a, D):
        return tuple(f.truncate(x, D) if f.has_filtration() else x for f, x in zip(self.factors, a))

    def coords(self, a):
        out = {}
        for i, (f, x) in enumerate(zip(self.factors, a)):
            for k, v in f.coords(x).items():
                out[(i, k)] = v
        return out

    def from_coords(self, coords):
        parts: list[dict] = [{} for _ in self.factors]
        for (i, k), v in coords.items():
            parts[i][k] = v
        return tuple(f.from_coords(p) for f, p in zip(self.factors, parts))

    def basis_keys(self, D=None):
        return [(i, k) for i, f in enumerate(self.factors) for k in f.basis_keys(D)]

    def modulus(self, key):
        i, k = key
        return self.factors[i].modulus(k)

    def key_degree(self, key):
        i, k = key
        return self.factors[i].key_degree(k)

    def is_finite(self):
        return all(f.is_finite() for f in self.factors)

    def elements(self):
        import itertools

        return itertools.product(*(list(f.elements()) for f in self.factors))

    def random(self, rng, D=2):
        return tuple(f.random(rng, D) for f in self.factors)

    def evaluate(self, a, target, images):
        raise RingError("homomorphisms out of a product ring are not supported")

    def format(self, a):
        return "(" + ", ".join(f.format(x) for f, x in zip(self.factors, a)) + ")"

    def to_json(self):
        return {"prod": [f.to_json() for f in self.factors]}

    def __str__(self):
        return " x ".join(f"({f})" for f in self.factors)


# ---------------------------------------------------------------------------
# Element parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z])|(\^)|([-+*(),/]))")


class _Parser:
    def __init__(self, text: str):
        if not isinstance(text, str):
            raise ParseError(f"element text must be a string, got {text!r}")
        text = text.replace("−", "-").strip()
        self.text = text
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip() == "":
                    break
                raise ParseError(f"unexpected character {text[pos]!r} in {text!r}")
            pos = m.end()
            if m.group(1):
                self.tokens.append(("int", m.group(1)))
            elif m.group(2):
                self.tokens.append(("id", m.group(2)))
            elif m.group(3):
                self.tokens.append(("op", "^"))
            else:
                self.tokens.append(("op", m.group(4)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ParseError("empty element text")
        node = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return node

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        terms = [("neg", self.term()) if sign < 0 else self.term()]
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else ("neg", t))
        return ("sum", terms) if len(terms) > 1 else terms[0]

    def _starts_factor(self):
        kind, val = self.peek()
        return kind in ("int", "id") or (kind == "op" and val == "(")

    def term(self):
        factors = [self.factor()]
        while True:
            if self.peek() == ("op", "*"):
                self.take()
                factors.append(self.factor())
            elif self._starts_factor():
                factors.append(self.factor())
            else:
                break
        return ("prod", factors) if len(factors) > 1 else factors[0]

    def factor(self):
        kind, val = self.peek()
        if (kind, val) == ("int", "1") and self.tokens[self.i + 1 : self.i + 2] == [("op", "/")]:
            # the shorthand 1/x for x^-1
            self.take()
            self.take("/")
            kind, name = self.take()
            if kind != "id":
                raise ParseError(f"variable expected after 1/ in {self.text!r}")
            exp = self._exponent()
            return ("gen", name, -(1 if exp is None else exp))
        atom = self.atom()
        exp = self._exponent()
        if exp is None:
            return atom
        if atom[0] == "gen":
            return ("gen", atom[1], atom[2] * exp)
        return ("pow", atom, exp)

    def _exponent(self):
        if self.peek() != ("op", "^"):
            return None
        self.take()
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        kind, val = self.take()
        if kind != "int":
            raise ParseError(f"integer exponent expected in {self.text!r}")
        return sign * int(val)

    def atom(self):
        kind, val = self.take()
        if kind == "int":
            return ("int", int(val))
        if kind == "id":
            return ("gen", val, 1)
        if val == "(":
            first = self.expr()
            if self.peek() == ("op", ","):
                items = [first]
                while self.peek() == ("op", ","):
                    self.take()
                    items.append(self.expr())
                self.take(")")
                return ("tuple", items)
            self.take(")")
            return first
        raise ParseError(f"unexpected {val!r} in {self.text!r}")


def _evaluate_ast(node, ring: Ring):
    kind = node[0]
    if kind == "int":
        return ring.from_int(node[1])
    if kind == "gen":
        data = ring.generator_power(node[1], node[2])
        if data is None:
            raise ParseError(f"{node[1]}^{node[2]} is not an element of {ring}")
        return data
    if kind == "neg":
        return ring.neg(_evaluate_ast(node[1], ring))
    if kind == "sum":
        acc = ring.zero_data()
        for t in node[1]:
            acc = ring.add(acc, _evaluate_ast(t, ring))
        return acc
    if kind == "prod":
        acc = ring.one_data()
        for t in node[1]:
            acc = ring.mul(acc, _evaluate_ast(t, ring))
        return acc
    if kind == "pow":
        base = _evaluate_ast(node[1], ring)
        e = node[2]
        if e < 0:
            base = ring.inverse(base)
            e = -e
        return _data_pow(ring, base, e)
    if kind == "tuple":
        if not isinstance(ring, Product) or len(ring.factors) != len(node[1]):
            raise ParseError(f"tuple does not match {ring}")
        return tuple(_evaluate_ast(sub, f) for sub, f in zip(node[1], ring.factors))
    raise ParseError(f"bad node {node!r}")


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------


class RingHom:
    """A ring homomorphism fixed by the images of the source generators.

    ``images`` maps generator strings of the source (``"x"``, ``"x^-1"``,
    ``"w"``) to target elements or element strings.  Missing generators map to
    the same-named generator of the target.  Relations of the source (``n = 0``,
    the minimal polynomial of ``w``, quotient generators, invertibility of a
    Laurent variable) are checked at construction.
    """

    def __init__(self, source: Ring, target: Ring, images: dict | None = None):
        self.source = source
        self.target = target
        resolved: dict[str, Any] = {}
        for key, value in (images or {}).items():
            if isinstance(value, RingElement):
                if value.ring != target:
                    raise RingError("image lies in the wrong ring")
                resolved[key] = value.data
            elif isinstance(value, str):
                resolved[key] = target.parse(value).data
            else:
                resolved[key] = target.canon(value)
        for key in _generator_keys(source):
            if key not in resolved:
                resolved[key] = _default_image(key, target)
        self.images = resolved
        if not source.relations_hold(target, resolved):
            raise RingError(f"generator images do not define a homomorphism {source} -> {target}")

    def __call__(self, e: RingElement) -> RingElement:
        return hom_apply(self, e)

    def apply_data(self, data):
        return self.source.evaluate(data, self.target, self.images)

    def degree_non_increasing(self) -> bool:
        """Generators of filtered sources go to elements of degree <= 1."""
        if not (self.source.has_filtration() and self.target.has_filtration()):
            return True
        for key in _generator_keys(self.source):
            if key == "w":
                continue
            if self.target.degree(self.images[key]) > 1:
                return False
        return True

    def is_graded(self) -> bool:
        """Each generator maps to a homogeneous element of the same signed degree."""
        if not self.target.has_filtration() and not self.source.has_filtration():
            return True
        for key in _generator_keys(self.source):
            want = 0 if key == "w" else (-1 if key.endswith("^-1") else 1)
            if not _homogeneous_of_degree(self.target, self.images[key], want):
                return False
        return True

    def to_json(self):
        return {k: self.target.format(v) for k, v in self.images.items()}

    def __repr__(self):
        return f"RingHom({self.source} -> {self.target}, {self.to_json()})"


def _homogeneous_of_degree(ring: Ring, data, degree: int) -> bool:
    keys = ring.coords(data).keys()
    return all(ring.key_degree(k) == degree for k in keys)


def _generator_keys(ring: Ring) -> list[str]:
    if isinstance(ring, _Monomials):
        return [ring._image_key()] + _generator_keys(ring.base)
    if isinstance(ring, Quotient):
        return _generator_keys(ring.base)
    if isinstance(ring, GaloisField):
        return ["w"] if ring.m > 1 else []
    return []


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def canonicalize(e: RingElement) -> RingElement:
    """Canonical representative of ``e`` (idempotent)."""
    return RingElement(e.ring, e.ring.canon(e.data))


def hom_apply(h: RingHom, e: RingElement) -> RingElement:
    if e.ring != h.source:
        raise RingError(f"element of {e.ring} given to a hom from {h.source}")
    return RingElement(h.target, h.apply_data(e.data))


def degree_truncate(e: RingElement, D: int) -> RingElement:
    """Drop all monomials of absolute degree greater than ``D``."""
    return e.truncate(D)


# ---------------------------------------------------------------------------
# JSON forms
# ---------------------------------------------------------------------------


def ring_from_json(obj) -> Ring:
    if obj == "Z":
        return Integers()
    if isinstance(obj, dict) and len(obj) == 1:
        (key, val), = obj.items()
        if key == "zmod":
            return IntegersMod(int(val))
        if key == "gf":
            order = int(val)
            m = order.bit_length() - 1
            if order != 1 << m:
                raise ParseError(f"GF order must be a power of two, got {order}")
            return GaloisField(m)
        if key in ("poly", "laurent"):
            if not isinstance(val, list) or len(val) not in (2, 3):
                raise ParseError(f"{key} expects [base, var(, max_degree)]")
            base = ring_from_json(val[0])
            maxd = val[2] if len(val) == 3 else None
            cls = Poly if key == "poly" else Laurent
            return cls(base, val[1], maxd)
        if key == "quot":
            if not isinstance(val, dict) or "by" not in val:
                raise ParseError("quot expects an object with 'by'")
            rest = {k: v for k, v in val.items() if k != "by"}
            base_obj = rest["base"] if "base" in rest else rest
            return Quotient(ring_from_json(base_obj), val["by"])
        if key == "prod":
            return Product([ring_from_json(v) for v in val])
    raise ParseError(f"unknown ring descriptor {obj!r}")


def ring_to_json(ring: Ring):
    return ring.to_json()


def element_from_json(obj) -> RingElement:
    if not isinstance(obj, dict) or "ring" not in obj or "elem" not in obj:
        raise ParseError("element JSON needs 'ring' and 'elem'")
    ring = ring_from_json(obj["ring"])
    return ring.parse(str(obj["elem"]))


def element_to_json(e: RingElement) -> dict:
    return {"ring": e.ring.to_json(), "elem": str(e)}


def iter_finite(ring: Ring) -> Iterable[RingElement]:
    for data in ring.elements():
        yield ring.element(ring.canon(data))
