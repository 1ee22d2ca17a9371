"""Arithmetic over GF(p): elements, polynomials, interpolation and
error-tolerant decoding.

The protocol code works on plain ``int`` residues for speed; the
``FieldElement`` / ``Polynomial`` types are the checked public surface and
both sides share the same modular helpers defined here.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

DEFAULT_PRIME = 2**31 - 1


class FieldError(ValueError):
    """Raised on modulus mismatch, inversion of zero or duplicate x values."""


class NoDecode(Exception):
    """No unique low-degree polynomial explains the points.

    Used as a value by :func:`decode_with_errors` (it is returned, not
    raised) so that callers can branch on it cheaply.
    """

    def __init__(self, reason: str = "no consistent polynomial"):
        super().__init__(reason)
        self.reason = reason

    def __repr__(self):
        return f"NoDecode({self.reason!r})"

    def __eq__(self, other):
        return isinstance(other, NoDecode)

    def __hash__(self):
        return hash(NoDecode)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


_checked_primes = set()


def check_prime(p: int) -> int:
    if p not in _checked_primes:
        if not is_prime(p):
            raise FieldError(f"modulus {p} is not prime")
        _checked_primes.add(p)
    return p


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise FieldError("inverse of zero")
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class FieldElement:
    value: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise FieldError(f"modulus mismatch: {self.p} vs {other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value + b, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value - b, self.p)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(b - self.value, self.p)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * b, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def inverse(self) -> "FieldElement":
        return FieldElement(inv_mod(self.value, self.p), self.p)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * inv_mod(b, self.p), self.p)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def _normalize(coeffs: Sequence[int]) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial over GF(p), constant term first.

    Trailing zeros are stripped, so the zero polynomial has no coefficients
    and degree -1.
    """

    coeffs: tuple
    p: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(
            self, "coeffs", _normalize([int(c) % self.p for c in self.coeffs])
        )

    @classmethod
    def from_elements(cls, elements: Iterable[FieldElement]) -> "Polynomial":
        elements = list(elements)
        if not elements:
            raise FieldError("cannot infer modulus from an empty coefficient list")
        p = elements[0].p
        if any(e.p != p for e in elements):
            raise FieldError("modulus mismatch among coefficients")
        return cls(tuple(e.value for e in elements), p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coefficients(self) -> tuple:
        return tuple(FieldElement(c, self.p) for c in self.coeffs)

    def __call__(self, x):
        if isinstance(x, FieldElement):
            if x.p != self.p:
                raise FieldError(f"modulus mismatch: {self.p} vs {x.p}")
            return FieldElement(horner(self.coeffs, x.value, self.p), self.p)
        return horner(self.coeffs, x, self.p)

    def __repr__(self):
        if not self.coeffs:
            return f"Polynomial(0 mod {self.p})"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if i == 0 else f"{c}x" if i == 1 else f"{c}x^{i}")
        return f"Polynomial({' + '.join(terms)} mod {self.p})"


def horner(coeffs: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def poly_eval(poly: Polynomial, x: FieldElement) -> FieldElement:
    return poly(x)


def interpolate_ints(points: Sequence[tuple], p: int) -> tuple:
    """Lagrange interpolation on int residues; returns normalized coefficients."""
    xs = [x % p for x, _ in points]
    if len(set(xs)) != len(xs):
        raise FieldError("duplicate x in interpolation points")
    k = len(points)
    result = [0] * k
    for i, (xi, yi) in enumerate(points):
        xi %= p
        # basis numerator prod_{j != i} (x - xj), built up coefficient-wise
        basis = [1]
        denom = 1
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            xj %= p
            nxt = [0] * (len(basis) + 1)
            for d, c in enumerate(basis):
                nxt[d] = (nxt[d] - c * xj) % p
                nxt[d + 1] = (nxt[d + 1] + c) % p
            basis = nxt
            denom = denom * (xi - xj) % p
        scale = yi * inv_mod(denom, p) % p
        for d, c in enumerate(basis):
            result[d] = (result[d] + c * scale) % p
    return _normalize(result)


def _split_points(points):
    out = []
    p = None
    for x, y in points:
        for v in (x, y):
            if isinstance(v, FieldElement):
                if p is None:
                    p = v.p
                elif v.p != p:
                    raise FieldError("modulus mismatch among points")
        out.append((int(x), int(y)))
    return out, p


def interpolate(points, p: int | None = None) -> Polynomial:
    """Unique polynomial of degree < len(points) through ``points``.

    Points may be ``FieldElement`` pairs or ints (then ``p`` is required).
    """
    pts, inferred = _split_points(points)
    p = p if p is not None else inferred
    if p is None:
        raise FieldError("modulus required for integer points")
    return Polynomial(interpolate_ints(pts, p), p)


def decode_ints(points: Sequence[tuple], degree: int, max_errors: int, p: int):
    """Error-tolerant decode on int residues by subset enumeration.

    Returns ``(coeffs, corrupted_xs)`` or a :class:`NoDecode` instance.
    """
    xs = [x % p for x, _ in points]
    if len(set(xs)) != len(xs):
        raise FieldError("duplicate x in decode points")
    pts = [(x % p, y % p) for x, y in points]
    need = len(pts) - max_errors
    if need <= 0:
        return NoDecode("too many errors allowed for the number of points")
    if need < degree + 1:
        # fewer constraints than unknowns: every candidate has p-fold siblings
        return NoDecode("ambiguous: underdetermined")
    found = {}
    for subset in combinations(range(len(pts)), degree + 1):
        coeffs = interpolate_ints([pts[i] for i in subset], p)
        if len(coeffs) - 1 > degree or coeffs in found:
            continue
        agree = [i for i, (x, y) in enumerate(pts) if horner(coeffs, x, p) == y]
        if len(agree) >= need:
            found[coeffs] = frozenset(
                pts[i][0] for i in range(len(pts)) if i not in set(agree)
            )
            if len(found) > 1:
                return NoDecode("ambiguous: several polynomials fit")
    if not found:
        return NoDecode()
    (coeffs, bad), = found.items()
    return coeffs, set(bad)


def decode_with_errors(points, target_degree: int, max_errors: int, p: int | None = None):
    """Find the unique polynomial of degree <= ``target_degree`` agreeing with
    all but at most ``max_errors`` of ``points``.

    Returns ``(Polynomial, corrupted_x_set)`` or a :class:`NoDecode` value;
    two distinct consistent candidates also yield ``NoDecode``.
    """
    pts, inferred = _split_points(points)
    p = p if p is not None else inferred
    if p is None:
        raise FieldError("modulus required for integer points")
    res = decode_ints(pts, target_degree, max_errors, p)
    if isinstance(res, NoDecode):
        return res
    coeffs, bad = res
    return Polynomial(coeffs, p), bad


def line_through(x1: int, y1: int, x2: int, y2: int, p: int) -> tuple:
    """(intercept, slope) of the degree <= 1 polynomial through two points."""
    slope = (y2 - y1) * inv_mod(x2 - x1, p) % p
    return (y1 - slope * x1) % p, slope


def collinear(points: Sequence[tuple], p: int) -> bool:
    """True when all points lie on one polynomial of degree <= 1."""
    if len(points) <= 2:
        return True
    (x1, y1), (x2, y2) = points[0], points[1]
    c0, c1 = line_through(x1, y1, x2, y2, p)
    return all((c0 + c1 * x - y) % p == 0 for x, y in points[2:])
