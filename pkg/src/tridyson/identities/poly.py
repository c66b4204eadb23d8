"""Polynomials in lambda over exact rationals."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Tuple, Union

from tridyson.tridiag import SymTridiag

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class RationalPoly:
    """Coefficients in ascending degree; the zero polynomial has no coefficients."""

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        coeffs = [Fraction(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def constant(cls, value: Scalar) -> "RationalPoly":
        return cls((Fraction(value),))

    @classmethod
    def linear(cls, root: Scalar) -> "RationalPoly":
        """lam - root."""
        return cls((-Fraction(root), Fraction(1)))

    @classmethod
    def interpolate(cls, points: Sequence[Scalar], values: Sequence[Scalar]) -> "RationalPoly":
        """Unique polynomial of degree < len(points) through (points, values)."""
        if len(points) != len(values):
            raise ValueError("points and values differ in length")
        if len(set(points)) != len(points):
            raise ValueError("interpolation points must be distinct")
        out = cls()
        for i, (xi, yi) in enumerate(zip(points, values)):
            basis = cls.constant(1)
            denom = Fraction(1)
            for j, xj in enumerate(points):
                if j != i:
                    basis = basis * cls.linear(xj)
                    denom *= Fraction(xi) - Fraction(xj)
            out = out + basis * (Fraction(yi) / denom)
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, lam: Scalar) -> Fraction:
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * lam + c
        return out

    def _lift(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        return other if isinstance(other, RationalPoly) else RationalPoly.constant(other)

    def __add__(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        other = self._lift(other)
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (size - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (size - len(other.coeffs))
        return RationalPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other: Scalar) -> "RationalPoly":
        return self._lift(other) - self

    def __mul__(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(tuple(out))

    __rmul__ = __mul__

    def derivative(self) -> "RationalPoly":
        return RationalPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __repr__(self) -> str:
        if self.is_zero():
            return "RationalPoly(0)"
        terms = " + ".join(f"({c})*lam^{k}" for k, c in enumerate(self.coeffs) if c != 0)
        return f"RationalPoly({terms})"


def charpoly_poly(H: SymTridiag) -> RationalPoly:
    """det(lam*I - H) built from the continuant recurrence over polynomials."""
    prev, cur = RationalPoly(), RationalPoly.constant(1)
    for k in range(H.n):
        b2 = Fraction(H.offdiag[k - 1]) ** 2 if k > 0 else Fraction(0)
        prev, cur = cur, RationalPoly.linear(H.diag[k]) * cur - prev * b2
    return cur


def det_poly(det_at: Callable[[Fraction], Fraction], degree: int) -> RationalPoly:
    """Polynomial of at most `degree` recovered from exact evaluations at 0..degree."""
    points = [Fraction(p) for p in range(max(degree, 0) + 1)]
    return RationalPoly.interpolate(points, [det_at(p) for p in points])
