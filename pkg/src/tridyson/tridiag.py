"""Symmetric tridiagonal matrices, continuants and minor determinants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from tridyson.errors import RangeError

Number = Union[float, Fraction]

# Continuant pairs are rescaled once a magnitude leaves [2**-RESCALE_BITS, 2**RESCALE_BITS].
RESCALE_BITS = 512
_HIGH = 2.0**RESCALE_BITS
_LOW = 2.0**-RESCALE_BITS


class MinorRange(NamedTuple):
    """Contiguous principal block rows/cols p..q (1-based, inclusive)."""

    p: int
    q: int

    @property
    def size(self) -> int:
        return self.q - self.p + 1

    @property
    def is_empty(self) -> bool:
        return self.q == self.p - 1

    def validate(self, n: int) -> "MinorRange":
        p, q = self
        if p < 1 or q > n or p > q + 1:
            raise RangeError(f"invalid minor range ({p},{q}) for n={n}")
        return self

    def label(self) -> str:
        return f"{self.p}_{self.q}"


@dataclass(frozen=True)
class SymTridiag:
    """Real symmetric tridiagonal matrix stored as diagonal and off-diagonal."""

    diag: Tuple[float, ...]
    offdiag: Tuple[float, ...]

    def __post_init__(self) -> None:
        diag = tuple(self._coerce(v) for v in self.diag)
        offdiag = tuple(self._coerce(v) for v in self.offdiag)
        expected = max(len(diag) - 1, 0)
        if len(offdiag) != expected:
            raise ValueError(
                f"offdiag must have {expected} entries, got {len(offdiag)}"
            )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @staticmethod
    def _coerce(value: Any) -> Number:
        out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"non-finite matrix entry: {value!r}")
        return out

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def exact(self) -> bool:
        return False

    def zero(self) -> Number:
        return 0.0

    def one(self) -> Number:
        return 1.0

    def dense(self) -> np.ndarray:
        """Dense copy of the matrix (object dtype for exact entries)."""
        dtype = object if self.exact else float
        out = np.full((self.n, self.n), self.zero(), dtype=dtype)
        for k, a in enumerate(self.diag):
            out[k, k] = a
        for k, b in enumerate(self.offdiag):
            out[k, k + 1] = b
            out[k + 1, k] = b
        return out

    def shifted_dense(self, lam: Number) -> np.ndarray:
        """Dense lam*I - H."""
        out = -self.dense()
        for k in range(self.n):
            out[k, k] = out[k, k] + lam
        return out

    def gershgorin(self) -> Tuple[float, float]:
        """Interval containing every eigenvalue."""
        if self.n == 0:
            return 0.0, 0.0
        lo, hi = math.inf, -math.inf
        for k, a in enumerate(self.diag):
            radius = 0.0
            if k > 0:
                radius += abs(float(self.offdiag[k - 1]))
            if k < self.n - 1:
                radius += abs(float(self.offdiag[k]))
            lo = min(lo, float(a) - radius)
            hi = max(hi, float(a) + radius)
        return lo, hi


@dataclass(frozen=True)
class RationalTridiag(SymTridiag):
    """SymTridiag over exact rationals."""

    @staticmethod
    def _coerce(value: Any) -> Number:
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"non-finite matrix entry: {value!r}")
        return Fraction(value)

    @property
    def exact(self) -> bool:
        return True

    def zero(self) -> Number:
        return Fraction(0)

    def one(self) -> Number:
        return Fraction(1)


def as_range(r: Union[MinorRange, Sequence[int]]) -> MinorRange:
    return r if isinstance(r, MinorRange) else MinorRange(int(r[0]), int(r[1]))


def minor(H: SymTridiag, r: Union[MinorRange, Sequence[int]]) -> SymTridiag:
    """Principal block H^{p,q}; the empty ranges give the size-0 matrix."""
    p, q = as_range(r).validate(H.n)
    offdiag = H.offdiag[p - 1 : q - 1] if q > p else ()
    return type(H)(H.diag[p - 1 : q], offdiag)


def _scaled_continuants(H: SymTridiag, lam: float) -> List[Tuple[float, int]]:
    """(mantissa, exponent) pairs with f_k = mantissa * 2**exponent."""
    out: List[Tuple[float, int]] = [(1.0, 0)]
    prev, cur, exponent = 0.0, 1.0, 0
    for k in range(H.n):
        b2 = H.offdiag[k - 1] ** 2 if k > 0 else 0.0
        prev, cur = cur, (lam - H.diag[k]) * cur - b2 * prev
        big = max(abs(prev), abs(cur))
        if big > _HIGH or (0.0 < big < _LOW):
            _, shift = math.frexp(big)
            prev = math.ldexp(prev, -shift)
            cur = math.ldexp(cur, -shift)
            exponent += shift
        out.append((cur, exponent))
    return out


def _collapse(mantissa: float, exponent: int) -> float:
    try:
        return math.ldexp(mantissa, exponent)
    except OverflowError:
        return math.copysign(math.inf, mantissa)


def _exact_continuants(H: SymTridiag, lam: Number) -> List[Number]:
    out: List[Number] = [H.one()]
    prev, cur = H.zero(), H.one()
    for k in range(H.n):
        b2 = H.offdiag[k - 1] ** 2 if k > 0 else H.zero()
        prev, cur = cur, (lam - H.diag[k]) * cur - b2 * prev
        out.append(cur)
    return out


def leading_continuants(H: SymTridiag, lam: Number) -> List[Number]:
    """(f_0, ..., f_n) with f_k = det(lam*I_k - H^{1,k})."""
    if H.exact:
        return _exact_continuants(H, Fraction(lam))
    return [_collapse(m, e) for m, e in _scaled_continuants(H, float(lam))]


def charpoly_eval(H: SymTridiag, lam: Number) -> Number:
    """det(lam*I - H) by the three-term continuant recurrence."""
    if H.exact:
        return _exact_continuants(H, Fraction(lam))[-1]
    return _collapse(*_scaled_continuants(H, float(lam))[-1])


def block_charpoly(H: SymTridiag, p: int, q: int, lam: Number) -> Number:
    """Characteristic polynomial of H^{p,q} at lam (1 for empty ranges)."""
    return charpoly_eval(minor(H, (p, q)), lam)


def _check_index(H: SymTridiag, *indices: int) -> None:
    for k in indices:
        if not 1 <= k <= H.n:
            raise RangeError(f"index {k} out of range for n={H.n}")


def deleted_minor_det(H: SymTridiag, lam: Number, k: int, l: int) -> Number:
    """det((lam*I - H)_{k|l}): row k and column l removed."""
    _check_index(H, k, l)
    if k == l:
        return block_charpoly(H, 1, k - 1, lam) * block_charpoly(H, k + 1, H.n, lam)
    lo, hi = min(k, l), max(k, l)
    chain = H.one()
    for j in range(lo, hi):
        chain = chain * -H.offdiag[j - 1]
    return block_charpoly(H, 1, lo - 1, lam) * chain * block_charpoly(H, hi + 1, H.n, lam)


def pair_deleted_minor_det(H: SymTridiag, lam: Number, k: int, l: int) -> Number:
    """det((lam*I - H)_{kl|kl}) for k < l."""
    _check_index(H, k, l)
    if k >= l:
        raise RangeError(f"pair-deleted minor needs k < l, got ({k},{l})")
    return (
        block_charpoly(H, 1, k - 1, lam)
        * block_charpoly(H, k + 1, l - 1, lam)
        * block_charpoly(H, l + 1, H.n, lam)
    )


def submatrix(M: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    """Remove the given 1-based rows and columns."""
    keep_r = [i for i in range(M.shape[0]) if i + 1 not in set(rows)]
    keep_c = [j for j in range(M.shape[1]) if j + 1 not in set(cols)]
    return M[np.ix_(keep_r, keep_c)]


def deleted_minor_det_dense(H: SymTridiag, lam: Number, k: int, l: int) -> Number:
    """Oracle for deleted_minor_det by elimination on the dense minor."""
    _check_index(H, k, l)
    return det(submatrix(H.shifted_dense(lam), [k], [l]))


def dense_det(M: Any) -> float:
    """Determinant of a real square matrix via pivoted LU."""
    arr = np.asarray(M, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"square matrix required, got shape {arr.shape}")
    if arr.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(arr))


def exact_det(M: Any) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination with row pivoting."""
    rows = [[Fraction(v) for v in row] for row in np.asarray(M, dtype=object).tolist()]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("square matrix required")
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if rows[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if rows[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]) / prev
            rows[i][k] = Fraction(0)
        prev = pivot
    return sign * rows[n - 1][n - 1]


def det(M: np.ndarray) -> Number:
    """Exact determinant for object arrays of rationals, float LU otherwise."""
    if isinstance(M, np.ndarray) and M.dtype == object:
        return exact_det(M)
    return dense_det(M)
