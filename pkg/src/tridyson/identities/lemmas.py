"""Exact checks of the determinant identities behind the eigenvalue SDEs.

Each check takes one instance and returns an IdentityReport with one instance
counted. Derivatives with respect to matrix entries are taken as exact finite
differences: det(lam*I - H) is affine in a diagonal entry and quadratic in a
symmetric off-diagonal pair, so two or three evaluations determine them.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Sequence

import numpy as np

from tridyson.identities.exact import IdentityReport
from tridyson.identities.poly import RationalPoly, charpoly_poly, det_poly
from tridyson.tridiag import RationalTridiag, exact_det, submatrix

logger = logging.getLogger(__name__)

# Tridiagonal, a_{21} = a_{22} = 0, yet det = -1.
ZERO_PIVOT_COUNTEREXAMPLE = ((1, 1, 0), (0, 0, 1), (0, 1, 2))


def minor_poly(H: RationalTridiag, rows: Sequence[int], cols: Sequence[int]) -> RationalPoly:
    """det((lam*I - H) with 1-based rows and cols removed) by dense elimination."""
    size = H.n - len(rows)

    def at(lam: Fraction) -> Fraction:
        return exact_det(submatrix(H.shifted_dense(lam), rows, cols))

    return det_poly(at, size)


def _shift_diag(H: RationalTridiag, k: int, delta: Fraction) -> RationalTridiag:
    diag = list(H.diag)
    diag[k - 1] += delta
    return RationalTridiag(tuple(diag), H.offdiag)


def _shift_offdiag(H: RationalTridiag, k: int, delta: Fraction) -> RationalTridiag:
    offdiag = list(H.offdiag)
    offdiag[k - 1] += delta
    return RationalTridiag(H.diag, tuple(offdiag))


def diag_partial(H: RationalTridiag, k: int) -> RationalPoly:
    """d f / d a_k."""
    return charpoly_poly(_shift_diag(H, k, Fraction(1))) - charpoly_poly(H)


def offdiag_partials(H: RationalTridiag, k: int):
    """(d f / d b_k, d^2 f / d b_k^2)."""
    up = charpoly_poly(_shift_offdiag(H, k, Fraction(1)))
    down = charpoly_poly(_shift_offdiag(H, k, Fraction(-1)))
    mid = charpoly_poly(H)
    return (up - down) * Fraction(1, 2), up - mid * 2 + down


def check_charpoly_derivatives(H: RationalTridiag) -> IdentityReport:
    """lam- and entry-derivatives of f(lam) = det(lam*I - H) against deleted minors."""
    report = IdentityReport("charpoly_derivatives")
    report.tick()
    n = H.n
    f = charpoly_poly(H)
    report.record(f == minor_poly(H, [], []), H, "continuant differs from dense determinant")
    deleted = {k: minor_poly(H, [k], [k]) for k in range(1, n + 1)}

    total = RationalPoly()
    for k in range(1, n + 1):
        total = total + deleted[k]
    report.record(f.derivative() == total, H, "f_lam != sum_k det_{k|k}")

    pairs = RationalPoly()
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            pairs = pairs + minor_poly(H, [k, l], [k, l])
    report.record(f.derivative().derivative() == pairs * 2, H, "f_lamlam != 2 sum det_{kl|kl}")

    for k in range(1, n + 1):
        report.record(diag_partial(H, k) == -deleted[k], H, f"df/da_{k} != -det_{{{k}|{k}}}")
    for k in range(1, n):
        first, second = offdiag_partials(H, k)
        report.record(
            first == minor_poly(H, [k], [k + 1]) * 2, H, f"df/db_{k} != 2 det_{{{k}|{k + 1}}}"
        )
        report.record(
            second == minor_poly(H, [k, k + 1], [k, k + 1]) * -2,
            H,
            f"d2f/db_{k}^2 != -2 det_{{{k}{k + 1}|{k}{k + 1}}}",
        )
    return report


def check_cofactor_derivatives(A: np.ndarray) -> IdentityReport:
    """Entry derivatives of det A for symmetric A: cofactors, doubled off the diagonal."""
    report = IdentityReport("cofactor_derivatives")
    report.tick()
    A = np.asarray(A, dtype=object)
    n = A.shape[0]
    base = exact_det(A)
    for k in range(n):
        bumped = A.copy()
        bumped[k, k] = bumped[k, k] + 1
        expected = exact_det(submatrix(A, [k + 1], [k + 1]))
        report.record(exact_det(bumped) - base == expected, A, f"d det/d a_{k + 1}{k + 1}")
    for k in range(n):
        for l in range(k + 1, n):
            values = {}
            for t in (-1, 1):
                moved = A.copy()
                moved[k, l] = moved[k, l] + t
                moved[l, k] = moved[l, k] + t
                values[t] = exact_det(moved)
            derivative = (values[1] - values[-1]) / 2
            expected = (-1) ** (k + l) * 2 * exact_det(submatrix(A, [k + 1], [l + 1]))
            report.record(derivative == expected, A, f"d det/d a_{k + 1}{l + 1}")
    return report


def _zeroed(A: np.ndarray, entries: Sequence[tuple]) -> np.ndarray:
    out = np.asarray(A, dtype=object).copy()
    for i, j in entries:
        out[i - 1, j - 1] = Fraction(0)
    return out


def check_zero_pivot_scope(A: np.ndarray) -> IdentityReport:
    """Vanishing determinant of a tridiagonal matrix with a zeroed pivot column.

    For every k0 in 2..n-1, zeroing a_{k0,k0-1}, a_{k0,k0} and a_{k0+1,k0} must give
    det = 0. Zeroing only the first two is not enough; such cases with a nonzero
    determinant are kept as counterexamples, not failures.
    """
    report = IdentityReport("zero_pivot_scope")
    report.tick()
    A = np.asarray(A, dtype=object)
    n = A.shape[0]
    for k0 in range(2, n):
        column = _zeroed(A, [(k0, k0 - 1), (k0, k0), (k0 + 1, k0)])
        report.record(exact_det(column) == 0, column, f"zero pivot column at k0={k0}")
        row_pair = _zeroed(A, [(k0, k0 - 1), (k0, k0)])
        value = exact_det(row_pair)
        if value != 0:
            report.counterexamples.append(
                {"k0": k0, "det": str(value), "matrix": [[str(v) for v in r] for r in row_pair.tolist()]}
            )
    return report


def zero_pivot_counterexample() -> IdentityReport:
    """Record the fixed 3 x 3 matrix meeting a_{21} = a_{22} = 0 with det = -1."""
    report = IdentityReport("zero_pivot_scope")
    A = np.array([[Fraction(v) for v in row] for row in ZERO_PIVOT_COUNTEREXAMPLE], dtype=object)
    value = exact_det(A)
    if value != 0:
        report.counterexamples.append(
            {"k0": 2, "det": str(value), "matrix": [[str(v) for v in r] for r in A.tolist()]}
        )
    report.notes.append(
        "a_{k0,k0-1} = a_{k0,k0} = 0 alone does not force det = 0; "
        "the check zeroes a_{k0+1,k0} as well"
    )
    return report


def check_adjacent_deleted_minor(H: RationalTridiag) -> IdentityReport:
    """det_{k|k+1} = -b_k det_{k,k+1|k,k+1} as polynomials in lam, every k."""
    report = IdentityReport("adjacent_deleted_minor")
    report.tick()
    for k in range(1, H.n):
        left = minor_poly(H, [k], [k + 1])
        right = minor_poly(H, [k, k + 1], [k, k + 1]) * -H.offdiag[k - 1]
        report.record(left == right, H, f"k={k}")
    return report


def gradient_identity_sides(H: RationalTridiag):
    """Both sides of f_lam^2 - sum (f_a)^2 - 1/2 sum (f_b)^2 = -f sum f_bb + 2 sum D_kk D_ll."""
    n = H.n
    f = charpoly_poly(H)
    lhs = f.derivative() * f.derivative()
    laplacian = RationalPoly()
    for k in range(1, n + 1):
        fa = diag_partial(H, k)
        lhs = lhs - fa * fa
    for k in range(1, n):
        fb, fbb = offdiag_partials(H, k)
        lhs = lhs - fb * fb * Fraction(1, 2)
        laplacian = laplacian + fbb
    deleted = {k: minor_poly(H, [k], [k]) for k in range(1, n + 1)}
    rhs = -(f * laplacian)
    for k in range(1, n + 1):
        for l in range(k + 2, n + 1):
            rhs = rhs + deleted[k] * deleted[l] * 2
    return lhs, rhs


def check_gradient_identity(H: RationalTridiag) -> IdentityReport:
    report = IdentityReport("gradient_identity")
    report.tick()
    lhs, rhs = gradient_identity_sides(H)
    report.record(lhs == rhs, H, f"difference {lhs - rhs!r}")
    return report
