"""Linear-algebra facts the SDE derivation leans on, checked on random instances."""
from __future__ import annotations

import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, Optional, Sequence

import numpy as np

from tridyson.dyson.coefficients import laplacian_at
from tridyson.dyson.paths import EigenSnapshot
from tridyson.eig import Spectrum, charpoly_derivs_from_minors, check_interlacing, eigenvalues
from tridyson.errors import DomainError
from tridyson.identities.exact import IdentityReport
from tridyson.identities.poly import det_poly
from tridyson.tridiag import SymTridiag, exact_det, minor, submatrix

logger = logging.getLogger(__name__)

ROOT_DRIFT_RTOL = 1e-8
LAPLACIAN_RTOL = 1e-3
# Brackets narrower than this only stop at the last representable split.
FINE_TOL = 1e-15


def _float_matrix(H: SymTridiag) -> SymTridiag:
    return SymTridiag(tuple(float(v) for v in H.diag), tuple(float(v) for v in H.offdiag))


def check_root_drift(H: SymTridiag, eigs: Optional[Sequence[float]] = None) -> IdentityReport:
    """f''/f' at each eigenvalue equals twice the sum of reciprocal gaps."""
    report = IdentityReport("root_drift", mode="float")
    report.tick()
    H = _float_matrix(H)
    values = eigenvalues(H, FINE_TOL).values if eigs is None else tuple(eigs)
    for i, lam in enumerate(values):
        _, f1, f2 = charpoly_derivs_from_minors(H, lam)
        expected = 2.0 * sum(1.0 / (lam - mu) for j, mu in enumerate(values) if j != i)
        ok = abs(f2 / f1 - expected) <= ROOT_DRIFT_RTOL * max(1.0, abs(expected))
        report.record(ok, H, f"i={i + 1}: f''/f' = {f2 / f1!r}, 2 sum 1/gap = {expected!r}")
    return report


def check_principal_minor_sums(A: np.ndarray) -> IdentityReport:
    """Coefficient of lam^(n-k) in det(lam*I - A) is (-1)^k times the sum of k x k principal minors."""
    report = IdentityReport("principal_minor_sums")
    report.tick()
    A = np.asarray(A, dtype=object)
    n = A.shape[0]

    def at(lam: Fraction) -> Fraction:
        shifted = -A
        for k in range(n):
            shifted[k, k] = shifted[k, k] + lam
        return exact_det(shifted)

    coeffs = det_poly(at, n).coeffs
    coeffs = coeffs + (Fraction(0),) * (n + 1 - len(coeffs))
    for k in range(1, n + 1):
        total = Fraction(0)
        for idx in itertools.combinations(range(n), k):
            total += exact_det(A[np.ix_(idx, idx)])
        report.record(coeffs[n - k] == (-1) ** k * total, A, f"k={k}")
    return report


def twice_cofactor_terms(A: np.ndarray, k: int, l: int) -> Dict[str, Fraction]:
    """The eight sums of det A expanded along row k, then row l (1-based, k < l).

    d(p, q) is the minor of A with rows k, l and columns p, q deleted. Terms with
    a_kl or a_lk come apart from the general a_kp a_lq sum, and every sum splits on
    the order of its column indices.
    """
    A = np.asarray(A, dtype=object)
    n = A.shape[0]
    if not 1 <= k < l <= n:
        raise DomainError(f"need 1 <= k < l <= {n}, got (k, l)=({k}, {l})")

    def a(i: int, j: int) -> Fraction:
        return A[i - 1, j - 1]

    def d(p: int, q: int) -> Fraction:
        return exact_det(submatrix(A, [k, l], [p, q]))

    others = [j for j in range(1, n + 1) if j not in (k, l)]
    terms = {
        "a_kk": a(k, k) * exact_det(submatrix(A, [k], [k])),
        "a_kl a_lk": -a(k, l) * a(l, k) * d(l, k),
        "a_kl a_lq, q < l": Fraction(0),
        "a_kl a_lq, q > l": Fraction(0),
        "a_kp a_lk, p > k": Fraction(0),
        "a_kp a_lk, p < k": Fraction(0),
        "a_kp a_lq, p > q": Fraction(0),
        "a_kp a_lq, p < q": Fraction(0),
    }
    for q in others:
        value = a(k, l) * a(l, q) * d(l, q)
        if q < l:
            terms["a_kl a_lq, q < l"] += (-1) ** (k + q - 1) * value
        else:
            terms["a_kl a_lq, q > l"] += (-1) ** (k + q) * value
    for p in others:
        value = a(k, p) * a(l, k) * d(p, k)
        if p > k:
            terms["a_kp a_lk, p > k"] += (-1) ** (l + p - 1) * value
        else:
            terms["a_kp a_lk, p < k"] += (-1) ** (l + p) * value
    for p in others:
        for q in range(1, n + 1):
            if q in (k, p):
                continue
            value = a(k, p) * a(l, q) * d(p, q)
            if p > q:
                terms["a_kp a_lq, p > q"] += (-1) ** (k + l + p + q - 1) * value
            else:
                terms["a_kp a_lq, p < q"] += (-1) ** (k + l + p + q) * value
    return terms


def twice_cofactor_expansion(A: np.ndarray, k: int, l: int) -> Fraction:
    return sum(twice_cofactor_terms(A, k, l).values(), Fraction(0))


def check_twice_cofactor(A: np.ndarray) -> IdentityReport:
    report = IdentityReport("twice_cofactor")
    report.tick()
    A = np.asarray(A, dtype=object)
    n = A.shape[0]
    value = exact_det(A)
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            report.record(twice_cofactor_expansion(A, k, l) == value, A, f"(k, l)=({k}, {l})")
    return report


def check_cauchy_binet(A: np.ndarray, B: np.ndarray) -> IdentityReport:
    """det C(alpha, beta) = sum_gamma det A(alpha, gamma) det B(gamma, beta) for C = AB."""
    report = IdentityReport("cauchy_binet")
    report.tick()
    A = np.asarray(A, dtype=object)
    B = np.asarray(B, dtype=object)
    m, inner = A.shape
    n = B.shape[1]
    C = A.dot(B)
    for r in range(1, min(m, inner, n) + 1):
        gammas = list(itertools.combinations(range(inner), r))
        for alpha in itertools.combinations(range(m), r):
            for beta in itertools.combinations(range(n), r):
                left = exact_det(C[np.ix_(alpha, beta)])
                right = sum(
                    (exact_det(A[np.ix_(alpha, g)]) * exact_det(B[np.ix_(g, beta)]) for g in gammas),
                    Fraction(0),
                )
                report.record(left == right, (A, B), f"alpha={alpha}, beta={beta}")
    return report


def check_sylvester(A: np.ndarray) -> IdentityReport:
    """|A| |A_{ij|kl}| = |A_{i|k}| |A_{j|l}| - |A_{i|l}| |A_{j|k}| for i < j, k < l."""
    report = IdentityReport("sylvester")
    report.tick()
    A = np.asarray(A, dtype=object)
    n = A.shape[0]
    value = exact_det(A)

    def cof(rows, cols):
        return exact_det(submatrix(A, rows, cols))

    for i, j in itertools.combinations(range(1, n + 1), 2):
        for k, l in itertools.combinations(range(1, n + 1), 2):
            left = value * cof([i, j], [k, l])
            right = cof([i], [k]) * cof([j], [l]) - cof([i], [l]) * cof([j], [k])
            report.record(left == right, A, f"(i, j, k, l)=({i}, {j}, {k}, {l})")
    return report


def check_strict_interlacing(H: SymTridiag) -> IdentityReport:
    """Leading and trailing (n-1)-minors strictly interlace when every b_k != 0."""
    report = IdentityReport("strict_interlacing", mode="float")
    report.tick()
    H = _float_matrix(H)
    if H.n < 2 or any(b == 0 for b in H.offdiag):
        report.notes.append("skipped: needs n >= 2 and nonzero off-diagonals")
        return report
    full = eigenvalues(H)
    for r in ((1, H.n - 1), (2, H.n)):
        result = check_interlacing(full, eigenvalues(minor(H, r)), strict=True)
        report.record(result.passed, H, f"minor {r}: {result.violations}")
    return report


def _eigen(H: SymTridiag) -> np.ndarray:
    return eigenvalues(H, FINE_TOL).as_array()


def finite_difference_laplacian(H: SymTridiag, step: Optional[float] = None) -> np.ndarray:
    """Central second differences of every eigenvalue in x_k = a_k / sqrt(2) and y_k = b_k."""
    H = _float_matrix(H)
    base = _eigen(H)
    if step is None:
        gap = Spectrum(tuple(base)).min_gap
        step = 1e-2 * min(1.0, gap)
    out = np.zeros(H.n)
    for k in range(H.n):
        moved = []
        for sign in (1.0, -1.0):
            diag = list(H.diag)
            diag[k] += sign * step
            moved.append(_eigen(SymTridiag(tuple(diag), H.offdiag)))
        out += 2.0 * ((moved[0] - base) + (moved[1] - base)) / step**2
    for k in range(H.n - 1):
        moved = []
        for sign in (1.0, -1.0):
            off = list(H.offdiag)
            off[k] += sign * step
            moved.append(_eigen(SymTridiag(H.diag, tuple(off))))
        out += ((moved[0] - base) + (moved[1] - base)) / step**2
    return out


def check_laplacian(H: SymTridiag) -> IdentityReport:
    """Closed-form Laplacian of each eigenvalue against finite differences."""
    report = IdentityReport("laplacian", mode="float")
    report.tick()
    H = _float_matrix(H)
    snap = EigenSnapshot.of(H, tol=FINE_TOL)
    numeric = finite_difference_laplacian(H)
    for i in range(1, H.n + 1):
        closed = laplacian_at(snap, i)
        ok = math.isclose(closed, numeric[i - 1], rel_tol=LAPLACIAN_RTOL, abs_tol=LAPLACIAN_RTOL)
        report.record(ok, H, f"i={i}: closed {closed!r}, finite difference {numeric[i - 1]!r}")
    return report
