"""Dense complex matrix kernel.

Arithmetic, eigendecomposition, and the structured factorizations (QR by
modified Gram-Schmidt, the unitary/unit-lower/positive-diagonal "QL" split,
unit-triangular LDU, big-cell membership tests) on which every chart and
flow operation is built.  All functions are pure; matrices are square
``complex128`` numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    MinorVanishes,
    NotInU,
    NotSimpleSpectrum,
    Singular,
    SpectrumMismatch,
)

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "cmatrix",
    "gram_schmidt_qr",
    "ql_kla",
    "ldu",
    "principal_minors",
    "relative_minors",
    "in_cell_c",
    "in_cell_d",
    "eig_ordered",
    "matexp",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerance policy.

    ``abs``/``rel`` are absolute and relative comparison thresholds;
    ``minor_floor`` is the relative magnitude below which a leading
    principal minor counts as vanishing (the chart-boundary cliff).
    """

    abs: float = 1e-12
    rel: float = 1e-10
    minor_floor: float = 1e-10

    def __post_init__(self):
        if self.abs < 0 or self.rel < 0 or self.minor_floor < 0:
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOL = Tolerance()


def cmatrix(entries) -> np.ndarray:
    """Validate and return a dense square complex matrix.

    Accepts anything array-like; raises ``ValueError`` on non-square shape
    or non-finite entries.
    """
    x = np.asarray(entries, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] == 0:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("matrix entries must be finite")
    return x


def _scale(g) -> float:
    return max(float(np.linalg.norm(g)), 1.0)


def gram_schmidt_qr(g, tol: Tolerance = DEFAULT_TOL):
    """QR factorization ``g = k u`` by modified Gram-Schmidt.

    ``k`` is unitary and ``u`` upper triangular with strictly positive real
    diagonal (the diagonal entries are the column norms produced by the
    orthogonalization, so positivity is automatic).  One reorthogonalization
    pass keeps ``k* k = I`` near machine precision.

    Raises ``Singular`` when a column collapses, i.e. ``g`` is not
    invertible to working precision.
    """
    g = cmatrix(g)
    n = g.shape[0]
    k = g.copy()
    u = np.zeros((n, n), dtype=complex)
    floor = tol.abs * _scale(g)
    for j in range(n):
        v = k[:, j].copy()
        for _ in range(2):  # twice is enough
            for i in range(j):
                c = np.vdot(k[:, i], v)
                u[i, j] += c
                v -= c * k[:, i]
        r = np.linalg.norm(v)
        if not np.isfinite(r) or r <= floor:
            raise Singular(f"column {j + 1} collapsed during Gram-Schmidt")
        u[j, j] = r
        k[:, j] = v / r
    return k, u


def ql_kla(g, tol: Tolerance = DEFAULT_TOL):
    """Factor ``g = k l a`` with k unitary, l unit-lower, a positive diagonal.

    This is the opposite-order Gram-Schmidt: orthogonalizing columns from
    last to first yields ``g = k (l a)`` with ``l a`` lower triangular and
    positive diagonal ``a``.  Implemented by conjugating ``gram_schmidt_qr``
    with the index-reversal permutation.
    """
    g = cmatrix(g)
    n = g.shape[0]
    rev = slice(None, None, -1)
    kp, up = gram_schmidt_qr(g[rev, rev], tol)
    k = kp[rev, rev]
    lfull = up[rev, rev]
    a = np.diag(lfull).real.copy()
    l = lfull / a[np.newaxis, :]
    return k, l, np.diag(a).astype(complex)


def principal_minors(g) -> np.ndarray:
    """Leading principal minors ``det g[:j, :j]`` for j = 1..n."""
    g = cmatrix(g)
    n = g.shape[0]
    return np.array([np.linalg.det(g[: j + 1, : j + 1]) for j in range(n)])


def relative_minors(g) -> np.ndarray:
    """Minor magnitudes scaled by the Hadamard bound of each leading block.

    The j-th entry is ``|det g[:j,:j]|`` divided by the product of the row
    norms of the block, which makes the chart-boundary test invariant under
    rescaling of ``g``.
    """
    g = cmatrix(g)
    n = g.shape[0]
    minors = principal_minors(g)
    out = np.empty(n)
    for j in range(n):
        rows = np.linalg.norm(g[: j + 1, : j + 1], axis=1)
        had = float(np.prod(np.maximum(rows, 1e-300)))
        out[j] = abs(minors[j]) / had
    return out


def ldu(g, tol: Tolerance = DEFAULT_TOL):
    """Unit-triangular split ``g = l d u`` (no pivoting).

    ``l`` is unit lower triangular, ``u`` unit upper triangular and ``d``
    diagonal with ``d_jj`` equal to the ratio of consecutive leading
    principal minors.  Raises ``MinorVanishes(j)`` when the j-th relative
    minor magnitude drops below ``tol.minor_floor``; this is exactly the
    boundary condition of the big cell.
    """
    g = cmatrix(g)
    n = g.shape[0]
    rel = relative_minors(g)
    for j in range(n):
        if rel[j] <= tol.minor_floor:
            raise MinorVanishes(j + 1, rel[j])
    work = g.copy()
    l = np.eye(n, dtype=complex)
    for j in range(n):
        piv = work[j, j]
        for i in range(j + 1, n):
            m = work[i, j] / piv
            l[i, j] = m
            work[i, j:] -= m * work[j, j:]
    d = np.diag(work).copy()
    u = work / d[:, np.newaxis]
    u = np.triu(u)
    np.fill_diagonal(u, 1.0)
    return l, np.diag(d), u


def _is_upper_positive(u, tol: Tolerance) -> bool:
    lower = np.tril(u, -1)
    if np.abs(lower).max(initial=0.0) > tol.rel * _scale(u):
        return False
    d = np.diag(u)
    return bool(np.all(d.real > 0) and np.abs(d.imag).max(initial=0.0) <= tol.rel * _scale(u))


def in_cell_c(k, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Membership in the big cell of the unitary group.

    True iff ``k`` is unitary within tolerance and every leading principal
    minor is real, positive, and above the minor floor — equivalently,
    ``k`` admits an LU factorization with positive pivots.
    """
    k = cmatrix(k)
    n = k.shape[0]
    if np.abs(k.conj().T @ k - np.eye(n)).max() > max(tol.rel, 100 * tol.abs) * n:
        return False
    minors = principal_minors(k)
    for m in minors:
        if abs(m) <= tol.minor_floor:
            return False
        if m.real <= 0 or abs(m.imag) > max(tol.rel * abs(m), tol.abs):
            return False
    return True


def in_cell_d(u, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Membership in the image of unit-lower matrices under the QR projection.

    ``u`` must be upper triangular with positive real diagonal (otherwise
    ``NotInU``).  Membership holds iff every leading principal minor of
    ``(u* u)^{-1}`` equals 1 within the relative tolerance.
    """
    u = cmatrix(u)
    if not _is_upper_positive(u, tol):
        raise NotInU("expected upper triangular with positive real diagonal")
    m = np.linalg.inv(u.conj().T @ u)
    minors = principal_minors(m)
    return bool(np.all(np.abs(minors - 1.0) <= max(100 * tol.rel, tol.abs)))


def match_spectrum(values, targets, match_tol):
    """Greedy nearest-value assignment of ``values`` onto ``targets``.

    Returns the permutation ``perm`` with ``values[perm[i]] ~ targets[i]``.
    Raises ``NotSimpleSpectrum`` if either set has a pair closer than
    ``match_tol`` and ``SpectrumMismatch`` if the assignment fails.
    """
    values = np.asarray(values)
    targets = np.asarray(targets)
    for arr, label in ((values, "matrix"), (targets, "center")):
        for i in range(len(arr)):
            for j in range(i + 1, len(arr)):
                if abs(arr[i] - arr[j]) <= match_tol:
                    raise NotSimpleSpectrum(
                        f"{label} eigenvalues {arr[i]:.6g} and {arr[j]:.6g} "
                        f"closer than matching tolerance {match_tol:.3e}"
                    )
    used = set()
    perm = []
    for t in targets:
        best, best_d = -1, np.inf
        for j in range(len(values)):
            if j in used:
                continue
            d = abs(values[j] - t)
            if d < best_d:
                best, best_d = j, d
        if best < 0 or best_d > match_tol:
            raise SpectrumMismatch(
                f"no eigenvalue within {match_tol:.3e} of target {t:.6g} "
                f"(closest at distance {best_d:.3e})"
            )
        used.add(best)
        perm.append(best)
    return perm


def eig_ordered(x, lam, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Eigenvector matrix of ``x`` ordered to a target simple spectrum.

    Returns ``v`` with ``v^{-1} x v = diag(lam)`` and ``det v = 1`` (the
    determinant is absorbed by the principal n-th root, which makes the
    output deterministic up to the solver's column phases — an ambiguity
    that every chart construction downstream cancels).
    """
    x = cmatrix(x)
    lam = np.asarray(lam, dtype=complex)
    n = x.shape[0]
    if lam.shape != (n,):
        raise SpectrumMismatch(f"target spectrum has length {lam.shape}, matrix is {n}x{n}")
    match_tol = max(tol.rel * max(np.abs(lam).max(), 1.0), 10 * tol.abs)
    w, v = np.linalg.eig(x)
    perm = match_spectrum(w, lam, match_tol)
    v = v[:, perm]
    det = np.linalg.det(v)
    if abs(det) < tol.abs:
        raise Singular("eigenvector matrix is singular")
    v = v * np.exp(-np.log(det) / n)
    return v


def matexp(x, t=1.0, lam=None, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Matrix exponential ``exp(t x)``.

    When a target spectrum ``lam`` is supplied and ``x`` diagonalizes onto
    it, the exponential is taken on the eigenvalues; otherwise falls back
    to scaling-and-squaring with a Pade core.
    """
    x = cmatrix(x)
    if lam is not None:
        try:
            v = eig_ordered(x, lam, tol)
            ex = v @ np.diag(np.exp(t * np.asarray(lam, dtype=complex))) @ np.linalg.inv(v)
        except (SpectrumMismatch, NotSimpleSpectrum):
            ex = scipy.linalg.expm(t * x)
    else:
        ex = scipy.linalg.expm(t * x)
    if not np.all(np.isfinite(ex)):
        raise ConvergenceFailure("matrix exponential produced non-finite entries")
    return ex
