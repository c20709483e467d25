"""Diagonalizing (Y, Z) coordinates on conjugacy classes.

A chart is anchored at a diagonal matrix with simple, traceless spectrum.
Its forward map sends a class member to a pair of strictly lower triangular
matrices; the inverse rebuilds the member from the pair via one QR
factorization.  The atlas over all diagonal reorderings covers the class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    ChartBoundary,
    ConvergenceFailure,
    NotInForm,
    NotSimpleSpectrum,
)
from .iwasawa import IDENTITY_POLY, IwasawaContext, toda_field
from .matrixcore import (
    DEFAULT_TOL,
    Tolerance,
    cmatrix,
    eig_ordered,
    gram_schmidt_qr,
    ldu,
    principal_minors,
    ql_kla,
)

__all__ = [
    "ChartCenter",
    "ChartPoint",
    "Profile",
    "strict_lower_conjugator",
    "chart_forward",
    "chart_forward_factors",
    "chart_inverse",
    "chart_inverse_with_residual",
    "chart_contains",
    "atlas_centers",
    "profile_close",
    "profile_tangent",
]


@dataclass(frozen=True)
class ChartCenter:
    """Ordered simple traceless spectrum anchoring one chart."""

    lam: tuple
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        lam = tuple(complex(v) for v in self.lam)
        object.__setattr__(self, "lam", lam)
        if len(lam) < 2:
            raise NotSimpleSpectrum("need at least two eigenvalues")
        scale = max(max(abs(v) for v in lam), 1.0)
        if abs(sum(lam)) > 1e-8 * scale:
            raise ValueError(f"spectrum must sum to zero (sum = {sum(lam):.3e})")
        mt = self.match_tol
        for i in range(len(lam)):
            for j in range(i + 1, len(lam)):
                if abs(lam[i] - lam[j]) <= mt:
                    raise NotSimpleSpectrum(
                        f"eigenvalues {lam[i]:.6g}, {lam[j]:.6g} closer than {mt:.3e}"
                    )

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.lam, dtype=complex)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.vector)

    @property
    def match_tol(self) -> float:
        # eigenvalue-matching tolerance: relative to the spectral radius
        return max(self.tol.rel * max(max(abs(v) for v in self.lam), 1.0), 10 * self.tol.abs)

    def permuted(self, perm) -> "ChartCenter":
        return ChartCenter(tuple(self.lam[p] for p in perm), self.tol)


@dataclass
class ChartPoint:
    """Pair of strictly lower triangular coordinates at a center.

    Construction normalizes both arrays with ``tril(.,-1)`` so the diagonal
    and upper triangle are exactly zero.
    """

    y: np.ndarray
    z: np.ndarray
    center: ChartCenter

    def __post_init__(self):
        n = self.center.n
        y = cmatrix(self.y)
        z = cmatrix(self.z)
        if y.shape != (n, n) or z.shape != (n, n):
            raise ValueError("coordinate shapes must match the center dimension")
        self.y = np.tril(y, -1)
        self.z = np.tril(z, -1)


def strict_lower_conjugator(center: ChartCenter, w) -> np.ndarray:
    """Unit-lower ``l`` with ``l (Lam + W) l^{-1} = Lam``.

    Solved column recurrences along subdiagonals; the divisions are by
    eigenvalue gaps, nonzero because the center is simple.
    """
    lam = center.vector
    n = center.n
    w = np.tril(cmatrix(w), -1)
    if w.shape != (n, n):
        raise ValueError("shape mismatch with center")
    s = np.zeros((n, n), dtype=complex)
    for offset in range(1, n):
        for j in range(n - offset):
            i = j + offset
            acc = w[i, j]
            for k in range(j + 1, i):
                acc += s[i, k] * w[k, j]
            s[i, j] = acc / (lam[i] - lam[j])
    return np.eye(n, dtype=complex) + s


def _ad_lower(l, m):
    """``l m l^{-1}`` for unit-lower ``l`` via triangular solves."""
    tmp = l @ m
    return scipy.linalg.solve_triangular(l.T, tmp.T, lower=False, unit_diagonal=True).T


def _ad_lower_inv(l, m):
    """``l^{-1} m l`` for unit-lower ``l`` via triangular solves."""
    tmp = scipy.linalg.solve_triangular(l, m, lower=True, unit_diagonal=True)
    return tmp @ l


def chart_inverse_with_residual(pt: ChartPoint):
    """Rebuild the class member for a chart point.

    Returns ``(x, residual)`` where ``residual`` is the max-norm gap between
    the two independent reconstructions: conjugating ``Lam + Y`` back by the
    unitary QR factor of ``l1^{-1} l2`` and conjugating ``Lam + Z`` by the
    triangular factor.  The two agree identically in exact arithmetic.
    """
    center = pt.center
    lam_m = center.matrix
    l1 = strict_lower_conjugator(center, pt.y)
    l2 = strict_lower_conjugator(center, pt.z)
    g = scipy.linalg.solve_triangular(l1, l2, lower=True, unit_diagonal=True)
    k, u = gram_schmidt_qr(g, center.tol)
    x = k.conj().T @ (lam_m + pt.y) @ k
    tmp = u @ (lam_m + pt.z)
    x_other = scipy.linalg.solve_triangular(u.T, tmp.T, lower=True).T
    residual = float(np.abs(x - x_other).max())
    return x, residual


def chart_inverse(pt: ChartPoint) -> np.ndarray:
    """Inverse chart map; see ``chart_inverse_with_residual``."""
    x, residual = chart_inverse_with_residual(pt)
    scale = max(float(np.linalg.norm(x)), 1.0)
    if residual > 1e-6 * scale:
        raise ConvergenceFailure(
            f"ruling reconstructions disagree (residual {residual:.3e})"
        )
    return x


def chart_forward_factors(x, center: ChartCenter):
    """Forward chart map, also returning the ruling factors.

    Returns ``(pt, c, u)`` where ``c`` is the big-cell unitary with
    ``x = c (Lam + Y) c^{-1}`` and ``u`` the triangular factor with
    ``x = u (Lam + Z) u^{-1}``; both are diagnostics for the membership
    invariants.  See ``chart_forward`` for the error contract.
    """
    x = cmatrix(x)
    tol = center.tol
    lam_m = center.matrix
    v = eig_ordered(x, center.vector, tol)
    k0, l0, _ = ql_kla(v, tol)

    minors = principal_minors(k0)
    mags = np.abs(minors)  # rows of a unitary matrix have norm one
    for j, mag in enumerate(mags):
        if mag <= tol.minor_floor:
            raise ChartBoundary(j + 1, float(mag))

    # phase fix: rotate column phases so all leading minors become positive
    theta = np.diff(np.concatenate(([0.0], np.angle(minors))))
    t = np.exp(1j * theta)
    c = k0 * t.conj()[np.newaxis, :]      # c = k0 t^{-1}, in the big cell
    l = (t[:, np.newaxis] * l0) * t.conj()[np.newaxis, :]
    y = np.tril(_ad_lower(l, lam_m), -1)

    # Z branch: LU of the inverted cell element (exists on the same domain)
    k = c.conj().T
    lk, dk, uk = ldu(k, tol)
    l2 = scipy.linalg.solve_triangular(l, lk, lower=True, unit_diagonal=True)
    z = np.tril(_ad_lower_inv(l2, lam_m), -1)
    u = np.linalg.inv(dk @ uk)             # = the QR upper factor of l1^{-1} l2
    return ChartPoint(y, z, center), c, u


def chart_forward(x, center: ChartCenter) -> ChartPoint:
    """Chart coordinates of a class member ``x``.

    Route: order the eigenvector matrix onto the center, split it as
    unitary * unit-lower * positive-diagonal, absorb the minor phases into
    the unitary factor so it lands in the big cell, and read off ``Y``;
    the unit-lower LU factor of the inverted cell element then yields ``Z``.
    Raises ``ChartBoundary`` when a leading minor of the unitary factor
    falls below the minor floor — ``x`` sits outside this chart's (dense)
    domain — and ``SpectrumMismatch``/``NotSimpleSpectrum`` if ``x`` is not
    on the center's class at all.
    """
    pt, _, _ = chart_forward_factors(x, center)
    return pt


def chart_contains(x, center: ChartCenter) -> bool:
    """True iff the forward map succeeds without hitting the boundary."""
    try:
        chart_forward(x, center)
    except ChartBoundary:
        return False
    return True


def atlas_centers(center: ChartCenter, form: str = "sl_complex"):
    """All chart centers on the class of ``center`` for the given form.

    ``sl_complex``/``sl_real``: every reordering of the spectrum (n! centers;
    the real form additionally requires a real spectrum).  ``sl_h``: only
    reorderings that preserve the conjugate-pair block pattern, of which
    there are ``2^m m!`` for m pairs.
    """
    lam = center.lam
    n = len(lam)
    if form == "sl_real":
        if any(abs(v.imag) > center.match_tol for v in lam):
            raise NotInForm("real form needs a real spectrum")
    elif form == "sl_h":
        _require_pair_pattern(lam, center.match_tol)
    elif form != "sl_complex":
        raise NotInForm(f"unknown form {form!r}")

    out = []
    seen = set()
    for perm in itertools.permutations(range(n)):
        new = tuple(lam[p] for p in perm)
        if form == "sl_h" and not _has_pair_pattern(new, center.match_tol):
            continue
        if new in seen:
            continue
        seen.add(new)
        out.append(ChartCenter(new, center.tol))
    return out


def _has_pair_pattern(lam, tol) -> bool:
    if len(lam) % 2:
        return False
    for a in range(len(lam) // 2):
        if abs(lam[2 * a + 1] - np.conj(lam[2 * a])) > tol:
            return False
    return True


def _require_pair_pattern(lam, tol):
    if not _has_pair_pattern(lam, tol):
        raise NotInForm("spectrum does not follow the conjugate-pair block pattern")


@dataclass(frozen=True)
class Profile:
    """Monotone-closed set of matrix positions (1-based pairs)."""

    n: int
    pairs: frozenset = field(default_factory=frozenset)

    def mask(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        for (i, j) in self.pairs:
            m[i - 1, j - 1] = True
        return m


def profile_close(generators, n: int) -> Profile:
    """Close a generator set under the profile rule.

    Generators are 1-based pairs ``(i, j)`` with ``i >= j``; the closure
    contains every position ``(i, j)`` dominated by some generator
    ``(i', j')`` in the sense ``i <= i'`` and ``j >= j'``.
    """
    gens = [(int(i), int(j)) for (i, j) in generators]
    for (i, j) in gens:
        if not (1 <= j <= i <= n):
            raise ValueError(f"generator {(i, j)} must satisfy 1 <= j <= i <= {n}")
    pairs = frozenset(
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if any(i <= gi and j >= gj for (gi, gj) in gens)
    )
    return Profile(n, pairs)


def profile_tangent(ctx: IwasawaContext, profile: Profile, x,
                    poly=IDENTITY_POLY, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Numerical tangency: membership of ``x`` implies membership of the field.

    Vacuously true when ``x`` itself is supported outside the profile.
    """
    x = cmatrix(x)
    mask = profile.mask()
    scale = max(float(np.linalg.norm(x)), 1.0)

    def supported(m):
        off = np.abs(np.where(mask, 0.0, m))
        return float(off.max()) <= max(tol.abs, tol.rel * scale) * 100

    if not supported(x):
        return True
    return supported(toda_field(ctx, x, poly, tol))
