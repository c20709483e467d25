"""Triangular-decomposition contexts and the Lax vector field.

Each context splits its matrix algebra into a compact part (skew-Hermitian,
real skew-symmetric, ...) and an upper-triangular complement, and the flow
field is the commutator ``[X, P_k f(X)]`` for a polynomial ``f``.  Supported
contexts: traceless complex matrices, traceless real matrices, and the
5x5 complex skew-symmetric algebra with its rank-2 decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotInAlgebra
from .matrixcore import DEFAULT_TOL, Tolerance, cmatrix

__all__ = [
    "HierarchyPoly",
    "IDENTITY_POLY",
    "IwasawaContext",
    "sl_complex",
    "sl_real",
    "so5",
    "algebra_residual",
    "in_algebra",
    "project_k",
    "project_u",
    "toda_field",
]


@dataclass(frozen=True)
class HierarchyPoly:
    """Polynomial ``f(x) = sum c_j x^j`` selecting a member of the flow hierarchy."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        if len(coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        if not all(np.isfinite(c) for c in coeffs):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def of_matrix(self, x: np.ndarray) -> np.ndarray:
        """Evaluate on a square matrix by Horner's rule."""
        n = x.shape[0]
        out = self.coefficients[-1] * np.eye(n, dtype=complex)
        for c in reversed(self.coefficients[:-1]):
            out = out @ x + c * np.eye(n, dtype=complex)
        return out

    def of_scalar(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full_like(z, self.coefficients[-1])
        for c in reversed(self.coefficients[:-1]):
            out = out * z + c
        return out


IDENTITY_POLY = HierarchyPoly((0.0, 1.0))


@dataclass(frozen=True)
class IwasawaContext:
    """A decomposition context: algebra kind, dimension, projector wiring."""

    kind: str  # "sl_complex" | "sl_real" | "so5"
    n: int


def sl_complex(n: int) -> IwasawaContext:
    if n < 2:
        raise DimensionMismatch("need n >= 2")
    return IwasawaContext("sl_complex", n)


def sl_real(n: int) -> IwasawaContext:
    if n < 2:
        raise DimensionMismatch("need n >= 2")
    return IwasawaContext("sl_real", n)


def so5() -> IwasawaContext:
    return IwasawaContext("so5", 5)


def algebra_residual(ctx: IwasawaContext, x) -> float:
    """Distance of ``x`` from the context's algebra (max-norm, unscaled)."""
    x = cmatrix(x)
    if x.shape[0] != ctx.n:
        raise DimensionMismatch(f"context is {ctx.n}-dimensional, matrix is {x.shape[0]}")
    r = abs(np.trace(x))
    if ctx.kind == "sl_real":
        r = max(r, float(np.abs(x.imag).max()))
    elif ctx.kind == "so5":
        r = max(r, float(np.abs(x + x.T).max()))
    return r


def in_algebra(ctx: IwasawaContext, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    x = cmatrix(x)
    scale = max(float(np.linalg.norm(x)), 1.0)
    return algebra_residual(ctx, x) <= tol.rel * scale


def _require_member(ctx, x, tol):
    if not in_algebra(ctx, x, tol):
        raise NotInAlgebra(
            f"matrix fails {ctx.kind} membership (residual {algebra_residual(ctx, x):.3e})"
        )


def _project_k_sl(x: np.ndarray) -> np.ndarray:
    # unique split: skew-Hermitian + (upper triangular, real diagonal)
    low = np.tril(x, -1)
    return low - low.conj().T + 1j * np.diag(x.diagonal().imag)


def _project_k_so5(x: np.ndarray) -> np.ndarray:
    # Real skew-symmetric component along the rank-2 decomposition of the
    # 5x5 complex skew algebra.  Coefficients solved from the projection
    # conditions for the root vectors (paired rows (1,2) and (3,4), each
    # root vector of the form e_r1 - i e_r2 against columns 3..5).
    k = np.zeros((5, 5))
    k[0, 1] = x[0, 1].real
    k[2, 3] = x[2, 3].real
    for (r1, r2), cols in (((0, 1), (2, 3, 4)), ((2, 3), (4,))):
        for c in cols:
            k[r1, c] = x[r1, c].real + x[r2, c].imag
            k[r2, c] = x[r2, c].real - x[r1, c].imag
    return (k - k.T).astype(complex)


def project_k(ctx: IwasawaContext, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Compact-part projection of ``x`` for the context's decomposition."""
    x = cmatrix(x)
    _require_member(ctx, x, tol)
    if ctx.kind == "so5":
        return _project_k_so5(x)
    k = _project_k_sl(x)
    if ctx.kind == "sl_real":
        k = k.real.astype(complex)
    return k


def project_u(ctx: IwasawaContext, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Complementary projection; ``project_k + project_u`` is the identity."""
    x = cmatrix(x)
    return x - project_k(ctx, x, tol)


def toda_field(ctx: IwasawaContext, x, poly: HierarchyPoly = IDENTITY_POLY,
               tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Evaluate the flow field ``[X, P_k f(X)]`` at ``x``.

    The projection is applied to ``f(x)``, which need not be traceless;
    only the commutator structure matters.  The result is traceless and
    tangent to the context's algebra.
    """
    x = cmatrix(x)
    _require_member(ctx, x, tol)
    fx = x if poly is IDENTITY_POLY else poly.of_matrix(x)
    if ctx.kind == "so5":
        # even powers leave the skew algebra; the projection is undefined there
        if float(np.abs(fx + fx.T).max()) > tol.rel * max(float(np.linalg.norm(fx)), 1.0):
            raise NotInAlgebra("hierarchy polynomial leaves the skew-symmetric algebra")
        p = _project_k_so5(fx)
    else:
        p = _project_k_sl(fx)
        if ctx.kind == "sl_real":
            p = p.real.astype(complex)
    return x @ p - p @ x
