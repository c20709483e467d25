"""Real-form support: membership, tangency, and induced charts.

Covers traceless real matrices, the quaternionic form (2x2 conjugate-pair
blocks), and the indefinite-unitary form conjugated into the algebra where
the flow field is tangent to it.  The quaternionic form gets a full chart:
the complex (Y, Z) coordinates restrict to block-patterned coordinates plus
one extra conjugation parameter per diagonal block that the flow freezes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import ChartCenter, ChartPoint, atlas_centers, chart_forward, chart_inverse
from .errors import (
    BadSignature,
    DimensionMismatch,
    NotInForm,
    StructureViolation,
)
from .iwasawa import IDENTITY_POLY, sl_complex, toda_field
from .matrixcore import DEFAULT_TOL, Tolerance, cmatrix, gram_schmidt_qr

__all__ = [
    "RealFormTag",
    "RealChartPoint",
    "SlhRates",
    "sl_r",
    "sl_h",
    "su_pq_conjugate",
    "c_matrix",
    "form_residual",
    "is_in_form",
    "tangency_check",
    "slh_chart_forward",
    "slh_chart_inverse",
    "slh_rates",
    "real_atlas_centers",
]


@dataclass(frozen=True)
class RealFormTag:
    """Which real form, plus the (p, q) signature when applicable."""

    kind: str  # "sl_real" | "sl_h" | "su_pq"
    n: int
    p: int = 0
    q: int = 0


def sl_r(n: int) -> RealFormTag:
    if n < 2:
        raise DimensionMismatch("need n >= 2")
    return RealFormTag("sl_real", n)


def sl_h(n: int) -> RealFormTag:
    if n < 2 or n % 2:
        raise DimensionMismatch("quaternionic form needs an even dimension >= 2")
    return RealFormTag("sl_h", n)


def su_pq_conjugate(p: int, q: int) -> RealFormTag:
    if not (p >= q >= 1):
        raise BadSignature(f"need p >= q >= 1, got ({p}, {q})")
    return RealFormTag("su_pq", p + q, p, q)


def c_matrix(p: int, q: int) -> np.ndarray:
    """Conjugator taking the indefinite-unitary algebra onto its diagonal-
    compatible copy.

    Built from the block matrix with an identity of size p-q, two scaled
    identities of size q, and the flipped identity, then left-multiplied by
    the cyclic shift sending position j to j+q (mod p+q).  The result is
    real orthogonal.
    """
    if not (p >= q >= 1):
        raise BadSignature(f"need p >= q >= 1, got ({p}, {q})")
    n = p + q
    b = np.zeros((n, n))
    b[: p - q, : p - q] = np.eye(p - q)
    iq = np.eye(q)
    iop = np.eye(q)[::-1]
    s = 1.0 / np.sqrt(2.0)
    b[p - q: p, p - q: p] = s * iq
    b[p - q: p, p:] = s * iop
    b[p:, p - q: p] = -s * iop
    b[p:, p:] = s * iq
    g = np.zeros((n, n))
    for j in range(1, n + 1):
        image = j + q if j <= p else j - p
        g[image - 1, j - 1] = 1.0
    return (g @ b).astype(complex)


def _ipq(p: int, q: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)])).astype(complex)


def form_residual(tag: RealFormTag, x) -> float:
    """Max-norm violation of the form's fixed-point/pattern conditions."""
    x = cmatrix(x)
    if x.shape[0] != tag.n:
        raise DimensionMismatch(f"form is {tag.n}-dimensional, matrix is {x.shape[0]}")
    r = abs(np.trace(x))
    if tag.kind == "sl_real":
        return max(r, float(np.abs(x.imag).max()))
    if tag.kind == "sl_h":
        m = tag.n // 2
        worst = 0.0
        for a in range(m):
            for b in range(m):
                blk = x[2 * a: 2 * a + 2, 2 * b: 2 * b + 2]
                worst = max(
                    worst,
                    abs(blk[1, 1] - np.conj(blk[0, 0])),
                    abs(blk[1, 0] + np.conj(blk[0, 1])),
                )
        return max(r, worst)
    if tag.kind == "su_pq":
        c = c_matrix(tag.p, tag.q)
        ipq = _ipq(tag.p, tag.q)
        m = np.linalg.solve(c, x @ c)          # c^{-1} x c
        fixed = -ipq @ m.conj().T @ ipq
        return max(r, float(np.abs(fixed - m).max()))
    raise NotInForm(f"unknown form kind {tag.kind!r}")


def is_in_form(tag: RealFormTag, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    x = cmatrix(x)
    scale = max(float(np.linalg.norm(x)), 1.0)
    return form_residual(tag, x) <= tol.rel * scale


def tangency_check(tag: RealFormTag, x, poly=IDENTITY_POLY,
                   tol: Tolerance = DEFAULT_TOL) -> bool:
    """The flow field evaluated at a form member stays in the form."""
    x = cmatrix(x)
    if not is_in_form(tag, x, tol):
        raise NotInForm(f"matrix fails {tag.kind} membership "
                        f"(residual {form_residual(tag, x):.3e})")
    field = toda_field(sl_complex(tag.n), x, poly, tol)
    scale = max(float(np.linalg.norm(field)), 1.0)
    return form_residual(tag, field) <= tol.rel * scale


# ---------------------------------------------------------------------------
# quaternionic (conjugate-pair block) chart


def _require_slh_center(center: ChartCenter):
    lam = center.vector
    if len(lam) % 2:
        raise NotInForm("conjugate-pair center needs even dimension")
    for a in range(len(lam) // 2):
        if abs(lam[2 * a + 1] - np.conj(lam[2 * a])) > center.match_tol:
            raise NotInForm("center must follow the conjugate-pair block pattern")


@dataclass
class RealChartPoint:
    """Block-patterned (Y, Z) plus the per-block conjugation coordinates.

    ``y``/``z`` live on the strictly lower off-diagonal blocks with the
    quaternion pattern; ``z_im[a]`` is the extra coordinate attached to the
    a-th diagonal block (position (2a, 2a-1), 1-based), frozen by the flow.
    """

    y: np.ndarray
    z: np.ndarray
    z_im: np.ndarray
    center: ChartCenter

    def __post_init__(self):
        n = self.center.n
        _require_slh_center(self.center)
        self.y = np.tril(cmatrix(self.y), -1)
        self.z = np.tril(cmatrix(self.z), -1)
        self.z_im = np.asarray(self.z_im, dtype=complex)
        if self.z_im.shape != (n // 2,):
            raise ValueError("one block coordinate per diagonal block required")
        for arr, name in ((self.y, "y"), (self.z, "z")):
            res = _l0_residual(arr, n)
            if res > 1e-8 * max(float(np.linalg.norm(arr)), 1.0):
                raise StructureViolation(
                    f"{name} violates the block pattern (residual {res:.3e})"
                )


def _l0_residual(w, n) -> float:
    """Distance of a strictly lower matrix from the block-pattern subspace."""
    m = n // 2
    worst = 0.0
    for a in range(m):
        worst = max(worst, abs(w[2 * a + 1, 2 * a]))  # diagonal-block position
        for b in range(a):
            blk = w[2 * a: 2 * a + 2, 2 * b: 2 * b + 2]
            worst = max(
                worst,
                abs(blk[1, 1] - np.conj(blk[0, 0])),
                abs(blk[1, 0] + np.conj(blk[0, 1])),
            )
    return worst


def _block_unitary_from_zim(center: ChartCenter, z_im) -> np.ndarray:
    """Unitary block-diagonal factor of the conjugator encoding ``z_im``.

    For each diagonal block, ``z_im[a]`` determines the unit-lower 2x2
    conjugator ``[[1, 0], [s, 1]]`` with ``s = z_im[a] / (conj(lam_a) -
    lam_a)``; its unitary QR factor is the block of the returned matrix.
    """
    lam = center.vector
    n = center.n
    m = n // 2
    out = np.eye(n, dtype=complex)
    for a in range(m):
        s = z_im[a] / (lam[2 * a + 1] - lam[2 * a])
        zeta = np.array([[1.0, 0.0], [s, 1.0]], dtype=complex)
        k, _ = gram_schmidt_qr(zeta, center.tol)
        out[2 * a: 2 * a + 2, 2 * a: 2 * a + 2] = k
    return out


def slh_chart_forward(x, center: ChartCenter, tol: Tolerance | None = None) -> RealChartPoint:
    """Induced chart coordinates of a quaternionic-form member.

    The diagonal-block entries of the complex Z coordinate are the frozen
    ``z_im`` coordinates; conjugating by the block unitary they encode moves
    the point onto the slice where the complex chart restricts cleanly, and
    (Y, Z) are read off there.  ``StructureViolation`` flags residuals that
    should vanish for genuine members.
    """
    x = cmatrix(x)
    _require_slh_center(center)
    tol = tol or center.tol
    tag = sl_h(center.n)
    if not is_in_form(tag, x, tol):
        raise NotInForm(f"matrix fails quaternionic membership "
                        f"(residual {form_residual(tag, x):.3e})")
    n = center.n
    m = n // 2

    cp = chart_forward(x, center)
    z_im = np.array([cp.z[2 * a + 1, 2 * a] for a in range(m)])

    # move to the identity slice of the block group and re-read the chart
    u = _block_unitary_from_zim(center, z_im)
    x_slice = u @ x @ u.conj().T
    cp_e = chart_forward(x_slice, center)

    scale = max(float(np.linalg.norm(x)), 1.0)
    limit = max(1e-8 * scale, 100 * tol.rel * scale)
    res_y = _l0_residual(cp_e.y, n)
    res_z = _l0_residual(cp_e.z, n)
    if max(res_y, res_z) > limit:
        raise StructureViolation(
            f"slice coordinates carry excess components "
            f"(y {res_y:.3e}, z {res_z:.3e})"
        )
    y = cp_e.y.copy()
    z = cp_e.z.copy()
    for a in range(m):  # zero the pattern positions exactly
        y[2 * a + 1, 2 * a] = 0.0
        z[2 * a + 1, 2 * a] = 0.0
    return RealChartPoint(y, z, z_im, center)


def slh_chart_inverse(rpt: RealChartPoint) -> np.ndarray:
    """Rebuild the form member from induced coordinates.

    Inverse of ``slh_chart_forward``: reconstruct the identity-slice member
    from (Y, Z) with the complex inverse chart, then conjugate back by the
    block unitary encoded in ``z_im``.
    """
    u = _block_unitary_from_zim(rpt.center, rpt.z_im)
    x_slice = chart_inverse(ChartPoint(rpt.y, rpt.z, rpt.center))
    return u.conj().T @ x_slice @ u


@dataclass(frozen=True)
class SlhRates:
    """Entrywise growth rates of the induced chart flow.

    ``y``/``z`` hold the complex rate at each strictly lower position of
    the block support (zero elsewhere); the per-block coordinates are
    frozen, so their rates are identically zero.
    """

    y: np.ndarray
    z: np.ndarray
    z_im: np.ndarray


def slh_rates(center: ChartCenter) -> SlhRates:
    """Rate table of the induced chart flow at a conjugate-pair center.

    On the block support the rates are the complex-chart rates: position
    (r, c) of Y rotates with ``i Im(lam_c - lam_r)`` and of Z scales with
    ``Re(lam_r - lam_c)``; the diagonal-block coordinates are constant.
    The (row, column) orientation is pinned by the finite-difference oracle
    in the test suite.
    """
    _require_slh_center(center)
    lam = center.vector
    n = center.n
    m = n // 2
    rates_y = 1j * (lam[np.newaxis, :] - lam[:, np.newaxis]).imag
    rates_z = (lam[:, np.newaxis] - lam[np.newaxis, :]).real
    support = np.zeros((n, n), dtype=bool)
    for a in range(m):
        for b in range(a):
            support[2 * a: 2 * a + 2, 2 * b: 2 * b + 2] = True
    rates_y = np.where(support, rates_y, 0.0)
    rates_z = np.where(support, rates_z, 0.0)
    return SlhRates(rates_y, rates_z, np.zeros(m, dtype=complex))


def real_atlas_centers(tag: RealFormTag, center: ChartCenter):
    """Chart centers covering the real-form class of ``center``."""
    if tag.kind == "sl_real":
        return atlas_centers(center, "sl_real")
    if tag.kind == "sl_h":
        if tag.n != center.n:
            raise DimensionMismatch("tag and center dimensions differ")
        return atlas_centers(center, "sl_h")
    raise NotInForm(f"no induced atlas for form kind {tag.kind!r}")
