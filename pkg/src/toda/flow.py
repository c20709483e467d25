"""Three propagators for the flow and their cross-validation.

An adaptive Runge-Kutta integration of the Lax equation, the QR
factorization formula ``X(t) = k(exp(t f(X)))^{-1} X k(exp(t f(X)))``,
and the closed-form entrywise-exponential evolution in chart coordinates.
All three must agree wherever the chart applies; ``compare_methods``
measures how well they do.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .charts import ChartCenter, ChartPoint, chart_forward, chart_inverse
from .errors import ChartBoundary, ConditioningExceeded, NotInAlgebra, StepFailure
from .iwasawa import IDENTITY_POLY, HierarchyPoly, IwasawaContext, in_algebra, toda_field
from .matrixcore import (
    DEFAULT_TOL,
    Tolerance,
    cmatrix,
    eig_ordered,
    gram_schmidt_qr,
    matexp,
)

__all__ = [
    "Trajectory",
    "ComparisonReport",
    "integrate_rk",
    "symes_flow",
    "chart_flow",
    "spectrum_drift",
    "hausdorff_spectrum_distance",
    "compare_methods",
]

# per-increment cap on t * max |Re f(lam_i) - Re f(lam_j)|: keeps exp(t f(X))
# representable; increments compose exactly by the group property
_SYMES_SPREAD_CAP = 40.0


@dataclass
class Trajectory:
    """Sampled flow: times, matrices, producing method, spectrum drift."""

    times: np.ndarray
    samples: list
    method: str  # "rk" | "symes" | "chart"
    drift: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.samples) != len(self.times):
            raise ValueError("one sample per time point required")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        self.drift = np.asarray(self.drift, dtype=float)


def hausdorff_spectrum_distance(a, b) -> float:
    """Hausdorff distance between two spectra as point sets in the plane."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _drift_series(samples, reference_spectrum):
    return np.array([
        hausdorff_spectrum_distance(np.linalg.eigvals(s), reference_spectrum)
        for s in samples
    ])


def spectrum_drift(traj: Trajectory) -> float:
    """Worst spectrum deviation along the trajectory."""
    return float(traj.drift.max(initial=0.0))


def integrate_rk(ctx: IwasawaContext, x0, poly: HierarchyPoly = IDENTITY_POLY,
                 t_grid=None, rtol: float = 1e-10, atol: float = 1e-12,
                 tol: Tolerance = DEFAULT_TOL) -> Trajectory:
    """Integrate the Lax equation with an embedded Dormand-Prince 5(4) pair.

    Dense output is sampled on ``t_grid`` (strictly increasing, starting at
    the initial time).  Raises ``StepFailure`` if the adaptive controller
    gives up, ``NotInAlgebra`` if ``x0`` is outside the context's algebra.
    """
    x0 = cmatrix(x0)
    if not in_algebra(ctx, x0, tol):
        raise NotInAlgebra("initial condition is not in the context's algebra")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be a strictly increasing 1-d grid")
    n = ctx.n

    if t_grid.size == 1:
        samples = [x0.copy()]
    else:
        def rhs(_t, y):
            return toda_field(ctx, y.reshape(n, n), poly, tol).ravel()

        sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), x0.ravel(), method="RK45",
                        t_eval=t_grid, rtol=rtol, atol=atol)
        if not sol.success:
            raise StepFailure(sol.message)
        samples = [sol.y[:, i].reshape(n, n) for i in range(t_grid.size)]

    ref = np.linalg.eigvals(x0)
    return Trajectory(t_grid, samples, "rk", _drift_series(samples, ref))


def _symes_step(x, poly, dt, lam, tol):
    """One increment of the factorization propagator."""
    if lam is not None:
        # exp(dt f(x)) on the eigenbasis of x itself; valid even when f
        # collapses eigenvalues, since x's spectrum stays simple
        v = eig_ordered(x, lam, tol)
        e = v @ np.diag(np.exp(dt * poly.of_scalar(lam))) @ np.linalg.inv(v)
    else:
        fx = x if poly is IDENTITY_POLY else poly.of_matrix(x)
        e = matexp(fx, dt, tol=tol)
    k, u = gram_schmidt_qr(e, tol)
    x_k = k.conj().T @ x @ k
    x_u = u @ x @ np.linalg.inv(u)
    scale = max(float(np.linalg.norm(x)), 1.0)
    gap = float(np.abs(x_k - x_u).max())
    if gap > 1e-6 * scale:
        raise ConditioningExceeded(
            f"unitary- and triangular-side propagations disagree ({gap:.3e})"
        )
    return x_k


def symes_flow(x0, poly: HierarchyPoly = IDENTITY_POLY, t: float = 0.0,
               center: ChartCenter | None = None,
               tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Propagate by the QR factorization of ``exp(t f(X))``.

    Both conjugations (by the unitary factor and by the triangular factor)
    are computed and must agree; a gap raises ``ConditioningExceeded``.
    Large ``t`` is split into increments so the exponential stays well
    scaled, composing by the group property of the flow.  Passing ``center``
    switches the exponential to the eigenvalue route.
    """
    x0 = cmatrix(x0)
    if abs(np.trace(x0)) > tol.rel * max(float(np.linalg.norm(x0)), 1.0):
        raise NotInAlgebra("initial condition must be traceless")
    if t == 0.0:
        return x0.copy()

    lam = None if center is None else center.vector
    ev = lam if lam is not None else np.linalg.eigvals(x0)
    fev = poly.of_scalar(ev)
    spread = float(np.abs(fev.real[:, None] - fev.real[None, :]).max(initial=0.0))
    steps = max(1, int(np.ceil(abs(t) * spread / _SYMES_SPREAD_CAP)))
    dt = t / steps

    x = x0
    for _ in range(steps):
        x = _symes_step(x, poly, dt, lam, tol)
    return x


def chart_flow(pt: ChartPoint, poly: HierarchyPoly = IDENTITY_POLY,
               t: float = 0.0) -> ChartPoint:
    """Closed-form chart-coordinate flow (complete for all t).

    Each strictly lower entry evolves independently: phases rotate ``Y``,
    amplitudes scale ``Z``::

        Y_jk(t) = exp(i t Im(f(lam_k) - f(lam_j))) Y_jk(0)
        Z_lm(t) = exp(t Re(f(lam_l) - f(lam_m))) Z_lm(0)
    """
    lam = pt.center.vector
    flam = poly.of_scalar(lam)
    rates_y = 1j * (flam[np.newaxis, :] - flam[:, np.newaxis]).imag
    rates_z = (flam[:, np.newaxis] - flam[np.newaxis, :]).real
    y = pt.y * np.exp(t * rates_y)
    z = pt.z * np.exp(t * rates_z)
    return ChartPoint(y, z, pt.center)


@dataclass
class ComparisonReport:
    """Pairwise agreement of the three propagators on a common grid."""

    times: np.ndarray
    x0_norm: float
    max_distance: dict = field(default_factory=dict)       # absolute, Frobenius
    rel_distance: dict = field(default_factory=dict)       # scaled by |x0|_F
    drift: dict = field(default_factory=dict)              # per method
    confinement_ok: bool = True
    boundary_events: list = field(default_factory=list)    # (method, time, minor)

    @property
    def worst_rel_distance(self) -> float:
        return max(self.rel_distance.values(), default=0.0)


def compare_methods(ctx: IwasawaContext, x0, center: ChartCenter,
                    poly: HierarchyPoly = IDENTITY_POLY, t_grid=None,
                    rtol: float = 1e-10, atol: float = 1e-12,
                    tol: Tolerance = DEFAULT_TOL,
                    check_confinement: bool = True) -> ComparisonReport:
    """Run all three propagators on ``t_grid`` and report their agreement.

    The chart route is forward-map, closed-form evolution, inverse map per
    sample.  Confinement records whether the forward map succeeds on every
    sample of every method (it must, since the flow never leaves the chart
    domain it starts in).
    """
    x0 = cmatrix(x0)
    if t_grid is None:
        t_grid = np.linspace(0.0, 2.0, 41)
    t_grid = np.asarray(t_grid, dtype=float)

    traj_rk = integrate_rk(ctx, x0, poly, t_grid, rtol=rtol, atol=atol, tol=tol)

    t0 = t_grid[0]
    symes_samples = [symes_flow(x0, poly, t - t0, center=center, tol=tol) for t in t_grid]

    pt0 = chart_forward(x0, center)
    chart_samples = [chart_inverse(chart_flow(pt0, poly, t - t0)) for t in t_grid]

    ref = np.linalg.eigvals(x0)
    trajs = {
        "rk": traj_rk,
        "symes": Trajectory(t_grid, symes_samples, "symes", _drift_series(symes_samples, ref)),
        "chart": Trajectory(t_grid, chart_samples, "chart", _drift_series(chart_samples, ref)),
    }

    report = ComparisonReport(times=t_grid, x0_norm=float(np.linalg.norm(x0)))
    names = list(trajs)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = trajs[names[i]], trajs[names[j]]
            d = max(
                float(np.linalg.norm(sa - sb))
                for sa, sb in zip(a.samples, b.samples)
            )
            key = (names[i], names[j])
            report.max_distance[key] = d
            report.rel_distance[key] = d / max(report.x0_norm, 1e-300)
    for name, traj in trajs.items():
        report.drift[name] = spectrum_drift(traj)

    if check_confinement:
        for name, traj in trajs.items():
            for tt, sample in zip(traj.times, traj.samples):
                try:
                    chart_forward(sample, center)
                except ChartBoundary as exc:
                    report.confinement_ok = False
                    report.boundary_events.append((name, float(tt), exc.index))
    return report
