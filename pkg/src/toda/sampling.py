"""Seeded random generators for verification runs and tests.

All sampling goes through a counter-based Philox bit generator so that a
seed determines every draw across platforms and sharding (see README).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .charts import ChartCenter, ChartPoint, chart_inverse
from .matrixcore import DEFAULT_TOL
from .realforms import RealChartPoint, c_matrix, slh_chart_inverse

__all__ = [
    "philox",
    "random_traceless",
    "random_invertible",
    "random_unit_lower",
    "random_center",
    "random_chart_point",
    "random_interior_point",
    "random_orbit_point",
    "random_slh_center",
    "random_slh_point",
    "random_slh_orbit_point",
    "random_su_pq_member",
    "random_skew5",
]


def philox(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for (seed, key...) — independent per key."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, key)])))


def _cgauss(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_traceless(rng, n, scale=1.0):
    x = scale * _cgauss(rng, (n, n))
    return x - np.trace(x) / n * np.eye(n)


def random_invertible(rng, n, max_cond=1e6):
    while True:
        g = _cgauss(rng, (n, n))
        if np.linalg.cond(g) < max_cond:
            return g


def random_unit_lower(rng, n, scale=1.0):
    return np.eye(n, dtype=complex) + scale * np.tril(_cgauss(rng, (n, n)), -1)


def random_center(rng, n, tol=DEFAULT_TOL, min_gap=0.4, box=1.5) -> ChartCenter:
    """Traceless simple spectrum with pairwise gaps above ``min_gap``."""
    while True:
        lam = box * _cgauss(rng, n)
        lam = lam - lam.mean()
        gaps = [abs(lam[i] - lam[j]) for i in range(n) for j in range(i + 1, n)]
        if min(gaps) > min_gap:
            return ChartCenter(tuple(lam), tol)


def random_chart_point(rng, center: ChartCenter, scale=0.6) -> ChartPoint:
    n = center.n
    y = scale * np.tril(_cgauss(rng, (n, n)), -1)
    z = scale * np.tril(_cgauss(rng, (n, n)), -1)
    return ChartPoint(y, z, center)


def random_interior_point(rng, center: ChartCenter, scale=0.6):
    """Class member guaranteed inside the chart (built from coordinates)."""
    return chart_inverse(random_chart_point(rng, center, scale))


def random_orbit_point(rng, center: ChartCenter, max_cond=1e4):
    """Class member with no interiority guarantee (random conjugation)."""
    g = random_invertible(rng, center.n, max_cond)
    return g @ center.matrix @ np.linalg.inv(g)


def random_slh_center(rng, m, tol=DEFAULT_TOL, min_gap=0.4, box=1.5) -> ChartCenter:
    """Conjugate-pair center: (lam_1, conj lam_1, ..., lam_m, conj lam_m)."""
    while True:
        lams = box * _cgauss(rng, m)
        lams = lams - lams.real.mean()  # trace of the paired spectrum is 2 sum Re
        lam = np.empty(2 * m, dtype=complex)
        lam[0::2] = lams
        lam[1::2] = np.conj(lams)
        gaps = [abs(lam[i] - lam[j]) for i in range(2 * m) for j in range(i + 1, 2 * m)]
        if min(gaps) > min_gap:
            return ChartCenter(tuple(lam), tol)


def _quat_block(rng, scale):
    return scale * np.array([
        [rng.normal() + 1j * rng.normal(), rng.normal() + 1j * rng.normal()],
        [0, 0],
    ])


def random_slh_point(rng, center: ChartCenter, scale=0.5) -> RealChartPoint:
    """Random induced coordinates (block-patterned Y, Z and free z_im)."""
    n = center.n
    m = n // 2
    y = np.zeros((n, n), dtype=complex)
    z = np.zeros((n, n), dtype=complex)
    for w in (y, z):
        for a in range(m):
            for b in range(a):
                alpha = scale * (rng.normal() + 1j * rng.normal())
                beta = scale * (rng.normal() + 1j * rng.normal())
                w[2 * a: 2 * a + 2, 2 * b: 2 * b + 2] = np.array(
                    [[alpha, beta], [-np.conj(beta), np.conj(alpha)]]
                )
    z_im = scale * _cgauss(rng, m)
    return RealChartPoint(y, z, z_im, center)


def random_slh_algebra(rng, m, scale=0.6):
    """Random element of the quaternionic matrix algebra (traceless)."""
    n = 2 * m
    x = np.zeros((n, n), dtype=complex)
    for a in range(m):
        for b in range(m):
            alpha = scale * (rng.normal() + 1j * rng.normal())
            beta = scale * (rng.normal() + 1j * rng.normal())
            x[2 * a: 2 * a + 2, 2 * b: 2 * b + 2] = np.array(
                [[alpha, beta], [-np.conj(beta), np.conj(alpha)]]
            )
    # the trace is real for this pattern; remove it inside the pattern
    shift = np.trace(x).real / n
    for a in range(m):
        x[2 * a, 2 * a] -= shift
        x[2 * a + 1, 2 * a + 1] -= shift
    return x


def random_slh_orbit_point(rng, center: ChartCenter, scale=0.5):
    """Conjugate the center by a random group element of the quaternionic form."""
    g = scipy.linalg.expm(random_slh_algebra(rng, center.n // 2, scale))
    return g @ center.matrix @ np.linalg.inv(g)


def random_su_pq_member(rng, p, q, scale=0.7):
    """Random element of the conjugated indefinite-unitary form."""
    n = p + q
    a = scale * _cgauss(rng, (p, p))
    xp = (a - a.conj().T) / 2
    b = scale * _cgauss(rng, (q, q))
    xq = (b - b.conj().T) / 2
    v = scale * _cgauss(rng, (p, q))
    s = np.zeros((n, n), dtype=complex)
    s[:p, :p] = xp
    s[p:, p:] = xq
    s[:p, p:] = v
    s[p:, :p] = v.conj().T
    s -= np.trace(s) / n * np.eye(n)  # trace is imaginary; stays in the form
    c = c_matrix(p, q)
    return c @ s @ np.linalg.inv(c)


def random_skew5(rng, scale=0.7):
    a = scale * _cgauss(rng, (5, 5))
    return a - a.T
