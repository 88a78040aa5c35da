"""Closed-form references used as independent oracles.

Contains exact Burgers Riemann solutions, the non-atomic Young measure of
the random-shock-location ensemble, a pre-shock smooth Burgers solver, and
a brute-force optimal-transport solver for small empirical measures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "SegmentMeasure",
    "burgers_riemann",
    "random_shock_young_measure",
    "random_shock_young_measure_mirrored",
    "smooth_burgers",
    "smooth_burgers_shock_time",
    "transport_lp",
]


@dataclass(frozen=True)
class SegmentMeasure:
    """1D measure: weighted atoms plus uniform-density intervals.

    atoms: tuple of (location, weight); segments: tuple of (a, b, density)
    with b > a.  Probability measures have total mass 1.
    """

    atoms: tuple = ()
    segments: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "atoms", tuple((float(x), float(w)) for x, w in self.atoms)
        )
        object.__setattr__(
            self,
            "segments",
            tuple((float(a), float(b), float(d)) for a, b, d in self.segments),
        )
        for a, b, _ in self.segments:
            if not b > a:
                raise ValueError("segments must be non-degenerate (b > a)")
        for _, w in self.atoms:
            if w < 0:
                raise ValueError("atom weights must be nonnegative")

    @classmethod
    def uniform(cls, a, b):
        return cls(segments=((a, b, 1.0 / (b - a)),))

    @classmethod
    def dirac(cls, x):
        return cls(atoms=((x, 1.0),))

    @property
    def mass(self):
        m = sum(w for _, w in self.atoms)
        m += sum(d * (b - a) for a, b, d in self.segments)
        return m

    def mean(self):
        m = sum(x * w for x, w in self.atoms)
        m += sum(0.5 * d * (b * b - a * a) for a, b, d in self.segments)
        return m

    def second_moment(self):
        m = sum(x * x * w for x, w in self.atoms)
        m += sum(d * (b**3 - a**3) / 3.0 for a, b, d in self.segments)
        return m

    def variance(self):
        mu = self.mean()
        return self.second_moment() - mu * mu

    def cdf(self, x, inclusive=True):
        """F(x) = mu((-inf, x]) (or (-inf, x) when inclusive=False)."""
        x = np.asarray(x, dtype=float)
        F = np.zeros(x.shape)
        for loc, w in self.atoms:
            F = F + w * ((x >= loc) if inclusive else (x > loc))
        for a, b, d in self.segments:
            F = F + d * (np.clip(x, a, b) - a)
        return F

    def _pieces(self):
        """Breakpoints with left/right CDF limits and per-gap densities."""
        pts = {a for a, _, _ in self.segments} | {b for _, b, _ in self.segments}
        pts |= {x for x, _ in self.atoms}
        xs = np.array(sorted(pts))
        if xs.size == 0:
            raise ValueError("empty measure")
        atom_w = np.zeros(xs.size)
        for loc, w in self.atoms:
            atom_w[np.searchsorted(xs, loc)] += w
        dens = np.zeros(max(xs.size - 1, 0))
        for a, b, d in self.segments:
            i0 = np.searchsorted(xs, a)
            i1 = np.searchsorted(xs, b)
            dens[i0:i1] += d
        gaps = np.diff(xs)
        f_right = np.empty(xs.size)
        f_left = np.empty(xs.size)
        acc = 0.0
        for i in range(xs.size):
            f_left[i] = acc
            acc += atom_w[i]
            f_right[i] = acc
            if i < gaps.size:
                acc += dens[i] * gaps[i]
        return xs, f_left, f_right, dens

    def inverse_cdf(self, omega):
        """Generalized inverse F^{-1}(omega) for omega in [0, 1).

        Requires a normalized measure; pushing uniform omega through this
        map reproduces the measure exactly.
        """
        if abs(self.mass - 1.0) > 1e-12:
            raise ValueError(f"measure not normalized (mass {self.mass:.17g})")
        omega_in = np.asarray(omega, dtype=float)
        scalar = omega_in.ndim == 0
        om = np.atleast_1d(omega_in)
        if np.any(om < 0.0) or np.any(om >= 1.0):
            raise ValueError("omega must lie in [0, 1)")
        xs, f_left, f_right, dens = self._pieces()
        idx = np.minimum(np.searchsorted(f_right, om, side="left"), xs.size - 1)
        out = np.empty(om.shape)
        at_point = om >= f_left[idx]
        out[at_point] = xs[idx[at_point]]
        inside = ~at_point
        if np.any(inside):
            j = idx[inside] - 1
            out[inside] = xs[j] + (om[inside] - f_right[j]) / dens[j]
        return float(out[0]) if scalar else out


def burgers_riemann(uL, uR, x, t):
    """Entropy solution of the Burgers Riemann problem at (x, t), t > 0.

    Shock of speed (uL+uR)/2 when uL > uR; rarefaction fan u = x/t between
    the states when uL < uR.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    xi = x / t
    if uL > uR:
        s = 0.5 * (uL + uR)
        u = np.where(xi < s, uL, uR)
    elif uL < uR:
        u = np.clip(xi, uL, uR)
    else:
        u = np.full(xi.shape, float(uL))
    return u if u.shape else float(u)


def random_shock_young_measure(x, t):
    """Exact one-point Young measure of the random-shock Burgers ensemble.

    The ensemble evolves Riemann data (1+omega, omega), omega ~ U[0,1]:
    uniform on [1,2] ahead of all shocks (x/t < 1/2), uniform on [0,1]
    behind them (x/t > 3/2), and the two-interval mixture
    lambda_[x/t+1/2, 2] + lambda_[0, x/t-1/2] in between.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    xi = float(x) / float(t)
    if xi <= 0.5:
        return SegmentMeasure.uniform(1.0, 2.0)
    if xi >= 1.5:
        return SegmentMeasure.uniform(0.0, 1.0)
    return SegmentMeasure(segments=((0.0, xi - 0.5, 1.0), (xi + 0.5, 2.0, 1.0)))


def random_shock_young_measure_mirrored(x, t):
    """Young measure of the mirrored ensemble (data (1+omega, 1-omega)).

    Same initial law as the plain random-shock ensemble, but all shocks
    travel at speed 1: uniform [1,2] for x/t < 1, uniform [0,1] beyond.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    xi = float(x) / float(t)
    if xi <= 1.0:
        return SegmentMeasure.uniform(1.0, 2.0)
    return SegmentMeasure.uniform(0.0, 1.0)


def smooth_burgers_shock_time(amplitude=0.25, wavenumber=1):
    """First gradient blow-up time of mean + amplitude*sin(2 pi k x)."""
    return 1.0 / (2.0 * np.pi * wavenumber * amplitude)


def smooth_burgers(x, t, mean=0.5, amplitude=0.25, wavenumber=1):
    """Pre-shock classical Burgers solution with sinusoidal data.

    Solves u = u0(x - u t), u0(x) = mean + amplitude*sin(2 pi k x), by
    Newton iteration safeguarded with bisection; valid strictly before the
    shock time 1/(2 pi k amplitude).
    """
    ts = smooth_burgers_shock_time(amplitude, wavenumber)
    if t < 0 or t >= ts:
        raise ValueError(f"t={t} is not before the shock time {ts:.6g}")
    x = np.asarray(x, dtype=float)
    twopik = 2.0 * np.pi * wavenumber

    def u0(z):
        return mean + amplitude * np.sin(twopik * z)

    lo = np.full(x.shape, mean - amplitude)
    hi = np.full(x.shape, mean + amplitude)
    u = 0.5 * (lo + hi)
    for _ in range(100):
        g = u - u0(x - u * t)
        if np.all(np.abs(g) < 1e-14):
            break
        gp = 1.0 + t * amplitude * twopik * np.cos(twopik * (x - u * t))
        hi = np.where(g > 0, u, hi)
        lo = np.where(g > 0, lo, u)
        step = np.where(gp > 0, g / np.where(gp > 0, gp, 1.0), 0.0)
        un = u - step
        bad = (un <= lo) | (un >= hi) | (gp <= 0)
        u = np.where(bad, 0.5 * (lo + hi), un)
    return u if u.shape else float(u)


def transport_lp(xs, ys, p=1):
    """Exact W_p between equal-weight empirical measures by assignment.

    Exhaustive over permutations for n <= 6, Hungarian assignment above,
    up to n = 64 atoms.  Atoms may be scalars or vectors (rows); the cost
    is the Euclidean distance to the power p.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if xs.ndim == 1:
        xs = xs[:, None]
    if ys.ndim == 1:
        ys = ys[:, None]
    n = xs.shape[0]
    if ys.shape[0] != n:
        raise ValueError("equal atom counts required")
    if n > 64:
        raise ValueError("transport oracle limited to 64 atoms")
    cost = np.linalg.norm(xs[:, None, :] - ys[None, :, :], axis=-1) ** p
    if n <= 6:
        best = min(
            cost[np.arange(n), perm].sum() for perm in itertools.permutations(range(n))
        )
    else:
        rows, cols = linear_sum_assignment(cost)
        best = cost[rows, cols].sum()
    return (best / n) ** (1.0 / p)
