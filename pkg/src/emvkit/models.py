"""Conservation-law models: fluxes, wave speeds and entropy structure.

States are numpy arrays with the component index last, so every operation
is vectorized over arbitrary leading (cell) axes.  Burgers uses the square
entropy eta = u^2/2; Euler uses the thermodynamic entropy
eta = -rho*s/(gamma-1) with s = log p - gamma log rho.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError

__all__ = [
    "Burgers",
    "Euler",
    "EntropyStructure",
    "make_model",
    "entropy_structure",
    "kruzkov_pair",
    "log_mean",
]


def log_mean(a, b):
    """Logarithmic mean (a-b)/(log a - log b), stable near a == b.

    Switches to the series expansion of log in terms of z = a/b when the
    ratio is within 1e-4 of 1, which avoids the 0/0 limit without any
    accuracy loss (the truncation error is ~(z-1)^8).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    zeta = a / b
    f = (zeta - 1.0) / (zeta + 1.0)
    u = f * f
    series = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = np.log(zeta) / (2.0 * f)
    F = np.where(np.abs(zeta - 1.0) < 1e-4, series, exact)
    return (a + b) / (2.0 * F)


@dataclass
class EntropyStructure:
    """Entropy pair evaluation bundle at given states.

    eta: entropy, q: entropy flux per direction, v: entropy variables
    (gradient of eta in the conserved variables), psi: entropy potential
    per direction, psi^d = v . f^d - q^d.
    """

    eta: np.ndarray
    q: tuple
    v: np.ndarray
    psi: tuple


class Burgers:
    """Scalar Burgers equation u_t + (u^2/2)_x = 0 with the square entropy."""

    kind = "burgers"
    ndim = 1
    ncomp = 1
    entropy_kind = "square"
    gamma = 0.0  # scalar models carry no adiabatic constant

    def validate(self, U, context=""):
        if not np.all(np.isfinite(U)):
            raise InvalidStateError(f"non-finite state {context}".strip())

    def flux(self, U, axis=0, check=False):
        if check:
            self.validate(U)
        return 0.5 * U * U

    def max_wave_speed(self, U, axis=0, check=False):
        if check:
            self.validate(U)
        return np.abs(U[..., 0])

    def entropy(self, U):
        u = U[..., 0]
        return 0.5 * u * u

    def entropy_flux(self, U, axis=0):
        u = U[..., 0]
        return u * u * u / 3.0

    def entropy_vars(self, U):
        return U.copy()

    def entropy_potential(self, U, axis=0):
        u = U[..., 0]
        return u * u * u / 6.0

    def primitive_to_conserved(self, W):
        return np.asarray(W, dtype=float).copy()

    def conserved_to_primitive(self, U):
        return np.asarray(U, dtype=float).copy()

    def ec_flux(self, UL, UR, axis=0):
        """Entropy-conservative two-point flux (uL^2 + uL uR + uR^2)/6."""
        uL = UL[..., 0]
        uR = UR[..., 0]
        return ((uL * uL + uL * uR + uR * uR) / 6.0)[..., None]

    def roe_dissipation(self, UL, UR, axis, dv):
        """|f'(ubar)| applied to the entropy-variable jump."""
        ubar = 0.5 * (UL[..., 0] + UR[..., 0])
        return np.abs(ubar)[..., None] * dv


class Euler:
    """Compressible Euler equations in 1 or 2 space dimensions.

    Conserved components: (rho, rho*w_x[, rho*w_y], E) with the ideal-gas
    closure E = p/(gamma-1) + rho |w|^2 / 2.
    """

    kind_by_ndim = {1: "euler1d", 2: "euler2d"}
    entropy_kind = "physical"

    def __init__(self, ndim=2, gamma=1.4):
        if ndim not in (1, 2):
            raise ValueError("Euler supports ndim 1 or 2")
        if gamma <= 1.0:
            raise ValueError("gamma must exceed 1")
        self.ndim = ndim
        self.gamma = float(gamma)
        self.ncomp = 2 + ndim
        self.kind = self.kind_by_ndim[ndim]

    # -- primitive/conserved conversions ------------------------------

    def pressure(self, U):
        rho = U[..., 0]
        ke = np.zeros_like(rho)
        for d in range(self.ndim):
            ke = ke + U[..., 1 + d] ** 2
        ke = 0.5 * ke / rho
        return (self.gamma - 1.0) * (U[..., -1] - ke)

    def sound_speed(self, U):
        return np.sqrt(self.gamma * self.pressure(U) / U[..., 0])

    def velocity(self, U, axis):
        return U[..., 1 + axis] / U[..., 0]

    def primitive_to_conserved(self, W):
        """(rho, w..., p) -> (rho, rho w..., E).  Requires rho, p > 0."""
        W = np.asarray(W, dtype=float)
        rho = W[..., 0]
        p = W[..., -1]
        if np.any(rho <= 0.0) or np.any(p <= 0.0):
            raise InvalidStateError("nonpositive density or pressure in primitive state")
        U = np.empty_like(W)
        U[..., 0] = rho
        ke = np.zeros_like(rho)
        for d in range(self.ndim):
            U[..., 1 + d] = rho * W[..., 1 + d]
            ke = ke + W[..., 1 + d] ** 2
        U[..., -1] = p / (self.gamma - 1.0) + 0.5 * rho * ke
        return U

    def conserved_to_primitive(self, U):
        U = np.asarray(U, dtype=float)
        self.validate(U)
        W = np.empty_like(U)
        W[..., 0] = U[..., 0]
        for d in range(self.ndim):
            W[..., 1 + d] = U[..., 1 + d] / U[..., 0]
        W[..., -1] = self.pressure(U)
        return W

    def validate(self, U, context=""):
        ok = np.isfinite(U).all()
        if ok and np.all(U[..., 0] > 0.0):
            if np.all(self.pressure(U) > 0.0):
                return
        # locate the first offending cell for the diagnostic
        bad = ~np.isfinite(U).all(axis=-1) | (U[..., 0] <= 0.0)
        with np.errstate(invalid="ignore"):
            bad |= ~(self.pressure(U) > 0.0)
        idx = np.argwhere(bad)
        cell = tuple(idx[0]) if idx.size else None
        raise InvalidStateError(
            f"invalid Euler state (rho or p nonpositive, or non-finite) {context}".strip(),
            cell=cell,
        )

    # -- flux and wave speeds ------------------------------------------

    def flux(self, U, axis=0, check=False):
        if check:
            self.validate(U)
        rho = U[..., 0]
        p = self.pressure(U)
        wd = U[..., 1 + axis] / rho
        F = np.empty_like(U)
        F[..., 0] = U[..., 1 + axis]
        for d in range(self.ndim):
            F[..., 1 + d] = U[..., 1 + d] * wd
        F[..., 1 + axis] += p
        F[..., -1] = (U[..., -1] + p) * wd
        return F

    def max_wave_speed(self, U, axis=0, check=False):
        if check:
            self.validate(U)
        return np.abs(self.velocity(U, axis)) + self.sound_speed(U)

    # -- entropy structure ---------------------------------------------

    def thermo_entropy(self, U):
        """s = log p - gamma log rho."""
        return np.log(self.pressure(U)) - self.gamma * np.log(U[..., 0])

    def entropy(self, U):
        return -U[..., 0] * self.thermo_entropy(U) / (self.gamma - 1.0)

    def entropy_flux(self, U, axis=0):
        return self.velocity(U, axis) * self.entropy(U)

    def entropy_vars(self, U):
        rho = U[..., 0]
        p = self.pressure(U)
        s = np.log(p) - self.gamma * np.log(rho)
        ke = np.zeros_like(rho)
        for d in range(self.ndim):
            ke = ke + (U[..., 1 + d] / rho) ** 2
        V = np.empty_like(U)
        V[..., 0] = (self.gamma - s) / (self.gamma - 1.0) - 0.5 * rho * ke / p
        for d in range(self.ndim):
            V[..., 1 + d] = U[..., 1 + d] / p
        V[..., -1] = -rho / p
        return V

    def entropy_potential(self, U, axis=0):
        """psi^d = v . f^d - q^d = rho w_d for this entropy pair."""
        return U[..., 1 + axis]

    # -- entropy-conservative two-point flux ---------------------------

    def ec_flux(self, UL, UR, axis=0):
        """Two-point flux satisfying (vR - vL) . F = psi_R - psi_L.

        Arithmetic/logarithmic-mean construction in (rho, w, beta) with
        beta = rho/(2p); the jump identity is the normative contract and
        is enforced by tests, not trusted from the algebra.
        """
        g = self.gamma
        rhoL, rhoR = UL[..., 0], UR[..., 0]
        pL, pR = self.pressure(UL), self.pressure(UR)
        betaL = 0.5 * rhoL / pL
        betaR = 0.5 * rhoR / pR
        rho_ln = log_mean(rhoL, rhoR)
        beta_ln = log_mean(betaL, betaR)
        rho_bar = 0.5 * (rhoL + rhoR)
        beta_bar = 0.5 * (betaL + betaR)
        p_hat = 0.5 * rho_bar / beta_bar
        w_bar = []
        wsq_bar = np.zeros_like(rho_bar)
        for d in range(self.ndim):
            wLd = UL[..., 1 + d] / rhoL
            wRd = UR[..., 1 + d] / rhoR
            w_bar.append(0.5 * (wLd + wRd))
            wsq_bar = wsq_bar + 0.5 * (wLd * wLd + wRd * wRd)
        F = np.empty(np.broadcast(UL, UR).shape, dtype=float)
        F[..., 0] = rho_ln * w_bar[axis]
        for d in range(self.ndim):
            F[..., 1 + d] = w_bar[d] * F[..., 0]
        F[..., 1 + axis] += p_hat
        F[..., -1] = (0.5 / ((g - 1.0) * beta_ln) - 0.5 * wsq_bar) * F[..., 0]
        for d in range(self.ndim):
            F[..., -1] += w_bar[d] * F[..., 1 + d]
        return F

    # -- Roe-type entropy-scaled dissipation ----------------------------

    def _eigensystem(self, U, axis):
        """Eigenvalues, right eigenvectors and entropy scalings at U.

        The scaling T makes R diag(T) R^T equal to du/dv (the entropy
        symmetrizer), so D = R diag(|lambda| T) R^T applied to an
        entropy-variable jump is symmetric positive semi-definite.
        """
        g = self.gamma
        rho = U[..., 0]
        p = self.pressure(U)
        c = np.sqrt(g * p / rho)
        w = [U[..., 1 + d] / rho for d in range(self.ndim)]
        ke = sum(wd * wd for wd in w)
        H = (U[..., -1] + p) / rho
        un = w[axis]

        nwaves = self.ncomp
        shape = rho.shape
        lam = np.empty(shape + (nwaves,))
        T = np.empty(shape + (nwaves,))
        R = np.zeros(shape + (nwaves, self.ncomp))

        def fill(i, rho_comp, vel, ener):
            R[..., i, 0] = rho_comp
            for d in range(self.ndim):
                R[..., i, 1 + d] = vel[d]
            R[..., i, -1] = ener

        # acoustic minus
        lam[..., 0] = un - c
        T[..., 0] = rho / (2.0 * g)
        vel_m = list(w)
        vel_m[axis] = un - c
        fill(0, 1.0, vel_m, H - un * c)
        # entropy wave
        lam[..., 1] = un
        T[..., 1] = rho * (g - 1.0) / g
        fill(1, 1.0, w, 0.5 * ke)
        # shear wave (2D only)
        if self.ndim == 2:
            t_ax = 1 - axis
            lam[..., 2] = un
            T[..., 2] = p
            shear_vel = [0.0, 0.0]
            shear_vel[t_ax] = 1.0
            fill(2, 0.0, shear_vel, w[t_ax])
        # acoustic plus
        lam[..., -1] = un + c
        T[..., -1] = rho / (2.0 * g)
        vel_p = list(w)
        vel_p[axis] = un + c
        fill(nwaves - 1, 1.0, vel_p, H + un * c)
        return lam, T, R

    def roe_dissipation(self, UL, UR, axis, dv):
        """D dv with D = R |Lambda| T R^T at the arithmetic-average state."""
        Ubar = 0.5 * (UL + UR)
        lam, T, R = self._eigensystem(Ubar, axis)
        alpha = np.abs(lam) * T * np.einsum("...ic,...c->...i", R, dv)
        return np.einsum("...i,...ic->...c", alpha, R)


def make_model(kind, gamma=1.4):
    """Factory by model kind string: burgers | euler1d | euler2d."""
    kind = kind.lower()
    if kind == "burgers":
        return Burgers()
    if kind == "euler1d":
        return Euler(ndim=1, gamma=gamma)
    if kind == "euler2d":
        return Euler(ndim=2, gamma=gamma)
    raise ValueError(f"unknown model kind {kind!r}")


def entropy_structure(model, U):
    """Evaluate the full entropy bundle (eta, q, v, psi) at states U."""
    model.validate(U)
    q = tuple(model.entropy_flux(U, axis=d) for d in range(model.ndim))
    psi = tuple(model.entropy_potential(U, axis=d) for d in range(model.ndim))
    return EntropyStructure(eta=model.entropy(U), q=q, v=model.entropy_vars(U), psi=psi)


def kruzkov_pair(xi, u, flux=None):
    """Kruzkov entropy pair (|xi-u|, sgn(xi-u)(f(xi)-f(u))) for scalar laws.

    `flux` maps u -> f(u); defaults to the Burgers flux u^2/2.
    """
    xi = np.asarray(xi, dtype=float)
    u = np.asarray(u, dtype=float)
    if flux is None:
        flux = lambda w: 0.5 * w * w
    eta = np.abs(xi - u)
    q = np.sign(xi - u) * (flux(xi) - flux(u))
    return eta, q
