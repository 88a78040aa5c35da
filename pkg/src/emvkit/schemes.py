"""Entropy-stable finite-difference schemes on periodic grids.

Numerical fluxes (Rusanov; entropy-conservative two-point and its 4th-order
extension; TeCNO = entropy-conservative part plus ENO-reconstructed
entropy-variable dissipation), the semi-discrete right-hand side, CFL time
step control and SSP Runge-Kutta advancement with per-step diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, SolverAbort
from .grid import Field

__all__ = [
    "SchemeConfig",
    "StepDiagnostics",
    "rusanov_flux",
    "ec_flux",
    "eno_reconstruct",
    "tecno_flux",
    "semi_discrete_rhs",
    "cfl_dt",
    "ssp_rk_advance",
    "step_diagnostics",
]

FLUX_KINDS = ("rusanov", "tecno")
DIFFUSION_KINDS = ("scalar-rusanov", "roe", "none")


@dataclass(frozen=True)
class SchemeConfig:
    """Spatial/temporal discretization choices.

    Rusanov is the monotone first-order scheme and therefore pins order 1;
    TeCNO supports orders 1-3 (entropy-conservative part of order 2 or 4,
    ENO reconstruction of the entropy variables of the given order).
    `diffusion_kind = "none"` drops the TeCNO dissipation entirely (the pure
    entropy-conservative scheme) and is meant for diagnostics only.
    """

    flux_kind: str = "rusanov"
    order: int = 1
    cfl: float = 0.4
    diffusion_kind: str = "scalar-rusanov"
    entropy_check: bool = True
    weak_bv_exponent: float = 2.0
    dt_max: float = 1.0e9

    def __post_init__(self):
        if self.flux_kind not in FLUX_KINDS:
            raise ValueError(f"flux_kind must be one of {FLUX_KINDS}")
        if self.diffusion_kind not in DIFFUSION_KINDS:
            raise ValueError(f"diffusion_kind must be one of {DIFFUSION_KINDS}")
        if self.flux_kind == "rusanov" and self.order != 1:
            raise ValueError("the monotone Rusanov scheme requires order 1")
        if self.order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if self.weak_bv_exponent < 1.0:
            raise ValueError("weak-BV exponent must be >= 1")


@dataclass(frozen=True)
class StepDiagnostics:
    """Recorded after each time step (and once for the initial state)."""

    t: float
    dt: float
    total_entropy: float
    weak_bv_increment: float
    max_abs_state: float


# -- two-point fluxes ---------------------------------------------------


def rusanov_flux(model, sL, sR, axis=0, check=True):
    """Local Lax-Friedrichs flux, consistent and monotone for scalars."""
    sL = np.asarray(sL, dtype=float)
    sR = np.asarray(sR, dtype=float)
    if check:
        model.validate(sL)
        model.validate(sR)
    a = np.maximum(
        model.max_wave_speed(sL, axis), model.max_wave_speed(sR, axis)
    )
    return 0.5 * (model.flux(sL, axis) + model.flux(sR, axis)) - 0.5 * a[
        ..., None
    ] * (sR - sL)


def ec_flux(model, sL, sR, axis=0, check=True):
    """Entropy-conservative two-point flux of the model."""
    sL = np.asarray(sL, dtype=float)
    sR = np.asarray(sR, dtype=float)
    if check:
        model.validate(sL)
        model.validate(sR)
    return model.ec_flux(sL, sR, axis)


def _ec_flux4(model, P, g, nx, axis):
    """4th-order entropy-conservative flux at the nx+1 interfaces.

    Linear combination 4/3 F(u_i, u_{i+1}) - 1/6 (F(u_{i-1}, u_{i+1}) +
    F(u_i, u_{i+2})) of two-point fluxes; P is padded along its
    second-to-last axis with g >= 2 ghost cells.
    """
    s = lambda k0, k1: P[..., g - 1 + k0 : g + nx + k1, :]
    F1 = model.ec_flux(s(0, 0), s(1, 1), axis)
    F2 = model.ec_flux(s(-1, -1), s(1, 1), axis)
    F3 = model.ec_flux(s(0, 0), s(2, 2), axis)
    return (4.0 / 3.0) * F1 - (1.0 / 6.0) * (F2 + F3)


# -- ENO interpolation ---------------------------------------------------


def _eno_coeffs(p):
    """Lagrange edge-value weights per left-shift r: C[r, j] at x = +-1/2."""
    cl = np.zeros((p, p))
    cr = np.zeros((p, p))
    for r in range(p):
        nodes = np.arange(p, dtype=float) - r
        for j in range(p):
            others = np.delete(nodes, j)
            denom = np.prod(nodes[j] - others)
            cl[r, j] = np.prod(-0.5 - others) / denom
            cr[r, j] = np.prod(0.5 - others) / denom
    return cl, cr


_ENO_COEFFS = {p: _eno_coeffs(p) for p in (1, 2, 3)}


def eno_reconstruct(values, order):
    """ENO interface values from cell (midpoint) values, along the last axis.

    Stencils are chosen by smallest-magnitude undivided differences with a
    left-biased tie-break; the interpolation reproduces polynomials of
    degree < order exactly.  Input must carry order-1 ghost cells per side;
    returns (left_edge, right_edge) values for the inner cells, each of
    length L - 2*(order-1) along the last axis.
    """
    v = np.asarray(values, dtype=float)
    p = int(order)
    L = v.shape[-1]
    if L < 2 * p - 1:
        raise ValueError(f"need at least {2 * p - 1} cells for order {p}")
    if p == 1:
        return v.copy(), v.copy()
    idx = np.arange(p - 1, L - p + 1)
    lead = v.shape[:-1]
    left = np.broadcast_to(idx, lead + idx.shape).copy()
    diffs = v
    for k in range(1, p):
        diffs = diffs[..., 1:] - diffs[..., :-1]
        mag_left = np.abs(np.take_along_axis(diffs, left - 1, axis=-1))
        mag_right = np.abs(np.take_along_axis(diffs, left, axis=-1))
        left -= (mag_left <= mag_right).astype(left.dtype)
    shift = idx - left  # in [0, p-1]
    cl, cr = _ENO_COEFFS[p]
    wl = cl[shift]
    wr = cr[shift]
    vl = np.zeros(lead + idx.shape)
    vr = np.zeros(lead + idx.shape)
    for j in range(p):
        sv = np.take_along_axis(v, left + j, axis=-1)
        vl += wl[..., j] * sv
        vr += wr[..., j] * sv
    return vl, vr


# -- TeCNO assembly -------------------------------------------------------


def _tecno_interface_fluxes(model, P, g, nx, axis, order, diffusion_kind):
    """TeCNO fluxes at the nx+1 interfaces of a padded sweep array.

    P has shape (..., nx + 2g, ncomp) with g >= order ghost cells along the
    second-to-last axis; interface j corresponds to the face between cells
    j-1 and j of the unpadded array.
    """
    p = order
    if p >= 3:
        F = _ec_flux4(model, P, g, nx, axis)
    else:
        F = model.ec_flux(
            P[..., g - 1 : g + nx, :], P[..., g : g + nx + 1, :], axis
        )
    if diffusion_kind == "none":
        return F
    # ENO reconstruction of the entropy variables, component-wise; the
    # output covers padded cells (g-1) .. (g+nx) when the pad width is p
    if g != p:
        raise ValueError("tecno sweep requires ghost width == order")
    v = model.entropy_vars(P)
    vm = np.moveaxis(v, -1, -2)  # (..., ncomp, cells)
    vl, vr = eno_reconstruct(vm, p)
    vl = np.moveaxis(vl, -1, -2)
    vr = np.moveaxis(vr, -1, -2)
    dv = vl[..., 1 : nx + 2, :] - vr[..., 0 : nx + 1, :]
    sL = P[..., g - 1 : g + nx, :]
    sR = P[..., g : g + nx + 1, :]
    if diffusion_kind == "scalar-rusanov":
        lam = np.maximum(
            model.max_wave_speed(sL, axis), model.max_wave_speed(sR, axis)
        )
        F = F - 0.5 * lam[..., None] * dv
    elif diffusion_kind == "roe":
        F = F - 0.5 * model.roe_dissipation(sL, sR, axis, dv)
    return F


def tecno_flux(model, stencil, order, diffusion_kind="scalar-rusanov", check=True):
    """Single TeCNO interface flux from a stencil of 2*order states.

    The stencil covers cells i-order+1 .. i+order; the flux is for the
    interface between its two middle entries.
    """
    S = np.asarray(stencil, dtype=float)
    if S.ndim != 2 or S.shape[0] != 2 * order:
        raise ValueError(f"stencil must hold {2 * order} states")
    if check:
        model.validate(S)
    P = S[None, ...]  # leading batch axis
    g = order
    F = _tecno_interface_fluxes(model, P, g, 0, 0, order, diffusion_kind)
    return F[0, 0]


# -- semi-discrete RHS, CFL and SSP-RK time stepping ----------------------


def _sweep_rhs(model, data, axis, dx, config):
    """Flux-difference tendency for one coordinate axis."""
    nd = data.ndim - 1
    arr = np.moveaxis(data, axis, -2) if axis != nd - 1 else data
    nx = arr.shape[-2]
    g = max(config.order, 1)
    pad = [(0, 0)] * arr.ndim
    pad[-2] = (g, g)
    P = np.pad(arr, pad, mode="wrap")
    if config.flux_kind == "rusanov":
        sL = P[..., g - 1 : g + nx, :]
        sR = P[..., g : g + nx + 1, :]
        a = np.maximum(
            model.max_wave_speed(sL, axis), model.max_wave_speed(sR, axis)
        )
        F = 0.5 * (model.flux(sL, axis) + model.flux(sR, axis)) - 0.5 * a[
            ..., None
        ] * (sR - sL)
    else:
        F = _tecno_interface_fluxes(
            model, P, g, nx, axis, config.order, config.diffusion_kind
        )
    out = -(F[..., 1:, :] - F[..., :-1, :]) / dx
    return np.moveaxis(out, -2, axis) if axis != nd - 1 else out


def semi_discrete_rhs(model, fld, config):
    """Tendency -(F_{i+1/2} - F_{i-1/2})/dx (+ the y-sweep in 2D)."""
    grid = fld.grid
    rhs = np.zeros_like(fld.data)
    for axis in range(grid.ndim):
        rhs += _sweep_rhs(model, fld.data, axis, grid.dx[axis], config)
    return rhs


def cfl_dt(model, fld, cfl, dt_max=1.0e9):
    """dt = cfl * min over axes of dx / (max cell wave speed on that axis)."""
    dt = float(dt_max)
    for axis in range(fld.grid.ndim):
        amax = float(model.max_wave_speed(fld.data, axis).max())
        if amax > 0.0:
            dt = min(dt, cfl * fld.grid.dx[axis] / amax)
    return dt


def step_diagnostics(model, grid, data, t, dt, r):
    """Entropy total, weak-BV jump sum at exponent r, and max |state|."""
    vol = grid.cell_volume
    total_entropy = float(model.entropy(data).sum()) * vol
    bv = 0.0
    for axis in range(grid.ndim):
        jump = np.roll(data, -1, axis=axis) - data
        if data.shape[-1] == 1:
            mag = np.abs(jump[..., 0])
        else:
            mag = np.sqrt((jump * jump).sum(axis=-1))
        bv += float((mag**r).sum()) * vol
    return StepDiagnostics(
        t=float(t),
        dt=float(dt),
        total_entropy=total_entropy,
        weak_bv_increment=bv,
        max_abs_state=float(np.abs(data).max()),
    )


def ssp_rk_advance(model, fld, config, t_end, sample=None, fastpath=True):
    """Advance a field to t_end with SSP-RK2 (orders 1-2) or SSP-RK3.

    The final step is clipped to land exactly on t_end.  Per-step
    diagnostics (plus one row for the initial state) are recorded when
    `config.entropy_check` is set.  State invalidation aborts with the
    time and cell attached.  When diagnostics are off and a compiled
    kernel matches the configuration, that kernel is used (same results
    as the reference path; see `_fastpath`).
    """
    if t_end < fld.time:
        raise ValueError("t_end must not precede the field time")
    if fastpath and not config.entropy_check:
        from . import _fastpath

        data, _running, handled, ok = _fastpath.try_advance(model, fld, config, t_end)
        if handled:
            if not ok:
                raise SolverAbort(
                    f"state invalidated before t={t_end:.10g}"
                    + (f" sample={sample}" if sample is not None else "")
                )
            return Field(fld.grid, data, float(t_end)), []
    grid = fld.grid
    u = fld.data.copy()
    t = float(fld.time)
    r = config.weak_bv_exponent
    diags = []
    if config.entropy_check:
        diags.append(step_diagnostics(model, grid, u, t, 0.0, r))

    def rhs(w):
        return semi_discrete_rhs(model, Field(grid, w, t), config)

    def check(w, stage):
        try:
            model.validate(w, context=f"({stage})")
        except InvalidStateError as err:
            raise SolverAbort(
                f"state invalidated at t={t:.10g} {stage}"
                + (f" sample={sample}" if sample is not None else "")
                + f": {err}"
            ) from err

    while t < t_end:
        dt = min(cfl_dt(model, Field(grid, u, t), config.cfl), config.dt_max)
        remaining = t_end - t
        last = dt >= remaining or (remaining - dt) < 1e-12 * max(1.0, abs(t_end))
        if last:
            dt = remaining
        L0 = rhs(u)
        u1 = u + dt * L0
        check(u1, "stage 1")
        L1 = rhs(u1)
        if config.order >= 3:
            u2 = 0.75 * u + 0.25 * (u1 + dt * L1)
            check(u2, "stage 2")
            L2 = rhs(u2)
            u = (u + 2.0 * (u2 + dt * L2)) / 3.0
        else:
            u = 0.5 * (u + u1 + dt * L1)
        check(u, "step end")
        t = t_end if last else t + dt
        if config.entropy_check:
            diags.append(step_diagnostics(model, grid, u, t, dt, r))
    return Field(grid, u, t), diags
