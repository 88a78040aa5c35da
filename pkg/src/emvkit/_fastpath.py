"""Compiled fast paths for the two hot solver configurations.

These kernels mirror, operation for operation, the numpy reference
implementation in `schemes` (same expressions, same evaluation order), so
the results agree with the general path; equivalence is asserted in the
test suite.  Selected automatically by `ssp_rk_advance` when diagnostics
are off and the configuration matches.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    AVAILABLE = False

    def njit(*args, **kwargs):
        def deco(fn):
            return fn

        return deco if not (len(args) == 1 and callable(args[0])) else args[0]


_TINY_REL = 1e-12


@njit(cache=True)
def _burgers_rusanov_rk2(u, dx, cfl, dt_max, t, t_end):
    """Advance scalar Burgers with the Rusanov flux and SSP-RK2 in place.

    Returns (t, running_max_abs, ok).
    """
    n = u.shape[0]
    L0 = np.empty(n)
    L1 = np.empty(n)
    u1 = np.empty(n)
    F = np.empty(n + 1)
    running = 0.0
    while t < t_end:
        amax = 0.0
        for i in range(n):
            a = abs(u[i])
            if a > amax:
                amax = a
        if amax > running:
            running = amax
        dt = dt_max
        if amax > 0.0:
            dtc = cfl * dx / amax
            if dtc < dt:
                dt = dtc
        remaining = t_end - t
        scale = abs(t_end)
        if scale < 1.0:
            scale = 1.0
        last = dt >= remaining or (remaining - dt) < _TINY_REL * scale
        if last:
            dt = remaining

        for stage in range(2):
            src = u if stage == 0 else u1
            dst = L0 if stage == 0 else L1
            for i in range(n + 1):
                iL = (i - 1) % n
                iR = i % n
                uL = src[iL]
                uR = src[iR]
                aL = abs(uL)
                aR = abs(uR)
                a = aL if aL > aR else aR
                fL = 0.5 * uL * uL
                fR = 0.5 * uR * uR
                F[i] = 0.5 * (fL + fR) - 0.5 * a * (uR - uL)
            for i in range(n):
                dst[i] = -(F[i + 1] - F[i]) / dx
            if stage == 0:
                for i in range(n):
                    u1[i] = u[i] + dt * L0[i]
        for i in range(n):
            u[i] = 0.5 * (u[i] + u1[i] + dt * L1[i])
        t = t_end if last else t + dt
        for i in range(n):
            if not np.isfinite(u[i]):
                return t, running, False
    for i in range(n):
        a = abs(u[i])
        if a > running:
            running = a
    return t, running, True


@njit(cache=True, inline="always")
def _log_mean(a, b):
    zeta = a / b
    f = (zeta - 1.0) / (zeta + 1.0)
    u = f * f
    if abs(zeta - 1.0) < 1e-4:
        F = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0
    else:
        F = np.log(zeta) / (2.0 * f)
    return (a + b) / (2.0 * F)


@njit(cache=True)
def _euler2d_derive(U, g, rho, wx, wy, p, V, sx, sy):
    """Primitives, entropy variables and directional speeds; False if invalid."""
    nx, ny = U.shape[0], U.shape[1]
    gm1 = g - 1.0
    for i in range(nx):
        for j in range(ny):
            r = U[i, j, 0]
            m1 = U[i, j, 1]
            m2 = U[i, j, 2]
            E = U[i, j, 3]
            if not (np.isfinite(r) and np.isfinite(m1) and np.isfinite(m2) and np.isfinite(E)):
                return False
            if r <= 0.0:
                return False
            ke = m1 * m1 + m2 * m2
            ke = 0.5 * ke / r
            pr = gm1 * (E - ke)
            if pr <= 0.0:
                return False
            rho[i, j] = r
            a = m1 / r
            b = m2 / r
            wx[i, j] = a
            wy[i, j] = b
            p[i, j] = pr
            c = np.sqrt(g * pr / r)
            sx[i, j] = abs(a) + c
            sy[i, j] = abs(b) + c
            s = np.log(pr) - g * np.log(r)
            kv = (m1 / r) ** 2 + (m2 / r) ** 2
            V[i, j, 0] = (g - s) / gm1 - 0.5 * r * kv / pr
            V[i, j, 1] = m1 / pr
            V[i, j, 2] = m2 / pr
            V[i, j, 3] = -r / pr
    return True


@njit(cache=True, inline="always")
def _eno2_edges(vm, v0, vp, vpp):
    """ENO2 right edge of cell 0 and left edge of cell 1 from 4 cell values."""
    # cell 0: stencil {-1,0} when |v0-vm| <= |vp-v0| (left bias), else {0,1}
    if abs(v0 - vm) <= abs(vp - v0):
        vr = -0.5 * vm + 1.5 * v0
    else:
        vr = 0.5 * v0 + 0.5 * vp
    # cell 1: stencil {0,1} when |vp-v0| <= |vpp-vp|, else {1,2}
    if abs(vp - v0) <= abs(vpp - vp):
        vl = 0.5 * v0 + 0.5 * vp
    else:
        vl = 1.5 * vp + -0.5 * vpp
    return vr, vl


@njit(cache=True)
def _euler2d_tecno2_rhs(U, g, dx, dy, diffusion_code, rho, wx, wy, p, V, sx, sy, F, out):
    """TeCNO2 tendency: EC2 flux + dissipation on the ENO2 v-jump.

    diffusion_code: 0 scalar-Rusanov (lambda * I), 1 Roe-type
    (entropy-scaled eigenvectors at the arithmetic average), 2 none.
    """
    nx, ny = U.shape[0], U.shape[1]
    gm1 = g - 1.0
    dv = np.empty(4)
    for axis in range(2):
        d = dx if axis == 0 else dy
        n_sweep = nx if axis == 0 else ny
        n_other = ny if axis == 0 else nx
        for jo in range(n_other):
            for i in range(n_sweep):
                ip = (i + 1) % n_sweep
                im = (i - 1) % n_sweep
                ipp = (i + 2) % n_sweep
                if axis == 0:
                    iL0, jL0 = i, jo
                    iR0, jR0 = ip, jo
                    iM, jM = im, jo
                    iP2, jP2 = ipp, jo
                else:
                    iL0, jL0 = jo, i
                    iR0, jR0 = jo, ip
                    iM, jM = jo, im
                    iP2, jP2 = jo, ipp
                rhoL = rho[iL0, jL0]
                rhoR = rho[iR0, jR0]
                pL = p[iL0, jL0]
                pR = p[iR0, jR0]
                wxL = wx[iL0, jL0]
                wxR = wx[iR0, jR0]
                wyL = wy[iL0, jL0]
                wyR = wy[iR0, jR0]
                betaL = 0.5 * rhoL / pL
                betaR = 0.5 * rhoR / pR
                rho_ln = _log_mean(rhoL, rhoR)
                beta_ln = _log_mean(betaL, betaR)
                rho_bar = 0.5 * (rhoL + rhoR)
                beta_bar = 0.5 * (betaL + betaR)
                p_hat = 0.5 * rho_bar / beta_bar
                wbar0 = 0.5 * (wxL + wxR)
                wbar1 = 0.5 * (wyL + wyR)
                wsq = 0.5 * (wxL * wxL + wxR * wxR) + 0.5 * (wyL * wyL + wyR * wyR)
                wbar_ax = wbar0 if axis == 0 else wbar1
                F0 = rho_ln * wbar_ax
                F1 = wbar0 * F0
                F2 = wbar1 * F0
                if axis == 0:
                    F1 = F1 + p_hat
                else:
                    F2 = F2 + p_hat
                FE = (0.5 / (gm1 * beta_ln) - 0.5 * wsq) * F0
                FE = FE + wbar0 * F1
                FE = FE + wbar1 * F2
                F[i, jo, 0] = F0
                F[i, jo, 1] = F1
                F[i, jo, 2] = F2
                F[i, jo, 3] = FE
                if diffusion_code == 2:
                    continue
                for c in range(4):
                    vr, vl = _eno2_edges(
                        V[iM, jM, c], V[iL0, jL0, c], V[iR0, jR0, c], V[iP2, jP2, c]
                    )
                    dv[c] = vl - vr
                if diffusion_code == 0:
                    lamL = sx[iL0, jL0] if axis == 0 else sy[iL0, jL0]
                    lamR = sx[iR0, jR0] if axis == 0 else sy[iR0, jR0]
                    lam = lamL if lamL > lamR else lamR
                    for c in range(4):
                        F[i, jo, c] = F[i, jo, c] - 0.5 * lam * dv[c]
                else:
                    # Roe-type: D = sum_k |lam_k| T_k r_k r_k^T at the average
                    ub0 = 0.5 * (U[iL0, jL0, 0] + U[iR0, jR0, 0])
                    ub1 = 0.5 * (U[iL0, jL0, 1] + U[iR0, jR0, 1])
                    ub2 = 0.5 * (U[iL0, jL0, 2] + U[iR0, jR0, 2])
                    ub3 = 0.5 * (U[iL0, jL0, 3] + U[iR0, jR0, 3])
                    ke = ub1 * ub1 + ub2 * ub2
                    ke = 0.5 * ke / ub0
                    pb = gm1 * (ub3 - ke)
                    cb = np.sqrt(g * pb / ub0)
                    ua = ub1 / ub0
                    va = ub2 / ub0
                    kv = ua * ua + va * va
                    Hb = (ub3 + pb) / ub0
                    un = ua if axis == 0 else va
                    t_ac = ub0 / (2.0 * g)
                    t_en = ub0 * gm1 / g
                    t_sh = pb
                    # wave 0: un - c
                    if axis == 0:
                        r0a, r0b = ua - cb, va
                    else:
                        r0a, r0b = ua, va - cb
                    a0 = abs(un - cb) * t_ac * (
                        dv[0] + r0a * dv[1] + r0b * dv[2] + (Hb - un * cb) * dv[3]
                    )
                    # wave 1: entropy
                    a1 = abs(un) * t_en * (
                        dv[0] + ua * dv[1] + va * dv[2] + 0.5 * kv * dv[3]
                    )
                    # wave 2: shear
                    if axis == 0:
                        a2 = abs(un) * t_sh * (dv[2] + va * dv[3])
                    else:
                        a2 = abs(un) * t_sh * (dv[1] + ua * dv[3])
                    # wave 3: un + c
                    if axis == 0:
                        r3a, r3b = ua + cb, va
                    else:
                        r3a, r3b = ua, va + cb
                    a3 = abs(un + cb) * t_ac * (
                        dv[0] + r3a * dv[1] + r3b * dv[2] + (Hb + un * cb) * dv[3]
                    )
                    D0 = a0 + a1 + a3
                    D1 = a0 * r0a + a1 * ua + a3 * r3a
                    D2 = a0 * r0b + a1 * va + a3 * r3b
                    D3 = a0 * (Hb - un * cb) + a1 * (0.5 * kv) + a3 * (Hb + un * cb)
                    if axis == 0:
                        D2 = D2 + a2
                        D3 = D3 + a2 * va
                    else:
                        D1 = D1 + a2
                        D3 = D3 + a2 * ua
                    F[i, jo, 0] = F[i, jo, 0] - 0.5 * D0
                    F[i, jo, 1] = F[i, jo, 1] - 0.5 * D1
                    F[i, jo, 2] = F[i, jo, 2] - 0.5 * D2
                    F[i, jo, 3] = F[i, jo, 3] - 0.5 * D3
        for jo in range(n_other):
            for i in range(n_sweep):
                im = (i - 1) % n_sweep
                for c in range(4):
                    dF = -(F[i, jo, c] - F[im, jo, c]) / d
                    if axis == 0:
                        out[i, jo, c] = dF
                    else:
                        out[jo, i, c] = out[jo, i, c] + dF
    return True


@njit(cache=True)
def _euler2d_tecno2_rk2(U, g, dx, dy, cfl, dt_max, t, t_end, diffusion_code):
    """Advance 2D Euler with TeCNO2 and SSP-RK2 in place.

    Returns (t, running_max_abs, ok).
    """
    nx, ny = U.shape[0], U.shape[1]
    rho = np.empty((nx, ny))
    wx = np.empty((nx, ny))
    wy = np.empty((nx, ny))
    p = np.empty((nx, ny))
    V = np.empty((nx, ny, 4))
    sx = np.empty((nx, ny))
    sy = np.empty((nx, ny))
    F = np.empty((nx, ny, 4))
    L0 = np.empty((nx, ny, 4))
    L1 = np.empty((nx, ny, 4))
    U1 = np.empty((nx, ny, 4))
    running = 0.0
    while t < t_end:
        if not _euler2d_derive(U, g, rho, wx, wy, p, V, sx, sy):
            return t, running, False
        amax_x = 0.0
        amax_y = 0.0
        umax = 0.0
        for i in range(nx):
            for j in range(ny):
                if sx[i, j] > amax_x:
                    amax_x = sx[i, j]
                if sy[i, j] > amax_y:
                    amax_y = sy[i, j]
                for c in range(4):
                    a = abs(U[i, j, c])
                    if a > umax:
                        umax = a
        if umax > running:
            running = umax
        dt = dt_max
        if amax_x > 0.0:
            dtc = cfl * dx / amax_x
            if dtc < dt:
                dt = dtc
        if amax_y > 0.0:
            dtc = cfl * dy / amax_y
            if dtc < dt:
                dt = dtc
        remaining = t_end - t
        scale = abs(t_end)
        if scale < 1.0:
            scale = 1.0
        last = dt >= remaining or (remaining - dt) < _TINY_REL * scale
        if last:
            dt = remaining

        _euler2d_tecno2_rhs(U, g, dx, dy, rho, wx, wy, p, V, sx, sy, F, L0)
        for i in range(nx):
            for j in range(ny):
                for c in range(4):
                    U1[i, j, c] = U[i, j, c] + dt * L0[i, j, c]
        if not _euler2d_derive(U1, g, rho, wx, wy, p, V, sx, sy):
            return t, running, False
        _euler2d_tecno2_rhs(U1, g, dx, dy, rho, wx, wy, p, V, sx, sy, F, L1)
        for i in range(nx):
            for j in range(ny):
                for c in range(4):
                    U[i, j, c] = 0.5 * (U[i, j, c] + U1[i, j, c] + dt * L1[i, j, c])
        t = t_end if last else t + dt
    return t, running, True


def try_advance(model, fld, config, t_end):
    """Run a compiled kernel when the configuration matches one.

    Returns (new_field_data, running_max, True) on success or
    (None, 0.0, False) when no kernel applies; raises SolverAbort never
    (the ok flag signals invalid states to the caller).
    """
    if not AVAILABLE or config.entropy_check:
        return None, 0.0, False, True
    grid = fld.grid
    if (
        model.kind == "burgers"
        and grid.ndim == 1
        and config.flux_kind == "rusanov"
    ):
        u = fld.data[:, 0].copy()
        t, running, ok = _burgers_rusanov_rk2(
            u, grid.dx[0], config.cfl, config.dt_max, float(fld.time), float(t_end)
        )
        return u[:, None], running, True, ok
    if (
        model.kind == "euler2d"
        and grid.ndim == 2
        and config.flux_kind == "tecno"
        and config.order == 2
        and config.diffusion_kind == "scalar-rusanov"
    ):
        U = fld.data.copy()
        t, running, ok = _euler2d_tecno2_rk2(
            U,
            model.gamma,
            grid.dx[0],
            grid.dx[1],
            config.cfl,
            config.dt_max,
            float(fld.time),
            float(t_end),
        )
        return U, running, True, ok
    return None, 0.0, False, True
