"""Second-order Taylor data of the potential around the mean-field minimum.

Coefficients (with E_k^2 = k0^2 + e_k^2 + lam r0^2, sums over k with both
k and k - q in the cutoff set):

    alpha_q = 1 - (lam/kappa) sum_k (1/2)(1/E_k^2 + 1/E_{k-q}^2)
                + (1/2)(lam/kappa) sum_k [q0^2 + (e_k - e_{k-q})^2] / (E_k^2 E_{k-q}^2)
    beta_q  = (lam/kappa) sum_k lam r0^2 / (E_k^2 E_{k-q}^2)
    gamma_q = (lam/kappa) sum_k [k0 e_{k-q} - (k0 - q0) e_k] / (E_k^2 E_{k-q}^2)

alpha_q absorbs the unit coefficient of the |phi_q|^2 field term; the gap
equation makes the half-sum piece cancel it at q = 0, so alpha(0) equals the
gap residual.  The decomposition

    1 - (lam/kappa) sum_k a_k abar_{k-q} / (E_k^2 E_{k-q}^2)
      = alpha_q + i gamma_q + beta_q

then holds exactly per k and is exposed for verification.  As lam -> 0,
beta_q -> 0 and alpha_q + i gamma_q -> 1, matching V = sum |phi_q|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    FieldConfig,
    ModelSpec,
    MomentumSet,
    TransferSet,
    bcs_config,
    dispersion_array,
)
from .gap import vbcs_r
from .potential import (
    ExternalField,
    potential_external_reduced,
    potential_full,
    potential_reduced,
    vbcs_sum,
)


@dataclass
class QuadraticForm:
    """Expansion coefficients aligned to the transfer-set ordering."""

    transfer: TransferSet
    alpha: np.ndarray
    beta_coef: np.ndarray
    gamma: np.ndarray
    beta0: float
    r0: float
    theta0: float
    v_min: float
    e_sq: np.ndarray
    shift: float = 0.0


def _pair_sums(spec: ModelSpec, M: MomentumSet, Q: TransferSet, delta_sq: float):
    """Per-q sums 1/(E^2 E'^2), the alpha numerator, the gamma numerator and
    the complex a_k abar_{k-q} sum, exploiting the product structure of M."""
    beta_f = math.pi / spec.beta
    n_lo = int(M.freq_n0.min())
    n_hi = int(M.freq_n0.max())
    spatial = {m: i for i, m in enumerate(M.spatial_m)}
    e_s = M.spatial_e

    # cache spatial masks/shifted dispersions per distinct spatial transfer
    spatial_cache: dict = {}
    nq_cache: dict = {}
    inv_sum = np.zeros(len(Q))
    alpha_num = np.zeros(len(Q))
    gamma_num = np.zeros(len(Q))
    cross = np.zeros(len(Q), dtype=complex)
    half_sum = np.zeros(len(Q))

    for iq, q in enumerate(Q.momenta):
        mq = q.m
        if mq not in spatial_cache:
            keep = [i for i, m in enumerate(M.spatial_m)
                    if tuple(a - b for a, b in zip(m, mq)) in spatial]
            e1 = e_s[keep]
            e2 = dispersion_array(
                spec, np.array([np.subtract(M.spatial_m[i], mq) for i in keep])
            ) if keep else np.zeros(0)
            spatial_cache[mq] = (e1, e2)
        e1, e2 = spatial_cache[mq]
        nq = q.n0
        if nq not in nq_cache:
            lo = max(n_lo, n_lo + nq)
            hi = min(n_hi, n_hi + nq)
            n0 = np.arange(lo, hi + 1)
            k0 = beta_f * (2 * n0 + 1)
            nq_cache[nq] = (k0, k0 - 2.0 * math.pi * nq / spec.beta)
        k0, k0q = nq_cache[nq]
        if len(k0) == 0 or len(e1) == 0:
            continue
        E1 = k0[:, None] ** 2 + e1[None, :] ** 2 + delta_sq
        E2 = k0q[:, None] ** 2 + e2[None, :] ** 2 + delta_sq
        inv = 1.0 / (E1 * E2)
        inv_sum[iq] = inv.sum()
        de = e1[None, :] - e2[None, :]
        q0 = 2.0 * math.pi * nq / spec.beta
        alpha_num[iq] = ((q0**2 + de**2) * inv).sum()
        gamma_num[iq] = ((k0[:, None] * e2[None, :] - k0q[:, None] * e1[None, :]) * inv).sum()
        ak = 1j * k0[:, None] - e1[None, :]
        akq_bar = -1j * k0q[:, None] - e2[None, :]
        cross[iq] = (ak * akq_bar * inv).sum()
        half_sum[iq] = (0.5 * (E1 + E2) * inv).sum()
    return inv_sum, alpha_num, gamma_num, cross, half_sum


def coefficients(
    spec: ModelSpec, M: MomentumSet, Q: TransferSet, r0: float, theta0: float
) -> QuadraticForm:
    """Quadratic-form coefficients around the mean-field configuration."""
    delta_sq = spec.lam * r0**2
    ratio = spec.lam / spec.kappa
    inv_sum, alpha_num, gamma_num, _, half_sum = _pair_sums(spec, M, Q, delta_sq)
    alpha = 1.0 - ratio * half_sum + 0.5 * ratio * alpha_num
    beta_coef = ratio * delta_sq * inv_sum
    gamma = ratio * gamma_num
    return QuadraticForm(
        transfer=Q,
        alpha=alpha,
        beta_coef=beta_coef,
        gamma=gamma,
        beta0=float(beta_coef[Q.zero_index]),
        r0=r0,
        theta0=theta0,
        v_min=vbcs_sum(spec, M, r0),
        e_sq=M.k0**2 + M.e**2 + delta_sq,
    )


def coefficients_external(
    spec: ModelSpec, M: MomentumSet, Q: TransferSet, y0: float, r: ExternalField
) -> QuadraticForm:
    """Same coefficients with E_k^2 = k0^2 + e_k^2 + lam y0^2 and the
    field-induced extra stiffness shift = |r|/(g |y0|)."""
    if y0 == 0.0:
        raise ValueError("y0 = 0: external-field stiffness undefined")
    delta_sq = spec.lam * y0**2
    ratio = spec.lam / spec.kappa
    shift = r.magnitude / (spec.g * abs(y0))
    inv_sum, alpha_num, gamma_num, _, half_sum = _pair_sums(spec, M, Q, delta_sq)
    # the external equation of state gives (lam/kappa) sum 1/E^2 = 1 - shift,
    # so separating the shift keeps alpha(0) at the solver residual
    alpha = (1.0 - shift) - ratio * half_sum + 0.5 * ratio * alpha_num
    beta_coef = ratio * delta_sq * inv_sum
    gamma = ratio * gamma_num
    return QuadraticForm(
        transfer=Q,
        alpha=alpha,
        beta_coef=beta_coef,
        gamma=gamma,
        beta0=float(beta_coef[Q.zero_index]),
        r0=y0,
        theta0=r.phase,
        v_min=vbcs_r(spec, M, y0, r),
        e_sq=M.k0**2 + M.e**2 + delta_sq,
        shift=r.magnitude / (spec.g * abs(y0)),
    )


def decomposition_lhs(
    spec: ModelSpec, M: MomentumSet, Q: TransferSet, delta_sq: float
) -> np.ndarray:
    """1 - (lam/kappa) sum_k a_k abar_{k-q} / (E_k^2 E_{k-q}^2), per q.

    Equals alpha_q + i gamma_q + beta_q exactly; computed here directly from
    the a_k products so the comparison is independent of the coefficient code.
    """
    _, _, _, cross, _ = _pair_sums(spec, M, Q, delta_sq)
    return 1.0 - (spec.lam / spec.kappa) * cross


def v2(spec: ModelSpec, qf: QuadraticForm, phi: FieldConfig) -> complex:
    """Second-order approximation of V at the field configuration."""
    Q = qf.transfer
    sk = math.sqrt(spec.kappa)
    z0 = phi.values[Q.zero_index]
    rho0 = abs(z0)
    mask = np.ones(len(Q), dtype=bool)
    mask[Q.zero_index] = False
    vals = phi.values
    rad = 2.0 * qf.beta0 * (rho0 - sk * qf.r0) ** 2
    diag = np.sum((qf.alpha[mask] + 1j * qf.gamma[mask]) * np.abs(vals[mask]) ** 2)
    ph = np.exp(-1j * qf.theta0)
    w = ph * vals + np.conj(ph) * np.conj(vals[Q.neg_index])
    anom = 0.5 * np.sum(qf.beta_coef[mask] * np.abs(w[mask]) ** 2)
    return complex(qf.v_min + rad + diag + anom)


def u2_external(
    spec: ModelSpec, qf: QuadraticForm, phi: FieldConfig, r: ExternalField
) -> complex:
    """Second-order approximation of U_r around phi_0 = i sqrt(kappa) y0."""
    Q = qf.transfer
    sk = math.sqrt(spec.kappa)
    z0 = phi.values[Q.zero_index]
    u0, v0 = z0.real, z0.imag
    mask = np.ones(len(Q), dtype=bool)
    mask[Q.zero_index] = False
    vals = phi.values
    dv = v0 - sk * qf.r0
    rad = 2.0 * qf.beta0 * dv**2
    diag = np.sum((qf.alpha[mask] + 1j * qf.gamma[mask]) * np.abs(vals[mask]) ** 2)
    ph = np.exp(-1j * r.phase)
    w = ph * vals - np.conj(ph) * np.conj(vals[Q.neg_index])
    anom = 0.5 * np.sum(qf.beta_coef[mask] * np.abs(w[mask]) ** 2)
    lift = qf.shift * (u0**2 + dv**2 + float(np.sum(np.abs(vals[mask]) ** 2)))
    return complex(qf.v_min + rad + diag + anom + lift)


def analytic_hessian(
    spec: ModelSpec, qf: QuadraticForm, r: ExternalField | None = None
):
    """Hessian of the quadratic form in the real coordinates (u_q, v_q).

    Coordinate 2 i is u of transfer index i, coordinate 2 i + 1 is v.
    Returns (real part, imaginary part).  With an external field the
    condensate block is 2*shift on u_0 and 4*beta0 + 2*shift on v_0;
    without it the block is 4*beta0 along e^{i theta0} and flat tangentially.
    """
    Q = qf.transfer
    n = len(Q)
    hre = np.zeros((2 * n, 2 * n))
    him = np.zeros((2 * n, 2 * n))
    z = Q.zero_index
    external = r is not None
    if external:
        hre[2 * z, 2 * z] = 2.0 * qf.shift
        hre[2 * z + 1, 2 * z + 1] = 4.0 * qf.beta0 + 2.0 * qf.shift
        two_phase = 2.0 * r.phase
        sign = -1.0
    else:
        er = np.array([math.cos(qf.theta0), math.sin(qf.theta0)])
        hre[2 * z : 2 * z + 2, 2 * z : 2 * z + 2] = 4.0 * qf.beta0 * np.outer(er, er)
        two_phase = 2.0 * qf.theta0
        sign = 1.0
    c2, s2 = math.cos(two_phase), math.sin(two_phase)
    seen = set()
    for i in range(n):
        if i == z:
            continue
        ui, vi = 2 * i, 2 * i + 1
        hre[ui, ui] += 2.0 * qf.alpha[i]
        hre[vi, vi] += 2.0 * qf.alpha[i]
        him[ui, ui] += 2.0 * qf.gamma[i]
        him[vi, vi] += 2.0 * qf.gamma[i]
        if external:
            hre[ui, ui] += 2.0 * qf.shift
            hre[vi, vi] += 2.0 * qf.shift
        j = int(Q.neg_index[i])
        pair = (min(i, j), max(i, j))
        if pair in seen:
            continue
        seen.add(pair)
        b = qf.beta_coef[i]
        uj, vj = 2 * j, 2 * j + 1
        for c in (ui, vi, uj, vj):
            hre[c, c] += 2.0 * b
        hre[ui, uj] += sign * 2.0 * b * c2
        hre[uj, ui] += sign * 2.0 * b * c2
        hre[vi, vj] -= sign * 2.0 * b * c2
        hre[vj, vi] -= sign * 2.0 * b * c2
        hre[ui, vj] += sign * 2.0 * b * s2
        hre[vj, ui] += sign * 2.0 * b * s2
        hre[vi, uj] += sign * 2.0 * b * s2
        hre[uj, vi] += sign * 2.0 * b * s2
    return hre, him


def fd_hessian(
    spec: ModelSpec,
    M: MomentumSet,
    base: FieldConfig,
    h: float,
    r: ExternalField | None = None,
    coords=None,
):
    """Central-difference Hessian of the potential in real field coordinates.

    `coords` restricts to a coordinate subset (indices into the 2|Q| real
    coordinates, u before v per transfer index); the result is the exact
    Hessian submatrix.  Returns (real part, imaginary part), symmetrized.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    Q = base.transfer
    ncoord = 2 * len(Q)
    if coords is None:
        coords = np.arange(ncoord)
    coords = np.asarray(coords, dtype=int)

    def evaluate(values: np.ndarray) -> complex:
        # reduced route: its pivots stay near the positive axis around the
        # minimum, so the per-pivot imaginary part differences smoothly
        cfg = FieldConfig(Q, values)
        if r is None or r.magnitude == 0.0:
            return potential_reduced(spec, M, cfg).total
        return potential_external_reduced(spec, M, cfg, r).total

    def displaced(steps) -> complex:
        vals = base.values.copy()
        for c, s in steps:
            delta = s * h if c % 2 == 0 else 1j * s * h
            vals[c // 2] += delta
        return evaluate(vals)

    f0 = evaluate(base.values.copy())
    m = len(coords)
    out = np.zeros((m, m), dtype=complex)
    for a in range(m):
        ca = int(coords[a])
        fp = displaced([(ca, +1)])
        fm = displaced([(ca, -1)])
        out[a, a] = (fp + fm - 2.0 * f0) / h**2
        for b in range(a + 1, m):
            cb = int(coords[b])
            fpp = displaced([(ca, +1), (cb, +1)])
            fmm = displaced([(ca, -1), (cb, -1)])
            fpm = displaced([(ca, +1), (cb, -1)])
            fmp = displaced([(ca, -1), (cb, +1)])
            val = (fpp + fmm - fpm - fmp) / (4.0 * h**2)
            out[a, b] = val
            out[b, a] = val
    out = 0.5 * (out + out.T)
    return out.real.copy(), out.imag.copy()


def default_fd_step(spec: ModelSpec, r0: float) -> float:
    """FD step balancing truncation against rounding at the log-det scale."""
    return 1e-3 * math.sqrt(spec.kappa) * max(r0, 1.0)


def remainder(
    spec: ModelSpec,
    M: MomentumSet,
    qf: QuadraticForm,
    xi: FieldConfig,
    t: float,
) -> float:
    """|V(phi_min + t xi) - V_2(phi_min + t xi)|, the cubic remainder probe."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    Q = qf.transfer
    base = bcs_config(spec, Q, qf.r0, qf.theta0)
    cfg = FieldConfig(Q, base.values + t * xi.values)
    full = potential_full(spec, M, cfg).total
    quad = v2(spec, qf, cfg)
    return abs(full - quad)
