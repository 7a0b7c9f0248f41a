"""Periodic modulation of the pair splittings via Bessel side-bands.

Replacing the constant splitting J by J0*cos(omega*t) turns the
interaction-frame phase factors into exp(+-i eta sin(omega t)) with
eta = J0/omega, whose Fourier components are Bessel functions of the
first kind.  Driving at sin(omega t) and sin(3 omega t) then reproduces
the same two-leg effective Hamiltonian with Bessel-weighted couplings,
which this module inverts to synthesize drive envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, model
from .invariant import PathParams, controls_from_path

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

# |Upsilon| below this is treated as a singular control inversion.
UPSILON_MIN = 1e-6


def bessel_j(m: int, x):
    """First-kind Bessel J_m via the ascending power series.

    Accurate to machine precision for |x| <= 10 (the only range used
    here); terms are added until they fall below 1e-16 of the sum.
    Supports scalar or array x; J_{-m}(x) = (-1)^m J_m(x).
    """
    m = int(m)
    if m < 0:
        sign = -1.0 if m % 2 else 1.0
        return sign * bessel_j(-m, x)
    x = np.asarray(x, dtype=float)
    half = x / 2.0
    term = half**m / math.factorial(m)
    total = term.copy()
    k = 0
    while k < 200:
        k += 1
        term = term * (-(half * half)) / (k * (k + m))
        total += term
        if np.all(np.abs(term) <= 1e-16 * np.maximum(np.abs(total), 1e-300)):
            break
    return total if total.ndim else float(total)


def jacobi_anger(eta: float, omega_t, m_max: int = 30):
    """Partial sum  sum_{|m|<=m_max} J_m(eta) exp(-i m w t)  ~ exp(-i eta sin wt)."""
    omega_t = np.asarray(omega_t, dtype=float)
    total = np.zeros(omega_t.shape, dtype=complex)
    for m in range(-m_max, m_max + 1):
        total += bessel_j(m, eta) * np.exp(-1j * m * omega_t)
    return total


def upsilon(eta: float) -> float:
    """Determinant of the Bessel coupling map; its size sets inversion conditioning."""
    return float(
        SQRT2
        * (
            bessel_j(1, 2.0 * eta) * bessel_j(3, eta)
            - bessel_j(3, 2.0 * eta) * bessel_j(1, eta)
        )
    )


def upsilon_peak(lo: float = 0.5, hi: float = 4.0, step: float = 0.01) -> float:
    """Location of the largest |Upsilon| on a uniform scan grid."""
    etas = np.arange(lo, hi + step / 2.0, step)
    vals = np.abs([upsilon(e) for e in etas])
    return float(etas[int(np.argmax(vals))])


def effective_couplings(gbar1, gbar2, eta: float):
    """Forward Bessel map from drive envelopes to effective couplings."""
    gt1 = bessel_j(1, 2 * eta) * gbar1 + bessel_j(3, 2 * eta) * gbar2
    gt2 = SQRT2 * (bessel_j(1, eta) * gbar1 + bessel_j(3, eta) * gbar2)
    return gt1, gt2


def inversion_matrix(eta: float) -> np.ndarray:
    """2x2 matrix mapping effective couplings to drive envelopes.

    Raises ValueError when |Upsilon(eta)| <= 1e-6 (singular inversion).
    """
    u = upsilon(eta)
    if abs(u) <= UPSILON_MIN:
        raise ValueError(f"upsilon({eta}) = {u:.2e} too small; inversion is singular")
    return (
        np.array(
            [
                [SQRT2 * bessel_j(3, eta), -bessel_j(3, 2 * eta)],
                [-SQRT2 * bessel_j(1, eta), bessel_j(1, 2 * eta)],
            ]
        )
        / u
    )


def invert_controls(gtilde1, gtilde2, eta: float):
    """Drive envelopes (gbar1, gbar2) realizing the target effective couplings."""
    m = inversion_matrix(eta)
    gbar1 = m[0, 0] * gtilde1 + m[0, 1] * gtilde2
    gbar2 = m[1, 0] * gtilde1 + m[1, 1] * gtilde2
    return gbar1, gbar2


def modulated_g(t, gbar1, gbar2, omega: float):
    """Physical drive sample from the two envelope harmonics."""
    return (gbar1 * np.sin(omega * t) + gbar2 * np.sin(3.0 * omega * t)) / SQRT3


@dataclass(frozen=True)
class ModulationParams:
    """Modulation working point: eta = J0/omega and kappa = omega*T/(2 pi).

    Integer kappa makes the interaction frame close at t = T (the
    splitting integrates to zero over whole periods), so frame and lab
    fidelities coincide at the end of the pulse.
    """

    eta: float
    kappa: float
    T: float = 1.0

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.kappa / self.T

    @property
    def j0(self) -> float:
        return self.eta * self.omega

    @property
    def integer_kappa(self) -> bool:
        return abs(self.kappa - round(self.kappa)) < 1e-12

    def schedule(self) -> model.CouplingSchedule:
        return model.CouplingSchedule(kind="cosine", j0=self.j0, omega=self.omega)


def steps_for(kappa: float, per_period: int = 1024) -> int:
    """Integration steps resolving the 3*omega drive harmonic."""
    return int(math.ceil(per_period * max(kappa, 1.0)))


def synthesize_drive(path: PathParams, params: ModulationParams):
    """Drive callable g(t) whose side-band average realizes the path's controls.

    Requires integer kappa so the pulse is commensurate with the
    modulation period.  The path's (g1, g2) are fed through the inverse
    Bessel map at the working point's eta.
    """
    if not params.integer_kappa:
        raise ValueError("pulse synthesis requires integer kappa")
    eta, omega = params.eta, params.omega

    def g(t):
        gt1, gt2 = controls_from_path(t, path)
        gb1, gb2 = invert_controls(gt1, gt2, eta)
        return modulated_g(t, gb1, gb2, omega)

    return g


def _coupling_legs():
    """Fixed matrices of the two interaction-frame coupling legs.

    leg1 couples the start state to the odd-permutation states (fast
    phase), leg2 the other two even states; H(t) is a complex
    combination of each leg and its adjoint.
    """
    leg1 = np.zeros((6, 6), dtype=complex)
    leg2 = np.zeros((6, 6), dtype=complex)
    for col in (1, 3, 5):
        leg1[0, col] = 1.0
        leg2[2, col] = 1.0
        leg2[4, col] = 1.0
    return np.array([leg1, leg1.conj().T, leg2, leg2.conj().T])


def leg_coefficients(t, g, eta: float, omega: float) -> np.ndarray:
    """Coefficients of `_coupling_legs` for the modulated frame at times t."""
    s = eta * np.sin(omega * np.asarray(t, dtype=float))
    p1 = g * np.exp(2j * s)
    p2 = g * np.exp(-1j * s)
    return np.stack([p1, p1.conj(), p2, p2.conj()], axis=-1)


def modulated_run(
    path: PathParams,
    params: ModulationParams,
    steps: int | None = None,
    eta_actual: float | None = None,
    drive_scale: float = 1.0,
) -> dynamics.SimResult:
    """Six-dim interaction-frame propagation under the modulated model.

    eta_actual (default: the working point's eta) is the eta appearing
    in the frame phases; passing a different value models a mis-set
    splitting amplitude while the synthesized drive stays at the nominal
    working point.  drive_scale scales the physical drive (proportional
    drive error).
    """
    if steps is None:
        steps = steps_for(params.kappa)
    grid = dynamics.time_grid(params.T, steps)
    sub = dynamics.substep_times(grid)
    gt1, gt2 = controls_from_path(sub, path)
    gb1, gb2 = invert_controls(gt1, gt2, params.eta)
    g = drive_scale * modulated_g(sub, gb1, gb2, params.omega)
    eta_frame = params.eta if eta_actual is None else eta_actual
    coeffs = leg_coefficients(sub, g, eta_frame, params.omega)
    psi0 = np.zeros(6, dtype=complex)
    psi0[0] = 1.0
    return dynamics.propagate_terms(
        _coupling_legs(), coeffs, psi0, grid, target=model.singlet_state("subspace6")
    )


def modulated_sweep(
    path: PathParams,
    params: ModulationParams,
    deltas,
    kind: str = "delta_g",
    steps: int | None = None,
) -> np.ndarray:
    """F(T) of the modulated model across a systematic-error sweep.

    kind 'delta_g' scales the synthesized drive by (1 + delta); kind
    'delta_J' scales the splitting amplitude (hence eta) by (1 + delta)
    while the drive stays at the nominal working point.  With integer
    kappa the frame closes at t = T for any amplitude, so no final
    frame correction is needed.
    """
    if kind not in ("delta_g", "delta_J"):
        raise ValueError(f"unknown sweep kind {kind!r}")
    deltas = np.asarray(deltas, dtype=float)
    if steps is None:
        steps = steps_for(params.kappa)
    grid = dynamics.time_grid(params.T, steps)
    eta, omega = params.eta, params.omega
    terms = _coupling_legs()

    def coeff(t):
        gt1, gt2 = controls_from_path(t, path)
        gb1, gb2 = invert_controls(gt1, gt2, eta)
        g = modulated_g(t, gb1, gb2, omega)
        if kind == "delta_g":
            s = eta * np.sin(omega * t)
            p1 = (1.0 + deltas) * (g * np.exp(2j * s))
            p2 = (1.0 + deltas) * (g * np.exp(-1j * s))
        else:
            s = (1.0 + deltas) * (eta * np.sin(omega * t))
            p1 = g * np.exp(2j * s)
            p2 = g * np.exp(-1j * s)
        return np.stack([p1, p1.conj(), p2, p2.conj()], axis=-1)

    psi0 = np.zeros(6, dtype=complex)
    psi0[0] = 1.0
    fin = dynamics.propagate_coefficient_batch(coeff, terms, psi0, grid)
    target = model.singlet_state("subspace6")
    return np.abs(fin @ target.conj()) ** 2


def scan_kappa_eta(kappas, etas, path: PathParams, per_period: int = 1024):
    """Final fidelity across a (kappa, eta) grid of working points.

    Cells whose inversion is singular (|Upsilon| <= 1e-6) are flagged
    invalid: fidelity NaN, status 'singular'; other per-cell failures
    are recorded as 'failed'.  Returns (fidelity array, status array)
    with shape (len(kappas), len(etas)).
    """
    kappas = np.asarray(kappas, dtype=float)
    etas = np.asarray(etas, dtype=float)
    fid = np.full((kappas.size, etas.size), np.nan)
    status = np.full(fid.shape, "ok", dtype=object)
    target = model.singlet_state("subspace6")
    psi0 = np.zeros(6, dtype=complex)
    psi0[0] = 1.0
    for i, kap in enumerate(kappas):
        steps = steps_for(kap, per_period)
        grid = dynamics.time_grid(path.T, steps)
        omega = 2.0 * math.pi * kap / path.T
        valid = []
        for j, eta in enumerate(etas):
            if abs(upsilon(eta)) <= UPSILON_MIN:
                status[i, j] = "singular"
            else:
                valid.append(j)
        if not valid:
            continue
        cols = np.array(valid)
        eta_v = etas[cols]
        b13 = np.array([[bessel_j(1, e) for e in eta_v], [bessel_j(3, e) for e in eta_v]])
        b13_2 = np.array([[bessel_j(1, 2 * e) for e in eta_v], [bessel_j(3, 2 * e) for e in eta_v]])
        ups = np.array([upsilon(e) for e in eta_v])

        terms = _coupling_legs()

        def coeff(t, omega=omega, eta_v=eta_v, b13=b13, b13_2=b13_2, ups=ups):
            gt1, gt2 = controls_from_path(t, path)
            gb1 = (SQRT2 * b13[1] * gt1 - b13_2[1] * gt2) / ups
            gb2 = (-SQRT2 * b13[0] * gt1 + b13_2[0] * gt2) / ups
            g = (gb1 * np.sin(omega * t) + gb2 * np.sin(3.0 * omega * t)) / SQRT3
            s = eta_v * np.sin(omega * t)
            p1 = g * np.exp(2j * s)
            p2 = g * np.exp(-1j * s)
            return np.stack([p1, p1.conj(), p2, p2.conj()], axis=1)

        try:
            fin = dynamics.propagate_coefficient_batch(coeff, terms, psi0, grid)
        except Exception:
            status[i, cols] = "failed"
            continue
        fid[i, cols] = np.abs(fin @ target.conj()) ** 2
    return fid, status
