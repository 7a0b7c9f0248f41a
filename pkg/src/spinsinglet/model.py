"""Spin model for three logical qubits encoded in pairs of spins.

Conventions used throughout:

* Logical qubits are ordered (q1, q2, q3); the two spins of pair j are
  ordered (qj1, qj2).  The 64-dim physical basis is the spin product
  basis with qubit-major ordering q11 q12 q21 q22 q31 q32 and the
  per-spin order (up, down).
* Each pair carries a Bell-state basis
      |0> = (uu + dd)/sqrt2,  |1> = (ud + du)/sqrt2,
      |2> = (uu - dd)/sqrt2,  |3> = (ud - du)/sqrt2.
  Quantum information lives on {|0>,|1>,|2>}; |3> is decoupled by all
  Hamiltonians built here but is kept so that leakage into it is
  observable.
* Natural units: time in units of the pulse duration T, energies in 1/T.
* Tiers: 'physical64' (6 spins), 'subspace6' (the six permutation states
  of |012>), 'effective3' (the resonant 3-level reduction).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import kron, kron_all, as_square, require_hermitian

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
SQRT6 = np.sqrt(6.0)

TIERS = ("effective3", "subspace6", "physical64")

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

# Bell transform W: rows are the logical states expressed in the
# physical pair basis {uu, ud, du, dd}; v_bell = W @ v_phys.
BELL_W = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [1, 0, 0, -1],
        [0, 1, -1, 0],
    ],
    dtype=complex,
) / SQRT2


def bell_transform(pairs: int = 1) -> np.ndarray:
    """Bell transform for one pair, or its n-fold Kronecker power."""
    w = BELL_W
    for _ in range(pairs - 1):
        w = np.kron(w, BELL_W)
    return w


@dataclass(frozen=True)
class ExchangeStrengths:
    """Intra-pair exchange strengths (units 1/T) along x, y, z."""

    jx: float
    jy: float
    jz: float

    def as_tuple(self):
        return (self.jx, self.jy, self.jz)


def singlet_exchange_pattern(strength: float) -> tuple[ExchangeStrengths, ...]:
    """Per-qubit exchange configuration used for singlet generation.

    Exactly one of the three directions is switched off per qubit, a
    different one for each, so every qubit singles out a different Bell
    state energetically.
    """
    return (
        ExchangeStrengths(jx=strength, jy=0.0, jz=strength),
        ExchangeStrengths(jx=strength, jy=strength, jz=0.0),
        ExchangeStrengths(jx=0.0, jy=strength, jz=strength),
    )


def single_qubit_H(strengths: ExchangeStrengths, basis: str = "bell") -> np.ndarray:
    """Intra-pair Heisenberg exchange sum_a (J_a/4) sigma_a x sigma_a.

    Diagonal in the Bell basis; returned 4x4 in the requested basis.
    """
    jx, jy, jz = strengths.as_tuple()
    h_phys = (
        jx * kron(PAULI_X, PAULI_X)
        + jy * kron(PAULI_Y, PAULI_Y)
        + jz * kron(PAULI_Z, PAULI_Z)
    ) / 4.0
    if basis == "physical":
        return h_phys
    if basis == "bell":
        return BELL_W @ h_phys @ BELL_W.conj().T
    raise ValueError(f"unknown basis {basis!r}")


def bell_energies(strengths: ExchangeStrengths) -> np.ndarray:
    """Bell-basis diagonal of the intra-pair exchange Hamiltonian."""
    jx, jy, jz = strengths.as_tuple()
    return np.array(
        [
            (jx - jy + jz) / 4.0,
            (jx + jy - jz) / 4.0,
            (-jx + jy + jz) / 4.0,
            -(jx + jy + jz) / 4.0,
        ]
    )


_PAIRS = {(1, 2), (1, 3), (2, 3)}


def _spin_op(op: np.ndarray, spin: int, n_spins: int) -> np.ndarray:
    factors = [IDENTITY_2] * n_spins
    factors[spin] = op
    return kron_all(*factors)


def pair_exchange_H(pair, g, basis: str = "physical", full: bool = True) -> np.ndarray:
    """Inter-pair exchange coupling between logical qubits j and j'.

    All four spin-spin combinations across the two pairs share the
    strengths g = (gx, gy, gz).  With full=True the operator lives in
    the 64-dim six-spin space; otherwise in the 16-dim space of the two
    pairs only (ordered pair j then pair j').
    """
    pair = tuple(pair)
    if pair not in _PAIRS:
        raise ValueError(f"pair must be one of {sorted(_PAIRS)}, got {pair}")
    gx, gy, gz = g
    strengths = dict(zip("xyz", (gx, gy, gz)))
    if full:
        n_spins = 6
        spins_a = [2 * (pair[0] - 1), 2 * (pair[0] - 1) + 1]
        spins_b = [2 * (pair[1] - 1), 2 * (pair[1] - 1) + 1]
    else:
        n_spins = 4
        spins_a = [0, 1]
        spins_b = [2, 3]
    dim = 2**n_spins
    h = np.zeros((dim, dim), dtype=complex)
    for axis, strength in strengths.items():
        if strength == 0.0:
            continue
        sig = PAULI[axis]
        for a in spins_a:
            for b in spins_b:
                h += (strength / 4.0) * (
                    _spin_op(sig, a, n_spins) @ _spin_op(sig, b, n_spins)
                )
    if basis == "physical":
        return h
    if basis == "bell":
        w = bell_transform(n_spins // 2)
        return w @ h @ w.conj().T
    raise ValueError(f"unknown basis {basis!r}")


# ---------------------------------------------------------------------------
# Six-dimensional computational subspace: permutations of |012>.

SUBSPACE_LABELS = ("012", "102", "120", "210", "201", "021")
_SUBSPACE_PERMS = tuple(tuple(int(c) for c in lab) for lab in SUBSPACE_LABELS)
# Alternating signs of the permutations: even permutations at slots 0, 2, 4.
SUBSPACE_SIGNS = np.array([1, -1, 1, -1, 1, -1], dtype=float)
_EVEN = (0, 2, 4)
_ODD = (1, 3, 5)


def logical_index(n1: int, n2: int, n3: int) -> int:
    """Index of the logical product state |n1 n2 n3> in the 64-dim space."""
    return 16 * n1 + 4 * n2 + n3


def subspace_basis(basis: str = "physical") -> np.ndarray:
    """The six computational states as columns of a 64 x 6 matrix."""
    cols = np.zeros((64, 6), dtype=complex)
    for k, perm in enumerate(_SUBSPACE_PERMS):
        cols[logical_index(*perm), k] = 1.0
    if basis == "bell":
        return cols
    if basis == "physical":
        w6 = bell_transform(3)
        return w6.conj().T @ cols
    raise ValueError(f"unknown basis {basis!r}")


def phi_basis() -> np.ndarray:
    """Collective basis of the resonant 3-level reduction, as 6 x 3 columns.

    phi1 is the start state |012>; phi2 and phi3 are the symmetric
    combinations of the odd and the remaining even permutation states.
    """
    cols = np.zeros((6, 3), dtype=complex)
    cols[0, 0] = 1.0
    cols[[1, 3, 5], 1] = 1.0 / SQRT3
    cols[[2, 4], 2] = 1.0 / SQRT2
    return cols


def singlet_state(tier: str = "subspace6") -> np.ndarray:
    """Totally antisymmetric three-qutrit singlet over the logical states."""
    if tier == "subspace6":
        return (SUBSPACE_SIGNS / SQRT6).astype(complex)
    if tier == "physical64":
        return subspace_basis("physical") @ (SUBSPACE_SIGNS / SQRT6)
    if tier == "effective3":
        return np.array([1.0, -SQRT3, SQRT2], dtype=complex) / SQRT6
    raise ValueError(f"unknown tier {tier!r}")


def subspace_H_mu(g: float) -> np.ndarray:
    """Isotropic multi-qubit exchange restricted to the six-dim subspace.

    Rank-2 Hermitian: couples the even-permutation sum to the
    odd-permutation sum with strength g.
    """
    h = np.zeros((6, 6), dtype=complex)
    for i in _EVEN:
        for j in _ODD:
            h[i, j] = g
            h[j, i] = g
    return h


def subspace_energies(j_res: float) -> np.ndarray:
    """Interaction-frame energies of the six computational states.

    j_res is the resonance parameter of the drive decomposition (the
    level spacings are j_res and 2*j_res); see `full_singles_term`.
    """
    return j_res * np.array([3.0, 1.0, 0.0, 1.0, 0.0, 1.0])


def rotating_frame_H(t: float, g: float, j_res: float) -> np.ndarray:
    """Six-dim interaction-frame coupling Hamiltonian, constant splittings.

    Matrix elements carry the phases exp(i (E_m - E_n) t) of the frame
    that removes the single-qubit splittings:
    <012| H |odd> ~ exp(2i J t), <even'| H |odd> ~ exp(-i J t).
    """
    phase = np.exp(-1j * j_res * t) * np.ones(3, dtype=complex)
    phase[0] *= np.exp(3j * j_res * t)
    m = np.zeros((6, 6), dtype=complex)
    for k, i in enumerate(_EVEN):
        for j in _ODD:
            m[i, j] = g * phase[k]
    return m + m.conj().T


def modulated_rotating_frame_H(t: float, g: float, eta: float, omega: float) -> np.ndarray:
    """Six-dim interaction-frame coupling for a cosine-modulated splitting.

    The splitting schedule J0*cos(omega*t) integrates to eta*sin(omega*t)
    with eta = J0/omega, turning the frame phases into Bessel side-bands.
    """
    s = eta * np.sin(omega * t)
    phase = np.exp(-1j * s) * np.ones(3, dtype=complex)
    phase[0] *= np.exp(3j * s)
    m = np.zeros((6, 6), dtype=complex)
    for k, i in enumerate(_EVEN):
        for j in _ODD:
            m[i, j] = g * phase[k]
    return m + m.conj().T


# ---------------------------------------------------------------------------
# Effective 3-level model and its so(3) generators.

G1 = np.array([[0, 1j, 0], [-1j, 0, 0], [0, 0, 0]], dtype=complex)
G2 = np.array([[0, 0, 0], [0, 0, 1j], [0, -1j, 0]], dtype=complex)
G3 = np.array([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]], dtype=complex)


def effective_H(g1: float, g2: float) -> np.ndarray:
    """Resonant effective Hamiltonian i*g1 |phi1><phi2| - i*g2 |phi3><phi2| + H.c."""
    return g1 * G1 + g2 * G2


def composite_g(t, g1, g2, j_res: float):
    """Physical drive realizing (g1, g2) through the two resonances.

    g(t) = [2 g1(t) sin(2Jt) + sqrt2 g2(t) sin(Jt)] / sqrt3; accepts
    scalar or array t with matching sampled g1, g2.
    """
    return (2.0 * g1 * np.sin(2.0 * j_res * t) + SQRT2 * g2 * np.sin(j_res * t)) / SQRT3


# ---------------------------------------------------------------------------
# Coupling schedules and the full 64-dim tier.


@dataclass(frozen=True)
class CouplingSchedule:
    """Intra-pair splitting schedule: constant resonance J or J0*cos(wt).

    `value(t)` is the resonance parameter at time t; `integral(t)` its
    time integral, used for closed-form interaction-frame phases.
    """

    kind: str  # 'constant' | 'cosine'
    j_res: float = 0.0
    j0: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "cosine"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    def value(self, t):
        if self.kind == "constant":
            return self.j_res * np.ones_like(np.asarray(t, dtype=float))
        return self.j0 * np.cos(self.omega * t)

    def integral(self, t):
        if self.kind == "constant":
            return self.j_res * np.asarray(t, dtype=float)
        return (self.j0 / self.omega) * np.sin(self.omega * t)


def full_singles_term(basis: str = "physical") -> np.ndarray:
    """Sum of the three intra-pair exchanges at unit resonance parameter.

    The drive harmonics sin(Jt) and sin(2Jt) address interaction-frame
    level spacings J and 2J, which requires a Bell-basis splitting of J
    per qubit, i.e. exchange strength 2J in the singlet pattern.  This
    term is therefore built at exchange strength 2 so that the physical
    Hamiltonian is J(t) times it.
    """
    pattern = singlet_exchange_pattern(2.0)
    h = np.zeros((64, 64), dtype=complex)
    for j, strengths in enumerate(pattern, start=1):
        h4 = single_qubit_H(strengths, basis="physical")
        ops = [np.eye(4, dtype=complex)] * 3
        ops[j - 1] = h4
        h += kron_all(*ops)
    if basis == "bell":
        w6 = bell_transform(3)
        return w6 @ h @ w6.conj().T
    return h


def full_coupling_term(basis: str = "physical") -> np.ndarray:
    """Sum of the three isotropic inter-pair exchanges at unit strength."""
    h = np.zeros((64, 64), dtype=complex)
    for pair in sorted(_PAIRS):
        h += pair_exchange_H(pair, (1.0, 1.0, 1.0), basis="physical", full=True)
    if basis == "bell":
        w6 = bell_transform(3)
        return w6 @ h @ w6.conj().T
    return h


def logical_energy_pattern() -> np.ndarray:
    """Per-logical-basis-state energy of `full_singles_term` (Bell basis).

    64 real values; state |n1 n2 n3> has energy pat1[n1]+pat2[n2]+pat3[n3]
    with the per-qubit patterns of the singlet exchange configuration.
    """
    pats = [bell_energies(s) for s in singlet_exchange_pattern(2.0)]
    e = np.zeros(64)
    for n1 in range(4):
        for n2 in range(4):
            for n3 in range(4):
                e[logical_index(n1, n2, n3)] = pats[0][n1] + pats[1][n2] + pats[2][n3]
    return e


def full_physical_H(t: float, schedule: CouplingSchedule, g_of_t, basis: str = "physical") -> np.ndarray:
    """Full 64-dim Hamiltonian: intra-pair splittings plus isotropic drive.

    g_of_t may be a callable or a number.  Prefer the cached
    `full_singles_term`/`full_coupling_term` pair in hot loops; this
    function assembles them on every call.
    """
    g = g_of_t(t) if callable(g_of_t) else g_of_t
    j = float(schedule.value(t))
    h = j * full_singles_term(basis) + g * full_coupling_term(basis)
    return require_hermitian(h, atol=1e-10)
