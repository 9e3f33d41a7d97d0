"""Local unitary noise applied between Grover iterations.

A noise event applies the same single-qubit unitary

    U = [[ a,                  b                ],
         [ -conj(b) e^{i th},  conj(a) e^{i th} ]]

to m of the n qubits (a chosen position set; default is the first m), i.e.
the faulty iteration is G' = chi_m G with chi_m the tensor lift of U.

For U proportional to a Pauli or the identity the success probability
admits closed forms in the overlaps <w| chi G |s>, and is independent of
which qubits are hit (identity, sigma_x, sigma_z up to phase) or depends
only on the parity of m (sigma_y up to phase). Those overlaps and the
classifier for this "good noise" family live here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .grover import GroverInstance
from .linalg import ComplexMatrix

NORM_TOL = 1e-10
CLASSIFY_TOL = 1e-10


@dataclass(frozen=True)
class SingleQubitUnitary:
    """Parameters (a, b, theta) of the 2x2 unitary above, |a|^2 + |b|^2 = 1."""

    a: complex
    b: complex
    theta: float

    @property
    def matrix(self) -> ComplexMatrix:
        e = cmath.exp(1j * self.theta)
        return np.array(
            [
                [self.a, self.b],
                [-np.conj(self.b) * e, np.conj(self.a) * e],
            ],
            dtype=complex,
        )


def single_qubit_unitary(a: complex, b: complex, theta: float) -> SingleQubitUnitary:
    """Validated constructor; wraps theta into [0, 2*pi)."""
    a = complex(a)
    b = complex(b)
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"|a|^2 + |b|^2 = {norm!r} is not 1 within {NORM_TOL:.1e}")
    return SingleQubitUnitary(a, b, float(theta) % (2.0 * math.pi))


# Named parameter points. x, y, z are the Paulis, up to the convention's
# global phase: (0, 1, pi) -> sigma_x, (0, -1j, pi) -> sigma_y, (1, 0, pi) -> sigma_z.
PRESETS = {
    "identity": (1.0, 0.0, 0.0),
    "x": (0.0, 1.0, math.pi),
    "y": (0.0, -1.0j, math.pi),
    "z": (1.0, 0.0, math.pi),
    "hadamard": (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), math.pi),
}


def noise_unitary(name: str) -> SingleQubitUnitary:
    """Preset lookup, see :data:`PRESETS`."""
    try:
        a, b, theta = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown unitary {name!r}; have {sorted(PRESETS)}") from None
    return single_qubit_unitary(a, b, theta)


@dataclass(frozen=True)
class NoiseSpec:
    """A unitary and the qubit positions it acts on (0-based, qubit 0 leftmost)."""

    u: SingleQubitUnitary
    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.positions)) != len(self.positions):
            raise ValueError(f"duplicate positions in {self.positions}")
        if any(p < 0 for p in self.positions):
            raise ValueError(f"negative position in {self.positions}")

    @property
    def m(self) -> int:
        return len(self.positions)


def noise_spec(
    u: SingleQubitUnitary,
    m: int,
    n: int,
    positions: Optional[Sequence[int]] = None,
) -> NoiseSpec:
    """Build a :class:`NoiseSpec` for ``n`` qubits.

    With ``positions`` omitted the unitary hits the first ``m`` qubits;
    otherwise ``positions`` must contain exactly ``m`` distinct indices
    below ``n``.
    """
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside [0, {n}]")
    if positions is None:
        positions = tuple(range(m))
    positions = tuple(int(p) for p in positions)
    if len(positions) != m:
        raise ValueError(f"{len(positions)} positions given for m={m}")
    if any(p >= n for p in positions):
        raise ValueError(f"positions {positions} exceed qubit count {n}")
    return NoiseSpec(u, positions)


def build_chi(n: int, spec: NoiseSpec) -> ComplexMatrix:
    """Tensor lift of ``spec.u`` onto its positions, identity elsewhere."""
    if any(p >= n for p in spec.positions):
        raise ValueError(f"positions {spec.positions} exceed qubit count {n}")
    u = spec.u.matrix
    eye = np.eye(2, dtype=complex)
    out = np.ones((1, 1), dtype=complex)
    for q in range(n):
        out = np.kron(out, u if q in spec.positions else eye)
    return out


def noisy_grover(g: ComplexMatrix, chi: ComplexMatrix) -> ComplexMatrix:
    """Faulty iteration G' = chi G."""
    if g.shape != chi.shape:
        raise ValueError(f"shape mismatch: G {g.shape}, chi {chi.shape}")
    return chi @ g


@dataclass(frozen=True)
class ClosedFormOverlaps:
    """Analytic one-step quantities for noise on m qubits, q of them bit-flipped.

    ``psi_q`` is <w'| chi |w> restricted to the relevant pair (the product of
    per-qubit matrix elements), ``s_chi_s`` is <s| chi |s>, ``chi_ww`` the
    diagonal element <w| chi |w>, and ``p1`` the resulting success
    probability after one faulty iteration from |s>.
    """

    psi_q: complex
    s_chi_s: complex
    chi_ww: complex
    p1: float


def closed_form_overlaps(
    u: SingleQubitUnitary, n: int, m: int, q: int
) -> ClosedFormOverlaps:
    """Evaluate the one-step closed forms.

    Parameters
    ----------
    u
        The single-qubit unitary.
    n, m
        Total qubits and number of noisy qubits, 0 <= m <= n.
    q
        How many of the m noisy positions hold a 1 bit of the marked index,
        0 <= q <= m. The marked-state diagonal element and transition
        amplitude depend on the positions only through q.
    """
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside [0, {n}]")
    if not 0 <= q <= m:
        raise ValueError(f"q={q} outside [0, {m}]")
    N = 2 ** n
    a, b, theta = u.a, u.b, u.theta
    phase = cmath.exp(1j * q * theta)
    psi_q = phase * (a + b) ** (m - q) * (np.conj(a) - np.conj(b)) ** q
    chi_ww = phase * a ** (m - q) * np.conj(a) ** q
    s_chi_s = (
        2 ** (n - m)
        / N
        * ((a + b) + cmath.exp(1j * theta) * (np.conj(a) - np.conj(b))) ** m
    )
    p1 = abs((1.0 - 4.0 / N) * psi_q + 2.0 * chi_ww) ** 2 / N
    return ClosedFormOverlaps(complex(psi_q), complex(s_chi_s), complex(chi_ww), float(p1))


def sigma_y_p2(N: int, m: int) -> float:
    """Two-step success probability under sigma_y noise on m qubits.

    Depends on m only through its parity:

        P(2) = (1/N) | (4/N)(1 - 4/N)(-1)^m - 8/N + 3 |^2
    """
    val = (4.0 / N) * (1.0 - 4.0 / N) * (-1.0) ** m - 8.0 / N + 3.0
    return abs(val) ** 2 / N


class NoiseClassTag(Enum):
    """Position-(in)dependence class of a noise unitary."""

    FULL_INVARIANT = "full_invariant"      # probability independent of m and positions
    PARITY_INVARIANT = "parity_invariant"  # depends only on parity of m
    NOT_GOOD = "not_good"                  # no such guarantee


@dataclass(frozen=True)
class NoiseClass:
    tag: NoiseClassTag
    canonical: Optional[str]  # preset name matched up to global phase, else None


# Candidates checked up to a global phase. Identity, sigma_x and sigma_z give
# fully position-independent success series; sigma_y gives parity dependence.
_CANDIDATES = (
    ("identity", np.eye(2, dtype=complex), NoiseClassTag.FULL_INVARIANT),
    ("x", np.array([[0, 1], [1, 0]], dtype=complex), NoiseClassTag.FULL_INVARIANT),
    ("z", np.array([[1, 0], [0, -1]], dtype=complex), NoiseClassTag.FULL_INVARIANT),
    ("y", np.array([[0, -1j], [1j, 0]], dtype=complex), NoiseClassTag.PARITY_INVARIANT),
)


def classify_noise(u: SingleQubitUnitary, tol: float = CLASSIFY_TOL) -> NoiseClass:
    """Match ``u`` against identity/sigma_x/sigma_z (full invariance) and
    sigma_y (parity invariance), up to a global phase.

    The phase is fixed on the first nonzero entry of the candidate, then the
    whole matrix must agree entrywise within ``tol``.
    """
    mat = u.matrix
    for name, cand, tag in _CANDIDATES:
        i, j = divmod(int(np.argmax(np.abs(cand) > 0.5)), 2)
        phase = mat[i, j] / cand[i, j]
        if abs(abs(phase) - 1.0) > tol:
            continue
        if np.max(np.abs(mat - phase * cand)) <= tol:
            return NoiseClass(tag, name)
    return NoiseClass(NoiseClassTag.NOT_GOOD, None)


def sigma_x_reduced(inst: GroverInstance) -> tuple[np.ndarray, np.ndarray]:
    """3x3 forms of G and G' for sigma_x noise on any nonempty position set.

    Bit flips map |w> to another basis state |w''> (see :func:`w_prime`),
    permute the rest among themselves, and the dynamics closes on
    span{|sbar>, |w>, |w''>} where |sbar> is the uniform superposition of
    the remaining N - 2 states. Returns (G3, G3'); the initial state in
    this basis is (sqrt((N-2)/N), 1/sqrt(N), 1/sqrt(N)). G3' is G3 with
    the last two rows exchanged, since the noise swaps the two basis states.
    """
    N = inst.N
    if N < 4:
        raise ValueError("reduced form needs N >= 4")
    r = math.sqrt(N - 2.0)
    g3 = np.array(
        [
            [2.0 * (N - 2.0) / N - 1.0, -2.0 * r / N, 2.0 * r / N],
            [2.0 * r / N, 1.0 - 2.0 / N, 2.0 / N],
            [2.0 * r / N, -2.0 / N, 2.0 / N - 1.0],
        ],
        dtype=complex,
    )
    g3p = g3[[0, 2, 1], :].copy()
    return g3, g3p


def w_prime(w: int, m: int, n: int) -> int:
    """Image of marked index ``w`` under bit flips on the first ``m`` qubits.

    0-based throughout: with M = N / 2**m, the low ``n - m`` bits survive and
    the high ``m`` bits are complemented, i.e.

        w' = (N - M) - (w - w mod M) + (w mod M)
    """
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside [0, {n}]")
    N = 2 ** n
    if not 0 <= w < N:
        raise ValueError(f"index {w} outside [0, {N})")
    M = N >> m
    low = w % M
    return (N - M) - (w - low) + low
