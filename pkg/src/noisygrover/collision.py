"""Collisional realization of the correlated noise channel.

One time step of the walker+system state R is the completely positive map

    R -> sum_k K_k R K_k^dagger

with four Kraus operators built from G, G' and the label-chain
probabilities (stationary ones for the first collision, conditional ones
afterwards). The same step is also realized as a unitary collision: two
fresh ancilla qubits in |00> interact with walker+system through an
8N x 8N unitary U, after which the ancillas are traced out. U is stored
as an 8 x 8 grid of N x N blocks, each a multiple of G or G'; the minus
signs in the lower half make the columns orthonormal for every parameter
choice. Replacing the pure ancillas with thermal ones (Gibbs weights at
temperature T) yields the finite-temperature channel via the same U.

U also factors as

    U = CX . (M (x) I_N) . (I_8 (x) G)

where CX applies chi to the system when the first ancilla is |1> and M is
the 8 x 8 coefficient grid; ``extract_m`` recovers M numerically and
checks it is unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import (
    ComplexMatrix,
    InvariantViolation,
    dagger,
    partial_trace,
    random_density,
    require_density,
    tensor,
    trace_distance,
)
from .markov import (
    ConditionalProbs,
    EvolutionTrace,
    MarkovNoiseParams,
    conditional_probs,
)

KINDS = ("initial", "steady")


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators of one collision step, with human-readable labels."""

    ops: tuple[ComplexMatrix, ...]
    labels: tuple[str, ...]
    kind: str

    def completeness_defect(self) -> float:
        """max | sum_k K_k^dagger K_k  -  I |."""
        dim = self.ops[0].shape[1]
        acc = np.zeros((dim, dim), dtype=complex)
        for k in self.ops:
            acc += dagger(k) @ k
        return float(np.max(np.abs(acc - np.eye(dim))))

    def unitality_defect(self) -> float:
        """max | sum_k K_k K_k^dagger  -  I |; zero iff the map is unital."""
        dim = self.ops[0].shape[0]
        acc = np.zeros((dim, dim), dtype=complex)
        for k in self.ops:
            acc += k @ dagger(k)
        return float(np.max(np.abs(acc - np.eye(dim))))


def _weights(kind: str, params: MarkovNoiseParams) -> dict[str, float]:
    # Branch weights keyed by the conditional label "next|previous". The
    # first collision has no previous label, so both columns carry the
    # stationary distribution.
    if kind == "initial":
        return {
            "g|g": params.p_g,
            "g|g'": params.p_g,
            "g'|g": params.p_gp,
            "g'|g'": params.p_gp,
        }
    if kind == "steady":
        c: ConditionalProbs = conditional_probs(params)
        return {
            "g|g": c.g_given_g,
            "g|g'": c.g_given_gp,
            "g'|g": c.gp_given_g,
            "g'|g'": c.gp_given_gp,
        }
    raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


def kraus_step(
    kind: str, params: MarkovNoiseParams, g: ComplexMatrix, gp: ComplexMatrix
) -> KrausSet:
    """Four Kraus operators on walker (x) system (2N x 2N each).

    Walker index 0 is the clean branch (G fires), index 1 the faulty one
    (G' fires). In block form, with w(key) the weight dict of the kind:

        K_1 = sqrt(w(g|g))   [[G, 0], [0, 0]]
        K_2 = sqrt(w(g|g'))  [[0, G], [0, 0]]
        K_3 = sqrt(w(g'|g))  [[0, 0], [G', 0]]
        K_4 = sqrt(w(g'|g')) [[0, 0], [0, G']]

    The set is trace preserving for any parameters; it is *not* unital in
    general (e.g. p=0.3, mu=0.5 gives max |sum K K^dagger - I| = 0.2).
    """
    n_dim = g.shape[0]
    if g.shape != gp.shape or g.shape != (n_dim, n_dim):
        raise ValueError(f"operator shapes {g.shape} vs {gp.shape} invalid")
    w = _weights(kind, params)
    ops = []
    labels = []
    for key, op, row, col in (
        ("g|g", g, 0, 0),
        ("g|g'", g, 0, 1),
        ("g'|g", gp, 1, 0),
        ("g'|g'", gp, 1, 1),
    ):
        k = np.zeros((2 * n_dim, 2 * n_dim), dtype=complex)
        k[row * n_dim : (row + 1) * n_dim, col * n_dim : (col + 1) * n_dim] = (
            math.sqrt(w[key]) * op
        )
        ops.append(k)
        labels.append(key)
    return KrausSet(tuple(ops), tuple(labels), kind)


def apply_kraus(kset: KrausSet, r: ComplexMatrix) -> ComplexMatrix:
    """sum_k K_k R K_k^dagger."""
    out = np.zeros_like(r)
    for k in kset.ops:
        out += k @ r @ dagger(k)
    return out


# Block layout of the collision unitary: (grid row, grid col, sign, weight
# key, operator index) with operator 0 = G, 1 = G'. Grid index = binary
# (ancilla1, ancilla2, walker); ancilla-in columns 0..1 are the |00> slice.
_LAYOUT = (
    (0, 0, 1.0, "g|g", 0),
    (0, 5, 1.0, "g'|g", 0),
    (1, 2, 1.0, "g|g'", 0),
    (1, 7, 1.0, "g'|g'", 0),
    (2, 1, 1.0, "g|g'", 0),
    (2, 4, 1.0, "g'|g'", 0),
    (3, 3, 1.0, "g'|g", 0),
    (3, 6, 1.0, "g|g", 0),
    (4, 2, 1.0, "g'|g'", 1),
    (4, 7, -1.0, "g|g'", 1),
    (5, 0, 1.0, "g'|g", 1),
    (5, 5, -1.0, "g|g", 1),
    (6, 3, 1.0, "g|g", 1),
    (6, 6, -1.0, "g'|g", 1),
    (7, 1, 1.0, "g'|g'", 1),
    (7, 4, -1.0, "g|g'", 1),
)


@dataclass(frozen=True)
class DilationUnitary:
    """The 8N x 8N collision unitary on ancilla1 (x) ancilla2 (x) walker (x) system."""

    matrix: ComplexMatrix
    kind: str

    def unitarity_defect(self) -> float:
        u = self.matrix
        return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))


def dilation_unitary(
    kind: str, params: MarkovNoiseParams, g: ComplexMatrix, gp: ComplexMatrix
) -> DilationUnitary:
    """Assemble the collision unitary for the given step kind.

    Tracing the ancillas out of U (R (x) |00><00|-style input, ancillas
    leftmost) reproduces exactly the Kraus step of the same kind; the
    ancilla-in |00> block columns *are* the Kraus operators. Column
    normalization holds because each weight column of the label chain sums
    to one, so U is unitary for every p, mu in [0, 1].
    """
    n_dim = g.shape[0]
    if g.shape != gp.shape or g.shape != (n_dim, n_dim):
        raise ValueError(f"operator shapes {g.shape} vs {gp.shape} invalid")
    w = _weights(kind, params)
    ops = (g, gp)
    u = np.zeros((8 * n_dim, 8 * n_dim), dtype=complex)
    for row, col, sign, key, which in _LAYOUT:
        block = sign * (math.sqrt(w[key]) * ops[which])
        u[row * n_dim : (row + 1) * n_dim, col * n_dim : (col + 1) * n_dim] = block
    return DilationUnitary(u, kind)


def kraus_from_dilation(dil: DilationUnitary) -> KrausSet:
    """Read the four Kraus operators out of the dilation's |00> columns."""
    n2 = dil.matrix.shape[0] // 4  # walker+system dimension 2N
    ops = []
    for alpha in range(4):
        ops.append(dil.matrix[alpha * n2 : (alpha + 1) * n2, 0:n2].copy())
    labels = ("g|g", "g|g'", "g'|g", "g'|g'")
    return KrausSet(tuple(ops), labels, dil.kind)


@dataclass(frozen=True)
class DilationReport:
    trials: int
    max_deviation: float
    tol: float
    passed: bool


def verify_dilation(
    dil: DilationUnitary,
    kset: KrausSet,
    trials: int = 20,
    seed: int = 1234,
    tol: float = 1e-12,
) -> DilationReport:
    """Check Tr_anc[ U (anc (x) R) U^dagger ] against the Kraus map.

    Runs ``trials`` random full-rank states R on walker (x) system and
    reports the largest trace distance between the two one-step images.
    """
    u = dil.matrix
    n2 = u.shape[0] // 4
    anc = np.zeros((4, 4), dtype=complex)
    anc[0, 0] = 1.0
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        r = random_density(n2, rng)
        evolved = u @ tensor(anc, r) @ dagger(u)
        reduced = partial_trace(evolved, (4, n2), keep=(1,))
        direct = apply_kraus(kset, r)
        worst = max(worst, trace_distance(reduced, direct))
    return DilationReport(trials, worst, tol, worst <= tol)


@dataclass(frozen=True)
class FactorizationReport:
    """Result of pulling the coefficient grid M out of the dilation."""

    m_grid: ComplexMatrix
    residual: float
    control_value: int
    unitary_defect: float
    passed: bool


def extract_m(
    dil: DilationUnitary,
    chi: ComplexMatrix,
    g: ComplexMatrix,
    tol: float = 1e-8,
) -> FactorizationReport:
    """Recover M from U = CX . (M (x) I_N) . (I_8 (x) G).

    CX applies ``chi`` to the system conditioned on the first ancilla;
    both control conventions are tried and the one with the smaller
    factorization residual wins (it is |1> for this layout). The residual
    is max |CX^dagger U (I_8 (x) G^dagger) - M (x) I_N| with M the
    blockwise normalized trace; ``unitary_defect`` is max |M^dagger M - I|.
    """
    u = dil.matrix
    n_dim = g.shape[0]
    eye_n = np.eye(n_dim, dtype=complex)
    eye4 = np.eye(4, dtype=complex)
    ug_inv = tensor(np.eye(8, dtype=complex), dagger(g))
    best: Optional[FactorizationReport] = None
    for control in (1, 0):
        proj = np.zeros((2, 2), dtype=complex)
        proj[control, control] = 1.0
        other = np.eye(2, dtype=complex) - proj
        cx = tensor(proj, eye4, chi) + tensor(other, eye4, eye_n)
        m_full = dagger(cx) @ u @ ug_inv
        m_grid = np.empty((8, 8), dtype=complex)
        for i in range(8):
            for j in range(8):
                block = m_full[i * n_dim : (i + 1) * n_dim, j * n_dim : (j + 1) * n_dim]
                m_grid[i, j] = np.trace(block) / n_dim
        residual = float(np.max(np.abs(m_full - tensor(m_grid, eye_n))))
        defect = float(np.max(np.abs(dagger(m_grid) @ m_grid - np.eye(8))))
        report = FactorizationReport(m_grid, residual, control, defect, residual <= tol)
        if report.passed:
            return report
        if best is None or report.residual < best.residual:
            best = report
    assert best is not None
    return best


@dataclass(frozen=True)
class ThermalBathParams:
    """Gibbs weights of one ancilla qubit at temperature ``temperature`` > 0.

    z1 (ground) and z2 (excited) with z1 + z2 = 1; each collision draws two
    fresh ancilla qubits in the product state diag(z1, z2) (x) diag(z1, z2).
    """

    temperature: float
    z1: float
    z2: float


def thermal_weights(temperature: float) -> ThermalBathParams:
    """Gibbs weights z1 = 1/(1 + e^{-1/T}), z2 = e^{-1/T}/(1 + e^{-1/T})."""
    t = float(temperature)
    if not t > 0.0:
        raise ValueError(f"temperature must be positive, got {t!r}")
    boltz = math.exp(-1.0 / t)
    z1 = 1.0 / (1.0 + boltz)
    return ThermalBathParams(t, z1, 1.0 - z1)


def thermal_kraus(dil: DilationUnitary, bath: ThermalBathParams) -> KrausSet:
    """Sixteen Kraus operators K_{ab} = pi_b <a|U|b> of the thermal collision.

    pi weights are the square roots of the two-qubit Gibbs populations:
    pi_00 = z1, pi_01 = pi_10 = sqrt(z1 z2), pi_11 = z2. Completeness
    follows from (z1 + z2)^2 = 1. At T -> 0 only the b = 00 column
    survives and the pure-ancilla step is recovered.
    """
    u = dil.matrix
    n2 = u.shape[0] // 4
    root = math.sqrt(bath.z1 * bath.z2)
    pi = (bath.z1, root, root, bath.z2)
    ops = []
    labels = []
    for alpha in range(4):
        for beta in range(4):
            block = u[alpha * n2 : (alpha + 1) * n2, beta * n2 : (beta + 1) * n2]
            ops.append(pi[beta] * block)
            labels.append(f"{alpha:02b}|{beta:02b}")
    return KrausSet(tuple(ops), tuple(labels), dil.kind)


def channel_maps(
    params: MarkovNoiseParams,
    g: ComplexMatrix,
    gp: ComplexMatrix,
    bath: Optional[ThermalBathParams] = None,
) -> tuple[KrausSet, KrausSet]:
    """(first step, steady step) Kraus sets, pure-ancilla or thermal."""
    if bath is None:
        return (
            kraus_step("initial", params, g, gp),
            kraus_step("steady", params, g, gp),
        )
    return (
        thermal_kraus(dilation_unitary("initial", params, g, gp), bath),
        thermal_kraus(dilation_unitary("steady", params, g, gp), bath),
    )


def collision_evolve(
    first: KrausSet,
    steady: KrausSet,
    r0: ComplexMatrix,
    steps: int,
    marked: int = 0,
    keep_states: bool = False,
    keep_joint: bool = False,
    validate: bool = False,
) -> EvolutionTrace:
    """Iterate the collision map from joint state ``r0`` for ``steps`` steps.

    The first collision uses ``first``, all later ones ``steady``. Success
    probability at each step is the marked diagonal element of the system
    marginal. ``validate`` re-checks the joint state each step (tolerance
    1e-9) and raises :class:`InvariantViolation` on failure.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    n_dim = r0.shape[0] // 2
    if r0.shape != (2 * n_dim, 2 * n_dim):
        raise ValueError(f"joint state shape {r0.shape} is not even-dimensional")
    if not 0 <= marked < n_dim:
        raise ValueError(f"marked index {marked} outside [0, {n_dim})")

    def success(r: ComplexMatrix) -> float:
        return float((r[marked, marked] + r[n_dim + marked, n_dim + marked]).real)

    r = np.array(r0, dtype=complex)
    probs = np.empty(steps + 1, dtype=float)
    probs[0] = success(r)
    sys_states = [partial_trace(r, (2, n_dim), keep=(1,))] if keep_states else None
    joints = [r.copy()] if keep_joint else None
    if validate:
        require_density(r, 1e-9, what="joint state t=0")
    for t in range(1, steps + 1):
        r = apply_kraus(first if t == 1 else steady, r)
        probs[t] = success(r)
        if validate:
            require_density(r, 1e-9, what=f"joint state t={t}")
        if keep_states:
            sys_states.append(partial_trace(r, (2, n_dim), keep=(1,)))
        if keep_joint:
            joints.append(r.copy())
    return EvolutionTrace(
        probs,
        states=tuple(sys_states) if keep_states else None,
        joint_states=tuple(joints) if keep_joint else None,
        meta={"first": first.kind, "steady": steady.kind, "steps": steps},
    )
