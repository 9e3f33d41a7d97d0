"""Discrete-time non-Markovianity witnesses for the collision dynamics.

Two standard measures, adapted to discrete steps: the trace-distance
(information backflow) measure over a fixed orthogonal state pair, and a
CP-divisibility measure built from the Choi-like evolution of a spectator
extension. Both sum the positive increments of their monitored series, so
both are lower-bound witnesses: a positive value certifies memory effects,
a zero does not certify their absence (no optimization over inputs is
performed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .collision import ThermalBathParams, KrausSet, apply_kraus, channel_maps, collision_evolve, thermal_weights
from .grover import GroverInstance, grover_operator, marked_state, uniform_superposition
from .linalg import (
    ComplexMatrix,
    InvariantViolation,
    partial_trace,
    projector,
    tensor,
    trace_distance,
    trace_norm,
)
from .markov import MarkovNoiseParams
from .noise import NoiseSpec, build_chi, noisy_grover

# Increments below this threshold count as numerical noise, not backflow.
INCREMENT_TOL = 1e-12

# Slack allowed on the joint-state contraction sanity check.
_MONOTONE_SLACK = 1e-10

_PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class StatePair:
    """Initial system-state pair monitored by the backflow measure."""

    rho1: ComplexMatrix
    rho2: ComplexMatrix


def blp_pair(inst: GroverInstance) -> StatePair:
    """The fixed pair: |s><s| and an orthogonal-support rank-N/2 state.

    rho2 = (1/N) [[I, -I], [-I, I]] (blocks of size N/2) has eigenvalue
    2/N on the span of |i> - |i + N/2>, which is orthogonal to |s>, so the
    pair starts at trace distance exactly 1.
    """
    N = inst.N
    rho2 = np.kron(
        np.array([[1.0, -1.0], [-1.0, 1.0]], dtype=complex) / N,
        np.eye(N // 2, dtype=complex),
    )
    return StatePair(projector(uniform_superposition(inst)), rho2)


@dataclass(frozen=True)
class MeasureResult:
    """A witness value plus the monitored series it was summed from."""

    value: float
    series: np.ndarray
    horizon: int
    witness_only: bool = True
    meta: dict = field(default_factory=dict)


def positive_increment_sum(series: Sequence[float], threshold: float = INCREMENT_TOL) -> float:
    """Sum of forward increments exceeding ``threshold``."""
    arr = np.asarray(series, dtype=float)
    steps = np.diff(arr)
    return float(np.sum(steps[steps > threshold]))


def n_blp(
    inst: GroverInstance,
    spec: NoiseSpec,
    params: MarkovNoiseParams,
    steps: int,
    bath: Optional[ThermalBathParams] = None,
) -> MeasureResult:
    """Trace-distance backflow of the system marginal over the fixed pair.

    Both pair members ride the same collision channel (walker prepared in
    |+><+|); the witness sums positive increments of D(rho1_t, rho2_t).
    As a sanity invariant the *joint* walker+system trace distance must be
    non-increasing from t = 1 on (each later step is one fixed completely
    positive map); violation beyond slack raises
    :class:`~noisygrover.linalg.InvariantViolation`.
    """
    pair = blp_pair(inst)
    g = grover_operator(inst)
    gp = noisy_grover(g, build_chi(inst.n, spec))
    first, steady = channel_maps(params, g, gp, bath=bath)
    walker = projector(_PLUS)
    traces = [
        collision_evolve(
            first,
            steady,
            tensor(walker, rho),
            steps,
            marked=inst.marked,
            keep_states=True,
            keep_joint=True,
        )
        for rho in (pair.rho1, pair.rho2)
    ]
    d_sys = np.array(
        [trace_distance(a, b) for a, b in zip(traces[0].states, traces[1].states)]
    )
    d_joint = np.array(
        [
            trace_distance(a, b)
            for a, b in zip(traces[0].joint_states, traces[1].joint_states)
        ]
    )
    for t in range(1, steps):
        if d_joint[t + 1] > d_joint[t] + _MONOTONE_SLACK:
            raise InvariantViolation(
                f"joint trace distance grew at step {t} -> {t + 1}: "
                f"{d_joint[t]:.12e} -> {d_joint[t + 1]:.12e}"
            )
    value = positive_increment_sum(d_sys)
    meta = {
        "p": params.p,
        "mu": params.mu,
        "temperature": bath.temperature if bath is not None else 0.0,
        "joint_series": d_joint,
    }
    return MeasureResult(value, d_sys, steps, witness_only=True, meta=meta)


def _extend_kraus(kset: KrausSet, n_dim: int) -> KrausSet:
    # Lift each 2N x 2N operator to walker (x) spectator (x) system, acting
    # as the identity on the N-dimensional spectator in the middle slot.
    ops = []
    eye = np.eye(n_dim, dtype=complex)
    big_dim = 2 * n_dim * n_dim
    for k in kset.ops:
        big = np.zeros((big_dim, big_dim), dtype=complex)
        for i in (0, 1):
            for j in (0, 1):
                block = k[i * n_dim : (i + 1) * n_dim, j * n_dim : (j + 1) * n_dim]
                if not block.any():
                    continue
                big[
                    i * n_dim * n_dim : (i + 1) * n_dim * n_dim,
                    j * n_dim * n_dim : (j + 1) * n_dim * n_dim,
                ] = np.kron(eye, block)
        ops.append(big)
    return KrausSet(tuple(ops), kset.labels, kset.kind)


def n_cp(
    inst: GroverInstance,
    spec: NoiseSpec,
    params: MarkovNoiseParams,
    steps: int,
) -> MeasureResult:
    """CP-divisibility witness from a spectator extension.

    The traceless operator (I/N) (x) (|s><s| - |w><w|) on spectator (x)
    system rides the channel extended by an untouched spectator copy;
    monitored is half the trace norm of the walker-traced image. Any
    increase witnesses a non-CP intermediate map. Pure-ancilla channel
    only.
    """
    N = inst.N
    g = grover_operator(inst)
    gp = noisy_grover(g, build_chi(inst.n, spec))
    first, steady = channel_maps(params, g, gp)
    ext_first = _extend_kraus(first, N)
    ext_steady = _extend_kraus(steady, N)
    witness = projector(uniform_superposition(inst)) - projector(marked_state(inst))
    r = tensor(projector(_PLUS), np.eye(N, dtype=complex) / N, witness)
    dims = (2, N, N)

    def gamma(op: ComplexMatrix) -> float:
        return 0.5 * trace_norm(partial_trace(op, dims, keep=(1, 2)))

    series = np.empty(steps + 1, dtype=float)
    series[0] = gamma(r)
    for t in range(1, steps + 1):
        r = apply_kraus(ext_first if t == 1 else ext_steady, r)
        series[t] = gamma(r)
    value = positive_increment_sum(series)
    meta = {"p": params.p, "mu": params.mu}
    return MeasureResult(value, series, steps, witness_only=True, meta=meta)


@dataclass(frozen=True)
class SweepPoint:
    temperature: float
    p: float
    mu: float
    value: float


def temperature_sweep(
    inst: GroverInstance,
    spec: NoiseSpec,
    params_grid: Iterable[MarkovNoiseParams],
    steps: int,
    temperatures: Iterable[float],
) -> tuple[SweepPoint, ...]:
    """Backflow witness on a (temperature x parameter) grid."""
    out = []
    for temp in temperatures:
        bath = thermal_weights(temp)
        for params in params_grid:
            result = n_blp(inst, spec, params, steps, bath=bath)
            out.append(SweepPoint(temp, params.p, params.mu, result.value))
    return tuple(out)
