"""Time-correlated (Markovian) switching between clean and faulty iterations.

Each time step applies either the clean operator G or the faulty one
G' = chi G. The choice is a two-state Markov chain over labels {g, g'}
with stationary distribution (1 - p, p) and memory mu:

    P(k at t+1 | l at t) = (1 - mu) p_k + mu * delta_{k,l}

mu = 0 is i.i.d. noise, mu = 1 freezes the first draw forever ("perfect
memory"). Instead of sampling, the chain is carried exactly: a classical
walker qubit (index 0 = g, 1 = g') is adjoined to the system, the joint
state starts as |+><+| (x) |s><s|, and every step is the exact completely
positive map that applies G on the g branch, G' on the g' branch, and
mixes branch populations with the conditional probabilities. The success
probability is read off the system marginal at the marked index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grover import GroverInstance, grover_operator, uniform_superposition
from .linalg import ComplexMatrix, partial_trace, projector, tensor
from .noise import NoiseSpec, build_chi, noisy_grover


@dataclass(frozen=True)
class MarkovNoiseParams:
    """Stationary fault probability ``p`` and memory ``mu``, both in [0, 1]."""

    p: float
    mu: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu={self.mu} outside [0, 1]")

    @property
    def p_g(self) -> float:
        """Stationary probability of a clean step."""
        return 1.0 - self.p

    @property
    def p_gp(self) -> float:
        """Stationary probability of a faulty step."""
        return self.p


@dataclass(frozen=True)
class ConditionalProbs:
    """One-step transition probabilities of the label chain."""

    g_given_g: float
    gp_given_g: float
    g_given_gp: float
    gp_given_gp: float


def conditional_probs(params: MarkovNoiseParams) -> ConditionalProbs:
    """P(k | l) = (1 - mu) p_k + mu delta_{k,l}; each column sums to 1."""
    p_g, p_gp, mu = params.p_g, params.p_gp, params.mu
    return ConditionalProbs(
        g_given_g=(1.0 - mu) * p_g + mu,
        gp_given_g=(1.0 - mu) * p_gp,
        g_given_gp=(1.0 - mu) * p_g,
        gp_given_gp=(1.0 - mu) * p_gp + mu,
    )


def initial_joint_state(inst: GroverInstance) -> ComplexMatrix:
    """R_0 = |+><+| on the walker (x) |s><s| on the system (2N x 2N)."""
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    return tensor(projector(plus), projector(uniform_superposition(inst)))


@dataclass(frozen=True)
class EvolutionTrace:
    """Result of an evolution run.

    ``probabilities[t]`` is the success probability after t steps,
    t = 0..steps. ``states`` (system marginals) and ``joint_states``
    (walker (x) system) are kept only on request; both include t = 0.
    """

    probabilities: np.ndarray
    states: Optional[tuple[ComplexMatrix, ...]] = None
    joint_states: Optional[tuple[ComplexMatrix, ...]] = None
    meta: dict = field(default_factory=dict)


def markov_evolve(
    inst: GroverInstance,
    spec: NoiseSpec,
    params: MarkovNoiseParams,
    steps: int,
    bath=None,
    keep_states: bool = False,
    keep_joint: bool = False,
    validate: bool = False,
) -> EvolutionTrace:
    """Evolve the joint walker+system state for ``steps`` collisions.

    The first step uses the stationary label distribution, later steps the
    conditional one. With ``bath`` (a ``ThermalBathParams``) the walker is
    refreshed each step from thermal two-qubit ancillas instead of pure
    ones; ``bath=None`` is the zero-temperature (pure) construction.
    ``validate`` re-checks state validity each step at tolerance 1e-9.
    """
    from .collision import channel_maps, collision_evolve  # deferred, see collision.py

    g = grover_operator(inst)
    gp = noisy_grover(g, build_chi(inst.n, spec))
    first, steady = channel_maps(params, g, gp, bath=bath)
    return collision_evolve(
        first,
        steady,
        initial_joint_state(inst),
        steps,
        marked=inst.marked,
        keep_states=keep_states,
        keep_joint=keep_joint,
        validate=validate,
    )


def history_oracle(
    inst: GroverInstance,
    spec: NoiseSpec,
    params: MarkovNoiseParams,
    steps: int,
) -> EvolutionTrace:
    """Success probabilities by explicit sum over all 2**steps label histories.

    Exponential-cost reference implementation: each history (k_1 .. k_t)
    contributes its chain probability times the corresponding pure
    evolution. Used to validate the collision construction; refuses
    steps > 16.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if steps > 16:
        raise ValueError(f"history sum over 2^{steps} branches refused; cap is 16")
    g = grover_operator(inst)
    gp = noisy_grover(g, build_chi(inst.n, spec))
    ops = (g, gp)
    cond = conditional_probs(params)
    trans = {
        (0, 0): cond.g_given_g,
        (1, 0): cond.gp_given_g,
        (0, 1): cond.g_given_gp,
        (1, 1): cond.gp_given_gp,
    }
    first = (params.p_g, params.p_gp)
    rho0 = projector(uniform_superposition(inst))
    probs = np.empty(steps + 1, dtype=float)
    probs[0] = rho0[inst.marked, inst.marked].real
    states = [rho0]
    for t in range(1, steps + 1):
        acc = np.zeros_like(rho0)
        for hist in itertools.product((0, 1), repeat=t):
            weight = first[hist[0]]
            for prev, cur in zip(hist, hist[1:]):
                weight *= trans[(cur, prev)]
            if weight == 0.0:
                continue
            v = rho0
            for k in hist:
                v = ops[k] @ v @ np.conj(ops[k]).T
            acc += weight * v
        states.append(acc)
        probs[t] = acc[inst.marked, inst.marked].real
    return EvolutionTrace(probs, states=tuple(states), meta={"method": "history"})


def perfect_memory_analytic(N: int, t: float) -> float:
    """Success probability under an always-faulty walk, full bit-flip noise.

    For G' = sigma_x^(x n) G started from |s>, with theta = arccos(2/N):

        P(t) = (1/N) cos^2(theta t) (tan(theta/2) tan(theta t) - 1)^2
             = (1/N) (tan(theta/2) sin(theta t) - cos(theta t))^2

    The second form is evaluated (no tangent poles) and t may be real,
    which is what :func:`perfect_memory_first_max` interpolates.
    """
    theta = math.acos(2.0 / N)
    x = theta * t
    return (math.tan(theta / 2.0) * math.sin(x) - math.cos(x)) ** 2 / N


def perfect_memory_first_max(N: int) -> float:
    """Location of the first maximum of the curve above: pi/theta - 1/2."""
    theta = math.acos(2.0 / N)
    return math.pi / theta - 0.5
