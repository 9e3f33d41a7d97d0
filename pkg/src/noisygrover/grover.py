"""Ideal Grover search on n qubits, in explicit matrix form.

The walk operator is assembled directly from its action on the uniform
superposition |s> and the marked state |w>:

    G = -I + 2|s><s| - (4/sqrt(N))|s><w| + 2|w><w|

which equals the usual diffusion-times-oracle product (2|s><s| - I)(I - 2|w><w|).
The ideal success probability after t iterations has the closed form
sin^2((2t + 1) asin(1/sqrt(N))), used throughout the tests as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import projector


@dataclass(frozen=True)
class GroverInstance:
    """A search instance: ``n`` qubits, one marked basis index.

    ``n >= 2`` for anything search-like; ``n = 1`` is accepted because all
    operators below remain well defined there.
    """

    n: int
    marked: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        if not 0 <= self.marked < self.N:
            raise ValueError(f"marked index {self.marked} outside [0, {self.N})")

    @property
    def N(self) -> int:
        """Search space dimension N = 2**n."""
        return 2 ** self.n


def uniform_superposition(inst: GroverInstance) -> np.ndarray:
    """|s>: every amplitude 1/sqrt(N)."""
    N = inst.N
    return np.full(N, 1.0 / math.sqrt(N), dtype=complex)


def marked_state(inst: GroverInstance) -> np.ndarray:
    """|w>: the marked computational basis vector."""
    w = np.zeros(inst.N, dtype=complex)
    w[inst.marked] = 1.0
    return w


def grover_operator(inst: GroverInstance) -> np.ndarray:
    """Dense N x N Grover iteration operator."""
    N = inst.N
    s = uniform_superposition(inst)
    w = marked_state(inst)
    g = -np.eye(N, dtype=complex)
    g += 2.0 * projector(s)
    g += -(4.0 / math.sqrt(N)) * np.outer(s, np.conj(w))
    g += 2.0 * projector(w)
    return g


def ideal_success_series(inst: GroverInstance, steps: int) -> np.ndarray:
    """P(t) = |<w| G^t |s>|^2 for t = 0..steps, by repeated multiplication."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    g = grover_operator(inst)
    v = uniform_superposition(inst)
    out = np.empty(steps + 1, dtype=float)
    out[0] = abs(v[inst.marked]) ** 2
    for t in range(1, steps + 1):
        v = g @ v
        out[t] = abs(v[inst.marked]) ** 2
    return out


def ideal_success_closed_form(N: int, t: int) -> float:
    """Closed-form P(t) = sin^2((2t + 1) asin(1/sqrt(N)))."""
    return math.sin((2 * t + 1) * math.asin(1.0 / math.sqrt(N))) ** 2


def optimal_iterations(N: int) -> int:
    """floor((pi/4) sqrt(N)), the standard iteration count for N >= 4."""
    if N < 4:
        raise ValueError(f"search space too small: N={N}")
    return int(math.floor(math.pi / 4.0 * math.sqrt(N)))
