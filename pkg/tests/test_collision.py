import itertools
import math

import numpy as np
import pytest

from noisygrover.collision import (
    KrausSet,
    apply_kraus,
    channel_maps,
    collision_evolve,
    dilation_unitary,
    extract_m,
    kraus_from_dilation,
    kraus_step,
    thermal_kraus,
    thermal_weights,
    verify_dilation,
)
from noisygrover.grover import GroverInstance, grover_operator
from noisygrover.linalg import InvariantViolation, random_density
from noisygrover.markov import MarkovNoiseParams, conditional_probs, initial_joint_state
from noisygrover.noise import build_chi, noise_spec, noise_unitary

INST = GroverInstance(2)
G = grover_operator(INST)
CHI = build_chi(2, noise_spec(noise_unitary("x"), 1, 2))
GP = CHI @ G

GRID = [
    MarkovNoiseParams(p, mu)
    for p, mu in itertools.product((0.0, 0.1, 0.5, 0.9, 1.0), (0.0, 0.5, 1.0))
]


@pytest.mark.parametrize("kind", ["initial", "steady"])
def test_kraus_completeness_everywhere(kind):
    for params in GRID:
        kset = kraus_step(kind, params, G, GP)
        assert kset.completeness_defect() < 1e-12, params


def test_kraus_block_structure():
    params = MarkovNoiseParams(0.3, 0.0)
    kset = kraus_step("initial", params, G, GP)
    n = G.shape[0]
    k1 = np.zeros((2 * n, 2 * n), dtype=complex)
    k1[:n, :n] = math.sqrt(0.7) * G
    assert np.array_equal(kset.ops[0], k1)
    k4 = np.zeros((2 * n, 2 * n), dtype=complex)
    k4[n:, n:] = math.sqrt(0.3) * GP
    assert np.array_equal(kset.ops[3], k4)
    assert kset.labels == ("g|g", "g|g'", "g'|g", "g'|g'")


def test_unitality_defect_formula():
    # sum K K^dagger deviates from I by (1 - mu)|1 - 2p| on the steady step
    # and |1 - 2p| on the first, so p = 1/2 is exactly unital.
    for params in GRID:
        steady = kraus_step("steady", params, G, GP)
        expected = (1.0 - params.mu) * abs(1.0 - 2.0 * params.p)
        assert steady.unitality_defect() == pytest.approx(expected, abs=1e-12)
        first = kraus_step("initial", params, G, GP)
        assert first.unitality_defect() == pytest.approx(
            abs(1.0 - 2.0 * params.p), abs=1e-12
        )
    loud = kraus_step("steady", MarkovNoiseParams(0.3, 0.5), G, GP)
    assert loud.unitality_defect() == pytest.approx(0.2, abs=1e-12)


def test_apply_kraus_preserves_density():
    rng = np.random.default_rng(42)
    r = random_density(8, rng)
    kset = kraus_step("steady", MarkovNoiseParams(0.25, 0.6), G, GP)
    image = apply_kraus(kset, r)
    assert abs(np.trace(image).real - 1.0) < 1e-12
    assert np.max(np.abs(image - image.conj().T)) < 1e-12


@pytest.mark.parametrize("kind", ["initial", "steady"])
def test_dilation_is_unitary_for_all_parameters(kind):
    for params in GRID:
        dil = dilation_unitary(kind, params, G, GP)
        assert dil.matrix.shape == (32, 32)
        assert dil.unitarity_defect() < 1e-12, params


def test_dilation_kinds_agree_without_memory():
    params = MarkovNoiseParams(0.35, 0.0)
    first = dilation_unitary("initial", params, G, GP)
    steady = dilation_unitary("steady", params, G, GP)
    assert np.array_equal(first.matrix, steady.matrix)


@pytest.mark.parametrize("kind", ["initial", "steady"])
def test_kraus_sits_in_dilation_columns(kind):
    params = MarkovNoiseParams(0.3, 0.7)
    dil = dilation_unitary(kind, params, G, GP)
    direct = kraus_step(kind, params, G, GP)
    extracted = kraus_from_dilation(dil)
    assert extracted.kind == kind
    for a, b in zip(direct.ops, extracted.ops):
        assert np.array_equal(a, b)


def test_verify_dilation_passes_and_is_deterministic():
    params = MarkovNoiseParams(0.2, 0.4)
    dil = dilation_unitary("steady", params, G, GP)
    kset = kraus_step("steady", params, G, GP)
    rep1 = verify_dilation(dil, kset, trials=10, seed=7)
    rep2 = verify_dilation(dil, kset, trials=10, seed=7)
    assert rep1.passed and rep1.max_deviation < 1e-12
    assert rep1.max_deviation == rep2.max_deviation


def test_verify_dilation_catches_mismatch():
    params = MarkovNoiseParams(0.2, 0.4)
    dil = dilation_unitary("steady", params, G, GP)
    kset = kraus_step("steady", params, G, GP)
    broken = KrausSet(
        (1.001 * kset.ops[0],) + kset.ops[1:], kset.labels, kset.kind
    )
    assert not verify_dilation(dil, broken, trials=3).passed


def test_extract_m_recovers_unitary_grid():
    for params in GRID:
        dil = dilation_unitary("steady", params, G, GP)
        report = extract_m(dil, CHI, G)
        assert report.passed, params
        assert report.residual < 1e-10
        assert report.control_value == 1
        assert report.unitary_defect < 1e-10
        # the grid entries are the +-sqrt(prob) coefficients
        c = conditional_probs(params)
        assert abs(report.m_grid[0, 0] - math.sqrt(c.g_given_g)) < 1e-12
        assert abs(report.m_grid[5, 5] + math.sqrt(c.g_given_g)) < 1e-12


def _transition_roots(params):
    c = conditional_probs(params)
    return {
        "g|g": math.sqrt(c.g_given_g),
        "g|g'": math.sqrt(c.g_given_gp),
        "g'|g": math.sqrt(c.gp_given_g),
        "g'|g'": math.sqrt(c.gp_given_gp),
    }


def test_quarter_blocks_relate_to_m_columns():
    # The 4x4 building blocks of the decomposition have entries of the form
    # +-(x + s)/y with s in {-1, 0, 1} and x, y magnitudes taken from one
    # column of M. Verify that structural claim entry by entry.
    params = MarkovNoiseParams(0.3, 0.6)
    r = _transition_roots(params)
    a4 = np.array(
        [
            [0.0, (r["g|g"] - 1.0) / r["g'|g"], 0.0, 0.0],
            [r["g|g'"] / r["g'|g'"], 0.0, 0.0, -1.0 / r["g'|g'"]],
            [-1.0 / r["g'|g'"], 0.0, 0.0, r["g|g'"] / r["g'|g'"]],
            [0.0, 0.0, -r["g|g"] / r["g'|g"], 0.0],
        ]
    )
    b4 = np.array(
        [
            [0.0, (r["g|g"] + 1.0) / r["g'|g"], 0.0, 0.0],
            [r["g|g'"] / r["g'|g'"], 0.0, 0.0, 1.0 / r["g'|g'"]],
            [1.0 / r["g'|g'"], 0.0, 0.0, r["g|g'"] / r["g'|g'"]],
            [0.0, 0.0, (r["g'|g"] + 1.0) / r["g|g"], 0.0],
        ]
    )
    dil = dilation_unitary("steady", params, G, GP)
    m_grid = extract_m(dil, CHI, G).m_grid
    candidates = []
    for col in range(8):
        mags = [abs(m_grid[row, col]) for row in range(8) if abs(m_grid[row, col]) > 1e-12]
        for x in list(mags) + [0.0]:
            for y in mags:
                for s in (-1.0, 0.0, 1.0):
                    candidates.append((x + s) / y)
                    candidates.append(-(x + s) / y)
    for matrix in (a4, b4):
        for value in matrix.ravel():
            if value != 0.0:
                assert min(abs(value - c) for c in candidates) < 1e-9, value


@pytest.mark.parametrize("temperature,z1", [(1.0, 0.7310585786300049), (0.5, 0.8807970779778823)])
def test_thermal_weights_values(temperature, z1):
    bath = thermal_weights(temperature)
    assert bath.z1 == pytest.approx(z1, abs=1e-15)
    assert bath.z1 + bath.z2 == pytest.approx(1.0, abs=1e-15)
    assert bath.z1 > bath.z2


def test_thermal_weights_limits_and_validation():
    hot = thermal_weights(1e6)
    assert hot.z1 == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(ValueError):
        thermal_weights(0.0)
    with pytest.raises(ValueError):
        thermal_weights(-1.0)


@pytest.mark.parametrize("temperature", [0.1, 0.5, 1.0, 2.0, 10.0])
def test_thermal_kraus_completeness(temperature):
    params = MarkovNoiseParams(0.4, 0.6)
    bath = thermal_weights(temperature)
    for kind in ("initial", "steady"):
        kset = thermal_kraus(dilation_unitary(kind, params, G, GP), bath)
        assert len(kset.ops) == 16
        assert kset.completeness_defect() < 1e-12


def test_thermal_cold_limit_reduces_to_pure_step():
    params = MarkovNoiseParams(0.4, 0.6)
    bath = thermal_weights(0.01)
    dil = dilation_unitary("steady", params, G, GP)
    thermal = thermal_kraus(dil, bath)
    pure = kraus_step("steady", params, G, GP)
    rng = np.random.default_rng(11)
    r = random_density(8, rng)
    assert np.max(np.abs(apply_kraus(thermal, r) - apply_kraus(pure, r))) < 1e-12


def test_channel_maps_dispatch():
    params = MarkovNoiseParams(0.3, 0.3)
    first, steady = channel_maps(params, G, GP)
    assert first.kind == "initial" and steady.kind == "steady"
    assert len(first.ops) == 4
    first_t, steady_t = channel_maps(params, G, GP, bath=thermal_weights(1.0))
    assert len(first_t.ops) == 16 and len(steady_t.ops) == 16
    assert first_t.kind == "initial" and steady_t.kind == "steady"


def test_collision_evolve_basics():
    params = MarkovNoiseParams(0.3, 0.3)
    first, steady = channel_maps(params, G, GP)
    r0 = initial_joint_state(INST)
    trace = collision_evolve(first, steady, r0, 0)
    assert trace.probabilities.shape == (1,)
    assert trace.probabilities[0] == pytest.approx(0.25)
    trace = collision_evolve(first, steady, r0, 4, keep_joint=True, validate=True)
    assert len(trace.joint_states) == 5
    assert trace.meta["steps"] == 4
    with pytest.raises(ValueError):
        collision_evolve(first, steady, r0, -1)
    with pytest.raises(ValueError):
        collision_evolve(first, steady, r0, 2, marked=4)


def test_collision_evolve_validate_catches_broken_channel():
    params = MarkovNoiseParams(0.3, 0.3)
    first, steady = channel_maps(params, G, GP)
    broken = KrausSet(
        tuple(1.05 * k for k in steady.ops), steady.labels, steady.kind
    )
    r0 = initial_joint_state(INST)
    with pytest.raises(InvariantViolation):
        collision_evolve(first, broken, r0, 3, validate=True)
