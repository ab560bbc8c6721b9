import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixphase.errors import BetaZero, GapClosure, TruncationInsufficient
from mixphase.linalg import angle_distance
from mixphase.models import (
    KitaevSpec,
    OscillatorSpec,
    SSHSpec,
    band_gap,
    bloch_vector,
    brillouin_loop,
    choose_n_max,
    continuum_theta_d,
    kitaev_theta_d,
    oscillator_tail_bound,
    oscillator_theta_d,
    oscillator_theta_d_numeric,
    ssh_theta_d,
    two_band_hamiltonian,
    two_band_hamiltonians,
    two_band_theta_d_numeric,
    two_band_theta_d_unordered,
)

KITAEV = KitaevSpec(0.6, 1.0, 1.0)
SSH = SSHSpec(1.0, 1.2)
HALF = math.pi / 2


def test_kitaev_k0_block():
    assert band_gap(KITAEV, 0.0) == pytest.approx(2 * 0.4)
    np.testing.assert_allclose(bloch_vector(KITAEV, 0.0), [0, 0, 1], atol=1e-15)


def test_ssh_k0_block():
    assert band_gap(SSH, 0.0) == pytest.approx(2 * 2.2)
    np.testing.assert_allclose(bloch_vector(SSH, 0.0), [-1, 0, 0], atol=1e-15)


def test_gap_closure():
    with pytest.raises(GapClosure):
        two_band_hamiltonian(KitaevSpec(1.0, 1.0, 1.0), 0.0)


def test_stacked_hamiltonians_match_single():
    ks = np.linspace(0, 2 * math.pi, 7)
    for spec in (KITAEV, SSH):
        stack = two_band_hamiltonians(spec, ks)
        for k, h in zip(ks, stack):
            np.testing.assert_allclose(h, two_band_hamiltonian(spec, k), atol=1e-15)


def test_brillouin_loop_samples():
    loop = brillouin_loop(KITAEV, 1.0, 4)
    np.testing.assert_allclose(loop.samples[:4], [0, HALF, math.pi, 3 * HALF])
    assert loop.samples[-1] == loop.samples[0] == 0.0
    np.testing.assert_allclose(2 * math.pi * loop.midpoint_times() / loop.tau, 2 * math.pi * (np.arange(4) + 0.5) / 4)


def test_kitaev_anchors():
    assert kitaev_theta_d(0.6, 1.0, 0.6, math.inf) == (pytest.approx(-0.6, abs=1e-12), "central")
    for b in (0.0, 1.0, 10.0, math.inf):
        assert kitaev_theta_d(0.6, 1.0, HALF, b)[0] == pytest.approx(-HALF, abs=1e-12)
    assert kitaev_theta_d(0.6, 1.0, 1.0, 0.0)[0] == pytest.approx(0.0, abs=1e-12)
    assert kitaev_theta_d(0.6, 1.0, 2.0, 0.0)[0] == pytest.approx(math.pi, abs=1e-12)


def test_ssh_anchors():
    assert ssh_theta_d(1.0, math.inf, 1.2)[0] == pytest.approx(1.0, abs=1e-12)
    for b in (0.0, 0.3, 20.0, math.inf):
        assert ssh_theta_d(HALF, b, 1.2)[0] == pytest.approx(HALF, abs=1e-12)
    assert ssh_theta_d(1.0, 0.0, 1.2)[0] == pytest.approx(0.0, abs=1e-12)


@given(st.floats(-30, 30), st.floats(0, 50))
def test_kitaev_closed_form_is_arg_of_formula(x, b):
    t = math.tanh(b * 0.4)
    z = complex(math.cos(x), -math.sin(x) * t)
    theta, _ = kitaev_theta_d(0.6, 1.0, x, b)
    assert -math.pi < theta <= math.pi
    if abs(z) > 1e-6:
        assert angle_distance(theta, cmath.phase(z)) <= 1e-9


@given(st.floats(-30, 30), st.floats(0, 50))
def test_ssh_closed_form_is_arg_of_formula(x, b):
    z = complex(math.cos(x), math.sin(x) * math.tanh(b * 2.2))
    theta, _ = ssh_theta_d(x, b, 1.2)
    assert -math.pi < theta <= math.pi
    if abs(z) > 1e-6:
        assert angle_distance(theta, cmath.phase(z)) <= 1e-9


def test_oscillator_anchors():
    for b in (0.0, 0.5, 3.0, math.inf):
        assert angle_distance(oscillator_theta_d(OscillatorSpec(2 * math.pi, b))[0], math.pi) <= 1e-12
    assert oscillator_theta_d(OscillatorSpec(1.0, math.inf))[0] == pytest.approx(-0.5, abs=1e-12)
    assert oscillator_theta_d(OscillatorSpec(1.0, 0.0))[0] == pytest.approx(-HALF, abs=1e-12)


@given(st.floats(0, 40))
def test_oscillator_infinite_temperature_values(x):
    theta, branch = oscillator_theta_d(OscillatorSpec(x, 0.0))
    assert branch == "infinite_T"
    assert min(abs(theta - v) for v in (0.0, HALF, -HALF, math.pi)) == 0.0


@given(st.floats(0.05, 4 * math.pi), st.floats(0.2, 20))
def test_oscillator_closed_form_matches_sum(x, b):
    z = cmath.exp(-0.5j * x) / (1 - math.exp(-b) * cmath.exp(-1j * x))
    assert angle_distance(oscillator_theta_d(OscillatorSpec(x, b))[0], cmath.phase(z)) <= 1e-9


def test_oscillator_numeric_examples():
    closed = oscillator_theta_d(OscillatorSpec(1.0, 1.0))[0]
    assert angle_distance(oscillator_theta_d_numeric(OscillatorSpec(1.0, 1.0, n_max=60)), closed) <= 1e-10
    assert angle_distance(oscillator_theta_d_numeric(OscillatorSpec(2 * math.pi, 0.5)), math.pi) <= 1e-8
    x, b = 0.9, 10.0
    direct = cmath.phase(cmath.exp(-0.5j * x) + math.exp(-b) * cmath.exp(-1.5j * x))
    assert oscillator_theta_d_numeric(OscillatorSpec(x, b, n_max=1)) == pytest.approx(direct, abs=1e-15)


def test_oscillator_numeric_errors():
    with pytest.raises(BetaZero):
        oscillator_theta_d_numeric(OscillatorSpec(1.0, 0.0))
    with pytest.raises(TruncationInsufficient):
        oscillator_theta_d_numeric(OscillatorSpec(1.0, 0.5, n_max=5))


@given(st.floats(0.01, 20))
def test_truncation_choice_meets_bound(b):
    n = choose_n_max(b)
    assert oscillator_tail_bound(b, n) <= 1e-10


def test_continuum():
    assert continuum_theta_d(0.0) == 0.0
    assert continuum_theta_d(1.0) == pytest.approx(-math.pi / 4, abs=1e-15)
    assert continuum_theta_d(math.inf) == -HALF


def test_unordered_route_matches_closed_forms():
    for tau in (0.3, 1.0, 2.2):
        for b in (0.5, 5.0):
            k = two_band_theta_d_unordered(KITAEV, tau, b)
            assert angle_distance(k, kitaev_theta_d(0.6, 1.0, 0.6 * tau, b)[0]) <= 1e-12
            s = two_band_theta_d_unordered(SSH, tau, b)
            assert angle_distance(s, ssh_theta_d(tau, b, 1.2)[0]) <= 1e-12


def test_time_ordered_route_agrees_for_short_loops():
    # ordering corrections enter at tau^2
    tau = 0.01
    num = two_band_theta_d_numeric(KITAEV, tau, 5.0, 512)
    assert angle_distance(num, kitaev_theta_d(0.6, 1.0, 0.6 * tau, 5.0)[0]) <= 1e-6


def test_numeric_kitaev_example():
    num = two_band_theta_d_numeric(KITAEV, 1.0, 5.0, 4096)
    assert angle_distance(num, kitaev_theta_d(0.6, 1.0, 0.6, 5.0)[0]) <= 1e-6


def test_numeric_ssh_example():
    num = two_band_theta_d_numeric(SSH, 1.0, 20.0, 4096)
    assert angle_distance(num, ssh_theta_d(1.0, 20.0, 1.2)[0]) <= 1e-6


def test_numeric_kitaev_low_temperature_limit():
    num = two_band_theta_d_numeric(KITAEV, 1.0, 60.0, 4096)
    assert angle_distance(num, -0.6) <= 1e-3


ALT = [(0.6, 1.0), (1.5, 1.0)]  # (m, c): topological and trivial Kitaev regimes
ALT_SSH = [1.2, 0.8]


@pytest.mark.parametrize("m,c", ALT)
@pytest.mark.parametrize("b", [0.3, 4.0])
def test_unordered_route_kitaev_regimes(m, c, b):
    spec = KitaevSpec(m, c, 1.0)
    for tau in (0.4, 1.7, 3.1):
        num = two_band_theta_d_unordered(spec, tau, b)
        assert angle_distance(num, kitaev_theta_d(m, c, m * tau, b)[0]) <= 1e-12


@pytest.mark.parametrize("r", ALT_SSH)
@pytest.mark.parametrize("b", [0.3, 4.0])
def test_unordered_route_ssh_regimes(r, b):
    spec = SSHSpec(1.0, r)
    for tau in (0.4, 1.7, 3.1):
        assert angle_distance(two_band_theta_d_unordered(spec, tau, b), ssh_theta_d(tau, b, r)[0]) <= 1e-12


@given(st.floats(-20, 20), st.floats(0, 30), st.sampled_from(ALT))
def test_kitaev_periodic(x, b, mc):
    a = kitaev_theta_d(*mc, x, b)[0]
    assert angle_distance(a, kitaev_theta_d(*mc, x + 2 * math.pi, b)[0]) <= 1e-9


@given(st.floats(-20, 20), st.floats(0, 30), st.sampled_from(ALT_SSH))
def test_ssh_periodic(x, b, r):
    assert angle_distance(ssh_theta_d(x, b, r)[0], ssh_theta_d(x + 2 * math.pi, b, r)[0]) <= 1e-9


@given(st.integers(-6, 6), st.floats(0, 50))
def test_resonance_pinning(n, b):
    x = n * math.pi + HALF
    k, kb = kitaev_theta_d(0.6, 1.0, x, b)
    s, sb = ssh_theta_d(x, b, 1.2)
    assert k == pytest.approx((-1) ** (n - 1) * HALF, abs=1e-12)
    assert s == pytest.approx((-1) ** n * HALF, abs=1e-12)
    assert kb.startswith("resonant") and sb.startswith("resonant")


@given(st.floats(-12, 12), st.floats(0.01, 30))
def test_branch_continuity(x, b):
    for f in (lambda y: kitaev_theta_d(0.6, 1.0, y, b), lambda y: ssh_theta_d(y, b, 1.2)):
        (a, ba), (c, bc) = f(x), f(x + 1e-8)
        if ba == bc and not ba.startswith("resonant"):
            assert angle_distance(a, c) <= 1e-6
        else:
            assert angle_distance(a, c) <= 1e-6 or abs(angle_distance(a, c) - math.pi) <= 1e-6


def test_infinite_temperature_value_set():
    allowed = (0.0, HALF, -HALF, math.pi)
    xs = np.concatenate([np.linspace(0, 4 * math.pi, 2001), np.arange(9) * HALF])
    for x in xs:
        for theta in (
            kitaev_theta_d(0.6, 1.0, x, 0.0)[0],
            ssh_theta_d(x, 0.0, 1.2)[0],
            oscillator_theta_d(OscillatorSpec(x, 0.0))[0],
        ):
            assert min(abs(theta - v) for v in allowed) == 0.0
    # beta = 0 means tau / (beta hbar) = inf for every tau: a single value
    assert continuum_theta_d(math.inf) == -HALF


def test_closed_forms_reject_gapless_parameters():
    with pytest.raises(GapClosure):
        kitaev_theta_d(1.0, 1.0, 0.5, math.inf)
    with pytest.raises(GapClosure):
        ssh_theta_d(0.5, 1.0, 1.0)
