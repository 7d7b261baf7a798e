import math

import numpy as np
import pytest

from conftest import random_connected
from spinet.fermion import (
    SingleParticle,
    fermion_fidelities,
    fermion_fidelity,
    fermion_trace,
    hopping_matrix,
)
from spinet.hilbert import transport_fidelity
from spinet.library import fig3, fig5, fig7b, lambda3
from spinet.network import SpinNetwork, chain, pst_chain


def test_hopping_matrices():
    r = 1 / math.sqrt(2)
    assert np.allclose(hopping_matrix(lambda3()), [[0, r, 0], [r, 0, r], [0, r, 0]])
    a = hopping_matrix(pst_chain(4))
    assert np.allclose(np.diag(a, 1), [math.sqrt(3), 2, math.sqrt(3)])
    assert np.array_equal(hopping_matrix(chain([0.4])), [[0, 0.4], [0.4, 0]])


def test_start_and_lambda():
    assert abs(fermion_fidelity(fig5(), 0.0)) < 1e-15
    assert fermion_fidelity(lambda3(), math.pi) == pytest.approx(1.0, abs=1e-12)


def test_fig3_analytic():
    assert fermion_fidelity(fig3(), math.pi / math.sqrt(6)) == pytest.approx(1.0, abs=1e-12)


def test_fig5_not_perfect():
    tr = fermion_trace(fig5(), 20.0, 4001)
    assert tr.f_star < 0.99


def test_fig7b_perfect():
    tr = fermion_trace(fig7b(0.8, 0.5), 4.0, 2001)
    assert tr.f_star == pytest.approx(1.0, abs=1e-9)


def test_long_pst_chain():
    tr = fermion_trace(pst_chain(64), 2.0, 2001)
    assert tr.f_star == pytest.approx(1.0, abs=1e-9)
    assert tr.t_star == pytest.approx(math.pi / 2, abs=1e-6)


def test_unitary(rng):
    sp = SingleParticle(hopping_matrix(random_connected(rng, 9)))
    u = sp.propagator(2.3)
    assert np.max(np.abs(u.conj().T @ u - np.eye(9))) < 1e-12


def test_scale_invariance(rng):
    net = random_connected(rng, 6)
    c = 2.7
    scaled = SpinNetwork(net.n, net.ends, tuple((i, j, c * w) for i, j, w in net.edges))
    ts = rng.uniform(0, 5, size=20)
    assert np.max(np.abs(fermion_fidelities(net, ts) - fermion_fidelities(scaled, ts / c))) < 1e-12


def test_matches_dense(rng):
    worst = 0.0
    for _ in range(15):
        net = random_connected(rng, int(rng.integers(2, 8)))
        for t in rng.uniform(0, 6, size=4):
            worst = max(worst, abs(transport_fidelity(net, "mxy", t) - fermion_fidelity(net, t)))
    assert worst < 1e-9
