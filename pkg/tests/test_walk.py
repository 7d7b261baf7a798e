import numpy as np
import pytest

from conftest import random_connected
from spinet.errors import CapacityError, ContractError
from spinet.hilbert import transport_fidelity
from spinet.library import fig3, fig5, lambda3
from spinet.network import SpinNetwork, hamiltonian, pst_chain
from spinet.pauli import OperatorExpr, PauliString, flip_flop, z_string
from spinet.walk import (
    extract_A,
    extraction_residual,
    moments,
    skeleton,
    table1_check,
    walk_operators,
)


def first_order_reaching(ws, target):
    for w in ws:
        if any(j == target for _, j in skeleton(w).pairs()):
            return w.order
    return None


class TestExtraction:
    @pytest.mark.parametrize("kind", ["xy", "dq", "mxy"])
    def test_residual_zero(self, kind, rng):
        h = hamiltonian(random_connected(rng, 5), kind)
        assert extraction_residual(h) < 1e-12

    def test_a_only_touches_source(self):
        a = extract_A(hamiltonian(fig5(), "xy"))
        assert skeleton(a).pairs() == {(1, 2), (1, 4)}

    def test_a_is_anticommuting_part_times_two(self):
        h = hamiltonian(fig3(), "mxy")
        zs = z_string(5, [1])
        anti = 0.5 * (h - zs * h * zs)
        assert extract_A(h).isclose(2 * anti, 1e-14)

    def test_source_free_hamiltonian(self):
        net = SpinNetwork(4, (1, 4), ((2, 3, 1.0), (3, 4, 1.0)))
        assert not extract_A(hamiltonian(net, "xy"))


class TestTable:
    @pytest.mark.parametrize("kind", ["xy", "mxy"])
    def test_all_orders(self, kind):
        rep = table1_check(fig5(), kind)
        assert rep.ok, rep.render()
        for o in rep.orders:
            assert o.scalar.real == pytest.approx(2.0, abs=1e-12)

    def test_first_order_xy(self):
        n = 6
        c1 = walk_operators(hamiltonian(fig5(), "xy"), 1)[1].expr
        expected = z_string(n, [2]) * flip_flop(1, 3, -1, n) + z_string(n, [4]) * flip_flop(1, 5, -1, n)
        assert c1.isclose(2 * expected, 1e-13)

    def test_mismatch_reported(self):
        other = fig5()
        tweaked = SpinNetwork(6, (1, 6), tuple((i, j, 1.5 if (i, j) == (3, 6) else w) for i, j, w in other.edges))
        rep = table1_check(tweaked, "xy")
        assert not rep.ok
        assert "MISMATCH" in rep.render()

    def test_wrong_network(self):
        with pytest.raises(ContractError):
            table1_check(fig3(), "xy")
        with pytest.raises(ContractError):
            table1_check(fig5(), "dq")


class TestSkeleton:
    @pytest.mark.parametrize("kind", ["xy", "mxy"])
    def test_growth_bounded_by_distance(self, kind):
        net = fig5()
        dist = net.distances()
        for w in walk_operators(hamiltonian(net, kind), 8):
            for i, j in skeleton(w).pairs():
                assert max(dist[i], dist[j]) <= w.order + 1

    @pytest.mark.parametrize("net", [fig5(), fig3(), pst_chain(5)])
    def test_parity_alternates(self, net):
        for w in walk_operators(hamiltonian(net, "mxy"), 7):
            sk = skeleton(w)
            if len(sk):
                assert sk.signs() == ({"+"} if w.order % 2 == 0 else {"-"})

    @pytest.mark.parametrize("kind", ["xy", "mxy"])
    def test_period_two(self, kind):
        sks = [skeleton(w) for w in walk_operators(hamiltonian(fig5(), kind), 8)]
        for k in range(3, 7):
            assert sks[k] == sks[k + 2]

    def test_render(self):
        w = walk_operators(hamiltonian(lambda3(), "xy"), 2)
        assert [skeleton(x).render() for x in w] == ["1-2+", "1-3-", "1-2+ 2-3+"]

    def test_path_interference_witness(self):
        # two routes into T_16 carry different Z dressings under XY and merge under MXY
        n = 6
        xy = walk_operators(hamiltonian(fig5(), "xy"), 2)[2].expr
        via_upper = z_string(n, [2, 3]) * flip_flop(1, 6, 1, n)
        via_lower = z_string(n, [4, 5]) * flip_flop(1, 6, 1, n)
        assert not via_upper.isclose(via_lower, 1e-12)
        for part in (via_upper, via_lower):
            for key, c in part.terms.items():
                assert abs(xy.terms.get(key, 0) - 2 * c) < 1e-12
        mxy = walk_operators(hamiltonian(fig5(), "mxy"), 2)[2].expr
        dressed = [s for s, _ in mxy.strings() if s.letter(1) in "XY" and s.letter(6) in "XY"]
        # the merged term appears once per Pauli string with a doubled weight
        assert dressed and all(abs(abs(mxy.terms[s.key]) - 2.0) < 1e-12 for s in dressed)


class TestMoments:
    def test_lambda3_values(self):
        m = moments(hamiltonian(lambda3(), "xy"), 12)
        assert np.allclose(m.moments.real[:9], [0, 0, 0, 0, 1.5, 0, 7.5, 0, 31.5], atol=1e-12)
        assert np.max(np.abs(m.moments.imag)) == 0.0

    def test_lambda3_closed_form(self):
        # single-excitation amplitude (1 - cos t) / 2 at the far end
        m = moments(hamiltonian(lambda3(), "xy"), 12)
        ts = np.linspace(0, 0.5, 11)
        exact = ((1 - np.cos(ts)) / 2) ** 2
        assert np.max(np.abs(m.series(ts).real - exact)) < 1e-10

    @pytest.mark.parametrize("kind", ["xy", "mxy"])
    def test_fig5_matches_dense(self, kind):
        net = fig5()
        m = moments(hamiltonian(net, kind), 12)
        ts = np.linspace(0, 0.5, 21)
        ref = np.array([transport_fidelity(net, kind, t) for t in ts])
        assert np.max(np.abs(m.series(ts).real - ref)) < 1e-6

    def test_fig5_first_moment(self):
        m = moments(hamiltonian(fig5(), "mxy"), 6)
        assert np.all(m.moments[:6] == 0)
        assert m.moments[6].real == pytest.approx(-80.0, abs=1e-10)

    @pytest.mark.parametrize("net", [lambda3(), fig5(), pst_chain(4)])
    def test_first_nonzero_order(self, net):
        h = hamiltonian(net, "mxy")
        k1 = first_order_reaching(walk_operators(h, 6), net.n)
        m = moments(h, 2 * k1 + 2)
        nz = [k for k, v in enumerate(m.moments) if abs(v) > 1e-12]
        assert nz[0] == 2 * k1 + 2

    def test_walk_route_checked(self, rng):
        h = hamiltonian(random_connected(rng, 4), "xy")
        m = moments(h, 6, check=True)
        assert m.n_max == 6 and len(m.multipliers) == 7

    def test_superoperator_route(self, rng):
        # C_n = [H_L, C_{n-1}] with C_0 = S acts as X -> M_n Z_s X Z_t
        n = 4
        h = hamiltonian(random_connected(rng, n), "xy")
        zs, zt = z_string(n, [1]), z_string(n, [n])

        def c(k, x):
            if k == 0:
                return zs * x * zt
            return h * c(k - 1, x) - c(k - 1, h * x)

        m = moments(h, 4)
        x = OperatorExpr.from_string(PauliString.parse(n, "X2 Y3"))
        for k in range(5):
            assert c(k, x).isclose(m.multipliers[k] * zs * x * zt, 1e-10)

    def test_empty(self):
        m = moments(OperatorExpr(3, {}), 4)
        assert np.all(m.moments == 0)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            walk_operators(hamiltonian(fig5(), "xy"), 6, term_bound=20)
        with pytest.raises(CapacityError):
            moments(hamiltonian(fig5(), "xy"), 6, term_bound=20)
        assert len(walk_operators(hamiltonian(fig5(), "xy"), 6, term_bound=36)) == 7

    def test_negative_order(self):
        with pytest.raises(ContractError):
            walk_operators(hamiltonian(lambda3(), "xy"), -1)
