import math
from importlib import resources

import pytest

from spinet.errors import ContractError, NetworkParseError
from spinet.hilbert import transport_fidelity
from spinet.library import fig3, fig5, fig7a, fig7b, fig8, lambda3, library, parse_library_spec
from spinet.network import (
    SpinNetwork,
    chain,
    hamiltonian,
    parse_network,
    pst_chain,
    pst_couplings,
    serialize_network,
)
from spinet.pauli import flip_flop

LAMBDA_TEXT = """\
nodes 3
ends 1 3
edge 1 2 0.7071
edge 2 3 0.7071
"""


def data_text(name: str) -> str:
    return resources.files("spinet").joinpath("data", name).read_text(encoding="utf-8")


class TestParse:
    def test_lambda_file(self):
        net = parse_network(LAMBDA_TEXT)
        assert net.n == 3 and net.ends == (1, 3)
        assert net.edges == ((1, 2, 0.7071), (2, 3, 0.7071))

    @pytest.mark.parametrize(
        "text, line",
        [
            ("nodes 2\nends 1 2\nedge 1 1 1.0\n", 3),
            ("nodes 3\nends 1 3\nedge 1 2 1\nedge 2 1 1\n", 4),
            ("nodes 3\nends 1 3\nclass a 1 7\n", 3),
            ("nodes 3\nends 1 3\nedge 1 2 x\n", 3),
            ("nodes 3\nends 1 3\nbogus 1\n", 3),
        ],
    )
    def test_errors_carry_line(self, text, line):
        with pytest.raises(NetworkParseError) as info:
            parse_network(text)
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")

    def test_missing_ends(self):
        with pytest.raises(NetworkParseError, match="ends"):
            parse_network("nodes 3\nedge 1 2 1.0\n")

    def test_order_reorders_classes(self):
        text = "nodes 3\nends 1 3\nedge 1 2 1\nedge 2 3 1\nclass z 3\nclass a 1\nclass m 2\norder a m z\n"
        net = parse_network(text)
        assert [c.nodes for c in net.partition] == [(1,), (2,), (3,)]

    def test_bad_partition(self):
        with pytest.raises(NetworkParseError):
            parse_network("nodes 3\nends 1 3\nclass a 1\nclass b 3\n")

    def test_comments_and_blank_lines(self):
        net = parse_network("# header\n\nnodes 2 # two spins\nends 1 2\nedge 1 2 1.5\n")
        assert net.edges == ((1, 2, 1.5),)

    @pytest.mark.parametrize("name", ["lambda3", "fig3", "fig5", "fig7a", "fig7b", "fig8"])
    def test_bundled_round_trip(self, name):
        text = data_text(f"{name}.net")
        net = parse_network(text)
        body = "".join(line + "\n" for line in text.splitlines() if not line.startswith("#"))
        assert serialize_network(net) == body

    def test_bundled_files_match_library(self):
        assert parse_network(data_text("fig7b.net")) == fig7b(0.8, 0.5)
        assert parse_network(data_text("fig7a.net")) == fig7a(0.6)
        assert parse_network(data_text("fig8.net")) == fig8(0.6, 0.7)
        assert parse_network(data_text("fig5.net")) == fig5()

    def test_float_round_trip(self):
        net = SpinNetwork(2, (1, 2), ((1, 2, 1 / 3),))
        assert parse_network(serialize_network(net)).edges[0][2] == 1 / 3


class TestModel:
    def test_invalid(self):
        with pytest.raises(ContractError):
            SpinNetwork(3, (1, 1))
        with pytest.raises(ContractError):
            SpinNetwork(3, (1, 3), ((1, 2, 0.0),))
        with pytest.raises(ContractError):
            SpinNetwork(3, (1, 3), ((1, 2, math.nan),))
        with pytest.raises(ContractError):
            SpinNetwork(3, (1, 4))

    def test_edges_canonical(self):
        net = SpinNetwork(3, (1, 3), ((3, 2, 1.0), (2, 1, 2.0)))
        assert net.edges == ((1, 2, 2.0), (2, 3, 1.0))
        assert net.coupling(3, 2) == 1.0 and net.coupling(1, 3) == 0.0

    def test_lambda_hamiltonian(self):
        h = hamiltonian(lambda3(), "xy")
        r = 1 / math.sqrt(2)
        assert h.isclose(r * (flip_flop(1, 2, 1, 3) + flip_flop(2, 3, 1, 3)), 1e-15)

    def test_empty_hamiltonian(self):
        assert not hamiltonian(SpinNetwork(3, (1, 3)), "xy")

    @pytest.mark.parametrize("m", [2, 3, 5, 8])
    def test_chain_mxy_equals_xy(self, m):
        net = pst_chain(m)
        assert hamiltonian(net, "mxy") == hamiltonian(net, "xy")

    def test_hermitian(self):
        for kind in ("xy", "dq", "mxy"):
            h = hamiltonian(fig7b(), kind)
            assert h.adjoint() == h

    def test_pst_couplings(self):
        assert pst_couplings(4) == pytest.approx((math.sqrt(3), 2, math.sqrt(3)))
        assert pst_couplings(2) == (1.0,)
        with pytest.raises(ContractError):
            pst_couplings(1)

    def test_relabel_keeps_xy_fidelity(self, rng):
        net = fig5()
        mapping = {2: 4, 4: 2, 3: 5, 5: 3}
        other = net.relabel(mapping)
        for t in rng.uniform(0, 6, size=5):
            assert abs(transport_fidelity(net, "xy", t) - transport_fidelity(other, "xy", t)) < 1e-10

    def test_relabel_rejects_non_permutation(self):
        with pytest.raises(ContractError):
            fig5().relabel({2: 3})

    def test_distances(self):
        assert fig5().distances() == {1: 0, 2: 1, 4: 1, 3: 2, 5: 2, 6: 3}


class TestLibrary:
    def test_fig3(self):
        net = fig3()
        assert net.n == 5 and net.ends == (1, 5) and len(net.edges) == 6
        assert all(w == 1.0 for *_, w in net.edges)

    def test_fig5(self):
        pairs = {(i, j) for i, j, _ in fig5().edges}
        assert pairs == {(1, 2), (2, 3), (3, 6), (1, 4), (4, 5), (5, 6)}
        assert [c.nodes for c in fig5().partition] == [(1,), (2, 4), (3, 5), (6,)]

    def test_fig7b_partition(self):
        assert [c.nodes for c in fig7b().partition] == [(1,), (2, 5), (3, 4, 6), (7,)]

    def test_fig7a_couplings(self):
        g = 0.3
        s = math.sqrt(1 - g * g)
        w = {(i, j): a for i, j, a in fig7a(g).edges}
        r3 = math.sqrt(3)
        expected = {(1, 2): r3 * g, (1, 4): r3 * s, (2, 3): 2, (4, 5): 2, (3, 6): r3 * g, (5, 6): r3 * s}
        assert w.keys() == expected.keys()
        for k in expected:
            assert w[k] == pytest.approx(expected[k], abs=1e-12)

    def test_fig7a_single_path_limit(self):
        assert fig7a(1.0).edges == pst_chain(4).edges

    @pytest.mark.parametrize("bad", [0.0, -0.2, 1.5])
    def test_weight_range(self, bad):
        with pytest.raises(ContractError):
            fig7a(bad)
        with pytest.raises(ContractError):
            fig7b(bad, 0.5)

    def test_fig8_size(self):
        net = fig8()
        assert net.n == 14 and net.ends == (1, 14)

    def test_spec_strings(self):
        assert parse_library_spec("fig7b:0.8,0.5") == fig7b(0.8, 0.5)
        assert parse_library_spec("fig3") == fig3()
        with pytest.raises(ContractError):
            library("fig99")
        with pytest.raises(ContractError):
            parse_library_spec("fig7b:a,b")
        with pytest.raises(ContractError):
            library("fig3", [0.5])

    def test_chain_builder(self):
        net = chain([1.0, 2.0])
        assert net.n == 3 and net.edges == ((1, 2, 1.0), (2, 3, 2.0))
