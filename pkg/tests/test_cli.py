import math

import pytest

from spinet.cli import load_network, main, parse_partition
from spinet.errors import ContractError
from spinet.library import fig7b
from spinet.network import parse_network

TWO_SPIN = "nodes 2\nends 1 2\nedge 1 2 1.0\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


class TestSimulate:
    def test_fig3_mxy(self, capsys):
        code, out, _ = run(capsys, "simulate", "--network", "fig3", "--kind", "mxy")
        f = fields(out)
        assert code == 0
        assert float(f["f_star"]) == pytest.approx(1.0, abs=1e-9)
        assert float(f["t_star"]) == pytest.approx(math.pi / math.sqrt(6), abs=1e-6)
        assert float(f["normalized_t_star"]) == pytest.approx(float(f["t_star"]) * float(f["alpha_ref"]))

    def test_fig3_xy(self, capsys):
        code, out, _ = run(capsys, "simulate", "--network", "fig3", "--kind", "xy", "--tmax", str(4 * math.pi))
        assert code == 0 and float(fields(out)["f_star"]) < 0.99

    def test_fermion_backend_needs_mxy(self, capsys):
        code, _, err = run(capsys, "simulate", "--network", "fig3", "--kind", "xy", "--backend", "fermion")
        assert code == 1 and "modified XY" in err

    def test_csv_out(self, capsys, tmp_path):
        path = tmp_path / "trace.csv"
        code, _, _ = run(capsys, "simulate", "--network", "lambda3", "--tmax", "3.2", "--samples", "33", "--out", str(path))
        lines = path.read_text().splitlines()
        assert code == 0 and lines[0].startswith("# alpha_ref=") and lines[1] == "t,fidelity"
        assert len(lines) == 35

    def test_backends_agree(self, capsys):
        _, a, _ = run(capsys, "simulate", "--network", "fig5", "--kind", "mxy", "--backend", "dense", "--tmax", "6")
        _, b, _ = run(capsys, "simulate", "--network", "fig5", "--kind", "mxy", "--backend", "fermion", "--tmax", "6")
        assert float(fields(a)["f_star"]) == pytest.approx(float(fields(b)["f_star"]), abs=1e-9)


class TestChecks:
    def test_lambda_at_pi(self, capsys):
        code, out, _ = run(capsys, "check-unitary", "--network", "lambda3", "--time", repr(math.pi))
        assert code == 0 and fields(out)["verdict"] == "true"

    def test_lambda_at_half_pi(self, capsys):
        code, out, _ = run(capsys, "check-unitary", "--network", "lambda3", "--time", repr(math.pi / 2))
        assert code == 2 and fields(out)["verdict"] == "false"

    def test_hamiltonian(self, capsys, tmp_path):
        path = tmp_path / "two.net"
        path.write_text(TWO_SPIN)
        code, out, _ = run(capsys, "check-hamiltonian", "--network", str(path))
        f = fields(out)
        assert code == 0
        assert f["support"] == "Gt" and f["conditions_hold"] == "true"
        assert float(f["first_perfect_time"]) == pytest.approx(math.pi / 2, abs=1e-10)
        assert float(f["fidelity_at_quarter_pi"]) == pytest.approx(0.5, abs=1e-12)


class TestWalk:
    def test_skeleton_golden(self, capsys):
        code, out, _ = run(capsys, "walk", "--network", "fig5", "--orders", "3", "--skeleton-only")
        assert code == 0
        assert out == (
            "# order 0\nskeleton: 1-2+ 1-4+\n"
            "# order 1\nskeleton: 1-3- 1-5-\n"
            "# order 2\nskeleton: 1-2+ 1-4+ 1-6+ 2-3+ 2-5+ 3-4+ 4-5+\n"
            "# order 3\nskeleton: 1-3- 1-5- 2-6- 4-6-\n"
        )

    def test_full_render_round_trips(self, capsys):
        from spinet.network import hamiltonian
        from spinet.pauli import OperatorExpr
        from spinet.walk import walk_operators

        _, out, _ = run(capsys, "walk", "--network", "lambda3", "--orders", "1")
        blocks = out.split("# order ")[1:]
        ops = walk_operators(hamiltonian(load_network("lambda3"), "xy"), 1)
        for block, w in zip(blocks, ops):
            body = "\n".join(line for line in block.splitlines()[1:] if not line.startswith("skeleton"))
            assert OperatorExpr.parse(3, body).isclose(w.expr, 1e-15)

    def test_edgeless(self, capsys, tmp_path):
        path = tmp_path / "empty.net"
        path.write_text("nodes 3\nends 1 3\n")
        code, out, _ = run(capsys, "walk", "--network", str(path))
        assert code == 0 and out == ""


class TestCollapse:
    def test_fig5(self, capsys):
        code, out, _ = run(capsys, "collapse", "--network", "fig5")
        couplings = [float(x) for x in fields(out)["couplings"].split(",")]
        assert code == 0 and couplings == pytest.approx([math.sqrt(2), 1.0, math.sqrt(2)])

    def test_explicit_partition(self, capsys):
        code, out, _ = run(capsys, "collapse", "--network", "fig3", "--partition", "1|2,3,4|5")
        assert code == 0 and "class 2,3,4:" in out

    def test_missing_node(self, capsys):
        code, _, err = run(capsys, "collapse", "--network", "fig5", "--partition", "1|2,4|3|6")
        assert code == 1 and "5" in err

    def test_collapse_failure(self, capsys, tmp_path):
        path = tmp_path / "bad.net"
        path.write_text("nodes 4\nends 1 4\nedge 1 2 1\nedge 1 3 1\nedge 2 4 1\nedge 3 4 2\nclass a 1\nclass b 2 3\nclass c 4\n")
        code, _, err = run(capsys, "collapse", "--network", str(path))
        assert code == 2 and "back-condition" in err

    def test_unknown_network(self, capsys):
        code, _, err = run(capsys, "collapse", "--network", "nowhere.net")
        assert code == 1 and "library" in err


class TestSynth:
    def test_bundled_plan(self, capsys, tmp_path):
        from importlib import resources

        plan = tmp_path / "p.plan"
        plan.write_text(resources.files("spinet").joinpath("data", "fig7b.plan").read_text())
        out = tmp_path / "net.net"
        code, _, err = run(capsys, "synth", "--plan", str(plan), "--out", str(out))
        assert code == 0 and "mxy_f_star: 1.000000000" in err
        text = out.read_text()
        assert text.startswith("# engineered")
        net = parse_network(text)
        ref = fig7b(0.8, 0.5)
        assert all(abs(w - x) < 1e-12 for (_, _, w), (_, _, x) in zip(net.edges, ref.edges))

    def test_chain_override(self, capsys, tmp_path):
        plan = tmp_path / "p.plan"
        plan.write_text("class a 1\nclass b 2 3 4\nclass c 5\ncomplete a b\ncomplete b c\n")
        code, out, err = run(capsys, "synth", "--plan", str(plan), "--chain", "1.7320508,1.7320508")
        assert code == 0
        net = parse_network(out)
        assert net.n == 5 and len(net.edges) == 6
        assert "collapsed_couplings: 1.7320508, 1.7320508" in err

    def test_no_chain(self, capsys, tmp_path):
        plan = tmp_path / "p.plan"
        plan.write_text("class a 1\nclass b 2\ncomplete a b\n")
        code, _, err = run(capsys, "synth", "--plan", str(plan))
        assert code == 1 and "chain" in err

    def test_unsynthesizable(self, capsys, tmp_path):
        plan = tmp_path / "p.plan"
        plan.write_text("chain 1 1\nclass a 1\nclass b 2 3\nclass c 4\nweights b 1 2\nedge 1 2\nedge 1 3\nedge 2 4\n")
        code, _, err = run(capsys, "synth", "--plan", str(plan))
        assert code == 2 and "failed" in err


class TestDemo:
    def test_outputs(self, capsys, tmp_path):
        code, out, _ = run(capsys, "demo", "--out-dir", str(tmp_path), "--samples", "201")
        assert code == 0
        names = {"fig3_xy.csv", "fig3_mxy.csv", "fig7c_xy.csv", "fig7c_mxy.csv", "table1_xy.txt", "table1_mxy.txt"}
        assert names <= {p.name for p in tmp_path.iterdir()}
        assert "table1_xy.txt: match" in out and "table1_mxy.txt: match" in out

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(capsys, "demo", "--out-dir", str(a), "--samples", "101")
        run(capsys, "demo", "--out-dir", str(b), "--samples", "101")
        for p in a.iterdir():
            assert p.read_bytes() == (b / p.name).read_bytes()


class TestHelpers:
    def test_partition(self):
        assert parse_partition("1|2,4|3,5|6") == [[1], [2, 4], [3, 5], [6]]
        with pytest.raises(ContractError):
            parse_partition("1|a|3")

    def test_library_spec(self):
        assert load_network("fig7b:0.8,0.5") == fig7b(0.8, 0.5)

    def test_capacity_exit(self, capsys, monkeypatch):
        monkeypatch.setenv("SPINET_DENSE_CAP", "4")
        code, _, err = run(capsys, "check-unitary", "--network", "fig3", "--time", "1.0")
        assert code == 3 and "error" in err
