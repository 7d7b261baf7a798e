"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 a check ran and failed, 3 a size
bound was exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .conditions import check_perfect_transport, hamiltonian_support_check
from .engineering import collapse_network, expand_chain, parse_plan, verify_perfect_transport
from .errors import CapacityError, CollapseError, ContractError, DimensionError, SpinetError, SynthesisError
from .fermion import default_samples, default_t_max, fermion_trace
from .hilbert import fidelity_trace, network_propagator
from .library import NAMES, parse_library_spec
from .network import HamiltonianKind, SpinNetwork, hamiltonian, parse_network, serialize_network
from .walk import skeleton, table1_check, walk_operators

EXIT_OK, EXIT_INPUT, EXIT_FAILED, EXIT_CAPACITY = 0, 1, 2, 3


def load_network(spec: str) -> SpinNetwork:
    """A network file path, or a library name such as ``fig7b:0.8,0.5``."""
    path = Path(spec)
    if path.is_file():
        return parse_network(path.read_text(encoding="utf-8"))
    if spec.partition(":")[0] in NAMES:
        return parse_library_spec(spec)
    raise ContractError(f"{spec!r} is neither a readable file nor a library network ({', '.join(NAMES)})")


def parse_partition(text: str) -> list[list[int]]:
    """``"1|2,4|3,5|6"`` -> ``[[1], [2, 4], [3, 5], [6]]``."""
    try:
        return [[int(v) for v in part.split(",")] for part in text.split("|")]
    except ValueError:
        raise ContractError(f"bad partition {text!r}; expected e.g. 1|2,4|3,5|6") from None


def _write(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _trace(net: SpinNetwork, kind: HamiltonianKind, backend: str, t_max: float, samples: int):
    if backend == "auto":
        backend = "fermion" if kind is HamiltonianKind.MXY else "dense"
    if backend == "fermion":
        if kind is not HamiltonianKind.MXY:
            raise ContractError(
                "the fermion backend only applies to the modified XY Hamiltonian; use --backend dense"
            )
        return fermion_trace(net, t_max, samples)
    return fidelity_trace(net, kind, t_max, samples)


# ---------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    net = load_network(args.network)
    kind = HamiltonianKind.parse(args.kind)
    t_max = args.tmax if args.tmax is not None else default_t_max(net)
    samples = args.samples if args.samples is not None else default_samples(net, t_max)
    tr = _trace(net, kind, args.backend, t_max, samples)
    if args.out:
        _write(args.out, tr.csv_text(net.alpha_ref))
    print(f"t_star: {tr.t_star:.10f}")
    print(f"f_star: {tr.f_star:.9f}")
    print(f"alpha_ref: {net.alpha_ref:.10g}")
    print(f"normalized_t_star: {net.alpha_ref * tr.t_star:.10f}")
    return EXIT_OK


def cmd_check_unitary(args) -> int:
    net = load_network(args.network)
    u = network_propagator(net, args.kind, args.time)
    report = check_perfect_transport(u, net.ends)
    print(report.render())
    return EXIT_OK if report.verdict else EXIT_FAILED


def cmd_check_hamiltonian(args) -> int:
    net = load_network(args.network)
    report = hamiltonian_support_check(hamiltonian(net, args.kind), net.ends)
    print(report.render())
    return EXIT_OK


def cmd_walk(args) -> int:
    net = load_network(args.network)
    ops = walk_operators(hamiltonian(net, args.kind), args.orders, net.ends)
    lines = []
    for w in ops:
        if not w.expr:
            continue
        lines.append(f"# order {w.order}")
        if not args.skeleton_only:
            lines.append(w.expr.render())
        lines.append(f"skeleton: {skeleton(w).render()}")
    if lines:
        print("\n".join(lines))
    return EXIT_OK


def cmd_collapse(args) -> int:
    net = load_network(args.network)
    part = parse_partition(args.partition) if args.partition else None
    cc = collapse_network(net, part)
    print("couplings: " + ", ".join(f"{a:.12g}" for a in cc.couplings))
    for cls, w in zip(cc.classes, cc.weights):
        nodes = ",".join(map(str, cls))
        print(f"class {nodes}: " + " ".join(f"{x:.12g}" for x in w))
    print("max_back_residual: " + f"{max(cc.residuals, default=0.0):.3e}")
    return EXIT_OK


def cmd_synth(args) -> int:
    couplings, plan = parse_plan(Path(args.plan).read_text(encoding="utf-8"))
    if args.chain:
        try:
            couplings = tuple(float(a) for a in args.chain.split(","))
        except ValueError:
            raise ContractError(f"bad chain {args.chain!r}; expected comma-separated couplings") from None
    if couplings is None:
        raise ContractError("no chain given: pass --chain or put a 'chain' line in the plan")
    eng = expand_chain(couplings, plan)
    _write(args.out, serialize_network(eng.network, eng.header()))
    v = verify_perfect_transport(eng.network, with_xy=False)
    print("collapsed_couplings: " + ", ".join(f"{a:.12g}" for a in eng.collapse.couplings), file=sys.stderr)
    print(f"mxy_f_star: {v.f_mxy:.9f} at t_star: {v.t_mxy:.10f}", file=sys.stderr)
    return EXIT_OK


def cmd_demo(args) -> int:
    """Regenerate the figure traces and the walk-operator table comparison."""
    from .library import fig3, fig5, fig7b

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [
        ("fig3_xy.csv", fig3(), HamiltonianKind.XY, 4 * math.pi),
        ("fig3_mxy.csv", fig3(), HamiltonianKind.MXY, 4 * math.pi),
        ("fig7c_xy.csv", fig7b(0.8, 0.5), HamiltonianKind.XY, 4 * math.pi),
        ("fig7c_mxy.csv", fig7b(0.8, 0.5), HamiltonianKind.MXY, 4 * math.pi),
    ]
    for name, net, kind, t_max in jobs:
        tr = fidelity_trace(net, kind, t_max, args.samples)
        (out / name).write_text(tr.csv_text(net.alpha_ref), encoding="utf-8")
        print(f"{name}: f_star={tr.f_star:.9f} t_star={tr.t_star:.10f}")
    for kind in ("xy", "mxy"):
        report = table1_check(fig5(), kind)
        (out / f"table1_{kind}.txt").write_text(report.render() + "\n", encoding="utf-8")
        print(f"table1_{kind}.txt: {'match' if report.ok else 'MISMATCH'}")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinet", description="Mixed-state polarization transport on spin networks.")
    sub = p.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in HamiltonianKind]
    net_help = "network file, or library name such as fig3 or fig7b:0.8,0.5"

    s = sub.add_parser("simulate", help="fidelity trace and refined peak")
    s.add_argument("--network", required=True, help=net_help)
    s.add_argument("--kind", choices=kinds, default="xy")
    s.add_argument("--backend", choices=["dense", "fermion", "auto"], default="auto")
    s.add_argument("--tmax", type=float)
    s.add_argument("--samples", type=int)
    s.add_argument("--out", help="CSV output path ('-' for stdout)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("check-unitary", help="perfect-transport conditions on exp(-iHt)")
    s.add_argument("--network", required=True, help=net_help)
    s.add_argument("--kind", choices=kinds, default="xy")
    s.add_argument("--time", type=float, required=True)
    s.set_defaults(func=cmd_check_unitary)

    s = sub.add_parser("check-hamiltonian", help="support of H relative to the target spin")
    s.add_argument("--network", required=True, help=net_help)
    s.add_argument("--kind", choices=kinds, default="xy")
    s.set_defaults(func=cmd_check_hamiltonian)

    s = sub.add_parser("walk", help="nested walk operators and their edge skeletons")
    s.add_argument("--network", required=True, help=net_help)
    s.add_argument("--kind", choices=kinds, default="xy")
    s.add_argument("--orders", type=int, default=4, help="highest order to compute")
    s.add_argument("--skeleton-only", action="store_true")
    s.set_defaults(func=cmd_walk)

    s = sub.add_parser("collapse", help="reduce a network to its effective chain")
    s.add_argument("--network", required=True, help=net_help)
    s.add_argument("--partition", help="ordered classes, e.g. 1|2,4|3,5|6 (default: the file's classes)")
    s.set_defaults(func=cmd_collapse)

    s = sub.add_parser("synth", help="engineer a network from a chain and a branching plan")
    s.add_argument("--plan", required=True)
    s.add_argument("--chain", help="comma-separated chain couplings (overrides the plan)")
    s.add_argument("--out", help="network output path (default stdout)")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("demo", help="regenerate the reference traces and table comparison")
    s.add_argument("--out-dir", default="demo_out")
    s.add_argument("--samples", type=int, default=2001)
    s.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (CollapseError, SynthesisError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (ContractError, DimensionError, SpinetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
