"""Collapsing weighted networks onto chains and synthesizing them from chains.

Under the modified XY Hamiltonian transport is a single-particle walk on
the hopping matrix ``A``.  Given ordered classes ``C_0 .. C_m`` with edges
only between neighbouring classes, let ``B_i`` be the block of ``A`` between
``C_i`` and ``C_{i+1}``.  If unit vectors ``u^(i)`` satisfy

    B_i^T u^(i) = a_{i+1} u^(i+1)   and   B_i u^(i+1) = a_{i+1} u^(i),

the span of the ``u^(i)`` is invariant under ``A`` and the source-target
amplitude is that of the chain with couplings ``a_1 .. a_m``.  Collapse
checks these conditions on a given network; synthesis solves them for the
edge weights of a chosen support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import CollapseError, ContractError, SynthesisError
from .fermion import default_samples, default_t_max, fermion_fidelities, fermion_trace, hopping_matrix
from .network import SpinNetwork, chain, pst_couplings
from .pauli import OperatorExpr, modified_flip_flop

BACK_TOL = 1e-10


def collapsed_op(
    I: Sequence[int],
    J: Sequence[int],
    weights,
    sign: int = +1,
    n: int | None = None,
) -> OperatorExpr:
    """Normalized weighted sum of modified flip-flops between two node sets.

    ``weights`` is a ``len(I) x len(J)`` array or a mapping ``(a, b) -> w``;
    the result is ``sum w_ab T~_ab / sqrt(sum w_ab^2)``.
    """
    I, J = list(I), list(J)
    if set(I) & set(J):
        raise ContractError("collapsed operator needs disjoint node sets")
    if n is None:
        n = max(I + J)
    if isinstance(weights, Mapping):
        pairs = {(int(a), int(b)): float(w) for (a, b), w in weights.items()}
        for a, b in pairs:
            if a not in I or b not in J:
                raise ContractError(f"weight given for pair ({a}, {b}) outside the two sets")
    else:
        w = np.asarray(weights, dtype=float).reshape(len(I), len(J))
        pairs = {(a, b): float(w[x, y]) for x, a in enumerate(I) for y, b in enumerate(J)}
    norm = math.sqrt(sum(v * v for v in pairs.values()))
    if norm == 0.0:
        raise ContractError("collapsed operator with all-zero weights")
    out = OperatorExpr(n)
    for (a, b), v in pairs.items():
        if v != 0.0:
            out = out + (v / norm) * modified_flip_flop(a, b, sign, n)
    return out


# ---------------------------------------------------------------- collapse


@dataclass(frozen=True)
class ClassChain:
    classes: tuple[tuple[int, ...], ...]
    weights: tuple[np.ndarray, ...]
    couplings: tuple[float, ...]
    residuals: tuple[float, ...]

    def chain(self) -> SpinNetwork:
        return chain(self.couplings)


def _class_list(net: SpinNetwork, partition) -> list[tuple[int, ...]]:
    if partition is None:
        if net.partition is None:
            raise ContractError("network has no partition; pass one explicitly")
        return [tuple(c.nodes) for c in net.partition]
    classes = [tuple(int(v) for v in c) for c in partition]
    net.with_partition(classes)  # validates coverage and end classes
    return classes


def collapse_network(net: SpinNetwork, partition=None, tol: float = BACK_TOL) -> ClassChain:
    """Reduce ``net`` to an effective chain along an ordered partition."""
    classes = _class_list(net, partition)
    where = {v: k for k, cls in enumerate(classes) for v in cls}
    for i, j, _ in net.edges:
        if abs(where[i] - where[j]) != 1:
            raise CollapseError(
                f"edge ({i}, {j}) joins classes {where[i]} and {where[j]}; only neighbouring classes may be coupled",
                pair=(where[i], where[j]),
            )
    a = hopping_matrix(net)
    u = np.ones(1)
    weights, couplings, residuals = [u], [], []
    for k in range(len(classes) - 1):
        rows = [v - 1 for v in classes[k]]
        cols = [v - 1 for v in classes[k + 1]]
        b = a[np.ix_(rows, cols)]
        fwd = b.T @ u
        alpha = float(np.linalg.norm(fwd))
        if alpha == 0.0:
            raise CollapseError(f"no coupling carries weight from class {k} to class {k + 1}", pair=(k, k + 1), residual=0.0)
        nxt = fwd / alpha
        res = float(np.linalg.norm(b @ nxt - alpha * u))
        if res > tol:
            raise CollapseError(
                f"back-condition fails between classes {k} and {k + 1} (residual {res:.3g})",
                pair=(k, k + 1),
                residual=res,
            )
        weights.append(nxt)
        couplings.append(alpha)
        residuals.append(res)
        u = nxt
    return ClassChain(tuple(classes), tuple(weights), tuple(couplings), tuple(residuals))


# --------------------------------------------------------------- synthesis


@dataclass(frozen=True)
class BranchPlan:
    """Node classes, their weight vectors and the allowed edges between them."""

    classes: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[float, ...], ...]
    support: frozenset[tuple[int, int]]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.weights) != len(self.classes):
            raise ContractError("need one weight vector per class")
        for cls, w in zip(self.classes, self.weights):
            if len(cls) != len(w):
                raise ContractError(f"class {cls} has {len(cls)} nodes but {len(w)} weights")
            if any(not (x > 0 and math.isfinite(x)) for x in w):
                raise SynthesisError(f"class {cls} needs positive finite weights, got {tuple(w)}")
        canon = frozenset((min(i, j), max(i, j)) for i, j in self.support)
        object.__setattr__(self, "support", canon)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"c{k}" for k in range(len(self.classes))))

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.classes)

    def unit_weights(self) -> list[np.ndarray]:
        return [np.asarray(w, float) / np.linalg.norm(w) for w in self.weights]

    def render(self) -> str:
        lines = []
        for name, cls, w in zip(self.names, self.classes, self.weights):
            lines.append(f"class {name} " + " ".join(map(str, cls)))
            lines.append(f"weights {name} " + " ".join(f"{x!r}" for x in w))
        for i, j in sorted(self.support):
            lines.append(f"edge {i} {j}")
        return "\n".join(lines)


def path_plan(sizes: Sequence[int], weights: Sequence[Sequence[float]] | None = None) -> BranchPlan:
    """Parallel disjoint paths: each class holds one node per path.

    Classes of size 1 fan out to (or in from) every node of the
    neighbouring class; equal-size neighbours are joined path by path.
    """
    sizes = [int(s) for s in sizes]
    if sizes[0] != 1 or sizes[-1] != 1 or min(sizes) < 1:
        raise ContractError("end classes must hold a single node and every class at least one")
    classes, nxt = [], 1
    for s in sizes:
        classes.append(tuple(range(nxt, nxt + s)))
        nxt += s
    support = set()
    for a, b in zip(classes, classes[1:]):
        if len(a) == 1 or len(b) == 1:
            support |= {(x, y) for x in a for y in b}
        elif len(a) == len(b):
            support |= set(zip(a, b))
        else:
            raise ContractError(f"cannot join classes of sizes {len(a)} and {len(b)} path by path")
    if weights is None:
        weights = [[1.0] * s for s in sizes]
    return BranchPlan(tuple(classes), tuple(tuple(float(x) for x in w) for w in weights), frozenset(support))


def _solve_block(b_nodes, c_nodes, u, v, alpha, support) -> dict[tuple[int, int], float]:
    """Min-norm edge weights with ``B v = alpha u`` and ``B^T u = alpha v`` on the support."""
    edges = [(x, y) for x in b_nodes for y in c_nodes if (min(x, y), max(x, y)) in support]
    if not edges:
        raise SynthesisError(f"no supported edge between classes {b_nodes} and {c_nodes}")
    rows = len(b_nodes) + len(c_nodes)
    m = np.zeros((rows, len(edges)))
    rhs = np.concatenate([alpha * u, alpha * v])
    ri = {x: k for k, x in enumerate(b_nodes)}
    ci = {y: len(b_nodes) + k for k, y in enumerate(c_nodes)}
    for e, (x, y) in enumerate(edges):
        m[ri[x], e] = v[ci[y] - len(b_nodes)]
        m[ci[y], e] = u[ri[x]]
    sol, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    res = float(np.linalg.norm(m @ sol - rhs))
    if res > 1e-10:
        raise SynthesisError(
            f"support between {b_nodes} and {c_nodes} cannot meet both weight conditions (residual {res:.3g})"
        )
    scale = max(abs(alpha), 1.0)
    for (x, y), w in zip(edges, sol):
        if abs(w) < 1e-12 * scale:
            raise SynthesisError(f"edge ({x}, {y}) would need zero coupling; drop it from the support")
    return {(x, y): float(w) for (x, y), w in zip(edges, sol)}


@dataclass(frozen=True)
class EngineeredNetwork:
    network: SpinNetwork
    couplings: tuple[float, ...]
    plan: BranchPlan
    params: Mapping[str, float] = field(default_factory=dict)
    collapse: ClassChain | None = None

    def header(self) -> list[str]:
        """Provenance lines for the network file."""
        lines = ["engineered network (modified XY)"]
        lines.append("chain " + " ".join(f"{a!r}" for a in self.couplings))
        if self.params:
            lines.append("params " + " ".join(f"{k}={v!r}" for k, v in self.params.items()))
        lines.extend(self.plan.render().splitlines())
        return lines


def expand_chain(
    couplings: Sequence[float],
    plan: BranchPlan,
    params: Mapping[str, float] | None = None,
    verify_points: int = 1000,
) -> EngineeredNetwork:
    """Build a network whose modified-XY transport equals that of ``chain(couplings)``.

    Edge weights on each class pair are the least-norm solution of the two
    weight conditions restricted to the plan's support.  The result is
    collapsed again and its fidelity compared with the chain's before it
    is returned.
    """
    couplings = tuple(float(a) for a in couplings)
    if len(couplings) != len(plan.classes) - 1:
        raise SynthesisError(f"chain has {len(couplings)} bonds but the plan has {len(plan.classes)} classes")
    if any(a <= 0 or not math.isfinite(a) for a in couplings):
        raise SynthesisError("chain couplings must be positive")
    if len(plan.classes[0]) != 1 or len(plan.classes[-1]) != 1:
        raise SynthesisError("end classes must hold a single node")
    n = plan.n
    if sorted(v for c in plan.classes for v in c) != list(range(1, n + 1)):
        raise SynthesisError("plan classes must cover nodes 1..n exactly once")
    where = {v: k for k, c in enumerate(plan.classes) for v in c}
    for i, j in plan.support:
        if abs(where[i] - where[j]) != 1:
            raise SynthesisError(f"supported edge ({i}, {j}) does not join neighbouring classes")

    u = plan.unit_weights()
    edges = {}
    for k, alpha in enumerate(couplings):
        edges.update(_solve_block(plan.classes[k], plan.classes[k + 1], u[k], u[k + 1], alpha, plan.support))
    net = SpinNetwork(
        n,
        (plan.classes[0][0], plan.classes[-1][0]),
        tuple((i, j, w) for (i, j), w in edges.items()),
    ).with_partition(plan.classes, plan.names)

    try:
        collapsed = collapse_network(net)
    except CollapseError as exc:
        raise SynthesisError(f"synthesized network does not collapse: {exc}") from None
    if max(abs(a - b) for a, b in zip(collapsed.couplings, couplings)) > 1e-12 * max(couplings):
        raise SynthesisError("synthesized network collapses onto a different chain")
    ref = chain(couplings)
    t_max = default_t_max(ref)
    times = np.linspace(0.0, t_max, verify_points)
    gap = float(np.max(np.abs(fermion_fidelities(net, times) - fermion_fidelities(ref, times))))
    if gap > 1e-9:
        raise SynthesisError(f"synthesized network departs from the chain fidelity by {gap:.3g}")
    return EngineeredNetwork(net, couplings, plan, dict(params or {}), collapsed)


# ----------------------------------------------------------- verification


@dataclass(frozen=True)
class TransportVerdict:
    t_mxy: float
    f_mxy: float
    t_xy: float | None = None
    f_xy: float | None = None

    def render(self) -> str:
        lines = [f"mxy_t_star: {self.t_mxy:.12g}", f"mxy_f_star: {self.f_mxy:.12g}"]
        if self.t_xy is not None:
            lines += [f"xy_t_star: {self.t_xy:.12g}", f"xy_f_star: {self.f_xy:.12g}"]
        return "\n".join(lines)


def verify_perfect_transport(
    net: SpinNetwork,
    t_max: float | None = None,
    samples: int | None = None,
    with_xy: bool = True,
) -> TransportVerdict:
    """Refined peak under modified XY and, for small networks, under plain XY."""
    from .hilbert import dense_cap, fidelity_trace

    t_max = default_t_max(net) if t_max is None else t_max
    samples = default_samples(net, t_max) if samples is None else samples
    mxy = fermion_trace(net, t_max, samples)
    if with_xy and net.n <= dense_cap():
        xy = fidelity_trace(net, "xy", t_max, samples)
        return TransportVerdict(mxy.t_star, mxy.f_star, xy.t_star, xy.f_star)
    return TransportVerdict(mxy.t_star, mxy.f_star)


# -------------------------------------------------------------- plan files


def parse_plan(text: str) -> tuple[tuple[float, ...] | None, BranchPlan]:
    """Read a synthesis plan; the chain is ``None`` when the file names none.

    Directives: ``chain <a1> <a2> ...`` or ``pst <m> [scale]``;
    ``class <name> <nodes...>`` (in order); ``weights <name> <w...>``
    (defaults to uniform); ``edge <i> <j>``; ``complete <name1> <name2>``.
    """
    from .errors import NetworkParseError

    couplings = None
    classes: dict[str, tuple[int, ...]] = {}
    weights: dict[str, tuple[float, ...]] = {}
    support: set[tuple[int, int]] = set()
    complete: list[tuple[str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        try:
            if head == "chain":
                couplings = tuple(float(a) for a in args)
                if not couplings:
                    raise ValueError
            elif head == "pst":
                m = int(args[0])
                scale = float(args[1]) if len(args) > 1 else 1.0
                couplings = pst_couplings(m, scale)
            elif head == "class":
                if args[0] in classes:
                    raise NetworkParseError(f"class {args[0]!r} declared twice", lineno)
                classes[args[0]] = tuple(int(a) for a in args[1:])
                if not classes[args[0]]:
                    raise ValueError
            elif head == "weights":
                if args[0] not in classes:
                    raise NetworkParseError(f"weights for undeclared class {args[0]!r}", lineno)
                weights[args[0]] = tuple(float(a) for a in args[1:])
            elif head == "edge":
                i, j = (int(a) for a in args)
                support.add((min(i, j), max(i, j)))
            elif head == "complete":
                a, b = args
                complete.append((a, b, lineno))
            else:
                raise NetworkParseError(f"unknown directive {head!r}", lineno)
        except (ValueError, IndexError, ContractError):
            raise NetworkParseError(f"malformed '{head}' directive: {raw.strip()!r}", lineno) from None
    if not classes:
        raise NetworkParseError("plan declares no classes")
    for a, b, lineno in complete:
        if a not in classes or b not in classes:
            raise NetworkParseError("'complete' names an undeclared class", lineno)
        support |= {(min(x, y), max(x, y)) for x in classes[a] for y in classes[b]}
    names = tuple(classes)
    plan = BranchPlan(
        tuple(classes[nm] for nm in names),
        tuple(weights.get(nm, (1.0,) * len(classes[nm])) for nm in names),
        frozenset(support),
        names,
    )
    return couplings, plan
