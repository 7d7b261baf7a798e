"""Spin-network graphs, Hamiltonian assembly and the network file format.

File format (UTF-8, one directive per line, ``#`` starts a comment)::

    nodes 6
    ends 1 6
    edge 1 2 1.0
    class c0 1
    class c1 2 4
    order c0 c1 ...

``class`` and ``order`` are optional.  Without an ``order`` line the
classes are taken in declaration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import ContractError, NetworkParseError
from .pauli import HamiltonianKind, OperatorExpr, build_coupling

__all__ = [
    "HamiltonianKind",
    "NodeClass",
    "SpinNetwork",
    "hamiltonian",
    "parse_network",
    "pst_chain",
    "pst_couplings",
    "serialize_network",
    "chain",
]


@dataclass(frozen=True)
class NodeClass:
    name: str
    nodes: tuple[int, ...]


@dataclass(frozen=True)
class SpinNetwork:
    """Weighted spin network with a designated source and target node.

    ``edges`` is kept canonical: ``i < j`` and sorted by ``(i, j)``.
    Couplings are angular frequencies with hbar = 1 and stored as given.
    """

    n: int
    ends: tuple[int, int]
    edges: tuple[tuple[int, int, float], ...] = ()
    partition: tuple[NodeClass, ...] | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ContractError("a network needs at least two nodes")
        s, t = self.ends
        for v in (s, t):
            if not 1 <= v <= self.n:
                raise ContractError(f"end node {v} outside 1..{self.n}")
        if s == t:
            raise ContractError("source and target must differ")
        canon = {}
        for i, j, a in self.edges:
            i, j, a = int(i), int(j), float(a)
            if i == j:
                raise ContractError(f"self-loop on node {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ContractError(f"edge ({i}, {j}) references a node outside 1..{self.n}")
            if not math.isfinite(a) or a == 0.0:
                raise ContractError(f"edge ({i}, {j}) has invalid coupling {a!r}")
            key = (min(i, j), max(i, j))
            if key in canon:
                raise ContractError(f"duplicate edge {key}")
            canon[key] = a
        object.__setattr__(self, "edges", tuple((i, j, canon[(i, j)]) for i, j in sorted(canon)))
        if self.partition is not None:
            object.__setattr__(self, "partition", tuple(self.partition))
            _check_partition(self.n, self.ends, self.partition)

    @property
    def source(self) -> int:
        return self.ends[0]

    @property
    def target(self) -> int:
        return self.ends[1]

    @property
    def alpha_ref(self) -> float:
        """Largest coupling magnitude; used to report dimensionless time."""
        return max((abs(a) for _, _, a in self.edges), default=1.0)

    def coupling(self, i: int, j: int) -> float:
        i, j = min(i, j), max(i, j)
        for a, b, w in self.edges:
            if (a, b) == (i, j):
                return w
        return 0.0

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for i, j, _ in self.edges:
            if i == v:
                out.add(j)
            elif j == v:
                out.add(i)
        return out

    def distances(self, start: int | None = None) -> dict[int, int]:
        """Hop distance from ``start`` (default: source) to every reachable node."""
        start = self.source if start is None else start
        dist = {start: 0}
        frontier = [start]
        while frontier:
            nxt = []
            for v in frontier:
                for w in self.neighbors(v):
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        return dist

    def with_partition(self, classes: Sequence[Iterable[int]] | None, names: Sequence[str] | None = None) -> SpinNetwork:
        if classes is None:
            return SpinNetwork(self.n, self.ends, self.edges, None)
        names = list(names) if names is not None else [f"c{k}" for k in range(len(classes))]
        part = tuple(NodeClass(nm, tuple(int(v) for v in cls)) for nm, cls in zip(names, classes))
        return SpinNetwork(self.n, self.ends, self.edges, part)

    def relabel(self, mapping: Mapping[int, int]) -> SpinNetwork:
        """Apply a node permutation (nodes absent from ``mapping`` stay put)."""
        perm = {v: mapping.get(v, v) for v in range(1, self.n + 1)}
        if sorted(perm.values()) != list(range(1, self.n + 1)):
            raise ContractError("relabeling must be a permutation of the nodes")
        edges = tuple((perm[i], perm[j], a) for i, j, a in self.edges)
        part = None
        if self.partition is not None:
            part = tuple(NodeClass(c.name, tuple(perm[v] for v in c.nodes)) for c in self.partition)
        return SpinNetwork(self.n, (perm[self.source], perm[self.target]), edges, part)


def _check_partition(n: int, ends: tuple[int, int], partition: Sequence[NodeClass]) -> None:
    if len(partition) < 2:
        raise ContractError("a partition needs at least two classes")
    seen: set[int] = set()
    for c in partition:
        if not c.nodes:
            raise ContractError(f"class {c.name!r} is empty")
        for v in c.nodes:
            if not 1 <= v <= n:
                raise ContractError(f"class {c.name!r} references node {v} outside 1..{n}")
            if v in seen:
                raise ContractError(f"node {v} appears in more than one class")
            seen.add(v)
    if seen != set(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - seen)
        raise ContractError(f"partition does not cover nodes {missing}")
    if tuple(partition[0].nodes) != (ends[0],):
        raise ContractError("first class must be exactly the source node")
    if tuple(partition[-1].nodes) != (ends[1],):
        raise ContractError("last class must be exactly the target node")


def hamiltonian(net: SpinNetwork, kind: HamiltonianKind | str) -> OperatorExpr:
    """``sum_edges alpha_ij * H_ij`` with the coupling operator of ``kind``."""
    kind = HamiltonianKind.parse(kind)
    h = OperatorExpr(net.n)
    for i, j, a in net.edges:
        h = h + a * build_coupling(kind, i, j, +1, net.n)
    return h


def chain(couplings: Sequence[float]) -> SpinNetwork:
    """Nearest-neighbour chain ``1 - 2 - ... - m`` with the given couplings."""
    m = len(couplings) + 1
    return SpinNetwork(m, (1, m), tuple((k + 1, k + 2, float(a)) for k, a in enumerate(couplings)))


def pst_couplings(m: int, scale: float = 1.0) -> tuple[float, ...]:
    if m < 2:
        raise ContractError("a chain needs at least two nodes")
    return tuple(scale * math.sqrt(i * (m - i)) for i in range(1, m))


def pst_chain(m: int, scale: float = 1.0) -> SpinNetwork:
    """Mirror-symmetric chain with couplings ``scale * sqrt(i (m - i))``.

    Transfer is perfect at ``t = pi / (2 * scale)`` for every length.
    """
    return chain(pst_couplings(m, scale))


# ------------------------------------------------------------ file format


def parse_network(text: str) -> SpinNetwork:
    n = ends = None
    edges: list[tuple[int, int, float]] = []
    edge_lines: dict[tuple[int, int], int] = {}
    classes: dict[str, tuple[tuple[int, ...], int]] = {}
    order: tuple[list[str], int] | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        try:
            if head == "nodes":
                if n is not None:
                    raise NetworkParseError("repeated 'nodes' directive", lineno)
                (n,) = (int(a) for a in args)
            elif head == "ends":
                if ends is not None:
                    raise NetworkParseError("repeated 'ends' directive", lineno)
                s, t = (int(a) for a in args)
                ends = (s, t, lineno)
            elif head == "edge":
                if len(args) != 3:
                    raise ValueError
                i, j, a = int(args[0]), int(args[1]), float(args[2])
                if i == j:
                    raise NetworkParseError(f"self-loop on node {i}", lineno)
                key = (min(i, j), max(i, j))
                if key in edge_lines:
                    raise NetworkParseError(f"duplicate edge {key} (first on line {edge_lines[key]})", lineno)
                edge_lines[key] = lineno
                edges.append((i, j, a))
            elif head == "class":
                name, nodes = args[0], tuple(int(a) for a in args[1:])
                if not nodes:
                    raise NetworkParseError(f"class {name!r} lists no nodes", lineno)
                if name in classes:
                    raise NetworkParseError(f"class {name!r} declared twice", lineno)
                classes[name] = (nodes, lineno)
            elif head == "order":
                if order is not None:
                    raise NetworkParseError("repeated 'order' directive", lineno)
                order = (list(args), lineno)
            else:
                raise NetworkParseError(f"unknown directive {head!r}", lineno)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, NetworkParseError):
                raise
            raise NetworkParseError(f"malformed '{head}' directive: {raw.strip()!r}", lineno) from None

    if n is None:
        raise NetworkParseError("missing 'nodes' directive")
    if ends is None:
        raise NetworkParseError("missing 'ends' directive")

    for (i, j), lineno in edge_lines.items():
        if not (1 <= i <= n and 1 <= j <= n):
            raise NetworkParseError(f"edge ({i}, {j}) references a node outside 1..{n}", lineno)
    for name, (nodes, lineno) in classes.items():
        for v in nodes:
            if not 1 <= v <= n:
                raise NetworkParseError(f"class {name!r} references dangling node {v}", lineno)

    partition = None
    if classes:
        if order is not None:
            names, lineno = order
            for nm in names:
                if nm not in classes:
                    raise NetworkParseError(f"order names undeclared class {nm!r}", lineno)
            if sorted(names) != sorted(classes):
                raise NetworkParseError("order must list every declared class exactly once", lineno)
        else:
            names = list(classes)
        partition = tuple(NodeClass(nm, classes[nm][0]) for nm in names)
    elif order is not None:
        raise NetworkParseError("'order' given without any classes", order[1])

    try:
        return SpinNetwork(n, (ends[0], ends[1]), tuple(edges), partition)
    except ContractError as exc:
        raise NetworkParseError(str(exc), ends[2]) from None


def serialize_network(net: SpinNetwork, header: Sequence[str] = ()) -> str:
    """Canonical text form; ``header`` lines are emitted as ``#`` comments."""
    lines = [f"# {h}" if h else "#" for h in header]
    lines.append(f"nodes {net.n}")
    lines.append(f"ends {net.source} {net.target}")
    for i, j, a in net.edges:
        lines.append(f"edge {i} {j} {a!r}")
    if net.partition is not None:
        for c in net.partition:
            lines.append(f"class {c.name} " + " ".join(str(v) for v in c.nodes))
        lines.append("order " + " ".join(c.name for c in net.partition))
    return "\n".join(lines) + "\n"
