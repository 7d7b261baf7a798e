"""The commutator hierarchy behind the transport fidelity.

Writing ``U = exp(-iHt)`` as the vector ``exp(-i H_L t)|Id>`` (``H_L`` is
left multiplication) the fidelity expands as

    F(t) = sum_n (it)^n / n! <C_n>,   C_0 = S,  C_n = [H_L, C_{n-1}],

and each ``C_n`` is a left multiplication followed by ``S``:
``C_n = (M_n)_L S``.  The non-commuting part of ``H`` is
``A = [H, Z_s] Z_s``; its nested commutators with ``H`` are the walk
operators ``C_n^A`` whose flip-flop terms trace the walk across the
network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, ContractError
from .pauli import (
    OperatorExpr,
    PauliString,
    commutator,
    hs_inner,
    identity,
    max_abs_diff,
    modified_flip_flop,
    flip_flop,
    z_string,
)

DEFAULT_TERM_BOUND = 2_000_000


def _source(h: OperatorExpr, ends: Sequence[int] | None) -> tuple[int, int]:
    return (1, h.n) if ends is None else (int(ends[0]), int(ends[1]))


def _guard(expr: OperatorExpr, bound: int, what: str) -> OperatorExpr:
    if len(expr) > bound:
        raise CapacityError(f"{what} has {len(expr)} terms, above the bound of {bound}")
    return expr


def extract_A(h: OperatorExpr, ends: Sequence[int] | None = None) -> OperatorExpr:
    """``A = [H, Z_s] Z_s``, the part of ``H`` that fails to commute with ``S``."""
    if not h.is_hermitian(1e-12):
        raise ContractError("Hamiltonian must be Hermitian")
    s, _ = _source(h, ends)
    zs = z_string(h.n, [s])
    return commutator(h, zs) * zs


def extraction_residual(
    h: OperatorExpr, ends: Sequence[int] | None = None, samples: int = 100, seed: int = 0
) -> float:
    """Largest HS distance between ``A_L S(X)`` and ``[H_L, S](X)`` over random strings ``X``."""
    s, t = _source(h, ends)
    n = h.n
    a = extract_A(h, (s, t))
    zs, zt = z_string(n, [s]), z_string(n, [t])
    rng = np.random.default_rng(seed)
    worst = 0.0
    for key in rng.integers(0, 1 << (2 * n), size=samples):
        x = OperatorExpr.from_string(PauliString(n, int(key)))
        sx = zs * x * zt
        lhs = a * sx
        rhs = h * sx - zs * (h * x) * zt
        worst = max(worst, max_abs_diff(lhs, rhs))
    return worst


@dataclass(frozen=True)
class WalkOperator:
    order: int
    expr: OperatorExpr


def walk_operators(
    h: OperatorExpr,
    n_max: int,
    ends: Sequence[int] | None = None,
    term_bound: int = DEFAULT_TERM_BOUND,
) -> list[WalkOperator]:
    """``C_0^A = A`` and ``C_n^A = [H, C_{n-1}^A]`` for ``n = 0..n_max``."""
    if n_max < 0:
        raise ContractError("n_max must be non-negative")
    cur = _guard(extract_A(h, ends), term_bound, "C_0^A")
    out = [WalkOperator(0, cur)]
    for k in range(1, n_max + 1):
        cur = _guard(commutator(h, cur), term_bound, f"C_{k}^A")
        out.append(WalkOperator(k, cur))
    return out


# ---------------------------------------------------------------- skeleton


@dataclass(frozen=True)
class EdgeSkeleton:
    """Flip-flop markers ``(i, j, sign)`` with ``i < j``; prefactors dropped."""

    edges: frozenset[tuple[int, int, str]] = field(default_factory=frozenset)

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, j) for i, j, _ in self.edges)

    def signs(self) -> set[str]:
        return {s for _, _, s in self.edges}

    def __contains__(self, item) -> bool:
        return item in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def render(self) -> str:
        return " ".join(f"{i}-{j}{s}" for i, j, s in sorted(self.edges))


def skeleton(w: WalkOperator | OperatorExpr) -> EdgeSkeleton:
    """Collect the two-site flip-flop patterns of an operator.

    A string flipping exactly two sites ``i < j`` marks a ``T^+`` edge when
    both flipping letters agree (XX or YY) and a ``T^-`` edge when they
    differ (XY or YX).  Strings flipping any other number of sites carry
    no edge and are ignored.
    """
    expr = w.expr if isinstance(w, WalkOperator) else w
    found = set()
    for string, _ in expr.strings():
        flips = [k for k in range(1, string.n + 1) if string.letter(k) in "XY"]
        if len(flips) != 2:
            continue
        i, j = flips
        sign = "+" if string.letter(i) == string.letter(j) else "-"
        found.add((i, j, sign))
    return EdgeSkeleton(frozenset(found))


# ----------------------------------------------------------------- moments


@dataclass(frozen=True)
class MomentSeries:
    """``<C_n>`` for ``n = 0..n_max`` and the left multipliers ``M_n``."""

    moments: np.ndarray
    multipliers: tuple[OperatorExpr, ...]

    @property
    def n_max(self) -> int:
        return len(self.moments) - 1

    def series(self, t) -> np.ndarray:
        """Truncated ``sum_n (it)^n / n! <C_n>`` (complex; real up to truncation)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape, dtype=complex)
        for n, m in enumerate(self.moments):
            out += (1j * t) ** n / math.factorial(n) * m
        return out


def moments(
    h: OperatorExpr,
    n_max: int,
    ends: Sequence[int] | None = None,
    term_bound: int = DEFAULT_TERM_BOUND,
    check: bool = True,
) -> MomentSeries:
    """Left multipliers ``M_n`` with ``C_n = (M_n)_L S`` and the moments ``<C_n>``.

    The direct route uses ``M_n = H M_{n-1} - M_{n-1} Z_s H Z_s``; the walk
    route rebuilds the same operators from
    ``M_n = sum_k binom(n-1, k) C_{n-1-k}^A M_k``.  With ``check`` the two
    are required to agree (exactly for dyadic couplings, otherwise to a
    relative 1e-12).
    """
    s, t = _source(h, ends)
    n = h.n
    zs = z_string(n, [s])
    h_conj = zs * h * zs
    direct = [identity(n)]
    for k in range(1, n_max + 1):
        prev = direct[-1]
        direct.append(_guard(h * prev - prev * h_conj, term_bound, f"M_{k}"))

    if check and n_max >= 1:
        walk = [w.expr for w in walk_operators(h, n_max - 1, (s, t), term_bound)]
        rebuilt = [identity(n)]
        for k in range(1, n_max + 1):
            acc = OperatorExpr(n)
            for j in range(k):
                acc = acc + math.comb(k - 1, j) * (walk[k - 1 - j] * rebuilt[j])
            rebuilt.append(_guard(acc, term_bound, f"M_{k}"))
        for k, (a, b) in enumerate(zip(direct, rebuilt)):
            scale = max(1.0, max((abs(v) for v in a.terms.values()), default=0.0))
            if max_abs_diff(a, b) > 1e-12 * scale:
                raise ContractError(f"walk reconstruction of M_{k} disagrees with the direct recursion")

    zz = z_string(n, [s, t])
    # <Id| (M_n)_L S |Id> = Tr(M_n Z_s Z_t) / 2^N
    vals = np.array([hs_inner(zz, m) for m in direct], dtype=complex)
    return MomentSeries(vals, tuple(direct))


# ---------------------------------------------------------- tabulated forms


def _fig5_table(kind: str, n: int = 6) -> list[OperatorExpr]:
    """The tabulated walk operators of the two-path six-node network."""
    N = n

    def z(*sites):
        return z_string(n, sites)

    one = identity(n)
    if kind == "xy":

        def T(i, j, s):
            return flip_flop(i, j, s, n)

        return [
            T(1, 2, 1) + T(1, 4, 1),
            z(2) * T(1, 3, -1) + z(4) * T(1, 5, -1),
            T(1, 2, 1) - T(2, 3, 1) - z(1, 2) * T(3, 4, 1) + z(2, 3) * T(1, N, 1)
            + T(1, 4, 1) - T(4, 5, 1) - z(1, 4) * T(2, 5, 1) + z(4, 5) * T(1, N, 1),
            (z(4, 5, N) + 4 * z(2)) * T(1, 3, -1) + (z(2, 3, N) + 4 * z(4)) * T(1, 5, -1)
            - 2 * (z(1, 4, 5) + z(3)) * T(2, N, -1) - 2 * (z(1, 2, 3) + z(5)) * T(4, N, -1),
            (4 * one + z(3, 4, 5, N)) * T(1, 2, 1) + (4 * one + z(2, 3, 5, N)) * T(1, 4, 1)
            + 9 * (z(2, 3) + z(4, 5)) * T(1, N, 1)
            - (6 * one + 3 * z(1, 4, 5, N)) * T(2, 3, 1) - (6 * z(1, 4) + 3 * z(3, N)) * T(2, 5, 1)
            - (6 * z(1, 2) + 3 * z(5, N)) * T(3, 4, 1)
            + 2 * (one + z(1, 2, 4, 5)) * T(3, 6, 1)
            - (6 * one + 3 * z(1, 2, 3, N)) * T(4, 5, 1) + 2 * (one + z(1, 2, 3, 4)) * T(5, 6, 1),
        ]

    def M(i, j, s):
        return modified_flip_flop(i, j, s, n)

    return [
        M(1, 2, 1) + M(1, 4, 1),
        M(1, 3, -1) + M(1, 5, -1),
        M(1, 2, 1) - M(2, 3, 1) - M(3, 4, 1) + M(1, N, 1) + M(1, 4, 1) - M(4, 5, 1) - M(2, 5, 1) + M(1, N, 1),
        5 * M(1, 3, -1) - 4 * M(2, N, -1) + 5 * M(1, 5, -1) - 4 * M(4, N, -1),
        5 * M(1, 2, 1) + 5 * M(1, 4, 1) + 18 * M(1, N, 1)
        - 9 * M(2, 3, 1) - 9 * M(2, 5, 1) - 9 * M(3, 4, 1)
        + 4 * M(3, 6, 1) - 9 * M(4, 5, 1) + 4 * M(5, 6, 1),
    ]


@dataclass(frozen=True)
class OrderComparison:
    order: int
    scalar: complex
    same_terms: bool
    residual: float
    missing: tuple[str, ...]
    extra: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.same_terms and self.residual < 1e-12


@dataclass(frozen=True)
class Table1Report:
    kind: str
    orders: tuple[OrderComparison, ...]

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.orders)

    def render(self) -> str:
        lines = [f"kind: {self.kind}"]
        for o in self.orders:
            lines.append(
                f"order {o.order}: scalar={o.scalar.real:.12g} terms={'equal' if o.same_terms else 'differ'} "
                f"residual={o.residual:.3e} {'OK' if o.ok else 'MISMATCH'}"
            )
            for s in o.missing:
                lines.append(f"  missing: {s}")
            for s in o.extra:
                lines.append(f"  extra: {s}")
        return "\n".join(lines)


def table1_check(net, kind: str = "xy") -> Table1Report:
    """Compare ``C_0^A .. C_4^A`` on the two-path network with the tabulated forms.

    Each order is compared up to one real scalar fit by least squares; the
    term sets must coincide and the rescaled coefficients agree to 1e-12.
    """
    from .network import hamiltonian

    kind = kind.lower()
    if kind not in ("xy", "mxy"):
        raise ContractError("table comparison exists only for the xy and mxy columns")
    if net.n != 6 or net.ends != (1, 6):
        raise ContractError("table comparison needs the six-node two-path network")
    expected = _fig5_table(kind, net.n)
    computed = walk_operators(hamiltonian(net, kind), len(expected) - 1)
    rows = []
    for k, (exp, got) in enumerate(zip(expected, computed)):
        g = got.expr
        denom = hs_inner(exp, exp)
        scalar = hs_inner(exp, g) / denom if denom else 0j
        scaled = scalar * exp
        keys_e, keys_g = set(exp.terms), set(g.terms)
        fmt = lambda key: str(PauliString(net.n, key))
        missing = tuple(fmt(key) for key in sorted(keys_e - keys_g))
        extra = tuple(fmt(key) for key in sorted(keys_g - keys_e))
        size = max((abs(v) for v in g.terms.values()), default=1.0)
        rows.append(OrderComparison(k, complex(scalar), keys_e == keys_g, max_abs_diff(scaled, g) / size, missing, extra))
    return Table1Report(kind, tuple(rows))
