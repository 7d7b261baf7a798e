"""Named example networks.

The weighted families (``fig7a``, ``fig7b``, ``fig8``) are synthesized from
perfect-transfer chains by ``expand_chain`` rather than typed in, so their
couplings are correct by construction and verified on creation.
"""

from __future__ import annotations

import math
from typing import Sequence

from .engineering import BranchPlan, EngineeredNetwork, expand_chain
from .errors import ContractError
from .network import SpinNetwork, pst_chain, pst_couplings

NAMES = ("lambda3", "fig3", "fig5", "fig7a", "fig7b", "fig8")


def _check_weight(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ContractError(f"{name} must lie strictly between 0 and 1, got {value!r}")
    return value


def lambda3() -> SpinNetwork:
    """Three spins, ``H = (T_12 + T_23)/sqrt(2)``: perfect transfer at ``t = pi``."""
    r = 1.0 / math.sqrt(2.0)
    return SpinNetwork(3, (1, 3), ((1, 2, r), (2, 3, r))).with_partition([[1], [2], [3]])


def fig3() -> SpinNetwork:
    """Three unit-coupled Lambda paths ``1 - {2, 3, 4} - 5``."""
    edges = tuple((1, j, 1.0) for j in (2, 3, 4)) + tuple((j, 5, 1.0) for j in (2, 3, 4))
    return SpinNetwork(5, (1, 5), edges).with_partition([[1], [2, 3, 4], [5]])


def fig5() -> SpinNetwork:
    """Two unit-coupled paths ``1-2-3-6`` and ``1-4-5-6``."""
    edges = ((1, 2, 1.0), (2, 3, 1.0), (3, 6, 1.0), (1, 4, 1.0), (4, 5, 1.0), (5, 6, 1.0))
    return SpinNetwork(6, (1, 6), edges).with_partition([[1], [2, 4], [3, 5], [6]])


def fig7a_plan(gamma: float) -> BranchPlan:
    s = math.sqrt(1.0 - gamma * gamma)
    return BranchPlan(
        ((1,), (2, 4), (3, 5), (6,)),
        ((1.0,), (gamma, s), (gamma, s), (1.0,)),
        frozenset({(1, 2), (1, 4), (2, 3), (4, 5), (3, 6), (5, 6)}),
    )


def fig7a_engineered(gamma: float) -> EngineeredNetwork:
    gamma = _check_weight("gamma", gamma)
    return expand_chain(pst_couplings(4), fig7a_plan(gamma), {"gamma": gamma})


def fig7a(gamma: float) -> SpinNetwork:
    """Two weighted paths collapsing onto the 4-node perfect chain.

    ``gamma = 1`` switches the second path off; the single-path limit is the
    chain itself.
    """
    if float(gamma) == 1.0:
        return pst_chain(4).with_partition([[1], [2], [3], [4]])
    return fig7a_engineered(gamma).network


def fig7b_plan(gamma1: float, gamma2: float) -> BranchPlan:
    """Three paths: node 2 splits into 3 and 4, node 5 continues to 6."""
    s1, s2 = math.sqrt(1.0 - gamma1**2), math.sqrt(1.0 - gamma2**2)
    return BranchPlan(
        ((1,), (2, 5), (3, 4, 6), (7,)),
        ((1.0,), (gamma1, s1), (gamma1 * gamma2, gamma1 * s2, s1), (1.0,)),
        frozenset({(1, 2), (1, 5), (2, 3), (2, 4), (5, 6), (3, 7), (4, 7), (6, 7)}),
    )


def fig7b_engineered(gamma1: float, gamma2: float) -> EngineeredNetwork:
    gamma1 = _check_weight("gamma1", gamma1)
    gamma2 = _check_weight("gamma2", gamma2)
    return expand_chain(pst_couplings(4), fig7b_plan(gamma1, gamma2), {"gamma1": gamma1, "gamma2": gamma2})


def fig7b(gamma1: float = 0.8, gamma2: float = 0.5) -> SpinNetwork:
    return fig7b_engineered(gamma1, gamma2).network


def fig8_plan(w1: float, w2: float) -> BranchPlan:
    """Three paths through four middle lines, with two crossing blocks.

    Lines 2..5 each hold one node of every path.  Between lines 2 and 3
    paths one and two are fully cross-coupled, between lines 4 and 5 paths
    two and three are; everything else runs path by path.
    """
    c1, c2 = math.sqrt(1.0 - w1 * w1), math.sqrt(1.0 - w2 * w2)
    u = (w1, c1 * w2, c1 * c2)
    lines = [(2, 3, 4), (5, 6, 7), (8, 9, 10), (11, 12, 13)]
    support = {(1, v) for v in lines[0]} | {(v, 14) for v in lines[3]}
    support |= {(2, 5), (2, 6), (3, 5), (3, 6), (4, 7)}
    support |= set(zip(lines[1], lines[2]))
    support |= {(8, 11), (9, 12), (9, 13), (10, 12), (10, 13)}
    return BranchPlan(
        ((1,), *lines, (14,)),
        ((1.0,), u, u, u, u, (1.0,)),
        frozenset(support),
        ("c0", "l2", "l3", "l4", "l5", "c5"),
    )


def fig8_engineered(w1: float = 0.6, w2: float = 0.7) -> EngineeredNetwork:
    w1 = _check_weight("w1", w1)
    w2 = _check_weight("w2", w2)
    return expand_chain(pst_couplings(6), fig8_plan(w1, w2), {"w1": w1, "w2": w2})


def fig8(w1: float = 0.6, w2: float = 0.7) -> SpinNetwork:
    """Fourteen-node three-path network collapsing onto the 6-node perfect chain."""
    return fig8_engineered(w1, w2).network


def library(name: str, params: Sequence[float] = ()) -> SpinNetwork:
    """Look up a named network; ``params`` are the family's weights, if any."""
    params = tuple(float(p) for p in params)
    builders = {
        "lambda3": (lambda3, 0, 0),
        "fig3": (fig3, 0, 0),
        "fig5": (fig5, 0, 0),
        "fig7a": (fig7a, 1, 1),
        "fig7b": (fig7b, 0, 2),
        "fig8": (fig8, 0, 2),
    }
    if name not in builders:
        raise ContractError(f"unknown network {name!r}; choose from {', '.join(NAMES)}")
    fn, lo, hi = builders[name]
    if not lo <= len(params) <= hi:
        raise ContractError(f"{name} takes between {lo} and {hi} parameters, got {len(params)}")
    return fn(*params)


def parse_library_spec(spec: str) -> SpinNetwork:
    """``name`` or ``name:p1,p2`` (for example ``fig7b:0.8,0.5``)."""
    name, _, rest = spec.partition(":")
    try:
        params = [float(p) for p in rest.split(",")] if rest else []
    except ValueError:
        raise ContractError(f"bad parameter list in {spec!r}") from None
    return library(name.strip(), params)
