"""Hilbert-Schmidt geometry of perfect Z-transport.

A propagator ``U`` is treated as a vector of Pauli coefficients.  The
rotation-reflection superoperator ``S = P_{Z_s Z_t} P_R`` acts on an
operator ``A`` as ``Z_s A Z_t``: the reflection ``P_R`` (sign flip on the
part anticommuting with ``Z_t``) is conjugation by ``Z_t``, and the
permutation ``P_{Z_s Z_t}`` is left multiplication, which compose to the
two-sided product.  Transport is perfect exactly when ``U`` is a +1
eigenvector of ``S``.

Everything here works on operator expressions or on 2^N matrices; no
4^N superoperator matrix is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractError
from .hilbert import Evolution, dense, pauli_decompose, z_diag
from .pauli import (
    OperatorExpr,
    PauliString,
    hs_inner,
    identity,
    max_abs_diff,
    pauli,
    split_end_subspaces,
    z_string,
)
from .traces import golden_max, polish_peak, uniform_grid

VERDICT_TOL = 1e-8

Operator = np.ndarray | OperatorExpr


def _default_ends(n: int, ends: Sequence[int] | None) -> tuple[int, int]:
    return (1, n) if ends is None else (int(ends[0]), int(ends[1]))


def _n_of(u: Operator) -> int:
    if isinstance(u, OperatorExpr):
        return u.n
    return u.shape[0].bit_length() - 1


def _as_expr(u: Operator) -> OperatorExpr:
    return u if isinstance(u, OperatorExpr) else pauli_decompose(np.asarray(u))


# ------------------------------------------------------------ superoperators


def apply_S(a: OperatorExpr, ends: Sequence[int] | None = None) -> OperatorExpr:
    s, t = _default_ends(a.n, ends)
    return z_string(a.n, [s]) * a * z_string(a.n, [t])


def apply_reflection(a: OperatorExpr, target: int) -> OperatorExpr:
    """``P_R``: keep the part commuting with ``Z_target``, negate the rest."""
    g, gt = split_end_subspaces(a, target)
    return g - gt


def apply_end_permutation(a: OperatorExpr, ends: Sequence[int] | None = None) -> OperatorExpr:
    """``P_{Z_s Z_t}``: left multiplication by ``Z_s Z_t``."""
    s, t = _default_ends(a.n, ends)
    return z_string(a.n, [s, t]) * a


def apply_S_componentwise(a: OperatorExpr, ends: Sequence[int] | None = None) -> OperatorExpr:
    s, t = _default_ends(a.n, ends)
    return apply_end_permutation(apply_reflection(a, t), (s, t))


def fidelity_hs(u: Operator, ends: Sequence[int] | None = None) -> float:
    """``<U|S|U> = Tr(U^dag Z_s U Z_t) / 2^N``.

    This is the transport fidelity of ``U^dag``; for real Hamiltonians
    (XY, DQ and modified XY all are) it coincides with the forward one.
    """
    if isinstance(u, OperatorExpr):
        return float(hs_inner(u, apply_S(u, ends)).real)
    u = np.asarray(u)
    n = _n_of(u)
    s, t = _default_ends(n, ends)
    zs, zt = z_diag(n, s), z_diag(n, t)
    val = np.trace(u.conj().T @ (zs[:, None] * u * zt[None, :])) / u.shape[0]
    return float(val.real)


# ------------------------------------------------------- perfect transport


@dataclass(frozen=True)
class ConditionReport:
    norm_G: float
    norm_Gt: float
    eig_residual_G: float
    eig_residual_Gt: float
    fidelity_hs: float
    verdict: bool

    def render(self) -> str:
        return "\n".join(
            [
                f"norm_G: {self.norm_G:.12f}",
                f"norm_Gt: {self.norm_Gt:.12f}",
                f"eig_residual_G: {self.eig_residual_G:.3e}",
                f"eig_residual_Gt: {self.eig_residual_Gt:.3e}",
                f"fidelity: {self.fidelity_hs:.12f}",
                f"verdict: {'true' if self.verdict else 'false'}",
            ]
        )


def check_perfect_transport(
    u: Operator, ends: Sequence[int] | None = None, tol: float = VERDICT_TOL
) -> ConditionReport:
    """Test the equal-projection and eigenvector conditions on ``U``.

    ``U`` is split into its parts commuting (G) and anticommuting (G~)
    with ``Z_t``.  Perfect transport needs both parts to carry half the
    norm, with ``Z_s Z_t U^G = U^G`` and ``Z_s Z_t U^G~ = -U^G~``.
    """
    expr = _as_expr(u)
    n = expr.n
    s, t = _default_ends(n, ends)
    total = expr.norm() ** 2
    if abs(total - 1.0) > 1e-8:
        raise ContractError(f"propagator has HS norm^2 {total:.10g}, expected 1")
    g, gt = split_end_subspaces(expr, t)
    zz = z_string(n, [s, t])
    res_g = (zz * g - g).norm()
    res_gt = (zz * gt + gt).norm()
    norm_g, norm_gt = g.norm() ** 2, gt.norm() ** 2
    fid = fidelity_hs(expr, (s, t))
    verdict = abs(norm_g - 0.5) < tol and abs(norm_gt - 0.5) < tol and res_g < tol and res_gt < tol
    return ConditionReport(norm_g, norm_gt, res_g, res_gt, fid, verdict)


def swap_transport_check(u: np.ndarray, ends: Sequence[int] | None = None, tol: float = 1e-10) -> dict[str, float]:
    """Fidelities for ``Z_s->Z_t``, ``X_s->X_t`` and ``Y_s->Y_t`` plus a joint flag.

    All three equal 1 only for a SWAP of the end spins (times a bulk
    operator), the requirement for moving quantum information.
    """
    from .hilbert import general_fidelity_unitary

    n = _n_of(u)
    s, t = _default_ends(n, ends)
    out = {}
    for letter in "ZXY":
        out[letter] = general_fidelity_unitary(u, pauli(n, f"{letter}{s}"), pauli(n, f"{letter}{t}"))
    out["all"] = float(all(abs(v - 1.0) < tol for v in out.values()))
    return out


def swap_unitary(n: int, ends: Sequence[int] | None = None) -> np.ndarray:
    s, t = _default_ends(n, ends)
    return dense(0.5 * (identity(n) + pauli(n, f"X{s} X{t}") + pauli(n, f"Y{s} Y{t}") + pauli(n, f"Z{s} Z{t}")))


# ------------------------------------------------- constructed propagators


# sign choice of each family that carries Z_s to +Z_t; the other sign gives F = -1
PERFECT_SIGN = {1: +1, 2: +1, 3: +1, 4: +1, 5: +1, 6: +1, 7: -1, 8: -1}


def appendix_end_operators(form: int, sign: int, n: int) -> tuple[OperatorExpr, OperatorExpr]:
    """The two end-spin factors of propagator family ``form`` (1..8).

    Returned with the factor 1/2 absorbed, so each is a partial isometry on
    spins 1 and n and ``W (x) P + W' (x) Q`` is unitary for unitary W, W'.
    """
    if form not in range(1, 9):
        raise ContractError(f"form must be in 1..8, got {form}")
    if n < 2:
        raise ContractError("need at least two spins")
    s = 1 if sign > 0 else -1
    N = n

    def p(text: str, c: complex = 1.0) -> OperatorExpr:
        return pauli(n, text.replace("N", str(N)), c)

    one = identity(n)
    even = {1: one + p("Z1 ZN", s), 3: p("Z1") + p("ZN", s)}
    flip_plus = p("X1 XN") + p("Y1 YN", s)
    flip_minus = p("X1 YN") - p("Y1 XN", s)
    first_x = p("X1") + p("Y1 ZN", 1j * s)
    first_y = p("Y1") + p("X1 ZN", 1j * s)
    table = {
        1: (even[1], flip_plus),
        2: (even[1], flip_minus),
        3: (even[3], flip_plus),
        4: (even[3], flip_minus),
        5: (first_x, p("XN") - p("Z1 YN", 1j * s)),
        6: (first_x, p("YN") + p("Z1 XN", 1j * s)),
        7: (first_y, p("XN") + p("Z1 YN", 1j * s)),
        8: (first_y, p("YN") - p("Z1 XN", 1j * s)),
    }
    a, b = table[form]
    return 0.5 * a, 0.5 * b


def _embed_bulk(w: np.ndarray | None, n: int) -> np.ndarray:
    bulk_dim = 1 << (n - 2)
    if w is None:
        w = np.eye(bulk_dim)
    w = np.asarray(w, dtype=complex)
    if w.shape != (bulk_dim, bulk_dim):
        raise ContractError(f"bulk operator must be {bulk_dim}x{bulk_dim} for n={n}")
    if np.max(np.abs(w.conj().T @ w - np.eye(bulk_dim))) > 1e-10:
        raise ContractError("bulk operator is not unitary")
    return np.kron(np.eye(2), np.kron(w, np.eye(2)))


def appendix_unitary(form: int, w=None, w2=None, sign: int | None = None, n: int | None = None) -> np.ndarray:
    """Propagator ``W (x) P_form + W' (x) Q_form`` with ends 1 and n.

    ``W`` and ``W'`` act on the bulk spins ``2..n-1``; ``None`` means the
    identity, in which case ``n`` must be given.  ``sign`` defaults to the
    member of the family with fidelity +1 (see ``PERFECT_SIGN``).
    """
    if form not in PERFECT_SIGN:
        raise ContractError(f"form must be in 1..8, got {form}")
    sign = PERFECT_SIGN[form] if sign is None else sign
    if n is None:
        if w is None:
            raise ContractError("pass n when both bulk operators are the identity")
        n = int(np.asarray(w).shape[0]).bit_length() + 1
    a, b = appendix_end_operators(form, sign, n)
    u = _embed_bulk(w, n) @ dense(a) + _embed_bulk(w2, n) @ dense(b)
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > 1e-10:
        raise ContractError(f"form {form} produced a non-unitary operator (residual {dev:.3g})")
    return u


def classify_appendix_form(u: np.ndarray, tol: float = 1e-9):
    """Find ``(form, sign, W, W')`` with ``u = W (x) P + W' (x) Q``, or ``None``.

    Each end factor is a partial isometry with ``P^dag P`` a projector, so
    ``W`` is recovered as a partial trace of ``(I (x) P^dag) u`` and the
    match is accepted when the reconstruction residual is below ``tol``.
    """
    n = _n_of(u)
    bulk = 1 << (n - 2)
    for form in range(1, 9):
        for sign in (+1, -1):
            a, b = appendix_end_operators(form, sign, n)
            recon = np.zeros_like(u)
            bulks = []
            for part in (a, b):
                pm = dense(part)
                m = (pm.conj().T @ u).reshape(2, bulk, 2, 2, bulk, 2)
                # trace over spins 1 and n; P^dag P has trace 2 on those two spins
                w = np.einsum("aibajb->ij", m) / 2.0
                bulks.append(w)
                recon = recon + np.kron(np.eye(2), np.kron(w, np.eye(2))) @ pm
            if np.max(np.abs(recon - u)) < tol:
                return form, sign, bulks[0], bulks[1]
    return None


# ------------------------------------------------------ lambda combinations


@dataclass(frozen=True)
class LambdaReport:
    norm_residual: float
    balance_residual: float
    phase_residual: float
    constraints_hold: bool
    unitary: bool
    fidelity_hs: float
    verdict: bool


def lambda_unitary(lams: Sequence[complex], sign: int = +1, n: int = 2) -> np.ndarray:
    """``l1 (1 +/- Z1ZN) + l2 (X1XN +/- Y1YN) + l3 (X1YN -/+ Y1XN)`` on HS-normalized brackets.

    Each bracket is divided by sqrt(2) so that ``<U|U> = sum |l_k|^2``.
    """
    l1, l2, l3 = (complex(v) for v in lams)
    s = 1 if sign > 0 else -1
    N = n
    op = (
        l1 * (identity(n) + pauli(n, f"Z1 Z{N}", s))
        + l2 * (pauli(n, f"X1 X{N}") + pauli(n, f"Y1 Y{N}", s))
        + l3 * (pauli(n, f"X1 Y{N}") - pauli(n, f"Y1 X{N}", s))
    ) / math.sqrt(2.0)
    return dense(op)


def solve_lambda_combination(lams: Sequence[complex], sign: int = +1, tol: float = 1e-10) -> LambdaReport:
    """Evaluate the three constraints on a coefficient triple and the resulting fidelity."""
    l1, l2, l3 = (complex(v) for v in lams)
    a1, a2, a3 = abs(l1) ** 2, abs(l2) ** 2, abs(l3) ** 2
    norm_res = abs(a1 + a2 + a3 - 1.0)
    bal_res = abs(a1 - a2 - a3)
    ph_res = abs((l2.conjugate() * l3).imag)
    ok = norm_res < tol and bal_res < tol and ph_res < tol
    u = lambda_unitary((l1, l2, l3), sign)
    unitary = bool(np.max(np.abs(u.conj().T @ u - np.eye(4))) < tol)
    fid = fidelity_hs(u)
    return LambdaReport(norm_res, bal_res, ph_res, ok, unitary, fid, ok and unitary and abs(fid - 1.0) < tol)


# ------------------------------------------------------------- invariance


@dataclass(frozen=True)
class InvarianceReport:
    residual: float
    fidelity_before: float
    fidelity_after: float
    invariant: bool


def check_invariance(
    v: np.ndarray,
    u: np.ndarray,
    ends: Sequence[int] | None = None,
    samples: int = 32,
    seed: int = 0,
    tol: float = 1e-10,
) -> InvarianceReport:
    """Does ``V`` commute with ``S``, and does ``U -> VU`` keep the fidelity?

    The commutator ``[V, S]`` is probed on randomly drawn basis strings:
    ``V S(A) - S(V A) = (V Z_s - Z_s V) A Z_t``.
    """
    v = np.asarray(v, dtype=complex)
    u = np.asarray(u, dtype=complex)
    dim = v.shape[0]
    if np.max(np.abs(v.conj().T @ v - np.eye(dim))) > 1e-10:
        raise ContractError("V is not unitary")
    n = _n_of(v)
    s, t = _default_ends(n, ends)
    zs, zt = z_diag(n, s), z_diag(n, t)
    rng = np.random.default_rng(seed)
    residual = 0.0
    for key in rng.integers(0, 1 << (2 * n), size=samples):
        a = dense(OperatorExpr.from_string(PauliString(n, int(key))))
        lhs = v @ (zs[:, None] * a * zt[None, :])
        rhs = zs[:, None] * (v @ a) * zt[None, :]
        residual = max(residual, float(np.linalg.norm(lhs - rhs) / math.sqrt(dim)))
    before = fidelity_hs(u, (s, t))
    after = fidelity_hs(v @ u, (s, t))
    return InvarianceReport(residual, before, after, residual < tol and abs(after - before) < tol)


# ------------------------------------------------------ Hamiltonian support


@dataclass(frozen=True)
class SupportReport:
    support: str
    eigen_condition: bool | None
    square_residual: float | None
    fourth_residual: float | None
    conditions_hold: bool | None
    first_perfect_time: float | None
    fidelity_at_quarter_pi: float | None

    def render(self) -> str:
        def fmt(v):
            if v is None:
                return "n/a"
            if isinstance(v, bool):
                return "true" if v else "false"
            return f"{v:.12g}"

        return "\n".join(
            [
                f"support: {self.support}",
                f"eigen_condition: {fmt(self.eigen_condition)}",
                f"square_residual: {fmt(self.square_residual)}",
                f"fourth_residual: {fmt(self.fourth_residual)}",
                f"conditions_hold: {fmt(self.conditions_hold)}",
                f"first_perfect_time: {fmt(self.first_perfect_time)}",
                f"fidelity_at_quarter_pi: {fmt(self.fidelity_at_quarter_pi)}",
            ]
        )


def first_perfect_time(h: OperatorExpr, ends=None, t_max: float = 2 * math.pi, samples: int = 4001) -> float | None:
    """Earliest ``t`` in ``[0, t_max]`` where ``Tr(U Z_s U^dag Z_t)/2^N`` reaches 1."""
    s, t = _default_ends(h.n, ends)
    ev = Evolution(dense(h))
    zs, zt = np.diag(z_diag(h.n, s)), np.diag(z_diag(h.n, t))
    times = uniform_grid(t_max, samples)
    vals = ev.correlation(zs, zt, times).real
    f = lambda x: float(ev.correlation(zs, zt, [x])[0].real)
    for k in range(1, samples - 1):
        if vals[k] >= vals[k - 1] and vals[k] >= vals[k + 1] and vals[k] > 0.99:
            tk, fk = golden_max(f, times[k - 1], times[k + 1])
            if abs(fk - 1.0) < 1e-9:
                return polish_peak(f, tk, times[k - 1], times[k + 1])
    return None


def hamiltonian_support_check(h: OperatorExpr, ends: Sequence[int] | None = None, tol: float = 1e-10) -> SupportReport:
    """Classify where ``H`` lives relative to ``Z_t`` and test the purely-G~ conditions.

    For ``H`` entirely anticommuting with ``Z_t`` the conditions are
    ``Z_s Z_t H = -H`` (exact) and ``H^2 = (Id - Z_s Z_t)/2`` with
    ``H^4 = H^2``.
    """
    if not h.is_hermitian(1e-12):
        raise ContractError("Hamiltonian must be Hermitian")
    n = h.n
    s, t = _default_ends(n, ends)
    g, gt = split_end_subspaces(h, t)
    if not h:
        support = "empty"
    elif not g:
        support = "Gt"
    elif not gt:
        support = "G"
    else:
        support = "mixed"
    quarter = None
    first = None
    if n <= 12 and h:
        ev = Evolution(dense(h))
        zs, zt = np.diag(z_diag(n, s)), np.diag(z_diag(n, t))
        quarter = float(ev.correlation(zs, zt, [math.pi / 4])[0].real)
        first = first_perfect_time(h, (s, t))
    if support != "Gt":
        return SupportReport(support, None, None, None, None, first, quarter)
    zz = z_string(n, [s, t])
    eigen = not (zz * h + h)
    h2 = h * h
    target = 0.5 * (identity(n) - zz)
    sq = max_abs_diff(h2, target)
    fourth = max_abs_diff(h2 * h2, h2)
    holds = eigen and sq < tol and fourth < tol
    return SupportReport(support, eigen, sq, fourth, holds, first, quarter)
