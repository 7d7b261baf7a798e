"""Exact dense evolution in the full 2^N-dimensional Hilbert space.

Basis ordering follows ``np.kron(site_1, site_2, ..., site_N)``: site 1 is
the most significant bit of the computational basis index.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import CapacityError, ContractError
from .network import HamiltonianKind, SpinNetwork, hamiltonian
from .pauli import OperatorExpr, PauliString, ZERO_TOL
from .traces import FidelityTrace, build_trace

DEFAULT_DENSE_CAP = 12
HERMITIAN_TOL = 1e-10
_CHUNK_ELEMENTS = 1 << 23


def dense_cap() -> int:
    """Largest N the dense backend accepts (``SPINET_DENSE_CAP`` overrides)."""
    raw = os.environ.get("SPINET_DENSE_CAP")
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        return int(raw)
    except ValueError:
        raise ContractError(f"SPINET_DENSE_CAP must be an integer, got {raw!r}") from None


def _require_cap(n: int, cap: int | None = None) -> None:
    cap = dense_cap() if cap is None else cap
    if n > cap:
        raise CapacityError(
            f"dense backend limited to N <= {cap} spins (got {n}); "
            "use the fermion backend for modified-XY transport on larger networks"
        )


def _basis_masks(n: int, key: int) -> tuple[int, int]:
    """Packed site-major key -> (x, z) masks in basis-index bit order."""
    xm = zm = 0
    for k in range(n):
        code = (key >> (2 * k)) & 3
        bit = 1 << (n - 1 - k)
        if code & 1:
            xm |= bit
        if code & 2:
            zm |= bit
    return xm, zm


def _parity(a: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(a) & 1).astype(np.int64)


def dense(a: OperatorExpr, cap: int | None = None) -> np.ndarray:
    """Matrix of an operator expression.

    Each Pauli string acts as ``P|b> = i^nY (-1)^(b.z) |b ^ x>``, which is
    the same matrix the Kronecker product of its letters produces.
    """
    n = a.n
    _require_cap(n, cap)
    dim = 1 << n
    b = np.arange(dim)
    out = np.zeros((dim, dim), dtype=complex)
    for key, c in a.terms.items():
        xm, zm = _basis_masks(n, key)
        ny = (xm & zm).bit_count()
        col = c * (1j**ny) * (1 - 2 * _parity(b & zm))
        out[b ^ xm, b] += col
    return out


def _spread_keys(n: int) -> np.ndarray:
    """Map a basis-order mask to the packed key's X (even) bit positions."""
    dim = 1 << n
    masks = np.arange(dim)
    out = np.zeros(dim, dtype=np.int64)
    for k in range(n):
        out |= ((masks >> (n - 1 - k)) & 1) << (2 * k)
    return out


def _walsh_hadamard(v: np.ndarray) -> np.ndarray:
    """Unnormalized WHT along the last axis: ``out[z] = sum_b (-1)^(b.z) v[b]``."""
    v = v.copy()
    rows, dim = v.shape
    h = 1
    while h < dim:
        v = v.reshape(rows, dim // (2 * h), 2, h)
        a, c = v[:, :, 0, :].copy(), v[:, :, 1, :]
        v[:, :, 0, :] = a + c
        v[:, :, 1, :] = a - c
        v = v.reshape(rows, dim)
        h *= 2
    return v


def pauli_decompose(m: np.ndarray, tol: float = ZERO_TOL) -> OperatorExpr:
    """Coefficients ``Tr(P^dag M) / 2^N`` of a dense matrix in the Pauli basis."""
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if m.shape != (dim, dim) or 1 << n != dim:
        raise ContractError("expected a square matrix of size 2^N")
    b = np.arange(dim)
    gathered = m[b[None, :] ^ b[:, None], b[None, :]]  # row x holds M[b ^ x, b]
    coeffs = _walsh_hadamard(gathered) / dim
    xs, zs = np.meshgrid(b, b, indexing="ij")
    ny = np.bitwise_count(xs & zs).astype(np.int64)
    coeffs = coeffs * (-1j) ** ny
    spread = _spread_keys(n)
    keys = spread[xs] | (spread[zs] << 1)
    keep = np.abs(coeffs) >= tol
    return OperatorExpr(n, dict(zip(keys[keep].tolist(), coeffs[keep].tolist())))


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    dev = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if dev > tol:
        raise ContractError(f"operator is not Hermitian (max deviation {dev:.3g})")


class Evolution:
    """Shared eigendecomposition ``H = V diag(w) V^dag`` for many time points."""

    def __init__(self, h: np.ndarray):
        check_hermitian(h)
        self.dim = h.shape[0]
        self.w, self.v = np.linalg.eigh(h)

    def propagator(self, t: float) -> np.ndarray:
        return (self.v * np.exp(-1j * self.w * t)) @ self.v.conj().T

    def correlation(self, a: np.ndarray, b: np.ndarray, times) -> np.ndarray:
        """``Tr(U(t) a U(t)^dag b) / dim`` for every entry of ``times``.

        In the eigenbasis this is ``p^T (a' * b'^T) conj(p)`` with
        ``p = exp(-i w t)``, so each time point costs O(dim^2).
        """
        vh = self.v.conj().T
        ap = vh @ a @ self.v
        bp = vh @ b @ self.v
        weights = ap * bp.T
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty(len(times), dtype=complex)
        step = max(1, _CHUNK_ELEMENTS // max(self.dim, 1))
        for s in range(0, len(times), step):
            p = np.exp(-1j * np.outer(times[s : s + step], self.w))
            out[s : s + step] = np.einsum("tj,jk,tk->t", p, weights, p.conj(), optimize=True)
        return out / self.dim


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` through the Hermitian eigendecomposition."""
    return Evolution(h).propagator(t)


def z_diag(n: int, site: int) -> np.ndarray:
    b = np.arange(1 << n)
    return (1 - 2 * ((b >> (n - site)) & 1)).astype(float)


def _network_evolution(net: SpinNetwork, kind) -> Evolution:
    _require_cap(net.n)
    return Evolution(dense(hamiltonian(net, HamiltonianKind.parse(kind))))


def _end_observables(net: SpinNetwork) -> tuple[np.ndarray, np.ndarray]:
    return np.diag(z_diag(net.n, net.source)), np.diag(z_diag(net.n, net.target))


def transport_fidelity(net: SpinNetwork, kind, t: float) -> float:
    """``Tr(U Z_s U^dag Z_t) / 2^N`` with ``U = exp(-i H t)``."""
    ev = _network_evolution(net, kind)
    zs, zt = _end_observables(net)
    return float(ev.correlation(zs, zt, [t])[0].real)


def fidelity_trace(net: SpinNetwork, kind, t_max: float, samples: int) -> FidelityTrace:
    ev = _network_evolution(net, kind)
    zs, zt = _end_observables(net)

    def many(ts):
        return ev.correlation(zs, zt, ts).real

    return build_trace(lambda t: float(many([t])[0]), many, t_max, samples)


def _string_matrix(p: PauliString | OperatorExpr, n: int) -> np.ndarray:
    if isinstance(p, PauliString):
        if p.key == 0:
            raise ContractError("transport between identity operators is undefined")
        p = OperatorExpr.from_string(p)
    if p.n != n:
        raise ContractError(f"operator acts on {p.n} sites, network has {n}")
    return dense(p)


def general_fidelity_unitary(u: np.ndarray, p_init, p_final) -> float:
    """``Tr(U P_init U^dag P_final) / 2^N`` for an explicit propagator."""
    n = u.shape[0].bit_length() - 1
    a, b = _string_matrix(p_init, n), _string_matrix(p_final, n)
    val = np.trace(u @ a @ u.conj().T @ b) / u.shape[0]
    if abs(val.imag) > 1e-10:
        raise ContractError(f"fidelity has imaginary part {val.imag:.3g}; inputs must be Hermitian")
    return float(val.real)


def general_fidelity(net: SpinNetwork, kind, t: float, p_init, p_final) -> float:
    """Transport fidelity between two arbitrary non-identity Pauli strings."""
    ev = _network_evolution(net, kind)
    a, b = _string_matrix(p_init, net.n), _string_matrix(p_final, net.n)
    val = ev.correlation(a, b, [t])[0]
    if abs(val.imag) > 1e-10:
        raise ContractError(f"fidelity has imaginary part {val.imag:.3g}; inputs must be Hermitian")
    return float(val.real)


def network_propagator(net: SpinNetwork, kind, t: float) -> np.ndarray:
    return _network_evolution(net, kind).propagator(t)
