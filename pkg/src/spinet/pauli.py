"""Exact algebra over N-site Pauli strings.

A Pauli string is stored as a packed integer with two bits per site,
site-major: bit ``2k`` is the X-part and bit ``2k+1`` the Z-part of site
``k + 1``.  The per-site code is therefore ``I=0, X=1, Z=2, Y=3``.  Products
of strings are a XOR of the packed keys plus a phase in ``{1, i, -1, -i}``
counted from the sitewise letter pairs.

Operators are complex-weighted sums of strings (:class:`OperatorExpr`).
Amplitudes are with respect to the normalized basis, so the
Hilbert-Schmidt product ``Tr(A^dag B) / 2^N`` is the plain dot product of
coefficient vectors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .errors import ContractError, DimensionError

ZERO_TOL = 1e-14

_CODE_TO_LETTER = "IXZY"
_LETTER_TO_CODE = {"I": 0, "X": 1, "Z": 2, "Y": 3}
_IPOW = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _site_mask(n: int) -> int:
    return int("01" * n, 2) if n else 0


def _product_phase(a: int, b: int, m: int) -> int:
    """Exponent e such that P_a P_b = i^e P_{a^b}."""
    ax, az = a & m, (a >> 1) & m
    bx, bz = b & m, (b >> 1) & m
    a_x, a_y, a_z = ax & ~az, ax & az, az & ~ax
    b_x, b_y, b_z = bx & ~bz, bx & bz, bz & ~bx
    # XY = iZ, YZ = iX, ZX = iY and the reversed pairs pick up -i
    plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x)
    minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z)
    return (plus.bit_count() - minus.bit_count()) % 4


def _check_site(site: int, n: int) -> None:
    if not 1 <= site <= n:
        raise ContractError(f"site {site} outside 1..{n}")


@dataclass(frozen=True)
class PauliString:
    n: int
    key: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ContractError("a Pauli string needs at least one site")
        if self.key >> (2 * self.n):
            raise ContractError("packed key has letters beyond n sites")

    @classmethod
    def from_letters(cls, letters: str) -> PauliString:
        """Build from a dense letter sequence, e.g. ``"XIZ"`` (site 1 first)."""
        key = 0
        for k, ch in enumerate(letters.upper()):
            try:
                key |= _LETTER_TO_CODE[ch] << (2 * k)
            except KeyError:
                raise ContractError(f"unknown Pauli letter {ch!r}") from None
        return cls(len(letters), key)

    @classmethod
    def parse(cls, n: int, text: str) -> PauliString:
        """Parse the sparse rendering, e.g. ``"X1 Z2 Y4"`` or ``"ID"``."""
        key = 0
        text = text.strip()
        if text in ("", "ID"):
            return cls(n, 0)
        for tok in text.split():
            letter, site = tok[0].upper(), int(tok[1:])
            _check_site(site, n)
            if letter not in "XYZ":
                raise ContractError(f"bad token {tok!r}")
            key ^= _LETTER_TO_CODE[letter] << (2 * (site - 1))
        return cls(n, key)

    def letter(self, site: int) -> str:
        _check_site(site, self.n)
        return _CODE_TO_LETTER[(self.key >> (2 * (site - 1))) & 3]

    @property
    def letters(self) -> str:
        return "".join(_CODE_TO_LETTER[(self.key >> (2 * k)) & 3] for k in range(self.n))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k + 1 for k in range(self.n) if (self.key >> (2 * k)) & 3)

    def commutes_with(self, other: PauliString) -> bool:
        if other.n != self.n:
            raise DimensionError(f"strings on {self.n} and {other.n} sites")
        m = _site_mask(self.n)
        return _product_phase(self.key, other.key, m) == _product_phase(other.key, self.key, m)

    def __mul__(self, other: PauliString) -> ScaledString:
        return mul(ScaledString(1.0 + 0j, self), ScaledString(1.0 + 0j, other))

    def __str__(self) -> str:
        return format_string(self.n, self.key)


@dataclass(frozen=True)
class ScaledString:
    phase: complex
    string: PauliString

    def __mul__(self, other: ScaledString) -> ScaledString:
        return mul(self, other)


def mul(a: ScaledString | PauliString, b: ScaledString | PauliString) -> ScaledString:
    """Exact product of two (scaled) Pauli strings."""
    if isinstance(a, PauliString):
        a = ScaledString(1.0 + 0j, a)
    if isinstance(b, PauliString):
        b = ScaledString(1.0 + 0j, b)
    n = a.string.n
    if b.string.n != n:
        raise DimensionError(f"cannot multiply strings on {n} and {b.string.n} sites")
    ka, kb = a.string.key, b.string.key
    e = _product_phase(ka, kb, _site_mask(n))
    return ScaledString(a.phase * b.phase * _IPOW[e], PauliString(n, ka ^ kb))


def format_string(n: int, key: int) -> str:
    parts = []
    for k in range(n):
        code = (key >> (2 * k)) & 3
        if code:
            parts.append(f"{_CODE_TO_LETTER[code]}{k + 1}")
    return " ".join(parts) if parts else "ID"


def _fmt_float(v: float) -> str:
    if v == 0.0:
        v = 0.0  # folds -0.0
    return repr(float(v))


class OperatorExpr:
    """Immutable complex-weighted sum of Pauli strings on ``n`` sites."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[int, complex] | None = None):
        if n < 1:
            raise ContractError("an operator needs at least one site")
        self.n = n
        self._terms: dict[int, complex] = {}
        if terms:
            limit = 1 << (2 * n)
            for k, v in terms.items():
                if not 0 <= k < limit:
                    raise ContractError(f"key {k} does not fit {n} sites")
                v = complex(v)
                if abs(v) >= ZERO_TOL:
                    self._terms[k] = v

    @classmethod
    def _wrap(cls, n: int, terms: dict[int, complex]) -> OperatorExpr:
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = {k: v for k, v in terms.items() if abs(v) >= ZERO_TOL}
        return obj

    @classmethod
    def from_string(cls, string: PauliString, coeff: complex = 1.0) -> OperatorExpr:
        return cls(string.n, {string.key: coeff})

    @classmethod
    def parse(cls, n: int, text: str) -> OperatorExpr:
        """Inverse of :meth:`render`."""
        terms: dict[int, complex] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            amp, _, rest = line.partition(")")
            re_s, im_s = amp.lstrip("(").split(",")
            key = PauliString.parse(n, rest).key
            terms[key] = terms.get(key, 0) + complex(float(re_s), float(im_s))
        return cls(n, terms)

    @property
    def terms(self) -> Mapping[int, complex]:
        return MappingProxyType(self._terms)

    def strings(self) -> Iterator[tuple[PauliString, complex]]:
        for k in sorted(self._terms):
            yield PauliString(self.n, k), self._terms[k]

    def coefficient(self, string: PauliString | str) -> complex:
        if isinstance(string, str):
            string = PauliString.parse(self.n, string)
        return self._terms.get(string.key, 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def _same_size(self, other: OperatorExpr) -> None:
        if other.n != self.n:
            raise DimensionError(f"operators on {self.n} and {other.n} sites")

    def __add__(self, other: OperatorExpr) -> OperatorExpr:
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        self._same_size(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return OperatorExpr._wrap(self.n, out)

    def __sub__(self, other: OperatorExpr) -> OperatorExpr:
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> OperatorExpr:
        return OperatorExpr._wrap(self.n, {k: -v for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            return product(self, other)
        if isinstance(other, (int, float, complex)):
            return OperatorExpr._wrap(self.n, {k: v * other for k, v in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * (1.0 / other)
        return NotImplemented

    def __pow__(self, k: int) -> OperatorExpr:
        out = identity(self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    __hash__ = None

    def isclose(self, other: OperatorExpr, tol: float = 1e-12) -> bool:
        """Max-amplitude distance below ``tol``."""
        return max_abs_diff(self, other) < tol

    def adjoint(self) -> OperatorExpr:
        return OperatorExpr._wrap(self.n, {k: v.conjugate() for k, v in self._terms.items()})

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return all(abs(v.imag) <= tol for v in self._terms.values())

    def norm(self) -> float:
        """Hilbert-Schmidt norm in the normalized convention (``||Id|| = 1``)."""
        return math.sqrt(sum(abs(v) ** 2 for v in self._terms.values()))

    def render(self) -> str:
        lines = []
        for k in sorted(self._terms):
            v = self._terms[k]
            lines.append(f"({_fmt_float(v.real)},{_fmt_float(v.imag)}) {format_string(self.n, k)}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        if not self._terms:
            return f"OperatorExpr({self.n}, 0)"
        body = " + ".join(f"({v:.6g}) {format_string(self.n, k)}" for k, v in sorted(self._terms.items()))
        return f"OperatorExpr({self.n}, {body})"


def max_abs_diff(a: OperatorExpr, b: OperatorExpr) -> float:
    a._same_size(b)
    keys = a._terms.keys() | b._terms.keys()
    return max((abs(a._terms.get(k, 0) - b._terms.get(k, 0)) for k in keys), default=0.0)


def product(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    """Operator product ``ab`` with exact phase tracking."""
    a._same_size(b)
    m = _site_mask(a.n)
    out: dict[int, complex] = {}
    get = out.get
    for ka, va in a._terms.items():
        for kb, vb in b._terms.items():
            k = ka ^ kb
            out[k] = get(k, 0) + va * vb * _IPOW[_product_phase(ka, kb, m)]
    return OperatorExpr._wrap(a.n, out)


def commutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    """``ab - ba``.

    Only anticommuting string pairs contribute, each with twice the
    product amplitude, so commuting pairs are skipped outright.
    """
    a._same_size(b)
    m = _site_mask(a.n)
    out: dict[int, complex] = {}
    get = out.get
    for ka, va in a._terms.items():
        for kb, vb in b._terms.items():
            e_ab = _product_phase(ka, kb, m)
            e_ba = _product_phase(kb, ka, m)
            if e_ab == e_ba:
                continue
            k = ka ^ kb
            out[k] = get(k, 0) + 2 * va * vb * _IPOW[e_ab]
    return OperatorExpr._wrap(a.n, out)


def hs_inner(a: OperatorExpr, b: OperatorExpr) -> complex:
    """``Tr(a^dag b) / 2^N``."""
    a._same_size(b)
    small, large = (a._terms, b._terms) if len(a._terms) <= len(b._terms) else (b._terms, a._terms)
    total = 0j
    for k in small:
        if k in large:
            total += a._terms[k].conjugate() * b._terms[k]
    return total


def split_end_subspaces(a: OperatorExpr, end_node: int) -> tuple[OperatorExpr, OperatorExpr]:
    """Split into the parts commuting (I, Z) and anticommuting (X, Y) with Z at ``end_node``."""
    _check_site(end_node, a.n)
    xbit = 1 << (2 * (end_node - 1))
    g, gt = {}, {}
    for k, v in a._terms.items():
        (gt if k & xbit else g)[k] = v
    return OperatorExpr._wrap(a.n, g), OperatorExpr._wrap(a.n, gt)


# ---------------------------------------------------------------- builders


def identity(n: int) -> OperatorExpr:
    return OperatorExpr(n, {0: 1.0})


def zero(n: int) -> OperatorExpr:
    return OperatorExpr(n)


def pauli(n: int, text: str, coeff: complex = 1.0) -> OperatorExpr:
    """Single string from its sparse rendering, e.g. ``pauli(3, "Z1 X3")``."""
    return OperatorExpr.from_string(PauliString.parse(n, text), coeff)


def single(n: int, site: int, letter: str) -> OperatorExpr:
    _check_site(site, n)
    return OperatorExpr(n, {_LETTER_TO_CODE[letter.upper()] << (2 * (site - 1)): 1.0})


def z_string(n: int, sites: Iterable[int]) -> OperatorExpr:
    key = 0
    for s in sites:
        _check_site(s, n)
        key ^= 2 << (2 * (s - 1))
    return OperatorExpr(n, {key: 1.0})


def sigma(j: int, sign: int, n: int) -> OperatorExpr:
    """``S_j^+ = (X_j + iY_j)/2`` or ``S_j^- = (X_j - iY_j)/2``."""
    _check_site(j, n)
    s = 1 if sign > 0 else -1
    return OperatorExpr(n, {1 << (2 * (j - 1)): 0.5, 3 << (2 * (j - 1)): 0.5j * s})


def projector(j: int, sign: int, n: int) -> OperatorExpr:
    """``E_j^+ = (Id + Z_j)/2`` or ``E_j^- = (Id - Z_j)/2``."""
    _check_site(j, n)
    s = 1 if sign > 0 else -1
    return OperatorExpr(n, {0: 0.5, 2 << (2 * (j - 1)): 0.5 * s})


def _two_site(i: int, j: int, n: int) -> None:
    _check_site(i, n)
    _check_site(j, n)
    if i == j:
        raise ContractError("two-site operator needs distinct sites")


def flip_flop(i: int, j: int, sign: int, n: int) -> OperatorExpr:
    """``T_ij^(+/-) = S_i^+ S_j^- +/- S_i^- S_j^+`` for any site order."""
    _two_site(i, j, n)
    s = 1 if sign > 0 else -1
    return sigma(i, +1, n) * sigma(j, -1, n) + s * (sigma(i, -1, n) * sigma(j, +1, n))


def double_quantum(i: int, j: int, sign: int, n: int) -> OperatorExpr:
    """``D_ij^(+/-) = S_i^+ S_j^+ +/- S_i^- S_j^-``."""
    _two_site(i, j, n)
    s = 1 if sign > 0 else -1
    return sigma(i, +1, n) * sigma(j, +1, n) + s * (sigma(i, -1, n) * sigma(j, -1, n))


def modified_flip_flop(i: int, j: int, sign: int, n: int) -> OperatorExpr:
    """Flip-flop dressed with Z on every site strictly between ``i`` and ``j``.

    The string follows node-label order, so the result depends on labeling
    for anything other than a nearest-neighbour chain.
    """
    _two_site(i, j, n)
    lo, hi = min(i, j), max(i, j)
    return flip_flop(i, j, sign, n) * z_string(n, range(lo + 1, hi))


class HamiltonianKind(enum.Enum):
    XY = "xy"
    DQ = "dq"
    MXY = "mxy"

    @classmethod
    def parse(cls, value: str | HamiltonianKind) -> HamiltonianKind:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ContractError(f"unknown Hamiltonian kind {value!r}; expected xy, dq or mxy") from None


_BUILDERS = {
    HamiltonianKind.XY: flip_flop,
    HamiltonianKind.DQ: double_quantum,
    HamiltonianKind.MXY: modified_flip_flop,
}


def build_coupling(kind: HamiltonianKind | str, i: int, j: int, sign: int, n: int) -> OperatorExpr:
    """Two-site coupling operator of the requested kind with ``i < j``.

    Callers holding ``j > i`` should canonicalize with ``T_ji = +/- T_ij``.
    """
    kind = HamiltonianKind.parse(kind)
    if i >= j:
        raise ContractError(f"coupling indices must satisfy i < j, got ({i}, {j})")
    return _BUILDERS[kind](i, j, sign, n)
