"""Sampled fidelity curves, peak refinement and CSV output."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from .errors import ContractError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FidelityTrace:
    times: np.ndarray
    values: np.ndarray
    t_star: float
    f_star: float

    @property
    def peak(self) -> tuple[float, float]:
        return self.t_star, self.f_star

    def to_csv(self, out: TextIO, alpha_ref: float | None = None) -> None:
        """``t,fidelity`` rows with 17 significant digits.

        When ``alpha_ref`` is given a leading comment records it so that
        consumers can rescale to dimensionless ``alpha_ref * t``.
        """
        if alpha_ref is not None:
            out.write(f"# alpha_ref={alpha_ref:.17g} (normalized time = alpha_ref * t)\n")
        out.write("t,fidelity\n")
        for t, f in zip(self.times, self.values):
            out.write(f"{t:.17g},{f:.17g}\n")

    def csv_text(self, alpha_ref: float | None = None) -> str:
        buf = io.StringIO()
        self.to_csv(buf, alpha_ref)
        return buf.getvalue()


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[a, b]``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)


def polish_peak(f: Callable[[float], float], t: float, lo: float, hi: float, h: float = 1e-3) -> float:
    """Sharpen a maximum located to ~sqrt(eps) by fitting a quartic around it.

    Near a smooth peak ``f`` is flat to second order, so comparisons of
    values stop resolving ``t`` below ~1e-8.  The stationary point of a
    least-squares quartic through nine nearby samples is limited instead
    by ``eps / (f'' h)``.  The input is returned unchanged when the fit is
    not concave or its vertex leaves the bracket.
    """
    h = min(h, (hi - lo) / 8.0)
    if h <= 0:
        return t
    xs = t + h * np.arange(-4, 5)
    ys = np.array([f(float(x)) for x in xs])
    poly = np.polynomial.Polynomial.fit(xs - t, ys, 4)
    d1, d2 = poly.deriv(), poly.deriv(2)
    x = 0.0
    for _ in range(8):
        curv = d2(x)
        if not curv < 0:
            return t
        x -= d1(x) / curv
    if not (abs(x) <= 4 * h and lo <= t + x <= hi):
        return t
    return float(t + x)


def uniform_grid(t_max: float, samples: int) -> np.ndarray:
    if samples < 2:
        raise ContractError("a trace needs at least two samples")
    if not (math.isfinite(t_max) and t_max > 0):
        raise ContractError(f"t_max must be positive and finite, got {t_max!r}")
    return np.linspace(0.0, t_max, samples)


def refine_peak(
    f: Callable[[float], float],
    times: np.ndarray,
    values: np.ndarray,
    tol: float = 1e-10,
    candidates: int = 8,
) -> tuple[float, float]:
    """Refine the global maximum of a sampled smooth curve.

    The highest few local maxima of the samples are each refined on their
    neighbouring bracket; the best refined value wins and near-ties
    (within 1e-12) go to the earliest time.
    """
    v = np.asarray(values)
    k = len(v)
    is_peak = np.ones(k, dtype=bool)
    is_peak[1:] &= v[1:] >= v[:-1]
    is_peak[:-1] &= v[:-1] >= v[1:]
    idx = np.flatnonzero(is_peak)
    idx = idx[np.argsort(-v[idx], kind="stable")][:candidates]

    best: tuple[float, float] | None = None
    for i in sorted(idx):
        lo, hi = times[max(i - 1, 0)], times[min(i + 1, k - 1)]
        t, ft = golden_max(f, float(lo), float(hi), tol)
        tp = polish_peak(f, t, float(lo), float(hi))
        fp = f(tp)
        if fp >= ft - 1e-15:
            t, ft = tp, max(fp, ft)
        if ft < v[i]:
            t, ft = float(times[i]), float(v[i])
        if best is None or ft > best[1] + 1e-12:
            best = (t, ft)
    assert best is not None
    return best


def build_trace(
    f_scalar: Callable[[float], float],
    f_vector: Callable[[np.ndarray], np.ndarray],
    t_max: float,
    samples: int,
) -> FidelityTrace:
    times = uniform_grid(t_max, samples)
    values = np.asarray(f_vector(times), dtype=float)
    t_star, f_star = refine_peak(f_scalar, times, values)
    return FidelityTrace(times, values, t_star, f_star)
