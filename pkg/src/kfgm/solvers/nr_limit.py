"""Scaling of the nonrelativistic reduction of the Majorana phi1 equations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError
from ..states_grid import MINUS, PLUS, Units

NR_MAX_RATIO = 0.1


@dataclass(frozen=True)
class NrPoint:
    ratio: float
    bracket_residual: float
    schrodinger_residual: float
    term_scale: float


@dataclass(frozen=True)
class NrReport:
    sign: str
    points: tuple
    slope: float
    schrodinger_min: float

    def rows(self) -> list[dict]:
        return [
            {"sign": self.sign, "hbar_k_over_mc": p.ratio, "bracket_residual": p.bracket_residual,
             "schrodinger_residual": p.schrodinger_residual, "term_scale": p.term_scale}
            for p in self.points
        ]


def _mode_pieces(k: float, sign: str, units: Units, x: np.ndarray, t: np.ndarray):
    """Stripped positive-frequency part psi and full stripped phi1 for one mode.

    The mode is phi = cos(k x - w t) (plus) or i cos(k x - w t) (minus).
    Returns arrays over (t, x) for psi, psi_t, psi_xx and the same for the
    full phase-stripped phi1, all from exact derivatives.
    """
    w = float(units.omega(k))
    w0 = units.rest_energy / units.hbar
    amp = 0.5 if sign == PLUS else 0.5j
    # phi = amp e^{i theta} + conj-partner; conj-partner is +/- conj(amp) e^{-i theta}
    partner = np.conj(amp) if sign == PLUS else -np.conj(amp)
    tt, xx = np.meshgrid(t, x, indexing="ij")
    pos = np.exp(1j * (k * xx - (w - w0) * tt))
    neg = np.exp(-1j * (k * xx - (w + w0) * tt))
    c_pos = 0.5 * (1 + w / w0) * amp
    c_neg = 0.5 * (1 - w / w0) * partner
    psi = c_pos * pos
    psi_t = -1j * (w - w0) * psi
    psi_xx = -(k**2) * psi
    neg_part = c_neg * neg
    full = psi + neg_part
    full_t = psi_t + 1j * (w + w0) * neg_part
    full_xx = psi_xx - (k**2) * neg_part
    return (psi, psi_t, psi_xx), (full, full_t, full_xx), tt


def _operator(f, f_t, f_xx, units: Units):
    """(-i hbar d_t - hbar^2/2m d_xx) f, plus its two separate terms."""
    a = -1j * units.hbar * f_t
    b = -(units.hbar**2) / (2 * units.m) * f_xx
    return a + b, a, b


def nr_point(ratio: float, sign: str, units: Units = Units(), samples: int = 64) -> NrPoint:
    if sign not in (PLUS, MINUS):
        raise InvalidParameterError("sign must be 'plus' or 'minus'")
    if abs(ratio) > NR_MAX_RATIO:
        raise InvalidParameterError(f"hbar k / m c must not exceed {NR_MAX_RATIO}")
    k = ratio * units.compton_k
    w0 = units.rest_energy / units.hbar
    period = 2 * np.pi / w0
    length = 2 * np.pi / k if k else 1.0
    x = np.linspace(0.0, length, samples, endpoint=False)
    t = np.linspace(0.0, 3 * period, samples)
    (psi, psi_t, psi_xx), (full, full_t, full_xx), tt = _mode_pieces(k, sign, units, x, t)
    phase = np.exp(-1j * w0 * tt)
    op, a, b = _operator(psi, psi_t, psi_xx, units)
    reduced = phase * op
    part = np.real(reduced) if sign == PLUS else np.imag(reduced)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    bracket = float(np.max(np.abs(part)))
    rel_bracket = bracket / scale if scale > 0 else bracket
    op_full, a_full, b_full = _operator(full, full_t, full_xx, units)
    scale_full = max(np.max(np.abs(a_full)), np.max(np.abs(b_full)))
    sch = float(np.max(np.abs(op_full)))
    rel_sch = sch / scale_full if scale_full > 0 else sch
    return NrPoint(float(ratio), float(rel_bracket), float(rel_sch), float(scale))


def nr_limit_experiment(k_list, units: Units = Units(), sign: str = PLUS) -> NrReport:
    """Fit log(relative residual) against log(hbar k / m c).

    ``k_list`` holds wavenumbers. (phi1)_NR is the positive-frequency part of
    phi1 with the rest-energy phase stripped; its reduced equation (real part
    for plus, imaginary part for minus) is compared with the size of its own
    terms. The Schrodinger operator applied to the full stripped phi1, which
    keeps the counter-rotating partner tied to it by the Majorana condition,
    is reported alongside.
    """
    ks = np.asarray(list(k_list), dtype=float)
    if ks.size < 3:
        raise InvalidParameterError("need at least 3 wavenumbers")
    ratios = ks / units.compton_k
    if np.any(ratios <= 0):
        raise InvalidParameterError("wavenumbers must be positive for the scaling fit")
    points = tuple(nr_point(r, sign, units) for r in ratios)
    res = np.array([p.bracket_residual for p in points])
    slope = float(np.polyfit(np.log(ratios), np.log(res), 1)[0])
    return NrReport(sign, points, slope, float(min(p.schrodinger_residual for p in points)))
