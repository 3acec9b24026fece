"""Time evolution of the real (or imaginary) KFG field on wrapped intervals."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import CFLViolationError, InvalidParameterError, UnsupportedBoundaryError
from ..states_grid import MINUS, PLUS, Grid, KfgHistory, KfgState, Units, bc_name, bc_sign, d2, parity_transform

DEFAULT_CFL = 0.5


def _wrap_sign(bc) -> float:
    s = bc_sign(bc)
    if s is None:
        raise UnsupportedBoundaryError("time evolution supports periodic and antiperiodic BCs only")
    return s


def wrapped_laplacian(u: np.ndarray, h: float, s: float) -> np.ndarray:
    """Stencil d^2/dx^2 on the n-1 distinct samples, with u(b) = s u(a)."""
    up = np.empty_like(u)
    dn = np.empty_like(u)
    up[..., :-1] = u[..., 1:]
    up[..., -1] = s * u[..., 0]
    dn[..., 1:] = u[..., :-1]
    dn[..., 0] = s * u[..., -1]
    return (up - 2 * u + dn) / h**2


def _to_full(u: np.ndarray, s: float) -> np.ndarray:
    return np.concatenate([u, s * u[..., :1]], axis=-1)


def _field_part(values: np.ndarray, sign):
    """Real array evolved for a Majorana field, and the factor restoring it."""
    if sign == PLUS:
        return np.real(values).astype(float), 1.0
    if sign == MINUS:
        return np.imag(values).astype(float), 1j
    return np.asarray(values, dtype=complex), 1.0


@dataclass(frozen=True, eq=False)
class EvolutionRun:
    initial: KfgState
    bc: str
    dt: float
    steps: int
    stride: int = 1
    cfl_factor: float = DEFAULT_CFL
    snapshots: tuple = field(default_factory=tuple)
    times: tuple = field(default_factory=tuple)
    energies: tuple = field(default_factory=tuple)
    last: KfgState | None = None

    def __post_init__(self):
        object.__setattr__(self, "bc", bc_name(self.bc))
        if self.dt <= 0 or self.steps < 0 or self.stride < 1:
            raise InvalidParameterError("dt > 0, steps >= 0 and stride >= 1 are required")
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise InvalidParameterError("snapshot times must increase strictly")

    @property
    def grid(self) -> Grid:
        return self.initial.grid

    @property
    def final(self) -> KfgState:
        if self.last is not None:
            return self.last
        return self.snapshots[-1] if self.snapshots else self.initial

    def history(self) -> KfgHistory:
        if not self.snapshots:
            raise InvalidParameterError("run has no snapshots")
        return KfgHistory(
            self.grid, self.dt * self.stride,
            np.array([s.phi for s in self.snapshots]),
            np.array([s.phi_dot for s in self.snapshots]),
            t0=self.times[0], bc=self.bc, majorana_sign=self.initial.majorana_sign,
        )


def check_cfl(grid: Grid, dt: float, units: Units, cfl_factor: float = DEFAULT_CFL) -> None:
    limit = cfl_factor * grid.spacing / units.c
    if dt > limit * (1 + 1e-12):
        raise CFLViolationError(f"dt={dt:.3g} exceeds the CFL limit {limit:.3g}")


def leapfrog_energy(u: np.ndarray, v: np.ndarray, dt: float, h: float, s: float, units: Units) -> float:
    """Energy integral conserved exactly (to rounding) by the velocity-Verlet map.

    With K = -c^2 D2 + (m c^2 / hbar)^2 this is
    hbar^2/(2 m c^2) h sum(|v|^2 + u* K u - dt^2/4 |K u|^2); the last term is
    the O(dt^2) staggering correction and the rest is the quadrature of rho_en.
    """
    w0 = units.rest_energy / units.hbar
    ku = -units.c**2 * wrapped_laplacian(u, h, s) + w0**2 * u
    val = np.vdot(v, v) + np.vdot(u, ku) - 0.25 * dt**2 * np.vdot(ku, ku)
    return float(np.real(val)) * h * units.hbar**2 / (2 * units.rest_energy)


def collocated_energy(state: KfgState, units: Units) -> float:
    """Quadrature of rho_en at a single time level (no staggering correction)."""
    s = _wrap_sign(state.bc)
    h = state.grid.spacing
    u, v = state.phi[:-1], state.phi_dot[:-1]
    w0 = units.rest_energy / units.hbar
    ku = -units.c**2 * wrapped_laplacian(u, h, s) + w0**2 * u
    val = np.vdot(v, v) + np.vdot(u, ku)
    return float(np.real(val)) * h * units.hbar**2 / (2 * units.rest_energy)


def evolve_leapfrog(run: EvolutionRun, units: Units = Units()) -> EvolutionRun:
    """Velocity-Verlet integration of hbar^2 phi_tt = hbar^2 c^2 phi_xx - m^2 c^4 phi."""
    grid = run.grid
    s = _wrap_sign(run.bc)
    check_cfl(grid, run.dt, units, run.cfl_factor)
    sign = run.initial.majorana_sign
    u, fac = _field_part(run.initial.phi[:-1], sign)
    v, _ = _field_part(run.initial.phi_dot[:-1], sign)
    u, v = u.copy(), v.copy()
    h, dt = grid.spacing, run.dt
    w0sq = (units.rest_energy / units.hbar) ** 2
    c2 = units.c**2

    def accel(x):
        return c2 * wrapped_laplacian(x, h, s) - w0sq * x

    def snap(t):
        return KfgState(grid, fac * _to_full(u, s), fac * _to_full(v, s), majorana_sign=sign, bc=run.bc)

    snaps, times, energies = [snap(0.0)], [0.0], [leapfrog_energy(u, v, dt, h, s, units)]
    a = accel(u)
    for step in range(1, run.steps + 1):
        v_half = v + 0.5 * dt * a
        u = u + dt * v_half
        a = accel(u)
        v = v_half + 0.5 * dt * a
        if step % run.stride == 0:
            snaps.append(snap(step * dt))
            times.append(step * dt)
            energies.append(leapfrog_energy(u, v, dt, h, s, units))
    last = snaps[-1] if times[-1] == run.steps * dt else snap(run.steps * dt)
    return replace(run, snapshots=tuple(snaps), times=tuple(times), energies=tuple(energies), last=last)


def energy_drift(run: EvolutionRun) -> float:
    e = np.array(run.energies)
    if len(e) == 0:
        raise InvalidParameterError("run has no recorded energies")
    return float(np.max(np.abs(e - e[0])) / abs(e[0]))


def time_reversal_error(run: EvolutionRun, units: Units = Units()) -> float:
    """Evolve, flip phi_dot, evolve again, flip back; max deviation from the start."""
    fwd = evolve_leapfrog(replace(run, stride=max(run.steps, 1)), units).final
    back_init = KfgState(fwd.grid, fwd.phi, -fwd.phi_dot, majorana_sign=fwd.majorana_sign, bc=fwd.bc)
    back = evolve_leapfrog(replace(run, initial=back_init, stride=max(run.steps, 1)), units).final
    dphi = np.max(np.abs(back.phi - run.initial.phi))
    dvel = np.max(np.abs(-back.phi_dot - run.initial.phi_dot))
    return float(max(dphi, dvel))


# ---------------------------------------------------------------------------
# exact propagator


def _twisted_wavenumbers(m: int, h: float, s: float) -> np.ndarray:
    k = 2 * np.pi * np.fft.fftfreq(m, d=h)
    if s < 0:
        k = k + np.pi / (m * h)
    return k


def mode_frequencies(k: np.ndarray, h: float, units: Units, dispersion: str = "continuum") -> np.ndarray:
    w0sq = (units.rest_energy / units.hbar) ** 2
    if dispersion == "continuum":
        ksq = k * k
    elif dispersion == "fd":
        ksq = (2 * np.sin(0.5 * k * h) / h) ** 2
    else:
        raise InvalidParameterError(f"unknown dispersion {dispersion!r}")
    return np.sqrt(w0sq + units.c**2 * ksq)


def evolve_spectral_exact(state: KfgState, t: float, bc=None, units: Units = Units(),
                          dispersion: str = "continuum") -> KfgState:
    """Rotate every Fourier mode of (phi, phi_dot) by its exact phase.

    ``dispersion='continuum'`` uses omega^2 = (m c^2/hbar)^2 + c^2 k^2 (the
    band-limited interpolant evolves exactly); ``'fd'`` uses the symbol of the
    three-point stencil, giving the exact solution of the space-discrete system.
    """
    bc = bc_name(bc if bc is not None else state.bc)
    s = _wrap_sign(bc)
    grid = state.grid
    m, h = grid.n - 1, grid.spacing
    sign = state.majorana_sign
    u, fac = _field_part(state.phi[:-1], sign)
    v, _ = _field_part(state.phi_dot[:-1], sign)
    j = np.arange(m)
    twist = np.exp(-1j * np.pi * j / m) if s < 0 else np.ones(m)
    uh = np.fft.fft(u * twist)
    vh = np.fft.fft(v * twist)
    k = _twisted_wavenumbers(m, h, s)
    w = mode_frequencies(k, h, units, dispersion)
    cw, sw = np.cos(w * t), np.sin(w * t)
    uh_t = uh * cw + vh * sw / w
    vh_t = -uh * w * sw + vh * cw
    u_t = np.fft.ifft(uh_t) / twist
    v_t = np.fft.ifft(vh_t) / twist
    if np.isrealobj(u):
        u_t, v_t = u_t.real, v_t.real
    return KfgState(grid, fac * _to_full(u_t, s), fac * _to_full(v_t, s), majorana_sign=sign, bc=bc)


def leapfrog_error_vs_exact(initial: KfgState, t_final: float, dt: float, units: Units = Units(),
                            dispersion: str = "fd") -> float:
    steps = int(round(t_final / dt))
    if abs(steps * dt - t_final) > 1e-9 * t_final:
        raise InvalidParameterError("t_final must be a whole number of steps")
    run = evolve_leapfrog(EvolutionRun(initial, initial.bc, dt, steps, stride=max(steps, 1)), units)
    got = run.final
    ref = evolve_spectral_exact(initial, t_final, units=units, dispersion=dispersion)
    return float(np.max(np.abs(got.phi - ref.phi)))


# ---------------------------------------------------------------------------
# FV form of the evolution


def fv_equation_residual(phi1, phi1_t, phi1_xx, sign: str, units: Units = Units()) -> np.ndarray:
    """i hbar phi1_t + hbar^2/2m (phi1 +/- phi1*)_xx - m c^2 phi1 (pointwise)."""
    sg = 1.0 if sign == PLUS else -1.0
    return (
        1j * units.hbar * phi1_t
        + units.hbar**2 / (2 * units.m) * (phi1_xx + sg * np.conj(phi1_xx))
        - units.rest_energy * phi1
    )


def verify_fv_evolution(source, units: Units = Units(), sign: str | None = None) -> float:
    """Max residual of the first-order equation for phi1 on a history.

    ``source`` is an EvolutionRun or a KfgHistory; phi1 comes from the
    standard two-component split and time derivatives are centered.
    """
    hist = source.history() if isinstance(source, EvolutionRun) else source
    if hist.levels < 3:
        raise InvalidParameterError("need at least 3 snapshots")
    sign = sign or hist.majorana_sign
    if sign not in (PLUS, MINUS):
        raise InvalidParameterError("a Majorana sign is required")
    wrap = bc_sign(hist.bc)
    phi1 = 0.5 * (hist.phi + 1j * units.kappa * hist.phi_dot)
    phi1_t = (phi1[2:] - phi1[:-2]) / (2 * hist.dt)
    mid = phi1[1:-1]
    phi1_xx = d2(mid, hist.grid.spacing, wrap)
    res = fv_equation_residual(mid, phi1_t, phi1_xx, sign, units)
    if wrap is None:
        res = res[:, 1:-1]
    return float(np.max(np.abs(res)))


def parity_commutation_error(run: EvolutionRun, units: Units = Units()) -> float:
    """max |evolve(P state) - P evolve(state)| for the final phi and phi_dot."""
    one = replace(run, stride=max(run.steps, 1))
    direct = parity_transform(evolve_leapfrog(one, units).final)
    mirrored = evolve_leapfrog(replace(one, initial=parity_transform(run.initial)), units).final
    return float(max(np.max(np.abs(direct.phi - mirrored.phi)), np.max(np.abs(direct.phi_dot - mirrored.phi_dot))))
