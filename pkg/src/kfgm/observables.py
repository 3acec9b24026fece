"""Local densities, currents, boundary functionals and tensor identities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg_core as lc
from .errors import InternalConsistencyError, InvalidParameterError
from .states_grid import (
    FvState, Grid, KfgHistory, KfgState, Units, bc_sign, d1, kfg_from_fv,
    state_with_separated_bc, trapezoid,
)

KINDS = ("rho", "rho_en", "j", "j_en", "K00", "K10", "T00", "T10", "custom")
REAL_KINDS = ("rho", "j", "K00", "T00", "T10")


@dataclass(frozen=True, eq=False)
class ObservableField:
    values: np.ndarray
    kind: str = "custom"
    x: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown observable kind {self.kind!r}")
        v = np.array(self.values)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def at_a(self):
        return self.values[..., 0]

    @property
    def at_b(self):
        return self.values[..., -1]

    @property
    def max_imag(self) -> float:
        return float(np.max(np.abs(np.imag(self.values))))

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def jump(self) -> complex:
        """[f]_a^b = f(b) - f(a)."""
        return complex(self.at_b - self.at_a)


def _same_grid(p: FvState, q: FvState) -> None:
    if p.grid != q.grid:
        raise InvalidParameterError("states live on different grids")


def density_rho(state: FvState) -> ObservableField:
    p1, p2 = state.phi1, state.phi2
    return ObservableField((np.conj(p1) * p1 - np.conj(p2) * p2).real, "rho", state.grid.x)


def energy_density_rho_en(state: FvState, state_dot: FvState, units: Units = Units()) -> ObservableField:
    _same_grid(state, state_dot)
    val = 1j * units.hbar * (np.conj(state.phi1) * state_dot.phi1 - np.conj(state.phi2) * state_dot.phi2)
    return ObservableField(val, "rho_en", state.grid.x)


def _w_form(pa: np.ndarray, qb: np.ndarray) -> np.ndarray:
    """Pointwise ((tau3 + i tau2) p)^dagger (tau3 + i tau2) q for (2, n) arrays."""
    wp = lc.W @ pa
    wq = lc.W @ qb
    return np.sum(np.conj(wp) * wq, axis=0)


def current_j_matrix(state: FvState, units: Units = Units()) -> np.ndarray:
    dx = state.dx()
    bracket = _w_form(dx, state.components) - _w_form(state.components, dx)
    return 1j * units.hbar / (2 * units.m) * 0.5 * bracket


def current_j(state: FvState, units: Units = Units()) -> ObservableField:
    """Ordinary KFG current from the scalar field phi = phi1 + phi2."""
    phi = kfg_from_fv(state)
    dphi = state.dx()[0] + state.dx()[1]
    val = 1j * units.hbar / (4 * units.m) * (2 * np.conj(dphi) * phi - 2 * np.conj(phi) * dphi)
    return ObservableField(val, "j", state.grid.x)


def energy_current_matrix(state: FvState, state_dot: FvState, units: Units = Units()) -> np.ndarray:
    dx = state.dx()
    dxd = state_dot.dx()
    bracket = _w_form(dx, state_dot.components) - _w_form(state.components, dxd)
    return -(units.hbar**2) / (2 * units.m) * 0.5 * bracket


def energy_current_scalar(phi, dphi, phi_dot, dphi_dot, units: Units = Units()) -> np.ndarray:
    return -(units.hbar**2) / (2 * units.m) * (np.conj(dphi) * phi_dot - np.conj(phi) * dphi_dot)


def energy_current_j_en(state: FvState, state_dot: FvState, units: Units = Units(),
                        check_tol: float = 1e-9) -> ObservableField:
    """Energy current density; the scalar form is returned.

    The matrix form on the two-component spinors is evaluated alongside and
    must agree to ``check_tol`` (relative to the field scale).
    """
    _same_grid(state, state_dot)
    dx, dxd = state.dx(), state_dot.dx()
    scalar = energy_current_scalar(
        kfg_from_fv(state), dx[0] + dx[1], kfg_from_fv(state_dot), dxd[0] + dxd[1], units
    )
    matrix = energy_current_matrix(state, state_dot, units)
    scale = max(1.0, float(np.max(np.abs(scalar))))
    if np.max(np.abs(scalar - matrix)) > check_tol * scale:
        raise InternalConsistencyError("scalar and matrix forms of j_en disagree")
    return ObservableField(scalar, "j_en", state.grid.x)


def boundary_term_f(psi: FvState, phi: FvState, units: Units = Units()) -> complex:
    """i hbar [Psi^dagger tau3 Phi]_a^b."""
    _same_grid(psi, phi)
    fb = lc.tau3_pairing(psi.at_b, phi.at_b)
    fa = lc.tau3_pairing(psi.at_a, phi.at_a)
    return 1j * units.hbar * (fb - fa)


def boundary_term_g(psi: FvState, phi: FvState, units: Units = Units(), check_tol: float = 1e-9) -> complex:
    """Boundary term of the FV Hamiltonian, scalar form; matrix form cross-checked."""
    _same_grid(psi, phi)
    pref = -(units.hbar**2) / (2 * units.m)
    dpsi, dphi = psi.dx(), phi.dx()
    idx = [0, -1]
    mat = 0.5 * (_w_form(dpsi[:, idx], phi.components[:, idx]) - _w_form(psi.components[:, idx], dphi[:, idx]))
    g_mat = pref * (mat[1] - mat[0])
    s_psi, s_phi = kfg_from_fv(psi), kfg_from_fv(phi)
    ds_psi, ds_phi = dpsi[0] + dpsi[1], dphi[0] + dphi[1]
    sc = np.conj(ds_psi[idx]) * s_phi[idx] - np.conj(s_psi[idx]) * ds_phi[idx]
    g_sc = pref * (sc[1] - sc[0])
    if abs(g_mat - g_sc) > check_tol * max(1.0, abs(g_sc)):
        raise InternalConsistencyError("matrix and scalar forms of g disagree")
    return complex(g_sc)


def indefinite_inner_product(psi: FvState, phi: FvState) -> complex:
    _same_grid(psi, phi)
    integrand = np.conj(psi.phi1) * phi.phi1 - np.conj(psi.phi2) * phi.phi2
    return complex(trapezoid(integrand, psi.grid.spacing))


def energy_integral(state: FvState, state_dot: FvState, units: Units = Units()) -> complex:
    return complex(trapezoid(energy_density_rho_en(state, state_dot, units).values, state.grid.spacing))


# ---------------------------------------------------------------------------
# tensors on histories


@dataclass(frozen=True, eq=False)
class TensorFields:
    """Tensor components on the interior time levels ``1 .. T-2`` of a history."""

    K00: np.ndarray
    K10: np.ndarray
    T00: np.ndarray
    T10: np.ndarray
    K_upper01: np.ndarray
    K_upper10: np.ndarray
    kt_residual: float
    divergence_residual: float
    symmetry_residual: float


def tensor_fields(hist: KfgHistory, units: Units = Units()) -> TensorFields:
    if hist.levels < 5:
        raise InvalidParameterError("tensor identities need at least 5 time levels")
    hb, m, c = units.hbar, units.m, units.c
    h, dt = hist.grid.spacing, hist.dt
    wrap = bc_sign(hist.bc)
    phi_all, phid_all = hist.phi, hist.phi_dot
    sl = slice(1, -1)
    phi, phid = phi_all[sl], phid_all[sl]
    phidd = (phid_all[2:] - phid_all[:-2]) / (2 * dt)
    dphi = d1(phi, h, wrap)
    dphid = d1(phid, h, wrap)
    cj = np.conj
    K00 = hb**2 / (2 * m * c**2) * (cj(phid) * phid - cj(phi) * phidd)
    K10 = -(hb**2) / (2 * m * c) * (cj(dphi) * phid - cj(phi) * dphid)
    T00 = hb**2 / (2 * m) * (cj(phid) * phid / c**2 + cj(dphi) * dphi + (m * c / hb) ** 2 * cj(phi) * phi)
    T10 = -(hb**2) / (2 * m * c) * (cj(phid) * dphi + cj(dphi) * phid)
    lag = hb**2 / (2 * m) * (cj(phid) * phid / c**2 - cj(dphi) * dphi - (m * c / hb) ** 2 * cj(phi) * phi)
    # time derivatives of the products, from neighbouring snapshots
    prod0 = cj(phi_all) * phid_all
    prod1 = cj(phi_all) * d1(phi_all, h, wrap)
    dprod0 = (prod0[2:] - prod0[:-2]) / (2 * dt)
    dprod1 = (prod1[2:] - prod1[:-2]) / (2 * dt)
    rhs00 = T00 + lag - hb**2 / (2 * m) * dprod0 / c**2
    rhs10 = T10 + hb**2 / (2 * m * c) * dprod1
    kt = max(float(np.max(np.abs(K00 - rhs00))), float(np.max(np.abs(K10 - rhs10))))
    # d_0 K^0_0 + d_1 K^1_0 on levels 2 .. T-3, interior samples
    dK00 = (K00[2:] - K00[:-2]) / (2 * dt) / c
    # bilinear fields are periodic under either wrapped BC
    dK10 = d1(K10[1:-1], h, None if wrap is None else 1.0)
    div = dK00 + dK10
    if wrap is None:
        div = div[:, 1:-1]
    div = float(np.max(np.abs(div)))
    ku01 = hb**2 / (2 * m * c) * (cj(phi) * dphid - cj(phid) * dphi)
    ku10 = hb**2 / (2 * m * c) * (cj(phi) * dphid - cj(dphi) * phid)
    return TensorFields(
        K00=K00, K10=K10, T00=T00, T10=T10, K_upper01=ku01, K_upper10=ku10,
        kt_residual=kt, divergence_residual=div,
        symmetry_residual=float(np.max(np.abs(ku01 - ku10))),
    )


def kfg_energy_density(phi, phi_dot, phi_ddot, units: Units = Units()) -> np.ndarray:
    """rho_en written with the scalar field: hbar^2/(2 m c^2) (|phi_dot|^2 - phi^* phi_ddot)."""
    return units.hbar**2 / (2 * units.rest_energy) * (np.conj(phi_dot) * phi_dot - np.conj(phi) * phi_ddot)


def history_energy_fields(hist: KfgHistory, units: Units = Units()) -> tuple[np.ndarray, np.ndarray]:
    """(rho_en, j_en) on the interior time levels of a history."""
    h, dt = hist.grid.spacing, hist.dt
    wrap = bc_sign(hist.bc)
    phi, phid = hist.phi[1:-1], hist.phi_dot[1:-1]
    phidd = (hist.phi_dot[2:] - hist.phi_dot[:-2]) / (2 * dt)
    rho = kfg_energy_density(phi, phid, phidd, units)
    j = energy_current_scalar(phi, d1(phi, h, wrap), phid, d1(phid, h, wrap), units)
    return rho, j


def continuity_residual(density, current, dt: float, dx: float, units: Units = Units(),
                        wrap: float | None = None) -> float:
    """max |E rho - p j| = hbar max |d_t rho + d_x j| over interior samples.

    ``wrap`` is the wrap sign of the bilinear fields themselves, i.e. +1 for
    both periodic and antiperiodic states and None for open intervals.
    """
    density = np.asarray(density)
    current = np.asarray(current)
    if density.ndim != 2 or density.shape[0] < 3:
        raise InvalidParameterError("need at least 3 time levels")
    if density.shape != current.shape:
        raise InvalidParameterError("density and current histories differ in shape")
    dt_rho = (density[2:] - density[:-2]) / (2 * dt)
    dx_j = d1(current[1:-1], dx, wrap)
    res = dt_rho + dx_j
    if wrap is None:
        res = res[:, 1:-1]
    return units.hbar * float(np.max(np.abs(res)))


def wall_energy_current(state: KfgState, units: Units = Units()) -> tuple[complex, complex]:
    """Scalar j_en at x = a and x = b from a KFG time slice."""
    j = energy_current_scalar(state.phi, state.dx(), state.phi_dot, state.dx_dot(), units)
    return complex(j[0]), complex(j[-1])


def separated_wall_currents(m0_sign: int, sizes, seed: int = 0, length: float = 2 * np.pi,
                            units: Units = Units()) -> np.ndarray:
    """Max wall |j_en| for separated-branch states on successively finer grids.

    Each grid gets a state drawn from the same seed, so the underlying
    smooth field is shared and only the clamp changes with h.
    """
    out = []
    for n in sizes:
        st = state_with_separated_bc(Grid(0.0, length, n), m0_sign, np.random.default_rng(seed))
        out.append(max(abs(v) for v in wall_energy_current(st, units)))
    return np.array(out)
