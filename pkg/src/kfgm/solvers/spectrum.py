"""Stationary spectra: closed forms, stencil eigen-oracle and the mu family."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ..bc_families import Branch, KfgSubspace, TransferMatrixV, flux_balanced_transfer
from ..errors import EvanescentRegimeError, InvalidParameterError, UnsupportedBoundaryError
from ..observables import energy_current_j_en
from ..states_grid import FvState, Grid, Units, bc_name, bc_sign, hamiltonian_domain_check
from .jacobi import block_jacobi_eigenvalues, jacobi_eigenvalues

FD_MAX_POINTS = 600


@dataclass(frozen=True)
class SpectrumEntry:
    n: int
    k: float
    e_plus: float
    e_minus: float
    flux_residual: float = float("nan")
    domain_residual: float = float("nan")
    quantization_residual: float = float("nan")


@dataclass(frozen=True)
class SpectrumResult:
    entries: tuple = ()
    label: str = ""
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for e in self.entries:
            if abs(e.e_plus + e.e_minus) > 1e-12 * max(1.0, abs(e.e_plus)):
                raise InvalidParameterError("E_plus must equal -E_minus")

    def __len__(self):
        return len(self.entries)

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.e_plus for e in self.entries])

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.array([e.k for e in self.entries])

    def rows(self) -> list[dict]:
        return [
            {
                "n": e.n, "k": e.k, "E_plus": e.e_plus, "E_minus": e.e_minus,
                "flux_residual": e.flux_residual, "domain_residual": e.domain_residual,
            }
            for e in self.entries
        ]


def _length(grid_or_length) -> float:
    if isinstance(grid_or_length, Grid):
        return grid_or_length.length
    length = float(grid_or_length)
    if length <= 0:
        raise InvalidParameterError("interval length must be positive")
    return length


def analytic_spectrum(bc, n_max: int, grid, units: Units = Units()) -> SpectrumResult:
    """Modes n = 0 .. n_max of the periodic or antiperiodic interval."""
    if n_max < 1:
        raise InvalidParameterError("n_max must be at least 1")
    s = bc_sign(bc)
    if s is None:
        raise UnsupportedBoundaryError("closed-form spectrum needs a periodic or antiperiodic BC")
    length = _length(grid)
    n = np.arange(n_max + 1)
    k = (2 * np.pi * n if s > 0 else (2 * n + 1) * np.pi) / length
    e = units.energy(k)
    entries = tuple(SpectrumEntry(int(i), float(kk), float(ee), float(-ee)) for i, kk, ee in zip(n, k, e))
    return SpectrumResult(entries, label=bc_name(bc))


def analytic_k2(bc, count: int, length: float) -> np.ndarray:
    """The ``count`` lowest stencil-free eigenvalues of -d^2/dx^2, with multiplicity."""
    s = bc_sign(bc)
    if s is None:
        raise UnsupportedBoundaryError("closed form needs a periodic or antiperiodic BC")
    vals = []
    j = 0
    while len(vals) < count:
        k = (2 * np.pi * j if s > 0 else (2 * j + 1) * np.pi) / length
        vals.extend([k * k] if (s > 0 and j == 0) else [k * k, k * k])
        j += 1
    return np.array(vals[:count])


def stencil_matrix(bc, grid: Grid) -> np.ndarray:
    """Symmetric matrix of the second-order -d^2/dx^2 stencil with the BC built in.

    Wrapped relations keep the n-1 distinct samples; Dirichlet keeps the
    n-2 interior samples.
    """
    h = grid.spacing
    if isinstance(bc, KfgSubspace):
        if not bc.same_as(KfgSubspace.dirichlet()):
            raise UnsupportedBoundaryError("only Dirichlet is supported among KFG subspaces")
        bc = "dirichlet"
    if bc == "dirichlet":
        m = grid.n - 2
        a = 2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
        return a / h**2
    s = bc_sign(bc)
    if s is None:
        raise UnsupportedBoundaryError(f"no stencil for bc={bc!r}")
    m = grid.n - 1
    a = 2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
    a[0, -1] -= s
    a[-1, 0] -= s
    return a / h**2


def fd_eigensolver(bc, grid: Grid, count: int | None = None, method: str = "block",
                   tol: float = 1e-12, max_sweeps: int = 40, cross_check: bool = False) -> np.ndarray:
    """Ascending k^2 eigenvalues of the stencil matrix via Jacobi sweeps."""
    if grid.n > FD_MAX_POINTS:
        raise InvalidParameterError(f"grid too large for the dense oracle (n <= {FD_MAX_POINTS})")
    a = stencil_matrix(bc, grid)
    if method == "block":
        vals = block_jacobi_eigenvalues(a, tol=tol, max_sweeps=max_sweeps)
    elif method == "scalar":
        vals = jacobi_eigenvalues(a, tol=tol, max_sweeps=max_sweeps)
    else:
        raise InvalidParameterError(f"unknown method {method!r}")
    if cross_check:
        ref = np.linalg.eigvalsh(a)
        if np.max(np.abs(ref - vals)) > 1e-8 * max(1.0, np.abs(ref).max()):
            raise InvalidParameterError("Jacobi eigenvalues disagree with the LAPACK reference")
    return vals if count is None else vals[:count]


# ---------------------------------------------------------------------------
# flux-balanced family


def _as_transfer(mu: float, branch) -> TransferMatrixV:
    if isinstance(branch, str):
        branch = Branch[branch.upper()]
    return flux_balanced_transfer(mu, branch)


def _spinor(energy: float, units: Units) -> np.ndarray:
    eps = energy / units.rest_energy
    return 0.5 * np.array([1 + eps, 1 - eps], dtype=complex)


def _wavenumber(energy: float, units: Units) -> complex:
    return np.sqrt(complex(energy**2 - units.rest_energy**2)) / (units.hbar * units.c)


def _mode_vectors(v: np.ndarray, energy: float, length: float, units: Units):
    u = _spinor(energy, units)
    k = _wavenumber(energy, units)
    vu = v @ u
    p = u * np.exp(1j * k * length) - vu
    q = u * np.exp(-1j * k * length) - vu
    return u, k, p, q


def quantization_residual(mu: float, branch, energy: float, grid, units: Units = Units(),
                          allow_evanescent: bool = False) -> float:
    """Distance from the quantization condition of the flux-balanced relation.

    For phi = A e^{ikx} + B e^{-ikx} the relations Phi(b) = V Phi(a) and
    Phi'(b) = V Phi'(a) decouple (k != 0) into p A = 0 and q B = 0 with
    p = u e^{ikL} - V u, q = u e^{-ikL} - V u and u the FV spinor of energy E.
    The residual is min(|p|, |q|) / |u|, zero exactly at eigenvalues.
    """
    if abs(energy) <= units.rest_energy and not allow_evanescent:
        raise EvanescentRegimeError("|E| <= m c^2: the wavenumber is imaginary")
    v = _as_transfer(mu, branch).matrix
    u, _, p, q = _mode_vectors(v, energy, _length(grid), units)
    return float(min(np.linalg.norm(p), np.linalg.norm(q)) / np.linalg.norm(u))


def evanescent_scan(mu: float, branch, grid, units: Units = Units(), samples: int = 401) -> float:
    """Smallest residual over |E| < m c^2 (hyperbolic basis); reported, never asserted."""
    es = np.linspace(-units.rest_energy, units.rest_energy, samples)[1:-1]
    return min(quantization_residual(mu, branch, e, grid, units, allow_evanescent=True) for e in es)


def stationary_mode_state(mu: float, branch, energy: float, grid: Grid, units: Units = Units()):
    """(Phi, Phi_dot) at t = 0 of the stationary mode closest to the relation."""
    v = _as_transfer(mu, branch).matrix
    u, k, p, q = _mode_vectors(v, energy, grid.length, units)
    sgn = 1.0 if np.linalg.norm(p) <= np.linalg.norm(q) else -1.0
    x = grid.x - grid.a
    phase = np.exp(1j * sgn * k * x)
    comp = np.outer(u, phase)
    dcomp = np.outer(u, 1j * sgn * k * phase)
    state = FvState(grid, comp, exact_dx=dcomp)
    rot = -1j * energy / units.hbar
    state_dot = FvState(grid, rot * comp, exact_dx=rot * dcomp)
    return state, state_dot


def solve_modes_family(mu: float, branch, e_window, grid, units: Units = Units(),
                       tol: float = 1e-10, accept: float = 1e-8) -> SpectrumResult:
    """All eigenvalues of the flux-balanced relation inside ``e_window``.

    The residual min(|p|, |q|) touches zero without changing sign, so roots
    are bracketed by local minima of a scan with step 0.1 hbar c pi / L and
    refined by golden-section minimization; a minimum counts as a root when its
    residual is below ``accept``.
    """
    lo, hi = sorted(float(e) for e in e_window)
    if lo * hi < 0 or min(abs(lo), abs(hi)) <= units.rest_energy:
        raise EvanescentRegimeError("energy window must lie in the propagating regime")
    g = grid if isinstance(grid, Grid) else None
    length = _length(grid)
    step = 0.1 * units.hbar * units.c * np.pi / length
    es = np.arange(lo, hi + step, step)
    es = es[es <= hi]
    if len(es) < 3:
        es = np.linspace(lo, hi, 3)
    res = np.array([quantization_residual(mu, branch, e, length, units) for e in es])
    roots = []
    for i in range(1, len(es) - 1):
        if res[i] <= res[i - 1] and res[i] < res[i + 1]:
            fit = minimize_scalar(
                lambda e: quantization_residual(mu, branch, e, length, units),
                bracket=(es[i - 1], es[i], es[i + 1]), method="golden",
                options={"xtol": 0.1 * tol / max(1.0, abs(es[i])), "maxiter": 500},
            )
            if fit.fun < accept:
                roots.append(float(fit.x))
    entries = []
    v = _as_transfer(mu, branch)
    for n, e in enumerate(roots):
        k = float(_wavenumber(e, units).real)
        qres = quantization_residual(mu, branch, e, length, units)
        flux = dom = float("nan")
        if g is not None:
            st, st_dot = stationary_mode_state(mu, branch, e, g, units)
            j = energy_current_j_en(st, st_dot, units)
            flux = abs(j.jump)
            dom = max(hamiltonian_domain_check(st, v))
        energy = abs(e)
        entries.append(SpectrumEntry(n, k, energy, -energy, flux, dom, qres))
    label = f"mu={mu:.6g},{v.branch.name.lower() if v.branch else ''}"
    notes = () if entries else ("no roots in window",)
    return SpectrumResult(tuple(entries), label=label, notes=notes)
