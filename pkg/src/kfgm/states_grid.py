"""Grid wavefunctions, FV <-> KFG conversion and operator actions.

The grid is closed: both endpoints are stored, so ``x[0] = a`` and
``x[-1] = b``. Under a periodic (antiperiodic) declaration sample ``n-1`` is
identified with sample ``0`` times ``+1`` (``-1``), and stencils wrap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import linalg_core as lc
from .bc_families import BcClass, BcKind, TransferMatrixV
from .errors import InvalidParameterError, UnsupportedBoundaryError

PLUS, MINUS = "plus", "minus"
PERIODIC, ANTIPERIODIC = "periodic", "antiperiodic"


@dataclass(frozen=True)
class Grid:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.b > self.a:
            raise InvalidParameterError("need b > a")
        if self.n < 16:
            raise InvalidParameterError("need at least 16 samples")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def spacing(self) -> float:
        return self.length / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def refined(self) -> "Grid":
        """Same interval with half the spacing."""
        return Grid(self.a, self.b, 2 * self.n - 1)


@dataclass(frozen=True)
class Units:
    hbar: float = 1.0
    m: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if min(self.hbar, self.m, self.c) <= 0:
            raise InvalidParameterError("hbar, m and c must be positive")

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    @property
    def kappa(self) -> float:
        """hbar / (m c^2): converts a time derivative into the FV mix."""
        return self.hbar / self.rest_energy

    @property
    def compton_k(self) -> float:
        return self.m * self.c / self.hbar

    def omega(self, k):
        """Angular frequency of a free mode with wavenumber k."""
        return np.sqrt((self.rest_energy / self.hbar) ** 2 + (self.c * np.asarray(k)) ** 2)

    def energy(self, k):
        return self.hbar * self.omega(k)


def bc_sign(bc) -> Optional[float]:
    """+1 for periodic, -1 for antiperiodic, None otherwise."""
    if bc is None:
        return None
    if isinstance(bc, BcClass):
        bc = {BcKind.PERIODIC: PERIODIC, BcKind.ANTIPERIODIC: ANTIPERIODIC}.get(bc.kind)
        if bc is None:
            return None
    return {PERIODIC: 1.0, ANTIPERIODIC: -1.0}.get(bc)


def bc_name(bc) -> Optional[str]:
    s = bc_sign(bc)
    if s is None:
        return None
    return PERIODIC if s > 0 else ANTIPERIODIC


# ---------------------------------------------------------------------------
# stencils (second order everywhere, acting on the last axis)


def d1(f: np.ndarray, h: float, wrap: Optional[float] = None) -> np.ndarray:
    f = np.asarray(f)
    out = np.empty_like(f, dtype=np.result_type(f, float))
    out[..., 1:-1] = (f[..., 2:] - f[..., :-2]) / (2 * h)
    if wrap is None:
        out[..., 0] = (-3 * f[..., 0] + 4 * f[..., 1] - f[..., 2]) / (2 * h)
        out[..., -1] = (3 * f[..., -1] - 4 * f[..., -2] + f[..., -3]) / (2 * h)
    else:
        out[..., 0] = (f[..., 1] - wrap * f[..., -2]) / (2 * h)
        out[..., -1] = (wrap * f[..., 1] - f[..., -2]) / (2 * h)
    return out


def d2(f: np.ndarray, h: float, wrap: Optional[float] = None) -> np.ndarray:
    f = np.asarray(f)
    out = np.empty_like(f, dtype=np.result_type(f, float))
    out[..., 1:-1] = (f[..., 2:] - 2 * f[..., 1:-1] + f[..., :-2]) / h**2
    if wrap is None:
        out[..., 0] = (2 * f[..., 0] - 5 * f[..., 1] + 4 * f[..., 2] - f[..., 3]) / h**2
        out[..., -1] = (2 * f[..., -1] - 5 * f[..., -2] + 4 * f[..., -3] - f[..., -4]) / h**2
    else:
        out[..., 0] = (f[..., 1] - 2 * f[..., 0] + wrap * f[..., -2]) / h**2
        out[..., -1] = (wrap * f[..., 1] - 2 * f[..., -1] + f[..., -2]) / h**2
    return out


def trapezoid(f: np.ndarray, h: float) -> complex:
    f = np.asarray(f)
    return h * (f[..., 1:-1].sum(axis=-1) + 0.5 * (f[..., 0] + f[..., -1]))


# ---------------------------------------------------------------------------
# states


def _frozen(arr, dtype=complex):
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FvState:
    """Two-component FV wavefunction sampled on a grid.

    ``exact_dx`` optionally carries the analytic spatial derivative; it is
    used in place of finite differences when present.
    """

    grid: Grid
    components: np.ndarray
    majorana_sign: Optional[str] = None
    bc: Optional[str] = None
    exact_dx: Optional[np.ndarray] = None

    def __post_init__(self):
        comp = _frozen(self.components)
        if comp.shape != (2, self.grid.n):
            raise InvalidParameterError(f"components must have shape (2, {self.grid.n})")
        object.__setattr__(self, "components", comp)
        if self.exact_dx is not None:
            object.__setattr__(self, "exact_dx", _frozen(self.exact_dx))
        object.__setattr__(self, "bc", bc_name(self.bc))

    @classmethod
    def from_components(cls, grid, phi1, phi2, **kw) -> "FvState":
        return cls(grid, np.vstack([np.broadcast_to(phi1, grid.n), np.broadcast_to(phi2, grid.n)]), **kw)

    @property
    def phi1(self) -> np.ndarray:
        return self.components[0]

    @property
    def phi2(self) -> np.ndarray:
        return self.components[1]

    def dx(self) -> np.ndarray:
        if self.exact_dx is not None:
            return self.exact_dx
        return d1(self.components, self.grid.spacing, bc_sign(self.bc))

    def dxx(self) -> np.ndarray:
        return d2(self.components, self.grid.spacing, bc_sign(self.bc))

    @property
    def at_a(self) -> np.ndarray:
        return self.components[:, 0]

    @property
    def at_b(self) -> np.ndarray:
        return self.components[:, -1]

    def with_components(self, comp, exact_dx=None, **kw) -> "FvState":
        return replace(self, components=comp, exact_dx=exact_dx, **kw)


@dataclass(frozen=True, eq=False)
class KfgState:
    """One-component field and its time derivative on a grid."""

    grid: Grid
    phi: np.ndarray
    phi_dot: np.ndarray
    majorana_sign: Optional[str] = None
    bc: Optional[str] = None
    exact_dx: Optional[np.ndarray] = None
    exact_dx_dot: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("phi", "phi_dot", "exact_dx", "exact_dx_dot"):
            val = getattr(self, name)
            if val is not None:
                arr = _frozen(np.broadcast_to(val, self.grid.n))
                object.__setattr__(self, name, arr)
        object.__setattr__(self, "bc", bc_name(self.bc))

    def dx(self) -> np.ndarray:
        if self.exact_dx is not None:
            return self.exact_dx
        return d1(self.phi, self.grid.spacing, bc_sign(self.bc))

    def dx_dot(self) -> np.ndarray:
        if self.exact_dx_dot is not None:
            return self.exact_dx_dot
        return d1(self.phi_dot, self.grid.spacing, bc_sign(self.bc))


# ---------------------------------------------------------------------------
# symmetry operations


def charge_conjugate(state: FvState) -> FvState:
    """tau1 Phi^*: swap the components and conjugate."""
    dx = None if state.exact_dx is None else np.conj(state.exact_dx[::-1])
    return state.with_components(np.conj(state.components[::-1]), exact_dx=dx)


def enforce_majorana(phi1, sign: str, grid: Grid, bc=None, exact_dx1=None) -> FvState:
    if sign not in (PLUS, MINUS):
        raise InvalidParameterError("sign must be 'plus' or 'minus'")
    s = 1.0 if sign == PLUS else -1.0
    phi1 = np.broadcast_to(np.asarray(phi1, dtype=complex), grid.n)
    dx = None
    if exact_dx1 is not None:
        dx = np.vstack([exact_dx1, s * np.conj(exact_dx1)])
    return FvState(grid, np.vstack([phi1, s * np.conj(phi1)]), majorana_sign=sign, bc=bc, exact_dx=dx)


def parity_transform(state):
    """Reflect about the interval midpoint; derivatives pick up a sign."""
    if isinstance(state, FvState):
        dx = None if state.exact_dx is None else -state.exact_dx[:, ::-1]
        return state.with_components(state.components[:, ::-1], exact_dx=dx)
    if isinstance(state, KfgState):
        return replace(
            state,
            phi=state.phi[::-1],
            phi_dot=state.phi_dot[::-1],
            exact_dx=None if state.exact_dx is None else -state.exact_dx[::-1],
            exact_dx_dot=None if state.exact_dx_dot is None else -state.exact_dx_dot[::-1],
        )
    raise TypeError(f"unsupported state type {type(state).__name__}")


# ---------------------------------------------------------------------------
# FV <-> KFG


def fv_from_kfg(state: KfgState, units: Units = Units()) -> FvState:
    k = units.kappa
    comp = 0.5 * np.vstack([state.phi + 1j * k * state.phi_dot, state.phi - 1j * k * state.phi_dot])
    dx = None
    if state.exact_dx is not None and state.exact_dx_dot is not None:
        dx = 0.5 * np.vstack(
            [state.exact_dx + 1j * k * state.exact_dx_dot, state.exact_dx - 1j * k * state.exact_dx_dot]
        )
    return FvState(state.grid, comp, majorana_sign=state.majorana_sign, bc=state.bc, exact_dx=dx)


def kfg_from_fv(state: FvState) -> np.ndarray:
    """phi = phi1 + phi2 (the top entry of (tau3 + i tau2) Phi)."""
    return state.phi1 + state.phi2


def kfg_dot_from_fv(state: FvState, units: Units = Units()) -> np.ndarray:
    """phi_dot recovered from phi1 - phi2 = i (hbar / m c^2) phi_dot."""
    return (state.phi1 - state.phi2) / (1j * units.kappa)


def kfg_state_from_fv(state: FvState, units: Units = Units()) -> KfgState:
    dx = dxd = None
    if state.exact_dx is not None:
        dx = state.exact_dx[0] + state.exact_dx[1]
        dxd = (state.exact_dx[0] - state.exact_dx[1]) / (1j * units.kappa)
    return KfgState(
        state.grid, kfg_from_fv(state), kfg_dot_from_fv(state, units),
        majorana_sign=state.majorana_sign, bc=state.bc, exact_dx=dx, exact_dx_dot=dxd,
    )


# ---------------------------------------------------------------------------
# operators


def apply_momentum(state: FvState, units: Units = Units()) -> FvState:
    return state.with_components(-1j * units.hbar * state.dx())


def apply_fv_hamiltonian(state: FvState, units: Units = Units()) -> FvState:
    lap = state.dxx()
    kinetic = -(units.hbar**2) / (2 * units.m) * (lc.W @ lap)
    mass = units.rest_energy * (lc.TAU3 @ state.components)
    return state.with_components(kinetic + mass)


def hamiltonian_domain_check(state: FvState, relation) -> tuple[float, float]:
    """Endpoint violations of Phi(b) = V Phi(a) and Phi'(b) = V Phi'(a)."""
    v = relation.matrix if isinstance(relation, TransferMatrixV) else lc.as_matrix(relation)
    dx = state.dx()
    r0 = float(np.max(np.abs(state.at_b - v @ state.at_a)))
    r1 = float(np.max(np.abs(dx[:, -1] - v @ dx[:, 0])))
    return r0, r1


# ---------------------------------------------------------------------------
# analytic mode sums


def admissible_wavenumbers(bc, length: float, count: int) -> np.ndarray:
    """The ``count`` smallest non-negative wavenumbers allowed by the BC."""
    s = bc_sign(bc)
    if s is None:
        raise UnsupportedBoundaryError(f"no mode basis for bc={bc!r}")
    j = np.arange(count)
    return (2 * np.pi * j if s > 0 else (2 * j + 1) * np.pi) / length


@dataclass(frozen=True, eq=False)
class ModeSum:
    """Exact free KFG solution ``sum_k (alpha e^{-i w t} + beta e^{i w t}) e^{i k (x - a)}``.

    ``reality`` selects the Majorana class: ``'plus'`` keeps the real part,
    ``'minus'`` keeps i times the real part of the unphased sum, ``None``
    returns the complex sum as is.
    """

    k: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    x0: float
    units: Units = Units()
    reality: Optional[str] = None

    @classmethod
    def from_real_data(cls, kpos, a_cos, b_sin, c_cos, d_sin, x0, units=Units(), sign=PLUS) -> "ModeSum":
        """Real field with phi(t=0) = sum A cos + B sin and phi_dot(0) = sum C cos + D sin."""
        kpos = np.asarray(kpos, float)
        amp0 = (np.asarray(a_cos) - 1j * np.asarray(b_sin)) / 2
        vel0 = (np.asarray(c_cos) - 1j * np.asarray(d_sin)) / 2
        zero = kpos == 0
        # k = 0 carries the whole cosine coefficient on a single term
        amp0 = np.where(zero, np.asarray(a_cos, complex), amp0)
        vel0 = np.where(zero, np.asarray(c_cos, complex), vel0)
        w = units.omega(kpos)
        al = (amp0 + 1j * vel0 / w) / 2
        be = (amp0 - 1j * vel0 / w) / 2
        ks = np.concatenate([kpos, -kpos[~zero]])
        als = np.concatenate([al, np.conj(be[~zero])])
        bes = np.concatenate([be, np.conj(al[~zero])])
        return cls(ks, als, bes, x0, units, reality=sign)

    def field(self, x, t: float = 0.0, nx: int = 0, nt: int = 0) -> np.ndarray:
        x = np.asarray(x, float)
        w = self.units.omega(self.k)
        tf = self.alpha * (-1j * w) ** nt * np.exp(-1j * w * t) + self.beta * (1j * w) ** nt * np.exp(1j * w * t)
        coef = (1j * self.k) ** nx * tf
        total = np.exp(1j * np.outer(x - self.x0, self.k)) @ coef
        if self.reality == PLUS:
            return total.real.astype(complex)
        if self.reality == MINUS:
            return 1j * total.real
        return total

    def kfg_state(self, grid: Grid, t: float = 0.0, bc=None) -> KfgState:
        x = grid.x
        return KfgState(
            grid, self.field(x, t), self.field(x, t, nt=1), majorana_sign=self.reality, bc=bc,
            exact_dx=self.field(x, t, nx=1), exact_dx_dot=self.field(x, t, nx=1, nt=1),
        )

    def fv_state(self, grid: Grid, t: float = 0.0, bc=None) -> FvState:
        return fv_from_kfg(self.kfg_state(grid, t, bc), self.units)

    def fv_dot_state(self, grid: Grid, t: float = 0.0, bc=None) -> FvState:
        """Time derivative of the FV state (uses the exact second time derivative)."""
        x = grid.x
        shifted = KfgState(
            grid, self.field(x, t, nt=1), self.field(x, t, nt=2), majorana_sign=self.reality, bc=bc,
            exact_dx=self.field(x, t, nx=1, nt=1), exact_dx_dot=self.field(x, t, nx=1, nt=2),
        )
        return fv_from_kfg(shifted, self.units)


def random_mode_sum(seed: int, grid: Grid, bc, sign: str = PLUS, n_modes: int = 4,
                    units: Units = Units()) -> ModeSum:
    if bc_sign(bc) is None:
        raise UnsupportedBoundaryError("random states need a periodic or antiperiodic bc")
    if sign not in (PLUS, MINUS):
        raise InvalidParameterError("sign must be 'plus' or 'minus'")
    rng = np.random.default_rng(seed)
    kpos = admissible_wavenumbers(bc, grid.length, n_modes)
    coef = rng.normal(size=(4, n_modes))
    w = units.omega(kpos)
    coef[2:] *= w  # comparable amplitude and velocity scales
    coef[1] = np.where(kpos == 0, 0.0, coef[1])
    coef[3] = np.where(kpos == 0, 0.0, coef[3])
    ms = ModeSum.from_real_data(kpos, *coef, x0=grid.a, units=units, sign=sign)
    peak = np.max(np.abs(ms.field(grid.x)))
    return ModeSum(ms.k, ms.alpha / peak, ms.beta / peak, ms.x0, units, sign)


def random_complex_mode_sum(seed: int, grid: Grid, bc, n_modes: int = 4, units: Units = Units()) -> ModeSum:
    """Generic (non-Majorana) solution: re + i im of two independent real ones."""
    re = random_mode_sum(seed, grid, bc, PLUS, n_modes, units)
    im = random_mode_sum(seed + 7919, grid, bc, PLUS, n_modes, units)
    return ModeSum(re.k, re.alpha + 1j * im.alpha, re.beta + 1j * im.beta, re.x0, units, None)


def random_state(seed: int, grid: Grid, bc, sign: str = PLUS, n_modes: int = 4,
                 units: Units = Units()) -> FvState:
    """Seeded Majorana FV state made of the lowest admissible modes.

    Normalized so the KFG field has max amplitude 1.
    """
    ms = random_mode_sum(seed, grid, bc, sign, n_modes, units)
    st = ms.fv_state(grid, 0.0, bc=bc_name(bc))
    # pin the Majorana relation exactly
    return enforce_majorana(st.phi1, sign, grid, bc=bc_name(bc), exact_dx1=st.exact_dx[0])


@dataclass(frozen=True, eq=False)
class KfgHistory:
    """Snapshots of (phi, phi_dot) at uniform time spacing ``dt``."""

    grid: Grid
    dt: float
    phi: np.ndarray
    phi_dot: np.ndarray
    t0: float = 0.0
    bc: Optional[str] = None
    majorana_sign: Optional[str] = None

    def __post_init__(self):
        phi = _frozen(self.phi)
        phid = _frozen(self.phi_dot)
        if phi.ndim != 2 or phi.shape != phid.shape or phi.shape[1] != self.grid.n:
            raise InvalidParameterError("phi and phi_dot must have shape (levels, n)")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "phi_dot", phid)
        object.__setattr__(self, "bc", bc_name(self.bc))

    @property
    def levels(self) -> int:
        return self.phi.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.levels)

    def state(self, i: int) -> KfgState:
        return KfgState(self.grid, self.phi[i], self.phi_dot[i], majorana_sign=self.majorana_sign, bc=self.bc)

    @classmethod
    def from_mode_sum(cls, ms: ModeSum, grid: Grid, dt: float, levels: int, t0: float = 0.0, bc=None):
        x = grid.x
        ts = t0 + dt * np.arange(levels)
        phi = np.array([ms.field(x, t) for t in ts])
        phid = np.array([ms.field(x, t, nt=1) for t in ts])
        return cls(grid, dt, phi, phid, t0=t0, bc=bc, majorana_sign=ms.reality)


def state_with_transfer(grid: Grid, relation, rng: np.random.Generator, n_bumps: int = 3) -> FvState:
    """Smooth FV state with Phi(b) = V Phi(a) and Phi'(b) = V Phi'(a) built in.

    Cubic Hermite interpolation carries the endpoint data; random bumps
    weighted by sin^2 shape the interior without touching it.
    """
    v = relation.matrix if isinstance(relation, TransferMatrixV) else lc.as_matrix(relation)
    cplx = lambda *shape: rng.normal(size=shape) + 1j * rng.normal(size=shape)
    pa, dpa = cplx(2), cplx(2)
    pb, dpb = v @ pa, v @ dpa
    L = grid.length
    t = (grid.x - grid.a) / L
    h00, h10, h01, h11 = 2 * t**3 - 3 * t**2 + 1, t**3 - 2 * t**2 + t, -2 * t**3 + 3 * t**2, t**3 - t**2
    d00, d10, d01, d11 = 6 * t**2 - 6 * t, 3 * t**2 - 4 * t + 1, -6 * t**2 + 6 * t, 3 * t**2 - 2 * t
    comp = np.outer(pa, h00) + np.outer(dpa * L, h10) + np.outer(pb, h01) + np.outer(dpb * L, h11)
    dcomp = (np.outer(pa, d00) + np.outer(dpa * L, d10) + np.outer(pb, d01) + np.outer(dpb * L, d11)) / L
    coef = cplx(2, n_bumps)
    j = np.arange(1, n_bumps + 1)
    s2 = np.sin(np.pi * t) ** 2
    ds2 = np.pi * np.sin(2 * np.pi * t) / L
    waves = np.sin(np.outer(j, np.pi * t))
    dwaves = (np.pi * j / L)[:, None] * np.cos(np.outer(j, np.pi * t))
    comp = comp + (coef @ waves) * s2
    dcomp = dcomp + (coef @ dwaves) * s2 + (coef @ waves) * ds2
    return FvState(grid, comp, exact_dx=dcomp)


def _hermite(grid: Grid, va, vb, sa, sb) -> tuple[np.ndarray, np.ndarray]:
    L = grid.length
    t = (grid.x - grid.a) / L
    h00, h10, h01, h11 = 2 * t**3 - 3 * t**2 + 1, t**3 - 2 * t**2 + t, -2 * t**3 + 3 * t**2, t**3 - t**2
    d00, d10, d01, d11 = 6 * t**2 - 6 * t, 3 * t**2 - 4 * t + 1, -6 * t**2 + 6 * t, 3 * t**2 - 2 * t
    val = va * h00 + sa * L * h10 + vb * h01 + sb * L * h11
    der = (va * d00 + sa * L * d10 + vb * d01 + sb * L * d11) / L
    return val, der


def _smooth_random(grid: Grid, rng: np.random.Generator, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    k = 2 * np.pi * np.arange(1, n_modes + 1) / grid.length
    c = rng.normal(size=(2, n_modes)) + 1j * rng.normal(size=(2, n_modes))
    arg = np.outer(k, grid.x - grid.a)
    val = c[0] @ np.cos(arg) + c[1] @ np.sin(arg)
    der = (c[1] * k) @ np.cos(arg) - (c[0] * k) @ np.sin(arg)
    return val, der


def state_with_separated_bc(grid: Grid, m0_sign: int, rng: np.random.Generator, n_modes: int = 3) -> KfgState:
    """Time slice (phi, phi_dot) obeying the separated-branch wall conditions.

    ``m0_sign = -1`` clamps phi (phi = phi' = 0 at both walls); ``+1``
    clamps phi_dot instead. The clamp subtracts a cubic Hermite built from
    the wall samples and one-sided finite-difference slopes, so the value
    conditions hold exactly and the slope conditions hold to O(h^2).
    The other field stays generic. Exact derivatives are stored.
    """
    if m0_sign not in (1, -1):
        raise InvalidParameterError("m0_sign must be +1 or -1")
    g, dg = _smooth_random(grid, rng, n_modes)
    f, df = _smooth_random(grid, rng, n_modes)
    slope = d1(g, grid.spacing)
    hv, hd = _hermite(grid, g[0], g[-1], slope[0], slope[-1])
    g, dg = g - hv, dg - hd
    if m0_sign == -1:
        return KfgState(grid, g, f, exact_dx=dg, exact_dx_dot=df)
    return KfgState(grid, f, g, exact_dx=df, exact_dx_dot=dg)
