"""Boundary-condition families for the free FV Hamiltonian on [a, b].

Three parameterizations live here:

* the unitary, symmetric ``N`` matrix relating ``[phi1(b), phi2(a)]`` to
  ``[phi2(b), phi1(a)]`` (:class:`NMatrixParams`),
* the transfer form ``Phi(b) = V Phi(a)`` (:class:`TransferMatrixV`),
* the one-component KFG family built from ``U`` and a length ``lambda``
  (:class:`GeneralKfgBcParams`).

The constraint chain (energy-flux balance, then parity) is solved both in
closed form and numerically; callers get both and can compare.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy import optimize

from . import linalg_core as lc
from .errors import InvalidParameterError, OutOfRangeError, SeparatedBranchError

MU_MARGIN = 1e-12
NORM_TOL = 1e-9


class Branch(enum.Enum):
    """The two signs carried through the flux-balanced family.

    ``UPPER`` is the upper sign of the ``-/+`` pair, i.e.
    ``V = -(i / sin mu) M`` and ``m1 = -sin mu``; at ``mu = pi/2`` it gives
    ``V = -1`` (antiperiodic). ``LOWER`` gives ``V = +1`` there.
    """

    UPPER = "upper"
    LOWER = "lower"

    @property
    def sign(self) -> float:
        return -1.0 if self is Branch.UPPER else 1.0

    @classmethod
    def from_sign(cls, s: float) -> "Branch":
        return cls.UPPER if s < 0 else cls.LOWER


@dataclass(frozen=True)
class NMatrixParams:
    mu: float
    m0: float
    m1: float
    m3: float

    def norm_defect(self) -> float:
        return abs(self.m0**2 + self.m1**2 + self.m3**2 - 1.0)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "NMatrixParams":
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        return cls(mu=float(rng.uniform(0.0, math.pi)), m0=float(v[0]), m1=float(v[1]), m3=float(v[2]))


@dataclass(frozen=True, eq=False)
class TransferMatrixV:
    """``Phi(b) = V Phi(a)`` and ``Phi'(b) = V Phi'(a)``.

    ``branch`` is ``None`` when ``matrix`` is a generic transfer matrix that
    has not been reduced to the flux-balanced form.
    """

    matrix: np.ndarray
    mu: float
    branch: Branch | None = None

    def __post_init__(self):
        m = lc.as_matrix(self.matrix).copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def det(self) -> complex:
        return lc.det(self.matrix)


@dataclass(frozen=True)
class GeneralKfgBcParams:
    theta: float
    lam: float
    n0: float
    n1: float
    n2: float
    n3: float

    def u_matrix(self) -> np.ndarray:
        n0, n1, n2, n3 = self.n0, self.n1, self.n2, self.n3
        return np.exp(1j * self.theta) * np.array(
            [[n0 - 1j * n3, -n2 - 1j * n1], [n2 - 1j * n1, n0 + 1j * n3]], dtype=complex
        )

    def norm_defect(self) -> float:
        return abs(self.n0**2 + self.n1**2 + self.n2**2 + self.n3**2 - 1.0)


@dataclass(frozen=True)
class SeparatedBcParams:
    """The m1 = 0 leftovers: m3 = 0, mu = 0, m0 = +/-1."""

    m0_sign: int

    def __post_init__(self):
        if self.m0_sign not in (1, -1):
            raise InvalidParameterError("m0_sign must be +1 or -1")

    @property
    def v1(self) -> np.ndarray:
        return np.array([[1, -self.m0_sign], [0, 0]], dtype=complex)

    @property
    def v2(self) -> np.ndarray:
        return np.array([[0, 0], [1, -self.m0_sign]], dtype=complex)


class BcKind(enum.Enum):
    PERIODIC = "Periodic"
    ANTIPERIODIC = "Antiperiodic"
    FLUX_BALANCED = "FluxBalanced"
    CONFINING_SEPARATED = "ConfiningSeparated"
    GENERAL_PSEUDO_SELF_ADJOINT = "GeneralPseudoSelfAdjoint"
    NOT_PSEUDO_SELF_ADJOINT = "NotPseudoSelfAdjoint"


@dataclass(frozen=True)
class BcClass:
    kind: BcKind
    mu: float | None = None
    branch: Branch | None = None
    m0_sign: int | None = None

    def __str__(self) -> str:
        if self.kind is BcKind.FLUX_BALANCED:
            return f"FluxBalanced(mu={self.mu:.12g}, branch={self.branch.value})"
        if self.kind is BcKind.CONFINING_SEPARATED:
            return f"ConfiningSeparated(m0_sign={self.m0_sign:+d})"
        return self.kind.value

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "mu": self.mu,
            "branch": None if self.branch is None else self.branch.value,
            "m0_sign": self.m0_sign,
        }


PERIODIC = BcClass(BcKind.PERIODIC)
ANTIPERIODIC = BcClass(BcKind.ANTIPERIODIC)


# ---------------------------------------------------------------------------
# raw relations


@dataclass(frozen=True, eq=False)
class FvRelation:
    """Homogeneous relation ``R @ [Phi(b); Phi(a)] = 0`` (R is 2x4).

    The same relation is imposed on ``Phi'``. ``n_matrix`` is kept when the
    relation was built from an ``N`` matrix so classification can test it.
    """

    r: np.ndarray
    n_matrix: np.ndarray | None = None

    @classmethod
    def from_transfer(cls, v) -> "FvRelation":
        v = v.matrix if isinstance(v, TransferMatrixV) else lc.as_matrix(v)
        return cls(np.hstack([lc.I2, -v]))

    @classmethod
    def from_n_matrix(cls, n) -> "FvRelation":
        n = lc.as_matrix(n)
        # [phi1(b), phi2(a)] = N [phi2(b), phi1(a)], columns: phi1(b), phi2(b), phi1(a), phi2(a)
        r = np.array(
            [
                [1, -n[0, 0], -n[0, 1], 0],
                [0, -n[1, 0], -n[1, 1], 1],
            ],
            dtype=complex,
        )
        return cls(r, n_matrix=n)

    @classmethod
    def from_n_params(cls, p: NMatrixParams) -> "FvRelation":
        return cls.from_n_matrix(build_N(p))

    @classmethod
    def from_separated(cls, v1, v2) -> "FvRelation":
        return cls(np.hstack([lc.as_matrix(v1), -lc.as_matrix(v2)]))

    @property
    def a_block(self) -> np.ndarray:
        return self.r[:, :2]

    @property
    def b_block(self) -> np.ndarray:
        return -self.r[:, 2:]


@dataclass(frozen=True, eq=False)
class KfgSubspace:
    """Allowed boundary data of the one-component field.

    Columns of ``basis`` span the allowed vectors in the coordinate order
    ``(phi(b), phi(a), phi'(b), phi'(a))``.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim == 1:
            b = b.reshape(4, -1) if b.size else np.zeros((4, 0), dtype=complex)
        if b.shape[0] != 4:
            raise InvalidParameterError("basis vectors must have 4 entries")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_constraints(cls, c) -> "KfgSubspace":
        c = np.atleast_2d(np.asarray(c, dtype=complex))
        return cls(sla.null_space(c))

    @classmethod
    def twisted(cls, sign: float) -> "KfgSubspace":
        """phi(b) = sign phi(a), phi'(b) = sign phi'(a)."""
        return cls(np.array([[sign, 1, 0, 0], [0, 0, sign, 1]], dtype=complex).T)

    @classmethod
    def periodic(cls) -> "KfgSubspace":
        return cls.twisted(1.0)

    @classmethod
    def antiperiodic(cls) -> "KfgSubspace":
        return cls.twisted(-1.0)

    @classmethod
    def dirichlet(cls) -> "KfgSubspace":
        return cls(np.array([[0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex).T)

    @classmethod
    def dirichlet_and_neumann(cls) -> "KfgSubspace":
        return cls(np.zeros((4, 0), dtype=complex))

    def rank(self, tol: float = 1e-10) -> int:
        if self.dim == 0:
            return 0
        return int(np.linalg.matrix_rank(self.basis, tol=tol))

    def projector(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((4, 4), dtype=complex)
        q = sla.orth(self.basis)
        return q @ q.conj().T

    def same_as(self, other: "KfgSubspace", tol: float = 1e-10) -> bool:
        return lc.max_abs(self.projector() - other.projector()) <= tol


# ---------------------------------------------------------------------------
# N and V


def build_N(params: NMatrixParams) -> np.ndarray:
    if params.norm_defect() > NORM_TOL:
        raise InvalidParameterError(
            f"m0^2 + m1^2 + m3^2 must be 1 (defect {params.norm_defect():.3e})"
        )
    m0, m1, m3 = params.m0, params.m1, params.m3
    core = np.array([[m0 - 1j * m3, -1j * m1], [-1j * m1, m0 + 1j * m3]], dtype=complex)
    return np.exp(1j * params.mu) * core


def n_to_transfer(params: NMatrixParams) -> TransferMatrixV:
    if abs(params.m1) <= 1e-12:
        raise SeparatedBranchError(
            "m1 = 0 has no transfer form; see separated_branch_analysis()"
        )
    build_N(params)  # validates the norm
    m0, m1, m3, mu = params.m0, params.m1, params.m3, params.mu
    v = (1j / m1) * np.array(
        [[-np.exp(1j * mu), m0 - 1j * m3], [-(m0 + 1j * m3), np.exp(-1j * mu)]],
        dtype=complex,
    )
    return TransferMatrixV(v, mu=mu, branch=Branch.from_sign(m1))


def check_mu_open(mu: float) -> None:
    if not (MU_MARGIN < mu < math.pi - MU_MARGIN):
        raise OutOfRangeError(f"mu={mu!r} outside (0, pi); sin(mu) = 0 is a pole")


def flux_balanced_matrix(mu: float, branch: Branch) -> np.ndarray:
    check_mu_open(mu)
    s, c = math.sin(mu), math.cos(mu)
    m = np.array([[-np.exp(1j * mu), -c], [c, np.exp(-1j * mu)]], dtype=complex)
    return branch.sign * (1j / s) * m


def flux_balanced_transfer(mu: float, branch: Branch) -> TransferMatrixV:
    return TransferMatrixV(flux_balanced_matrix(mu, branch), mu=mu, branch=branch)


def flux_balance_residual(v) -> float:
    """Max-entry size of ``V^+ W^+ W V - W^+ W`` with ``W = tau3 + i tau2``."""
    v = v.matrix if isinstance(v, TransferMatrixV) else lc.as_matrix(v)
    return lc.max_abs(v.conj().T @ lc.WDW @ v - lc.WDW)


# ---------------------------------------------------------------------------
# flux-balance constraint


@dataclass(frozen=True)
class FluxSolution:
    params: NMatrixParams
    transfer: TransferMatrixV
    flux_residual: float
    norm_residual: float


def _flux_closed_form(mu: float, branch: Branch) -> FluxSolution:
    params = NMatrixParams(mu=mu, m0=-math.cos(mu), m1=branch.sign * math.sin(mu), m3=0.0)
    v = n_to_transfer(params)
    v = TransferMatrixV(v.matrix, mu=mu, branch=branch)
    return FluxSolution(
        params=params,
        transfer=v,
        flux_residual=flux_balance_residual(v),
        norm_residual=abs(math.cos(mu) ** 2 + math.sin(mu) ** 2 - 1.0),
    )


def solve_flux_constraint(mu_samples) -> list[tuple[NMatrixParams, TransferMatrixV]]:
    """Closed-form flux-balanced parameters for each mu, both branches.

    Output order is ``(mu_0, UPPER), (mu_0, LOWER), (mu_1, UPPER), ...``.
    """
    out = []
    for mu in mu_samples:
        check_mu_open(float(mu))
        for br in (Branch.UPPER, Branch.LOWER):
            sol = _flux_closed_form(float(mu), br)
            out.append((sol.params, sol.transfer))
    return out


def flux_solutions(mu_samples) -> list[FluxSolution]:
    out = []
    for mu in mu_samples:
        check_mu_open(float(mu))
        out.extend(_flux_closed_form(float(mu), br) for br in (Branch.UPPER, Branch.LOWER))
    return out


def numeric_flux_roots(mu: float, n_starts: int = 24, tol: float = 1e-11) -> list[NMatrixParams]:
    """Independent oracle: minimize the flux residual over the unit sphere.

    Works directly on ``V^+ W^+ W V - W^+ W`` built from the generic transfer
    matrix, so it does not rely on the hand-reduced scalar equations.
    Returns distinct roots sorted by m1.
    """
    check_mu_open(mu)

    def resid(angles):
        th, ph = angles
        m0 = math.sin(th) * math.cos(ph)
        m1 = math.cos(th)
        m3 = math.sin(th) * math.sin(ph)
        if abs(m1) < 1e-6:
            return np.full(8, 1e3)
        v = n_to_transfer(NMatrixParams(mu, m0, m1, m3)).matrix
        d = (v.conj().T @ lc.WDW @ v - lc.WDW) * m1**2
        return np.concatenate([d.real.ravel(), d.imag.ravel()])

    roots: list[NMatrixParams] = []
    ths = np.linspace(0.15, math.pi - 0.15, n_starts // 4 + 1)
    phs = np.linspace(0.0, 2 * math.pi, 5)[:-1]
    for th0 in ths:
        for ph0 in phs:
            sol = optimize.least_squares(resid, [th0, ph0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if np.max(np.abs(sol.fun)) > tol:
                continue
            th, ph = sol.x
            p = NMatrixParams(mu, math.sin(th) * math.cos(ph), math.cos(th), math.sin(th) * math.sin(ph))
            # the m1^2 weight creates false minima as m1 -> 0; judge roots unweighted
            if flux_balance_residual(n_to_transfer(p)) > 1e-8:
                continue
            if not any(abs(p.m0 - q.m0) + abs(p.m1 - q.m1) + abs(p.m3 - q.m3) < 1e-6 for q in roots):
                roots.append(p)
    return sorted(roots, key=lambda p: p.m1)


# ---------------------------------------------------------------------------
# parity constraint


def parity_residual(mu: float) -> float:
    """``||V^2 - 1||`` for the flux-balanced V(mu); the same for both branches."""
    v = flux_balanced_matrix(mu, Branch.LOWER)
    return lc.max_abs(v @ v - lc.I2)


def parity_scalar_equations(mu: float) -> tuple[float, complex, complex]:
    """Residuals of the three scalar conditions equivalent to V^2 = 1."""
    s, c = math.sin(mu), math.cos(mu)
    return (
        s * c,
        np.exp(2j * mu) - c**2 + s**2,
        np.exp(-2j * mu) - c**2 + s**2,
    )


@dataclass(frozen=True)
class ParityResult:
    mu: float
    solutions: list[TransferMatrixV]
    numeric_mu: float
    scan_min_residual: float
    closed_vs_numeric: float


def solve_parity_constraint(n_scan: int = 2001, tol: float = 1e-8) -> ParityResult:
    """Find the flux-balanced members that survive V^2 = 1.

    A scan over (0, pi) locates local minima of the residual; each minimum is
    refined and kept only if its residual vanishes. The closed-form root is
    ``pi/2``; both routes must agree.
    """
    mus = np.linspace(0.0, math.pi, n_scan)[1:-1]
    res = np.array([parity_residual(m) for m in mus])
    roots = []
    for i in range(1, len(mus) - 1):
        if res[i] <= res[i - 1] and res[i] <= res[i + 1]:
            opt = optimize.minimize_scalar(
                parity_residual, bounds=(mus[i - 1], mus[i + 1]), method="bounded",
                options={"xatol": 1e-13},
            )
            if opt.fun < tol:
                roots.append(float(opt.x))
    if len(roots) != 1:
        raise OutOfRangeError(f"expected exactly one parity root, found {roots}")
    mu = math.pi / 2
    sols = [flux_balanced_transfer(mu, Branch.UPPER), flux_balanced_transfer(mu, Branch.LOWER)]
    return ParityResult(
        mu=mu,
        solutions=sols,
        numeric_mu=roots[0],
        scan_min_residual=float(res.min()),
        closed_vs_numeric=abs(roots[0] - mu),
    )


# ---------------------------------------------------------------------------
# m1 = 0 branch


def separated_matrices(mu: float, m0: float, m3: float) -> tuple[np.ndarray, np.ndarray]:
    z = m0 - 1j * m3
    v1 = np.array([[1, -np.exp(1j * mu) * z], [0, 0]], dtype=complex)
    v2 = np.array([[0, 0], [1, -np.exp(-1j * mu) * z]], dtype=complex)
    return v1, v2


def separated_flux_prefactors(mu: float, m0: float, m3: float) -> tuple[float, float]:
    """Wall prefactors multiplying the lower-component bracket at b and a."""
    return (
        1 + m0 * math.cos(mu) + m3 * math.sin(mu),
        1 + m0 * math.cos(mu) - m3 * math.sin(mu),
    )


def _fv_wall_map(units_ratio: float = 1.0) -> np.ndarray:
    """Map (phi, phi_dot) at a wall to (phi1, phi2) with hbar/(m c^2) = units_ratio."""
    return 0.5 * np.array([[1, 1j * units_ratio], [1, -1j * units_ratio]], dtype=complex)


def forced_kfg_variables(v1, v2, tol: float = 1e-12) -> list[str]:
    """KFG wall quantities the relation ``V1 Phi(b) = V2 Phi(a)`` forces to zero.

    Works on data ``(phi(b), phi_dot(b), phi(a), phi_dot(a))`` mapped into FV
    components; a coordinate is forced when it vanishes on the whole kernel.
    """
    t = _fv_wall_map()
    big = np.zeros((4, 4), dtype=complex)
    big[:2, :2] = t
    big[2:, 2:] = t
    r = np.hstack([lc.as_matrix(v1), -lc.as_matrix(v2)]) @ big
    ker = sla.null_space(r)
    names = ["phi(b)", "phi_dot(b)", "phi(a)", "phi_dot(a)"]
    return [n for n, row in zip(names, ker) if np.max(np.abs(row)) <= tol]


@dataclass(frozen=True)
class SeparatedBranch:
    params: SeparatedBcParams
    mu: float
    m0: float
    m3: float
    v1: np.ndarray
    v2: np.ndarray
    forced: list[str]
    kfg_bc: str
    flux_prefactor_mismatch: float
    membership: GeneralKfgBcParams | None


@dataclass(frozen=True)
class SeparatedAnalysis:
    branches: list[SeparatedBranch]
    impenetrable: bool
    wall_current_max: float


def separated_branch_analysis(seed: int = 0) -> SeparatedAnalysis:
    branches = []
    wall_j = 0.0
    rng = np.random.default_rng(seed)
    for sign in (1, -1):
        mu, m0, m3 = 0.0, float(sign), 0.0
        p = SeparatedBcParams(sign)
        v1, v2 = separated_matrices(mu, m0, m3)
        pb, pa = separated_flux_prefactors(mu, m0, m3)
        forced = forced_kfg_variables(v1, v2)
        if set(forced) == {"phi_dot(b)", "phi_dot(a)"}:
            desc = "phi_dot = phi_dot' = 0 at both walls (time derivative of Dirichlet and Neumann)"
        elif set(forced) == {"phi(b)", "phi(a)"}:
            desc = "phi = phi' = 0 at both walls (Dirichlet and Neumann)"
        else:
            desc = "forced: " + ", ".join(forced)
        # Sample wall data obeying the forced zeros; the energy current
        # -(hbar^2/2m)[(phi')* phi_dot - phi* phi_dot'] must vanish there.
        for _ in range(16):
            phi, dphi, phid, dphid = rng.normal(size=4) + 1j * rng.normal(size=4)
            if sign == 1:
                phid = dphid = 0.0
            else:
                phi = dphi = 0.0
            j = -0.5 * (np.conj(dphi) * phid - np.conj(phi) * dphid)
            wall_j = max(wall_j, abs(j))
        # The constraint acts on the same 4-dim data space for phi (or
        # phi_dot); nothing is left free, so the allowed subspace is {0}.
        member = kfg_family_membership(KfgSubspace.dirichlet_and_neumann())
        branches.append(
            SeparatedBranch(
                params=p, mu=mu, m0=m0, m3=m3, v1=v1, v2=v2, forced=forced,
                kfg_bc=desc, flux_prefactor_mismatch=abs(pb - pa), membership=member,
            )
        )
    return SeparatedAnalysis(branches=branches, impenetrable=wall_j == 0.0, wall_current_max=wall_j)


# ---------------------------------------------------------------------------
# one-component family membership


def _lambda_maps(lam: float) -> tuple[np.ndarray, np.ndarray]:
    # coordinates (phi(b), phi(a), phi'(b), phi'(a))
    p = np.array([[1, 0, 1j * lam, 0], [0, 1, 0, -1j * lam]], dtype=complex)
    q = np.array([[1, 0, -1j * lam, 0], [0, 1, 0, 1j * lam]], dtype=complex)
    return p, q


def u_to_params(u: np.ndarray, lam: float) -> GeneralKfgBcParams:
    d = lc.det(u)
    theta = (np.angle(d) / 2.0) % math.pi
    m = np.exp(-1j * theta) * u
    return GeneralKfgBcParams(
        theta=float(theta), lam=float(lam),
        n0=float(m[0, 0].real), n1=float(-m[1, 0].imag),
        n2=float(m[1, 0].real), n3=float(-m[0, 0].imag),
    )


@dataclass(frozen=True)
class MembershipFit:
    params: GeneralKfgBcParams
    u: np.ndarray
    unitarity_defect: float
    reconstruction_residual: float


def _fit_at(basis: np.ndarray, lam: float):
    p, q = _lambda_maps(lam)
    pb, qb = p @ basis, q @ basis
    if np.linalg.cond(pb) > 1e12:
        return None
    u = qb @ np.linalg.inv(pb)
    c = q - u @ p
    if np.linalg.matrix_rank(c, tol=1e-9) != 2:
        return None
    defect = lc.max_abs(u.conj().T @ u - lc.I2)
    return u, defect, lc.max_abs(c @ basis)


def _objective(basis, lam) -> float:
    fit = _fit_at(basis, lam)
    if fit is None:
        return math.inf
    u, defect, resid = fit
    if defect > 1e-3:
        return defect
    n2 = abs(u_to_params(u, lam).n2)
    return max(defect, n2, resid)


def kfg_family_fit(subspace: KfgSubspace, length: float = 1.0, tol: float = 1e-10) -> MembershipFit | None:
    basis = subspace.basis
    if subspace.dim > 0 and subspace.rank() < subspace.dim:
        raise InvalidParameterError("degenerate spanning set (linearly dependent vectors)")
    if subspace.dim != 2:
        return None
    basis = sla.orth(basis)
    mags = np.logspace(-3, 3, 121) * length
    grid = np.concatenate([-mags[::-1], [0.0], mags])
    scores = np.array([_objective(basis, lam) for lam in grid])
    best = float(np.min(scores))
    if not math.isfinite(best):
        return None
    if best > tol:
        # refine around the best grid point in log|lambda|
        i = int(np.argmin(scores))
        lam0 = grid[i]
        if lam0 != 0.0:
            sgn = math.copysign(1.0, lam0)
            lo, hi = math.log(abs(lam0) / 1.13), math.log(abs(lam0) * 1.13)
            opt = optimize.minimize_scalar(
                lambda s: _objective(basis, sgn * math.exp(s)), bounds=(lo, hi),
                method="bounded", options={"xatol": 1e-14},
            )
            if opt.fun < best:
                best, lam0 = float(opt.fun), sgn * math.exp(opt.x)
        lam_best = lam0
    else:
        # ties: prefer the sample closest to |lambda| = length
        ok = np.flatnonzero(scores <= max(best, 0.0) + 1e-13)
        dist = [
            abs(math.log(abs(grid[k]) / length)) + (1e-9 if grid[k] < 0 else 0.0)
            if grid[k] != 0 else math.inf
            for k in ok
        ]
        lam_best = float(grid[ok[int(np.argmin(dist))]])
    if best > tol:
        return None
    u, defect, resid = _fit_at(basis, lam_best)
    return MembershipFit(params=u_to_params(u, lam_best), u=u, unitarity_defect=defect,
                         reconstruction_residual=resid)


def kfg_family_membership(subspace: KfgSubspace, length: float = 1.0) -> GeneralKfgBcParams | None:
    fit = kfg_family_fit(subspace, length=length)
    return None if fit is None else fit.params


# ---------------------------------------------------------------------------
# classification


def fit_flux_balanced(v: np.ndarray, tol: float = 1e-9) -> tuple[float, Branch] | None:
    v = lc.as_matrix(v)
    for br in (Branch.UPPER, Branch.LOWER):
        cot = (v[1, 0] / (br.sign * 1j)).real
        mu = math.atan2(1.0, cot)
        try:
            cand = flux_balanced_matrix(mu, br)
        except OutOfRangeError:
            continue
        if lc.max_abs(v - cand) <= tol * max(1.0, lc.max_abs(v)):
            return mu, br
    return None


def _classify_transfer(v: np.ndarray, tol: float) -> BcClass:
    if lc.max_abs(v - lc.I2) <= tol:
        return PERIODIC
    if lc.max_abs(v + lc.I2) <= tol:
        return ANTIPERIODIC
    fit = fit_flux_balanced(v)
    if fit is not None:
        return BcClass(BcKind.FLUX_BALANCED, mu=fit[0], branch=fit[1])
    return BcClass(BcKind.NOT_PSEUDO_SELF_ADJOINT)


def _row_space_equal(r1: np.ndarray, r2: np.ndarray, tol: float) -> bool:
    p1 = KfgSubspace(sla.orth(r1.conj().T)).projector()
    p2 = KfgSubspace(sla.orth(r2.conj().T)).projector()
    return lc.max_abs(p1 - p2) <= tol


def classify_bc(relation, tol: float = 1e-10) -> BcClass:
    """Assign one of the BcKind classes to a boundary relation.

    Accepts a :class:`TransferMatrixV`, :class:`NMatrixParams`,
    :class:`SeparatedBcParams`, :class:`FvRelation` or :class:`KfgSubspace`.
    """
    if isinstance(relation, SeparatedBcParams):
        return BcClass(BcKind.CONFINING_SEPARATED, m0_sign=relation.m0_sign)
    if isinstance(relation, TransferMatrixV):
        return _classify_transfer(relation.matrix, tol)
    if isinstance(relation, NMatrixParams):
        relation = FvRelation.from_n_params(relation)
    if isinstance(relation, FvRelation):
        n = relation.n_matrix
        if n is not None and not (lc.is_unitary(n, 1e-10) and lc.is_symmetric(n, 1e-10)):
            return BcClass(BcKind.NOT_PSEUDO_SELF_ADJOINT)
        a, b = relation.a_block, relation.b_block
        if abs(lc.det(a)) > 1e-12 * max(1.0, lc.max_abs(a)) ** 2:
            return _classify_transfer(np.linalg.solve(a, b), tol)
        for sign in (1, -1):
            sp = SeparatedBcParams(sign)
            if _row_space_equal(relation.r, FvRelation.from_separated(sp.v1, sp.v2).r, tol):
                return BcClass(BcKind.CONFINING_SEPARATED, m0_sign=sign)
        return BcClass(BcKind.NOT_PSEUDO_SELF_ADJOINT)
    if isinstance(relation, KfgSubspace):
        if relation.dim > 0 and relation.rank() < relation.dim:
            raise InvalidParameterError("degenerate spanning set")
        if relation.dim == 0:
            # Dirichlet plus Neumann at both walls
            return BcClass(BcKind.CONFINING_SEPARATED, m0_sign=-1)
        if relation.dim == 2:
            if relation.same_as(KfgSubspace.periodic(), tol):
                return PERIODIC
            if relation.same_as(KfgSubspace.antiperiodic(), tol):
                return ANTIPERIODIC
            if kfg_family_membership(relation) is not None:
                return BcClass(BcKind.GENERAL_PSEUDO_SELF_ADJOINT)
        return BcClass(BcKind.NOT_PSEUDO_SELF_ADJOINT)
    raise InvalidParameterError(f"cannot classify object of type {type(relation).__name__}")


# ---------------------------------------------------------------------------
# Schrodinger baseline


def schrodinger_parity_restriction(n_scan: int = 720) -> set[float]:
    """Phases theta in [0, 2 pi) compatible with their parity image.

    Forward BC ``Phi(b) = e^{i theta} Phi(a)`` plus its mirror
    ``Phi(a) = e^{i theta} Phi(b)`` force ``e^{2 i theta} = 1``, whose
    residual is ``2 |sin theta|``. Roots come from brackets of ``sin``.
    """
    thetas = np.linspace(0.0, 2 * math.pi, n_scan + 1)
    f = np.sin(thetas)
    roots = {0.0}  # sin(0) = 0 exactly at the left end of [0, 2 pi)
    for i in range(1, n_scan):
        if f[i] == 0.0:
            roots.add(float(thetas[i]))
        elif f[i] * f[i + 1] < 0 and i + 1 < n_scan:
            roots.add(optimize.brentq(math.sin, thetas[i], thetas[i + 1], xtol=1e-15))
    out = set()
    for r in roots:
        if abs(np.exp(2j * r) - 1.0) > 1e-12:
            continue
        # snap to the closed form once both agree
        snapped = min((0.0, math.pi), key=lambda c: abs(c - r))
        if abs(snapped - r) > 1e-10:
            raise OutOfRangeError(f"unexpected root {r}")
        out.add(snapped)
    return out
