"""Single-site mean-field decoupling of the JCH lattice.

Hopping is replaced by a coherent drive of strength ``z*kappa*psi`` plus the
constant ``z*kappa*psi**2``. The order parameter is taken real and
non-negative (the U(1) phase is irrelevant) and is found variationally: the
ground energy E(psi) is minimised over psi, which at any interior stationary
point is equivalent to the self-consistency ``psi = <a>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import BracketError, NumericalError, TruncationError
from .jc_core import SiteParams, atomic_edge

DEFAULT_N_MAX = 25
PSI_THRESHOLD = 1e-6
OCCUPANCY_TOL = 1e-10


@dataclass(frozen=True)
class MfProblem:
    site: SiteParams
    kappa: float
    mu: float
    z: int = 2
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if self.z < 1:
            raise ValueError("coordination number z must be >= 1")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def zk(self) -> float:
        return self.z * self.kappa


@dataclass
class MfResult:
    psi_star: float
    ground_energy: float
    converged: bool
    evaluations: int
    stationarity: float = 0.0


def _operators(n_max):
    # basis ordering: index 2*n + atom for photon number n, atom in {0: g, 1: e}
    dim = 2 * (n_max + 1)
    photons = np.repeat(np.arange(n_max + 1), 2)
    atom = np.tile([0, 1], n_max + 1)
    a = np.zeros((dim, dim))
    for n in range(1, n_max + 1):
        for s in (0, 1):
            a[2 * (n - 1) + s, 2 * n + s] = math.sqrt(n)
    return photons, atom, a


def _static_part(site: SiteParams, mu: float, n_max: int):
    photons, atom, a = _operators(n_max)
    h = np.diag(site.omega * photons + site.epsilon * atom - mu * (photons + atom)).astype(float)
    # beta (sigma+ a + sigma- a^dag): |g,n> <-> |e,n-1>
    for n in range(1, n_max + 1):
        i, j = 2 * n, 2 * (n - 1) + 1
        h[i, j] = h[j, i] = site.beta * math.sqrt(n)
    return h, a, photons


def mf_hamiltonian(problem: MfProblem, psi: float) -> np.ndarray:
    """Single-site mean-field Hamiltonian on {|g,n>, |e,n>: n <= n_max}."""
    if psi < 0:
        raise ValueError("psi is gauged real and non-negative")
    h, a, _ = _static_part(problem.site, problem.mu, problem.n_max)
    drive = problem.zk * psi
    return h - drive * (a + a.T) + problem.zk * psi**2 * np.eye(h.shape[0])


class _Evaluator:
    """Ground energy and <a> of the mean-field Hamiltonian as functions of psi."""

    def __init__(self, problem: MfProblem):
        self.problem = problem
        self.h0, self.a, self.photons = _static_part(problem.site, problem.mu, problem.n_max)
        self.drive = self.a + self.a.T
        self.count = 0

    def ground(self, psi):
        self.count += 1
        zk = self.problem.zk
        w, v = np.linalg.eigh(self.h0 - zk * psi * self.drive)
        return w[0] + zk * psi**2, v[:, 0]

    def energy(self, psi):
        return self.ground(psi)[0]

    def expect_a(self, psi):
        vec = self.ground(psi)[1]
        return float(vec @ self.a @ vec)

    def top_occupancy(self, psi):
        vec = self.ground(psi)[1]
        return float(np.sum(vec[self.photons == self.problem.n_max] ** 2))


def _scan_grid(psi_max):
    return np.concatenate([[0.0], np.geomspace(1e-8, psi_max, 80)])


_INVPHI = (math.sqrt(5) - 1) / 2


def golden_section(f, lo, hi, xtol):
    """Minimise a unimodal f on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    c, d = b - _INVPHI * (b - a), a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def mf_order_parameter(problem: MfProblem, psi_max: float | None = None,
                       xtol: float = 1e-10) -> MfResult:
    """Minimise the mean-field ground energy over psi in [0, psi_max].

    A coarse scan on a grid dense near psi = 0 locates each basin, golden
    section refines it, and a root of psi - <a> polishes the result so that
    the reported psi is self-consistent.
    """
    ev = _Evaluator(problem)
    if psi_max is None:
        psi_max = 2.0 * math.sqrt(problem.n_max)
    grid = _scan_grid(psi_max)
    energies = np.empty(grid.size)
    slope = np.empty(grid.size)
    for j, p in enumerate(grid):
        energies[j], vec = ev.ground(p)
        slope[j] = p - vec @ ev.a @ vec
    e0 = energies[0]
    if int(np.argmin(energies)) == grid.size - 1:
        raise BracketError("mean-field minimum not bracketed; raise psi_max",
                           bracket=(grid[-2], grid[-1]), params=vars(problem))

    psi, energy = 0.0, e0
    if problem.zk > 0:
        # dE/dpsi = 2 z kappa (psi - <a>); its sign stays reliable near psi = 0
        # where energy differences drop below float resolution
        for j in range(1, grid.size - 1):
            if slope[j] < 0 <= slope[j + 1]:
                e, p = _refine(ev, grid[j], grid[j + 1], xtol)
                if e < energy:
                    psi, energy = p, e
        if psi > 0 and energy >= e0:
            psi, energy = 0.0, e0

    stationarity = abs(psi - ev.expect_a(psi)) if psi > 0 else 0.0
    if ev.top_occupancy(psi) > OCCUPANCY_TOL:
        raise TruncationError(
            f"ground-state weight at n_max={problem.n_max} exceeds {OCCUPANCY_TOL}; raise n_max"
        )
    return MfResult(float(psi), float(energy), stationarity <= 1e-6, ev.count, stationarity)


def _refine(ev, lo, hi, xtol):
    psi, _ = golden_section(ev.energy, lo, hi, max(xtol, 1e-9 * hi))
    try:
        psi = brentq(lambda p: p - ev.expect_a(p), lo, hi, xtol=1e-15,
                     rtol=4 * np.finfo(float).eps)
    except ValueError:
        pass
    return ev.energy(psi), psi


def mf_critical_kappa(site: SiteParams, mu: float, z: int = 2, n_max: int = DEFAULT_N_MAX,
                      psi_threshold: float = PSI_THRESHOLD, xtol: float = 1e-6,
                      kappa_min: float = 1e-9, kappa_start: float = 0.01) -> float:
    """Smallest kappa with psi* > psi_threshold at this mu, by bisection."""
    def superfluid(kappa):
        return mf_order_parameter(MfProblem(site, kappa, mu, z, n_max)).psi_star > psi_threshold

    if superfluid(kappa_min * site.beta):
        raise NumericalError("no Mott phase at this mu: superfluid already at vanishing hopping",
                             {"mu": mu, "z": z})
    lo, hi = 0.0, kappa_start * site.beta
    for _ in range(60):
        if superfluid(hi):
            break
        lo, hi = hi, 2 * hi
    else:
        raise BracketError("no superfluid onset found", bracket=(lo, hi), params={"mu": mu})
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if superfluid(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def mf_boundary(site: SiteParams, z: int, mu_axis, n_max: int = DEFAULT_N_MAX,
                xtol: float = 1e-6) -> np.ndarray:
    """Critical kappa per mu; NaN where no Mott phase exists at this mu."""
    out = []
    for mu in np.asarray(mu_axis, dtype=float):
        try:
            out.append(mf_critical_kappa(site, mu, z, n_max, xtol=xtol))
        except NumericalError:
            out.append(math.nan)
    return np.array(out)


def mf_lobe_tip(site: SiteParams, n: int, z: int = 2, n_max: int = DEFAULT_N_MAX,
                xtol: float = 1e-6, mu_tol: float = 1e-5) -> tuple:
    """(kappa_tip, mu_tip) of the n-th mean-field lobe, by golden search over mu."""
    if n < 1:
        raise ValueError("the n = 0 lobe has no tip")
    lo, hi = atomic_edge(n - 1, site), atomic_edge(n, site)
    res = minimize_scalar(lambda mu: -mf_critical_kappa(site, mu, z, n_max, xtol=xtol),
                          bounds=(lo, hi), method="bounded", options={"xatol": mu_tol})
    return float(-res.fun), float(res.x)
