"""Exact diagonalization of finite JCH chains at fixed excitation number.

Total excitations N = sum_r (photons_r + atom_r) commute with the
Hamiltonian, so each N sector is built and solved on its own. Within sector
N no cavity can hold more than N photons, so no photon cutoff is needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import NumericalError
from .jc_core import SiteParams

Boundary = Literal["ring", "open"]

DENSE_LIMIT = 2000
NNZ_CAP = 2_000_000
RESIDUAL_TOL = 1e-10
SEED = 12345


@dataclass
class SectorBasis:
    """Configurations of M cavities with N excitations.

    Each state is a tuple of per-cavity (photons, atom) pairs, enumerated in
    lexicographic order of (photons_0, atom_0, photons_1, ...).
    """

    M: int
    N: int
    n_max: int
    states: list
    index: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)


def _local_states(n_max):
    return [(p, a) for p in range(n_max + 1) for a in (0, 1)]


def enumerate_sector(M: int, N: int, n_max: int | None = None) -> SectorBasis:
    if M < 1 or N < 0:
        raise ValueError("need M >= 1 and N >= 0")
    n_max = N if n_max is None else n_max
    local = _local_states(n_max)
    states = []

    def rec(prefix, left):
        if len(prefix) == M:
            if left == 0:
                states.append(tuple(prefix))
            return
        for p, a in local:
            if p + a <= left:
                rec(prefix + [(p, a)], left - p - a)

    rec([], N)
    return SectorBasis(M, N, n_max, states, {s: i for i, s in enumerate(states)})


def bonds(M: int, bc: Boundary):
    if bc not in ("ring", "open"):
        raise ValueError(f"boundary must be 'ring' or 'open', got {bc!r}")
    out = [(r, r + 1) for r in range(M - 1)]
    if bc == "ring" and M > 1:
        # for M = 2 this doubles the single bond: both neighbours are the same cavity
        out.append((M - 1, 0))
    return out


def build_sector(M: int, N: int, site: SiteParams, kappa: float, bc: Boundary = "ring",
                 n_max: int | None = None, nnz_cap: int = NNZ_CAP):
    """Basis and sparse real-symmetric Hamiltonian of the N-excitation sector.

    The Hamiltonian carries no chemical potential; subtract mu*N as needed.
    """
    if M < 2:
        raise ValueError("exact diagonalization needs at least two cavities")
    basis = enumerate_sector(M, N, n_max)
    rows, cols, vals = [], [], []
    diag = np.empty(basis.dim)
    links = bonds(M, bc)
    for i, state in enumerate(basis.states):
        diag[i] = sum(site.omega * p + site.epsilon * a for p, a in state)
        for r, (p, a) in enumerate(state):
            # sigma+ a: |g,p> -> |e,p-1>
            if a == 0 and p > 0:
                new = list(state)
                new[r] = (p - 1, 1)
                j = basis.index[tuple(new)]
                g = site.beta * math.sqrt(p)
                rows += [i, j]
                cols += [j, i]
                vals += [g, g]
        for r, s in links:
            # -kappa (a_r^dag a_s + a_s^dag a_r); the h.c. half is added by symmetry
            for src, dst in ((s, r), (r, s)):
                ps, as_ = state[src]
                pd, ad = state[dst]
                if ps == 0 or pd + 1 > basis.n_max:
                    continue
                new = list(state)
                new[src] = (ps - 1, as_)
                new[dst] = (pd + 1, ad)
                key = tuple(new)
                if key not in basis.index:
                    raise NumericalError("hopping left the excitation sector",
                                         {"state": state, "M": M, "N": N})
                j = basis.index[key]
                rows.append(j)
                cols.append(i)
                vals.append(-kappa * math.sqrt(ps) * math.sqrt(pd + 1))
        if len(vals) > nnz_cap:
            raise NumericalError(f"sector exceeds {nnz_cap} nonzeros",
                                 {"M": M, "N": N, "dim": basis.dim})
    h = sp.coo_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim)).tocsr()
    h = h + sp.diags(diag)
    return basis, h.tocsr()


def _lowest(h, params, count=1):
    dim = h.shape[0]
    if dim <= DENSE_LIMIT:
        w, v = np.linalg.eigh(h.toarray())
        w, v = w[:count], v[:, :count]
    else:
        v0 = np.random.default_rng(SEED).standard_normal(dim)
        try:
            w, v = eigsh(h, k=count, which="SA", v0=v0, tol=1e-13, maxiter=20 * dim)
        except ArpackNoConvergence as exc:
            raise NumericalError(f"Lanczos did not converge: {exc}", params) from exc
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    resid = np.linalg.norm(h @ v - v * w, axis=0)
    scale = max(1.0, abs(h).max())
    if not np.all(resid <= RESIDUAL_TOL * scale):
        raise NumericalError(f"eigen-residual {resid.max():.3g} above tolerance", params)
    return w


def ground_energy(M: int, N: int, site: SiteParams, kappa: float, bc: Boundary = "ring") -> float:
    """Lowest eigenvalue of the N-excitation sector (no chemical potential)."""
    _, h = build_sector(M, N, site, kappa, bc)
    return float(_lowest(h, {"M": M, "N": N, "kappa": kappa, "bc": bc})[0])


@dataclass
class EdSpectrum:
    M: int
    bc: Boundary
    kappa: float
    site: SiteParams
    energies: np.ndarray  # E0(N) for N = 0..N_max

    @property
    def n_max(self) -> int:
        return self.energies.size - 1


def sector_ground_energies(M: int, N_max: int, site: SiteParams, kappa: float,
                           bc: Boundary = "ring") -> EdSpectrum:
    energies = np.array([ground_energy(M, N, site, kappa, bc) for N in range(N_max + 1)])
    return EdSpectrum(M, bc, kappa, site, energies)


def filling_at(spectrum: EdSpectrum, mu: float) -> int:
    """N minimising E0(N) - mu*N; ties go to the smaller N."""
    grand = spectrum.energies - mu * np.arange(spectrum.energies.size)
    n_star = int(np.argmin(grand))
    if n_star == spectrum.n_max:
        warnings.warn(f"optimal excitation number hit N_max={spectrum.n_max} at mu={mu}",
                      RuntimeWarning, stacklevel=2)
    return n_star


def mean_excitation_curve(spectrum: EdSpectrum, mu_axis) -> np.ndarray:
    """Mean excitation per cavity N*(mu)/M on a mu axis."""
    return np.array([filling_at(spectrum, mu) for mu in np.asarray(mu_axis, float)]) / spectrum.M


def plateau_edges(spectrum: EdSpectrum, N: int):
    """(mu_lower, mu_upper) on which N is the optimal excitation number.

    Returns None when the plateau is absent (E0 is not convex there).
    """
    e = spectrum.energies
    if not 0 <= N < spectrum.n_max:
        raise ValueError(f"need 0 <= N < N_max={spectrum.n_max}")
    lower = -math.inf if N == 0 else max(
        (e[N] - e[m]) / (N - m) for m in range(N)
    )
    upper = min((e[m] - e[N]) / (m - N) for m in range(N + 1, e.size))
    if upper <= lower:
        return None
    return lower, upper


def plateau_boundaries(M: int, site: SiteParams, kappa_axis, target: int = 1,
                       bc: Boundary = "ring"):
    """Lower and upper mu edges of the mean-excitation-``target`` plateau per kappa."""
    if target < 1:
        raise ValueError("target mean excitation must be >= 1")
    N = target * M
    lower, upper = [], []
    for kappa in np.asarray(kappa_axis, float):
        spec = sector_ground_energies(M, N + 1, site, float(kappa), bc)
        edges = plateau_edges(spec, N)
        lower.append(math.nan if edges is None else edges[0])
        upper.append(math.nan if edges is None else edges[1])
    return np.array(lower), np.array(upper)


def ring_single_excitation_spectrum(M: int, site: SiteParams, kappa: float, mu: float) -> np.ndarray:
    """All 2M eigenvalues of the one-excitation sector on a ring, minus mu."""
    _, h = build_sector(M, 1, site, kappa, "ring")
    return np.linalg.eigvalsh(h.toarray()) - mu


def lowest_excitation(M: int, N: int, site: SiteParams, kappa: float, bc: Boundary = "ring") -> float:
    """E0(N+1) - E0(N): cost of one extra excitation in a finite chain."""
    return ground_energy(M, N + 1, site, kappa, bc) - ground_energy(M, N, site, kappa, bc)
