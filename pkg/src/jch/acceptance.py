"""Built-in verification suite.

Each ``check_*`` function runs one exit criterion and returns a list of
:class:`CheckResult` rows; ``run_all`` collects them for the CLI ``verify``
command and for ``tests/test_acceptance.py``.
"""

from __future__ import annotations

import filecmp
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bloch, exact_diag, jc_core, meanfield, phase_map
from .jc_core import SiteParams

OMEGA = 0.0


@dataclass
class CheckResult:
    group: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.group:<16} {self.name}: {self.detail}"


def _site(delta, beta=1.0, omega=OMEGA):
    return SiteParams.from_detuning(delta, beta, omega)


def check_closed_form() -> list:
    """Block eigenvalues against the closed-form polariton and hole bands."""
    t0 = time.perf_counter()
    ks = np.linspace(-np.pi, np.pi, 101)
    mu = OMEGA - 0.5
    worst = {"particle": 0.0, "hole n>=2": 0.0, "hole n=1 envelope": 0.0, "hole n=1 physical": 0.0}
    for delta in (-1.0, 0.0, 1.0):
        site = _site(delta)
        for kappa in (0.001, 0.01, 0.1):
            for n in range(1, 7):
                cell = bloch.UnitCellSpec.uniform(site, n, kappa, mu)
                e = bloch.band_energies(cell, "particle", ks)
                lo, hi = bloch.closed_form_particle(n, ks, site, kappa, mu)
                worst["particle"] = max(worst["particle"], np.abs(e - np.stack([lo, hi], 1)).max())
                e = bloch.band_energies(cell, "hole", ks)
                lo, hi = bloch.closed_form_hole(n, ks, site, kappa, mu)
                if n >= 2:
                    worst["hole n>=2"] = max(worst["hole n>=2"], np.abs(e - np.stack([lo, hi], 1)).max())
                else:
                    worst["hole n=1 envelope"] = max(worst["hole n=1 envelope"], np.abs(e[:, 0] - lo).max())
                    phys = bloch.physical_hole_root(ks, site, kappa, mu)
                    worst["hole n=1 physical"] = max(worst["hole n=1 physical"], np.abs(e[:, 0] - phys).max())
    elapsed = time.perf_counter() - t0
    tol = 1e-10
    out = []
    for key, val in worst.items():
        out.append(CheckResult("closed-form", f"closed form, {key}", val <= tol, f"max |diff| = {val:.3e} (tol {tol:g})"))
    out.append(CheckResult("closed-form", "closed form runtime", elapsed < 5.0, f"{elapsed:.2f} s (limit 5 s)"))
    return out


def check_atomic_lobes() -> list:
    worst = 0.0
    failures = []
    for delta in (0.0, 1.0):
        site = _site(delta)
        chi = lambda n: jc_core.rabi_chi(n, site)
        for n in range(1, 6):
            lower, upper = phase_map.lobe_boundary((n,), (site,), 0.0)
            expected = (chi(n - 1) - chi(n), chi(n) - chi(n + 1))
            got = (lower - site.omega, upper - site.omega)
            for side, g, x in zip(("lower", "upper"), got, expected):
                err = abs(g - x)
                worst = max(worst, err)
                if err > 1e-12:
                    failures.append(f"n={n} delta={delta:g} {side}: {g:.12f} vs {x:.12f}")
    detail = f"max |diff| = {worst:.3e}"
    if failures:
        detail += "; mismatches: " + ", ".join(failures)
    return [CheckResult("atomic-lobes", "zero-hopping lobe edges = chi differences", not failures, detail)]


def check_ring_oracle() -> list:
    t0 = time.perf_counter()
    worst = 0.0
    kappa, mu = 0.05, OMEGA - 0.5
    for delta in (0.0, 1.0):
        site = _site(delta)
        cell = bloch.UnitCellSpec.uniform(site, 0, kappa, mu)
        for M in (4, 6, 8):
            ed = exact_diag.ring_single_excitation_spectrum(M, site, kappa, mu)
            ks = 2 * np.pi * np.arange(M) / M
            band = np.sort(bloch.band_energies(cell, "particle", ks).ravel())
            worst = max(worst, np.abs(ed - band).max())
    elapsed = time.perf_counter() - t0
    return [
        CheckResult("ring-oracle", "ring N=1 spectrum = n=0 Bloch bands", worst <= 1e-10, f"max |diff| = {worst:.3e}"),
        CheckResult("ring-oracle", "ring oracle runtime", elapsed < 1.0, f"{elapsed:.2f} s (limit 1 s)"),
    ]


def approximation_error(kappa: float, M: int = 6, delta: float = 0.0) -> float:
    """ED cost of one polariton above unit filling minus the Bloch band minimum."""
    site = _site(delta)
    ed = exact_diag.lowest_excitation(M, M, site, kappa, "ring")
    ks = 2 * np.pi * np.arange(M) / M
    band = bloch.band_energies(bloch.UnitCellSpec.uniform(site, 1, kappa, 0.0), "particle", ks)
    return ed - band[:, 0].min()


def check_error_scaling() -> list:
    e1, e2 = approximation_error(0.01), approximation_error(0.02)
    ratio = e2 / e1
    return [CheckResult("error-scaling", "one-polariton error ~ kappa^2", abs(ratio - 4) <= 1.0,
                        f"err(0.01)={e1:.4e}, err(0.02)={e2:.4e}, ratio={ratio:.3f} (4 +/- 1)")]


def check_reference_point() -> list:
    site = _site(0.0)
    mu, kappa = site.omega - 0.5, 0.01
    ep = bloch.band_energies(bloch.UnitCellSpec.uniform(site, 0, kappa, mu), "particle", [0.0])[0, 0]
    eh = bloch.band_energies(bloch.UnitCellSpec.uniform(site, 1, kappa, mu), "hole", [0.0])[0, 0]
    return [
        CheckResult("reference-point", "E^p_-(0, k=0) = -0.51005", abs(ep + 0.51005) <= 1e-6, f"{ep:.10f}"),
        CheckResult("reference-point", "E^h_-(1, k=0) = +0.49", abs(eh - 0.49) <= 1e-6, f"{eh:.10f}"),
    ]


def mf_boundary_mu(site, kappa, edge, inside, z=2, width=5e-4, iters=50):
    """mu on the mean-field boundary at fixed kappa next to an atomic edge.

    ``inside`` is +1 or -1: the side of ``edge`` on which the Mott lobe lies.
    """
    def sf(mu):
        return meanfield.mf_order_parameter(meanfield.MfProblem(site, kappa, mu, z)).psi_star \
            > meanfield.PSI_THRESHOLD

    mott, fluid = edge + inside * width, edge
    if sf(mott) or not sf(fluid):
        raise RuntimeError("mean-field boundary not bracketed near the edge")
    for _ in range(iters):
        mid = 0.5 * (mott + fluid)
        if sf(mid):
            fluid = mid
        else:
            mott = mid
    return 0.5 * (mott + fluid)


def check_meanfield() -> list:
    site = _site(0.0)
    out = []
    kappa = 1e-4
    dists = []
    for label, n, inside in (("lobe 0 upper", 0, -1), ("lobe 1 lower", 0, +1), ("lobe 1 upper", 1, -1)):
        edge = jc_core.atomic_edge(n, site)
        dists.append((label, abs(mf_boundary_mu(site, kappa, edge, inside) - edge)))
    worst = max(d for _, d in dists)
    out.append(CheckResult("mean-field", "MF boundary within 1e-4 of atomic edges at kappa=1e-4", worst <= 1e-4,
                           ", ".join(f"{l}: {d:.6e}" for l, d in dists)))

    mf_tip, mf_mu = meanfield.mf_lobe_tip(site, 1)
    op_tip = phase_map.lobe_tip((1,), (site,))
    out.append(CheckResult("mean-field", "MF lobe-1 tip differs from one-polariton tip", mf_tip != op_tip
                           and abs(mf_tip - op_tip) > 1e-3,
                           f"MF tip kappa={mf_tip:.6f} at mu-omega={mf_mu - site.omega:.4f}; "
                           f"one-polariton tip kappa={op_tip:.6f}"))

    worst = 0.0
    for kap, mu in ((0.03, -0.5), (0.05, -0.9), (0.1, -0.5), (0.001, -0.5), (0.04, -0.3)):
        a = meanfield.mf_order_parameter(meanfield.MfProblem(site, kap, mu, z=2)).psi_star
        b = meanfield.mf_order_parameter(meanfield.MfProblem(site, 2 * kap, mu, z=1)).psi_star
        worst = max(worst, abs(a - b))
    out.append(CheckResult("mean-field", "psi* depends on z*kappa only", worst <= 1e-10, f"max |diff| = {worst:.3e}"))
    return out


def finite_cavity_edges(kappa=0.02, cavities=(2, 3, 4, 5), bc="open"):
    site = _site(0.0)
    rows = []
    for M in cavities:
        lo, hi = exact_diag.plateau_boundaries(M, site, [kappa], 1, bc)
        rows.append((M, lo[0], hi[0]))
    return rows


def _monotone_toward(values, target):
    d = np.abs(np.asarray(values) - target)
    return bool(np.all(np.diff(d) < 0))


def check_finite_cavity() -> list:
    t0 = time.perf_counter()
    site = _site(0.0)
    kappa = 0.02
    rows = finite_cavity_edges(kappa)
    lower_1p, upper_1p = phase_map.lobe_boundary((1,), (site,), kappa)
    lowers = [r[1] for r in rows]
    uppers = [r[2] for r in rows]
    ok = _monotone_toward(lowers, lower_1p) and _monotone_toward(uppers, upper_1p)
    elapsed = time.perf_counter() - t0
    detail = "; ".join(f"M={M}: [{lo:.5f}, {hi:.5f}]" for M, lo, hi in rows)
    detail += f"; one-polariton [{lower_1p:.5f}, {upper_1p:.5f}] (open chains)"
    return [
        CheckResult("finite-cavity", "plateau edges approach one-polariton boundary with M", ok, detail),
        CheckResult("finite-cavity", "finite-cavity runtime", elapsed < 120, f"{elapsed:.1f} s (limit 120 s)"),
    ]


def doped_maps(kappa_axis, mu_axis):
    s0, s1 = _site(0.0), _site(1.0)
    tuned = phase_map.gap_map((s0,), kappa_axis, mu_axis)
    detuned = phase_map.gap_map((s1,), kappa_axis, mu_axis)
    doped = phase_map.gap_map((s0, s1), kappa_axis, mu_axis)
    return tuned, detuned, doped


def check_doped_intersection() -> list:
    kappa_axis = np.linspace(0.0, 1e-3, 5)
    mu_axis = OMEGA + np.linspace(-2.0, -0.27, 347)
    tuned, detuned, doped = doped_maps(kappa_axis, mu_axis)
    ok, dev = phase_map.intersection_check(tuned, detuned, doped, kappa_max_small=1e-3)
    out = [CheckResult("doped-lattice", "doped Mott set = tuned n detuned at kappa<=1e-3", ok,
                       f"max deviation {dev:.3e} (tol 1e-3)")]

    # count over whole tuned lobes n = 2, 3
    mu_axis = OMEGA + np.linspace(-0.41, -0.27, 141)
    tuned, _, doped = doped_maps(np.array([1e-3]), mu_axis)
    nt, nd = tuned.lobe_count(0), doped.lobe_count(0)
    out.append(CheckResult("doped-lattice", "doped map has twice the lobe count", nd == 2 * nt and nt > 0,
                           f"tuned {nt}, doped {nd} over (mu-omega) in [-0.41, -0.27]"))
    return out


def semiconductor_scan(kappa_axis=None, mu_axis=None):
    if kappa_axis is None:
        kappa_axis = np.linspace(0.0, 0.15, 61)
    if mu_axis is None:
        mu_axis = OMEGA + np.linspace(-2.0, -0.25, 141)
    tuned, detuned, doped = doped_maps(kappa_axis, mu_axis)
    kind = phase_map.minimal_excitation(doped)
    # only backgrounds with unequal fillings, where both a particle and a hole can be made
    mixed = np.array([isinstance(f, tuple) and len(set(f)) > 1 for f in doped.fillings])
    kind = np.where(mixed[None, :] & np.isfinite(doped.hole_gap), kind, "")
    anomaly = doped.mott_mask() & (doped.gap > np.maximum(tuned.gap, detuned.gap) + 1e-9)

    def first(mask):
        idx = np.argwhere(mask)
        if idx.size == 0:
            return None
        i, j = idx[0]
        return float(kappa_axis[i]), float(mu_axis[j] - OMEGA)

    return {
        "n_type": first(kind == "particle"),
        "p_type": first(kind == "hole"),
        "anomaly": first(anomaly),
        "counts": (int((kind == "particle").sum()), int((kind == "hole").sum()), int(anomaly.sum())),
    }


def check_semiconductor() -> list:
    res = semiconductor_scan()
    out = []
    for key, label in (("n_type", "n-type point (particle cheapest, mixed filling)"),
                       ("p_type", "p-type point (hole cheapest, mixed filling)"),
                       ("anomaly", "doped gap > max(tuned, detuned)")):
        pt = res[key]
        out.append(CheckResult("semiconductor", label, pt is not None,
                               "none found" if pt is None else
                               f"first at kappa={pt[0]:.4f}, mu-omega={pt[1]:.4f}"))
    return out


def check_determinism_and_gauge() -> list:
    from . import cli

    out = []
    with tempfile.TemporaryDirectory() as tmp:
        same = True
        for cmd in ("band", "phase", "doped"):
            paths = []
            for rep in range(2):
                p = Path(tmp) / f"{cmd}{rep}.csv"
                argv = ["--command", cmd, "--output", str(p), "--kappa_points", "12",
                        "--mu_points", "15", "--workers", "1"]
                if cli.main(argv) != 0:
                    same = False
                paths.append(p)
            same = same and filecmp.cmp(*paths, shallow=False)
        out.append(CheckResult("reproducibility", "byte-identical CLI reruns", same, "band, phase, doped"))

    c = 3.7
    worst = {}
    site = _site(0.4, omega=1.3)
    shifted = site.shifted(c)
    mu, kappa = 1.3 - 0.45, 0.02
    worst["jc_core"] = float(jc_core.atomic_limit_filling(site, mu) != jc_core.atomic_limit_filling(shifted, mu + c))
    ks = np.linspace(-np.pi, np.pi, 17)
    e = bloch.band_energies(bloch.UnitCellSpec((site, _site(1.0, omega=1.3)), (1, 1), kappa, mu), "particle", ks)
    e2 = bloch.band_energies(bloch.UnitCellSpec((shifted, _site(1.0, omega=1.3 + c)), (1, 1), kappa, mu + c),
                             "particle", ks)
    worst["bloch"] = float(np.abs(e - e2).max())
    g = phase_map.excitation_gaps(bloch.UnitCellSpec.uniform(site, 1, kappa, mu))
    g2 = phase_map.excitation_gaps(bloch.UnitCellSpec.uniform(shifted, 1, kappa, mu + c))
    worst["phase_map"] = max(abs(a - b) for a, b in zip(g, g2))
    r = meanfield.mf_order_parameter(meanfield.MfProblem(site, 0.04, 1.3 - 0.3))
    r2 = meanfield.mf_order_parameter(meanfield.MfProblem(shifted, 0.04, 1.3 - 0.3 + c))
    worst["meanfield"] = max(abs(r.psi_star - r2.psi_star), abs(r.ground_energy - r2.ground_energy))
    ed = max(abs(exact_diag.ground_energy(4, N, shifted, kappa) - exact_diag.ground_energy(4, N, site, kappa) - c * N)
             for N in range(0, 4))
    worst["exact_diag"] = ed
    val = max(worst.values())
    out.append(CheckResult("reproducibility", "gauge shift (omega, epsilon, mu) + c", val <= 1e-10,
                           ", ".join(f"{k}: {v:.1e}" for k, v in worst.items())))
    return out


CHECKS = (
    check_closed_form,
    check_atomic_lobes,
    check_ring_oracle,
    check_error_scaling,
    check_reference_point,
    check_meanfield,
    check_finite_cavity,
    check_doped_intersection,
    check_semiconductor,
    check_determinism_and_gauge,
)


def run_all(echo=print) -> list:
    results = []
    for check in CHECKS:
        for res in check():
            if echo:
                echo(res.line())
            results.append(res)
    return results
