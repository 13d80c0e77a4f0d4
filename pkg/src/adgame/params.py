"""Game parameters and the solver for the coupled inequality system.

The nine quantities (Q, xi, delta, sigma, rho1, rho2, kappa, nu, theta)
must satisfy a chain of strict inequalities for the strategy guarantees to
hold.  `solve_params` picks the smallest admissible integers and takes
delta and sigma at half their upper bounds, then re-verifies everything
exactly.  Relaxed parameter sets carry valid=False ("toy" mode) and are
accepted only where explicitly allowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .rat import Rat, rat


@dataclass(frozen=True)
class ParamSet:
    q: int
    kappa: int
    nu: int
    theta: int
    xi: Rat
    delta: Rat
    sigma: Rat
    rho1: Rat
    rho2: Rat
    valid: bool

    def describe(self) -> str:
        tag = "valid" if self.valid else "toy (not theorem-covered)"
        return (
            f"Q={self.q} kappa={self.kappa} nu={self.nu} theta={self.theta} "
            f"xi={self.xi} delta={self.delta} sigma={self.sigma} "
            f"rho1={self.rho1} rho2={self.rho2} [{tag}]"
        )


def constraint_violations(ps: ParamSet) -> list[str]:
    """Every violated constraint of the parameter system, exactly checked."""
    bad = []
    xi, delta, sigma = ps.xi, ps.delta, ps.sigma
    rho1, rho2 = ps.rho1, ps.rho2
    if not (rat(2, 3) < xi < 1):
        bad.append("2/3 < xi < 1")
    if not (0 < delta < xi / 2):
        bad.append("0 < delta < xi/2")
    if not sigma > 0:
        bad.append("sigma > 0")
    if not (rho1 > rho2 > 0):
        bad.append("rho1 > rho2 > 0")
    if ps.nu != 17 * ps.q:
        bad.append("nu = 17Q")
    if ps.kappa < 12:
        bad.append("kappa >= 12")
    if not ps.q > rat(2 * ps.kappa) / (1 - xi):
        bad.append("Q > 2*kappa/(1-xi)")
    if rho2 != 8:
        bad.append("rho2 = 8")
    if not rho1 > rat(22 * ps.q) / (1 - xi):
        bad.append("rho1 > 22Q/(1-xi)")
    if ps.theta != 2 * (6 + 3 * rho1):
        bad.append("theta = 2(6 + 3*rho1)")
    if not delta < min((1 - xi) / 6, (xi - rat(2, 3)) / ps.q):
        bad.append("delta < min((1-xi)/6, (xi-2/3)/Q)")
    if not sigma < min(delta / (3 * ps.nu * ps.theta), 1 / (2 * rho1)):
        bad.append("sigma < min(delta/(3*nu*theta), 1/(2*rho1))")
    return bad


def solve_params(xi, kappa: int = 12) -> ParamSet:
    """Solve the parameter chain bottom-up from xi and kappa.

    Q and rho1 are the smallest integers strictly exceeding their lower
    bounds; delta and sigma sit at half their upper bounds for maximal
    slack in the drift lemma.
    """
    xi = rat(xi)
    if not rat(2, 3) < xi < 1:
        raise ValueError(f"xi must satisfy 2/3 < xi < 1, got {xi}")
    if kappa < 12:
        raise ValueError(f"kappa must be >= 12, got {kappa}")

    q = math.floor(rat(2 * kappa) / (1 - xi)) + 1
    nu = 17 * q
    rho2 = rat(8)
    rho1 = rat(math.floor(rat(22 * q) / (1 - xi)) + 1)
    theta_r = 2 * (6 + 3 * rho1)
    assert theta_r.denominator == 1
    theta = int(theta_r)
    delta = min((1 - xi) / 6, (xi - rat(2, 3)) / q) / 2
    sigma = min(delta / (3 * nu * theta), 1 / (2 * rho1)) / 2

    ps = ParamSet(q=q, kappa=kappa, nu=nu, theta=theta, xi=xi, delta=delta,
                  sigma=sigma, rho1=rho1, rho2=rho2, valid=True)
    bad = constraint_violations(ps)
    if bad:
        raise AssertionError(f"solver produced an invalid set: {bad}")
    return ps


def toy_params(q: int = 8, kappa: int = 3, xi=rat(3, 4), sigma=rat(1, 4)) -> ParamSet:
    """Small parameters for interactive play and demos.

    None of the lemma guarantees apply; the set is watermarked via
    valid=False and rejected wherever a valid set is required.
    """
    xi = rat(xi)
    delta = min((1 - xi) / 6, (xi - rat(2, 3)) / q) / 2
    return ParamSet(q=q, kappa=kappa, nu=17 * q, theta=2 * (6 + 3 * 64),
                    xi=xi, delta=delta, sigma=rat(sigma), rho1=rat(64), rho2=rat(8),
                    valid=False)
