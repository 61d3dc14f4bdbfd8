"""Constructive parameter tuples for the weighted-energy a priori estimate.

The estimate closes when, for given ``(n, p)``, one can pick in order
``eps -> delta -> nu -> mu`` such that

* ``eps < 2n (p - p_F) / (p - 1)``,
* ``eps = 3 delta1`` with ``delta1 = n delta / (2 (2 + delta))``,
* ``(n+1-2 delta1) - (n+1-3 delta1)(1 + 2 delta3) > 0``,
* ``nu delta2 - (n+2-eps)/2 > 0``,
* ``mu >= 2 nu / delta2``,
* ``mu/4 - nu - 1/2 - (n+1-eps)(1/2 + nu/(4 delta3 mu)) > 0``.

``delta2`` is the best constant in ``T3 >= delta2 (|grad u|^2 + b (-psi_t) u^2)``
where ``T3 = |grad u|^2 + 4 u grad u . grad psi + (4 + delta)|grad psi|^2 u^2``.
Completing the square with ``s^2 = 4 + delta/2`` leaves
``delta/(8+delta) |grad u|^2 + (delta/2)|grad psi|^2 u^2``, and since
``|grad psi|^2 = b (-psi_t) / (2 + delta)`` this gives
``delta2 = min(delta/(8+delta), delta/(2(2+delta)))``; the first branch wins for
``delta < 4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

NU_INFLATION = 1.1
MU_INFLATION = 1.01
DELTA3_FRACTION = 0.5


class InfeasibleError(ValueError):
    """No admissible parameters for the requested inputs."""


def fujita_exponent(n: int) -> float:
    return 1.0 + 2.0 / n


def eps_upper_bound(n: int, p: float) -> float:
    pf = fujita_exponent(n)
    if not p > pf:
        raise InfeasibleError(f"p={p} must exceed the Fujita exponent {pf:g} for n={n}")
    return 2.0 * n * (p - pf) / (p - 1.0)


def eps_admissible_bound(n: int, p: float) -> float:
    """Supremum of usable eps: the rate bound, capped where delta or delta3 cease to exist.

    ``eps = 3 delta1 < 3n/2`` because ``delta1 < n/2``, and the delta3 condition
    needs ``n + 1 - eps > 0``.
    """
    return min(eps_upper_bound(n, p), 1.5 * n, n + 1.0)


def delta1_of(delta: float, n: int) -> float:
    return n * delta / (2.0 * (2.0 + delta))


def delta_from_eps(eps: float, n: int) -> float:
    """Inverse of ``eps = 3 delta1(delta)``."""
    d1 = eps / 3.0
    if not 0 < d1 < n / 2.0:
        raise InfeasibleError(f"eps={eps} gives delta1={d1}, outside (0, n/2)")
    return 4.0 * d1 / (n - 2.0 * d1)


def derive_deltas(delta: float, n: int) -> tuple[float, float]:
    if not delta > 0:
        raise ValueError("delta must be positive")
    return delta1_of(delta, n), min(delta / (8.0 + delta), delta / (2.0 * (2.0 + delta)))


def gn_sigma(n: int, p: float) -> float:
    """Gagliardo-Nirenberg exponent for the ``L^{p+1}`` bound by ``L^2`` and ``H^1``."""
    return n * (p - 1.0) / (2.0 * (p + 1.0))


def delta3_bound(delta1: float, n: int) -> float:
    return delta1 / (2.0 * (n + 1.0 - 3.0 * delta1))


def mu_lower_root(n: int, eps: float, nu: float, delta3: float) -> float:
    """Positive root of ``mu^2 - B mu - C`` equivalent to the strengthened ``u_t^2`` condition."""
    m = n + 1.0 - eps
    B = 4.0 * nu + 2.0 + 2.0 * m
    C = m * nu / delta3
    return 0.5 * (B + math.sqrt(B * B + 4.0 * C))


@dataclass(frozen=True)
class FeasibleParams:
    n: int
    p: float
    eps: float
    delta: float
    delta1: float
    delta2: float
    delta3: float
    nu: float
    mu: float
    sigma: float

    def violations(self) -> list[str]:
        """Names of the inequalities that fail (empty when the tuple is sound)."""
        n, e = self.n, self.eps
        bad = []
        if not e < eps_upper_bound(n, self.p):
            bad.append("eps_bound")
        if not math.isclose(e, 3.0 * self.delta1, rel_tol=1e-12):
            bad.append("eps_3delta1")
        if not (n + 1 - 2 * self.delta1) - (n + 1 - 3 * self.delta1) * (1 + 2 * self.delta3) > 0:
            bad.append("delta3")
        if not self.nu * self.delta2 - 0.5 * (n + 2 - e) > 0:
            bad.append("nu")
        if not self.mu >= 2 * self.nu / self.delta2:
            bad.append("mu_nu")
        if not self.mu / 4 - self.nu - 0.5 - (n + 1 - e) * (0.5 + self.nu / (4 * self.delta3 * self.mu)) > 0:
            bad.append("mu_energy")
        if not 0 < self.sigma <= 1:
            bad.append("sigma")
        return bad


def solve_feasible(n: int, p: float, eps: Optional[float] = None, delta3_fraction: float = DELTA3_FRACTION) -> FeasibleParams:
    """Deterministic construction following ``p -> eps -> delta -> nu -> mu``.

    ``eps`` defaults to half of its admissible bound.
    """
    bound = eps_admissible_bound(n, p)
    if eps is None:
        eps = 0.5 * bound
    if not 0 < eps < bound:
        raise InfeasibleError(f"eps={eps} outside (0, {bound:.6g}) for n={n}, p={p}")
    sigma = gn_sigma(n, p)
    if not 0 < sigma <= 1:
        raise InfeasibleError(f"Gagliardo-Nirenberg exponent {sigma:.4g} outside (0, 1] for n={n}, p={p}")
    if not 0 < delta3_fraction < 1:
        raise ValueError("delta3_fraction must lie in (0, 1)")
    delta = delta_from_eps(eps, n)
    d1, d2 = derive_deltas(delta, n)
    d1 = eps / 3.0  # exact, avoids a round trip through delta
    d3 = delta3_fraction * delta3_bound(d1, n)
    nu = NU_INFLATION * (n + 2.0 - eps) / (2.0 * d2)
    mu = MU_INFLATION * max(2.0 * nu / d2, mu_lower_root(n, eps, nu, d3))
    fp = FeasibleParams(n, float(p), float(eps), delta, d1, d2, d3, nu, mu, sigma)
    bad = fp.violations()
    if bad:
        raise AssertionError(f"internal error: constructed tuple violates {bad}: {fp}")
    return fp


def mu0_curve(n: int, p: float, eps_list: Sequence[float], fractions: Sequence[float] = (0.5, 0.7, 0.9, 0.99)):
    """``(eps, mu0)`` with ``mu0`` the smallest constructed ``mu`` over a grid of delta3 fractions.

    delta itself is pinned by ``eps = 3 delta1``; delta3 is the remaining free knob.
    """
    out = []
    for eps in eps_list:
        best = min((solve_feasible(n, p, eps, f) for f in fractions), key=lambda fp: fp.mu)
        out.append((float(eps), best))
    return out


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])
