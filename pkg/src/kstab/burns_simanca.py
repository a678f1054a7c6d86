"""The scalar-flat Burns-Simanca metric on the blowup of C^m at the origin,
its far-field expansion, the cutoff gluing into a projective space, lifted
Hamiltonians and radial integrals over the gluing ball.

Radial conventions.  A U(m)-invariant potential F(rho), rho = |w|^2, has
momentum tau = rho F'(rho) and momentum profile phi(tau) = rho d tau / d rho.
With omega = i dd-bar F the volume form is m (2 pi)^m tau^{m-1} d tau times
the normalized sphere measure, and

    s = -(m-1) L / tau - dL/d tau,   L = (m-1) phi/tau + phi' - m.

Scalar flatness gives tau^{m-1} L = const.  Smoothness across the
exceptional divisor {tau = tau0} requires phi(tau0) = 0 and phi'(tau0) = 1,
and tau0 = 1/(2 pi) gives lines in the divisor unit area.  The remaining
first-order equation d log rho / d tau = 1/phi is integrated numerically in
x = tau0/tau, with the gauge rho / (2 tau) -> 1 and psi = F - rho/2 -> 0 at
infinity.  Then psi ~ d0 r^{4-2m} + d1 r^{2-2m} + d2 r^{6-4m} for large r.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from math import comb, factorial, log, pi
from pathlib import Path
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import cubature, solve_ivp
from scipy.special import expit, log_expit

from .errors import ConvergenceError, DimensionError, DomainError, QuadratureError, ValidationError
from .jets import Jet
from .kahler_models import fs_radial_jet, radial_scalar, unitary_frame

TAU0 = 1.0 / (2.0 * pi)
ODE_RTOL = 1e-13
QUAD_RTOL = 1e-8
CUTOFF_ORDER = 5
INNER_CUTOFF = 1e-8      # inner integration limit, in units of eps^2


def leading_coefficient(m: int) -> float:
    """Closed-form d0 = -1 / (2 pi^{m-1} (m-2))."""
    return -1.0 / (2 * pi ** (m - 1) * (m - 2))


def second_coefficient(m: int) -> float:
    """Closed-form d1 = (m-2) / (2 m (m-1) pi^m)."""
    return (m - 2) / (2 * m * (m - 1) * pi ** m)


def _check_dim(m: int) -> int:
    m = int(m)
    if m < 3:
        raise DimensionError("the scalar-flat blowup metric is only used for dimension m >= 3",
                             m=m)
    return m


# --------------------------------------------------------------------------
# the ODE solution
# --------------------------------------------------------------------------

class BurnsSimancaSolution:
    """Dense solution of the radial equation in the variable x = tau0/tau.

    On [0, split] the unknowns are u = log(2 tau / rho) and psi; on
    [split, 1] they are v = u + log(1 - x) and chi = psi - tau0 log(1 - x),
    which stay bounded up to the exceptional divisor x = 1.
    """

    def __init__(self, m: int, rtol: float = ODE_RTOL, split: float = 0.5):
        self.m = m = _check_dim(m)
        self.split = split
        one_minus_x = Polynomial([1.0, -1.0])
        x = Polynomial([0.0, 1.0])
        self.P = 1 - (m - 1) * x ** (m - 1) + (m - 2) * x ** m
        self.N = x ** (m - 2) * ((m - 1) - (m - 2) * x)
        self.Q, rem = divmod(self.P, one_minus_x)
        self.R, rem2 = divmod(self.N - self.Q, one_minus_x)
        self.S, rem3 = divmod(1 - x ** 2 * self.Q, one_minus_x)
        if max(np.abs(rem.coef).max(), np.abs(rem2.coef).max(), np.abs(rem3.coef).max()) > 1e-12:
            raise ConvergenceError("polynomial factorization of the momentum profile failed", m=m)
        grid = np.linspace(0, 1, 2001)
        if np.any(self.Q(grid) <= 0):
            raise DomainError("momentum profile is not positive", m=m)

        def rhs_a(xv, y):
            u = y[0]
            du = self.N(xv) / self.P(xv)
            if xv == 0.0:
                dpsi = -TAU0 if m == 3 else 0.0
            else:
                dpsi = TAU0 * np.expm1(-u) / (xv ** 2 * self.P(xv))
            return [du, dpsi]

        def rhs_b(xv, y):
            v = y[0]
            return [self.R(xv) / self.Q(xv),
                    TAU0 * (np.exp(-v) - self.S(xv)) / (xv ** 2 * self.Q(xv))]

        sol_a = solve_ivp(rhs_a, (0.0, split), [0.0, 0.0], method="DOP853", rtol=rtol,
                          atol=1e-30, dense_output=True)
        if not sol_a.success:
            raise ConvergenceError("far-field integration failed", message=sol_a.message)
        ua, psia = sol_a.y[:, -1]
        yb0 = [ua + np.log1p(-split), psia - TAU0 * np.log1p(-split)]
        sol_b = solve_ivp(rhs_b, (split, 1.0), yb0, method="DOP853", rtol=rtol,
                          atol=1e-16, dense_output=True)
        if not sol_b.success:
            raise ConvergenceError("near-divisor integration failed", message=sol_b.message)
        self._a, self._b = sol_a.sol, sol_b.sol
        self.nfev = sol_a.nfev + sol_b.nfev

    # ---- evaluation in the logit variable t = log(x / (1 - x)) ----------
    def _state(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        x = expit(t)
        inner = x > self.split
        first = np.where(inner, 0.0, self._a(np.minimum(x, self.split))[0])
        second = np.where(inner, self._b(np.clip(x, self.split, 1.0))[0], 0.0)
        return t, x, inner, first, second

    def _log_rho_t(self, t):
        t, x, inner, u, v = self._state(t)
        base = log(2 * TAU0) - log_expit(t)
        return np.where(inner, base + log_expit(-t) - v, base - u)

    def _dlog_rho_dt(self, t):
        t = np.asarray(t, float)
        x, y = expit(t), expit(-t)
        inner = x > self.split
        xa = np.minimum(x, self.split)
        xb = np.maximum(x, self.split)
        da = -(y + x * y * self.N(xa) / self.P(xa))
        db = -(1 + x * y * self.R(xb) / self.Q(xb))
        return np.where(inner, db, da)

    def t_of_rho(self, rho, tol: float = 1e-14, max_iter: int = 200) -> np.ndarray:
        """Invert rho(t), which is strictly decreasing, by safeguarded Newton."""
        target = np.log(np.atleast_1d(np.asarray(rho, float)))
        lo = np.full_like(target, -90.0)
        hi = np.full_like(target, 90.0)
        t = np.clip(log(2 * TAU0) - target, -89.0, 89.0)
        for _ in range(max_iter):
            f = self._log_rho_t(t) - target
            done = np.abs(f) <= tol * np.maximum(1.0, np.abs(target))
            if np.all(done):
                return t
            lo = np.where(f > 0, t, lo)
            hi = np.where(f < 0, t, hi)
            step = t - f / self._dlog_rho_dt(t)
            bad = ~((step > lo) & (step < hi))
            t = np.where(done, t, np.where(bad, 0.5 * (lo + hi), step))
        raise ConvergenceError("radius inversion did not converge",
                               worst=float(np.max(np.abs(self._log_rho_t(t) - target))))

    def jet(self, rho) -> dict:
        """psi and its first four rho-derivatives, with tau and phi, at rho (unit scale)."""
        m = self.m
        rho = np.atleast_1d(np.asarray(rho, float))
        t, x, inner, first, second = self._state(self.t_of_rho(rho))
        y = expit(-t)
        tau = TAU0 / x
        if np.any(inner):
            chi = self._b(np.clip(x, self.split, 1.0))[1]
        else:
            chi = np.zeros_like(x)
        psi_far = self._a(np.minimum(x, self.split))[1]
        psi = np.where(inner, chi + TAU0 * log_expit(-t), psi_far)
        p_minus_1 = -(m - 1) * x ** (m - 1) + (m - 2) * x ** m
        P = np.where(inner, y * self.Q(x), 1 + p_minus_1)
        phi = tau * P
        dphi_m1 = (m - 1) * (m - 2) * (x ** (m - 1) - x ** m)
        dphi = 1 + dphi_m1
        ddphi = (m - 1) * (m - 2) / TAU0 * (m * x ** (m + 1) - (m - 1) * x ** m)
        psi1 = np.where(inner, tau / rho - 0.5, 0.5 * np.expm1(first))
        psi2 = tau * p_minus_1 / rho ** 2
        n3 = phi * dphi_m1 - 2 * tau * p_minus_1
        psi3 = n3 / rho ** 3
        dn3 = dphi * dphi_m1 + phi * ddphi - 2 * dphi_m1
        psi4 = (phi * dn3 - 3 * n3) / rho ** 4
        L = (m - 1) * phi / tau + dphi - m
        dL = (m - 1) * (dphi / tau - phi / tau ** 2) + ddphi
        scal = -(m - 1) * L / tau - dL
        return {"psi": psi, "d1": psi1, "d2": psi2, "d3": psi3, "d4": psi4,
                "tau": tau, "phi": phi, "x": x, "scalar": scal}


# --------------------------------------------------------------------------
# the radial profile and its asymptotics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileGrid:
    r_min: float = 1e-1
    r_max: float = 1e3
    n: int = 400

    def radii(self) -> np.ndarray:
        if not 0 < self.r_min < self.r_max or self.n < 10:
            raise ValidationError("invalid profile grid", r_min=self.r_min, r_max=self.r_max,
                                  n=self.n)
        return np.geomspace(self.r_min, self.r_max, self.n)


@dataclass(frozen=True, eq=False)
class AsymptoticFit:
    d0: float
    d1: float
    d2: float
    residual: float
    tail_ratio: float
    flagged: bool
    window: tuple

    def __iter__(self):
        return iter((self.d0, self.d1, self.d2))

    def to_dict(self) -> dict:
        return {"d0": self.d0, "d1": self.d1, "d2": self.d2, "residual": self.residual,
                "tail_ratio": self.tail_ratio, "flagged": self.flagged,
                "window": list(self.window)}


@dataclass(frozen=True, eq=False)
class RadialProfile:
    m: int
    r: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    ddpsi: np.ndarray
    d0: float
    d1: float
    d2: float
    fit_residual: float
    volume_norm: float
    s_residual: float
    min_eigenvalue: float
    fit: AsymptoticFit | None = field(default=None, repr=False)
    solution: BurnsSimancaSolution | None = field(default=None, repr=False)

    def header(self) -> dict:
        return {"m": self.m, "d0": self.d0, "d1": self.d1, "d2": self.d2,
                "residuals": {"fit": self.fit_residual, "scalar": self.s_residual},
                "volume_norm": self.volume_norm, "min_eigenvalue": self.min_eigenvalue,
                "grid": {"r_min": float(self.r[0]), "r_max": float(self.r[-1]),
                         "n": int(len(self.r))}}

    def save(self, stem) -> tuple[Path, Path]:
        """Write ``stem.csv`` (r, psi, psi', psi'') and ``stem.json`` (header)."""
        stem = Path(stem)
        csv_path, json_path = stem.with_suffix(".csv"), stem.with_suffix(".json")
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "psi", "dpsi", "ddpsi"])
            for row in zip(self.r, self.psi, self.dpsi, self.ddpsi):
                w.writerow([repr(float(v)) for v in row])
        json_path.write_text(json.dumps(self.header(), indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
        return csv_path, json_path

    @classmethod
    def load(cls, stem, resolve: bool = True) -> "RadialProfile":
        """Read a saved profile; ``resolve`` re-solves the ODE for evaluation."""
        stem = Path(stem)
        head = json.loads(stem.with_suffix(".json").read_text(encoding="utf-8"))
        with open(stem.with_suffix(".csv"), newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))[1:]
        arr = np.array(rows, dtype=float)
        sol = BurnsSimancaSolution(head["m"]) if resolve else None
        return cls(int(head["m"]), arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3],
                   head["d0"], head["d1"], head["d2"], head["residuals"]["fit"],
                   head["volume_norm"], head["residuals"]["scalar"], head["min_eigenvalue"],
                   None, sol)

    def require_solution(self) -> BurnsSimancaSolution:
        if self.solution is None:
            raise ValidationError("profile carries no ODE solution; load it with resolve=True")
        return self.solution


def solve_profile(m: int, r_max: float = 100.0, grid_spec: ProfileGrid | None = None,
                  rtol: float = ODE_RTOL) -> RadialProfile:
    """Solve the scalar-flat radial equation and sample it on a radius grid.

    The scalar curvature of every sample is recomputed with the tensor
    evaluator of :mod:`kstab.kahler_models` and its maximum is stored as
    ``s_residual``.
    """
    m = _check_dim(m)
    grid = grid_spec or ProfileGrid(r_max=r_max)
    if grid_spec is None or grid_spec.r_max != r_max:
        grid = ProfileGrid(grid.r_min, r_max, grid.n)
    sol = BurnsSimancaSolution(m, rtol)
    r = grid.radii()
    rho = r ** 2
    j = sol.jet(rho)
    f1 = 0.5 + j["d1"]
    f2 = j["d2"]
    # eigenvalues of the metric: F' (tangential) and F' + rho F'' (radial)
    min_eig = float(min(f1.min(), (f1 + rho * f2).min()))
    if min_eig <= 0:
        raise DomainError("solved profile is not positive definite", min_eigenvalue=min_eig)
    s_res = 0.0
    for k in range(len(rho)):
        jv = np.array([f1[k], f2[k], j["d3"][k], j["d4"][k]])
        s_res = max(s_res, abs(radial_scalar(jv, rho[k], m)))
    tau_e = float(sol.jet(np.array([1e-14]))["tau"][0])
    vol = (2 * pi * tau_e) ** (m - 1) / factorial(m - 1)
    psi = j["psi"]
    dpsi = 2 * r * j["d1"]
    ddpsi = 2 * j["d1"] + 4 * rho * j["d2"]
    fit = extract_asymptotics((r, psi, m)) if r_max >= 100 else None
    d0, d1, d2, res = (fit.d0, fit.d1, fit.d2, fit.residual) if fit else (np.nan,) * 4
    return RadialProfile(m, r, psi, dpsi, ddpsi, float(d0), float(d1), float(d2), float(res),
                         vol, float(s_res), min_eig, fit, sol)


TAIL_BOUND = 1e3


def extract_asymptotics(profile, window: tuple | None = None) -> AsymptoticFit:
    """Weighted least-squares fit of psi on the far field.

    ``profile`` is a :class:`RadialProfile` or a tuple (r, psi, m).  Rows are
    weighted by r^{4m-4} so that the O(r^{4-4m}) tail contributes O(1) per
    row; ``tail_ratio`` is the largest weighted residual, which must stay
    bounded for the fit to be trusted.
    """
    if isinstance(profile, RadialProfile):
        r, psi, m = profile.r, profile.psi, profile.m
    else:
        r, psi, m = profile
        r, psi = np.asarray(r, float), np.asarray(psi, float)
    m = _check_dim(m)
    r_max = float(r.max())
    lo, hi = window or (r_max / 10.0, r_max)
    sel = (r >= lo * (1 - 1e-12)) & (r <= hi * (1 + 1e-12))
    if sel.sum() < 4:
        raise ValidationError("fit window holds fewer than four samples", window=[lo, hi])
    rs, ys = r[sel], psi[sel]
    basis = np.stack([rs ** (4 - 2 * m), rs ** (2 - 2 * m), rs ** (6 - 4 * m)], axis=1)
    w = rs ** (4 * m - 4)
    a = basis * w[:, None]
    b = ys * w
    scale = np.linalg.norm(a, axis=0)
    coef, *_ = np.linalg.lstsq(a / scale, b, rcond=None)
    coef = coef / scale
    resid = b - a @ coef
    tail = float(np.max(np.abs(resid)))
    rel = float(np.linalg.norm(resid) / max(np.linalg.norm(b), 1e-300))
    return AsymptoticFit(float(coef[0]), float(coef[1]), float(coef[2]), rel, tail,
                         bool(not np.isfinite(tail) or tail > TAIL_BOUND), (float(lo), float(hi)))


# --------------------------------------------------------------------------
# cutoff and gluing
# --------------------------------------------------------------------------

def _smoothstep_poly(order: int) -> Polynomial:
    n = order
    t = Polynomial([0.0, 1.0])
    out = Polynomial([0.0])
    for k in range(n + 1):
        out = out + comb(n + k, k) * comb(2 * n + 1, n - k) * (-t) ** k
    return out * t ** (n + 1)


class Cutoff:
    """gamma(x) = 0 for x <= 1, 1 for x >= 2, a C^order polynomial in between."""

    def __init__(self, order: int = CUTOFF_ORDER):
        if order < 5:
            raise ValidationError("cutoff order must be at least 5", order=order)
        self.order = order
        self._polys = [_smoothstep_poly(order)]
        for _ in range(4):
            self._polys.append(self._polys[-1].deriv())

    def derivatives(self, x, n: int = 4) -> list:
        x = np.asarray(x, float)
        t = x - 1.0
        inside = (t > 0) & (t < 1)
        tc = np.clip(t, 0.0, 1.0)
        out = [np.where(inside, self._polys[0](tc), (t >= 1).astype(float))]
        for k in range(1, n + 1):
            out.append(np.where(inside, self._polys[k](tc), 0.0))
        return out

    def __call__(self, x):
        return self.derivatives(x, 0)[0]


def momentum_scalar(m: int, rho, f1, f2, f3, f4):
    """Scalar curvature of a radial potential from its rho-derivatives,
    through the momentum formula."""
    rho = np.asarray(rho, float)
    tau = rho * f1
    t1 = f1 + rho * f2
    t2 = 2 * f2 + rho * f3
    t3 = 3 * f3 + rho * f4
    phi = rho * t1
    phi_r = t1 + rho * t2
    phi_rr = 2 * t2 + rho * t3
    L = (m - 1) * phi / tau + phi_r / t1 - m
    L_r = (m - 1) * (phi_r / tau - phi * t1 / tau ** 2) + (phi_rr * t1 - phi_r * t2) / t1 ** 2
    return -(m - 1) * L / tau - L_r / t1


@dataclass(frozen=True, eq=False)
class GluedPotential:
    """Radial potential F = gamma1 F_base + (1 - gamma1)(rho/2 + eps^2 psi(rho/eps^2))
    with gamma1 = gamma(r / r_eps) and r_eps = eps^alpha."""

    context: object
    profile: RadialProfile
    eps: float
    scale: float
    m: int
    r_eps: float
    alpha: float
    cutoff: Cutoff
    extra: Callable | None = None  # optional radial perturbation: rho -> derivative array (5, n)

    @property
    def outer_radius(self) -> float:
        return 3.0 * self.r_eps

    @property
    def inner_rho(self) -> float:
        return INNER_CUTOFF * self.eps ** 2

    def jet(self, rho) -> np.ndarray:
        """Array (5, n) with F and its first four rho-derivatives."""
        rho = np.atleast_1d(np.asarray(rho, float))
        eps2 = self.eps ** 2
        sol = self.profile.require_solution()
        out = np.zeros((5, len(rho)))
        var = Jet.variable(rho, 4)
        x = var.sqrt() * (1.0 / self.r_eps)
        gam = x.compose(self.cutoff.derivatives(x.value, 4))
        base_mask = x.value > 1.0
        inner_mask = x.value < 2.0
        a = self.scale
        base = np.zeros((5, len(rho)))
        if np.any(base_mask):
            rb = rho[base_mask]
            base[0, base_mask] = a * np.log1p(rb / (2 * a))
            base[1:, base_mask] = fs_radial_jet(a)(rb)
        inner = np.zeros((5, len(rho)))
        if np.any(inner_mask):
            ri = rho[inner_mask]
            j = sol.jet(ri / eps2)
            inner[0, inner_mask] = ri / 2 + eps2 * j["psi"]
            inner[1, inner_mask] = 0.5 + j["d1"]
            inner[2, inner_mask] = j["d2"] / eps2
            inner[3, inner_mask] = j["d3"] / eps2 ** 2
            inner[4, inner_mask] = j["d4"] / eps2 ** 3
        fb, fi = Jet.from_derivatives(base), Jet.from_derivatives(inner)
        glued = gam * fb + (1.0 - gam) * fi
        out = glued.derivatives()
        if self.extra is not None:
            out = out + np.asarray(self.extra(rho), float)
        return out

    def potential(self, r) -> np.ndarray:
        return self.jet(np.asarray(r, float) ** 2)[0]

    def tau(self, rho) -> np.ndarray:
        rho = np.atleast_1d(np.asarray(rho, float))
        return rho * self.jet(rho)[1]

    def scalar(self, rho) -> np.ndarray:
        """Scalar curvature; inside B_{r_eps} it is the rescaled profile
        curvature evaluated from the momentum profile, which avoids the
        roundoff of high rho-derivatives near the exceptional divisor."""
        rho = np.atleast_1d(np.asarray(rho, float))
        j = self.jet(rho)
        out = momentum_scalar(self.m, rho, j[1], j[2], j[3], j[4])
        pure = (rho < self.r_eps ** 2) & (self.extra is None)
        if np.any(pure):
            eps2 = self.eps ** 2
            out[pure] = self.profile.require_solution().jet(rho[pure] / eps2)["scalar"] / eps2
        return out

    def scalar_tensor(self, rho: float) -> float:
        """Scalar curvature from the Hermitian-tensor evaluator (independent path)."""
        j = self.jet(np.array([rho]))[:, 0]
        return radial_scalar(j[1:], rho, self.m)

    def base_scalar(self) -> float:
        return self.m * (self.m + 1) / self.scale

    def check_positive(self, n: int = 2000) -> float:
        rho = np.geomspace(self.inner_rho, self.outer_radius ** 2, n)
        j = self.jet(rho)
        ev = np.minimum(j[1], j[1] + rho * j[2])
        worst = float(ev.min())
        if worst <= 0:
            raise DomainError("glued metric is not positive; eps is too large", eps=self.eps,
                              min_eigenvalue=worst)
        return worst

    def perturbed(self, amplitude: float, center: float | None = None,
                  width: float | None = None) -> "GluedPotential":
        """Add amplitude * bump(rho) with a smooth bump supported in the gluing ball."""
        c = center if center is not None else 1.5 * self.r_eps ** 2
        w = width if width is not None else 0.5 * self.r_eps ** 2
        cut = self.cutoff

        def bump(rho):
            var = Jet.variable(rho, 4)
            s = (var - c) * (1.0 / w)
            up = (s + 2.0).compose(cut.derivatives(s.value + 2.0, 4))
            down = (2.0 - s).compose(cut.derivatives(2.0 - s.value, 4))
            return (up * down * amplitude).derivatives()

        return GluedPotential(self.context, self.profile, self.eps, self.scale, self.m,
                              self.r_eps, self.alpha, self.cutoff, bump)


def gluing_exponent(m: int) -> float:
    return (2 * m - 1) / (2 * m + 1)


def glued_potential(ctx, profile: RadialProfile, cutoff_order: int = CUTOFF_ORDER,
                    check: bool = True) -> GluedPotential:
    """Glue the rescaled Burns-Simanca potential into the Fubini-Study chart at p.

    ``ctx`` needs ``model`` (a single projective factor P^m) and ``eps``.
    """
    model, eps = ctx.model, float(ctx.eps)
    if len(model.factors) != 1:
        raise ValidationError("radial gluing is implemented for a single projective factor",
                              factors=len(model.factors))
    m = model.m
    _check_dim(m)
    if profile.m != m:
        raise ValidationError("profile dimension does not match the model", profile_m=profile.m,
                              model_m=m)
    alpha = gluing_exponent(m)
    r_eps = eps ** alpha
    if not 0 < eps < r_eps:
        raise DomainError("eps must lie in (0, 1)", eps=eps)
    g = GluedPotential(ctx, profile, eps, float(model.scales[0]), m, r_eps, alpha,
                       Cutoff(cutoff_order))
    if check:
        g.check_positive()
    return g


# --------------------------------------------------------------------------
# lifted Hamiltonians
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IsotropyData:
    """h = c + tau z^* H z / rho near p for elements fixing p; ``offdiag``
    is the norm of the part moving p."""

    c: float
    H: np.ndarray
    offdiag: float

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.H)))


def isotropy_data(model, p, xi) -> IsotropyData:
    """Decompose the generator at p in a unitary frame with first vector p."""
    if len(model.factors) != 1:
        raise ValidationError("isotropy data needs a single projective factor")
    coeffs = np.asarray(getattr(xi, "coeffs", xi), float)
    blk = model.algebra.element(coeffs)[0]
    a = model.scales[0]
    n1 = blk.shape[0]
    u = unitary_frame(p.coords[0])
    ap = u.conj().T @ blk @ u
    c = a * float(np.real(ap[0, 0] - np.trace(blk) / n1))
    H = ap[1:, 1:] - np.real(ap[0, 0]) * np.eye(n1 - 1)
    return IsotropyData(c, H, float(np.linalg.norm(ap[0, 1:])))


def lift_hamiltonian(ctx, f, profile: RadialProfile, glued: GluedPotential | None = None,
                     constant: float | None = None) -> Callable:
    """Lift of a Hamiltonian to the blowup chart.

    ``f`` is a :class:`~kstab.action_algebra.MomentVector` (element
    coordinates) or a callable on chart coordinates.  For elements, the part
    fixing p becomes c + tau_eps(rho) z^* H z / rho (the Hamiltonian of the
    lifted field) and the part moving p is multiplied by gamma1.  A callable
    is lifted as f(0) + gamma1 (f - f(0)).  The returned function takes
    chart coordinates of shape (m,) or (n, m).
    """
    g = glued or glued_potential(ctx, profile)
    m = g.m

    def gamma1(rho):
        return g.cutoff(np.sqrt(rho) / g.r_eps)

    if callable(f) and not hasattr(f, "coeffs"):
        f0 = float(f(np.zeros(m, complex))) if constant is None else float(constant)

        def lifted_fn(z):
            z = np.atleast_2d(np.asarray(z, complex))
            rho = np.real(np.sum(z * z.conj(), axis=1))
            vals = np.array([float(f(zz)) for zz in z])
            out = f0 + gamma1(rho) * (vals - f0)
            return out if len(out) > 1 else float(out[0])

        return lifted_fn

    model, p = ctx.model, ctx.p
    if not hasattr(f, "coeffs") or len(f.coeffs) != model.algebra.dim:
        raise ValidationError("f must be a MomentVector of the model's algebra or a callable")
    iso = isotropy_data(model, p, f.coeffs)
    a = g.scale
    frame = unitary_frame(p.coords[0])
    blk = model.algebra.element(f.coeffs)[0]
    n1 = blk.shape[0]

    def base_h(z):
        u = z / np.sqrt(2 * a)
        Z = frame @ np.concatenate([[1.0], u])
        return a * float(np.real(np.vdot(Z, blk @ Z) / np.vdot(Z, Z) - np.trace(blk) / n1))

    def lifted(z):
        z = np.atleast_2d(np.asarray(z, complex))
        rho = np.real(np.sum(z * z.conj(), axis=1))
        safe = np.where(rho > 0, rho, 1.0)
        quad_form = np.real(np.einsum("ni,ij,nj->n", z.conj(), iso.H, z)) / safe
        quad_form = np.where(rho > 0, quad_form, iso.trace / m)
        tau_e = g.tau(np.maximum(rho, g.inner_rho * 1e-6))
        out = iso.c + tau_e * quad_form
        if iso.offdiag > 0:
            tau_b = rho * a / (2 * a + rho)
            iso_b = iso.c + tau_b * quad_form
            moving = np.array([base_h(zz) for zz in z]) - iso_b
            out = out + gamma1(rho) * moving
        return out if len(out) > 1 else float(out[0])

    return lifted


# --------------------------------------------------------------------------
# radial integrals over the gluing ball
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialDeltas:
    """Differences base minus blowup of four integrals over the gluing ball."""

    volume: float
    hamiltonian: float
    scalar: float
    hamiltonian_scalar: float
    errors: tuple

    def as_tuple(self) -> tuple:
        return (self.volume, self.hamiltonian, self.scalar, self.hamiltonian_scalar)


def _measure_terms(m: int, rho, jet):
    tau = rho * jet[1]
    dtau = jet[1] + rho * jet[2]
    dens = m * (2 * pi) ** m * tau ** (m - 1) * dtau
    return tau, dens


def _log_panels(glued: GluedPotential) -> np.ndarray:
    lo, hi = np.log(glued.inner_rho), np.log(glued.outer_radius ** 2)
    mids = [np.log(glued.eps ** 2), np.log(glued.r_eps ** 2), np.log(4 * glued.r_eps ** 2)]
    return np.array([lo] + [x for x in mids if lo < x < hi] + [hi])


def panel_integral(fvec: Callable, edges, rtol: float, atol: float) -> tuple[np.ndarray, np.ndarray]:
    """Adaptive Gauss-Kronrod integration of a vectorized, vector-valued
    function over consecutive panels.  ``fvec`` maps points (n,) to (n, k)."""
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        res = cubature(lambda x: fvec(x[:, 0]), [a], [b], rule="gk21", rtol=rtol, atol=atol,
                       max_subdivisions=20000)
        if res.status != "converged":
            raise QuadratureError("radial quadrature did not converge", panel=[float(a), float(b)],
                                  error=np.asarray(res.error).tolist())
        total = total + res.estimate
        err = err + res.error
    return np.asarray(total), np.asarray(err)


def radial_deltas(glued: GluedPotential, c: float = 0.0, trace_h: float = 0.0,
                  rtol: float = QUAD_RTOL) -> RadialDeltas:
    """Quadrature of the base-minus-glued integrands of omega^m, h omega^m,
    s omega^m and h s omega^m for h = c + tau z^*Hz/rho with tr H = trace_h.

    Integration runs in log(rho) from eps^2 * 1e-8 to (3 r_eps)^2 with
    breakpoints at eps^2, r_eps^2 and 4 r_eps^2; outside the ball the metrics
    agree.  Below the inner limit only the base metric contributes, in
    closed form.
    """
    m, a = glued.m, glued.scale
    base_jet = fs_radial_jet(a)
    s_base = glued.base_scalar()

    def integrands(s):
        rho = np.exp(s)
        jb = np.vstack([np.zeros_like(rho), base_jet(rho)])
        jg = glued.jet(rho)
        tb, db = _measure_terms(m, rho, jb)
        tg, dg = _measure_terms(m, rho, jg)
        sb = momentum_scalar(m, rho, *jb[1:])
        sg = glued.scalar(rho)
        hb = c + tb * trace_h / m
        hg = c + tg * trace_h / m
        out = np.stack([db - dg, hb * db - hg * dg, sb * db - sg * dg,
                        hb * sb * db - hg * sg * dg], axis=1)
        return out * rho[:, None]

    eps = glued.eps
    scale = eps ** (2 * m) * (1.0 + abs(c) + abs(trace_h))
    vals, errs = panel_integral(integrands, _log_panels(glued), rtol, 1e-9 * scale)
    t_in = glued.inner_rho * a / (2 * a + glued.inner_rho)
    vol_in = (2 * pi * t_in) ** m
    ham_in = c * vol_in + trace_h * (2 * pi) ** m * t_in ** (m + 1) / (m + 1)
    vals = vals + np.array([vol_in, ham_in, s_base * vol_in, s_base * ham_in])
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("radial quadrature produced non-finite values")
    return RadialDeltas(*[float(v) for v in vals], errors=tuple(float(e) for e in errs))


def lift_integral(glued: GluedPotential, c: float, trace_h: float, rtol: float = 1e-10) -> float:
    """Integral of the lifted Hamiltonian over the gluing ball for omega_eps
    (or a radial perturbation of it)."""
    m = glued.m

    def f(s):
        rho = np.exp(s)
        tau, dens = _measure_terms(m, rho, glued.jet(rho))
        return ((c + tau * trace_h / m) * dens * rho)[:, None]

    val, _ = panel_integral(f, _log_panels(glued), rtol, 0.0)
    return float(val[0])


def moment_deficit(glued: GluedPotential, coeffs, rtol: float = 1e-10) -> float:
    """Base-minus-glued integral of f(tau) omega^m over the gluing ball, where
    f(tau) = sum_k coeffs[k] tau^k is a sphere-averaged radial function."""
    m, a = glued.m, glued.scale
    coeffs = np.asarray(coeffs, float)
    base_jet = fs_radial_jet(a)

    def f(s):
        rho = np.exp(s)
        jb = np.vstack([np.zeros_like(rho), base_jet(rho)])
        tb, db = _measure_terms(m, rho, jb)
        tg, dg = _measure_terms(m, rho, glued.jet(rho))
        return ((np.polyval(coeffs[::-1], tb) * db - np.polyval(coeffs[::-1], tg) * dg) * rho)[:, None]

    scale = glued.eps ** (2 * m) * (1.0 + np.abs(coeffs).sum())
    val, _ = panel_integral(f, _log_panels(glued), rtol, 1e-11 * scale)
    t_in = glued.inner_rho * a / (2 * a + glued.inner_rho)
    k = np.arange(len(coeffs))
    inner = m * (2 * pi) ** m * np.sum(coeffs * t_in ** (m + k) / (m + k))
    return float(val[0] + inner)


# --------------------------------------------------------------------------
# curvature decay on the gluing annulus
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DecayReport:
    eps: tuple
    sup_residual: tuple
    inner_residual: tuple
    slope: float
    monotone: bool
    flagged: bool

    def to_dict(self) -> dict:
        return {"eps": list(self.eps), "sup_residual": list(self.sup_residual),
                "inner_residual": list(self.inner_residual), "slope": self.slope,
                "monotone": self.monotone, "flagged": self.flagged}


def annulus_residual(glued: GluedPotential, n: int = 400) -> float:
    """sup over r_eps <= r <= 2 r_eps of r^2 |s(omega_eps) - s(omega)|."""
    r = np.linspace(glued.r_eps, 2 * glued.r_eps, n)
    s = glued.scalar(r ** 2)
    return float(np.max(r ** 2 * np.abs(s - glued.base_scalar())))


def inner_residual(glued: GluedPotential, n: int = 60) -> float:
    """max |s| over 0.1 eps <= r <= r_eps/2 from the tensor evaluator."""
    r = np.geomspace(0.1 * glued.eps, 0.5 * glued.r_eps, n)
    return float(max(abs(glued.scalar_tensor(float(rr * rr))) for rr in r))


def curvature_decay(contexts, profile: RadialProfile) -> DecayReport:
    """Fit log sup-residual against log eps over a family of contexts.

    The residual is weighted by r^2, the natural scale-invariant size of a
    curvature error on an annulus of radius r.
    """
    ctxs = sorted(contexts, key=lambda c: c.eps)
    if len(ctxs) < 2:
        raise ValidationError("need at least two eps values")
    eps = np.array([c.eps for c in ctxs], float)
    if eps.max() / eps.min() < 10 * (1 - 1e-9) and len(ctxs) < 3:
        raise ValidationError("eps values should span at least a decade or three points")
    sups, inners = [], []
    for ctx in ctxs:
        g = glued_potential(ctx, profile)
        sups.append(annulus_residual(g))
        inners.append(inner_residual(g))
    sups = np.array(sups)
    slope = float(np.polyfit(np.log(eps), np.log(sups), 1)[0])
    monotone = bool(np.all(np.diff(sups) > 0))
    return DecayReport(tuple(eps.tolist()), tuple(sups.tolist()), tuple(inners),
                       slope, monotone, not monotone)
