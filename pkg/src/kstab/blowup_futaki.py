"""Futaki invariants of one-point blowups and the stability verdict.

Conventions: Hamiltonians are zero-mean, integrals use omega^m without the
1/m! factor, and Laplacians are complex (half the Riemannian ones).  The
blowup at p with exceptional class of size eps is described entirely by the
local data at p: h_v(p), Delta h_v(p) and, for inner products, the
isotropy matrices H_v.

The one free normalization is the factor ``kappa`` multiplying the Laplacian
terms in the integral identities.  It is fixed by :func:`calibrate_convention`
against radial quadrature of the glued metric; the two candidates are the
value forced by the chosen Kahler class normalization (1/(2 pi)) and the
bare value 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, pi
from typing import Sequence

import numpy as np

from . import burns_simanca as bs
from .action_algebra import MomentVector, project
from .errors import ConventionError, DimensionError, DomainError, ValidationError
from .kahler_models import (BumpedProjectiveModel, ModelSpec, OrbitPoint, hamiltonian_of,
                            infinitesimal_action, laplacian_of, laplacian_moment, moment_value,
                            perturbed_moment, projective_model,
                            unitary_frame)
from . import stability_engine as se

FIXED_TOL = 1e-9
ROUNDOFF_TOL = 1e-12     # point values below this (relative to |xi|) count as exact zeros
CALIBRATION_TOL = 1e-3
DEFAULT_SWEEP = (0.02, 0.05, 0.1)
VERDICTS = ("YES", "NO", "undetermined")


# --------------------------------------------------------------------------
# the 2 pi convention
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Convention:
    """Normalization of the Laplacian terms in the blowup integral identities."""

    name: str
    kappa: float
    calibrated: bool
    evidence: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {"name": self.name, "kappa": self.kappa, "two_pi_factor": self.kappa * 2 * pi,
                "calibrated": self.calibrated, "evidence": self.evidence}


AS_PRINTED = Convention("as_printed", 1.0, False)
CANDIDATES = {"two_pi": 1.0 / (2 * pi), "as_printed": 1.0}


class _Ctx:
    def __init__(self, model, p, eps):
        self.model, self.p, self.eps = model, p, eps


@lru_cache(maxsize=None)
def calibrate_convention(m: int, eps: float = 0.1, c: float = 0.7, trace_h: float = 1.3) -> Convention:
    """Choose kappa by radial quadrature on the glued metric of Bl P^m.

    Compares the Laplacian parts of the Hamiltonian and Hamiltonian-times-
    scalar deficits with both candidate values and keeps the one that fits,
    provided it also fits to within ``CALIBRATION_TOL``.
    """
    if m < 3:
        raise DimensionError("blowup expansions need complex dimension m > 2", m=m)
    model = projective_model([m], [1.0], point=[[1.0] + [0.0] * m])
    profile = bs.solve_profile(m)
    glued = bs.glued_potential(_Ctx(model, model.point(), eps), profile)
    d = bs.radial_deltas(glued, c=c, trace_h=trace_h)
    lap2 = d.hamiltonian - c * eps ** (2 * m)
    lap4 = d.hamiltonian_scalar - 2 * pi * m * (m - 1) * eps ** (2 * m - 2) * c
    errors = {}
    for name, kappa in CANDIDATES.items():
        p2 = kappa * trace_h * eps ** (2 * m + 2) / (m + 1)
        p4 = kappa * 2 * pi * (m - 2) * eps ** (2 * m) * trace_h
        errors[name] = max(abs(lap2 / p2 - 1), abs(lap4 / p4 - 1))
    best = min(errors, key=errors.get)
    evidence = {"m": m, "eps": eps, "relative_errors": errors,
                "volume_error": abs(d.volume / eps ** (2 * m) - 1),
                "scalar_error": abs(d.scalar / (2 * pi * m * (m - 1) * eps ** (2 * m - 2)) - 1),
                "c1": gluing_constants(m, 1.0)[0],
                "c1_alternative": 4 * pi ** m / factorial(m - 3)}
    if errors[best] > CALIBRATION_TOL:
        raise ConventionError("no candidate normalization matches the radial quadrature",
                              **evidence)
    return Convention(best, CANDIDATES[best], True, evidence)


# --------------------------------------------------------------------------
# blowup context
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlowupContext:
    model: ModelSpec
    p: OrbitPoint
    eps: float
    convention: Convention
    V: float
    V_eps: float
    sbar: float
    sbar_eps: float

    @classmethod
    def create(cls, model: ModelSpec, p: OrbitPoint | None = None, eps: float = 0.1,
               convention: Convention | None = None) -> "BlowupContext":
        m = model.m
        if m <= 2:
            raise DimensionError("blowup expansions need complex dimension m > 2 "
                                 "(the divisor term dominates only for m > 2)", m=m)
        eps = float(eps)
        if not eps > 0:
            raise DomainError("eps must be positive", eps=eps)
        p = model.point() if p is None else p
        conv = calibrate_convention(m) if convention is None else convention
        V = model.volume
        V_eps = V - eps ** (2 * m)
        if not V_eps > 0:
            raise DomainError("eps too large: the blowup class has non-positive volume", eps=eps)
        S_eps = model.total_scalar - 2 * pi * m * (m - 1) * eps ** (2 * m - 2)
        return cls(model, p, eps, conv, V, V_eps, model.mean_scalar, S_eps / V_eps)

    @property
    def m(self) -> int:
        return self.model.m

    def at(self, q: OrbitPoint | None = None, eps: float | None = None) -> "BlowupContext":
        return BlowupContext.create(self.model, self.p if q is None else q,
                                    self.eps if eps is None else eps, self.convention)

    def to_dict(self) -> dict:
        return {"m": self.m, "eps": self.eps, "point": self.p.to_json(), "V": self.V,
                "V_eps": self.V_eps, "sbar": self.sbar, "sbar_eps": self.sbar_eps,
                "convention": self.convention.to_dict()}


def _coeffs(v) -> np.ndarray:
    return np.asarray(getattr(v, "coeffs", v), float)


def fixing_residual(model: ModelSpec, p: OrbitPoint, v) -> float:
    return float(np.linalg.norm(infinitesimal_action(model, p) @ _coeffs(v)))


def _require_fixed(ctx: BlowupContext, v) -> np.ndarray:
    xi = _coeffs(v)
    if xi.shape != (ctx.model.algebra.dim,):
        raise ValidationError("element has the wrong number of coordinates",
                              expected=ctx.model.algebra.dim, got=int(xi.size))
    res = fixing_residual(ctx.model, ctx.p, xi)
    if res > FIXED_TOL * max(1.0, float(np.abs(xi).max(initial=0.0))):
        raise ValidationError("the vector field does not vanish at the blown-up point",
                              residual=res)
    return xi


def point_values(ctx: BlowupContext, xi) -> tuple[float, float]:
    """(h_xi(p), Delta h_xi(p)), with roundoff-level values set to exactly zero
    so that vanishing data gives an exactly vanishing expansion."""
    xi = _coeffs(xi)
    h = hamiltonian_of(ctx.model, xi, ctx.p)
    lap = laplacian_of(ctx.model, xi, ctx.p)
    size = max(ctx.model.scales) * float(np.abs(xi).sum())
    tol = ROUNDOFF_TOL * max(size, 1.0)
    return (0.0 if abs(h) <= tol else h), (0.0 if abs(lap) <= tol else lap)


# --------------------------------------------------------------------------
# Futaki invariants on M
# --------------------------------------------------------------------------

def futaki_base(model, v) -> float:
    """Futaki invariant int h_v (sbar - s) omega^m of the base metric.

    Product Fubini-Study models are cscK, so the integrand vanishes
    identically.  For :class:`BumpedProjectiveModel` the sphere-averaged
    integrand is integrated in the momentum variable.
    """
    xi = _coeffs(v)
    if isinstance(model, BumpedProjectiveModel):
        c, lam = model.generator_data(xi)
        m, sbar = model.m, model.mean_scalar
        return model.integrate_tau(lambda t: (c + lam * t / m) * (sbar - model.scalar(t)))
    if xi.shape != (model.algebra.dim,):
        raise ValidationError("element has the wrong number of coordinates")
    return 0.0


def scalar_pairings(model) -> np.ndarray:
    """Vector of int s h_k omega^m over the generators."""
    if isinstance(model, BumpedProjectiveModel):
        m = model.m
        out = []
        for k in range(model.algebra.dim):
            c, lam = model.generator_data(np.eye(model.algebra.dim)[k])
            out.append(model.integrate_tau(lambda t: (c + lam * t / m) * model.scalar(t)))
        return np.array(out)
    return np.zeros(model.algebra.dim)


def extremal_field(model, extra: MomentVector | None = None) -> MomentVector:
    """L2 projection of the scalar curvature (plus the Hamiltonian of ``extra``)
    onto the span of the generator Hamiltonians."""
    alg = model.algebra
    pair = scalar_pairings(model)
    if extra is not None:
        pair = pair + alg.gram @ _coeffs(extra)
    return MomentVector.from_pairings(alg, pair)


def modified_futaki(model, v, v_ext) -> float:
    """int h_v (h_{v_ext} - s) omega^m.

    Since h_v has zero mean this is <v, v_ext> plus the ordinary Futaki
    invariant.
    """
    alg = model.algebra
    return float(alg.inner(_coeffs(v), _coeffs(v_ext))) + futaki_base(model, v)


# --------------------------------------------------------------------------
# blowup expansions
# --------------------------------------------------------------------------

def blowup_integral_deltas(ctx: BlowupContext, v) -> tuple:
    """Base-minus-blowup differences of int omega^m, int h omega^m,
    int s omega^m and int h s omega^m."""
    xi = _require_fixed(ctx, v)
    m, e, k = ctx.m, ctx.eps, ctx.convention.kappa
    h, lap = point_values(ctx, xi)
    a = 2 * pi * m * (m - 1) * e ** (2 * m - 2)
    return (e ** (2 * m),
            e ** (2 * m) * h + k * e ** (2 * m + 2) * lap / (m + 1),
            a,
            a * h + k * 2 * pi * (m - 2) * e ** (2 * m) * lap)


@dataclass(frozen=True, eq=False)
class FutakiExpansion:
    fut_base: float
    A_eps: float
    B_eps: float
    fut_blowup: float
    h_p: float
    lap_p: float
    truncation: float
    order_terms: dict

    def to_dict(self) -> dict:
        return {"fut_base": self.fut_base, "A_eps": self.A_eps, "B_eps": self.B_eps,
                "fut_blowup": self.fut_blowup, "h_p": self.h_p, "lap_h_p": self.lap_p,
                "truncation": self.truncation, "order_terms": self.order_terms}


def expansion_coefficients(ctx: BlowupContext) -> tuple[float, float]:
    m, e, k = ctx.m, ctx.eps, ctx.convention.kappa
    A = 2 * pi * m * (m - 1) * e ** (2 * m - 2) - e ** (2 * m) * ctx.sbar_eps
    B = k * (2 * pi * (m - 2) * e ** (2 * m) - e ** (2 * m + 2) * ctx.sbar_eps / (m + 1))
    return A, B


def futaki_blowup(ctx: BlowupContext, v, fut_base: float | None = None) -> FutakiExpansion:
    """Futaki invariant of the lift of v to the blowup, exact in eps.

    Fut_eps = Fut + A_eps h_v(p) + B_eps Delta h_v(p).
    """
    xi = _require_fixed(ctx, v)
    m, e, k = ctx.m, ctx.eps, ctx.convention.kappa
    fb = futaki_base(ctx.model, xi) if fut_base is None else float(fut_base)
    h, lap = point_values(ctx, xi)
    A, B = expansion_coefficients(ctx)
    lead = 2 * pi * m * (m - 1) * h
    nxt = k * 2 * pi * (m - 2) * lap - ctx.sbar * h
    trunc = lead * e ** (2 * m - 2) + nxt * e ** (2 * m)
    return FutakiExpansion(fb, A, B, fb + A * h + B * lap, h, lap, trunc,
                           {f"eps^{2 * m - 2}": lead, f"eps^{2 * m}": nxt})


def localization_integral(m: int, eps: float, c_v: float, H_v, c_w: float, H_w) -> float:
    """Exact base-minus-blowup integral of h_v h_w omega^m over the ball.

    Both Hamiltonians are c + tau z^*Hz/rho near p; the blowup removes the
    momentum interval [0, eps^2/(2 pi)].
    """
    Hv, Hw = np.asarray(H_v, complex), np.asarray(H_w, complex)
    tv, tw = float(np.real(np.trace(Hv))), float(np.real(np.trace(Hw)))
    quad = tv * tw + float(np.real(np.trace(Hv @ Hw)))
    return (c_v * c_w * eps ** (2 * m)
            + (c_v * tw + c_w * tv) * eps ** (2 * m + 2) / (2 * pi * (m + 1))
            + quad * eps ** (2 * m + 4) / ((2 * pi) ** 2 * (m + 1) * (m + 2)))


def _isotropy(ctx: BlowupContext, xi) -> tuple[float, np.ndarray]:
    """c = h_xi(p) and the isotropy matrix H with h = c + z^*Hz/2 + O(|z|^4)
    in flat normal coordinates at p (block diagonal over the factors)."""
    blocks, c = [], 0.0
    for blk, z, f in zip(ctx.model.algebra.element(xi), ctx.p.coords, ctx.model.factors):
        u = unitary_frame(z)
        ap = u.conj().T @ blk @ u
        c += f.scale * float(np.real(ap[0, 0] - np.trace(blk) / blk.shape[0]))
        blocks.append(ap[1:, 1:] - np.real(ap[0, 0]) * np.eye(f.dim))
    n = sum(b.shape[0] for b in blocks)
    H, o = np.zeros((n, n), complex), 0
    for b in blocks:
        H[o:o + b.shape[0], o:o + b.shape[0]] = b
        o += b.shape[0]
    return c, H


def inner_product_blowup(ctx: BlowupContext, v, w, method: str = "localization",
                         profile: bs.RadialProfile | None = None) -> float:
    """Futaki-Mabuchi inner product of the lifted fields on the blowup.

    <v^, w^> = <v, w> - I_ball - D_v D_w / V_eps, where I_ball is the
    base-minus-blowup integral of h_v h_w over the gluing ball and D_v the
    same for h_v.  ``method="localization"`` uses the exact momentum-interval
    formula; ``method="radial"`` integrates the glued metric numerically
    (single projective factor only).
    """
    xv, xw = _require_fixed(ctx, v), _require_fixed(ctx, w)
    m, e = ctx.m, ctx.eps
    cv, Hv = _isotropy(ctx, xv)
    cw, Hw = _isotropy(ctx, xw)
    Dv = blowup_integral_deltas(ctx, xv)[1]
    Dw = blowup_integral_deltas(ctx, xw)[1]
    if method == "localization":
        ball = localization_integral(m, e, cv, Hv, cw, Hw)
    elif method == "radial":
        prof = profile or bs.solve_profile(m)
        glued = bs.glued_potential(ctx, prof)
        tv, tw = float(np.real(np.trace(Hv))), float(np.real(np.trace(Hw)))
        quad = tv * tw + float(np.real(np.trace(Hv @ Hw)))
        ball = bs.moment_deficit(glued, [cv * cw, (cv * tw + cw * tv) / m, quad / (m * (m + 1))])
        Dv = bs.moment_deficit(glued, [cv, float(np.real(np.trace(Hv))) / m])
        Dw = bs.moment_deficit(glued, [cw, float(np.real(np.trace(Hw))) / m])
    else:
        raise ValidationError(f"unknown inner product method {method!r}")
    alg = ctx.model.algebra
    base = float(alg.inner(xv, xw))
    size = np.sqrt(abs(float(alg.inner(xv, xv)) * float(alg.inner(xw, xw))))
    if abs(base) <= ROUNDOFF_TOL * size:
        base = 0.0  # orthogonal up to roundoff: keep the eps-corrections visible
    return base - ball - Dv * Dw / ctx.V_eps


# --------------------------------------------------------------------------
# gluing obstruction
# --------------------------------------------------------------------------

def gluing_constants(m: int, d1: float) -> tuple[float, float]:
    """(c1, c2) of the obstruction expansion under the calibrated convention."""
    if m < 3:
        raise DimensionError("the obstruction expansion needs m > 2", m=m)
    c1 = 2 * pi / factorial(m - 2)
    c2 = d1 * 2 * pi ** m / factorial(m - 2)
    return c1, c2


@dataclass(frozen=True, eq=False)
class ObstructionExpansion:
    constant: float
    mu_coeff: float
    lap_coeff: float
    predicted_f: MomentVector
    c1: float
    c2: float

    def to_dict(self) -> dict:
        return {"constant": self.constant, "mu_coeff": self.mu_coeff,
                "lap_coeff": self.lap_coeff, "predicted_f": self.predicted_f.coeffs.tolist(),
                "c1": self.c1, "c2": self.c2}


def gluing_obstruction(ctx: BlowupContext, d1: float) -> ObstructionExpansion:
    """Leading terms of the obstruction f on the blowup, as an element of the
    algebra (the constant part s + C is reported separately)."""
    if not ctx.convention.calibrated:
        raise ConventionError("the 2 pi convention is not calibrated; build the context with "
                              "convention=calibrate_convention(m) first")
    if not d1 > 0:
        raise ValidationError("d1 must be positive", d1=d1)
    m, e = ctx.m, ctx.eps
    c1, c2 = gluing_constants(m, d1)
    s_p = ctx.sbar
    mu_coeff = -e ** (2 * m - 2) * (c1 - e ** 2 * s_p / factorial(m))
    lap_coeff = -e ** (2 * m) * c2
    f = moment_value(ctx.model, ctx.p) * mu_coeff + laplacian_moment(ctx.model, ctx.p) * lap_coeff
    return ObstructionExpansion(ctx.sbar, mu_coeff, lap_coeff, f, c1, c2)


# --------------------------------------------------------------------------
# destabilizers and the verdict
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Certificate:
    case: str
    xi: np.ndarray
    q: OrbitPoint
    h_q: float
    lap_q: float
    futaki: float
    order: int
    c0: float
    source: str

    def to_dict(self) -> dict:
        return {"case": self.case, "xi": self.xi.tolist(), "q": self.q.to_json(),
                "h_q": self.h_q, "lap_h_q": self.lap_q, "futaki": self.futaki,
                "order": self.order, "c0": self.c0, "source": self.source}


@dataclass(frozen=True, eq=False)
class DestabilizerReport:
    certificates: tuple
    sampled: int
    min_weight: float
    heuristic: bool

    @property
    def found(self) -> bool:
        return bool(self.certificates)

    def to_dict(self) -> dict:
        return {"found": self.found, "certificates": [c.to_dict() for c in self.certificates],
                "sampled": self.sampled, "min_weight": self.min_weight,
                "heuristic": self.heuristic}


def _certificate(ctx: BlowupContext, case: str, xi, q: OrbitPoint, source: str,
                 sweep: Sequence[float]) -> Certificate:
    m = ctx.m
    order = 2 * m - 2 if case in ("negative_weight", "torus_moment") else 2 * m
    qctx = ctx.at(q)
    fut = futaki_blowup(qctx, xi).fut_blowup
    e_min = min(sweep) if sweep else ctx.eps
    f_min = futaki_blowup(ctx.at(q, e_min), xi).fut_blowup
    return Certificate(case, np.asarray(xi, float), q, hamiltonian_of(ctx.model, xi, q),
                       laplacian_of(ctx.model, xi, q), fut, order, -f_min / e_min ** order,
                       source)


def _torus_certificate(ctx: BlowupContext, torus: np.ndarray, delta: float,
                       sweep: Sequence[float]) -> Certificate | None:
    """Elements of the stabilizer torus pairing non-trivially with mu or Delta mu."""
    alg = ctx.model.algebra
    if torus.shape[1] == 0:
        return None
    mu = moment_value(ctx.model, ctx.p)
    nu = laplacian_moment(ctx.model, ctx.p)
    for vec, case in ((project(mu, torus, alg), "torus_moment"),
                      (project(nu, torus, alg), "torus_laplacian")):
        nrm = vec.norm(alg)
        if nrm > se.WEIGHT_TOL:
            xi = -vec.coeffs / nrm
            cert = _certificate(ctx, case, xi, ctx.p, "stabilizer torus", sweep)
            if cert.futaki < 0:
                return cert
    return None


def destabilizer_search(ctx: BlowupContext, torus: np.ndarray | None = None,
                        n_directions: int = 200, seed: int = 0, delta: float = se.DESCENT_PROBE,
                        sweep: Sequence[float] = DEFAULT_SWEEP) -> DestabilizerReport:
    """Search for a lifted field with negative Futaki invariant on Bl_q M.

    Case "negative_weight": xi in the T-perp algebra with h_xi(q) < 0 at the
    flow limit q (order eps^{2m-2}).  Case "null_weight": h_xi(q) = 0 and
    Delta h_xi(q) < 0 (order eps^{2m}).  Elements of the stabilizer torus with
    a non-zero pairing give the "torus_moment" and "torus_laplacian" cases at
    q = p.  An empty result carries the size of the sampled record.
    """
    model, p = ctx.model, ctx.p
    red = se.reduction(model, p, torus, seed)
    certs = []
    tcert = _torus_certificate(ctx, red.torus, delta, sweep)
    if tcert is not None:
        certs.append(tcert)
    sampled, min_w = 0, float("inf")
    if red.t_perp.shape[1]:
        zero = se.find_orbit_zero(model, p, 0.0, red.t_perp, seed)
        if not zero.found:
            cands = se.destabilizing_directions(model, p, red.t_perp, delta, n_directions, seed)
            sampled = len(cands)
            min_w = min(c["w_mu"] for c in cands)
            neg = [c for c in cands if c["w_mu"] < -se.WEIGHT_TOL]
            null = [c for c in cands if abs(c["w_mu"]) <= se.WEIGHT_TOL
                    and c["w_nu"] < -se.WEIGHT_TOL]
            for pool, case, key in ((neg, "negative_weight", "w_mu"),
                                    (null, "null_weight", "w_nu")):
                if pool:
                    best = min(pool, key=lambda c: c[key])
                    certs.append(_certificate(ctx, case, best["xi"], best["q"], best["source"],
                                              sweep))
                    break
    return DestabilizerReport(tuple(certs), sampled, min_w, True)


@dataclass(frozen=True, eq=False)
class VerdictReport:
    verdict: str
    context: BlowupContext
    alldelta: se.AllDeltaReport
    full_residuals: tuple
    destabilizers: DestabilizerReport | None
    expansions: dict
    sweeps: list
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "criteria": {
                "orbit_zero": {"deltas": list(self.alldelta.deltas),
                               "relative_solvable": list(self.alldelta.solvable),
                               "full_residuals": list(self.full_residuals),
                               "constant": self.alldelta.constant,
                               "weight_condition": self.alldelta.condition2,
                               "consistent": self.alldelta.consistent},
                "certificates": [] if self.destabilizers is None
                else [c.to_dict() for c in self.destabilizers.certificates],
                "test_configurations": "implied by the orbit-zero criterion",
                "extremal_metric": "implied by the orbit-zero criterion",
            },
            "expansions": self.expansions,
            "sweeps": self.sweeps,
            "context": self.context.to_dict(),
            "diagnostics": self.diagnostics,
        }


def verdict(ctx: BlowupContext, delta_grid: Sequence[float] = (0.01, 0.02, 0.05, 0.1),
            torus: np.ndarray | None = None, n_directions: int = 200, seed: int = 0,
            sweep: Sequence[float] = DEFAULT_SWEEP) -> VerdictReport:
    """Predict whether the blowup at p carries a cscK metric in the class
    pi^*[omega] - eps^2 [E] for small eps.

    The prediction is YES exactly when, for every delta on the grid, the
    orbit of p contains a full zero of mu + delta Delta mu.  Relative zeros
    come from the stability engine; the torus part is constant on the
    relevant orbit and checked at the zero found.
    """
    model, p = ctx.model, ctx.p
    rep = se.alldelta_check(model, p, delta_grid, torus=torus, n_directions=n_directions,
                            seed=seed)
    alg = model.algebra
    full = []
    for d, z in zip(rep.deltas, rep.zeros):
        full.append(float(perturbed_moment(model, z.q, d).norm(alg)) if z.found else None)
    solvable = tuple(r is not None and r <= se.RESIDUAL_TOL for r in full)
    diagnostics = {"relative_residuals": list(rep.residuals)}
    A, B = expansion_coefficients(ctx)
    expansions = {"A_eps": A, "B_eps": B, "sbar": ctx.sbar, "sbar_eps": ctx.sbar_eps,
                  "V": ctx.V, "V_eps": ctx.V_eps, "kappa": ctx.convention.kappa}
    destab, sweeps = None, []
    if len(set(solvable)) != 1 or not rep.consistent:
        label = "undetermined"
        diagnostics["reason"] = "orbit-zero solvability varies across the delta grid" \
            if len(set(solvable)) != 1 else "zero finder and weight condition disagree"
    elif solvable[0]:
        label = "YES"
    else:
        destab = destabilizer_search(ctx, torus, n_directions, seed, sweep=sweep)
        label = "NO"
        if not destab.found:
            diagnostics["reason"] = "no orbit zero; no explicit destabilizer found"
        else:
            c = destab.certificates[0]
            sweeps = [{"eps": float(e), "value": futaki_blowup(ctx.at(c.q, e), c.xi).fut_blowup}
                      for e in sorted(sweep)]
    return VerdictReport(label, ctx, rep, tuple(full), destab, expansions, sweeps, diagnostics)
