"""Hilbert-Mumford weights, stability classification and orbit zero-finding
for the perturbed moment maps mu + delta * Delta mu.

Sign convention: the complexified flow e^{i t xi} acts on homogeneous
coordinates by exp(-t A_xi), and weights are limits as t -> -infinity, where
the flow settles on the top eigenspace (among eigenvalues present in the
point).  Along this flow <mu, xi> increases as t decreases, so the weight is
the supremum of <mu, xi> over the flow line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .action_algebra import (ActionAlgebra, MomentVector, centralizer, orthonormalize,
                             projection_matrix, t_perp_basis)
from .errors import ValidationError
from .kahler_models import (ModelSpec, OrbitPoint, group_flow, group_flow_numeric,
                            hamiltonian_of, hamiltonian_values, infinitesimal_action,
                            laplacian_of, laplacian_values)

RESIDUAL_TOL = 1e-9
WEIGHT_TOL = 1e-7
STABILIZER_TOL = 1e-8
DEFAULT_DELTA0 = 0.1
NONDEGENERACY = 1e-6
DESCENT_PROBE = 1e-3


# --------------------------------------------------------------------------
# weights
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightReport:
    xi: MomentVector
    limit_point: OrbitPoint
    w_mu: float
    w_nu: float
    converged: bool
    t_final: float
    flow_discrepancy: float = float("nan")

    def to_dict(self) -> dict:
        return {"xi": self.xi.coeffs.tolist(), "limit_point": self.limit_point.to_json(),
                "w_mu": self.w_mu, "w_nu": self.w_nu, "converged": self.converged,
                "t_final": self.t_final, "flow_discrepancy": self.flow_discrepancy}


def unit(algebra: ActionAlgebra, xi) -> np.ndarray:
    xi = np.asarray(getattr(xi, "coeffs", xi), float)
    nrm = algebra.norm(xi)
    if not nrm > 0:
        raise ValidationError("direction must be non-zero")
    return xi / nrm


def flow_limit(model: ModelSpec, p: OrbitPoint, xi, support_tol: float = 1e-12,
               eig_tol: float = 1e-9) -> OrbitPoint:
    """Exact t -> -infinity limit of exp(-t A_xi) p by eigen-decomposition."""
    blocks = model.algebra.element(np.asarray(xi, float))
    out = []
    for blk, z in zip(blocks, p.coords):
        lam, vec = np.linalg.eigh(blk)
        c = vec.conj().T @ z
        present = np.abs(c) > support_tol
        top = np.max(lam[present])
        keep = present & (lam >= top - eig_tol)
        w = vec[:, keep] @ c[keep]
        out.append(w / np.linalg.norm(w))
    return OrbitPoint(tuple(out))


def weight(model: ModelSpec, p: OrbitPoint, xi, verify: bool = True,
           t_end: float = -40.0) -> WeightReport:
    """Weight W(p, xi) of the unit-normalized direction ``xi``.

    The eigenspace formula is authoritative; with ``verify`` the numeric flow
    to ``t_end`` is run as a cross-check and its convergence is reported.
    """
    alg = model.algebra
    u = unit(alg, xi)
    lim = flow_limit(model, p, u)
    w_mu = hamiltonian_of(model, u, lim)
    w_nu = laplacian_of(model, u, lim)
    converged, t_final, disc = True, float("-inf"), float("nan")
    if verify:
        # time is measured in units of the smallest eigenvalue gap of A_xi so
        # that the fixed horizon t_end resolves every generator equally well
        unit_gap = _min_gap(model, u)
        q, t_final, converged = group_flow_numeric(model, p, u / unit_gap, t_end=t_end)
        disc = abs(hamiltonian_of(model, u, q) - w_mu)
    return WeightReport(MomentVector(u), lim, w_mu, w_nu, bool(converged), float(t_final), disc)


def _min_gap(model: ModelSpec, xi) -> float:
    gaps = []
    for blk in model.algebra.element(np.asarray(xi, float)):
        lam = np.linalg.eigvalsh(blk)
        d = np.diff(lam)
        gaps.extend(d[d > 1e-9 * max(1.0, float(np.ptp(lam)))])
    return float(min(gaps)) if gaps else 1.0


def perturbed_weight(model: ModelSpec, p: OrbitPoint, xi, eps: float) -> float:
    rep = weight(model, p, xi, verify=False)
    return rep.w_mu + eps * rep.w_nu


def sphere_directions(algebra: ActionAlgebra, basis: np.ndarray, n: int = 200,
                      seed: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy unit directions in span(basis).

    Scrambled Halton points are pushed through the inverse normal CDF and
    normalized for the Gram metric.  Returns an array of shape (n, dim).
    """
    ob = orthonormalize(basis, algebra)
    d = ob.shape[1]
    if d == 0:
        return np.zeros((0, algebra.dim))
    if d == 1:
        return np.array([ob[:, 0], -ob[:, 0]])
    pts = qmc.Halton(d=d, scramble=True, seed=seed).random(n)
    gauss = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    gauss /= np.linalg.norm(gauss, axis=1, keepdims=True)
    return gauss @ ob.T


def sampled_weights(model: ModelSpec, p: OrbitPoint, basis: np.ndarray, n: int = 200,
                    seed: int = 0) -> list[tuple[np.ndarray, float, float]]:
    out = []
    for xi in sphere_directions(model.algebra, basis, n, seed):
        lim = flow_limit(model, p, xi)
        out.append((xi, hamiltonian_of(model, xi, lim), laplacian_of(model, xi, lim)))
    return out


# --------------------------------------------------------------------------
# stabilizers and the torus reduction
# --------------------------------------------------------------------------

def stabilizer(model: ModelSpec, p: OrbitPoint, tol: float = STABILIZER_TOL) -> np.ndarray:
    """Basis of the isotropy algebra at p from the SVD of the infinitesimal action."""
    ob = orthonormalize(np.eye(model.algebra.dim), model.algebra)
    jac = infinitesimal_action(model, p) @ ob
    _, s, vt = np.linalg.svd(jac)
    s_full = np.zeros(ob.shape[1])
    s_full[:len(s)] = s
    null = vt[s_full <= tol * max(1.0, float(s_full.max(initial=0.0)))]
    return ob @ null.T


def _intersection(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    from scipy.linalg import null_space
    ns = null_space(np.hstack([a, -b]), rcond=1e-9)
    return a @ ns[:a.shape[1]]


def maximal_torus(algebra: ActionAlgebra, sub: np.ndarray, preferred: np.ndarray | None = None,
                  seed: int = 0) -> np.ndarray:
    """A maximal abelian subalgebra of span(sub).

    The marked torus is used when its intersection with span(sub) is already
    maximal; otherwise the centralizer of a generic element is taken.
    """
    if sub.shape[1] == 0:
        return sub
    if preferred is not None and preferred.shape[1]:
        cand = _intersection(sub, preferred)
        if cand.shape[1] and algebra.is_abelian(cand):
            cent = centralizer(algebra, cand, within=sub)
            if cent.shape[1] == cand.shape[1]:
                return orthonormalize(cand, algebra)
    rng = np.random.default_rng(seed)
    generic = sub @ rng.standard_normal(sub.shape[1])
    return orthonormalize(centralizer(algebra, generic[:, None], within=sub), algebra)


@dataclass(frozen=True, eq=False)
class Reduction:
    stabilizer: np.ndarray
    torus: np.ndarray
    t_perp: np.ndarray


def reduction(model: ModelSpec, p: OrbitPoint, torus: np.ndarray | None = None,
              seed: int = 0) -> Reduction:
    """Stabilizer of p, a maximal torus T in it, and the T-perp subalgebra."""
    alg = model.algebra
    stab = stabilizer(model, p)
    pref = alg.torus_basis if torus is None else np.asarray(torus, float)
    tor = maximal_torus(alg, stab, pref if pref.shape[1] else None, seed)
    return Reduction(stab, tor, t_perp_basis(alg, tor))


# --------------------------------------------------------------------------
# zero finding on complexified orbits
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitZero:
    found: bool
    q: OrbitPoint | None
    xi: np.ndarray | None
    residual: float
    delta: float
    start: int = -1
    iterations: int = 0
    heuristic: bool = False
    best_residual: float = float("inf")

    def to_dict(self) -> dict:
        return {"found": self.found, "delta": self.delta, "residual": self.residual,
                "xi": None if self.xi is None else self.xi.tolist(),
                "q": None if self.q is None else self.q.to_json(), "start": self.start,
                "iterations": self.iterations, "heuristic": self.heuristic,
                "best_residual": self.best_residual}


class _ProjectedMap:
    """y -> coordinates of pr_S(values(q(y))) for q(y) = exp(-A_{B y}) p."""

    def __init__(self, model: ModelSpec, p: OrbitPoint, basis: np.ndarray,
                 values: Callable[[OrbitPoint], np.ndarray]):
        self.model, self.p, self.basis, self.values = model, p, basis, values
        self.sub = basis.T @ model.algebra.gram @ basis

    def point(self, y) -> OrbitPoint:
        return group_flow(self.model, self.p, self.basis @ y, 1.0)

    def __call__(self, y) -> np.ndarray:
        return np.linalg.solve(self.sub, self.basis.T @ self.values(self.point(y)))

    def norm(self, f) -> float:
        return float(np.sqrt(max(f @ self.sub @ f, 0.0)))


def _fd_jacobian(fmap: _ProjectedMap, y: np.ndarray, fd_step: float = 1e-6) -> np.ndarray:
    d = len(y)
    jac = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = fd_step
        jac[:, j] = (fmap(y + e) - fmap(y - e)) / (2 * fd_step)
    return jac


def _newton(fmap: _ProjectedMap, y0: np.ndarray, tol: float, max_iter: int,
            y_max: float, fd_step: float = 1e-6) -> tuple[np.ndarray, float, int, bool]:
    y = y0.astype(float).copy()
    f = fmap(y)
    r = fmap.norm(f)
    for it in range(1, max_iter + 1):
        if r <= tol:
            return y, r, it - 1, True
        jac = _fd_jacobian(fmap, y, fd_step)
        step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        lam = 1.0
        while lam > 1e-10:
            y_new = y + lam * step
            f_new = fmap(y_new)
            r_new = fmap.norm(f_new)
            if r_new ** 2 <= (1 - 1e-4 * lam) * r ** 2:
                break
            lam *= 0.5
        else:
            return y, r, it, False
        y, f, r = y_new, f_new, r_new
        if np.linalg.norm(y) > y_max:
            return y, r, it, False
    return y, r, max_iter, r <= tol


def _values_fn(model: ModelSpec, delta: float):
    def values(q):
        return hamiltonian_values(model, q) + delta * laplacian_values(model, q)
    return values


def find_orbit_zero(model: ModelSpec, p: OrbitPoint, delta: float,
                    subalgebra: np.ndarray | None = None, seed: int = 0, n_starts: int = 8,
                    tol: float = RESIDUAL_TOL, max_iter: int = 60,
                    y_max: float = 60.0) -> OrbitZero:
    """Damped Newton search for q = exp(i xi) p with pr_S(mu + delta Delta mu)(q) = 0.

    ``subalgebra`` (columns = coordinate vectors) fixes the working group; the
    default is the whole algebra.  Starts from the origin, then ``n_starts``
    seeded Gaussian starts.  A failed search is reported as heuristic.
    """
    if delta < 0:
        raise ValidationError("delta must be non-negative", delta=delta)
    alg = model.algebra
    basis = np.eye(alg.dim) if subalgebra is None else np.asarray(subalgebra, float)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[1] == 0:
        return OrbitZero(True, p, np.zeros(alg.dim), 0.0, delta, 0, 0, False, 0.0)
    basis = orthonormalize(basis, alg)
    fmap = _ProjectedMap(model, p, basis, _values_fn(model, delta))
    rng = np.random.default_rng(seed)
    starts = [np.zeros(basis.shape[1])] + [rng.standard_normal(basis.shape[1])
                                             for _ in range(n_starts)]
    best = float("inf")
    for idx, y0 in enumerate(starts):
        y, r, its, ok = _newton(fmap, y0, tol, max_iter, y_max)
        best = min(best, r)
        if ok and r <= tol:
            # an escaping sequence along a semistable orbit also drives the
            # residual down, but there the Jacobian degenerates
            sv = np.linalg.svd(_fd_jacobian(fmap, y), compute_uv=False)
            if sv[-1] >= NONDEGENERACY * sv[0]:
                return OrbitZero(True, fmap.point(y), basis @ y, r, delta, idx, its, False, r)
    return OrbitZero(False, None, None, float("nan"), delta, -1, 0, True, best)


def orbit_residual(model: ModelSpec, q: OrbitPoint, delta: float,
                   subalgebra: np.ndarray | None = None) -> float:
    """Independent recomputation of ||pr_S (mu + delta Delta mu)(q)||."""
    alg = model.algebra
    vals = _values_fn(model, delta)(q)
    x = np.linalg.solve(alg.gram, vals)
    if subalgebra is not None:
        x = projection_matrix(subalgebra, alg) @ x
    return alg.norm(x)


# --------------------------------------------------------------------------
# Kempf-Ness descent: used to locate destabilizing directions
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DescentResult:
    q: OrbitPoint
    limit: OrbitPoint
    beta: np.ndarray
    beta_norm: float
    iterations: int
    converged: bool


def kempf_ness_descent(model: ModelSpec, p: OrbitPoint, delta: float = 0.0,
                       subalgebra: np.ndarray | None = None, max_iter: int = 4000,
                       tol: float = 1e-13) -> DescentResult:
    """Gradient descent of ||pr_S(mu + delta Delta mu)||^2 along the orbit.

    Each step moves q <- exp(-s A_x) q with x the current projected moment
    value.  The iterates approach the minimal-norm point of the orbit
    closure; ``limit`` snaps the last iterate onto the eigenspaces of A_beta
    so that it is exactly fixed by beta.
    """
    alg = model.algebra
    basis = np.eye(alg.dim) if subalgebra is None else orthonormalize(subalgebra, alg)
    proj = projection_matrix(basis, alg) if basis.shape[1] else np.zeros((alg.dim, alg.dim))
    values = _values_fn(model, delta)

    def moment(q):
        return proj @ np.linalg.solve(alg.gram, values(q))

    q = p
    x = moment(q)
    f = alg.inner(x, x)
    step = 1.0 / max(1.0, np.sqrt(f))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        while True:
            q_new = group_flow(model, q, x, step)
            x_new = moment(q_new)
            f_new = alg.inner(x_new, x_new)
            if f_new <= f or step < 1e-14:
                break
            step *= 0.5
        if f - f_new <= tol * max(f, 1e-30) and step > 1e-14:
            q, x, f = q_new, x_new, f_new
            converged = True
            break
        q, x, f = q_new, x_new, f_new
        step = min(step * 1.5, 1e3)
    beta = x
    limit = _snap(model, q, beta)
    return DescentResult(q, limit, beta, float(np.sqrt(max(f, 0.0))), it, converged)


def _snap(model: ModelSpec, q: OrbitPoint, beta: np.ndarray) -> OrbitPoint:
    if model.algebra.norm(beta) == 0:
        return q
    blocks = model.algebra.element(beta)
    out = []
    for blk, z in zip(blocks, q.coords):
        lam, vec = np.linalg.eigh(blk)
        c = vec.conj().T @ z
        groups = []
        for j in range(len(lam)):
            if groups and abs(lam[j] - lam[groups[-1][0]]) < 1e-7 * max(1.0, abs(lam).max()):
                groups[-1].append(j)
            else:
                groups.append([j])
        weights = [np.sum(np.abs(c[g]) ** 2) for g in groups]
        g = groups[int(np.argmax(weights))]
        w = vec[:, g] @ c[g]
        out.append(w / np.linalg.norm(w))
    return OrbitPoint(tuple(out))


def destabilizing_directions(model: ModelSpec, p: OrbitPoint, basis: np.ndarray,
                             delta: float = 0.0, n: int = 200, seed: int = 0) -> list[dict]:
    """Candidate (q, xi) pairs with q fixed by xi, from sampling and descent.

    Sampled directions use q = flow limit of p; the descent contributes the
    snapped minimal-norm point with xi = -beta/|beta|.  Each record carries
    the weights of mu and of Delta mu at q.
    """
    alg = model.algebra
    out = []
    for xi, w_mu, w_nu in sampled_weights(model, p, basis, n, seed):
        out.append({"source": "sampling", "xi": xi, "q": flow_limit(model, p, xi),
                    "w_mu": w_mu, "w_nu": w_nu})
    for dl in sorted({0.0, float(delta)}):
        d = kempf_ness_descent(model, p, dl, basis)
        if d.beta_norm > WEIGHT_TOL:
            xi = -d.beta / alg.norm(d.beta)
            out.append({"source": f"descent(delta={dl:g})", "xi": xi, "q": d.limit,
                        "w_mu": hamiltonian_of(model, xi, d.limit),
                        "w_nu": laplacian_of(model, xi, d.limit),
                        "fixed_residual": _fixed_residual(model, d.limit, xi)})
    return out


def _fixed_residual(model: ModelSpec, q: OrbitPoint, xi) -> float:
    return float(np.linalg.norm(infinitesimal_action(model, q) @ np.asarray(xi, float)))


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------

CLASSES = ("stable", "semistable_strict", "relatively_stable", "unstable", "undetermined")


@dataclass(frozen=True, eq=False)
class StabilityVerdict:
    classification: str
    witness: dict | None
    delta_range: tuple
    heuristic: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"class": self.classification, "witness": _plain(self.witness),
                "delta_range": list(self.delta_range), "heuristic": self.heuristic,
                "details": _plain(self.details)}


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, OrbitPoint):
        return obj.to_json()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def classify(model: ModelSpec, p: OrbitPoint, torus: np.ndarray | None = None,
             n_directions: int = 200, seed: int = 0, delta: float = 0.0) -> StabilityVerdict:
    """Stability class of p for mu + delta Delta mu (delta = 0 by default)."""
    red = reduction(model, p, torus, seed)
    details = {"stabilizer_dim": red.stabilizer.shape[1], "torus_dim": red.torus.shape[1],
               "t_perp_dim": red.t_perp.shape[1]}
    drange = (delta, delta)
    trivial_stab = red.stabilizer.shape[1] == 0
    if red.t_perp.shape[1] == 0:
        return StabilityVerdict("relatively_stable", {"q": p, "reason": "t_perp is zero"},
                                drange, False, details)
    zero = find_orbit_zero(model, p, delta, red.t_perp, seed)
    details["orbit_zero"] = zero.to_dict()
    if zero.found:
        label = "stable" if trivial_stab else "relatively_stable"
        return StabilityVerdict(label, {"q": zero.q, "xi": zero.xi, "residual": zero.residual},
                                drange, False, details)
    # a small positive probe makes the descent find the degenerating
    # direction of strictly semistable points, whose weight is then zero
    cands = destabilizing_directions(model, p, red.t_perp, max(delta, DESCENT_PROBE),
                                     n_directions, seed)
    ws = np.array([c["w_mu"] + delta * c["w_nu"] for c in cands])
    details["min_sampled_weight"] = float(ws.min())
    i = int(np.argmin(ws))
    best = cands[i]
    witness = {"q": best["q"], "xi": best["xi"], "weight": float(ws[i]),
               "source": best["source"]}
    if ws[i] < -WEIGHT_TOL:
        return StabilityVerdict("unstable", witness, drange, False, details)
    if abs(ws[i]) <= WEIGHT_TOL:
        return StabilityVerdict("semistable_strict", witness, drange, True, details)
    return StabilityVerdict("undetermined", witness, drange, True, details)


# --------------------------------------------------------------------------
# delta-independence and continuation
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AllDeltaReport:
    deltas: tuple
    solvable: tuple
    residuals: tuple
    constant: bool
    condition2: bool
    consistent: bool
    min_weight: float
    min_null_nu: float | None
    zeros: tuple = ()

    def to_dict(self) -> dict:
        return {"deltas": list(self.deltas), "solvable": list(self.solvable),
                "residuals": list(self.residuals), "constant": self.constant,
                "condition2": self.condition2, "consistent": self.consistent,
                "min_weight": self.min_weight, "min_null_nu": self.min_null_nu,
                "zeros": [z.to_dict() for z in self.zeros]}


def alldelta_check(model: ModelSpec, p: OrbitPoint, delta_grid: Sequence[float],
                   delta0: float = DEFAULT_DELTA0, torus: np.ndarray | None = None,
                   n_directions: int = 200, seed: int = 0) -> AllDeltaReport:
    """Solve for relative orbit zeros on a delta grid and compare with the
    weight condition (W_mu >= 0 everywhere, W_nu > 0 where W_mu = 0)."""
    grid = tuple(float(d) for d in delta_grid)
    if not grid:
        raise ValidationError("delta grid is empty")
    for d in grid:
        if not 0 < d <= delta0:
            raise ValidationError(f"delta {d} lies outside (0, {delta0}]", delta=d, delta0=delta0)
    red = reduction(model, p, torus, seed)
    zeros = tuple(find_orbit_zero(model, p, d, red.t_perp, seed) for d in grid)
    solv = tuple(z.found for z in zeros)
    cands = destabilizing_directions(model, p, red.t_perp, min(grid), n_directions, seed) \
        if red.t_perp.shape[1] else []
    if cands:
        wmu = np.array([c["w_mu"] for c in cands])
        wnu = np.array([c["w_nu"] for c in cands])
        null = np.abs(wmu) <= WEIGHT_TOL
        cond2 = bool(np.all(wmu >= -WEIGHT_TOL) and np.all(wnu[null] > WEIGHT_TOL))
        min_w = float(wmu.min())
        min_nu = float(wnu[null].min()) if np.any(null) else None
    else:
        cond2, min_w, min_nu = True, float("inf"), None
    constant = len(set(solv)) == 1
    return AllDeltaReport(grid, solv, tuple(z.residual for z in zeros), constant, cond2,
                          constant and solv[0] == cond2, min_w, min_nu, zeros)


@dataclass(frozen=True, eq=False)
class ContinuationResult:
    success: bool
    q: OrbitPoint | None
    xi: np.ndarray | None
    residual: float
    s_reached: float
    steps: int

    def to_dict(self) -> dict:
        return {"success": self.success, "residual": self.residual, "s_reached": self.s_reached,
                "steps": self.steps, "q": None if self.q is None else self.q.to_json(),
                "xi": None if self.xi is None else self.xi.tolist()}


def continuation_zero(model: ModelSpec, p: OrbitPoint,
                      mu_eps_family: Callable[[OrbitPoint], MomentVector], eps: float,
                      nu: Callable[[OrbitPoint], MomentVector] | None = None,
                      subalgebra: np.ndarray | None = None, start=None, seed: int = 0,
                      tol: float = 1e-8, max_halvings: int = 20) -> ContinuationResult:
    """Track a zero of (1-s)(mu + eps nu) + s mu_eps from s = 0 to s = 1.

    ``nu`` defaults to Delta mu.  ``start`` may be an :class:`OrbitZero` for
    mu + eps nu on the same working subalgebra; otherwise one is searched.
    """
    alg = model.algebra
    basis = np.eye(alg.dim) if subalgebra is None else np.asarray(subalgebra, float)
    basis = orthonormalize(basis, alg)

    def base_values(q):
        if nu is None:
            return hamiltonian_values(model, q) + eps * laplacian_values(model, q)
        return hamiltonian_values(model, q) + eps * (alg.gram @ nu(q).coeffs)

    def target_values(q):
        return alg.gram @ np.real(mu_eps_family(q).coeffs)

    if start is None:
        if nu is None:
            start = find_orbit_zero(model, p, eps, basis, seed)
        else:
            fm = _ProjectedMap(model, p, basis, base_values)
            y, r, _, ok = _newton(fm, np.zeros(basis.shape[1]), 1e-10, 60, 60.0)
            start = OrbitZero(ok, fm.point(y), basis @ y, r, eps)
    if not start.found:
        return ContinuationResult(False, None, None, float("nan"), 0.0, 0)
    y = np.linalg.lstsq(basis, start.xi, rcond=None)[0]

    def homotopy(s):
        return _ProjectedMap(model, p, basis,
                             lambda q: (1 - s) * base_values(q) + s * target_values(q))

    s, ds, steps = 0.0, 0.25, 0
    halvings = 0
    while s < 1.0:
        s_try = min(1.0, s + ds)
        fm = homotopy(s_try)
        y_new, r, _, ok = _newton(fm, y, 1e-11, 30, 60.0)
        if ok and np.linalg.norm(y_new - y) < 10.0:
            y, s = y_new, s_try
            steps += 1
            ds = min(ds * 2, 0.5)
        else:
            ds *= 0.5
            halvings += 1
            if halvings > max_halvings:
                return ContinuationResult(False, None, None, float("nan"), s, steps)
    final = homotopy(1.0)
    resid = final.norm(final(y))
    q = final.point(y)
    return ContinuationResult(bool(resid <= tol), q, basis @ y, resid, 1.0, steps)
