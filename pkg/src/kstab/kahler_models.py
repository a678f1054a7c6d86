"""Scaled products of projective spaces with Fubini-Study metrics.

Conventions used throughout the package:

* a Kähler form is written omega = i g_{jk} dz_j ^ dz_k-bar, so the flat
  reference potential is |z|^2/2 and g = identity/2;
* the Laplacian is the complex one, Delta f = g^{jk-bar} d_j d_k-bar f, half of
  the Riemannian Laplacian;
* scalar curvature is s = -g^{jk-bar} d_j d_k-bar log det g, so that
  s omega^m = m Ric ^ omega^{m-1};
* volumes and integrals use omega^m without dividing by m!.

Factor ``i`` carries a_i * i dd-bar log(1 + |u|^2); a projective line in it
has area 2 pi a_i, the factor Laplacian acts on Hamiltonians by
-(n_i + 1)/a_i and the scalar curvature is sum_i n_i (n_i + 1)/a_i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import pi
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .action_algebra import (ActionAlgebra, MomentVector, diagonal_basis, embed,
                             hermitian_basis, product_volume)
from .errors import DomainError, SchemaError, ValidationError

# --------------------------------------------------------------------------
# models and points
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Factor:
    dim: int
    scale: float

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValidationError("factor dimension must be at least 1", dim=self.dim)
        if not float(self.scale) > 0:
            raise ValidationError("factor scale must be positive", scale=self.scale)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    factors: tuple
    algebra: ActionAlgebra
    name: str = ""
    default_point: tuple | None = None

    @classmethod
    def create(cls, factors: Sequence, generators: Sequence, torus: Sequence[int] = (),
               name: str = "", point=None) -> "ModelSpec":
        facs = tuple(f if isinstance(f, Factor) else Factor(int(f[0]), float(f[1])) for f in factors)
        alg = ActionAlgebra.build([f.dim for f in facs], [f.scale for f in facs],
                                  generators, torus)
        dp = None
        if point is not None:
            dp = tuple(tuple(complex(c) for c in v) for v in OrbitPoint.create(point, facs).coords)
        return cls(facs, alg, name, dp)

    # derived quantities
    @property
    def dims(self) -> tuple:
        return tuple(f.dim for f in self.factors)

    @property
    def scales(self) -> tuple:
        return tuple(f.scale for f in self.factors)

    @property
    def m(self) -> int:
        return int(sum(self.dims))

    @property
    def volume(self) -> float:
        return product_volume(self.dims, self.scales)

    @property
    def mean_scalar(self) -> float:
        return float(sum(n * (n + 1) / a for n, a in self.factors_tuples()))

    @property
    def total_scalar(self) -> float:
        return self.mean_scalar * self.volume

    def factors_tuples(self):
        return [(f.dim, f.scale) for f in self.factors]

    def point(self, coords=None) -> "OrbitPoint":
        if coords is None:
            if self.default_point is None:
                raise ValidationError("model has no default point; pass one explicitly")
            coords = [list(v) for v in self.default_point]
        return OrbitPoint.create(coords, self.factors)

    # serialization
    def to_dict(self) -> dict:
        out = {"factors": [{"dim": f.dim, "scale": f.scale} for f in self.factors]}
        out.update(self.algebra.to_json())
        if self.name:
            out["name"] = self.name
        if self.default_point is not None:
            out["point"] = [[[c.real, c.imag] for c in v] for v in self.default_point]
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelSpec":
        try:
            factors = [Factor(int(f["dim"]), float(f["scale"])) for f in doc["factors"]]
            gens = [[decode_matrix(b) for b in g] for g in doc["generators"]]
            torus = [int(i) for i in doc.get("torus", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"model document does not match the schema: {exc}") from exc
        return cls.create(factors, gens, torus, name=str(doc.get("name", "")),
                          point=doc.get("point"))

    @classmethod
    def load(cls, path) -> "ModelSpec":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(doc)


def decode_matrix(rows) -> np.ndarray:
    """Nested rows of [re, im] pairs (plain numbers are accepted as real)."""
    out = []
    for row in rows:
        vals = []
        for entry in row:
            if isinstance(entry, (list, tuple)):
                if len(entry) != 2:
                    raise SchemaError("complex entries must be [re, im] pairs")
                vals.append(complex(float(entry[0]), float(entry[1])))
            else:
                vals.append(complex(float(entry)))
        out.append(vals)
    arr = np.array(out, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise SchemaError("generator blocks must be square matrices")
    return arr


def decode_vector(entries) -> np.ndarray:
    vals = []
    for entry in entries:
        if isinstance(entry, (list, tuple)):
            vals.append(complex(float(entry[0]), float(entry[1])))
        else:
            vals.append(complex(entry))
    return np.array(vals, dtype=complex)


@dataclass(frozen=True, eq=False)
class OrbitPoint:
    coords: tuple

    @classmethod
    def create(cls, coords, factors) -> "OrbitPoint":
        dims = [f.dim if isinstance(f, Factor) else int(f) for f in factors]
        if len(coords) != len(dims):
            raise ValidationError("point needs one coordinate vector per factor")
        vecs = []
        for i, (v, n) in enumerate(zip(coords, dims)):
            arr = decode_vector(v) if not isinstance(v, np.ndarray) else v.astype(complex)
            if arr.shape != (n + 1,):
                raise ValidationError(f"factor {i} coordinates must have length {n + 1}", factor=i)
            nrm = np.linalg.norm(arr)
            if not nrm > 0:
                raise ValidationError(f"factor {i} coordinates are all zero", factor=i)
            vecs.append(arr / nrm)
        return cls(tuple(vecs))

    def is_close(self, other: "OrbitPoint", tol: float = 1e-9) -> bool:
        return all(abs(1 - abs(np.vdot(a, b))) <= tol for a, b in zip(self.coords, other.coords))

    def distance(self, other: "OrbitPoint") -> float:
        """Largest Fubini-Study chordal distance over the factors."""
        return float(max(np.sqrt(max(0.0, 1 - abs(np.vdot(a, b)) ** 2))
                         for a, b in zip(self.coords, other.coords)))

    def to_json(self) -> list:
        return [[[float(c.real), float(c.imag)] for c in v] for v in self.coords]


# --------------------------------------------------------------------------
# Hamiltonians, moment map and Laplacian
# --------------------------------------------------------------------------

def _factor_hamiltonian(block: np.ndarray, z: np.ndarray, scale: float) -> float:
    n1 = block.shape[0]
    q = np.real(np.vdot(z, block @ z)) / np.real(np.vdot(z, z))
    return scale * (q - np.real(np.trace(block)) / n1)


def factor_hamiltonians(model: ModelSpec, p: OrbitPoint) -> np.ndarray:
    """Array H[k, i] = Hamiltonian of generator k restricted to factor i at p."""
    gens = model.algebra.generators
    out = np.zeros((len(gens), len(model.factors)))
    for k, g in enumerate(gens):
        for i, (blk, z, f) in enumerate(zip(g, p.coords, model.factors)):
            out[k, i] = _factor_hamiltonian(blk, z, f.scale)
    return out


def hamiltonian_values(model: ModelSpec, p: OrbitPoint) -> np.ndarray:
    """Raw values h_k(p) of the zero-mean generator Hamiltonians."""
    return factor_hamiltonians(model, p).sum(axis=1)


def laplacian_values(model: ModelSpec, p: OrbitPoint) -> np.ndarray:
    """(Delta h_k)(p); Fubini-Study Hamiltonians are eigenfunctions on each factor."""
    eig = np.array([-(f.dim + 1) / f.scale for f in model.factors])
    return factor_hamiltonians(model, p) @ eig


def moment_value(model: ModelSpec, p: OrbitPoint) -> MomentVector:
    return MomentVector.from_pairings(model.algebra, hamiltonian_values(model, p))


def laplacian_moment(model: ModelSpec, p: OrbitPoint) -> MomentVector:
    return MomentVector.from_pairings(model.algebra, laplacian_values(model, p))


def perturbed_moment(model: ModelSpec, p: OrbitPoint, delta: float) -> MomentVector:
    if delta < 0:
        raise ValidationError("the perturbation parameter must be non-negative", delta=delta)
    return moment_value(model, p) + delta * laplacian_moment(model, p)


def hamiltonian_of(model: ModelSpec, xi, p: OrbitPoint) -> float:
    """h_xi(p) for an element with coordinates ``xi``."""
    return float(np.dot(np.asarray(xi, float), hamiltonian_values(model, p)))


def laplacian_of(model: ModelSpec, xi, p: OrbitPoint) -> float:
    return float(np.dot(np.asarray(xi, float), laplacian_values(model, p)))


def scalar_curvature(model: ModelSpec) -> float:
    """Closed-form (constant) scalar curvature of the product metric."""
    return model.mean_scalar


# --------------------------------------------------------------------------
# complexified group action
# --------------------------------------------------------------------------

def group_flow(model: ModelSpec, p: OrbitPoint, xi, t: float) -> OrbitPoint:
    """exp(-t A_xi) applied per factor; the exponent is shifted before
    exponentiating so no intermediate value can overflow."""
    blocks = model.algebra.element(np.asarray(xi, float))
    out = []
    for blk, z in zip(blocks, p.coords):
        lam, vec = np.linalg.eigh(blk)
        c = vec.conj().T @ z
        expo = -t * lam
        support = np.abs(c) > 0
        shift = np.max(expo[support]) if np.any(support) else 0.0
        w = vec @ (np.exp(expo - shift) * c)
        out.append(w / np.linalg.norm(w))
    return OrbitPoint(tuple(out))


def group_flow_numeric(model: ModelSpec, p: OrbitPoint, xi, t_end: float = -40.0,
                       dt: float = 0.05, tol: float = 1e-12) -> tuple[OrbitPoint, float, bool]:
    """Step the flow with small matrix exponentials, renormalizing each step.

    Returns (point, t reached, converged) where convergence means the point
    stopped moving (chordal step below ``tol``) before ``t_end``.
    """
    blocks = model.algebra.element(np.asarray(xi, float))
    sign = -1.0 if t_end < 0 else 1.0
    steps = []
    for blk in blocks:
        lam, vec = np.linalg.eigh(blk)
        steps.append(vec @ np.diag(np.exp(-sign * dt * (lam - (lam.max() if sign < 0 else lam.min())))) @ vec.conj().T)
    z = [c.copy() for c in p.coords]
    t = 0.0
    converged = False
    while abs(t) < abs(t_end) - 1e-12:
        new = []
        for s, v in zip(steps, z):
            w = s @ v
            new.append(w / np.linalg.norm(w))
        move = max(np.sqrt(max(0.0, 1 - abs(np.vdot(a, b)) ** 2)) for a, b in zip(new, z))
        z = new
        t += sign * dt
        if move < tol:
            converged = True
            break
    return OrbitPoint(tuple(z)), t, converged


def infinitesimal_action(model: ModelSpec, p: OrbitPoint) -> np.ndarray:
    """Real matrix whose column k is the tangent vector of generator k at p."""
    cols = []
    for g in model.algebra.generators:
        parts = []
        for blk, z in zip(g, p.coords):
            v = blk @ z
            v = v - np.vdot(z, v) * z
            parts.extend([v.real, v.imag])
        cols.append(np.concatenate(parts))
    return np.stack(cols, axis=1)


def group_element(model: ModelSpec, xi, t: float = 1.0, imaginary: bool = False) -> tuple:
    """Per-factor matrices exp(-t A_xi) (or exp(i t A_xi) for the compact part)."""
    blocks = model.algebra.element(np.asarray(xi, float))
    out = []
    for blk in blocks:
        lam, vec = np.linalg.eigh(blk)
        ph = np.exp(1j * t * lam) if imaginary else np.exp(-t * lam)
        out.append(vec @ np.diag(ph) @ vec.conj().T)
    return tuple(out)


def act(g: Sequence, p: OrbitPoint) -> OrbitPoint:
    out = []
    for blk, z in zip(g, p.coords):
        w = np.asarray(blk) @ z
        out.append(w / np.linalg.norm(w))
    return OrbitPoint(tuple(out))


# --------------------------------------------------------------------------
# charts and numeric curvature
# --------------------------------------------------------------------------

def unitary_frame(z: np.ndarray) -> np.ndarray:
    """Unitary matrix whose first column is the unit vector z."""
    n1 = len(z)
    mat = np.eye(n1, dtype=complex)
    k = int(np.argmax(np.abs(z)))
    order = [k] + [j for j in range(n1) if j != k]
    mat = mat[:, order]
    mat[:, 0] = z
    q, r = np.linalg.qr(mat)
    q = q * (np.diag(r) / np.abs(np.diag(r)))  # fix phases so q[:,0] = z
    return q


def fs_radial_jet(scale: float) -> Callable[[np.ndarray], np.ndarray]:
    """Derivatives (F', F'', F''', F'''') in rho = |z|^2 of a log(1 + rho/(2a))."""
    a = float(scale)

    def jet(rho):
        d = 2 * a + np.asarray(rho, float)
        return np.array([a / d, -a / d ** 2, 2 * a / d ** 3, -6 * a / d ** 4])

    return jet


@dataclass(frozen=True, eq=False)
class ChartPotential:
    """A local Kähler potential F(z) = |z|^2/2 + phi(z) on a polydisc.

    ``blocks`` optionally records that F is a sum of radial functions of
    |z_I|^2 over consecutive coordinate blocks; each entry is
    (block dimension, jet function rho -> (F', F'', F''', F'''')).  With that
    structure the curvature is evaluated from exact derivatives; otherwise
    finite differences of ``potential`` are used.
    """

    dim: int
    potential: Callable[[np.ndarray], float]
    blocks: tuple = ()
    radius: float = np.inf
    center: OrbitPoint | None = None
    to_point: Callable | None = field(default=None, repr=False)

    def phi(self, z) -> float:
        z = np.asarray(z, complex)
        return float(self.potential(z) - 0.5 * np.real(np.vdot(z, z)))


def radial_metric_tensors(jet: np.ndarray, z: np.ndarray):
    """Metric, first and mixed second derivatives for F = F(|z|^2).

    Returns (g, dg, ddg) with g[a,b] = g_{a b-bar}, dg[c,a,b] = d_c g_{a b-bar}
    and ddg[c,d,a,b] = d_c d_{d-bar} g_{a b-bar}.
    """
    f1, f2, f3, f4 = jet
    m = len(z)
    zb = z.conj()
    eye = np.eye(m)
    g = f1 * eye + f2 * np.outer(zb, z)
    dg = (f2 * np.einsum("c,ab->cab", zb, eye)
          + f3 * np.einsum("c,a,b->cab", zb, zb, z)
          + f2 * np.einsum("a,cb->cab", zb, eye))
    ddg = (f3 * np.einsum("c,d,ab->cdab", zb, z, eye)
           + f2 * np.einsum("cd,ab->cdab", eye, eye)
           + f4 * np.einsum("c,d,a,b->cdab", zb, z, zb, z)
           + f3 * np.einsum("cd,a,b->cdab", eye, zb, z)
           + f3 * np.einsum("d,a,cb->cdab", z, zb, eye)
           + f3 * np.einsum("c,b,ad->cdab", zb, z, eye)
           + f2 * np.einsum("cb,ad->cdab", eye, eye))
    return g, dg, ddg


def scalar_from_tensors(g, dg, ddg) -> float:
    """s = -g^{c d-bar} R_{c d-bar} with R = d d-bar log det g."""
    ginv = np.linalg.inv(g)  # ginv[b, a] pairs with g[a, b]
    t1 = np.einsum("ba,cdab->cd", ginv, ddg)
    dgbar = np.conj(np.transpose(dg, (0, 2, 1)))  # d_{d-bar} g_{a b-bar} = conj(d_d g_{b a-bar})
    t2 = np.einsum("ba,cae,ef,dfb->cd", ginv, dg, ginv, dgbar, optimize=True)
    ric = t1 - t2
    return float(-np.real(np.einsum("dc,cd->", ginv, ric)))


def radial_scalar(jet_values: np.ndarray, rho: float, dim: int, direction=None) -> float:
    """Scalar curvature of a U(dim)-invariant potential from its rho-jet."""
    if direction is None:
        direction = np.ones(dim) / np.sqrt(dim)
    u = np.asarray(direction, complex)
    u = u / np.linalg.norm(u)
    z = np.sqrt(rho) * u
    g, dg, ddg = radial_metric_tensors(jet_values, z)
    ev = np.linalg.eigvalsh(g)
    if ev[0] <= 0:
        raise DomainError("metric is not positive definite at this point", rho=float(rho))
    return scalar_from_tensors(g, dg, ddg)


def scalar_curvature_numeric(chart: ChartPotential, z, step: float = 2e-2) -> float:
    z = np.asarray(z, complex)
    if chart.blocks:
        total, start = 0.0, 0
        for bdim, jetfn in chart.blocks:
            zz = z[start:start + bdim]
            rho = float(np.real(np.vdot(zz, zz)))
            total += radial_scalar(jetfn(rho), rho, bdim, zz if rho > 0 else None)
            start += bdim
        return total
    return _fd_scalar(chart.potential, z, step)


def _real_hessian(fn, x: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central-difference Hessian of a real function of real variables."""
    n = len(x)
    f0 = fn(x)
    hess = np.zeros((n, n))
    e = np.eye(n) * h
    for i in range(n):
        fp1, fm1 = fn(x + e[i]), fn(x - e[i])
        fp2, fm2 = fn(x + 2 * e[i]), fn(x - 2 * e[i])
        hess[i, i] = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
        for j in range(i + 1, n):
            def cross(s):
                return (fn(x + s * e[i] + s * e[j]) - fn(x + s * e[i] - s * e[j])
                        - fn(x - s * e[i] + s * e[j]) + fn(x - s * e[i] - s * e[j]))
            hess[i, j] = hess[j, i] = (16 * cross(1) - cross(2)) / (48 * h * h)
    return hess


def complex_hessian(fn, z: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """Matrix M[j, k] = d_j d_k-bar f by finite differences in real coordinates."""
    m = len(z)
    x0 = np.concatenate([z.real, z.imag])

    def real_fn(x):
        return fn(x[:m] + 1j * x[m:])

    hr = _real_hessian(real_fn, x0, h)
    xx, yy, xy, yx = hr[:m, :m], hr[m:, m:], hr[:m, m:], hr[m:, :m]
    return 0.25 * (xx + yy + 1j * (xy - yx))


def _fd_scalar(potential, z: np.ndarray, step: float) -> float:
    def logdet(w):
        g = complex_hessian(potential, w, h=1e-3)
        sign, val = np.linalg.slogdet(g)
        if np.real(sign) <= 0:
            raise DomainError("metric is not positive definite near this point")
        return float(val)

    g0 = complex_hessian(potential, z, h=1e-3)
    if np.linalg.eigvalsh(0.5 * (g0 + g0.conj().T))[0] <= 0:
        raise DomainError("metric is not positive definite at this point")
    ric = complex_hessian(logdet, z, h=step)
    ginv = np.linalg.inv(g0)
    return float(-np.real(np.einsum("dc,cd->", ginv, ric)))


def fd_laplacian_at_center(fn: Callable[[np.ndarray], float], m: int, step: float = 1e-4) -> float:
    """Complex Laplacian at z = 0 of a chart whose metric there is identity/2.

    Delta f(0) = (1/2) sum_j (d_xj^2 + d_yj^2) f, second-order central
    differences at steps h and h/2 combined by Richardson extrapolation.
    """
    def lap(h):
        f0 = fn(np.zeros(m, complex))
        tot = 0.0
        for j in range(m):
            for unit in (1.0, 1j):
                e = np.zeros(m, complex)
                e[j] = unit * h
                tot += (fn(e) - 2 * f0 + fn(-e)) / (h * h)
        return 0.5 * tot

    return (4 * lap(step / 2) - lap(step)) / 3


def fs_chart(model: ModelSpec, p: OrbitPoint) -> ChartPotential:
    """Normal holomorphic coordinates z_i = sqrt(2 a_i) u_i centred at p."""
    frames = [unitary_frame(z) for z in p.coords]
    dims, scales = model.dims, model.scales

    def split(z):
        out, s = [], 0
        for n in dims:
            out.append(z[s:s + n])
            s += n
        return out

    def potential(z):
        return float(sum(a * np.log1p(np.real(np.vdot(w, w)) / (2 * a))
                         for w, a in zip(split(np.asarray(z, complex)), scales)))

    def to_point(z):
        vecs = []
        for w, a, fr in zip(split(np.asarray(z, complex)), scales, frames):
            u = np.concatenate([[1.0], w / np.sqrt(2 * a)])
            v = fr @ u
            vecs.append(v / np.linalg.norm(v))
        return OrbitPoint(tuple(vecs))

    blocks = tuple((n, fs_radial_jet(a)) for n, a in zip(dims, scales))
    return ChartPotential(model.m, potential, blocks, np.inf, p, to_point)


def fd_laplacian_values(model: ModelSpec, p: OrbitPoint, step: float = 1e-4) -> np.ndarray:
    """Finite-difference oracle for (Delta h_k)(p) in the normal chart at p."""
    chart = fs_chart(model, p)
    out = []
    for k in range(model.algebra.dim):
        e = np.zeros(model.algebra.dim)
        e[k] = 1.0
        out.append(fd_laplacian_at_center(lambda z: hamiltonian_of(model, e, chart.to_point(z)),
                                          model.m, step))
    return np.array(out)


# --------------------------------------------------------------------------
# standard models
# --------------------------------------------------------------------------

GROUPS = ("torus", "full", "diagonal")


def projective_model(dims: Sequence[int], scales: Sequence[float], group: str = "torus",
                     point=None, name: str = "") -> ModelSpec:
    """Product of projective spaces with a standard group.

    ``torus``: the diagonal torus of every factor.  ``full``: SU(n_i + 1) on
    every factor, with the diagonal generators marked as the torus.
    ``diagonal``: one SU(n+1) acting simultaneously on identical factors.
    """
    dims = [int(n) for n in dims]
    if group not in GROUPS:
        raise ValidationError(f"unknown group {group!r}", allowed=list(GROUPS))
    gens, torus = [], []
    if group == "diagonal":
        if len(set(dims)) != 1:
            raise ValidationError("the diagonal group needs equal factor dimensions")
        for b in hermitian_basis(dims[0] + 1):
            if np.allclose(b, np.diag(np.diag(b))):
                torus.append(len(gens))
            gens.append(tuple(b.copy() for _ in dims))
    else:
        for i, n in enumerate(dims):
            basis = diagonal_basis(n + 1) if group == "torus" else hermitian_basis(n + 1)
            for b in basis:
                if np.allclose(b, np.diag(np.diag(b))):
                    torus.append(len(gens))
                gens.append(embed(b, i, dims))
    return ModelSpec.create(list(zip(dims, scales)), gens, torus, name=name, point=point)


# --------------------------------------------------------------------------
# a non-cscK test model: Fubini-Study plus a torus-invariant bump
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BumpedProjectiveModel:
    """U(m)-invariant Kähler metric on P^m in the Fubini-Study class.

    In momentum coordinates tau in [0, a] (the moment of the diagonal circle
    fixing [1:0:...:0]) the metric is determined by the profile
    phi(tau) = tau (a - tau)/a + beta tau^2 (a - tau)^2 / a^3, which keeps the
    boundary behaviour phi(0) = phi(a) = 0, phi'(0) = 1, phi'(a) = -1 required
    for smoothness.  beta = 0 is Fubini-Study.  The volume form
    m (2 pi)^m tau^{m-1} d tau d(sphere) does not depend on beta, so the Gram
    matrix of the diagonal torus is the Fubini-Study one.
    """

    m: int
    scale: float
    beta: float
    algebra: ActionAlgebra

    @classmethod
    def create(cls, m: int, scale: float = 1.0, beta: float = 0.3) -> "BumpedProjectiveModel":
        gens = [embed(np.diag(d).astype(complex), 0, [m]) for d in _diag_generators(m + 1)]
        alg = ActionAlgebra.build([m], [scale], gens, tuple(range(len(gens))))
        model = cls(int(m), float(scale), float(beta), alg)
        taus = np.linspace(0, scale, 401)[1:-1]
        if np.any(model.profile(taus)[0] <= 0):
            raise DomainError("bump amplitude makes the metric degenerate", beta=beta)
        return model

    @property
    def dims(self):
        return (self.m,)

    @property
    def scales(self):
        return (self.scale,)

    @property
    def volume(self) -> float:
        return product_volume([self.m], [self.scale])

    @property
    def mean_scalar(self) -> float:
        return self.m * (self.m + 1) / self.scale

    def profile(self, tau):
        a, b = self.scale, self.beta
        tau = np.asarray(tau, float)
        u = tau * (a - tau)
        phi = u / a + b * u ** 2 / a ** 3
        du = a - 2 * tau
        dphi = du / a + 2 * b * u * du / a ** 3
        ddphi = -2 / a + 2 * b * (du ** 2 - 2 * u) / a ** 3
        d3 = 2 * b * (-6 * du) / a ** 3
        return phi, dphi, ddphi, d3

    def scalar(self, tau):
        """s = -tau^{1-m} d/dtau (tau^{m-1} L), L = (m-1) phi/tau + phi' - m."""
        m = self.m
        phi, dphi, ddphi, _ = self.profile(tau)
        tau = np.asarray(tau, float)
        L = (m - 1) * phi / tau + dphi - m
        dL = (m - 1) * (dphi / tau - phi / tau ** 2) + ddphi
        return -((m - 1) * L / tau + dL)

    def generator_data(self, xi) -> tuple[float, float]:
        """(c, Lambda) with h_xi = c + sum_j lambda'_j x_j and Lambda = sum lambda'_j.

        Generators are diagonal; x_j = tau |zeta_j|^2 are the moment coordinates.
        """
        blk = self.algebra.element(np.asarray(xi, float))[0]
        lam = np.real(np.diag(blk))
        c = self.scale * (lam[0] - lam.sum() / (self.m + 1))
        return float(c), float(np.sum(lam[1:] - lam[0]))

    def integrate_tau(self, fn, rtol: float = 1e-12) -> float:
        """m (2 pi)^m int_0^a fn(tau) tau^{m-1} d tau (fn already sphere-averaged)."""
        m = self.m
        val, err = quad(lambda t: fn(t) * t ** (m - 1), 0.0, self.scale,
                        epsabs=1e-14, epsrel=rtol, limit=200)
        return m * (2 * pi) ** m * val


def _diag_generators(size: int):
    for j in range(size - 1):
        d = np.zeros(size)
        d[j], d[j + 1] = 1.0, -1.0
        yield d
