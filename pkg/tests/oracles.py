"""Independent reference computations used to freeze expected values.

Nothing here imports the numerical core of kstab.  Each oracle recomputes a
quantity by a different route:

* ``bs_coefficients``: exact power-series expansion of the scalar-flat
  profile at infinity (sympy), giving d0, d1, d2 in closed form.
* ``toric_futaki``: Futaki invariant of a corner-truncated simplex from
  interior and boundary integrals of affine functions.
* ``qmc_gram``: quasi-Monte-Carlo Gram matrix on products of projective
  spaces from Gaussian sampling.
* ``bumped_futaki``/``bumped_futaki_qmc``/``bumped_extremal_ls``:
  integrals over the moment simplex of the bumped metric (Lebesgue measure
  there is the pushforward of the volume form).
"""

from __future__ import annotations

from math import factorial, pi

import numpy as np
import sympy as sp
from scipy.special import roots_jacobi
from scipy.stats import qmc

# --------------------------------------------------------------------------
# scalar-flat profile at infinity
# --------------------------------------------------------------------------

_T0 = sp.Symbol("t0", positive=True)


def _mul(a, b, n):
    out = [sp.Integer(0)] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j, y in enumerate(b[:n - i]):
            if y != 0:
                out[i + j] += x * y
    return [sp.expand(v) for v in out]


def _compose(f, g, n):
    out, p = [sp.Integer(0)] * n, [sp.Integer(1)] + [sp.Integer(0)] * (n - 1)
    for fk in f[:n]:
        if fk != 0:
            out = [sp.expand(o + fk * q) for o, q in zip(out, p)]
        p = _mul(p, g, n)
    return out


def _revert(g, n):
    h = [sp.Integer(0), 1 / g[1]] + [sp.Integer(0)] * (n - 2)
    for k in range(2, n):
        h[k] = sp.expand(-_compose(g, h, n)[k] / g[1])
    return h


def bs_coefficients(m: int) -> tuple:
    """Exact (d0, d1, d2) with psi = d0 rho^{2-m} + d1 rho^{1-m} + d2 rho^{3-2m} + ...

    Uses the first integral phi(tau) = tau - (m-1) t0^{m-1} tau^{2-m}
    + (m-2) t0^m tau^{1-m}, t0 = 1/(2 pi), of the scalar-flat equation, with
    rho ~ 2 tau at infinity.  Works in u = 1/tau and R = 1/rho.
    """
    n = 2 * m + 1
    a, b = (m - 1) * _T0 ** (m - 1), (m - 2) * _T0 ** m
    z = [sp.Integer(0)] * n
    z[m - 1] += a
    z[m] -= b
    geo, p = [sp.Integer(0)] * n, [sp.Integer(1)] + [sp.Integer(0)] * (n - 1)
    for _ in range(1, n):
        p = _mul(p, z, n)
        geo = [g + q for g, q in zip(geo, p)]
    # d/du log(rho / 2 tau) = -geo(u)/u
    integral = [sp.Integer(0)] + [sp.expand(-geo[k] / k) for k in range(1, n)]
    expo = _compose([sp.Integer(1) / sp.factorial(k) for k in range(n)],
                    [-c for c in integral], n)
    r_of_u = [sp.Integer(0)] + [sp.expand(c / 2) for c in expo[:n - 1]]
    u_of_r = _revert(r_of_u, n)
    v = u_of_r[1:] + [sp.Integer(0)]
    w = [sp.Integer(0)] + [-c / v[0] for c in v[1:]]
    inv = _compose([sp.Integer(1)] * n, w, n)
    dpsi = [sp.expand(c / v[0]) for c in inv]
    dpsi[0] -= sp.Rational(1, 2)
    # psi(R) = -int_0^R dpsi(R') R'^{-2} dR'
    psi = {k: sp.simplify((-dpsi[k + 1] / k).subs(_T0, 1 / (2 * sp.pi))) for k in range(1, n - 1)}
    return psi[m - 2], psi[m - 1], psi[2 * m - 3]


# --------------------------------------------------------------------------
# toric Futaki invariant of Bl_p P^m
# --------------------------------------------------------------------------

def _affine_h(lam, a, x):
    """FS Hamiltonian of diag(lam) at moment coordinates x (barycentric form)."""
    y = np.concatenate([[1 - x.sum() / a], x / a])
    return a * (lam @ y - lam.mean())


def _simplex(lam, a, size, m):
    return size ** m / factorial(m) * _affine_h(lam, a, np.full(m, size / (m + 1)))


def _facet(lam, a, size, m, which):
    cen = np.full(m, size / m)
    if which != "slant":
        cen[which] = 0.0
    return size ** (m - 1) / factorial(m - 1) * _affine_h(lam, a, cen)


def toric_futaki(lam, a: float, m: int, delta: float) -> float:
    """Futaki invariant of the simplex of size a with the corner {sum x < delta} cut.

    Normalized as int h (sbar - s) omega^m with omega^m pushing forward to
    m! (2 pi)^m dx and s omega^m to m! (2 pi)^m d(sigma) on the boundary
    (d sigma fixed by primitive normals).  Valid for affine h.
    """
    lam = np.asarray(lam, float)
    vol = (a ** m - delta ** m) / factorial(m)
    interior = _simplex(lam, a, a, m) - (_simplex(lam, a, delta, m) if delta else 0.0)
    bvol = (m * (a ** (m - 1) - delta ** (m - 1)) + a ** (m - 1) + delta ** (m - 1)) / factorial(m - 1)
    bd = sum(_facet(lam, a, a, m, i) - (_facet(lam, a, delta, m, i) if delta else 0.0)
             for i in range(m))
    bd += _facet(lam, a, a, m, "slant") + (_facet(lam, a, delta, m, "slant") if delta else 0.0)
    return factorial(m) * (2 * pi) ** m * (bvol / vol * interior - bd)


# --------------------------------------------------------------------------
# Gram matrix by quasi-Monte-Carlo
# --------------------------------------------------------------------------

def _fs_volume(dims, scales):
    m = sum(dims)
    out = float(factorial(m))
    for n, a in zip(dims, scales):
        out *= (2 * pi * a) ** n / factorial(n)
    return out


def qmc_gram(dims, scales, generators, log2_n: int = 18, seed: int = 0) -> np.ndarray:
    """Gram matrix int h_k h_l omega^m with h = a (Z^*AZ/|Z|^2 - tr A/(n+1))."""
    total = sum(2 * (n + 1) for n in dims)
    pts = qmc.Sobol(total, scramble=True, seed=seed).random_base2(log2_n)
    pts = np.clip(pts, 1e-12, 1 - 1e-12)
    gauss = np.sqrt(-2 * np.log(pts[:, 0::2])) * np.cos(2 * pi * pts[:, 1::2])
    gauss2 = np.sqrt(-2 * np.log(pts[:, 0::2])) * np.sin(2 * pi * pts[:, 1::2])
    vals = np.zeros((pts.shape[0], len(generators)))
    off = 0
    for f, (n, a) in enumerate(zip(dims, scales)):
        z = gauss[:, off:off + n + 1] + 1j * gauss2[:, off:off + n + 1]
        off += n + 1
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        for k, g in enumerate(generators):
            blk = np.asarray(g[f], complex)
            q = np.einsum("si,ij,sj->s", z.conj(), blk, z).real
            vals[:, k] += a * (q - np.trace(blk).real / (n + 1))
    return _fs_volume(dims, scales) * (vals.T @ vals) / pts.shape[0]


# --------------------------------------------------------------------------
# bumped metric on P^m: integrals over the moment simplex
# --------------------------------------------------------------------------

def bumped_scalar(tau, m: int, a: float, beta: float):
    """Scalar curvature of the U(m)-invariant metric with momentum profile
    phi = tau(a - tau)/a + beta tau^2 (a - tau)^2 / a^3, by sympy."""
    t = sp.Symbol("t", positive=True)
    phi = t * (a - t) / a + beta * t ** 2 * (a - t) ** 2 / a ** 3
    s = -sp.diff(t ** (m - 1) * ((m - 1) * phi / t + sp.diff(phi, t) - m), t) / t ** (m - 1)
    return sp.lambdify(t, sp.simplify(s), "numpy")(np.asarray(tau, float))


def simplex_rule(m: int, a: float, order: int = 40):
    """Conical-product Gauss-Jacobi rule on the simplex of size a: (points, weights)."""
    nodes, weights = [], []
    for k in range(m):
        alpha = m - 1 - k
        x, w = roots_jacobi(order, alpha, 0.0)
        nodes.append((x + 1) / 2)
        weights.append(w / 2 ** (alpha + 1))
    grids = np.meshgrid(*nodes, indexing="ij")
    wgrid = np.ones_like(grids[0])
    for k, w in enumerate(weights):
        shape = [1] * m
        shape[k] = -1
        wgrid = wgrid * w.reshape(shape)
    t = [g.ravel() for g in grids]
    pts = np.zeros((t[0].size, m))
    rem = np.ones(t[0].size)
    for k in range(m - 1):
        pts[:, k] = rem * t[k]
        rem = rem * (1 - t[k])
    pts[:, m - 1] = rem * t[m - 1]
    # the Duffy map has Jacobian prod (1 - t_k)^{m-1-k}, absorbed by the Jacobi weights
    return a * pts, wgrid.ravel() * a ** m


def _diag_hamiltonians(lams, a, x):
    y = np.concatenate([1 - x.sum(axis=1, keepdims=True) / a, x / a], axis=1)
    return np.stack([a * (y @ lam - np.mean(lam)) for lam in lams], axis=1)


def bumped_futaki(lam, m: int, a: float, beta: float, order: int = 40) -> float:
    """int h (sbar - s) omega^m for the bumped metric, by the simplex rule."""
    x, w = simplex_rule(m, a, order)
    h = _diag_hamiltonians([np.asarray(lam, float)], a, x)[:, 0]
    s = bumped_scalar(x.sum(axis=1), m, a, beta)
    sbar = m * (m + 1) / a
    return factorial(m) * (2 * pi) ** m * float(np.sum(w * h * (sbar - s)))


def bumped_futaki_qmc(lam, m: int, a: float, beta: float, log2_n: int = 20,
                      seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo version of :func:`bumped_futaki`: (estimate, standard error)."""
    rng = np.random.default_rng(seed)
    e = rng.exponential(size=(2 ** log2_n, m + 1))
    x = a * (e / e.sum(axis=1, keepdims=True))[:, :m]
    h = _diag_hamiltonians([np.asarray(lam, float)], a, x)[:, 0]
    s = bumped_scalar(x.sum(axis=1), m, a, beta)
    f = h * (m * (m + 1) / a - s)
    scale = factorial(m) * (2 * pi) ** m * a ** m / factorial(m)
    return scale * float(f.mean()), scale * float(f.std() / np.sqrt(f.size))


def bumped_extremal_ls(lams, m: int, a: float, beta: float, order: int = 40) -> np.ndarray:
    """Least-squares fit s ~ c + sum_k x_k h_k in L^2(omega^m); returns x."""
    x, w = simplex_rule(m, a, order)
    H = _diag_hamiltonians([np.asarray(l, float) for l in lams], a, x)
    s = bumped_scalar(x.sum(axis=1), m, a, beta)
    design = np.concatenate([np.ones((x.shape[0], 1)), H], axis=1)
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(design * sw[:, None], s * sw, rcond=None)
    return coef[1:]


def bumped_futaki_scale(lam, m: int, a: float, beta: float, order: int = 40) -> float:
    """int |h (sbar - s)| omega^m: the size against which a zero Futaki
    invariant is judged."""
    x, w = simplex_rule(m, a, order)
    h = _diag_hamiltonians([np.asarray(lam, float)], a, x)[:, 0]
    s = bumped_scalar(x.sum(axis=1), m, a, beta)
    return factorial(m) * (2 * pi) ** m * float(np.sum(w * np.abs(h * (m * (m + 1) / a - s))))
