"""Finite-dimensional Lie algebras of Hamiltonian isometries on products of
projective spaces.

An element of the algebra is a tuple of Hermitian blocks, one block of size
``n_i + 1`` for each projective factor ``P^{n_i}``.  The Hamiltonian of a
block ``A`` on a factor with scale ``a`` is

    h_A(Z) = a * (Z^* A Z / |Z|^2 - tr A / (n + 1)),

which has zero mean for the Fubini-Study volume by symmetry.  Identity
blocks therefore give the zero function, and all pairings only see the
traceless parts.

Coefficient vectors (:class:`MomentVector`) are coordinates of *elements*
of the algebra.  A moment-map value is converted from its raw pairings
``h_k(p)`` through the Gram matrix, which is how the algebra is identified
with its dual.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, pi
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import QuadratureError, ValidationError

Blocks = tuple  # tuple[np.ndarray, ...], one Hermitian block per factor

LINALG_TOL = 1e-10


# --------------------------------------------------------------------------
# small helpers on block tuples
# --------------------------------------------------------------------------

def as_blocks(blocks: Sequence, dims: Sequence[int]) -> Blocks:
    """Coerce a sequence of square matrices into a validated block tuple."""
    if len(blocks) != len(dims):
        raise ValidationError(
            f"expected {len(dims)} blocks, got {len(blocks)}", n_blocks=len(blocks))
    out = []
    for i, (b, n) in enumerate(zip(blocks, dims)):
        arr = np.asarray(b, dtype=complex)
        if arr.shape != (n + 1, n + 1):
            raise ValidationError(
                f"block {i} has shape {arr.shape}, expected {(n + 1, n + 1)}", block=i)
        out.append(arr)
    return tuple(out)


def traceless(block: np.ndarray) -> np.ndarray:
    n1 = block.shape[0]
    return block - (np.trace(block) / n1) * np.eye(n1)


def combine(generators: Sequence[Blocks], coeffs) -> Blocks:
    """Linear combination sum_k c_k A_k, blockwise (complex coefficients allowed)."""
    coeffs = np.asarray(coeffs)
    nblk = len(generators[0])
    return tuple(
        sum(coeffs[k] * generators[k][i] for k in range(len(generators)))
        for i in range(nblk)
    )


def embed(block: np.ndarray, factor: int, dims: Sequence[int]) -> Blocks:
    """Place ``block`` on one factor and zeros on all others."""
    out = [np.zeros((n + 1, n + 1), dtype=complex) for n in dims]
    out[factor] = np.asarray(block, dtype=complex)
    return tuple(out)


def hermitian_basis(size: int) -> list[np.ndarray]:
    """Generalized Gell-Mann basis of traceless Hermitian ``size x size`` matrices.

    Orthogonal for the trace form with tr(A^2) = 2 for every element.
    """
    basis = []
    for j in range(size):
        for k in range(j + 1, size):
            s = np.zeros((size, size), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            basis.append(s)
            a = np.zeros((size, size), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            basis.append(a)
    for l in range(1, size):
        d = np.zeros(size)
        d[:l] = 1.0
        d[l] = -l
        basis.append(np.diag(d * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    return basis


def diagonal_basis(size: int) -> list[np.ndarray]:
    """Traceless diagonal matrices diag(0..,1,-1,..0): a basis of the maximal torus."""
    out = []
    for j in range(size - 1):
        d = np.zeros(size)
        d[j], d[j + 1] = 1.0, -1.0
        out.append(np.diag(d).astype(complex))
    return out


def _real_vec(blocks: Blocks) -> np.ndarray:
    parts = []
    for b in blocks:
        t = traceless(b)
        parts.append(t.real.ravel())
        parts.append(t.imag.ravel())
    return np.concatenate(parts)


def _complex_vec(blocks: Blocks) -> np.ndarray:
    return np.concatenate([traceless(b).ravel() for b in blocks])


def bracket(x: Blocks, y: Blocks) -> Blocks:
    """Hermitian form of the commutator, i [X, Y], blockwise."""
    return tuple(1j * (a @ b - b @ a) for a, b in zip(x, y))


# --------------------------------------------------------------------------
# Fubini-Study moments
# --------------------------------------------------------------------------

def product_volume(dims: Sequence[int], scales: Sequence[float]) -> float:
    """Integral of omega^m over a product of scaled projective spaces.

    Each factor a_i * omega_FS gives a line of area 2*pi*a_i and
    int omega_i^{n_i} = (2 pi a_i)^{n_i}; the multinomial expansion of
    (sum omega_i)^m supplies m! / prod n_i!.
    """
    m = int(sum(dims))
    vol = float(factorial(m))
    for n, a in zip(dims, scales):
        vol *= (2 * pi * a) ** n / factorial(n)
    return vol


def _fs_covariance(a: np.ndarray, b: np.ndarray) -> float:
    """E[h_A h_B] / scale^2 for the uniform (Fubini-Study) measure on P^n.

    Uses E[(Z^*AZ)(Z^*BZ)/|Z|^4] = (trA trB + tr AB)/((n+1)(n+2)).
    """
    n1 = a.shape[0]
    ta, tb = traceless(a), traceless(b)
    return float(np.real(np.trace(ta @ tb))) / (n1 * (n1 + 1))


@dataclass(frozen=True)
class FactorGeometry:
    """The minimum a Gram computation needs to know about a model."""

    dims: tuple
    scales: tuple

    @property
    def volume(self) -> float:
        return product_volume(self.dims, self.scales)


def gram_matrix(model, algebra_basis: Sequence[Blocks], method: str = "closed",
                n_samples: int = 1_000_000, seed: int = 0, rtol: float = 1e-6) -> np.ndarray:
    """L^2 pairings  G_kl = int h_k h_l omega^m  of the basis Hamiltonians.

    ``model`` is anything with ``dims`` and ``scales`` attributes.  The closed
    form is exact; ``method="montecarlo"`` samples normalized Gaussian
    vectors per factor and raises :class:`QuadratureError` when the estimated
    standard error exceeds ``rtol`` relative to the largest diagonal entry.
    """
    dims, scales = tuple(model.dims), tuple(model.scales)
    basis = [as_blocks(b, dims) for b in algebra_basis]
    k = len(basis)
    vol = product_volume(dims, scales)
    if method == "closed":
        g = np.zeros((k, k))
        for i in range(k):
            for j in range(i, k):
                val = sum(a * a * _fs_covariance(basis[i][f], basis[j][f])
                          for f, a in enumerate(scales))
                g[i, j] = g[j, i] = vol * val
        return g
    if method != "montecarlo":
        raise ValidationError(f"unknown gram method {method!r}")
    rng = np.random.default_rng(seed)
    values = np.zeros((n_samples, k))
    for f, (n, a) in enumerate(zip(dims, scales)):
        z = rng.standard_normal((n_samples, n + 1)) + 1j * rng.standard_normal((n_samples, n + 1))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        for idx in range(k):
            blk = basis[idx][f]
            quad = np.einsum("si,ij,sj->s", z.conj(), blk, z).real
            values[:, idx] += a * (quad - np.trace(blk).real / (n + 1))
    prods = values[:, :, None] * values[:, None, :]
    g = vol * prods.mean(axis=0)
    err = vol * prods.std(axis=0) / np.sqrt(n_samples)
    scale = max(float(np.max(np.abs(np.diag(g)))), 1e-300)
    if np.max(err) > rtol * scale:
        raise QuadratureError(
            "Monte-Carlo Gram estimate did not reach the requested tolerance",
            estimated_error=float(np.max(err) / scale), rtol=rtol, n_samples=n_samples)
    return g


# --------------------------------------------------------------------------
# the algebra object
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ActionAlgebra:
    dims: tuple
    scales: tuple
    generators: tuple
    gram: np.ndarray
    structure_constants: np.ndarray
    torus_indices: tuple = ()
    closure_residual: float = 0.0

    @classmethod
    def build(cls, dims: Sequence[int], scales: Sequence[float],
              generators: Sequence[Sequence], torus_indices: Sequence[int] = ()) -> "ActionAlgebra":
        dims = tuple(int(n) for n in dims)
        scales = tuple(float(a) for a in scales)
        gens = tuple(as_blocks(g, dims) for g in generators)
        for k, g in enumerate(gens):
            for i, b in enumerate(g):
                if np.max(np.abs(b - b.conj().T)) > LINALG_TOL:
                    raise ValidationError(f"generator {k} block {i} is not Hermitian",
                                          generator=k, block=i)
        if not gens:
            raise ValidationError("an action algebra needs at least one generator")
        gram = gram_matrix(FactorGeometry(dims, scales), gens)
        evals = np.linalg.eigvalsh(gram)
        if evals[0] <= LINALG_TOL * max(1.0, evals[-1]):
            raise ValidationError(
                "Gram matrix is not positive definite: generators are linearly dependent "
                "modulo identity blocks", min_eigenvalue=float(evals[0]))
        c, resid = _structure_constants(gens)
        scale = max(1.0, max(np.max(np.abs(_real_vec(g))) for g in gens) ** 2)
        if resid > 1e-8 * scale:
            raise ValidationError("generators do not close under the bracket",
                                  closure_residual=resid)
        torus = tuple(int(i) for i in torus_indices)
        for i in torus:
            if not 0 <= i < len(gens):
                raise ValidationError(f"torus index {i} out of range", index=i)
        alg = cls(dims, scales, gens, _frozen(gram), _frozen(c), torus, float(resid))
        if torus and not alg.is_abelian(alg.basis_of(torus)):
            raise ValidationError("torus indices do not span an abelian subalgebra",
                                  torus=list(torus))
        return alg

    # ---- basic structure -------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.generators)

    def element(self, coeffs) -> Blocks:
        return combine(self.generators, coeffs)

    def inner(self, x, y) -> float:
        return float(np.real(np.asarray(x) @ self.gram @ np.asarray(y)))

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x), 0.0)))

    def basis_of(self, indices: Sequence[int]) -> np.ndarray:
        """Columns are unit coordinate vectors of the listed generators."""
        b = np.zeros((self.dim, len(indices)))
        for col, i in enumerate(indices):
            b[i, col] = 1.0
        return b

    @property
    def torus_basis(self) -> np.ndarray:
        return self.basis_of(self.torus_indices)

    def ad(self, xi) -> np.ndarray:
        """Matrix of ad_xi in the generator basis: (ad_xi eta)_k = sum_j M[k, j] eta_j."""
        return np.einsum("i,ijk->kj", np.asarray(xi, dtype=float), self.structure_constants)

    def bracket_coeffs(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(x, float), np.asarray(y, float),
                         self.structure_constants)

    def is_abelian(self, basis: np.ndarray, tol: float = 1e-9) -> bool:
        for i in range(basis.shape[1]):
            for j in range(i + 1, basis.shape[1]):
                if np.max(np.abs(self.bracket_coeffs(basis[:, i], basis[:, j])), initial=0) > tol:
                    return False
        return True

    def jacobi_residual(self) -> float:
        c = self.structure_constants
        # sum over cyclic permutations of [[e_i, e_j], e_k]
        t = np.einsum("ijl,lkn->ijkn", c, c)
        cyc = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
        return float(np.max(np.abs(cyc), initial=0.0))

    def antisymmetry_residual(self) -> float:
        c = self.structure_constants
        return float(np.max(np.abs(c + np.transpose(c, (1, 0, 2))), initial=0.0))

    def to_json(self) -> dict:
        return {
            "generators": [[_encode_matrix(b) for b in g] for g in self.generators],
            "torus": list(self.torus_indices),
        }


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _encode_matrix(b: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in b]


def _structure_constants(gens: Sequence[Blocks]) -> tuple[np.ndarray, float]:
    k = len(gens)
    basis = np.stack([_real_vec(g) for g in gens], axis=1)
    c = np.zeros((k, k, k))
    worst = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            target = _real_vec(bracket(gens[i], gens[j]))
            sol, *_ = np.linalg.lstsq(basis, target, rcond=None)
            worst = max(worst, float(np.max(np.abs(basis @ sol - target), initial=0.0)))
            c[i, j] = sol
            c[j, i] = -sol
    return c, worst


# --------------------------------------------------------------------------
# moment vectors and projections
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MomentVector:
    """Coordinates of an algebra element in the generator basis."""

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        arr = np.array(self.coeffs)
        if not np.iscomplexobj(arr):
            arr = arr.astype(float)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: "MomentVector") -> "MomentVector":
        return MomentVector(self.coeffs + other.coeffs)

    def __sub__(self, other: "MomentVector") -> "MomentVector":
        return MomentVector(self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> "MomentVector":
        return MomentVector(self.coeffs * s)

    __rmul__ = __mul__

    def pairing(self, algebra: ActionAlgebra) -> np.ndarray:
        """Values <self, e_k> of the dual pairing, i.e. G @ coeffs."""
        return algebra.gram @ self.coeffs

    def norm(self, algebra: ActionAlgebra) -> float:
        return algebra.norm(np.real(self.coeffs))

    @classmethod
    def from_pairings(cls, algebra: ActionAlgebra, values) -> "MomentVector":
        return cls(np.linalg.solve(algebra.gram, np.asarray(values, dtype=float)))


def _check_basis(basis: np.ndarray, algebra: ActionAlgebra) -> np.ndarray:
    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[0] != algebra.dim:
        raise ValidationError("subalgebra basis has the wrong number of rows",
                              rows=basis.shape[0], expected=algebra.dim)
    return basis


def _restricted_gram(basis: np.ndarray, algebra: ActionAlgebra) -> np.ndarray:
    sub = basis.T @ algebra.gram @ basis
    if basis.shape[1]:
        ev = np.linalg.eigvalsh(sub)
        if ev[0] <= LINALG_TOL * max(1.0, abs(ev[-1])):
            raise ValidationError("subalgebra basis is degenerate",
                                  min_eigenvalue=float(ev[0]))
    return sub


def projection_matrix(basis: np.ndarray, algebra: ActionAlgebra) -> np.ndarray:
    """Gram-orthogonal projector onto span(basis), acting on coefficient vectors."""
    basis = _check_basis(basis, algebra)
    if basis.shape[1] == 0:
        return np.zeros((algebra.dim, algebra.dim))
    sub = _restricted_gram(basis, algebra)
    return basis @ np.linalg.solve(sub, basis.T @ algebra.gram)


def project(vec: MomentVector, subalgebra_basis: np.ndarray, algebra: ActionAlgebra) -> MomentVector:
    return MomentVector(projection_matrix(subalgebra_basis, algebra) @ vec.coeffs)


def orthonormalize(basis: np.ndarray, algebra: ActionAlgebra) -> np.ndarray:
    """Gram-orthonormal basis of span(basis); rank-deficient columns are dropped."""
    basis = _check_basis(basis, algebra)
    if basis.shape[1] == 0:
        return basis
    sub = basis.T @ algebra.gram @ basis
    w, v = np.linalg.eigh(sub)
    keep = w > LINALG_TOL * max(1.0, w[-1])
    return basis @ v[:, keep] / np.sqrt(w[keep])


def centralizer(algebra: ActionAlgebra, basis: np.ndarray, within: np.ndarray | None = None) -> np.ndarray:
    """Elements of span(within) (default: whole algebra) commuting with span(basis)."""
    basis = _check_basis(basis, algebra)
    w = np.eye(algebra.dim) if within is None else _check_basis(within, algebra)
    if w.shape[1] == 0:
        return w
    rows = [-algebra.ad(basis[:, t]) @ w for t in range(basis.shape[1])]
    if not rows:
        return w
    ns = null_space(np.vstack(rows), rcond=1e-9)
    return w @ ns


def t_perp_basis(algebra: ActionAlgebra, torus_basis: np.ndarray) -> np.ndarray:
    """Basis of {xi : [xi, eta] = 0 and <xi, eta> = 0 for all eta in the torus}."""
    torus_basis = _check_basis(torus_basis, algebra)
    if torus_basis.shape[1] == 0:
        return np.eye(algebra.dim)
    if not algebra.is_abelian(torus_basis):
        raise ValidationError("torus basis does not span an abelian subalgebra")
    rows = []
    for t in range(torus_basis.shape[1]):
        eta = torus_basis[:, t]
        rows.append(-algebra.ad(eta))        # ad_xi(eta) = -ad_eta(xi)
        rows.append((algebra.gram @ eta)[None, :])
    constraints = np.vstack(rows)
    scale = max(1.0, float(np.max(np.abs(constraints))))
    return null_space(constraints / scale, rcond=1e-9)


def t_perp_subalgebra(algebra: ActionAlgebra, torus_indices: Sequence[int] | None = None) -> np.ndarray:
    indices = algebra.torus_indices if torus_indices is None else tuple(torus_indices)
    for i in indices:
        if not 0 <= i < algebra.dim:
            raise ValidationError(f"torus index {i} out of range", index=i)
    tb = algebra.basis_of(indices)
    if not algebra.is_abelian(tb):
        raise ValidationError("torus indices do not span an abelian subalgebra",
                              torus=list(indices))
    return t_perp_basis(algebra, tb)


def adjoint_transport(g: Sequence, mu: MomentVector, algebra: ActionAlgebra) -> MomentVector:
    """ad_g mu for a per-factor invertible matrix tuple ``g``.

    For unitary ``g`` the result is real; for a general element of the
    complexified group the coordinates are complex.
    """
    g = as_blocks(g, algebra.dims)
    for i, blk in enumerate(g):
        if np.linalg.cond(blk) > 1e12:
            raise ValidationError(f"group element block {i} is singular", block=i)
    x = algebra.element(mu.coeffs)
    moved = tuple(b @ xb @ np.linalg.inv(b) for b, xb in zip(g, x))
    basis = np.stack([_complex_vec(gen) for gen in algebra.generators], axis=1)
    target = _complex_vec(moved)
    sol, *_ = np.linalg.lstsq(basis, target, rcond=None)
    resid = float(np.max(np.abs(basis @ sol - target), initial=0.0))
    if resid > 1e-8 * max(1.0, float(np.max(np.abs(target), initial=0.0))):
        raise ValidationError("the algebra is not invariant under this group element",
                              residual=resid)
    if np.max(np.abs(sol.imag), initial=0.0) <= 1e-10 * max(1.0, float(np.max(np.abs(sol)))):
        return MomentVector(sol.real)
    return MomentVector(sol)


def element_coordinates(algebra: ActionAlgebra, blocks: Sequence, tol: float = 1e-9) -> np.ndarray:
    """Coordinates of a block tuple in the generator basis (identity parts ignored)."""
    target = _real_vec(as_blocks(blocks, algebra.dims))
    mat = np.stack([_real_vec(g) for g in algebra.generators], axis=1)
    coeffs, *_ = np.linalg.lstsq(mat, target, rcond=None)
    resid = float(np.linalg.norm(mat @ coeffs - target))
    if resid > tol * max(1.0, float(np.linalg.norm(target))):
        raise ValidationError("element does not lie in the action algebra", residual=resid)
    return coeffs
