"""Hermitian decompositions: assembly, certification, and recovery.

A decomposition is a real combination of conjugate rank-1 products,
H = sum_i lambda_i [u_i^1, ..., u_i^m].  This module assembles and
normalizes such objects, certifies minimal length via Kruskal ranks,
produces the closed-form rank decompositions of canonical basis tensors,
and recovers decompositions of low-rank tensors by simultaneous
diagonalization of slice mixtures of the cubic flattening.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import core, flatten, linalg
from .errors import (
    DegenerateSlices,
    DegenerateTerm,
    DimensionTooSmall,
    NonRealDiagonal,
    RankBudgetExceeded,
    ShapeMismatch,
)

CP_TOL = 1e-7
ZERO_NORM_TOL = 1e-14

Term = tuple[float, tuple[np.ndarray, ...]]


@dataclass(frozen=True)
class Unknown:
    """Outcome marker for searches that ended without a usable answer."""

    reason: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class HermitianDecomposition:
    dims: tuple[int, ...]
    terms: tuple[Term, ...]

    def __post_init__(self):
        dims = core.check_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        cooked = []
        for lam, vectors in self.terms:
            lam = float(lam)
            vs = core.check_vector_tuple(dims, vectors)
            for v in vs:
                v.flags.writeable = False
            cooked.append((lam, vs))
        object.__setattr__(self, "terms", tuple(cooked))

    def __len__(self):
        return len(self.terms)

    @property
    def order(self) -> int:
        return len(self.dims)

    def coefficients(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.terms])

    def mode_vectors(self, k: int) -> list[np.ndarray]:
        """Vectors of 1-based mode k across all terms."""
        return [vs[k - 1] for _, vs in self.terms]


def assemble(d: HermitianDecomposition) -> core.HermitianTensor:
    """Sum of the rank-1 terms; exactly Hermitian by construction."""
    n = core.size_of(d.dims)
    mat = np.zeros((n, n), dtype=np.complex128)
    for lam, vectors in d.terms:
        z = core.kron_vector(vectors)
        mat += lam * np.outer(z, z.conj())
    return core.HermitianTensor(d.dims, mat)


def residual(d: HermitianDecomposition, h: core.HermitianTensor) -> float:
    if d.dims != h.dims:
        raise ShapeMismatch(f"shapes differ: {d.dims} vs {h.dims}")
    return float(np.linalg.norm(assemble(d).mat - h.mat))


def normalize(d: HermitianDecomposition) -> HermitianDecomposition:
    """Scale vectors to unit norm with real positive leading entries.

    Coefficients absorb the squared norms, so the assembled tensor is
    unchanged.
    """
    terms = []
    for lam, vectors in d.terms:
        out = []
        for v in vectors:
            nv = float(np.linalg.norm(v))
            if nv == 0.0:
                out.append(v.copy())
                continue
            w = linalg.phase_normalize(v / nv)
            out.append(w)
            lam = lam * nv * nv
        terms.append((lam, tuple(out)))
    return HermitianDecomposition(d.dims, tuple(terms))


@dataclass(frozen=True)
class KruskalReport:
    kruskal_ranks: tuple[int, ...]
    rank: int
    certified: bool
    margin: int


def _kruskal_rank(vectors: list[np.ndarray], rel_tol: float = linalg.RANK_REL_TOL) -> int:
    """Largest k such that every k-subset is linearly independent.

    Exhaustive subset rank tests; exact at desk scale (r <= 12 or so).
    """
    r = len(vectors)
    n = len(vectors[0])
    m = np.column_stack(vectors)
    for k in range(1, min(r, n) + 1):
        for subset in itertools.combinations(range(r), k):
            if linalg.matrix_rank(m[:, subset], rel_tol) < k:
                return k - 1
    return min(r, n)


def kruskal_certify(d: HermitianDecomposition) -> KruskalReport:
    """Certify minimality of a decomposition via the Kruskal condition.

    With k_i the Kruskal rank of the mode-i vector set, the condition
    sum_i k_i >= r + m certifies the assembled tensor has Hermitian rank
    exactly r, with an essentially unique rank decomposition.
    """
    if d.order <= 1:
        raise ShapeMismatch("Kruskal certification requires order m > 1")
    r = len(d)
    if r == 0:
        return KruskalReport((), 0, True, 0)
    for lam, vectors in d.terms:
        if lam == 0.0 or any(float(np.linalg.norm(v)) == 0.0 for v in vectors):
            raise DegenerateTerm("terms must have nonzero coefficients and vectors")
    ks = tuple(_kruskal_rank(d.mode_vectors(k)) for k in range(1, d.order + 1))
    total = sum(ks)
    return KruskalReport(ks, r, total >= r + d.order, total - (r + d.order))


@dataclass(frozen=True)
class BasisDecompPlan:
    """Closed-form plan for decomposing a basis tensor on d differing modes.

    Nodes are the 2-vectors u_k = (1, exp(i k pi / d)) for k = 0..d; the
    first differing mode instead carries (c, exp(+-i k pi / d)).  Interior
    nodes appear twice (once conjugated), end nodes once, with signs
    (-1)^k and overall weight 1/(2d)."""

    d: int
    c: complex
    thetas: tuple[float, ...]
    terms: tuple[tuple[float, tuple[np.ndarray, ...]], ...]


def basis_plan(d: int, c: complex) -> BasisDecompPlan:
    """Rank decomposition of the all-(1,2) basis tensor of order d, value c."""
    if d < 1:
        raise ShapeMismatch("plan order d must be >= 1")
    c = complex(c)
    thetas = tuple(k * math.pi / d for k in range(d + 1))
    weight = 1.0 / (2.0 * d)

    def node(theta: float) -> np.ndarray:
        return np.array([1.0, np.exp(1j * theta)], dtype=np.complex128)

    def cnode(theta: float) -> np.ndarray:
        return np.array([c, np.exp(1j * theta)], dtype=np.complex128)

    terms = []
    for k in range(d + 1):
        sign = -1.0 if k % 2 else 1.0
        th = thetas[k]
        terms.append((sign * weight, (cnode(th),) + tuple(node(th) for _ in range(d - 1))))
        if 0 < k < d:
            terms.append((sign * weight, (cnode(-th),) + tuple(node(-th) for _ in range(d - 1))))
    return BasisDecompPlan(d, c, thetas, tuple(terms))


def basis_decomposition(I, J, c, dims) -> HermitianDecomposition:
    """Hermitian rank decomposition of the basis tensor with entry c at (I, J).

    One term when I = J (c must then be real); otherwise exactly 2d terms
    where d counts the differing index positions -- the certified
    Hermitian rank.  The plan is built on the differing modes and mapped
    back by placing each 2-vector's entries at positions (i_k, j_k);
    identical modes contribute the fixed unit vector e_{i_k}.
    """
    dims = core.check_dims(dims)
    I, J = tuple(int(i) for i in I), tuple(int(j) for j in J)
    core.flat_index(dims, I), core.flat_index(dims, J)
    c = complex(c)
    if c == 0:
        raise ShapeMismatch("basis coefficient c must be nonzero")

    def unit(k: int, i: int) -> np.ndarray:
        v = np.zeros(dims[k], dtype=np.complex128)
        v[i - 1] = 1.0
        return v

    diff = [k for k in range(len(dims)) if I[k] != J[k]]
    if not diff:
        if c.imag != 0.0:
            raise NonRealDiagonal(f"diagonal basis tensor at {I} needs real c, got {c}")
        vectors = tuple(unit(k, I[k]) for k in range(len(dims)))
        return HermitianDecomposition(dims, ((c.real, vectors),))

    for k in diff:
        if dims[k] < 2:
            raise DimensionTooSmall(f"mode {k + 1} has size 1 but labels differ")

    plan = basis_plan(len(diff), c)

    def embed(k: int, w: np.ndarray) -> np.ndarray:
        v = np.zeros(dims[k], dtype=np.complex128)
        v[I[k] - 1] = w[0]
        v[J[k] - 1] = w[1]
        return v

    terms = []
    for lam, plan_vectors in plan.terms:
        vectors = []
        slot = 0
        for k in range(len(dims)):
            if k in diff:
                vectors.append(embed(k, plan_vectors[slot]))
                slot += 1
            else:
                vectors.append(unit(k, I[k]))
        terms.append((lam, tuple(vectors)))
    return HermitianDecomposition(dims, tuple(terms))


def expected_hrank(dims) -> int:
    """ceil((n1...nm)^2 / (2(n1+...+nm-m)+1)), by dimension counting."""
    dims = core.check_dims(dims)
    n = core.size_of(dims)
    denom = 2 * (sum(dims) - len(dims)) + 1
    return -((-n * n) // denom)


def _fit_coefficients(h: core.HermitianTensor, vector_tuples) -> np.ndarray:
    """Real least-squares coefficients for given rank-1 directions."""
    cols = []
    for vectors in vector_tuples:
        z = core.kron_vector(vectors)
        t = np.outer(z, z.conj()).reshape(-1)
        cols.append(np.concatenate([t.real, t.imag]))
    x = np.column_stack(cols)
    y = np.concatenate([h.mat.reshape(-1).real, h.mat.reshape(-1).imag])
    sol, *_ = np.linalg.lstsq(x, y, rcond=None)
    return sol


def jennrich_decompose(
    h: core.HermitianTensor,
    rmax: int,
    seed: int,
    cp_tol: float = CP_TOL,
) -> HermitianDecomposition | Unknown:
    """Recover a short Hermitian decomposition by simultaneous diagonalization.

    Two random mixtures of the cubic-flattening slices share the factor
    structure of the decomposition; a generalized eigendecomposition of
    the pair exposes the combined mode vectors, which are split per mode
    by rank-1 factorization and completed with a real least-squares fit
    of the coefficients.  Returns Unknown when the mixture spectrum is
    degenerate or the residual stays above ``cp_tol * norm(h)``.
    """
    hnorm = core.norm(h)
    if hnorm <= ZERO_NORM_TOL:
        return HermitianDecomposition(h.dims, ())
    cubic = flatten.cubic_flatten(h)
    n1, n2, n3 = cubic.dims
    if not 1 <= rmax <= n3:
        raise RankBudgetExceeded(f"rmax = {rmax} outside the regime 1 <= r <= N3 = {n3}")

    if h.order == 1:
        # matrix case: the spectral decomposition already is the answer
        sd = linalg.herm_eig(h.mat)
        pairs = [
            (float(w), sd.eigenvectors[:, i].copy())
            for i, w in enumerate(sd.eigenvalues)
            if abs(w) > 1e-12 * float(np.abs(sd.eigenvalues).max())
        ]
        pairs.sort(key=lambda p: -abs(p[0]))
        terms = tuple((w, (linalg.phase_normalize(v),)) for w, v in pairs[:rmax])
        d = HermitianDecomposition(h.dims, terms)
        if residual(d, h) > cp_tol * hnorm:
            return Unknown("residual above tolerance at the requested rank budget")
        return d

    unfold1 = cubic.array.reshape(n1, n2 * n3)
    r = min(rmax, linalg.matrix_rank(unfold1))
    if r == 0:
        return HermitianDecomposition(h.dims, ())

    rng = np.random.Generator(np.random.PCG64(seed))
    w1 = rng.standard_normal(n3)
    w2 = rng.standard_normal(n3)
    t1 = np.tensordot(cubic.array, w1, axes=(2, 0))
    t2 = np.tensordot(cubic.array, w2, axes=(2, 0))

    try:
        factors = _jennrich_factors(unfold1, t1, t2, r)
    except DegenerateSlices as exc:
        return Unknown(str(exc))

    pdims = tuple(h.dims[k] for k in cubic.mode_order)
    inverse = np.argsort(cubic.mode_order)
    tuples = []
    for a in factors:
        vecs, res = linalg.rank1_factor(a.reshape(pdims))
        if res > 1e-5:
            return Unknown(f"recovered factor is not rank-1 (residual {res:.2e})")
        unit_vecs = []
        for v in vecs:
            nv = float(np.linalg.norm(v))
            if nv == 0.0:
                return Unknown("recovered a zero mode vector")
            unit_vecs.append(linalg.phase_normalize(v / nv))
        tuples.append(tuple(unit_vecs[k] for k in inverse))

    lams = _fit_coefficients(h, tuples)
    terms = tuple(
        (float(lam), vs) for lam, vs in zip(lams, tuples) if abs(lam) > 1e-12 * max(1.0, hnorm)
    )
    d = HermitianDecomposition(h.dims, terms)
    if residual(d, h) > cp_tol * hnorm:
        return Unknown("residual above tolerance at the requested rank budget")
    return d


def _jennrich_factors(unfold1: np.ndarray, t1: np.ndarray, t2: np.ndarray, r: int):
    """Column directions shared by two slice mixtures t1, t2 (N1 x N2)."""
    # orthonormal bases for the shared column and row spaces
    gc = unfold1 @ unfold1.conj().T
    wc = linalg.herm_eig(gc)
    p = wc.eigenvectors[:, ::-1][:, :r]
    stacked = np.vstack([t1, t2])
    gr = stacked.conj().T @ stacked
    wr = linalg.herm_eig(gr)
    q = wr.eigenvectors[:, ::-1][:, :r]

    s1 = p.conj().T @ t1 @ q
    s2 = p.conj().T @ t2 @ q
    cond = np.linalg.cond(s2)
    if not np.isfinite(cond) or cond > 1e10:
        raise DegenerateSlices("second slice mixture is numerically singular")
    f = s1 @ np.linalg.inv(s2)
    evals, evecs = np.linalg.eig(f)
    scale = float(np.abs(evals).max())
    for i in range(r):
        for j in range(i + 1, r):
            if abs(evals[i] - evals[j]) <= 1e-6 * max(scale, 1.0):
                raise DegenerateSlices(
                    f"generalized eigenvalues collide: |{evals[i]:.6g} - {evals[j]:.6g}|"
                )
    return [p @ evecs[:, j] for j in range(r)]
