"""Determinant states built from orthonormal families, and their kernels.

An orthonormal family (psi_1..psi_n) on a ground space defines the
antisymmetric n-point pure state with amplitudes

    Psi(x_1..x_n) = det(psi_i(x_j)) / sqrt(n!)

Overlaps of two such states reduce to determinants of the n x n matrix of
single-function overlaps, which is all this module needs for fidelities
and distances.

Distance convention used throughout the library: the trace distance of
density operators is half the trace norm of the difference,
(1/2) tr |rho - sigma|, so pure states are at distance sqrt(1 - fidelity)
and the maximal possible distance is 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationCapError
from .ground import GroundSpace, OrthonormalFamily

_LARGE_N_DET = 30  # beyond this, determinants go through log magnitudes


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    """Matrix of overlaps <a_i, b_j> between two orthonormal families.

    Any such matrix is a sub-block of a unitary, so all singular values
    are at most one; construction enforces this within 1e-9.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("overlap matrix must be square")
        object.__setattr__(self, "entries", m)
        top = self.singular_values[0] if m.size else 0.0
        if top > 1 + 1e-9:
            raise ValueError(f"largest singular value {top:.12f} exceeds 1")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    def to_json(self) -> str:
        ent = [[[float(v.real), float(v.imag)] for v in row] for row in self.entries]
        return json.dumps({"entries": ent}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "OverlapMatrix":
        doc = json.loads(text)
        m = np.array([[complex(re, im) for re, im in row] for row in doc["entries"]])
        return cls(m)


def overlap_matrix(a: OrthonormalFamily, b: OrthonormalFamily) -> OverlapMatrix:
    """Pairwise overlaps of two equally sized families on the same space."""
    if not a.space.same_as(b.space):
        raise ValueError("families live on different ground spaces")
    if a.n != b.n:
        raise ValueError(f"family sizes differ: {a.n} vs {b.n}")
    fold_a = a.folded()
    fold_b = b.folded()
    return OverlapMatrix(fold_a.conj().T @ fold_b)


def overlap_determinant(m: OverlapMatrix) -> complex:
    """det of the overlap matrix, through log magnitudes for large sizes."""
    if m.n == 0:
        return 1.0 + 0.0j
    if m.n <= _LARGE_N_DET:
        return complex(np.linalg.det(m.entries))
    sign, logabs = np.linalg.slogdet(m.entries)
    return complex(sign * np.exp(logabs))


def slater_fidelity(m: OverlapMatrix) -> float:
    """|det M|^2, the squared overlap of the two determinant states."""
    if m.n == 0:
        return 1.0
    _, logabs = np.linalg.slogdet(m.entries)
    if logabs == -np.inf:
        return 0.0
    return float(min(1.0, math.exp(2.0 * logabs)))


def trace_distance_slater(m: OverlapMatrix) -> float:
    """Trace distance of the two pure determinant states, sqrt(1 - |det M|^2)."""
    return math.sqrt(max(0.0, 1.0 - slater_fidelity(m)))


@dataclass(frozen=True, eq=False)
class ProjectionKernel:
    """Kernel K(x, y) = sum_l conj(psi_l(x)) psi_l(y) of rank n.

    Reproduces itself under the weighted product, sum_y K(x,y) mu(y) K(y,z)
    = K(x,z), and has weighted trace equal to the rank.
    """

    space: GroundSpace
    matrix: np.ndarray
    rank: int

    def __post_init__(self):
        k = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", k)
        m = self.space.n_points
        if k.shape != (m, m):
            raise ValueError("kernel size must match the space")
        scale = max(1.0, float(np.max(np.abs(k))))
        if np.max(np.abs(k - k.conj().T)) > 1e-9 * scale:
            raise ValueError("kernel must be Hermitian")
        kdk = k @ (self.space.weights[:, None] * k)
        if np.max(np.abs(kdk - k)) > 1e-8 * scale:
            raise ValueError("kernel is not a projection under the weighted product")
        tr = float(np.sum(np.real(np.diag(k)) * self.space.weights))
        if abs(tr - self.rank) > 1e-8:
            raise ValueError(f"weighted trace {tr:.9f} does not equal rank {self.rank}")

    def operator_matrix(self) -> np.ndarray:
        """The kernel as a weight-folded operator matrix.

        Entry (x, y) is sqrt(mu(x)) K(y, x) sqrt(mu(y)); this is the rank-n
        orthogonal projector onto the folded family in the plain inner
        product, with eigenvalues one (n times) and zero.
        """
        root = np.sqrt(self.space.weights)
        return root[:, None] * self.matrix.conj() * root[None, :]

    def to_json(self) -> str:
        mat = [[[float(v.real), float(v.imag)] for v in row] for row in self.matrix]
        return json.dumps({"rank": self.rank, "matrix": mat,
                           "weights": self.space.weights.tolist()}, sort_keys=True)


def projection_kernel(family: OrthonormalFamily) -> ProjectionKernel:
    fns = family.functions
    return ProjectionKernel(family.space, fns.conj().T @ fns, family.n)


def slater_amplitude(family: OrthonormalFamily, points) -> complex:
    """Amplitude det(psi_i(x_j)) / sqrt(n!) of one ordered tuple of points.

    Points are given by index into the ground space; repeats give zero.
    Swapping two points flips the sign.
    """
    idx = list(points)
    if len(idx) != family.n:
        raise ValueError(f"need {family.n} points, got {len(idx)}")
    mat = family.functions[:, idx]
    return complex(np.linalg.det(mat) / math.sqrt(math.factorial(family.n)))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive unit-trace operator on a tensor product of finite factors."""

    dims: tuple
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        total = math.prod(self.dims)
        if m.shape != (total, total):
            raise ValueError(f"matrix shape {m.shape} does not match dims {self.dims}")
        if np.max(np.abs(m - m.conj().T)) > 1e-9:
            raise ValueError("density operator must be Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-10 or abs(np.trace(m).imag) > 1e-12:
            raise ValueError(f"trace is {np.trace(m)}, expected 1")
        low = float(np.min(np.linalg.eigvalsh(m)))
        if low < -1e-10:
            raise ValueError(f"negative eigenvalue {low:.3e}")

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def to_json(self) -> str:
        mat = [[[float(v.real), float(v.imag)] for v in row] for row in self.matrix]
        return json.dumps({"dims": list(self.dims), "matrix": mat}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DensityOperator":
        doc = json.loads(text)
        m = np.array([[complex(re, im) for re, im in row] for row in doc["matrix"]])
        return cls(tuple(doc["dims"]), m)


def slater_state_vector(family: OrthonormalFamily, cap: int = 100_000) -> np.ndarray:
    """Weight-folded amplitudes of the determinant state on the full tuple grid.

    Returns a unit vector of length |E|**n in C-order over (x_1..x_n); the
    entry for a tuple is the amplitude times prod_j sqrt(mu(x_j)).
    """
    m = family.space.n_points
    n = family.n
    total = m ** n
    if total > cap:
        raise EnumerationCapError(total, cap)
    fold = family.folded()  # (m, n), orthonormal columns
    idx = np.indices((m,) * n).reshape(n, -1).T  # (total, n)
    mats = fold[idx, :]  # (total, n, n); transposition leaves det unchanged
    vec = np.linalg.det(mats) / math.sqrt(math.factorial(n))
    return vec


def full_state_vector(family: OrthonormalFamily, cap: int = 100_000) -> DensityOperator:
    """The pure density operator of the determinant state, factors of size |E|."""
    vec = slater_state_vector(family, cap=cap)
    return DensityOperator((family.space.n_points,) * family.n,
                           np.outer(vec, vec.conj()))


def _partial_trace_matrix(mat: np.ndarray, dims, traced) -> np.ndarray:
    """Trace the listed tensor factors (0-based) out of a square matrix."""
    dims = [int(d) for d in dims]
    mat = np.asarray(mat)
    total = math.prod(dims)
    if mat.shape != (total, total):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
    traced = sorted(set(int(i) for i in traced), reverse=True)
    for i in traced:
        if not 0 <= i < len(dims):
            raise ValueError(f"factor index {i} out of range")
    for i in traced:
        pre = math.prod(dims[:i])
        d = dims[i]
        post = math.prod(dims[i + 1:])
        t = mat.reshape(pre, d, post, pre, d, post)
        mat = np.einsum("apbcpd->abcd", t).reshape(pre * post, pre * post)
        del dims[i]
    return mat


def reduced_density_matrix(state: DensityOperator, k: int) -> DensityOperator:
    """Unit-trace reduction of `state` to its first k tensor factors."""
    n = state.n_factors
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    if k == n:
        return state
    red = _partial_trace_matrix(state.matrix, state.dims, range(k, n))
    return DensityOperator(state.dims[:k], red)
