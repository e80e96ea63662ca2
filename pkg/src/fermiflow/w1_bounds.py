"""Closed-form bounds between determinant states from their overlap matrix.

The states built from families (psi_i) and (phi_i) can each be recombined
by an n x n unitary without changing anything observable. Maximizing the
mean overlap (1/n) |sum_i <V psi_i, U phi_i>| over both recombinations
gives the nuclear norm of the overlap matrix divided by n, and that single
number controls a transport-type distance on the n-point state:

    W1(rho, sigma) <= n sqrt(1 - s^2),  s = (sum of singular values) / n.

Together with the two-sided comparison trace <= W1 <= n * trace this
sandwiches the trace distance sqrt(1 - |det M|^2) of the same pair, and
the two sides can be far apart: see `example_gap_table`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .ground import GroundSpace, OrthonormalFamily, orthonormalize
from .slater import (OverlapMatrix, overlap_determinant, overlap_matrix,
                     slater_fidelity, trace_distance_slater)


def stabilizer_max_overlap(m: OverlapMatrix) -> float:
    """Mean overlap maximized over unitary recombinations of both families.

    Equals the nuclear norm of the overlap matrix divided by n: for
    recombinations V, U the mean overlap is |tr(V^H M U)| / n, and the
    trace inequality caps that at the singular value sum, attained at the
    polar factor. Clamped to [0, 1].
    """
    if m.n == 0:
        return 1.0
    s = float(np.sum(m.singular_values)) / m.n
    return min(1.0, max(0.0, s))


def stabilizer_max_overlap_ascent(m: OverlapMatrix, rng: np.random.Generator,
                                  restarts: int = 5, max_iter: int = 200,
                                  rtol: float = 1e-12) -> float:
    """Maximize |tr(A^H M B)| / n by alternating polar updates.

    Independent check on `stabilizer_max_overlap`: each half-step is the
    exact maximizer for the other unitary held fixed, so the objective
    ascends; random restarts guard against flat starts.
    """
    mat = m.entries
    n = m.n
    if n == 0:
        return 1.0

    def polar(c: np.ndarray) -> np.ndarray:
        u, _, vh = np.linalg.svd(c)
        return u @ vh

    best = 0.0
    for _ in range(restarts):
        b = polar(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        value = 0.0
        for _ in range(max_iter):
            a = polar(mat @ b)
            b = polar(mat.conj().T @ a)
            new = abs(np.trace(a.conj().T @ mat @ b))
            if abs(new - value) <= rtol * max(1.0, new):
                value = new
                break
            value = new
        best = max(best, value)
    return best / n


def w1_upper_slater(m: OverlapMatrix) -> float:
    """n sqrt(1 - s^2) with s the stabilizer-maximized mean overlap."""
    s = stabilizer_max_overlap(m)
    return m.n * math.sqrt(max(0.0, 1.0 - s * s))


@dataclass(frozen=True)
class SlaterBoundsReport:
    """Distance bounds for one pair of determinant states.

    Satisfies trace_distance <= w1_upper <= n_times_trace: the first step
    holds because both bracket the same transport distance, the second
    because |det M| <= s^n <= s by the mean inequality on singular values.
    """

    n: int
    trace_distance: float
    w1_upper: float
    n_times_trace: float
    stabilizer_overlap: float
    singular_values: tuple

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "trace_distance": self.trace_distance,
            "w1_upper": self.w1_upper,
            "n_times_trace": self.n_times_trace,
            "stabilizer_overlap": self.stabilizer_overlap,
            "singular_values": list(self.singular_values),
        }, sort_keys=True)

    def csv_row(self) -> list:
        return [self.n, self.trace_distance, self.w1_upper,
                self.n_times_trace, *self.singular_values]


def slater_bounds_report(a: OrthonormalFamily, b: OrthonormalFamily) -> SlaterBoundsReport:
    m = overlap_matrix(a, b)
    trace = trace_distance_slater(m)
    upper = w1_upper_slater(m)
    report = SlaterBoundsReport(
        n=m.n,
        trace_distance=trace,
        w1_upper=upper,
        n_times_trace=m.n * trace,
        stabilizer_overlap=stabilizer_max_overlap(m),
        singular_values=tuple(float(s) for s in m.singular_values),
    )
    tol = 1e-9
    if not (trace <= upper + tol and upper <= m.n * trace + tol):
        raise AssertionError("bound ordering violated; overlap matrix is inconsistent")
    return report


@dataclass(frozen=True)
class GapRow:
    n: int
    determinant: float
    mean_overlap: float
    trace_distance: float
    w1_upper_over_n: float


def _gap_pair(n: int, eps_rule) -> tuple[OrthonormalFamily, OrthonormalFamily]:
    """Families psi_i = e_i and phi_i tilted toward a fresh direction e_{n+i}."""
    space = GroundSpace.uniform(2 * n)
    basis = np.eye(2 * n) * math.sqrt(2 * n)  # indicators scaled to unit norm
    eps = np.array([eps_rule(i) for i in range(1, n + 1)], dtype=float)
    first = basis[:n]
    tilt = (1.0 - eps)[:, None] * basis[:n] \
        + np.sqrt(1.0 - (1.0 - eps) ** 2)[:, None] * basis[n:]
    fam_a = OrthonormalFamily(space, first)
    fam_b = orthonormalize(tilt, space)  # renormalizes to machine precision
    return fam_a, fam_b


def example_gap_table(n_max: int, eps_rule=None) -> list[GapRow]:
    """Rows (n, det, mean overlap, trace distance, w1_upper / n) for tilted pairs.

    With the default rule eps_i = 2**-i the determinant tends to a positive
    constant near 0.289 while the mean overlap tends to one, so the trace
    distance saturates and the transport bound per point stays small.
    """
    if eps_rule is None:
        eps_rule = lambda i: 2.0 ** (-i)
    rows = []
    for n in range(1, n_max + 1):
        fam_a, fam_b = _gap_pair(n, eps_rule)
        m = overlap_matrix(fam_a, fam_b)
        rows.append(GapRow(
            n=n,
            determinant=float(overlap_determinant(m).real),
            mean_overlap=stabilizer_max_overlap(m),
            trace_distance=trace_distance_slater(m),
            w1_upper_over_n=w1_upper_slater(m) / n,
        ))
    return rows
