"""Ergodic-chain analytics.

Builds the generalized fundamental matrix F = (I - P + 1 b^t)^-1 of an
ergodic chain and derives from it the stationary distribution
pi = b^t F, the expected first hitting time (F_jj - F_ij) / pi_j, and
the long-run fraction of time alpha_j = pi_j spent in a state. A
first-step linear system provides an independent hitting-time oracle,
and an explicit strong-connectivity/aperiodicity check guards the
ergodicity assumption.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .chain import ApproxChain

SOLVE_TOL = 1e-9
STATIONARY_TOL = 1e-9
_NORMALIZE_DRIFT = 1e-6
_PI_HARD_FLOOR = 1e-15
_PI_WARN_FLOOR = 1e-12


class NumericalError(ArithmeticError):
    """A linear solve failed or left an unacceptable residual."""


@dataclass(frozen=True)
class Residuals:
    """Numerical health indicators of one analysis."""

    row_sum: float
    stationarity: float
    solve: float


@dataclass(frozen=True)
class AnalysisResult:
    """Stationary vector, hitting time and stability of a target state."""

    pi: np.ndarray
    efht: float
    alpha: float
    residuals: Residuals


@dataclass(frozen=True)
class ErgodicityReport:
    ergodic: bool
    strongly_connected: bool
    aperiodic: bool
    num_components: int
    unreachable: list[int]

    def __bool__(self) -> bool:
        return self.ergodic


def fundamental_matrix(P: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Generalized fundamental matrix (I - P + 1 b^t)^-1.

    ``b`` may be any vector with nonzero component sum; by default the
    all-ones vector is used. Raises NumericalError when the system is
    singular or the solve residual exceeds SOLVE_TOL * dimension, which
    signals a non-ergodic chain.
    """
    P = np.asarray(P, dtype=float)
    dim = P.shape[0]
    if P.shape != (dim, dim):
        raise ValueError("P must be square")
    if b is None:
        b = np.ones(dim)
    else:
        b = np.asarray(b, dtype=float)
        if abs(b.sum()) < 1e-300:
            raise ValueError("b must have a nonzero component sum")
    A = np.eye(dim) - P + np.outer(np.ones(dim), b)
    try:
        F = np.linalg.solve(A, np.eye(dim))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular system: {exc}") from exc
    resid = float(np.abs(A @ F - np.eye(dim)).max())
    if resid > SOLVE_TOL * dim:
        raise NumericalError(f"solve residual {resid:.3e} exceeds tolerance")
    return F


def solve_residual(P: np.ndarray, F: np.ndarray, b: np.ndarray | None = None) -> float:
    dim = P.shape[0]
    if b is None:
        b = np.ones(dim)
    A = np.eye(dim) - np.asarray(P, float) + np.outer(np.ones(dim), b)
    return float(np.abs(A @ F - np.eye(dim)).max())


def stationary(F: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Stationary distribution pi = b^t F.

    Tiny floating drift of the component sum (below 1e-6) is
    renormalized; larger drift or a non-positive component raises, since
    either means the chain was not ergodic.
    """
    dim = F.shape[0]
    if b is None:
        b = np.ones(dim)
    pi = np.asarray(b, dtype=float) @ F
    drift = abs(float(pi.sum()) - 1.0)
    if drift > _NORMALIZE_DRIFT:
        raise NumericalError(f"stationary vector sums to 1 {drift:.3e} off")
    pi = pi / pi.sum()
    if float(pi.min()) <= 0.0:
        raise NumericalError("stationary vector has a non-positive component; "
                             "the chain is not ergodic")
    return pi


def stationary_gth(P: np.ndarray) -> np.ndarray:
    """Stationary distribution by Grassmann-Taksar-Heyman elimination.

    Subtraction-free, so every component comes out positive with
    componentwise relative accuracy even when it is far below the
    absolute accuracy a dense solve of pi = b^t F can reach (deep
    collision states at small epsilon have stationary mass under
    1e-13, which the fundamental-matrix route returns as noise around
    zero). Used as the production path for stationary vectors; the
    fundamental-matrix identity remains available and is cross-checked
    against this on well-scaled chains.
    """
    A = np.array(P, dtype=float)
    dim = A.shape[0]
    if A.shape != (dim, dim):
        raise ValueError("P must be square")
    for k in range(dim - 1, 0, -1):
        s = float(A[k, :k].sum())
        if s <= 0.0:
            raise NumericalError("chain is not irreducible (GTH pivot is zero)")
        A[:k, k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    pi = np.zeros(dim)
    pi[0] = 1.0
    for k in range(1, dim):
        pi[k] = float(pi[:k] @ A[:k, k])
    return pi / pi.sum()


def efht(F: np.ndarray, pi: np.ndarray, i: int, j: int) -> float:
    """Expected first hitting time of state j from state i."""
    if i == j:
        return 0.0
    pj = float(pi[j])
    if pj < _PI_HARD_FLOOR:
        raise NumericalError(f"pi[{j}] = {pj:.3e} too small to divide by")
    if pj < _PI_WARN_FLOOR:
        warnings.warn(f"pi[{j}] = {pj:.3e} is tiny; hitting time is "
                      "ill-conditioned", RuntimeWarning, stacklevel=2)
    value = (float(F[j, j]) - float(F[i, j])) / pj
    return max(value, 0.0)


def oracle_hitting_time(P: np.ndarray, i: int, j: int) -> float:
    """First-step-analysis hitting time, independent of the fundamental
    matrix: solves t_j = 0, t_k = 1 + sum_l P_kl t_l for k != j."""
    P = np.asarray(P, dtype=float)
    dim = P.shape[0]
    A = np.eye(dim) - P
    A[j, :] = 0.0
    A[j, j] = 1.0
    rhs = np.ones(dim)
    rhs[j] = 0.0
    try:
        t = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular hitting-time system: {exc}") from exc
    return float(t[i])


def _strongly_connected_components(adj: list[list[int]]) -> list[list[int]]:
    """Kosaraju's algorithm with iterative DFS."""
    dim = len(adj)
    order: list[int] = []
    seen = [False] * dim
    for start in range(dim):
        if seen[start]:
            continue
        stack: list[tuple[int, int]] = [(start, 0)]
        seen[start] = True
        while stack:
            node, ptr = stack[-1]
            if ptr < len(adj[node]):
                stack[-1] = (node, ptr + 1)
                nxt = adj[node][ptr]
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append((nxt, 0))
            else:
                order.append(node)
                stack.pop()
    radj: list[list[int]] = [[] for _ in range(dim)]
    for u in range(dim):
        for v in adj[u]:
            radj[v].append(u)
    comp = [-1] * dim
    components: list[list[int]] = []
    for start in reversed(order):
        if comp[start] != -1:
            continue
        cid = len(components)
        members = [start]
        comp[start] = cid
        todo = [start]
        while todo:
            node = todo.pop()
            for nxt in radj[node]:
                if comp[nxt] == -1:
                    comp[nxt] = cid
                    members.append(nxt)
                    todo.append(nxt)
        components.append(members)
    return components


def _period(adj: list[list[int]]) -> int:
    """gcd of cycle lengths of a strongly connected digraph."""
    dim = len(adj)
    depth = [-1] * dim
    depth[0] = 0
    queue = [0]
    g = 0
    while queue:
        nxt_queue: list[int] = []
        for u in queue:
            for v in adj[u]:
                if depth[v] == -1:
                    depth[v] = depth[u] + 1
                    nxt_queue.append(v)
                else:
                    g = math.gcd(g, depth[u] + 1 - depth[v])
        queue = nxt_queue
    return abs(g) if g else 0


def verify_ergodic(P: np.ndarray) -> ErgodicityReport:
    """Strong connectivity plus aperiodicity of the positive-entry digraph."""
    P = np.asarray(P, dtype=float)
    dim = P.shape[0]
    adj = [list(np.nonzero(P[u] > 0.0)[0]) for u in range(dim)]
    components = _strongly_connected_components(adj)
    connected = len(components) == 1
    aperiodic = connected and _period(adj) == 1
    reach = [False] * dim
    reach[0] = True
    todo = [0]
    while todo:
        u = todo.pop()
        for v in adj[u]:
            if not reach[v]:
                reach[v] = True
                todo.append(v)
    unreachable = [v for v in range(dim) if not reach[v]]
    return ErgodicityReport(
        ergodic=connected and aperiodic,
        strongly_connected=connected,
        aperiodic=aperiodic,
        num_components=len(components),
        unreachable=unreachable,
    )


def analyze(chain: ApproxChain, source: int | str, target: int | str,
            b: np.ndarray | None = None) -> AnalysisResult:
    """EFHT and stationary fraction between two states of a built chain.

    The stationary vector comes from GTH elimination so that rarely
    visited states keep positive (if tiny) mass; the hitting time uses
    the fundamental matrix.
    """
    i = chain.resolve_state(source) if isinstance(source, str) else source
    j = chain.resolve_state(target) if isinstance(target, str) else target
    P = chain.matrix
    F = fundamental_matrix(P, b)
    pi = stationary_gth(P)
    result = AnalysisResult(
        pi=pi,
        efht=efht(F, pi, i, j),
        alpha=float(pi[j]),
        residuals=Residuals(
            row_sum=chain.max_row_sum_residual(),
            stationarity=float(np.abs(pi @ P - pi).max()),
            solve=solve_residual(P, F, b),
        ),
    )
    if result.residuals.stationarity > STATIONARY_TOL:
        raise NumericalError(
            f"pi P = pi violated by {result.residuals.stationarity:.3e}")
    return result
