"""Forward iteration of ``x(k+1) = A x(k)``, empirical containment and
realisation of a root selection as concrete leader -> follower edges."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import NoLeaders, NotConverged
from .graph import SignedGraph

__all__ = ["SimTrace", "run", "empirical_contained", "realize_control", "initial_state"]

DEFAULT_MAX_ITERS = 100_000
DEFAULT_CONV_TOL = 1e-12
DEFAULT_CONTAIN_TOL = 1e-6


@dataclass(frozen=True)
class SimTrace:
    steps: np.ndarray        # iteration index of each sampled row
    states: np.ndarray       # len(steps) x n
    iterations: int
    converged: bool
    final: np.ndarray
    bound: float | None      # max |x_j(0)| over leaders, None without leaders
    last_delta: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k"] + [f"x_{i}" for i in range(self.final.shape[0])])
        for k, row in zip(self.steps, self.states):
            w.writerow([int(k)] + [repr(float(v)) for v in row])
        return buf.getvalue()


def _default_stride(n: int) -> int:
    return 1 if n <= 100 else 10


def run(A, x0, leaders: Sequence[int] = (), max_iters: int = DEFAULT_MAX_ITERS,
        conv_tol: float = DEFAULT_CONV_TOL, stride: int | None = None) -> SimTrace:
    """Iterate until ``max|x(k+1) - x(k)| <= conv_tol`` or ``max_iters`` steps.

    Row 0 of the trace is ``x0``; further rows every ``stride`` steps, and the
    final state is always recorded.
    """
    A = sp.csr_matrix(A)
    x = np.array(x0, dtype=float)
    n = x.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"A is {A.shape}, x0 has length {n}")
    stride = _default_stride(n) if stride is None else stride
    if stride < 1:
        raise ValueError("stride must be >= 1")
    steps, states = [0], [x.copy()]
    converged, delta, k = False, float("inf"), 0
    while k < max_iters:
        nxt = A @ x
        delta = float(np.abs(nxt - x).max()) if n else 0.0
        x = nxt
        k += 1
        if k % stride == 0:
            steps.append(k)
            states.append(x.copy())
        if delta <= conv_tol:
            converged = True
            break
    if steps[-1] != k:
        steps.append(k)
        states.append(x.copy())
    leaders = list(leaders)
    bound = float(np.abs(np.asarray(x0, dtype=float)[leaders]).max()) if leaders else None
    return SimTrace(np.array(steps), np.array(states), k, converged, x, bound, delta)


def empirical_contained(trace: SimTrace, leaders: Iterable[int],
                        tol: float = DEFAULT_CONTAIN_TOL) -> frozenset[int]:
    """Followers whose final magnitude is within the leaders' bound."""
    if not trace.converged:
        raise NotConverged(
            f"trace stopped after {trace.iterations} iterations with delta {trace.last_delta:.3e}")
    leaders = list(leaders)
    if not leaders:
        return frozenset()
    x0 = trace.states[0]
    bound = np.abs(x0[leaders]).max()
    lead = set(leaders)
    return frozenset(
        i for i, v in enumerate(trace.final) if i not in lead and abs(v) <= bound + tol)


def realize_control(g: SignedGraph, selected_roots: Iterable[Iterable[int]], seed) -> SignedGraph:
    """Add one positive leader -> member edge per selected root SCC.

    The member and the leader are drawn uniformly with a PCG64 generator
    seeded by ``seed``; roots are processed in the given order.
    """
    if not g.leaders:
        raise NoLeaders("graph has no leaders to supply control edges")
    rng = np.random.default_rng(seed)
    existing = g.sign_of
    extra = []
    for root in selected_roots:
        members = sorted(root)
        node = members[int(rng.integers(len(members)))]
        leader = g.leaders[int(rng.integers(len(g.leaders)))]
        if (leader, node) not in existing:
            extra.append((leader, node, 1))
    return g.with_edges(extra)


def initial_state(g: SignedGraph, seed, low: float = -10.0, high: float = 10.0,
                  leader_states: Sequence[float] | None = None) -> np.ndarray:
    """Uniform random initial state; leaders optionally pinned to given values."""
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(low, high, size=g.n)
    if leader_states is not None:
        if len(leader_states) != len(g.leaders):
            raise ValueError(
                f"{len(leader_states)} leader states given for {len(g.leaders)} leaders")
        x0[list(g.leaders)] = leader_states
    return x0


def summary(trace: SimTrace, leaders: Sequence[int], phi: Iterable[int] = ()) -> dict:
    K = empirical_contained(trace, leaders) if trace.converged else None
    phi = set(phi)
    return {
        "iterations": trace.iterations,
        "converged": trace.converged,
        "bound": trace.bound,
        "contained": sorted(K) if K is not None else None,
        "n_contained": len(K) if K is not None else None,
        "phi_subset_of_K": phi <= K if K is not None else None,
    }

