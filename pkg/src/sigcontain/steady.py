"""Exact asymptotic states of the signed consensus dynamics ``x(k+1) = A x(k)``.

Root SCCs are solved in closed form (consensus, bipartite consensus or decay
to zero, by balance type); every other SCC is obtained from its upstream
limits through one linear solve ``(I - A_ss) x_s = A_s,up x_up``, processing
SCCs in level order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .condense import Analysis, SccClass
from .errors import InvariantError, NumericalError
from .graph import SignedGraph

__all__ = [
    "TOLERANCES",
    "RsccLimit",
    "SteadyStateSolution",
    "left_perron",
    "root_limits",
    "steady_state",
    "steady_state_all",
    "contained_set",
]

TOLERANCES = {
    "perron_residual": 1e-12,
    "fixed_point_residual": 1e-9,
    "containment": 1e-9,
    "direct_solve_max": 2000,
    "power_max_iters": 1_000_000,
}


def left_perron(M, tol: float | None = None, max_iters: int | None = None) -> np.ndarray:
    """Left eigenvector for eigenvalue 1 of an irreducible row-stochastic block.

    Returned vector is nonnegative and sums to one. Blocks up to
    ``TOLERANCES["direct_solve_max"]`` nodes use a direct linear solve with a
    normalisation row; larger ones use power iteration.
    """
    tol = TOLERANCES["perron_residual"] if tol is None else tol
    M = np.asarray(M, dtype=float)
    m = M.shape[0]
    if M.shape != (m, m) or m == 0:
        raise ValueError(f"expected a nonempty square block, got shape {M.shape}")
    if m <= TOLERANCES["direct_solve_max"]:
        B = M.T - np.eye(m)
        B[-1, :] = 1.0
        rhs = np.zeros(m)
        rhs[-1] = 1.0
        try:
            xi = np.linalg.solve(B, rhs)
        except np.linalg.LinAlgError:
            xi = np.full(m, 1.0 / m)
        xi = np.clip(xi, 0.0, None)
        xi /= xi.sum()
    else:
        xi = np.full(m, 1.0 / m)
    residual = np.abs(xi @ M - xi).max()
    it, cap = 0, TOLERANCES["power_max_iters"] if max_iters is None else max_iters
    # the self-loops make the block aperiodic, so this converges
    while residual > tol and it < cap:
        xi = xi @ M
        xi /= xi.sum()
        residual = np.abs(xi @ M - xi).max()
        it += 1
    if residual > tol:
        raise NumericalError(f"left Perron vector did not converge: residual {residual:.3e}")
    return xi


@dataclass(frozen=True)
class RsccLimit:
    """Limit of one root SCC: ``consensus``, ``bipartite`` or ``zero``.

    For ``bipartite`` the node limits are ``gauge[i] * alpha``.
    """

    scc: int
    kind: str
    alpha: float
    gauge: dict | None = None

    def value(self, i: int) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "bipartite":
            return self.gauge[i] * self.alpha
        return self.alpha


def _block(A, rows, cols=None) -> np.ndarray:
    cols = rows if cols is None else cols
    return A[rows][:, cols].toarray() if hasattr(A, "tocsr") else np.asarray(A)[np.ix_(rows, cols)]


def root_limits(A, classes: Sequence[SccClass], x0, scc_ids: Sequence[int] | None = None
                ) -> list[RsccLimit]:
    """Closed-form limits of root SCCs.

    type 1: ``alpha = xi . x0`` with ``xi`` the left Perron vector of the block;
    type 2: the gauge ``D`` makes ``D A D`` nonnegative, ``alpha = xi . D x0``
    and node ``i`` tends to ``s_i alpha``; type 3: every node tends to zero.
    """
    x0 = np.asarray(x0, dtype=float)
    scc_ids = range(len(classes)) if scc_ids is None else scc_ids
    out = []
    for k, cls in zip(scc_ids, classes):
        mem = list(cls.members)
        if cls.type == 1:
            M = _block(A, mem)
            if M.min() < 0:
                raise InvariantError(f"type-1 SCC {k} has a negative weight")
            xi = left_perron(M)
            out.append(RsccLimit(k, "consensus", float(xi @ x0[mem])))
        elif cls.type == 2:
            s = np.array([cls.gauge[i] for i in mem], dtype=float)
            M = s[:, None] * _block(A, mem) * s[None, :]
            if M.min() < 0:
                raise InvariantError(f"type-2 SCC {k}: gauge does not remove negative weights")
            xi = left_perron(M)
            out.append(RsccLimit(k, "bipartite", float(xi @ (s * x0[mem])), dict(cls.gauge)))
        elif cls.type == 3:
            if cls.antibalanced:
                raise NumericalError(
                    f"root SCC {k} is antibalanced (eigenvalue -1); its states oscillate forever")
            out.append(RsccLimit(k, "zero", 0.0))
        else:
            raise InvariantError(f"unknown SCC type {cls.type}")
    return out


@dataclass(frozen=True)
class SteadyStateSolution:
    xbar: np.ndarray
    limits: tuple[RsccLimit, ...]
    residual: float
    scc_of: tuple[int, ...]
    scc_type: tuple[int, ...]
    leaders: tuple[int, ...]
    x0: np.ndarray

    @property
    def bound(self) -> float:
        return float(np.abs(self.x0[list(self.leaders)]).max()) if self.leaders else 0.0

    def to_csv(self, contained=None) -> str:
        contained = set(contained_set(self) if contained is None else contained)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "scc", "type", "xbar", "contained"])
        for i, v in enumerate(self.xbar):
            k = self.scc_of[i]
            w.writerow([i, k, self.scc_type[k], repr(float(v)), int(i in contained)])
        return buf.getvalue()

    def to_dict(self, contained=None) -> dict:
        contained = contained_set(self) if contained is None else contained
        return {
            "xbar": [float(v) for v in self.xbar],
            "residual": self.residual,
            "bound": self.bound,
            "contained": sorted(contained),
            "n_contained": len(contained),
            "root_limits": [
                {"scc": r.scc, "kind": r.kind, "alpha": r.alpha} for r in self.limits
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def steady_state(g: SignedGraph | Analysis, x0, residual_tol: float | None = None
                 ) -> SteadyStateSolution:
    """Limit of ``x(k)`` for every node, computed level by level."""
    an = g if isinstance(g, Analysis) else Analysis(g)
    g = an.graph
    residual_tol = TOLERANCES["fixed_point_residual"] if residual_tol is None else residual_tol
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (g.n,):
        raise ValueError(f"x0 must have length {g.n}, got shape {x0.shape}")
    A = an.A
    cond, classes = an.classic, an.classes

    roots = cond.roots
    limits = root_limits(A, [classes[k] for k in roots], x0, roots)
    xbar = np.zeros(g.n)
    for lim in limits:
        for i in cond.members[lim.scc]:
            xbar[i] = lim.value(i)
    for c in g.leaders:  # exact, not up to a Perron solve
        xbar[c] = x0[c]

    for k in range(len(roots), len(cond)):  # supernode order is topological
        mem = list(cond.members[k])
        rhs = A[mem] @ xbar  # entries of this SCC are still zero
        M = np.eye(len(mem)) - _block(A, mem)
        try:
            xbar[mem] = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            raise InvariantError(f"I - A_ss singular for non-root SCC {k}") from None

    residual = float(np.abs(xbar - A @ xbar).max()) if g.n else 0.0
    if residual > residual_tol:
        raise NumericalError(f"fixed-point residual {residual:.3e} exceeds {residual_tol:.1e}")
    return SteadyStateSolution(
        xbar=xbar,
        limits=tuple(limits),
        residual=residual,
        scc_of=cond.label,
        scc_type=tuple(c.type for c in classes),
        leaders=g.leaders,
        x0=x0,
    )


steady_state_all = steady_state


def contained_set(sol: SteadyStateSolution, leaders: Sequence[int] | None = None, x0=None,
                  tol: float | None = None) -> frozenset[int]:
    """Followers whose limit magnitude stays within the largest leader magnitude."""
    tol = TOLERANCES["containment"] if tol is None else tol
    leaders = sol.leaders if leaders is None else tuple(leaders)
    x0 = sol.x0 if x0 is None else np.asarray(x0, dtype=float)
    if not leaders:
        return frozenset()
    bound = np.abs(x0[list(leaders)]).max()
    lead = set(leaders)
    return frozenset(
        i for i, v in enumerate(sol.xbar) if i not in lead and abs(v) <= bound + tol)
