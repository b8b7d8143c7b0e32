"""Selection of follower root SCCs to pin with a limited number of control edges.

The follower subgraph is condensed; its root SCCs ``r_j`` are the candidates
for a control edge and every non-root SCC ``gamma_i`` counts as guaranteed
once *all* roots upstream of it are pinned. Maximising the guaranteed mass
under a budget of ``d`` roots is a 0/1 program; here it is solved exactly by
branch and bound over root subsets and also exported in LP format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .condense import Condensation, classic_condensation, reach
from .errors import BudgetExceedsRoots, InvariantError, NoLeaders
from .graph import SignedGraph

__all__ = [
    "PlacementInstance",
    "PlacementSolution",
    "follower_reduction",
    "solve_placement",
    "guaranteed_set",
    "export_ilp",
    "check_assignment",
]


@dataclass(frozen=True)
class PlacementInstance:
    """Reduced root/non-root graph with ILP data.

    Roots and retained non-roots are indexed from 0 here; exported variable
    names are 1-based (``y_1_pi`` is the first root).
    """

    d: int
    root_members: tuple[tuple[int, ...], ...]
    gamma_members: tuple[tuple[int, ...], ...]
    gamma_upstream: tuple[tuple[int, ...], ...]
    excluded_members: tuple[tuple[int, ...], ...] = ()

    @property
    def n_roots(self) -> int:
        return len(self.root_members)

    @cached_property
    def root_sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.root_members)

    @cached_property
    def gamma_sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.gamma_members)

    @cached_property
    def k_in(self) -> tuple[int, ...]:
        return tuple(len(u) for u in self.gamma_upstream)

    @cached_property
    def k_out(self) -> tuple[int, ...]:
        out = [0] * self.n_roots
        for up in self.gamma_upstream:
            for j in up:
                out[j] += 1
        return tuple(out)

    @cached_property
    def edge_vars(self) -> tuple[tuple[int, int], ...]:
        """``(i, j)`` for every gamma ``i`` downstream of root ``j``."""
        return tuple((i, j) for i, up in enumerate(self.gamma_upstream) for j in up)

    def w_gamma(self, i: int) -> int:
        return self.gamma_sizes[i]

    def w_root(self, j: int) -> int:
        return self.root_sizes[j]


@dataclass(frozen=True)
class PlacementSolution:
    instance: PlacementInstance
    selected: tuple[int, ...]
    covered: tuple[int, ...]
    phi: tuple[int, ...]
    objective: int
    y_root: tuple[int, ...]
    y_edge: dict

    def control_targets(self) -> list[tuple[int, ...]]:
        """Member lists of the selected roots."""
        return [self.instance.root_members[j] for j in self.selected]

    def to_dict(self) -> dict:
        inst = self.instance
        return {
            "d": inst.d,
            "selected_roots": [j + 1 for j in self.selected],
            "selected_root_members": [list(inst.root_members[j]) for j in self.selected],
            "phi": list(self.phi),
            "objective": self.objective,
            "n_roots": inst.n_roots,
            "n_gamma": len(inst.gamma_members),
            "n_excluded": len(inst.excluded_members),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def follower_reduction(g: SignedGraph, d: int, cond: Condensation | None = None
                       ) -> PlacementInstance:
    """Build the reduced instance from the condensation of the follower subgraph.

    Non-roots with more than ``d`` roots upstream can never be guaranteed and
    are dropped (kept in ``excluded_members`` for reporting).
    """
    if d < 1:
        raise ValueError(f"budget d must be >= 1, got {d}")
    cond = classic_condensation(g, g.followers) if cond is None else cond
    rch = reach(cond)
    roots = cond.roots
    if d > len(roots):
        raise BudgetExceedsRoots(d, len(roots))
    root_index = {k: j for j, k in enumerate(roots)}
    gammas, ups, excluded = [], [], []
    for k in range(len(roots), len(cond)):
        up = tuple(sorted(root_index[r] for r in rch.upstream_roots(k)))
        if len(up) <= d:
            gammas.append(cond.members[k])
            ups.append(up)
        else:
            excluded.append(cond.members[k])
    return PlacementInstance(
        d=d,
        root_members=tuple(cond.members[k] for k in roots),
        gamma_members=tuple(gammas),
        gamma_upstream=tuple(ups),
        excluded_members=tuple(excluded),
    )


def _masks(inst):
    return [sum(1 << j for j in up) for up in inst.gamma_upstream]


def _covered_mass(inst, masks, chosen):
    return sum(w for w, m in zip(inst.gamma_sizes, masks) if m & ~chosen == 0)


def solve_placement(inst: PlacementInstance) -> PlacementSolution:
    """Exact optimum; ties go to the lexicographically smallest root set.

    Depth-first search includes root ``j`` before excluding it, so complete
    subsets are met in lexicographic order and only strict improvements are
    kept. A branch is cut when its bound (chosen root mass + heaviest
    remaining roots that still fit + every gamma that could still be
    covered) cannot beat the incumbent.
    """
    R, d = inst.n_roots, inst.d
    if not 1 <= d <= R:
        raise InvariantError(f"infeasible instance: d={d}, R={R}")
    rw = inst.root_sizes
    gw = inst.gamma_sizes
    masks = _masks(inst)
    full = (1 << R) - 1
    best_val, best_mask = -1, 0

    def bound(j, chosen, mass, left):
        rest = sorted(rw[j:], reverse=True)[:left]
        avail = chosen | (full & ~((1 << j) - 1))
        extra = 0
        for w, m in zip(gw, masks):
            need = m & ~chosen
            if need & ~avail == 0 and bin(need).count("1") <= left:
                extra += w
        return mass + sum(rest) + extra

    def dfs(j, chosen, mass, left):
        nonlocal best_val, best_mask
        if left == 0:
            val = mass + _covered_mass(inst, masks, chosen)
            if val > best_val:
                best_val, best_mask = val, chosen
            return
        if R - j < left or bound(j, chosen, mass, left) <= best_val:
            return
        dfs(j + 1, chosen | (1 << j), mass + rw[j], left - 1)
        dfs(j + 1, chosen, mass, left)

    dfs(0, 0, 0, d)
    return _solution(inst, best_mask)


def _solution(inst: PlacementInstance, chosen: int) -> PlacementSolution:
    selected = tuple(j for j in range(inst.n_roots) if chosen >> j & 1)
    y_root = tuple(int(chosen >> j & 1) for j in range(inst.n_roots))
    y_edge = {e: 0 for e in inst.edge_vars}
    covered = []
    for i, (up, m) in enumerate(zip(inst.gamma_upstream, _masks(inst))):
        if m & ~chosen == 0:
            covered.append(i)
            y_edge[(i, up[0])] = 1
    phi = sorted(
        [v for j in selected for v in inst.root_members[j]]
        + [v for i in covered for v in inst.gamma_members[i]])
    objective = sum(inst.root_sizes[j] for j in selected) + sum(
        inst.gamma_sizes[i] for i in covered)
    sol = PlacementSolution(inst, selected, tuple(covered), tuple(phi), objective, y_root, y_edge)
    check_assignment(sol)
    return sol


def check_assignment(sol: PlacementSolution) -> None:
    """Raise :class:`InvariantError` unless ``y`` satisfies every ILP constraint."""
    inst, yr, ye = sol.instance, sol.y_root, sol.y_edge
    if sum(yr) != inst.d:
        raise InvariantError("budget constraint violated")
    if any(v not in (0, 1) for v in list(yr) + list(ye.values())):
        raise InvariantError("non-binary assignment")
    for j in range(inst.n_roots):
        if sum(v for (_, jj), v in ye.items() if jj == j) > inst.k_out[j] * yr[j]:
            raise InvariantError(f"root {j} feeds a gamma without being selected")
    for i, up in enumerate(inst.gamma_upstream):
        lhs = inst.k_in[i] * sum(ye[(i, j)] for j in up)
        if lhs > sum(yr[j] for j in up):
            raise InvariantError(f"gamma {i} counted without all upstream roots selected")
        if sum(ye[(i, j)] for j in up) > 1:
            raise InvariantError(f"gamma {i} counted twice")
    obj = sum(inst.w_gamma(i) * v for (i, _), v in ye.items()) + sum(
        inst.w_root(j) * v for j, v in enumerate(yr))
    if obj != sol.objective or obj != len(sol.phi):
        raise InvariantError(f"objective {sol.objective} disagrees with assignment value {obj}")


def guaranteed_set(g: SignedGraph, controlled: Iterable[int] = ()) -> frozenset[int]:
    """Followers contained for *every* initial state once ``controlled`` are pinned.

    A virtual positive edge from a leader is added to each controlled node;
    an SCC is then guaranteed iff every root SCC upstream of it is a leader.
    """
    controlled = sorted(set(controlled))
    if controlled:
        if not g.leaders:
            raise NoLeaders("cannot control nodes of a graph without leaders")
        lead = set(g.leaders)
        pinned = {d for s, d, _ in g.edges if s in lead and s != d}
        extra = [(g.leaders[0], v, 1) for v in controlled if v not in pinned]
        g = g.with_edges(extra)
    cond = classic_condensation(g)
    rch = reach(cond)
    lead = set(g.leaders)
    leader_scc = {cond.label[c] for c in lead}
    phi = set()
    for k, mem in enumerate(cond.members):
        if k in leader_scc:
            continue
        if all(r in leader_scc for r in rch.upstream_roots(k)):
            phi.update(mem)
    return frozenset(phi)


def _terms(pairs, per_line=8):
    """Format ``[(coef, name)]`` as an LP linear expression, wrapped."""
    chunks = []
    for k, (c, name) in enumerate(pairs):
        sign = "-" if c < 0 else "+"
        c = abs(c)
        body = name if c == 1 else f"{c} {name}"
        chunks.append(body if k == 0 and sign == "+" else f"{sign} {body}")
    lines = [" ".join(chunks[i:i + per_line]) for i in range(0, len(chunks), per_line)]
    return "\n   ".join(lines)


def export_ilp(inst: PlacementInstance) -> str:
    """CPLEX-LP text of the placement program (maximisation, binary vars)."""

    def y(i, j):
        return f"y_{i + 1}_{j + 1}"

    def yp(j):
        return f"y_{j + 1}_pi"

    obj = [(inst.w_gamma(i), y(i, j)) for i, j in inst.edge_vars]
    obj += [(inst.w_root(j), yp(j)) for j in range(inst.n_roots)]
    out = [
        "Maximize",
        " obj: " + _terms(obj),
        "Subject To",
        " budget: " + _terms([(1, yp(j)) for j in range(inst.n_roots)]) + f" = {inst.d}",
    ]
    for j in range(inst.n_roots):
        feeds = [(1, y(i, jj)) for i, jj in inst.edge_vars if jj == j]
        if feeds:
            out.append(f" out_{j + 1}: " + _terms(feeds + [(-inst.k_out[j], yp(j))]) + " <= 0")
    for i, up in enumerate(inst.gamma_upstream):
        lhs = [(inst.k_in[i], y(i, j)) for j in up] + [(-1, yp(j)) for j in up]
        out.append(f" in_{i + 1}: " + _terms(lhs) + " <= 0")
    out.append("Binary")
    names = [y(i, j) for i, j in inst.edge_vars] + [yp(j) for j in range(inst.n_roots)]
    out += [" " + n for n in names]
    out.append("End")
    return "\n".join(out) + "\n"
