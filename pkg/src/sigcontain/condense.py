"""Strongly connected components, condensations, level decomposition and
balance classification of signed digraphs.

Three condensations of a signed graph are built here:

* ``classic``  -- supernodes are the SCCs of the graph itself;
* ``enlarged`` -- supernodes are the SCCs of the ``2n``-node lifted graph;
* ``signed``   -- original nodes grouped by the enlarged SCC they fall in.

Supernodes of every :class:`Condensation` are numbered in (level, rank) order,
rank being the position inside the level by smallest member id, so supernode
index order is also a topological order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvariantError, NotAcyclic
from .graph import SignedGraph, build_adjacency

__all__ = [
    "Partition",
    "Condensation",
    "SccClass",
    "Reach",
    "Association",
    "Analysis",
    "scc",
    "condense",
    "classic_condensation",
    "enlarged_condensation",
    "signed_condensation",
    "classify_scc",
    "reach",
    "associate",
    "analyze",
    "condensation_to_dict",
    "condensation_to_dot",
]


@dataclass(frozen=True)
class Partition:
    labels: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.members)


def scc(n: int, succ: Sequence[Iterable[int]]) -> Partition:
    """Tarjan's algorithm, iterative.

    Components are numbered in the order Tarjan completes them, which is a
    reverse topological order of the condensation (sinks first). Node visiting
    order is ``0..n-1`` and follows ``succ`` order, so numbering is
    deterministic.
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    labels = [-1] * n
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = 0
    succ = [list(s) for s in succ]

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            nbrs = succ[v]
            if pos < len(nbrs):
                work[-1] = (v, pos + 1)
                w = nbrs[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    labels[w] = len(comps)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
    return Partition(tuple(labels), tuple(comps))


@dataclass(frozen=True)
class Condensation:
    """DAG of supernodes with level decomposition.

    ``members[k]`` lists the original nodes of supernode ``k``; ``label[i]`` is
    the supernode of original node ``i`` (``-1`` for nodes outside the
    condensed node set). ``level`` is 1-based, ``rank`` 1-based within a level.
    """

    kind: str
    members: tuple[tuple[int, ...], ...]
    label: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    level: tuple[int, ...]
    rank: tuple[int, ...]

    def __len__(self):
        return len(self.members)

    @cached_property
    def preds(self) -> tuple[tuple[int, ...], ...]:
        p = [[] for _ in self.members]
        for u, v in self.edges:
            p[v].append(u)
        return tuple(tuple(x) for x in p)

    @cached_property
    def succs(self) -> tuple[tuple[int, ...], ...]:
        s = [[] for _ in self.members]
        for u, v in self.edges:
            s[u].append(v)
        return tuple(tuple(x) for x in s)

    @property
    def n_levels(self) -> int:
        return max(self.level, default=0)

    def level_counts(self) -> list[int]:
        counts = [0] * self.n_levels
        for lv in self.level:
            counts[lv - 1] += 1
        return counts

    def at_level(self, lv: int) -> list[int]:
        return [k for k, x in enumerate(self.level) if x == lv]

    @property
    def roots(self) -> list[int]:
        return self.at_level(1)

    def index_of(self, a: int, b: int) -> int:
        """Supernode with level ``a`` and in-level rank ``b``."""
        for k, (lv, rk) in enumerate(zip(self.level, self.rank)):
            if lv == a and rk == b:
                return k
        raise KeyError((a, b))


def _assemble(kind, groups, superedges, n_nodes) -> Condensation:
    """Level-decompose a DAG given as node groups + group-level edges."""
    m = len(groups)
    preds = [set() for _ in range(m)]
    succs = [set() for _ in range(m)]
    for u, v in superedges:
        if u != v:
            preds[v].add(u)
            succs[u].add(v)
    indeg = [len(p) for p in preds]
    level = [1] * m
    queue = [k for k in range(m) if indeg[k] == 0]
    done = 0
    while queue:
        u = queue.pop()
        done += 1
        for v in succs[u]:
            level[v] = max(level[v], level[u] + 1)
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if done != m:
        raise NotAcyclic(f"{kind} condensation has a cycle among supernodes")

    groups = [tuple(sorted(g)) for g in groups]
    order = sorted(range(m), key=lambda k: (level[k], groups[k][0]))
    new_id = {old: new for new, old in enumerate(order)}
    members = tuple(groups[k] for k in order)
    levels = tuple(level[k] for k in order)
    ranks, last, r = [], None, 0
    for lv in levels:
        r = r + 1 if lv == last else 1
        last = lv
        ranks.append(r)
    label = [-1] * n_nodes
    for k, grp in enumerate(members):
        for i in grp:
            label[i] = k
    edges = sorted({(new_id[u], new_id[v]) for u in range(m) for v in succs[u]})
    return Condensation(kind, members, tuple(label), tuple(edges), levels, tuple(ranks))


def condense(n: int, succ: Sequence[Iterable[int]], f: Sequence[int], kind: str = "classic",
             nodes: Iterable[int] | None = None) -> Condensation:
    """Condensation of a digraph induced by the condensing map ``f``.

    ``f[i]`` is the (arbitrary integer) group label of node ``i``; only
    ``nodes`` (default: all) are condensed and only edges between them count.
    Raises :class:`NotAcyclic` if the induced supergraph has a cycle.
    """
    nodes = range(n) if nodes is None else sorted(nodes)
    keep = set(nodes)
    gid: dict[int, int] = {}
    groups: list[list[int]] = []
    for i in nodes:
        k = gid.setdefault(f[i], len(groups))
        if k == len(groups):
            groups.append([])
        groups[k].append(i)
    superedges = set()
    for t in nodes:
        for u in succ[t]:
            if u in keep and f[t] != f[u]:
                superedges.add((gid[f[t]], gid[f[u]]))
    return _assemble(kind, groups, superedges, n)


def _induced_scc(n, succ, nodes):
    nodes = sorted(nodes)
    local = {v: k for k, v in enumerate(nodes)}
    lsucc = [[local[w] for w in succ[v] if w in local] for v in nodes]
    part = scc(len(nodes), lsucc)
    f = [-1] * n
    for v, k in local.items():
        f[v] = part.labels[k]
    return f


def classic_condensation(g: SignedGraph, nodes: Iterable[int] | None = None) -> Condensation:
    """Condensation by SCCs of ``g`` (or of its subgraph induced by ``nodes``)."""
    if nodes is None:
        f = scc(g.n, g.successors).labels
        return condense(g.n, g.successors, f, "classic")
    nodes = sorted(nodes)
    f = _induced_scc(g.n, g.successors, nodes)
    return condense(g.n, g.successors, f, "classic", nodes)


def _enlarged_successors(g: SignedGraph) -> list[list[int]]:
    n = g.n
    succ = [[] for _ in range(2 * n)]
    for s, d, w in g.edges:
        if s == d and w > 0:
            continue
        if w > 0:
            succ[s].append(d)
            succ[s + n].append(d + n)
        else:
            succ[s].append(d + n)
            succ[s + n].append(d)
    return succ


def enlarged_condensation(g: SignedGraph) -> Condensation:
    """Classic condensation of the lifted graph; node ``i + n`` mirrors ``i``."""
    succ = _enlarged_successors(g)
    f = scc(2 * g.n, succ).labels
    return condense(2 * g.n, succ, f, "enlarged")


@dataclass(frozen=True)
class SccClass:
    """Balance class of one classic SCC.

    ``parts`` has two entries for type 2 (positive-gauge part first) and one
    otherwise. ``gauge`` maps node -> +1/-1 for types 1 and 2, is empty for
    type 3. ``antibalanced`` flags a type-3 SCC whose matrix is similar to
    ``-|A|``; such a root oscillates forever.
    """

    members: tuple[int, ...]
    type: int
    parts: tuple[tuple[int, ...], ...]
    gauge: dict = field(default_factory=dict, compare=False)
    antibalanced: bool = False

    def sign(self, i: int) -> int:
        return self.gauge[i]


def _internal_edges(g: SignedGraph, members):
    inside = set(members)
    return [(s, d, w) for s, d, w in g.edges if s in inside and d in inside]


def _two_color(members, edges, flip=False):
    """Gauge signs making every edge weight nonnegative, or None."""
    adj = {i: [] for i in members}
    for s, d, w in edges:
        w = -w if flip else w
        adj[s].append((d, w))
        adj[d].append((s, w))
    color = {}
    for start in members:
        if start in color:
            continue
        color[start] = 1
        stack = [start]
        while stack:
            v = stack.pop()
            for u, w in adj[v]:
                want = color[v] * w
                if u not in color:
                    color[u] = want
                    stack.append(u)
                elif color[u] != want:
                    return None
    return color


def classify_scc(g: SignedGraph, members: Iterable[int]) -> SccClass:
    """Type 1/2/3 classification of a classic SCC via its lifted subgraph.

    A component with a negative internal edge is balanced exactly when its
    lifted subgraph splits into two SCCs, and unbalanced when the lift is
    strongly connected.
    """
    members = tuple(sorted(members))
    edges = _internal_edges(g, members)
    if all(w > 0 for _, _, w in edges):
        return SccClass(members, 1, (members,), {i: 1 for i in members})
    m = len(members)
    local = {v: k for k, v in enumerate(members)}
    succ = [[] for _ in range(2 * m)]
    for s, d, w in edges:
        a, b = local[s], local[d]
        if w > 0:
            succ[a].append(b)
            succ[a + m].append(b + m)
        else:
            succ[a].append(b + m)
            succ[a + m].append(b)
    part = scc(2 * m, succ)
    if len(part) == 2:
        anchor = part.labels[0]
        gauge = {v: (1 if part.labels[local[v]] == anchor else -1) for v in members}
        plus = tuple(v for v in members if gauge[v] > 0)
        minus = tuple(v for v in members if gauge[v] < 0)
        return SccClass(members, 2, (plus, minus), gauge)
    if len(part) == 1:
        anti = _two_color(members, edges, flip=True) is not None
        return SccClass(members, 3, (members,), {}, anti)
    raise InvariantError(
        f"lifted subgraph of SCC starting at node {members[0]} has {len(part)} components")


def signed_condensation(g: SignedGraph, classic: Condensation | None = None,
                        classes: Sequence[SccClass] | None = None) -> Condensation:
    """Condensation induced by grouping nodes by their enlarged-graph SCC.

    Superedges are the projections of the enlarged condensation's edges:
    a lifted edge leaving node ``t`` (or its mirror) lands in the group of
    ``t``'s counterpart part. Edges internal to a classic SCC never project
    to superedges, which keeps the result acyclic and level-aligned with the
    classic condensation.
    """
    n = g.n
    classic = classic if classic is not None else classic_condensation(g)
    if classes is None:
        classes = [classify_scc(g, mem) for mem in classic.members]
    esucc = _enlarged_successors(g)
    elabel = scc(2 * n, esucc).labels
    fs = list(elabel[:n])

    # consistency of per-SCC classification with the global lift
    for cls in classes:
        groups = {fs[i] for i in cls.members}
        if len(groups) != len(cls.parts) or any(
                len({fs[i] for i in p}) != 1 for p in cls.parts):
            raise InvariantError(
                f"SCC at node {cls.members[0]}: type-{cls.type} parts disagree with global lift")

    partner = {fs[i]: fs[i] for i in range(n)}
    for cls in classes:
        if cls.type == 2:
            a, b = fs[cls.parts[0][0]], fs[cls.parts[1][0]]
            partner[a], partner[b] = b, a
    cl = classic.label
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(fs[i], []).append(i)
    keys = list(groups)
    gid = {k: j for j, k in enumerate(keys)}
    superedges = set()
    for s, d, w in g.edges:
        if cl[s] == cl[d]:
            continue
        if w > 0:
            pairs = ((fs[s], fs[d]), (partner[fs[s]], partner[fs[d]]))
        else:
            pairs = ((fs[s], partner[fs[d]]), (partner[fs[s]], fs[d]))
        for u, v in pairs:
            superedges.add((gid[u], gid[v]))
    return _assemble("signed", [groups[k] for k in keys], superedges, n)


@dataclass(frozen=True)
class Reach:
    """Inclusive upstream/downstream supernode sets of a condensation."""

    cond: Condensation
    upstream: tuple[frozenset, ...]
    downstream: tuple[frozenset, ...]

    def J(self, v: int, lv: int) -> list[int]:
        """Upstream supernodes of ``v`` sitting at level ``lv``."""
        return sorted(u for u in self.upstream[v] if self.cond.level[u] == lv)

    def delta(self, v: int, lv: int) -> int:
        return len(self.J(v, lv))

    def J_by_type(self, v: int, lv: int, classes: Sequence[SccClass]) -> dict[int, list[int]]:
        out = {1: [], 2: [], 3: []}
        for u in self.J(v, lv):
            out[classes[u].type].append(u)
        return out

    def upstream_roots(self, v: int) -> list[int]:
        return self.J(v, 1)


def reach(cond: Condensation) -> Reach:
    m = len(cond)
    up: list[frozenset] = [frozenset()] * m
    for v in range(m):  # index order is topological
        acc = {v}
        for p in cond.preds[v]:
            acc |= up[p]
        up[v] = frozenset(acc)
    down: list[set] = [{v} for v in range(m)]
    for v in reversed(range(m)):
        for s in cond.succs[v]:
            down[v] |= down[s]
    return Reach(cond, tuple(up), tuple(frozenset(d) for d in down))


@dataclass(frozen=True)
class Association:
    classic: int
    level: int
    type: int
    signed: tuple[int, ...]
    enlarged: tuple[int, ...]


def associate(g: SignedGraph, classic: Condensation, signed: Condensation,
              enlarged: Condensation, classes: Sequence[SccClass]) -> list[Association]:
    """Map each classic supernode to its signed and enlarged counterparts.

    Signed supernodes are listed positive-gauge part first; enlarged ones as
    (component holding the first signed part's originals, its mirror image).
    Raises :class:`InvariantError` on any level disagreement.
    """
    n = g.n
    if not (classic.n_levels == signed.n_levels == enlarged.n_levels):
        raise InvariantError(
            f"level counts differ: classic={classic.n_levels} signed={signed.n_levels} "
            f"enlarged={enlarged.n_levels}")
    out = []
    for k, cls in enumerate(classes):
        sig = tuple(dict.fromkeys(signed.label[p[0]] for p in cls.parts))
        first = cls.parts[0][0]
        enl = tuple(dict.fromkeys((enlarged.label[first], enlarged.label[first + n])))
        covered = set().union(*(signed.members[s] for s in sig))
        if covered != set(cls.members):
            raise InvariantError(f"classic supernode {k} is not the union of its signed parts")
        lv = classic.level[k]
        if any(signed.level[s] != lv for s in sig) or any(enlarged.level[e] != lv for e in enl):
            raise InvariantError(f"classic supernode {k}: counterpart levels differ from {lv}")
        out.append(Association(k, lv, cls.type, sig, enl))
    return out


class Analysis:
    """Lazily computed structural view of one signed graph."""

    def __init__(self, g: SignedGraph):
        self.graph = g

    @cached_property
    def A(self):
        return build_adjacency(self.graph)

    @cached_property
    def classic(self) -> Condensation:
        return classic_condensation(self.graph)

    @cached_property
    def classes(self) -> list[SccClass]:
        return [classify_scc(self.graph, mem) for mem in self.classic.members]

    @cached_property
    def reach(self) -> Reach:
        return reach(self.classic)

    @cached_property
    def enlarged(self) -> Condensation:
        return enlarged_condensation(self.graph)

    @cached_property
    def signed(self) -> Condensation:
        return signed_condensation(self.graph, self.classic, self.classes)

    @cached_property
    def associations(self) -> list[Association]:
        return associate(self.graph, self.classic, self.signed, self.enlarged, self.classes)


def analyze(g: SignedGraph) -> Analysis:
    return Analysis(g)


def condensation_to_dict(cond: Condensation, classes: Sequence[SccClass] | None = None) -> dict:
    nodes = []
    for k, mem in enumerate(cond.members):
        rec = {"id": k, "level": cond.level[k], "rank": cond.rank[k], "members": list(mem)}
        if classes is not None:
            rec["type"] = classes[k].type
        nodes.append(rec)
    return {
        "kind": cond.kind,
        "n_levels": cond.n_levels,
        "level_counts": cond.level_counts(),
        "supernodes": nodes,
        "superedges": [list(e) for e in cond.edges],
    }


def condensation_to_dot(cond: Condensation, classes: Sequence[SccClass] | None = None) -> str:
    lines = [f"digraph {cond.kind} {{", "  rankdir=TB;"]
    for lv in range(1, cond.n_levels + 1):
        ids = " ".join(f"s{k};" for k in cond.at_level(lv))
        lines.append(f"  {{ rank=same; {ids} }}")
    for k, mem in enumerate(cond.members):
        label = f"({cond.level[k]},{cond.rank[k]}) |{len(mem)}|"
        if classes is not None:
            label += f" t{classes[k].type}"
        lines.append(f'  s{k} [label="{label}"];')
    for u, v in cond.edges:
        lines.append(f"  s{u} -> s{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


