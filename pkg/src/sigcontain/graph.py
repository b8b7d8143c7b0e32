"""Signed directed graphs, their weight matrices and enlarged (lifted) graphs.

Edge ``(src, dst, sign)`` means *src influences dst*: it puts a nonzero entry
in row ``dst``, column ``src`` of the weight matrix, so that the dynamics are
``x(k+1) = A x(k)``.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .errors import DuplicateEdge, GraphError, GraphWarning, LeaderInEdge, ParseError

__all__ = [
    "SignedGraph",
    "WEIGHT_RULES",
    "build_adjacency",
    "enlarged_graph",
    "mirror_permutation",
    "parse_graph",
    "emit_edge_list",
    "emit_json",
    "read_graph",
]

Edge = tuple[int, int, int]


@dataclass(frozen=True)
class SignedGraph:
    """Immutable signed digraph on nodes ``0..n-1`` with a leader set.

    Edges are stored sorted by ``(src, dst)``; leaders as a sorted tuple.
    Construction validates every structural invariant and raises
    :class:`GraphError` subclasses on violation.
    """

    n: int
    edges: tuple[Edge, ...]
    leaders: tuple[int, ...] = ()

    def __post_init__(self):
        edges = tuple(sorted((int(s), int(d), int(w)) for s, d, w in self.edges))
        leaders = tuple(sorted({int(c) for c in self.leaders}))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "leaders", leaders)
        self._validate()

    def _validate(self):
        n = self.n
        if n < 0:
            raise GraphError(f"negative node count {n}")
        seen = {}
        for s, d, w in self.edges:
            if not (0 <= s < n and 0 <= d < n):
                raise GraphError(f"edge ({s},{d}) references a node outside 0..{n - 1}")
            if w not in (1, -1):
                raise GraphError(f"edge ({s},{d}) has sign {w}, expected +1 or -1")
            if (s, d) in seen:
                raise DuplicateEdge(s, d)
            seen[(s, d)] = w
        missing = [i for i in range(n) if (i, i) not in seen]
        if missing:
            raise GraphError(f"nodes without self-loop: {missing[:10]}")
        leader_set = set(self.leaders)
        for c in self.leaders:
            if not 0 <= c < n:
                raise GraphError(f"leader {c} outside 0..{n - 1}")
            if seen[(c, c)] < 0:
                raise GraphError(f"leader {c} has a negative self-loop; its state would oscillate")
        for s, d, _ in self.edges:
            if d in leader_set and s != d:
                raise LeaderInEdge(d, s)

    @classmethod
    def with_self_loops(cls, n: int, edges: Iterable[Edge], leaders: Iterable[int] = ()):
        """Build a graph, inserting a positive self-loop wherever one is missing.

        Each insertion emits a :class:`GraphWarning` ``"self-loop added: i"``.
        """
        edges = list(edges)
        have = {s for s, d, _ in edges if s == d}
        for i in range(n):
            if i not in have:
                warnings.warn(f"self-loop added: {i}", GraphWarning, stacklevel=2)
                edges.append((i, i, 1))
        return cls(n, tuple(edges), tuple(leaders))

    @cached_property
    def followers(self) -> tuple[int, ...]:
        lead = set(self.leaders)
        return tuple(i for i in range(self.n) if i not in lead)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        """Out-neighbours per node, self-loops excluded."""
        out = [[] for _ in range(self.n)]
        for s, d, _ in self.edges:
            if s != d:
                out[s].append(d)
        return tuple(tuple(o) for o in out)

    @cached_property
    def sign_of(self) -> dict[tuple[int, int], int]:
        return {(s, d): w for s, d, w in self.edges}

    def with_edges(self, extra: Iterable[Edge]) -> "SignedGraph":
        return SignedGraph(self.n, self.edges + tuple(extra), self.leaders)

    def __eq__(self, other):
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return (self.n, self.edges, self.leaders) == (other.n, other.edges, other.leaders)

    def __hash__(self):
        return hash((self.n, self.edges, self.leaders))


def _uniform_weights(g: SignedGraph) -> np.ndarray:
    indeg = np.zeros(g.n)
    for _, d, _ in g.edges:
        indeg[d] += 1
    return np.array([w / indeg[d] for _, d, w in g.edges])


# Other rules consistent with unit absolute row sums can be registered here.
WEIGHT_RULES = {"uniform": _uniform_weights}


def build_adjacency(g: SignedGraph, rule: str = "uniform") -> sp.csr_matrix:
    """Weight matrix ``A`` (CSR) with ``a[dst, src] = sign / |N_dst|``.

    ``N_dst`` is the in-neighbourhood of ``dst`` including its self-loop, so
    every row has absolute sum one and a nonzero diagonal.
    """
    try:
        weights = WEIGHT_RULES[rule](g)
    except KeyError:
        raise GraphError(f"unknown weight rule {rule!r}; available: {sorted(WEIGHT_RULES)}") from None
    rows = np.fromiter((d for _, d, _ in g.edges), dtype=np.int64, count=len(g.edges))
    cols = np.fromiter((s for s, _, _ in g.edges), dtype=np.int64, count=len(g.edges))
    A = sp.csr_matrix((weights, (rows, cols)), shape=(g.n, g.n))
    A.sort_indices()
    return A


def enlarged_graph(A) -> sp.csr_matrix:
    """Nonnegative ``2n x 2n`` lift of a signed weight matrix.

    Node ``i + n`` is the mirror of node ``i``. Positive weights stay inside the
    original and mirror copies, negative weights cross between them.
    """
    A = sp.csr_matrix(A)
    pos = A.maximum(0)
    neg = (-A).maximum(0)
    At = sp.bmat([[pos, neg], [neg, pos]], format="csr")
    At.eliminate_zeros()
    At.sort_indices()
    return At


def mirror_permutation(n: int) -> sp.csr_matrix:
    """Permutation matrix swapping every node with its mirror."""
    perm = np.concatenate([np.arange(n, 2 * n), np.arange(n)])
    return sp.csr_matrix((np.ones(2 * n), (np.arange(2 * n), perm)), shape=(2 * n, 2 * n))


_SIGNS = {"+": 1, "-": -1, "+1": 1, "-1": -1, "1": 1}
_HEADER = re.compile(r"#\s*(leaders|n)\s*:(.*)$", re.IGNORECASE)


def _parse_edge_list(text: str) -> SignedGraph:
    edges, leaders = [], []
    n_declared = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m is None:
                continue
            key, rest = m.group(1).lower(), m.group(2).split()
            try:
                values = [int(t) for t in rest]
            except ValueError:
                raise ParseError(f"non-integer in '#{key}:' header", lineno) from None
            if key == "leaders":
                leaders.extend(values)
            elif len(values) != 1:
                raise ParseError("'#n:' header takes exactly one integer", lineno)
            else:
                n_declared = values[0]
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise ParseError(f"expected 'src dst sign', got {line!r}", lineno)
        try:
            s, d = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"node ids must be integers: {line!r}", lineno) from None
        if tokens[2] not in _SIGNS:
            raise ParseError(f"sign must be '+' or '-', got {tokens[2]!r}", lineno)
        if s < 0 or d < 0:
            raise ParseError("node ids must be nonnegative", lineno)
        edges.append((s, d, _SIGNS[tokens[2]]))
    n = max([n_declared] + [max(s, d) + 1 for s, d, _ in edges] + [c + 1 for c in leaders])
    _check_duplicates(edges)
    return SignedGraph.with_self_loops(n, edges, leaders)


def _check_duplicates(edges):
    seen = set()
    for s, d, _ in edges:
        if (s, d) in seen:
            raise DuplicateEdge(s, d)
        seen.add((s, d))


def _parse_json(text: str) -> SignedGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or "edges" not in doc:
        raise ParseError("JSON graph must be an object with an 'edges' array")
    edges = []
    for k, e in enumerate(doc["edges"]):
        if not isinstance(e, list) or len(e) != 3:
            raise ParseError(f"edge #{k} must be [src, dst, sign]")
        s, d, w = e
        w = _SIGNS.get(str(w)) if isinstance(w, str) else w
        if not (isinstance(s, int) and isinstance(d, int) and w in (1, -1)):
            raise ParseError(f"edge #{k} malformed: {e!r}")
        edges.append((s, d, w))
    leaders = doc.get("leaders", [])
    n = doc.get("n")
    if n is None:
        n = max([max(s, d) + 1 for s, d, _ in edges] + [c + 1 for c in leaders] + [0])
    _check_duplicates(edges)
    return SignedGraph.with_self_loops(int(n), edges, leaders)


def parse_graph(text: str) -> SignedGraph:
    """Parse an edge-list or JSON graph document (format is auto-detected)."""
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    return _parse_edge_list(text)


def read_graph(path) -> SignedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def emit_edge_list(g: SignedGraph) -> str:
    lines = [f"#n: {g.n}", "#leaders: " + " ".join(map(str, g.leaders))]
    lines += [f"{s} {d} {'+' if w > 0 else '-'}" for s, d, w in g.edges]
    return "\n".join(lines) + "\n"


def emit_json(g: SignedGraph) -> str:
    doc = {"n": g.n, "edges": [list(e) for e in g.edges], "leaders": list(g.leaders)}
    return json.dumps(doc)
