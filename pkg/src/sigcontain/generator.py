"""Random layered signed graphs with a prescribed follower SCC structure.

Leaders are isolated nodes (self-loop only) numbered ``0..n_leaders-1``.
Follower SCCs are laid out over the requested levels; each SCC at level
``l > 1`` receives at least one link from level ``l - 1`` and links only from
lower levels, so its longest-path level is exactly ``l``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .condense import classic_condensation, classify_scc
from .errors import GeneratorSpecError
from .graph import SignedGraph

__all__ = ["GeneratorSpec", "generate", "verify", "reference_spec"]


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of :func:`generate`.

    ``inter_scc_edge_prob`` is the probability that a given SCC links to a
    given SCC on a higher level; a link is ``edges_per_link`` random node
    pairs. ``type_mix`` gives SCC counts per balance type (keys 1, 2, 3);
    when omitted the types cycle 1, 2, 3 over SCCs of size >= 2.
    """

    levels: int = 1
    sccs_per_level: tuple[int, ...] = (1,)
    scc_size_range: tuple[int, int] = (1, 1)
    n_nodes: int | None = None
    type_mix: dict | None = None
    inter_scc_edge_prob: float = 0.3
    edges_per_link: int = 1
    negative_edge_prob: float = 0.5
    intra_out_degree: int = 2
    n_leaders: int = 1
    shuffle: bool = True
    seed: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise GeneratorSpecError(f"unknown generator spec keys: {sorted(unknown)}")
        doc = dict(doc)
        spl = doc.get("sccs_per_level", cls.sccs_per_level)
        if isinstance(spl, int):
            spl = [spl] * doc.get("levels", 1)
        doc["sccs_per_level"] = tuple(spl)
        if "scc_size_range" in doc:
            doc["scc_size_range"] = tuple(doc["scc_size_range"])
        if doc.get("type_mix") is not None:
            doc["type_mix"] = {int(k): int(v) for k, v in doc["type_mix"].items()}
        spec = cls(**doc)
        spec.check()
        return spec

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["sccs_per_level"] = list(self.sccs_per_level)
        doc["scc_size_range"] = list(self.scc_size_range)
        if self.type_mix is not None:
            doc["type_mix"] = {str(k): v for k, v in sorted(self.type_mix.items())}
        return doc

    @property
    def n_sccs(self) -> int:
        return sum(self.sccs_per_level)

    def check(self):
        if self.levels < 1:
            raise GeneratorSpecError("levels must be >= 1")
        if len(self.sccs_per_level) != self.levels or min(self.sccs_per_level) < 1:
            raise GeneratorSpecError("sccs_per_level needs one positive count per level")
        lo, hi = self.scc_size_range
        if not 1 <= lo <= hi:
            raise GeneratorSpecError(f"bad scc_size_range {self.scc_size_range}")
        if self.n_leaders < 0:
            raise GeneratorSpecError("n_leaders must be >= 0")
        if self.n_nodes is not None:
            f = self.n_nodes - self.n_leaders
            if not self.n_sccs * lo <= f <= self.n_sccs * hi:
                raise GeneratorSpecError(
                    f"{f} follower nodes cannot fill {self.n_sccs} SCCs of size {lo}..{hi}")
        if self.type_mix is not None:
            if set(self.type_mix) - {1, 2, 3} or min(self.type_mix.values()) < 0:
                raise GeneratorSpecError(f"bad type_mix {self.type_mix}")
            if sum(self.type_mix.values()) != self.n_sccs:
                raise GeneratorSpecError(
                    f"type_mix counts sum to {sum(self.type_mix.values())}, "
                    f"expected {self.n_sccs} SCCs")
            if hi < 2 and self.type_mix.get(2, 0) + self.type_mix.get(3, 0) > 0:
                raise GeneratorSpecError("signed SCC types need SCCs of size >= 2")
        if not 0.0 <= self.inter_scc_edge_prob <= 1.0:
            raise GeneratorSpecError("inter_scc_edge_prob must lie in [0, 1]")
        if self.edges_per_link < 1 or self.intra_out_degree < 0:
            raise GeneratorSpecError("edges_per_link >= 1 and intra_out_degree >= 0 required")


def reference_spec(seed: int = 0) -> GeneratorSpec:
    """1500 nodes, 3 leaders, 15 follower SCCs on 4 levels with 4 roots."""
    return GeneratorSpec(
        levels=4,
        sccs_per_level=(4, 4, 4, 3),
        scc_size_range=(40, 200),
        n_nodes=1500,
        type_mix={1: 5, 2: 5, 3: 5},
        inter_scc_edge_prob=0.2,
        edges_per_link=3,
        negative_edge_prob=0.5,
        intra_out_degree=3,
        n_leaders=3,
        seed=seed,
    )


def _sizes(spec: GeneratorSpec, rng) -> list[int]:
    lo, hi = spec.scc_size_range
    S = spec.n_sccs
    if spec.n_nodes is None:
        return [int(v) for v in rng.integers(lo, hi + 1, size=S)]
    sizes = [lo] * S
    left = spec.n_nodes - spec.n_leaders - S * lo
    while left:
        open_ = [k for k in range(S) if sizes[k] < hi]
        k = open_[int(rng.integers(len(open_)))]
        step = min(left, hi - sizes[k], int(rng.integers(1, 11)))
        sizes[k] += step
        left -= step
    return sizes


def _types(spec: GeneratorSpec, sizes, rng) -> list[int]:
    big = [k for k, s in enumerate(sizes) if s >= 2]
    types = [1] * len(sizes)
    if spec.type_mix is None:
        for pos, k in enumerate(big):
            types[k] = pos % 3 + 1
        return types
    signed = [t for t in (2, 3) for _ in range(spec.type_mix.get(t, 0))]
    if len(signed) > len(big):
        raise GeneratorSpecError(
            f"{len(signed)} signed SCCs requested but only {len(big)} SCCs have size >= 2")
    for k, t in zip(rng.permutation(big), signed):
        types[int(k)] = t
    return types


def _scc_edges(nodes, typ, degree, rng):
    """Internal edges of one SCC of the requested balance type."""
    m = len(nodes)
    local = set()
    if m > 1:
        cyc = rng.permutation(m)
        for a, b in zip(cyc, np.roll(cyc, -1)):
            local.add((int(a), int(b)))
        for a in range(m):
            k = min(degree, m - 1)
            for b in rng.choice(m - 1, size=k, replace=False):
                b = int(b) + (b >= a)
                local.add((a, int(b)))
    signs = {e: 1 for e in local}
    if typ >= 2:
        part = rng.integers(2, size=m)
        part[0], part[1 + int(rng.integers(m - 1))] = 0, 1
        for a, b in local:
            if part[a] != part[b]:
                signs[(a, b)] = -1
    if typ == 3:
        flip = sorted(local)[int(rng.integers(len(local)))]
        signs[flip] = -signs[flip]
    edges = [(nodes[a], nodes[b], signs[(a, b)]) for a, b in sorted(local)]
    edges += [(v, v, 1) for v in nodes]
    return edges


def generate(spec: GeneratorSpec | dict, seed: int | None = None,
             max_attempts: int = 20) -> SignedGraph:
    """Draw a graph for ``spec``; ``seed`` overrides ``spec.seed``.

    The result is re-checked with :func:`verify` and regenerated (with the
    same generator stream) if the check fails.
    """
    if isinstance(spec, dict):
        spec = GeneratorSpec.from_dict(spec)
    else:
        spec.check()
    seed = spec.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        g = _draw(spec, rng)
        if not verify(g, spec):
            return g
    raise GeneratorSpecError(f"could not satisfy spec after {max_attempts} attempts")


def _draw(spec: GeneratorSpec, rng) -> SignedGraph:
    sizes = _sizes(spec, rng)
    types = _types(spec, sizes, rng)
    m = spec.n_leaders
    n = m + sum(sizes)
    ids = np.arange(m, n)
    if spec.shuffle:
        ids = rng.permutation(ids)
    blocks, pos = [], 0
    for s in sizes:
        blocks.append([int(v) for v in ids[pos:pos + s]])
        pos += s
    level_of = [lv for lv, c in enumerate(spec.sccs_per_level, start=1) for _ in range(c)]

    edges = [(c, c, 1) for c in range(m)]
    for nodes, t in zip(blocks, types):
        edges += _scc_edges(nodes, t, spec.intra_out_degree, rng)

    S = len(blocks)
    present = set()
    for v in range(S):
        lv = level_of[v]
        if lv == 1:
            continue
        prev = [u for u in range(S) if level_of[u] == lv - 1]
        links = {prev[int(rng.integers(len(prev)))]}
        for u in range(S):
            if level_of[u] < lv and rng.random() < spec.inter_scc_edge_prob:
                links.add(u)
        for u in sorted(links):
            for _ in range(spec.edges_per_link):
                a = blocks[u][int(rng.integers(len(blocks[u])))]
                b = blocks[v][int(rng.integers(len(blocks[v])))]
                if (a, b) in present:
                    continue
                present.add((a, b))
                sign = -1 if rng.random() < spec.negative_edge_prob else 1
                edges.append((a, b, sign))
    return SignedGraph(n, tuple(edges), tuple(range(m)))


def verify(g: SignedGraph, spec: GeneratorSpec) -> list[str]:
    """Structural problems of ``g`` with respect to ``spec`` (empty if none)."""
    problems = []
    cond = classic_condensation(g, g.followers)
    if cond.level_counts() != list(spec.sccs_per_level):
        problems.append(f"level counts {cond.level_counts()} != {list(spec.sccs_per_level)}")
    lo, hi = spec.scc_size_range
    if any(not lo <= len(mem) <= hi for mem in cond.members):
        problems.append("SCC size outside scc_size_range")
    if spec.n_nodes is not None and g.n != spec.n_nodes:
        problems.append(f"n={g.n} != {spec.n_nodes}")
    if len(g.leaders) != spec.n_leaders:
        problems.append("leader count mismatch")
    if spec.type_mix is not None:
        got = {1: 0, 2: 0, 3: 0}
        for mem in cond.members:
            got[classify_scc(g, mem).type] += 1
        want = {t: spec.type_mix.get(t, 0) for t in (1, 2, 3)}
        if got != want:
            problems.append(f"type mix {got} != {want}")
    return problems
