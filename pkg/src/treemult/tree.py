"""Rooted, locally finite trees and their finite truncations.

Vertices are identified by dense integer ids in BFS order, children ordered
by creation index.  Spherically symmetric specs (homogeneous and radial
profile) never materialize their vertex lists: ids, parents and children are
computed arithmetically, so truncations with astronomically many vertices
(e.g. a binary tree cut at depth 200) are still cheap to query.
"""

from __future__ import annotations

import bisect
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Union

__all__ = [
    "TreeError",
    "TreeSpec",
    "Vertex",
    "Truncation",
    "Sector",
    "TerminalStatus",
    "build",
    "parent",
    "distance",
    "sector",
    "is_terminal",
    "read_edge_list",
    "write_edge_list",
]

DEFAULT_MAX_DEGREE = 64
# Largest truncation for which dense per-vertex arrays may be requested.
MATERIALIZE_LIMIT = 2_000_000


class TreeError(ValueError):
    """Malformed tree specification or unknown vertex."""


class Vertex(NamedTuple):
    id: int
    depth: int
    parent: Optional[int]


VertexLike = Union[int, Vertex]


def _vid(v: VertexLike) -> int:
    return v.id if isinstance(v, Vertex) else int(v)


@dataclass(frozen=True)
class TreeSpec:
    """Declarative description of a (possibly infinite) rooted tree.

    Use the constructors :meth:`homogeneous`, :meth:`radial` and
    :meth:`edge_list` rather than filling the fields by hand.
    """

    kind: str
    q: Optional[int] = None
    profile: tuple = ()
    root: Optional[int] = None
    edges: tuple = ()
    declared_infinite: bool = True
    max_degree: int = DEFAULT_MAX_DEGREE

    @classmethod
    def homogeneous(cls, q: int, max_degree: int = DEFAULT_MAX_DEGREE) -> "TreeSpec":
        return cls(kind="homogeneous", q=int(q), max_degree=max_degree)

    @classmethod
    def radial(cls, profile: Sequence[int], declared_infinite: bool = True,
               max_degree: int = DEFAULT_MAX_DEGREE) -> "TreeSpec":
        """Children count by depth; the last entry repeats forever."""
        return cls(kind="radial", profile=tuple(int(b) for b in profile),
                   declared_infinite=declared_infinite, max_degree=max_degree)

    @classmethod
    def edge_list(cls, root: int, edges: Iterable[tuple],
                  max_degree: int = DEFAULT_MAX_DEGREE) -> "TreeSpec":
        return cls(kind="edge-list", root=int(root),
                   edges=tuple((int(p), int(c)) for p, c in edges),
                   declared_infinite=False, max_degree=max_degree)

    @classmethod
    def from_file(cls, path, max_degree: int = DEFAULT_MAX_DEGREE) -> "TreeSpec":
        root, edges = read_edge_list(path)
        return cls.edge_list(root, edges, max_degree=max_degree)

    @property
    def spherically_symmetric(self) -> bool:
        return self.kind in ("homogeneous", "radial")

    def branching(self, depth: int) -> int:
        """Children per vertex at ``depth`` (spherically symmetric specs)."""
        if self.kind == "homogeneous":
            return self.q
        if self.kind == "radial":
            return self.profile[min(depth, len(self.profile) - 1)]
        raise TreeError("branching by depth is undefined for edge-list trees")

    def validate(self) -> None:
        if self.kind == "homogeneous":
            if self.q is None or self.q < 0:
                raise TreeError(f"homogeneous tree needs q >= 0, got {self.q}")
            if self.declared_infinite and self.q == 0:
                raise TreeError("q = 0 cannot describe an infinite homogeneous tree")
            if self.q > self.max_degree:
                raise TreeError(f"q = {self.q} exceeds degree cap {self.max_degree}")
        elif self.kind == "radial":
            if not self.profile:
                raise TreeError("radial profile must be nonempty")
            floor = 1 if self.declared_infinite else 0
            for k, b in enumerate(self.profile):
                if b < floor:
                    raise TreeError(
                        f"radial profile value b({k}) = {b} < {floor}"
                        + (" (declared-infinite trees have no terminal vertices)"
                           if self.declared_infinite else ""))
                if b > self.max_degree:
                    raise TreeError(f"b({k}) = {b} exceeds degree cap {self.max_degree}")
        elif self.kind == "edge-list":
            if self.root is None:
                raise TreeError("edge-list tree needs a designated root")
        else:
            raise TreeError(f"unknown tree kind {self.kind!r}")


class TerminalStatus(NamedTuple):
    terminal: bool
    beyond_cap: bool


@dataclass(frozen=True)
class Sector:
    """Descendant set of a vertex, stored as one contiguous id range per level."""

    root: int
    ranges: tuple

    def __contains__(self, v) -> bool:
        v = _vid(v)
        return any(v in r for r in self.ranges)

    def __iter__(self) -> Iterator[int]:
        for r in self.ranges:
            yield from r

    @property
    def size(self) -> int:
        return sum(r.stop - r.start for r in self.ranges)

    def __len__(self) -> int:
        return self.size


@dataclass(frozen=True)
class _Explicit:
    labels: tuple          # BFS id -> original label
    parents: tuple         # BFS id -> parent id (-1 for root)
    child_start: tuple     # BFS id -> id of first child (or where it would be)
    child_count: tuple     # BFS id -> children count in the full spec


@dataclass(frozen=True, eq=False)
class Truncation:
    """The finite subtree ``{v : |v| <= depth_cap}`` of a tree spec.

    Immutable.  ``level_sizes[k]`` is the number of depth-``k`` vertices;
    trailing empty levels (finite trees shallower than the cap) are dropped,
    so ``height`` may be smaller than ``depth_cap``.
    """

    spec: TreeSpec
    depth_cap: int
    level_sizes: tuple
    level_offsets: tuple
    _explicit: Optional[_Explicit] = field(default=None, repr=False)

    # -- size and levels ---------------------------------------------------

    @property
    def height(self) -> int:
        return len(self.level_sizes) - 1

    @property
    def size(self) -> int:
        return self.level_offsets[-1]

    def __len__(self) -> int:
        return self.size

    @property
    def complete(self) -> bool:
        """True when the truncation is the whole (finite) tree."""
        if self.spec.declared_infinite:
            return False
        if self._explicit is not None:
            return self.size == len(set(c for _, c in self.spec.edges)) + 1
        return self.height < self.depth_cap or self.spec.branching(self.height) == 0

    @property
    def materializable(self) -> bool:
        return self.size <= MATERIALIZE_LIMIT

    def level(self, k: int) -> range:
        if not 0 <= k <= self.height:
            return range(0)
        return range(self.level_offsets[k], self.level_offsets[k + 1])

    def __contains__(self, v) -> bool:
        v = _vid(v)
        return 0 <= v < self.size

    def _check(self, v: VertexLike) -> int:
        vid = _vid(v)
        if not 0 <= vid < self.size:
            raise TreeError(f"unknown vertex id {vid}")
        return vid

    def depth(self, v: VertexLike) -> int:
        vid = self._check(v)
        return bisect.bisect_right(self.level_offsets, vid) - 1

    # -- structure ---------------------------------------------------------

    def parent(self, v: VertexLike) -> Optional[int]:
        vid = self._check(v)
        if vid == 0:
            return None
        if self._explicit is not None:
            return self._explicit.parents[vid]
        k = self.depth(vid)
        i = vid - self.level_offsets[k]
        return self.level_offsets[k - 1] + i // self.spec.branching(k - 1)

    def child_count(self, v: VertexLike) -> int:
        """Children of ``v`` in the underlying spec (may lie beyond the cap)."""
        vid = self._check(v)
        if self._explicit is not None:
            return self._explicit.child_count[vid]
        return self.spec.branching(self.depth(vid))

    def children(self, v: VertexLike) -> range:
        """Realized children of ``v`` (empty at the truncation boundary)."""
        vid = self._check(v)
        k = self.depth(vid)
        if k >= self.height:
            return range(0)
        if self._explicit is not None:
            start = self._explicit.child_start[vid]
            return range(start, start + self._explicit.child_count[vid])
        b = self.spec.branching(k)
        start = self.level_offsets[k + 1] + (vid - self.level_offsets[k]) * b
        return range(start, start + b)

    def _child_block_start(self, vid: int) -> int:
        # id where the children of vid start (or would start, for leaves)
        if self._explicit is not None:
            return self._explicit.child_start[vid]
        k = self.depth(vid)
        return self.level_offsets[k + 1] + (vid - self.level_offsets[k]) * self.spec.branching(k)

    def vertex(self, v: VertexLike) -> Vertex:
        vid = self._check(v)
        return Vertex(vid, self.depth(vid), self.parent(vid))

    def vertices(self) -> Iterator[Vertex]:
        self._require_materializable()
        for k in range(self.height + 1):
            for vid in self.level(k):
                yield Vertex(vid, k, self.parent(vid))

    def label(self, v: VertexLike) -> int:
        """Original label of ``v`` (edge-list trees); BFS id otherwise."""
        vid = self._check(v)
        return self._explicit.labels[vid] if self._explicit is not None else vid

    def depths(self):
        """Dense depth array, for truncations small enough to materialize."""
        import numpy as np

        self._require_materializable()
        return np.repeat(np.arange(self.height + 1), self.level_sizes)

    def parents(self):
        """Dense parent array with -1 at the root."""
        import numpy as np

        self._require_materializable()
        if self._explicit is not None:
            return np.asarray(self._explicit.parents[: self.size], dtype=np.int64)
        out = np.empty(self.size, dtype=np.int64)
        out[0] = -1
        for k in range(1, self.height + 1):
            lv = self.level(k)
            i = np.arange(len(lv))
            out[lv.start:lv.stop] = self.level_offsets[k - 1] + i // self.spec.branching(k - 1)
        return out

    def edges(self) -> list:
        """(parent, child) pairs of the realized truncation, in BFS order."""
        self._require_materializable()
        return [(self.parent(v), v) for v in range(1, self.size)]

    def _require_materializable(self) -> None:
        if not self.materializable:
            raise TreeError(
                f"truncation has {self.size} vertices; too many to materialize")

    def ancestors(self, v: VertexLike) -> Iterator[int]:
        """``v`` and then each ancestor up to the root."""
        vid = self._check(v)
        while vid is not None:
            yield vid
            vid = self.parent(vid)


def _level_sizes_symmetric(spec: TreeSpec, depth_cap: int) -> list:
    sizes = [1]
    for k in range(depth_cap):
        nxt = sizes[-1] * spec.branching(k)
        if nxt == 0:
            break
        sizes.append(nxt)
    return sizes


def _bfs_explicit(spec: TreeSpec, depth_cap: int):
    children: dict = {}
    parent_of: dict = {}
    for p, c in spec.edges:
        if c == p:
            raise TreeError(f"self-loop at vertex {p}")
        if c in parent_of:
            raise TreeError(f"vertex {c} has two parents ({parent_of[c]} and {p}); "
                            "edge list is not a tree")
        parent_of[c] = p
        children.setdefault(p, []).append(c)
    if spec.root in parent_of:
        raise TreeError(f"root {spec.root} has a parent; edge list is cyclic or misrooted")
    for p, cs in children.items():
        if len(cs) > spec.max_degree:
            raise TreeError(f"vertex {p} has {len(cs)} children, exceeding degree cap "
                            f"{spec.max_degree}")

    # full BFS over the whole edge list to detect disconnection/cycles
    order = [spec.root]
    seen = {spec.root}
    queue = deque([spec.root])
    while queue:
        u = queue.popleft()
        for c in children.get(u, ()):
            if c in seen:
                raise TreeError(f"cycle through vertex {c}")
            seen.add(c)
            order.append(c)
            queue.append(c)
    labels_all = set(parent_of) | set(children) | {spec.root}
    if len(seen) != len(labels_all):
        stray = sorted(labels_all - seen)[:5]
        raise TreeError(f"edge list is disconnected; unreachable vertices {stray}")

    # BFS relabel, cut at depth_cap
    depth = {spec.root: 0}
    kept = []
    for u in order:
        if u != spec.root:
            depth[u] = depth[parent_of[u]] + 1
        if depth[u] <= depth_cap:
            kept.append(u)
    bfs_id = {u: i for i, u in enumerate(kept)}
    sizes: list = []
    for u in kept:
        d = depth[u]
        if d == len(sizes):
            sizes.append(0)
        sizes[d] += 1
    parents = tuple(-1 if u == spec.root else bfs_id[parent_of[u]] for u in kept)
    counts = tuple(len(children.get(u, ())) for u in kept)
    starts = []
    nxt = 1
    for u in kept:
        starts.append(nxt)
        if depth[u] < depth_cap:
            nxt += len(children.get(u, ()))
    return sizes, _Explicit(tuple(kept), parents, tuple(starts), counts)


def build(spec: TreeSpec, depth_cap: int) -> Truncation:
    """Realize the truncation of ``spec`` at depth ``depth_cap``.

    Deterministic: the same spec and cap always give the same ids.
    """
    if depth_cap < 0:
        raise TreeError(f"depth cap must be nonnegative, got {depth_cap}")
    spec.validate()
    explicit = None
    if spec.spherically_symmetric:
        sizes = _level_sizes_symmetric(spec, depth_cap)
    else:
        sizes, explicit = _bfs_explicit(spec, depth_cap)
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    return Truncation(spec, depth_cap, tuple(sizes), tuple(offsets), explicit)


def parent(t: Truncation, v: VertexLike) -> Optional[Vertex]:
    p = t.parent(v)
    return None if p is None else t.vertex(p)


def distance(t: Truncation, u: VertexLike, v: VertexLike) -> int:
    """Path length between ``u`` and ``v``, by climbing to the deepest common ancestor."""
    a, b = t._check(u), t._check(v)
    da, db = t.depth(a), t.depth(b)
    steps = 0
    while da > db:
        a, da, steps = t.parent(a), da - 1, steps + 1
    while db > da:
        b, db, steps = t.parent(b), db - 1, steps + 1
    while a != b:
        a, b, steps = t.parent(a), t.parent(b), steps + 2
    return steps


def sector(t: Truncation, v: VertexLike) -> Sector:
    vid = t._check(v)
    lo, hi = vid, vid + 1
    ranges = []
    k = t.depth(vid)
    while True:
        ranges.append(range(lo, hi))
        if k >= t.height:
            break
        first = t._child_block_start(lo)
        last = hi - 1
        nlo = first
        nhi = t._child_block_start(last) + len(t.children(last))
        if nhi <= nlo:
            break
        lo, hi, k = nlo, nhi, k + 1
    return Sector(vid, tuple(ranges))


def is_terminal(t: Truncation, v: VertexLike) -> TerminalStatus:
    """Whether ``v`` has exactly one neighbor in the underlying tree.

    ``beyond_cap`` is set when the answer for a vertex on the truncation
    boundary was read from finite edge-list data outside the window rather
    than from a declared infinite structure.
    """
    vid = t._check(v)
    neighbors = t.child_count(vid) + (0 if vid == 0 else 1)
    beyond = t.depth(vid) == t.depth_cap and not t.spec.declared_infinite
    return TerminalStatus(neighbors == 1, beyond)


def read_edge_list(path) -> tuple:
    """Parse ``root <id>`` followed by ``<parent> <child>`` lines."""
    root = None
    edges = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if root is None:
            if len(parts) != 2 or parts[0] != "root":
                raise TreeError(f"{path}:{lineno}: expected 'root <id>'")
            root = _parse_id(parts[1], path, lineno)
            continue
        if len(parts) != 2:
            raise TreeError(f"{path}:{lineno}: expected '<parent-id> <child-id>'")
        edges.append((_parse_id(parts[0], path, lineno), _parse_id(parts[1], path, lineno)))
    if root is None:
        raise TreeError(f"{path}: missing 'root <id>' line")
    return root, edges


def _parse_id(tok: str, path, lineno: int) -> int:
    if not tok.isdigit():
        raise TreeError(f"{path}:{lineno}: vertex id must be a nonnegative integer, got {tok!r}")
    return int(tok)


def write_edge_list(t: Truncation, path) -> None:
    lines = [f"root {t.label(0)}"]
    lines += [f"{t.label(p)} {t.label(c)}" for p, c in t.edges()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
