"""Block tree of a mixed component.

Inside one connected component holding both immunized and vulnerable players,
maximal same-type groups form regions and the regions form a bipartite region
graph.  Immunized regions that stay mutually connected no matter which single
targeted region is destroyed merge into candidate blocks, which then absorb
every vulnerable region whose neighbors all ended up in that block (in
particular every non-targeted vulnerable region).  Each remaining vulnerable
region is a bridge block: destroying it splits the component.  Blocks plus
the surviving region-graph edges form a bipartite tree whose leaves are all
candidate blocks.

Edges worth buying into such a component only ever terminate in candidate
blocks; bridge blocks mark where a single attack cuts the component apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .game import GameState, RegionDecomposition, decompose_regions
from .kernels import label_components


class NotMixedComponent(ValueError):
    """Raised when a block tree is requested for a component with no
    immunized player."""


class BlockKind(str, Enum):
    CANDIDATE = "candidate"
    BRIDGE = "bridge"


@dataclass(frozen=True)
class Block:
    kind: BlockKind
    members: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def min_member(self) -> int:
        return min(self.members)


@dataclass(frozen=True)
class MetaTree:
    """Bipartite block tree of one mixed component."""

    blocks: tuple[Block, ...]
    tree_edges: tuple[tuple[int, int], ...]
    component: frozenset[int]
    representative_immunized: tuple[int, ...]  # per block; -1 for bridge blocks

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in self.blocks]
        for x, y in self.tree_edges:
            adj[x].append(y)
            adj[y].append(x)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def block_of(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b, block in enumerate(self.blocks):
            for p in block.members:
                out[p] = b
        return out

    def candidate_block_ids(self) -> list[int]:
        return [b for b, blk in enumerate(self.blocks) if blk.kind is BlockKind.CANDIDATE]

    def bridge_block_ids(self) -> list[int]:
        return [b for b, blk in enumerate(self.blocks) if blk.kind is BlockKind.BRIDGE]

    @property
    def candidate_block_count(self) -> int:
        return len(self.candidate_block_ids())

    def leaves(self) -> list[int]:
        """Blocks of tree-degree <= 1 (a lone block counts as a leaf)."""
        return [b for b in range(len(self.blocks)) if len(self.adjacency[b]) <= 1]


def meta_tree_construct(
    state: GameState,
    component: Iterable[int],
    regions: RegionDecomposition | None = None,
) -> MetaTree:
    """Build the block tree for one connected mixed component.

    The component must induce a connected subgraph.  Targeted status of a
    local vulnerable region is taken from the state's global decomposition; a
    local region counts as targeted only if it IS a targeted global region.
    A local region that is merely a fragment of a larger global region (the
    rest of which lies outside the component) acts as a plain connector here:
    the attack that removes it also removes parts outside the component, and
    in every use of the tree those scenarios contribute nothing.
    """
    if regions is None:
        regions = decompose_regions(state)
    comp = sorted({int(p) for p in component})
    if not comp:
        raise ValueError("empty component")
    comp_mask = np.zeros(state.n, dtype=np.bool_)
    comp_mask[comp] = True

    indptr, indices = state.csr
    vuln_local, _ = label_components(indptr, indices, comp_mask & state.vulnerable_mask)
    imm_local, _ = label_components(indptr, indices, comp_mask & state.immunized_mask)

    # region vertices of the bipartite region graph, ordered by smallest member
    verts: list[tuple[BlockKind, list[int]]] = []
    vert_of = np.full(state.n, -1, dtype=np.int64)
    seen: dict[tuple[bool, int], int] = {}
    for p in comp:
        key = (bool(state.immunized_mask[p]), int(imm_local[p] if state.immunized_mask[p] else vuln_local[p]))
        v = seen.get(key)
        if v is None:
            v = len(verts)
            seen[key] = v
            kind = BlockKind.CANDIDATE if key[0] else BlockKind.BRIDGE  # provisional
            verts.append((kind, []))
        verts[v][1].append(p)
        vert_of[p] = v

    imm_verts = [v for v, (k, _) in enumerate(verts) if k is BlockKind.CANDIDATE]
    vuln_verts = [v for v, (k, _) in enumerate(verts) if k is BlockKind.BRIDGE]
    if not imm_verts:
        raise NotMixedComponent("component has no immunized player")

    # region-graph adjacency (edges always join a vulnerable and an immunized region)
    nvert = len(verts)
    adj: list[set[int]] = [set() for _ in range(nvert)]
    for u in comp:
        vu = vert_of[u]
        for k in range(indptr[u], indptr[u + 1]):
            w = int(indices[k])
            if comp_mask[w]:
                vw = vert_of[w]
                if vw != vu:
                    adj[vu].add(vw)
                    adj[vw].add(vu)

    targeted_ids = {int(t) for t in regions.targeted_region_ids}
    targeted_vert = np.zeros(nvert, dtype=np.bool_)
    for v in vuln_verts:
        rep = verts[v][1][0]
        g = int(regions.vuln_labels[rep])
        if g in targeted_ids and int(regions.vuln_sizes[g]) == len(verts[v][1]):
            targeted_vert[v] = True

    # merge immunized regions that no single targeted region's removal separates
    cls = {v: 0 for v in imm_verts}
    for t in range(nvert):
        if not targeted_vert[t]:
            continue
        label = _components_without(nvert, adj, t)
        renumber: dict[tuple[int, int], int] = {}
        for v in imm_verts:
            key = (cls[v], label[v])
            cls[v] = renumber.setdefault(key, len(renumber))

    # absorb vulnerable regions whose neighbors all fell into one class
    absorbed: dict[int, int] = {}
    for v in vuln_verts:
        neighbor_classes = {cls[w] for w in adj[v]}
        if len(neighbor_classes) == 1:
            absorbed[v] = neighbor_classes.pop()
            if not targeted_vert[v]:
                continue
        elif not targeted_vert[v]:
            raise AssertionError("non-targeted region with neighbors in several blocks")

    bridge_verts = [v for v in vuln_verts if v not in absorbed]

    # assemble blocks, ordered by smallest member
    class_members: dict[int, list[int]] = {}
    for v in imm_verts:
        class_members.setdefault(cls[v], []).extend(verts[v][1])
    for v, c in absorbed.items():
        class_members[c].extend(verts[v][1])

    raw_blocks: list[tuple[BlockKind, list[int], int]] = []  # (kind, members, key)
    block_of_class: dict[int, int] = {}
    block_of_vert: dict[int, int] = {}
    for c, members in class_members.items():
        raw_blocks.append((BlockKind.CANDIDATE, members, c))
    for v in bridge_verts:
        raw_blocks.append((BlockKind.BRIDGE, list(verts[v][1]), -1 - v))
    raw_blocks.sort(key=lambda item: min(item[1]))
    for b, (_kind, _members, key) in enumerate(raw_blocks):
        if key >= 0:
            block_of_class[key] = b
        else:
            block_of_vert[-1 - key] = b

    blocks = tuple(Block(kind, frozenset(members)) for kind, members, _ in raw_blocks)
    reps = []
    for kind, members, _ in raw_blocks:
        if kind is BlockKind.CANDIDATE:
            reps.append(min(p for p in members if state.immunized_mask[p]))
        else:
            reps.append(-1)

    edges = set()
    for v in bridge_verts:
        bv = block_of_vert[v]
        for w in adj[v]:
            bw = block_of_class[cls[w]]
            edges.add((min(bv, bw), max(bv, bw)))

    return MetaTree(
        blocks=blocks,
        tree_edges=tuple(sorted(edges)),
        component=frozenset(comp),
        representative_immunized=tuple(reps),
    )


def _components_without(nvert: int, adj: Sequence[set[int]], removed: int) -> list[int]:
    """Component labels of the region graph with one vertex dropped."""
    label = [-1] * nvert
    label[removed] = -2
    nxt = 0
    for s in range(nvert):
        if label[s] != -1:
            continue
        stack = [s]
        label[s] = nxt
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if label[w] == -1:
                    label[w] = nxt
                    stack.append(w)
        nxt += 1
    return label


def validate_meta_tree(mt: MetaTree, state: GameState | None = None) -> list[str]:
    """Structural checks; returns human-readable problems (empty = valid)."""
    problems = []
    nb = len(mt.blocks)
    if nb == 0:
        return ["no blocks"]
    if len(mt.tree_edges) != nb - 1:
        problems.append(f"{len(mt.tree_edges)} edges for {nb} blocks (tree needs {nb - 1})")
    for x, y in mt.tree_edges:
        kinds = {mt.blocks[x].kind, mt.blocks[y].kind}
        if kinds != {BlockKind.CANDIDATE, BlockKind.BRIDGE}:
            problems.append(f"edge ({x},{y}) joins {sorted(k.value for k in kinds)}")
    # connectivity
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in mt.adjacency[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != nb:
        problems.append(f"tree not connected ({len(seen)}/{nb} blocks reached)")
    for b in mt.leaves():
        if mt.blocks[b].kind is not BlockKind.CANDIDATE:
            problems.append(f"leaf block {b} is a bridge block")
    covered: set[int] = set()
    for blk in mt.blocks:
        if covered & blk.members:
            problems.append("blocks overlap")
        covered |= blk.members
    if covered != set(mt.component):
        problems.append("blocks do not partition the component")
    if state is not None:
        for b, blk in enumerate(mt.blocks):
            has_imm = any(state.immunized_mask[p] for p in blk.members)
            if blk.kind is BlockKind.BRIDGE and has_imm:
                problems.append(f"bridge block {b} contains an immunized player")
            if blk.kind is BlockKind.CANDIDATE and not has_imm:
                problems.append(f"candidate block {b} has no immunized player")
            if blk.kind is BlockKind.CANDIDATE:
                rep = mt.representative_immunized[b]
                if rep not in blk.members or not state.immunized_mask[rep]:
                    problems.append(f"bad representative for block {b}")
    return problems
