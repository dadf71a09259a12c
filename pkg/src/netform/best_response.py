"""Polynomial-time exact best response for both adversaries.

Pipeline: drop the active player's strategy, classify the components of the
remaining graph, then assemble a small set of candidate strategies and keep
the exact-utility maximum.

For purely vulnerable components the choice is which subset of components to
join: a 3-dimensional table ranks subsets under a cap on the resulting region
size (join-and-become-targeted vs. stay-untargeted caps for the max-carnage
adversary, one candidate per achievable region size for the random-attack
adversary), and a greedy profitability rule handles the immunized case where
joining carries no risk.

For components that contain immunized players, partner endpoints are chosen
per component by exact expected-contribution comparison of three candidates:
buy nothing, buy one edge to the best immunized node, or buy a multi-edge set
produced by a dynamic program over the component's block tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .game import (
    EMPTY_STRATEGY,
    Adversary,
    GameState,
    RegionDecomposition,
    Strategy,
    decompose_regions,
    utility,
)
from .kernels import label_components
from .knapsack import KnapsackTable
from .metatree import BlockKind, MetaTree, meta_tree_construct


@dataclass(frozen=True)
class ComponentPartition:
    """Components of the graph with the active player's strategy dropped and
    the player herself removed, ordered by smallest member."""

    player: int
    components: tuple[frozenset[int], ...]
    contains_immunized: tuple[bool, ...]
    incoming: tuple[bool, ...]

    @property
    def c_u(self) -> list[int]:
        """Indices of purely vulnerable components."""
        return [i for i, f in enumerate(self.contains_immunized) if not f]

    @property
    def c_i(self) -> list[int]:
        """Indices of components containing an immunized player."""
        return [i for i, f in enumerate(self.contains_immunized) if f]

    @property
    def joinable(self) -> list[int]:
        """Purely vulnerable components with no preexisting edge to the
        player; the only ones worth paying to join."""
        return [i for i in self.c_u if not self.incoming[i]]


@dataclass(frozen=True)
class BestResponseResult:
    player: int
    strategy: Strategy
    utility: Fraction
    candidate_log: tuple[tuple[str, Strategy, Fraction], ...]


def _drop(state: GameState, a: int) -> GameState:
    return state.with_strategy(a, EMPTY_STRATEGY)


def classify_components(state: GameState, a: int) -> ComponentPartition:
    """Partition the graph minus the active player (her strategy dropped)."""
    sprime = _drop(state, a)
    indptr, indices = sprime.csr
    active = np.ones(state.n, dtype=np.bool_)
    active[a] = False
    labels, count = label_components(indptr, indices, active)
    members: list[list[int]] = [[] for _ in range(count)]
    for p in range(state.n):
        if labels[p] >= 0:
            members[int(labels[p])].append(p)
    has_imm = [False] * count
    incoming = [False] * count
    for p in range(state.n):
        lbl = int(labels[p])
        if lbl < 0:
            continue
        if sprime.immunized_mask[p]:
            has_imm[lbl] = True
        if a in sprime.strategies[p].endpoints:
            incoming[lbl] = True
    return ComponentPartition(
        player=a,
        components=tuple(frozenset(ms) for ms in members),
        contains_immunized=tuple(has_imm),
        incoming=tuple(incoming),
    )


# -- selection among purely vulnerable components --------------------------


def _join_items(partition: ComponentPartition) -> tuple[list[int], list[int]]:
    items = partition.joinable
    sizes = [len(partition.components[i]) for i in items]
    return items, sizes


def subset_select(
    state: GameState,
    a: int,
    partition: ComponentPartition | None = None,
) -> tuple[tuple[frozenset[int], ...], tuple[frozenset[int], ...]]:
    """Best component subsets to join without immunizing.

    Returns (A_t, A_v): the best subset if the player's region is allowed to
    reach the maximum region size (she may become targeted), and the best one
    keeping it strictly below (she stays untargeted).  Either may be empty.
    """
    if partition is None:
        partition = classify_components(state, a)
    sprime = _drop(state, a)
    regions = decompose_regions(sprime)
    items, sizes = _join_items(partition)
    own = int(regions.vuln_sizes[regions.region_of(a)])
    r = regions.t_max - own
    table = KnapsackTable.build(sizes, z_max=r, y_max=min(len(sizes), r))
    _, j_t = table.best_net_value(state.alpha, min(r, table.z_max))
    picked_t = table.reconstruct(j_t, min(r, table.z_max))
    if r - 1 >= 0:
        _, j_v = table.best_net_value(state.alpha, min(r - 1, table.z_max))
        picked_v = table.reconstruct(j_v, min(r - 1, table.z_max))
    else:
        picked_v = []
    a_t = tuple(partition.components[items[k]] for k in picked_t)
    a_v = tuple(partition.components[items[k]] for k in picked_v)
    return a_t, a_v


def uniform_subset_select(
    state: GameState,
    a: int,
    partition: ComponentPartition | None = None,
) -> tuple[tuple[frozenset[int], ...], ...]:
    """One joinable-component subset per achievable joined-node total, each
    realized with the fewest edges; includes the empty subset."""
    if partition is None:
        partition = classify_components(state, a)
    items, sizes = _join_items(partition)
    table = KnapsackTable.build(sizes, z_max=sum(sizes))
    out = []
    for z in table.achievable_totals():
        y = table.min_picks_for_exact(z)
        picked = table.reconstruct(y, z)
        out.append(tuple(partition.components[items[k]] for k in picked))
    return tuple(out)


def greedy_select(
    state: GameState,
    a: int,
    partition: ComponentPartition | None = None,
) -> tuple[frozenset[int], ...]:
    """Components worth joining when the player immunizes.

    Joining is then riskless, so a component qualifies alone: its size times
    its survival probability must strictly beat the edge price.
    """
    if partition is None:
        partition = classify_components(state, a)
    items, _sizes = _join_items(partition)
    if not items:
        return ()
    sprime = _drop(state, a)
    state_g = sprime.with_strategy(a, Strategy(frozenset(), True))
    regions_g = decompose_regions(state_g)
    total = regions_g.n_targets
    chosen = []
    for i in items:
        comp = partition.components[i]
        overlap = sum(1 for p in comp if regions_g.targeted_mask[p])
        gain = Fraction(len(comp)) * Fraction(total - overlap, total)
        if gain > state.alpha:
            chosen.append(comp)
    return tuple(chosen)


# -- expected contribution of one immunized-containing component -----------


class _ComponentEvaluator:
    """Exact expected number of a component's members connected to the
    player, per candidate endpoint set, sharing one labeling per attack
    scenario.

    Scenario weights are region sizes over the global targeted count of the
    evaluated state; scenarios killing the player contribute nothing.
    """

    def __init__(self, state2: GameState, a: int, component: frozenset[int],
                 regions2: RegionDecomposition):
        self.state2 = state2
        self.a = a
        self.component = component
        self.regions2 = regions2
        self.alpha = state2.alpha
        self.n_targets = regions2.n_targets
        self.comp_size = len(component)
        self.incoming = tuple(sorted(
            p for p in component if a in state2.strategies[p].endpoints
        ))
        self.comp_mask = np.zeros(state2.n, dtype=np.bool_)
        for p in component:
            self.comp_mask[p] = True
        a_region = regions2.region_of(a)
        local = {int(regions2.vuln_labels[p]) for p in component}
        local.discard(-1)
        # (weight, labels, sizes); labels None = region disjoint from the
        # component, nothing removed inside it
        self.scenarios: list[tuple[int, np.ndarray | None, np.ndarray | None, int]] = []
        indptr, indices = state2.csr
        for rid in regions2.targeted_region_ids:
            rid = int(rid)
            if rid == a_region:
                continue  # player destroyed, contributes zero
            weight = int(regions2.vuln_sizes[rid])
            if rid not in local:
                self.scenarios.append((weight, None, None, rid))
            else:
                active = self.comp_mask & (regions2.vuln_labels != rid)
                labels, count = label_components(indptr, indices, active)
                sizes = np.bincount(labels[labels >= 0], minlength=count).astype(np.int64)
                self.scenarios.append((weight, labels, sizes, rid))

    def contribution(self, delta: Iterable[int]) -> Fraction:
        """Expected |connected members| for endpoint set delta (cost excluded)."""
        entries = list(delta) + list(self.incoming)
        if self.n_targets == 0:
            # no possible attack: deterministic connectivity
            return Fraction(self.comp_size if entries else 0)
        vuln_labels = self.regions2.vuln_labels
        total = 0
        for weight, labels, sizes, rid in self.scenarios:
            if labels is None:
                if entries:
                    total += weight * self.comp_size
                continue
            seen: set[int] = set()
            for e in entries:
                if int(vuln_labels[e]) == rid:
                    continue  # endpoint destroyed along with its region
                seen.add(int(labels[e]))
            total += weight * int(sum(int(sizes[l]) for l in seen))
        return Fraction(total, self.n_targets)

    def value(self, delta: Iterable[int]) -> Fraction:
        delta = list(delta)
        return self.contribution(delta) - self.alpha * len(delta)

    def best_single(self) -> tuple[int | None, Fraction]:
        """Best lone immunized endpoint by exact value; lowest id on ties."""
        best_w = None
        best_val = Fraction(0)
        for w in sorted(self.component):
            if not self.state2.immunized_mask[w]:
                continue
            val = self.value([w])
            if best_w is None or val > best_val:
                best_w, best_val = w, val
        return best_w, best_val


def partner_set_select(
    state2: GameState,
    a: int,
    component: frozenset[int],
    regions2: RegionDecomposition | None = None,
) -> frozenset[int]:
    """Best endpoint set inside one immunized-containing component.

    Compares buying nothing, the best single immunized endpoint, and the
    block-tree multi-edge candidate; ties keep the cheaper option.  Returned
    endpoints are always immunized players.
    """
    if regions2 is None:
        regions2 = decompose_regions(state2)
    ev = _ComponentEvaluator(state2, a, component, regions2)
    best_set: frozenset[int] = frozenset()
    best_val = ev.value(())
    w, val = ev.best_single()
    if w is not None and val > best_val:
        best_set, best_val = frozenset([w]), val
    mt = meta_tree_construct(state2, component, regions2)
    if mt.candidate_block_count >= 2:
        multi = meta_tree_select(state2, a, component, mt, regions2, ev)
        if multi:
            val = ev.value(multi)
            if val > best_val:
                best_set, best_val = multi, val
    return best_set


def _root_tree(mt: MetaTree, root: int) -> tuple[list[int], list[int]]:
    """BFS order and parent array of the block tree rooted at one block."""
    parent = [-1] * len(mt.blocks)
    order = [root]
    parent[root] = root
    for u in order:
        for w in mt.adjacency[u]:
            if parent[w] < 0:
                parent[w] = u
                order.append(w)
    parent[root] = -1
    return order, parent


def meta_tree_select(
    state2: GameState,
    a: int,
    component: frozenset[int],
    mt: MetaTree | None = None,
    regions2: RegionDecomposition | None = None,
    _ev: _ComponentEvaluator | None = None,
) -> frozenset[int]:
    """Multi-edge partner candidate: root the block tree at each leaf, run
    the subtree dynamic program, keep the best rooted answer by exact value.

    Returns a set of two or more immunized endpoints, or nothing when no
    multi-edge set wins any rooting.
    """
    if regions2 is None:
        regions2 = decompose_regions(state2)
    if mt is None:
        mt = meta_tree_construct(state2, component, regions2)
    ev = _ev or _ComponentEvaluator(state2, a, component, regions2)
    if regions2.n_targets == 0:
        # no attack scenarios: one edge already connects everything
        return frozenset()
    block_incoming = [
        any(a in state2.strategies[p].endpoints for p in blk.members)
        for blk in mt.blocks
    ]
    best: frozenset[int] | None = None
    best_val = Fraction(0)
    for r in mt.leaves():
        opt_r = frozenset([mt.representative_immunized[r]]) | _rooted_select(
            mt, r, state2.alpha, regions2.n_targets, block_incoming
        )
        val = ev.value(opt_r)
        if best is None or val > best_val:
            best, best_val = opt_r, val
    if best is not None and len(best) >= 2:
        return best
    return frozenset()


def _rooted_select(
    mt: MetaTree,
    root: int,
    alpha: Fraction,
    n_targets: int,
    block_incoming: Sequence[bool],
) -> frozenset[int]:
    """Bottom-up subtree pass: which blocks below the root get an edge.

    A subtree gets at most one new edge, and only if every level below
    declined, the subtree root is a candidate block, nobody in the subtree
    already bought an edge to the player, and the best leaf's expected
    reconnection gain strictly beats the edge price.
    """
    order, parent = _root_tree(mt, root)
    nb = len(mt.blocks)
    children: list[list[int]] = [[] for _ in range(nb)]
    for b in order[1:]:
        children[parent[b]].append(b)
    subtree_players = [blk.size for blk in mt.blocks]
    subtree_incoming = list(block_incoming)
    subtree_leaves: list[list[int]] = [[] for _ in range(nb)]
    for b in reversed(order):
        if not children[b]:
            subtree_leaves[b] = [b]
        for c in children[b]:
            subtree_players[b] += subtree_players[c]
            subtree_incoming[b] = subtree_incoming[b] or subtree_incoming[c]
            subtree_leaves[b].extend(subtree_leaves[c])

    opt: list[frozenset[int]] = [frozenset()] * nb
    for b in reversed(order):
        if b == root:
            continue
        merged: frozenset[int] = frozenset()
        for c in children[b]:
            merged |= opt[c]
        if mt.blocks[b].kind is BlockKind.BRIDGE or merged or subtree_incoming[b]:
            opt[b] = merged
            continue
        # candidate block, empty below, no preexisting edge anywhere in the
        # subtree: price one edge to the best reachable leaf
        best_leaf = None
        best_profit = Fraction(0)
        for leaf in sorted(subtree_leaves[b]):
            acc = mt.blocks[parent[b]].size * subtree_players[b]
            p = leaf
            while p != b:
                q = parent[p]
                if mt.blocks[q].kind is BlockKind.BRIDGE:
                    acc += mt.blocks[q].size * subtree_players[p]
                p = q
            profit = Fraction(acc, n_targets)
            if best_leaf is None or profit > best_profit:
                best_leaf, best_profit = leaf, profit
        if best_leaf is not None and best_profit > alpha:
            opt[b] = frozenset([mt.representative_immunized[best_leaf]])
    only_child = children[root][0] if children[root] else None
    return opt[only_child] if only_child is not None else frozenset()


# -- candidate assembly ----------------------------------------------------


def possible_strategy(
    state: GameState,
    a: int,
    components: Sequence[frozenset[int]],
    immunize: bool,
    partition: ComponentPartition | None = None,
) -> Strategy:
    """Single edge to each selected vulnerable component (lowest id), then
    partner sets for every immunized-containing component."""
    if partition is None:
        partition = classify_components(state, a)
    m_set = {min(comp) for comp in components}
    sprime = _drop(state, a)
    state2 = sprime.with_strategy(a, Strategy(frozenset(m_set), immunize))
    regions2 = decompose_regions(state2)
    b_set: set[int] = set()
    for ci in partition.c_i:
        b_set |= partner_set_select(state2, a, partition.components[ci], regions2)
    return Strategy(frozenset(m_set | b_set), immunize)


def _strategy_sort_key(s: Strategy) -> tuple:
    return (len(s.endpoints), 1 if s.immunize else 0, tuple(sorted(s.endpoints)))


def best_response(state: GameState, a: int) -> BestResponseResult:
    """Exact utility-maximizing strategy for one player.

    Ties across candidates resolve to fewest edges, then no immunization,
    then lexicographically smallest endpoint set.
    """
    partition = classify_components(state, a)
    candidates: list[tuple[str, Strategy]] = [("empty", EMPTY_STRATEGY)]
    if state.adversary is Adversary.MAX_CARNAGE:
        a_t, a_v = subset_select(state, a, partition)
        candidates.append(
            ("targeted_join", possible_strategy(state, a, a_t, False, partition))
        )
        candidates.append(
            ("untargeted_join", possible_strategy(state, a, a_v, False, partition))
        )
    else:
        for subset in uniform_subset_select(state, a, partition):
            z = sum(len(c) for c in subset)
            candidates.append(
                (f"join_{z}", possible_strategy(state, a, subset, False, partition))
            )
    a_g = greedy_select(state, a, partition)
    candidates.append(
        ("immunize_greedy", possible_strategy(state, a, a_g, True, partition))
    )

    log: list[tuple[str, Strategy, Fraction]] = []
    best_label, best_strat, best_u = None, None, None
    for label, strat in candidates:
        u = utility(state.with_strategy(a, strat), a)
        log.append((label, strat, u))
        if (
            best_u is None
            or u > best_u
            or (u == best_u and _strategy_sort_key(strat) < _strategy_sort_key(best_strat))
        ):
            best_label, best_strat, best_u = label, strat, u
    return BestResponseResult(
        player=a, strategy=best_strat, utility=best_u, candidate_log=tuple(log)
    )
