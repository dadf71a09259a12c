"""Core model: players buy edges and immunization, an adversary destroys one
vulnerable region, utilities are exact expectations.

A game state holds, per player, the set of edge endpoints she pays for and an
immunization bit.  The induced network is the simple undirected union of all
bought edges.  Non-immunized players form vulnerable regions (components of
the subgraph induced on them); the adversary picks a target among the targeted
players and wipes out the target's whole vulnerable region.  A player's
utility is the expected size of her post-attack connected component (counting
herself, zero if she is destroyed) minus edge and immunization costs.

Two adversaries are supported: one that attacks only maximum-size vulnerable
regions ("max_carnage") and one that attacks any vulnerable player uniformly
("random_attack").  All utility arithmetic uses exact rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .kernels import label_components


class Adversary(str, Enum):
    MAX_CARNAGE = "max_carnage"
    RANDOM_ATTACK = "random_attack"


class TargetImmunized(ValueError):
    """Raised when an attack is simulated on an immunized player."""


def _as_fraction(value) -> Fraction:
    # Accept Fraction, int, "p/q", decimal strings, and floats (via repr so
    # "0.1" means a tenth, not the nearest binary double).
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class Strategy:
    """One player's choice: endpoints she buys edges to, plus immunization."""

    endpoints: frozenset[int] = frozenset()
    immunize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "endpoints", frozenset(int(e) for e in self.endpoints))
        object.__setattr__(self, "immunize", bool(self.immunize))

    def canonical(self) -> tuple[tuple[int, ...], bool]:
        return tuple(sorted(self.endpoints)), self.immunize


EMPTY_STRATEGY = Strategy(frozenset(), False)


@dataclass(frozen=True)
class GameState:
    """Immutable snapshot of all players' strategies plus game parameters.

    Duplicate edges (both endpoints buying {i,j}) are kept in the per-player
    strategies, so both owners pay, but the induced network is simple.
    """

    n: int
    alpha: Fraction
    beta: Fraction
    adversary: Adversary
    strategies: tuple[Strategy, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_fraction(self.alpha))
        object.__setattr__(self, "beta", _as_fraction(self.beta))
        object.__setattr__(self, "adversary", Adversary(self.adversary))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if self.n < 1:
            raise ValueError("need at least one player")
        if len(self.strategies) != self.n:
            raise ValueError("one strategy per player required")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("costs must be nonnegative")
        for i, s in enumerate(self.strategies):
            for j in s.endpoints:
                if j == i:
                    raise ValueError(f"player {i} buys a self-loop")
                if not 0 <= j < self.n:
                    raise ValueError(f"player {i} buys edge to unknown player {j}")

    # -- derived structure ------------------------------------------------

    @cached_property
    def edge_pairs(self) -> tuple[tuple[int, int], ...]:
        """Simple undirected edge set, each pair (u, v) with u < v, sorted."""
        pairs = {
            (i, j) if i < j else (j, i)
            for i, s in enumerate(self.strategies)
            for j in s.endpoints
        }
        return tuple(sorted(pairs))

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency in CSR form (indptr, indices), both int64."""
        n = self.n
        deg = np.zeros(n, dtype=np.int64)
        for u, v in self.edge_pairs:
            deg[u] += 1
            deg[v] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.zeros(max(int(indptr[-1]), 1), dtype=np.int64)
        fill = indptr[:-1].copy()
        for u, v in self.edge_pairs:
            indices[fill[u]] = v
            fill[u] += 1
            indices[fill[v]] = u
            fill[v] += 1
        return indptr, indices[: int(indptr[-1])]

    @cached_property
    def immunized_mask(self) -> np.ndarray:
        return np.array([s.immunize for s in self.strategies], dtype=np.bool_)

    @cached_property
    def vulnerable_mask(self) -> np.ndarray:
        return ~self.immunized_mask

    @property
    def immunized_players(self) -> list[int]:
        return [i for i, s in enumerate(self.strategies) if s.immunize]

    def with_strategy(self, player: int, strategy: Strategy) -> GameState:
        strategies = list(self.strategies)
        strategies[player] = strategy
        return GameState(self.n, self.alpha, self.beta, self.adversary, tuple(strategies))

    def canonical(self) -> tuple:
        """Hashable canonical form of the full strategy profile."""
        return tuple(s.canonical() for s in self.strategies)

    def total_edge_cost(self) -> Fraction:
        return self.alpha * sum(len(s.endpoints) for s in self.strategies)

    def total_immunization_cost(self) -> Fraction:
        return self.beta * sum(1 for s in self.strategies if s.immunize)


@dataclass(frozen=True)
class RegionDecomposition:
    """Vulnerable and immunized regions plus the adversary's target set.

    Region labels are dense, assigned in order of each region's smallest
    member, so identical states always decompose identically.  Players outside
    the respective subgraph carry label -1.
    """

    vuln_labels: np.ndarray
    vuln_sizes: np.ndarray
    imm_labels: np.ndarray
    imm_sizes: np.ndarray
    t_max: int
    targeted_region_ids: np.ndarray
    n_targets: int

    @cached_property
    def vulnerable_regions(self) -> list[set[int]]:
        return _regions_from_labels(self.vuln_labels, len(self.vuln_sizes))

    @cached_property
    def immunized_regions(self) -> list[set[int]]:
        return _regions_from_labels(self.imm_labels, len(self.imm_sizes))

    @cached_property
    def targeted(self) -> set[int]:
        ids = set(int(r) for r in self.targeted_region_ids)
        return {
            int(p) for p, lbl in enumerate(self.vuln_labels) if int(lbl) in ids
        }

    @cached_property
    def targeted_mask(self) -> np.ndarray:
        mask = np.zeros(len(self.vuln_labels), dtype=np.bool_)
        for p in self.targeted:
            mask[p] = True
        return mask

    def region_of(self, player: int) -> int:
        """Vulnerable-region index of a player, -1 if immunized."""
        return int(self.vuln_labels[player])


def _regions_from_labels(labels: np.ndarray, count: int) -> list[set[int]]:
    out: list[set[int]] = [set() for _ in range(count)]
    for p, lbl in enumerate(labels):
        if lbl >= 0:
            out[int(lbl)].add(int(p))
    return out


def decompose_regions(state: GameState) -> RegionDecomposition:
    """Split players into vulnerable/immunized regions and pick the target set.

    Max-carnage targets every member of every maximum-size vulnerable region;
    random attack targets every vulnerable player.
    """
    indptr, indices = state.csr
    vuln_labels, n_vuln = label_components(indptr, indices, state.vulnerable_mask)
    imm_labels, n_imm = label_components(indptr, indices, state.immunized_mask)
    vuln_sizes = np.bincount(vuln_labels[vuln_labels >= 0], minlength=n_vuln).astype(np.int64)
    imm_sizes = np.bincount(imm_labels[imm_labels >= 0], minlength=n_imm).astype(np.int64)
    t_max = int(vuln_sizes.max()) if n_vuln else 0
    if n_vuln == 0:
        targeted_ids = np.zeros(0, dtype=np.int64)
    elif state.adversary is Adversary.MAX_CARNAGE:
        targeted_ids = np.flatnonzero(vuln_sizes == t_max).astype(np.int64)
    else:
        targeted_ids = np.arange(n_vuln, dtype=np.int64)
    n_targets = int(vuln_sizes[targeted_ids].sum()) if len(targeted_ids) else 0
    return RegionDecomposition(
        vuln_labels=vuln_labels,
        vuln_sizes=vuln_sizes,
        imm_labels=imm_labels,
        imm_sizes=imm_sizes,
        t_max=t_max,
        targeted_region_ids=targeted_ids,
        n_targets=n_targets,
    )


def simulate_attack(state: GameState, target: int) -> dict[int, int]:
    """Destroy the target's whole vulnerable region; map survivors to their
    post-attack component sizes.

    Raises TargetImmunized if the target cannot be attacked.
    """
    if state.strategies[target].immunize:
        raise TargetImmunized(f"player {target} is immunized")
    regions = decompose_regions(state)
    labels, sizes = _post_attack_components(state, regions, regions.region_of(target))
    return {
        int(p): int(sizes[labels[p]])
        for p in range(state.n)
        if labels[p] >= 0
    }


def _post_attack_components(
    state: GameState, regions: RegionDecomposition, region_id: int
) -> tuple[np.ndarray, np.ndarray]:
    """Labels and sizes of the network after removing one vulnerable region."""
    indptr, indices = state.csr
    active = regions.vuln_labels != region_id
    labels, count = label_components(indptr, indices, active)
    sizes = np.bincount(labels[labels >= 0], minlength=count).astype(np.int64)
    return labels, sizes


def attack_scenarios(
    state: GameState, regions: RegionDecomposition | None = None
) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """All distinct attack outcomes as (weight, labels, sizes) triples.

    One entry per targeted region; every member of a region is an equally
    likely target and yields the same destruction, so the region's size is the
    scenario weight.  Weights sum to the total number of targeted players.
    """
    if regions is None:
        regions = decompose_regions(state)
    out = []
    for rid in regions.targeted_region_ids:
        weight = int(regions.vuln_sizes[rid])
        labels, sizes = _post_attack_components(state, regions, int(rid))
        out.append((weight, labels, sizes))
    return out


def utility(
    state: GameState,
    player: int,
    regions: RegionDecomposition | None = None,
    scenarios: list[tuple[int, np.ndarray, np.ndarray]] | None = None,
) -> Fraction:
    """Exact expected utility of one player.

    Expected post-attack component size (self included, zero when destroyed)
    minus alpha per bought endpoint minus beta if immunized.  With no
    vulnerable players there is no attack and the component size is
    deterministic.
    """
    if regions is None:
        regions = decompose_regions(state)
    strat = state.strategies[player]
    cost = state.alpha * len(strat.endpoints)
    if strat.immunize:
        cost += state.beta
    if regions.n_targets == 0:
        indptr, indices = state.csr
        labels, count = label_components(
            indptr, indices, np.ones(state.n, dtype=np.bool_)
        )
        sizes = np.bincount(labels[labels >= 0], minlength=count)
        return Fraction(int(sizes[labels[player]])) - cost
    if scenarios is None:
        scenarios = attack_scenarios(state, regions)
    total = 0
    for weight, labels, sizes in scenarios:
        if labels[player] >= 0:
            total += weight * int(sizes[labels[player]])
    return Fraction(total, regions.n_targets) - cost


def utilities_all(state: GameState) -> list[Fraction]:
    """Every player's exact utility in one pass over the attack scenarios."""
    regions = decompose_regions(state)
    scenarios = None
    if regions.n_targets > 0:
        scenarios = attack_scenarios(state, regions)
    return [utility(state, p, regions, scenarios) for p in range(state.n)]


def social_welfare(state: GameState) -> Fraction:
    """Sum of all utilities, computed per scenario via component sizes.

    Every survivor of a component of size s contributes s, so a scenario
    contributes the sum of its squared component sizes.
    """
    regions = decompose_regions(state)
    cost = state.total_edge_cost() + state.total_immunization_cost()
    indptr, indices = state.csr
    if regions.n_targets == 0:
        labels, count = label_components(
            indptr, indices, np.ones(state.n, dtype=np.bool_)
        )
        sizes = np.bincount(labels[labels >= 0], minlength=count).astype(np.int64)
        return Fraction(int((sizes * sizes).sum())) - cost
    total = 0
    for weight, _labels, sizes in attack_scenarios(state, regions):
        total += weight * int((sizes.astype(np.int64) ** 2).sum())
    return Fraction(total, regions.n_targets) - cost


def largest_component_size(state: GameState) -> int:
    indptr, indices = state.csr
    labels, count = label_components(indptr, indices, np.ones(state.n, dtype=np.bool_))
    if count == 0:
        return 0
    return int(np.bincount(labels[labels >= 0], minlength=count).max())


# -- serialization --------------------------------------------------------


def _fraction_str(x: Fraction) -> str:
    return str(x)


def state_to_dict(state: GameState) -> dict:
    edges = [
        [i, j]
        for i in range(state.n)
        for j in sorted(state.strategies[i].endpoints)
    ]
    return {
        "n": state.n,
        "alpha": _fraction_str(state.alpha),
        "beta": _fraction_str(state.beta),
        "adversary": state.adversary.value,
        "edges": edges,
        "immunized": state.immunized_players,
    }


def state_from_dict(data: Mapping) -> GameState:
    n = int(data["n"])
    endpoints: list[set[int]] = [set() for _ in range(n)]
    for owner, endpoint in data.get("edges", []):
        endpoints[int(owner)].add(int(endpoint))
    immunized = {int(i) for i in data.get("immunized", [])}
    strategies = tuple(
        Strategy(frozenset(endpoints[i]), i in immunized) for i in range(n)
    )
    return GameState(
        n=n,
        alpha=_as_fraction(data.get("alpha", 1)),
        beta=_as_fraction(data.get("beta", 1)),
        adversary=Adversary(data.get("adversary", "max_carnage")),
        strategies=strategies,
    )


def dumps_state(state: GameState, indent: int | None = 2) -> str:
    return json.dumps(state_to_dict(state), indent=indent)


def loads_state(text: str) -> GameState:
    return state_from_dict(json.loads(text))


def save_game(state: GameState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_state(state) + "\n")


def load_game(path) -> GameState:
    with open(path, encoding="utf-8") as fh:
        return loads_state(fh.read())


def to_dot(state: GameState) -> str:
    """GraphViz rendering: immunized players drawn as filled boxes."""
    lines = ["graph netform {", "  node [shape=circle];"]
    for i in range(state.n):
        attrs = ' [shape=box, style=filled, fillcolor="#b0c4de"]' if state.strategies[i].immunize else ""
        lines.append(f"  {i}{attrs};")
    for u, v in state.edge_pairs:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
