"""Next-item selection for an ability estimate.

Three strategies: the single most informative item, a uniform pick among
the k most informative items, and the cluster-aware variant that treats
items of (numerically) equal information as interchangeable when filling
the k candidate slots. Randomness always comes from an injected seeded
generator so selections replay exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .irt import ItemParameters, item_information

# Two information values count as tied when they differ by less than this
# relative amount; float equality alone would split true ties.
DEFAULT_CLUSTER_EPSILON = 1e-9

DEFAULT_TOP_K = 10


class PoolExhaustedError(RuntimeError):
    """Raised when a selection is requested from an empty pool."""


class StrategyKind(str, Enum):
    BEST_ITEM = "best"
    TOP_K_RANDOM = "topk"
    CLUSTERED_TOP_K_RANDOM = "cluster"


@dataclass(frozen=True)
class SelectionStrategy:
    kind: StrategyKind = StrategyKind.CLUSTERED_TOP_K_RANDOM
    k: int = DEFAULT_TOP_K
    epsilon: float = DEFAULT_CLUSTER_EPSILON

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"candidate pool size k must be >= 1, got {self.k}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class ItemPool:
    """Candidate items (id, parameters) not yet administered in a session."""

    candidates: tuple[tuple[str, ItemParameters], ...]

    def __post_init__(self) -> None:
        ids = [item_id for item_id, _ in self.candidates]
        if len(ids) != len(set(ids)):
            raise ValueError("pool contains duplicate item ids")

    def __len__(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class InformationCluster:
    """Item ids sharing one information value at the evaluated ability."""

    item_ids: tuple[str, ...]
    information: float


@dataclass(frozen=True)
class InformationClusterSet:
    clusters: tuple[InformationCluster, ...]


def _ranked(pool: ItemPool, theta: float) -> list[tuple[str, float]]:
    """Pool items as (id, information), best first, ties broken by lowest id.

    Information is computed once per distinct parameter set; banks built
    from a handful of difficulty levels share parameters heavily.
    """
    info_cache: dict[ItemParameters, float] = {}
    ranked = []
    for item_id, params in pool.candidates:
        info = info_cache.get(params)
        if info is None:
            info = item_information(params, theta)
            info_cache[params] = info
        ranked.append((item_id, info))
    ranked.sort(key=lambda pair: (-pair[1], pair[0]))
    return ranked


def best_item(pool: ItemPool, theta: float) -> str:
    """Id of the item with maximum information at theta (lowest id on ties)."""
    if not pool.candidates:
        raise PoolExhaustedError("cannot select from an empty pool")
    return _ranked(pool, theta)[0][0]


def cluster_by_information(
    pool: ItemPool, theta: float, epsilon: float = DEFAULT_CLUSTER_EPSILON
) -> InformationClusterSet:
    """Partition the pool into groups of equal information, best group first.

    Equality is relative: an item joins the current cluster while its
    information is within epsilon * (cluster's top value) of that value.
    """
    if not pool.candidates:
        raise PoolExhaustedError("cannot cluster an empty pool")
    ranked = _ranked(pool, theta)

    clusters: list[InformationCluster] = []
    group: list[str] = []
    group_info = 0.0
    for item_id, info in ranked:
        if not group:
            group = [item_id]
            group_info = info
            continue
        if group_info - info <= epsilon * group_info:
            group.append(item_id)
        else:
            clusters.append(InformationCluster(tuple(group), group_info))
            group = [item_id]
            group_info = info
    clusters.append(InformationCluster(tuple(group), group_info))
    return InformationClusterSet(tuple(clusters))


def candidate_slate(
    pool: ItemPool, theta: float, k: int, epsilon: float, rng: random.Random
) -> list[str]:
    """The k-slot candidate list for cluster-aware selection.

    Walks clusters best-first, taking whole clusters while they fit; the
    first cluster that does not fit contributes a uniform
    without-replacement sample for the remaining slots.
    """
    candidates: list[str] = []
    for cluster in cluster_by_information(pool, theta, epsilon).clusters:
        remaining = k - len(candidates)
        if remaining <= 0:
            break
        ids = sorted(cluster.item_ids)
        if len(ids) <= remaining:
            candidates.extend(ids)
        else:
            candidates.extend(rng.sample(ids, remaining))
    return candidates


def select_next(
    pool: ItemPool,
    theta: float,
    strategy: SelectionStrategy,
    rng: random.Random,
) -> str:
    """Choose the next item id for ability theta under the given strategy.

    A pool smaller than k degrades gracefully to using the whole pool.
    """
    if not pool.candidates:
        raise PoolExhaustedError("cannot select from an empty pool")

    if strategy.kind is StrategyKind.BEST_ITEM:
        return best_item(pool, theta)

    if strategy.kind is StrategyKind.TOP_K_RANDOM:
        ranked = _ranked(pool, theta)
        top = ranked[: min(strategy.k, len(ranked))]
        return top[rng.randrange(len(top))][0]

    candidates = candidate_slate(pool, theta, strategy.k, strategy.epsilon, rng)
    return candidates[rng.randrange(len(candidates))]
