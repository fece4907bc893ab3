"""Deterministic rounding of half-sampling by conditional expectations.

The object being rounded is a node subset S of an instance with per-node
utilities (any sign) and pairwise costs (nonnegative, parallel terms
allowed):

    F(S) = sum_{v in S} util(v) - sum_{(i,j,c): i in S, j in S} c

Including every node independently with probability 1/2 gives
E[F] = util_total/2 - cost_total/4, so some S achieves that much. To find
one deterministically, the cost pairs are defectively colored: pairs that
go monochromatic (at most an eps fraction of total cost) are written off,
and the remaining pairs never join two nodes of one class, so a whole
class can be decided in parallel. Processing classes in ascending order,
each node joins S exactly when its conditional score is nonnegative, which
never lowers the tracked expectation. The output is certified against

    F(S) >= util_total/2 - cost_total/4 - eps * cost_total.

max_cut_half applies the same schema to edge cuts: a node joins the side
opposite its heavier already-decided neighborhood, monochromatic edges
count as uncut, and the cut is certified >= (1/2 - eps) * total weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coloring import defective_coloring
from .graph import Graph, graph_from_directed_slots
from .ntheory import NumberTheoryTables
from .parallel import tiled_sum
from .sorting import stable_order_u64
from .workcount import WorkCounter, charge


@dataclass
class RoundingInstance:
    """Utilities per node plus a multiset of pairwise cost terms."""

    utils: np.ndarray  # float64, signed
    cost_i: np.ndarray  # int64 endpoints, i != j
    cost_j: np.ndarray
    cost_c: np.ndarray  # float64 >= 0
    eps: float

    def __post_init__(self):
        self.utils = np.asarray(self.utils, dtype=np.float64)
        self.cost_i = np.asarray(self.cost_i, dtype=np.int64)
        self.cost_j = np.asarray(self.cost_j, dtype=np.int64)
        self.cost_c = np.asarray(self.cost_c, dtype=np.float64)
        n = len(self.utils)
        if not (len(self.cost_i) == len(self.cost_j) == len(self.cost_c)):
            raise ValueError("cost arrays must have equal length")
        if len(self.cost_i) and (
            self.cost_i.min() < 0
            or self.cost_j.min() < 0
            or self.cost_i.max() >= n
            or self.cost_j.max() >= n
        ):
            raise ValueError("cost endpoint out of range")
        if np.any(self.cost_i == self.cost_j):
            raise ValueError("cost term with equal endpoints")
        if len(self.cost_c) and self.cost_c.min() < 0:
            raise ValueError("negative cost")
        if not (0.0 < self.eps <= 1.0):
            raise ValueError("eps must lie in (0, 1]")

    @property
    def n(self) -> int:
        return len(self.utils)


@dataclass
class RoundingResult:
    in_set: np.ndarray  # bool per node
    objective: float
    bound: float  # certified lower bound on the objective
    lost_cost: float  # cost written off to monochromatic pairs
    scores: np.ndarray  # conditional score each node was decided on
    num_classes: int = 0
    work: WorkCounter | None = field(default=None, repr=False)


def evaluate_objective(inst: RoundingInstance, in_set: np.ndarray, threads: int = 1) -> float:
    util_part = tiled_sum(np.where(in_set, inst.utils, 0.0), threads)
    both = in_set[inst.cost_i] & in_set[inst.cost_j]
    cost_part = tiled_sum(np.where(both, inst.cost_c, 0.0), threads)
    return util_part - cost_part


def local_round(
    inst: RoundingInstance,
    tables: NumberTheoryTables | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> RoundingResult:
    """Pick S with F(S) >= util_total/2 - (1/4 + eps) * cost_total."""
    n = inst.n
    util_total = tiled_sum(inst.utils, threads)
    cost_total = tiled_sum(inst.cost_c, threads)
    bound = 0.5 * util_total - (0.25 + inst.eps) * cost_total
    charge(work, "local_round", n + len(inst.cost_c))

    cost_graph = graph_from_directed_slots(
        n,
        np.concatenate([inst.cost_i, inst.cost_j]),
        np.concatenate([inst.cost_j, inst.cost_i]),
        np.concatenate([inst.cost_c, inst.cost_c]),
    )
    col = defective_coloring(cost_graph, inst.eps, tables=tables, work=work, threads=threads)
    colors = col.colors

    owners = cost_graph.slot_owners()
    heads = cost_graph.nbrs
    costs = cost_graph.weights
    alive = colors[owners] != colors[heads]

    in_set = np.zeros(n, dtype=bool)
    scores = np.zeros(n, dtype=np.float64)
    slot_class = np.where(alive, colors[owners], col.num_colors)
    order = stable_order_u64(slot_class * np.int64(n + 1) + owners)
    s_owner = owners[order]
    s_head = heads[order]
    s_cost = costs[order]
    s_class = slot_class[order]
    class_bounds = np.searchsorted(s_class, np.arange(col.num_colors + 1))
    node_order = stable_order_u64(colors)
    node_bounds = np.searchsorted(colors[node_order], np.arange(col.num_colors + 1))

    for c in range(col.num_colors):
        members = node_order[node_bounds[c] : node_bounds[c + 1]]
        if len(members) == 0:
            continue
        lo, hi = int(class_bounds[c]), int(class_bounds[c + 1])
        ow, hd, cc = s_owner[lo:hi], s_head[lo:hi], s_cost[lo:hi]
        decided = colors[hd] < c
        burden = np.where(decided & in_set[hd], cc, np.where(decided, 0.0, 0.5 * cc))
        acc = np.zeros(n, dtype=np.float64)
        np.add.at(acc, ow, burden)
        sc = inst.utils[members] - acc[members]
        scores[members] = sc
        in_set[members] = sc >= 0.0
        charge(work, "local_round", (hi - lo) + len(members))

    lost = tiled_sum(np.where(~alive, costs, 0.0), threads) / 2.0
    objective = evaluate_objective(inst, in_set, threads)
    if objective < bound:
        raise RuntimeError("rounding certificate violated")
    return RoundingResult(
        in_set=in_set,
        objective=objective,
        bound=bound,
        lost_cost=lost,
        scores=scores,
        num_classes=col.num_colors,
    )


@dataclass
class CutResult:
    side: np.ndarray  # bool per node, True = side S
    cut_weight: float
    bound: float


def max_cut_half(
    g: Graph,
    eps: float,
    tables: NumberTheoryTables | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> CutResult:
    """Cut of weight >= (1/2 - eps) of the total, found deterministically.

    Nodes are decided one defective class at a time; each joins the side
    opposite the heavier decided part of its neighborhood (ties go to S).
    Monochromatic edges are counted as uncut by the certificate.
    """
    n = g.n
    weights = g.weights if g.weights is not None else np.ones(len(g.nbrs), dtype=np.float64)
    total = tiled_sum(weights, threads) / 2.0
    bound = (0.5 - eps) * total
    col = defective_coloring(g, eps, tables=tables, work=work, threads=threads)
    colors = col.colors

    owners = g.slot_owners()
    heads = g.nbrs
    alive = colors[owners] != colors[heads]
    slot_class = np.where(alive, colors[owners], col.num_colors)
    order = stable_order_u64(slot_class * np.int64(n + 1) + owners)
    s_owner, s_head, s_w = owners[order], heads[order], weights[order]
    s_class = slot_class[order]
    class_bounds = np.searchsorted(s_class, np.arange(col.num_colors + 1))
    node_order = stable_order_u64(colors)
    node_bounds = np.searchsorted(colors[node_order], np.arange(col.num_colors + 1))

    side = np.zeros(n, dtype=bool)
    decided_mask = np.zeros(n, dtype=bool)
    for c in range(col.num_colors):
        members = node_order[node_bounds[c] : node_bounds[c + 1]]
        if len(members) == 0:
            continue
        lo, hi = int(class_bounds[c]), int(class_bounds[c + 1])
        ow, hd, wv = s_owner[lo:hi], s_head[lo:hi], s_w[lo:hi]
        dec = decided_mask[hd]
        to_s = np.zeros(n, dtype=np.float64)
        to_t = np.zeros(n, dtype=np.float64)
        np.add.at(to_s, ow, np.where(dec & side[hd], wv, 0.0))
        np.add.at(to_t, ow, np.where(dec & ~side[hd], wv, 0.0))
        side[members] = to_s[members] <= to_t[members]
        decided_mask[members] = True
        charge(work, "max_cut", (hi - lo) + len(members))
    cut = tiled_sum(np.where(side[owners] != side[heads], weights, 0.0), threads) / 2.0
    if cut < bound:
        raise RuntimeError("cut certificate violated")
    return CutResult(side=side, cut_weight=cut, bound=bound)
