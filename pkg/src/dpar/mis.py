"""Deterministic maximal independent set via certified half-sampling.

Every node derives a sampling level from its degree (marking probability
2^-level); the marking is derandomized level by level with the same
conditional-expectation rounding as the hitting machinery, but against a
richer potential stack:

  * the three low-regime bucket potentials shared with the hitting module,
  * a bucket potential over the "special" endpoints of an explicit edge
    bucketing of the candidate graph (controls how many candidate edges
    survive a halving), and
  * a linear potential over an auxiliary weighted graph whose realized
    value certifies that the selected set stays light: the mixed sum
    sum w(e) 2^-(k+k') grows by at most (1+gamma) per round.

Watcher nodes (high-degree nodes with a large in-neighborhood under the
(degree, id) orientation) audit the process: each keeps at least one and
at most a measured constant of marked in-neighbors. Marked nodes with few
marked out-neighbors are independent-ish - removing them and their
neighbors deletes a constant fraction of the degree mass - so iterating
yields a maximal independent set in a logarithmic number of sweeps.

All certified inequalities are asserted at runtime; violations raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coloring import color_delta_squared
from .graph import Graph, compact_subgraph
from .hitting import (
    EPS_DENOM_HIGH,
    EPS_DENOM_LOW,
    ParamSet,
    QuadPotential,
    _group_full_buckets,
    build_low_potentials,
    low_drift_rule,
    run_half,
)
from .parallel import tiled_sum
from .workcount import WorkCounter, charge

AUX_FACTOR_LOW = 100.0  # linear aux potential scale in the low regime
AUX_FACTOR_HIGH = 10.0
LOW_BOUND_BASE = 5.0  # five potentials, each mean <= 1 after the aux rescale
HIGH_BOUND_BASE = 3.0
ENTRY_MASS_CAP = 40.0  # per-watcher probability mass allowed into the high regime
ROUND_MASS_CAP = 45.0  # per-watcher mass after any single high-regime round


# --- instances -----------------------------------------------------------------


@dataclass
class MisAuxInstance:
    """Bipartite watcher/candidate structure plus a weighted candidate graph.

    Watchers (left) carry importances; candidates (right) carry sampling
    levels. edge_u/edge_v is the watch relation. aux_i/aux_j/aux_w is an
    undirected weighted graph over the candidates whose selected weight the
    pipeline keeps certified-light; vert_w are per-candidate weights folded
    into the same certificates.
    """

    imp: np.ndarray
    levels: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    aux_i: np.ndarray
    aux_j: np.ndarray
    aux_w: np.ndarray
    vert_w: np.ndarray
    size_param: int

    def __post_init__(self):
        self.imp = np.asarray(self.imp, dtype=np.float64)
        self.levels = np.asarray(self.levels, dtype=np.int64)
        self.edge_u = np.asarray(self.edge_u, dtype=np.int64)
        self.edge_v = np.asarray(self.edge_v, dtype=np.int64)
        self.aux_i = np.asarray(self.aux_i, dtype=np.int64)
        self.aux_j = np.asarray(self.aux_j, dtype=np.int64)
        self.aux_w = np.asarray(self.aux_w, dtype=np.float64)
        self.vert_w = np.asarray(self.vert_w, dtype=np.float64)
        n_u, n_v = len(self.imp), len(self.levels)
        if len(self.edge_u) != len(self.edge_v):
            raise ValueError("watch edge arrays must have equal length")
        if not (len(self.aux_i) == len(self.aux_j) == len(self.aux_w)):
            raise ValueError("aux edge arrays must have equal length")
        if len(self.vert_w) != n_v:
            raise ValueError("vert_w must have one entry per candidate")
        if len(self.imp) and self.imp.min() < 0:
            raise ValueError("negative importance")
        if len(self.levels) and self.levels.min() < 0:
            raise ValueError("negative level")
        if len(self.edge_u):
            if self.edge_u.min() < 0 or self.edge_u.max() >= n_u:
                raise ValueError("watch edge endpoint out of range on the left")
            if self.edge_v.min() < 0 or self.edge_v.max() >= n_v:
                raise ValueError("watch edge endpoint out of range on the right")
        if len(self.aux_i):
            lo = min(self.aux_i.min(), self.aux_j.min())
            hi = max(self.aux_i.max(), self.aux_j.max())
            if lo < 0 or hi >= n_v:
                raise ValueError("aux edge endpoint out of range")
            if np.any(self.aux_i == self.aux_j):
                raise ValueError("aux self-loop")
            code = (
                np.minimum(self.aux_i, self.aux_j) * np.int64(n_v)
                + np.maximum(self.aux_i, self.aux_j)
            )
            if len(np.unique(code)) != len(code):
                raise ValueError("duplicate aux edge")
        if len(self.aux_w) and self.aux_w.min() < 0:
            raise ValueError("negative aux weight")
        if len(self.vert_w) and self.vert_w.min() < 0:
            raise ValueError("negative vertex weight")
        if self.size_param < 2:
            raise ValueError("size parameter must be at least 2")

    @property
    def n_left(self) -> int:
        return len(self.imp)

    @property
    def n_right(self) -> int:
        return len(self.levels)

    def watch_mass(self) -> np.ndarray:
        """Per watcher: sum of 2^-level over watched candidates."""
        out = np.zeros(self.n_left, dtype=np.float64)
        np.add.at(out, self.edge_u, np.exp2(-self.levels[self.edge_v].astype(np.float64)))
        return out


# --- edge bucketing -------------------------------------------------------------


@dataclass
class EdgeBucketing:
    """Partition of a simple graph's edges into buckets of exactly b edges.

    Within a bucket every edge carries a distinct "special" endpoint:
    buckets formed from one owner's edge block use the far endpoints,
    buckets formed across b distinct owners use the owners. At most b^3
    edges stay leftover (unbucketed).
    """

    specials: np.ndarray  # node ids, bucket-major, each bucket exactly b long
    b: int
    edge_bucket: np.ndarray  # per input edge: bucket id, -1 when leftover
    leftover: int

    @property
    def n_buckets(self) -> int:
        return len(self.specials) // self.b if self.b else 0

    def potential(self, name: str = "phi_special") -> QuadPotential:
        """Bucket potential over the special endpoints with mean exactly 1."""
        k = self.n_buckets
        coef = np.full(k, 4.0 / (self.b * k) if k else 0.0)
        return QuadPotential(members=self.specials, coefs=coef, b=self.b, name=name)


def edge_buckets(
    n: int,
    src: np.ndarray,
    dst: np.ndarray,
    b: int,
    work: WorkCounter | None = None,
) -> EdgeBucketing:
    """Bucket the edges of a simple graph given as unique undirected pairs.

    High-degree nodes (degree >= b) own their incident edges and chunk them
    into full buckets (special = far endpoint). Remaining edges are owned
    by one endpoint each and grouped by owner's leftover degree d: b owners
    at a time yield d buckets, the i-th built from each owner's i-th edge
    (special = owner). Only incomplete groups stay leftover, fewer than b^3
    edges in total.
    """
    if b < 2:
        raise ValueError("bucket size must be at least 2")
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    m = len(src)
    if len(dst) != m:
        raise ValueError("edge arrays must have equal length")
    if m == 0:
        return EdgeBucketing(
            specials=np.empty(0, dtype=np.int64),
            b=b,
            edge_bucket=np.empty(0, dtype=np.int64),
            leftover=0,
        )
    if src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n:
        raise ValueError("edge endpoint out of range")
    if np.any(src == dst):
        raise ValueError("self-loop")
    code = np.minimum(src, dst) * np.int64(n) + np.maximum(src, dst)
    if len(np.unique(code)) != m:
        raise ValueError("duplicate edge")

    deg = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
    high = deg >= b
    sh, dh = high[src], high[dst]
    owner = np.where(sh & ~dh, src, np.where(dh & ~sh, dst, np.minimum(src, dst)))
    other = src + dst - owner

    order = np.lexsort((other, owner))
    o_own, o_oth = owner[order], other[order]
    new_run = np.r_[True, o_own[1:] != o_own[:-1]]
    starts = np.flatnonzero(new_run)
    run_id = np.cumsum(new_run) - 1
    run_len = np.diff(np.r_[starts, m])
    pos = np.arange(m, dtype=np.int64) - starts[run_id]

    full_count = (run_len // b) * b
    in_full = pos < full_count[run_id]
    k1 = int(in_full.sum()) // b

    # leftover blocks of < b edges per owner enter the cross-owner phase
    d_rem = run_len % b
    run_owner = o_own[starts]
    r_order = np.lexsort((run_owner, d_rem))
    rd = d_rem[r_order]
    nz = rd > 0
    rz_runs = r_order[nz]  # run indices with a nonzero leftover block, (d, owner)-sorted
    rdz = rd[nz]
    d_new = np.r_[True, rdz[1:] != rdz[:-1]] if len(rdz) else np.empty(0, dtype=bool)
    d_sid = np.cumsum(d_new) - 1
    d_starts = np.flatnonzero(d_new)
    d_counts = np.diff(np.r_[d_starts, len(rdz)])
    pos_in_d = np.arange(len(rdz), dtype=np.int64) - (d_starts[d_sid] if len(rdz) else 0)
    kept = pos_in_d < (d_counts[d_sid] // b) * b if len(rdz) else np.empty(0, dtype=bool)

    kept_idx = np.flatnonzero(kept)
    n_parts = len(kept_idx) // b
    part_of_kept = np.arange(len(kept_idx), dtype=np.int64) // b
    part_d = rdz[kept_idx[::b]] if n_parts else np.empty(0, dtype=np.int64)
    part_base = np.zeros(n_parts + 1, dtype=np.int64)
    if n_parts:
        part_base[1:] = np.cumsum(part_d)
    k2 = int(part_base[-1])

    run_part = np.full(len(starts), -1, dtype=np.int64)
    run_slot = np.zeros(len(starts), dtype=np.int64)
    if len(kept_idx):
        run_part[rz_runs[kept_idx]] = part_of_kept
        run_slot[rz_runs[kept_idx]] = np.arange(len(kept_idx), dtype=np.int64) % b

    eb_sorted = np.full(m, -1, dtype=np.int64)
    eb_sorted[in_full] = np.arange(k1 * b, dtype=np.int64) // b

    rem_rank = pos - full_count[run_id]
    ph2 = ~in_full & (run_part[run_id] >= 0)
    ph2_bucket = k1 + part_base[run_part[run_id[ph2]]] + rem_rank[ph2]
    eb_sorted[ph2] = ph2_bucket

    specials = np.full((k1 + k2) * b, -1, dtype=np.int64)
    specials[: k1 * b] = o_oth[in_full]
    specials[ph2_bucket * b + run_slot[run_id[ph2]]] = o_own[ph2]
    if len(specials) and specials.min() < 0:
        raise RuntimeError("edge bucketing left an unfilled bucket slot")

    edge_bucket = np.empty(m, dtype=np.int64)
    edge_bucket[order] = eb_sorted
    leftover = int(np.sum(eb_sorted < 0))
    if leftover >= b**3:
        raise RuntimeError("edge bucketing leftover exceeded b^3; construction broken")
    charge(work, "edge_buckets", m + n)
    return EdgeBucketing(specials=specials, b=b, edge_bucket=edge_bucket, leftover=leftover)


# --- linear aux potential --------------------------------------------------------


@dataclass
class LinearEdgePotential:
    """factor * (4 * selected edge weight + 2 * selected vertex weight) / W.

    W is the total edge plus vertex weight; under independent fair coins
    the mean is exactly factor. Utilities are negative (selecting a node
    costs vertex weight) and selected pairs cost edge weight, so the
    rounding drives the realized value toward the mean from above.
    """

    name: str
    factor: float
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_w: np.ndarray
    vert_w: np.ndarray
    norm: float

    @staticmethod
    def build(
        name: str,
        factor: float,
        edge_i: np.ndarray,
        edge_j: np.ndarray,
        edge_w: np.ndarray,
        vert_w: np.ndarray,
        n_cand: int,
    ) -> "LinearEdgePotential | None":
        """None when there is no weight at all (the potential vanishes)."""
        edge_i = np.asarray(edge_i, dtype=np.int64)
        edge_j = np.asarray(edge_j, dtype=np.int64)
        edge_w = np.asarray(edge_w, dtype=np.float64)
        vert_w = np.asarray(vert_w, dtype=np.float64)
        if len(vert_w) != n_cand:
            raise ValueError("vert_w must have one entry per candidate")
        norm = float(np.sum(edge_w)) + float(np.sum(vert_w))
        if norm <= 0.0:
            return None
        keep = edge_w > 0
        return LinearEdgePotential(
            name=name,
            factor=factor,
            edge_i=edge_i[keep],
            edge_j=edge_j[keep],
            edge_w=edge_w[keep],
            vert_w=vert_w,
            norm=norm,
        )

    def utils(self, n_cand: int) -> np.ndarray:
        return -(self.factor * 2.0 / self.norm) * self.vert_w

    def pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.edge_i, self.edge_j, (self.factor * 4.0 / self.norm) * self.edge_w

    def value(self, in_set: np.ndarray) -> float:
        both = in_set[self.edge_i] & in_set[self.edge_j]
        e_part = float(np.sum(self.edge_w[both]))
        v_part = float(np.sum(self.vert_w[in_set]))
        return self.factor * (4.0 * e_part + 2.0 * v_part) / self.norm

    def expectation(self) -> float:
        return self.factor

    def total_cost(self) -> float:
        return self.factor * 4.0 * float(np.sum(self.edge_w)) / self.norm


def _adaptive_eps(potentials: list, denom: int, b: int) -> tuple[float, float]:
    """eps small enough that eps * total pairwise cost stays below 1.

    That keeps the assembled potential within 1 of its mean sum, making the
    certified bounds provable rather than empirical.
    """
    c_tot = math.fsum(p.total_cost() for p in potentials)
    eps = 1.0 / (denom * max(b - 1, 1))
    if c_tot > 0:
        eps = min(eps, 1.0 / c_tot)
    return eps, c_tot


# --- low regime -------------------------------------------------------------------


def mis_low_prob_half(
    imp: np.ndarray,
    cand_levels: np.ndarray,
    edge_u: np.ndarray,
    edge_v: np.ndarray,
    aux_i: np.ndarray,
    aux_j: np.ndarray,
    aux_w: np.ndarray,
    vert_w: np.ndarray,
    b: int,
    gamma: float,
    params: ParamSet,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> tuple:
    """One low-regime halving with the full five-potential stack.

    The three hitting potentials watch the bipartite structure; the edge
    bucketing potential watches the candidate graph; the linear potential
    watches the auxiliary weights. The assembled total is certified at most
    5 + 100/gamma.
    """
    n_cand = len(cand_levels)
    u_ids = np.arange(len(imp), dtype=np.int64)
    lp = build_low_potentials(imp, u_ids, cand_levels, edge_u, edge_v, b, n_cand)
    pots = list(lp.pots)

    eb = edge_buckets(n_cand, aux_i, aux_j, b, work=work)
    if eb.n_buckets:
        pots.append(eb.potential())

    lin = LinearEdgePotential.build(
        "phi_aux", AUX_FACTOR_LOW / gamma, aux_i, aux_j, aux_w, vert_w, n_cand
    )
    if lin is not None:
        pots.append(lin)

    eps, c_tot = _adaptive_eps(pots, EPS_DENOM_LOW, b)
    bound = LOW_BOUND_BASE + AUX_FACTOR_LOW / gamma
    half = run_half(n_cand, pots, eps, bound, work=work, threads=threads)

    q, bad = low_drift_rule(lp, half.selected, b, params)
    half.per_left_drift = q
    half.bad_left = bad

    # per watcher: edges the bucket trim left out (count mod b per level)
    tracked = np.bincount(edge_u, minlength=len(imp))
    bucketed = np.zeros(len(imp), dtype=np.int64)
    if len(lp.tag_u):
        np.add.at(bucketed, lp.tag_u, b)
    trim_dropped_max = int((tracked - bucketed).max()) if len(imp) else 0

    phi_weighted = half.phi_values.get("phi_weighted", 0.0)
    markov_thr = 4.0 * float(b) ** params.bad_node_exp
    report = {
        "b": b,
        "gamma": gamma,
        "eps": eps,
        "cost_total": c_tot,
        "candidates": int(n_cand),
        "selected": int(half.selected.sum()),
        "phi": dict(half.phi_values),
        "phi_total": half.phi_total,
        "phi_bound": half.phi_bound,
        "aux_buckets": int(eb.n_buckets),
        "aux_leftover": int(eb.leftover),
        "bad_left": int(bad.sum()),
        "bad_importance": float(np.sum(imp[bad])),
        "tracked_importance": lp.tot_imp,
        "good_importance_bound": max(0.0, 1.0 - phi_weighted / markov_thr),
        "trim_dropped_max": trim_dropped_max,
    }
    return half, report


@dataclass
class LowMisResult:
    fixed: np.ndarray  # bool per candidate: survived down to level K
    u_good: np.ndarray
    rounds: list[dict]
    mixed_start: float  # aux mixed sum before the first halving
    drift_product: float  # product of (1 + gamma_i) over the rounds run


def _mixed_sum(
    inst: MisAuxInstance, node_mask: np.ndarray, lev_eff: np.ndarray, threads: int = 1
) -> float:
    """sum of aux edge weight at 2^-(k+k') plus vertex weight at 2^-k over
    the masked candidates (edges need both endpoints masked)."""
    both = node_mask[inst.aux_i] & node_mask[inst.aux_j]
    exps = lev_eff[inst.aux_i] + lev_eff[inst.aux_j]
    e_term = tiled_sum(
        np.where(both, inst.aux_w * np.exp2(-exps.astype(np.float64)), 0.0), threads
    )
    v_term = tiled_sum(
        np.where(node_mask, inst.vert_w * np.exp2(-lev_eff.astype(np.float64)), 0.0), threads
    )
    return float(e_term + v_term)


def mis_low_prob_regime(
    inst: MisAuxInstance,
    params: ParamSet,
    k_cap: int | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> LowMisResult:
    """Halve every candidate from its own level down to level K.

    All candidate levels must start above K. Candidates that survive all
    their halvings freeze at K ("fixed"); the rest die. Three families of
    certificates are asserted per round: the five-potential bound, the
    bipartite shrinkage bound, and the aux mixed-sum drift
    M_next <= (1+gamma) M; at the end the frozen aux weight is certified
    against twice the starting mixed sum.
    """
    k_cap = params.level_cap(inst.size_param) if k_cap is None else k_cap
    if len(inst.levels) and inst.levels.min() <= k_cap:
        raise ValueError("low regime requires every candidate level above K")
    log_n = math.ceil(math.log2(max(inst.size_param, 2)))
    max_rounds = int(inst.levels.max() - k_cap) if len(inst.levels) else 0

    u_good = np.ones(inst.n_left, dtype=bool)
    v_alive = np.ones(inst.n_right, dtype=bool)
    v_fixed = np.zeros(inst.n_right, dtype=bool)
    reports: list[dict] = []

    lev0 = np.maximum(inst.levels, k_cap)
    mixed_start = _mixed_sum(inst, v_alive, lev0, threads)
    mixed_cur = mixed_start
    drift = 1.0

    for i in range(max_rounds):
        cand = np.flatnonzero(v_alive)
        if len(cand) == 0:
            break
        gamma = params.gamma_low(i, inst.size_param)
        b = params.bucket_low(gamma, inst.size_param)
        if drift * (1.0 + gamma) > 2.0:
            raise RuntimeError("aux drift budget exhausted; too many low rounds")

        local = np.full(inst.n_right, -1, dtype=np.int64)
        local[cand] = np.arange(len(cand))
        keep_e = v_alive[inst.edge_v] & u_good[inst.edge_u]
        eu, ev = inst.edge_u[keep_e], local[inst.edge_v[keep_e]]
        cur_levels = inst.levels[cand] - i
        edges_before = len(eu)

        keep_a = v_alive[inst.aux_i] & v_alive[inst.aux_j]
        ai, aj = local[inst.aux_i[keep_a]], local[inst.aux_j[keep_a]]
        aw = inst.aux_w[keep_a] * np.exp2(
            -(cur_levels[ai] + cur_levels[aj]).astype(np.float64)
        )
        # per-candidate weight: own vertex weight plus edges into the frozen set
        vw = inst.vert_w[cand] * np.exp2(-cur_levels.astype(np.float64))
        for s, t in ((inst.aux_i, inst.aux_j), (inst.aux_j, inst.aux_i)):
            cross = v_alive[s] & v_fixed[t]
            if cross.any():
                contrib = inst.aux_w[cross] * np.exp2(
                    -(cur_levels[local[s[cross]]] + k_cap).astype(np.float64)
                )
                np.add.at(vw, local[s[cross]], contrib)

        half, report = mis_low_prob_half(
            inst.imp, cur_levels, eu, ev, ai, aj, aw, vw, b, gamma, params,
            work=work, threads=threads,
        )
        report["round"] = i
        report["regime"] = "mis_low"
        # the bucket trim may hide at most gamma 2^K edges of any watcher
        if report["trim_dropped_max"] > gamma * 2.0 ** k_cap:
            raise RuntimeError("bucket trim dropped too many edges of one watcher")

        dead = cand[~half.selected]
        v_alive[dead] = False
        new_levels = inst.levels[cand] - (i + 1)
        freeze = half.selected & (new_levels <= k_cap)
        v_fixed[cand[freeze]] = True
        v_alive[cand[freeze]] = False
        u_good &= ~half.bad_left

        keep_next = v_alive[inst.edge_v] & u_good[inst.edge_u]
        lhs = int(np.sum(keep_next)) + int(half.selected.sum())
        rhs = (2.0 / 3.0) * (edges_before + len(cand)) + params.additive_cap * log_n**2
        report["shrink_lhs"] = lhs
        report["shrink_rhs"] = rhs
        if lhs > rhs:
            raise RuntimeError("low-regime shrinkage invariant violated")

        lev_next = np.maximum(inst.levels - (i + 1), k_cap)
        mixed_next = _mixed_sum(inst, v_alive | v_fixed, lev_next, threads)
        report["mixed_sum"] = mixed_next
        if mixed_next > (1.0 + gamma) * mixed_cur + 1e-9 * max(mixed_cur, 1.0):
            raise RuntimeError("aux mixed-sum drift certificate violated")
        mixed_cur = mixed_next
        drift *= 1.0 + gamma
        reports.append(report)
        charge(work, "mis_low_round", len(cand) + edges_before + len(ai))

    if v_alive.any():
        raise RuntimeError("low regime left candidates above K after all rounds")

    lev_k = np.full(inst.n_right, k_cap, dtype=np.int64)
    frozen_weight = _mixed_sum(inst, v_fixed, lev_k, threads)
    if frozen_weight > 2.0 * mixed_start + 1e-9 * max(mixed_start, 1.0):
        raise RuntimeError("frozen aux weight exceeds twice the starting mixed sum")
    return LowMisResult(
        fixed=v_fixed,
        u_good=u_good,
        rounds=reports,
        mixed_start=mixed_start,
        drift_product=drift,
    )


# --- high regime -------------------------------------------------------------------


def mis_high_prob_half(
    imp: np.ndarray,
    n_cand: int,
    edge_u: np.ndarray,
    edge_v: np.ndarray,
    left_degree: np.ndarray,
    aux_i: np.ndarray,
    aux_j: np.ndarray,
    aux_w: np.ndarray,
    vert_w: np.ndarray,
    b: int,
    gamma: float,
    params: ParamSet,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> tuple:
    """One high-regime halving: normalized per-watcher hit potential plus
    the linear aux potential, certified at most 3 + 10/gamma."""
    members, tag_u, _ = _group_full_buckets(
        edge_u, np.zeros(len(edge_u), dtype=np.int64), edge_v, b
    )
    n_buckets = len(members) // b if b else 0
    tot_imp = float(np.sum(imp[left_degree > 0]))
    pots: list = []
    if n_buckets and tot_imp > 0:
        with np.errstate(divide="ignore"):
            coef = np.where(
                left_degree[tag_u] > 0,
                4.0 * imp[tag_u] / (tot_imp * left_degree[tag_u]),
                0.0,
            )
        pots.append(QuadPotential(members=members, coefs=coef, b=b, name="phi_hits", bucket_tag=tag_u))

    lin = LinearEdgePotential.build(
        "phi_aux", AUX_FACTOR_HIGH / gamma, aux_i, aux_j, aux_w, vert_w, n_cand
    )
    if lin is not None:
        pots.append(lin)

    eps, c_tot = _adaptive_eps(pots, EPS_DENOM_HIGH, b)
    bound = HIGH_BOUND_BASE + AUX_FACTOR_HIGH / gamma
    half = run_half(n_cand, pots, eps, bound, work=work, threads=threads)

    q = np.zeros(len(imp), dtype=np.float64)
    if pots and isinstance(pots[0], QuadPotential) and n_buckets:
        counts = pots[0].counts(half.selected).astype(np.float64)
        sq = (counts - b / 2.0) ** 2
        np.add.at(q, tag_u, 4.0 * sq)
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(left_degree > 0, q / left_degree, 0.0)
    bad = q > float(b) ** params.bad_node_exp
    half.per_left_drift = q
    half.bad_left = bad

    phi_hits = half.phi_values.get("phi_hits", 0.0)
    markov_thr = float(b) ** params.bad_node_exp
    report = {
        "b": b,
        "gamma": gamma,
        "eps": eps,
        "cost_total": c_tot,
        "candidates": int(n_cand),
        "selected": int(half.selected.sum()),
        "buckets": int(n_buckets),
        "phi": dict(half.phi_values),
        "phi_total": half.phi_total,
        "phi_bound": half.phi_bound,
        "bad_left": int(bad.sum()),
        "bad_importance": float(np.sum(imp[bad])),
        "tracked_importance": tot_imp,
        "good_importance_bound": max(0.0, 1.0 - phi_hits / markov_thr),
    }
    return half, report


@dataclass
class HighMisResult:
    selected: np.ndarray  # bool per candidate: still alive at the floor
    u_good: np.ndarray
    rounds: list[dict]
    mixed_start: float
    drift_product: float
    aux_selected_weight: float  # raw aux weight inside the selected set
    mass_violations: int  # watcher rounds that measured over the per-round cap


def mis_high_prob_regime(
    inst: MisAuxInstance,
    params: ParamSet,
    floor: int | None = None,
    k_cap: int | None = None,
    entry_mass_cap: float | None = ENTRY_MASS_CAP,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> HighMisResult:
    """Halve all candidates from level K down to the floor level.

    Candidate levels must be at most K; a node at level k joins the pool in
    round K-k (its level clamped to the round level) and is halved until
    the floor. Nodes below the floor are never candidates and survive
    outright. The per-round mixed-sum drift and the final selected aux
    weight (at most 2^(2 floor) * drift * starting mixed sum) are asserted.
    """
    k_cap = params.level_cap(inst.size_param) if k_cap is None else k_cap
    floor = params.high_floor_mis if floor is None else floor
    if len(inst.levels) and inst.levels.max() > k_cap:
        raise ValueError("high regime requires every candidate level at most K")
    if entry_mass_cap is not None and inst.n_left:
        mass = inst.watch_mass()
        if np.any(mass > entry_mass_cap + 1e-9):
            raise ValueError(f"watcher probability mass above {entry_mass_cap} at entry")

    v_alive = np.ones(inst.n_right, dtype=bool)
    u_good = np.ones(inst.n_left, dtype=bool)
    reports: list[dict] = []
    lev0 = np.minimum(inst.levels, k_cap)
    mixed_start = _mixed_sum(inst, v_alive, lev0, threads)
    mixed_cur = mixed_start
    drift = 1.0
    mass_violations = 0

    for i in range(max(k_cap - floor, 0)):
        level = k_cap - i
        cand = np.flatnonzero(v_alive & (inst.levels >= level))
        if len(cand) == 0:
            charge(work, "mis_high_skip", 1)
            continue
        gamma = params.gamma_high_for(level)
        b = params.bucket_high(gamma)
        local = np.full(inst.n_right, -1, dtype=np.int64)
        local[cand] = np.arange(len(cand))
        is_cand = local >= 0

        keep_e = u_good[inst.edge_u] & v_alive[inst.edge_v] & is_cand[inst.edge_v]
        eu, ev = inst.edge_u[keep_e], local[inst.edge_v[keep_e]]
        cand_deg = np.zeros(inst.n_left, dtype=np.float64)
        np.add.at(cand_deg, eu, 1.0)

        lev_cur = np.minimum(inst.levels, level)
        keep_a = v_alive[inst.aux_i] & v_alive[inst.aux_j] & is_cand[inst.aux_i] & is_cand[inst.aux_j]
        ai, aj = local[inst.aux_i[keep_a]], local[inst.aux_j[keep_a]]
        aw = inst.aux_w[keep_a] * 2.0 ** (-2.0 * level)
        vw = inst.vert_w[cand] * 2.0 ** (-float(level))
        for s, t in ((inst.aux_i, inst.aux_j), (inst.aux_j, inst.aux_i)):
            cross = v_alive[s] & is_cand[s] & v_alive[t] & ~is_cand[t]
            if cross.any():
                contrib = inst.aux_w[cross] * np.exp2(
                    -(level + lev_cur[t[cross]]).astype(np.float64)
                )
                np.add.at(vw, local[s[cross]], contrib)

        half, report = mis_high_prob_half(
            inst.imp * u_good, len(cand), eu, ev, cand_deg, ai, aj, aw, vw,
            b, gamma, params, work=work, threads=threads,
        )
        report["round"] = i
        report["level"] = level
        report["regime"] = "mis_high"

        v_alive[cand[~half.selected]] = False
        u_good &= ~half.bad_left

        lev_next = np.minimum(inst.levels, level - 1)
        if inst.n_left:
            watch_next = np.zeros(inst.n_left, dtype=np.float64)
            keep_w = v_alive[inst.edge_v]
            np.add.at(
                watch_next,
                inst.edge_u[keep_w],
                np.exp2(-lev_next[inst.edge_v[keep_w]].astype(np.float64)),
            )
            over = int(np.sum((watch_next > ROUND_MASS_CAP + 1e-9) & u_good))
            report["mass_violations"] = over
            if over and params.mode == "paper":
                raise RuntimeError("watcher probability mass exceeded the per-round cap")
            mass_violations += over

        mixed_next = _mixed_sum(inst, v_alive, lev_next, threads)
        report["mixed_sum"] = mixed_next
        if mixed_next > (1.0 + gamma) * mixed_cur + 1e-9 * max(mixed_cur, 1.0):
            raise RuntimeError("aux mixed-sum drift certificate violated")
        mixed_cur = mixed_next
        drift *= 1.0 + gamma
        reports.append(report)
        charge(work, "mis_high_round", len(cand) + len(eu) + len(ai))

    both = v_alive[inst.aux_i] & v_alive[inst.aux_j]
    aux_sel = float(np.sum(inst.aux_w[both]))
    cap = 2.0 ** (2.0 * floor) * drift * mixed_start
    if aux_sel > cap + 1e-9 * max(cap, 1.0):
        raise RuntimeError("selected aux weight exceeds its certified cap")
    return HighMisResult(
        selected=v_alive,
        u_good=u_good,
        rounds=reports,
        mixed_start=mixed_start,
        drift_product=drift,
        aux_selected_weight=aux_sel,
        mass_violations=mass_violations,
    )


# --- the core selection lemma ---------------------------------------------------


@dataclass
class CoreMisResult:
    selected: np.ndarray  # bool per candidate
    u_good: np.ndarray  # bool per watcher: certified hit window
    hits: np.ndarray  # selected watched nodes per watcher
    hit_cap: float  # measured max hits over good watchers
    good_importance_fraction: float
    zero_hit_good: int  # good watchers stripped for ending with zero hits
    aux_selected_weight: float
    aux_base_weight: float  # sum over aux edges of w * 2^-(k+k'), levels clamped at K
    aux_ratio: float
    rounds: list[dict]
    work: WorkCounter


def core_mis_hitting(
    inst: MisAuxInstance,
    params: ParamSet | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> CoreMisResult:
    """Select candidates so every watcher keeps some selected watched node
    while the selected aux weight stays near its expectation.

    Requires per-watcher probability mass sum 2^-k in [5, 10] and no input
    vertex weights (the regimes derive their own). Candidates above level K
    go through the low regime first; survivors join the rest at level K and
    are halved down to the floor.
    """
    params = params or ParamSet.desk()
    work = work if work is not None else WorkCounter()
    k_cap = params.level_cap(inst.size_param)
    if np.any(inst.vert_w != 0):
        raise ValueError("core instance must not carry vertex weights")
    if inst.n_left:
        mass = inst.watch_mass()
        if np.any((mass < 5.0 - 1e-9) | (mass > 10.0 + 1e-9)):
            raise ValueError("watcher probability mass outside [5, 10]")

    low_mask = inst.levels > k_cap
    u_good = np.ones(inst.n_left, dtype=bool)
    rounds: list[dict] = []
    s_low = np.zeros(inst.n_right, dtype=bool)

    if low_mask.any():
        deg_low = np.zeros(inst.n_left, dtype=np.int64)
        np.add.at(deg_low, inst.edge_u[low_mask[inst.edge_v]], 1)
        u_low = deg_low >= max(params.degree_floor_for(inst.size_param), 1)
        v_low_ids = np.flatnonzero(low_mask)
        v_local = np.full(inst.n_right, -1, dtype=np.int64)
        v_local[v_low_ids] = np.arange(len(v_low_ids))
        keep_e = low_mask[inst.edge_v] & u_low[inst.edge_u]
        keep_a = low_mask[inst.aux_i] & low_mask[inst.aux_j]
        # cross edges into the rest of the graph fold into vertex weights
        vert_low = np.zeros(len(v_low_ids), dtype=np.float64)
        for s, t in ((inst.aux_i, inst.aux_j), (inst.aux_j, inst.aux_i)):
            cross = low_mask[s] & ~low_mask[t]
            if cross.any():
                np.add.at(
                    vert_low,
                    v_local[s[cross]],
                    inst.aux_w[cross] * np.exp2(-inst.levels[t[cross]].astype(np.float64)),
                )
        low_inst = MisAuxInstance(
            imp=inst.imp * u_low,
            levels=inst.levels[v_low_ids],
            edge_u=inst.edge_u[keep_e],
            edge_v=v_local[inst.edge_v[keep_e]],
            aux_i=v_local[inst.aux_i[keep_a]],
            aux_j=v_local[inst.aux_j[keep_a]],
            aux_w=inst.aux_w[keep_a],
            vert_w=vert_low,
            size_param=inst.size_param,
        )
        low_res = mis_low_prob_regime(low_inst, params, k_cap=k_cap, work=work, threads=threads)
        rounds.extend(low_res.rounds)
        u_good &= low_res.u_good | ~u_low
        s_low[v_low_ids[low_res.fixed]] = True

    v_high = ~low_mask | s_low
    lev_high_all = np.minimum(inst.levels, k_cap)
    if inst.n_left:
        mass_high = np.zeros(inst.n_left, dtype=np.float64)
        keep_m = v_high[inst.edge_v]
        np.add.at(
            mass_high,
            inst.edge_u[keep_m],
            np.exp2(-lev_high_all[inst.edge_v[keep_m]].astype(np.float64)),
        )
        if np.any(mass_high > ENTRY_MASS_CAP + 1e-9):
            raise RuntimeError(
                "watcher probability mass exceeds the entry cap after the low regime"
            )

    v_high_ids = np.flatnonzero(v_high)
    v_local = np.full(inst.n_right, -1, dtype=np.int64)
    v_local[v_high_ids] = np.arange(len(v_high_ids))
    keep_e = v_high[inst.edge_v] & u_good[inst.edge_u]
    keep_a = v_high[inst.aux_i] & v_high[inst.aux_j]
    high_inst = MisAuxInstance(
        imp=inst.imp * u_good,
        levels=lev_high_all[v_high_ids],
        edge_u=inst.edge_u[keep_e],
        edge_v=v_local[inst.edge_v[keep_e]],
        aux_i=v_local[inst.aux_i[keep_a]],
        aux_j=v_local[inst.aux_j[keep_a]],
        aux_w=inst.aux_w[keep_a],
        vert_w=np.zeros(len(v_high_ids), dtype=np.float64),
        size_param=inst.size_param,
    )
    high_res = mis_high_prob_regime(
        high_inst,
        params,
        floor=params.high_floor_mis,
        k_cap=k_cap,
        entry_mass_cap=None,  # already verified against the full watcher set
        work=work,
        threads=threads,
    )
    rounds.extend(high_res.rounds)
    u_good &= high_res.u_good

    selected = np.zeros(inst.n_right, dtype=bool)
    selected[v_high_ids[high_res.selected]] = True

    hits = np.zeros(inst.n_left, dtype=np.int64)
    np.add.at(hits, inst.edge_u, selected[inst.edge_v].astype(np.int64))
    zero_hit_good = int(np.sum(u_good & (hits == 0))) if inst.n_left else 0
    u_good &= hits > 0
    hit_cap = float(hits[u_good].max()) if u_good.any() else 0.0
    tot_imp = float(np.sum(inst.imp))
    good_frac = float(np.sum(inst.imp[u_good])) / tot_imp if tot_imp > 0 else 1.0

    both = selected[inst.aux_i] & selected[inst.aux_j]
    aux_sel = float(np.sum(inst.aux_w[both]))
    base = float(
        np.sum(
            inst.aux_w
            * np.exp2(-(lev_high_all[inst.aux_i] + lev_high_all[inst.aux_j]).astype(np.float64))
        )
    )
    aux_ratio = aux_sel / base if base > 0 else 0.0
    charge(work, "core_mis_finalize", inst.n_left + len(inst.edge_u) + len(inst.aux_i))
    return CoreMisResult(
        selected=selected,
        u_good=u_good,
        hits=hits,
        hit_cap=hit_cap,
        good_importance_fraction=good_frac,
        zero_hit_good=zero_hit_good,
        aux_selected_weight=aux_sel,
        aux_base_weight=base,
        aux_ratio=aux_ratio,
        rounds=rounds,
        work=work,
    )


# --- independent-ish sets on graphs ----------------------------------------------


@dataclass
class IndependentishResult:
    s_star: np.ndarray  # bool: selected nodes with few selected out-neighbors
    s_raw: np.ndarray  # bool: all selected nodes
    keys: np.ndarray  # per node: (degree, id) orientation key
    watchers: np.ndarray  # bool: audited nodes
    dropped_watchers: int  # audited nodes whose in-neighborhood mass fell short
    overshoot_drops: int  # audited nodes that shed their last in-neighbor
    removed_degree_fraction: float  # deg(s_star + neighbors) / |E|
    fallback: bool  # the defensive single-node selection fired
    core: CoreMisResult


def independentish_set(
    g: Graph,
    params: ParamSet | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> IndependentishResult:
    """One derandomized marking sweep of the graph.

    Nodes mark with probability min(32/2^ceil(log2 deg), 1), derandomized
    by the core selection so that audited nodes (degree >= 33 with at least
    a third of their edges incoming under the (degree, id) orientation)
    keep marked in-neighbors, and the aux weights keep the marked set
    sparse. Marked nodes with at most outdeg_cap marked out-neighbors form
    the output set.
    """
    params = params or ParamSet.desk()
    work = work if work is not None else WorkCounter()
    n = g.n
    deg = g.degrees().astype(np.int64)
    owners = g.slot_owners()
    key = deg * np.int64(n) + np.arange(n, dtype=np.int64)

    lg = np.zeros(n, dtype=np.int64)
    big = deg > 32
    if big.any():
        lg[big] = np.ceil(np.log2(deg[big].astype(np.float64))).astype(np.int64) - 5
    levels = lg

    in_mask = key[g.nbrs] < key[owners]
    indeg = np.bincount(owners[in_mask], minlength=n).astype(np.int64)
    well_oriented = 3 * indeg >= deg
    watchers = well_oriented & (deg >= 33)

    # greedy in-neighbor prefix until the probability mass reaches 5
    contrib = np.where(in_mask & watchers[owners], np.exp2(-levels[g.nbrs].astype(np.float64)), 0.0)
    cs = np.cumsum(contrib)
    prev = cs - contrib
    block_base = np.zeros(n, dtype=np.float64)
    has_slots = np.diff(g.offsets) > 0
    block_base[has_slots] = prev[g.offsets[:-1][has_slots]]
    local_prev = prev - block_base[owners]
    take = in_mask & watchers[owners] & (local_prev < 5.0)

    mass = np.zeros(n, dtype=np.float64)
    np.add.at(mass, owners[take], contrib[take])
    # per-step mass is at most 1, so the first crossing of 5 lands in [5, 6];
    # the overshoot branch (mass > 7: shed the last taken in-neighbor) stays
    # for symmetry with the stated rule but cannot fire
    overshoot = np.flatnonzero(mass > 7.0)
    for u in overshoot:
        lo, hi = g.offsets[u], g.offsets[u + 1]
        idx = np.flatnonzero(take[lo:hi])
        if len(idx):
            take[lo + idx[-1]] = False
            mass[u] -= contrib[lo + idx[-1]]
    valid = mass >= 5.0
    dropped = int(np.sum(watchers & ~valid))
    watchers &= valid
    take &= watchers[owners]
    if watchers.any() and not np.all(mass[watchers] <= 7.0):
        raise RuntimeError("audited in-neighborhood mass overshot; prefix rule broken")

    u_list = np.flatnonzero(watchers)
    u_rank = np.full(n, -1, dtype=np.int64)
    u_rank[u_list] = np.arange(len(u_list))
    h_u = u_rank[owners[take]]
    h_v = g.nbrs[take]

    weight = np.zeros(n, dtype=np.float64)
    np.add.at(weight, h_v, deg[owners[take]].astype(np.float64))

    uniq = owners < g.nbrs
    e_i, e_j = owners[uniq], g.nbrs[uniq]
    tail = np.where(key[e_i] < key[e_j], e_i, e_j)
    aux_w = weight[tail]

    inst = MisAuxInstance(
        imp=deg[u_list].astype(np.float64),
        levels=levels,
        edge_u=h_u,
        edge_v=h_v,
        aux_i=e_i,
        aux_j=e_j,
        aux_w=aux_w,
        vert_w=np.zeros(n, dtype=np.float64),
        size_param=max(n, 4),
    )
    core = core_mis_hitting(inst, params, work=work, threads=threads)
    s_raw = core.selected.copy()
    fallback = False
    if not s_raw.any() and n:
        # cannot happen when some candidate sits at or below the floor level;
        # keeps the outer loop progressing on adversarial inputs
        s_raw[int(np.argmax(key))] = True
        fallback = True

    out_in_s = np.zeros(n, dtype=np.int64)
    out_sel = s_raw[owners] & s_raw[g.nbrs] & (key[g.nbrs] > key[owners])
    np.add.at(out_in_s, owners[out_sel], 1)
    s_star = s_raw & (out_in_s <= params.outdeg_cap)

    touched = s_star.copy()
    touched[g.nbrs[s_star[owners]]] = True
    frac = float(np.sum(deg[touched])) / max(g.m, 1)
    charge(work, "independentish", n + len(g.nbrs))
    return IndependentishResult(
        s_star=s_star,
        s_raw=s_raw,
        keys=key,
        watchers=watchers,
        dropped_watchers=dropped,
        overshoot_drops=len(overshoot),
        removed_degree_fraction=frac,
        fallback=fallback,
        core=core,
    )


# --- maximal independent set ------------------------------------------------------


@dataclass
class MisResult:
    in_set: np.ndarray  # bool per node
    iterations: list[dict]
    work: WorkCounter


def _assert_maximal_independent(g: Graph, in_set: np.ndarray) -> None:
    owners = g.slot_owners()
    if np.any(in_set[owners] & in_set[g.nbrs]):
        raise RuntimeError("independence violated")
    covered = in_set.copy()
    covered[owners[in_set[g.nbrs]]] = True
    if not np.all(covered):
        raise RuntimeError("maximality violated")


def _greedy_class_union(sub: Graph, colors: np.ndarray, num_colors: int,
                        work: WorkCounter | None) -> np.ndarray:
    """Maximal independent subset: sweep color classes in ascending order,
    adding every member not blocked by an earlier choice."""
    owners = sub.slot_owners()
    slot_class = colors[owners]
    order = np.argsort(slot_class, kind="stable")
    s_owner, s_head = owners[order], sub.nbrs[order]
    class_bounds = np.searchsorted(slot_class[order], np.arange(num_colors + 1))
    node_order = np.argsort(colors, kind="stable")
    node_bounds = np.searchsorted(colors[node_order], np.arange(num_colors + 1))

    chosen = np.zeros(sub.n, dtype=bool)
    blocked = np.zeros(sub.n, dtype=bool)
    for c in range(num_colors):
        members = node_order[node_bounds[c] : node_bounds[c + 1]]
        if len(members) == 0:
            continue
        take = members[~blocked[members]]
        chosen[take] = True
        lo, hi = int(class_bounds[c]), int(class_bounds[c + 1])
        ow, hd = s_owner[lo:hi], s_head[lo:hi]
        blocked[hd[chosen[ow]]] = True
        charge(work, "class_union", (hi - lo) + len(members))
    return chosen


def maximal_independent_set(
    g: Graph,
    params: ParamSet | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> MisResult:
    """Deterministic maximal independent set.

    Per sweep: collect isolated nodes, run one independent-ish selection,
    properly color the selected subgraph along the (degree, id) orientation,
    sweep the classes into a maximal independent subset, keep it, and drop
    it with its neighborhood. The result is asserted maximal independent.
    """
    params = params or ParamSet.desk()
    work = work if work is not None else WorkCounter()
    in_set = np.zeros(g.n, dtype=bool)
    iterations: list[dict] = []
    cur = g
    to_orig = np.arange(g.n, dtype=np.int64)

    while cur.n:
        deg = cur.degrees()
        isolated = deg == 0
        if isolated.any():
            in_set[to_orig[isolated]] = True
            if isolated.all():
                break
            keep_edge = np.ones(len(cur.nbrs), dtype=bool)
            cur, _, sub_ids = compact_subgraph(cur, ~isolated, keep_edge, work)
            to_orig = to_orig[sub_ids]
            deg = cur.degrees()

        ind = independentish_set(cur, params, work=work, threads=threads)
        s_star = ind.s_star
        owners = cur.slot_owners()
        keep_edge = s_star[owners] & s_star[cur.nbrs]
        sub, _, sub_ids = compact_subgraph(cur, s_star, keep_edge, work)
        sub_key = ind.keys[sub_ids]
        out_slots = sub_key[sub.nbrs] > sub_key[sub.slot_owners()]
        col = color_delta_squared(sub, orientation=out_slots, work=work, threads=threads)
        chosen_sub = _greedy_class_union(sub, col.colors, col.num_colors, work)

        chosen = np.zeros(cur.n, dtype=bool)
        chosen[sub_ids[chosen_sub]] = True
        in_set[to_orig[chosen]] = True

        removed = chosen.copy()
        removed[cur.nbrs[chosen[owners]]] = True
        if not removed.any():
            raise RuntimeError("sweep made no progress")
        iterations.append(
            {
                "nodes": int(cur.n),
                "edges": int(cur.m),
                "selected_raw": int(ind.s_raw.sum()),
                "selected_star": int(s_star.sum()),
                "chosen": int(chosen.sum()),
                "removed": int(removed.sum()),
                "removed_degree_fraction": float(np.sum(deg[removed])) / max(cur.m, 1),
                "star_degree_fraction": ind.removed_degree_fraction,
                "palette": int(col.num_colors),
                "fallback": ind.fallback,
                "dropped_watchers": ind.dropped_watchers,
                "overshoot_drops": ind.overshoot_drops,
            }
        )
        keep = ~removed
        keep_edge = keep[owners] & keep[cur.nbrs]
        cur, _, sub_ids = compact_subgraph(cur, keep, keep_edge, work)
        to_orig = to_orig[sub_ids]

    _assert_maximal_independent(g, in_set)
    return MisResult(in_set=in_set, iterations=iterations, work=work)


def luby_mis_baseline(g: Graph, seed: int, work: WorkCounter | None = None) -> MisResult:
    """Randomized comparison baseline with the same work accounting.

    Per round every node marks with probability 1/(10 deg); marked nodes
    with no marked out-neighbor (under the (degree, id) orientation) join
    the set and are removed with their neighborhoods.
    """
    work = work if work is not None else WorkCounter()
    rng = np.random.default_rng(seed)
    in_set = np.zeros(g.n, dtype=bool)
    iterations: list[dict] = []
    cur = g
    to_orig = np.arange(g.n, dtype=np.int64)

    while cur.n:
        deg = cur.degrees()
        isolated = deg == 0
        if isolated.any():
            in_set[to_orig[isolated]] = True
            if isolated.all():
                break
            keep_edge = np.ones(len(cur.nbrs), dtype=bool)
            cur, _, sub_ids = compact_subgraph(cur, ~isolated, keep_edge, work)
            to_orig = to_orig[sub_ids]
            deg = cur.degrees()

        marked = rng.random(cur.n) < 1.0 / (10.0 * deg)
        key = deg * np.int64(cur.n) + np.arange(cur.n, dtype=np.int64)
        owners = cur.slot_owners()
        out_marked = marked[owners] & marked[cur.nbrs] & (key[cur.nbrs] > key[owners])
        has_marked_out = np.zeros(cur.n, dtype=bool)
        has_marked_out[owners[out_marked]] = True
        winners = marked & ~has_marked_out
        charge(work, "luby_round", cur.n + len(cur.nbrs))
        if not winners.any():
            iterations.append({"nodes": int(cur.n), "edges": int(cur.m), "chosen": 0})
            continue
        in_set[to_orig[winners]] = True
        removed = winners.copy()
        removed[cur.nbrs[winners[owners]]] = True
        iterations.append(
            {"nodes": int(cur.n), "edges": int(cur.m), "chosen": int(winners.sum())}
        )
        keep = ~removed
        keep_edge = keep[owners] & keep[cur.nbrs]
        cur, _, sub_ids = compact_subgraph(cur, keep, keep_edge, work)
        to_orig = to_orig[sub_ids]

    _assert_maximal_independent(g, in_set)
    return MisResult(in_set=in_set, iterations=iterations, work=work)
