"""Graph coloring by iterated polynomial recoloring.

Colors are identified with degree-2 polynomials over a prime field F_p: a
color q < p^3 has coefficients (a, b, c) = base-p digits of q and the node
evaluates f_q at a point x, adopting the pair (x, f_q(x)) as its new color.
Two conflicting nodes can only collide at roots of their polynomial
difference, so each neighbor rules out at most 2 of the >= 3*deg candidate
points and a free point always exists. Iterating shrinks any k-coloring to
a palette polynomial in the relevant degree bound.

Two modes share the kernel: proper recoloring (a point is admissible only
if no conflicting neighbor hits it) and weight-budgeted recoloring for
defective coloring (a point is admissible when the weight of neighbors
hitting it stays below a per-node budget; such edges may go monochromatic
and are "lost").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .ntheory import NumberTheoryTables, precompute_tables, prime_in_range
from .parallel import map_tiles
from .sorting import stable_order_u64
from .workcount import WorkCounter, charge

MAX_FIELD = 1 << 23  # int64 stays exact for all modular products below this


@dataclass
class Coloring:
    colors: np.ndarray  # int64 per node, values in [0, num_colors)
    num_colors: int
    mono_weight: float = 0.0


def _mod_pow(base: np.ndarray, exp: int, p: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base % p
    e = exp
    while e > 0:
        if e & 1:
            result = (result * b) % p
        b = (b * b) % p
        e >>= 1
    return result


def _poly_coeffs(q: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Base-p digits of each color: q = a p^2 + b p + c."""
    c = q % p
    rest = q // p
    b = rest % p
    a = (rest // p) % p
    return a, b, c


def _eval_poly(a, b, c, x, p: int) -> np.ndarray:
    return ((a * x % p) * x + b * x + c) % p


def _conflict_roots(
    dq_a: np.ndarray, dq_b: np.ndarray, dq_c: np.ndarray, p: int, sqrt_tab: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Roots of a x^2 + b x + c over F_p (p odd). Returns (r1, ok1, r2, ok2)."""
    a, b, c = dq_a % p, dq_b % p, dq_c % p
    n = len(a)
    r1 = np.zeros(n, dtype=np.int64)
    r2 = np.zeros(n, dtype=np.int64)
    ok1 = np.zeros(n, dtype=bool)
    ok2 = np.zeros(n, dtype=bool)
    lin = (a == 0) & (b != 0)
    if lin.any():
        inv_b = _mod_pow(b[lin], p - 2, p)
        r1[lin] = (p - c[lin]) * inv_b % p
        ok1[lin] = True
    quad = a != 0
    if quad.any():
        disc = (b[quad] * b[quad] - 4 * a[quad] * c[quad]) % p
        s = sqrt_tab[disc]
        has = s >= 0
        inv_2a = _mod_pow(2 * a[quad] % p, p - 2, p)
        root_a = (p - b[quad] + s) % p * inv_2a % p
        root_b = (p - b[quad] + (p - s) % p) % p * inv_2a % p
        idx = np.flatnonzero(quad)
        r1[idx] = np.where(has, root_a, 0)
        ok1[idx] = has
        r2[idx] = np.where(has, root_b, 0)
        ok2[idx] = has & (root_b != root_a)
    # a == 0 and b == 0: constant nonzero difference, no roots
    return r1, ok1, r2, ok2


def _smallest_admissible(
    groups: np.ndarray,
    items: np.ndarray,
    admissible: np.ndarray,
    n_groups: int,
    domain: np.ndarray,
) -> np.ndarray:
    """Per group, the smallest item in [0, domain[g]) that is absent from the
    given (group, item) pairs or present with admissible=True.

    Pairs must be unique; groups with no pairs get 0. Raises if some group
    has no valid item (cannot happen for in-contract callers).
    """
    out = np.zeros(n_groups, dtype=np.int64)
    if len(groups) == 0:
        return out
    big = np.int64(1) << 60
    order = np.lexsort((items, groups))
    g = groups[order]
    it = items[order]
    adm = admissible[order]
    starts = np.flatnonzero(np.r_[True, g[1:] != g[:-1]])
    ranks = np.arange(len(g), dtype=np.int64) - np.repeat(starts, np.diff(np.r_[starts, len(g)]))
    # smallest absent item: first rank where the rank-th present item exceeds it
    cand_absent = np.where(it > ranks, ranks, big)
    seg_absent = np.minimum.reduceat(cand_absent, starts)
    counts = np.diff(np.r_[starts, len(g)])
    seg_absent = np.where(seg_absent == big, counts, seg_absent)
    # smallest present admissible item
    cand_adm = np.where(adm, it, big)
    seg_adm = np.minimum.reduceat(cand_adm, starts)
    gids = g[starts]
    seg_absent = np.where(seg_absent < domain[gids], seg_absent, big)
    best = np.minimum(seg_absent, seg_adm)
    if np.any(best >= big):
        raise RuntimeError("no admissible point for some node; invariant broken")
    out[gids] = best
    # groups without pairs keep 0, valid since their whole domain is free
    return out


def _compact_colors(colors: np.ndarray) -> tuple[np.ndarray, int]:
    used, dense = np.unique(colors, return_inverse=True)
    return dense.astype(np.int64), len(used)


def _kernel_round(
    n: int,
    colors: np.ndarray,
    k: int,
    kprime: int,
    tables: NumberTheoryTables,
    src: np.ndarray,
    dst: np.ndarray,
    weights: np.ndarray | None,
    domain: np.ndarray,
    budget: np.ndarray | None,
    zero_budget_nodes: np.ndarray | None,
    work: WorkCounter | None,
    threads: int = 1,
) -> np.ndarray:
    """One recoloring round over conflict slots (src -> dst).

    weights/budget None: proper mode, every hit point is inadmissible.
    Otherwise a point is admissible while its hit weight stays below
    budget[v]; nodes flagged in zero_budget_nodes require hit weight 0.
    Returns the new colors (compacted later by the caller).
    """
    p = prime_in_range(tables, kprime)
    if p >= MAX_FIELD:
        raise ValueError("instance too large: prime field exceeds exact-arithmetic range")
    if k > p**3:
        raise RuntimeError("palette does not fit the field; k' selection broken")
    sqrt_tab = tables.sqrt_table(p, work)
    a_all, b_all, c_all = _poly_coeffs(colors, p)
    charge(work, "recolor_slots", len(src) + n)

    def per_tile(lo: int, hi: int) -> tuple[np.ndarray, ...]:
        s, d = src[lo:hi], dst[lo:hi]
        da = a_all[d] - a_all[s]
        db = b_all[d] - b_all[s]
        dc = c_all[d] - c_all[s]
        return _conflict_roots(da, db, dc, p, sqrt_tab)

    parts = map_tiles(per_tile, len(src), threads)
    if parts:
        r1 = np.concatenate([t[0] for t in parts])
        ok1 = np.concatenate([t[1] for t in parts])
        r2 = np.concatenate([t[2] for t in parts])
        ok2 = np.concatenate([t[3] for t in parts])
    else:
        r1 = r2 = np.empty(0, dtype=np.int64)
        ok1 = ok2 = np.empty(0, dtype=bool)

    vv = np.concatenate([src, src])
    rr = np.concatenate([r1, r2])
    hit = np.concatenate([ok1, ok2]) & (rr < domain[vv])
    vv, rr = vv[hit], rr[hit]
    if weights is not None:
        ws = np.concatenate([weights, weights])[hit]
    key = vv * p + rr
    order = stable_order_u64(key, work)
    key_s = key[order]
    uniq_mask = np.r_[True, key_s[1:] != key_s[:-1]] if len(key_s) else np.empty(0, dtype=bool)
    ukey = key_s[uniq_mask]
    uv, ur = ukey // p, ukey % p
    if weights is None:
        adm = np.zeros(len(ukey), dtype=bool)
    else:
        groups = np.cumsum(uniq_mask) - 1
        score = np.zeros(len(ukey), dtype=np.float64)
        np.add.at(score, groups, ws[order])
        # zero hit weight is always harmless, whatever the budget
        adm = (score < budget[uv]) | (score <= 0.0)
        if zero_budget_nodes is not None:
            strict = zero_budget_nodes[uv]
            adm[strict] = score[strict] <= 0.0
    x_star = _smallest_admissible(uv, ur, adm, n, domain)
    new_colors = x_star * p + _eval_poly(a_all, b_all, c_all, x_star, p)
    return new_colors


def _conflict_slots(g: Graph, orientation: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    owners = g.slot_owners()
    if orientation is None:
        return owners, g.nbrs
    keep = np.asarray(orientation, dtype=bool)
    return owners[keep], g.nbrs[keep]


def reduce_colors_once(
    g: Graph,
    current: Coloring,
    tables: NumberTheoryTables,
    delta: int | None = None,
    orientation: np.ndarray | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> Coloring:
    """One proper polynomial recoloring round; palette stays proper.

    delta bounds the conflict degree (full degree, or outdegree when an
    orientation restricts conflicts); computed from the graph if omitted.
    """
    src, dst = _conflict_slots(g, orientation)
    cdeg = np.bincount(src, minlength=g.n).astype(np.int64)
    d_eff = int(cdeg.max()) if g.n and len(src) else 0
    if delta is None:
        delta = d_eff
    elif d_eff > delta:
        raise ValueError("delta smaller than actual conflict degree")
    k = current.num_colors
    kprime = max(math.ceil(k ** (1.0 / 3.0)), 3 * delta, 3)
    p = prime_in_range(tables, kprime)
    domain = np.minimum(np.maximum(3 * cdeg, 1), p)
    new_colors = _kernel_round(
        g.n, current.colors, k, kprime, tables, src, dst, None, domain, None, None, work, threads
    )
    if len(src) and np.any(new_colors[src] == new_colors[dst]):
        raise RuntimeError("recoloring produced a monochromatic conflict edge")
    dense, used = _compact_colors(new_colors)
    return Coloring(colors=dense, num_colors=used)


def tables_limit_for(n: int, delta: int, inv_eps: int = 1) -> int:
    kprime = max(math.ceil(max(n, 1) ** (1.0 / 3.0)), 3 * delta, 3 * inv_eps, 3)
    return 2 * kprime + 2


def color_delta_squared(
    g: Graph,
    orientation: np.ndarray | None = None,
    tables: NumberTheoryTables | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> Coloring:
    """Proper coloring with a palette polynomial in the max conflict degree.

    Starts from node ids and runs recoloring rounds until the palette stops
    shrinking. With an orientation, conflicts are out-edges only; the
    result still has no monochromatic edge in either mode.
    """
    src, _dst = _conflict_slots(g, orientation)
    delta = int(np.bincount(src, minlength=g.n).max()) if g.n and len(src) else 0
    if tables is None:
        tables = precompute_tables(tables_limit_for(g.n, delta))
    cur = Coloring(colors=np.arange(g.n, dtype=np.int64), num_colors=max(g.n, 1))
    while True:
        nxt = reduce_colors_once(
            g, cur, tables, delta=delta, orientation=orientation, work=work, threads=threads
        )
        if nxt.num_colors >= cur.num_colors:
            return cur
        cur = nxt


def _phase1_iterations(n: int) -> int:
    return max(1, math.ceil(math.log(max(math.log2(max(n, 2)), 2.0), 1.5)))


def defective_coloring(
    g: Graph,
    eps: float,
    tables: NumberTheoryTables | None = None,
    work: WorkCounter | None = None,
    threads: int = 1,
) -> Coloring:
    """Color with at most 3*ceil(1/eps) colors, monochromatic weight <= eps
    times the total edge weight.

    Phase 1 runs budgeted polynomial rounds, each losing at most an
    eps/(2I) fraction of edge weight to monochromatic edges; phase 2
    orients edges from high to low phase-1 color and greedily recolors one
    phase-1 class at a time into the final palette, losing at most eps/2.
    """
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    n = g.n
    weights = g.weights if g.weights is not None else np.ones(len(g.nbrs), dtype=np.float64)
    total_w = float(np.sum(weights)) / 2.0
    iters = _phase1_iterations(n)
    eps1 = eps / (2.0 * iters)
    inv_eps1 = math.floor(1.0 / eps1)
    palette2 = 3 * math.ceil(1.0 / eps)
    if tables is None:
        tables = precompute_tables(tables_limit_for(n, 0, max(math.ceil(1.0 / eps1), 1)))

    owners = g.slot_owners()
    alive = np.ones(len(g.nbrs), dtype=bool)
    colors = np.arange(n, dtype=np.int64)
    k = max(n, 1)
    for _ in range(iters):
        src, dst, w = owners[alive], g.nbrs[alive], weights[alive]
        deg = np.bincount(src, minlength=n).astype(np.int64)
        incident = np.zeros(n, dtype=np.float64)
        np.add.at(incident, src, w)
        kprime = max(math.ceil(k ** (1.0 / 3.0)), 3 * math.ceil(1.0 / eps1), 3)
        p = prime_in_range(tables, kprime)
        low = deg <= inv_eps1
        domain = np.where(low, np.minimum(3 * deg + 1, p), min(3 * math.ceil(1.0 / eps1), p))
        domain = np.maximum(domain, 1).astype(np.int64)
        budget = eps1 * incident
        new_colors = _kernel_round(
            n, colors, k, kprime, tables, src, dst, w, domain, budget, low, work, threads
        )
        lost = new_colors[src] == new_colors[dst]
        if np.any(lost & low[src] & (w > 0)):
            raise RuntimeError("low-degree node lost edge weight in phase 1")
        alive_idx = np.flatnonzero(alive)
        alive[alive_idx[lost]] = False
        colors, k_new = _compact_colors(new_colors)
        charge(work, "defective_phase1", len(src))
        if k_new >= k:
            break
        k = k_new

    # phase 2: orient high -> low phase-1 color, recolor classes in order
    src, dst, w = owners[alive], g.nbrs[alive], weights[alive]
    out_mask = colors[src] > colors[dst]
    osrc, odst, ow = src[out_mask], dst[out_mask], w[out_mask]
    outdeg = np.bincount(osrc, minlength=n).astype(np.int64)
    outw = np.zeros(n, dtype=np.float64)
    np.add.at(outw, osrc, ow)
    final = np.zeros(n, dtype=np.int64)
    slot_class = colors[osrc]
    order = stable_order_u64(slot_class * np.int64(n) + osrc)
    osrc, odst, ow = osrc[order], odst[order], ow[order]
    slot_class = slot_class[order]
    class_bounds = np.searchsorted(slot_class, np.arange(k + 1))
    node_order = stable_order_u64(colors)
    node_bounds = np.searchsorted(colors[node_order], np.arange(k + 1))
    low_out = outdeg < math.ceil(1.0 / eps)
    dom2 = np.full(n, palette2, dtype=np.int64)
    for c in range(k):
        lo, hi = int(class_bounds[c]), int(class_bounds[c + 1])
        members = node_order[node_bounds[c] : node_bounds[c + 1]]
        if len(members) == 0:
            continue
        s, d, wv = osrc[lo:hi], odst[lo:hi], ow[lo:hi]
        head_color = final[d]
        key = s * np.int64(palette2) + head_color
        korder = stable_order_u64(key)
        key_s = key[korder]
        uniq = np.r_[True, key_s[1:] != key_s[:-1]] if len(key_s) else np.empty(0, dtype=bool)
        ukey = key_s[uniq]
        grp = np.cumsum(uniq) - 1
        wsum = np.zeros(len(ukey), dtype=np.float64)
        np.add.at(wsum, grp, wv[korder])
        uv, uc = ukey // palette2, ukey % palette2
        thr = 0.5 * eps * outw[uv]
        adm = (wsum < thr) | (wsum <= 0.0)
        strict = low_out[uv]
        adm[strict] = wsum[strict] <= 0.0
        chosen = _smallest_admissible(uv, uc, adm, n, dom2)
        final[members] = chosen[members]
        charge(work, "defective_phase2", hi - lo + len(members))
    mono = float(np.sum(weights[final[owners] == final[g.nbrs]])) / 2.0
    if mono > eps * total_w + 1e-9 * max(total_w, 1.0):
        raise RuntimeError("defective coloring exceeded its monochromatic budget")
    return Coloring(colors=final, num_colors=palette2, mono_weight=mono)
