"""Closed-walk combinatorics behind the moment method.

Expanding ``(1/n) E tr W^k`` gives a sum over closed index walks
``i_0 -> i_1 -> ... -> i_k = i_0``.  Walks that differ by a relabeling of
indices are grouped into classes, each represented by its canonical walk:
the first visit to a new vertex always uses the smallest unused label, so the
label sequence is a restricted growth string starting and ending at 1.

A walk crossing some edge exactly once contributes zero for mean-zero
entries.  Among the rest, walks on ``k/2 + 1`` vertices crossing each edge
exactly twice trace a tree; they give the leading order and are in bijection
with Dyck paths of length ``k``.
"""

import csv
import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

ZEROED_OUT = "ZeroedOut"
TREE_PAIR = "TreePair"
SUB_LEADING = "SubLeading"

MAX_WALK_LENGTH = 10
# class-assignment enumeration is exact; beyond this many assignments we
# fall back to the all-maps sum with an error bound
MAX_ASSIGNMENTS = 2_000_000


@dataclass(frozen=True)
class CanonicalWalk:
    """Canonical representative ``(c_0, ..., c_k)`` of a class of closed walks."""

    seq: tuple

    def __post_init__(self):
        seq = tuple(int(c) for c in self.seq)
        if len(seq) < 2 or seq[0] != 1 or seq[-1] != 1:
            raise ValueError(f"canonical walk must start and end at 1: {seq}")
        top = 0
        for c in seq:
            if c < 1 or c > top + 1:
                raise ValueError(f"not a restricted growth sequence: {seq}")
            top = max(top, c)
        object.__setattr__(self, "seq", seq)

    @property
    def k(self):
        return len(self.seq) - 1

    @property
    def t(self):
        return max(self.seq)

    def steps(self):
        return zip(self.seq[:-1], self.seq[1:])


def _as_walk(c):
    return c if isinstance(c, CanonicalWalk) else CanonicalWalk(tuple(c))


def enumerate_canonical_walks(k):
    """All canonical closed walks of length ``k``, grouped by vertex count.

    Returns
    -------
    dict
        ``t -> list of CanonicalWalk`` for ``t = 1..k``, each list in
        lexicographic order.  The total count is the Bell number ``B_k``,
        since a class of walks is a set partition of the ``k`` time steps.
    """
    if not 1 <= k <= MAX_WALK_LENGTH:
        raise ValueError(f"walk length must be in 1..{MAX_WALK_LENGTH}")
    out = {t: [] for t in range(1, k + 1)}
    seq = [1] * (k + 1)

    def extend(pos, top):
        if pos == k:
            out[top].append(CanonicalWalk(tuple(seq)))
            return
        for c in range(1, top + 2):
            seq[pos] = c
            extend(pos + 1, max(top, c))

    extend(1, 1)
    return out


@dataclass(frozen=True)
class WalkClass:
    tag: str
    vertices: tuple
    edges: dict  # (a, b) with a <= b -> crossing count; loops are (a, a)

    @property
    def tree_edges(self):
        return sorted(self.edges) if self.tag == TREE_PAIR else None


def edge_multiplicities(c):
    c = _as_walk(c)
    return dict(sorted(Counter((min(a, b), max(a, b)) for a, b in c.steps()).items()))


def classify_walk(c):
    """Tag a canonical walk as ZeroedOut, TreePair or SubLeading."""
    c = _as_walk(c)
    mult = edge_multiplicities(c)
    t, k = c.t, c.k
    if any(m == 1 for m in mult.values()):
        tag = ZEROED_OUT
    elif k % 2 == 0 and t == k // 2 + 1 and all(m == 2 for m in mult.values()):
        tag = TREE_PAIR
        # k/2 distinct edges on k/2 + 1 vertices of a connected walk: a tree
        if len(mult) != t - 1 or any(a == b for a, b in mult):
            raise AssertionError(f"TreePair walk {c.seq} does not trace a tree")
    else:
        tag = SUB_LEADING
    return WalkClass(tag, tuple(range(1, t + 1)), mult)


def tree_pair_walks(k):
    """The set Gamma_k of canonical walks tracing a tree, for even ``k``."""
    if k % 2:
        return []
    return [w for w in enumerate_canonical_walks(k).get(k // 2 + 1, [])
            if classify_walk(w).tag == TREE_PAIR]


# -- tree injection sums ---------------------------------------------------------

@dataclass(frozen=True)
class TreeSumResult:
    value: float
    exact: bool
    error_bound: float

    def __post_init__(self):
        if self.exact and self.error_bound != 0:
            raise ValueError("an exact result carries no error bound")
        if self.error_bound < 0:
            raise ValueError("error bound must be nonnegative")


def _tree_structure(edges, vertices=None):
    edges = [tuple(e) for e in edges]
    verts = set(vertices or ())
    for a, b in edges:
        verts.update((a, b))
    verts = sorted(verts)
    if not verts:
        raise ValueError("a tree needs at least one vertex")
    index = {v: i for i, v in enumerate(verts)}
    pairs = [(index[a], index[b]) for a, b in edges]
    if any(a == b for a, b in pairs) or len(set(map(frozenset, pairs))) != len(pairs):
        raise ValueError("not a tree: loop or repeated edge")
    if len(pairs) != len(verts) - 1:
        raise ValueError("not a tree: wrong number of edges")
    adj = {i: [] for i in range(len(verts))}
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    seen, queue = {0}, deque([0])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    if len(seen) != len(verts):
        raise ValueError("not a tree: disconnected")
    return len(verts), pairs, adj


def _falling_table(sizes, kmax):
    """``ff[c, m] = (sizes[c])_m``, the falling factorial, as floats."""
    ff = np.ones((len(sizes), kmax + 1))
    for m in range(1, kmax + 1):
        ff[:, m] = ff[:, m - 1] * np.maximum(sizes - (m - 1), 0)
    return ff


def _class_sum(t, pairs, profile, chunk=1 << 16):
    """Exact injection sum by enumerating class assignments of the vertices.

    An injection assigns each vertex an index; grouping injections by the
    class of each vertex, the edge product depends only on the classes, and
    the number of injections with given classes is a product of falling
    factorials of the class sizes.  Injections never map both ends of an
    edge to one index, so only off-diagonal profile values enter.
    """
    B = profile.block
    c = B.shape[0]
    sizes = profile.class_sizes
    ff = _falling_table(sizes, t)
    total = 0.0
    count = c ** t
    for start in range(0, count, chunk):
        idx = np.arange(start, min(start + chunk, count))
        digits = np.empty((len(idx), t), dtype=np.intp)
        rest = idx
        for v in range(t):
            digits[:, v] = rest % c
            rest = rest // c
        w = np.ones(len(idx))
        for a, b in pairs:
            w *= B[digits[:, a], digits[:, b]]
        for cls in range(c):
            w *= ff[cls, (digits == cls).sum(axis=1)]
        total += float(w.sum())
    return total


def _all_maps_sum(t, adj, sigma2):
    """``sum over all maps F`` of the edge product, by leaf elimination."""
    order, parent = [], {0: None}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        order.append(v)
        for u in adj[v]:
            if u not in parent:
                parent[u] = v
                queue.append(u)
    msg = {}
    for v in reversed(order):
        m = np.ones(len(sigma2))
        for u in adj[v]:
            if parent.get(u) == v:
                m *= sigma2 @ msg[u]
        msg[v] = m
    return float(msg[0].sum())


def tree_injection_sum(edges, profile, vertices=None):
    """``sum_F prod_{xy in E(T)} sigma2[F(x), F(y)]`` over injective labelings F.

    Parameters
    ----------
    edges : iterable of pairs
        Edges of the tree ``T``; vertex names are arbitrary hashables.
    profile : VarianceProfile
    vertices : iterable, optional
        Needed only for the one-vertex tree, which has no edges.

    Returns
    -------
    TreeSumResult
        Exact when the class enumeration is small enough.  Otherwise the sum
        over all maps, which exceeds the injective sum by the total over
        labelings where two vertices collide; for each of the ``C(t, 2)``
        vertex pairs that total is at most ``max(sigma2) * n * C**(t-2)`` with
        ``C`` the largest row sum, and that product is the error bound.
    """
    t, pairs, adj = _tree_structure(edges, vertices)
    c = profile.block.shape[0]
    if t == 1:
        # a single vertex has no collisions: every map is an injection
        return TreeSumResult(float(profile.n), True, 0.0)
    if c ** t <= MAX_ASSIGNMENTS:
        return TreeSumResult(_class_sum(t, pairs, profile), True, 0.0)
    sigma2 = profile.sigma2
    value = _all_maps_sum(t, adj, sigma2)
    C = float(profile.row_sums().max())
    bound = math.comb(t, 2) * float(sigma2.max()) * profile.n * C ** (t - 2)
    return TreeSumResult(value, False, bound)


def _canonical_tree(pairs, t):
    """Isomorphism-invariant string of an unrooted tree (min over roots)."""
    adj = {i: [] for i in range(t)}
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)

    def encode(v, parent):
        return "(" + "".join(sorted(encode(u, v) for u in adj[v] if u != parent)) + ")"

    return min(encode(r, None) for r in range(t))


def moment_prediction(profile, k):
    """Leading-order moment ``(1/n) sum_{c in Gamma_k} sum_F prod sigma2``.

    Odd ``k`` gives exactly 0.  Trees of the same shape share one
    evaluation, as the injection sum depends only on the shape.
    """
    if k < 0 or k > MAX_WALK_LENGTH:
        raise ValueError(f"k must be in 0..{MAX_WALK_LENGTH}")
    if k % 2:
        return TreeSumResult(0.0, True, 0.0)
    if k == 0:
        return TreeSumResult(1.0, True, 0.0)
    cache = {}
    value, bound, exact = 0.0, 0.0, True
    for w in tree_pair_walks(k):
        pairs = [(a - 1, b - 1) for a, b in classify_walk(w).edges]
        key = _canonical_tree(pairs, w.t)
        if key not in cache:
            cache[key] = tree_injection_sum(pairs, profile)
        r = cache[key]
        value += r.value
        bound += r.error_bound
        exact = exact and r.exact
    n = profile.n
    return TreeSumResult(value / n, exact, 0.0 if exact else bound / n)


# -- exact trace oracle ------------------------------------------------------------

MAX_ORACLE_K = 8
MAX_ORACLE_N = 12


def _moment_tables(spec, kmax):
    """``tables[m][i, j] = E[w_ij^m]`` for ``m = 0..kmax``."""
    law = spec.law
    if law.field != "real" or not law.discrete:
        raise ValueError("the exact trace oracle needs a real discrete entry law")
    scales = law.scale * np.sqrt(spec.profile.sigma2)
    return [np.asarray(law.raw_moment(m, scale=scales), dtype=float) for m in range(kmax + 1)]


@lru_cache(maxsize=None)
def _injections(n, t):
    if t > n:
        return np.empty((0, t), dtype=np.intp)
    return np.array(list(itertools.permutations(range(n), t)), dtype=np.intp).reshape(-1, t)


def _check_oracle(spec, k):
    if not 1 <= k <= MAX_ORACLE_K:
        raise ValueError(f"the exact trace oracle supports 1 <= k <= {MAX_ORACLE_K}")
    if spec.n > MAX_ORACLE_N:
        raise ValueError(f"the exact trace oracle supports n <= {MAX_ORACLE_N}")


def _walk_total(tables, n, c):
    inj = _injections(n, c.t)
    w = np.ones(len(inj))
    for (a, b), m in edge_multiplicities(c).items():
        w *= tables[m][inj[:, a - 1], inj[:, b - 1]]
    return math.fsum(w.tolist())


def walk_contribution(spec, c):
    """``(1/n) sum_{labelings} E w_i`` for one canonical walk class."""
    c = _as_walk(c)
    _check_oracle(spec, c.k)
    return _walk_total(_moment_tables(spec, c.k), spec.n, c) / spec.n


def exact_trace_moment(spec, k):
    """Exact ``(1/n) E tr W^k`` for small ensembles with discrete real entries.

    Sums the closed form ``prod_e E[w_e^{m_e}]`` over every labeling of every
    canonical walk.  ZeroedOut classes are skipped: an edge crossed once
    contributes the entry mean, which is zero for every supported law.
    """
    _check_oracle(spec, k)
    tables = _moment_tables(spec, k)
    total = []
    for walks in enumerate_canonical_walks(k).values():
        for c in walks:
            if classify_walk(c).tag != ZEROED_OUT:
                total.append(_walk_total(tables, spec.n, c))
    return math.fsum(total) / spec.n


# -- Dyck paths -------------------------------------------------------------------

def dyck_paths(k):
    """Height sequences ``(x_0, ..., x_k)`` of all Dyck paths of length ``k``."""
    if k < 0 or k % 2 or k > 16:
        raise ValueError("Dyck paths need even 0 <= k <= 16")
    out = []
    path = [0] * (k + 1)

    def extend(pos):
        if pos == k:
            if path[k - 1] == 1 or k == 0:
                out.append(tuple(path))
            return
        h = path[pos - 1] if pos else 0
        for step in (1, -1):
            nh = h + step
            # must be able to return to 0 in the steps left
            if 0 <= nh <= k - pos:
                path[pos] = nh
                extend(pos + 1)

    if k == 0:
        return [(0,)]
    extend(1)
    return out


def dyck_bijection(c):
    """Map a TreePair walk to the Dyck path of graph distances from ``c_0``."""
    c = _as_walk(c)
    cls = classify_walk(c)
    if cls.tag != TREE_PAIR:
        raise ValueError(f"walk {c.seq} is not a TreePair walk")
    adj = {v: [] for v in cls.vertices}
    for a, b in cls.edges:
        adj[a].append(b)
        adj[b].append(a)
    dist = {c.seq[0]: 0}
    queue = deque([c.seq[0]])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return tuple(dist[v] for v in c.seq)


# -- export -----------------------------------------------------------------------

def walk_rows(k_values):
    """Rows ``(k, t, seq, class, tree_edges)`` for every canonical walk."""
    rows = []
    for k in k_values:
        for t, walks in enumerate_canonical_walks(k).items():
            for c in walks:
                cls = classify_walk(c)
                edges = ";".join(f"{a}-{b}" for a, b in cls.tree_edges) if cls.tree_edges else ""
                rows.append((k, t, "-".join(map(str, c.seq)), cls.tag, edges))
    return rows


def class_tally(k_values):
    """``(k, t, class, count)`` rows."""
    tally = Counter((k, t, tag) for k, t, _, tag, _ in walk_rows(k_values))
    return [(k, t, tag, cnt) for (k, t, tag), cnt in sorted(tally.items())]


def write_walks_csv(path, k_values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "t", "seq", "class", "tree_edges"])
        w.writerows(walk_rows(k_values))
