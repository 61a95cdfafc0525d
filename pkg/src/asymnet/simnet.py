"""Similarity networks: local networks over a connected cover of domain(H).

Each local network depicts only the variables that help tell apart the
hypotheses of its edge.  Everything else (hypothesis priors, the full joint,
an equivalent multinet) is recovered from the locals.
"""

from __future__ import annotations

import itertools
import warnings
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import (
    TOL,
    Assignment,
    Cpt,
    DiscreteNetwork,
    JointTable,
    ValidationReport,
    Violation,
    _find_cycle,
    enumerate_joint,
    expand_to,
    free_parameter_count,
    order_of_arcs,
    validate_network,
)
from .errors import (
    AcyclicityError,
    ContractError,
    InconsistentEvidenceError,
    InconsistentSimnetError,
    ModelError,
    ModelValidationError,
    UndefinedConditionalError,
    ZeroContextWarning,
    ZeroPriorError,
)
from .inference import Factor, Posterior, marginal
from .multinet import (
    HypothesisSpace,
    Multinet,
    Point,
    _hyp_rooted,
    _reachable_mask,
    fit_hypothesis_cpts,
    prune_parents,
    restrict_network,
)

INCOHERENCE_TOL = 1e-6


class _Irrelevant:
    """Marker for a variable no local network depicts."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "IRRELEVANT"


IRRELEVANT = _Irrelevant()


@dataclass(frozen=True)
class Cover:
    hypothesis: HypothesisSpace
    edges: tuple[tuple[Point, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple(tuple(tuple(int(i) for i in pt) for pt in e) for e in self.edges)
        )

    def check(self) -> None:
        for i, edge in enumerate(self.edges):
            if not edge:
                raise ContractError(f"edge {i} is empty")
            for pt in edge:
                if pt not in self.hypothesis:
                    raise ContractError(f"edge {i} holds {pt!r}, which is outside domain(H)")

    def covers(self) -> bool:
        return {pt for e in self.edges for pt in e} == set(self.hypothesis.domain)

    def edges_containing(self, point: Point) -> list[int]:
        return [i for i, e in enumerate(self.edges) if point in e]


def is_connected_cover(c: Cover) -> bool:
    """True iff the hypergraph with points as nodes and edges as hyperedges is connected.

    Points that no edge touches count as separate components.
    """
    if not c.edges:
        raise ContractError("a cover needs at least one edge")
    c.check()
    parent = {pt: pt for pt in c.hypothesis.domain}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for edge in c.edges:
        root = find(edge[0])
        for pt in edge[1:]:
            parent[find(pt)] = root
    return len({find(pt) for pt in parent}) == 1


@dataclass(frozen=True)
class OrdinaryLocalNetwork:
    """A local network for cover edge ``edge`` over the ``depicted`` variables.

    ``retained`` names depicted variables deliberately kept although they are
    not connected to any hypothesis variable.
    """

    edge: int
    depicted: frozenset[str]
    network: DiscreteNetwork
    retained: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "depicted", frozenset(self.depicted))
        object.__setattr__(self, "retained", frozenset(self.retained))


@dataclass(frozen=True, eq=False)
class SimilarityNetwork:
    cover: Cover
    locals: tuple[OrdinaryLocalNetwork, ...]
    variables: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "locals", tuple(self.locals))
        universe = set(self.variables) | {v for l in self.locals for v in l.depicted}
        object.__setattr__(self, "variables", tuple(sorted(universe)))

    def __eq__(self, other):
        if not isinstance(other, SimilarityNetwork):
            return NotImplemented
        return (self.cover, self.locals, self.variables) == (other.cover, other.locals, other.variables)

    __hash__ = None

    @property
    def hypothesis(self) -> HypothesisSpace:
        return self.cover.hypothesis

    def local_for(self, edge: int) -> OrdinaryLocalNetwork:
        return self.locals[edge]

    def variable(self, vid: str):
        for l in self.locals:
            if vid in l.network:
                return l.network.var(vid)
        raise ContractError(f"unknown variable {vid!r}")


def _skeleton_component(net: DiscreteNetwork, start) -> set[str]:
    adj = {v: set() for v in net.ids}
    for a, b in net.arcs:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = set(start), list(start)
    while stack:
        for n in adj[stack.pop()]:
            if n not in seen:
                seen.add(n)
                stack.append(n)
    return seen


def _edge_support(net: DiscreteNetwork, hyp: HypothesisSpace) -> np.ndarray:
    return marginal(net, hyp.ids).values


def validate_simnet(s: SimilarityNetwork) -> ValidationReport:
    out = []
    hyp = s.hypothesis
    try:
        s.cover.check()
        connected = is_connected_cover(s.cover)
    except ContractError as exc:
        out.append(Violation("cover", str(exc)))
        connected = None
    if connected is False:
        out.append(Violation("disconnected-cover", "the similarity hypergraph is not connected"))
    if len(s.locals) != len(s.cover.edges):
        out.append(Violation("locals", f"{len(s.cover.edges)} edges but {len(s.locals)} local networks"))
    for i, loc in enumerate(s.locals):
        if loc.edge != i:
            out.append(Violation("locals", f"local {i} claims edge {loc.edge}"))
        net = loc.network
        if set(net.ids) != set(loc.depicted):
            out.append(Violation("depicted", f"local {i}: depicted set differs from its network's variables"))
        rep = validate_network(net)
        for v in rep:
            out.append(Violation("local-network", f"local {i}: {v}"))
        missing = [h for h in hyp.ids if h not in net]
        for h in missing:
            out.append(Violation("hypothesis", f"local {i} lacks hypothesis variable {h!r}"))
        if missing:
            continue
        if any(net.var(h) != v for h, v in zip(hyp.ids, hyp.variables)):
            out.append(Violation("hypothesis", f"local {i} redefines a hypothesis variable"))
            continue
        if rep.ok and i < len(s.cover.edges) and connected is not None:
            p = _edge_support(net, hyp)
            leak = float(p[~hyp.mask(s.cover.edges[i])].sum())
            if leak > TOL:
                out.append(Violation("support", f"local {i} puts mass {leak:.3g} outside its edge"))
        reach = _skeleton_component(net, hyp.ids)
        loose = sorted(set(net.ids) - reach - loc.retained)
        if loose:
            out.append(Violation("relevance", f"local {i}: {loose} not connected to a hypothesis variable"))
    depicted = {v for l in s.locals for v in l.depicted}
    nowhere = sorted(set(s.variables) - depicted)
    if nowhere:
        out.append(Violation("undepicted", f"variables depicted in no local network: {nowhere}"))
    return ValidationReport(tuple(out))


def _invariant_over(net: DiscreteNetwork, v: str, hypothesis: HypothesisSpace, points, tol) -> bool:
    """True if the CPT of ``v`` has the same rows for every hypothesis in ``points``."""
    parents = net.cpts[v].parents
    hp = [p for p in parents if p in hypothesis.ids]
    if not hp:
        return True
    table = np.moveaxis(net.table(v), [parents.index(p) for p in hp], range(len(hp)))
    configs = {tuple(pt[hypothesis.ids.index(p)] for p in hp) for pt in points}
    rows = [table[c] for c in sorted(configs)]
    return all(np.max(np.abs(r - rows[0]), initial=0.0) <= tol for r in rows[1:])


def relevance_prune(
    comprehensive: DiscreteNetwork,
    hypothesis: HypothesisSpace,
    edge: Sequence[Point],
    edge_index: int = 0,
    tol: float = TOL,
) -> OrdinaryLocalNetwork:
    """Drop variables that cannot help distinguish the hypotheses of ``edge``.

    A variable goes if it is cut off from every hypothesis variable in the
    skeleton, or if its CPT and the CPTs of all its descendants are the same
    for every point of the edge.
    """
    net = comprehensive
    hyp = hypothesis.ids
    if not _hyp_rooted(net, hyp):
        raise ModelError("hypothesis variables must be roots of a comprehensive network")
    edge = [tuple(pt) for pt in edge]
    reach = _skeleton_component(net, hyp)
    invariant = {v: _invariant_over(net, v, hypothesis, edge, tol) for v in net.ids if v not in hyp}
    drop = {v for v in net.ids if v not in reach}
    drop |= {
        v for v in net.ids if v not in hyp and invariant[v] and all(invariant[d] for d in net.descendants(v))
    }
    keep = [v for v in net.ids if v not in drop]
    sub = DiscreteNetwork(
        tuple(net.var(v) for v in keep),
        frozenset((a, b) for a, b in net.arcs if a in keep and b in keep),
        {v: net.cpts[v] for v in keep},
    )
    return OrdinaryLocalNetwork(edge_index, frozenset(keep), sub)


def simnet_from_network(net: DiscreteNetwork, hypothesis: HypothesisSpace, cover: Cover) -> SimilarityNetwork:
    """Condition ``net`` on each cover edge, then prune irrelevant variables."""
    cover.check()
    locals_ = []
    for i, edge in enumerate(cover.edges):
        comp = restrict_network(net, hypothesis, edge)
        locals_.append(relevance_prune(comp, hypothesis, edge, i))
    return SimilarityNetwork(cover, tuple(locals_), net.ids)


# -- prior recovery ----------------------------------------------------------


def _within_edge(s: SimilarityNetwork) -> list[np.ndarray]:
    return [_edge_support(l.network, s.hypothesis) for l in s.locals]


def recover_priors(s: SimilarityNetwork) -> Factor:
    """Unique P(H) consistent with every edge's conditional prior.

    Ratios are propagated breadth-first from the first point of domain(H),
    normalized, and then checked against every edge equation.
    """
    hyp, cover = s.hypothesis, s.cover
    if not is_connected_cover(cover):
        raise ModelError("prior recovery needs a connected cover")
    cond = _within_edge(s)
    for i, edge in enumerate(cover.edges):
        for pt in edge:
            if not cond[i][pt] > 0:
                raise ZeroPriorError(f"P({hyp.label(pt)} | edge {i}) is zero")
    domain = hyp.domain
    val = {domain[0]: 1.0}
    queue = deque([domain[0]])
    while queue:
        q = queue.popleft()
        for i in cover.edges_containing(q):
            for r in cover.edges[i]:
                if r not in val:
                    val[r] = val[q] * cond[i][r] / cond[i][q]
                    queue.append(r)
    out = np.zeros(hyp.cards)
    for pt, v in val.items():
        out[pt] = v
    out /= out.sum()
    for i, edge in enumerate(cover.edges):
        mass = sum(out[pt] for pt in edge)
        for pt in edge:
            resid = abs(out[pt] - cond[i][pt] * mass)
            if resid > INCOHERENCE_TOL:
                raise InconsistentSimnetError(
                    f"edge {i} disagrees with the recovered prior of {hyp.label(pt)} by {resid:.3g}"
                )
    return Factor(hyp.ids, out)


# -- conditional factors along hypergraph paths ------------------------------


def _edge_graph(cover: Cover) -> list[list[int]]:
    sets = [set(e) for e in cover.edges]
    return [[j for j in range(len(sets)) if j != i and sets[i] & sets[j]] for i in range(len(sets))]


def _path_to_depicting(s: SimilarityNetwork, var: str, p: Point) -> list[int] | None:
    """Shortest edge path from an edge holding ``p`` to one depicting ``var``.

    Breadth-first from all edges holding ``p``; among equally short paths the
    destination with the lowest index wins, and predecessors are the lowest
    index reached first.
    """
    adj = _edge_graph(s.cover)
    sources = s.cover.edges_containing(p)
    dist = {i: 0 for i in sources}
    prev: dict[int, int | None] = {i: None for i in sources}
    queue = deque(sorted(sources))
    while queue:
        i = queue.popleft()
        for j in adj[i]:
            if j not in dist:
                dist[j] = dist[i] + 1
                prev[j] = i
                queue.append(j)
    hits = [i for i in dist if var in s.locals[i].depicted]
    if not hits:
        return None
    dest = min(hits, key=lambda i: (dist[i], i))
    path = [dest]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _path_point(s: SimilarityNetwork, path: Sequence[int], p: Point) -> Point:
    """The hypothesis the path carries into its last edge (lowest shared point per hop)."""
    cur = p
    for a, b in zip(path, path[1:]):
        shared = sorted(set(s.cover.edges[a]) & set(s.cover.edges[b]))
        if not shared:
            raise ContractError(f"edges {a} and {b} share no hypothesis")
        cur = shared[0]
    return cur


def simple_edge_paths(s: SimilarityNetwork, var: str, p: Point) -> list[list[int]]:
    """Every simple path from an edge holding ``p`` to an edge depicting ``var``,
    passing only through edges that do not depict it."""
    adj = _edge_graph(s.cover)
    out = []

    def walk(path):
        last = path[-1]
        if var in s.locals[last].depicted:
            out.append(list(path))
            return
        for j in adj[last]:
            if j not in path:
                walk(path + [j])

    for i in s.cover.edges_containing(tuple(p)):
        walk([i])
    return out


def conditional_factor(
    s: SimilarityNetwork,
    var: str,
    given: Assignment,
    p: Point,
    *,
    path: Sequence[int] | None = None,
):
    """P(var | given, p) as a vector over var's values, read off the simnet.

    The value comes from the nearest local network depicting ``var`` (or the
    one ending ``path``), conditioned on the path's hypothesis and on the part
    of ``given`` that network depicts.  Returns :data:`IRRELEVANT` if no local
    network depicts ``var``.
    """
    p = s.hypothesis.check(p)
    if var in given:
        raise ContractError(f"{var!r} is bound in the conditioning assignment")
    if var in s.hypothesis.ids:
        raise ContractError("conditional factors are for non-hypothesis variables")
    if path is None:
        path = _path_to_depicting(s, var, p)
        if path is None:
            return IRRELEVANT
    else:
        path = list(path)
        if not path or p not in s.cover.edges[path[0]] or var not in s.locals[path[-1]].depicted:
            raise ContractError("path must start at an edge holding p and end where var is depicted")
    hm = _path_point(s, path, p)
    net = s.locals[path[-1]].network
    evidence = {k: v for k, v in given.items() if k in net and k not in s.hypothesis.ids}
    evidence.update(s.hypothesis.assignment(hm))
    try:
        return marginal(net, [var], evidence).values
    except InconsistentEvidenceError as exc:
        raise UndefinedConditionalError(
            f"P({var} | ...) undefined at {s.hypothesis.label(hm)} in local {path[-1]}"
        ) from exc


def chain_order(s: SimilarityNetwork) -> list[str]:
    """Hypothesis variables, then a topological order of the union of local arcs."""
    hyp = s.hypothesis.ids
    arcs = {(a, b) for l in s.locals for a, b in l.network.arcs if a not in hyp and b not in hyp}
    rest = [v for v in s.variables if v not in hyp]
    cycle = _find_cycle(rest, arcs)
    if cycle:
        raise AcyclicityError(f"union of local arcs has a cycle: {'->'.join(cycle)}")
    return list(hyp) + order_of_arcs(rest, arcs)


class _ConditionalCache:
    """Conditional tables P(x | depicted predecessors, point) per destination network."""

    def __init__(self, s: SimilarityNetwork):
        self.s = s
        self.joints: dict[int, JointTable] = {}
        self.tables: dict = {}

    def table(self, edge: int, point: Point, var: str, preds: Sequence[str]):
        key = (edge, point, var)
        if key not in self.tables:
            net = self.s.locals[edge].network
            if edge not in self.joints:
                self.joints[edge] = enumerate_joint(net)
            jt = self.joints[edge]
            hyp = self.s.hypothesis.ids
            arr = jt.array[tuple(point[hyp.index(v)] if v in hyp else slice(None) for v in jt.scope)]
            rest = [v for v in jt.scope if v not in hyp]
            ctx = [v for v in preds if v in net]
            keep = ctx + [var]
            drop = tuple(i for i, v in enumerate(rest) if v not in keep)
            m = arr.sum(axis=drop)
            order = [v for v in rest if v in keep]
            m = np.transpose(m, [order.index(v) for v in keep])
            tot = m.sum(axis=-1, keepdims=True)
            with np.errstate(invalid="ignore", divide="ignore"):
                cond = np.where(tot > 0, m / np.where(tot > 0, tot, 1.0), np.nan)
            self.tables[key] = (tuple(keep), cond)
        return self.tables[key]


def reconstruct_joint(s: SimilarityNetwork, *, return_cost: bool = False):
    """Assemble the full joint: recovered prior times a chain of conditional factors.

    Variables follow :func:`chain_order`.  With ``return_cost`` the number of
    multiplications is returned alongside the table.
    """
    hyp = s.hypothesis
    prior = recover_priors(s).values
    order = chain_order(s)
    rest = order[len(hyp.ids):]
    cards = {v: s.variable(v).card for v in order}
    cache = _ConditionalCache(s)
    paths = {}
    mults = 0
    out = np.zeros([cards[v] for v in order])
    for p in hyp.domain:
        running = np.full([cards[v] for v in rest], prior[p])
        for j, x in enumerate(rest):
            key = (x, p)
            if key not in paths:
                paths[key] = _path_to_depicting(s, x, p)
            path = paths[key]
            if path is None:
                continue
            scope, cond = cache.table(path[-1], _path_point(s, path, p), x, rest[:j])
            cond = np.broadcast_to(expand_to(cond, scope, rest), running.shape)
            bad = np.isnan(cond) & (running != 0)
            if bad.any():
                raise UndefinedConditionalError(
                    f"P({x} | ...) needed at a context of probability zero in local {path[-1]}"
                )
            running = np.where(np.isnan(cond), 0.0, running * np.nan_to_num(cond))
            mults += running.size
        out[p] = running
    jt = JointTable(tuple(order), tuple(cards[v] for v in order), out.reshape(-1))
    return (jt, mults) if return_cost else jt


def posterior(s: SimilarityNetwork, evidence: Assignment) -> Posterior:
    """P(H | evidence) from the reconstructed joint, with the multiplications spent."""
    jt, mults = reconstruct_joint(s, return_cost=True)
    hyp = s.hypothesis.ids
    if set(evidence) & set(hyp):
        raise ContractError("evidence binds a hypothesis variable")
    for k, v in evidence.items():
        if k not in jt.scope:
            raise ContractError(f"unknown variable {k!r}")
        if not 0 <= int(v) < jt.cards[jt.scope.index(k)]:
            raise ContractError(f"value index {v} out of range for {k!r}")
    arr = jt.array[tuple(evidence.get(v, slice(None)) for v in jt.scope)]
    rest = [v for v in jt.scope if v not in evidence]
    vals = arr.sum(axis=tuple(i for i, v in enumerate(rest) if v not in hyp))
    z = vals.sum()
    if not z > 0:
        raise InconsistentEvidenceError(f"evidence {dict(evidence)} has probability zero")
    return Posterior(Factor(hyp, vals / z), mults)


def simnet_param_count(s: SimilarityNetwork) -> int:
    """Free parameters over all local networks, hypothesis variables at edge-restricted cardinality."""
    total = 0
    for i, loc in enumerate(s.locals):
        edge = s.cover.edges[i]
        cards = {h: len({pt[k] for pt in edge}) for k, h in enumerate(s.hypothesis.ids)}
        total += free_parameter_count(loc.network, cards)
    return total


# -- conversion to a multinet ------------------------------------------------


def _min_edge_selection(cover: Cover) -> tuple[int, ...]:
    """Fewest edges covering domain(H); exact partitions first, then lowest indices."""
    domain = set(cover.hypothesis.domain)
    n = len(cover.edges)
    for size in range(1, n + 1):
        best = None
        for combo in itertools.combinations(range(n), size):
            union = set().union(*(cover.edges[i] for i in combo))
            if union != domain:
                continue
            exact = sum(len(cover.edges[i]) for i in combo) == len(domain)
            if exact:
                return combo
            if best is None:
                best = combo
        if best is not None:
            return best
    raise ModelError("the cover does not cover domain(H)")


def augmented_parents(s: SimilarityNetwork, edge: int) -> dict[str, tuple[str, ...]]:
    """Parents given to each variable added to local ``edge``.

    The union of its parents in every other local network depicting it, less
    the variables the local network already had.
    """
    loc = s.locals[edge]
    out = {}
    for x in s.variables:
        if x in loc.depicted:
            continue
        ps = set()
        for j, other in enumerate(s.locals):
            if j != edge and x in other.depicted:
                ps.update(other.network.cpts[x].parents)
        out[x] = tuple(sorted(ps - loc.depicted))
    return out


def convert_to_multinet(s: SimilarityNetwork) -> Multinet:
    """Turn a similarity network into an equivalent multinet.

    Step 1 adds every missing variable to each local network, with parents as
    in :func:`augmented_parents` and CPTs read off the similarity network.
    Step 2 keeps the fewest edges that cover domain(H), exact partitions
    preferred, and hands each point to the first kept edge holding it.
    """
    hyp = s.hypothesis
    report = validate_simnet(s)
    if not report.ok:
        raise ModelValidationError(report)
    prior = recover_priors(s).values
    chosen = _min_edge_selection(s.cover)
    assigned: dict[int, list[Point]] = {i: [] for i in chosen}
    for pt in hyp.domain:
        for i in chosen:
            if pt in s.cover.edges[i]:
                assigned[i].append(pt)
                break
    variables = tuple(s.variable(v) for v in s.variables)
    blocks, locals_, priors = [], [], []
    for i in chosen:
        block = assigned[i]
        if not block:
            continue
        loc = s.locals[i]
        net = loc.network
        if not _hyp_rooted(net, hyp.ids):
            raise ModelError(f"local {i}: hypothesis variables must be roots")
        added = augmented_parents(s, i)
        arcs = {(a, b) for a, b in net.arcs if b not in hyp.ids}
        arcs.update((p, x) for x, ps in added.items() for p in ps)
        cycle = _find_cycle(s.variables, arcs)
        if cycle:
            raise AcyclicityError(f"augmented local {i} has a cycle: {'->'.join(cycle)}")
        q = prior * hyp.mask(block)
        mass = float(q.sum())
        cpts: dict[str, Cpt] = dict(fit_hypothesis_cpts(hyp.variables, q / mass))
        for v in net.ids:
            if v in hyp.ids:
                continue
            parents = net.cpts[v].parents
            table = net.table(v)
            mask = _reachable_mask(list(parents), table.shape[:-1], hyp.ids, block)
            parents, table = prune_parents(parents, table, mask)
            cpts[v] = Cpt(v, parents, table.reshape(-1, net.card(v)))
        for x, ps in added.items():
            cpts[x] = _added_cpt(s, x, ps, block[0])
        arcs = {(p, c) for c, cpt in cpts.items() for p in cpt.parents}
        blocks.append(tuple(block))
        locals_.append(DiscreteNetwork(variables, frozenset(arcs), cpts))
        priors.append(mass)
    return Multinet(hyp, tuple(blocks), tuple(locals_), np.array(priors))


def _added_cpt(s: SimilarityNetwork, x: str, parents: tuple[str, ...], point: Point) -> Cpt:
    card = s.variable(x).card
    pcards = [s.variable(p).card for p in parents]
    rows = []
    for combo in itertools.product(*(range(c) for c in pcards)):
        try:
            row = conditional_factor(s, x, dict(zip(parents, combo)), point)
        except UndefinedConditionalError:
            warnings.warn(
                f"{x!r}: undefined conditional filled uniformly", ZeroContextWarning, stacklevel=3
            )
            row = np.full(card, 1.0 / card)
        rows.append(row)
    return Cpt(x, parents, np.array(rows).reshape(-1, card))


# -- redundancy --------------------------------------------------------------


@dataclass(frozen=True)
class SharedParameter:
    """A conditional P(variable | context, point) specified in two local networks."""

    variable: str
    point: Point
    context: tuple[str, ...]
    edges: tuple[int, int]
    discrepancy: float

    @property
    def incoherent(self) -> bool:
        return self.discrepancy > INCOHERENCE_TOL


def redundancy_report(s: SimilarityNetwork) -> list[SharedParameter]:
    """Every conditional specified twice, with how far the two copies disagree.

    Two local networks share P(x | context, p) when both depict x and the
    non-hypothesis parents x has in either of them, and both edges hold p.
    Contexts of probability zero in either network are skipped.
    """
    hyp = s.hypothesis
    out = []
    for i, j in itertools.combinations(range(len(s.locals)), 2):
        a, b = s.locals[i], s.locals[j]
        shared = sorted(set(s.cover.edges[i]) & set(s.cover.edges[j]))
        if not shared:
            continue
        for x in sorted((a.depicted & b.depicted) - set(hyp.ids)):
            ctx = sorted(
                {p for l in (a, b) for p in l.network.cpts[x].parents if p not in hyp.ids}
            )
            if not set(ctx) <= (a.depicted & b.depicted):
                continue
            cards = [s.variable(v).card for v in ctx]
            for pt in shared:
                worst, seen = 0.0, False
                for combo in itertools.product(*(range(c) for c in cards)):
                    ev = dict(zip(ctx, combo), **hyp.assignment(pt))
                    try:
                        va = marginal(a.network, [x], ev).values
                        vb = marginal(b.network, [x], ev).values
                    except InconsistentEvidenceError:
                        continue
                    seen = True
                    worst = max(worst, float(np.abs(va - vb).max()))
                if seen:
                    out.append(SharedParameter(x, pt, tuple(ctx), (i, j), worst))
    return out


def is_coherent(s: SimilarityNetwork) -> bool:
    return not any(r.incoherent for r in redundancy_report(s))


__all__ = [
    "Cover",
    "IRRELEVANT",
    "OrdinaryLocalNetwork",
    "SharedParameter",
    "SimilarityNetwork",
    "chain_order",
    "conditional_factor",
    "convert_to_multinet",
    "is_coherent",
    "is_connected_cover",
    "recover_priors",
    "reconstruct_joint",
    "redundancy_report",
    "relevance_prune",
    "simnet_from_network",
    "simnet_param_count",
    "simple_edge_paths",
    "validate_simnet",
]
