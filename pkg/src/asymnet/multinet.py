"""Bayesian multinets: one local network per block of a hypothesis partition.

A hypothesis point is a tuple of value indices, one per hypothesis variable,
so the single-variable case is just a 1-tuple.  Every local network keeps the
full variable set and the full value sets; its hypothesis distribution is
zero outside its block.
"""

from __future__ import annotations

import itertools
import math
import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .core import (
    TOL,
    Assignment,
    Cpt,
    DiscreteNetwork,
    JointTable,
    ValidationReport,
    Variable,
    Violation,
    _find_cycle,
    check_assignment,
    enumerate_joint,
    expand_to,
    free_parameter_count,
    validate_network,
)
from .errors import (
    AcyclicityError,
    ContractError,
    InconsistentEvidenceError,
    ModelError,
    UndefinedLikelihoodError,
    ZeroContextWarning,
)
from .inference import Factor, OpCounter, Posterior, _marginal, joint_factor, marginal

Point = tuple[int, ...]


@dataclass(frozen=True)
class HypothesisSpace:
    """Ordered distinguished variables; ``domain`` is their Cartesian product."""

    variables: tuple[Variable, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ContractError("a hypothesis space needs at least one variable")
        if len({v.id for v in self.variables}) != len(self.variables):
            raise ContractError("hypothesis variables must be distinct")

    @classmethod
    def of(cls, net: DiscreteNetwork, ids: str | Sequence[str]) -> "HypothesisSpace":
        if isinstance(ids, str):
            ids = (ids,)
        return cls(tuple(net.var(i) for i in ids))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.variables)

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(v.card for v in self.variables)

    @property
    def domain(self) -> tuple[Point, ...]:
        return tuple(itertools.product(*(range(c) for c in self.cards)))

    def __contains__(self, point) -> bool:
        return (
            isinstance(point, tuple)
            and len(point) == len(self.cards)
            and all(isinstance(i, (int, np.integer)) and 0 <= i < c for i, c in zip(point, self.cards))
        )

    def check(self, point) -> Point:
        if point not in self:
            raise ContractError(f"{point!r} is not a point of domain(H)")
        return tuple(int(i) for i in point)

    def point(self, *labels: str) -> Point:
        if len(labels) != len(self.variables):
            raise ContractError(f"expected {len(self.variables)} labels")
        return tuple(v.index(lab) for v, lab in zip(self.variables, labels))

    def label(self, point: Point) -> str:
        return ",".join(f"{v.id}={v.values[i]}" for v, i in zip(self.variables, point))

    def assignment(self, point: Point) -> dict[str, int]:
        return dict(zip(self.ids, point))

    def mask(self, points) -> np.ndarray:
        m = np.zeros(self.cards, dtype=bool)
        for pt in points:
            m[pt] = True
        return m


# -- table helpers shared with the similarity-network module -----------------


def _reachable_mask(parents, cards, hyp_ids, points) -> np.ndarray:
    """Parent configurations whose hypothesis part agrees with some point."""
    mask = np.ones(cards, dtype=bool)
    hp = [p for p in parents if p in hyp_ids]
    if not hp:
        return mask
    sub = np.zeros([cards[parents.index(p)] for p in hp], dtype=bool)
    for pt in points:
        sub[tuple(pt[hyp_ids.index(p)] for p in hp)] = True
    return np.broadcast_to(expand_to(sub, hp, parents), cards).copy()


def prune_parents(parents, table, mask, tol=TOL):
    """Drop parents the table does not depend on over reachable configurations.

    ``table`` has shape ``(*parent_cards, card)`` and ``mask`` marks reachable
    parent configurations.  Parents are tried in order, one at a time.
    """
    parents = list(parents)
    table = np.asarray(table, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    card = table.shape[-1]
    for y in list(parents):
        a = parents.index(y)
        t = np.moveaxis(table, a, 0)
        m = np.moveaxis(mask, a, 0)
        any_reach = m.any(axis=0)
        first = np.argmax(m, axis=0)
        ref = np.take_along_axis(t, first[None, ..., None], axis=0)[0]
        diff = np.abs(t - ref[None]).max(axis=-1)
        if np.any(diff[m] > tol):
            continue
        table = np.where(any_reach[..., None], ref, 1.0 / card)
        mask = any_reach
        parents.pop(a)
    return tuple(parents), table


def fit_hypothesis_cpts(variables: Sequence[Variable], q: np.ndarray, tol: float = TOL) -> dict[str, Cpt]:
    """Chain-rule CPTs reproducing the joint ``q`` over hypothesis variables.

    Each variable starts with all earlier ones as parents; parents it does not
    depend on (over contexts of positive mass) are dropped.
    """
    q = np.asarray(q, dtype=float)
    ids = [v.id for v in variables]
    cpts = {}
    for j, v in enumerate(variables):
        m = q.sum(axis=tuple(range(j + 1, len(ids)))) if j + 1 < len(ids) else q
        ctx = m.sum(axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            table = np.where(ctx > 0, m / np.where(ctx > 0, ctx, 1.0), 1.0 / v.card)
        parents, table = prune_parents(ids[:j], table, ctx[..., 0] > 0, tol)
        cpts[v.id] = Cpt(v.id, parents, table.reshape(-1, v.card))
    return cpts


def _hyp_rooted(net: DiscreteNetwork, hyp_ids) -> bool:
    return all(set(net.cpts[h].parents) <= set(hyp_ids) for h in hyp_ids)


def replace_hypothesis_cpts(net: DiscreteNetwork, hypothesis: HypothesisSpace, q: np.ndarray) -> DiscreteNetwork:
    """Swap in hypothesis CPTs for the distribution ``q`` (variables must be roots)."""
    hyp = hypothesis.ids
    if not _hyp_rooted(net, hyp):
        raise ModelError("hypothesis variables must have no non-hypothesis parents")
    new = fit_hypothesis_cpts(hypothesis.variables, q)
    cpts = dict(net.cpts)
    cpts.update(new)
    arcs = {(a, b) for a, b in net.arcs if b not in hyp}
    arcs.update((p, h) for h, c in new.items() for p in c.parents)
    return net.replace(arcs=frozenset(arcs), cpts=cpts)


def restrict_network(
    net: DiscreteNetwork, hypothesis: HypothesisSpace, points, tol: float = TOL
) -> DiscreteNetwork:
    """A network of P(all variables | H in ``points``).

    Hypothesis CPTs are refit to the restricted prior, and every CPT loses the
    parents it no longer depends on once hypotheses outside ``points`` are
    unreachable.  This is how planted asymmetric independence surfaces as
    missing arcs.
    """
    hyp = hypothesis.ids
    if not _hyp_rooted(net, hyp):
        raise ModelError("hypothesis variables must have no non-hypothesis parents")
    q = marginal(net, hyp).values * hypothesis.mask(points)
    mass = q.sum()
    if mass <= 0:
        raise ModelError("the hypothesis subset has zero prior probability")
    cpts = dict(fit_hypothesis_cpts(hypothesis.variables, q / mass, tol))
    for v in net.ids:
        if v in hyp:
            continue
        parents = net.cpts[v].parents
        table = net.table(v)
        mask = _reachable_mask(list(parents), table.shape[:-1], hyp, points)
        parents, table = prune_parents(parents, table, mask, tol)
        cpts[v] = Cpt(v, parents, table.reshape(-1, net.card(v)))
    arcs = {(p, c) for c, cpt in cpts.items() for p in cpt.parents}
    return DiscreteNetwork(net.variables, frozenset(arcs), cpts)


# -- multinets ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Multinet:
    hypothesis: HypothesisSpace
    blocks: tuple[tuple[Point, ...], ...]
    locals: tuple[DiscreteNetwork, ...]
    block_priors: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "blocks", tuple(tuple(tuple(int(i) for i in pt) for pt in b) for b in self.blocks)
        )
        object.__setattr__(self, "locals", tuple(self.locals))
        pri = np.array(self.block_priors, dtype=float).reshape(-1)
        pri.flags.writeable = False
        object.__setattr__(self, "block_priors", pri)

    def __eq__(self, other):
        if not isinstance(other, Multinet):
            return NotImplemented
        return (
            self.hypothesis == other.hypothesis
            and self.blocks == other.blocks
            and self.locals == other.locals
            and np.array_equal(self.block_priors, other.block_priors)
        )

    __hash__ = None

    def block_of(self, point: Point) -> int:
        point = self.hypothesis.check(point)
        for i, block in enumerate(self.blocks):
            if point in block:
                return i
        raise ContractError(f"{point!r} lies in no block")


def split_network(net: DiscreteNetwork, hypothesis: HypothesisSpace, blocks) -> Multinet:
    """Multinet of the distribution of ``net`` for a given partition."""
    q = marginal(net, hypothesis.ids).values
    locals_, priors = [], []
    for block in blocks:
        locals_.append(restrict_network(net, hypothesis, block))
        priors.append(float((q * hypothesis.mask(block)).sum()))
    return Multinet(hypothesis, tuple(tuple(b) for b in blocks), tuple(locals_), np.array(priors))


def _in_block_prior(local: DiscreteNetwork, hypothesis: HypothesisSpace) -> np.ndarray:
    return marginal(local, hypothesis.ids).values


def validate_multinet(m: Multinet) -> ValidationReport:
    out = []
    hyp = m.hypothesis
    if not (len(m.blocks) == len(m.locals) == len(m.block_priors)):
        out.append(Violation("shape", "blocks, locals and block_priors differ in length"))
        return ValidationReport(tuple(out))
    seen: dict[Point, int] = {}
    for i, block in enumerate(m.blocks):
        if not block:
            out.append(Violation("partition", f"block {i} is empty"))
        for pt in block:
            if pt not in hyp:
                out.append(Violation("partition", f"block {i} has point {pt} outside domain(H)"))
            elif pt in seen:
                out.append(
                    Violation("partition", f"{hyp.label(pt)} is in blocks {seen[pt]} and {i} (overlap)")
                )
            else:
                seen[pt] = i
    missing = [pt for pt in hyp.domain if pt not in seen]
    if missing:
        out.append(Violation("partition", f"points in no block: {[hyp.label(p) for p in missing]}"))
    pri = m.block_priors
    if np.any(pri < 0) or np.any(pri > 1) or abs(pri.sum() - 1.0) > TOL:
        out.append(Violation("block-priors", f"block priors {pri.tolist()} are not a distribution"))
    ref = None
    for i, local in enumerate(m.locals):
        rep = validate_network(local)
        for v in rep:
            out.append(Violation("local-network", f"local {i}: {v}"))
        for h in hyp.variables:
            if h.id not in local or local.var(h.id) != h:
                out.append(Violation("hypothesis", f"local {i} lacks hypothesis variable {h.id!r}"))
        if ref is None:
            ref = local.variables
        elif local.variables != ref:
            out.append(Violation("variables", f"local {i} has a different variable set"))
        if rep.ok and all(h.id in local for h in hyp.variables) and m.blocks[i]:
            p = _in_block_prior(local, hyp)
            leak = float(p[~hyp.mask(m.blocks[i])].sum())
            if leak > TOL:
                out.append(Violation("support", f"local {i} puts mass {leak:.3g} outside its block"))
    return ValidationReport(tuple(out))


def hypothesis_priors(m: Multinet) -> np.ndarray:
    """Block prior times in-block conditional, as an array over domain(H)."""
    out = np.zeros(m.hypothesis.cards)
    for i, block in enumerate(m.blocks):
        p = _in_block_prior(m.locals[i], m.hypothesis)
        for pt in block:
            out[pt] = m.block_priors[i] * p[pt]
    return out


def hypothesis_prior(m: Multinet, p: Point) -> float:
    i = m.block_of(p)
    return float(m.block_priors[i] * _in_block_prior(m.locals[i], m.hypothesis)[tuple(p)])


def _block_likelihoods(m: Multinet, i: int, evidence: Assignment, counter: OpCounter | None) -> dict[Point, float]:
    """P(evidence | p) for every p in block ``i``, from one elimination run.

    Hypothesis variables are restricted to the values the block uses; when
    they are roots their own CPTs are left out and the result is the
    likelihood directly.  Points of zero in-block probability map to NaN in
    the non-root case.
    """
    local, block, hyp = m.locals[i], m.blocks[i], m.hypothesis.ids
    restrict = {h: sorted({pt[k] for pt in block}) for k, h in enumerate(hyp)}

    def at(f, pt):
        return float(f.values[tuple(restrict[h].index(pt[k]) for k, h in enumerate(hyp))])

    if _hyp_rooted(local, hyp):
        f = joint_factor(local, hyp, evidence, restrict=restrict, exclude=hyp, counter=counter)
        return {pt: at(f, pt) for pt in block}
    fj = joint_factor(local, hyp, evidence, restrict=restrict, counter=counter)
    fp = joint_factor(local, hyp, {}, restrict=restrict, counter=counter)
    return {pt: (at(fj, pt) / at(fp, pt) if at(fp, pt) > 0 else math.nan) for pt in block}


def _check_clue_evidence(m: Multinet, evidence: Assignment) -> None:
    bound = set(evidence) & set(m.hypothesis.ids)
    if bound:
        raise ContractError(f"evidence binds hypothesis variables {sorted(bound)}")
    check_assignment(m.locals[0], evidence)


def likelihood(m: Multinet, p: Point, evidence: Assignment) -> float:
    """P(evidence | p), computed inside the local network whose block holds p."""
    _check_clue_evidence(m, evidence)
    i = m.block_of(p)
    p = tuple(p)
    if not _in_block_prior(m.locals[i], m.hypothesis)[p] > 0:
        raise UndefinedLikelihoodError(f"{m.hypothesis.label(p)} has probability zero in its block")
    return _block_likelihoods(m, i, evidence, None)[p]


def posterior(m: Multinet, evidence: Assignment) -> Posterior:
    """Bayes' rule over per-block likelihoods; counts the multiplications spent."""
    _check_clue_evidence(m, evidence)
    counter = OpCounter()
    priors = hypothesis_priors(m)
    values = np.zeros(m.hypothesis.cards)
    for i, block in enumerate(m.blocks):
        lik = _block_likelihoods(m, i, evidence, counter)
        for pt in block:
            values[pt] = priors[pt] * lik[pt] if priors[pt] > 0 else 0.0
            counter.multiplications += 1
    z = values.sum()
    if not z > 0:
        raise InconsistentEvidenceError(f"evidence {dict(evidence)} is impossible under every hypothesis")
    return Posterior(Factor(m.hypothesis.ids, values / z), counter.multiplications)


def with_hypothesis_priors(m: Multinet, q) -> Multinet:
    """Re-prior a multinet from a distribution ``q`` over domain(H).

    Block priors become block sums of ``q``; within each block the hypothesis
    CPTs are replaced by ``q`` rescaled to the block, leaving clue CPTs (hence
    likelihoods) untouched.  Blocks with zero mass keep their old local network.
    """
    hyp = m.hypothesis
    q = np.asarray(q, dtype=float).reshape(hyp.cards)
    if np.any(q < 0) or abs(q.sum() - 1.0) > 1e-6:
        raise ContractError("hypothesis priors must form a distribution")
    locals_, priors = [], []
    for block, local in zip(m.blocks, m.locals):
        qb = q * hyp.mask(block)
        mass = float(qb.sum())
        locals_.append(replace_hypothesis_cpts(local, hyp, qb / mass) if mass > 0 else local)
        priors.append(mass)
    return Multinet(hyp, m.blocks, tuple(locals_), np.array(priors))


def staged_posterior(
    prior_net: DiscreteNetwork,
    m: Multinet,
    apriori_evidence: Assignment,
    clue_evidence: Assignment,
) -> Posterior:
    """Revise hypothesis priors in ``prior_net``, then run the multinet on the clues."""
    check_assignment(prior_net, apriori_evidence)
    counter = OpCounter()
    q = _marginal(prior_net, m.hypothesis.ids, apriori_evidence, counter).values
    post = posterior(with_hypothesis_priors(m, q), clue_evidence)
    return Posterior(post.factor, post.multiplications + counter.multiplications)


def multinet_joint(m: Multinet, cap: int | None = None) -> JointTable:
    """The blockwise mixture sum_i prior_i * P_i as a dense table (oracle)."""
    tables = [enumerate_joint(l, cap) if cap else enumerate_joint(l) for l in m.locals]
    scope, cards = tables[0].scope, tables[0].cards
    total = np.zeros_like(tables[0].probabilities)
    for w, t in zip(m.block_priors, tables):
        if t.scope != scope:
            raise ModelError("local networks disagree on their variables")
        total = total + w * t.probabilities
    return JointTable(scope, cards, total)


def union_network(m: Multinet, tol: float = TOL) -> DiscreteNetwork:
    """One network whose arcs are the union of the local arcs.

    Each clue variable gets the union of its local non-hypothesis parents, plus
    the smallest set of hypothesis variables its owning-block table actually
    varies with.  Rows are read from the owning block's CPT; hypothesis
    contexts that belong to no point are filled uniformly with a warning.
    """
    hyp = m.hypothesis
    hids = hyp.ids
    for i, local in enumerate(m.locals):
        if not _hyp_rooted(local, hids):
            raise ModelError(f"local {i}: hypothesis variables must be roots")
    base_net = m.locals[0]
    cpts = dict(fit_hypothesis_cpts(hyp.variables, hypothesis_priors(m), tol))
    for x in base_net.ids:
        if x in hids:
            continue
        base = sorted({p for l in m.locals for p in l.cpts[x].parents if p not in hids})
        scope = tuple(base) + (x,)
        shape = tuple(base_net.card(v) for v in scope)
        tables = {}
        for block, local in zip(m.blocks, m.locals):
            f = Factor(local.cpts[x].parents + (x,), local.table(x))
            for pt in block:
                sl = f.reduce({h: pt[k] for k, h in enumerate(hids)})
                tables[pt] = np.broadcast_to(expand_to(sl.values, sl.scope, scope), shape)
        keep = _smallest_hypothesis_support(hyp, tables, tol)
        s_ids = tuple(hids[k] for k in keep)
        full_scope = tuple(base) + s_ids + (x,)
        arr = np.empty(shape[:-1] + tuple(hyp.cards[k] for k in keep) + shape[-1:])
        proj = {}
        for pt in hyp.domain:
            proj.setdefault(tuple(pt[k] for k in keep), pt)
        for combo in itertools.product(*(range(hyp.cards[k]) for k in keep)):
            idx = (Ellipsis,) + combo + (slice(None),)
            if combo in proj:
                arr[idx] = tables[proj[combo]]
            else:
                arr[idx] = 1.0 / base_net.card(x)
                warnings.warn(f"{x!r}: unreachable hypothesis context filled uniformly", ZeroContextWarning, stacklevel=2)
        parents = tuple(sorted(base + list(s_ids)))
        table = Factor(full_scope, arr).transpose(parents + (x,)).values
        cpts[x] = Cpt(x, parents, table.reshape(-1, base_net.card(x)))
    arcs = {(p, c) for c, cpt in cpts.items() for p in cpt.parents}
    cycle = _find_cycle(base_net.ids, arcs)
    if cycle:
        raise AcyclicityError(f"union of local arcs has a cycle: {'->'.join(cycle)}")
    return DiscreteNetwork(base_net.variables, frozenset(arcs), cpts)


def _smallest_hypothesis_support(hyp: HypothesisSpace, tables: Mapping[Point, np.ndarray], tol) -> tuple[int, ...]:
    """Smallest subset S of hypothesis coordinates with tables a function of p|S."""
    n = len(hyp.cards)
    for size in range(n + 1):
        for keep in itertools.combinations(range(n), size):
            ref: dict[Point, np.ndarray] = {}
            ok = True
            for pt, t in tables.items():
                key = tuple(pt[k] for k in keep)
                if key not in ref:
                    ref[key] = t
                elif np.max(np.abs(ref[key] - t), initial=0.0) > tol:
                    ok = False
                    break
            if ok:
                return keep
    return tuple(range(n))


def _restricted_cards(m: Multinet, i: int) -> dict[str, int]:
    block = m.blocks[i]
    return {h: len({pt[k] for pt in block}) for k, h in enumerate(m.hypothesis.ids)}


def multinet_param_count(m: Multinet) -> int:
    """(blocks - 1) plus each local's free parameters at restricted hypothesis cardinality."""
    return len(m.blocks) - 1 + sum(
        free_parameter_count(local, _restricted_cards(m, i)) for i, local in enumerate(m.locals)
    )
