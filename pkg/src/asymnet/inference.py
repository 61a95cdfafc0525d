"""Exact inference on a single network: variable elimination and arc reversal.

Cost accounting counts scalar multiplications in factor products only; one
product of two factors costs one multiplication per cell of the result.
Sums, slicing and normalization are free.
"""

from __future__ import annotations

import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .core import (
    Assignment,
    Cpt,
    DiscreteNetwork,
    check_assignment,
    expand_to,
    topological_order,
)
from .errors import AcyclicityError, ContractError, InconsistentEvidenceError, ZeroContextWarning


@dataclass(frozen=True, eq=False)
class Factor:
    """Nonnegative table over ``scope``; ``values`` has one axis per variable."""

    scope: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        values = np.asarray(self.values, dtype=float)
        if values.ndim != len(self.scope):
            raise ContractError(f"factor over {self.scope} needs {len(self.scope)} axes")
        if len(set(self.scope)) != len(self.scope):
            raise ContractError("factor scope repeats a variable")
        object.__setattr__(self, "values", values)

    @property
    def cards(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def vector(self) -> np.ndarray:
        """Values flattened row-major (last variable fastest)."""
        return self.values.reshape(-1)

    def transpose(self, scope: Sequence[str]) -> "Factor":
        return Factor(tuple(scope), np.transpose(self.values, [self.scope.index(v) for v in scope]))

    def sum_out(self, var: str) -> "Factor":
        axis = self.scope.index(var)
        return Factor(self.scope[:axis] + self.scope[axis + 1:], self.values.sum(axis=axis))

    def reduce(self, evidence: Assignment, restrict: Mapping[str, Sequence[int]] | None = None) -> "Factor":
        """Slice out observed variables; ``restrict`` keeps a subset of values per axis."""
        values, scope = self.values, list(self.scope)
        for var, idx in evidence.items():
            if var in scope:
                values = np.take(values, int(idx), axis=scope.index(var))
                scope.remove(var)
        for var, keep in (restrict or {}).items():
            if var in scope:
                values = np.take(values, list(keep), axis=scope.index(var))
        return Factor(tuple(scope), values)

    def normalized(self) -> "Factor":
        z = self.values.sum()
        return Factor(self.scope, self.values / z)


@dataclass(frozen=True)
class EliminationOrder:
    sequence: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Posterior:
    """A normalized posterior plus the multiplications spent computing it."""

    factor: Factor
    multiplications: int

    @property
    def probabilities(self) -> np.ndarray:
        return self.factor.vector


class OpCounter:
    def __init__(self):
        self.multiplications = 0


def multiply(f: Factor, g: Factor, counter: OpCounter | None = None) -> Factor:
    scope = f.scope + tuple(v for v in g.scope if v not in f.scope)
    values = expand_to(f.values, f.scope, scope) * expand_to(g.values, g.scope, scope)
    if counter is not None:
        counter.multiplications += values.size
    return Factor(scope, values)


def multiply_all(factors: Sequence[Factor], counter: OpCounter | None = None) -> Factor:
    """Fold a product, smallest factors first (deterministic order)."""
    if not factors:
        return Factor((), np.array(1.0))
    ordered = sorted(factors, key=lambda f: (f.size, len(f.scope), f.scope))
    out = ordered[0]
    for f in ordered[1:]:
        out = multiply(out, f, counter)
    return out


def cpt_factor(net: DiscreteNetwork, vid: str) -> Factor:
    return Factor(net.cpts[vid].parents + (vid,), net.table(vid))


def min_degree_order(factors: Iterable[Factor], eliminate: Iterable[str]) -> EliminationOrder:
    """Greedy min-degree on the interaction graph, ties by ascending id."""
    nbrs: dict[str, set[str]] = {}
    for f in factors:
        for v in f.scope:
            nbrs.setdefault(v, set()).update(u for u in f.scope if u != v)
    todo = set(eliminate)
    seq = []
    while todo:
        v = min(todo, key=lambda u: (len(nbrs.get(u, ())), u))
        around = nbrs.pop(v, set())
        for u in around:
            nbrs[u].discard(v)
            nbrs[u].update(around - {u})
        todo.discard(v)
        seq.append(v)
    return EliminationOrder(tuple(seq))


def eliminate(
    factors: Sequence[Factor],
    targets: Sequence[str],
    order: EliminationOrder | None = None,
    counter: OpCounter | None = None,
) -> Factor:
    """Sum every non-target variable out of the product of ``factors``.

    Targets absent from every factor are not added; callers broadcast.
    """
    factors = list(factors)
    present = {v for f in factors for v in f.scope}
    hidden = present - set(targets)
    if order is None:
        order = min_degree_order(factors, hidden)
    elif set(order.sequence) != hidden:
        raise ContractError("elimination order must list each hidden variable once")
    for var in order.sequence:
        involved = [f for f in factors if var in f.scope]
        if not involved:
            continue
        factors = [f for f in factors if var not in f.scope]
        factors.append(multiply_all(involved, counter).sum_out(var))
    return multiply_all(factors, counter)


def _targets(targets) -> tuple[str, ...]:
    if isinstance(targets, str):
        return (targets,)
    if isinstance(targets, (set, frozenset)):
        return tuple(sorted(targets))
    return tuple(targets)


def joint_factor(
    net: DiscreteNetwork,
    targets: Sequence[str],
    evidence: Assignment,
    *,
    restrict: Mapping[str, Sequence[int]] | None = None,
    exclude: Iterable[str] = (),
    counter: OpCounter | None = None,
) -> Factor:
    """Unnormalized P(targets, evidence) as a factor in ``targets`` order.

    ``restrict`` limits the values of some variables (axes shrink to the kept
    values); ``exclude`` drops the CPTs of the named variables.
    """
    exclude = set(exclude)
    factors = [
        cpt_factor(net, v).reduce(evidence, restrict) for v in net.ids if v not in exclude
    ]
    result = eliminate(factors, targets, counter=counter)
    shape = []
    for t in targets:
        n = net.card(t)
        if restrict and t in restrict:
            n = len(restrict[t])
        shape.append(n)
    values = np.broadcast_to(expand_to(result.values, result.scope, targets), shape)
    return Factor(tuple(targets), np.array(values))


def _check_query(net: DiscreteNetwork, targets: Sequence[str], evidence: Assignment) -> None:
    if not targets:
        raise ContractError("targets must be nonempty")
    for t in targets:
        net.var(t)
    overlap = set(targets) & set(evidence)
    if overlap:
        raise ContractError(f"targets and evidence overlap on {sorted(overlap)}")
    check_assignment(net, evidence)


def _marginal(net, targets, evidence, counter) -> Factor:
    targets = _targets(targets)
    _check_query(net, targets, evidence)
    f = joint_factor(net, targets, evidence, counter=counter)
    if not f.values.sum() > 0.0:
        raise InconsistentEvidenceError(f"evidence {dict(evidence)} has probability zero")
    return f.normalized()


def marginal(net: DiscreteNetwork, targets, evidence: Assignment | None = None) -> Factor:
    """P(targets | evidence) by variable elimination."""
    return _marginal(net, targets, evidence or {}, None)


def posterior_chain(net: DiscreteNetwork, h, evidence: Assignment | None = None) -> Posterior:
    """Posterior of hypothesis variable(s) ``h`` in one network, with its cost."""
    counter = OpCounter()
    f = _marginal(net, h, evidence or {}, counter)
    return Posterior(f, counter.multiplications)


# -- arc reversal ------------------------------------------------------------


def _has_other_path(net: DiscreteNetwork, x: str, y: str) -> bool:
    stack = [c for c in net.children(x) if c != y]
    seen = set(stack)
    while stack:
        node = stack.pop()
        if node == y:
            return True
        for c in net.children(node):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return False


def reverse_arc(net: DiscreteNetwork, x: str, y: str) -> DiscreteNetwork:
    """Turn x->y into y->x, each endpoint inheriting the other's parents.

    Rows of the new P(x | ...) whose context has probability zero are set
    uniform and reported with a :class:`ZeroContextWarning`.
    """
    if (x, y) not in net.arcs:
        raise ContractError(f"no arc {x}->{y}")
    if _has_other_path(net, x, y):
        raise AcyclicityError(f"reversing {x}->{y} would close a cycle")
    pa_x = net.cpts[x].parents
    pa_y = net.cpts[y].parents
    new_pa_y = tuple(p for p in pa_y if p != x) + tuple(p for p in pa_x if p not in pa_y)
    new_pa_x = pa_x + tuple(p for p in new_pa_y if p not in pa_x) + (y,)

    both = multiply(cpt_factor(net, x), cpt_factor(net, y))
    y_table = both.sum_out(x).transpose(new_pa_y + (y,))
    joint = both.transpose(new_pa_x + (x,)).values
    denom = expand_to(y_table.values, new_pa_y + (y,), new_pa_x + (x,))
    zero = denom[..., 0] == 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        x_table = joint / denom
    if zero.any():
        x_table[zero] = 1.0 / net.card(x)
        warnings.warn(
            f"reversing {x}->{y}: {int(zero.sum())} zero-probability rows of {x!r} set uniform",
            ZeroContextWarning,
            stacklevel=2,
        )

    arcs = set(net.arcs)
    arcs.discard((x, y))
    arcs.add((y, x))
    arcs.update((p, y) for p in new_pa_y)
    arcs.update((p, x) for p in new_pa_x)
    cpts = dict(net.cpts)
    cpts[y] = Cpt(y, new_pa_y, y_table.values.reshape(-1, net.card(y)))
    cpts[x] = Cpt(x, new_pa_x, x_table.reshape(-1, net.card(x)))
    return net.replace(arcs=frozenset(arcs), cpts=cpts)


def repeated_reversal_to_root(net: DiscreteNetwork, h: str) -> DiscreteNetwork:
    """Reverse arcs into ``h`` until it is a root.

    Each step reverses the arc from the parent latest in topological order;
    no other directed path can leave that parent towards ``h``, and every
    step strictly shrinks the ancestor set of ``h``.
    """
    net.var(h)
    while net.cpts[h].parents:
        rank = {v: i for i, v in enumerate(topological_order(net))}
        src = max(net.cpts[h].parents, key=rank.__getitem__)
        net = reverse_arc(net, src, h)
    return net
