"""Discrete Bayesian networks: variables, tables, validation and the joint oracle.

Tables follow one layout everywhere in the package: a CPT stores one row per
joint parent configuration, configurations enumerated row-major over parent
value indices (last parent fastest).  Reshaped, a CPT is therefore an array of
shape ``(*parent_cards, child_card)`` and a :class:`JointTable` is an array of
shape ``(*cards)`` flattened in C order.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import AcyclicityError, ContractError, ResourceError

TOL = 1e-9
DEFAULT_CELL_CAP = 2**22

Assignment = Mapping[str, int]


@dataclass(frozen=True)
class Variable:
    """A finite-valued variable; ``values`` fixes the index of each label."""

    id: str
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ContractError(f"variable {self.id!r} has no values")
        if len(set(self.values)) != len(self.values):
            raise ContractError(f"variable {self.id!r} has duplicate value labels")

    @property
    def card(self) -> int:
        return len(self.values)

    def index(self, label: str) -> int:
        try:
            return self.values.index(label)
        except ValueError:
            raise ContractError(f"{label!r} is not a value of {self.id!r}") from None


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability table of ``child`` given ``parents``."""

    child: str
    parents: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2:
            raise ContractError(f"CPT of {self.child!r} must be a 2-d array of rows")
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    def __eq__(self, other):
        if not isinstance(other, Cpt):
            return NotImplemented
        return (
            self.child == other.child
            and self.parents == other.parents
            and self.rows.shape == other.rows.shape
            and bool(np.array_equal(self.rows, other.rows))
        )

    __hash__ = None


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    """Every violated invariant of a model; empty iff the model is valid."""

    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


@dataclass(frozen=True, eq=False)
class DiscreteNetwork:
    """A DAG over finite-valued variables with one CPT per node.

    Variables are kept sorted by id.  Construction only rejects inputs that
    make indexing impossible (duplicate ids, arcs naming unknown variables);
    everything else is reported by :func:`validate_network`.
    """

    variables: tuple[Variable, ...]
    arcs: frozenset[tuple[str, str]]
    cpts: Mapping[str, Cpt] = field(default_factory=dict)

    def __post_init__(self):
        variables = tuple(sorted(self.variables, key=lambda v: v.id))
        ids = [v.id for v in variables]
        if len(set(ids)) != len(ids):
            raise ContractError("duplicate variable ids")
        arcs = frozenset((str(a), str(b)) for a, b in self.arcs)
        known = set(ids)
        for a, b in arcs:
            if a not in known or b not in known:
                raise ContractError(f"arc {a}->{b} names an unknown variable")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(
            self, "cpts", MappingProxyType({k: self.cpts[k] for k in sorted(self.cpts)})
        )
        object.__setattr__(self, "_index", {v.id: v for v in variables})

    def __eq__(self, other):
        if not isinstance(other, DiscreteNetwork):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.arcs == other.arcs
            and dict(self.cpts) == dict(other.cpts)
        )

    __hash__ = None

    def __repr__(self):
        arcs = ", ".join(f"{a}->{b}" for a, b in sorted(self.arcs))
        return f"DiscreteNetwork([{', '.join(self.ids)}]; {arcs})"

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.variables)

    def var(self, vid: str) -> Variable:
        try:
            return self._index[vid]
        except KeyError:
            raise ContractError(f"unknown variable {vid!r}") from None

    def __contains__(self, vid) -> bool:
        return vid in self._index

    def card(self, vid: str) -> int:
        return self.var(vid).card

    def parents(self, vid: str) -> tuple[str, ...]:
        """Parents in CPT order (falls back to id order when the CPT is missing)."""
        cpt = self.cpts.get(vid)
        if cpt is not None:
            return cpt.parents
        return tuple(sorted(a for a, b in self.arcs if b == vid))

    def children(self, vid: str) -> tuple[str, ...]:
        return tuple(sorted(b for a, b in self.arcs if a == vid))

    def table(self, vid: str) -> np.ndarray:
        """The CPT of ``vid`` reshaped to ``(*parent_cards, card)``."""
        cpt = self.cpts[vid]
        shape = tuple(self.card(p) for p in cpt.parents) + (self.card(vid),)
        return cpt.rows.reshape(shape)

    def descendants(self, vid: str) -> set[str]:
        out, stack = set(), [vid]
        while stack:
            for c in self.children(stack.pop()):
                if c not in out:
                    out.add(c)
                    stack.append(c)
        return out

    def ancestors(self, vids: Iterable[str]) -> set[str]:
        out, stack = set(), list(vids)
        while stack:
            for p in self.parents(stack.pop()):
                if p not in out:
                    out.add(p)
                    stack.append(p)
        return out

    def replace(self, *, variables=None, arcs=None, cpts=None) -> "DiscreteNetwork":
        return DiscreteNetwork(
            self.variables if variables is None else variables,
            self.arcs if arcs is None else arcs,
            dict(self.cpts) if cpts is None else cpts,
        )


def network_from_tables(
    variables: Sequence[Variable], tables: Mapping[str, tuple[Sequence[str], Sequence]]
) -> DiscreteNetwork:
    """Build a network from ``{child: (parents, rows)}``; arcs follow the parents."""
    cpts, arcs = {}, set()
    for child, (parents, rows) in tables.items():
        cpts[child] = Cpt(child, tuple(parents), rows)
        arcs.update((p, child) for p in parents)
    return DiscreteNetwork(tuple(variables), frozenset(arcs), cpts)


def assignment_from_labels(net_or_vars, labels: Mapping[str, str]) -> dict[str, int]:
    """Translate ``{var: value_label}`` into ``{var: value_index}``."""
    if isinstance(net_or_vars, DiscreteNetwork):
        lookup = net_or_vars.var
    else:
        index = {v.id: v for v in net_or_vars}

        def lookup(vid):
            if vid not in index:
                raise ContractError(f"unknown variable {vid!r}")
            return index[vid]

    return {vid: lookup(vid).index(label) for vid, label in labels.items()}


def check_assignment(net: DiscreteNetwork, a: Assignment, *, full: bool = False) -> None:
    for vid, idx in a.items():
        card = net.card(vid)
        if not (0 <= int(idx) < card):
            raise ContractError(f"value index {idx} out of range for {vid!r}")
    if full and set(a) != set(net.ids):
        missing = sorted(set(net.ids) - set(a))
        raise ContractError(f"assignment is not full; missing {missing}")


# -- validation --------------------------------------------------------------


def _find_cycle(ids: Sequence[str], arcs: Iterable[tuple[str, str]]) -> list[str] | None:
    succ = {i: [] for i in ids}
    for a, b in arcs:
        succ[a].append(b)
    color = dict.fromkeys(ids, 0)
    for root in sorted(ids):
        if color[root]:
            continue
        stack = [(root, iter(sorted(succ[root])))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
            elif color[nxt] == 1:
                return path[path.index(nxt):] + [nxt]
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(succ[nxt]))))
    return None


def validate_network(net: DiscreteNetwork) -> ValidationReport:
    out = []
    cycle = _find_cycle(net.ids, net.arcs)
    if cycle:
        out.append(Violation("cycle", "->".join(cycle)))
    for vid, cpt in net.cpts.items():
        if vid not in net:
            out.append(Violation("extra-cpt", f"CPT for unknown variable {vid!r}"))
        elif cpt.child != vid:
            out.append(Violation("extra-cpt", f"CPT keyed {vid!r} describes {cpt.child!r}"))
    for v in net.variables:
        cpt = net.cpts.get(v.id)
        if cpt is None or cpt.child != v.id:
            out.append(Violation("missing-cpt", f"no CPT for {v.id!r}"))
            continue
        in_nbrs = {a for a, b in net.arcs if b == v.id}
        if len(set(cpt.parents)) != len(cpt.parents) or set(cpt.parents) != in_nbrs:
            out.append(
                Violation(
                    "parent-mismatch",
                    f"{v.id!r}: CPT parents {list(cpt.parents)} vs arcs from {sorted(in_nbrs)}",
                )
            )
            continue
        n_rows = math.prod(net.card(p) for p in cpt.parents)
        if cpt.rows.shape != (n_rows, v.card):
            out.append(
                Violation(
                    "row-shape",
                    f"{v.id!r}: expected {n_rows} rows of length {v.card}, got shape {cpt.rows.shape}",
                )
            )
            continue
        rows = cpt.rows
        if not np.all(np.isfinite(rows)) or rows.min(initial=0.0) < 0.0 or rows.max(initial=0.0) > 1.0:
            out.append(Violation("range", f"{v.id!r}: entries outside [0, 1]"))
        sums = rows.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > TOL)
        if bad.size:
            out.append(
                Violation("normalization", f"{v.id!r}: rows {bad.tolist()} do not sum to 1")
            )
    return ValidationReport(tuple(out))


def topological_order(net: DiscreteNetwork) -> list[str]:
    """Kahn's algorithm with ties broken by ascending id."""
    indeg = dict.fromkeys(net.ids, 0)
    succ = {i: [] for i in net.ids}
    for a, b in net.arcs:
        indeg[b] += 1
        succ[a].append(b)
    heap = [i for i, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        node = heapq.heappop(heap)
        order.append(node)
        for c in succ[node]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    if len(order) != len(indeg):
        raise AcyclicityError(f"cycle among {sorted(set(indeg) - set(order))}")
    return order


def order_of_arcs(ids: Iterable[str], arcs: Iterable[tuple[str, str]]) -> list[str]:
    """Topological order of an arbitrary arc set over ``ids``, ties by id."""
    ids = sorted(set(ids))
    vs = [Variable(i, i, ("0",)) for i in ids]
    arcs = [(a, b) for a, b in arcs if a in set(ids) and b in set(ids)]
    return topological_order(DiscreteNetwork(tuple(vs), frozenset(arcs), {}))


# -- joint oracle ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JointTable:
    """Dense table over the Cartesian domain of ``scope`` (last variable fastest)."""

    scope: tuple[str, ...]
    cards: tuple[int, ...]
    probabilities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        object.__setattr__(self, "cards", tuple(int(c) for c in self.cards))
        p = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if p.size != math.prod(self.cards):
            raise ContractError("probability vector length does not match the scope")
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    @property
    def array(self) -> np.ndarray:
        return self.probabilities.reshape(self.cards)

    def probability(self, a: Assignment) -> float:
        return float(self.array[tuple(a[v] for v in self.scope)])

    def marginal(self, keep: Sequence[str]) -> np.ndarray:
        """Sum out everything but ``keep``; axes come back in ``keep`` order."""
        drop = tuple(i for i, v in enumerate(self.scope) if v not in keep)
        arr = self.array.sum(axis=drop)
        rest = [v for v in self.scope if v in keep]
        return np.transpose(arr, [rest.index(v) for v in keep])

    def transpose(self, scope: Sequence[str]) -> "JointTable":
        if sorted(scope) != sorted(self.scope):
            raise ContractError("transpose needs a permutation of the scope")
        perm = [self.scope.index(v) for v in scope]
        arr = np.transpose(self.array, perm)
        return JointTable(tuple(scope), tuple(self.cards[i] for i in perm), arr.reshape(-1))


def expand_to(table: np.ndarray, table_scope: Sequence[str], full_scope: Sequence[str]) -> np.ndarray:
    """Align ``table`` to ``full_scope`` for broadcasting (size-1 axes where absent)."""
    present = [v for v in full_scope if v in table_scope]
    arr = np.transpose(table, [list(table_scope).index(v) for v in present])
    shape, k = [], 0
    for v in full_scope:
        if v in table_scope:
            shape.append(arr.shape[k])
            k += 1
        else:
            shape.append(1)
    return arr.reshape(shape)


def joint_probability(net: DiscreteNetwork, a: Assignment) -> float:
    """Chain-rule product of the CPT entries selected by a full assignment."""
    check_assignment(net, a, full=True)
    p = 1.0
    for vid in topological_order(net):
        table = net.table(vid)
        p = p * float(table[tuple(a[q] for q in net.cpts[vid].parents) + (a[vid],)])
    return p


def enumerate_joint(net: DiscreteNetwork, cap: int = DEFAULT_CELL_CAP) -> JointTable:
    """Expand ``net`` into its full joint table.

    Multiplies CPTs in topological order starting from ones, the same
    sequence of float products :func:`joint_probability` performs, so the two
    agree bit for bit.
    """
    cards = tuple(v.card for v in net.variables)
    size = math.prod(cards)
    if size > cap:
        raise ResourceError(f"joint domain has {size} cells, cap is {cap}")
    scope = net.ids
    arr = np.ones(cards)
    for vid in topological_order(net):
        cpt = net.cpts[vid]
        arr = arr * expand_to(net.table(vid), cpt.parents + (vid,), scope)
    return JointTable(scope, cards, arr.reshape(-1))


# -- structure queries -------------------------------------------------------


def d_separated(net: DiscreteNetwork, X: Iterable[str], Y: Iterable[str], Z: Iterable[str]) -> bool:
    """Reachability ("Bayes ball") test of X _|_ Y | Z."""
    X, Y, Z = set(X), set(Y), set(Z)
    if not X or not Y:
        raise ContractError("X and Y must be nonempty")
    if X & Y or X & Z or Y & Z:
        raise ContractError("X, Y and Z must be pairwise disjoint")
    for v in X | Y | Z:
        net.var(v)
    parents = {v: [a for a, b in net.arcs if b == v] for v in net.ids}
    children = {v: [b for a, b in net.arcs if a == v] for v in net.ids}
    z_anc = set(Z) | net.ancestors(Z)

    visited, reachable = set(), set()
    todo = [(x, "up") for x in X]
    while todo:
        node, direction = todo.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node not in Z:
            reachable.add(node)
        if direction == "up" and node not in Z:
            todo.extend((p, "up") for p in parents[node])
            todo.extend((c, "down") for c in children[node])
        elif direction == "down":
            if node not in Z:
                todo.extend((c, "down") for c in children[node])
            if node in z_anc:
                todo.extend((p, "up") for p in parents[node])
    return not (reachable & Y)


def free_parameter_count(net: DiscreteNetwork, cards: Mapping[str, int] | None = None) -> int:
    """Sum of (card - 1) * prod(parent cards); ``cards`` overrides cardinalities."""
    def card(v):
        return cards[v] if cards and v in cards else net.card(v)

    return sum(
        (card(v) - 1) * math.prod(card(p) for p in net.parents(v)) for v in net.ids
    )
