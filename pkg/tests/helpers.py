"""Brute-force reference computations shared by the tests."""

import itertools

import numpy as np

from asymnet.core import Cpt, enumerate_joint
from asymnet.multinet import Multinet, restrict_network
from asymnet.simnet import Cover, is_connected_cover
from asymnet.synth import random_family


def oracle_conditional(net, targets, evidence):
    """P(targets | evidence) straight from the enumerated joint."""
    jt = enumerate_joint(net)
    arr = jt.array
    idx = tuple(evidence.get(v, slice(None)) for v in jt.scope)
    arr = arr[idx]
    rest = [v for v in jt.scope if v not in evidence]
    arr = arr.sum(axis=tuple(i for i, v in enumerate(rest) if v not in targets))
    kept = [v for v in rest if v in targets]
    arr = np.transpose(arr, [kept.index(t) for t in targets])
    return arr / arr.sum()


def all_assignments(net, ids=None):
    ids = list(net.ids if ids is None else ids)
    for combo in itertools.product(*(range(net.card(v)) for v in ids)):
        yield dict(zip(ids, combo))


def redraw(net, rng, keep=("h",)):
    """Same structure, fresh rows for every CPT not in ``keep``."""
    cpts = {
        v: c if v in keep else Cpt(v, c.parents, rng.dirichlet(np.ones(c.rows.shape[1]), size=c.rows.shape[0]))
        for v, c in net.cpts.items()
    }
    return net.replace(cpts=cpts)


def random_multinet(rng):
    """Blocks of a generated family with independently drawn local tables."""
    fam = random_family(rng)
    locals_ = [restrict_network(redraw(fam.network, rng), fam.hypothesis, b) for b in fam.blocks]
    return Multinet(fam.hypothesis, fam.blocks, tuple(locals_), rng.dirichlet(np.ones(len(fam.blocks))))


def random_cover(rng, hyp, max_edges=3):
    """A connected cover of domain(H) with random edges."""
    pts = list(hyp.domain)
    while True:
        edges = []
        for _ in range(int(rng.integers(1, max_edges + 1))):
            size = int(rng.integers(1, len(pts) + 1))
            idx = sorted(rng.choice(len(pts), size=size, replace=False).tolist())
            edges.append(tuple(pts[i] for i in idx))
        c = Cover(hyp, tuple(edges))
        if c.covers() and is_connected_cover(c):
            return c
