import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymnet import fixtures as fx
from asymnet.core import Cpt, enumerate_joint, network_from_tables
from asymnet.errors import (
    ContractError,
    InconsistentSimnetError,
    ModelValidationError,
    UndefinedConditionalError,
    ZeroContextWarning,
    ZeroPriorError,
)
from asymnet.inference import marginal
from asymnet.multinet import HypothesisSpace, multinet_joint, union_network, validate_multinet
from asymnet.simnet import (
    IRRELEVANT,
    Cover,
    OrdinaryLocalNetwork,
    SimilarityNetwork,
    chain_order,
    conditional_factor,
    convert_to_multinet,
    is_coherent,
    is_connected_cover,
    recover_priors,
    reconstruct_joint,
    redundancy_report,
    relevance_prune,
    simnet_from_network,
    simple_edge_paths,
    validate_simnet,
)
from asymnet.synth import H, families, random_joint_network
from helpers import all_assignments, oracle_conditional, random_cover

HYP4 = HypothesisSpace((fx.H4,))
S, V, W, E = (0,), (1,), (2,), (3,)


def joint_close(a, b, atol=1e-9):
    np.testing.assert_allclose(a.probabilities, b.transpose(a.scope).probabilities, atol=atol)


def prior_only_simnet(edges, conditionals):
    """A simnet whose locals hold nothing but the within-edge hypothesis prior."""
    locals_ = []
    for i, (edge, cond) in enumerate(zip(edges, conditionals)):
        row = np.zeros(4)
        for pt, c in zip(edge, cond):
            row[pt] = c
        net = network_from_tables([fx.H4], {"h": ((), [row])})
        locals_.append(OrdinaryLocalNetwork(i, frozenset({"h"}), net))
    return SimilarityNetwork(Cover(HYP4, tuple(edges)), tuple(locals_), ("h",))


class TestConnectedCover:
    def test_chain(self):
        assert is_connected_cover(Cover(HYP4, fx.CHAIN_COVER))

    def test_two_pairs(self):
        assert not is_connected_cover(Cover(HYP4, ((S, V), (W, E))))

    def test_hyperedge(self):
        assert is_connected_cover(Cover(HYP4, ((W, E, V), (V, S))))

    def test_point_outside(self):
        with pytest.raises(ContractError):
            is_connected_cover(Cover(HYP4, ((S, V), (V, (4,)))))

    def test_figure7(self):
        hyp = HypothesisSpace((fx.P1, fx.P2))
        assert is_connected_cover(Cover(hyp, fx.FIG7_COVER))
        assert len(hyp.domain) == 9


class TestValidate:
    def test_figure5_ok(self):
        assert validate_simnet(fx.figure5()).ok

    def test_bridge_removed(self):
        s = fx.figure5()
        sv, _, we = s.locals
        locals_ = (sv, OrdinaryLocalNetwork(1, we.depicted, we.network))
        cut = SimilarityNetwork(Cover(HYP4, ((S, V), (W, E))), locals_, s.variables)
        assert "disconnected-cover" in validate_simnet(cut).kinds()

    def test_support_leak(self):
        s = fx.figure5()
        sv = s.locals[0]
        net = sv.network
        leaky = net.replace(cpts={**net.cpts, "h": Cpt("h", (), np.array([[0.2, 0.7, 0.1, 0.0]]))})
        locals_ = (OrdinaryLocalNetwork(0, sv.depicted, leaky),) + s.locals[1:]
        rep = validate_simnet(SimilarityNetwork(s.cover, locals_, s.variables))
        assert "support" in rep.kinds()

    def test_undepicted_variable(self):
        s = fx.figure5()
        rep = validate_simnet(SimilarityNetwork(s.cover, s.locals, s.variables + ("z",)))
        assert "undepicted" in rep.kinds()


class TestPrune:
    def test_worker_executive_drops_g_and_b(self):
        we = fx.figure3().locals[1]
        out = relevance_prune(we, HYP4, (W, E))
        assert out.depicted == {"h", "l"}

    def test_spy_visitor_drops_l(self):
        sv = fx.figure3().locals[0]
        assert relevance_prune(sv, HYP4, (S, V)).depicted == {"h", "g", "b"}

    def test_nothing_prunable(self):
        net = fx.figure1()
        hyp = HypothesisSpace((fx.H3,))
        out = relevance_prune(net, hyp, hyp.domain)
        assert out.network == net


class TestRecoverPriors:
    def test_uniform_chain(self):
        s = prior_only_simnet(fx.CHAIN_COVER, [(0.5, 0.5)] * 3)
        assert recover_priors(s).values.tolist() == [0.25] * 4

    def test_chain_sevenths(self):
        s = prior_only_simnet(fx.CHAIN_COVER, [(1 / 3, 2 / 3), (0.5, 0.5), (0.5, 0.5)])
        got = recover_priors(s).values
        # independent check: three edge equations plus normalization, solved densely
        A = np.array(
            [
                [1 - 1 / 3, -1 / 3, 0, 0],
                [0, 1 - 0.5, -0.5, 0],
                [0, 0, 1 - 0.5, -0.5],
                [1, 1, 1, 1],
            ]
        )
        dense = np.linalg.solve(A, [0, 0, 0, 1])
        np.testing.assert_allclose(dense, [1 / 7, 2 / 7, 2 / 7, 2 / 7], atol=1e-12)
        np.testing.assert_allclose(got, dense, atol=1e-12)

    def test_figure5(self):
        np.testing.assert_allclose(recover_priors(fx.figure5()).values, fx.FIG3_PRIORS, atol=1e-12)

    def test_zero_conditional(self):
        s = prior_only_simnet(fx.CHAIN_COVER, [(1.0, 0.0), (0.5, 0.5), (0.5, 0.5)])
        with pytest.raises(ZeroPriorError):
            recover_priors(s)

    def test_incoherent_cycle(self):
        s = prior_only_simnet(((S, V), (V, W), (W, S), (W, E)), [(0.5, 0.5), (0.5, 0.5), (0.2, 0.8), (0.5, 0.5)])
        with pytest.raises(InconsistentSimnetError):
            recover_priors(s)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_edge_equations(self, s):
        rng = np.random.default_rng(s)
        net = random_joint_network(rng, clue_cards=(2,))
        hyp = HypothesisSpace((H,))
        sim = simnet_from_network(net, hyp, random_cover(rng, hyp))
        p = recover_priors(sim).values
        assert abs(p.sum() - 1) <= 1e-9
        for edge, l in zip(sim.cover.edges, sim.locals):
            cond = marginal(l.network, ["h"]).values
            mass = sum(p[pt] for pt in edge)
            for pt in edge:
                assert abs(p[pt] - cond[pt] * mass) <= 1e-9
        np.testing.assert_allclose(p, marginal(net, ["h"]).values, atol=1e-9)


class TestConditionalFactor:
    def test_limousine_for_spy(self):
        s = fx.figure5()
        got = conditional_factor(s, "l", {}, S)
        want = s.locals[2].network.table("l")[2]
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_local_case(self):
        s = fx.figure5()
        got = conditional_factor(s, "g", {}, S)
        np.testing.assert_allclose(got, [0.9, 0.1], atol=1e-15)
        assert simple_edge_paths(s, "g", S) == [[0]]

    def test_hypothesis_variable_rejected(self):
        with pytest.raises(ContractError):
            conditional_factor(fx.figure5(), "h", {}, S)

    def test_undepicted_is_irrelevant(self):
        s = prior_only_simnet(fx.CHAIN_COVER, [(0.5, 0.5)] * 3)
        assert conditional_factor(s, "g", {}, S) is IRRELEVANT

    def test_undefined(self):
        s = fx.figure5()
        # g=female never happens for visitors in this variant
        vw = s.locals[1].network
        zero_g = vw.replace(cpts={**vw.cpts, "g": Cpt("g", ("h",), np.array([[0.5, 0.5], [1.0, 0.0], [0.6, 0.4], [0.5, 0.5]]))})
        with pytest.raises(UndefinedConditionalError):
            conditional_factor(
                SimilarityNetwork(s.cover, (s.locals[0], OrdinaryLocalNetwork(1, s.locals[1].depicted, zero_g), s.locals[2]), s.variables),
                "b",
                {"g": 1},
                V,
                path=[1],
            )

    def test_bound_variable(self):
        with pytest.raises(ContractError):
            conditional_factor(fx.figure5(), "g", {"g": 0}, S)

    def test_random_families(self, seed):
        for fam in families(seed, 30):
            s = simnet_from_network(fam.network, fam.hypothesis, fam.cover)
            order = [v for v in chain_order(s) if v != "h"]
            for k, x in enumerate(order):
                preds = order[:k]
                for ctx in all_assignments(fam.network, preds):
                    for p in fam.hypothesis.domain:
                        got = conditional_factor(s, x, ctx, p)
                        want = oracle_conditional(fam.network, [x], {**ctx, "h": p[0]})
                        np.testing.assert_allclose(got, want, atol=1e-9)


class TestReconstruct:
    def test_figure5_is_figure3(self):
        joint_close(multinet_joint(fx.figure3()), reconstruct_joint(fx.figure5()))

    def test_single_edge(self):
        net = fx.figure1()
        hyp = HypothesisSpace((fx.H3,))
        s = SimilarityNetwork(Cover(hyp, (hyp.domain,)), (OrdinaryLocalNetwork(0, frozenset(net.ids), net),), net.ids)
        got = reconstruct_joint(s)
        want = enumerate_joint(net)
        assert np.array_equal(got.transpose(want.scope).probabilities, want.probabilities)

    def test_uniform(self):
        u = np.full((4, 2), 0.5)
        locals_ = []
        for i, edge in enumerate(fx.CHAIN_COVER):
            row = np.zeros(4)
            row[[pt[0] for pt in edge]] = 0.5
            net = network_from_tables(
                [fx.H4, fx.G, fx.B], {"h": ((), [row]), "g": (("h",), u), "b": (("h",), u)}
            )
            locals_.append(OrdinaryLocalNetwork(i, frozenset(net.ids), net))
        s = SimilarityNetwork(Cover(HYP4, fx.CHAIN_COVER), tuple(locals_))
        jt = reconstruct_joint(s)
        np.testing.assert_allclose(jt.probabilities, 1 / 16, atol=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_round_trip_from_joint(self, s):
        rng = np.random.default_rng(s)
        net = random_joint_network(rng, clue_cards=tuple(int(c) for c in rng.integers(2, 4, size=int(rng.integers(1, 4)))))
        hyp = HypothesisSpace((H,))
        sim = simnet_from_network(net, hyp, random_cover(rng, hyp))
        joint_close(enumerate_joint(net), reconstruct_joint(sim))

    def test_round_trip_families(self, seed):
        for fam in families(seed, 50):
            s = simnet_from_network(fam.network, fam.hypothesis, fam.cover)
            joint_close(enumerate_joint(fam.network), reconstruct_joint(s))

    def test_sums_to_one(self):
        assert abs(reconstruct_joint(fx.figure7()).probabilities.sum() - 1) <= 1e-9


class TestConvert:
    def test_figure5_gives_figure3(self):
        m = convert_to_multinet(fx.figure5())
        f3 = fx.figure3()
        assert m.blocks == f3.blocks
        assert [l.arcs for l in m.locals] == [l.arcs for l in f3.locals]
        np.testing.assert_allclose(m.block_priors, f3.block_priors, atol=1e-12)
        joint_close(reconstruct_joint(fx.figure5()), multinet_joint(m))

    def test_single_edge_unchanged(self):
        net = fx.figure1()
        hyp = HypothesisSpace((fx.H3,))
        s = SimilarityNetwork(Cover(hyp, (hyp.domain,)), (OrdinaryLocalNetwork(0, frozenset(net.ids), net),))
        m = convert_to_multinet(s)
        assert m.blocks == (hyp.domain,)
        assert m.locals[0].arcs == net.arcs
        assert m.block_priors.tolist() == [1.0]
        joint_close(enumerate_joint(net), multinet_joint(m))

    def test_multi_block_partition_is_not_connected(self):
        f3 = fx.figure3()
        locals_ = (
            OrdinaryLocalNetwork(0, frozenset(f3.locals[0].ids), f3.locals[0], frozenset({"l"})),
            OrdinaryLocalNetwork(1, frozenset(f3.locals[1].ids), f3.locals[1], frozenset({"g", "b"})),
        )
        s = SimilarityNetwork(Cover(HYP4, f3.blocks), locals_)
        assert validate_simnet(s).kinds() == {"disconnected-cover"}
        with pytest.raises(ModelValidationError):
            convert_to_multinet(s)

    def test_random_families(self, seed):
        for fam in families(seed, 100):
            s = simnet_from_network(fam.network, fam.hypothesis, fam.cover)
            m = convert_to_multinet(s)
            assert validate_multinet(m).ok
            src = enumerate_joint(fam.network)
            joint_close(src, multinet_joint(m))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ZeroContextWarning)
                joint_close(src, enumerate_joint(union_network(m)))

    def test_figure7(self):
        m = convert_to_multinet(fx.figure7())
        joint_close(enumerate_joint(fx.figure7_network()), multinet_joint(m))


class TestRedundancy:
    def test_figure5(self):
        rep = redundancy_report(fx.figure5())
        shared = {(r.variable, r.point, r.edges) for r in rep}
        assert ("g", V, (0, 1)) in shared
        assert all(not r.incoherent for r in rep)
        assert is_coherent(fx.figure5())

    def test_mismatch_flagged(self):
        s = fx.figure5()
        vw = s.locals[1].network
        g = vw.cpts["g"].rows.copy()
        g[1] = [0.6, 0.4]
        vw = vw.replace(cpts={**vw.cpts, "g": Cpt("g", ("h",), g)})
        s = SimilarityNetwork(s.cover, (s.locals[0], OrdinaryLocalNetwork(1, s.locals[1].depicted, vw), s.locals[2]), s.variables)
        bad = [r for r in redundancy_report(s) if r.incoherent]
        assert [(r.variable, r.point) for r in bad] == [("g", V)]
        assert bad[0].discrepancy == pytest.approx(0.1)
        assert not is_coherent(s)

    def test_partition_empty(self):
        f3 = fx.figure3()
        locals_ = tuple(
            OrdinaryLocalNetwork(i, frozenset(l.ids), l, frozenset(l.ids) - {"h"}) for i, l in enumerate(f3.locals)
        )
        assert redundancy_report(SimilarityNetwork(Cover(HYP4, f3.blocks), locals_)) == []


def _path_values(s, x, ctx, p):
    vals = []
    for path in simple_edge_paths(s, x, p):
        try:
            vals.append(conditional_factor(s, x, ctx, p, path=path))
        except UndefinedConditionalError:
            pass
    return vals


@pytest.mark.parametrize("make", [fx.figure5, fx.figure7], ids=["chain", "two-person"])
def test_path_independence(make):
    s = make()
    order = [v for v in chain_order(s) if v not in s.hypothesis.ids]
    some_multi = False
    for k, x in enumerate(order):
        preds = order[:k]
        cards = [s.variable(v).card for v in preds]
        for combo in itertools.product(*(range(c) for c in cards)):
            ctx = dict(zip(preds, combo))
            for p in s.hypothesis.domain:
                vals = _path_values(s, x, ctx, p)
                some_multi |= len(vals) > 1
                for v in vals[1:]:
                    np.testing.assert_allclose(v, vals[0], atol=1e-9)
    assert some_multi


def test_path_independence_families(seed):
    for fam in families(seed, 20):
        s = simnet_from_network(fam.network, fam.hypothesis, fam.cover)
        for x in s.variables:
            if x == "h":
                continue
            for p in s.hypothesis.domain:
                vals = _path_values(s, x, {}, p)
                for v in vals[1:]:
                    np.testing.assert_allclose(v, vals[0], atol=1e-9)


class TestTwoPerson:
    def test_inter_hypothesis_independence_in_spy_visitor_block(self):
        s = fx.figure7()
        assert ("h1", "h2") not in s.locals[0].network.arcs
        assert ("h1", "h2") in s.locals[1].network.arcs

    def test_reconstructs_generating_joint(self):
        joint_close(enumerate_joint(fx.figure7_network()), reconstruct_joint(fx.figure7()))

    def test_other_seeds(self):
        for seed in (0, 1, 7):
            joint_close(enumerate_joint(fx.figure7_network(seed)), reconstruct_joint(fx.figure7(seed)))
