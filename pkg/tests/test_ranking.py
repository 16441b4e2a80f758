import itertools
import math

import numpy as np
import pytest

from diverso.corpus import RestrictionSet, graph_distance, text_distance
from diverso.ranking import (
    RankParams,
    ScoredSet,
    Variant,
    diss_distance,
    marginal_gain,
    minmax_branch,
    rel_distance,
    score_of,
)

from conftest import make_graph, random_graph

SQ2 = 1.0 - 1.0 / math.sqrt(2.0)


class TestRelDistance:
    def test_alpha_zero_is_text_only(self, fixture6):
        p = RankParams(lambda_=0.8, alpha=0.0)
        assert rel_distance(fixture6, 0, 2, p) == pytest.approx(1.0)
        assert rel_distance(fixture6, 0, 3, p) == pytest.approx(SQ2)

    def test_alpha_one_unreachable(self, fixture6):
        p = RankParams(lambda_=0.8, alpha=1.0)
        assert rel_distance(fixture6, 1, 2, p) == 1.0

    def test_affine_mix(self, fixture6):
        p = RankParams(lambda_=0.8, alpha=0.5)
        # q=0, u=3: graph 2/4 = 0.5, text 1 - 1/sqrt(2)
        assert rel_distance(fixture6, 0, 3, p) == pytest.approx(0.5 * 0.5 + 0.5 * SQ2)
        assert rel_distance(fixture6, 0, 3, p) == pytest.approx(0.396447, abs=1e-6)


class TestDissDistance:
    def test_beta_zero_is_text(self, fixture6):
        p = RankParams(beta=0.0)
        assert diss_distance(fixture6, 1, 2, p) == pytest.approx(
            text_distance(fixture6.docs[1].vector, fixture6.docs[2].vector)
        )

    def test_self_distance_zero(self, fixture6):
        p = RankParams(beta=1.0)
        assert diss_distance(fixture6, 3, 3, p) == 0.0

    def test_unreachable_pair(self, fixture6):
        p = RankParams(beta=0.8)
        # 1 -> 2 unreachable and orthogonal text: 0.8 * 1 + 0.2 * 1
        assert diss_distance(fixture6, 1, 2, p) == pytest.approx(1.0)


class TestScoreOf:
    def test_singleton_minmax_zero_rel(self, fixture6):
        p = RankParams(lambda_=0.8, alpha=0.0, variant=Variant.MIN_MAX)
        assert score_of(fixture6, 0, [1], p) == 0.0

    def test_lambda_one_relevance_only(self, fixture6):
        for variant in Variant:
            pa = RankParams(lambda_=1.0, alpha=0.0, beta=0.2, variant=variant)
            pb = RankParams(lambda_=1.0, alpha=0.0, beta=0.9, variant=variant)
            sa = score_of(fixture6, 0, [1, 2, 3], pa)
            sb = score_of(fixture6, 0, [1, 2, 3], pb)
            assert sa == sb  # beta ignored bit-identically

    def test_lambda_zero_ignores_alpha(self, fixture6):
        for variant in Variant:
            pa = RankParams(lambda_=0.0, alpha=0.1, beta=0.5, variant=variant)
            pb = RankParams(lambda_=0.0, alpha=0.9, beta=0.5, variant=variant)
            assert score_of(fixture6, 0, [1, 2, 3], pa) == score_of(fixture6, 0, [1, 2, 3], pb)

    def test_fixture_example_minavg(self, fixture6):
        p = RankParams(lambda_=0.8, alpha=0.0, beta=0.8, variant=Variant.MIN_AVG)
        # (0.8/2)(0 + 1) - (0.2/2) * 1.0
        assert score_of(fixture6, 0, [1, 2], p) == pytest.approx(0.3, abs=1e-12)

    def test_empty_set_rejected(self, fixture6):
        with pytest.raises(ValueError):
            score_of(fixture6, 0, [], RankParams())

    def test_recompute_on_stored_ordering_reproduces_score(self, fixture6):
        p = RankParams(lambda_=0.5, alpha=0.3, beta=0.7, variant=Variant.MIN_AVG)
        s = ScoredSet.compute(fixture6, 0, (3, 1, 5), p)
        assert score_of(fixture6, 0, s.items, p) == pytest.approx(s.score, abs=1e-9)

    def test_permutation_invariance_under_symmetrization(self):
        # with a symmetric edge set the min-avg score ignores ordering
        vecs = [{"a": 1.0}, {"b": 1.0}, {"a": 1.0, "c": 1.0}, {"c": 1.0}]
        edges = [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2), (0, 3), (3, 0)]
        g = make_graph(vecs, edges)
        p = RankParams(lambda_=0.6, alpha=0.5, beta=0.5, variant=Variant.MIN_AVG)
        scores = {
            round(score_of(g, 0, perm, p), 12)
            for perm in itertools.permutations([1, 2, 3])
        }
        assert len(scores) == 1

    def test_minmax_expressible_as_extremes(self, fixture6):
        p = RankParams(lambda_=0.7, alpha=0.2, beta=0.6, variant=Variant.MIN_MAX)
        items = (1, 3, 5)
        s = score_of(fixture6, 0, items, p)
        rels = {rel_distance(fixture6, 0, u, p) for u in items}
        pairs = {
            diss_distance(fixture6, items[i], items[j], p)
            for i in range(3)
            for j in range(i + 1, 3)
        } | {0.0}
        matches = [
            0.7 * a - 0.3 * b
            for a in rels
            for b in pairs
            if abs(0.7 * a - 0.3 * b - s) < 1e-12
        ]
        assert matches


class TestMarginalGain:
    def test_fixture_example(self, fixture6):
        p = RankParams(lambda_=0.8, alpha=0.0, beta=0.8, variant=Variant.MIN_AVG)
        assert marginal_gain(fixture6, 0, [1], 2, p) == pytest.approx(0.3, abs=1e-12)

    def test_singleton_definition(self, fixture6):
        p = RankParams(lambda_=0.5, alpha=0.4, beta=0.6, variant=Variant.MIN_AVG)
        gain = marginal_gain(fixture6, 0, [2], 4, p)
        want = score_of(fixture6, 0, [2, 4], p) - score_of(fixture6, 0, [2], p)
        assert gain == pytest.approx(want, abs=1e-12)

    def test_member_rejected(self, fixture6):
        with pytest.raises(ValueError):
            marginal_gain(fixture6, 0, [1, 2], 2, RankParams())

    def test_minmax_case_i_zero(self, fixture6):
        # u = 1 vs S = (2, 4): relevance below the max, dissimilarity at the pair min
        p = RankParams(lambda_=0.5, alpha=0.0, beta=0.0, variant=Variant.MIN_MAX)
        items = (2, 4)
        u = 1
        assert minmax_branch(fixture6, 0, items, u, p) == 1
        assert marginal_gain(fixture6, 0, items, u, p) == 0.0

    @pytest.mark.parametrize("variant", list(Variant))
    def test_consistency_random(self, variant):
        rng = np.random.default_rng(42 if variant is Variant.MIN_AVG else 43)
        checked = 0
        while checked < 300:
            g = random_graph(rng, max_v=30, min_v=6, vocab=12)
            lam, a, b = rng.choice([0.2, 0.5, 0.8], size=3)
            p = RankParams(lambda_=float(lam), alpha=float(a), beta=float(b), variant=variant)
            q = int(rng.integers(0, g.vertex_count))
            others = [v for v in range(g.vertex_count) if v != q]
            size = int(rng.integers(1, 4))
            sel = rng.choice(others, size=min(size + 1, len(others)), replace=False)
            items, u = [int(x) for x in sel[:-1]], int(sel[-1])
            if not items:
                continue
            gain = marginal_gain(g, q, items, u, p)
            want = score_of(g, q, items + [u], p) - score_of(g, q, items, p)
            assert abs(gain - want) < 1e-9
            checked += 1


class TestRankParams:
    def test_range_validation(self):
        with pytest.raises(ValueError):
            RankParams(lambda_=1.2)
        with pytest.raises(ValueError):
            RankParams(alpha=-0.1)

    def test_variant_parse(self):
        assert Variant.parse("avg") is Variant.MIN_AVG
        assert Variant.parse("MAX") is Variant.MIN_MAX
        with pytest.raises(ValueError):
            Variant.parse("median")

    def test_scored_set_rejects_duplicates(self):
        with pytest.raises(ValueError):
            ScoredSet((1, 1), 0.0)
