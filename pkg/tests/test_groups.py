import numpy as np
import pytest

from framecert.groups import (
    GroupModel,
    NonSymmetricNeighborhood,
    OutOfCarrier,
    compact_set,
    complement,
    full_point_set,
    is_symmetric,
    measure,
    point_set,
    product_set,
    separation_constant,
    translate_set,
)


@pytest.fixture
def z8():
    return GroupModel.cyclic([8])


@pytest.fixture
def z4x4():
    return GroupModel.cyclic([4, 4])


def test_compose_examples(z8, z4x4):
    assert z8.compose(3, 6) == 1
    assert z4x4.compose((1, 2), (3, 3)) == (0, 1)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = z8.carrier[rng.integers(0, 8)]
        assert z8.compose(z8.identity, x) == x
        assert z8.compose(x, z8.identity) == x


def test_inverse_examples(z8, z4x4):
    assert z8.inverse(3) == 5
    assert z4x4.inverse((1, 2)) == (3, 2)
    assert z8.inverse(z8.identity) == z8.identity
    for x in z8.carrier:
        assert z8.compose(x, z8.inverse(x)) == z8.identity


def test_ball_examples(z8, z4x4):
    assert z8.ball(1).members == frozenset({7, 0, 1})
    assert z8.ball(0).members == frozenset({0})
    assert len(z4x4.ball(1)) == 9


def test_ball_symmetry(z8, z4x4):
    for group in (z8, z4x4, GroupModel.cyclic([5]), GroupModel.box([2, 1])):
        for r in range(4):
            U = group.ball(r)
            assert group.identity in U
            assert is_symmetric(U)
            for x in U.members:
                assert group.inverse(x) in U


def test_product_set_examples(z8):
    z4 = GroupModel.cyclic([4])
    assert product_set(compact_set(z8, [0, 1]), compact_set(z8, [0, 1])).members == frozenset(
        {0, 1, 2}
    )
    K = compact_set(z8, [2, 5, 6])
    assert product_set(K, compact_set(z8, [0])).members == K.members
    assert product_set(compact_set(z4, [0, 2]), compact_set(z4, [0, 2])).members == frozenset(
        {0, 2}
    )


def test_product_monotonicity(z8):
    rng = np.random.default_rng(1)
    for _ in range(20):
        small = compact_set(z8, rng.choice(8, size=3, replace=False))
        big = compact_set(z8, set(small.members) | {int(rng.integers(0, 8))})
        L = compact_set(z8, rng.choice(8, size=2, replace=False))
        assert product_set(small, L).members <= product_set(big, L).members


def test_translate_examples(z8, z4x4):
    assert translate_set(3, compact_set(z8, [0, 1])).members == frozenset({3, 4})
    K = compact_set(z8, [1, 5])
    assert translate_set(z8.identity, K).members == K.members
    assert translate_set((1, 0), compact_set(z4x4, [(0, 0), (0, 1)])).members == frozenset(
        {(1, 0), (1, 1)}
    )


def test_left_invariance_of_measure(z8, z4x4):
    for group in (z8, z4x4):
        rng = np.random.default_rng(2)
        for _ in range(10):
            size = int(rng.integers(1, group.order))
            K = compact_set(group, [group.carrier[i] for i in rng.choice(group.order, size)])
            y = group.carrier[int(rng.integers(0, group.order))]
            assert measure(translate_set(y, K)) == measure(K)


def test_complement_examples():
    z4 = GroupModel.cyclic([4])
    assert complement(compact_set(z4, [0])).members == frozenset({1, 2, 3})
    assert complement(compact_set(z4, z4.carrier)).members == frozenset()
    assert complement(compact_set(z4, [])).members == frozenset(z4.carrier)


def test_measure_examples(z8, z4x4):
    assert measure(compact_set(z8, [7, 0, 1])) == 3.0
    assert measure(compact_set(z8, [])) == 0.0
    assert measure(compact_set(z4x4, z4x4.carrier)) == 16.0


def test_separation_examples(z8):
    assert separation_constant(full_point_set(z8), z8.ball(1)) == 3
    assert separation_constant(point_set(z8, [0]), z8.ball(1)) == 1
    assert separation_constant(point_set(z8, [0]), z8.ball(2)) == 1
    # exhaustive oracle over the 8 translates for the duplicated set {0, 0, 1}
    X = point_set(z8, [0, 0, 1])
    best = 0
    for x in z8.carrier:
        xU = {z8.compose(x, u) for u in z8.ball(1).members}
        best = max(best, sum(1 for p in X.points if p in xU))
    assert best == 3
    assert separation_constant(X, z8.ball(1)) == 3


def test_separation_definition_matches_indicator_sum():
    """sup_x card(X in xU) equals the sup norm of sum_j chi_{x_j U} for balls."""
    rng = np.random.default_rng(3)
    groups = [GroupModel.cyclic([12]), GroupModel.cyclic([4, 4])]
    for trial in range(50):
        group = groups[trial % 2]
        size = int(rng.integers(1, 2 * group.order))
        X = point_set(group, [group.carrier[i] for i in rng.integers(0, group.order, size)])
        U = group.ball(int(rng.integers(0, 3)))
        indicator_sum = np.zeros(group.order, dtype=int)
        for p in X.points:
            for u in U.members:
                indicator_sum[group.index(group.compose(p, u))] += 1
        assert separation_constant(X, U) == int(indicator_sum.max())


def test_separation_rejects_nonsymmetric(z8):
    lopsided = compact_set(z8, [0, 1])
    with pytest.raises(NonSymmetricNeighborhood):
        separation_constant(full_point_set(z8), lopsided)
    no_identity = compact_set(z8, [1, 7])
    with pytest.raises(NonSymmetricNeighborhood):
        separation_constant(full_point_set(z8), no_identity)


def test_box_group_boundary_policy():
    box = GroupModel.box([2])
    assert box.compose(-1, 1) == 0
    assert box.inverse(2) == -2
    with pytest.raises(OutOfCarrier):
        box.compose(2, 1)
    with pytest.raises(OutOfCarrier):
        product_set(compact_set(box, [1, 2]), compact_set(box, [1]))
    with pytest.raises(OutOfCarrier):
        translate_set(2, compact_set(box, [1]))
    assert box.ball(1).members == frozenset({-1, 0, 1})
    assert separation_constant(full_point_set(box), box.ball(1)) == 3


def test_canon_and_haar(z8, z4x4):
    assert z8.canon(11) == 3
    assert z4x4.canon((5, -1)) == (1, 3)
    assert z8.haar_weight(5) == 1.0
    assert all(w > 0 for w in z8.haar)


def test_diameter(z8, z4x4):
    assert z8.diameter == 4
    assert z4x4.diameter == 2
    assert GroupModel.box([3]).diameter == 3
