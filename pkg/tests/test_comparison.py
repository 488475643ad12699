import numpy as np
import pytest

from framecert.comparison import (
    ComparisonScenario,
    HapPreconditionUnmet,
    NotPositive,
    cardinality_count,
    comparison_certificate,
    comparison_run,
    density_report,
    qpq_operator,
    trace_bounds_check,
)
from framecert.frames import FrameSystem, analyze_frame, coherent_frame, span_projector
from framecert.groups import GroupModel, compact_set, full_point_set, point_set
from framecert.representations import (
    GaborRep,
    TranslationRep,
    dirac_vector,
    periodized_gaussian,
)


def _scenario(given, reference, epsilon, k_radii=(0, 1, 2), l_radii=(0, 1, 2, 3, 4), **kw):
    group = given.rep.group
    return ComparisonScenario(
        given=given,
        given_analysis=analyze_frame(given),
        reference=reference,
        reference_analysis=analyze_frame(reference),
        epsilon=epsilon,
        U=group.ball(1),
        K_family=[group.ball(r) for r in k_radii],
        L_family=[group.ball(r) for r in l_radii],
        k_labels=list(k_radii),
        l_labels=list(l_radii),
        **kw,
    )


def test_trace_bounds_identity_onb():
    onb = np.eye(4, dtype=complex)
    check = trace_bounds_check(np.eye(4), onb, 1.0, 1.0)
    assert check.sum == pytest.approx(4.0)
    assert check.trace == pytest.approx(4.0)
    assert check.ok


def test_trace_bounds_projector_onb():
    P = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    check = trace_bounds_check(P, np.eye(4, dtype=complex), 1.0, 1.0)
    assert check.sum == pytest.approx(2.0) and check.trace == pytest.approx(2.0)


def test_trace_bounds_random_psd_against_duplicated_frame():
    rng = np.random.default_rng(21)
    W = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    T = W @ W.conj().T / 8.0
    vectors = np.column_stack([np.eye(8)[0]] + [np.eye(8)[i] for i in range(8)])
    evals = np.linalg.eigvalsh(vectors @ vectors.conj().T)
    check = trace_bounds_check(T, vectors, float(evals[0]), float(evals[-1]))
    assert check.ok
    assert check.sum / float(evals[-1]) < check.trace < check.sum / float(evals[0])


def test_trace_bounds_rejects_negative_operator():
    with pytest.raises(NotPositive):
        trace_bounds_check(np.diag([1.0, -0.5]), np.eye(2, dtype=complex), 1.0, 1.0)


def test_qpq_examples():
    identity4 = span_projector(np.eye(4, dtype=complex))
    T = qpq_operator(identity4, identity4)
    assert np.trace(T).real == pytest.approx(4.0)
    P = span_projector([np.eye(2, dtype=complex)[0]])
    Q_orth = span_projector([np.eye(2, dtype=complex)[1]])
    assert np.allclose(qpq_operator(P, Q_orth), 0)
    # hand-computed 2x2: Q onto (e1+e2)/sqrt2, P onto e1, trace QPQ = 1/2
    Q = span_projector([np.array([1.0, 1.0]) / np.sqrt(2)])
    T = qpq_operator(P, Q)
    assert np.trace(T).real == pytest.approx(0.5)
    assert np.allclose(T, 0.25 * np.ones((2, 2)))


def test_qpq_eigenvalues_and_rank():
    rng = np.random.default_rng(22)
    for _ in range(10):
        mp, mq = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        P = span_projector(rng.standard_normal((6, mp)) + 1j * rng.standard_normal((6, mp)))
        Q = span_projector(rng.standard_normal((6, mq)) + 1j * rng.standard_normal((6, mq)))
        T = qpq_operator(P, Q)
        evals = np.linalg.eigvalsh(T)
        assert evals[0] >= -1e-10 and evals[-1] <= 1 + 1e-10
        rank_T = int(np.sum(evals > 1e-10))
        assert rank_T <= min(P.rank, Q.rank)


def test_cardinality_examples():
    z8 = GroupModel.cyclic([8])
    assert cardinality_count(full_point_set(z8), z8.ball(1)) == 3
    assert cardinality_count(point_set(z8, [0, 0, 1]), compact_set(z8, [0])) == 2
    assert cardinality_count(full_point_set(z8), compact_set(z8, [])) == 0


def test_comparison_trivial_dirac_vs_dirac():
    rep = TranslationRep(8)
    group = rep.group
    onb = coherent_frame(rep, dirac_vector(8), full_point_set(group))
    scenario = _scenario(onb, onb, epsilon=0.5, k_radii=(1,), l_radii=(0, 1))
    assert scenario.hap_choice.chosen_l_label == 0
    certs = comparison_run(scenario)
    assert len(certs) == group.order
    for cert in certs:
        assert cert.card_x_in_ykl == cert.card_y_in_yk == 3
        assert cert.trace_T == pytest.approx(3.0)
        assert cert.rank_P == 3
        assert cert.lhs == pytest.approx(1.5)
        assert cert.ok


def test_comparison_gabor_vs_dirac_line():
    rep = GaborRep(8)
    group = rep.group
    given = coherent_frame(rep, periodized_gaussian(8), full_point_set(group))
    reference = coherent_frame(rep, dirac_vector(8), point_set(group, [(k, 0) for k in range(8)]))
    scenario = _scenario(given, reference, epsilon=0.5, k_radii=(0, 1), l_radii=(0, 1, 2, 3, 4))
    ref_analysis = scenario.reference_analysis
    assert ref_analysis.A == pytest.approx(1.0) and ref_analysis.B == pytest.approx(1.0)
    certs = comparison_run(scenario)
    assert all(c.ok for c in certs)
    # proof-step identity and the signed leftover term are reported per cell
    for cert in certs:
        assert cert.projected_sum_identity_error <= 1e-10
        assert cert.star_signed <= 1e-12  # nonpositive up to rounding
        assert abs(cert.star_signed) <= cert.star_bound + 1e-9


def test_comparison_randomized_windows_chain_holds():
    rng = np.random.default_rng(23)
    rep = GaborRep(4)
    group = rep.group
    for trial in range(5):
        window = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        given = coherent_frame(rep, window, full_point_set(group))
        reference = coherent_frame(
            rep, dirac_vector(4), point_set(group, [(k, 0) for k in range(4)])
        )
        scenario = _scenario(given, reference, epsilon=0.4, k_radii=(0, 1), l_radii=(0, 1, 2))
        for cert in comparison_run(scenario):
            assert cert.trace_T <= cert.rank_P + 1e-9
            assert cert.rank_P <= cert.card_x_in_ykl
            assert cert.ok


def test_comparison_hap_precondition_unmet():
    rep = GaborRep(8)
    group = rep.group
    given = coherent_frame(rep, periodized_gaussian(8), full_point_set(group))
    reference = coherent_frame(rep, dirac_vector(8), point_set(group, [(k, 0) for k in range(8)]))
    scenario = _scenario(given, reference, epsilon=0.01, l_radii=(0,))
    with pytest.raises(HapPreconditionUnmet):
        _ = scenario.hap_choice


def test_comparison_b_convention_alternative():
    rep = TranslationRep(8)
    onb = coherent_frame(rep, dirac_vector(8), full_point_set(rep.group))
    scenario = _scenario(onb, onb, epsilon=0.5, k_radii=(1,), l_radii=(0, 1),
                         b_convention="dual_of_given")
    cert = comparison_certificate(scenario, 0, rep.group.ball(1), k_label=1)
    assert cert.b_provenance == "upper bound of dual of E_g"
    assert cert.b_used == pytest.approx(1.0)
    assert cert.b_alternative == pytest.approx(1.0)
    reference_first = _scenario(onb, onb, epsilon=0.5, k_radii=(1,), l_radii=(0, 1))
    assert reference_first.b_provenance == "upper bound of reference frame"


def test_density_examples():
    z8 = GroupModel.cyclic([8])
    full = density_report(full_point_set(z8), [z8.ball(1), z8.ball(2)])
    assert all(row.ratio == pytest.approx(1.0) for row in full.rows)
    evens = density_report(point_set(z8, [0, 2, 4, 6]), [z8.ball(1)])
    assert sorted({round(row.ratio, 6) for row in evens.rows}) == [
        pytest.approx(1 / 3),
        pytest.approx(2 / 3),
    ]
    assert evens.summary[0].min_ratio == pytest.approx(1 / 3)
    assert evens.summary[0].max_ratio == pytest.approx(2 / 3)


def test_density_lattice_z16():
    group = GroupModel.cyclic([16, 16])
    lattice = point_set(
        group, [(2 * i, 2 * j) for i in range(8) for j in range(8)]
    )
    report = density_report(lattice, [group.ball(8)], y_sample=[(0, 0), (1, 1), (3, 7)])
    # ball(8) is the whole carrier: the ratio is exactly 1/(2*2)
    assert all(row.ratio == pytest.approx(0.25) for row in report.rows)


def test_density_boundary_rows_on_box():
    box = GroupModel.box([2])
    X = full_point_set(box)
    report = density_report(X, [box.ball(1)])
    assert any(row.boundary for row in report.rows)
    assert any(not row.boundary for row in report.rows)
    interior = [row.ratio for row in report.rows if not row.boundary]
    assert all(r == pytest.approx(1.0) for r in interior)
