import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import macrobell as mb
from macrobell.errors import (
    BadFamily,
    BadParams,
    NegativeEntry,
    NegativeWeight,
    RowNotNormalized,
    SignalingDetected,
    WeightsNotNormalized,
)

from _oracles import random_ns_box


def test_pr_box_rows():
    pr = mb.pr_box()
    for x, y in ((0, 0), (0, 1), (1, 0)):
        assert np.array_equal(pr.row(x, y), [0.5, 0.0, 0.0, 0.5])
    assert np.array_equal(pr.row(1, 1), [0.0, 0.5, 0.5, 0.0])


def test_pr_box_chsh_and_ns():
    assert mb.chsh(mb.pr_box()).canonical_value == 4.0
    assert mb.is_no_signaling(mb.pr_box().table).in_set


def test_pr_facet_variants_each_reach_four_on_their_facet():
    for k in range(8):
        rep = mb.chsh(mb.pr_box(k))
        assert rep.symmetrized_values[k] == pytest.approx(4.0, abs=1e-15)
        assert rep.max_violation == pytest.approx(4.0, abs=1e-15)


def test_deterministic_vertex_family1():
    box = mb.deterministic_vertex(1, 0)
    assert np.array_equal(box.table, np.tile([1.0, 0, 0, 0], (4, 1)))


def test_deterministic_vertex_family4_row11():
    # a = X xor 0 = 1, b = Y xor 0 xor 1 = 0 at (X, Y) = (1, 1)
    box = mb.deterministic_vertex(4, 0)
    assert np.array_equal(box.row(1, 1), [0.0, 0.0, 1.0, 0.0])


def test_all_eight_families_saturate_chsh_at_two():
    for family in (1, 2, 3, 4):
        for r in (0, 1):
            rep = mb.chsh(mb.deterministic_vertex(family, r))
            assert rep.canonical_value == pytest.approx(2.0, abs=1e-15)
            assert rep.symmetrized_values[0] == pytest.approx(2.0, abs=1e-15)


def test_bad_family_rejected():
    with pytest.raises(BadFamily):
        mb.deterministic_vertex(5, 0)
    with pytest.raises(BadFamily):
        mb.deterministic_vertex(1, 2)


def test_local_vertices_complete_and_distinct():
    vertices = mb.all_local_vertices()
    assert len(vertices) == 16
    tables = {tuple(v.table.flatten()) for v in vertices}
    assert len(tables) == 16
    for v in vertices:
        mb.make_box(v.table)  # validation passes
    # the eight canonical-family boxes appear among them
    for family in (1, 2, 3, 4):
        for r in (0, 1):
            d = mb.deterministic_vertex(family, r)
            assert any(v == d for v in vertices)
    # identifiers resolve to the same boxes in order
    for name, v in zip(mb.LOCAL_VERTEX_IDS, vertices):
        assert mb.vertex_by_id(name) == v


def test_make_box_rejects_negative_entry():
    t = mb.pr_box().table.copy()
    t[0, 0] = -0.1
    t[0, 3] = 0.6
    with pytest.raises(NegativeEntry):
        mb.make_box(t)


def test_make_box_rejects_unnormalized_row():
    t = mb.pr_box().table.copy()
    t[2, 0] = 0.7
    with pytest.raises(RowNotNormalized):
        mb.make_box(t)


def test_make_box_rejects_signaling():
    # P(a=0|X=0) differs across Y by 0.1, rows individually fine
    t = np.array(
        [
            [0.6, 0.0, 0.4, 0.0],
            [0.5, 0.0, 0.5, 0.0],
            [0.5, 0.0, 0.5, 0.0],
            [0.5, 0.0, 0.5, 0.0],
        ]
    )
    with pytest.raises(SignalingDetected):
        mb.make_box(t)


def test_make_box_tolerance_is_respected():
    t = mb.pr_box().table.copy()
    t[0, 0] += 2e-10
    mb.make_box(t)  # inside default tolerance
    with pytest.raises(RowNotNormalized):
        mb.make_box(t, tol=1e-12)


def test_box_equality_semantics():
    a = mb.pr_box()
    b = mb.make_box(mb.pr_box().table + 1e-13)
    c = mb.mix_boxes([(0.9, "PR"), (0.1, mb.uniform_box())])
    assert a == b
    assert a != c
    with pytest.raises(TypeError):
        hash(a)


def test_mix_identity():
    assert mb.mix_boxes([(1.0, "PR")]) == mb.pr_box()


def test_mix_average_of_deterministics():
    box = mb.mix_boxes([(0.5, "D1_0"), (0.5, "D1_1")])
    assert np.allclose(box.row(0, 0), [0.5, 0, 0, 0.5], atol=1e-15)


def test_mix_weight_errors():
    with pytest.raises(WeightsNotNormalized):
        mb.mix_boxes([(0.5, "PR"), (0.4, "D1_0")])
    with pytest.raises(NegativeWeight):
        mb.mix_boxes([(-0.2, "PR"), (1.2, "D1_0")])


def test_class_generator_chsh_values():
    assert mb.class_generator("I", [0.5]).predicted_chsh == pytest.approx(3.0)
    assert mb.chsh(mb.class_generator("I", [0.5]).box).canonical_value == pytest.approx(3.0)
    cb = mb.class_generator("V", [0.3, 0.175, 0.175, 0.175, 0.175])
    assert cb.predicted_chsh == pytest.approx(2.6)
    assert mb.chsh(cb.box).canonical_value == pytest.approx(2.6)


def test_class_generator_class_i_is_pr_plus_pure_vertex():
    # p PR + (1-p) D1_0 with p = 0.8 gives CHSH 3.6
    box = mb.class_generator("I", [0.8]).box
    assert mb.chsh(box).canonical_value == pytest.approx(3.6)
    explicit = mb.mix_boxes([(0.8, "PR"), (0.2, "D1_0")])
    assert np.max(np.abs(box.table - explicit.table)) <= 1e-15


def test_class_generator_strictness():
    with pytest.raises(BadParams):
        mb.class_generator("IV", [1.0, 0.0, 0.0])
    cb = mb.class_generator("IV", [1.0, 0.0, 0.0], strict=False)
    assert cb.box == mb.pr_box()


def test_class_generator_bad_inputs():
    with pytest.raises(BadParams):
        mb.class_generator("VI", [0.5])
    with pytest.raises(BadParams):
        mb.class_generator("III", [0.5, 0.5, 0.5])


def test_uniform_box_chsh_zero():
    rep = mb.chsh(mb.uniform_box())
    assert rep.canonical_value == 0.0
    assert rep.max_violation == 0.0
    assert rep.correlators == (0.0, 0.0, 0.0, 0.0)


def test_chsh_report_invariants_on_named_boxes():
    for box in [mb.pr_box(3), mb.uniform_box(), mb.class_generator("II", [0.4]).box]:
        rep = mb.chsh(box)
        assert 0.0 <= rep.canonical_value <= 4.0
        assert rep.max_violation == max(rep.symmetrized_values)
        assert all(0.0 <= a <= 1.0 for a in rep.a_coefficients)


@st.composite
def ns_boxes(draw):
    raw = draw(
        st.lists(st.integers(0, 1000), min_size=24, max_size=24).filter(
            lambda v: sum(v) > 0
        )
    )
    w = np.array(raw, dtype=float) / sum(raw)
    tables = [v.table for v in mb.all_local_vertices()] + [
        mb.pr_box(k).table for k in range(8)
    ]
    return mb.make_box(sum(wi * t for wi, t in zip(w, tables)))


@settings(max_examples=60, deadline=None)
@given(box=ns_boxes())
def test_chsh_invariants_hold_on_random_ns_boxes(box):
    rep = mb.chsh(box)  # internally checks the two evaluation routes
    assert 0.0 <= rep.canonical_value <= 4.0 + 1e-12
    assert rep.max_violation == max(rep.symmetrized_values)
    assert all(-1e-12 <= a <= 1.0 + 1e-12 for a in rep.a_coefficients)


@settings(max_examples=40, deadline=None)
@given(box1=ns_boxes(), box2=ns_boxes(), weight=st.floats(0.0, 1.0))
def test_correlators_are_linear_under_mixing(box1, box2, weight):
    mixed = mb.mix_boxes([(weight, box1), (1.0 - weight, box2)])
    expected = weight * box1.correlators() + (1.0 - weight) * box2.correlators()
    assert np.allclose(mixed.correlators(), expected, atol=1e-12)


def test_local_vertices_never_violate_and_pr_is_maximal():
    for v in mb.all_local_vertices():
        assert mb.chsh(v).max_violation <= 2.0 + 1e-12
    assert mb.chsh(mb.pr_box()).canonical_value == 4.0


def test_box_json_round_trip():
    box = random_ns_box(np.random.default_rng(3))
    again = mb.box_from_json(mb.box_to_json(box))
    assert np.max(np.abs(again.table - box.table)) == 0.0


def test_box_json_rejects_extra_keys():
    obj = mb.box_to_json(mb.pr_box())
    obj["note"] = "hello"
    with pytest.raises(BadParams):
        mb.box_from_json(obj)


def test_box_json_requires_p_key():
    with pytest.raises(BadParams):
        mb.box_from_json({})
