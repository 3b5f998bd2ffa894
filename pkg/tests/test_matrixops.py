"""Relationship matrices and display reordering.

Cell values are cross-checked against direct calls to the lower-level
building blocks (labeling, stats, transitions, similarity), which have their
own first-principles oracles; these tests pin the wiring: axis enumeration,
group pooling, scope application, and the unsupported-combination fence.
"""

import numpy as np
import pytest

from gazekit.aoi import TransitionKind, aoi_sequence, transition_counts
from gazekit.errors import GazekitError, UnknownFocusAoi, UnsupportedCombination
from gazekit.matrixops import (
    AOI_TRANSITION_METRICS,
    SAMPLE_AOI_METRICS,
    SAMPLE_TWI_METRICS,
    SIMILARITY_METRICS,
    build_matrix,
    relationship_matrix,
    reorder_global,
    sort_local,
)
from gazekit.metrics import aggregate_group, fixation_aoi_stats
from gazekit.model import ALL_SAMPLES, Aoi, Dim, GazeSample, MetricMatrix, Rect, Scope, Twi
from gazekit.session import MatrixSpec, Session, labels_for, resolve_scope
from gazekit.similarity import nw_score


def clustered_sample(sid, centers, gid=0):
    """One tight 5-point cluster per center: a fixation at exactly (cx, cy)
    with t_start = 200*k and duration 120."""
    t, x, y = [], [], []
    for k, (cx, cy) in enumerate(centers):
        for p in range(5):
            t.append(200.0 * k + 30.0 * p)
            x.append(float(cx))
            y.append(float(cy))
    return GazeSample(id=sid, label=sid, t=t, x=x, y=y, group_id=gid)


A = (50, 50)
A2 = (80, 50)  # still inside A, > dispersion threshold from A
B = (250, 50)
B2 = (280, 50)
C = (450, 50)
OUT = (650, 50)

AOIS = (
    Aoi("A", "A", Rect(0, 0, 100, 100), group_id=1),
    Aoi("B", "B", Rect(200, 0, 100, 100), group_id=1),
    Aoi("C", "C", Rect(400, 0, 100, 100), group_id=2),
)


def make_session():
    samples = (
        clustered_sample("s1", [A, B, A, C], gid=1),  # labels A,B,A,C
        clustered_sample("s2", [B, C, OUT, C], gid=1),  # labels B,C,None,C
        clustered_sample("s3", [A, A2, B, B2], gid=2),  # labels A,A,B,B
    )
    twis = (
        Twi("w1", "w1", ALL_SAMPLES, 0, 400, group_id=1),
        Twi("w2", "w2", ALL_SAMPLES, 400, 800, group_id=1),
        Twi("w3", "w3", "s1", 0, 800, group_id=2),
    )
    return Session(samples=samples, aois=AOIS, twis=twis)


# -- reordering --------------------------------------------------------------


def block_matrix(rng, n_a, n_b, cols=6, gap=(0.8, 0.2), noise=0.02):
    rows = []
    for _ in range(n_a):
        rows.append(np.full(cols, gap[0]) + rng.normal(0, noise, cols))
    for _ in range(n_b):
        rows.append(np.full(cols, gap[1]) + rng.normal(0, noise, cols))
    labels = ["a"] * n_a + ["b"] * n_b
    return np.array(rows), labels


def test_seriation_recovers_planted_blocks():
    rng = np.random.default_rng(71)
    for _ in range(25):
        n_a = int(rng.integers(2, 8))
        n_b = int(rng.integers(2, 8))
        values, labels = block_matrix(rng, n_a, n_b)
        perm = rng.permutation(n_a + n_b)
        shuffled = values[perm]
        ids = tuple(f"r{i}" for i in range(n_a + n_b))
        m = MetricMatrix(Dim.SAMPLE, Dim.AOI, "m", ids, tuple(f"c{j}" for j in range(6)), shuffled)
        row_perm, _col = reorder_global(m)
        recovered = [labels[perm[i]] for i in row_perm]
        # Each block must come out contiguous (either block may lead).
        flips = sum(1 for u, v in zip(recovered, recovered[1:]) if u != v)
        assert flips == 1, recovered


def test_reorder_deterministic_and_symmetric_shares_perm():
    rng = np.random.default_rng(72)
    base = rng.uniform(0, 1, (5, 5))
    sym = (base + base.T) / 2
    m = MetricMatrix(Dim.SAMPLE, Dim.SAMPLE, "nw", tuple("abcde"), tuple("abcde"), sym, symmetric=True)
    rp1, cp1 = reorder_global(m)
    rp2, cp2 = reorder_global(m)
    assert rp1 == rp2 and cp1 == cp2
    assert rp1 == cp1  # diagonal stays on the diagonal


def test_reorder_duplicate_rows_stay_adjacent_deterministically():
    vals = np.array([[1.0, 2.0], [5.0, 6.0], [1.0, 2.0], [1.0, 2.0]])
    m = MetricMatrix(Dim.SAMPLE, Dim.AOI, "m", ("r0", "r1", "r2", "r3"), ("c0", "c1"), vals)
    row_perm, _ = reorder_global(m)
    dupe_positions = [row_perm.index(i) for i in (0, 2, 3)]
    assert max(dupe_positions) - min(dupe_positions) == 2  # contiguous block
    assert reorder_global(m)[0] == row_perm


def test_reorder_small_and_empty():
    one = MetricMatrix(Dim.SAMPLE, Dim.AOI, "m", ("r",), ("c", "d"), np.array([[1.0, 2.0]]))
    assert reorder_global(one) == ([0], [0, 1])
    empty = MetricMatrix(Dim.SAMPLE, Dim.AOI, "m", (), (), np.zeros((0, 0)))
    with pytest.raises(GazekitError):
        reorder_global(empty)


def test_sort_local():
    vals = np.array([[3.0, 1.0, 2.0], [9.0, 9.0, 9.0]])
    m = MetricMatrix(Dim.SAMPLE, Dim.AOI, "m", ("r0", "r1"), ("c0", "c1", "c2"), vals)
    assert sort_local(m, "row", 0) == [1, 2, 0]
    assert sort_local(m, "row", 0, "desc") == [0, 2, 1]
    assert sort_local(m, "row", 1) == [0, 1, 2]  # ties keep original order
    assert sort_local(m, "row", 1, "desc") == [0, 1, 2]  # stable mirror, not reversal
    assert sort_local(m, "col", 0) == [0, 1]
    assert sort_local(m, "col", 0, "desc") == [1, 0]
    with pytest.raises(IndexError):
        sort_local(m, "row", 2)
    with pytest.raises(ValueError):
        sort_local(m, "diag", 0)
    with pytest.raises(ValueError):
        sort_local(m, "row", 0, "up")


# -- sample x aoi ------------------------------------------------------------


def test_sample_aoi_counts():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE, Dim.AOI, "fixation_count")
    assert m.row_ids == ("s1", "s2", "s3") and m.col_ids == ("A", "B", "C")
    assert m.values.tolist() == [[2, 1, 1], [0, 1, 2], [2, 2, 0]]


def test_sample_aoi_cells_match_direct_stats():
    session = make_session()
    view = resolve_scope(session)
    for metric in SAMPLE_AOI_METRICS:
        m = relationship_matrix(session, Dim.SAMPLE, Dim.AOI, metric)
        for e in view.entries:
            for aoi in session.aois:
                if metric == "haar":
                    hits = sum(1 for lf in e.labels if lf.aoi_id is not None)
                    want = hits / len(e.labels)
                else:
                    want = fixation_aoi_stats(e.labels, aoi.id, e.scoped_duration)[metric].value
                assert m.value_at(e.sample_id, aoi.id) == pytest.approx(want)


def test_sample_group_rows_pool_members():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE_GROUP, Dim.AOI, "fixation_count")
    assert m.row_ids == ("1", "2")
    plain = relationship_matrix(session, Dim.SAMPLE, Dim.AOI, "fixation_count")
    for j, aoi in enumerate(("A", "B", "C")):
        assert m.values[0, j] == plain.value_at("s1", aoi) + plain.value_at("s2", aoi)
        assert m.values[1, j] == plain.value_at("s3", aoi)


def test_aoi_group_columns_merge_visits():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE, Dim.AOI_GROUP, "visit_count")
    assert m.col_ids == ("1", "2")
    view = resolve_scope(session)
    for e in view.entries:
        want = fixation_aoi_stats(e.labels, {"A", "B"}, e.scoped_duration)["visit_count"].value
        assert m.value_at(e.sample_id, "1") == want
    # s3 alternates A,A,B,B inside group 1: one merged visit, not two.
    assert m.value_at("s3", "1") == 1.0


def test_sample_aoi_unsupported_metric():
    session = make_session()
    with pytest.raises(UnsupportedCombination) as e:
        relationship_matrix(session, Dim.SAMPLE, Dim.AOI, "direct")
    assert (e.value.row_dim, e.value.col_dim, e.value.metric_id) == ("sample", "aoi", "direct")


# -- aoi x aoi ---------------------------------------------------------------


def test_aoi_transitions_sum_over_scoped_samples():
    session = make_session()
    for metric, kind in [("direct", TransitionKind.DIRECT), ("indirect", TransitionKind.INDIRECT),
                         ("glance", TransitionKind.GLANCE)]:
        m = relationship_matrix(session, Dim.AOI, Dim.AOI, metric)
        assert m.row_ids == ("A", "B", "C")
        want = np.zeros((3, 3))
        for sid in ("s1", "s2", "s3"):
            tc = transition_counts(labels_for(session, sid), kind, session.aois)
            want += tc.counts
        assert np.array_equal(m.values, want)


def test_aoi_through_focus():
    session = make_session()
    m = relationship_matrix(session, Dim.AOI, Dim.AOI, "through:B")
    # s1: A,B,A gives (A -> A through B); s3: A,A,B,B has no through triple.
    assert m.value_at("A", "A") == 1.0
    assert m.values.sum() == 1.0
    with pytest.raises(UnknownFocusAoi):
        relationship_matrix(session, Dim.AOI, Dim.AOI, "through:nope")
    with pytest.raises(UnsupportedCombination):
        relationship_matrix(session, Dim.AOI, Dim.AOI, "through:")


def test_aoi_group_transitions():
    session = make_session()
    m = relationship_matrix(session, Dim.AOI_GROUP, Dim.AOI_GROUP, "direct")
    assert m.row_ids == ("1", "2")
    # s1: 1,1,1,2 -> one 1->2 crossing; s2: 1,2,2 -> one; s3: all within 1.
    assert m.value_at("1", "2") == 2.0
    assert m.value_at("2", "1") == 0.0
    with pytest.raises(UnsupportedCombination):
        relationship_matrix(session, Dim.AOI, Dim.AOI_GROUP, "direct")
    with pytest.raises(UnsupportedCombination):
        relationship_matrix(session, Dim.AOI, Dim.AOI, "fixation_count")


# -- similarity dims ---------------------------------------------------------


def test_sample_sample_nw_matches_sequences():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE, Dim.SAMPLE, "nw")
    assert m.symmetric and np.allclose(np.diag(m.values), 1.0)
    seqs = {
        sid: aoi_sequence(labels_for(session, sid), aois=session.aois)
        for sid in ("s1", "s2", "s3")
    }
    assert seqs["s1"] == ["A", "B", "A", "C"]
    assert seqs["s2"] == ["B", "C", "C"]  # None breaks the C run
    want = nw_score(seqs["s1"], seqs["s2"]).normalized
    assert m.value_at("s1", "s2") == pytest.approx(want)
    raw = relationship_matrix(session, Dim.SAMPLE, Dim.SAMPLE, "nw_raw")
    assert raw.value_at("s1", "s2") == pytest.approx(nw_score(seqs["s1"], seqs["s2"]).raw)


def test_sample_group_similarity_pools_sequences():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE_GROUP, Dim.SAMPLE_GROUP, "nw")
    assert m.row_ids == ("1", "2")
    # Group 1 pools s1 then s2 in ascending id order.
    seq_g1 = ["A", "B", "A", "C"] + ["B", "C", "C"]
    seq_g2 = ["A", "B"]
    assert m.value_at("1", "2") == pytest.approx(nw_score(seq_g1, seq_g2).normalized)


def test_sample_sample_cosine_and_density_bounds():
    session = make_session()
    for metric in ("cosine", "density"):
        m = relationship_matrix(session, Dim.SAMPLE, Dim.SAMPLE, metric)
        assert m.symmetric
        assert np.allclose(np.diag(m.values), 1.0)
        assert (m.values >= 0).all() and (m.values <= 1 + 1e-9).all()


def test_twi_twi_similarity():
    session = make_session()
    m = relationship_matrix(session, Dim.TWI, Dim.TWI, "nw")
    assert m.row_ids == ("w1", "w2", "w3")
    assert m.symmetric
    # w3 covers s1's full span; w1+w2 windows tile it, so all diagonals are 1.
    assert np.allclose(np.diag(m.values), 1.0)
    g = relationship_matrix(session, Dim.TWI_GROUP, Dim.TWI_GROUP, "cosine")
    assert g.row_ids == ("1", "2")
    with pytest.raises(UnsupportedCombination):
        relationship_matrix(session, Dim.TWI, Dim.TWI, "fixation_count")
    with pytest.raises(UnsupportedCombination):
        relationship_matrix(session, Dim.SAMPLE, Dim.SAMPLE, "haar")


# -- sample x twi ------------------------------------------------------------


def test_sample_twi_counts_and_durations():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE, Dim.TWI, "fixation_count")
    assert m.row_ids == ("s1", "s2", "s3") and m.col_ids == ("w1", "w2", "w3")
    # Clusters start at t = 0, 200, 400, 600; w1 = [0, 400) keeps two.
    assert m.value_at("s1", "w1") == 2.0
    assert m.value_at("s1", "w2") == 2.0
    assert m.value_at("s1", "w3") == 4.0
    assert m.value_at("s2", "w3") == 0.0  # w3 is s1-only
    dur = relationship_matrix(session, Dim.SAMPLE, Dim.TWI, "total_duration")
    assert dur.value_at("s2", "w1") == 240.0
    pct = relationship_matrix(session, Dim.SAMPLE, Dim.TWI, "pct_time")
    assert pct.value_at("s1", "w1") == pytest.approx(240.0 / 400.0)


def test_sample_twi_saccades_need_both_endpoints():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE, Dim.TWI, "saccade_count")
    # w1 keeps fixations 0,1 -> one saccade; full-span w3 keeps all three.
    assert m.value_at("s1", "w1") == 1.0
    assert m.value_at("s1", "w3") == 3.0
    with pytest.raises(UnsupportedCombination):
        relationship_matrix(session, Dim.SAMPLE, Dim.TWI, "visit_count")


def test_sample_group_twi_group():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE_GROUP, Dim.TWI_GROUP, "fixation_count")
    assert m.row_ids == ("1", "2") and m.col_ids == ("1", "2")
    # Group 1 windows tile [0, 800): every cluster of s1 and s2 counts once.
    assert m.value_at("1", "1") == 8.0


def test_twi_sample_is_unsupported():
    session = make_session()
    with pytest.raises(UnsupportedCombination):
        relationship_matrix(session, Dim.TWI, Dim.SAMPLE, "fixation_count")
    with pytest.raises(UnsupportedCombination):
        relationship_matrix(session, Dim.AOI, Dim.SAMPLE, "fixation_count")


# -- scope and build_matrix --------------------------------------------------


def test_scope_restricts_rows_and_counts():
    session = make_session()
    m = relationship_matrix(session, Dim.SAMPLE, Dim.AOI, "fixation_count", scope=Scope.parse("one:s1/all"))
    assert m.row_ids == ("s1",)
    windowed = relationship_matrix(
        session, Dim.AOI, Dim.AOI, "direct", scope=Scope.parse("one:s1/one:w1")
    )
    # Only clusters 0,1 (A,B) are in w1: a single A->B transition remains.
    assert windowed.value_at("A", "B") == 1.0 and windowed.values.sum() == 1.0


def test_session_scope_is_default():
    session = make_session().with_scope(Scope.parse("one:s3/all"))
    m = relationship_matrix(session, Dim.SAMPLE, Dim.AOI, "fixation_count")
    assert m.row_ids == ("s3",)


def test_build_matrix_applies_reorder():
    session = make_session()
    spec = MatrixSpec(id="m1", rows=Dim.SAMPLE, cols=Dim.SAMPLE, metric="nw", reorder="global")
    m = build_matrix(session, spec)
    assert m.row_order is not None and sorted(m.row_order) == [0, 1, 2]
    assert m.row_order == m.col_order
    plain = build_matrix(session, MatrixSpec(id="m2", rows=Dim.SAMPLE, cols=Dim.SAMPLE, metric="nw"))
    assert plain.row_order is None


def test_metric_catalogues_are_disjoint_where_it_matters():
    assert "haar" in SAMPLE_AOI_METRICS and "haar" in SAMPLE_TWI_METRICS
    assert set(AOI_TRANSITION_METRICS) == {"direct", "indirect", "glance"}
    assert set(SIMILARITY_METRICS) == {"nw", "nw_raw", "cosine", "density"}
    assert "visit_count" not in SAMPLE_TWI_METRICS
