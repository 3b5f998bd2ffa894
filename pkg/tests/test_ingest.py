import numpy as np
import pytest

from gazekit.errors import (
    EmptyFile,
    InvertedWindow,
    MalformedJson,
    MalformedRow,
    NonMonotoneTime,
)
from gazekit.ingest import (
    IngestOptions,
    parse_aois_json,
    parse_gaze_tsv,
    parse_groups_json,
    parse_twi_tsv,
    safe_id,
    serialize_aois_json,
    serialize_gaze_tsv,
    serialize_groups_json,
    serialize_twi_tsv,
)
from gazekit.model import ALL_SAMPLES, Aoi, GroupTable, Polygon, Rect, Twi


def test_safe_id():
    assert safe_id("rec 1 (copy).tsv") == "rec_1__copy_.tsv"
    assert safe_id("ok_id-1.2") == "ok_id-1.2"
    assert safe_id("") == "_"
    assert safe_id("///") == "___"


# -- gaze tsv ----------------------------------------------------------------


def test_parse_gaze_basic():
    sample, twis = parse_gaze_tsv(b"0\t10\t20\n16\t11\t21\n33\t12\t22\n", "s1")
    assert sample.id == "s1" and sample.n_points == 3
    assert sample.t.tolist() == [0.0, 16.0, 33.0]
    assert sample.x.tolist() == [10.0, 11.0, 12.0]
    assert twis == []


def test_parse_gaze_header_modes():
    body = b"time\tx\ty\n0\t1\t2\n"
    s_auto, _ = parse_gaze_tsv(body, "s", IngestOptions(has_header="auto"))
    assert s_auto.n_points == 1
    s_yes, _ = parse_gaze_tsv(b"0\t1\t2\n5\t1\t2\n", "s", IngestOptions(has_header="yes"))
    assert s_yes.t.tolist() == [5.0]  # first data row consumed as header
    with pytest.raises(MalformedRow):
        parse_gaze_tsv(body, "s", IngestOptions(has_header="no"))


def test_parse_gaze_blank_lines_and_comments():
    sample, _ = parse_gaze_tsv(b"# captured at 60Hz\n\n0\t1\t2\n\n16\t1\t2\n", "s")
    assert sample.n_points == 2


def test_parse_gaze_errors_carry_line_numbers():
    with pytest.raises(MalformedRow) as e:
        parse_gaze_tsv(b"0\t1\t2\n16\t1\n", "s")
    assert e.value.line_no == 2 and "line 2:" in str(e.value)
    with pytest.raises(MalformedRow) as e:
        parse_gaze_tsv(b"# c\n0\t1\t2\n16\tbogus\t2\n", "s")
    assert e.value.line_no == 3  # physical line, comments included
    with pytest.raises(NonMonotoneTime) as e:
        parse_gaze_tsv(b"0\t1\t2\n0\t1\t2\n", "s")
    assert e.value.line_no == 2
    with pytest.raises(MalformedRow):
        parse_gaze_tsv(b"0\t1\tinf\n", "s")


def test_parse_gaze_empty_inputs():
    with pytest.raises(EmptyFile):
        parse_gaze_tsv(b"", "s")
    with pytest.raises(EmptyFile):
        parse_gaze_tsv(b"# only a comment\n\n", "s")
    with pytest.raises(EmptyFile):
        parse_gaze_tsv(b"time\tx\ty\n", "s", IngestOptions(has_header="yes"))


def test_parse_gaze_twi_column_runs():
    body = b"0\t1\t2\tintro\n10\t1\t2\tintro\n20\t1\t2\t\n30\t1\t2\ttask\n40\t1\t2\tintro\n"
    sample, twis = parse_gaze_tsv(body, "s1", IngestOptions(twi_column=True))
    assert sample.n_points == 5
    assert [(w.id, w.name, w.t_start, w.t_end, w.sample_id) for w in twis] == [
        ("s1.intro", "intro", 0.0, 10.0, "s1"),
        ("s1.task", "task", 30.0, 40.0, "s1"),
        ("s1.intro.2", "intro", 40.0, 50.0, "s1"),  # single row widened by median dt
    ]


def test_parse_gaze_twi_single_run_widened_by_median_interval():
    # Intervals 10,10,30,10 -> median 10; the lone label sits on the last row.
    body = b"0\t1\t2\t\n10\t1\t2\t\n20\t1\t2\t\n50\t1\t2\t\n60\t1\t2\tz\n"
    _, twis = parse_gaze_tsv(body, "s", IngestOptions(twi_column=True))
    assert len(twis) == 1
    assert (twis[0].t_start, twis[0].t_end) == (60.0, 70.0)


def test_parse_gaze_twi_column_tolerates_3_field_rows():
    body = b"0\t1\t2\n10\t1\t2\tlab\n"
    _, twis = parse_gaze_tsv(body, "s", IngestOptions(twi_column=True))
    assert len(twis) == 1 and twis[0].name == "lab"


def test_ingest_options_validation():
    with pytest.raises(ValueError):
        IngestOptions(has_header="maybe")
    with pytest.raises(ValueError):
        IngestOptions(decimal_separator=",")


def test_parse_gaze_non_utf8():
    with pytest.raises(MalformedRow):
        parse_gaze_tsv(b"\xff\xfe0\t1\t2\n", "s")


# -- twi tsv -----------------------------------------------------------------


def test_parse_twi_minimal_two_columns():
    twis = parse_twi_tsv(b"0\t100\n200\t300\n")
    assert [(w.id, w.name, w.sample_id, w.group_id) for w in twis] == [
        ("twi_1", "twi_1", ALL_SAMPLES, 0),
        ("twi_2", "twi_2", ALL_SAMPLES, 0),
    ]


def test_parse_twi_full_six_columns():
    twis = parse_twi_tsv(b"0\t100\tIntro\t2\ts1\tw9\n")
    w = twis[0]
    assert (w.id, w.name, w.group_id, w.sample_id) == ("w9", "Intro", 2, "s1")
    assert (w.t_start, w.t_end) == (0.0, 100.0)


def test_parse_twi_name_collision_gets_suffixed():
    twis = parse_twi_tsv(b"0\t1\tIntro\n2\t3\tIntro\n")
    assert [w.id for w in twis] == ["Intro", "Intro.2"]


def test_parse_twi_errors():
    with pytest.raises(InvertedWindow) as e:
        parse_twi_tsv(b"0\t100\n50\t50\n")
    assert e.value.line_no == 2
    with pytest.raises(MalformedRow):
        parse_twi_tsv(b"0\t1\tn\t1\ts\tid\textra\n")
    with pytest.raises(MalformedRow):
        parse_twi_tsv(b"0\t1\tn\t1.5\n")  # gid must be an integer
    with pytest.raises(MalformedRow):
        parse_twi_tsv(b"0\n")


def test_twi_tsv_round_trip():
    twis = [
        Twi("w1", "Intro", ALL_SAMPLES, 0, 100, group_id=1),
        Twi("w2", "Task A", "s1", 50.5, 99.25, group_id=0),
    ]
    again = parse_twi_tsv(serialize_twi_tsv(twis))
    assert again == twis
    assert parse_twi_tsv(serialize_twi_tsv([])) == []


# -- groups json -------------------------------------------------------------


def test_parse_groups_json():
    g = parse_groups_json(b'{"samples": {"s1": 1}, "aois": {"A": 2}}')
    assert g.samples == {"s1": 1} and g.aois == {"A": 2} and g.twis == {}


def test_parse_groups_json_errors():
    with pytest.raises(MalformedJson):
        parse_groups_json(b"[1, 2]")
    with pytest.raises(MalformedJson):
        parse_groups_json(b"{nope")
    with pytest.raises(MalformedJson):
        parse_groups_json(b'{"aois": {"A": true}}')  # bools are not gids
    with pytest.raises(MalformedJson):
        parse_groups_json(b'{"aois": {"A": "1"}}')
    with pytest.raises(MalformedJson):
        parse_groups_json(b'{"aois": [1]}')


def test_groups_json_round_trip():
    g = GroupTable(samples={"s2": 1, "s1": 2}, aois={"A": 1}, twis={})
    assert parse_groups_json(serialize_groups_json(g)) == g


# -- aois json ---------------------------------------------------------------


def test_parse_aois_json():
    body = b"""[
      {"id": "A", "name": "panel", "shape": {"type": "rect", "x": 0, "y": 0, "w": 10, "h": 10},
       "precedence": 1, "gid": 2},
      {"id": "B", "shape": {"type": "polygon", "vertices": [[0, 0], [5, 0], [0, 5]]}}
    ]"""
    aois = parse_aois_json(body)
    assert aois[0] == Aoi("A", "panel", Rect(0, 0, 10, 10), precedence=1, group_id=2)
    assert aois[1].name == "B" and isinstance(aois[1].shape, Polygon)


def test_parse_aois_json_errors():
    with pytest.raises(MalformedJson):
        parse_aois_json(b'{"id": "A"}')  # list required
    with pytest.raises(MalformedJson):
        parse_aois_json(b'[{"name": "x"}]')  # missing id/shape
    with pytest.raises(MalformedJson):
        parse_aois_json(b'[{"id": "A", "shape": {"type": "circle", "r": 3}}]')
    with pytest.raises(MalformedJson):
        parse_aois_json(b'[{"id": "A", "shape": {"type": "rect", "x": 0, "y": 0, "w": 1}}]')
    with pytest.raises(MalformedJson):
        parse_aois_json(b'[{"id": "A", "shape": {"type": "polygon", "vertices": 3}}]')


def test_aois_json_round_trip_sorted_by_id():
    aois = [
        Aoi("B", "B", Polygon(((0, 0), (4, 0), (4, 4), (0, 4))), precedence=2),
        Aoi("A", "first", Rect(1.5, 2, 3, 4), group_id=1),
    ]
    again = parse_aois_json(serialize_aois_json(aois))
    assert again == sorted(aois, key=lambda a: a.id)


# -- gaze serialization ------------------------------------------------------


def test_gaze_tsv_round_trip():
    rng = np.random.default_rng(3)
    t = np.cumsum(rng.uniform(1, 20, 100))
    x = rng.uniform(-100, 1000, 100)
    y = rng.uniform(-100, 1000, 100)
    from gazekit.model import GazeSample

    sample = GazeSample(id="s", label="s", t=t, x=x, y=y)
    again, _ = parse_gaze_tsv(serialize_gaze_tsv(sample), "s")
    assert np.array_equal(again.t, sample.t)
    assert np.array_equal(again.x, sample.x)
    assert np.array_equal(again.y, sample.y)
