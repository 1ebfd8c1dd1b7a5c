import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from caacs import tour_cost
from caacs.io import (
    GeneratorSpec,
    GtspFormatError,
    generate_random,
    parse_gtsplib,
    parse_instance_name,
    read_gtsplib,
    serialize_gtsplib,
    write_gtsplib,
)

BURMA_OPT = [1, 2, 14, 3, 4, 5, 6, 12, 7, 13, 8, 11, 9, 10]


def test_geo_burma_known_optimum(fixtures):
    inst = read_gtsplib(fixtures / "14burma14.gtsp")
    assert (inst.n_nodes, inst.n_clusters) == (14, 14)
    assert tour_cost(inst, [v - 1 for v in BURMA_OPT]) == 3323
    assert inst.cost[0].tolist() == [0, 153, 510, 706, 966, 581, 455, 70, 160, 372, 157, 567, 342, 398]


def test_geo_clustered_sets_span_lines(fixtures):
    inst = read_gtsplib(fixtures / "3burma14.gtsp")
    assert inst.clusters == ((0, 1, 7, 8, 9, 10), (2, 3, 13), (4, 5, 6, 11, 12))
    assert inst.name == "3burma14" and inst.optimum is None


def test_euc_2d_rounding(fixtures):
    inst = read_gtsplib(fixtures / "3eucl6.gtsp")
    assert inst.cost[0, 1] == 1.0          # sqrt(2) -> 1
    assert inst.cost[0, 3] == 8.0          # sqrt(62.5) = 7.91 -> 8
    assert inst.cost[1, 5] == 6.0          # sqrt(32) = 5.66 -> 6
    assert inst.optimum == 15.0
    assert inst.clusters == ((0, 1), (2, 3), (4, 5))


def test_full_matrix_fields(fixtures):
    inst = read_gtsplib(fixtures / "2full4.gtsp")
    expected = np.array([[0, 3, 7, 2.5], [3, 0, 4, 6], [7, 4, 0, 1], [2.5, 6, 1, 0]])
    assert np.array_equal(inst.cost, expected)
    assert inst.cluster_of.tolist() == [0, 0, 1, 1]


def test_upper_row_fields(fixtures):
    inst = read_gtsplib(fixtures / "3upper5.gtsp")
    assert inst.name == "tri5"
    assert inst.cost[0].tolist() == [0, 1, 2, 3, 4]
    assert inst.cost[3, 4] == 10 and inst.cost[4, 3] == 10
    assert inst.cost[1, 2] == 5 and inst.cost[2, 4] == 9


@pytest.mark.parametrize("name, msg", [
    ("bad_twosets.gtsp", "multiple sets"),
    ("bad_orphan.gtsp", "not assigned"),
    ("bad_keyword.gtsp", "unknown keyword 'CAPACITY'"),
    ("bad_unterminated.gtsp", "not terminated"),
])
def test_malformed_files(fixtures, name, msg):
    with pytest.raises(GtspFormatError, match=msg):
        read_gtsplib(fixtures / name)


def _minimal(extra_header="", weights="1 2 3", sets="1 1 -1\n2 2 3 -1"):
    return (f"NAME : t\nDIMENSION : 3\n{extra_header}EDGE_WEIGHT_TYPE : EXPLICIT\n"
            f"EDGE_WEIGHT_FORMAT : UPPER_ROW\nEDGE_WEIGHT_SECTION\n{weights}\n"
            f"GTSP_SET_SECTION\n{sets}\nEOF\n")


@pytest.mark.parametrize("text, msg", [
    (_minimal(weights="1 2"), "UPPER_ROW needs 3"),
    (_minimal(extra_header="GTSP_SETS : 3\n"), "GTSP_SETS is 3"),
    (_minimal(sets="1 1 -1\n3 2 3 -1"), "set ids"),
    (_minimal(sets="1 1 -1\n2 2 3 7 -1"), "outside"),
    (_minimal(sets="1 1 1 -1\n2 2 3 -1"), "listed twice"),
    (_minimal(sets="1 1 -1\n1 2 3 -1"), "declared twice"),
    (_minimal(sets=""), "missing or empty"),
    ("NAME : t\nEDGE_WEIGHT_TYPE : EXPLICIT\n", "DIMENSION"),
    ("NAME : t\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : ATT\n", "EDGE_WEIGHT_TYPE"),
    ("NAME : t\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n", "NODE_COORD"),
])
def test_format_errors(text, msg):
    with pytest.raises(GtspFormatError, match=msg):
        parse_gtsplib(text)


def test_name_convention_cross_check():
    text = _minimal().replace("NAME : t", "NAME : 3abc3")
    with pytest.raises(GtspFormatError, match="implies"):
        parse_gtsplib(text)
    assert parse_gtsplib(text.replace("3abc3", "2abc3")).n_clusters == 2


def test_parse_instance_name():
    assert parse_instance_name("20kroA100") == (20, 100, "kroA")
    assert parse_instance_name("5ulysses22") == (5, 22, "ulysses")
    assert parse_instance_name("burma") is None


@pytest.mark.parametrize("name", ["3burma14.gtsp", "3eucl6.gtsp", "2full4.gtsp", "3upper5.gtsp"])
def test_round_trip_fixtures(fixtures, name):
    inst = read_gtsplib(fixtures / name)
    again = parse_gtsplib(serialize_gtsplib(inst))
    assert again == inst
    assert serialize_gtsplib(again) == serialize_gtsplib(inst)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.data())
def test_round_trip_generated(n, data):
    m = data.draw(st.integers(1, n))
    inst = generate_random(GeneratorSpec(n, m, seed=data.draw(st.integers(0, 2**32 - 1))))
    assert parse_gtsplib(serialize_gtsplib(inst)) == inst


def test_write_read_file(tmp_path):
    inst = generate_random(GeneratorSpec(12, 3, seed=1))
    write_gtsplib(inst, tmp_path / "x.gtsp")
    assert read_gtsplib(tmp_path / "x.gtsp") == inst
