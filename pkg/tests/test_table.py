import pytest

from kgforage import errors, table
from kgforage.plans import Hop, JoinPlan

PLAN = JoinPlan(source_column="Country", hops=[Hop("P1", "mean")], output_name="mean population")


def test_import_single_string_column():
    d = table.import_csv(b"Country\nIraq\nIran\n")
    assert d.row_count == 2
    assert d.columns[0].ctype == "string"


def test_number_inference_with_null():
    d = table.import_csv(b'n\n1\n2\n""\n')
    col = d.columns[0]
    assert col.ctype == "number"
    assert col.cells == ("1", "2", None)


def test_datetime_inference():
    d = table.import_csv(b"t\n2020-01-01T00:00:00Z\n2021-06-01T12:00:00Z\n")
    assert d.columns[0].ctype == "datetime"


def test_mixed_column_stays_string():
    d = table.import_csv(b"x\n1\nabc\n")
    assert d.columns[0].ctype == "string"


def test_ragged_rows_rejected():
    with pytest.raises(errors.RaggedRows) as exc:
        table.import_csv(b"a,b\n1,2\n3,4,5\n")
    assert exc.value.row == 3


def test_no_header_names():
    d = table.import_csv(b"x,y\n1,2\n", has_header=False)
    assert d.column_names() == ["col_0", "col_1"]


def test_export_empty_dataset():
    d = table.import_csv(b"A\n")
    assert table.export_csv(d) == b"A\n"


def test_export_quotes_commas():
    d = table.import_csv(b'x\n"a,b"\n')
    assert table.export_csv(d) == b'x\n"a,b"\n'


def test_export_import_export_fixpoint():
    raw = b'x,y\n"a,b",2\n,\n'
    once = table.export_csv(table.import_csv(raw))
    twice = table.export_csv(table.import_csv(once))
    assert once == twice


def test_add_augmented_column():
    d = table.import_csv(b"Country\nA\nB\nC\n")
    d2 = table.add_augmented_column(d, "m", ["1", "2", None], "number", PLAN)
    assert d2.column("m").provenance is PLAN
    assert d2.column("m").enabled
    assert d.column_names() == ["Country"]  # original snapshot untouched


def test_duplicate_name_gets_suffix():
    d = table.import_csv(b"population\n1\n")
    d2 = table.add_augmented_column(d, "population", ["2"], "number", PLAN)
    assert "population (2)" in d2.column_names()


def test_length_mismatch():
    d = table.import_csv(b"Country\nA\nB\nC\n")
    with pytest.raises(errors.LengthMismatch):
        table.add_augmented_column(d, "m", ["1", "2"], "number", PLAN)


def test_disable_excludes_from_export():
    d = table.import_csv(b"a,b\n1,2\n")
    d2 = table.set_enabled(d, "b", False)
    assert table.export_csv(d2) == b"a\n1\n"
    d3 = table.set_enabled(d2, "b", True)
    assert d3.column("b").cells == d.column("b").cells


def test_set_enabled_unknown_column():
    d = table.import_csv(b"a\n1\n")
    with pytest.raises(errors.UnknownColumn):
        table.set_enabled(d, "nope", False)


@pytest.mark.parametrize("rows,expected", [(1200, 10), (3, 3), (0, 0)])
def test_head(rows, expected):
    body = "\n".join(str(i) for i in range(rows))
    d = table.import_csv(("n\n" + body + ("\n" if body else "")).encode())
    assert table.head(d, 10).row_count == expected


def test_rectangular_after_operations():
    d = table.import_csv(b"a,b\n1,2\n3,4\n")
    d = table.add_augmented_column(d, "c", ["x", None], "string", PLAN)
    d = table.set_enabled(d, "b", False)
    for col in d.columns:
        assert len(col.cells) == d.row_count


def test_plan_sidecar_lists_augmented_columns():
    import json

    d = table.import_csv(b"Country\nA\n")
    d = table.add_augmented_column(d, "m", ["1"], "number", PLAN)
    sidecar = json.loads(table.plan_sidecar(d))
    assert sidecar["augmented_columns"][0]["column"] == "m"
    assert sidecar["augmented_columns"][0]["plan"]["hops"][0]["property"] == "P1"
