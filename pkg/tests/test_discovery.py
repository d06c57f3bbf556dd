import pytest

from kgforage.discovery import (
    DiscoveryConfig,
    attribute_histogram,
    discover_related,
    estimate_coverage,
    histogram_of,
)
from kgforage.errors import AllCellsUnresolved, BadCounts, EmptySample, NotAStringColumn
from kgforage.table import import_csv
from kgforage.values import Value

from oracle import oracle_coverage


def by_pid(descriptors):
    return {d.property: d for d in descriptors}


def test_discover_mini_coverages(mini_client, mini_dataset):
    found = by_pid(discover_related(mini_client, mini_dataset, "Country", DiscoveryConfig(rng_seed=0)))
    # [DERIVED] from fixture: P1 on Q1/Q2 only, P2 and P3 on all three.
    assert found["P1"].coverage == pytest.approx(2 / 3)
    assert found["P2"].coverage == 1.0
    assert found["P3"].coverage == 1.0
    assert set(found) == {"P1", "P2", "P3"}  # P4/P5 carry no statements


def test_descriptor_metadata(mini_client, mini_dataset):
    found = by_pid(discover_related(mini_client, mini_dataset, "Country", DiscoveryConfig(rng_seed=0)))
    assert found["P1"].label == "population"
    assert found["P1"].datatype == "number"
    assert found["P1"].cardinality == "many"  # Q1 holds three population values
    assert found["P3"].unit == "year"
    assert found["P3"].cardinality == "many"  # Q2 holds two values
    assert found["P2"].datatype == "entity"
    assert len(found["P1"].examples) <= 3


def test_ranking_order(mini_client, mini_dataset):
    descriptors = discover_related(mini_client, mini_dataset, "Country", DiscoveryConfig(rng_seed=0))
    pids = [d.property for d in descriptors]
    # P2/P3 possess 3 rows each, tie broken by id; P1 possesses 2.
    assert pids == ["P2", "P3", "P1"]


def test_determinism(mini_client, mini_dataset):
    cfg = DiscoveryConfig(sample_size=2, rng_seed=7)
    a = discover_related(mini_client, mini_dataset, "Country", cfg)
    b = discover_related(mini_client, mini_dataset, "Country", cfg)
    assert a == b


def test_top_k_truncation(mini_client, mini_dataset):
    found = discover_related(mini_client, mini_dataset, "Country", DiscoveryConfig(top_k=1, rng_seed=0))
    assert [d.property for d in found] == ["P2"]


def test_unresolved_cells_count_as_misses(mini_client):
    csv = b"Country\nAtlantis\nNowhereland\nBorduria\nCascadia\n"
    d = import_csv(csv)
    found = by_pid(discover_related(mini_client, d, "Country", DiscoveryConfig(rng_seed=0)))
    assert found["P2"].coverage == pytest.approx(3 / 4)
    assert found["P1"].coverage == pytest.approx(2 / 4)


def test_all_cells_unresolved(mini_client):
    d = import_csv(b"Country\nXanadu\nErewhon\n")
    with pytest.raises(AllCellsUnresolved):
        discover_related(mini_client, d, "Country", DiscoveryConfig(rng_seed=0))


def test_not_a_string_column(mini_client):
    d = import_csv(b"n\n1\n2\n")
    with pytest.raises(NotAStringColumn):
        discover_related(mini_client, d, "n")


def test_matches_oracle_coverage(mini_client, mini_dataset, mini_graph):
    found = by_pid(discover_related(mini_client, mini_dataset, "Country", DiscoveryConfig(rng_seed=3)))
    cells = [c for c in mini_dataset.column("Country").cells]
    for pid in ("P1", "P2", "P3"):
        assert found[pid].coverage == pytest.approx(oracle_coverage(mini_graph, cells, pid))


def test_estimate_coverage_bounds():
    assert estimate_coverage(0, 5) == 0.0
    assert estimate_coverage(5, 5) == 1.0
    with pytest.raises(BadCounts):
        estimate_coverage(6, 5)
    with pytest.raises(BadCounts):
        estimate_coverage(-1, 5)
    with pytest.raises(BadCounts):
        estimate_coverage(0, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        DiscoveryConfig(sample_size=0)
    with pytest.raises(ValueError):
        DiscoveryConfig(top_k=0)


# ----------------------------------------------------------------- histograms

def test_numeric_histogram_ten_bins():
    h = histogram_of([Value.number(x) for x in (100, 200, 300)], "number")
    assert h.kind == "binned"
    assert len(h.counts) == 10
    assert len(h.edges) == 11
    assert sum(h.counts) == 3
    assert h.edges[0] == 100 and h.edges[-1] == 300
    assert h.counts[0] == 1 and h.counts[9] == 1  # min in first bin, max folded into last


def test_degenerate_numeric_histogram():
    h = histogram_of([Value.number(5), Value.number(5)], "number")
    assert h.counts == (2,)
    assert h.edges == (5.0, 5.0)


def test_categorical_histogram():
    values = [Value.entity("Q1")] * 3 + [Value.entity("Q2")]
    h = histogram_of(values, "entity")
    assert h.kind == "categorical"
    assert h.categories == (("Q1", 3), ("Q2", 1))


def test_categorical_other_bucket():
    values = [Value.string(f"s{i}") for i in range(12)]
    h = histogram_of(values, "string")
    assert h.categories[-1][0] == "(other)"
    assert sum(n for _, n in h.categories) == 12
    assert len(h.categories) == 11


def test_datetime_histogram_edges_are_iso():
    values = [
        Value.datetime_("2000-01-01T00:00:00Z"),
        Value.datetime_("2010-01-01T00:00:00Z"),
    ]
    h = histogram_of(values, "datetime")
    assert h.edges[0].startswith("2000-01-01")
    assert h.edges[-1].startswith("2010-01-01")
    assert sum(h.counts) == 2


def test_empty_sample():
    with pytest.raises(EmptySample):
        histogram_of([], "number")


def test_attribute_histogram_roundtrip(mini_client, mini_dataset):
    found = by_pid(discover_related(mini_client, mini_dataset, "Country", DiscoveryConfig(rng_seed=0)))
    h = attribute_histogram(found["P1"])
    assert h.kind == "binned"
    assert sum(h.counts) == len(found["P1"].distribution_sample)
