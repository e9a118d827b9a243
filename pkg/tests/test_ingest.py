import os

import pytest

from prowlnet.ingest import (
    PAPER_DATASETS,
    DatasetSpec,
    IngestError,
    count_duplicates,
    load,
    load_lines,
    parse_lines,
    read_config,
    write_edge_list,
)
from prowlnet.generators import GeneratorSpec, make_model


def test_two_line_stream():
    data = load_lines(["1 2 10", "2 3 20"], DatasetSpec("mem", initial_stamp=1))
    assert data.warmup.nodes == {1, 2}
    batches = data.stream.batches
    assert len(batches) == 1 and (batches[0][0].u, batches[0][0].v) == (2, 3)


def test_comments_weights_and_timestamps():
    lines = ["% header", "# more", "", "1 2 1 100", "2 3 1 100", "3 1 1 105"]
    parsed = parse_lines(lines)
    assert [(p.u, p.v, p.timestamp) for p in parsed] == [(1, 2, 100.0), (2, 3, 100.0), (3, 1, 105.0)]
    assert parsed[0].lineno == 4
    data = load_lines(lines, DatasetSpec("mem"))
    assert data.stats.distinct_stamps == 2 and data.stats.data_lines == 3


def test_self_loops_and_duplicates_counted():
    data = load_lines(["1 2", "2 2", "2 1", "2 3"], DatasetSpec("mem"))
    assert data.stats.self_loops == 1
    assert data.stats.duplicates == 1
    assert [len(b) for b in data.stream.batches] == [1, 0, 1, 1]


@pytest.mark.parametrize("bad", ["1", "a b", "1 2 x", "1 2 3 4 5"])
def test_malformed_line_reports_line_number(bad):
    with pytest.raises(IngestError, match="line 2"):
        parse_lines(["1 2", bad])


def test_initial_stamp_bounds():
    with pytest.raises(IngestError):
        load_lines(["1 2"], DatasetSpec("mem", initial_stamp=5))
    with pytest.raises(IngestError):
        load_lines(["% only comments"], DatasetSpec("mem"))


def test_stream_replays_and_resets():
    data = load_lines(["1 2", "2 3", "3 4"], DatasetSpec("mem"))
    first = [data.stream.next_events() for _ in range(4)]
    assert first[-1] is None
    again = data.stream.reset()
    assert again.next_events() == first[0]


def test_roundtrip_through_file(tmp_path):
    m = make_model(GeneratorSpec("BA", n=40, seed=1))
    events = m.warmup()
    path = tmp_path / "ba.txt"
    write_edge_list(events, path, header="BA test")
    data = load(DatasetSpec(str(path), initial_stamp=len(events) - 1))
    assert data.warmup.nodes == {x for e in events[:-1] for x in (e.u, e.v)}
    assert data.warmup.graph.n_edges == len(events) - 1


def test_config_section(tmp_path):
    assert DatasetSpec.from_config({"path": "x", "cadence": 13}).cadence == 13
    with pytest.raises(IngestError):
        DatasetSpec.from_config({"cadence": 1})
    with pytest.raises(IngestError):
        DatasetSpec.from_config({"path": "x", "speed": 1})
    cfg = tmp_path / "c.json"
    cfg.write_text('{"datasets": {"f": {"path": "x"}}}')
    assert read_config(cfg)["datasets"]["f"]["path"] == "x"


def test_count_duplicates_is_orientation_free():
    from prowlnet.graph import GraphEvent

    assert count_duplicates([GraphEvent(1, 2), GraphEvent(2, 1), GraphEvent(1, 2)]) == 2


@pytest.mark.parametrize("name", sorted(PAPER_DATASETS))
def test_published_warmup_sizes(name):
    """Only runs when PROWLNET_DATA points at a directory holding <name>.txt."""
    root = os.environ.get("PROWLNET_DATA")
    path = os.path.join(root, f"{name}.txt") if root else None
    if not path or not os.path.exists(path):
        pytest.skip(f"{name} dataset not available")
    meta = PAPER_DATASETS[name]
    data = load(DatasetSpec(path, initial_stamp=meta["initial_stamp"], cadence=meta["cadence"]))
    assert len(data.warmup.graph) == meta["warmup_nodes"]
    assert data.warmup.graph.n_edges == meta["warmup_edges"]
