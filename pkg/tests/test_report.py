"""CSV schemas and figure rendering."""

import csv
import io
import math

from umwbcast.graphs import InterferenceModel, build_conflict_graph
from umwbcast.report import (
    packets_csv_text,
    render_sweep_figure,
    render_trace_figure,
    saturation_csv_text,
    trace_csv_text,
    write_text,
)
from umwbcast.simulate import SaturationRow, SimConfig, simulate
from topo import star_graph


def small_trace():
    g = star_graph(3)
    cg = build_conflict_graph(g, InterferenceModel.none())
    return simulate(g, cg, SimConfig(lam=0.5, horizon=40, seed=3))


def test_trace_csv_schema():
    tr = small_trace()
    rows = list(csv.DictReader(io.StringIO(trace_csv_text(tr))))
    assert len(rows) == 40
    assert list(rows[0]) == ["slot", "sum_pq", "max_vq", "delivered", "arrivals"]
    for idx, row in enumerate(rows):
        assert int(row["slot"]) == idx + 1
        assert int(row["sum_pq"]) == tr.sum_pq[idx]
        assert float(row["max_vq"]) == tr.max_vq[idx]
        assert int(row["delivered"]) == tr.delivered[idx]
        assert int(row["arrivals"]) == tr.arrivals[idx]


def test_packets_csv_schema():
    tr = small_trace()
    rows = list(csv.DictReader(io.StringIO(packets_csv_text(tr))))
    assert list(rows[0]) == ["id", "arrival_slot", "delivered_slot", "delay"]
    assert len(rows) == len(tr.packets)
    for row, p in zip(rows, tr.packets):
        assert int(row["id"]) == p.id
        if p.delivered_slot is None:
            assert row["delivered_slot"] == "" and row["delay"] == ""
        else:
            assert int(row["delivered_slot"]) == p.delivered_slot
            assert int(row["delay"]) == p.delay


def test_saturation_csv_schema_and_comments():
    rows = [
        SaturationRow(lam=0.1, mean_delay=5.25, throughput=0.1, stable=True),
        SaturationRow(lam=0.2, mean_delay=math.nan, throughput=0.0, stable=False),
    ]
    text = saturation_csv_text(rows, comments=["seed policy: base 7"])
    assert text.startswith("# seed policy: base 7\n")
    data_lines = [l for l in text.splitlines() if not l.startswith("#")]
    parsed = list(csv.DictReader(io.StringIO("\n".join(data_lines))))
    assert [p["stable"] for p in parsed] == ["true", "false"]
    assert float(parsed[0]["mean_delay"]) == 5.25
    assert math.isnan(float(parsed[1]["mean_delay"]))


def test_figures_render_to_files(tmp_path):
    tr = small_trace()
    fig1 = render_trace_figure(tr, tmp_path / "trace.png")
    rows = [
        SaturationRow(lam=0.1, mean_delay=4.0, throughput=0.1, stable=True),
        SaturationRow(lam=0.3, mean_delay=90.0, throughput=0.28, stable=False),
    ]
    fig2 = render_sweep_figure(rows, tmp_path / "sweep.png", capacity=1 / 3)
    for path in (fig1, fig2):
        assert path.exists()
        assert path.stat().st_size > 1000


def test_write_text_creates_parents(tmp_path):
    target = tmp_path / "deep" / "nested" / "out.csv"
    write_text(target, "a,b\n1,2\n")
    assert target.read_text() == "a,b\n1,2\n"
