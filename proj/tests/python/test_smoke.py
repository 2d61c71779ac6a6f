import json
import os
from pathlib import Path

import pytest

import lonas

DATA = Path(os.environ.get("LONAS_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_space_and_neighbourhood():
    cfg = lonas.SpaceConfig(3, 10)
    specs = lonas.enumerate_space(cfg)
    assert len(specs) == len(cfg) == 1110
    assert specs[0].encode() == "1" and specs[-1].encode() == "10-10-10"
    assert lonas.canonical_index(lonas.ArchSpec([1, 1]), cfg) == 10
    nb = {s.encode() for s in lonas.neighborhood(lonas.ArchSpec([4, 3]), cfg)}
    assert nb == {"3-3", "5-3", "4-2", "4-4", "4-4-3", "4-3-3", "4", "3"}
    assert lonas.adjacency_counts(cfg)["pairs"] == 5879
    assert lonas.ArchSpec.decode("4-3") == lonas.ArchSpec([4, 3])
    with pytest.raises(ValueError):
        lonas.ArchSpec.decode("4--3")
    with pytest.raises(ValueError):
        lonas.SpaceConfig(0, 3)


def test_r_squared():
    assert lonas.r_squared([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0
    assert lonas.r_squared([1.0, 2.0, 3.0], [2.0, 2.0, 2.0]) == 0.0
    with pytest.raises(ValueError):
        lonas.r_squared([2.0, 2.0], [1.0, 3.0])


def test_pipeline_on_bimodal(tmp_path):
    cfg = lonas.SpaceConfig(3, 10)
    table = lonas.FitnessTable.tabulate("synthetic:bimodal", cfg, threads=2)
    path = tmp_path / "fitness.csv"
    table.save(path)
    loaded = lonas.FitnessTable.load(path, cfg)
    assert loaded.values == table.values

    land = lonas.Landscape(loaded)
    optima, neutral = land.local_optima()
    assert neutral == 0
    assert sum(land.basins().values()) == 1110
    assert sorted(land.basins()) == sorted(optima)

    lon = lonas.build_lon(land, strength=2)
    mlon = lonas.derive_mlon(lon)
    metrics = lonas.compute_metrics(lon, mlon)
    assert metrics["node_count"] == len(optima)
    assert metrics["funnel_count"] == len(mlon.sinks)
    assert mlon.is_dag()
    assert metrics["global_optimum"] in mlon.sinks
    assert lonas.LonGraph.from_json(lon.to_json()).to_json() == lon.to_json()
    report = lonas.report_json(lon, mlon)
    assert lonas.validate_report_json(report) == []
    assert json.loads(report)["summary"]["LO"] == len(optima)


def test_ils_is_seeded():
    land = lonas.Landscape(lonas.FitnessTable.tabulate("synthetic:linear", lonas.SpaceConfig(3, 10)))
    traces, summary = lonas.run_ils(land, runs=20, seed=3)
    again, _ = lonas.run_ils(land, runs=20, seed=3, threads=2)
    assert traces == again
    assert summary["global_fraction"] == 1.0
    assert all(t["final_optimum"] == lonas.ArchSpec([10, 10, 10]) for t in traces)


def test_trainer_batch():
    result = lonas.evaluate_batch(
        lonas.ArchSpec([3]), DATA / "linear.csv", DATA / "linear.schema.json", batch_runs=3, seed=0
    )
    assert len(result["per_run_r2"]) == 3
    assert result["mean_r2"] > 0.99
