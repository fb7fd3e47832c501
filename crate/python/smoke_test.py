"""Smoke test for the roadtwin_py extension.

Build first with `cargo build -p roadtwin-py --release` (or without
--release), then run `python3 python/smoke_test.py`. The script copies the
compiled library next to a temporary module path and imports it.
"""

import importlib
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libroadtwin_py.so"
        if lib.exists():
            break
    else:
        sys.exit("libroadtwin_py.so not found; run `cargo build -p roadtwin-py` first")
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "roadtwin_py.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("roadtwin_py")


def main():
    rt = load_module()

    # Constant-velocity and dynamic TTC agree on flat ground without control.
    follower = rt.VehicleState(0.0, 0.0, 0.0, 15.0)
    leader = rt.VehicleState(24.0, 0.0, 0.0, 5.0)
    trad = rt.traditional_ttc(follower, leader, 4.0, 4.0)
    assert abs(trad - 2.0) < 1e-12, trad
    hf = rt.high_fidelity_ttc(follower, leader)
    assert abs(hf - rt.traditional_ttc(follower, leader)) < 1e-3, hf
    braking = rt.high_fidelity_ttc(follower, leader, ego_control=(-3.0, 0.0))
    assert braking is None or braking > hf

    moved = follower.step(0.0, 0.0, 1.0)
    assert abs(moved.x - 15.0) < 1e-9

    # Junction inference on the four-way fixture.
    osm = (ROOT / "crates" / "core" / "tests" / "fixtures" / "cross.osm").read_text()
    net = rt.build_map(osm)
    assert len(net) == 8
    assert list(net.junction_links().values()) == [8]
    errors, _ = net.validate_topology()
    assert not errors, errors
    again = rt.RoadNetwork.from_json(net.to_json())
    assert again.lane_ids() == net.lane_ids()
    pose = net.pose_at(net.lane_ids()[0], 10.0)
    assert math.isfinite(pose["heading"])

    labels = rt.dbscan([(0, 0), (1, 0), (50, 50)], 2.0, 2)
    assert labels == [0, 0, None], labels

    # A reference preset end to end.
    result = rt.run_scenario(rt.preset("IV"), seed=7)
    assert result["collisions"] >= 1
    assert result["trace_csv"].startswith("time,vehicle_id")
    m = result["metrics"]
    assert m["scenario"] == "IV" and m["traditional"] is not None

    rows = [
        ("I", 1.06, 1.60, 1.35),
        ("IV", 0.81, 1.10, 0.89),
        ("V", 1.70, 1.30, 1.12),
        ("VI", 4.12, 1.95, 1.35),
        ("VII", 1.27, 1.60, 1.86),
        ("VIII", 1.58, 2.10, 1.87),
    ]
    stats = rt.error_stats(rows)
    assert round(stats["traditional"]["mae"], 2) == 0.71
    assert round(stats["high_fidelity"]["rmse"], 2) == 0.32
    assert "Mean Error" in rt.report(rows)

    try:
        rt.preset("IX")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown preset accepted")

    print("roadtwin_py smoke test passed")


if __name__ == "__main__":
    main()
