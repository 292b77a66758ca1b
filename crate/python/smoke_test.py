#!/usr/bin/env python3
"""Smoke test for the solarcast_native extension module.

Builds the cdylib if needed, imports it, and runs a small end-to-end
pipeline: synthetic data -> clearness index -> forecaster vs baselines.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    lib = ROOT / "target" / "debug" / "libsolarcast_native.so"
    if not lib.exists():
        subprocess.run(["cargo", "build", "-p", "solarcast-py"], cwd=ROOT, check=True)
    dest = Path(__file__).resolve().parent / "solarcast_native.so"
    shutil.copyfile(lib, dest)
    sys.path.insert(0, str(dest.parent))
    import solarcast_native

    return solarcast_native


def main():
    sc = load_module()

    site = sc.SiteAtmosphere.reference(52.09, 5.17)
    print(f"site: {site}")

    # clear-sky sanity: a June day peaks well above the night threshold
    clear = sc.clear_sky_series(site, "2015-06-21T00:00:00Z", 300, 288)
    assert len(clear) == 288
    assert max(clear) > 700, f"June clear-sky peak {max(clear):.0f} W/m2 too low"
    assert min(clear) == 0.0
    print(f"clear-sky peak on 2015-06-21: {max(clear):.0f} W/m2")

    # synthetic year under a moderately cloudy AR(1) process
    start, values, valid = sc.synthesize_year(
        site, 2015, seed=7, cloud_persistence=0.7, cloud_depth=0.5
    )
    assert start == "2015-01-01T00:00:00Z"
    assert len(values) == len(valid) == 365 * 288

    k, mask = sc.clearness_index(site, start, 300, values, valid)
    daytime = [ki for ki, ok in zip(k, mask) if ok]
    assert daytime and all(0.0 <= ki <= 1.5 for ki in daytime)
    print(f"clearness index: {len(daytime)} daytime samples")

    # fit and forecast on a two-day training window ending midsummer noon
    params = sc.TesParams(0.4, 0.05, 0.05, 288)
    origin = 171 * 288 + 144
    train_k = k[origin - 2 * 288 : origin]
    train_mask = mask[origin - 2 * 288 : origin]
    state = sc.initialize(train_k, train_mask, params)
    fan = state.forecast(4)
    assert len(fan) == 4 and all(0.0 <= v <= 1.5 for v in fan)
    print(f"k forecasts 5-20 min ahead: {[round(v, 3) for v in fan]}")

    pers = sc.persistence_forecast(train_k, train_mask, 4)
    avg = sc.average_forecast(train_k, train_mask, 16, 4)
    assert len(pers) == 4 and len(avg) == 4

    # tiny seeded benchmark; the JSON report is self-describing
    report = json.loads(
        sc.benchmark(k, mask, 300, 4 * 288, [1, 2, 3, 4], 20, 42, params)
    )
    assert sorted(report["per_method"]) == ["average", "persistence", "tes"]
    for name, rep in sorted(report["per_method"].items()):
        print(f"pooled MAE {name}: {rep['pooled_mean']:.4f}")

    print("smoke test passed")


if __name__ == "__main__":
    main()
