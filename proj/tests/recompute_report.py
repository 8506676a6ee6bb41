#!/usr/bin/env python3
"""Recomputes every residual in report.json from the emitted files of one run."""

import json
import math
import sys
from pathlib import Path

import numpy as np


def load_csv(path):
    lines = [l for l in Path(path).read_text().splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(x) for x in l.split(",")] for l in lines[1:]])
    return header, data


def components(header, data, prefix="rho"):
    """Returns {(L, M): complex array} from the re/im column pairs."""
    out = {}
    for i, name in enumerate(header):
        parts = name.split("_")
        if len(parts) == 4 and parts[0] == prefix and parts[3] == "re":
            im = header.index(f"{prefix}_{parts[1]}_{parts[2]}_im")
            out[(int(parts[1]), int(parts[2]))] = data[:, i] + 1j * data[:, im]
    return out


def close(a, b, rel=1e-9, absolute=1e-14):
    return abs(a - b) <= max(absolute, rel * max(abs(a), abs(b)))


def recurrence_frequency(t, x):
    # x[n+1] + x[n-1] = 2 cos(w dt) x[n] + c, solved by least squares.
    dt = t[1] - t[0]
    a = np.column_stack([x[1:-1], np.ones(len(x) - 2)])
    sol, *_ = np.linalg.lstsq(a, x[2:] + x[:-2], rcond=None)
    c = float(np.clip(sol[0].real / 2.0, -1.0, 1.0))
    return math.acos(c) / dt


def main(out_dir):
    out = Path(out_dir)
    report = json.loads((out / "report.json").read_text())
    failures = []

    def expect(name, got, want, **kw):
        if not close(got, want, **kw):
            failures.append(f"{name}: recomputed {got!r}, report {want!r}")

    if "conservation" in report:
        header, data = load_csv(out / "trajectory.csv")
        comp = components(header, data)
        rho00 = comp[(0, 0)]
        expect("rho00_drift", float(np.max(np.abs(rho00 - rho00[0]))), report["conservation"]["rho00_drift"])
        herm = 0.0
        for (L, M), v in comp.items():
            herm = max(herm, float(np.max(np.abs(comp[(L, -M)] - (-1) ** M * np.conj(v)))))
        expect("hermiticity", herm, report["conservation"]["hermiticity"])
        purity = sum(np.abs(v) ** 2 for v in comp.values())
        expect("purity_drift", float(np.max(np.abs(purity - purity[0]))), report["conservation"]["purity_drift"],
               absolute=1e-13)

        for fit in report.get("fits", {}).get("frequencies", []):
            if fit["single_frequency"]:
                w = recurrence_frequency(data[:, 0], comp[(fit["L"], fit["M"])])
                expect(f"omega_{fit['L']}_{fit['M']}", w, fit["omega"], rel=1e-8)

        for fit in report.get("fits", {}).get("decay_rates", []):
            v = comp[(fit["L"], fit["M"])]
            y = (v * np.conj(v[0])).real / abs(v[0]) ** 2
            t = data[:, 0]
            window = min(t[-1], 1.0 / fit["predicted_rate"]) if fit["predicted_rate"] > 0 else t[-1]
            mask = (t <= window) & (y > 0)
            slope, _ = np.polyfit(t[mask], np.log(y[mask]), 1)
            expect(f"decay_{fit['L']}_{fit['M']}", -slope, fit["fitted_rate"], rel=1e-8)

    if "oracle" in report:
        _, data = load_csv(out / "trajectory.csv")
        oheader, odata = load_csv(out / "oracle_deviation.csv")
        header, _ = load_csv(out / "trajectory.csv")
        a = components(header, data)
        b = components(oheader, odata, prefix="oracle")
        dev = np.zeros(len(data))
        for key, v in a.items():
            dev = np.maximum(dev, np.abs(v - b[key]))
        expect("max_abs_deviation", float(dev.max()), report["oracle"]["max_abs_deviation"])
        column = odata[:, oheader.index("max_abs_deviation")]
        expect("deviation_column", float(np.max(np.abs(column - dev))), 0.0, absolute=1e-15)

    if (out / "rates.json").exists() and "rates" in report:
        rates = json.loads((out / "rates.json").read_text())
        table = {(r["L"], r["M"]): r["rate"] for r in rates["rates"]}
        if "ratio_rank2_rank1" in report["rates"]:
            expect("ratio_rank2_rank1", table[(2, 0)] / table[(1, 0)], report["rates"]["ratio_rank2_rank1"])
        for L in {k[0] for k in table}:
            mean = sum(table[(L, M)] for M in range(-L, L + 1)) / (2 * L + 1)
            expect(f"rank_mean_{L}", mean, rates["rank_mean"][str(L)])

    for check in report["checks"]:
        if check["passed"] != (check["value"] <= check["limit"]):
            failures.append(f"check {check['name']} flag disagrees with its value")
    if (report["exit_code"] == 0) != all(c["passed"] for c in report["checks"]):
        failures.append("exit code disagrees with the checks")

    for f in failures:
        print("MISMATCH", f)
    print(f"{out}: {'ok' if not failures else 'FAILED'}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
