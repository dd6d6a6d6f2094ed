#!/usr/bin/env python3
"""Rebuild the UCI heart-disease files from copies bundled in PyPI wheels.

The UCI repository is not always reachable, but two widely mirrored wheels
carry the same records:

  * Orange3 ships ``Orange/datasets/heart_disease.tab``: the processed
    Cleveland file with categorical codes spelled out and the target already
    collapsed to {0,1}.
  * keel-ds ships ``keel_ds/data/balanced/raw/heart.dat``: the Statlog heart
    file in KEEL layout, with oldpeak stored in tenths.

Usage:
  pip download --no-deps orange3 keel-ds -d /tmp/wheels
  python3 scripts/rebuild_uci_files.py /tmp/wheels/orange3-*.whl \
      /tmp/wheels/keel_ds-*.whl data/
"""

import argparse
import pathlib
import zipfile

CP = {"typical ang": 1, "atypical ang": 2, "non-anginal": 3, "asymptomatic": 4}
SEX = {"female": 0, "male": 1}
ECG = {"normal": 0, "ST-T abnormal": 1, "left vent hypertrophy": 2}
SLOPE = {"upsloping": 1, "flat": 2, "downsloping": 3}
THAL = {"normal": 3, "fixed defect": 6, "reversable defect": 7}
CODES = {1: SEX, 2: CP, 6: ECG, 10: SLOPE, 12: THAL}


def cleveland_rows(tab_text):
    lines = tab_text.splitlines()[3:]  # name / type / role header rows
    for line in lines:
        if not line.strip():
            continue
        cells = line.split("\t")
        assert len(cells) == 14, line
        out = []
        for col, cell in enumerate(cells[:13]):
            if cell == "?":
                out.append("?")
                continue
            value = CODES[col][cell] if col in CODES else float(cell)
            out.append(f"{float(value):.1f}")
        out.append(str(int(cells[13])))
        yield ",".join(out)


def statlog_rows(dat_text):
    for line in dat_text.splitlines():
        if not line.strip() or line.startswith("@"):
            continue
        cells = [c.strip() for c in line.split(",")]
        assert len(cells) == 14, line
        values = [float(c) for c in cells[:13]]
        values[9] /= 10.0  # oldpeak
        yield " ".join(f"{v:.1f}" for v in values) + " " + str(int(cells[13]))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("orange_wheel")
    ap.add_argument("keel_wheel")
    ap.add_argument("out_dir")
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tab = zipfile.ZipFile(args.orange_wheel).read("Orange/datasets/heart_disease.tab")
    rows = list(cleveland_rows(tab.decode()))
    (out / "processed.cleveland.data").write_text("\n".join(rows) + "\n")

    dat = zipfile.ZipFile(args.keel_wheel).read("keel_ds/data/balanced/raw/heart.dat")
    rows = list(statlog_rows(dat.decode()))
    (out / "heart.dat").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
