#!/usr/bin/env python3
"""Convert a NOAA ERSST v5 netCDF-4 file (e.g. sst.mnmean.nc) to an SSTG container.

Needs numpy and h5py only; netCDF-4 files are HDF5 underneath.

    python3 tools/nc_to_sstg.py sst.mnmean.nc ersst.sstg --first-year 1880 --last-year 2021
"""

import argparse
import datetime as dt
import re
import struct
import sys

import h5py
import numpy as np


def month_starts(time_var):
    units = time_var.attrs["units"]
    units = units.decode() if isinstance(units, bytes) else units
    m = re.match(r"days since (\d+)-(\d+)-(\d+)", units)
    if not m:
        sys.exit(f"unsupported time units: {units!r}")
    origin = dt.date(int(m[1]), int(m[2]), int(m[3]))
    return [origin + dt.timedelta(days=float(d)) for d in time_var[:]]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src")
    ap.add_argument("dst")
    ap.add_argument("--variable", default="sst")
    ap.add_argument("--first-year", type=int, default=1880)
    ap.add_argument("--last-year", type=int, default=2021)
    args = ap.parse_args()

    with h5py.File(args.src, "r") as f:
        var = f[args.variable]
        lat = f["lat"][:]
        lon = f["lon"][:]
        dates = month_starts(f["time"])
        keep = [i for i, d in enumerate(dates) if args.first_year <= d.year <= args.last_year]
        if not keep or dates[keep[0]].month != 1:
            sys.exit("selected span must start in January")
        if len(keep) % 12:
            print(f"warning: {len(keep)} months is not a whole number of years", file=sys.stderr)
        data = var[keep[0] : keep[-1] + 1].astype(np.float64)
        fill = [var.attrs.get(k) for k in ("missing_value", "_FillValue")]

    for v in fill:
        if v is not None:
            data[np.isclose(data, float(np.ravel(v)[0]))] = np.nan
    data[np.abs(data) > 1e10] = np.nan
    if lat[0] > lat[-1]:  # the container stores latitude ascending
        data = data[:, ::-1, :]
        lat = lat[::-1]
    if len(lat) != 89 or len(lon) != 180 or abs(lat[0] + 88) > 1e-6 or abs(lon[0]) > 1e-6:
        sys.exit(f"expected the 2-degree 89x180 grid starting at 88S, 0E; got {len(lat)}x{len(lon)}")

    n_months = data.shape[0]
    with open(args.dst, "wb") as out:
        out.write(b"SSTG")
        out.write(struct.pack("<4I", 89, 180, n_months, args.first_year))
        out.write(data.astype("<f4").tobytes(order="C"))
    print(f"wrote {n_months} months ({args.first_year}-{args.first_year + (n_months - 1) // 12}) to {args.dst}")


if __name__ == "__main__":
    main()
