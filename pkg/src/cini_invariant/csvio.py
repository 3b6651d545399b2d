"""Deterministic CSV output plus a JSON sidecar for run metadata."""

import csv
import datetime as _dt
import json
import os

import numpy as np


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, rows):
    """RFC-4180 CSV with floats printed to 17 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_metadata(path, **fields):
    """Sidecar JSON carrying the run timestamp; kept out of the CSVs so they diff cleanly."""
    fields.setdefault("timestamp", _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fields, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def aux_rows(traj):
    return zip(traj.grid.nodes, traj.lam, traj.gamma, traj.gamma_dot)


AUX_HEADER = ("t", "lambda", "gamma", "gamma_dot")
PHASE_HEADER = ("t", "phi_dynamical", "phi_geometric", "phi_total")
DECOHERENCE_HEADER = ("t", "re_F", "im_F", "abs_F", "method")


def phase_rows(trace):
    return zip(trace.grid.nodes, trace.dynamical, trace.geometric, trace.total)


def state_header(dim):
    cols = ["t"]
    for i in range(dim):
        cols += [f"re_{i}", f"im_{i}"]
    return cols


def state_rows(times, states):
    for t, psi in zip(times, states):
        row = [t]
        for z in psi:
            row += [z.real, z.imag]
        yield row


def decoherence_rows(times, trace):
    for t, z in zip(times, trace.values):
        yield (t, z.real, z.imag, abs(z), trace.method)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
