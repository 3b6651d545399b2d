"""Command-line entry point.

    cini simulate --config run.json --out results/
    cini decohere --config run.json --k 0 --l 1 --out results/
    cini sweep    --config run.json --axis two_j --values 1,2,4 --out results/
    cini verify   [--config extra.json] [--out report/]

Exit codes: 0 success, 1 usage or configuration error, 2 numerical breakdown,
3 verification failure.
"""

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .config import config_from_dict, load_config, with_override
from .csvio import (
    AUX_HEADER,
    DECOHERENCE_HEADER,
    PHASE_HEADER,
    aux_rows,
    decoherence_rows,
    ensure_dir,
    phase_rows,
    state_header,
    state_rows,
    write_csv,
    write_metadata,
)
from .errors import ConfigError, NonFiniteError, SingularityError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _config_digest(cfg):
    return hashlib.sha256(json.dumps(cfg.raw, sort_keys=True).encode()).hexdigest()


def _requested_levels(cfg):
    for task in cfg.tasks:
        if task.get("kind") == "simulate" and "levels" in task:
            keys = list(task["levels"])
            for k in keys:
                if k not in cfg.level_keys:
                    raise ConfigError("tasks", f"unknown level {k}")
            return keys
    return cfg.level_keys


def cmd_simulate(cfg, out):
    """Invariant solution, phases and oracle comparison for every requested level."""
    from .runner import branch_report

    ensure_dir(out)
    summary = []
    files = []
    for key in _requested_levels(cfg):
        rep = branch_report(cfg, key)
        br = rep.branch
        t = cfg.grid.nodes
        files.append(write_csv(os.path.join(out, f"aux_k{key}.csv"), AUX_HEADER, aux_rows(br.trajectory)))
        for trace in br.phases:
            name = f"phases_k{key}_2m{trace.two_m:+d}.csv"
            files.append(write_csv(os.path.join(out, name), PHASE_HEADER, phase_rows(trace)))
        dim = br.rep.dim
        files.append(write_csv(os.path.join(out, f"state_k{key}.csv"), state_header(dim), state_rows(t, br.psi)))
        files.append(write_csv(os.path.join(out, f"oracle_k{key}.csv"), state_header(dim), state_rows(t, rep.oracle)))
        summary.append(
            (
                key,
                rep.fidelity,
                rep.norm_deviation,
                rep.invariant_ode_residual,
                rep.transformed_invariant_deviation,
                rep.transformed_residual,
                rep.degenerate,
            )
        )
        print(
            f"level {key}: fidelity={rep.fidelity:.15f} invariant_ode_residual={rep.invariant_ode_residual:.3e} "
            f"transformed_invariant_dev={rep.transformed_invariant_deviation:.3e} degenerate={rep.degenerate}"
        )
    header = ("k", "fidelity", "max_norm_dev", "invariant_ode_residual", "transformed_invariant_deviation", "transformed_h_residual", "degenerate")
    files.append(write_csv(os.path.join(out, "summary.csv"), header, summary))
    write_metadata(
        os.path.join(out, "metadata.json"),
        command="simulate",
        version=__version__,
        config_sha256=_config_digest(cfg),
        files=[os.path.basename(f) for f in files],
    )
    return EXIT_OK


def cmd_decohere(cfg, k, l, out):
    """Decoherence factor between levels ``k`` and ``l`` by every available method."""
    from .runner import decoherence_bundle

    for name, key in (("k", k), ("l", l)):
        if key not in cfg.level_keys:
            raise UsageError(f"--{name} {key} is not a level of the configuration (have {cfg.level_keys})")
    ensure_dir(out)
    b = decoherence_bundle(cfg, k, l)
    t = cfg.grid.nodes
    rows = list(decoherence_rows(t, b.direct)) + list(decoherence_rows(t, b.closed))
    if b.special is not None:
        rows += list(decoherence_rows(t, b.special))
    files = [write_csv(os.path.join(out, f"decoherence_k{k}_l{l}.csv"), DECOHERENCE_HEADER, rows)]
    rho = b.coherence
    coh_rows = (
        (ti, r[0, 0].real, r[1, 1].real, r[0, 1].real, r[0, 1].imag, abs(r[0, 1]), ov.real, ov.imag)
        for ti, r, ov in zip(t, rho, b.overlap)
    )
    files.append(
        write_csv(
            os.path.join(out, f"coherence_k{k}_l{l}.csv"),
            ("t", "rho_kk", "rho_ll", "re_rho_kl", "im_rho_kl", "abs_rho_kl", "re_overlap", "im_overlap"),
            coh_rows,
        )
    )
    summary = {
        "max_abs_direct_minus_closed": b.closed_discrepancy,
        "max_abs_direct_minus_special_case": b.special_discrepancy,
        "terminal_abs_F": float(abs(b.direct.values[-1])),
        "two_j": b.direct.two_j,
        "two_m": b.direct.two_m,
    }
    print(f"max |direct - closed| = {b.closed_discrepancy:.3e}")
    if b.special is not None:
        print(f"max |direct - cos^2j law| = {b.special_discrepancy:.3e}")
    print(f"terminal |F| = {summary['terminal_abs_F']:.17g}")
    write_metadata(
        os.path.join(out, "metadata.json"),
        command="decohere",
        version=__version__,
        config_sha256=_config_digest(cfg),
        summary=summary,
        files=[os.path.basename(f) for f in files],
    )
    return EXIT_OK


def _variant(cfg, axis, value):
    if axis == "two_j":
        if int(value) != value or value < 0:
            raise UsageError(f"two_j values must be nonnegative integers, got {value}")
        doc = json.loads(json.dumps(cfg.raw))
        doc["label"] = {"n1": int(value), "n2": 0}
        init = doc.get("initial_state")
        if init is not None and init.get("kind") == "aligned_m":
            init.pop("two_m", None)
        return config_from_dict(doc)
    return with_override(cfg, axis, value)


def _sweep_row(cfg):
    from .runner import branch_report, decoherence_bundle

    reports = {key: branch_report(cfg, key) for key in cfg.level_keys}
    row = {
        "two_j": cfg.label.two_j,
        "fidelity": min(r.fidelity for r in reports.values()),
        "invariant_ode_residual": max(r.invariant_ode_residual for r in reports.values()),
        "transformed_invariant_deviation": max(r.transformed_invariant_deviation for r in reports.values()),
        "terminal_abs_F": "",
        "terminal_abs_F_law": "",
        "closed_discrepancy": "",
    }
    if len(cfg.level_keys) >= 2:
        k, l = cfg.level_keys[:2]
        b = decoherence_bundle(cfg, k, l, reports[k].branch, reports[l].branch)
        row["terminal_abs_F"] = float(abs(b.direct.values[-1]))
        row["closed_discrepancy"] = b.closed_discrepancy
        if b.special is not None:
            row["terminal_abs_F_law"] = float(abs(b.special.values[-1]))
    return row


SWEEP_HEADER = (
    "value",
    "two_j",
    "terminal_abs_F",
    "terminal_abs_F_law",
    "fidelity",
    "invariant_ode_residual",
    "transformed_invariant_deviation",
    "closed_discrepancy",
)


def cmd_sweep(cfg, axis, values, out, workers=None):
    """One summary row per value, in input order."""
    if not values:
        raise UsageError("--values must list at least one value")
    variants = [_variant(cfg, axis, v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_sweep_row, variants))
    ensure_dir(out)
    table = [(v,) + tuple(r[h] for h in SWEEP_HEADER[1:]) for v, r in zip(values, rows)]
    path = write_csv(os.path.join(out, "sweep.csv"), SWEEP_HEADER, table)
    absf = [r["terminal_abs_F"] for r in rows]
    monotone = len(absf) > 1 and all(isinstance(a, float) for a in absf) and all(
        b < a for a, b in zip(absf, absf[1:])
    )
    for v, r in zip(values, rows):
        print(f"{axis}={v}: |F|={r['terminal_abs_F']} fidelity={r['fidelity']:.15f}")
    print(f"strictly decreasing |F|: {monotone}")
    write_metadata(
        os.path.join(out, "metadata.json"),
        command="sweep",
        axis=axis,
        values=list(values),
        version=__version__,
        config_sha256=_config_digest(cfg),
        monotone_decreasing=monotone,
        files=[os.path.basename(path)],
    )
    return EXIT_OK


def _load_config_set(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    docs = doc if isinstance(doc, list) else [doc]
    return [config_from_dict(d) for d in docs]


def cmd_verify(config_path=None, out=None):
    """Run the acceptance checks; exit 3 naming the first failure."""
    from .verify import config_checks, run_all

    results = run_all()
    if config_path:
        for i, cfg in enumerate(_load_config_set(config_path)):
            results += config_checks(cfg, name=f"config{i}")
    for r in results:
        print(r.line())
    table = next((r.table for r in results if r.name == "closed_form_accuracy"), [])
    if table:
        print("closed-form discrepancy vs |beta| (non-collinear, j <= 2):")
        print("  max|beta|   max|closed-direct|   max ratio to |beta|^3")
        for row in table:
            print(
                f"  {row['max_abs_beta']:<10.4g} {row['max_discrepancy']:<20.6e} {row['max_discrepancy_over_beta3']:.4g}"
            )
    failed = [r.name for r in results if not r.passed]
    report = {"passed": not failed, "failed": failed, "checks": [r.as_dict() for r in results]}
    if out:
        ensure_dir(out)
        with open(os.path.join(out, "verify_report.json"), "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, default=float)
            fh.write("\n")
        write_csv(
            os.path.join(out, "closed_form_discrepancy.csv"),
            ("max_abs_beta", "max_discrepancy", "max_discrepancy_over_beta3"),
            ((r["max_abs_beta"], r["max_discrepancy"], r["max_discrepancy_over_beta3"]) for r in table),
        )
    print(json.dumps({"passed": report["passed"], "failed": failed}))
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _values(text):
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            out.append(int(item))
        except ValueError:
            try:
                out.append(float(item))
            except ValueError:
                raise UsageError(f"not a number: {item!r}") from None
    return out


def build_parser():
    p = _Parser(prog="cini", description="Invariant-based solution and decoherence of the time-dependent Cini model")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="solve every level and compare with direct propagation")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)

    d = sub.add_parser("decohere", help="decoherence factor between two levels")
    d.add_argument("--config", required=True)
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--l", type=int, required=True)
    d.add_argument("--out", required=True)

    w = sub.add_parser("sweep", help="scan spin size or a configuration scalar")
    w.add_argument("--config", required=True)
    w.add_argument("--axis", required=True, help="'two_j' or a dotted config path such as levels.0.E")
    w.add_argument("--values", required=True, help="comma-separated list")
    w.add_argument("--out", required=True)
    w.add_argument("--workers", type=int, default=None)

    v = sub.add_parser("verify", help="run the built-in acceptance checks")
    v.add_argument("--config", default=None, help="optional JSON config (or list of configs) to check as well")
    v.add_argument("--out", default=None, help="directory for the JSON report and discrepancy table")
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command == "verify":
            return cmd_verify(args.config, args.out)
        cfg = load_config(args.config)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.out)
        if args.command == "decohere":
            return cmd_decohere(cfg, args.k, args.l, args.out)
        return cmd_sweep(cfg, args.axis, _values(args.values), args.out, args.workers)
    except (UsageError, ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularityError, NonFiniteError) as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
