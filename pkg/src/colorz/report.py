"""
Render result documents into a CSV table and matplotlib figures.

Consumes the JSON-lines output of the `colorz` CLI (any mix of commands)
and writes, into an output directory:

  results.csv            one row per document (superset of columns)
  z_vs_beta.png          ln Z against beta per method, when a sweep exists
  method_comparison.png  achieved errors vs guaranteed bounds, when compare
                         documents exist

The CLI itself never plots; this is the separate consumer of its JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

CSV_COLUMNS = [
    "command",
    "lattice_source",
    "vertices",
    "edges",
    "faces",
    "genus",
    "beta",
    "method",
    "value",
    "log_value",
    "log_error_bound",
    "samples",
    "seed",
    "abs_error_main",
    "abs_error_baseline",
    "bound_new",
    "bound_old",
    "bound_ratio",
    "wall_time_s",
]


def _maybe_float(x):
    if isinstance(x, str):
        try:
            return float(x)  # handles "inf"/"nan" emitted for non-finite values
        except ValueError:
            return None
    return x


def _row_from_doc(doc: dict) -> dict:
    lattice = doc.get("lattice", {})
    model = doc.get("model", {})
    row = {
        "command": doc.get("command"),
        "lattice_source": lattice.get("source"),
        "vertices": lattice.get("vertices"),
        "edges": lattice.get("edges"),
        "faces": lattice.get("faces"),
        "genus": lattice.get("genus"),
        "beta": model.get("beta"),
        "seed": doc.get("seed"),
        "wall_time_s": doc.get("wall_time_s"),
    }
    command = doc.get("command")
    if command == "exact":
        values = doc.get("values", {})
        row.update(
            method=doc.get("method"),
            value=_maybe_float(values.get("z")),
            log_value=values.get("log_z"),
        )
    elif command in ("estimate", "qsim"):
        values = doc.get("values", {})
        row.update(
            method=values.get("method"),
            value=_maybe_float(values.get("z_estimate")),
            log_value=_maybe_float(values.get("log_abs_z_estimate")),
            log_error_bound=_maybe_float(values.get("log_error_bound")),
            samples=values.get("samples"),
        )
    elif command == "compare":
        row.update(
            method="compare",
            value=_maybe_float(doc.get("z_exact")),
            log_value=doc.get("log_z_exact"),
            abs_error_main=_maybe_float(doc.get("abs_error_main")),
            abs_error_baseline=_maybe_float(doc.get("abs_error_baseline")),
            bound_new=_maybe_float(doc.get("bound_new")),
            bound_old=_maybe_float(doc.get("bound_old")),
            bound_ratio=doc.get("bound_ratio"),
            samples=doc.get("samples_main"),
        )
    return row


def read_documents(paths: list[str]) -> list[dict]:
    docs = []
    for path in paths:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        for line in text.splitlines():
            line = line.strip()
            if line:
                docs.append(json.loads(line))
    return docs


def write_csv(rows: list[dict], out: Path) -> None:
    with out.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in CSV_COLUMNS})


def plot_z_vs_beta(rows: list[dict], out: Path) -> bool:
    """ln Z against beta, one line per (command, method); returns written?"""
    series = defaultdict(list)
    for row in rows:
        if row.get("beta") is None or row.get("log_value") is None:
            continue
        label = f"{row['command']}:{row.get('method') or ''} {row.get('lattice_source') or ''}"
        series[label].append((row["beta"], row["log_value"], row.get("log_error_bound")))
    series = {k: sorted(v) for k, v in series.items() if len(v) >= 2}
    if not series:
        return False
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, pts in sorted(series.items()):
        betas = [p[0] for p in pts]
        ax.plot(betas, [p[1] for p in pts], marker="o", markersize=3, label=label)
        bounds = [p[2] for p in pts]
        if all(b is not None for b in bounds):
            ax.plot(betas, bounds, linestyle="--", linewidth=0.8,
                    label=f"{label} (ln error bound)")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel(r"$\ln Z$")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return True


def plot_method_comparison(rows: list[dict], out: Path) -> bool:
    """Achieved errors against guaranteed bounds for compare documents."""
    rows = [r for r in rows if r.get("command") == "compare" and r.get("bound_new") is not None]
    if not rows:
        return False
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    labels = ["|err| sampling", "bound sampling", "|err| overlap", "bound overlap"]
    width = 0.8 / len(rows)
    for i, row in enumerate(rows):
        heights = [
            row.get("abs_error_main"),
            row.get("bound_new"),
            row.get("abs_error_baseline"),
            row.get("bound_old"),
        ]
        xs = [j + i * width for j in range(len(labels))]
        tag = f"beta={row.get('beta')}" if row.get("beta") is not None else f"run {i}"
        ax.bar(xs, [h if h else float("nan") for h in heights], width=width, label=tag)
        if row.get("value"):
            ax.axhline(row["value"], linestyle=":", linewidth=0.8, color="gray")
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(labels))])
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_yscale("log")
    ax.set_ylabel("absolute error / bound (dotted: exact Z)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return True


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="colorz-report",
        description="Summarize colorz JSON results into CSV and figures.",
    )
    parser.add_argument("inputs", nargs="+", help="result JSONL files ('-' for stdin)")
    parser.add_argument("--out-dir", default="report", help="output directory")
    args = parser.parse_args(argv)

    try:
        docs = read_documents(args.inputs)
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: file not found: {exc.filename}\n")
        return 3
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"error: cannot parse input: {exc}\n")
        return 4
    if not docs:
        sys.stderr.write("error: no documents found\n")
        return 4

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [_row_from_doc(d) for d in docs]

    written = []
    csv_path = out_dir / "results.csv"
    write_csv(rows, csv_path)
    written.append(csv_path)
    if plot_z_vs_beta(rows, out_dir / "z_vs_beta.png"):
        written.append(out_dir / "z_vs_beta.png")
    if plot_method_comparison(rows, out_dir / "method_comparison.png"):
        written.append(out_dir / "method_comparison.png")

    for path in written:
        sys.stderr.write(f"wrote {path}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
