"""CSV and JSON serialization for every on-disk artifact.

All CSV files start with a ``# schema=1`` comment line; readers reject
unknown versions. Floats are written with ``repr`` (shortest round-trip
form), which together with LF line endings makes every writer byte-
deterministic for identical inputs.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .bounds import BoundRow
from .clustering import ClusteringCell, ClusteringSummary, Dataset
from .deflate import DeflationRun, GroundTruthTrace
from .diagnostics import StepDiagnostics
from .errors import SchemaError
from .linalg import Spectrum, SymMatrix

__all__ = [
    "SCHEMA_VERSION",
    "read_dataset_csv",
    "read_spectrum_csv",
    "read_symmatrix_csv",
    "write_bounds_csv",
    "write_dataset_csv",
    "write_figure_csvs",
    "write_mi_csvs",
    "write_run_dir",
    "write_spectrum_csv",
    "write_symmatrix_csv",
]

SCHEMA_VERSION = 1
_SCHEMA_LINE = f"# schema={SCHEMA_VERSION}"


def _fmt(x) -> str:
    if x is None:
        return "precondition-failed"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_lines(path, lines) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _check_schema(line: str, path) -> None:
    if line.strip() != _SCHEMA_LINE:
        raise SchemaError(f"{path}: expected first line '{_SCHEMA_LINE}', got {line.strip()!r}")


def write_symmatrix_csv(m: SymMatrix, path) -> None:
    lines = [_SCHEMA_LINE, f"# symmatrix d={m.dim}"]
    lines += [",".join(_fmt(x) for x in row) for row in m.array]
    _write_lines(path, lines)


def read_symmatrix_csv(path) -> SymMatrix:
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if len(lines) < 2:
        raise SchemaError(f"{path}: truncated file")
    _check_schema(lines[0], path)
    header = lines[1].strip()
    if not header.startswith("# symmatrix d="):
        raise SchemaError(f"{path}: missing symmatrix header")
    d = int(header.split("=", 1)[1])
    rows = [line for line in lines[2:] if line.strip()]
    if len(rows) != d:
        raise SchemaError(f"{path}: expected {d} rows, found {len(rows)}")
    data = np.array([[float(x) for x in row.split(",")] for row in rows])
    return SymMatrix(data)


def write_spectrum_csv(spec: Spectrum, path) -> None:
    lines = [_SCHEMA_LINE, f"# spectrum d={spec.dim}"]
    lines.append(",".join(_fmt(x) for x in spec.eigenvalues))
    lines += [",".join(_fmt(x) for x in spec.basis[:, j]) for j in range(spec.dim)]
    _write_lines(path, lines)


def read_spectrum_csv(path) -> Spectrum:
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if len(lines) < 3:
        raise SchemaError(f"{path}: truncated file")
    _check_schema(lines[0], path)
    if not lines[1].strip().startswith("# spectrum d="):
        raise SchemaError(f"{path}: missing spectrum header")
    d = int(lines[1].split("=", 1)[1])
    rows = [line for line in lines[2:] if line.strip()]
    if len(rows) != d + 1:
        raise SchemaError(f"{path}: expected {d + 1} data rows, found {len(rows)}")
    eigenvalues = np.array([float(x) for x in rows[0].split(",")])
    basis = np.column_stack(
        [np.array([float(x) for x in row.split(",")]) for row in rows[1:]]
    )
    return Spectrum(eigenvalues, basis)


def _vectors_csv(mat: np.ndarray, label: str) -> list[str]:
    # one column per step; rows are coordinates
    lines = [_SCHEMA_LINE, f"# {label} d={mat.shape[0]} K={mat.shape[1]}"]
    lines += [",".join(_fmt(x) for x in row) for row in mat]
    return lines


def write_run_dir(
    run: DeflationRun,
    truth: GroundTruthTrace,
    out_dir,
    *,
    spectrum_label: str = "",
) -> None:
    """Serialize a run: per-step summary, output/top eigenvector columns, meta.

    ``run.csv`` columns: step index, top eigenvalue of the running matrix,
    sub-routine error size, output error against the ideal eigenvector, and
    the Frobenius matrix gap.
    """
    if not run.has_oracle_trace or run.matrices is None:
        raise ValueError("serialization needs an oracle-enabled run with matrices retained")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = [_SCHEMA_LINE, "k,lambda_k,delta_norm,eig_err,matrix_gap_fro"]
    for k in range(1, run.K + 1):
        gap = run.matrix(k).array - truth.ideal_matrix(k).array
        lines.append(
            ",".join(
                [
                    str(k),
                    _fmt(run.top_eigenvalues[k - 1]),
                    _fmt(np.linalg.norm(run.sub_errors[:, k - 1])),
                    _fmt(np.linalg.norm(run.components[:, k - 1] - truth.ideal_vector(k))),
                    _fmt(np.linalg.norm(gap)),
                ]
            )
        )
    _write_lines(out / "run.csv", lines)
    _write_lines(out / "v.csv", _vectors_csv(run.components, "vectors"))
    _write_lines(out / "u.csv", _vectors_csv(run.exact_tops, "vectors"))
    meta = {
        "schema": SCHEMA_VERSION,
        "d": run.d,
        "K": run.K,
        "t": run.t,
        "seed": run.seed,
        "spectrum": spectrum_label,
    }
    with open(out / "meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_figure_csvs(diags: list[StepDiagnostics], j_slice, out_dir) -> None:
    """Emit the three figure-trace CSVs for the requested ideal directions.

    fig2.csv: directional matrix-gap norms; fig3.csv: alignment profiles of
    the output and running-top eigenvectors; fig4.csv: the step-k inner
    product next to the directional gap.
    """
    out = Path(out_dir)
    j_slice = [int(j) for j in j_slice]
    fig2 = [_SCHEMA_LINE, "k,j,directional_gap"]
    fig3 = [_SCHEMA_LINE, "k,j,v_align,u_align"]
    fig4 = [_SCHEMA_LINE, "k,j,inner_gap,directional_gap"]
    for d in diags:
        for j in j_slice:
            fig2.append(f"{d.k},{j},{_fmt(d.directional_gaps[j - 1])}")
            fig3.append(
                f"{d.k},{j},{_fmt(d.output_alignments[j - 1])},{_fmt(d.top_alignments[j - 1])}"
            )
            fig4.append(f"{d.k},{j},{_fmt(d.inner_gap)},{_fmt(d.directional_gaps[j - 1])}")
    _write_lines(out / "fig2.csv", fig2)
    _write_lines(out / "fig3.csv", fig3)
    _write_lines(out / "fig4.csv", fig4)


def write_bounds_csv(rows: list[BoundRow], path, *, with_budgets: bool = False) -> None:
    """Side-by-side bound report.

    Columns ``thm1_*`` carry the sub-routine-agnostic family and ``thm2_*``
    the power-iteration family; ``cond7`` / ``cond12`` / ``cond13`` are their
    admissibility flags (sum condition, per-step floor, geometric tail).
    """
    header = "k,thm1_bound,thm2_bound,empirical_err,slack_thm1,slack_thm2,cond7,cond12,cond13"
    if with_budgets:
        header += ",delta_budget,t_budget"
    lines = [_SCHEMA_LINE, header]
    for row in rows:
        cells = [
            str(row.k),
            _fmt(row.agnostic),
            _fmt(row.power_iter),
            _fmt(row.empirical),
            _fmt(row.slack_agnostic),
            _fmt(row.slack_power_iter),
            _fmt(row.condition_agnostic),
            _fmt(row.condition_step_floor),
            _fmt(row.condition_tail),
        ]
        if with_budgets:
            cells += [_fmt(row.error_budget), _fmt(row.iteration_budget)]
        lines.append(",".join(cells))
    _write_lines(path, lines)


def write_mi_csvs(cells: list[ClusteringCell], summary: list[ClusteringSummary], out_dir) -> None:
    out = Path(out_dir)
    lines = [_SCHEMA_LINE, "t,seed,mi"]
    lines += [f"{c.t},{c.seed},{_fmt(c.mi)}" for c in cells]
    _write_lines(out / "mi_vs_t.csv", lines)
    lines = [_SCHEMA_LINE, "t,mean_mi,std_mi"]
    lines += [f"{s.t},{_fmt(s.mean_mi)},{_fmt(s.std_mi)}" for s in summary]
    _write_lines(out / "mi_summary.csv", lines)


def write_dataset_csv(data: Dataset, path) -> None:
    p = data.features.shape[1]
    header = ",".join([f"f{i}" for i in range(p)] + ["label"])
    lines = [_SCHEMA_LINE, header]
    for row, label in zip(data.features, data.labels):
        lines.append(",".join([_fmt(x) for x in row] + [str(int(label))]))
    _write_lines(path, lines)


def read_dataset_csv(path) -> Dataset:
    """Read a feature CSV whose label column is named ``label``.

    The header may or may not be preceded by a schema comment; plain
    user-supplied CSVs are accepted as long as the label column exists.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty dataset")
    if lines[0].startswith("# schema="):
        _check_schema(lines[0], path)
        lines = lines[1:]
    if not lines:
        raise SchemaError(f"{path}: missing header")
    header = [c.strip() for c in lines[0].split(",")]
    if "label" not in header:
        raise SchemaError(f"{path}: no 'label' column in header {header}")
    label_idx = header.index("label")
    feat_idx = [i for i in range(len(header)) if i != label_idx]
    feats = []
    labels = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row has {len(cells)} cells, header has {len(header)}")
        feats.append([float(cells[i]) for i in feat_idx])
        labels.append(int(float(cells[label_idx])))
    return Dataset(features=np.array(feats), labels=np.array(labels))
