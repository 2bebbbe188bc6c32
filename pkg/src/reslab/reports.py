"""Deterministic file output: CSV, JSON, edge lists, tidy plot data.

Every writer produces byte-identical output for identical inputs: rows are
in canonical order, floats use shortest round-trip formatting, JSON keys
are sorted, and no timestamps ever enter a file.  Column layouts are
frozen in docs/formats.md.
"""

from __future__ import annotations

import json
from pathlib import Path

from .clusters import ComponentSummary, NStar, TriadGraph
from .directsim import AveragingTable
from .dynamics import EnsembleStats
from .lattice import Triad, WaveVector

__all__ = [
    "fmt",
    "write_csv",
    "write_json",
    "triad_rows",
    "write_triads_csv",
    "write_triads_json",
    "write_edges_text",
    "write_edges_json",
    "write_stars_csv",
    "write_components_csv",
    "write_graph_summary_json",
    "write_modes_csv",
    "write_timeseries_csv",
    "write_timeseries_json",
    "write_spectrum_csv",
    "write_averaging_csv",
    "write_averaging_json",
    "write_plotdata_csv",
]


def fmt(x) -> str:
    """Shortest round-trip decimal for floats; plain str otherwise."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


TRIAD_HEADER = ["k1x", "k1y", "k2x", "k2y", "k3x", "k3y"]


def triad_rows(triads: list[Triad]) -> list[tuple[int, ...]]:
    return [
        (t.k1.x, t.k1.y, t.k2.x, t.k2.y, t.k3.x, t.k3.y) for t in triads
    ]


def write_triads_csv(path: Path, triads: list[Triad]) -> None:
    write_csv(path, TRIAD_HEADER, triad_rows(triads))


def write_triads_json(path: Path, triads: list[Triad]) -> None:
    write_json(
        path,
        [
            {"k1": [t.k1.x, t.k1.y], "k2": [t.k2.x, t.k2.y], "k3": [t.k3.x, t.k3.y]}
            for t in triads
        ],
    )


def write_edges_text(path: Path, graph: TriadGraph) -> None:
    """Plain edge list: ``node_i node_j sharedX sharedY ROLE1ROLE2``."""
    lines = [
        f"{e.i} {e.j} {e.shared.x} {e.shared.y} {e.role_i}{e.role_j}"
        for e in graph.edges
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def write_edges_json(path: Path, graph: TriadGraph) -> None:
    write_json(
        path,
        {
            "nodes": [
                {"k1": [t.k1.x, t.k1.y], "k2": [t.k2.x, t.k2.y],
                 "k3": [t.k3.x, t.k3.y]}
                for t in graph.nodes
            ],
            "edges": [
                {"i": e.i, "j": e.j, "shared": [e.shared.x, e.shared.y],
                 "roles": e.role_i + e.role_j}
                for e in graph.edges
            ],
            "components": [list(c) for c in graph.components],
        },
    )


def write_stars_csv(path: Path, stars: list[NStar]) -> None:
    write_csv(
        path,
        ["centerX", "centerY", "N"],
        [(s.center.x, s.center.y, s.N) for s in stars],
    )


def write_components_csv(path: Path, summary: ComponentSummary) -> None:
    write_csv(
        path,
        ["component", "size", "pp", "ap", "aa", "vectors"],
        summary.rows(),
    )


def write_graph_summary_json(path: Path, summary: ComponentSummary) -> None:
    write_json(
        path,
        {
            "n_components": summary.n_components,
            "component_sizes": list(summary.sizes),
            "edge_types_total": dict(summary.total_edge_histogram),
            "total_vectors": summary.total_vectors,
        },
    )


def write_modes_csv(path: Path, modes: list[WaveVector]) -> None:
    write_csv(
        path,
        ["mode_index", "kx", "ky"],
        [(i, k.x, k.y) for i, k in enumerate(modes)],
    )


TIMESERIES_HEADER = ["tau", "mode_index", "mean_re", "mean_im", "mean_abs2", "var_abs2"]


def _timeseries_rows(stats: EnsembleStats):
    for c, tau in enumerate(stats.times):
        for m in range(len(stats.modes)):
            yield (
                float(tau), m,
                float(stats.mean_a[c, m].real), float(stats.mean_a[c, m].imag),
                float(stats.mean_abs2[c, m]), float(stats.var_abs2[c, m]),
            )


def write_timeseries_csv(path: Path, stats: EnsembleStats) -> None:
    write_csv(path, TIMESERIES_HEADER, _timeseries_rows(stats))


def write_timeseries_json(path: Path, stats: EnsembleStats) -> None:
    write_json(
        path,
        {
            "times": [float(t) for t in stats.times],
            "modes": [[k.x, k.y] for k in stats.modes],
            "mean_re": stats.mean_a.real.tolist(),
            "mean_im": stats.mean_a.imag.tolist(),
            "mean_abs2": stats.mean_abs2.tolist(),
            "var_abs2": stats.var_abs2.tolist(),
            "n_paths": stats.n_paths,
            "n_completed": stats.n_completed,
            "aborted": [[p, float(t)] for p, t in stats.aborted],
        },
    )


def write_spectrum_csv(path: Path, stats: EnsembleStats) -> None:
    rows = [
        (m, k.x, k.y, k.norm2, float(stats.spectrum[m]))
        for m, k in enumerate(stats.modes)
    ]
    write_csv(path, ["mode_index", "kx", "ky", "norm2", "mean_abs2"], rows)


AVERAGING_HEADER = ["nu", "max_dev", "l2_dev", "paths", "h_fast"]


def write_averaging_csv(path: Path, table: AveragingTable) -> None:
    write_csv(
        path,
        AVERAGING_HEADER,
        [(r.nu, r.max_dev, r.l2_dev, r.paths, r.h_fast) for r in table.rows],
    )


def write_averaging_json(path: Path, table: AveragingTable) -> None:
    write_json(
        path,
        {
            "case": table.case,
            "rows": [
                {"nu": r.nu, "max_dev": r.max_dev, "l2_dev": r.l2_dev,
                 "paths": r.paths, "h_fast": r.h_fast}
                for r in table.rows
            ],
            "per_mode_dev": {
                fmt(nu): table.per_mode[nu].tolist() for nu in table.per_mode
            },
            "modes": [[k.x, k.y] for k in table.modes],
        },
    )


def write_plotdata_csv(path: Path, rows) -> None:
    """Tidy long format: one (series, x, y) observation per line."""
    write_csv(path, ["series", "x", "y"], rows)
