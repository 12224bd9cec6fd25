"""Report files for the check command: a JSON summary and a PNG bar chart."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .suites import SuiteResult  # noqa: E402


def render_chart(result: SuiteResult, path: Path) -> Path:
    """Bar chart of the suite's labelled counts plus passed/failed totals."""
    labels = list(result.counts) + ["passed", "failed"]
    values = list(result.counts.values()) + [result.passed, result.failed]
    colors = ["#4c72b0"] * len(result.counts) + ["#55a868", "#c44e52"]
    fig, ax = plt.subplots(figsize=(max(5.0, 1.1 * len(labels)), 3.6))
    bars = ax.bar(range(len(labels)), values, color=colors)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.set_title(f"{result.suite}: {'ok' if result.ok else 'FAILED'}")
    for b, v in zip(bars, values):
        ax.annotate(str(v), (b.get_x() + b.get_width() / 2, b.get_height()), ha="center", va="bottom", fontsize=7)
    fig.tight_layout()
    # no Software/time stamps, so identical runs give identical bytes
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


def write_report(result: SuiteResult, outdir, config_text: str = "", bounds: dict | None = None) -> tuple[Path, Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"config": config_text, "bounds": dict(sorted((bounds or {}).items())), **result.to_json()}
    jpath = out / f"{result.suite}.json"
    jpath.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    ppath = render_chart(result, out / f"{result.suite}.png")
    return jpath, ppath
