"""
PrivAR Privacy Pipeline
Report Module

Writes evaluation reports: per-item rows as CSV and Markdown summary tables
(classification metrics per method, CER and PLR per protection mode).
Output is deterministic for identical inputs.

Author: PrivAR Team
License: MIT
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd

from .harness import EvaluationReport

logger = logging.getLogger(__name__)

ITEM_COLUMNS = [
    'method', 'mode', 'id', 'label', 'scene', 'predicted', 'correct',
    'n_boxes', 'mask_fraction', 'cer', 'leak_counted', 'leaked', 'error',
]


def items_frame(reports: Sequence[EvaluationReport]) -> pd.DataFrame:
    """Per-item rows of every report, ordered by method, mode and id."""
    records = []
    for report in reports:
        for row in report.rows:
            records.append({
                'method': report.method,
                'mode': report.mode.value,
                'id': row.id,
                'label': row.label,
                'scene': row.scene,
                'predicted': row.predicted,
                'correct': row.correct,
                'n_boxes': row.n_boxes,
                'mask_fraction': row.mask_fraction,
                'cer': row.cer,
                'leak_counted': row.leak_counted,
                'leaked': row.leaked,
                'error': row.error,
            })
    frame = pd.DataFrame.from_records(records, columns=ITEM_COLUMNS)
    return frame.sort_values(['method', 'mode', 'id'], kind='mergesort').reset_index(drop=True)


def _pct(value: Optional[float]) -> str:
    return 'n/a' if value is None else f"{value:.2f}"


def summary_markdown(reports: Sequence[EvaluationReport]) -> str:
    """Markdown summary: detection table, protection table and failures."""
    ordered = sorted(reports, key=lambda r: (r.method, r.mode.value))
    lines: List[str] = ['# PrivAR evaluation summary', '']

    lines += [
        '## Privacy risk detection',
        '',
        '| Method | Mode | Items | TP | FP | TN | FN | Acc. (%) | Prec. (%) | Rec. (%) | F1 (%) | Flags |',
        '|---|---|---|---|---|---|---|---|---|---|---|---|',
    ]
    for report in ordered:
        c, m = report.confusion, report.metrics
        counts = [str(v) for v in (c.tp, c.fp, c.tn, c.fn)] if c else ['-'] * 4
        scores = [_pct(v) for v in (m.accuracy, m.precision, m.recall, m.f1)] if m else ['n/a'] * 4
        flags = 'degenerate' if m is not None and m.degenerate else ''
        lines.append(
            f"| {report.method} | {report.mode.value} | {len(report.rows)} | "
            + ' | '.join(counts + scores) + f" | {flags} |"
        )
    lines.append('')

    lines += [
        '## Privacy preservation',
        '',
        '| Method | Protection mode | CER source | CER (%) | CER items | PLR (%) | PLR pairs | Mean mask area (%) |',
        '|---|---|---|---|---|---|---|---|',
    ]
    for report in ordered:
        if report.cer_mean is not None:
            cer_text = f"{100 * report.cer_mean:.2f} ± {100 * report.cer_std:.2f}"
        else:
            cer_text = 'n/a'
        masks = [row.mask_fraction for row in report.rows if row.error is None]
        mask_text = f"{100 * sum(masks) / len(masks):.2f}" if masks else 'n/a'
        lines.append(
            f"| {report.method} | {report.mode.value} | {report.cer_source or '-'} | {cer_text} | "
            f"{report.cer_count} | {_pct(report.plr)} | {report.plr_pairs} | {mask_text} |"
        )
    lines.append('')

    failures = [(r, row) for r in ordered for row in r.errors]
    lines += ['## Failed items', '']
    if failures:
        for report, row in failures:
            lines.append(f"- {report.method}/{report.mode.value} {row.id}: {row.error}")
    else:
        lines.append('None.')
    lines.append('')
    return '\n'.join(lines)


def write_report(
    reports: Sequence[EvaluationReport], out_dir: Union[str, Path]
) -> List[Path]:
    """
    Write items.csv and summary.md.

    Args:
        reports: One report per (method, mode) run
        out_dir: Output directory, created when missing

    Returns:
        Paths written
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    items_path = out_dir / 'items.csv'
    items_frame(reports).to_csv(items_path, index=False, float_format='%.6f', lineterminator='\n')

    summary_path = out_dir / 'summary.md'
    with open(summary_path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(summary_markdown(reports))

    logger.info(f"Wrote report for {len(reports)} runs to {out_dir}")
    return [items_path, summary_path]
