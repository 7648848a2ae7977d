import logging
import os
from typing import Mapping

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from veilbreak.helpers import PathLike, VeilbreakError, atomic_write_text  # noqa: E402
from veilbreak.spam_nb import EvaluationReport  # noqa: E402

logger = logging.getLogger(__name__)


def metrics_table(report: EvaluationReport) -> pd.DataFrame:
    """
    Per-class precision, recall and F1 with a macro-average row

    Args:
        report (EvaluationReport): Output of spam_nb.evaluate

    Returns:
        pd.DataFrame: One row per class plus `macro avg`, indexed by label
    """
    rows = [
        {'label': m.label, 'precision': m.precision, 'recall': m.recall, 'f1': m.f1, 'support': m.support}
        for m in report.per_class
    ]
    rows.append({
        'label': 'macro avg',
        'precision': report.macro_precision,
        'recall': report.macro_recall,
        'f1': report.macro_f1,
        'support': sum(m.support for m in report.per_class),
    })
    return pd.DataFrame(rows).set_index('label')


def accuracy_table(reports: Mapping[str, EvaluationReport]) -> pd.DataFrame:
    """One row per condition (e.g. clean, revised, corrected) with accuracy and macro F1"""
    return pd.DataFrame(
        [{'condition': name, 'accuracy': r.accuracy, 'macro_f1': r.macro_f1} for name, r in reports.items()]
    ).set_index('condition')


def write_table(table: pd.DataFrame, path: PathLike) -> str:
    return atomic_write_text(path, table.to_csv(sep='\t', float_format='%.6f'))


def save_accuracy_plot(table: pd.DataFrame, output_dir: str, filename: str = 'accuracy.png') -> str:
    """
    Bar chart of accuracy per condition

    Args:
        table (pd.DataFrame): Output of accuracy_table
        output_dir (str): Directory to save the chart in
        filename (str): Image file name

    Returns:
        str: Path to the saved chart
    """
    try:
        os.makedirs(output_dir, exist_ok=True)
        filepath = os.path.join(output_dir, filename)

        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.bar(table.index.astype(str), table['accuracy'], color='#4c72b0')
        ax.set_ylim(0, 1)
        ax.set_ylabel('accuracy')
        ax.set_title('Spam detection accuracy')
        for position, value in enumerate(table['accuracy']):
            ax.text(position, value + 0.02, f"{value:.2f}", ha='center')
        fig.tight_layout()
        fig.savefig(filepath, dpi=100)
        plt.close(fig)

        logger.info(f"Saved accuracy chart to {filepath}")
        return filepath

    except Exception as e:
        raise VeilbreakError(f"Failed to save accuracy chart: {str(e)}")
