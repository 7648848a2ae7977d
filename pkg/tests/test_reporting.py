import os

import pytest

from veilbreak.reporting import accuracy_table, metrics_table, save_accuracy_plot, write_table
from veilbreak.spam_nb import score_predictions


@pytest.fixture
def reports():
    gold = ['ham'] * 4 + ['spam'] * 4
    return {
        'clean': score_predictions(gold, gold),
        'revised': score_predictions(gold, ['ham'] * 8, ['ham', 'spam']),
    }


def test_metrics_table_has_macro_row(reports):
    table = metrics_table(reports['revised'])
    assert list(table.index) == ['ham', 'spam', 'macro avg']
    assert table.loc['spam', 'recall'] == 0.0
    assert table.loc['macro avg', 'f1'] == pytest.approx(reports['revised'].macro_f1)
    assert table.loc['macro avg', 'support'] == 8


def test_accuracy_table(reports, tmp_path):
    table = accuracy_table(reports)
    assert list(table.index) == ['clean', 'revised']
    assert list(table['accuracy']) == [1.0, 0.5]
    path = write_table(table, tmp_path / 'accuracy.tsv')
    lines = open(path, encoding='utf-8').read().splitlines()
    assert lines[0] == 'condition\taccuracy\tmacro_f1'
    assert lines[1].startswith('clean\t1.000000')


def test_accuracy_plot(reports, tmp_path):
    path = save_accuracy_plot(accuracy_table(reports), str(tmp_path / 'plots'))
    assert os.path.getsize(path) > 0
    assert path.endswith('accuracy.png')
