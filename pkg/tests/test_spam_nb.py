import math

import numpy as np
import pytest

from veilbreak.helpers import Document, EvaluationError, ModelFormatError, TrainingError
from veilbreak.spam_nb import (evaluate, featurize, load_model, predict, predict_many, save_model,
                               score_predictions, select_features, train)


def docs(*pairs):
    return [Document(i, label, text) for i, (label, text) in enumerate(pairs)]


@pytest.fixture
def toy_corpus():
    return docs(
        ('spam', 'money money cost'),
        ('spam', 'money offer'),
        ('ham', 'meeting cost'),
        ('ham', 'meeting report'),
    )


@pytest.fixture
def toy_model(toy_corpus):
    return train(toy_corpus)


def test_featurize_counts_feature_words():
    np.testing.assert_array_equal(featurize(['money', 'cost'], 'money money cost'), [2, 1])
    np.testing.assert_array_equal(featurize(['money', 'cost'], 'nothing here'), [0, 0])


def test_misspelling_removes_a_feature_count():
    features = ['money', 'cost']
    original = 'it really be a great opportunity to make relatively easy money, with little cost to you.'
    revised = 'it really be a grfat opportunity to make relatively easy fmoney, with little cosgt to you.'
    assert featurize(features, original)[0] - featurize(features, revised)[0] == 1


def test_features_by_frequency_then_alphabet():
    assert select_features(['money money cost', 'money offer', 'meeting cost', 'meeting report'], 3) == [
        'money', 'cost', 'meeting']


def test_hand_computed_likelihoods(toy_model):
    assert toy_model.features == ('money', 'cost', 'meeting', 'offer', 'report')
    assert toy_model.classes == ('ham', 'spam')
    spam = toy_model.log_likelihood[toy_model.class_index('spam')]
    ham = toy_model.log_likelihood[toy_model.class_index('ham')]
    np.testing.assert_allclose(np.exp(spam), [0.4, 0.2, 0.1, 0.2, 0.1])
    np.testing.assert_allclose(np.exp(ham), [1 / 9, 2 / 9, 3 / 9, 1 / 9, 2 / 9])
    np.testing.assert_allclose(toy_model.log_prior, [math.log(0.5), math.log(0.5)])


def test_likelihoods_normalize(toy_model):
    for row in toy_model.log_likelihood:
        assert abs(np.exp(row).sum() - 1) <= 1e-9


def test_feature_cap_larger_than_vocabulary(toy_corpus):
    assert len(train(toy_corpus, k=2500).features) == 5
    assert train(toy_corpus, k=2).features == ('money', 'cost')


def test_single_class_cannot_train():
    with pytest.raises(TrainingError):
        train(docs(('spam', 'money'), ('spam', 'cash')))


def test_predict_hand_computed_posterior(toy_model):
    label, scores = predict(toy_model, 'money offer report')
    assert label == 'spam'
    expected_spam = math.log(0.5) + math.log(0.4) + math.log(0.2) + math.log(0.1)
    expected_ham = math.log(0.5) + math.log(1 / 9) + math.log(1 / 9) + math.log(2 / 9)
    assert scores['spam'] == pytest.approx(expected_spam)
    assert scores['ham'] == pytest.approx(expected_ham)


def test_unknown_words_are_ignored(toy_model):
    assert predict(toy_model, 'fmoney moeny')[1] == predict(toy_model, '')[1]


def test_empty_document_ties_go_to_ham(toy_model):
    assert predict(toy_model, '')[0] == 'ham'


def test_empty_document_follows_larger_prior():
    model = train(docs(('spam', 'money'), ('spam', 'cash'), ('spam', 'loan'), ('ham', 'meeting')))
    assert predict(model, '')[0] == 'spam'


def test_word_order_does_not_matter(toy_model):
    assert predict(toy_model, 'cost money meeting') == predict(toy_model, 'meeting money cost')


def test_removing_indicative_word_lowers_spam_odds(toy_model):
    def odds(text):
        scores = predict(toy_model, text)[1]
        return scores['spam'] - scores['ham']

    assert odds('money offer meeting') < odds('money money offer meeting')


def test_predict_many_matches_predict(toy_model):
    texts = ['money', 'meeting', '', 'cost offer']
    assert predict_many(toy_model, texts) == [predict(toy_model, t)[0] for t in texts]


def test_all_correct():
    report = score_predictions(['spam', 'ham', 'ham'], ['spam', 'ham', 'ham'])
    assert report.accuracy == 1.0
    assert all(m.f1 == 1.0 for m in report.per_class)


def test_confusion_matrix_metrics():
    gold = ['ham'] * 10 + ['spam'] * 10
    predicted = ['ham'] * 5 + ['spam'] * 15
    report = score_predictions(gold, predicted, ['ham', 'spam'])
    ham = report.per_class[0]
    assert (ham.precision, ham.recall) == (1.0, 0.5)
    assert ham.f1 == pytest.approx(2 / 3)
    assert report.accuracy == 0.75


def test_single_class_predictions_penalize_macro_f1():
    report = score_predictions(['ham'] * 5 + ['spam'] * 5, ['spam'] * 10, ['ham', 'spam'])
    assert report.accuracy == 0.5
    assert report.per_class[0].f1 == 0.0
    assert report.macro_f1 < report.accuracy


def test_macro_average_is_unweighted_mean():
    gold = ['racism', 'sexism', 'neither', 'neither', 'neither', 'sexism']
    predicted = ['racism', 'neither', 'neither', 'sexism', 'neither', 'sexism']
    report = score_predictions(gold, predicted)
    assert report.macro_f1 == pytest.approx(np.mean([m.f1 for m in report.per_class]))
    assert report.macro_precision == pytest.approx(np.mean([m.precision for m in report.per_class]))
    assert [m.label for m in report.per_class] == ['neither', 'racism', 'sexism']


def test_empty_evaluation(toy_model):
    with pytest.raises(EvaluationError):
        evaluate(toy_model, [])


def test_evaluate_training_corpus(toy_model, toy_corpus):
    assert evaluate(toy_model, toy_corpus).accuracy == 1.0


def test_model_round_trip(tmp_path, toy_model):
    path = save_model(toy_model, tmp_path / 'model.txt')
    assert open(path, encoding='utf-8').readline() == 'nbmodel v1 K=5\n'
    loaded = load_model(path)
    assert loaded.features == toy_model.features
    np.testing.assert_array_equal(loaded.log_likelihood, toy_model.log_likelihood)
    for text in ['money', 'meeting report', '', 'cost cost offer']:
        assert predict(loaded, text) == predict(toy_model, text)


def test_saved_columns_are_spam_then_ham(tmp_path, toy_model):
    lines = open(save_model(toy_model, tmp_path / 'model.txt'), encoding='utf-8').read().splitlines()
    assert lines[1] == 'classes\tspam\tham'
    spam, ham = toy_model.class_index('spam'), toy_model.class_index('ham')
    assert lines[2].split('\t')[1:] == [repr(float(toy_model.log_prior[spam])), repr(float(toy_model.log_prior[ham]))]
    word, log_p_spam, log_p_ham = lines[4].split('\t')
    k = toy_model.features.index(word)
    assert float(log_p_spam) == toy_model.log_likelihood[spam, k]
    assert float(log_p_ham) == toy_model.log_likelihood[ham, k]


def test_columns_are_read_by_the_classes_line(tmp_path):
    path = tmp_path / 'model.txt'
    path.write_text('nbmodel v1 K=1\nclasses\tspam\tham\nprior\t-0.5\t-1.5\ntie\tham\nmoney\t-0.1\t-3.0\n',
                    encoding='utf-8')
    model = load_model(path)
    assert model.classes == ('ham', 'spam')
    assert model.log_prior.tolist() == [-1.5, -0.5]
    assert model.log_likelihood[:, 0].tolist() == [-3.0, -0.1]
    assert predict(model, 'money')[0] == 'spam'


def test_other_label_sets_keep_their_order(tmp_path):
    model = train(docs(('racism', 'idiot people'), ('sexism', 'women kitchen'), ('neither', 'good morning')))
    lines = open(save_model(model, tmp_path / 'model.txt'), encoding='utf-8').read().splitlines()
    assert lines[1] == 'classes\tneither\tracism\tsexism'
    assert load_model(tmp_path / 'model.txt').classes == model.classes


def test_model_round_trip_on_synthetic_corpus(tmp_path, spam_experiment):
    loaded = load_model(save_model(spam_experiment.model, tmp_path / 'model.txt'))
    texts = [doc.text for doc in spam_experiment.test_docs]
    assert predict_many(loaded, texts) == predict_many(spam_experiment.model, texts)


@pytest.mark.parametrize('content, line', [
    ('nbmodel v2 K=1\nclasses\tham\tspam\nprior\t-0.6\t-0.6\ntie\tham\nmoney\t-1\t-2\n', 1),
    ('nbmodel v1 K=1\nclasses\tham\tspam\nprior\t-0.6\tx\ntie\tham\nmoney\t-1\t-2\n', 3),
    ('nbmodel v1 K=1\nclasses\tham\tspam\nprior\t-0.6\t-0.6\ntie\tham\nmoney\t-1\n', 5),
    ('nbmodel v1 K=2\nclasses\tham\tspam\nprior\t-0.6\t-0.6\ntie\tham\nmoney\t-1\t-2\n', 5),
])
def test_malformed_model(tmp_path, content, line):
    path = tmp_path / 'model.txt'
    path.write_text(content, encoding='utf-8')
    with pytest.raises(ModelFormatError) as excinfo:
        load_model(path)
    assert excinfo.value.line_number == line
