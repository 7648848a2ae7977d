import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.metrics import accuracy_score, precision_recall_fscore_support
from sklearn.naive_bayes import MultinomialNB

from veilbreak.helpers import (Document, EvaluationError, ModelFormatError, PathLike, TrainingError,
                               atomic_write_text)
from veilbreak.settings import Config
from veilbreak.textnorm import word_tokens

logger = logging.getLogger(__name__)

MODEL_MAGIC = 'nbmodel'
MODEL_VERSION = 'v1'
# spam/ham models are written spam column first
SPAM_HAM_COLUMNS = ('spam', 'ham')


@dataclass(frozen=True)
class NaiveBayesModel:
    """
    Multinomial Naive Bayes over a fixed list of count features.

    `log_likelihood[c, k]` is log P(features[k] | classes[c]) with add-one smoothing.
    """
    features: Tuple[str, ...]
    classes: Tuple[str, ...]
    log_prior: np.ndarray
    log_likelihood: np.ndarray
    tie_class: str = Config.TIE_CLASS

    def class_index(self, label: str) -> int:
        try:
            return self.classes.index(label)
        except ValueError:
            raise KeyError(f"model has no class {label!r}")

    def log_ratio(self, target: str, reference: str) -> np.ndarray:
        """Per-feature log P(w|target) - log P(w|reference)"""
        return self.log_likelihood[self.class_index(target)] - self.log_likelihood[self.class_index(reference)]


@dataclass(frozen=True)
class ClassMetrics:
    label: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvaluationReport:
    accuracy: float
    per_class: Tuple[ClassMetrics, ...]

    @property
    def macro_precision(self) -> float:
        return float(np.mean([m.precision for m in self.per_class]))

    @property
    def macro_recall(self) -> float:
        return float(np.mean([m.recall for m in self.per_class]))

    @property
    def macro_f1(self) -> float:
        return float(np.mean([m.f1 for m in self.per_class]))


def _vectorizer(features: Sequence[str]) -> CountVectorizer:
    return CountVectorizer(analyzer=word_tokens, vocabulary=list(features))


def featurize(features: Sequence[str], doc: str) -> np.ndarray:
    """
    Count feature words in a document

    Args:
        features (list): Feature words, in model order
        doc (str): Raw text

    Returns:
        np.ndarray: Count vector of length len(features)
    """
    return featurize_many(features, [doc])[0]


def featurize_many(features: Sequence[str], docs: Sequence[str]) -> np.ndarray:
    if not features:
        return np.zeros((len(docs), 0), dtype=np.int64)
    return _vectorizer(features).transform(list(docs)).toarray()


def select_features(texts: Sequence[str], k: int) -> List[str]:
    """The k most frequent word tokens; ties resolved alphabetically"""
    counts: Counter = Counter()
    for text in texts:
        counts.update(word_tokens(text))
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [word for word, _ in ranked[:k]]


def train(corpus: Sequence[Document], k: int = Config.NB_FEATURES,
          tie_class: str = Config.TIE_CLASS) -> NaiveBayesModel:
    """
    Fit the victim classifier

    Args:
        corpus (list): Labeled documents
        k (int): Feature cap; the k most frequent training words are used
        tie_class (str): Class predicted when scores tie

    Returns:
        NaiveBayesModel: Trained model
    """
    labels = [doc.label for doc in corpus]
    if len(set(labels)) < 2:
        raise TrainingError("training needs documents of at least two classes")
    if k < 1:
        raise TrainingError("feature count must be positive")
    texts = [doc.text for doc in corpus]
    features = select_features(texts, k)
    if not features:
        raise TrainingError("training corpus has no word tokens")

    estimator = MultinomialNB(alpha=1.0)
    estimator.fit(featurize_many(features, texts), labels)
    logger.info(f"Trained Naive Bayes on {len(corpus)} documents with {len(features)} features")
    return NaiveBayesModel(
        features=tuple(features),
        classes=tuple(str(c) for c in estimator.classes_),
        log_prior=np.array(estimator.class_log_prior_, dtype=np.float64),
        log_likelihood=np.array(estimator.feature_log_prob_, dtype=np.float64),
        tie_class=tie_class,
    )


def _decide(model: NaiveBayesModel, scores: np.ndarray) -> str:
    best = scores.max()
    tied = [model.classes[i] for i in np.flatnonzero(scores == best)]
    if len(tied) > 1 and model.tie_class in tied:
        return model.tie_class
    return tied[0]


def class_scores(model: NaiveBayesModel, docs: Sequence[str]) -> np.ndarray:
    """Joint log-scores, one row per document and one column per class"""
    counts = featurize_many(model.features, docs)
    return model.log_prior + counts @ model.log_likelihood.T


def predict(model: NaiveBayesModel, doc: str) -> Tuple[str, Dict[str, float]]:
    """
    Classify one document

    Returns:
        tuple: (predicted class, class -> log-score)
    """
    scores = class_scores(model, [doc])[0]
    return _decide(model, scores), {label: float(s) for label, s in zip(model.classes, scores)}


def predict_many(model: NaiveBayesModel, docs: Sequence[str]) -> List[str]:
    if not docs:
        return []
    return [_decide(model, row) for row in class_scores(model, docs)]


def score_predictions(gold: Sequence[str], predicted: Sequence[str],
                      labels: Optional[Sequence[str]] = None) -> EvaluationReport:
    """
    Accuracy and per-class precision / recall / F1

    Args:
        gold (list): True labels
        predicted (list): Predicted labels
        labels (list): Classes to report; defaults to every label seen

    Returns:
        EvaluationReport: Metrics; F1 is 0 when precision + recall is 0
    """
    if not gold:
        raise EvaluationError("cannot evaluate an empty corpus")
    if len(gold) != len(predicted):
        raise EvaluationError("gold and predicted labels differ in length")
    labels = list(labels) if labels is not None else sorted(set(gold) | set(predicted))
    precision, recall, f1, support = precision_recall_fscore_support(
        gold, predicted, labels=labels, zero_division=0)
    per_class = tuple(
        ClassMetrics(label, float(p), float(r), float(f), int(s))
        for label, p, r, f, s in zip(labels, precision, recall, f1, support)
    )
    return EvaluationReport(float(accuracy_score(gold, predicted)), per_class)


def evaluate(model: NaiveBayesModel, corpus: Sequence[Document]) -> EvaluationReport:
    if not corpus:
        raise EvaluationError("cannot evaluate an empty corpus")
    predicted = predict_many(model, [doc.text for doc in corpus])
    gold = [doc.label for doc in corpus]
    labels = sorted(set(model.classes) | set(gold))
    return score_predictions(gold, predicted, labels)


def _column_order(classes: Sequence[str]) -> List[int]:
    if set(classes) == set(SPAM_HAM_COLUMNS) and len(classes) == 2:
        return [list(classes).index(label) for label in SPAM_HAM_COLUMNS]
    return list(range(len(classes)))


def save_model(model: NaiveBayesModel, path: PathLike) -> str:
    """
    Write the model in the versioned `nbmodel v1` text format

    Feature lines are `word<TAB>log_p_spam<TAB>log_p_ham` for a spam/ham
    model; the `classes` line names the columns for any other label set.
    """
    columns = _column_order(model.classes)
    lines = [
        f"{MODEL_MAGIC} {MODEL_VERSION} K={len(model.features)}",
        '\t'.join(['classes', *(model.classes[c] for c in columns)]),
        '\t'.join(['prior', *(repr(float(model.log_prior[c])) for c in columns)]),
        '\t'.join(['tie', model.tie_class]),
    ]
    for k, word in enumerate(model.features):
        values = (repr(float(model.log_likelihood[c, k])) for c in columns)
        lines.append('\t'.join([word, *values]))
    return atomic_write_text(path, '\n'.join(lines) + '\n')


def _fields(line: str, name: str, line_number: int) -> List[str]:
    parts = line.rstrip('\n').split('\t')
    if parts[0] != name or len(parts) < 2:
        raise ModelFormatError(f"expected a `{name}` line", line_number)
    return parts[1:]


def load_model(path: PathLike) -> NaiveBayesModel:
    with open(path, encoding='utf-8') as handle:
        lines = handle.read().split('\n')
    if lines and lines[-1] == '':
        lines.pop()
    if not lines:
        raise ModelFormatError("empty model file", 1)

    header = lines[0].split(' ')
    if len(header) != 3 or header[0] != MODEL_MAGIC or not header[2].startswith('K='):
        raise ModelFormatError("expected header `nbmodel v1 K=<int>`", 1)
    if header[1] != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {header[1]}", 1)
    try:
        k = int(header[2][2:])
    except ValueError:
        raise ModelFormatError("feature count is not an integer", 1)
    if len(lines) != 4 + k:
        raise ModelFormatError(f"expected {k} feature lines, found {len(lines) - 4}", len(lines))

    classes = _fields(lines[1], 'classes', 2)
    try:
        log_prior = np.array([float(x) for x in _fields(lines[2], 'prior', 3)])
    except ValueError:
        raise ModelFormatError("priors must be floats", 3)
    if len(log_prior) != len(classes):
        raise ModelFormatError("one prior per class expected", 3)
    tie_class = _fields(lines[3], 'tie', 4)[0]

    features: List[str] = []
    likelihood = np.zeros((len(classes), k))
    for offset, line in enumerate(lines[4:]):
        line_number = offset + 5
        parts = line.split('\t')
        if len(parts) != len(classes) + 1:
            raise ModelFormatError("expected word and one value per class", line_number)
        try:
            likelihood[:, offset] = [float(x) for x in parts[1:]]
        except ValueError:
            raise ModelFormatError("log-probabilities must be floats", line_number)
        features.append(parts[0])
    if len(set(features)) != len(features):
        raise ModelFormatError("duplicate feature words", None)
    if len(set(classes)) != len(classes):
        raise ModelFormatError("duplicate class names", 2)

    # columns follow the classes line; the model keeps classes sorted like training does
    order = sorted(range(len(classes)), key=lambda c: classes[c])
    return NaiveBayesModel(tuple(features), tuple(classes[c] for c in order),
                           log_prior[order], likelihood[order], tie_class)
