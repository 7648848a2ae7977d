from dataclasses import dataclass
from typing import List

import pytest

from veilbreak import synthetic
from veilbreak.attacker import AttackLog, AttackSpec, KeywordTargets, attack_corpus, rank_sensitive_words_nb
from veilbreak.corrector import SpellingCorrector
from veilbreak.embeddings import EmbeddingTable, load_embeddings
from veilbreak.helpers import Document, bundled_path, read_corpus
from veilbreak.lexicon import Vocabulary, load_vocabulary
from veilbreak.spam_nb import NaiveBayesModel, train


@pytest.fixture
def toy_vocab() -> Vocabulary:
    return Vocabulary({
        'money': 500, 'honey': 40, 'stupid': 300, 'stud': 20, 'hate': 80, 'ate': 200,
        'the': 1000, 'and': 900, 'cost': 120, 'jobs': 60, 'tops': 90,
    })


@pytest.fixture(scope='session')
def fixture_vocab() -> Vocabulary:
    return load_vocabulary(bundled_path('table_vocab.tsv'))


@pytest.fixture(scope='session')
def fixture_table() -> EmbeddingTable:
    return load_embeddings(bundled_path('table_embeddings.txt'))


@pytest.fixture(scope='session')
def table_corrector(fixture_vocab, fixture_table) -> SpellingCorrector:
    return SpellingCorrector(fixture_vocab, fixture_table)


@pytest.fixture(scope='session')
def table_revised() -> List[Document]:
    return read_corpus(bundled_path('table_revised.tsv'))


@pytest.fixture(scope='session')
def table_expected() -> List[Document]:
    return read_corpus(bundled_path('table_corrected.tsv'))


@dataclass
class SpamExperiment:
    vocab: Vocabulary
    table: EmbeddingTable
    model: NaiveBayesModel
    train_docs: List[Document]
    test_docs: List[Document]
    targets: List[str]
    revised: List[Document]
    log: AttackLog


@pytest.fixture(scope='session')
def spam_experiment() -> SpamExperiment:
    seed = 7
    documents = synthetic.make_corpus(300, seed=seed)
    train_docs, test_docs = synthetic.split_corpus(documents)
    vocab = synthetic.oracle_vocabulary(documents)
    model = train(train_docs)
    targets = rank_sensitive_words_nb(model, 10)
    revised, log = attack_corpus(
        test_docs, KeywordTargets(frozenset(targets)), AttackSpec(rng_seed=seed), vocab, ['spam'])
    return SpamExperiment(vocab, synthetic.topic_embeddings(seed), model, train_docs, test_docs,
                          targets, revised, log)
