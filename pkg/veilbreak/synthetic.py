"""
Seeded desk-scale data: a two-class spam/ham corpus with planted
indicative words and topic-clustered embeddings to go with it.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from veilbreak.embeddings import EmbeddingTable
from veilbreak.helpers import Document
from veilbreak.lexicon import Vocabulary
from veilbreak.textnorm import word_tokens

logger = logging.getLogger(__name__)

SPAM_KEYWORDS = ('money', 'cash', 'offer', 'free', 'loan', 'prize', 'bonus', 'winner', 'credit', 'cheap')
# one edit away from a spam keyword: money/honey, cash/case, prize/price, free/tree, winner/dinner
HAM_KEYWORDS = ('meeting', 'report', 'dinner', 'case', 'meal', 'price', 'honey', 'project', 'review', 'tree')
BUSINESS = ('account', 'bank', 'order', 'payment', 'company', 'market', 'service', 'customer', 'business', 'invoice')
FILLER = (
    'about', 'after', 'again', 'always', 'around', 'before', 'today', 'tomorrow', 'people', 'think',
    'could', 'would', 'every', 'little', 'great', 'world', 'place', 'thing', 'still', 'never',
    'where', 'while', 'there', 'those', 'these', 'because', 'during', 'without', 'through', 'between',
)

# share of keyword / business / filler slots per class
MIXTURE = {
    'spam': (0.40, 0.20, 0.40),
    'ham': (0.35, 0.20, 0.45),
}
EMBEDDING_DIMENSION = 50
CLUSTER_SPREAD = 0.4


@dataclass(frozen=True)
class TopicWords:
    """Class-specific keywords planted in the generated documents"""
    spam: Tuple[str, ...]
    ham: Tuple[str, ...]

    def keywords(self, label: str) -> Tuple[str, ...]:
        return self.spam if label == 'spam' else self.ham


PLANTED = TopicWords(SPAM_KEYWORDS, HAM_KEYWORDS)

# every spam keyword has two ham neighbours one substitution away, at different positions
DECOY_DENSE = TopicWords(
    spam=('cash', 'loan', 'free', 'deal', 'sale'),
    ham=('bash', 'case', 'moan', 'load', 'tree', 'fret', 'meal', 'dean', 'tale', 'sole'),
)


def all_words(topics: TopicWords = PLANTED) -> List[str]:
    return list(topics.spam + topics.ham + BUSINESS + FILLER)


def _sentence(label: str, rng: np.random.Generator, topics: TopicWords) -> str:
    pools = (topics.keywords(label), BUSINESS, FILLER)
    length = int(rng.integers(8, 11))
    picks = rng.choice(3, size=length, p=MIXTURE[label])
    words = [pools[pick][rng.integers(len(pools[pick]))] for pick in picks]
    return ' '.join(words) + ' .'


def make_corpus(n_docs: int = 300, spam_fraction: float = 0.4, seed: int = 0,
                topics: TopicWords = PLANTED) -> List[Document]:
    """
    Generate a labeled corpus

    Args:
        n_docs (int): Number of documents
        spam_fraction (float): Share of spam documents, rounded to a whole count
        seed (int): Random seed
        topics (TopicWords): Keywords planted in each class

    Returns:
        list: Documents of two or three sentences each, labels shuffled
    """
    rng = np.random.default_rng(seed)
    n_spam = int(round(n_docs * spam_fraction))
    labels = np.array(['spam'] * n_spam + ['ham'] * (n_docs - n_spam))
    rng.shuffle(labels)
    documents = []
    for doc_id, label in enumerate(labels):
        sentences = [_sentence(str(label), rng, topics) for _ in range(int(rng.integers(2, 4)))]
        documents.append(Document(doc_id, str(label), ' '.join(sentences)))
    logger.info(f"Generated {n_docs} synthetic documents ({n_spam} spam)")
    return documents


def split_corpus(corpus: Sequence[Document], train_fraction: float = 2 / 3) -> Tuple[List[Document], List[Document]]:
    """Split in document order"""
    cut = int(round(len(corpus) * train_fraction))
    return list(corpus[:cut]), list(corpus[cut:])


def oracle_vocabulary(corpus: Sequence[Document], topics: TopicWords = PLANTED) -> Vocabulary:
    """Every generator word, counted over the corpus"""
    counts: Counter = Counter({word: 1 for word in all_words(topics)})
    for doc in corpus:
        counts.update(word_tokens(doc.text))
    return Vocabulary.from_counts(counts)


def _unit(vector: np.ndarray) -> np.ndarray:
    return vector / np.linalg.norm(vector)


def topic_embeddings(seed: int = 0, dimension: int = EMBEDDING_DIMENSION,
                     topics: TopicWords = PLANTED) -> EmbeddingTable:
    """
    Unit vectors clustered by topic

    Spam keywords and business words sit around one center and ham keywords
    around an orthogonal one; filler words point in random directions.
    """
    rng = np.random.default_rng(seed)
    spam_center = _unit(rng.standard_normal(dimension))
    ham_center = rng.standard_normal(dimension)
    ham_center = _unit(ham_center - (ham_center @ spam_center) * spam_center)

    def around(center: np.ndarray) -> np.ndarray:
        return _unit(center + CLUSTER_SPREAD * rng.standard_normal(dimension) / np.sqrt(dimension))

    vectors: Dict[str, np.ndarray] = {}
    for word in topics.spam + BUSINESS:
        vectors[word] = around(spam_center)
    for word in topics.ham:
        vectors[word] = around(ham_center)
    for word in FILLER:
        vectors[word] = _unit(rng.standard_normal(dimension))
    return EmbeddingTable.from_vectors(vectors)
