import logging
from collections import Counter
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, Optional

from veilbreak.helpers import PathLike, VocabularyFormatError, atomic_write_text, bundled_path
from veilbreak.textnorm import is_placeholder, word_tokens

logger = logging.getLogger(__name__)

FUNCTION_WORDS_FILE = 'function_words.txt'


class Vocabulary:
    """
    The set of valid words with their corpus frequencies.

    Words are stored lowercased; lookups lowercase the query first. Instances
    are read-only once built.
    """

    def __init__(self, entries: Mapping[str, int], min_frequency: int = 1):
        merged: Dict[str, int] = {}
        for word, count in entries.items():
            word = word.lower()
            if not word or any(ch.isspace() for ch in word):
                raise ValueError(f"invalid vocabulary word: {word!r}")
            merged[word] = merged.get(word, 0) + int(count)
        self._entries = MappingProxyType(
            {word: count for word, count in merged.items() if count >= min_frequency}
        )
        self.min_frequency = min_frequency

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], min_frequency: int = 1) -> 'Vocabulary':
        """Build from a Counter-like mapping; words counted zero or less are dropped"""
        return cls({word: count for word, count in counts.items() if count > 0}, min_frequency)

    @classmethod
    def from_corpus(cls, texts: Iterable[str], min_frequency: int = 1) -> 'Vocabulary':
        """Vocabulary of the word tokens of a corpus"""
        counts: Counter = Counter()
        for text in texts:
            counts.update(word_tokens(text))
        return cls.from_counts(counts, min_frequency)

    @property
    def entries(self) -> Mapping[str, int]:
        return self._entries

    def frequency(self, word: str) -> int:
        return self._entries.get(word.lower(), 0)

    def __contains__(self, word: object) -> bool:
        return isinstance(word, str) and word.lower() in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and dict(self._entries) == dict(other._entries)

    def __repr__(self) -> str:
        return f"Vocabulary({len(self)} words, min_frequency={self.min_frequency})"


@dataclass(frozen=True)
class FunctionWordList:
    words: frozenset

    def __post_init__(self):
        if not self.words:
            raise ValueError("function-word list must not be empty")
        if any(word != word.lower() for word in self.words):
            raise ValueError("function words must be lowercase")

    def __contains__(self, word: object) -> bool:
        return isinstance(word, str) and word.lower() in self.words


def load_vocabulary(path: PathLike, min_frequency: int = 1) -> Vocabulary:
    """
    Load a `word<TAB>count` frequency list

    Args:
        path (str): UTF-8 file, one entry per line
        min_frequency (int): Entries below this count are dropped after merging

    Returns:
        Vocabulary: Lowercased words; duplicate lines are summed
    """
    counts: Counter = Counter()
    with open(path, encoding='utf-8') as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip('\n')
            if not line:
                continue
            parts = line.split('\t')
            if len(parts) != 2 or not parts[0] or any(ch.isspace() for ch in parts[0]):
                raise VocabularyFormatError("expected word<TAB>count", line_number)
            word, raw_count = parts
            try:
                count = int(raw_count)
            except ValueError:
                raise VocabularyFormatError(f"count is not an integer: {raw_count!r}", line_number)
            if count < 0:
                raise VocabularyFormatError(f"negative count: {count}", line_number)
            counts[word.lower()] += count
    vocab = Vocabulary(counts, min_frequency)
    logger.info(f"Loaded {len(vocab)} vocabulary words from {path}")
    return vocab


def save_vocabulary(vocab: Vocabulary, path: PathLike) -> str:
    """Write the vocabulary sorted by word"""
    lines = ''.join(f"{word}\t{vocab.frequency(word)}\n" for word in sorted(vocab))
    return atomic_write_text(path, lines)


def augment_from_corpus(vocab: Vocabulary, corpus: Iterable[str], min_frequency: int) -> Vocabulary:
    """
    Add frequent corpus words (slang, domain terms) to a vocabulary

    Args:
        vocab (Vocabulary): Base vocabulary, e.g. a standard dictionary
        corpus (iterable): Document texts
        min_frequency (int): Corpus count a word needs to be added

    Returns:
        Vocabulary: New vocabulary; shared words keep the larger count
    """
    if min_frequency < 1:
        raise ValueError("min_frequency must be at least 1")
    counts = Vocabulary.from_corpus(corpus).entries
    merged = dict(vocab.entries)
    for word, count in counts.items():
        if count >= min_frequency:
            merged[word] = max(merged.get(word, 0), count)
    return Vocabulary(merged, min(vocab.min_frequency, min_frequency))


def is_valid(vocab: Vocabulary, token: str) -> bool:
    """True when the token is not a misspelling"""
    if is_placeholder(token):
        return True
    if not any(ch.isalpha() for ch in token):
        return True
    return token.lower() in vocab


def is_sensitive_eligible(vocab: Vocabulary, fwl: FunctionWordList, word: str, min_count: int) -> bool:
    """Whether a word may be chosen as an attack target"""
    return (
        len(word) > 2
        and vocab.frequency(word) >= min_count
        and word not in fwl
    )


def load_function_words(path: Optional[PathLike] = None) -> FunctionWordList:
    """Read a function-word list, one word per line; the bundled list by default"""
    path = path or bundled_path(FUNCTION_WORDS_FILE)
    with open(path, encoding='utf-8') as handle:
        words = frozenset(
            line.strip().lower()
            for line in handle
            if line.strip() and not line.startswith('#')
        )
    return FunctionWordList(words)
