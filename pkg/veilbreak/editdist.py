import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple

from veilbreak.helpers import ContractViolation
from veilbreak.lexicon import Vocabulary
from veilbreak.settings import Config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CandidateSet:
    """
    Vocabulary words at the smallest edit distance from a misspelled token.

    `candidates` is ordered by descending frequency, then alphabetically.
    """
    source: str
    distance: int
    candidates: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        if not self.candidates:
            raise ContractViolation("a candidate set cannot be empty")
        if self.distance < 1:
            raise ContractViolation("candidate distance must be positive")

    @property
    def words(self) -> List[str]:
        return [word for word, _ in self.candidates]

    def frequency(self, word: str) -> int:
        return dict(self.candidates).get(word, 0)

    def most_frequent(self) -> str:
        return self.candidates[0][0]

    def __len__(self) -> int:
        return len(self.candidates)


def dl_distance(a: str, b: str, max_distance: Optional[int] = None) -> int:
    """
    Restricted Damerau-Levenshtein (optimal string alignment) distance

    Args:
        a (str): First string
        b (str): Second string
        max_distance (int): Optional bound; once exceeded, max_distance + 1 is returned

    Returns:
        int: Number of insertions, deletions, substitutions and adjacent
            transpositions, no substring edited twice
    """
    if a == b:
        return 0
    len_a, len_b = len(a), len(b)
    if max_distance is not None and abs(len_a - len_b) > max_distance:
        return max_distance + 1
    if not len_a:
        return len_b
    if not len_b:
        return len_a

    before: List[int] = []
    previous = list(range(len_b + 1))
    for i in range(1, len_a + 1):
        current = [i] + [0] * len_b
        char_a = a[i - 1]
        for j in range(1, len_b + 1):
            char_b = b[j - 1]
            value = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (char_a != char_b),
            )
            if i > 1 and j > 1 and char_a == b[j - 2] and a[i - 2] == char_b:
                value = min(value, before[j - 2] + 1)
            current[j] = value
        # row minima never decrease
        if max_distance is not None and min(current) > max_distance:
            return max_distance + 1
        before, previous = previous, current
    return previous[len_b]


def _deletions(word: str, depth: int) -> Set[str]:
    """All strings reachable from word by at most `depth` single-character deletions"""
    seen = {word}
    frontier = {word}
    for _ in range(depth):
        following = set()
        for item in frontier:
            for position in range(len(item)):
                shorter = item[:position] + item[position + 1:]
                if shorter not in seen:
                    seen.add(shorter)
                    following.add(shorter)
        frontier = following
    return seen


class CandidateIndex:
    """
    Symmetric-deletion index over a vocabulary.

    Every word is filed under each string obtained by deleting up to
    `max_radius` of its characters. Two strings within OSA distance d share a
    string reachable by at most d deletions from each side, so a query only
    has to look up its own deletion neighbourhood and verify the hits.
    """

    def __init__(self, vocab: Vocabulary, max_radius: int = Config.MAX_RADIUS):
        if max_radius < 1:
            raise ContractViolation("index radius must be at least 1")
        self.vocab = vocab
        self.max_radius = max_radius
        table: Dict[str, Set[str]] = defaultdict(set)
        for word in vocab:
            for variant in _deletions(word, max_radius):
                table[variant].add(word)
        self._table = {variant: frozenset(words) for variant, words in table.items()}
        logger.debug(f"Indexed {len(vocab)} words under {len(self._table)} deletion keys")

    def lookup(self, token: str, max_radius: int) -> Dict[str, int]:
        """Vocabulary words within max_radius of token, mapped to their distance"""
        if max_radius > self.max_radius:
            logger.warning(f"Radius {max_radius} exceeds index radius {self.max_radius}; scanning")
            return _scan(self.vocab, token, max_radius)
        hits: Set[str] = set()
        for variant in _deletions(token, max_radius):
            hits.update(self._table.get(variant, ()))
        return _within(token, hits, max_radius)


def _within(token: str, words: Iterable[str], max_radius: int) -> Dict[str, int]:
    found = {}
    for word in words:
        distance = dl_distance(token, word, max_radius)
        if 0 < distance <= max_radius:
            found[word] = distance
    return found


def _scan(vocab: Vocabulary, token: str, max_radius: int) -> Dict[str, int]:
    return _within(token, vocab, max_radius)


def build_candidate_index(vocab: Vocabulary, max_radius: int = Config.MAX_RADIUS) -> CandidateIndex:
    if not len(vocab):
        raise ContractViolation("cannot index an empty vocabulary")
    return CandidateIndex(vocab, max_radius)


def enumerate_candidates(vocab: Vocabulary,
                         token: str,
                         max_radius: int = Config.MAX_RADIUS,
                         index: Optional[CandidateIndex] = None) -> Optional[CandidateSet]:
    """
    Find the valid words closest to a misspelled token

    Args:
        vocab (Vocabulary): Valid words
        token (str): Out-of-vocabulary token
        max_radius (int): Largest edit distance searched
        index (CandidateIndex): Optional index; a linear scan is used without one

    Returns:
        CandidateSet: Words at the smallest distance found, or None when
            nothing lies within max_radius
    """
    if max_radius < 1:
        raise ContractViolation("max_radius must be at least 1")
    token = token.lower()
    if index is not None:
        found = index.lookup(token, max_radius)
    else:
        found = _scan(vocab, token, max_radius)
    if not found:
        return None
    best = min(found.values())
    ranked = sorted(
        ((word, vocab.frequency(word)) for word, distance in found.items() if distance == best),
        key=lambda item: (-item[1], item[0]),
    )
    return CandidateSet(source=token, distance=best, candidates=tuple(ranked))
