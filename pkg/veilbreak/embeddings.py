import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from veilbreak.editdist import CandidateSet
from veilbreak.helpers import (ContractViolation, EmbeddingFormatError, MissingEmbeddingError,
                               PathLike, atomic_write_text)
from veilbreak.settings import Config

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12


class EmbeddingTable:
    """
    Read-only word -> vector map backed by one float64 matrix.
    """

    def __init__(self, words: Sequence[str], matrix: np.ndarray):
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValueError("matrix must have one row per word")
        if matrix.shape[1] < 1:
            raise ValueError("embedding dimension must be positive")
        if len(words) and not np.all(np.linalg.norm(matrix, axis=1) > 0):
            raise ValueError("zero vectors are not allowed")
        matrix.setflags(write=False)
        self._matrix = matrix
        self._index = {word: row for row, word in enumerate(words)}
        if len(self._index) != len(words):
            raise ValueError("duplicate words in embedding table")
        self.dimension = matrix.shape[1]

    @classmethod
    def from_vectors(cls, vectors: Mapping[str, Iterable[float]]) -> 'EmbeddingTable':
        words = list(vectors)
        return cls(words, np.array([np.asarray(list(vectors[w]), dtype=np.float64) for w in words]))

    @property
    def words(self) -> List[str]:
        return list(self._index)

    def vector(self, word: str) -> np.ndarray:
        try:
            return self._matrix[self._index[word]]
        except KeyError:
            raise MissingEmbeddingError(f"no embedding for {word!r}")

    def __contains__(self, word: object) -> bool:
        return word in self._index

    def __len__(self) -> int:
        return len(self._index)


def load_embeddings(path: PathLike) -> EmbeddingTable:
    """
    Load vectors in word2vec text format

    Args:
        path (str): File whose first line is `N D`, followed by `word v1 ... vD` rows

    Returns:
        EmbeddingTable: Lowercased words; the first row wins on collisions and
            all-zero rows are skipped
    """
    words: List[str] = []
    rows: List[np.ndarray] = []
    seen = set()
    with open(path, encoding='utf-8') as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise EmbeddingFormatError("header must be `N D`", 1)
        try:
            expected, dimension = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingFormatError("header counts must be integers", 1)
        if dimension < 1:
            raise EmbeddingFormatError("dimension must be positive", 1)

        for line_number, line in enumerate(handle, start=2):
            parts = line.rstrip('\n').rstrip(' ').split(' ')
            if parts == ['']:
                continue
            if len(parts) != dimension + 1:
                raise EmbeddingFormatError(
                    f"expected {dimension} values, found {len(parts) - 1}", line_number)
            word = parts[0].lower()
            try:
                vector = np.array(parts[1:], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError("values must be decimal floats", line_number)
            if not np.any(vector):
                logger.warning(f"Skipping zero vector for {word!r} at line {line_number}")
                continue
            if word in seen:
                continue
            seen.add(word)
            words.append(word)
            rows.append(vector)

    if len(words) != expected:
        logger.warning(f"Header announces {expected} vectors, loaded {len(words)}")
    matrix = np.vstack(rows) if rows else np.zeros((0, dimension))
    return EmbeddingTable(words, matrix)


def save_embeddings(table: EmbeddingTable, path: PathLike) -> str:
    lines = [f"{len(table)} {table.dimension}\n"]
    for word in table.words:
        values = ' '.join(repr(float(x)) for x in table.vector(word))
        lines.append(f"{word} {values}\n")
    return atomic_write_text(path, ''.join(lines))


@dataclass(frozen=True)
class ContextWindow:
    """
    Words around a misspelled token.

    `left` is ordered with the nearest word last, `right` with the nearest
    word first. A None slot keeps its position but never joins the span.
    """
    center: str
    left: Tuple[Optional[str], ...]
    right: Tuple[Optional[str], ...]
    P: int = Config.WINDOW_P

    def __post_init__(self):
        if self.P < 1:
            raise ContractViolation("window size P must be at least 1")
        if len(self.left) > self.P or len(self.right) > self.P:
            raise ContractViolation("context lists cannot be longer than P")

    @classmethod
    def around(cls, words: Sequence[Optional[str]], position: int, P: int = Config.WINDOW_P,
               center: Optional[str] = None) -> 'ContextWindow':
        """Window of up to P slots either side of words[position]"""
        return cls(
            center=center if center is not None else (words[position] or ''),
            left=tuple(words[max(0, position - P):position]),
            right=tuple(words[position + 1:position + 1 + P]),
            P=P,
        )

    def context_words(self, p: int) -> List[str]:
        nearby = list(self.left[max(0, len(self.left) - p):]) + list(self.right[:p])
        return [word for word in nearby if word is not None]


@dataclass(frozen=True)
class ScoredCandidate:
    word: str
    weighted_distance: float
    per_window: Tuple[Tuple[int, float], ...] = field(default_factory=tuple)


def _context_matrix(table: EmbeddingTable, window: ContextWindow, p: int) -> np.ndarray:
    vectors = [table.vector(word) for word in window.context_words(p) if word in table]
    if not vectors:
        return np.zeros((table.dimension, 0))
    return np.column_stack(vectors)


def project_residual(context: np.ndarray, target: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Least-squares fit of target by the columns of context

    Args:
        context (np.ndarray): D x k matrix of context vectors
        target (np.ndarray): Vector of length D

    Returns:
        tuple: (coefficients, residual) with residual = context @ coefficients - target
    """
    k = context.shape[1]
    if k == 0:
        return np.zeros(0), -target
    gram = context.T @ context
    rhs = context.T @ target
    if np.linalg.matrix_rank(context) < k:
        # collinear context: ridge keeps the solve unique
        ridge = Config.RIDGE_SCALE * np.trace(gram) / k
        gram = gram + ridge * np.eye(k)
    coefficients = np.linalg.solve(gram, rhs)
    return coefficients, context @ coefficients - target


def window_distance(table: EmbeddingTable, candidate: str, window: ContextWindow, p: int) -> float:
    """
    Normalized distance from a candidate embedding to the span of its context

    Args:
        table (EmbeddingTable): Embeddings
        candidate (str): Candidate correction, must have an embedding
        window (ContextWindow): Context of the misspelled token
        p (int): Window size, 1 <= p <= window.P

    Returns:
        float: min over a of ||V a - v_c||^2 / ||v_c||
    """
    if not 1 <= p <= window.P:
        raise ContractViolation(f"window size {p} outside 1..{window.P}")
    target = table.vector(candidate)
    _, residual = project_residual(_context_matrix(table, window, p), target)
    return float(residual @ residual / np.linalg.norm(target))


def weighted_distance(table: EmbeddingTable, candidate: str, window: ContextWindow) -> ScoredCandidate:
    """Sum of window distances for p = 1..P, each weighted by 1/p"""
    total = 0.0
    per_window = []
    for p in range(1, window.P + 1):
        distance = window_distance(table, candidate, window, p)
        per_window.append((p, distance))
        total += distance / p
    return ScoredCandidate(candidate, total, tuple(per_window))


def has_context(table: EmbeddingTable, window: ContextWindow) -> bool:
    return any(word in table for word in window.context_words(window.P))


def select_correction(table: EmbeddingTable,
                      candidates: CandidateSet,
                      window: ContextWindow) -> Tuple[str, List[ScoredCandidate]]:
    """
    Choose the candidate closest to the linear span of its context

    Args:
        table (EmbeddingTable): Embeddings
        candidates (CandidateSet): Minimal-distance candidates
        window (ContextWindow): Context of the misspelled token

    Returns:
        tuple: (chosen word, scores of every candidate with an embedding)
    """
    scores = [
        weighted_distance(table, word, window)
        for word in candidates.words
        if word in table
    ]
    if not scores or not has_context(table, window):
        return candidates.most_frequent(), scores

    best = min(score.weighted_distance for score in scores)
    tolerance = TIE_TOLERANCE * max(1.0, abs(best))
    tied = [score.word for score in scores if score.weighted_distance <= best + tolerance]
    chosen = min(tied, key=lambda word: (-candidates.frequency(word), word))
    return chosen, scores
