import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from veilbreak.attacker import AttackLog
from veilbreak.editdist import CandidateIndex, CandidateSet, build_candidate_index, enumerate_candidates
from veilbreak.embeddings import ContextWindow, EmbeddingTable, ScoredCandidate, select_correction
from veilbreak.helpers import ContractViolation, Document, EvaluationError, PathLike, atomic_write_text
from veilbreak.lexicon import Vocabulary, is_valid
from veilbreak.settings import Config
from veilbreak.textnorm import Token, TokenKind, detokenize, tokenize

logger = logging.getLogger(__name__)

STRATEGIES = ('context', 'frequency')


@dataclass(frozen=True)
class CorrectorConfig:
    max_radius: int = Config.MAX_RADIUS
    window: int = Config.WINDOW_P
    strategy: str = 'context'

    def __post_init__(self):
        if self.max_radius < 1:
            raise ContractViolation("max_radius must be at least 1")
        if self.window < 1:
            raise ContractViolation("window size P must be at least 1")
        if self.strategy not in STRATEGIES:
            raise ContractViolation(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")


@dataclass(frozen=True)
class TokenCorrection:
    """What happened to one token; `token_index` counts tokens across the whole document"""
    token_index: int
    original: str
    flagged: bool
    candidates: Optional[CandidateSet] = None
    correction: Optional[str] = None
    scores: Tuple[ScoredCandidate, ...] = ()


@dataclass(frozen=True)
class CorrectionResult:
    records: Tuple[TokenCorrection, ...]
    corrected_text: str

    @property
    def flagged(self) -> int:
        return sum(record.flagged for record in self.records)

    @property
    def corrected(self) -> int:
        return sum(record.correction is not None for record in self.records)

    @property
    def unchanged_oov(self) -> int:
        return sum(record.flagged and record.correction is None for record in self.records)

    def record_at(self, token_index: int) -> Optional[TokenCorrection]:
        for record in self.records:
            if record.token_index == token_index:
                return record
        return None


@dataclass
class CorpusCorrection:
    """Per-document results, keyed by document id"""
    results: Dict[int, CorrectionResult] = field(default_factory=dict)

    @property
    def flagged(self) -> int:
        return sum(result.flagged for result in self.results.values())

    @property
    def corrected(self) -> int:
        return sum(result.corrected for result in self.results.values())

    @property
    def unchanged_oov(self) -> int:
        return sum(result.unchanged_oov for result in self.results.values())


def _context_slots(vocab: Vocabulary, sentence: Sequence[Token]) -> Tuple[List[Optional[str]], Dict[int, int]]:
    """
    Window positions of a sentence

    Punctuation takes no position. Placeholders and misspelled words keep a
    position but contribute no word.
    """
    slots: List[Optional[str]] = []
    positions: Dict[int, int] = {}
    for index, token in enumerate(sentence):
        if token.kind is TokenKind.PUNCTUATION:
            continue
        positions[index] = len(slots)
        if token.kind is TokenKind.PLACEHOLDER or not is_valid(vocab, token.surface):
            slots.append(None)
        else:
            slots.append(token.lower)
    return slots, positions


class SpellingCorrector:
    """
    Detects non-word errors and replaces them with the candidate that fits
    the surrounding words best.
    """

    def __init__(self, vocab: Vocabulary, table: EmbeddingTable,
                 config: Optional[CorrectorConfig] = None,
                 index: Optional[CandidateIndex] = None):
        self.vocab = vocab
        self.table = table
        self.config = config or CorrectorConfig()
        self.index = index or build_candidate_index(vocab, self.config.max_radius)

    def _choose(self, candidates: CandidateSet, window: ContextWindow) -> Tuple[str, List[ScoredCandidate]]:
        if self.config.strategy == 'frequency':
            return candidates.most_frequent(), []
        return select_correction(self.table, candidates, window)

    def correct_sentence(self, sentence: Sequence[Token], offset: int = 0) -> CorrectionResult:
        """
        Correct the misspelled words of one sentence

        Args:
            sentence (list): Tokens of the sentence
            offset (int): Document-level index of the sentence's first token

        Returns:
            CorrectionResult: One record per word token, keyed by document-level
                index, and the corrected sentence with its original whitespace
        """
        slots, positions = _context_slots(self.vocab, sentence)
        records: List[TokenCorrection] = []
        replacements: Dict[int, str] = {}
        for index, token in enumerate(sentence):
            if token.kind is not TokenKind.WORD:
                continue
            if is_valid(self.vocab, token.surface):
                records.append(TokenCorrection(offset + index, token.surface, flagged=False))
                continue

            candidates = enumerate_candidates(self.vocab, token.lower, self.config.max_radius, self.index)
            if candidates is None:
                logger.debug(f"No candidate within {self.config.max_radius} edits of {token.surface!r}")
                records.append(TokenCorrection(offset + index, token.surface, flagged=True))
                continue

            window = ContextWindow.around(slots, positions[index], self.config.window, center=token.lower)
            chosen, scores = self._choose(candidates, window)
            replacements[index] = chosen
            records.append(TokenCorrection(
                offset + index, token.surface, True, candidates, chosen, tuple(scores)))
        return CorrectionResult(tuple(records), detokenize(sentence, replacements))

    def correct_text(self, text: str) -> CorrectionResult:
        records: List[TokenCorrection] = []
        parts: List[str] = []
        offset = 0
        for sentence in tokenize(text):
            result = self.correct_sentence(sentence, offset)
            records.extend(result.records)
            parts.append(result.corrected_text)
            offset += len(sentence)
        return CorrectionResult(tuple(records), ''.join(parts))

    def correct_corpus(self, corpus: Sequence[Document]) -> Tuple[List[Document], CorpusCorrection]:
        """
        Correct every document of a corpus

        Returns:
            tuple: (corrected documents in input order, per-document results)
        """
        documents: List[Document] = []
        aggregate = CorpusCorrection()
        for doc in corpus:
            result = self.correct_text(doc.text)
            aggregate.results[doc.doc_id] = result
            documents.append(Document(doc.doc_id, doc.label, result.corrected_text))
        logger.info(
            f"Corrected {aggregate.corrected} of {aggregate.flagged} flagged tokens "
            f"in {len(documents)} documents"
        )
        return documents, aggregate


def correction_accuracy(attack_log: AttackLog, correction: CorpusCorrection) -> float:
    """
    Share of attacked tokens corrected back to their original word

    Args:
        attack_log (AttackLog): Log of the attack that produced the corrected corpus
        correction (CorpusCorrection): Result of correcting the attacked corpus

    Returns:
        float: Fraction in [0, 1]; case is ignored
    """
    if not attack_log.records:
        raise EvaluationError("attack log has no records")
    hits = 0
    for entry in attack_log.records:
        result = correction.results.get(entry.doc_id)
        if result is None:
            raise ContractViolation(f"document {entry.doc_id} is missing from the correction result")
        record = result.record_at(entry.token_index)
        if record is None or record.original != entry.misspelled:
            raise ContractViolation(
                f"token {entry.token_index} of document {entry.doc_id} does not match the attack log")
        if record.correction is not None and record.correction.lower() == entry.original.lower():
            hits += 1
    return hits / len(attack_log.records)


def save_diagnostics(correction: CorpusCorrection, path: PathLike) -> str:
    """Write one `doc_id<TAB>token_index<TAB>original<TAB>correction` line per substitution"""
    lines = [
        f"# flagged={correction.flagged} corrected={correction.corrected} "
        f"unchanged_oov={correction.unchanged_oov}\n"
    ]
    for doc_id in sorted(correction.results):
        for record in correction.results[doc_id].records:
            if record.correction is not None:
                lines.append(f"{doc_id}\t{record.token_index}\t{record.original}\t{record.correction}\n")
    return atomic_write_text(path, ''.join(lines))
