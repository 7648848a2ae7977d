import logging
import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from veilbreak.editdist import dl_distance
from veilbreak.helpers import ContractViolation, DataFormatError, Document, PathLike, atomic_write_text
from veilbreak.lexicon import Vocabulary, is_valid
from veilbreak.settings import Config
from veilbreak.spam_nb import NaiveBayesModel, class_scores
from veilbreak.textnorm import Token, TokenKind, detokenize, detokenize_text, match_case, tokenize

logger = logging.getLogger(__name__)

LETTERS = string.ascii_lowercase
OBFUSCATION = LETTERS + Config.OBFUSCATION_CHARS


class OpKind(str, Enum):
    INSERTION = 'insertion'
    PERMUTATION = 'permutation'
    REPLACEMENT = 'replacement'
    REMOVAL = 'removal'


ALL_OPS = frozenset(OpKind)


@dataclass(frozen=True)
class PerturbOp:
    kind: OpKind
    position: int
    char: Optional[str] = None

    def __post_init__(self):
        if self.kind in (OpKind.INSERTION, OpKind.REPLACEMENT):
            if self.char is None or len(self.char) != 1 or self.char not in OBFUSCATION:
                raise ContractViolation(f"{self.kind.value} needs one lowercase letter, '.' or '*'")
        elif self.char is not None:
            raise ContractViolation(f"{self.kind.value} takes no character")
        if self.position < 0:
            raise ContractViolation("position must be non-negative")


@dataclass(frozen=True)
class AttackSpec:
    max_edits: int = Config.MAX_EDITS
    ops_allowed: FrozenSet[OpKind] = ALL_OPS
    rng_seed: int = 0
    require_oov: bool = True
    max_attempts: int = Config.MAX_ATTEMPTS

    def __post_init__(self):
        if self.max_edits not in (1, 2):
            raise ContractViolation("max_edits must be 1 or 2")
        if not self.ops_allowed:
            raise ContractViolation("at least one operation must be allowed")
        object.__setattr__(self, 'ops_allowed', frozenset(OpKind(op) for op in self.ops_allowed))


def _apply(word: str, op: PerturbOp) -> str:
    n = len(word)
    if op.kind is OpKind.INSERTION:
        if op.position > n:
            raise ContractViolation(f"insertion position {op.position} outside 0..{n}")
        return word[:op.position] + op.char + word[op.position:]
    elif op.kind is OpKind.PERMUTATION:
        if op.position > n - 2:
            raise ContractViolation(f"permutation position {op.position} outside 0..{n - 2}")
        i = op.position
        return word[:i] + word[i + 1] + word[i] + word[i + 2:]
    elif op.kind is OpKind.REPLACEMENT:
        if op.position >= n:
            raise ContractViolation(f"replacement position {op.position} outside 0..{n - 1}")
        if word[op.position] == op.char:
            raise ContractViolation("replacement must change the character")
        return word[:op.position] + op.char + word[op.position + 1:]
    elif op.kind is OpKind.REMOVAL:
        if op.position >= n:
            raise ContractViolation(f"removal position {op.position} outside 0..{n - 1}")
        return word[:op.position] + word[op.position + 1:]
    raise ContractViolation(f"unknown operation {op.kind!r}")


def perturb(word: str, op: PerturbOp) -> str:
    """
    Apply one character-level operation to a word

    Args:
        word (str): Word of at least three characters
        op (PerturbOp): Operation; permutation swaps op.position with the next character

    Returns:
        str: Perturbed word
    """
    if len(word) < 3:
        raise ContractViolation(f"cannot perturb {word!r}: words need at least three characters")
    return _apply(word, op)


def _random_op(word: str, kinds: Sequence[OpKind], rng: np.random.Generator) -> Optional[PerturbOp]:
    n = len(word)
    kind = kinds[rng.integers(len(kinds))]
    # '.' and '*' only go inside a word so the result stays one token
    if kind is OpKind.INSERTION:
        position = int(rng.integers(n + 1))
        alphabet = OBFUSCATION if 0 < position < n else LETTERS
        return PerturbOp(kind, position, alphabet[rng.integers(len(alphabet))])
    if kind is OpKind.PERMUTATION:
        if n < 2:
            return None
        return PerturbOp(kind, int(rng.integers(n - 1)))
    if kind is OpKind.REPLACEMENT:
        position = int(rng.integers(n))
        alphabet = OBFUSCATION if 0 < position < n - 1 else LETTERS
        choices = [ch for ch in alphabet if ch != word[position]]
        return PerturbOp(kind, position, choices[rng.integers(len(choices))])
    if n < 2:
        return None
    return PerturbOp(kind, int(rng.integers(n)))


def _is_single_word(text: str) -> bool:
    sentences = tokenize(text)
    return (
        len(sentences) == 1
        and len(sentences[0]) == 1
        and sentences[0][0].kind is TokenKind.WORD
        and sentences[0][0].surface == text
    )


def generate_misspelling(vocab: Vocabulary, word: str, spec: AttackSpec,
                         rng: Optional[np.random.Generator] = None) -> str:
    """
    Produce a malicious misspelling within the edit budget

    Args:
        vocab (Vocabulary): Valid words, consulted when spec.require_oov is set
        word (str): Sensitive word, at least three characters
        spec (AttackSpec): Budget, allowed operations and seed
        rng (np.random.Generator): Random state; derived from spec.rng_seed when omitted

    Returns:
        str: The misspelling, or the word itself when no acceptable one was
            found within spec.max_attempts
    """
    if len(word) < 3:
        raise ContractViolation(f"cannot attack {word!r}: words need at least three characters")
    rng = rng if rng is not None else np.random.default_rng(spec.rng_seed)
    word = word.lower()
    kinds = sorted(spec.ops_allowed, key=lambda kind: kind.value)

    for _ in range(spec.max_attempts):
        edits = int(rng.integers(1, spec.max_edits + 1))
        result = word
        for _ in range(edits):
            op = _random_op(result, kinds, rng)
            if op is None:
                break
            result = _apply(result, op)
        if result == word or dl_distance(word, result) > spec.max_edits:
            continue
        if not _is_single_word(result):
            continue
        if spec.require_oov and is_valid(vocab, result):
            continue
        return result

    logger.warning(f"No acceptable misspelling of {word!r} after {spec.max_attempts} attempts")
    return word


def rank_sensitive_words_nb(model: NaiveBayesModel, top_k: int,
                            target: str = 'spam', reference: str = 'ham',
                            eligible: Optional[Callable[[str], bool]] = None) -> List[str]:
    """
    Features ordered by how strongly they indicate the target class

    Args:
        model (NaiveBayesModel): Trained victim
        top_k (int): Number of words returned (all features when larger)
        target (str): Class the words should indicate
        reference (str): Class they are contrasted with
        eligible (callable): Optional filter applied before ranking

    Returns:
        list: Words by decreasing log P(w|target) - log P(w|reference)
    """
    ratios = model.log_ratio(target, reference)
    order = sorted(range(len(model.features)), key=lambda k: (-ratios[k], k))
    ranked = [model.features[k] for k in order]
    if eligible is not None:
        ranked = [word for word in ranked if eligible(word)]
    return ranked[:max(top_k, 0)]


class KeywordScorer(Protocol):
    """Anything that assigns a real score to a text, higher meaning more offending"""

    def score(self, text: str) -> float:
        ...


class LexiconScorer:
    """Sums per-word weights over the word tokens of a text"""

    def __init__(self, weights: Mapping[str, float]):
        self.weights = {word.lower(): float(weight) for word, weight in weights.items()}

    def score(self, text: str) -> float:
        return sum(
            self.weights.get(token.lower, 0.0)
            for sentence in tokenize(text)
            for token in sentence
            if token.kind is TokenKind.WORD
        )


class NaiveBayesScorer:
    """Log-odds of the target class under a Naive Bayes model"""

    def __init__(self, model: NaiveBayesModel, target: str = 'spam', reference: str = 'ham'):
        self.model = model
        self._target = model.class_index(target)
        self._reference = model.class_index(reference)

    def score(self, text: str) -> float:
        scores = class_scores(self.model, [text])[0]
        return float(scores[self._target] - scores[self._reference])


def load_lexicon_scorer(path: PathLike) -> LexiconScorer:
    """Read `word<TAB>weight` lines into a LexiconScorer"""
    weights: Dict[str, float] = {}
    with open(path, encoding='utf-8') as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip('\n')
            if not line:
                continue
            parts = line.split('\t')
            try:
                weights[parts[0]] = float(parts[1])
            except (IndexError, ValueError):
                raise DataFormatError("expected word<TAB>weight", line_number)
    return LexiconScorer(weights)


def _most_sensitive_position(scorer: KeywordScorer, sentence: Sequence[Token],
                             eligible: Callable[[str], bool]) -> Optional[int]:
    # a deletion has to lower the score to count
    best_index: Optional[int] = None
    best_score = scorer.score(detokenize(sentence, restore_case=False))
    for index, token in enumerate(sentence):
        if token.kind is not TokenKind.WORD or not eligible(token.lower):
            continue
        score = scorer.score(detokenize(sentence, {index: ''}, restore_case=False))
        if score < best_score:
            best_index, best_score = index, score
    return best_index


def rank_sensitive_word_scorer(scorer: KeywordScorer, sentence: Sequence[Token],
                               eligible: Callable[[str], bool] = lambda word: len(word) > 2) -> Optional[str]:
    """
    The word whose deletion lowers the scorer's score the most

    Returns:
        str: Lowercased word, or None when the sentence has no eligible word
    """
    index = _most_sensitive_position(scorer, sentence, eligible)
    return None if index is None else sentence[index].lower


@dataclass(frozen=True)
class KeywordTargets:
    """Attack every occurrence of the listed words"""
    words: FrozenSet[str]


@dataclass(frozen=True)
class ScorerTargets:
    """Attack the single most sensitive eligible word of each sentence"""
    scorer: KeywordScorer
    eligible: Callable[[str], bool] = lambda word: len(word) > 2


TargetStrategy = Union[KeywordTargets, ScorerTargets]


@dataclass(frozen=True)
class AttackRecord:
    doc_id: int
    token_index: int
    original: str
    misspelled: str


@dataclass
class AttackLog:
    records: List[AttackRecord] = field(default_factory=list)
    failures: List[AttackRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)


def _attack_positions(sentences: Sequence[Sequence[Token]], strategy: TargetStrategy) -> List[int]:
    positions: List[int] = []
    offset = 0
    for sentence in sentences:
        if isinstance(strategy, KeywordTargets):
            positions.extend(
                offset + index
                for index, token in enumerate(sentence)
                if token.kind is TokenKind.WORD and len(token.lower) > 2 and token.lower in strategy.words
            )
        else:
            index = _most_sensitive_position(strategy.scorer, sentence, strategy.eligible)
            if index is not None:
                positions.append(offset + index)
        offset += len(sentence)
    return positions


def attack_corpus(corpus: Sequence[Document], strategy: TargetStrategy, spec: AttackSpec,
                  vocab: Vocabulary,
                  labels: Optional[Iterable[str]] = None) -> Tuple[List[Document], AttackLog]:
    """
    Replace sensitive words in a corpus with misspellings

    Args:
        corpus (list): Documents to revise
        strategy (KeywordTargets | ScorerTargets): How target words are chosen
        spec (AttackSpec): Misspelling budget and seed
        vocab (Vocabulary): Valid words, for the out-of-vocabulary requirement
        labels (iterable): Only documents with these labels are attacked; all when None

    Returns:
        tuple: (revised documents, attack log)
    """
    wanted = None if labels is None else frozenset(labels)
    revised: List[Document] = []
    log = AttackLog()
    for doc in corpus:
        if wanted is not None and doc.label not in wanted:
            revised.append(doc)
            continue
        rng = np.random.default_rng([spec.rng_seed, doc.doc_id])
        sentences = tokenize(doc.text)
        flat = [token for sentence in sentences for token in sentence]
        replacements: Dict[int, str] = {}
        for position in _attack_positions(sentences, strategy):
            token = flat[position]
            misspelled = generate_misspelling(vocab, token.lower, spec, rng)
            if misspelled == token.lower:
                log.failures.append(AttackRecord(doc.doc_id, position, token.surface, token.surface))
                continue
            surface = match_case(token.surface, misspelled)
            replacements[position] = surface
            log.records.append(AttackRecord(doc.doc_id, position, token.surface, surface))
        text = detokenize_text(sentences, replacements, restore_case=False) if replacements else doc.text
        revised.append(Document(doc.doc_id, doc.label, text))
    logger.info(f"Attacked {len(log.records)} tokens, {len(log.failures)} failures")
    return revised, log


def restore_corpus(revised: Sequence[Document], log: AttackLog) -> List[Document]:
    """Undo an attack by writing the logged original words back"""
    by_doc: Dict[int, Dict[int, str]] = {}
    for record in log.records:
        by_doc.setdefault(record.doc_id, {})[record.token_index] = record.original
    restored = []
    for doc in revised:
        replacements = by_doc.get(doc.doc_id)
        if not replacements:
            restored.append(doc)
            continue
        text = detokenize_text(tokenize(doc.text), replacements, restore_case=False)
        restored.append(Document(doc.doc_id, doc.label, text))
    return restored


def save_attack_log(log: AttackLog, path: PathLike) -> str:
    lines = ''.join(
        f"{r.doc_id}\t{r.token_index}\t{r.original}\t{r.misspelled}\n" for r in log.records
    )
    return atomic_write_text(path, lines)


def load_attack_log(path: PathLike) -> AttackLog:
    log = AttackLog()
    with open(path, encoding='utf-8') as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip('\n')
            if not line or line.startswith('#'):
                continue
            parts = line.split('\t')
            if len(parts) != 4:
                raise DataFormatError("expected doc_id<TAB>token_index<TAB>original<TAB>misspelled", line_number)
            try:
                log.records.append(AttackRecord(int(parts[0]), int(parts[1]), parts[2], parts[3]))
            except ValueError:
                raise DataFormatError("doc_id and token_index must be integers", line_number)
    return log
