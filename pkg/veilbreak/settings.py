import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, FrozenSet, Optional


class Config:
    """Default settings for veilbreak runs"""
    LOG_LEVEL = os.environ.get('VEILBREAK_LOG', 'WARNING')

    # Candidate enumeration and context selection
    MAX_RADIUS = 2
    WINDOW_P = 4
    RIDGE_SCALE = 1e-8

    # Misspelling generation
    MAX_EDITS = 2
    MAX_ATTEMPTS = 50
    OBFUSCATION_CHARS = '.*'
    MIN_SENSITIVE_COUNT = 100

    # Vocabulary construction
    VOCAB_MIN_FREQUENCY = 1
    CORPUS_MIN_FREQUENCY = 6  # "frequency higher than 5"

    # Naive Bayes victim
    NB_FEATURES = 2500
    TOP_K = 10
    TIE_CLASS = 'ham'


@dataclass
class RunConfig:
    """Everything a CLI run depends on; written next to its outputs as run.json"""
    command: str
    seed: int = 0
    vocab_path: Optional[str] = None
    embeddings_path: Optional[str] = None
    corpus_path: Optional[str] = None
    model_path: Optional[str] = None
    attack_log_path: Optional[str] = None
    out_dir: Optional[str] = None
    min_frequency: int = Config.VOCAB_MIN_FREQUENCY
    max_edits: int = Config.MAX_EDITS
    ops_allowed: FrozenSet[str] = field(default_factory=frozenset)
    require_oov: bool = True
    max_radius: int = Config.MAX_RADIUS
    window_p: int = Config.WINDOW_P
    top_k: int = Config.TOP_K
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['ops_allowed'] = sorted(self.ops_allowed)
        return data
