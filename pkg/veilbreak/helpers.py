import logging
import os
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, List, Optional, Union

from veilbreak.settings import Config

PathLike = Union[str, os.PathLike]


class VeilbreakError(Exception):
    """Base exception for veilbreak errors"""
    pass


class DataFormatError(VeilbreakError):
    """Malformed input file; carries the offending line number when known"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class VocabularyFormatError(DataFormatError):
    pass


class EmbeddingFormatError(DataFormatError):
    pass


class ModelFormatError(DataFormatError):
    pass


class CorpusFormatError(DataFormatError):
    pass


class MissingEmbeddingError(VeilbreakError):
    """Raised when a word without an embedding is scored"""
    pass


class ContractViolation(VeilbreakError):
    """A caller broke a documented precondition"""
    pass


class TrainingError(VeilbreakError):
    pass


class EvaluationError(VeilbreakError):
    pass


class ConfigurationError(VeilbreakError):
    pass


@dataclass(frozen=True)
class Document:
    """One corpus line: `label<TAB>text`"""
    doc_id: int
    label: str
    text: str


def configure_logging(level: Optional[str] = None) -> None:
    """
    Configure root logging for command-line runs

    Args:
        level (str): Level name; defaults to the VEILBREAK_LOG environment variable
    """
    name = (level or os.environ.get('VEILBREAK_LOG') or Config.LOG_LEVEL).upper()
    numeric = getattr(logging, name, None)
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logging.basicConfig(
        level=numeric,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        force=True,
    )


def bundled_path(name: str) -> Path:
    """Path of a data file shipped inside the package"""
    return Path(str(resources.files('veilbreak') / 'data' / name))


def atomic_write_text(path: PathLike, text: str) -> str:
    """
    Write text to path through a temporary file and a rename

    Args:
        path (str): Destination file
        text (str): Content, written as UTF-8 with LF line endings

    Returns:
        str: Path of the written file
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
        os.replace(tmp, target)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return str(target)


def read_corpus(path: PathLike) -> List[Document]:
    """
    Read a `label<TAB>text` corpus

    Args:
        path (str): UTF-8 TSV file, one document per line

    Returns:
        list: Documents numbered in file order
    """
    documents: List[Document] = []
    with open(path, encoding='utf-8') as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip('\n')
            if not line.strip():
                continue
            if '\t' not in line:
                raise CorpusFormatError("expected label<TAB>text", line_number)
            label, text = line.split('\t', 1)
            documents.append(Document(len(documents), label, text))
    return documents


def format_corpus(documents: Iterable[Document]) -> str:
    return ''.join(f"{doc.label}\t{doc.text}\n" for doc in documents)


def write_corpus(path: PathLike, documents: Iterable[Document]) -> str:
    return atomic_write_text(path, format_corpus(documents))
