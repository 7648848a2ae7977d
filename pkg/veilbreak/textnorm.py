import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

PLACEHOLDERS = ('$HASHTAG$', '$URL$', '$MENTION$', '$RESERVED$')
SENTENCE_ENDINGS = frozenset('.!?')

_TOKEN_RE = re.compile(
    r"(?P<placeholder>\$(?:HASHTAG|URL|MENTION|RESERVED)\$)"
    r"|(?P<word>\w+(?:['’*.]+\w+)*)"
    r"|(?P<punct>[^\w\s])"
)

# URLs lose trailing punctuation so "http://t.co/x..." keeps its ellipsis
_URL_TAIL = r"\S*[^\s.,;:!?'\")\]}]"
_URL_RE = re.compile(
    r"(?:https?://|www\.)" + _URL_TAIL + r"|(?<![\w/.])t\.co/" + _URL_TAIL,
    re.IGNORECASE,
)
_MENTION_RE = re.compile(r"(?<![\w$])@\w+")
_HASHTAG_RE = re.compile(r"(?<![\w$])#\w+")
_RESERVED_RE = re.compile(r"\b(?:RT|FAV)\b")


class TokenKind(str, Enum):
    WORD = 'word'
    NUMBER = 'number'
    PUNCTUATION = 'punctuation'
    PLACEHOLDER = 'placeholder'


@dataclass(frozen=True)
class Token:
    """
    A token with its source offsets.

    `trail` is the whitespace up to the next token (or the end of the text);
    `lead` is only non-empty for the first token of a text. Whitespace-only
    text becomes one empty punctuation token whose `lead` holds the whitespace.
    """
    surface: str
    lower: str
    kind: TokenKind
    start: int
    end: int
    trail: str = ''
    lead: str = ''

    @property
    def span(self) -> Tuple[int, int]:
        return self.start, self.end


def is_placeholder(token: str) -> bool:
    return token in PLACEHOLDERS


def _classify(match: 're.Match[str]') -> TokenKind:
    if match.lastgroup == 'placeholder':
        return TokenKind.PLACEHOLDER
    surface = match.group()
    if any(ch.isalpha() for ch in surface):
        return TokenKind.WORD
    if any(ch.isdigit() for ch in surface):
        return TokenKind.NUMBER
    return TokenKind.PUNCTUATION


def tokenize(text: str) -> List[List[Token]]:
    """
    Split text into sentences of tokens

    Args:
        text (str): Raw text

    Returns:
        list: Sentences, each a list of Token; offsets index into `text`
    """
    matches = list(_TOKEN_RE.finditer(text))
    if not matches and text:
        return [[Token('', '', TokenKind.PUNCTUATION, len(text), len(text), lead=text)]]
    sentences: List[List[Token]] = []
    current: List[Token] = []
    for position, match in enumerate(matches):
        following = matches[position + 1].start() if position + 1 < len(matches) else len(text)
        surface = match.group()
        token = Token(
            surface=surface,
            lower=surface.lower(),
            kind=_classify(match),
            start=match.start(),
            end=match.end(),
            trail=text[match.end():following],
            lead=text[:match.start()] if position == 0 else '',
        )
        current.append(token)
        if surface in SENTENCE_ENDINGS and token.trail:
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


def word_tokens(text: str) -> List[str]:
    """Lowercased word-kind tokens of a text, in order"""
    return [
        token.lower
        for sentence in tokenize(text)
        for token in sentence
        if token.kind is TokenKind.WORD
    ]


def match_case(original: str, replacement: str) -> str:
    """Carry the capitalization of `original` over to `replacement`"""
    if not original or not replacement:
        return replacement
    if len(original) > 1 and original.isupper():
        return replacement.upper()
    if original[0].isupper():
        return replacement[0].upper() + replacement[1:]
    return replacement


def detokenize(sentence: Sequence[Token],
               replacements: Optional[Mapping[int, str]] = None,
               restore_case: bool = True) -> str:
    """
    Rebuild a sentence from its tokens

    Args:
        sentence (list): Tokens of one sentence
        replacements (dict): Sentence-local token index -> new surface
        restore_case (bool): Copy the original capitalization onto replacements

    Returns:
        str: Text with the original whitespace between tokens
    """
    replacements = replacements or {}
    parts: List[str] = []
    for index, token in enumerate(sentence):
        surface = token.surface
        if index in replacements:
            surface = replacements[index]
            if restore_case:
                surface = match_case(token.surface, surface)
        parts.append(token.lead + surface + token.trail)
    return ''.join(parts)


def detokenize_text(sentences: Sequence[Sequence[Token]],
                    replacements: Optional[Mapping[int, str]] = None,
                    restore_case: bool = True) -> str:
    """Rebuild a whole text; replacement keys are flat token indices"""
    replacements = replacements or {}
    parts: List[str] = []
    offset = 0
    for sentence in sentences:
        local: Dict[int, str] = {
            index - offset: value
            for index, value in replacements.items()
            if offset <= index < offset + len(sentence)
        }
        parts.append(detokenize(sentence, local, restore_case))
        offset += len(sentence)
    return ''.join(parts)


def normalize_tweet(text: str) -> str:
    """
    Replace tweet-specific tokens with placeholders

    Args:
        text (str): Raw tweet

    Returns:
        str: Tweet with URLs, mentions, hashtags and reserved words replaced
    """
    text = _URL_RE.sub('$URL$', text)
    text = _MENTION_RE.sub('$MENTION$', text)
    text = _HASHTAG_RE.sub('$HASHTAG$', text)
    return _RESERVED_RE.sub('$RESERVED$', text)
