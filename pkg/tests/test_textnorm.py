import string

import numpy as np
import pytest

from veilbreak.textnorm import (TokenKind, detokenize, detokenize_text, match_case, normalize_tweet, tokenize,
                                word_tokens)


def surfaces(sentence):
    return [token.surface for token in sentence]


def test_apostrophes_stay_inside_words():
    [sentence] = tokenize("you're a biased fuck")
    assert surfaces(sentence) == ["you're", 'a', 'biased', 'fuck']


def test_empty_text_has_no_sentences():
    assert tokenize('') == []


def test_final_period_is_a_token_of_the_same_sentence():
    sentences = tokenize('Please pya any fees.')
    assert len(sentences) == 1
    assert surfaces(sentences[0]) == ['Please', 'pya', 'any', 'fees', '.']


def test_sentences_split_after_terminal_punctuation_and_space():
    sentences = tokenize('Buy now! Really? yes. ok')
    assert [surfaces(s) for s in sentences] == [['Buy', 'now', '!'], ['Really', '?'], ['yes', '.'], ['ok']]


def test_obfuscated_words_are_single_tokens():
    [sentence] = tokenize('the stu*pid and idio.t admins')
    assert surfaces(sentence) == ['the', 'stu*pid', 'and', 'idio.t', 'admins']
    assert all(token.kind is TokenKind.WORD for token in sentence)


def test_token_kinds():
    [sentence] = tokenize('$URL$ costs 42 , ok')
    kinds = [token.kind for token in sentence]
    assert kinds == [TokenKind.PLACEHOLDER, TokenKind.WORD, TokenKind.NUMBER, TokenKind.PUNCTUATION, TokenKind.WORD]


def test_offsets_point_into_the_source():
    text = '  Hello,  World '
    for sentence in tokenize(text):
        for token in sentence:
            assert text[token.start:token.end] == token.surface
            assert token.lower == token.surface.lower()


def test_word_tokens_are_lowercased_words_only():
    assert word_tokens('Make MONEY, 100 times!') == ['make', 'money', 'times']


def test_round_trip_without_replacements():
    text = 'the stupid and stubborn administrators'
    assert detokenize_text(tokenize(text)) == text


def test_round_trip_on_random_printable_strings():
    rng = np.random.default_rng(11)
    alphabet = list(string.printable) + ['é', '’', '😀']
    for _ in range(1000):
        length = int(rng.integers(1, 40))
        text = ''.join(alphabet[i] for i in rng.integers(len(alphabet), size=length))
        assert detokenize_text(tokenize(text)) == text


@pytest.mark.parametrize('text', ['   ', '\n', ' \t ', '\r\n\x0b'])
def test_whitespace_only_text_round_trips(text):
    sentences = tokenize(text)
    assert detokenize_text(sentences) == text
    assert detokenize(sentences[0]) == text
    assert word_tokens(text) == []
    assert all(token.kind is TokenKind.PUNCTUATION for sentence in sentences for token in sentence)


def test_replacement_keeps_whitespace():
    [sentence] = tokenize('the stu*pid and stubborn administrators')
    assert detokenize(sentence, {1: 'stupid'}) == 'the stupid and stubborn administrators'


def test_replacement_restores_leading_capital():
    [sentence] = tokenize('Stupd people')
    assert detokenize(sentence, {0: 'stupid'}) == 'Stupid people'


def test_flat_indices_span_sentences():
    sentences = tokenize('Fre money. Cal now')
    assert detokenize_text(sentences, {0: 'free', 3: 'call'}) == 'Free money. Call now'


@pytest.mark.parametrize('original, replacement, expected', [
    ('Stupd', 'stupid', 'Stupid'),
    ('MONY', 'money', 'MONEY'),
    ('mony', 'money', 'money'),
    ('I', 'a', 'A'),
])
def test_match_case(original, replacement, expected):
    assert match_case(original, replacement) == expected


def test_tweet_worked_example():
    tweet = '#isis #islam pc puzzle: converting to a religion of peace leading to violence? http://t.co/tbjusaemuh'
    assert normalize_tweet(tweet) == (
        '$HASHTAG$ $HASHTAG$ pc puzzle: converting to a religion of peace leading to violence? $URL$'
    )


def test_url_loses_trailing_punctuation():
    assert normalize_tweet('see http://t.co/g4xoh...') == 'see $URL$...'


@pytest.mark.parametrize('tweet, expected', [
    ('no special tokens here', 'no special tokens here'),
    ('@user lol #yes', '$MENTION$ lol $HASHTAG$'),
    ('RT @bob: www.example.com/a, t.co/xyz', '$RESERVED$ $MENTION$: $URL$, $URL$'),
    ('mail me at bob@example.com', 'mail me at bob@example.com'),
])
def test_normalize_tweet(tweet, expected):
    assert normalize_tweet(tweet) == expected


def test_placeholders_tokenize_as_placeholders():
    [sentence] = tokenize(normalize_tweet('@user lol #yes'))
    assert [token.kind for token in sentence] == [TokenKind.PLACEHOLDER, TokenKind.WORD, TokenKind.PLACEHOLDER]


def test_normalize_tweet_is_idempotent():
    pieces = ['hello', 'world', 'RT', 'FAV', 'rt', '#isis', '#tag2', '@user', '@bob_1', 'http://t.co/abc',
              'https://example.com/x?y=1', 'www.site.org', 't.co/zz', ':', ',', '...', '?', '!', '😀', 'pc',
              "don't"]
    separators = [' ', ' ', '  ', '']
    rng = np.random.default_rng(5)
    for _ in range(500):
        count = int(rng.integers(1, 12))
        parts = []
        for _ in range(count):
            parts.append(pieces[rng.integers(len(pieces))])
            parts.append(separators[rng.integers(len(separators))])
        tweet = ''.join(parts)
        once = normalize_tweet(tweet)
        assert normalize_tweet(once) == once
