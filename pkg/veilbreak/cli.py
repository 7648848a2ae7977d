import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import click

from veilbreak import synthetic
from veilbreak.attacker import (ALL_OPS, AttackSpec, KeywordTargets, OpKind, ScorerTargets, attack_corpus,
                                load_attack_log, load_lexicon_scorer, rank_sensitive_words_nb, save_attack_log)
from veilbreak.corrector import CorrectorConfig, SpellingCorrector, correction_accuracy, save_diagnostics
from veilbreak.editdist import dl_distance
from veilbreak.embeddings import load_embeddings
from veilbreak.helpers import (ConfigurationError, ContractViolation, Document, VeilbreakError, atomic_write_text,
                               bundled_path, configure_logging, format_corpus, read_corpus, write_corpus)
from veilbreak.lexicon import (Vocabulary, augment_from_corpus, is_sensitive_eligible, load_function_words,
                               load_vocabulary, save_vocabulary)
from veilbreak.reporting import accuracy_table, metrics_table, save_accuracy_plot, write_table
from veilbreak.settings import Config, RunConfig
from veilbreak.spam_nb import evaluate, load_model, save_model, train
from veilbreak.textnorm import normalize_tweet

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONTRACT = 3

FIXTURE_VOCAB = 'table_vocab.tsv'
FIXTURE_EMBEDDINGS = 'table_embeddings.txt'
FIXTURE_CORPUS = 'table_revised.tsv'

existing_file = click.Path(exists=True, dir_okay=False)


def _write_run_config(run: RunConfig) -> Optional[str]:
    if not run.out_dir:
        return None
    return atomic_write_text(
        os.path.join(run.out_dir, 'run.json'),
        json.dumps(run.to_dict(), indent=2, sort_keys=True) + '\n',
    )


def _vocabulary(vocab_path: Optional[str], texts: Sequence[str], min_frequency: int) -> Vocabulary:
    if vocab_path:
        return load_vocabulary(vocab_path, min_frequency)
    logger.info("No vocabulary file given; using the corpus words")
    return Vocabulary.from_corpus(texts, min_frequency)


def _out_path(out_dir: str, name: str) -> str:
    return os.path.join(out_dir, name)


@click.group()
@click.option('--log-level', default=None, help='Overrides the VEILBREAK_LOG environment variable.')
def cli(log_level: Optional[str]):
    """Adversarial misspellings, context-sensitive correction and a Naive Bayes victim."""
    configure_logging(log_level)


@cli.command()
@click.argument('word_a')
@click.argument('word_b')
def distance(word_a: str, word_b: str):
    """Print the restricted Damerau-Levenshtein distance of two words."""
    click.echo(dl_distance(word_a, word_b))


@cli.command('train-nb')
@click.option('--corpus', required=True, type=existing_file, help='Training corpus, label<TAB>text.')
@click.option('--model', 'model_path', required=True, type=click.Path(dir_okay=False), help='Model file to write.')
@click.option('--features', default=Config.NB_FEATURES, show_default=True, help='Number of count features.')
@click.option('--out-dir', type=click.Path(file_okay=False), default=None)
def train_nb(corpus: str, model_path: str, features: int, out_dir: Optional[str]):
    """Train the Naive Bayes spam classifier."""
    documents = read_corpus(corpus)
    model = train(documents, features)
    save_model(model, model_path)
    _write_run_config(RunConfig('train-nb', corpus_path=corpus, model_path=model_path,
                                out_dir=out_dir, extra={'features': features}))
    click.echo(f"trained on {len(documents)} documents, {len(model.features)} features -> {model_path}")


@cli.command('eval')
@click.option('--corpus', 'corpora', required=True, multiple=True, type=existing_file,
              help='Labeled corpus; repeat to compare conditions.')
@click.option('--model', 'model_path', required=True, type=existing_file)
@click.option('--out-dir', type=click.Path(file_okay=False), default=None)
@click.option('--plot', is_flag=True, help='Also save an accuracy bar chart to --out-dir.')
def eval_cmd(corpora: Sequence[str], model_path: str, out_dir: Optional[str], plot: bool):
    """Report accuracy and per-class precision / recall / F1."""
    if plot and not out_dir:
        raise ConfigurationError("--plot needs --out-dir")
    model = load_model(model_path)
    reports = {}
    for path in corpora:
        stem = Path(path).stem
        name, suffix = stem, 2
        while name in reports:
            name, suffix = f"{stem}_{suffix}", suffix + 1
        report = evaluate(model, read_corpus(path))
        reports[name] = report
        click.echo(f"== {name}")
        click.echo(metrics_table(report).to_string(float_format='%.4f'))
        click.echo(f"accuracy {report.accuracy:.4f}")

    table = accuracy_table(reports)
    if len(reports) > 1:
        click.echo(table.to_string(float_format='%.4f'))
    if out_dir:
        write_table(table, _out_path(out_dir, 'accuracy.tsv'))
        for name, report in reports.items():
            write_table(metrics_table(report), _out_path(out_dir, f"metrics_{name}.tsv"))
        if plot:
            save_accuracy_plot(table, out_dir)
        _write_run_config(RunConfig('eval', model_path=model_path, out_dir=out_dir,
                                    extra={'corpora': list(corpora)}))


@cli.command()
@click.option('--corpus', required=True, type=existing_file)
@click.option('--out-dir', required=True, type=click.Path(file_okay=False))
@click.option('--vocab', 'vocab_path', type=existing_file, default=None,
              help='Word<TAB>count list; the corpus words are used without it.')
@click.option('--model', 'model_path', type=existing_file, default=None,
              help='Naive Bayes model; its most spam-indicative words are attacked.')
@click.option('--lexicon', 'lexicon_path', type=existing_file, default=None,
              help='Word<TAB>weight scorer; the most offending word of each sentence is attacked.')
@click.option('--seed', default=0, show_default=True)
@click.option('--max-edits', default=Config.MAX_EDITS, show_default=True, type=click.IntRange(1, 2))
@click.option('--ops', multiple=True, type=click.Choice([op.value for op in OpKind]),
              help='Allowed operations (repeatable); all four by default.')
@click.option('--top-k', default=Config.TOP_K, show_default=True)
@click.option('--min-count', default=Config.MIN_SENSITIVE_COUNT, show_default=True,
              help='Vocabulary count a word needs to be attacked.')
@click.option('--min-frequency', default=Config.VOCAB_MIN_FREQUENCY, show_default=True)
@click.option('--attack-label', 'attack_labels', multiple=True, help='Only attack documents with this label.')
@click.option('--allow-in-vocab', is_flag=True, help='Accept misspellings that are real words.')
def attack(corpus: str, out_dir: str, vocab_path: Optional[str], model_path: Optional[str],
           lexicon_path: Optional[str], seed: int, max_edits: int, ops: Sequence[str], top_k: int,
           min_count: int, min_frequency: int, attack_labels: Sequence[str], allow_in_vocab: bool):
    """Replace sensitive words with malicious misspellings."""
    if bool(model_path) == bool(lexicon_path):
        raise ConfigurationError("attack needs exactly one of --model or --lexicon")
    documents = read_corpus(corpus)
    vocab = _vocabulary(vocab_path, [doc.text for doc in documents], min_frequency)
    fwl = load_function_words()

    def eligible(word: str) -> bool:
        return is_sensitive_eligible(vocab, fwl, word, min_count)

    if model_path:
        targets = rank_sensitive_words_nb(load_model(model_path), top_k, eligible=eligible)
        if not targets:
            logger.warning("No eligible sensitive words; lower --min-count")
        strategy = KeywordTargets(frozenset(targets))
        click.echo(f"targets: {' '.join(targets)}")
    else:
        strategy = ScorerTargets(load_lexicon_scorer(lexicon_path), eligible)

    ops_allowed = frozenset(OpKind(op) for op in ops) or ALL_OPS
    spec = AttackSpec(max_edits=max_edits, ops_allowed=ops_allowed, rng_seed=seed,
                      require_oov=not allow_in_vocab)
    revised, log = attack_corpus(documents, strategy, spec, vocab, attack_labels or None)

    write_corpus(_out_path(out_dir, 'revised.tsv'), revised)
    save_attack_log(log, _out_path(out_dir, 'attack_log.tsv'))
    _write_run_config(RunConfig(
        'attack', seed=seed, vocab_path=vocab_path, corpus_path=corpus, model_path=model_path,
        out_dir=out_dir, min_frequency=min_frequency, max_edits=max_edits,
        ops_allowed=frozenset(op.value for op in ops_allowed), require_oov=not allow_in_vocab,
        top_k=top_k, extra={'lexicon_path': lexicon_path, 'min_count': min_count,
                            'attack_labels': list(attack_labels)},
    ))
    click.echo(f"attacked {len(log.records)} tokens ({len(log.failures)} failures) -> {out_dir}")


@cli.command()
@click.option('--corpus', type=existing_file, default=None)
@click.option('--text', default=None, help='Correct a single text and print it.')
@click.option('--use-fixtures', is_flag=True, help='Use the bundled fixture vocabulary, embeddings and sentences.')
@click.option('--vocab', 'vocab_path', type=existing_file, default=None)
@click.option('--embeddings', 'embeddings_path', type=existing_file, default=None)
@click.option('--min-frequency', default=Config.VOCAB_MIN_FREQUENCY, show_default=True)
@click.option('--max-radius', default=Config.MAX_RADIUS, show_default=True, type=click.IntRange(1, None))
@click.option('--window-P', 'window_p', default=Config.WINDOW_P, show_default=True, type=click.IntRange(1, None))
@click.option('--strategy', default='context', show_default=True, type=click.Choice(['context', 'frequency']))
@click.option('--normalize-tweets', is_flag=True, help='Replace hashtags, URLs and mentions first.')
@click.option('--attack-log', 'attack_log_path', type=existing_file, default=None,
              help='Attack log of the corpus; prints the correction accuracy.')
@click.option('--out-dir', type=click.Path(file_okay=False), default=None)
def correct(corpus: Optional[str], text: Optional[str], use_fixtures: bool, vocab_path: Optional[str],
            embeddings_path: Optional[str], min_frequency: int, max_radius: int, window_p: int,
            strategy: str, normalize_tweets: bool, attack_log_path: Optional[str], out_dir: Optional[str]):
    """Correct non-word misspellings using their context."""
    if use_fixtures:
        vocab_path = vocab_path or str(bundled_path(FIXTURE_VOCAB))
        embeddings_path = embeddings_path or str(bundled_path(FIXTURE_EMBEDDINGS))
        if corpus is None and text is None:
            corpus = str(bundled_path(FIXTURE_CORPUS))
    if not vocab_path or not embeddings_path:
        raise ConfigurationError("correct needs --vocab and --embeddings (or --use-fixtures)")
    if (corpus is None) == (text is None):
        raise ConfigurationError("correct needs exactly one of --corpus or --text")

    corrector = SpellingCorrector(
        load_vocabulary(vocab_path, min_frequency),
        load_embeddings(embeddings_path),
        CorrectorConfig(max_radius=max_radius, window=window_p, strategy=strategy),
    )

    if text is not None:
        click.echo(corrector.correct_text(normalize_tweet(text) if normalize_tweets else text).corrected_text)
        return

    documents = read_corpus(corpus)
    if normalize_tweets:
        documents = [Document(doc.doc_id, doc.label, normalize_tweet(doc.text)) for doc in documents]
    corrected, result = corrector.correct_corpus(documents)

    if out_dir:
        write_corpus(_out_path(out_dir, 'corrected.tsv'), corrected)
        save_diagnostics(result, _out_path(out_dir, 'diagnostics.tsv'))
        _write_run_config(RunConfig(
            'correct', vocab_path=vocab_path, embeddings_path=embeddings_path, corpus_path=corpus,
            attack_log_path=attack_log_path, out_dir=out_dir, min_frequency=min_frequency,
            max_radius=max_radius, window_p=window_p,
            extra={'strategy': strategy, 'normalize_tweets': normalize_tweets},
        ))
    else:
        click.echo(format_corpus(corrected), nl=False)

    click.echo(f"flagged {result.flagged}, corrected {result.corrected}, "
               f"unchanged {result.unchanged_oov}", err=True)
    if attack_log_path:
        accuracy = correction_accuracy(load_attack_log(attack_log_path), result)
        click.echo(f"correction accuracy {accuracy:.4f}")


@cli.command()
@click.option('--corpus', type=existing_file, default=None)
@click.option('--text', default=None)
@click.option('--out-dir', type=click.Path(file_okay=False), default=None)
def normalize(corpus: Optional[str], text: Optional[str], out_dir: Optional[str]):
    """Replace hashtags, URLs, mentions and reserved words with placeholders."""
    if (corpus is None) == (text is None):
        raise ConfigurationError("normalize needs exactly one of --corpus or --text")
    if text is not None:
        click.echo(normalize_tweet(text))
        return
    documents = [Document(d.doc_id, d.label, normalize_tweet(d.text)) for d in read_corpus(corpus)]
    if out_dir:
        write_corpus(_out_path(out_dir, 'normalized.tsv'), documents)
    else:
        click.echo(format_corpus(documents), nl=False)


@cli.command('build-vocab')
@click.option('--corpus', required=True, type=existing_file)
@click.option('--output', required=True, type=click.Path(dir_okay=False))
@click.option('--vocab', 'vocab_path', type=existing_file, default=None, help='Base dictionary to extend.')
@click.option('--min-frequency', default=Config.CORPUS_MIN_FREQUENCY, show_default=True,
              help='Corpus count a word needs to be added.')
def build_vocab(corpus: str, output: str, vocab_path: Optional[str], min_frequency: int):
    """Extend a dictionary with the frequent words of a corpus."""
    texts = [doc.text for doc in read_corpus(corpus)]
    base = load_vocabulary(vocab_path) if vocab_path else Vocabulary({})
    vocab = augment_from_corpus(base, texts, min_frequency)
    save_vocabulary(vocab, output)
    click.echo(f"{len(vocab)} words ({len(vocab) - len(base)} added) -> {output}")


@cli.command()
@click.option('--seed', default=0, show_default=True)
@click.option('--n-docs', default=40, show_default=True, type=click.IntRange(10, None))
@click.option('--top-k', default=Config.TOP_K, show_default=True)
@click.option('--max-edits', default=Config.MAX_EDITS, show_default=True, type=click.IntRange(1, 2))
@click.option('--max-radius', default=Config.MAX_RADIUS, show_default=True, type=click.IntRange(1, None))
@click.option('--window-P', 'window_p', default=Config.WINDOW_P, show_default=True, type=click.IntRange(1, None))
@click.option('--out-dir', type=click.Path(file_okay=False), default=None)
@click.option('--plot', is_flag=True)
def demo(seed: int, n_docs: int, top_k: int, max_edits: int, max_radius: int, window_p: int,
         out_dir: Optional[str], plot: bool):
    """Run attack, detection and correction end to end on synthetic data."""
    if plot and not out_dir:
        raise ConfigurationError("--plot needs --out-dir")
    documents = synthetic.make_corpus(n_docs, seed=seed)
    train_docs, test_docs = synthetic.split_corpus(documents)
    vocab = synthetic.oracle_vocabulary(documents)
    model = train(train_docs)

    targets = rank_sensitive_words_nb(model, top_k)
    spec = AttackSpec(max_edits=max_edits, rng_seed=seed)
    revised, log = attack_corpus(test_docs, KeywordTargets(frozenset(targets)), spec, vocab, ['spam'])

    corrector = SpellingCorrector(vocab, synthetic.topic_embeddings(seed),
                                  CorrectorConfig(max_radius=max_radius, window=window_p))
    corrected, result = corrector.correct_corpus(revised)

    reports = {
        'clean': evaluate(model, test_docs),
        'revised': evaluate(model, revised),
        'corrected': evaluate(model, corrected),
    }
    table = accuracy_table(reports)
    click.echo(f"targets: {' '.join(targets)}")
    click.echo(table.to_string(float_format='%.4f'))
    if log.records:
        click.echo(f"correction accuracy {correction_accuracy(log, result):.4f}")

    if out_dir:
        write_corpus(_out_path(out_dir, 'clean.tsv'), test_docs)
        write_corpus(_out_path(out_dir, 'revised.tsv'), revised)
        write_corpus(_out_path(out_dir, 'corrected.tsv'), corrected)
        save_attack_log(log, _out_path(out_dir, 'attack_log.tsv'))
        save_model(model, _out_path(out_dir, 'model.txt'))
        write_table(table, _out_path(out_dir, 'accuracy.tsv'))
        if plot:
            save_accuracy_plot(table, out_dir)
        _write_run_config(RunConfig(
            'demo', seed=seed, out_dir=out_dir, max_edits=max_edits,
            ops_allowed=frozenset(op.value for op in spec.ops_allowed),
            max_radius=max_radius, window_p=window_p, top_k=top_k, extra={'n_docs': n_docs},
        ))


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the command line and translate failures into exit codes

    Returns:
        int: 0 on success, 1 for usage or configuration errors, 2 for bad
            data, 3 for contract violations
    """
    try:
        cli.main(args=argv, prog_name='veilbreak', standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except ConfigurationError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_USAGE
    except ContractViolation as e:
        click.echo(f"internal error: {e}", err=True)
        return EXIT_CONTRACT
    except (VeilbreakError, OSError, ValueError, KeyError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_DATA
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
