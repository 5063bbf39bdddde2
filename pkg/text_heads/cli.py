"""
Command-line entry point: split, train, eval, predict, bench, gradcheck and gen-synth
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, NoReturn, Optional, Sequence

from .config_service import CONFIG_KEYS, ConfigService
from .constants import BENCH_BATCH_SIZES, SEED, ExitCode, HeadKind
from .exceptions import (
    CheckpointError,
    ConfigError,
    FormatError,
    GraphError,
    LabelError,
    NumericError,
    ParameterError,
    ParseError,
    ShapeError,
    SizeError,
    VocabularyError
)
from .grad_check_service import GradCheckService
from .pipeline_service import PipelineService
from .schemes import SplitSpec
from .synth_service import SynthService
from .training import CheckpointService, TrainingService


__all__ = ['build_parser', 'main', 'run']


logger = logging.getLogger(__name__)


DATA_ERRORS = (
    ParseError,
    LabelError,
    FormatError,
    VocabularyError,
    SizeError,
    ShapeError,
    ParameterError,
    CheckpointError,
    OSError
)
NUMERIC_ERRORS = (NumericError, GraphError)

SPLIT_FILES = ('train.tsv', 'val.tsv', 'test.tsv')


class ParserExit(Exception):

    def __init__(self, status: int):
        self.status = status
        super().__init__(status)


class ArgumentParser(argparse.ArgumentParser):
    """
    usage errors surface as ConfigError and --help as ParserExit, run turns both into exit codes
    """

    def error(self, message: str) -> NoReturn:
        raise ConfigError(f'{self.prog}: {message}')

    def exit(self, status: int = 0, message: Optional[str] = None) -> NoReturn:
        if message:
            sys.stderr.write(message)
        raise ParserExit(status)


def _flag(key: str) -> str:
    return '--' + key.replace('_', '-')


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('configuration overrides')
    for key in CONFIG_KEYS:
        group.add_argument(_flag(key), dest=f'cfg_{key}', default=None, metavar='VALUE')


def _int_list(raw: str, option: str) -> List[int]:
    try:
        values = [int(part) for part in raw.split(',') if part.strip()]
    except ValueError:
        raise ConfigError(f'{option} expects comma-separated integers, got {raw!r}')
    if not values or any(value < 1 for value in values):
        raise ConfigError(f'{option} expects positive integers, got {raw!r}')
    return values


def _config_values(args: argparse.Namespace) -> Dict[str, str]:
    file_values = ConfigService.parse_file(args.config) if args.config else {}
    flag_values = {key: getattr(args, f'cfg_{key}') for key in CONFIG_KEYS}
    return ConfigService.merge(file_values, flag_values)


def _write_or_print(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding='utf-8')


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='text-heads', description='Binary text classification with five head architectures')
    parser.add_argument('-v', '--verbose', action='store_true', help='log progress to standard error')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    split = commands.add_parser('split', help='seeded 64/16/20 train/val/test split of a dataset file')
    split.add_argument('--data', required=True)
    split.add_argument('--seed', type=int, default=SEED)
    split.add_argument('--out-dir', required=True)
    split.set_defaults(handler=_split)

    train = commands.add_parser('train', help='train one classifier and save its best-epoch checkpoint')
    train.add_argument('--config')
    train.add_argument('--train', required=True)
    train.add_argument('--val', required=True)
    train.add_argument('--out', required=True, help='checkpoint path')
    train.add_argument('--report', help='report path, standard output when omitted')
    train.add_argument('--omit-time', action='store_true', help='write --:--:-- in place of wall times')
    _add_config_flags(train)
    train.set_defaults(handler=_train)

    evaluate = commands.add_parser('eval', help='loss and accuracy of a checkpoint on a dataset file')
    evaluate.add_argument('--model', required=True)
    evaluate.add_argument('--data', required=True)
    evaluate.add_argument('--head', help='head kind the checkpoint must hold')
    evaluate.add_argument('--out')
    evaluate.set_defaults(handler=_eval)

    predict = commands.add_parser('predict', help='label and probability of one sentence')
    predict.add_argument('--model', required=True)
    predict.add_argument('--text', required=True)
    predict.set_defaults(handler=_predict)

    bench = commands.add_parser('bench', help='train every (head, batch size) cell and tabulate the results')
    bench.add_argument('--config')
    bench.add_argument('--train', required=True)
    bench.add_argument('--val', required=True)
    bench.add_argument('--heads', default=','.join(kind.value for kind in HeadKind))
    bench.add_argument('--batch-sizes', default=','.join(str(size) for size in BENCH_BATCH_SIZES))
    bench.add_argument('--jobs', type=int, default=1)
    bench.add_argument('--report', help='report path, standard output when omitted')
    bench.add_argument('--omit-time', action='store_true', help='write --:--:-- in place of wall times')
    _add_config_flags(bench)
    bench.set_defaults(handler=_bench)

    gradcheck = commands.add_parser('gradcheck', help='compare analytic and finite-difference gradients')
    gradcheck.add_argument('scope', choices=('ops', 'model'))
    gradcheck.add_argument('--seed', type=int, default=SEED)
    gradcheck.set_defaults(handler=_gradcheck)

    gen_synth = commands.add_parser('gen-synth', help='write a synthetic labelled corpus')
    gen_synth.add_argument('--n', type=int, required=True)
    gen_synth.add_argument('--seed', type=int, default=SEED)
    gen_synth.add_argument('--out', required=True)
    gen_synth.set_defaults(handler=_gen_synth)
    return parser


def _split(args: argparse.Namespace) -> ExitCode:
    dataset = PipelineService.load_dataset(args.data)
    splits = PipelineService.split_dataset(dataset, SplitSpec(seed=args.seed))
    out_dir = Path(args.out_dir)
    for filename, split in zip(SPLIT_FILES, splits):
        PipelineService.write_dataset(out_dir / filename, split)
    train, val, test = splits
    sys.stdout.write(f'train\t{len(train)}\nval\t{len(val)}\ntest\t{len(test)}\n')
    return ExitCode.SUCCESS


def _train(args: argparse.Namespace) -> ExitCode:
    config = ConfigService.train_config(_config_values(args))
    train_set = PipelineService.load_dataset(args.train)
    val_set = PipelineService.load_dataset(args.val)
    model, report = TrainingService.train(train_set, val_set, config)
    CheckpointService.save(model, args.out)
    _write_or_print(TrainingService.render_run_report(report, include_time=not args.omit_time), args.report)
    return ExitCode.SUCCESS


def _eval(args: argparse.Namespace) -> ExitCode:
    expected_kind = ConfigService.head_kind(args.head) if args.head else None
    model = CheckpointService.load(args.model, expected_kind=expected_kind)
    metrics = TrainingService.evaluate(model, PipelineService.load_dataset(args.data))
    _write_or_print(f'loss\t{metrics.loss:.6f}\naccuracy\t{metrics.accuracy:.6f}\n', args.out)
    return ExitCode.SUCCESS


def _predict(args: argparse.Namespace) -> ExitCode:
    model = CheckpointService.load(args.model)
    label, probability = model.predict(args.text)
    sys.stdout.write(f'{label}\t{probability:.6f}\n')
    return ExitCode.SUCCESS


def _bench(args: argparse.Namespace) -> ExitCode:
    values = _config_values(args)
    config = ConfigService.train_config(values)
    head_kinds = [ConfigService.head_kind(raw) for raw in args.heads.split(',') if raw.strip()]
    if not head_kinds:
        raise ConfigError('--heads names no head')
    head_configs = [ConfigService.head_config(kind, values) for kind in head_kinds]
    batch_sizes = _int_list(args.batch_sizes, '--batch-sizes')
    if args.jobs < 1:
        raise ConfigError(f'--jobs must be at least 1, got {args.jobs}')

    report = TrainingService.bench(
        head_configs,
        PipelineService.load_dataset(args.train),
        PipelineService.load_dataset(args.val),
        config,
        batch_sizes=batch_sizes,
        jobs=args.jobs
    )
    _write_or_print(TrainingService.render_bench_report(report, include_time=not args.omit_time), args.report)
    return ExitCode.SUCCESS


def _gradcheck(args: argparse.Namespace) -> ExitCode:
    if args.scope == 'ops':
        results = GradCheckService.ops_suite(args.seed)
    else:
        results = GradCheckService.model_suite(args.seed)
    sys.stdout.write(GradCheckService.render(results))
    failed = [result.name for result in results if not result.passed]
    if failed:
        sys.stderr.write(f'error: gradient check failed for {", ".join(failed)}\n')
        return ExitCode.NUMERIC
    return ExitCode.SUCCESS


def _gen_synth(args: argparse.Namespace) -> ExitCode:
    SynthService.gen_synth(args.n, args.seed, args.out)
    return ExitCode.SUCCESS


def _fail(code: ExitCode, message: str) -> int:
    sys.stderr.write(f'error: {" ".join(message.split())}\n')
    return code.value


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    :return: process exit code, 0 on success
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            stream=sys.stderr,
            format='%(asctime)s %(levelname)s %(name)s: %(message)s'
        )
        return args.handler(args).value
    except ParserExit as e:
        return e.status
    except ConfigError as e:
        return _fail(ExitCode.USAGE, e.message)
    except NUMERIC_ERRORS as e:
        return _fail(ExitCode.NUMERIC, e.message)
    except DATA_ERRORS as e:
        return _fail(ExitCode.DATA, getattr(e, 'message', None) or str(e))


def main() -> None:
    sys.exit(run(sys.argv[1:]))
