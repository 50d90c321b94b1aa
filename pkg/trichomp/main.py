import inspect
import logging
import sys
from typing import Literal, Optional

from jsonargparse import ActionConfigFile, ArgumentParser
from jsonargparse.typing import NonNegativeInt, PositiveInt

from trichomp.config import (
    DEFAULT_CUBIC_BOUND,
    DEFAULT_MEMORY_CEILING,
    DEFAULT_N_MAX,
    DEFAULT_ORACLE_BOUND,
    Config,
    ResourceCeilingError,
    UsageError,
)
from trichomp.game import InvalidPositionError, Position3
from trichomp.io import write_table
from trichomp.oracle import Outcome
from trichomp.play import PlaySession
from trichomp.plot import save_plots
from trichomp.recurrence import TheoremViolation, is_p_position, unique_opening_move, winning_moves
from trichomp.sparse import scan_partition
from trichomp.verify import build_table, check_partition_scan, inject_faults, load_faults, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE_CEILING = 3
EXIT_THEOREM_VIOLATION = 4

Engine = Literal["reference", "sparse"]


def cmd_compute(
    n, engine="sparse", format="csv", out=None, memory_ceiling=DEFAULT_MEMORY_CEILING
):
    config = Config(
        n_max=n,
        engine=engine,
        oracle_bound=None,
        cubic_bound=None,
        format=format,
        memory_ceiling=memory_ceiling,
    )
    table = build_table(config.n_max, config.engine, config.memory_ceiling)
    write_table(table, config.format, out)
    return EXIT_OK


def cmd_move(n, engine="sparse", memory_ceiling=DEFAULT_MEMORY_CEILING):
    if n < 1:
        raise UsageError(f"n must be positive (got {n})")
    table = build_table(n, engine, memory_ceiling)
    print(unique_opening_move(table, n))
    return EXIT_OK


def cmd_query(position, engine="sparse", memory_ceiling=DEFAULT_MEMORY_CEILING):
    pos = Position3.parse(position)
    table = build_table(pos.q, engine, memory_ceiling)
    if is_p_position(table, pos) is Outcome.P:
        print(Outcome.P)
    else:
        winning = "; ".join(str(move) for move in winning_moves(table, pos))
        print(f"{Outcome.N} winning: {winning}")
    return EXIT_OK


def cmd_verify(
    n=DEFAULT_N_MAX,
    engine="sparse",
    oracle_bound=DEFAULT_ORACLE_BOUND,
    cubic_bound=DEFAULT_CUBIC_BOUND,
    memory_ceiling=DEFAULT_MEMORY_CEILING,
    faults=None,
    workers=1,
):
    config = Config(
        n_max=n,
        engine=engine,
        oracle_bound=oracle_bound,
        cubic_bound=cubic_bound,
        memory_ceiling=memory_ceiling,
    )
    table = build_table(config.n_max, config.engine, config.memory_ceiling)
    if faults is not None:
        table = inject_faults(table, load_faults(faults))
    reports = run_suite(
        config.n_max,
        oracle_bound=config.oracle_bound,
        cubic_bound=config.cubic_bound,
        table=table,
        workers=workers,
        memory_ceiling=config.memory_ceiling,
        on_report=lambda report: print(report.to_json(), flush=True),
    )
    failed = [report.check_name for report in reports if not report.passed]
    if failed:
        logger.error("Failed checks: %s", ", ".join(failed))
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_scale(n, memory_ceiling=DEFAULT_MEMORY_CEILING):
    summary = scan_partition(n, memory_ceiling)
    report = check_partition_scan(summary)
    print(report.to_json(), flush=True)
    logger.info("Largest value up to n=%d: %d", n, summary.max_value)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def cmd_play(n, first="human", engine="sparse", memory_ceiling=DEFAULT_MEMORY_CEILING):
    table = build_table(n, engine, memory_ceiling)
    PlaySession(table, n, engine_first=first == "engine").run()
    return EXIT_OK


def cmd_plot(n, out, engine="sparse", memory_ceiling=DEFAULT_MEMORY_CEILING):
    save_plots(build_table(n, engine, memory_ceiling), out)
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "move": cmd_move,
    "query": cmd_query,
    "verify": cmd_verify,
    "scale": cmd_scale,
    "play": cmd_play,
    "plot": cmd_plot,
}


def _subparser(description, engine=True):
    parser = ArgumentParser(description=description, default_env=False)
    parser.add_argument("-c", "--config", action=ActionConfigFile)
    if engine:
        parser.add_argument("--engine", type=Engine, default="sparse")
    parser.add_argument(
        "--memory-ceiling", dest="memory_ceiling", type=PositiveInt, default=DEFAULT_MEMORY_CEILING
    )
    return parser


def build_parser():
    parser = ArgumentParser(
        prog="trichomp", description="Three-row Chomp solver", default_env=False
    )
    parser.add_argument(
        "--log-level",
        dest="log_level",
        type=Literal["DEBUG", "INFO", "WARNING", "ERROR"],
        default="INFO",
    )
    subcommands = parser.add_subcommands(dest="subcommand")

    compute = _subparser("Compute the table and export it")
    compute.add_argument("--n", type=NonNegativeInt, required=True)
    compute.add_argument("--format", type=Literal["csv", "jsonl", "runs", "hdf5"], default="csv")
    compute.add_argument("--out", type=Optional[str], default=None)
    subcommands.add_subcommand("compute", compute)

    move = _subparser("Print the winning opening move of [n, n, n]")
    move.add_argument("--n", type=PositiveInt, required=True)
    subcommands.add_subcommand("move", move)

    query = _subparser("Classify a position and list its winning moves")
    query.add_argument("position", type=str, help="row lengths as 'p,q,r'")
    subcommands.add_subcommand("query", query)

    verify = _subparser("Run the verification suite, one JSON report per line")
    verify.add_argument("--n", type=PositiveInt, default=DEFAULT_N_MAX)
    verify.add_argument(
        "--oracle-bound",
        dest="oracle_bound",
        type=Optional[PositiveInt],
        default=DEFAULT_ORACLE_BOUND,
        help="null skips the brute-force comparison",
    )
    verify.add_argument(
        "--cubic-bound",
        dest="cubic_bound",
        type=Optional[PositiveInt],
        default=DEFAULT_CUBIC_BOUND,
        help="null skips the cubic-cost checks",
    )
    verify.add_argument(
        "--faults", type=Optional[str], default=None, help="YAML list of cells to overwrite"
    )
    verify.add_argument("--workers", type=PositiveInt, default=1)
    subcommands.add_subcommand("verify", verify)

    scale = _subparser("Streaming partition check of the opening moves", engine=False)
    scale.add_argument("--n", type=PositiveInt, required=True)
    subcommands.add_subcommand("scale", scale)

    play = _subparser("Play [n, n, n] against the engine")
    play.add_argument("--n", type=PositiveInt, required=True)
    play.add_argument("--first", type=Literal["human", "engine"], default="human")
    subcommands.add_subcommand("play", play)

    plot = _subparser("Draw the table and the D/S partition")
    plot.add_argument("--n", type=PositiveInt, required=True)
    plot.add_argument("--out", type=str, required=True)
    subcommands.add_subcommand("plot", plot)

    return parser


def cli_main(argv=None):
    """
    Parse the command line and run one subcommand, returning its exit code.

    Usage e.g.: trichomp verify -c configs/verify_default.yaml
    Parse errors exit with code 2 directly.
    """
    cfg = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=cfg.log_level,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        force=True,
    )
    command = COMMANDS[cfg.subcommand]
    parameters = inspect.signature(command).parameters
    arguments = {
        key: value
        for key, value in cfg[cfg.subcommand].as_dict().items()
        if key in parameters
    }
    try:
        return command(**arguments)
    except (UsageError, InvalidPositionError) as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except ResourceCeilingError as err:
        logger.error("%s", err)
        return EXIT_RESOURCE_CEILING
    except TheoremViolation as err:
        logger.error("%s: %s", err, err.dump)
        return EXIT_THEOREM_VIOLATION


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
