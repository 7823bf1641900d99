# Copyright 2025 The qpow developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Command line front end. Every subcommand resolves its parameters from
a preset, then a config file, then explicit flags, runs one engine and
renders the result to standard output or to `--out` together with a
run manifest.

Flags that map onto parameters use the dotted parameter key as their
argparse destination, so flags and config files share one namespace.
"""
import argparse
from argparse import RawTextHelpFormatter
import qpow
from .logging import LOGGER, set_verbosity
from .errors import QPowError, PreconditionError
from .config_parser import load_config, load_preset, MINER_KEY
from .series_io import (RunManifest, ISO_DATE, emit, render_csv, format_number,
                        load_series)
from .econ_model import (BTC_2025, CLASSICAL, QUANTUM, MINER_KINDS, ChainParams,
                         MinerSpec, Market, TABLE1_RATES, TABLE1_FRATES,
                         QUANTUM_CLOCK_TODAY,
                         profit_report, profit_ratio, table1_scenarios)
from .forecast import (GrowthModel, BITCOIN_NETWORK_RATE, DEFAULT_DOUBLING_YEARS,
                       DEFAULT_WINDOW_S, DEFAULT_DEGREE, crossover_time,
                       fit_polynomial, extrapolate_difficulty, years_since_epoch)
from .chain_sim import (SimConfig, AdoptionRule, DETERMINISTIC, SIM_MODES,
                        GENERATOR_ID, run_simulation)
from .grover_toy import (PowInstance, grover_search, classical_search,
                         advantage_report, ideal_speedup)

DAY_S = 24 * 3600.0
DEFAULT_DAYS = 365
DEFAULT_EPOCHS = 10
SIM_HEADER = ("epoch", "difficulty", "elapsed_s", "mean_block_time_s", "quantum_share",
              "classical_reward_share", "g_ratio")
TABLE1_HEADER = ("h_q_hs", "f_usd", "break_even_opex_usd")
CROSSOVER_HEADER = ("year", "network_hs", "quantum_equivalent_hs")


class StoreOnceAction(argparse.Action):
    """
    Store a value; giving the flag again with a different value is a
    usage error.
    """

    def __call__(self, parser, namespace, values, option_string=None):
        previous = getattr(namespace, self.dest, None)
        if previous is not None and previous != values:
            msg = "conflicting values for {}: '{}' and '{}'"
            parser.error(msg.format(option_string, previous, values))
        setattr(namespace, self.dest, values)


def _float_list(text):
    try:
        values = [float(token) for token in text.split(',') if token.strip()]
    except ValueError as error:
        msg = "expected comma separated numbers, got '{}'"
        raise argparse.ArgumentTypeError(msg.format(text)) from error
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _date_or_float(text):
    if ISO_DATE.match(text):
        return text
    try:
        return float(text)
    except ValueError as error:
        msg = "expected a number or an ISO date, got '{}'"
        raise argparse.ArgumentTypeError(msg.format(text)) from error


def _param(params, key, default=None, convert=float):
    """
    Fetch `key` from the resolved parameters and convert it, raising a
    :class:`PreconditionError` that names the key on bad values.
    """
    value = params.get(key, default)
    if value is None:
        return None
    try:
        return convert(value)
    except (TypeError, ValueError) as error:
        msg = "parameter '{}' has an invalid value '{}'"
        raise PreconditionError(msg.format(key, value)) from error


def _param_floats(params, key, default):
    """
    A list of floats under `key`. Parameter files give it as comma
    separated text, or as a single number.
    """
    value = params.get(key, default)
    if isinstance(value, str):
        try:
            return _float_list(value)
        except argparse.ArgumentTypeError as error:
            msg = "parameter '{}' has an invalid value '{}'"
            raise PreconditionError(msg.format(key, value)) from error
    if isinstance(value, (int, float)):
        return [float(value)]
    return list(value)


def _require(params, key, flag):
    if params.get(key) is None:
        msg = "missing parameter '{}'; give it with {} or in a config file"
        raise PreconditionError(msg.format(key, flag))
    return params[key]


def resolve_params(args):
    """
    Merge preset, config file and explicit flags, later sources taking
    precedence.
    """
    params = {}
    if args.preset:
        load_preset(args.preset, params)
    if args.config:
        load_config(args.config, params, subcommand=args.subcommand)
    for key, value in vars(args).items():
        if '.' in key and value is not None:
            params[key] = value
    return params


def build_chain(params, difficulty_key="chain.difficulty"):
    if params.get(difficulty_key) is None:
        difficulty_key = "chain.difficulty"
    return ChainParams(block_time_s=_param(params, "chain.t", BTC_2025.block_time_s),
                       hash_size=_param(params, "chain.eta", BTC_2025.hash_size),
                       difficulty=_param(params, difficulty_key, BTC_2025.difficulty),
                       block_reward=_param(params, "chain.reward", BTC_2025.block_reward),
                       retarget_interval=_param(params, "chain.retarget_interval",
                                                BTC_2025.retarget_interval, int),
                       clamp=_param(params, "chain.clamp"),
                       halving_interval=_param(params, "chain.halving_interval", convert=int),
                       height=_param(params, "chain.height", 0, int))


def build_market(params, flag="--frate"):
    _require(params, "market.rate", flag)
    return Market(_param(params, "market.rate"))


def _timespan_s(params):
    days = _param(params, "timespan.days", DEFAULT_DAYS)
    if not days > 0:
        raise PreconditionError("timespan must be positive, got {} days".format(days))
    return days * DAY_S


def build_miners(params):
    """
    Collect `miners.<i>.*` parameters into :class:`MinerSpec` objects
    ordered by index.
    """
    fields = {}
    for key, value in params.items():
        match = MINER_KEY.match(key)
        if match:
            fields.setdefault(int(match.group(1)), {})[match.group(2)] = value
    miners = []
    for idx in sorted(fields):
        prefix = "miners.{}.".format(idx)
        kind = _param(params, prefix + "kind", convert=str)
        if kind is None or prefix + "rate" not in params:
            raise PreconditionError("miner {} needs both a kind and a rate".format(idx))
        miners.append(MinerSpec(kind,
                                _param(params, prefix + "rate"),
                                _param(params, prefix + "opex", 0.0),
                                _param(params, prefix + "setup", 0.0)))
    return miners


def build_adoption_rule(params):
    if "adoption.threshold" not in params:
        return None
    _require(params, "adoption.rate", "adoption.rate")
    template = MinerSpec(QUANTUM,
                         _param(params, "adoption.rate"),
                         _param(params, "adoption.opex", 0.0),
                         _param(params, "adoption.setup", 0.0))
    return AdoptionRule(threshold=_param(params, "adoption.threshold"),
                        count=_param(params, "adoption.count", 1, int),
                        template=template)


def build_sim_config(params):
    """
    :class:`SimConfig` from resolved parameters. The starting
    difficulty is `sim.difficulty` when given, else `chain.difficulty`.
    """
    miners = build_miners(params)
    if not miners:
        raise PreconditionError("the simulation defines no miners; add miners.<i>.kind and "
                                "miners.<i>.rate entries to the config file")
    return SimConfig(chain=build_chain(params, difficulty_key="sim.difficulty"),
                     miners=miners,
                     market=build_market(params, flag="market.rate"),
                     mode=_param(params, "sim.mode", DETERMINISTIC, str),
                     seed=_param(params, "sim.seed", 0, int),
                     epochs=_param(params, "sim.epochs", DEFAULT_EPOCHS, int),
                     adoption_rule=build_adoption_rule(params))


def _manifest(args, params):
    recorded = {key: (",".join(format_number(item) for item in value)
                      if isinstance(value, list) else value)
                for key, value in params.items()}
    return RunManifest(subcommand=args.subcommand,
                       params=recorded,
                       seed=_param(params, "sim.seed", 0, int),
                       version=qpow.__version__,
                       generator=GENERATOR_ID)


def _emit(args, params, text):
    emit(text, args.out, _manifest(args, params))


def _usd(value):
    return "{:.2f}".format(value)


def _key_values(pairs):
    return "".join("{}={}\n".format(key, value) for key, value in pairs)


def cmd_profit(args):
    """
    Probability, income and profit of one miner; with a compare miner
    of the other kind also the profit ratio G.
    """
    params = resolve_params(args)
    kind = _require(params, "profit.mode", "--mode")
    if kind not in MINER_KINDS:
        raise PreconditionError("unknown miner kind '{}'".format(kind))
    chain = build_chain(params)
    market = build_market(params)
    timespan_s = _timespan_s(params)
    _require(params, "profit.rate", "--rate")
    miner = MinerSpec(kind,
                      _param(params, "profit.rate"),
                      _param(params, "profit.opex", 0.0),
                      _param(params, "profit.setup", 0.0))
    report = profit_report(miner, chain, market, timespan_s)
    lines = [("block_probability", "{:.5e}".format(report.block_probability)),
             ("income_usd", _usd(report.income_usd)),
             ("profit_usd", _usd(report.profit_usd))]

    if params.get("profit.compare_rate") is not None:
        other = MinerSpec(QUANTUM if kind == CLASSICAL else CLASSICAL,
                          _param(params, "profit.compare_rate"),
                          _param(params, "profit.compare_opex", 0.0),
                          _param(params, "profit.compare_setup", 0.0))
        other_report = profit_report(other, chain, market, timespan_s)
        classical, quantum = (miner, other) if kind == CLASSICAL else (other, miner)
        ratio = profit_ratio(classical, quantum, chain, market, timespan_s)
        lines.extend([("compare_block_probability",
                       "{:.5e}".format(other_report.block_probability)),
                      ("compare_income_usd", _usd(other_report.income_usd)),
                      ("compare_profit_usd", _usd(other_report.profit_usd)),
                      ("profit_ratio_G", "{:.6g}".format(ratio))])
    _emit(args, params, _key_values(lines))


def cmd_table1(args):
    """
    Break-even operating cost per year for each quantum rate and fiat
    conversion rate.
    """
    params = resolve_params(args)
    rates = _param_floats(params, "table1.rates", TABLE1_RATES)
    frates = _param_floats(params, "table1.frates", TABLE1_FRATES)
    rows = table1_scenarios(chain=build_chain(params), rates=rates, frates=frates,
                            timespan_s=_timespan_s(params))
    lines = [",".join(TABLE1_HEADER)]
    for row in rows:
        lines.append("{:.10g},{},{}".format(row.h_q, _usd(row.f_usd),
                                            _usd(row.break_even_opex_usd)))
    _emit(args, params, "\n".join(lines) + "\n")


def cmd_crossover(args):
    """
    Network hash rate against the equivalent rate of a single quantum
    device, and the year the device catches up.
    """
    params = resolve_params(args)
    network_doubling = _param(params, "network.doubling", DEFAULT_DOUBLING_YEARS)
    network = GrowthModel(_param(params, "network.rate", BITCOIN_NETWORK_RATE),
                          network_doubling)
    quantum = GrowthModel(_param(params, "quantum.clock", QUANTUM_CLOCK_TODAY),
                          _param(params, "quantum.doubling", network_doubling),
                          quadratic_equivalent=True,
                          window_s=_param(params, "quantum.window", DEFAULT_WINDOW_S))
    result = crossover_time(network, quantum,
                            horizon_years=_param(params, "crossover.horizon"),
                            step_years=_param(params, "crossover.step", 0.1))
    text = render_csv(CROSSOVER_HEADER, result.series)
    if result.already_crossed:
        text += "already_crossed=true\n"
    else:
        text += "crossover_years={:.4f}\n".format(result.years_until_crossover)
    _emit(args, params, text)


def cmd_simulate(args):
    """
    Per-epoch statistics of a chain simulation defined in a config
    file.
    """
    params = resolve_params(args)
    config = build_sim_config(params)
    history = run_simulation(config)
    rows = [(stats.epoch_index, stats.difficulty_start, stats.elapsed_s,
             stats.mean_block_time_s, stats.quantum_share, stats.classical_reward_share,
             stats.profit_ratio_G) for stats in history]
    _emit(args, params, render_csv(SIM_HEADER, rows))


def cmd_grover(args):
    """
    Simulated quantum search on a toy PoW instance next to the
    classical cost of the same instance.
    """
    params = resolve_params(args)
    _require(params, "grover.n_bits", "--bits")
    n_bits = _param(params, "grover.n_bits", convert=int)
    instance = PowInstance.from_header(_param(params, "grover.header", 1, int), n_bits,
                                       _param(params, "grover.target", 0, int))
    report = advantage_report(instance)
    iterations = _param(params, "grover.iterations", report.grover_queries, int)
    success, queries = grover_search(instance, iterations)
    tries, _ = classical_search(instance, seed=_param(params, "sim.seed", 0, int))
    lines = [("N", instance.N),
             ("M", instance.M),
             ("k_opt", report.grover_queries),
             ("oracle_queries", queries),
             ("success_probability", "{:.9f}".format(success)),
             ("classical_expected_tries", format_number(report.classical_expected)),
             ("classical_sampled_tries", tries),
             ("verify_ops", report.verify_ops),
             ("ideal_speedup", format_number(ideal_speedup(n_bits)))]
    _emit(args, params, _key_values(lines))


def cmd_extrapolate(args):
    """
    Least-squares polynomial through a difficulty history, evaluated
    at a later x.
    """
    params = resolve_params(args)
    history = load_series(_require(params, "extrapolate.history", "--history"))
    degree = _param(params, "extrapolate.degree", DEFAULT_DEGREE, int)
    fit = fit_polynomial([(record.x, record.y) for record in history], degree)
    at = _require(params, "extrapolate.at", "--at")
    x_value = years_since_epoch(at) if isinstance(at, str) else float(at)
    value = extrapolate_difficulty(fit, x_value)
    lines = [("coefficients", ",".join(format_number(coef) for coef in fit.coefficients)),
             ("residual_rms", format_number(fit.residual_rms)),
             ("x", format_number(x_value)),
             ("extrapolated", format_number(value))]
    _emit(args, params, _key_values(lines))


def _chain_parser():
    parser = argparse.ArgumentParser(add_help=False)
    chain_group = parser.add_argument_group('Chain parameters (default Bitcoin 2025)')
    chain_group.add_argument('--block-time', dest='chain.t', type=float,
                             help='target block time t in seconds')
    chain_group.add_argument('--hash-size', dest='chain.eta', type=float,
                             help='hash size constant eta')
    chain_group.add_argument('--difficulty', dest='chain.difficulty', type=float,
                             help='difficulty D')
    chain_group.add_argument('--reward', dest='chain.reward', type=float,
                             help='block reward B in coins')
    chain_group.add_argument('--retarget-interval', dest='chain.retarget_interval', type=int,
                             help='blocks between difficulty adjustments')
    chain_group.add_argument('--clamp', dest='chain.clamp', type=float,
                             help='bound c on a single adjustment D\'/D in [1/c, c]')
    chain_group.add_argument('--halving-interval', dest='chain.halving_interval', type=int,
                             help='blocks between reward halvings')
    chain_group.add_argument('--height', dest='chain.height', type=int,
                             help='chain height of the first simulated block')
    market_group = parser.add_argument_group('Market')
    market_group.add_argument('--frate', dest='market.rate', type=float,
                              help='conversion rate in USD per coin')
    market_group.add_argument('--days', dest='timespan.days', type=float,
                              help='timespan T in days (default 365)')
    return parser


def build_parser():
    """
    The argument parser with one subparser per subcommand.
    """
    common = argparse.ArgumentParser(add_help=False)
    common_group = common.add_argument_group('Run options')
    common_group.add_argument('--seed', dest='sim.seed', type=int,
                              help='seed of the random generator')
    common_group.add_argument('--config', dest='config', type=str,
                              help='parameter file with key = value lines')
    common_group.add_argument('--preset', dest='preset', type=str,
                              help='named parameter set, e.g. btc-2025, monero or etc')
    common_group.add_argument('--out', dest='out', type=str,
                              help='output file; a manifest is written next to it')
    common_group.add_argument('-v', '--verbosity', dest='verbosity', action='count', default=0,
                              help='enable debug logging output')
    chain = _chain_parser()

    parser = argparse.ArgumentParser(description="Quantum advantage in proof-of-work mining",
                                     formatter_class=RawTextHelpFormatter)
    parser.add_argument('-V', '--version', action='version',
                        version='%(prog)s ' + qpow.__version__)
    subparsers = parser.add_subparsers(title='subcommands', dest='subcommand')
    subparsers.required = True

    profit = subparsers.add_parser('profit', parents=[common, chain],
                                   help='profit of a classical or quantum miner')
    profit.add_argument('--mode', dest='profit.mode', choices=MINER_KINDS,
                        action=StoreOnceAction, help='kind of the miner')
    profit.add_argument('--rate', dest='profit.rate', type=float,
                        help='hash rate, or equivalent hash rate for quantum miners')
    profit.add_argument('--opex', dest='profit.opex', type=float,
                        help='operating cost in USD per year')
    profit.add_argument('--setup', dest='profit.setup', type=float, help='setup cost in USD')
    profit.add_argument('--compare-rate', dest='profit.compare_rate', type=float,
                        help='rate of a miner of the other kind; enables the profit ratio')
    profit.add_argument('--compare-opex', dest='profit.compare_opex', type=float)
    profit.add_argument('--compare-setup', dest='profit.compare_setup', type=float)
    profit.set_defaults(func=cmd_profit)

    table1 = subparsers.add_parser('table1', parents=[common, chain],
                                   help='break-even operating costs of quantum miners')
    table1.add_argument('--rates', dest='table1.rates', type=_float_list,
                        help='comma separated quantum equivalent hash rates')
    table1.add_argument('--frates', dest='table1.frates', type=_float_list,
                        help='comma separated conversion rates in USD per coin')
    table1.set_defaults(func=cmd_table1)

    crossover = subparsers.add_parser('crossover', parents=[common],
                                      help='year a quantum device out-mines the network')
    crossover.add_argument('--network-rate', dest='network.rate', type=float,
                           help='network hash rate today')
    crossover.add_argument('--network-doubling', dest='network.doubling', type=float,
                           help='doubling period of the network rate in years')
    crossover.add_argument('--clock', dest='quantum.clock', type=float,
                           help='quantum clock rate today in cycles per second')
    crossover.add_argument('--quantum-doubling', dest='quantum.doubling', type=float,
                           help='doubling period of the clock rate; defaults to the network one')
    crossover.add_argument('--window', dest='quantum.window', type=float,
                           help='accounting window in seconds')
    crossover.add_argument('--horizon', dest='crossover.horizon', type=float,
                           help='series extent in years')
    crossover.add_argument('--step', dest='crossover.step', type=float,
                           help='series step in years')
    crossover.set_defaults(func=cmd_crossover)

    simulate = subparsers.add_parser('simulate', parents=[common, chain],
                                     help='epoch by epoch chain simulation')
    simulate.add_argument('--mode', dest='sim.mode', choices=SIM_MODES,
                          action=StoreOnceAction)
    simulate.add_argument('--epochs', dest='sim.epochs', type=int)
    simulate.add_argument('--start-difficulty', dest='sim.difficulty', type=float)
    simulate.set_defaults(func=cmd_simulate)

    grover = subparsers.add_parser('grover', parents=[common],
                                   help='quantum search on a toy PoW instance')
    grover.add_argument('--bits', dest='grover.n_bits', type=int,
                        help='nonce and digest width n in [2, 24]')
    grover.add_argument('--header', dest='grover.header', type=int,
                        help='32-bit block header (default 1)')
    grover.add_argument('--target', dest='grover.target', type=int,
                        help='largest accepted digest (default 0)')
    grover.add_argument('--iterations', dest='grover.iterations', type=int,
                        help='Grover iterations; defaults to the optimal count')
    grover.set_defaults(func=cmd_grover)

    extrapolate = subparsers.add_parser('extrapolate', parents=[common],
                                        help='polynomial extrapolation of a difficulty history')
    extrapolate.add_argument('--history', dest='extrapolate.history', type=str,
                             help='CSV file with header x,y')
    extrapolate.add_argument('--degree', dest='extrapolate.degree', type=int,
                             help='polynomial degree (default 2)')
    extrapolate.add_argument('--at', dest='extrapolate.at', type=_date_or_float,
                             help='x value or ISO date to extrapolate to')
    extrapolate.set_defaults(func=cmd_extrapolate)
    return parser


def main(argv=None):
    """
    Run the command line interface and return the exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code

    set_verbosity(args.verbosity)
    try:
        args.func(args)
    except QPowError as error:
        LOGGER.error("{}", error)
        return error.exit_code
    except OSError as error:
        LOGGER.error("{}", error)
        return 1
    return 0
