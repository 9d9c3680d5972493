#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import argparse
import os
import sys
from datetime import datetime, timezone

from .analysis import (EXPONENTIAL, analyse_sampleset, check_timetable, export_train_diagram, fit_scaling, spectrum_summary,
                       total_variation_distance)
from .document_utils import (dump_json, load_histogram_csv, parse_document, parse_instance, parse_qubo, parse_sampleset, qubo_comments,
                             write_catalog, write_document, write_histogram, write_instance, write_ising, write_qubo, write_sampleset,
                             write_train_diagram)
from .errors import ParameterException, ParseException, RailschedException
from .file_utils import digest_text, write_if_changed
from .hybrid_orchestrator import run_hybrid
from .ilp_engine import build_ilp, solve_exact, sweep_stochastic, sweep_to_json
from .ising_engine import to_ising
from .log_utils import LOG_FILENAME_ENV, get_logger
from .network_model import compute_time_windows
from .qubo_engine import assemble
from .samplers import ENUMERATE, enumerate_spectrum, sample_qubo
from .utils import (catalog_path, get_instance_by_params, get_penalties_by_params, get_sampler_config_by_params, get_seed,
                    parse_edge)

NUMPY_IMPORT_ERR = None
try:
    import numpy  # noqa: F401
    HAS_NUMPY = True
except ImportError as e:
    HAS_NUMPY = False
    NUMPY_IMPORT_ERR = str(e)

VERSION = '1.0.0'
STDIO = '-'

logger = get_logger('railsched.cli')


class Context:
    """
    State of one command line run: parsed arguments, inputs read and
    outputs written, so every output can be given its manifest.
    """

    def __init__(self, argv, args):
        self.argv = list(argv)
        self.args = args
        self.inputs = dict()
        self.seeds = dict()

    def read(self, path):
        if path == STDIO:
            text = sys.stdin.read()
        else:
            if not os.path.isfile(path):
                raise ParseException('No such file', path)
            with open(path, 'r') as file:
                text = file.read()
        self.inputs[path] = digest_text(text)
        return text

    def write(self, path, text):
        if path is None or path == STDIO:
            sys.stdout.write(text)
            return
        write_if_changed(path, text)
        manifest = dict(
            command_line=['railsched'] + self.argv,
            seeds=self.seeds,
            inputs=[dict(path=name, sha256=value) for name, value in sorted(self.inputs.items())],
            tool_version=VERSION,
            timestamp=datetime.now(timezone.utc).isoformat()
        )
        with open(f'{path}.manifest.json', 'w') as file:
            file.write(dump_json(manifest))


def add_penalty_arguments(parser):
    parser.add_argument('--penalties', choices=['overlapping', 'split', 'custom'], default='split', help='penalty regime (default: split)')
    parser.add_argument('--p-sum', type=float, help='one-hot penalty for --penalties custom')
    parser.add_argument('--p-pair', type=float, help='pair penalty for --penalties custom')
    parser.add_argument('--penalty-override', action='append', default=list(), metavar='FAMILY=VALUE',
                        help='pair penalty for one family (passing, headway or rollingstock); may be repeated')


def add_sampler_arguments(parser):
    parser.add_argument('--backend', choices=['enumerate', 'anneal', 'qaoa'], default='enumerate', help='sampler backend (default: enumerate)')
    parser.add_argument('--shots', type=int, help='number of samples (anneal: 1000, qaoa: 1024)')
    parser.add_argument('--sweeps', type=int, help='Metropolis sweeps per shot (default: 1000)')
    parser.add_argument('--beta-min', type=float, help='initial inverse temperature (default: 0.1)')
    parser.add_argument('--beta-max', type=float, help='final inverse temperature (default: 10.0)')
    parser.add_argument('--no-pair-moves', action='store_true', help='anneal with single spin flips only')
    parser.add_argument('--layers', type=int, help='QAOA layers (default: 1)')
    parser.add_argument('--max-evaluations', type=int, help='QAOA circuit evaluations for the angle search (default: 50)')
    parser.add_argument('--noise', type=float, help='global depolarizing mix lambda in [0, 1] (default: 0)')
    parser.add_argument('--calibrated-noise', action='store_true', help='derive lambda from the two-qubit gate count')
    parser.add_argument('--two-qubit-error', type=float, help='two-qubit gate error for --calibrated-noise (default: 0.0425)')


def build_parser():
    parser = argparse.ArgumentParser(prog='railsched', description='Railway rescheduling with ILP, QUBO and sampler emulation.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    parser.add_argument('--seed', type=int, help='random seed (default: $RAILSCHED_SEED, else 0)')
    parser.add_argument('--threads', type=int, default=1, help='worker threads; 1 guarantees determinism (default: 1)')
    parser.add_argument('--log-file', help='write JSON debug logs to this file')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    generate = subparsers.add_parser('generate', help='write an instance document')
    generate.add_argument('--appendix', action='store_true', help='the two-train reference instance')
    generate.add_argument('--initial-delay', type=int, help='initial delay of train 1 in the reference instance (default: 5)')
    generate.add_argument('--trains', type=int, help='number of trains of a family instance')
    generate.add_argument('--dmax', type=int, help='maximal secondary delay d_max')
    generate.add_argument('--disturbed', action='store_true', help='inject seeded initial delays')
    generate.add_argument('--disturbance-support', type=int, nargs='+', help='extra delays w of the stochastic zone')
    generate.add_argument('--disturbance-weights', type=float, nargs='+', help='probability of each extra delay')
    generate.add_argument('-o', '--output', default=STDIO)

    qubo = subparsers.add_parser('qubo', help='compile an instance into a QUBO file')
    qubo.add_argument('instance', nargs='?', default=STDIO)
    add_penalty_arguments(qubo)
    qubo.add_argument('--ising-out', help='also write the Ising model to this file')
    qubo.add_argument('-o', '--output', default=STDIO)

    ilp = subparsers.add_parser('ilp-solve', help='solve an instance exactly')
    ilp.add_argument('instance', nargs='?', default=STDIO)
    ilp.add_argument('--stochastic-edge', action='append', default=list(), metavar='FROM:TO',
                     help='sweep the disturbance model over this edge; may be repeated')
    ilp.add_argument('-o', '--output', default=STDIO)

    solve = subparsers.add_parser('solve', help='sample a QUBO file')
    solve.add_argument('qubo', nargs='?', default=STDIO)
    add_sampler_arguments(solve)
    solve.add_argument('--limit', type=int, default=1024, help='states written by the enumerate backend (default: 1024)')
    solve.add_argument('-o', '--output', default=STDIO)

    spectrum = subparsers.add_parser('spectrum', help='enumerate and summarise the spectrum of an instance')
    spectrum.add_argument('instance', nargs='?', default=STDIO)
    add_penalty_arguments(spectrum)
    spectrum.add_argument('--bins', type=int, default=50, help='energy histogram bins (default: 50)')
    spectrum.add_argument('--samples-out', help='also write the full spectrum as a sample file')
    spectrum.add_argument('-o', '--output', default=STDIO)

    analyze = subparsers.add_parser('analyze', help='decode and analyse a sample file')
    analyze.add_argument('samples', nargs='?', default=STDIO)
    analyze.add_argument('--instance', required=True, help='instance document the samples were drawn for')
    analyze.add_argument('--relaxed', action='store_true', help='admit passing violations in the histogram')
    analyze.add_argument('--edge', default='MR:CS', help='edge of the passing time histogram (default: MR:CS)')
    analyze.add_argument('--histogram-out', help='write the passing time histogram CSV here')
    analyze.add_argument('--diagram-out', help='write the train diagram CSV of the best feasible sample here')
    analyze.add_argument('--compare', help='histogram CSV to compare against by total variation distance')
    analyze.add_argument('-o', '--output', default=STDIO)

    hybrid = subparsers.add_parser('hybrid', help='run the hybrid sampler and ILP loop')
    hybrid.add_argument('instance', nargs='?', default=STDIO)
    hybrid.add_argument('--zone', default='MR,CS', help='comma separated stochastic stations (default: MR,CS)')
    hybrid.add_argument('--iterations', type=int, default=5, help='iteration cap (default: 5)')
    hybrid.add_argument('--representatives', type=int, default=3, help='sub-solutions per iteration (default: 3)')
    hybrid.add_argument('--disturbance-threshold', type=float, help='reject iterations whose passing statistics are further than this')
    add_penalty_arguments(hybrid)
    add_sampler_arguments(hybrid)
    hybrid.add_argument('-o', '--output', default=STDIO)

    report = subparsers.add_parser('report', help='summarise sample, spectrum and analysis files')
    report.add_argument('inputs', nargs='+')
    report.add_argument('--instance', help='instance document for decoding sample files')
    report.add_argument('--json-out', help='machine readable summary')
    report.add_argument('-o', '--output', default=STDIO)
    return parser


def penalty_params(args):
    overrides = dict()
    for value in args.penalty_override:
        family, separator, penalty = value.partition('=')
        if not separator:
            raise ParameterException('InvalidPenalty', f'Penalty override {value} must be given as FAMILY=VALUE')
        try:
            overrides[family] = float(penalty)
        except ValueError:
            raise ParameterException('InvalidPenalty', f'Penalty override {value} has no numeric value')
    return dict(penalties=args.penalties, p_sum=args.p_sum, p_pair=args.p_pair, penalty_overrides=overrides)


def sampler_params(args, seed):
    return dict(
        seed=seed,
        shots=args.shots,
        sweeps=args.sweeps,
        beta_min=args.beta_min,
        beta_max=args.beta_max,
        pair_moves=not args.no_pair_moves,
        layers=args.layers,
        max_evaluations=args.max_evaluations,
        noise=args.noise,
        calibrated_noise=args.calibrated_noise,
        two_qubit_error=args.two_qubit_error
    )


def parse_instance_input(context, path):
    return parse_instance(context.read(path), None if path == STDIO else path)


def command_generate(context):
    args = context.args
    context.seeds['instance'] = args.seed
    instance = get_instance_by_params(dict(
        appendix=args.appendix,
        initial_delay=args.initial_delay,
        trains=args.trains,
        d_max=args.dmax,
        disturbed=args.disturbed,
        seed=args.seed,
        disturbance_support=args.disturbance_support,
        disturbance_weights=args.disturbance_weights
    ), log=logger)
    context.write(args.output, write_instance(instance))


def command_qubo(context):
    args = context.args
    instance = parse_instance_input(context, args.instance)
    penalties = get_penalties_by_params(penalty_params(args))
    qubo = assemble(instance, compute_time_windows(instance), penalties, log=logger)
    context.write(args.output, write_qubo(qubo, qubo_comments(qubo, penalties)))
    if args.output != STDIO:
        context.write(catalog_path(args.output), write_catalog(qubo.catalog))
    if args.ising_out:
        context.write(args.ising_out, write_ising(to_ising(qubo)))


def command_ilp_solve(context):
    args = context.args
    instance = parse_instance_input(context, args.instance)
    windows = compute_time_windows(instance)
    model = build_ilp(instance, windows)
    solution = solve_exact(model, log=logger)
    document = dict(
        solution=solution.to_json(),
        violations=[violation.to_json() for violation in check_timetable(instance, solution.times)] if solution.is_optimal() else list()
    )
    if args.stochastic_edge:
        if instance.disturbance is None:
            raise ParameterException('MissingDisturbanceModel', 'Sweeping stochastic edges needs an instance with a disturbance model')
        edges = [parse_edge(edge) for edge in args.stochastic_edge]
        sweep = sweep_stochastic(instance, windows, instance.disturbance, edges, workers=args.threads, log=logger)
        document['sweep'] = sweep_to_json(instance.disturbance, sweep)
    context.write(args.output, write_document('ilp-solution', document))


def command_solve(context):
    args = context.args
    qubo = parse_qubo(context.read(args.qubo), filename=None if args.qubo == STDIO else args.qubo)
    context.seeds['sampler'] = args.seed
    config = None
    if args.backend != ENUMERATE:
        config = get_sampler_config_by_params(args.backend, sampler_params(args, args.seed), to_ising(qubo))
    sampleset = sample_qubo(qubo, args.backend, config, limit=args.limit, log=logger)
    context.write(args.output, write_sampleset(sampleset))


def command_spectrum(context):
    args = context.args
    instance = parse_instance_input(context, args.instance)
    qubo = assemble(instance, compute_time_windows(instance), get_penalties_by_params(penalty_params(args)), log=logger)
    spectrum = enumerate_spectrum(qubo, log=logger)
    summary = spectrum_summary(spectrum, qubo, instance, bins=args.bins, log=logger)
    document = dict(summary.to_json(), nvars=qubo.n, qubo=qubo.summary())
    context.write(args.output, write_document('spectrum', document))
    if args.samples_out:
        context.write(args.samples_out, write_sampleset(spectrum.to_sampleset()))


def command_analyze(context):
    args = context.args
    instance = parse_instance_input(context, args.instance)
    sampleset = parse_sampleset(context.read(args.samples), None if args.samples == STDIO else args.samples)
    edge = parse_edge(args.edge)
    document, histogram, best = analyse_sampleset(instance, sampleset, edge, args.relaxed)
    if args.compare:
        reference = load_histogram_csv(context.read(args.compare), args.compare, edge)
        document['total_variation_distance'] = total_variation_distance(histogram, reference) if not histogram.empty else None
    if args.histogram_out:
        context.write(args.histogram_out, write_histogram(histogram))
    if args.diagram_out and best is not None:
        context.write(args.diagram_out, write_train_diagram(export_train_diagram(best, instance)))
    context.write(args.output, write_document('analysis', document))


def command_hybrid(context):
    args = context.args
    instance = parse_instance_input(context, args.instance)
    context.seeds['sampler'] = args.seed
    config = None
    if args.backend != ENUMERATE:
        config = get_sampler_config_by_params(args.backend, sampler_params(args, args.seed))
    result = run_hybrid(
        instance,
        [station.strip() for station in args.zone.split(',') if station.strip()],
        backend=args.backend,
        budget=args.iterations,
        k_representatives=args.representatives,
        penalties=get_penalties_by_params(penalty_params(args)),
        sampler_config=config,
        disturbance_threshold=args.disturbance_threshold,
        workers=args.threads,
        log=logger
    )
    context.write(args.output, write_document('hybrid', result.to_json()))


def summarise_input(context, path, instance):
    """
    One report section per input file, keyed by what the file holds.
    """
    text = context.read(path)
    if text.lstrip().startswith('{'):
        data = parse_document(text, filename=path)
        kind = data.get('kind', None)
        if kind == 'spectrum':
            return dict(path=path, kind=kind, nvars=data.get('nvars', None), regime=data['regime'], gap=data['gap'],
                        feasible_objectives=[level['energy'] for level in data['feasible_energies']],
                        best_objective=data['min_feasible'])
        if kind == 'analysis':
            return dict(path=path, kind=kind, nvars=data['nvars'], shots=data['shots'], feasible_fraction=data['feasible_fraction'],
                        best_objective=data['best_objective'])
        if kind == 'hybrid':
            return dict(path=path, kind=kind, best_objective=data['best_joint_objective'], iterations=data['iterations'],
                        converged=data['converged'], portfolio=len(data['portfolio']))
        raise ParseException(f'Cannot report on {kind} documents', path)
    sampleset = parse_sampleset(text, path)
    section = dict(path=path, kind='samples', shots=sampleset.shots(), distinct=len(sampleset))
    if not len(sampleset):
        return section
    section['best_energy'] = sampleset.best().energy
    section['mean_energy'] = sampleset.mean_energy()
    if instance is not None:
        document, histogram, best = analyse_sampleset(instance, sampleset, ('MR', 'CS'), False)
        section.update(nvars=document['nvars'], feasible_fraction=document['feasible_fraction'], best_objective=document['best_objective'])
    return section


def render_report(summary):
    lines = ['railsched report', '']
    for section in summary['inputs']:
        lines.append(f'{section["path"]} ({section["kind"]})')
        if section['kind'] == 'samples' and not section['shots']:
            lines.append('  no samples')
        for key in sorted(section):
            if key in ('path', 'kind'):
                continue
            lines.append(f'  {key}: {section[key]}')
        lines.append('')
    fit = summary.get('feasible_fraction_fit', None)
    if fit is not None:
        lines.append(f'feasible fraction fit ({fit["model"]}): slope {fit["slope"]:.6g}, intercept {fit["intercept"]:.6g}, r2 {fit["r2"]:.4f}')
    return '\n'.join(lines).rstrip('\n') + '\n'


def command_report(context):
    args = context.args
    instance = parse_instance_input(context, args.instance) if args.instance else None
    sections = [summarise_input(context, path, instance) for path in args.inputs]
    summary = dict(inputs=sections)

    # Fit the feasible fraction against size when enough sizes are present.
    points = sorted(
        (section['nvars'], section['feasible_fraction'])
        for section in sections
        if section.get('nvars', None) is not None and section.get('feasible_fraction', None)
    )
    if len(set(size for size, value in points)) >= 3:
        summary['feasible_fraction_fit'] = fit_scaling(points, EXPONENTIAL).to_json()
    context.write(args.output, render_report(summary))
    if args.json_out:
        context.write(args.json_out, dump_json(summary))


COMMANDS = {
    'generate': command_generate,
    'qubo': command_qubo,
    'ilp-solve': command_ilp_solve,
    'solve': command_solve,
    'spectrum': command_spectrum,
    'analyze': command_analyze,
    'hybrid': command_hybrid,
    'report': command_report,
}


def run(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    if args.log_file:
        os.environ[LOG_FILENAME_ENV] = args.log_file
    if not HAS_NUMPY:
        sys.stderr.write(f'error: MissingLibrary: numpy is required ({NUMPY_IMPORT_ERR})\n')
        return 1

    # Ensure all domain errors become exit code 1.
    try:
        args.seed = get_seed(args.seed)
        context = Context(argv, args)
        logger.json_log({'msg': 'running command', 'argv': argv, 'seed': args.seed})
        COMMANDS[args.command](context)
    except RailschedException as e:
        sys.stderr.write(f'error: {e}\n')
        return 1
    return 0


def main():
    sys.exit(run())
