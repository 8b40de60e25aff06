#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
markovflow command line front end.

Usage: markovflow <command> --config <path> [--format json|text] [--seed N]
                  [--solver power|dense] [--output FILE] [-v]

Every command reads one configuration document and writes one report.
Exit status is 0 on success, 2 on configuration errors and 3 on any
other computation error; the report, with its errors section filled in,
is written in every case.
"""

import argparse
import logging
import math
import os
import sys
import time
from collections import OrderedDict
from typing import List, Optional

import numpy as np

from cocycle import classify_flow
from config import AnalysisConfig, Setup, build, load_config
from errors import ConfigError, ConfigValidationError, HypothesisFailed, MarkovFlowError, NotTransitive, \
    UnknownCommand
from mixing import Block, build_cube_partition, cylinder_partition, dbar_exact_small, dbar_upper_matching, \
    k_mixing_report, same_distribution, vwb_report
from potential import Potential
from report import Report, emit_report, tagged
from shift import Word, cycle_length_gcd, is_transitive, period_and_decomposition, validate_graph
from suspension import FlowMeasure, abramov_entropy, constant_roof_recode, flow_entropy
from thermo import equilibrium_measure, local_product_check, positive_one_sided_roof, pressure, \
    reduce_to_one_sided

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"

LOG_FORMAT = '%(asctime)s %(levelname)-8s %(message)s'
LOG_ENV = 'MARKOVFLOW_LOG_LEVEL'

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTATION = 3

log = logging.getLogger('markovflow')

commands = OrderedDict()


def register_command(**kwargs):
    """Register a report builder under kwargs['name'].

    Recognized keys: name, desc, needs_roof, needs_seed.
    """
    def register_command_decorate(func):
        commands[kwargs['name']] = {'func': func, **kwargs}
        return func
    return register_command_decorate


def _one_sided(potential: Potential) -> Potential:
    return reduce_to_one_sided(potential)[0]


def _measure(setup: Setup, cfg: AnalysisConfig, solver: str):
    tol = cfg.tolerances.pressure if solver == 'power' else None
    return equilibrium_measure(_one_sided(setup.potential), tol=tol, solver=solver,
                               max_iterations=cfg.tolerances.max_iterations if solver == 'power' else None)


@register_command(name='analyze-graph', desc='Transitivity, period and cyclic classes of the graph')
def analyze_graph(setup: Setup, cfg: AnalysisConfig, seed: Optional[int], solver: str) -> dict:
    g = setup.graph
    results = {'vertices': list(g.vertices), 'edges': len(g.edges), 'transitive': is_transitive(g)}
    try:
        period, components = period_and_decomposition(g)
        results.update(period=period, components=[list(c) for c in components], mixing=period == 1,
                       cycle_length_gcd=cycle_length_gcd(g))
    except NotTransitive as e:
        results.update(period=None, components=None, mixing=False, unreachable=list(e.pair))
    if setup.roof is not None:
        results['roof'] = {'inf': tagged(setup.roof.inf_r), 'sup': tagged(setup.roof.sup_r),
                           'memory': list(setup.roof.memory), 'constant': setup.roof.is_constant}
    return results


@register_command(name='pressure', desc='Topological pressure of the potential')
def run_pressure(setup: Setup, cfg: AnalysisConfig, seed: Optional[int], solver: str) -> dict:
    tol = cfg.tolerances.pressure if solver == 'power' else None
    result = pressure(_one_sided(setup.potential), solver=solver, tol=tol)
    return {'pressure': tagged(result.log_pressure, result.residual),
            'eigenvalue': tagged(result.eigenvalue, result.residual * result.eigenvalue),
            'iterations': result.iterations, 'word_length': result.word_length}


@register_command(name='measure', desc='Equilibrium measure, entropy and local product structure')
def run_measure(setup: Setup, cfg: AnalysisConfig, seed: Optional[int], solver: str) -> dict:
    p = cfg.params
    m = _measure(setup, cfg, solver)
    bound = m.residual
    cylinders = {','.join(w): tagged(m.cylinder_mass(w), bound) for w in setup.graph.words(p.cylinder_length)}
    results = {'pressure': tagged(m.log_pressure, bound),
               'cylinders': cylinders,
               'entropy': tagged(m.entropy(), bound),
               'variational_gap': tagged(m.variational_gap(), bound),
               'gibbs_constant': tagged(m.gibbs_constant(), bound)}
    edge = min(setup.graph.edges)
    lp = local_product_check(m, edge, p.sample_depth)
    results['local_product'] = {'edge': list(edge), 'worst_ratio': tagged(lp.worst_ratio, bound),
                                'raw_min': tagged(lp.raw_min, bound), 'raw_max': tagged(lp.raw_max, bound),
                                'certified_bound': tagged(lp.certified_bound, bound),
                                'certified': lp.certified, 'cylinders': lp.cylinders}
    if setup.roof is not None:
        fm = FlowMeasure(m, setup.roof)
        results['flow'] = {'normalizer': tagged(fm.normalizer, bound),
                           'abramov_entropy': tagged(abramov_entropy(max(m.entropy(), 0.0), fm), bound),
                           'topological_entropy': tagged(flow_entropy(setup.graph, setup.roof, solver), 1e-12)}
        if not setup.roof.one_sided:
            normal = positive_one_sided_roof(setup.graph, setup.roof, p.return_cap)
            results['flow']['one_sided_roof'] = {'memory': list(normal.roof.memory),
                                                 'recoded': normal.recoding is not None}
    return results


@register_command(name='classify', desc='Holonomy evidence and the Bernoulli verdict', needs_roof=True,
                  needs_seed=True)
def run_classify(setup: Setup, cfg: AnalysisConfig, seed: Optional[int], solver: str) -> dict:
    p = cfg.params
    m = _measure(setup, cfg, solver)
    rng = np.random.default_rng(seed)
    report = classify_flow(m, setup.roof, setup.graph, cfg.tolerances.lattice, rng, p.loops, p.cycle_length)
    hol = report.holonomy
    results = {'classification': {
        'verdict': report.verdict, 'arithmetic': report.arithmetic,
        'c': None if report.c is None else tagged(report.c, 0.0 if hol.residual == 0 else hol.residual),
        'theta': None if report.theta is None else tagged(report.theta, 1e-15 * report.theta),
        'period_p': report.period_p,
        'flow_period': None if report.flow_period is None
        else tagged(report.flow_period, report.period_p * hol.residual)},
        'holonomy': {'verdict': hol.label, 'residual': tagged(hol.residual, 0.0), 'consistent': hol.consistent,
                     'channels': hol.channels, 'loops': len(hol.sampled_weights)}}
    if report.arithmetic and setup.roof.is_constant:
        graph, roof = constant_roof_recode(setup.graph, setup.roof)
        results['recoding'] = {'symbols': len(graph.vertices), 'roof': tagged(roof.constant_value)}
    return results


def _mixing_parameters(setup: Setup, cfg: AnalysisConfig):
    p = cfg.params
    inf_r = setup.roof.inf_r
    t0 = p.t0 if p.t0 is not None else inf_r / 2
    delta = p.delta if p.delta is not None else inf_r / 2
    n_prime = p.N_prime if p.N_prime is not None else p.N + 2
    return t0, delta, n_prime


@register_command(name='mixing-report', desc='Cube partition, K-mixing and VWB reports', needs_roof=True)
def run_mixing(setup: Setup, cfg: AnalysisConfig, seed: Optional[int], solver: str) -> dict:
    p, tol = cfg.params, cfg.tolerances
    fm = FlowMeasure(_measure(setup, cfg, solver), setup.roof)
    t0, delta, n_prime = _mixing_parameters(setup, cfg)
    cubes = build_cube_partition(fm, p.cube_n, delta)
    columns = cylinder_partition(setup.graph, 0, 1, heights=True)
    target = p.target_atom or setup.graph.vertices[0]
    column = (Block(Word((target,), 0), (0, None)),)
    km = k_mixing_report(fm, column, columns, t0, p.N, n_prime, tol.epsilon, tol.cell_cap)
    vwb = vwb_report(fm, columns, p.dbar_n, p.N, n_prime, t0, tol.epsilon, tol.cell_cap)
    return {
        'cubes': {'n': p.cube_n, 'delta': tagged(delta), 'count': len(cubes.cubes),
                  'remainder_mass': tagged(cubes.remainder_mass, 1e-12), 'certified': cubes.certified},
        'k_mixing': {'target': target, 't0': tagged(t0), 'fraction_good': tagged(km.fraction_good, 1e-12),
                     'worst_atom': tagged(km.worst_atom, 1e-12), 'atoms': km.atoms,
                     'profile': {str(k): tagged(v, 1e-12) for k, v in km.profile.items()},
                     'non_decaying': km.non_decaying},
        'vwb': {'epsilon_achieved': tagged(vwb.epsilon_achieved, 1e-9),
                'fraction_within': tagged(vwb.fraction_within, 1e-12),
                'atoms': len(vwb.dbar_estimates), 'coverage': vwb.coverage}}


@register_command(name='dbar', desc='d-bar between the coordinate process and its independent version')
def run_dbar(setup: Setup, cfg: AnalysisConfig, seed: Optional[int], solver: str) -> dict:
    p, tol = cfg.params, cfg.tolerances
    g = setup.graph
    m = _measure(setup, cfg, solver)
    full = validate_graph(g.vertices, [(u, v) for u in g.vertices for v in g.vertices])
    marginals = {(v,): math.log(m.cylinder_mass((v,))) for v in g.vertices}
    product = equilibrium_measure(Potential(full, (0, 0), marginals, name='marginals'), solver=solver)
    alphas = [cylinder_partition(g, i, i + 1) for i in range(p.dbar_n)]
    betas = [cylinder_partition(full, i, i + 1) for i in range(p.dbar_n)]
    exact = dbar_exact_small(alphas, betas, m, product, tol.dbar_cap)
    results = {'n': p.dbar_n, 'same_distribution': same_distribution(alphas, betas, m, product),
               'dbar': {'value': tagged(exact.value, 1e-9), 'mode': exact.mode}}
    try:
        upper = dbar_upper_matching(alphas, betas, m, product, cap=tol.cell_cap)
        results['upper_bound'] = {'value': tagged(upper.value, 1e-9), 'epsilon': upper.witness['epsilon']}
    except HypothesisFailed as e:
        results['upper_bound'] = {'value': None, 'failed': e.which}
    return results


def run_command(cfg: AnalysisConfig, cmd: str, seed: Optional[int] = None,
                solver: Optional[str] = None) -> Report:
    """Run one command and collect its results, or its error, into a Report."""
    seed = seed if seed is not None else cfg.seed
    solver = solver or cfg.params.solver
    report = Report(cmd, cfg.digest, runtime={'version': __version__, 'seed': seed, 'solver': solver})
    entry = commands.get(cmd)
    try:
        if entry is None:
            raise UnknownCommand(cmd)
        setup = build(cfg)
        if entry.get('needs_roof') and setup.roof is None:
            raise ConfigValidationError('roof', f'required for {cmd}')
        if entry.get('needs_seed') and seed is None:
            raise ConfigValidationError('seed', f'required for {cmd}')
        started = time.perf_counter()
        report.results = entry['func'](setup, cfg, seed, solver)
        log.info('%s: done in %.3f s', cmd, time.perf_counter() - started)
    except MarkovFlowError as e:
        log.error('%s: %s', cmd, e)
        report.errors.append({**e.as_dict(), 'command': cmd})
    return report


def exit_code(report: Report) -> int:
    if not report.errors:
        return EXIT_OK
    if any(err['type'] in ('ParseError', 'ValidationError') for err in report.errors):
        return EXIT_CONFIG
    return EXIT_COMPUTATION


def _setup_logging(verbose: int):
    level = os.environ.get(LOG_ENV, 'WARNING').upper()
    if verbose:
        level = 'DEBUG' if verbose > 1 else 'INFO'
    logging.basicConfig(format=LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, level, logging.WARNING))


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog='markovflow',
                                     description='Symbolic dynamics and thermodynamic formalism reports')
    parser.add_argument('command', choices=list(commands),
                        help='; '.join(f'{name}: {c["desc"]}' for name, c in commands.items()))
    parser.add_argument('-c', '--config', required=True, help='JSON configuration document')
    parser.add_argument('-f', '--format', choices=['json', 'text'], default='json')
    parser.add_argument('-s', '--seed', type=int, help='seed for sampling commands')
    parser.add_argument('--solver', choices=['power', 'dense'], help='Perron solver (default from config)')
    parser.add_argument('-o', '--output', help='write the report here instead of stdout')
    parser.add_argument('-v', '--verbose', action='count', default=0)
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)

    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        log.error('Config: %s', e)
        report = Report(args.command, '', errors=[{**e.as_dict(), 'command': args.command}],
                        runtime={'version': __version__, 'seed': args.seed, 'solver': args.solver})
    else:
        report = run_command(cfg, args.command, args.seed, args.solver)

    data = emit_report(report, args.format)
    if args.output:
        with open(args.output, 'wb') as fd:
            fd.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
