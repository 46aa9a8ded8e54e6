"""
Causal Green's Function Toolkit - Main Entry Point
Builds Green's functions of linear ODE operators through the Volterra resolvent
and solves initial and boundary value problems with them.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config.config import Config
from core.bvp import solve_bvp, sturm_liouville_greens
from core.exceptions import GreensError, InvalidArgumentError, RunConfigError
from core.greens import (CausalGreens, build_greens, compose, constant_coeff_greens,
                         factored_greens, greens_eval)
from core.grid import GridFunction, GridSpec, make_grid
from core.ivp import abel_wronskian, fundamental_solutions, solve_ivp, wronskian_series
from core.operator import DifferentialOperator, InitialConditions
from core.roots import poly_roots
from services.acceptance_service import AcceptanceService
from utils.expression_parser import parse, parse_function_list, parse_number_list
from utils.result_writer import (ResultRecord, ResultWriter, functions_frame, kernel_frame,
                                 pairs_frame)

logger = logging.getLogger(__name__)


class CommandLineParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors become RunConfigError"""

    def error(self, message):
        raise RunConfigError(message)


def setup_logging(verbose: bool = False, debug: bool = False):
    """Configure root logging on stderr"""
    level = Config.LOGGING_CONFIG['level']
    if verbose:
        level = 'INFO'
    if debug:
        level = 'DEBUG'
    logging.basicConfig(level=getattr(logging, level), format=Config.LOGGING_CONFIG['format'],
                        stream=sys.stderr, force=True)


def parse_operator(text: str) -> DifferentialOperator:
    """``p0;p1;...;p{n-1}`` as a monic operator"""
    expressions = parse_function_list(text)
    return DifferentialOperator(tuple(expressions), tuple(e.source.strip() for e in expressions))


def parse_eval_points(text: str) -> List[Tuple[float, float]]:
    """``x,y;x,y;...``"""
    points = []
    for chunk in text.split(';'):
        values = parse_number_list(chunk)
        if len(values) != 2:
            raise InvalidArgumentError(f"evaluation point '{chunk.strip()}' must be 'x,y'")
        points.append((values[0], values[1]))
    return points


def parse_complex_list(text: str) -> List[complex]:
    """Comma-separated complex numbers written like ``1``, ``-2.5``, ``3+4i`` or ``i``"""
    values = []
    for item in text.split(','):
        token = item.strip().replace('−', '-').replace(' ', '')
        if not token:
            raise InvalidArgumentError(f"empty entry in '{text}'")
        if token.endswith('i'):
            token = token[:-1] + 'j'
            if token in ('j', '+j', '-j'):
                token = token.replace('j', '1j')
        try:
            values.append(complex(token))
        except ValueError:
            raise InvalidArgumentError(f"cannot read '{item.strip()}' as a complex number")
    return values


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per pipeline"""
    common = CommandLineParser(add_help=False)
    common.add_argument('--a', type=float, default=0.0, help='Left endpoint (default: 0)')
    common.add_argument('--b', type=float, default=1.0, help='Right endpoint (default: 1)')
    common.add_argument('--n', type=int, default=Config.GRID_CONFIG['n_intervals'],
                        help='Number of intervals, even (default: %(default)s)')
    common.add_argument('--tol', type=float, default=Config.RESOLVENT_CONFIG['tol'],
                        help='Resolvent series tolerance (default: %(default)s)')
    common.add_argument('--max-terms', type=int, default=Config.RESOLVENT_CONFIG['max_terms'],
                        help='Maximum resolvent series terms (default: %(default)s)')
    common.add_argument('--format', choices=Config.OUTPUT_CONFIG['formats'],
                        default=Config.OUTPUT_CONFIG['default_format'], help='Output format')
    common.add_argument('--output', type=str, help='Write results to this file instead of stdout')
    common.add_argument('--verbose', action='store_true', help='Log progress at INFO level')
    common.add_argument('--debug', action='store_true', help='Log every series term at DEBUG level')

    parser = CommandLineParser(
        description="Causal Green's functions of linear ODE operators",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s greens --op "-4;0" --eval-at "1,0"          # sinh(2)/2
  %(prog)s solve --op "-1;0" --rhs 0 --ic "1,0" --eval-at-x 1
  %(prog)s fundamental --op "-x;0"
  %(prog)s sturm --p "1"
  %(prog)s compose --left "x;0" --right "0" --verify --expect-op "0;x;0"
  %(prog)s const-coeff --alphas "-1,0,1"
  %(prog)s factored --ps "-x;-2*x" --b 2
  %(prog)s check --suite paper --only 1,5
        """
    )
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    greens_parser = subparsers.add_parser('greens', parents=[common], help='Green\'s function of an operator')
    greens_parser.add_argument('--op', required=True, help='Coefficients "P0;P1;...;P(n-1)" of the monic operator')
    greens_parser.add_argument('--eval-at', help='Node pairs "x,y;x,y" to report instead of the full kernel')
    greens_parser.add_argument('--method', choices=['series', 'direct'], default='series',
                               help='Resolvent by Neumann series or forward substitution')
    greens_parser.add_argument('--cross-check', action='store_true',
                               help='Compare series and direct resolvents')

    solve_parser = subparsers.add_parser('solve', parents=[common], help='Solve an initial value problem')
    solve_parser.add_argument('--op', required=True, help='Coefficients "P0;P1;...;P(n-1)"')
    solve_parser.add_argument('--rhs', default='0', help='Right-hand side g(x) (default: 0)')
    solve_parser.add_argument('--ic', required=True, help='Initial data "c0,c1,...,c(n-1)"')
    solve_parser.add_argument('--anchor', choices=['a', 'b'], default='a', help='Endpoint carrying the data')
    solve_parser.add_argument('--method', choices=['direct', 'series'], default='direct',
                              help='Volterra solve by forward marching or resolvent series')
    solve_parser.add_argument('--eval-at-x', help='Nodes "x1,x2,..." to report instead of the whole grid')

    fundamental_parser = subparsers.add_parser('fundamental', parents=[common],
                                               help='Fundamental solutions and Wronskians')
    fundamental_parser.add_argument('--op', required=True, help='Coefficients "P0;P1;...;P(n-1)"')

    sturm_parser = subparsers.add_parser('sturm', parents=[common], help='Dirichlet Green\'s function of d^2 - P')
    sturm_parser.add_argument('--p', required=True, help='Potential P(x)')
    sturm_parser.add_argument('--rhs', help='Solve (d^2 - P) y = g with y(a) = y(b) = 0 for this g')

    compose_parser = subparsers.add_parser('compose', parents=[common],
                                           help='Green\'s function of a product of operators')
    compose_parser.add_argument('--left', required=True, help='Coefficients of the left factor')
    compose_parser.add_argument('--right', required=True, help='Coefficients of the right factor')
    compose_parser.add_argument('--eval-at', help='Node pairs "x,y;x,y"')
    compose_parser.add_argument('--verify', action='store_true', help='Compare with a direct build of --expect-op')
    compose_parser.add_argument('--expect-op', help='Coefficients of the expanded product')

    const_parser = subparsers.add_parser('const-coeff', parents=[common],
                                         help='Constant-coefficient operator via its roots')
    const_parser.add_argument('--alphas', required=True, help='Coefficients "a0,a1,...,an" (complex as 1+2i)')
    const_parser.add_argument('--eval-at', help='Node pairs "x,y;x,y"')

    factored_parser = subparsers.add_parser('factored', parents=[common],
                                            help='Operator (d - p1)(d - p2)...(d - pn)')
    factored_parser.add_argument('--ps', required=True, help='Factors "p1;p2;...;pn"')
    factored_parser.add_argument('--eval-at', help='Node pairs "x,y;x,y"')

    check_parser = subparsers.add_parser('check', parents=[common], help='Run the built-in acceptance suite')
    check_parser.add_argument('--suite', choices=[Config.ACCEPTANCE_CONFIG['suite_name']],
                              default=Config.ACCEPTANCE_CONFIG['suite_name'], help='Suite to run')
    check_parser.add_argument('--only', help='Comma-separated criterion ids')

    return parser


def _grid(args) -> GridSpec:
    return make_grid(args.a, args.b, args.n)


def _base_params(args) -> Dict:
    return {'tol': args.tol, 'max_terms': args.max_terms}


def _kernel_record(command: str, G: CausalGreens, params: Dict, eval_at: Optional[str],
                   scalars: Optional[Dict] = None) -> ResultRecord:
    grid = G.grid
    if eval_at:
        points = parse_eval_points(eval_at)
        values = [greens_eval(G, grid.index_of(x), grid.index_of(y)) for x, y in points]
        return ResultRecord(command, grid, params, 'pairs', pairs_frame(points, values), scalars or {})
    return ResultRecord(command, grid, params, 'matrix', kernel_frame(grid, G.T.samples), scalars or {})


def run_greens(args) -> ResultRecord:
    grid = _grid(args)
    op = parse_operator(args.op)
    G = build_greens(op, grid, args.tol, args.max_terms, cross_check=args.cross_check, method=args.method)
    scalars = {}
    if G.resolvent is not None:
        scalars = {'terms_used': G.resolvent.terms_used, 'last_term_norm': G.resolvent.last_term_norm}
    params = dict(_base_params(args), op=args.op, method=args.method)
    return _kernel_record('greens', G, params, args.eval_at, scalars)


def run_solve(args) -> ResultRecord:
    grid = _grid(args)
    op = parse_operator(args.op)
    g = GridFunction.from_callable(grid, parse(args.rhs))
    values = parse_number_list(args.ic)
    anchor = grid.a if args.anchor == 'a' else grid.b
    solution = solve_ivp(op, g, InitialConditions(values, anchor), args.tol, args.max_terms, args.method)

    columns = {'y': solution.y.values}
    for k in range(1, op.degree):
        columns[f"d{k}y"] = solution.derivatives[k].values
    table = functions_frame(grid, columns)
    if args.eval_at_x:
        rows = [grid.index_of(x) for x in parse_number_list(args.eval_at_x)]
        table = table.iloc[rows].reset_index(drop=True)
    params = dict(_base_params(args), op=args.op, rhs=args.rhs, ic=list(values), anchor=args.anchor,
                  method=args.method)
    return ResultRecord('solve', grid, params, 'functions', table)


def run_fundamental(args) -> ResultRecord:
    grid = _grid(args)
    op = parse_operator(args.op)
    G = build_greens(op, grid, args.tol, args.max_terms)
    system = fundamental_solutions(op, G)
    columns = {f"u{r}": f.values for r, f in enumerate(system.functions)}
    columns['wronskian'] = wronskian_series(system).values
    columns['abel'] = abel_wronskian(op, grid).values
    return ResultRecord('fundamental', grid, dict(_base_params(args), op=args.op), 'functions',
                        functions_frame(grid, columns))


def run_sturm(args) -> ResultRecord:
    slg = sturm_liouville_greens(parse(args.p), args.a, args.b, args.n, args.tol, args.max_terms)
    params = dict(_base_params(args), p=args.p)
    scalars = {'w_const': slg.w_const}
    if args.rhs:
        params['rhs'] = args.rhs
        y = solve_bvp(slg, GridFunction.from_callable(slg.grid, parse(args.rhs)))
        return ResultRecord('sturm', slg.grid, params, 'functions',
                            functions_frame(slg.grid, {'y': y.values}), scalars)
    return ResultRecord('sturm', slg.grid, params, 'matrix',
                        kernel_frame(slg.grid, slg.G, lower_only=False), scalars)


def run_compose(args) -> ResultRecord:
    grid = _grid(args)
    left = build_greens(parse_operator(args.left), grid, args.tol, args.max_terms)
    right = build_greens(parse_operator(args.right), grid, args.tol, args.max_terms)
    # right factor acts first, so its kernel is the outer one
    G = compose(right, left)
    params = dict(_base_params(args), left=args.left, right=args.right)
    scalars = {}
    if args.verify:
        if not args.expect_op:
            raise RunConfigError("--verify needs --expect-op with the expanded product")
        expected = build_greens(parse_operator(args.expect_op), grid, args.tol, args.max_terms)
        if expected.degree != G.degree:
            raise InvalidArgumentError(f"--expect-op has degree {expected.degree}, product has degree {G.degree}")
        scalars['deviation'] = float(np.max(np.abs(G.T.samples - expected.T.samples)))
        params['expect_op'] = args.expect_op
        logger.info(f"Composition deviates from the direct build by {scalars['deviation']:.3e}")
    return _kernel_record('compose', G, params, args.eval_at, scalars)


def run_const_coeff(args) -> ResultRecord:
    grid = _grid(args)
    alphas = parse_complex_list(args.alphas)
    G = constant_coeff_greens(alphas, grid)
    roots = [complex(r) for r in poly_roots(alphas)]
    params = {'alphas': args.alphas}
    return _kernel_record('const-coeff', G, params, args.eval_at, {'roots': roots})


def run_factored(args) -> ResultRecord:
    grid = _grid(args)
    factors = parse_function_list(args.ps)
    G = factored_greens(factors, grid)
    return _kernel_record('factored', G, {'ps': args.ps}, args.eval_at)


def run_check(args) -> ResultRecord:
    only = [int(v) for v in parse_number_list(args.only)] if args.only else None
    table = AcceptanceService(n_intervals=args.n).run(only)
    passed = int(table['passed'].sum())
    print(f"✅ {passed}/{len(table)} checks passed" if passed == len(table)
          else f"❌ {len(table) - passed}/{len(table)} checks failed", file=sys.stderr)
    return ResultRecord('check', None, {'suite': args.suite, 'only': only or []}, 'criteria', table,
                        {'passed': passed, 'total': int(len(table))})


COMMANDS = {
    'greens': run_greens,
    'solve': run_solve,
    'fundamental': run_fundamental,
    'sturm': run_sturm,
    'compose': run_compose,
    'const-coeff': run_const_coeff,
    'factored': run_factored,
    'check': run_check,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI interface; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help()
            return 1
        setup_logging(args.verbose, args.debug)
        record = COMMANDS[args.command](args)
        text = ResultWriter(args.format).write(record, args.output)
        if not args.output:
            sys.stdout.write(text)
        if record.kind == 'criteria' and record.scalars['passed'] != record.scalars['total']:
            failed = record.scalars['total'] - record.scalars['passed']
            print(f"error acceptance_failed: {failed} check(s) failed", file=sys.stderr)
            return 1
        return 0
    except GreensError as e:
        print(f"error {e.one_line()}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception("Unexpected failure")
        print(f"error internal: {' '.join(str(e).split())}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
