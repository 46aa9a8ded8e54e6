"""
End-to-end tests for the command-line interface
"""

import json

import numpy as np
import pytest
from scipy import special

from main import build_parser, main, parse_complex_list, parse_eval_points


def run_json(capsys, *argv):
    code = main(list(argv) + ['--format', 'json'])
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return json.loads(captured.out)


def run_error(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    assert code == 1
    assert captured.out == ''
    return captured.err.strip().splitlines()[-1]


class TestArgumentHelpers:

    def test_complex_list(self):
        assert parse_complex_list('1, -2.5, 3+4i, i, -i') == [1, -2.5, 3 + 4j, 1j, -1j]

    def test_eval_points(self):
        assert parse_eval_points('1,0; 0.5,pi/8') == [(1.0, 0.0), (0.5, np.pi / 8)]

    def test_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(['greens', '--op', '0;0'])
        assert args.n == 400
        assert args.a == 0.0 and args.b == 1.0
        assert args.format == 'json'


class TestCommands:

    def test_greens_pairs(self, capsys):
        document = run_json(capsys, 'greens', '--op', '-4;0', '--eval-at', '1,0')
        assert document['command'] == 'greens'
        assert document['grid'] == {'a': 0, 'b': 1, 'n': 400}
        (pair,) = document['results']['pairs']
        assert pair['value'] == pytest.approx(np.sinh(2.0) / 2.0, abs=1e-8)
        assert document['results']['scalars']['terms_used'] > 1

    def test_greens_matrix(self, capsys):
        document = run_json(capsys, 'greens', '--op', '-1;0', '--n', '8', '--method', 'direct')
        matrix = document['results']['matrix']
        assert matrix['rows'] == 9
        assert len(matrix['data']) == 81
        assert matrix['data'][8] == 0

    def test_greens_csv(self, capsys):
        assert main(['greens', '--op', '0;0', '--n', '4', '--format', 'csv']) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == 'x,y,value'
        assert len(lines) == 1 + 15

    def test_solve_at_selected_nodes(self, capsys):
        document = run_json(capsys, 'solve', '--op', '-1;0', '--ic', '1,0', '--eval-at-x', '0.5,1')
        functions = {f['name']: f['values'] for f in document['results']['functions']}
        assert functions['x'] == [0.5, 1]
        np.testing.assert_allclose(functions['y'], np.cosh([0.5, 1.0]), atol=1e-8)
        np.testing.assert_allclose(functions['d1y'], np.sinh([0.5, 1.0]), atol=1e-8)

    def test_solve_from_right_endpoint(self, capsys):
        document = run_json(capsys, 'solve', '--op', '-1;0', '--ic', '1,0', '--anchor', 'b',
                            '--eval-at-x', '0')
        functions = {f['name']: f['values'] for f in document['results']['functions']}
        assert functions['y'][0] == pytest.approx(np.cosh(1.0), abs=1e-8)

    def test_fundamental(self, capsys):
        document = run_json(capsys, 'fundamental', '--op', '-x;0', '--n', '100')
        functions = {f['name']: f['values'] for f in document['results']['functions']}
        assert set(functions) == {'x', 'u0', 'u1', 'wronskian', 'abel'}
        np.testing.assert_allclose(functions['wronskian'], 1.0, atol=1e-6)
        np.testing.assert_allclose(functions['abel'], 1.0, atol=1e-15)

    def test_sturm_kernel_and_solution(self, capsys):
        document = run_json(capsys, 'sturm', '--p', '0', '--n', '8')
        assert document['results']['matrix']['rows'] == 9
        assert document['results']['scalars']['w_const'] == pytest.approx(1.0)

        document = run_json(capsys, 'sturm', '--p', '0', '--n', '8', '--rhs', '1')
        functions = {f['name']: f['values'] for f in document['results']['functions']}
        x = np.asarray(functions['x'])
        np.testing.assert_allclose(functions['y'], x * (x - 1.0) / 2.0, atol=1e-13)

    def test_compose_verify(self, capsys):
        document = run_json(capsys, 'compose', '--left', 'x;0', '--right', '0', '--verify',
                            '--expect-op', '0;x;0', '--eval-at', '1,0')
        assert document['results']['scalars']['deviation'] < 1e-7
        assert document['params']['expect_op'] == '0;x;0'

    def test_const_coeff(self, capsys):
        document = run_json(capsys, 'const-coeff', '--alphas', '-1,0,1', '--eval-at', '1,0;0.5,0.5')
        values = [pair['value'] for pair in document['results']['pairs']]
        assert values[0] == pytest.approx(np.sinh(1.0), abs=1e-8)
        assert values[1] == 0
        roots = sorted(r['re'] for r in document['results']['scalars']['roots'])
        assert roots == pytest.approx([-1.0, 1.0])

    def test_factored(self, capsys):
        document = run_json(capsys, 'factored', '--ps', '-x;-2*x', '--eval-at', '1,0')
        expected = np.sqrt(np.pi / 2.0) * np.exp(-1.0) * special.erfi(1.0 / np.sqrt(2.0))
        assert document['results']['pairs'][0]['value'] == pytest.approx(expected, abs=1e-7)
        assert 'scalars' not in document['results']

    def test_check_single_criterion(self, capsys):
        document = run_json(capsys, 'check', '--only', '5', '--n', '100')
        rows = document['results']['criteria']
        assert rows
        assert all(row['passed'] for row in rows)
        assert all(row['id'].startswith('5.') for row in rows)
        assert document['results']['scalars']['passed'] == len(rows)

    def test_check_output_is_reproducible(self, capsys):
        outputs = []
        for _ in range(2):
            main(['check', '--only', '5', '--n', '16', '--format', 'csv'])
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]
        assert outputs[0].splitlines()[0] == 'id,check,measured,threshold,passed'

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / 'g.csv'
        assert main(['greens', '--op', '0', '--n', '2', '--format', 'csv', '--output', str(target)]) == 0
        assert capsys.readouterr().out == ''
        assert target.read_text(encoding='utf-8').startswith('x,y,value\n')


class TestErrors:

    def test_odd_interval_count(self, capsys):
        assert run_error(capsys, 'greens', '--op', '0;0', '--n', '7').startswith('error invalid_grid: ')

    def test_unknown_option(self, capsys):
        assert run_error(capsys, 'greens', '--op', '0;0', '--bogus').startswith('error invalid_config: ')

    def test_syntax_error(self, capsys):
        line = run_error(capsys, 'greens', '--op', '2*;0')
        assert line.startswith('error syntax_error: ')
        assert 'at offset 2' in line

    def test_coefficient_domain_error_names_node(self, capsys):
        line = run_error(capsys, 'greens', '--op', '1/x;0', '--n', '8')
        assert line.startswith('error non_finite_coefficient: ')
        assert 'node 0 (x=0.0)' in line

    def test_rhs_domain_error(self, capsys):
        line = run_error(capsys, 'solve', '--op', '0', '--ic', '0', '--rhs', 'log(x)', '--n', '8')
        assert line.startswith('error domain_error: ')

    def test_off_grid_evaluation_point(self, capsys):
        line = run_error(capsys, 'greens', '--op', '0;0', '--n', '4', '--eval-at', '0.3,0')
        assert line.startswith('error invalid_grid: ')

    def test_resonance(self, capsys):
        line = run_error(capsys, 'sturm', '--p', '-pi^2', '--n', '128')
        assert line.startswith('error resonant_interval: ')

    def test_not_converged(self, capsys):
        line = run_error(capsys, 'greens', '--op', '-4;0', '--n', '8', '--max-terms', '2')
        assert line.startswith('error resolvent_not_converged: ')

    def test_verify_needs_expected_operator(self, capsys):
        line = run_error(capsys, 'compose', '--left', '0', '--right', '0', '--n', '8', '--verify')
        assert line.startswith('error invalid_config: ')

    def test_unknown_criterion(self, capsys):
        line = run_error(capsys, 'check', '--only', '12', '--n', '8')
        assert line.startswith('error invalid_config: ')

    def test_no_command(self, capsys):
        assert main([]) == 1
