import json
import math
import os
import pandas
import pytest
from geogates import cli
from geogates import config
from geogates import errors
from geogates.paths.curve import ParamCurve
from geogates.paths.segments import Meridian
from . import utils


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _curve_file(tmp_path, curve, name='curve.json'):
    path = tmp_path / name
    curve.save(path)
    return str(path)


def test_simulate_curve_with_target(tmp_path):
    curve = _curve_file(tmp_path, utils.orange_slice_curve())
    out = tmp_path / 'out'
    code = cli.main(['simulate', '--curve', curve, '--target', 'z:pi/8',
                     '-o', str(out)])
    assert code == cli.EXIT_OK
    payload = _read_json(out / 'report.json')
    assert payload['report']['fidelity_vs_target'] >= 1 - 1e-8
    assert payload['target']['half_angle'] == pytest.approx(math.pi / 8)
    assert payload['scenario']['mode'] == 'simulate'
    assert (out / 'summary.txt').read_text().startswith('geogates ')
    schedule = pandas.read_csv(out / 'schedule.csv')
    assert len(schedule) > 0


def test_simulate_curve_without_target(tmp_path):
    curve = _curve_file(tmp_path, utils.three_segment_curve())
    out = tmp_path / 'out'
    assert cli.main(['simulate', '--curve', curve, '-o', str(out)]) == 0
    payload = _read_json(out / 'report.json')
    assert payload['report']['fidelity_vs_target'] >= 1 - 1e-8


def test_simulate_plan_with_trajectory(tmp_path):
    out = tmp_path / 'out'
    code = cli.main(['simulate', '--plan', 'three-segment', '--target',
                     'z:pi/8', '--trajectory', '--n-steps', '1024',
                     '-o', str(out)])
    assert code == 0
    assert os.path.isfile(out / 'trajectory.csv')


def test_simulate_two_qubit(tmp_path):
    curve = _curve_file(tmp_path, utils.orange_slice_curve())
    out = tmp_path / 'out'
    code = cli.main(['simulate', '--curve', curve, '--which', 'two-qubit',
                     '--n-steps', '2048', '-o', str(out)])
    assert code == 0
    payload = _read_json(out / 'report.json')
    assert payload['report']['fidelity_vs_target'] >= 1 - 1e-6


def test_plan(tmp_path):
    out = tmp_path / 'out'
    code = cli.main(['plan', '--gamma', 'pi/8', '--n-steps', '2048',
                     '-o', str(out)])
    assert code == 0
    frame = pandas.read_csv(out / 'plans.csv')
    assert set(frame['family']) == {'orange-slice', 'three-segment',
                                    'min-circle'}
    assert list(frame['time_times_cap']) == sorted(frame['time_times_cap'])
    assert (frame['fidelity'] >= 1 - 1e-6).all()
    times = dict(zip(frame['family'], frame['time_times_cap']))
    assert times['orange-slice'] == pytest.approx(math.pi, abs=1e-10)
    assert times['three-segment'] == pytest.approx(
        math.pi / 3 + math.sqrt(3) * math.pi / 16, abs=1e-10)
    curves = sorted(os.listdir(out / 'curves'))
    assert len(curves) == 3
    again = tmp_path / 'again'
    code = cli.main(['simulate', '--curve', str(out / 'curves' / curves[0]),
                     '--target', 'z:pi/8', '--n-steps', '2048',
                     '-o', str(again)])
    assert code == 0


def test_plan_deterministic(tmp_path):
    for name in ('a', 'b'):
        assert cli.main(['plan', '--axis', 'x', '--gamma', 'pi/4',
                         '--theta-mid', 'pi/3', '--theta-mid', 'pi/2',
                         '--n-steps', '2048', '-o',
                         str(tmp_path / name)]) == 0
    for artifact in ('plans.csv', 'summary.txt'):
        assert ((tmp_path / 'a' / artifact).read_bytes()
                == (tmp_path / 'b' / artifact).read_bytes())


def test_sweep(tmp_path):
    out = tmp_path / 'out'
    code = cli.main(['sweep', '--amplitude', '0.05', '--warps', '2',
                     '--n-steps', '2048', '-o', str(out)])
    assert code == 0
    frame = pandas.read_csv(out / 'sweep.csv')
    assert len(frame) == 12
    payload = _read_json(out / 'report.json')
    assert len(payload['rows']) == 12
    assert len(payload['errors']) == 3
    assert payload['warp_spread'] <= 1e-6


def test_sweep_needs_errors(tmp_path, capsys):
    out = tmp_path / 'out'
    assert cli.main(['sweep', '-o', str(out)]) == cli.EXIT_CONFIG
    assert json.loads(capsys.readouterr().out)['exit_code'] == 2
    assert _read_json(out / 'error.json')['error'] == 'ConfigError'


def test_ion_check(tmp_path):
    out = tmp_path / 'out'
    code = cli.main(['ion-check', '--ratio', '10', '--ratio', '20',
                     '-o', str(out)])
    assert code == 0
    frame = pandas.read_csv(out / 'ion_check.csv')
    assert len(frame) == 2
    assert (frame['subspace_fidelity'] >= 0.98).all()
    assert 'trapped-ion' in (out / 'summary.txt').read_text()


def test_run_empty_scenario(tmp_path, capsys):
    path = tmp_path / 'scenario.json'
    path.write_text('')
    assert cli.main(['run', str(path)]) == cli.EXIT_CONFIG
    payload = json.loads(capsys.readouterr().out)
    assert payload['error'] == 'ConfigError'
    assert payload['exit_code'] == 2


def test_run_scenario_file(tmp_path):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'mode': 'plan', 'target': 'z:pi/8',
                                'propagator': {'n_steps': 1024},
                                'output_dir': 'results'}))
    assert cli.main(['run', str(path)]) == 0
    assert os.path.isfile(tmp_path / 'results' / 'plans.csv')
    other = tmp_path / 'other'
    assert cli.main(['run', str(path), '-o', str(other)]) == 0
    assert os.path.isfile(other / 'plans.csv')


def test_open_curve(tmp_path):
    curve = _curve_file(tmp_path,
                        ParamCurve((Meridian(0.0, 0.0, math.pi / 3, 1.0), )))
    out = tmp_path / 'out'
    code = cli.main(['simulate', '--curve', curve, '--target', 'z:pi/8',
                     '-o', str(out)])
    assert code == cli.EXIT_CURVE
    assert _read_json(out / 'error.json')['error'] == 'OpenCurveError'


def test_invalid_curve_document(tmp_path):
    path = tmp_path / 'curve.json'
    path.write_text('{"tau": 1.0}')
    code = cli.main(['simulate', '--curve', str(path), '-o',
                     str(tmp_path / 'out')])
    assert code == cli.EXIT_CONFIG


def test_missing_curve(tmp_path):
    code = cli.main(['simulate', '--curve', str(tmp_path / 'nope.json'),
                     '-o', str(tmp_path / 'out')])
    assert code == cli.EXIT_CONFIG


@pytest.mark.parametrize('err,code',
                         [(errors.ConfigError('x'), 2),
                          (errors.OpenCurveError('x'), 3),
                          (errors.ComplexEnvelopeError('x'), 4),
                          (errors.DimensionMismatchError('x'), 5),
                          (errors.SweepTooLargeError('x'), 6),
                          (errors.LambDickeError('x'), 7),
                          (errors.VerificationError('x'), 8),
                          (RuntimeError('x'), 1)])
def test_exit_code_for(err, code):
    assert cli.exit_code_for(err) == code


def test_version(capsys):
    with pytest.raises(SystemExit):
        cli.main(['--version'])
    assert capsys.readouterr().out.startswith('geogates ')


def test_run_scenario_object(tmp_path):
    scenario = config.Scenario('ion-check', ratios=(10.0, ),
                               output_dir=str(tmp_path / 'out'))
    assert cli.run(scenario) == cli.EXIT_OK
    payload = json.loads((tmp_path / 'out' / 'report.json').read_text())
    assert payload['slope'] is None
    assert payload['scenario']['ratios'] == [10.0]
