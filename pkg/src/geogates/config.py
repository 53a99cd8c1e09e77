"""Scenario documents and exact angle parsing.

A scenario is a JSON object. Angles may be numbers or tokens such as
"pi/8", "-3pi/4" or "3*pi/4", which are read as exact rational multiples
of pi.
"""

import dataclasses
import json
import logging
import math
import os
import re
import typing
from geogates import evolve
from geogates import qcore
from geogates.errors import ConfigError

logger = logging.getLogger(__name__)

MODES = ('simulate', 'plan', 'sweep', 'ion-check')
PLAN_FAMILIES = ('orange-slice', 'three-segment', 'min-circle')
SHAPES = ('sine_squared', 'square')
DEFAULT_OUTPUT_DIR = 'geogates-out'

_ANGLE_RE = re.compile(
    r'^(?P<sign>[+-]?)\s*(?P<num>\d+(?:\.\d*)?)?\s*\*?\s*pi'
    r'(?:\s*/\s*(?P<den>\d+))?$')

_AXES = {'x': (1.0, 0.0, 0.0), 'y': (0.0, 1.0, 0.0), 'z': (0.0, 0.0, 1.0)}


def parse_angle(value: typing.Union[str, float, int]) -> float:
    """Angle in radians from a number or a pi token.

    :raises ConfigError: for anything else.
    """
    if isinstance(value, bool):
        raise ConfigError('An angle cannot be a boolean.')
    if isinstance(value, (int, float)):
        res = float(value)
    else:
        text = str(value).strip().lower()
        match = _ANGLE_RE.match(text)
        if match:
            num = match.group('num')
            den = match.group('den')
            p = float(num) if num else 1.0
            q = int(den) if den else 1
            if q == 0:
                raise ConfigError('Division by zero in angle %r.' % value)
            res = math.pi * p / q
            if match.group('sign') == '-':
                res = -res
        else:
            try:
                res = float(text)
            except ValueError:
                raise ConfigError('Cannot read %r as an angle.' % value)
    if not math.isfinite(res):
        raise ConfigError('The angle %r is not finite.' % value)
    return res


def parse_axis(text: typing.Union[str, typing.Sequence[float]]
               ) -> typing.Tuple[float, float, float]:
    """Unit axis from 'x', '-y', 'z' or a comma-separated 3-vector."""
    if not isinstance(text, str):
        vector = [float(v) for v in text]
    else:
        token = text.strip().lower()
        sign = 1.0
        if token[:1] in '+-' and token[1:] in _AXES:
            sign = -1.0 if token[0] == '-' else 1.0
            token = token[1:]
        if token in _AXES:
            return tuple(sign * v for v in _AXES[token])  # type: ignore
        try:
            vector = [float(v) for v in token.split(',')]
        except ValueError:
            raise ConfigError('Cannot read %r as an axis.' % text)
    try:
        return qcore.GateSpec.from_vector(vector, 0.0).axis
    except ValueError as ve:
        raise ConfigError('Invalid axis %r: %s' % (text, ve))


def parse_target(text: str) -> qcore.GateSpec:
    """GateSpec from 'AXIS:ANGLE', for example 'z:pi/8' or '1,1,1:pi/4'."""
    axis, sep, angle = str(text).rpartition(':')
    if not sep or not axis:
        raise ConfigError('A target reads AXIS:ANGLE, not %r.' % text)
    return qcore.GateSpec(parse_axis(axis), parse_angle(angle))


def _angles(values) -> typing.Tuple[float, ...]:
    if isinstance(values, (str, int, float)):
        values = [values]
    return tuple(parse_angle(v) for v in values)


def _floats(values) -> typing.Tuple[float, ...]:
    if isinstance(values, (int, float)):
        values = [values]
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError('Expected a list of numbers, not %r.' % (values, ))


@dataclasses.dataclass
class Scenario:
    """One CLI run.

    simulate reads curve (a curve JSON file) or builds plan for target;
    plan and sweep use target and the theta_mid grid; ion-check uses eta,
    ratios, n_max, shape and area.
    """

    mode: str
    target: typing.Optional[qcore.GateSpec] = None
    curve: typing.Optional[str] = None
    plan: typing.Optional[str] = None
    which: str = 'one-qubit'
    theta_mid: typing.Tuple[float, ...] = (math.pi / 3, )
    amp_cap: float = 1.0
    amplitudes: typing.Tuple[float, ...] = ()
    detunings: typing.Tuple[float, ...] = ()
    warps: int = 0
    seed: int = 0
    eta: float = 0.05
    ratios: typing.Tuple[float, ...] = (10.0, 20.0, 40.0)
    n_max: int = 5
    shape: str = 'sine_squared'
    area: float = math.pi / 4
    trajectory: bool = False
    workers: typing.Optional[int] = None
    propagator: evolve.PropagatorConfig = dataclasses.field(
        default_factory=evolve.PropagatorConfig)
    output_dir: str = DEFAULT_OUTPUT_DIR

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError('Unknown mode %r; expected one of %s.'
                              % (self.mode, ', '.join(MODES)))
        if self.which not in ('one-qubit', 'two-qubit'):
            raise ConfigError('which must be one-qubit or two-qubit.')
        if self.plan is not None and self.plan not in PLAN_FAMILIES:
            raise ConfigError('Unknown plan family %r.' % self.plan)
        if self.shape not in SHAPES:
            raise ConfigError('Unknown pulse shape %r.' % self.shape)
        if not self.amp_cap > 0:
            raise ConfigError('The amplitude cap must be positive.')
        if self.warps < 0:
            raise ConfigError('The number of warps cannot be negative.')
        if self.workers is not None and self.workers < 1:
            raise ConfigError('workers must be positive.')
        if self.mode == 'simulate':
            if (self.curve is None) == (self.plan is None):
                raise ConfigError('simulate needs exactly one of a curve '
                                  'file and a plan family.')
            if self.plan is not None and self.target is None:
                raise ConfigError('A planned simulation needs a target.')
            if self.curve is not None and not os.path.isfile(self.curve):
                raise ConfigError('The curve file %r does not exist.'
                                  % self.curve)
        elif self.mode in ('plan', 'sweep'):
            if self.target is None:
                raise ConfigError('%s needs a target.' % self.mode)
            if not self.theta_mid:
                raise ConfigError('The theta_mid grid cannot be empty.')
            if self.mode == 'sweep' and not (self.amplitudes or self.detunings
                                             or self.warps):
                raise ConfigError('sweep needs at least one amplitude, '
                                  'detuning or warp.')
        elif not self.ratios:
            raise ConfigError('ion-check needs at least one ratio.')

    def to_dict(self) -> dict:
        """Echo of the scenario, as embedded in reports."""
        return {
            'mode': self.mode,
            'target': None if self.target is None else self.target.to_dict(),
            'curve': self.curve,
            'plan': self.plan,
            'which': self.which,
            'theta_mid': list(self.theta_mid),
            'amp_cap': self.amp_cap,
            'amplitudes': list(self.amplitudes),
            'detunings': list(self.detunings),
            'warps': self.warps,
            'seed': self.seed,
            'eta': self.eta,
            'ratios': list(self.ratios),
            'n_max': self.n_max,
            'shape': self.shape,
            'area': self.area,
            'trajectory': self.trajectory,
            'workers': self.workers,
            'propagator': self.propagator.to_dict(),
            'output_dir': self.output_dir
        }

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = '.') -> 'Scenario':
        """Scenario from a JSON object. Relative paths are read against
        base_dir.
        """
        if not isinstance(data, dict):
            raise ConfigError('A scenario must be a JSON object.')
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError('Unknown scenario keys: %s'
                              % ', '.join(sorted(unknown)))
        if 'mode' not in data:
            raise ConfigError('The scenario has no mode.')
        kwargs = dict(data)
        try:
            if kwargs.get('target') is not None:
                target = kwargs['target']
                if isinstance(target, dict):
                    kwargs['target'] = qcore.GateSpec.from_vector(
                        target['axis'], parse_angle(target['half_angle']))
                else:
                    kwargs['target'] = parse_target(target)
            for key in ('theta_mid', ):
                if key in kwargs:
                    kwargs[key] = _angles(kwargs[key])
            for key in ('amplitudes', 'detunings', 'ratios'):
                if key in kwargs:
                    kwargs[key] = _floats(kwargs[key])
            if 'area' in kwargs:
                kwargs['area'] = parse_angle(kwargs['area'])
            for key in ('curve', 'output_dir'):
                if kwargs.get(key) is not None:
                    kwargs[key] = os.path.join(base_dir, kwargs[key])
            if 'propagator' in kwargs:
                kwargs['propagator'] = evolve.PropagatorConfig.from_dict(
                    kwargs['propagator'] or {})
            return cls(**kwargs)
        except (KeyError, TypeError, ValueError) as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError('Invalid scenario: %s' % err)


def load_scenario(path) -> Scenario:
    """Read a scenario JSON file.

    :raises ConfigError: for a missing, empty or invalid document.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as ose:
        raise ConfigError('Cannot read the scenario %s: %s' % (path, ose))
    if not text.strip():
        raise ConfigError('The scenario %s is empty.' % path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as jde:
        raise ConfigError('The scenario %s is not valid JSON: %s'
                          % (path, jde))
    logger.debug('loaded scenario %s', path)
    return Scenario.from_dict(data, os.path.dirname(os.path.abspath(path)))
