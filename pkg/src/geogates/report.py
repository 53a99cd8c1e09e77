"""Artifact writers and plain-text summaries."""

import json
import logging
import os
import typing
import jinja2
import pandas

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


template_evolution = jinja2.Template("""\
geogates {{ version }} :: {{ report.which }} geometric gate
duration            {{ '%.12g' | format(report.duration) }}  ({{
    report.n_steps }} {{ report.method }} steps)
holonomy (branch)   {% for x in report.holonomy_principal %}{{
    '%+.12f' | format(x) }} {% endfor %}
holonomy (unwound)  {% for x in report.holonomy_continuous %}{{
    '%+.12f' | format(x) }} {% endfor %}
geometric phase     {{ '%+.12f' | format(report.geometric_phase) }}
fidelity vs target  {{ '%.15f' | format(report.fidelity_vs_target) }}
pt residual (max)   {{ '%.3e' | format(report.pt_residual_max) }} on {{
    report.pt_grid_points }} points
cyclicity defect    {{ '%.3e' | format(report.cyclicity_defect) }}
length (spherical)  {{ '%.12f' | format(report.lengths.spherical) }}
length (param sum)  {{ '%.12f' | format(report.lengths.param_sum) }}
time x cap          {{ '%.12f' | format(report.time_estimate * amp_cap) }}

Lengths: "spherical" is the arc length on the unit sphere; "param sum" adds
the variations of theta and phi segment by segment. The two agree on
meridians and differ on latitude arcs away from the equator.
""")

template_plans = jinja2.Template("""\
geogates {{ version }} :: path plans for gamma = {{
    '%.12g' | format(gamma) }}, cap = {{ '%.6g' | format(amp_cap) }}
{{ '%-14s %12s %14s %14s %14s %18s' | format(
    'family', 'theta_mid', 'spherical', 'param_sum', 'time*cap', 'fidelity') }}
{%- for row in rows %}
{{ '%-14s %12s %14.9f %14.9f %14.9f %18.15f' | format(
    row.family,
    '-' if row.theta_mid is none else ('%.6f' | format(row.theta_mid)),
    row.length_spherical, row.length_paramsum, row.time_times_cap,
    row.fidelity) }}
{%- endfor %}
""")

template_sweep = jinja2.Template("""\
geogates {{ version }} :: fidelity sweep ({{ rows | length }} rows)
{%- for row in rows %}
{{ '%-14s %-16s %+.4f %.15f' | format(
    row.plan_family, row.error_kind, row.magnitude, row.fidelity) }}
{%- endfor %}
""")

template_ion = jinja2.Template("""\
geogates {{ version }} :: trapped-ion reduction check (eta = {{
    eta }}, n_max = {{ n_max }})
{{ '%8s %18s %12s %12s %12s' | format(
    'R', 'fidelity', 'leakage', 'phase_err', 'peak_infid') }}
{%- for row in rows %}
{{ '%8.2f %18.15f %12.3e %+12.6f %12.3e' | format(
    row.R, row.subspace_fidelity, row.leakage, row.phase_error,
    row.peak_infidelity) }}
{%- endfor %}
{%- if slope is not none %}
peak infidelity slope vs R: {{ '%.4f' | format(slope) }}
{%- endif %}
""")


def render_evolution(report, version: str, amp_cap: float) -> str:
    return template_evolution.render(report=report, version=version,
                                     amp_cap=amp_cap)


def records(frame: pandas.DataFrame) -> typing.List[dict]:
    """Rows as plain Python values, with missing values as None."""
    plain = frame.astype(object).where(frame.notna(), None)
    return plain.to_dict(orient='records')


def render_plans(frame: pandas.DataFrame, version: str, gamma: float,
                 amp_cap: float) -> str:
    return template_plans.render(rows=records(frame), version=version,
                                 gamma=gamma, amp_cap=amp_cap)


def render_sweep(frame: pandas.DataFrame, version: str) -> str:
    return template_sweep.render(rows=records(frame), version=version)


def render_ion(frame: pandas.DataFrame, version: str, eta: float, n_max: int,
               slope: typing.Optional[float] = None) -> str:
    return template_ion.render(rows=records(frame), version=version,
                               eta=eta, n_max=n_max, slope=slope)


def dumps(payload) -> str:
    """JSON text with sorted keys; floats keep their shortest exact repr."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False)


def write_json(path, payload) -> None:
    with open(path, 'w') as fh:
        fh.write(dumps(payload))
        fh.write('\n')
    logger.debug('wrote %s', path)


def write_frame(path, frame: pandas.DataFrame) -> None:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                 lineterminator='\n')
    logger.debug('wrote %s (%i rows)', path, len(frame))


def write_text(path, text: str) -> None:
    with open(path, 'w') as fh:
        fh.write(text)
        if not text.endswith('\n'):
            fh.write('\n')


def ensure_directory(path) -> str:
    os.makedirs(path, exist_ok=True)
    return os.fspath(path)
