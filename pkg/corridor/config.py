"""Reading, validating and writing scenario files.

A scenario file is INI text with the sections of SCENARIO_DEFAULTS, or the
same sections as a JSON object. A run manifest is accepted too: its
"scenario" entry is the normalized scenario of that run.
"""
import configparser
import copy
import io
import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError

from corridor.forms import SECTION_FORMS
from corridor.scenario import ScenarioConfig

logger = logging.getLogger(__name__)

SECTION_FIELDS = {
    'network': 'network',
    'compliance': 'compliance',
    'demand': 'demand',
    'policy': 'toll',
    'solver': 'solver',
    'simulation': 'simulation',
    'sweep': 'sweep',
    'region': 'region',
}


def _parse_json(text, source):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}")
    if isinstance(data, dict) and 'scenario' in data:
        data = data['scenario']
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise ValidationError(f"{source}: expected an object of sections")
    return data


def _parse_ini(text, source):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ValidationError(f"{source}: {e}")
    if parser.defaults():
        raise ValidationError(f"{source}: keys under [{configparser.DEFAULTSECT}] are not supported")
    return {section: dict(parser.items(section)) for section in parser.sections()}


def read_sections(path):
    ''' Raw sections of a scenario file, values not yet validated. '''
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ValidationError(f"cannot read scenario file {path}: {e.strerror}")
    if path.suffix == '.json' or text.lstrip().startswith('{'):
        return _parse_json(text, str(path))
    return _parse_ini(text, str(path))


def merge_sections(sections):
    ''' Fill every omitted key from SCENARIO_DEFAULTS; unknown names are errors. '''
    merged = copy.deepcopy(settings.SCENARIO_DEFAULTS)
    errors = []
    for section, values in sections.items():
        if section not in merged:
            errors.append(f"unknown section [{section}]")
            continue
        for key, value in values.items():
            if key not in merged[section]:
                errors.append(f"unknown key '{key}' in [{section}]")
            else:
                merged[section][key] = value
    if errors:
        raise ValidationError(errors)
    return merged


def apply_overrides(sections, toll=None, dbar=None, resolution=None, horizon=None,
                    eps_e2=None, seed=None, simulate=None):
    ''' Command-line overrides, applied to raw sections before validation.

    dbar keeps the configured d_min and moves d_max so the expected demand
    is dbar; below d_min the demand becomes deterministic at dbar.
    '''
    if toll is not None:
        sections['policy']['toll'] = toll
    if dbar is not None:
        try:
            d_min = float(sections['demand']['d_min'])
        except (TypeError, ValueError):
            raise ValidationError("[demand] d_min must be a number to apply --dbar")
        low = min(d_min, float(dbar))
        sections['demand']['d_min'] = low
        sections['demand']['d_max'] = 2 * float(dbar) - low
    if resolution is not None:
        sections['solver']['resolution'] = resolution
    if horizon is not None:
        sections['simulation']['horizon'] = horizon
    if eps_e2 is not None:
        sections['compliance']['e2_eps'] = eps_e2
    if seed is not None:
        sections['simulation']['seed'] = seed
    if simulate is not None:
        sections['region']['simulate'] = simulate
    return sections


def validate_sections(sections):
    built = {}
    errors = []
    for section, form_class in SECTION_FORMS.items():
        data = {key: ('' if value is None else value) for key, value in sections[section].items()}
        form = form_class(data=data)
        if form.is_valid():
            built[SECTION_FIELDS[section]] = form.cleaned_data['built']
            continue
        for field, messages in form.errors.items():
            where = f"[{section}]" if field == '__all__' else f"[{section}] {field}"
            errors.extend(f"{where}: {message}" for message in messages)
    if errors:
        raise ValidationError(errors)
    return ScenarioConfig(**built)


def load_scenario(path=None, **overrides):
    ''' Validated scenario from a file (or the defaults when path is None). '''
    sections = read_sections(path) if path is not None else {}
    merged = apply_overrides(merge_sections(sections), **overrides)
    config = validate_sections(merged)
    logger.debug("loaded scenario from %s", path or 'defaults')
    return config


def dump_scenario(config, path=None):
    ''' Normalized INI text of a scenario, written to path when given. '''
    parser = configparser.ConfigParser(interpolation=None)
    for section, values in config.to_sections().items():
        parser[section] = {key: '' if value is None else repr(value) for key, value in values.items()}
    buffer = io.StringIO()
    parser.write(buffer)
    text = buffer.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
