"""
Shared plumbing for the verify, scan and fixture management commands.
"""

import csv
import io
import json
import logging

from django.core.management.base import CommandError

from .serializers import RunConfigSerializer
from .services import EXIT_USAGE

logger = logging.getLogger(__name__)


def add_run_arguments(parser):
    parser.add_argument('--prepotential', '-p', required=True,
                        help='builtin name (quad_plus, quad_minus, cubic, mixed2) or an expression in w1..wn')
    parser.add_argument('--n', type=int, help='number of complex variables')
    parser.add_argument('--domain', help="sampling box as 're1:lo,hi;im1:lo,hi;...'")
    parser.add_argument('--samples', type=int)
    parser.add_argument('--seed', type=int)
    parser.add_argument('--fd-step', dest='fd_step', type=float)
    parser.add_argument('--tol', help="tolerance overrides as 'check=value,...'")
    parser.add_argument('--format', choices=['json', 'csv'], default='json')
    parser.add_argument('--out', help='output path; stdout when omitted')
    parser.add_argument('--workers', type=int)


def build_config(options):
    """Validate command options into a RunConfig, mapping errors to exit code 2."""
    fields = ('prepotential', 'n', 'domain', 'samples', 'seed', 'tol', 'fd_step',
              'format', 'out', 'workers', 'panels')
    data = {name: options.get(name) for name in fields if options.get(name) is not None}
    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        raise CommandError(format_errors(serializer.errors), returncode=EXIT_USAGE)
    return serializer.save()


def format_errors(errors):
    parts = []
    for field, messages in errors.items():
        if isinstance(messages, dict):
            messages = [format_errors(messages)]
        parts.append(f"{field}: {' '.join(str(m) for m in messages)}")
    return '; '.join(parts)


def parse_points(text, n):
    """'1:2;0.5:-1' -> list of w; components of one point are separated by ','."""
    points = []
    for item in filter(None, (part.strip() for part in (text or '').split(';'))):
        components = []
        for component in item.split(','):
            re_text, _, im_text = component.partition(':')
            try:
                components.append(complex(float(re_text), float(im_text or 0.0)))
            except ValueError:
                raise CommandError(f"point component {component!r} is not re:im", returncode=EXIT_USAGE)
        if len(components) != n:
            raise CommandError(f"point {item!r} has {len(components)} components, expected {n}",
                               returncode=EXIT_USAGE)
        points.append(components)
    return points


def _flatten(row, prefix=''):
    flat = {}
    for key, value in row.items():
        name = f'{prefix}{key}'
        if isinstance(value, dict):
            flat.update(_flatten(value, f'{name}.'))
        elif isinstance(value, (list, tuple)):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def render(document, rows=None, output_format='json'):
    """JSON of the whole document, or CSV of `rows` (nested values JSON-encoded)."""
    if output_format == 'json':
        return json.dumps(document, indent=2) + '\n'
    rows = [_flatten(row) for row in (rows or [])]
    buffer = io.StringIO()
    fieldnames = list(rows[0]) if rows else []
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def write_output(command, text, path=None):
    if path:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        logger.info(f"wrote {path}")
        command.stdout.write(command.style.SUCCESS(f'Wrote {path}'))
    else:
        command.stdout.write(text, ending='')
