from django.core.management.base import BaseCommand, CommandError

from geometry.cli import add_run_arguments, build_config, parse_points, render, write_output
from geometry.exceptions import GeometryError
from geometry.serializers import FixtureDocumentSerializer
from geometry.services import EXIT_USAGE, export_fixture


class Command(BaseCommand):
    help = 'Export x, xi, phi, g, I, z, K and the cubic form at given points'

    def add_arguments(self, parser):
        add_run_arguments(parser)
        parser.add_argument('--points', default='', help="points as 're:im,re:im;...' (one complex per variable)")

    def handle(self, *args, **options):
        config = build_config(options)
        points = parse_points(options['points'], config.n)
        try:
            document = export_fixture(config, points)
        except GeometryError as exc:
            raise CommandError(f'Fixture export failed: {exc}', returncode=EXIT_USAGE)

        data = FixtureDocumentSerializer(document).data
        write_output(self, render(data, data['records'], config.format), config.output)
        self.stderr.write(self.style.SUCCESS(f'Exported {len(points)} record(s)'))
