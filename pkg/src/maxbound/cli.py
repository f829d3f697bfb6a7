"""Command-line entry point: ``maxbound --suite NAME [overrides]``.

Exit status is 0 when every check passes, 1 when some check fails, 2 for a
bad configuration and 3 for resource or I/O failures.
"""

import argparse
import sys

from .errors import ConfigError, DomainError, ResourceError
from .report import load_config_file, resolve_config, write_reports
from .suites import SUITES

__all__ = ["run_suite", "main", "describe"]

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3


def describe(suite=None):
    names = [suite] if suite else sorted(SUITES)
    return "\n".join(f"{n}: {SUITES[n][1]}" for n in names)


def run_suite(config):
    """Run one suite and write its reports; returns ``(status, reports, paths)``."""
    if config.suite not in SUITES:
        raise ConfigError(f"unknown suite {config.suite!r}; choose from {sorted(SUITES)}")
    reports = SUITES[config.suite][0](config)
    paths = write_reports(reports, config.out, config.format, config)
    status = EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL
    return status, reports, paths


def _parser():
    ap = argparse.ArgumentParser(prog="maxbound", description="Run a named verification suite and write reports.")
    ap.add_argument("--suite", choices=sorted(SUITES))
    ap.add_argument("--N", type=int)
    ap.add_argument("--ell", type=int)
    ap.add_argument("--p", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--grid-scale", dest="grid_scale", type=float)
    ap.add_argument("--out")
    ap.add_argument("--format", choices=("json", "csv"))
    ap.add_argument("--family", choices=("gaussian", "bump", "const"), help="test function for maximal-compare")
    ap.add_argument("--config", help="factor dimensions for maximal-compare, e.g. 2+2")
    ap.add_argument("--config-file", help="JSON object of overrides (CLI flags take precedence)")
    ap.add_argument("--describe", action="store_true", help="print what the suite checks and exit")
    return ap


def main(argv=None):
    ap = _parser()
    args = ap.parse_args(argv)
    if args.describe:
        print(describe(args.suite))
        return EXIT_PASS
    cli = {k: v for k, v in vars(args).items() if k not in ("config_file", "describe")}
    try:
        file = load_config_file(args.config_file) if args.config_file else None
        config = resolve_config(cli, file)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        status, reports, paths = run_suite(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceError, OSError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    for r in sorted(reports, key=lambda r: r.id):
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.id}  constant={r.constant:.6g}  max_ratio={r.max_ratio:.6g}")
    print(f"wrote {len(paths)} files to {config.out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
