"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

Командная строка: solve, scan, inverse, certify, identities.
stdout только для машиночитаемого вывода; логи идут в stderr, журнал в data/logs.
"""

import argparse
import json
import logging
import os
import sys
from datetime import datetime
from pathlib import Path

from core.config import PROJECT_ROOT, default_jobs, load_config
from core.errors import (Ccc4Error, IndeterminateShapeError, InvalidInputError,
                         NonRealizableError, RecordFormatError, SolverError, UniquenessAlarm)
from core.geometry import MassVector
from engine.identities import format_table, run_battery
from engine.inverse import CyclicShape, invert_shape
from engine.oracle import cartesian_check
from engine.records import encode_json, load_record, record_to_dict
from engine.scan import parse_fix, run_scan, write_scan_csv
from engine.solver import CertCheck, SolverOptions, certify_minimum, minimize_U

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NOT_CONVERGED = 2
EXIT_UNIQUENESS_ALARM = 3
EXIT_USAGE = 64
EXIT_NO_INPUT = 66
EXIT_CANT_CREATE = 73

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Ccc4ArgumentParser(argparse.ArgumentParser):
    """Ошибки разбора завершают процесс кодом 64"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _reals(text, n, what):
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what}: expected {n} comma-separated numbers, got {text!r}")
    if len(values) != n:
        raise argparse.ArgumentTypeError(f"{what}: expected {n} values, got {len(values)}")
    return values


def masses_arg(text):
    try:
        return MassVector.from_array(_reals(text, 4, "masses"))
    except InvalidInputError as e:
        raise argparse.ArgumentTypeError(str(e))


def angles_arg(text):
    return _reals(text, 4, "angles")


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def grid_size(text):
    value = positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"grid size must be at least 2, got {value}")
    return value


def positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def build_parser():
    parser = Ccc4ArgumentParser(prog="ccc4", description="Co-circular central configurations of four bodies")
    parser.add_argument("--config", help="path to system_config.json")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Ccc4ArgumentParser)

    p = sub.add_parser("solve", help="minimize U on M+ for given masses")
    p.add_argument("--masses", type=masses_arg, required=True, metavar="m1,m2,m3,m4")
    p.add_argument("--starts", type=positive_int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=positive_float, help="co-circularity tolerance")
    p.add_argument("--out", help="write the record here instead of stdout")

    p = sub.add_parser("scan", help="sweep the mass simplex on an N^3 grid")
    p.add_argument("--grid", type=grid_size, required=True, metavar="N")
    p.add_argument("--fix", default="m4=1", help="fixed mass, e.g. m4=1")
    p.add_argument("--out", help="CSV file (default stdout)")
    p.add_argument("--jobs", type=positive_int, help="worker processes (default $CCC4_JOBS)")

    p = sub.add_parser("inverse", help="recover masses from a cyclic shape")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--angles", type=angles_arg, metavar="a1,a2,a3,a4")
    src.add_argument("--shape", help="JSON file {theta: [..4], radius}")
    p.add_argument("--degrees", action="store_true")
    p.add_argument("--radius", type=positive_float, default=1.0)

    p = sub.add_parser("certify", help="re-check a stored solve record")
    p.add_argument("--in", dest="infile", required=True)

    p = sub.add_parser("identities", help="run the identity battery")
    p.add_argument("--samples", type=positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _open_output(path):
    if path is None:
        return sys.stdout
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    return open(path, 'w', encoding='utf-8', newline='')


class Ccc4Shell:
    """Исполнитель команд; каждая возвращает (код выхода, сводка для журнала)"""

    def __init__(self, config):
        self.config = config

    # ------------------------------------------------------------------ solve
    def cmd_solve(self, args):
        opts = SolverOptions.from_config(self.config, starts=args.starts, seed=args.seed,
                                         cocircular_tol=args.tol)
        try:
            rec = minimize_U(args.masses, opts)
        except UniquenessAlarm as e:
            print(f"uniqueness alarm: {e}", file=sys.stderr)
            return EXIT_UNIQUENESS_ALARM, {"alarm": str(e)}
        except SolverError as e:
            print(f"solver failed: {e}", file=sys.stderr)
            return EXIT_NOT_CONVERGED, {"error": str(e)}

        try:
            out = _open_output(args.out)
        except OSError as e:
            print(f"cannot write {args.out}: {e}", file=sys.stderr)
            return EXIT_CANT_CREATE, {"error": str(e)}
        try:
            out.write(encode_json(record_to_dict(rec)))
        finally:
            if out is not sys.stdout:
                out.close()

        summary = {"masses": rec.masses.as_array().tolist(), "U": rec.scalars.U,
                   "converged": rec.converged, "is_cocircular": rec.is_cocircular}
        if not rec.converged:
            return EXIT_NOT_CONVERGED, summary
        report = certify_minimum(rec, self.config)
        if not report.passed:
            print(f"certification failed: {', '.join(report.failed())}", file=sys.stderr)
            return EXIT_CHECK_FAILED, summary
        return EXIT_OK, summary

    # ------------------------------------------------------------------- scan
    def cmd_scan(self, args):
        try:
            fix = parse_fix(args.fix)
        except InvalidInputError as e:
            raise UsageError(str(e))
        jobs = args.jobs or default_jobs(self.config)
        try:
            out = _open_output(args.out)
        except OSError as e:
            print(f"cannot write {args.out}: {e}", file=sys.stderr)
            return EXIT_CANT_CREATE, {"error": str(e)}
        try:
            rows = run_scan(args.grid, fix, jobs, config=self.config)
            write_scan_csv(rows, out, self.config["scan"]["schema"])
        finally:
            if out is not sys.stdout:
                out.close()
        failed = sum(1 for row in rows if not row.converged)
        summary = {"grid": args.grid, "rows": len(rows), "not_converged": failed,
                   "cocircular": sum(1 for row in rows if row.is_cocircular)}
        return (EXIT_NOT_CONVERGED if failed else EXIT_OK), summary

    # ---------------------------------------------------------------- inverse
    def _read_shape(self, args):
        if args.shape is not None:
            try:
                with open(args.shape, 'r', encoding='utf-8') as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise FileNotFoundError(f"cannot read shape {args.shape}: {e}")
            return CyclicShape.from_dict(data)
        if args.degrees:
            return CyclicShape.from_degrees(args.angles, args.radius)
        return CyclicShape(tuple(args.angles), args.radius)

    def cmd_inverse(self, args):
        try:
            shape = self._read_shape(args)
        except InvalidInputError as e:
            raise UsageError(str(e))
        except FileNotFoundError as e:
            print(str(e), file=sys.stderr)
            return EXIT_NO_INPUT, {"error": str(e)}
        try:
            result = invert_shape(shape, config=self.config)
        except IndeterminateShapeError as e:
            print(f"infeasible: {e}")
            return EXIT_CHECK_FAILED, {"feasible": False, "reason": str(e)}
        if not result.feasible:
            print(f"infeasible: {result.reason}")
            return EXIT_CHECK_FAILED, {"feasible": False, "reason": result.reason}
        sys.stdout.write(encode_json(result.to_dict()))
        return EXIT_OK, {"feasible": True, "masses": result.masses.as_array().tolist()}

    # ---------------------------------------------------------------- certify
    def cmd_certify(self, args):
        try:
            rec = load_record(args.infile)
        except (OSError, RecordFormatError) as e:
            print(f"cannot read record {args.infile}: {e}", file=sys.stderr)
            return EXIT_NO_INPUT, {"error": str(e)}
        report = certify_minimum(rec, self.config)
        checks = dict(report.checks)
        try:
            checks["cartesian"] = cartesian_check(rec, self.config)
        except NonRealizableError as e:
            logger.warning(f"[СЕРТИФИКАТ] вложение невозможно: {e}")
            checks["cartesian"] = CertCheck(False, float("nan"), 0.0)
        passed = all(c.passed for c in checks.values())
        sys.stdout.write(encode_json({"passed": passed, "checks": checks}))
        return (EXIT_OK if passed else EXIT_CHECK_FAILED), {"passed": passed,
                                                            "failed": [k for k, c in checks.items() if not c.passed]}

    # ------------------------------------------------------------- identities
    def cmd_identities(self, args):
        results = run_battery(args.samples, args.seed)
        sys.stdout.write(format_table(results))
        passed = all(r.passed for r in results)
        return (EXIT_OK if passed else EXIT_CHECK_FAILED), {
            "samples": args.samples, "seed": args.seed, "passed": passed}

    # ---------------------------------------------------------------- журнал
    def log_run(self, command, argv, code, summary):
        """Дописывает запись в data/logs/run_log.json (последние max_entries)"""
        cfg = self.config["logging"]
        if not cfg.get("run_log", True):
            return
        log_file = Path(self.config["paths"]["run_log"])
        if not log_file.is_absolute():
            log_file = PROJECT_ROOT / log_file
        log = []
        if log_file.exists():
            with open(log_file, 'r', encoding='utf-8') as f:
                try:
                    log = json.load(f)
                except json.JSONDecodeError:
                    log = []
        log.append({
            'timestamp': datetime.now().isoformat(),
            'command': command,
            'argv': list(argv),
            'exit_code': code,
            'summary': summary,
        })
        log = log[-int(cfg.get("max_entries", 100)):]
        try:
            log_file.parent.mkdir(parents=True, exist_ok=True)
            with open(log_file, 'w', encoding='utf-8') as f:
                f.write(encode_json(log))
        except OSError as e:
            logger.warning(f"[ЖУРНАЛ] не записан: {e}")

    def run(self, args, argv):
        handler = getattr(self, f"cmd_{args.command}")
        code, summary = handler(args)
        self.log_run(args.command, argv, code, summary)
        return code


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    config = load_config(args.config)
    level = logging.INFO if args.verbose else getattr(logging, str(config["logging"]["level"]).upper(), logging.WARNING)
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT, level=level, force=True)

    shell = Ccc4Shell(config)
    try:
        return shell.run(args, argv)
    except UsageError as e:
        parser.error(str(e))
    except Ccc4Error as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
