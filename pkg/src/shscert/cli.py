"""Command-line front end for the certification pipeline.

Subcommands: verify, augment, bound, simulate, synthesize, repro. Every
run writes a manifest (<command>_manifest.json) recording the command,
input hashes, seed, version, and wall-clock next to its outputs. All data
outputs are byte-deterministic for fixed inputs and seed; the manifest's
wall-clock field is the one exception.

Exit codes: 0 success (for verify: all conditions hold), 1 a condition
fails or a pipeline stage fails, 2 verify was inconclusive, 3 malformed
input (bad JSON or violated data invariant).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .augment import Acbc, check_acbc_conditions, construct_acbc
from .bound import compute_delta, compute_delta_for
from .cases import load_case
from .certify import CbcCandidate, check_cbc
from .model import JumpSchedule, SHSModel, validate
from .poly import IntervalBox
from .sim import SimConfig, monte_carlo, simulate, trajectory_csv
from .synth import SynthTemplate, search

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_BAD_INPUT = 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_json(path: str):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise CliError(EXIT_BAD_INPUT, f"cannot read {path}: {e}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CliError(
            EXIT_BAD_INPUT,
            f"malformed JSON in {path} at line {e.lineno}, column {e.colno}: {e.msg}",
        ) from None


def _load_model(path: str) -> SHSModel:
    try:
        model = SHSModel.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(EXIT_BAD_INPUT, f"invalid model {path}: {e}") from None
    bad = validate(model)
    if bad:
        raise CliError(EXIT_BAD_INPUT, f"invalid model {path}: " + "; ".join(bad))
    return model


def _load_candidate(path: str) -> CbcCandidate:
    try:
        return CbcCandidate.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(EXIT_BAD_INPUT, f"invalid candidate {path}: {e}") from None


def _load_acbc(path: str) -> Acbc:
    try:
        return Acbc.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(EXIT_BAD_INPUT, f"invalid lifted certificate {path}: {e}") from None


def _parse_domain(text: str) -> IntervalBox:
    intervals = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            var, _, rng = piece.partition("=")
            lo, _, hi = rng.partition(":")
            intervals[var.strip()] = (float(lo), float(hi))
        except ValueError:
            raise CliError(
                EXIT_BAD_INPUT,
                f"cannot parse domain piece {piece!r}; expected var=lo:hi",
            ) from None
    if not intervals:
        raise CliError(EXIT_BAD_INPUT, f"empty domain spec {text!r}")
    return IntervalBox(intervals)


class _Run:
    """Output directory plus the manifest bookkeeping for one command."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.command = command
        self.outdir = Path(args.out)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.seed = getattr(args, "seed", 0)
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        self.started = time.monotonic()

    def note_input(self, path: str) -> None:
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        self.inputs[str(path)] = digest

    def write(self, name: str, text: str) -> Path:
        path = self.outdir / name
        path.write_text(text)
        self.outputs.append(str(path))
        return path

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "tool_version": __version__,
            "wall_clock_s": round(time.monotonic() - self.started, 6),
            "outputs": sorted(self.outputs),
        }
        (self.outdir / f"{self.command}_manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        )


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cmd_verify(args: argparse.Namespace) -> int:
    run = _Run("verify", args)
    model = _load_model(args.model)
    cand = _load_candidate(args.candidate)
    run.note_input(args.model)
    run.note_input(args.candidate)
    domain = _parse_domain(args.domain) if args.domain else None
    report = check_cbc(model, cand, domain)
    run.write("verify_report.json", _dump(report.to_dict()))
    for c in report.conditions:
        witness = "" if c.report.witness is None else f" witness={c.report.witness}"
        print(f"{c.condition:8s} {c.status:12s} margin={c.margin:.6g}{witness}")
    run.finish()
    if report.any_fail:
        return EXIT_FAIL
    if not report.all_hold:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_augment(args: argparse.Namespace) -> int:
    run = _Run("augment", args)
    model = _load_model(args.model)
    cand = _load_candidate(args.candidate)
    run.note_input(args.model)
    run.note_input(args.candidate)
    eps2 = args.eps2 if args.eps2 is not None else float(model.jump.q2 + 1)
    try:
        acbc = construct_acbc(cand, model.jump, args.eps1, eps2)
    except ValueError as e:
        print(f"construction failed: {e}", file=sys.stderr)
        run.finish()
        return EXIT_FAIL
    run.write("acbc.json", _dump(acbc.to_dict()))
    if args.check:
        report = check_acbc_conditions(model, acbc)
        run.write("acbc_report.json", _dump(report.to_dict()))
    print(
        f"regime={acbc.regime} alpha={acbc.alpha:.6g} eta={acbc.eta:.6g} "
        f"kappa={acbc.kappa:.6g} gamma={acbc.gamma:.6g}"
    )
    run.finish()
    return EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    run = _Run("bound", args)
    acbc = _load_acbc(args.acbc)
    run.note_input(args.acbc)
    try:
        sb = compute_delta_for(acbc, args.horizon)
    except ValueError as e:
        print(f"bound computation failed: {e}", file=sys.stderr)
        run.finish()
        return EXIT_FAIL
    run.write("bound.json", _dump(sb.to_dict()))
    print(
        f"delta={sb.delta:.6g} (raw {sb.delta_raw:.6g}, {sb.case} branch) "
        f"safety>={sb.safety_probability:.6g} over T={sb.horizon_T}"
    )
    run.finish()
    return EXIT_OK


def _sim_config(args: argparse.Namespace, horizon: int, runs: int) -> SimConfig:
    return SimConfig(
        horizon_T=horizon,
        n_trajectories=runs,
        substeps_per_tau=args.substeps,
        master_seed=args.seed,
        schedule=JumpSchedule.parse(args.schedule),
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    run = _Run("simulate", args)
    model = _load_model(args.model)
    cand = _load_candidate(args.candidate)
    run.note_input(args.model)
    run.note_input(args.candidate)
    acbc = None
    if args.acbc:
        acbc = _load_acbc(args.acbc)
        run.note_input(args.acbc)
    try:
        config = _sim_config(args, args.horizon, args.runs)
        if args.x0:
            x0 = tuple(float(v) for v in args.x0.split(","))
            if len(x0) != model.n:
                raise ValueError(f"--x0 needs {model.n} component(s)")
            config = SimConfig(
                horizon_T=config.horizon_T,
                n_trajectories=config.n_trajectories,
                substeps_per_tau=config.substeps_per_tau,
                master_seed=config.master_seed,
                schedule=config.schedule,
                x0=x0,
            )
        config.schedule.validate_for(model.jump)
    except ValueError as e:
        raise CliError(EXIT_BAD_INPUT, str(e)) from None

    keep = min(args.runs, args.keep_trajectories)
    for idx in range(keep):
        traj = simulate(model, cand, config, acbc=acbc, traj_index=idx)
        if args.format == "json":
            doc = [
                {
                    "k": r.k,
                    "time": r.time,
                    "z": r.z,
                    "scenario": r.scenario,
                    "x": list(r.x),
                    "B_value": r.b_value,
                }
                for r in traj.records
            ]
            run.write(f"trajectory_{idx:04d}.json", _dump(doc))
        else:
            run.write(f"trajectory_{idx:04d}.csv", trajectory_csv(model, traj))
    if acbc is not None and args.runs > 1:
        report = monte_carlo(model, cand, acbc, config)
        run.write("mc_report.json", _dump(report.to_dict()))
        print(
            f"n={report.n_trajectories} p_exceed={report.p_exceed_hat:.4g} "
            f"ci99=[{report.ci99_exceed[0]:.4g}, {report.ci99_exceed[1]:.4g}] "
            f"p_unsafe={report.p_unsafe_hat:.4g} delta={report.delta:.4g} "
            f"violated={report.bound_violated}"
        )
    else:
        print(f"wrote {keep} trajectorie(s) to {run.outdir}")
    run.finish()
    return EXIT_OK


def cmd_synthesize(args: argparse.Namespace) -> int:
    run = _Run("synthesize", args)
    model = _load_model(args.model)
    run.note_input(args.model)
    if args.template:
        run.note_input(args.template)
        try:
            template = SynthTemplate.from_dict(_read_json(args.template))
        except ValueError as e:
            raise CliError(EXIT_BAD_INPUT, f"invalid template: {e}") from None
    else:
        template = SynthTemplate(seed=args.seed)
    warm = None
    if args.warm_start:
        warm = _load_candidate(args.warm_start)
        run.note_input(args.warm_start)
    result = search(model, template, warm_start=warm)
    run.write("synth_report.json", _dump(result.to_dict()))
    if result.candidate is not None:
        run.write("synthesized_candidate.json", _dump(result.candidate.to_dict()))
    print(
        f"status={result.status} margin={result.margin:.6g} "
        f"evaluations={result.evaluations} restarts={result.restarts}"
    )
    run.finish()
    return EXIT_OK if result.feasible else EXIT_FAIL


def cmd_repro(args: argparse.Namespace) -> int:
    run = _Run("repro", args)
    case = load_case(args.case)
    summary: dict = {"case": case.case_id, "seed": args.seed}
    stage = "verify"
    try:
        report = check_cbc(case.model, case.candidate)
        summary["verify"] = report.to_dict()
        print(f"[verify] margins: " + ", ".join(
            f"{c.condition}={c.margin:.4g}({c.status})" for c in report.conditions
        ))

        stage = "augment"
        acbc = construct_acbc(case.candidate, case.model.jump, case.eps1, case.eps2)
        summary["acbc"] = acbc.to_dict()
        print(
            f"[augment] regime={acbc.regime} beta_alpha={acbc.beta_alpha:.6g} "
            f"beta_eta={acbc.beta_eta:.6g} kappa={acbc.kappa:.6g} gamma={acbc.gamma:.6g}"
        )

        stage = "bound"
        rep = case.reported
        rounded = compute_delta(
            case.reported_alpha,
            case.reported_eta,
            rep["kappa"],
            rep["gamma"],
            case.horizon,
        )
        full = compute_delta_for(acbc, case.horizon)
        summary["bound_rounded"] = rounded.to_dict()
        summary["bound_full_precision"] = full.to_dict()
        target = rep["safety_probability"]
        got = rounded.safety_probability
        print(
            f"[bound] safety >= {got:.6f} from rounded constants "
            f"(target {target}), {full.safety_probability:.6f} full precision"
        )
        if abs(got - target) > 1e-4:
            print(
                f"repro failed at stage bound: safety {got:.6f} does not match "
                f"reported {target} within 1e-4",
                file=sys.stderr,
            )
            run.finish()
            return EXIT_FAIL

        stage = "simulate"
        schedule = JumpSchedule.parse(args.schedule) if args.schedule else case.schedule
        schedule.validate_for(case.model.jump)
        config = SimConfig(
            horizon_T=case.horizon,
            n_trajectories=args.runs,
            substeps_per_tau=args.substeps,
            master_seed=args.seed,
            schedule=schedule,
        )
        mc = monte_carlo(case.model, case.candidate, acbc, config, delta=full.delta)
        summary["monte_carlo"] = mc.to_dict()
        print(
            f"[simulate] schedule={schedule.describe()} n={mc.n_trajectories} "
            f"p_exceed={mc.p_exceed_hat:.4g} ci99_low={mc.ci99_exceed[0]:.4g} "
            f"p_unsafe={mc.p_unsafe_hat:.4g} delta={mc.delta:.4g} "
            f"violated={mc.bound_violated}"
        )
        for idx in range(min(args.keep_trajectories, args.runs)):
            traj = simulate(case.model, case.candidate, config, acbc=acbc, traj_index=idx)
            run.write(f"case{case.case_id}_traj_{idx:02d}.csv", trajectory_csv(case.model, traj))
    except (ValueError, RuntimeError) as e:
        print(f"repro failed at stage {stage}: {e}", file=sys.stderr)
        run.finish()
        return EXIT_FAIL

    run.write(f"case{case.case_id}_summary.json", _dump(summary))
    run.finish()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shscert",
        description="certificate checking, lifting, bounds, and simulation "
        "for jump-diffusion systems with scheduled stochastic jumps",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
        p.add_argument(
            "--format", choices=("json", "csv"), default="csv",
            help="trajectory output format (default: csv)",
        )

    p = sub.add_parser("verify", help="check the five certificate conditions")
    p.add_argument("model", help="model JSON file")
    p.add_argument("candidate", help="certificate candidate JSON file")
    p.add_argument("--domain", help="override verification box, e.g. x=0:8")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("augment", help="lift a certificate to the augmented system")
    p.add_argument("model", help="model JSON file")
    p.add_argument("candidate", help="certificate candidate JSON file")
    p.add_argument("--eps1", type=float, default=0.1)
    p.add_argument("--eps2", type=float, default=None, help="default: q2 + 1")
    p.add_argument("--check", action="store_true", help="also check lifted conditions")
    common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("bound", help="finite-horizon exceedance bound from a lifted certificate")
    p.add_argument("acbc", help="lifted certificate JSON file")
    p.add_argument("--horizon", type=int, required=True, help="number of transitions")
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="seeded trajectories and Monte Carlo estimates")
    p.add_argument("model", help="model JSON file")
    p.add_argument("candidate", help="certificate candidate JSON file (controllers)")
    p.add_argument("--acbc", help="lifted certificate JSON (enables exceedance tracking)")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--substeps", type=int, default=20)
    p.add_argument("--schedule", default="uniform", help="fixed:d | cyclic:d1,d2,... | uniform")
    p.add_argument("--x0", help="fix the start state, e.g. 1.0 (default: uniform on X0)")
    p.add_argument("--keep-trajectories", type=int, default=10, help="trajectory files to write")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synthesize", help="search for a feasible certificate")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--template", help="search template JSON file")
    p.add_argument("--warm-start", help="candidate JSON to start from")
    common(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("repro", help="end-to-end reproduction of a bundled case")
    p.add_argument("case", choices=("1", "2", "3"), help="bundled case id")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--substeps", type=int, default=20)
    p.add_argument("--schedule", default=None, help="override the case's bundled schedule")
    p.add_argument("--keep-trajectories", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_repro)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    raise SystemExit(main())
