"""Command line interface.

Subcommands: train (policy training run), generate (mesh one condition
with a trained policy), evaluate (re-score a mesh file), benchmark
(single-shot policy quality against per-condition iterative
optimization), export (convert mesh files between formats).

Exit codes: 0 success, 2 missing or invalid configuration (the message
names the offending file), 3 mesh generation failure (the message names
the failing stage), 1 anything else.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from ._version import __version__
from .elliptic import SmootherSettings
from .errors import ConfigError, MeshGenerationError
from .meshio import (
    provenance_tokens,
    read_mesh,
    write_plot3d,
    write_report,
    write_vtk,
)
from .passage import read_condition_config
from .pipeline import generate_mesh, reward
from .quality import QualityReport, evaluate
from .spaces import apply_space_file, condition_space, decision_space
from .training import MeshPolicyAgent, iterative_optimize, TrainSettings

__all__ = ["main"]


def _smoother_from(args) -> SmootherSettings | None:
    max_sweeps = getattr(args, "max_sweeps", None)
    if max_sweeps is None:
        return None
    return SmootherSettings(max_sweeps=max_sweeps)


def _print_report(report: QualityReport) -> None:
    print(f"qj_min = {report.qj_min!r}")
    print(f"qj_avg = {report.qj_avg!r}")
    print(f"qs_min = {report.qs_min!r}")
    print(f"qs_avg = {report.qs_avg!r}")
    print(f"q = {report.q!r}")


def _cmd_train(args) -> int:
    if args.checkpoint and args.space:
        print(
            "error: --space cannot override the spaces embedded in a "
            "checkpoint",
            file=sys.stderr,
        )
        return 2
    if args.checkpoint:
        agent = MeshPolicyAgent.load(args.checkpoint)
        agent.episodes = args.episodes
    else:
        cond, dec = condition_space(), decision_space()
        if args.space:
            cond, dec = apply_space_file(args.space, cond, dec)
        agent = MeshPolicyAgent(
            episodes=args.episodes,
            seed=args.seed,
            condition_spec=cond,
            decision_spec=dec,
        )
    agent.smoother = _smoother_from(args)

    os.makedirs(args.out, exist_ok=True)
    log_path = os.path.join(args.out, "log.csv")
    mode = "a" if args.checkpoint else "w"
    with open(log_path, mode) as log:
        agent.fit(log=log)
    agent.save(os.path.join(args.out, "checkpoint.bin"), __version__)

    h = agent.history_
    last_r = h.rewards[-100:]
    j = h.j_pis[np.isfinite(h.j_pis)][-100:]
    lines = [
        f"episodes = {agent.n_episodes_}",
        f"mean_reward_last_100 = {float(np.mean(last_r))!r}"
        if last_r.size
        else "mean_reward_last_100 = ",
        f"j_pi_moving_average = {float(np.mean(j))!r}"
        if j.size
        else "j_pi_moving_average = ",
        f"final_sigma = {float(h.sigmas[-1])!r}"
        if h.sigmas.size
        else "final_sigma = ",
    ]
    text = "\n".join(lines) + "\n"
    with open(os.path.join(args.out, "summary.txt"), "w") as fh:
        fh.write(text)
    print(text, end="")
    return 0


def _cmd_generate(args) -> int:
    agent = MeshPolicyAgent.load(args.checkpoint)
    cond = read_condition_config(args.blade)
    params = agent.predict_params(cond)
    result = generate_mesh(cond, params, _smoother_from(args))
    tokens = provenance_tokens(__version__, agent.seed, cond)
    if args.format == "vtk":
        written = write_vtk(result.mesh, args.out, tokens)
    else:
        written = write_plot3d(result.mesh, args.out, tokens)
    _print_report(result.report)
    if args.diagnostics:
        print(f"smoother_converged = "
              f"{'true' if result.smoother_converged else 'false'}")
        print(f"smoother_sweeps = {result.smoother_sweeps}")
        print(f"smoother_residual = {result.smoother_residual!r}")
        write_report(written + ".quality.json", result.report, tokens)
        # Row index is the sweep count; row 0 is the pre-sweep residual.
        csv_path = written + ".residuals.csv"
        with open(csv_path, "w") as fh:
            fh.write("sweep,residual\n")
            for sweep, res in enumerate(result.residual_history):
                fh.write(f"{sweep},{float(res)!r}\n")
        print(f"residuals = {csv_path}")
    print(f"mesh = {written}")
    return 0


def _cmd_evaluate(args) -> int:
    mesh, meta = read_mesh(args.mesh)
    report = evaluate(mesh)
    _print_report(report)
    if args.out:
        tokens = {
            k: meta[k] for k in ("version", "seed", "condition") if k in meta
        }
        write_report(args.out, report, tokens or None)
    return 0


def _cmd_benchmark(args) -> int:
    agent = MeshPolicyAgent.load(args.checkpoint)
    cond = read_condition_config(args.blade)
    smoother = _smoother_from(args)

    params = agent.predict_params(cond)
    q_single = reward(cond, params, smoother)

    settings = TrainSettings()
    traces = []
    finals = []
    for s in range(args.seeds):
        res = iterative_optimize(
            cond,
            args.iterations,
            seed=s,
            decision_spec=agent.decision_space_,
            condition_spec=agent.condition_space_,
            settings=settings,
            smoother=smoother,
        )
        traces.append(res.best_trace)
        finals.append(res.best_reward)

    if args.out:
        header = "iteration," + ",".join(
            f"seed_{s}" for s in range(args.seeds)
        )
        rows = [header]
        for i in range(args.iterations):
            rows.append(
                f"{i + 1}," + ",".join(repr(float(t[i])) for t in traces)
            )
        with open(args.out, "w") as fh:
            fh.write("\n".join(rows) + "\n")

    mean_final = float(np.mean(finals)) if finals else float("nan")
    print(f"q_single = {q_single!r}")
    print(f"q_iterative_mean = {mean_final!r}")
    if finals:
        print(f"q_iterative_best = {float(np.max(finals))!r}")
        if mean_final > 0:
            print(f"single_to_iterative = {q_single / mean_final!r}")
    return 0


def _cmd_export(args) -> int:
    mesh, meta = read_mesh(args.mesh)
    tokens = {
        k: meta[k] for k in ("version", "seed", "condition") if k in meta
    }
    if args.format == "vtk":
        written = write_vtk(mesh, args.out, tokens)
    else:
        written = write_plot3d(mesh, args.out, tokens)
    print(f"mesh = {written}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hohmesh",
        description="Structured HOH mesh generation for blade passages "
        "with a learned parameter policy.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the decision policy")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--episodes", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--space", help="variable bound overrides file")
    p.add_argument("--checkpoint", help="resume from this checkpoint")
    p.add_argument("--max-sweeps", type=int, dest="max_sweeps")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("generate", help="mesh one condition with a policy")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--blade", required=True, help="condition config file")
    p.add_argument("--out", required=True, help="mesh output path")
    p.add_argument("--format", choices=("vtk", "p3d"), default="p3d")
    p.add_argument("--diagnostics", action="store_true")
    p.add_argument("--max-sweeps", type=int, dest="max_sweeps")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("evaluate", help="re-score a mesh file")
    p.add_argument("mesh", help="mesh file (.p3d or .index)")
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser(
        "benchmark",
        help="compare single-shot policy quality with iterative "
        "optimization",
    )
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--blade", required=True)
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--out", help="best-so-far trace CSV path")
    p.add_argument("--max-sweeps", type=int, dest="max_sweeps")
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("export", help="convert a mesh file")
    p.add_argument("mesh", help="source mesh file")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("vtk", "p3d"), required=True)
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MeshGenerationError as exc:
        print(
            f"error: mesh generation failed at stage {exc.stage}: {exc}",
            file=sys.stderr,
        )
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
