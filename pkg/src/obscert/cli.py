"""Command-line front end.

Subcommands analyze a system given either as a specification file (JSON;
see :func:`obscert.systems.parse_system_file`) or as a built-in example
name.  Reports go to standard output; CSV artifacts (full double
precision, 17 significant digits, header row) go to ``--output``.  All
randomized solver starts are seeded (default 0), so identical invocations
produce byte-identical artifacts.

Exit codes: 0 success, 2 invalid-argument, 3 infeasible,
4 not-stabilizable, 5 io.  Failures print ``error[<category>]: <message>``
on standard error.
"""

from __future__ import annotations

import argparse
import math
import sys as _sys
from pathlib import Path

import numpy as np

from .exceptions import (
    InfeasibleError,
    InvalidArgumentError,
    NotStabilizableError,
    SystemFileError,
)
from .gramian import controllability_gramian
from .minnorm import solve_min_norm
from .observability import (
    exact_controllability_constant,
    null_controllability_constant,
    weak_constant,
)
from .stabilize import (
    complete_stabilization_via_shift,
    concatenation_plan,
    komornik_feedback,
    run_concatenation,
    sweep_omega_star,
)
from .systems import (
    BUILTIN_SYSTEMS,
    LinearSystem,
    builtin_system,
    make_wave_heat,
    parse_system_file,
    semigroup,
    write_system_file,
)

_EXIT_CODES = {
    "invalid-argument": 2,
    "infeasible": 3,
    "not-stabilizable": 4,
    "io": 5,
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _resolve_system(spec: str) -> LinearSystem:
    if spec in BUILTIN_SYSTEMS:
        return builtin_system(spec)
    return parse_system_file(spec)


def _parse_vector(text: str, n: int, seed: int) -> np.ndarray:
    if text == "ones":
        return np.ones(n)
    if text == "random":
        return np.random.default_rng(seed).standard_normal(n)
    if text.startswith("e") and text[1:].isdigit():
        k = int(text[1:])
        if not 1 <= k <= n:
            raise InvalidArgumentError(f"basis index must be in 1..{n}, got {text!r}")
        v = np.zeros(n)
        v[k - 1] = 1.0
        return v
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InvalidArgumentError(f"cannot parse state vector {text!r}") from None
    if len(values) != n:
        raise InvalidArgumentError(f"state vector needs {n} entries, got {len(values)}")
    return np.array(values)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InvalidArgumentError(f"cannot parse numeric list {text!r}") from None


def _cmd_gramian(args) -> int:
    system = _resolve_system(args.system)
    g = controllability_gramian(system, args.T)
    print(f"system: {system.label or args.system} (n={system.n}, m={system.m})")
    print(f"horizon: {_fmt(g.horizon)}")
    print(f"rank (threshold {args.threshold:g}): {g.rank(args.threshold)} of {g.n}")
    print(f"largest eigenvalue:  {_fmt(g.eigenvalues[0])}")
    print(f"smallest eigenvalue: {_fmt(g.eigenvalues[-1])}")
    if args.output:
        header = [f"c{j + 1}" for j in range(g.n)]
        _write_csv(args.output, header, g.matrix)
        print(f"wrote Gramian ({g.n}x{g.n}, row-major) to {args.output}")
    return 0


def _cmd_constants(args) -> int:
    system = _resolve_system(args.system)
    g = controllability_gramian(system, args.T)
    S = semigroup(system, args.T)
    print(f"system: {system.label or args.system} (n={system.n}, m={system.m})")
    print(f"horizon: {_fmt(args.T)}  threshold: {args.threshold:g}  seed: {args.seed}")
    print(f"free-flow norm |S(T)|: {np.linalg.norm(S, 2):.12g}")
    exact = exact_controllability_constant(g, rtol=args.threshold)
    null = null_controllability_constant(system, g, rtol=args.threshold)
    print(f"exact-controllability constant: {exact.value:.12g} [{exact.method}]")
    print(f"null-controllability constant:  {null.value:.12g} [{null.method}]")
    alphas = _parse_floats(args.alphas) if args.alphas else []
    if args.alpha is not None:
        alphas = [args.alpha] + alphas
    curve = []
    for alpha in alphas:
        rep = weak_constant(
            system, g, alpha, rtol=args.threshold, starts=args.starts, seed=args.seed
        )
        print(f"weak constant (alpha={alpha:g}): {rep.value:.12g} [{rep.method}]")
        curve.append((alpha, rep.value))
    if args.output:
        _write_csv(args.output, ["alpha", "mu"], curve)
        print(f"wrote {len(curve)} (alpha, mu) rows to {args.output}")
    return 0


def _cmd_minnorm(args) -> int:
    system = _resolve_system(args.system)
    g = controllability_gramian(system, args.T)
    y0 = _parse_vector(args.y0, system.n, args.seed)
    sol = solve_min_norm(system, g, y0, args.alpha, grid=args.grid, rtol=args.threshold)
    print(f"system: {system.label or args.system} (n={system.n}, m={system.m})")
    print(f"horizon: {_fmt(args.T)}  alpha: {_fmt(args.alpha)}  grid: {args.grid}")
    print(f"control L2 norm: {sol.control_norm:.12g}")
    print(f"optimal cost:    {sol.cost:.12g}")
    print(f"adjoint norm:    {sol.adjoint_norm:.12g}")
    print(f"terminal norm:   {np.linalg.norm(sol.terminal_state):.12g}")
    print(f"target radius:   {args.alpha * np.linalg.norm(y0):.12g}")
    if args.output:
        header = ["t"] + [f"u_{j + 1}" for j in range(system.m)]
        rows = np.column_stack([sol.times, sol.control])
        _write_csv(args.output, header, rows)
        print(f"wrote control trajectory ({sol.times.size} samples) to {args.output}")
    return 0


def _print_feedback_plan(plan, args) -> None:
    print(f"kind: {plan.kind}")
    print(f"certified rate: {plan.certified_rate:.12g}")
    K = plan.feedback
    print(f"feedback matrix ({K.shape[0]}x{K.shape[1]}):")
    for row in K:
        print("  " + "  ".join(f"{x: .12g}" for x in row))
    if args.output:
        _write_csv(args.output, [f"k{j + 1}" for j in range(K.shape[1])], K)
        print(f"wrote feedback matrix to {args.output}")


def _cmd_stabilize(args) -> int:
    system = _resolve_system(args.system)
    print(f"system: {system.label or args.system} (n={system.n}, m={system.m})")
    if args.mode == "concat":
        if args.alpha is None:
            raise InvalidArgumentError("concat mode requires --alpha")
        plan = concatenation_plan(
            system, args.alpha, args.T, rtol=args.threshold, starts=args.starts, seed=args.seed
        )
        print("kind: concatenation")
        print(f"alpha: {_fmt(plan.alpha)}  period: {_fmt(plan.period)}")
        print(f"per-step control norm bound: {plan.control_norm_bound:.12g}")
        print(f"certified rate: {plan.certified_rate:.12g}")
    elif args.mode == "komornik":
        if args.lam is None:
            raise InvalidArgumentError("komornik mode requires --lam")
        plan = komornik_feedback(system, args.T, args.lam, rtol=args.threshold)
        _print_feedback_plan(plan, args)
    else:  # shift
        if args.omega is None:
            raise InvalidArgumentError("shift mode requires --omega")
        plan = complete_stabilization_via_shift(
            system, args.omega, args.T, lam=args.lam if args.lam else 1.0, rtol=args.threshold
        )
        _print_feedback_plan(plan, args)
    return 0


def _cmd_sweep(args) -> int:
    system = _resolve_system(args.system)
    alphas = _parse_floats(args.alphas)
    horizons = _parse_floats(args.Ts)
    est = sweep_omega_star(
        system,
        alphas,
        horizons,
        floor=args.floor,
        rtol=args.threshold,
        starts=args.starts,
        seed=args.seed,
    )
    print(f"system: {system.label or args.system} (n={system.n}, m={system.m})")
    finite = sum(1 for _, _, mu in est.entries if math.isfinite(mu))
    print(f"grid cells: {len(est.entries)}  with finite constant: {finite}")
    if est.best_entry is None:
        print("no finite cell: not stabilizable on this grid")
    else:
        a, T, mu = est.best_entry
        print(f"best rate upper bound: {est.best_rate:.12g} at alpha={a:g}, T={T:g} (mu={mu:.12g})")
    print(f"unbounded-below flag (floor {est.floor:g}): {est.unbounded_below}")
    if args.output:
        rows = [
            (a, T, mu, math.log(a) / T, 1.0 if math.isfinite(mu) else 0.0)
            for a, T, mu in est.entries
        ]
        _write_csv(args.output, ["alpha", "T", "mu", "ln_alpha_over_T", "finite"], rows)
        print(f"wrote {len(rows)} sweep rows to {args.output}")
    return 0


def _cmd_simulate(args) -> int:
    system = _resolve_system(args.system)
    y0 = _parse_vector(args.y0, system.n, args.seed)
    if args.control == "concat":
        if args.alpha is None:
            raise InvalidArgumentError("concat control requires --alpha")
        plan = concatenation_plan(
            system, args.alpha, args.T, rtol=args.threshold, starts=args.starts, seed=args.seed
        )
        run = run_concatenation(system, plan, y0, args.steps, grid=args.grid)
        times, states = run.times, run.states
        print(f"concatenation over {args.steps} periods of T={_fmt(args.T)}")
        print(f"measured rate: {run.measured_rate:.12g} (certified {plan.certified_rate:.12g})")
        print(f"control energy: {run.control_energy:.12g}")
    else:
        if args.control == "komornik":
            if args.lam is None:
                raise InvalidArgumentError("komornik control requires --lam")
            plan = komornik_feedback(system, args.T, args.lam, rtol=args.threshold)
            generator = system.A + system.B @ plan.feedback
            print(f"closed loop at certified rate {plan.certified_rate:.12g}")
        else:
            generator = system.A
            print("free flow (zero control)")
        closed = LinearSystem(generator, system.B)
        times = np.linspace(0.0, args.tmax, args.samples)
        step = semigroup(closed, times[1] - times[0]) if args.samples > 1 else np.eye(system.n)
        states = np.empty((times.size, system.n))
        states[0] = y0
        for i in range(1, times.size):
            states[i] = step @ states[i - 1]
    norms = np.linalg.norm(states, axis=1)
    print(f"initial norm: {norms[0]:.12g}  final norm: {norms[-1]:.12g}")
    if args.output:
        if args.state:
            header = ["t", "norm"] + [f"y_{j + 1}" for j in range(system.n)]
            rows = np.column_stack([times, norms, states])
        else:
            header = ["t", "norm"]
            rows = np.column_stack([times, norms])
        _write_csv(args.output, header, rows)
        print(f"wrote trajectory ({times.size} samples) to {args.output}")
    return 0


def _cmd_example(args) -> int:
    if args.name == "wave-heat":
        system = make_wave_heat(args.n, args.lo, args.hi)
    else:
        system = builtin_system(args.name)
    out = args.output or f"{args.name}.json"
    write_system_file(system, out)
    print(f"wrote {system.label or args.name} (n={system.n}, m={system.m}) to {out}")
    return 0


def _add_common(parser: argparse.ArgumentParser, with_seed: bool = True) -> None:
    parser.add_argument(
        "--threshold",
        type=float,
        default=1e-9,
        help="relative rank/kernel threshold (default 1e-9)",
    )
    if with_seed:
        parser.add_argument("--seed", type=int, default=0, help="seed for randomized starts")
        parser.add_argument(
            "--starts", type=int, default=32, help="random multi-start count for the weak constant"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obscert",
        description=(
            "Certify controllability and stabilizability of linear systems via "
            "observability constants, and synthesize minimal-norm or stabilizing controls."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gramian", help="compute and dump the controllability Gramian")
    p.add_argument("system", help="system file path or built-in name")
    p.add_argument("--T", type=float, required=True, help="horizon")
    p.add_argument("--output", help="CSV path for the Gramian dump")
    _add_common(p, with_seed=False)
    p.set_defaults(func=_cmd_gramian)

    p = sub.add_parser("constants", help="observability constants report")
    p.add_argument("system", help="system file path or built-in name")
    p.add_argument("--T", type=float, required=True, help="horizon")
    p.add_argument("--alpha", type=float, help="single alpha for the weak constant")
    p.add_argument("--alphas", help="comma-separated alpha grid for the CSV curve")
    p.add_argument("--output", help="CSV path for the (alpha, mu) curve")
    _add_common(p)
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("minnorm", help="minimal-norm steering control")
    p.add_argument("system", help="system file path or built-in name")
    p.add_argument("--T", type=float, required=True, help="horizon")
    p.add_argument("--alpha", type=float, required=True, help="target contraction factor")
    p.add_argument("--y0", required=True, help="initial state: floats, 'e<k>', 'ones', 'random'")
    p.add_argument("--grid", type=int, default=512, help="control sample count")
    p.add_argument("--output", help="CSV path for the control trajectory")
    _add_common(p)
    p.set_defaults(func=_cmd_minnorm)

    p = sub.add_parser("stabilize", help="synthesize a stabilization certificate")
    p.add_argument("system", help="system file path or built-in name")
    p.add_argument("--mode", choices=["concat", "komornik", "shift"], required=True)
    p.add_argument("--T", type=float, required=True, help="period (concat) or horizon")
    p.add_argument("--alpha", type=float, help="contraction per period (concat mode)")
    p.add_argument("--lam", type=float, help="decay rate (komornik mode; optional for shift)")
    p.add_argument("--omega", type=float, help="target decay rate, negative (shift mode)")
    p.add_argument("--output", help="CSV path for the feedback matrix")
    _add_common(p)
    p.set_defaults(func=_cmd_stabilize)

    p = sub.add_parser("sweep", help="weak-constant sweep and best-rate upper bound")
    p.add_argument("system", help="system file path or built-in name")
    p.add_argument("--alphas", required=True, help="comma-separated alpha grid")
    p.add_argument("--Ts", required=True, help="comma-separated horizon grid")
    p.add_argument("--floor", type=float, default=-20.0, help="unbounded-below detection floor")
    p.add_argument("--output", help="CSV path for sweep rows")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="sample a free, closed-loop, or concatenated trajectory")
    p.add_argument("system", help="system file path or built-in name")
    p.add_argument("--y0", required=True, help="initial state: floats, 'e<k>', 'ones', 'random'")
    p.add_argument("--control", choices=["none", "komornik", "concat"], default="none")
    p.add_argument("--T", type=float, default=1.0, help="period/horizon for controlled modes")
    p.add_argument("--alpha", type=float, help="contraction per period (concat)")
    p.add_argument("--lam", type=float, help="decay rate (komornik)")
    p.add_argument("--steps", type=int, default=5, help="periods to concatenate")
    p.add_argument("--grid", type=int, default=128, help="samples per period (concat)")
    p.add_argument("--tmax", type=float, default=10.0, help="horizon for none/komornik modes")
    p.add_argument("--samples", type=int, default=201, help="sample count for none/komornik")
    p.add_argument("--state", action="store_true", help="include state columns in the CSV")
    p.add_argument("--output", help="CSV path for the trajectory")
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("example", help="write a built-in example system file")
    p.add_argument("name", choices=sorted(BUILTIN_SYSTEMS), help="example name")
    p.add_argument("--n", type=int, default=20, help="grid points (wave-heat)")
    p.add_argument("--lo", type=float, default=0.3, help="control interval start (wave-heat)")
    p.add_argument("--hi", type=float, default=0.7, help="control interval end (wave-heat)")
    p.add_argument("--output", help="destination path (default <name>.json)")
    p.set_defaults(func=_cmd_example)

    return parser


def _categorize(exc: Exception) -> str:
    if isinstance(exc, InfeasibleError):
        return "infeasible"
    if isinstance(exc, NotStabilizableError):
        return "not-stabilizable"
    if isinstance(exc, (SystemFileError, OSError)):
        return "io"
    return "invalid-argument"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        InvalidArgumentError,
        InfeasibleError,
        NotStabilizableError,
        SystemFileError,
        OSError,
    ) as exc:
        category = _categorize(exc)
        print(f"error[{category}]: {exc}", file=_sys.stderr)
        return _EXIT_CODES[category]


if __name__ == "__main__":
    raise SystemExit(main())
