"""Command-line front end.

Subcommands: analyze a kernel file, generate the extremal kernels, run
the minimax optimizer, verify the package's sharp inequalities, smooth a
CSV series, and run the continuum perturbation analysis.  Exit codes: 0
ok, 1 verification failure, 2 input error, 3 kernel-contract error, 4
solver stall.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import minimax
from .chebyshev import (
    ChebPoly,
    cheb_eval,
    cheb_mul,
    make_g,
    make_h,
    monic_minimax_check,
    monomial_to_cheb,
    mul_one_minus_x,
    sup_abs,
)
from .continuum import (
    ZeroMass,
    a_coefficient,
    half_triangle_profile,
    perturbation_report,
    profile_from_table,
    prop8_sides,
    triangle_profile,
)
from .kernel import (
    AsymmetricKernel,
    DiscreteKernel,
    KernelFileError,
    NotNormalized,
    Sequence,
    box_kernel,
    convolve,
    from_full,
    grad,
    kernel_from_symbol,
    l2_norm,
    laplacian,
    read_kernel_file,
    triangle_kernel,
    write_kernel_file,
)
from .minimax import MinimaxProblem, Stalled, WeightKind
from .smoothness import (
    HypothesisViolated,
    OperatorSymbol,
    first_deriv_constant,
    has_nonneg_fourier,
    laplacian_constant,
    operator_constant,
    verify_theorem1,
    verify_theorem2,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INPUT = 2
EXIT_KERNEL = 3
EXIT_STALL = 4

N_CAP = 64
TOL_RANGE = (1e-14, 1e-2)


@dataclass
class RunConfig:
    """Validated run parameters shared by the subcommands."""

    subcommand: str
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    n: int | None = None
    tol: float | None = None

    def validate(self):
        paths = [str(p) for p in (*self.inputs, *self.outputs) if p is not None]
        if len(set(paths)) != len(paths):
            raise ValueError("input and output paths must be distinct")
        if self.n is not None and not 0 <= self.n <= N_CAP:
            raise ValueError(f"n must lie in [0, {N_CAP}]")
        if self.tol is not None and not TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]:
            raise ValueError(f"tolerance must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]")


def format_json(obj, indent: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits
    (lossless round-trip for doubles)."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {format_json(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        if flat:
            return "[" + ", ".join(format_json(v) for v in seq) + "]"
        items = ",\n".join(f"{pad}  {format_json(v, indent + 1)}" for v in seq)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return f"{float(obj):.17g}"
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _emit(payload: dict, out_path: str | None) -> None:
    text = format_json(payload) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kernel_payload(u: DiscreteKernel) -> dict:
    return {"n": u.n, "half": u.half.tolist()}


def _parse_stencil(text: str) -> np.ndarray:
    try:
        taps = np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ValueError(f"bad stencil {text!r}: {exc}") from exc
    if taps.size == 0 or not np.any(taps):
        raise ValueError("stencil must have a nonzero tap")
    return taps


def cmd_analyze(args) -> int:
    RunConfig("analyze", inputs=[args.kernel], outputs=[args.output]).validate()
    try:
        u = read_kernel_file(args.kernel, symmetrize=args.symmetrize, renormalize=args.renormalize)
    except (AsymmetricKernel, NotNormalized) as exc:
        print(f"kernel contract violated: {exc}", file=sys.stderr)
        return EXIT_KERNEL
    except (KernelFileError, OSError, ValueError) as exc:
        print(f"cannot read kernel: {exc}", file=sys.stderr)
        return EXIT_INPUT

    flag, witness = has_nonneg_fourier(u)
    payload = {
        "kernel": _kernel_payload(u),
        "first_deriv": first_deriv_constant(u).to_dict(),
        "laplacian": laplacian_constant(u).to_dict(),
        "nonneg_fourier": {"flag": flag, "witness_x": witness},
    }
    if args.operator:
        try:
            taps = _parse_stencil(args.operator)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_INPUT
        rep = operator_constant(u, OperatorSymbol(taps))
        payload["operator"] = {"stencil": taps.tolist(), **rep.to_dict()}
    _emit(payload, args.output)
    return EXIT_OK


def cmd_generate(args) -> int:
    RunConfig("generate", outputs=[args.output], n=args.n).validate()
    u = box_kernel(args.n) if args.kind == "box" else triangle_kernel(args.n)
    try:
        write_kernel_file(args.output, u)
    except OSError as exc:
        print(f"cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_optimize(args) -> int:
    RunConfig("optimize", outputs=[args.output], n=args.n, tol=args.tol).validate()
    if args.problem == "first-deriv":
        problem = MinimaxProblem(args.n, WeightKind.SQRT_ONE_MINUS_X_TIMES_ABS)
        scale = math.sqrt(2.0)
    elif args.problem == "laplacian":
        if args.nonneg:
            problem = MinimaxProblem(args.n, WeightKind.ONE_MINUS_X_SIGNED_NONNEG, positivity=True)
        else:
            problem = MinimaxProblem(args.n, WeightKind.ONE_MINUS_X_TIMES_ABS)
        scale = 2.0
    else:
        if not args.stencil:
            print("operator mode needs --stencil", file=sys.stderr)
            return EXIT_INPUT
        try:
            taps = _parse_stencil(args.stencil)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_INPUT
        op = OperatorSymbol(taps)
        problem = MinimaxProblem(
            args.n, WeightKind.GENERAL, magnitude_squared=op.magnitude_squared_cheb
        )
        scale = 1.0

    exploratory = args.problem == "operator" or (args.problem == "laplacian" and not args.nonneg)
    code = EXIT_OK
    try:
        sol = minimax.solve(problem, args.tol)
    except Stalled as exc:
        sol = exc.solution
        code = EXIT_STALL
        print(f"solver stalled: {exc}", file=sys.stderr)

    payload = {
        "problem": {
            "kind": args.problem,
            "n": args.n,
            "tol": args.tol,
            "nonneg": bool(args.nonneg),
            "stencil": args.stencil,
            "exploratory": exploratory,
        },
        "value": scale * sol.value,
        "kernel": _kernel_payload(kernel_from_symbol(sol.coeffs)),
        "solution": sol.to_dict(),
    }
    _emit(payload, args.output)
    return code


def _tap(results) -> int:
    print(f"1..{len(results)}")
    failures = 0
    for i, (name, ok, detail) in enumerate(results, 1):
        if ok:
            print(f"ok {i} - {name}")
        else:
            failures += 1
            print(f"not ok {i} - {name} # {detail}")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAIL


def _random_symmetric_kernel(rng, n: int) -> DiscreteKernel:
    while True:
        half = rng.uniform(-0.5, 1.0, n + 1)
        s = half[0] + 2 * half[1:].sum()
        if abs(s) > 0.2:
            return DiscreteKernel(half / s)


def _random_autocorrelation_kernel(rng, n: int) -> DiscreteKernel:
    v = rng.uniform(0.1, 1.0, n + 1)
    full = np.correlate(v, v, mode="full")
    return from_full(full / full.sum(), tol=1e-9, renormalize=True)


def _suite_thm1(n_max: int, rng) -> list:
    out = []
    for n in range(0, n_max + 1):
        rep = first_deriv_constant(box_kernel(n))
        ok = abs(rep.constant - 2 / (2 * n + 1)) <= 1e-10 and rep.is_extremal
        out.append((f"thm1: box kernel attains 2/(2n+1) at n={n}", ok,
                    f"constant={rep.constant!r}"))
    bound_ok, strict_ok = True, True
    worst = ""
    for n in range(1, min(8, n_max) + 1):
        for _ in range(40):
            u = _random_symmetric_kernel(rng, n)
            rep = verify_theorem1(u)
            if rep.constant < rep.sharp_bound - 1e-10:
                bound_ok = False
                worst = f"n={n} constant={rep.constant!r}"
            if np.max(np.abs(u.half - box_kernel(n).half)) > 1e-4 and rep.gap <= 1e-8:
                strict_ok = False
                worst = f"n={n} gap={rep.gap!r}"
    out.append(("thm1: random kernels respect the bound", bound_ok, worst))
    out.append(("thm1: non-box kernels are strictly worse", strict_ok, worst))
    return out


def _suite_thm2(n_max: int, rng) -> list:
    out = []
    for n in range(0, n_max + 1):
        rep = laplacian_constant(triangle_kernel(n))
        ok = abs(rep.constant - 4 / (n + 1) ** 2) <= 1e-10 and rep.is_extremal
        out.append((f"thm2: triangle kernel attains 4/(n+1)^2 at n={n}", ok,
                    f"constant={rep.constant!r}"))
    bound_ok = True
    worst = ""
    for n in range(1, min(8, n_max) + 1):
        for _ in range(40):
            u = _random_autocorrelation_kernel(rng, n)
            rep = verify_theorem2(u)
            if rep.constant < rep.sharp_bound - 1e-10:
                bound_ok = False
                worst = f"n={n} constant={rep.constant!r}"
    out.append(("thm2: nonneg-transform kernels respect the bound", bound_ok, worst))
    hyp_ok = True
    for n in range(1, min(8, n_max) + 1):
        try:
            verify_theorem2(box_kernel(n))
            hyp_ok = False
        except HypothesisViolated:
            pass
    out.append(("thm2: sign-changing transforms are rejected", hyp_ok, ""))
    return out


def _suite_thm3(n_max: int, rng) -> list:
    out = []
    for n in range(1, n_max + 1):
        c = np.zeros(n + 1)
        c[n] = 2.0 ** (1 - n)
        sup, _ = sup_abs(ChebPoly(c))
        ok = abs(sup - 2.0 ** (1 - n)) <= 1e-12
        out.append((f"thm3: scaled degree-{n} Chebyshev polynomial has sup 2^(1-n)", ok,
                    f"sup={sup!r}"))
    strict_ok = True
    worst = ""
    for _ in range(25):
        deg = int(rng.integers(2, 11))
        mono = np.zeros(deg + 1)
        mono[deg] = 1.0
        mono[: deg] = 1e-2 * rng.standard_normal(deg)
        sup, bound, _ = monic_minimax_check(monomial_to_cheb(mono))
        if not sup > bound + 1e-12:
            strict_ok = False
            worst = f"deg={deg} sup={sup!r} bound={bound!r}"
    out.append(("thm3: perturbed monic polynomials deviate strictly more", strict_ok, worst))
    return out


def _suite_thm4(n_max: int, rng) -> list:
    out = []
    for n in range(0, n_max + 1):
        q = mul_one_minus_x(make_g(n))
        level = 2.0 / (n + 1) ** 2
        worst = 0.0
        for j in range(0, (n + 1) // 2 + 1):
            worst = max(worst, abs(cheb_eval(q, math.cos(2 * math.pi * j / (n + 1)))))
        for j in range(0, (n + 2) // 2):
            x = math.cos((2 * j + 1) * math.pi / (n + 1))
            worst = max(worst, abs(cheb_eval(q, x) - level))
        out.append((f"thm4: weighted extremal polynomial equioscillates at n={n}",
                    worst <= 1e-12, f"worst node error={worst!r}"))
    for n in (2, min(5, n_max)):
        u, val = minimax.recover_laplacian_extremal(n, True, 1e-9)
        ok = (abs(val - 4 / (n + 1) ** 2) <= 1e-8
              and np.max(np.abs(u.half - triangle_kernel(n).half)) <= 1e-6)
        out.append((f"thm4: optimizer recovers the triangle kernel at n={n}", ok, f"value={val!r}"))
    return out


def _suite_thm5(n_max: int, rng) -> list:
    out = []
    worst = 0.0
    for n in range(0, n_max + 1):
        sq = cheb_mul(make_h(n), make_h(n))
        worst = max(worst, float(np.max(np.abs(sq.coeffs - make_g(2 * n).coeffs))))
    out.append((f"thm5: square identity h_n^2 = g_2n for n<={n_max}", worst <= 1e-13,
                f"worst coeff error={worst!r}"))
    for n in (2, min(5, n_max)):
        u, val = minimax.recover_first_deriv_extremal(n, 1e-9)
        ok = (abs(val - 2 / (2 * n + 1)) <= 1e-8
              and np.max(np.abs(u.half - box_kernel(n).half)) <= 1e-6)
        out.append((f"thm5: optimizer recovers the box kernel at n={n}", ok, f"value={val!r}"))
    return out


def _suite_prop8(rng) -> list:
    from scipy.special import roots_legendre

    out = []
    x, w = roots_legendre(256)
    worst = 0.0
    for twice_j in range(0, 41):
        j = twice_j / 2.0
        half_nodes = 0.5 + 0.5 * x
        integrand = (1 - 3 * half_nodes**2) * np.cos(2 * math.pi * j * half_nodes)
        oracle = 2.0 * 0.5 * float(np.dot(w, integrand))
        worst = max(worst, abs(a_coefficient(j) - oracle))
    out.append(("prop8: closed-form coefficients match quadrature for |j|<=20",
                worst <= 1e-12, f"worst={worst!r}"))
    sides = prop8_sides(triangle_profile(), 400)
    out.append(("prop8: equality at the triangle", abs(sides.lhs - sides.rhs) <= 1e-10,
                f"lhs-rhs={sides.lhs - sides.rhs!r}"))
    sides = prop8_sides(half_triangle_profile(), 400)
    out.append(("prop8: strict inequality for the half-width triangle",
                sides.lhs - sides.rhs > 1e-6, f"gap={sides.lhs - sides.rhs!r}"))
    return out


def cmd_verify(args) -> int:
    if args.n_max > 30:
        print("n-max must be at most 30", file=sys.stderr)
        return EXIT_INPUT
    rng = np.random.default_rng(args.seed)
    suites = {
        "thm1": lambda: _suite_thm1(args.n_max, rng),
        "thm2": lambda: _suite_thm2(args.n_max, rng),
        "thm3": lambda: _suite_thm3(args.n_max, rng),
        "thm4": lambda: _suite_thm4(args.n_max, rng),
        "thm5": lambda: _suite_thm5(args.n_max, rng),
        "prop8": lambda: _suite_prop8(rng),
    }
    results = []
    if args.suite == "all":
        for fn in suites.values():
            results.extend(fn())
    else:
        results.extend(suites[args.suite]())
    return _tap(results)


def _read_series(path: str) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row_no, raw in enumerate(fh, 1):
            cell = raw.strip().split(",")[0].strip()
            if not cell:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                if row_no == 1 and not values:
                    continue  # header
                raise KernelFileError(f"row {row_no}: cannot parse {cell!r}") from None
    if not values:
        raise KernelFileError("no numeric rows found")
    return np.asarray(values)


def cmd_smooth(args) -> int:
    RunConfig("smooth", inputs=[args.input, args.kernel], outputs=[args.output]).validate()
    sources = sum(1 for v in (args.kernel, args.box, args.triangle) if v is not None)
    if sources != 1:
        print("exactly one of --kernel, --box, --triangle is required", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.kernel:
            u = read_kernel_file(args.kernel, symmetrize=args.symmetrize,
                                 renormalize=args.renormalize)
        elif args.box is not None:
            u = box_kernel(args.box)
        else:
            u = triangle_kernel(args.triangle)
    except (AsymmetricKernel, NotNormalized) as exc:
        print(f"kernel contract violated: {exc}", file=sys.stderr)
        return EXIT_KERNEL
    except (KernelFileError, OSError, ValueError) as exc:
        print(f"cannot read kernel: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        series = _read_series(args.input)
    except (KernelFileError, OSError) as exc:
        print(f"cannot read series: {exc}", file=sys.stderr)
        return EXIT_INPUT
    n = u.n
    if series.size <= 2 * n:
        print(f"series length {series.size} must exceed 2n = {2 * n}", file=sys.stderr)
        return EXIT_INPUT

    f = Sequence(0, series)
    smoothed = convolve(f, u)
    norm_f = l2_norm(f)
    grad_ratio = l2_norm(grad(smoothed)) / norm_f
    lap_ratio = l2_norm(laplacian(smoothed)) / norm_f
    m_u = first_deriv_constant(u).constant
    l_u = laplacian_constant(u).constant

    full = smoothed.values
    if args.pad == "zero":
        out_values = full[n : n + series.size]
    elif args.pad == "reflect":
        padded = Sequence(0, np.pad(series, n, mode="reflect"))
        out_values = convolve(padded, u).values[2 * n : 2 * n + series.size]
    else:
        out_values = full[2 * n : series.size]

    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            for v in out_values:
                fh.write(f"{v:.17g}\n")
    except OSError as exc:
        print(f"cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    print(f"grad ratio:      {grad_ratio:.12g}   ceiling M(u): {m_u:.12g}")
    print(f"laplacian ratio: {lap_ratio:.12g}   ceiling L(u): {l_u:.12g}")
    return EXIT_OK


def cmd_continuum(args) -> int:
    RunConfig("continuum", inputs=[args.profile], outputs=[args.output]).validate()
    if (args.profile is None) == (args.builtin is None):
        print("exactly one of --profile, --builtin is required", file=sys.stderr)
        return EXIT_INPUT
    if args.builtin:
        f = triangle_profile() if args.builtin == "triangle" else half_triangle_profile()
    else:
        try:
            with open(args.profile, "r", encoding="utf-8") as fh:
                data = json.load(fh)
            f = profile_from_table(data["knots"], data["values"])
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            print(f"cannot read profile: {exc}", file=sys.stderr)
            return EXIT_INPUT
    try:
        eps = [float(e) for e in args.eps.split(",")]
    except ValueError as exc:
        print(f"bad eps list: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        rep = perturbation_report(f, eps, n_max=args.n_max)
    except (ZeroMass, ValueError) as exc:
        print(f"continuum analysis failed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(rep.to_dict(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothavg",
        description="Smoothness constants of discrete averaging kernels, "
        "their sharp bounds, and the extremal box/triangle kernels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute smoothness constants of a kernel file")
    p.add_argument("kernel", help="kernel JSON file (half or full form)")
    p.add_argument("--operator", help="extra difference stencil, e.g. '-1,3,-3,1'")
    p.add_argument("--symmetrize", action="store_true", help="average asymmetric input")
    p.add_argument("--renormalize", action="store_true", help="rescale weights to unit sum")
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="write an extremal kernel file")
    p.add_argument("kind", choices=["box", "triangle"])
    p.add_argument("-n", type=int, required=True, help="support radius")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("optimize", help="solve the minimax problem for the optimal kernel")
    p.add_argument("problem", choices=["first-deriv", "laplacian", "operator"])
    p.add_argument("-n", type=int, required=True, help="support radius")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--nonneg", action="store_true",
                   help="laplacian mode: require a nonnegative Fourier transform")
    p.add_argument("--stencil", help="operator mode: difference taps, e.g. '1,-2,1'")
    p.add_argument("-o", "--output", help="write solution JSON here instead of stdout")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="run the sharp-inequality verification suites")
    p.add_argument("suite", choices=["thm1", "thm2", "thm3", "thm4", "thm5", "prop8", "all"],
                   help="thm1/thm2: kernel bounds and equality cases; thm3: monic "
                        "minimal deviation; thm4/thm5: weighted extremal polynomials "
                        "and optimizer recovery; prop8: half-integer sampling inequality")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="seed for the random batteries")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("smooth", help="smooth a one-column CSV series by convolution")
    p.add_argument("input", help="CSV with one numeric column (header optional)")
    p.add_argument("output", help="CSV written with the smoothed values")
    p.add_argument("--kernel", help="kernel JSON file")
    p.add_argument("--box", type=int, help="use the box kernel of this radius")
    p.add_argument("--triangle", type=int, help="use the triangle kernel of this radius")
    p.add_argument("--pad", choices=["zero", "reflect"],
                   help="emit a same-length series instead of the valid interior")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--renormalize", action="store_true")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("continuum", help="first-order perturbation analysis at the triangle")
    p.add_argument("--profile", help='JSON file {"knots": [...], "values": [...]} on [0,1]')
    p.add_argument("--builtin", choices=["triangle", "halftriangle"])
    p.add_argument("--eps", default="1e-2,1e-3", help="comma-separated finite-difference steps")
    p.add_argument("--n-max", type=int, default=1000, help="half-integer scan cutoff")
    p.add_argument("-o", "--output", help="write report JSON here instead of stdout")
    p.set_defaults(func=cmd_continuum)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    raise SystemExit(main())
