"""End-to-end experiment pipeline and property-verification suite.

A trial generates an instance, solves it, injects a scaled Gaussian
perturbation, solves the perturbed problem, and evaluates the injected
perturbation magnitude mu_1 against the linearized backward-error
estimate of the perturbed solution, together with the relative residuals
of both augmented solves. Trials are pure functions of their seed, so
experiment tables are bitwise reproducible and rows can be replayed
individually.

This module also owns the on-disk formats: whitespace matrix files
(first line "rows cols", then row-major entries), problem bundles
(directory with files A, b, B, d, sig), and the csv/markdown/json
experiment tables.
"""

from __future__ import annotations

import json
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import backward_error as be
from . import oracle
from . import testgen
from .core import (
    IlseError,
    IlseProblem,
    IlseSolution,
    PerturbationQuadruple,
    SignatureMatrix,
    WeightScheme,
    apply_signature,
    perturbed_problem,
    weighted_perturbation_norm,
)
from .solver import assemble_augmented, check_well_posedness, normal_equation_residuals, solve_ilse
from .testgen import GenParams, gen_ilse_instance, gen_perturbation, subseed

CSV_HEADER = "eps,kappa_A,kappa_B,gamma,gamma_bar,mu_1,rho_xi1,rho_xi0,tau0,condition_flag,seed"

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1
_STREAM_TRIAL_GEN = 0x8CB92BA72F3D8DD7
_STREAM_TRIAL_PERT = 0x3C6EF372FE94F82B


# ---------------------------------------------------------------------------
# Per-trial quantities
# ---------------------------------------------------------------------------

def mu_one(pert: PerturbationQuadruple) -> float:
    """Unweighted Frobenius norm of the block perturbation [E, f; F, g].

    The experimental stand-in for the backward error: the magnitude of
    the perturbation that was actually injected.
    """
    return math.sqrt(
        float(np.sum(pert.E**2) + np.sum(pert.f**2) + np.sum(pert.F**2) + np.sum(pert.g**2))
    )


def residual_gamma(problem: IlseProblem, sol: IlseSolution) -> float:
    """Relative residual of the augmented system at a solution bundle.

    |K u - rhs|_2 / (|K|_F |u|_2 + |rhs|_2) with u = (lam, s_vec, x).
    """
    K, rhs = assemble_augmented(problem)
    u = np.concatenate([sol.lam, sol.s_vec, sol.x])
    num = float(np.linalg.norm(K @ u - rhs))
    den = float(np.linalg.norm(K) * np.linalg.norm(u) + np.linalg.norm(rhs))
    return num / den if den > 0.0 else 0.0


@dataclass(frozen=True)
class ExperimentRow:
    """One trial's worth of results.

    kappa_a is the achieved condition number of the generated A (the
    nominal target is kept separately); kappa_b is nominal. Failed trials
    carry NaN numerics plus a reason and are never silently retried.
    """

    eps: float
    kappa_a: float
    kappa_b: float
    gamma: float
    gamma_bar: float
    mu_1: float
    rho_xi1: float
    rho_xi0: float
    tau0: float
    condition_flag: bool
    seed: int
    kappa_a_nominal: float
    failed: bool = False
    reason: str = ""


def run_trial(params: GenParams, eps: float, w: WeightScheme, seed: int) -> ExperimentRow:
    """Generate, solve, perturb, re-solve, and evaluate one trial.

    The estimate is always computed against the ORIGINAL problem with the
    perturbed solve's solution as candidate. Failures (ill-posed draws at
    extreme conditioning, rank-deficient linearizations) produce a failed
    row instead of raising.
    """
    def failed_row(reason: str) -> ExperimentRow:
        nan = math.nan
        return ExperimentRow(
            eps=eps, kappa_a=nan, kappa_b=params.kappa_b, gamma=nan, gamma_bar=nan,
            mu_1=nan, rho_xi1=nan, rho_xi0=nan, tau0=nan, condition_flag=False,
            seed=seed, kappa_a_nominal=params.kappa_a, failed=True, reason=reason,
        )

    try:
        gen_params = replace(params, seed=subseed(seed, _STREAM_TRIAL_GEN))
        problem, achieved = gen_ilse_instance(gen_params)
        sol = solve_ilse(problem)
        gamma = residual_gamma(problem, sol)

        pert = gen_perturbation(problem, eps, subseed(seed, _STREAM_TRIAL_PERT))
        pproblem = perturbed_problem(problem, pert)
        # The candidate is the stationary point of the perturbed augmented
        # system; at conditioning extremes the perturbed projected form can
        # go indefinite at rounding level, which must not void the trial.
        psol = solve_ilse(pproblem, check_well_posed=False)
        gamma_bar = residual_gamma(pproblem, psol)

        report = be.backward_error_bounds(problem, psol.x, w, xi0=sol.xi)
    except (IlseError, np.linalg.LinAlgError) as exc:
        return failed_row(f"{type(exc).__name__}: {exc}")

    return ExperimentRow(
        eps=eps,
        kappa_a=achieved,
        kappa_b=params.kappa_b,
        gamma=gamma,
        gamma_bar=gamma_bar,
        mu_1=mu_one(pert),
        rho_xi1=report.rho_xi1,
        rho_xi0=report.rho_xi0 if report.rho_xi0 is not None else math.nan,
        tau0=report.tau0,
        condition_flag=report.small_rho_condition,
        seed=seed,
        kappa_a_nominal=params.kappa_a,
    )


# ---------------------------------------------------------------------------
# Experiment grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Grid specification for an experiment table."""

    m: int = 100
    n: int = 50
    s: int = 20
    p: int = 60
    q: int = 40
    kappa_a_list: tuple[float, ...] = (1e2, 1e4, 1e8)
    kappa_b_list: tuple[float, ...] = (1e2, 1e4, 1e6, 1e8)
    eps_list: tuple[float, ...] = (1e-6, 1e-12)
    trials_per_cell: int = 1
    base_seed: int = 20240901
    weights: WeightScheme = field(default_factory=WeightScheme)
    output_format: str = "csv"
    hyper_bound: float = 1.0
    jobs: int = 1

    def __post_init__(self):
        if not self.eps_list or not self.kappa_a_list or not self.kappa_b_list:
            raise ValueError("eps/kappa lists must be nonempty")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if self.output_format not in ("csv", "markdown", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        object.__setattr__(self, "kappa_a_list", tuple(float(x) for x in self.kappa_a_list))
        object.__setattr__(self, "kappa_b_list", tuple(float(x) for x in self.kappa_b_list))
        object.__setattr__(self, "eps_list", tuple(float(x) for x in self.eps_list))

    def gen_params(self, kappa_a: float, kappa_b: float, seed: int = 0) -> GenParams:
        return GenParams(
            m=self.m, n=self.n, s=self.s, p=self.p, q=self.q,
            kappa_a=kappa_a, kappa_b=kappa_b, seed=seed, hyper_bound=self.hyper_bound,
        )

    def to_dict(self) -> dict:
        return {
            "m": self.m, "n": self.n, "s": self.s, "p": self.p, "q": self.q,
            "kappa_a_list": list(self.kappa_a_list),
            "kappa_b_list": list(self.kappa_b_list),
            "eps_list": list(self.eps_list),
            "trials_per_cell": self.trials_per_cell,
            "base_seed": self.base_seed,
            "theta1": self.weights.theta1,
            "theta2": self.weights.theta2,
            "theta3": self.weights.theta3,
            "output_format": self.output_format,
            "hyper_bound": self.hyper_bound,
            "jobs": self.jobs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        weights = WeightScheme(
            theta1=data.pop("theta1", 1.0),
            theta2=data.pop("theta2", 1.0),
            theta3=data.pop("theta3", 1.0),
        )
        known = {f for f in cls.__dataclass_fields__ if f != "weights"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key in ("kappa_a_list", "kappa_b_list", "eps_list"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(weights=weights, **data)


def derive_trial_seed(base_seed: int, index: int) -> int:
    """Per-trial 64-bit seed: splitmix-style multiply-xor of the index."""
    return (int(base_seed) ^ ((index + 1) * _GOLDEN)) & _MASK64


def run_experiment(config: ExperimentConfig) -> tuple[list[ExperimentRow], str]:
    """Run the Cartesian grid eps x kappa_A x kappa_B x trials.

    Rows come back in deterministic grid order regardless of the worker
    count, followed by per-cell median summaries in the formatted table.
    Raises IlseError when every trial failed.
    """
    cells = [
        (eps, ka, kb, t)
        for eps in config.eps_list
        for ka in config.kappa_a_list
        for kb in config.kappa_b_list
        for t in range(config.trials_per_cell)
    ]

    def work(item):
        index, (eps, ka, kb, _t) = item
        seed = derive_trial_seed(config.base_seed, index)
        return run_trial(config.gen_params(ka, kb), eps, config.weights, seed)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(work, enumerate(cells)))
    else:
        rows = [work(item) for item in enumerate(cells)]

    if all(row.failed for row in rows):
        raise IlseError("all trials failed; see row reasons")
    return rows, format_rows(rows, config.output_format)


# ---------------------------------------------------------------------------
# Table emission
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{float(x):.5e}"


def summarize_rows(rows: list[ExperimentRow]) -> list[str]:
    """Per-cell medians of rho_xi1 / eps over the successful trials."""
    cells: dict[tuple[float, float, float], list[float]] = {}
    for row in rows:
        if row.failed or row.eps == 0.0:
            continue
        key = (row.eps, row.kappa_a_nominal, row.kappa_b)
        cells.setdefault(key, []).append(row.rho_xi1 / row.eps)
    lines = []
    for (eps, ka, kb), ratios in sorted(cells.items()):
        med = statistics.median(ratios)
        lines.append(
            f"median rho_xi1/eps = {_fmt(med)} "
            f"[eps={_fmt(eps)}, kappa_A={_fmt(ka)}, kappa_B={_fmt(kb)}, trials={len(ratios)}]"
        )
    failed = sum(1 for row in rows if row.failed)
    if failed:
        lines.append(f"failed trials: {failed} of {len(rows)}")
    return lines


def _row_record(row: ExperimentRow) -> list[str]:
    return [
        _fmt(row.eps), _fmt(row.kappa_a), _fmt(row.kappa_b), _fmt(row.gamma),
        _fmt(row.gamma_bar), _fmt(row.mu_1), _fmt(row.rho_xi1), _fmt(row.rho_xi0),
        _fmt(row.tau0), str(int(row.condition_flag)), str(row.seed),
    ]


def format_rows(rows: list[ExperimentRow], fmt: str = "csv") -> str:
    """Render rows as csv, markdown or json, with the summary appended.

    The csv header and the 6-significant-digit scientific format are fixed
    so emitted tables can be compared byte for byte.
    """
    summary = summarize_rows(rows)
    if fmt == "csv":
        lines = [CSV_HEADER]
        lines += [",".join(_row_record(row)) for row in rows]
        lines += [f"# {s}" for s in summary]
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        cols = CSV_HEADER.split(",")
        lines = ["| " + " | ".join(cols) + " |",
                 "|" + "|".join(["---"] * len(cols)) + "|"]
        lines += ["| " + " | ".join(_row_record(row)) + " |" for row in rows]
        lines += [""] + summary
        return "\n".join(lines) + "\n"
    if fmt == "json":
        payload = {
            "rows": [
                {
                    "eps": row.eps, "kappa_A": row.kappa_a, "kappa_B": row.kappa_b,
                    "gamma": row.gamma, "gamma_bar": row.gamma_bar, "mu_1": row.mu_1,
                    "rho_xi1": row.rho_xi1, "rho_xi0": row.rho_xi0, "tau0": row.tau0,
                    "condition_flag": bool(row.condition_flag), "seed": row.seed,
                    "kappa_A_nominal": row.kappa_a_nominal,
                    "failed": row.failed, "reason": row.reason,
                }
                for row in rows
            ],
            "summary": summary,
        }
        return json.dumps(payload, indent=2, allow_nan=True) + "\n"
    raise ValueError(f"unknown output format {fmt!r}")


def parse_experiment_csv(text: str) -> list[dict]:
    """Parse an emitted csv table back into per-row dicts (summary lines
    beginning with '#' are ignored)."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("missing or unexpected csv header")
    cols = CSV_HEADER.split(",")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(cols):
            raise ValueError(f"malformed csv row: {ln!r}")
        rec: dict = dict(zip(cols, parts))
        for key in cols:
            if key == "seed":
                rec[key] = int(rec[key])
            elif key == "condition_flag":
                rec[key] = bool(int(rec[key]))
            else:
                rec[key] = float(rec[key])
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# Problem bundles on disk
# ---------------------------------------------------------------------------

def write_matrix(path, M) -> None:
    """Plain-text matrix: first line "rows cols", then one row per line."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(f"{v:.17e}" for v in row) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: first line must be 'rows cols'")
        rows, cols = int(header[0]), int(header[1])
        data = np.array(fh.read().split(), dtype=float)
    if data.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} entries, found {data.size}")
    return data.reshape(rows, cols)


def write_vector(path, v) -> None:
    write_matrix(path, np.asarray(v, dtype=float).reshape(-1, 1))


def read_vector(path) -> np.ndarray:
    M = read_matrix(path)
    if M.shape[1] != 1:
        raise ValueError(f"{path}: vectors are single-column matrices, got shape {M.shape}")
    return M[:, 0]


def write_problem(directory, problem: IlseProblem) -> None:
    """Problem bundle: files A, b, B, d and sig (a 'p q' line) in a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(directory / "A", problem.A)
    write_vector(directory / "b", problem.b)
    write_matrix(directory / "B", problem.B)
    write_vector(directory / "d", problem.d)
    (directory / "sig").write_text(f"{problem.sig.p} {problem.sig.q}\n", encoding="ascii")


def read_problem(directory) -> IlseProblem:
    directory = Path(directory)
    parts = (directory / "sig").read_text(encoding="ascii").split()
    if len(parts) != 2:
        raise ValueError(f"{directory / 'sig'}: expected 'p q'")
    sig = SignatureMatrix(p=int(parts[0]), q=int(parts[1]))
    return IlseProblem(
        A=read_matrix(directory / "A"),
        b=read_vector(directory / "b"),
        B=read_matrix(directory / "B"),
        d=read_vector(directory / "d"),
        sig=sig,
    )


# ---------------------------------------------------------------------------
# Property-verification suite
# ---------------------------------------------------------------------------

@dataclass
class PropertyResult:
    name: str
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def check(self, condition: bool, detail: str = "") -> None:
        if condition:
            self.passed += 1
        else:
            self.failed += 1
            if detail and len(self.detail) < 500:
                self.detail += ("; " if self.detail else "") + detail

    def skip(self, detail: str = "") -> None:
        self.skipped += 1
        if detail and "precondition unmet" not in self.detail:
            self.detail += ("; " if self.detail else "") + detail


@dataclass(frozen=True)
class VerifyReport:
    results: tuple[PropertyResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            status = "PASS" if r.ok else "FAIL"
            line = f"[{status}] {r.name}: passed={r.passed} failed={r.failed} skipped={r.skipped}"
            if r.detail:
                line += f" ({r.detail})"
            out.append(line)
        out.append("verify: " + ("ALL PROPERTIES PASS" if self.ok else "PROPERTY FAILURES PRESENT"))
        return out


def _default_dims() -> GenParams:
    return GenParams(m=24, n=12, s=5, p=14, q=10, kappa_a=50.0, kappa_b=100.0, seed=0)


def _case(params: GenParams, eps: float, seed: int, w: WeightScheme):
    """One generated/solved/perturbed case: returns problem, exact solve,
    perturbation, and the perturbed solve whose x serves as candidate y."""
    problem, _ = gen_ilse_instance(replace(params, seed=subseed(seed, _STREAM_TRIAL_GEN)))
    sol = solve_ilse(problem)
    pert = gen_perturbation(problem, eps, subseed(seed, _STREAM_TRIAL_PERT))
    psol = solve_ilse(perturbed_problem(problem, pert), check_well_posed=False)
    return problem, sol, pert, psol


def _feasible_quadruple(problem, y, xi0, seed, scale=1e-4):
    """A perturbation in the literal feasibility set for (y, xi0).

    E and F are random at the given scale; g closes the constraint
    equation and f solves the optimality equation of the perturbed data in
    the least-squares sense (exact when A + E has full column rank).
    """
    rng = np.random.Generator(np.random.Philox(key=seed & _MASK64))
    E = scale * rng.standard_normal(problem.A.shape)
    F = scale * rng.standard_normal(problem.B.shape)
    g = (problem.B + F) @ y - problem.d
    Ae = problem.A + E
    target = (problem.B + F).T @ xi0 - Ae.T @ apply_signature(problem.sig, problem.b - Ae @ y)
    f, *_ = np.linalg.lstsq(apply_signature(problem.sig, Ae).T, target, rcond=None)
    return PerturbationQuadruple(E=E, f=f, F=F, g=g)


def _px_core(params: GenParams, w: WeightScheme, seed: int) -> list[PropertyResult]:
    rng = np.random.Generator(np.random.Philox(key=seed & _MASK64))
    res_inv = PropertyResult("core: signature application is an involution")
    res_hom = PropertyResult("core: weighted norm is absolutely homogeneous")
    res_sq = PropertyResult("core: weighted norm squared splits into block terms")
    for _ in range(50):
        p = int(rng.integers(0, 6))
        q = int(rng.integers(0, 6))
        if p + q == 0:
            p = 1
        sig = SignatureMatrix(p, q)
        v = rng.standard_normal(p + q)
        res_inv.check(np.array_equal(apply_signature(sig, apply_signature(sig, v)), v))

        m, n, s = int(rng.integers(2, 7)), int(rng.integers(1, 5)), int(rng.integers(1, 4))
        pert = PerturbationQuadruple(
            E=rng.standard_normal((m, n)), f=rng.standard_normal(m),
            F=rng.standard_normal((s, n)), g=rng.standard_normal(s),
        )
        wts = WeightScheme(*np.exp(rng.uniform(-2, 2, size=3)))
        c = float(rng.uniform(-3, 3))
        scaled = PerturbationQuadruple(E=c * pert.E, f=c * pert.f, F=c * pert.F, g=c * pert.g)
        base = weighted_perturbation_norm(pert, wts)
        res_hom.check(
            abs(weighted_perturbation_norm(scaled, wts) - abs(c) * base) <= 1e-12 * (1 + abs(c) * base)
        )
        explicit = (
            np.sum(pert.E**2) + wts.theta1**2 * np.sum(pert.f**2)
            + wts.theta2**2 * np.sum(pert.F**2) + wts.theta3**2 * np.sum(pert.g**2)
        )
        res_sq.check(abs(base**2 - explicit) <= 1e-12 * (1 + explicit))
    return [res_inv, res_hom, res_sq]


def _px_solver(params: GenParams, w: WeightScheme, seed: int) -> list[PropertyResult]:
    res_sym = PropertyResult("solver: augmented matrix is exactly symmetric")
    res_res = PropertyResult("solver: augmented relative residual <= 1e-12 at paper dims")
    res_ne = PropertyResult("solver: normal-equation residual scales with the data")
    res_det = PropertyResult("solver: repeated solves are bitwise identical")

    paper = GenParams(m=100, n=50, s=20, p=60, q=40, kappa_a=1e2, kappa_b=1e2, seed=0)
    for k in range(3):
        problem, _ = gen_ilse_instance(replace(paper, seed=subseed(seed, 101 + k)))
        K, _ = assemble_augmented(problem)
        res_sym.check(np.array_equal(K, K.T))
        sol = solve_ilse(problem)
        res_res.check(residual_gamma(problem, sol) <= 1e-12,
                      f"gamma={residual_gamma(problem, sol):.2e}")

    for k in range(10):
        problem, _ = gen_ilse_instance(
            replace(params, kappa_a=100.0, kappa_b=1000.0, seed=subseed(seed, 211 + k))
        )
        sol = solve_ilse(problem)
        r1, r2 = normal_equation_residuals(problem, sol.x, sol.xi)
        bound = 1e-10 * (
            np.linalg.norm(problem.A) * np.linalg.norm(problem.b) + np.linalg.norm(problem.B)
        )
        res_ne.check(math.hypot(np.linalg.norm(r1), np.linalg.norm(r2)) <= bound)
        sol2 = solve_ilse(problem)
        res_det.check(
            np.array_equal(sol.x, sol2.x) and np.array_equal(sol.xi, sol2.xi)
        )
    return [res_sym, res_res, res_ne, res_det]


def _px_linearization(params: GenParams, w: WeightScheme, seed: int) -> list[PropertyResult]:
    res_rank = PropertyResult("estimate: linearization has full row rank when r_y != 0")
    res_min = PropertyResult("estimate: min-norm solution solves the system and is minimal")
    res_opt = PropertyResult("estimate: least-squares multiplier minimizes the residual norm")
    rng = np.random.Generator(np.random.Philox(key=seed & _MASK64))

    import scipy.linalg as sla

    for k in range(100):
        problem, sol, pert, psol = _case(params, 1e-4, subseed(seed, 301 + k), w)
        y = psol.x
        r_y = problem.residual(y)
        if float(np.linalg.norm(r_y)) == 0.0:
            for _ in range(10):
                res_rank.skip("precondition unmet: r_y = 0")
            continue
        for _ in range(10):
            xi = rng.standard_normal(problem.s) * (1.0 + float(rng.uniform(0, 3)))
            sv = sla.svdvals(be.linearization_matrix(problem, y, xi, w).J)
            res_rank.check(sv[-1] > 1e-10 * sv[0], f"sigma ratio {sv[-1] / sv[0]:.2e}")

        if k < 25:
            xi1 = be.least_squares_multiplier(problem, y)
            z = be.min_norm_perturbation(problem, y, xi1, w)
            op = be.linearization_matrix(problem, y, xi1, w)
            rhs = be.rhs_vector(problem, y, xi1)
            resid = np.linalg.norm(op.J @ z - rhs)
            res_min.check(
                resid <= 1e-10 * (np.linalg.norm(op.J) * np.linalg.norm(z) + np.linalg.norm(rhs))
            )
            v = rng.standard_normal(op.J.shape[1])
            Q, _, _ = be._min_norm_factor(op.J)
            null_dir = v - Q @ (Q.T @ v)
            res_min.check(
                np.linalg.norm(z) <= np.linalg.norm(z + null_dir) * (1 + 1e-12),
                "null-space perturbation shrank the solution",
            )
            base = np.linalg.norm(rhs)
            for _ in range(100 // 25):
                xi = rng.standard_normal(problem.s)
                res_opt.check(base <= np.linalg.norm(be.rhs_vector(problem, y, xi)) * (1 + 1e-12))
    return [res_rank, res_min, res_opt]


def _px_bounds(params: GenParams, w: WeightScheme, seed: int) -> list[PropertyResult]:
    res_tau = PropertyResult("estimate: closed-form tau0 matches the explicit pseudoinverse norm")
    res_alpha = PropertyResult("estimate: alpha respects its certified lower bound")
    res_cons = PropertyResult("estimate: feasible perturbations satisfy the consistency inequality")
    res_dist = PropertyResult("estimate: distance lower bound never exceeds the true distance")
    res_mono = PropertyResult("estimate: lower-bound formula is nondecreasing")
    rng = np.random.Generator(np.random.Philox(key=seed & _MASK64))

    tiny = GenParams(m=12, n=6, s=3, p=7, q=5, kappa_a=30.0, kappa_b=50.0, seed=0)
    for k in range(100):
        problem, sol, pert, psol = _case(tiny, 1e-3, subseed(seed, 401 + k), w)
        wts = WeightScheme(*np.exp(rng.uniform(-1.5, 1.5, size=3)))
        t_closed = be.pinv_norm_bound(problem, psol.x, wts)
        t_svd = oracle.pinv_norm_bound_via_svd(problem, psol.x, wts)
        res_tau.check(abs(t_closed - t_svd) <= 1e-8 * t_svd,
                      f"closed={t_closed:.6e} svd={t_svd:.6e}")

    for k in range(1000):
        theta1 = (0.1, 1.0, 10.0)[k % 3]
        wts = WeightScheme(theta1=theta1)
        problem, sol, pert, psol = _case(params, 1e-3, subseed(seed, 1601 + k), wts)
        y = psol.x
        if float(np.linalg.norm(problem.residual(y))) == 0.0:
            res_alpha.skip("precondition unmet: r_y = 0")
            continue
        a = be.stability_constant(problem, y, wts)
        res_alpha.check(a >= be.stability_constant_lower_bound(problem, y, wts) * (1 - 1e-12))

    for k in range(200):
        problem, sol, pert, psol = _case(params, 1e-4, subseed(seed, 2701 + k), w)
        y = psol.x
        quad = _feasible_quadruple(problem, y, sol.xi, subseed(seed, 2901 + k))
        lam = weighted_perturbation_norm(quad, w)
        rho0 = be.backward_error_estimate(problem, y, sol.xi, w)
        tau0 = be.pinv_norm_bound(problem, y, w)
        scale = math.sqrt(1.0 / w.theta1**2 + float(y @ y))
        res_cons.check(
            rho0 <= (lam + tau0 * scale * lam**2) * (1 + 1e-8),
            f"rho0={rho0:.3e} bound={(lam + tau0 * scale * lam**2):.3e}",
        )
        dist = be.solution_distance_lower_bound(problem, y)
        res_dist.check(dist <= np.linalg.norm(sol.x - y) * (1 + 1e-12))

    for _ in range(200):
        a = float(np.exp(rng.uniform(-3, 3)))
        t1, t2 = sorted(np.exp(rng.uniform(-10, 2, size=2)))
        f = lambda t: 2 * t / (1 + math.sqrt(1 + 4 * a * t))
        res_mono.check(f(t1) <= f(t2) * (1 + 1e-14))
    return [res_tau, res_alpha, res_cons, res_dist, res_mono]


def _px_oracle(params: GenParams, w: WeightScheme, seed: int) -> list[PropertyResult]:
    res_start = PropertyResult("oracle: minimizer never exceeds the estimate at its start")
    res_rep = PropertyResult("oracle: minimization is bitwise reproducible under a fixed seed")
    res_gap = PropertyResult("oracle: estimate-to-minimum ratio is at least one")
    small = replace(params, s=min(params.s, 3))
    ratios = []
    for k in range(8):
        problem, sol, pert, psol = _case(small, 1e-4, subseed(seed, 501 + k), w)
        y = psol.x
        rho1 = be.backward_error_estimate(problem, y, be.least_squares_multiplier(problem, y), w)
        result = oracle.minimize_estimate(problem, y, w, xi0=sol.xi, seed=subseed(seed, 601 + k))
        res_start.check(result.rho_star <= rho1 * (1 + 1e-12))
        if rho1 > 0:
            ratios.append(rho1 / max(result.rho_star, 1e-300))
            res_gap.check(ratios[-1] >= 1 - 1e-12)
        again = oracle.minimize_estimate(problem, y, w, xi0=sol.xi, seed=subseed(seed, 601 + k))
        res_rep.check(
            result.rho_star == again.rho_star and np.array_equal(result.xi_star, again.xi_star)
        )
    if ratios:
        res_gap.detail = (
            f"ratio min={min(ratios):.3f} median={statistics.median(ratios):.3f} max={max(ratios):.3f}"
        )
    return [res_start, res_rep, res_gap]


def _px_testgen(params: GenParams, w: WeightScheme, seed: int) -> list[PropertyResult]:
    res_sig = PropertyResult("testgen: generated factors preserve the indefinite form")
    res_det = PropertyResult("testgen: generators are bitwise reproducible")
    res_lad = PropertyResult("testgen: geometric ladder is strictly decreasing")
    res_wp = PropertyResult("testgen: emitted instances pass the well-posedness check")
    rng = np.random.Generator(np.random.Philox(key=seed & _MASK64))
    sig_diag = lambda p, q: np.diag(SignatureMatrix(p, q).diagonal())
    for k in range(20):
        p = int(rng.integers(1, 20))
        q = int(rng.integers(1, 20))
        hb = float(rng.uniform(0, 2))
        Q = testgen.gen_sigma_orthogonal(p, q, subseed(seed, 701 + k), hb)
        S = sig_diag(p, q)
        res_sig.check(np.max(np.abs(Q.T @ S @ Q - S)) <= 1e-12 * (p + q))
        res_det.check(
            np.array_equal(Q, testgen.gen_sigma_orthogonal(p, q, subseed(seed, 701 + k), hb))
        )
        kappa = float(np.exp(rng.uniform(0.1, 9)))
        cols = int(rng.integers(2, 12))
        ladder = np.diag(testgen.gen_geometric_diagonal(cols, cols, kappa))
        res_lad.check(bool(np.all(np.diff(ladder) < 0)))
    for k in range(10):
        problem, _ = gen_ilse_instance(replace(params, seed=subseed(seed, 801 + k)))
        res_wp.check(check_well_posedness(problem).well_posed)
    return [res_sig, res_det, res_lad, res_wp]


def _px_harness(params: GenParams, w: WeightScheme, seed: int) -> list[PropertyResult]:
    res_eps = PropertyResult("harness: estimate scales linearly with the perturbation size")
    res_mu = PropertyResult("harness: mu_1 equals the weighted norm at unit weights")
    res_csv = PropertyResult("harness: csv emission round-trips")
    res_replay = PropertyResult("harness: rows replay exactly from their recorded seed")

    for k in range(5):
        problem, _ = gen_ilse_instance(replace(params, seed=subseed(seed, 901 + k)))
        direction = gen_perturbation(problem, 1.0, subseed(seed, 951 + k))
        rhos = {}
        for eps in (1e-6, 1e-8, 1e-10):
            scaled = PerturbationQuadruple(
                E=eps * direction.E, f=eps * direction.f, F=eps * direction.F, g=eps * direction.g
            )
            y = solve_ilse(perturbed_problem(problem, scaled)).x
            rhos[eps] = be.backward_error_estimate(
                problem, y, be.least_squares_multiplier(problem, y), w
            )
        for e1, e2 in ((1e-6, 1e-8), (1e-8, 1e-10), (1e-6, 1e-10)):
            observed = rhos[e1] / rhos[e2]
            expected = e1 / e2
            res_eps.check(expected / 10 <= observed <= expected * 10,
                          f"ratio {observed:.2e} vs {expected:.2e}")
        mu = mu_one(direction)
        res_mu.check(mu == weighted_perturbation_norm(direction, WeightScheme(1.0, 1.0, 1.0)))

    config = ExperimentConfig(
        m=params.m, n=params.n, s=params.s, p=params.p, q=params.q,
        kappa_a_list=(50.0,), kappa_b_list=(100.0,), eps_list=(1e-6,),
        trials_per_cell=3, base_seed=subseed(seed, 999),
    )
    rows, table = run_experiment(config)
    parsed = parse_experiment_csv(table)
    res_csv.check(len(parsed) == len(rows))
    for rec, row in zip(parsed, rows):
        res_csv.check(
            rec["seed"] == row.seed
            and rec["mu_1"] == float(_fmt(row.mu_1))
            and rec["rho_xi1"] == float(_fmt(row.rho_xi1)),
            "parsed values differ from emitted values",
        )
    for row in rows:
        again = run_trial(
            config.gen_params(row.kappa_a_nominal, row.kappa_b), row.eps, config.weights, row.seed
        )
        res_replay.check(
            again.mu_1 == row.mu_1 and again.rho_xi1 == row.rho_xi1 and again.gamma == row.gamma
        )
    return [res_eps, res_mu, res_csv, res_replay]


_PROPERTY_GROUPS = (
    _px_core,
    _px_solver,
    _px_linearization,
    _px_bounds,
    _px_oracle,
    _px_testgen,
    _px_harness,
)


def verify_suite(config: ExperimentConfig | None = None) -> VerifyReport:
    """Run every module's invariant checks and collect per-property counts.

    Dimensions default to a small well-posed family; an ExperimentConfig
    overrides the dimensions, weights and seed. Checks that require
    nonzero residuals skip (not fail) instances where the precondition is
    unmet.
    """
    if config is not None:
        params = GenParams(
            m=config.m, n=config.n, s=config.s, p=config.p, q=config.q,
            kappa_a=config.kappa_a_list[0], kappa_b=config.kappa_b_list[0],
            seed=0, hyper_bound=config.hyper_bound,
        )
        w = config.weights
        seed = config.base_seed
    else:
        params = _default_dims()
        w = WeightScheme()
        seed = 123456789

    results: list[PropertyResult] = []
    for group in _PROPERTY_GROUPS:
        results.extend(group(params, w, seed))
    return VerifyReport(results=tuple(results))
