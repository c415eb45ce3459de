"""
Monte Carlo experiment engine.

A sweep runs every (K, SNR, trial) cell on one measurement operator. Seeds
are derived from (base_seed, K, trial) for the channel and additionally
from the SNR value for the noise, so cells are independent of sweep order,
of which other cells are present, and of the worker count.
"""

from __future__ import annotations

import dataclasses
import io
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pilotcs.channel import SparseChannel, add_awgn, generate_sparse_channel
from pilotcs.errors import ConfigurationError
from pilotcs.measurement import MeasurementOperator, analyze_operator
from pilotcs.pilot import assign_pilots
from pilotcs.recovery import SolverConfig, basis_pursuit, lasso, noisy_lambda
from pilotcs.seqgen import fzc_family, gold_family, kasami_family, msequence_family

FAMILIES = ("fzc", "gold", "kasami", "msequence")
EXACT_TOL = 1e-4

CELL_HEADER = "K,snr_db,trials,mean_mse,median_mse,exact_rate,mean_iters"
TRIAL_HEADER = "K,snr_db,trial,mse,rel_err,precision,recall,iters,converged"


@dataclass(frozen=True)
class ExperimentConfig:
    M: int = 255
    L: int = 51
    t: int = 10
    family: str = "fzc"
    s: Optional[int] = None
    bases: Optional[tuple] = None
    snr_db_list: tuple = (10.0, 20.0, 30.0)
    K_list: tuple = (60, 80, 100, 120, 140)
    trials: int = 50
    base_seed: int = 0
    magnitude: str = "unit"
    lambda_factor: float = 1.0
    c0: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_path: Optional[str] = None
    detail_path: Optional[str] = None
    workers: Optional[int] = None

    @property
    def N(self) -> int:
        return self.t * self.L

    @property
    def q(self) -> int:
        return self.t * self.L // self.M

    def degree(self) -> int:
        if self.s is not None:
            return self.s
        s = int(round(math.log2(self.M + 1)))
        if 2 ** s - 1 != self.M:
            raise ConfigurationError(f"family {self.family!r} needs M = 2^s - 1, got M={self.M}")
        return s

    def validate(self) -> "ExperimentConfig":
        if self.M < 1 or self.L < 1 or self.t < 1:
            raise ConfigurationError("M, L and t must be positive")
        if self.M % self.L:
            raise ConfigurationError(f"M mod L must be 0 (M={self.M}, L={self.L})")
        if (self.t * self.L) % self.M:
            raise ConfigurationError(f"t*L mod M must be 0 (t*L={self.t * self.L}, M={self.M})")
        if self.family not in FAMILIES:
            raise ConfigurationError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.family != "fzc" and 2 ** self.degree() - 1 != self.M:
            raise ConfigurationError(f"{self.family} family with s={self.degree()} has period "
                                     f"{2 ** self.degree() - 1}, not M={self.M}")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.K_list:
            raise ConfigurationError("K list is empty")
        for K in self.K_list:
            if not 1 <= K <= self.N:
                raise ConfigurationError(f"K={K} outside [1, N={self.N}]")
        if not self.snr_db_list:
            raise ConfigurationError("SNR list is empty")
        return self


# ---------------------------------------------------------------------------
# config file
# ---------------------------------------------------------------------------

_INT_KEYS = {"M", "L", "t", "s", "trials", "seed", "workers"}
_FLOAT_KEYS = {"lambda_factor", "c0"}
_RENAME = {"seed": "base_seed", "snr_db": "snr_db_list", "K": "K_list",
           "output": "output_path", "detail_output": "detail_path"}


def _parse_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _parse_snr(v: str) -> float:
    v = v.strip().lower()
    if v in ("inf", "noiseless", "+inf"):
        return math.inf
    return float(v)


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Parse ``key = value`` lines into an ExperimentConfig.

    Lists are comma separated. Solver settings use the SolverConfig field
    names directly (e.g. ``max_iters = 2000``).
    """
    kw, solver_kw = {}, {}
    solver_fields = {f.name: f for f in dataclasses.fields(SolverConfig)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        try:
            if key in _INT_KEYS:
                kw[_RENAME.get(key, key)] = int(value)
            elif key in _FLOAT_KEYS:
                kw[key] = float(value)
            elif key == "family":
                kw["family"] = value.lower()
            elif key == "magnitude":
                kw["magnitude"] = value.lower()
            elif key == "bases":
                kw["bases"] = tuple(int(v) for v in value.split(","))
            elif key == "snr_db":
                kw["snr_db_list"] = tuple(_parse_snr(v) for v in value.split(","))
            elif key == "K":
                kw["K_list"] = tuple(int(v) for v in value.split(","))
            elif key in ("output", "detail_output"):
                kw[_RENAME[key]] = value
            elif key in solver_fields:
                kind = type(getattr(SolverConfig(), key))
                solver_kw[key] = _parse_bool(value) if kind is bool else kind(value)
            else:
                raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    try:
        kw["solver"] = SolverConfig(**solver_kw)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kw).validate()


def load_config(path, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read(), **overrides)


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def build_family(cfg: ExperimentConfig):
    if cfg.family == "fzc":
        return fzc_family(cfg.M)
    s = cfg.degree()
    return {"gold": gold_family, "kasami": kasami_family, "msequence": msequence_family}[cfg.family](s)


def build_plan(cfg: ExperimentConfig):
    return assign_pilots(build_family(cfg), cfg.t, cfg.M, cfg.L, cfg.bases)


def build_operator(cfg: ExperimentConfig) -> MeasurementOperator:
    return MeasurementOperator.from_plan(build_plan(cfg))


def analyze(cfg: ExperimentConfig):
    """Coherence / spectral-norm report for the configured operator at K = first K."""
    op = build_operator(cfg)
    return analyze_operator(op, K=cfg.K_list[0], c0=cfg.c0)


def _snr_key(snr_db: float) -> int:
    return zlib.crc32(repr(float(snr_db)).encode())


def channel_seed(base_seed: int, K: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([base_seed, K, trial, 0])


def noise_seed(base_seed: int, K: int, trial: int, snr_db: float) -> np.random.SeedSequence:
    return np.random.SeedSequence([base_seed, K, trial, 1, _snr_key(snr_db)])


def compute_metrics(h: SparseChannel, estimate, N: int, support_estimate=None) -> dict:
    """MSE = ||h - est||^2 / N, relative error, and support precision/recall."""
    est = np.asarray(estimate, dtype=np.complex128)
    if est.shape != (N,) or h.length != N:
        raise ValueError("estimate and channel lengths must both equal N")
    err = h.dense() - est
    err_sq = float(np.vdot(err, err).real)
    h_norm = float(np.linalg.norm(h.coefficients))
    if support_estimate is None:
        support_estimate = np.flatnonzero(est)
    true_s = set(h.support.tolist())
    est_s = set(np.asarray(support_estimate).tolist())
    hit = len(true_s & est_s)
    return {
        "mse": err_sq / N,
        "rel_err": math.sqrt(err_sq) / h_norm if h_norm > 0 else math.sqrt(err_sq),
        "support_precision": hit / len(est_s) if est_s else 1.0,
        "support_recall": hit / len(true_s) if true_s else 1.0,
    }


@dataclass(frozen=True)
class TrialResult:
    K: int
    snr_db: float
    trial_index: int
    mse: float
    rel_err: float
    support_precision: float
    support_recall: float
    solver_iterations: int
    converged: bool


@dataclass(frozen=True)
class CellResult:
    K: int
    snr_db: float
    trials: int
    mean_mse: float
    median_mse: float
    exact_rate: float
    mean_iters: float


@dataclass
class AggregateResult:
    cells: list
    trials: list

    def cell(self, K: int, snr_db: float) -> CellResult:
        for c in self.cells:
            if c.K == K and c.snr_db == snr_db:
                return c
        raise KeyError((K, snr_db))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CELL_HEADER + "\n")
        for c in self.cells:
            buf.write(f"{c.K},{_fmt(c.snr_db)},{c.trials},{_fmt(c.mean_mse)},{_fmt(c.median_mse)},"
                      f"{_fmt(c.exact_rate)},{_fmt(c.mean_iters)}\n")
        return buf.getvalue()

    def trials_csv(self) -> str:
        buf = io.StringIO()
        buf.write(TRIAL_HEADER + "\n")
        for r in self.trials:
            buf.write(f"{r.K},{_fmt(r.snr_db)},{r.trial_index},{_fmt(r.mse)},{_fmt(r.rel_err)},"
                      f"{_fmt(r.support_precision)},{_fmt(r.support_recall)},"
                      f"{r.solver_iterations},{int(r.converged)}\n")
        return buf.getvalue()


def _fmt(x: float) -> str:
    return repr(float(x))


def run_trial(op: MeasurementOperator, cfg: ExperimentConfig, K: int, snr_db: float,
              trial: int) -> TrialResult:
    N = op.N
    ch = generate_sparse_channel(N, K, cfg.magnitude, channel_seed(cfg.base_seed, K, trial))
    y = op.forward(ch.dense())
    if math.isinf(snr_db):
        res = basis_pursuit(op, y, cfg.solver)
    else:
        y, noise = add_awgn(y, snr_db, noise_seed(cfg.base_seed, K, trial, snr_db))
        lam = noisy_lambda(noise.realized_sigma_sq, N, cfg.lambda_factor)
        res = lasso(op, y, dataclasses.replace(cfg.solver, lam=lam))
    m = compute_metrics(ch, res.estimate, N, res.support_estimate)
    return TrialResult(K, float(snr_db), trial, m["mse"], m["rel_err"], m["support_precision"],
                       m["support_recall"], res.iterations, res.converged)


_WORKER_STATE: dict = {}


def _worker_init(cfg: ExperimentConfig) -> None:
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["op"] = build_operator(cfg)


def _worker_run(task) -> TrialResult:
    K, snr, trial = task
    return run_trial(_WORKER_STATE["op"], _WORKER_STATE["cfg"], K, snr, trial)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("PILOTCS_WORKERS", "1")))
    except ValueError:
        return 1


def aggregate(trials: list, cfg: ExperimentConfig) -> AggregateResult:
    trials = sorted(trials, key=lambda r: (r.K, r.snr_db, r.trial_index))
    cells = []
    for K in sorted(set(cfg.K_list)):
        for snr in sorted(set(float(s) for s in cfg.snr_db_list)):
            rows = [r for r in trials if r.K == K and r.snr_db == snr]
            mses = np.array([r.mse for r in rows])
            cells.append(CellResult(
                K, snr, len(rows), float(np.mean(mses)), float(np.median(mses)),
                float(np.mean([r.rel_err < EXACT_TOL for r in rows])),
                float(np.mean([r.solver_iterations for r in rows]))))
    return AggregateResult(cells, trials)


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> AggregateResult:
    """Run the full (K, SNR, trial) sweep and write CSV output if configured."""
    cfg.validate()
    workers = workers or cfg.workers or default_workers()
    tasks = [(K, float(snr), trial)
             for K in sorted(set(cfg.K_list))
             for snr in sorted(set(float(s) for s in cfg.snr_db_list))
             for trial in range(cfg.trials)]
    if workers <= 1:
        op = build_operator(cfg)
        results = [run_trial(op, cfg, *task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                                 initargs=(cfg,)) as ex:
            results = list(ex.map(_worker_run, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    agg = aggregate(results, cfg)
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(agg.to_csv())
    if cfg.detail_path:
        with open(cfg.detail_path, "w", newline="") as fh:
            fh.write(agg.trials_csv())
    return agg
