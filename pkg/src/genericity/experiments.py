"""Genericity censuses and asymptotic analyses with JSON/CSV reports.

A backend selector names the automaton and, when there is one, the isometric
action used to classify rigid words:

    psl2z       PSL(2,Z) on the Farey graph
    braid:N     positive braids on N strands (no action)
    free:K      free group of rank K on its Cayley tree
    PATH        an automaton JSON file (no action)
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any

from . import __version__, automaton, counting, freegroup, garside, psl2z
from .automaton import Automaton, AutomatonError
from .geometry import ActionBackend, Isometry, check_rigid_geometry

DEFAULT_BUDGET = 10**7
SAMPLE_SHARD = 10_000
MODES = ("exhaustive", "sample")
DECIMALS = 12
# fields that change between otherwise identical runs
VOLATILE_METADATA = ("generated_at", "runtimes", "total_runtime")


class BudgetExceeded(RuntimeError):
    """Exhaustive enumeration would visit more words than the budget allows."""


@dataclass(frozen=True)
class Target:
    selector: str
    automaton: Automaton
    action: ActionBackend | None


@lru_cache(maxsize=None)
def resolve_backend(selector: str) -> Target:
    kind, _, arg = selector.partition(":")
    if selector == "psl2z":
        return Target(selector, psl2z.build_automaton(), psl2z.backend())
    if kind == "braid" and arg:
        return Target(selector, garside.build_automaton(_int_arg(selector, arg)), None)
    if kind == "free" and arg:
        k = _int_arg(selector, arg)
        return Target(selector, freegroup.build_automaton(k), freegroup.tree_backend(k))
    path = Path(selector)
    if path.is_file():
        return Target(selector, automaton.load(path), None)
    raise AutomatonError(f"unknown backend {selector!r}: use psl2z, braid:N, free:K or an automaton file")


def _int_arg(selector: str, arg: str) -> int:
    try:
        return int(arg)
    except ValueError:
        raise AutomatonError(f"bad backend parameter in {selector!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    backend: str = "psl2z"
    lmin: int = 1
    lmax: int = 10
    mode: str = "exhaustive"
    samples: int = 10_000
    seed: int = 0
    radius: float = 1
    horizon: int = 50
    k_max: int = 5
    budget: int = DEFAULT_BUDGET
    geometry: bool = True
    prefix: str | None = None
    w_far: str | None = None
    workers: int = 1
    json_out: str | None = None
    csv_out: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not 1 <= self.lmin <= self.lmax:
            raise ValueError("need 1 <= lmin <= lmax")
        if self.mode == "sample" and self.samples < 1:
            raise ValueError("sample mode needs at least one sample")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        # outputs and worker count do not change the results
        data = {k: v for k, v in self.to_dict().items() if k not in ("json_out", "csv_out", "workers")}
        blob = json.dumps(data, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def decimal(x: Fraction | float) -> float:
    return round(float(x), DECIMALS)


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


# -- genericity census ----------------------------------------------------------


@dataclass
class ShardResult:
    words: int = 0
    rigid: int = 0
    rigid_loxodromic: int = 0
    violations: list[str] = field(default_factory=list)

    def merge(self, other: ShardResult) -> ShardResult:
        return ShardResult(
            self.words + other.words,
            self.rigid + other.rigid,
            self.rigid_loxodromic + other.rigid_loxodromic,
            self.violations + other.violations,
        )


def _census(target: Target, words, cfg: ExperimentConfig) -> ShardResult:
    aut = target.automaton
    action = target.action if cfg.geometry else None
    out = ShardResult()
    for w in words:
        out.words += 1
        if not automaton.is_rigid_word(aut, w):
            continue
        out.rigid += 1
        if action is None:
            continue
        report = check_rigid_geometry(action, aut, w, cfg.radius, cfg.k_max, cfg.horizon)
        if report.tag is Isometry.LOXODROMIC:
            out.rigid_loxodromic += 1
        out.violations += report.violations
    return out


def _exhaustive_shard(cfg: ExperimentConfig, l: int, letter: int) -> ShardResult:
    target = resolve_backend(cfg.backend)
    return _census(target, counting.enumerate_sphere(target.automaton, l, (letter,)), cfg)


def _sample_shard(cfg: ExperimentConfig, l: int, shard: int, count: int) -> ShardResult:
    target = resolve_backend(cfg.backend)
    words = counting.sample_many(target.automaton, l, count, f"{cfg.seed}:{l}:{shard}")
    return _census(target, words, cfg)


def _shard_jobs(cfg: ExperimentConfig, target: Target, l: int) -> list[tuple]:
    aut = target.automaton
    if cfg.mode == "exhaustive":
        size = counting.count_sphere(aut, l)
        if size > cfg.budget:
            raise BudgetExceeded(
                f"exhaustive census at l={l} needs {size} words, budget is {cfg.budget}; "
                "use --mode sample or raise --budget"
            )
        letters = [x for x in aut.alphabet if counting.prefix_count(aut, (x,), l) > 0]
        return [(_exhaustive_shard, cfg, l, x) for x in letters]
    jobs = []
    for shard, start in enumerate(range(0, cfg.samples, SAMPLE_SHARD)):
        jobs.append((_sample_shard, cfg, l, shard, min(SAMPLE_SHARD, cfg.samples - start)))
    return jobs


def _run_jobs(jobs: list[tuple], workers: int) -> list[ShardResult]:
    if workers == 1 or len(jobs) < 2:
        return [fn(*args) for fn, *args in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *args) for fn, *args in jobs]
        return [f.result() for f in futures]


def _row(cfg: ExperimentConfig, l: int, sphere: int, res: ShardResult, has_geometry: bool) -> dict:
    p_rigid = _ratio(res.rigid, res.words)
    row: dict[str, Any] = {
        "l": l,
        "sphere": sphere,
        "rigid": res.rigid,
        "rigid_loxodromic": res.rigid_loxodromic if has_geometry else None,
        "p_rigid": str(p_rigid),
        "p_rigid_decimal": decimal(p_rigid),
        "p_rigid_lox": None,
        "p_rigid_lox_decimal": None,
    }
    if has_geometry:
        p_lox = _ratio(res.rigid_loxodromic, res.words)
        row["p_rigid_lox"] = str(p_lox)
        row["p_rigid_lox_decimal"] = decimal(p_lox)
    if cfg.mode == "sample":
        row["samples"] = res.words
        row["p_rigid_stderr"] = decimal(_stderr(p_rigid, res.words))
    row["violations"] = res.violations
    return row


def _stderr(p: Fraction, n: int) -> float:
    return math.sqrt(float(p) * (1 - float(p)) / n) if n else 0.0


def _add_ball_columns(rows: list[dict], has_geometry: bool) -> None:
    """Ball statistics as sphere-size weighted sums over the rows so far.

    The ball at l collects the words of length lmin..l; rigid counts scale
    by sphere size, so sampled proportions aggregate the same way.
    """
    ball = 0
    rigid = Fraction(0)
    lox = Fraction(0)
    for row in rows:
        ball += row["sphere"]
        rigid += row["sphere"] * Fraction(row["p_rigid"])
        row["ball"] = ball
        p = rigid / ball if ball else Fraction(0)
        row["p_ball_rigid"] = str(p)
        row["p_ball_rigid_decimal"] = decimal(p)
        if has_geometry:
            lox += row["sphere"] * Fraction(row["p_rigid_lox"])
            q = lox / ball if ball else Fraction(0)
            row["p_ball_rigid_lox"] = str(q)
            row["p_ball_rigid_lox_decimal"] = decimal(q)
        else:
            row["p_ball_rigid_lox"] = row["p_ball_rigid_lox_decimal"] = None


ROW_ORDER = (
    "l", "sphere", "ball", "rigid", "rigid_loxodromic", "p_rigid", "p_rigid_decimal",
    "p_rigid_lox", "p_rigid_lox_decimal", "p_ball_rigid", "p_ball_rigid_decimal",
    "p_ball_rigid_lox", "p_ball_rigid_lox_decimal", "samples", "p_rigid_stderr", "violations",
)


def run_genericity(cfg: ExperimentConfig) -> dict:
    """Census of rigid (and rigid loxodromic) words on each sphere lmin..lmax."""
    t_start = time.perf_counter()
    target = resolve_backend(cfg.backend)
    has_geometry = cfg.geometry and target.action is not None
    aut = target.automaton
    # validate every length before doing any work
    plans = {l: _shard_jobs(cfg, target, l) for l in range(cfg.lmin, cfg.lmax + 1)}
    rows, runtimes = [], {}
    for l, jobs in plans.items():
        t0 = time.perf_counter()
        total = ShardResult()
        for res in _run_jobs(jobs, cfg.workers):
            total = total.merge(res)
        rows.append(_row(cfg, l, counting.count_sphere(aut, l), total, has_geometry))
        runtimes[str(l)] = round(time.perf_counter() - t0, 3)
    _add_ball_columns(rows, has_geometry)
    rows = [{k: row[k] for k in ROW_ORDER if k in row} for row in rows]
    lox = [Fraction(r["p_rigid_lox"]) for r in rows if r["l"] >= 2] if has_geometry else []
    summary = {
        "violations": sum(len(r["violations"]) for r in rows),
        "min_p_rigid": decimal(min(Fraction(r["p_rigid"]) for r in rows)),
        "min_p_rigid_lox_from_l2": decimal(min(lox)) if lox else None,
    }
    report = {
        "config": cfg.to_dict(),
        "rows": rows,
        "summary": summary,
        "asymptotics": run_asymptotics(cfg, target),
        "metadata": _metadata(cfg, runtimes, t_start),
    }
    return report


def _metadata(cfg: ExperimentConfig, runtimes: dict, t_start: float) -> dict:
    return {
        "version": __version__,
        "seed": cfg.seed,
        "config_hash": cfg.digest(),
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "runtimes": runtimes,
        "total_runtime": round(time.perf_counter() - t_start, 3),
    }


# -- asymptotics ----------------------------------------------------------------


def run_asymptotics(cfg: ExperimentConfig, target: Target | None = None) -> dict:
    """Growth rate, domination, and the finite-l certificates behind the rigid bound.

    The rigid lower bound multiplies the proportion of words starting with a
    rigid word w by the proportion of those ending in the state E that w
    returns to; both are reported at l = lmax and lmax + 10.
    """
    target = target or resolve_backend(cfg.backend)
    aut = target.automaton
    structure = automaton.check_anf_hypothesis(aut)
    out: dict[str, Any] = {
        "lambda": decimal(structure.accessible_rate),
        "complement_rate": decimal(structure.complement_rate),
        "dominated": structure.dominated,
        "recurrence_index": structure.recurrence_index,
        "accessible_states": len(structure.accessible),
        "anf_holds": structure.anf_holds,
        "bounds": None,
        "avoidance": None,
    }
    if cfg.prefix is not None:
        w = aut.parse(cfg.prefix)
        if not automaton.is_rigid_word(aut, w):
            raise AutomatonError(f"prefix {cfg.prefix!r} is not a rigid word")
        end = automaton.run(aut, aut.start, w)
    elif structure.witness is not None:
        w, end = structure.witness, structure.witness_state
    else:
        w = None
    if w is not None:
        out["bounds"] = _bound_certificates(aut, w, end, cfg.lmax)
    if cfg.w_far is not None:
        pattern = aut.parse(cfg.w_far)
        est = counting.avoidance_growth_rate(aut, pattern)
        out["avoidance"] = {
            "w_far": aut.format(pattern),
            "rate": decimal(est.rate),
            "margin": decimal(structure.accessible_rate - est.rate),
            "converged": est.converged,
        }
    return out


def _bound_certificates(aut: Automaton, w, end: int, l: int) -> dict:
    cert: dict[str, Any] = {"prefix": aut.format(w), "end_state": aut.name(end), "at": []}
    for length in (max(l, len(w)), max(l, len(w)) + 10):
        p = counting.prefix_proportion(aut, w, length)
        q = counting.end_state_proportion(aut, w, end, length)
        cert["at"].append(
            {
                "l": length,
                "prefix_proportion": decimal(p),
                "end_state_proportion": decimal(q),
                "bound": decimal(p * q),
            }
        )
    cert["bound"] = cert["at"][-1]["bound"]
    return cert


# -- output ---------------------------------------------------------------------


def report_json(report: dict) -> str:
    return json.dumps(report, indent=1) + "\n"


CSV_COLUMNS = (
    "l", "sphere", "ball", "rigid", "rigid_loxodromic", "p_rigid_decimal",
    "p_rigid_lox_decimal", "p_ball_rigid_decimal", "p_ball_rigid_lox_decimal", "violations",
)


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report["rows"]:
        values = [row.get(c) for c in CSV_COLUMNS]
        values[-1] = len(row["violations"])
        writer.writerow(["" if v is None else v for v in values])
    return buf.getvalue()


def write_outputs(report: dict, cfg: ExperimentConfig) -> None:
    if cfg.json_out:
        Path(cfg.json_out).write_text(report_json(report))
    if cfg.csv_out:
        Path(cfg.csv_out).write_text(report_csv(report))


def strip_volatile(report: dict) -> dict:
    """Copy of ``report`` without timestamps and runtimes, for comparisons."""
    out = json.loads(json.dumps(report))
    for key in VOLATILE_METADATA:
        out.get("metadata", {}).pop(key, None)
    return out
