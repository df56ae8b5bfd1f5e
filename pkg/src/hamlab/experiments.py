"""Monte Carlo harness: hitting-time runs, threshold sweeps, audits, coupling.

Per-trial randomness is derived from (master_seed, trial_index) by seed
sequences, so results are independent of scheduling and worker count; the
JSONL output is byte-identical for any number of workers.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import hamiltonicity, structure, threshold
from .exceptions import InvalidParameterError
from .hostgraph import HostGraph, generate_complete, generate_dirac_profile, generate_regular
from .process import (ProcessTrace, blue_subgraph, build_auxiliary, default_omega,
                      hitting_time_hamiltonian, hitting_time_min_degree,
                      sample_gnp, sample_trace, snapshot)


@dataclass
class RunConfig:
    """Everything a run needs; round-trips through JSON."""

    host_kind: str = "complete"  # complete | regular | dirac
    n: int = 64
    beta: float = 0.6
    d: Optional[int] = None
    eps_frac: float = 0.5
    host_seed: int = 7
    trials: int = 200
    master_seed: int = 0
    window_omega: Optional[float] = None
    color_omega: Optional[float] = None
    sigma: float = structure.PAPER_SIGMA
    K: float = structure.PAPER_K
    alpha_eff: float = structure.DEFAULT_ALPHA_EFF
    restarts: int = 20
    budget_per_vertex: int = hamiltonicity.BUDGET_PER_VERTEX
    oracle_limit: int = hamiltonicity.DEFAULT_ORACLE_LIMIT
    compute_boosters: bool = False
    sweep_c: list = field(default_factory=lambda: [-2.0, 0.0, 2.0])
    coupling_grid_points: int = 10
    sparse_s_max: int = 3
    sparse_samples: int = 50
    expansion_s_max: int = 3
    expansion_samples: int = 100
    workers: int = 1
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameterError("trials must be at least 1")
        if self.workers < 1:
            raise InvalidParameterError("workers must be at least 1")

    def resolved_window_omega(self) -> float:
        return self.window_omega if self.window_omega is not None else default_omega(self.n)

    def resolved_color_omega(self) -> float:
        return self.color_omega if self.color_omega is not None else default_omega(self.n)

    def q(self) -> float:
        return self.resolved_color_omega() / math.log(self.n)

    def budget(self) -> int:
        return self.budget_per_vertex * self.n

    def to_json_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_json_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def make_host(cfg: RunConfig) -> HostGraph:
    if cfg.host_kind == "complete":
        return generate_complete(cfg.n)
    if cfg.host_kind == "regular":
        d = cfg.d
        if d is None:
            d = math.ceil(cfg.beta * cfg.n)
            if (cfg.n * d) % 2 == 1:
                d += 1
        return generate_regular(cfg.n, d, cfg.host_seed)
    if cfg.host_kind == "dirac":
        return generate_dirac_profile(cfg.n, cfg.beta, cfg.eps_frac, cfg.host_seed)
    raise InvalidParameterError(f"unknown host kind {cfg.host_kind!r}")


def _seed_int(*parts) -> int:
    return int(np.random.SeedSequence(tuple(int(p) for p in parts)).generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# Event evaluation at a stopped prefix


def event_report_at(trace: ProcessTrace, t: int, cfg: RunConfig, trial_index: int):
    """Evaluate the event flags on the prefix at t and its derived snapshots.

    Returns (EventReport, context) where the context carries the snapshots
    and classes so callers can run follow-up checks without rebuilding.
    """
    n = trace.host.n
    omega = cfg.resolved_window_omega()
    full = snapshot(trace, t)
    blue = blue_subgraph(trace, t)
    classes = structure.classify(full, blue, cfg.sigma)
    aux = build_auxiliary(trace, t, classes.medium)

    s_ok, m_ok = structure.check_size_events(classes, n, omega)
    e2_ok, e2_wit = structure.check_small_structures(full, classes)
    density_cap = cfg.sigma * math.log(n) / cfg.K
    size_cap = max(1, math.floor(6 * cfg.alpha_eff * n))
    e1_verdict, e1_wit = structure.check_sparse_sets(
        full, density_cap, size_cap, s_max=cfg.sparse_s_max,
        samples=cfg.sparse_samples, seed=_seed_int(cfg.master_seed, trial_index, 101))
    e1_ok = e1_verdict != "fails"
    c_ok, c_wit = structure.check_connected(aux)
    surplus = structure.red_surplus_count(trace, t, classes.medium)
    r_ok = surplus >= omega * n / 2

    witnesses = {}
    if not s_ok:
        witnesses["s"] = {"count": len(classes.small)}
    if not e1_ok:
        witnesses["e1"] = {"set": e1_wit}
    if not e2_ok:
        witnesses["e2"] = e2_wit
    if not c_ok:
        witnesses["c_prime"] = {"component": c_wit}
    if not m_ok:
        witnesses["m_prime"] = {"count": len(classes.medium)}
    if not r_ok:
        witnesses["r_prime"] = {"count": surplus,
                                "required": omega * n / 2}
    report = structure.EventReport(
        s=s_ok, e1=e1_ok, e2=e2_ok, c_prime=c_ok, m_prime=m_ok, r_prime=r_ok,
        witnesses=witnesses,
        params={"sigma": cfg.sigma, "K": cfg.K, "alpha_eff": cfg.alpha_eff,
                "omega": omega, "density_cap": density_cap, "size_cap": size_cap,
                "e1_verdict": e1_verdict, "small": len(classes.small),
                "medium": len(classes.medium), "red_surplus": surplus},
    )
    context = {"full": full, "blue": blue, "aux": aux, "classes": classes,
               "surplus_identity": surplus == full.m_active - aux.m_active}
    return report, context


# ---------------------------------------------------------------------------
# Hitting-time experiment


@dataclass
class TrialRecord:
    index: int
    seed: list
    tau2: int
    tau_h: int
    exactness: str
    equal: bool
    tau_in_window: bool
    path_order: Optional[int]
    boosters: Optional[int]
    events: dict
    elapsed_s: float = 0.0  # runtime only; never serialized

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "seed": self.seed,
            "tau2": self.tau2,
            "tau_h": self.tau_h,
            "exactness": self.exactness,
            "equal": self.equal,
            "tau_in_window": self.tau_in_window,
            "path_order": self.path_order,
            "boosters": self.boosters,
            "events": self.events,
        }


def _hitting_trial(host: HostGraph, sol: threshold.ThresholdSolution,
                   cfg: RunConfig, index: int) -> TrialRecord:
    start = time.perf_counter()
    trace = sample_trace(host, cfg.q(), seed=(cfg.master_seed, index, 0))
    tau2 = hitting_time_min_degree(trace, 2)
    finder_seed = _seed_int(cfg.master_seed, index, 1)

    gamma = snapshot(trace, tau2)
    first = hamiltonicity.find_hamilton(
        gamma, seed=_seed_int(finder_seed, tau2), restarts=cfg.restarts, budget=cfg.budget())
    path_order = None
    boosters = None
    if first.certificate is not None:
        tau_h, exactness = tau2, "exact"
    else:
        if host.n <= cfg.oracle_limit:
            ok, cycle = hamiltonicity.exact_hamiltonian(gamma, limit=cfg.oracle_limit)
        else:
            ok, cycle = False, None
        if ok:
            tau_h, exactness = tau2, "exact"
        else:
            res = hitting_time_hamiltonian(
                trace, seed=finder_seed, restarts=cfg.restarts, budget=cfg.budget(),
                oracle_limit=cfg.oracle_limit, tau2=tau2)
            tau_h, exactness = res.tau_h, res.exactness
            if host.n <= cfg.oracle_limit:
                path_order = len(hamiltonicity.exact_longest_path(gamma, limit=cfg.oracle_limit))
            else:
                path_order = len(first.best_path)
            if cfg.compute_boosters and not first.disconnected:
                longest = (hamiltonicity.exact_longest_path(gamma, limit=cfg.oracle_limit)
                           if host.n <= cfg.oracle_limit else first.best_path)
                try:
                    boosters = hamiltonicity.count_boosters(host, gamma, longest)
                except Exception:
                    boosters = None

    report, _ = event_report_at(trace, tau2, cfg, index)
    return TrialRecord(
        index=index,
        seed=[cfg.master_seed, index],
        tau2=tau2,
        tau_h=tau_h,
        exactness=exactness,
        equal=tau_h == tau2,
        tau_in_window=sol.T <= tau2 <= sol.T_prime,
        path_order=path_order,
        boosters=boosters,
        events=report.to_json_dict(),
        elapsed_s=time.perf_counter() - start,
    )


_WORKER_STATE: dict = {}


def _init_worker(cfg_json: str) -> None:
    cfg = RunConfig.from_json_dict(json.loads(cfg_json))
    host = make_host(cfg)
    profile = threshold.DegreeProfile.from_host(host)
    sol = threshold.solve_p0(profile, cfg.resolved_window_omega())
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["host"] = host
    _WORKER_STATE["sol"] = sol


def _hitting_worker(index: int) -> TrialRecord:
    return _hitting_trial(_WORKER_STATE["host"], _WORKER_STATE["sol"],
                          _WORKER_STATE["cfg"], index)


def _run_parallel(worker, cfg: RunConfig, indices) -> list:
    if cfg.workers == 1:
        _init_worker(json.dumps(cfg.to_json_dict()))
        return [worker(i) for i in indices]
    with concurrent.futures.ProcessPoolExecutor(
            max_workers=cfg.workers, initializer=_init_worker,
            initargs=(json.dumps(cfg.to_json_dict()),)) as pool:
        records = list(pool.map(worker, indices, chunksize=8))
    return records


def binomial_ci(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Normal-approximation interval, Wilson when either count is below 10."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    if min(successes, trials - successes) < 10:
        denom = 1 + z * z / trials
        center = (p + z * z / (2 * trials)) / denom
        half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
        return max(0.0, center - half), min(1.0, center + half)
    half = z * math.sqrt(p * (1 - p) / trials)
    return max(0.0, p - half), min(1.0, p + half)


def run_hitting_experiment(cfg: RunConfig):
    """Per-trial hitting times plus the equality-frequency summary."""
    records = _run_parallel(_hitting_worker, cfg, range(cfg.trials))
    records.sort(key=lambda r: r.index)
    eq = sum(1 for r in records if r.equal)
    lo, hi = binomial_ci(eq, len(records))
    summary = {
        "trials": len(records),
        "equal_frequency": eq / len(records),
        "equal_ci_low": lo,
        "equal_ci_high": hi,
        "exact_frequency": sum(1 for r in records if r.exactness == "exact") / len(records),
        "tau_in_window_frequency": sum(1 for r in records if r.tau_in_window) / len(records),
        "mean_tau2": float(np.mean([r.tau2 for r in records])),
        "mean_tau_h": float(np.mean([r.tau_h for r in records])),
    }
    return records, summary


# ---------------------------------------------------------------------------
# Threshold sweep


def _sweep_trial(host: HostGraph, cfg: RunConfig, c_index: int, c: float,
                 p: float, index: int) -> dict:
    g = sample_gnp(host, p, seed=(cfg.master_seed, c_index, index, 0))
    d2 = bool(g.min_degree() >= 2)
    ham = False
    if d2:
        connected, _ = structure.check_connected(g)
        if connected:
            res = hamiltonicity.find_hamilton(
                g, seed=_seed_int(cfg.master_seed, c_index, index, 1),
                restarts=cfg.restarts, budget=cfg.budget())
            ham = res.certificate is not None
            if not ham and host.n <= cfg.oracle_limit:
                ok, _ = hamiltonicity.exact_hamiltonian(g, limit=cfg.oracle_limit)
                ham = ok
    return {"kind": "sweep", "c_index": c_index, "c": c, "index": index, "p": p,
            "d2": d2, "ham": ham}


def _sweep_worker(task) -> dict:
    c_index, c, p, index = task
    return _sweep_trial(_WORKER_STATE["host"], _WORKER_STATE["cfg"], c_index, c, p, index)


def run_threshold_sweep(cfg: RunConfig):
    """Empirical Hamiltonicity and min-degree-2 probabilities along a c-grid."""
    host = make_host(cfg)
    beta = host.min_degree() / host.n
    tasks = []
    skipped = []
    cs = []
    for c_index, c in enumerate(cfg.sweep_c):
        try:
            p = threshold.p_from_c(cfg.n, beta, float(c))
        except InvalidParameterError as exc:
            skipped.append({"c": float(c), "note": str(exc)})
            continue
        cs.append((c_index, float(c), p))
        tasks.extend((c_index, float(c), p, i) for i in range(cfg.trials))
    records = _run_parallel(_sweep_worker, cfg, tasks)
    records.sort(key=lambda r: (r["c_index"], r["index"]))
    rows = []
    for c_index, c, p in cs:
        sub = [r for r in records if r["c_index"] == c_index]
        nt = len(sub)
        ham = sum(r["ham"] for r in sub)
        d2 = sum(r["d2"] for r in sub)
        p_ham = ham / nt
        p_d2 = d2 / nt
        rows.append({
            "c": c, "p": p, "trials": nt,
            "p_ham": p_ham, "p_d2": p_d2,
            "se_ham": math.sqrt(p_ham * (1 - p_ham) / nt),
            "se_d2": math.sqrt(p_d2 * (1 - p_d2) / nt),
            "reference": threshold.corollary_probability(beta, c),
        })
    summary = {"beta": beta, "rows": rows, "skipped": skipped}
    return records, summary


# ---------------------------------------------------------------------------
# Event audit


def _audit_trial(host: HostGraph, sol: threshold.ThresholdSolution,
                 cfg: RunConfig, index: int) -> dict:
    trace = sample_trace(host, cfg.q(), seed=(cfg.master_seed, index, 0))
    tau2 = hitting_time_min_degree(trace, 2)
    report, ctx = event_report_at(trace, tau2, cfg, index)
    rec = {
        "kind": "audit", "index": index, "seed": [cfg.master_seed, index],
        "tau2": tau2, "tau_in_window": bool(sol.T <= tau2 <= sol.T_prime),
        "events": report.to_json_dict(),
        "surplus_identity": bool(ctx["surplus_identity"]),
        "expansion": None,
    }
    if report.e:
        # Lemma 6/10 premises hold: run the expansion checks they imply
        n = host.n
        size_bound = max(1, math.floor(cfg.alpha_eff * n))
        checks = {}
        for gname, g in (("gamma", ctx["full"]), ("aux", ctx["aux"])):
            v2, w2 = structure.check_expansion(
                g, 2.0, size_bound, s_max=cfg.expansion_s_max,
                samples=cfg.expansion_samples,
                seed=_seed_int(cfg.master_seed, index, 201), restrict=None)
            v5, w5 = structure.check_expansion(
                g, 5.0, size_bound, s_max=cfg.expansion_s_max,
                samples=cfg.expansion_samples,
                seed=_seed_int(cfg.master_seed, index, 202),
                restrict=ctx["classes"].large)
            checks[gname] = {"factor2": v2, "factor2_witness": w2,
                             "factor5_large": v5, "factor5_witness": w5}
        rec["expansion"] = checks
    return rec


def _audit_worker(index: int) -> dict:
    return _audit_trial(_WORKER_STATE["host"], _WORKER_STATE["sol"],
                        _WORKER_STATE["cfg"], index)


def run_event_audit(cfg: RunConfig):
    """Event-flag frequencies and the expansion implication audit."""
    records = _run_parallel(_audit_worker, cfg, range(cfg.trials))
    records.sort(key=lambda r: r["index"])
    flags = ["s", "e1", "e2", "c_prime", "m_prime", "r_prime", "n_event"]
    freq = {f: sum(1 for r in records if r["events"][f]) / len(records) for f in flags}
    qualifying = [r for r in records if r["events"]["e1"] and r["events"]["e2"]]
    violations = []
    for r in qualifying:
        exp = r["expansion"]
        if exp is None:
            continue
        for gname, res in exp.items():
            if res["factor2"] == "fails" or res["factor5_large"] == "fails":
                violations.append({"index": r["index"], "graph": gname, "detail": res})
    summary = {
        "trials": len(records),
        "event_frequencies": freq,
        "qualifying_trials": len(qualifying),
        "implication_violations": violations,
        "surplus_identity_all": all(r["surplus_identity"] for r in records),
        "tau_in_window_frequency": sum(1 for r in records if r["tau_in_window"]) / len(records),
    }
    return records, summary


# ---------------------------------------------------------------------------
# Coupling check (prefix graph vs Bernoulli subgraph)


def run_coupling_check(cfg: RunConfig):
    """Paired comparison of P(min deg >= 2) under prefix and Bernoulli laws.

    Per trial one permutation fixes tau2; the Bernoulli subgraph at p = t/m
    is realized as the first B edges of the same permutation with B binomial,
    so both estimates ride on identical randomness.
    """
    host = make_host(cfg)
    m = host.m
    tau2s = np.empty(cfg.trials, dtype=np.int64)
    for i in range(cfg.trials):
        trace = sample_trace(host, 0.0, seed=(cfg.master_seed, i, 0))
        tau2s[i] = hitting_time_min_degree(trace, 2)
    qlo, qhi = np.quantile(tau2s, [0.1, 0.9])
    grid = np.unique(np.linspace(qlo, qhi, cfg.coupling_grid_points).astype(np.int64))
    rng = np.random.default_rng((cfg.master_seed, 7777))
    records = []
    rows = []
    num_trials = cfg.trials
    for t in grid.tolist():
        p = t / m
        draws = rng.binomial(m, p, size=num_trials)
        p_t = float(np.mean(tau2s <= t))
        p_p = float(np.mean(draws >= tau2s))
        se_t = math.sqrt(p_t * (1 - p_t) / num_trials)
        se_p = math.sqrt(p_p * (1 - p_p) / num_trials)
        bound_sqrt = 10 * math.sqrt(t) * p_p
        se_sqrt = math.sqrt(se_t ** 2 + (10 * math.sqrt(t) * se_p) ** 2)
        bound_mono = 10 * p_p
        se_mono = math.sqrt(se_t ** 2 + (10 * se_p) ** 2)
        ok_sqrt = p_t <= bound_sqrt + 3 * se_sqrt
        ok_mono = p_t <= bound_mono + 3 * se_mono
        row = {"t": int(t), "p": p, "p_t": p_t, "p_p": p_p,
               "ok_sqrt": bool(ok_sqrt), "ok_monotone": bool(ok_mono),
               "bound_sqrt": bound_sqrt, "bound_monotone": bound_mono,
               "se_sqrt": se_sqrt, "se_monotone": se_mono}
        rows.append(row)
        records.append({"kind": "coupling", **row})
    summary = {
        "trials": num_trials,
        "grid": [int(t) for t in grid.tolist()],
        "all_ok": all(r["ok_sqrt"] and r["ok_monotone"] for r in rows),
        "rows": rows,
    }
    return records, summary


# ---------------------------------------------------------------------------
# Output emission


def _to_plain(obj):
    if isinstance(obj, TrialRecord):
        return obj.to_json_dict()
    if dataclasses.is_dataclass(obj):
        return dataclasses.asdict(obj)
    return obj


def _record_lines(records) -> list[str]:
    return [json.dumps(_to_plain(r), sort_keys=True, separators=(",", ":"))
            for r in records]


def write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in _record_lines(records):
            fh.write(line + "\n")


def load_jsonl(path) -> list[dict]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


_PLOT_HEADER = ["x", "empirical", "reference", "stderr"]


def plot_rows(records, kind: str) -> list[list]:
    """Rows for the plot-data CSV: x is c for sweeps and t otherwise."""
    recs = [_to_plain(r) for r in records]
    rows = []
    if kind == "sweep":
        by_c: dict = {}
        for r in recs:
            by_c.setdefault(r["c_index"], []).append(r)
        for _, sub in sorted(by_c.items()):
            nt = len(sub)
            p_ham = sum(r["ham"] for r in sub) / nt
            rows.append([sub[0]["c"], p_ham, sum(r["d2"] for r in sub) / nt,
                         math.sqrt(p_ham * (1 - p_ham) / nt)])
    elif kind == "coupling":
        for r in recs:
            rows.append([r["t"], r["p_t"], r["bound_sqrt"], r["se_sqrt"]])
    elif kind == "hitting":
        taus2 = sorted(r["tau2"] for r in recs)
        tauh = [r["tau_h"] for r in recs]
        nt = len(recs)
        for t in sorted(set(taus2)):
            emp = sum(1 for x in tauh if x <= t) / nt
            ref = sum(1 for x in taus2 if x <= t) / nt
            rows.append([t, emp, ref, math.sqrt(max(emp * (1 - emp), 1e-12) / nt)])
    elif kind == "audit":
        taus2 = [r["tau2"] for r in recs]
        for t in sorted(set(taus2)):
            stopped = [r for r in recs if r["tau2"] <= t]
            emp = sum(1 for r in stopped if r["events"]["n_event"]) / len(stopped)
            rows.append([t, emp, 1.0, 0.0])
    else:
        raise InvalidParameterError(f"unknown record kind {kind!r}")
    return rows


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _summary_rows(kind: str, summary: dict) -> tuple[list[str], list[list]]:
    if kind == "sweep":
        header = ["c", "p", "trials", "p_ham", "p_d2", "se_ham", "se_d2", "reference"]
        return header, [[r[h] for h in header] for r in summary["rows"]]
    if kind == "coupling":
        header = ["t", "p", "p_t", "p_p", "bound_sqrt", "bound_monotone",
                  "ok_sqrt", "ok_monotone"]
        return header, [[r[h] for h in header] for r in summary["rows"]]
    header = sorted(k for k, v in summary.items()
                    if isinstance(v, (int, float, bool, str)))
    return header, [[summary[k] for k in header]]


def emit_outputs(records, summary, out_dir, kind: str) -> dict:
    """Write JSONL, summary CSV, and plot-data CSV; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "jsonl": os.path.join(out_dir, f"{kind}_records.jsonl"),
        "summary": os.path.join(out_dir, f"{kind}_summary.csv"),
        "plot": os.path.join(out_dir, f"{kind}_plot.csv"),
    }
    write_jsonl(records, paths["jsonl"])
    header, rows = _summary_rows(kind, summary)
    _write_csv(paths["summary"], header, rows)
    _write_csv(paths["plot"], _PLOT_HEADER, plot_rows(records, kind) if records else [])
    return paths
