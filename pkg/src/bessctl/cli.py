"""Command-line entry point.

Verbs: ``scenario`` (synthesize and write a scenario plus its traces),
``train`` (fit the DQN controller), ``evaluate`` (deterministic rollout
of a named policy with cost reports), ``report`` (aggregate evaluation
runs into a summary table, ROI column, and per-weather-class supply
plot data). Every command writes a run_manifest.json listing each
emitted artifact with its sha256. Exit codes: 0 success, 1 validation
error, 2 runtime error or training divergence.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import _kernels
from .billing import roi as roi_fn
from .core import ScenarioError
from .dqn import (Hyperparams, QNetwork, TrainingDiverged, train, write_training_log)
from .environment import rollout, write_slot_csv
from .policies import (DqnPolicy, POLICY_KINDS, exhaustive_oracle, greedy_policy,
                       grid_only_policy, sequence_policy)
from .simulation import (CITY_CALENDARS, ScenarioConfig, build_simulation,
                         city_scenario, load_scenario, save_scenario)

TABLE_COLUMNS = ("bs_type", "city", "policy", "energy_usd", "demand_usd",
                 "investment_usd", "total_usd", "pv_cost_usd", "wind_cost_usd",
                 "battery_cost_usd", "peak_kw", "baseline_total_usd", "saving_usd",
                 "saving_ratio_pct")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, args: argparse.Namespace,
                    artifacts: list[Path]) -> None:
    manifest = {
        "command": command,
        "argv": sys.argv[1:],
        "scenario": getattr(args, "config", None),
        "seed": getattr(args, "seed", None),
        "policy": getattr(args, "policy", None),
        "out_dir": str(out_dir),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "kernel_backend": _kernels.BACKEND,
        "artifacts": {p.name: _sha256(p) for p in sorted(artifacts)},
    }
    with open(out_dir / "run_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_scenario(args) -> int:
    if args.calendar:
        with open(args.calendar) as fh:
            calendar = tuple(tuple(day) for day in json.load(fh))
        cfg = ScenarioConfig(bs_type=args.bs_type, weather_calendar=calendar,
                             rng_seed=args.seed, city=args.city or "custom")
    else:
        cfg = city_scenario(args.bs_type, args.city or "shanghai", seed=args.seed)
    sim = build_simulation(cfg)

    out = _out_dir(args)
    artifacts = [out / "scenario.json"]
    save_scenario(cfg, artifacts[0])
    for name, trace in (("demand", sim.demand), ("ghi", sim.ghi),
                        ("temperature", sim.temperature), ("wind_speed", sim.wind_speed),
                        ("generation", sim.generation)):
        path = out / f"{name}.csv"
        trace.to_csv(path)
        artifacts.append(path)
    _write_manifest(out, "scenario", args, artifacts)
    print(f"scenario written to {out} ({sim.slot_count} slots, "
          f"{len(cfg.weather_calendar)} days, bs_type={cfg.bs_type})")
    return 0


def _hyper_from_args(args) -> Hyperparams:
    hidden = tuple(int(x) for x in args.hidden.split(",") if x)
    return Hyperparams(
        lr=args.lr, epsilon=args.epsilon, gamma=args.gamma,
        target_sync=args.target_sync, update_every=args.update_every,
        batch_size=args.batch_size, buffer_capacity=args.buffer,
        episodes=args.episodes, hidden=hidden,
        epsilon_final=args.epsilon_final, eval_every=args.eval_every)


def cmd_train(args) -> int:
    cfg = load_scenario(args.config)
    sim = build_simulation(cfg, base_dir=Path(args.config).parent)
    hyper = _hyper_from_args(args)
    from .environment import Env

    def factory():
        return Env(sim, collect_reports=False, reward_mode=args.reward)

    net, log = train(factory, hyper, args.seed)
    out = _out_dir(args)
    ckpt = out / "checkpoint.json"
    net.save(ckpt)
    log_path = out / "training_log.csv"
    write_training_log(log, log_path)
    _write_manifest(out, "train", args, [ckpt, log_path])
    if log:
        print(f"trained {hyper.episodes} episodes; first-episode cost "
              f"${log[0].total_cost:.2f}, last ${log[-1].total_cost:.2f}")
    else:
        print("wrote untrained checkpoint (0 episodes)")
    return 0


def _evaluate_sim(sim, policy_name: str, checkpoint: str | None,
                  reward_mode: str = "exp"):
    """Returns (breakdown, reports, baseline_breakdown)."""
    baseline, _ = rollout(grid_only_policy, sim, equipped=False, collect_reports=False)
    if policy_name == "grid_only":
        breakdown, reports = rollout(grid_only_policy, sim, equipped=False)
    elif policy_name == "greedy":
        breakdown, reports = rollout(greedy_policy, sim, reward_mode=reward_mode)
    elif policy_name == "dqn":
        if not checkpoint:
            raise ScenarioError("policy 'dqn' requires --checkpoint")
        net = QNetwork.load(checkpoint)
        breakdown, reports = rollout(DqnPolicy(net), sim, reward_mode=reward_mode)
    elif policy_name == "oracle":
        _, seq = exhaustive_oracle(sim)
        breakdown, reports = rollout(sequence_policy(seq), sim, reward_mode=reward_mode)
    else:
        raise ScenarioError(f"unknown policy {policy_name!r}, expected {POLICY_KINDS}")
    return breakdown, reports, baseline


def table_row(bs_type: str, city: str, policy: str, breakdown, baseline) -> dict:
    """Summary-row dict. ``saving`` compares the policy-dependent bill
    (energy + demand + battery degradation) against the grid-only bill;
    generator amortization is listed but excluded there as a sunk,
    policy-independent cost."""
    saving = baseline.total - breakdown.billable
    ratio = 100.0 * saving / baseline.total if baseline.total > 0 else 0.0
    return {
        "bs_type": bs_type, "city": city, "policy": policy,
        "energy_usd": breakdown.energy, "demand_usd": breakdown.demand,
        "investment_usd": breakdown.investment, "total_usd": breakdown.total,
        "pv_cost_usd": breakdown.pv_cost, "wind_cost_usd": breakdown.wind_cost,
        "battery_cost_usd": breakdown.battery_cost, "peak_kw": breakdown.peak_kw,
        "baseline_total_usd": baseline.total, "saving_usd": saving,
        "saving_ratio_pct": ratio,
    }


def _write_table(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TABLE_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in TABLE_COLUMNS})


def cmd_evaluate(args) -> int:
    cfg = load_scenario(args.config)
    sim = build_simulation(cfg, base_dir=Path(args.config).parent)
    breakdown, reports, baseline = _evaluate_sim(sim, args.policy, args.checkpoint)

    out = _out_dir(args)
    row = table_row(cfg.bs_type, cfg.city, args.policy, breakdown, baseline)
    report = {
        "scenario": {"bs_type": cfg.bs_type, "city": cfg.city, "rng_seed": cfg.rng_seed,
                     "slot_count": sim.slot_count},
        "policy": args.policy,
        "breakdown": breakdown.as_dict(),
        "baseline": baseline.as_dict(),
        "saving_usd": row["saving_usd"],
        "saving_ratio_pct": row["saving_ratio_pct"],
    }
    artifacts = []
    report_path = out / "eval_report.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    artifacts.append(report_path)

    row_path = out / "table_row.csv"
    _write_table([row], row_path)
    artifacts.append(row_path)

    slots_path = out / "slots.csv"
    write_slot_csv(reports, slots_path)
    artifacts.append(slots_path)

    scn_path = out / "scenario.json"
    save_scenario(cfg, scn_path)
    artifacts.append(scn_path)

    _write_manifest(out, "evaluate", args, artifacts)
    print(f"{args.policy}: total ${breakdown.total:.2f} "
          f"(energy ${breakdown.energy:.2f}, demand ${breakdown.demand:.2f}, "
          f"investment ${breakdown.investment:.2f}); saving ${row['saving_usd']:.2f} "
          f"({row['saving_ratio_pct']:.1f}%)")
    return 0


def _supply_bundle(slots_csv: Path, calendar) -> dict[tuple[str, str], np.ndarray]:
    """Per weather class, the 24-hour mean (demand, renewable-direct,
    battery, grid) decomposition across that class's days."""
    rows = list(csv.DictReader(slots_csv.open()))
    by_class: dict[tuple[str, str], list[np.ndarray]] = {}
    slots_per_day = 24
    for day_idx in range(len(rows) // slots_per_day):
        day_rows = rows[day_idx * slots_per_day:(day_idx + 1) * slots_per_day]
        decomp = np.zeros((slots_per_day, 4))
        for h, r in enumerate(day_rows):
            d = float(r["d"])
            load = float(r["tilde_b"])
            p = float(r["p"])
            renewable = max(0.0, d - load - p)
            decomp[h] = (d, renewable, load, p)
        if day_idx < len(calendar):
            key = tuple(calendar[day_idx])
            by_class.setdefault(key, []).append(decomp)
    return {k: np.mean(v, axis=0) for k, v in by_class.items()}


def cmd_report(args) -> int:
    out = _out_dir(args)
    rows = []
    tariffs = set()
    artifacts = []
    for run in args.runs:
        run_dir = Path(run)
        report = json.loads((run_dir / "eval_report.json").read_text())
        cfg = load_scenario(run_dir / "scenario.json")
        tariffs.add((cfg.tariff.energy_price, cfg.tariff.demand_price))
        if len(tariffs) > 1:
            raise ScenarioError(
                f"inconsistent tariffs across runs: {sorted(tariffs)}")
        saving = report["saving_usd"]
        row = {
            "bs_type": report["scenario"]["bs_type"],
            "city": report["scenario"]["city"],
            "policy": report["policy"],
            **{k: report["breakdown"][k] for k in
               ("energy_usd", "demand_usd", "investment_usd", "total_usd",
                "pv_cost_usd", "wind_cost_usd", "battery_cost_usd", "peak_kw")},
            "baseline_total_usd": report["baseline"]["total_usd"],
            "saving_usd": saving,
            "saving_ratio_pct": report["saving_ratio_pct"],
            "roi_pct": 100.0 * roi_fn(saving, cfg.equipment, cfg.battery),
        }
        rows.append(row)

        slots_csv = run_dir / "slots.csv"
        if slots_csv.exists():
            for (solar, wind), decomp in _supply_bundle(slots_csv, cfg.weather_calendar).items():
                name = f"plot_supply_{run_dir.name}_{solar}_{wind}.csv"
                path = out / name
                lines = ["hour,demand_kw,renewable_kw,battery_kw,grid_kw"]
                lines += [",".join([str(h)] + [repr(float(v)) for v in row_])
                          for h, row_ in enumerate(decomp)]
                path.write_text("\n".join(lines) + "\n")
                artifacts.append(path)

    summary_path = out / "summary.csv"
    with open(summary_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(TABLE_COLUMNS) + ["roi_pct"])
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    artifacts.append(summary_path)
    _write_manifest(out, "report", args, artifacts)
    print(f"report over {len(rows)} run(s) written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bessctl",
        description="Simulate, learn, and evaluate battery dispatch for a "
                    "renewable-powered base station.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--config", help="scenario JSON file")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", parents=[common], help="synthesize a scenario")
    p.add_argument("--bs-type", dest="bs_type", default="resident",
                   choices=("resident", "office", "comprehensive"))
    p.add_argument("--city", choices=sorted(CITY_CALENDARS), default=None)
    p.add_argument("--calendar", help="JSON file with a [[solar, wind], ...] calendar")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("train", parents=[common], help="train the DQN controller")
    p.add_argument("--episodes", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--epsilon", type=float, default=0.9)
    p.add_argument("--epsilon-final", dest="epsilon_final", type=float, default=None)
    p.add_argument("--gamma", type=float, default=0.9)
    p.add_argument("--target-sync", dest="target_sync", type=int, default=2000)
    p.add_argument("--update-every", dest="update_every", type=int, default=4)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=64)
    p.add_argument("--buffer", type=int, default=10000)
    p.add_argument("--hidden", default="64,64")
    p.add_argument("--eval-every", dest="eval_every", type=int, default=25,
                   help="greedy-evaluate every k episodes and keep the best "
                        "snapshot (0 disables)")
    p.add_argument("--reward", choices=("exp", "linear"), default="exp")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="evaluate a policy")
    p.add_argument("--policy", choices=POLICY_KINDS, default="greedy")
    p.add_argument("--checkpoint", help="checkpoint path for --policy dqn")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", parents=[common], help="aggregate evaluation runs")
    p.add_argument("runs", nargs="+", help="evaluation output directories")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) in ("train", "evaluate") and not args.config:
        parser.error(f"{args.command} requires --config")
    try:
        return args.func(args)
    except (ScenarioError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TrainingDiverged as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
