"""Command-line front end: ``polaraug construct | simulate | complexity``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__, bp
from .channel import CONVENTIONS, ChannelPoint, StopRule, System, run_sweep
from .construction import CodeSpec, ConfigurationError, construct
from .coupling import DEFAULT_SEED, AugmentedSpec, build_coupled, build_setup

REFERENCE_PE = bp.pe_count([4096])
CSV_COLUMNS = ["snr_db", "convention", "frames", "bit_errors", "frame_errors", "ber", "fer", "avg_iters", "seed"]
SYSTEMS = ("plain", "setup1", "setup2", "setup3")


@dataclass
class ExperimentConfig:
    system: str = "plain"
    n: int = 4096
    k: int = 2048
    design_snr_db: float = 0.0
    interleaver_seed: int = DEFAULT_SEED
    snr_db: list = field(default_factory=list)
    convention: str = "EbN0"
    max_iters: int = bp.DEFAULT_MAX_ITERS
    early_stop: bool = False
    uncoupled: bool = False
    min_frame_errors: int = 100
    max_frames: int = 100_000
    seed: int = 0
    output: str | None = None

    def validate(self) -> None:
        if self.system not in SYSTEMS and not Path(self.system).is_file():
            raise ConfigurationError(f"system must be one of {SYSTEMS} or an existing spec file: {self.system!r}")
        if self.convention not in CONVENTIONS:
            raise ConfigurationError(f"convention must be one of {CONVENTIONS}")
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be positive")
        StopRule(self.min_frame_errors, self.max_frames)
        self.snr_db = [float(s) for s in self.snr_db]


def load_code(cfg: ExperimentConfig):
    """Build or load the code named by ``cfg.system``."""
    if cfg.system == "plain":
        return construct(cfg.n, cfg.k, 0, cfg.design_snr_db)
    if cfg.system in SYSTEMS:
        return build_setup(int(cfg.system[-1]), cfg.design_snr_db, cfg.interleaver_seed)
    return load_spec_file(cfg.system, cfg.design_snr_db, cfg.interleaver_seed)


def load_spec_file(path, design_snr_db: float = 0.0, seed: int = DEFAULT_SEED):
    """Read a plain code, a full augmented spec, or a wiring description.

    A wiring description has keys ``inner`` and ``aux`` (lists of ``[N, K]``)
    and ``wiring`` (list of ``[aux_id, inner_id, count]``).
    """
    d = json.loads(Path(path).read_text())
    if "edges" in d:
        return AugmentedSpec.from_dict(d)
    if "wiring" in d:
        return build_coupled([tuple(x) for x in d["inner"]], [tuple(x) for x in d["aux"]],
                             [tuple(w) for w in d["wiring"]], d.get("design_snr_db", design_snr_db),
                             d.get("seed", seed), name=d.get("name", "custom"))
    if "info_set" in d:
        return CodeSpec.from_dict(d)
    raise ConfigurationError(f"{path}: not a code, spec or wiring file")


def rate_table(code) -> list[str]:
    if isinstance(code, CodeSpec):
        lines = [f"plain N={code.n_total} K={code.k_info} rate={code.k_info / code.n_total:.4f}"]
        th = code.thresholds()
        if th:
            lines.append(f"  info boundary z={th[0]:.6g}")
        return lines
    lines = [f"{code.name}: K={code.total_k} N={code.total_n} rate={code.rate:.4f}"]
    for a, c in enumerate(code.aux_codes):
        lines.append(f"  aux[{a}]   N={c.n_total:5d} K={c.k_info:5d} rate={c.k_info / c.n_total:.4f}")
    for j, c in enumerate(code.inner_codes):
        d1, d2 = c.thresholds() or (float("nan"), float("nan"))
        lines.append(f"  inner[{j}] N={c.n_total:5d} K={c.k_info:5d} semi={c.n_semi:4d} "
                     f"rate={(c.k_info + c.n_semi) / c.n_total:.4f} delta1={d1:.6g} delta2={d2:.6g}")
    lines.append("  edges: " + ", ".join(f"aux{e.aux_id}[{e.offset}:{e.offset + e.count}]->inner{e.inner_id}"
                                        for e in code.edges))
    return lines


def complexity_report(code) -> tuple[int, float]:
    lengths = [code.n_total] if isinstance(code, CodeSpec) else code.lengths
    pes = bp.pe_count(lengths)
    return pes, pes / REFERENCE_PE


def write_csv(cfg: ExperimentConfig, results) -> str:
    buf = io.StringIO()
    buf.write(f"# polaraug {__version__}\n")
    for key, value in asdict(cfg).items():
        if key != "output":
            buf.write(f"# {key}={json.dumps(value)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        row = r.as_row()
        w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def simulate(cfg: ExperimentConfig, batch_size: int = 64, workers: int = 1) -> str:
    cfg.validate()
    code = load_code(cfg)
    system = System(code, cfg.max_iters, cfg.early_stop, coupled=not cfg.uncoupled)
    points = [ChannelPoint(s, cfg.convention, system.rate) for s in cfg.snr_db]
    results = run_sweep(system, points, StopRule(cfg.min_frame_errors, cfg.max_frames), cfg.seed,
                        batch_size=batch_size, workers=workers)
    return write_csv(cfg, results)


def _add_system_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--setup", type=int, choices=(1, 2, 3))
    g.add_argument("--plain", action="store_true")
    g.add_argument("--custom", metavar="FILE", help="code, spec or wiring JSON file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--design-snr", type=float, default=None, dest="design_snr_db")
    p.add_argument("--interleaver-seed", type=int, default=None)


def _system_from_args(args) -> str | None:
    if args.setup:
        return f"setup{args.setup}"
    if args.plain:
        return "plain"
    return args.custom


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polaraug", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and write it as JSON")
    _add_system_args(p)
    p.add_argument("-o", "--output")

    p = sub.add_parser("simulate", help="Monte Carlo BER/FER sweep written as CSV")
    _add_system_args(p)
    p.add_argument("--config", help="JSON experiment config; flags override it")
    p.add_argument("--snr", type=float, nargs="*", dest="snr_db")
    p.add_argument("--convention", choices=CONVENTIONS)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--early-stop", action="store_true", default=None)
    p.add_argument("--uncoupled", action="store_true", default=None)
    p.add_argument("--min-frame-errors", type=int)
    p.add_argument("--max-frames", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")

    p = sub.add_parser("complexity", help="processing-element count vs the N=4096 reference")
    _add_system_args(p)
    return parser


def config_from_args(args) -> ExperimentConfig:
    data = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        unknown = set(data) - {f.name for f in fields(ExperimentConfig)}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    system = _system_from_args(args)
    if system is not None:
        data["system"] = system
    for f in fields(ExperimentConfig):
        if f.name != "system" and getattr(args, f.name, None) is not None:
            data[f.name] = getattr(args, f.name)
    return ExperimentConfig(**data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "simulate":
            text = simulate(cfg, args.batch_size, args.workers)
            if cfg.output:
                Path(cfg.output).write_text(text)
            else:
                sys.stdout.write(text)
            return 0
        cfg.validate()
        code = load_code(cfg)
        if args.command == "construct":
            for line in rate_table(code):
                print(line)
            if cfg.output:
                code.save(cfg.output)
            else:
                print(json.dumps(code.to_dict()))
        else:
            pes, ratio = complexity_report(code)
            print(f"processing elements: {pes}")
            print(f"reference N=4096 polar BP: {REFERENCE_PE}")
            print(f"ratio: {ratio:.4f}")
        return 0
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"polaraug: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
