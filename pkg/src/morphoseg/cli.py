"""Batch command-line front end.

Exit codes: 0 success, 2 input or configuration error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__, io
from .amr import AmrParams, amr
from .exceptions import MorphosegError
from .gradient import image_gradient, load_gradient
from .hierarchy import build_hierarchy
from .metrics import evaluate
from .spectral import cluster_regions
from .synthetic import corpus
from .validation import check_gray
from .watershed import segment_gradient

log = logging.getLogger("morphoseg")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3

_GT_SUFFIXES = ("_labels", "_spectral", "_segment")


class InputError(Exception):
    """Bad path or flag combination detected before compute starts."""


class InvariantError(Exception):
    """A pipeline produced output that breaks its own contract."""


@dataclass
class RunConfig:
    command: str
    inputs: list
    out: Path
    s: int = 2
    m: int = 50
    eta: Optional[float] = 1e-4
    connectivity: int = 8
    gradient: str = "sobel"
    k: Optional[int] = None
    sigma: float = 1.0
    seed: int = 0
    overlay: bool = False
    gt: Optional[Path] = None
    segment: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def params(self) -> AmrParams:
        return AmrParams(s=self.s, m=self.m, eta=self.eta)

    def flags(self) -> dict:
        d = asdict(self)
        for key in ("inputs", "out", "gt", "extra", "command"):
            d.pop(key)
        return d


def _threads() -> int:
    raw = os.environ.get("MORPHOSEG_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise InputError(f"MORPHOSEG_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _map_ordered(fn: Callable, items: list) -> list:
    workers = min(_threads(), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _stem(path: Path) -> str:
    return path.name.split(".")[0]


def _validate_paths(cfg: RunConfig) -> None:
    for p in cfg.inputs:
        if not p.is_file():
            raise InputError(f"input file not found: {p}")
    if cfg.gradient != "sobel":
        gpath = Path(cfg.gradient)
        if not gpath.exists():
            raise InputError(f"gradient path not found: {gpath}")
        if gpath.is_file() and len(cfg.inputs) > 1:
            raise InputError("--gradient FILE needs exactly one input; pass a directory for batches")
        if gpath.is_dir():
            for p in cfg.inputs:
                _gradient_file_for(p, gpath)
    if cfg.gt is not None and not cfg.gt.is_dir():
        raise InputError(f"ground-truth directory not found: {cfg.gt}")
    cfg.out.mkdir(parents=True, exist_ok=True)


def _gradient_file_for(image: Path, gdir: Path) -> Path:
    for ext in (".pfm", ".pgm"):
        cand = gdir / (_stem(image) + ext)
        if cand.is_file():
            return cand
    raise InputError(f"no gradient for {image.name} in {gdir} (expected {_stem(image)}.pfm or .pgm)")


def _load_input(cfg: RunConfig, path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(image, gradient)``; PFM inputs are taken as gradients."""
    if cfg.gradient != "sobel":
        gpath = Path(cfg.gradient)
        gfile = _gradient_file_for(path, gpath) if gpath.is_dir() else gpath
        grad = load_gradient(gfile)
        img = io.load_image(path)
        if img.shape[:2] != grad.shape:
            raise MorphosegError(f"gradient {gfile} shape {grad.shape} does not match {path} {img.shape[:2]}")
        return img, grad
    if path.suffix.lower() == ".pfm":
        grad = load_gradient(path)
        return grad, grad
    img = io.load_image(path)
    return img, image_gradient(img)


def _check_partition(labels: np.ndarray, what: str) -> None:
    if labels.min() < 1:
        raise InvariantError(f"{what}: output contains unassigned pixels")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def boundary_mask(labels: np.ndarray) -> np.ndarray:
    """Pixels whose right or lower neighbor carries a different label."""
    edge = np.zeros(labels.shape, dtype=bool)
    edge[:, :-1] |= labels[:, :-1] != labels[:, 1:]
    edge[:-1, :] |= labels[:-1, :] != labels[1:, :]
    return edge


def overlay(image: np.ndarray, labels: np.ndarray, color=(1.0, 0.0, 0.0)) -> np.ndarray:
    rgb = np.repeat(image[..., None], 3, axis=2) if image.ndim == 2 else image.copy()
    rgb[boundary_mask(labels)] = color
    return rgb


# -- commands ---------------------------------------------------------------


def cmd_reconstruct(cfg: RunConfig) -> list:
    def run(path: Path) -> dict:
        _, grad = _load_input(cfg, path)
        result = amr(grad, cfg.params)
        stem = _stem(path)
        out = cfg.out / f"{stem}_psi.pfm"
        io.write_pfm(out, result.psi)
        record = {
            "input": str(path),
            "output": str(out),
            "iterations_used": result.iterations_used,
            "gap_history": list(result.gap_history),
            "flags": cfg.flags(),
        }
        _write_json(cfg.out / f"{stem}_amr.json", record)
        return record

    return _map_ordered(run, cfg.inputs)


def _segment_one(cfg: RunConfig, grad: np.ndarray) -> tuple[np.ndarray, int]:
    result = amr(grad, cfg.params)
    labels = segment_gradient(result.psi, cfg.connectivity)
    _check_partition(labels, "segment")
    return labels, result.iterations_used


def cmd_segment(cfg: RunConfig) -> list:
    def run(path: Path) -> dict:
        img, grad = _load_input(cfg, path)
        labels, used = _segment_one(cfg, grad)
        stem = _stem(path)
        out = cfg.out / f"{stem}_labels.png"
        io.save_labels(labels, out)
        record = {
            "input": str(path),
            "output": str(out),
            "region_count": int(labels.max()),
            "iterations_used": used,
            "flags": cfg.flags(),
        }
        if cfg.overlay:
            ov = cfg.out / f"{stem}_overlay.png"
            io.save_png(ov, overlay(img, labels))
            record["overlay"] = str(ov)
        _write_json(cfg.out / f"{stem}_segment.json", record)
        return record

    return _map_ordered(run, cfg.inputs)


def cmd_hierarchy(cfg: RunConfig) -> list:
    def run(path: Path) -> dict:
        _, grad = _load_input(cfg, path)
        h = build_hierarchy(grad, cfg.s, cfg.m, cfg.connectivity, precomputed_gradient=True)
        stem = _stem(path)
        files = []
        for z, level in enumerate(h.levels):
            _check_partition(level, "hierarchy")
            out = cfg.out / f"{stem}_level{z:02d}.png"
            io.save_labels(level, out)
            files.append(str(out))
        manifest = h.manifest()
        for entry, f in zip(manifest, files):
            entry["file"] = f
        record = {"input": str(path), "levels": manifest, "flags": cfg.flags()}
        _write_json(cfg.out / f"{stem}_hierarchy.json", record)
        return record

    return _map_ordered(run, cfg.inputs)


def cmd_spectral(cfg: RunConfig) -> list:
    def run(path: Path) -> dict:
        img, grad = _load_input(cfg, path)
        if img.ndim != 3:
            raise MorphosegError(f"{path}: spectral segmentation needs a color (PPM/RGB PNG) image")
        pre, used = _segment_one(cfg, grad)
        labels = cluster_regions(img, pre, cfg.k, cfg.sigma, cfg.seed)
        _check_partition(labels, "spectral")
        stem = _stem(path)
        out = cfg.out / f"{stem}_spectral.png"
        io.save_labels(labels, out)
        record = {
            "input": str(path),
            "output": str(out),
            "presegment_regions": int(pre.max()),
            "region_count": int(labels.max()),
            "iterations_used": used,
            "flags": cfg.flags(),
        }
        _write_json(cfg.out / f"{stem}_spectral.json", record)
        return record

    return _map_ordered(run, cfg.inputs)


def image_id(path: Path) -> str:
    stem = _stem(path)
    for suffix in _GT_SUFFIXES:
        if stem.endswith(suffix):
            return stem[: -len(suffix)]
    return stem


def ground_truths_for(gt_dir: Path, ident: str) -> list[Path]:
    """``<gt>/<id>/*.png`` (one file per annotator) or ``<gt>/<id>_gt*.png``."""
    sub = gt_dir / ident
    files = sorted(sub.glob("*.png")) if sub.is_dir() else []
    files += sorted(gt_dir.glob(f"{ident}_gt*.png"))
    return files


def cmd_eval(cfg: RunConfig) -> list:
    if cfg.gt is None:
        raise InputError("eval needs --gt DIR")
    jobs = []
    for path in cfg.inputs:
        ident = image_id(path)
        gts = ground_truths_for(cfg.gt, ident)
        if not gts:
            raise InputError(f"no ground truth for {ident} in {cfg.gt}")
        jobs.append((path, ident, gts))

    def run(job) -> dict:
        path, ident, gts = job
        if cfg.segment:
            _, grad = _load_input(cfg, path)
            seg, _ = _segment_one(cfg, grad)
        else:
            seg = io.load_labels(path)
        truths = [io.load_labels(p) for p in gts]
        rep = evaluate(seg, truths)
        return {"image": ident, "pri": rep.pri, "cv": rep.cv, "vi": rep.vi, "n_gt": len(truths)}

    rows = _map_ordered(run, jobs)
    out = cfg.out / "eval.csv"
    with out.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["image", "pri", "cv", "vi", "n_gt"])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in row.items()})
        mean = {
            "image": "mean",
            "pri": f"{np.mean([r['pri'] for r in rows]):.6f}",
            "cv": f"{np.mean([r['cv'] for r in rows]):.6f}",
            "vi": f"{np.mean([r['vi'] for r in rows]):.6f}",
            "n_gt": sum(r["n_gt"] for r in rows),
        }
        writer.writerow(mean)
    _write_json(cfg.out / "eval.json", {"vi_unit": "bits", "rows": rows, "flags": cfg.flags()})
    return rows


def cmd_demo(cfg: RunConfig) -> list:
    records = []
    for item in corpus(seed=cfg.seed):
        if item.kind == "gradient":
            path = cfg.out / f"{item.name}.pfm"
            io.write_pfm(path, item.image)
        elif item.kind == "gray":
            path = cfg.out / f"{item.name}.pgm"
            io.write_pnm(path, item.image, maxval=65535)
        else:
            path = cfg.out / f"{item.name}.ppm"
            io.write_pnm(path, item.image, maxval=65535)
        gt = cfg.out / f"{item.name}_gt.png"
        io.save_labels(item.ground_truth, gt)
        records.append(
            {
                "name": item.name,
                "kind": item.kind,
                "image": str(path),
                "ground_truth": str(gt),
                "regions": int(np.unique(item.ground_truth).size),
            }
        )
    _write_json(cfg.out / "demo.json", {"seed": cfg.seed, "images": records})
    return records


COMMANDS = {
    "reconstruct": cmd_reconstruct,
    "segment": cmd_segment,
    "hierarchy": cmd_hierarchy,
    "spectral": cmd_spectral,
    "eval": cmd_eval,
    "demo": cmd_demo,
}


# -- argument parsing -------------------------------------------------------


def _eta(text: str) -> Optional[float]:
    if text.lower() in ("none", "off"):
        return None
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    amr_opts = argparse.ArgumentParser(add_help=False)
    amr_opts.add_argument("--s", type=int, default=2, help="minimum disk radius (default 2)")
    amr_opts.add_argument("--m", type=int, default=50, help="maximum disk radius (default 50)")
    amr_opts.add_argument("--eta", type=_eta, default=1e-4, help="stop threshold, or 'none' (default 1e-4)")
    amr_opts.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    amr_opts.add_argument(
        "--gradient", default="sobel", help="'sobel' or a PFM/PGM gradient file (or directory of them)"
    )

    parser = argparse.ArgumentParser(prog="morphoseg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reconstruct", parents=[common, amr_opts], help="write the AMR gradient as PFM")
    p.add_argument("inputs", nargs="+", type=Path)

    p = sub.add_parser("segment", parents=[common, amr_opts], help="AMR-WT segmentation")
    p.add_argument("inputs", nargs="+", type=Path)
    p.add_argument("--overlay", action="store_true", help="also write region boundaries over the input")

    p = sub.add_parser("hierarchy", parents=[common, amr_opts], help="one partition per scale cap s..m")
    p.add_argument("inputs", nargs="+", type=Path)

    p = sub.add_parser("spectral", parents=[common, amr_opts], help="AMR-SC segmentation of color images")
    p.add_argument("inputs", nargs="+", type=Path)
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("eval", parents=[common, amr_opts], help="PRI / CV / VI against ground truths")
    p.add_argument("inputs", nargs="+", type=Path, help="label PNGs, or images with --segment")
    p.add_argument("--gt", type=Path, required=True, help="ground-truth directory")
    p.add_argument("--segment", action="store_true", help="run AMR-WT on the inputs first")

    p = sub.add_parser("demo", parents=[common], help="write the synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, inputs=list(getattr(args, "inputs", [])), out=args.out)
    for name in ("s", "m", "eta", "connectivity", "gradient", "k", "sigma", "seed", "overlay", "gt", "segment"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if args.command == "hierarchy" and cfg.m > 50:
        log.warning("hierarchy with --m %d writes %d levels", cfg.m, cfg.m - cfg.s + 2)
    if args.command not in ("demo",):
        cfg.params  # validates s, m, eta
        if cfg.k is not None and cfg.k < 1:
            raise InputError(f"--k must be >= 1, got {cfg.k}")
        if not cfg.sigma > 0:
            raise InputError(f"--sigma must be > 0, got {cfg.sigma}")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s"
    )
    try:
        cfg = _config(args)
        if cfg.command == "demo":
            cfg.out.mkdir(parents=True, exist_ok=True)
        else:
            _validate_paths(cfg)
        records = COMMANDS[cfg.command](cfg)
    except (InputError, MorphosegError, OSError) as exc:
        print(f"morphoseg: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantError, AssertionError) as exc:
        print(f"morphoseg: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    for rec in records:
        log.info("%s", json.dumps(rec, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
