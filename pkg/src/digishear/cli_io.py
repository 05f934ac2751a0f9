"""Binary file formats and the ``digishear`` command line.

Image files (``SHIM``)::

    magic "SHIM" | version u16 | N u32 | dtype u8 (1 = f64) | N*N f64 row-major

Coefficient files (``SHCF``)::

    magic "SHCF" | version u16 | transform id u8
    N, R or J, c1, c2 as f64 | weight choice u8
    band count u32
    per band: cone, j, k as i32 | rows u32 | cols u32 | byte offset u64
    payload: complex64 pairs, bands stored back to back in directory order

Everything is little-endian.  Transform ids are 1 FDST, 2 DSST, 3 decimated
DNST and 4 undecimated DNST.  Lowpass arrays use ``j = -1``: FDST stores its
two scaling arrays as ``(0, -1, 1)`` and ``(0, -1, 2)``, the Cartesian
transforms store theirs as ``(0, -1, 0)``.

Exit codes: 0 success, 1 usage error or unreadable input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import struct
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dnst as _dnst
from . import dsst as _dsst
from . import fdst as _fdst
from .core import CgResult, NumericalError, PPGridParams, check_image, conjugate_gradient
from .measures import MEASURES, TRANSFORMS, MeasureConfig, default_scales, run_measure
from .weights import gram_condition, save_weights, unit_weights, weights_for
from .windows import FDSTCoeffs, layout


class UsageError(ValueError):
    """Bad flags, incompatible options or malformed input files."""


# ---------------------------------------------------------------- images

SHIM_MAGIC = b"SHIM"
SHIM_VERSION = 1
SHIM_F64 = 1
_SHIM_HEADER = struct.Struct("<4sHIB")


def write_image(path, img) -> None:
    img = check_image(np.asarray(img, dtype=float))
    n = img.shape[0]
    with open(path, "wb") as fh:
        fh.write(_SHIM_HEADER.pack(SHIM_MAGIC, SHIM_VERSION, n, SHIM_F64))
        fh.write(np.ascontiguousarray(img, dtype="<f8").tobytes())


def read_image(path) -> np.ndarray:
    """Read a ``SHIM`` file, or a binary PGM scaled to ``[0, 1]``."""
    raw = Path(path).read_bytes()
    if raw[:2] == b"P5":
        return parse_pgm(raw)
    if len(raw) < _SHIM_HEADER.size:
        raise UsageError(f"{path}: image header truncated")
    magic, version, n, dtype = _SHIM_HEADER.unpack_from(raw)
    if magic != SHIM_MAGIC:
        raise UsageError(f"{path}: not an image file")
    if version != SHIM_VERSION:
        raise UsageError(f"{path}: unsupported image version {version}")
    if dtype != SHIM_F64:
        raise UsageError(f"{path}: unsupported dtype code {dtype}")
    need = _SHIM_HEADER.size + 8 * n * n
    if len(raw) != need:
        raise UsageError(f"{path}: image payload has {len(raw)} bytes, expected {need}")
    return np.frombuffer(raw, "<f8", n * n, _SHIM_HEADER.size).reshape(n, n).astype(float)


def _pgm_tokens(raw: bytes, count: int) -> tuple[list[int], int]:
    tokens, pos = [], 2
    while len(tokens) < count:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and raw[pos:pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise UsageError("malformed PGM header")
        tokens.append(int(raw[start:pos]))
    return tokens, pos + 1


def parse_pgm(raw: bytes) -> np.ndarray:
    """Binary greyscale PGM, 8 or 16 bit, mapped affinely from ``[0, maxval]`` to ``[0, 1]``."""
    (width, height, maxval), pos = _pgm_tokens(raw, 3)
    if not 0 < maxval < 65536:
        raise UsageError(f"PGM maxval {maxval} out of range")
    dtype = ">u2" if maxval > 255 else "u1"
    count = width * height
    if len(raw) - pos < count * np.dtype(dtype).itemsize:
        raise UsageError("PGM payload truncated")
    data = np.frombuffer(raw, dtype, count, pos).reshape(height, width)
    return data.astype(float) / maxval


def write_pgm(path, img, maxval: int = 65535) -> None:
    """Write ``img`` (values in ``[0, 1]``) as a binary PGM."""
    img = np.clip(np.asarray(img, dtype=float), 0.0, 1.0)
    dtype = ">u2" if maxval > 255 else "u1"
    data = np.rint(img * maxval).astype(dtype)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode())
        fh.write(data.tobytes())


# ---------------------------------------------------------------- coefficients

SHCF_MAGIC = b"SHCF"
SHCF_VERSION = 1
TRANSFORM_IDS = {"fdst": 1, "dsst": 2, "dnst": 3, "dnst-undecimated": 4}
_TRANSFORM_NAMES = {v: k for k, v in TRANSFORM_IDS.items()}
_SHCF_HEADER = struct.Struct("<4sHBddddB")
_SHCF_COUNT = struct.Struct("<I")
_SHCF_ENTRY = struct.Struct("<iiiIIQ")
LOW = -1


@dataclass
class CoeffFile:
    """Contents of a coefficient file; ``bands`` keeps directory order."""

    transform: str
    n: int
    scale_param: int
    c1: float = 0.0
    c2: float = 0.0
    weight_choice: int = 0
    bands: dict[tuple[int, int, int], np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.transform not in TRANSFORM_IDS:
            raise UsageError(f"unknown transform {self.transform!r}")
        self.bands = {tuple(int(v) for v in key): np.asarray(a, dtype=np.complex64)
                      for key, a in self.bands.items()}

    @property
    def method(self) -> str:
        return self.transform.split("-")[0]

    @property
    def undecimated(self) -> bool:
        return self.transform == "dnst-undecimated"

    @property
    def header_size(self) -> int:
        return _SHCF_HEADER.size + _SHCF_COUNT.size + len(self.bands) * _SHCF_ENTRY.size

    def directory(self) -> list[tuple[tuple[int, int, int], int, int, int]]:
        """``(key, rows, cols, offset)`` per band."""
        out, pos = [], self.header_size
        for key, a in self.bands.items():
            out.append((key, a.shape[0], a.shape[1], pos))
            pos += a.size * 8
        return out

    def to_bytes(self) -> bytes:
        parts = [
            _SHCF_HEADER.pack(SHCF_MAGIC, SHCF_VERSION, TRANSFORM_IDS[self.transform],
                              float(self.n), float(self.scale_param), float(self.c1),
                              float(self.c2), self.weight_choice),
            _SHCF_COUNT.pack(len(self.bands)),
        ]
        for key, rows, cols, off in self.directory():
            parts.append(_SHCF_ENTRY.pack(*key, rows, cols, off))
        parts += [np.ascontiguousarray(a, dtype="<c8").tobytes() for a in self.bands.values()]
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, raw: bytes) -> CoeffFile:
        fixed = _SHCF_HEADER.size + _SHCF_COUNT.size
        if len(raw) < fixed:
            raise UsageError("coefficient header truncated")
        magic, version, tid, n, sp, c1, c2, choice = _SHCF_HEADER.unpack_from(raw)
        if magic != SHCF_MAGIC:
            raise UsageError("not a coefficient file")
        if version != SHCF_VERSION:
            raise UsageError(f"unsupported coefficient file version {version}")
        if tid not in _TRANSFORM_NAMES:
            raise UsageError(f"unknown transform id {tid}")
        (count,) = _SHCF_COUNT.unpack_from(raw, _SHCF_HEADER.size)
        end = fixed + count * _SHCF_ENTRY.size
        if len(raw) < end:
            raise UsageError(f"band directory out of bounds: {count} entries need {end} bytes, "
                             f"file has {len(raw)}")
        bands, pos = {}, end
        for i in range(count):
            *key, rows, cols, off = _SHCF_ENTRY.unpack_from(raw, fixed + i * _SHCF_ENTRY.size)
            size = rows * cols * 8
            if off != pos:
                raise UsageError(f"band {i} offset {off} overlaps or leaves a gap (expected {pos})")
            if off + size > len(raw):
                raise UsageError(f"band {i} {tuple(key)} exceeds file bounds: bytes "
                                 f"[{off}, {off + size}) of {len(raw)}")
            if tuple(key) in bands:
                raise UsageError(f"duplicate band {tuple(key)}")
            bands[tuple(key)] = np.frombuffer(raw, "<c8", rows * cols, off).reshape(rows, cols)
            pos = off + size
        if pos != len(raw):
            raise UsageError(f"{len(raw) - pos} trailing bytes after the last band")
        return cls(_TRANSFORM_NAMES[tid], int(n), int(sp), c1, c2, choice, bands)


def write_coeffs(path, cf: CoeffFile) -> None:
    Path(path).write_bytes(cf.to_bytes())


def read_coeffs(path) -> CoeffFile:
    try:
        return CoeffFile.from_bytes(Path(path).read_bytes())
    except UsageError as exc:
        raise UsageError(f"{path}: {exc}") from None


# ---------------------------------------------------------------- transforms

@dataclass(frozen=True)
class TransformSpec:
    """Everything needed to rebuild a transform; recoverable from a file header."""

    method: str
    n: int
    oversampling: int = 8
    weights: int = 1
    scales: int = 0
    c1: float = 1.0
    c2: float = 1.0
    undecimated: bool = False

    @classmethod
    def resolve(cls, method: str, n: int, oversampling=None, weights=None, scales=None,
                c1=None, c2=None, undecimated=False) -> TransformSpec:
        """Fill defaults and reject flags that do not apply to ``method``."""
        if method not in ("fdst", "dsst", "dnst"):
            raise UsageError(f"unknown method {method!r}")
        fdst_only = {"--oversampling": oversampling, "--weights": weights}
        cart_only = {"--scales": scales, "--c1": c1, "--c2": c2}
        wrong = fdst_only if method != "fdst" else cart_only
        bad = [flag for flag, v in wrong.items() if v is not None]
        if undecimated and method != "dnst":
            bad.append("--undecimated")
        if bad:
            raise UsageError(f"{', '.join(bad)} not valid with --method {method}")
        if method == "fdst":
            if weights not in (None, 0, 1, 2):
                raise UsageError("--weights must be 0, 1 or 2")
            return cls(method, n, oversampling or 8, 1 if weights is None else weights)
        return cls(method, n, scales=scales or default_scales(n),
                   c1=1.0 if c1 is None else c1, c2=1.0 if c2 is None else c2,
                   undecimated=undecimated)

    @classmethod
    def from_file(cls, cf: CoeffFile) -> TransformSpec:
        if cf.method == "fdst":
            return cls("fdst", cf.n, cf.scale_param, cf.weight_choice)
        return cls(cf.method, cf.n, scales=cf.scale_param, c1=cf.c1, c2=cf.c2,
                   undecimated=cf.undecimated)

    @property
    def transform_name(self) -> str:
        return "dnst-undecimated" if self.undecimated else self.method

    def plan(self):
        if self.method == "fdst":
            return _fdst.FdstPlan.create(self.n, self.oversampling, self.weights)
        if self.method == "dsst":
            return _dsst.DsstPlan(self.n, self.scales, self.c1, self.c2)
        return _dnst.dnst_filters(self.scales, self.n)

    def empty_file(self) -> CoeffFile:
        if self.method == "fdst":
            return CoeffFile("fdst", self.n, self.oversampling, 0.0, 0.0, self.weights)
        return CoeffFile(self.transform_name, self.n, self.scales, self.c1, self.c2, 0)


def analyze(img, spec: TransformSpec) -> CoeffFile:
    """Forward transform of ``img`` packed into a :class:`CoeffFile`."""
    img = check_image(img, spec.n)
    plan = spec.plan()
    cf = spec.empty_file()
    if spec.method == "fdst":
        c = _fdst.fdst_forward(img, plan)
        cf.bands = {(0, LOW, s + 1): a for s, a in enumerate(c.scaling)}
        cf.bands.update(c.bands)
    else:
        if spec.method == "dsst":
            c = _dsst.dsst_forward(img, plan)
        elif spec.undecimated:
            c = _dnst.dnst_forward(img, plan)
        else:
            c = _dnst.dnst_decimated(img, plan, spec.c1, spec.c2)
        cf.bands = {(0, LOW, 0): c.low}
        cf.bands.update({key: c.bands[key] for key in sorted(c.bands)})
    cf.__post_init__()
    return cf


def unpack(cf: CoeffFile, plan):
    """Coefficient object of the transform module, checked against ``plan``."""
    if cf.method == "fdst":
        lay = plan.layout
        want = {(0, LOW, 1): lay.scaling_shape, (0, LOW, 2): lay.scaling_shape}
        want.update({b.key: b.shape for b in lay.bands})
        _check_directory(cf, want)
        bands = {k: cf.bands[k].astype(complex) for k in want}
        return FDSTCoeffs(lay, [bands.pop((0, LOW, 1)), bands.pop((0, LOW, 2))], bands)
    bands = {k: a.real.astype(float) for k, a in cf.bands.items()}
    if (0, LOW, 0) not in bands:
        raise UsageError("lowpass band missing")
    low = bands.pop((0, LOW, 0))
    keys = plan.keys
    if set(bands) != set(keys):
        raise UsageError("band keys do not match the transform parameters")
    cls = _dsst.DSSTCoeffs if cf.method == "dsst" else _dnst.DNSTCoeffs
    return cls(bands, low)


def _check_directory(cf: CoeffFile, want: dict) -> None:
    if set(cf.bands) != set(want):
        raise UsageError("band keys do not match the transform parameters")
    for key, shape in want.items():
        if cf.bands[key].shape != tuple(shape):
            raise UsageError(f"band {key} has shape {cf.bands[key].shape}, expected {shape}")


def synthesize(cf: CoeffFile, mode: str = "cg", tol: float | None = None,
               maxiter: int | None = None) -> np.ndarray:
    """Image from coefficients by adjoint, CG least squares or dual filters."""
    spec = TransformSpec.from_file(cf)
    plan = spec.plan()
    c = unpack(cf, plan)
    if mode == "dual" and not spec.undecimated:
        raise UsageError("--mode dual needs undecimated DNST coefficients")
    if mode not in ("adjoint", "cg", "dual"):
        raise UsageError(f"unknown mode {mode!r}")
    kw = {k: v for k, v in (("tol", tol), ("maxiter", maxiter)) if v is not None}
    if spec.method == "fdst":
        if mode == "adjoint":
            return _fdst.fdst_adjoint(c, plan).real
        return _converged(_fdst.fdst_inverse_cg(c, plan, **kw))
    if spec.method == "dsst":
        if mode == "adjoint":
            return _dsst.dsst_adjoint(c, plan)
        return _converged(_dsst.dsst_inverse_cg(c, plan, **kw))
    if mode == "dual":
        return _dnst.dnst_reconstruct(c, plan)
    if not spec.undecimated:
        if mode == "adjoint":
            return _dnst.dnst_decimated_adjoint(c, plan, spec.c1, spec.c2)
        return _converged(_dnst.dnst_inverse_cg(c, plan, spec.c1, spec.c2, **kw))
    if mode == "adjoint":
        return _dnst.dnst_adjoint(c, plan)
    b = _dnst.dnst_adjoint(c, plan)
    kw.setdefault("tol", 1e-10)
    return _converged(conjugate_gradient(
        lambda x: _dnst.dnst_adjoint(_dnst.dnst_forward(x, plan), plan), b, **kw))


def _converged(res: CgResult) -> np.ndarray:
    if not res.converged:
        raise NumericalError(f"conjugate gradients stopped after {res.iterations} iterations "
                             f"at relative residual {res.residuals[-1]:.2e}")
    return res.image


def element_picture(spec: TransformSpec, cone: int, j: int, k: int) -> np.ndarray:
    """Spatial picture (real part) of one analyzing element at the image center."""
    plan = spec.plan()
    if spec.method == "fdst":
        try:
            return _fdst.shearlet_image(plan, cone, j, k).real
        except KeyError:
            raise UsageError(f"no FDST band ({cone}, {j}, {k})") from None
    if spec.method == "dnst":
        if (cone, j, k) not in plan.spectra:
            raise UsageError(f"no DNST band ({cone}, {j}, {k})")
        return plan.taps((cone, j, k))
    c = _dsst.dsst_forward(np.zeros((spec.n, spec.n)), plan)
    if (cone, j, k) not in c.bands:
        raise UsageError(f"no DSST band ({cone}, {j}, {k})")
    band = c.bands[(cone, j, k)]
    band[band.shape[0] // 2, band.shape[1] // 2] = 1.0
    return _dsst.dsst_adjoint(c, plan)


def describe(cf: CoeffFile) -> list[str]:
    """Header and directory as text, enough to rebuild the band layout."""
    lines = [f"transform {cf.transform}", f"n {cf.n}",
             f"{'oversampling' if cf.method == 'fdst' else 'scales'} {cf.scale_param}"]
    if cf.method == "fdst":
        lines.append(f"weights {cf.weight_choice}")
    else:
        lines += [f"c1 {cf.c1!r}", f"c2 {cf.c2!r}"]
    total = sum(a.size for a in cf.bands.values())
    lines += [f"bands {len(cf.bands)}", f"coefficients {total}",
              f"redundancy {total / cf.n**2:.6g}", "cone j k rows cols offset"]
    lines += [f"{key[0]} {key[1]} {key[2]} {r} {c} {off}" for key, r, c, off in cf.directory()]
    return lines


def fdst_band_count(n: int, r: int) -> int:
    """Arrays in an FDST coefficient file: two scaling arrays plus the layout bands."""
    return 2 + len(layout(PPGridParams(n, r)).bands)


# ---------------------------------------------------------------- command line

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def read_config(path) -> dict[str, str]:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for num, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _method_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--oversampling", type=int, help="radial oversampling R (fdst)")
    p.add_argument("--weights", type=int, help="weight choice 0, 1 or 2 (fdst)")
    p.add_argument("--scales", type=int, help="number of scales J (dsst, dnst)")
    p.add_argument("--c1", type=float, help="sampling constant along the first axis")
    p.add_argument("--c2", type=float, help="sampling constant along the second axis")
    p.add_argument("--undecimated", action="store_true", help="keep full-size DNST bands")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="digishear", description="Digital shearlet transforms.")
    parser.add_argument("--config", help="key=value file; flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", help="forward transform of an image file")
    p.add_argument("--method", required=True, choices=("fdst", "dsst", "dnst"))
    p.add_argument("--input", required=True, help="SHIM image or binary PGM")
    p.add_argument("--output", required=True, help="SHCF coefficient file")
    _method_flags(p)
    p.set_defaults(handler=_cmd_transform)

    p = sub.add_parser("inverse", help="image from a coefficient file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--mode", default="cg", choices=("adjoint", "cg", "dual"))
    p.add_argument("--tol", type=float)
    p.add_argument("--maxiter", type=int)
    p.set_defaults(handler=_cmd_inverse)

    p = sub.add_parser("weights", help="fit and cache pseudo-polar weights")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=8)
    p.add_argument("--choice", type=int, default=1, choices=(0, 1, 2))
    p.add_argument("--out", help="also write the table to this SHWT file")
    p.add_argument("--condition", action="store_true", help="print cond(P* w P)")
    p.set_defaults(handler=_cmd_weights)

    p = sub.add_parser("measure", help="run performance measures")
    p.add_argument("--id", default="all", help="1..8 or all")
    p.add_argument("--method", default="fdst", choices=TRANSFORMS)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--scales", type=int)
    p.add_argument("--oversampling", type=int, default=8)
    p.add_argument("--weights", type=int, default=1)
    p.add_argument("--out-dir", help="write CSV and JSON reports here")
    p.set_defaults(handler=_cmd_measure)

    p = sub.add_parser("shearlet-image", help="picture of one analyzing element")
    p.add_argument("--method", required=True, choices=("fdst", "dsst", "dnst"))
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--cone", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    _method_flags(p)
    p.set_defaults(handler=_cmd_shearlet_image)

    p = sub.add_parser("info", help="print a coefficient file header and directory")
    p.add_argument("--input", required=True)
    p.set_defaults(handler=_cmd_info)
    return parser


def _spec_from_args(args, n: int) -> TransformSpec:
    return TransformSpec.resolve(args.method, n, args.oversampling, args.weights, args.scales,
                                 args.c1, args.c2, _bool(args.undecimated))


def _cmd_transform(args) -> None:
    img = read_image(args.input)
    write_coeffs(args.output, analyze(img, _spec_from_args(args, img.shape[0])))


def _cmd_inverse(args) -> None:
    write_image(args.output, synthesize(read_coeffs(args.input), args.mode, args.tol, args.maxiter))


def _cmd_weights(args) -> None:
    params = PPGridParams(args.n, args.r)
    w = weights_for(params, args.choice) if args.choice else unit_weights(params)
    if args.out:
        save_weights(w, args.out)
    print(f"weights n={args.n} r={args.r} choice={args.choice} basis={len(w.coefficients)}")
    if args.condition:
        hi, lo, cond = gram_condition(w)
        print(f"lambda_max {hi:.6g} lambda_min {lo:.6g} condition {cond:.6g}")


def _cmd_measure(args) -> None:
    ids = sorted(MEASURES) if args.id == "all" else [int(args.id)]
    cfg = MeasureConfig(args.method, args.size, args.seed, args.trials, args.oversampling,
                        args.weights, args.scales)
    for mid in ids:
        report = run_measure(mid, cfg)
        for name, value in report.values.items():
            print(f"M{mid} {report.name} {name} {value:.6g}")
        if args.out_dir:
            report.write(args.out_dir)


def _cmd_shearlet_image(args) -> None:
    spec = _spec_from_args(args, args.size)
    write_image(args.out, element_picture(spec, args.cone, args.j, args.k))


def _cmd_info(args) -> None:
    print("\n".join(describe(read_coeffs(args.input))))


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    seen = set()
    for sp in subs.choices.values():
        dests = {a.dest for a in sp._actions}
        mine = {k: v for k, v in values.items() if k in dests}
        sp.set_defaults(**mine)
        for action in sp._actions:
            if action.dest in mine:
                # required options are satisfied by the file
                action.required = False
        seen |= set(mine)
    unknown = sorted(set(values) - seen)
    if unknown:
        raise UsageError(f"{known.config}: unknown keys {', '.join(unknown)}")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        args.handler(args)
    except NumericalError as exc:
        print(f"digishear: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OSError) as exc:
        print(f"digishear: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # --help exits through argparse
        return int(exc.code or 0)
    return 0


cli_main = main

if __name__ == "__main__":
    sys.exit(main())
