"""Text formats: complex literals, CSV rows, loop export."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SpecError

LOOP_HEADER = ("theta", "re", "im", "d_re", "d_im", "loop")
POINT_HEADER = ("re_z", "im_z", "re_w", "im_w")
RASTER_HEADER = ("re_z", "im_z", "re_w", "im_w", "label")
EXTEND_HEADER = POINT_HEADER + ("re_F", "im_F", "method", "err_est", "label", "status")


def fmt(x) -> str:
    """17 significant digits: round-trips every double."""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def parse_complex(text: str) -> complex:
    """Accept "re,im" or a literal such as "3+0i", "2.5j", "-1e-3".

    >>> parse_complex("3,0"), parse_complex("3+0i")
    ((3+0j), (3+0j))
    """
    s = text.strip()
    try:
        if "," in s:
            re, im = s.split(",")
            return complex(float(re), float(im))
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise SpecError(f"cannot parse complex number {text!r}") from exc


def parse_point(text: str) -> tuple[complex, complex]:
    parts = text.split(",")
    if len(parts) != 4:
        raise SpecError(f"a point is re_z,im_z,re_w,im_w; got {text!r}")
    try:
        rz, iz, rw, iw = (float(p) for p in parts)
    except ValueError as exc:
        raise SpecError(f"bad number in point {text!r}") from exc
    return complex(rz, iz), complex(rw, iw)


def read_points_csv(path) -> list[tuple[complex, complex]]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(POINT_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise SpecError(f"point file {path} lacks columns {sorted(missing)}")
        return [
            (complex(float(r["re_z"]), float(r["im_z"])), complex(float(r["re_w"]), float(r["im_w"])))
            for r in reader
        ]


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(path, text: str) -> None:
    """Write atomically: a failed run never leaves a partial file behind."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def loop_rows(loop, tag: str | None = None):
    tag = tag or loop.branch
    for t, p, d in zip(loop.theta, loop.position, loop.derivative):
        yield (t, p.real, p.imag, d.real, d.imag, tag)


def complex_json(z: complex) -> list[float]:
    z = complex(z)
    return [float(np.real(z)), float(np.imag(z))]
