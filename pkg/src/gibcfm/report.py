"""Writers for indicator maps: CSV table and 8-bit PGM image."""

import numpy as np

CSV_HEADER = "x,y,W,w_mono,w_dip,alpha_mono"


def format_csv(imap):
    pts = imap.points()
    cols = [imap.W.ravel(), imap.w_mono.ravel(), imap.w_dip.ravel(), imap.alpha_mono.ravel()]
    lines = [CSV_HEADER]
    for idx, (x, y) in enumerate(pts):
        vals = ",".join("%.17g" % c[idx] for c in cols)
        lines.append(f"{x:.17g},{y:.17g},{vals}")
    return "\n".join(lines) + "\n"


def write_csv(imap, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_csv(imap))


def read_csv(path):
    """Return the CSV body as a float array with the six header columns."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        return np.loadtxt(fh, delimiter=",", ndmin=2)


def pgm_bytes(imap):
    """P5 image of ``log10 W`` scaled to 0..255 over the map's own range.

    The first image row is the largest ``y`` so the picture is upright.
    """
    logw = np.log10(imap.W)
    lo, hi = float(logw.min()), float(logw.max())
    scaled = np.zeros_like(logw) if hi == lo else (logw - lo) / (hi - lo) * 255.0
    img = np.clip(np.rint(scaled), 0, 255).astype(np.uint8)[::-1]
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def write_pgm(imap, path):
    with open(path, "wb") as fh:
        fh.write(pgm_bytes(imap))


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h = (int(v) for v in parts[1].split())
    if int(parts[2]) != 255:
        raise ValueError("expected maxval 255")
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)
