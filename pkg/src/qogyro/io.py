"""Deterministic CSV and key-value output."""

import math
import os
import tempfile

TRAJECTORY_HEADER = "t,re_u1,im_u1,re_u2,im_u2,abs_u1,abs_u2"
SENSITIVITY_HEADER = "t,delta_omega,flag"
SWEEP_HEADER = "param,value,min_delta_omega,t_at_min,flag"


def fmt(x) -> str:
    """Lower-case scientific notation with 17 significant digits."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def csv_text(header, columns, stride=1) -> str:
    lines = [header]
    n = len(columns[0])
    for i in range(0, n, stride):
        lines.append(",".join(c[i] if isinstance(c[i], str) else fmt(c[i]) for c in columns))
    return "\n".join(lines) + "\n"


def sensitivity_csv(series, stride=1) -> str:
    return csv_text(SENSITIVITY_HEADER, [series.times, series.delta_omega, list(series.flags)], stride)


def key_value_text(rows) -> str:
    out = []
    for key, val in rows:
        if isinstance(val, bool):
            out.append(f"{key} = {'true' if val else 'false'}")
        elif isinstance(val, (str, int)):
            out.append(f"{key} = {val}")
        else:
            out.append(f"{key} = {fmt(val)}")
    return "\n".join(out) + "\n"


def write_all(outdir, files):
    """Write {name: text} into ``outdir``; nothing lands unless every file is staged."""
    os.makedirs(outdir, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=outdir, prefix=".staging-")
            staged.append((tmp, os.path.join(outdir, name)))
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, dest in staged:
        os.replace(tmp, dest)
    return [dest for _, dest in staged]
