"""Plain-text formats for families, pilot manifests, channels and vectors.

Complex numbers are written as ``re+imj`` with round-trip float precision
and parsed back with :class:`complex`. Lines starting with ``#`` are headers
or comments.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from pilotcs.channel import SparseChannel
from pilotcs.seqgen import FamilyKind, PeriodicSequence, SequenceFamily


def format_complex(z) -> str:
    z = complex(z)
    im = repr(z.imag)
    if not im.startswith("-"):
        im = "+" + im
    return f"{z.real!r}{im}j"


def parse_complex(s: str) -> complex:
    return complex(s.strip().replace(" ", ""))


def _header_fields(line: str) -> dict:
    out = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k] = v
    return out


def _data_lines(text: str):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def format_family(family: SequenceFamily) -> str:
    theta_c = "none" if family.theta_c is None else repr(family.theta_c)
    lines = [f"# kind={family.family_kind.value} M={family.period} T={len(family)} "
             f"theta_a={family.theta_a!r} theta_c={theta_c}"]
    for seq in family:
        lines.append(",".join(format_complex(v) for v in seq.values))
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> SequenceFamily:
    kind = FamilyKind.CUSTOM
    for line in text.splitlines():
        if line.startswith("#"):
            kind = FamilyKind(_header_fields(line).get("kind", kind.value))
            break
    seqs = [PeriodicSequence([parse_complex(tok) for tok in line.split(",")])
            for line in _data_lines(text)]
    return SequenceFamily.build(seqs, kind)


def format_manifest(plan) -> str:
    head = f"# M={plan.M} L={plan.L} t={plan.t} q={plan.q}\n# transmitter, base, shift\n"
    return head + "\n".join(plan.manifest_lines()) + "\n"


def parse_manifest(text: str) -> list:
    return [tuple(int(tok) for tok in line.split(",")) for line in _data_lines(text)]


def format_channel(ch: SparseChannel) -> str:
    lines = [f"# N={ch.length} K={ch.K} (0-based index, coefficient)"]
    lines += [f"{i}, {format_complex(c)}" for i, c in zip(ch.support, ch.coefficients)]
    return "\n".join(lines) + "\n"


def parse_channel(text: str, N: int = None) -> SparseChannel:
    for line in text.splitlines():
        if line.startswith("#") and "N=" in line:
            N = int(_header_fields(line)["N"]) if N is None else N
            break
    idx, coefs = [], []
    for line in _data_lines(text):
        i, c = line.split(",", 1)
        idx.append(int(i))
        coefs.append(parse_complex(c))
    if N is None:
        raise ValueError("channel length unknown: no N= header and none given")
    return SparseChannel(N, np.array(idx, dtype=np.int64), np.array(coefs, dtype=np.complex128))


def format_vector(v) -> str:
    return "\n".join(format_complex(z) for z in np.asarray(v).ravel()) + "\n"


def parse_vector(text: str) -> np.ndarray:
    return np.array([parse_complex(line) for line in _data_lines(text)], dtype=np.complex128)


def read_text(path) -> str:
    return Path(path).read_text()


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
