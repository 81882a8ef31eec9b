"""Coset-table serialization: JSON lines with a (p, d, m, k, backend) header.

Each record lists the base-p digit expansion of the coset representative
(scaled by p^m, so digits are plain integers) per coordinate, plus a value
that is a rational string in exact mode or a complex pair in float mode.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .schwartz import SchwartzFunction


def _digits(n: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        n, r = divmod(n, p)
        out.append(r)
    return out


def _undigits(ds, p: int) -> int:
    n = 0
    for d in reversed(ds):
        n = n * p + d
    return n


def save_table(f: SchwartzFunction, path: str):
    ctx = f.ctx
    p = ctx.p
    table, m, k = f.materialize()
    width = m + k
    with open(path, "w", encoding="utf-8") as fh:
        header = {"p": p, "d": f.d, "m": m, "k": k, "backend": ctx.backend}
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rep in sorted(table, key=lambda r: tuple(map(str, r))):
            val = table[rep]
            scaled = [int(Fraction(x) * p ** m) for x in rep]
            rec = {"digits": [_digits(s, p, width) for s in scaled]}
            if ctx.backend == "exact":
                rec["value"] = str(val.as_rational())
            else:
                rec["value"] = [val.z.real, val.z.imag]
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_table(ctx, path: str) -> SchwartzFunction:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header["p"] != ctx.p:
            raise ValueError(f"table is for p={header['p']}, session p={ctx.p}")
        if header["backend"] != ctx.backend:
            raise ValueError("table backend does not match the session")
        d, m, k = header["d"], header["m"], header["k"]
        entries = {}
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            rep = tuple(Fraction(_undigits(ds, ctx.p), ctx.p ** m)
                        for ds in rec["digits"])
            if ctx.backend == "exact":
                entries[rep] = ctx.rat(Fraction(rec["value"]))
            else:
                from .scalars import Scalar
                re_, im = rec["value"]
                entries[rep] = Scalar(ctx, z=complex(re_, im))
    return SchwartzFunction.from_table(ctx, d, entries, k)
