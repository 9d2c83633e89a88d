"""Import of the TSPLIB CVRP subset.

Supported: TYPE CVRP, EDGE_WEIGHT_TYPE EUC_2D (distances rounded with
the TSPLIB nint convention) or EXPLICIT with EDGE_WEIGHT_FORMAT
FULL_MATRIX, DEMAND_SECTION, CAPACITY, and DEPOT_SECTION. The file's
depot is recorded as an annotation only; depot placement stays free.
The vehicle budget k is taken from a "-k<int>" suffix in NAME, else
from a truck count in COMMENT, else 1.
"""

from __future__ import annotations

import math
import re

import numpy as np

from medforest.errors import ParseError
from medforest.instance import Instance

_TRUCKS_RE = re.compile(r"(?:no\s+of\s+trucks|trucks)\s*[:,]?\s*(\d+)", re.IGNORECASE)
_NAME_K_RE = re.compile(r"-k(\d+)\b", re.IGNORECASE)


def _nint(x: float) -> float:
    """TSPLIB integer rounding: floor(x + 0.5)."""
    return float(math.floor(x + 0.5))


class _Reader:
    def __init__(self, path: str):
        self.path = path
        try:
            with open(path, "r", encoding="utf-8") as fh:
                self.lines = fh.read().splitlines()
        except OSError as exc:
            raise ParseError(str(exc), path)
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.path, self.pos)

    def next_line(self) -> str | None:
        while self.pos < len(self.lines):
            line = self.lines[self.pos].strip()
            self.pos += 1
            if line:
                return line
        return None

    def tokens(self, count: int, context: str) -> list[str]:
        """Collect whitespace-separated tokens across lines."""
        out: list[str] = []
        while len(out) < count:
            line = self.next_line()
            if line is None:
                raise self.error(f"unexpected end of file inside {context}")
            out.extend(line.split())
        if len(out) > count:
            raise self.error(f"{context} has {len(out) - count} surplus values")
        return out


def import_tsplib_cvrp(path: str) -> Instance:
    """Parse one TSPLIB CVRP file into a native instance."""
    rd = _Reader(path)
    header: dict[str, str] = {}
    coords: np.ndarray | None = None
    matrix: np.ndarray | None = None
    demands: dict[int, float] = {}
    depots: list[int] = []
    n: int | None = None

    def need_n(context: str) -> int:
        if n is None:
            raise rd.error(f"{context} before DIMENSION")
        return n

    while True:
        line = rd.next_line()
        if line is None or line.upper() == "EOF":
            break
        if ":" in line and not line.upper().endswith("SECTION"):
            key, _, value = line.partition(":")
            key = key.strip().upper()
            header[key] = value.strip()
            if key == "DIMENSION":
                try:
                    n = int(header[key])
                except ValueError:
                    raise rd.error(f"DIMENSION {header[key]!r} is not an integer")
                if n < 1:
                    raise rd.error(f"DIMENSION {n} must be positive")
            continue
        section = line.upper()
        if section == "NODE_COORD_SECTION":
            count = need_n(section)
            coords = np.zeros((count, 2))
            seen = set()
            for _ in range(count):
                parts = rd.tokens(3, "a coordinate row")
                try:
                    idx = int(parts[0]) - 1
                    coords[idx] = (float(parts[1]), float(parts[2]))
                except (ValueError, IndexError):
                    raise rd.error(f"bad coordinate row {parts!r}")
                seen.add(idx)
            if len(seen) != count:
                raise rd.error("duplicate or missing coordinate ids")
        elif section == "DEMAND_SECTION":
            count = need_n(section)
            for _ in range(count):
                parts = rd.tokens(2, "a demand row")
                try:
                    demands[int(parts[0]) - 1] = float(parts[1])
                except ValueError:
                    raise rd.error(f"bad demand row {parts!r}")
        elif section == "DEPOT_SECTION":
            done = False
            while not done:
                line = rd.next_line()
                if line is None:
                    raise rd.error("DEPOT_SECTION not terminated by -1")
                for tok in line.split():
                    try:
                        val = int(tok)
                    except ValueError:
                        raise rd.error(f"bad depot id {tok!r}")
                    if val == -1:
                        done = True
                        break
                    depots.append(val - 1)
        elif section == "EDGE_WEIGHT_SECTION":
            count = need_n(section)
            fmt = header.get("EDGE_WEIGHT_FORMAT", "").upper()
            if fmt != "FULL_MATRIX":
                raise rd.error(
                    f"unsupported EDGE_WEIGHT_FORMAT {fmt or '<missing>'!r}; "
                    "only FULL_MATRIX is supported"
                )
            values = rd.tokens(count * count, "EDGE_WEIGHT_SECTION")
            try:
                matrix = np.array([float(v) for v in values]).reshape(count, count)
            except ValueError as exc:
                raise rd.error(f"bad edge weight: {exc}")
        else:
            raise rd.error(f"unsupported section or malformed line {line!r}")

    return _assemble(rd, header, n, coords, matrix, demands, depots)


def _assemble(rd, header, n, coords, matrix, demands, depots) -> Instance:
    if (header.get("TYPE") or "").upper() != "CVRP":
        raise ParseError(
            f"TYPE {header.get('TYPE', '<missing>')!r} is not CVRP", rd.path
        )
    if n is None:
        raise ParseError("missing DIMENSION", rd.path)
    if "CAPACITY" not in header:
        raise ParseError("missing CAPACITY", rd.path)
    try:
        Q = float(header["CAPACITY"])
    except ValueError:
        raise ParseError(f"CAPACITY {header['CAPACITY']!r} is not a number", rd.path)

    ewt = (header.get("EDGE_WEIGHT_TYPE") or "").upper()
    if ewt == "EUC_2D":
        if coords is None:
            raise ParseError("EUC_2D requires NODE_COORD_SECTION", rd.path)
        d = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                dist = _nint(math.hypot(
                    coords[i, 0] - coords[j, 0], coords[i, 1] - coords[j, 1]
                ))
                d[i, j] = d[j, i] = dist
    elif ewt == "EXPLICIT":
        if matrix is None:
            raise ParseError("EXPLICIT requires EDGE_WEIGHT_SECTION", rd.path)
        d = matrix
    else:
        raise ParseError(
            f"unsupported EDGE_WEIGHT_TYPE {ewt or '<missing>'!r}; "
            "only EUC_2D and EXPLICIT are supported",
            rd.path,
        )

    if set(demands) != set(range(n)):
        missing = sorted(set(range(n)) - set(demands))[:5]
        raise ParseError(f"DEMAND_SECTION incomplete (missing ids {missing})", rd.path)
    q = [demands[i] for i in range(n)]

    name = header.get("NAME", "")
    k = 1
    m = _NAME_K_RE.search(name)
    if m:
        k = int(m.group(1))
    else:
        m = _TRUCKS_RE.search(header.get("COMMENT", ""))
        if m:
            k = int(m.group(1))

    meta = {"source": "tsplib", "name": name, "depots": depots}
    if header.get("COMMENT"):
        meta["comment"] = header["COMMENT"]
    if coords is not None:
        meta["coords"] = [[float(x), float(y)] for x, y in coords]
    return Instance(q=q, d=d, k=k, Q=Q, meta=meta)
