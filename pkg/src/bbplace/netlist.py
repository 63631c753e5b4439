"""Problem instances: modules, pins, hyperedge nets and the canvas.

Pin offsets are relative to the owning module's center (Bookshelf
convention); placements store lower-left corners.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

MACRO = "macro"
STDCELL = "stdcell"
TERMINAL = "terminal"
KINDS = (MACRO, STDCELL, TERMINAL)


class NetlistError(ValueError):
    """Raised for structurally invalid instances."""


class BookshelfError(NetlistError):
    def __init__(self, msg, path=None, lineno=None):
        where = ""
        if path is not None:
            where = os.path.basename(str(path))
            if lineno is not None:
                where += f":{lineno}"
            where += ": "
        super().__init__(where + msg)
        self.path = path
        self.lineno = lineno


class SchemaError(NetlistError):
    def __init__(self, msg, pointer=""):
        super().__init__(f"{pointer or '/'}: {msg}")
        self.pointer = pointer


@dataclass(frozen=True)
class Canvas:
    x: float
    y: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise NetlistError(f"canvas must have positive extent, got {self.width}x{self.height}")

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def half_perimeter(self) -> float:
        return self.width + self.height


@dataclass
class Netlist:
    """Immutable problem instance (only ``macro_ids`` may be reassigned).

    Nets are stored in CSR form: the pins of net ``e`` are
    ``net_pins[net_ptr[e]:net_ptr[e + 1]]``.
    """

    names: list
    width: np.ndarray
    height: np.ndarray
    kind: np.ndarray
    fixed: np.ndarray
    x: np.ndarray
    y: np.ndarray
    pin_owner: np.ndarray
    pin_dx: np.ndarray
    pin_dy: np.ndarray
    net_ptr: np.ndarray
    net_pins: np.ndarray
    canvas: Canvas
    macro_ids: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    name: str = "netlist"
    net_names: list | None = None

    def __post_init__(self):
        self.width = np.asarray(self.width, dtype=np.float64)
        self.height = np.asarray(self.height, dtype=np.float64)
        self.kind = np.asarray(self.kind, dtype="<U8")
        self.fixed = np.asarray(self.fixed, dtype=bool)
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        self.pin_owner = np.asarray(self.pin_owner, dtype=np.int64)
        self.pin_dx = np.asarray(self.pin_dx, dtype=np.float64)
        self.pin_dy = np.asarray(self.pin_dy, dtype=np.float64)
        self.net_ptr = np.asarray(self.net_ptr, dtype=np.int64)
        self.net_pins = np.asarray(self.net_pins, dtype=np.int64)
        self.macro_ids = np.asarray(self.macro_ids, dtype=np.int64)
        self.validate()
        self._pin_net = None
        self._module_pins = None

    # -- sizes -----------------------------------------------------------
    @property
    def n_modules(self) -> int:
        return len(self.width)

    @property
    def n_pins(self) -> int:
        return len(self.pin_owner)

    @property
    def n_nets(self) -> int:
        return len(self.net_ptr) - 1

    @property
    def area(self) -> np.ndarray:
        return self.width * self.height

    def net(self, e: int) -> np.ndarray:
        return self.net_pins[self.net_ptr[e]:self.net_ptr[e + 1]]

    def net_degrees(self) -> np.ndarray:
        return np.diff(self.net_ptr)

    @property
    def pin_net(self) -> np.ndarray:
        """Net id of every entry of ``net_pins`` order, indexed by pin id."""
        if self._pin_net is None:
            out = np.full(self.n_pins, -1, dtype=np.int64)
            out[self.net_pins] = np.repeat(np.arange(self.n_nets), self.net_degrees())
            self._pin_net = out
        return self._pin_net

    def module_pins(self, m: int) -> np.ndarray:
        if self._module_pins is None:
            order = np.argsort(self.pin_owner, kind="stable")
            ptr = np.zeros(self.n_modules + 1, dtype=np.int64)
            np.cumsum(np.bincount(self.pin_owner, minlength=self.n_modules), out=ptr[1:])
            self._module_pins = (ptr, order)
        ptr, order = self._module_pins
        return order[ptr[m]:ptr[m + 1]]

    @property
    def movable(self) -> np.ndarray:
        return ~self.fixed

    @property
    def n_macros(self) -> int:
        return len(self.macro_ids)

    def counts(self) -> dict:
        return {
            "macros": int(self.n_macros),
            "cells": int(np.sum(self.kind == STDCELL)),
            "terminals": int(np.sum(self.kind == TERMINAL)),
            "nets": int(self.n_nets),
            "pins": int(self.n_pins),
        }

    # -- checks ----------------------------------------------------------
    def validate(self):
        n = len(self.width)
        for arr, what in ((self.height, "height"), (self.kind, "kind"), (self.fixed, "fixed"),
                          (self.x, "x"), (self.y, "y")):
            if len(arr) != n:
                raise NetlistError(f"module field {what!r} has length {len(arr)}, expected {n}")
        if len(self.names) != n:
            raise NetlistError("names length mismatch")
        bad = ~np.isin(self.kind, KINDS)
        if bad.any():
            raise NetlistError(f"unknown module kind {self.kind[bad][0]!r}")
        sized = self.kind != TERMINAL
        if np.any((self.width[sized] <= 0) | (self.height[sized] <= 0)):
            raise NetlistError("macro/stdcell modules need positive width and height")
        if np.any((self.width < 0) | (self.height < 0)):
            raise NetlistError("negative module size")
        p = len(self.pin_owner)
        if len(self.pin_dx) != p or len(self.pin_dy) != p:
            raise NetlistError("pin field length mismatch")
        if p and (self.pin_owner.min() < 0 or self.pin_owner.max() >= n):
            raise NetlistError("pin owner out of range")
        if len(self.net_ptr) < 1 or self.net_ptr[0] != 0 or self.net_ptr[-1] != len(self.net_pins):
            raise NetlistError("malformed net pointer array")
        if np.any(np.diff(self.net_ptr) < 1):
            raise NetlistError("every net needs at least one pin")
        if len(self.net_pins) and (self.net_pins.min() < 0 or self.net_pins.max() >= p):
            raise NetlistError("net references unknown pin")
        if len(np.unique(self.net_pins)) != len(self.net_pins):
            raise NetlistError("pin listed twice (within or across nets)")
        if len(self.net_pins) != p:
            raise NetlistError("every pin must belong to a net")
        if np.any(self.fixed & (np.isnan(self.x) | np.isnan(self.y))):
            raise NetlistError("fixed module without coordinates")
        if len(self.macro_ids):
            if self.macro_ids.min() < 0 or self.macro_ids.max() >= n:
                raise NetlistError("macro id out of range")
            if np.any(self.fixed[self.macro_ids]):
                raise NetlistError("macro_ids must be movable modules")
            if len(np.unique(self.macro_ids)) != len(self.macro_ids):
                raise NetlistError("duplicate macro id")

    # -- derived instances ----------------------------------------------
    def subset(self, keep) -> tuple["Netlist", np.ndarray]:
        """Restrict to modules ``keep``; nets keep only surviving pins.

        Nets left with fewer than one pin are dropped.  Returns the new
        netlist and the old ids of its modules.
        """
        keep = np.unique(np.asarray(keep, dtype=np.int64))
        remap = np.full(self.n_modules, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        pin_keep = remap[self.pin_owner] >= 0
        pin_remap = np.full(self.n_pins, -1, dtype=np.int64)
        pin_remap[pin_keep] = np.arange(int(pin_keep.sum()))
        ptr = [0]
        pins = []
        net_names = []
        for e in range(self.n_nets):
            q = pin_remap[self.net(e)]
            q = q[q >= 0]
            if len(q):
                pins.extend(q.tolist())
                ptr.append(len(pins))
                if self.net_names is not None:
                    net_names.append(self.net_names[e])
        macro_ids = remap[self.macro_ids]
        sub = Netlist(
            names=[self.names[i] for i in keep],
            width=self.width[keep], height=self.height[keep], kind=self.kind[keep],
            fixed=self.fixed[keep], x=self.x[keep], y=self.y[keep],
            pin_owner=remap[self.pin_owner[pin_keep]], pin_dx=self.pin_dx[pin_keep],
            pin_dy=self.pin_dy[pin_keep], net_ptr=ptr, net_pins=pins, canvas=self.canvas,
            macro_ids=macro_ids[macro_ids >= 0], name=self.name,
            net_names=net_names if self.net_names is not None else None,
        )
        return sub, keep

    def with_macros(self, ids) -> "Netlist":
        out = Netlist(**{f: getattr(self, f) for f in _FIELDS})
        out.macro_ids = np.asarray(ids, dtype=np.int64)
        out.validate()
        return out

    def initial_placement(self, seed: int | None = None) -> "Placement":
        """Parsed coordinates; modules without any are spread uniformly at random."""
        x = self.x.copy()
        y = self.y.copy()
        missing = np.isnan(x) | np.isnan(y)
        if missing.any():
            rng = np.random.default_rng(seed)
            c = self.canvas
            x[missing] = c.x + rng.random(missing.sum()) * np.maximum(c.width - self.width[missing], 0)
            y[missing] = c.y + rng.random(missing.sum()) * np.maximum(c.height - self.height[missing], 0)
        return Placement(self, x, y)


_FIELDS = ("names", "width", "height", "kind", "fixed", "x", "y", "pin_owner", "pin_dx",
           "pin_dy", "net_ptr", "net_pins", "canvas", "macro_ids", "name", "net_names")


class Placement:
    """Lower-left coordinates of every module of ``netlist``."""

    def __init__(self, netlist: Netlist, x, y):
        self.netlist = netlist
        self.x = np.array(x, dtype=np.float64)
        self.y = np.array(y, dtype=np.float64)
        if self.x.shape != (netlist.n_modules,) or self.y.shape != (netlist.n_modules,):
            raise ValueError("placement arrays must have one entry per module")

    def copy(self) -> "Placement":
        return Placement(self.netlist, self.x, self.y)

    def pin_xy(self) -> tuple[np.ndarray, np.ndarray]:
        nl = self.netlist
        o = nl.pin_owner
        px = self.x[o] + 0.5 * nl.width[o] + nl.pin_dx
        py = self.y[o] + 0.5 * nl.height[o] + nl.pin_dy
        return px, py

    def shifted(self, dx: float, dy: float) -> "Placement":
        return Placement(self.netlist, self.x + dx, self.y + dy)

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "y": self.y.tolist()}


# ---------------------------------------------------------------------------
# Bookshelf
# ---------------------------------------------------------------------------

def _data_lines(path):
    """Yield (lineno, tokens) for non-empty, non-comment lines after the header."""
    try:
        fh = open(path, "r")
    except OSError as exc:
        raise BookshelfError(f"cannot read companion file ({exc.strerror})", path) from exc
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line or line.startswith("UCLA"):
                continue
            yield lineno, line


def _aux_files(aux_path):
    base = os.path.dirname(os.path.abspath(aux_path))
    files = {}
    for lineno, line in _data_lines(aux_path):
        if ":" not in line:
            raise BookshelfError("expected 'RowBasedPlacement : <files>'", aux_path, lineno)
        for token in line.split(":", 1)[1].split():
            ext = os.path.splitext(token)[1].lower().lstrip(".")
            files[ext] = os.path.join(base, token)
    for need in ("nodes", "nets", "pl"):
        if need not in files:
            raise BookshelfError(f"missing .{need} entry", aux_path)
        if not os.path.exists(files[need]):
            raise BookshelfError(f"missing companion file {os.path.basename(files[need])}", aux_path)
    return files


def _num(tok, path, lineno):
    try:
        return float(tok)
    except ValueError:
        raise BookshelfError(f"expected a number, got {tok!r}", path, lineno) from None


def parse_bookshelf(aux_file) -> Netlist:
    """Read an ISPD-style Bookshelf bundle.

    Terminal nodes with positive area are taken as the macros to be placed
    (the ISPD 2005 convention); zero-area terminals become fixed pads.
    """
    files = _aux_files(aux_file)

    names, widths, heights, terminal = [], [], [], []
    index = {}
    path = files["nodes"]
    for lineno, line in _data_lines(path):
        tok = line.split()
        if tok[0] in ("NumNodes", "NumTerminals"):
            continue
        if len(tok) < 3:
            raise BookshelfError("node line needs 'name width height [terminal]'", path, lineno)
        if tok[0] in index:
            raise BookshelfError(f"duplicate node {tok[0]!r}", path, lineno)
        index[tok[0]] = len(names)
        names.append(tok[0])
        widths.append(_num(tok[1], path, lineno))
        heights.append(_num(tok[2], path, lineno))
        terminal.append(len(tok) > 3 and tok[3].lower().startswith("terminal"))
    n = len(names)
    width = np.array(widths)
    height = np.array(heights)
    terminal = np.array(terminal, dtype=bool)

    pin_owner, pin_dx, pin_dy = [], [], []
    net_ptr, net_names = [0], []
    path = files["nets"]
    remaining = 0
    for lineno, line in _data_lines(path):
        tok = line.replace(":", " : ").split()
        if tok[0] in ("NumNets", "NumPins"):
            continue
        if tok[0] == "NetDegree":
            if remaining:
                raise BookshelfError("previous net has fewer pins than declared", path, lineno)
            if len(tok) < 3:
                raise BookshelfError("malformed NetDegree line", path, lineno)
            remaining = int(_num(tok[2], path, lineno))
            if remaining < 1:
                raise BookshelfError("net degree must be positive", path, lineno)
            net_names.append(tok[3] if len(tok) > 3 else f"net{len(net_names)}")
            continue
        if not remaining:
            raise BookshelfError("pin line outside a NetDegree block", path, lineno)
        owner = index.get(tok[0])
        if owner is None:
            raise BookshelfError(f"net references undeclared node {tok[0]!r}", path, lineno)
        dx = dy = 0.0
        if ":" in tok:
            k = tok.index(":")
            if len(tok) < k + 3:
                raise BookshelfError("pin offset needs two numbers", path, lineno)
            dx = _num(tok[k + 1], path, lineno)
            dy = _num(tok[k + 2], path, lineno)
        pin_owner.append(owner)
        pin_dx.append(dx)
        pin_dy.append(dy)
        remaining -= 1
        if not remaining:
            net_ptr.append(len(pin_owner))
    if remaining:
        raise BookshelfError("file ends inside a NetDegree block", path)

    x = np.full(n, np.nan)
    y = np.full(n, np.nan)
    fixed_flag = np.zeros(n, dtype=bool)
    path = files["pl"]
    for lineno, line in _data_lines(path):
        tok = line.split()
        if len(tok) < 3:
            raise BookshelfError("placement line needs 'name x y'", path, lineno)
        m = index.get(tok[0])
        if m is None:
            raise BookshelfError(f"placement of undeclared node {tok[0]!r}", path, lineno)
        x[m] = _num(tok[1], path, lineno)
        y[m] = _num(tok[2], path, lineno)
        fixed_flag[m] = any(t.upper().startswith("/FIXED") for t in tok[3:])

    sized = (width > 0) & (height > 0)
    is_macro = terminal & sized
    kind = np.where(is_macro, MACRO, np.where(terminal, TERMINAL, STDCELL))
    fixed = terminal & ~sized
    if np.any(fixed & np.isnan(x)):
        bad = names[int(np.flatnonzero(fixed & np.isnan(x))[0])]
        raise BookshelfError(f"terminal {bad!r} has no coordinates", files["pl"])
    fixed_for_canvas = terminal | fixed_flag

    canvas = None
    if "scl" in files and os.path.exists(files["scl"]):
        canvas = _scl_canvas(files["scl"])
    if canvas is None:
        sel = fixed_for_canvas & ~np.isnan(x)
        if not sel.any():
            raise BookshelfError("cannot derive canvas: no .scl rows and no fixed objects", aux_file)
        x0, y0 = x[sel].min(), y[sel].min()
        x1, y1 = (x[sel] + width[sel]).max(), (y[sel] + height[sel]).max()
        canvas = Canvas(float(x0), float(y0), float(x1 - x0), float(y1 - y0))

    return Netlist(
        names=names, width=width, height=height, kind=kind, fixed=fixed, x=x, y=y,
        pin_owner=pin_owner, pin_dx=pin_dx, pin_dy=pin_dy, net_ptr=net_ptr,
        net_pins=np.arange(len(pin_owner)), canvas=canvas,
        macro_ids=np.flatnonzero(is_macro),
        name=os.path.splitext(os.path.basename(aux_file))[0], net_names=net_names,
    )


def _scl_canvas(path):
    x0 = y0 = math.inf
    x1 = y1 = -math.inf
    row = {}
    for lineno, line in _data_lines(path):
        tok = line.replace(":", " : ").split()
        key = tok[0].lower()
        if key == "corerow":
            row = {}
        elif key == "end":
            if "coordinate" in row and "height" in row:
                y0 = min(y0, row["coordinate"])
                y1 = max(y1, row["coordinate"] + row["height"])
            if "subroworigin" in row and "numsites" in row:
                step = row.get("sitespacing", row.get("sitewidth", 1.0))
                x0 = min(x0, row["subroworigin"])
                x1 = max(x1, row["subroworigin"] + row["numsites"] * step)
        elif key in ("numrows",):
            continue
        else:
            # a line may hold several 'Key : value' pairs (SubrowOrigin ... NumSites ...)
            i = 0
            while i + 2 < len(tok) and tok[i + 1] == ":":
                row[tok[i].lower()] = _num(tok[i + 2], path, lineno)
                i += 3
    if not math.isfinite(x0) or not math.isfinite(y0):
        return None
    return Canvas(x0, y0, x1 - x0, y1 - y0)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

JSON_SCHEMA = {
    "type": "object",
    "required": ["canvas", "modules", "pins", "nets"],
    "properties": {
        "canvas": {
            "type": "object",
            "required": ["x", "y", "w", "h"],
            "properties": {k: {"type": "number"} for k in ("x", "y", "w", "h")},
        },
        "modules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "w", "h", "kind", "fixed"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "w": {"type": "number", "minimum": 0},
                    "h": {"type": "number", "minimum": 0},
                    "kind": {"enum": list(KINDS)},
                    "fixed": {"type": "boolean"},
                    "x": {"type": ["number", "null"]},
                    "y": {"type": ["number", "null"]},
                    "name": {"type": "string"},
                },
            },
        },
        "pins": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "owner", "dx", "dy"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "owner": {"type": "integer", "minimum": 0},
                    "dx": {"type": "number"},
                    "dy": {"type": "number"},
                },
            },
        },
        "nets": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        },
        "macro_ids": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "name": {"type": "string"},
    },
}


def _pointer(path_items):
    return "/" + "/".join(str(p) for p in path_items)


def parse_json(text) -> Netlist:
    """Build a Netlist from the JSON interchange format (string or parsed dict)."""
    import jsonschema

    doc = json.loads(text) if isinstance(text, (str, bytes)) else text
    try:
        jsonschema.validate(doc, JSON_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message, _pointer(exc.absolute_path)) from None

    mods = doc["modules"]
    n = len(mods)
    for i, m in enumerate(mods):
        if m["id"] != i:
            raise SchemaError(f"module ids must be dense and ordered, expected {i}", f"/modules/{i}/id")
        if m["kind"] != TERMINAL and (m["w"] <= 0 or m["h"] <= 0):
            raise SchemaError("macro/stdcell needs positive size", f"/modules/{i}")
        if m["fixed"] and (m.get("x") is None or m.get("y") is None):
            raise SchemaError("fixed module needs x and y", f"/modules/{i}")
    pins = doc["pins"]
    for i, p in enumerate(pins):
        if p["id"] != i:
            raise SchemaError(f"pin ids must be dense and ordered, expected {i}", f"/pins/{i}/id")
        if p["owner"] >= n:
            raise SchemaError(f"owner {p['owner']} out of range", f"/pins/{i}/owner")
    seen = set()
    ptr, flat = [0], []
    for e, net in enumerate(doc["nets"]):
        for j, pid in enumerate(net):
            if pid >= len(pins):
                raise SchemaError(f"pin {pid} out of range", f"/nets/{e}/{j}")
            if pid in seen:
                raise SchemaError(f"pin {pid} already used", f"/nets/{e}/{j}")
            seen.add(pid)
        flat.extend(net)
        ptr.append(len(flat))
    if len(seen) != len(pins):
        orphan = min(set(range(len(pins))) - seen)
        raise SchemaError(f"pin {orphan} belongs to no net", f"/pins/{orphan}")
    macro_ids = doc.get("macro_ids", [])
    for j, mid in enumerate(macro_ids):
        if mid >= n or mods[mid]["fixed"]:
            raise SchemaError("macro id must name a movable module", f"/macro_ids/{j}")
    c = doc["canvas"]
    if c["w"] <= 0 or c["h"] <= 0:
        raise SchemaError("canvas extent must be positive", "/canvas")

    def coord(m, k):
        v = m.get(k)
        return np.nan if v is None else float(v)

    return Netlist(
        names=[m.get("name", f"m{m['id']}") for m in mods],
        width=[m["w"] for m in mods], height=[m["h"] for m in mods],
        kind=[m["kind"] for m in mods], fixed=[m["fixed"] for m in mods],
        x=[coord(m, "x") for m in mods], y=[coord(m, "y") for m in mods],
        pin_owner=[p["owner"] for p in pins], pin_dx=[p["dx"] for p in pins],
        pin_dy=[p["dy"] for p in pins], net_ptr=ptr, net_pins=flat,
        canvas=Canvas(float(c["x"]), float(c["y"]), float(c["w"]), float(c["h"])),
        macro_ids=macro_ids, name=doc.get("name", "netlist"),
    )


def _num_out(v):
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def to_json_dict(netlist: Netlist) -> dict:
    nl = netlist
    mods = []
    for i in range(nl.n_modules):
        m = {"id": i, "name": nl.names[i], "w": _num_out(nl.width[i]), "h": _num_out(nl.height[i]),
             "kind": str(nl.kind[i]), "fixed": bool(nl.fixed[i])}
        if not np.isnan(nl.x[i]):
            m["x"] = _num_out(nl.x[i])
            m["y"] = _num_out(nl.y[i])
        mods.append(m)
    pins = [{"id": i, "owner": int(nl.pin_owner[i]), "dx": _num_out(nl.pin_dx[i]),
             "dy": _num_out(nl.pin_dy[i])} for i in range(nl.n_pins)]
    c = nl.canvas
    return {
        "name": nl.name,
        "canvas": {"x": _num_out(c.x), "y": _num_out(c.y), "w": _num_out(c.width), "h": _num_out(c.height)},
        "modules": mods,
        "pins": pins,
        "nets": [nl.net(e).tolist() for e in range(nl.n_nets)],
        "macro_ids": nl.macro_ids.tolist(),
    }


def emit_json(netlist: Netlist, indent=None) -> str:
    return json.dumps(to_json_dict(netlist), indent=indent)


def load(path) -> Netlist:
    """Load a ``.aux`` Bookshelf bundle or a ``.json`` netlist."""
    path = str(path)
    if path.endswith(".aux"):
        return parse_bookshelf(path)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise NetlistError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_json(text)


def netlists_equal(a: Netlist, b: Netlist) -> bool:
    if a.canvas != b.canvas or a.names != b.names:
        return False
    for f in ("width", "height", "kind", "fixed", "pin_owner", "pin_dx", "pin_dy", "net_ptr",
              "net_pins", "macro_ids"):
        if not np.array_equal(getattr(a, f), getattr(b, f)):
            return False
    return np.array_equal(a.x, b.x, equal_nan=True) and np.array_equal(a.y, b.y, equal_nan=True)


# ---------------------------------------------------------------------------
# Synthetic instances and macro selection
# ---------------------------------------------------------------------------

def generate_synthetic(n_macros, n_cells, n_nets, pins_per_net=(2, 6), canvas=None, seed=0,
                       macro_area_ratio=0.3, cell_area_ratio=0.2, n_terminals=0) -> Netlist:
    """Random desk-scale instance.

    ``pins_per_net`` is an inclusive ``(lo, hi)`` range for uniformly drawn net
    degrees.  Macros occupy ``macro_area_ratio`` of the canvas and are at
    least 10x the median cell area.  Terminals are zero-area pads fixed on
    the canvas boundary.  Module membership in nets is weighted by
    sqrt(area) so macros carry more connections than cells.
    """
    if canvas is None:
        canvas = Canvas(0.0, 0.0, 100.0, 100.0)
    if min(n_macros, n_cells, n_nets, n_terminals) < 0:
        raise NetlistError("counts must be non-negative")
    if macro_area_ratio > 0.6:
        raise NetlistError(f"infeasible area budget: macros would cover {macro_area_ratio:.0%} "
                           "of the canvas (limit 60%)")
    lo, hi = pins_per_net
    if lo < 1 or hi < lo:
        raise NetlistError("pins_per_net must satisfy 1 <= lo <= hi")
    rng = np.random.default_rng(seed)
    A = canvas.area

    cw = ch = np.zeros(0)
    if n_cells:
        side = math.sqrt(cell_area_ratio * A / n_cells)
        cw = side * rng.uniform(0.6, 1.4, n_cells)
        ch = side * rng.uniform(0.6, 1.4, n_cells)
    mw = mh = np.zeros(0)
    if n_macros:
        share = rng.uniform(0.5, 1.5, n_macros)
        marea = macro_area_ratio * A * share / share.sum()
        if n_cells:
            floor = 10.0 * float(np.median(cw * ch))
            if marea.min() < floor:
                scale = marea.min() / floor * 0.99
                cw, ch = cw * math.sqrt(scale), ch * math.sqrt(scale)
        aspect = np.exp(rng.uniform(np.log(0.5), np.log(2.0), n_macros))
        mw = np.sqrt(marea * aspect)
        mh = marea / mw
        lim = 0.5 * min(canvas.width, canvas.height)
        big = np.maximum(mw / lim, mh / lim)
        shrink = np.where(big > 1, big, 1.0)
        mw, mh = mw / shrink, mh / shrink

    n = n_macros + n_cells + n_terminals
    width = np.concatenate([mw, cw, np.zeros(n_terminals)])
    height = np.concatenate([mh, ch, np.zeros(n_terminals)])
    kind = [MACRO] * n_macros + [STDCELL] * n_cells + [TERMINAL] * n_terminals
    fixed = np.array([False] * (n_macros + n_cells) + [True] * n_terminals)
    x = np.full(n, np.nan)
    y = np.full(n, np.nan)
    if n_cells:
        sl = slice(n_macros, n_macros + n_cells)
        x[sl] = canvas.x + rng.random(n_cells) * (canvas.width - cw)
        y[sl] = canvas.y + rng.random(n_cells) * (canvas.height - ch)
    if n_terminals:
        t = rng.random(n_terminals) * 2 * canvas.half_perimeter
        tx, ty = _perimeter_point(t, canvas)
        x[n_macros + n_cells:] = tx
        y[n_macros + n_cells:] = ty
    names = ([f"m{i}" for i in range(n_macros)] + [f"c{i}" for i in range(n_cells)]
             + [f"p{i}" for i in range(n_terminals)])

    weight = np.sqrt(np.maximum(width * height, 0))
    if n_terminals:
        ref = np.median(weight[:n_macros]) if n_macros else (np.median(weight[n_macros:n_macros + n_cells]) if n_cells else 1.0)
        weight[n_macros + n_cells:] = 0.25 * ref
    prob = weight / weight.sum() if n and weight.sum() > 0 else None

    members = []
    if n_nets and n:
        degrees = np.minimum(rng.integers(lo, hi + 1, n_nets), n)
        for d in degrees:
            members.append(set(rng.choice(n, size=int(d), replace=False, p=prob).tolist()))
        covered = set().union(*members)
        for j, m in enumerate(sorted(set(range(n)) - covered)):
            # leftovers go round-robin into random nets so every module is connected
            members[int(rng.integers(n_nets))].add(m)
    pin_owner, pin_dx, pin_dy, net_ptr = [], [], [], [0]
    for net in members:
        for m in sorted(net):
            pin_owner.append(m)
            pin_dx.append(float(rng.uniform(-0.5, 0.5) * width[m]))
            pin_dy.append(float(rng.uniform(-0.5, 0.5) * height[m]))
        net_ptr.append(len(pin_owner))
    return Netlist(
        names=names, width=width, height=height, kind=kind, fixed=fixed, x=x, y=y,
        pin_owner=pin_owner, pin_dx=pin_dx, pin_dy=pin_dy, net_ptr=net_ptr,
        net_pins=np.arange(len(pin_owner)), canvas=canvas,
        macro_ids=np.arange(n_macros), name=f"synthetic-{n_macros}-{n_cells}-{n_nets}-s{seed}",
    )


def _perimeter_point(t, canvas):
    c = canvas
    w, h = c.width, c.height
    x = np.empty_like(t)
    y = np.empty_like(t)
    for i, s in enumerate(t):
        if s < w:
            x[i], y[i] = s, 0.0
        elif s < w + h:
            x[i], y[i] = w, s - w
        elif s < 2 * w + h:
            x[i], y[i] = 2 * w + h - s, h
        else:
            x[i], y[i] = 0.0, 2 * (w + h) - s
    return c.x + x, c.y + y


def select_macros(netlist: Netlist, count: int) -> np.ndarray:
    """Designate the ``count`` largest movable modules as macros.

    Ties in area go to the lower id.  Sets ``netlist.macro_ids`` and
    returns it.
    """
    movable = np.flatnonzero(~netlist.fixed)
    if count > len(movable):
        raise NetlistError(f"cannot select {count} macros from {len(movable)} movable modules")
    area = netlist.area[movable]
    order = np.lexsort((movable, -area))
    ids = np.sort(movable[order[:count]])
    netlist.macro_ids = ids
    return ids
