"""Decider pipelines: stage IDs, per-machine tables, full runs and summaries."""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from . import far, wfar
from .loops import decide_loops
from .machine import as_machine, emit_machine, simulate, tm_to_1rb, tnf_normalize, Halted
from .ngramcps import decide_ngram_cps
from .repwl import decide_repwl
from .tnf import enumerate_machines
from .verdict import ASSUMED, HALT, NONHALT, UNKNOWN, MachineRecord, UNKNOWN_VERDICT, Verdict

REPWL_DEFAULT_B = 320
REPWL_DEFAULT_N = 150_001


class Stage(NamedTuple):
    kind: str  # loop, ngram, repwl, halt-max, table, normal-form
    params: tuple
    id: str


_GRAMMAR = [
    (re.compile(r"LOOP1_params_(\d+)"), "loop"),
    (re.compile(r"NGRAM_CPS_IMPL2_params_(\d+)_(\d+)_(\d+)"), "ngram-plain"),
    (re.compile(r"NGRAM_CPS_IMPL1_params_(\d+)_(\d+)_(\d+)_(\d+)"), "ngram-fixed"),
    (re.compile(r"NGRAM_CPS_LRU_params_(\d+)_(\d+)_(\d+)"), "ngram-lru"),
    (re.compile(r"REPWL_params_(\d+)_(\d+)(?:_(\d+)_(\d+))?"), "repwl"),
    (re.compile(r"(?:HALT_MAX_params|HALT_DECIDER)_(\d+)"), "halt-max"),
    (re.compile(r"TABLE_BASED"), "table"),
    (re.compile(r"NORMAL_FORM_TABLE_BASED"), "normal-form"),
]


def parse_stage(text: str) -> Stage:
    text = text.strip()
    for rx, kind in _GRAMMAR:
        m = rx.fullmatch(text)
        if not m:
            continue
        nums = tuple(int(g) for g in m.groups() if g is not None)
        if kind == "repwl" and len(nums) == 2:
            nums += (REPWL_DEFAULT_B, REPWL_DEFAULT_N)
        return Stage(kind, nums, text)
    raise ValueError(f"unknown stage id {text!r}")


def stage_id(kind: str, *params) -> str:
    """Inverse of ``parse_stage`` for the canonical spellings."""
    p = "_".join(map(str, params))
    names = {"loop": "LOOP1_params_", "ngram-plain": "NGRAM_CPS_IMPL2_params_",
             "ngram-fixed": "NGRAM_CPS_IMPL1_params_", "ngram-lru": "NGRAM_CPS_LRU_params_",
             "repwl": "REPWL_params_", "halt-max": "HALT_MAX_params_"}
    if kind == "table":
        return "TABLE_BASED"
    if kind == "normal-form":
        return "NORMAL_FORM_TABLE_BASED"
    return names[kind] + p


def run_stage(tm, stage: Stage) -> Verdict:
    """One decider stage; table stages are handled by ``run_pipeline``."""
    k, p = stage.kind, stage.params
    if k == "loop":
        return decide_loops(tm, p[0])
    if k == "ngram-plain":
        return decide_ngram_cps(tm, "plain", p[0], p[1], p[2])
    if k == "ngram-fixed":
        return decide_ngram_cps(tm, "fixed", p[1], p[2], p[3], h=p[0])
    if k == "ngram-lru":
        return decide_ngram_cps(tm, "lru", p[0], p[1], p[2])
    if k == "repwl":
        return decide_repwl(tm, *p)
    if k == "halt-max":
        out = simulate(tm, p[0])
        return Verdict.halt(out) if isinstance(out, Halted) else UNKNOWN_VERDICT
    raise ValueError(f"stage {stage.id} needs tables")


# --- tables -------------------------------------------------------------------

def _key(machine) -> str:
    return emit_machine(as_machine(machine))


@dataclass
class Tables:
    """Per-machine knowledge consulted by table-based stages.

    params: machine -> stage IDs to try; far/wfar: machine -> certificates;
    assumptions: machine -> label, for machines taken as nonhalting without
    proof (any run that uses them is conditional).
    """

    params: Dict[str, List[Stage]] = field(default_factory=dict)
    far: Dict[str, list] = field(default_factory=dict)
    wfar: Dict[str, list] = field(default_factory=dict)
    assumptions: Dict[str, str] = field(default_factory=dict)

    def __bool__(self):
        return bool(self.params or self.far or self.wfar or self.assumptions)

    def add_params_file(self, path):
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                machine, sid = (x.strip() for x in line.split(",", 1))
                self.params.setdefault(_key(machine), []).append(parse_stage(sid))

    def add_assumption_file(self, path):
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                machine, _, label = line.partition(" ")
                self.assumptions[_key(machine)] = label.strip()

    def add_certificate_file(self, path):
        text = Path(path).read_text()
        doc = json.loads(text)
        if "machine" not in doc:
            raise ValueError(f"{path}: certificate lacks a machine field")
        key = _key(doc["machine"])
        if "T" in doc:
            self.far.setdefault(key, []).append(far.NfaCertificate.from_json(text))
        elif "left" in doc:
            self.wfar.setdefault(key, []).append(wfar.WfarCertificate.from_json(text))
        else:
            raise ValueError(f"{path}: not a FAR or WFAR certificate")

    @classmethod
    def load(cls, params=(), certificates=(), assumptions=()):
        t = cls()
        for p in params:
            t.add_params_file(p)
        for p in certificates:
            t.add_certificate_file(p)
        for p in assumptions:
            t.add_assumption_file(p)
        return t

    def lookup(self, tm) -> Tuple[Verdict, str]:
        key = _key(tm)
        if key in self.assumptions:
            return Verdict(ASSUMED, f"assumed: {self.assumptions[key]}"), "SPORADIC_MACHINES"
        for st in self.params.get(key, ()):
            v = run_stage(tm, st)
            if v:
                return v, st.id
        for cert in self.far.get(key, ()):
            if far.check_far(tm, cert).verified:
                return Verdict(NONHALT, "FAR certificate"), "FAR_certificate"
        for cert in self.wfar.get(key, ()):
            if wfar.check_wfar(tm, cert).verified:
                return Verdict(NONHALT, "WFAR certificate"), "WFAR_certificate"
        return UNKNOWN_VERDICT, ""


def data_path(name: str) -> Path:
    return Path(str(resources.files("busybeaver") / "data" / name))


def shipped_tables() -> Tables:
    return Tables.load(params=[data_path("s4_repwl_params.txt"), data_path("s5_repwl_params.txt")],
                       certificates=[data_path("far_example.json"), data_path("wfar_example.json")],
                       assumptions=[data_path("s5_sporadic.txt")])


# --- single machine -----------------------------------------------------------

def decide_one(tm, stages: Sequence[Stage], tables: Optional[Tables] = None) -> Tuple[Verdict, str]:
    """First non-UNKNOWN verdict along ``stages``; (verdict, decider id)."""
    tm = as_machine(tm)
    tried_nf = False
    for st in stages:
        if st.kind == "table":
            if tables:
                v, sub = tables.lookup(tm)
                if v:
                    return v, f"TABLE_BASED/{sub}"
            continue
        if st.kind == "normal-form":
            tried_nf = True
            v, sub = _one_rb(tm, tables)
            if v:
                return v, f"NORMAL_FORM_TABLE_BASED/{sub}"
            continue
        v = run_stage(tm, st)
        if v:
            return v, st.id
    if tables and not tried_nf:
        v, sub = _one_rb(tm, tables)
        if v:
            return v, f"NORMAL_FORM_TABLE_BASED/{sub}"
    return UNKNOWN_VERDICT, "none"


def _one_rb(tm, tables):
    if not tables:
        return UNKNOWN_VERDICT, ""
    red = tm_to_1rb(tm)
    if red is None:
        return UNKNOWN_VERDICT, ""
    v, sub = tables.lookup(red)
    if v.kind == HALT:  # halting facts do not transfer through the reduction
        return UNKNOWN_VERDICT, ""
    return v, sub


def _record(tm, verdict: Verdict, did: str) -> MachineRecord:
    text = emit_machine(tm)
    if verdict.kind == HALT:
        return MachineRecord(text, HALT, did, verdict.steps, verdict.sigma, verdict.space)
    return MachineRecord(text, verdict.kind, did)


def run_pipeline(tm, stages: Sequence, tables: Optional[Tables] = None) -> MachineRecord:
    """Record for one machine; ``stages`` may be Stage objects or IDs."""
    if not stages:
        raise ValueError("empty pipeline")
    stages = [s if isinstance(s, Stage) else parse_stage(s) for s in stages]
    tm = as_machine(tm)
    v, did = decide_one(tm, stages, tables)
    return _record(tm, v, did)


def long_halt_probe(tm, bound: int) -> Optional[MachineRecord]:
    if bound < 1:
        raise ValueError("bound must be positive")
    tm = as_machine(tm)
    out = simulate(tm, bound)
    if not isinstance(out, Halted):
        return None
    return _record(tm, Verdict.halt(out), stage_id("halt-max", bound))


def grid_search_repwl(tm, l_range: Iterable[int], T_range: Iterable[int],
                      B: int = REPWL_DEFAULT_B, N: int = REPWL_DEFAULT_N) -> Optional[Tuple[int, int]]:
    tm = as_machine(tm)
    Ts = list(T_range)
    for l in l_range:
        for T in Ts:
            if decide_repwl(tm, l, T, B, N).kind == NONHALT:
                return l, T
    return None


# --- built-in pipelines ------------------------------------------------------

_S4 = """LOOP1_params_107
NGRAM_CPS_IMPL2_params_1_1_100
NGRAM_CPS_IMPL2_params_2_2_200
NGRAM_CPS_IMPL2_params_3_3_400
NGRAM_CPS_IMPL1_params_2_2_2_1600
NGRAM_CPS_IMPL1_params_2_3_3_1600
NGRAM_CPS_IMPL1_params_4_2_2_600
NGRAM_CPS_IMPL1_params_4_3_3_1600
NGRAM_CPS_IMPL1_params_6_2_2_3200
NGRAM_CPS_IMPL1_params_6_3_3_3200
NGRAM_CPS_IMPL1_params_8_2_2_1600
NGRAM_CPS_IMPL1_params_8_3_3_1600
NGRAM_CPS_LRU_params_2_2_10000
NGRAM_CPS_IMPL1_params_10_4_4_10000
REPWL_params_4_3_320_10000"""

_S2X4 = """LOOP1_params_107
NGRAM_CPS_IMPL2_params_1_1_400
NGRAM_CPS_IMPL2_params_2_2_800
NGRAM_CPS_IMPL2_params_3_3_400
NGRAM_CPS_IMPL2_params_4_4_800
LOOP1_params_4100
REPWL_params_2_3_320_400
NGRAM_CPS_LRU_params_2_2_1000
NGRAM_CPS_IMPL1_params_2_2_2_3000
NGRAM_CPS_IMPL1_params_2_3_3_1600
NGRAM_CPS_IMPL1_params_4_2_2_600
NGRAM_CPS_IMPL1_params_4_3_3_1600
NGRAM_CPS_IMPL1_params_6_2_2_3200
NGRAM_CPS_IMPL1_params_6_3_3_3200
NGRAM_CPS_IMPL1_params_8_3_3_1600
NGRAM_CPS_LRU_params_3_3_20000
REPWL_params_4_2_320_2000
REPWL_params_6_2_320_2000
NGRAM_CPS_IMPL2_params_4_4_20000
HALT_MAX_params_3932964"""

_S5 = """LOOP1_params_130
NGRAM_CPS_IMPL2_params_1_1_100
NGRAM_CPS_IMPL2_params_2_2_200
NGRAM_CPS_IMPL2_params_3_3_400
NGRAM_CPS_IMPL1_params_2_2_2_1600
NGRAM_CPS_IMPL1_params_2_3_3_1600
LOOP1_params_4100
NGRAM_CPS_IMPL1_params_4_2_2_600
NGRAM_CPS_IMPL1_params_4_3_3_1600
NGRAM_CPS_IMPL1_params_6_2_2_3200
NGRAM_CPS_IMPL1_params_6_3_3_3200
NGRAM_CPS_IMPL1_params_8_2_2_1600
NGRAM_CPS_IMPL1_params_8_3_3_1600
TABLE_BASED
NORMAL_FORM_TABLE_BASED"""


@dataclass
class Pipeline:
    name: str
    stages: List[Stage]
    symbol_order: str = "strict"
    tables: Optional[Tables] = None
    dims: Optional[Tuple[int, int]] = None

    @classmethod
    def from_ids(cls, name, ids: Iterable[str], **kw):
        return cls(name, [parse_stage(i) for i in ids if i.strip()], **kw)

    @classmethod
    def from_file(cls, path) -> "Pipeline":
        """Config file: one stage ID per line; ``symbols: quasi`` and
        ``params:/certificate:/assume: <path>`` lines add options and tables
        (relative paths resolve against the file's directory)."""
        path = Path(path)
        ids, order = [], "strict"
        params, certs, assume = [], [], []
        for raw in path.read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition(":")
            if sep:
                val = val.strip()
                target = {"params": params, "certificate": certs, "assume": assume}.get(key.strip())
                if key.strip() == "symbols":
                    order = val
                elif target is not None:
                    target.append(path.parent / val)
                else:
                    raise ValueError(f"{path}: unknown option {key!r}")
            else:
                ids.append(line)
        tables = Tables.load(params, certs, assume) if (params or certs or assume) else None
        return cls.from_ids(path.stem, ids, symbol_order=order, tables=tables)


BUILTIN_NAMES = ("s2", "s3", "s4", "s2x3", "s2x4", "s2x4-generic", "s5-partial")


def builtin(name: str) -> Pipeline:
    if name in ("s2", "s3", "s4"):
        dims = {"s2": (2, 2), "s3": (3, 2), "s4": (4, 2)}[name]
        return Pipeline.from_ids(name, _S4.splitlines(), dims=dims)
    if name == "s2x3":
        return Pipeline.from_ids(name, _S2X4.splitlines(), dims=(2, 3))
    if name == "s2x4":
        # the per-machine RepWL table goes just before the long-halt probe
        ids = _S2X4.splitlines()
        ids.insert(len(ids) - 1, "TABLE_BASED")
        tables = Tables.load(params=[data_path("s2x4_repwl_params.txt")])
        return Pipeline.from_ids(name, ids, symbol_order="quasi", tables=tables, dims=(2, 4))
    if name == "s2x4-generic":
        return Pipeline.from_ids(name, _S2X4.splitlines(), symbol_order="quasi", dims=(2, 4))
    if name == "s5-partial":
        return Pipeline.from_ids(name, _S5.splitlines() + ["HALT_DECIDER_47176870"],
                                 tables=shipped_tables(), dims=(5, 2))
    raise ValueError(f"unknown pipeline {name!r}; built-ins: {', '.join(BUILTIN_NAMES)}")


def resolve_pipeline(spec) -> Pipeline:
    if isinstance(spec, Pipeline):
        return spec
    if spec in BUILTIN_NAMES:
        return builtin(spec)
    return Pipeline.from_file(spec)


class PipelineDecider:
    """Picklable decide function for the enumerator."""

    def __init__(self, stages, tables=None):
        self.stages = stages
        self.tables = tables

    def __call__(self, tm):
        return decide_one(tm, self.stages, self.tables)


# --- summaries ---------------------------------------------------------------

def _top(did: str) -> str:
    return did.split("/", 1)[0]


@dataclass
class RunSummary:
    pipeline: str
    n_states: int
    n_symbols: int
    stages: Dict[str, Dict[str, int]] = field(default_factory=dict)
    totals: Dict[str, int] = field(default_factory=lambda: {
        "total": 0, NONHALT: 0, HALT: 0, ASSUMED: 0, UNKNOWN: 0})
    S: int = 0
    S_witnesses: List[str] = field(default_factory=list)
    sigma: int = 0
    sigma_witnesses: List[str] = field(default_factory=list)
    space: int = 0
    space_witnesses: List[str] = field(default_factory=list)
    holdouts: List[str] = field(default_factory=list)
    assumed: List[str] = field(default_factory=list)
    truncated: bool = False

    @property
    def conditional(self):
        return bool(self.assumed)

    def add(self, rec: MachineRecord):
        self.totals["total"] += 1
        self.totals[rec.status] += 1
        if rec.status == UNKNOWN:
            self.holdouts.append(rec.machine)
            return
        if rec.status == ASSUMED:
            self.assumed.append(rec.machine)
        row = self.stages.setdefault(_top(rec.decider_id), {NONHALT: 0, HALT: 0, ASSUMED: 0})
        row[rec.status] += 1
        if rec.status != HALT:
            return
        for attr, val in (("S", rec.steps), ("sigma", rec.sigma), ("space", rec.space)):
            best = getattr(self, attr)
            wit = getattr(self, f"{attr}_witnesses")
            if val > best:
                setattr(self, attr, val)
                wit.clear()
            if val >= getattr(self, attr):
                wit.append(rec.machine)

    def to_dict(self):
        return {
            "pipeline": self.pipeline, "states": self.n_states, "symbols": self.n_symbols,
            "conditional": self.conditional, "truncated": self.truncated,
            "totals": self.totals, "stages": self.stages,
            "S": {"value": self.S, "witnesses": self.S_witnesses},
            "sigma": {"value": self.sigma, "witnesses": self.sigma_witnesses},
            "space": {"value": self.space, "witnesses": self.space_witnesses},
            "holdouts": self.holdouts, "assumed": self.assumed,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    def to_text(self):
        t = self.totals
        lines = [f"pipeline {self.pipeline}, {self.n_states} states, {self.n_symbols} symbols"]
        if self.conditional:
            lines.append(f"CONDITIONAL RESULT: {len(self.assumed)} machines assumed nonhalting")
        if self.truncated:
            lines.append("PARTIAL RUN: enumeration stopped at the machine limit")
        lines.append(f"{'stage':44s} {'nonhalt':>10s} {'halt':>10s}")
        for sid, row in self.stages.items():
            extra = f"  (+{row[ASSUMED]} assumed)" if row[ASSUMED] else ""
            lines.append(f"{sid:44s} {row[NONHALT]:>10,d} {row[HALT]:>10,d}{extra}")
        lines.append(f"total {t['total']:,d}: nonhalt {t[NONHALT]:,d}, halt {t[HALT]:,d}, "
                     f"assumed {t[ASSUMED]:,d}, unknown {t[UNKNOWN]:,d}")
        for name, attr in (("S", "S"), ("sigma", "sigma"), ("space", "space")):
            wit = getattr(self, f"{attr}_witnesses")
            more = f" (+{len(wit) - 3} more)" if len(wit) > 3 else ""
            lines.append(f"{name} = {getattr(self, attr):,d} by {', '.join(wit[:3])}{more}")
        if self.holdouts:
            lines.append(f"holdouts ({len(self.holdouts)}):")
            lines.extend(f"  {m}" for m in self.holdouts)
        return "\n".join(lines)


def run_value(n_states: int, n_symbols: int, pipeline="s4", jobs: int = 1,
              out=None, limit: Optional[int] = None, progress=None) -> RunSummary:
    """Enumerate every TNF machine, decide it, and aggregate.

    ``out`` receives one record line per machine; ``limit`` stops after that
    many machines (the summary is then marked truncated); ``progress`` is
    called with the running count every 100,000 machines.
    """
    pl = resolve_pipeline(pipeline)
    decide = PipelineDecider(pl.stages, pl.tables)
    summary = RunSummary(pl.name, n_states, n_symbols)
    for st in pl.stages:  # rows in pipeline order
        summary.stages.setdefault(st.id, {NONHALT: 0, HALT: 0, ASSUMED: 0})
    stream = enumerate_machines(n_states, n_symbols, decide, pl.symbol_order, jobs=jobs)
    if limit is not None:
        stream = itertools.islice(stream, limit)
    for rec in stream:
        summary.add(rec)
        if out is not None:
            out.write(rec.line() + "\n")
        if progress and summary.totals["total"] % 100_000 == 0:
            progress(summary.totals["total"])
    if limit is not None and summary.totals["total"] >= limit:
        summary.truncated = True
    return summary
