"""Bundled MicroC corpus: programs, input sets, and their registry.

Each program ships as a `.mc` source under programs/ and a JSON input set
under inputs/.  Input sets are reproducible: generate_inputs derives every
vector from a seed fixed per program name, and the bundled JSON files are
exactly what it produces (a test enforces this).

Registry flags describe the regime a program was designed for:
  loop_free / single_call_site: the exact-analysis regime (brute-force
  enumeration applies and per-vertex values are exact);
  converging: loop-free with call sites converging on shared helpers, where
  independence assumptions make values approximate (notes give the worst
  expected gap);
  the rest exercise loops, breaks and recursion end to end.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources

from .. import microc as mc
from ..profiler import RunInput


@dataclass(frozen=True)
class CorpusProgram:
    name: str
    loop_free: bool
    single_call_site: bool
    converging: bool
    runs: int
    input_length: int
    input_low: int
    input_high: int      # inclusive
    notes: str

    @property
    def exact(self) -> bool:
        return self.loop_free and self.single_call_site


PROGRAMS: tuple[CorpusProgram, ...] = (
    CorpusProgram(
        "guard_ladder", loop_free=True, single_call_site=True,
        converging=False, runs=120, input_length=3, input_low=-4,
        input_high=5,
        notes="early-return ladder; dead tail statement after the final "
              "return"),
    CorpusProgram(
        "validate_chain", loop_free=True, single_call_site=True,
        converging=False, runs=120, input_length=2, input_low=-4,
        input_high=5,
        notes="main -> validate -> normalize call chain with && and || "
              "conditions"),
    CorpusProgram(
        "switch_dispatch", loop_free=True, single_call_site=True,
        converging=False, runs=120, input_length=2, input_low=0,
        input_high=3,
        notes="4-arm switch with fall-through and a helper called in one "
              "arm"),
    CorpusProgram(
        "pointer_paths", loop_free=True, single_call_site=True,
        converging=False, runs=120, input_length=1, input_low=-4,
        input_high=5,
        notes="pointer guards (== NULL, !q); at runtime every pointer is "
              "NULL, so measured values are one-sided by design"),
    CorpusProgram(
        "shortcircuit_mix", loop_free=True, single_call_site=True,
        converging=False, runs=120, input_length=3, input_low=-4,
        input_high=5,
        notes="nested !, && and || conditions; eight condition leaves"),
    CorpusProgram(
        "diamond_merge", loop_free=True, single_call_site=True,
        converging=False, runs=120, input_length=2, input_low=-4,
        input_high=5,
        notes="if/else diamonds plus a never-called helper whose vertices "
              "stay at likelihood 0"),
    CorpusProgram(
        "fanin_calls", loop_free=True, single_call_site=False,
        converging=True, runs=120, input_length=2, input_low=-4,
        input_high=5,
        notes="short-circuit then-branch at 0.75 and a helper entered from "
              "two independently guarded call sites at 0.75; both exact"),
    CorpusProgram(
        "converge_paths", loop_free=True, single_call_site=False,
        converging=True, runs=120, input_length=5, input_low=-4,
        input_high=5,
        notes="two stages under one shared guard both reach log_event; "
              "cross-function independence overestimates its entry by "
              "0.015625 (0.234375 vs exact 0.21875)"),
    CorpusProgram(
        "triage_tree", loop_free=True, single_call_site=False,
        converging=True, runs=120, input_length=2, input_low=-4,
        input_high=5,
        notes="helper called from three mutually exclusive branches of one "
              "function; the multi-site walk keeps this exact (0.75)"),
    CorpusProgram(
        "loop_pipeline", loop_free=False, single_call_site=True,
        converging=False, runs=120, input_length=6, input_low=-8,
        input_high=7,
        notes="while loop with clamped bound 1..4, helper called every "
              "iteration; all loops execute at least once on all inputs"),
    CorpusProgram(
        "scan_input", loop_free=False, single_call_site=True,
        converging=False, runs=120, input_length=4, input_low=-4,
        input_high=4,
        notes="fixed 3-pass for loop over a switch; dead statements and a "
              "dead condition after the final return"),
    CorpusProgram(
        "switch_stream", loop_free=False, single_call_site=True,
        converging=False, runs=120, input_length=10, input_low=-4,
        input_high=5,
        notes="while loop with a break guard and a fall-through switch; "
              "the loop always enters and always terminates"),
    CorpusProgram(
        "big_mix", loop_free=False, single_call_site=False,
        converging=True, runs=120, input_length=24, input_low=-4,
        input_high=5,
        notes="large mixed program (close to the 500-vertex cap) with "
              "loops, switches, bounded recursion and converging calls; "
              "batch-vs-fresh differential target"),
)

BY_NAME = {p.name: p for p in PROGRAMS}


def _data_root():
    return resources.files(__package__)


def source_text(name: str) -> str:
    if name not in BY_NAME:
        raise KeyError(f"unknown corpus program {name!r}")
    return (_data_root() / "programs" / f"{name}.mc").read_text("utf-8")


def load_program(name: str) -> mc.Program:
    return mc.parse_program(source_text(name), f"{name}.mc")


def generate_inputs(program: CorpusProgram) -> list[RunInput]:
    """Deterministic uniform input vectors for one corpus program."""
    rng = random.Random(f"elan-corpus-{program.name}")
    runs = []
    for index in range(program.runs):
        values = tuple(rng.randint(program.input_low, program.input_high)
                       for _ in range(program.input_length))
        runs.append(RunInput(name=f"{program.name}-{index:03d}",
                             values=values))
    return runs


def inputs_json(program: CorpusProgram) -> str:
    payload = [{"name": run.name, "values": list(run.values)}
               for run in generate_inputs(program)]
    return json.dumps(payload, indent=1) + "\n"


def bundled_inputs_text(name: str) -> str:
    if name not in BY_NAME:
        raise KeyError(f"unknown corpus program {name!r}")
    return (_data_root() / "inputs" / f"{name}.json").read_text("utf-8")


def load_inputs(name: str) -> list[RunInput]:
    data = json.loads(bundled_inputs_text(name))
    return [RunInput.of(obj["name"], obj["values"]) for obj in data]
