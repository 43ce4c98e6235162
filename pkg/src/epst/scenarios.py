"""Scenario scripts: declarative descriptions of one benchmark run (base
signal plus noise injections plus the scoring rule), loaded from config
files checked into the package. Stream construction is a pure function of
(scenario, seed)."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources
from typing import List, Optional, Tuple

from . import datagen
from .events import EventStream

Interval = Tuple[int, int]

SCENARIO_IDS = (
    "structured_same",
    "structured_diff",
    "structured_et0",
    "random_noise",
    "jitter",
    "jitter_dropout",
)

# seed mixing offsets so every noise op gets its own substream
_SEED_PATTERN = 1000
_SEED_NOISE = 777
_SEED_JITTER = 555
_SEED_DROPOUT = 333


@dataclass
class ScenarioScript:
    scenario_id: str
    num_channels: int = datagen.NUM_CHANNELS
    total_events: int = 1000
    bin_width: int = 250
    interference_intervals: List[Interval] = field(default_factory=list)
    interference_pattern_offsets: List[int] = field(default_factory=list)
    noise_intervals: List[Interval] = field(default_factory=list)
    jitter_onset_event: Optional[int] = None
    jitter_max: int = datagen.JITTER_MAX
    dropout_p: float = 0.0
    dropout_onset_time: Optional[int] = None
    scoring_mode: str = "structured"
    scoring_pad: int = 0
    epst_overrides: dict = field(default_factory=dict)

    def build_stream(self, seed: int) -> EventStream:
        stream = datagen.gen_base(seed, self.total_events, self.num_channels)
        for interval, offset in zip(
            self.interference_intervals, self.interference_pattern_offsets
        ):
            stream = datagen.add_structured_interference(
                stream, seed * _SEED_PATTERN + offset, [interval]
            )
        if self.noise_intervals:
            stream = datagen.add_random_events(
                stream, seed * _SEED_PATTERN + _SEED_NOISE, self.noise_intervals
            )
        if self.jitter_onset_event is not None:
            stream = datagen.apply_jitter(
                stream,
                seed * _SEED_PATTERN + _SEED_JITTER,
                self.jitter_onset_event,
                self.jitter_max,
            )
        if self.dropout_onset_time is not None:
            stream = datagen.apply_dropout(
                stream,
                seed * _SEED_PATTERN + _SEED_DROPOUT,
                self.dropout_p,
                self.dropout_onset_time,
            )
        return stream


def _parse_intervals(raw: str) -> List[Interval]:
    out = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        lo, hi = part.split("-")
        out.append((int(lo), int(hi)))
    return out


def load_scenario_file(path_or_text, from_text: bool = False) -> ScenarioScript:
    cp = configparser.ConfigParser()
    if from_text:
        cp.read_string(path_or_text)
    else:
        with open(path_or_text, encoding="utf-8") as fh:
            cp.read_file(fh)

    sc = cp["scenario"]
    script = ScenarioScript(
        scenario_id=sc["id"],
        num_channels=sc.getint("num_channels", datagen.NUM_CHANNELS),
        total_events=sc.getint("total_events", 1000),
        bin_width=sc.getint("bin_width", 250),
    )
    if cp.has_section("interference"):
        script.interference_intervals = _parse_intervals(cp["interference"]["intervals"])
        script.interference_pattern_offsets = [
            int(x) for x in cp["interference"]["pattern_seed_offsets"].split(",")
        ]
        if len(script.interference_intervals) != len(script.interference_pattern_offsets):
            raise ValueError("one pattern seed offset needed per interference interval")
    if cp.has_section("noise"):
        script.noise_intervals = _parse_intervals(cp["noise"]["intervals"])
    if cp.has_section("jitter"):
        script.jitter_onset_event = cp["jitter"].getint("onset_event")
        script.jitter_max = cp["jitter"].getint("max", datagen.JITTER_MAX)
    if cp.has_section("dropout"):
        script.dropout_p = cp["dropout"].getfloat("p")
        script.dropout_onset_time = cp["dropout"].getint("onset_time")
    if cp.has_section("scoring"):
        script.scoring_mode = cp["scoring"].get("mode", "structured")
        script.scoring_pad = cp["scoring"].getint("pad", 0)
    if cp.has_section("epst"):
        script.epst_overrides = {k: int(v) for k, v in cp["epst"].items()}
    return script


def load_scenario(scenario_id: str) -> ScenarioScript:
    if scenario_id not in SCENARIO_IDS:
        raise KeyError(f"unknown scenario {scenario_id!r}; known: {SCENARIO_IDS}")
    text = (
        resources.files("epst.scenario_configs")
        .joinpath(f"{scenario_id}.cfg")
        .read_text(encoding="utf-8")
    )
    return load_scenario_file(text, from_text=True)
