"""Scripted rate-reference programs with analytic derivatives.

Each program maps time to a :class:`~mfcquad.attitude.RateReference`.
Profiles are piecewise level holds joined by raised-cosine edges, so the
value and its first two derivatives are available in closed form at every
instant; the controllers' feedforward terms therefore never see
differencing noise. A replay loader with a finite-differencing fallback
covers externally recorded rate logs.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Callable

import numpy as np

from .attitude import RATE_LIMIT, RateReference

ReferenceFn = Callable[[float], RateReference]


class SegmentProfile:
    """Levels held for dwell times, connected by raised-cosine edges."""

    def __init__(self, levels: list[tuple[float, float]], edge_time: float):
        if edge_time <= 0.0:
            raise ValueError("edge_time must be > 0")
        for level, dwell in levels:
            if abs(level) > RATE_LIMIT:
                raise ValueError(f"level {level} exceeds rate limit {RATE_LIMIT}")
            if dwell < 0.0:
                raise ValueError("dwell must be >= 0")
        self.edge_time = edge_time
        # Segment list: (t_start, t_end, kind, a, b); holds carry a == b.
        self.segments: list[tuple[float, float, float, float]] = []
        t = 0.0
        prev_level = levels[0][0]
        first_dwell = levels[0][1]
        self.segments.append((t, t + first_dwell, prev_level, prev_level))
        t += first_dwell
        for level, dwell in levels[1:]:
            self.segments.append((t, t + edge_time, prev_level, level))
            t += edge_time
            self.segments.append((t, t + dwell, level, level))
            t += dwell
            prev_level = level
        self.total_time = t
        self.final_level = prev_level

    def value(self, t: float) -> tuple[float, float, float]:
        """Return (value, first derivative, second derivative) at time t."""
        if t >= self.total_time:
            return (self.final_level, 0.0, 0.0)
        if t < 0.0:
            first = self.segments[0]
            return (first[2], 0.0, 0.0)
        for t0, t1, a, b in self.segments:
            if t0 <= t < t1:
                if a == b:
                    return (a, 0.0, 0.0)
                d = t1 - t0
                x = (t - t0) / d
                half = 0.5 * (b - a)
                return (
                    a + half * (1.0 - math.cos(math.pi * x)),
                    half * (math.pi / d) * math.sin(math.pi * x),
                    half * (math.pi / d) ** 2 * math.cos(math.pi * x),
                )
        return (self.final_level, 0.0, 0.0)


_ZERO = SegmentProfile([(0.0, 1.0)], edge_time=0.1)


def _make_reference(
    roll: SegmentProfile, pitch: SegmentProfile, yaw: SegmentProfile
) -> ReferenceFn:
    def fn(t: float) -> RateReference:
        r, rd, rdd = roll.value(t)
        p, pd, pdd = pitch.value(t)
        y, yd, ydd = yaw.value(t)
        return RateReference(
            roll_rate=r, pitch_rate=p, yaw_rate=y,
            roll_accel=rd, pitch_accel=pd, yaw_accel=yd,
            roll_jerk=rdd, pitch_jerk=pdd, yaw_jerk=ydd,
        )

    return fn


def doublet_program() -> ReferenceFn:
    """Alternating +-200 deg/s roll pulses, 1 s dwell, smoothed edges.

    The edges are raised cosines (0.35 s) rather than true jumps so the
    analytic feedforward exists; a hard discontinuity would make tracking
    error a property of the reference, not the controller.
    """
    roll = SegmentProfile(
        [(0.0, 0.5), (200.0, 1.0), (-200.0, 1.0), (200.0, 1.0), (-200.0, 1.0), (0.0, 1.0)],
        edge_time=0.6,
    )
    return _make_reference(roll, _ZERO, _ZERO)


def chirp_program(duration: float) -> ReferenceFn:
    """Roll-axis sine sweep, 0.5 -> 4 Hz, 150 deg/s amplitude."""
    amp = 150.0
    f0, f1 = 0.5, 4.0
    sweep = (f1 - f0) / max(duration, 1e-9)

    def fn(t: float) -> RateReference:
        theta = 2.0 * math.pi * (f0 * t + 0.5 * sweep * t * t)
        theta_d = 2.0 * math.pi * (f0 + sweep * t)
        theta_dd = 2.0 * math.pi * sweep
        s, c = math.sin(theta), math.cos(theta)
        return RateReference(
            roll_rate=amp * s,
            roll_accel=amp * theta_d * c,
            roll_jerk=amp * (theta_dd * c - theta_d * theta_d * s),
        )

    return fn


def _acro_profiles() -> dict[str, SegmentProfile]:
    """Concatenated aggressive maneuvers with simultaneous multi-axis motion."""
    roll = SegmentProfile(
        [
            (0.0, 0.6), (300.0, 0.7), (0.0, 0.3), (-300.0, 0.7), (0.0, 0.5),
            (220.0, 0.6), (-220.0, 0.6), (0.0, 0.4), (260.0, 0.5), (-260.0, 0.5),
            (0.0, 1.0),
        ],
        edge_time=0.8,
    )
    pitch = SegmentProfile(
        [
            (0.0, 1.4), (110.0, 0.9), (-110.0, 0.9), (0.0, 0.9),
            (90.0, 0.8), (-90.0, 0.8), (0.0, 1.0),
        ],
        edge_time=0.5,
    )
    yaw = SegmentProfile(
        [(0.0, 2.0), (45.0, 1.4), (-45.0, 1.4), (0.0, 1.0), (40.0, 1.2), (0.0, 1.0)],
        edge_time=0.9,
    )
    return {"roll": roll, "pitch": pitch, "yaw": yaw}


def acro_program(axes: tuple[str, ...] = ("roll", "pitch", "yaw")) -> ReferenceFn:
    """The acro script, optionally restricted to a subset of axes."""
    profiles = _acro_profiles()
    roll = profiles["roll"] if "roll" in axes else _ZERO
    pitch = profiles["pitch"] if "pitch" in axes else _ZERO
    yaw = profiles["yaw"] if "yaw" in axes else _ZERO
    return _make_reference(roll, pitch, yaw)


def replay_program(path: str | Path, dt_hint: float = 0.004) -> ReferenceFn:
    """Replay a recorded rate log (CSV: t, roll, pitch, yaw in deg/s).

    Derivatives are not in the log, so they are rebuilt by finite
    differencing the resampled channels; noisier than the analytic
    programs, but good enough for feedforward on replayed flights.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header[:4]] != ["t", "roll", "pitch", "yaw"]:
            raise ValueError("replay file must have header t,roll,pitch,yaw")
        for row in reader:
            rows.append([float(v) for v in row[:4]])
    if len(rows) < 2:
        raise ValueError("replay file needs at least two samples")
    data = np.asarray(rows)
    t = data[:, 0]
    channels = data[:, 1:4].T
    if np.max(np.abs(channels)) > RATE_LIMIT:
        raise ValueError(f"replay rates exceed limit {RATE_LIMIT} deg/s")
    first = [np.gradient(ch, t) for ch in channels]
    second = [np.gradient(d, t) for d in first]

    def fn(tq: float) -> RateReference:
        tq = min(max(tq, t[0]), t[-1])
        vals = [float(np.interp(tq, t, ch)) for ch in channels]
        ds = [float(np.interp(tq, t, d)) for d in first]
        dds = [float(np.interp(tq, t, d)) for d in second]
        return RateReference(
            roll_rate=vals[0], pitch_rate=vals[1], yaw_rate=vals[2],
            roll_accel=ds[0], pitch_accel=ds[1], yaw_accel=ds[2],
            roll_jerk=dds[0], pitch_jerk=dds[1], yaw_jerk=dds[2],
        )

    return fn


def zero_program() -> ReferenceFn:
    def fn(t: float) -> RateReference:
        return RateReference()

    return fn


def get_reference_program(name: str, duration: float) -> ReferenceFn:
    """Resolve a program by name; ``replay:<path>`` loads a rate log."""
    if name == "zero":
        return zero_program()
    if name == "doublet":
        return doublet_program()
    if name == "chirp":
        return chirp_program(duration)
    if name == "acro-script":
        return acro_program()
    if name == "acro-roll":
        return acro_program(("roll",))
    if name == "acro-pitch":
        return acro_program(("pitch",))
    if name == "acro-yaw":
        return acro_program(("yaw",))
    if name == "acro-pitch-yaw":
        return acro_program(("pitch", "yaw"))
    if name.startswith("replay:"):
        return replay_program(name.split(":", 1)[1])
    raise ValueError(f"unknown reference program {name!r}")


REFERENCE_PROGRAMS = (
    "zero", "doublet", "chirp", "acro-script",
    "acro-roll", "acro-pitch", "acro-yaw", "acro-pitch-yaw",
)
