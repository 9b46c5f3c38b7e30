"""Two-state headlight controller driven by danger messages on a virtual clock.

Off + danger turns the lamp on for ``tau`` seconds. While more than one
second remains, new danger messages are ignored; inside the final second a
danger message restarts the full cycle. When the countdown hits zero with
no danger the lamp goes off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

# Countdown comparisons absorb accumulated rounding from fractional frame times.
TIME_EPS = 1e-9
LISTEN_WINDOW_S = 1.0


@dataclass(frozen=True)
class LightState:
    tau_s: float = 3.0
    light_on: bool = False
    timer_s: float = 0.0
    last_tick: Optional[float] = None

    def __post_init__(self):
        if not self.tau_s > 0:
            raise ValueError("tau must be positive")
        if self.light_on != (self.timer_s > 0):
            raise ValueError("light_on must coincide with a running timer")
        if not 0 <= self.timer_s <= self.tau_s:
            raise ValueError("timer must lie in [0, tau]")


def _advance(state: LightState, now: float) -> tuple[bool, float]:
    """Lamp status and remaining countdown just before a message at ``now``."""
    if state.last_tick is not None and now < state.last_tick:
        raise ValueError(f"time went backwards: {now} < {state.last_tick}")
    if not state.light_on:
        return False, 0.0
    remaining = state.timer_s - (now - state.last_tick)
    if remaining < -TIME_EPS:
        # countdown ran out strictly between ticks; the lamp is already off
        return False, 0.0
    return True, (remaining if remaining > TIME_EPS else 0.0)


def tick(state: LightState, now: float, danger: bool) -> tuple[LightState, bool]:
    """Advance the controller to ``now`` and process one (possibly empty) message."""
    on, timer = _advance(state, now)
    if not on:
        if danger:
            on, timer = True, state.tau_s
    elif timer > LISTEN_WINDOW_S + TIME_EPS:
        pass
    elif danger:
        timer = state.tau_s
    elif timer == 0.0:
        on = False
    return LightState(state.tau_s, on, timer, now), on


@dataclass(frozen=True)
class Transition:
    timestamp: float
    light_on: bool

    def to_record(self) -> dict:
        return {"t": self.timestamp, "light": "on" if self.light_on else "off"}


@dataclass
class LightController:
    """Stateful wrapper that also integrates lit time and logs transitions."""

    tau_s: float = 3.0
    state: LightState = field(init=False)
    on_time_s: float = field(default=0.0, init=False)
    transitions: list[Transition] = field(default_factory=list, init=False)
    accepted: int = field(default=0, init=False)

    def __post_init__(self):
        self.state = LightState(self.tau_s)

    def tick(self, now: float, danger: bool) -> bool:
        prev = self.state
        was_on, remaining = _advance(prev, now)
        if prev.light_on:
            expires = prev.last_tick + prev.timer_s
            self.on_time_s += min(prev.timer_s, now - prev.last_tick)
            if not was_on:
                self.transitions.append(Transition(expires, False))
        new, on = tick(prev, now, danger)
        if danger and (not was_on or remaining <= LISTEN_WINDOW_S + TIME_EPS):
            self.accepted += 1
        if was_on and not on:
            self.transitions.append(Transition(expires, False))
        elif on and not was_on:
            self.transitions.append(Transition(now, True))
        self.state = new
        return on

    def finish(self, horizon: Optional[float] = None) -> float:
        """Account for the remaining countdown, capped at ``horizon`` if given."""
        st = self.state
        if st.light_on:
            remaining = st.timer_s if horizon is None else min(st.timer_s, max(0.0, horizon - st.last_tick))
            self.on_time_s += remaining
            end = st.last_tick + remaining
            self.transitions.append(Transition(end, False))
            self.state = LightState(st.tau_s, False, 0.0, end)
        return self.on_time_s


def on_duration(trace: Iterable[tuple[float, bool]], tau_s: float, horizon: Optional[float] = None) -> float:
    """Total lit seconds from replaying a (timestamp, danger) message trace."""
    ctl = LightController(tau_s)
    for t, danger in trace:
        ctl.tick(t, danger)
    return ctl.finish(horizon)
