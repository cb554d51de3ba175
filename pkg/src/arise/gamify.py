"""Interaction tracking: points per event, levels from fixed thresholds.

Point values weight contribution (submitting reports) over consumption.
Both tables are parameters so deployments can retune them.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

DEFAULT_POINT_VALUES: dict[str, int] = {
    "view_report": 1,
    "open_poi_overlay": 2,
    "view_artwork": 2,
    "run_simulation": 5,
    "submit_report": 10,
}

# points >= thresholds[i] puts the user at level i+1.
DEFAULT_LEVEL_THRESHOLDS: tuple[int, ...] = (0, 50, 150, 400)


@dataclass
class UserProfile:
    user_id: str
    points: int = 0
    level: int = 1
    event_counts: dict[str, int] = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "user_id": self.user_id,
            "points": self.points,
            "level": self.level,
            "event_counts": dict(self.event_counts),
        }


def level_for(points: int, thresholds: tuple[int, ...] = DEFAULT_LEVEL_THRESHOLDS) -> int:
    level = 1
    for i, threshold in enumerate(thresholds):
        if points >= threshold:
            level = i + 1
    return level


def profile_from_counts(
    user_id: str,
    event_counts: dict[str, int],
    point_values: dict[str, int] = DEFAULT_POINT_VALUES,
    thresholds: tuple[int, ...] = DEFAULT_LEVEL_THRESHOLDS,
) -> UserProfile:
    """Points and level are a pure fold over the event counts."""
    points = sum(point_values[event] * count for event, count in event_counts.items())
    return UserProfile(
        user_id=user_id,
        points=points,
        level=level_for(points, thresholds),
        event_counts=dict(event_counts),
    )


class RewardLedger:
    """Per-user event application is serialized; distinct users run in parallel."""

    def __init__(
        self,
        point_values: dict[str, int] | None = None,
        thresholds: tuple[int, ...] | None = None,
    ):
        self.point_values = dict(point_values or DEFAULT_POINT_VALUES)
        self.thresholds = tuple(thresholds or DEFAULT_LEVEL_THRESHOLDS)
        self._profiles: dict[str, UserProfile] = {}
        self._user_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, user_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._user_locks.setdefault(user_id, threading.Lock())

    def record_event(self, user_id: str, event_type: str) -> UserProfile:
        if event_type not in self.point_values:
            raise ValueError(
                f"unknown event_type {event_type!r}; expected one of "
                f"{sorted(self.point_values)}"
            )
        with self._lock_for(user_id):
            profile = self._profiles.get(user_id)
            counts = dict(profile.event_counts) if profile else {}
            counts[event_type] = counts.get(event_type, 0) + 1
            updated = profile_from_counts(user_id, counts, self.point_values, self.thresholds)
            self._profiles[user_id] = updated
            return updated

    def profile(self, user_id: str) -> UserProfile:
        with self._lock_for(user_id):
            return self._profiles.get(user_id) or UserProfile(user_id=user_id)
