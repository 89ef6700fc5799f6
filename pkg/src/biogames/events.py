"""Historical events by year: external HTTP source with a bundled fallback.

The exercise generator only needs ``events_for_year(year)``; anything with
that method works as a provider. The bundled dataset covers 1900-2000 with
at least one event per year so the whole platform runs air-gapped.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Optional, Protocol

import requests

BUNDLED_DATASET = "historical_events.json"


class MalformedDataset(Exception):
    """The events dataset file could not be parsed or has the wrong shape."""


class EventsProvider(Protocol):
    def events_for_year(self, year: int) -> list[str]:
        """Event texts for a calendar year; empty list when none known."""
        ...


def load_fallback_events(path: Optional[str] = None) -> dict[int, list[str]]:
    """Load a year -> event texts index from a dataset file.

    With no path, loads the dataset bundled with the package.
    """
    try:
        if path is None:
            raw = (
                resources.files("biogames.data")
                .joinpath(BUNDLED_DATASET)
                .read_text(encoding="utf-8")
            )
        else:
            with open(path, encoding="utf-8") as f:
                raw = f.read()
        entries = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedDataset(str(exc)) from exc
    if not isinstance(entries, list):
        raise MalformedDataset("expected a list of {year, event_text} entries")
    index: dict[int, list[str]] = {}
    for entry in entries:
        try:
            year = int(entry["year"])
            text = str(entry["event_text"])
        except (TypeError, KeyError, ValueError) as exc:
            raise MalformedDataset(f"bad entry: {entry!r}") from exc
        index.setdefault(year, []).append(text)
    return index


class FallbackEventsProvider:
    """Offline provider backed by the bundled (or a custom) dataset file."""

    def __init__(self, path: Optional[str] = None):
        self._index = load_fallback_events(path)

    @property
    def years(self) -> list[int]:
        return sorted(self._index)

    def events_for_year(self, year: int) -> list[str]:
        return list(self._index.get(year, []))


class HttpEventsProvider:
    """Provider querying an external HTTP service: GET {base_url}/events?year=N.

    The response must be a JSON list of {year, event_text} objects; entries
    for other years are dropped. Network or parse failures raise
    ``ExternalEventsError``.
    """

    def __init__(self, base_url: str, timeout: float = 5.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def events_for_year(self, year: int) -> list[str]:
        try:
            resp = requests.get(
                f"{self.base_url}/events", params={"year": year}, timeout=self.timeout
            )
            resp.raise_for_status()
            entries = resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise ExternalEventsError(str(exc)) from exc
        if not isinstance(entries, list):
            raise ExternalEventsError("expected a JSON list")
        return [
            str(e["event_text"])
            for e in entries
            if isinstance(e, dict) and e.get("year") == year and "event_text" in e
        ]


class ExternalEventsError(Exception):
    """The external events service failed (unreachable, bad status, bad body)."""


class ChainedEventsProvider:
    """External source first, bundled fallback when it fails or returns empty."""

    def __init__(self, external: Optional[HttpEventsProvider], fallback: FallbackEventsProvider):
        self.external = external
        self.fallback = fallback
        self.last_external_error: Optional[Exception] = None

    def events_for_year(self, year: int) -> list[str]:
        self.last_external_error = None
        if self.external is not None:
            try:
                found = self.external.events_for_year(year)
                if found:
                    return found
            except ExternalEventsError as exc:
                self.last_external_error = exc
        return self.fallback.events_for_year(year)
