"""Shared helpers for the test suite."""

from __future__ import annotations

from pathlib import Path

from mpst.syntax import parse

PROTOCOLS = Path(__file__).resolve().parent.parent / "protocols"


def load_protocol(name: str):
    return parse((PROTOCOLS / f"{name}.mps").read_text())
