# -*- coding: utf-8 -*-

"""Version information for relfrac."""

_version = "2026.10.19"
_revision = "unknown"


def get_versions():
    """Get version information in the form used by the package __init__."""
    return {
        "version": _version,
        "full-revisionid": _revision,
        "dirty": False,
        "error": None,
        "date": "2026-10-19",
    }
