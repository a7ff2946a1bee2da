"""Closed language registry shared by every stage of the pipeline.

Languages are declared, never detected; anything outside this registry is
rejected at ingest time.
"""

from __future__ import annotations

# English display names, used verbatim in translation-instruction templates.
DISPLAY_NAMES = {
    "liv": "Livonian",
    "vro": "Võro",
    "kpv": "Komi",
    "et": "Estonian",
    "fi": "Finnish",
    "en": "English",
    "lv": "Latvian",
    "ru": "Russian",
}

LANGUAGES = frozenset(DISPLAY_NAMES)


class UnknownLanguageError(ValueError):
    pass


def check_lang(code: str) -> str:
    if code not in LANGUAGES:
        raise UnknownLanguageError(
            f"unknown language code {code!r}; expected one of {sorted(LANGUAGES)}"
        )
    return code


def display_name(code: str) -> str:
    return DISPLAY_NAMES[check_lang(code)]
