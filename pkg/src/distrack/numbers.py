"""Surface-form expansion for integer numerals.

A figure quoted in a post can be written many ways ("10000", "10,000",
"10.000", "10 thousand", "ten thousand"); search queries must cover all
of them.  The magnitude table is bilingual (English/Spanish) and the
language in effect selects which vocabulary is emitted.
"""

from __future__ import annotations

import re

_PLAIN = re.compile(r"\d+\Z")
_COMMA_GROUPED = re.compile(r"\d{1,3}(?:,\d{3})+\Z")
_PERIOD_GROUPED = re.compile(r"\d{1,3}(?:\.\d{3})+\Z")

# (word for multiplier 1, word for multiplier > 1, value)
_MAGNITUDES = {
    "en": (
        ("billion", "billion", 10**9),
        ("million", "million", 10**6),
        ("thousand", "thousand", 10**3),
    ),
    # Spanish long scale: billón is 10^12.
    "es": (
        ("billón", "billones", 10**12),
        ("millón", "millones", 10**6),
        ("mil", "mil", 10**3),
    ),
}

_EN_UNITS = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen",
]
_EN_TENS = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
    "eighty", "ninety",
]


def _spell_en(n: int) -> str:
    """Spell 0 <= n <= 999 in English ("two hundred fifty")."""
    if n < 20:
        return _EN_UNITS[n]
    if n < 100:
        tens, rem = divmod(n, 10)
        return _EN_TENS[tens] + ("-" + _EN_UNITS[rem] if rem else "")
    hundreds, rem = divmod(n, 100)
    head = _EN_UNITS[hundreds] + " hundred"
    return head + (" " + _spell_en(rem) if rem else "")


_ES_UNITS = [
    "cero", "uno", "dos", "tres", "cuatro", "cinco", "seis", "siete",
    "ocho", "nueve", "diez", "once", "doce", "trece", "catorce", "quince",
    "dieciséis", "diecisiete", "dieciocho", "diecinueve", "veinte",
    "veintiuno", "veintidós", "veintitrés", "veinticuatro", "veinticinco",
    "veintiséis", "veintisiete", "veintiocho", "veintinueve",
]
_ES_TENS = {
    30: "treinta", 40: "cuarenta", 50: "cincuenta", 60: "sesenta",
    70: "setenta", 80: "ochenta", 90: "noventa",
}
_ES_HUNDREDS = {
    1: "ciento", 2: "doscientos", 3: "trescientos", 4: "cuatrocientos",
    5: "quinientos", 6: "seiscientos", 7: "setecientos", 8: "ochocientos",
    9: "novecientos",
}


def _spell_es(n: int) -> str:
    """Spell 0 <= n <= 999 in Spanish."""
    if n < 30:
        return _ES_UNITS[n]
    if n < 100:
        tens, rem = divmod(n, 10)
        head = _ES_TENS[tens * 10]
        return head + (" y " + _ES_UNITS[rem] if rem else "")
    if n == 100:
        return "cien"
    hundreds, rem = divmod(n, 100)
    return _ES_HUNDREDS[hundreds] + (" " + _spell_es(rem) if rem else "")


def _es_apocope(spelled: str) -> str:
    # "uno" loses its final vowel before a magnitude noun.
    if spelled.endswith("iuno"):
        return spelled[:-4] + "iún"
    if spelled.endswith("uno"):
        return spelled[:-1]
    return spelled


def _parse_numeral(token: str) -> int | None:
    if _PLAIN.fullmatch(token):
        return int(token)
    if _COMMA_GROUPED.fullmatch(token):
        return int(token.replace(",", ""))
    if _PERIOD_GROUPED.fullmatch(token):
        return int(token.replace(".", ""))
    return None


def _magnitude_forms(value: int, language: str) -> list[str]:
    """Digit-plus-word and fully spelled forms, largest magnitude first hit."""
    for singular, plural, magnitude in _MAGNITUDES[language]:
        mult, rem = divmod(value, magnitude)
        if rem == 0 and 1 <= mult <= 999:
            word = singular if mult == 1 else plural
            digit_form = f"{mult} {word}"
            if language == "es":
                spelled_mult = _es_apocope(_spell_es(mult))
                # "mil" stands alone; one never says "uno mil".
                spelled = word if (mult == 1 and word == "mil") else f"{spelled_mult} {word}"
            else:
                spelled = f"{_spell_en(mult)} {word}"
            return [digit_form, spelled]
    return []


def expand_numbers(text: str, language: str = "en") -> list[str]:
    """Alternative surface forms for an integer numeral token.

    Returns, deduplicated and in a fixed order: the original form, plain
    digits, comma-grouped, period-grouped, then digit+magnitude-word and
    fully spelled forms when the value is an exact multiple of a named
    magnitude.  Non-numeral input passes through as a single-element list.
    """
    if language not in _MAGNITUDES:
        language = "en"
    token = text.strip()
    value = _parse_numeral(token)
    if value is None:
        return [text]
    forms = [token, str(value), f"{value:,}", f"{value:,}".replace(",", ".")]
    forms.extend(_magnitude_forms(value, language))
    seen: set[str] = set()
    unique = []
    for form in forms:
        if form not in seen:
            seen.add(form)
            unique.append(form)
    return unique


def is_numeral(text: str) -> bool:
    return _parse_numeral(text.strip()) is not None
