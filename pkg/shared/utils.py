from typing import Iterable


def lines_to_properties(
    lines: Iterable[str], separator=":", strip_chars=None, comment="#"
) -> dict:
    result = {}

    for line in lines:
        if comment and comment in line:
            line = line.split(comment, 1)[0]
        if separator not in line:
            continue
        key, value = line.split(separator, 1)
        result[key.strip(strip_chars)] = value.strip(strip_chars)

    return result
