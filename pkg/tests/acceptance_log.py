"""PASS/FAIL lines collected by the acceptance suite, printed in the terminal summary."""

LINES: list[str] = []
