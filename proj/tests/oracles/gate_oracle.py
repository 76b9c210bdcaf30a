"""Independent model of the candidate gate: parse a diff, patch greedily, score.

Only what the fixture builders need. Texts are canonical (LF, final LF).
"""
import difflib

MALFORMED = "Malformed"
APPLY_FAILED = "ApplyFailed"
REJECTED = "RejectedSimilarity"
ELIGIBLE = "Eligible"


def lines_of(text):
    parts = text.split("\n")
    if parts and parts[-1] == "":
        parts.pop()
    return parts


def parse(raw):
    hunks, current = [], []
    for line in lines_of(raw):
        if line.endswith("\r"):
            line = line[:-1]
        if line == "":
            if current:
                hunks.append(current)
            current = []
            continue
        if line[0] not in " -+":
            return None
        current.append((line[0], line[1:]))
    if current:
        hunks.append(current)
    if not hunks:
        return None
    for h in hunks:
        if all(m == " " for m, _ in h):
            return None
        trailing = 0
        for m, _ in reversed(h):
            if m != " ":
                break
            trailing += 1
        if trailing > 1:
            return None
    return hunks


def apply(hunks, text):
    src = lines_of(text)
    out, cursor = [], 0
    for index, h in enumerate(hunks):
        anchor = [c for m, c in h if m != "+"]
        repl = [c for m, c in h if m != "-"]
        if not anchor:
            if index != 0:
                return None
            at = 0
        else:
            at = None
            for i in range(cursor, len(src) - len(anchor) + 1):
                if src[i:i + len(anchor)] == anchor:
                    at = i
                    break
            if at is None:
                return None
        out += src[cursor:at] + repl
        cursor = at + len(anchor)
    out += src[cursor:]
    return "".join(line + "\n" for line in out)


def ratio(a, b):
    return difflib.SequenceMatcher(None, a, b, autojunk=False).ratio()


def gate(original, raw, threshold=0.8):
    """(status, patched_text, similarity) for a diff-kind output."""
    hunks = parse(raw)
    if hunks is None:
        return MALFORMED, None, None
    patched = apply(hunks, original)
    if patched is None:
        return APPLY_FAILED, None, None
    s = ratio(original, patched)
    return (ELIGIBLE if s >= threshold else REJECTED), patched, s
