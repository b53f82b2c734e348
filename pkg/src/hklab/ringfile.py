"""Line-oriented ring description files: field, variables, named ideals."""

import re

from .errors import ParseError
from .field import FieldSpec
from .poly import PolyRing, parse_poly, poly_str

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")
_NAMES_IN = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class RingFile:
    """Parsed ring description: field, polynomial ring, named ideals."""

    __slots__ = ("field", "ring", "ideals", "precision", "modulus_name")

    def __init__(self, field, ring, ideals, precision=None, modulus_name="t"):
        self.field = field
        self.ring = ring
        self.ideals = dict(ideals)
        self.precision = precision
        self.modulus_name = modulus_name

    def to_text(self):
        """Serialize back to the line format; reparsing reproduces the data."""
        lines = ["p %d" % self.field.p]
        if self.field.m > 1:
            lines.append(
                "ext %d %s" % (self.field.m, self._modulus_text())
            )
        lines.append("vars %s" % " ".join(self.ring.names))
        if self.precision is not None:
            lines.append("precision %d" % self.precision)
        for label, gens in self.ideals.items():
            lines.append(
                "ideal %s = %s" % (label, ", ".join(poly_str(g) for g in gens))
            )
        return "\n".join(lines) + "\n"

    def _modulus_text(self):
        name = self.modulus_name
        parts = []
        for i in range(self.field.m, -1, -1):
            c = self.field.modulus[i]
            if c == 0:
                continue
            if i == 0:
                parts.append("%d" % c)
            elif i == 1:
                parts.append(name if c == 1 else "%d*%s" % (c, name))
            else:
                parts.append(
                    "%s^%d" % (name, i) if c == 1 else "%d*%s^%d" % (c, name, i)
                )
        return " + ".join(parts)


def _parse_modulus(p, m, text):
    """Coefficient tuple of a univariate modulus expression of degree m."""
    names = sorted(set(_NAMES_IN.findall(text)))
    if len(names) != 1:
        raise ParseError(
            "the modulus must be univariate, found names %s" % (names,)
        )
    name = names[0]
    ring = PolyRing(FieldSpec(p), (name,))
    f = parse_poly(text, ring)
    coeffs = [0] * (m + 1)
    for mono, c in f.terms.items():
        if mono[0] > m:
            raise ParseError(
                "modulus degree %d exceeds the declared extension degree %d"
                % (mono[0], m)
            )
        coeffs[mono[0]] = c.i
    if coeffs[m] == 0:
        raise ParseError("modulus must have degree exactly %d" % m)
    return tuple(coeffs), name


def parse_ring_file(text):
    """Parse a ring description from its text."""
    p = None
    ext = None
    names = None
    precision = None
    ideal_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "p":
            if p is not None:
                raise ParseError("line %d: duplicate p" % lineno)
            try:
                p = int(rest)
            except ValueError:
                raise ParseError("line %d: p needs an integer" % lineno)
        elif key == "ext":
            if ext is not None:
                raise ParseError("line %d: duplicate ext" % lineno)
            m_text, _, modulus_text = rest.partition(" ")
            try:
                m = int(m_text)
            except ValueError:
                raise ParseError("line %d: ext needs a degree" % lineno)
            if not modulus_text.strip():
                raise ParseError("line %d: ext needs a modulus" % lineno)
            ext = (m, modulus_text.strip())
        elif key == "vars":
            if names is not None:
                raise ParseError("line %d: duplicate vars" % lineno)
            names = tuple(rest.split())
            if not names:
                raise ParseError("line %d: vars needs at least one name" % lineno)
            for name in names:
                if not _NAME.match(name):
                    raise ParseError(
                        "line %d: %r is not a variable name" % (lineno, name)
                    )
        elif key == "precision":
            if precision is not None:
                raise ParseError("line %d: duplicate precision" % lineno)
            try:
                precision = int(rest)
            except ValueError:
                raise ParseError("line %d: precision needs an integer" % lineno)
            if precision < 3:
                raise ParseError("line %d: precision must be at least 3" % lineno)
        elif key == "ideal":
            label, eq, exprs = rest.partition("=")
            label = label.strip()
            if not eq or not _NAME.match(label):
                raise ParseError(
                    "line %d: expected 'ideal <label> = <expr>[, ...]'" % lineno
                )
            ideal_lines.append((lineno, label, exprs))
        else:
            raise ParseError("line %d: unknown directive %r" % (lineno, key))
    if p is None:
        raise ParseError("missing p line")
    if names is None:
        raise ParseError("missing vars line")
    modulus_name = "t"
    try:
        if ext is None:
            field = FieldSpec(p)
        else:
            m, modulus_text = ext
            modulus, modulus_name = _parse_modulus(p, m, modulus_text)
            field = FieldSpec(p, m, modulus)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError("invalid field declaration: %s" % exc)
    if ext is not None and modulus_name in names:
        raise ParseError(
            "the field generator %r collides with a variable" % modulus_name
        )
    ring = PolyRing(field, names)
    ideals = {}
    for lineno, label, exprs in ideal_lines:
        if label in ideals:
            raise ParseError("line %d: duplicate ideal %r" % (lineno, label))
        gens = []
        for part in exprs.split(","):
            part = part.strip()
            if not part:
                raise ParseError("line %d: empty generator expression" % lineno)
            gens.append(parse_poly(part, ring))
        ideals[label] = gens
    return RingFile(field, ring, ideals, precision, modulus_name)


def load_ring_file(path):
    """Parse a ring description file from disk."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc))
    return parse_ring_file(text)
