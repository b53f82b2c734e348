"""Content-addressed on-disk cache of colength computations."""

import hashlib
import json
import os
import time

from .errors import NotMPrimaryError
from .groebner import colength
from .hk import bracket_staircase
from .poly import poly_str

CACHE_DIR_ENV = "HK_CACHE_DIR"


def default_cache_dir():
    """Cache directory from the environment, or the platform default."""
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return env
    base = os.environ.get("XDG_CACHE_HOME")
    if not base:
        base = os.path.join(os.path.expanduser("~"), ".cache")
    return os.path.join(base, "hklab")


def cache_key(field, names, generators, ideal, q):
    """Hex digest identifying one colength computation."""
    parts = [
        "p=%d" % field.p,
        "m=%d" % field.m,
        "modulus=%s" % (",".join("%d" % c for c in field.modulus)
                        if field.modulus else "-"),
        "vars=%s" % ",".join(names),
        "J=%s" % "|".join(sorted(poly_str(g) for g in generators)),
        "I=%s" % "|".join(sorted(poly_str(g) for g in ideal)),
        "q=%d" % q,
    ]
    return hashlib.sha256(";".join(parts).encode("utf-8")).hexdigest()


class ColengthCache:
    """One JSON file per entry; corrupt or foreign files are recomputed."""

    __slots__ = ("directory",)

    def __init__(self, directory=None):
        self.directory = directory or default_cache_dir()

    def path(self, key):
        return os.path.join(self.directory, key + ".json")

    def get(self, key):
        """Stored entry for the key, or None on miss or corruption."""
        try:
            with open(self.path(key), "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except (OSError, ValueError):
            return None
        if not isinstance(data, dict) or not isinstance(
            data.get("colength"), int
        ):
            return None
        return data

    def put(self, key, entry):
        """Atomically persist an entry (write a temp file, then rename)."""
        os.makedirs(self.directory, exist_ok=True)
        tmp = self.path(key) + ".tmp.%d" % os.getpid()
        with open(tmp, "w", encoding="utf-8") as handle:
            json.dump(entry, handle, sort_keys=True)
        os.replace(tmp, self.path(key))


def cached_colength(P, I=None, q=None, cache=None):
    """hk_colength plus staircase size and timing, through an optional cache.

    Returns (entry, hit) where entry has keys colength, basis_size, seconds.
    """
    ideal = list(I) if I is not None else P.maximal_ideal()
    key = cache_key(P.ring.field, P.ring.names, P.generators, ideal, q)
    if cache is not None:
        entry = cache.get(key)
        if entry is not None:
            return entry, True
    started = time.perf_counter()
    st = bracket_staircase(P, ideal, q)
    lam = colength(st)
    seconds = time.perf_counter() - started
    if lam is None:
        raise NotMPrimaryError(
            "the ideal is not m-primary modulo J (infinite colength)"
        )
    entry = {
        "key": key,
        "colength": lam,
        "basis_size": len(st.gens),
        "seconds": round(seconds, 6),
    }
    if cache is not None:
        cache.put(key, entry)
    return entry, False
