"""Hot array kernels with a numba fast path and a pure-numpy fallback.

The exhaustive searches (batch triangle validation, canonical-labeling
deduplication, and the amalgam pair scan) dominate runtime; everything here
operates on integer-encoded distance matrices plus the value lattice's
meet/join/leq tables.

Backend selection: the ``LATUM_BACKEND`` environment variable may be set to
``numba`` or ``numpy``; the default is numba when importable.  Both backends
produce bit-identical results, which the test suite asserts.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

_VALID_BACKENDS = ("numba", "numpy")
_forced: Optional[str] = None
_numba_mod = None
_numba_failed = False


def _try_numba():
    global _numba_mod, _numba_failed
    if _numba_mod is None and not _numba_failed:
        try:
            import numba  # noqa: F401

            _numba_mod = numba
        except ImportError:
            _numba_failed = True
    return _numba_mod


def backend_name() -> str:
    """The active kernel backend, resolving the env flag on each call."""
    if _forced is not None:
        return _forced
    env = os.environ.get("LATUM_BACKEND", "").strip().lower()
    if env:
        if env not in _VALID_BACKENDS:
            raise RuntimeError(f"LATUM_BACKEND must be one of {_VALID_BACKENDS}, got {env!r}")
        if env == "numba" and _try_numba() is None:
            raise RuntimeError("LATUM_BACKEND=numba but numba is not importable")
        return env
    return "numba" if _try_numba() is not None else "numpy"


def set_backend(name: Optional[str]):
    """Force a backend (for tests and benchmarks); None restores env-driven
    selection."""
    global _forced
    if name is not None and name not in _VALID_BACKENDS:
        raise ValueError(f"backend must be one of {_VALID_BACKENDS}")
    if name == "numba" and _try_numba() is None:
        raise RuntimeError("numba backend requested but numba is not importable")
    _forced = name


def upper_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column index arrays of the strict upper triangle in lex order."""
    iu, ju = [], []
    for i in range(n):
        for j in range(i + 1, n):
            iu.append(i)
            ju.append(j)
    return np.asarray(iu, dtype=np.int64), np.asarray(ju, dtype=np.int64)


def triangle_checks(n: int, new_from: int = 0) -> np.ndarray:
    """Oriented triangle checks (x, y, z) meaning d(x,y) <= d(x,z) \\/ d(z,y),
    for every unordered triple touching an index >= ``new_from``."""
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if k < new_from:
                    continue
                rows.extend([(i, j, k), (i, k, j), (j, k, i)])
    return np.asarray(rows, dtype=np.int64).reshape(-1, 3)


def cross_checks(a: int, kb: int, kc: int) -> np.ndarray:
    """Oriented triangle checks over the amalgam union that touch at least
    one new point on each side; all other triples live inside one factor."""
    u = a + kb + kc
    rows = []
    for i in range(u):
        for j in range(i + 1, u):
            for k in range(j + 1, u):
                tri = (i, j, k)
                has_b = any(a <= t < a + kb for t in tri)
                has_c = any(t >= a + kb for t in tri)
                if has_b and has_c:
                    rows.extend([(i, j, k), (i, k, j), (j, k, i)])
    return np.asarray(rows, dtype=np.int64).reshape(-1, 3)


# ---------------------------------------------------------------------------
# numpy implementations


def _triangle_mask_numpy(mats, checks, leq, join):
    ok = np.ones(mats.shape[0], dtype=bool)
    for x, y, z in checks:
        ok &= leq[mats[:, x, y], join[mats[:, x, z], mats[:, z, y]]]
    return ok


def _lex_less(a, b):
    """Rowwise lexicographic a < b for (B, K) integer arrays."""
    lt = np.zeros(a.shape[0], dtype=bool)
    eq = np.ones(a.shape[0], dtype=bool)
    for k in range(a.shape[1]):
        lt |= eq & (a[:, k] < b[:, k])
        eq &= a[:, k] == b[:, k]
    return lt


def _canonical_mask_numpy(mats, perms):
    n = mats.shape[1]
    iu, ju = upper_pairs(n)
    orig = mats[:, iu, ju]
    keep = np.ones(mats.shape[0], dtype=bool)
    for perm in perms:
        permuted = mats[:, perm[iu], :][:, np.arange(len(iu)), perm[ju]]
        keep &= ~_lex_less(permuted, orig)
    return keep


def _scan_pairs_numpy(bmats, cmats, a, checks, leq, meet, join, bottom, top, same_side):
    NB, nb, _ = bmats.shape
    NC, nc, _ = cmats.shape
    kb, kc = nb - a, nc - a
    u = a + kb + kc
    pairs = 0
    ident = 0
    for ib in range(NB):
        b = bmats[ib]
        jstart = ib if same_side else 0
        m = NC - jstart
        if m <= 0:
            continue
        c_nb = cmats[jstart:, a:, :a]
        if a == 0:
            cross = np.full((m, kb, kc), top, dtype=np.int64)
        else:
            joins = join[b[a:, :a][None, :, None, :], c_nb[:, None, :, :]]
            cross = joins[..., 0]
            for k in range(1, a):
                cross = meet[cross, joins[..., k]]
        d = np.zeros((m, u, u), dtype=np.int64)
        d[:, :nb, :nb] = b
        d[:, a + kb:, a + kb:] = cmats[jstart:, a:, a:]
        d[:, a + kb:, :a] = c_nb
        d[:, :a, a + kb:] = np.swapaxes(c_nb, 1, 2)
        d[:, a:a + kb, a + kb:] = cross
        d[:, a + kb:, a:a + kb] = np.swapaxes(cross, 1, 2)
        viol = np.zeros((m, checks.shape[0]), dtype=bool)
        for t, (x, y, z) in enumerate(checks):
            viol[:, t] = ~leq[d[:, x, y], join[d[:, x, z], d[:, z, y]]]
        bad_rows = viol.any(axis=1)
        if bad_rows.any():
            local = int(np.argmax(bad_rows))
            t = int(np.argmax(viol[local]))
            pairs += local + 1
            ident += int((cross[:local + 1] == bottom).sum())
            return ib, jstart + local, pairs, ident, t
        pairs += m
        ident += int((cross == bottom).sum())
    return -1, -1, pairs, ident, -1


# ---------------------------------------------------------------------------
# numba implementations (compiled lazily on first use)

_nb_cache: dict[str, object] = {}


def _numba_kernels():
    if _nb_cache:
        return _nb_cache
    from numba import njit

    @njit(cache=True)
    def triangle_mask(mats, checks, leq, join):
        B = mats.shape[0]
        out = np.ones(B, dtype=np.bool_)
        for b in range(B):
            for t in range(checks.shape[0]):
                x, y, z = checks[t, 0], checks[t, 1], checks[t, 2]
                if not leq[mats[b, x, y], join[mats[b, x, z], mats[b, z, y]]]:
                    out[b] = False
                    break
        return out

    @njit(cache=True)
    def canonical_mask(mats, perms, iu, ju):
        B = mats.shape[0]
        K = iu.shape[0]
        P = perms.shape[0]
        keep = np.ones(B, dtype=np.bool_)
        for b in range(B):
            for p in range(P):
                for k in range(K):
                    pv = mats[b, perms[p, iu[k]], perms[p, ju[k]]]
                    ov = mats[b, iu[k], ju[k]]
                    if pv < ov:
                        keep[b] = False
                        break
                    if pv > ov:
                        break
                if not keep[b]:
                    break
        return keep

    @njit(cache=True)
    def scan_pairs(bmats, cmats, a, checks, leq, meet, join, bottom, top, same_side):
        NB, nb = bmats.shape[0], bmats.shape[1]
        NC, nc = cmats.shape[0], cmats.shape[1]
        kb = nb - a
        kc = nc - a
        u = a + kb + kc
        d = np.zeros((u, u), dtype=np.int64)
        pairs = 0
        ident = 0
        for ib in range(NB):
            for x in range(nb):
                for y in range(nb):
                    d[x, y] = bmats[ib, x, y]
            jstart = ib if same_side else 0
            for ic in range(jstart, NC):
                for x in range(kc):
                    ux = a + kb + x
                    for k in range(a):
                        d[ux, k] = cmats[ic, a + x, k]
                        d[k, ux] = d[ux, k]
                    for y in range(kc):
                        d[ux, a + kb + y] = cmats[ic, a + x, a + y]
                for i in range(kb):
                    for j in range(kc):
                        v = top
                        for k in range(a):
                            v = meet[v, join[d[a + i, k], d[a + kb + j, k]]]
                        d[a + i, a + kb + j] = v
                        d[a + kb + j, a + i] = v
                        if v == bottom:
                            ident += 1
                pairs += 1
                for t in range(checks.shape[0]):
                    x, y, z = checks[t, 0], checks[t, 1], checks[t, 2]
                    if not leq[d[x, y], join[d[x, z], d[z, y]]]:
                        return ib, ic, pairs, ident, t
        return -1, -1, pairs, ident, -1

    _nb_cache["triangle_mask"] = triangle_mask
    _nb_cache["canonical_mask"] = canonical_mask
    _nb_cache["scan_pairs"] = scan_pairs
    return _nb_cache


# ---------------------------------------------------------------------------
# dispatch


def triangle_mask(mats: np.ndarray, checks: np.ndarray, leq: np.ndarray, join: np.ndarray) -> np.ndarray:
    """Validity mask over a batch of distance matrices: True where every
    oriented triangle check passes."""
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    if checks.size == 0 or mats.shape[0] == 0:
        return np.ones(mats.shape[0], dtype=bool)
    if backend_name() == "numba":
        return _numba_kernels()["triangle_mask"](mats, checks, leq, join)
    return _triangle_mask_numpy(mats, checks, leq, join)


def canonical_mask(mats: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """True where a matrix's upper triangle is lexicographically minimal
    across the given point relabelings."""
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    if mats.shape[0] == 0 or perms.shape[0] == 0 or mats.shape[1] < 2:
        return np.ones(mats.shape[0], dtype=bool)
    if backend_name() == "numba":
        iu, ju = upper_pairs(mats.shape[1])
        return _numba_kernels()["canonical_mask"](mats, perms, iu, ju)
    return _canonical_mask_numpy(mats, perms)


def scan_amalgam_pairs(bmats: np.ndarray, cmats: np.ndarray, a: int, checks: np.ndarray,
                       leq: np.ndarray, meet: np.ndarray, join: np.ndarray,
                       bottom: int, top: int, same_side: bool) -> tuple[int, int, int, int, int]:
    """Scan one-side x other-side extension pairs over a shared base.

    For each pair, fills in the canonical amalgam's cross distances (meet of
    joins through the base; top over the empty base) and runs the oriented
    triangle checks.  Cross distances equal to bottom are counted as point
    identifications, not failures.

    Returns (fail_b, fail_c, pairs_scanned, identifications, fail_check);
    fail indices are -1 when every pair passes.
    """
    bmats = np.ascontiguousarray(bmats, dtype=np.int64)
    cmats = np.ascontiguousarray(cmats, dtype=np.int64)
    if bmats.shape[0] == 0 or cmats.shape[0] == 0:
        return -1, -1, 0, 0, -1
    args = (bmats, cmats, a, checks, leq, meet, join, np.int64(bottom), np.int64(top), same_side)
    if backend_name() == "numba":
        out = _numba_kernels()["scan_pairs"](*args)
        return tuple(int(v) for v in out)  # type: ignore[return-value]
    return _scan_pairs_numpy(*args)
