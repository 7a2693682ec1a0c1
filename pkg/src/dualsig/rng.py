"""Deterministic, platform-independent pseudorandom streams.

Every stochastic operation in this package draws from :class:`RngHandle`,
never from a platform default generator, so that identical ``(seed, stream)``
pairs reproduce identical samples bit-for-bit on any OS/architecture with
IEEE-754 doubles.

Generator algorithm (fixed; do not change without bumping output versions):

* 64-bit output words are produced counter-style from the splitmix64
  finalizer ``mix64``:

      word(i) = mix64(key + (i + 1) * GAMMA   mod 2**64)

  where ``GAMMA = 0x9E3779B97F4A7C15`` and the per-handle key folds seed and
  stream through two extra finalizer rounds:

      key = mix64(mix64(seed + GAMMA) ^ mix64(stream + STREAM_SALT))

  ``mix64`` is the murmur-style avalanche used by splitmix64
  (xor-shift 30 / multiply 0xBF58476D1CE4E5B9 / xor-shift 27 /
  multiply 0x94D049BB133111EB / xor-shift 31).  With key = 0 the word
  sequence equals the reference splitmix64 stream for seed 0.

* Uniforms in the open interval (0, 1) take the top 53 bits of a word:
  ``u = (word >> 11 + 0.5) * 2**-53``.

* Standard normals are the inverse normal CDF of those uniforms, evaluated
  with Acklam's rational approximation (|relative error| < 1.15e-9).  The
  evaluation uses only +, -, *, /, sqrt and log in a fixed order; sqrt is
  IEEE-exact and log is the single libm call in the pipeline.

* Uniform k-subsets of ``range(n)`` are the indices of the k smallest of n
  i.i.d. uniforms (stable argsort), which is exchangeable and therefore
  uniform over k-subsets.

Derived streams for parallel or repeated work come from
:func:`derive_seed` / :meth:`RngHandle.split`, both of which hash the parent
identity with ``mix64`` so that child streams are statistically unrelated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngHandle", "derive_seed", "mix64", "normal_ppf"]

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_STREAM_SALT = 0x632BE59BD9B4E019


def mix64(z: int) -> int:
    """Splitmix64 finalizer on Python ints (mod 2**64)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 arithmetic wraps mod 2**64; that wrap is the algorithm.
    with np.errstate(over="ignore"):
        z = z.astype(np.uint64, copy=True)
        z ^= z >> np.uint64(30)
        z *= np.uint64(0xBF58476D1CE4E5B9)
        z ^= z >> np.uint64(27)
        z *= np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
    return z


def derive_seed(seed: int, *indices: int) -> int:
    """Fold integer indices into a parent seed, one mix round per index.

    This is the documented split function for per-repetition / per-worker
    substreams: children of distinct index tuples are distinct, and the fold
    composes (``derive_seed(derive_seed(s, i), j) == derive_seed(s, i, j)``)
    so nested experiments can derive further children from a child seed.
    """
    out = int(seed) & _MASK
    for ix in indices:
        if ix < 0:
            raise ValueError(f"split index must be nonnegative, got {ix}")
        out = mix64(out ^ ((ix + 1) * _GAMMA & _MASK))
    return out


# Acklam's inverse normal CDF coefficients (central / tail rational fits).
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_ppf(p) -> np.ndarray:
    """Inverse standard normal CDF (Acklam's rational approximation).

    Accepts values in the open interval (0, 1); vectorized.
    """
    p = np.asarray(p, dtype=np.float64)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("normal_ppf requires arguments strictly inside (0, 1)")
    x = np.empty_like(p)

    lo = p < _P_LOW
    hi = p > 1.0 - _P_LOW
    mid = ~(lo | hi)

    q = p[mid] - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    x[mid] = num / den

    # 1 - p is exact for p > 1/2 (Sterbenz), so both tails share one path.
    for mask, sign, tail_p in ((lo, 1.0, p[lo]), (hi, -1.0, 1.0 - p[hi])):
        if not tail_p.size:
            continue
        q = np.sqrt(-2.0 * np.log(tail_p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[mask] = sign * (num / den)
    return x


@dataclass
class RngHandle:
    """Counter-based random stream identified by ``(seed, stream)``.

    The handle holds a draw counter; fresh handles with equal ``(seed,
    stream)`` reproduce the same sequence from the start.  ``split(i)``
    yields an unrelated child stream for parallel work.
    """

    seed: int
    stream: int = 0
    _key: int = field(init=False, repr=False)
    _counter: int = field(default=0, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.stream < 0:
            raise ValueError(f"stream must be nonnegative, got {self.stream}")
        self.seed = int(self.seed) & _MASK
        self.stream = int(self.stream)
        self._key = mix64(mix64(self.seed + _GAMMA) ^ mix64(self.stream + _STREAM_SALT))

    def words(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit words as a uint64 array."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        idx = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        with np.errstate(over="ignore"):
            state = np.uint64(self._key) + idx * np.uint64(_GAMMA)
        return _mix64_array(state)

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` doubles uniform on the open interval (0, 1)."""
        w = self.words(n)
        return ((w >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0 ** -53)

    def normals(self, n: int) -> np.ndarray:
        """Next ``n`` standard normal deviates (one uniform per normal)."""
        return normal_ppf(self.uniforms(n))

    def subset(self, pool_size: int, k: int) -> np.ndarray:
        """Uniformly random k-subset of ``range(pool_size)``, sorted.

        Consumes exactly ``pool_size`` uniforms.
        """
        if not 0 <= k <= pool_size:
            raise ValueError(f"need 0 <= k <= pool_size, got k={k}, pool={pool_size}")
        u = self.uniforms(pool_size)
        order = np.argsort(u, kind="stable")
        return np.sort(order[:k])

    def split(self, index: int) -> "RngHandle":
        """Child handle on a derived stream; see :func:`derive_seed`."""
        if index < 0:
            raise ValueError(f"split index must be nonnegative, got {index}")
        return RngHandle(self.seed, mix64(self.stream ^ ((index + 1) * _GAMMA & _MASK)))

    def clone(self) -> "RngHandle":
        """Fresh handle at counter 0 for the same (seed, stream)."""
        return RngHandle(self.seed, self.stream)
