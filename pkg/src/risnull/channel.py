"""RIS geometry, channel sampling and cascaded-channel assembly.

Coordinate convention: the RIS lies in the (y, z)-plane centred at
``ris_position`` with its boresight along +x. Element ``n`` (0-based) sits at
horizontal index ``n % n1`` (along y) and vertical index ``n // n1`` (along z).
A user at relative position ``(x, y, z)`` is seen at azimuth
``atan2(y, x)`` and elevation ``asin(z / d)``.

Index ordering of the stacked interference matrix ``A`` is lexicographic:
column ``m`` corresponds to the m-th pair in ``interference_pairs(K)``,
i.e. ``(0, 1), (0, 2), ..., (1, 0), (1, 2), ...`` (receiver k, transmitter j).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .units import db_to_amplitude

__all__ = [
    "ChannelError",
    "RisGeometry",
    "UserPlacement",
    "ChannelModelSpec",
    "ChannelRealization",
    "interference_pairs",
    "complex_normal",
    "array_response",
    "path_loss_db",
    "arrival_angles",
    "sample_placement",
    "sample_channel",
    "sample_direct",
    "direct_cascaded_ratio",
    "realization_to_dict",
    "realization_from_dict",
    "save_fixture",
    "load_fixture",
]

FIXTURE_FORMAT = "risnull.channel/1"


class ChannelError(ValueError):
    """Invalid geometry, angle, distance or degenerate channel."""


@dataclass(frozen=True)
class RisGeometry:
    """Uniform rectangular array. ``n1`` elements per row, ``n2`` per column."""

    n1: int
    n2: int
    d1: float = 0.05
    d2: float = 0.05
    wavelength: float = 0.1

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ChannelError(f"array dimensions must be >= 1, got {self.n1}x{self.n2}")
        if self.d1 <= 0 or self.d2 <= 0 or self.wavelength <= 0:
            raise ChannelError("element spacings and wavelength must be positive")

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    @classmethod
    def ula(cls, n: int, spacing: float = 0.05, wavelength: float = 0.1) -> "RisGeometry":
        """Linear array along the vertical axis (one element per row)."""
        return cls(1, n, spacing, spacing, wavelength)

    def indices(self):
        """Horizontal and vertical element indices ``(i1, i2)``."""
        n = np.arange(self.n)
        return n % self.n1, n // self.n1


@dataclass(frozen=True)
class UserPlacement:
    tx_positions: np.ndarray
    rx_positions: np.ndarray
    ris_position: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        tx = np.atleast_2d(np.asarray(self.tx_positions, dtype=float))
        rx = np.atleast_2d(np.asarray(self.rx_positions, dtype=float))
        ris = np.asarray(self.ris_position, dtype=float).reshape(3)
        if tx.shape != rx.shape or tx.shape[1] != 3:
            raise ChannelError(f"need K 3-D positions per side, got {tx.shape} and {rx.shape}")
        for name, pos in (("tx", tx), ("rx", rx)):
            if np.any(np.linalg.norm(pos - ris, axis=1) <= 0):
                raise ChannelError(f"{name} position coincides with the RIS")
        object.__setattr__(self, "tx_positions", tx)
        object.__setattr__(self, "rx_positions", rx)
        object.__setattr__(self, "ris_position", ris)

    @property
    def num_users(self) -> int:
        return self.tx_positions.shape[0]

    def tx_distances(self):
        return np.linalg.norm(self.tx_positions - self.ris_position, axis=1)

    def rx_distances(self):
        return np.linalg.norm(self.rx_positions - self.ris_position, axis=1)


_KINDS = ("los", "rician", "sparse", "rayleigh")


@dataclass(frozen=True)
class ChannelModelSpec:
    """User-RIS channel model: ``los``, ``rician``, ``sparse`` or ``rayleigh``."""

    kind: str = "rician"
    rician_factor: float = 10.0
    path_count: int = 5

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in _KINDS:
            raise ChannelError(f"unknown channel kind {self.kind!r}; expected one of {_KINDS}")
        object.__setattr__(self, "kind", kind)
        if not self.rician_factor >= 0:
            raise ChannelError("rician_factor must be >= 0")
        if self.path_count < 1:
            raise ChannelError("path_count must be >= 1")


def interference_pairs(K: int):
    """Ordered (k, j) pairs with ``j != k``, lexicographic in k then j."""
    return [(k, j) for k in range(K) for j in range(K) if j != k]


def _freeze(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all RIS channels.

    ``h_t[j]`` is transmitter j -> RIS, ``h_r[k]`` is RIS -> receiver k.
    ``cascaded[k, j] = h_t[j] * h_r[k]`` and ``direct[k, j]`` is the direct
    gain from transmitter j to receiver k (zero when blocked).
    """

    h_t: np.ndarray
    h_r: np.ndarray
    direct: np.ndarray | None = None
    cascaded: np.ndarray = field(init=False, repr=False)
    stacked_interference: np.ndarray = field(init=False, repr=False)
    stacked_direct: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h_t = _freeze(np.atleast_2d(self.h_t))
        h_r = _freeze(np.atleast_2d(self.h_r))
        if h_t.shape != h_r.shape:
            raise ChannelError(f"h_t {h_t.shape} and h_r {h_r.shape} must match")
        K, N = h_t.shape
        direct = np.zeros((K, K), complex) if self.direct is None else self.direct
        direct = _freeze(direct)
        if direct.shape != (K, K):
            raise ChannelError(f"direct gains must be {K}x{K}, got {direct.shape}")
        cascaded = _freeze(h_r[:, None, :] * h_t[None, :, :])
        pairs = interference_pairs(K)
        if pairs:
            ks, js = np.array(pairs).T
            A = cascaded[ks, js].T
            b = direct[ks, js]
        else:
            A = np.zeros((N, 0), complex)
            b = np.zeros(0, complex)
        object.__setattr__(self, "h_t", h_t)
        object.__setattr__(self, "h_r", h_r)
        object.__setattr__(self, "direct", direct)
        object.__setattr__(self, "cascaded", cascaded)
        object.__setattr__(self, "stacked_interference", _freeze(A))
        object.__setattr__(self, "stacked_direct", _freeze(b))

    @property
    def num_users(self) -> int:
        return self.h_t.shape[0]

    @property
    def num_elements(self) -> int:
        return self.h_t.shape[1]

    @property
    def has_direct(self) -> bool:
        return bool(np.any(self.direct != 0))

    def with_direct(self, direct) -> "ChannelRealization":
        return ChannelRealization(self.h_t, self.h_r, direct)

    def effective(self, v, include_direct: bool = True):
        """``K x K`` effective gains ``a_{k,j}^T v (+ b_{k,j})``."""
        g = self.h_r @ (self.h_t * np.asarray(v)).T
        return g + self.direct if include_direct else g


def complex_normal(rng, shape):
    """Standard circular complex Gaussian: real parts drawn first, then imaginary."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def array_response(geometry: RisGeometry, azimuth: float, elevation: float) -> np.ndarray:
    half = np.pi / 2 + 1e-12
    if not (-half <= azimuth <= half and -half <= elevation <= half):
        raise ChannelError(f"angles must lie in [-pi/2, pi/2], got ({azimuth}, {elevation})")
    i1, i2 = geometry.indices()
    phase = (2 * np.pi / geometry.wavelength) * (
        i1 * geometry.d1 * np.sin(azimuth) * np.cos(elevation) + i2 * geometry.d2 * np.sin(elevation)
    )
    return np.exp(1j * phase)


def path_loss_db(distance):
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise ChannelError(f"distance must be positive, got {distance}")
    return -30.0 - 22.0 * np.log10(d)


def arrival_angles(positions, ris_position):
    """``(azimuth, elevation)`` arrays of users seen from the RIS."""
    rel = np.atleast_2d(positions) - np.asarray(ris_position)
    d = np.linalg.norm(rel, axis=1)
    return np.arctan2(rel[:, 1], rel[:, 0]), np.arcsin(rel[:, 2] / d)


def sample_placement(
    K,
    rng_seed=None,
    tx_region=((5.0, 45.0), (-45.0, -5.0)),
    rx_region=((5.0, 45.0), (5.0, 45.0)),
    user_z=-20.0,
    ris_position=(0.0, 0.0, 0.0),
) -> UserPlacement:
    """Users uniform over rectangular (x, y) regions at a common height."""
    rng = np.random.default_rng(rng_seed)

    def draw(region):
        (x0, x1), (y0, y1) = region
        xy = np.column_stack([rng.uniform(x0, x1, K), rng.uniform(y0, y1, K)])
        return np.column_stack([xy, np.full(K, float(user_z))])

    tx = draw(tx_region)
    rx = draw(rx_region)
    return UserPlacement(tx, rx, np.asarray(ris_position, dtype=float))


def _link_channels(geometry, positions, ris_position, spec, rng):
    K = positions.shape[0]
    N = geometry.n
    beta = db_to_amplitude(path_loss_db(np.linalg.norm(positions - ris_position, axis=1)))
    if spec.kind == "rayleigh":
        h = complex_normal(rng, (K, N))
    elif spec.kind == "sparse":
        L = spec.path_count
        alpha = complex_normal(rng, (K, L))
        theta = rng.uniform(-np.pi / 2, np.pi / 2, (K, L))
        phi = rng.uniform(-np.pi / 2, np.pi / 2, (K, L))
        h = np.zeros((K, N), complex)
        for k in range(K):
            for l_ in range(L):
                h[k] += alpha[k, l_] * array_response(geometry, theta[k, l_], phi[k, l_])
        h /= np.sqrt(L)
    else:
        az, el = arrival_angles(positions, ris_position)
        los = np.array([array_response(geometry, a, e) for a, e in zip(az, el)]).reshape(K, N)
        if spec.kind == "los" or np.isinf(spec.rician_factor):
            h = los
        else:
            eps = spec.rician_factor
            h = np.sqrt(eps / (1 + eps)) * los + np.sqrt(1 / (1 + eps)) * complex_normal(rng, (K, N))
    return beta[:, None] * h


def sample_channel(geometry: RisGeometry, placement: UserPlacement, spec: ChannelModelSpec, rng_seed=None):
    """Draw h_t (transmitters first) then h_r; direct paths blocked."""
    rng = np.random.default_rng(rng_seed)
    h_t = _link_channels(geometry, placement.tx_positions, placement.ris_position, spec, rng)
    h_r = _link_channels(geometry, placement.rx_positions, placement.ris_position, spec, rng)
    return ChannelRealization(h_t, h_r)


def sample_direct(placement, direct_pathloss_db=None, rng_seed=None) -> np.ndarray:
    """Rayleigh direct gains ``b[k, j] = amp(pathloss[k, j]) * CN(0, 1)``.

    ``direct_pathloss_db`` is a scalar or a ``K x K`` array in dB; ``None``
    means blocked. ``-inf`` entries give exact zeros.
    """
    K = placement if isinstance(placement, (int, np.integer)) else placement.num_users
    if direct_pathloss_db is None:
        return np.zeros((K, K), complex)
    pl = np.broadcast_to(np.asarray(direct_pathloss_db, dtype=float), (K, K))
    if np.any(np.isnan(pl)) or np.any(pl == np.inf):
        raise ChannelError("direct path loss must be finite or -inf")
    rng = np.random.default_rng(rng_seed)
    return db_to_amplitude(pl) * complex_normal(rng, (K, K))


def _l1_norms(realization):
    return np.abs(realization.cascaded).sum(axis=2)


def direct_cascaded_ratio(realization: ChannelRealization) -> float:
    K = realization.num_users
    if K < 2:
        return 0.0
    l1 = _l1_norms(realization)
    off = ~np.eye(K, dtype=bool)
    if np.any(l1[off] == 0):
        raise ChannelError("cascaded channel with zero l1 norm")
    return float(np.max(np.abs(realization.direct[off]) / l1[off]))


def _encode(a):
    a = np.asarray(a)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _decode(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1]


def realization_to_dict(realization: ChannelRealization, **extra) -> dict:
    """JSON-ready fixture; complex values stored as ``[re, im]`` pairs."""
    out = {
        "format": FIXTURE_FORMAT,
        "num_users": realization.num_users,
        "num_elements": realization.num_elements,
        "h_t": _encode(realization.h_t),
        "h_r": _encode(realization.h_r),
        "direct": _encode(realization.direct),
    }
    out.update(extra)
    return out


def realization_from_dict(data: dict) -> ChannelRealization:
    if data.get("format") != FIXTURE_FORMAT:
        raise ChannelError(f"unsupported fixture format {data.get('format')!r}")
    h_t = _decode(data["h_t"])
    h_r = _decode(data["h_r"])
    direct = _decode(data["direct"]) if data.get("direct") is not None else None
    real = ChannelRealization(h_t, h_r, direct)
    if (real.num_users, real.num_elements) != (data["num_users"], data["num_elements"]):
        raise ChannelError("fixture dimensions disagree with stored arrays")
    return real


def save_fixture(path, realization: ChannelRealization, **extra):
    Path(path).write_text(json.dumps(realization_to_dict(realization, **extra), indent=1))


def load_fixture(path) -> tuple[ChannelRealization, dict]:
    """Return the realization and the raw fixture dict (for extra keys)."""
    data = json.loads(Path(path).read_text())
    return realization_from_dict(data), data
