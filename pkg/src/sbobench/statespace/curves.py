"""Dubins and Reeds-Shepp shortest paths for a car with a minimum turning radius.

Words are solved in closed form inside numba kernels. A word is carried as two
length-5 arrays: segment type codes and signed lengths normalized by the
turning radius (negative length means driving in reverse).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
_ZERO = 10.0 * np.finfo(np.float64).eps
# discriminants this close to a feasibility boundary are rounding noise, not infeasibility
_DISC_TOL = 1e-10

SEG_NONE = -1
SEG_LEFT = 0
SEG_STRAIGHT = 1
SEG_RIGHT = 2

_L, _S, _R, _N = SEG_LEFT, SEG_STRAIGHT, SEG_RIGHT, SEG_NONE

DUBINS_WORDS = np.array(
    [
        [_L, _S, _L, _N, _N],
        [_R, _S, _R, _N, _N],
        [_L, _S, _R, _N, _N],
        [_R, _S, _L, _N, _N],
        [_R, _L, _R, _N, _N],
        [_L, _R, _L, _N, _N],
    ],
    dtype=np.int64,
)
DUBINS_NAMES = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")

RS_WORDS = np.array(
    [
        [_L, _R, _L, _N, _N],
        [_R, _L, _R, _N, _N],
        [_L, _R, _L, _R, _N],
        [_R, _L, _R, _L, _N],
        [_L, _R, _S, _L, _N],
        [_R, _L, _S, _R, _N],
        [_L, _S, _R, _L, _N],
        [_R, _S, _L, _R, _N],
        [_L, _R, _S, _R, _N],
        [_R, _L, _S, _L, _N],
        [_R, _S, _R, _L, _N],
        [_L, _S, _L, _R, _N],
        [_L, _S, _R, _N, _N],
        [_R, _S, _L, _N, _N],
        [_L, _S, _L, _N, _N],
        [_R, _S, _R, _N, _N],
        [_L, _R, _S, _L, _R],
        [_R, _L, _S, _R, _L],
    ],
    dtype=np.int64,
)
# row of RS_WORDS holding each Dubins word (LSL, RSR, LSR, RSL, RLR, LRL)
DUBINS_IN_RS = np.array([14, 15, 12, 13, 1, 0], dtype=np.int64)


# ---------------------------------------------------------------------------
# shared helpers


@njit(cache=True)
def _mod2pi(x):
    """Wrap to [0, 2*pi)."""
    v = np.fmod(x, TWO_PI)
    if v < 0.0:
        v += TWO_PI
    if v >= TWO_PI:
        v -= TWO_PI
    return v


@njit(cache=True)
def _arc(x):
    """Arc angle in [0, 2*pi); values a rounding error short of a full turn become 0."""
    v = _mod2pi(x)
    if v > TWO_PI - 1e-9:
        v = 0.0
    return v


@njit(cache=True)
def _wrap_pi(x):
    """Wrap to (-pi, pi]."""
    v = np.fmod(x, TWO_PI)
    if v < -math.pi:
        v += TWO_PI
    elif v > math.pi:
        v -= TWO_PI
    return v


@njit(cache=True)
def _local_frame(x0, y0, th0, x1, y1, th1, r):
    dx = x1 - x0
    dy = y1 - y0
    c = math.cos(th0)
    s = math.sin(th0)
    return (c * dx + s * dy) / r, (-s * dx + c * dy) / r, th1 - th0


# ---------------------------------------------------------------------------
# Dubins


@njit(cache=True)
def dubins_word(x0, y0, th0, x1, y1, th1, r):
    """Optimal Dubins word. Returns (word index, types[5], normalized lengths[5])."""
    dx = (x1 - x0) / r
    dy = (y1 - y0) / r
    d = math.sqrt(dx * dx + dy * dy)
    theta = math.atan2(dy, dx) if d > 0.0 else 0.0
    a = _mod2pi(th0 - theta)
    b = _mod2pi(th1 - theta)
    sa, ca = math.sin(a), math.cos(a)
    sb, cb = math.sin(b), math.cos(b)
    cab = math.cos(a - b)

    best = np.inf
    best_i = -1
    bt = 0.0
    bp = 0.0
    bq = 0.0

    # LSL
    tmp = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb)
    if tmp >= -_DISC_TOL:
        p = math.sqrt(max(tmp, 0.0))
        if p < 1e-7:  # straight too short to fix its direction: one arc plus the straight
            t = _arc(b - a)
            q = 0.0
        else:
            ang = math.atan2(cb - ca, d + sa - sb)
            t = _arc(-a + ang)
            q = _arc(b - ang)
        if t + p + q < best:
            best, best_i, bt, bp, bq = t + p + q, 0, t, p, q
    # RSR
    tmp = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa)
    if tmp >= -_DISC_TOL:
        p = math.sqrt(max(tmp, 0.0))
        if p < 1e-7:  # straight too short to fix its direction: one arc plus the straight
            t = _arc(a - b)
            q = 0.0
        else:
            ang = math.atan2(ca - cb, d - sa + sb)
            t = _arc(a - ang)
            q = _arc(-b + ang)
        if t + p + q < best:
            best, best_i, bt, bp, bq = t + p + q, 1, t, p, q
    # LSR
    tmp = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb)
    if tmp >= -_DISC_TOL:
        p = math.sqrt(max(tmp, 0.0))
        ang = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
        t = _arc(-a + ang)
        q = _arc(-_mod2pi(b) + ang)
        if t + p + q < best:
            best, best_i, bt, bp, bq = t + p + q, 2, t, p, q
    # RSL
    tmp = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb)
    if tmp >= -_DISC_TOL:
        p = math.sqrt(max(tmp, 0.0))
        ang = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
        t = _arc(a - ang)
        q = _arc(b - ang)
        if t + p + q < best:
            best, best_i, bt, bp, bq = t + p + q, 3, t, p, q
    # RLR
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp) <= 1.0 + _DISC_TOL:
        p = _mod2pi(TWO_PI - math.acos(min(max(tmp, -1.0), 1.0)))
        t = _arc(a - math.atan2(ca - cb, d - sa + sb) + 0.5 * p)
        q = _arc(a - b - t + p)
        if t + p + q < best:
            best, best_i, bt, bp, bq = t + p + q, 4, t, p, q
    # LRL
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0
    if abs(tmp) <= 1.0 + _DISC_TOL:
        p = _mod2pi(TWO_PI - math.acos(min(max(tmp, -1.0), 1.0)))
        t = _arc(-a - math.atan2(ca - cb, d + sa - sb) + 0.5 * p)
        q = _arc(b - a - t + p)
        if t + p + q < best:
            best, best_i, bt, bp, bq = t + p + q, 5, t, p, q

    lengths = np.zeros(5)
    lengths[0] = bt
    lengths[1] = bp
    lengths[2] = bq
    return best_i, DUBINS_WORDS[best_i].copy(), lengths


# ---------------------------------------------------------------------------
# Reeds-Shepp (48 words grouped as CSC, CCC, CCCC, CCSC, CCSCC with the
# time-flip / reflection / backwards symmetries)


@njit(cache=True)
def _polar(x, y):
    return math.sqrt(x * x + y * y), math.atan2(y, x)


@njit(cache=True)
def _tau_omega(u, v, xi, eta, phi):
    delta = _wrap_pi(u - v)
    a = math.sin(u) - math.sin(delta)
    b = math.cos(u) - math.cos(delta) - 1.0
    t1 = math.atan2(eta * a - xi * b, xi * a + eta * b)
    t2 = 2.0 * (math.cos(delta) - math.cos(v) - math.cos(u)) + 3.0
    tau = _wrap_pi(t1 + math.pi) if t2 < 0.0 else _wrap_pi(t1)
    omega = _wrap_pi(tau - u + v - phi)
    return tau, omega


@njit(cache=True)
def _lp_sp_lp(x, y, phi):
    u, t = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if t >= -_ZERO:
        v = _wrap_pi(phi - t)
        if v >= -_ZERO:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_sp_rp(x, y, phi):
    u1, t1 = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    u1 = u1 * u1
    if u1 >= 4.0:
        u = math.sqrt(u1 - 4.0)
        theta = math.atan2(2.0, u)
        t = _wrap_pi(t1 + theta)
        v = _wrap_pi(t - phi)
        if t >= -_ZERO and v >= -_ZERO:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rm_l(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    u1, theta = _polar(xi, eta)
    if u1 <= 4.0:
        u = -2.0 * math.asin(0.25 * u1)
        t = _wrap_pi(theta + 0.5 * u + math.pi)
        v = _wrap_pi(phi - t + u)
        if t >= -_ZERO and u <= _ZERO:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rup_lum_rm(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = 0.25 * (2.0 + math.sqrt(xi * xi + eta * eta))
    if rho <= 1.0:
        u = math.acos(rho)
        t, v = _tau_omega(u, -u, xi, eta, phi)
        if t >= -_ZERO and v <= _ZERO:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rum_lum_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = (20.0 - xi * xi - eta * eta) / 16.0
    if 0.0 <= rho <= 1.0:
        u = -math.acos(rho)
        if u >= -HALF_PI:
            t, v = _tau_omega(u, u, xi, eta, phi)
            if t >= -_ZERO and v >= -_ZERO:
                return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rm_sm_lm(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho, theta = _polar(xi, eta)
    if rho >= 2.0:
        r = math.sqrt(rho * rho - 4.0)
        u = 2.0 - r
        t = _wrap_pi(theta + math.atan2(r, -2.0))
        v = _wrap_pi(phi - HALF_PI - t)
        if t >= -_ZERO and u <= _ZERO and v <= _ZERO:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rm_sm_rm(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho, theta = _polar(-eta, xi)
    if rho >= 2.0:
        t = theta
        u = 2.0 - rho
        v = _wrap_pi(t + HALF_PI - phi)
        if t >= -_ZERO and u <= _ZERO and v <= _ZERO:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rm_slm_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho, theta = _polar(xi, eta)
    if rho >= 2.0:
        u = 4.0 - math.sqrt(rho * rho - 4.0)
        if u <= _ZERO:
            t = _wrap_pi(math.atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta))
            v = _wrap_pi(t - phi)
            if t >= -_ZERO and v >= -_ZERO:
                return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _offer(best, word, lengths, w, l0, l1, l2, l3, l4):
    total = abs(l0) + abs(l1) + abs(l2) + abs(l3) + abs(l4)
    if total < best[0]:
        best[0] = total
        word[0] = w
        lengths[0] = l0
        lengths[1] = l1
        lengths[2] = l2
        lengths[3] = l3
        lengths[4] = l4


@njit(cache=True)
def _rs_csc(x, y, phi, best, word, lengths):
    ok, t, u, v = _lp_sp_lp(x, y, phi)
    if ok:
        _offer(best, word, lengths, 14, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_lp(-x, y, -phi)
    if ok:
        _offer(best, word, lengths, 14, -t, -u, -v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_lp(x, -y, -phi)
    if ok:
        _offer(best, word, lengths, 15, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_lp(-x, -y, phi)
    if ok:
        _offer(best, word, lengths, 15, -t, -u, -v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_rp(x, y, phi)
    if ok:
        _offer(best, word, lengths, 12, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_rp(-x, y, -phi)
    if ok:
        _offer(best, word, lengths, 12, -t, -u, -v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_rp(x, -y, -phi)
    if ok:
        _offer(best, word, lengths, 13, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_rp(-x, -y, phi)
    if ok:
        _offer(best, word, lengths, 13, -t, -u, -v, 0.0, 0.0)


@njit(cache=True)
def _rs_ccc(x, y, phi, best, word, lengths):
    ok, t, u, v = _lp_rm_l(x, y, phi)
    if ok:
        _offer(best, word, lengths, 0, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(-x, y, -phi)
    if ok:
        _offer(best, word, lengths, 0, -t, -u, -v, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(x, -y, -phi)
    if ok:
        _offer(best, word, lengths, 1, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(-x, -y, phi)
    if ok:
        _offer(best, word, lengths, 1, -t, -u, -v, 0.0, 0.0)
    xb = x * math.cos(phi) + y * math.sin(phi)
    yb = x * math.sin(phi) - y * math.cos(phi)
    ok, t, u, v = _lp_rm_l(xb, yb, phi)
    if ok:
        _offer(best, word, lengths, 0, v, u, t, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(-xb, yb, -phi)
    if ok:
        _offer(best, word, lengths, 0, -v, -u, -t, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(xb, -yb, -phi)
    if ok:
        _offer(best, word, lengths, 1, v, u, t, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(-xb, -yb, phi)
    if ok:
        _offer(best, word, lengths, 1, -v, -u, -t, 0.0, 0.0)


@njit(cache=True)
def _rs_cccc(x, y, phi, best, word, lengths):
    ok, t, u, v = _lp_rup_lum_rm(x, y, phi)
    if ok:
        _offer(best, word, lengths, 2, t, u, -u, v, 0.0)
    ok, t, u, v = _lp_rup_lum_rm(-x, y, -phi)
    if ok:
        _offer(best, word, lengths, 2, -t, -u, u, -v, 0.0)
    ok, t, u, v = _lp_rup_lum_rm(x, -y, -phi)
    if ok:
        _offer(best, word, lengths, 3, t, u, -u, v, 0.0)
    ok, t, u, v = _lp_rup_lum_rm(-x, -y, phi)
    if ok:
        _offer(best, word, lengths, 3, -t, -u, u, -v, 0.0)
    ok, t, u, v = _lp_rum_lum_rp(x, y, phi)
    if ok:
        _offer(best, word, lengths, 2, t, u, u, v, 0.0)
    ok, t, u, v = _lp_rum_lum_rp(-x, y, -phi)
    if ok:
        _offer(best, word, lengths, 2, -t, -u, -u, -v, 0.0)
    ok, t, u, v = _lp_rum_lum_rp(x, -y, -phi)
    if ok:
        _offer(best, word, lengths, 3, t, u, u, v, 0.0)
    ok, t, u, v = _lp_rum_lum_rp(-x, -y, phi)
    if ok:
        _offer(best, word, lengths, 3, -t, -u, -u, -v, 0.0)


@njit(cache=True)
def _rs_ccsc(x, y, phi, best, word, lengths):
    hp = HALF_PI
    ok, t, u, v = _lp_rm_sm_lm(x, y, phi)
    if ok:
        _offer(best, word, lengths, 4, t, -hp, u, v, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(-x, y, -phi)
    if ok:
        _offer(best, word, lengths, 4, -t, hp, -u, -v, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(x, -y, -phi)
    if ok:
        _offer(best, word, lengths, 5, t, -hp, u, v, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(-x, -y, phi)
    if ok:
        _offer(best, word, lengths, 5, -t, hp, -u, -v, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(x, y, phi)
    if ok:
        _offer(best, word, lengths, 8, t, -hp, u, v, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(-x, y, -phi)
    if ok:
        _offer(best, word, lengths, 8, -t, hp, -u, -v, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(x, -y, -phi)
    if ok:
        _offer(best, word, lengths, 9, t, -hp, u, v, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(-x, -y, phi)
    if ok:
        _offer(best, word, lengths, 9, -t, hp, -u, -v, 0.0)
    xb = x * math.cos(phi) + y * math.sin(phi)
    yb = x * math.sin(phi) - y * math.cos(phi)
    ok, t, u, v = _lp_rm_sm_lm(xb, yb, phi)
    if ok:
        _offer(best, word, lengths, 6, v, u, -hp, t, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(-xb, yb, -phi)
    if ok:
        _offer(best, word, lengths, 6, -v, -u, hp, -t, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(xb, -yb, -phi)
    if ok:
        _offer(best, word, lengths, 7, v, u, -hp, t, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(-xb, -yb, phi)
    if ok:
        _offer(best, word, lengths, 7, -v, -u, hp, -t, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(xb, yb, phi)
    if ok:
        _offer(best, word, lengths, 10, v, u, -hp, t, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(-xb, yb, -phi)
    if ok:
        _offer(best, word, lengths, 10, -v, -u, hp, -t, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(xb, -yb, -phi)
    if ok:
        _offer(best, word, lengths, 11, v, u, -hp, t, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(-xb, -yb, phi)
    if ok:
        _offer(best, word, lengths, 11, -v, -u, hp, -t, 0.0)


@njit(cache=True)
def _rs_ccscc(x, y, phi, best, word, lengths):
    hp = HALF_PI
    ok, t, u, v = _lp_rm_slm_rp(x, y, phi)
    if ok:
        _offer(best, word, lengths, 16, t, -hp, u, -hp, v)
    ok, t, u, v = _lp_rm_slm_rp(-x, y, -phi)
    if ok:
        _offer(best, word, lengths, 16, -t, hp, -u, hp, -v)
    ok, t, u, v = _lp_rm_slm_rp(x, -y, -phi)
    if ok:
        _offer(best, word, lengths, 17, t, -hp, u, -hp, v)
    ok, t, u, v = _lp_rm_slm_rp(-x, -y, phi)
    if ok:
        _offer(best, word, lengths, 17, -t, hp, -u, hp, -v)


@njit(cache=True)
def reeds_shepp_word(x0, y0, th0, x1, y1, th1, r):
    """Optimal Reeds-Shepp word. Returns (word index, types[5], signed normalized lengths[5])."""
    x, y, phi = _local_frame(x0, y0, th0, x1, y1, th1, r)
    best = np.full(1, np.inf)
    word = np.zeros(1, dtype=np.int64)
    lengths = np.zeros(5)
    _rs_csc(x, y, phi, best, word, lengths)
    _rs_ccc(x, y, phi, best, word, lengths)
    _rs_cccc(x, y, phi, best, word, lengths)
    _rs_ccsc(x, y, phi, best, word, lengths)
    _rs_ccscc(x, y, phi, best, word, lengths)
    # every forward Dubins word is also a Reeds-Shepp word; offering it keeps
    # RS <= Dubins exact even where the two closed forms round differently
    di, _, dl = dubins_word(x0, y0, th0, x1, y1, th1, r)
    _offer(best, word, lengths, DUBINS_IN_RS[di], dl[0], dl[1], dl[2], 0.0, 0.0)
    return word[0], RS_WORDS[word[0]].copy(), lengths


# ---------------------------------------------------------------------------
# execution along a word


@njit(cache=True)
def advance(x, y, th, seg, v, r):
    """Drive signed normalized length ``v`` along one segment type."""
    if seg == SEG_LEFT:
        return (
            x + r * (math.sin(th + v) - math.sin(th)),
            y + r * (-math.cos(th + v) + math.cos(th)),
            th + v,
        )
    if seg == SEG_RIGHT:
        return (
            x + r * (-math.sin(th - v) + math.sin(th)),
            y + r * (math.cos(th - v) - math.cos(th)),
            th - v,
        )
    if seg == SEG_STRAIGHT:
        return x + r * v * math.cos(th), y + r * v * math.sin(th), th
    return x, y, th


@njit(cache=True)
def word_point(x0, y0, th0, types, lengths, r, s):
    """Pose after arclength ``s`` (meters) along the word starting at (x0, y0, th0)."""
    remaining = s / r
    x, y, th = x0, y0, th0
    for i in range(5):
        if types[i] == SEG_NONE or remaining <= 0.0:
            break
        seg_len = abs(lengths[i])
        step = seg_len if remaining > seg_len else remaining
        remaining -= step
        v = step if lengths[i] >= 0.0 else -step
        x, y, th = advance(x, y, th, types[i], v, r)
    return x, y, _wrap_pi(th)


@njit(cache=True)
def curve_word(kind_reeds, a, b, r):
    if kind_reeds:
        _, types, lengths = reeds_shepp_word(a[0], a[1], a[2], b[0], b[1], b[2], r)
    else:
        _, types, lengths = dubins_word(a[0], a[1], a[2], b[0], b[1], b[2], r)
    return types, lengths


@njit(cache=True)
def curve_length(kind_reeds, a, b, r):
    types, lengths = curve_word(kind_reeds, a, b, r)
    return r * np.sum(np.abs(lengths))


@njit(cache=True)
def curve_lengths_from(kind_reeds, a, many, r):
    out = np.empty(many.shape[0])
    for i in range(many.shape[0]):
        out[i] = curve_length(kind_reeds, a, many[i], r)
    return out


@njit(cache=True)
def curve_lengths_to(kind_reeds, many, b, r):
    out = np.empty(many.shape[0])
    for i in range(many.shape[0]):
        out[i] = curve_length(kind_reeds, many[i], b, r)
    return out


@njit(cache=True)
def curve_interpolate(kind_reeds, a, b, r, fractions):
    """States at the given arclength fractions along the optimal word a -> b."""
    types, lengths = curve_word(kind_reeds, a, b, r)
    total = r * np.sum(np.abs(lengths))
    out = np.empty((fractions.shape[0], 3))
    for i in range(fractions.shape[0]):
        f = fractions[i]
        if f >= 1.0:
            out[i, 0] = b[0]
            out[i, 1] = b[1]
            out[i, 2] = _wrap_pi(b[2])
        else:
            x, y, th = word_point(a[0], a[1], a[2], types, lengths, r, f * total)
            out[i, 0] = x
            out[i, 1] = y
            out[i, 2] = th
    return out


# ---------------------------------------------------------------------------
# Python-facing word objects


class SegmentType(str, Enum):
    LEFT = "L"
    STRAIGHT = "S"
    RIGHT = "R"


class Direction(str, Enum):
    FWD = "Fwd"
    REV = "Rev"


_SEG_FROM_CODE = {SEG_LEFT: SegmentType.LEFT, SEG_STRAIGHT: SegmentType.STRAIGHT, SEG_RIGHT: SegmentType.RIGHT}
_CODE_FROM_SEG = {v: k for k, v in _SEG_FROM_CODE.items()}


@dataclass(frozen=True)
class Segment:
    type: SegmentType
    direction: Direction
    length: float  # meters, >= 0


@dataclass(frozen=True)
class CurveWord:
    """A sequence of arcs and straights with a fixed turning radius."""

    segments: tuple[Segment, ...]
    radius: float

    @property
    def total_length(self) -> float:
        return float(sum(seg.length for seg in self.segments))

    @property
    def name(self) -> str:
        return "".join(seg.type.value for seg in self.segments)

    def _arrays(self):
        types = np.full(5, SEG_NONE, dtype=np.int64)
        lengths = np.zeros(5)
        for i, seg in enumerate(self.segments):
            types[i] = _CODE_FROM_SEG[seg.type]
            sign = 1.0 if seg.direction is Direction.FWD else -1.0
            lengths[i] = sign * seg.length / self.radius
        return types, lengths

    def point_at(self, start, s: float) -> tuple[float, float, float]:
        """Pose reached after driving arclength ``s`` from ``start``."""
        types, lengths = self._arrays()
        s = min(max(s, 0.0), self.total_length)
        return word_point(float(start[0]), float(start[1]), float(start[2]), types, lengths, self.radius, s)

    def endpoint(self, start) -> tuple[float, float, float]:
        return self.point_at(start, self.total_length)


def _to_word(types, lengths, r: float) -> CurveWord:
    segments = []
    for code, v in zip(types, lengths):
        if code == SEG_NONE:
            break
        direction = Direction.FWD if v >= 0.0 else Direction.REV
        segments.append(Segment(_SEG_FROM_CODE[int(code)], direction, abs(float(v)) * r))
    return CurveWord(tuple(segments), r)


def dubins_path(a, b, r: float) -> CurveWord:
    """Shortest forward-only path from pose ``a`` to pose ``b`` (x, y, yaw)."""
    if r <= 0:
        raise ValueError("turning radius must be positive")
    _, types, lengths = dubins_word(float(a[0]), float(a[1]), float(a[2]), float(b[0]), float(b[1]), float(b[2]), r)
    return _to_word(types, lengths, r)


def reeds_shepp_path(a, b, r: float) -> CurveWord:
    """Shortest path from ``a`` to ``b`` allowing reverse segments and cusps."""
    if r <= 0:
        raise ValueError("turning radius must be positive")
    _, types, lengths = reeds_shepp_word(
        float(a[0]), float(a[1]), float(a[2]), float(b[0]), float(b[1]), float(b[2]), r
    )
    return _to_word(types, lengths, r)
