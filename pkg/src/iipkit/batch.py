"""Vectorized impact-point rates over arrays of states.

Mirrors the scalar formulas elementwise for bulk workloads (Monte Carlo
dispersion, throughput benchmarks).  States a scalar call would reject
are masked out and their outputs set to NaN rather than raised: the
`valid` entry of each result marks the rows that went through.  The
scalar path stays the reference; tests cross-check this one against it.
"""

from __future__ import annotations

import numpy as np

from .frames import EARTH, EarthModel
from .kepler import EPS_ANOMALY, EPS_ECC


def _common(r: np.ndarray, v: np.ndarray, earth: EarthModel) -> dict[str, np.ndarray]:
    """Kinematics, flight-angle solution, and osculating elements for every
    row, plus the running validity mask."""
    mu, rp = earth.mu, earth.radius
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)

    r0 = np.linalg.norm(r, axis=1)
    v0 = np.linalg.norm(v, axis=1)
    h_vec = np.cross(r, v)
    h = np.linalg.norm(h_vec, axis=1)
    rdotv = np.einsum("ij,ij->i", r, v)

    valid = (r0 > 0) & (v0 > 0) & (r0 >= rp - 1e-3) & (h > 1e-6 * r0 * v0)

    i_r = r / r0[:, None]
    i_v = v / v0[:, None]
    i_h = h_vec / h[:, None]
    i_theta = np.cross(i_h, i_r)
    lam = v0 * v0 * r0 / mu
    sg = rdotv / (r0 * v0)
    cg = h / (r0 * v0)

    a1 = -(h * rdotv) / (mu * r0)
    a2 = h * h / (mu * r0) - 1.0
    a3 = h * h / (mu * rp) - 1.0
    e2 = a1 * a1 + a2 * a2
    q2 = e2 - a3 * a3
    valid &= (e2 > EPS_ECC * EPS_ECC) & (q2 >= 0.0) & (lam < 2.0)

    q = np.sqrt(np.maximum(q2, 0.0))
    e2s = np.where(e2 > 0.0, e2, 1.0)
    s = (a1 * a3 - a2 * q) / e2s
    c = (a2 * a3 + a1 * q) / e2s
    phi = np.arctan2(s, c) % (2.0 * np.pi)

    cos_gp = cg * c - sg * s
    lam_s = np.where(lam > 0.0, lam, 1.0)
    k2 = np.maximum(2.0 / lam_s - 1.0, 0.0)
    k = np.sqrt(k2)
    atan_term = np.arctan2(k * np.sin(0.5 * phi), cg * np.cos(0.5 * phi) - sg * np.sin(0.5 * phi))
    num = (sg / cg) * (1.0 - c) + (1.0 - lam) * s
    den = (2.0 - lam) * ((1.0 - c) / (lam_s * cg * cg) + cos_gp / cg)
    tf = (r0 / (v0 * cg)) * (num / den + (2.0 * cg / (lam_s * k ** 3)) * atan_term)

    a = r0 / (2.0 - lam)
    ecc2 = 1.0 - h * h / (mu * a)
    ecc = np.sqrt(np.maximum(ecc2, 0.0))
    valid &= ecc > EPS_ECC
    ecc_s = np.where(ecc > 0.0, ecc, 1.0)
    n = np.sqrt(mu / a ** 3)
    p = h * h / mu
    cos_e0 = (1.0 - r0 / a) / ecc_s
    sin_e0 = rdotv / (ecc_s * np.sqrt(mu * a))
    cos_ep = np.clip((1.0 - rp / a) / ecc_s, -1.0, 1.0)
    sin_ep = -np.sqrt(np.maximum(1.0 - cos_ep * cos_ep, 0.0))
    valid &= (np.abs(sin_e0) > EPS_ANOMALY) & (np.abs(sin_ep) > EPS_ANOMALY)

    sens_den = mu * (-a2 * s + a1 * c)
    valid &= np.abs(sens_den) > 1e-12 * mu * (np.abs(a1) + np.abs(a2))

    return {
        "r0": r0, "v0": v0, "h": h, "rdotv": rdotv, "lam": lam, "sg": sg, "cg": cg,
        "i_r": i_r, "i_v": i_v, "i_h": i_h, "i_theta": i_theta,
        "a1": a1, "a2": a2, "a3": a3, "s": s, "c": c, "phi": phi, "tf": tf,
        "a": a, "ecc": ecc_s, "n": n, "p": p,
        "cos_e0": cos_e0, "sin_e0": sin_e0, "cos_ep": cos_ep, "sin_ep": sin_ep,
        "sens_den": sens_den, "valid": valid,
    }


def _tf_dot(cm: dict[str, np.ndarray], a_rtn: np.ndarray,
            earth: EarthModel) -> np.ndarray:
    mu, rp = earth.mu, earth.radius
    a, ecc, n = cm["a"], cm["ecc"], cm["n"]
    sin_e0, cos_e0 = cm["sin_e0"], cm["cos_e0"]
    sin_ep, cos_ep = cm["sin_ep"], cm["cos_ep"]
    r0, v0, sg, cg, p, tf = cm["r0"], cm["v0"], cm["sg"], cm["cg"], cm["p"], cm["tf"]

    sin_e0s = np.where(sin_e0 != 0.0, sin_e0, 1.0)
    sin_eps = np.where(sin_ep != 0.0, sin_ep, 1.0)
    dtf_da = 3.0 * tf / (2.0 * a) - (1.0 / (a * a * ecc * n)) * (
        rp * (1.0 - ecc * cos_ep) / sin_eps - r0 * (1.0 - ecc * cos_e0) / sin_e0s
    )
    dtf_de = (1.0 / n) * (
        (cos_ep * (1.0 - ecc * cos_ep) / (ecc * sin_eps)
         - cos_e0 * (1.0 - ecc * cos_e0) / (ecc * sin_e0s))
        - (sin_ep - sin_e0)
    )
    da_dar = 2.0 * a * a * v0 * sg / mu
    da_dat = 2.0 * a * a * v0 * cg / mu
    de_dar = p * v0 * sg / (mu * ecc)
    de_dat = (p * a - r0 * r0) * v0 * cg / (mu * a * ecc)
    return -1.0 + (
        (dtf_da * da_dar + dtf_de * de_dar) * a_rtn[:, 0]
        + (dtf_da * da_dat + dtf_de * de_dat) * a_rtn[:, 1]
    )


def _latlon_rates(i_p: np.ndarray, dip: np.ndarray, tf_dot: np.ndarray,
                  earth: EarthModel) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    cos_lat = np.hypot(i_p[:, 0], i_p[:, 1])
    cos_lat_s = np.where(cos_lat > 0.0, cos_lat, 1.0)
    dlat = dip[:, 2] / cos_lat_s
    dlon_i = (i_p[:, 0] * dip[:, 1] - i_p[:, 1] * dip[:, 0]) / (cos_lat_s * cos_lat_s)
    dlon_e = dlon_i - earth.omega * (1.0 + tf_dot)
    return cos_lat, dlat, dlon_i, dlon_e


def _mask(out: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    valid = out["valid"]
    for key, arr in out.items():
        if key == "valid":
            continue
        if arr.ndim == 1:
            out[key] = np.where(valid, arr, np.nan)
        else:
            out[key] = np.where(valid[:, None], arr, np.nan)
    return out


def legacy_rates_batch(r: np.ndarray, v: np.ndarray, a_rtn: np.ndarray,
                       earth: EarthModel = EARTH) -> dict[str, np.ndarray]:
    """Element-chain rates for every row of (r, v, a_rtn).

    Returns phi, tf, phi_dot, tf_dot, dip_dt, dlat, dlon_i, dlon_e, and the
    validity mask.
    """
    a_rtn = np.asarray(a_rtn, dtype=float)
    with np.errstate(all="ignore"):
        cm = _common(r, v, earth)
        mu = earth.mu
        h, r0, v0, rdotv = cm["h"], cm["r0"], cm["v0"], cm["rdotv"]
        s, c = cm["s"], cm["c"]
        den = cm["sens_den"]
        den_s = np.where(den != 0.0, den, 1.0)

        dphi_dar = h * s / den_s
        dphi_dat = (2.0 * h * (r0 / earth.radius - c) + rdotv * s) / den_s
        phi_dot = -h / (r0 * r0) + dphi_dar * a_rtn[:, 0] + dphi_dat * a_rtn[:, 1]
        tf_dot = _tf_dot(cm, a_rtn, earth)

        i_r, i_v, i_h, i_theta = cm["i_r"], cm["i_v"], cm["i_h"], cm["i_theta"]
        i_p = c[:, None] * i_r + s[:, None] * i_theta
        dip_dphi = (-(h * s + rdotv * c) / h)[:, None] * i_r + (r0 * v0 * c / h)[:, None] * i_v
        dip_dar = dip_dphi * dphi_dar[:, None]
        dip_dat = (
            dip_dphi * dphi_dat[:, None]
            + (r0 * c / h)[:, None] * i_r
            + (r0 * s / h)[:, None] * i_theta
            - (r0 / h)[:, None] * i_p
        )
        dip_dah = (r0 * s / h)[:, None] * i_h
        dip = (a_rtn[:, 0, None] * dip_dar + a_rtn[:, 1, None] * dip_dat
               + a_rtn[:, 2, None] * dip_dah)

        cos_lat, dlat, dlon_i, dlon_e = _latlon_rates(i_p, dip, tf_dot, earth)
        valid = cm["valid"] & (cos_lat > 1e-12)

    return _mask({
        "phi": cm["phi"], "tf": cm["tf"], "phi_dot": phi_dot, "tf_dot": tf_dot,
        "i_p": i_p, "dip_dt": dip, "dlat": dlat, "dlon_i": dlon_i, "dlon_e": dlon_e,
        "valid": valid,
    })


def geometric_rates_batch(r: np.ndarray, v: np.ndarray, a_rtn: np.ndarray,
                          earth: EarthModel = EARTH) -> dict[str, np.ndarray]:
    """Downrange/crossrange rates for every row of (r, v, a_rtn).

    Returns phi, tf, tf_dot, pdot_d, pdot_c, pdot, pdot_ecef, dlat, dlon_i,
    dlon_e, and the validity mask.
    """
    a_rtn = np.asarray(a_rtn, dtype=float)
    with np.errstate(all="ignore"):
        cm = _common(r, v, earth)
        mu, rp = earth.mu, earth.radius
        r0, v0, sg, cg = cm["r0"], cm["v0"], cm["sg"], cm["cg"]
        s, c, phi = cm["s"], cm["c"], cm["phi"]

        a1v = cg * a_rtn[:, 1] + sg * a_rtn[:, 0]
        a2v = -a_rtn[:, 2]
        a3v = sg * a_rtn[:, 1] - cg * a_rtn[:, 0]

        sin_2gp = np.sin(2.0 * np.arctan2(sg, cg) + phi)
        t1 = mu * s / (r0 * v0 * v0)
        t2 = 0.5 * (sin_2gp + s)
        d1 = t1 - t2
        valid = cm["valid"] & (np.abs(d1) > 1e-12 * (np.abs(t1) + np.abs(t2)))
        d1s = np.where(d1 != 0.0, d1, 1.0)
        dphi_dv = 2.0 * mu * (1.0 - c) / (r0 * v0 ** 3 * d1s)
        dphi_dg = (sin_2gp - (r0 / rp) * 2.0 * sg * cg) / d1s

        sin_pg = s * cg + c * sg
        i_r, i_v, i_theta = cm["i_r"], cm["i_v"], cm["i_theta"]
        i_d = (-sin_pg / cg)[:, None] * i_r + (c / cg)[:, None] * i_v
        i_p = c[:, None] * i_r + s[:, None] * i_theta
        i_c = np.cross(i_p, i_d)

        pdot_d = rp * (dphi_dv * a1v - dphi_dg * a3v / v0)
        pdot_c = -rp * (s / (v0 * cg)) * a2v
        pdot = pdot_d[:, None] * i_d + pdot_c[:, None] * i_c

        tf_dot = _tf_dot(cm, a_rtn, earth)

        cos_lat = np.hypot(i_p[:, 0], i_p[:, 1])
        valid &= cos_lat > 1e-12
        cos_lat_s = np.where(cos_lat > 0.0, cos_lat, 1.0)
        i_e = np.stack([-i_p[:, 1] / cos_lat_s, i_p[:, 0] / cos_lat_s,
                        np.zeros(len(cos_lat))], axis=1)
        i_n = np.cross(i_p, i_e)
        dlat = np.einsum("ij,ij->i", pdot, i_n) / rp
        dlon_i = np.einsum("ij,ij->i", pdot, i_e) / (rp * cos_lat_s)
        dlon_e = dlon_i - earth.omega * (1.0 + tf_dot)

        pdot_w = (-rp * earth.omega * cos_lat * (1.0 + tf_dot))[:, None] * i_e
        total = pdot + pdot_w
        # epoch of every row is taken as zero here; batch callers that need
        # absolute Earth-fixed axes rotate by their own epochs afterwards
        theta = earth.omega * cm["tf"]
        ct, st = np.cos(theta), np.sin(theta)
        pdot_e = np.stack([
            ct * total[:, 0] + st * total[:, 1],
            -st * total[:, 0] + ct * total[:, 1],
            total[:, 2],
        ], axis=1)

    return _mask({
        "phi": cm["phi"], "tf": cm["tf"], "tf_dot": tf_dot,
        "pdot_d": pdot_d, "pdot_c": pdot_c, "pdot": pdot, "pdot_ecef": pdot_e,
        "i_p": i_p, "dlat": dlat, "dlon_i": dlon_i, "dlon_e": dlon_e,
        "valid": valid,
    })
