#!/usr/bin/env python3
"""Prototype / scratch oracle: forward sim, adjoint, optimizer, scc/smac.

Used during development to sanity-check the calibration and to freeze
oracle values for the Rust tests. Not part of the deliverable build.
"""
import math
import re
import sys
import numpy as np
from scipy.optimize import minimize


def load(path):
    p = {}
    for line in open(path):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        k, v = [x.strip() for x in line.split("=", 1)]
        if v.startswith("["):
            p[k] = np.array([float(x) for x in v.strip("[]").split(",")])
        elif v in ("true", "false"):
            p[k] = v == "true"
        else:
            p[k] = float(v) if k != "t_max" else int(v)
    return p


def simulate(p, s, mu, aE=None, aC=None):
    T = p["t_max"]
    aE = np.zeros(T) if aE is None else aE
    aC = np.zeros(T) if aC is None else aC
    out = {k: np.zeros(T) for k in
           "U R Q Omega Lambda C I c K Eind E MAT MUP MLO F TAT TLO G".split()}
    k, mat, mup, mlo, tat, tlo = (p["k0"], p["m_at0"], p["m_up0"],
                                  p["m_lo0"], p["t_at0"], p["t_lo0"])
    W = 0.0
    for i in range(T):
        g = p["pi4"][i] * k ** p["pi5"] * p["pi6"][i] ** p["pi7"]
        om = p["pi8"] * tat + p["pi9"] * tat * tat
        lam = p["pi10"][i] * mu[i] ** p["pi11"]
        q = (1 - lam) * g / (1 + om)
        inv = s[i] * q
        C = (1 - s[i]) * q + aC[i]
        c = C / p["pi12"][i]
        k_new = inv - p["pi13"] * k
        eind = p["pi14"][i] * (1 - mu[i]) * p["pi15"][i] * k_new ** p["pi16"] \
            * p["pi17"][i] ** p["pi18"]
        e = eind + p["pi20"][i] + aE[i]
        mat_new = e + p["pi21"] * mat + p["pi22"] * mup
        mup_new = p["pi23"] * mat + p["pi24"] * mup + p["pi25"] * mlo
        mlo_new = p["pi26"] * mup + p["pi27"] * mlo
        f = p["pi28"] * math.log2(mat_new / p["pi29"]) + p["pi30"][i]
        tat_new = tat + p["pi31"] * (f - p["pi32"] * tat - p["pi33"] * (tat - tlo))
        tlo_new = tlo + p["pi34"] * (tat - tlo)
        u = p["pi1"][i] * c ** p["pi2"] / p["pi2"]
        r = p["pi3"] ** (-(i + 1))
        W += u * r
        for name, val in (("G", g), ("Omega", om), ("Lambda", lam), ("Q", q),
                          ("I", inv), ("C", C), ("c", c), ("K", k_new),
                          ("Eind", eind), ("E", e), ("MAT", mat_new),
                          ("MUP", mup_new), ("MLO", mlo_new), ("F", f),
                          ("TAT", tat_new), ("TLO", tlo_new), ("U", u), ("R", r)):
            out[name][i] = val
        k, mat, mup, mlo, tat, tlo = mat_new and k_new, mat_new, mup_new, mlo_new, tat_new, tlo_new
        k = k_new
    out["W"] = W
    return out


def adjoint(p, s, mu, tr, alpha=None, beta=0.0):
    """Gradient of J = W - sum alpha_t*TAT(t) - beta*sum Eind(t).

    Returns (d_s, d_mu, d_aE, d_aC)."""
    T = p["t_max"]
    alpha = np.zeros(T) if alpha is None else alpha
    d_s = np.zeros(T)
    d_mu = np.zeros(T)
    d_aE = np.zeros(T)
    d_aC = np.zeros(T)
    kb = matb = mupb = mlob = tatb = tlob = 0.0
    for i in reversed(range(T)):
        k_prev = p["k0"] if i == 0 else tr["K"][i - 1]
        tat_prev = p["t_at0"] if i == 0 else tr["TAT"][i - 1]
        tlo_b = tlob
        tat_b = tatb - alpha[i]
        fb = p["pi31"] * tat_b
        mat_b = matb + fb * p["pi28"] / (math.log(2) * tr["MAT"][i])
        mup_b = mupb
        mlo_b = mlob
        e_b = mat_b
        d_aE[i] = e_b
        eind_b = e_b - beta
        # eind = pi14 (1-mu) pi15 k^pi16 pi17^pi18
        prod = p["pi14"][i] * p["pi15"][i] * tr["K"][i] ** p["pi16"] \
            * p["pi17"][i] ** p["pi18"]
        dmu_local = -prod * eind_b
        k_b = eind_b * p["pi14"][i] * (1 - mu[i]) * p["pi15"][i] * p["pi16"] \
            * tr["K"][i] ** (p["pi16"] - 1) * p["pi17"][i] ** p["pi18"]
        k_b += kb
        i_b = k_b
        c_b = tr["R"][i] * p["pi1"][i] * tr["c"][i] ** (p["pi2"] - 1)
        cC_b = c_b / p["pi12"][i]
        d_aC[i] = cC_b
        q_b = (1 - s[i]) * cC_b + s[i] * i_b
        d_s[i] = tr["Q"][i] * (i_b - cC_b)
        g = tr["G"][i]
        om = tr["Omega"][i]
        lam_b = -g / (1 + om) * q_b
        g_b = (1 - lam[i]) / (1 + om) * q_b if False else (1 - tr["Lambda"][i]) / (1 + om) * q_b
        om_b = -tr["Q"][i] / (1 + om) * q_b
        if mu[i] > 0:
            dmu_local += p["pi10"][i] * p["pi11"] * mu[i] ** (p["pi11"] - 1) * lam_b
        d_mu[i] = dmu_local
        kprev_b = g_b * p["pi5"] * g / k_prev + (-p["pi13"]) * k_b
        matb_prev = p["pi21"] * mat_b + p["pi23"] * mup_b
        mupb_prev = p["pi22"] * mat_b + p["pi24"] * mup_b + p["pi26"] * mlo_b
        mlob_prev = p["pi25"] * mup_b + p["pi27"] * mlo_b
        tatb_prev = tat_b * (1 + p["pi31"] * (-p["pi32"] - p["pi33"])) \
            + tlo_b * p["pi34"] + om_b * (p["pi8"] + 2 * p["pi9"] * tat_prev)
        tlob_prev = tat_b * p["pi31"] * p["pi33"] + tlo_b * (1 - p["pi34"])
        kb, matb, mupb, mlob, tatb, tlob = (kprev_b, matb_prev, mupb_prev,
                                            mlob_prev, tatb_prev, tlob_prev)
    return d_s, d_mu, d_aE, d_aC


def fd_grad(p, s, mu, eps=1e-6):
    T = p["t_max"]
    d_s = np.zeros(T)
    d_mu = np.zeros(T)
    for i in range(T):
        for vec, grad in ((s, d_s), (mu, d_mu)):
            v0 = vec[i]
            h = eps * max(1.0, abs(v0))
            vec[i] = v0 + h
            wp = simulate(p, s, mu)["W"]
            vec[i] = v0 - h
            wm = simulate(p, s, mu)["W"]
            vec[i] = v0
            grad[i] = (wp - wm) / (2 * h)
    return d_s, d_mu


def optimize(p, temp_cap=None, unweighted=False, x0=None, aE=None, aC=None,
             tol=1e-12, verbose=False):
    p = dict(p)
    if unweighted:
        p["pi1"] = np.ones(p["t_max"])
    T = p["t_max"]
    lo = np.zeros(2 * T)
    hi = np.concatenate([np.ones(T), p["pi35"]])
    if x0 is None:
        mu0 = 0.03 + (np.arange(T) / max(T - 1, 1)) * (np.minimum(1.0, p["pi35"]) - 0.03)
        x0 = np.concatenate([0.25 * np.ones(T), mu0])
    lam = np.zeros(T)   # temp cap multipliers
    lam_cum = 0.0
    rho = 10.0
    W_scale = None
    for outer in range(50 if temp_cap is not None else 2):
        def negAL(x):
            s, mu = x[:T], x[T:]
            tr = simulate(p, s, mu, aE, aC)
            A = tr["W"]
            if temp_cap is not None:
                gv = tr["TAT"] - temp_cap
                m = np.maximum(0.0, lam + rho * gv)
                A -= np.sum(m * m - lam * lam) / (2 * rho)
            gcum = np.sum(tr["Eind"]) - p["pi19"]
            mc = max(0.0, lam_cum + rho * gcum)
            A -= (mc * mc - lam_cum ** 2) / (2 * rho)
            # gradient
            alpha = np.maximum(0.0, lam + rho * (tr["TAT"] - temp_cap)) if temp_cap is not None else None
            beta = max(0.0, lam_cum + rho * (np.sum(tr["Eind"]) - p["pi19"]))
            d_s, d_mu, _, _ = adjoint(p, s, mu, tr, alpha, beta)
            return -A, -np.concatenate([d_s, d_mu])
        res = minimize(negAL, x0, jac=True, method="L-BFGS-B",
                       bounds=list(zip(lo, hi)),
                       options=dict(maxiter=20000, ftol=1e-18, gtol=tol))
        x0 = res.x
        s, mu = x0[:T], x0[T:]
        tr = simulate(p, s, mu, aE, aC)
        viol_cum = np.sum(tr["Eind"]) - p["pi19"]
        lam_cum = max(0.0, lam_cum + rho * viol_cum)
        if temp_cap is not None:
            gv = tr["TAT"] - temp_cap
            lam = np.maximum(0.0, lam + rho * gv)
            maxv = max(gv.max(), viol_cum)
            if verbose:
                print(f"outer {outer}: W={tr['W']:.9f} maxviol={maxv:.3e} rho={rho:.1e}")
            if maxv < 1e-9 and outer > 2:
                break
            rho = min(rho * 3.0, 1e9)
        else:
            if viol_cum <= 0:
                break
    return x0, tr, lam, lam_cum, p


def marginals(p, x, tr, lam, lam_cum, temp_cap):
    T = p["t_max"]
    s, mu = x[:T], x[T:]
    alpha = lam if temp_cap is not None else None
    _, _, d_aE, d_aC = adjoint(p, s, mu, tr, alpha, lam_cum)
    scc = -p["unit_scale"] * d_aE / d_aC
    smac = p["c1"][:T] * mu ** p["c2"]
    return d_aE, d_aC, scc, smac


if __name__ == "__main__":
    pass
