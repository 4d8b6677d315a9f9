#!/usr/bin/env python3
"""Generate the bundled calibration files (dice2016.params, desk.params).

Constants are transcribed from the public DICE-2016R GAMS source
(DICE2016R-091916ap.gms, econ.yale.edu/~nordhaus). Unit conventions are
rebased so the model recursions apply without extra bookkeeping:

  * capital is measured in 5-year-investment units (K = K_dice / 5, the
    factor 5^0.3 is folded into pi4/pi15),
  * emissions are GtCO2 per 5-year period (factor 5 folded into pi14/pi20),
  * carbon reservoirs are GtCO2 (factor 3.666 folded into the initial
    masses and pi29; the transfer coefficients are unit-free),
  * consumption stays an annual flow in trillion USD, so the
    consumption-per-emission scale is 1000 $/tCO2 per (trillion $ / GtCO2)
    times 5 years per period = 5000.
"""

import math

T = 100
TSTEP = 5
CO2_PER_C = 3.666  # GtCO2 per GtC, as used in the DICE-2016 source


def fmt(x):
    return repr(float(x))


def dice2016_vectors(t_max):
    # population (millions)
    pop = [7403.0]
    for _ in range(1, t_max):
        pop.append(pop[-1] * (11500.0 / pop[-1]) ** 0.134)
    # total factor productivity
    al = [5.115]
    for t in range(1, t_max):
        ga = 0.076 * math.exp(-0.005 * TSTEP * (t - 1))
        al.append(al[-1] / (1.0 - ga))
    # carbon intensity of gross output (GtCO2 per year per trillion USD)
    sigma = [35.85 / (105.5 * (1.0 - 0.03))]
    gsig = -0.0152
    for _ in range(1, t_max):
        sigma.append(sigma[-1] * math.exp(gsig * TSTEP))
        gsig *= (1.0 - 0.001) ** TSTEP
    # backstop price ($/tCO2) and abatement cost scale
    pback = [550.0 * (1.0 - 0.025) ** (t - 1) for t in range(1, t_max + 1)]
    cost1 = [pback[i] * sigma[i] / 2.6 / 1000.0 for i in range(t_max)]
    # land-use emissions (GtCO2 per year)
    etree = [2.6 * (1.0 - 0.115) ** (t - 1) for t in range(1, t_max + 1)]
    # exogenous forcing (W/m2)
    forcoth = [
        0.5 + (1.0 / 17.0) * 0.5 * (t - 1) if t < 18 else 1.0
        for t in range(1, t_max + 1)
    ]
    # abatement-rate upper bound
    miu_up = [1.0 if t < 30 else 1.2 for t in range(1, t_max + 1)]
    return pop, al, sigma, pback, cost1, etree, forcoth, miu_up


def build(t_max):
    pop, al, sigma, pback, cost1, etree, forcoth, miu_up = dice2016_vectors(t_max)
    p = {}
    p["t_max"] = t_max
    # scalars
    p["pi2"] = -0.45
    p["pi3"] = 1.015 ** TSTEP
    p["pi5"] = 0.3
    p["pi7"] = 0.7
    p["pi8"] = 0.0
    p["pi9"] = 0.00236
    p["pi11"] = 2.6
    p["pi13"] = -0.59049  # -(1 - 0.1)^5
    p["pi16"] = 0.3
    p["pi18"] = 0.7
    p["pi19"] = 6000.0 * CO2_PER_C
    p["pi21"] = 1.0 - 0.12
    p["pi22"] = 0.12 * 588.0 / 360.0
    p["pi23"] = 0.12
    p["pi24"] = 1.0 - 0.12 * 588.0 / 360.0 - 0.007
    p["pi25"] = 0.007 * 360.0 / 1720.0
    p["pi26"] = 0.007
    p["pi27"] = 1.0 - 0.007 * 360.0 / 1720.0
    p["pi28"] = 3.6813
    p["pi29"] = 588.0 * CO2_PER_C
    p["pi31"] = 0.1005
    p["pi32"] = 3.6813 / 3.1
    p["pi33"] = 0.088
    p["pi34"] = 0.025
    # vectors
    scale = TSTEP ** 0.3
    p["pi1"] = [x / pop[0] for x in pop]
    p["pi4"] = [a * scale for a in al]
    p["pi6"] = [x / 1000.0 for x in pop]
    p["pi10"] = cost1
    p["pi12"] = pop
    p["pi14"] = [TSTEP * s for s in sigma]
    p["pi15"] = [a * scale for a in al]
    p["pi17"] = [x / 1000.0 for x in pop]
    p["pi20"] = [TSTEP * e for e in etree]
    p["pi30"] = forcoth
    p["pi35"] = miu_up
    # initial states
    p["k0"] = 223.0 / TSTEP
    p["m_at0"] = 851.0 * CO2_PER_C
    p["m_up0"] = 460.0 * CO2_PER_C
    p["m_lo0"] = 1740.0 * CO2_PER_C
    p["t_at0"] = 0.85
    p["t_lo0"] = 0.0068
    # marginal abatement cost coefficients and unit scale
    p["unit_scale"] = 1000.0 * TSTEP
    p["c1"] = pback
    p["c2"] = 2.6 - 1.0
    p["carbon_conservation"] = True
    return p


HEADER = """\
# DICE-2016 calibration, rebased for this model's recursions.
#
# Provenance: constants transcribed from the public DICE-2016R GAMS source
# (DICE2016R-091916ap.gms, http://www.econ.yale.edu/~nordhaus/homepage/).
# Unit conventions (all conversions are baked into the values below):
#   pi1      utility weight, population normalized to period 1
#   pi4/pi15 total factor productivity times 5^0.3 (capital is held in
#            5-year-investment units: k0 = K_2015 / 5 trillion USD)
#   pi6/pi17 labor, billions
#   pi10     abatement cost scale (fraction of gross output at mu = 1)
#   pi12     population, millions
#   pi13     negative capital carry: K(t) = I(t) - pi13 K(t-1), so the
#            recursion carries (1-0.1)^5 of last period's capital
#   pi14     emission intensity, GtCO2 per period per unit gross output
#   pi19     cumulative industrial emissions cap, GtCO2
#   pi20     land-use emissions, GtCO2 per period
#   pi29, m_*0  carbon reservoirs in GtCO2 (GtC times 3.666)
#   c1, c2   marginal abatement cost: c1(t) * mu(t)^c2, $/tCO2
#   unit_scale  $/tCO2 per (trillion USD consumption / GtCO2): 1000 for
#            the currency units times 5 because consumption is an annual
#            flow while emissions are per 5-year period
"""

DESK_HEADER = """\
# Desk-scale calibration: 20 periods, scalars identical to
# dice2016.params, vectors truncated to the first 20 entries.
# Intended for fast verification runs; see dice2016.params for provenance.
"""

SCALARS = [
    "t_max", "pi2", "pi3", "pi5", "pi7", "pi8", "pi9", "pi11", "pi13",
    "pi16", "pi18", "pi19", "pi21", "pi22", "pi23", "pi24", "pi25", "pi26",
    "pi27", "pi28", "pi29", "pi31", "pi32", "pi33", "pi34",
]
VECTORS = [
    "pi1", "pi4", "pi6", "pi10", "pi12", "pi14", "pi15", "pi17", "pi20",
    "pi30", "pi35",
]
TAIL = ["k0", "m_at0", "m_up0", "m_lo0", "t_at0", "t_lo0", "unit_scale", "c2"]


def emit(p, header, path):
    lines = [header]
    for k in SCALARS:
        v = p[k]
        lines.append(f"{k} = {v if k == 't_max' else fmt(v)}")
    for k in VECTORS:
        body = ", ".join(fmt(x) for x in p[k])
        lines.append(f"{k} = [{body}]")
    for k in TAIL:
        lines.append(f"{k} = {fmt(p[k])}")
    body = ", ".join(fmt(x) for x in p["c1"])
    lines.append(f"c1 = [{body}]")
    lines.append("carbon_conservation = true")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    full = build(T)
    emit(full, HEADER, "crates/core/data/dice2016.params")
    desk = build(20)
    emit(desk, DESK_HEADER, "crates/core/data/desk.params")
    print("wrote dice2016.params and desk.params")


if __name__ == "__main__":
    main()
