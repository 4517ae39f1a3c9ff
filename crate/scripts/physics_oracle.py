"""Scalar reference values for the electrolyzer curves.

Evaluates the temperature/pressure correlations for an alkaline cell at the
default operating point, calibrates the total cell area to the nameplate
capacity, and prints the values frozen into the Rust tests.
"""
import math

T_C, P_BAR = 90.0, 30.0
I_MAX, CAP_MW = 5000.0, 52.25
P_MIN = 7.84
M_H2, F = 2.01588e-3, 96485.3329

r1, r2, d1, d2 = 4.45153e-5, 6.88874e-9, -3.12996e-6, 4.47137e-7
s, t1, t2, t3 = 0.33824, -0.01539, 2.00181, 15.24178
f11, f12, f21, f22 = 478645.74, -2953.15, 1.0396, -0.00104

tk = T_C + 273.15
u_rev = 1.5184 - 1.5421e-3 * tk + 9.523e-5 * tk * math.log(tk) + 9.84e-8 * tk ** 2
k1 = r1 + d1 + r2 * T_C + d2 * P_BAR
k2 = s
k3 = t1 + t2 / T_C + t3 / T_C ** 2
f1 = f11 + f12 * T_C
f2 = f21 + f22 * T_C


def u(i):
    return u_rev + k1 * i + k2 * math.log10(k3 * i + 1)


area = CAP_MW * 1e6 / (u(I_MAX) * I_MAX)


def power(i):
    return u(i) * i * area / 1e6


def faraday(i):
    return i * i / (f1 + i * i) * f2


def h(i):
    return 3600 * faraday(i) * M_H2 * i * area / (2 * F)


def invert(p):
    lo, hi = 0.0, I_MAX
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if power(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def eta_p(p):
    i = invert(p)
    return h(i) / p


print(f"u_rev={u_rev!r} k1={k1!r} k2={k2!r} k3={k3!r} f1={f1!r} f2={f2!r}")
print(f"area={area!r}")
print(f"U(2500)={u(2500.0)!r}")
print(f"P(2500)={power(2500.0)!r}")
print(f"P(1234.5)={power(1234.5)!r}")
print(f"etaF(i_max)={faraday(I_MAX)!r}")
print(f"H_fl={h(I_MAX)!r}")
print(f"eta_fl={h(I_MAX) / CAP_MW!r}")
print(f"h(P_min)={eta_p(P_MIN) * P_MIN!r}")

# dense grid in current density, restricted to [P_min, C_e]
n = 10000
best = None
for k in range(n):
    i = I_MAX * (k + 1) / n
    p = power(i)
    if p < P_MIN:
        continue
    e = h(i) / p
    if best is None or e > best[0]:
        best = (e, p, i)
print(f"grid peak eta={best[0]!r} p={best[1]!r} i={best[2]!r} share={best[1] / CAP_MW!r}")

# upper/lower price bounds
lam_h, p_sb = 2.10, 0.52
eta_max, p_peak = best[0], best[1]
ub = lam_h * eta_max * p_peak / (p_peak - p_sb)
step = 1e-3 * CAP_MW
deriv = (eta_p(CAP_MW) - eta_p(CAP_MW - step)) / step
lb = lam_h * (h(I_MAX) / CAP_MW + CAP_MW * deriv)
print(f"ub~{ub!r} lb~{lb!r} deriv~{deriv!r}")
