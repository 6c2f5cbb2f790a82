"""Regenerates frozen_oracles.hpp. Needs mpmath; values are computed independently of the C++ code."""
import mpmath as mp

mp.mp.dps = 40
out = []


def emit(name, v):
    out.append(f"inline constexpr double {name} = {mp.nstr(mp.mpf(v), 25)};")


def emit_arr(name, vs):
    body = ", ".join(mp.nstr(mp.mpf(v), 25) for v in vs)
    out.append(f"inline constexpr double {name}[] = {{{body}}};")


def mgamma_min_eig(kA, kB, kC, kW, g, p):
    if p < 2:
        p = p / (p - 1)
        kB, kC = kC, kB
    s = p - 2
    M = mp.matrix([[1, -s * kA, -(kB + kC) / 2],
                   [-s * kA, s, -s * kC / 2],
                   [-(kB + kC) / 2, -s * kC / 2, 1 / g - kW]])
    return min(mp.eigsy(M)[0])


def boundary(f, a, b):
    # f(a) admissible, f(b) not
    for _ in range(200):
        c = (a + b) / 2
        if f(c):
            a = c
        else:
            b = c
    return a


# interval endpoints by bisection on the smallest eigenvalue of M_gamma
tuples = [(mp.mpf("0.3"), mp.mpf("0.4"), mp.mpf("0.7"), mp.mpf("0.2"), mp.mpf("0.8")),
          (mp.mpf("1.1"), mp.mpf("0.2"), mp.mpf("0.1"), mp.mpf("0"), mp.mpf("1")),
          (mp.mpf("0"), mp.mpf("1"), mp.mpf("1"), mp.mpf("0"), mp.mpf("0.5"))]
los, his = [], []
for t in tuples:
    adm = lambda p, t=t: mgamma_min_eig(*t, p) >= -mp.mpf(10) ** -30
    his.append(boundary(adm, mp.mpf(2), mp.mpf(1000)))
    los.append(boundary(adm, mp.mpf(2), mp.mpf(1) + mp.mpf(10) ** -12))
emit_arr("kIntervalTuples", [x for t in tuples for x in t])
emit_arr("kIntervalLo", los)
emit_arr("kIntervalHi", his)


# gamma_p by bisection on the discriminant of E_gamma
def egamma_psd(kA, kB, kC, kW, g, p):
    if p < 2:
        p = p / (p - 1)
        kB, kC = kC, kB
    a = 1 + 2 * kA * (2 - p)
    b = kB + (p - 1) * kC
    c = 1 / g - kW
    return a > 0 and c >= 0 and b * b - 4 * a * c <= 0


gp_cases = [(0, 1, 1, 0, 3), (0, "0.3", "0.5", "0.1", "1.5"), ("0.2", "0.3", "0.4", "0.1", "2.5"),
            ("0.1", "0.7", "0.2", "0.3", "1.8")]
gp_cases = [tuple(mp.mpf(x) for x in c) for c in gp_cases]
gps = []
for kA, kB, kC, kW, p in gp_cases:
    gps.append(boundary(lambda g: egamma_psd(kA, kB, kC, kW, g, p), mp.mpf(10) ** -9, mp.mpf(100)))
emit_arr("kGammaPCases", [x for c in gp_cases for x in c])
emit_arr("kGammaP", gps)

# 1D weighted length with weight (1+s^2)^(1/4)
ys = [mp.mpf("0.5"), 1, mp.mpf("1.5"), 2]
emit_arr("kWeightedLenY", ys)
emit_arr("kWeightedLen", [mp.quad(lambda s: (1 + s * s) ** mp.mpf("0.25"), [0, y]) for y in ys])

# L^4 norm of exp(-|x|^2) on [-4,4]^2
emit("kGaussL4Box4", (mp.pi / 4 * mp.erf(8) ** 2) ** mp.mpf("0.25"))


# Moser sums by direct high-precision summation
def moser(r, beta, jmax):
    R = mp.mpf(r) / (r - 1)
    q = (R ** (2 * beta + 1) + 1) * R
    t = [(q - 1) / q * q ** (-j) for j in range(jmax + 1)]
    p = [2 * R ** j for j in range(jmax + 1)]
    L = mp.fsum(p[j] ** (2 * beta + 2) * t[j] for j in range(jmax + 1))
    logB = mp.fsum(-mp.log(t[j]) / (2 * p[j]) for j in range(jmax + 1))
    return L, mp.e ** logB


Ls, Bs = [], []
for r in (3, 4, 5):
    for beta in (0, mp.mpf("0.5"), 1, 2):
        L, B = moser(r, beta, 4000)
        Ls.append(L)
        Bs.append(B)
emit_arr("kMoserL", Ls)
emit_arr("kMoserB", Bs)

# Sobolev constants, d = 3, 4
emit_arr("kSobolev34", [(mp.gamma(d) / mp.gamma(mp.mpf(d) / 2)) ** (mp.mpf(1) / d) / mp.sqrt(mp.pi * d * (d - 2))
                        for d in (3, 4)])

with open(__file__.replace("gen_oracles.py", "frozen_oracles.hpp"), "w") as f:
    f.write("#pragma once\n// generated by gen_oracles.py\n\nnamespace oracle {\n\n")
    f.write("\n".join(out))
    f.write("\n\n}  // namespace oracle\n")
