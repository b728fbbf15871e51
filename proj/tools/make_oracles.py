#!/usr/bin/env python3
"""Generate tests/oracle_data.hpp: frozen high-precision reference values.

Run from the repo root:  python3 tools/make_oracles.py
All values are computed with mpmath at 60 significant digits (~200 bits) and
emitted as decimal string literals so both the double and the extended
precision backends can parse them at full accuracy.
"""

import mpmath as mp

mp.mp.dps = 60

OUT = "tests/oracle_data.hpp"


def cstr(v, digits=40):
    return mp.nstr(mp.mpf(v), digits, strip_zeros=False)


def re_im(z, digits=40):
    z = mp.mpc(z)
    return cstr(z.real, digits), cstr(z.imag, digits)


def f_symbol(w, x, gamma, N):
    # w^{-g/2} (w-x)^{g/2} e^{-Nxw}, principal branches
    g2 = mp.mpf(gamma) / 2 if isinstance(gamma, (int, float)) else mp.mpc(gamma) / 2
    return mp.power(w, -g2) * mp.power(w - x, g2) * mp.e**(-N * x * w)


def laurent(N, x, gamma, center, radius, mmax):
    """c_m = (1/2pi i) oint f(w) w^{-m-1} dw on the given circle."""
    cs = {}
    for m in range(-mmax, mmax + 1):
        def integrand(t, m=m):
            w = center + radius * mp.e**(1j * t)
            return f_symbol(w, x, gamma, N) * mp.power(w, -m - 1) * radius * mp.e**(1j * t)
        val = mp.quad(integrand, [0, mp.pi / 2, mp.pi, 3 * mp.pi / 2, 2 * mp.pi])
        cs[m] = val / (2 * mp.pi)
    return cs


lines = []
add = lines.append
add("// Frozen high-precision reference values. Generated by tools/make_oracles.py;")
add("// do not edit by hand. All literals carry 40 significant digits.")
add("#pragma once")
add("")
add("namespace ginpol::oracle {")
add("")

# ---- log gamma / digamma / barnes ----------------------------------------
z = mp.mpc(3, 4)
lg = mp.loggamma(z)
re, im = re_im(lg)
add(f'inline constexpr const char* loggamma_3_4i_re = "{re}";')
add(f'inline constexpr const char* loggamma_3_4i_im = "{im}";')

z = mp.mpc(-2.5, 1.5)
lg = mp.loggamma(z)
re, im = re_im(lg)
add(f'inline constexpr const char* loggamma_m25_15i_re = "{re}";')
add(f'inline constexpr const char* loggamma_m25_15i_im = "{im}";')

z = mp.mpc(2.5, 1.5)
dg = mp.digamma(z)
re, im = re_im(dg)
add(f'inline constexpr const char* digamma_25_15i_re = "{re}";')
add(f'inline constexpr const char* digamma_25_15i_im = "{im}";')

add(f'inline constexpr const char* digamma_1 = "{cstr(mp.digamma(1))}";')
add(f'inline constexpr const char* glaisher_kinkelin = "{cstr(mp.glaisher, 41)}";')

for tag, zz in [("0p5", mp.mpf("0.5")), ("1p5", mp.mpf("1.5")),
                ("3p7", mp.mpf("3.7")), ("10p25", mp.mpf("10.25"))]:
    add(f'inline constexpr const char* log_barnesg_{tag} = "{cstr(mp.log(mp.barnesg(zz)))}";')

z = mp.mpc(2.5, 1.5)
lbg = mp.log(mp.barnesg(z))
re, im = re_im(lbg)
add(f'inline constexpr const char* log_barnesg_25_15i_re = "{re}";')
add(f'inline constexpr const char* log_barnesg_25_15i_im = "{im}";')
add("")

# ---- incomplete gamma ratio Q(nu,zeta) = Gamma(nu,zeta)/Gamma(nu) ---------
def up_ratio(nu, zeta):
    return mp.gammainc(mp.mpc(nu), a=zeta, regularized=True)

cases = [
    ("a", mp.mpf("0.5"), mp.mpc(28, 4)),
    ("b", mp.mpf("0.5"), mp.mpc(2, -3)),
    ("c", mp.mpf("0.6"), mp.mpc(-25, 3)),
    ("d", mp.mpf("0.75"), mp.mpc(50, 0)),
    ("e", mp.mpc("1.0", "0.5"), mp.mpc(-4, 29)),
]
for tag, nu, zeta in cases:
    q = up_ratio(nu, zeta)
    re, im = re_im(q)
    nre, nim = re_im(nu, 20)
    zre, zim = re_im(zeta, 20)
    add(f'inline constexpr const char* upratio_{tag}_nu_re = "{nre}";')
    add(f'inline constexpr const char* upratio_{tag}_nu_im = "{nim}";')
    add(f'inline constexpr const char* upratio_{tag}_z_re = "{zre}";')
    add(f'inline constexpr const char* upratio_{tag}_z_im = "{zim}";')
    add(f'inline constexpr const char* upratio_{tag}_re = "{re}";')
    add(f'inline constexpr const char* upratio_{tag}_im = "{im}";')
add("")

# ---- Bernoulli numbers B_2 .. B_60 ----------------------------------------
add("// Bernoulli numbers B_{2n}, n = 1..30, 50 significant digits.")
add("inline constexpr const char* bernoulli_2n[30] = {")
for n in range(1, 31):
    add(f'    "{mp.nstr(mp.bernoulli(2 * n), 50, strip_zeros=False)}",')
add("};")
add("")

# ---- f(w) spot value -------------------------------------------------------
w = mp.mpc("0.5", "0.1")
fv = f_symbol(w, mp.mpf("0.5"), 1, 4)
re, im = re_im(fv)
add("// f(w) = w^{-1/2}(w-0.5)^{1/2}e^{-2w} at w = 0.5+0.1i (N=4, x=0.5, gamma=1)")
add(f'inline constexpr const char* f_spot_re = "{re}";')
add(f'inline constexpr const char* f_spot_im = "{im}";')
add("")

# ---- Laurent coefficients N=3, x=0.4, gamma=1, circle center 0.2 r=0.45 ---
cs = laurent(3, mp.mpf("0.4"), 1, mp.mpf("0.2"), mp.mpf("0.45"), 6)
add("// c_m, m = -6..6, for N=3, x=0.4, gamma=1 on the circle |w-0.2| = 0.45")
add("inline constexpr const char* laurent_n3[13][2] = {")
for m in range(-6, 7):
    re, im = re_im(cs[m])
    add(f'    {{"{re}", "{im}"}},  // m = {m}')
add("};")
add("")

# ---- Toeplitz log-determinant N=6, x=0.5, gamma=1, size 6 ------------------
cs6 = laurent(6, mp.mpf("0.5"), 1, mp.mpf("0.25"), mp.mpf("0.5"), 5)
M = mp.matrix(6, 6)
for r in range(6):
    for s in range(6):
        M[r, s] = cs6[r - s]
det = mp.det(M)
add("// det of the 6x6 matrix (c_{r-s}) for N=6, x=0.5, gamma=1")
add(f'inline constexpr const char* toeplitz6_logmag = "{cstr(mp.log(abs(det)))}";')
add(f'inline constexpr const char* toeplitz6_phase = "{cstr(mp.arg(det))}";')
add("")

# ---- log Z_50 and log 50! ---------------------------------------------------
N = 50
logZ = N * mp.log(mp.pi) + mp.fsum(mp.loggamma(k + 1) for k in range(1, N + 1)) \
    - mp.mpf(N * (N + 1)) / 2 * mp.log(N)
add(f'inline constexpr const char* logZ_50 = "{cstr(logZ)}";')
add(f'inline constexpr const char* logfact_50 = "{cstr(mp.loggamma(51))}";')
add("")

# ---- leftmost point of the steepest-descent curve for x = 0.7 --------------
x = mp.mpf("0.7")
u0 = mp.findroot(lambda u: x * (u - x) + mp.log(x) - mp.log(-u), mp.mpf("-0.5"))
add("// root of x(u-x) + log x - log|u| = 0 on (-1, 0) for x = 0.7")
add(f'inline constexpr const char* sigma_u0_x07 = "{cstr(u0)}";')
add("")

add("}  // namespace ginpol::oracle")
add("")

with open(OUT, "w") as fh:
    fh.write("\n".join(lines))
print(f"wrote {OUT}")
