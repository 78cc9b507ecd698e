# Arbitrary-precision evaluation of the Lambda-system probe susceptibility,
# used to freeze reference values for the C++ unit tests.
from mpmath import mp, mpf, mpc, pi, exp, diff, re, im

mp.dps = 40


def chi(A, gamma, gamma0, rabi, k, c, w):
    u = mpc(gamma0, -w)
    v = mpc(gamma, -w)
    return mpc(0, 2) * A * u / (c * k * (u * v + rabi**2))


A = mpf("1e14")
gamma = 2 * pi * mpf("3e6")
gamma0 = 2 * pi * mpf("4e3")
rabi = 2 * pi * mpf("1e6")
k = mpf("7.9e6")
c = mpf("3e8")
w = 2 * pi * mpf("100e3")
L = mpf("0.075")

x = chi(A, gamma, gamma0, rabi, k, c, w)
print("chi(2pi*100kHz) =", mp.nstr(re(x), 20), mp.nstr(im(x), 20))
eta = exp(-k * L * im(x))
print("eta =", mp.nstr(eta, 20))
phase = lambda ww: k * L / 2 * re(chi(A, gamma, gamma0, rabi, k, c, ww))
print("phi =", mp.nstr(phase(w), 20))
print("tau_g (numeric derivative) =", mp.nstr(diff(phase, w), 20))
for f in (50e3, 500e3):
    ww = 2 * pi * mpf(f)
    print(f, "eta =", mp.nstr(exp(-k * L * im(chi(A, gamma, gamma0, rabi, k, c, ww))), 20))
