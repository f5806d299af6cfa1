"""Reference values for the frozen-oracle tests, computed with mpmath at 40 digits.

Uses only mpmath's Jacobi theta and direct products, independently of the Rust
implementation. Run: python3 tools/oracle.py > crates/core/tests/oracle_values/mod.rs
"""
import mpmath as mp

mp.mp.dps = 40
I = mp.mpc(0, 1)


def theta(x, tau):
    return mp.jtheta(1, mp.pi * x, mp.exp(mp.pi * I * tau))


def br(x, eta, tau):
    return theta(2 * eta * x, tau)


def br_fact(x, k, eta, tau):
    out = mp.mpf(1)
    for j in range(k):
        out *= br(x + j, eta, tau)
    return out


def pp(p):
    return mp.qp(p)


def e_k(k, n, x, a, b, eta, tau):
    v = mp.mpf(1)
    for j in range(k):
        v *= theta(a + 2 * j * eta + x, tau) * theta(a + 2 * j * eta - x, tau)
    for j in range(n - k):
        v *= theta(b + 2 * j * eta + x, tau) * theta(b + 2 * j * eta - x, tau)
    return v


def weight(u, v, n, eta, tau):
    h = mp.mpf(1) / 2 + tau / 2
    den = mp.exp(2 * mp.pi * I * u * (n + 2))
    for k in range(n + 2):
        c = (2 * k - n - 1) * eta + h
        den *= theta(u + v + c, tau) * theta(u - v + c, tau)
    return theta(2 * u, tau) * theta(2 * v, tau) / den


def const_c(n, eta, tau):
    p = mp.exp(2 * mp.pi * I * tau)
    return 2 * eta * p ** (mp.mpf(3) / 8) / (theta(2 * (n + 1) * eta, tau) * pp(p) ** 3)


def gamma_k(a1, a2, k, n, eta, tau):
    lam = (a1 - a2 - 2 * n * eta) / (2 * eta)
    s = (a1 + a2 - n * eta) / (2 * eta)
    pref = mp.exp(mp.pi * I * n * (tau - 1) / 2)
    num = br(lam, eta, tau) * br_fact(1, k, eta, tau) * br_fact(lam + n + 1, k, eta, tau)
    den = br(lam + 2 * k, eta, tau) * br_fact(-n, k, eta, tau) * br_fact(lam, k, eta, tau)
    return pref * num / den * br_fact(lam + 1, n, eta, tau) * br_fact(s, n, eta, tau)


def ell_gamma(x, p, q, terms=400):
    out = mp.mpf(1)
    for j in range(terms):
        pj = p ** j
        if abs(pj) < mp.mpf(10) ** -45:
            break
        for k in range(terms):
            qk = q ** k
            if abs(pj * qk) < mp.mpf(10) ** -45:
                break
            out *= (1 - pj * p * qk * q / x) / (1 - pj * qk * x)
    return out


def c(z):
    z = mp.mpc(z)
    return "C64::new(%s, %s)" % (mp.nstr(z.real, 20, min_fixed=-1, max_fixed=1), mp.nstr(z.imag, 20, min_fixed=-1, max_fixed=1))


def f(z):
    return mp.nstr(mp.mpf(z), 20, min_fixed=-1, max_fixed=1)


rows = []
x_pts = [mp.mpc("0.31", "0.07"), mp.mpc("-0.12", "0.19"), mp.mpc("0.45", "-0.03")]
for tau_im in ["0.25", "1.0"]:
    tau = I * mp.mpf(tau_im)
    for x in x_pts:
        rows.append(("THETA", "(%s, %s, %s)" % (tau_im, c(x), c(theta(x, tau)))))

for tau_im in ["0.25", "1.0"]:
    tau = I * mp.mpf(tau_im)
    d = mp.diff(lambda t: theta(t, tau), 0)
    rows.append(("THETA_PRIME_ZERO", "(%s, %s)" % (tau_im, f(mp.re(d)))))

regimes = [("0.25", mp.mpc("0.05", 0)), ("1.0", mp.mpc(0, "0.05"))]
a, b = mp.mpc("0.13", "0.02"), mp.mpc("-0.21", "0.05")
for tau_im, eta in regimes:
    tau = I * mp.mpf(tau_im)
    for n, k in [(2, 0), (3, 1), (3, 3)]:
        x = x_pts[0]
        rows.append(("BASIS", "(%s, %s, %d, %d, %s)" % (tau_im, c(eta), n, k, c(e_k(k, n, x, a, b, eta, tau)))))
    for n in [1, 3]:
        u = mp.mpc("0.21", "0.07") * mp.mpf(tau_im) / mp.mpf("0.25") if tau_im == "1.0" else mp.mpc("0.21", "0.07")
        rows.append(("WEIGHT", "(%s, %s, %d, %s, %s)" % (tau_im, c(eta), n, c(u), c(weight(u, mp.conj(u), n, eta, tau)))))
        rows.append(("CONST_C", "(%s, %s, %d, %s)" % (tau_im, c(eta), n, c(const_c(n, eta, tau)))))
    a1, a2 = mp.mpc("0.31", "0.06"), mp.mpc("0.12", "0.03")
    for n, k in [(2, 1), (3, 0), (3, 2)]:
        rows.append(("GAMMA_K", "(%s, %s, %d, %d, %s)" % (tau_im, c(eta), n, k, c(gamma_k(a1, a2, k, n, eta, tau)))))

for p, q, x in [("0.2", mp.mpc("0.5", "0.1"), mp.mpc("0.3", "0.1")), ("0.05", mp.mpc("0.1", "-0.3"), mp.mpc("-0.7", "0.4"))]:
    rows.append(("ELL_GAMMA", "(%s, %s, %s, %s)" % (p, c(q), c(x), c(ell_gamma(x, mp.mpf(p), q)))))

types = {
    "THETA": "(f64, C64, C64)",
    "THETA_PRIME_ZERO": "(f64, f64)",
    "BASIS": "(f64, C64, usize, usize, C64)",
    "WEIGHT": "(f64, C64, usize, C64, C64)",
    "CONST_C": "(f64, C64, usize, C64)",
    "GAMMA_K": "(f64, C64, usize, usize, C64)",
    "ELL_GAMMA": "(f64, C64, C64, C64)",
}
print("// Generated by tools/oracle.py (mpmath, 40 digits); do not edit.")
print("#![allow(clippy::excessive_precision)]\n")
print("use sklyanin_core::C64;")
for name, ty in types.items():
    vals = [r for n_, r in rows if n_ == name]
    print("\npub const %s: [%s; %d] = [" % (name, ty, len(vals)))
    for v in vals:
        print("    %s," % v)
    print("];")
