#!/usr/bin/env python3
# Regenerates include/kissing/gk15_table.hpp (60-digit Gauss-Kronrod 7/15 data).
import sys
import mpmath as mp

mp.mp.dps = 90


def p7(x):
    return mp.legendre(7, x)


def integral(f):
    return mp.quad(f, [-1, 1])


gauss = sorted(
    mp.findroot(p7, mp.cos(mp.pi * (k + mp.mpf(3) / 4) / (7 + mp.mpf(1) / 2)),
                solver="newton", df=lambda x: mp.diff(p7, x))
    for k in range(7))

# Stieltjes polynomial E8 = x^8 + c6 x^6 + c4 x^4 + c2 x^2 + c0, orthogonal to x^k P7
rows, rhs = [], []
for k in (1, 3, 5, 7):
    rows.append([integral(lambda x: x**p * p7(x) * x**k) for p in (0, 2, 4, 6)])
    rhs.append(-integral(lambda x: x**8 * p7(x) * x**k))
c = mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))


def e8(x):
    return x**8 + c[3] * x**6 + c[2] * x**4 + c[1] * x**2 + c[0]


kronrod = []
for s in mp.linspace(-0.999, 0.999, 400):
    try:
        r = mp.findroot(e8, s)
    except (ZeroDivisionError, ValueError):
        continue
    if abs(mp.im(r)) < 1e-50 and abs(r) < 1:
        r = mp.re(r)
        if all(abs(r - q) > 1e-40 for q in kronrod):
            kronrod.append(r)
assert len(kronrod) == 8
nodes = sorted(gauss + kronrod)


def weights(pts):
    m = len(pts)
    a = mp.matrix(m, m)
    b = mp.matrix(m, 1)
    for i in range(m):
        for j in range(m):
            a[i, j] = pts[j]**i
        b[i] = (1 - (-1)**(i + 1)) / mp.mpf(i + 1)
    return mp.lu_solve(a, b)


wk = weights(nodes)
wg = weights(gauss)

out = sys.stdout
out.write("#pragma once\n\n// x >= 0 half of the 15-point Kronrod rule; gauss weight 0 marks Kronrod-only nodes.\n")
out.write("namespace kissing::detail {\n\ninline constexpr const char* kGK15[8][3] = {\n")
for j in range(15):
    if nodes[j] < 0:
        continue
    gw = [wg[i] for i in range(7) if abs(gauss[i] - nodes[j]) < 1e-40]
    out.write('    {"%s", "%s", "%s"},\n' % (mp.nstr(nodes[j], 60), mp.nstr(wk[j], 60),
                                          mp.nstr(gw[0], 60) if gw else "0"))
out.write("};\n\n}  // namespace kissing::detail\n")
