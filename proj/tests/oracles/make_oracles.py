#!/usr/bin/env python3
"""Writes oracle_values.hpp: reference numbers computed independently of the C++ code
(mpmath for closed forms, a small numpy Godunov reimplementation for scheme traces)."""
import sys
import mpmath as mp
import numpy as np

mp.mp.dps = 40
out = []


def emit(name, value):
    out.append(f"inline constexpr double {name} = {float(value)!r};")


def emit_array(name, values):
    body = ", ".join(repr(float(v)) for v in values)
    out.append(f"inline constexpr double {name}[] = {{{body}}};")


# congested inverse of Greenshields, bottleneck-like cell from the benchmark scale
v, rm, eps = mp.mpf("8.5"), mp.mpf("0.002048"), mp.mpf("1e-5")
phi_max = v * rm / 4
phi_d = phi_max - eps
rho_d = rm / 2 + mp.sqrt(rm * rm / 4 - rm / v * phi_d)
emit("kBenchVmax", v)
emit("kBenchRhoMax", rm)
emit("kBenchEps", eps)
emit("kBenchRhoD", rho_d)
emit("kBenchOffsetCorrect", mp.sqrt(eps * rm / v))
emit("kBenchOffsetShort", mp.sqrt(eps / v))
emit("kBenchNu", mp.sqrt(v * eps))
emit("kBenchWaveSpeed", 2 * mp.sqrt(v * eps / rm))

# uniform unit diagram, eps = 0.01
emit("kUnitRhoD", mp.mpf("0.5") + mp.sqrt(mp.mpf("0.25") - mp.mpf("0.24")))


# analytic Riemann solutions for v_max = rho_max = 1
def rarefaction(x, t, x0=1.0):
    s = (x - x0) / t
    return np.where(s <= -1, 1.0, np.where(s >= 1, 0.0, 0.5 * (1 - s)))


xs = np.linspace(0.0, 2.0, 21)
emit_array("kRarefactionX", xs)
emit_array("kRarefactionRho", rarefaction(xs, 0.5))


# Godunov trace on a line with a capacity dip, ghost and controlled outflow
def demand(r, vm, rmax):
    return np.where(r <= rmax / 2, vm * r * (1 - r / rmax), vm * rmax / 4)


def supply(r, vm, rmax):
    return np.where(r <= rmax / 2, vm * rmax / 4, vm * r * (1 - r / rmax))


n = 12
vm = np.array([1.0, 1.0, 1.2, 1.2, 0.8, 0.8, 1.0, 1.0, 1.1, 1.1, 1.0, 1.0])
rmax = np.array([1.0, 1.0, 0.9, 0.9, 0.7, 0.7, 1.0, 1.0, 1.0, 0.95, 1.0, 1.0])
rho0 = np.array([0.1, 0.2, 0.5, 0.6, 0.65, 0.3, 0.2, 0.9, 0.95, 0.4, 0.1, 0.05]) * rmax
dx = 1.0 / n
dt = 0.9 * dx / vm.max()
d_in = 0.2


def godunov(rho, steps, outflow):
    rho = rho.copy()
    ghost = None
    for _ in range(steps):
        f = np.empty(n + 1)
        f[0] = min(d_in, float(supply(rho[0], vm[0], rmax[0])))
        f[1:n] = np.minimum(demand(rho[:-1], vm[:-1], rmax[:-1]), supply(rho[1:], vm[1:], rmax[1:]))
        if outflow is None:
            f[n] = f[n - 1] if ghost is None else ghost
        else:
            f[n] = min(float(demand(rho[-1], vm[-1], rmax[-1])), outflow)
        rho -= dt / dx * (f[1:] - f[:-1])
        ghost = f[n - 1]
    return rho


emit_array("kTraceVmax", vm)
emit_array("kTraceRhoMax", rmax)
emit_array("kTraceRho0", rho0)
emit("kTraceDt", dt)
emit("kTraceInflow", d_in)
emit_array("kTraceGhost40", godunov(rho0, 40, None))
emit_array("kTraceSupply40", godunov(rho0, 40, 0.1))

header = [
    "// Generated by tests/oracles/make_oracles.py; do not edit.",
    "#pragma once",
    "",
    "namespace oracle {",
    "",
] + out + ["", "}  // namespace oracle", ""]
with open(sys.argv[1] if len(sys.argv) > 1 else "oracle_values.hpp", "w") as fh:
    fh.write("\n".join(header))
