"""Print stability verdicts for the bundled profiles and a conditionally stable example."""
from pumadde.model import ModelParams, find_equilibria
from pumadde.stability import (CharCoefficients, classify_coefficients, classify_equilibrium,
                               count_unstable_roots, format_verdict)

PROFILES = {
    "equilibrium": ModelParams(0.1, 200, 0.5, 0.5, 0.1, 2, 27),
    "oscillatory": ModelParams(0.05, 200, 0.5, 0.8, 0.1, 2, 27),
    "predator cannot persist": ModelParams(0.1, 200, 0.5, 0.05, 0.1, 2, 27),
}


def main():
    for name, params in PROFILES.items():
        print(f"== {name}: {params}")
        for eq in find_equilibria(params):
            print(format_verdict(eq, classify_equilibrium(params, eq)))
        print()

    # positive equilibria of this model never land in the windowed regime,
    # so show it on bare coefficients
    c = CharCoefficients(m=0.5, n=0.2, p=1.0, q=0.5)
    v = classify_coefficients(c, tau_ref=10.0)
    print(f"== coefficients {c}: {v.status.value}")
    for lo, hi in v.stable_windows:
        print(f"  stable for tau in [{lo:.6g}, {hi:.6g})")
    for tau in (0.0, 1.0, 2.0, 10.0):
        print(f"  tau={tau:<5g} unstable roots: {count_unstable_roots(c, tau)}")


if __name__ == "__main__":
    main()
