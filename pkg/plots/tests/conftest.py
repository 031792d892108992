"""Synthetic CSV artifacts in the solver's formats."""

import numpy as np
import pytest


@pytest.fixture
def pdf_csv(tmp_path):
    def make(name="pdf.csv", p="0.25"):
        x = np.linspace(-1.5, 1.5, 61)
        num = np.exp(-(x**2))
        ana = num * 1.01
        path = tmp_path / name
        with open(path, "w") as fh:
            fh.write(f"#alpha=0.5\n#p={p}\n#h=0.001953125\n#T=1.0\n#kind=wait_first\n")
            fh.write("x,numeric,analytic\n")
            for row in zip(x, num, ana):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return path

    return make


@pytest.fixture
def mass_csv(tmp_path):
    path = tmp_path / "mass.csv"
    t = np.linspace(0.0, 1.0, 33)
    std = 1.0 + 0.05 * np.exp(-5 * t)
    adv = 1.0 - 0.05 * np.exp(-5 * t)
    with open(path, "w") as fh:
        fh.write("#alpha=0.5\n#p=0.5\n#h=0.03125\n#T=1.0\n")
        fh.write("t,standard,advanced_source\n")
        for row in zip(t, std, adv):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return path


@pytest.fixture
def convergence_csv(tmp_path):
    def make(name="conv.csv", alpha=0.5, slope=1.4732905983231):
        hs = [2.0**-k for k in range(4, 9)]
        path = tmp_path / name
        with open(path, "w") as fh:
            fh.write("alpha,h,norm_kind,error,slope\n")
            for h in hs:
                fh.write(
                    f"{alpha:.17g},{h:.17g},linf,{3.0 * h**slope:.17g},{slope:.17g}\n"
                )
        return path

    return make


@pytest.fixture
def kernel_csv(tmp_path):
    path = tmp_path / "kernel.csv"
    x = np.linspace(-2.0, 2.0, 81)
    g = np.where(np.abs(x) < 1.0, 1.0 - np.abs(x), 0.0)
    with open(path, "w") as fh:
        fh.write("#alpha=0.75\n#p=0.3\n#mass=0.8151234\n#expected_mass=0.8151235\n")
        fh.write("x,G1\n")
        for row in zip(x, g):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return path
