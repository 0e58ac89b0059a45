"""Regenerate the JSON fixtures in ``fixtures/`` (deterministic)."""

from pathlib import Path

import numpy as np

from aimkp import suite
from aimkp.serialize import write_spectral, write_triple
from aimkp.triples import (
    SpectralSolitonData,
    Triple,
    make_rng,
    random_kappa_one,
    random_kdv_triple,
    random_soliton_data,
    rational_example,
    soliton_triple,
)

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    OUT.mkdir(exist_ok=True)
    write_triple(OUT / "rational_example.json", rational_example(2))

    data = random_soliton_data(make_rng(11), 3)
    write_spectral(OUT / "soliton3_spectral.json", data)
    M = soliton_triple(data)
    write_triple(OUT / "soliton3.json", M)
    bump = np.zeros((3, 3))
    bump[0, 1] = 0.05
    write_triple(OUT / "soliton3_perturbed.json", Triple(M.X + bump, M.Y, M.Z))

    write_spectral(OUT / "kp_two_soliton_spectral.json", suite.KP_TWO_SOLITON)
    write_triple(OUT / "kdv3.json", random_kdv_triple(make_rng(12), 3))
    write_triple(OUT / "generic_kappa1.json", random_kappa_one(make_rng(13), 3, "sylvester"))
    write_triple(OUT / "full_rank3.json", suite.pinned_control_triple())
    write_triple(OUT / "rs3_lam-1.json", suite.rs_triple(0))
    write_triple(OUT / "rs3_lam2_gamma1.json", suite.rs_triple(0, 2.0, 1.0))

    rng = make_rng(14)
    z = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) / np.sqrt(6)
    x = np.eye(3) + 0.3 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) / np.sqrt(6)
    write_triple(OUT / "kappa0.json", Triple(x, x @ z @ np.linalg.inv(x), z))


if __name__ == "__main__":
    main()
