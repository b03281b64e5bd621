"""End-to-end smoke test of the isodrum_rs Python bindings.

Builds the extension if needed, then walks the whole pipeline once at a
coarse refinement: triple verification, character theory, transplantation
matrix, gluing graphs and orientability, surface assembly, spectra, and
the transplantation check. Run with `python3 python/smoke_test.py`.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import build_extension

build_extension.ensure()

import isodrum_rs as iso


def check(label: str, ok: bool, detail: str = "") -> None:
    status = "ok" if ok else "FAIL"
    print(f"  [{status}] {label}" + (f" — {detail}" if detail else ""))
    if not ok:
        sys.exit(1)


def main() -> None:
    print("isodrum_rs smoke test")

    triple = iso.verify_triple()
    check(
        "gamma1/gamma2 almost conjugate but nonconjugate",
        triple.almost_conjugate and not triple.conjugate_as_subgroups,
        repr(triple),
    )
    check("bijection covers the subgroup", len(triple.matching) == 4)

    bad = iso.verify_triple(h2="cyclic8")
    check(
        "cyclic8 control fails with a named class",
        not bad.almost_conjugate and bad.failing_class is not None,
        f"failing class {bad.failing_class}",
    )

    table = iso.character_table_text()
    check("character table prints", "W+" in table and "X" in table)
    for sub in ("gamma1", "gamma2"):
        parts = iso.decompose_coset_module(sub)
        check(
            f"coset module of {sub} decomposes as 1 + 1(-++) + W+ + X",
            parts == [("1", 1), ("1(-++)", 1), ("W+", 1), ("X", 1)],
            str(parts),
        )

    check("intertwiner space has dimension 4", iso.intertwiner_dimension() == 4)

    exact, matrix, invertible = iso.transplantation()
    check(
        "default transplantation column",
        [row[0] for row in matrix] == [1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 2.0]
        and invertible,
        f"exact first row {exact[0]}",
    )
    _, _, singular_ok = iso.transplantation(a=(0, 1))
    check("a=0 member is singular", not singular_ok)

    g1 = iso.build_graph("gamma1")
    g2 = iso.build_graph("gamma2")
    check(
        "M1 nonorientable, M2 orientable",
        not g1.orientable and g2.orientable,
        f"witness {g1.witness}",
    )
    check(
        "8 tiles, 12 gluings each",
        g1.vertex_count == 8 and len(g1.edges) == 12 and len(g2.edges) == 12,
    )

    s1 = iso.build_surface("ytile", "gamma1", refinement=4)
    s2 = iso.build_surface("ytile", "gamma2", refinement=4)
    check(
        "surfaces share area and Euler characteristic",
        math.isclose(s1.area, s2.area)
        and s1.euler_characteristic == s2.euler_characteristic,
        repr(s1),
    )
    off = iso.surface_off("ytile", "gamma1", refinement=2)
    check("OFF export", off.startswith("OFF"))

    annuli = [
        iso.build_surface("triangle", sub, refinement=2, gens=["st", "t", "tu"])
        for sub in ("gamma1", "gamma2")
    ]
    check(
        "triangle variant: two flat annuli, one singular",
        all(a.euler_characteristic == 0 and a.boundary_components == 2 for a in annuli)
        and len(annuli[0].cone_points) == 0
        and len(annuli[1].cone_points) > 0,
        f"cone points {[len(a.cone_points) for a in annuli]}",
    )

    values1, residuals1 = iso.spectrum("ytile", "gamma1", refinement=4, count=8)
    values2, _ = iso.spectrum("ytile", "gamma2", refinement=4, count=8)
    scale = max(values1[-1], values2[-1])
    worst = max(abs(a - b) / scale for a, b in zip(values1, values2))
    check(
        "coarse Neumann spectra agree",
        worst < 1e-9 and max(residuals1) < 1e-6,
        f"max rel diff {worst:.2e}",
    )

    ladders = [
        iso.spectrum("square", "gamma1", refinement=k, bc="dirichlet", count=3,
                     gens=None)[0]
        for k in (8, 16, 32)
    ]
    # The square tile has no glue labels, so all 8 coset tiles are disjoint
    # copies: every eigenvalue appears 8 times. Deduplicate to the base
    # spectrum before extrapolating.
    entries = iso.extrapolate([8, 16, 32], ladders)
    first = entries[0]
    target = 2 * math.pi**2
    check(
        "unit-square Dirichlet ground state extrapolates to 2*pi^2",
        abs(first["extrapolated"] - target) / target < 1e-4,
        f"extrapolated {first['extrapolated']:.6f}, order {first['observed_order']:.2f}",
    )

    report = iso.verify_transplant("ytile", refinement=4, count=8, tol=1e-10)
    check(
        "transplantation verifies at coarse refinement",
        report.eigenvalue_max_rel_diff < 1e-9
        and report.gluing_max_residual < 1e-12,
        repr(report),
    )

    print("smoke test passed")


if __name__ == "__main__":
    main()
