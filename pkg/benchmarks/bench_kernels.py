"""Benchmark the compiled row-reduction kernel against the pure-Python fallback.

Matrices come from the package's own workload: deformation systems and lifted
deformation-polytope systems of seeded random menus, plus synthetic sparse
integer matrices. Outputs a timing table and verifies bit-identical results.

Run:  python benchmarks/bench_kernels.py
"""

import statistics
import time

from extremenu import _rowred_py
from extremenu import applications as apps
from extremenu import extremality, model
from extremenu.geometry import _sparse_int_rows
from extremenu.presets import space_for_preset

try:
    from extremenu import _rowred_c
except ImportError:
    _rowred_c = None


def scenario_matrices(preset, d, k, count, seed):
    """(rows, ncols) pairs from real deformation systems."""
    space, cone = space_for_preset(preset, d=d)
    out = []
    for i in range(count):
        rng = apps._instance_rng(seed, i)
        items = apps.sample_menu(preset, d, k, rng)
        try:
            items = apps.force_exhaustive(items, space, cone)
        except model.ScenarioError:
            continue
        sc = model.validate_scenario(space, cone, dict.fromkeys(tuple(p) for p in items))
        em = model.extended_menu(sc)
        system = extremality.build_deformation_system(em, space)
        if system.rows:
            out.append((_sparse_int_rows(system.rows), system.ncols))
        # the lifted cross-check system
        hm = em.poly.halfspaces
        kk = len(hm)
        n = len(em.vertices)
        ncols = kk + d * n
        rows = []
        for vi in range(n):
            for h_idx in sorted(em.poly.incidence[vi]):
                row = [0] * ncols
                row[h_idx] = -1
                for c in range(d):
                    row[kk + vi * d + c] = hm[h_idx].normal[c]
                rows.append({j: v for j, v in enumerate(row) if v})
        out.append((rows, ncols))
    return out


def bench(impl, matrices, repeat=3):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for rows, ncols in matrices:
            impl.rref_sparse([dict(r) for r in rows], ncols)
        times.append(time.perf_counter() - t0)
    return min(times), statistics.mean(times)


def main():
    suites = {
        "simplex d=3 k=6": scenario_matrices("simplex", 3, 6, 40, seed=11),
        "cube d=4 k=10": scenario_matrices("cube", 4, 10, 20, seed=12),
        "monopoly d=3 k=8": scenario_matrices("monopoly", 3, 8, 20, seed=13),
    }
    print(f"{'suite':<20} {'matrices':>8} {'python best':>12} {'cython best':>12} {'speedup':>8}")
    for name, mats in suites.items():
        py_best, _ = bench(_rowred_py, mats)
        if _rowred_c is None:
            print(f"{name:<20} {len(mats):>8} {py_best:>11.4f}s {'(not built)':>12} {'-':>8}")
            continue
        cy_best, _ = bench(_rowred_c, mats)
        # parity: identical outputs
        for rows, ncols in mats:
            a = _rowred_py.rref_sparse([dict(r) for r in rows], ncols)
            b = _rowred_c.rref_sparse([dict(r) for r in rows], ncols)
            assert a == b, "backend outputs diverged"
        print(
            f"{name:<20} {len(mats):>8} {py_best:>11.4f}s {cy_best:>11.4f}s "
            f"{py_best / cy_best:>7.2f}x"
        )


if __name__ == "__main__":
    main()
