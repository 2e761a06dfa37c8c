"""Walk through the integration measure on the standard benchmark states.

Run:  python3 demos/benchmark_measures.py
"""

import math

from qphi import compute_qii, qii_profile
from qphi.states import dicke, ghz, product_state, random_mixed, w


def show(label, rho):
    res = compute_qii(rho)
    print(f"\n{label}")
    print(f"  phi = {res.phi_bits:.9f} bits")
    print(f"  MIP = {res.mip.text()}  ({res.mip.block_count} blocks)")
    print("  full table:")
    for partition, value in res.table:
        marker = "  <-- minimum" if partition == res.mip else ""
        print(f"    {partition.text():12s} {value:.9f}{marker}")
    print("  profile (best value per block count):")
    for blocks, value in qii_profile(rho):
        print(f"    {blocks} blocks: {value:.9f}")


def main():
    print("Integration measure = min over partitions of")
    print("S(rho || product of block marginals), in bits.")

    show("GHZ(3), the fragile benchmark", ghz(3))
    print("\n  closed form: bipartition 2.0, tripartition 3.0")

    show("W(3), the robust benchmark", w(3))
    print(f"\n  closed form: 2*log2(3) - 4/3 = {2 * math.log2(3) - 4 / 3:.9f}")
    print(f"               log2(27/4)      = {math.log2(27 / 4):.9f}")

    show("Dicke(4, 2), two excitations on four sites", dicke(4, 2))
    show("product state |+0->, no integration at all", product_state("+0-"))
    show("random mixed 3-qubit state (seed 7)", random_mixed(3, seed=7))


if __name__ == "__main__":
    main()
