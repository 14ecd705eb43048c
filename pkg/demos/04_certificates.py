"""Decomposition-rank certificates: generate, serialize, verify, corrupt.

A certificate packages one finite-dimensional approximation step
A -> (+)F_i -> A: a 2-positive contraction psi down, 2-positive
order-zero contractions phi_i up with contractive sum, and a test set on
which the round trip must be epsilon-accurate. The verifier measures all
of it and names the sub-check that fails.
"""

import dataclasses
import tempfile
from pathlib import Path

from posmap import (
    FiniteCStar,
    identity_certificate,
    load_certificate,
    orderzero_certificate,
    save_certificate,
    tomiyama_map,
    verify_certificate,
)

M2 = FiniteCStar((2,))
M23 = FiniteCStar((2, 3))


def show(tag, rep):
    print(f"  {tag}")
    print(f"    psi: norm {rep.psi_norm:.6f} ok={rep.psi_contraction_ok}, "
          f"2-positive {rep.psi_two_positive.status}")
    for i, leg in enumerate(rep.legs):
        print(f"    phi_{i}: norm {leg.contraction_norm:.4f}, "
              f"2-positive {leg.two_positive.status}, "
              f"order-zero ok={leg.order_zero_ok} "
              f"(mult {leg.mult_defect:.1e})")
    print(f"    sum norm {rep.sum_norm:.6f} ok={rep.sum_contractive_ok}")
    errs = ", ".join(f"{e:.2e}" for e in rep.approx_errors)
    print(f"    approx errors [{errs}] vs eps {rep.epsilon}")
    print(f"    OVERALL: {'pass' if rep.overall else 'FAIL'}"
          f"{' (with caveat)' if rep.caveat else ''}")


print("=" * 72)
print("identity certificate on M_2 (+) M_3 (rank-0 witness)")
print("=" * 72)
show("verify:", verify_certificate(identity_certificate(M23)))

print()
print("partition-of-unity certificate with weights (0.3, 0.7) on M_2")
print("-" * 72)
cert = orderzero_certificate(M2, [0.3, 0.7], seed=1)
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "certificate.json"
    save_certificate(cert, path)
    size = path.stat().st_size
    cert = load_certificate(path)
    print(f"  serialized to {size} bytes of canonical JSON and reloaded")
show("verify:", verify_certificate(cert))

print()
print("three corruptions, each failing its own sub-check")
print("-" * 72)
mutant = dataclasses.replace(
    identity_certificate(M2, epsilon=2.5), phis=(tomiyama_map(2, 1.0),)
)
show("phi_0 replaced by the trace map (order-zero check must fail):",
     verify_certificate(mutant))

base = orderzero_certificate(M2, [0.5, 0.5], epsilon=0.2)
mutant = dataclasses.replace(base, phis=(1.2 * base.phis[0], base.phis[1]))
show("legs rescaled to sum 1.1 (contractive-sum check must fail):",
     verify_certificate(mutant))

cert_c = identity_certificate(M2, epsilon=1e-6)
mutant = dataclasses.replace(cert_c, psi=0.99 * cert_c.psi)
show("psi shrunk by 1% (approximation check must fail):",
     verify_certificate(mutant))
