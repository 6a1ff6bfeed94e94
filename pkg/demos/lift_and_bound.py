"""Lift each bundled certificate to the counter-augmented system and
evaluate the finite-horizon safety bound, both from the published rounded
constants (digit-exact reproduction) and at full precision."""

from shscert import compute_delta, compute_delta_for, construct_acbc, load_case

print(f"{'case':4s} {'regime':6s} {'beta_a':>8s} {'beta_e':>8s} {'kappa':>9s} "
      f"{'gamma':>7s} {'safety(rounded)':>16s} {'safety(full)':>13s}")
for cid in ("1", "2", "3"):
    case = load_case(cid)
    acbc = construct_acbc(case.candidate, case.model.jump, case.eps1, case.eps2)
    full = compute_delta_for(acbc, case.horizon)
    rep = case.reported
    rounded = compute_delta(
        case.reported_alpha, case.reported_eta, rep["kappa"], rep["gamma"], case.horizon
    )
    print(
        f"{cid:4s} {acbc.regime:6s} {acbc.beta_alpha:8.4f} {acbc.beta_eta:8.4f} "
        f"{acbc.kappa:9.6f} {acbc.gamma:7.4f} "
        f"{rounded.safety_probability:16.6f} {full.safety_probability:13.6f}"
    )

print(
    "\nThe rounded column reproduces the published probabilities 0.9443,"
    "\n0.9124, 0.8939. Case 2 decays through the second branch of the bound"
    "\nat full precision, which is why its full-precision number needs the"
    "\nrounded decay rate 0.99 to match the published value."
)
