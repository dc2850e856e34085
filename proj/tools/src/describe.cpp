#include <sstream>

#include "slelab_cli/run.hpp"

namespace slelab::cli {

namespace {

struct Entry {
  const char* tests;
  const char* sle;
  const char* parameters;
};

Entry entry_for(Experiment e) {
  switch (e) {
    case Experiment::Simulate:
      return {"No assertion. Samples driving functions and exports traces and, optionally, hull boundaries.",
              "any geometry and force points; horizon defaults to 1, dt to 1e-3",
              "  n_samples: 1\n"
              "  curves: none        # none | hull | left_right\n"
              "  resolution: 200     # preimages per boundary\n"};
    case Experiment::Density:
      return {"Proposition 3.1 (\"has a probability density function\"): the point where a strip\n"
              "SLE(kappa; rho+, rho-) trace from (0; +inf, -inf) meets R_pi has density\n"
              "proportional to exp(x/2)^((4/kappa) sigma) cosh(x/2)^(-4/kappa), sigma = (rho- - rho+)/2.\n"
              "Requires rho+ + rho- = kappa - 6 and |rho+ - rho-| < 2. One-sample KS against 1.63/sqrt(n);\n"
              "at sigma = 0 also KS between J and -J against 2.81/sqrt(n).",
              "geometry: strip; force_points: [{at: \"+inf\", rho: rho+}, {at: \"-inf\", rho: rho-}];\n"
              "  horizon defaults to 50, dt to 1e-3",
              "  n_samples: 2000\n"
              "  approach: 0.02            # first approach within this distance of R_pi\n"
              "  max_failure_fraction: 0.05\n"};
    case Experiment::Mixture:
      return {"Lemma 3.1 and Theorem 3.2: strip SLE(kappa; rho+, rho-) equals the mixture over x of\n"
              "strip SLE(kappa; -4, rho- + 2, rho+ + 2) aimed at x + pi i, x drawn from the endpoint density.\n"
              "Two-sample KS of xi(t0) between the arms and an A-vs-A control (threshold 1.63 sqrt(2/n)).",
              "geometry: strip; force_points at +inf and -inf as for density;\n"
              "  horizon (endpoint follow-up) defaults to 50, dt to 1e-3",
              "  n_samples: 2000\n"
              "  t0: 0.5\n"
              "  endpoint_samples: 200     # mixture samples followed to R_pi\n"
              "  endpoint_radius: 0.1\n"
              "  endpoint_approach: 0.005   # first approach within this distance of R_pi\n"
              "  endpoint_fraction: 0.9\n"
              "  control_only: false\n"};
    case Experiment::Duality:
      return {"Theorem 1.2 (\"is a crosscut in H on R connecting\") for 4 < kappa < 8: at the swallowing\n"
              "time of x the hull boundary is a crosscut with one end beyond x and one on the other\n"
              "side of 0. Proposition 1.1 for kappa >= 8: the end on the side of x lies at x.",
              "geometry: chordal; kappa > 4; force_points: [{at: x, rho: 0}];\n"
              "  horizon defaults to 8 (samples not swallowed by then are excluded), dt to 1e-4",
              "  n_samples: 500\n"
              "  resolution: 200\n"
              "  magnitude_tolerance: 0.02\n"
              "  endpoint_tolerance: 0.05\n"
              "  max_violation_fraction: 0.02\n"};
    case Experiment::Limits:
      return {"Theorem 7.12 (\"In Case (11), a.s.\"): limit of a strip SLE(kappa; rho+, rho-, rho0) trace\n"
              "from (0; +inf, -inf, p0) by the intervals containing rho+ and rho-; for two-sided cases\n"
              "the side frequency is compared with the scale-function exit probability.",
              "geometry: strip; force_points: [{at: \"+inf\", rho: rho+}, {at: \"-inf\", rho: rho-},\n"
              "  {at: {top: x0}, rho: kappa - 6 - rho+ - rho-}]; horizon defaults to 200, dt to 1e-3",
              "  n_samples: 300\n"
              "  escape_re: 8\n"
              "  reach: 0.05\n"
              "  target_radius: 0.1\n"
              "  max_undecided: 0.2\n"};
    case Experiment::Scaling:
      return {"Scaling invariance of chordal SLE: a gamma(t) and gamma(a^2 t) have the same law.\n"
              "Two-sample KS on real and imaginary parts.",
              "geometry: chordal; no force points; horizon is t (default 0.25), dt defaults to 1e-3",
              "  n_samples: 2000\n"
              "  a: 2\n"};
    case Experiment::Dimension:
      return {"Box-counting dimension. Traces: \"dimension (1+kappa/8) ^ 2 everywhere\". Hull boundaries at\n"
              "the swallowing time of x: Theorem 6.1, \"dimension 1+2/kappa everywhere\".",
              "geometry: chordal; target trace: no force points, horizon is t (default 1);\n"
              "  target hull_boundary: kappa > 4, force_points: [{at: x, rho: 0}], horizon default 8;\n"
              "  dt defaults to 1e-4",
              "  target: trace             # trace | hull_boundary\n"
              "  n_samples: 20\n"
              "  n_scales: 10\n"
              "  tolerance: 0.15\n"
              "  boundary_resolution: 2000\n"
              "  boundary_points: 20000\n"
              "  boundary_lift: 1e-9\n"};
  }
  return {"", "", ""};
}

}  // namespace

std::string describe(const std::string& experiment) {
  const Experiment e = experiment_from_string(experiment);
  const Entry entry = entry_for(e);
  std::ostringstream out;
  out << "experiment: " << to_string(e) << "\n\n"
      << "tests:\n" << entry.tests << "\n\n"
      << "sle block:\n  " << entry.sle << "\n\n"
      << "parameters (defaults):\n" << entry.parameters << "\n"
      << "common keys: seed (else SLE_LAB_SEED, else 0), output_dir, format: json | csv\n";
  return out.str();
}

}  // namespace slelab::cli
