// Timing comparison of the element-parallel kernels against their serial
// reference twins, with a bit-exactness check on every output.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "rissec/kernels.hpp"
#include "rissec/rng.hpp"

using namespace rissec;

namespace {

MatrixXcd random_matrix(StreamRng& rng, int rows, int cols) {
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

double time_best_of(const std::function<void()>& fn, int reps) {
  using clock = std::chrono::steady_clock;
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock::now();
    fn();
    const auto t1 = clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

bool bit_equal(const MatrixXcd& a, const MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

}  // namespace

int main() {
  const int n = 4, k = 4, reps = 7;
  bool all_exact = true;
  std::printf("%-20s %8s %12s %12s %8s %6s\n", "kernel", "M", "parallel[s]",
              "serial[s]", "speedup", "exact");

  for (int m : {64, 256, 1024, 4096}) {
    StreamRng rng(7, "bench");
    const MatrixXcd direct = random_matrix(rng, n, k);
    const MatrixXcd ris_out = random_matrix(rng, n, m);
    const MatrixXcd ris_in = random_matrix(rng, m, k);
    const MatrixXcd lhs = random_matrix(rng, m, k);
    const MatrixXcd rhs = random_matrix(rng, k, m);
    RisParams p;
    p.beta_min = 0.35;
    p.alpha = 1.5;
    p.theta_tilde = 1.36;
    VectorXd theta(m);
    for (int i = 0; i < m; ++i) theta[i] = rng.uniform(p.theta_min, p.theta_max);
    VectorXcd phi_par(m), dphi_par(m), phi_ref(m), dphi_ref(m);
    kernels::reflection_batch(theta, p, phi_par, dphi_par);
    kernels::ref::reflection_batch(theta, p, phi_ref, dphi_ref);

    struct Case {
      const char* name;
      std::function<void()> par;
      std::function<void()> ref;
      std::function<bool()> check;
    };
    MatrixXcd out_par, out_ref;
    VectorXcd diag_par, diag_ref;
    const Case cases[] = {
        {"compose_effective",
         [&] { out_par = kernels::compose_effective(direct, ris_out, phi_par, ris_in); },
         [&] { out_ref = kernels::ref::compose_effective(direct, ris_out, phi_par, ris_in); },
         [&] { return bit_equal(out_par, out_ref); }},
        {"coupling_diag",
         [&] { diag_par = kernels::coupling_diag(lhs, rhs); },
         [&] { diag_ref = kernels::ref::coupling_diag(lhs, rhs); },
         [&] { return bit_equal(diag_par, diag_ref); }},
        {"reflection_batch",
         [&] { kernels::reflection_batch(theta, p, phi_par, dphi_par); },
         [&] { kernels::ref::reflection_batch(theta, p, phi_ref, dphi_ref); },
         [&] {
           return bit_equal(phi_par, phi_ref) && bit_equal(dphi_par, dphi_ref);
         }},
    };
    for (const Case& c : cases) {
      const double tp = time_best_of(c.par, reps);
      const double ts = time_best_of(c.ref, reps);
      const bool exact = c.check();
      all_exact = all_exact && exact;
      std::printf("%-20s %8d %12.3e %12.3e %7.2fx %6s\n", c.name, m, tp, ts,
                  ts / tp, exact ? "yes" : "NO");
    }
  }
  if (!all_exact) {
    std::fprintf(stderr, "parallel kernels diverged from the serial twins\n");
    return 1;
  }
  return 0;
}
