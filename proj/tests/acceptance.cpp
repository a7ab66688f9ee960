// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotex/cli.hpp"
#include "rotex/exact_checks.hpp"
#include "rotex/experiments.hpp"
#include "rotex/hodge.hpp"
#include "rotex/hydro.hpp"

using namespace rotex;

namespace {

int failures = 0;

void verdict(const char* id, bool pass, const std::string& what, double seconds) {
  std::printf("%s %s  %s  (%.2f s)\n", id, pass ? "PASS" : "FAIL", what.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
  std::va_list args;
  va_start(args, fmt);
  std::printf("    ");
  std::vprintf(fmt, args);
  std::printf("\n");
  va_end(args);
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string rat(const Rational& a) { return std::to_string(a.numerator()) + "/" + std::to_string(a.denominator()); }

bool report_ok(const CheckReport& r, const std::string& label) {
  note("%-44s violation=%.3g  instances=%llu  %.3f s", label.c_str(), r.max_violation,
       static_cast<unsigned long long>(r.instances), r.runtime_seconds);
  return r.pass;
}

const std::vector<Rational> kAlphas{Rational(0), Rational(1, 2), Rational(-3, 4)};

// ---------------------------------------------------------------------------

void a1() {
  Clock clock;
  bool ok = true;
  double t3 = 0.0, t4 = 0.0;
  for (int n : {3, 4}) {
    for (const auto& a : kAlphas) {
      const auto r = verify_invariance(n, a);
      ok = report_ok(r, "N=" + std::to_string(n) + " alpha=" + rat(a)) && ok && r.max_violation == 0.0;
      (n == 3 ? t3 : t4) += r.runtime_seconds;
    }
  }
  note("runtime N=3 %.2f s (limit 5), N=4 %.2f s (limit 60)", t3, t4);
  ok = ok && t3 < 5.0 && t4 < 60.0;
  verdict("A1", ok, "invariance, zero violation on N=3 and N=4", clock.seconds());
}

void a2() {
  Clock clock;
  bool ok = true;
  for (const auto& a : kAlphas) {
    ok = report_ok(verify_face_identity(a), "alpha=" + rat(a)) && ok;
    for (const auto& row : face_identity_table(a)) {
      if (row.pattern == kDiagonalMain || row.pattern == kDiagonalAnti) {
        ok = ok && row.anticlockwise == 2 * a && row.clockwise == 2 * a;
      }
    }
  }
  note("diagonal patterns give 2 alpha on each side: %s", ok ? "yes" : "no");
  verdict("A2", ok && clock.seconds() < 1.0, "face identity over all 16 patterns", clock.seconds());
}

void a3() {
  Clock clock;
  bool ok = true;
  for (const auto& a : {Rational(0), Rational(1, 2), Rational(-3, 4), Rational(7, 10)}) {
    ok = report_ok(verify_current_structure(3, a), "structure N=3 alpha=" + rat(a)) && ok;
  }
  for (double a : {0.0, 0.5, -0.75, 0.7}) {
    const auto r = verify_current_harmonic_part(3, a);
    std::ostringstream label;
    label << "harmonic part N=3 alpha=" << a;
    ok = report_ok(r, label.str()) && ok && r.max_violation <= 1e-10;
  }
  verdict("A3", ok && clock.seconds() < 30.0, "current structure and zero harmonic part", clock.seconds());
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd gradient_matrix(const TorusLattice& lat) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(lat.num_edges(), lat.num_vertices());
  for (std::size_t id = 0; id < lat.num_edges(); ++id) {
    const auto e = lat.canonical_edge(id);
    m(id, lat.index(lat.head(e))) += 1.0;
    m(id, lat.index(e.tail)) -= 1.0;
  }
  return m;
}

Eigen::MatrixXd boundary_matrix(const TorusLattice& lat) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(lat.num_edges(), lat.num_faces());
  for (std::size_t id = 0; id < lat.num_edges(); ++id) {
    const auto [fp, fm] = lat.adjacent_faces(lat.canonical_edge(id));
    m(id, lat.index(fp.anchor)) += 1.0;
    m(id, lat.index(fm.anchor)) -= 1.0;
  }
  return m;
}

void a4() {
  Clock clock;
  bool ok = true;
  double recon = 0.0, ortho = 0.0;
  for (int n = 3; n <= 8; ++n) {
    const TorusLattice lat(n);
    std::mt19937_64 rng(1000 + n);
    std::normal_distribution<double> nd;
    DiscreteVectorField phi(n);
    for (std::size_t id = 0; id < phi.size(); ++id) phi[id] = nd(rng);
    const auto p = hodge_decompose(lat, phi);
    const double norm2 = inner(phi, phi);
    recon = std::max(recon, (phi - p.grad - p.circ - p.harm).max_abs() / phi.max_abs());
    ortho = std::max({ortho, std::abs(inner(p.grad, p.circ)) / norm2, std::abs(inner(p.grad, p.harm)) / norm2,
                      std::abs(inner(p.circ, p.harm)) / norm2});

    const auto grad = gradient_matrix(lat);
    const auto bnd = boundary_matrix(lat);
    Eigen::MatrixXd both(grad.rows(), grad.cols() + bnd.cols());
    both << grad, bnd;
    auto rank = [](const Eigen::MatrixXd& m) { return static_cast<long>(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank()); };
    const long nn = static_cast<long>(n) * n;
    const long rg = rank(grad), rb = rank(bnd), rh = static_cast<long>(lat.num_edges()) - rank(both);
    note("N=%d ranks grad=%ld circ=%ld harmonic=%ld (want %ld, %ld, 2)", n, rg, rb, rh, nn - 1, nn - 1);
    ok = ok && rg == nn - 1 && rb == nn - 1 && rh == 2;
  }
  note("max relative reconstruction error %.3g (limit 1e-10), orthogonality %.3g (limit 1e-9)", recon, ortho);
  ok = ok && recon <= 1e-10 && ortho <= 1e-9;
  verdict("A4", ok && clock.seconds() < 10.0, "Hodge decomposition", clock.seconds());
}

void a5() {
  Clock clock;
  bool ok = true;
  for (const auto& a : kAlphas) {
    ok = report_ok(verify_coefficients(a), "exact expectations alpha=" + rat(a)) && ok;
    ok = report_ok(verify_closed_forms(a), "closed form and Einstein gap alpha=" + rat(a)) && ok;
  }
  verdict("A5", ok && clock.seconds() < 1.0, "transport coefficients", clock.seconds());
}

void a6() {
  Clock clock;
  bool ok = true;
  for (double a : {0.0, 0.5})
    for (double rho : {0.3, 0.5}) {
      std::ostringstream label;
      label << "N=3 rho=" << rho << " alpha=" << a << " (3 densities)";
      const auto r = verify_dirichlet_identity(3, rho, a);
      ok = report_ok(r, label.str()) && ok && r.max_violation <= 1e-12;
    }
  verdict("A6", ok && clock.seconds() < 30.0, "Dirichlet form identity", clock.seconds());
}

// ---------------------------------------------------------------------------
// A7 and A8 share one ensemble per (N, alpha).

SimConfig hydro_config(int n, double alpha) {
  SimConfig cfg;
  cfg.n = n;
  cfg.alpha = alpha;
  cfg.horizon = 0.05;
  cfg.snapshot_times = {0.02, 0.05};
  cfg.ensemble_size = 100;
  cfg.seed = 1;
  cfg.profile = [](const Point& u) { return 0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * u[0]); };
  return cfg;
}

struct Run {
  SimConfig cfg;
  EnsemblePairings data;
};

Run run_hydro(int n, double alpha, const std::vector<ScalarTest>& scalars, const std::vector<VectorTest>& vectors) {
  Clock clock;
  Run r{hydro_config(n, alpha), {}};
  r.data = collect_pairings(r.cfg, scalars, vectors);
  note("ensemble N=%d alpha=%+.2f: %d trajectories, %llu events, %.1f s", n, alpha, r.cfg.ensemble_size,
       static_cast<unsigned long long>(r.data.events), clock.seconds());
  std::fflush(stdout);
  return r;
}

void print_row(const ComparisonRow& row, double floor) {
  note("%-20s t=%.2f observed=%+.5f predicted=%+.5f SE=%.5f |err|=%.5f tol=%.5f", row.id.c_str(), row.time,
       row.observed, row.predicted, row.se, row.error(), std::max(4 * row.se, floor));
}

void a7_a8() {
  Clock clock;
  const auto scalars = default_density_tests();
  const std::vector<VectorTest> vectors{{"sin-y", sine_field(2, 1)}, {"sin2-y", sine_field(2, 2)},
                                        {"cos-x", cosine_field(1, 1)}};
  const auto plus = run_hydro(64, 0.5, scalars, vectors);
  const auto minus = run_hydro(64, -0.5, scalars, vectors);
  const auto zero = run_hydro(64, 0.0, scalars, {});
  const auto coarse = run_hydro(16, 0.5, scalars, {});
  const double shared = clock.seconds();

  // A7: density limit.
  bool ok = true;
  note("density pairings at N=64, alpha=1/2");
  const auto fine_rows = compare_density(plus.data, plus.cfg, scalars);
  for (const auto& row : fine_rows) {
    print_row(row, 0.01);
    ok = ok && row.within(4.0, 0.01);
  }
  // Discrepancy per test function, summed over both times.
  const auto coarse_rows = compare_density(coarse.data, coarse.cfg, scalars);
  int better = 0;
  for (std::size_t s = 0; s < scalars.size(); ++s) {
    double e64 = 0.0, e16 = 0.0;
    for (std::size_t ti = 0; ti < plus.data.times.size(); ++ti) {
      e64 += fine_rows[ti * scalars.size() + s].error();
      e16 += coarse_rows[ti * scalars.size() + s].error();
    }
    note("%-20s discrepancy N=64 %.5f vs N=16 %.5f", scalars[s].id.c_str(), e64, e16);
    if (e64 < e16) ++better;
  }
  note("N=64 closer for %d of %zu test functions (need 4)", better, scalars.size());
  ok = ok && better >= 4;
  note("alpha=1/2 minus alpha=0 (expected 0)");
  for (std::size_t ti = 0; ti < plus.data.times.size(); ++ti)
    for (std::size_t s = 0; s < scalars.size(); ++s) {
      const auto row = difference_row(scalars[s].id, plus.data.times[ti], column(plus.data.density, ti, s),
                                      column(zero.data.density, ti, s), 0.0);
      print_row(row, 0.0);
      ok = ok && row.within(4.0, 0.0);
    }
  verdict("A7", ok, "hydrodynamic density limit", shared);

  // A8: current limit.
  Clock current_clock;
  ok = true;
  note("current pairings at N=64, alpha=1/2 against the weak form");
  for (const auto& row : compare_current(plus.data, plus.cfg, vectors)) {
    print_row(row, 0.01);
    ok = ok && row.within(4.0, 0.01);
  }
  note("alpha=1/2 minus alpha=-1/2 against twice the antisymmetric term");
  const auto rows_p = compare_current(plus.data, plus.cfg, vectors);
  const auto rows_m = compare_current(minus.data, minus.cfg, vectors);
  for (std::size_t ti = 0; ti < plus.data.times.size(); ++ti)
    for (std::size_t v = 0; v < vectors.size(); ++v) {
      const std::size_t k = ti * vectors.size() + v;
      const auto row = difference_row(vectors[v].id, plus.data.times[ti], column(plus.data.current, ti, v),
                                      column(minus.data.current, ti, v), rows_p[k].predicted - rows_m[k].predicted);
      print_row(row, 0.0);
      ok = ok && row.within(4.0, 0.0);
    }
  verdict("A8", ok, "typical current and antisymmetric term", current_clock.seconds());
}

void a9() {
  Clock clock;
  bool ok = true;
  for (int n : {16, 32}) {
    SimConfig cfg = hydro_config(n, 0.5);
    cfg.snapshot_times = {0.05};
    const auto m = martingale_study(cfg, sine_field(2, 1));
    note("N=%d mean=%+.3g SE=%.3g  mean square=%.3g  bound x1.5=%.3g  mean QV=%.3g", n, m.residual.mean,
         m.residual.se, m.mean_square, 1.5 * m.bound, m.mean_qv);
    ok = ok && std::abs(m.residual.mean) <= 4 * m.residual.se && m.mean_square <= 1.5 * m.bound;
  }
  verdict("A9", ok, "martingale diagnostics for G=(0, sin 2 pi u1)", clock.seconds());
}

void a10() {
  Clock clock;
  bool ok = true;
  SimConfig cfg;
  cfg.n = 32;
  cfg.alpha = 0.5;
  cfg.horizon = 0.2;
  cfg.snapshot_times = {0.2};
  cfg.ensemble_size = 100;
  cfg.seed = 1;
  cfg.field = FourierVectorField::constant(0.5, 0.0);
  cfg.profile = [](const Point&) { return 0.3; };
  const std::vector<VectorTest> g{{"(1,0)", FourierVectorField::constant(1.0, 0.0)}};
  const auto data = collect_pairings(cfg, {}, g);
  const auto row = compare_current(data, cfg, g).front();
  const double target = 2 * 0.3 * 0.7 * 0.5 * 0.2;
  print_row(row, 0.1 * target);
  note("linear response 2 rho (1-rho) E1 t = %.5f, weak-form prediction %.5f", target, row.predicted);
  ok = std::abs(row.predicted - target) <= 1e-12 && row.within(4.0, 0.1 * target);

  const double v0 = 0.1;
  const int m = 32;
  const auto potential = [v0](const Point& u) { return v0 * fourier_basis(1, 0, u).value; };
  const auto stationary = logit_stationary_profile(potential, 0.3, m);
  const auto res = solve_drift_diffusion(sample_profile([](const Point&) { return 0.3; }, m),
                                         fourier_gradient(1, 0, v0), 1.0);
  double dev = 0.0;
  for (std::size_t k = 0; k < res.rho.values.size(); ++k)
    dev = std::max(dev, std::abs(res.rho.values[k] - stationary.values[k]));
  note("drift-diffusion at t=1 vs logit stationary profile: max deviation %.3g (limit 1e-6), %d steps", dev,
       res.steps);
  ok = ok && dev <= 1e-6;
  verdict("A10", ok, "weak field linear response and stationary profile", clock.seconds());
}

void a11() {
  Clock clock;
  bool ok = true;
  auto expect_fail = [&](const CheckReport& r, const std::string& check) {
    note("%-18s under %-20s violation=%.3g  %s", check.c_str(), std::string(to_string(documented_mutation(check))).c_str(),
         r.max_violation, r.pass ? "NOT DETECTED" : "detected");
    ok = ok && !r.pass;
  };
  const Rational half(1, 2), cs(7, 10);
  expect_fail(verify_invariance(3, half, documented_mutation("invariance")), "invariance");
  expect_fail(verify_face_identity(half, documented_mutation("face-identity")), "face-identity");
  expect_fail(verify_current_structure(3, cs, documented_mutation("current-structure")), "current-structure");
  expect_fail(verify_current_harmonic_part(3, 0.7, documented_mutation("current-harmonic")), "current-harmonic");
  expect_fail(verify_coefficients(half, documented_mutation("coefficients")), "coefficients");
  expect_fail(verify_closed_forms(half, documented_mutation("closed-forms")), "closed-forms");
  expect_fail(verify_dirichlet_identity(3, 0.3, 0.5, documented_mutation("dirichlet")), "dirichlet");

  const auto scratch = std::filesystem::temp_directory_path() / "rotex-acceptance-a11";
  for (auto mut : {RateMutation::DoubleMainDiagonal, RateMutation::AdjacentPairFires}) {
    ExperimentSpec spec;
    spec.mutate = std::string(to_string(mut));
    spec.out = scratch.string();
    std::ostringstream log, err;
    const int code = run_experiment(spec, log, err);
    note("verify --mutate %s exits with %d", spec.mutate.c_str(), code);
    ok = ok && code == 1;
  }
  std::filesystem::remove_all(scratch);
  verdict("A11", ok, "negative controls", clock.seconds());
}

}  // namespace

int main() {
  a1();
  a2();
  a3();
  a4();
  a5();
  a6();
  a7_a8();
  a9();
  a10();
  a11();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
