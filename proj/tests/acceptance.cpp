// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [path-to-verify]   (criterion 8 runs the CLI in-process without it)

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "popov/arith.hpp"
#include "popov/cli.hpp"
#include "popov/identities.hpp"
#include "popov/mellin.hpp"
#include "popov/series.hpp"
#include "popov/specfun.hpp"
#include "random_specs.hpp"

using namespace popov;
using identities::Params;
using identities::verify;

namespace {

struct Outcome {
  bool ok = true;
  std::string summary;
  std::vector<std::string> notes;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("failed: " + what);
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Params at(int k, double x, double y) {
  Params p;
  p.k = k;
  p.x = x;
  p.y = y;
  return p;
}

std::int64_t brute_r(int k, int n) {
  const int box = static_cast<int>(std::sqrt(double(n))) + 1;
  std::vector<int> a(k, -box);
  std::int64_t count = 0;
  while (true) {
    int s = 0;
    for (int v : a) s += v * v;
    if (s == n) ++count;
    int i = 0;
    while (i < k && a[i] == box) a[i++] = -box;
    if (i == k) break;
    ++a[i];
  }
  return count;
}

Outcome arithmetic() {
  Outcome o;
  int mismatches = 0;
  for (int k = 1; k <= 4; ++k)
    for (int n = 0; n <= 200; ++n)
      if (arith::r_k(k, n) != brute_r(k, n)) ++mismatches;
  o.require(mismatches == 0, std::to_string(mismatches) + " r_k mismatches");

  std::vector<std::int64_t> p(51, 0);
  p[0] = 1;
  for (int m = 1; m <= 50; ++m)
    for (int rep = 0; rep < 24; ++rep)
      for (int i = 50; i >= m; --i) p[i] -= p[i - m];
  int tau_bad = 0;
  for (int n = 1; n <= 50; ++n)
    if (arith::tau(n) != p[n - 1]) ++tau_bad;
  o.require(tau_bad == 0, std::to_string(tau_bad) + " tau mismatches");
  o.require(arith::tau(2) == -24 && arith::tau(3) == 252, "tau(2), tau(3)");
  o.require(arith::sigma_exact(3, 6) == 252, "sigma_3(6)");
  o.require(arith::bernoulli(4) == arith::Rational(-1, 30), "B_4");
  o.summary = "r_k lattice counts (k<=4, n<=200), tau q-expansion (n<=50), sigma_3(6), B_4";
  return o;
}

Outcome special_functions() {
  Outcome o;
  double worst = 0;
  for (double t : {0.5, 1.0, 3.0, 10.0}) {
    double j = std::sqrt(2 / (pi * t)) * std::cos(t);
    double i = std::sqrt(2 / (pi * t)) * std::cosh(t);
    double k = std::sqrt(pi / (2 * t)) * std::exp(-t);
    worst = std::max(worst, std::abs(specfun::bessel_j(-0.5, t).value - j));
    worst = std::max(worst, std::abs(specfun::bessel_i(-0.5, t).value - i) / std::max(1.0, i));
    worst = std::max(worst, std::abs(specfun::bessel_k(0.5, t).value - k));
  }
  o.require(worst <= 1e-11, "half-order closed forms, worst " + fmt("%.3g", worst));

  double residue = 0;
  for (double z : {-0.9, -0.5, -0.25, 0.3})
    for (cplx a : {cplx(0.5), cplx(1.25, 0.5), cplx(-0.7, 0.1)}) {
      cplx b(0.75, -0.2);
      residue = std::max(residue, std::abs(specfun::hyp2f1(a, b, b, z).value - std::pow(1 - z, -a)));
    }
  o.require(residue <= 1e-12, "2F1(a,b;b;z) = (1-z)^-a, worst " + fmt("%.3g", residue));

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> re(-2.5, 2.5), im(-1.5, 1.5), cz(0.3, 3.5), zz(-0.9, 0.0);
  int disagree = 0;
  for (int n = 0; n < 100; ++n) {
    cplx a(re(rng), im(rng)), b(re(rng), im(rng)), c(cz(rng), im(rng));
    double z = zz(rng);
    auto d = specfun::hyp2f1(a, b, c, z, specfun::Hyp2f1Route::Direct);
    auto p = specfun::hyp2f1(a, b, c, z, specfun::Hyp2f1Route::Pfaff);
    auto e = specfun::hyp2f1(a, b, c, z, specfun::Hyp2f1Route::Euler);
    const double slack = 1e-13 * std::max(1.0, std::abs(d.value));
    if (std::abs(d.value - p.value) > d.abs_error_bound + p.abs_error_bound + slack ||
        std::abs(d.value - e.value) > d.abs_error_bound + e.abs_error_bound + slack)
      ++disagree;
  }
  o.require(disagree == 0, std::to_string(disagree) + " of 100 route disagreements");
  o.summary = "half-order Bessel " + fmt("%.1e", worst) + ", 2F1 residue pattern " + fmt("%.1e", residue) +
              ", 100 Pfaff/Euler/direct cases";
  return o;
}

Outcome transformation_grid() {
  Outcome o;
  int cases = 0, passed = 0;
  for (int k = 1; k <= 5; ++k)
    for (double x : {0.7, 1.0, 1.5, 2.0})
      for (double y : {0.1, x / 3, 0.9 * x})
        for (const char* id : {"analogue_j", "analogue_i"}) {
          ++cases;
          try {
            if (verify(id, at(k, x, y), 1e-9).pass) ++passed;
            else o.notes.push_back(std::string("fail ") + id + " k=" + std::to_string(k));
          } catch (const Error& e) {
            o.notes.push_back(e.what());
          }
        }
  o.require(cases == 120 && passed == cases, std::to_string(passed) + "/" + std::to_string(cases) + " grid cases");

  double worst = 0;
  const double c3 = std::cos(0.3), s3 = std::sin(0.3), ch = std::cosh(0.5), sh = std::sinh(0.5);
  for (int k = 1; k <= 5; ++k) {
    worst = std::max(worst, verify("analogue_j", at(k, 0.8, 0.6), 1e-12).abs_residual);
    worst = std::max(worst, verify("analogue_j", at(k, c3, s3), 1e-12).abs_residual);
    worst = std::max(worst, verify("analogue_i", at(k, 1.25, 0.75), 1e-12).abs_residual);
    worst = std::max(worst, verify("analogue_i", at(k, ch, sh), 1e-12).abs_residual);
  }
  o.require(worst <= 1e-13, "self-dual residual " + fmt("%.3g", worst));
  o.summary = std::to_string(passed) + "/120 pass at tol 1e-9, self-dual residual " + fmt("%.1e", worst);
  return o;
}

Outcome ladder() {
  Outcome o;
  double limit_gap = 0, limit_value = 0;
  const double y = 1e-6;
  for (int k = 1; k <= 5; ++k)
    for (double x : {0.7, 1.0, 1.5, 2.0}) {
      auto a = verify("analogue_j", at(k, x, y), 1e-12);
      auto t = verify("theta_k", at(k, x, 0), 1e-12);
      limit_gap = std::max(limit_gap, std::abs(a.abs_residual - t.abs_residual));
      // the normalized left side itself tends to theta_k
      const double c = identities::detail::leading_constant(k / 4.0 - 0.5, y);
      limit_value = std::max(limit_value, std::abs(a.lhs.value / c - t.lhs.value));
    }
  o.require(limit_gap <= 1e-4, "analogue residual vs theta_k residual " + fmt("%.3g", limit_gap));
  o.require(limit_value <= 1e-4, "analogue left side vs theta_k " + fmt("%.3g", limit_value));

  double phi3_gap = 0;
  for (int k = 1; k <= 6; ++k)
    for (double x : {0.8, 1.4}) {
      Params p;
      p.k = k;
      p.x = x;
      p.z = 0.6;
      p.nu = k / 2.0 - 1;
      auto a = verify("phi3", p, 1e-11);
      auto b = verify("popov", p, 1e-11);
      phi3_gap = std::max({phi3_gap, std::abs(a.lhs.value - b.lhs.value), std::abs(a.rhs.value - b.rhs.value)});
    }
  o.require(phi3_gap <= 1e-9, "phi3 vs popov " + fmt("%.3g", phi3_gap));

  double popov_gap = 0;
  for (int k : {1, 2, 3, 4, 8})
    for (double x : {0.7, 1.0, 2.5}) {
      Params p;
      p.k = k;
      p.x = x;
      p.z = 0;
      auto a = verify("popov", p, 1e-13);
      auto b = verify("theta_k", p, 1e-13);
      const double norm = std::pow(x, -k / 4.0);
      popov_gap = std::max({popov_gap, std::abs(a.lhs.value * norm - b.lhs.value),
                            std::abs(a.rhs.value * norm - b.rhs.value)});
    }
  o.require(popov_gap <= 1e-12, "popov(z=0) vs theta_k " + fmt("%.3g", popov_gap));
  o.summary = "y->0 " + fmt("%.1e", std::max(limit_gap, limit_value)) + ", phi3/popov " + fmt("%.1e", phi3_gap) +
              ", popov/theta " + fmt("%.1e", popov_gap);
  return o;
}

Outcome catalog_breadth() {
  Outcome o;
  struct Case {
    const char* id;
    Params p;
    double tol;
  };
  std::vector<Case> cases;
  cases.push_back({"k4_exp", at(4, 1.25, 0.75), 1e-12});
  cases.push_back({"divisor_j", at(3, 1.5, 0.5), 1e-10});
  cases.push_back({"cusp_tau_j", at(12, 1.2, 0.3), 1e-12});
  Params even = at(1, 1.0, 0.4);
  even.chi = arith::DirichletCharacter::legendre(5);
  cases.push_back({"char_even", even, 1e-12});
  Params odd = at(1, 1.1, 0.2);
  odd.chi = arith::DirichletCharacter::mod4();
  cases.push_back({"char_odd", odd, 1e-12});
  Params riesz = at(1, 2.3, 0);
  riesz.q = 1;
  cases.push_back({"riesz_cn", riesz, 1e-4});
  Params integral = at(1, 1.5, 0);
  integral.z = 0.5;
  cases.push_back({"popov_integral_k1", integral, 1e-6});
  Params guinand = at(1, 1.0, 0.3);
  guinand.nu = 1.2;
  cases.push_back({"guinand_j", guinand, 1e-9});
  Params chain = at(1, 1.2, 0);
  chain.nu = 1.5;
  cases.push_back({"guinand_k1", chain, 1e-9});
  Params entry = chain;
  entry.alpha = 2;
  cases.push_back({"guinand_k1", entry, 1e-9});
  Params psi = at(1, 1.3, 0.2);
  psi.nu = 1.1;
  cases.push_back({"psi_involution", psi, 1e-9});

  int passed = 0;
  for (const auto& c : cases) {
    try {
      auto r = verify(c.id, c.p, c.tol);
      if (r.pass && !r.experimental) ++passed;
      else o.notes.push_back(std::string("fail ") + c.id + " residual " + fmt("%.3g", r.abs_residual));
    } catch (const Error& e) {
      o.notes.push_back(std::string(c.id) + ": " + e.what());
    }
  }
  o.require(passed == static_cast<int>(cases.size()), "catalog cases");
  o.summary = std::to_string(passed) + "/" + std::to_string(cases.size()) + " catalog cases pass";
  return o;
}

Outcome mellin_suite() {
  Outcome o;
  auto residual_ok = [&](const identities::EvaluationReport& r, const std::string& what) {
    o.require(r.pass && r.abs_residual <= 1e-6, what + " residual " + fmt("%.3g", r.abs_residual));
  };
  residual_ok(mellin::mellin_forward_check(2, 2, 1, 2, 1e-10), "forward s=2");
  residual_ok(mellin::mellin_forward_check(cplx(0.8, 0.5), 3, 1, 1, 1e-9), "forward complex s");
  auto inv = mellin::mellin_inverse_check(1, 1.5 * pi, 0.5 * pi, 2, 1.0, 0, 1e-6);
  residual_ok(inv.report, "inverse");
  residual_ok(mellin::mellin_jk_check(2, 2, 1, 0.5, 0.5, 1e-10), "jk half orders");
  residual_ok(mellin::mellin_jk_check(1.5, 3, 1, 0, 0.3, 1e-9), "jk");
  residual_ok(mellin::mellin_jk_inverse_check(0.7, 3, 1, 0, 0.3, 1.5, 1e-6).report, "jk inverse");
  for (double n : {0.5, 1.0, 2.0})
    residual_ok(mellin::mellin_inverse_check(n, 2.0, 1.0, 1, 0.9, 0, 1e-7).report, "round trip n=" + fmt("%g", n));

  auto scaling = mellin::asymptotic_check_2f1(1, 0, 1.0, 0.3, {50, 100, 200});
  o.require(scaling.pass, "2F1 scaling band " + fmt("%.3g", scaling.band));
  // the window holds, but the ratio itself is drifting away from 1 (see README)
  o.notes.push_back("diagnostic: |ratio - 1| at t = 50, 100, 200: " + fmt("%.3f", scaling.deviations[0] / 50) + ", " +
                    fmt("%.3f", scaling.deviations[1] / 100) + ", " + fmt("%.3f", scaling.deviations[2] / 200));
  auto second = mellin::asymptotic_check_2f1(0.5, 0.75, 1.0, 0.5, {50, 100, 200});
  o.notes.push_back("diagnostic: second 2F1 configuration band " + fmt("%.3g", second.band) +
                    (second.pass ? " (inside window)" : " (outside window, not asserted)"));

  std::optional<double> tau0;
  try {
    tau0 = mellin::asymptotic_check_gamma2f1(1.5, 0, 0.5, 0.4, 30).tau0;
  } catch (const Error& e) {
    o.notes.push_back(e.what());
  }
  o.require(tau0 && *tau0 <= 30, "tau0 scan");
  o.summary = "forward/inverse/jk within 1e-6, 3-point round trip, band " + fmt("%.2f", scaling.band) + ", tau0 " +
              (tau0 ? fmt("%g", *tau0) : std::string("none"));
  return o;
}

Outcome soundness() {
  Outcome o;
  std::mt19937_64 rng(8086);
  int violations = 0;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    auto s = fixtures::random_spec(rng);
    double tol = std::pow(10.0, -6 - 6 * std::uniform_real_distribution<double>(0, 1)(rng));
    try {
      auto v = series::eval_series(s, tol);
      auto ref = series::eval_series_at(s, 4 * v.terms_used);
      double diff = std::abs(ref.value - v.value);
      if (v.tail_bound > 0) worst = std::max(worst, diff / v.tail_bound);
      if (diff > v.tail_bound) ++violations;
    } catch (const Error& e) {
      ++violations;
      o.notes.push_back(std::string("spec ") + std::to_string(i) + ": " + e.what());
    }
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.summary = "50 random specs, " + std::to_string(violations) + " violations, worst diff/bound " + fmt("%.3f", worst);
  return o;
}

std::string hash_from(const std::string& stderr_text) {
  auto at = stderr_text.find("hash=");
  return at == std::string::npos ? "" : stderr_text.substr(at + 5, 16);
}

Outcome determinism(const std::string& exe) {
  Outcome o;
  const std::vector<std::string> grid = {"scan", "theta_involution", "--k", "1..4", "--x", "1..2:6", "--y", "0.2..0.9:8"};
  std::vector<std::string> hashes;
  for (const char* jobs : {"1", "2", "4", "4", "8"}) {
    std::string err_text;
    int code = -1;
    if (!exe.empty()) {
      std::string cmd = "\"" + exe + "\"";
      for (const auto& a : grid) cmd += " " + a;
      cmd += std::string(" --jobs ") + jobs + " 2>&1 >/dev/null";
      if (FILE* f = popen(cmd.c_str(), "r")) {
        char buf[512];
        while (std::fgets(buf, sizeof buf, f)) err_text += buf;
        int status = pclose(f);
        code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      }
    } else {
      std::vector<std::string> args = {"verify"};
      args.insert(args.end(), grid.begin(), grid.end());
      args.insert(args.end(), {"--jobs", jobs});
      std::vector<const char*> argv;
      for (auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
      err_text = err.str();
    }
    o.require(code == 0, std::string("scan exit code at jobs ") + jobs);
    hashes.push_back(hash_from(err_text));
  }
  bool same = !hashes.front().empty();
  for (const auto& h : hashes) same = same && h == hashes.front();
  o.require(same, "hashes differ across --jobs");
  o.summary = "192-point scan at jobs 1,2,4,4,8 -> hash " + hashes.front() + (exe.empty() ? " (in-process)" : "");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string exe = argc > 1 ? argv[1] : "";
  struct Criterion {
    int number;
    double seconds_limit;  // 0: no runtime clause
    std::function<Outcome()> body;
  };
  std::vector<Criterion> criteria = {
      {1, 10, arithmetic},
      {2, 30, special_functions},
      {3, 60, transformation_grid},
      {4, 0, ladder},
      {5, 300, catalog_breadth},
      {6, 0, mellin_suite},
      {7, 0, soundness},
      {8, 0, [&] { return determinism(exe); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.ok = false;
      o.notes.push_back(std::string("unexpected error: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.seconds_limit > 0 && secs >= c.seconds_limit) {
      o.ok = false;
      o.notes.push_back("runtime " + fmt("%.1f", secs) + " s over the " + fmt("%g", c.seconds_limit) + " s limit");
    }
    if (!o.ok) ++failures;
    std::printf("criterion %d: %s  %s [%.2f s]\n", c.number, o.ok ? "PASS" : "FAIL", o.summary.c_str(), secs);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
