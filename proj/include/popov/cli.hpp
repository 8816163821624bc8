#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "identities.hpp"
#include "mellin.hpp"
#include "series.hpp"

namespace popov::cli {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Number formatting and parsing

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_complex(cplx v) {
  if (v.imag() == 0) return fmt_double(v.real());
  return fmt_double(v.real()) + (std::signbit(v.imag()) ? "-" : "+") + fmt_double(std::abs(v.imag())) + "i";
}

inline double parse_double(const std::string& text, const std::string& what) {
  const char* b = text.c_str();
  char* end = nullptr;
  double v = std::strtod(b, &end);
  if (text.empty() || end != b + text.size() || !std::isfinite(v))
    fail(ErrorKind::InvalidSpec, "cannot parse " + what + " value '" + text + "'");
  return v;
}

// "1.5", "2i", "-i", "0.8+0.5i", "1e-3-2e-1i"
inline cplx parse_complex(std::string text, const std::string& what) {
  text.erase(std::remove(text.begin(), text.end(), ' '), text.end());
  if (text.empty()) fail(ErrorKind::InvalidSpec, "empty " + what + " value");
  if (text.back() != 'i') return parse_double(text, what);
  std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag_of = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double(s, what);
  };
  if (split == std::string::npos) return {0.0, imag_of(body)};
  return {parse_double(body.substr(0, split), what), imag_of(body.substr(split))};
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------------------
// Parameters and grids

enum class ParamKind { Int, Real, Complex, Text };

inline ParamKind kind_of(const std::string& name) {
  if (name == "k") return ParamKind::Int;
  if (name == "z" || name == "nu" || name == "s") return ParamKind::Complex;
  if (name == "chi" || name == "heights") return ParamKind::Text;
  return ParamKind::Real;
}

struct ParamValue {
  std::string text;  // canonical form
  cplx num{};
};

inline ParamValue make_value(const std::string& name, const std::string& raw) {
  switch (kind_of(name)) {
    case ParamKind::Int: {
      double v = parse_double(raw, name);
      if (v != std::floor(v) || std::abs(v) > 1e6) fail(ErrorKind::InvalidSpec, name + " must be an integer");
      return {std::to_string(static_cast<long long>(v)), v};
    }
    case ParamKind::Real: {
      double v = parse_double(raw, name);
      return {fmt_double(v), v};
    }
    case ParamKind::Complex: {
      cplx v = parse_complex(raw, name);
      return {fmt_complex(v), v};
    }
    case ParamKind::Text:
      break;
  }
  return {raw, 0.0};
}

// "v", "a,b,c", "a..b" (integer steps) or "a..b:n" (n evenly spaced points)
inline std::vector<ParamValue> expand(const std::string& name, const std::string& spec) {
  const ParamKind kind = kind_of(name);
  if (kind == ParamKind::Text) {
    if (name == "heights") return {{spec, 0.0}};
    std::vector<ParamValue> out;
    for (auto& s : split(spec, ',')) out.push_back({s, 0.0});
    return out;
  }
  auto dots = spec.find("..");
  if (dots == std::string::npos) {
    std::vector<ParamValue> out;
    for (auto& s : split(spec, ',')) out.push_back(make_value(name, s));
    if (out.empty()) fail(ErrorKind::InvalidSpec, "empty grid for " + name);
    return out;
  }
  if (kind == ParamKind::Complex) fail(ErrorKind::InvalidSpec, "ranges are not supported for complex " + name);
  std::string rest = spec.substr(dots + 2);
  auto colon = rest.find(':');
  double a = parse_double(spec.substr(0, dots), name);
  double b = parse_double(rest.substr(0, colon), name);
  std::vector<ParamValue> out;
  if (colon == std::string::npos) {
    if (a != std::floor(a) || b != std::floor(b) || b < a)
      fail(ErrorKind::InvalidSpec, "range '" + spec + "' needs integer ends a <= b or a point count");
    for (double v = a; v <= b; v += 1) out.push_back(make_value(name, fmt_double(v)));
    return out;
  }
  double n = parse_double(rest.substr(colon + 1), name);
  if (n < 1 || n != std::floor(n) || n > 1e6) fail(ErrorKind::InvalidSpec, "bad point count in '" + spec + "'");
  const int count = static_cast<int>(n);
  for (int i = 0; i < count; ++i) {
    double v = count == 1 ? a : a + (b - a) * i / (count - 1);
    if (i == count - 1 && count > 1) v = b;
    out.push_back(make_value(name, fmt_double(v)));
  }
  if (kind == ParamKind::Int)
    for (auto& v : out)
      if (v.num.real() != std::floor(v.num.real())) fail(ErrorKind::InvalidSpec, name + " grid must be integral");
  return out;
}

using Point = std::vector<std::pair<std::string, ParamValue>>;

inline std::vector<Point> cartesian(const std::vector<std::pair<std::string, std::vector<ParamValue>>>& axes) {
  std::vector<Point> out{Point{}};
  for (const auto& [name, values] : axes) {
    std::vector<Point> next;
    next.reserve(out.size() * values.size());
    for (const auto& p : out)
      for (const auto& v : values) {
        Point q = p;
        q.emplace_back(name, v);
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report records

struct ReportRecord {
  std::string id;
  std::vector<std::pair<std::string, std::string>> params;
  cplx lhs{}, rhs{};
  double abs_residual = 0, rel_residual = 0;
  double lhs_tail = 0, rhs_tail = 0;
  std::uint64_t terms_used = 0;
  bool pass = false;
  bool experimental = false;
  std::string error;  // "Kind: message" when the evaluation threw
  double wall_time = 0;

  bool operator==(const ReportRecord&) const = default;
};

inline Json to_json(const ReportRecord& r, bool with_time = true) {
  Json j;
  j["id"] = r.id;
  for (const auto& [k, v] : r.params) j[k] = v;
  j["lhs_re"] = fmt_double(r.lhs.real());
  j["lhs_im"] = fmt_double(r.lhs.imag());
  j["rhs_re"] = fmt_double(r.rhs.real());
  j["rhs_im"] = fmt_double(r.rhs.imag());
  j["abs_residual"] = fmt_double(r.abs_residual);
  j["rel_residual"] = fmt_double(r.rel_residual);
  j["lhs_tail"] = fmt_double(r.lhs_tail);
  j["rhs_tail"] = fmt_double(r.rhs_tail);
  j["terms_used"] = std::to_string(r.terms_used);
  j["pass"] = r.pass;
  j["experimental"] = r.experimental;
  j["error"] = r.error;
  if (with_time) j["wall_time"] = fmt_double(r.wall_time);
  return j;
}

inline ReportRecord from_json(const Json& j) {
  static const std::vector<std::string> fixed = {"lhs_re",   "lhs_im",   "rhs_re",     "rhs_im", "abs_residual",
                                                 "rel_residual", "lhs_tail", "rhs_tail", "terms_used", "pass",
                                                 "experimental", "error", "wall_time", "id"};
  ReportRecord r;
  auto num = [&](const char* key) { return parse_double(j.at(key).get<std::string>(), key); };
  r.id = j.at("id").get<std::string>();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(fixed.begin(), fixed.end(), it.key()) == fixed.end())
      r.params.emplace_back(it.key(), it.value().get<std::string>());
  r.lhs = {num("lhs_re"), num("lhs_im")};
  r.rhs = {num("rhs_re"), num("rhs_im")};
  r.abs_residual = num("abs_residual");
  r.rel_residual = num("rel_residual");
  r.lhs_tail = num("lhs_tail");
  r.rhs_tail = num("rhs_tail");
  r.terms_used = std::stoull(j.at("terms_used").get<std::string>());
  r.pass = j.at("pass").get<bool>();
  r.experimental = j.at("experimental").get<bool>();
  r.error = j.at("error").get<std::string>();
  if (j.contains("wall_time")) r.wall_time = num("wall_time");
  return r;
}

inline ReportRecord record_from(const identities::EvaluationReport& rep) {
  ReportRecord r;
  r.id = rep.id;
  r.lhs = rep.lhs.value;
  r.rhs = rep.rhs.value;
  r.abs_residual = rep.abs_residual;
  r.rel_residual = rep.rel_residual;
  r.lhs_tail = rep.lhs.tail_bound;
  r.rhs_tail = rep.rhs.tail_bound;
  r.terms_used = rep.lhs.terms_used + rep.rhs.terms_used;
  r.pass = rep.pass;
  r.experimental = rep.experimental;
  return r;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const std::vector<ReportRecord>& records) {
  std::ostringstream os;
  std::vector<std::string> header = {"id"};
  if (!records.empty())
    for (const auto& p : records.front().params) header.push_back(p.first);
  for (const char* h : {"lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_residual", "rel_residual", "lhs_tail", "rhs_tail",
                        "terms_used", "pass", "experimental", "error", "wall_time"})
    header.push_back(h);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
  os << "\r\n";
  for (const auto& r : records) {
    Json j = to_json(r);
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string v;
      if (j.contains(header[i])) {
        const auto& e = j[header[i]];
        v = e.is_string() ? e.get<std::string>() : e.dump();
      }
      os << (i ? "," : "") << csv_field(v);
    }
    os << "\r\n";
  }
  return os.str();
}

inline std::string to_pretty(const std::vector<ReportRecord>& records) {
  std::ostringstream os;
  for (const auto& r : records) {
    std::string status = !r.error.empty() ? "ERROR" : r.experimental ? "PROBE" : r.pass ? "PASS " : "FAIL ";
    os << status << " " << r.id;
    for (const auto& [k, v] : r.params) os << " " << k << "=" << v;
    if (!r.error.empty()) {
      os << "  " << r.error << "\n";
      continue;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "  lhs=%.15g%+.3gi  |lhs-rhs|=%.3g  tails=%.3g+%.3g  terms=%llu", r.lhs.real(),
                  r.lhs.imag(), r.abs_residual, r.lhs_tail, r.rhs_tail, static_cast<unsigned long long>(r.terms_used));
    os << buf << "\n";
  }
  return os.str();
}

// FNV-1a over the records' JSON without wall_time
inline std::uint64_t determinism_hash(const std::vector<ReportRecord>& records) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& r : records) {
    std::string s = to_json(r, false).dump() + "\n";
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

inline std::string hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// 2: bad input or outside the covered domain; 3: numerical limits reached
inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidSpec:
    case ErrorKind::DomainNotCovered:
    case ErrorKind::DomainError:
    case ErrorKind::PoleAt:
    case ErrorKind::InvalidCharacter:
      return 2;
    default:
      return 3;
  }
}

inline int exit_code_for_error_text(const std::string& e) {
  for (ErrorKind k : {ErrorKind::DomainError, ErrorKind::PoleAt, ErrorKind::RangeExceeded, ErrorKind::NoConvergence,
                      ErrorKind::HorizonOverflow, ErrorKind::InvalidCharacter, ErrorKind::InvalidSpec,
                      ErrorKind::DomainNotCovered, ErrorKind::TolUnreachable, ErrorKind::FailedToFindTau0}) {
    std::string prefix = std::string(to_string(k)) + ":";
    if (e.rfind(prefix, 0) == 0) return exit_code_for(k);
  }
  return 3;
}

// first error in grid order decides; otherwise 1 if any asserted case failed
inline int exit_code(const std::vector<ReportRecord>& records) {
  for (const auto& r : records)
    if (!r.error.empty()) return exit_code_for_error_text(r.error);
  for (const auto& r : records)
    if (!r.experimental && !r.pass) return 1;
  return 0;
}

// ---------------------------------------------------------------------------
// Checks

struct CheckInfo {
  std::string id;
  std::vector<std::string> params;
  std::string constraints;
  std::map<std::string, std::string> defaults;
};

inline const std::vector<CheckInfo>& mellin_checks() {
  static const std::vector<CheckInfo> checks = {
      {"forward", {"s", "alpha", "beta", "k"}, "alpha>beta>0, Re s>1/2-k/4",
       {{"s", "2"}, {"alpha", "2"}, {"beta", "1"}, {"k", "2"}}},
      {"inverse", {"n", "alpha", "beta", "k", "sigma", "T"}, "alpha>beta>0, sigma>1/4, T=0 picks T from the tail bound",
       {{"n", "1"}, {"alpha", "4.71238898038469"}, {"beta", "1.5707963267948966"}, {"k", "2"}, {"sigma", "1"}, {"T", "0"}}},
      {"jk", {"s", "alpha", "beta", "mu", "nu"}, "alpha>beta>0, Re(s+mu)>|Re nu|",
       {{"s", "1.5"}, {"alpha", "3"}, {"beta", "1"}, {"mu", "0"}, {"nu", "0.3"}}},
      {"jk-inverse", {"x", "alpha", "beta", "mu", "nu", "sigma"}, "alpha>beta>0, sigma+mu>|Re nu|",
       {{"x", "0.7"}, {"alpha", "3"}, {"beta", "1"}, {"mu", "0"}, {"nu", "0.3"}, {"sigma", "1.5"}}},
      {"asym2f1", {"sigma", "nu", "alpha", "beta", "heights"}, "alpha>beta>0, nu>-1, sigma>-nu",
       {{"sigma", "1"}, {"nu", "0"}, {"alpha", "1"}, {"beta", "0.3"}, {"heights", "50,100,200"}}},
      {"asym-gamma2f1", {"sigma", "mu", "nu", "ratio", "tau0-max"}, "mu>-1, sigma+mu>|Re nu|, 0<=ratio<1",
       {{"sigma", "1.5"}, {"mu", "0"}, {"nu", "0.5"}, {"ratio", "0.4"}, {"tau0-max", "30"}}},
  };
  return checks;
}

inline const CheckInfo* find_mellin(const std::string& id) {
  for (const auto& c : mellin_checks())
    if (c.id == id) return &c;
  return nullptr;
}

inline std::map<std::string, std::string> identity_defaults() {
  return {{"k", "2"}, {"x", "1"}, {"y", "0.5"}, {"z", "0"}, {"nu", "0"}, {"q", "1"}, {"alpha", "0"}};
}

inline identities::Params to_params(const Point& pt) {
  identities::Params p;
  for (const auto& [name, v] : pt) {
    if (name == "k") p.k = static_cast<int>(v.num.real());
    else if (name == "x") p.x = v.num.real();
    else if (name == "y") p.y = v.num.real();
    else if (name == "z") p.z = v.num;
    else if (name == "nu") p.nu = v.num;
    else if (name == "q") p.q = v.num.real();
    else if (name == "alpha") p.alpha = v.num.real();
    else if (name == "chi") p.chi = arith::DirichletCharacter::parse(v.text);
  }
  return p;
}

inline std::map<std::string, ParamValue> as_map(const Point& pt) {
  std::map<std::string, ParamValue> m;
  for (const auto& [k, v] : pt) m[k] = v;
  return m;
}

template <class F>
ReportRecord timed(const std::string& id, const Point& pt, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  ReportRecord r;
  try {
    r = body();
  } catch (const Error& e) {
    r = ReportRecord{};
    r.error = e.what();
  } catch (const std::exception& e) {
    r = ReportRecord{};
    r.error = std::string("Internal: ") + e.what();
  }
  r.id = id;
  r.params.clear();
  for (const auto& [k, v] : pt) r.params.emplace_back(k, v.text);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline ReportRecord evaluate_identity(const std::string& id, const Point& pt, double tol, bool experimental) {
  return timed(id, pt, [&] { return record_from(identities::verify(id, to_params(pt), tol, experimental)); });
}

inline ReportRecord evaluate_mellin(const std::string& id, const Point& pt, double tol) {
  return timed("mellin_" + id, pt, [&] {
    auto m = as_map(pt);
    auto re = [&](const char* k) { return m.at(k).num.real(); };
    if (id == "forward") return record_from(mellin::mellin_forward_check(m.at("s").num, re("alpha"), re("beta"),
                                                                         static_cast<int>(re("k")), tol));
    if (id == "inverse")
      return record_from(mellin::mellin_inverse_check(re("n"), re("alpha"), re("beta"), static_cast<int>(re("k")),
                                                      re("sigma"), re("T"), tol)
                             .report);
    if (id == "jk")
      return record_from(mellin::mellin_jk_check(m.at("s").num, re("alpha"), re("beta"), re("mu"), m.at("nu").num, tol));
    if (id == "jk-inverse")
      return record_from(
          mellin::mellin_jk_inverse_check(re("x"), re("alpha"), re("beta"), re("mu"), m.at("nu").num, re("sigma"), tol)
              .report);
    fail(ErrorKind::InvalidSpec, "unknown mellin check '" + id + "'");
  });
}

template <class Eval>
std::vector<ReportRecord> evaluate_all(const std::vector<Point>& points, int jobs, Eval&& eval) {
  std::vector<ReportRecord> out(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < points.size();) out[i] = eval(points[i]);
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// Command line

inline std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidSpec, "cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::InvalidSpec, "config line without '=': " + line);
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    out[key] = val;
  }
  return out;
}

inline const std::vector<std::string>& all_param_names() {
  static const std::vector<std::string> names = {"k",     "x",     "y",     "z",     "nu",      "q",
                                                 "alpha", "chi",   "s",     "beta",  "mu",      "n",
                                                 "sigma", "T",     "ratio", "heights", "tau0-max"};
  return names;
}

struct Settings {
  double tol = 1e-10;
  std::string format = "json";
  std::string out;
  int jobs = 1;
  bool experimental = false;
};

inline void emit(const std::string& text, const Settings& s, std::ostream& out) {
  if (s.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(s.out, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidSpec, "cannot write '" + s.out + "'");
  f << text;
}

inline std::string render(const std::vector<ReportRecord>& records, const std::string& format) {
  if (format == "csv") return to_csv(records);
  if (format == "pretty") return to_pretty(records);
  Json arr = Json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

inline std::string render_list(const std::string& format) {
  if (format == "json") {
    Json arr = Json::array();
    for (const auto& e : identities::catalog())
      arr.push_back({{"id", e.id}, {"params", e.params}, {"constraints", e.constraints}, {"description", e.description}});
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  if (format == "csv") {
    os << "id,params,constraints,description\r\n";
    for (const auto& e : identities::catalog()) {
      std::string ps;
      for (const auto& p : e.params) ps += (ps.empty() ? "" : " ") + p;
      os << csv_field(e.id) << "," << csv_field(ps) << "," << csv_field(e.constraints) << ","
         << csv_field(e.description) << "\r\n";
    }
    return os.str();
  }
  for (const auto& e : identities::catalog()) {
    std::string ps;
    for (const auto& p : e.params) ps += (ps.empty() ? "" : ",") + p;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-18s %-16s %-44s %s\n", e.id.c_str(), ps.c_str(), e.constraints.c_str(),
                  e.description.c_str());
    os << buf;
  }
  return os.str();
}

inline std::string render_asymptotic(const std::string& id, const Point& pt, const mellin::AsymptoticCheckResult& a,
                                     const std::string& format) {
  if (format == "json") {
    Json j;
    j["check"] = id;
    for (const auto& [k, v] : pt) j[k] = v.text;
    Json rows = Json::array();
    for (std::size_t i = 0; i < a.heights.size(); ++i)
      rows.push_back({{"t", fmt_double(a.heights[i])},
                      {"ratio_re", fmt_double(a.ratios[i].real())},
                      {"ratio_im", fmt_double(a.ratios[i].imag())},
                      {id == "asym2f1" ? "deviation_t" : "lhs_over_bound", fmt_double(a.deviations[i])}});
    j["rows"] = rows;
    if (id == "asym2f1") {
      j["band"] = fmt_double(a.band);
      j["decreasing"] = a.decreasing;
    } else {
      j["tau0"] = fmt_double(*a.tau0);
    }
    j["pass"] = a.pass;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  const char* col = id == "asym2f1" ? "deviation_t" : "lhs_over_bound";
  if (format == "csv") {
    os << "t,ratio_re,ratio_im," << col << "\r\n";
    for (std::size_t i = 0; i < a.heights.size(); ++i)
      os << fmt_double(a.heights[i]) << "," << fmt_double(a.ratios[i].real()) << "," << fmt_double(a.ratios[i].imag())
         << "," << fmt_double(a.deviations[i]) << "\r\n";
    return os.str();
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%10s %24s %24s %16s\n", "t", "ratio_re", "ratio_im", col);
  os << buf;
  for (std::size_t i = 0; i < a.heights.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%10.4g %24.17g %24.17g %16.6g\n", a.heights[i], a.ratios[i].real(),
                  a.ratios[i].imag(), a.deviations[i]);
    os << buf;
  }
  if (id == "asym2f1")
    std::snprintf(buf, sizeof buf, "band=%.6g decreasing=%s pass=%s\n", a.band, a.decreasing ? "yes" : "no",
                  a.pass ? "yes" : "no");
  else
    std::snprintf(buf, sizeof buf, "tau0=%.6g pass=%s\n", *a.tau0, a.pass ? "yes" : "no");
  os << buf;
  return os.str();
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Certified numerical checks of r_k Bessel-series identities", "verify"};
  app.require_subcommand(1);

  std::map<std::string, std::string> values;
  // one entry per subcommand that declares the flag
  std::map<std::string, std::vector<CLI::Option*>> options;
  auto given = [&](const std::string& key) {
    auto it = options.find(key);
    if (it == options.end()) return false;
    for (auto* o : it->second)
      if (o->count() > 0) return true;
    return false;
  };
  std::string tol_text, format, out_path, config_path, jobs_text, max_terms_text, max_index_text;
  bool experimental = false;
  std::string target;

  auto add_common = [&](CLI::App* sub, bool with_params) {
    options["tol"].push_back(sub->add_option("--tol", tol_text, "absolute tolerance"));
    options["format"].push_back(sub->add_option("--format", format, "json, csv or pretty"));
    options["out"].push_back(sub->add_option("--out", out_path, "write records to this file"));
    options["jobs"].push_back(sub->add_option("--jobs", jobs_text, "worker threads over grid points"));
    options["max-terms"].push_back(sub->add_option("--max-terms", max_terms_text, "series truncation ceiling"));
    options["max-index"].push_back(sub->add_option("--max-index", max_index_text, "largest r_k(n) table index"));
    sub->add_option("--config", config_path, "key = value file; flags take precedence");
    options["experimental"].push_back(sub->add_flag("--experimental", experimental, "probe outside the stated domain"));
    if (with_params)
      for (const auto& name : all_param_names())
        options[name].push_back(sub->add_option("--" + name, values[name]));
  };

  auto* list = app.add_subcommand("list", "print the identity catalog");
  add_common(list, false);
  auto* run_cmd = app.add_subcommand("run", "verify one parameter point");
  run_cmd->add_option("id", target, "identity id")->required();
  add_common(run_cmd, true);
  auto* scan = app.add_subcommand("scan", "verify a parameter grid");
  scan->add_option("id", target, "identity id")->required();
  add_common(scan, true);
  auto* mel = app.add_subcommand("mellin", "Mellin-transform checks");
  mel->add_option("check", target, "forward, inverse, jk, jk-inverse, asym2f1 or asym-gamma2f1")->required();
  add_common(mel, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    std::map<std::string, std::string> config;
    if (!config_path.empty()) config = read_config(config_path);
    auto setting = [&](const std::string& key, const std::string& flag_value) -> std::optional<std::string> {
      if (given(key)) return flag_value;
      if (config.count(key)) return config[key];
      return std::nullopt;
    };

    Settings s;
    if (auto v = setting("tol", tol_text)) s.tol = parse_double(*v, "tol");
    if (!(s.tol > 0)) fail(ErrorKind::InvalidSpec, "tol must be positive");
    if (auto v = setting("format", format)) s.format = *v;
    if (s.format != "json" && s.format != "csv" && s.format != "pretty")
      fail(ErrorKind::InvalidSpec, "format must be json, csv or pretty");
    if (auto v = setting("out", out_path)) s.out = *v;
    if (auto v = setting("jobs", jobs_text)) {
      double j = parse_double(*v, "jobs");
      if (j < 1 || j != std::floor(j) || j > 1024) fail(ErrorKind::InvalidSpec, "jobs must be a positive integer");
      s.jobs = static_cast<int>(j);
    }
    s.experimental = experimental || (!given("experimental") && config.count("experimental") &&
                                      (config["experimental"] == "true" || config["experimental"] == "1"));

    // ceiling: config < environment < flag
    {
      std::optional<std::string> mt;
      if (config.count("max-terms")) mt = config["max-terms"];
      if (const char* env = std::getenv("POPOV_VERIFY_MAX_TERMS")) mt = env;
      if (given("max-terms")) mt = max_terms_text;
      if (mt) {
        double v = parse_double(*mt, "max-terms");
        if (v < 1 || v != std::floor(v)) fail(ErrorKind::InvalidSpec, "max-terms must be a positive integer");
        series::max_terms_setting().store(static_cast<std::size_t>(v));
      }
    }

    if (auto v = setting("max-index", max_index_text)) {
      double h = parse_double(*v, "max-index");
      if (h < 1 || h != std::floor(h)) fail(ErrorKind::InvalidSpec, "max-index must be a positive integer");
      arith::SquaresTable::instance().set_max_horizon(static_cast<std::size_t>(h) + 1);
    }

    if (list->parsed()) {
      emit(render_list(s.format), s, out);
      return 0;
    }

    // axes in the check's own parameter order
    std::vector<std::string> names;
    std::map<std::string, std::string> defaults;
    const bool is_mellin = mel->parsed();
    if (is_mellin) {
      const auto* c = find_mellin(target);
      if (!c) fail(ErrorKind::InvalidSpec, "unknown mellin check '" + target + "'");
      names = c->params;
      defaults = c->defaults;
    } else {
      const auto* e = identities::find_entry(target);
      if (!e) fail(ErrorKind::InvalidSpec, "unknown identity id '" + target + "'");
      names = e->params;
      defaults = identity_defaults();
    }
    std::vector<std::pair<std::string, std::vector<ParamValue>>> axes;
    for (const auto& name : names) {
      std::optional<std::string> spec = setting(name, values[name]);
      if (!spec && defaults.count(name)) spec = defaults[name];
      if (!spec) continue;  // identity-specific default (e.g. chi)
      axes.emplace_back(name, expand(name, *spec));
    }
    auto points = cartesian(axes);
    if (run_cmd->parsed() && points.size() != 1)
      fail(ErrorKind::InvalidSpec, "run takes single parameter values; use scan for grids");

    if (is_mellin && (target == "asym2f1" || target == "asym-gamma2f1")) {
      if (points.size() != 1) fail(ErrorKind::InvalidSpec, "asymptotic scans take single parameter values");
      auto m = as_map(points[0]);
      mellin::AsymptoticCheckResult a;
      if (target == "asym2f1") {
        std::vector<double> hs;
        for (auto& h : split(m.at("heights").text, ',')) hs.push_back(parse_double(h, "heights"));
        a = mellin::asymptotic_check_2f1(m.at("sigma").num.real(), m.at("nu").num.real(), m.at("alpha").num.real(),
                                         m.at("beta").num.real(), hs);
      } else {
        a = mellin::asymptotic_check_gamma2f1(m.at("sigma").num.real(), m.at("mu").num.real(), m.at("nu").num,
                                              m.at("ratio").num.real(), m.at("tau0-max").num.real());
      }
      emit(render_asymptotic(target, points[0], a, s.format), s, out);
      return a.pass ? 0 : 1;
    }

    auto records = evaluate_all(points, s.jobs, [&](const Point& pt) {
      return is_mellin ? evaluate_mellin(target, pt, s.tol) : evaluate_identity(target, pt, s.tol, s.experimental);
    });
    emit(render(records, s.format), s, out);

    std::size_t pass = 0, failed = 0, errors = 0, probes = 0;
    for (const auto& r : records) {
      if (!r.error.empty()) {
        ++errors;
        err << "error at " << r.id;
        for (const auto& [k, v] : r.params) err << " " << k << "=" << v;
        err << ": " << r.error << "\n";
      } else if (r.experimental) {
        ++probes;
      } else if (r.pass) {
        ++pass;
      } else {
        ++failed;
      }
    }
    err << "records=" << records.size() << " pass=" << pass << " fail=" << failed << " errors=" << errors
        << " experimental=" << probes << " hash=" << hex(determinism_hash(records)) << "\n";
    return exit_code(records);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace popov::cli
