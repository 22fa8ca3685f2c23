#pragma once

// Batch evaluation over radius schedules, with ordered parallel dispatch and
// CSV / JSON-lines serialization.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qlmass/convergence.hpp"
#include "qlmass/mass_functionals.hpp"
#include "qlmass/metric_models.hpp"

namespace qlmass {

enum class OutputFormat { kCsv, kJsonl };

struct RunConfig {
  std::string command = "evaluate";
  MetricSpec metric;
  std::vector<Functional> functionals{Functional::kAdmFlux};
  std::vector<double> radii{10.0};
  /// Zero selects the default order for the dimension.
  int order = 0;
  OutputFormat format = OutputFormat::kCsv;
  std::string output;
  int threads = 1;
  /// Base radius of V(r) for iso-mass and inner radius of the Bianchi annulus
  /// on families with an excluded core.
  double r0 = kVolumeBaseRadius;
  double contact_threshold = 1e-3;
  std::map<std::string, double> tolerances;

  int resolved_order() const { return order > 0 ? order : default_order(manifold_dimension(metric)); }
  static int default_order(int n) { return n <= 3 ? 64 : 32; }
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.17g}", v);
}

/// Parses "r", "a,b,c" or the geometric schedule "min:max:count".
inline std::vector<double> parse_schedule(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ParameterError("radius schedule: '" + s + "' is not a number");
    }
    if (used != s.size()) throw ParameterError("radius schedule: '" + s + "' is not a number");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ParameterError("radius schedule: expected min:max:count");
    const double lo = number(parts[0]), hi = number(parts[1]);
    const double count = number(parts[2]);
    if (count != std::floor(count) || count < 1) throw ParameterError("radius schedule: count must be a positive integer");
    const int k = static_cast<int>(count);
    if (k == 1) return {lo};
    if (!(lo > 0.0 && hi > lo)) throw ParameterError("radius schedule: need 0 < min < max");
    for (int i = 0; i < k; ++i) out.push_back(i == k - 1 ? hi : lo * std::pow(hi / lo, double(i) / (k - 1)));
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    p.erase(0, p.find_first_not_of(" \t"));
    p.erase(p.find_last_not_of(" \t") + 1);
    if (!p.empty()) out.push_back(number(p));
  }
  if (out.empty()) throw ParameterError("radius schedule is empty");
  return out;
}

/// Field-level checks; throws ParameterError naming the offending field.
inline void validate_config(const RunConfig& c) {
  if (c.radii.empty()) throw ParameterError("r: schedule is empty");
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    if (!(c.radii[i] > 1.0) || !std::isfinite(c.radii[i])) throw ParameterError("r: every radius must exceed 1");
    if (i > 0 && !(c.radii[i] > c.radii[i - 1])) throw ParameterError("r: schedule must be strictly increasing");
  }
  if (c.command == "converge" && c.radii.size() < 3) throw ParameterError("r: converge needs at least 3 radii");
  if (c.order != 0 && c.order < 4) throw ParameterError("order: must be at least 4");
  if (c.threads < 1) throw ParameterError("threads: must be at least 1");
  if (!(c.r0 > 0.0)) throw ParameterError("r0: must be positive");
  if (c.functionals.empty() && c.command != "graph") throw ParameterError("functional: list is empty");
  const int n = manifold_dimension(c.metric);
  if (c.metric.n < 2 || n < 3 || n > 5) throw ParameterError("n: supported manifold dimensions are 3, 4 and 5");
  for (Functional f : c.functionals) {
    if ((f == Functional::kHawkingDisk || f == Functional::kIsoMass) && n != 3) {
      throw ParameterError("functional: " + functional_name(f) + " requires n = 3");
    }
    if (f == Functional::kIsoMass) {
      for (double r : c.radii)
        if (!(r > c.r0)) throw ParameterError("r: iso-mass needs every radius above r0");
    }
  }
}

/// Calls f(std::integral_constant<int, N>) for the runtime dimension.
template <class F>
decltype(auto) with_dimension(int n, F&& f) {
  switch (n) {
    case 3: return f(std::integral_constant<int, 3>{});
    case 4: return f(std::integral_constant<int, 4>{});
    case 5: return f(std::integral_constant<int, 5>{});
  }
  throw ParameterError("n: supported manifold dimensions are 3, 4 and 5");
}

/// Runs job(i) for i in [0, count) on `threads` workers. Results are owned
/// by the caller and indexed by i, so the output order never depends on
/// scheduling. The first failure by index is rethrown.
template <class Job>
void parallel_for(std::size_t count, int threads, Job&& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <int N>
MassReport evaluate_functional(const MetricField<N>& field, Functional f, double r, const RunConfig& c) {
  const int order = c.resolved_order();
  MassReport rep;
  switch (f) {
    case Functional::kAdmFlux: rep = adm_flux(field, r, order); break;
    case Functional::kAdmTensor: rep = adm_tensor(field, r, order); break;
    case Functional::kHawkingDisk: rep = hawking_disk(field, r, order, c.contact_threshold); break;
    case Functional::kHawkingGeneral: rep = hawking_general(field, r, order); break;
    case Functional::kIsoMass: rep = iso_mass(field, r, order, c.r0); break;
    case Functional::kBianchi: {
      const double inner = field.family_core_radius() > 0.0 ? c.r0 : 0.0;
      if (!(r > inner)) throw ParameterError("r: bianchi on this family needs r > r0");
      const BianchiResult b = bianchi_check(field, r, order, inner);
      rep.functional = f;
      rep.r = r;
      rep.order = order;
      rep.value = b.residual;
      if (inner > 0.0) rep.warnings.push_back("annulus inner radius " + format_double(inner));
      break;
    }
  }
  if (std::isnan(rep.area) || std::isnan(rep.theta)) {
    const AreaResult a = area(field, r, order);
    rep.area = a.area;
    rep.theta = a.theta;
  }
  return rep;
}

struct Row {
  std::string metric;
  std::string params;
  std::string functional;
  MassReport report;
};

/// One row per (functional, radius), functional-major in the configured
/// order, radii ascending.
inline std::vector<Row> mass_sequence(const RunConfig& c) {
  validate_config(c);
  return with_dimension(manifold_dimension(c.metric), [&](auto dim) {
    constexpr int N = decltype(dim)::value;
    const MetricField<N> field = make_metric<N>(c.metric);
    const std::size_t nr = c.radii.size(), nf = c.functionals.size();
    std::vector<Row> rows(nr * nf);
    parallel_for(nr, c.threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < nf; ++j) {
        rows[j * nr + i] = {field.name(), field.params(), functional_name(c.functionals[j]),
                            evaluate_functional(field, c.functionals[j], c.radii[i], c)};
      }
    });
    return rows;
  });
}

/// graph_mass rows over the schedule (Euclidean boundary formula).
inline std::vector<Row> graph_sequence(const RunConfig& c) {
  if (c.metric.family != "graph") throw ParameterError("metric: the graph command needs --metric graph");
  const int order = c.resolved_order();
  return with_dimension(manifold_dimension(c.metric), [&](auto dim) -> std::vector<Row> {
    constexpr int N = decltype(dim)::value;
    const auto spec = make_graph_spec<N - 1>(c.metric);
    const GraphMetric<N> family(spec);
    std::vector<Row> rows(c.radii.size());
    parallel_for(c.radii.size(), c.threads, [&](std::size_t i) {
      MassReport rep;
      rep.r = c.radii[i];
      rep.order = order;
      rep.value = graph_mass(spec, c.radii[i], order);
      rep.normalization = N - 2;
      rows[i] = {family.kName, family.params(), "graph-mass", rep};
    });
    return rows;
  });
}

/// Fits per functional, keyed like the rows.
inline std::vector<std::pair<std::string, ConvergenceFit>> fit_rows(const std::vector<Row>& rows) {
  std::vector<std::pair<std::string, ConvergenceFit>> fits;
  std::vector<std::string> names;
  for (const auto& r : rows)
    if (std::find(names.begin(), names.end(), r.functional) == names.end()) names.push_back(r.functional);
  for (const auto& name : names) {
    std::vector<double> rs, ms;
    for (const auto& r : rows) {
      if (r.functional == name) {
        rs.push_back(r.report.r);
        ms.push_back(r.report.value);
      }
    }
    if (rs.size() >= 3) fits.emplace_back(name, rate_fit(rs, ms));
  }
  return fits;
}

// ---------------------------------------------------------------------------
// Serialization

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> kColumns = {"metric", "params", "functional", "r",          "value",
                                                    "area",   "volume", "theta",      "quad_order", "warnings"};
  return kColumns;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string join_warnings(const std::vector<std::string>& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "; " : "") + w[i];
  return out;
}

/// Resolved configuration as ordered key/value pairs. Thread count and
/// output path are deliberately left out so that output bytes depend only on
/// what was computed.
inline std::vector<std::pair<std::string, std::string>> resolved_config(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("command", c.command);
  kv.emplace_back("metric", c.metric.family);
  kv.emplace_back("n", std::to_string(c.metric.n));
  for (const auto& [k, v] : c.metric.params) kv.emplace_back(k, format_double(v));
  kv.emplace_back("derivatives", c.metric.finite_difference ? "finite-difference" : "analytic");
  std::string fs;
  for (std::size_t i = 0; i < c.functionals.size(); ++i) fs += (i ? "," : "") + functional_name(c.functionals[i]);
  kv.emplace_back("functionals", fs);
  std::string rs;
  for (std::size_t i = 0; i < c.radii.size(); ++i) rs += (i ? "," : "") + format_double(c.radii[i]);
  kv.emplace_back("radii", rs);
  kv.emplace_back("order", std::to_string(c.resolved_order()));
  kv.emplace_back("r0", format_double(c.r0));
  kv.emplace_back("contact_threshold", format_double(c.contact_threshold));
  for (const auto& [k, v] : c.tolerances) kv.emplace_back("tolerance." + k, format_double(v));
  return kv;
}

inline void write_csv(std::ostream& os, const RunConfig& c, const std::vector<Row>& rows,
                      const std::vector<std::pair<std::string, ConvergenceFit>>& fits) {
  for (const auto& [k, v] : resolved_config(c)) os << "# " << k << " = " << v << "\n";
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& row : rows) {
    const MassReport& m = row.report;
    os << csv_escape(row.metric) << ',' << csv_escape(row.params) << ',' << row.functional << ','
       << format_double(m.r) << ',' << format_double(m.value) << ',' << format_double(m.area) << ','
       << format_double(m.volume) << ',' << format_double(m.theta) << ',' << m.order << ','
       << csv_escape(join_warnings(m.warnings)) << "\n";
  }
  for (const auto& [name, f] : fits) {
    os << "# fit functional=" << name << " limit=" << format_double(f.limit) << " rate=" << format_double(f.rate)
       << " richardson_rate=" << format_double(f.richardson_rate) << " uncertainty=" << format_double(f.uncertainty)
       << " residual=" << format_double(f.residual_norm) << " flags=" << (f.flags().empty() ? "none" : f.flags())
       << "\n";
  }
}

inline nlohmann::ordered_json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline void write_jsonl(std::ostream& os, const RunConfig& c, const std::vector<Row>& rows,
                        const std::vector<std::pair<std::string, ConvergenceFit>>& fits) {
  nlohmann::ordered_json config;
  for (const auto& [k, v] : resolved_config(c)) config[k] = v;
  os << nlohmann::ordered_json{{"config", config}}.dump() << "\n";
  for (const auto& row : rows) {
    const MassReport& m = row.report;
    nlohmann::ordered_json j;
    j["metric"] = row.metric;
    j["params"] = row.params;
    j["functional"] = row.functional;
    j["r"] = json_number(m.r);
    j["value"] = json_number(m.value);
    j["area"] = json_number(m.area);
    j["volume"] = json_number(m.volume);
    j["theta"] = json_number(m.theta);
    j["quad_order"] = m.order;
    j["warnings"] = join_warnings(m.warnings);
    os << j.dump() << "\n";
  }
  for (const auto& [name, f] : fits) {
    nlohmann::ordered_json j;
    j["functional"] = name;
    j["limit"] = json_number(f.limit);
    j["rate"] = json_number(f.rate);
    j["richardson_rate"] = json_number(f.richardson_rate);
    j["uncertainty"] = json_number(f.uncertainty);
    j["residual"] = json_number(f.residual_norm);
    j["flags"] = f.flags();
    os << nlohmann::ordered_json{{"fit", j}}.dump() << "\n";
  }
}

inline void write_rows(std::ostream& os, const RunConfig& c, const std::vector<Row>& rows,
                       const std::vector<std::pair<std::string, ConvergenceFit>>& fits) {
  if (c.format == OutputFormat::kJsonl) {
    write_jsonl(os, c, rows, fits);
  } else {
    write_csv(os, c, rows, fits);
  }
}

}  // namespace qlmass
