#pragma once

// Command-line front end. run_cli() is kept separate from main() so tests can
// drive it in-process.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qlmass/harness.hpp"
#include "qlmass/validation.hpp"

namespace qlmass::cli {

enum ExitCode { kOk = 0, kValidationFailure = 1, kConfigError = 2 };

struct Options {
  std::optional<std::string> metric;
  std::optional<int> n;
  std::optional<double> m, a, tau;
  std::vector<std::string> params;  // key=value
  std::vector<std::string> functionals;
  std::optional<std::string> radii;
  std::optional<int> order;
  std::optional<std::string> format;
  std::optional<std::string> output;
  std::optional<std::string> config;
  std::optional<int> threads;
  std::optional<double> r0;
  std::optional<double> contact_threshold;
  bool finite_difference = false;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) {
    p.erase(0, p.find_first_not_of(" \t"));
    p.erase(p.find_last_not_of(" \t") + 1);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

inline double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParameterError(key + ": '" + text + "' is not a number");
  }
  if (used != text.size()) throw ParameterError(key + ": '" + text + "' is not a number");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != static_cast<int>(v)) throw ParameterError(key + ": '" + text + "' is not an integer");
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ParameterError(key + ": '" + text + "' is not a boolean");
}

/// Reads an INI file with sections [metric], [run] and [tolerances].
inline void apply_config_file(const std::string& path, RunConfig& cfg) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParameterError("config: " + std::string(e.what()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ParameterError("config: key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string value = node.data();
      const std::string where = section + "." + key;
      if (section == "metric") {
        if (key == "family") {
          cfg.metric.family = value;
        } else if (key == "n") {
          cfg.metric.n = parse_int(where, value);
        } else if (key == "finite_difference") {
          cfg.metric.finite_difference = parse_bool(where, value);
        } else {
          cfg.metric.params[key] = parse_number(where, value);
        }
      } else if (section == "run") {
        if (key == "functionals" || key == "functional") {
          cfg.functionals.clear();
          for (const auto& f : split_list(value)) cfg.functionals.push_back(parse_functional(f));
        } else if (key == "r" || key == "radii") {
          cfg.radii = parse_schedule(value);
        } else if (key == "order") {
          cfg.order = parse_int(where, value);
        } else if (key == "format") {
          if (value != "csv" && value != "jsonl") throw ParameterError(where + ": expected csv or jsonl");
          cfg.format = value == "csv" ? OutputFormat::kCsv : OutputFormat::kJsonl;
        } else if (key == "output") {
          cfg.output = value;
        } else if (key == "threads") {
          cfg.threads = parse_int(where, value);
        } else if (key == "r0") {
          cfg.r0 = parse_number(where, value);
        } else if (key == "contact_threshold") {
          cfg.contact_threshold = parse_number(where, value);
        } else {
          throw ParameterError("config: unknown key '" + where + "'");
        }
      } else if (section == "tolerances") {
        cfg.tolerances[key] = parse_number(where, value);
      } else {
        throw ParameterError("config: unknown section [" + section + "]");
      }
    }
  }
}

/// Defaults, then the config file, then explicit flags.
inline RunConfig resolve(const std::string& command, const Options& o) {
  RunConfig cfg;
  cfg.command = command;
  if (command == "graph") {
    cfg.metric.family = "graph";
    cfg.functionals.clear();
  }
  if (o.config) apply_config_file(*o.config, cfg);
  if (o.metric) {
    if (*o.metric != cfg.metric.family) cfg.metric.params.clear();
    cfg.metric.family = *o.metric;
  }
  if (o.n) cfg.metric.n = *o.n;
  if (o.m) cfg.metric.params["m"] = *o.m;
  if (o.a) cfg.metric.params["a"] = *o.a;
  if (o.tau) cfg.metric.params["tau"] = *o.tau;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParameterError("param: expected key=value, got '" + kv + "'");
    cfg.metric.params[kv.substr(0, eq)] = parse_number("param " + kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.finite_difference) cfg.metric.finite_difference = true;
  if (!o.functionals.empty()) {
    cfg.functionals.clear();
    for (const auto& item : o.functionals)
      for (const auto& f : split_list(item)) cfg.functionals.push_back(parse_functional(f));
  }
  if (o.radii) cfg.radii = parse_schedule(*o.radii);
  if (o.order) cfg.order = *o.order;
  if (o.format) cfg.format = *o.format == "jsonl" ? OutputFormat::kJsonl : OutputFormat::kCsv;
  if (o.output) cfg.output = *o.output;
  if (o.threads) cfg.threads = *o.threads;
  if (o.r0) cfg.r0 = *o.r0;
  if (o.contact_threshold) cfg.contact_threshold = *o.contact_threshold;
  return cfg;
}

inline void emit(const RunConfig& cfg, const std::vector<Row>& rows,
                 const std::vector<std::pair<std::string, ConvergenceFit>>& fits, std::ostream& out) {
  if (cfg.output.empty()) {
    write_rows(out, cfg, rows, fits);
    return;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw ParameterError("output: cannot open '" + cfg.output + "'");
  write_rows(file, cfg, rows, fits);
}

inline int list_metrics(std::ostream& out) {
  for (const auto& f : metric_families()) {
    out << f.name << "\n  " << f.description << "\n";
    for (const auto& p : f.parameters) {
      out << "  --param " << p.name << "=<value>  (default " << format_double(p.default_value) << ")  "
          << p.description << "\n";
    }
  }
  out << "any family: perturb_amplitude, perturb_radius, perturb_center add a compact conformal bump\n";
  return kOk;
}

inline int run_validate(const RunConfig& cfg, bool family_given, std::ostream& out) {
  std::vector<MetricSpec> specs;
  if (family_given) {
    specs.push_back(cfg.metric);
  } else {
    specs.push_back({"flat", 3, {}, false});
    specs.push_back({"half-schwarzschild", 3, {{"m", 1.0}}, false});
    specs.push_back({"conformal", 3, {{"a", 2.0}, {"tau", 1.0}}, false});
    specs.push_back({"graph", 3, {{"a", -1.0 / (8.0 * std::numbers::pi)}}, false});
  }
  int failed = 0, total = 0;
  for (const auto& spec : specs) {
    for (const auto& c : validate(spec, cfg.tolerances, cfg.order)) {
      ++total;
      if (!c.pass) ++failed;
      out << (c.pass ? "PASS " : "FAIL ") << c.suite << ": " << c.name << "  value=" << fmt::format("{:.6g}", c.value)
          << " tol=" << fmt::format("{:.3g}", c.tolerance);
      if (!c.detail.empty()) out << "  (" << c.detail << ")";
      out << "\n";
    }
  }
  out << total - failed << "/" << total << " checks passed\n";
  return failed == 0 ? kOk : kValidationFailure;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Quasi-local and ADM mass evaluation on asymptotically flat half-spaces", "qlmass"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI file with [metric], [run] and [tolerances] sections");
    sub->add_option("--metric", o.metric, "metric family (see `qlmass metrics`)");
    sub->add_option("--n", o.n, "dimension (base dimension for graph)");
    sub->add_option("--m", o.m, "half-schwarzschild mass parameter");
    sub->add_option("--a", o.a, "amplitude (conformal, graph)");
    sub->add_option("--tau", o.tau, "decay rate (conformal)");
    sub->add_option("--param", o.params, "extra family parameter key=value (repeatable)");
    sub->add_option("--order", o.order, "quadrature order (default 64 for n = 3, 32 otherwise)");
    sub->add_flag("--fd", o.finite_difference, "use finite-difference metric jets");
  };
  auto add_run = [&](CLI::App* sub) {
    sub->add_option("--functional", o.functionals,
                    "adm-flux, adm-tensor, hawking-disk, hawking-general, iso-mass, bianchi (comma list)");
    sub->add_option("--r", o.radii, "radius, comma list, or geometric schedule min:max:count");
    sub->add_option("--format", o.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--output", o.output, "output path (default stdout)");
    sub->add_option("--threads", o.threads, "worker threads over radii");
    sub->add_option("--r0", o.r0, "base radius for V(r) and the Bianchi annulus");
    sub->add_option("--contact-threshold", o.contact_threshold, "orthogonality warning level for hawking-disk");
  };

  auto* metrics = app.add_subcommand("metrics", "list metric families and parameters");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate functionals at one or more radii");
  auto* converge = app.add_subcommand("converge", "evaluate along a schedule and fit the limit");
  auto* graph = app.add_subcommand("graph", "graph-boundary mass formula along a schedule");
  auto* validate_cmd = app.add_subcommand("validate", "run the invariant suites");
  for (auto* sub : {evaluate, converge, graph}) {
    add_common(sub);
    add_run(sub);
  }
  add_common(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (metrics->parsed()) return list_metrics(out);
    if (validate_cmd->parsed()) {
      const RunConfig cfg = resolve("validate", o);
      return run_validate(cfg, o.metric.has_value() || o.config.has_value(), out);
    }
    const std::string command = evaluate->parsed() ? "evaluate" : converge->parsed() ? "converge" : "graph";
    const RunConfig cfg = resolve(command, o);
    validate_config(cfg);
    std::vector<Row> rows;
    if (command == "graph") {
      rows = graph_sequence(cfg);
      if (!cfg.functionals.empty()) {
        const auto extra = mass_sequence(cfg);
        rows.insert(rows.end(), extra.begin(), extra.end());
      }
    } else {
      rows = mass_sequence(cfg);
    }
    std::vector<std::pair<std::string, ConvergenceFit>> fits;
    if (command != "evaluate") fits = fit_rows(rows);
    emit(cfg, rows, fits, out);
    return kOk;
  } catch (const ParameterError& e) {
    err << "qlmass: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "qlmass: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "qlmass: " << e.what() << "\n";
    return kValidationFailure;
  }
}

}  // namespace qlmass::cli
