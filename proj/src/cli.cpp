#include "sphint/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sphint/applications.hpp"
#include "sphint/asymptotics.hpp"
#include "sphint/montecarlo.hpp"
#include "sphint/numeric.hpp"
#include "sphint/parallel.hpp"
#include "sphint/randmat.hpp"
#include "sphint/variational.hpp"

namespace sphint::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kReserved = {"command", "seed", "output", "format"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) throw ConfigError("parameter '" + key + "': not a number: '" + t + "'");
  return v;
}

long long parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) throw ConfigError("parameter '" + key + "': not an integer: '" + t + "'");
  return v;
}

std::uint64_t parse_seed(const std::string& text, int line = 0) {
  const std::string t = trim(text);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || t.front() == '-') throw ConfigError("seed: not an unsigned integer: '" + t + "'", line);
  return v;
}

Format parse_format(const std::string& text, int line = 0) {
  const std::string t = trim(text);
  if (t == "json") return Format::Json;
  if (t == "csv") return Format::Csv;
  throw ConfigError("format must be 'json' or 'csv', got '" + t + "'", line);
}

std::string format_name(Format f) { return f == Format::Json ? "json" : "csv"; }

const OptionSpec* find_option(const CommandSchema& s, const std::string& key) {
  for (const auto& o : s.options)
    if (o.key == key) return &o;
  return nullptr;
}

void check_value(const OptionSpec& o, const std::string& value, int line) {
  try {
    switch (o.type) {
      case ValueType::Real:
        parse_real(value, o.key);
        break;
      case ValueType::RealList:
        if (!trim(value).empty()) parse_real_list(value);
        break;
      case ValueType::Integer:
        if (parse_integer(value, o.key) < 0) throw ConfigError("parameter '" + o.key + "': must be non-negative");
        break;
      case ValueType::Text:
        break;
    }
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), line);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("parameter '" + o.key + "': " + e.what(), line);
  }
}

double real_param(const RunConfig& c, const std::string& key) { return parse_real(param(c, key), key); }
std::size_t size_param(const RunConfig& c, const std::string& key) {
  return static_cast<std::size_t>(parse_integer(param(c, key), key));
}
std::vector<double> list_param(const RunConfig& c, const std::string& key) {
  const std::string v = trim(param(c, key));
  return v.empty() ? std::vector<double>{} : parse_real_list(v);
}

Measure measure_param(const RunConfig& c, const std::string& key) {
  const std::string v = trim(param(c, key));
  if (v == "semicircle") return Measure::semicircle();
  try {
    return measure_from_json(v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("parameter '" + key + "': " + e.what());
  }
}

EntryLaw law_param(const RunConfig& c) {
  const std::string v = trim(param(c, "law"));
  if (v == "gaussian") return EntryLaw::Gaussian;
  if (v == "rademacher") return EntryLaw::Rademacher;
  if (v == "uniform") return EntryLaw::UniformSym;
  throw ConfigError("parameter 'law': expected gaussian, rademacher or uniform, got '" + v + "'");
}

int beta_param(const RunConfig& c) {
  const auto b = size_param(c, "beta");
  if (b != 1 && b != 2) throw ConfigError("parameter 'beta': must be 1 or 2");
  return static_cast<int>(b);
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (double x : r) row.push_back(std::isfinite(x) ? json(x) : json(format_real(x)));
    rows.push_back(row);
  }
  return {{"columns", t.columns}, {"rows", rows}};
}

struct Outcome {
  Table table;
  json extra = json::object();
  bool check_failed = false;
  std::string failure;
};

// --- command handlers ------------------------------------------------------

Outcome do_j_eval(const RunConfig& c) {
  const auto thetas = list_param(c, "theta");
  const auto lambdas = list_param(c, "lambda");
  const Measure mu = measure_param(c, "measure");
  const bool semicircle = mu.kind() == MeasureKind::Semicircle;
  Outcome o;
  o.table.columns = {"theta", "lambda", "j"};
  if (semicircle) o.table.columns.push_back("rate_i_theta");
  for (double t : thetas)
    for (double l : lambdas) {
      std::vector<double> row = {t, l, j_value(t, l, mu)};
      if (semicircle) row.push_back(rate_i_theta(t, l));
      o.table.rows.push_back(row);
    }
  return o;
}

Outcome do_rate(const RunConfig& c) {
  const auto xs = list_param(c, "x-grid");
  const auto thetas = list_param(c, "theta");
  Outcome o;
  o.table.columns = {"x", "rate_i"};
  for (double t : thetas) o.table.columns.push_back("rate_i_theta=" + format_real(t));
  for (double x : xs) {
    std::vector<double> row = {x, rate_i(x)};
    for (double t : thetas) row.push_back(rate_i_theta(t, x));
    o.table.rows.push_back(row);
  }
  const std::string nu_text = trim(param(c, "nu"));
  if (!nu_text.empty()) {
    const Measure nu = measure_param(c, "nu");
    const double r = rate_extremal(nu);
    o.extra["rate_extremal"] = std::isfinite(r) ? json(r) : json(format_real(r));
    if (!trim(param(c, "xi")).empty()) {
      const Measure xi = measure_param(c, "xi");
      const double rd = rate_deformed(xi, nu);
      o.extra["rate_deformed"] = std::isfinite(rd) ? json(rd) : json(format_real(rd));
      o.extra["j_functional"] = j_functional(xi, nu);
    }
  }
  return o;
}

Outcome do_simulate(const RunConfig& c) {
  const std::string mode = trim(param(c, "mode"));
  const std::size_t n = size_param(c, "n");
  const int beta = beta_param(c);
  const EntryLaw law = law_param(c);
  const double gamma = real_param(c, "gamma");
  if (!(gamma > 0.0)) throw ConfigError("parameter 'gamma': must be positive");
  const auto thetas = list_param(c, "theta");
  Outcome o;
  if (mode == "spectrum") {
    std::vector<double> scaled;
    for (double t : thetas) scaled.push_back(std::sqrt(gamma) * t);
    const auto s = spiked_sample({n, beta, law, c.seed}, DeformationSpec::from(scaled));
    o.table.columns = {"index", "eigenvalue"};
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
      o.table.rows.push_back({static_cast<double>(i + 1), s.eigenvalues[i]});
    o.extra["bl_distance_to_semicircle"] = bl_distance(s.empirical, Measure::semicircle());
    return o;
  }
  if (mode != "bbp") throw ConfigError("parameter 'mode': expected bbp or spectrum");
  const std::size_t reps = size_param(c, "replicates");
  if (reps < 2) throw ConfigError("parameter 'replicates': need at least 2");
  o.table.columns = {"theta", "mean_top_eig", "stderr", "predicted"};
  for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
    const double t = thetas[ti];
    std::vector<double> top(reps);
    parallel_for(reps, [&](std::size_t r) {
      const EnsembleSpec spec{n, beta, law, Rng::derive(c.seed, ti * 1000003 + r)};
      top[r] = spiked_sample(spec, DeformationSpec::from({std::sqrt(gamma) * t})).eigenvalues.front();
    });
    NeumaierSum s;
    for (double x : top) s.add(x);
    const double mean = s.value() / static_cast<double>(reps);
    NeumaierSum v;
    for (double x : top) v.add((x - mean) * (x - mean));
    const double se = std::sqrt(v.value() / static_cast<double>(reps - 1) / static_cast<double>(reps));
    o.table.rows.push_back({t, mean, se, bbp_map(t, gamma)});
  }
  return o;
}

Outcome do_verify(const RunConfig& c) {
  const std::string suite = trim(param(c, "suite"));
  const int beta = beta_param(c);
  const std::size_t samples = size_param(c, "samples");
  Outcome o;
  o.extra["suite"] = suite;
  if (suite == "annealed") {
    const std::size_t n = size_param(c, "n");
    const auto d = DeformationSpec::from(list_param(c, "theta"));
    const EntryLaw law = law_param(c);
    const auto est = annealed_mc({n, beta, law, c.seed}, d, samples, c.seed);
    const double norm = normalization(beta, d.k(), n);
    const double theory = annealed_exact(d, beta, n);
    const double value = norm * est.log_value, se = norm * est.stderr_log;
    const double dev = value - theory;
    // Exact for Gaussian entries up to rounding; an upper bound otherwise.
    const bool pass = law == EntryLaw::Gaussian ? std::abs(dev) <= 3.0 * se + 1e-10 : dev <= 3.0 * se + 1e-10;
    o.table.columns = {"n", "k", "beta", "log_value", "stderr", "normalized", "theory", "deviation"};
    o.table.rows.push_back({double(n), double(d.k()), double(beta), est.log_value, est.stderr_log, value, theory, dev});
    o.extra["method"] = method_name(est.method);
    o.extra["pass"] = pass;
    if (!pass) o.check_failed = true, o.failure = "annealed estimate outside its 3-sigma band";
    return o;
  }
  if (suite == "limit") {
    const auto d = DeformationSpec::from(list_param(c, "theta"));
    std::vector<std::size_t> ns;
    for (double x : list_param(c, "n-list")) ns.push_back(static_cast<std::size_t>(x));
    const auto top = list_param(c, "top");
    const auto bottom = list_param(c, "bottom");
    const auto rep = limit_check(ns, d, top, bottom, beta, samples, c.seed);
    const double tol = real_param(c, "tolerance");
    o.table.columns = {"n", "log_value", "stderr", "normalized", "theory", "deviation", "tilt"};
    for (const auto& r : rep.rows)
      o.table.rows.push_back({double(r.n), r.estimate.log_value, r.estimate.stderr_log, r.normalized, r.theory,
                              r.deviation, r.estimate.tilt});
    const bool pass = rep.non_increasing && rep.final_deviation < tol;
    o.extra["method"] = d.k() == 1 ? "angular_is" : "plain";
    o.extra["non_increasing"] = rep.non_increasing;
    o.extra["pass"] = pass;
    if (!pass) o.check_failed = true, o.failure = "limit deviation not decreasing below tolerance";
    return o;
  }
  if (suite == "decomposition") {
    const auto p = list_param(c, "p");
    const auto q = list_param(c, "q");
    const auto r = decomposition_check(p, q, size_param(c, "k"), beta);
    o.table.columns = {"lower", "middle", "upper", "reversed"};
    o.table.rows.push_back({r.lower, r.middle, r.upper, r.reversed ? 1.0 : 0.0});
    o.extra["pass"] = r.holds;
    if (!r.holds) o.check_failed = true, o.failure = "sandwich inequality violated";
    return o;
  }
  if (suite == "variational") {
    VariationalProblem prob{Measure::semicircle(), list_param(c, "lambda"), list_param(c, "theta")};
    std::sort(prob.thetas.begin(), prob.thetas.end(), std::greater<>());
    std::sort(prob.lambdas.begin(), prob.lambdas.end(), std::greater<>());
    const auto r = maximize_m(prob, 16, 1e-10, c.seed);
    o.table.columns = {"value", "bound", "gap"};
    o.table.rows.push_back({r.best.value, r.bound, r.gap});
    const bool pass = r.gap >= -1e-6;
    o.extra["pass"] = pass;
    if (!pass) o.check_failed = true, o.failure = "variational value exceeds the pairing bound";
    return o;
  }
  if (suite == "n2") {
    const auto lam = list_param(c, "lambda");
    const auto th = list_param(c, "theta");
    if (lam.size() != 2 || th.size() != 1) throw ConfigError("suite n2 needs two lambda values and one theta");
    const double exact = spherical_exact_n2(lam[0], lam[1], th[0]);
    const auto est = spherical_mc_spectrum(lam, DeformationSpec::from(th), 1, samples, c.seed);
    const double dev = est.log_value - exact;
    o.table.columns = {"log_value", "stderr", "theory", "deviation"};
    o.table.rows.push_back({est.log_value, est.stderr_log, exact, dev});
    const bool pass = std::abs(dev) <= 3.0 * est.stderr_log;
    o.extra["method"] = method_name(est.method);
    o.extra["pass"] = pass;
    if (!pass) o.check_failed = true, o.failure = "N=2 estimate outside its 3-sigma band";
    return o;
  }
  throw ConfigError("parameter 'suite': expected annealed, limit, decomposition, variational or n2");
}

Outcome do_spinglass(const RunConfig& c) {
  const auto thetas = list_param(c, "theta");
  Outcome o;
  o.table.columns = {"theta", "sk_free_energy", "cs_value", "q_star"};
  for (double t : thetas) {
    const auto cs = cs_minimize(t);
    o.table.rows.push_back({t, sk_free_energy(t), cs.value, cs.q_star});
  }
  const auto vt = list_param(c, "vector-theta");
  if (!vt.empty()) {
    const double q = real_param(c, "q");
    VectorSpinProblem p{Matrix::identity(vt.size()), vt};
    for (std::size_t j = 0; j < vt.size(); ++j)
      for (std::size_t i = 0; i < vt.size(); ++i)
        if (i != j) p.q(i, j) = q;
    o.extra["vector_spin_free_energy"] = vector_spin_free_energy(p);
  }
  return o;
}

Outcome do_denoise(const RunConfig& c) {
  const auto thetas = list_param(c, "theta");
  const auto gammas = list_param(c, "gamma-grid");
  const double h = real_param(c, "step");
  if (thetas.empty()) throw ConfigError("parameter 'theta': at least one value required");
  Outcome o;
  o.table.columns = {"gamma", "mi", "mmse", "mmse_fd"};
  for (double g : gammas) {
    const double fd = g > h ? mmse_from_derivative(g, thetas, h).value : std::nan("");
    o.table.rows.push_back({g, mi_finite_rank(g, thetas), mmse(g, thetas), fd});
  }
  return o;
}

Outcome dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::JEval:
      return do_j_eval(c);
    case Command::Rate:
      return do_rate(c);
    case Command::Simulate:
      return do_simulate(c);
    case Command::Verify:
      return do_verify(c);
    case Command::Spinglass:
      return do_spinglass(c);
    case Command::Denoise:
      return do_denoise(c);
  }
  throw ConfigError("unknown command");
}

json config_echo(const RunConfig& c) {
  json params = json::object();
  for (const auto& o : schema_for(c.command).options) params[o.key] = param(c, o.key);
  return {{"command", command_name(c.command)},
          {"seed", c.seed},
          {"format", format_name(c.format)},
          {"output", c.output_path},
          {"params", params}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::JEval:
      return "j-eval";
    case Command::Rate:
      return "rate";
    case Command::Simulate:
      return "simulate";
    case Command::Verify:
      return "verify";
    case Command::Spinglass:
      return "spinglass";
    case Command::Denoise:
      return "denoise";
  }
  return "";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& s : schemas())
    if (command_name(s.command) == name) return s.command;
  return std::nullopt;
}

const std::vector<CommandSchema>& schemas() {
  using VT = ValueType;
  static const std::vector<CommandSchema> all = {
      {Command::JEval,
       "Evaluate J(theta, lambda, mu) on a grid",
       {{"theta", "2", VT::RealList, "temperatures (list or a:b:step)"},
        {"lambda", "2.5", VT::RealList, "eigenvalue locations"},
        {"measure", "semicircle", VT::Text, "'semicircle' or a measure in JSON form"}}},
      {Command::Rate,
       "Tabulate rate functions I and I_theta",
       {{"x-grid", "2:6:0.25", VT::RealList, "evaluation points"},
        {"theta", "0,0.5,1,2", VT::RealList, "deformation strengths"},
        {"nu", "", VT::Text, "optional extremal measure (JSON) for the extremal rate"},
        {"xi", "", VT::Text, "optional deformation measure (JSON) for the deformed rate"}}},
      {Command::Simulate,
       "Sample spiked Wigner spectra",
       {{"mode", "bbp", VT::Text, "bbp (top-eigenvalue sweep) or spectrum"},
        {"n", "400", VT::Integer, "matrix dimension"},
        {"theta", "0.5,1.5,2", VT::RealList, "spike strengths"},
        {"gamma", "1", VT::Real, "signal-to-noise ratio"},
        {"replicates", "50", VT::Integer, "replicates per theta"},
        {"beta", "1", VT::Integer, "1 (real) or 2 (complex)"},
        {"law", "gaussian", VT::Text, "gaussian, rademacher or uniform"}}},
      {Command::Verify,
       "Run a verification report",
       {{"suite", "annealed", VT::Text, "annealed, limit, decomposition, variational or n2"},
        {"n", "50", VT::Integer, "dimension (annealed)"},
        {"k", "1", VT::Integer, "split index (decomposition)"},
        {"theta", "1,0.5", VT::RealList, "temperatures"},
        {"lambda", "2.5", VT::RealList, "eigenvalue locations (variational, n2)"},
        {"n-list", "50,100,200", VT::RealList, "dimensions (limit)"},
        {"top", "2.5", VT::RealList, "planted top outliers (limit)"},
        {"bottom", "", VT::RealList, "planted bottom outliers (limit)"},
        {"p", "1,-1", VT::RealList, "diagonal of P (decomposition)"},
        {"q", "1,0.5", VT::RealList, "diagonal of Q (decomposition)"},
        {"tolerance", "0.1", VT::Real, "final deviation tolerance (limit)"},
        {"samples", "100000", VT::Integer, "Monte-Carlo samples"},
        {"beta", "1", VT::Integer, "1 (real) or 2 (complex)"},
        {"law", "gaussian", VT::Text, "entry law (annealed)"}}},
      {Command::Spinglass,
       "Spherical SK and vector-spin free energies",
       {{"theta", "0.25:3:0.25", VT::RealList, "inverse temperatures"},
        {"vector-theta", "", VT::RealList, "optional vector-spin temperatures"},
        {"q", "0", VT::Real, "off-diagonal overlap constraint for the vector-spin model"}}},
      {Command::Denoise,
       "Mutual information and MMSE of spiked denoising",
       {{"theta", "1", VT::RealList, "spike strengths"},
        {"gamma-grid", "0.1:4:0.1", VT::RealList, "signal-to-noise grid"},
        {"step", "1e-4", VT::Real, "finite-difference step for mmse_fd"}}},
  };
  return all;
}

const CommandSchema& schema_for(Command c) {
  for (const auto& s : schemas())
    if (s.command == c) return s;
  throw std::logic_error("schema_for: missing schema");
}

std::string serialize(const RunConfig& config) {
  std::ostringstream out;
  out << "command = " << command_name(config.command) << "\n";
  out << "seed = " << config.seed << "\n";
  out << "format = " << format_name(config.format) << "\n";
  out << "output = " << config.output_path << "\n";
  for (const auto& [k, v] : config.params) out << k << " = " << v << "\n";
  return out.str();
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::pair<std::string, int>> raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", lineno);
    if (raw.count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
    raw[key] = {trim(t.substr(eq + 1)), lineno};
  }
  auto it = raw.find("command");
  if (it == raw.end()) throw ConfigError("missing 'command'");
  const auto cmd = parse_command(it->second.first);
  if (!cmd) throw ConfigError("unknown command '" + it->second.first + "'", it->second.second);
  c.command = *cmd;
  if (auto s = raw.find("seed"); s != raw.end()) c.seed = parse_seed(s->second.first, s->second.second);
  if (auto f = raw.find("format"); f != raw.end()) c.format = parse_format(f->second.first, f->second.second);
  if (auto o = raw.find("output"); o != raw.end()) c.output_path = o->second.first;

  const CommandSchema& schema = schema_for(c.command);
  for (const auto& [key, entry] : raw) {
    if (std::find(kReserved.begin(), kReserved.end(), key) != kReserved.end()) continue;
    const OptionSpec* o = find_option(schema, key);
    if (!o) throw ConfigError("unknown parameter '" + key + "' for " + command_name(c.command), entry.second);
    check_value(*o, entry.first, entry.second);
    c.params[key] = entry.first;
  }
  return c;
}

void validate(const RunConfig& config) {
  const CommandSchema& schema = schema_for(config.command);
  for (const auto& [key, value] : config.params) {
    const OptionSpec* o = find_option(schema, key);
    if (!o) throw ConfigError("unknown parameter '" + key + "' for " + command_name(config.command));
    check_value(*o, value, 0);
  }
}

std::string param(const RunConfig& config, const std::string& key) {
  if (auto it = config.params.find(key); it != config.params.end()) return it->second;
  const OptionSpec* o = find_option(schema_for(config.command), key);
  if (!o) throw ConfigError("unknown parameter '" + key + "'");
  return o->default_value;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty list entry");
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_real(item, "list"));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("grid must be a:b:step");
    const double a = parse_real(item.substr(0, c1), "grid");
    const double b = parse_real(item.substr(c1 + 1, c2 - c1 - 1), "grid");
    const double step = parse_real(item.substr(c2 + 1), "grid");
    if (!(step > 0.0) || b < a) throw std::invalid_argument("grid needs step > 0 and b >= a");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 1000000) throw std::invalid_argument("grid too large");
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
  }
  return out;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string emit_plot_data(const Table& table, std::span<const std::string> columns) {
  if (table.rows.empty()) throw std::invalid_argument("emit_plot_data: empty table");
  if (columns.empty()) throw std::invalid_argument("emit_plot_data: no columns requested");
  std::vector<std::size_t> idx;
  for (const auto& name : columns) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), name);
    if (it == table.columns.end()) throw std::invalid_argument("emit_plot_data: unknown column '" + name + "'");
    idx.push_back(static_cast<std::size_t>(it - table.columns.begin()));
  }
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) out += (j ? "," : "") + columns[j];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < idx.size(); ++j) out += (j ? "," : "") + format_real(row.at(idx[j]));
    out += "\n";
  }
  return out;
}

RunResult run(const RunConfig& config) {
  RunResult res;
  try {
    validate(config);
    const Outcome o = dispatch(config);
    const json echo = config_echo(config);
    if (config.format == Format::Json) {
      json doc = {{"version", kVersion}, {"config", echo}, {"result", o.extra}};
      if (!o.table.rows.empty()) doc["result"]["table"] = table_json(o.table);
      res.output = doc.dump(2) + "\n";
    } else {
      res.output = std::string("# sphint ") + kVersion + "\n# config " + echo.dump() + "\n";
      // Scalar results that do not fit the table travel as header lines.
      for (const auto& [key, value] : o.extra.items()) res.output += "# " + key + " = " + value.dump() + "\n";
      if (!o.table.rows.empty()) res.output += emit_plot_data(o.table, o.table.columns);
    }
    if (o.check_failed) {
      res.exit_code = kCheckFailure;
      res.error = command_name(config.command) + ": check failed: " + o.failure;
    }
  } catch (const ConfigError& e) {
    res.exit_code = kConfigError;
    res.error = std::string("config error: ") + e.what();
  } catch (const std::invalid_argument& e) {
    res.exit_code = kConfigError;
    res.error = std::string("invalid input: ") + e.what();
  } catch (const std::exception& e) {
    res.exit_code = kNumericalFailure;
    res.error = "numerical failure in " + command_name(config.command) + ": " + e.what();
  }
  return res;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Spherical integrals: asymptotic formulas and Monte-Carlo checks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Sub {
    Command command;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> opts;
    std::string config_path, seed, output, format;
    CLI::Option *seed_opt, *output_opt, *format_opt;
  };
  std::vector<Sub> subs(schemas().size());
  for (std::size_t i = 0; i < schemas().size(); ++i) {
    const auto& s = schemas()[i];
    Sub& sub = subs[i];
    sub.command = s.command;
    sub.app = app.add_subcommand(command_name(s.command), s.help);
    for (const auto& o : s.options)
      sub.opts[o.key] = sub.app->add_option("--" + o.key, sub.values[o.key], o.help + " [default: " + o.default_value + "]");
    sub.app->add_option("--config", sub.config_path, "INI config file; flags override its values");
    sub.seed_opt = sub.app->add_option("--seed", sub.seed, "RNG seed (env SPHINT_SEED)");
    sub.output_opt = sub.app->add_option("--output", sub.output, "output file (default stdout)");
    sub.format_opt = sub.app->add_option("--format", sub.format, "json or csv");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    for (auto& sub : subs) {
      if (!sub.app->parsed()) continue;
      RunConfig config;
      config.command = sub.command;
      if (!sub.config_path.empty()) {
        config = parse_config(read_file(sub.config_path));
        if (config.command != sub.command)
          throw ConfigError("config file is for '" + command_name(config.command) + "', not '" +
                            command_name(sub.command) + "'");
      }
      if (const char* env = std::getenv("SPHINT_SEED")) config.seed = parse_seed(env);
      if (sub.seed_opt->count()) config.seed = parse_seed(sub.seed);
      if (sub.output_opt->count()) config.output_path = sub.output;
      if (sub.format_opt->count()) config.format = parse_format(sub.format);
      for (const auto& [key, opt] : sub.opts)
        if (opt->count()) config.params[key] = sub.values[key];

      const RunResult r = run(config);
      if (!r.output.empty()) {
        if (config.output_path.empty()) {
          std::cout << r.output;
        } else {
          std::ofstream out(config.output_path, std::ios::binary);
          if (!out) {
            std::cerr << "cannot write '" << config.output_path << "'\n";
            return kConfigError;
          }
          out << r.output;
        }
      }
      if (!r.error.empty()) std::cerr << r.error << "\n";
      return r.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace sphint::cli
