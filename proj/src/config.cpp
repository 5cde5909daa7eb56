#include "patchr0/config.hpp"

#include "patchr0/asymptotics.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace patchr0 {

const char* to_string(Command c) {
  switch (c) {
    case Command::kReduce:
      return "reduce";
    case Command::kEig:
      return "eig";
    case Command::kR0:
      return "r0";
    case Command::kSweep:
      return "sweep";
    case Command::kReproduceFigure1:
      return "reproduce-figure1";
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (auto c : {Command::kReduce, Command::kEig, Command::kR0, Command::kSweep,
                 Command::kReproduceFigure1}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

const char* to_string(ConfigErrorCode code) {
  switch (code) {
    case ConfigErrorCode::kIo:
      return "E_IO";
    case ConfigErrorCode::kSyntax:
      return "E_SYNTAX";
    case ConfigErrorCode::kSchema:
      return "E_SCHEMA";
    case ConfigErrorCode::kH1:
      return "E_H1";
    case ConfigErrorCode::kNegativeRate:
      return "E_NEGATIVE_RATE";
    case ConfigErrorCode::kH2:
      return "E_H2";
  }
  return "E_UNKNOWN";
}

namespace {

std::string anchored(ConfigErrorCode code, const std::string& source, std::uint32_t line,
                     const std::string& message) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ':' << line;
  os << ": [" << to_string(code) << "] " << message;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(ConfigErrorCode code, const std::string& source, std::uint32_t line,
                         const std::string& message)
    : PreconditionError(anchored(code, source, line, message)), code_(code), line_(line) {}

std::vector<double> GridSpec::resolve() const {
  std::vector<double> grid = values;
  if (grid.empty()) {
    grid = points == 1 ? std::vector<double>{min} : geometric_grid(min, max, points);
    grid.insert(grid.end(), anchors.begin(), anchors.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Reads typed values out of a parsed document, raising line-anchored
// ConfigErrors.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(ConfigErrorCode code, const toml::node* node,
                         const std::string& message) const {
    const std::uint32_t line = node ? node->source().begin.line : 0;
    throw ConfigError(code, source_, line, message);
  }

  const toml::node& require(const toml::table& t, const char* key) const {
    const toml::node* n = t.get(key);
    if (!n) fail(ConfigErrorCode::kSchema, &t, std::string("missing key '") + key + "'");
    return *n;
  }

  double number(const toml::node& n, const std::string& what) const {
    if (auto v = n.value<double>(); v && (n.is_integer() || n.is_floating_point())) return *v;
    fail(ConfigErrorCode::kSchema, &n, what + " must be a number");
  }

  double positive(const toml::node& n, const std::string& what) const {
    const double v = number(n, what);
    if (!(v > 0.0)) fail(ConfigErrorCode::kNegativeRate, &n, what + " must be positive");
    return v;
  }

  std::vector<double> numbers(const toml::node& n, const std::string& what) const {
    const auto* arr = n.as_array();
    if (!arr) fail(ConfigErrorCode::kSchema, &n, what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *arr) out.push_back(number(e, what));
    return out;
  }

  Matrix matrix(const toml::node& n, const std::string& what) const {
    const auto* rows = n.as_array();
    if (!rows || rows->empty()) fail(ConfigErrorCode::kSchema, &n, what + " must be a square array of arrays");
    const auto size = rows->size();
    Matrix m(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    for (std::size_t i = 0; i < size; ++i) {
      const auto row = numbers((*rows)[i], what);
      if (row.size() != size) fail(ConfigErrorCode::kSchema, &(*rows)[i], what + " must be square");
      for (std::size_t j = 0; j < size; ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
      }
    }
    return m;
  }

  FourierSeries series(const toml::node& n, const std::string& what) const {
    if (n.is_integer() || n.is_floating_point()) return FourierSeries::constant(number(n, what));
    const auto* t = n.as_table();
    if (!t) fail(ConfigErrorCode::kSchema, &n, what + " must be a number or a {c0, cos, sin} table");
    FourierSeries f;
    for (const auto& [key, value] : *t) {
      if (key == "c0") {
        f.c0 = number(value, what + ".c0");
      } else if (key == "cos") {
        f.cos = numbers(value, what + ".cos");
      } else if (key == "sin") {
        f.sin = numbers(value, what + ".sin");
      } else {
        fail(ConfigErrorCode::kSchema, &value,
             what + ": unknown Fourier key '" + std::string(key.str()) + "'");
      }
    }
    return f;
  }

  // A number / series broadcast to every patch, or an array with one entry
  // per patch.
  std::vector<FourierSeries> patch_series(const toml::node& n, std::size_t patches,
                                          const std::string& what) const {
    if (const auto* arr = n.as_array()) {
      if (arr->size() != patches) {
        fail(ConfigErrorCode::kSchema, &n, what + " needs one entry per patch");
      }
      std::vector<FourierSeries> out;
      for (const auto& e : *arr) out.push_back(series(e, what));
      return out;
    }
    return std::vector<FourierSeries>(patches, series(n, what));
  }

  std::vector<double> patch_values(const toml::node& n, std::size_t patches,
                                   const std::string& what) const {
    std::vector<double> out;
    if (n.as_array()) {
      out = numbers(n, what);
      if (out.size() != patches) fail(ConfigErrorCode::kSchema, &n, what + " needs one entry per patch");
    } else {
      out.assign(patches, number(n, what));
    }
    for (double v : out) {
      if (!(v > 0.0)) fail(ConfigErrorCode::kNegativeRate, &n, what + " must be positive");
    }
    return out;
  }

  PeriodicMatrixFn series_matrix(const toml::node& n, double period, std::size_t size,
                                 const std::string& what) const {
    const auto* rows = n.as_array();
    if (!rows || rows->size() != size) {
      fail(ConfigErrorCode::kSchema, &n, what + " must be a " + std::to_string(size) + "x" +
                                             std::to_string(size) + " array");
    }
    std::vector<std::vector<FourierSeries>> entries;
    for (const auto& row_node : *rows) {
      const auto* row = row_node.as_array();
      if (!row || row->size() != size) fail(ConfigErrorCode::kSchema, &row_node, what + " must be square");
      auto& out = entries.emplace_back();
      for (const auto& e : *row) out.push_back(series(e, what));
    }
    return PeriodicMatrixFn::from_entries(period, entries);
  }

  ConnectivityMatrix connectivity(const toml::node& n, const std::string& what) const {
    Matrix m = matrix(n, what);
    try {
      return ConnectivityMatrix(std::move(m));
    } catch (const HypothesisError& e) {
      fail(ConfigErrorCode::kH1, &n, e.what());
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

RossMacdonaldParams read_ross_macdonald(const Reader& r, const toml::table& t) {
  RossMacdonaldParams p;
  const auto& patches_node = r.require(t, "patches");
  const double patches = r.number(patches_node, "patches");
  if (!(patches >= 1.0) || patches != static_cast<double>(static_cast<std::size_t>(patches))) {
    r.fail(ConfigErrorCode::kSchema, &patches_node, "patches must be a positive integer");
  }
  p.patches = static_cast<std::size_t>(patches);
  p.period = r.positive(r.require(t, "period"), "period");
  p.total_humans = r.positive(r.require(t, "total_humans"), "total_humans");
  const auto& mig = r.require(t, "migration");
  p.migration = r.connectivity(mig, "migration").matrix();
  if (static_cast<std::size_t>(p.migration.rows()) != p.patches) {
    r.fail(ConfigErrorCode::kSchema, &mig, "migration must be patches x patches");
  }
  p.sigma1 = r.patch_values(r.require(t, "sigma1"), p.patches, "sigma1");
  p.sigma2 = r.patch_values(r.require(t, "sigma2"), p.patches, "sigma2");
  p.gamma = r.patch_values(r.require(t, "gamma"), p.patches, "gamma");

  auto positive_series = [&](const char* key) {
    const auto& node = r.require(t, key);
    auto s = r.patch_series(node, p.patches, key);
    for (const auto& f : s) {
      if (!(f.min_on_grid(p.period) > 0.0)) {
        r.fail(ConfigErrorCode::kNegativeRate, &node, std::string(key) + " must stay positive");
      }
    }
    return s;
  };
  p.mortality = positive_series("mortality");
  p.recruitment = positive_series("recruitment");
  const bool has_factor = t.contains("biting_factor");
  if (has_factor == t.contains("biting")) {
    r.fail(ConfigErrorCode::kSchema, &t, "give exactly one of 'biting' or 'biting_factor'");
  }
  if (has_factor) {
    const double factor = r.positive(*t.get("biting_factor"), "biting_factor");
    for (const auto& eps : p.recruitment) p.biting.push_back(eps * factor);
  } else {
    p.biting = positive_series("biting");
  }
  return p;
}

void read_run(const Reader& r, const toml::table& t, RunConfig& run) {
  for (const auto& [key, value] : t) {
    const std::string k(key.str());
    if (k == "d") {
      run.d = r.number(value, "run.d");
      if (!(*run.d >= 0.0)) r.fail(ConfigErrorCode::kNegativeRate, &value, "run.d must be nonnegative");
    } else if (k == "steps_per_period") {
      const double s = r.number(value, "run.steps_per_period");
      if (!(s >= kMinStepsPerPeriod) || s != static_cast<double>(static_cast<int>(s))) {
        r.fail(ConfigErrorCode::kSchema, &value, "run.steps_per_period must be an integer >= 16");
      }
      run.solver.steps_per_period = static_cast<int>(s);
    } else if (k == "integrator") {
      const auto name = value.value<std::string>();
      if (name == "rk4") {
        run.solver.integrator = Integrator::kRk4;
      } else if (name == "magnus4") {
        run.solver.integrator = Integrator::kMagnus4;
      } else if (name == "auto") {
        run.solver.integrator = Integrator::kAuto;
      } else {
        r.fail(ConfigErrorCode::kSchema, &value, "run.integrator must be rk4, magnus4 or auto");
      }
    } else if (k == "r0_tolerance") {
      run.r0_tolerance = r.positive(value, "run.r0_tolerance");
    } else if (k == "threads") {
      run.threads = static_cast<unsigned>(std::max(0.0, r.number(value, "run.threads")));
    } else if (k == "grid") {
      const auto* g = value.as_table();
      if (!g) r.fail(ConfigErrorCode::kSchema, &value, "run.grid must be a table");
      GridSpec spec;
      if (const auto* v = g->get("values")) spec.values = r.numbers(*v, "run.grid.values");
      if (const auto* v = g->get("min")) spec.min = r.positive(*v, "run.grid.min");
      if (const auto* v = g->get("max")) spec.max = r.positive(*v, "run.grid.max");
      if (const auto* v = g->get("points")) spec.points = static_cast<std::size_t>(r.positive(*v, "run.grid.points"));
      if (const auto* v = g->get("anchors")) spec.anchors = r.numbers(*v, "run.grid.anchors");
      for (double x : spec.values) {
        if (!(x > 0.0)) r.fail(ConfigErrorCode::kNegativeRate, &value, "grid values must be positive");
      }
      run.grid = spec;
    } else {
      r.fail(ConfigErrorCode::kSchema, &value, "unknown [run] key '" + k + "'");
    }
  }
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text, const std::string& source_name) {
  Reader r(source_name);
  toml::table doc;
  try {
    doc = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    throw ConfigError(ConfigErrorCode::kSyntax, source_name, e.source().begin.line,
                      std::string(e.description()));
  }

  ParsedConfig out;
  out.content_hash = fnv1a_hex(text);
  const auto* model_node = doc.get("model");
  if (!model_node || !model_node->is_table()) {
    throw ConfigError(ConfigErrorCode::kSchema, source_name, 0, "missing [model] table");
  }
  const auto& model = *model_node->as_table();
  const auto& type_node = r.require(model, "type");
  const auto type = type_node.value<std::string>();
  if (!type) r.fail(ConfigErrorCode::kSchema, &type_node, "model.type must be a string");

  static const std::map<std::string, std::set<std::string>> kModelKeys{
      {"ross_macdonald",
       {"type", "patches", "period", "total_humans", "migration", "sigma1", "sigma2", "gamma",
        "mortality", "recruitment", "biting", "biting_factor"}},
      {"sis", {"type", "beta", "gamma", "connectivity", "period"}},
      {"generic", {"type", "period", "connectivity", "removal", "infection"}}};
  if (const auto known = kModelKeys.find(*type); known != kModelKeys.end()) {
    for (const auto& [key, value] : model) {
      if (!known->second.count(std::string(key.str()))) {
        r.fail(ConfigErrorCode::kSchema, &value,
               "unknown key '" + std::string(key.str()) + "' for model type " + *type);
      }
    }
  }

  try {
    if (*type == "ross_macdonald") {
      out.model.kind = ModelKind::kRossMacdonald;
      out.model.ross_macdonald = read_ross_macdonald(r, model);
      out.model.problem = build_ross_macdonald(*out.model.ross_macdonald, 0.0);
    } else if (*type == "sis") {
      out.model.kind = ModelKind::kSis;
      const auto& beta_node = r.require(model, "beta");
      const auto beta = r.numbers(beta_node, "beta");
      for (double b : beta) {
        if (b < 0.0) r.fail(ConfigErrorCode::kNegativeRate, &beta_node, "beta must be nonnegative");
      }
      const auto& gamma_node = r.require(model, "gamma");
      const auto gamma = r.numbers(gamma_node, "gamma");
      for (double g : gamma) {
        if (!(g > 0.0)) r.fail(ConfigErrorCode::kNegativeRate, &gamma_node, "gamma must be positive");
      }
      const auto l = r.connectivity(r.require(model, "connectivity"), "connectivity");
      if (beta.size() != l.size() || gamma.size() != l.size()) {
        r.fail(ConfigErrorCode::kSchema, &beta_node, "beta and gamma need one entry per patch");
      }
      const double period =
          model.contains("period") ? r.positive(*model.get("period"), "period") : 1.0;
      out.model.problem = build_sis_autonomous(beta, gamma, l, 0.0, period);
    } else if (*type == "generic") {
      out.model.kind = ModelKind::kGeneric;
      const double period = r.positive(r.require(model, "period"), "period");
      const auto l = r.connectivity(r.require(model, "connectivity"), "connectivity");
      const auto& v_node = r.require(model, "removal");
      const auto& f_node = r.require(model, "infection");
      auto v = r.series_matrix(v_node, period, l.size(), "removal");
      auto f = r.series_matrix(f_node, period, l.size(), "infection");
      if (!f.nonnegative_on_grid()) {
        r.fail(ConfigErrorCode::kH2, &f_node, "infection matrix F(t) must be nonnegative");
      }
      if (!(v * -1.0).cooperative_on_grid()) {
        r.fail(ConfigErrorCode::kH2, &v_node, "removal matrix V(t) must have nonpositive off-diagonals");
      }
      out.model.problem = PeriodicVFProblem(l, std::move(v), std::move(f), 0.0);
    } else {
      r.fail(ConfigErrorCode::kSchema, &type_node,
             "model.type must be ross_macdonald, sis or generic");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const HypothesisError& e) {
    const auto code = e.hypothesis() == "H1" ? ConfigErrorCode::kH1 : ConfigErrorCode::kH2;
    throw ConfigError(code, source_name, model_node->source().begin.line, e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(ConfigErrorCode::kSchema, source_name, model_node->source().begin.line,
                      e.what());
  }

  if (const auto* run = doc.get("run")) {
    if (!run->is_table()) r.fail(ConfigErrorCode::kSchema, run, "[run] must be a table");
    read_run(r, *run->as_table(), out.run);
  }
  for (const auto& [key, value] : doc) {
    if (key != "model" && key != "run") {
      r.fail(ConfigErrorCode::kSchema, &value, "unknown top-level key '" + std::string(key.str()) + "'");
    }
  }
  return out;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrorCode::kIo, path, 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto parsed = parse_config_text(buf.str(), path);
  parsed.run.model_source = path;
  return parsed;
}

}  // namespace patchr0
