#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fdsim/error.hpp"
#include "fdsim/runner.hpp"

namespace fdsim {

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& item : j.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return item.key() == k; })) {
      throw ConfigError(std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Json model_json(const ModelSpec& m) {
  Json couplings = Json::object();
  for (const auto& [k, v] : m.couplings) couplings[k] = v;
  return Json{{"name", m.name},
              {"n", m.n},
              {"boundary", to_string(m.boundary)},
              {"couplings", couplings}};
}

Json optimizer_json(const OptimizerOptions& o) {
  return Json{{"grad", to_string(o.grad_mode)},
              {"fd_step", o.fd_step},
              {"tol_grad_inf", o.tol_grad_inf},
              {"max_iters", o.max_iters},
              {"line_search", to_string(o.line_search)},
              {"armijo_c1", o.armijo_c1},
              {"backtrack_rho", o.backtrack_rho},
              {"wolfe_c2", o.wolfe_c2},
              {"seed", o.seed},
              {"init_scale", o.init_scale},
              {"multi_start", o.multi_start},
              {"max_step", o.max_step}};
}

OptimizerOptions optimizer_from_json(const Json& j, OptimizerOptions o) {
  reject_unknown(j,
                 {"grad", "fd_step", "tol_grad_inf", "max_iters", "line_search", "armijo_c1",
                  "backtrack_rho", "wolfe_c2", "seed", "init_scale", "multi_start", "max_step"},
                 "optimizer");
  std::string s;
  if (j.contains("grad")) {
    read(j, "grad", s);
    o.grad_mode = grad_mode_from_string(s);
  }
  if (j.contains("line_search")) {
    read(j, "line_search", s);
    o.line_search = line_search_from_string(s);
  }
  read(j, "fd_step", o.fd_step);
  read(j, "tol_grad_inf", o.tol_grad_inf);
  read(j, "max_iters", o.max_iters);
  read(j, "armijo_c1", o.armijo_c1);
  read(j, "backtrack_rho", o.backtrack_rho);
  read(j, "wolfe_c2", o.wolfe_c2);
  read(j, "seed", o.seed);
  read(j, "init_scale", o.init_scale);
  read(j, "multi_start", o.multi_start);
  read(j, "max_step", o.max_step);
  return o;
}

Json hashed_part(const RunConfig& c) {
  Json j = to_json(c);
  j.erase("output_dir");
  j.erase("formats");
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  if (order < 1 || order > kMaxOrder) {
    throw ConfigError("order must be in 1..4 (got " + std::to_string(order) + ")");
  }
  optimizer.validate();
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (t_points < 2) throw ConfigError("t_points must be >= 2");
  if (!(table_t >= 0.0 && table_t <= t_max)) throw ConfigError("table_t must lie in [0, t_max]");
  for (const auto& f : formats) {
    if (f != "csv" && f != "json" && f != "svg") {
      throw ConfigError("unknown format '" + f + "' (expected csv|json|svg)");
    }
  }
  for (const auto& [label, c] : extra_terms) {
    if (static_cast<int>(label.size()) != model.n) {
      throw ConfigError("extra term '" + label + "' does not have " + std::to_string(model.n) +
                        " sites");
    }
  }
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

Json to_json(const RunConfig& c) {
  Json extra = Json::array();
  for (const auto& [label, coeff] : c.extra_terms) extra.push_back({{"label", label}, {"coeff", coeff}});
  return Json{{"model", model_json(c.model)},
              {"extra_terms", extra},
              {"order", c.order},
              {"coefficients", to_string(c.coefficients)},
              {"optimizer", optimizer_json(c.optimizer)},
              {"t_max", c.t_max},
              {"t_points", c.t_points},
              {"table_t", c.table_t},
              {"output_dir", c.output_dir},
              {"formats", c.formats}};
}

RunConfig config_from_json(const Json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j,
                 {"model", "extra_terms", "order", "coefficients", "optimizer", "t_max", "t_points",
                  "table_t", "output_dir", "formats"},
                 "configuration");
  if (j.contains("model")) {
    const Json& m = j.at("model");
    if (!m.is_object()) throw ConfigError("'model' must be an object");
    reject_unknown(m, {"name", "n", "boundary", "couplings"}, "model");
    read(m, "name", c.model.name);
    read(m, "n", c.model.n);
    if (m.contains("boundary")) {
      std::string b;
      read(m, "boundary", b);
      c.model.boundary = boundary_from_string(b);
    }
    if (m.contains("couplings")) {
      c.model.couplings.clear();
      for (const auto& item : m.at("couplings").items()) {
        if (item.value().is_number()) {
          c.model.couplings[item.key()] = {item.value().get<double>()};
        } else {
          try {
            c.model.couplings[item.key()] = item.value().get<std::vector<double>>();
          } catch (const nlohmann::json::exception&) {
            throw ConfigError("coupling '" + item.key() + "' must be a number or a list");
          }
        }
      }
    }
  }
  if (j.contains("extra_terms")) {
    c.extra_terms.clear();
    for (const auto& t : j.at("extra_terms")) {
      std::string label;
      double coeff = 1.0;
      read(t, "label", label);
      read(t, "coeff", coeff);
      c.extra_terms.emplace_back(label, coeff);
    }
  }
  read(j, "order", c.order);
  if (j.contains("coefficients")) {
    std::string s;
    read(j, "coefficients", s);
    c.coefficients = coefficient_convention_from_string(s);
  }
  if (j.contains("optimizer")) c.optimizer = optimizer_from_json(j.at("optimizer"), c.optimizer);
  read(j, "t_max", c.t_max);
  read(j, "t_points", c.t_points);
  read(j, "table_t", c.table_t);
  read(j, "output_dir", c.output_dir);
  read(j, "formats", c.formats);
  return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j, std::move(base));
}

std::string config_hash(const RunConfig& c) {
  const std::string text = hashed_part(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AlgebraElement build_hamiltonian(const RunConfig& c) {
  AlgebraElement h = build_model(c.model);
  if (c.extra_terms.empty()) return h;
  return h + AlgebraElement::from_labels(c.extra_terms);
}

Json to_json(const RunRecord& r) {
  Json j;
  j["version"] = r.version;
  j["config"] = to_json(r.config);
  j["config_hash"] = r.config_hash;
  j["algebra"] = {{"n", r.n},
                  {"dla_dim", r.dla_dim},
                  {"k_dim", r.k_dim},
                  {"m_dim", r.m_dim},
                  {"h_dim", r.h_dim},
                  {"mtilde_dim", r.mtilde_dim},
                  {"k_basis", r.k_basis},
                  {"h_basis", r.h_basis}};
  j["ansatz"] = {{"parameters", r.parameter_count},
                 {"rotations", r.rotation_count},
                 {"factors",
                  {{"linear", r.factor_counts.linear},
                   {"pair", r.factor_counts.pair},
                   {"triple", r.factor_counts.triple},
                   {"quad", r.factor_counts.quad}}}};
  if (r.optimized) {
    Json trace = Json::array();
    for (const auto& t : r.cost_trace) trace.push_back({t.iteration, t.cost, t.grad_inf});
    Json h0 = Json::array();
    for (const auto& [label, c] : r.h0) h0.push_back({{"label", label}, {"coeff", c}});
    j["optimization"] = {{"theta_star", r.theta_star},
                         {"cost_trace", trace},
                         {"converged", r.converged},
                         {"iterations", r.iterations},
                         {"status", r.status},
                         {"final_cost", r.final_cost},
                         {"normalized_cost", r.normalized_cost},
                         {"seed_used", r.seed_used},
                         {"h0", h0},
                         {"residual_fro", r.residual_fro},
                         {"h_fro", r.h_fro}};
  } else {
    j["optimization"] = nullptr;
  }
  Json curve = Json::array();
  for (const auto& row : r.error_curve) curve.push_back({row.t, row.err});
  j["error_curve"] = curve;
  j["error_at_table_t"] = r.error_at_table_t ? Json(*r.error_at_table_t) : Json(nullptr);
  j["timings_ms"] = r.timings_ms;
  j["artifacts"] = r.artifacts;
  if (r.error) {
    j["error"] = {{"stage", r.error->stage}, {"kind", r.error->kind}, {"message", r.error->message}};
  } else {
    j["error"] = nullptr;
  }
  return j;
}

RunRecord record_from_json(const Json& j) {
  try {
    RunRecord r;
    r.version = j.at("version").get<std::string>();
    if (r.version != kRecordVersion) throw ConfigError("unsupported record version " + r.version);
    r.config = config_from_json(j.at("config"));
    r.config_hash = j.at("config_hash").get<std::string>();
    const Json& a = j.at("algebra");
    r.n = a.at("n").get<int>();
    r.dla_dim = a.at("dla_dim").get<std::size_t>();
    r.k_dim = a.at("k_dim").get<std::size_t>();
    r.m_dim = a.at("m_dim").get<std::size_t>();
    r.h_dim = a.at("h_dim").get<std::size_t>();
    r.mtilde_dim = a.at("mtilde_dim").get<std::size_t>();
    r.k_basis = a.at("k_basis").get<std::vector<std::string>>();
    r.h_basis = a.at("h_basis").get<std::vector<std::string>>();
    const Json& an = j.at("ansatz");
    r.parameter_count = an.at("parameters").get<std::size_t>();
    r.rotation_count = an.at("rotations").get<std::size_t>();
    const Json& f = an.at("factors");
    r.factor_counts = {f.at("linear").get<std::size_t>(), f.at("pair").get<std::size_t>(),
                       f.at("triple").get<std::size_t>(), f.at("quad").get<std::size_t>()};
    const Json& o = j.at("optimization");
    r.optimized = !o.is_null();
    if (r.optimized) {
      r.theta_star = o.at("theta_star").get<std::vector<double>>();
      for (const auto& row : o.at("cost_trace")) {
        r.cost_trace.push_back({row.at(0).get<int>(), row.at(1).get<double>(), row.at(2).get<double>()});
      }
      r.converged = o.at("converged").get<bool>();
      r.iterations = o.at("iterations").get<int>();
      r.status = o.at("status").get<std::string>();
      r.final_cost = o.at("final_cost").get<double>();
      r.normalized_cost = o.at("normalized_cost").get<double>();
      r.seed_used = o.at("seed_used").get<std::uint64_t>();
      for (const auto& t : o.at("h0")) {
        r.h0.emplace_back(t.at("label").get<std::string>(), t.at("coeff").get<double>());
      }
      r.residual_fro = o.at("residual_fro").get<double>();
      r.h_fro = o.at("h_fro").get<double>();
    }
    for (const auto& row : j.at("error_curve")) {
      r.error_curve.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    }
    if (!j.at("error_at_table_t").is_null()) r.error_at_table_t = j.at("error_at_table_t").get<double>();
    r.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
    r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    if (!j.at("error").is_null()) {
      const Json& e = j.at("error");
      r.error = StageError{e.at("stage").get<std::string>(), e.at("kind").get<std::string>(),
                           e.at("message").get<std::string>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run record: ") + e.what());
  }
}

std::string error_curve_csv(const ErrorCurve& curve) {
  std::ostringstream out;
  out << "t,error\n";
  for (const auto& row : curve) out << fmt(row.t) << ',' << fmt(row.err) << '\n';
  return out.str();
}

std::string cost_trace_csv(const CostTraceSeries& s) {
  std::ostringstream out;
  out << "iteration,cost,normalized_cost,grad_inf_norm\n";
  const auto& trace = s.record.cost_trace;
  if (s.normalized.size() != trace.size()) {
    throw ArgumentError("cost_trace_csv: normalized series length differs from the trace");
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace[i].iteration << ',' << fmt(trace[i].cost) << ',' << fmt(s.normalized[i]) << ','
        << fmt(trace[i].grad_inf) << '\n';
  }
  return out.str();
}

std::string benchmark_csv(const BenchmarkTable& table) {
  std::ostringstream out;
  out << "model,order,n,error_at_t,converged,residual,dla_dim,iters,wall_ms\n";
  for (const auto& c : table.cells) {
    const RunRecord& r = c.record;
    out << c.model << ',' << c.order << ',' << c.n << ',';
    if (r.ok() && r.error_at_table_t) {
      out << fmt(*r.error_at_table_t);
    } else {
      out << "failed(" << (r.error ? r.error->stage : "evaluate") << ')';
    }
    out << ',' << (r.converged ? "true" : "false") << ',' << fmt(r.residual_fro) << ','
        << r.dla_dim << ',' << r.iterations << ',' << fmt(c.wall_ms) << '\n';
  }
  return out.str();
}

std::string slope_csv(const ScalingReport& r) {
  std::ostringstream out;
  out << "order,slope,intercept,points,saturated\n";
  for (const auto& s : r.slopes) {
    out << s.order << ',';
    if (s.saturated) {
      out << ",,";
    } else {
      out << fmt(s.slope) << ',' << fmt(s.intercept) << ',';
    }
    out << s.points << ',' << (s.saturated ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string trotter_csv(const ScalingReport& r) {
  std::ostringstream out;
  out << "m,err_uncorrected,err_corrected\n";
  const auto& t = r.trotter;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    out << t.steps[i] << ',' << fmt(t.err_uncorrected[i]) << ',' << fmt(t.err_corrected[i]) << '\n';
  }
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ResourceError("write failed for '" + path + "'");
}

}  // namespace fdsim
