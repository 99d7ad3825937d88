#include "fdsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

#include "fdsim/error.hpp"
#include "fdsim/lie.hpp"

namespace fdsim {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Runs one pipeline stage, timing it and turning a failure into record.error.
template <typename Fn>
bool stage(RunRecord& r, const char* name, Fn&& fn) {
  const auto t0 = Clock::now();
  try {
    fn();
  } catch (const Error& e) {
    r.error = StageError{name, to_string(e.kind()), e.what()};
  } catch (const std::exception& e) {
    r.error = StageError{name, "internal", e.what()};
  }
  r.timings_ms[name] += ms_since(t0);
  return r.ok();
}

std::vector<std::string> labels(const std::vector<PauliString>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(p.label());
  return out;
}

std::vector<PauliString> parse_all(const std::vector<std::string>& v) {
  std::vector<PauliString> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(PauliString::parse(s));
  return out;
}

// Everything needed to re-evaluate a stored record.
struct Rebuilt {
  AlgebraElement h;
  Ansatz ansatz;
  std::vector<PauliString> h_basis;
  AlgebraElement h0;
};

Rebuilt rebuild(const RunRecord& r) {
  if (!r.optimized) throw ContractError("record has no optimization result");
  AlgebraElement h = build_hamiltonian(r.config);
  Ansatz ansatz = build_ansatz(parse_all(r.k_basis), r.config.order, r.config.coefficients);
  AlgebraElement h0 =
      r.h0.empty() ? AlgebraElement(h.num_qubits()) : AlgebraElement::from_labels(r.h0);
  return Rebuilt{std::move(h), std::move(ansatz), parse_all(r.h_basis), std::move(h0)};
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunRecord run_decompose(const RunConfig& config) {
  RunRecord r;
  r.config = config;
  r.config_hash = config_hash(config);
  const auto t0 = Clock::now();

  AlgebraElement h;
  DlaBasis dla;
  InvolutionSplit inv;
  SubalgebraSplit sub;
  std::optional<Ansatz> ansatz;
  std::optional<TargetV> v;

  const bool ok =
      stage(r, "validate_config", [&] { config.validate(); }) &&
      stage(r, "build_model", [&] {
        h = build_hamiltonian(config);
        r.n = h.num_qubits();
        r.h_fro = fro_norm(h);
      }) &&
      stage(r, "generate_dla", [&] {
        const auto terms = h.support();
        if (terms.empty()) throw StructuralError("Hamiltonian has no terms");
        dla = generate_dla(terms);
        r.dla_dim = dla.dimension();
      }) &&
      stage(r, "involution_split", [&] {
        inv = involution_split(dla);
        r.k_dim = inv.k.size();
        r.m_dim = inv.m.size();
        r.k_basis = labels(inv.k);
      }) &&
      stage(r, "check_hamiltonian_in_m", [&] { check_hamiltonian_in_m(h); }) &&
      stage(r, "cartan_subalgebra", [&] {
        sub = cartan_subalgebra(inv.m, h.support());
        r.h_dim = sub.h.size();
        r.mtilde_dim = sub.mtilde.size();
        r.h_basis = labels(sub.h);
      }) &&
      stage(r, "build_ansatz", [&] {
        ansatz.emplace(build_ansatz(inv.k, config.order, config.coefficients));
        r.factor_counts = ansatz->block_counts();
        r.parameter_count = ansatz->parameter_count();
        r.rotation_count = ansatz->rotation_count();
      }) &&
      stage(r, "make_target_v", [&] { v.emplace(make_target_v(sub.h)); });

  if (ok) {
    stage(r, "bfgs_minimize", [&] {
      OptimizationResult opt = optimize_decomposition(*ansatz, *v, h, sub.h, config.optimizer);
      r.optimized = true;
      r.theta_star = std::move(opt.theta_star);
      r.cost_trace = std::move(opt.cost_trace);
      r.converged = opt.converged;
      r.iterations = opt.iterations;
      r.status = std::move(opt.status);
      r.final_cost = opt.final_cost;
      r.normalized_cost = normalized_cost(opt.final_cost, v->element, h);
      r.seed_used = opt.seed_used;
      for (const auto& [p, c] : opt.h0.terms()) r.h0.emplace_back(p.label(), c);
      r.residual_fro = opt.residual_fro;
    });
  }
  r.timings_ms["total"] = ms_since(t0);
  return r;
}

void run_evaluate(RunRecord& record, bool with_curve) {
  if (!record.ok()) return;
  const auto t0 = Clock::now();
  stage(record, "evaluate", [&] {
    const Rebuilt b = rebuild(record);
    const DenseMatrix k = k_dense(b.ansatz, record.theta_star);
    const HermitianExponential exact(b.h);
    auto err_at = [&](double t) {
      return spectral_norm(exact(t) - fixed_depth_evolution(k, b.h0, t));
    };
    record.error_at_table_t = err_at(record.config.table_t);
    record.error_curve.clear();
    if (with_curve) {
      for (double t : uniform_grid(record.config.t_max, record.config.t_points)) {
        record.error_curve.push_back({t, err_at(t)});
      }
    }
  });
  record.timings_ms["total"] += ms_since(t0);
}

RunRecord run_error_curve(const RunConfig& config) {
  RunRecord r = run_decompose(config);
  run_evaluate(r, true);
  return r;
}

std::string record_dir(const RunConfig& config) {
  return (std::filesystem::path(config.output_dir) / config_hash(config).substr(0, 12)).string();
}

std::string persist(RunRecord& record) {
  namespace fs = std::filesystem;
  const fs::path dir = record_dir(record.config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ResourceError("cannot create '" + dir.string() + "': " + ec.message());

  const RunConfig& c = record.config;
  record.artifacts["record"] = (dir / "record.json").string();
  if (c.wants("csv") && !record.error_curve.empty()) {
    const auto path = (dir / "error_curve.csv").string();
    write_text(path, error_curve_csv(record.error_curve));
    record.artifacts["error_curve_csv"] = path;
  }
  if (c.wants("svg") && !record.error_curve.empty()) {
    PlotSeries s{c.model.name + " order " + std::to_string(c.order), {}, {}};
    for (const auto& row : record.error_curve) {
      s.x.push_back(row.t);
      s.y.push_back(row.err);
    }
    const auto path = (dir / "error_curve.svg").string();
    write_text(path, render_svg({"Spectral-norm error", "t", "error", true}, {s}));
    record.artifacts["error_curve_svg"] = path;
  }
  write_text(record.artifacts["record"], to_json(record).dump(2) + "\n");
  return dir.string();
}

int exit_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::config:
    case ErrorKind::argument:
    case ErrorKind::dimension:
    case ErrorKind::resource:
    case ErrorKind::capacity:
      return 2;
    case ErrorKind::structural:
    case ErrorKind::contract:
      return 3;
    case ErrorKind::optimizer:
      return 4;
    case ErrorKind::numerical:
      return 5;
  }
  return 1;
}

int exit_status(const RunRecord& record) {
  if (record.ok()) return 0;
  for (ErrorKind k : {ErrorKind::parse, ErrorKind::dimension, ErrorKind::resource,
                      ErrorKind::capacity, ErrorKind::argument, ErrorKind::config,
                      ErrorKind::structural, ErrorKind::contract, ErrorKind::optimizer,
                      ErrorKind::numerical}) {
    if (record.error->kind == to_string(k)) return exit_status(k);
  }
  return 1;
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::baseline: return "baseline";
    case Relation::improved: return "improved";
    case Relation::matched: return "matched";
    case Relation::regressed: return "regressed";
    case Relation::failed: return "failed";
  }
  return "?";
}

OptimizerOptions benchmark_optimizer_defaults() {
  OptimizerOptions o;
  o.multi_start = 32;
  o.init_scale = 1.0;
  o.tol_grad_inf = 1e-13;
  return o;
}

BenchmarkTable run_benchmark(const RunConfig& base, const BenchmarkOptions& options) {
  if (options.models.empty() || options.orders.empty()) {
    throw ArgumentError("benchmark needs at least one model and one order");
  }
  BenchmarkTable table;
  table.table_t = base.table_t;
  std::vector<int> orders = options.orders;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  for (const auto& m : options.models) {
    for (int o : orders) {
      BenchmarkCell cell;
      cell.model = m;
      cell.order = o;
      cell.n = parity_matched_sites(m, base.model.n);
      table.cells.push_back(std::move(cell));
    }
  }

  unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(table.cells.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < table.cells.size();) {
      BenchmarkCell& cell = table.cells[i];
      RunConfig c = base;
      c.model.name = cell.model;
      c.model.n = cell.n;
      // Per-site coupling lists do not carry over between models.
      c.model.couplings.clear();
      c.order = cell.order;
      const auto t0 = Clock::now();
      cell.record = run_decompose(c);
      run_evaluate(cell.record, false);
      cell.wall_ms = ms_since(t0);
      if (options.persist_cells) {
        try {
          persist(cell.record);
        } catch (const Error& e) {
          cell.record.error = StageError{"persist", to_string(e.kind()), e.what()};
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (auto& cell : table.cells) {
    const auto base_cell = std::find_if(table.cells.begin(), table.cells.end(), [&](const auto& c) {
      return c.model == cell.model && c.order == orders.front();
    });
    const auto err = [](const BenchmarkCell& c) -> std::optional<double> {
      if (!c.record.ok()) return std::nullopt;
      return c.record.error_at_table_t;
    };
    if (cell.order == orders.front()) {
      cell.relation = err(cell) ? Relation::baseline : Relation::failed;
      continue;
    }
    const auto e = err(cell);
    const auto e1 = err(*base_cell);
    if (!e || !e1) {
      cell.relation = Relation::failed;
    } else if (*e * kMatchBand < *e1) {
      cell.relation = Relation::improved;
    } else if (*e > *e1 * kMatchBand) {
      cell.relation = Relation::regressed;
    } else {
      cell.relation = Relation::matched;
    }
  }
  return table;
}

Json to_json(const BenchmarkTable& table) {
  Json cells = Json::array();
  for (const auto& c : table.cells) {
    const RunRecord& r = c.record;
    Json cell{{"model", c.model},
              {"order", c.order},
              {"n", c.n},
              {"error_at_t", r.ok() && r.error_at_table_t ? Json(*r.error_at_table_t) : Json(nullptr)},
              {"converged", r.converged},
              {"residual", r.residual_fro},
              {"residual_ratio", r.residual_ratio()},
              {"dla_dim", r.dla_dim},
              {"iters", r.iterations},
              {"wall_ms", c.wall_ms},
              {"relation", to_string(c.relation)},
              {"config_hash", r.config_hash}};
    if (r.error) {
      cell["error"] = {{"stage", r.error->stage}, {"kind", r.error->kind}, {"message", r.error->message}};
    }
    cells.push_back(std::move(cell));
  }
  return Json{{"version", kRecordVersion}, {"table_t", table.table_t}, {"cells", cells}};
}

std::vector<CostTraceSeries> run_cost_trace(const RunConfig& base, const std::vector<int>& orders) {
  if (orders.empty()) throw ArgumentError("cost-trace needs at least one order");
  std::vector<CostTraceSeries> out;
  for (int order : orders) {
    CostTraceSeries s;
    s.order = order;
    RunConfig c = base;
    c.order = order;
    s.record = run_decompose(c);
    const RunRecord& r = s.record;
    if (r.ok()) {
      const AlgebraElement h = build_hamiltonian(c);
      const TargetV v = make_target_v(parse_all(r.h_basis));
      const double tol = c.optimizer.tol_grad_inf;
      for (const auto& row : r.cost_trace) {
        s.normalized.push_back(normalized_cost(row.cost, v.element, h));
        if (!s.iterations_to_tolerance && row.grad_inf < tol) s.iterations_to_tolerance = row.iteration;
      }
      const double final_cost = r.cost_trace.back().cost;
      for (const auto& row : r.cost_trace) {
        if (std::abs(row.cost - final_cost) <= 1e-8 * std::max(1.0, std::abs(final_cost))) {
          s.plateau_iteration = row.iteration;
          break;
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

ScalingReport run_scaling_check(const AlgebraElement& a, const AlgebraElement& b,
                                const ScalingOptions& options) {
  if (options.orders.empty()) throw ArgumentError("scaling check needs at least one order");
  ScalingReport r;
  r.a_label = a.to_string();
  r.b_label = b.to_string();
  for (int order : options.orders) {
    r.slopes.push_back(truncation_slope(a, b, order, options.s_grid, options.coefficients));
  }
  r.trotter = trotter_sweep(a, b, options.trotter_t, options.trotter_steps);
  return r;
}

std::pair<AlgebraElement, AlgebraElement> split_model(const AlgebraElement& h) {
  std::vector<AlgebraElement::Term> xs;
  std::vector<AlgebraElement::Term> rest;
  for (const auto& t : h.terms()) {
    (t.first.z_bits() == 0 ? xs : rest).push_back(t);
  }
  if (xs.empty() || rest.empty()) {
    throw ArgumentError("model Hamiltonian does not split into X-only and other strings");
  }
  const int n = h.num_qubits();
  return {AlgebraElement(n, std::move(xs), h.prune_threshold()),
          AlgebraElement(n, std::move(rest), h.prune_threshold())};
}

Json to_json(const ScalingReport& r) {
  Json slopes = Json::array();
  for (const auto& s : r.slopes) {
    slopes.push_back({{"order", s.order},
                      {"slope", s.saturated ? Json(nullptr) : Json(s.slope)},
                      {"intercept", s.saturated ? Json(nullptr) : Json(s.intercept)},
                      {"points", s.points},
                      {"saturated", s.saturated},
                      {"s", s.s},
                      {"errors", s.errors}});
  }
  const auto& t = r.trotter;
  auto fit = [](const SlopeReport& s) {
    return Json{{"slope", s.saturated ? Json(nullptr) : Json(s.slope)},
                {"points", s.points},
                {"saturated", s.saturated}};
  };
  return Json{{"a", r.a_label},
              {"b", r.b_label},
              {"slopes", slopes},
              {"trotter",
               {{"t", t.t},
                {"steps", t.steps},
                {"err_uncorrected", t.err_uncorrected},
                {"err_corrected", t.err_corrected},
                {"fit_uncorrected", fit(t.fit_uncorrected)},
                {"fit_corrected", fit(t.fit_corrected)}}}};
}

VerifyReport verify_record(const RunRecord& record, double tol) {
  VerifyReport rep;
  auto check = [&](const std::string& what, double stored, double fresh) {
    if (!close(stored, fresh, tol)) {
      rep.mismatches.push_back(what + ": stored " + fmt(stored) + ", recomputed " + fmt(fresh));
    }
  };
  if (record.config_hash != config_hash(record.config)) {
    rep.mismatches.push_back("config_hash does not match the stored config");
  }
  if (!record.optimized) {
    rep.mismatches.push_back("record has no optimization result");
    return rep;
  }
  const Rebuilt b = rebuild(record);
  const TargetV v = make_target_v(b.h_basis);
  const CostFunction fn(b.ansatz, v.element, b.h);
  check("final_cost", record.final_cost, fn.value(record.theta_star));

  const H0Extraction ex = extract_h0(b.ansatz, record.theta_star, b.h, b.h_basis);
  check("residual_fro", record.residual_fro, ex.residual_fro);
  const AlgebraElement diff = ex.h0 - b.h0;
  check("h0 (max coefficient difference)", 0.0, diff.max_abs_coeff());

  if (record.error_at_table_t || !record.error_curve.empty()) {
    const DenseMatrix k = k_dense(b.ansatz, record.theta_star);
    const HermitianExponential exact(b.h);
    auto err_at = [&](double t) {
      return spectral_norm(exact(t) - fixed_depth_evolution(k, b.h0, t));
    };
    if (record.error_at_table_t) {
      check("error_at_table_t", *record.error_at_table_t, err_at(record.config.table_t));
    }
    for (const auto& row : record.error_curve) {
      check("error_curve(t=" + fmt(row.t) + ")", row.err, err_at(row.t));
    }
  }
  return rep;
}

}  // namespace fdsim
