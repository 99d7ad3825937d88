// fdsim: fixed-depth Hamiltonian simulation experiments.
//
//   fdsim decompose --model tfim --qubits 4 --order 2
//   fdsim curve --model heisenberg --format csv,svg
//   fdsim benchmark --output runs/table1
//   fdsim cost-trace --orders 1,2,3,4
//   fdsim scaling --pair X,Z
//   fdsim verify --record runs/<hash>/record.json

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "fdsim/error.hpp"
#include "fdsim/runner.hpp"

using namespace fdsim;

namespace {

struct Flags {
  std::string config_path;
  std::string model;
  int qubits = 0;
  int order = 0;
  std::uint64_t seed = 0;
  double t_max = 0.0;
  int t_points = 0;
  double table_t = 0.0;
  double tol = 0.0;
  int max_iters = 0;
  std::string grad;
  int multi_start = 0;
  double init_scale = 0.0;
  double max_step = 0.0;
  std::string line_search;
  std::string coefficients;
  std::string output;
  std::vector<std::string> formats;
  unsigned workers = 0;
};

struct Options {
  CLI::App* app = nullptr;
  Flags f;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON run configuration");
  app->add_option("--model", f.model, "tfim|tfxy|xy|heisenberg|kitaev_even|kitaev_odd");
  app->add_option("--qubits", f.qubits, "number of sites");
  app->add_option("--seed", f.seed, "optimizer seed");
  app->add_option("--t-max", f.t_max, "end of the time grid");
  app->add_option("--t-points", f.t_points, "points on the time grid");
  app->add_option("--table-t", f.table_t, "time of the tabulated error");
  app->add_option("--tol", f.tol, "gradient inf-norm tolerance");
  app->add_option("--max-iters", f.max_iters, "BFGS iteration cap");
  app->add_option("--grad", f.grad, "fd|analytic");
  app->add_option("--multi-start", f.multi_start, "optimizer restarts");
  app->add_option("--init-scale", f.init_scale, "half-width of the initial theta draw");
  app->add_option("--max-step", f.max_step, "largest per-coordinate trial step");
  app->add_option("--line-search", f.line_search, "armijo|wolfe");
  app->add_option("--coefficients", f.coefficients, "standard|printed");
  app->add_option("--output", f.output, "output directory");
  app->add_option("--format", f.formats, "csv,json,svg")->delimiter(',');
}

bool given(const CLI::App* app, const char* name) { return app->count(name) > 0; }

RunConfig make_config(const CLI::App* app, const Flags& f, RunConfig base) {
  RunConfig c = f.config_path.empty() ? std::move(base) : load_config(f.config_path, std::move(base));
  if (given(app, "--model")) c.model.name = f.model;
  if (given(app, "--qubits")) c.model.n = f.qubits;
  if (app->get_option_no_throw("--order") && given(app, "--order")) c.order = f.order;
  if (given(app, "--seed")) c.optimizer.seed = f.seed;
  if (given(app, "--t-max")) c.t_max = f.t_max;
  if (given(app, "--t-points")) c.t_points = f.t_points;
  if (given(app, "--table-t")) c.table_t = f.table_t;
  if (given(app, "--tol")) c.optimizer.tol_grad_inf = f.tol;
  if (given(app, "--max-iters")) c.optimizer.max_iters = f.max_iters;
  if (given(app, "--grad")) c.optimizer.grad_mode = grad_mode_from_string(f.grad);
  if (given(app, "--multi-start")) c.optimizer.multi_start = f.multi_start;
  if (given(app, "--init-scale")) c.optimizer.init_scale = f.init_scale;
  if (given(app, "--max-step")) c.optimizer.max_step = f.max_step;
  if (given(app, "--line-search")) c.optimizer.line_search = line_search_from_string(f.line_search);
  if (given(app, "--coefficients")) c.coefficients = coefficient_convention_from_string(f.coefficients);
  if (given(app, "--output")) c.output_dir = f.output;
  if (given(app, "--format")) c.formats = f.formats;
  return c;
}

void print_record(const RunRecord& r) {
  std::printf("model %s n=%d order %d  hash %s\n", r.config.model.name.c_str(), r.config.model.n,
              r.config.order, r.config_hash.c_str());
  if (r.dla_dim) {
    std::printf("  dla %zu  k %zu  m %zu  h %zu  mtilde %zu\n", r.dla_dim, r.k_dim, r.m_dim, r.h_dim,
                r.mtilde_dim);
    std::printf("  factors: linear %zu pair %zu triple %zu quad %zu (%zu rotations)\n",
                r.factor_counts.linear, r.factor_counts.pair, r.factor_counts.triple,
                r.factor_counts.quad, r.rotation_count);
  }
  if (r.optimized) {
    std::printf("  %s after %d iterations, cost %.15g (normalized %.15g)\n", r.status.c_str(),
                r.iterations, r.final_cost, r.normalized_cost);
    std::printf("  residual_fro %.3e  (relative %.3e)\n", r.residual_fro, r.residual_ratio());
  }
  if (r.error_at_table_t) {
    std::printf("  error at t=%g: %.3e\n", r.config.table_t, *r.error_at_table_t);
  }
  if (!r.error_curve.empty()) {
    double worst = 0.0;
    for (const auto& row : r.error_curve) worst = std::max(worst, row.err);
    std::printf("  max error on [0, %g]: %.3e\n", r.config.t_max, worst);
  }
  if (r.error) {
    std::fprintf(stderr, "error in stage %s (%s): %s\n", r.error->stage.c_str(), r.error->kind.c_str(),
                 r.error->message.c_str());
  }
}

int finish(RunRecord& r) {
  const std::string dir = persist(r);
  print_record(r);
  std::printf("  record: %s\n", (std::filesystem::path(dir) / "record.json").c_str());
  return exit_status(r);
}

std::vector<int> parse_orders(const std::vector<int>& orders) {
  for (int o : orders) {
    if (o < 1 || o > kMaxOrder) throw ConfigError("order " + std::to_string(o) + " outside 1..4");
  }
  return orders;
}

int cmd_benchmark(const CLI::App* app, const Flags& f, const std::vector<std::string>& models,
                  const std::vector<int>& orders) {
  RunConfig base;
  base.optimizer = benchmark_optimizer_defaults();
  base.output_dir = "runs/benchmark";
  RunConfig c = make_config(app, f, base);
  c.validate();
  BenchmarkOptions opts;
  if (!models.empty()) opts.models = models;
  if (!orders.empty()) opts.orders = parse_orders(orders);
  opts.workers = f.workers;
  opts.persist_cells = c.wants("json");
  const BenchmarkTable table = run_benchmark(c, opts);

  std::filesystem::create_directories(c.output_dir);
  const auto dir = std::filesystem::path(c.output_dir);
  write_text((dir / "benchmark.csv").string(), benchmark_csv(table));
  write_text((dir / "benchmark.json").string(), to_json(table).dump(2) + "\n");

  std::printf("%-12s %5s %3s %12s %9s %10s %8s\n", "model", "order", "n", "error_at_t", "converged",
              "relation", "wall_ms");
  int status = 0;
  for (const auto& cell : table.cells) {
    const RunRecord& r = cell.record;
    char err[32] = "failed";
    if (r.ok() && r.error_at_table_t) std::snprintf(err, sizeof err, "%.3e", *r.error_at_table_t);
    std::printf("%-12s %5d %3d %12s %9s %10s %8.0f\n", cell.model.c_str(), cell.order, cell.n, err,
                r.converged ? "yes" : "no", to_string(cell.relation), cell.wall_ms);
    if (!r.ok()) {
      std::fprintf(stderr, "  %s order %d failed in %s: %s\n", cell.model.c_str(), cell.order,
                   r.error->stage.c_str(), r.error->message.c_str());
      if (status == 0) status = exit_status(r);
    }
  }
  std::printf("table: %s\n", (dir / "benchmark.csv").c_str());
  return status;
}

int cmd_cost_trace(const CLI::App* app, const Flags& f, const std::vector<int>& orders) {
  RunConfig base;
  base.output_dir = "runs/cost_trace";
  RunConfig c = make_config(app, f, base);
  c.validate();
  const auto series = run_cost_trace(c, parse_orders(orders));
  std::filesystem::create_directories(c.output_dir);
  const auto dir = std::filesystem::path(c.output_dir);

  Json summary = Json::array();
  std::vector<PlotSeries> plot;
  int status = 0;
  for (const auto& s : series) {
    const RunRecord& r = s.record;
    if (!r.ok()) {
      std::fprintf(stderr, "order %d failed in %s: %s\n", s.order, r.error->stage.c_str(),
                   r.error->message.c_str());
      if (status == 0) status = exit_status(r);
      continue;
    }
    if (c.wants("csv")) {
      write_text((dir / ("cost_trace_order" + std::to_string(s.order) + ".csv")).string(),
                 cost_trace_csv(s));
    }
    PlotSeries p{"order " + std::to_string(s.order), {}, s.normalized};
    for (const auto& row : r.cost_trace) p.x.push_back(row.iteration);
    plot.push_back(std::move(p));
    summary.push_back({{"order", s.order},
                       {"iterations", r.iterations},
                       {"converged", r.converged},
                       {"iterations_to_tolerance",
                        s.iterations_to_tolerance ? Json(*s.iterations_to_tolerance) : Json(nullptr)},
                       {"plateau_iteration", s.plateau_iteration},
                       {"final_normalized_cost", s.normalized.back()},
                       {"config_hash", r.config_hash}});
    std::printf("order %d: %d iterations (%s), plateau at %d, tolerance at %s, normalized cost %.15g\n",
                s.order, r.iterations, r.status.c_str(), s.plateau_iteration,
                s.iterations_to_tolerance ? std::to_string(*s.iterations_to_tolerance).c_str() : "-",
                s.normalized.back());
  }
  if (c.wants("json")) write_text((dir / "cost_trace.json").string(), summary.dump(2) + "\n");
  if (c.wants("svg")) {
    write_text((dir / "cost_trace.svg").string(),
               render_svg({"Normalized cost, " + c.model.name, "iteration", "f / (|v| |H|)", false}, plot));
  }
  return status;
}

int cmd_scaling(const CLI::App* app, const Flags& f, const std::vector<int>& orders,
                const std::vector<std::string>& pair) {
  RunConfig base;
  base.output_dir = "runs/scaling";
  RunConfig c = make_config(app, f, base);
  ScalingOptions opts;
  if (!orders.empty()) opts.orders = parse_orders(orders);
  opts.coefficients = c.coefficients;

  AlgebraElement a;
  AlgebraElement b;
  if (given(app, "--model")) {
    c.model.validate();
    std::tie(a, b) = split_model(build_model(c.model));
  } else {
    if (pair.size() != 2) throw ConfigError("--pair takes exactly two labels");
    a = AlgebraElement(PauliString::parse(pair[0]));
    b = AlgebraElement(PauliString::parse(pair[1]));
  }
  const ScalingReport rep = run_scaling_check(a, b, opts);

  std::filesystem::create_directories(c.output_dir);
  const auto dir = std::filesystem::path(c.output_dir);
  if (c.wants("csv")) {
    write_text((dir / "slopes.csv").string(), slope_csv(rep));
    write_text((dir / "trotter.csv").string(), trotter_csv(rep));
  }
  if (c.wants("json")) write_text((dir / "scaling.json").string(), to_json(rep).dump(2) + "\n");
  if (c.wants("svg")) {
    std::vector<PlotSeries> series;
    for (const auto& s : rep.slopes) series.push_back({"order " + std::to_string(s.order), s.s, s.errors});
    write_text((dir / "truncation.svg").string(),
               render_svg({"Truncation error", "s", "error", true}, series));
  }

  std::printf("A = %s\nB = %s\n", rep.a_label.c_str(), rep.b_label.c_str());
  for (const auto& s : rep.slopes) {
    if (s.saturated) {
      std::printf("order %d: saturated\n", s.order);
    } else {
      std::printf("order %d: slope %.3f (%d points)\n", s.order, s.slope, s.points);
    }
  }
  auto show = [](const char* name, const SlopeReport& s) {
    if (s.saturated) {
      std::printf("trotter %s: saturated\n", name);
    } else {
      std::printf("trotter %s: slope %.3f in m\n", name, s.slope);
    }
  };
  show("uncorrected", rep.trotter.fit_uncorrected);
  show("corrected", rep.trotter.fit_corrected);
  return 0;
}

int cmd_verify(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open record '" + path + "'");
  const RunRecord r = record_from_json(Json::parse(in));
  const VerifyReport rep = verify_record(r);
  if (rep.ok()) {
    std::printf("%s: ok\n", path.c_str());
    return 0;
  }
  for (const auto& m : rep.mismatches) std::fprintf(stderr, "mismatch: %s\n", m.c_str());
  return 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-depth Hamiltonian simulation via Cartan decomposition and Zassenhaus ansatze"};
  app.require_subcommand(1);

  Flags f;
  std::vector<std::string> models;
  std::vector<int> orders;
  std::vector<std::string> pair = {"X", "Z"};
  std::string record_path;

  auto* decompose = app.add_subcommand("decompose", "Cartan decomposition and K optimization");
  auto* curve = app.add_subcommand("curve", "error curve over [0, t_max]");
  auto* benchmark = app.add_subcommand("benchmark", "model x order error table");
  auto* cost = app.add_subcommand("cost-trace", "cost against iteration per order");
  auto* scaling = app.add_subcommand("scaling", "Zassenhaus truncation slopes and Trotter sweep");
  auto* verify = app.add_subcommand("verify", "recompute a stored record");

  for (auto* sub : {decompose, curve, benchmark, cost, scaling}) add_common(sub, f);
  for (auto* sub : {decompose, curve}) sub->add_option("--order", f.order, "Zassenhaus order 1..4");
  benchmark->add_option("--models", models, "models to include")->delimiter(',');
  benchmark->add_option("--orders", orders, "orders to include")->delimiter(',');
  benchmark->add_option("--workers", f.workers, "concurrent cells (default: all cores)");
  cost->add_option("--orders", orders, "orders to trace")->delimiter(',')->default_str("1,2,3,4");
  scaling->add_option("--orders", orders, "orders to fit")->delimiter(',');
  scaling->add_option("--pair", pair, "two Pauli labels A,B")->delimiter(',');
  verify->add_option("--record", record_path, "record.json to check")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*decompose) {
      RunRecord r = run_decompose(make_config(decompose, f, RunConfig{}));
      if (r.ok()) run_evaluate(r, false);
      return finish(r);
    }
    if (*curve) {
      RunRecord r = run_error_curve(make_config(curve, f, RunConfig{}));
      return finish(r);
    }
    if (*benchmark) return cmd_benchmark(benchmark, f, models, orders);
    if (*cost) {
      if (cost->count("--orders") == 0) orders = {1, 2, 3, 4};
      return cmd_cost_trace(cost, f, orders);
    }
    if (*scaling) return cmd_scaling(scaling, f, orders, pair);
    if (*verify) return cmd_verify(record_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return exit_status(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
