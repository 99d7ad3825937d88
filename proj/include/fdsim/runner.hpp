#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fdsim/error.hpp"
#include "fdsim/evolution.hpp"
#include "fdsim/models.hpp"
#include "fdsim/optimize.hpp"
#include "fdsim/zassenhaus.hpp"

namespace fdsim {

using Json = nlohmann::ordered_json;

inline constexpr const char* kRecordVersion = "1";

struct RunConfig {
  ModelSpec model;
  /// Extra (label, coefficient) terms added to the model Hamiltonian.
  std::vector<std::pair<std::string, double>> extra_terms;
  int order = 2;
  CoefficientConvention coefficients = CoefficientConvention::standard;
  OptimizerOptions optimizer;
  double t_max = 200.0;
  int t_points = 101;
  double table_t = 20.0;
  std::string output_dir = "runs";
  std::vector<std::string> formats = {"csv", "json"};

  void validate() const;
  bool wants(const std::string& format) const;
};

Json to_json(const RunConfig& c);
/// Fields absent from `j` keep their value in `base`. Unknown keys are a
/// ConfigError so typos do not pass silently.
RunConfig config_from_json(const Json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// FNV-1a 64 over the canonical JSON dump of the config without output_dir
/// and formats, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Model Hamiltonian plus extra_terms.
AlgebraElement build_hamiltonian(const RunConfig& c);

struct StageError {
  std::string stage;
  std::string kind;
  std::string message;
};

struct RunRecord {
  std::string version = kRecordVersion;
  RunConfig config;
  std::string config_hash;

  int n = 0;
  std::size_t dla_dim = 0;
  std::size_t k_dim = 0;
  std::size_t m_dim = 0;
  std::size_t h_dim = 0;
  std::size_t mtilde_dim = 0;
  std::vector<std::string> k_basis;
  std::vector<std::string> h_basis;
  BlockCounts factor_counts;
  std::size_t parameter_count = 0;
  std::size_t rotation_count = 0;

  bool optimized = false;
  std::vector<double> theta_star;
  std::vector<TraceRow> cost_trace;
  bool converged = false;
  int iterations = 0;
  std::string status;
  double final_cost = 0.0;
  double normalized_cost = 0.0;
  std::uint64_t seed_used = 0;
  std::vector<std::pair<std::string, double>> h0;
  double residual_fro = 0.0;
  double h_fro = 0.0;

  ErrorCurve error_curve;
  std::optional<double> error_at_table_t;

  std::map<std::string, double> timings_ms;
  std::map<std::string, std::string> artifacts;
  std::optional<StageError> error;

  bool ok() const { return !error.has_value(); }
  double residual_ratio() const { return h_fro > 0.0 ? residual_fro / h_fro : 0.0; }
};

Json to_json(const RunRecord& r);
RunRecord record_from_json(const Json& j);

/// build_model through extract_h0. Stage failures are caught and stored in
/// record.error with the stage name; nothing is thrown for them.
RunRecord run_decompose(const RunConfig& config);

/// Adds error_at_table_t and, when `with_curve`, the error curve on
/// uniform_grid(t_max, t_points). Requires a successful decomposition.
void run_evaluate(RunRecord& record, bool with_curve);

/// run_decompose followed by run_evaluate(with_curve = true).
RunRecord run_error_curve(const RunConfig& config);

/// Directory for a record: output_dir / first 12 hex digits of the hash.
std::string record_dir(const RunConfig& config);

/// Writes record.json plus the requested CSV/SVG artifacts and fills
/// record.artifacts. Returns the directory used.
std::string persist(RunRecord& record);

/// Process exit status for a record: 0 on success, otherwise by error kind.
int exit_status(const RunRecord& record);
int exit_status(ErrorKind kind);

// Benchmark ------------------------------------------------------------------

enum class Relation { baseline, improved, matched, regressed, failed };
const char* to_string(Relation r);

/// Ratio band for "matched" against the order-1 cell.
inline constexpr double kMatchBand = 2.0;

struct BenchmarkCell {
  std::string model;
  int order = 0;
  int n = 0;
  RunRecord record;
  double wall_ms = 0.0;
  Relation relation = Relation::baseline;
};

struct BenchmarkOptions {
  std::vector<std::string> models = model_names();
  std::vector<int> orders = {1, 2, 3, 4};
  /// 0 means std::thread::hardware_concurrency().
  unsigned workers = 0;
  /// Write each cell's record under output_dir as it finishes.
  bool persist_cells = false;
};

/// Optimizer settings applied to benchmark cells unless the caller overrides
/// them: higher-order ansatze have spurious local minima, so cells use several
/// widely spread starts, and the gradient tolerance is tightened until the
/// tabulated error sits at the roundoff floor rather than at the stopping point.
OptimizerOptions benchmark_optimizer_defaults();

struct BenchmarkTable {
  std::vector<BenchmarkCell> cells;  // model-major, orders ascending
  double table_t = 0.0;
};

/// Every (model, order) cell from `base`; kitaev models use the nearest
/// parity-matching n >= base.model.n. Cell failures stay in the cell.
BenchmarkTable run_benchmark(const RunConfig& base, const BenchmarkOptions& options);

std::string benchmark_csv(const BenchmarkTable& table);
Json to_json(const BenchmarkTable& table);

// Cost traces ----------------------------------------------------------------

struct CostTraceSeries {
  int order = 0;
  RunRecord record;
  std::vector<double> normalized;
  /// First iteration with gradient inf-norm below the tolerance.
  std::optional<int> iterations_to_tolerance;
  /// First iteration whose cost is within 1e-8 (relative) of the final cost.
  int plateau_iteration = 0;
};

std::vector<CostTraceSeries> run_cost_trace(const RunConfig& base, const std::vector<int>& orders);
std::string cost_trace_csv(const CostTraceSeries& s);

// Scaling harness ------------------------------------------------------------

struct ScalingReport {
  std::string a_label;
  std::string b_label;
  std::vector<SlopeReport> slopes;
  TrotterSweep trotter;
};

struct ScalingOptions {
  std::vector<int> orders = {1, 2, 3, 4};
  std::vector<double> s_grid = geometric_grid(1e-3, 1e-1, 7);
  double trotter_t = 0.5;
  std::vector<int> trotter_steps = {1, 2, 4, 8, 16, 32, 64};
  CoefficientConvention coefficients = CoefficientConvention::standard;
};

ScalingReport run_scaling_check(const AlgebraElement& a, const AlgebraElement& b,
                                const ScalingOptions& options);

/// Splits a model Hamiltonian into the X/I-only strings and the rest.
std::pair<AlgebraElement, AlgebraElement> split_model(const AlgebraElement& h);

std::string slope_csv(const ScalingReport& r);
std::string trotter_csv(const ScalingReport& r);
Json to_json(const ScalingReport& r);

// Verification ---------------------------------------------------------------

struct VerifyReport {
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Recomputes cost, h0, residual and stored errors from the stored theta*.
/// Values must agree within 1e-12 (relative to max(1, |value|)).
VerifyReport verify_record(const RunRecord& record, double tol = 1e-12);

// Output helpers -------------------------------------------------------------

std::string error_curve_csv(const ErrorCurve& curve);
void write_text(const std::string& path, const std::string& text);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
};

/// Axes, ticks and one polyline per series.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace fdsim
