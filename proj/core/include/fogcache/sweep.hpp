#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fogcache/cache.hpp"
#include "fogcache/demand.hpp"
#include "fogcache/metrics.hpp"
#include "fogcache/topology.hpp"

namespace fogcache {

// Everything needed to evaluate caching architectures: one topology per
// operator, the unperturbed request stream and the item catalog.
struct Scenario {
  std::vector<Topology> topologies;
  std::vector<Request> requests;
  ItemCatalog catalog;
  SizePolicy size_policy = SizePolicy::MeanOfRequests;
};

inline constexpr std::array<Architecture, 4> kAllArchitectures = kLevels;

struct EvaluationOptions {
  double target = 0.5;
  MarkOptions marking;
  std::vector<Architecture> architectures{kAllArchitectures.begin(), kAllArchitectures.end()};
};

struct ArchitectureResult {
  Architecture architecture = Architecture::BaseStation;
  CachePlan plan;
  PlanSummary summary;
  PriceOfFog price_of_fog;
  DistanceReport distance;
  double achieved_hit_ratio = 0.0;
};

struct OperatorEvaluation {
  std::string operator_name;
  CacheWorthySet worthy;
  std::vector<ArchitectureResult> results;  // in EvaluationOptions order
};

// tally -> mark -> place for every operator of `scenario`, using `requests`
// (the scenario's own stream or a perturbed copy). Operators are evaluated
// independently, each against the target. Sizes follow the scenario policy.
std::vector<OperatorEvaluation> evaluate(const Scenario& scenario, std::span<const Request> requests,
                                         const EvaluationOptions& options);

enum class Axis { None, P, Q };

std::string_view to_string(Axis axis) noexcept;
std::optional<Axis> parse_axis(std::string_view text) noexcept;

struct SweepOptions {
  Axis axis = Axis::P;
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds;
  EvaluationOptions evaluation;
  double top_fraction = 0.05;
  std::size_t local_items_per_cell = 5;
  double fixed_p = 0.0;  // applied while sweeping q
  double fixed_q = 0.0;  // applied while sweeping p
  unsigned jobs = 1;
};

// Throws ValidationError naming the offending field.
void validate(const SweepOptions& options);

struct SweepRow {
  std::string operator_name;
  Architecture architecture = Architecture::BaseStation;
  Axis axis = Axis::None;
  double axis_value = 0.0;
  std::size_t seed_count = 0;
  double total_size_bytes = 0.0;
  double total_size_items = 0.0;
  std::optional<double> price_of_fog;
  std::optional<double> mean_distance_km;
  double mean_hops = 0.0;
  double achieved_hit_ratio = 0.0;
  bool infeasible = false;
  // Seed-to-seed spread (sample standard deviation, 0 for one seed).
  double total_size_bytes_std = 0.0;
  double total_size_items_std = 0.0;
  std::optional<double> price_of_fog_std;
  std::optional<double> mean_distance_km_std;
  std::optional<double> mean_item_distance_km;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  Axis axis = Axis::None;
  std::vector<double> grid;
  std::vector<SweepRow> rows;  // operator, then architecture, then grid order

  const SweepRow* find(std::string_view operator_name, Architecture architecture,
                       double axis_value) const;
};

// Recommendation pools come from the unperturbed stream once. For each grid
// value and seed the demand is perturbed (common random numbers across grid
// values), re-tallied and re-marked at the fixed target, every architecture is
// placed and metrics are averaged over seeds. Output does not depend on `jobs`.
SweepResult run_sweep(const Scenario& scenario, const SweepOptions& options);

// Baseline report (axis none, one seed) from a plain evaluation.
SweepResult evaluation_report(std::span<const OperatorEvaluation> evaluations);

enum class ReportFormat { Csv, Json };

std::string report_to_csv(const SweepResult& result);
std::string report_to_json(const SweepResult& result);
SweepResult report_from_csv(std::string_view text);
SweepResult report_from_json(std::string_view text);

// Throws ValidationError for an empty result and IoError for unwritable paths.
void emit_report(const SweepResult& result, ReportFormat format, const std::filesystem::path& path);
SweepResult parse_report(const std::filesystem::path& path, ReportFormat format);

}  // namespace fogcache
