#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fogcache/demand.hpp"
#include "fogcache/topology.hpp"

namespace fogcache {

// How an operator deploys cells: many small cells clustered around hot spots,
// or fewer large cells spread evenly over the area.
enum class DeploymentStyle { DenseSmall, SparseLarge };

std::string_view to_string(DeploymentStyle style) noexcept;
std::optional<DeploymentStyle> parse_deployment_style(std::string_view text) noexcept;

struct BoundingBox {
  double lat_min = 33.70;
  double lat_max = 34.30;
  double lon_min = -118.70;
  double lon_max = -117.90;
};

using CategoryShares = std::map<ContentCategory, double>;

CategoryShares default_category_shares();

// Lognormal request-size model per category: median bytes and log-sigma.
struct SizeDistribution {
  double median_bytes = 1e6;
  double sigma = 1.0;
};

std::map<ContentCategory, SizeDistribution> default_size_model();

struct SyntheticOptions {
  std::string operator_name = "synth";
  DeploymentStyle style = DeploymentStyle::SparseLarge;
  std::size_t n_cells = 200;
  std::size_t n_users = 400;
  std::size_t hours = 4;
  CategoryShares category_shares = default_category_shares();
  std::map<ContentCategory, SizeDistribution> size_model = default_size_model();
  BoundingBox bbox;
  double requests_per_user_hour = 6.0;  // Poisson mean
  double speed_kmh_min = 20.0;
  double speed_kmh_max = 70.0;
  int sample_minutes = 5;
  std::string start_day = "2015-10-01";
  SizePolicy size_policy = SizePolicy::FirstDraw;
};

// Throws ValidationError naming the offending field.
void validate(const SyntheticOptions& options);

struct SyntheticScenario {
  std::vector<CellEstimate> cells;
  std::vector<Request> requests;
  ItemCatalog catalog;
};

// Places cells over the bounding box according to the deployment style,
// moves vehicular users along random waypoints, attaches every request to
// the nearest cell and assigns content ids with `config`. Deterministic in
// (options, config).
SyntheticScenario generate_synthetic_scenario(const SyntheticOptions& options,
                                              const DemandConfig& config);

// Several operators over the same area; requests of all operators share one
// content id assignment pass.
SyntheticScenario generate_synthetic_network(std::span<const SyntheticOptions> operators,
                                             const DemandConfig& config);

// "YYYY-MM-DD" shifted by `days`.
std::string add_days(std::string_view iso_date, long days);

}  // namespace fogcache
