#include "fogcache/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fogcache/csv.hpp"
#include "fogcache/error.hpp"
#include "fogcache/rng.hpp"

namespace fogcache {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Single evaluation

std::vector<OperatorEvaluation> evaluate(const Scenario& scenario, std::span<const Request> requests,
                                         const EvaluationOptions& options) {
  if (!(options.target >= 0.0 && options.target <= 1.0))
    throw ValidationError("target_hit_ratio must be in [0, 1]");
  if (options.architectures.empty()) throw ValidationError("architectures must not be empty");

  std::map<std::string, std::vector<Request>, std::less<>> by_operator;
  for (const auto& t : scenario.topologies) by_operator[t.operator_name()];
  for (const auto& r : requests) {
    const auto it = by_operator.find(r.operator_name);
    if (it == by_operator.end())
      throw ValidationError("request for operator '" + r.operator_name + "' without a topology");
    it->second.push_back(r);
  }
  const auto sizes = item_sizes(requests, scenario.catalog, scenario.size_policy);

  std::vector<OperatorEvaluation> out;
  for (const auto& topology : scenario.topologies) {
    const auto& reqs = by_operator.at(topology.operator_name());
    OperatorEvaluation ev;
    ev.operator_name = topology.operator_name();
    ev.worthy = mark_cache_worthy(tally_popularity(reqs), options.target, options.marking);

    const auto core_plan = place_caches(ev.worthy, topology, Architecture::Core, &sizes);
    for (auto arch : options.architectures) {
      ArchitectureResult res;
      res.architecture = arch;
      res.plan = arch == Architecture::Core ? core_plan
                                            : place_caches(ev.worthy, topology, arch, &sizes);
      res.summary = summarize(res.plan, topology);
      res.price_of_fog = price_of_fog(res.plan, core_plan);
      res.distance = mean_hit_distance(res.plan, reqs, topology);
      res.achieved_hit_ratio = achieved_hit_ratio(res.plan, reqs, topology);
      ev.results.push_back(std::move(res));
    }
    out.push_back(std::move(ev));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweep

std::string_view to_string(Axis axis) noexcept {
  switch (axis) {
    case Axis::None: return "none";
    case Axis::P: return "p";
    case Axis::Q: return "q";
  }
  return "none";
}

std::optional<Axis> parse_axis(std::string_view text) noexcept {
  if (text == "none") return Axis::None;
  if (text == "p") return Axis::P;
  if (text == "q") return Axis::Q;
  return std::nullopt;
}

void validate(const SweepOptions& o) {
  if (o.axis == Axis::None) throw ValidationError("sweep axis must be p or q");
  if (o.grid.empty()) throw ValidationError("grid must not be empty");
  for (std::size_t i = 0; i < o.grid.size(); ++i) {
    if (!(o.grid[i] >= 0.0 && o.grid[i] <= 1.0))
      throw ValidationError("grid values must lie in [0, 1]");
    if (i > 0 && !(o.grid[i] > o.grid[i - 1]))
      throw ValidationError("grid must be strictly increasing");
  }
  if (o.seeds.empty()) throw ValidationError("seeds must not be empty");
  if (!(o.evaluation.target >= 0.0 && o.evaluation.target <= 1.0))
    throw ValidationError("target_hit_ratio must be in [0, 1]");
  if (o.evaluation.architectures.empty()) throw ValidationError("architectures must not be empty");
  if (!(o.top_fraction >= 0.0 && o.top_fraction <= 1.0))
    throw ValidationError("rec_top_fraction must be in [0, 1]");
  if (o.local_items_per_cell < 1) throw ValidationError("local_items_per_cell must be at least 1");
  if (!(o.fixed_p >= 0.0 && o.fixed_p <= 1.0)) throw ValidationError("p must be in [0, 1]");
  if (!(o.fixed_q >= 0.0 && o.fixed_q <= 1.0)) throw ValidationError("q must be in [0, 1]");
  if (o.jobs < 1) throw ValidationError("jobs must be at least 1");
}

namespace {

struct Sample {
  double bytes = 0.0;
  double items = 0.0;
  std::optional<double> pof;
  std::optional<double> distance;
  std::optional<double> item_distance;
  double hops = 0.0;
  double achieved = 0.0;
  bool infeasible = false;
};

std::vector<Sample> flatten(const std::vector<OperatorEvaluation>& evaluations) {
  std::vector<Sample> out;
  for (const auto& ev : evaluations) {
    for (const auto& res : ev.results) {
      Sample s;
      s.bytes = static_cast<double>(res.plan.total_size);
      s.items = static_cast<double>(res.plan.total_items);
      s.pof = res.price_of_fog.value;
      s.distance = res.distance.mean_hit_distance_km;
      s.item_distance = res.distance.mean_item_distance_km;
      s.hops = static_cast<double>(level_index(res.architecture));
      s.achieved = res.achieved_hit_ratio;
      s.infeasible = ev.worthy.infeasible;
      out.push_back(s);
    }
  }
  return out;
}

// Shifted accumulation: identical inputs reproduce the input exactly.
struct Stat {
  std::vector<double> values;

  void add(double v) { values.push_back(v); }
  double mean() const {
    if (values.empty()) return 0.0;
    double shift = 0.0;
    for (double v : values) shift += v - values.front();
    return values.front() + shift / static_cast<double>(values.size());
  }
  double stddev() const {
    if (values.size() < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
};

SweepRow aggregate(std::span<const Sample> samples) {
  Stat bytes, items, pof, dist, item_dist, hops, achieved;
  SweepRow row;
  for (const auto& s : samples) {
    bytes.add(s.bytes);
    items.add(s.items);
    if (s.pof) pof.add(*s.pof);
    if (s.distance) dist.add(*s.distance);
    if (s.item_distance) item_dist.add(*s.item_distance);
    hops.add(s.hops);
    achieved.add(s.achieved);
    row.infeasible = row.infeasible || s.infeasible;
  }
  row.seed_count = samples.size();
  row.total_size_bytes = bytes.mean();
  row.total_size_items = items.mean();
  row.total_size_bytes_std = bytes.stddev();
  row.total_size_items_std = items.stddev();
  if (!pof.values.empty()) {
    row.price_of_fog = pof.mean();
    row.price_of_fog_std = pof.stddev();
  }
  if (!dist.values.empty()) {
    row.mean_distance_km = dist.mean();
    row.mean_distance_km_std = dist.stddev();
  }
  if (!item_dist.values.empty()) row.mean_item_distance_km = item_dist.mean();
  row.mean_hops = hops.mean();
  row.achieved_hit_ratio = achieved.mean();
  return row;
}

}  // namespace

SweepResult run_sweep(const Scenario& scenario, const SweepOptions& options) {
  validate(options);
  const auto pools = recommendation_pools(scenario.requests, options.top_fraction);
  std::set<CellKey> known_cells;
  for (const auto& t : scenario.topologies)
    for (NodeId bs : t.nodes_at(Level::BaseStation))
      known_cells.insert({t.operator_name(), t.node(bs).cell_id});

  const std::size_t n_grid = options.grid.size();
  const std::size_t n_seeds = options.seeds.size();
  std::vector<std::vector<Sample>> results(n_grid * n_seeds);

  auto run_task = [&](std::size_t task) {
    const double value = options.grid[task / n_seeds];
    const std::uint64_t seed = options.seeds[task % n_seeds];
    const double p = options.axis == Axis::P ? value : options.fixed_p;
    const double q = options.axis == Axis::Q ? value : options.fixed_q;

    std::vector<Request> requests = scenario.requests;
    if (p > 0.0) {
      requests = apply_recommendation(std::move(requests), p, pools,
                                      derive_seed(seed, "sweep/recommendation"))
                     .requests;
    }
    if (q > 0.0) {
      requests = apply_locality(std::move(requests), q, options.local_items_per_cell,
                                derive_seed(seed, "sweep/locality"), &known_cells)
                     .requests;
    }
    results[task] = flatten(evaluate(scenario, requests, options.evaluation));
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(options.jobs, results.size()));
  if (workers <= 1) {
    for (std::size_t t = 0; t < results.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < results.size(); t = next++) {
          try {
            run_task(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  SweepResult result;
  result.axis = options.axis;
  result.grid = options.grid;
  const auto& archs = options.evaluation.architectures;
  for (std::size_t o = 0; o < scenario.topologies.size(); ++o) {
    for (std::size_t a = 0; a < archs.size(); ++a) {
      const std::size_t slot = o * archs.size() + a;
      for (std::size_t g = 0; g < n_grid; ++g) {
        std::vector<Sample> samples;
        for (std::size_t s = 0; s < n_seeds; ++s) samples.push_back(results[g * n_seeds + s][slot]);
        SweepRow row = aggregate(samples);
        row.operator_name = scenario.topologies[o].operator_name();
        row.architecture = archs[a];
        row.axis = options.axis;
        row.axis_value = options.grid[g];
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

SweepResult evaluation_report(std::span<const OperatorEvaluation> evaluations) {
  SweepResult result;
  result.axis = Axis::None;
  result.grid = {0.0};
  for (const auto& ev : evaluations) {
    const auto samples = flatten({ev});
    for (std::size_t i = 0; i < ev.results.size(); ++i) {
      SweepRow row = aggregate(std::span<const Sample>(&samples[i], 1));
      row.operator_name = ev.operator_name;
      row.architecture = ev.results[i].architecture;
      row.axis = Axis::None;
      row.axis_value = 0.0;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

const SweepRow* SweepResult::find(std::string_view operator_name, Architecture architecture,
                                  double axis_value) const {
  for (const auto& row : rows) {
    if (row.operator_name == operator_name && row.architecture == architecture &&
        row.axis_value == axis_value)
      return &row;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

const std::vector<std::string> kColumns = {
    "operator",          "architecture",         "axis",
    "axis_value",        "seed_count",           "total_size_bytes",
    "total_size_items",  "price_of_fog",         "mean_distance_km",
    "mean_hops",         "achieved_hit_ratio",   "infeasible_flag",
    "total_size_bytes_std", "total_size_items_std", "price_of_fog_std",
    "mean_distance_km_std", "mean_item_distance_km",
};

std::string opt(const std::optional<double>& v) { return v ? csv::format_double(*v) : ""; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string report_to_csv(const SweepResult& result) {
  std::string out = csv::join(kColumns) + "\n";
  for (const auto& r : result.rows) {
    out += csv::join({r.operator_name, std::string(to_string(r.architecture)),
                      std::string(to_string(r.axis)), csv::format_double(r.axis_value),
                      std::to_string(r.seed_count), csv::format_double(r.total_size_bytes),
                      csv::format_double(r.total_size_items), opt(r.price_of_fog),
                      opt(r.mean_distance_km), csv::format_double(r.mean_hops),
                      csv::format_double(r.achieved_hit_ratio), r.infeasible ? "1" : "0",
                      csv::format_double(r.total_size_bytes_std),
                      csv::format_double(r.total_size_items_std), opt(r.price_of_fog_std),
                      opt(r.mean_distance_km_std), opt(r.mean_item_distance_km)});
    out += '\n';
  }
  return out;
}

std::string report_to_json(const SweepResult& result) {
  json doc;
  doc["schema_version"] = 1;
  doc["axis"] = to_string(result.axis);
  doc["grid"] = result.grid;
  doc["columns"] = kColumns;
  doc["rows"] = json::array();
  for (const auto& r : result.rows) {
    doc["rows"].push_back({
        {"operator", r.operator_name},
        {"architecture", to_string(r.architecture)},
        {"axis", to_string(r.axis)},
        {"axis_value", r.axis_value},
        {"seed_count", r.seed_count},
        {"total_size_bytes", r.total_size_bytes},
        {"total_size_items", r.total_size_items},
        {"price_of_fog", opt_json(r.price_of_fog)},
        {"mean_distance_km", opt_json(r.mean_distance_km)},
        {"mean_hops", r.mean_hops},
        {"achieved_hit_ratio", r.achieved_hit_ratio},
        {"infeasible_flag", r.infeasible},
        {"total_size_bytes_std", r.total_size_bytes_std},
        {"total_size_items_std", r.total_size_items_std},
        {"price_of_fog_std", opt_json(r.price_of_fog_std)},
        {"mean_distance_km_std", opt_json(r.mean_distance_km_std)},
        {"mean_item_distance_km", opt_json(r.mean_item_distance_km)},
    });
  }
  return doc.dump(1) + "\n";
}

SweepResult report_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("report is empty");
  const auto header = csv::split_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto& name : kColumns)
    if (!col.contains(name)) throw ValidationError("report lacks column '" + name + "'");

  SweepResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split_line(line);
    const auto bad = [&](const std::string& what) {
      return ValidationError("report line " + std::to_string(line_no) + ": bad " + what);
    };
    if (f.size() != header.size()) throw bad("field count");
    auto num = [&](const char* name) {
      const auto v = csv::parse_double(f[col.at(name)]);
      if (!v) throw bad(name);
      return *v;
    };
    auto optnum = [&](const char* name) -> std::optional<double> {
      if (csv::trim(f[col.at(name)]).empty()) return std::nullopt;
      return num(name);
    };
    SweepRow r;
    r.operator_name = f[col.at("operator")];
    const auto arch = parse_level(f[col.at("architecture")]);
    const auto axis = parse_axis(f[col.at("axis")]);
    const auto seeds = csv::parse_uint(f[col.at("seed_count")]);
    if (!arch) throw bad("architecture");
    if (!axis) throw bad("axis");
    if (!seeds) throw bad("seed_count");
    r.architecture = *arch;
    r.axis = *axis;
    r.axis_value = num("axis_value");
    r.seed_count = *seeds;
    r.total_size_bytes = num("total_size_bytes");
    r.total_size_items = num("total_size_items");
    r.price_of_fog = optnum("price_of_fog");
    r.mean_distance_km = optnum("mean_distance_km");
    r.mean_hops = num("mean_hops");
    r.achieved_hit_ratio = num("achieved_hit_ratio");
    r.infeasible = f[col.at("infeasible_flag")] == "1";
    r.total_size_bytes_std = num("total_size_bytes_std");
    r.total_size_items_std = num("total_size_items_std");
    r.price_of_fog_std = optnum("price_of_fog_std");
    r.mean_distance_km_std = optnum("mean_distance_km_std");
    r.mean_item_distance_km = optnum("mean_item_distance_km");
    result.axis = r.axis;
    if (std::find(result.grid.begin(), result.grid.end(), r.axis_value) == result.grid.end())
      result.grid.push_back(r.axis_value);
    result.rows.push_back(std::move(r));
  }
  std::sort(result.grid.begin(), result.grid.end());
  return result;
}

SweepResult report_from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    SweepResult result;
    const auto axis = parse_axis(doc.at("axis").get<std::string>());
    if (!axis) throw ValidationError("report has unknown axis");
    result.axis = *axis;
    result.grid = doc.at("grid").get<std::vector<double>>();
    for (const auto& j : doc.at("rows")) {
      SweepRow r;
      r.operator_name = j.at("operator").get<std::string>();
      const auto arch = parse_level(j.at("architecture").get<std::string>());
      const auto row_axis = parse_axis(j.at("axis").get<std::string>());
      if (!arch || !row_axis) throw ValidationError("report row with unknown architecture or axis");
      r.architecture = *arch;
      r.axis = *row_axis;
      r.axis_value = j.at("axis_value").get<double>();
      r.seed_count = j.at("seed_count").get<std::size_t>();
      r.total_size_bytes = j.at("total_size_bytes").get<double>();
      r.total_size_items = j.at("total_size_items").get<double>();
      r.price_of_fog = opt_from_json(j, "price_of_fog");
      r.mean_distance_km = opt_from_json(j, "mean_distance_km");
      r.mean_hops = j.at("mean_hops").get<double>();
      r.achieved_hit_ratio = j.at("achieved_hit_ratio").get<double>();
      r.infeasible = j.at("infeasible_flag").get<bool>();
      r.total_size_bytes_std = j.at("total_size_bytes_std").get<double>();
      r.total_size_items_std = j.at("total_size_items_std").get<double>();
      r.price_of_fog_std = opt_from_json(j, "price_of_fog_std");
      r.mean_distance_km_std = opt_from_json(j, "mean_distance_km_std");
      r.mean_item_distance_km = opt_from_json(j, "mean_item_distance_km");
      result.rows.push_back(std::move(r));
    }
    return result;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
}

void emit_report(const SweepResult& result, ReportFormat format, const std::filesystem::path& path) {
  if (result.rows.empty()) throw ValidationError("refusing to write an empty report");
  auto out = csv::open_output(path);
  out << (format == ReportFormat::Csv ? report_to_csv(result) : report_to_json(result));
  if (!out) throw IoError("failed writing " + path.string());
}

SweepResult parse_report(const std::filesystem::path& path, ReportFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return format == ReportFormat::Csv ? report_from_csv(buffer.str())
                                     : report_from_json(buffer.str());
}

}  // namespace fogcache
