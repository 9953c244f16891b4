#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fogcache/csv.hpp"
#include "fogcache/error.hpp"
#include "fogcache/scenario_io.hpp"
#include "fogcache/synth.hpp"
#include "fogcache/sweep.hpp"
#include "fogcache/trace.hpp"

namespace fogcache::cli {
namespace {

namespace fs = std::filesystem;

struct Settings {
  // general
  std::string output_dir = "fogcache-out";
  std::string scenario_dir;  // defaults to output_dir
  long jobs = 1;
  std::uint64_t seed = 1;

  // topology
  long fanout = 10;
  std::string grouping = "hilbert";

  // synth
  std::string operator_name = "synth";
  std::string style = "sparse_large";
  long cells = 200;
  long users = 400;
  long hours = 4;
  double requests_per_hour = 6.0;
  std::vector<std::string> operators;
  std::string size_policy = "first_draw";
  std::string start_day = "2015-10-01";
  bool jsonl = false;

  // demand
  double zipf_exponent = 0.8;
  long catalog_size = 1'000'000;
  long popular_pool = 50;
  double popular_prob = 0.9;
  long local_pool = 10;
  double local_prob = 0.9;
  std::string video_weights;

  // ingest
  std::string trace;
  std::string schema;
  std::string rules;
  double static_km = 0.05;
  double vehicular_km = 5.0;

  // evaluate
  double target = 0.5;
  std::string weighting = "requests";
  std::vector<std::string> architectures = {"base_station", "ring", "pod", "core"};
  bool exclude_non_cacheable = false;
  bool unit_sizes = false;
  bool strict = false;

  // sweep
  std::string axis = "p";
  std::vector<double> grid = {0.0, 0.1, 0.25, 0.5};
  std::vector<std::uint64_t> seeds;
  long seed_count = 5;
  double top_fraction = 0.05;
  long local_items = 5;
  double p = 0.0;
  double q = 0.0;
  std::string format = "both";
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field + ": " + what);
}

std::size_t positive(long value, const std::string& field) {
  require(value >= 1, field, "must be at least 1 (got " + std::to_string(value) + ")");
  return static_cast<std::size_t>(value);
}

double probability(double value, const std::string& field) {
  require(value >= 0.0 && value <= 1.0, field, "must be in [0, 1]");
  return value;
}

TreeOptions tree_options(const Settings& s) {
  TreeOptions t;
  t.fanout = positive(s.fanout, "fanout");
  require(s.grouping == "hilbert" || s.grouping == "random", "grouping",
          "must be hilbert or random");
  t.grouping = s.grouping == "hilbert" ? Grouping::Hilbert : Grouping::Random;
  t.seed = derive_seed(s.seed, "topology");
  return t;
}

DemandConfig demand_config(const Settings& s) {
  DemandConfig c;
  c.zipf_exponent = s.zipf_exponent;
  require(s.zipf_exponent > 0.0, "zipf-exponent", "must be positive");
  c.video_catalog_size = positive(s.catalog_size, "catalog-size");
  c.popular_pool_size = positive(s.popular_pool, "popular-pool");
  c.popular_hit_prob = probability(s.popular_prob, "popular-prob");
  c.local_pool_size = positive(s.local_pool, "local-pool");
  c.local_hit_prob = probability(s.local_prob, "local-prob");
  c.rec_top_fraction = probability(s.top_fraction, "top-fraction");
  c.local_items_per_cell = positive(s.local_items, "local-items");
  c.seed = s.seed;
  validate(c);
  return c;
}

std::optional<VideoCatalog> video_catalog(const Settings& s) {
  if (s.video_weights.empty()) return std::nullopt;
  return VideoCatalog::load(s.video_weights);
}

EvaluationOptions evaluation_options(const Settings& s) {
  EvaluationOptions e;
  e.target = probability(s.target, "target");
  const auto w = parse_weighting(s.weighting);
  require(w.has_value(), "weighting", "must be requests or bytes");
  e.marking.weighting = *w;
  e.marking.exclude_non_cacheable = s.exclude_non_cacheable;
  e.architectures.clear();
  require(!s.architectures.empty(), "architectures", "must name at least one level");
  for (const auto& name : s.architectures) {
    const auto level = parse_level(name);
    require(level.has_value(), "architectures", "unknown architecture '" + name + "'");
    e.architectures.push_back(*level);
  }
  return e;
}

std::string level_counts_text(const Topology& t) {
  const auto c = t.level_counts();
  return std::to_string(c[0]) + "/" + std::to_string(c[1]) + "/" + std::to_string(c[2]) + "/" +
         std::to_string(c[3]);
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  return dir;
}

Manifest make_manifest(std::string mode, const Settings& s, const Scenario& scenario,
                       std::size_t cells) {
  Manifest m;
  m.mode = std::move(mode);
  m.seed = s.seed;
  m.size_policy = scenario.size_policy;
  m.fanout = static_cast<std::size_t>(s.fanout);
  m.cells = cells;
  m.requests = scenario.requests.size();
  m.items = scenario.catalog.size();
  for (const auto& t : scenario.topologies) m.operators.push_back(t.operator_name());
  return m;
}

void print_topologies(const Scenario& scenario) {
  for (const auto& t : scenario.topologies)
    std::cout << "operator " << t.operator_name() << ": levels " << level_counts_text(t)
              << " (base stations/rings/pods/cores)\n";
}

// ---------------------------------------------------------------------------

std::vector<SyntheticOptions> synthetic_operators(const Settings& s) {
  SyntheticOptions base;
  base.operator_name = s.operator_name;
  const auto style = parse_deployment_style(s.style);
  require(style.has_value(), "style", "must be dense_small or sparse_large");
  base.style = *style;
  base.n_cells = positive(s.cells, "cells");
  base.n_users = positive(s.users, "users");
  base.hours = positive(s.hours, "hours");
  require(s.requests_per_hour > 0.0, "requests-per-hour", "must be positive");
  base.requests_per_user_hour = s.requests_per_hour;
  base.start_day = s.start_day;
  const auto policy = parse_size_policy(s.size_policy);
  require(policy.has_value() && *policy != SizePolicy::MeanOfRequests, "size-policy",
          "must be first_draw or unit");
  base.size_policy = *policy;

  std::vector<SyntheticOptions> out;
  if (s.operators.empty()) {
    out.push_back(base);
  } else {
    // name:style:cells
    for (const auto& entry : s.operators) {
      std::vector<std::string> parts;
      std::stringstream in(entry);
      for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
      require(parts.size() == 3 && !parts[0].empty(), "operators",
              "expected name:style:cells, got '" + entry + "'");
      auto o = base;
      o.operator_name = parts[0];
      const auto st = parse_deployment_style(parts[1]);
      require(st.has_value(), "operators", "unknown style '" + parts[1] + "'");
      o.style = *st;
      const auto n = csv::parse_int(parts[2]);
      require(n.has_value(), "operators", "bad cell count '" + parts[2] + "'");
      o.n_cells = positive(static_cast<long>(*n), "operators");
      out.push_back(std::move(o));
    }
  }
  for (const auto& o : out) validate(o);
  return out;
}

int cmd_synth(const Settings& s) {
  const auto operators = synthetic_operators(s);
  const auto config = demand_config(s);
  const auto tree = tree_options(s);
  auto generated = generate_synthetic_network(operators, config);

  Scenario scenario;
  scenario.topologies = build_topologies(generated.cells, tree);
  scenario.requests = std::move(generated.requests);
  scenario.catalog = std::move(generated.catalog);
  scenario.size_policy = operators.front().size_policy;

  const auto dir = ensure_dir(s.output_dir);
  write_scenario(dir, make_manifest("synth", s, scenario, generated.cells.size()),
                 generated.cells, scenario);
  if (s.jsonl) write_requests_jsonl(dir / "requests.jsonl", scenario.requests);

  std::cout << "cells: " << generated.cells.size() << "\n";
  print_topologies(scenario);
  std::cout << "requests: " << scenario.requests.size() << "\n"
            << "items: " << scenario.catalog.size() << "\n"
            << "written to " << dir.string() << "\n";
  return kOk;
}

int cmd_ingest(const Settings& s) {
  require(!s.trace.empty(), "trace", "ingest needs --trace");
  const auto schema = s.schema.empty() ? TraceSchema{} : TraceSchema::load(s.schema);
  const auto rules = s.rules.empty() ? CategoryRules::defaults() : CategoryRules::load(s.rules);
  MobilityThresholds thresholds{s.static_km, s.vehicular_km};
  validate(thresholds);
  const auto config = demand_config(s);
  const auto tree = tree_options(s);
  const auto video = video_catalog(s);

  const auto parsed = parse_trace(s.trace, schema);
  const auto vehicular = filter_vehicular(parsed.records, thresholds);
  const auto cells = estimate_cells(vehicular);
  if (cells.empty()) throw ValidationError("trace: no vehicular records with a cell id");

  std::vector<Request> raw;
  std::size_t skipped = 0;
  for (const auto& rec : vehicular) {
    if (!rec.cell_id || rec.cell_id->empty() || rec.bytes_down == 0) {
      ++skipped;
      continue;
    }
    Request r;
    r.user_id = rec.user_id;
    r.day = rec.day;
    r.hour = rec.hour;
    r.cell_id = *rec.cell_id;
    r.operator_name = rec.operator_name;
    r.category = rules.map(rec.app_class);
    r.bytes = rec.bytes_down;
    raw.push_back(std::move(r));
  }
  auto assignment = assign_content_ids(std::move(raw), config, SizePolicy::MeanOfRequests,
                                       video ? &*video : nullptr);

  Scenario scenario;
  scenario.topologies = build_topologies(cells, tree);
  scenario.requests = std::move(assignment.requests);
  scenario.catalog = std::move(assignment.catalog);
  scenario.size_policy = SizePolicy::MeanOfRequests;

  const auto dir = ensure_dir(s.output_dir);
  write_trace(dir / "filtered_trace.csv", vehicular, schema);
  write_scenario(dir, make_manifest("ingest", s, scenario, cells.size()), cells, scenario);
  if (s.jsonl) write_requests_jsonl(dir / "requests.jsonl", scenario.requests);

  std::cout << "rows: " << parsed.total_rows << " (malformed " << parsed.malformed_rows << ")\n"
            << "vehicular records: " << vehicular.size() << "\n"
            << "cells: " << cells.size() << "\n";
  print_topologies(scenario);
  std::cout << "requests: " << scenario.requests.size() << " (skipped " << skipped
            << " without cell or bytes)\n"
            << "written to " << dir.string() << "\n";
  return kOk;
}

Scenario load_input(const Settings& s) {
  auto scenario = load_scenario(s.scenario_dir.empty() ? s.output_dir : s.scenario_dir);
  if (s.unit_sizes) scenario.size_policy = SizePolicy::Unit;
  return scenario;
}

void emit(const SweepResult& result, const Settings& s, const fs::path& dir,
          const std::string& stem) {
  require(s.format == "csv" || s.format == "json" || s.format == "both", "format",
          "must be csv, json or both");
  if (s.format != "json") emit_report(result, ReportFormat::Csv, dir / (stem + ".csv"));
  if (s.format != "csv") emit_report(result, ReportFormat::Json, dir / (stem + ".json"));
}

std::string optional_text(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string("undefined");
}

int cmd_evaluate(const Settings& s) {
  const auto options = evaluation_options(s);
  const auto scenario = load_input(s);
  const auto evaluations = evaluate(scenario, scenario.requests, options);

  const auto dir = ensure_dir(s.output_dir);
  const auto plans_dir = ensure_dir((dir / "plans").string());
  auto summary = csv::open_output(dir / "plan_summary.csv");
  summary << "operator,architecture,total_size,total_items,node_count,min_node_size,"
             "median_node_size,max_node_size\n";

  bool infeasible = false;
  for (std::size_t i = 0; i < evaluations.size(); ++i) {
    const auto& ev = evaluations[i];
    const auto& topology = scenario.topologies[i];
    if (ev.worthy.infeasible) {
      infeasible = true;
      std::cerr << "warning: operator " << ev.operator_name << ": target "
                << csv::format_double(ev.worthy.target) << " is infeasible, best achievable "
                << csv::format_double(ev.worthy.achieved) << "\n";
    }
    if (ev.worthy.non_cacheable_marked) {
      std::cerr << "warning: operator " << ev.operator_name
                << ": non-cacheable (RealTime/Players) pairs were marked cache-worthy\n";
    }
    for (const auto& res : ev.results) {
      const std::string arch(to_string(res.architecture));
      write_text(plans_dir / (ev.operator_name + "__" + arch + ".json"),
                 plan_to_json(res.plan, topology) + "\n");
      const auto& sm = res.summary;
      summary << csv::join({ev.operator_name, arch, std::to_string(sm.total_size),
                            std::to_string(sm.total_items), std::to_string(sm.node_count),
                            std::to_string(sm.min_node_size),
                            csv::format_double(sm.median_node_size),
                            std::to_string(sm.max_node_size)})
              << "\n";
      std::cout << ev.operator_name << " " << arch << ": total_size " << res.plan.total_size
                << " items " << res.plan.total_items << " price_of_fog "
                << optional_text(res.price_of_fog.value) << " mean_distance_km "
                << optional_text(res.distance.mean_hit_distance_km) << " hit_ratio "
                << csv::format_double(res.achieved_hit_ratio) << "\n";
    }
  }
  if (!summary) throw IoError("failed writing plan_summary.csv");
  emit(evaluation_report(evaluations), s, dir, "metrics");
  return s.strict && infeasible ? kInfeasibleTarget : kOk;
}

int cmd_sweep(const Settings& s) {
  SweepOptions options;
  const auto axis = parse_axis(s.axis);
  require(axis.has_value() && *axis != Axis::None, "axis", "must be p or q");
  options.axis = *axis;
  options.grid = s.grid;
  options.seeds = s.seeds;
  if (options.seeds.empty()) {
    const auto count = positive(s.seed_count, "seed-count");
    for (std::size_t i = 0; i < count; ++i)
      options.seeds.push_back(derive_seed(s.seed, "sweep/seed/" + std::to_string(i)));
  }
  options.evaluation = evaluation_options(s);
  options.top_fraction = probability(s.top_fraction, "top-fraction");
  options.local_items_per_cell = positive(s.local_items, "local-items");
  options.fixed_p = probability(s.p, "p");
  options.fixed_q = probability(s.q, "q");
  options.jobs = static_cast<unsigned>(positive(s.jobs, "jobs"));
  validate(options);

  const auto scenario = load_input(s);
  const auto result = run_sweep(scenario, options);

  const auto dir = ensure_dir(s.output_dir);
  emit(result, s, dir, "sweep");
  write_text(dir / "pools.json",
             pools_to_json(recommendation_pools(scenario.requests, options.top_fraction)) + "\n");

  for (const auto& row : result.rows) {
    std::cout << row.operator_name << " " << to_string(row.architecture) << " " << s.axis << "="
              << csv::format_double(row.axis_value) << ": total_size "
              << csv::format_double(row.total_size_bytes) << " price_of_fog "
              << optional_text(row.price_of_fog) << " mean_distance_km "
              << optional_text(row.mean_distance_km) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

bool has_flag(const std::vector<std::string>& args, std::string_view long_name,
              std::string_view short_name) {
  for (const auto& a : args) {
    if (a == "--") break;
    if (a == long_name || a.starts_with(std::string(long_name) + "=")) return true;
    if (a.starts_with(short_name) && !a.starts_with("--")) return true;
  }
  return false;
}

void add_options(CLI::App& app, Settings& s) {
  app.set_config("--config", "", "Key-value config file (key = value per line)");

  app.add_option("-o,--output-dir", s.output_dir, "Output directory")->capture_default_str();
  app.add_option("--scenario", s.scenario_dir,
                 "Scenario directory to read (evaluate/sweep; default: output dir)");
  app.add_option("-j,--jobs", s.jobs, "Worker threads; output does not depend on it")
      ->capture_default_str();
  app.add_option("--seed", s.seed, "Master seed")->capture_default_str();

  const char* topo = "Topology";
  app.add_option("--fanout", s.fanout, "Children per ring, pod and core")->group(topo)
      ->capture_default_str();
  app.add_option("--grouping", s.grouping, "hilbert or random")->group(topo)->capture_default_str();

  const char* synth = "Synthesis";
  app.add_option("--operator", s.operator_name, "Operator name")->group(synth)->capture_default_str();
  app.add_option("--style", s.style, "dense_small or sparse_large")->group(synth)
      ->capture_default_str();
  app.add_option("--cells", s.cells, "Number of cells")->group(synth)->capture_default_str();
  app.add_option("--users", s.users, "Number of vehicular users")->group(synth)
      ->capture_default_str();
  app.add_option("--hours", s.hours, "Simulated hours")->group(synth)->capture_default_str();
  app.add_option("--requests-per-hour", s.requests_per_hour, "Mean requests per user-hour")
      ->group(synth)->capture_default_str();
  app.add_option("--operators", s.operators, "Several operators as name:style:cells")
      ->group(synth)->delimiter(',');
  app.add_option("--size-policy", s.size_policy, "first_draw or unit")->group(synth)
      ->capture_default_str();
  app.add_option("--start-day", s.start_day, "First day (YYYY-MM-DD)")->group(synth)
      ->capture_default_str();
  app.add_flag("--jsonl", s.jsonl, "Also write requests.jsonl")->group(synth);

  const char* demand = "Demand";
  app.add_option("--zipf-exponent", s.zipf_exponent)->group(demand)->capture_default_str();
  app.add_option("--catalog-size", s.catalog_size)->group(demand)->capture_default_str();
  app.add_option("--popular-pool", s.popular_pool)->group(demand)->capture_default_str();
  app.add_option("--popular-prob", s.popular_prob)->group(demand)->capture_default_str();
  app.add_option("--local-pool", s.local_pool)->group(demand)->capture_default_str();
  app.add_option("--local-prob", s.local_prob)->group(demand)->capture_default_str();
  app.add_option("--video-weights", s.video_weights, "CSV item,weight replacing the Zipf catalog")
      ->group(demand);

  const char* ingest = "Ingest";
  app.add_option("--trace", s.trace, "Trace CSV")->group(ingest);
  app.add_option("--schema", s.schema, "Column mapping file (field = column)")->group(ingest);
  app.add_option("--rules", s.rules, "Category rules CSV")->group(ingest);
  app.add_option("--static-km", s.static_km)->group(ingest)->capture_default_str();
  app.add_option("--vehicular-km", s.vehicular_km)->group(ingest)->capture_default_str();

  const char* eval = "Evaluation";
  app.add_option("--target", s.target, "Target hit ratio")->group(eval)->capture_default_str();
  app.add_option("--weighting", s.weighting, "requests or bytes")->group(eval)
      ->capture_default_str();
  app.add_option("--architectures", s.architectures, "Subset of base_station,ring,pod,core")
      ->group(eval)->delimiter(',');
  app.add_flag("--exclude-non-cacheable", s.exclude_non_cacheable,
               "Never mark RealTime/Players pairs")->group(eval);
  app.add_flag("--unit-sizes", s.unit_sizes, "Count items instead of bytes")->group(eval);
  app.add_flag("--strict", s.strict, "Exit with code 3 when a target is infeasible")->group(eval);
  app.add_option("--format", s.format, "Report format: csv, json or both")->group(eval)
      ->capture_default_str();

  const char* sweep = "Sweep";
  app.add_option("--axis", s.axis, "p or q")->group(sweep)->capture_default_str();
  app.add_option("--grid", s.grid, "Strictly increasing values in [0, 1]")->group(sweep)
      ->delimiter(',');
  app.add_option("--seeds", s.seeds, "Explicit perturbation seeds")->group(sweep)->delimiter(',');
  app.add_option("--seed-count", s.seed_count, "Seeds derived from the master seed")->group(sweep)
      ->capture_default_str();
  app.add_option("--top-fraction", s.top_fraction, "Recommendation pool fraction")->group(sweep)
      ->capture_default_str();
  app.add_option("--local-items", s.local_items, "Location-specific items per cell")
      ->group(sweep)->capture_default_str();
  app.add_option("--p", s.p, "Fixed p while sweeping q")->group(sweep)->capture_default_str();
  app.add_option("--q", s.q, "Fixed q while sweeping p")->group(sweep)->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& input) {
  std::vector<std::string> args = input;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env && !has_flag(args, "--output-dir", "-o"))
    args.insert(args.end(), {"--output-dir", env});
  if (const char* env = std::getenv(kJobsEnv); env && *env && !has_flag(args, "--jobs", "-j"))
    args.insert(args.end(), {"--jobs", env});

  Settings settings;
  CLI::App app{"fogcache: trace-driven evaluation of hierarchical cellular caching"};
  app.fallthrough();
  app.require_subcommand(1);
  add_options(app, settings);
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  auto* ingest = app.add_subcommand("ingest", "Build a scenario from a trace CSV");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Place caches at the target hit ratio");
  auto* sweep = app.add_subcommand("sweep", "Sweep recommendation (p) or locality (q) bias");

  std::vector<char*> argv;
  std::string program = "fogcache";
  argv.push_back(program.data());
  for (auto& a : args) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    if (*synth) return cmd_synth(settings);
    if (*ingest) return cmd_ingest(settings);
    if (*evaluate_cmd) return cmd_evaluate(settings);
    if (*sweep) return cmd_sweep(settings);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kValidationError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace fogcache::cli
