#include "fogcache/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fogcache/csv.hpp"
#include "fogcache/error.hpp"

namespace fogcache {

using nlohmann::json;

namespace {

const std::vector<std::string> kRequestColumns = {"user_id",  "day",         "hour",    "operator",
                                                  "cell_id", "category", "item_id", "bytes"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_json_file(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Request make_request(std::string user, std::string day, std::string_view hour, std::string op,
                     std::string cell, std::string_view category, std::string item,
                     std::string_view bytes, const std::string& where) {
  Request r;
  r.user_id = std::move(user);
  r.day = std::move(day);
  const auto h = csv::parse_int(hour);
  if (!h || *h < 0 || *h > 23) throw ValidationError(where + ": bad hour");
  r.hour = static_cast<int>(*h);
  r.operator_name = std::move(op);
  r.cell_id = std::move(cell);
  if (csv::trim(category).empty()) throw ValidationError(where + ": request without category");
  const auto cat = parse_category(category);
  if (!cat) throw ValidationError(where + ": unknown category '" + std::string(category) + "'");
  r.category = *cat;
  if (item.empty()) throw ValidationError(where + ": request without item_id");
  r.item = std::move(item);
  const auto b = csv::parse_uint(bytes);
  if (!b || *b == 0) throw ValidationError(where + ": bytes must be a positive integer");
  r.bytes = *b;
  if (r.cell_id.empty()) throw ValidationError(where + ": request without cell_id");
  return r;
}

}  // namespace

void write_text(const std::filesystem::path& path, std::string_view text) {
  auto out = csv::open_output(path);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_requests_csv(const std::filesystem::path& path, std::span<const Request> requests) {
  auto out = csv::open_output(path);
  out << csv::join(kRequestColumns) << '\n';
  for (const auto& r : requests) {
    out << csv::join({r.user_id, r.day, std::to_string(r.hour), r.operator_name, r.cell_id,
                      std::string(to_string(r.category)), r.item, std::to_string(r.bytes)})
        << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Request> read_requests_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("missing file " + path.string());
  csv::Reader reader(path);
  const auto header = reader.next();
  if (!header) throw ValidationError(path.string() + ": missing header");
  std::vector<std::size_t> idx;
  for (const auto& name : kRequestColumns) {
    const auto it = std::find(header->begin(), header->end(), name);
    if (it == header->end())
      throw ValidationError(path.string() + ": missing column '" + name + "'");
    idx.push_back(static_cast<std::size_t>(it - header->begin()));
  }
  std::vector<Request> out;
  while (auto row = reader.next()) {
    const auto where = path.string() + ":" + std::to_string(reader.line_number());
    if (row->size() != header->size()) throw ValidationError(where + ": wrong field count");
    auto& f = *row;
    out.push_back(make_request(f[idx[0]], f[idx[1]], f[idx[2]], f[idx[3]], f[idx[4]], f[idx[5]],
                               f[idx[6]], f[idx[7]], where));
  }
  return out;
}

void write_requests_jsonl(const std::filesystem::path& path, std::span<const Request> requests) {
  auto out = csv::open_output(path);
  for (const auto& r : requests) {
    json j = {{"user_id", r.user_id},       {"day", r.day},
              {"hour", r.hour},             {"operator", r.operator_name},
              {"cell_id", r.cell_id},       {"category", to_string(r.category)},
              {"item_id", r.item},          {"bytes", r.bytes}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Request> read_requests_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Request> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto j = json::parse(line);
      out.push_back(make_request(j.at("user_id").get<std::string>(), j.at("day").get<std::string>(),
                                 std::to_string(j.at("hour").get<int>()),
                                 j.at("operator").get<std::string>(),
                                 j.at("cell_id").get<std::string>(),
                                 j.value("category", std::string{}),
                                 j.value("item_id", std::string{}),
                                 std::to_string(j.at("bytes").get<std::uint64_t>()), where));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return out;
}

void write_items_csv(const std::filesystem::path& path, const ItemCatalog& catalog) {
  auto out = csv::open_output(path);
  out << "item_id,category,size_bytes,local_to\n";
  for (const auto& [id, item] : catalog.items()) {
    out << csv::join({id, std::string(to_string(item.category)), std::to_string(item.size_bytes),
                      item.local_to.value_or("")})
        << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

ItemCatalog read_items_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("missing file " + path.string());
  csv::Reader reader(path);
  const auto header = reader.next();
  if (!header || header->size() != 4 || (*header)[0] != "item_id")
    throw ValidationError(path.string() + ": expected header item_id,category,size_bytes,local_to");
  ItemCatalog catalog;
  while (auto row = reader.next()) {
    const auto where = path.string() + ":" + std::to_string(reader.line_number());
    if (row->size() != 4) throw ValidationError(where + ": wrong field count");
    ContentItem item;
    item.item_id = (*row)[0];
    const auto cat = parse_category((*row)[1]);
    const auto size = csv::parse_uint((*row)[2]);
    if (!cat) throw ValidationError(where + ": unknown category");
    if (!size || *size == 0) throw ValidationError(where + ": size_bytes must be positive");
    item.category = *cat;
    item.size_bytes = *size;
    if (!(*row)[3].empty()) item.local_to = (*row)[3];
    catalog.put(std::move(item));
  }
  return catalog;
}

void write_cells_json(const std::filesystem::path& path, std::span<const CellEstimate> cells) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["cells"] = json::array();
  for (const auto& c : cells) {
    json hull = json::array();
    for (const auto& p : c.hull) hull.push_back({p.lat, p.lon});
    doc["cells"].push_back({{"operator", c.operator_name},
                            {"cell_id", c.cell_id},
                            {"barycenter", {c.barycenter.lat, c.barycenter.lon}},
                            {"area_km2", c.area_km2},
                            {"observation_count", c.observation_count},
                            {"hull", hull}});
  }
  write_text(path, doc.dump(1) + "\n");
}

std::vector<CellEstimate> read_cells_json(const std::filesystem::path& path) {
  const auto doc = parse_json_file(path);
  std::vector<CellEstimate> cells;
  try {
    for (const auto& j : doc.at("cells")) {
      CellEstimate c;
      c.operator_name = j.at("operator").get<std::string>();
      c.cell_id = j.at("cell_id").get<std::string>();
      c.barycenter = {j.at("barycenter").at(0).get<double>(), j.at("barycenter").at(1).get<double>()};
      c.area_km2 = j.at("area_km2").get<double>();
      c.observation_count = j.at("observation_count").get<std::size_t>();
      for (const auto& p : j.at("hull")) c.hull.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      cells.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return cells;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  json doc = {{"schema_version", m.schema_version},
              {"mode", m.mode},
              {"seed", m.seed},
              {"size_policy", to_string(m.size_policy)},
              {"fanout", m.fanout},
              {"counts", {{"cells", m.cells}, {"requests", m.requests}, {"items", m.items}}},
              {"operators", m.operators}};
  write_text(path, doc.dump(1) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
  const auto doc = parse_json_file(path);
  Manifest m;
  try {
    m.schema_version = doc.at("schema_version").get<int>();
    if (m.schema_version != kSchemaVersion)
      throw ValidationError(path.string() + ": unsupported schema_version " +
                            std::to_string(m.schema_version));
    m.mode = doc.at("mode").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    const auto policy = parse_size_policy(doc.at("size_policy").get<std::string>());
    if (!policy) throw ValidationError(path.string() + ": unknown size_policy");
    m.size_policy = *policy;
    m.fanout = doc.at("fanout").get<std::size_t>();
    m.cells = doc.at("counts").at("cells").get<std::size_t>();
    m.requests = doc.at("counts").at("requests").get<std::size_t>();
    m.items = doc.at("counts").at("items").get<std::size_t>();
    m.operators = doc.at("operators").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return m;
}

ScenarioPaths::ScenarioPaths(const std::filesystem::path& dir)
    : manifest(dir / "manifest.json"),
      cells(dir / "cells.json"),
      topology(dir / "topology.json"),
      requests(dir / "requests.csv"),
      items(dir / "items.csv") {}

void write_scenario(const std::filesystem::path& dir, const Manifest& manifest,
                    std::span<const CellEstimate> cells, const Scenario& scenario) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  const ScenarioPaths paths(dir);
  write_manifest(paths.manifest, manifest);
  write_cells_json(paths.cells, cells);
  save_topologies(paths.topology, scenario.topologies);
  write_requests_csv(paths.requests, scenario.requests);
  write_items_csv(paths.items, scenario.catalog);
}

Scenario load_scenario(const std::filesystem::path& dir) {
  const ScenarioPaths paths(dir);
  for (const auto& p : {paths.manifest, paths.topology, paths.requests, paths.items})
    if (!std::filesystem::exists(p)) throw IoError("missing scenario file " + p.string());
  const auto manifest = read_manifest(paths.manifest);
  Scenario s;
  s.size_policy = manifest.size_policy;
  s.topologies = load_topologies(paths.topology);
  s.requests = read_requests_csv(paths.requests);
  s.catalog = read_items_csv(paths.items);
  return s;
}

}  // namespace fogcache
