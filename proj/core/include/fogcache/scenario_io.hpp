#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fogcache/demand.hpp"
#include "fogcache/sweep.hpp"
#include "fogcache/topology.hpp"

namespace fogcache {

inline constexpr int kSchemaVersion = 1;

// Request streams: CSV with header
//   user_id,day,hour,operator,cell_id,category,item_id,bytes
// or JSON lines with the same keys. Reading rejects rows without a category
// or item id, and non-positive byte counts.
void write_requests_csv(const std::filesystem::path& path, std::span<const Request> requests);
std::vector<Request> read_requests_csv(const std::filesystem::path& path);
void write_requests_jsonl(const std::filesystem::path& path, std::span<const Request> requests);
std::vector<Request> read_requests_jsonl(const std::filesystem::path& path);

// Items: CSV item_id,category,size_bytes,local_to.
void write_items_csv(const std::filesystem::path& path, const ItemCatalog& catalog);
ItemCatalog read_items_csv(const std::filesystem::path& path);

// Cell estimates with hulls, as JSON.
void write_cells_json(const std::filesystem::path& path, std::span<const CellEstimate> cells);
std::vector<CellEstimate> read_cells_json(const std::filesystem::path& path);

struct Manifest {
  int schema_version = kSchemaVersion;
  std::string mode;  // "synth" or "ingest"
  std::uint64_t seed = 0;
  SizePolicy size_policy = SizePolicy::MeanOfRequests;
  std::size_t fanout = 10;
  std::size_t cells = 0;
  std::size_t requests = 0;
  std::size_t items = 0;
  std::vector<std::string> operators;
};

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

// Scenario directory layout.
struct ScenarioPaths {
  std::filesystem::path manifest, cells, topology, requests, items;
  explicit ScenarioPaths(const std::filesystem::path& dir);
};

void write_scenario(const std::filesystem::path& dir, const Manifest& manifest,
                    std::span<const CellEstimate> cells, const Scenario& scenario);

// Reads manifest, topology, requests and items. Missing files are IoError.
Scenario load_scenario(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace fogcache
