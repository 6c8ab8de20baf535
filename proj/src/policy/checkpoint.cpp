#include "guirl/policy/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "guirl/core/error.hpp"

namespace guirl::policy {

namespace {
constexpr char kMagic[8] = {'G', 'R', 'L', 'C', 'K', 'P', 'T', '1'};
}

void save_checkpoint(const PolicySnapshot& snapshot, const std::string& path) {
  validate_layer_map(snapshot);
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const auto& seg : snapshot.layer_map) {
    layers.push_back(nlohmann::ordered_json{{"name", seg.name},
                                            {"offset", seg.offset},
                                            {"length", seg.length},
                                            {"group", seg.group}});
  }
  nlohmann::ordered_json header{{"version", snapshot.version},
                                {"feature_config", feature_config_to_json(snapshot.config)},
                                {"layer_map", std::move(layers)},
                                {"symbols", snapshot.symbols.names()},
                                {"theta_len", snapshot.theta.size()}};
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.write(reinterpret_cast<const char*>(snapshot.theta.data()),
            static_cast<std::streamsize>(snapshot.theta.size() * sizeof(double)));
  if (!out) throw ValidationError("short write of checkpoint: " + path);
}

PolicySnapshot load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("not a checkpoint file: " + path);
  }
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw ValidationError("truncated checkpoint header: " + path);
  const auto header = nlohmann::ordered_json::parse(hs);

  PolicySnapshot snap;
  snap.version = header.at("version").get<std::int64_t>();
  snap.config = feature_config_from_json(header.at("feature_config"));
  for (const auto& lj : header.at("layer_map")) {
    snap.layer_map.push_back({lj.at("name").get<std::string>(),
                              lj.at("offset").get<std::int64_t>(),
                              lj.at("length").get<std::int64_t>(),
                              lj.at("group").get<std::string>()});
  }
  snap.symbols =
      core::SymbolTable::from_names(header.at("symbols").get<std::vector<std::string>>());
  const auto n = header.at("theta_len").get<std::uint64_t>();
  snap.theta.resize(n);
  in.read(reinterpret_cast<char*>(snap.theta.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw ValidationError("truncated checkpoint payload: " + path);
  validate_layer_map(snap);
  return snap;
}

std::string checkpoint_file_digest(const std::string& path) {
  return snapshot_digest(load_checkpoint(path));
}

}  // namespace guirl::policy
