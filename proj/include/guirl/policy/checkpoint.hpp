#pragma once

#include <string>

#include "guirl/policy/model.hpp"

namespace guirl::policy {

// Binary checkpoint: magic, JSON header (version, feature config, layer map,
// symbol names, theta length), then raw little-endian doubles. Round-trips
// bit-exactly, which the sparsity analysis depends on.
void save_checkpoint(const PolicySnapshot& snapshot, const std::string& path);
PolicySnapshot load_checkpoint(const std::string& path);

// Digest of the file as written (equals snapshot_digest of the loaded copy).
std::string checkpoint_file_digest(const std::string& path);

}  // namespace guirl::policy
