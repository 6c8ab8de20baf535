#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace guirl::core {

// 64-bit FNV-1a accumulator over a canonical byte stream. Every digest in the
// project (environment states, trajectories, checkpoints) is this hash
// rendered as 16 lowercase hex characters; field boundaries are separated so
// adjacent fields cannot alias.
class DigestWriter {
 public:
  DigestWriter();

  void write(std::string_view s);
  void write_i64(std::int64_t v);
  void write_u64(std::uint64_t v);
  void write_double(double v);  // hashes the IEEE-754 bit pattern
  void write_bool(bool v);

  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  void byte(unsigned char b);
  std::uint64_t state_;
};

std::string to_hex(std::uint64_t v);

// Seeded string hash used for feature hashing and seed derivation.
std::uint64_t hash_string(std::string_view s, std::uint64_t seed);

// Derives an independent child seed from a master seed and a label path.
// Pure function; the whole project draws its randomness through this.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::int64_t a);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::int64_t a,
                          std::int64_t b);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::int64_t a,
                          std::int64_t b, std::int64_t c);

}  // namespace guirl::core
