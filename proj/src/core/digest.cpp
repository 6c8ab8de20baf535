#include "guirl/core/digest.hpp"

#include <cstring>

namespace guirl::core {

namespace {
constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace

DigestWriter::DigestWriter() : state_(kFnvOffset) {}

void DigestWriter::byte(unsigned char b) {
  state_ ^= b;
  state_ *= kFnvPrime;
}

void DigestWriter::write(std::string_view s) {
  write_u64(s.size());
  for (char c : s) byte(static_cast<unsigned char>(c));
  byte(0x1f);  // field separator
}

void DigestWriter::write_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void DigestWriter::write_i64(std::int64_t v) { write_u64(static_cast<std::uint64_t>(v)); }

void DigestWriter::write_double(double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  write_u64(bits);
}

void DigestWriter::write_bool(bool v) { byte(v ? 1 : 0); }

std::string DigestWriter::hex() const { return to_hex(state_); }

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::uint64_t hash_string(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ splitmix64(seed);
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return splitmix64(h);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return splitmix64(hash_string(label, master));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::int64_t a) {
  return splitmix64(derive_seed(master, label) ^ splitmix64(static_cast<std::uint64_t>(a) + 0x51ed));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::int64_t a,
                          std::int64_t b) {
  return splitmix64(derive_seed(master, label, a) ^
                    splitmix64(static_cast<std::uint64_t>(b) + 0xa11ce));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::int64_t a,
                          std::int64_t b, std::int64_t c) {
  return splitmix64(derive_seed(master, label, a, b) ^
                    splitmix64(static_cast<std::uint64_t>(c) + 0xbee));
}

}  // namespace guirl::core
