#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairbios {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorKind : int {
  Usage = 1,    // bad arguments / configuration
  Data = 2,     // bad input data, schema, or file problems
  Numeric = 3,  // numeric failure (non-finite loss, degenerate fit)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void throw_usage(const std::string& code, const std::string& msg) {
  throw Error(ErrorKind::Usage, code, msg);
}
[[noreturn]] inline void throw_data(const std::string& code, const std::string& msg) {
  throw Error(ErrorKind::Data, code, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& code, const std::string& msg) {
  throw Error(ErrorKind::Numeric, code, msg);
}

// ---------------------------------------------------------------------------
// Deterministic, platform-stable randomness. std::shuffle and the standard
// distributions are implementation-defined, so every stochastic step in the
// toolkit goes through these primitives.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n) without modulo bias.
  uint64_t next_below(uint64_t n);

 private:
  uint64_t state_;
};

// Fisher-Yates with our own Rng; identical order on every platform.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, uint64_t seed) {
  Rng rng(seed);
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// Counter-based uniform stream: the draw for a given (seed, index) pair does
// not depend on evaluation order.
inline double counter_uniform(uint64_t seed, uint64_t index) {
  uint64_t x = splitmix64(seed ^ splitmix64(index + 0x6A09E667F3BCC909ULL));
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Seeded FNV-1a over bytes. The seed is folded in through splitmix64 so that
// nearby seeds give unrelated hash streams.
inline uint64_t hash_bytes(std::string_view bytes, uint64_t seed) {
  uint64_t h = 14695981039346656037ULL ^ splitmix64(seed);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Derive an independent child seed from (seed, label), e.g. one per grid cell
// or per training epoch.
inline uint64_t derive_seed(uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ hash_bytes(label, 0));
}

// ---------------------------------------------------------------------------
// Small I/O helpers.

// Writes via a temp file in the same directory, then renames into place.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// Fixed-precision decimal rendering ("%.3f" style), used for table output so
// files are byte-stable.
std::string format_fixed(double v, int decimals);

}  // namespace fairbios
