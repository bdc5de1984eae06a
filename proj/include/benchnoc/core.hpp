#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace benchnoc {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;
using ConnId = std::uint32_t;

inline constexpr NodeId kInvalidNode = std::numeric_limits<NodeId>::max();
inline constexpr LinkId kInvalidLink = std::numeric_limits<LinkId>::max();

/// Error category for structured failures surfaced to callers and the CLI.
enum class ErrorKind {
  Validation,   // bad spec/config; message names the offending field
  Placement,    // placement does not fit the device
  Pattern,      // traffic pattern precondition violated
  Routing,      // no path / unroutable connection
  Config,       // inconsistent run configuration
  Io,           // file I/O
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Placement: return "placement";
    case ErrorKind::Pattern: return "pattern";
    case ErrorKind::Routing: return "routing";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& field, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error [" + field + "]: " + what),
        kind_(kind),
        field_(field) {}

  ErrorKind kind() const { return kind_; }
  /// Field or entity the error refers to (e.g. "slr_count", "n_pairs").
  const std::string& field() const { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

/// Deterministic 64-bit RNG (splitmix64). Used instead of <random>
/// distributions so schedules are bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, bound) via rejection; avoids modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
  }

 private:
  std::uint64_t state_;
};

/// One NoC flit carries flit_width bits; all byte rates below are powers of
/// ten (1 GB/s = 1e9 bytes/s) to match the vendor convention.
inline constexpr double kBytesPerGb = 1e9;

inline double mhz_to_cycle_ns(double mhz) { return 1000.0 / mhz; }

}  // namespace benchnoc
