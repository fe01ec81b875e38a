#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace capdual {

inline constexpr const char* kVersion = "0.1.0";

// Every failure mode carries a stable machine-readable code so the CLI can
// emit single-line error records.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define CAPDUAL_DEFINE_ERROR(NAME, CODE)                                \
  class NAME : public Error {                                           \
   public:                                                              \
    explicit NAME(const std::string& what) : Error(CODE, what) {}       \
  };

CAPDUAL_DEFINE_ERROR(PreconditionError, "precondition")
CAPDUAL_DEFINE_ERROR(DivergentIntegral, "divergent_integral")
CAPDUAL_DEFINE_ERROR(InvalidCuts, "invalid_cuts")
CAPDUAL_DEFINE_ERROR(MeshFailure, "mesh_failure")
CAPDUAL_DEFINE_ERROR(EmptyTag, "empty_tag")
CAPDUAL_DEFINE_ERROR(DisconnectedTag, "disconnected_tag")
CAPDUAL_DEFINE_ERROR(SingularSystem, "singular_system")
CAPDUAL_DEFINE_ERROR(BranchFailure, "branch_failure")
CAPDUAL_DEFINE_ERROR(LookupFailure, "lookup_failure")
CAPDUAL_DEFINE_ERROR(UnresolvedScale, "unresolved_scale")
CAPDUAL_DEFINE_ERROR(DegenerateGeodesic, "degenerate_geodesic")
CAPDUAL_DEFINE_ERROR(Disconnected, "disconnected")
CAPDUAL_DEFINE_ERROR(IoError, "io_error")

#undef CAPDUAL_DEFINE_ERROR

inline void require(bool cond, const char* what) {
  if (!cond) throw PreconditionError(what);
}

namespace util {

// Thread cap: CAPDUAL_THREADS env var, else hardware concurrency.
int max_threads();

// Static-partition fork/join over [0,n). f(begin,end) must write only to
// disjoint per-index slots; any reduction happens serially afterwards, so
// results do not depend on the thread count.
void parallel_ranges(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& f);

// Fixed-order pairwise summation: deterministic and better conditioned than
// a running sum.
double pairwise_sum(std::span<const double> values);

std::uint64_t fnv1a(std::span<const unsigned char> bytes);
std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(std::uint64_t h);

// %.17g, locale independent.
std::string format_double(double v);

}  // namespace util
}  // namespace capdual
