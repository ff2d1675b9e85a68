#pragma once
#include <stdexcept>
#include <string>

namespace tailnest {

// Library-wide numeric policy.
// kProbTol guards probability/order predicates; kExactTol guards algebraic
// identities that must hold to rounding (transform round trips, oracle
// comparisons).
inline constexpr double kProbTol = 1e-9;
inline constexpr double kExactTol = 1e-12;

inline constexpr int kMaxDimensionHard = 20;   // 2^20 weights per level
inline constexpr int kDefaultDimensionCap = 16;
inline constexpr std::size_t kGridCellBudget = std::size_t{1} << 24;
inline constexpr double kMarginClampEps = 1e-15;
inline constexpr double kMinShaperBase = 1e-3;  // floor for base halving in builders

enum class Errc {
  parse,       // malformed input document
  validation,  // well-formed but violates a model invariant
  bounds,      // argument outside its domain
  budget,      // resolution/cell budget exceeded
  io,          // file system failure
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace tailnest
