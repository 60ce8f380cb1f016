#pragma once

// Shared numeric kernel: scalar type, tolerances, errors, deterministic RNG,
// and a slot-based parallel map whose output does not depend on worker count.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hilbert {

// 80-bit extended precision. The flow contract asks for 1e-9 accuracy at
// Hilbert time 10, where chart coordinates sit ~e^{-20} from the boundary;
// plain double storage of such points already costs ~7e-9.
using Real = long double;

// Ambient (homogeneous) dimension is at most 4: domains live in RP^1..RP^3.
using VecH = Eigen::Matrix<Real, Eigen::Dynamic, 1, 0, 4, 1>;
using VecC = Eigen::Matrix<Real, Eigen::Dynamic, 1, 0, 3, 1>;
using RowH = Eigen::Matrix<Real, 1, Eigen::Dynamic, Eigen::RowMajor, 1, 4>;
using RowC = Eigen::Matrix<Real, 1, Eigen::Dynamic, Eigen::RowMajor, 1, 3>;
using MatH = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using MatC = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline constexpr Real eps_geom = 1e-10L;      // collinearity / coincidence
inline constexpr Real tol_boundary = 1e-8L;   // membership of a point in the boundary

enum class Errc {
  NonCollinear,
  DegenerateQuadruple,
  SingularMatrix,
  ChartUndefined,
  CoincidentPoints,
  NotInterior,
  NotOnBoundary,
  DegenerateLimitSet,
  NoDominantEigenvalue,
  NotProperExtremal,
  IncidenceDegenerate,
  NoBracket,
  DomainNotPreserved,
  FrontierOverflow,
  IncompleteRadius,
  DegenerateWindow,
  EmptyBall,
  EmptyCell,
  NoTransversal,
  UnderResolved,
  DegenerateLattice,
  DegenerateSample,
  BadDomain,
  BadTransform,
  ConfigInvalid,
  ComputeError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonCollinear: return "NonCollinear";
    case Errc::DegenerateQuadruple: return "DegenerateQuadruple";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::ChartUndefined: return "ChartUndefined";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::NotInterior: return "NotInterior";
    case Errc::NotOnBoundary: return "NotOnBoundary";
    case Errc::DegenerateLimitSet: return "DegenerateLimitSet";
    case Errc::NoDominantEigenvalue: return "NoDominantEigenvalue";
    case Errc::NotProperExtremal: return "NotProperExtremal";
    case Errc::IncidenceDegenerate: return "IncidenceDegenerate";
    case Errc::NoBracket: return "NoBracket";
    case Errc::DomainNotPreserved: return "DomainNotPreserved";
    case Errc::FrontierOverflow: return "FrontierOverflow";
    case Errc::IncompleteRadius: return "IncompleteRadius";
    case Errc::DegenerateWindow: return "DegenerateWindow";
    case Errc::EmptyBall: return "EmptyBall";
    case Errc::EmptyCell: return "EmptyCell";
    case Errc::NoTransversal: return "NoTransversal";
    case Errc::UnderResolved: return "UnderResolved";
    case Errc::DegenerateLattice: return "DegenerateLattice";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::BadDomain: return "BadDomain";
    case Errc::BadTransform: return "BadTransform";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::ComputeError: return "ComputeError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) raise(code, what);
}

// log(e^a + e^b) without overflow
inline Real logaddexp(Real a, Real b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a) && a < 0) return b;
  return a + std::log1p(std::exp(b - a));
}

template <typename T>
inline int sgn(T x) {
  return (T(0) < x) - (x < T(0));
}

// splitmix64; all sampling in the toolkit goes through explicit seeds
struct Rng {
  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // child stream for item i; keeps parallel sampling order-free
  Rng fork(std::uint64_t i) const {
    Rng r(state ^ (0x632be59bd9b4e019ull * (i + 1)));
    r.next_u64();
    return r;
  }

  std::uint64_t state;
};

// Runs body(i) for i in [0, n); each i writes only its own preallocated slot,
// so results are identical for every worker count.
template <typename F>
inline void parallel_for(std::size_t n, int workers, F&& body) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += nw) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hilbert
