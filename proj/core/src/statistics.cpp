#include "rankone/statistics.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "rankone/transform.hpp"

namespace rankone {

ReturnProfile return_profile(const Construction& c, int j, int J, std::int64_t z_max, int threads) {
  if (j > J) throw std::invalid_argument("return_profile requires j <= J");
  if (z_max < 0) throw std::invalid_argument("z_max must be nonnegative");
  const auto occ = c.occurrences(j, J);
  const std::vector<std::int64_t>& s = *occ;
  const std::int64_t h = c.height(J);
  const Rational count(static_cast<long>(s.size()));

  std::vector<char> member(static_cast<std::size_t>(h), 0);
  for (auto p : s) member[static_cast<std::size_t>(p)] = 1;

  ReturnProfile out;
  out.j = j;
  out.J = J;
  out.values.resize(static_cast<std::size_t>(z_max + 1));
  out.degenerate = z_max >= h;

  auto fill = [&](std::int64_t from, std::int64_t to) {
    for (std::int64_t z = from; z < to; ++z) {
      long overlap = 0;
      long unresolved = 0;
      for (auto p : s) {
        if (p + z >= h) ++unresolved;
        else if (member[static_cast<std::size_t>(p + z)]) ++overlap;
      }
      Rational lo = Rational(overlap) / count;
      out.values[static_cast<std::size_t>(z)] = MeasureBound(lo, lo + Rational(unresolved) / count);
    }
  };

  const std::int64_t total = z_max + 1;
  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, total));
  if (workers == 1) {
    fill(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (total + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const std::int64_t from = t * chunk;
      const std::int64_t to = std::min(total, from + chunk);
      if (from < to) pool.emplace_back(fill, from, to);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

MeasureBound max_profile(const ReturnProfile& profile, std::int64_t z_lo) {
  if (z_lo < 0 || z_lo >= profile.z_max())
    throw std::invalid_argument("max_profile range (" + std::to_string(z_lo) + ", " +
                                std::to_string(profile.z_max()) + "] is empty");
  Rational lo = 0, hi = 0;
  for (std::int64_t z = z_lo + 1; z <= profile.z_max(); ++z) {
    lo = std::max(lo, profile.at(z).lo());
    hi = std::max(hi, profile.at(z).hi());
  }
  return {lo, hi};
}

std::map<std::int64_t, MeasureBound> window_sums(const ReturnProfile& profile, std::int64_t q) {
  if (q < 0) throw std::invalid_argument("window length must be nonnegative");
  if (q > profile.z_max())
    throw std::invalid_argument("window length " + std::to_string(q) + " exceeds the profile range [0, " +
                                std::to_string(profile.z_max()) + "]");
  std::map<std::int64_t, MeasureBound> out;
  for (std::int64_t z = 0; z + q <= profile.z_max(); ++z) {
    MeasureBound sum;
    for (std::int64_t w = z; w <= z + q; ++w) sum += profile.at(w);
    out.emplace(z, sum);
  }
  return out;
}

MeasureBound correlation(const Construction& c, const IntervalSet& a, const IntervalSet& b, std::int64_t m,
                         int J) {
  const SetImage moved = power_image(c, b, m, J);
  const Rational lo = intersection_measure(a, moved.image);
  // Escaped mass of B lands outside the resolved image, so at most μ(A) - lo of it can meet A.
  const Rational room = a.measure() - lo;
  const Rational extra = std::min(moved.escaped.hi(), room);
  return {lo, lo + extra};
}

CorrelationSeries correlation_series(const Construction& c, const IntervalSet& a, const IntervalSet& b,
                                     std::int64_t m_max, int J) {
  if (m_max < 0) throw std::invalid_argument("m_max must be nonnegative");
  CorrelationSeries out{a, b, {}, a.measure() * b.measure()};
  for (std::int64_t m = 0; m <= m_max; ++m) out.values.push_back(correlation(c, a, b, m, J));
  return out;
}

}  // namespace rankone
