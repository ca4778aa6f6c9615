#include "rankone/step_function.hpp"

#include <algorithm>
#include <map>

namespace rankone {

StepFunction StepFunction::indicator(const IntervalSet& set, const Rational& value) {
  return weighted_sum({{set, value}});
}

StepFunction StepFunction::weighted_sum(const std::vector<std::pair<IntervalSet, Rational>>& terms) {
  // Sweep over breakpoints carrying the running sum of active weights.
  std::vector<std::pair<Rational, Rational>> events;
  for (const auto& [set, weight] : terms) {
    if (weight == 0) continue;
    for (const auto& iv : set.intervals()) {
      events.emplace_back(iv.lo, weight);
      events.emplace_back(iv.hi, Rational(-weight));
    }
  }
  std::sort(events.begin(), events.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<Rational, std::vector<Interval>> by_value;
  Rational running = 0;
  for (std::size_t i = 0; i < events.size();) {
    const Rational at = events[i].first;
    while (i < events.size() && events[i].first == at) {
      running += events[i].second;
      ++i;
    }
    if (i < events.size() && running != 0) by_value[running].push_back({at, events[i].first});
  }

  StepFunction out;
  for (auto& [value, parts] : by_value) {
    out.pieces_.push_back({IntervalSet::canonicalize(std::move(parts)), value});
  }
  return out;
}

Rational StepFunction::value_at(const Rational& x) const {
  for (const auto& p : pieces_) {
    if (p.support.contains(x)) return p.value;
  }
  return 0;
}

Rational StepFunction::integral() const {
  Rational total = 0;
  for (const auto& p : pieces_) total += p.value * p.support.measure();
  return total;
}

Rational StepFunction::sup_abs() const {
  Rational best = 0;
  for (const auto& p : pieces_) best = std::max(best, abs(p.value));
  return best;
}

IntervalSet StepFunction::support() const {
  std::vector<Interval> all;
  for (const auto& p : pieces_) all.insert(all.end(), p.support.intervals().begin(), p.support.intervals().end());
  return IntervalSet::canonicalize(std::move(all));
}

StepFunction StepFunction::scaled(const Rational& factor) const {
  if (factor == 0) return {};
  StepFunction out = *this;
  for (auto& p : out.pieces_) p.value *= factor;
  if (factor < 0) std::reverse(out.pieces_.begin(), out.pieces_.end());
  return out;
}

namespace {

std::vector<std::pair<IntervalSet, Rational>> as_terms(const StepFunction& f, const Rational& sign) {
  std::vector<std::pair<IntervalSet, Rational>> terms;
  for (const auto& p : f.pieces()) terms.emplace_back(p.support, p.value * sign);
  return terms;
}

}  // namespace

StepFunction operator+(const StepFunction& f, const StepFunction& g) {
  auto terms = as_terms(f, 1);
  auto more = as_terms(g, 1);
  terms.insert(terms.end(), more.begin(), more.end());
  return StepFunction::weighted_sum(terms);
}

StepFunction operator-(const StepFunction& f, const StepFunction& g) {
  auto terms = as_terms(f, 1);
  auto more = as_terms(g, -1);
  terms.insert(terms.end(), more.begin(), more.end());
  return StepFunction::weighted_sum(terms);
}

Rational l2_inner(const StepFunction& f, const StepFunction& g) {
  Rational total = 0;
  for (const auto& p : f.pieces()) {
    for (const auto& r : g.pieces()) {
      total += p.value * r.value * intersection_measure(p.support, r.support);
    }
  }
  return total;
}

}  // namespace rankone
