#include "parse.hpp"

#include <charconv>
#include <stdexcept>

namespace rankone::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::int64_t to_int(const std::string& s) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

}  // namespace

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& tok : split(text, ',')) {
    const auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(tok));
      continue;
    }
    const auto lo = to_int(tok.substr(0, dots)), hi = to_int(tok.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty range '" + tok + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& tok : split(text, ',')) out.push_back(parse_rational(tok));
  return out;
}

WeightSequence parse_weights(const std::string& text) {
  if (text.rfind("uniform:", 0) == 0) return WeightSequence::uniform(to_int(text.substr(8)));
  if (text.rfind("delta:", 0) == 0) return WeightSequence::delta(to_int(text.substr(6)));
  std::map<std::int64_t, Rational> w;
  for (const auto& tok : split(text, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("weight entry '" + tok + "' must look like z:a");
    const auto z = to_int(tok.substr(0, colon));
    if (!w.emplace(z, parse_rational(tok.substr(colon + 1))).second)
      throw std::invalid_argument("weight for z=" + std::to_string(z) + " given twice");
  }
  return WeightSequence::from_map(std::move(w));
}

IntervalSet parse_set(const std::string& text, const Construction& c) {
  std::vector<Interval> parts;
  for (const auto& tok : split(text, ',')) {
    const auto f = split(tok, ':');
    if (f.size() == 3 && f[0] == "level") {
      const auto k = to_int(f[1]);
      if (k < 1 || k > c.max_stage()) throw std::invalid_argument("stage in '" + tok + "' is out of range");
      parts.push_back(c.stage(static_cast<int>(k))->level(to_int(f[2])));
    } else if (f.size() == 2) {
      const Interval iv{parse_rational(f[0]), parse_rational(f[1])};
      if (iv.lo < 0 || iv.hi > 1) throw std::invalid_argument("interval '" + tok + "' leaves [0, 1)");
      parts.push_back(iv);
    } else {
      throw std::invalid_argument("set token '" + tok + "' must be level:K:I or lo:hi");
    }
  }
  return IntervalSet::canonicalize(parts);
}

BlockIndex parse_block(const std::string& text) {
  const auto f = split(text, ',');
  if (f.size() != 2) throw std::invalid_argument("block '" + text + "' must look like z1,z2");
  return {to_int(f[0]), to_int(f[1])};
}

}  // namespace rankone::cli
