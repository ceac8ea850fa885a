#include "combmat/rng.hpp"

#include <cmath>

namespace combmat {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStringTag = 0x5D588B656C078965ULL;
constexpr std::uint64_t kIntegerTag = 0x2545F4914F6CDD1DULL;

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t PathLabel::hash() const noexcept {
  if (const auto* s = std::get_if<std::string>(&value_)) {
    return mix64(fnv1a(*s) ^ kStringTag);
  }
  return mix64(static_cast<std::uint64_t>(std::get<std::int64_t>(value_)) + kIntegerTag);
}

std::string PathLabel::to_string() const {
  if (const auto* s = std::get_if<std::string>(&value_)) return *s;
  return std::to_string(std::get<std::int64_t>(value_));
}

RngStream::RngStream(std::uint64_t seed, std::vector<PathLabel> path)
    : seed_(seed), path_(std::move(path)), key_(mix64(seed + kGoldenGamma)) {
  for (const auto& label : path_) {
    key_ = mix64(key_ ^ label.hash()) + kGoldenGamma;
  }
}

RngStream RngStream::child(const PathLabel& label) const {
  auto path = path_;
  path.push_back(label);
  return RngStream(seed_, std::move(path));
}

RngStream RngStream::child(std::initializer_list<PathLabel> labels) const {
  auto path = path_;
  path.insert(path.end(), labels.begin(), labels.end());
  return RngStream(seed_, std::move(path));
}

RngStream::result_type RngStream::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGoldenGamma);
}

double RngStream::uniform01() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

int RngStream::rademacher() noexcept { return ((*this)() >> 63) ? 1 : -1; }

double RngStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

RngStream derive_stream(std::uint64_t seed, std::vector<PathLabel> path) {
  return RngStream(seed, std::move(path));
}

}  // namespace combmat
