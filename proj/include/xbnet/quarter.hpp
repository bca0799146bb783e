#pragma once

#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace xbnet {

/// Calendar quarter labeled "YYYYQn" (n in 1..4), totally ordered and
/// indexable on a gapless axis so consecutive quarters differ by one.
class Quarter {
 public:
  constexpr Quarter() = default;
  constexpr Quarter(int year, int quarter) : index_(year * 4 + quarter - 1) {}

  static std::optional<Quarter> parse(std::string_view label) {
    if (label.size() != 6 || label[4] != 'Q') return std::nullopt;
    int year = 0;
    for (int i = 0; i < 4; ++i) {
      char c = label[i];
      if (c < '0' || c > '9') return std::nullopt;
      year = year * 10 + (c - '0');
    }
    char q = label[5];
    if (q < '1' || q > '4') return std::nullopt;
    return Quarter(year, q - '0');
  }

  static constexpr Quarter from_index(int index) {
    Quarter q;
    q.index_ = index;
    return q;
  }

  constexpr int year() const { return index_ / 4; }
  constexpr int quarter() const { return index_ % 4 + 1; }
  constexpr int index() const { return index_; }
  constexpr Quarter next() const { return from_index(index_ + 1); }

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04dQ%d", year(), quarter());
    return buf;
  }

  friend constexpr auto operator<=>(Quarter, Quarter) = default;

 private:
  int index_ = 0;
};

}  // namespace xbnet
