#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "quarter.hpp"

namespace xbnet {

inline constexpr std::string_view kPanelCsvHeader =
    "entity,period,claims,liabilities";

/// Quarterly panel of bilateral claims and liabilities. Matrices are indexed
/// [entity][period]; entities are unique and sorted, periods are consecutive
/// quarters, and every (entity, period) cell is present.
struct Panel {
  std::vector<std::string> entities;
  std::vector<Quarter> periods;
  std::vector<std::vector<double>> claims;
  std::vector<std::vector<double>> liabilities;

  std::size_t entity_count() const { return entities.size(); }
  std::size_t period_count() const { return periods.size(); }
};

/// Net claims p(i,t) = claims(i,t) - liabilities(i,t), same axes as Panel.
struct PositionMatrix {
  std::vector<std::string> entities;
  std::vector<Quarter> periods;
  std::vector<std::vector<double>> positions;

  std::size_t entity_count() const { return entities.size(); }
  std::size_t period_count() const { return periods.size(); }

  std::size_t entity_index(std::string_view entity) const {
    for (std::size_t i = 0; i < entities.size(); ++i)
      if (entities[i] == entity) return i;
    fail(errc::unknown_entity,
         "unknown entity '" + std::string(entity) + "'");
  }
};

enum class Role { creditor, debtor, neutral };

inline std::string_view role_name(Role role) {
  switch (role) {
    case Role::creditor: return "Creditor";
    case Role::debtor: return "Debtor";
    case Role::neutral: return "Neutral";
  }
  return "Neutral";
}

/// Sign of the average net-claims series over a period range.
struct RoleAssignment {
  std::string entity;
  double average_position = 0.0;
  Role role = Role::neutral;
};

namespace detail {

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline double parse_amount(std::string_view field, std::size_t line_no,
                           std::string_view column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    fail(errc::malformed_value,
         "line " + std::to_string(line_no) + ": non-numeric " +
             std::string(column) + " '" + std::string(field) + "'");
  return value;
}

// Shortest decimal form that parses back to the same double.
inline void append_double(std::string& out, double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, res.ptr);
}

}  // namespace detail

/// Parses the long-format panel CSV (header `entity,period,claims,liabilities`).
/// Row order in the stream is irrelevant: the result is canonical, with
/// entities sorted lexicographically and periods chronological.
inline Panel parse_panel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    fail(errc::malformed_header, "empty input, expected header '" +
                                     std::string(kPanelCsvHeader) + "'");
  detail::strip_cr(line);
  if (line != kPanelCsvHeader)
    fail(errc::malformed_header, "bad header '" + line + "', expected '" +
                                     std::string(kPanelCsvHeader) + "'");

  struct Cell {
    double claims;
    double liabilities;
  };
  std::map<std::string, std::map<Quarter, Cell>, std::less<>> records;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != 4)
      fail(errc::malformed_value, "line " + std::to_string(line_no) +
                                      ": expected 4 fields, got " +
                                      std::to_string(fields.size()));
    if (fields[0].empty())
      fail(errc::malformed_value,
           "line " + std::to_string(line_no) + ": empty entity code");
    auto period = Quarter::parse(fields[1]);
    if (!period)
      fail(errc::malformed_period, "line " + std::to_string(line_no) +
                                       ": bad period label '" +
                                       std::string(fields[1]) + "'");
    double claims = detail::parse_amount(fields[2], line_no, "claims");
    double liabilities =
        detail::parse_amount(fields[3], line_no, "liabilities");

    auto& per_entity = records[std::string(fields[0])];
    auto [it, inserted] =
        per_entity.try_emplace(*period, Cell{claims, liabilities});
    if (!inserted)
      fail(errc::duplicate_record, "duplicate record for entity '" +
                                       std::string(fields[0]) + "' period " +
                                       period->str());
  }
  if (records.empty()) fail(errc::empty_panel, "panel has no data rows");

  Quarter first = records.begin()->second.begin()->first;
  Quarter last = first;
  for (const auto& [entity, cells] : records) {
    first = std::min(first, cells.begin()->first);
    last = std::max(last, cells.rbegin()->first);
  }

  Panel panel;
  for (Quarter q = first; q <= last; q = q.next()) panel.periods.push_back(q);
  for (const auto& [entity, cells] : records) {
    std::vector<double> claims_row, liab_row;
    claims_row.reserve(panel.periods.size());
    liab_row.reserve(panel.periods.size());
    for (Quarter q : panel.periods) {
      auto it = cells.find(q);
      if (it == cells.end())
        fail(errc::gap_in_periods,
             "entity '" + entity + "' is missing quarter " + q.str());
      claims_row.push_back(it->second.claims);
      liab_row.push_back(it->second.liabilities);
    }
    panel.entities.push_back(entity);
    panel.claims.push_back(std::move(claims_row));
    panel.liabilities.push_back(std::move(liab_row));
  }
  return panel;
}

inline Panel load_panel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path.string() + "'");
  return parse_panel(in);
}

inline void write_panel_csv(const Panel& panel, std::ostream& out) {
  std::string buf(kPanelCsvHeader);
  buf += '\n';
  for (std::size_t i = 0; i < panel.entity_count(); ++i) {
    for (std::size_t t = 0; t < panel.period_count(); ++t) {
      buf += panel.entities[i];
      buf += ',';
      buf += panel.periods[t].str();
      buf += ',';
      detail::append_double(buf, panel.claims[i][t]);
      buf += ',';
      detail::append_double(buf, panel.liabilities[i][t]);
      buf += '\n';
    }
  }
  out << buf;
}

inline PositionMatrix compute_positions(const Panel& panel) {
  PositionMatrix m;
  m.entities = panel.entities;
  m.periods = panel.periods;
  m.positions.reserve(panel.entity_count());
  for (std::size_t i = 0; i < panel.entity_count(); ++i) {
    std::vector<double> row(panel.period_count());
    for (std::size_t t = 0; t < panel.period_count(); ++t)
      row[t] = panel.claims[i][t] - panel.liabilities[i][t];
    m.positions.push_back(std::move(row));
  }
  return m;
}

/// Inclusive sub-range [from, to] of the period axis; entity set unchanged.
inline PositionMatrix slice_periods(const PositionMatrix& m, Quarter from,
                                    Quarter to) {
  if (m.periods.empty()) fail(errc::empty_panel, "empty position matrix");
  if (to < from)
    fail(errc::range_out_of_bounds,
         "slice range " + from.str() + ".." + to.str() + " is reversed");
  if (from < m.periods.front() || m.periods.back() < to)
    fail(errc::range_out_of_bounds,
         "slice range " + from.str() + ".." + to.str() +
             " outside available periods " + m.periods.front().str() + ".." +
             m.periods.back().str());

  std::size_t lo = static_cast<std::size_t>(from.index() -
                                            m.periods.front().index());
  std::size_t hi =
      static_cast<std::size_t>(to.index() - m.periods.front().index());

  PositionMatrix out;
  out.entities = m.entities;
  out.periods.assign(m.periods.begin() + lo, m.periods.begin() + hi + 1);
  out.positions.reserve(m.entity_count());
  for (const auto& row : m.positions)
    out.positions.emplace_back(row.begin() + lo, row.begin() + hi + 1);
  return out;
}

inline double average_position(const PositionMatrix& m,
                               std::string_view entity) {
  std::size_t i = m.entity_index(entity);
  if (m.period_count() == 0) fail(errc::empty_panel, "no periods to average");
  double sum = 0.0;
  for (double v : m.positions[i]) sum += v;
  return sum / static_cast<double>(m.period_count());
}

/// One assignment per entity, ordered by entity code. Zero average maps to
/// Neutral rather than either side of the creditor/debtor split.
inline std::vector<RoleAssignment> classify_roles(const PositionMatrix& m) {
  std::vector<RoleAssignment> out;
  out.reserve(m.entity_count());
  for (const auto& entity : m.entities) {
    double avg = average_position(m, entity);
    Role role = Role::neutral;
    if (avg > 0.0)
      role = Role::creditor;
    else if (avg < 0.0)
      role = Role::debtor;
    out.push_back(RoleAssignment{entity, avg, role});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.entity < b.entity;
  });
  return out;
}

struct RoleRanking {
  std::vector<RoleAssignment> creditors;  // descending average position
  std::vector<RoleAssignment> debtors;    // ascending (most negative first)
};

inline RoleRanking rank_by_magnitude(std::span<const RoleAssignment> roles,
                                     std::size_t k) {
  RoleRanking ranking;
  for (const auto& r : roles) {
    if (r.role == Role::creditor) ranking.creditors.push_back(r);
    if (r.role == Role::debtor) ranking.debtors.push_back(r);
  }
  std::sort(ranking.creditors.begin(), ranking.creditors.end(),
            [](const auto& a, const auto& b) {
              if (a.average_position != b.average_position)
                return a.average_position > b.average_position;
              return a.entity < b.entity;
            });
  std::sort(ranking.debtors.begin(), ranking.debtors.end(),
            [](const auto& a, const auto& b) {
              if (a.average_position != b.average_position)
                return a.average_position < b.average_position;
              return a.entity < b.entity;
            });
  if (ranking.creditors.size() > k) ranking.creditors.resize(k);
  if (ranking.debtors.size() > k) ranking.debtors.resize(k);
  return ranking;
}

inline void write_roles_csv(std::span<const RoleAssignment> roles,
                            std::ostream& out) {
  std::string buf = "entity,average_position,role\n";
  for (const auto& r : roles) {
    buf += r.entity;
    buf += ',';
    detail::append_double(buf, r.average_position);
    buf += ',';
    buf += role_name(r.role);
    buf += '\n';
  }
  out << buf;
}

}  // namespace xbnet
