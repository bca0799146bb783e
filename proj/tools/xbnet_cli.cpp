// Command-line front end: panel CSV in, reproducible analysis files out.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xbnet/xbnet.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Formats {
  bool csv = true;
  bool json = true;
  bool dot = true;
  bool newick = true;
};

struct Options {
  std::string input;
  std::string out_dir = ".";
  std::string from;
  std::string to;
  std::string split;
  double dendro_factor = 0.7;
  std::size_t window = 56;
  std::size_t top_k = 3;
  std::vector<std::string> formats;
};

Formats resolve_formats(const std::vector<std::string>& requested) {
  if (requested.empty()) return Formats{};
  Formats f{false, false, false, false};
  for (const auto& name : requested) {
    if (name == "csv")
      f.csv = true;
    else if (name == "json")
      f.json = true;
    else if (name == "dot")
      f.dot = true;
    else if (name == "newick")
      f.newick = true;
    else
      xbnet::fail(xbnet::errc::out_of_range,
                  "unknown format '" + name + "' (csv, json, dot, newick)");
  }
  return f;
}

xbnet::Quarter parse_quarter_flag(const std::string& label,
                                  const char* flag) {
  auto q = xbnet::Quarter::parse(label);
  if (!q)
    xbnet::fail(xbnet::errc::malformed_period,
                std::string(flag) + " has bad quarter label '" + label + "'");
  return *q;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) xbnet::fail(xbnet::errc::io_error, "cannot write '" + path.string() + "'");
  out << content;
  out.flush();
  if (!out) xbnet::fail(xbnet::errc::io_error, "failed writing '" + path.string() + "'");
}

template <typename Writer>
void write_via(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) xbnet::fail(xbnet::errc::io_error, "cannot write '" + path.string() + "'");
  writer(out);
  out.flush();
  if (!out) xbnet::fail(xbnet::errc::io_error, "failed writing '" + path.string() + "'");
}

// Applies --from/--to, defaulting each side to the panel boundary.
xbnet::PositionMatrix select_window(const xbnet::PositionMatrix& positions,
                                    const Options& opt) {
  if (opt.from.empty() && opt.to.empty()) return positions;
  xbnet::Quarter from = opt.from.empty()
                            ? positions.periods.front()
                            : parse_quarter_flag(opt.from, "--from");
  xbnet::Quarter to = opt.to.empty() ? positions.periods.back()
                                     : parse_quarter_flag(opt.to, "--to");
  return xbnet::slice_periods(positions, from, to);
}

ordered_json summary_to_json(const xbnet::TopologySummary& s) {
  ordered_json j;
  j["period_from"] = s.period_from.str();
  j["period_to"] = s.period_to.str();
  j["N"] = s.entity_count;
  j["L"] = s.threshold;
  j["M"] = s.linked_pairs;
  j["S"] = s.redundancy;
  j["R"] = s.residuality;
  return j;
}

void warn_clamped(const xbnet::ResidualityParts& parts) {
  for (const auto& [a, b] : parts.clamped)
    std::cerr << "warning: distance below 1e-09 clamped to 1e-09 for pair "
              << a << "," << b << "\n";
}

// Full single-window pipeline; writes the requested files into `dir` and
// returns the topology summary.
xbnet::TopologySummary analyze_window(const xbnet::PositionMatrix& window,
                                      const Options& opt, const Formats& fmt,
                                      const fs::path& dir,
                                      const char*& stage) {
  stage = "metric";
  xbnet::DistanceMatrix d = xbnet::distance_matrix(window);

  stage = "cluster";
  xbnet::Linkage linkage = xbnet::single_link(d);
  double threshold = xbnet::threshold_distance(linkage);
  xbnet::Mst tree = xbnet::minimum_spanning_tree(d);
  // Rejects an out-of-range --dendro-factor before anything is written.
  (void)xbnet::color_dendrogram(linkage, opt.dendro_factor);

  stage = "topology";
  xbnet::ResidualityParts parts = xbnet::residuality_breakdown(d, threshold);
  warn_clamped(parts);
  xbnet::TopologySummary summary = xbnet::summarize_topology(
      d, threshold, window.periods.front(), window.periods.back());

  stage = "roles";
  std::vector<xbnet::RoleAssignment> roles = xbnet::classify_roles(window);
  xbnet::RoleRanking ranking = xbnet::rank_by_magnitude(roles, opt.top_k);
  std::vector<std::string> highlights;
  for (const auto& r : ranking.creditors) highlights.push_back(r.entity);
  for (const auto& r : ranking.debtors) highlights.push_back(r.entity);

  stage = "write";
  fs::create_directories(dir);
  if (fmt.csv) {
    write_via(dir / "distances.csv",
              [&](std::ostream& out) { xbnet::write_distance_csv(d, out); });
    write_via(dir / "roles.csv",
              [&](std::ostream& out) { xbnet::write_roles_csv(roles, out); });
  }
  if (fmt.newick)
    write_file(dir / "dendrogram.newick", xbnet::export_newick(linkage));
  if (fmt.dot)
    write_file(dir / "mst.dot", xbnet::export_dot(tree, roles, highlights));
  if (fmt.json)
    write_via(dir / "topology.json", [&](std::ostream& out) {
      xbnet::write_summary_json(summary, out);
    });
  return summary;
}

int cmd_analyze(const Options& opt) {
  const char* stage = "config";
  try {
    Formats fmt = resolve_formats(opt.formats);
    stage = "ingest";
    xbnet::Panel panel = xbnet::load_panel(opt.input);
    xbnet::PositionMatrix window =
        select_window(xbnet::compute_positions(panel), opt);
    analyze_window(window, opt, fmt, opt.out_dir, stage);
    return 0;
  } catch (const xbnet::Error& e) {
    std::cerr << "analyze: " << stage << ": " << e.what() << "\n";
    return 1;
  }
}

int cmd_rolling(const Options& opt) {
  const char* stage = "config";
  try {
    Formats fmt = resolve_formats(opt.formats);
    stage = "ingest";
    xbnet::Panel panel = xbnet::load_panel(opt.input);
    xbnet::PositionMatrix window =
        select_window(xbnet::compute_positions(panel), opt);
    stage = "topology";
    xbnet::ResidualitySeries series =
        xbnet::rolling_residuality(window, opt.window);
    stage = "write";
    fs::create_directories(opt.out_dir);
    if (fmt.csv)
      write_via(fs::path(opt.out_dir) / "residuality.csv",
                [&](std::ostream& out) {
                  xbnet::write_residuality_csv(series, out);
                });
    return 0;
  } catch (const xbnet::Error& e) {
    std::cerr << "rolling: " << stage << ": " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare(const Options& opt) {
  const char* stage = "config";
  try {
    Formats fmt = resolve_formats(opt.formats);
    xbnet::Quarter split = parse_quarter_flag(opt.split, "--split");
    stage = "ingest";
    xbnet::Panel panel = xbnet::load_panel(opt.input);
    xbnet::PositionMatrix window =
        select_window(xbnet::compute_positions(panel), opt);
    if (!(window.periods.front() < split && split < window.periods.back()))
      xbnet::fail(xbnet::errc::split_out_of_range,
                  "split " + split.str() + " must lie strictly inside " +
                      window.periods.front().str() + ".." +
                      window.periods.back().str());

    // The split quarter belongs to both halves.
    xbnet::PositionMatrix first =
        xbnet::slice_periods(window, window.periods.front(), split);
    xbnet::PositionMatrix second =
        xbnet::slice_periods(window, split, window.periods.back());

    fs::path out_dir = opt.out_dir;
    xbnet::TopologySummary s1 =
        analyze_window(first, opt, fmt, out_dir / "first", stage);
    xbnet::TopologySummary s2 =
        analyze_window(second, opt, fmt, out_dir / "second", stage);

    stage = "write";
    if (fmt.json) {
      ordered_json delta;
      delta["split"] = split.str();
      delta["first"] = summary_to_json(s1);
      delta["second"] = summary_to_json(s2);
      delta["delta"]["N"] = static_cast<long>(s2.entity_count) -
                            static_cast<long>(s1.entity_count);
      delta["delta"]["L"] = s2.threshold - s1.threshold;
      delta["delta"]["M"] = static_cast<long>(s2.linked_pairs) -
                            static_cast<long>(s1.linked_pairs);
      delta["delta"]["S"] = s2.redundancy - s1.redundancy;
      delta["delta"]["R"] = s2.residuality - s1.residuality;
      write_file(out_dir / "delta.json", delta.dump(2) + "\n");
    }
    return 0;
  } catch (const xbnet::Error& e) {
    std::cerr << "compare: " << stage << ": " << e.what() << "\n";
    return 1;
  }
}

int cmd_roles(const Options& opt) {
  const char* stage = "config";
  try {
    Formats fmt = resolve_formats(opt.formats);
    stage = "ingest";
    xbnet::Panel panel = xbnet::load_panel(opt.input);
    xbnet::PositionMatrix window =
        select_window(xbnet::compute_positions(panel), opt);
    stage = "roles";
    std::vector<xbnet::RoleAssignment> roles = xbnet::classify_roles(window);
    xbnet::RoleRanking ranking = xbnet::rank_by_magnitude(roles, opt.top_k);

    stage = "write";
    fs::create_directories(opt.out_dir);
    if (fmt.csv)
      write_via(fs::path(opt.out_dir) / "roles.csv",
                [&](std::ostream& out) { xbnet::write_roles_csv(roles, out); });

    std::string report;
    report += "top creditors:";
    for (const auto& r : ranking.creditors) {
      report += ' ';
      report += r.entity;
    }
    report += "\ntop debtors:";
    for (const auto& r : ranking.debtors) {
      report += ' ';
      report += r.entity;
    }
    report += '\n';
    std::cout << report;
    return 0;
  } catch (const xbnet::Error& e) {
    std::cerr << "roles: " << stage << ": " << e.what() << "\n";
    return 1;
  }
}

void add_common_flags(CLI::App* cmd, Options& opt, bool with_range = true) {
  cmd->add_option("-i,--input", opt.input, "panel CSV file")->required();
  cmd->add_option("-o,--out-dir", opt.out_dir, "output directory");
  if (with_range) {
    cmd->add_option("--from", opt.from, "first quarter (e.g. 1983Q1)");
    cmd->add_option("--to", opt.to, "last quarter (e.g. 2011Q2)");
  }
  cmd->add_option("--format", opt.formats,
                  "output formats to write (csv, json, dot, newick); "
                  "repeatable, default all");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-border exposure network analysis"};
  app.require_subcommand(1);

  Options opt;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "distance matrix, dendrogram, MST and topology summary "
                 "for one period");
  add_common_flags(analyze, opt);
  analyze->add_option("--dendro-factor", opt.dendro_factor,
                      "dendrogram cut as a fraction of the threshold L");
  analyze->add_option("--top-k", opt.top_k,
                      "creditors/debtors highlighted in the MST export");

  CLI::App* rolling = app.add_subcommand(
      "rolling", "residuality series over a trailing quarterly window");
  add_common_flags(rolling, opt);
  rolling->add_option("-w,--window", opt.window, "window length in quarters");

  CLI::App* compare = app.add_subcommand(
      "compare", "analyze two chronologically successive halves");
  add_common_flags(compare, opt);
  compare->add_option("--split", opt.split, "quarter shared by both halves")
      ->required();
  compare->add_option("--dendro-factor", opt.dendro_factor,
                      "dendrogram cut as a fraction of the threshold L");
  compare->add_option("--top-k", opt.top_k,
                      "creditors/debtors highlighted in the MST exports");

  CLI::App* roles =
      app.add_subcommand("roles", "creditor/debtor classification");
  add_common_flags(roles, opt);
  roles->add_option("--top-k", opt.top_k, "entities listed per role");

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) return cmd_analyze(opt);
  if (rolling->parsed()) return cmd_rolling(opt);
  if (compare->parsed()) return cmd_compare(opt);
  if (roles->parsed()) return cmd_roles(opt);
  return 1;
}
