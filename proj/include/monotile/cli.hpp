#pragma once

// Command-line front end: argument parsing into a RunConfig and dispatch to
// the library. Every document carries the seed and budgets it was made with.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "monotile/boundary.hpp"
#include "monotile/group.hpp"
#include "monotile/oracle.hpp"
#include "monotile/swinger.hpp"
#include "monotile/tiler.hpp"

namespace monotile::cli {

struct RunConfig {
  std::string command;  // "ball", "swinger find", "tile", "export dot", ...
  std::string group = "free:2";
  std::vector<std::string> set;
  std::optional<std::size_t> core_radius;
  std::optional<std::size_t> work_radius;
  std::optional<std::size_t> r;
  std::optional<std::size_t> m_max;
  std::optional<std::size_t> min_length;
  std::optional<std::string> z;
  std::optional<std::string> input;
  std::optional<std::string> out;
  std::string format = "json";
  std::string strategy = "enumerate";
  std::uint64_t seed = 0;
  std::size_t search_budget = SwingerSearch{}.budget;
  std::size_t ball_cap = kDefaultBallBudget;
  std::size_t node_cap = oracle::kDefaultNodeCap;
  std::size_t threads = 1;
  bool allow_empirical = false;
  bool raw = false;
};

struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = 0;    // 0 when config is set; 2 for usage errors, 0 for --help
  std::string message;  // usage text or diagnostic
};

struct GroupChoice {
  GroupBackend backend;
  std::optional<oracle::FiniteGroupTable> table;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::uint32_t parse_count(const std::string& s) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || v > 1'000'000) {
    fail(ErrorKind::malformed_input, "bad number '" + s + "' in group descriptor");
  }
  return static_cast<std::uint32_t>(v);
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::malformed_input, "cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::malformed_input, path + ": " + e.what());
  }
}

}  // namespace detail

// free:k, free_product_cyclic:o1,o2,... (fpc:...), integers (Z), cyclic:n,
// dihedral:n, S3, S4, or @file.json holding a backend descriptor or a group
// table.
inline GroupChoice parse_group(const std::string& text) {
  auto finite = [](oracle::FiniteGroupTable t) { return GroupChoice{t.to_backend(), std::move(t)}; };
  if (text == "integers" || text == "Z") return {GroupBackend::integers(), std::nullopt};
  if (text == "S3") return finite(oracle::symmetric3());
  if (text == "S4") return finite(oracle::symmetric4());
  if (!text.empty() && text.front() == '@') {
    const Json j = detail::read_json_file(text.substr(1));
    if (j.contains("kind")) {
      GroupBackend g = backend_from_json(j);
      std::optional<oracle::FiniteGroupTable> table;
      if (g.kind() == BackendKind::finite) table = oracle::FiniteGroupTable{g.table(), g.generators()};
      return {std::move(g), std::move(table)};
    }
    return finite(oracle::table_from_json(j));
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorKind::malformed_input, "unknown group '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const auto params = detail::split(text.substr(colon + 1), ',');
  auto single = [&]() {
    if (params.size() != 1) fail(ErrorKind::malformed_input, kind + " takes one parameter");
    return detail::parse_count(params[0]);
  };
  if (kind == "free") return {GroupBackend::free_group(single()), std::nullopt};
  if (kind == "free_product_cyclic" || kind == "fpc") {
    std::vector<std::uint32_t> orders;
    for (const auto& p : params) orders.push_back(detail::parse_count(p));
    return {GroupBackend::free_product_cyclic(std::move(orders)), std::nullopt};
  }
  if (kind == "cyclic") return finite(oracle::cyclic(single()));
  if (kind == "dihedral") return finite(oracle::dihedral(single()));
  fail(ErrorKind::malformed_input, "unknown group kind '" + kind + "'");
}

inline std::vector<Word> parse_set(const std::vector<std::string>& items, const GroupBackend& g) {
  std::vector<Word> out;
  for (const auto& item : items) out.push_back(parse_word(item, g));
  return out;
}

inline std::vector<std::uint32_t> parse_indices(const std::vector<std::string>& items) {
  std::vector<std::uint32_t> out;
  for (const auto& item : items) out.push_back(detail::parse_count(item));
  return out;
}

inline ParseResult parse_invocation(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Construct and verify monotile tilings of finitely generated groups", "monotile"};
  app.require_subcommand(1);
  std::string set_text;

  auto add_group = [&](CLI::App* sub) {
    sub->add_option("--group", cfg.group, "free:k | free_product_cyclic:o1,o2 | integers | cyclic:n | "
                                          "dihedral:n | S3 | S4 | @file.json");
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "Write the document here"); };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "Worker cap")->check(CLI::PositiveNumber);
  };
  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Seed for the random strategy");
    sub->add_option("--budget", cfg.search_budget, "Candidate words drawn")->check(CLI::PositiveNumber);
    sub->add_option("--strategy", cfg.strategy, "enumerate | random")
        ->check(CLI::IsMember({"enumerate", "random"}));
    sub->add_option("--m-max", cfg.m_max, "Bounded check depth (non-tree backends)")->check(CLI::PositiveNumber);
  };

  CLI::App* ball = app.add_subcommand("ball", "Enumerate a ball of the Cayley graph");
  add_group(ball);
  ball->add_option("-r", cfg.r, "Radius")->required();
  ball->add_option("--budget", cfg.ball_cap, "Maximum number of elements")->check(CLI::PositiveNumber);
  ball->add_option("--seed", cfg.seed, "Recorded only");
  add_out(ball);
  add_threads(ball);

  CLI::App* swinger = app.add_subcommand("swinger", "Search for or check r-swingers");
  swinger->require_subcommand(1);
  CLI::App* find = swinger->add_subcommand("find", "Search for a certified r-swinger");
  add_group(find);
  find->add_option("-r", cfg.r, "Swinger radius")->required()->check(CLI::PositiveNumber);
  find->add_option("--min-length", cfg.min_length, "Minimum |z| (default 2r + 4 delta)");
  add_search(find);
  add_out(find);
  add_threads(find);
  CLI::App* check = swinger->add_subcommand("check", "Certify or refute a candidate");
  add_group(check);
  check->add_option("-r", cfg.r, "Swinger radius")->required()->check(CLI::PositiveNumber);
  check->add_option("--z", cfg.z, "Candidate word")->required();
  check->add_option("--m-max", cfg.m_max, "Bounded check up to this m instead of certification")
      ->check(CLI::PositiveNumber);
  check->add_option("--seed", cfg.seed, "Recorded only");
  add_out(check);
  add_threads(check);

  CLI::App* tile = app.add_subcommand("tile", "Build and verify a tiling of a core ball");
  add_group(tile);
  tile->add_option("--set", set_text, "Comma-separated words of F")->required();
  tile->add_option("--core-radius", cfg.core_radius, "Core ball radius")->required();
  tile->add_option("--work-radius", cfg.work_radius, "Work ball radius");
  add_search(tile);
  tile->add_flag("--allow-empirical", cfg.allow_empirical, "Accept bounded checks on non-tree backends");
  tile->add_flag("--raw", cfg.raw, "Emit the region even if verification fails");
  tile->add_option("--format", cfg.format, "json | dot | graphml")->check(CLI::IsMember({"json", "dot", "graphml"}));
  add_out(tile);
  add_threads(tile);

  CLI::App* verify = app.add_subcommand("verify", "Re-verify a tiling document");
  verify->add_option("file", cfg.input, "Tiling document")->required();
  add_out(verify);
  add_threads(verify);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exact cover oracles on finite groups");
  oracle_cmd->require_subcommand(1);
  CLI::App* cover = oracle_cmd->add_subcommand("cover", "Tile a finite group by left translates of T");
  CLI::App* extend = oracle_cmd->add_subcommand("extend", "Smallest tile containing F");
  for (CLI::App* sub : {cover, extend}) {
    add_group(sub);
    sub->add_option("--set", set_text, "Comma-separated element indices")->required();
    sub->add_option("--budget", cfg.node_cap, "Search node cap")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Recorded only");
    add_out(sub);
    add_threads(sub);
  }

  CLI::App* export_cmd = app.add_subcommand("export", "Export the core-ball Cayley graph of a tiling");
  export_cmd->require_subcommand(1);
  CLI::App* dot = export_cmd->add_subcommand("dot", "Graphviz DOT");
  CLI::App* graphml = export_cmd->add_subcommand("graphml", "GraphML");
  for (CLI::App* sub : {dot, graphml}) {
    sub->add_option("file", cfg.input, "Tiling document")->required();
    add_out(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return {std::nullopt, 0, app.help()};
  } catch (const CLI::CallForAllHelp&) {
    return {std::nullopt, 0, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    return {std::nullopt, 2, std::string(e.what()) + "\n" + app.help()};
  }

  for (CLI::App* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    for (CLI::App* leaf : sub->get_subcommands()) cfg.command += " " + leaf->get_name();
  }
  if (cfg.command == "export dot") cfg.format = "dot";
  if (cfg.command == "export graphml") cfg.format = "graphml";
  if (!set_text.empty()) cfg.set = detail::split(set_text, ',');

  // Validate what can be validated without running anything.
  try {
    const bool needs_group = cfg.command != "verify" && cfg.command.rfind("export", 0) != 0;
    if (needs_group) {
      const GroupChoice choice = parse_group(cfg.group);
      if (cfg.command.rfind("oracle", 0) == 0) {
        (void)parse_indices(cfg.set);
      } else if (cfg.command == "tile") {
        (void)parse_set(cfg.set, choice.backend);
      } else if (cfg.z) {
        (void)parse_word(*cfg.z, choice.backend);
      }
    }
  } catch (const Error& e) {
    return {std::nullopt, 2, std::string(e.what()) + "\n" + app.help()};
  }
  return {cfg, 0, ""};
}

// ---------------------------------------------------------------------------
// Running

namespace detail {

inline Json provenance(const RunConfig& cfg) {
  Json p;
  p["command"] = cfg.command;
  if (cfg.input) p["input"] = *cfg.input;
  else p["group"] = cfg.group;
  p["seed"] = cfg.seed;
  p["budgets"] = {{"search", cfg.search_budget}, {"ball_cap", cfg.ball_cap}, {"node_cap", cfg.node_cap}};
  p["threads"] = cfg.threads;
  return p;
}

class Output {
 public:
  Output(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  int emit_text(const std::string& text, int code) {
    if (cfg_.out && code == 0) {
      std::ofstream f(*cfg_.out, std::ios::binary);
      if (!f) return error(ErrorKind::malformed_input, "cannot write " + *cfg_.out);
      f << text;
    } else {
      out_ << text;
    }
    return code;
  }
  int emit(Json doc, int code = 0) {
    doc["provenance"] = provenance(cfg_);
    return emit_text(doc.dump(2) + "\n", code);
  }
  // Domain failures: JSON on standard output, exit status 1.
  int failure(const std::string& kind, const std::string& message, Json extra = Json::object()) {
    Json doc;
    doc["error_kind"] = kind;
    doc["message"] = message;
    for (auto& [k, v] : extra.items()) doc[k] = v;
    doc["provenance"] = provenance(cfg_);
    out_ << doc.dump(2) << "\n";
    return 1;
  }
  int error(ErrorKind kind, const std::string& message) { return failure(std::string(to_string(kind)), message); }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
};

inline SwingerSearch search_options(const RunConfig& cfg) {
  SwingerSearch s;
  s.strategy = cfg.strategy == "random" ? SearchStrategy::random : SearchStrategy::enumerate;
  s.seed = cfg.seed;
  s.budget = cfg.search_budget;
  if (cfg.m_max) s.bounded_m_max = *cfg.m_max;
  return s;
}

inline int run_ball(const RunConfig& cfg, Output& out) {
  const GroupBackend g = parse_group(cfg.group).backend;
  const Ball ball = enumerate_ball(*cfg.r, g, cfg.ball_cap);
  std::vector<std::size_t> spheres(ball.radius + 1, 0);
  Json elements = Json::array();
  for (const Word& w : ball.elements) {
    ++spheres[w.size()];
    elements.push_back(format_word(w, g));
  }
  while (spheres.size() > 1 && spheres.back() == 0) spheres.pop_back();
  return out.emit({{"command", "ball"},
                   {"backend", backend_to_json(g)},
                   {"radius", ball.radius},
                   {"size", ball.elements.size()},
                   {"sphere_sizes", spheres},
                   {"elements", std::move(elements)}});
}

inline int run_swinger_check(const RunConfig& cfg, Output& out) {
  const GroupBackend g = parse_group(cfg.group).backend;
  const Word z = parse_word(*cfg.z, g);
  SwingerCertificate cert;
  if (g.is_tree() && !cfg.m_max) {
    cert = certify_swinger_tree(z, *cfg.r, g);
  } else {
    cert = check_swinger_bounded(z, *cfg.r, cfg.m_max.value_or(SwingerSearch{}.bounded_m_max), g);
  }
  Json doc = {{"command", "swinger check"}, {"backend", backend_to_json(g)},
              {"certificate", certificate_to_json(cert, g)}};
  switch (cert.verdict) {
    case Verdict::certified:
    case Verdict::inconclusive_positive:
      return out.emit(std::move(doc));
    case Verdict::refuted:
      return out.failure("refuted", "z fails the swinger condition for r = " + std::to_string(*cfg.r),
                         {{"witness", doc["certificate"]["witness"]}, {"certificate", doc["certificate"]}});
    case Verdict::inconclusive:
      return out.failure("inconclusive", "certification cap reached", {{"certificate", doc["certificate"]}});
  }
  return 1;
}

inline int run_swinger_find(const RunConfig& cfg, Output& out) {
  const GroupBackend g = parse_group(cfg.group).backend;
  const std::size_t min_length = cfg.min_length.value_or(separation_constant(*cfg.r, g.delta()));
  const auto found = find_swinger(*cfg.r, min_length, search_options(cfg), g);
  if (!found) {
    return out.failure("search_budget", "no swinger found within budget",
                       {{"r", *cfg.r}, {"min_length", min_length}});
  }
  return out.emit({{"command", "swinger find"},
                   {"backend", backend_to_json(g)},
                   {"r", *cfg.r},
                   {"min_length", min_length},
                   {"root", format_word(found->root, g)},
                   {"exponent", found->exponent},
                   {"z", format_word(found->z, g)},
                   {"certificate", certificate_to_json(found->certificate, g)}});
}

inline int emit_region(const RunConfig& cfg, const TilingRegion& region, Output& out) {
  if (cfg.format == "dot") return out.emit_text(export_dot(region), 0);
  if (cfg.format == "graphml") return out.emit_text(export_graphml(region), 0);
  Json doc = region_to_json(region);
  const int code = region.report.all_true() ? 0 : 1;
  if (code != 0) {
    return out.failure("consistency_violation", "region failed verification", {{"region", std::move(doc)}});
  }
  return out.emit(std::move(doc));
}

inline int run_tile(const RunConfig& cfg, Output& out) {
  const GroupBackend g = parse_group(cfg.group).backend;
  TilingOptions opts;
  opts.search = search_options(cfg);
  opts.work_radius = cfg.work_radius;
  opts.allow_empirical = cfg.allow_empirical;
  opts.raw_output = cfg.raw;
  const TilingRegion region = build_tiling(parse_set(cfg.set, g), *cfg.core_radius, opts, g);
  return emit_region(cfg, region, out);
}

inline int run_verify(const RunConfig& cfg, Output& out) {
  const TilingRegion region = region_from_json(detail::read_json_file(*cfg.input));
  const GroupBackend& g = region.backend;
  const VerificationReport report = verify_tiling(region);
  const oracle::PartitionCheck partition = oracle::independent_partition_check(region);
  bool certificate_ok = true;
  if (region.spec.certificate) {
    certificate_ok = region.spec.certificate->z == region.spec.z && region.spec.certificate->r == region.spec.r &&
                     reverify_certificate(*region.spec.certificate, g);
  }
  Json doc;
  doc["command"] = "verify";
  doc["report"] = report_to_json(report);
  doc["partition"] = {{"ok", partition.ok},
                      {"ball_size", partition.ball_size},
                      {"uncovered", partition.uncovered},
                      {"doubly_covered", partition.doubly_covered},
                      {"witness", partition.witness ? Json(format_word(*partition.witness, g)) : Json(nullptr)},
                      {"reason", partition.reason}};
  doc["certificate_ok"] = certificate_ok;
  if (report.all_true() && partition.ok && certificate_ok) return out.emit(std::move(doc));
  return out.failure("consistency_violation", "tiling document failed verification", std::move(doc));
}

inline oracle::FiniteGroupTable finite_table(const RunConfig& cfg) {
  auto choice = parse_group(cfg.group);
  if (!choice.table) fail(ErrorKind::unsupported_backend, "oracle commands need a finite group");
  return *choice.table;
}

inline Json indices_json(const std::vector<std::uint32_t>& v) { return Json(v); }

inline int run_oracle_cover(const RunConfig& cfg, Output& out) {
  const auto table = finite_table(cfg);
  auto T = parse_indices(cfg.set);
  std::sort(T.begin(), T.end());
  const auto sol = oracle::exact_cover_search(table, T, cfg.node_cap);
  if (!sol) {
    return out.failure("no_tiling", "no tiling by left translates of T",
                       {{"result", "no tiling"}, {"order", table.order()}, {"T", indices_json(T)}});
  }
  return out.emit({{"command", "oracle cover"},
                   {"order", table.order()},
                   {"T", indices_json(T)},
                   {"result", "tiles"},
                   {"translates", indices_json(sol->translates)},
                   {"solutions", sol->solutions},
                   {"nodes", sol->nodes}});
}

inline int run_oracle_extend(const RunConfig& cfg, Output& out) {
  const auto table = finite_table(cfg);
  auto F = parse_indices(cfg.set);
  std::sort(F.begin(), F.end());
  const auto ext = oracle::monotile_extend_finite(table, F, cfg.node_cap);
  return out.emit({{"command", "oracle extend"},
                   {"order", table.order()},
                   {"F", indices_json(F)},
                   {"tile", indices_json(ext.tile)},
                   {"translates", indices_json(ext.cover.translates)}});
}

inline int run_export(const RunConfig& cfg, Output& out) {
  const TilingRegion region = region_from_json(detail::read_json_file(*cfg.input));
  return out.emit_text(cfg.format == "dot" ? export_dot(region) : export_graphml(region), 0);
}

}  // namespace detail

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::Output output(cfg, out);
  try {
    if (cfg.command == "ball") return detail::run_ball(cfg, output);
    if (cfg.command == "swinger check") return detail::run_swinger_check(cfg, output);
    if (cfg.command == "swinger find") return detail::run_swinger_find(cfg, output);
    if (cfg.command == "tile") return detail::run_tile(cfg, output);
    if (cfg.command == "verify") return detail::run_verify(cfg, output);
    if (cfg.command == "oracle cover") return detail::run_oracle_cover(cfg, output);
    if (cfg.command == "oracle extend") return detail::run_oracle_extend(cfg, output);
    if (cfg.command == "export dot" || cfg.command == "export graphml") return detail::run_export(cfg, output);
    err << "unknown command '" << cfg.command << "'\n";
    return 2;
  } catch (const Error& e) {
    return output.error(e.kind(), e.what());
  }
}

inline int main_entry(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  ParseResult parsed = parse_invocation(args);
  if (!parsed.config) {
    (parsed.exit_code == 0 ? out : err) << parsed.message;
    return parsed.exit_code;
  }
  return run(*parsed.config, out, err);
}

}  // namespace monotile::cli
