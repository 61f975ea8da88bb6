// sofent: finite-level entropy estimates for modules over group rings F_q[G].
//
// Subcommands dispatch to the header library; every command writes one
// report table (csv or json) with raw integer fields next to any decimal
// rendering. Exit codes: 0 all per-rung flags pass, 1 some flag failed,
// 2 usage or config error, 3 resource guard tripped.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sofent/entropy.hpp"
#include "sofent/oracle.hpp"
#include "sofent/parse.hpp"
#include "sofent/patch.hpp"
#include "sofent/report.hpp"

using namespace sofent;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json cell_json(const Cell& c) {
  struct visitor {
    ordered_json operator()(std::int64_t v) const { return v; }
    ordered_json operator()(std::uint64_t v) const { return v; }
    ordered_json operator()(double v) const { return render_double(v); }
    ordered_json operator()(bool v) const { return v; }
    ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(visitor{}, c);
}

std::string render_json(const ReportTable& t) {
  ordered_json root;
  root["schema_version"] = t.schema_version;
  root["command"] = t.command;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : t.params) params[k] = v;
  root["params"] = params;
  root["columns"] = t.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t j = 0; j < row.size() && j < t.columns.size(); ++j)
      obj[t.columns[j]] = cell_json(row[j]);
    rows.push_back(obj);
  }
  root["rows"] = rows;
  ordered_json summary = ordered_json::object();
  for (const auto& [k, v] : t.summary) summary[k] = v;
  root["summary"] = summary;
  root["pass"] = t.pass;
  return root.dump(2) + "\n";
}

void emit(const ReportTable& t, const std::string& format,
          const std::string& out) {
  std::string text;
  if (format == "csv")
    text = render_csv(t);
  else if (format == "json")
    text = render_json(t);
  else
    throw usage_error("unknown format '" + format + "' (csv or json)");
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw usage_error("cannot open output file '" + out + "'");
  f << text;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  if (s.empty()) throw usage_error("missing " + what);
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw usage_error("malformed " + what + " '" + s + "'");
  std::int64_t v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit((unsigned char)s[i]))
      throw usage_error("malformed " + what + " '" + s + "'");
    v = v * 10 + (s[i] - '0');
    if (v > (std::int64_t)1 << 40)
      throw usage_error(what + " out of range");
  }
  return neg ? -v : v;
}

Rational parse_rational(const std::string& s, const std::string& what) {
  std::size_t slash = s.find('/');
  if (slash == std::string::npos)
    return Rational(parse_int(s, what), 1);
  std::int64_t num = parse_int(s.substr(0, slash), what);
  std::int64_t den = parse_int(s.substr(slash + 1), what);
  if (den <= 0) throw usage_error(what + " needs a positive denominator");
  return Rational(num, (std::uint64_t)den);
}

// integer vector rows: rows split on ';', entries on ','; entries are
// reduced into [0, m) for the coordinate modulus m
std::vector<std::vector<std::uint32_t>> parse_vector_rows(
    const std::string& text, const std::vector<std::uint32_t>& moduli,
    const std::string& what) {
  std::vector<std::vector<std::uint32_t>> rows;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i != text.size() && text[i] != ';') continue;
    std::string row_text = text.substr(start, i - start);
    start = i + 1;
    std::vector<std::uint32_t> row;
    std::size_t cs = 0;
    for (std::size_t k = 0; k <= row_text.size(); ++k) {
      if (k != row_text.size() && row_text[k] != ',') continue;
      std::string piece = row_text.substr(cs, k - cs);
      cs = k + 1;
      std::size_t a = piece.find_first_not_of(" \t");
      if (a == std::string::npos) {
        if (row_text.find_first_not_of(" \t") == std::string::npos) break;
        throw usage_error("empty entry in " + what);
      }
      std::size_t b = piece.find_last_not_of(" \t");
      std::int64_t v = parse_int(piece.substr(a, b - a + 1), what);
      std::size_t idx = row.size();
      if (idx >= moduli.size())
        throw usage_error(what + " row longer than expected");
      std::int64_t m = (std::int64_t)moduli[idx];
      row.push_back((std::uint32_t)(((v % m) + m) % m));
    }
    if (row.empty()) continue;
    if (row.size() != moduli.size())
      throw usage_error(what + " row has wrong length");
    rows.push_back(std::move(row));
  }
  return rows;
}

FqMatrix parse_fq_matrix(const std::string& text, const FieldSpec& field,
                         const std::string& what) {
  std::vector<std::string> row_texts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ';') {
      row_texts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  std::vector<FqVector> rows;
  std::size_t cols = 0;
  for (const auto& row_text : row_texts) {
    FqVector row;
    std::size_t cs = 0;
    for (std::size_t k = 0; k <= row_text.size(); ++k) {
      if (k != row_text.size() && row_text[k] != ',') continue;
      std::string piece = row_text.substr(cs, k - cs);
      cs = k + 1;
      std::int64_t v = parse_int(piece, what);
      std::int64_t m = (std::int64_t)field.p;
      row.push_back((std::uint32_t)(((v % m) + m) % m));
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols)
      throw usage_error(what + " rows have unequal lengths");
    rows.push_back(std::move(row));
  }
  return FqMatrix::from_rows(FieldSpec(field.p), rows);
}

PartialModulePatch resolve_patch(const std::string& spec, FieldSpec field,
                                 std::shared_ptr<const GroupSpec> group) {
  if (spec.rfind("free:", 0) == 0) {
    std::int64_t n = parse_int(spec.substr(5), "patch box side");
    if (n < 1 || n > (1 << 12)) throw usage_error("patch box side out of range");
    return make_free_patch(field, group, (std::uint32_t)n);
  }
  if (spec.rfind("quotient1d:", 0) == 0) {
    GroupRingElem f =
        parse_ring_expression(spec.substr(11), field, group);
    return make_quotient1d_patch(f, group);
  }
  std::ifstream in(spec);
  if (!in)
    throw usage_error("patch '" + spec +
                      "' is neither free:N, quotient1d:<f>, nor a readable file");
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw usage_error("patch file '" + spec + "': " + e.what());
  }
  PartialModulePatch p;
  p.field = field;
  p.group = group;
  try {
    p.D = j.at("D").get<std::uint64_t>();
    if (j.contains("basis"))
      p.basis_names = j.at("basis").get<std::vector<std::string>>();
    for (const auto& w : j.at("window")) {
      std::vector<GroupElement> els =
          parse_element_list(w.get<std::string>(), group, field);
      if (els.size() != 1)
        throw usage_error("patch window entries must be single elements");
      p.window.push_back(els[0]);
    }
    for (const auto& a : j.at("actions")) {
      std::vector<FqVector> rows;
      for (const auto& r : a) {
        FqVector row;
        for (const auto& x : r) {
          std::int64_t v = x.get<std::int64_t>();
          std::int64_t m = (std::int64_t)field.p;
          row.push_back((std::uint32_t)(((v % m) + m) % m));
        }
        rows.push_back(row);
      }
      p.actions.push_back(FqMatrix::from_rows(FieldSpec(field.p), rows));
    }
    auto read_gens = [&](const char* key, std::vector<FqVector>& out) {
      if (!j.contains(key)) return;
      for (const auto& g : j.at(key)) {
        FqVector v;
        for (const auto& x : g) {
          std::int64_t e = x.get<std::int64_t>();
          std::int64_t m = (std::int64_t)field.p;
          v.push_back((std::uint32_t)(((e % m) + m) % m));
        }
        out.push_back(v);
      }
    };
    read_gens("gens_a", p.gens_a);
    read_gens("gens_b", p.gens_b);
    if (j.contains("coverage"))
      p.coverage = j.at("coverage").get<std::uint32_t>();
  } catch (const usage_error&) {
    throw;
  } catch (const std::exception& e) {
    throw usage_error("patch file '" + spec + "': " + e.what());
  }
  validate_patch(p);
  return p;
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

// ---------------------------------------------------------------- commands

struct CommonOpts {
  std::string group_text;
  std::uint64_t q = 2;
  std::string ladder_text;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_field = true,
                bool with_ladder = true) {
  sub->add_option("--group", o.group_text, "group expression")->required();
  if (with_field) sub->add_option("--q", o.q, "prime field modulus");
  if (with_ladder)
    sub->add_option("--ladder", o.ladder_text,
                    "N=a..b[:step] | d=list | copies=list");
  sub->add_option("--seed", o.seed, "master seed for random rungs");
  sub->add_option("--format", o.format, "csv or json");
  sub->add_option("--out", o.out, "output path (default stdout)");
}

Ladder make_ladder(const CommonOpts& o,
                   std::shared_ptr<const GroupSpec> group) {
  LadderSpec spec = o.ladder_text.empty() ? default_ladder(*group)
                                          : parse_ladder_spec(o.ladder_text);
  return build_ladder(spec, group, o.seed);
}

void common_params(ReportTable& t, const CommonOpts& o, const Ladder& lad,
                   bool with_field = true) {
  t.param("group", o.group_text);
  if (with_field) t.param("q", std::to_string(o.q));
  t.param("seed", std::to_string(o.seed));
  t.param("ladder", lad.description);
}

PrincipalPresentation make_presentation(const FieldSpec& field,
                                        std::shared_ptr<const GroupSpec> group,
                                        const std::string& f_text,
                                        std::uint64_t n_free) {
  bool blank = f_text.find_first_not_of(" \t") == std::string::npos;
  if (blank) return present_free(field, group, n_free);
  GroupRingMatrix f = parse_ring_matrix(f_text, field, group);
  return PrincipalPresentation(field, group, f);
}

void entropy_rows(ReportTable& t, const EntropyEstimate& est) {
  t.columns = {"rung",      "d",          "dim_ker_sigma_f",
               "dim_ker_sigma_bar_fstar", "rank_sigma_bar_f",
               "good_complement",         "h_top_est",
               "h_alg_est", "gap_bound",  "gap_ok",
               "duality_ok", "peters_ok", "range_ok",
               "ok"};
  for (std::size_t i = 0; i < est.records.size(); ++i) {
    const EntropyRecord& r = est.records[i];
    t.rows.push_back({std::uint64_t(i), r.d, r.dim_ker_sigma_f,
                      r.dim_ker_sigma_bar_fstar, r.rank_sigma_bar_f,
                      r.good_complement, r.h_top_est, r.h_alg_est,
                      r.gap_bound, r.gap_ok, r.duality_ok, r.peters_ok,
                      r.range_ok, r.ok()});
  }
  t.note("h_top_tail_min", render_double(est.h_top_tail_min));
  t.note("h_top_tail_max", render_double(est.h_top_tail_max));
  t.note("h_alg_tail_min", render_double(est.h_alg_tail_min));
  t.note("h_alg_tail_max", render_double(est.h_alg_tail_max));
}

int run_principal(const CommonOpts& o, const std::string& f_text,
                  std::uint64_t n_free) {
  FieldSpec field(o.q);
  auto group = parse_group(o.group_text);
  PrincipalPresentation pres = make_presentation(field, group, f_text, n_free);
  Ladder lad = make_ladder(o, group);
  EntropyEstimate est = principal_estimates(pres, lad);

  ReportTable t;
  t.command = "entropy principal";
  common_params(t, o, lad);
  t.param("f", serialize_ring_matrix(*group, pres.f));
  t.param("n", std::to_string(pres.n()));
  t.param("m", std::to_string(pres.m()));
  entropy_rows(t, est);
  t.pass = est.all_ok();
  emit(t, o.format, o.out);
  return t.pass ? 0 : 1;
}

int run_relative(const CommonOpts& o, const std::string& patch_spec,
                 const std::string& window_text, const std::string& gens_a,
                 const std::string& gens_b) {
  FieldSpec field(o.q);
  auto group = parse_group(o.group_text);
  PartialModulePatch patch = resolve_patch(patch_spec, field, group);
  if (!window_text.empty())
    patch = restrict_window(patch,
                            parse_element_list(window_text, group, field));
  std::vector<std::uint32_t> moduli((std::size_t)patch.D, (std::uint32_t)o.q);
  if (!gens_a.empty()) {
    patch.gens_a.clear();
    for (auto& row : parse_vector_rows(gens_a, moduli, "gens-a"))
      patch.gens_a.push_back(FqVector(row.begin(), row.end()));
  }
  if (!gens_b.empty()) {
    patch.gens_b.clear();
    for (auto& row : parse_vector_rows(gens_b, moduli, "gens-b"))
      patch.gens_b.push_back(FqVector(row.begin(), row.end()));
  }
  Ladder lad = make_ladder(o, group);
  check_increasing(lad);
  std::vector<RelativeEstimateRecord> recs(lad.rungs.size());
  run_indexed(lad.rungs.size(), [&](std::size_t i) {
    recs[i] = relative_estimate(patch, lad.rungs[i]);
  });

  ReportTable t;
  t.command = "entropy relative";
  common_params(t, o, lad);
  t.param("patch", patch_spec);
  t.param("window_size", std::to_string(patch.window.size()));
  t.param("D", std::to_string(patch.D));
  t.columns = {"rung", "d",         "dim_a", "dim_s", "dim_intersection",
               "dim_image", "value", "range_ok"};
  bool pass = !recs.empty();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    t.rows.push_back({std::uint64_t(i), r.d, r.dim_a, r.dim_s,
                      r.dim_intersection, r.dim_image, r.value, r.range_ok});
    pass = pass && r.range_ok;
  }
  t.pass = pass;
  emit(t, o.format, o.out);
  return t.pass ? 0 : 1;
}

int run_folner(const CommonOpts& o, const std::string& patch_spec,
               const std::string& boxes_text) {
  FieldSpec field(o.q);
  auto group = parse_group(o.group_text);
  PartialModulePatch patch = resolve_patch(patch_spec, field, group);
  std::vector<std::uint32_t> sides;
  for (std::uint64_t v :
       parse_value_list(boxes_text.empty() ? "2..16" : boxes_text, "boxes")) {
    if (v == 0 || v > (1u << 16)) throw usage_error("box side out of range");
    sides.push_back((std::uint32_t)v);
  }
  FolnerReport rep = folner_entropy(patch, sides);

  ReportTable t;
  t.command = "entropy folner";
  t.param("group", o.group_text);
  t.param("q", std::to_string(o.q));
  t.param("patch", patch_spec);
  t.param("dim_a", std::to_string(rep.dim_a));
  t.columns = {"box",       "side",  "box_points", "dim_sum",
               "value", "running_inf", "range_ok"};
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const FolnerRecord& r = rep.records[i];
    t.rows.push_back({std::uint64_t(i), std::uint64_t(r.side), r.box_points,
                      r.dim_sum, r.value, r.running_inf, r.range_ok});
  }
  t.note("infimum", render_double(rep.infimum));
  t.pass = rep.all_ok();
  emit(t, o.format, o.out);
  return t.pass ? 0 : 1;
}

int run_sofic_check(const CommonOpts& o, const std::string& window_text) {
  auto group = parse_group(o.group_text);
  FieldSpec dummy(2);
  std::vector<GroupElement> window;
  if (!window_text.empty()) {
    window = parse_element_list(window_text, group, dummy);
  } else {
    window.push_back(group->identity());
    for (std::uint32_t i = 0; i < group->gen_count; ++i) {
      window.push_back(group->generator(i));
      window.push_back(group->inv(group->generator(i)));
    }
  }
  Ladder lad = make_ladder(o, group);
  check_increasing(lad);
  struct Row {
    DefectReport rep;
    std::uint64_t good_complement = 0;
  };
  std::vector<Row> rows(lad.rungs.size());
  run_indexed(lad.rungs.size(), [&](std::size_t i) {
    rows[i].rep = defect_report(lad.rungs[i], window);
    rows[i].good_complement =
        good_set(lad.rungs[i], window).complement_size;
  });

  ReportTable t;
  t.command = "sofic check";
  common_params(t, o, lad, false);
  t.param("window_size", std::to_string(window.size()));
  t.columns = {"rung",          "d",
               "mult_pairs",    "max_mult_count",
               "max_mult_fraction", "sep_pairs",
               "max_sep_count", "max_sep_fraction",
               "good_complement"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const DefectReport& r = rows[i].rep;
    std::uint64_t mm = 0, ms = 0;
    for (const auto& p : r.mult) mm = std::max(mm, p.count);
    for (const auto& p : r.sep) ms = std::max(ms, p.count);
    t.rows.push_back({std::uint64_t(i), r.d, std::uint64_t(r.mult.size()), mm,
                      r.max_mult_fraction(), std::uint64_t(r.sep.size()), ms,
                      r.max_sep_fraction(), rows[i].good_complement});
  }
  t.pass = true;
  emit(t, o.format, o.out);
  return 0;
}

int run_probe(const CommonOpts& o, const std::string& f_text) {
  FieldSpec field(o.q);
  auto group = parse_group(o.group_text);
  GroupRingElem f = parse_ring_expression(f_text, field, group);
  Ladder lad = make_ladder(o, group);
  ZeroDivisorReport rep = zero_divisor_probe(f, group, lad);

  ReportTable t;
  t.command = "probe zero-divisor";
  common_params(t, o, lad);
  t.param("f", serialize_ring_element(*group, f));
  t.param("support_size", std::to_string(rep.support_size));
  std::uint64_t w = 2 * (std::uint64_t)rep.support_size + 1;
  t.param("weight", std::to_string(w * w));
  t.columns = {"rung", "d",        "rank",      "h_quotient",
               "h_cyclic_submodule", "bound_ok"};
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const ZeroDivisorRecord& r = rep.records[i];
    t.rows.push_back({std::uint64_t(i), r.d, r.rank, r.h_quotient,
                      r.h_cyclic_submodule, r.bound_ok});
  }
  t.note("bound", render_double(rep.bound));
  t.note("bound_ok_all", bool_text(rep.bound_ok_all));
  t.note("bound_ok_largest", bool_text(rep.bound_ok_largest));
  t.note("quotient_tail_min", render_double(rep.quotient_tail_min));
  t.note("quotient_tail_max", render_double(rep.quotient_tail_max));
  t.note("note", rep.note);
  t.pass = rep.bound_ok_largest;
  emit(t, o.format, o.out);
  return t.pass ? 0 : 1;
}

int run_verify_peters(const CommonOpts& o, const std::string& f_text,
                      std::uint64_t n_free) {
  FieldSpec field(o.q);
  auto group = parse_group(o.group_text);
  PrincipalPresentation pres = make_presentation(field, group, f_text, n_free);
  Ladder lad = make_ladder(o, group);
  EntropyEstimate est = principal_estimates(pres, lad);

  ReportTable t;
  t.command = "verify peters";
  common_params(t, o, lad);
  t.param("f", serialize_ring_matrix(*group, pres.f));
  entropy_rows(t, est);
  bool pass = est.all_ok();
  if (group->kind == GroupKind::finite) {
    try {
      oracle::PairingVerdict v = oracle::pairing_check(pres);
      t.note("pairing_module_size", std::to_string(v.module_size));
      t.note("pairing_dual_kernel_size",
             std::to_string(v.dual_kernel_size));
      t.note("pairing_pass", bool_text(v.pass));
      pass = pass && v.pass;
    } catch (const resource_error& e) {
      t.note("pairing", std::string("skipped: ") + e.what());
    }
  }
  t.pass = pass;
  emit(t, o.format, o.out);
  return t.pass ? 0 : 1;
}

int run_verify_addition(const CommonOpts& o, const std::string& f1_text,
                        const std::string& f2_text) {
  FieldSpec field(o.q);
  auto group = parse_group(o.group_text);
  PrincipalPresentation p1(field, group,
                           parse_ring_matrix(f1_text, field, group));
  PrincipalPresentation p2(field, group,
                           parse_ring_matrix(f2_text, field, group));
  Ladder lad = make_ladder(o, group);
  AdditionReport rep = addition_check(p1, p2, lad);

  ReportTable t;
  t.command = "verify addition";
  common_params(t, o, lad);
  t.param("f1", serialize_ring_matrix(*group, p1.f));
  t.param("f2", serialize_ring_matrix(*group, p2.f));
  t.columns = {"rung", "d",     "rank_1", "rank_2",       "rank_diag",
               "rank_residual", "h_1",    "h_2", "h_diag", "ok"};
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const AdditionRecord& r = rep.records[i];
    t.rows.push_back({std::uint64_t(i), r.d, r.rank_1, r.rank_2, r.rank_diag,
                      r.rank_residual, r.h_1, r.h_2, r.h_diag, r.ok()});
  }
  t.pass = rep.all_ok();
  emit(t, o.format, o.out);
  return t.pass ? 0 : 1;
}

int run_oracle_kernel(std::uint64_t q, const std::string& matrix_text,
                      const std::string& format, const std::string& out) {
  FieldSpec field(q);
  FqMatrix m = parse_fq_matrix(matrix_text, field, "matrix");
  std::uint64_t rank = rank_of(m);
  std::uint64_t dim_ker = (std::uint64_t)m.cols - rank;
  std::uint64_t brute = oracle::brute_kernel_count(m, kOracleStateGuard);
  std::uint64_t expected = oracle::checked_pow(q, dim_ker, kOracleStateGuard,
                                               "kernel size");
  ReportTable t;
  t.command = "oracle kernel";
  t.param("q", std::to_string(q));
  t.param("rows", std::to_string(m.rows));
  t.param("cols", std::to_string(m.cols));
  t.columns = {"rank", "dim_ker", "brute_count", "q_pow_dim", "match"};
  t.rows.push_back({rank, dim_ker, brute, expected, brute == expected});
  t.pass = brute == expected;
  emit(t, format, out);
  return t.pass ? 0 : 1;
}

int run_oracle_mapspace(const CommonOpts& o, std::uint64_t copies,
                        const std::string& window_text,
                        const std::string& eps_text,
                        const std::string& delta_text) {
  auto group = parse_group(o.group_text);
  if (group->kind != GroupKind::finite)
    throw usage_error("map space oracle needs a finite group");
  FieldSpec field(o.q);
  oracle::FiniteActionModel model = oracle::make_full_shift_dual(o.q, group);
  if (copies == 0) throw usage_error("copies must be positive");
  SoficApprox approx = build_finite_regular(group, (std::uint32_t)copies);
  oracle::MapSpaceConfig cfg;
  if (window_text.empty()) {
    for (std::uint32_t i = 0; i < group->finite_size(); ++i) {
      GroupElement e;
      e.kind = GroupKind::finite;
      e.index = i;
      cfg.window.push_back(e);
    }
  } else {
    cfg.window = parse_element_list(window_text, group, field);
  }
  if (!eps_text.empty()) cfg.epsilon = parse_rational(eps_text, "epsilon");
  if (!delta_text.empty()) cfg.delta = parse_rational(delta_text, "delta");
  oracle::MapSpaceResult res = oracle::map_space_entropy(model, approx, cfg);

  ReportTable t;
  t.command = "oracle mapspace";
  t.param("group", o.group_text);
  t.param("q", std::to_string(o.q));
  t.param("copies", std::to_string(copies));
  t.param("epsilon", eps_text.empty() ? "1/2" : eps_text);
  t.param("delta", delta_text.empty() ? "0" : delta_text);
  t.columns = {"d", "map_count", "n_eps", "estimate"};
  t.rows.push_back(
      {(std::uint64_t)approx.degree(), res.map_count, res.n_eps, res.estimate});
  t.pass = true;
  emit(t, o.format, o.out);
  return 0;
}

int run_oracle_closure(const std::string& moduli_text,
                       const std::string& gens_text,
                       const std::string& format, const std::string& out) {
  std::vector<std::uint32_t> moduli;
  for (std::uint64_t v : parse_value_list(moduli_text, "moduli")) {
    if (v == 0 || v > (1u << 16)) throw usage_error("modulus out of range");
    moduli.push_back((std::uint32_t)v);
  }
  std::vector<std::vector<std::uint32_t>> gens =
      parse_vector_rows(gens_text, moduli, "gens");
  std::uint64_t closure = oracle::subgroup_closure_size(moduli, gens);
  std::uint64_t total = 1;
  for (std::uint32_t m : moduli) total *= m;
  ReportTable t;
  t.command = "oracle closure";
  t.param("coordinates", std::to_string(moduli.size()));
  t.param("generators", std::to_string(gens.size()));
  t.columns = {"ambient_size", "closure_size"};
  t.rows.push_back({total, closure});
  t.pass = true;
  emit(t, format, out);
  return 0;
}

int run_oracle_pairing(const CommonOpts& o, const std::string& f_text,
                       std::uint64_t n_free) {
  FieldSpec field(o.q);
  auto group = parse_group(o.group_text);
  PrincipalPresentation pres = make_presentation(field, group, f_text, n_free);
  oracle::PairingVerdict v = oracle::pairing_check(pres);
  ReportTable t;
  t.command = "oracle pairing";
  t.param("group", o.group_text);
  t.param("q", std::to_string(o.q));
  t.param("f", serialize_ring_matrix(*group, pres.f));
  t.columns = {"group_order", "total_states", "rank_rf", "module_size",
               "dual_kernel_size", "pass"};
  t.rows.push_back({v.group_order, v.total_states, v.rank_rf, v.module_size,
                    v.dual_kernel_size, v.pass});
  t.pass = v.pass;
  emit(t, o.format, o.out);
  return t.pass ? 0 : 1;
}

// ------------------------------------------------------------------ config

std::vector<std::string> config_argv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file '" + path + "'");
  std::vector<std::string> command_tokens;
  std::vector<std::string> flags;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    std::string s = line.substr(a, b - a + 1);
    if (s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw usage_error("config line " + std::to_string(lineno) +
                        ": expected key=value");
    std::string key = s.substr(0, eq);
    std::string value = s.substr(eq + 1);
    std::size_t ke = key.find_last_not_of(" \t");
    key = ke == std::string::npos ? std::string() : key.substr(0, ke + 1);
    std::size_t vs = value.find_first_not_of(" \t");
    value = vs == std::string::npos ? std::string() : value.substr(vs);
    if (key.empty())
      throw usage_error("config line " + std::to_string(lineno) +
                        ": empty key");
    if (key == "command") {
      std::istringstream words(value);
      std::string w;
      while (words >> w) command_tokens.push_back(w);
      continue;
    }
    flags.push_back("--" + key);
    flags.push_back(value);
  }
  if (command_tokens.empty())
    throw usage_error("config file needs a command= line");
  std::vector<std::string> argv = command_tokens;
  argv.insert(argv.end(), flags.begin(), flags.end());
  return argv;
}

int dispatch(std::vector<std::string> args);

int run_with_config(const std::string& path) {
  return dispatch(config_argv(path));
}

// -------------------------------------------------------------------- main

int dispatch(std::vector<std::string> args) {
  CLI::App app{
      "finite-level entropy estimates for modules over F_q[G]\n"
      "run with --config FILE as the only argument to load a saved setup"};
  app.require_subcommand(1);

  int code = 0;

  // entropy
  CLI::App* entropy = app.add_subcommand("entropy", "entropy estimators");
  entropy->require_subcommand(1);

  CommonOpts po;
  std::string p_f;
  std::uint64_t p_n = 1;
  CLI::App* principal =
      entropy->add_subcommand("principal", "kernel and rank estimates");
  add_common(principal, po);
  principal->add_option("--f", p_f, "presentation matrix (empty = free)");
  principal->add_option("--n", p_n, "free module rank when --f is empty");
  principal->callback([&] { code = run_principal(po, p_f, p_n); });

  CommonOpts ro;
  std::string r_patch, r_window, r_gens_a, r_gens_b;
  CLI::App* relative =
      entropy->add_subcommand("relative", "relative estimate on a patch");
  add_common(relative, ro);
  relative->add_option("--patch", r_patch, "free:N | quotient1d:<f> | file")
      ->required();
  relative->add_option("--window", r_window, "window F as element list");
  relative->add_option("--gens-a", r_gens_a, "rows over F_q replacing gens_a");
  relative->add_option("--gens-b", r_gens_b, "rows over F_q replacing gens_b");
  relative->callback(
      [&] { code = run_relative(ro, r_patch, r_window, r_gens_a, r_gens_b); });

  CommonOpts fo;
  std::string fo_patch, fo_boxes;
  CLI::App* folner =
      entropy->add_subcommand("folner", "box sums over a lattice patch");
  add_common(folner, fo, true, false);
  folner->add_option("--patch", fo_patch, "free:N | quotient1d:<f> | file")
      ->required();
  folner->add_option("--boxes", fo_boxes, "box sides, a..b[:step] or list");
  folner->callback([&] { code = run_folner(fo, fo_patch, fo_boxes); });

  // sofic
  CLI::App* sofic = app.add_subcommand("sofic", "approximation diagnostics");
  sofic->require_subcommand(1);
  CommonOpts so;
  std::string s_window;
  CLI::App* scheck =
      sofic->add_subcommand("check", "multiplication and separation defects");
  add_common(scheck, so, false);
  scheck->add_option("--window", s_window, "window as element list");
  scheck->callback([&] { code = run_sofic_check(so, s_window); });

  // probe
  CLI::App* probe = app.add_subcommand("probe", "numerical evidence probes");
  probe->require_subcommand(1);
  CommonOpts zo;
  std::string z_f;
  CLI::App* zprobe =
      probe->add_subcommand("zero-divisor", "cyclic submodule entropy bound");
  add_common(zprobe, zo);
  zprobe->add_option("--f", z_f, "nonzero ring element")->required();
  zprobe->callback([&] { code = run_probe(zo, z_f); });

  // verify
  CLI::App* verify = app.add_subcommand("verify", "per-rung identities");
  verify->require_subcommand(1);

  CommonOpts vo;
  std::string v_f;
  std::uint64_t v_n = 1;
  CLI::App* peters = verify->add_subcommand(
      "peters", "topological vs algebraic estimates per rung");
  add_common(peters, vo);
  peters->add_option("--f", v_f, "presentation matrix (empty = free)");
  peters->add_option("--n", v_n, "free module rank when --f is empty");
  peters->callback([&] { code = run_verify_peters(vo, v_f, v_n); });

  CommonOpts ao;
  std::string a_f1, a_f2;
  CLI::App* addition = verify->add_subcommand(
      "addition", "rank additivity of block-diagonal joins");
  add_common(addition, ao);
  addition->add_option("--f1", a_f1, "first presentation matrix")->required();
  addition->add_option("--f2", a_f2, "second presentation matrix")->required();
  addition->callback([&] { code = run_verify_addition(ao, a_f1, a_f2); });

  // oracle
  CLI::App* orc =
      app.add_subcommand("oracle", "exhaustive small-scale cross-checks");
  orc->require_subcommand(1);

  std::uint64_t k_q = 2;
  std::string k_matrix, k_format = "csv", k_out;
  CLI::App* kernel =
      orc->add_subcommand("kernel", "brute kernel count vs rank");
  kernel->add_option("--q", k_q, "prime field modulus");
  kernel->add_option("--matrix", k_matrix, "integer matrix rows ; entries ,")
      ->required();
  kernel->add_option("--format", k_format, "csv or json");
  kernel->add_option("--out", k_out, "output path (default stdout)");
  kernel->callback(
      [&] { code = run_oracle_kernel(k_q, k_matrix, k_format, k_out); });

  CommonOpts mo;
  std::uint64_t m_copies = 1;
  std::string m_window, m_eps, m_delta;
  CLI::App* mapspace = orc->add_subcommand(
      "mapspace", "map counting on a full shift over a finite group");
  add_common(mapspace, mo, true, false);
  mapspace->add_option("--copies", m_copies, "regular representation copies");
  mapspace->add_option("--window", m_window, "window as element list");
  mapspace->add_option("--epsilon", m_eps, "separation scale as a rational");
  mapspace->add_option("--delta", m_delta, "equivariance tolerance rational");
  mapspace->callback(
      [&] { code = run_oracle_mapspace(mo, m_copies, m_window, m_eps, m_delta); });

  std::string c_moduli, c_gens, c_format = "csv", c_out;
  CLI::App* closure =
      orc->add_subcommand("closure", "subgroup closure size in a product");
  closure->add_option("--moduli", c_moduli, "coordinate moduli list")
      ->required();
  closure->add_option("--gens", c_gens, "generator rows ; entries ,")
      ->required();
  closure->add_option("--format", c_format, "csv or json");
  closure->add_option("--out", c_out, "output path (default stdout)");
  closure->callback(
      [&] { code = run_oracle_closure(c_moduli, c_gens, c_format, c_out); });

  CommonOpts go;
  std::string g_f;
  std::uint64_t g_n = 1;
  CLI::App* pairing = orc->add_subcommand(
      "pairing", "dual kernel size vs module size on a finite group");
  add_common(pairing, go, true, false);
  pairing->add_option("--f", g_f, "presentation matrix (empty = free)");
  pairing->add_option("--n", g_n, "free module rank when --f is empty");
  pairing->callback([&] { code = run_oracle_pairing(go, g_f, g_n); });

  std::vector<const char*> argv;
  argv.push_back("sofent");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  // --config replaces the whole command line, so catch it before parsing
  if (!args.empty() && (args[0] == "--config" || args[0].rfind("--config=", 0) == 0)) {
    try {
      std::string path = args[0] == "--config"
                             ? (args.size() > 1 ? args[1] : std::string())
                             : args[0].substr(9);
      if (path.empty()) throw usage_error("--config needs a file path");
      if (args.size() > (args[0] == "--config" ? 2u : 1u))
        throw usage_error("--config replaces the command line; pass it alone");
      return run_with_config(path);
    } catch (const resource_error& e) {
      std::cerr << "resource limit: " << e.what() << "\n";
      return 3;
    } catch (const usage_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  try {
    return dispatch(args);
  } catch (const resource_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
