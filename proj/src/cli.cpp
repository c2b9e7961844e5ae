#include "esep/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "esep/constraints.hpp"
#include "esep/discovery.hpp"
#include "esep/dist.hpp"
#include "esep/graph.hpp"
#include "esep/io.hpp"
#include "esep/mme.hpp"
#include "esep/sem.hpp"

namespace esep {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string bits6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

VarSet parse_set(const std::string& csv) {
  std::vector<std::string> names;
  std::string cur;
  for (char ch : csv + ",") {
    if (ch == ',') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  return VarSet(names);
}

EsepCaps parse_caps(const std::string& csv) {
  EsepCaps caps;
  int vals[4] = {caps.a, caps.b, caps.c, caps.d};
  std::istringstream in(csv);
  std::string tok;
  int i = 0;
  while (std::getline(in, tok, ',') && i < 4) vals[i++] = std::stoi(tok);
  if (i != 4) throw Error("--caps wants four comma-separated sizes");
  caps = {vals[0], vals[1], vals[2], vals[3]};
  if (caps.a < 1 || caps.b < 1) throw Error("endpoint caps must be at least 1");
  return caps;
}

std::map<std::string, long long> parse_cards(const std::vector<std::string>& specs) {
  std::map<std::string, long long> out;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error("--latent-card wants NAME=K, got '" + s + "'");
    }
    out[s.substr(0, eq)] = std::stoll(s.substr(eq + 1));
  }
  return out;
}

std::size_t state_cap() {
  if (const char* env = std::getenv("ESEP_STATE_CAP")) {
    return static_cast<std::size_t>(std::stoull(env));
  }
  return kDefaultStateCap;
}

std::string graph_id(const std::string& path, int index) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  if (auto dot = base.rfind('.'); dot != std::string::npos && dot > 0) base.resize(dot);
  return base.empty() ? "graph" + std::to_string(index) : base;
}

std::string set_str(const VarSet& s) { return "{" + s.joined(",") + "}"; }

json report_json(const ConstraintReport& r) {
  json j;
  j["constraint"] = r.constraint.pretty();
  j["tier"] = tier_name(r.constraint.tier);
  j["pointwise"] = r.constraint.pointwise;
  j["subsumed"] = r.constraint.subsumed;
  j["lhs_bits"] = bits6(r.lhs_bits);
  j["rhs_bits"] = bits6(r.rhs_bits);
  j["slack_bits"] = bits6(r.slack);
  j["satisfied"] = r.satisfied;
  if (r.worst_value) j["worst_value"] = r.worst_value->to_string();
  return j;
}

std::string report_text(const ConstraintReport& r) {
  std::string line = r.constraint.pretty() + "  tier=" + tier_name(r.constraint.tier);
  if (r.constraint.pointwise) line += " pointwise";
  if (r.constraint.subsumed) line += " subsumed";
  line += "  lhs=" + bits6(r.lhs_bits) + " rhs=" + bits6(r.rhs_bits) +
          " slack=" + bits6(r.slack);
  if (r.worst_value) line += " at " + r.worst_value->to_string();
  line += r.satisfied ? "  PASS" : "  FAIL";
  return line;
}

struct Options {
  std::string graph_path, dist_path, out_path;
  std::vector<std::string> graph_paths;
  std::string caps_csv = "2,2,2,2";
  std::string a_csv, b_csv, c_csv, d_csv, x_csv, y_csv;
  std::string format = "text";
  std::string kind = "violation";
  std::string path_csv, collider_csv;
  std::vector<std::string> card_specs;
  double eps = 1e-9;
  double eps_empirical = 0.01;
  double bias = 0.99;
  double tol = 1e-4;
  int gate_values = 2;
  int card = 2;
  int restarts = 6;
  int wmax = 0;
  bool latents = false;
  std::uint64_t seed = 0;
};

class Emitter {
 public:
  Emitter(const Options& opt, const std::string& command) : opt_(opt) {
    root_["tool"] = "esepc";
    root_["version"] = kToolVersion;
    root_["command"] = command;
    root_["seed"] = opt.seed;
    root_["eps"] = opt.eps;
    root_["eps_empirical"] = opt.eps_empirical;
    text_ << "# esepc " << kToolVersion << " command=" << command
          << " seed=" << opt.seed << " eps=" << opt.eps
          << " eps-empirical=" << opt.eps_empirical << "\n";
  }

  std::ostream& text() { return text_; }
  json& root() { return root_; }

  void flush(std::ostream& out) {
    std::string payload =
        opt_.format == "json-like" ? root_.dump(2) + "\n" : text_.str();
    if (!opt_.out_path.empty()) {
      std::ofstream f(opt_.out_path, std::ios::binary);
      if (!f) throw Error("cannot write " + opt_.out_path);
      f << payload;
    } else {
      out << payload;
    }
  }

 private:
  const Options& opt_;
  std::ostringstream text_;
  json root_;
};

int cmd_esep(const Options& opt, std::ostream& out) {
  Dag g = parse_graph(read_file(opt.graph_path));
  auto entries = enumerate_esep(g, parse_caps(opt.caps_csv), !opt.latents);
  Emitter em(opt, "esep");
  em.root()["relations"] = json::array();
  for (const auto& e : entries) {
    em.text() << "a=" << set_str(e.rel.a) << " b=" << set_str(e.rel.b)
              << " c=" << set_str(e.rel.c) << " d=" << set_str(e.rel.d)
              << (e.minimal ? "  minimal" : "") << "\n";
    json j;
    j["a"] = e.rel.a.names();
    j["b"] = e.rel.b.names();
    j["c"] = e.rel.c.names();
    j["d"] = e.rel.d.names();
    j["minimal"] = e.minimal;
    em.root()["relations"].push_back(j);
  }
  em.text() << "# " << entries.size() << " relation(s)\n";
  em.flush(out);
  return 0;
}

int cmd_derive(const Options& opt, std::ostream& out) {
  Dag g = parse_graph(read_file(opt.graph_path));
  EsepRelation rel{parse_set(opt.a_csv), parse_set(opt.b_csv), parse_set(opt.c_csv),
                   parse_set(opt.d_csv)};
  auto constraints = derive(g, rel);
  Emitter em(opt, "derive");
  em.root()["constraints"] = json::array();
  for (const auto& k : constraints) {
    em.text() << k.pretty() << "  tier=" << tier_name(k.tier)
              << (k.pointwise ? " pointwise" : "") << (k.subsumed ? " subsumed" : "")
              << "\n";
    json j;
    j["constraint"] = k.pretty();
    j["tier"] = tier_name(k.tier);
    j["pointwise"] = k.pointwise;
    j["subsumed"] = k.subsumed;
    em.root()["constraints"].push_back(j);
  }
  em.flush(out);
  return 0;
}

void verdict_emit(const ModelVerdict& v, Emitter& em) {
  em.text() << "model " << v.graph_id << ": "
            << (v.falsified ? "FALSIFIED" : "consistent")
            << " worst-violation=" << bits6(v.worst_violation) << "\n";
  json j;
  j["id"] = v.graph_id;
  j["falsified"] = v.falsified;
  j["worst_violation_bits"] = bits6(v.worst_violation);
  j["equalities"] = json::array();
  for (const auto& e : v.equalities) {
    em.text() << "  ci " << set_str(e.a) << " _|_ " << set_str(e.b) << " | "
              << set_str(e.c) << "  cmi=" << bits6(e.cmi_bits)
              << (e.pass ? "  PASS" : "  FAIL") << "\n";
    json je;
    je["a"] = e.a.names();
    je["b"] = e.b.names();
    je["c"] = e.c.names();
    je["cmi_bits"] = bits6(e.cmi_bits);
    je["pass"] = e.pass;
    j["equalities"].push_back(je);
  }
  j["inequalities"] = json::array();
  for (const auto& r : v.inequalities) {
    em.text() << "  " << report_text(r) << "\n";
    j["inequalities"].push_back(report_json(r));
  }
  j["cardinalities"] = json::array();
  for (const auto& c : v.cardinalities) {
    em.text() << "  latent " << c.latent << " declared=" << c.declared
              << " log2=" << bits6(std::log2(static_cast<double>(c.declared)))
              << " required=" << c.required << " (" << bits6(c.required_bits)
              << " bits)" << (c.pass ? "  PASS" : "  FAIL") << "\n";
    json jc;
    jc["latent"] = c.latent;
    jc["declared"] = c.declared;
    jc["required"] = c.required;
    jc["required_bits"] = bits6(c.required_bits);
    jc["pass"] = c.pass;
    j["cardinalities"].push_back(jc);
  }
  em.root()["models"].push_back(j);
}

int cmd_check_or_compare(const Options& opt, std::ostream& out, bool single) {
  JointTable t = parse_table(read_file(opt.dist_path));
  double eps = t.sample_size ? opt.eps_empirical : opt.eps;
  auto cards = parse_cards(opt.card_specs);
  std::vector<Candidate> cands;
  std::vector<std::string> paths =
      single ? std::vector<std::string>{opt.graph_path} : opt.graph_paths;
  int idx = 0;
  for (const auto& p : paths) {
    Dag g = parse_graph(read_file(p));
    std::map<std::string, long long> own;
    for (const auto& [name, k] : cards) {
      if (g.has_node(name) && !g.observed(name)) own[name] = k;
    }
    cands.push_back({single ? "model" : graph_id(p, idx), g, own});
    ++idx;
  }
  auto verdicts = compare(cands, t, parse_caps(opt.caps_csv), eps, eps);
  Emitter em(opt, single ? "check" : "compare");
  em.root()["models"] = json::array();
  bool any = false;
  for (const auto& v : verdicts) {
    verdict_emit(v, em);
    any = any || v.falsified;
  }
  em.flush(out);
  return any ? 1 : 0;
}

int cmd_latent_bound(const Options& opt, std::ostream& out) {
  JointTable t = parse_table(read_file(opt.dist_path));
  VarSet a = parse_set(opt.a_csv), b = parse_set(opt.b_csv), c = parse_set(opt.c_csv);
  auto bound = latent_entropy_bound(t, a, b, c);
  auto card = latent_cardinality_bound(t, a, b, c);
  Emitter em(opt, "latent-bound");
  em.root()["per_value"] = json::array();
  for (const auto& [gamma, bits] : bound.per_value) {
    em.text() << "value " << (gamma.empty() ? "-" : gamma.to_string())
              << " bound=" << bits6(bits) << "\n";
    json j;
    j["value"] = gamma.to_string();
    j["bound_bits"] = bits6(bits);
    em.root()["per_value"].push_back(j);
  }
  em.text() << "max-bits " << bits6(bound.max_bits) << "\n";
  em.text() << "averaged-bits " << bits6(bound.averaged_bits) << "\n";
  em.text() << "cardinality " << bits6(card.bound) << " ceiling " << card.ceiling
            << "\n";
  em.root()["max_bits"] = bits6(bound.max_bits);
  em.root()["averaged_bits"] = bits6(bound.averaged_bits);
  em.root()["cardinality"] = bits6(card.bound);
  em.root()["ceiling"] = card.ceiling;
  em.flush(out);
  return 0;
}

int cmd_mme(const Options& opt, std::ostream& out) {
  JointTable t = parse_table(read_file(opt.dist_path));
  MmeOptions mo;
  mo.w_card_max = opt.wmax;
  mo.restarts = opt.restarts;
  mo.seed = opt.seed;
  mo.tol = opt.tol;
  MmeEstimate est = mme_estimate(t, parse_set(opt.x_csv), parse_set(opt.y_csv),
                                 parse_set(opt.c_csv), mo);
  Emitter em(opt, "mme");
  em.text() << "lower " << bits6(est.lower_bits) << "\n";
  em.text() << "lower-averaged " << bits6(est.averaged_lower_bits) << "\n";
  em.text() << "upper-trivial " << bits6(est.trivial_upper_bits) << "\n";
  if (est.numeric_bits) {
    em.text() << "numeric " << bits6(*est.numeric_bits) << " w-cardinality "
              << est.w_cardinality << (est.converged ? "" : " (not converged)")
              << "\n";
  } else {
    em.text() << "numeric none (no feasible cardinality)\n";
  }
  em.text() << "restarts " << est.restarts_run << "\n";
  em.root()["lower_bits"] = bits6(est.lower_bits);
  em.root()["lower_averaged_bits"] = bits6(est.averaged_lower_bits);
  em.root()["upper_trivial_bits"] = bits6(est.trivial_upper_bits);
  if (est.numeric_bits) em.root()["numeric_bits"] = bits6(*est.numeric_bits);
  em.root()["w_cardinality"] = est.w_cardinality;
  em.root()["converged"] = est.converged;
  em.root()["restarts"] = est.restarts_run;
  em.flush(out);
  return 0;
}

int cmd_witness(const Options& opt, std::ostream& out) {
  SemModel sem = [&] {
    if (opt.kind == "gate") return gated_confounder_fixture(opt.gate_values);
    if (opt.kind == "cancel") return xor_cancellation_fixture(opt.bias);
    Dag g = parse_graph(read_file(opt.graph_path));
    if (opt.kind == "path") {
      std::vector<std::string> path;  // split by hand: order matters here
      std::string cur;
      for (char ch : opt.path_csv + ",") {
        if (ch == ',') {
          if (!cur.empty()) path.push_back(cur);
          cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
          cur += ch;
        }
      }
      return path_witness(g, path, parse_set(opt.collider_csv));
    }
    if (opt.kind == "violation") {
      EsepRelation rel{parse_set(opt.a_csv), parse_set(opt.b_csv),
                       parse_set(opt.c_csv), parse_set(opt.d_csv)};
      return violation_witness(g, rel, opt.bias);
    }
    throw Error("unknown witness kind '" + opt.kind + "'");
  }();
  Emitter em(opt, "witness");
  std::string sem_text = format_sem(sem);
  std::string joint_text = format_table(sem.observed_joint(state_cap()));
  em.text() << sem_text << "\n" << joint_text;
  em.root()["sem"] = sem_text;
  em.root()["joint"] = joint_text;
  em.flush(out);
  return 0;
}

int cmd_sim(const Options& opt, std::ostream& out) {
  Dag g = parse_graph(read_file(opt.graph_path));
  SemModel sem = random_sem(g, opt.card, opt.seed);
  Emitter em(opt, "sim");
  std::string joint_text = format_table(sem.observed_joint(state_cap()));
  em.text() << joint_text;
  em.root()["joint"] = joint_text;
  em.flush(out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"entropic bottleneck constraints for hidden-variable DAGs"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out_path, "write the report to a file");
    sub->add_option("--format", opt.format, "text or json-like")
        ->check(CLI::IsMember({"text", "json-like"}));
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--eps", opt.eps, "tolerance for exact tables (bits)");
    sub->add_option("--eps-empirical", opt.eps_empirical,
                    "tolerance for count-derived tables (bits)");
  };

  CLI::App* c_esep = app.add_subcommand("esep", "enumerate bottleneck relations");
  c_esep->add_option("--graph", opt.graph_path)->required();
  c_esep->add_option("--caps", opt.caps_csv, "a,b,c,d set-size caps");
  c_esep->add_flag("--latents", opt.latents, "allow latents in c and d");
  add_common(c_esep);

  CLI::App* c_derive = app.add_subcommand("derive", "derive constraints for a relation");
  c_derive->add_option("--graph", opt.graph_path)->required();
  c_derive->add_option("--a", opt.a_csv)->required();
  c_derive->add_option("--b", opt.b_csv)->required();
  c_derive->add_option("--c", opt.c_csv);
  c_derive->add_option("--d", opt.d_csv);
  add_common(c_derive);

  CLI::App* c_check = app.add_subcommand("check", "evaluate one model against a table");
  c_check->add_option("--graph", opt.graph_path)->required();
  c_check->add_option("--dist", opt.dist_path)->required();
  c_check->add_option("--caps", opt.caps_csv);
  c_check->add_option("--latent-card", opt.card_specs, "NAME=K declared cardinality");
  add_common(c_check);

  CLI::App* c_bound = app.add_subcommand("latent-bound", "latent entropy/cardinality bound");
  c_bound->add_option("--dist", opt.dist_path)->required();
  c_bound->add_option("--a", opt.a_csv)->required();
  c_bound->add_option("--b", opt.b_csv)->required();
  c_bound->add_option("--c", opt.c_csv);
  add_common(c_bound);

  CLI::App* c_mme = app.add_subcommand("mme", "minimal mediary entropy bounds");
  c_mme->add_option("--dist", opt.dist_path)->required();
  c_mme->add_option("--x", opt.x_csv)->required();
  c_mme->add_option("--y", opt.y_csv)->required();
  c_mme->add_option("--c", opt.c_csv);
  c_mme->add_option("--restarts", opt.restarts);
  c_mme->add_option("--w-card-max", opt.wmax);
  c_mme->add_option("--tol", opt.tol, "total-variation feasibility tolerance");
  add_common(c_mme);

  CLI::App* c_cmp = app.add_subcommand("compare", "rank candidate models against a table");
  c_cmp->add_option("--graph", opt.graph_paths, "candidate graph file (repeatable)")
      ->required();
  c_cmp->add_option("--dist", opt.dist_path)->required();
  c_cmp->add_option("--caps", opt.caps_csv);
  c_cmp->add_option("--latent-card", opt.card_specs, "NAME=K declared cardinality");
  add_common(c_cmp);

  CLI::App* c_wit = app.add_subcommand("witness", "emit a witness model and its joint");
  c_wit->add_option("--kind", opt.kind, "path, violation, gate, or cancel")
      ->check(CLI::IsMember({"path", "violation", "gate", "cancel"}));
  c_wit->add_option("--graph", opt.graph_path);
  c_wit->add_option("--path", opt.path_csv, "comma-separated path nodes");
  c_wit->add_option("--colliders", opt.collider_csv);
  c_wit->add_option("--a", opt.a_csv);
  c_wit->add_option("--b", opt.b_csv);
  c_wit->add_option("--c", opt.c_csv);
  c_wit->add_option("--d", opt.d_csv);
  c_wit->add_option("--bias", opt.bias, "noise bias toward zero");
  c_wit->add_option("--values", opt.gate_values, "confounder domain size for kind=gate");
  add_common(c_wit);

  CLI::App* c_sim = app.add_subcommand("sim", "random model observed joint");
  c_sim->add_option("--graph", opt.graph_path)->required();
  c_sim->add_option("--card", opt.card, "domain size per node");
  add_common(c_sim);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_esep)) return cmd_esep(opt, out);
    if (app.got_subcommand(c_derive)) return cmd_derive(opt, out);
    if (app.got_subcommand(c_check)) return cmd_check_or_compare(opt, out, true);
    if (app.got_subcommand(c_bound)) return cmd_latent_bound(opt, out);
    if (app.got_subcommand(c_mme)) return cmd_mme(opt, out);
    if (app.got_subcommand(c_cmp)) return cmd_check_or_compare(opt, out, false);
    if (app.got_subcommand(c_wit)) return cmd_witness(opt, out);
    if (app.got_subcommand(c_sim)) return cmd_sim(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no command\n";
  return 2;
}

}  // namespace esep
