#include "esep/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace esep {

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error("line " + std::to_string(line) + ": " + msg);
}

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::vector<std::string> tokens;
    std::string tok;
    for (char ch : raw) {
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
        if (!tok.empty()) tokens.push_back(std::move(tok)), tok.clear();
      } else {
        tok += ch;
      }
    }
    if (!tok.empty()) tokens.push_back(std::move(tok));
    if (!tokens.empty()) out.push_back({number, std::move(tokens)});
  }
  return out;
}

int parse_int(const std::string& tok, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    fail(line, "expected an integer, got '" + tok + "'");
  }
  return v;
}

double parse_real(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + tok + "'");
  }
}

void check_name(const std::string& name, int line) {
  if (name.size() >= 6 && name.ends_with(kSplitSuffix)) {
    fail(line, "node name '" + name + "' uses the reserved split suffix");
  }
}

std::string real_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Graph declarations and edges from DSL lines; non-graph lines are returned
// for the SEM parser.
Dag parse_graph_lines(const std::vector<Line>& lines, std::vector<Line>* rest) {
  std::vector<NodeDecl> nodes;
  std::set<std::string> declared;
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& line : lines) {
    const auto& t = line.tokens;
    if (t[0] == "obs" || t[0] == "lat") {
      if (t.size() < 2) fail(line.number, "'" + t[0] + "' needs at least one name");
      for (std::size_t i = 1; i < t.size(); ++i) {
        check_name(t[i], line.number);
        if (!declared.insert(t[i]).second) {
          fail(line.number, "node '" + t[i] + "' declared twice");
        }
        nodes.push_back({t[i], t[0] == "obs"});
      }
    } else if (t.size() == 3 && t[1] == "->") {
      for (const auto& end : {t[0], t[2]}) {
        if (!declared.count(end)) fail(line.number, "undeclared node '" + end + "'");
      }
      if (t[0] == t[2]) fail(line.number, "self-loop on '" + t[0] + "'");
      edges.push_back({t[0], t[2]});
    } else if (rest && (t[0] == "domain" || t[0] == "noise" || t[0] == "mech")) {
      rest->push_back(line);
    } else {
      fail(line.number, "unrecognized directive '" + t[0] + "'");
    }
  }
  {
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end()) {
      throw Error("duplicate edge " + it->first + " -> " + it->second);
    }
  }
  return Dag(std::move(nodes), std::move(edges));
}

}  // namespace

Dag parse_graph(const std::string& text) {
  return parse_graph_lines(tokenize(text), nullptr);
}

std::string format_graph(const Dag& g) {
  std::string out;
  VarSet obs = g.observed_nodes(), lat = g.latent_nodes();
  if (!obs.empty()) out += "obs " + obs.joined(" ") + "\n";
  if (!lat.empty()) out += "lat " + lat.joined(" ") + "\n";
  auto edges = g.edges();
  std::sort(edges.begin(), edges.end());
  for (const auto& [p, c] : edges) out += p + " -> " + c + "\n";
  return out;
}

JointTable parse_table(const std::string& text) {
  auto lines = tokenize(text);
  if (lines.empty()) throw Error("empty table");
  const auto& header = lines[0].tokens;
  if (header.size() < 2) fail(lines[0].number, "header needs a variable and a weight column");
  bool counts = header.back() == "count";
  if (!counts && header.back() != "prob") {
    fail(lines[0].number, "final header column must be 'prob' or 'count'");
  }
  std::vector<std::string> vars(header.begin(), header.end() - 1);
  {
    auto sorted = vars;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(lines[0].number, "duplicate variable in header");
    }
  }

  std::vector<std::pair<std::vector<Value>, double>> rows;
  std::vector<std::set<Value>> seen(vars.size());
  std::set<std::vector<Value>> keys;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& t = lines[li].tokens;
    if (t.size() != header.size()) {
      fail(lines[li].number, "expected " + std::to_string(header.size()) + " columns");
    }
    std::vector<Value> vals;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      Value v = parse_int(t[i], lines[li].number);
      vals.push_back(v);
      seen[i].insert(v);
    }
    if (!keys.insert(vals).second) fail(lines[li].number, "duplicate assignment row");
    double w = parse_real(t.back(), lines[li].number);
    if (w < 0.0) fail(lines[li].number, "negative weight");
    rows.push_back({std::move(vals), w});
  }
  if (rows.empty()) throw Error("table has no rows");

  std::vector<std::vector<Value>> domains;
  for (const auto& s : seen) domains.push_back({s.begin(), s.end()});
  JointTable out(vars, domains);
  for (const auto& [vals, w] : rows) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a.set(vars[i], vals[i]);
    out.add_prob(a, w);
  }
  if (counts) {
    double total = out.total();
    if (total <= 0.0) throw Error("counts sum to zero");
    out.sample_size = total;
    out.normalize();
  } else {
    out.validate(1e-9);
  }
  return out;
}

std::string format_table(const JointTable& t) {
  std::string out;
  for (const auto& v : t.variables()) out += v + " ";
  out += t.sample_size ? "count\n" : "prob\n";
  double scale = t.sample_size.value_or(1.0);
  t.for_each([&](const std::vector<Value>& vals, double p) {
    for (Value v : vals) out += std::to_string(v) + " ";
    out += real_str(p * scale) + "\n";
  });
  return out;
}

SemModel parse_sem(const std::string& text) {
  std::vector<Line> rest;
  Dag g = parse_graph_lines(tokenize(text), &rest);
  SemBuilder b(g);
  // Mechanism rows keyed by (parent values in sorted parent-name order, noise).
  std::map<std::string, std::map<std::pair<std::vector<Value>, Value>, Value>> mechs;
  std::map<std::string, int> mech_line;
  for (const auto& line : rest) {
    const auto& t = line.tokens;
    if (t.size() < 2 || g.index_of(t[1]) < 0) {
      fail(line.number, "unknown node in '" + t[0] + "' directive");
    }
    const std::string& node = t[1];
    if (t[0] == "domain") {
      std::vector<Value> dom;
      for (std::size_t i = 2; i < t.size(); ++i) dom.push_back(parse_int(t[i], line.number));
      if (dom.empty()) fail(line.number, "empty domain");
      b.domain(node, dom);
    } else if (t[0] == "noise") {
      if (t.size() < 4 || t.size() % 2 != 0) {
        fail(line.number, "noise needs value/probability pairs");
      }
      std::vector<std::pair<Value, double>> dist;
      for (std::size_t i = 2; i + 1 < t.size(); i += 2) {
        dist.push_back({parse_int(t[i], line.number), parse_real(t[i + 1], line.number)});
      }
      b.noise(node, dist);
    } else {  // mech
      std::size_t npar = g.parents(node).size();
      if (t.size() != npar + 5 || t[t.size() - 2] != "->") {
        fail(line.number, "mech needs parent values, a noise value, '->', and a value");
      }
      std::vector<Value> pvals;
      for (std::size_t i = 2; i < 2 + npar; ++i) pvals.push_back(parse_int(t[i], line.number));
      Value nval = parse_int(t[2 + npar], line.number);
      Value v = parse_int(t.back(), line.number);
      auto key = std::make_pair(std::move(pvals), nval);
      if (!mechs[node].emplace(std::move(key), v).second) {
        fail(line.number, "duplicate mechanism row for " + node);
      }
      mech_line[node] = line.number;
    }
  }
  for (const auto& nd : g.node_decls()) {
    auto it = mechs.find(nd.name);
    if (it == mechs.end()) throw Error("no mechanism rows for " + nd.name);
    const auto& rows = it->second;
    int line = mech_line[nd.name];
    auto pars = g.parents(nd.name);
    std::sort(pars.begin(), pars.end());
    b.mech(nd.name, [rows, pars, line, name = nd.name](const Assignment& pa, Value noise) {
      std::vector<Value> pvals;
      for (const auto& p : pars) pvals.push_back(pa.at(p));
      auto it2 = rows.find({pvals, noise});
      if (it2 == rows.end()) {
        fail(line, "mechanism table for " + name + " is missing a row");
      }
      return it2->second;
    });
  }
  return b.build();
}

std::string format_sem(const SemModel& sem) {
  std::string out = format_graph(sem.dag());
  out += "\n";
  for (const auto& name : sem.dag().all_nodes()) {
    out += "domain " + name;
    for (Value v : sem.domain(name)) out += " " + std::to_string(v);
    out += "\n";
    out += "noise " + name;
    const NoiseDist& nd = sem.noise(name);
    for (std::size_t i = 0; i < nd.values.size(); ++i) {
      out += " " + std::to_string(nd.values[i]) + " " + real_str(nd.probs[i]);
    }
    out += "\n";
    sem.for_each_mech_row(name, [&](const Assignment& pa, Value noise, Value v) {
      out += "mech " + name;
      for (const auto& [pname, pval] : pa) {
        (void)pname;
        out += " " + std::to_string(pval);
      }
      out += " " + std::to_string(noise) + " -> " + std::to_string(v) + "\n";
    });
  }
  return out;
}

}  // namespace esep
