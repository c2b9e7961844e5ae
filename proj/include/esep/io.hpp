#pragma once

#include <string>

#include "esep/dist.hpp"
#include "esep/graph.hpp"
#include "esep/sem.hpp"

namespace esep {

// Line-oriented DSL: `obs <name>...`, `lat <name>...`, `<parent> -> <child>`,
// `#` comments. Errors carry 1-based line numbers.
Dag parse_graph(const std::string& text);
// Canonical form: sorted declarations, then sorted edges.
std::string format_graph(const Dag& g);

// Delimited text; header = variable names plus a final `prob` or `count`
// column. Count tables are normalized and remember the sample size.
JointTable parse_table(const std::string& text);
std::string format_table(const JointTable& t);

// Graph DSL followed by `domain`, `noise`, and `mech` lines:
//   domain <node> <value>...
//   noise <node> <value> <prob> ...
//   mech <node> [<parent values, sorted by parent name>] <noise value> -> <value>
SemModel parse_sem(const std::string& text);
std::string format_sem(const SemModel& sem);

}  // namespace esep
