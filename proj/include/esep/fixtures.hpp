#pragma once

#include "esep/graph.hpp"
#include "esep/sem.hpp"

namespace esep {
namespace fixtures {

// A -> D -> B with a latent confounder of D and B.
Dag instrumental_graph();

// Gate D feeding A and B, each also fed by its own latent confounder; the
// graph underlying gated_confounder_fixture.
Dag gated_confounder_graph();

// A -> X -> Y -> Z with a latent confounder of Y and Z; optionally a direct
// X -> Z edge.
Dag mediated_chain_graph(bool direct_link);

// Five-step chain Y1..Y4 with side variable Y5 and three latent confounders;
// optionally a direct Y1 -> Y4 effect. The two variants share all
// conditional-independence constraints.
Dag timeseries_graph(bool direct_effect);

// X and Y sharing one latent confounder; optionally a direct X -> Y edge.
Dag confounded_pair_graph(bool direct_effect);

// Treatment C with backdoor variable X, mediator D, outcome B, and a latent
// confounder of X and A.
enum class AdjustmentVariant {
  kPlain,              // adjustment over X valid
  kTreatmentConfounded,  // extra latent into C and B; adjustment invalid
  kMediatorConfounded,   // extra latent into D and B; adjustment still valid
};
Dag adjustment_graph(AdjustmentVariant variant);

// Binary treatment X, ternary outcome Y: Y = 1 when X = 1, else uniform on
// {0, 2}. Average causal effect zero although treatment moves every outcome.
SemModel null_ace_sem();

}  // namespace fixtures
}  // namespace esep
