#pragma once

#include <string>

#include "taukit/model_parser.hpp"

namespace taukit::testing {

inline std::string decay_model_text(double c) {
  return "species A\nreaction decay: A -> 0 @ mass_action " + std::to_string(c) + "\n";
}

inline ReactionNetwork decay_model(double c) { return parse_network(decay_model_text(c)); }

inline std::string pure_birth_model_text(double c) {
  return "species A\nreaction birth: 0 -> A @ mass_action " + std::to_string(c) + "\n";
}

inline ReactionNetwork pure_birth_model(double c) {
  return parse_network(pure_birth_model_text(c));
}

/// Reversible bimolecular pair plus birth and death on the unbounded
/// species: S1 + S2 -> S3, S3 -> S2, S2 -> 2 S2, S2 -> 0.
inline std::string pair_birth_death_model_text(double c1, double c2, double c3, double c4) {
  return "species S1 S2 S3\n"
         "reaction r1: S1 + S2 -> S3 @ mass_action " + std::to_string(c1) + "\n"
         "reaction r2: S3 -> S2 @ mass_action " + std::to_string(c2) + "\n"
         "reaction r3: S2 -> 2*S2 @ mass_action " + std::to_string(c3) + "\n"
         "reaction r4: S2 -> 0 @ mass_action " + std::to_string(c4) + "\n";
}

inline ReactionNetwork pair_birth_death_model(double c1, double c2, double c3, double c4) {
  return parse_network(pair_birth_death_model_text(c1, c2, c3, c4));
}

}  // namespace taukit::testing
