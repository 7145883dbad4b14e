#pragma once

#include "effmass/lattice.hpp"

#include <json.hpp>

namespace effmass {

/// {"dimension": d} or {"generators": [[...], ...]} (one row per generator).
LatticeSpec lattice_from_json(const nlohmann::json& j);
nlohmann::json lattice_to_json(const LatticeSpec& lattice);

/**
 * Potential description. Accepted forms:
 *   {"type": "zero"}
 *   {"type": "cosine", "amplitude": a}
 *   {"type": "laser", "depth": s}
 *   {"type": "fourier", "coefficients": {"1": [re, im], "-1": [re, im], ...}}
 * In two dimensions Fourier keys are "m1,m2".
 */
FourierPotential potential_from_json(const LatticeSpec& lattice, const nlohmann::json& j);

/// Always emits the explicit "fourier" form.
nlohmann::json potential_to_json(const FourierPotential& potential);

MultiIndex parse_multi_index(const std::string& key, int dim);
std::string format_multi_index(const MultiIndex& m, int dim);

}  // namespace effmass
