#include "effmass/potential_io.hpp"

#include "effmass/errors.hpp"

#include <sstream>

namespace effmass {

using nlohmann::json;

LatticeSpec lattice_from_json(const json& j) {
  if (j.contains("generators")) {
    const auto& rows = j.at("generators");
    const auto d = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd z(d, d);
    for (Eigen::Index l = 0; l < d; ++l) {
      if (static_cast<Eigen::Index>(rows[l].size()) != d) throw ConfigError("lattice generators must be d x d");
      for (Eigen::Index i = 0; i < d; ++i) z(i, l) = rows[l][i].get<double>();
    }
    return LatticeSpec(z);
  }
  return LatticeSpec::hypercubic(j.value("dimension", 1));
}

json lattice_to_json(const LatticeSpec& lattice) {
  json rows = json::array();
  for (int l = 0; l < lattice.dim(); ++l) {
    json r = json::array();
    for (int i = 0; i < lattice.dim(); ++i) r.push_back(lattice.generators()(i, l));
    rows.push_back(r);
  }
  return {{"dimension", lattice.dim()}, {"generators", rows}};
}

MultiIndex parse_multi_index(const std::string& key, int dim) {
  MultiIndex m{0, 0};
  std::stringstream ss(key);
  std::string part;
  int count = 0;
  while (std::getline(ss, part, ',')) {
    if (count >= dim) throw ConfigError("multi-index '" + key + "' has too many components");
    try {
      std::size_t pos = 0;
      m[count] = std::stoi(part, &pos);
      if (part.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("malformed multi-index '" + key + "'");
    }
    ++count;
  }
  if (count != dim) throw ConfigError("multi-index '" + key + "' needs " + std::to_string(dim) + " components");
  return m;
}

std::string format_multi_index(const MultiIndex& m, int dim) {
  return dim == 1 ? std::to_string(m[0]) : std::to_string(m[0]) + "," + std::to_string(m[1]);
}

FourierPotential potential_from_json(const LatticeSpec& lattice, const json& j) {
  const std::string type = j.value("type", "fourier");
  if (type == "zero") return FourierPotential::zero(lattice);
  if (type == "cosine") return FourierPotential::cosine(lattice, j.value("amplitude", 1.0));
  if (type == "laser") return FourierPotential::laser(lattice, j.value("depth", 1.0));
  if (type != "fourier") throw ConfigError("unknown potential type '" + type + "'");

  std::map<MultiIndex, cplx> coeffs;
  for (const auto& [key, value] : j.at("coefficients").items()) {
    if (!value.is_array() || value.size() != 2) throw ConfigError("coefficient '" + key + "' must be [re, im]");
    coeffs[parse_multi_index(key, lattice.dim())] = {value[0].get<double>(), value[1].get<double>()};
  }
  return FourierPotential(lattice, std::move(coeffs));
}

json potential_to_json(const FourierPotential& potential) {
  json c = json::object();
  for (const auto& [m, v] : potential.coefficients()) {
    c[format_multi_index(m, potential.dim())] = {v.real(), v.imag()};
  }
  return {{"type", "fourier"}, {"coefficients", c}};
}

}  // namespace effmass
