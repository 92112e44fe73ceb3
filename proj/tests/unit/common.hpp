#pragma once

#include <random>

#include <doctest.h>

#include "heligate/config.hpp"
#include "heligate/dvr.hpp"
#include "heligate/io.hpp"
#include "heligate/spectrum.hpp"

namespace testutil {

using namespace heligate;

inline const VoltageVector& table(const char* name) { return builtin_voltages().at(name); }

// Optimizer-produced idle and swap vectors with ~10 GHz qubits.
inline VoltageVector desk(const char* name) {
  return load_voltage_csv(std::string(HELIGATE_SOURCE_DIR) + "/configs/desk_" + name + ".csv");
}

// Small grids keep every test well under a second.
inline BasisPtr small_basis(const DeviceModel& dev, int points = 12) {
  GridOptions g;
  g.points_per_well = points;
  return auto_basis(dev, table("I"), g);
}

inline TwoBodyState random_state(const BasisPtr& basis, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd c(basis->left.count, basis->right.count);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = {n(rng), n(rng)};
  TwoBodyState s(basis, c);
  s.normalize();
  return s;
}

}  // namespace testutil
