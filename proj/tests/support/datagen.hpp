// Synthetic dataset generators for tests and the acceptance suite.
#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "edrvfl/evaluation.hpp"

namespace datagen {

using edrvfl::IntVector;
using edrvfl::Matrix;

// Gaussian blobs: k classes, one spherical cluster per class.
inline edrvfl::evaluation::TableData blobs(int rows_per_class, int classes,
                                           int features, double separation,
                                           double noise, std::uint64_t seed,
                                           const std::string& name = "blobs") {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  Matrix centers(classes, features);
  for (int c = 0; c < classes; ++c) {
    for (int f = 0; f < features; ++f) {
      centers(c, f) = separation * unit(rng);
    }
  }
  const int rows = rows_per_class * classes;
  edrvfl::evaluation::TableData table;
  table.name = name;
  table.features.resize(rows, features);
  table.y.resize(rows);
  table.k = classes;
  for (int c = 0; c < classes; ++c) {
    table.label_names.push_back("class" + std::to_string(c));
  }
  int row = 0;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < rows_per_class; ++i, ++row) {
      for (int f = 0; f < features; ++f) {
        table.features(row, f) = centers(c, f) + noise * gauss(rng);
      }
      table.y(row) = c;
    }
  }
  return table;
}

// The classic three-class waveform generator (21 attributes): each sample
// is a random convex combination of two of three triangular base waves plus
// unit Gaussian noise per attribute.
inline edrvfl::evaluation::TableData waveform(int rows, std::uint64_t seed) {
  auto base = [](int which, int i) {
    const int peak = which == 0 ? 7 : (which == 1 ? 15 : 11);
    return std::max(6.0 - std::abs(i - peak), 0.0);
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> cls(0, 2);

  edrvfl::evaluation::TableData table;
  table.name = "waveform";
  table.features.resize(rows, 21);
  table.y.resize(rows);
  table.k = 3;
  table.label_names = {"0", "1", "2"};
  for (int r = 0; r < rows; ++r) {
    const int c = cls(rng);
    const int a = c == 2 ? 1 : 0;
    const int b = c == 0 ? 1 : 2;
    const double u = unit(rng);
    for (int i = 0; i < 21; ++i) {
      table.features(r, i) =
          u * base(a, i + 1) + (1.0 - u) * base(b, i + 1) + gauss(rng);
    }
    table.y(r) = c;
  }
  return table;
}

inline void write_csv(const edrvfl::evaluation::TableData& table,
                      const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  for (Eigen::Index j = 0; j < table.features.cols(); ++j) {
    out << "f" << j << ",";
  }
  out << "label\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < table.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.features.cols(); ++j) {
      out << table.features(i, j) << ",";
    }
    out << table.label_names[static_cast<std::size_t>(table.y(i))] << "\n";
  }
}

}  // namespace datagen
