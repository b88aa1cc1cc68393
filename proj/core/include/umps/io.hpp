#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "umps/mps.hpp"

namespace umps {

/// Malformed or inconsistent file content. `where` is a JSON-pointer-like
/// location such as "tensors.AL[1][0][2]".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class IOError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// UMPS-JSON v1:
///   format "umps-json/1", unit_cell L, physical_dims [d_0..d_{L-1}],
///   bond_dims [chi_0..chi_L] with chi_L == chi_0, and tensors.AL / .AR / .C
///   holding one nested array per site of [re, im] pairs in index order
///   (left, physical, right) for AL/AR and (row, col) for C.
/// Numbers are written with 17 significant digits.
std::string to_json(const UniformMPS& state);
UniformMPS state_from_json(const std::string& text);
void save_state(const UniformMPS& state, const std::filesystem::path& path);
UniformMPS load_state(const std::filesystem::path& path);

/// MPO-JSON v1: format "mpo-json/1", unit_cell, physical_dims [[out, in]...],
/// bond_dims (length L+1, cyclic) and tensors.O in index order
/// (left, phys_out, phys_in, right).
std::string to_json(const MPO& mpo);
MPO mpo_from_json(const std::string& text);
void save_mpo(const MPO& mpo, const std::filesystem::path& path);
MPO load_mpo(const std::filesystem::path& path);

/// %.17g formatting shared by the JSON and CSV writers.
std::string format_double(double x);

}  // namespace umps
