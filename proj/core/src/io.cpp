#include "umps/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace umps {

namespace {

using json = nlohmann::json;

constexpr const char* kStateFormat = "umps-json/1";
constexpr const char* kMpoFormat = "mpo-json/1";

// Writes a tensor as nested arrays, last index innermost, entries as [re, im].
void write_nested(std::ostringstream& os, const Tensor& t, std::size_t axis, std::size_t& flat) {
  os << '[';
  const std::size_t n = t.shape()[axis];
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ',';
    if (axis + 1 == t.rank()) {
      const cplx z = t[flat++];
      os << '[' << format_double(z.real()) << ',' << format_double(z.imag()) << ']';
    } else {
      write_nested(os, t, axis + 1, flat);
    }
  }
  os << ']';
}

void write_list(std::ostringstream& os, std::span<const Tensor> ts) {
  os << '[';
  for (std::size_t n = 0; n < ts.size(); ++n) {
    if (n) os << ",\n    ";
    std::size_t flat = 0;
    write_nested(os, ts[n], 0, flat);
  }
  os << ']';
}

template <typename T>
void write_ints(std::ostringstream& os, const std::vector<T>& v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

std::size_t positive_int(const json& v, const std::string& where) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) throw SchemaError(where, "expected an integer");
  const auto x = v.get<long long>();
  if (x <= 0) throw SchemaError(where, "expected a positive integer");
  return static_cast<std::size_t>(x);
}

std::vector<std::size_t> int_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(positive_int(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

void read_nested(const json& v, const Shape& shape, std::size_t axis, std::vector<cplx>& out, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where, "expected an array");
  if (v.size() != shape[axis])
    throw SchemaError(where, "expected " + std::to_string(shape[axis]) + " entries, found " + std::to_string(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string here = where + "[" + std::to_string(i) + "]";
    if (axis + 1 == shape.size()) {
      const json& z = v[i];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw SchemaError(here, "expected a [re, im] pair");
      const double re = z[0].get<double>(), im = z[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) throw SchemaError(here, "non-finite entry");
      out.emplace_back(re, im);
    } else {
      read_nested(v[i], shape, axis + 1, out, here);
    }
  }
}

Tensor read_tensor(const json& v, const Shape& shape, const std::string& where) {
  std::vector<cplx> data;
  data.reserve(num_elements(shape));
  read_nested(v, shape, 0, data, where);
  return Tensor(shape, std::move(data));
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("byte " + std::to_string(e.byte), std::string("invalid JSON: ") + e.what());
  }
}

void check_format(const json& doc, const char* expected) {
  const json& f = field(doc, "format", "");
  if (!f.is_string() || f.get<std::string>() != expected)
    throw SchemaError("format", std::string("expected \"") + expected + "\"");
}

std::vector<std::size_t> read_bonds(const json& doc, std::size_t L) {
  auto bonds = int_list(field(doc, "bond_dims", ""), "bond_dims");
  if (bonds.size() != L + 1)
    throw SchemaError("bond_dims", "expected " + std::to_string(L + 1) + " entries (cyclic), found " +
                                       std::to_string(bonds.size()));
  if (bonds[L] != bonds[0]) throw SchemaError("bond_dims[" + std::to_string(L) + "]", "cyclic bond dims differ");
  return bonds;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path.string());
  out << text;
  if (!out) throw IOError("write failed for " + path.string());
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) return "0";  // the parser reads -0 as integer zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_json(const UniformMPS& state) {
  const std::size_t L = state.length();
  std::vector<std::size_t> bonds = state.bond_dims();
  bonds.push_back(bonds[0]);
  std::ostringstream os;
  os << "{\n  \"format\": \"" << kStateFormat << "\",\n  \"unit_cell\": " << L << ",\n  \"physical_dims\": ";
  write_ints(os, state.phys_dims());
  os << ",\n  \"bond_dims\": ";
  write_ints(os, bonds);
  os << ",\n  \"tensors\": {\n    \"AL\": ";
  write_list(os, state.al());
  os << ",\n    \"AR\": ";
  write_list(os, state.ar());
  os << ",\n    \"C\": ";
  write_list(os, state.c());
  os << "\n  }\n}\n";
  return os.str();
}

UniformMPS state_from_json(const std::string& text) {
  const json doc = parse(text);
  check_format(doc, kStateFormat);
  const std::size_t L = positive_int(field(doc, "unit_cell", ""), "unit_cell");
  const auto phys = int_list(field(doc, "physical_dims", ""), "physical_dims");
  if (phys.size() != L) throw SchemaError("physical_dims", "expected one entry per site");
  const auto bonds = read_bonds(doc, L);
  const json& tensors = field(doc, "tensors", "");
  std::vector<Tensor> al, ar, c;
  for (const char* key : {"AL", "AR", "C"}) {
    const std::string where = std::string("tensors.") + key;
    const json& list = field(tensors, key, "tensors");
    if (!list.is_array() || list.size() != L) throw SchemaError(where, "expected one tensor per site");
    for (std::size_t n = 0; n < L; ++n) {
      const std::string here = where + "[" + std::to_string(n) + "]";
      if (std::string(key) == "C") {
        c.push_back(read_tensor(list[n], {bonds[n + 1], bonds[n + 1]}, here));
      } else {
        Tensor t = read_tensor(list[n], {bonds[n], phys[n], bonds[n + 1]}, here);
        (std::string(key) == "AL" ? al : ar).push_back(std::move(t));
      }
    }
  }
  try {
    return UniformMPS(std::move(al), std::move(ar), std::move(c));
  } catch (const ShapeError& e) {
    throw SchemaError("tensors", e.what());
  }
}

void save_state(const UniformMPS& state, const std::filesystem::path& path) { write_file(path, to_json(state)); }

UniformMPS load_state(const std::filesystem::path& path) { return state_from_json(read_file(path)); }

std::string to_json(const MPO& mpo) {
  const std::size_t L = mpo.length();
  std::vector<std::size_t> bonds = mpo.bond_dims();
  bonds.push_back(bonds[0]);
  std::ostringstream os;
  os << "{\n  \"format\": \"" << kMpoFormat << "\",\n  \"unit_cell\": " << L << ",\n  \"physical_dims\": [";
  for (std::size_t n = 0; n < L; ++n) os << (n ? "," : "") << '[' << mpo.phys_out(n) << ',' << mpo.phys_in(n) << ']';
  os << "],\n  \"bond_dims\": ";
  write_ints(os, bonds);
  os << ",\n  \"tensors\": {\n    \"O\": ";
  write_list(os, mpo.sites());
  os << "\n  }\n}\n";
  return os.str();
}

MPO mpo_from_json(const std::string& text) {
  const json doc = parse(text);
  check_format(doc, kMpoFormat);
  const std::size_t L = positive_int(field(doc, "unit_cell", ""), "unit_cell");
  const json& phys = field(doc, "physical_dims", "");
  if (!phys.is_array() || phys.size() != L) throw SchemaError("physical_dims", "expected one [out, in] pair per site");
  const auto bonds = read_bonds(doc, L);
  const json& list = field(field(doc, "tensors", ""), "O", "tensors");
  if (!list.is_array() || list.size() != L) throw SchemaError("tensors.O", "expected one tensor per site");
  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < L; ++n) {
    const auto d = int_list(phys[n], "physical_dims[" + std::to_string(n) + "]");
    if (d.size() != 2) throw SchemaError("physical_dims[" + std::to_string(n) + "]", "expected [out, in]");
    sites.push_back(read_tensor(list[n], {bonds[n], d[0], d[1], bonds[n + 1]}, "tensors.O[" + std::to_string(n) + "]"));
  }
  try {
    return MPO(std::move(sites));
  } catch (const ShapeError& e) {
    throw SchemaError("tensors.O", e.what());
  }
}

void save_mpo(const MPO& mpo, const std::filesystem::path& path) { write_file(path, to_json(mpo)); }

MPO load_mpo(const std::filesystem::path& path) { return mpo_from_json(read_file(path)); }

}  // namespace umps
