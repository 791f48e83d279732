#include "fragwave/spec_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

namespace fragwave {

namespace {

using nlohmann::json;

double number_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key))
    throw SpecError("missing field " + where + "." + key);
  const json& v = obj.at(key);
  if (!v.is_number())
    throw SpecError("field " + where + "." + key + " must be a number");
  return v.get<double>();
}

std::uint64_t unsigned_field(const json& v, const std::string& where) {
  if (!v.is_number_unsigned())
    throw SpecError("field " + where + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

}  // namespace

SpecFile parse_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("measure file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("measure file must be a JSON object");

  std::string name;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw SpecError("field name must be a string");
    name = doc.at("name").get<std::string>();
  }

  if (!doc.contains("atoms")) throw SpecError("missing field atoms");
  const json& atoms_json = doc.at("atoms");
  if (!atoms_json.is_array() || atoms_json.empty())
    throw SpecError("field atoms must be a non-empty array");

  std::vector<DislocationAtom> atoms;
  atoms.reserve(atoms_json.size());
  for (std::size_t i = 0; i < atoms_json.size(); ++i) {
    const std::string where = "atoms[" + std::to_string(i) + "]";
    const json& a = atoms_json.at(i);
    if (!a.is_object()) throw SpecError(where + " must be an object");
    double weight = number_field(a, "weight", where);
    if (!a.contains("fragments"))
      throw SpecError("missing field " + where + ".fragments");
    const json& frag = a.at("fragments");
    if (!frag.is_array())
      throw SpecError("field " + where + ".fragments must be an array");
    std::vector<double> sizes;
    sizes.reserve(frag.size());
    for (const json& s : frag) {
      if (!s.is_number())
        throw SpecError("field " + where + ".fragments must contain numbers");
      sizes.push_back(s.get<double>());
    }
    try {
      atoms.push_back({weight, FragmentVector(std::move(sizes))});
    } catch (const std::invalid_argument& e) {
      throw SpecError(where + ": " + e.what());
    }
  }

  SpecDefaults defaults;
  if (doc.contains("defaults")) {
    const json& d = doc.at("defaults");
    if (!d.is_object()) throw SpecError("field defaults must be an object");
    for (const auto& [key, value] : d.items()) {
      if (key == "dx")
        defaults.dx = value.is_number() ? value.get<double>()
                                        : throw SpecError("field defaults.dx must be a number");
      else if (key == "x_max")
        defaults.x_max = value.is_number()
                             ? value.get<double>()
                             : throw SpecError("field defaults.x_max must be a number");
      else if (key == "horizon")
        defaults.horizon = value.is_number()
                               ? value.get<double>()
                               : throw SpecError("field defaults.horizon must be a number");
      else if (key == "block_cap")
        defaults.block_cap = unsigned_field(value, "defaults.block_cap");
      else if (key == "trials")
        defaults.trials = unsigned_field(value, "defaults.trials");
      else
        throw SpecError("unknown field defaults." + key);
    }
  }

  try {
    return SpecFile{DislocationMeasure(std::move(atoms), std::move(name)),
                    defaults};
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
}

SpecFile load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open measure file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

}  // namespace fragwave
