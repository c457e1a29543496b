#include "matchkit/cart_params.hpp"

#include <fstream>
#include <set>

#include "matchkit/errors.hpp"

namespace matchkit {
namespace {

double number(const nlohmann::json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw InvalidParameters(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown(const nlohmann::json& doc, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : doc.items())
    if (!allowed.contains(key))
      throw InvalidParameters("unknown key '" + key + "' in " + where);
}

}  // namespace

CartpoleController controller_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidParameters("controller parameters must be a JSON object");
  reject_unknown(doc, {"b", "physical", "sigma0", "mu0", "r", "w1", "phi"}, "controller");

  CartpoleController c = CartpoleController::paper_defaults();
  if (doc.contains("b") && doc.contains("physical"))
    throw InvalidParameters("give either 'b' or 'physical', not both");
  if (doc.contains("b")) c.b = number(doc, "b");
  if (doc.contains("physical")) {
    const auto& p = doc.at("physical");
    if (!p.is_object()) throw InvalidParameters("'physical' must be an object");
    reject_unknown(p, {"M", "m", "l", "I", "g"}, "physical");
    for (const char* key : {"M", "m", "l", "I", "g"})
      if (!p.contains(key))
        throw InvalidParameters(std::string("'physical' is missing '") + key + "'");
    c.b = nondimensionalize(PhysicalCart{number(p, "M"), number(p, "m"), number(p, "l"),
                                         number(p, "I"), number(p, "g")});
  }
  if (doc.contains("sigma0")) c.sigma0 = number(doc, "sigma0");
  if (doc.contains("mu0")) c.mu0 = number(doc, "mu0");
  if (doc.contains("r")) c.r = number(doc, "r");
  if (doc.contains("w1")) c.w1 = number(doc, "w1");
  if (doc.contains("phi")) {
    if (!doc.at("phi").is_string()) throw InvalidParameters("'phi' must be a string");
    c.phi = PhiFunction::parse(doc.at("phi").get<std::string>());
  }
  c.validate();
  return c;
}

CartpoleController load_controller(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameters("cannot open parameter file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParameters("malformed JSON in " + path.string() + ": " + e.what());
  }
  return controller_from_json(doc);
}

nlohmann::json controller_to_json(const CartpoleController& c) {
  return {{"b", c.b},   {"sigma0", c.sigma0}, {"mu0", c.mu0},
          {"r", c.r},   {"w1", c.w1},         {"phi", c.phi.name()}};
}

}  // namespace matchkit
