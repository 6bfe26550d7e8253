#include "latcover/lattice_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "latcover/error.hpp"

namespace latcover {

namespace {

using nlohmann::json;

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedInput, std::string("invalid JSON: ") + e.what());
  }
}

template <class T>
T field(const json& doc, const char* key) {
  require(doc.is_object() && doc.contains(key), ErrorCode::MalformedInput,
          std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedInput, std::string("bad field '") + key + "': " + e.what());
  }
}

std::vector<double> numbers(const json& j, const char* what) {
  require(j.is_array(), ErrorCode::MalformedInput, std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    require(v.is_number(), ErrorCode::MalformedInput, std::string(what) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

LatticeDocument parse_lattice(const std::string& text) {
  const json doc = parse_document(text);
  const int dim = field<int>(doc, "dim");
  require(dim >= 1, ErrorCode::MalformedInput, "dim must be >= 1");
  require(doc.contains("basis"), ErrorCode::MalformedInput, "missing field 'basis'");
  const auto entries = numbers(doc["basis"], "basis");
  require(entries.size() == static_cast<std::size_t>(dim) * dim, ErrorCode::MalformedInput,
          "basis must have dim*dim entries");
  Matrix b(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) b(i, j) = entries[static_cast<std::size_t>(i) * dim + j];
  }
  std::optional<double> radius;
  if (doc.contains("radius")) radius = field<double>(doc, "radius");
  return {Lattice::from_basis(b), radius};
}

std::string format_lattice(const Lattice& lat, std::optional<double> radius) {
  nlohmann::ordered_json doc;
  doc["dim"] = lat.dim();
  auto basis = nlohmann::ordered_json::array();
  for (int i = 0; i < lat.dim(); ++i) {
    for (int j = 0; j < lat.dim(); ++j) basis.push_back(lat.basis()(i, j));
  }
  doc["basis"] = basis;
  if (radius) doc["radius"] = *radius;
  return doc.dump(2) + "\n";
}

ProductBody parse_body(const std::string& text) {
  const json doc = parse_document(text);
  require(doc.is_object() && doc.contains("blocks"), ErrorCode::MalformedInput,
          "missing field 'blocks'");
  ProductBody body;
  for (const auto& blk : doc["blocks"]) {
    const auto v = numbers(blk, "block");
    require(v.size() == 2, ErrorCode::MalformedInput, "block must be [dim, radius]");
    require(v[0] >= 1 && v[0] == static_cast<int>(v[0]), ErrorCode::MalformedInput,
            "block dim must be a positive integer");
    body.blocks.push_back({static_cast<int>(v[0]), v[1]});
  }
  if (doc.contains("scale")) body.scale = field<double>(doc, "scale");
  if (doc.contains("translates")) {
    for (const auto& t : doc["translates"]) {
      const auto v = numbers(t, "translate");
      body.translates.push_back(Eigen::Map<const Vector>(v.data(), v.size()));
    }
  }
  try {
    body.validate();
  } catch (const Error& e) {
    fail(ErrorCode::MalformedInput, e.what());
  }
  return body;
}

std::string format_body(const ProductBody& body) {
  nlohmann::ordered_json doc;
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& b : body.blocks) blocks.push_back({b.dim, b.radius});
  doc["blocks"] = blocks;
  doc["scale"] = body.scale;
  auto translates = nlohmann::ordered_json::array();
  for (const auto& t : body.translates) {
    translates.push_back(std::vector<double>(t.data(), t.data() + t.size()));
  }
  doc["translates"] = translates;
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::MalformedInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LatticeDocument load_lattice(const std::string& path) { return parse_lattice(read_text_file(path)); }

ProductBody load_body(const std::string& path) { return parse_body(read_text_file(path)); }

}  // namespace latcover
