#include "bmtrunc/model_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

namespace bmtrunc {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) { throw ParseError(line_of(n), what); }

const YAML::Node require(const YAML::Node& parent, const std::string& key) {
  const YAML::Node n = parent[key];
  if (!n) fail(parent, "missing key '" + key + "'");
  return n;
}

double as_double(const YAML::Node& n) {
  if (!n.IsScalar()) fail(n, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(n, "cannot read '" + n.Scalar() + "' as a number");
  }
}

Index as_index(const YAML::Node& n) {
  if (!n.IsScalar()) fail(n, "expected an integer");
  try {
    return static_cast<Index>(n.as<long long>());
  } catch (const YAML::Exception&) {
    fail(n, "cannot read '" + n.Scalar() + "' as an integer");
  }
}

Matrix as_matrix(const YAML::Node& n, Index d) {
  if (!n.IsSequence()) fail(n, "expected a matrix as a list of rows");
  if (static_cast<Index>(n.size()) != d)
    fail(n, "matrix has " + std::to_string(n.size()) + " rows, expected " + std::to_string(d));
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i) {
    const YAML::Node row = n[i];
    if (!row.IsSequence()) fail(row, "matrix row must be a list");
    if (static_cast<Index>(row.size()) != d)
      fail(row, "matrix row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(d));
    for (Index j = 0; j < d; ++j) m(i, j) = as_double(row[j]);
  }
  return m;
}

std::vector<Matrix> as_matrix_list(const YAML::Node& n, Index d) {
  if (!n.IsSequence()) fail(n, "expected a list of matrices");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < n.size(); ++k) out.push_back(as_matrix(n[k], d));
  return out;
}

ExplicitBandedModel::OffsetBlocks as_offset_blocks(const YAML::Node& n, Index d) {
  if (!n.IsMap()) fail(n, "expected a map from level offset to matrix");
  ExplicitBandedModel::OffsetBlocks out;
  for (const auto& kv : n) {
    const Index s = as_index(kv.first);
    if (out.count(s)) fail(kv.first, "duplicate offset " + std::to_string(s));
    out[s] = as_matrix(kv.second, d);
  }
  return out;
}

MuRule as_mu(const YAML::Node& n) {
  if (n.IsScalar()) return MuRule::constant(as_double(n));
  if (!n.IsMap()) fail(n, "mu must be a number or a map with table/rule");
  MuRule r;
  if (const YAML::Node t = n["table"]) {
    if (!t.IsSequence()) fail(t, "mu table must be a list of rates for levels 1, 2, ...");
    for (std::size_t k = 0; k < t.size(); ++k) r.table.push_back(as_double(t[k]));
  }
  if (const YAML::Node rule = n["rule"]) {
    if (rule.IsScalar()) {
      r.base = as_double(rule);
    } else {
      r.base = as_double(require(rule, "base"));
      if (rule["slope"]) r.slope = as_double(rule["slope"]);
    }
  } else if (!r.table.empty()) {
    r.base = r.table.back();
  } else {
    fail(n, "mu needs a table or a rule");
  }
  return r;
}

LoadedModel build(const YAML::Node& root) {
  if (!root.IsMap()) fail(root, "model file must be a map");
  const YAML::Node p = root["parameters"] ? root["parameters"] : root;
  const std::string kind = require(root, "kind").as<std::string>();
  const Index d = as_index(require(root["d"] ? root : p, "d"));
  if (d < 1) fail(root, "d must be positive");
  LoadedModel out;
  out.kind = kind;
  try {
    if (kind == "banded") {
      const Index L = as_index(require(p, "L"));
      const Index U = as_index(require(p, "U"));
      const Index k_hom = as_index(require(p, "K_hom"));
      const YAML::Node levels = require(p, "levels");
      if (!levels.IsSequence()) fail(levels, "levels must list rows 0..K_hom");
      std::vector<ExplicitBandedModel::OffsetBlocks> rows;
      for (std::size_t k = 0; k < levels.size(); ++k) rows.push_back(as_offset_blocks(levels[k], d));
      if (static_cast<Index>(rows.size()) != k_hom + 1)
        fail(levels, "levels must list exactly K_hom + 1 rows");
      auto m = std::make_shared<ExplicitBandedModel>(d, L, U, k_hom, rows, as_offset_blocks(require(p, "homogeneous"), d));
      out.banded = m;
      out.model = m;
    } else if (kind == "mg1") {
      auto m = make_mg1_type(as_matrix_list(require(p, "B"), d), as_matrix(require(p, "A_down"), d),
                             as_matrix_list(require(p, "A"), d));
      out.banded = m;
      out.model = m;
    } else if (kind == "bmap") {
      BmapModel b;
      b.d = d;
      const YAML::Node dn = require(p, "D");
      b.D = as_matrix_list(dn, d);
      if (const YAML::Node km = p["k_max"]; km && as_index(km) != b.k_max())
        fail(km, "k_max " + std::to_string(as_index(km)) + " disagrees with " + std::to_string(b.D.size()) +
                     " listed D matrices");
      b.mu = as_mu(require(p, "mu"));
      if (p["psi"]) b.psi = as_double(p["psi"]);
      out.bmap = b;
      out.model = build_generator(b);
    } else {
      fail(root["kind"], "unknown model kind '" + kind + "'");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(line_of(root["kind"]), e.what());
  }
  return out;
}

}  // namespace

LoadedModel parse_model(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
  try {
    return build(root);
  } catch (const YAML::Exception& e) {
    throw ParseError(e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace bmtrunc
