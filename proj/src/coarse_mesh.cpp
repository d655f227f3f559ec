#include "hiermix/coarse_mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace hiermix {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

// Strips comments, returns the next non-empty line split into tokens.
bool next_tokens(std::istream& in, std::vector<std::string>& tokens) {
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    tokens.clear();
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (!tokens.empty()) return true;
  }
  return false;
}

double parse_double(const std::string& s) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw ParseError("trailing characters in number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  size_t pos = 0;
  int v;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) throw ParseError("trailing characters in integer '" + s + "'");
  return v;
}

}  // namespace

CoarseMesh CoarseMesh::build(std::vector<Vec2> vertices,
                             std::vector<std::array<int, 3>> triangles,
                             const std::vector<std::tuple<int, int, BoundaryKind>>& markers) {
  CoarseMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(triangles);
  mesh.validate_and_index(markers);
  return mesh;
}

CoarseMesh CoarseMesh::load(std::istream& in) {
  std::vector<std::string> tok;
  auto expect_section = [&](const char* name, const char* got) {
    throw ParseError(std::string("expected '") + name + " <count>' section, got '" + got + "'");
  };

  if (!next_tokens(in, tok) || tok.size() != 2 || tok[0] != "vertices")
    expect_section("vertices", tok.empty() ? "<eof>" : tok[0].c_str());
  int nv = parse_int(tok[1]);
  if (nv < 3) throw ParseError("mesh needs at least 3 vertices");
  std::vector<Vec2> verts(nv);
  for (int i = 0; i < nv; ++i) {
    if (!next_tokens(in, tok) || tok.size() != 2)
      throw ParseError("vertex line must be 'x y'");
    verts[i] = Vec2(parse_double(tok[0]), parse_double(tok[1]));
  }

  if (!next_tokens(in, tok) || tok.size() != 2 || tok[0] != "triangles")
    expect_section("triangles", tok.empty() ? "<eof>" : tok[0].c_str());
  int nt = parse_int(tok[1]);
  if (nt < 1) throw ParseError("mesh needs at least 1 triangle");
  std::vector<std::array<int, 3>> tris(nt);
  for (int t = 0; t < nt; ++t) {
    if (!next_tokens(in, tok) || tok.size() != 3)
      throw ParseError("triangle line must be 'v1 v2 v3'");
    for (int k = 0; k < 3; ++k) {
      int v = parse_int(tok[k]);
      if (v < 0 || v >= nv) throw ParseError("triangle vertex index out of range");
      tris[t][k] = v;
    }
  }

  if (!next_tokens(in, tok) || tok.size() != 2 || tok[0] != "boundary")
    expect_section("boundary", tok.empty() ? "<eof>" : tok[0].c_str());
  int nb = parse_int(tok[1]);
  std::vector<std::tuple<int, int, BoundaryKind>> markers;
  markers.reserve(nb);
  for (int e = 0; e < nb; ++e) {
    if (!next_tokens(in, tok) || tok.size() != 3)
      throw ParseError("boundary line must be 'v1 v2 D|N'");
    int a = parse_int(tok[0]), b = parse_int(tok[1]);
    if (a < 0 || a >= nv || b < 0 || b >= nv)
      throw ParseError("boundary vertex index out of range");
    BoundaryKind kind;
    if (tok[2] == "D")
      kind = BoundaryKind::Dirichlet;
    else if (tok[2] == "N")
      kind = BoundaryKind::Neumann;
    else
      throw ParseError("boundary marker must be D or N, got '" + tok[2] + "'");
    markers.emplace_back(a, b, kind);
  }
  if (next_tokens(in, tok))
    throw ParseError("unexpected trailing content '" + tok[0] + "'");

  return build(std::move(verts), std::move(tris), markers);
}

CoarseMesh CoarseMesh::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  return load(in);
}

void CoarseMesh::validate_and_index(
    const std::vector<std::tuple<int, int, BoundaryKind>>& markers) {
  const double scale = diameter();
  // Orientation normalization: store every triangle counter-clockwise.
  for (auto& t : triangles_) {
    double a = signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    if (std::abs(a) < 1e-14 * scale * scale)
      throw ValidationError("degenerate coarse triangle");
    if (a < 0.0) std::swap(t[1], t[2]);
  }

  // Edge table; side m of a triangle is opposite its local vertex m.
  std::map<std::pair<int, int>, int> index;
  edges_.clear();
  side_edge_.assign(triangles_.size(), {-1, -1, -1});
  for (int t = 0; t < num_subdomains(); ++t) {
    for (int m = 0; m < 3; ++m) {
      int a = triangles_[t][(m + 1) % 3];
      int b = triangles_[t][(m + 2) % 3];
      auto key = std::minmax(a, b);
      auto [it, fresh] = index.try_emplace(key, static_cast<int>(edges_.size()));
      if (fresh) {
        CoarseEdge e;
        e.v0 = key.first;
        e.v1 = key.second;
        e.tri[0] = t;
        edges_.push_back(e);
      } else {
        CoarseEdge& e = edges_[it->second];
        if (e.tri[1] >= 0)
          throw ValidationError("edge shared by more than two coarse triangles");
        e.tri[1] = t;
      }
      side_edge_[t][m] = it->second;
    }
  }

  for (const auto& [a, b, kind] : markers) {
    auto key = std::minmax(a, b);
    auto it = index.find(key);
    if (it == index.end())
      throw ValidationError("boundary marker on a non-existent edge (" +
                            std::to_string(a) + "," + std::to_string(b) + ")");
    CoarseEdge& e = edges_[it->second];
    if (e.tri[1] >= 0)
      throw ValidationError("boundary marker on an interior edge (" +
                            std::to_string(a) + "," + std::to_string(b) + ")");
    if (e.marker)
      throw ValidationError("duplicate boundary marker on edge (" +
                            std::to_string(a) + "," + std::to_string(b) + ")");
    e.marker = kind;
  }
  for (const CoarseEdge& e : edges_) {
    if (e.tri[1] < 0 && !e.marker)
      throw ValidationError("boundary edge (" + std::to_string(e.v0) + "," +
                            std::to_string(e.v1) + ") lacks a D/N marker");
  }
}

double CoarseMesh::triangle_area(int t) const {
  const auto& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double CoarseMesh::diameter() const {
  double d = 0.0;
  for (size_t i = 0; i < vertices_.size(); ++i)
    for (size_t j = i + 1; j < vertices_.size(); ++j)
      d = std::max(d, (vertices_[i] - vertices_[j]).norm());
  return d;
}

}  // namespace hiermix
