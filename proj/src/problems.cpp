#include "hiermix/problems.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace hiermix {

namespace {

const char* kSmoothMesh = R"(# convex 7-gon split into 9 subdomains
vertices 9
0.0  0.0
1.0  1.0
2.4  0.9
3.2  0.0
2.8 -0.8
1.9 -1.2
0.7 -0.9
1.25 -0.05
2.2  -0.2
triangles 9
0 1 7
1 8 7
1 2 8
2 3 8
3 4 8
4 5 8
5 7 8
5 6 7
6 0 7
boundary 7
0 1 D
1 2 D
2 3 D
3 4 D
4 5 D
5 6 D
6 0 D
)";

const char* kMackinnonCareyMesh = R"(# unit square, four subdomains aligned with x = 1/2
vertices 6
0.0 0.0
0.5 0.0
1.0 0.0
1.0 1.0
0.5 1.0
0.0 1.0
triangles 4
0 1 4
0 4 5
1 2 3
1 3 4
boundary 6
0 1 D
1 2 D
2 3 D
3 4 D
4 5 D
5 0 D
)";

const char* kLowPermMesh = R"(# unit square; subdomains 0-1 cover (0.2,0.3)x(0,0.8), 2-3 cover (0.6,0.7)x(0.3,1)
vertices 14
0.0 0.0
0.2 0.0
0.2 0.8
0.3 0.8
0.3 0.0
0.6 0.0
0.7 0.0
1.0 0.0
1.0 1.0
0.7 1.0
0.7 0.3
0.6 0.3
0.6 1.0
0.0 1.0
triangles 16
1 4 3
1 3 2
11 10 9
11 9 12
0 1 2
0 2 13
13 2 12
2 3 12
3 11 12
3 4 11
4 5 11
5 6 10
5 10 11
6 7 10
7 8 10
10 8 9
boundary 10
0 13 D
7 8 D
0 1 N
1 4 N
4 5 N
5 6 N
6 7 N
8 9 N
9 12 N
12 13 N
)";

const char* kHolesMesh = R"(# unit square minus [0.2,0.6]x[0.6,0.8] and [0.4,0.8]x[0.2,0.4]
vertices 18
0.0 0.0
0.4 0.0
0.8 0.0
1.0 0.0
1.0 0.4
1.0 1.0
0.6 1.0
0.2 1.0
0.0 1.0
0.0 0.6
0.2 0.6
0.6 0.6
0.6 0.8
0.2 0.8
0.4 0.2
0.8 0.2
0.8 0.4
0.4 0.4
triangles 20
0 1 14
1 2 14
2 15 14
2 3 15
3 4 15
4 16 15
0 14 17
0 17 10
0 10 9
9 10 13
9 13 8
8 13 7
7 13 12
7 12 6
10 17 11
17 16 11
11 16 4
11 4 5
11 5 12
12 5 6
boundary 18
9 0 D
8 9 D
3 4 D
4 5 D
0 1 N
1 2 N
2 3 N
5 6 N
6 7 N
7 8 N
10 11 N
11 12 N
12 13 N
13 10 N
14 15 N
15 16 N
16 17 N
17 14 N
)";

constexpr double kPi = 3.14159265358979323846;

ProblemSpec smooth_polygon_problem() {
  ProblemSpec ps;
  ps.name = "smooth7gon";
  std::istringstream in(kSmoothMesh);
  ps.coarse = CoarseMesh::load(in);
  Mat2 K;
  K << 2, 1, 1, 2;
  ps.K = PermeabilityField::uniform(K);

  auto p = [](double x, double y, double t) {
    return std::sin(kPi * t) * std::sin(kPi * x) * std::sin(kPi * y);
  };
  ps.source = [](double x, double y, double t) {
    const double sx = std::sin(kPi * x), sy = std::sin(kPi * y);
    const double cx = std::cos(kPi * x), cy = std::cos(kPi * y);
    return kPi * std::cos(kPi * t) * sx * sy +
           4.0 * kPi * kPi * std::sin(kPi * t) * sx * sy -
           2.0 * kPi * kPi * std::sin(kPi * t) * cx * cy;
  };
  ps.dirichlet = p;
  ps.p0 = [p](double x, double y) { return p(x, y, 0.0); };
  ps.t_final = 2.0;
  ps.default_tau = 2.5e-2;
  ps.exact = ExactSolution{
      p,
      [](double x, double y, double t) {
        const Vec2 grad(kPi * std::sin(kPi * t) * std::cos(kPi * x) * std::sin(kPi * y),
                        kPi * std::sin(kPi * t) * std::sin(kPi * x) * std::cos(kPi * y));
        Mat2 Kk;
        Kk << 2, 1, 1, 2;
        return Vec2(-(Kk * grad));
      }};
  return ps;
}

ProblemSpec mackinnon_carey_problem() {
  ProblemSpec ps;
  ps.name = "mackinnon-carey";
  std::istringstream in(kMackinnonCareyMesh);
  ps.coarse = CoarseMesh::load(in);

  const double k1 = 1.0, k2 = 2.0;
  ps.K = PermeabilityField::per_subdomain(
      {k1 * Mat2::Identity(), k1 * Mat2::Identity(), k2 * Mat2::Identity(),
       k2 * Mat2::Identity()});

  const double a1 = -1.0 / k1, a2 = -1.0 / k2;
  const double b1 = -((3.0 * a2 + a1) / 4.0) * k2 / (k1 + k2);
  const double b2 = (k1 / k2) * b1;
  const double c2 = -b2 - a2 / 2.0;
  // continuity of p at x = 1/2 fixes c1 (it comes out to 0 for k1=1, k2=2)
  const double c1 = 0.125 * a2 + 0.5 * b2 + c2 - 0.125 * a1 - 0.5 * b1;

  auto poly = [=](double x) {
    return x <= 0.5 ? 0.5 * a1 * x * x + b1 * x + c1 : 0.5 * a2 * x * x + b2 * x + c2;
  };
  auto p = [=](double x, double, double t) { return t * t * poly(x); };
  ps.source = [=](double x, double, double t) {
    // f = p_t - div(k grad p); k * a is -1 on both sides
    return 2.0 * t * poly(x) + t * t;
  };
  ps.dirichlet = p;
  ps.p0 = [](double, double) { return 0.0; };
  ps.t_final = 3.0;
  ps.default_tau = 0.1;
  ps.exact = ExactSolution{p, [=](double x, double, double t) {
                             const double dpdx = x <= 0.5 ? a1 * x + b1 : a2 * x + b2;
                             const double k = x <= 0.5 ? k1 : k2;
                             return Vec2(-k * t * t * dpdx, 0.0);
                           }};
  return ps;
}

ProblemSpec low_perm_regions_problem() {
  ProblemSpec ps;
  ps.name = "lowperm";
  std::istringstream in(kLowPermMesh);
  ps.coarse = CoarseMesh::load(in);

  std::vector<Mat2> ks(16, Mat2::Identity());
  for (int k = 0; k < 4; ++k) ks[k] = 1e-6 * Mat2::Identity();
  ps.K = PermeabilityField::per_subdomain(ks);

  ps.source = [](double, double, double) { return 0.0; };
  ps.dirichlet = [](double x, double, double) { return 1.0 - x; };
  ps.neumann = [](double, double, double) { return 0.0; };
  ps.p0 = [](double x, double) { return 1.0 - x; };
  ps.t_final = 5.0;
  ps.default_tau = 5e-2;
  return ps;
}

ProblemSpec holes_domain_problem() {
  ProblemSpec ps;
  ps.name = "holes";
  std::istringstream in(kHolesMesh);
  ps.coarse = CoarseMesh::load(in);
  ps.K = PermeabilityField::uniform(Mat2::Identity());

  ps.source = [](double, double, double) { return 0.0; };
  ps.dirichlet = [](double x, double, double) { return 1.0 - x; };
  ps.neumann = [](double, double, double) { return 0.0; };
  ps.p0 = [](double x, double) { return 1.0 - x; };
  ps.t_final = 5.0;
  ps.default_tau = 5e-2;
  return ps;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text,
                                  size_t min_n, size_t max_n) {
  std::istringstream in(text);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  std::string rest;
  if (in.clear(), in >> rest)
    throw ParseError("bad number in value of '" + key + "'");
  if (out.size() < min_n || out.size() > max_n)
    throw ParseError("key '" + key + "' expects between " + std::to_string(min_n) +
                     " and " + std::to_string(max_n) + " numbers");
  return out;
}

ScalarFn affine_fn(const std::string& key, const std::vector<double>& c) {
  if (c.size() == 1)
    return [v = c[0]](double, double, double) { return v; };
  if (c.size() != 3)
    throw ParseError("key '" + key + "' expects one number (constant) or three "
                     "(a0 + ax*x + ay*y)");
  return [a0 = c[0], ax = c[1], ay = c[2]](double x, double y, double) {
    return a0 + ax * x + ay * y;
  };
}

}  // namespace

std::vector<std::string> builtin_problem_names() {
  return {"smooth7gon", "mackinnon-carey", "lowperm", "holes"};
}

ProblemSpec builtin_problem(const std::string& name) {
  if (name == "smooth7gon") return smooth_polygon_problem();
  if (name == "mackinnon-carey") return mackinnon_carey_problem();
  if (name == "lowperm") return low_perm_regions_problem();
  if (name == "holes") return holes_domain_problem();
  throw ValidationError("unknown problem '" + name +
                        "' (try smooth7gon, mackinnon-carey, lowperm, holes)");
}

ProblemSpec load_problem(const std::string& mesh_path, const std::string& data_path) {
  ProblemSpec ps;
  ps.name = std::filesystem::path(mesh_path).stem().string();
  ps.coarse = CoarseMesh::load_file(mesh_path);
  const int ns = ps.coarse.num_subdomains();

  std::ifstream in(data_path);
  if (!in) throw ParseError("cannot open data file '" + data_path + "'");

  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ParseError(data_path + ":" + std::to_string(lineno) +
                         ": expected 'key = value'");
      continue;
    }
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const size_t e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(data_path + ": empty key");
    if (!kv.emplace(key, val).second)
      throw ParseError(data_path + ": duplicate key '" + key + "'");
  }

  std::vector<Mat2> ks(ns, Mat2::Identity());
  // 'tensor' fixes one anisotropic tensor everywhere and cannot be combined
  // with the scalar forms; 'k' sets a default that 'k.<i>' overrides per
  // subdomain (the map is sorted, so 'k' is always applied first)
  bool scalar_k = kv.count("k") > 0;
  for (const auto& item : kv)
    if (item.first.rfind("k.", 0) == 0) scalar_k = true;
  if (kv.count("tensor") && scalar_k)
    throw ParseError(data_path + ": 'tensor' cannot be combined with 'k'/'k.<i>'");
  ps.source = [](double, double, double) { return 0.0; };
  ps.dirichlet = [](double, double, double) { return 0.0; };
  ps.neumann = [](double, double, double) { return 0.0; };
  ps.p0 = [](double, double) { return 0.0; };

  for (const auto& [key, val] : kv) {
    if (key == "k") {
      const auto c = parse_numbers(key, val, 1, 1);
      for (auto& m : ks) m = c[0] * Mat2::Identity();
    } else if (key == "tensor") {
      const auto c = parse_numbers(key, val, 3, 3);
      Mat2 K;
      K << c[0], c[1], c[1], c[2];
      for (auto& m : ks) m = K;
    } else if (key.rfind("k.", 0) == 0) {
      int idx = -1;
      try {
        idx = std::stoi(key.substr(2));
      } catch (const std::exception&) {
      }
      if (idx < 0 || idx >= ns)
        throw ParseError("key '" + key + "': subdomain index out of range");
      ks[idx] = parse_numbers(key, val, 1, 1)[0] * Mat2::Identity();
    } else if (key == "p0") {
      const ScalarFn f = affine_fn(key, parse_numbers(key, val, 1, 3));
      ps.p0 = [f](double x, double y) { return f(x, y, 0.0); };
    } else if (key == "f") {
      ps.source = affine_fn(key, parse_numbers(key, val, 1, 3));
    } else if (key == "gd") {
      ps.dirichlet = affine_fn(key, parse_numbers(key, val, 1, 3));
    } else if (key == "gn") {
      ps.neumann = affine_fn(key, parse_numbers(key, val, 1, 3));
    } else if (key == "tf") {
      ps.t_final = parse_numbers(key, val, 1, 1)[0];
      if (!(ps.t_final > 0)) throw ValidationError("tf must be positive");
    } else if (key == "tau") {
      ps.default_tau = parse_numbers(key, val, 1, 1)[0];
      if (!(ps.default_tau > 0)) throw ValidationError("tau must be positive");
    } else {
      throw ParseError(data_path + ": unknown key '" + key + "'");
    }
  }
  for (const Mat2& m : ks) PermeabilityField::check_spd(m);
  ps.K = PermeabilityField::per_subdomain(ks);
  return ps;
}

}  // namespace hiermix
