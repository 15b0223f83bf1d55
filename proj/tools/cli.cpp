#include "cli.hpp"

#include "hardcore/hardcore.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

namespace hardcore::cli {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Options

struct Options {
  std::string command;
  std::string config;
  std::string out;
  std::string report;
  std::string dot;
  std::string graph = "path:4";
  std::string graph_file;
  int vertex = 0;
  double lambda = 1.0;
  std::string lambda_grid;
  bool check = false;
  int jobs = 1;
  std::uint64_t seed = 0;
  // vssm / ssm
  int lmax = 6;
  bool all_vertices = false;
  int fit_from = 1;
  // anchor
  std::string lambdas;
  int n = 10;
  double lambda_max = 0.0;
  // dynamics
  int d = 2;
  // zeros
  std::string mode = "newton";
  std::string family;
  double start_re = 4.0;
  double start_im = 0.2;
  double tol = 1e-12;
  int max_iter = 100;
  int precision = 128;
  double lambda_star = 1.0;
  double delta = 0.1;
  std::string k_range = "4:9";
  std::string m_rule = "0";
  double angle = std::numbers::pi / 60.0;
  bool all_families = false;
  // spectral
  bool sweep = false;
};

void require_positive(double x, const std::string& name) {
  detail::require(std::isfinite(x) && x > 0.0, name + " must be positive and finite");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " from '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " from '" + s + "'");
  }
}

/// "a:b:step" (inclusive) or "x,y,z"; a single number is a one-point grid.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    detail::require(parts.size() == 3, "grid must be a:b:step");
    const double a = parse_double(parts[0], "grid start"), b = parse_double(parts[1], "grid end"),
                 step = parse_double(parts[2], "grid step");
    detail::require(step > 0.0 && b >= a, "grid needs step > 0 and end >= start");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    detail::require(count < 1'000'000, "grid has too many points");
    for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    for (const auto& p : split(spec, ',')) out.push_back(parse_double(p, "grid value"));
  }
  detail::require(!out.empty(), "empty grid");
  return out;
}

std::vector<double> lambda_values(const Options& o) {
  auto grid = o.lambda_grid.empty() ? std::vector<double>{o.lambda} : parse_grid(o.lambda_grid);
  for (double x : grid) require_positive(x, "lambda");
  return grid;
}

/// Named graphs: path:n cycle:n complete:n star:n random:n:p[:seed]
/// cayley:d:k:m ; --graph-file takes precedence.
Graph load_graph(const Options& o) {
  if (!o.graph_file.empty()) return load_graph_file(o.graph_file);
  const auto parts = split(o.graph, ':');
  detail::require(!parts.empty(), "empty graph spec");
  const auto& kind = parts[0];
  auto arg = [&](std::size_t i) { return parse_int(parts.at(i), "graph parameter"); };
  auto need = [&](std::size_t n) {
    detail::require(parts.size() == n, "graph spec '" + o.graph + "' has the wrong number of fields");
  };
  if (kind == "path" || kind == "cycle" || kind == "complete" || kind == "star") {
    need(2);
    const int n = arg(1);
    detail::require(n >= 0, "graph size must be non-negative");
    const NamedKind k = kind == "path" ? NamedKind::Path : kind == "cycle" ? NamedKind::Cycle
                        : kind == "complete" ? NamedKind::Complete : NamedKind::Star;
    return build_named({k, n});
  }
  if (kind == "random") {
    detail::require(parts.size() == 3 || parts.size() == 4, "random graph spec is random:n:p[:seed]");
    const double p = parse_double(parts[2], "edge probability");
    detail::require(p >= 0.0 && p <= 1.0, "edge probability must lie in [0, 1]");
    const std::uint64_t seed = parts.size() == 4 ? static_cast<std::uint64_t>(arg(3)) : o.seed;
    return build_named({NamedKind::Random, arg(1), p, seed});
  }
  if (kind == "cayley") {
    need(4);
    detail::require(arg(1) >= 1 && arg(2) >= 0 && arg(3) >= 0, "cayley spec needs d >= 1, k >= 0, m >= 0");
    return build_cayley_path_tree(arg(1), arg(2), arg(3)).to_graph();
  }
  throw ValidationError("unknown graph kind '" + kind + "'");
}

std::string graph_id(const Options& o) { return o.graph_file.empty() ? o.graph : o.graph_file; }

/// Results of f(0..n-1) computed on up to `jobs` threads; order is by index.
template <class R>
std::vector<R> parallel_map(std::size_t n, int jobs, const std::function<R(std::size_t)>& f) {
  std::vector<R> out(n);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w)
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
    }));
  for (auto& t : tasks) t.get();  // rethrows the first failure
  return out;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ValidationError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

json header(const std::string& command) { return {{"schema_version", kSchemaVersion}, {"command", command}}; }

void write_json(const std::string& path, std::ostream& fallback, const json& j) {
  Output o(path, fallback);
  *o << j.dump(2) << '\n';
}

// Verdict bookkeeping for --check.
class Checker {
 public:
  explicit Checker(std::ostream& err) : err_(err) {}
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      ++failures_;
      err_ << "FAIL " << what << '\n';
    }
    ++total_;
  }
  int finish(const std::string& command) {
    err_ << (failures_ == 0 ? "PASS " : "FAIL ") << command << " check: " << (total_ - failures_) << "/" << total_
         << " comparisons agree\n";
    return failures_ == 0 ? kOk : kValidation;
  }

 private:
  std::ostream& err_;
  int failures_ = 0;
  int total_ = 0;
};

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

json coefficients_json(const IndependencePolynomial& p) {
  json arr = json::array();
  for (const auto& c : p.coefficients) {
    if (c <= BigInt(std::numeric_limits<std::int64_t>::max()))
      arr.push_back(c.convert_to<std::int64_t>());
    else
      arr.push_back(c.str());
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_poly(const Options& o, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(o);
  const auto p = z_poly(g);
  auto j = header("poly");
  j["graph"] = graph_id(o);
  j["vertices"] = g.vertex_count();
  j["edges"] = g.edge_count();
  j["coefficients"] = coefficients_json(p);
  write_json(o.out, out, j);
  if (!o.check) return kOk;
  Checker c(err);
  detail::require(g.vertex_count() <= 22, "poly --check enumerates subsets; graph too large");
  for (const Rational& lam : {Rational(1), Rational(3, 2), Rational(-2, 7)}) {
    const std::vector<Rational> f(static_cast<std::size_t>(g.vertex_count()), lam);
    c.expect(p.evaluate<Rational>(lam) == z_brute_force<Rational>(g, f), "Z(" + lam.str() + ") against enumeration");
  }
  return c.finish("poly");
}

int cmd_ratio(const Options& o, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(o);
  detail::require(g.contains(o.vertex), "vertex out of range");
  const auto grid = lambda_values(o);
  const auto rows = parallel_map<std::pair<double, double>>(grid.size(), o.jobs, [&](std::size_t i) {
    const auto f = uniform_fugacity(g, grid[i]);
    const auto r = ratio<double>(g, o.vertex, f);
    return std::pair{r.value(), r.num() / (r.num() + r.den())};
  });
  {
    Output sink(o.out, out);
    *sink << "lambda,ratio,occupation\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      *sink << fmt17(grid[i]) << ',' << fmt17(rows[i].first) << ',' << fmt17(rows[i].second) << '\n';
  }
  if (!o.check) return kOk;
  detail::require(g.vertex_count() <= 22, "ratio --check enumerates subsets; graph too large");
  Checker c(err);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Rational lam = from_double<Rational>(grid[i]);
    std::vector<bool> keep_out(static_cast<std::size_t>(g.vertex_count()), true), keep_in = keep_out;
    keep_out[static_cast<std::size_t>(o.vertex)] = false;
    keep_in[static_cast<std::size_t>(o.vertex)] = false;
    for (Vertex w : g.neighbors(o.vertex)) keep_in[static_cast<std::size_t>(w)] = false;
    const auto g_out = g.induced_subgraph(keep_out), g_in = g.induced_subgraph(keep_in);
    const Rational z_out = z_brute_force<Rational>(g_out, std::vector<Rational>(static_cast<std::size_t>(g_out.vertex_count()), lam));
    const Rational z_in = lam * z_brute_force<Rational>(g_in, std::vector<Rational>(static_cast<std::size_t>(g_in.vertex_count()), lam));
    const double expected = Rational(z_in / z_out).convert_to<double>();
    c.expect(rel_gap(rows[i].first, expected) < 1e-12, "ratio at lambda=" + fmt17(grid[i]));
  }
  return c.finish("ratio");
}

int cmd_sawtree(const Options& o, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(o);
  detail::require(g.contains(o.vertex), "vertex out of range");
  require_positive(o.lambda, "lambda");
  const auto s = build_saw_tree(g, o.vertex);
  auto j = header("sawtree");
  j["graph"] = graph_id(o);
  j["vertex"] = o.vertex;
  j["nodes"] = s.size();
  j["height"] = s.tree.height();
  j["max_degree"] = s.tree.max_degree();
  j["parents"] = s.tree.parents();
  j["origin"] = s.origin;
  const std::vector<double> f(static_cast<std::size_t>(s.size()), o.lambda);
  j["lambda"] = o.lambda;
  j["root_ratio"] = json_number<json>(tree_ratio<double>(s.tree, f).value());
  write_json(o.out, out, j);
  if (!o.dot.empty()) {
    Output dot(o.dot, out);
    write_dot(*dot, s);
  }
  if (!o.check) return kOk;
  Checker c(err);
  c.expect(projects_to_walks(s, g), "tree nodes project to self-avoiding walks");
  const auto w = verify_weitz<Rational>(g, o.vertex, uniform_fugacity(g, from_double<Rational>(o.lambda)));
  c.expect(w.equal, "tree root ratio equals graph ratio (exact)");
  return c.finish("sawtree");
}

json fit_json(const DecayReport& r) { return to_json(r); }

int cmd_vssm(const Options& o, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(o);
  require_positive(o.lambda, "lambda");
  detail::require(o.lmax >= 1, "lmax must be at least 1");
  std::vector<Vertex> vs;
  if (o.all_vertices) {
    for (Vertex v = 0; v < g.vertex_count(); ++v) vs.push_back(v);
  } else {
    detail::require(g.contains(o.vertex), "vertex out of range");
    vs.push_back(o.vertex);
  }
  const auto profiles = parallel_map<std::vector<double>>(vs.size(), o.jobs, [&](std::size_t i) {
    return vssm_profile(g, vs[i], o.lmax, o.lambda);
  });
  std::vector<GapRow> rows;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (int l = 1; l <= o.lmax; ++l) rows.push_back({graph_id(o), vs[i], l, profiles[i][static_cast<std::size_t>(l - 1)]});
  {
    Output sink(o.out, out);
    write_gap_csv(*sink, rows);
  }
  if (!o.report.empty()) {
    auto j = header("vssm");
    j["lambda"] = o.lambda;
    j["reports"] = json::array();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      auto r = fit_json(decay_report(graph_id(o) + "#" + std::to_string(vs[i]), profiles[i], o.fit_from));
      r["v"] = vs[i];
      j["reports"].push_back(r);
    }
    write_json(o.report, out, j);
  }
  if (!o.check) return kOk;
  Checker c(err);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto s = build_saw_tree(g, vs[i]);
    const std::vector<double> f(static_cast<std::size_t>(s.size()), o.lambda);
    for (int l = 1; l <= o.lmax; ++l) {
      if (s.tree.shell(l).size() > 12) continue;
      const auto ex = brute_force_extremes<double>(s.tree, f, l);
      const double gap = profiles[i][static_cast<std::size_t>(l - 1)];
      c.expect(ex.extremal || ex.max - ex.min <= gap * (1 + 1e-12) + 1e-15, "extremal boundary at v=" + std::to_string(vs[i]) + " l=" + std::to_string(l));
      c.expect(std::abs((ex.max - ex.min) - gap) <= 1e-12 * std::max(1.0, gap), "enumerated gap at v=" + std::to_string(vs[i]) + " l=" + std::to_string(l));
    }
  }
  return c.finish("vssm");
}

int cmd_ssm(const Options& o, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(o);
  require_positive(o.lambda, "lambda");
  detail::require(o.lmax >= 1, "lmax must be at least 1");
  detail::require(g.contains(o.vertex), "vertex out of range");
  const auto gaps = parallel_map<double>(static_cast<std::size_t>(o.lmax), o.jobs, [&](std::size_t i) {
    return ssm_gap(g, o.vertex, static_cast<int>(i) + 1, o.lambda);
  });
  std::vector<GapRow> rows;
  for (int l = 1; l <= o.lmax; ++l) rows.push_back({graph_id(o), o.vertex, l, gaps[static_cast<std::size_t>(l - 1)]});
  {
    Output sink(o.out, out);
    write_gap_csv(*sink, rows);
  }
  if (!o.report.empty()) {
    auto j = header("ssm");
    j["lambda"] = o.lambda;
    j["report"] = fit_json(decay_report(graph_id(o), gaps, o.fit_from));
    write_json(o.report, out, j);
  }
  if (!o.check) return kOk;
  Checker c(err);
  const auto f = uniform_fugacity(g, from_double<Rational>(o.lambda));
  for (int l = 1; l <= o.lmax; ++l) {
    const double exact = ssm_gap<Rational>(g, o.vertex, l, std::span<const Rational>(f)).convert_to<double>();
    c.expect(std::abs(exact - gaps[static_cast<std::size_t>(l - 1)]) <= 1e-12 * std::max(1.0, exact), "exact gap at l=" + std::to_string(l));
  }
  return c.finish("ssm");
}

int cmd_anchor(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<double> l;
  if (!o.lambdas.empty()) {
    l = parse_grid(o.lambdas);
  } else {
    detail::require(o.n >= 1, "n must be at least 1");
    l.assign(static_cast<std::size_t>(o.n), o.lambda);
  }
  const double cap = o.lambda_max > 0.0 ? o.lambda_max : *std::max_element(l.begin(), l.end());
  const MobiusSequence seq(l, cap);
  const auto orbit = anchor_orbit(seq);
  {
    Output sink(o.out, out);
    *sink << "n,lambda_n,w_n,G_prime_n\n";
    for (int n = 0; n <= seq.size(); ++n) {
      *sink << n << ',' << (n == 0 ? std::string() : fmt17(seq.at(n))) << ',' << fmt17(orbit.w[static_cast<std::size_t>(n)]) << ','
            << (n == 0 ? std::string("1") : fmt17(G_derivative(orbit, n))) << '\n';
    }
  }
  if (!o.check) return kOk;
  Checker c(err);
  c.expect(orbit.contained(), "anchor orbit inside (-1 - lambda_max, -1)");
  c.expect(backward_consistency(seq, orbit) < 1e-12, "backward consistency");
  for (const Complex z : {Complex(0.3, 0.2), Complex(-0.5, 1.0), Complex(2.0, -0.1)})
    c.expect(commutation_check(seq, orbit, z) < 1e-10, "affine conjugation commutes");
  return c.finish("anchor");
}

int cmd_dynamics(const Options& o, std::ostream& out, std::ostream& err) {
  detail::require(o.d >= 1, "d must be at least 1");
  const auto grid = lambda_values(o);
  const auto rows = parallel_map<FixedPointReport>(grid.size(), o.jobs, [&](std::size_t i) { return fixed_point_report(o.d, grid[i]); });
  {
    Output sink(o.out, out);
    write_fixed_point_csv(*sink, rows);
  }
  if (!o.check) return kOk;
  Checker c(err);
  const double lc = o.d >= 2 ? lambda_c(o.d + 1) : std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const std::string at = " at lambda=" + fmt17(r.lambda);
    c.expect(std::abs(r.x * std::pow(1 + r.x, o.d) - r.lambda) <= 1e-12 * r.lambda, "fixed point equation" + at);
    c.expect(std::abs(r.multiplier + o.d * r.x / (1 + r.x)) <= 1e-12, "multiplier formula" + at);
    if (std::abs(r.lambda - lc) > 1e-6 * lc)
      c.expect((r.lambda < lc) == (r.cls == FixedPointClass::Attracting), "classification" + at);
    if (r.two_cycle) {
      const auto& t = *r.two_cycle;
      c.expect(std::abs(r.lambda / std::pow(1 + t.x1, o.d) - t.x2) < 1e-10, "2-cycle" + at);
    }
  }
  return c.finish("dynamics");
}

std::optional<FamilyTarget> parse_family(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto p = split(s, ':');
  detail::require(p.size() == 3, "family spec is d:k:m");
  FamilyTarget t{parse_int(p[0], "d"), parse_int(p[1], "k"), parse_int(p[2], "m")};
  detail::require(t.d >= 1 && t.k >= 0 && t.m >= 0, "family needs d >= 1, k >= 0, m >= 0");
  return t;
}

std::function<int(int)> parse_m_rule(const std::string& s) {
  if (s == "k") return [](int k) { return k; };
  const int m = parse_int(s, "m rule");
  detail::require(m >= 0, "m rule must be k or a non-negative integer");
  return [m](int) { return m; };
}

int cmd_zeros(const Options& o, std::ostream& out, std::ostream& err) {
  const auto fam = parse_family(o.family);
  auto polynomial = [&]() {
    if (fam) {
      const int n = target_vertex_count(*fam);
      detail::require(n <= 2000, "family member too large for an explicit polynomial");
      return z_poly(build_cayley_path_tree(fam->d, fam->k, fam->m).to_graph());
    }
    return z_poly(load_graph(o));
  };
  Checker c(err);
  if (o.mode == "newton") {
    ZeroTarget target = fam ? ZeroTarget{*fam} : ZeroTarget{GraphTarget{load_graph(o), o.vertex}};
    NewtonOptions no;
    no.tol = o.tol;
    no.max_iter = o.max_iter;
    const auto r = newton_zero(target, {o.start_re, o.start_im}, no);
    auto j = header("zeros");
    j["mode"] = "newton";
    j["result"] = to_json(r);
    write_json(o.out, out, j);
    if (!o.check) return kOk;
    detail::require(target_vertex_count(target) <= 200, "zeros --check needs at most 200 vertices");
    const auto rs = poly_roots(polynomial(), o.precision);
    c.expect(nearest_root_distance(rs, r.lambda) < 1e-6, "Newton zero matches a polynomial root");
    return c.finish("zeros");
  }
  if (o.mode == "roots" || o.mode == "scan") {
    const auto p = polynomial();
    if (o.mode == "roots") {
      const auto rs = poly_roots(p, o.precision);
      {
        Output sink(o.out, out);
        write_roots_csv(*sink, {{fam ? fam->k : 0, rs}});
      }
      if (!o.check) return kOk;
      c.expect(rs.converged, "Aberth residual below 2^(-precision/2)");
      c.expect(conjugate_symmetry_gap(rs) < 1e-9, "roots closed under conjugation");
      c.expect(static_cast<int>(rs.roots.size()) == p.degree(), "root count equals degree");
      return c.finish("zeros");
    }
    const auto scan = zero_free_scan(p, o.lambda_star, o.delta, o.precision);
    auto j = header("zeros");
    j["mode"] = "scan";
    j["lambda_star"] = o.lambda_star;
    j["delta"] = o.delta;
    j["min_distance"] = json_number<json>(scan.min_distance);
    j["closest_root"] = complex_json(scan.closest_root);
    j["zero_free"] = scan.zero_free;
    j["positive_axis_distance"] = json_number<json>(scan.positive_axis_distance);
    write_json(o.out, out, j);
    if (!o.check) return kOk;
    c.expect(scan.positive_axis_distance > 0.0, "no root on the positive real axis");
    return c.finish("zeros");
  }
  if (o.mode == "accumulate") {
    const auto kr = split(o.k_range, ':');
    detail::require(kr.size() == 2, "k range is kmin:kmax");
    std::vector<int> ks;
    for (int k = parse_int(kr[0], "kmin"); k <= parse_int(kr[1], "kmax"); ++k) ks.push_back(k);
    const auto rule = parse_m_rule(o.m_rule);
    const auto reports = o.all_families ? accumulation_three_families(o.d, ks, rule, o.angle)
                                        : std::vector<AccumulationReport>{accumulation_experiment(o.d, ks, rule, o.angle)};
    auto j = header("zeros");
    j["mode"] = "accumulate";
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(to_json(r));
    write_json(o.out, out, j);
    if (!o.report.empty()) {
      Output csv(o.report, out);
      *csv << "family,k,m,re,im,distance,converged\n";
      for (const auto& r : reports)
        for (const auto& row : r.rows)
          *csv << r.family << ',' << row.k << ',' << row.m << ',' << fmt17(row.lambda.real()) << ',' << fmt17(row.lambda.imag()) << ','
               << fmt17(row.distance) << ',' << (row.converged ? 1 : 0) << '\n';
    }
    if (!o.check) return kOk;
    for (const auto& r : reports) {
      const int shift = r.family == "T" ? 0 : r.family == "T'" ? 1 : 2;
      for (const auto& row : r.rows) {
        if (!row.converged) continue;
        const FamilyTarget t{o.d, row.k - shift, row.m};
        if (target_vertex_count(t) > 200) continue;
        const auto rs = poly_roots(z_poly(build_cayley_path_tree(t.d, t.k, t.m).to_graph()), 256);
        c.expect(nearest_root_distance(rs, row.lambda) < 1e-6, r.family + " k=" + std::to_string(row.k) + " zero matches a polynomial root");
      }
    }
    return c.finish("zeros");
  }
  throw ValidationError("unknown zeros mode '" + o.mode + "' (newton, roots, scan, accumulate)");
}

int cmd_spectral(const Options& o, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(o);
  require_positive(o.lambda, "lambda");
  const auto m = influence_matrix(g, o.lambda);
  const auto rep = spectral_report(m.entries);
  auto j = header("spectral");
  j["graph"] = graph_id(o);
  j["lambda"] = o.lambda;
  j["spectrum"] = to_json(rep);
  j["matrix"] = json::array();
  for (int u = 0; u < m.size(); ++u) {
    json row = json::array();
    for (int v = 0; v < m.size(); ++v) row.push_back(m.entries(u, v));
    j["matrix"].push_back(row);
  }
  if (o.sweep) {
    const auto sw = induced_subgraph_sweep(g, o.lambda);
    j["sweep"] = {{"subgraphs", sw.subgraphs},     {"max_eigenvalue", sw.max_eigenvalue}, {"argmax_mask", sw.argmax_mask},
                  {"all_real", sw.all_real},       {"worst_imag_ratio", sw.worst_imag_ratio},
                  {"with_negative", sw.with_negative}};
  }
  write_json(o.out, out, j);
  if (!o.check) return kOk;
  detail::require(g.vertex_count() <= 14, "spectral --check enumerates subsets; graph too large");
  Checker c(err);
  // conditional probabilities straight from subset enumeration
  const int n = g.vertex_count();
  std::vector<std::uint32_t> sets;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    bool ok = true;
    for (const auto& [a, b] : g.edges()) ok = ok && !(((mask >> a) & 1U) && ((mask >> b) & 1U));
    if (ok) sets.push_back(mask);
  }
  auto weight = [&](std::uint32_t mask) { return std::pow(o.lambda, std::popcount(mask)); };
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = 0; v < n; ++v) {
      if (u == v) continue;
      double in_v_in = 0, in_all = 0, out_v_in = 0, out_all = 0;
      for (auto s : sets) {
        const bool ui = (s >> u) & 1U, vi = (s >> v) & 1U;
        (ui ? in_all : out_all) += weight(s);
        if (vi) (ui ? in_v_in : out_v_in) += weight(s);
      }
      const double psi = in_v_in / in_all - out_v_in / out_all;
      c.expect(std::abs(psi - m.entries(u, v)) < 1e-12, "influence " + std::to_string(u) + "->" + std::to_string(v));
    }
  c.expect(rep.real_spectrum, "spectrum real");
  return c.finish("spectral");
}

// ---------------------------------------------------------------------------
// Config: JSON keys become flags placed before the command-line flags, so the
// command line wins (every option keeps its last value).

std::vector<std::string> config_tokens(const std::string& path, std::string& command) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  detail::require(j.is_object(), "config must be a JSON object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      detail::require(value.is_string(), "config 'command' must be a string");
      command = value.get<std::string>();
      continue;
    }
    if (key == "config" || key == "schema_version") continue;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
    } else if (value.is_string()) {
      std::string text = value.get<std::string>();
      // input files named in a config are relative to the config itself
      if (key == "graph_file" || key == "graph-file") {
        const std::filesystem::path file(text);
        if (file.is_relative()) text = (std::filesystem::path(path).parent_path() / file).string();
      }
      tokens.push_back(flag);
      tokens.push_back(text);
    } else if (value.is_number()) {
      tokens.push_back(flag);
      tokens.push_back(value.is_number_float() ? fmt17(value.get<double>()) : value.dump());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& x : value) joined += (joined.empty() ? "" : ",") + (x.is_string() ? x.get<std::string>() : (x.is_number_float() ? fmt17(x.get<double>()) : x.dump()));
      tokens.push_back(flag);
      tokens.push_back(joined);
    } else {
      throw ValidationError("config key '" + key + "' has an unsupported value type");
    }
  }
  return tokens;
}

const std::vector<std::string> kCommands{"poly", "ratio", "sawtree", "vssm", "ssm", "anchor", "dynamics", "zeros", "spectral"};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config; command-line flags override it");
  sub->add_option("--out", o.out, "output file (default stdout)");
  sub->add_flag("--check", o.check, "cross-validate against an independent oracle");
  sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "seed for random graphs");
}

void add_graph(CLI::App* sub, Options& o) {
  sub->add_option("--graph", o.graph, "path:n cycle:n complete:n star:n random:n:p[:seed] cayley:d:k:m");
  sub->add_option("--graph-file", o.graph_file, "edge-list (.txt) or JSON (.json) graph file");
  sub->add_option("--vertex", o.vertex, "distinguished vertex");
}

void add_lambda(CLI::App* sub, Options& o) {
  sub->add_option("--lambda", o.lambda, "fugacity");
  sub->add_option("--lambda-grid", o.lambda_grid, "a:b:step or comma list");
}

int dispatch(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.command == "poly") return cmd_poly(o, out, err);
  if (o.command == "ratio") return cmd_ratio(o, out, err);
  if (o.command == "sawtree") return cmd_sawtree(o, out, err);
  if (o.command == "vssm") return cmd_vssm(o, out, err);
  if (o.command == "ssm") return cmd_ssm(o, out, err);
  if (o.command == "anchor") return cmd_anchor(o, out, err);
  if (o.command == "dynamics") return cmd_dynamics(o, out, err);
  if (o.command == "zeros") return cmd_zeros(o, out, err);
  return cmd_spectral(o, out, err);
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  json j{{"schema_version", kSchemaVersion}, {"error", {{"kind", kind}, {"message", message}}}};
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"hard-core model laboratory", "hardcore-lab"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  std::map<std::string, CLI::App*> subs;
  for (const auto& name : kCommands) {
    auto* sub = app.add_subcommand(name);
    add_common(sub, o);
    subs[name] = sub;
  }
  subs["poly"]->description("independence polynomial coefficients (JSON)");
  add_graph(subs["poly"], o);

  subs["ratio"]->description("occupation ratio R_{G,v} over a lambda grid (CSV)");
  add_graph(subs["ratio"], o);
  add_lambda(subs["ratio"], o);

  subs["sawtree"]->description("self-avoiding-walk tree (JSON, optional DOT)");
  add_graph(subs["sawtree"], o);
  add_lambda(subs["sawtree"], o);
  subs["sawtree"]->add_option("--dot", o.dot, "Graphviz output file");

  for (const char* name : {"vssm", "ssm"}) {
    auto* sub = subs[name];
    sub->description(std::string(name) + " gaps for l = 1..lmax (CSV, optional JSON fit report)");
    add_graph(sub, o);
    add_lambda(sub, o);
    sub->add_option("--lmax", o.lmax, "largest distance");
    sub->add_option("--report", o.report, "JSON decay-fit report file");
    sub->add_option("--fit-from", o.fit_from, "first distance used in the fit");
  }
  subs["vssm"]->add_flag("--all-vertices", o.all_vertices, "one profile per vertex");

  subs["anchor"]->description("anchor orbit and derivative products of a Mobius sequence (CSV)");
  add_lambda(subs["anchor"], o);
  subs["anchor"]->add_option("--lambdas", o.lambdas, "sequence lambda_1..lambda_n (comma list or a:b:step)");
  subs["anchor"]->add_option("--n", o.n, "length of a constant sequence");
  subs["anchor"]->add_option("--lambda-max", o.lambda_max, "bound on the sequence (default: its maximum)");

  subs["dynamics"]->description("fixed point and 2-cycle of x -> lambda/(1+x)^d over a lambda grid (CSV)");
  add_lambda(subs["dynamics"], o);
  subs["dynamics"]->add_option("--d", o.d, "down-degree d");

  auto* z = subs["zeros"];
  z->description("zeros of independence polynomials");
  add_graph(z, o);
  z->add_option("--mode", o.mode, "newton | roots | scan | accumulate");
  z->add_option("--family", o.family, "T_{d^k,1^m} as d:k:m (instead of --graph)");
  z->add_option("--start-re", o.start_re, "Newton start, real part");
  z->add_option("--start-im", o.start_im, "Newton start, imaginary part");
  z->add_option("--tol", o.tol, "Newton tolerance on |R + 1|");
  z->add_option("--max-iter", o.max_iter, "Newton iteration cap");
  z->add_option("--precision", o.precision, "Aberth mantissa bits");
  z->add_option("--lambda-star", o.lambda_star, "scan segment [0, lambda*]");
  z->add_option("--delta", o.delta, "scan tube radius");
  z->add_option("--d", o.d, "accumulation: down-degree");
  z->add_option("--k-range", o.k_range, "accumulation: kmin:kmax");
  z->add_option("--m-rule", o.m_rule, "accumulation: path length, k or an integer");
  z->add_option("--angle", o.angle, "accumulation: seed angle");
  z->add_flag("--all-families", o.all_families, "accumulation: also T' and T''");
  z->add_option("--report", o.report, "accumulation: CSV table file");

  subs["spectral"]->description("influence matrix and spectrum (JSON)");
  add_graph(subs["spectral"], o);
  add_lambda(subs["spectral"], o);
  subs["spectral"]->add_flag("--sweep", o.sweep, "all induced subgraphs (n <= 8)");

  try {
    // pull --config out first so its keys can be placed before the explicit flags
    std::string config_path, config_command;
    for (std::size_t i = 0; i < args_in.size(); ++i) {
      if (args_in[i] == "--config" && i + 1 < args_in.size()) config_path = args_in[i + 1];
      if (args_in[i].rfind("--config=", 0) == 0) config_path = args_in[i].substr(9);
    }
    std::vector<std::string> args = args_in;
    if (!config_path.empty()) {
      const auto tokens = config_tokens(config_path, config_command);
      auto pos = std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
      });
      if (pos == args.end()) {
        detail::require(!config_command.empty(), "no subcommand given on the command line or in the config");
        args.insert(args.begin(), config_command);
        pos = args.begin();
      }
      args.insert(pos + 1, tokens.begin(), tokens.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        out << app.help();
        return kOk;
      }
      report_error(err, "validation", e.what());
      return kValidation;
    }
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) o.command = name;
    return dispatch(o, out, err);
  } catch (const ValidationError& e) {
    report_error(err, e.kind(), e.what());
    return kValidation;
  } catch (const BudgetError& e) {
    report_error(err, e.kind(), e.what());
    return kBudget;
  } catch (const ConvergenceError& e) {
    report_error(err, e.kind(), e.what());
    return kConvergence;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kValidation;
  }
}

}  // namespace hardcore::cli
