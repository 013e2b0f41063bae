#include "cli.hpp"

#include "twc/approx_eig.hpp"
#include "twc/certify.hpp"
#include "twc/error.hpp"
#include "twc/io.hpp"
#include "twc/models.hpp"
#include "twc/restriction.hpp"
#include "twc/svn_minimum.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace twc::cli {

std::vector<double> Grid::values() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    // endpoints exact, interior points by a single rounding
    v.push_back(count == 1 ? first
                           : i == count - 1 ? last
                                            : first + (last - first) * static_cast<double>(i) /
                                                          static_cast<double>(count - 1));
  }
  return v;
}

namespace {

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError(what + ": cannot parse '" + s + "' as a number");
  }
  if (used != s.size() || !std::isfinite(x)) throw IoError(what + ": cannot parse '" + s + "' as a number");
  return x;
}

long parse_long(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(s, &used);
  } catch (const std::exception&) {
    throw IoError(what + ": cannot parse '" + s + "' as an integer");
  }
  if (used != s.size()) throw IoError(what + ": cannot parse '" + s + "' as an integer");
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

Grid parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  Grid g;
  if (parts.size() == 1) {
    g.first = g.last = parse_double(parts[0], "grid");
    return g;
  }
  if (parts.size() != 3) throw IoError("grid: expected 'a:b:n', got '" + text + "'");
  g.first = parse_double(parts[0], "grid");
  g.last = parse_double(parts[1], "grid");
  g.count = parse_long(parts[2], "grid");
  if (g.count < 1) throw PreconditionError("grid: n must be >= 1");
  if (g.count > 10000000) throw PreconditionError("grid: n is too large");
  if (g.count == 1 && g.first != g.last) throw PreconditionError("grid: n = 1 needs a = b");
  return g;
}

std::vector<long> parse_int_list(const std::string& text) {
  std::vector<long> out;
  for (const auto& item : split(text, ',')) {
    const auto range = split(item, ':');
    if (range.size() == 1) {
      out.push_back(parse_long(range[0], "integer list"));
    } else if (range.size() == 2) {
      const long a = parse_long(range[0], "integer list");
      const long b = parse_long(range[1], "integer list");
      if (b < a || b - a > 100000) throw PreconditionError("integer list: bad range '" + item + "'");
      for (long v = a; v <= b; ++v) out.push_back(v);
    } else {
      throw IoError("integer list: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw IoError("integer list: empty");
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Output plumbing

struct Common {
  std::string out_path;
  std::string format = "csv";
  unsigned threads = 0;
  bool timestamp = false;
  double tol = default_tolerances().unitarity;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json make_manifest(const std::string& command, Json parameters, std::optional<std::uint64_t> seed,
                   const Common& common) {
  Json m;
  m["command"] = command;
  m["parameters"] = std::move(parameters);
  m["seed"] = seed ? Json(*seed) : Json(nullptr);
  m["tool_version"] = kVersion;
  if (common.timestamp) m["timestamp"] = utc_timestamp();
  return m;
}

Tolerances tolerances(const Common& common) {
  Tolerances tol = default_tolerances();
  tol.unitarity = common.tol;
  return tol;
}

unsigned thread_count(const Common& common) {
  if (common.threads > 0) return common.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Writes to the --out file when given, else to `out`.
void emit(const Common& common, std::ostream& out, const std::string& text) {
  if (common.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(common.out_path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + common.out_path + "'");
  file << text;
  if (!file) throw IoError("write failed for '" + common.out_path + "'");
}

std::string csv_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return format_double(x);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  std::string render(const Json& manifest, const std::string& format) const {
    if (format == "json") {
      Json doc;
      doc["manifest"] = manifest;
      Json arr = Json::array();
      for (const auto& row : rows) {
        Json obj;
        for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
        arr.push_back(obj);
      }
      doc["rows"] = arr;
      return doc.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "# manifest: " << manifest.dump() << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) os << ',';
        const Json& v = row[c];
        if (v.is_number_float()) {
          os << csv_number(v.get<double>());
        } else if (v.is_string()) {
          os << v.get<std::string>();
        } else {
          os << v.dump();
        }
      }
      os << '\n';
    }
    return os.str();
  }
};

Json check_row(const std::string& quantity, double measured, double bound, double slack = 1e-9) {
  Json row;
  row["quantity"] = quantity;
  row["measured"] = json_number(measured);
  row["bound"] = json_number(bound);
  row["holds"] = measured <= bound + slack;
  return row;
}

bool all_hold(const Json& table) {
  for (const auto& row : table) {
    if (!row.at("holds").get<bool>()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Shared inputs: a model manifest or matrix files

struct PairInput {
  std::string manifest_path;
  std::string h_path;
  std::string p_path;
  std::string u_path;
  std::string v_path;
  std::optional<long> band_size;
  std::optional<double> alpha;
  std::optional<double> gap;
  std::optional<double> width;
  std::optional<std::uint64_t> seed;
  std::string norm = "op";
  double p = kInf;
  long k = 1;
};

void add_pair_input(CLI::App* sub, PairInput& in) {
  auto* manifest = sub->add_option("--manifest", in.manifest_path, "model manifest (JSON)");
  auto* h = sub->add_option("-H,--hamiltonian", in.h_path, "Hamiltonian matrix file");
  sub->add_option("-P,--projector", in.p_path, "band projector matrix file")->needs(h);
  sub->add_option("-U,--symmetry-u", in.u_path, "first symmetry matrix file")->needs(h);
  sub->add_option("-V,--symmetry-v", in.v_path, "second symmetry matrix file")->needs(h);
  sub->add_option("--band-size", in.band_size, "band of the lowest levels (instead of --projector)")
      ->needs(h);
  sub->add_option("--alpha", in.alpha, "twisting parameter (default 1/g for a manifest)");
  sub->add_option("--gap", in.gap, "claimed gap (checked against the spectrum)")->needs(h);
  sub->add_option("--width", in.width, "claimed band width (checked)")->needs(h);
  sub->add_option("--seed", in.seed, "override the manifest seed")->needs(manifest);
  sub->add_option("--norm", in.norm, "op | fro | pk")->check(CLI::IsMember({"op", "fro", "pk"}));
  sub->add_option("--p", in.p, "p for --norm pk (inf allowed)");
  sub->add_option("--k", in.k, "k for --norm pk (0 = all singular values)");
  manifest->excludes(h);
}

ModelSpec load_spec(const std::string& path, std::optional<std::uint64_t> seed) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  // accept a bare spec or any document that embeds one under "model"
  ModelSpec spec = model_spec_from_json(j.contains("model") ? j.at("model") : j);
  if (seed) spec.seed = *seed;
  return spec;
}

Json pair_parameters(const PairInput& in, const NormSpec& norm) {
  Json p;
  if (!in.manifest_path.empty()) p["manifest"] = in.manifest_path;
  if (!in.h_path.empty()) p["hamiltonian"] = in.h_path;
  if (!in.p_path.empty()) p["projector"] = in.p_path;
  if (!in.u_path.empty()) p["symmetry_u"] = in.u_path;
  if (!in.v_path.empty()) p["symmetry_v"] = in.v_path;
  if (in.band_size) p["band_size"] = *in.band_size;
  if (in.alpha) p["alpha"] = *in.alpha;
  if (in.gap) p["gap"] = *in.gap;
  if (in.width) p["width"] = *in.width;
  p["norm"] = norm.label();
  return p;
}

struct LoadedPair {
  std::optional<ModelSpec> spec;
  BandSpec band;
  DenseMatrix u;
  DenseMatrix v;
  double alpha = 0.0;
};

LoadedPair load_pair(const PairInput& in, const Tolerances& tol) {
  LoadedPair out;
  if (!in.manifest_path.empty()) {
    const ModelSpec spec = load_spec(in.manifest_path, in.seed);
    out.spec = spec;
    if (spec.kind == ModelKind::tensor_double) {
      const TensorModel m = tensor_double_model(spec);
      out.band = m.band;
      out.u = m.u1;
      out.v = m.v1;
      out.alpha = 1.0 / static_cast<double>(spec.g);
    } else {
      const ClockModel m = clock_model(spec);
      out.band = m.band;
      out.u = m.u;
      out.v = m.v;
      out.alpha = m.alpha;
    }
    if (in.alpha) out.alpha = *in.alpha;
    return out;
  }
  if (in.h_path.empty()) throw PreconditionError("need --manifest or matrix files (-H, -P, -U, -V)");
  if (in.u_path.empty() || in.v_path.empty()) throw PreconditionError("need both -U and -V");
  if (!in.alpha) throw PreconditionError("--alpha is required with matrix files");
  const DenseMatrix h = read_matrix_file(in.h_path);
  if (!in.p_path.empty()) {
    out.band = make_band(h, read_matrix_file(in.p_path), in.gap, in.width, tol);
  } else if (in.band_size) {
    out.band = lowest_band(h, *in.band_size, tol);
  } else {
    throw PreconditionError("need --projector or --band-size");
  }
  out.u = read_matrix_file(in.u_path);
  out.v = read_matrix_file(in.v_path);
  out.alpha = *in.alpha;
  return out;
}

/// Restriction plus the measured-vs-bound table.
struct RestrictReport {
  RestrictionResult result;
  Json json;
};

Json ground_rows(const std::string& name, const GroundSymmetry& gs, const BandSpec& band,
                 const DenseMatrix& u, const NormSpec& norm, const Tolerances& tol) {
  Json rows = Json::array();
  // each off-diagonal block is at most eps / (gap - width); two blocks add up
  // in a general norm and combine as a maximum in the operator norm
  const double block = gs.epsilon / (band.gap - band.width);
  const double offdiag_bound = norm.is_operator_norm() ? block : 2.0 * block;
  rows.push_back(check_row("offdiag(" + name + ")", offdiag_norm(u, band, norm, tol), offdiag_bound));
  rows.push_back(check_row("||" + name + " - ground(" + name + ")||", gs.distance, gs.distance_bound));
  rows.push_back(check_row("||P(" + name + " - ground(" + name + "))P||", gs.band_distance,
                           gs.band_distance_bound));
  return rows;
}

RestrictReport restrict_report(const LoadedPair& in, const NormSpec& norm, const Tolerances& tol) {
  RestrictReport rep;
  rep.result = restrict_pair(in.u, in.v, in.band, in.alpha, norm, tol);
  const auto& r = rep.result;
  Json j;
  j["dimension"] = in.band.dim();
  j["band_rank"] = in.band.rank();
  j["alpha"] = r.alpha;
  j["norm"] = norm.label();
  Json measured;
  measured["gap"] = in.band.gap;
  measured["width"] = r.width;
  measured["epsilon_u"] = r.epsilon_u;
  measured["epsilon_v"] = r.epsilon_v;
  measured["delta"] = r.delta_in;
  measured["xi"] = r.xi;
  measured["width_corrected"] = r.width_corrected;
  measured["delta_out"] = r.delta_out_measured;
  j["measured"] = measured;
  j["delta_out_bound"] = r.delta_out_bound;
  Json table = Json::array();
  for (const auto& row : ground_rows("U", r.ground_u, in.band, in.u, norm, tol)) table.push_back(row);
  for (const auto& row : ground_rows("V", r.ground_v, in.band, in.v, norm, tol)) table.push_back(row);
  table.push_back(check_row("||u*u - I||_F", unitarity_defect(r.u), tol.unitarity, 0.0));
  table.push_back(check_row("||v*v - I||_F", unitarity_defect(r.v), tol.unitarity, 0.0));
  table.push_back(check_row("||[[u, v]]_alpha||", r.delta_out_measured, r.delta_out_bound, 1e-8));
  j["checks"] = table;
  j["all_hold"] = all_hold(table);
  rep.json = j;
  return rep;
}

// ---------------------------------------------------------------------------
// Commands

std::string cmd_mountains(const std::string& alpha_grid, const std::string& delta_grid, bool slack,
                          const Common& common) {
  const auto alphas = parse_grid(alpha_grid).values();
  const auto deltas = parse_grid(delta_grid).values();
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw PreconditionError("mountains: alpha must lie in [0, 1]");
  }
  struct Cell {
    double alpha;
    double delta;
    std::string source;
  };
  std::vector<Cell> cells;
  for (double a : alphas) {
    for (double d : deltas) cells.push_back({a, d, "grid"});
  }
  for (int d = 2; d <= 8; ++d) cells.push_back({1.0 / d, single_pair_threshold(d) - 1e-9, "threshold"});
  cells.push_back({0.25, 0.5, "example"});

  const CertifyOptions opts{slack, default_tolerances().arc_merge};
  const auto certs = parallel_map<Certificate>(cells.size(), thread_count(common), [&](std::size_t i) {
    // alpha = 1 is the same twist as alpha = 0
    const double a = cells[i].alpha >= 1.0 ? 0.0 : cells[i].alpha;
    return certify_single(a, cells[i].delta, opts);
  });

  Table t;
  t.columns = {"alpha", "delta", "certified_dim", "source"};
  if (slack) t.columns.push_back("slack");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<Json> row = {cells[i].alpha, cells[i].delta, certs[i].d_min, cells[i].source};
    if (slack) row.push_back(json_number(certs[i].slack));
    t.rows.push_back(std::move(row));
  }
  Json params;
  params["alpha_grid"] = alpha_grid;
  params["delta_grid"] = delta_grid;
  params["slack"] = slack;
  params["format"] = common.format;
  return t.render(make_manifest("mountains", params, std::nullopt, common), common.format);
}

std::string cmd_minima(const std::string& g_list, const std::string& alpha_grid, const std::string& norm_name,
                       double p, long k, const Common& common) {
  const auto gs = parse_int_list(g_list);
  const auto alphas = parse_grid(alpha_grid).values();
  for (long g : gs) {
    if (g < 1) throw PreconditionError("minima: g must be >= 1");
  }
  struct Cell {
    long g;
    double alpha;
    NormSpec spec;
  };
  std::vector<Cell> cells;
  for (long g : gs) {
    NormSpec spec = parse_norm(norm_name, p, k);
    for (double a : alphas) cells.push_back({g, a, spec});
  }
  const auto values = parallel_map<double>(cells.size(), thread_count(common), [&](std::size_t i) {
    return lambda_min(cells[i].g, cells[i].alpha, cells[i].spec);
  });

  Table t;
  t.columns = {"g", "alpha", "p", "k", "lambda"};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    t.rows.push_back({c.g, c.alpha, json_number(c.spec.p), c.spec.effective_k(c.g), values[i]});
  }
  Json params;
  params["g"] = g_list;
  params["alpha_grid"] = alpha_grid;
  params["norm"] = norm_name;
  params["p"] = json_number(p);
  params["k"] = k;
  params["format"] = common.format;
  return t.render(make_manifest("minima", params, std::nullopt, common), common.format);
}

/// Re-validates a certificate document: the inequality from its echoed
/// inputs, plus the greedy witness when one is present.
Json check_certificate(const Json& doc) {
  const Json& cj = doc.contains("certificate") ? doc.at("certificate") : doc;
  const Certificate cert = certificate_from_json(cj);
  Json out;
  out["method"] = to_string(cert.method);
  out["d_min"] = cert.d_min;
  std::vector<std::string> failures;
  if (!recheck(cert)) failures.push_back("d_min does not follow from the echoed inputs");
  if (cert.method == CertMethod::greedy_transversal) {
    const Certificate again = certify_single(*cert.input("alpha"), *cert.input("delta"), {false, 1e-12});
    if (static_cast<int>(cert.stabs.size()) + 1 != cert.d_min) {
      failures.push_back("witness: number of stabs is not d_min - 1");
    }
    if (again.minimal_arcs.size() != cert.minimal_arcs.size()) {
      failures.push_back("witness: minimal arcs differ from the recomputed system");
    } else {
      for (std::size_t i = 0; i < cert.minimal_arcs.size(); ++i) {
        const auto& a = cert.minimal_arcs[i];
        const auto& b = again.minimal_arcs[i];
        if (a.index != b.index || std::abs(a.left - b.left) > 1e-9 || std::abs(a.right - b.right) > 1e-9) {
          failures.push_back("witness: arc " + std::to_string(i) + " differs from the recomputed system");
          break;
        }
      }
    }
    for (const auto& arc : cert.minimal_arcs) {
      const bool stabbed = std::any_of(cert.stabs.begin(), cert.stabs.end(), [&](double s) {
        return s >= arc.left - 1e-12 && s <= arc.right + 1e-12;
      });
      if (!stabbed) {
        failures.push_back("witness: an arc is not met by any stab");
        break;
      }
    }
  }
  if (doc.contains("measured") && doc.contains("delta_out_bound") && cj.contains("inputs")) {
    // the certified delta must be the restriction bound it came from
    const auto delta = cert.input("delta");
    if (delta && *delta != json_to_double(doc.at("delta_out_bound"))) {
      failures.push_back("certificate delta differs from the reported delta_out_bound");
    }
  }
  out["valid"] = failures.empty();
  out["failures"] = failures;
  return out;
}

struct CertifyArgs {
  PairInput pair;
  std::optional<double> delta;
  std::string check_path;
  bool slack = true;
};

std::string cmd_certify(const CertifyArgs& a, const Common& common, int& exit_code) {
  const NormSpec norm = parse_norm(a.pair.norm, a.pair.p, a.pair.k);
  const Tolerances tol = tolerances(common);
  const CertifyOptions opts{a.slack, tol.arc_merge};
  Json doc;

  if (!a.check_path.empty()) {
    std::ifstream file(a.check_path);
    if (!file) throw IoError("cannot open '" + a.check_path + "'");
    Json input;
    try {
      input = Json::parse(file);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(a.check_path + ": " + e.what());
    }
    Json params;
    params["check"] = a.check_path;
    doc["manifest"] = make_manifest("certify", params, std::nullopt, common);
    doc["check"] = check_certificate(input);
    if (!doc["check"]["valid"].get<bool>()) exit_code = kPrecondition;
    return doc.dump(2) + "\n";
  }

  if (a.delta) {
    if (!a.pair.alpha) throw PreconditionError("--delta needs --alpha");
    if (!a.pair.manifest_path.empty() || !a.pair.h_path.empty()) {
      throw PreconditionError("--delta certifies a bare (alpha, delta); drop the matrix inputs");
    }
    Json params;
    params["alpha"] = *a.pair.alpha;
    params["delta"] = *a.delta;
    doc["manifest"] = make_manifest("certify", params, std::nullopt, common);
    doc["certificate"] = to_json(certify_single(*a.pair.alpha, *a.delta, opts));
    return doc.dump(2) + "\n";
  }

  const LoadedPair loaded = load_pair(a.pair, tol);
  Json params = pair_parameters(a.pair, norm);
  std::optional<std::uint64_t> seed;
  if (loaded.spec) {
    params["model"] = to_json(*loaded.spec);
    seed = loaded.spec->seed;
  }
  doc["manifest"] = make_manifest("certify", params, seed, common);

  if (loaded.spec && loaded.spec->kind == ModelKind::tensor_double && !a.pair.alpha) {
    const TensorCertification tc = certify_tensor_model(tensor_double_model(*loaded.spec));
    Json measured;
    measured["xi"] = tc.xi;
    measured["gamma"] = tc.gamma;
    measured["delta"] = tc.delta;
    measured["gram_rank"] = tc.witness.gram.rank;
    measured["gram_min_eigenvalue"] = tc.witness.gram.min_eigenvalue;
    measured["start_error"] = std::max(tc.witness.start_error_u1, tc.witness.start_error_u2);
    measured["start_bound_rigorous"] = tc.witness.start_bound_rigorous;
    measured["start_bound_nominal"] = tc.witness.start_bound_nominal;
    doc["measured"] = measured;
    doc["witness_failures"] = tc.witness.failures;
    doc["certificate"] = to_json(tc.certificate);
    return doc.dump(2) + "\n";
  }

  const RestrictReport rep = restrict_report(loaded, norm, tol);
  doc["restriction"] = rep.json;
  doc["measured"] = rep.json.at("measured");
  // every Schatten-Ky Fan norm dominates the operator norm, so the bound
  // also bounds the operator-norm twisted commutator that certify_single uses
  doc["delta_out_bound"] = rep.result.delta_out_bound;
  doc["certificate"] = to_json(certify_single(loaded.alpha, rep.result.delta_out_bound, opts));
  return doc.dump(2) + "\n";
}

std::string cmd_restrict(const PairInput& in, const Common& common) {
  const NormSpec norm = parse_norm(in.norm, in.p, in.k);
  const Tolerances tol = tolerances(common);
  const LoadedPair loaded = load_pair(in, tol);
  Json params = pair_parameters(in, norm);
  std::optional<std::uint64_t> seed;
  if (loaded.spec) {
    params["model"] = to_json(*loaded.spec);
    seed = loaded.spec->seed;
  }
  Json doc;
  doc["manifest"] = make_manifest("restrict", params, seed, common);
  const RestrictReport rep = restrict_report(loaded, norm, tol);
  for (const auto& [key, value] : rep.json.items()) doc[key] = value;
  // Gibbs transform: same band, gap 1 - exp(-beta gap) at beta = 1 / gap
  const BandSpec gibbs = gibbs_transform(loaded.band, 1.0 / loaded.band.gap, tol);
  Json g;
  g["beta"] = 1.0 / loaded.band.gap;
  g["gap"] = gibbs.gap;
  g["epsilon_u"] = commutator_epsilon(loaded.u, gibbs, norm, tol);
  g["epsilon_v"] = commutator_epsilon(loaded.v, gibbs, norm, tol);
  doc["gibbs"] = g;
  return doc.dump(2) + "\n";
}

struct EigshareArgs {
  std::string manifest_path;
  std::string a_path;
  std::string b_path;
  std::optional<std::uint64_t> seed;
  long index = 0;
};

Json eigshare_json(const SharedEigenResult& r) {
  Json j;
  j["lambda"] = {r.lambda.real(), r.lambda.imag()};
  j["mu"] = {r.mu.real(), r.mu.imag()};
  j["mu_block"] = {r.mu_block.real(), r.mu_block.imag()};
  j["epsilon"] = r.epsilon;
  j["radius"] = r.radius;
  j["cluster_size"] = r.cluster.indices.size();
  Json table = Json::array();
  table.push_back(check_row("||A x - lambda x||", r.residual_a, r.bound));
  table.push_back(check_row("||B x - mu x||", r.residual_b, r.bound));
  table.push_back(check_row("cluster spread", r.cluster.spread, r.cluster.spread_bound));
  table.push_back(check_row("||A_V - lambda I||", r.a_block_deviation, r.a_block_bound));
  table.push_back(check_row("||B_V'V||", r.b_offdiag, r.b_offdiag_bound));
  j["checks"] = table;
  j["b_offdiag_instance_bound"] = json_number(r.b_offdiag_instance_bound);
  j["all_hold"] = all_hold(table);
  return j;
}

std::string cmd_eigshare(const EigshareArgs& a, const Common& common) {
  const Tolerances tol = tolerances(common);
  DenseMatrix ma;
  DenseMatrix mb;
  Json params;
  std::optional<std::uint64_t> seed;
  std::string pair_name;
  if (!a.manifest_path.empty()) {
    const ModelSpec spec = load_spec(a.manifest_path, a.seed);
    params["manifest"] = a.manifest_path;
    params["model"] = to_json(spec);
    seed = spec.seed;
    if (spec.kind == ModelKind::tensor_double) {
      const TensorModel m = tensor_double_model(spec);
      ma = m.u1;
      mb = m.u2;
      pair_name = "U1, U2";
    } else {
      const ClockModel m = clock_model(spec);
      ma = m.u;
      mb = m.band.hamiltonian;
      pair_name = "U, H";
    }
  } else {
    if (a.a_path.empty() || a.b_path.empty()) throw PreconditionError("need --manifest or both -A and -B");
    ma = read_matrix_file(a.a_path);
    mb = read_matrix_file(a.b_path);
    params["matrix_a"] = a.a_path;
    params["matrix_b"] = a.b_path;
    pair_name = "A, B";
  }
  params["index"] = a.index;
  const auto eig = eig_normal(ma, tol);
  if (a.index < 0 || a.index >= static_cast<long>(eig.eigenvalues.size())) {
    throw PreconditionError("eigshare: --index out of range");
  }
  const Complex seed_eig = eig.eigenvalues[static_cast<std::size_t>(a.index)];

  Json doc;
  doc["manifest"] = make_manifest("eigshare", params, seed, common);
  doc["pair"] = pair_name;
  doc["dimension"] = ma.rows();
  doc["general"] = eigshare_json(shared_approx_eigenvector(ma, mb, seed_eig, tol));
  const double defect = normality_defect(mb);
  if (defect <= tol.normality) {
    doc["normal"] = eigshare_json(shared_approx_eigenvector_normal(ma, mb, seed_eig, tol));
  } else {
    doc["normal"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

struct GenerateArgs {
  std::string manifest_path;
  std::string kind = "clock-block";
  long g = 3;
  long g2 = 2;
  long n_excited = 6;
  double gap = 1.0;
  double width = 0.0;
  double perturbation = 0.0;
  double unitary_perturbation = 0.0;
  bool rotate = false;
  std::optional<std::uint64_t> seed;
  std::string matrices_dir;
  bool binary = false;
};

std::string cmd_generate(const GenerateArgs& a, const Common& common) {
  ModelSpec spec;
  if (!a.manifest_path.empty()) {
    spec = load_spec(a.manifest_path, a.seed);
  } else {
    spec.kind = model_kind_from_string(a.kind);
    spec.g = a.g;
    spec.g2 = a.g2;
    spec.n_excited = a.n_excited;
    spec.gap = a.gap;
    spec.width = a.width;
    spec.perturbation = a.perturbation;
    spec.unitary_perturbation = a.unitary_perturbation;
    spec.rotate_basis = a.rotate;
    if (a.seed) spec.seed = *a.seed;
  }
  Json doc;
  Json params;
  params["model"] = to_json(spec);
  if (!a.matrices_dir.empty()) params["matrices"] = a.matrices_dir;
  params["binary"] = a.binary;
  doc["manifest"] = make_manifest("generate", params, spec.seed, common);
  doc["model"] = to_json(spec);

  // build the model so that invalid specs fail here, not downstream
  Json measured;
  std::vector<std::pair<std::string, DenseMatrix>> mats;
  if (spec.kind == ModelKind::tensor_double) {
    const TensorModel m = tensor_double_model(spec);
    measured["gamma"] = m.gamma;
    measured["epsilon"] = m.epsilon;
    measured["xi"] = m.xi;
    mats = {{"H", m.band.hamiltonian}, {"P", m.band.projector}, {"U1", m.u1},
            {"U2", m.u2},              {"V1", m.v1},             {"V2", m.v2}};
  } else {
    const ClockModel m = clock_model(spec);
    measured["alpha"] = m.alpha;
    measured["epsilon_u"] = m.epsilon_u;
    measured["epsilon_v"] = m.epsilon_v;
    measured["delta"] = m.delta;
    measured["xi"] = m.xi;
    mats = {{"H", m.band.hamiltonian}, {"P", m.band.projector}, {"U", m.u}, {"V", m.v}};
  }
  doc["measured"] = measured;
  if (!a.matrices_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(a.matrices_dir, ec);
    if (ec) throw IoError("cannot create '" + a.matrices_dir + "': " + ec.message());
    Json files;
    for (const auto& [name, m] : mats) {
      const auto path = (std::filesystem::path(a.matrices_dir) / (name + (a.binary ? ".bin" : ".txt"))).string();
      write_matrix_file(path, m, a.binary);
      files[name] = path;
    }
    doc["files"] = files;
  }
  return doc.dump(2) + "\n";
}

void add_common(CLI::App* sub, Common& c, bool with_format) {
  sub->add_option("--out", c.out_path, "output file (default: stdout)");
  if (with_format) sub->add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "worker threads (0 = hardware concurrency)");
  sub->add_option("--tol", c.tol, "unitarity tolerance for inputs");
  sub->add_flag("--timestamp", c.timestamp, "record a UTC timestamp in the manifest");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted-commutator diagnostics and certified degeneracy bounds", "twc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;

  auto* mountains = app.add_subcommand("mountains", "certified dimension over an (alpha, delta) grid");
  std::string m_alpha = "0:1:101";
  std::string m_delta = "0:2:101";
  bool m_slack = false;
  mountains->add_option("--grid,--alpha-grid", m_alpha, "alpha grid a:b:n")->capture_default_str();
  mountains->add_option("--delta-grid", m_delta, "delta grid a:b:n")->capture_default_str();
  mountains->add_flag("--slack", m_slack, "add the certificate slack column");
  add_common(mountains, common, true);

  auto* minima = app.add_subcommand("minima", "minimum twisted-commutator value over alpha");
  std::string n_g = "2:10";
  std::string n_alpha = "0:1:201";
  std::string n_norm = "op";
  double n_p = kInf;
  long n_k = 1;
  minima->add_option("--g", n_g, "dimensions, e.g. 2,3,5 or 2:10")->capture_default_str();
  minima->add_option("--grid", n_alpha, "alpha grid a:b:n")->capture_default_str();
  minima->add_option("--norm", n_norm, "op | fro | pk")->check(CLI::IsMember({"op", "fro", "pk"}));
  minima->add_option("--p", n_p, "p for --norm pk");
  minima->add_option("--k", n_k, "k for --norm pk (0 = all singular values)");
  add_common(minima, common, true);

  auto* certify = app.add_subcommand("certify", "restrict a pair to its band and certify the band dimension");
  CertifyArgs c_args;
  add_pair_input(certify, c_args.pair);
  certify->add_option("--delta", c_args.delta, "certify a bare (alpha, delta)");
  certify->add_option("--check", c_args.check_path, "re-validate a certificate JSON file");
  certify->add_flag("!--no-slack", c_args.slack, "skip the slack computation");
  add_common(certify, common, false);

  auto* restrict = app.add_subcommand("restrict", "restriction report with measured-vs-bound checks");
  PairInput r_args;
  add_pair_input(restrict, r_args);
  add_common(restrict, common, false);

  auto* eigshare = app.add_subcommand("eigshare", "shared approximate eigenvector report");
  EigshareArgs e_args;
  auto* e_manifest = eigshare->add_option("--manifest", e_args.manifest_path, "model manifest (JSON)");
  eigshare->add_option("-A,--matrix-a", e_args.a_path, "normal matrix file")->excludes(e_manifest);
  eigshare->add_option("-B,--matrix-b", e_args.b_path, "second matrix file")->excludes(e_manifest);
  eigshare->add_option("--seed", e_args.seed, "override the manifest seed")->needs(e_manifest);
  eigshare->add_option("--index", e_args.index, "eigenvalue of A to start from (spectral order)");
  add_common(eigshare, common, false);

  auto* generate = app.add_subcommand("generate", "build a seeded model; write its manifest and matrices");
  GenerateArgs g_args;
  auto* g_manifest = generate->add_option("--manifest", g_args.manifest_path, "start from this manifest");
  generate->add_option("--kind", g_args.kind, "clock-block | tensor-double | flat-band")->excludes(g_manifest);
  generate->add_option("--g", g_args.g, "code dimension")->excludes(g_manifest);
  generate->add_option("--g2", g_args.g2, "second code dimension (tensor-double)")->excludes(g_manifest);
  generate->add_option("--n-excited", g_args.n_excited, "excited levels")->excludes(g_manifest);
  generate->add_option("--gap", g_args.gap, "gap")->excludes(g_manifest);
  generate->add_option("--width", g_args.width, "code band width")->excludes(g_manifest);
  generate->add_option("--perturbation", g_args.perturbation, "Hamiltonian perturbation strength")
      ->excludes(g_manifest);
  generate->add_option("--unitary-perturbation", g_args.unitary_perturbation, "symmetry perturbation strength")
      ->excludes(g_manifest);
  generate->add_flag("--rotate", g_args.rotate, "Haar-rotate the whole model")->excludes(g_manifest);
  generate->add_option("--seed", g_args.seed, "seed");
  generate->add_option("--matrices", g_args.matrices_dir, "directory for the matrix files");
  generate->add_flag("--binary", g_args.binary, "write the binary matrix format");
  add_common(generate, common, false);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("twc");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kIoError;
  }

  try {
    int code = kOk;
    std::string text;
    if (*mountains) {
      text = cmd_mountains(m_alpha, m_delta, m_slack, common);
    } else if (*minima) {
      text = cmd_minima(n_g, n_alpha, n_norm, n_p, n_k, common);
    } else if (*certify) {
      text = cmd_certify(c_args, common, code);
    } else if (*restrict) {
      text = cmd_restrict(r_args, common);
    } else if (*eigshare) {
      text = cmd_eigshare(e_args, common);
    } else if (*generate) {
      text = cmd_generate(g_args, common);
    }
    emit(common, out, text);
    return code;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kPrecondition;
  } catch (const DimensionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kPrecondition;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace twc::cli
