#include "twc/io.hpp"

#include "twc/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace twc {

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void write_matrix_text(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << "  ";
      out << m(i, j).real() << ' ' << m(i, j).imag();
    }
    out << '\n';
  }
  if (!out) throw IoError("write_matrix_text: stream error");
}

DenseMatrix read_matrix_text(std::istream& in) {
  long long rows = 0;
  long long cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw IoError("matrix text: expected a header 'rows cols' with positive sizes");
  }
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      double re = 0.0;
      double im = 0.0;
      if (!(in >> re >> im)) {
        throw IoError("matrix text: expected " + std::to_string(rows * cols) +
                      " complex entries, stopped at entry (" + std::to_string(i) + ", " +
                      std::to_string(j) + ")");
      }
      m(i, j) = Complex(re, im);
    }
  }
  std::string rest;
  if (in >> rest) throw IoError("matrix text: trailing data after the last entry");
  require_finite(m, "matrix text");
  return m;
}

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'W', 'C', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  if (!in.read(bytes.data(), sizeof(T))) throw IoError("matrix binary: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_matrix_binary(std::ostream& out, const DenseMatrix& m) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      put_le<double>(out, m(i, j).real());
      put_le<double>(out, m(i, j).imag());
    }
  }
  if (!out) throw IoError("write_matrix_binary: stream error");
}

DenseMatrix read_matrix_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IoError("matrix binary: missing TWC1 magic");
  }
  const auto rows = get_le<std::uint64_t>(in);
  const auto cols = get_le<std::uint64_t>(in);
  if (rows == 0 || cols == 0 || rows > (1u << 16) || cols > (1u << 16)) {
    throw IoError("matrix binary: implausible dimensions");
  }
  DenseMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      m(i, j) = Complex(re, im);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError("matrix binary: trailing data after the last entry");
  }
  require_finite(m, "matrix binary");
  return m;
}

DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 4 && head == kMagic;
  in.clear();
  in.seekg(0);
  try {
    return binary ? read_matrix_binary(in) : read_matrix_text(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_matrix_file(const std::string& path, const DenseMatrix& m, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write '" + path + "'");
  if (binary) {
    write_matrix_binary(out, m);
  } else {
    write_matrix_text(out, m);
  }
}

NormSpec parse_norm(const std::string& name, double p, Index k) {
  if (name == "op") return NormSpec::op();
  if (name == "fro") return NormSpec::frobenius();
  if (name == "pk") {
    if (!(p >= 1.0)) throw PreconditionError("norm pk: p must be >= 1");
    if (k < 0) throw PreconditionError("norm pk: k must be >= 1 (0 for all)");
    return k == 0 ? NormSpec::schatten(p) : NormSpec::pk(p, k);
  }
  throw PreconditionError("unknown norm '" + name + "' (op, fro, pk)");
}

Json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double json_to_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw IoError("expected a number, got " + j.dump());
}

Json to_json(const ModelSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  j["g"] = spec.g;
  if (spec.kind == ModelKind::tensor_double) j["g2"] = spec.g2;
  j["n_excited"] = spec.n_excited;
  j["gap"] = spec.gap;
  j["width"] = spec.width;
  j["perturbation"] = spec.perturbation;
  j["unitary_perturbation"] = spec.unitary_perturbation;
  j["rotate_basis"] = spec.rotate_basis;
  j["seed"] = spec.seed;
  return j;
}

ModelSpec model_spec_from_json(const Json& j) {
  if (!j.is_object()) throw IoError("model spec: expected a JSON object");
  ModelSpec spec;
  try {
    if (j.contains("kind")) spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    spec.g = j.value("g", spec.g);
    spec.g2 = j.value("g2", spec.g2);
    spec.n_excited = j.value("n_excited", spec.n_excited);
    spec.gap = j.value("gap", spec.gap);
    spec.width = j.value("width", spec.width);
    spec.perturbation = j.value("perturbation", spec.perturbation);
    spec.unitary_perturbation = j.value("unitary_perturbation", spec.unitary_perturbation);
    spec.rotate_basis = j.value("rotate_basis", spec.rotate_basis);
    spec.seed = j.value("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model spec: ") + e.what());
  }
  return spec;
}

Json to_json(const Certificate& cert) {
  Json j;
  j["method"] = to_string(cert.method);
  j["d_min"] = cert.d_min;
  Json inputs = Json::object();
  for (const auto& [name, value] : cert.inputs) inputs[name] = json_number(value);
  j["inputs"] = inputs;
  j["slack"] = json_number(cert.slack);
  if (!cert.stabs.empty() || cert.method == CertMethod::greedy_transversal) {
    Json witness;
    witness["stabs"] = cert.stabs;
    Json arcs = Json::array();
    for (const auto& iv : cert.minimal_arcs) arcs.push_back({iv.index, iv.left, iv.right});
    witness["minimal_arcs"] = arcs;
    j["witness"] = witness;
  }
  if (!cert.note.empty()) j["note"] = cert.note;
  return j;
}

Certificate certificate_from_json(const Json& j) {
  Certificate cert;
  try {
    cert.method = cert_method_from_string(j.at("method").get<std::string>());
    cert.d_min = j.at("d_min").get<int>();
    for (const auto& [name, value] : j.at("inputs").items()) {
      cert.inputs.emplace_back(name, json_to_double(value));
    }
    if (j.contains("slack")) cert.slack = json_to_double(j.at("slack"));
    if (j.contains("witness")) {
      const auto& w = j.at("witness");
      cert.stabs = w.value("stabs", std::vector<double>{});
      for (const auto& a : w.value("minimal_arcs", Json::array())) {
        cert.minimal_arcs.push_back({a.at(1).get<double>(), a.at(2).get<double>(), a.at(0).get<long>()});
      }
    }
    cert.note = j.value("note", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("certificate: ") + e.what());
  }
  return cert;
}

}  // namespace twc
