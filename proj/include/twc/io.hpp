#ifndef TWC_IO_HPP
#define TWC_IO_HPP

#include "twc/certify.hpp"
#include "twc/linalg.hpp"
#include "twc/models.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace twc {

using Json = nlohmann::ordered_json;

/// 17 significant digits, enough to round-trip a double.
std::string format_double(double x);

/// Text format: "rows cols" then row-major "re im" pairs.
void write_matrix_text(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix_text(std::istream& in);

/// Binary format: "TWC1", rows and cols as little-endian u64, then
/// little-endian doubles re, im in row-major order.
void write_matrix_binary(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix_binary(std::istream& in);

/// Detects the format from the leading bytes.
DenseMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const DenseMatrix& m, bool binary = false);

/// "op", "fro", or "pk" with the given p and k (k = 0 means all singular values).
NormSpec parse_norm(const std::string& name, double p, Index k);

Json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const Json& j);

Json to_json(const Certificate& cert);
Certificate certificate_from_json(const Json& j);

/// Finite doubles as numbers; inf and nan as the strings "inf", "-inf", "nan".
Json json_number(double x);
double json_to_double(const Json& j);

}  // namespace twc

#endif
