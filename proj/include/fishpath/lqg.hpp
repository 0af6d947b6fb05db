#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fishpath::lqg {

inline const double kGamma = std::sqrt(8.0 / 3.0);

/// Truncated log-correlated series on the circle:
///   k(l) = sum_{n=1..L} (a_n cos(n l) + b_n sin(n l)) / sqrt(n)
struct LqgField {
  double gamma = kGamma;
  std::size_t truncation = 0;
  std::uint64_t seed = 0;
  std::vector<double> a;
  std::vector<double> b;

  /// The field with every coefficient negated, k -> -k.
  LqgField negated() const;
  void validate() const;
};

LqgField sample_field(double gamma, std::size_t truncation, std::uint64_t seed);

/// A field with the given coefficients (no sampling); used for replay and tests.
LqgField field_from_coefficients(double gamma, std::vector<double> a, std::vector<double> b,
                                 std::uint64_t seed = 0);

double eval_field(const LqgField& field, double l);

/// exp(gamma k(l)); NumericalError when the exponent leaves the double range.
double metric_weight(const LqgField& field, double l);
double metric_weight_of(double gamma, double k);

/// Q = 2/gamma + gamma/2.
double q_constant(double gamma);

struct ConformalMap {
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  static ConformalMap identity();
  static ConformalMap scaling(double factor);
};

using FieldFn = std::function<double(double)>;

/// l -> k(zeta(l)) + Q(gamma) log|zeta'(l)|.
FieldFn coordinate_change(FieldFn k, ConformalMap zeta, double gamma);
FieldFn as_function(const LqgField& field);

std::string field_to_json(const LqgField& field);
LqgField field_from_json(const std::string& text);

}  // namespace fishpath::lqg
