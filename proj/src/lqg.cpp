#include "fishpath/lqg.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "fishpath/errors.hpp"
#include "fishpath/rng.hpp"

namespace fishpath::lqg {

void LqgField::validate() const {
  require(std::isfinite(gamma) && gamma > 0.0 && gamma < 2.0, "gamma must lie in (0, 2)");
  require(truncation >= 1, "field truncation must be at least 1");
  require(a.size() == truncation && b.size() == truncation,
          "field needs truncation cosine and sine coefficients");
}

LqgField LqgField::negated() const {
  LqgField out = *this;
  for (double& c : out.a) c = -c;
  for (double& c : out.b) c = -c;
  return out;
}

LqgField sample_field(double gamma, std::size_t truncation, std::uint64_t seed) {
  require(truncation >= 1, "field truncation must be at least 1");
  rng::NormalSource normal(seed, rng::Stream::field, 0);
  LqgField f;
  f.gamma = gamma;
  f.truncation = truncation;
  f.seed = seed;
  f.a.resize(truncation);
  f.b.resize(truncation);
  for (std::size_t n = 0; n < truncation; ++n) {
    f.a[n] = normal();
    f.b[n] = normal();
  }
  f.validate();
  return f;
}

LqgField field_from_coefficients(double gamma, std::vector<double> a, std::vector<double> b,
                                 std::uint64_t seed) {
  LqgField f;
  f.gamma = gamma;
  f.truncation = a.size();
  f.seed = seed;
  f.a = std::move(a);
  f.b = std::move(b);
  f.validate();
  return f;
}

double eval_field(const LqgField& field, double l) {
  require(std::isfinite(l), "field evaluated at a non-finite parameter");
  double k = 0.0;
  for (std::size_t i = 0; i < field.truncation; ++i) {
    const double n = static_cast<double>(i + 1);
    k += (field.a[i] * std::cos(n * l) + field.b[i] * std::sin(n * l)) / std::sqrt(n);
  }
  return k;
}

double metric_weight_of(double gamma, double k) {
  const double exponent = gamma * k;
  if (!std::isfinite(exponent) || std::abs(exponent) > 709.0) {
    throw NumericalError(fmt::format("metric weight exponent {} is outside the double range", exponent));
  }
  return std::exp(exponent);
}

double metric_weight(const LqgField& field, double l) {
  return metric_weight_of(field.gamma, eval_field(field, l));
}

double q_constant(double gamma) {
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
  return 2.0 / gamma + gamma / 2.0;
}

ConformalMap ConformalMap::identity() {
  return {[](double l) { return l; }, [](double) { return 1.0; }};
}

ConformalMap ConformalMap::scaling(double factor) {
  return {[factor](double l) { return factor * l; }, [factor](double) { return factor; }};
}

FieldFn coordinate_change(FieldFn k, ConformalMap zeta, double gamma) {
  require(k && zeta.value && zeta.derivative, "coordinate change needs a field and a map");
  const double q = q_constant(gamma);
  return [k = std::move(k), zeta = std::move(zeta), q](double l) {
    const double d = zeta.derivative(l);
    if (d == 0.0 || !std::isfinite(d)) {
      throw NumericalError(fmt::format("conformal map derivative vanishes at l={}", l));
    }
    return k(zeta.value(l)) + q * std::log(std::abs(d));
  };
}

FieldFn as_function(const LqgField& field) {
  return [field](double l) { return eval_field(field, l); };
}

std::string field_to_json(const LqgField& field) {
  nlohmann::ordered_json j;
  j["gamma"] = field.gamma;
  j["L"] = field.truncation;
  j["seed"] = field.seed;
  j["coefficients"] = {{"a", field.a}, {"b", field.b}};
  return j.dump(2);
}

LqgField field_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return field_from_coefficients(j.at("gamma").get<double>(),
                                 j.at("coefficients").at("a").get<std::vector<double>>(),
                                 j.at("coefficients").at("b").get<std::vector<double>>(),
                                 j.at("seed").get<std::uint64_t>());
}

}  // namespace fishpath::lqg
