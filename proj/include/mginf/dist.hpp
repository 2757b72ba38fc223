#pragma once

#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mginf {

struct Exponential {
    double rate;
};

struct HyperExponential {
    std::vector<double> weights;
    std::vector<double> rates;
};

struct Erlang {
    int shape;
    double rate;
};

// Survival (1 + x/scale)^(-alpha).
struct Lomax {
    double alpha;
    double scale;
};

// Survival exp(-(x/scale)^shape) with shape in (0,1): subexponential but not
// regularly varying.
struct WeibullHeavy {
    double shape;
    double scale;
};

/// A continuous service-time law on [0, inf) with B(0) = 0.
///
/// Values are immutable once constructed through the `make` factories or
/// `parse_model`, which enforce the parameter invariants.
class ServiceModel {
  public:
    using Variant = std::variant<Exponential, HyperExponential, Erlang, Lomax, WeibullHeavy>;

    static ServiceModel exponential(double rate);
    static ServiceModel hyperexponential(std::vector<double> weights, std::vector<double> rates);
    static ServiceModel erlang(int shape, double rate);
    static ServiceModel lomax(double alpha, double scale);
    static ServiceModel weibull_heavy(double shape, double scale);

    const Variant& variant() const noexcept { return v_; }

    template<class T>
    bool is() const noexcept {
        return std::holds_alternative<T>(v_);
    }

  private:
    explicit ServiceModel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

struct LightTail {
    double cramer_abscissa;  // s*; +inf allowed
};

struct RegularlyVaryingTail {
    double alpha;
    // Slowly varying part: sf(x) = x^-alpha * slowly_varying(x).
    std::function<double(double)> slowly_varying;
};

struct SubexponentialOtherTail {};

using TailClass = std::variant<LightTail, RegularlyVaryingTail, SubexponentialOtherTail>;

double sf(const ServiceModel& model, double x);
double log_sf(const ServiceModel& model, double x);
double cdf(const ServiceModel& model, double x);
double pdf(const ServiceModel& model, double x);
double mean(const ServiceModel& model);

/// Integral of the survival function over [t, inf), in closed form for every
/// catalog law.
double tail_integral(const ServiceModel& model, double t);

/// Same integral by adaptive Gauss-Kronrod quadrature (absolute tolerance
/// 1e-10). Independent of the closed forms; used as a fallback and an oracle.
double tail_integral_quadrature(const ServiceModel& model, double t);

/// Inverse-CDF transform of a uniform u in [0,1).
double sample_from_uniform(const ServiceModel& model, double u);

template<class Rng>
double sample(const ServiceModel& model, Rng& rng) {
    return sample_from_uniform(model, std::generate_canonical<double, 53>(rng));
}

TailClass classify_tail(const ServiceModel& model);

/// E[e^{sX}] = int e^{sx} dB(x); +inf when divergent.
double exp_moment(const ServiceModel& model, double s);

/// Parses `exp:rate=1.0`, `hyperexp:w=0.5,0.5;rates=1,2`, `erlang:k=2,rate=3`,
/// `lomax:alpha=3,scale=1` and `weibull:shape=0.5,scale=1`.
ServiceModel parse_model(std::string_view spec);
std::string to_string(const ServiceModel& model);

}  // namespace mginf
