#include "mginf/dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <span>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "mginf/errors.hpp"

namespace mginf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template<class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be a positive finite number");
    }
}

void require_time(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("time argument must be nonnegative");
    }
}

double log_sum_exp(std::span<const double> terms) {
    const double top = *std::max_element(terms.begin(), terms.end());
    if (top == -kInf) {
        return -kInf;
    }
    double acc = 0.0;
    for (double t : terms) {
        acc += std::exp(t - top);
    }
    return top + std::log(acc);
}

double hyper_log_sf(const HyperExponential& h, double x) {
    std::vector<double> terms(h.weights.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        terms[i] = std::log(h.weights[i]) - h.rates[i] * x;
    }
    return log_sum_exp(terms);
}

double min_rate(const HyperExponential& h) {
    return *std::min_element(h.rates.begin(), h.rates.end());
}

}  // namespace

ServiceModel ServiceModel::exponential(double rate) {
    require_positive(rate, "exp rate");
    return ServiceModel(Exponential{rate});
}

ServiceModel ServiceModel::hyperexponential(std::vector<double> weights, std::vector<double> rates) {
    if (weights.empty() || weights.size() != rates.size()) {
        throw ConfigError("hyperexp needs equally many weights and rates (at least one)");
    }
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigError("hyperexp weights must be nonnegative");
        }
    }
    for (double r : rates) {
        require_positive(r, "hyperexp rate");
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigError("hyperexp weights must sum to 1");
    }
    return ServiceModel(HyperExponential{std::move(weights), std::move(rates)});
}

ServiceModel ServiceModel::erlang(int shape, double rate) {
    if (shape < 1) {
        throw ConfigError("erlang shape k must be a positive integer");
    }
    require_positive(rate, "erlang rate");
    return ServiceModel(Erlang{shape, rate});
}

ServiceModel ServiceModel::lomax(double alpha, double scale) {
    require_positive(alpha, "lomax alpha");
    require_positive(scale, "lomax scale");
    return ServiceModel(Lomax{alpha, scale});
}

ServiceModel ServiceModel::weibull_heavy(double shape, double scale) {
    if (!(shape > 0.0 && shape < 1.0)) {
        throw ConfigError("weibull shape must lie in (0,1)");
    }
    require_positive(scale, "weibull scale");
    return ServiceModel(WeibullHeavy{shape, scale});
}

double sf(const ServiceModel& model, double x) {
    require_time(x);
    return std::visit(
        overloaded{
            [x](const Exponential& e) { return std::exp(-e.rate * x); },
            [x](const HyperExponential& h) {
                double s = 0.0;
                for (std::size_t i = 0; i < h.weights.size(); ++i) {
                    s += h.weights[i] * std::exp(-h.rates[i] * x);
                }
                return s;
            },
            [x](const Erlang& e) { return boost::math::gamma_q(static_cast<double>(e.shape), e.rate * x); },
            [x](const Lomax& l) { return std::pow(1.0 + x / l.scale, -l.alpha); },
            [x](const WeibullHeavy& w) { return std::exp(-std::pow(x / w.scale, w.shape)); },
        },
        model.variant());
}

double log_sf(const ServiceModel& model, double x) {
    require_time(x);
    return std::visit(
        overloaded{
            [x](const Exponential& e) { return -e.rate * x; },
            [x](const HyperExponential& h) { return hyper_log_sf(h, x); },
            [x](const Erlang& e) {
                const double z = e.rate * x;
                if (z == 0.0) {
                    return 0.0;
                }
                std::vector<double> terms(static_cast<std::size_t>(e.shape));
                for (int j = 0; j < e.shape; ++j) {
                    terms[j] = j * std::log(z) - std::lgamma(j + 1.0);
                }
                return -z + log_sum_exp(terms);
            },
            [x](const Lomax& l) { return -l.alpha * std::log1p(x / l.scale); },
            [x](const WeibullHeavy& w) { return -std::pow(x / w.scale, w.shape); },
        },
        model.variant());
}

double cdf(const ServiceModel& model, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    return 1.0 - sf(model, x);
}

double pdf(const ServiceModel& model, double x) {
    require_time(x);
    return std::visit(
        overloaded{
            [x](const Exponential& e) { return e.rate * std::exp(-e.rate * x); },
            [x](const HyperExponential& h) {
                double s = 0.0;
                for (std::size_t i = 0; i < h.weights.size(); ++i) {
                    s += h.weights[i] * h.rates[i] * std::exp(-h.rates[i] * x);
                }
                return s;
            },
            [x](const Erlang& e) {
                return e.rate * boost::math::gamma_p_derivative(static_cast<double>(e.shape), e.rate * x);
            },
            [x](const Lomax& l) { return l.alpha / l.scale * std::pow(1.0 + x / l.scale, -l.alpha - 1.0); },
            [x](const WeibullHeavy& w) {
                if (x == 0.0) {
                    return kInf;
                }
                const double z = std::pow(x / w.scale, w.shape);
                return w.shape / x * z * std::exp(-z);
            },
        },
        model.variant());
}

double mean(const ServiceModel& model) {
    return tail_integral(model, 0.0);
}

double tail_integral(const ServiceModel& model, double t) {
    require_time(t);
    return std::visit(
        overloaded{
            [t](const Exponential& e) { return std::exp(-e.rate * t) / e.rate; },
            [t](const HyperExponential& h) {
                double s = 0.0;
                for (std::size_t i = 0; i < h.weights.size(); ++i) {
                    s += h.weights[i] * std::exp(-h.rates[i] * t) / h.rates[i];
                }
                return s;
            },
            [t](const Erlang& e) {
                // int_t^inf Q(k, r x) dx = (1/r) sum_{j=1..k} Q(j, r t)
                double s = 0.0;
                for (int j = 1; j <= e.shape; ++j) {
                    s += boost::math::gamma_q(static_cast<double>(j), e.rate * t);
                }
                return s / e.rate;
            },
            [t](const Lomax& l) {
                if (l.alpha <= 1.0) {
                    throw InfiniteMeanError("lomax with alpha <= 1 has infinite mean");
                }
                return l.scale * std::pow(1.0 + t / l.scale, 1.0 - l.alpha) / (l.alpha - 1.0);
            },
            [t](const WeibullHeavy& w) {
                const double a = 1.0 / w.shape;
                return w.scale * std::tgamma(1.0 + a) * boost::math::gamma_q(a, std::pow(t / w.scale, w.shape));
            },
        },
        model.variant());
}

double tail_integral_quadrature(const ServiceModel& model, double t) {
    require_time(t);
    if (const auto* l = std::get_if<Lomax>(&model.variant()); l && l->alpha <= 1.0) {
        throw InfiniteMeanError("lomax with alpha <= 1 has infinite mean");
    }
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&model](double x) { return sf(model, x); };
    double err = 0.0;
    // Relative target well below the 1e-10 absolute budget for O(1) integrals.
    return gauss_kronrod<double, 61>::integrate(f, t, kInf, 20, 1e-13, &err);
}

double sample_from_uniform(const ServiceModel& model, double u) {
    if (!(u >= 0.0 && u < 1.0)) {
        throw DomainError("uniform draw must lie in [0,1)");
    }
    return std::visit(
        overloaded{
            [u](const Exponential& e) { return -std::log1p(-u) / e.rate; },
            [u](const HyperExponential& h) {
                if (u == 0.0) {
                    return 0.0;
                }
                // sf is squeezed between the slowest and fastest exponential,
                // which brackets the quantile.
                const double target = std::log1p(-u);
                const auto [r_lo, r_hi] = std::minmax_element(h.rates.begin(), h.rates.end());
                const double lo = -target / *r_hi;
                const double hi = -target / *r_lo;
                if (hi - lo <= 0.0) {
                    return lo;
                }
                auto f = [&](double x) { return hyper_log_sf(h, x) - target; };
                boost::uintmax_t iters = 100;
                const auto [a, b] = boost::math::tools::toms748_solve(
                    f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
                return 0.5 * (a + b);
            },
            [u](const Erlang& e) {
                if (u == 0.0) {
                    return 0.0;
                }
                return boost::math::gamma_p_inv(static_cast<double>(e.shape), u) / e.rate;
            },
            [u](const Lomax& l) { return l.scale * std::expm1(-std::log1p(-u) / l.alpha); },
            [u](const WeibullHeavy& w) { return w.scale * std::pow(-std::log1p(-u), 1.0 / w.shape); },
        },
        model.variant());
}

TailClass classify_tail(const ServiceModel& model) {
    return std::visit(
        overloaded{
            [](const Exponential& e) -> TailClass { return LightTail{e.rate}; },
            [](const HyperExponential& h) -> TailClass { return LightTail{min_rate(h)}; },
            [](const Erlang& e) -> TailClass { return LightTail{e.rate}; },
            [](const Lomax& l) -> TailClass {
                const double a = l.alpha;
                const double c = l.scale;
                return RegularlyVaryingTail{a, [a, c](double x) { return std::pow(c, a) * std::pow(1.0 + c / x, -a); }};
            },
            [](const WeibullHeavy&) -> TailClass { return SubexponentialOtherTail{}; },
        },
        model.variant());
}

double exp_moment(const ServiceModel& model, double s) {
    if (s == 0.0) {
        return 1.0;
    }
    auto by_parts = [&model, s]() {
        // E e^{sX} = 1 + s int_0^inf e^{sx} sf(x) dx, valid for s < 0 here.
        using boost::math::quadrature::gauss_kronrod;
        auto f = [&model, s](double x) { return std::exp(s * x + log_sf(model, x)); };
        return 1.0 + s * gauss_kronrod<double, 61>::integrate(f, 0.0, kInf, 20, 1e-13);
    };
    return std::visit(
        overloaded{
            [s](const Exponential& e) { return s < e.rate ? e.rate / (e.rate - s) : kInf; },
            [s](const HyperExponential& h) {
                if (s >= min_rate(h)) {
                    return kInf;
                }
                double m = 0.0;
                for (std::size_t i = 0; i < h.weights.size(); ++i) {
                    m += h.weights[i] * h.rates[i] / (h.rates[i] - s);
                }
                return m;
            },
            [s](const Erlang& e) { return s < e.rate ? std::pow(e.rate / (e.rate - s), e.shape) : kInf; },
            [s, &by_parts](const Lomax&) { return s > 0.0 ? kInf : by_parts(); },
            [s, &by_parts](const WeibullHeavy&) { return s > 0.0 ? kInf : by_parts(); },
        },
        model.variant());
}

namespace {

double parse_number(std::string_view token, std::string_view key) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || token.empty()) {
        throw ConfigError("malformed number '" + std::string(token) + "' for key '" + std::string(key) + "'");
    }
    return v;
}

using KeyValues = std::map<std::string, std::vector<double>, std::less<>>;

// Tokens are separated by ',' or ';'; a token holding '=' opens a new key and
// bare tokens extend the current key's list.
KeyValues parse_body(std::string_view body) {
    KeyValues kv;
    std::string current;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const std::size_t end = std::min(body.find_first_of(",;", pos), body.size());
        const std::string_view token = body.substr(pos, end - pos);
        const std::size_t eq = token.find('=');
        if (eq != std::string_view::npos) {
            current = std::string(token.substr(0, eq));
            if (current.empty() || kv.contains(current)) {
                throw ConfigError("empty or repeated key in distribution spec");
            }
            kv[current].push_back(parse_number(token.substr(eq + 1), current));
        } else if (current.empty()) {
            throw ConfigError("distribution spec value '" + std::string(token) + "' has no key");
        } else {
            kv[current].push_back(parse_number(token, current));
        }
        pos = end + 1;
    }
    return kv;
}

class Fields {
  public:
    Fields(KeyValues kv, std::string name) : kv_(std::move(kv)), name_(std::move(name)) {}

    std::vector<double> list(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            throw ConfigError(name_ + " spec is missing key '" + key + "'");
        }
        auto values = std::move(it->second);
        kv_.erase(it);
        return values;
    }

    double scalar(const std::string& key) {
        auto values = list(key);
        if (values.size() != 1) {
            throw ConfigError(name_ + " key '" + key + "' takes a single value");
        }
        return values.front();
    }

    void finish() const {
        if (!kv_.empty()) {
            throw ConfigError(name_ + " spec has unknown key '" + kv_.begin()->first + "'");
        }
    }

  private:
    KeyValues kv_;
    std::string name_;
};

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + fmt_double(v[i]);
    }
    return out;
}

}  // namespace

ServiceModel parse_model(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError("distribution spec must look like name:key=value,...");
    }
    const std::string name(spec.substr(0, colon));
    Fields f(parse_body(spec.substr(colon + 1)), name);
    auto build = [&]() -> ServiceModel {
        if (name == "exp") {
            return ServiceModel::exponential(f.scalar("rate"));
        }
        if (name == "hyperexp") {
            auto w = f.list("w");
            return ServiceModel::hyperexponential(std::move(w), f.list("rates"));
        }
        if (name == "erlang") {
            const double k = f.scalar("k");
            if (k != std::floor(k) || k < 1.0 || k > 1e6) {
                throw ConfigError("erlang k must be a positive integer");
            }
            return ServiceModel::erlang(static_cast<int>(k), f.scalar("rate"));
        }
        if (name == "lomax") {
            const double a = f.scalar("alpha");
            return ServiceModel::lomax(a, f.scalar("scale"));
        }
        if (name == "weibull") {
            const double k = f.scalar("shape");
            return ServiceModel::weibull_heavy(k, f.scalar("scale"));
        }
        throw ConfigError("unknown distribution '" + name + "'");
    };
    ServiceModel model = build();
    f.finish();
    return model;
}

std::string to_string(const ServiceModel& model) {
    return std::visit(
        overloaded{
            [](const Exponential& e) { return "exp:rate=" + fmt_double(e.rate); },
            [](const HyperExponential& h) { return "hyperexp:w=" + join(h.weights) + ";rates=" + join(h.rates); },
            [](const Erlang& e) { return "erlang:k=" + std::to_string(e.shape) + ",rate=" + fmt_double(e.rate); },
            [](const Lomax& l) { return "lomax:alpha=" + fmt_double(l.alpha) + ",scale=" + fmt_double(l.scale); },
            [](const WeibullHeavy& w) { return "weibull:shape=" + fmt_double(w.shape) + ",scale=" + fmt_double(w.scale); },
        },
        model.variant());
}

}  // namespace mginf
